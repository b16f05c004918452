//! Lossless triangle-fan tokenization of quantized meshes, plus the
//! training-data plumbing around it: context-window packing, curation
//! filters, Chamfer/Hausdorff metrics, preference-pair gating and the DPO
//! objective.
//!
//! The codec pipeline is
//! [`load_mesh`] → [`normalize`] → [`quantize`] → [`encode`] → [`decode`].

pub mod curation;
pub mod fmt;
pub mod mesh;
pub mod metrics;
pub mod packing;
pub mod tokenizer;

pub use mesh::{
    dequantize, load_mesh, mesh_area, normalize, quantize, quantize_with_stats, rotate90,
    sample_surface, write_obj, Axis, Mesh, MeshError, MeshFormat, NormalizationTransform, PointSet,
    QuantizeStats, QuantizedMesh,
};
pub use tokenizer::{
    block_index, block_inverse, build_patches, compression_ratio, decode, encode, encode_detailed,
    vocab_size, BlockIndex, Patch, Token, TokenClass, TokenError, TokenSequence, VocabSpec,
};
