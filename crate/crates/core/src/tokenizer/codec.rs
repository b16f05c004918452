use std::collections::HashMap;

use super::block::block_index_unchecked;
use super::{
    block_inverse, build_patches, BlockIndex, Patch, Token, TokenClass, TokenError, VocabSpec,
};
use crate::mesh::QuantizedMesh;

/// An encoded mesh: tokens plus the number of faces they describe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    spec: VocabSpec,
    tokens: Vec<Token>,
    face_count: u32,
}

impl TokenSequence {
    /// Checks each token value against its class range. Grammar is checked
    /// by [`decode`].
    pub fn new(spec: VocabSpec, tokens: Vec<Token>, face_count: u32) -> Result<Self, TokenError> {
        if let Some(t) = tokens.iter().find(|t| t.value >= spec.class_len(t.class)) {
            return Err(TokenError::Domain(format!(
                "token {t:?} outside its class range"
            )));
        }
        Ok(Self {
            spec,
            tokens,
            face_count,
        })
    }

    pub fn from_ids(spec: VocabSpec, ids: &[u32], face_count: u32) -> Result<Self, TokenError> {
        let tokens = ids
            .iter()
            .map(|&id| spec.token_from_id(id))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            spec,
            tokens,
            face_count,
        })
    }

    pub fn spec(&self) -> &VocabSpec {
        &self.spec
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn ids(&self) -> Vec<u32> {
        self.tokens.iter().map(|&t| self.spec.token_id(t)).collect()
    }

    pub fn face_count(&self) -> u32 {
        self.face_count
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Each patch starts with exactly one `CENTER_I`.
    pub fn patch_count(&self) -> usize {
        self.tokens
            .iter()
            .filter(|t| t.class == TokenClass::CenterI)
            .count()
    }
}

/// Output of [`encode_detailed`].
#[derive(Debug, Clone)]
pub struct Encoded {
    pub sequence: TokenSequence,
    pub patches: Vec<Patch>,
    /// Tokens emitted for each patch, parallel to `patches`.
    pub patch_tokens: Vec<usize>,
}

pub fn encode(qmesh: &QuantizedMesh, spec: &VocabSpec) -> Result<TokenSequence, TokenError> {
    encode_detailed(qmesh, spec).map(|e| e.sequence)
}

/// Encodes every patch as a full `CENTER_I J K` center followed by its ring.
/// A ring vertex drops its leading block offsets when they repeat those of
/// the previous vertex in the same patch: same `i` and `j` emit `K`, same
/// `i` emits `J K`, otherwise `I J K`.
pub fn encode_detailed(qmesh: &QuantizedMesh, spec: &VocabSpec) -> Result<Encoded, TokenError> {
    if qmesh.resolution() != spec.resolution() {
        return Err(TokenError::Vocab(format!(
            "mesh resolution {} does not match vocabulary resolution {}",
            qmesh.resolution(),
            spec.resolution()
        )));
    }
    let patches = build_patches(qmesh);
    let mut tokens = Vec::with_capacity(qmesh.faces().len() * 3);
    let mut patch_tokens = Vec::with_capacity(patches.len());
    for patch in &patches {
        let start = tokens.len();
        let center = block_index_unchecked(patch.center, spec);
        tokens.extend([
            Token::new(TokenClass::CenterI, center.i),
            Token::new(TokenClass::J, center.j),
            Token::new(TokenClass::K, center.k),
        ]);
        let mut prev = center;
        for &v in &patch.ring {
            let b = block_index_unchecked(v, spec);
            if b.i != prev.i {
                tokens.push(Token::new(TokenClass::I, b.i));
            }
            if b.i != prev.i || b.j != prev.j {
                tokens.push(Token::new(TokenClass::J, b.j));
            }
            tokens.push(Token::new(TokenClass::K, b.k));
            prev = b;
        }
        let n = patch.ring.len();
        let emitted = tokens.len() - start;
        debug_assert!(n + 3 <= emitted && emitted <= 3 * (n + 1));
        patch_tokens.push(emitted);
    }
    let face_count = u32::try_from(qmesh.faces().len())
        .map_err(|_| TokenError::Domain("more than u32::MAX faces".into()))?;
    Ok(Encoded {
        sequence: TokenSequence {
            spec: *spec,
            tokens,
            face_count,
        },
        patches,
        patch_tokens,
    })
}

struct Cursor<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl Cursor<'_> {
    fn expect(&mut self, class: TokenClass) -> Result<u32, TokenError> {
        let Some(t) = self.tokens.get(self.pos) else {
            return Err(TokenError::Truncated {
                position: self.pos,
                message: format!("stream ended, expected {class:?}"),
            });
        };
        if t.class != class {
            return Err(TokenError::Parse {
                position: self.pos,
                message: format!("expected {class:?}, found {:?}", t.class),
            });
        }
        self.pos += 1;
        Ok(t.value)
    }

    fn peek(&self) -> Option<TokenClass> {
        self.tokens.get(self.pos).map(|t| t.class)
    }
}

/// Parses `patch+` where `patch := CENTER_I J K vertex vertex+` and
/// `vertex := I J K | J K | K`, rebuilding the fans.
pub fn decode(seq: &TokenSequence) -> Result<QuantizedMesh, TokenError> {
    let spec = seq.spec();
    let mut cur = Cursor {
        tokens: seq.tokens(),
        pos: 0,
    };
    let mut index: HashMap<[u32; 3], u32> = HashMap::new();
    let mut vertices = Vec::new();
    let mut faces = Vec::with_capacity(seq.face_count() as usize);
    let mut intern = |q: [u32; 3]| {
        *index.entry(q).or_insert_with(|| {
            vertices.push(q);
            vertices.len() as u32 - 1
        })
    };
    let mut ring = Vec::new();

    while cur.peek().is_some() {
        let i = cur.expect(TokenClass::CenterI)?;
        let j = cur.expect(TokenClass::J)?;
        let k = cur.expect(TokenClass::K)?;
        let center = intern(block_inverse(BlockIndex { i, j, k }, spec));
        let mut prev = BlockIndex { i, j, k };
        ring.clear();
        while let Some(class) = cur.peek() {
            let b = match class {
                TokenClass::CenterI => break,
                TokenClass::I => BlockIndex {
                    i: cur.expect(TokenClass::I)?,
                    j: cur.expect(TokenClass::J)?,
                    k: cur.expect(TokenClass::K)?,
                },
                TokenClass::J => BlockIndex {
                    i: prev.i,
                    j: cur.expect(TokenClass::J)?,
                    k: cur.expect(TokenClass::K)?,
                },
                TokenClass::K => BlockIndex {
                    k: cur.expect(TokenClass::K)?,
                    ..prev
                },
            };
            ring.push(intern(block_inverse(b, spec)));
            prev = b;
        }
        if ring.len() < 2 {
            return Err(TokenError::Truncated {
                position: cur.pos,
                message: format!("patch has {} ring vertices, needs at least 2", ring.len()),
            });
        }
        for w in ring.windows(2) {
            if w[0] == w[1] || w[0] == center || w[1] == center {
                return Err(TokenError::Parse {
                    position: cur.pos,
                    message: "patch describes a degenerate face".into(),
                });
            }
            faces.push([center, w[0], w[1]]);
        }
    }
    Ok(QuantizedMesh::new_unchecked(
        spec.resolution(),
        vertices,
        faces,
    ))
}

/// Token count over the `9 * faces` of the vanilla per-face layout.
pub fn compression_ratio(seq: &TokenSequence) -> Result<f64, TokenError> {
    if seq.face_count() == 0 {
        return Err(TokenError::Domain(
            "compression ratio of a mesh with no faces".into(),
        ));
    }
    Ok(seq.len() as f64 / (9.0 * seq.face_count() as f64))
}
