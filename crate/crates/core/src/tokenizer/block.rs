use super::{TokenError, VocabSpec};

/// A grid coordinate split into coarse (`i`), middle (`j`) and fine (`k`)
/// block offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockIndex {
    pub i: u32,
    pub j: u32,
    pub k: u32,
}

/// Splits each axis into base-`A`, base-`B`, base-`C` digits and packs the
/// digits of one level across `(x, y, z)`:
///
/// ```text
/// i = (x / BC) A^2 + (y / BC) A + z / BC
/// j = ((x % BC) / C) B^2 + ((y % BC) / C) B + (z % BC) / C
/// k = (x % C) C^2 + (y % C) C + z % C
/// ```
pub fn block_index(q: [u32; 3], spec: &VocabSpec) -> Result<BlockIndex, TokenError> {
    let r = spec.resolution();
    if let Some(c) = q.iter().find(|&&c| c >= r) {
        return Err(TokenError::Domain(format!(
            "coordinate {c} outside [0, {}]",
            r - 1
        )));
    }
    Ok(block_index_unchecked(q, spec))
}

#[inline]
pub(crate) fn block_index_unchecked(q: [u32; 3], spec: &VocabSpec) -> BlockIndex {
    let (a, b, c) = (spec.a(), spec.b(), spec.c());
    let bc = b * c;
    let pack = |d: [u32; 3], base: u32| (d[0] * base + d[1]) * base + d[2];
    BlockIndex {
        i: pack(q.map(|x| x / bc), a),
        j: pack(q.map(|x| x % bc / c), b),
        k: pack(q.map(|x| x % c), c),
    }
}

/// Reassembles the grid coordinate; each axis is `d_A * BC + d_B * C + d_C`.
pub fn block_inverse(block: BlockIndex, spec: &VocabSpec) -> [u32; 3] {
    let (a, b, c) = (spec.a(), spec.b(), spec.c());
    let unpack = |v: u32, base: u32| [v / (base * base), v / base % base, v % base];
    let (da, db, dc) = (unpack(block.i, a), unpack(block.j, b), unpack(block.k, c));
    std::array::from_fn(|n| (da[n] * b + db[n]) * c + dc[n])
}
