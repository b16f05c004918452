//! Token stream files.
//!
//! Binary layout (little-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "DMTK"
//! 4       1     version (1)
//! 5       2     resolution r
//! 7       1     A
//! 8       1     B
//! 9       1     C
//! 10      4     face count
//! 14      4     token count
//! 18      2*n   token ids (u16)
//! ```
//!
//! The text form is one decimal id per line and carries no header.

use super::{TokenError, TokenSequence, VocabSpec};

pub const MAGIC: &[u8; 4] = b"DMTK";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 18;

/// A parsed DMTK file. Ids are not checked against the vocabulary, since
/// packed windows carry pad ids past its end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DmtkFile {
    pub spec: VocabSpec,
    pub face_count: u32,
    pub ids: Vec<u32>,
}

impl DmtkFile {
    pub fn from_sequence(seq: &TokenSequence) -> Self {
        Self {
            spec: *seq.spec(),
            face_count: seq.face_count(),
            ids: seq.ids(),
        }
    }

    pub fn to_sequence(&self) -> Result<TokenSequence, TokenError> {
        TokenSequence::from_ids(self.spec, &self.ids, self.face_count)
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, TokenError> {
        let narrow = |v: u32, what: &str| {
            u8::try_from(v)
                .map_err(|_| TokenError::Vocab(format!("{what} = {v} does not fit the header")))
        };
        let r = u16::try_from(self.spec.resolution()).map_err(|_| {
            TokenError::Vocab(format!(
                "resolution {} does not fit u16",
                self.spec.resolution()
            ))
        })?;
        let count = u32::try_from(self.ids.len())
            .map_err(|_| TokenError::Domain("more than u32::MAX tokens".into()))?;
        let mut out = Vec::with_capacity(HEADER_LEN + 2 * self.ids.len());
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&r.to_le_bytes());
        out.push(narrow(self.spec.a(), "A")?);
        out.push(narrow(self.spec.b(), "B")?);
        out.push(narrow(self.spec.c(), "C")?);
        out.extend_from_slice(&self.face_count.to_le_bytes());
        out.extend_from_slice(&count.to_le_bytes());
        for &id in &self.ids {
            let id = u16::try_from(id)
                .map_err(|_| TokenError::Domain(format!("token id {id} does not fit u16")))?;
            out.extend_from_slice(&id.to_le_bytes());
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, TokenError> {
        let err = |offset: usize, message: &str| TokenError::Format {
            offset,
            message: message.to_string(),
        };
        if bytes.len() < HEADER_LEN {
            return Err(err(bytes.len(), "truncated header"));
        }
        if &bytes[0..4] != MAGIC {
            return Err(err(0, "bad magic, expected DMTK"));
        }
        if bytes[4] != VERSION {
            return Err(err(4, &format!("unsupported version {}", bytes[4])));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
        let r = u16::from_le_bytes([bytes[5], bytes[6]]) as u32;
        let spec = VocabSpec::with_resolution(r, bytes[7] as u32, bytes[8] as u32, bytes[9] as u32)
            .map_err(|e| err(5, &e.to_string()))?;
        let face_count = u32_at(10);
        let token_count = u32_at(14) as usize;
        let body = &bytes[HEADER_LEN..];
        let expected = token_count
            .checked_mul(2)
            .ok_or_else(|| err(14, "token count overflows"))?;
        if body.len() < expected {
            // Offset of the first id that is incomplete or missing.
            return Err(err(
                HEADER_LEN + body.len() / 2 * 2,
                &format!(
                    "truncated body: header promises {token_count} tokens, found {} bytes",
                    body.len()
                ),
            ));
        }
        if body.len() > expected {
            return Err(err(
                HEADER_LEN + expected,
                "trailing bytes after last token",
            ));
        }
        let ids = body
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]) as u32)
            .collect();
        Ok(Self {
            spec,
            face_count,
            ids,
        })
    }
}

pub fn write_text(ids: &[u32]) -> String {
    let mut out = String::with_capacity(ids.len() * 4);
    for id in ids {
        out.push_str(&id.to_string());
        out.push('\n');
    }
    out
}

/// Parses one id per line; blank lines are skipped.
pub fn read_text(text: &str) -> Result<Vec<u32>, TokenError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            l.trim().parse().map_err(|_| TokenError::Parse {
                position: n,
                message: format!("line {}: `{}` is not a token id", n + 1, l.trim()),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DmtkFile {
        DmtkFile {
            spec: VocabSpec::default(),
            face_count: 1,
            ids: vec![64, 128, 640, 641, 656],
        }
    }

    #[test]
    fn exact_bytes() {
        let bytes = sample().to_bytes().unwrap();
        let mut expected = b"DMTK\x01".to_vec();
        expected.extend([0x00, 0x02, 4, 8, 16, 1, 0, 0, 0, 5, 0, 0, 0]);
        expected.extend([64, 0, 128, 0, 128, 2, 129, 2, 144, 2]);
        assert_eq!(bytes, expected);
        assert_eq!(DmtkFile::from_bytes(&bytes).unwrap(), sample());
    }

    #[test]
    fn truncation_reports_offset() {
        let bytes = sample().to_bytes().unwrap();
        let cut = &bytes[..bytes.len() - 3];
        assert_eq!(
            DmtkFile::from_bytes(cut).unwrap_err(),
            TokenError::Format {
                offset: 24,
                message: "truncated body: header promises 5 tokens, found 7 bytes".into()
            }
        );
        assert!(matches!(
            DmtkFile::from_bytes(&bytes[..10]),
            Err(TokenError::Format { offset: 10, .. })
        ));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(
            DmtkFile::from_bytes(&bad),
            Err(TokenError::Format { offset: 0, .. })
        ));
        let mut inconsistent = bytes;
        inconsistent[7] = 2;
        assert!(matches!(
            DmtkFile::from_bytes(&inconsistent),
            Err(TokenError::Format { offset: 5, .. })
        ));
    }

    #[test]
    fn text_form() {
        let ids = vec![64, 128, 640];
        assert_eq!(write_text(&ids), "64\n128\n640\n");
        assert_eq!(read_text("64\n128\n\n640\n").unwrap(), ids);
        assert!(matches!(
            read_text("64\nx\n"),
            Err(TokenError::Parse { position: 1, .. })
        ));
    }
}
