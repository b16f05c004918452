use super::TokenError;

/// Block side lengths `A`, `B`, `C` per hierarchy level; the grid resolution
/// is `A * B * C`.
///
/// Token ids are laid out as `[ I | CENTER_I | J | K ]`, i.e. class bases
/// `0`, `A^3`, `2A^3`, `2A^3 + B^3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VocabSpec {
    a: u32,
    b: u32,
    c: u32,
}

impl Default for VocabSpec {
    fn default() -> Self {
        Self { a: 4, b: 8, c: 16 }
    }
}

impl VocabSpec {
    pub fn new(a: u32, b: u32, c: u32) -> Result<Self, TokenError> {
        if a == 0 || b == 0 || c == 0 {
            return Err(TokenError::Vocab(format!(
                "block sizes must be positive, got {a},{b},{c}"
            )));
        }
        let spec = Self { a, b, c };
        // Everything downstream indexes with u32 ids.
        let size = 2 * (a as u64).pow(3) + (b as u64).pow(3) + (c as u64).pow(3);
        if size > u32::MAX as u64 || (a as u64) * (b as u64) * (c as u64) > u32::MAX as u64 {
            return Err(TokenError::Vocab(format!(
                "blocks {a},{b},{c} overflow 32-bit ids"
            )));
        }
        Ok(spec)
    }

    /// Like [`VocabSpec::new`], additionally requiring `A * B * C == resolution`.
    pub fn with_resolution(resolution: u32, a: u32, b: u32, c: u32) -> Result<Self, TokenError> {
        let spec = Self::new(a, b, c)?;
        if spec.resolution() != resolution {
            return Err(TokenError::Vocab(format!(
                "blocks {a}*{b}*{c} = {} does not match resolution {resolution}",
                spec.resolution()
            )));
        }
        Ok(spec)
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    pub fn resolution(&self) -> u32 {
        self.a * self.b * self.c
    }

    /// Number of values in a class.
    pub fn class_len(&self, class: TokenClass) -> u32 {
        match class {
            TokenClass::I | TokenClass::CenterI => self.a.pow(3),
            TokenClass::J => self.b.pow(3),
            TokenClass::K => self.c.pow(3),
        }
    }

    pub fn class_base(&self, class: TokenClass) -> u32 {
        let a3 = self.a.pow(3);
        match class {
            TokenClass::I => 0,
            TokenClass::CenterI => a3,
            TokenClass::J => 2 * a3,
            TokenClass::K => 2 * a3 + self.b.pow(3),
        }
    }

    pub fn vocab_size(&self) -> u32 {
        2 * self.a.pow(3) + self.b.pow(3) + self.c.pow(3)
    }

    pub fn token_id(&self, token: Token) -> u32 {
        self.class_base(token.class) + token.value
    }

    /// Inverse of [`VocabSpec::token_id`].
    pub fn token_from_id(&self, id: u32) -> Result<Token, TokenError> {
        if id >= self.vocab_size() {
            return Err(TokenError::Domain(format!(
                "token id {id} outside vocabulary of {}",
                self.vocab_size()
            )));
        }
        let class = [
            TokenClass::K,
            TokenClass::J,
            TokenClass::CenterI,
            TokenClass::I,
        ]
        .into_iter()
        .find(|&c| id >= self.class_base(c))
        .expect("I has base 0");
        Ok(Token::new(class, id - self.class_base(class)))
    }
}

pub fn vocab_size(spec: &VocabSpec) -> u32 {
    spec.vocab_size()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenClass {
    /// Coarse block of a patch center; doubles as the patch delimiter.
    CenterI,
    I,
    J,
    K,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Token {
    pub class: TokenClass,
    pub value: u32,
}

impl Token {
    pub fn new(class: TokenClass, value: u32) -> Self {
        Self { class, value }
    }
}
