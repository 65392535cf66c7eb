//! Length-n digit strings over {0..q-1}: Hilbert-space basis labels with the
//! weight, shift, complement, and lowering operations used by the code
//! constructions.
//!
//! Site 1 is stored first and is the most significant digit of the basis
//! index, so the string `1000` labels index q^3 on four sites.

use std::fmt;

use crate::{AqecError, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DitString {
    digits: Vec<u8>,
    q: u8,
}

impl DitString {
    pub fn new(digits: Vec<u8>, q: u8) -> Result<Self> {
        if q < 2 {
            return Err(AqecError::Domain(format!("local dimension {q} must be >= 2")));
        }
        if digits.is_empty() {
            return Err(AqecError::Domain("digit string must be non-empty".into()));
        }
        if let Some(&d) = digits.iter().find(|&&d| d >= q) {
            return Err(AqecError::Domain(format!("digit {d} out of range for q = {q}")));
        }
        Ok(Self { digits, q })
    }

    pub fn zeros(n: usize, q: u8) -> Result<Self> {
        Self::new(vec![0; n], q)
    }

    /// Decodes a basis index with site 1 most significant.
    pub fn from_index(index: usize, n: usize, q: u8) -> Result<Self> {
        if q < 2 || n == 0 {
            return Err(AqecError::Domain("need q >= 2 and n >= 1".into()));
        }
        let qn = (q as usize)
            .checked_pow(n as u32)
            .ok_or_else(|| AqecError::Domain("q^n overflows".into()))?;
        if index >= qn {
            return Err(AqecError::Domain(format!("index {index} out of range for q^{n}")));
        }
        let mut digits = vec![0u8; n];
        let mut rem = index;
        for i in (0..n).rev() {
            digits[i] = (rem % q as usize) as u8;
            rem /= q as usize;
        }
        Ok(Self { digits, q })
    }

    /// Basis index with site 1 most significant.
    pub fn index(&self) -> usize {
        self.digits
            .iter()
            .fold(0usize, |acc, &d| acc * self.q as usize + d as usize)
    }

    pub fn n(&self) -> usize {
        self.digits.len()
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    /// Digit at 0-based site position (site 1 is position 0).
    pub fn digit(&self, pos: usize) -> u8 {
        self.digits[pos]
    }

    /// Generalized weight ||u||: the sum of all digits.
    pub fn weight(&self) -> usize {
        self.digits.iter().map(|&d| d as usize).sum()
    }

    /// Number of sites carrying a nonzero digit.
    pub fn jump_count(&self) -> usize {
        self.digits.iter().filter(|&&d| d != 0).count()
    }

    /// The shifted string u^a with every digit advanced by `a` mod q.
    pub fn shifted(&self, a: u8) -> Self {
        let digits = self
            .digits
            .iter()
            .map(|&d| ((d as u16 + a as u16) % self.q as u16) as u8)
            .collect();
        Self { digits, q: self.q }
    }

    /// Digit-wise complement d -> (q-1) - d; the bit flip for qubits.
    pub fn complement(&self) -> Self {
        let digits = self.digits.iter().map(|&d| self.q - 1 - d).collect();
        Self { digits, q: self.q }
    }

    /// Lowers the digit at `pos` by `l` levels, or None when it would
    /// underflow.
    pub fn lowered(&self, pos: usize, l: u8) -> Option<Self> {
        if pos >= self.digits.len() || self.digits[pos] < l {
            return None;
        }
        let mut digits = self.digits.clone();
        digits[pos] -= l;
        Some(Self { digits, q: self.q })
    }

    /// Concatenates extra digits after the last site.
    pub fn appended(&self, suffix: &[u8]) -> Result<Self> {
        let mut digits = self.digits.clone();
        digits.extend_from_slice(suffix);
        Self::new(digits, self.q)
    }

    pub fn parse(s: &str, q: u8) -> Result<Self> {
        if q > 10 {
            return Err(AqecError::Domain("digit parsing supports q <= 10".into()));
        }
        let digits = s
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| AqecError::Domain(format!("bad digit character {c:?}")))
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(digits, q)
    }

    /// All q^n strings in index order.
    pub fn all(n: usize, q: u8) -> Result<Vec<Self>> {
        let qn = (q as usize)
            .checked_pow(n as u32)
            .ok_or_else(|| AqecError::Domain("q^n overflows".into()))?;
        (0..qn).map(|i| Self::from_index(i, n, q)).collect()
    }
}

impl fmt::Display for DitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}
