use std::fmt;

use crate::error::{Error, Result};

/// An ordered sequence of bits, one bit per byte (values 0 or 1).
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitVector(Vec<u8>);

impl BitVector {
    pub fn new() -> Self {
        BitVector(Vec::new())
    }

    pub fn zeros(len: usize) -> Self {
        BitVector(vec![0; len])
    }

    pub fn with_capacity(cap: usize) -> Self {
        BitVector(Vec::with_capacity(cap))
    }

    /// Builds from any iterator of booleans or 0/1 integers; nonzero is a one.
    pub fn from_bits<I, T>(bits: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<u64>,
    {
        BitVector(bits.into_iter().map(|b| (b.into() != 0) as u8).collect())
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        BitVector(bits.iter().map(|&b| b as u8).collect())
    }

    /// Parses a string of '0'/'1' characters; other characters are skipped.
    pub fn parse(s: &str) -> Self {
        BitVector(
            s.chars()
                .filter_map(|c| match c {
                    '0' => Some(0),
                    '1' => Some(1),
                    _ => None,
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, index: usize) -> Result<bool> {
        self.0.get(index).map(|&b| b == 1).ok_or(Error::OutOfRange {
            index,
            len: self.0.len(),
        })
    }

    pub fn set(&mut self, index: usize, value: bool) -> Result<()> {
        let len = self.0.len();
        let slot = self.0.get_mut(index).ok_or(Error::OutOfRange { index, len })?;
        *slot = value as u8;
        Ok(())
    }

    pub fn flip(&mut self, index: usize) -> Result<()> {
        let len = self.0.len();
        let slot = self.0.get_mut(index).ok_or(Error::OutOfRange { index, len })?;
        *slot ^= 1;
        Ok(())
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit as u8);
    }

    pub fn extend_from(&mut self, other: &BitVector) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn truncate(&mut self, len: usize) {
        self.0.truncate(len);
    }

    /// Raw 0/1 bytes.
    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().map(|&b| b == 1)
    }

    pub fn slice(&self, start: usize, end: usize) -> Result<BitVector> {
        if start > end || end > self.0.len() {
            return Err(Error::OutOfRange {
                index: end,
                len: self.0.len(),
            });
        }
        Ok(BitVector(self.0[start..end].to_vec()))
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    /// Number of positions where `self` and `other` differ, over the shorter length.
    pub fn hamming_distance(&self, other: &BitVector) -> usize {
        self.0.iter().zip(other.0.iter()).filter(|(a, b)| a != b).count()
    }
}

impl From<Vec<u8>> for BitVector {
    fn from(v: Vec<u8>) -> Self {
        BitVector(v.into_iter().map(|b| (b != 0) as u8).collect())
    }
}

impl FromIterator<bool> for BitVector {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        BitVector(iter.into_iter().map(|b| b as u8).collect())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({}: ", self.0.len())?;
        for &b in self.0.iter().take(64) {
            write!(f, "{}", b)?;
        }
        if self.0.len() > 64 {
            write!(f, "...")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{}", b)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_beyond_length_is_an_error() {
        let b = BitVector::parse("101");
        assert!(b.get(2).unwrap());
        assert!(matches!(b.get(3), Err(Error::OutOfRange { index: 3, len: 3 })));
    }

    #[test]
    fn parse_and_display() {
        let b = BitVector::parse("1 0 1 1");
        assert_eq!(b.to_string(), "1011");
        assert_eq!(b.count_ones(), 3);
    }
}
