//! Bit-string search points.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// A subset of `{0, .., n-1}` stored as a packed bit string, with the number
/// of set bits cached.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Solution {
    words: Vec<u64>,
    len: usize,
    ones: usize,
}

impl Solution {
    pub fn zeros(len: usize) -> Self {
        Solution {
            words: vec![0; len.div_ceil(WORD)],
            len,
            ones: 0,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut x = Solution::zeros(len);
        for i in 0..len {
            x.set(i, true);
        }
        x
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut x = Solution::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            x.set(i, b);
        }
        x
    }

    /// Parses a string of `'0'`/`'1'` characters, item 0 first.
    pub fn from_bit_str(s: &str) -> Option<Self> {
        let bits: Option<Vec<bool>> = s
            .chars()
            .map(|ch| match ch {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect();
        bits.map(|b| Solution::from_bits(&b))
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut x = Solution::zeros(len);
        for i in indices {
            x.set(i, true);
        }
        x
    }

    /// Builds the solution whose item `i` is bit `i` of `mask`.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= WORD);
        let mut x = Solution::zeros(len);
        if len > 0 {
            x.words[0] = mask & (u64::MAX >> (WORD - len));
            x.ones = x.words[0].count_ones() as usize;
        }
        x
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `|x|_1`.
    #[inline]
    pub fn count_ones(&self) -> usize {
        self.ones
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if self.get(i) != value {
            self.flip(i);
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        let word = &mut self.words[i / WORD];
        if *word & mask == 0 {
            self.ones += 1;
        } else {
            self.ones -= 1;
        }
        *word ^= mask;
    }

    /// Indices of set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * WORD + bit)
            })
        })
    }

    pub fn hamming_distance(&self, other: &Solution) -> usize {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Order of the `'0'`/`'1'` strings, item 0 most significant.
    pub fn cmp_lex(&self, other: &Solution) -> Ordering {
        for i in 0..self.len.min(other.len) {
            match (self.get(i), other.get(i)) {
                (false, true) => return Ordering::Less,
                (true, false) => return Ordering::Greater,
                _ => {}
            }
        }
        self.len.cmp(&other.len)
    }

    /// Hex encoding: item `4j` is the high bit of digit `j`; the last digit
    /// is zero-padded.
    pub fn to_hex(&self) -> String {
        const DIGITS: &[u8; 16] = b"0123456789abcdef";
        let mut out = String::with_capacity(self.len.div_ceil(4));
        for chunk in 0..self.len.div_ceil(4) {
            let mut nibble = 0usize;
            for offset in 0..4 {
                let i = chunk * 4 + offset;
                nibble <<= 1;
                if i < self.len && self.get(i) {
                    nibble |= 1;
                }
            }
            out.push(DIGITS[nibble] as char);
        }
        out
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        if hex.len() != len.div_ceil(4) {
            return Err(Error::Dimension {
                expected: len.div_ceil(4),
                actual: hex.len(),
            });
        }
        let mut x = Solution::zeros(len);
        for (chunk, ch) in hex.chars().enumerate() {
            let nibble = ch.to_digit(16).ok_or(Error::Logic("invalid hex digit in bit string"))?;
            for offset in 0..4 {
                if nibble >> (3 - offset) & 1 == 1 {
                    let i = chunk * 4 + offset;
                    if i >= len {
                        return Err(Error::Logic("padding bits set in hex bit string"));
                    }
                    x.set(i, true);
                }
            }
        }
        Ok(x)
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Solution({self})")
    }
}
