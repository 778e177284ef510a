//! Binary digits of quadratic irrationals and their byte packing.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

/// The polynomial `x^2 + linear·x + constant`, read through the fractional
/// part of its positive root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitSource {
    pub linear: i64,
    pub constant: i64,
}

impl BitSource {
    /// `x^2 + x - 1`.
    pub const GOLDEN: BitSource = BitSource {
        linear: 1,
        constant: -1,
    };

    /// `x^2 + 2x - c`.
    pub fn shifted(c: i64) -> Self {
        BitSource {
            linear: 2,
            constant: -c,
        }
    }

    fn discriminant(&self) -> BigInt {
        BigInt::from(self.linear).pow(2) - BigInt::from(self.constant) * 4
    }

    /// The root is real, positive and irrational.
    pub fn is_usable(&self) -> bool {
        let d = self.discriminant();
        if !d.is_positive() {
            return false;
        }
        let r = d.sqrt();
        &r * &r != d && (d > BigInt::from(self.linear).pow(2) || self.linear < 0)
    }

    /// `⌊root · 2^k⌋`. Since `√D·2^k` is irrational the floor of the half
    /// sum only depends on `⌊√D·2^k⌋`.
    fn scaled_floor(&self, k: usize) -> BigInt {
        let d = self.discriminant() << (2 * k);
        let minus_b = BigInt::from(-self.linear) << k;
        (minus_b + d.sqrt()).div_floor(&BigInt::from(2))
    }
}

impl fmt::Display for BitSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lin = match self.linear {
            0 => String::new(),
            1 => "+x".to_string(),
            -1 => "-x".to_string(),
            l if l > 0 => format!("+{l}x"),
            l => format!("{l}x"),
        };
        let c = match self.constant {
            0 => String::new(),
            c if c > 0 => format!("+{c}"),
            c => format!("{c}"),
        };
        write!(f, "x^2{lin}{c}")
    }
}

/// The first `count` binary digits `d_1, d_2, …` of the fractional part of
/// the positive root.
pub fn irrational_bits(source: BitSource, count: usize) -> Vec<u8> {
    assert!(
        source.is_usable(),
        "{source} has no positive irrational root"
    );
    let whole = source.scaled_floor(0);
    let frac = source.scaled_floor(count) - (whole << count);
    let (_, bytes) = frac.to_bytes_be();
    let mut bits = Vec::with_capacity(count);
    // frac < 2^count; emit exactly `count` digits, most significant first
    let total = bytes.len() * 8;
    for i in (0..count).rev() {
        let bit = if i >= total {
            0
        } else {
            let byte = bytes[bytes.len() - 1 - i / 8];
            (byte >> (i % 8)) & 1
        };
        bits.push(bit);
    }
    bits
}

/// `e_i = Σ_{k=1}^{8} 2^{k-1} d_{8i+k}`: low bit first. Trailing bits that do
/// not fill a byte are dropped.
pub fn byte_stream(bits: &[u8]) -> Vec<u8> {
    bits.chunks_exact(8)
        .map(|chunk| chunk.iter().rev().fold(0u8, |acc, &b| (acc << 1) | b))
        .collect()
}

/// The first `count` bytes of `source`.
pub fn source_bytes(source: BitSource, count: usize) -> Vec<u8> {
    byte_stream(&irrational_bits(source, 8 * count))
}

/// Stream sources for the `s` components: `x^2 + x - 1` when `s = 1`, else
/// `x^2 + 2x - c` for the first `s` values of `c ≥ 1` whose root is
/// irrational.
pub fn suite_sources(s: usize) -> Vec<BitSource> {
    if s == 1 {
        return vec![BitSource::GOLDEN];
    }
    (1..)
        .map(BitSource::shifted)
        .filter(BitSource::is_usable)
        .take(s)
        .collect()
}
