//! Dyadic intervals `[i/2^k, (i+1)/2^k]` used as cluster approximations.

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::One;

use super::angle::Angle;

/// The closed interval `[index/2^depth, (index+1)/2^depth]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicInterval {
    pub depth: u32,
    pub index: BigUint,
}

impl DyadicInterval {
    pub fn new(depth: u32, index: BigUint) -> Self {
        debug_assert!(index.bits() <= depth as u64 + 1);
        DyadicInterval { depth, index }
    }

    /// The depth-`k` interval containing the angle.
    pub fn containing(angle: &Angle, depth: u32) -> Self {
        let mut index = BigUint::ZERO;
        for b in angle.bits(depth as usize) {
            index = &index * 2u8 + BigUint::from(b as u8);
        }
        DyadicInterval { depth, index }
    }

    pub fn lo(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.index.clone()),
            BigInt::from(2u8).pow(self.depth),
        )
    }

    pub fn hi(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.index.clone()) + BigInt::one(),
            BigInt::from(2u8).pow(self.depth),
        )
    }

    pub fn midpoint(&self) -> BigRational {
        (self.lo() + self.hi()) / BigRational::from(BigInt::from(2u8))
    }

    /// Image under the doubling map: one dyadic interval of depth `k - 1`.
    pub fn double(&self) -> Option<DyadicInterval> {
        if self.depth == 0 {
            return None;
        }
        let modulus = BigUint::from(1u8) << (self.depth - 1);
        Some(DyadicInterval {
            depth: self.depth - 1,
            index: &self.index % modulus,
        })
    }

    pub fn contains_value(&self, v: &BigRational) -> bool {
        *v >= self.lo() && *v <= self.hi()
    }

    /// Binary prefix string `b1 b2 .. b_depth` identifying the interval.
    pub fn prefix_string(&self) -> String {
        let raw = self.index.to_str_radix(2);
        let pad = self.depth as usize - raw.len().min(self.depth as usize);
        let mut s = String::with_capacity(self.depth as usize);
        for _ in 0..pad {
            s.push('0');
        }
        s.push_str(&raw);
        s
    }
}
