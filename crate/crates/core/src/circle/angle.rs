//! Angles on the circle T = R/Z.
//!
//! An [`Angle`] is either an exact reduced rational in `[0, 1)` or a streamed
//! binary expansion driven by a deterministic bit rule. Streamed angles stay
//! exact under the operations the combinatorial layer needs (doubling, halving,
//! adding 1/2) because those act on the bit stream by shifts and prefix edits;
//! everything metric goes through dyadic enclosures of configurable width.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;
use std::sync::{Arc as Shared, Mutex};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};

use super::CircleError;

/// Default number of bits used when an enclosure width is not specified.
pub const DEFAULT_PRECISION_BITS: u32 = 64;
/// Hard cap for adaptive bit-stream comparisons; beyond this the verdict is
/// reported as undecided instead of silently resolved.
pub const COMPARISON_BIT_CAP: u32 = 4096;

/// Named generating rule for a streamed binary expansion.
///
/// Bit indices are 1-based: the represented value is `sum b(i) 2^-i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BitRule {
    /// Repeats `word` forever.
    Periodic(Vec<bool>),
    /// Emits `pre`, then repeats `word` forever.
    Preperiodic { pre: Vec<bool>, word: Vec<bool> },
    /// 1 exactly at the triangular positions k(k+1)/2, k >= 1.
    Triangular,
    /// Emits `prefix`, then the constant `fallback` bit forever.
    Explicit { prefix: Vec<bool>, fallback: bool },
}

impl BitRule {
    fn validate(&self) -> Result<(), CircleError> {
        match self {
            BitRule::Periodic(word) | BitRule::Preperiodic { word, .. } if word.is_empty() => {
                Err(CircleError::EmptyWord)
            }
            _ => Ok(()),
        }
    }

    fn raw_bit(&self, i: u64) -> bool {
        debug_assert!(i >= 1);
        match self {
            BitRule::Periodic(word) => word[((i - 1) % word.len() as u64) as usize],
            BitRule::Preperiodic { pre, word } => {
                if i <= pre.len() as u64 {
                    pre[(i - 1) as usize]
                } else {
                    word[((i - 1 - pre.len() as u64) % word.len() as u64) as usize]
                }
            }
            BitRule::Triangular => {
                let x = 8 * i + 1;
                let r = x.isqrt();
                r * r == x
            }
            BitRule::Explicit { prefix, fallback } => {
                if i <= prefix.len() as u64 {
                    prefix[(i - 1) as usize]
                } else {
                    *fallback
                }
            }
        }
    }

    /// Exact rational value of the full stream, when the rule admits one.
    fn exact_value(&self) -> Option<BigRational> {
        fn word_int(word: &[bool]) -> BigInt {
            let mut v = BigInt::zero();
            for &b in word {
                v = &v * 2 + BigInt::from(b as u8);
            }
            v
        }
        let pow2 = |k: usize| BigInt::from(2u8).pow(k as u32);
        match self {
            BitRule::Periodic(word) => Some(BigRational::new(
                word_int(word),
                pow2(word.len()) - BigInt::one(),
            )),
            BitRule::Preperiodic { pre, word } => {
                let rep = BigRational::new(word_int(word), pow2(word.len()) - BigInt::one());
                let head = BigRational::new(word_int(pre), pow2(pre.len()));
                Some(head + rep / BigRational::from(pow2(pre.len())))
            }
            BitRule::Triangular => None,
            BitRule::Explicit { prefix, fallback } => {
                let head = BigRational::new(word_int(prefix), pow2(prefix.len()));
                if *fallback {
                    Some(head + BigRational::new(BigInt::one(), pow2(prefix.len())))
                } else {
                    Some(head)
                }
            }
        }
    }
}

/// Shared, memoized bit source for one rule instance.
#[derive(Debug)]
pub struct BitOracle {
    rule: BitRule,
    cache: Mutex<Vec<bool>>,
}

impl BitOracle {
    fn new(rule: BitRule) -> Self {
        BitOracle {
            rule,
            cache: Mutex::new(Vec::new()),
        }
    }

    /// 1-based bit lookup, extending the memoized prefix as needed.
    fn bit(&self, i: u64) -> bool {
        let mut cache = self.cache.lock().expect("bit cache poisoned");
        while (cache.len() as u64) < i {
            let next = cache.len() as u64 + 1;
            let b = self.rule.raw_bit(next);
            cache.push(b);
        }
        cache[(i - 1) as usize]
    }

    /// Length of the currently cached prefix.
    pub fn cached_len(&self) -> usize {
        self.cache.lock().expect("bit cache poisoned").len()
    }
}

/// A streamed angle: `lead` bits, then the root stream starting `offset` bits in.
#[derive(Clone, Debug)]
pub struct StreamedAngle {
    root: Shared<BitOracle>,
    lead: VecDeque<bool>,
    offset: u64,
}

impl StreamedAngle {
    fn new(root: Shared<BitOracle>, lead: VecDeque<bool>, offset: u64) -> Self {
        let mut s = StreamedAngle { root, lead, offset };
        s.normalize();
        s
    }

    // Fold lead bits that coincide with the root stream back into the offset,
    // so that streams built by different op sequences compare structurally.
    fn normalize(&mut self) {
        while self.offset >= 1 {
            match self.lead.back() {
                Some(&b) if b == self.root.bit(self.offset) => {
                    self.lead.pop_back();
                    self.offset -= 1;
                }
                _ => break,
            }
        }
    }

    /// 1-based bit of the represented expansion.
    pub fn bit(&self, i: u64) -> bool {
        if i <= self.lead.len() as u64 {
            self.lead[(i - 1) as usize]
        } else {
            self.root.bit(self.offset + (i - self.lead.len() as u64))
        }
    }

    pub fn rule(&self) -> &BitRule {
        &self.root.rule
    }

    fn same_stream(&self, other: &StreamedAngle) -> bool {
        self.root.rule == other.root.rule && self.offset == other.offset && self.lead == other.lead
    }

    fn exact(&self) -> Option<BigRational> {
        let root_value = self.root.rule.exact_value()?;
        // Value of the root stream shifted by `offset` bits.
        let shifted = frac(root_value * pow2_rational(self.offset as i64));
        let mut head = BigRational::zero();
        for (k, &b) in self.lead.iter().enumerate() {
            if b {
                head += pow2_rational(-(k as i64 + 1));
            }
        }
        Some(frac(
            head + shifted * pow2_rational(-(self.lead.len() as i64)),
        ))
    }
}

/// A point of the circle T = R/Z.
#[derive(Clone, Debug)]
pub enum Angle {
    /// Reduced rational in `[0, 1)`.
    Rational(BigRational),
    /// Deterministic bit stream; value `sum b(i) 2^-i`.
    Streamed(StreamedAngle),
}

/// A certified enclosure `[lo, hi]` of a real quantity.
#[derive(Clone, Debug, PartialEq)]
pub struct Enclosure {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Enclosure {
    pub fn point(v: BigRational) -> Self {
        Enclosure { lo: v.clone(), hi: v }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

pub(crate) fn pow2_rational(k: i64) -> BigRational {
    if k >= 0 {
        BigRational::from(BigInt::from(2u8).pow(k as u32))
    } else {
        BigRational::new(BigInt::one(), BigInt::from(2u8).pow((-k) as u32))
    }
}

/// Fractional part in `[0, 1)`.
pub(crate) fn frac(x: BigRational) -> BigRational {
    let f = &x - x.floor();
    f
}

impl Angle {
    /// Exact rational angle `p/q`, reduced mod 1.
    pub fn rational(p: i64, q: i64) -> Result<Self, CircleError> {
        if q == 0 {
            return Err(CircleError::ZeroDenominator);
        }
        Ok(Angle::from_big_rational(BigRational::new(
            BigInt::from(p),
            BigInt::from(q),
        )))
    }

    /// Normalizes an arbitrary rational into `[0, 1)`.
    pub fn from_big_rational(r: BigRational) -> Self {
        Angle::Rational(frac(r))
    }

    pub fn zero() -> Self {
        Angle::Rational(BigRational::zero())
    }

    /// Builds a streamed angle from a bit rule.
    pub fn from_rule(rule: BitRule) -> Result<Self, CircleError> {
        rule.validate()?;
        Ok(Angle::Streamed(StreamedAngle::new(
            Shared::new(BitOracle::new(rule)),
            VecDeque::new(),
            0,
        )))
    }

    /// The certified non-recurrent example: ones exactly at positions k(k+1)/2.
    pub fn triangular() -> Self {
        Angle::from_rule(BitRule::Triangular).expect("triangular rule is always valid")
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Angle::Rational(_))
    }

    /// Exact value when one is computable (always for rationals; for streams
    /// whose rule has an eventually periodic or constant tail).
    pub fn exact(&self) -> Option<BigRational> {
        match self {
            Angle::Rational(r) => Some(r.clone()),
            Angle::Streamed(s) => s.exact(),
        }
    }

    /// 1-based digit of the binary expansion. Dyadic rationals use the
    /// terminating expansion (the one not ending in all 1s).
    pub fn bit(&self, i: u64) -> bool {
        match self {
            Angle::Rational(r) => {
                // floor(2^i x) mod 2 for x in [0,1)
                let num = r.numer() << i;
                let q = num / r.denom();
                (q % 2) == BigInt::one()
            }
            Angle::Streamed(s) => s.bit(i),
        }
    }

    /// First `n` binary digits. For streamed angles this extends and caches
    /// the oracle prefix.
    pub fn bits(&self, n: usize) -> Vec<bool> {
        match self {
            Angle::Rational(r) => {
                let mut out = Vec::with_capacity(n);
                let mut rem = r.numer().clone();
                let den = r.denom();
                for _ in 0..n {
                    rem <<= 1;
                    if &rem >= den {
                        rem -= den;
                        out.push(true);
                    } else {
                        out.push(false);
                    }
                }
                out
            }
            Angle::Streamed(s) => (1..=n as u64).map(|i| s.bit(i)).collect(),
        }
    }

    /// Binary digits rendered as a 0/1 string.
    pub fn bits_string(&self, n: usize) -> String {
        self.bits(n)
            .into_iter()
            .map(|b| if b { '1' } else { '0' })
            .collect()
    }

    /// The doubling map `t -> 2t mod 1`.
    pub fn double(&self) -> Angle {
        match self {
            Angle::Rational(r) => Angle::from_big_rational(r * BigRational::from(BigInt::from(2u8))),
            Angle::Streamed(s) => {
                let mut s = s.clone();
                if s.lead.pop_front().is_none() {
                    s.offset += 1;
                }
                Angle::Streamed(StreamedAngle::new(s.root, s.lead, s.offset))
            }
        }
    }

    /// `n`-fold doubling.
    pub fn double_n(&self, n: usize) -> Angle {
        match self {
            Angle::Rational(r) => {
                Angle::from_big_rational(r * BigRational::from(BigInt::from(2u8).pow(n as u32)))
            }
            Angle::Streamed(s) => {
                let mut s = s.clone();
                let mut n = n as u64;
                while n > 0 && s.lead.pop_front().is_some() {
                    n -= 1;
                }
                s.offset += n;
                Angle::Streamed(StreamedAngle::new(s.root, s.lead, s.offset))
            }
        }
    }

    /// `t/2`: prepends a 0 bit.
    pub fn half_down(&self) -> Angle {
        match self {
            Angle::Rational(r) => Angle::Rational(r / BigRational::from(BigInt::from(2u8))),
            Angle::Streamed(s) => {
                let mut s = s.clone();
                s.lead.push_front(false);
                Angle::Streamed(StreamedAngle::new(s.root, s.lead, s.offset))
            }
        }
    }

    /// `(t+1)/2`: prepends a 1 bit.
    pub fn half_up(&self) -> Angle {
        match self {
            Angle::Rational(r) => Angle::Rational(
                (r + BigRational::from(BigInt::one())) / BigRational::from(BigInt::from(2u8)),
            ),
            Angle::Streamed(s) => {
                let mut s = s.clone();
                s.lead.push_front(true);
                Angle::Streamed(StreamedAngle::new(s.root, s.lead, s.offset))
            }
        }
    }

    /// Both preimages under doubling, as the pair `(t/2, (t+1)/2)`.
    pub fn halves(&self) -> (Angle, Angle) {
        (self.half_down(), self.half_up())
    }

    /// `t + 1/2 mod 1`: flips the leading bit.
    pub fn add_half(&self) -> Angle {
        match self {
            Angle::Rational(r) => Angle::from_big_rational(
                r + BigRational::new(BigInt::one(), BigInt::from(2u8)),
            ),
            Angle::Streamed(s) => {
                let mut s = s.clone();
                if s.lead.is_empty() {
                    let first = s.root.bit(s.offset + 1);
                    s.lead.push_front(!first);
                    s.offset += 1;
                } else {
                    let b = s.lead[0];
                    s.lead[0] = !b;
                }
                Angle::Streamed(StreamedAngle::new(s.root, s.lead, s.offset))
            }
        }
    }

    /// Certified enclosure of the value, width `<= 2^-bits` (width 0 when an
    /// exact value is available).
    pub fn enclosure(&self, bits: u32) -> Enclosure {
        if let Some(v) = self.exact() {
            return Enclosure::point(v);
        }
        let prefix = self.bits(bits as usize);
        let mut num = BigInt::zero();
        for &b in &prefix {
            num = &num * 2 + BigInt::from(b as u8);
        }
        let lo = BigRational::new(num, BigInt::from(2u8).pow(bits));
        let hi = &lo + pow2_rational(-(bits as i64));
        Enclosure { lo, hi }
    }

    /// Compares values in `[0, 1)`, walking bit prefixes up to `max_bits` when
    /// no exact comparison is available. `None` means the angles agree to the
    /// cap and the order is undecided.
    pub fn try_cmp(&self, other: &Angle, max_bits: u32) -> Option<Ordering> {
        if let (Some(x), Some(y)) = (self.exact(), other.exact()) {
            return Some(x.cmp(&y));
        }
        if let (Angle::Streamed(a), Angle::Streamed(b)) = (self, other) {
            if a.same_stream(b) {
                return Some(Ordering::Equal);
            }
        }
        // Both expansions here are canonical (no all-ones tail), so
        // lexicographic bit order equals value order.
        for i in 1..=max_bits as u64 {
            let (x, y) = (self.bit(i), other.bit(i));
            if x != y {
                return Some(if x { Ordering::Greater } else { Ordering::Less });
            }
        }
        None
    }

    /// Enclosure of the counterclockwise offset `(self -> to) mod 1`.
    ///
    /// `lo` lies in `[0, 1)`; `hi = lo + width` may exceed 1, which means the
    /// offset enclosure wraps through 0 (the angles may coincide).
    pub fn ccw_offset(&self, to: &Angle, bits: u32) -> Enclosure {
        let ea = self.enclosure(bits);
        let eb = to.enclosure(bits);
        let raw_lo = &eb.lo - &ea.hi;
        let raw_hi = &eb.hi - &ea.lo;
        if raw_lo >= BigRational::zero() {
            Enclosure { lo: raw_lo, hi: raw_hi }
        } else {
            Enclosure {
                lo: raw_lo + BigRational::one(),
                hi: raw_hi + BigRational::one(),
            }
        }
    }

    /// Circle distance `min(|s-t|, 1-|s-t|)` as a certified enclosure of
    /// width `<= 2^-precision` (exact, width 0, when both angles are exact).
    pub fn dist(&self, other: &Angle, precision: u32) -> Enclosure {
        // One extra bit per inexact operand keeps the total width in contract.
        let bits = precision + 2;
        let off = self.ccw_offset(other, bits);
        circle_norm_range(&off)
    }

    /// Approximate value as f64 (first 64 bits, or the exact value rounded).
    pub fn to_f64(&self) -> f64 {
        if let Some(v) = self.exact() {
            return v.to_f64().unwrap_or(0.0);
        }
        let mut acc = 0.0f64;
        let mut scale = 0.5f64;
        for i in 1..=64u64 {
            if self.bit(i) {
                acc += scale;
            }
            scale *= 0.5;
        }
        acc
    }

    /// Fractional part of `2^n * self` as f64, reading bits `n+1..n+64`.
    /// Returns the value and the highest bit index consumed.
    pub fn shifted_to_f64(&self, n: u64) -> (f64, u64) {
        let mut acc = 0.0f64;
        let mut scale = 0.5f64;
        for i in 1..=64u64 {
            if self.bit(n + i) {
                acc += scale;
            }
            scale *= 0.5;
        }
        (acc, n + 64)
    }
}

/// Range of the circle norm `||x|| = min(x mod 1, 1 - x mod 1)` over an offset
/// enclosure produced by [`Angle::ccw_offset`].
pub(crate) fn circle_norm_range(off: &Enclosure) -> Enclosure {
    let half = BigRational::new(BigInt::one(), BigInt::from(2u8));
    let one = BigRational::one();
    let norm = |x: &BigRational| -> BigRational {
        let f = frac(x.clone());
        if f <= half {
            f
        } else {
            &one - &f
        }
    };
    let mut lo = norm(&off.lo).min(norm(&off.hi));
    let mut hi = norm(&off.lo).max(norm(&off.hi));
    // Interior critical points: integers (norm 0), half-integers (norm 1/2).
    let contains_integer = off.lo.ceil() <= off.hi.floor();
    if contains_integer {
        lo = BigRational::zero();
    }
    let shifted_lo = &off.lo - &half;
    let shifted_hi = &off.hi - &half;
    if shifted_lo.ceil() <= shifted_hi.floor() {
        hi = half.clone();
    }
    Enclosure { lo, hi }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Angle::Streamed(s) => {
                write!(f, "stream[{}…]", {
                    let prefix: String = (1..=16u64)
                        .map(|i| if s.bit(i) { '1' } else { '0' })
                        .collect();
                    prefix
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Signed;

    fn bits_str(v: &[bool]) -> String {
        v.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    #[test]
    fn bits_of_one_third() {
        let t = Angle::rational(1, 3).unwrap();
        assert_eq!(bits_str(&t.bits(4)), "0101");
    }

    #[test]
    fn bits_of_one_half_terminate() {
        let t = Angle::rational(1, 2).unwrap();
        assert_eq!(bits_str(&t.bits(3)), "100");
    }

    #[test]
    fn triangular_prefix() {
        let t = Angle::triangular();
        assert_eq!(bits_str(&t.bits(10)), "1010010001");
    }

    #[test]
    fn doubling_on_rationals() {
        let t = Angle::rational(1, 3).unwrap();
        let d = t.double();
        assert_eq!(d.exact().unwrap(), BigRational::new(2.into(), 3.into()));
        assert_eq!(
            d.double().exact().unwrap(),
            BigRational::new(1.into(), 3.into())
        );
    }

    #[test]
    fn doubling_shifts_stream() {
        let t = Angle::triangular();
        let d = t.double();
        assert_eq!(bits_str(&d.bits(9)), "010010001");
    }

    #[test]
    fn halves_of_zero() {
        let z = Angle::zero();
        let (a, b) = z.halves();
        assert_eq!(a.exact().unwrap(), BigRational::zero());
        assert_eq!(b.exact().unwrap(), BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn halves_of_one_third() {
        let t = Angle::rational(1, 3).unwrap();
        let (a, b) = t.halves();
        assert_eq!(a.exact().unwrap(), BigRational::new(1.into(), 6.into()));
        assert_eq!(b.exact().unwrap(), BigRational::new(2.into(), 3.into()));
    }

    #[test]
    fn halves_prepend_bits_on_streams() {
        let t = Angle::triangular();
        let (a, b) = t.halves();
        assert_eq!(bits_str(&a.bits(11)), "01010010001");
        assert_eq!(bits_str(&b.bits(11)), "11010010001");
    }

    #[test]
    fn double_after_half_is_identity() {
        let t = Angle::triangular();
        for h in [t.half_down(), t.half_up()] {
            assert_eq!(
                h.double().try_cmp(&t, 64),
                Some(Ordering::Equal),
                "preimage does not map back"
            );
        }
        let r = Angle::rational(5, 7).unwrap();
        for h in [r.half_down(), r.half_up()] {
            assert_eq!(h.double().exact(), r.exact());
        }
    }

    #[test]
    fn add_half_flips_leading_bit() {
        let t = Angle::triangular();
        let u = t.add_half();
        assert_eq!(bits_str(&u.bits(10)), "0010010001");
        let back = u.add_half();
        assert_eq!(back.try_cmp(&t, 64), Some(Ordering::Equal));
    }

    #[test]
    fn dist_wraparound() {
        let a = Angle::rational(1, 10).unwrap();
        let b = Angle::rational(9, 10).unwrap();
        let d = a.dist(&b, 16);
        assert!(d.is_point());
        assert_eq!(d.lo, BigRational::new(1.into(), 5.into()));
    }

    #[test]
    fn dist_antipodal() {
        let a = Angle::rational(1, 4).unwrap();
        let b = Angle::rational(3, 4).unwrap();
        let d = a.dist(&b, 16);
        assert_eq!(d.lo, BigRational::new(1.into(), 2.into()));
        assert_eq!(d.hi, d.lo);
    }

    #[test]
    fn dist_streamed_enclosure() {
        let t = Angle::triangular();
        let d = t.dist(&t.double(), 5);
        // The enclosure must sit inside [5/32, 3/8] and honor the width bound.
        assert!(d.lo >= BigRational::new(5.into(), 32.into()), "lo = {}", d.lo);
        assert!(d.hi <= BigRational::new(3.into(), 8.into()), "hi = {}", d.hi);
        assert!(d.width() <= pow2_rational(-5));
    }

    #[test]
    fn dist_symmetry_and_bound() {
        let pairs = [
            (Angle::rational(2, 7).unwrap(), Angle::rational(5, 9).unwrap()),
            (Angle::rational(0, 1).unwrap(), Angle::rational(63, 64).unwrap()),
        ];
        for (a, b) in pairs {
            let d1 = a.dist(&b, 32);
            let d2 = b.dist(&a, 32);
            assert_eq!(d1, d2);
            assert!(d1.hi <= BigRational::new(1.into(), 2.into()));
        }
    }

    #[test]
    fn comparison_of_streams() {
        let t = Angle::triangular();
        let half = Angle::rational(1, 2).unwrap();
        assert_eq!(t.try_cmp(&half, 64), Some(Ordering::Greater));
        assert_eq!(t.try_cmp(&t.double(), 64), Some(Ordering::Greater));
        assert_eq!(t.try_cmp(&t.clone(), 64), Some(Ordering::Equal));
    }

    #[test]
    fn periodic_rule_has_exact_value() {
        // 0.(01) repeating = 1/3
        let a = Angle::from_rule(BitRule::Periodic(vec![false, true])).unwrap();
        assert_eq!(a.exact().unwrap(), BigRational::new(1.into(), 3.into()));
        // preperiodic 1 then (01): 1/2 + 1/2 * 1/3 = 2/3
        let b = Angle::from_rule(BitRule::Preperiodic {
            pre: vec![true],
            word: vec![false, true],
        })
        .unwrap();
        assert_eq!(b.exact().unwrap(), BigRational::new(2.into(), 3.into()));
    }

    #[test]
    fn explicit_all_ones_tail_is_exact_dyadic() {
        let a = Angle::from_rule(BitRule::Explicit {
            prefix: vec![true, false],
            fallback: true,
        })
        .unwrap();
        // 0.10111... = 0.11 = 3/4
        assert_eq!(a.exact().unwrap(), BigRational::new(3.into(), 4.into()));
    }

    #[test]
    fn empty_periodic_word_rejected() {
        assert!(matches!(
            Angle::from_rule(BitRule::Periodic(vec![])),
            Err(CircleError::EmptyWord)
        ));
    }

    #[test]
    fn rational_bits_reconstruct_value() {
        for (p, q) in [(1i64, 3i64), (5, 7), (13, 64), (3, 10), (99, 101)] {
            let a = Angle::rational(p, q).unwrap();
            for n in [4usize, 16, 40] {
                let bits = a.bits(n);
                let mut v = BigRational::zero();
                for (i, &b) in bits.iter().enumerate() {
                    if b {
                        v += pow2_rational(-(i as i64 + 1));
                    }
                }
                let err = (a.exact().unwrap() - v).abs();
                assert!(err < pow2_rational(-(n as i64)));
            }
        }
    }
}
