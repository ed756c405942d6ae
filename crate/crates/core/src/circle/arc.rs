//! Closed counterclockwise arcs on the circle and the arc doubling map σ.

use std::cmp::Ordering;
use std::fmt;

use num::rational::BigRational;
use num::{One, Zero};

use super::angle::{circle_norm_range, Angle, Enclosure, COMPARISON_BIT_CAP};
use super::CircleError;

/// The closed counterclockwise arc from `a` to `b` (`a != b`).
#[derive(Clone, Debug)]
pub struct Arc {
    a: Angle,
    b: Angle,
}

/// Image of an arc under doubling: an arc, or a single angle when the
/// endpoints identify.
#[derive(Clone, Debug)]
pub enum SigmaImage {
    Arc(Arc),
    Point(Angle),
}

/// Verdict of a membership test against a closed arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InArcVerdict {
    Inside,
    Outside,
    Boundary,
    Undecided,
}

impl Arc {
    /// Builds the arc, rejecting degenerate endpoints. Distinctness of two
    /// streamed endpoints is certified up to the comparison bit cap.
    pub fn new(a: Angle, b: Angle) -> Result<Self, CircleError> {
        match a.try_cmp(&b, COMPARISON_BIT_CAP) {
            Some(Ordering::Equal) => Err(CircleError::DegenerateArc),
            Some(_) => Ok(Arc { a, b }),
            None => Err(CircleError::PrecisionExhausted {
                bits: COMPARISON_BIT_CAP,
            }),
        }
    }

    pub fn start(&self) -> &Angle {
        &self.a
    }

    pub fn end(&self) -> &Angle {
        &self.b
    }

    /// Enclosure of the arc length `(b - a) mod 1`, clamped into `(0, 1)`.
    pub fn length_enclosure(&self, bits: u32) -> Enclosure {
        let off = self.a.ccw_offset(&self.b, bits);
        let one = BigRational::one();
        // A wrapping offset enclosure means the endpoints were not separated
        // at this precision; clamp to the trivial bound rather than guess.
        if off.hi >= one {
            Enclosure {
                lo: BigRational::zero(),
                hi: one,
            }
        } else {
            off
        }
    }

    /// Exact length when both endpoints have exact values.
    pub fn length_exact(&self) -> Option<BigRational> {
        let (x, y) = (self.a.exact()?, self.b.exact()?);
        let d = y - x;
        Some(if d > BigRational::zero() {
            d
        } else {
            d + BigRational::one()
        })
    }

    /// The arc doubling map: `σ(a, b) = (2a, 2b)` unless the endpoints
    /// identify (`b = a + 1/2`), in which case the image is the single angle
    /// `2a`. Satisfies `|σ(S)| = 2|S|` if `|S| < 1/2` and `2|S| - 1` otherwise.
    pub fn sigma(&self) -> Result<SigmaImage, CircleError> {
        let antipode = self.a.add_half();
        match antipode.try_cmp(&self.b, COMPARISON_BIT_CAP) {
            Some(Ordering::Equal) => Ok(SigmaImage::Point(self.a.double())),
            Some(_) => Ok(SigmaImage::Arc(Arc {
                a: self.a.double(),
                b: self.b.double(),
            })),
            None => Err(CircleError::PrecisionExhausted {
                bits: COMPARISON_BIT_CAP,
            }),
        }
    }

    /// Membership of `t` in the closed arc. Exact angles give exact verdicts;
    /// streamed comparisons that stay unresolved at `bits` report `Undecided`.
    pub fn contains(&self, t: &Angle, bits: u32) -> InArcVerdict {
        // Exact boundary hits first.
        for end in [&self.a, &self.b] {
            if let Some(Ordering::Equal) = t.try_cmp(end, bits) {
                return InArcVerdict::Boundary;
            }
        }
        // Exact path: compare offsets directly.
        if let (Some(ta), (Some(tt), Some(tb))) =
            (self.a.exact(), (t.exact(), self.b.exact()))
        {
            let one = BigRational::one();
            let u = {
                let d = tt - &ta;
                if d < BigRational::zero() {
                    d + &one
                } else {
                    d
                }
            };
            let len = {
                let d = tb - &ta;
                if d < BigRational::zero() {
                    d + &one
                } else {
                    d
                }
            };
            return match u.cmp(&len) {
                Ordering::Less if u.is_zero() => InArcVerdict::Boundary,
                Ordering::Less => InArcVerdict::Inside,
                Ordering::Equal => InArcVerdict::Boundary,
                Ordering::Greater => InArcVerdict::Outside,
            };
        }
        // Enclosure path.
        let u = self.a.ccw_offset(t, bits);
        let len = self.a.ccw_offset(&self.b, bits);
        let one = BigRational::one();
        if u.hi >= one || len.hi >= one {
            return InArcVerdict::Undecided;
        }
        if u.hi < len.lo && u.lo > BigRational::zero() {
            return InArcVerdict::Inside;
        }
        if u.lo > len.hi {
            return InArcVerdict::Outside;
        }
        InArcVerdict::Undecided
    }

    /// Adaptive membership: retries with doubled precision up to `max_bits`.
    pub fn contains_adaptive(&self, t: &Angle, start_bits: u32, max_bits: u32) -> InArcVerdict {
        let mut bits = start_bits;
        loop {
            let v = self.contains(t, bits);
            if v != InArcVerdict::Undecided || bits >= max_bits {
                return v;
            }
            bits = (bits * 2).min(max_bits);
        }
    }

    /// The two preimage arcs under doubling, each of half the length.
    pub fn preimages(&self) -> Result<(Arc, Arc), CircleError> {
        let ord = self
            .a
            .try_cmp(&self.b, COMPARISON_BIT_CAP)
            .ok_or(CircleError::PrecisionExhausted {
                bits: COMPARISON_BIT_CAP,
            })?;
        // Pair each endpoint's halves so that both arcs have length |S|/2:
        // when b > a the arc does not wrap through 0 and the lower halves pair
        // up; when it wraps they pair crosswise.
        let (first, second) = if ord == Ordering::Less {
            (
                Arc {
                    a: self.a.half_down(),
                    b: self.b.half_down(),
                },
                Arc {
                    a: self.a.half_up(),
                    b: self.b.half_up(),
                },
            )
        } else {
            (
                Arc {
                    a: self.a.half_down(),
                    b: self.b.half_up(),
                },
                Arc {
                    a: self.a.half_up(),
                    b: self.b.half_down(),
                },
            )
        };
        Ok((first, second))
    }

    /// Enclosure of the circle distance from `t` to this arc (0 when inside).
    pub fn distance_to(&self, t: &Angle, bits: u32) -> Enclosure {
        match self.contains(t, bits) {
            InArcVerdict::Inside | InArcVerdict::Boundary => Enclosure {
                lo: BigRational::zero(),
                hi: BigRational::zero(),
            },
            _ => {
                let da = circle_norm_range(&self.a.ccw_offset(t, bits));
                let db = circle_norm_range(&self.b.ccw_offset(t, bits));
                Enclosure {
                    lo: da.lo.min(db.lo),
                    hi: da.hi.min(db.hi),
                }
            }
        }
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}
