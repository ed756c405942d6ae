//! The angle-spec mini-language.
//!
//! Grammar:
//! ```text
//! spec  := "rat:" INT [ "/" INT ]        exact rational p/q (reduced mod 1)
//!        | "bits:" 01WORD                finite prefix, trailing zeros
//!        | "rule:triangular"             ones at positions k(k+1)/2
//!        | "rule:periodic:" 01WORD       repeating word
//!        | "rule:preperiodic:" 01WORD ":" 01WORD
//! ```

use super::{Angle, BitRule, CircleError};

fn parse_word(s: &str) -> Result<Vec<bool>, CircleError> {
    if s.is_empty() {
        return Err(CircleError::Parse("empty 0/1 word".into()));
    }
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(CircleError::Parse(format!("bad bit {other:?}"))),
        })
        .collect()
}

/// Parses an angle spec string.
pub fn parse_angle(spec: &str) -> Result<Angle, CircleError> {
    if let Some(rest) = spec.strip_prefix("rat:") {
        let (p, q) = match rest.split_once('/') {
            Some((p, q)) => (p, q),
            None => (rest, "1"),
        };
        let p: i64 = p
            .trim()
            .parse()
            .map_err(|_| CircleError::Parse(format!("bad numerator in {spec:?}")))?;
        let q: i64 = q
            .trim()
            .parse()
            .map_err(|_| CircleError::Parse(format!("bad denominator in {spec:?}")))?;
        return Angle::rational(p, q);
    }
    if let Some(rest) = spec.strip_prefix("bits:") {
        let prefix = parse_word(rest)?;
        return Angle::from_rule(BitRule::Explicit {
            prefix,
            fallback: false,
        });
    }
    if let Some(rest) = spec.strip_prefix("rule:") {
        if rest == "triangular" {
            return Ok(Angle::triangular());
        }
        if let Some(word) = rest.strip_prefix("periodic:") {
            return Angle::from_rule(BitRule::Periodic(parse_word(word)?));
        }
        if let Some(args) = rest.strip_prefix("preperiodic:") {
            let (pre, word) = args
                .split_once(':')
                .ok_or_else(|| CircleError::Parse(format!("expected pre:word in {spec:?}")))?;
            return Angle::from_rule(BitRule::Preperiodic {
                pre: parse_word(pre)?,
                word: parse_word(word)?,
            });
        }
        return Err(CircleError::Parse(format!("unknown rule in {spec:?}")));
    }
    Err(CircleError::Parse(format!(
        "unknown angle spec {spec:?} (expected rat:, bits:, or rule:)"
    )))
}
