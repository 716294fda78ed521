use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::surd::Surd;
use super::Ratio;
use crate::error::{PolyscarError, Result};

/// Irrational (or decimal) targets accepted by the continued-fraction routines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constant {
    Sqrt2,
    Sqrt3,
    InvSqrt2,
    /// A decimal literal, kept exactly.
    Decimal(Ratio),
}

impl Constant {
    pub fn tag(&self) -> String {
        match self {
            Constant::Sqrt2 => "sqrt2".into(),
            Constant::Sqrt3 => "sqrt3".into(),
            Constant::InvSqrt2 => "1/sqrt2".into(),
            Constant::Decimal(r) => r.to_string(),
        }
    }

    /// The exact value when it lives in a quadratic field.
    pub fn as_surd(&self) -> Surd {
        match self {
            Constant::Sqrt2 => Surd::sqrt(2),
            Constant::Sqrt3 => Surd::sqrt(3),
            Constant::InvSqrt2 => Surd::sqrt(2).scale(&Ratio::new(1, 2)),
            Constant::Decimal(r) => Surd::rational(r.clone()),
        }
    }

    /// High-precision rational stand-in for the value.
    pub fn reference(&self) -> BigRational {
        self.as_surd().approx_rational()
    }

    /// The first `digits` decimals of the value, truncated.
    pub fn decimal_expansion(&self, digits: usize) -> String {
        let v = self.reference();
        let neg = v.is_negative();
        let v = v.abs();
        let int = v.floor().to_integer();
        let frac = v - BigRational::from_integer(int.clone());
        let scaled = (frac * BigRational::from_integer(num_traits::pow(BigInt::from(10), digits))).floor().to_integer();
        let sign = if neg { "-" } else { "" };
        format!("{sign}{int}.{:0>width$}", scaled.to_string(), width = digits)
    }

    /// (P, D, Q) with value (P + √D)/Q and Q | D − P², or None for rationals.
    fn quadratic(&self) -> Option<(BigInt, BigInt, BigInt)> {
        match self {
            Constant::Sqrt2 => Some((0.into(), 2.into(), 1.into())),
            Constant::Sqrt3 => Some((0.into(), 3.into(), 1.into())),
            Constant::InvSqrt2 => Some((0.into(), 2.into(), 2.into())),
            Constant::Decimal(_) => None,
        }
    }
}

impl FromStr for Constant {
    type Err = PolyscarError;

    fn from_str(s: &str) -> Result<Constant> {
        match s.trim() {
            "sqrt2" | "√2" => Ok(Constant::Sqrt2),
            "sqrt3" | "√3" => Ok(Constant::Sqrt3),
            "1/sqrt2" | "1/√2" => Ok(Constant::InvSqrt2),
            other => Ratio::from_decimal(other)
                .map(Constant::Decimal)
                .map_err(|_| PolyscarError::Config(format!("unsupported constant '{other}'"))),
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

/// Partial quotients of a constant, produced lazily.
struct PartialQuotients {
    state: State,
}

enum State {
    Quadratic { p: BigInt, d: BigInt, q: BigInt, root: BigInt },
    Rational { num: BigInt, den: BigInt },
    Done,
}

impl PartialQuotients {
    fn new(c: &Constant) -> PartialQuotients {
        let state = match c.quadratic() {
            Some((p, d, q)) => {
                let root = d.sqrt();
                State::Quadratic { p, d, q, root }
            }
            None => match c {
                Constant::Decimal(r) => State::Rational { num: r.numer().clone(), den: r.denom().clone() },
                _ => unreachable!(),
            },
        };
        PartialQuotients { state }
    }
}

impl Iterator for PartialQuotients {
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        match &mut self.state {
            State::Quadratic { p, d, q, root } => {
                let num = &*p + &*root;
                let a = if q.is_positive() {
                    num.div_floor(q)
                } else {
                    -(num.div_floor(&(-&*q))) - 1
                };
                let p_next = &a * &*q - &*p;
                let q_next = (&*d - &p_next * &p_next) / &*q;
                *p = p_next;
                *q = q_next;
                Some(a)
            }
            State::Rational { num, den } => {
                let (a, r) = num.div_mod_floor(den);
                if r.is_zero() {
                    self.state = State::Done;
                } else {
                    let old_den = den.clone();
                    *num = old_den;
                    *den = r;
                }
                Some(a)
            }
            State::Done => None,
        }
    }
}

/// Continued-fraction convergents of a constant with their absolute errors.
#[derive(Clone, Debug)]
pub struct CfApprox {
    pub target: Constant,
    /// 50-digit decimal expansion of the target, for reporting.
    pub digits: String,
    pub convergents: Vec<Ratio>,
    /// |target − u/q| for each convergent, as high-precision rationals.
    pub epsilons: Vec<Ratio>,
}

impl CfApprox {
    pub fn last(&self) -> &Ratio {
        self.convergents.last().expect("at least one convergent")
    }

    pub fn epsilon_f64(&self, k: usize) -> f64 {
        self.epsilons[k].to_f64()
    }
}

struct ConvergentIter {
    quotients: PartialQuotients,
    h: (BigInt, BigInt),
    k: (BigInt, BigInt),
}

impl ConvergentIter {
    fn new(c: &Constant) -> ConvergentIter {
        ConvergentIter {
            quotients: PartialQuotients::new(c),
            h: (BigInt::one(), BigInt::zero()),
            k: (BigInt::zero(), BigInt::one()),
        }
    }
}

impl Iterator for ConvergentIter {
    type Item = Ratio;

    fn next(&mut self) -> Option<Ratio> {
        let a = self.quotients.next()?;
        let h = &a * &self.h.0 + &self.h.1;
        let k = &a * &self.k.0 + &self.k.1;
        self.h = (h.clone(), std::mem::take(&mut self.h.0));
        self.k = (k.clone(), std::mem::take(&mut self.k.0));
        Some(Ratio::from_big(h, k))
    }
}

fn error_of(target: &BigRational, r: &Ratio) -> Ratio {
    Ratio::from_bigrational((target - r.as_big()).abs())
}

/// First `count` convergents of `target`. Rational targets may yield fewer.
pub fn convergents(target: &Constant, count: usize) -> Result<CfApprox> {
    if count == 0 {
        return Err(PolyscarError::Domain("convergent count must be at least 1".into()));
    }
    let reference = target.reference();
    let convergents: Vec<Ratio> = ConvergentIter::new(target).take(count).collect();
    let epsilons = convergents.iter().map(|c| error_of(&reference, c)).collect();
    Ok(CfApprox { target: target.clone(), digits: target.decimal_expansion(50), convergents, epsilons })
}

/// Convenience: parse a tag such as `sqrt2` and expand it.
pub fn convergents_of_tag(tag: &str, count: usize) -> Result<CfApprox> {
    convergents(&tag.parse()?, count)
}

/// An angle measured in units of π.
#[derive(Clone, Debug)]
pub enum AngleInput {
    Rational(Ratio),
    Constant(Constant),
}

/// Smallest-denominator convergent p/q with |angle/π − p/q| < tolerance.
pub fn approximate_angle(angle: &AngleInput, tolerance: f64) -> Result<Ratio> {
    if !(tolerance > 0.0) {
        return Err(PolyscarError::Domain("tolerance must be positive".into()));
    }
    let c = match angle {
        AngleInput::Rational(r) => {
            if !r.is_positive() || r >= &Ratio::one() {
                return Err(PolyscarError::Domain(format!("angle {r}π outside (0, π)")));
            }
            return Ok(r.clone());
        }
        AngleInput::Constant(c) => c,
    };
    let reference = c.reference();
    let one = BigRational::one();
    if reference <= BigRational::zero() || reference >= one {
        return Err(PolyscarError::Domain(format!("angle {c}·π outside (0, π)")));
    }
    let tol = BigRational::from_float(tolerance).expect("finite tolerance");
    let mut best = f64::INFINITY;
    for conv in ConvergentIter::new(c) {
        if conv.denom().to_i64().is_none() || conv.numer().to_i64().is_none() {
            return Err(PolyscarError::Resource {
                message: format!("denominator exceeds 64 bits before reaching tolerance {tolerance:e}"),
                best_error: best,
            });
        }
        let err = error_of(&reference, &conv);
        best = best.min(err.to_f64());
        if err.as_big() < &tol {
            return Ok(conv);
        }
    }
    // A rational target whose expansion ended: its last convergent is exact.
    Err(PolyscarError::Resource { message: "expansion ended without meeting tolerance".into(), best_error: best })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt2_convergents_match_known_sequence() {
        let cf = convergents(&Constant::Sqrt2, 10).unwrap();
        let expected = [(1, 1), (3, 2), (7, 5), (17, 12), (41, 29), (99, 70), (239, 169), (577, 408), (1393, 985), (3363, 2378)];
        let got: Vec<Ratio> = expected.iter().map(|&(p, q)| Ratio::new(p, q)).collect();
        assert_eq!(cf.convergents, got);
    }

    #[test]
    fn inverse_sqrt2_starts_at_zero() {
        let cf = convergents(&Constant::InvSqrt2, 4).unwrap();
        assert_eq!(cf.convergents, vec![Ratio::new(0, 1), Ratio::new(1, 1), Ratio::new(2, 3), Ratio::new(5, 7)]);
    }

    #[test]
    fn sqrt3_partial_quotients() {
        let cf = convergents(&Constant::Sqrt3, 5).unwrap();
        assert_eq!(cf.convergents, vec![Ratio::new(1, 1), Ratio::new(2, 1), Ratio::new(5, 3), Ratio::new(7, 4), Ratio::new(19, 11)]);
    }

    #[test]
    fn decimal_target_terminates() {
        let cf = convergents(&"0.375".parse().unwrap(), 10).unwrap();
        assert_eq!(cf.last(), &Ratio::new(3, 8));
        assert!(cf.epsilons.last().unwrap().is_zero());
    }

    #[test]
    fn unsupported_tag_is_config_error() {
        assert!(matches!(convergents_of_tag("pi", 3), Err(PolyscarError::Config(_))));
    }

    #[test]
    fn expansion_has_fifty_digits() {
        let d = Constant::Sqrt2.decimal_expansion(50);
        assert_eq!(d, "1.41421356237309504880168872420969807856967187537694");
    }

    #[test]
    fn approximate_angle_cases() {
        let half = AngleInput::Rational(Ratio::new(1, 2));
        assert_eq!(approximate_angle(&half, 1e-3).unwrap(), Ratio::new(1, 2));
        let inv = AngleInput::Constant(Constant::InvSqrt2);
        let r = approximate_angle(&inv, 1e-7).unwrap();
        assert_eq!(r, Ratio::new(2378, 3363));
        assert!((r.to_f64() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-7);
    }

    #[test]
    fn approximate_angle_reports_overflow() {
        let inv = AngleInput::Constant(Constant::InvSqrt2);
        match approximate_angle(&inv, 1e-45) {
            Err(PolyscarError::Resource { best_error, .. }) => assert!(best_error < 1e-30),
            other => panic!("expected resource error, got {other:?}"),
        }
    }
}
