use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{PolyscarError, Result};

/// Exact rational number, always normalized (coprime parts, positive denominator).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ratio(BigRational);

impl Ratio {
    /// Panics when `den` is zero; use [`Ratio::try_new`] for untrusted input.
    pub fn new(num: i64, den: i64) -> Ratio {
        Ratio::try_new(num, den).expect("zero denominator")
    }

    pub fn try_new(num: i64, den: i64) -> Result<Ratio> {
        if den == 0 {
            return Err(PolyscarError::Domain(format!("{num}/0 has a zero denominator")));
        }
        Ok(Ratio(BigRational::new(num.into(), den.into())))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Ratio {
        assert!(!den.is_zero(), "zero denominator");
        Ratio(BigRational::new(num, den))
    }

    pub fn integer(n: i64) -> Ratio {
        Ratio(BigRational::from_integer(n.into()))
    }

    pub fn from_bigint(n: BigInt) -> Ratio {
        Ratio(BigRational::from_integer(n))
    }

    pub fn zero() -> Ratio {
        Ratio(BigRational::zero())
    }

    pub fn one() -> Ratio {
        Ratio(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn numer_i64(&self) -> Option<i64> {
        self.0.numer().to_i64()
    }

    pub fn denom_i64(&self) -> Option<i64> {
        self.0.denom().to_i64()
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn into_big(self) -> BigRational {
        self.0
    }

    pub fn from_bigrational(r: BigRational) -> Ratio {
        Ratio(r)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn signum(&self) -> i32 {
        if self.0.is_zero() {
            0
        } else if self.0.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn abs(&self) -> Ratio {
        Ratio(self.0.abs())
    }

    pub fn recip(&self) -> Ratio {
        assert!(!self.is_zero(), "reciprocal of zero");
        Ratio(self.0.recip())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn pow(&self, e: i32) -> Ratio {
        Ratio(num_traits::Pow::pow(&self.0, e))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            // Fallback for huge parts: shift both to a comparable size first.
            let n = self.0.numer().to_f64().unwrap_or(f64::INFINITY);
            let d = self.0.denom().to_f64().unwrap_or(f64::INFINITY);
            n / d
        })
    }

    /// Parses a decimal literal such as `-0.125`, `3`, or `1.5e-3` exactly.
    pub fn from_decimal(text: &str) -> Result<Ratio> {
        let bad = || PolyscarError::Config(format!("'{text}' is not a decimal number"));
        let t = text.trim();
        let (mantissa, exponent) = match t.find(['e', 'E']) {
            Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
            None => (t, 0),
        };
        let (neg, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = match digits.split_once('.') {
            Some((i, f)) => (i, f),
            None => (digits, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let all: String = format!("{int_part}{frac_part}");
        let mut num: BigInt = all.parse().map_err(|_| bad())?;
        if neg {
            num = -num;
        }
        let scale = exponent - frac_part.len() as i32;
        let ten = BigInt::from(10);
        let r = if scale >= 0 {
            BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
        };
        Ok(Ratio(r))
    }

    pub fn gcd_parts(&self) -> BigInt {
        self.0.numer().gcd(self.0.denom())
    }
}

impl FromStr for Ratio {
    type Err = PolyscarError;

    /// Accepts `p/q`, integers, and decimal literals.
    fn from_str(s: &str) -> Result<Ratio> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| PolyscarError::Config(format!("bad numerator in '{s}'")))?;
            let q: BigInt = q.trim().parse().map_err(|_| PolyscarError::Config(format!("bad denominator in '{s}'")))?;
            if q.is_zero() {
                return Err(PolyscarError::Config(format!("'{s}' has a zero denominator")));
            }
            return Ok(Ratio(BigRational::new(p, q)));
        }
        Ratio::from_decimal(s)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl From<i64> for Ratio {
    fn from(n: i64) -> Ratio {
        Ratio::integer(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Ratio> for &Ratio {
            type Output = Ratio;
            fn $method(self, rhs: &Ratio) -> Ratio {
                Ratio((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Ratio> for Ratio {
            type Output = Ratio;
            fn $method(self, rhs: Ratio) -> Ratio {
                Ratio(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Ratio> for Ratio {
            type Output = Ratio;
            fn $method(self, rhs: &Ratio) -> Ratio {
                Ratio(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Ratio> for &Ratio {
            type Output = Ratio;
            fn $method(self, rhs: Ratio) -> Ratio {
                Ratio((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Ratio {
    type Output = Ratio;
    fn neg(self) -> Ratio {
        Ratio(-self.0)
    }
}

impl Neg for &Ratio {
    type Output = Ratio;
    fn neg(self) -> Ratio {
        Ratio(-&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_sign_and_gcd() {
        let r = Ratio::new(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(r.to_string(), "-3/2");
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!("3/8".parse::<Ratio>().unwrap(), Ratio::new(3, 8));
        assert_eq!("0.125".parse::<Ratio>().unwrap(), Ratio::new(1, 8));
        assert_eq!("-1.5e-1".parse::<Ratio>().unwrap(), Ratio::new(-3, 20));
        assert_eq!("7".parse::<Ratio>().unwrap(), Ratio::integer(7));
        assert!("1/0".parse::<Ratio>().is_err());
        assert!("abc".parse::<Ratio>().is_err());
    }

    #[test]
    fn to_f64_survives_huge_parts() {
        let big = BigInt::from(10).pow(400u32);
        let r = Ratio::from_big(big.clone() * 3, big);
        assert_eq!(r.to_f64(), 3.0);
    }
}
