use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::Ratio;

/// Decimal digits carried by the rational stand-in for √s.
pub const SQRT_DIGITS: u32 = 60;

thread_local! {
    static SQRT_CACHE: RefCell<HashMap<u32, BigRational>> = RefCell::new(HashMap::new());
}

/// √s truncated to [`SQRT_DIGITS`] decimals, as an exact rational.
pub fn sqrt_approx(s: u32) -> BigRational {
    SQRT_CACHE.with(|c| {
        c.borrow_mut()
            .entry(s)
            .or_insert_with(|| {
                let scale = num_traits::pow(BigInt::from(10), SQRT_DIGITS as usize);
                let root = (BigInt::from(s) * &scale * &scale).sqrt();
                BigRational::new(root, scale)
            })
            .clone()
    })
}

pub fn is_square_free(s: u32) -> bool {
    if s == 0 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= s {
        if s % (d * d) == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Element a + b√s of a real quadratic field. `s == 1` marks a plain rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    a: Ratio,
    b: Ratio,
    s: u32,
}

impl Surd {
    pub fn new(a: Ratio, b: Ratio, s: u32) -> Surd {
        assert!(is_square_free(s), "radicand {s} is not square-free");
        if b.is_zero() || s == 1 {
            let a = if s == 1 { a + b } else { a };
            return Surd { a, b: Ratio::zero(), s: 1 };
        }
        Surd { a, b, s }
    }

    pub fn rational(a: Ratio) -> Surd {
        Surd { a, b: Ratio::zero(), s: 1 }
    }

    pub fn int(n: i64) -> Surd {
        Surd::rational(Ratio::integer(n))
    }

    pub fn frac(n: i64, d: i64) -> Surd {
        Surd::rational(Ratio::new(n, d))
    }

    pub fn zero() -> Surd {
        Surd::int(0)
    }

    pub fn one() -> Surd {
        Surd::int(1)
    }

    /// √s itself.
    pub fn sqrt(s: u32) -> Surd {
        Surd::new(Ratio::zero(), Ratio::one(), s)
    }

    pub fn rational_part(&self) -> &Ratio {
        &self.a
    }

    pub fn radical_part(&self) -> &Ratio {
        &self.b
    }

    pub fn radicand(&self) -> u32 {
        self.s
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Ratio> {
        self.is_rational().then_some(&self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// The Galois conjugate a − b√s.
    pub fn conjugate(&self) -> Surd {
        Surd { a: self.a.clone(), b: -&self.b, s: self.s }
    }

    /// Field norm a² − s·b² (a rational).
    pub fn norm(&self) -> Ratio {
        &self.a * &self.a - &self.b * &self.b * Ratio::integer(self.s as i64)
    }

    pub fn signum(&self) -> i32 {
        let sa = self.a.signum();
        let sb = self.b.signum();
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // Opposite signs: the larger of a² and s·b² wins.
        let a2 = &self.a * &self.a;
        let b2s = &self.b * &self.b * Ratio::integer(self.s as i64);
        match a2.cmp(&b2s) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => unreachable!("square-free radicand cannot give a² = s·b²"),
        }
    }

    pub fn abs(&self) -> Surd {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Surd {
        assert!(!self.is_zero(), "reciprocal of zero");
        let n = self.norm();
        Surd { a: &self.a / &n, b: -(&self.b / &n), s: self.s }
    }

    /// High-precision rational stand-in (error below 10^-55 for moderate b).
    pub fn approx_rational(&self) -> BigRational {
        if self.b.is_zero() {
            return self.a.as_big().clone();
        }
        self.a.as_big() + self.b.as_big() * sqrt_approx(self.s)
    }

    pub fn to_f64(&self) -> f64 {
        if self.b.is_zero() {
            return self.a.to_f64();
        }
        Ratio::from_bigrational(self.approx_rational()).to_f64()
    }

    pub fn floor(&self) -> BigInt {
        if self.b.is_zero() {
            return self.a.floor();
        }
        let mut k = self.approx_rational().floor().to_integer();
        // Exact correction in case the approximation straddled an integer.
        loop {
            let lo = self - &Surd::rational(Ratio::from_bigint(k.clone()));
            if lo.signum() < 0 {
                k -= 1;
                continue;
            }
            let hi = &Surd::rational(Ratio::from_bigint(k.clone() + 1)) - self;
            if hi.signum() <= 0 {
                k += 1;
                continue;
            }
            return k;
        }
    }

    /// The value reduced into [0, 2), as a float. Used for phases measured in units of π.
    pub fn rem_two_f64(&self) -> f64 {
        // Each part is reduced with integer remainders; normalizing the
        // 60-digit sum as a BigRational costs far more than the phase needs.
        let rem = |num: &BigInt, den: &BigInt| -> f64 {
            let r = num.mod_floor(&(den * 2));
            BigRational::new_raw(r, den.clone()).to_f64().unwrap_or(0.0)
        };
        let mut r = rem(self.a.numer(), self.a.denom());
        if !self.b.is_zero() {
            let root = sqrt_approx(self.s);
            r += rem(&(self.b.numer() * root.numer()), &(self.b.denom() * root.denom()));
        }
        r.rem_euclid(2.0)
    }

    pub fn scale(&self, r: &Ratio) -> Surd {
        Surd::new(&self.a * r, &self.b * r, self.s)
    }

    pub fn pow(&self, e: u32) -> Surd {
        let mut out = Surd::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    fn field(&self, other: &Surd) -> u32 {
        match (self.b.is_zero(), other.b.is_zero()) {
            (true, _) => other.s,
            (_, true) => self.s,
            _ => {
                assert_eq!(self.s, other.s, "mixing Q(√{}) and Q(√{})", self.s, other.s);
                self.s
            }
        }
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Surd) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Surd) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl From<Ratio> for Surd {
    fn from(r: Ratio) -> Surd {
        Surd::rational(r)
    }
}

impl From<i64> for Surd {
    fn from(n: i64) -> Surd {
        Surd::int(n)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.a.is_zero() {
            write!(f, "{}√{}", self.b, self.s)
        } else if self.b.is_negative() {
            write!(f, "{} - {}√{}", self.a, self.b.abs(), self.s)
        } else {
            write!(f, "{} + {}√{}", self.a, self.b, self.s)
        }
    }
}

impl Add<&Surd> for &Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        let s = self.field(rhs);
        Surd::new(&self.a + &rhs.a, &self.b + &rhs.b, s)
    }
}

impl Sub<&Surd> for &Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        let s = self.field(rhs);
        Surd::new(&self.a - &rhs.a, &self.b - &rhs.b, s)
    }
}

impl Mul<&Surd> for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        let s = self.field(rhs);
        let a = &self.a * &rhs.a + &self.b * &rhs.b * Ratio::integer(s as i64);
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        Surd::new(a, b, s)
    }
}

impl Div<&Surd> for &Surd {
    type Output = Surd;
    fn div(self, rhs: &Surd) -> Surd {
        self * &rhs.recip()
    }
}

macro_rules! owned_ops {
    ($trait:ident, $method:ident) => {
        impl $trait<Surd> for Surd {
            type Output = Surd;
            fn $method(self, rhs: Surd) -> Surd {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Surd> for Surd {
            type Output = Surd;
            fn $method(self, rhs: &Surd) -> Surd {
                (&self).$method(rhs)
            }
        }
        impl $trait<Surd> for &Surd {
            type Output = Surd;
            fn $method(self, rhs: Surd) -> Surd {
                self.$method(&rhs)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
owned_ops!(Div, div);

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd { a: -&self.a, b: -&self.b, s: self.s }
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r2() -> Surd {
        Surd::sqrt(2)
    }

    #[test]
    fn sqrt_two_squares_to_two() {
        assert_eq!(&r2() * &r2(), Surd::int(2));
    }

    #[test]
    fn inverse_uses_conjugate() {
        let x = &Surd::int(1) + &r2();
        assert_eq!(x.recip(), &r2() - &Surd::int(1));
    }

    #[test]
    fn sign_of_pell_residual() {
        // 3363 - 2378√2 is a tiny positive number.
        let x = &Surd::int(3363) - &r2().scale(&Ratio::integer(2378));
        assert_eq!(x.signum(), 1);
        assert!(x.to_f64() > 0.0 && x.to_f64() < 1e-3);
        let y = &Surd::int(3362) - &r2().scale(&Ratio::integer(2378));
        assert_eq!(y.signum(), -1);
    }

    #[test]
    fn floor_is_exact_near_integers() {
        let x = &r2().scale(&Ratio::integer(2378)) + &Surd::frac(1, 1_000_000_000);
        assert_eq!(x.floor(), BigInt::from(3362));
        assert_eq!((&Surd::int(1) + &r2()).floor(), BigInt::from(2));
    }

    #[test]
    fn rem_two_reduces_large_phases() {
        let x = Surd::int(1_000_001);
        assert!((x.rem_two_f64() - 1.0).abs() < 1e-15);
        let y = &Surd::int(-3) + &Surd::frac(1, 4);
        assert!((y.rem_two_f64() - 1.25).abs() < 1e-15);
    }

    #[test]
    fn rational_operand_adopts_field() {
        let x = &Surd::frac(1, 2) + &Surd::sqrt(3);
        assert_eq!(x.radicand(), 3);
        assert_eq!(x.to_string(), "1/2 + 1√3");
    }
}
