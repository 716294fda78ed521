use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Ratio;
use crate::error::{PolyscarError, Result};

/// One Euclid step: `remainder = witness.0 · N + witness.1 · q1j`,
/// so `(remainder / q1j)·D1` is an integer combination of `(N/q1j)·D1` and `D1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EuclidStep {
    pub quotient: BigInt,
    pub remainder: BigInt,
    pub witness: (BigInt, BigInt),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodCertificate {
    /// N = coefficient · q1j.
    pub numerator: BigInt,
    pub divisor: BigInt,
    /// b1 > b2 > … down to gcd(N, q1j); empty when the divisor is 1.
    pub steps: Vec<EuclidStep>,
    /// The fraction f with f·D1 proven to lie in the lattice (1/q1j when coprime).
    pub certified: Ratio,
}

impl PeriodCertificate {
    pub fn remainders(&self) -> Vec<BigInt> {
        self.steps.iter().map(|s| s.remainder.clone()).collect()
    }

    /// True when D1/q1j itself was reached.
    pub fn certifies_full_division(&self) -> bool {
        self.certified == Ratio::from_big(BigInt::one(), self.divisor.clone())
    }

    /// Integer pair (x, y) with x·(N/q1j)·D1 + y·D1 = certified·D1.
    pub fn final_witness(&self) -> (BigInt, BigInt) {
        match self.steps.iter().rev().find(|s| !s.remainder.is_zero()) {
            Some(s) => s.witness.clone(),
            // N ≡ 0 mod q1j, or q1j = 1: D1 itself, i.e. 0·(N/q1j)D1 + 1·D1.
            None => (BigInt::zero(), BigInt::one()),
        }
    }
}

/// Proves that D1/q1j is a period given that (N/q1j)·D1 is one.
///
/// Runs Euclid on (N, q1j) with Bezout bookkeeping. Works for either ordering of
/// N and q1j; when they share a factor g only (g/q1j)·D1 is certified.
pub fn reduce_period(coefficient: &Ratio, divisor: u64) -> Result<PeriodCertificate> {
    if divisor == 0 {
        return Err(PolyscarError::Domain("period divisor must be positive".into()));
    }
    let q = BigInt::from(divisor);
    let scaled = coefficient * &Ratio::from_bigint(q.clone());
    if !scaled.is_integer() {
        return Err(PolyscarError::Domain(format!("{coefficient} is not of the form N/{divisor}")));
    }
    let n = scaled.numer().clone();
    let mut steps = Vec::new();
    if divisor == 1 {
        return Ok(PeriodCertificate { numerator: n, divisor: q, steps, certified: Ratio::one() });
    }
    // Invariant: r_prev = x_prev·N + y_prev·q and r = x·N + y·q.
    let (mut r_prev, mut x_prev, mut y_prev) = (n.clone(), BigInt::one(), BigInt::zero());
    let (mut r, mut x, mut y) = (q.clone(), BigInt::zero(), BigInt::one());
    loop {
        let (a, rem) = r_prev.div_mod_floor(&r);
        let xn = &x_prev - &a * &x;
        let yn = &y_prev - &a * &y;
        steps.push(EuclidStep { quotient: a, remainder: rem.clone(), witness: (xn.clone(), yn.clone()) });
        if rem.is_zero() {
            break;
        }
        r_prev = std::mem::replace(&mut r, rem);
        x_prev = std::mem::replace(&mut x, xn);
        y_prev = std::mem::replace(&mut y, yn);
    }
    // The last nonzero remainder is the gcd (q itself if the first remainder vanished).
    let g = steps.iter().rev().find(|s| !s.remainder.is_zero()).map(|s| s.remainder.abs()).unwrap_or_else(|| q.clone());
    // Drop the terminating zero step unless it is the only one (immediate certification).
    if steps.len() > 1 {
        steps.pop();
    }
    let certified = Ratio::from_big(g, q.clone());
    Ok(PeriodCertificate { numerator: n, divisor: q, steps, certified })
}

/// Least common multiple of a nonempty list of positive integers.
pub fn lcm_list(values: &[u64]) -> Result<u64> {
    if values.is_empty() {
        return Err(PolyscarError::Domain("lcm of an empty list".into()));
    }
    let mut acc: u64 = 1;
    for &v in values {
        if v == 0 {
            return Err(PolyscarError::Domain("lcm of a list containing 0".into()));
        }
        let g = acc.gcd(&v);
        acc = (acc / g)
            .checked_mul(v)
            .ok_or_else(|| PolyscarError::Resource { message: "lcm overflows u64".into(), best_error: f64::NAN })?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seven_fifths_chain() {
        let c = reduce_period(&Ratio::new(7, 5), 5).unwrap();
        assert_eq!(c.remainders(), vec![BigInt::from(2), BigInt::from(1)]);
        assert!(c.certifies_full_division());
        let (x, y) = c.final_witness();
        // x·7 + y·5 = 1
        assert_eq!(x * 7 + y * 5, BigInt::one());
    }

    #[test]
    fn divisor_one_is_empty() {
        let c = reduce_period(&Ratio::integer(4), 1).unwrap();
        assert!(c.steps.is_empty());
        assert_eq!(c.certified, Ratio::one());
    }

    #[test]
    fn exact_multiple_certifies_immediately() {
        let c = reduce_period(&Ratio::integer(3), 5).unwrap();
        assert_eq!(c.steps.len(), 1);
        assert!(c.steps[0].remainder.is_zero());
        assert_eq!(c.certified, Ratio::one());
    }

    #[test]
    fn smaller_numerator_is_handled() {
        let c = reduce_period(&Ratio::new(3, 8), 8).unwrap();
        assert!(c.certifies_full_division());
        let rems = c.remainders();
        assert_eq!(rems[0], BigInt::from(3));
        assert!(rems.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn shared_factor_certifies_partial_division() {
        let c = reduce_period(&Ratio::new(6, 9), 9).unwrap();
        assert_eq!(c.certified, Ratio::new(1, 3));
        assert!(!c.certifies_full_division());
    }

    #[test]
    fn zero_divisor_rejected() {
        assert!(reduce_period(&Ratio::one(), 0).is_err());
    }

    #[test]
    fn lcm_examples() {
        assert_eq!(lcm_list(&[8, 8, 2]).unwrap(), 8);
        assert_eq!(lcm_list(&[2, 2, 2, 2]).unwrap(), 2);
        assert_eq!(lcm_list(&[1]).unwrap(), 1);
        assert!(lcm_list(&[]).is_err());
    }
}
