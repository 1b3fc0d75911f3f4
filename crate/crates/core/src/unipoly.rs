//! Dense univariate polynomials over a generic exact scalar.
//!
//! Coefficients are stored in ascending degree with no trailing zeros,
//! so the zero polynomial is the empty vector. These are small objects
//! (zeta numerators and denominators, Euclidean remainders); schoolbook
//! arithmetic is all that is needed.

use crate::error::{Error, Result};
use crate::scalar::{FieldScalar, RingScalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly<T> {
    coeffs: Vec<T>,
}

impl<T: RingScalar> UniPoly<T> {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UniPoly {
            coeffs: vec![T::one()],
        }
    }

    pub fn constant(c: T) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// Builds from ascending coefficients, trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn monomial(c: T, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = c;
        UniPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> Self {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::from_coeffs(coeffs)
    }

    pub fn mul_scalar(&self, c: &T) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }
}

impl<T: FieldScalar> UniPoly<T> {
    /// Euclidean division; the divisor must be nonzero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dd = divisor.degree().unwrap();
        let lead_inv = T::one() / divisor.leading().unwrap().clone();
        let mut rem = self.clone();
        let mut quot = vec![T::zero(); self.coeffs.len().saturating_sub(dd)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let factor = rem.leading().unwrap().clone() * lead_inv.clone();
            let shift = rd - dd;
            quot[shift] = factor.clone();
            let scaled = divisor.mul(&Self::monomial(factor, shift));
            rem = rem.sub(&scaled);
        }
        (Self::from_coeffs(quot), rem)
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        match a.leading() {
            Some(l) if !l.is_one() => {
                let inv = T::one() / l.clone();
                a.mul_scalar(&inv)
            }
            _ => a,
        }
    }
}

/// Rational-function reconstruction from the first `dp + dq + 1` series
/// coefficients: the extended Euclidean algorithm on `(t^K, series)`
/// stopped at the first remainder of degree `<= dp` yields `(P, Q)` with
/// `deg P <= dp`, `deg Q <= dq` and `Q * series = P  mod t^K`.
pub fn pade_approximant<T: FieldScalar>(
    series: &[T],
    dp: usize,
    dq: usize,
) -> Result<(UniPoly<T>, UniPoly<T>)> {
    let k = dp + dq + 1;
    if series.len() < k {
        return Err(Error::Reconstruction(format!(
            "need {k} series coefficients for degree bounds ({dp}, {dq}), have {}",
            series.len()
        )));
    }
    let mut r_prev = UniPoly::monomial(T::one(), k);
    let mut r_cur = UniPoly::from_coeffs(series[..k].to_vec());
    let mut v_prev = UniPoly::zero();
    let mut v_cur = UniPoly::one();
    while r_cur.degree().map_or(false, |d| d > dp) {
        let (q, r) = r_prev.div_rem(&r_cur);
        let v = v_prev.sub(&q.mul(&v_cur));
        r_prev = r_cur;
        v_prev = v_cur;
        r_cur = r;
        v_cur = v;
    }
    if v_cur.degree().map_or(true, |d| d > dq) {
        return Err(Error::Reconstruction(format!(
            "denominator degree exceeds the bound {dq}"
        )));
    }
    Ok((r_cur, v_cur))
}

impl UniPoly<BigInt> {
    pub fn to_rational(&self) -> UniPoly<BigRational> {
        UniPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        }
    }

    /// Coefficients as decimal strings, ascending degree.
    pub fn coeff_strings(&self) -> Vec<String> {
        if self.is_zero() {
            return vec!["0".to_string()];
        }
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl UniPoly<BigRational> {
    /// Succeeds only when every coefficient is an integer.
    pub fn to_integer(&self) -> Option<UniPoly<BigInt>> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if !c.is_integer() {
                return None;
            }
            coeffs.push(c.to_integer());
        }
        Some(UniPoly { coeffs })
    }
}

impl fmt::Display for UniPoly<BigInt> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{IntPoly, RatPoly};
    use num_traits::FromPrimitive;

    fn ip(v: &[i64]) -> IntPoly {
        IntPoly::from_coeffs(v.iter().map(|&c| BigInt::from(c)).collect())
    }

    fn rp(v: &[i64]) -> RatPoly {
        RatPoly::from_coeffs(
            v.iter()
                .map(|&c| BigRational::from_i64(c).unwrap())
                .collect(),
        )
    }

    #[test]
    fn arithmetic_and_trimming() {
        let a = ip(&[1, 2, 1]);
        let b = ip(&[1, 1]);
        assert_eq!(b.mul(&b), a);
        assert_eq!(a.sub(&a), IntPoly::zero());
        assert_eq!(a.sub(&a).degree(), None);
        assert_eq!(ip(&[0, 0, 0]), IntPoly::zero());
        assert_eq!(a.add(&a.neg()), IntPoly::zero());
    }

    #[test]
    fn division_and_gcd() {
        // (1 - t)(1 - 2t) = 1 - 3t + 2t^2
        let p = rp(&[1, -3, 2]);
        let d = rp(&[1, -1]);
        let (q, r) = p.div_rem(&d);
        assert!(r.is_zero());
        assert_eq!(q, rp(&[1, -2]));

        let g = rp(&[1, -3, 2]).gcd(&rp(&[1, -2]));
        // Monic: t - 1/2.
        assert_eq!(g.degree(), Some(1));
        assert!(g.leading().unwrap().is_one());
    }

    #[test]
    fn pade_recovers_rational_function() {
        // Series of (1 - t) / (1 - 3t): coefficients 1, 2, 6, 18, ...
        let mut series = vec![BigRational::from_i64(1).unwrap()];
        for k in 1..8usize {
            let c = 2 * 3i64.pow(k as u32 - 1);
            series.push(BigRational::from_i64(c).unwrap());
        }
        let (p, q) = pade_approximant(&series, 1, 1).unwrap();
        // Normalize so q(0) = 1.
        let c = q.coeff(0);
        let p = p.mul_scalar(&(BigRational::one() / c.clone()));
        let q = q.mul_scalar(&(BigRational::one() / c));
        assert_eq!(p.to_integer().unwrap(), ip(&[1, -1]));
        assert_eq!(q.to_integer().unwrap(), ip(&[1, -3]));
    }

    #[test]
    fn pade_insufficient_series_is_an_error() {
        let series = vec![BigRational::one(); 3];
        assert!(pade_approximant(&series, 2, 2).is_err());
    }

    #[test]
    fn display_formatting() {
        assert_eq!(ip(&[1, -12, 32]).to_string(), "1 - 12*t + 32*t^2");
        assert_eq!(ip(&[1, 0, 1]).to_string(), "1 + t^2");
        assert_eq!(IntPoly::zero().to_string(), "0");
        assert_eq!(ip(&[-2, 1]).to_string(), "-2 + t");
    }
}
