//! Exact zeta functions from point counts.
//!
//! `Z(t) = exp(sum_s N_s t^s / s)` is expanded over the rationals, a
//! rational function is recovered by the Euclidean Pade construction,
//! reduced to coprime integer numerator and denominator with constant
//! terms 1, and then re-expanded: the result is accepted only if it
//! reproduces every input count. Divisibility of reciprocal roots by
//! powers of q is certified through coefficient valuations: all
//! reciprocal roots of a factor are divisible by `q^m` exactly when
//! `v_p(a_j) >= j * m * s_base` for every `j`.

use crate::bounds::{mu, polar_requirement, AmbientProblem, DegreeSequence};
use crate::counting::PointCountRecord;
use crate::error::{Error, Result};
use crate::unipoly::pade_approximant;
use crate::IntPoly;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Truncated expansion of `exp(sum_s N_s t^s / s)`; `S + 1` exact
/// rational coefficients, the first being 1.
pub fn zeta_series(record: &PointCountRecord) -> Result<Vec<BigRational>> {
    let steps = match record.counts.keys().next_back() {
        Some(&max) => max,
        None => return Err(Error::MissingCount(1)),
    };
    let mut counts = Vec::with_capacity(steps as usize);
    for s in 1..=steps {
        let n = record.counts.get(&s).ok_or(Error::MissingCount(s))?;
        counts.push(BigRational::from_integer(BigInt::from(n.clone())));
    }
    // z_k = (1/k) * sum_{i=1}^{k} N_i z_{k-i}, from z' = (log Z)' z.
    let mut z = vec![BigRational::one()];
    for k in 1..=steps as usize {
        let mut acc = BigRational::zero();
        for i in 1..=k {
            acc += &counts[i - 1] * &z[k - i];
        }
        z.push(acc / BigRational::from_integer(BigInt::from(k)));
    }
    Ok(z)
}

/// A reduced zeta function: coprime integer numerator and denominator,
/// both with constant term 1, reproducing all `verified_up_to` counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaFunction {
    pub numerator: IntPoly,
    pub denominator: IntPoly,
    pub verified_up_to: u32,
}

impl ZetaFunction {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "numerator": self.numerator.coeff_strings(),
            "denominator": self.denominator.coeff_strings(),
            "verified_up_to": self.verified_up_to,
        })
    }
}

/// Recovers `Z` as a rational function with degree bounds
/// `(deg_num, deg_den)`; needs at least `deg_num + deg_den + 1` counts,
/// and every available count must be reproduced exactly.
pub fn reconstruct(
    record: &PointCountRecord,
    deg_num: usize,
    deg_den: usize,
) -> Result<ZetaFunction> {
    let series = zeta_series(record)?;
    let steps = series.len() - 1;
    if steps < deg_num + deg_den + 1 {
        return Err(Error::Reconstruction(format!(
            "degree bounds ({deg_num}, {deg_den}) need at least {} counts, have {steps}",
            deg_num + deg_den + 1
        )));
    }
    let (p_raw, q_raw) = pade_approximant(&series, deg_num, deg_den)?;
    if q_raw.coeff(0).is_zero() {
        return Err(Error::Reconstruction(
            "denominator has constant term 0 (malformed counts)".into(),
        ));
    }
    // Reduce to lowest terms, then normalize both constant terms to 1.
    let g = p_raw.gcd(&q_raw);
    let (mut p, mut q) = if g.degree().map_or(false, |d| d > 0) {
        (p_raw.div_rem(&g).0, q_raw.div_rem(&g).0)
    } else {
        (p_raw, q_raw)
    };
    let c = q.coeff(0);
    if c.is_zero() {
        return Err(Error::Reconstruction(
            "denominator has constant term 0 after reduction".into(),
        ));
    }
    let inv = BigRational::one() / c;
    p = p.mul_scalar(&inv);
    q = q.mul_scalar(&inv);
    let numerator = p
        .to_integer()
        .ok_or_else(|| Error::Reconstruction("reduced numerator is not integral".into()))?;
    let denominator = q
        .to_integer()
        .ok_or_else(|| Error::Reconstruction("reduced denominator is not integral".into()))?;
    if !numerator.coeff(0).is_one() || !denominator.coeff(0).is_one() {
        return Err(Error::Reconstruction("constant terms are not 1".into()));
    }
    // The candidate must reproduce every count, including held-out ones.
    let expanded = expand_counts(&numerator, &denominator, steps);
    for (s, want) in (1..=steps as u32).zip(&expanded) {
        let have = BigInt::from(record.counts[&s].clone());
        if have != *want {
            return Err(Error::Reconstruction(format!(
                "re-expansion disagrees with the counts at s = {s}"
            )));
        }
    }
    Ok(ZetaFunction {
        numerator,
        denominator,
        verified_up_to: steps as u32,
    })
}

/// Power sums of the reciprocal roots of `f = 1 + a_1 t + ... + a_D t^D`
/// for s = 1..=s_max, by Newton's identities over the integers.
pub fn power_sums(f: &IntPoly, s_max: usize) -> Vec<BigInt> {
    assert!(f.coeff(0).is_one(), "constant term must be 1");
    let deg = f.degree().unwrap_or(0);
    let mut sums: Vec<BigInt> = Vec::with_capacity(s_max + 1);
    sums.push(BigInt::from(deg)); // p_0 = number of roots, unused below
    for k in 1..=s_max {
        let mut acc = BigInt::zero();
        for i in 1..k.min(deg + 1) {
            acc -= f.coeff(i) * &sums[k - i];
        }
        if k <= deg {
            acc -= BigInt::from(k as u64) * f.coeff(k);
        }
        sums.push(acc);
    }
    sums.remove(0);
    sums
}

/// Counts implied by `Z = num / den`: `N_s` is the s-th power sum of the
/// denominator's reciprocal roots minus the numerator's.
pub fn expand_counts(num: &IntPoly, den: &IntPoly, s_max: usize) -> Vec<BigInt> {
    let pn = power_sums(num, s_max);
    let pd = power_sums(den, s_max);
    pd.into_iter().zip(pn).map(|(d, n)| d - n).collect()
}

/// `v_p` of a nonzero integer.
pub fn int_valuation(n: &BigInt, p: u64) -> u64 {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = num_integer::div_rem(n.clone(), p.clone());
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Proof that every reciprocal root of `factor` is divisible by
/// `q^certified_m` (`q = p^s_base`) in the algebraic integers, read off
/// the coefficient valuations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisibilityCertificate {
    pub factor: IntPoly,
    pub p: u64,
    pub s_base: u32,
    /// `min_j floor(v_p(a_j) / (j * s_base))`; `None` (infinite) for a
    /// constant factor.
    pub certified_m: Option<u64>,
    /// First index attaining the minimum.
    pub witness: Option<usize>,
}

impl DivisibilityCertificate {
    pub fn passes(&self, required: i64) -> bool {
        match self.certified_m {
            None => true,
            Some(m) => required <= 0 || m >= required as u64,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "factor": self.factor.coeff_strings(),
            "p": self.p,
            "s_base": self.s_base,
            "certified_m": self.certified_m,
            "witness": self.witness,
        })
    }
}

/// Maximal `m` with `v_p(a_j) >= j * m * s_base` for all `j >= 1`.
pub fn certify_factor(factor: &IntPoly, p: u64, s_base: u32) -> DivisibilityCertificate {
    assert!(factor.coeff(0).is_one(), "constant term must be 1");
    assert!(s_base >= 1);
    let mut best: Option<(u64, usize)> = None;
    if let Some(deg) = factor.degree() {
        for j in 1..=deg {
            let a = factor.coeff(j);
            if a.is_zero() {
                continue;
            }
            let m = int_valuation(&a, p) / (j as u64 * s_base as u64);
            if best.map_or(true, |(b, _)| m < b) {
                best = Some((m, j));
            }
        }
    }
    DivisibilityCertificate {
        factor: factor.clone(),
        p,
        s_base,
        certified_m: best.map(|(m, _)| m),
        witness: best.map(|(_, j)| j),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleSide {
    Numerator,
    Denominator,
}

impl PoleSide {
    pub fn name(self) -> &'static str {
        match self {
            PoleSide::Numerator => "numerator",
            PoleSide::Denominator => "denominator",
        }
    }
}

/// Outcome of the polar divisibility check. A failure is a report
/// outcome, not an error.
#[derive(Debug, Clone)]
pub struct PolarReport {
    pub required: i64,
    pub side: PoleSide,
    pub certificate: DivisibilityCertificate,
    /// The reduced pole side was the constant 1; nothing to certify.
    pub vacuous: bool,
    pub pass: bool,
}

impl PolarReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "check": "polar",
            "required": self.required,
            "pole_side": self.side.name(),
            "certified_m": self.certificate.certified_m,
            "witness": self.certificate.witness,
            "vacuous": self.vacuous,
            "pass": self.pass,
        })
    }
}

/// Checks the reciprocal poles of `Z^((-1)^(N-r+1))` against the polar
/// requirement. Even `N - r + 1` points at `Z` itself, so its poles are
/// the denominator's reciprocal roots; odd points at `1/Z`, hence the
/// numerator's.
pub fn verify_polar(
    zeta: &ZetaFunction,
    problem: &AmbientProblem,
    degrees: &DegreeSequence,
    p: u64,
    s_base: u32,
) -> Result<PolarReport> {
    let requirement = polar_requirement(problem, degrees)?;
    let (side, factor) = if requirement.even_sign {
        (PoleSide::Denominator, &zeta.denominator)
    } else {
        (PoleSide::Numerator, &zeta.numerator)
    };
    let certificate = certify_factor(factor, p, s_base);
    let vacuous = factor.is_one();
    let pass = certificate.passes(requirement.exponent);
    Ok(PolarReport {
        required: requirement.exponent,
        side,
        certificate,
        vacuous,
        pass,
    })
}

/// Every reciprocal zero and pole of the reduced zeta function must be
/// divisible by `q^mu_0`.
#[derive(Debug, Clone)]
pub struct WholeZetaReport {
    pub required: i64,
    pub numerator: DivisibilityCertificate,
    pub denominator: DivisibilityCertificate,
    pub pass: bool,
}

impl WholeZetaReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "check": "whole_zeta",
            "required": self.required,
            "numerator_certified_m": self.numerator.certified_m,
            "denominator_certified_m": self.denominator.certified_m,
            "pass": self.pass,
        })
    }
}

pub fn verify_whole_zeta(
    zeta: &ZetaFunction,
    degrees: &DegreeSequence,
    ambient_dim: usize,
    p: u64,
    s_base: u32,
) -> WholeZetaReport {
    let required = mu(0, ambient_dim as i64, degrees);
    let numerator = certify_factor(&zeta.numerator, p, s_base);
    let denominator = certify_factor(&zeta.denominator, p, s_base);
    let pass = numerator.passes(required) && denominator.passes(required);
    WholeZetaReport {
        required,
        numerator,
        denominator,
        pass,
    }
}
