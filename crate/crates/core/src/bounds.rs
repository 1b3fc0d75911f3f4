//! Colevel lower bounds from degree data.
//!
//! Everything here is exact integer arithmetic on small numbers. The two
//! bound families are
//!
//! ```text
//! mu_j(N; d_1..d_r)     = j + max{0, ceil((N - j - sum d_i) / d_1)}
//! nu_j^(e)(N; d_1..d_r) = j + max{0, ceil((N - j - sum d_i*(e)) / d_1)}
//! ```
//!
//! where `d_i*(e)` keeps `d_i` for `i <= e` and collapses the tail to 1
//! (entries equal to `d_1`) or 0 (strictly smaller). `nu^(r) = mu`, and
//! `nu^(e)` grows as `e` shrinks, which is where the improvement over the
//! classical Ax-Katz-style bound comes from.

use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;

/// Ceiling of `a / b` for `b > 0`, correct for negative `a`.
pub fn ceil_div(a: i64, b: i64) -> i64 {
    assert!(b > 0, "ceil_div needs a positive divisor");
    a.div_euclid(b) + if a.rem_euclid(b) != 0 { 1 } else { 0 }
}

/// A non-increasing sequence of positive degrees `d_1 >= ... >= d_r >= 1`.
///
/// Callers may supply the degrees in any order; construction sorts them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct DegreeSequence {
    degrees: Vec<i64>,
}

impl DegreeSequence {
    pub fn new(mut degrees: Vec<i64>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::EmptyDegrees);
        }
        if let Some(&bad) = degrees.iter().find(|&&d| d < 1) {
            return Err(Error::InvalidDegree(bad));
        }
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        Ok(DegreeSequence { degrees })
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn r(&self) -> usize {
        self.degrees.len()
    }

    pub fn largest(&self) -> i64 {
        self.degrees[0]
    }

    pub fn sum(&self) -> i64 {
        self.degrees.iter().sum()
    }

    /// First `r1` entries as their own sequence (still non-increasing).
    pub fn prefix(&self, r1: usize) -> Result<Self> {
        if r1 == 0 || r1 > self.degrees.len() {
            return Err(Error::EmptyDegrees);
        }
        Ok(DegreeSequence {
            degrees: self.degrees[..r1].to_vec(),
        })
    }
}

/// `mu_j(N; d_1..d_r)`.
pub fn mu(j: i64, ambient: i64, degrees: &DegreeSequence) -> i64 {
    assert!(j >= 0 && ambient >= 0);
    j + (ceil_div(ambient - j - degrees.sum(), degrees.largest())).max(0)
}

/// The modified degrees `d_i*(e)`; equals the input once `e >= r`.
pub fn d_star(degrees: &DegreeSequence, e: i64) -> Vec<i64> {
    let d1 = degrees.largest();
    degrees
        .degrees()
        .iter()
        .enumerate()
        .map(|(idx, &d)| {
            let i = (idx + 1) as i64;
            if i <= e {
                d
            } else if d == d1 {
                1
            } else {
                0
            }
        })
        .collect()
}

/// `nu_j^(e)(N; d_1..d_r)`; any integer `e` is accepted.
pub fn nu(j: i64, e: i64, ambient: i64, degrees: &DegreeSequence) -> i64 {
    assert!(j >= 0 && ambient >= 0);
    let d1 = degrees.largest();
    let star_sum: i64 = degrees
        .degrees()
        .iter()
        .enumerate()
        .map(|(idx, &d)| {
            let i = (idx + 1) as i64;
            if i <= e {
                d
            } else if d == d1 {
                1
            } else {
                0
            }
        })
        .sum();
    j + (ceil_div(ambient - j - star_sum, d1)).max(0)
}

/// Ambient-space data for a variety cut out by `r` equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AmbientProblem {
    /// Dimension `N` of the ambient affine or projective space.
    pub ambient_dim: i64,
    /// Dimension `n` of the variety.
    pub dim: i64,
    pub projective: bool,
}

impl AmbientProblem {
    pub fn affine(ambient_dim: i64, dim: i64) -> Self {
        AmbientProblem {
            ambient_dim,
            dim,
            projective: false,
        }
    }

    pub fn projective(ambient_dim: i64, dim: i64) -> Self {
        AmbientProblem {
            ambient_dim,
            dim,
            projective: true,
        }
    }

    fn validate(&self, degrees: &DegreeSequence) -> Result<()> {
        let n = self.dim;
        let big_n = self.ambient_dim;
        let r = degrees.r() as i64;
        if big_n < 1 {
            return Err(Error::InvalidProblem(format!(
                "ambient dimension must be >= 1, got {big_n}"
            )));
        }
        if n > big_n {
            return Err(Error::InvalidProblem(format!(
                "variety dimension {n} exceeds ambient dimension {big_n}"
            )));
        }
        if n < big_n - r {
            return Err(Error::InvalidProblem(format!(
                "dimension {n} below {big_n} - {r}: {r} equations cannot cut deeper than codimension {r}"
            )));
        }
        if n < 0 {
            return Err(Error::InvalidProblem(format!(
                "variety dimension must be >= 0, got {n}"
            )));
        }
        Ok(())
    }
}

/// Which theorem produced a table entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    BeforeMiddle,
    BeyondMiddle,
    /// Middle degree, where both formulas apply and agree.
    MaxOfBoth,
    /// Top compactly-supported degree of a complement, always colevel `N`.
    TopDegree,
}

/// One cohomological degree of a [`BoundTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundEntry {
    pub new_bound: i64,
    /// `max{0, i - n}` for an `n`-dimensional variety.
    pub deligne: i64,
    /// `mu_0`, the Ax-Katz-style bound for every degree.
    pub ax_katz: i64,
    /// `mu_{i-(N-1)}`, available from degree `N-1` on.
    pub esnault_katz: Option<i64>,
    /// `mu_{i-n}`, available from the middle degree on.
    pub question_mu: Option<i64>,
    pub source: BoundSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    Affine,
    Projective,
    AffineComplement,
    ProjectiveComplement,
}

/// Colevel lower bounds per cohomological degree, with the older
/// comparison bounds alongside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundTable {
    pub kind: TableKind,
    pub ambient_dim: i64,
    pub dim: i64,
    pub degrees: Vec<i64>,
    /// Degrees below `min_degree` and above `max_degree` carry no cohomology
    /// (top complement degree excepted).
    pub min_degree: i64,
    pub max_degree: i64,
    pub entries: BTreeMap<i64, BoundEntry>,
}

impl BoundTable {
    pub fn entry(&self, i: i64) -> Option<&BoundEntry> {
        self.entries.get(&i)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|(i, e)| {
                serde_json::json!({
                    "i": i,
                    "new_bound": e.new_bound,
                    "deligne": e.deligne,
                    "ax_katz": e.ax_katz,
                    "esnault_katz": e.esnault_katz,
                    "question_mu": e.question_mu,
                    "source": source_name(e.source),
                })
            })
            .collect();
        serde_json::json!({
            "kind": kind_name(self.kind),
            "ambient_dim": self.ambient_dim,
            "dim": self.dim,
            "degrees": self.degrees,
            "range": [self.min_degree, self.max_degree],
            "entries": entries,
        })
    }
}

pub fn source_name(s: BoundSource) -> &'static str {
    match s {
        BoundSource::BeforeMiddle => "before_middle",
        BoundSource::BeyondMiddle => "beyond_middle",
        BoundSource::MaxOfBoth => "max_of_both",
        BoundSource::TopDegree => "top_degree",
    }
}

pub fn kind_name(k: TableKind) -> &'static str {
    match k {
        TableKind::Affine => "affine",
        TableKind::Projective => "projective",
        TableKind::AffineComplement => "affine_complement",
        TableKind::ProjectiveComplement => "projective_complement",
    }
}

/// Bounds for `H^i_c(X)`, `N - r <= i <= 2n`, of an affine variety.
///
/// Before the middle degree (`i = N - r + m`) the bound is
/// `nu_0^(r-m)(N; d)`; from the middle on (`i = n + j`) it is
/// `nu_j^(N-n)(N; d)`. At `i = n` both apply and agree.
pub fn affine_bound_table(
    problem: &AmbientProblem,
    degrees: &DegreeSequence,
) -> Result<BoundTable> {
    if problem.projective {
        return Err(Error::InvalidProblem(
            "affine table requested for a projective problem".into(),
        ));
    }
    problem.validate(degrees)?;
    build_table(TableKind::Affine, problem, degrees, problem.ambient_dim)
}

/// Bounds for primitive cohomology of a projective variety: the affine
/// shape with `N + 1` in place of `N` inside the formulas.
pub fn projective_bound_table(
    problem: &AmbientProblem,
    degrees: &DegreeSequence,
) -> Result<BoundTable> {
    if !problem.projective {
        return Err(Error::InvalidProblem(
            "projective table requested for an affine problem".into(),
        ));
    }
    problem.validate(degrees)?;
    build_table(
        TableKind::Projective,
        problem,
        degrees,
        problem.ambient_dim + 1,
    )
}

fn build_table(
    kind: TableKind,
    problem: &AmbientProblem,
    degrees: &DegreeSequence,
    formula_ambient: i64,
) -> Result<BoundTable> {
    let big_n = problem.ambient_dim;
    let n = problem.dim;
    let r = degrees.r() as i64;
    let lo = big_n - r;
    let hi = 2 * n;

    let mut entries: BTreeMap<i64, (i64, BoundSource)> = BTreeMap::new();
    for m in 0..=(r - (big_n - n)) {
        let i = big_n - r + m;
        let cand = nu(0, r - m, formula_ambient, degrees);
        entries.insert(i, (cand, BoundSource::BeforeMiddle));
    }
    for j in 0..=n {
        let i = n + j;
        let cand = nu(j, big_n - n, formula_ambient, degrees);
        match entries.get_mut(&i) {
            Some(slot) => {
                // Only the middle degree can be hit twice, and there the
                // two formulas are the same number.
                assert_eq!(i, n, "before/beyond overlap away from the middle degree");
                assert_eq!(slot.0, cand, "before/beyond disagree at the middle degree");
                slot.1 = BoundSource::MaxOfBoth;
            }
            None => {
                entries.insert(i, (cand, BoundSource::BeyondMiddle));
            }
        }
    }

    let table: BTreeMap<i64, BoundEntry> = entries
        .into_iter()
        .map(|(i, (new_bound, source))| {
            let entry = BoundEntry {
                new_bound,
                deligne: (i - n).max(0),
                ax_katz: mu(0, formula_ambient, degrees),
                esnault_katz: if i >= big_n - 1 && i <= 2 * big_n - 2 {
                    Some(mu(i - (big_n - 1), formula_ambient, degrees))
                } else {
                    None
                },
                question_mu: if i >= n {
                    Some(mu(i - n, formula_ambient, degrees))
                } else {
                    None
                },
                source,
            };
            debug_assert!(entry.new_bound >= entry.deligne);
            debug_assert!(entry.new_bound >= entry.ax_katz);
            (i, entry)
        })
        .collect();

    Ok(BoundTable {
        kind,
        ambient_dim: big_n,
        dim: n,
        degrees: degrees.degrees().to_vec(),
        min_degree: lo,
        max_degree: hi,
        entries: table,
    })
}

/// Bounds for the complement of the variety in its ambient space.
///
/// The excision sequence moves every bound for `H^i_c(X)` to
/// `H^{i+1}_c` of the complement unchanged; the only degree it misses is
/// the top one, `i = 2N`, which has colevel `N`.
pub fn complement_bound_table(
    problem: &AmbientProblem,
    degrees: &DegreeSequence,
) -> Result<BoundTable> {
    let base = if problem.projective {
        projective_bound_table(problem, degrees)?
    } else {
        affine_bound_table(problem, degrees)?
    };
    let kind = if problem.projective {
        TableKind::ProjectiveComplement
    } else {
        TableKind::AffineComplement
    };
    let big_n = problem.ambient_dim;
    let formula_ambient = if problem.projective { big_n + 1 } else { big_n };

    let mut entries: BTreeMap<i64, BoundEntry> =
        base.entries.iter().map(|(&i, &e)| (i + 1, e)).collect();
    let top = BoundEntry {
        new_bound: big_n,
        deligne: big_n,
        ax_katz: mu(0, formula_ambient, degrees),
        esnault_katz: None,
        question_mu: None,
        source: BoundSource::TopDegree,
    };
    entries
        .entry(2 * big_n)
        .and_modify(|e| {
            e.new_bound = e.new_bound.max(top.new_bound);
            e.source = BoundSource::TopDegree;
        })
        .or_insert(top);

    Ok(BoundTable {
        kind,
        ambient_dim: big_n,
        dim: problem.dim,
        degrees: degrees.degrees().to_vec(),
        min_degree: base.min_degree + 1,
        max_degree: 2 * big_n,
        entries,
    })
}

/// Divisibility requirement for the polar part `Z_X(t)^{(-1)^{N-r+1}}`
/// of the zeta function of an affine variety.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PolarRequirement {
    /// Every reciprocal pole is divisible by `q^exponent`.
    pub exponent: i64,
    /// Parity of `N - r + 1`. Even means the polar part is `Z` itself,
    /// i.e. the denominator of the reduced zeta function; odd means `1/Z`,
    /// i.e. the numerator.
    pub even_sign: bool,
}

/// `mu_1(N; d)` for a complete intersection (`r = N - n`), otherwise
/// `nu_0^(r-1)(N; d)`.
pub fn polar_requirement(
    problem: &AmbientProblem,
    degrees: &DegreeSequence,
) -> Result<PolarRequirement> {
    if problem.projective {
        return Err(Error::InvalidProblem(
            "the polar requirement applies to affine varieties".into(),
        ));
    }
    problem.validate(degrees)?;
    let big_n = problem.ambient_dim;
    let r = degrees.r() as i64;
    let exponent = if r == big_n - problem.dim {
        mu(1, big_n, degrees)
    } else {
        nu(0, r - 1, big_n, degrees)
    };
    Ok(PolarRequirement {
        exponent,
        even_sign: (big_n - r + 1).rem_euclid(2) == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(v: &[i64]) -> DegreeSequence {
        DegreeSequence::new(v.to_vec()).unwrap()
    }

    #[test]
    fn ceil_div_signed() {
        assert_eq!(ceil_div(4, 3), 2);
        assert_eq!(ceil_div(3, 3), 1);
        assert_eq!(ceil_div(0, 3), 0);
        assert_eq!(ceil_div(-1, 3), 0);
        assert_eq!(ceil_div(-3, 3), -1);
        assert_eq!(ceil_div(-4, 3), -1);
        assert_eq!(ceil_div(1, 2), 1);
    }

    #[test]
    fn degree_sequence_sorts_and_validates() {
        assert_eq!(ds(&[2, 5, 4]).degrees(), &[5, 4, 2]);
        assert!(DegreeSequence::new(vec![]).is_err());
        assert!(DegreeSequence::new(vec![3, 0]).is_err());
        assert!(DegreeSequence::new(vec![-1]).is_err());
    }

    #[test]
    fn mu_values() {
        // Ax-Katz bound of the first determinantal example at e = 4.
        assert_eq!(mu(0, 16, &ds(&[3, 3, 3, 3])), 2);
        // Negative numerator collapses to j.
        assert_eq!(mu(2, 10, &ds(&[5, 5])), 2);
        // 1 + ceil((4 - 1 - 2)/2) = 2.
        assert_eq!(mu(1, 4, &ds(&[2])), 2);
    }

    #[test]
    fn mu_shift_identity() {
        // mu_j(N; d) = j + mu_0(N - j; d) whenever N - j >= 0.
        for n in 0..=20 {
            for j in 0..=n {
                for d in [&[2][..], &[3, 2], &[4, 4, 1]] {
                    let d = ds(d);
                    assert_eq!(mu(j, n, &d), j + mu(0, n - j, &d));
                }
            }
        }
    }

    #[test]
    fn d_star_cases() {
        assert_eq!(d_star(&ds(&[3, 3, 3, 3]), 2), vec![3, 3, 1, 1]);
        assert_eq!(d_star(&ds(&[5, 4, 4]), 0), vec![1, 0, 0]);
        assert_eq!(d_star(&ds(&[3, 2]), 5), vec![3, 2]);
        assert_eq!(d_star(&ds(&[3, 2]), -4), vec![1, 0]);
    }

    #[test]
    fn nu_values() {
        let d5 = ds(&[4, 4, 4, 4, 4]);
        assert_eq!(nu(0, 4, 25, &d5), 2);
        assert_eq!(nu(4, 4, 25, &d5), 5);
        let d6 = ds(&[5, 4, 4, 4, 4, 4]);
        assert_eq!(nu(0, 5, 25, &d6), 1);
        // e = r collapses nu to mu.
        let d2 = ds(&[2, 2]);
        assert_eq!(nu(1, 2, 7, &d2), mu(1, 7, &d2));
    }

    #[test]
    fn nu_degree_monotonicity_fails_at_top_degree_ties() {
        // For e < r, raising a degree tied with d_1 flips the tail
        // entries of d_i*(e) from 1 to 0, and nu can strictly increase.
        // Both declarations stay valid lower bounds; they are just not
        // comparable entrywise.
        assert_eq!(nu(0, 1, 7, &ds(&[5, 5, 5])), 0);
        assert_eq!(nu(0, 1, 7, &ds(&[6, 5, 5])), 1);
        assert_eq!(nu(0, 0, 2, &ds(&[1, 1])), 0);
        assert_eq!(nu(0, 0, 2, &ds(&[2, 1])), 1);
        // mu itself (e >= r) is monotone; spot-check the same data.
        assert!(mu(0, 7, &ds(&[6, 5, 5])) <= mu(0, 7, &ds(&[5, 5, 5])));
    }

    #[test]
    fn affine_table_quadric_cone() {
        let problem = AmbientProblem::affine(4, 3);
        let d = ds(&[2]);
        let t = affine_bound_table(&problem, &d).unwrap();
        let want: &[(i64, i64)] = &[(3, 1), (4, 2), (5, 2), (6, 3)];
        assert_eq!(t.entries.len(), want.len());
        for &(i, b) in want {
            assert_eq!(t.entry(i).unwrap().new_bound, b, "degree {i}");
        }
        assert_eq!((t.min_degree, t.max_degree), (3, 6));
        assert_eq!(t.entry(3).unwrap().source, BoundSource::MaxOfBoth);
        assert_eq!(t.entry(4).unwrap().source, BoundSource::BeyondMiddle);
        // Comparison columns at i = 5: deligne max{0, 5-3} = 2,
        // ax_katz mu_0(4;2) = 1, esnault mu_2(4;2) = 2, question mu_2 = 2.
        let e5 = t.entry(5).unwrap();
        assert_eq!(
            (e5.deligne, e5.ax_katz, e5.esnault_katz, e5.question_mu),
            (2, 1, Some(2), Some(2))
        );
    }

    #[test]
    fn affine_table_det1_5_beyond_closed_form() {
        let problem = AmbientProblem::affine(25, 21);
        let d = ds(&[4, 4, 4, 4, 4]);
        let t = affine_bound_table(&problem, &d).unwrap();
        for j in 0..=21 {
            let want = j + (1 + ceil_div(4 - j, 4)).max(0);
            assert_eq!(t.entry(21 + j).unwrap().new_bound, want, "j = {j}");
        }
    }

    #[test]
    fn affine_table_plane_conic() {
        let problem = AmbientProblem::affine(2, 1);
        let t = affine_bound_table(&problem, &ds(&[2])).unwrap();
        assert_eq!(t.entry(1).unwrap().new_bound, 0);
        assert_eq!(t.entry(2).unwrap().new_bound, 1);
        assert_eq!(t.entries.len(), 2);
    }

    #[test]
    fn rejects_inconsistent_dimension() {
        let problem = AmbientProblem::affine(4, 2);
        assert!(affine_bound_table(&problem, &ds(&[2])).is_err());
        let neg = AmbientProblem::affine(3, -1);
        assert!(affine_bound_table(&neg, &ds(&[2, 2, 2, 2])).is_err());
    }

    #[test]
    fn projective_table_values() {
        let problem = AmbientProblem::projective(4, 3);
        let t = projective_bound_table(&problem, &ds(&[2])).unwrap();
        // Entry at i = 4 is nu_1^(1)(5; [2]) = 1 + ceil((5-1-2)/2) = 2.
        assert_eq!(t.entry(4).unwrap().new_bound, 2);

        let conic = AmbientProblem::projective(2, 1);
        let t = projective_bound_table(&conic, &ds(&[3])).unwrap();
        assert_eq!(t.entry(1).unwrap().new_bound, 0);
    }

    #[test]
    fn projective_shift_identity_small_grid() {
        // 1 + nu_{j-1}^(e)(N; d) = nu_j^(e)(N+1; d) exactly, j >= 1.
        for n in 1..=12 {
            for d in [&[2][..], &[3, 3], &[4, 2, 1]] {
                let d = ds(d);
                for e in -1..=(d.r() as i64 + 1) {
                    for j in 1..=5 {
                        assert_eq!(1 + nu(j - 1, e, n, &d), nu(j, e, n + 1, &d));
                    }
                }
            }
        }
    }

    #[test]
    fn complement_table_quadric_cone() {
        let problem = AmbientProblem::affine(4, 3);
        let t = complement_bound_table(&problem, &ds(&[2])).unwrap();
        let want: &[(i64, i64)] = &[(4, 1), (5, 2), (6, 2), (7, 3), (8, 4)];
        assert_eq!(t.entries.len(), want.len());
        for &(i, b) in want {
            assert_eq!(t.entry(i).unwrap().new_bound, b, "degree {i}");
        }
        assert_eq!(t.entry(8).unwrap().source, BoundSource::TopDegree);
    }

    #[test]
    fn complement_shift_matches_base_entrywise() {
        for (n, dim, degs) in [(4, 3, vec![2]), (5, 3, vec![2, 2, 1]), (6, 4, vec![3, 3])] {
            let problem = AmbientProblem::affine(n, dim);
            let d = ds(&degs);
            let base = affine_bound_table(&problem, &d).unwrap();
            let comp = complement_bound_table(&problem, &d).unwrap();
            for (&i, e) in &base.entries {
                assert_eq!(comp.entry(i + 1).unwrap().new_bound, e.new_bound);
            }
            assert_eq!(comp.entry(2 * n).unwrap().new_bound, n);
        }
    }

    #[test]
    fn polar_requirement_cases() {
        let cone = AmbientProblem::affine(4, 3);
        let pr = polar_requirement(&cone, &ds(&[2])).unwrap();
        assert_eq!((pr.exponent, pr.even_sign), (2, true));

        let det1_4 = AmbientProblem::affine(16, 12);
        let pr = polar_requirement(&det1_4, &ds(&[3, 3, 3, 3])).unwrap();
        assert_eq!(pr.exponent, 2);

        let det2_5 = AmbientProblem::affine(25, 21);
        let pr = polar_requirement(&det2_5, &ds(&[5, 4, 4, 4, 4, 4])).unwrap();
        assert_eq!(pr.exponent, 1);
        // N - r + 1 = 20: even.
        assert!(pr.even_sign);
    }

    #[test]
    fn degenerate_full_dimension_accepted() {
        // n = N is fine as long as r >= N - n = 0; the before-range then
        // spans m in [0, r].
        let problem = AmbientProblem::affine(3, 3);
        let t = affine_bound_table(&problem, &ds(&[2, 2])).unwrap();
        assert_eq!((t.min_degree, t.max_degree), (1, 6));
        assert_eq!(t.entries.len(), 6);
    }
}
