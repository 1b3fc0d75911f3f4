//! Built-in example varieties.
//!
//! The two determinantal families carry closed-form bound tables used as
//! regression targets; the small fixtures (quadric cone, coordinate
//! union, Fermat cubic) are cheap enough to count and carry known zeta
//! functions where available.

use crate::bounds::{ceil_div, AmbientProblem, DegreeSequence};
use crate::counting::VarietySpec;
use crate::error::{Error, Result};
use crate::multipoly::MultiPoly;
use crate::IntPoly;
use num_bigint::{BigInt, BigUint};
use num_traits::One;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleKind {
    /// All principal (e-1)-minors of a generic e x e matrix vanish:
    /// e equations of degree e-1 in e^2 variables, dimension e^2 - 4.
    Det1(usize),
    /// Det1 plus the full determinant: e+1 equations of degrees
    /// (e, e-1, ..., e-1), still dimension e^2 - 4.
    Det2(usize),
    /// x1*x2 = x3*x4 in A^4.
    QuadricCone,
    /// x1 * ... * xk = 0 in A^N.
    CoordinateUnion { ambient: usize, factors: usize },
    /// x1^d + ... + xN^d = 0 in A^N.
    Fermat { ambient: usize, degree: u32 },
}

#[derive(Debug, Clone)]
pub struct ExampleDescriptor {
    pub kind: ExampleKind,
    pub label: String,
    pub ambient_dim: usize,
    pub dim: i64,
    pub declared_degrees: Vec<i64>,
    /// Interpretation notes recorded with generated varieties.
    pub notes: Vec<String>,
}

impl ExampleDescriptor {
    pub fn problem(&self) -> AmbientProblem {
        AmbientProblem::affine(self.ambient_dim as i64, self.dim)
    }

    /// The same equations read as a projective variety: the ambient
    /// space loses a dimension and so does the variety. All built-in
    /// examples are homogeneous.
    pub fn projectivized_problem(&self) -> Result<AmbientProblem> {
        if self.dim < 1 {
            return Err(Error::InvalidProblem(
                "cannot projectivize a zero-dimensional cone".into(),
            ));
        }
        Ok(AmbientProblem::projective(
            self.ambient_dim as i64 - 1,
            self.dim - 1,
        ))
    }

    pub fn degrees(&self) -> DegreeSequence {
        DegreeSequence::new(self.declared_degrees.clone()).expect("descriptor degrees")
    }

    /// Expands the defining polynomials. For the determinantal families
    /// this is factorially large in `e`; bound tables do not need it.
    pub fn variety(&self) -> VarietySpec {
        let (vars, polys) = match self.kind {
            ExampleKind::Det1(e) => {
                let vars = matrix_vars(e);
                let polys = (0..e).map(|d| principal_minor(e, d)).collect();
                (vars, polys)
            }
            ExampleKind::Det2(e) => {
                let vars = matrix_vars(e);
                let mut polys: Vec<MultiPoly> = (0..e).map(|d| principal_minor(e, d)).collect();
                polys.push(generic_det(e));
                (vars, polys)
            }
            ExampleKind::QuadricCone => {
                let vars: Vec<String> = (1..=4).map(|i| format!("x{i}")).collect();
                let p = crate::multipoly::parse("x1*x2 - x3*x4", &vars).unwrap();
                (vars, vec![p])
            }
            ExampleKind::CoordinateUnion { ambient, factors } => {
                let vars: Vec<String> = (1..=ambient).map(|i| format!("x{i}")).collect();
                let text = (1..=factors)
                    .map(|i| format!("x{i}"))
                    .collect::<Vec<_>>()
                    .join("*");
                let p = crate::multipoly::parse(&text, &vars).unwrap();
                (vars, vec![p])
            }
            ExampleKind::Fermat { ambient, degree } => {
                let vars: Vec<String> = (1..=ambient).map(|i| format!("x{i}")).collect();
                let text = (1..=ambient)
                    .map(|i| format!("x{i}^{degree}"))
                    .collect::<Vec<_>>()
                    .join(" + ");
                let p = crate::multipoly::parse(&text, &vars).unwrap();
                (vars, vec![p])
            }
        };
        VarietySpec::new(
            self.label.clone(),
            self.ambient_dim,
            vars,
            polys,
            self.declared_degrees.clone(),
            self.dim,
            false,
        )
        .expect("generated example must validate")
    }

    /// Closed-form bound for `H^{N-r+m}_c`, when this family has one.
    pub fn expected_before_middle(&self, m: i64) -> Option<i64> {
        match self.kind {
            ExampleKind::Det1(e) => {
                let e = e as i64;
                (0..=e - 4).contains(&m).then(|| {
                    // ceil(m + 1 - (m-1)/(e-1))
                    ceil_div((m + 1) * (e - 1) - (m - 1), e - 1)
                })
            }
            ExampleKind::Det2(e) => {
                let e = e as i64;
                (0..=e - 3).contains(&m).then(|| ceil_div((e - 1) * m, e))
            }
            _ => None,
        }
    }

    /// Closed-form bound for `H^{n+j}_c`, when this family has one.
    pub fn expected_beyond_middle(&self, j: i64) -> Option<i64> {
        match self.kind {
            ExampleKind::Det1(e) => {
                let e = e as i64;
                Some(j + (e - 4 + ceil_div(4 - j, e - 1)).max(0))
            }
            ExampleKind::Det2(e) => {
                let e = e as i64;
                Some(j + (e - 4 + ceil_div(3 - j, e)).max(0))
            }
            _ => None,
        }
    }

    /// Reduced zeta function over GF(q) as (numerator, denominator),
    /// for fixtures where it is known exactly.
    pub fn expected_zeta(&self, q: u64) -> Option<(IntPoly, IntPoly)> {
        let q = BigInt::from(q);
        match self.kind {
            ExampleKind::QuadricCone => {
                // (1 - qt) / ((1 - q^2 t)(1 - q^3 t))
                let q2 = &q * &q;
                let q3 = &q2 * &q;
                let num = IntPoly::from_coeffs(vec![BigInt::one(), -q.clone()]);
                let den = IntPoly::from_coeffs(vec![BigInt::one(), -(&q2 + &q3), q2 * q3]);
                Some((num, den))
            }
            ExampleKind::CoordinateUnion {
                ambient: 2,
                factors: 2,
            } => {
                // (1 - t) / (1 - qt)^2
                let num = IntPoly::from_coeffs(vec![BigInt::one(), -BigInt::one()]);
                let den = IntPoly::from_coeffs(vec![BigInt::one(), -BigInt::from(2) * &q, &q * &q]);
                Some((num, den))
            }
            _ => None,
        }
    }

    /// Exact point count over GF(p^s_total) where a closed form exists.
    pub fn closed_form_count(&self, p: u64, s_total: u32) -> Option<BigUint> {
        let q = BigUint::from(p).pow(s_total);
        match self.kind {
            ExampleKind::QuadricCone => Some(q.pow(3) + q.pow(2) - q),
            ExampleKind::CoordinateUnion { ambient, factors } => {
                let n = ambient as u32;
                let k = factors as u32;
                let qm1 = &q - 1u32;
                Some(q.pow(n) - q.pow(n - k) * qm1.pow(k))
            }
            _ => None,
        }
    }
}

fn matrix_vars(e: usize) -> Vec<String> {
    let mut vars = Vec::with_capacity(e * e);
    for i in 1..=e {
        for j in 1..=e {
            vars.push(format!("x{i}_{j}"));
        }
    }
    vars
}

/// Heap's algorithm; each swap flips the sign passed to the callback.
fn for_each_permutation(k: usize, mut visit: impl FnMut(&[usize], i64)) {
    let mut perm: Vec<usize> = (0..k).collect();
    let mut counters = vec![0usize; k];
    let mut sign = 1i64;
    visit(&perm, sign);
    let mut i = 0;
    while i < k {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            sign = -sign;
            visit(&perm, sign);
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
}

/// Determinant of the generic matrix restricted to the given rows and
/// columns, expanded into sparse form.
fn det_of_submatrix(e: usize, rows: &[usize], cols: &[usize]) -> MultiPoly {
    assert_eq!(rows.len(), cols.len());
    let k = rows.len();
    let nv = e * e;
    let mut terms: Vec<(Vec<u32>, BigInt)> = Vec::new();
    for_each_permutation(k, |perm, sign| {
        let mut exp = vec![0u32; nv];
        for (r, &pc) in perm.iter().enumerate() {
            exp[rows[r] * e + cols[pc]] += 1;
        }
        terms.push((exp, BigInt::from(sign)));
    });
    MultiPoly::new(nv, terms)
}

/// Minor obtained by deleting row `d` and column `d`.
fn principal_minor(e: usize, d: usize) -> MultiPoly {
    let keep: Vec<usize> = (0..e).filter(|&i| i != d).collect();
    det_of_submatrix(e, &keep, &keep)
}

fn generic_det(e: usize) -> MultiPoly {
    let all: Vec<usize> = (0..e).collect();
    det_of_submatrix(e, &all, &all)
}

const MINOR_NOTE: &str =
    "principal (e-1)-minors are read as: delete row i and column i, for i = 1..e";

pub fn det1(e: usize) -> Result<ExampleDescriptor> {
    if e < 4 {
        return Err(Error::InvalidProblem(format!("det1 needs e >= 4, got {e}")));
    }
    Ok(ExampleDescriptor {
        kind: ExampleKind::Det1(e),
        label: format!("det1:{e}"),
        ambient_dim: e * e,
        dim: (e * e) as i64 - 4,
        declared_degrees: vec![(e - 1) as i64; e],
        notes: vec![MINOR_NOTE.to_string()],
    })
}

pub fn det2(e: usize) -> Result<ExampleDescriptor> {
    if e < 4 {
        return Err(Error::InvalidProblem(format!("det2 needs e >= 4, got {e}")));
    }
    let mut degrees = vec![(e - 1) as i64; e];
    degrees.push(e as i64);
    Ok(ExampleDescriptor {
        kind: ExampleKind::Det2(e),
        label: format!("det2:{e}"),
        ambient_dim: e * e,
        dim: (e * e) as i64 - 4,
        declared_degrees: degrees,
        notes: vec![MINOR_NOTE.to_string()],
    })
}

pub fn quadric_cone() -> ExampleDescriptor {
    ExampleDescriptor {
        kind: ExampleKind::QuadricCone,
        label: "quadric-cone".into(),
        ambient_dim: 4,
        dim: 3,
        declared_degrees: vec![2],
        notes: Vec::new(),
    }
}

pub fn coordinate_union(ambient: usize, factors: usize) -> Result<ExampleDescriptor> {
    if factors < 1 || factors > ambient {
        return Err(Error::InvalidProblem(format!(
            "coordinate union needs 1 <= k <= N, got k = {factors}, N = {ambient}"
        )));
    }
    Ok(ExampleDescriptor {
        kind: ExampleKind::CoordinateUnion { ambient, factors },
        label: format!("coordunion:{ambient}:{factors}"),
        ambient_dim: ambient,
        dim: ambient as i64 - 1,
        declared_degrees: vec![factors as i64],
        notes: Vec::new(),
    })
}

pub fn fermat(ambient: usize, degree: u32) -> Result<ExampleDescriptor> {
    if ambient < 1 || degree < 1 {
        return Err(Error::InvalidProblem(
            "fermat needs N >= 1 and d >= 1".into(),
        ));
    }
    Ok(ExampleDescriptor {
        kind: ExampleKind::Fermat { ambient, degree },
        label: format!("fermat:{ambient}:{degree}"),
        ambient_dim: ambient,
        dim: ambient as i64 - 1,
        declared_degrees: vec![degree as i64],
        notes: Vec::new(),
    })
}

/// The desk-scale corpus used by the verification tests.
pub fn fixture_corpus() -> Vec<ExampleDescriptor> {
    vec![
        quadric_cone(),
        coordinate_union(2, 2).unwrap(),
        fermat(3, 3).unwrap(),
    ]
}

/// Resolves names like `det1:5`, `cone`, `coordunion`, `fermat:3:3`.
pub fn by_name(name: &str) -> Result<ExampleDescriptor> {
    let parts: Vec<&str> = name.split(':').collect();
    let bad = || Error::BadExampleName(name.to_string());
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    match parts.as_slice() {
        ["det1", e] => det1(num(e)?),
        ["det2", e] => det2(num(e)?),
        ["cone"] | ["quadric-cone"] | ["quadriccone"] => Ok(quadric_cone()),
        ["coordunion"] => coordinate_union(2, 2),
        ["coordunion", n, k] => coordinate_union(num(n)?, num(k)?),
        ["fermat", n, d] => fermat(num(n)?, num(d)? as u32),
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::affine_bound_table;

    #[test]
    fn det1_4_shape() {
        let d = det1(4).unwrap();
        assert_eq!(d.ambient_dim, 16);
        assert_eq!(d.dim, 12);
        let v = d.variety();
        assert_eq!(v.polys().len(), 4);
        for p in v.polys() {
            assert_eq!(p.terms().len(), 6);
            assert_eq!(p.total_degree(), 3);
            assert!(p.is_homogeneous());
        }
        assert!(det1(3).is_err());
    }

    #[test]
    fn det2_shape_and_sorting() {
        let d = det2(4).unwrap();
        let v = d.variety();
        assert_eq!(v.polys().len(), 5);
        assert_eq!(v.degrees().degrees(), &[4, 3, 3, 3, 3]);
        // The degree-4 determinant sorted to the front.
        assert_eq!(v.polys()[0].total_degree(), 4);
        assert_eq!(v.polys()[0].terms().len(), 24);
        assert!(v.polys()[0].is_homogeneous());
    }

    #[test]
    fn determinant_expansion_is_correct_for_small_sizes() {
        // 2x2: x11 x22 - x12 x21.
        let d = det_of_submatrix(2, &[0, 1], &[0, 1]);
        assert_eq!(d.terms().len(), 2);
        assert_eq!(d.total_degree(), 2);
        // 3x3 determinant has 6 terms, half with each sign.
        let d3 = generic_det(3);
        assert_eq!(d3.terms().len(), 6);
        let pos = d3
            .terms()
            .iter()
            .filter(|(_, c)| c > &BigInt::from(0))
            .count();
        assert_eq!(pos, 3);
    }

    #[test]
    fn det1_5_closed_forms() {
        let d = det1(5).unwrap();
        // Before the middle: 2 at m = 0, then m + 1.
        assert_eq!(d.expected_before_middle(0), Some(2));
        assert_eq!(d.expected_before_middle(1), Some(2));
        assert_eq!(d.expected_before_middle(2), None); // e - 4 = 1
                                                       // Beyond: j + e - 3 for 0 <= j <= 3, then j + e - 4 up to e + 2.
        for j in 0..=3 {
            assert_eq!(d.expected_beyond_middle(j), Some(j + 2));
        }
        for j in 4..=7 {
            assert_eq!(d.expected_beyond_middle(j), Some(j + 1));
        }
    }

    #[test]
    fn det2_5_closed_forms() {
        let d = det2(5).unwrap();
        assert_eq!(d.expected_before_middle(0), Some(0));
        assert_eq!(d.expected_before_middle(1), Some(1));
        assert_eq!(d.expected_before_middle(2), Some(2));
        assert_eq!(d.expected_before_middle(3), None); // e - 3 = 2
        for j in 0..=2 {
            assert_eq!(d.expected_beyond_middle(j), Some(j + 2));
        }
        assert_eq!(d.expected_beyond_middle(3), Some(3 + 1));
    }

    #[test]
    fn bound_tables_match_closed_forms_for_det1_4() {
        let d = det1(4).unwrap();
        let table = affine_bound_table(&d.problem(), &d.degrees()).unwrap();
        // Complete intersection: before-range is the single m = 0.
        assert_eq!(table.entry(12).unwrap().new_bound, 2);
        assert_eq!(d.expected_before_middle(0), Some(2));
        for j in 0..=12 {
            let want = d.expected_beyond_middle(j).unwrap();
            assert_eq!(table.entry(12 + j).unwrap().new_bound, want, "j = {j}");
        }
    }

    #[test]
    fn corpus_validates_and_has_expected_forms() {
        let corpus = fixture_corpus();
        assert_eq!(corpus.len(), 3);
        for d in &corpus {
            let v = d.variety();
            assert_eq!(v.label, d.label);
        }
        let cone = &corpus[0];
        let (num, den) = cone.expected_zeta(2).unwrap();
        assert_eq!(num.coeff_strings(), vec!["1", "-2"]);
        assert_eq!(den.coeff_strings(), vec!["1", "-12", "32"]);
        assert_eq!(cone.closed_form_count(2, 1), Some(BigUint::from(10u32)));
        let union = &corpus[1];
        assert_eq!(union.closed_form_count(3, 1), Some(BigUint::from(5u32)));
    }

    #[test]
    fn name_resolution() {
        assert_eq!(by_name("det1:5").unwrap().ambient_dim, 25);
        assert_eq!(by_name("cone").unwrap().label, "quadric-cone");
        assert_eq!(by_name("coordunion").unwrap().ambient_dim, 2);
        assert_eq!(by_name("fermat:3:3").unwrap().dim, 2);
        assert!(by_name("det1").is_err());
        assert!(by_name("nope:1").is_err());
    }

    #[test]
    fn projectivization() {
        let cone = quadric_cone();
        let p = cone.projectivized_problem().unwrap();
        assert_eq!((p.ambient_dim, p.dim, p.projective), (3, 2, true));
    }
}
