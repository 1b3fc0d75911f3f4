//! Brute-force point counting over GF(q^s) towers.
//!
//! Points are enumerated by an odometer over the field's deterministic
//! element order, variable 0 fastest. The engine fixes the outer
//! variables, specializes each polynomial to a univariate in variable 0,
//! and runs the innermost loop over those; polynomials not involving
//! variable 0 gate the whole block. Work is split into contiguous outer
//! ranges, so the total is a sum of per-range counts and independent of
//! the partition.
//!
//! Three element representations, picked by field size: index tables for
//! q <= 512, raw residues for prime fields, coefficient vectors otherwise.

use crate::bounds::{mu, AmbientProblem, DegreeSequence};
use crate::error::{Error, Result};
use crate::field::{Fq, FqElem};
use crate::multipoly::{self, MultiPoly};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

/// Hard cap for the evaluation-count ceiling; keeps per-range counts in u64.
const CEILING_CAP: u64 = 1 << 62;
/// Largest field handled through full add/mul index tables.
const TABLE_MAX_Q: u64 = 512;

pub const DEFAULT_CEILING: u64 = 1 << 36;

#[derive(Debug, Clone)]
pub struct CountOptions {
    pub workers: Option<usize>,
    /// Maximum number of point evaluations allowed per count.
    pub ceiling: u64,
    pub cache_path: Option<PathBuf>,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            workers: None,
            ceiling: DEFAULT_CEILING,
            cache_path: None,
        }
    }
}

/// A variety given by explicit polynomials with declared degrees.
///
/// Declared degrees may exceed the measured ones. Polynomials and degrees
/// are co-sorted on construction so the declared degrees are
/// non-increasing.
#[derive(Debug, Clone)]
pub struct VarietySpec {
    pub label: String,
    pub ambient_dim: usize,
    pub variables: Vec<String>,
    polys: Vec<MultiPoly>,
    declared: DegreeSequence,
    measured: Vec<i64>,
    pub dim: i64,
    pub projective: bool,
}

impl VarietySpec {
    pub fn new(
        label: impl Into<String>,
        ambient_dim: usize,
        variables: Vec<String>,
        polys: Vec<MultiPoly>,
        declared_degrees: Vec<i64>,
        dim: i64,
        projective: bool,
    ) -> Result<Self> {
        let label = label.into();
        let fail = |msg: String| Error::InvalidVariety {
            label: label.clone(),
            msg,
        };
        let nv = ambient_dim + usize::from(projective);
        if variables.len() != nv {
            return Err(fail(format!(
                "expected {nv} variables for this ambient space, got {}",
                variables.len()
            )));
        }
        if polys.is_empty() {
            return Err(fail("at least one polynomial is required".into()));
        }
        if polys.len() != declared_degrees.len() {
            return Err(fail(format!(
                "{} polynomials but {} declared degrees",
                polys.len(),
                declared_degrees.len()
            )));
        }
        for (k, poly) in polys.iter().enumerate() {
            if poly.num_vars() != nv {
                return Err(fail(format!(
                    "polynomial {k} has {} variables, expected {nv}",
                    poly.num_vars()
                )));
            }
            if projective && !poly.is_homogeneous() {
                return Err(fail(format!(
                    "polynomial {k} is not homogeneous but the variety is projective"
                )));
            }
        }
        // Co-sort polynomials and degrees into non-increasing declared order.
        let mut paired: Vec<(i64, MultiPoly)> = declared_degrees.into_iter().zip(polys).collect();
        paired.sort_by(|a, b| b.0.cmp(&a.0));
        let mut measured = Vec::with_capacity(paired.len());
        for (k, (d, poly)) in paired.iter().enumerate() {
            let m = poly.total_degree() as i64;
            if *d < m {
                return Err(fail(format!(
                    "declared degree {d} of polynomial {k} is below its measured degree {m}"
                )));
            }
            measured.push(m);
        }
        let (degs, polys): (Vec<i64>, Vec<MultiPoly>) = paired.into_iter().unzip();
        let declared = DegreeSequence::new(degs)?;
        let r = declared.r() as i64;
        let n_ambient = ambient_dim as i64;
        if dim < 0 || dim < n_ambient - r || dim > n_ambient {
            return Err(fail(format!(
                "dimension {dim} outside [{}, {n_ambient}]",
                (n_ambient - r).max(0)
            )));
        }
        Ok(VarietySpec {
            label,
            ambient_dim,
            variables,
            polys,
            declared,
            measured,
            dim,
            projective,
        })
    }

    pub fn polys(&self) -> &[MultiPoly] {
        &self.polys
    }

    pub fn degrees(&self) -> &DegreeSequence {
        &self.declared
    }

    pub fn measured_degrees(&self) -> &[i64] {
        &self.measured
    }

    pub fn problem(&self) -> AmbientProblem {
        AmbientProblem {
            ambient_dim: self.ambient_dim as i64,
            dim: self.dim,
            projective: self.projective,
        }
    }

    /// Coordinates per point: `N` affine, `N + 1` projective (cone).
    pub fn num_point_vars(&self) -> usize {
        self.ambient_dim + usize::from(self.projective)
    }

    fn content_json(&self) -> serde_json::Value {
        let polys: Vec<serde_json::Value> = self
            .polys
            .iter()
            .map(|p| p.to_json(&self.variables))
            .collect();
        serde_json::json!({
            "ambient_dim": self.ambient_dim,
            "variables": self.variables,
            "polynomials": polys,
            "declared_degrees": self.declared.degrees(),
            "dimension": self.dim,
            "projective": self.projective,
        })
    }

    /// Hash of everything except the label; the cache key.
    pub fn content_hash(&self) -> String {
        let canonical = self.content_json().to_string();
        let digest = Sha256::digest(canonical.as_bytes());
        hex_string(&digest[..16])
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = self.content_json();
        v["label"] = serde_json::Value::String(self.label.clone());
        v
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let label = value
            .get("label")
            .and_then(|l| l.as_str())
            .unwrap_or("unnamed")
            .to_string();
        let bad = |msg: &str| Error::InvalidVariety {
            label: label.clone(),
            msg: msg.to_string(),
        };
        let ambient_dim = value
            .get("ambient_dim")
            .and_then(|n| n.as_u64())
            .ok_or_else(|| bad("`ambient_dim` must be a positive integer"))?
            as usize;
        let variables: Vec<String> = value
            .get("variables")
            .and_then(|v| v.as_array())
            .ok_or_else(|| bad("`variables` must be an array of names"))?
            .iter()
            .map(|s| {
                s.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| bad("variable names must be strings"))
            })
            .collect::<Result<_>>()?;
        let projective = value
            .get("projective")
            .and_then(|b| b.as_bool())
            .unwrap_or(false);
        let dim = value
            .get("dimension")
            .and_then(|n| n.as_i64())
            .ok_or_else(|| bad("`dimension` must be an integer"))?;
        let declared: Vec<i64> = value
            .get("declared_degrees")
            .and_then(|v| v.as_array())
            .ok_or_else(|| bad("`declared_degrees` must be an array"))?
            .iter()
            .map(|n| n.as_i64().ok_or_else(|| bad("degrees must be integers")))
            .collect::<Result<_>>()?;
        let poly_vals = value
            .get("polynomials")
            .and_then(|v| v.as_array())
            .ok_or_else(|| bad("`polynomials` must be an array"))?;
        let mut polys = Vec::with_capacity(poly_vals.len());
        for pv in poly_vals {
            let poly = match pv {
                serde_json::Value::String(text) => multipoly::parse(text, &variables)?,
                obj @ serde_json::Value::Object(_) => MultiPoly::from_json(obj, variables.len())?,
                _ => return Err(bad("polynomials must be text or term-list objects")),
            };
            polys.push(poly);
        }
        VarietySpec::new(
            label,
            ambient_dim,
            variables,
            polys,
            declared,
            dim,
            projective,
        )
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        Self::from_json(&value)
    }

    /// Reads the same homogeneous equations as a projective variety:
    /// the ambient space and the dimension both drop by one.
    pub fn projectivize(&self) -> Result<VarietySpec> {
        if self.projective {
            return Err(Error::InvalidVariety {
                label: self.label.clone(),
                msg: "already projective".into(),
            });
        }
        VarietySpec::new(
            self.label.clone(),
            self.ambient_dim - 1,
            self.variables.clone(),
            self.polys.clone(),
            self.declared.degrees().to_vec(),
            self.dim - 1,
            true,
        )
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Exact number of common zeros in GF(q)^N.
pub fn count_affine(v: &VarietySpec, field: &Fq, opts: &CountOptions) -> Result<BigUint> {
    if v.projective {
        return Err(Error::InvalidVariety {
            label: v.label.clone(),
            msg: "affine count requested for a projective variety".into(),
        });
    }
    let n = count_zero_set(v.polys(), v.num_point_vars(), field, opts)?;
    Ok(BigUint::from(n))
}

/// Number of projective points: nonzero cone solutions divided by q - 1.
pub fn count_projective(v: &VarietySpec, field: &Fq, opts: &CountOptions) -> Result<BigUint> {
    if !v.projective {
        return Err(Error::InvalidVariety {
            label: v.label.clone(),
            msg: "projective count requested for an affine variety".into(),
        });
    }
    let cone = count_zero_set(v.polys(), v.num_point_vars(), field, opts)?;
    let nonzero = cone - 1; // the origin solves every homogeneous equation
    let q = field
        .q_u64()
        .expect("cone within ceiling implies q fits u64");
    assert_eq!(
        nonzero % (q - 1),
        0,
        "homogeneity guarantees exact division by q - 1"
    );
    Ok(BigUint::from(nonzero / (q - 1)))
}

/// Counts over the tower GF(p^(s_base * s)), s = 1..=steps, through the
/// cache when one is configured.
pub fn count_tower(
    v: &VarietySpec,
    p: u64,
    s_base: u32,
    steps: u32,
    opts: &CountOptions,
) -> Result<PointCountRecord> {
    if s_base < 1 || steps < 1 {
        return Err(Error::InvalidProblem(
            "tower needs s_base >= 1 and at least one step".into(),
        ));
    }
    let hash = v.content_hash();
    let mut cache = match &opts.cache_path {
        Some(path) => Some(CountCache::load(path)?),
        None => None,
    };
    let mut counts = BTreeMap::new();
    let mut moduli = BTreeMap::new();
    for step in 1..=steps {
        let s_total = s_base
            .checked_mul(step)
            .ok_or_else(|| Error::InvalidProblem("extension degree overflow".into()))?;
        let key = format!("{hash}:p{p}:s{s_total}");
        let cached = cache.as_ref().and_then(|c| c.get(&key).cloned());
        let (count, modulus) = match cached {
            Some(entry) => {
                let count = entry
                    .count
                    .parse::<BigUint>()
                    .map_err(|_| Error::Cache(format!("bad cached count for `{key}`")))?;
                let q_s = BigUint::from(p).pow(s_total);
                let max = if v.projective {
                    (q_s.pow(v.ambient_dim as u32 + 1) - 1u32) / (q_s - 1u32)
                } else {
                    q_s.pow(v.ambient_dim as u32)
                };
                if count > max {
                    return Err(Error::Cache(format!(
                        "cached count for `{key}` exceeds the point count of the ambient space"
                    )));
                }
                (count, entry.modulus)
            }
            None => {
                let field = Fq::new(p, s_total)?;
                let count = if v.projective {
                    count_projective(v, &field, opts)?
                } else {
                    count_affine(v, &field, opts)?
                };
                let modulus = field.modulus_string();
                if let Some(c) = cache.as_mut() {
                    c.insert(
                        key,
                        CacheEntry {
                            count: count.to_string(),
                            modulus: modulus.clone(),
                            label: v.label.clone(),
                            created_unix: now_unix(),
                        },
                    )?;
                }
                (count, modulus)
            }
        };
        counts.insert(step, count);
        moduli.insert(step, modulus);
    }
    Ok(PointCountRecord {
        label: v.label.clone(),
        p,
        s_base,
        projective: v.projective,
        counts,
        moduli,
        created_unix: now_unix(),
    })
}

/// A tower of exact point counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointCountRecord {
    pub label: String,
    pub p: u64,
    pub s_base: u32,
    pub projective: bool,
    /// Step `s` maps to the count over GF(p^(s_base * s)).
    pub counts: BTreeMap<u32, BigUint>,
    pub moduli: BTreeMap<u32, String>,
    pub created_unix: u64,
}

impl PointCountRecord {
    /// Longest prefix 1..=S with every count present.
    pub fn contiguous_steps(&self) -> u32 {
        let mut s = 0;
        while self.counts.contains_key(&(s + 1)) {
            s += 1;
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let counts: BTreeMap<String, String> = self
            .counts
            .iter()
            .map(|(s, n)| (s.to_string(), n.to_string()))
            .collect();
        serde_json::json!({
            "label": self.label,
            "p": self.p,
            "s_base": self.s_base,
            "projective": self.projective,
            "counts": counts,
            "moduli": self.moduli,
            "created_unix": self.created_unix,
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let bad = |msg: &str| Error::Cache(format!("point-count record: {msg}"));
        let counts_obj = value
            .get("counts")
            .and_then(|c| c.as_object())
            .ok_or_else(|| bad("missing counts"))?;
        let mut counts = BTreeMap::new();
        for (k, v) in counts_obj {
            let s: u32 = k.parse().map_err(|_| bad("bad step key"))?;
            let n = v
                .as_str()
                .and_then(|s| s.parse::<BigUint>().ok())
                .ok_or_else(|| bad("counts must be decimal strings"))?;
            counts.insert(s, n);
        }
        let mut moduli = BTreeMap::new();
        if let Some(obj) = value.get("moduli").and_then(|m| m.as_object()) {
            for (k, v) in obj {
                let s: u32 = k.parse().map_err(|_| bad("bad step key"))?;
                moduli.insert(s, v.as_str().unwrap_or_default().to_string());
            }
        }
        Ok(PointCountRecord {
            label: value
                .get("label")
                .and_then(|l| l.as_str())
                .unwrap_or("unnamed")
                .to_string(),
            p: value
                .get("p")
                .and_then(|n| n.as_u64())
                .ok_or_else(|| bad("missing p"))?,
            s_base: value.get("s_base").and_then(|n| n.as_u64()).unwrap_or(1) as u32,
            projective: value
                .get("projective")
                .and_then(|b| b.as_bool())
                .unwrap_or(false),
            counts,
            moduli,
            created_unix: value
                .get("created_unix")
                .and_then(|n| n.as_u64())
                .unwrap_or(0),
        })
    }
}

/// `v_p(n)`, or `None` for `n = 0` (infinite valuation).
pub fn valuation(n: &BigUint, p: u64) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let p = BigUint::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = num_integer::div_rem(n.clone(), p.clone());
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AxKatzRow {
    pub s: u32,
    /// `None` when the count is 0 (infinite valuation, passes).
    pub valuation: Option<u64>,
    pub required: u64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxKatzReport {
    pub mu0: i64,
    pub rows: Vec<AxKatzRow>,
    pub pass: bool,
}

impl AxKatzReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serialization")
    }
}

/// Point-count divisibility: each nonzero `N_s` must satisfy
/// `v_p(N_s) >= s * s_base * mu_0(N; d)`.
pub fn ax_katz_check(
    record: &PointCountRecord,
    degrees: &DegreeSequence,
    ambient_dim: usize,
) -> AxKatzReport {
    assert!(
        !record.projective,
        "the divisibility check reads affine counts"
    );
    let mu0 = mu(0, ambient_dim as i64, degrees);
    let mut rows = Vec::new();
    let mut pass = true;
    for (&s, count) in &record.counts {
        let required = (s as u64) * (record.s_base as u64) * (mu0 as u64);
        let val = valuation(count, record.p);
        let ok = val.map_or(true, |v| v >= required);
        pass &= ok;
        rows.push(AxKatzRow {
            s,
            valuation: val,
            required,
            pass: ok,
        });
    }
    AxKatzReport { mu0, rows, pass }
}

/// Advisory only: `log_q(N_s) / s` at the deepest available extension,
/// a rough upper estimate of the dimension. The tool cannot verify the
/// user-supplied dimension.
pub fn dimension_hint(record: &PointCountRecord) -> Option<f64> {
    let (&s, count) = record.counts.iter().rev().find(|(_, c)| !c.is_zero())?;
    let log2_q = (record.p as f64).log2() * record.s_base as f64;
    Some(log2_biguint(count) / (s as f64 * log2_q))
}

fn log2_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 53 {
        (n.to_u64().unwrap() as f64).log2()
    } else {
        let top = (n >> (bits - 53)).to_u64().unwrap() as f64;
        top.log2() + (bits - 53) as f64
    }
}

// ---------------------------------------------------------------------------
// Count cache
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheEntry {
    pub count: String,
    pub modulus: String,
    pub label: String,
    pub created_unix: u64,
}

/// JSON-backed count store keyed by `(variety hash, p, total degree)`.
/// Single writer, any number of readers.
#[derive(Debug)]
pub struct CountCache {
    path: PathBuf,
    entries: BTreeMap<String, CacheEntry>,
}

impl CountCache {
    pub fn load(path: &Path) -> Result<Self> {
        let entries = if path.exists() {
            let text = std::fs::read_to_string(path)?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
            match value.get("entries") {
                Some(e) => serde_json::from_value(e.clone())
                    .map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?,
                None => BTreeMap::new(),
            }
        } else {
            BTreeMap::new()
        };
        Ok(CountCache {
            path: path.to_path_buf(),
            entries,
        })
    }

    pub fn get(&self, key: &str) -> Option<&CacheEntry> {
        self.entries.get(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Inserts and persists immediately, so interrupted towers resume.
    pub fn insert(&mut self, key: String, entry: CacheEntry) -> Result<()> {
        self.entries.insert(key, entry);
        self.save()
    }

    fn save(&self) -> Result<()> {
        let value = serde_json::json!({
            "version": 1,
            "entries": self.entries,
        });
        let tmp = self.path.with_extension("tmp");
        if let Some(parent) = self.path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        std::fs::write(&tmp, serde_json::to_string_pretty(&value)?)?;
        std::fs::rename(&tmp, &self.path)?;
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Evaluation engine
// ---------------------------------------------------------------------------

trait ElemOps: Sync {
    type E: Clone + PartialEq + Send + Sync;
    fn zero(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    /// Multiplicative inverse; the argument must be nonzero.
    fn inv(&self, a: &Self::E) -> Self::E;
    /// Element with the given enumeration index.
    fn nth(&self, idx: u64) -> Self::E;
    /// Enumeration successor, wrapping back to index 0 after the last.
    fn succ(&self, a: &Self::E) -> Self::E;
}

/// q <= 512: elements are enumeration indices, products and sums come
/// from dense tables.
struct TableOps {
    q: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

impl TableOps {
    fn build(field: &Fq) -> Self {
        let q = field.q_u64().unwrap() as usize;
        let elems: Vec<FqElem> = field.enumerate().collect();
        let index_of = |e: &FqElem| field.index_of(e).to_u64().unwrap() as u16;
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        let mut neg = vec![0u16; q];
        let mut inv = vec![0u16; q];
        for (i, a) in elems.iter().enumerate() {
            neg[i] = index_of(&field.neg(a));
            if i > 0 {
                inv[i] = index_of(&field.inv(a).expect("nonzero"));
            }
            for (j, b) in elems.iter().enumerate() {
                add[i * q + j] = index_of(&field.add(a, b));
                mul[i * q + j] = index_of(&field.mul(a, b));
            }
        }
        TableOps {
            q,
            add,
            mul,
            neg,
            inv,
        }
    }
}

impl ElemOps for TableOps {
    type E = u16;

    fn zero(&self) -> u16 {
        0
    }

    fn is_zero(&self, a: &u16) -> bool {
        *a == 0
    }

    fn add(&self, a: &u16, b: &u16) -> u16 {
        self.add[*a as usize * self.q + *b as usize]
    }

    fn mul(&self, a: &u16, b: &u16) -> u16 {
        self.mul[*a as usize * self.q + *b as usize]
    }

    fn neg(&self, a: &u16) -> u16 {
        self.neg[*a as usize]
    }

    fn inv(&self, a: &u16) -> u16 {
        self.inv[*a as usize]
    }

    fn nth(&self, idx: u64) -> u16 {
        idx as u16
    }

    fn succ(&self, a: &u16) -> u16 {
        let next = *a as usize + 1;
        if next == self.q {
            0
        } else {
            next as u16
        }
    }
}

/// Prime fields of any size: elements are residues.
struct PrimeOps {
    p: u64,
}

impl ElemOps for PrimeOps {
    type E = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }

    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn inv(&self, a: &u64) -> u64 {
        // Fermat; p is prime and a nonzero.
        let mut acc = 1u64;
        let mut base = *a;
        let mut e = self.p - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn nth(&self, idx: u64) -> u64 {
        idx
    }

    fn succ(&self, a: &u64) -> u64 {
        let next = a + 1;
        if next == self.p {
            0
        } else {
            next
        }
    }
}

/// Fallback for large extensions: coefficient vectors via [`Fq`].
struct VecOps<'a> {
    field: &'a Fq,
}

impl ElemOps for VecOps<'_> {
    type E = FqElem;

    fn zero(&self) -> FqElem {
        self.field.zero()
    }

    fn is_zero(&self, a: &FqElem) -> bool {
        self.field.is_zero(a)
    }

    fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        self.field.add(a, b)
    }

    fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        self.field.mul(a, b)
    }

    fn neg(&self, a: &FqElem) -> FqElem {
        self.field.neg(a)
    }

    fn inv(&self, a: &FqElem) -> FqElem {
        self.field.inv(a).expect("nonzero")
    }

    fn nth(&self, idx: u64) -> FqElem {
        self.field.element_from_index(idx)
    }

    fn succ(&self, a: &FqElem) -> FqElem {
        let mut next = a.clone();
        for c in next.iter_mut() {
            *c += 1;
            if *c < self.field.p() {
                return next;
            }
            *c = 0;
        }
        next // wrapped to zero
    }
}

struct FlatTerm<E> {
    slot_start: u32,
    slot_len: u32,
    coef: E,
    coef_is_one: bool,
}

/// One coefficient group: a sum of monomials in the outer variables.
/// Exponents are expanded into repeated slots, so evaluation is a plain
/// multiply chain over `slots[start..start+len]`.
struct FlatTerms<E> {
    terms: Vec<FlatTerm<E>>,
    slots: Vec<u32>,
}

impl<E> FlatTerms<E> {
    fn new() -> Self {
        FlatTerms {
            terms: Vec::new(),
            slots: Vec::new(),
        }
    }

    fn min_slot(&self) -> Option<u32> {
        self.slots.iter().copied().min()
    }
}

fn eval_flat<O: ElemOps>(ops: &O, group: &FlatTerms<O::E>, outer: &[O::E]) -> O::E {
    let mut acc = ops.zero();
    for t in &group.terms {
        let s = t.slot_start as usize;
        let l = t.slot_len as usize;
        let v = if l == 0 {
            t.coef.clone()
        } else {
            let mut v = outer[group.slots[s] as usize].clone();
            for &slot in &group.slots[s + 1..s + l] {
                v = ops.mul(&v, &outer[slot as usize]);
            }
            if t.coef_is_one {
                v
            } else {
                ops.mul(&t.coef, &v)
            }
        };
        acc = ops.add(&acc, &v);
    }
    acc
}

/// A polynomial not involving the inner variable. Its value is fixed on
/// blocks of `q^(min_digit + 1)` points; a nonzero value skips the block.
struct GatePoly<E> {
    terms: FlatTerms<E>,
    /// Lowest outer digit the value depends on; `n_outer` when constant.
    min_digit: usize,
}

/// A polynomial involving the inner variable, grouped by its exponent.
struct InnerPoly<E> {
    groups: Vec<FlatTerms<E>>,
    term_count: usize,
}

struct Engine<E> {
    gates: Vec<GatePoly<E>>,
    inner: Vec<InnerPoly<E>>,
    /// Coefficient groups bucketed by the lowest digit they read:
    /// `dirty_buckets[d]` lists `(poly, group)` pairs to recompute when
    /// the odometer carry reaches digit `d`. Groups reading no outer
    /// variable sit in bucket `n_outer` and never go stale.
    dirty_buckets: Vec<Vec<(u32, u32)>>,
    /// Every inner polynomial has degree <= 1 in the inner variable.
    all_linear: bool,
    n_outer: usize,
    q: u64,
}

/// Inner variable: the one shared by the most polynomials, so that
/// polynomials avoiding it become block gates. Outer digit order: the
/// gates' variables go to the high digits, which maximizes the block a
/// nonzero gate value lets the counter skip.
fn choose_order(polys: &[MultiPoly], n_vars: usize) -> (usize, Vec<usize>) {
    let mut usage = vec![0usize; n_vars];
    let mut poly_vars: Vec<Vec<bool>> = Vec::with_capacity(polys.len());
    for poly in polys {
        let mut used = vec![false; n_vars];
        for (exp, _) in poly.terms() {
            for (v, &e) in exp.iter().enumerate() {
                if e > 0 {
                    used[v] = true;
                }
            }
        }
        for (v, &u) in used.iter().enumerate() {
            if u {
                usage[v] += 1;
            }
        }
        poly_vars.push(used);
    }
    let inner = (0..n_vars).max_by_key(|&v| usage[v]).unwrap_or(0);
    let in_gate: Vec<bool> = (0..n_vars)
        .map(|v| poly_vars.iter().any(|used| !used[inner] && used[v]))
        .collect();
    // Low digits first: variables used by no gate, then gate variables.
    let mut outer_order: Vec<usize> = (0..n_vars).filter(|&v| v != inner).collect();
    outer_order.sort_by_key(|&v| (in_gate[v], v));
    (inner, outer_order)
}

fn compile<O: ElemOps>(ops: &O, polys: &[MultiPoly], p: u64, n_vars: usize) -> Engine<O::E> {
    let (inner_var, outer_order) = choose_order(polys, n_vars);
    let n_outer = n_vars - 1;
    let mut digit_of = vec![usize::MAX; n_vars];
    for (digit, &v) in outer_order.iter().enumerate() {
        digit_of[v] = digit;
    }

    let one = ops.nth(1);
    let mut gates: Vec<GatePoly<O::E>> = Vec::new();
    let mut inner: Vec<InnerPoly<O::E>> = Vec::new();
    for poly in polys {
        let reduced = poly.reduced_coeffs_mod(p);
        let mut groups: Vec<FlatTerms<O::E>> = vec![FlatTerms::new()];
        let mut term_count = 0usize;
        for (exp, c) in reduced {
            if c == 0 {
                continue;
            }
            let k = exp[inner_var] as usize;
            if groups.len() <= k {
                groups.resize_with(k + 1, FlatTerms::new);
            }
            let group = &mut groups[k];
            let slot_start = group.slots.len() as u32;
            for (v, &e) in exp.iter().enumerate() {
                if v == inner_var {
                    continue;
                }
                for _ in 0..e {
                    group.slots.push(digit_of[v] as u32);
                }
            }
            let coef = ops.nth(c);
            group.terms.push(FlatTerm {
                slot_start,
                slot_len: group.slots.len() as u32 - slot_start,
                coef_is_one: coef == one,
                coef,
            });
            term_count += 1;
        }
        while groups.len() > 1 && groups.last().unwrap().terms.is_empty() {
            groups.pop();
        }
        if groups.len() == 1 {
            let terms = groups.pop().unwrap();
            let min_digit = terms.min_slot().map_or(n_outer, |s| s as usize);
            gates.push(GatePoly { terms, min_digit });
        } else {
            inner.push(InnerPoly { groups, term_count });
        }
    }
    // Large skips first; among inner polynomials, cheapest first.
    gates.sort_by(|a, b| b.min_digit.cmp(&a.min_digit));
    inner.sort_by_key(|cp| cp.term_count);
    let all_linear = inner.iter().all(|cp| cp.groups.len() == 2);
    let mut dirty_buckets: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n_outer + 1];
    for (pi, cp) in inner.iter().enumerate() {
        for (gi, g) in cp.groups.iter().enumerate() {
            let d = g.min_slot().map_or(n_outer, |s| s as usize);
            dirty_buckets[d].push((pi as u32, gi as u32));
        }
    }
    Engine {
        gates,
        inner,
        dirty_buckets,
        all_linear,
        n_outer,
        q: 0, // set by the caller
    }
}

fn decode_outer<O: ElemOps>(ops: &O, q: u64, mut idx: u64, digits: &mut [u64], outer: &mut [O::E]) {
    for (d, e) in digits.iter_mut().zip(outer.iter_mut()) {
        *d = idx % q;
        *e = ops.nth(*d);
        idx /= q;
    }
}

/// Number of inner-variable values solving the linearized system
/// `a_i x + b_i = 0`, given `bufs[i] = [b_i, a_i]`.
fn count_linear_block<O: ElemOps>(ops: &O, bufs: &[Vec<O::E>], q: u64) -> u64 {
    let mut forced: Option<O::E> = None;
    for buf in bufs {
        let b = &buf[0];
        let a = &buf[1];
        if ops.is_zero(a) {
            if ops.is_zero(b) {
                continue;
            }
            return 0;
        }
        let x = ops.mul(&ops.neg(b), &ops.inv(a));
        match &forced {
            None => forced = Some(x),
            Some(y) => {
                if *y != x {
                    return 0;
                }
            }
        }
    }
    if forced.is_some() {
        1
    } else {
        q
    }
}

fn count_outer_range<O: ElemOps>(ops: &O, engine: &Engine<O::E>, start: u64, end: u64) -> u64 {
    let q = engine.q;
    let n_outer = engine.n_outer;
    let mut digits = vec![0u64; n_outer];
    let mut outer: Vec<O::E> = vec![ops.zero(); n_outer];
    let mut gate_vals: Vec<O::E> = vec![ops.zero(); engine.gates.len()];
    let mut coeff_bufs: Vec<Vec<O::E>> = engine
        .inner
        .iter()
        .map(|cp| vec![ops.zero(); cp.groups.len()])
        .collect();

    let refresh_all = |outer: &[O::E], gate_vals: &mut [O::E], bufs: &mut [Vec<O::E>]| {
        for (val, g) in gate_vals.iter_mut().zip(&engine.gates) {
            *val = eval_flat(ops, &g.terms, outer);
        }
        for (buf, cp) in bufs.iter_mut().zip(&engine.inner) {
            for (slot, g) in buf.iter_mut().zip(&cp.groups) {
                *slot = eval_flat(ops, g, outer);
            }
        }
    };

    decode_outer(ops, q, start, &mut digits, &mut outer);
    refresh_all(&outer, &mut gate_vals, &mut coeff_bufs);

    let mut total = 0u64;
    let mut o = start;
    while o < end {
        // Gates are sorted by descending min_digit, so the first nonzero
        // one yields the largest skip.
        let failed = engine
            .gates
            .iter()
            .zip(&gate_vals)
            .find(|(_, v)| !ops.is_zero(v));
        if let Some((gate, _)) = failed {
            let next = if gate.min_digit >= n_outer {
                end
            } else {
                let block = q.pow(gate.min_digit as u32);
                ((o / block + 1) * block).min(end)
            };
            o = next;
            if o < end {
                decode_outer(ops, q, o, &mut digits, &mut outer);
                refresh_all(&outer, &mut gate_vals, &mut coeff_bufs);
            }
            continue;
        }

        if engine.inner.is_empty() {
            total += q;
        } else if engine.all_linear {
            total += count_linear_block(ops, &coeff_bufs, q);
        } else {
            let mut x = ops.nth(0);
            for i in 0..q {
                if i > 0 {
                    x = ops.succ(&x);
                }
                let all_zero = coeff_bufs.iter().all(|coeffs| {
                    let mut v = coeffs.last().unwrap().clone();
                    for c in coeffs[..coeffs.len() - 1].iter().rev() {
                        v = ops.add(&ops.mul(&v, &x), c);
                    }
                    ops.is_zero(&v)
                });
                if all_zero {
                    total += 1;
                }
            }
        }

        o += 1;
        if o < end {
            let mut carry = 0usize;
            loop {
                digits[carry] += 1;
                outer[carry] = ops.succ(&outer[carry]);
                if digits[carry] < q {
                    break;
                }
                digits[carry] = 0;
                carry += 1;
            }
            for (val, g) in gate_vals.iter_mut().zip(&engine.gates) {
                if g.min_digit <= carry {
                    *val = eval_flat(ops, &g.terms, &outer);
                }
            }
            for bucket in &engine.dirty_buckets[..=carry.min(n_outer)] {
                for &(pi, gi) in bucket {
                    coeff_bufs[pi as usize][gi as usize] =
                        eval_flat(ops, &engine.inner[pi as usize].groups[gi as usize], &outer);
                }
            }
        }
    }
    total
}

fn count_with<O: ElemOps>(
    ops: &O,
    polys: &[MultiPoly],
    p: u64,
    n_vars: usize,
    q: u64,
    workers: Option<usize>,
) -> u64 {
    use rayon::prelude::*;

    let mut engine = compile(ops, polys, p, n_vars);
    engine.q = q;
    let n_outer = n_vars - 1;
    let outer_total: u64 = q.checked_pow(n_outer as u32).expect("guarded by ceiling");

    let threads = workers.unwrap_or_else(rayon::current_num_threads).max(1);
    let n_chunks = ((threads as u64) * 16).min(outer_total).max(1);
    let chunk = outer_total.div_ceil(n_chunks);
    let ranges: Vec<(u64, u64)> = (0..n_chunks)
        .map(|i| (i * chunk, ((i + 1) * chunk).min(outer_total)))
        .filter(|(a, b)| a < b)
        .collect();

    let run = || {
        ranges
            .par_iter()
            .map(|&(a, b)| count_outer_range(ops, &engine, a, b))
            .sum::<u64>()
    };
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    }
}

fn count_zero_set(
    polys: &[MultiPoly],
    n_vars: usize,
    field: &Fq,
    opts: &CountOptions,
) -> Result<u64> {
    let ceiling = opts.ceiling.min(CEILING_CAP);
    let total_big = field.q().pow(n_vars as u32);
    if total_big > BigUint::from(ceiling) {
        return Err(Error::SizeLimit {
            evaluations: total_big.to_string(),
            ceiling,
        });
    }
    let q = field.q_u64().expect("within ceiling");
    let p = field.p();
    let count = if q <= TABLE_MAX_Q {
        count_with(&TableOps::build(field), polys, p, n_vars, q, opts.workers)
    } else if field.s() == 1 {
        count_with(&PrimeOps { p }, polys, p, n_vars, q, opts.workers)
    } else {
        count_with(&VecOps { field }, polys, p, n_vars, q, opts.workers)
    };
    Ok(count)
}
