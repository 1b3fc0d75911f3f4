//! Sparse multivariate polynomials over the integers.
//!
//! Exponent vectors are stored densely (one entry per variable); ambient
//! dimensions stay small here, and the counting loop wants predictable
//! layout. Terms are kept in a canonical order (total degree descending,
//! then exponents lexicographically descending) with no zero coefficients
//! and no duplicate exponent vectors.

use crate::error::{Error, Result};
use crate::field::{Fq, FqElem};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    num_vars: usize,
    terms: Vec<(Vec<u32>, BigInt)>,
}

fn term_order(a: &[u32], b: &[u32]) -> Ordering {
    let ta: u64 = a.iter().map(|&e| e as u64).sum();
    let tb: u64 = b.iter().map(|&e| e as u64).sum();
    tb.cmp(&ta).then_with(|| b.cmp(a)).reverse().reverse()
}

impl MultiPoly {
    pub fn new(num_vars: usize, raw_terms: Vec<(Vec<u32>, BigInt)>) -> Self {
        let mut terms = raw_terms;
        for (exp, _) in &terms {
            assert_eq!(exp.len(), num_vars, "exponent vector length mismatch");
        }
        terms.sort_by(|a, b| term_order(&a.0, &b.0));
        let mut merged: Vec<(Vec<u32>, BigInt)> = Vec::with_capacity(terms.len());
        for (exp, coef) in terms {
            match merged.last_mut() {
                Some((last_exp, last_coef)) if *last_exp == exp => *last_coef += coef,
                _ => merged.push((exp, coef)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        MultiPoly {
            num_vars,
            terms: merged,
        }
    }

    pub fn zero(num_vars: usize) -> Self {
        MultiPoly {
            num_vars,
            terms: Vec::new(),
        }
    }

    pub fn constant(num_vars: usize, c: BigInt) -> Self {
        Self::new(num_vars, vec![(vec![0; num_vars], c)])
    }

    pub fn variable(num_vars: usize, i: usize) -> Self {
        assert!(i < num_vars);
        let mut exp = vec![0; num_vars];
        exp[i] = 1;
        Self::new(num_vars, vec![(exp, BigInt::one())])
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> &[(Vec<u32>, BigInt)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum term degree; the zero polynomial reports 0 (check
    /// [`MultiPoly::is_zero`] to tell it apart from a nonzero constant).
    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(exp, _)| exp.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// True when every term has the same total degree (vacuously for 0).
    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.iter().map(|(exp, _)| exp.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d0) => degs.all(|d| d == d0),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.num_vars, other.num_vars);
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::new(self.num_vars, terms)
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.num_vars, other.num_vars);
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                terms.push((exp, ca * cb));
            }
        }
        Self::new(self.num_vars, terms)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.num_vars, BigInt::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact evaluation at a point with coordinates in `field`.
    ///
    /// Integer coefficients are reduced into the prime subfield first.
    /// Powers are taken from one ladder per variable, built once per call.
    pub fn evaluate(&self, point: &[FqElem], field: &Fq) -> Result<FqElem> {
        if point.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                want: self.num_vars,
                got: point.len(),
            });
        }
        let mut max_exp = vec![0u32; self.num_vars];
        for (exp, _) in &self.terms {
            for (v, &e) in exp.iter().enumerate() {
                max_exp[v] = max_exp[v].max(e);
            }
        }
        let ladders: Vec<Vec<FqElem>> = (0..self.num_vars)
            .map(|v| {
                let mut ladder = Vec::with_capacity(max_exp[v] as usize + 1);
                ladder.push(field.one());
                for k in 1..=max_exp[v] as usize {
                    let prev = ladder[k - 1].clone();
                    ladder.push(field.mul(&prev, &point[v]));
                }
                ladder
            })
            .collect();
        let mut acc = field.zero();
        for (exp, coef) in &self.terms {
            let mut term = field.from_integer(coef);
            for (v, &e) in exp.iter().enumerate() {
                if e > 0 {
                    term = field.mul(&term, &ladders[v][e as usize]);
                }
            }
            acc = field.add(&acc, &term);
        }
        Ok(acc)
    }

    /// Canonical text form, parseable by [`parse`].
    pub fn to_text(&self, vars: &[String]) -> String {
        assert_eq!(vars.len(), self.num_vars);
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (exp, coef)) in self.terms.iter().enumerate() {
            let mag = coef.abs();
            if idx == 0 {
                if coef.is_negative() {
                    out.push('-');
                }
            } else if coef.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || exp.iter().all(|&e| e == 0) {
                factors.push(mag.to_string());
            }
            for (v, &e) in exp.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(vars[v].clone()),
                    _ => factors.push(format!("{}^{}", vars[v], e)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    /// Canonical JSON term-list form:
    /// `{"vars": [...], "terms": [{"exp": [...], "coef": "decimal"}]}`.
    pub fn to_json(&self, vars: &[String]) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(exp, coef)| {
                serde_json::json!({
                    "exp": exp,
                    "coef": coef.to_string(),
                })
            })
            .collect();
        serde_json::json!({ "vars": vars, "terms": terms })
    }

    pub fn from_json(value: &serde_json::Value, num_vars: usize) -> Result<Self> {
        let terms_val = value
            .get("terms")
            .and_then(|t| t.as_array())
            .ok_or_else(|| Error::Parse {
                pos: 0,
                msg: "term-list polynomial needs a `terms` array".into(),
            })?;
        let mut terms = Vec::with_capacity(terms_val.len());
        for t in terms_val {
            let exp: Vec<u32> = t
                .get("exp")
                .and_then(|e| e.as_array())
                .ok_or_else(|| Error::Parse {
                    pos: 0,
                    msg: "term needs an `exp` array".into(),
                })?
                .iter()
                .map(|v| {
                    v.as_u64().map(|x| x as u32).ok_or_else(|| Error::Parse {
                        pos: 0,
                        msg: "exponents must be nonnegative integers".into(),
                    })
                })
                .collect::<Result<_>>()?;
            if exp.len() != num_vars {
                return Err(Error::DimensionMismatch {
                    want: num_vars,
                    got: exp.len(),
                });
            }
            let coef_str = t
                .get("coef")
                .and_then(|c| c.as_str())
                .ok_or_else(|| Error::Parse {
                    pos: 0,
                    msg: "term needs a decimal string `coef`".into(),
                })?;
            let coef = coef_str.parse::<BigInt>().map_err(|_| Error::Parse {
                pos: 0,
                msg: format!("bad coefficient `{coef_str}`"),
            })?;
            terms.push((exp, coef));
        }
        Ok(Self::new(num_vars, terms))
    }

    /// Coefficients reduced into `[0, p)`.
    pub fn reduced_coeffs_mod(&self, p: u64) -> Vec<(Vec<u32>, u64)> {
        let modulus = BigInt::from(p);
        self.terms
            .iter()
            .map(|(exp, coef)| {
                let c = coef.mod_floor(&modulus);
                let digits = c.to_u64_digits().1;
                (exp.clone(), digits.first().copied().unwrap_or(0))
            })
            .collect()
    }
}

/// Parses `+ - * ^`, integer literals, parentheses and the listed
/// variable names. Exponents must be nonnegative integer literals.
pub fn parse(text: &str, vars: &[String]) -> Result<MultiPoly> {
    Parser {
        bytes: text.as_bytes(),
        pos: 0,
        vars,
    }
    .parse_all()
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn parse_all(&mut self) -> Result<MultiPoly> {
        let p = self.expr()?;
        self.skip_ws();
        if self.pos != self.bytes.len() {
            return Err(self.err("trailing input"));
        }
        Ok(p)
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut negate = false;
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                negate = true;
            }
            Some(b'+') => {
                self.pos += 1;
            }
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = acc.mul(&f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.natural()?;
            let e = u32::try_from(e).map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.natural_big()?;
                Ok(MultiPoly::constant(self.vars.len(), n))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.bytes.len()
                    && (self.bytes[self.pos].is_ascii_alphanumeric()
                        || self.bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                match self.vars.iter().position(|v| v == name) {
                    Some(i) => Ok(MultiPoly::variable(self.vars.len(), i)),
                    None => Err(Error::UnknownVariable(name.to_string())),
                }
            }
            _ => Err(self.err("expected a number, variable or `(`")),
        }
    }

    fn natural(&mut self) -> Result<u64> {
        let n = self.natural_big()?;
        u64::try_from(n).map_err(|_| self.err("integer too large"))
    }

    fn natural_big(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        Ok(s.parse::<BigInt>().unwrap())
    }
}
