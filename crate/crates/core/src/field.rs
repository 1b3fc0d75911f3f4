//! GF(p) and GF(p^s) with a deterministic modulus choice.
//!
//! Elements are coefficient vectors over GF(p) of length `s`. The modulus
//! of GF(p^s) is the lexicographically smallest monic irreducible of
//! degree `s` (constant coefficient compared first), so the same `(p, s)`
//! always produces the same field, with no table dependency. Embeddings
//! between different extensions are deliberately not provided; each
//! extension is used on its own.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

pub type FqElem = Vec<u64>;

/// Deterministic Miller-Rabin, valid far beyond the `p < 2^31` range
/// accepted by [`Fq::new`].
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // p prime, a != 0 mod p.
    pow_mod(a, p - 2, p)
}

/// Polynomials over GF(p) as trimmed ascending coefficient vectors.
mod fp_poly {
    use super::{inv_mod, mul_mod};

    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn deg(v: &[u64]) -> Option<usize> {
        v.len().checked_sub(1)
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
            }
        }
        trim(&mut out);
        out
    }

    /// Remainder of `a` modulo a monic `m`.
    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        debug_assert_eq!(*m.last().unwrap(), 1, "modulus must be monic");
        let dm = m.len() - 1;
        let mut r = a.to_vec();
        trim(&mut r);
        while r.len() > dm {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - dm;
            if lead != 0 {
                for (k, &mk) in m.iter().enumerate() {
                    let idx = k + shift;
                    let sub = mul_mod(lead, mk, p);
                    r[idx] = (r[idx] + p - sub % p) % p;
                }
            }
            trim(&mut r);
            if r.len() <= dm {
                break;
            }
        }
        r
    }

    pub fn mul_rem(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn pow_rem(base: &[u64], mut exp: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = rem(base, m, p);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul_rem(&acc, &b, m, p);
            }
            b = mul_rem(&b, &b, m, p);
            exp >>= 1;
        }
        acc
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = poly_mod(&x, &y, p);
            x = y;
            y = r;
        }
        if let Some(&lead) = x.last() {
            if lead != 1 {
                let inv = inv_mod(lead, p);
                for c in &mut x {
                    *c = mul_mod(*c, inv, p);
                }
            }
        }
        x
    }

    /// Remainder modulo an arbitrary nonzero divisor.
    pub fn poly_mod(a: &[u64], d: &[u64], p: u64) -> Vec<u64> {
        let dd = deg(d).expect("division by zero polynomial");
        let lead_inv = inv_mod(*d.last().unwrap(), p);
        let mut r = a.to_vec();
        trim(&mut r);
        while deg(&r).map_or(false, |rd| rd >= dd) {
            let rd = r.len() - 1;
            let factor = mul_mod(*r.last().unwrap(), lead_inv, p);
            let shift = rd - dd;
            for (k, &dk) in d.iter().enumerate() {
                let sub = mul_mod(factor, dk, p);
                r[k + shift] = (r[k + shift] + p - sub) % p;
            }
            trim(&mut r);
        }
        r
    }

    /// Inverse of `a` modulo a monic irreducible `m` (extended Euclid).
    pub fn inv_rem(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
        let mut r0 = m.to_vec();
        let mut r1 = rem(a, m, p);
        if r1.is_empty() {
            return None;
        }
        let mut t0: Vec<u64> = Vec::new();
        let mut t1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            let (q, r) = div_rem(&r0, &r1, p);
            let qt = mul(&q, &t1, p);
            let t = sub(&t0, &qt, p);
            r0 = r1;
            r1 = r;
            t0 = t1;
            t1 = t;
        }
        // r0 is a nonzero constant gcd.
        let c = inv_mod(r0[0], p);
        let mut out: Vec<u64> = t0.iter().map(|&x| mul_mod(x, c, p)).collect();
        trim(&mut out);
        Some(out)
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out = vec![0u64; n];
        for (k, o) in out.iter_mut().enumerate() {
            let x = a.get(k).copied().unwrap_or(0);
            let y = b.get(k).copied().unwrap_or(0);
            *o = (x + p - y) % p;
        }
        trim(&mut out);
        out
    }

    pub fn div_rem(a: &[u64], d: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let dd = deg(d).expect("division by zero polynomial");
        let lead_inv = inv_mod(*d.last().unwrap(), p);
        let mut r = a.to_vec();
        trim(&mut r);
        let mut q = vec![0u64; r.len().saturating_sub(dd)];
        while deg(&r).map_or(false, |rd| rd >= dd) {
            let rd = r.len() - 1;
            let factor = mul_mod(*r.last().unwrap(), lead_inv, p);
            let shift = rd - dd;
            q[shift] = factor;
            for (k, &dk) in d.iter().enumerate() {
                let sxb = mul_mod(factor, dk, p);
                r[k + shift] = (r[k + shift] + p - sxb) % p;
            }
            trim(&mut r);
        }
        trim(&mut q);
        (q, r)
    }
}

/// Monic degree-`s` polynomial irreducibility over GF(p):
/// `x^(p^s) = x mod f`, and `gcd(x^(p^(s/l)) - x, f) = 1` for every
/// prime `l` dividing `s`.
fn is_irreducible(f: &[u64], p: u64, s: u32) -> bool {
    if s == 1 {
        return true;
    }
    // Powers x^(p^k) mod f, computed by iterated p-th powering.
    let x = vec![0u64, 1];
    let mut frob = Vec::with_capacity(s as usize + 1);
    frob.push(x.clone());
    for _ in 1..=s {
        let prev = frob.last().unwrap();
        frob.push(fp_poly::pow_rem(prev, p, f, p));
    }
    if frob[s as usize] != fp_poly::rem(&x, f, p) {
        return false;
    }
    let mut m = s;
    let mut ell = 2u32;
    let mut prime_divisors = Vec::new();
    while ell * ell <= m {
        if m % ell == 0 {
            prime_divisors.push(ell);
            while m % ell == 0 {
                m /= ell;
            }
        }
        ell += 1;
    }
    if m > 1 {
        prime_divisors.push(m);
    }
    for ell in prime_divisors {
        let k = (s / ell) as usize;
        let diff = fp_poly::sub(&frob[k], &x, p);
        let g = fp_poly::gcd(&diff, f, p);
        if fp_poly::deg(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// Smallest monic irreducible of degree `s` over GF(p), candidates
/// ordered by their non-leading coefficient vectors `(c_0, ..., c_{s-1})`
/// compared low-to-high.
fn find_modulus(p: u64, s: u32) -> Vec<u64> {
    let s = s as usize;
    let mut digits = vec![0u64; s];
    loop {
        // Candidate x^s + c_{s-1} x^{s-1} + ... + c_0.
        let mut f = digits.clone();
        f.push(1);
        if is_irreducible(&f, p, s as u32) {
            return f;
        }
        // Lexicographic successor: c_0 is the most significant position.
        let mut k = s;
        loop {
            assert!(k > 0, "no irreducible of degree {s} over GF({p})");
            k -= 1;
            digits[k] += 1;
            if digits[k] < p {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// A finite field GF(p^s).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fq {
    p: u64,
    s: u32,
    modulus: Vec<u64>,
    q: BigUint,
}

impl Fq {
    pub fn new(p: u64, s: u32) -> Result<Self> {
        if p >= 1 << 31 {
            return Err(Error::CharacteristicTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if s < 1 {
            return Err(Error::InvalidProblem(
                "extension degree must be >= 1".into(),
            ));
        }
        let modulus = find_modulus(p, s);
        Ok(Fq {
            p,
            s,
            modulus,
            q: BigUint::from(p).pow(s),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn q(&self) -> &BigUint {
        &self.q
    }

    pub fn q_u64(&self) -> Option<u64> {
        self.q.to_u64()
    }

    /// Modulus coefficients, ascending, including the leading 1.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn modulus_string(&self) -> String {
        let mut parts = Vec::new();
        for (k, &c) in self.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let part = match (k, c) {
                (0, c) => format!("{c}"),
                (1, 1) => "x".to_string(),
                (1, c) => format!("{c}*x"),
                (k, 1) => format!("x^{k}"),
                (k, c) => format!("{c}*x^{k}"),
            };
            parts.push(part);
        }
        parts.join("+")
    }

    pub fn zero(&self) -> FqElem {
        vec![0; self.s as usize]
    }

    pub fn one(&self) -> FqElem {
        let mut e = self.zero();
        e[0] = 1 % self.p;
        e
    }

    pub fn from_u64(&self, c: u64) -> FqElem {
        let mut e = self.zero();
        e[0] = c % self.p;
        e
    }

    pub fn from_integer(&self, c: &BigInt) -> FqElem {
        let m = BigInt::from(self.p);
        let r = c.mod_floor(&m);
        self.from_u64(r.to_u64().unwrap())
    }

    pub fn is_zero(&self, a: &FqElem) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| (x + self.p - y) % self.p)
            .collect()
    }

    pub fn neg(&self, a: &FqElem) -> FqElem {
        a.iter().map(|&x| (self.p - x) % self.p).collect()
    }

    pub fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let prod = fp_poly::mul_rem(a, b, &self.modulus, self.p);
        self.pad(prod)
    }

    pub fn inv(&self, a: &FqElem) -> Result<FqElem> {
        match fp_poly::inv_rem(a, &self.modulus, self.p) {
            Some(v) => Ok(self.pad(v)),
            None => Err(Error::ZeroInverse),
        }
    }

    pub fn pow(&self, a: &FqElem, e: u64) -> FqElem {
        self.pad(fp_poly::pow_rem(a, e, &self.modulus, self.p))
    }

    fn pad(&self, mut v: Vec<u64>) -> FqElem {
        v.resize(self.s as usize, 0);
        v
    }

    /// Element whose enumeration index is `idx` (base-p digits, least
    /// significant digit = constant coefficient).
    pub fn element_from_index(&self, mut idx: u64) -> FqElem {
        let mut e = self.zero();
        for c in e.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        debug_assert_eq!(idx, 0, "index out of range");
        e
    }

    pub fn index_of(&self, a: &FqElem) -> BigUint {
        let mut idx = BigUint::zero();
        let p = BigUint::from(self.p);
        for &c in a.iter().rev() {
            idx = idx * &p + BigUint::from(c);
        }
        idx
    }

    /// All `q` elements exactly once, in coefficient-counting order
    /// (the constant coefficient varies fastest); stable across runs.
    pub fn enumerate(&self) -> FqEnumerate<'_> {
        FqEnumerate {
            field: self,
            current: Some(self.zero()),
        }
    }
}

pub struct FqEnumerate<'a> {
    field: &'a Fq,
    current: Option<FqElem>,
}

impl Iterator for FqEnumerate<'_> {
    type Item = FqElem;

    fn next(&mut self) -> Option<FqElem> {
        let out = self.current.take()?;
        let mut next = out.clone();
        let mut k = 0;
        loop {
            if k == next.len() {
                // Wrapped around: enumeration complete.
                return Some(out);
            }
            next[k] += 1;
            if next[k] < self.field.p {
                break;
            }
            next[k] = 0;
            k += 1;
        }
        self.current = Some(next);
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        for p in [2u64, 3, 5, 7, 31, 101, 7919, 2147483647] {
            assert!(is_prime(p), "{p}");
        }
        for n in [0u64, 1, 4, 9, 91, 1000001, 2147483647 * 2] {
            assert!(!is_prime(n), "{n}");
        }
    }

    #[test]
    fn field_construction() {
        let f2 = Fq::new(2, 1).unwrap();
        assert_eq!(f2.modulus_string(), "x");

        let f4 = Fq::new(2, 2).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]); // x^2 + x + 1

        let f9 = Fq::new(3, 2).unwrap();
        assert_eq!(f9.modulus(), &[1, 0, 1]); // x^2 + 1

        assert!(Fq::new(4, 1).is_err());
        assert!(Fq::new(1 << 31, 1).is_err());
    }

    #[test]
    fn gf4_multiplication() {
        let f4 = Fq::new(2, 2).unwrap();
        let x = f4.element_from_index(2); // the class of x
        let xx = f4.mul(&x, &x);
        // x^2 = x + 1 under the modulus x^2 + x + 1.
        assert_eq!(xx, vec![1, 1]);
    }

    #[test]
    fn enumeration_order_and_size() {
        let f2 = Fq::new(2, 1).unwrap();
        let elems: Vec<_> = f2.enumerate().collect();
        assert_eq!(elems, vec![vec![0], vec![1]]);

        let f4 = Fq::new(2, 2).unwrap();
        let elems: Vec<_> = f4.enumerate().collect();
        assert_eq!(elems.len(), 4);
        assert!(f4.is_zero(&elems[0]));

        let f9 = Fq::new(3, 2).unwrap();
        let elems: Vec<_> = f9.enumerate().collect();
        assert_eq!(elems.len(), 9);
        let set: std::collections::BTreeSet<_> = elems.iter().cloned().collect();
        assert_eq!(set.len(), 9);
        for (i, e) in elems.iter().enumerate() {
            assert_eq!(f9.element_from_index(i as u64), *e);
        }
    }

    #[test]
    fn inverses_and_frobenius() {
        let f9 = Fq::new(3, 2).unwrap();
        for a in f9.enumerate() {
            if f9.is_zero(&a) {
                assert!(f9.inv(&a).is_err());
                continue;
            }
            let inv = f9.inv(&a).unwrap();
            assert_eq!(f9.mul(&a, &inv), f9.one());
            // Lagrange: a^(q-1) = 1.
            assert_eq!(f9.pow(&a, 8), f9.one());
        }
        // Frobenius is additive.
        for a in f9.enumerate() {
            for b in f9.enumerate() {
                let lhs = f9.pow(&f9.add(&a, &b), 3);
                let rhs = f9.add(&f9.pow(&a, 3), &f9.pow(&b, 3));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for (p, s) in [(2u64, 1u32), (2, 2), (3, 1), (2, 3), (3, 2), (5, 1)] {
            let f = Fq::new(p, s).unwrap();
            let elems: Vec<_> = f.enumerate().collect();
            for a in &elems {
                for b in &elems {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in &elems {
                        assert_eq!(f.add(&f.add(a, b), c), f.add(a, &f.add(b, c)));
                        assert_eq!(f.mul(&f.mul(a, b), c), f.mul(a, &f.mul(b, c)));
                        let lhs = f.mul(a, &f.add(b, c));
                        let rhs = f.add(&f.mul(a, b), &f.mul(a, c));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn power_sum_identity() {
        // Sum over GF(q) of a^k is -1 when (q-1) | k and k > 0, else 0.
        for (p, s) in [(2u64, 2u32), (3, 1), (3, 2), (5, 1), (7, 1), (2, 4)] {
            let f = Fq::new(p, s).unwrap();
            let q = f.q_u64().unwrap();
            for k in 1..=(2 * (q - 1) + 1) {
                let mut sum = f.zero();
                for a in f.enumerate() {
                    sum = f.add(&sum, &f.pow(&a, k));
                }
                let want = if k % (q - 1) == 0 {
                    f.neg(&f.one())
                } else {
                    f.zero()
                };
                assert_eq!(sum, want, "p={p} s={s} k={k}");
            }
        }
    }

    #[test]
    fn larger_prime_field() {
        let f = Fq::new(104729, 1).unwrap();
        let a = f.from_u64(12345);
        let inv = f.inv(&a).unwrap();
        assert_eq!(f.mul(&a, &inv), f.one());
    }

    #[test]
    fn deterministic_modulus() {
        let a = Fq::new(5, 3).unwrap();
        let b = Fq::new(5, 3).unwrap();
        assert_eq!(a.modulus(), b.modulus());
        // Exhaustive scan oracle: no monic irreducible cubic over GF(5)
        // precedes the chosen one in low-to-high lexicographic order.
        let chosen = a.modulus().to_vec();
        let mut found = None;
        'scan: for c0 in 0..5u64 {
            for c1 in 0..5u64 {
                for c2 in 0..5u64 {
                    let f = vec![c0, c1, c2, 1];
                    // Cubics are irreducible iff they have no roots.
                    let has_root =
                        (0..5u64).any(|x| (c0 + c1 * x + c2 * x * x + x * x * x) % 5 == 0);
                    if !has_root {
                        found = Some(f);
                        break 'scan;
                    }
                }
            }
        }
        assert_eq!(found.unwrap(), chosen);
    }
}
