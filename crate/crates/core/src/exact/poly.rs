//! Multivariate polynomials over a prime field F_p.
//!
//! Terms are kept in a map ordered by graded-lexicographic monomial order, so
//! every polynomial has exactly one representation. Coefficients are residues
//! in `1..p`; zero coefficients are never stored.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BTreeMap;

/// Exponent vector with graded-lex ordering (total degree first, then
/// lexicographic on the exponents).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mono(pub Box<[u32]>);

impl Mono {
    pub fn one(nvars: usize) -> Self {
        Mono(vec![0; nvars].into_boxed_slice())
    }

    pub fn var(nvars: usize, v: usize) -> Self {
        let mut e = vec![0u32; nvars];
        e[v] = 1;
        Mono(e.into_boxed_slice())
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        Mono(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn divides(&self, other: &Mono) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller must have checked divisibility.
    pub fn div(&self, other: &Mono) -> Mono {
        Mono(
            other
                .0
                .iter()
                .zip(self.0.iter())
                .map(|(b, a)| b - a)
                .collect(),
        )
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // extended Euclid; a is nonzero mod p
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "inverse of a nonunit");
    t.rem_euclid(p as i128) as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    pub p: u64,
    pub nvars: usize,
    pub terms: BTreeMap<Mono, u64>,
}

impl Poly {
    pub fn zero(p: u64, nvars: usize) -> Self {
        Poly {
            p,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(p: u64, nvars: usize, c: u64) -> Self {
        let mut poly = Poly::zero(p, nvars);
        let c = c % p;
        if c != 0 {
            poly.terms.insert(Mono::one(nvars), c);
        }
        poly
    }

    pub fn one(p: u64, nvars: usize) -> Self {
        Poly::constant(p, nvars, 1)
    }

    pub fn var(p: u64, nvars: usize, v: usize) -> Self {
        let mut poly = Poly::zero(p, nvars);
        poly.terms.insert(Mono::var(nvars, v), 1);
        poly
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Mono::is_one)
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().next().map_or(false, |(m, &c)| m.is_one() && c == 1)
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(Mono::total_degree).max().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(&Mono, u64)> {
        self.terms.iter().next_back().map(|(m, &c)| (m, c))
    }

    fn insert_term(&mut self, m: Mono, c: u64) {
        let c = c % self.p;
        if c == 0 {
            return;
        }
        let p = self.p;
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = (*e.get() + c) % p;
                if s == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.insert_term(m.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = Poly::zero(self.p, self.nvars);
        for (m, &c) in &self.terms {
            out.terms.insert(m.clone(), self.p - c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u64) -> Poly {
        let c = c % self.p;
        let mut out = Poly::zero(self.p, self.nvars);
        if c == 0 {
            return out;
        }
        for (m, &a) in &self.terms {
            let v = a * c % self.p;
            if v != 0 {
                out.terms.insert(m.clone(), v);
            }
        }
        out
    }

    /// Product with a total-degree guard; tower powering can square degrees
    /// repeatedly, so unbounded growth must abort instead of thrashing.
    pub fn mul(&self, other: &Poly, guard: u32) -> Result<Poly> {
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(self.p, self.nvars));
        }
        let deg = self.total_degree() + other.total_degree();
        if deg > guard as u64 {
            return Err(Error::ResourceGuard(format!(
                "polynomial degree {deg} exceeds limit {guard}"
            )));
        }
        let mut out = Poly::zero(self.p, self.nvars);
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &other.terms {
                out.insert_term(m1.mul(m2), c1 * c2 % self.p);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut k: u64, guard: u32) -> Result<Poly> {
        let mut base = self.clone();
        let mut acc = Poly::one(self.p, self.nvars);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base, guard)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base, guard)?;
            }
        }
        Ok(acc)
    }

    /// x ↦ x^{p^e}, computed termwise: coefficients are fixed by Frobenius,
    /// exponents scale.
    pub fn frobenius(&self, e: u32, guard: u32) -> Result<Poly> {
        if e == 0 {
            return Ok(self.clone());
        }
        let factor = (self.p as u128).checked_pow(e).ok_or(Error::Overflow)?;
        let new_deg = self.total_degree() as u128 * factor;
        if new_deg > guard as u128 {
            return Err(Error::ResourceGuard(format!(
                "Frobenius power degree {new_deg} exceeds limit {guard}"
            )));
        }
        let mut out = Poly::zero(self.p, self.nvars);
        for (m, &c) in &self.terms {
            let exps: Box<[u32]> = m.0.iter().map(|&x| x * factor as u32).collect();
            out.terms.insert(Mono(exps), c);
        }
        Ok(out)
    }

    /// Inverse of e-fold Frobenius where it exists: every exponent must be
    /// divisible by p^e.
    pub fn pth_root(&self, e: u32) -> Result<Poly> {
        if e == 0 {
            return Ok(self.clone());
        }
        let factor = (self.p as u128).checked_pow(e).ok_or(Error::NotAPower(e))?;
        if factor > u32::MAX as u128 {
            return Err(Error::NotAPower(e));
        }
        let factor = factor as u32;
        let mut out = Poly::zero(self.p, self.nvars);
        for (m, &c) in &self.terms {
            let mut exps = Vec::with_capacity(m.0.len());
            for &x in m.0.iter() {
                if x % factor != 0 {
                    return Err(Error::NotAPower(e));
                }
                exps.push(x / factor);
            }
            out.terms.insert(Mono(exps.into_boxed_slice()), c);
        }
        Ok(out)
    }

    /// Divide by the leading coefficient so the graded-lex leading term has
    /// coefficient 1.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some((_, lc)) => {
                if lc == 1 {
                    self.clone()
                } else {
                    self.scale(inv_mod(lc, self.p))
                }
            }
        }
    }

    /// Exact multivariate division; `other` must divide `self`.
    pub fn div_exact(&self, other: &Poly, guard: u32) -> Result<Poly> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (lm, lc) = other.leading().expect("nonzero");
        let lm = lm.clone();
        let lc_inv = inv_mod(lc, self.p);
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.p, self.nvars);
        while let Some((rm, rc)) = rem.leading() {
            if !lm.divides(rm) {
                return Err(Error::Internal("inexact polynomial division".into()));
            }
            let qm = lm.div(rm);
            let qc = rc * lc_inv % self.p;
            let mut t = Poly::zero(self.p, self.nvars);
            t.terms.insert(qm, qc);
            rem = rem.sub(&t.mul(other, guard)?);
            quot = quot.add(&t);
        }
        Ok(quot)
    }

    fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0)
    }

    /// Coefficient of `x_v^d`, as a polynomial not involving `x_v`.
    fn coeff_in(&self, v: usize, d: u32) -> Poly {
        let mut out = Poly::zero(self.p, self.nvars);
        for (m, &c) in &self.terms {
            if m.0[v] == d {
                let mut e = m.0.to_vec();
                e[v] = 0;
                out.terms.insert(Mono(e.into_boxed_slice()), c);
            }
        }
        out
    }

    fn mul_var_pow(&self, v: usize, d: u32) -> Poly {
        let mut out = Poly::zero(self.p, self.nvars);
        for (m, &c) in &self.terms {
            let mut e = m.0.to_vec();
            e[v] += d;
            out.terms.insert(Mono(e.into_boxed_slice()), c);
        }
        out
    }

    /// GCD of the coefficients of `self` viewed as univariate in `x_v`.
    fn content_in(&self, v: usize, guard: u32) -> Result<Poly> {
        let mut g = Poly::zero(self.p, self.nvars);
        for d in 0..=self.degree_in(v) {
            let c = self.coeff_in(v, d);
            if !c.is_zero() {
                g = gcd(&g, &c, guard)?;
                if g.is_one() {
                    break;
                }
            }
        }
        Ok(g)
    }

    /// Pseudo-remainder of `self` by `other` in the variable `x_v`.
    fn prem(&self, other: &Poly, v: usize, guard: u32) -> Result<Poly> {
        let db = other.degree_in(v);
        let lcb = other.coeff_in(v, db);
        let mut r = self.clone();
        while !r.is_zero() {
            let dr = r.degree_in(v);
            if dr < db {
                break;
            }
            let lcr = r.coeff_in(v, dr);
            r = r
                .mul(&lcb, guard)?
                .sub(&lcr.mul(&other.mul_var_pow(v, dr - db), guard)?);
        }
        Ok(r)
    }
}

/// Monic GCD by recursive content/primitive-part reduction (primitive PRS in
/// the highest variable that actually occurs).
pub fn gcd(a: &Poly, b: &Poly, guard: u32) -> Result<Poly> {
    if a.is_zero() {
        return Ok(b.monic());
    }
    if b.is_zero() {
        return Ok(a.monic());
    }
    if a.is_constant() || b.is_constant() {
        return Ok(Poly::one(a.p, a.nvars));
    }
    let v = (0..a.nvars)
        .rev()
        .find(|&v| a.degree_in(v) > 0 || b.degree_in(v) > 0)
        .expect("non-constant polynomial has a variable");
    if a.degree_in(v) == 0 {
        return gcd(a, &b.content_in(v, guard)?, guard);
    }
    if b.degree_in(v) == 0 {
        return gcd(&a.content_in(v, guard)?, b, guard);
    }
    let ca = a.content_in(v, guard)?;
    let cb = b.content_in(v, guard)?;
    let g = gcd(&ca, &cb, guard)?;
    let mut big = a.div_exact(&ca, guard)?;
    let mut small = b.div_exact(&cb, guard)?;
    if big.degree_in(v) < small.degree_in(v) {
        std::mem::swap(&mut big, &mut small);
    }
    while !small.is_zero() {
        let r = big.prem(&small, v, guard)?;
        big = small;
        small = if r.is_zero() {
            r
        } else {
            let cr = r.content_in(v, guard)?;
            r.div_exact(&cr, guard)?
        };
    }
    Ok(g.mul(&big, guard)?.monic())
}

#[cfg(test)]
mod tests {
    use super::*;

    const G: u32 = 512;

    #[test]
    fn add_cancels() {
        let t = Poly::var(2, 1, 0);
        assert!(t.add(&t).is_zero());
    }

    #[test]
    fn freshman_dream_char2() {
        // (t + 1)^2 = t^2 + 1
        let t = Poly::var(2, 1, 0);
        let one = Poly::one(2, 1);
        let f = t.add(&one);
        let sq = f.mul(&f, G).unwrap();
        assert_eq!(sq, f.frobenius(1, G).unwrap());
    }

    #[test]
    fn gcd_of_common_factor() {
        // gcd((t+1)*t, (t+1)^2) = t+1 over F_2
        let t = Poly::var(2, 1, 0);
        let f = t.add(&Poly::one(2, 1));
        let a = f.mul(&t, G).unwrap();
        let b = f.mul(&f, G).unwrap();
        assert_eq!(gcd(&a, &b, G).unwrap(), f);
    }

    #[test]
    fn gcd_multivariate() {
        // gcd((t+u)*t, (t+u)*u) = t+u over F_3
        let t = Poly::var(3, 2, 0);
        let u = Poly::var(3, 2, 1);
        let s = t.add(&u);
        let a = s.mul(&t, G).unwrap();
        let b = s.mul(&u, G).unwrap();
        assert_eq!(gcd(&a, &b, G).unwrap(), s.monic());
    }

    #[test]
    fn pth_root_round_trips() {
        let t = Poly::var(2, 2, 0);
        let u = Poly::var(2, 2, 1);
        let f = t.mul(&u, G).unwrap().add(&Poly::one(2, 2));
        let sq = f.frobenius(1, G).unwrap();
        assert_eq!(sq.pth_root(1).unwrap(), f);
        assert_eq!(t.add(&u).pth_root(1), Err(Error::NotAPower(1)));
    }

    #[test]
    fn degree_guard_trips() {
        let t = Poly::var(2, 1, 0);
        let big = t.pow(400, 512).unwrap();
        assert!(matches!(
            big.mul(&big, 512),
            Err(Error::ResourceGuard(_))
        ));
    }
}
