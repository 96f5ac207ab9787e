//! F_{p^k} arithmetic: dense univariate polynomials modulo a fixed monic
//! irreducible, plus the deterministic irreducible-polynomial table.

use crate::error::{Error, Result};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Largest supported field size for the modulus table (3^10).
pub const MAX_FINITE_ORDER: u128 = 59049;

/// Built-in moduli for the fields the test grids touch, stored as
/// `(p, k, [c_0, .., c_{k-1}])` for `x^k + c_{k-1} x^{k-1} + ... + c_0`.
/// Every entry is the first irreducible in the deterministic search order
/// below; a unit test re-derives them.
static BUILTIN_MODULI: &[(u64, u32, &[u64])] = &[
    (2, 2, &[1, 1]),
    (2, 3, &[1, 1, 0]),
    (2, 4, &[1, 1, 0, 0]),
    (2, 5, &[1, 0, 1, 0, 0]),
    (2, 6, &[1, 1, 0, 0, 0, 0]),
    (2, 7, &[1, 1, 0, 0, 0, 0, 0]),
    (3, 2, &[1, 0]),
];

fn poly_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_trim(&mut out);
    out
}

/// Remainder of `a` modulo monic `m`.
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let idx = i + shift;
                r[idx] = (r[idx] + (p - c % p) % p * lead) % p;
            }
        }
        poly_trim(&mut r);
        if r.len() <= dm {
            break;
        }
    }
    r
}

fn poly_divmod(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    // b need not be monic
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let inv = inv_mod(*b.last().unwrap(), p);
    let mut q = vec![0u64; r.len().saturating_sub(db)];
    while r.len() >= db + 1 {
        let lead = *r.last().unwrap() * inv % p;
        let shift = r.len() - 1 - db;
        q[shift] = lead;
        for (i, &c) in b.iter().enumerate() {
            let idx = i + shift;
            r[idx] = (r[idx] + (p - c * lead % p)) % p;
        }
        poly_trim(&mut r);
    }
    poly_trim(&mut q);
    (q, r)
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    t.rem_euclid(p as i128) as u64
}

/// Monic coefficient counters of degree exactly `d`, in the deterministic
/// order used by the modulus search.
fn monic_polys(p: u64, d: u32) -> impl Iterator<Item = Vec<u64>> {
    let count = (p as u128).pow(d);
    (0..count).map(move |mut v| {
        let mut c = Vec::with_capacity(d as usize + 1);
        for _ in 0..d {
            c.push((v % p as u128) as u64);
            v /= p as u128;
        }
        c.push(1); // monic
        c
    })
}

fn is_irreducible(f: &[u64], p: u64) -> bool {
    let k = (f.len() - 1) as u32;
    for d in 1..=k / 2 {
        for g in monic_polys(p, d) {
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// First monic irreducible of degree `k` over F_p in the counter order
/// (low coefficients vary fastest). Deterministic across runs.
fn search_irreducible(p: u64, k: u32) -> Vec<u64> {
    for f in monic_polys(p, k) {
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

fn fault_injection_active() -> bool {
    static FLAG: OnceLock<bool> = OnceLock::new();
    *FLAG.get_or_init(|| {
        std::env::var("INSEP_FAULT").map_or(false, |v| v == "irreducible-table")
    })
}

/// Modulus for F_{p^k}: coefficients `[c_0, .., c_{k-1}, 1]` of a monic
/// irreducible of degree k.
pub fn modulus(p: u64, k: u32) -> Result<Vec<u64>> {
    if k == 0 {
        return Err(Error::Invalid("extension degree must be >= 1".into()));
    }
    let order = (p as u128).checked_pow(k).ok_or(Error::Overflow)?;
    if order > MAX_FINITE_ORDER {
        return Err(Error::UnsupportedField(format!(
            "finite field of order {order} exceeds the modulus table bound {MAX_FINITE_ORDER}"
        )));
    }
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Vec<u64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    let f = guard
        .entry((p, k))
        .or_insert_with(|| {
            let mut f = BUILTIN_MODULI
                .iter()
                .find(|&&(bp, bk, _)| bp == p && bk == k)
                .map(|&(_, _, c)| {
                    let mut v = c.to_vec();
                    v.push(1);
                    v
                })
                .unwrap_or_else(|| search_irreducible(p, k));
            if fault_injection_active() && k >= 2 {
                // test hook: corrupt the constant term
                f[0] = (f[0] + 1) % p;
            }
            f
        })
        .clone();
    Ok(f)
}

/// Element arithmetic for F_{p^k}; coefficient vectors always have length k.
pub struct Fq<'a> {
    pub p: u64,
    pub k: u32,
    pub modulus: &'a [u64],
}

impl<'a> Fq<'a> {
    fn pad(&self, mut v: Vec<u64>) -> Vec<u64> {
        v.resize(self.k as usize, 0);
        v
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Vec<u64> {
        a.iter().map(|x| (self.p - x % self.p) % self.p).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let prod = poly_mul(a, b, self.p);
        self.pad(poly_rem(&prod, self.modulus, self.p))
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn inv(&self, a: &[u64]) -> Result<Vec<u64>> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        // extended Euclid in F_p[x] against the modulus
        let p = self.p;
        let mut r0 = self.modulus.to_vec();
        let mut r1 = a.to_vec();
        poly_trim(&mut r1);
        let mut s0: Vec<u64> = vec![];
        let mut s1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            let (q, r) = poly_divmod(&r0, &r1, p);
            let qs1 = poly_mul(&q, &s1, p);
            let mut s2 = s0.clone();
            s2.resize(s2.len().max(qs1.len()), 0);
            for (i, &c) in qs1.iter().enumerate() {
                s2[i] = (s2[i] + p - c) % p;
            }
            poly_trim(&mut s2);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
        }
        // r0 is a nonzero constant gcd
        debug_assert_eq!(r0.len(), 1);
        let c_inv = inv_mod(r0[0], p);
        let out: Vec<u64> = s0.iter().map(|&c| c * c_inv % p).collect();
        Ok(self.pad(out))
    }

    pub fn pow(&self, a: &[u64], mut e: u128) -> Vec<u64> {
        let mut base = a.to_vec();
        let mut acc = self.pad(vec![1]);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// x ↦ x^{p^e}.
    pub fn frobenius(&self, a: &[u64], e: u32) -> Vec<u64> {
        let e = e % self.k; // Frobenius has order k
        let mut out = a.to_vec();
        for _ in 0..e {
            out = self.pow(&out, self.p as u128);
        }
        out
    }

    /// Inverse of the e-fold Frobenius (always exists: Frobenius is bijective).
    pub fn pth_root(&self, a: &[u64], e: u32) -> Vec<u64> {
        let e = e % self.k;
        if e == 0 {
            return a.to_vec();
        }
        self.frobenius(a, self.k - e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_table_matches_search() {
        for &(p, k, coeffs) in BUILTIN_MODULI {
            let mut expect = coeffs.to_vec();
            expect.push(1);
            assert_eq!(search_irreducible(p, k), expect, "p={p} k={k}");
        }
    }

    #[test]
    fn f4_inverse_and_frobenius() {
        let m = modulus(2, 2).unwrap();
        let fq = Fq { p: 2, k: 2, modulus: &m };
        let g = vec![0, 1];
        // g^2 = g + 1, g^3 = 1
        let g2 = fq.mul(&g, &g);
        assert_eq!(g2, vec![1, 1]);
        assert_eq!(fq.mul(&g2, &g), vec![1, 0]);
        assert_eq!(fq.inv(&g).unwrap(), g2);
        // Frobenius squares: pth_root(g) = g^2 since (g^2)^2 = g^4 = g
        assert_eq!(fq.pth_root(&g, 1), g2);
        assert_eq!(fq.frobenius(&g2, 1), g);
    }

    #[test]
    fn f9_frobenius_order_two() {
        let m = modulus(3, 2).unwrap();
        let fq = Fq { p: 3, k: 2, modulus: &m };
        for a in 0..3u64 {
            for b in 0..3u64 {
                let x = vec![a, b];
                assert_eq!(fq.frobenius(&x, 2), x);
            }
        }
    }

    #[test]
    fn order_bound_enforced() {
        assert!(matches!(modulus(3, 11), Err(Error::UnsupportedField(_))));
    }
}
