//! Purely inseparable towers over K = F_p(z_1..z_m): chains of relations
//! y_i^{p^{f_i}} = g_i with g_i over the earlier generators. Elements are
//! sparse polynomials in the y's with rational-function coefficients, so a
//! tower never materialises a multiplication table; bases are built only for
//! the subfield computations that need them, under a dimension guard.

use crate::error::{Error, Result};
use crate::exact::parser::{self, EvalContext, Expr};
use crate::exact::poly::Mono;
use crate::exact::semilinear::decompose_rat;
use crate::exact::{FieldDescriptor, FieldElem};
use crate::fdalg::StructureConstants;
use crate::lambda::EType;
use crate::linalg::Mat;
use crate::Limits;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One relation y_i^{p^exp} = rhs; the rhs may mention the base variables and
/// the earlier generators y_1..y_{i-1}.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TowerLevel {
    pub exp: u32,
    pub rhs: String,
}

/// The serialised form of a tower.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TowerPresentation {
    pub base_vars: Vec<String>,
    pub levels: Vec<TowerLevel>,
    pub p: u64,
}

/// Exponent vector in the generators y_1..y_r, ordered with the last
/// generator most significant, so every relation rewrites a monomial into
/// strictly smaller ones.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct YMono(Box<[u32]>);

impl YMono {
    fn one(r: usize) -> Self {
        YMono(vec![0; r].into_boxed_slice())
    }

    fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for YMono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        for i in (0..self.0.len()).rev() {
            match self.0[i].cmp(&other.0[i]) {
                std::cmp::Ordering::Equal => continue,
                o => return o,
            }
        }
        std::cmp::Ordering::Equal
    }
}

impl PartialOrd for YMono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A tower element: finitely many y-monomials with coefficients in K.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerElem {
    pub(crate) terms: BTreeMap<YMono, FieldElem>,
}

impl TowerElem {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn leading(&self) -> Option<&YMono> {
        self.terms.keys().next_back()
    }

    fn insert_term(&mut self, m: YMono, c: FieldElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }
}

/// A validated tower of purely inseparable relations over F_p(z_1..z_m).
#[derive(Debug, Clone)]
pub struct Tower {
    desc: FieldDescriptor,
    p: u64,
    fexps: Vec<u32>,
    /// p^{f_i} per level.
    bounds: Vec<u64>,
    rhs: Vec<TowerElem>,
    dim: u128,
}

impl Tower {
    pub fn base_field(&self) -> &FieldDescriptor {
        &self.desc
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Number of levels (generators).
    pub fn levels(&self) -> usize {
        self.fexps.len()
    }

    pub fn level_exponents(&self) -> &[u32] {
        &self.fexps
    }

    /// [L : K] = p^{Σ f_i}.
    pub fn dim(&self) -> u128 {
        self.dim
    }

    pub fn zero(&self) -> TowerElem {
        TowerElem {
            terms: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> TowerElem {
        self.from_scalar(FieldElem::one(&self.desc))
    }

    pub fn from_scalar(&self, c: FieldElem) -> TowerElem {
        let mut t = self.zero();
        t.insert_term(YMono::one(self.levels()), c);
        t
    }

    /// The generator y_i (1-based).
    pub fn generator(&self, i: usize) -> TowerElem {
        let mut exps = vec![0u32; self.levels()];
        exps[i - 1] = 1;
        let mut t = self.zero();
        t.insert_term(YMono(exps.into_boxed_slice()), FieldElem::one(&self.desc));
        t
    }

    pub fn add(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        let mut out = a.clone();
        for (m, c) in &b.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        let mut out = a.clone();
        for (m, c) in &b.terms {
            out.insert_term(m.clone(), c.neg());
        }
        out
    }

    pub fn scale(&self, a: &TowerElem, c: &FieldElem) -> Result<TowerElem> {
        let mut out = self.zero();
        for (m, v) in &a.terms {
            out.insert_term(m.clone(), v.mul(c)?);
        }
        Ok(out)
    }

    /// Rewrite one monomial into the reduced basis using the relations.
    fn reduce_mono(&self, exps: &[u32], coeff: &FieldElem) -> Result<TowerElem> {
        // highest overflowing level first: its rhs only involves lower levels
        let mut over = None;
        for i in (0..self.levels()).rev() {
            if exps[i] as u64 >= self.bounds[i] {
                over = Some(i);
                break;
            }
        }
        let Some(i) = over else {
            let mut t = self.zero();
            t.insert_term(
                YMono(exps.to_vec().into_boxed_slice()),
                coeff.clone(),
            );
            return Ok(t);
        };
        let mut rest = exps.to_vec();
        rest[i] -= self.bounds[i] as u32;
        let reduced_rest = self.reduce_mono(&rest, coeff)?;
        self.mul(&self.rhs[i], &reduced_rest)
    }

    pub fn mul(&self, a: &TowerElem, b: &TowerElem) -> Result<TowerElem> {
        let mut out = self.zero();
        for (m1, c1) in &a.terms {
            for (m2, c2) in &b.terms {
                let c = c1.mul(c2)?;
                if c.is_zero() {
                    continue;
                }
                let exps: Vec<u32> = m1.0.iter().zip(m2.0.iter()).map(|(x, y)| x + y).collect();
                let piece = self.reduce_mono(&exps, &c)?;
                for (m, v) in piece.terms {
                    out.insert_term(m, v);
                }
            }
        }
        Ok(out)
    }

    /// x ↦ x^p, termwise by the freshman's dream.
    pub fn pow_p(&self, a: &TowerElem) -> Result<TowerElem> {
        let mut out = self.zero();
        for (m, c) in &a.terms {
            let cp = c.frobenius(1)?;
            let exps: Vec<u32> = m
                .0
                .iter()
                .map(|&e| {
                    e.checked_mul(self.p as u32)
                        .ok_or(Error::Overflow)
                })
                .collect::<Result<_>>()?;
            let piece = self.reduce_mono(&exps, &cp)?;
            for (m, v) in piece.terms {
                out.insert_term(m, v);
            }
        }
        Ok(out)
    }

    pub fn frobenius(&self, a: &TowerElem, e: u32) -> Result<TowerElem> {
        let mut out = a.clone();
        for _ in 0..e {
            out = self.pow_p(&out)?;
        }
        Ok(out)
    }

    pub fn pow(&self, a: &TowerElem, mut e: u128) -> Result<TowerElem> {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// Inverse via x^{p^M} ∈ K with M = Σ f_i: x^{-1} = x^{p^M − 1} / x^{p^M}.
    pub fn inv(&self, a: &TowerElem) -> Result<TowerElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m_total: u32 = self.fexps.iter().sum();
        let full = self.frobenius(a, m_total)?;
        if full.terms.len() != 1 || !full.leading().unwrap().is_one() {
            return Err(Error::Internal(
                "p^M-th power did not land in the base field".into(),
            ));
        }
        let c = full.terms.values().next().unwrap().clone();
        let exp = (self.p as u128)
            .checked_pow(m_total)
            .ok_or(Error::Overflow)?
            - 1;
        let pw = self.pow(a, exp)?;
        self.scale(&pw, &c.inv()?)
    }

    /// If the element is a scalar multiple of 1, return the scalar.
    pub fn as_scalar(&self, a: &TowerElem) -> Option<FieldElem> {
        if a.is_zero() {
            return Some(FieldElem::zero(&self.desc));
        }
        if a.terms.len() == 1 {
            let (m, c) = a.terms.iter().next().unwrap();
            if m.is_one() {
                return Some(c.clone());
            }
        }
        None
    }

    /// Canonical printing: y-monomials descending, coefficients in the base
    /// field, parenthesised when they have more than one term.
    pub fn format_elem(&self, a: &TowerElem) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (m, c) in a.terms.iter().rev() {
            let mono = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("y{}", i + 1)
                    } else {
                        format!("y{}^{}", i + 1, e)
                    }
                })
                .collect::<Vec<_>>()
                .join("*");
            let cs = c.to_string();
            let part = if mono.is_empty() {
                cs
            } else if c.is_one() {
                mono
            } else if cs.contains('+') || cs.contains('/') || cs.contains(' ') {
                format!("({cs})*{mono}")
            } else {
                format!("{cs}*{mono}")
            };
            parts.push(part);
        }
        parts.join(" + ")
    }

    /// Parse an expression in the base variables and the generators y1..yr.
    pub fn parse_elem(&self, src: &str) -> Result<TowerElem> {
        let expr = parser::parse(src)?;
        self.eval_expr(&expr, self.levels())
    }

    fn eval_expr(&self, expr: &Expr, max_level: usize) -> Result<TowerElem> {
        let mut ctx = TowerExprContext {
            tower: self,
            max_level,
        };
        parser::eval(expr, &mut ctx)
    }
}

struct TowerExprContext<'a> {
    tower: &'a Tower,
    /// generators y1..y_{max_level} are in scope
    max_level: usize,
}

impl EvalContext for TowerExprContext<'_> {
    type Value = TowerElem;

    fn from_int(&mut self, v: u64) -> Result<TowerElem> {
        Ok(self
            .tower
            .from_scalar(FieldElem::from_int(&self.tower.desc, v as i64)))
    }

    fn ident(&mut self, name: &str) -> Result<TowerElem> {
        if let Some(rest) = name.strip_prefix('y') {
            if let Ok(i) = rest.parse::<usize>() {
                if i >= 1 && i <= self.tower.levels() {
                    if i > self.max_level {
                        return Err(Error::Invalid(format!(
                            "generator y{i} is not yet defined at this level"
                        )));
                    }
                    return Ok(self.tower.generator(i));
                }
            }
        }
        let v = FieldElem::var(&self.tower.desc, name)?;
        Ok(self.tower.from_scalar(v))
    }

    fn add(&mut self, a: TowerElem, b: TowerElem) -> Result<TowerElem> {
        Ok(self.tower.add(&a, &b))
    }

    fn sub(&mut self, a: TowerElem, b: TowerElem) -> Result<TowerElem> {
        Ok(self.tower.sub(&a, &b))
    }

    fn neg(&mut self, a: TowerElem) -> Result<TowerElem> {
        Ok(self.tower.sub(&self.tower.zero(), &a))
    }

    fn mul(&mut self, a: TowerElem, b: TowerElem) -> Result<TowerElem> {
        self.tower.mul(&a, &b)
    }

    fn div(&mut self, a: TowerElem, b: TowerElem) -> Result<TowerElem> {
        self.tower.mul(&a, &self.tower.inv(&b)?)
    }

    fn pow(&mut self, a: TowerElem, e: u32) -> Result<TowerElem> {
        self.tower.pow(&a, e as u128)
    }
}

/// Sparse row echelon over the y-monomial coordinates: rows are indexed by
/// their leading monomial and normalised to leading coefficient 1.
#[derive(Debug, Clone)]
pub(crate) struct SparseEchelon {
    rows: BTreeMap<YMono, TowerElem>,
}

impl SparseEchelon {
    fn new() -> Self {
        SparseEchelon {
            rows: BTreeMap::new(),
        }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Eliminate the leading monomial while a row for it exists. The result
    /// is zero exactly when the input lies in the span.
    fn reduce(&self, tower: &Tower, v: &TowerElem) -> Result<TowerElem> {
        let mut v = v.clone();
        while let Some(lm) = v.leading() {
            let Some(row) = self.rows.get(lm) else {
                break;
            };
            let c = v.terms.get(lm).unwrap().clone();
            let scaled = tower.scale(row, &c)?;
            v = tower.sub(&v, &scaled);
        }
        Ok(v)
    }

    fn contains(&self, tower: &Tower, v: &TowerElem) -> Result<bool> {
        Ok(self.reduce(tower, v)?.is_zero())
    }

    /// Returns true when the dimension grew.
    fn insert(&mut self, tower: &Tower, v: &TowerElem) -> Result<bool> {
        let red = self.reduce(tower, v)?;
        let Some(lm) = red.leading().cloned() else {
            return Ok(false);
        };
        let lc = red.terms.get(&lm).unwrap().clone();
        let normalised = tower.scale(&red, &lc.inv()?)?;
        self.rows.insert(lm, normalised);
        Ok(true)
    }
}

/// A multiplicatively closed subspace of a tower containing 1, with an
/// explicit echelon basis.
#[derive(Debug, Clone)]
pub struct Subfield {
    ech: SparseEchelon,
}

impl Subfield {
    /// K·1 itself.
    pub fn base(tower: &Tower) -> Result<Self> {
        let mut ech = SparseEchelon::new();
        ech.insert(tower, &tower.one())?;
        Ok(Subfield { ech })
    }

    pub fn dim(&self) -> usize {
        self.ech.dim()
    }

    pub fn contains(&self, tower: &Tower, v: &TowerElem) -> Result<bool> {
        self.ech.contains(tower, v)
    }

    /// Adjoin a purely inseparable element with exponent `e` over this
    /// subfield: the new basis is {b·x^t : t < p^e}. The dimension must
    /// multiply by exactly p^e.
    pub fn adjoin(&self, tower: &Tower, x: &TowerElem, e: u32) -> Result<Subfield> {
        let pe = (tower.p as u128).checked_pow(e).ok_or(Error::Overflow)?;
        let mut ech = SparseEchelon::new();
        let old_rows: Vec<TowerElem> = self.ech.rows.values().cloned().collect();
        let mut xt = tower.one();
        for t in 0..pe {
            if t > 0 {
                xt = tower.mul(&xt, x)?;
            }
            for b in &old_rows {
                let prod = tower.mul(b, &xt)?;
                if !ech.insert(tower, &prod)? {
                    return Err(Error::Internal(
                        "adjoined products are linearly dependent".into(),
                    ));
                }
            }
        }
        Ok(Subfield { ech })
    }
}

/// Least e >= 0 with x^{p^e} in the subfield; the bound Σ f_i always
/// suffices inside a tower.
pub fn exponent(tower: &Tower, x: &TowerElem, over: &Subfield) -> Result<u32> {
    let bound: u32 = tower.fexps.iter().sum();
    let mut v = x.clone();
    for e in 0..=bound {
        if over.contains(tower, &v)? {
            return Ok(e);
        }
        v = tower.pow_p(&v)?;
    }
    Err(Error::NoFiniteExponent)
}

/// Decomposition key for the restriction of scalars: a y-monomial coordinate
/// split along the K^p-basis of K.
type SparseKey = (YMono, Mono);

fn decompose_elem(
    tower: &Tower,
    v: &TowerElem,
    q: u64,
) -> Result<BTreeMap<SparseKey, FieldElem>> {
    let mut out = BTreeMap::new();
    for (m, c) in &v.terms {
        for (alpha, pullback) in decompose_rat(&tower.desc, c.rat().unwrap(), q)? {
            out.insert((m.clone(), alpha), pullback);
        }
    }
    Ok(out)
}

/// Sparse consistency test: is `g` in the K^p-span of the p-th powers of the
/// monomial basis of the first `level` levels? This is the membership test
/// g ∈ (L_level)^p, the image of Frobenius.
fn in_frobenius_image(tower: &Tower, level: usize, g: &TowerElem, limits: &Limits) -> Result<bool> {
    let p = tower.p;
    let sub_dim: u128 = tower.bounds[..level]
        .iter()
        .map(|&b| b as u128)
        .product();
    if sub_dim > limits.tower_guard as u128 {
        return Err(Error::ResourceGuard(format!(
            "subfield dimension {sub_dim} exceeds the tower guard {}",
            limits.tower_guard
        )));
    }
    // echelon of the columns vec(m^p), keyed by (y-monomial, z-monomial)
    let mut rows: BTreeMap<SparseKey, BTreeMap<SparseKey, FieldElem>> = BTreeMap::new();
    let mut idx = vec![0u32; level];
    loop {
        let mut exps = vec![0u32; tower.levels()];
        exps[..level].copy_from_slice(&idx);
        let mono = {
            let mut t = tower.zero();
            t.insert_term(
                YMono(exps.into_boxed_slice()),
                FieldElem::one(&tower.desc),
            );
            t
        };
        let mp = tower.pow_p(&mono)?;
        let mut col = decompose_elem(tower, &mp, p)?;
        // reduce against existing rows, then store by leading key
        reduce_sparse(&mut col, &rows)?;
        if let Some((lead, lc)) = col.iter().next_back().map(|(k, v)| (k.clone(), v.clone())) {
            let inv = lc.inv()?;
            for v in col.values_mut() {
                *v = v.mul(&inv)?;
            }
            rows.insert(lead, col);
        } else {
            return Err(Error::Internal(
                "p-th powers of basis monomials are dependent".into(),
            ));
        }
        // odometer over the subfield monomials
        let mut pos = 0;
        while pos < level {
            idx[pos] += 1;
            if (idx[pos] as u64) < tower.bounds[pos] {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == level {
            break;
        }
    }
    let mut target = decompose_elem(tower, g, p)?;
    reduce_sparse(&mut target, &rows)?;
    Ok(target.is_empty())
}

fn reduce_sparse(
    v: &mut BTreeMap<SparseKey, FieldElem>,
    rows: &BTreeMap<SparseKey, BTreeMap<SparseKey, FieldElem>>,
) -> Result<()> {
    loop {
        let Some((lead, coeff)) = v.iter().next_back().map(|(k, c)| (k.clone(), c.clone()))
        else {
            return Ok(());
        };
        let Some(row) = rows.get(&lead) else {
            return Ok(());
        };
        for (k, rv) in row {
            let delta = rv.mul(&coeff)?;
            match v.entry(k.clone()) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    if !delta.is_zero() {
                        e.insert(delta.neg());
                    }
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let s = e.get().sub(&delta);
                    if s.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = s;
                    }
                }
            }
        }
    }
}

/// Formal partial derivatives of a tower element with respect to a base
/// variable or a generator; well defined because every derivation of the
/// tower must satisfy them.
fn partial_z(tower: &Tower, v: &TowerElem, var: usize) -> Result<TowerElem> {
    let mut out = tower.zero();
    for (m, c) in &v.terms {
        let r = c.rat().unwrap();
        let dn = poly_partial(&r.num, var, tower.p);
        let dd = poly_partial(&r.den, var, tower.p);
        // (f/g)' = (f' g − f g') / g^2
        let guard = tower.desc.degree_guard();
        let num = dn
            .mul(&r.den, guard)?
            .sub(&r.num.mul(&dd, guard)?);
        let den = r.den.mul(&r.den, guard)?;
        let d = crate::exact::ratfun::RatFun::new(num, den, guard)?;
        out.insert_term(m.clone(), FieldElem::from_rat(&tower.desc, d));
    }
    Ok(out)
}

fn poly_partial(
    poly: &crate::exact::poly::Poly,
    var: usize,
    p: u64,
) -> crate::exact::poly::Poly {
    let mut out = crate::exact::poly::Poly::zero(poly.p, poly.nvars);
    for (m, &c) in &poly.terms {
        let e = m.0[var];
        let factor = (e as u64) % p;
        if factor == 0 {
            continue;
        }
        let mut exps = m.0.to_vec();
        exps[var] -= 1;
        out.terms.insert(
            crate::exact::poly::Mono(exps.into_boxed_slice()),
            factor * c % p,
        );
    }
    let mut cleaned = crate::exact::poly::Poly::zero(poly.p, poly.nvars);
    for (m, &c) in &out.terms {
        if c != 0 {
            cleaned.terms.insert(m.clone(), c);
        }
    }
    cleaned
}

fn partial_y(tower: &Tower, v: &TowerElem, gen: usize) -> TowerElem {
    let mut out = tower.zero();
    for (m, c) in &v.terms {
        let e = m.0[gen];
        let factor = (e as u64) % tower.p;
        if factor == 0 {
            continue;
        }
        let mut exps = m.0.to_vec();
        exps[gen] -= 1;
        let coeff = c
            .mul(&FieldElem::from_int(&tower.desc, factor as i64))
            .expect("scalar multiplication");
        out.insert_term(YMono(exps.into_boxed_slice()), coeff);
    }
    out
}

/// Derivation-based membership test for g ∈ (L_level)^p: the constants of all
/// derivations of L_level are exactly the p-th powers, so g is a p-th power
/// iff its differential row lies in the row span of the relation constraints.
/// Costs O(levels^3) tower operations, independent of [L : K].
fn in_pth_powers_derivation(tower: &Tower, level: usize, g: &TowerElem) -> Result<bool> {
    let m = tower.desc.vars().len();
    let cols = m + level;
    let diff_row = |v: &TowerElem| -> Result<Vec<TowerElem>> {
        let mut row = Vec::with_capacity(cols);
        for z in 0..m {
            row.push(partial_z(tower, v, z)?);
        }
        for y in 0..level {
            row.push(partial_y(tower, v, y));
        }
        Ok(row)
    };
    let mut mat: Vec<Vec<TowerElem>> = Vec::with_capacity(level);
    for j in 0..level {
        // relation y_{j+1}^{p^{f}} = g_{j+1} forces D(g_{j+1}) = 0
        mat.push(diff_row(&tower.rhs[j])?);
    }
    let target = diff_row(g)?;
    // row-span membership by Gaussian elimination over the tower field
    let mut rows = mat;
    let mut tgt = target;
    let mut used = vec![false; rows.len()];
    for col in 0..cols {
        let Some(pr) = (0..rows.len()).find(|&r| !used[r] && !rows[r][col].is_zero()) else {
            continue;
        };
        used[pr] = true;
        let inv = tower.inv(&rows[pr][col])?;
        let pivot_row: Vec<TowerElem> = rows[pr]
            .iter()
            .map(|x| tower.mul(x, &inv))
            .collect::<Result<_>>()?;
        rows[pr] = pivot_row.clone();
        for r in 0..rows.len() {
            if r != pr && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for c in 0..cols {
                    let delta = tower.mul(&pivot_row[c], &f)?;
                    rows[r][c] = tower.sub(&rows[r][c], &delta);
                }
            }
        }
        if !tgt[col].is_zero() {
            let f = tgt[col].clone();
            for c in 0..cols {
                let delta = tower.mul(&pivot_row[c], &f)?;
                tgt[c] = tower.sub(&tgt[c], &delta);
            }
        }
    }
    Ok(tgt.iter().all(TowerElem::is_zero))
}

/// Build and validate a tower: each level must define a field extension,
/// which happens exactly when the right-hand side is not a p-th power in the
/// tower built so far. Small levels are checked by the Frobenius-image
/// membership solve; levels whose subfield exceeds the guard fall back to the
/// derivation criterion, which needs no basis.
pub fn build_tower(pres: &TowerPresentation, limits: &Limits) -> Result<Tower> {
    let desc = FieldDescriptor::rational_function_with_guard(
        pres.p,
        pres.base_vars.clone(),
        limits.degree_guard,
    )?;
    if pres.levels.is_empty() {
        return Err(Error::Invalid("tower needs at least one level".into()));
    }
    for v in &pres.base_vars {
        if v.len() > 1 && v.starts_with('y') && v[1..].chars().all(|c| c.is_ascii_digit()) {
            return Err(Error::Invalid(format!(
                "base variable {v:?} collides with generator names"
            )));
        }
    }
    if pres.levels.iter().any(|l| l.exp == 0) {
        return Err(Error::Invalid("level exponents must be >= 1".into()));
    }
    // full-width skeleton with placeholder relations; monomial vectors keep
    // the same length throughout construction
    let fexps: Vec<u32> = pres.levels.iter().map(|l| l.exp).collect();
    let bounds: Vec<u64> = fexps
        .iter()
        .map(|&f| {
            let b = (pres.p as u128).pow(f);
            u64::try_from(b).map_err(|_| Error::Overflow)
        })
        .collect::<Result<_>>()?;
    let dim = bounds
        .iter()
        .try_fold(1u128, |a, &b| a.checked_mul(b as u128))
        .ok_or(Error::Overflow)?;
    let mut tower = Tower {
        desc,
        p: pres.p,
        fexps,
        bounds,
        rhs: Vec::new(),
        dim,
    };
    for _ in 0..pres.levels.len() {
        let z = tower.zero();
        tower.rhs.push(z);
    }
    for (li, level) in pres.levels.iter().enumerate() {
        let expr = parser::parse(&level.rhs)?;
        // only y1..y_li are in scope, so the value and the field test below
        // touch nothing beyond the already validated relations
        let g = tower.eval_expr(&expr, li)?;
        if g.is_zero() {
            return Err(Error::NotAField {
                level: li + 1,
                reason: "right-hand side is zero".into(),
            });
        }
        let sub_dim: u128 = tower.bounds[..li].iter().map(|&b| b as u128).product();
        let is_pth_power = if sub_dim <= limits.tower_guard as u128 {
            in_frobenius_image(&tower, li, &g, limits)?
        } else {
            in_pth_powers_derivation(&tower, li, &g)?
        };
        if is_pth_power {
            return Err(Error::NotAField {
                level: li + 1,
                reason: "right-hand side is a p-th power in the tower below".into(),
            });
        }
        tower.rhs[li] = g;
    }
    Ok(tower)
}

/// The outcome of the greedy normal-sequence search.
#[derive(Debug, Clone)]
pub struct TypeResult {
    /// Separable degree; towers are purely inseparable, so this is 1.
    pub n: u64,
    pub e: EType,
    pub sequence: Vec<TowerElem>,
}

/// Greedy normal generating sequence: repeatedly pick the candidate of
/// maximal exponent over the subfield generated so far (ties broken by the
/// lowest candidate index), and adjoin it.
pub fn normal_generating_sequence(
    tower: &Tower,
    candidates: &[TowerElem],
    limits: &Limits,
) -> Result<TypeResult> {
    if tower.dim > limits.tower_guard as u128 {
        return Err(Error::ResourceGuard(format!(
            "tower dimension {} exceeds the tower guard {}",
            tower.dim, limits.tower_guard
        )));
    }
    let mut sub = Subfield::base(tower)?;
    let mut exps: Vec<u32> = Vec::new();
    let mut sequence: Vec<TowerElem> = Vec::new();
    let mut remaining: Vec<usize> = (0..candidates.len()).collect();
    loop {
        let mut best: Option<(u32, usize)> = None;
        let mut still: Vec<usize> = Vec::new();
        for &ci in &remaining {
            if sub.contains(tower, &candidates[ci])? {
                continue;
            }
            still.push(ci);
            let e = exponent(tower, &candidates[ci], &sub)?;
            let better = match best {
                None => true,
                Some((be, bi)) => e > be || (e == be && ci < bi),
            };
            if better {
                best = Some((e, ci));
            }
        }
        let Some((e, ci)) = best else {
            break;
        };
        sub = sub.adjoin(tower, &candidates[ci], e)?;
        exps.push(e);
        sequence.push(candidates[ci].clone());
        remaining = still.into_iter().filter(|&x| x != ci).collect();
    }
    if (sub.dim() as u128) != tower.dim {
        return Err(Error::NotGenerating {
            reached: sub.dim() as u128,
            full: tower.dim,
        });
    }
    if exps.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::MonotonicityViolation(exps));
    }
    Ok(TypeResult {
        n: 1,
        e: EType::new(exps)?,
        sequence,
    })
}

/// The coefficients of the relations x_i^{q_i} = Σ a_d x_1^{q_i d_1} ...
/// x_{i-1}^{q_i d_{i-1}} with 0 <= d_j < p^{e_j − e_i}, for a normal
/// generating sequence. Every admissible index tuple is listed, including
/// those with coefficient zero.
#[derive(Debug, Clone)]
pub struct PickertCoefficients {
    pub per_generator: Vec<PickertLevel>,
}

#[derive(Debug, Clone)]
pub struct PickertLevel {
    /// 1-based generator index.
    pub i: usize,
    /// p^{e_j − e_i} for j < i.
    pub ranges: Vec<u64>,
    /// (d_1, .., d_{i-1}) ↦ a, in odometer order (last index fastest).
    pub entries: Vec<(Vec<u64>, FieldElem)>,
}

impl PickertCoefficients {
    pub fn entry_count(&self) -> u128 {
        self.per_generator
            .iter()
            .map(|l| l.entries.len() as u128)
            .sum()
    }

    /// All coefficient values, flattened in generator-then-odometer order.
    pub fn generators(&self) -> Vec<FieldElem> {
        self.per_generator
            .iter()
            .flat_map(|l| l.entries.iter().map(|(_, a)| a.clone()))
            .collect()
    }
}

pub fn pickert_coefficients(
    tower: &Tower,
    tr: &TypeResult,
    _limits: &Limits,
) -> Result<PickertCoefficients> {
    let p = tower.p;
    let e = tr.e.exps();
    let r = e.len();
    let mut per_generator = Vec::with_capacity(r);
    for i in 1..=r {
        let qi = (p as u128).pow(e[i - 1]);
        let target = tower.frobenius(&tr.sequence[i - 1], e[i - 1])?;
        let ranges: Vec<u64> = (0..i - 1)
            .map(|j| {
                let diff = e[j] - e[i - 1];
                u64::try_from((p as u128).pow(diff)).map_err(|_| Error::Overflow)
            })
            .collect::<Result<_>>()?;
        // monomials Π_j x_j^{q_i d_j} for every admissible d
        let mut d = vec![0u64; i - 1];
        let mut monomials: Vec<(Vec<u64>, TowerElem)> = Vec::new();
        // x_j^{q_i} bases
        let mut bases = Vec::with_capacity(i - 1);
        for j in 0..i - 1 {
            bases.push(tower.pow(&tr.sequence[j], qi)?);
        }
        loop {
            let mut m = tower.one();
            for j in 0..i - 1 {
                if d[j] > 0 {
                    m = tower.mul(&m, &tower.pow(&bases[j], d[j] as u128)?)?;
                }
            }
            monomials.push((d.clone(), m));
            // odometer, last index fastest
            let mut pos = i - 1;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                d[pos] += 1;
                if d[pos] < ranges[pos] {
                    break;
                }
                d[pos] = 0;
                if pos == 0 {
                    break;
                }
            }
            if d.iter().all(|&x| x == 0) {
                break;
            }
        }
        // solve Σ a_d m_d = target over K on the union support
        let mut support: std::collections::BTreeSet<YMono> = std::collections::BTreeSet::new();
        for (_, m) in &monomials {
            support.extend(m.terms.keys().cloned());
        }
        support.extend(target.terms.keys().cloned());
        let support: Vec<YMono> = support.into_iter().collect();
        let rows = support.len();
        let cols = monomials.len();
        let mut mat = Mat::zero(&tower.desc, rows, cols);
        for (c, (_, m)) in monomials.iter().enumerate() {
            for (ri, key) in support.iter().enumerate() {
                if let Some(v) = m.terms.get(key) {
                    *mat.at_mut(ri, c) = v.clone();
                }
            }
        }
        let rhs: Vec<FieldElem> = support
            .iter()
            .map(|k| {
                target
                    .terms
                    .get(k)
                    .cloned()
                    .unwrap_or_else(|| FieldElem::zero(&tower.desc))
            })
            .collect();
        let Some(sol) = mat.solve(&rhs)? else {
            return Err(Error::NoRepresentation(i));
        };
        if !mat.kernel()?.is_empty() {
            return Err(Error::Internal(
                "prescribed monomials are linearly dependent".into(),
            ));
        }
        let entries: Vec<(Vec<u64>, FieldElem)> = monomials
            .iter()
            .map(|(d, _)| d.clone())
            .zip(sol)
            .collect();
        per_generator.push(PickertLevel {
            i,
            ranges,
            entries,
        });
    }
    Ok(PickertCoefficients { per_generator })
}

/// An explicit generating set for a field of definition, witnessing the
/// upper bound n · Σ p^{s_i − i e_i} on the essential dimension.
#[derive(Debug, Clone)]
pub struct DescentCertificate {
    pub generators: Vec<FieldElem>,
    pub generator_count: u128,
    pub bound: u128,
}

pub fn descent_certificate(
    tower: &Tower,
    tr: &TypeResult,
    limits: &Limits,
) -> Result<DescentCertificate> {
    let coeffs = pickert_coefficients(tower, tr, limits)?;
    let p = tower.p;
    let e = tr.e.exps();
    let mut expected: u128 = 0;
    for i in 1..=e.len() {
        let s_i: u64 = e[..i].iter().map(|&x| x as u64).sum();
        let exp = s_i - i as u64 * e[i - 1] as u64;
        expected += (p as u128).pow(u32::try_from(exp).map_err(|_| Error::Overflow)?);
    }
    let count = coeffs.entry_count();
    if count != expected {
        return Err(Error::Internal(format!(
            "certificate size {count} differs from Σ p^(s_i − i e_i) = {expected}"
        )));
    }
    Ok(DescentCertificate {
        generators: coeffs.generators(),
        generator_count: count,
        bound: tr.n as u128 * count,
    })
}

/// [L : K(L^p)] computed from the closure of the p-th powers of the monomial
/// basis.
pub fn k_lp_index(tower: &Tower, limits: &Limits) -> Result<u128> {
    if tower.dim > limits.tower_guard as u128 {
        return Err(Error::ResourceGuard(format!(
            "tower dimension {} exceeds the tower guard {}",
            tower.dim, limits.tower_guard
        )));
    }
    let mut ech = SparseEchelon::new();
    ech.insert(tower, &tower.one())?;
    let r = tower.levels();
    let mut idx = vec![0u32; r];
    loop {
        let mut t = tower.zero();
        t.insert_term(
            YMono(idx.clone().into_boxed_slice()),
            FieldElem::one(&tower.desc),
        );
        let mp = tower.pow_p(&t)?;
        ech.insert(tower, &mp)?;
        let mut pos = 0;
        while pos < r {
            idx[pos] += 1;
            if (idx[pos] as u64) < tower.bounds[pos] {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == r {
            break;
        }
    }
    let sub = ech.dim() as u128;
    if tower.dim % sub != 0 {
        return Err(Error::IndexNotPPower(0));
    }
    let index = tower.dim / sub;
    let mut check = index;
    while check % tower.p as u128 == 0 {
        check /= tower.p as u128;
    }
    if check != 1 {
        return Err(Error::IndexNotPPower(index));
    }
    Ok(index)
}

/// [L : K(L^p)] = p^{dim Der_K(L)}, computed from the relation constraint
/// matrix alone; an independent route that never materialises a basis.
pub fn k_lp_index_via_derivations(tower: &Tower) -> Result<u128> {
    let r = tower.levels();
    // constraint rows: (∂g_i/∂y_1, .., ∂g_i/∂y_r) for each level i
    let mut rows: Vec<Vec<TowerElem>> = Vec::with_capacity(r);
    for i in 0..r {
        rows.push((0..r).map(|y| partial_y(tower, &tower.rhs[i], y)).collect());
    }
    // rank over the tower field
    let mut rank = 0usize;
    let mut used = vec![false; r];
    for col in 0..r {
        let Some(pr) = (0..r).find(|&i| !used[i] && !rows[i][col].is_zero()) else {
            continue;
        };
        used[pr] = true;
        rank += 1;
        let inv = tower.inv(&rows[pr][col])?;
        let pivot: Vec<TowerElem> = rows[pr]
            .iter()
            .map(|x| tower.mul(x, &inv))
            .collect::<Result<_>>()?;
        for i in 0..r {
            if i != pr && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for c in 0..r {
                    let delta = tower.mul(&pivot[c], &f)?;
                    rows[i][c] = tower.sub(&rows[i][c], &delta);
                }
            }
        }
        rows[pr] = pivot;
    }
    let der_dim = r - rank;
    Ok((tower.p as u128)
        .checked_pow(der_dim as u32)
        .ok_or(Error::Overflow)?)
}

/// The reference tower of type e: y_i^{p^{e_i}} = z_i. With a seed, the
/// right-hand sides of later levels are perturbed by admissible monomials in
/// the earlier generators (exponents q_i·d_j with d_j < p^{e_j − e_i}), and
/// the result is re-validated; perturbations never touch the fresh variable
/// z_i, so field-ness is preserved.
pub fn construct_example(e: &EType, p: u64, seed: Option<u64>) -> TowerPresentation {
    let r = e.r();
    let base_vars: Vec<String> = (1..=r).map(|i| format!("z{i}")).collect();
    let mut levels: Vec<TowerLevel> = e
        .exps()
        .iter()
        .enumerate()
        .map(|(i, &ei)| TowerLevel {
            exp: ei,
            rhs: format!("z{}", i + 1),
        })
        .collect();
    let Some(seed) = seed else {
        return TowerPresentation {
            base_vars,
            levels,
            p,
        };
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 2..=r {
        let ei = e.exps()[i - 1];
        let qi: u128 = (p as u128).pow(ei);
        let ranges: Vec<u64> = (0..i - 1)
            .map(|j| p.pow(e.exps()[j] - ei))
            .collect();
        if ranges.iter().all(|&x| x == 1) {
            continue; // only the empty monomial is admissible
        }
        let terms = 1 + (rng.next_u32() % 2) as usize;
        let mut added = Vec::new();
        for _ in 0..terms {
            // a nonzero admissible tuple
            let mut d: Vec<u64> = ranges.iter().map(|&m| rng.next_u64() % m).collect();
            if d.iter().all(|&x| x == 0) {
                let j = (rng.next_u64() as usize) % d.len();
                if ranges[j] > 1 {
                    d[j] = 1 + rng.next_u64() % (ranges[j] - 1);
                } else {
                    continue;
                }
            }
            let coeff_var = 1 + (rng.next_u64() as usize) % r;
            let mono: Vec<String> = d
                .iter()
                .enumerate()
                .filter(|(_, &dj)| dj > 0)
                .map(|(j, &dj)| format!("y{}^{}", j + 1, qi as u64 * dj))
                .collect();
            if mono.is_empty() {
                continue;
            }
            added.push(format!("z{coeff_var}*{}", mono.join("*")));
        }
        if !added.is_empty() {
            levels[i - 1].rhs = format!("z{} + {}", i, added.join(" + "));
        }
    }
    TowerPresentation {
        base_vars,
        levels,
        p,
    }
}

/// The plain generator candidates y_1, .., y_r.
pub fn default_candidates(tower: &Tower) -> Vec<TowerElem> {
    (1..=tower.levels()).map(|i| tower.generator(i)).collect()
}

/// Obfuscated candidates y_1 + y_2, y_2 + y_3, .., y_r: still a generating
/// set, but no candidate is a plain generator.
pub fn obfuscated_candidates(tower: &Tower) -> Vec<TowerElem> {
    let r = tower.levels();
    (1..=r)
        .map(|i| {
            if i < r {
                tower.add(&tower.generator(i), &tower.generator(i + 1))
            } else {
                tower.generator(i)
            }
        })
        .collect()
}

/// Deterministically shuffled candidate list (for the type-invariance
/// checks).
pub fn scrambled_candidates(tower: &Tower, seed: u64) -> Vec<TowerElem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cands = obfuscated_candidates(tower);
    for i in (1..cands.len()).rev() {
        let j = (rng.next_u64() as usize) % (i + 1);
        cands.swap(i, j);
    }
    cands
}

/// Export the tower as a structure-constant table over K (for desk-scale
/// cross-checks with the algebra machinery).
pub fn tower_to_structure_constants(tower: &Tower, limits: &Limits) -> Result<StructureConstants> {
    let dim = usize::try_from(tower.dim).map_err(|_| Error::Overflow)?;
    let entries = (dim as u128).pow(3);
    if entries > limits.enum_guard as u128 {
        return Err(Error::ResourceGuard(format!(
            "structure-constant export with {entries} entries exceeds the guard"
        )));
    }
    // basis = monomials in odometer order (first level fastest)
    let r = tower.levels();
    let mut basis: Vec<YMono> = Vec::with_capacity(dim);
    let mut idx = vec![0u32; r];
    loop {
        basis.push(YMono(idx.clone().into_boxed_slice()));
        let mut pos = 0;
        while pos < r {
            idx[pos] += 1;
            if (idx[pos] as u64) < tower.bounds[pos] {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == r {
            break;
        }
    }
    let rank_of = |m: &YMono| -> usize { basis.iter().position(|b| b == m).unwrap() };
    let zero = FieldElem::zero(&tower.desc);
    let mut table = vec![zero.clone(); dim * dim * dim];
    for (i, m1) in basis.iter().enumerate() {
        for (j, m2) in basis.iter().enumerate() {
            if j < i {
                continue;
            }
            let exps: Vec<u32> = m1.0.iter().zip(m2.0.iter()).map(|(a, b)| a + b).collect();
            let prod = tower.reduce_mono(&exps, &FieldElem::one(&tower.desc))?;
            for (m, c) in &prod.terms {
                let h = rank_of(m);
                table[(i * dim + j) * dim + h] = c.clone();
                table[(j * dim + i) * dim + h] = c.clone();
            }
        }
    }
    let mut unit = vec![zero; dim];
    unit[0] = FieldElem::one(&tower.desc);
    StructureConstants::new(tower.desc.clone(), dim, table, unit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn limits() -> Limits {
        Limits::default()
    }

    fn simple(p: u64, levels: &[(u32, &str)]) -> TowerPresentation {
        TowerPresentation {
            base_vars: (1..=levels.len().max(2))
                .map(|i| format!("z{i}"))
                .collect(),
            levels: levels
                .iter()
                .map(|&(exp, rhs)| TowerLevel {
                    exp,
                    rhs: rhs.into(),
                })
                .collect(),
            p,
        }
    }

    #[test]
    fn square_root_of_z1_is_a_field() {
        let t = build_tower(&simple(2, &[(1, "z1")]), &limits()).unwrap();
        assert_eq!(t.dim(), 2);
    }

    #[test]
    fn square_of_z1_is_rejected() {
        let err = build_tower(&simple(2, &[(1, "z1^2")]), &limits()).unwrap_err();
        assert!(matches!(err, Error::NotAField { level: 1, .. }));
    }

    #[test]
    fn two_level_tower_builds() {
        let t = build_tower(&simple(2, &[(2, "z1"), (1, "z2")]), &limits()).unwrap();
        assert_eq!(t.dim(), 8);
        assert_eq!(t.levels(), 2);
    }

    #[test]
    fn relation_reduces() {
        let t = build_tower(&simple(2, &[(1, "z1")]), &limits()).unwrap();
        let y = t.generator(1);
        let y2 = t.mul(&y, &y).unwrap();
        let z1 = t.from_scalar(FieldElem::var(t.base_field(), "z1").unwrap());
        assert_eq!(y2, z1);
    }

    #[test]
    fn inverse_works() {
        let t = build_tower(&simple(2, &[(2, "z1"), (1, "z2")]), &limits()).unwrap();
        let y1 = t.generator(1);
        let x = t.add(&y1, &t.one());
        let xi = t.inv(&x).unwrap();
        assert_eq!(t.mul(&x, &xi).unwrap(), t.one());
    }

    #[test]
    fn exponent_examples() {
        // y^4 = z1 over p=2: exponent(y) = 2, exponent(y^2) = 1
        let t = build_tower(&simple(2, &[(2, "z1")]), &limits()).unwrap();
        let base = Subfield::base(&t).unwrap();
        let y = t.generator(1);
        assert_eq!(exponent(&t, &y, &base).unwrap(), 2);
        let y2 = t.mul(&y, &y).unwrap();
        assert_eq!(exponent(&t, &y2, &base).unwrap(), 1);
        assert_eq!(exponent(&t, &t.one(), &base).unwrap(), 0);
    }

    #[test]
    fn greedy_type_2_1() {
        let t = build_tower(&simple(2, &[(2, "z1"), (1, "z2")]), &limits()).unwrap();
        let tr = normal_generating_sequence(&t, &default_candidates(&t), &limits()).unwrap();
        assert_eq!(tr.e.exps(), &[2, 1]);
        let tr2 = normal_generating_sequence(&t, &obfuscated_candidates(&t), &limits()).unwrap();
        assert_eq!(tr2.e.exps(), &[2, 1]);
    }

    #[test]
    fn pickert_of_reference_towers() {
        let t = build_tower(&simple(2, &[(2, "z1"), (1, "z2")]), &limits()).unwrap();
        let tr = normal_generating_sequence(&t, &default_candidates(&t), &limits()).unwrap();
        let pc = pickert_coefficients(&t, &tr, &limits()).unwrap();
        assert_eq!(pc.entry_count(), 3); // 2^0 + 2^1
        let k = t.base_field();
        // i=1: a_() = z1; i=2: a_(0) = z2, a_(1) = 0
        assert_eq!(pc.per_generator[0].entries[0].1, FieldElem::var(k, "z1").unwrap());
        assert_eq!(pc.per_generator[1].entries[0].1, FieldElem::var(k, "z2").unwrap());
        assert!(pc.per_generator[1].entries[1].1.is_zero());
        let cert = descent_certificate(&t, &tr, &limits()).unwrap();
        assert_eq!(cert.generator_count, 3);
        assert_eq!(cert.bound, 3);
    }

    #[test]
    fn k_lp_index_examples() {
        let t = build_tower(&simple(2, &[(2, "z1"), (1, "z2")]), &limits()).unwrap();
        assert_eq!(k_lp_index(&t, &limits()).unwrap(), 4);
        assert_eq!(k_lp_index_via_derivations(&t).unwrap(), 4);
        let t = build_tower(&simple(3, &[(1, "z1")]), &limits()).unwrap();
        assert_eq!(k_lp_index(&t, &limits()).unwrap(), 3);
        let t = build_tower(&simple(2, &[(1, "z1"), (1, "z2")]), &limits()).unwrap();
        assert_eq!(k_lp_index(&t, &limits()).unwrap(), 4);
    }

    #[test]
    fn collapsed_tower_has_smaller_type() {
        // y1^2 = z1, y2^2 = y1: a single generator y2 of exponent 2 suffices,
        // and [L : K(L^p)] = p^1
        let t = build_tower(&simple(2, &[(1, "z1"), (1, "y1")]), &limits()).unwrap();
        assert_eq!(t.dim(), 4);
        let tr = normal_generating_sequence(&t, &default_candidates(&t), &limits()).unwrap();
        assert_eq!(tr.e.exps(), &[2]);
        assert_eq!(k_lp_index(&t, &limits()).unwrap(), 2);
        assert_eq!(k_lp_index_via_derivations(&t).unwrap(), 2);
    }

    #[test]
    fn construct_example_roundtrip_small() {
        for p in [2u64, 3] {
            for e in [vec![1], vec![2, 1], vec![1, 1]] {
                let et = EType::new(e.clone()).unwrap();
                for seed in [None, Some(0), Some(7)] {
                    let pres = construct_example(&et, p, seed);
                    let t = build_tower(&pres, &limits()).unwrap();
                    let tr =
                        normal_generating_sequence(&t, &default_candidates(&t), &limits())
                            .unwrap();
                    assert_eq!(tr.e, et, "p={p} e={e:?} seed={seed:?}");
                }
            }
        }
    }

    #[test]
    fn membership_routes_agree() {
        // g = z2 + z1*y1^2 is not a square in K(y1); g = y1^2 is
        let pres = simple(2, &[(2, "z1")]);
        let t = build_tower(&pres, &limits()).unwrap();
        let g_good = t.parse_elem("z2 + z1*y1^2").unwrap();
        let g_bad = t.parse_elem("y1^2").unwrap();
        for (g, expect) in [(&g_good, false), (&g_bad, true)] {
            assert_eq!(
                in_frobenius_image(&t, 1, g, &limits()).unwrap(),
                expect
            );
            assert_eq!(in_pth_powers_derivation(&t, 1, g).unwrap(), expect);
        }
    }
}
