//! The truncated polynomial algebras Λ_e = k[x_1..x_r]/(x_1^{q_1},..,x_r^{q_r})
//! with q_i = p^{e_i}, their n-fold products Λ_{n,e}, exhaustive F_q-point
//! enumeration of the schemes attached to them (elements killed by a p-power
//! of Frobenius, endomorphisms, automorphisms), and the closed-form dimension
//! bookkeeping the counts are checked against.

use crate::error::{Error, Result};
use crate::exact::{FieldDescriptor, FieldElem, FieldKind};
use crate::fdalg::{self, AlgebraMorphism, StructureConstants};
use crate::Limits;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// The invariant e = (e_1 >= e_2 >= .. >= e_r >= 1).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EType(Vec<u32>);

impl EType {
    pub fn new(e: Vec<u32>) -> Result<Self> {
        if e.is_empty() {
            return Err(Error::Invalid("type must have r >= 1 entries".into()));
        }
        if e.iter().any(|&x| x == 0) {
            return Err(Error::Invalid("every exponent must be >= 1".into()));
        }
        if e.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Invalid(format!(
                "exponents must be nonincreasing, got {e:?}"
            )));
        }
        Ok(EType(e))
    }

    /// Parse a comma-separated list like `2,1`.
    pub fn parse(src: &str) -> Result<Self> {
        let e = src
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Invalid(format!("bad exponent {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        EType::new(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn r(&self) -> usize {
        self.0.len()
    }

    /// s_i = e_1 + .. + e_i for 1-based i.
    pub fn s(&self, i: usize) -> u64 {
        self.0[..i].iter().map(|&x| x as u64).sum()
    }

    pub fn s_total(&self) -> u64 {
        self.s(self.r())
    }

    /// q_i = p^{e_i} for 1-based i.
    pub fn q(&self, p: u64, i: usize) -> Result<u128> {
        (p as u128).checked_pow(self.0[i - 1]).ok_or(Error::Overflow)
    }

    /// dim Λ_e = p^{s_r}.
    pub fn lambda_dim(&self, p: u64) -> Result<u128> {
        let s = u32::try_from(self.s_total()).map_err(|_| Error::Overflow)?;
        (p as u128).checked_pow(s).ok_or(Error::Overflow)
    }
}

impl std::fmt::Display for EType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Monomial exponent tuple (i_1, .., i_r) with 0 <= i_j < q_j; ranked
/// row-major with the last index fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoIndex(pub Vec<u64>);

fn mono_bounds(e: &EType, p: u64) -> Result<Vec<u64>> {
    e.exps()
        .iter()
        .map(|&ei| {
            let q = (p as u128).pow(ei);
            u64::try_from(q).map_err(|_| Error::Overflow)
        })
        .collect()
}

fn mono_rank(idx: &[u64], bounds: &[u64]) -> u64 {
    let mut rank = 0;
    for (i, b) in idx.iter().zip(bounds) {
        rank = rank * b + i;
    }
    rank
}

fn mono_unrank(mut rank: u64, bounds: &[u64]) -> Vec<u64> {
    let mut idx = vec![0; bounds.len()];
    for j in (0..bounds.len()).rev() {
        idx[j] = rank % bounds[j];
        rank /= bounds[j];
    }
    idx
}

/// Λ_{n,e} over the given base field: n blocks of the monomial algebra, basis
/// ordered block-major with monomial rank inside each block. Monomial products
/// truncate at x_i^{q_i} = 0.
pub fn lambda_algebra(
    n: u64,
    e: &EType,
    base: &FieldDescriptor,
    limits: &Limits,
) -> Result<StructureConstants> {
    let p = base.p();
    let bounds = mono_bounds(e, p)?;
    let block = bounds.iter().try_fold(1u64, |a, &b| a.checked_mul(b)).ok_or(Error::Overflow)?;
    let dim = block.checked_mul(n).ok_or(Error::Overflow)? as usize;
    let entries = (dim as u128).pow(3);
    if entries > limits.enum_guard as u128 {
        return Err(Error::ResourceGuard(format!(
            "structure-constant table with {entries} entries exceeds the guard"
        )));
    }
    let zero = FieldElem::zero(base);
    let one = FieldElem::one(base);
    let mut table = vec![zero.clone(); dim * dim * dim];
    for b in 0..n as usize {
        for m1 in 0..block {
            let i1 = mono_unrank(m1, &bounds);
            for m2 in 0..block {
                let i2 = mono_unrank(m2, &bounds);
                let sum: Vec<u64> = i1.iter().zip(&i2).map(|(a, c)| a + c).collect();
                if sum.iter().zip(&bounds).any(|(s, b)| s >= b) {
                    continue; // truncated to zero
                }
                let x = b * block as usize + m1 as usize;
                let y = b * block as usize + m2 as usize;
                let z = b * block as usize + mono_rank(&sum, &bounds) as usize;
                table[(x * dim + y) * dim + z] = one.clone();
            }
        }
    }
    let mut unit = vec![zero; dim];
    for b in 0..n as usize {
        unit[b * block as usize] = one.clone();
    }
    StructureConstants::new(base.clone(), dim, table, unit)
}

/// Lookup-table arithmetic for a small finite field, indexing elements by
/// their position in the canonical enumeration order.
pub(crate) struct SmallFq {
    pub q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    pub elems: Vec<FieldElem>,
}

impl SmallFq {
    pub fn build(desc: &FieldDescriptor) -> Result<Self> {
        let order = desc
            .order()
            .ok_or_else(|| Error::UnsupportedField("need a finite field".into()))?;
        if order > 256 {
            return Err(Error::ResourceGuard(format!(
                "lookup tables limited to q <= 256, got {order}"
            )));
        }
        let elems = desc.enumerate_elements()?;
        let q = elems.len();
        let index_of = |x: &FieldElem| -> u8 {
            elems
                .iter()
                .position(|y| y == x)
                .expect("closed under the operations") as u8
        };
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for i in 0..q {
            for j in 0..q {
                add[i * q + j] = index_of(&elems[i].add(&elems[j]));
                mul[i * q + j] = index_of(&elems[i].mul(&elems[j])?);
            }
        }
        Ok(SmallFq { q, add, mul, elems })
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }
}

/// Dense model of Λ_e ⊗ F_q for exhaustive enumeration: monomial products are
/// precomputed as ranks, elements are coefficient index vectors.
pub(crate) struct LambdaModel {
    pub fq: SmallFq,
    pub dim: usize,
    /// product rank or usize::MAX for "truncated to zero"
    prod: Vec<usize>,
}

impl LambdaModel {
    pub fn build(e: &EType, q_desc: &FieldDescriptor) -> Result<Self> {
        let p = q_desc.p();
        let bounds = mono_bounds(e, p)?;
        let dim128: u128 = bounds.iter().map(|&b| b as u128).product();
        let dim = usize::try_from(dim128).map_err(|_| Error::Overflow)?;
        let fq = SmallFq::build(q_desc)?;
        let mut prod = vec![usize::MAX; dim * dim];
        for m1 in 0..dim as u64 {
            let i1 = mono_unrank(m1, &bounds);
            for m2 in 0..dim as u64 {
                let i2 = mono_unrank(m2, &bounds);
                let sum: Vec<u64> = i1.iter().zip(&i2).map(|(a, c)| a + c).collect();
                if sum.iter().zip(&bounds).all(|(s, b)| s < b) {
                    prod[m1 as usize * dim + m2 as usize] =
                        mono_rank(&sum, &bounds) as usize;
                }
            }
        }
        Ok(LambdaModel { fq, dim, prod })
    }

    pub fn mul(&self, a: &[u8], b: &[u8], out: &mut [u8]) {
        out.fill(0);
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                let t = self.prod[i * self.dim + j];
                if t != usize::MAX {
                    out[t] = self.fq.add(out[t], self.fq.mul(x, y));
                }
            }
        }
    }

    pub fn pow(&self, a: &[u8], mut e: u64) -> Vec<u8> {
        let mut base = a.to_vec();
        let mut acc = vec![0u8; self.dim];
        acc[0] = 1; // index 1 in SmallFq enumeration is the element 1
        let mut tmp = vec![0u8; self.dim];
        // element indices: enumeration order puts 0 at index 0 and 1 at index 1
        acc[0] = 1;
        while e > 0 {
            if e & 1 == 1 {
                self.mul(&acc, &base, &mut tmp);
                std::mem::swap(&mut acc, &mut tmp);
            }
            e >>= 1;
            if e > 0 {
                self.mul(&base, &base.clone(), &mut tmp);
                std::mem::swap(&mut base, &mut tmp);
            }
        }
        acc
    }

    pub fn is_zero(v: &[u8]) -> bool {
        v.iter().all(|&c| c == 0)
    }
}

/// How many candidate vectors an exhaustive pass over Λ_e ⊗ F_q touches.
fn candidate_count(q: u128, dim: usize) -> Result<u128> {
    q.checked_pow(dim as u32).ok_or(Error::Overflow)
}

/// q^exp as a symbolic pair, printable even when the value is astronomical.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Power {
    pub base: u64,
    pub exp: u128,
}

impl Power {
    pub fn value(&self) -> Option<u128> {
        let exp = u32::try_from(self.exp).ok()?;
        (self.base as u128).checked_pow(exp)
    }
}

impl std::fmt::Display for Power {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "{}^{}", self.base, self.exp),
        }
    }
}

/// Result of one counting run: the enumerated count (absent when the guard
/// blocked enumeration), the closed-form prediction when one exists, and
/// whether the two agree.
#[derive(Debug, Clone)]
pub struct PointCount {
    pub count: Option<u128>,
    pub closed_form: Option<Power>,
    pub matches: Option<bool>,
}

fn count_report(count: Option<u128>, closed: Option<Power>) -> PointCount {
    let matches = match (&count, &closed) {
        (Some(c), Some(cf)) => Some(cf.value().map_or(false, |v| v == *c)),
        _ => None,
    };
    PointCount {
        count,
        closed_form: closed,
        matches,
    }
}

/// dim R_{Λ_e/k}(α_{q_l}) = p^{s_r} − p^{s_l − l·e_l}; the count over F_q is
/// q to this exponent.
pub fn alpha_dim_factor(e: &EType, l: usize, p: u64) -> Result<u128> {
    if l == 0 || l > e.r() {
        return Err(Error::Invalid(format!("factor index {l} out of range")));
    }
    let total = e.lambda_dim(p)?;
    let sl = e.s(l);
    let le = l as u64 * e.exps()[l - 1] as u64;
    let killed_exp = u32::try_from(sl - le).map_err(|_| Error::Overflow)?;
    let killed = (p as u128).checked_pow(killed_exp).ok_or(Error::Overflow)?;
    Ok(total - killed)
}

fn validate_q(e: &EType, q_desc: &FieldDescriptor) -> Result<u128> {
    let _ = e;
    match q_desc.kind() {
        FieldKind::Prime | FieldKind::Finite => Ok(q_desc.order().unwrap()),
        FieldKind::RationalFunction => Err(Error::UnsupportedField(
            "point counting needs a finite field".into(),
        )),
    }
}

/// Exhaustive count of {X in Λ_e ⊗ F_q : X^{q_l} = 0}, together with the
/// closed form q^{dim_factor} from the coordinate equations.
pub fn alpha_points(
    e: &EType,
    l: usize,
    q_desc: &FieldDescriptor,
    limits: &Limits,
) -> Result<PointCount> {
    let q = validate_q(e, q_desc)?;
    let p = q_desc.p();
    let closed = Power {
        base: q as u64,
        exp: alpha_dim_factor(e, l, p)?,
    };
    let model = LambdaModel::build(e, q_desc)?;
    let candidates = candidate_count(q, model.dim)?;
    if candidates > limits.enum_guard as u128 {
        return Err(Error::ResourceGuard(format!(
            "{candidates} candidates exceed the enumeration guard {}",
            limits.enum_guard
        )));
    }
    let ql = e.q(p, l)? as u64;
    let count = par_count_vectors(&model, q as usize, |model, v| {
        LambdaModel::is_zero(&model.pow(v, ql))
    });
    Ok(count_report(Some(count), Some(closed)))
}

/// All elements of α_{q_l}(Λ_e ⊗ F_q), in lexicographic coordinate order.
pub(crate) fn alpha_set(
    e: &EType,
    l: usize,
    model: &LambdaModel,
    p: u64,
    limits: &Limits,
) -> Result<Vec<Vec<u8>>> {
    let q = model.fq.q as u128;
    let candidates = candidate_count(q, model.dim)?;
    if candidates > limits.enum_guard as u128 {
        return Err(Error::ResourceGuard(format!(
            "{candidates} candidates exceed the enumeration guard {}",
            limits.enum_guard
        )));
    }
    let ql = e.q(p, l)? as u64;
    let mut out = Vec::new();
    let mut v = vec![0u8; model.dim];
    loop {
        if LambdaModel::is_zero(&model.pow(&v, ql)) {
            out.push(v.clone());
        }
        if !next_vector(&mut v, model.fq.q as u8) {
            break;
        }
    }
    Ok(out)
}

/// Lexicographic odometer: first coordinate most significant. Returns false
/// after the last vector.
fn next_vector(v: &mut [u8], q: u8) -> bool {
    for pos in (0..v.len()).rev() {
        v[pos] += 1;
        if v[pos] < q {
            return true;
        }
        v[pos] = 0;
    }
    false
}

/// Parallel count over all coordinate vectors, partitioned by the first
/// coordinate; the sum is order-independent.
fn par_count_vectors<F>(model: &LambdaModel, q: usize, pred: F) -> u128
where
    F: Fn(&LambdaModel, &[u8]) -> bool + Sync,
{
    if model.dim == 0 {
        return 0;
    }
    (0..q as u8)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&first| {
            let mut v = vec![0u8; model.dim];
            v[0] = first;
            let mut count = 0u128;
            loop {
                if pred(model, &v) {
                    count += 1;
                }
                // advance only positions 1.., keeping the first fixed
                let mut pos = model.dim;
                loop {
                    if pos == 1 {
                        return count;
                    }
                    pos -= 1;
                    v[pos] += 1;
                    if (v[pos] as usize) < q {
                        break;
                    }
                    v[pos] = 0;
                }
                if model.dim == 1 {
                    return count;
                }
            }
        })
        .sum()
}

/// Endomorphism points: the per-factor sets are enumerated independently and
/// the count is their product; the closed form is q^{Σ_l dim_factor[l]}.
pub fn end_points(e: &EType, q_desc: &FieldDescriptor, limits: &Limits) -> Result<PointCount> {
    let q = validate_q(e, q_desc)?;
    let p = q_desc.p();
    let model = LambdaModel::build(e, q_desc)?;
    let mut count: u128 = 1;
    let mut exp_sum: u128 = 0;
    for l in 1..=e.r() {
        let set = alpha_set(e, l, &model, p, limits)?;
        count = count.checked_mul(set.len() as u128).ok_or(Error::Overflow)?;
        exp_sum += alpha_dim_factor(e, l, p)?;
    }
    let closed = Power {
        base: q as u64,
        exp: exp_sum,
    };
    Ok(count_report(Some(count), Some(closed)))
}

/// Automorphism points: End tuples whose induced linear action on the
/// monomial basis is nonsingular, counted exhaustively.
pub fn aut_points(e: &EType, q_desc: &FieldDescriptor, limits: &Limits) -> Result<PointCount> {
    let count = aut_points_count(e, q_desc, limits)?;
    Ok(count_report(Some(count), None))
}

fn aut_points_count(e: &EType, q_desc: &FieldDescriptor, limits: &Limits) -> Result<u128> {
    let _ = validate_q(e, q_desc)?;
    let p = q_desc.p();
    let model = LambdaModel::build(e, q_desc)?;
    let r = e.r();
    let mut factor_sets = Vec::with_capacity(r);
    let mut tuples: u128 = 1;
    for l in 1..=r {
        let set = alpha_set(e, l, &model, p, limits)?;
        tuples = tuples.checked_mul(set.len() as u128).ok_or(Error::Overflow)?;
        factor_sets.push(set);
    }
    if tuples > limits.enum_guard as u128 {
        return Err(Error::ResourceGuard(format!(
            "{tuples} endomorphism tuples exceed the enumeration guard {}",
            limits.enum_guard
        )));
    }
    let bounds = mono_bounds(e, p)?;
    // powers[l][i] = F_l^i for 0 <= i < q_l, refreshed per choice of F_l
    let count = factor_sets[0]
        .par_iter()
        .map(|first| {
            let mut powers: Vec<Vec<Vec<u8>>> = Vec::with_capacity(r);
            powers.push(element_powers(&model, first, bounds[0]));
            let mut c = 0u128;
            dfs_aut(&model, &factor_sets, &bounds, &mut powers, 1, &mut c);
            c
        })
        .sum();
    Ok(count)
}

fn element_powers(model: &LambdaModel, f: &[u8], q: u64) -> Vec<Vec<u8>> {
    let mut out = Vec::with_capacity(q as usize);
    let mut unit = vec![0u8; model.dim];
    unit[0] = 1;
    out.push(unit);
    let mut tmp = vec![0u8; model.dim];
    for i in 1..q as usize {
        model.mul(&out[i - 1], f, &mut tmp);
        out.push(tmp.clone());
    }
    out
}

fn dfs_aut(
    model: &LambdaModel,
    sets: &[Vec<Vec<u8>>],
    bounds: &[u64],
    powers: &mut Vec<Vec<Vec<u8>>>,
    level: usize,
    count: &mut u128,
) {
    if level == sets.len() {
        if induced_matrix_invertible(model, powers, bounds) {
            *count += 1;
        }
        return;
    }
    for f in &sets[level] {
        powers.push(element_powers(model, f, bounds[level]));
        dfs_aut(model, sets, bounds, powers, level + 1, count);
        powers.pop();
    }
}

/// Rank test of the matrix whose columns are the images of all monomials
/// x^{(i_1..i_r)} ↦ Π F_l^{i_l}.
fn induced_matrix_invertible(
    model: &LambdaModel,
    powers: &[Vec<Vec<u8>>],
    bounds: &[u64],
) -> bool {
    let dim = model.dim;
    let mut cols: Vec<Vec<u8>> = Vec::with_capacity(dim);
    let mut idx = vec![0u64; bounds.len()];
    let mut tmp = vec![0u8; dim];
    loop {
        // product over levels of F_l^{i_l}
        let mut acc = powers[0][idx[0] as usize].clone();
        for l in 1..bounds.len() {
            if idx[l] != 0 {
                model.mul(&acc, &powers[l][idx[l] as usize], &mut tmp);
                std::mem::swap(&mut acc, &mut tmp);
            }
        }
        cols.push(acc);
        // odometer over monomials, last index fastest
        let mut pos = bounds.len();
        loop {
            if pos == 0 {
                return rank_full(model, &mut cols);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < bounds[pos] {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn rank_full(model: &LambdaModel, cols: &mut [Vec<u8>]) -> bool {
    let fq = &model.fq;
    let dim = model.dim;
    let mut rank = 0;
    for row in 0..dim {
        let Some(pivot) = (rank..dim).find(|&c| cols[c][row] != 0) else {
            return false;
        };
        cols.swap(rank, pivot);
        let inv = inv_index(fq, cols[rank][row]);
        for c in 0..dim {
            if c != rank && cols[c][row] != 0 {
                let factor = fq.mul(cols[c][row], inv);
                // cols[c] -= factor * cols[rank]
                let neg = neg_index(fq, factor);
                for t in row..dim {
                    let delta = fq.mul(neg, cols[rank][t]);
                    cols[c][t] = fq.add(cols[c][t], delta);
                }
            }
        }
        rank += 1;
    }
    true
}

fn inv_index(fq: &SmallFq, a: u8) -> u8 {
    (1..fq.q as u8)
        .find(|&b| fq.mul(a, b) == 1)
        .expect("nonzero element of a field")
}

fn neg_index(fq: &SmallFq, a: u8) -> u8 {
    (0..fq.q as u8)
        .find(|&b| fq.add(a, b) == 0)
        .expect("additive inverse exists")
}

/// Automorphisms of Λ_e ⊗ F_q as validated algebra morphisms, via the generic
/// structure-constant search; used for closure and permutation spot checks.
pub fn aut_elements(
    e: &EType,
    q_desc: &FieldDescriptor,
    limits: &Limits,
) -> Result<Vec<AlgebraMorphism>> {
    let alg = lambda_algebra(1, e, q_desc, limits)?;
    fdalg::automorphisms(&alg, limits)
}

/// Exhaustively count the automorphisms of Λ_{n,e} ⊗ F_q and check the wreath
/// prediction n! · |Aut(Λ_e)(F_q)|^n.
pub fn aut_wreath_count(
    n: u64,
    e: &EType,
    q_desc: &FieldDescriptor,
    limits: &Limits,
) -> Result<PointCount> {
    let alg = lambda_algebra(n, e, q_desc, limits)?;
    let autos = fdalg::automorphisms(&alg, limits)?;
    let direct = autos.len() as u128;
    let per_block = aut_points_count(e, q_desc, limits)?;
    let mut predicted: u128 = (1..=n as u128).product();
    for _ in 0..n {
        predicted = predicted.checked_mul(per_block).ok_or(Error::Overflow)?;
    }
    if direct != predicted {
        return Err(Error::WreathMismatch { direct, predicted });
    }
    Ok(PointCount {
        count: Some(direct),
        closed_form: None,
        matches: Some(true),
    })
}

/// The permutation of the n minimal idempotents induced by an automorphism of
/// Λ_{n,e} ⊗ F_q: f(α_i) = α_{π(i)}.
pub fn aut_to_permutation(
    f: &AlgebraMorphism,
    n: u64,
    e: &EType,
    p: u64,
) -> Result<Vec<usize>> {
    let block = usize::try_from(e.lambda_dim(p)?).map_err(|_| Error::Overflow)?;
    let alg = f.algebra();
    if alg.dim() != block * n as usize {
        return Err(Error::Invalid("morphism is not on Λ_{n,e}".into()));
    }
    let mut perm = vec![usize::MAX; n as usize];
    for i in 0..n as usize {
        let alpha = alg.basis_elem(i * block);
        let image = f.apply(&alpha)?;
        let mut target = None;
        for j in 0..n as usize {
            if &image == &alg.basis_elem(j * block) {
                target = Some(j);
                break;
            }
        }
        let Some(j) = target else {
            return Err(Error::NotBlockPermuting);
        };
        perm[i] = j;
    }
    let mut seen = vec![false; n as usize];
    for &j in &perm {
        if seen[j] {
            return Err(Error::NotBlockPermuting);
        }
        seen[j] = true;
    }
    Ok(perm)
}

/// Closed-form dimensions of the endomorphism scheme X_e, its factors, the
/// automorphism group scheme G_e and its Lie algebra, with the n-fold values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeDims {
    pub p: u64,
    pub n: u64,
    pub e: EType,
    /// p^{s_r} − p^{s_l − l·e_l} per factor l.
    pub dim_factor: Vec<u128>,
    /// Σ_l dim_factor[l] = r·p^{s_r} − Σ_i p^{s_i − i·e_i}.
    pub dim_x: u128,
    /// r·p^{s_r}: the tangent-space dimension at every point.
    pub dim_tangent: u128,
    pub dim_g: u128,
    pub dim_lie_g: u128,
    pub dim_g_n: u128,
    pub dim_lie_g_n: u128,
}

pub fn scheme_dims(e: &EType, n: u64, p: u64) -> Result<SchemeDims> {
    if n == 0 {
        return Err(Error::Invalid("n must be >= 1".into()));
    }
    let r = e.r() as u128;
    let total = e.lambda_dim(p)?;
    let mut dim_factor = Vec::with_capacity(e.r());
    for l in 1..=e.r() {
        dim_factor.push(alpha_dim_factor(e, l, p)?);
    }
    let dim_x: u128 = dim_factor.iter().try_fold(0u128, |a, &b| {
        a.checked_add(b).ok_or(Error::Overflow)
    })?;
    let dim_tangent = r.checked_mul(total).ok_or(Error::Overflow)?;
    let dim_g = dim_x;
    let dim_lie_g = dim_tangent;
    let nn = n as u128;
    Ok(SchemeDims {
        p,
        n,
        e: e.clone(),
        dim_factor,
        dim_x,
        dim_tangent,
        dim_g,
        dim_lie_g,
        dim_g_n: nn.checked_mul(dim_g).ok_or(Error::Overflow)?,
        dim_lie_g_n: nn.checked_mul(dim_lie_g).ok_or(Error::Overflow)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fq(q: u64) -> FieldDescriptor {
        FieldDescriptor::finite_of_order(q).unwrap()
    }

    fn et(e: &[u32]) -> EType {
        EType::new(e.to_vec()).unwrap()
    }

    #[test]
    fn etype_validation() {
        assert!(EType::new(vec![1, 2]).is_err());
        assert!(EType::new(vec![]).is_err());
        assert!(EType::new(vec![2, 0]).is_err());
        assert_eq!(EType::parse("2,1").unwrap(), et(&[2, 1]));
    }

    #[test]
    fn lambda_dims() {
        let limits = Limits::default();
        let f2 = fq(2);
        assert_eq!(lambda_algebra(1, &et(&[1]), &f2, &limits).unwrap().dim(), 2);
        assert_eq!(
            lambda_algebra(1, &et(&[2, 1]), &f2, &limits).unwrap().dim(),
            8
        );
        assert_eq!(lambda_algebra(2, &et(&[1]), &f2, &limits).unwrap().dim(), 4);
    }

    #[test]
    fn two_block_orthogonality() {
        let limits = Limits::default();
        let alg = lambda_algebra(2, &et(&[1]), &fq(2), &limits).unwrap();
        // basis: (b0,1), (b0,x), (b1,1), (b1,x)
        let a = alg.basis_elem(1);
        let b = alg.basis_elem(2);
        assert!(a.mul(&b).unwrap().is_zero());
        assert!(a.mul(&a).unwrap().is_zero());
        assert_eq!(alg.basis_elem(0).mul(&a).unwrap(), a);
    }

    #[test]
    fn alpha_counts_small() {
        let limits = Limits::default();
        // e=(1), p=2, q=2, l=1 → 2 = 2^{2−1}
        let r = alpha_points(&et(&[1]), 1, &fq(2), &limits).unwrap();
        assert_eq!(r.count, Some(2));
        assert_eq!(r.closed_form.unwrap().value(), Some(2));
        assert_eq!(r.matches, Some(true));
        // e=(1,1), p=2, q=2, l=1 → 8
        let r = alpha_points(&et(&[1, 1]), 1, &fq(2), &limits).unwrap();
        assert_eq!(r.count, Some(8));
        assert_eq!(r.matches, Some(true));
        // e=(2), p=2, q=2, l=1 → 8
        let r = alpha_points(&et(&[2]), 1, &fq(2), &limits).unwrap();
        assert_eq!(r.count, Some(8));
        assert_eq!(r.matches, Some(true));
    }

    #[test]
    fn end_counts_small() {
        let limits = Limits::default();
        assert_eq!(
            end_points(&et(&[1]), &fq(2), &limits).unwrap().count,
            Some(2)
        );
        assert_eq!(
            end_points(&et(&[1, 1]), &fq(2), &limits).unwrap().count,
            Some(64)
        );
        assert_eq!(
            end_points(&et(&[1]), &fq(3), &limits).unwrap().count,
            Some(9)
        );
    }

    #[test]
    fn aut_counts_small() {
        let limits = Limits::default();
        assert_eq!(
            aut_points(&et(&[1]), &fq(2), &limits).unwrap().count,
            Some(1)
        );
        assert_eq!(
            aut_points(&et(&[1]), &fq(3), &limits).unwrap().count,
            Some(6)
        );
        assert_eq!(
            aut_points(&et(&[1, 1]), &fq(2), &limits).unwrap().count,
            Some(24)
        );
    }

    #[test]
    fn aut_via_generic_search_agrees() {
        let limits = Limits::default();
        for (e, q) in [(et(&[1]), 2u64), (et(&[1]), 3), (et(&[1, 1]), 2)] {
            let fast = aut_points(&e, &fq(q), &limits).unwrap().count.unwrap();
            let slow = aut_elements(&e, &fq(q), &limits).unwrap().len() as u128;
            assert_eq!(fast, slow, "e={e} q={q}");
        }
    }

    #[test]
    fn wreath_counts() {
        let limits = Limits::default();
        let r = aut_wreath_count(2, &et(&[1]), &fq(2), &limits).unwrap();
        assert_eq!(r.count, Some(2));
        let r = aut_wreath_count(1, &et(&[1, 1]), &fq(2), &limits).unwrap();
        assert_eq!(r.count, Some(24));
    }

    #[test]
    fn permutation_of_blocks() {
        let limits = Limits::default();
        let e = et(&[1]);
        let alg = lambda_algebra(2, &e, &fq(2), &limits).unwrap();
        let autos = fdalg::automorphisms(&alg, &limits).unwrap();
        assert_eq!(autos.len(), 2);
        let mut perms: Vec<Vec<usize>> = autos
            .iter()
            .map(|f| aut_to_permutation(f, 2, &e, 2).unwrap())
            .collect();
        perms.sort();
        assert_eq!(perms, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn scheme_dim_examples() {
        let d = scheme_dims(&et(&[1]), 1, 2).unwrap();
        assert_eq!(d.dim_x, 1);
        assert_eq!(d.dim_tangent, 2);
        assert_eq!(d.dim_g, 1);
        let d = scheme_dims(&et(&[1, 1]), 1, 2).unwrap();
        assert_eq!(d.dim_x, 6);
        assert_eq!(d.dim_tangent, 8);
        let d = scheme_dims(&et(&[2, 1]), 1, 2).unwrap();
        assert_eq!(d.dim_x, 13);
        assert_eq!(d.dim_tangent, 16);
    }
}
