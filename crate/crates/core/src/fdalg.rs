//! Finite-dimensional commutative unital algebras presented by structure
//! constants c_{ij}^h, written in a fixed basis: b_i · b_j = Σ_h c_{ij}^h b_h.
//!
//! Construction validates commutativity, associativity and the declared unit
//! eagerly; everything downstream presumes them.

use crate::error::{Error, Result};
use crate::exact::{
    frobenius_solve, FieldDescriptor, FieldElem, FieldEmbedding, SemilinearSystem,
};
use crate::linalg::{EchelonBasis, Mat};
use crate::Limits;
use std::sync::Arc;

#[derive(Debug)]
struct AlgebraInner {
    base: FieldDescriptor,
    dim: usize,
    /// c[i][j][h] at ((i * dim) + j) * dim + h.
    table: Vec<FieldElem>,
    unit: Vec<FieldElem>,
}

/// A validated algebra. Cheap to clone and share.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    inner: Arc<AlgebraInner>,
}

impl PartialEq for StructureConstants {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.dim == other.inner.dim
                && self.inner.base == other.inner.base
                && self.inner.table == other.inner.table
                && self.inner.unit == other.inner.unit)
    }
}
impl Eq for StructureConstants {}

impl StructureConstants {
    /// Validate and wrap a structure-constant table.
    pub fn new(
        base: FieldDescriptor,
        dim: usize,
        table: Vec<FieldElem>,
        unit: Vec<FieldElem>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("algebra dimension must be >= 1".into()));
        }
        if table.len() != dim * dim * dim {
            return Err(Error::Invalid(format!(
                "table has {} entries, expected {}",
                table.len(),
                dim * dim * dim
            )));
        }
        if unit.len() != dim {
            return Err(Error::Invalid("unit vector has the wrong length".into()));
        }
        if table
            .iter()
            .chain(unit.iter())
            .any(|x| x.descriptor() != &base)
        {
            return Err(Error::Invalid("table entry in the wrong field".into()));
        }
        let inner = AlgebraInner {
            base,
            dim,
            table,
            unit,
        };
        // commutativity
        for i in 0..dim {
            for j in (i + 1)..dim {
                for h in 0..dim {
                    if inner.c(i, j, h) != inner.c(j, i, h) {
                        return Err(Error::NotCommutative { i, j, h });
                    }
                }
            }
        }
        // declared unit fixes every basis vector
        for j in 0..dim {
            let mut prod = vec![FieldElem::zero(&inner.base); dim];
            for (i, u) in inner.unit.iter().enumerate() {
                if u.is_zero() {
                    continue;
                }
                for h in 0..dim {
                    let c = inner.c(i, j, h);
                    if !c.is_zero() {
                        prod[h] = prod[h].add(&c.mul(u)?);
                    }
                }
            }
            for (h, x) in prod.iter().enumerate() {
                let bad = if h == j { !x.is_one() } else { !x.is_zero() };
                if bad {
                    return Err(Error::BadUnit(j));
                }
            }
        }
        // associativity on all basis triples
        for i in 0..dim {
            for j in 0..dim {
                for h in 0..dim {
                    let left = inner.mul_coords(inner.row(i, j), &basis_vec(&inner, h))?;
                    let right = inner.mul_coords(&basis_vec(&inner, i), inner.row(j, h))?;
                    if left != right {
                        return Err(Error::NotAssociative { i, j, h });
                    }
                }
            }
        }
        Ok(StructureConstants {
            inner: Arc::new(inner),
        })
    }

    pub fn base(&self) -> &FieldDescriptor {
        &self.inner.base
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn table_entry(&self, i: usize, j: usize, h: usize) -> &FieldElem {
        self.inner.c(i, j, h)
    }

    pub fn unit_coords(&self) -> &[FieldElem] {
        &self.inner.unit
    }

    pub fn zero(&self) -> AlgebraElem {
        AlgebraElem {
            alg: self.clone(),
            coords: vec![FieldElem::zero(&self.inner.base); self.inner.dim],
        }
    }

    pub fn one(&self) -> AlgebraElem {
        AlgebraElem {
            alg: self.clone(),
            coords: self.inner.unit.clone(),
        }
    }

    pub fn basis_elem(&self, i: usize) -> AlgebraElem {
        AlgebraElem {
            alg: self.clone(),
            coords: basis_vec(&self.inner, i),
        }
    }

    pub fn elem(&self, coords: Vec<FieldElem>) -> Result<AlgebraElem> {
        if coords.len() != self.inner.dim {
            return Err(Error::Invalid(
                "coordinate vector has the wrong length".into(),
            ));
        }
        if coords.iter().any(|x| x.descriptor() != &self.inner.base) {
            return Err(Error::Invalid("coordinate in the wrong field".into()));
        }
        Ok(AlgebraElem {
            alg: self.clone(),
            coords,
        })
    }

    pub fn elem_from_ints(&self, coords: &[i64]) -> Result<AlgebraElem> {
        self.elem(
            coords
                .iter()
                .map(|&v| FieldElem::from_int(&self.inner.base, v))
                .collect(),
        )
    }
}

fn basis_vec(inner: &AlgebraInner, i: usize) -> Vec<FieldElem> {
    let mut v = vec![FieldElem::zero(&inner.base); inner.dim];
    v[i] = FieldElem::one(&inner.base);
    v
}

impl AlgebraInner {
    fn c(&self, i: usize, j: usize, h: usize) -> &FieldElem {
        &self.table[(i * self.dim + j) * self.dim + h]
    }

    fn row(&self, i: usize, j: usize) -> &[FieldElem] {
        let start = (i * self.dim + j) * self.dim;
        &self.table[start..start + self.dim]
    }

    fn mul_coords(&self, a: &[FieldElem], b: &[FieldElem]) -> Result<Vec<FieldElem>> {
        let mut out = vec![FieldElem::zero(&self.base); self.dim];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x.mul(y)?;
                for h in 0..self.dim {
                    let c = self.c(i, j, h);
                    if !c.is_zero() {
                        out[h] = out[h].add(&c.mul(&xy)?);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// An element of a structure-constant algebra, as a coordinate vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElem {
    alg: StructureConstants,
    coords: Vec<FieldElem>,
}

impl AlgebraElem {
    pub fn algebra(&self) -> &StructureConstants {
        &self.alg
    }

    pub fn coords(&self) -> &[FieldElem] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(FieldElem::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(self.alg == other.alg, "elements of different algebras");
        AlgebraElem {
            alg: self.alg.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert!(self.alg == other.alg, "elements of different algebras");
        AlgebraElem {
            alg: self.alg.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn scale(&self, c: &FieldElem) -> Result<Self> {
        Ok(AlgebraElem {
            alg: self.alg.clone(),
            coords: self
                .coords
                .iter()
                .map(|a| a.mul(c))
                .collect::<Result<_>>()?,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        assert!(self.alg == other.alg, "elements of different algebras");
        Ok(AlgebraElem {
            alg: self.alg.clone(),
            coords: self.alg.inner.mul_coords(&self.coords, &other.coords)?,
        })
    }

    pub fn pow(&self, mut e: u128) -> Result<Self> {
        let mut base = self.clone();
        let mut acc = self.alg.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }
}

/// Left-multiplication matrix: column j is a·b_j in coordinates.
pub fn lmul_matrix(a: &AlgebraElem) -> Result<Mat> {
    let alg = &a.alg;
    let n = alg.dim();
    let mut m = Mat::zero(alg.base(), n, n);
    for j in 0..n {
        let col = alg.inner.mul_coords(&a.coords, &basis_vec(&alg.inner, j))?;
        for (h, v) in col.into_iter().enumerate() {
            *m.at_mut(h, j) = v;
        }
    }
    Ok(m)
}

/// a is a unit exactly when left multiplication by a is nonsingular.
pub fn is_invertible(a: &AlgebraElem) -> Result<bool> {
    lmul_matrix(a)?.is_invertible()
}

/// A subspace of the underlying vector space, held as a reduced echelon
/// basis with ascending pivots.
#[derive(Debug, Clone)]
pub struct Subspace {
    alg: StructureConstants,
    basis: EchelonBasis,
}

impl Subspace {
    pub fn empty(alg: &StructureConstants) -> Self {
        Subspace {
            alg: alg.clone(),
            basis: EchelonBasis::new(alg.base(), alg.dim()),
        }
    }

    pub fn algebra(&self) -> &StructureConstants {
        &self.alg
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis_vectors(&self) -> Vec<AlgebraElem> {
        self.basis
            .rows()
            .iter()
            .map(|r| AlgebraElem {
                alg: self.alg.clone(),
                coords: r.clone(),
            })
            .collect()
    }

    pub fn contains(&self, x: &AlgebraElem) -> Result<bool> {
        self.basis.contains(&x.coords)
    }

    pub fn insert(&mut self, x: &AlgebraElem) -> Result<bool> {
        self.basis.insert(&x.coords)
    }
}

/// Smallest multiplicatively closed subspace containing the generators (and
/// the unit, if requested): the fixed point of iterated span-of-products.
pub fn subalgebra_closure(
    alg: &StructureConstants,
    gens: &[AlgebraElem],
    with_unit: bool,
) -> Result<Subspace> {
    let mut space = Subspace::empty(alg);
    if with_unit {
        space.insert(&alg.one())?;
    }
    for g in gens {
        assert!(&g.alg == alg, "generator from another algebra");
        space.insert(g)?;
    }
    loop {
        let current = space.basis_vectors();
        let mut grew = false;
        for (i, a) in current.iter().enumerate() {
            for b in &current[i..] {
                let prod = a.mul(b)?;
                if space.insert(&prod)? {
                    grew = true;
                }
            }
        }
        if space.dim() > alg.dim() {
            return Err(Error::ResourceGuard(
                "closure exceeded the algebra dimension; arithmetic is corrupted".into(),
            ));
        }
        if !grew {
            return Ok(space);
        }
    }
}

pub(crate) fn nilpotency_exp(p: u64, dim: usize) -> u32 {
    // smallest N >= 1 with p^N >= dim
    let mut n = 0;
    let mut pw: u128 = 1;
    while pw < dim as u128 {
        pw *= p as u128;
        n += 1;
    }
    n.max(1)
}

/// The ideal of nilpotent elements {x : x^{p^N} = 0} with N = ⌈log_p dim⌉,
/// found by a single Frobenius-semilinear solve.
pub fn nilradical(alg: &StructureConstants) -> Result<Subspace> {
    let n = alg.dim();
    let p = alg.base().p();
    let nexp = nilpotency_exp(p, n);
    let q: u128 = (p as u128).pow(nexp);
    let mut vectors = Vec::with_capacity(n);
    for i in 0..n {
        vectors.push(alg.basis_elem(i).pow(q)?.coords);
    }
    let sys = SemilinearSystem {
        q_exp: nexp,
        vectors,
        target: alg.zero().coords,
    };
    let sol = frobenius_solve(&sys)?;
    let mut space = Subspace::empty(alg);
    for v in sol.homogeneous_basis {
        space.insert(&alg.elem(v)?)?;
    }
    // the result must be an ideal consisting of nilpotents
    for x in space.basis_vectors() {
        if !x.pow(q)?.is_zero() {
            return Err(Error::Internal("nilradical vector is not nilpotent".into()));
        }
        for j in 0..n {
            if !space.contains(&x.mul(&alg.basis_elem(j))?)? {
                return Err(Error::Internal("nilradical is not an ideal".into()));
            }
        }
    }
    Ok(space)
}

/// Exhaustive idempotents over a finite base, sorted by coordinate tuple,
/// with the minimal ones singled out (nonzero idempotents that are not a sum
/// of two orthogonal nonzero idempotents).
#[derive(Debug, Clone)]
pub struct Idempotents {
    pub all: Vec<AlgebraElem>,
    pub minimal: Vec<AlgebraElem>,
}

pub fn idempotents(alg: &StructureConstants, limits: &Limits) -> Result<Idempotents> {
    let order = alg.base().order().ok_or_else(|| {
        Error::UnsupportedField("idempotent enumeration needs a finite base field".into())
    })?;
    let n = alg.dim();
    let candidates = order.checked_pow(n as u32).ok_or(Error::Overflow)?;
    if candidates > limits.enum_guard as u128 {
        return Err(Error::ResourceGuard(format!(
            "{candidates} candidates exceed the enumeration guard {}",
            limits.enum_guard
        )));
    }
    let elems = alg.base().enumerate_elements()?;
    let mut all = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let coords: Vec<FieldElem> = idx.iter().map(|&i| elems[i].clone()).collect();
        let e = alg.elem(coords)?;
        if e.mul(&e)? == e {
            all.push(e);
        }
        let mut pos = 0;
        while pos < n {
            idx[pos] += 1;
            if idx[pos] < elems.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == n {
            break;
        }
    }
    all.sort_by(|a, b| {
        a.coords
            .iter()
            .zip(&b.coords)
            .map(|(x, y)| x.canonical_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut minimal = Vec::new();
    'outer: for e in &all {
        if e.is_zero() {
            continue;
        }
        for f in &all {
            if f.is_zero() {
                continue;
            }
            let g = e.sub(f);
            if g.is_zero() {
                continue;
            }
            // e = f + g with f, g orthogonal nonzero idempotents?
            if g.mul(&g)? == g && f.mul(&g)?.is_zero() {
                continue 'outer;
            }
        }
        minimal.push(e.clone());
    }
    Ok(Idempotents { all, minimal })
}

/// The descending dimension sequence d_j = dim span{b^{p^j} : b basis}
/// (with unit) and the type multiset it encodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpowerFiltration {
    pub dims: Vec<u128>,
    /// Nonincreasing exponents e with d_j/d_{j+1} = p^{#{i : e_i > j}}.
    pub etype: Vec<u32>,
}

/// Complete isomorphism invariant for the truncated polynomial algebras:
/// requires the algebra to be local with residue field equal to the base.
pub fn ppower_filtration(alg: &StructureConstants) -> Result<PpowerFiltration> {
    let n = alg.dim();
    let p = alg.base().p();
    let nil = nilradical(alg)?;
    if nil.dim() != n - 1 {
        return Err(Error::NotLocal);
    }
    let mut dims: Vec<u128> = vec![n as u128];
    let max_steps = nilpotency_exp(p, n) + 1;
    let mut j = 1;
    while *dims.last().unwrap() > 1 {
        if j > max_steps {
            return Err(Error::NotLambdaForm(dims));
        }
        let q = (p as u128).pow(j);
        let mut powers = Vec::with_capacity(n);
        for i in 0..n {
            powers.push(alg.basis_elem(i).pow(q)?);
        }
        let span = subalgebra_closure(alg, &powers, true)?;
        dims.push(span.dim() as u128);
        j += 1;
    }
    let mut ms = Vec::new();
    for w in dims.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b == 0 || a % b != 0 {
            return Err(Error::NotLambdaForm(dims));
        }
        let mut ratio = a / b;
        let mut m = 0u32;
        while ratio % p as u128 == 0 {
            ratio /= p as u128;
            m += 1;
        }
        if ratio != 1 {
            return Err(Error::NotLambdaForm(dims));
        }
        ms.push(m);
    }
    if ms.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::NotLambdaForm(dims));
    }
    let r = *ms.first().unwrap_or(&0);
    let etype: Vec<u32> = (1..=r)
        .map(|i| ms.iter().filter(|&&m| m >= i).count() as u32)
        .collect();
    Ok(PpowerFiltration { dims, etype })
}

/// Push the whole table through a field embedding. The result is re-validated,
/// so a substitution that is not a field homomorphism cannot slip through.
pub fn base_change(
    alg: &StructureConstants,
    embedding: &FieldEmbedding,
) -> Result<StructureConstants> {
    if embedding.source() != alg.base() {
        return Err(Error::BadEmbedding(
            "embedding source is not the algebra base field".into(),
        ));
    }
    let n = alg.dim();
    let mut table = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for h in 0..n {
                table.push(embedding.apply(alg.table_entry(i, j, h))?);
            }
        }
    }
    let unit = alg
        .unit_coords()
        .iter()
        .map(|u| embedding.apply(u))
        .collect::<Result<Vec<_>>>()?;
    StructureConstants::new(embedding.target().clone(), n, table, unit)
}

/// A ⊗ B over the common base field, basis b_i ⊗ b_j with the second factor
/// fastest.
pub fn tensor_product(
    a: &StructureConstants,
    b: &StructureConstants,
) -> Result<StructureConstants> {
    if a.base() != b.base() {
        return Err(Error::Invalid(
            "tensor factors over different fields".into(),
        ));
    }
    let (na, nb) = (a.dim(), b.dim());
    let n = na * nb;
    let mut table = vec![FieldElem::zero(a.base()); n * n * n];
    for i1 in 0..na {
        for j1 in 0..nb {
            for i2 in 0..na {
                for j2 in 0..nb {
                    for i3 in 0..na {
                        let ca = a.table_entry(i1, i2, i3);
                        if ca.is_zero() {
                            continue;
                        }
                        for j3 in 0..nb {
                            let cb = b.table_entry(j1, j2, j3);
                            if cb.is_zero() {
                                continue;
                            }
                            let x = i1 * nb + j1;
                            let y = i2 * nb + j2;
                            let z = i3 * nb + j3;
                            table[(x * n + y) * n + z] = ca.mul(cb)?;
                        }
                    }
                }
            }
        }
    }
    let mut unit = Vec::with_capacity(n);
    for ua in a.unit_coords() {
        for ub in b.unit_coords() {
            unit.push(ua.mul(ub)?);
        }
    }
    StructureConstants::new(a.base().clone(), n, table, unit)
}

/// An algebra map recorded as the matrix whose column j is the image of b_j.
#[derive(Debug, Clone)]
pub struct AlgebraMorphism {
    alg: StructureConstants,
    mat: Mat,
}

impl PartialEq for AlgebraMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.alg == other.alg
            && (0..self.alg.dim())
                .all(|j| (0..self.alg.dim()).all(|i| self.mat.at(i, j) == other.mat.at(i, j)))
    }
}
impl Eq for AlgebraMorphism {}

impl AlgebraMorphism {
    /// Wrap column images, verifying unitality and multiplicativity in full.
    pub fn new(alg: &StructureConstants, images: Vec<Vec<FieldElem>>) -> Result<Self> {
        let n = alg.dim();
        if images.len() != n || images.iter().any(|c| c.len() != n) {
            return Err(Error::Invalid("wrong number of image coordinates".into()));
        }
        let mut mat = Mat::zero(alg.base(), n, n);
        for (j, col) in images.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                *mat.at_mut(i, j) = v.clone();
            }
        }
        let m = AlgebraMorphism {
            alg: alg.clone(),
            mat,
        };
        if !m.checks_out()? {
            return Err(Error::Invalid(
                "images do not define a unital algebra map".into(),
            ));
        }
        Ok(m)
    }

    fn checks_out(&self) -> Result<bool> {
        let n = self.alg.dim();
        if self.apply(&self.alg.one())? != self.alg.one() {
            return Ok(false);
        }
        for i in 0..n {
            for j in i..n {
                let lhs = self
                    .apply(&self.alg.basis_elem(i))?
                    .mul(&self.apply(&self.alg.basis_elem(j))?)?;
                let rhs = self.apply(&self.alg.basis_elem(i).mul(&self.alg.basis_elem(j))?)?;
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn algebra(&self) -> &StructureConstants {
        &self.alg
    }

    pub fn matrix(&self) -> &Mat {
        &self.mat
    }

    pub fn identity(alg: &StructureConstants) -> Self {
        AlgebraMorphism {
            alg: alg.clone(),
            mat: Mat::identity(alg.base(), alg.dim()),
        }
    }

    pub fn apply(&self, x: &AlgebraElem) -> Result<AlgebraElem> {
        self.alg.elem(self.mat.apply(x.coords())?)
    }

    /// self ∘ other.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        Ok(AlgebraMorphism {
            alg: self.alg.clone(),
            mat: self.mat.mul(&other.mat)?,
        })
    }

    pub fn is_invertible(&self) -> Result<bool> {
        self.mat.is_invertible()
    }
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    /// Image forced to the unit vector.
    Unit(usize),
    /// Image enumerated over all coordinate vectors.
    Free(usize),
    /// b_slot appears with nonzero coefficient in b_left · b_right whose
    /// remaining support is already determined.
    Forced {
        slot: usize,
        left: usize,
        right: usize,
    },
}

/// Order the basis so that as many images as possible are determined by
/// earlier ones through the multiplication table.
fn derivation_plan(alg: &StructureConstants) -> Vec<Slot> {
    let n = alg.dim();
    let mut chosen = vec![false; n];
    let mut plan = Vec::with_capacity(n);
    // a unit equal to a single basis vector pins that image immediately
    let unit = alg.unit_coords();
    let support: Vec<usize> = (0..n).filter(|&i| !unit[i].is_zero()).collect();
    if support.len() == 1 && unit[support[0]].is_one() {
        chosen[support[0]] = true;
        plan.push(Slot::Unit(support[0]));
    }
    while plan.len() < n {
        let mut found = None;
        'search: for j in 0..n {
            if chosen[j] {
                continue;
            }
            for left in 0..n {
                if !chosen[left] {
                    continue;
                }
                for right in left..n {
                    if !chosen[right] {
                        continue;
                    }
                    if alg.table_entry(left, right, j).is_zero() {
                        continue;
                    }
                    let support_ok = (0..n).all(|h| {
                        h == j || chosen[h] || alg.table_entry(left, right, h).is_zero()
                    });
                    if support_ok {
                        found = Some(Slot::Forced {
                            slot: j,
                            left,
                            right,
                        });
                        break 'search;
                    }
                }
            }
        }
        let slot = found.unwrap_or_else(|| {
            let j = (0..n).find(|&j| !chosen[j]).unwrap();
            Slot::Free(j)
        });
        let j = match slot {
            Slot::Unit(j) | Slot::Free(j) | Slot::Forced { slot: j, .. } => j,
        };
        chosen[j] = true;
        plan.push(slot);
    }
    plan
}

struct EndoSearch<'a> {
    alg: &'a StructureConstants,
    plan: &'a [Slot],
    elements: Vec<FieldElem>,
    images: Vec<Option<Vec<FieldElem>>>,
    chosen: Vec<usize>,
    visited: u64,
    guard: u64,
    out: Vec<AlgebraMorphism>,
}

impl EndoSearch<'_> {
    /// Check every product constraint whose inputs and support are all
    /// determined and involve the newest index. Pure pruning; completed
    /// assignments are verified in full.
    fn consistent_so_far(&self, newest: usize) -> Result<bool> {
        let n = self.alg.dim();
        let inner = &self.alg.inner;
        for &i in &self.chosen {
            let (a, b) = (i.min(newest), i.max(newest));
            let row = inner.row(a, b);
            if (0..n).any(|h| !row[h].is_zero() && self.images[h].is_none()) {
                continue;
            }
            let lhs = inner.mul_coords(
                self.images[a].as_ref().unwrap(),
                self.images[b].as_ref().unwrap(),
            )?;
            let mut rhs = vec![FieldElem::zero(self.alg.base()); n];
            for h in 0..n {
                if !row[h].is_zero() {
                    let img = self.images[h].as_ref().unwrap();
                    for (t, v) in img.iter().enumerate() {
                        if !v.is_zero() {
                            rhs[t] = rhs[t].add(&v.mul(&row[h])?);
                        }
                    }
                }
            }
            if lhs != rhs {
                return Ok(false);
            }
        }
        let unit = self.alg.unit_coords();
        if (0..n).all(|h| unit[h].is_zero() || self.images[h].is_some()) {
            let mut acc = vec![FieldElem::zero(self.alg.base()); n];
            for h in 0..n {
                if !unit[h].is_zero() {
                    let img = self.images[h].as_ref().unwrap();
                    for (t, v) in img.iter().enumerate() {
                        if !v.is_zero() {
                            acc[t] = acc[t].add(&v.mul(&unit[h])?);
                        }
                    }
                }
            }
            if acc != unit {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn descend(&mut self, depth: usize) -> Result<()> {
        let n = self.alg.dim();
        if depth == self.plan.len() {
            let images: Vec<Vec<FieldElem>> =
                (0..n).map(|j| self.images[j].clone().unwrap()).collect();
            if let Ok(m) = AlgebraMorphism::new(self.alg, images) {
                self.out.push(m);
            }
            return Ok(());
        }
        match self.plan[depth] {
            Slot::Unit(j) => {
                self.images[j] = Some(self.alg.unit_coords().to_vec());
                self.chosen.push(j);
                if self.consistent_so_far(j)? {
                    self.descend(depth + 1)?;
                }
                self.chosen.pop();
                self.images[j] = None;
            }
            Slot::Forced { slot, left, right } => {
                let inner = &self.alg.inner;
                let row = inner.row(left, right).to_vec();
                let prod = inner.mul_coords(
                    self.images[left].as_ref().unwrap(),
                    self.images[right].as_ref().unwrap(),
                )?;
                // φ(b_slot) = c^{-1}(φ(b_left)φ(b_right) − Σ_{h≠slot} c_h φ(b_h))
                let mut rest = prod;
                for h in 0..n {
                    if h != slot && !row[h].is_zero() {
                        let img = self.images[h].as_ref().unwrap();
                        for (t, v) in img.iter().enumerate() {
                            if !v.is_zero() {
                                rest[t] = rest[t].sub(&v.mul(&row[h])?);
                            }
                        }
                    }
                }
                let inv = row[slot].inv()?;
                for v in rest.iter_mut() {
                    *v = v.mul(&inv)?;
                }
                self.images[slot] = Some(rest);
                self.chosen.push(slot);
                if self.consistent_so_far(slot)? {
                    self.descend(depth + 1)?;
                }
                self.chosen.pop();
                self.images[slot] = None;
            }
            Slot::Free(j) => {
                let mut idx = vec![0usize; n];
                let per = self.elements.len();
                loop {
                    self.visited += 1;
                    if self.visited > self.guard {
                        return Err(Error::ResourceGuard(format!(
                            "endomorphism search visited more than {} candidates",
                            self.guard
                        )));
                    }
                    let coords: Vec<FieldElem> =
                        idx.iter().map(|&i| self.elements[i].clone()).collect();
                    self.images[j] = Some(coords);
                    self.chosen.push(j);
                    if self.consistent_so_far(j)? {
                        self.descend(depth + 1)?;
                    }
                    self.chosen.pop();
                    self.images[j] = None;
                    let mut pos = 0;
                    while pos < n {
                        idx[pos] += 1;
                        if idx[pos] < per {
                            break;
                        }
                        idx[pos] = 0;
                        pos += 1;
                    }
                    if pos == n {
                        break;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Exhaustive unital algebra endomorphisms of an algebra over a finite field.
///
/// Basis-vector images are assigned in an order where most are forced through
/// the multiplication table; free images range over the whole algebra, so the
/// enumeration is complete. Every produced map is verified in full.
pub fn unital_endomorphisms(
    alg: &StructureConstants,
    limits: &Limits,
) -> Result<Vec<AlgebraMorphism>> {
    if alg.base().order().is_none() {
        return Err(Error::UnsupportedField(
            "endomorphism enumeration needs a finite base field".into(),
        ));
    }
    let plan = derivation_plan(alg);
    let elements = alg.base().enumerate_elements()?;
    let mut search = EndoSearch {
        alg,
        plan: &plan,
        elements,
        images: vec![None; alg.dim()],
        chosen: Vec::new(),
        visited: 0,
        guard: limits.enum_guard,
        out: Vec::new(),
    };
    search.descend(0)?;
    Ok(search.out)
}

/// The invertible unital endomorphisms.
pub fn automorphisms(alg: &StructureConstants, limits: &Limits) -> Result<Vec<AlgebraMorphism>> {
    let mut out = Vec::new();
    for m in unital_endomorphisms(alg, limits)? {
        if m.is_invertible()? {
            out.push(m);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> FieldDescriptor {
        FieldDescriptor::prime(2).unwrap()
    }

    /// k[x]/(x^2) over F_2, basis (1, x).
    fn dual_numbers() -> StructureConstants {
        let d = f2();
        let e = |v| FieldElem::from_int(&d, v);
        let table = vec![e(1), e(0), e(0), e(1), e(0), e(1), e(0), e(0)];
        StructureConstants::new(d.clone(), 2, table, vec![e(1), e(0)]).unwrap()
    }

    #[test]
    fn one_dimensional_base_field() {
        let d = f2();
        let alg = StructureConstants::new(
            d.clone(),
            1,
            vec![FieldElem::one(&d)],
            vec![FieldElem::one(&d)],
        )
        .unwrap();
        assert!(is_invertible(&alg.one()).unwrap());
    }

    #[test]
    fn non_commutative_rejected() {
        let d = f2();
        let e = |v| FieldElem::from_int(&d, v);
        let table = vec![e(1), e(0), e(1), e(0), e(0), e(0), e(0), e(0)];
        let err = StructureConstants::new(d.clone(), 2, table, vec![e(1), e(0)]).unwrap_err();
        assert!(matches!(err, Error::NotCommutative { .. }));
    }

    #[test]
    fn lmul_and_invertibility_in_dual_numbers() {
        let alg = dual_numbers();
        let x = alg.basis_elem(1);
        let m = lmul_matrix(&x).unwrap();
        // x sends 1 ↦ x and x ↦ 0
        assert!(m.at(0, 0).is_zero());
        assert!(m.at(1, 0).is_one());
        assert!(m.at(0, 1).is_zero());
        assert!(m.at(1, 1).is_zero());
        assert!(!is_invertible(&x).unwrap());
        assert!(is_invertible(&alg.one().add(&x)).unwrap());
        assert!(!is_invertible(&alg.zero()).unwrap());
        assert_eq!(lmul_matrix(&alg.one()).unwrap().rank().unwrap(), 2);
    }

    #[test]
    fn nilradical_of_dual_numbers() {
        let alg = dual_numbers();
        let nil = nilradical(&alg).unwrap();
        assert_eq!(nil.dim(), 1);
        assert!(nil.contains(&alg.basis_elem(1)).unwrap());
        assert!(!nil.contains(&alg.one()).unwrap());
    }

    #[test]
    fn nilradical_over_function_field() {
        // F_2(t)[y]/(y^2 - t^2): nilradical is spanned by y + t
        let k = FieldDescriptor::rational_function(2, vec!["t".into()]).unwrap();
        let e0 = FieldElem::zero(&k);
        let e1 = FieldElem::one(&k);
        let t2 = FieldElem::parse(&k, "t^2").unwrap();
        let table = vec![
            e1.clone(),
            e0.clone(),
            e0.clone(),
            e1.clone(),
            e0.clone(),
            e1.clone(),
            t2,
            e0.clone(),
        ];
        let alg =
            StructureConstants::new(k.clone(), 2, table, vec![e1.clone(), e0.clone()]).unwrap();
        let nil = nilradical(&alg).unwrap();
        assert_eq!(nil.dim(), 1);
        let y_plus_t = alg
            .elem(vec![FieldElem::parse(&k, "t").unwrap(), e1])
            .unwrap();
        assert!(nil.contains(&y_plus_t).unwrap());
    }

    #[test]
    fn field_has_trivial_nilradical() {
        let f4 = FieldDescriptor::finite(2, 2).unwrap();
        let alg = StructureConstants::new(
            f4.clone(),
            1,
            vec![FieldElem::one(&f4)],
            vec![FieldElem::one(&f4)],
        )
        .unwrap();
        assert_eq!(nilradical(&alg).unwrap().dim(), 0);
    }

    #[test]
    fn closure_examples() {
        let alg = dual_numbers();
        assert_eq!(subalgebra_closure(&alg, &[], true).unwrap().dim(), 1);
        assert_eq!(
            subalgebra_closure(&alg, &[alg.basis_elem(1)], true)
                .unwrap()
                .dim(),
            2
        );
    }

    #[test]
    fn idempotents_of_dual_numbers() {
        let alg = dual_numbers();
        let idem = idempotents(&alg, &Limits::default()).unwrap();
        assert_eq!(idem.all.len(), 2); // 0 and 1
        assert_eq!(idem.minimal.len(), 1);
        assert_eq!(idem.minimal[0], alg.one());
    }

    #[test]
    fn endomorphisms_of_dual_numbers() {
        // unital endos send x into the nilradical: x ↦ 0 or x ↦ x
        let alg = dual_numbers();
        let endos = unital_endomorphisms(&alg, &Limits::default()).unwrap();
        assert_eq!(endos.len(), 2);
        let autos = automorphisms(&alg, &Limits::default()).unwrap();
        assert_eq!(autos.len(), 1);
        assert_eq!(autos[0], AlgebraMorphism::identity(&alg));
    }
}
