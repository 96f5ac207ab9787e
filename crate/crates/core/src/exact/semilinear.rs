//! Frobenius-semilinear systems Σ_i λ_i^q v_i = w and their exact solution.
//!
//! Over F_{p^k} the coefficient Frobenius is inverted directly. Over
//! F_p(t_1..t_m) the system is restricted to scalars in K^q: K is a free
//! K^q-module on the monomials t^α with 0 ≤ α_j < q, each coordinate equation
//! splits into one linear equation per α, and the q-th-root field isomorphism
//! K^q → K pulls everything back to an ordinary linear system over K.

use super::{FieldDescriptor, FieldElem, FieldKind};
use crate::error::{Error, Result};
use crate::exact::poly::{Mono, Poly};
use crate::exact::ratfun::RatFun;
use crate::linalg::Mat;

/// The data of Σ λ_i^q v_i = w over the coordinate field of the vectors;
/// q = p^q_exp.
#[derive(Debug, Clone)]
pub struct SemilinearSystem {
    pub q_exp: u32,
    pub vectors: Vec<Vec<FieldElem>>,
    pub target: Vec<FieldElem>,
}

#[derive(Debug, Clone)]
pub struct SemilinearSolution {
    /// `None` when the target is not attained.
    pub particular: Option<Vec<FieldElem>>,
    /// Basis of {μ : Σ μ_i^q v_i = 0}; the full solution set is
    /// particular + the K-span of this basis.
    pub homogeneous_basis: Vec<Vec<FieldElem>>,
}

impl SemilinearSolution {
    pub fn particular_or_err(&self) -> Result<&Vec<FieldElem>> {
        self.particular.as_ref().ok_or(Error::NoSolution)
    }
}

/// Decompose a reduced fraction into its K^q-coordinates, pulled back to K:
/// v = Σ_α (c_α)^q t^α with the returned map α ↦ c_α.
pub(crate) fn decompose_rat(
    desc: &FieldDescriptor,
    v: &RatFun,
    q: u64,
) -> Result<Vec<(Mono, FieldElem)>> {
    let guard = desc.degree_guard();
    // v = f·g^{q-1} / g^q, and g^q has a q-th root (namely g)
    let h = v.num.mul(&v.den.pow(q - 1, guard)?, guard)?;
    let nvars = h.nvars;
    let mut buckets: std::collections::BTreeMap<Mono, Poly> = std::collections::BTreeMap::new();
    for (m, &c) in &h.terms {
        let alpha: Box<[u32]> = m.0.iter().map(|&e| e % q as u32).collect();
        let beta: Box<[u32]> = m.0.iter().map(|&e| e / q as u32).collect();
        buckets
            .entry(Mono(alpha))
            .or_insert_with(|| Poly::zero(h.p, nvars))
            .terms
            .insert(Mono(beta), c);
    }
    let mut out = Vec::with_capacity(buckets.len());
    for (alpha, pulled_num) in buckets {
        let c = RatFun::new(pulled_num, v.den.clone(), guard)?;
        out.push((alpha, FieldElem::from_rat(desc, c)));
    }
    Ok(out)
}

/// Full solution set of Σ λ_i^q v_i = w.
pub fn frobenius_solve(sys: &SemilinearSystem) -> Result<SemilinearSolution> {
    if sys.q_exp == 0 {
        return Err(Error::Invalid("q must be p^e with e >= 1".into()));
    }
    let n = sys.vectors.len();
    let len = sys.target.len();
    if sys.vectors.iter().any(|v| v.len() != len) {
        return Err(Error::Invalid("vector lengths differ".into()));
    }
    let desc = sys
        .target
        .first()
        .map(|x| x.descriptor().clone())
        .or_else(|| {
            sys.vectors
                .first()
                .and_then(|v| v.first())
                .map(|x| x.descriptor().clone())
        })
        .ok_or_else(|| Error::Invalid("empty system".into()))?;

    // Build the linear system over the base field. F_p counts as F_{p^1}:
    // the coefficient Frobenius is the identity there.
    let (mat, rhs) = match desc.kind() {
        FieldKind::Prime | FieldKind::Finite => {
            // take q-th roots of every scalar equation
            let mut rows = Vec::with_capacity(len);
            let mut rhs = Vec::with_capacity(len);
            for c in 0..len {
                let mut row = Vec::with_capacity(n);
                for v in &sys.vectors {
                    row.push(v[c].pth_root(sys.q_exp)?);
                }
                rows.push(row);
                rhs.push(sys.target[c].pth_root(sys.q_exp)?);
            }
            (Mat::from_rows(&desc, rows), rhs)
        }
        FieldKind::RationalFunction => {
            let q = (desc.p() as u128).pow(sys.q_exp);
            let q = u64::try_from(q).map_err(|_| Error::Overflow)?;
            // every (coordinate, α) pair that occurs anywhere becomes one row
            let mut decomps: Vec<Vec<Vec<(Mono, FieldElem)>>> = Vec::with_capacity(n);
            for v in &sys.vectors {
                let mut per_coord = Vec::with_capacity(len);
                for x in v {
                    per_coord.push(decompose_rat(&desc, x.rat().unwrap(), q)?);
                }
                decomps.push(per_coord);
            }
            let mut target_decomp = Vec::with_capacity(len);
            for x in &sys.target {
                target_decomp.push(decompose_rat(&desc, x.rat().unwrap(), q)?);
            }
            let mut keys: std::collections::BTreeSet<(usize, Mono)> =
                std::collections::BTreeSet::new();
            for (c, d) in target_decomp.iter().enumerate() {
                for (alpha, _) in d {
                    keys.insert((c, alpha.clone()));
                }
            }
            for per_coord in &decomps {
                for (c, d) in per_coord.iter().enumerate() {
                    for (alpha, _) in d {
                        keys.insert((c, alpha.clone()));
                    }
                }
            }
            let mut rows = Vec::with_capacity(keys.len());
            let mut rhs = Vec::with_capacity(keys.len());
            for (c, alpha) in &keys {
                let mut row = Vec::with_capacity(n);
                for per_coord in &decomps {
                    let entry = per_coord[*c]
                        .iter()
                        .find(|(a, _)| a == alpha)
                        .map(|(_, v)| v.clone())
                        .unwrap_or_else(|| FieldElem::zero(&desc));
                    row.push(entry);
                }
                rows.push(row);
                let t = target_decomp[*c]
                    .iter()
                    .find(|(a, _)| a == alpha)
                    .map(|(_, v)| v.clone())
                    .unwrap_or_else(|| FieldElem::zero(&desc));
                rhs.push(t);
            }
            (Mat::from_rows(&desc, rows), rhs)
        }
    };

    let particular = mat.solve(&rhs)?;
    let homogeneous_basis = mat.kernel()?;
    Ok(SemilinearSolution {
        particular,
        homogeneous_basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_over_f2t() {
        // λ_0^2 + λ_1^2 t^2 = 0 ⇔ λ_0 = t λ_1
        let k = FieldDescriptor::rational_function(2, vec!["t".into()]).unwrap();
        let one = FieldElem::one(&k);
        let t2 = FieldElem::parse(&k, "t^2").unwrap();
        let sys = SemilinearSystem {
            q_exp: 1,
            vectors: vec![vec![one.clone()], vec![t2]],
            target: vec![FieldElem::zero(&k)],
        };
        let sol = frobenius_solve(&sys).unwrap();
        assert_eq!(sol.homogeneous_basis.len(), 1);
        let b = &sol.homogeneous_basis[0];
        // normalize: the basis vector must be proportional to (t, 1)
        let t = FieldElem::parse(&k, "t").unwrap();
        let ratio = b[0].div(&b[1]).unwrap();
        assert_eq!(ratio, t);
        // spot-check the defining relation
        let lhs = b[0]
            .frobenius(1)
            .unwrap()
            .add(&b[1].frobenius(1).unwrap().mul(&sys.vectors[1][0]).unwrap());
        assert!(lhs.is_zero());
    }

    #[test]
    fn t_is_not_a_square() {
        let k = FieldDescriptor::rational_function(2, vec!["t".into()]).unwrap();
        let sys = SemilinearSystem {
            q_exp: 1,
            vectors: vec![vec![FieldElem::one(&k)]],
            target: vec![FieldElem::parse(&k, "t").unwrap()],
        };
        let sol = frobenius_solve(&sys).unwrap();
        assert!(sol.particular.is_none());
        assert_eq!(sol.particular_or_err(), Err(Error::NoSolution));
    }

    #[test]
    fn f4_root_found() {
        // λ^2 = g has the solution g^2 over F_4, uniquely
        let f4 = FieldDescriptor::finite(2, 2).unwrap();
        let g = FieldElem::generator(&f4).unwrap();
        let sys = SemilinearSystem {
            q_exp: 1,
            vectors: vec![vec![FieldElem::one(&f4)]],
            target: vec![g.clone()],
        };
        let sol = frobenius_solve(&sys).unwrap();
        assert_eq!(sol.particular.unwrap(), vec![g.pow(2).unwrap()]);
        assert!(sol.homogeneous_basis.is_empty());
    }

    #[test]
    fn prime_field_is_plain_linear() {
        // λ^5 = λ over F_5, so 2λ = 3 has the unique solution λ = 4
        let f5 = FieldDescriptor::prime(5).unwrap();
        let sys = SemilinearSystem {
            q_exp: 1,
            vectors: vec![vec![FieldElem::from_int(&f5, 2)]],
            target: vec![FieldElem::from_int(&f5, 3)],
        };
        let sol = frobenius_solve(&sys).unwrap();
        assert_eq!(sol.particular.unwrap(), vec![FieldElem::from_int(&f5, 4)]);
        assert!(sol.homogeneous_basis.is_empty());
    }
}
