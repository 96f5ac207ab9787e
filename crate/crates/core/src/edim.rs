//! Closed-form essential-dimension bookkeeping: the invariant
//! τ(n,e) = n Σ_i p^{s_i − i·e_i}, the structure-constant upper bound, and
//! the Lie-algebra lower bound, computed by three separate routes that must
//! agree exactly.

use crate::error::{Error, Result};
use crate::lambda::{scheme_dims, EType, SchemeDims};

/// τ(n, e) = n Σ_{i=1}^r p^{s_i − i e_i}, via the partial sums s_i.
pub fn tau(n: u64, e: &EType, p: u64) -> Result<u128> {
    if n == 0 {
        return Err(Error::Invalid("n must be >= 1".into()));
    }
    let mut sum: u128 = 0;
    for i in 1..=e.r() {
        let s_i = e.s(i);
        let exp = s_i - i as u64 * e.exps()[i - 1] as u64;
        let term = (p as u128)
            .checked_pow(u32::try_from(exp).map_err(|_| Error::Overflow)?)
            .ok_or(Error::Overflow)?;
        sum = sum.checked_add(term).ok_or(Error::Overflow)?;
    }
    (n as u128).checked_mul(sum).ok_or(Error::Overflow)
}

/// The upper bound through the counting of structure-constant generators:
/// for each i there are Π_{j<i} p^{e_j − e_i} admissible coefficient indices.
/// Algebraically equal to τ, but computed as the product-of-ranges sum.
pub fn upper_bound(n: u64, e: &EType, p: u64) -> Result<u128> {
    if n == 0 {
        return Err(Error::Invalid("n must be >= 1".into()));
    }
    let mut sum: u128 = 0;
    for i in 1..=e.r() {
        let mut term: u128 = 1;
        for j in 1..i {
            let range = (p as u128)
                .checked_pow(e.exps()[j - 1] - e.exps()[i - 1])
                .ok_or(Error::Overflow)?;
            term = term.checked_mul(range).ok_or(Error::Overflow)?;
        }
        sum = sum.checked_add(term).ok_or(Error::Overflow)?;
    }
    (n as u128).checked_mul(sum).ok_or(Error::Overflow)
}

/// The Lie-algebra lower bound n·(dim Lie(G_e) − dim G_e), assembled from the
/// scheme dimensions.
pub fn tv_lower(n: u64, e: &EType, p: u64) -> Result<u128> {
    let dims = scheme_dims(e, n, p)?;
    let gap = dims
        .dim_lie_g
        .checked_sub(dims.dim_g)
        .ok_or(Error::Overflow)?;
    (n as u128).checked_mul(gap).ok_or(Error::Overflow)
}

/// The consistency record: all three routes, the dimension data behind the
/// lower bound, and the ratio check τ/(n·p^{s_r}) <= r/p^r <= 1/p.
#[derive(Debug, Clone)]
pub struct EdReport {
    pub p: u64,
    pub n: u64,
    pub e: EType,
    pub tau: u128,
    pub upper: u128,
    pub tv_lower: u128,
    pub dims: SchemeDims,
    pub ratio_bound_ok: bool,
}

pub fn ed_report(n: u64, e: &EType, p: u64) -> Result<EdReport> {
    let t = tau(n, e, p)?;
    let u = upper_bound(n, e, p)?;
    let tv = tv_lower(n, e, p)?;
    if t != u || t != tv {
        return Err(Error::SandwichMismatch {
            tau: t,
            upper: u,
            tv,
        });
    }
    let dims = scheme_dims(e, n, p)?;
    // τ·p^r <= n·r·p^{s_r} and r·p <= p^r, both exactly in integers
    let r = e.r() as u128;
    let p_r = (p as u128)
        .checked_pow(e.r() as u32)
        .ok_or(Error::Overflow)?;
    let deg = (n as u128)
        .checked_mul(e.lambda_dim(p)?)
        .ok_or(Error::Overflow)?;
    let lhs = t.checked_mul(p_r).ok_or(Error::Overflow)?;
    let rhs = r.checked_mul(deg).ok_or(Error::Overflow)?;
    let ratio_bound_ok = lhs <= rhs && r * p as u128 <= p_r * 1;
    Ok(EdReport {
        p,
        n,
        e: e.clone(),
        tau: t,
        upper: u,
        tv_lower: tv,
        dims,
        ratio_bound_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn et(e: &[u32]) -> EType {
        EType::new(e.to_vec()).unwrap()
    }

    #[test]
    fn constant_type_gives_r() {
        // all exponents equal: τ(1, e) = r
        for p in [2u64, 3, 5] {
            for e in [vec![1], vec![2, 2], vec![3, 3, 3], vec![1, 1, 1, 1]] {
                let r = e.len() as u128;
                assert_eq!(tau(1, &et(&e), p).unwrap(), r);
            }
        }
    }

    #[test]
    fn hand_computed_values() {
        assert_eq!(tau(1, &et(&[2, 1]), 2).unwrap(), 3); // 2^0 + 2^1
        assert_eq!(tau(3, &et(&[1]), 5).unwrap(), 3);
        assert_eq!(tau(1, &et(&[3, 1]), 2).unwrap(), 5); // 1 + 2^2
        assert_eq!(tau(2, &et(&[2, 2]), 3).unwrap(), 4);
    }

    #[test]
    fn tv_values() {
        assert_eq!(tv_lower(1, &et(&[1]), 2).unwrap(), 1); // 2 − 1
        assert_eq!(tv_lower(2, &et(&[1, 1]), 2).unwrap(), 4); // 2(8 − 6)
        assert_eq!(tv_lower(1, &et(&[2, 1]), 2).unwrap(), 3); // 16 − 13
    }

    #[test]
    fn report_sandwich_holds() {
        for p in [2u64, 3, 5] {
            for n in 1..=3u64 {
                for e in [vec![1], vec![2, 1], vec![3, 2, 2], vec![4, 1]] {
                    let rep = ed_report(n, &et(&e), p).unwrap();
                    assert_eq!(rep.tau, rep.upper);
                    assert_eq!(rep.tau, rep.tv_lower);
                    assert!(rep.ratio_bound_ok);
                }
            }
        }
    }
}
