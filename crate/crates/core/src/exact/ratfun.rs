//! Canonical fractions of multivariate polynomials over F_p.
//!
//! Invariant: numerator and denominator are coprime and the denominator is
//! monic under graded-lex; zero is `0/1`. Equality of values is therefore
//! equality of representations.

use super::poly::{gcd, Poly};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFun {
    pub num: Poly,
    pub den: Poly,
}

impl RatFun {
    pub fn from_poly(num: Poly) -> Self {
        let den = Poly::one(num.p, num.nvars);
        RatFun { num, den }
    }

    pub fn zero(p: u64, nvars: usize) -> Self {
        RatFun::from_poly(Poly::zero(p, nvars))
    }

    pub fn one(p: u64, nvars: usize) -> Self {
        RatFun::from_poly(Poly::one(p, nvars))
    }

    pub fn new(num: Poly, den: Poly, guard: u32) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFun::zero(num.p, num.nvars));
        }
        let g = gcd(&num, &den, guard)?;
        let mut num = num.div_exact(&g, guard)?;
        let mut den = den.div_exact(&g, guard)?;
        let lc = den.leading().expect("nonzero").1;
        if lc != 1 {
            let inv = super::finite::inv_mod(lc, den.p);
            num = num.scale(inv);
            den = den.scale(inv);
        }
        Ok(RatFun { num, den })
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn add(&self, other: &Self, guard: u32) -> Result<Self> {
        let num = self
            .num
            .mul(&other.den, guard)?
            .add(&other.num.mul(&self.den, guard)?);
        let den = self.den.mul(&other.den, guard)?;
        RatFun::new(num, den, guard)
    }

    pub fn neg(&self) -> Self {
        RatFun {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self, guard: u32) -> Result<Self> {
        self.add(&other.neg(), guard)
    }

    pub fn mul(&self, other: &Self, guard: u32) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(RatFun::zero(self.num.p, self.num.nvars));
        }
        if self.is_one() {
            return Ok(other.clone());
        }
        if other.is_one() {
            return Ok(self.clone());
        }
        RatFun::new(
            self.num.mul(&other.num, guard)?,
            self.den.mul(&other.den, guard)?,
            guard,
        )
    }

    pub fn inv(&self, guard: u32) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let _ = guard;
        let lc = self.num.leading().expect("nonzero").1;
        let inv = super::finite::inv_mod(lc, self.num.p);
        Ok(RatFun {
            num: self.den.scale(inv),
            den: self.num.scale(inv),
        })
    }

    pub fn div(&self, other: &Self, guard: u32) -> Result<Self> {
        self.mul(&other.inv(guard)?, guard)
    }

    pub fn pow(&self, e: u64, guard: u32) -> Result<Self> {
        Ok(RatFun {
            num: self.num.pow(e, guard)?,
            den: self.den.pow(e, guard)?,
        })
    }

    /// Coprimality and the monic denominator survive p-power maps, so both
    /// directions act termwise on the two polynomials.
    pub fn frobenius(&self, e: u32, guard: u32) -> Result<Self> {
        Ok(RatFun {
            num: self.num.frobenius(e, guard)?,
            den: self.den.frobenius(e, guard)?,
        })
    }

    pub fn pth_root(&self, e: u32) -> Result<Self> {
        Ok(RatFun {
            num: self.num.pth_root(e)?,
            den: self.den.pth_root(e)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const G: u32 = 512;

    fn t() -> Poly {
        Poly::var(2, 1, 0)
    }

    #[test]
    fn reduction_is_canonical() {
        // (t^2 + t) / t reduces to t + 1
        let num = t().mul(&t(), G).unwrap().add(&t());
        let r = RatFun::new(num, t(), G).unwrap();
        assert_eq!(r, RatFun::from_poly(t().add(&Poly::one(2, 1))));
    }

    #[test]
    fn inverse_swaps() {
        // inv((t+1)/t) = t/(t+1)
        let f = RatFun::new(t().add(&Poly::one(2, 1)), t(), G).unwrap();
        let i = f.inv(G).unwrap();
        assert_eq!(i.num, t());
        assert_eq!(i.den, t().add(&Poly::one(2, 1)));
        assert!(f.mul(&i, G).unwrap().is_one());
    }

    #[test]
    fn inv_of_zero_fails() {
        assert_eq!(
            RatFun::zero(2, 1).inv(G),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn pth_root_success_and_failure() {
        let sq = RatFun::from_poly(t().mul(&t(), G).unwrap());
        assert_eq!(sq.pth_root(1).unwrap(), RatFun::from_poly(t()));
        assert_eq!(RatFun::from_poly(t()).pth_root(1), Err(Error::NotAPower(1)));
    }
}
