//! Coefficient abstraction shared by the distribution modules.
//!
//! Distribution and symmetric-tensor code is generic over a weight law: a
//! scalar law (fixed integer weight k, coefficients in a p-adic field) or a
//! family law (coefficients in the truncated Iwasawa algebra of a weight
//! disc).  The law supplies exactly the weight-dependent ingredients the
//! monoid action and the eigenvector formulae consume: the character value
//! κ(d) and the binomial elements binom(κ - s, j).

use std::fmt::Debug;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::padic::{PadicContext, PadicNum, Val, ValBound};

/// Ring operations needed from a coefficient type.  Implementations carry
/// their own context; mixing contexts is an error, not a panic.
pub trait RingElem: Clone + Debug {
    fn radd(&self, other: &Self) -> Result<Self>;
    fn rsub(&self, other: &Self) -> Result<Self>;
    fn rmul(&self, other: &Self) -> Result<Self>;
    fn rneg(&self) -> Self;
    fn rscale_i64(&self, k: i64) -> Self;
    fn rscale_big(&self, k: &BigInt) -> Result<Self>;
    /// Equality at the joint working precision.
    fn req(&self, other: &Self) -> Result<bool>;
    fn rzero_like(&self) -> Self;
    fn rone_like(&self) -> Self;
    /// Indistinguishable from zero at working precision.
    fn ris_zero(&self) -> bool;
    /// Exponent of the power of p cleared into the denominator.
    fn rdenom_exp(&self) -> u32;
    /// Lower bound for the valuation, over the whole domain for families.
    fn rval_lower(&self) -> Val;
}

impl RingElem for PadicNum {
    fn radd(&self, other: &Self) -> Result<Self> {
        self.add(other)
    }
    fn rsub(&self, other: &Self) -> Result<Self> {
        self.sub(other)
    }
    fn rmul(&self, other: &Self) -> Result<Self> {
        self.mul(other)
    }
    fn rneg(&self) -> Self {
        self.neg()
    }
    fn rscale_i64(&self, k: i64) -> Self {
        self.mul_i64(k)
    }
    fn rscale_big(&self, k: &BigInt) -> Result<Self> {
        self.mul(&PadicNum::from_bigint(self.ctx(), k))
    }
    fn req(&self, other: &Self) -> Result<bool> {
        self.eq_working(other)
    }
    fn rzero_like(&self) -> Self {
        PadicNum::zero(self.ctx())
    }
    fn rone_like(&self) -> Self {
        PadicNum::one(self.ctx())
    }
    fn ris_zero(&self) -> bool {
        self.is_zero_at_prec()
    }
    fn rdenom_exp(&self) -> u32 {
        self.denom_exp()
    }
    fn rval_lower(&self) -> Val {
        self.valuation().lower()
    }
}

/// A weight law: the data distinguishing "fixed integer weight" from
/// "family over a disc" in the modules built on top.
pub trait WeightLaw: Clone + Debug {
    type Coef: RingElem;

    fn base_ctx(&self) -> &Arc<PadicContext>;

    /// Scalars embed into the coefficient ring.
    fn embed(&self, c: &PadicNum) -> Result<Self::Coef>;

    /// The weight character evaluated at a unit d.
    fn kappa(&self, d: &PadicNum) -> Result<Self::Coef>;

    /// binom(κ - shift, j) in the coefficient ring.
    fn binom_weight(&self, shift: i64, j: u32) -> Result<Self::Coef>;

    /// Two laws are compatible when their coefficient rings coincide.
    fn same_law(&self, other: &Self) -> bool;

    /// Specialises a coefficient at an integer weight k.  The scalar law
    /// only accepts its own weight; the family law requires k admissible.
    fn specialize_coef(&self, c: &Self::Coef, k: i64) -> Result<PadicNum>;

    /// The law whose weights sit j higher.  Coefficient rings are
    /// identified: a family keeps its disc coordinate, only the centre
    /// moves, so elements transport with unchanged coefficients.
    fn raise(&self, j: u32) -> Self;

    /// Transports a coefficient along the identification into `target`.
    fn retag_coef(&self, c: &Self::Coef, target: &Self) -> Result<Self::Coef>;

    /// Smallest level n at which the weight character is n-analytic, so
    /// the monoid action series converge on level-n modules.
    fn min_level(&self) -> Result<u32>;

    fn describe(&self) -> String;
}

/// Fixed integer weight k over a p-adic coefficient field.
#[derive(Clone, Debug)]
pub struct IntWeight {
    ctx: Arc<PadicContext>,
    k: i64,
}

impl IntWeight {
    pub fn new(ctx: &Arc<PadicContext>, k: i64) -> Self {
        IntWeight {
            ctx: ctx.clone(),
            k,
        }
    }
    pub fn k(&self) -> i64 {
        self.k
    }
}

/// Exact integer binomial with a possibly negative or shifted top argument:
/// top(top-1)...(top-j+1)/j!.
pub fn binom_int_big(top: i64, j: u32) -> (BigInt, BigInt) {
    let mut num = BigInt::one();
    for i in 0..j as i64 {
        num *= BigInt::from(top - i);
    }
    let mut den = BigInt::one();
    for i in 1..=j as i64 {
        den *= BigInt::from(i);
    }
    (num, den)
}

impl WeightLaw for IntWeight {
    type Coef = PadicNum;

    fn base_ctx(&self) -> &Arc<PadicContext> {
        &self.ctx
    }

    fn embed(&self, c: &PadicNum) -> Result<PadicNum> {
        if !(**c.ctx() == *self.ctx) {
            return Err(Error::ContextMismatch(
                "scalar context differs from the weight context".into(),
            ));
        }
        Ok(c.clone())
    }

    fn kappa(&self, d: &PadicNum) -> Result<PadicNum> {
        match d.valuation() {
            ValBound::Exact(v) if v.num == 0 => {}
            _ => return Err(Error::Invalid("weight character needs a unit".into())),
        }
        d.pow_i64(self.k)
    }

    fn binom_weight(&self, shift: i64, j: u32) -> Result<PadicNum> {
        let (num, den) = binom_int_big(self.k - shift, j);
        PadicNum::from_rational(&self.ctx, &num, &den)
    }

    fn same_law(&self, other: &Self) -> bool {
        self.k == other.k && *self.ctx == *other.ctx
    }

    fn specialize_coef(&self, c: &PadicNum, k: i64) -> Result<PadicNum> {
        if k != self.k {
            return Err(Error::Invalid(format!(
                "scalar law at weight {} cannot specialise at {}",
                self.k, k
            )));
        }
        Ok(c.clone())
    }

    fn raise(&self, j: u32) -> Self {
        IntWeight {
            ctx: self.ctx.clone(),
            k: self.k + j as i64,
        }
    }

    fn retag_coef(&self, c: &PadicNum, target: &Self) -> Result<PadicNum> {
        if *self.ctx != *target.ctx {
            return Err(Error::ContextMismatch(
                "weight laws live over different fields".into(),
            ));
        }
        Ok(c.clone())
    }

    fn min_level(&self) -> Result<u32> {
        Ok(1)
    }

    fn describe(&self) -> String {
        format!("integer weight k={}", self.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_binomials_including_negative_top() {
        let (n, d) = binom_int_big(5, 2);
        assert_eq!(n / d, BigInt::from(10));
        let (n, d) = binom_int_big(-1, 3);
        assert_eq!(n / d, BigInt::from(-1));
        let (n, d) = binom_int_big(3, 0);
        assert_eq!(n, BigInt::one());
        assert_eq!(d, BigInt::one());
        // binom(-2, 2) = (-2)(-3)/2 = 3
        let (n, d) = binom_int_big(-2, 2);
        assert_eq!(n / d, BigInt::from(3));
    }

    #[test]
    fn int_weight_kappa_is_the_power_map() {
        let ctx = PadicContext::base(5, 10).unwrap();
        let law = IntWeight::new(&ctx, 3);
        let d = PadicNum::from_u64(&ctx, 7);
        let kd = law.kappa(&d).unwrap();
        assert!(kd.eq_working(&PadicNum::from_u64(&ctx, 343)).unwrap());
        // negative weight: κ(d) = d^k with k < 0
        let law = IntWeight::new(&ctx, -2);
        let kd = law.kappa(&d).unwrap();
        let check = kd.mul(&PadicNum::from_u64(&ctx, 49)).unwrap();
        assert!(check.eq_working(&PadicNum::one(&ctx)).unwrap());
    }

    #[test]
    fn binom_weight_matches_rational_oracle() {
        let ctx = PadicContext::base(5, 10).unwrap();
        let law = IntWeight::new(&ctx, 10);
        // binom(10 - 2, 3) = binom(8,3) = 56
        let b = law.binom_weight(2, 3).unwrap();
        assert!(b.eq_working(&PadicNum::from_u64(&ctx, 56)).unwrap());
        // denominator exponent appears when j! carries p: binom(10, 5) = 252
        let b = law.binom_weight(0, 5).unwrap();
        assert!(b.eq_working(&PadicNum::from_u64(&ctx, 252)).unwrap());
    }
}
