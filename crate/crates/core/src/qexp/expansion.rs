//! Truncated q-expansions and the operators U_p, V_p, depletion, and
//! theta powers.
//!
//! An expansion stores the coefficients a_1..a_M; the truncation M is
//! part of the data and every operator states how much of it survives.
//! U_p keeps floor(M/p) coefficients, V_p keeps the length M but only
//! draws on the first floor(M/p) input coefficients, and depletion
//! keeps all of M.  Theta powers with a non-integral or negative
//! exponent exist only on depleted expansions, where every surviving
//! index is a p-adic unit.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::padic::{teichmuller, unit_power, PadicContext, PadicNum};

/// Weight bookkeeping on an expansion: classical integer weight, or a
/// point produced by family machinery where no single integer applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightTag {
    Int(i64),
    Family,
}

/// Exponent of a theta power.  `Int` is the t-fold q d/dq for t >= 0
/// and its exact inverse on depleted expansions for t < 0.  `Split`
/// carries a wild exponent applied to the principal-unit part <n>
/// together with the integer exponent of the Teichmuller part, which is
/// locally constant and cannot be absorbed into the wild one.
#[derive(Clone, Debug)]
pub enum ThetaExp {
    Int(i64),
    Split { teich: i64, wild: PadicNum },
}

/// A q-expansion a_1 q + a_2 q^2 + ... + a_M q^M with p-adic
/// coefficients, tagged by weight and level.
#[derive(Clone)]
pub struct QExpansion {
    ctx: Arc<PadicContext>,
    coeffs: Vec<PadicNum>,
    weight: WeightTag,
    level: u64,
}

impl QExpansion {
    pub fn new(
        ctx: &Arc<PadicContext>,
        coeffs: Vec<PadicNum>,
        weight: WeightTag,
        level: u64,
    ) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("an expansion needs at least a_1".into()));
        }
        if level == 0 {
            return Err(Error::Invalid("level tag must be positive".into()));
        }
        for (i, c) in coeffs.iter().enumerate() {
            if !Arc::ptr_eq(c.ctx(), ctx) {
                return Err(Error::ContextMismatch(format!(
                    "coefficient a_{} lives in a different context",
                    i + 1
                )));
            }
        }
        Ok(QExpansion {
            ctx: ctx.clone(),
            coeffs,
            weight,
            level,
        })
    }

    pub fn ctx(&self) -> &Arc<PadicContext> {
        &self.ctx
    }
    pub fn weight(&self) -> WeightTag {
        self.weight
    }
    pub fn level(&self) -> u64 {
        self.level
    }
    /// Number of stored coefficients M.
    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }
    pub fn coeffs(&self) -> &[PadicNum] {
        &self.coeffs
    }
    /// Coefficient of q^n, 1-based; n must lie within the truncation.
    pub fn an(&self, n: usize) -> &PadicNum {
        assert!(n >= 1 && n <= self.coeffs.len(), "q^{n} outside truncation");
        &self.coeffs[n - 1]
    }

    /// U_p: a_n of the output is a_{pn} of the input.  The truncation
    /// drops to floor(M/p).
    pub fn u_p(&self) -> Result<QExpansion> {
        let p = self.ctx.p() as usize;
        let m = self.coeffs.len() / p;
        if m == 0 {
            return Err(Error::Invalid(format!(
                "truncation {} is too short for U_{}",
                self.coeffs.len(),
                p
            )));
        }
        let coeffs = (1..=m).map(|n| self.coeffs[n * p - 1].clone()).collect();
        QExpansion::new(&self.ctx, coeffs, self.weight, self.level)
    }

    /// V_p: the output is supported on q^{pn} with a_{pn} = a_n.  The
    /// stored truncation stays M, so only the first floor(M/p) input
    /// coefficients remain visible.
    pub fn v_p(&self) -> QExpansion {
        let p = self.ctx.p() as usize;
        let coeffs = (1..=self.coeffs.len())
            .map(|n| {
                if n % p == 0 {
                    self.coeffs[n / p - 1].clone()
                } else {
                    PadicNum::zero(&self.ctx)
                }
            })
            .collect();
        QExpansion {
            ctx: self.ctx.clone(),
            coeffs,
            weight: self.weight,
            level: level_with_p_part(self.level, self.ctx.p(), 1),
        }
    }

    /// p-depletion 1 - V_p U_p: zeroes every coefficient a_{pn}.
    pub fn deplete(&self) -> QExpansion {
        let p = self.ctx.p() as usize;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if (i + 1) % p == 0 {
                    PadicNum::zero(&self.ctx)
                } else {
                    c.clone()
                }
            })
            .collect();
        QExpansion {
            ctx: self.ctx.clone(),
            coeffs,
            weight: self.weight,
            level: level_with_p_part(self.level, self.ctx.p(), 2),
        }
    }

    /// True when every stored coefficient with p | n vanishes at
    /// working precision.
    pub fn is_depleted(&self) -> bool {
        let p = self.ctx.p() as usize;
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| (i + 1) % p != 0 || c.is_zero_at_prec())
    }
}

/// The power of a in the level tag is raised to at least `min_pow`.
fn level_with_p_part(level: u64, p: u64, min_pow: u32) -> u64 {
    let mut v = 0u32;
    let mut l = level;
    while l % p == 0 {
        l /= p;
        v += 1;
    }
    level * p.pow(min_pow.saturating_sub(v))
}

/// Coefficient-wise a_n -> n^t a_n.
///
/// For t = Int(s) with s >= 0 this is the s-fold q d/dq on any
/// expansion.  Negative or split exponents require a depleted input;
/// surviving indices are prime to p, so n^t is taken inside Z_p with
/// the Teichmuller part raised to the integer exponent carried by t.
pub fn theta_power(g: &QExpansion, t: &ThetaExp) -> Result<QExpansion> {
    let ctx = g.ctx();
    let p = ctx.p() as usize;
    let needs_depleted = match t {
        ThetaExp::Int(s) => *s < 0,
        ThetaExp::Split { .. } => true,
    };
    if needs_depleted && !g.is_depleted() {
        return Err(Error::Invalid(
            "theta power with a non-integral or negative exponent needs a depleted expansion"
                .into(),
        ));
    }
    if let ThetaExp::Split { wild, .. } = t {
        if !Arc::ptr_eq(wild.ctx(), ctx) {
            return Err(Error::ContextMismatch(
                "wild theta exponent lives in a different context".into(),
            ));
        }
    }
    let mut coeffs = Vec::with_capacity(g.truncation());
    for n in 1..=g.truncation() {
        if needs_depleted && n % p == 0 {
            coeffs.push(PadicNum::zero(ctx));
            continue;
        }
        let nn = PadicNum::from_u64(ctx, n as u64);
        let scale = match t {
            ThetaExp::Int(s) => nn.pow_i64(*s)?,
            ThetaExp::Split { teich, wild } => {
                let w = teichmuller(&nn)?;
                let principal = nn.div(&w)?;
                w.pow_i64(*teich)?.mul(&unit_power(&principal, wild)?)?
            }
        };
        coeffs.push(g.an(n).mul(&scale)?);
    }
    let weight = match (g.weight(), t) {
        (WeightTag::Int(w), ThetaExp::Int(s)) => WeightTag::Int(w + 2 * s),
        _ => WeightTag::Family,
    };
    QExpansion::new(ctx, coeffs, weight, g.level())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn ctx5() -> Arc<PadicContext> {
        PadicContext::base(5, 10).unwrap()
    }

    fn fixture(ctx: &Arc<PadicContext>, m: usize, seed: u64) -> QExpansion {
        let mut rng = StdRng::seed_from_u64(seed);
        let coeffs = (1..=m)
            .map(|_| PadicNum::from_i64(ctx, rng.gen_range(-500..500)))
            .collect();
        QExpansion::new(ctx, coeffs, WeightTag::Int(2), 11).unwrap()
    }

    #[test]
    fn u_p_inverts_v_p_on_the_surviving_range() {
        let ctx = ctx5();
        let g = fixture(&ctx, 200, 7);
        let back = g.v_p().u_p().unwrap();
        assert_eq!(back.truncation(), 40);
        for n in 1..=back.truncation() {
            assert!(back.an(n).eq_working(g.an(n)).unwrap());
        }
        assert_eq!(back.level(), 55);
    }

    #[test]
    fn depletion_is_idempotent_and_kills_p_multiples() {
        let ctx = ctx5();
        let g = fixture(&ctx, 200, 8);
        let d = g.deplete();
        assert!(d.is_depleted());
        assert_eq!(d.level(), 11 * 25);
        let dd = d.deplete();
        for n in 1..=200 {
            assert!(dd.an(n).eq_working(d.an(n)).unwrap());
            if n % 5 == 0 {
                assert!(d.an(n).is_zero_at_prec());
            } else {
                assert!(d.an(n).eq_working(g.an(n)).unwrap());
            }
        }
    }

    #[test]
    fn integer_theta_matches_iterated_q_ddq() {
        let ctx = ctx5();
        let g = fixture(&ctx, 60, 9);
        let mut by_steps = g.clone();
        for _ in 0..3 {
            by_steps = theta_power(&by_steps, &ThetaExp::Int(1)).unwrap();
        }
        let at_once = theta_power(&g, &ThetaExp::Int(3)).unwrap();
        for n in 1..=60 {
            let direct = g
                .an(n)
                .mul(&PadicNum::from_u64(&ctx, n as u64).pow_i64(3).unwrap())
                .unwrap();
            assert!(at_once.an(n).eq_working(&direct).unwrap());
            assert!(by_steps.an(n).eq_working(&direct).unwrap());
        }
        assert_eq!(at_once.weight(), WeightTag::Int(8));
    }

    #[test]
    fn theta_powers_add_on_depleted_expansions() {
        let ctx = ctx5();
        let g = fixture(&ctx, 80, 10).deplete();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..30 {
            let s = rng.gen_range(-6..7);
            let t = rng.gen_range(-6..7);
            let lhs = theta_power(&theta_power(&g, &ThetaExp::Int(s)).unwrap(), &ThetaExp::Int(t))
                .unwrap();
            let rhs = theta_power(&g, &ThetaExp::Int(s + t)).unwrap();
            for n in 1..=80 {
                assert!(lhs.an(n).eq_working(rhs.an(n)).unwrap());
            }
        }
    }

    #[test]
    fn negative_theta_round_trips_and_requires_depletion() {
        let ctx = ctx5();
        let g = fixture(&ctx, 100, 12);
        assert!(matches!(
            theta_power(&g, &ThetaExp::Int(-1)),
            Err(Error::Invalid(_))
        ));
        let d = g.deplete();
        let back = theta_power(&theta_power(&d, &ThetaExp::Int(-1)).unwrap(), &ThetaExp::Int(1))
            .unwrap();
        for n in 1..=100 {
            assert!(back.an(n).eq_working(d.an(n)).unwrap());
        }
    }

    #[test]
    fn split_theta_agrees_with_the_integer_power() {
        let ctx = ctx5();
        let d = fixture(&ctx, 60, 13).deplete();
        for s in [-3i64, 2, 5] {
            let split = ThetaExp::Split {
                teich: s,
                wild: PadicNum::from_i64(&ctx, s),
            };
            let a = theta_power(&d, &split).unwrap();
            let b = theta_power(&d, &ThetaExp::Int(s)).unwrap();
            for n in 1..=60 {
                assert!(a.an(n).eq_working(b.an(n)).unwrap());
            }
            assert_eq!(a.weight(), WeightTag::Family);
        }
    }
}
