//! The Hecke polynomial at the context prime and p-stabilisation.
//!
//! For a record of weight w and level prime to p, the polynomial is
//! X^2 - a_p X + eps(p) p^{w-1}.  Roots are sought inside the
//! coefficient context through the discriminant; when none exists
//! there the answer names the obstruction instead of inventing an
//! extension.  Stabilisation by a root alpha forms
//! f_alpha = f(q) - beta f(q^p) and certifies U_p f_alpha = alpha
//! f_alpha on the surviving truncation before handing it back.

use crate::error::{Error, Result};
use crate::padic::{sqrt, PadicNum};

use super::expansion::{QExpansion, WeightTag};
use super::newform::NewformRecord;

/// X^2 - a_p X + c with c = eps(p) p^{w-1}, over the record's context.
pub struct HeckePoly {
    a_p: PadicNum,
    c: PadicNum,
}

/// Outcome of root finding in the coefficient context.  `ramified`
/// reports whether the discriminant valuation is odd, in which case
/// the roots need a ramified quadratic extension.
pub enum RootStatus {
    InContext { alpha: PadicNum, beta: PadicNum },
    NeedsExtension { disc: PadicNum, ramified: bool },
}

/// The Hecke polynomial of the record at the prime of its coefficient
/// context.  The prime must not divide the level and a_p must lie
/// within the truncation.
pub fn hecke_poly(f: &NewformRecord) -> Result<HeckePoly> {
    let ctx = f.ctx();
    let p = ctx.p();
    if f.level() % p == 0 {
        return Err(Error::Level(format!(
            "the context prime {p} divides the level {}",
            f.level()
        )));
    }
    if (p as usize) > f.truncation() {
        return Err(Error::Invalid(format!(
            "truncation {} does not reach a_{p}",
            f.truncation()
        )));
    }
    let c = f
        .eps()
        .eval_min(p as i64, ctx)?
        .mul(&PadicNum::from_u64(ctx, p).pow_i64(f.weight() as i64 - 1)?)?;
    Ok(HeckePoly {
        a_p: f.an(p as usize).clone(),
        c,
    })
}

impl HeckePoly {
    /// Coefficients [1, -a_p, c] of X^2 - a_p X + c.
    pub fn coeffs(&self) -> [PadicNum; 3] {
        [
            PadicNum::one(self.a_p.ctx()),
            self.a_p.neg(),
            self.c.clone(),
        ]
    }

    pub fn eval(&self, x: &PadicNum) -> Result<PadicNum> {
        x.mul(x)?.sub(&self.a_p.mul(x)?)?.add(&self.c)
    }

    /// Both roots via the discriminant, ordered by valuation with
    /// alpha the smaller.  A discriminant vanishing at working
    /// precision cannot separate the roots and is an error.
    pub fn roots(&self) -> Result<RootStatus> {
        let ctx = self.a_p.ctx();
        let four = PadicNum::from_i64(ctx, 4);
        let disc = self.a_p.mul(&self.a_p)?.sub(&four.mul(&self.c)?)?;
        if disc.is_zero_at_prec() {
            return Err(Error::Precision(
                "discriminant vanishes at working precision".into(),
            ));
        }
        match sqrt(&disc) {
            Ok(s) => {
                let half = PadicNum::from_i64(ctx, 2).inv()?;
                let r1 = self.a_p.add(&s)?.mul(&half)?;
                let r2 = self.a_p.sub(&s)?.mul(&half)?;
                let (alpha, beta) = if r1.valuation().lower() <= r2.valuation().lower() {
                    (r1, r2)
                } else {
                    (r2, r1)
                };
                Ok(RootStatus::InContext { alpha, beta })
            }
            Err(Error::NoRoot(_)) => {
                let v = disc.valuation().lower();
                Ok(RootStatus::NeedsExtension {
                    ramified: v.num % 2 != 0,
                    disc,
                })
            }
            Err(e) => Err(e),
        }
    }
}

/// f_alpha(q) = f(q) - beta f(q^p) for a certified root alpha of the
/// Hecke polynomial.  The result keeps the record's truncation, is
/// tagged at level Np, and passes the U_p eigen check on the first
/// floor(M/p) coefficients before being returned.
pub fn p_stabilize(f: &NewformRecord, alpha: &PadicNum) -> Result<QExpansion> {
    let ctx = f.ctx();
    let p = ctx.p() as usize;
    let poly = hecke_poly(f)?;
    if !poly.eval(alpha)?.is_zero_at_prec() {
        return Err(Error::Invalid(
            "the given value is not a root of the Hecke polynomial".into(),
        ));
    }
    let beta = f.an(p).sub(alpha)?;
    let m = f.truncation();
    let mut coeffs = Vec::with_capacity(m);
    for n in 1..=m {
        let b = if n % p == 0 {
            f.an(n).sub(&beta.mul(f.an(n / p))?)?
        } else {
            f.an(n).clone()
        };
        coeffs.push(b);
    }
    let out = QExpansion::new(
        ctx,
        coeffs,
        WeightTag::Int(f.weight() as i64),
        f.level() * p as u64,
    )?;
    for n in 1..=m / p {
        let expect = alpha.mul(out.an(n))?;
        if !out.an(n * p).eq_working(&expect)? {
            return Err(Error::Fixture(format!(
                "the stabilised expansion fails the U_p eigen check at q^{}",
                n * p
            )));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{PadicContext, Val};
    use std::sync::Arc;

    use super::super::newform::eta_square_11;
    use crate::cm::DirichletGroup;

    #[test]
    fn the_ordinary_root_stabilises_the_eta_form() {
        let ctx = PadicContext::base(5, 12).unwrap();
        let f = eta_square_11(&ctx, 200).unwrap();
        let poly = hecke_poly(&f).unwrap();
        let (alpha, beta) = match poly.roots().unwrap() {
            RootStatus::InContext { alpha, beta } => (alpha, beta),
            RootStatus::NeedsExtension { .. } => panic!("eta form is ordinary at 5"),
        };
        assert_eq!(alpha.valuation().lower(), Val::int(0));
        assert_eq!(beta.valuation().lower(), Val::int(1));
        let five = PadicNum::from_i64(&ctx, 5);
        assert!(alpha.mul(&beta).unwrap().eq_working(&five).unwrap());
        assert!(alpha.add(&beta).unwrap().eq_working(f.an(5)).unwrap());

        let stab = p_stabilize(&f, &alpha).unwrap();
        assert_eq!(stab.level(), 55);
        assert!(stab.an(1).eq_working(&PadicNum::one(&ctx)).unwrap());
        assert!(stab.an(5).eq_working(&alpha).unwrap());
        let up = stab.u_p().unwrap();
        for n in 1..=up.truncation() {
            assert!(up
                .an(n)
                .eq_working(&alpha.mul(stab.an(n)).unwrap())
                .unwrap());
        }
    }

    #[test]
    fn a_wrong_root_is_rejected() {
        let ctx = PadicContext::base(5, 10).unwrap();
        let f = eta_square_11(&ctx, 40).unwrap();
        let not_root = PadicNum::from_i64(&ctx, 3);
        assert!(matches!(
            p_stabilize(&f, &not_root),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn a_vanishing_a_p_reports_the_ramified_extension() {
        let ctx = PadicContext::base(5, 10).unwrap();
        let eps = DirichletGroup::new(11).unwrap().trivial();
        let ints = [1i64, 1, 1, -1, 0, 1];
        let coeffs = ints
            .iter()
            .map(|&c| PadicNum::from_i64(&ctx, c))
            .collect();
        let f = NewformRecord::new(&ctx, "supersingular-toy", 11, 2, eps, coeffs).unwrap();
        match hecke_poly(&f).unwrap().roots().unwrap() {
            RootStatus::NeedsExtension { disc, ramified } => {
                assert!(ramified);
                assert_eq!(disc.valuation().lower(), Val::int(1));
            }
            RootStatus::InContext { .. } => panic!("x^2 + 5 has no root in Q_5"),
        }
    }

    #[test]
    fn the_level_prime_is_rejected(){
        let ctx: Arc<PadicContext> = PadicContext::base(11, 8).unwrap();
        let f = eta_square_11(&ctx, 30).unwrap();
        assert!(matches!(hecke_poly(&f), Err(Error::Level(_))));
    }
}
