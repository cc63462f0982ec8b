//! Contexts: the ambient local field and its working precision.
//!
//! A context is `Q_p` itself or a finite extension presented by one monic
//! polynomial over `Z_p`.  Two presentations are accepted, and certified at
//! construction time:
//!
//! * polynomials irreducible modulo p give unramified extensions
//!   (e = 1, f = degree);
//! * Eisenstein polynomials give totally ramified extensions
//!   (e = degree, f = 1).
//!
//! Anything else is rejected: irreducibility of a mixed polynomial cannot be
//! certified by the residue factorisation alone, and no computation in this
//! crate needs such a field.  In every case e * f equals the degree of the
//! defining polynomial.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

use super::fppoly;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtKind {
    Base,
    Unramified,
    Eisenstein,
}

#[derive(Debug)]
pub struct PadicContext {
    p: u64,
    prec_cap: u32,
    /// Monic defining polynomial, constant term first; empty for the base field.
    poly: Vec<BigUint>,
    kind: ExtKind,
    e: u32,
    f: u32,
}

impl PartialEq for PadicContext {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.prec_cap == other.prec_cap && self.poly == other.poly
    }
}
impl Eq for PadicContext {}

impl PadicContext {
    /// The base field Q_p at absolute precision cap `prec`.
    pub fn base(p: u64, prec: u32) -> Result<Arc<Self>> {
        check_p(p)?;
        if prec == 0 {
            return Err(Error::Invalid("precision cap must be positive".into()));
        }
        Ok(Arc::new(PadicContext {
            p,
            prec_cap: prec,
            poly: vec![],
            kind: ExtKind::Base,
            e: 1,
            f: 1,
        }))
    }

    /// Extension presented by a monic polynomial (constant term first).
    /// The polynomial is classified as irreducible mod p (unramified) or
    /// Eisenstein (totally ramified); anything else is rejected.
    pub fn with_poly(p: u64, poly: Vec<BigInt>, prec: u32) -> Result<Arc<Self>> {
        check_p(p)?;
        if prec == 0 {
            return Err(Error::Invalid("precision cap must be positive".into()));
        }
        let deg = poly.len().saturating_sub(1);
        if deg < 1 {
            return Err(Error::Invalid("defining polynomial must have degree >= 1".into()));
        }
        if poly[deg] != BigInt::one() {
            return Err(Error::Invalid("defining polynomial must be monic".into()));
        }
        if deg == 1 {
            return Self::base(p, prec);
        }
        let modulus = BigUint::from(p).pow(prec + 2);
        let coeffs: Vec<BigUint> = poly
            .iter()
            .map(|c| {
                let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
                let r = ((c % &m) + &m) % &m;
                r.to_biguint().unwrap()
            })
            .collect();
        // classification mod p
        let residues: Vec<u64> = coeffs
            .iter()
            .map(|c| (c % BigUint::from(p)).try_into().unwrap_or(0u64))
            .collect();
        let kind = if fppoly::is_irreducible(&residues, p) {
            ExtKind::Unramified
        } else {
            let eisenstein = residues[..deg].iter().all(|&c| c == 0)
                && (&coeffs[0] % BigUint::from(p * p)) != BigUint::zero();
            if eisenstein {
                ExtKind::Eisenstein
            } else {
                return Err(Error::UnsupportedExtension(
                    "polynomial is neither irreducible mod p nor Eisenstein; \
                     irreducibility cannot be certified"
                        .into(),
                ));
            }
        };
        let (e, f) = match kind {
            ExtKind::Unramified => (1, deg as u32),
            ExtKind::Eisenstein => (deg as u32, 1),
            ExtKind::Base => unreachable!(),
        };
        Ok(Arc::new(PadicContext {
            p,
            prec_cap: prec,
            poly: coeffs,
            kind,
            e,
            f,
        }))
    }

    /// Unramified extension of residue degree f, with a deterministically
    /// chosen defining polynomial (first irreducible found in a fixed sweep
    /// of sparse candidates).
    pub fn unramified(p: u64, f: u32, prec: u32) -> Result<Arc<Self>> {
        check_p(p)?;
        if f == 0 {
            return Err(Error::Invalid("residue degree must be positive".into()));
        }
        if f == 1 {
            return Self::base(p, prec);
        }
        let deg = f as usize;
        // Sweep x^f + c1 x + c0, then x^f + c2 x^2 + c1 x + c0.
        for c1 in 0..p {
            for c0 in 1..p {
                let mut g = vec![0u64; deg + 1];
                g[0] = c0;
                g[1] = c1;
                g[deg] = 1;
                if fppoly::is_irreducible(&g, p) {
                    let poly: Vec<BigInt> = g.iter().map(|&c| BigInt::from(c)).collect();
                    return Self::with_poly(p, poly, prec);
                }
            }
        }
        for c2 in 1..p {
            for c1 in 0..p {
                for c0 in 1..p {
                    let mut g = vec![0u64; deg + 1];
                    g[0] = c0;
                    g[1] = c1;
                    g[2] = c2;
                    g[deg] = 1;
                    if fppoly::is_irreducible(&g, p) {
                        let poly: Vec<BigInt> = g.iter().map(|&c| BigInt::from(c)).collect();
                        return Self::with_poly(p, poly, prec);
                    }
                }
            }
        }
        Err(Error::UnsupportedExtension(format!(
            "no sparse irreducible polynomial of degree {f} found mod {p}"
        )))
    }

    /// Totally ramified extension from an Eisenstein polynomial.
    pub fn eisenstein(p: u64, poly: Vec<BigInt>, prec: u32) -> Result<Arc<Self>> {
        let ctx = Self::with_poly(p, poly, prec)?;
        if ctx.kind != ExtKind::Eisenstein {
            return Err(Error::UnsupportedExtension(
                "polynomial is not Eisenstein".into(),
            ));
        }
        Ok(ctx)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn p_big(&self) -> BigUint {
        BigUint::from(self.p)
    }
    pub fn prec_cap(&self) -> u32 {
        self.prec_cap
    }
    pub fn kind(&self) -> ExtKind {
        self.kind
    }
    pub fn ram_index(&self) -> u32 {
        self.e
    }
    pub fn res_degree(&self) -> u32 {
        self.f
    }
    pub fn degree(&self) -> usize {
        if self.poly.is_empty() {
            1
        } else {
            self.poly.len() - 1
        }
    }
    /// Size of the residue field, p^f.
    pub fn residue_size(&self) -> BigUint {
        self.p_big().pow(self.f)
    }
    pub fn poly(&self) -> &[BigUint] {
        &self.poly
    }
    pub fn p_pow(&self, t: u32) -> BigUint {
        self.p_big().pow(t)
    }
    /// Defining polynomial as signed integers (for serialisation).
    pub fn poly_bigint(&self) -> Vec<BigInt> {
        self.poly
            .iter()
            .map(|c| BigInt::from_biguint(Sign::Plus, c.clone()))
            .collect()
    }
}

fn check_p(p: u64) -> Result<()> {
    if p < 3 {
        return Err(Error::Invalid("p must be an odd prime".into()));
    }
    if p % 2 == 0 {
        return Err(Error::Invalid("p must be odd".into()));
    }
    // trial division is fine at this scale
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        d += 2;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_field_parameters() {
        let ctx = PadicContext::base(5, 10).unwrap();
        assert_eq!(ctx.degree(), 1);
        assert_eq!(ctx.ram_index(), 1);
        assert_eq!(ctx.res_degree(), 1);
    }

    #[test]
    fn unramified_classification() {
        let ctx = PadicContext::with_poly(5, vec![BigInt::from(2), BigInt::from(0), BigInt::from(1)], 8).unwrap();
        assert_eq!(ctx.kind(), ExtKind::Unramified);
        assert_eq!(ctx.ram_index() * ctx.res_degree(), 2);
    }

    #[test]
    fn eisenstein_classification() {
        // x^2 - 5
        let ctx = PadicContext::with_poly(5, vec![BigInt::from(-5), BigInt::from(0), BigInt::from(1)], 8).unwrap();
        assert_eq!(ctx.kind(), ExtKind::Eisenstein);
        assert_eq!(ctx.ram_index(), 2);
        assert_eq!(ctx.res_degree(), 1);
    }

    #[test]
    fn mixed_polynomial_rejected() {
        // x^2 - 1 factors mod 5 and is not Eisenstein
        let r = PadicContext::with_poly(5, vec![BigInt::from(-1), BigInt::from(0), BigInt::from(1)], 8);
        assert!(r.is_err());
    }

    #[test]
    fn ef_equals_degree_for_generated_unramified() {
        for f in 2..6u32 {
            let ctx = PadicContext::unramified(5, f, 6).unwrap();
            assert_eq!(ctx.ram_index() * ctx.res_degree(), f);
            assert_eq!(ctx.degree() as u32, f);
        }
    }

    #[test]
    fn composite_p_rejected() {
        assert!(PadicContext::base(9, 5).is_err());
        assert!(PadicContext::base(2, 5).is_err());
    }
}
