//! CM points and their matrix embeddings into the level monoid.
//!
//! The point is tau = omega + t, a generator of O_K translated until its
//! norm is prime to p, so tau is a unit at every prime above p.  The
//! attached ring embedding iota is pinned by the eigenvector identity
//!
//! ```text
//!   iota(u) (tau, 1)^t = u (tau, 1)^t,
//! ```
//!
//! which in the basis u = x + y tau reads
//! iota(u) = [[x + y Tr(tau), -y N(tau)], [y, x]].  Conjugating by
//! diag(p^m, 1) gives the layer-m embedding; it is integral exactly on
//! the order Z + p^m O_K and lands in the level monoid with lower-left
//! valuation 2m.  The twisted point tau* = -1/conj(tau) scaled to layer m
//! has p-adic coordinates z0 = sigma(tau*_m), zbar0 = sigmabar(tau*_m)
//! of valuation exactly m, and iota_m(u) fixes z0 under the transposed
//! Moebius action with eigenvalue sigma(u): the pair (z0, zbar0) seeds
//! the eigen-distributions of the distribution layer.

use std::sync::Arc;

use super::field::{heegner_check, KElem, QuadField};
use super::ideal::{choose_frak_n, QFIdeal};
use crate::dist::MonoidElem;
use crate::error::{Error, Result};
use crate::padic::{sqrt, PadicContext, PadicNum, Val};

/// A CM point: the field, the chosen norm-N ideal with its b-parameter,
/// p, and the translation t with tau = omega + t.
#[derive(Clone, Debug)]
pub struct CMPoint {
    field: QuadField,
    frak_n: QFIdeal,
    b0: i64,
    p: u64,
    t: i64,
}

pub fn cm_point(d: i64, n: u64, p: u64) -> Result<CMPoint> {
    if p == 2 {
        return Err(Error::Invalid("p must be odd".into()));
    }
    let cert = heegner_check(d, n)?;
    if n % p as u64 == 0 {
        return Err(Error::NonCoprime(format!("p = {p} divides the level {n}")));
    }
    let field = QuadField::new(d)?;
    let (frak_n, b0) = choose_frak_n(&field, n)?;
    let _ = cert;
    // Translate omega until the norm avoids p; a quadratic has at most
    // two roots mod p, so t <= 2 suffices.
    let mut t = 0;
    loop {
        let tau = KElem::new(t, 1);
        if tau.norm(&field).rem_euclid(p as i64) != 0 {
            break;
        }
        t += 1;
        if t > 2 {
            return Err(Error::Invalid(
                "no translate has norm prime to p".into(),
            ));
        }
    }
    Ok(CMPoint {
        field,
        frak_n,
        b0,
        p,
        t,
    })
}

impl CMPoint {
    pub fn field(&self) -> &QuadField {
        &self.field
    }
    pub fn frak_n(&self) -> &QFIdeal {
        &self.frak_n
    }
    pub fn b0(&self) -> i64 {
        self.b0
    }
    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn translation(&self) -> i64 {
        self.t
    }
    pub fn tau(&self) -> KElem {
        KElem::new(self.t, 1)
    }
    pub fn tau_trace(&self) -> i64 {
        self.tau().trace(&self.field)
    }
    pub fn tau_norm(&self) -> i64 {
        self.tau().norm(&self.field)
    }

    /// Coordinates (x, y) with u = x + y tau.
    fn tau_coords(&self, u: &KElem) -> (i64, i64) {
        (u.x - u.y * self.t, u.y)
    }

    /// Exact integer matrix of iota(u), row major.
    pub fn iota_entries(&self, u: &KElem) -> [i64; 4] {
        let (x, y) = self.tau_coords(u);
        [
            x + y * self.tau_trace(),
            -y * self.tau_norm(),
            y,
            x,
        ]
    }

    /// Membership in Z + p^m O_K.
    pub fn in_order(&self, u: &KElem, m: u32) -> bool {
        u.y.rem_euclid((self.p as i64).pow(m)) == 0
    }

    /// The layer-m embedding diag(p^-m, 1) iota(u) diag(p^m, 1) as a
    /// monoid element of the given level; u must lie in Z + p^m O_K and
    /// be a unit there for the diagonal constraints to hold.
    pub fn iota_level(
        &self,
        u: &KElem,
        m: u32,
        level: u32,
        ctx: &Arc<PadicContext>,
    ) -> Result<MonoidElem> {
        if !self.in_order(u, m) {
            return Err(Error::Invalid(format!(
                "element is not in the order of conductor p^{m}"
            )));
        }
        let pm = (self.p as i64).pow(m);
        let [a, b, c, d] = self.iota_entries(u);
        let mat = [
            PadicNum::from_i64(ctx, a),
            PadicNum::from_i64(ctx, b / pm),
            PadicNum::from_i64(
                ctx,
                c.checked_mul(pm)
                    .ok_or_else(|| Error::Invalid("matrix entry overflows".into()))?,
            ),
            PadicNum::from_i64(ctx, d),
        ];
        MonoidElem::new(mat, 0, level)
    }

    /// The coordinates (z0, zbar0) of the layer-m twisted point
    /// p^m (-1/conj(tau)) under the two embeddings; both have valuation
    /// exactly m.
    pub fn zstar_coords(
        &self,
        m: u32,
        ctx: &Arc<PadicContext>,
    ) -> Result<(PadicNum, PadicNum)> {
        let (sig, sigbar) = embed_pair(&self.field, &self.tau(), ctx)?;
        let norm = PadicNum::from_i64(ctx, self.tau_norm());
        let z0 = sig.neg().shift_p(m as i64)?.div(&norm)?;
        let zbar0 = sigbar.neg().shift_p(m as i64)?.div(&norm)?;
        Ok((z0, zbar0))
    }
}

/// Both embeddings (sigma(xi), sigmabar(xi)), where sigma sends omega to
/// (d_K + sqrt(d_K))/2 for the square root the context chooses.
pub fn embed_pair(
    field: &QuadField,
    xi: &KElem,
    ctx: &Arc<PadicContext>,
) -> Result<(PadicNum, PadicNum)> {
    let root = sqrt(&PadicNum::from_i64(ctx, field.disc()))?;
    let disc = PadicNum::from_i64(ctx, field.disc());
    let two_inv = PadicNum::from_i64(ctx, 2).inv()?;
    let omega_s = disc.add(&root)?.mul(&two_inv)?;
    let omega_sb = disc.sub(&root)?.mul(&two_inv)?;
    let x = PadicNum::from_i64(ctx, xi.x);
    let sig = x.add(&omega_s.mul_i64(xi.y))?;
    let sigbar = x.add(&omega_sb.mul_i64(xi.y))?;
    Ok((sig, sigbar))
}

/// The prime above p on which the first embedding has positive
/// valuation; fixing it keeps Euler-factor conventions coherent with the
/// coordinate conventions of the CM point.
pub fn prime_of_first_embedding(
    field: &QuadField,
    p: u64,
    ctx: &Arc<PadicContext>,
) -> Result<QFIdeal> {
    let cand = QFIdeal::prime_above(field, p as i64)?;
    for ideal in [cand.clone(), cand.conj()] {
        let g = ideal.generators()[1];
        let (sig, _) = embed_pair(field, &g, ctx)?;
        if sig.valuation().lower() >= Val::int(1) {
            return Ok(ideal);
        }
    }
    Err(Error::Invalid(
        "neither prime above p absorbs the first embedding".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn worked_point() -> CMPoint {
        cm_point(1, 13, 5).unwrap()
    }

    fn ctx() -> Arc<PadicContext> {
        PadicContext::base(5, 14).unwrap()
    }

    #[test]
    fn translation_search_lands_on_a_norm_prime_to_p() {
        // omega = (-4 + sqrt(-4))/2 has norm 5, so the search must step
        // once: tau = omega + 1 is a unit multiple of 1 + i, of norm 2.
        let pt = worked_point();
        assert_eq!(pt.translation(), 1);
        assert_eq!(pt.tau_norm(), 2);

        // d_K = -19: norm(omega) = 95, next translate has norm 77.
        let pt19 = cm_point(19, 7, 5).unwrap();
        assert_eq!(pt19.translation(), 1);
        assert_eq!(pt19.tau_norm(), 77);
    }

    #[test]
    fn the_defining_eigenvector_identity_holds_exactly() {
        let pt = worked_point();
        let field = pt.field().clone();
        let tau = pt.tau();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..100 {
            let u = KElem::new(rng.gen_range(-50..50), rng.gen_range(-50..50));
            let [a, b, c, d] = pt.iota_entries(&u);
            // Rows of iota(u) (tau, 1)^t, computed in K.
            let top = tau.scale(a).add(&KElem::new(b, 0));
            let bot = tau.scale(c).add(&KElem::new(d, 0));
            assert_eq!(top, u.mul(&tau, &field));
            assert_eq!(bot, u);
        }
    }

    #[test]
    fn iota_is_a_ring_homomorphism() {
        let pt = worked_point();
        let field = pt.field().clone();
        let mut rng = StdRng::seed_from_u64(8);
        let matmul = |m: [i64; 4], n: [i64; 4]| {
            [
                m[0] * n[0] + m[1] * n[2],
                m[0] * n[1] + m[1] * n[3],
                m[2] * n[0] + m[3] * n[2],
                m[2] * n[1] + m[3] * n[3],
            ]
        };
        for _ in 0..50 {
            let u = KElem::new(rng.gen_range(-40..40), rng.gen_range(-40..40));
            let v = KElem::new(rng.gen_range(-40..40), rng.gen_range(-40..40));
            assert_eq!(
                pt.iota_entries(&u.mul(&v, &field)),
                matmul(pt.iota_entries(&u), pt.iota_entries(&v))
            );
            let sum: Vec<i64> = pt
                .iota_entries(&u)
                .iter()
                .zip(pt.iota_entries(&v))
                .map(|(a, b)| a + b)
                .collect();
            assert_eq!(pt.iota_entries(&u.add(&v)).to_vec(), sum);
        }
    }

    #[test]
    fn layer_embeddings_respect_the_order_and_the_level() {
        let pt = worked_point();
        let ctx = ctx();
        let mut rng = StdRng::seed_from_u64(9);
        for m in 1..=2u32 {
            let pm = 5i64.pow(m);
            for _ in 0..20 {
                let x = rng.gen_range(1..500) * 5 + rng.gen_range(1..5);
                let y = rng.gen_range(-200..200) * pm;
                let u = KElem::new(x, y);
                let g = pt.iota_level(&u, m, 1, &ctx).unwrap();
                // Lower-left entry carries two layers of p.
                assert!(g.mat()[2].valuation().lower() >= Val::int(2 * m as i64));
            }
            // Outside the order: y not divisible by p^m.
            let bad = KElem::new(1, pm - 1);
            assert!(pt.iota_level(&bad, m, 1, &ctx).is_err());
            // Non-unit x lands outside the monoid via the diagonal check.
            let nonunit = KElem::new(5, pm);
            assert!(pt.iota_level(&nonunit, m, 1, &ctx).is_err());
        }
    }

    #[test]
    fn twisted_coordinates_have_valuation_exactly_m() {
        let pt = worked_point();
        let ctx = ctx();
        for m in 1..=3u32 {
            let (z0, zb) = pt.zstar_coords(m, &ctx).unwrap();
            assert_eq!(z0.valuation().lower(), Val::int(m as i64));
            assert_eq!(zb.valuation().lower(), Val::int(m as i64));
            // z0 zbar0 = p^{2m} / Norm(tau).
            let prod = z0.mul(&zb).unwrap();
            let expect = PadicNum::from_i64(&ctx, pt.tau_norm())
                .inv()
                .unwrap()
                .shift_p(2 * m as i64)
                .unwrap();
            assert!(prod.eq_working(&expect).unwrap());
        }
    }

    #[test]
    fn layer_matrices_fix_the_twisted_point_with_embedding_eigenvalue() {
        let pt = worked_point();
        let ctx = ctx();
        let field = pt.field().clone();
        let mut rng = StdRng::seed_from_u64(10);
        for m in 1..=2u32 {
            let (z0, _) = pt.zstar_coords(m, &ctx).unwrap();
            for _ in 0..20 {
                let u = KElem::new(
                    rng.gen_range(1..100) * 5 + rng.gen_range(1..5),
                    rng.gen_range(-50..50) * 5i64.pow(m),
                );
                let g = pt.iota_level(&u, m, 1, &ctx).unwrap();
                let [a, b, c, d] = g.mat().clone();
                let (sig, _) = embed_pair(&field, &u, &ctx).unwrap();
                // Transposed action: (a, c; b, d)(z0, 1)^t = sigma(u)(z0, 1)^t.
                let top = a.mul(&z0).unwrap().add(&c).unwrap();
                let bot = b.mul(&z0).unwrap().add(&d).unwrap();
                assert!(bot.eq_working(&sig).unwrap());
                assert!(top.eq_working(&sig.mul(&z0).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn embedding_prime_is_certified_by_valuation() {
        let field = QuadField::new(1).unwrap();
        let ctx = ctx();
        let prime = prime_of_first_embedding(&field, 5, &ctx).unwrap();
        assert_eq!(prime.norm(), 5);
        let g = prime.generators()[1];
        let (sig, sigbar) = embed_pair(&field, &g, &ctx).unwrap();
        assert!(sig.valuation().lower() >= Val::int(1));
        assert_eq!(sigbar.valuation().lower(), Val::int(0));
    }
}
