//! Algebraic Grössencharacters of the CM field, evaluated p-adically.
//!
//! A character of infinity type (a, b) and finite data (eps, frakN, p^m)
//! is a homomorphism on ideals coprime to frakN p^m whose value on a
//! principal ideal with a generator xi in the order Z + p^m O_K is
//!
//! ```text
//!   chi((xi)) = eps(xi mod frakN)^{-1} sigma(xi)^a sigmabar(xi)^b.
//! ```
//!
//! The rule kills -1 exactly when eps(-1) = (-1)^{a+b}, and for m = 0 it
//! must kill every torsion unit; those are the preconditions.  The rule
//! is generator independent only on order elements, so its extension to
//! an arbitrary principal ideal first steers a generator's residue mod
//! p^m into the rational coset by a torsion unit.  Steering acts on
//! unexpanded fractions through their residues factor by factor, which
//! keeps every evaluation free of ideal-power blowup.
//!
//! The extensions of the rule to all ideals form a torsor under the
//! characters of Pic(Z + p^m O_K): a base solution takes certified n-th
//! roots of the steered rule on the invariant-factor relations of that
//! group, the full family is swept out by root-of-unity twists, and a
//! numeric certificate checks the homomorphism law on every generator
//! edge, wrap-around edges included.

use std::sync::Arc;

use super::dirichlet::DirichletChar;
use super::field::{KElem, QuadField};
use super::ideal::QFIdeal;
use super::point::embed_pair;
use super::rayclass::{ray_class_group, KFraction, RayClassData};
use crate::error::{Error, Result};
use crate::padic::{nth_root, root_of_unity, PadicContext, PadicNum};

/// Shared data for all characters with the same finite and infinity type.
struct GrossenSetup {
    field: QuadField,
    frak_n: QFIdeal,
    eps: DirichletChar,
    inf_type: (i64, i64),
    /// p^m, the conductor of the order being classified.
    pm: i64,
    ctx: Arc<PadicContext>,
    ring: RayClassData,
    torsion: Vec<KElem>,
}

/// One Grössencharacter from an enumerated family.
pub struct GrossenChar {
    setup: Arc<GrossenSetup>,
    /// Twist exponents against the invariant factors, identifying the
    /// character inside its torsor.
    twists: Vec<u64>,
    /// chi on the canonical ideal of each group element.
    values: Vec<PadicNum>,
}

impl GrossenSetup {
    /// Residue of xi mod frakN as a rational integer: omega is congruent
    /// to (d_K - b)/2 mod the ideal (N, (b + sqrt(d_K))/2).
    fn rational_residue(&self, xi: &KElem) -> i64 {
        let n = self.frak_n.norm();
        if n == 1 {
            return 0;
        }
        let omega_res = (self.field.disc() - self.frak_n.b()) / 2;
        (xi.x + xi.y * omega_res).rem_euclid(n)
    }

    fn res_reduce(&self, xi: &KElem) -> KElem {
        KElem::new(xi.x.rem_euclid(self.pm), xi.y.rem_euclid(self.pm))
    }

    fn res_mul(&self, a: &KElem, b: &KElem) -> KElem {
        self.res_reduce(&self.res_reduce(a).mul(&self.res_reduce(b), &self.field))
    }

    /// Inverse residue via the conjugate over the norm.
    fn res_inv(&self, a: &KElem) -> Result<KElem> {
        let red = self.res_reduce(a);
        let n = red.norm(&self.field).rem_euclid(self.pm);
        let ninv = modinv(n, self.pm).ok_or_else(|| {
            Error::NonCoprime("fraction entry meets p, no residue inverse".into())
        })?;
        Ok(self.res_reduce(&red.conj(&self.field).scale(ninv)))
    }

    /// The torsion unit moving the fraction's residue mod p^m into the
    /// rational coset.  Fractions generating an ideal trivial in the ring
    /// class group always admit one.
    fn steer(&self, f: &KFraction) -> Result<KElem> {
        if self.pm == 1 {
            return Ok(KElem::one());
        }
        let mut r = KElem::one();
        for x in &f.num {
            r = self.res_mul(&r, x);
        }
        for x in &f.den {
            r = self.res_mul(&r, &self.res_inv(x)?);
        }
        for u in &self.torsion {
            if self.res_mul(&r, u).y == 0 {
                return Ok(*u);
            }
        }
        Err(Error::RelationInconsistent(
            "no torsion unit steers the fraction into the order".into(),
        ))
    }

    /// The defining rule on a single element.
    fn alg_elem(&self, xi: &KElem) -> Result<PadicNum> {
        let (a, b) = self.inf_type;
        let (sig, sigbar) = embed_pair(&self.field, xi, &self.ctx)?;
        let eps_at = self.eps.eval(self.rational_residue(xi), &self.ctx)?;
        let eps_val = eps_at.inv().map_err(|_| {
            Error::NonCoprime("element meets the prime-to-p conductor".into())
        })?;
        eps_val.mul(&sig.pow_i64(a)?)?.mul(&sigbar.pow_i64(b)?)
    }

    /// The rule spread multiplicatively over a fraction's factors.
    fn alg_fraction(&self, f: &KFraction) -> Result<PadicNum> {
        let mut acc = PadicNum::one(&self.ctx);
        for x in &f.num {
            acc = acc.mul(&self.alg_elem(x)?)?;
        }
        for x in &f.den {
            acc = acc.div(&self.alg_elem(x)?)?;
        }
        Ok(acc)
    }

    /// chi of the principal ideal generated by the fraction: steer, then
    /// apply the rule.  Well defined whenever the ideal is trivial in the
    /// ring class group, independent of the generator.
    fn chi_principal(&self, f: &KFraction) -> Result<PadicNum> {
        let u = self.steer(f)?;
        self.alg_elem(&u)?.mul(&self.alg_fraction(f)?)
    }
}

/// Enumerates every Grössencharacter with the given data.  The count is
/// the order of Pic(Z + p^m O_K); preconditions that empty the family
/// are reported as errors.
pub fn grossenchar_enumerate(
    field: &QuadField,
    frak_n: &QFIdeal,
    eps: &DirichletChar,
    inf_type: (i64, i64),
    m: u32,
    p: u64,
    ctx: &Arc<PadicContext>,
) -> Result<Vec<GrossenChar>> {
    if eps.modulus() as i64 != frak_n.norm() {
        return Err(Error::Invalid(format!(
            "character modulus {} differs from the ideal norm {}",
            eps.modulus(),
            frak_n.norm()
        )));
    }
    let pm = (p as i64)
        .checked_pow(m)
        .ok_or_else(|| Error::Invalid("p^m overflows the working integer size".into()))?;
    let ring = ray_class_group(field, &QFIdeal::whole_ring(field), p, m, frak_n.norm())?;
    let setup = Arc::new(GrossenSetup {
        field: field.clone(),
        frak_n: frak_n.clone(),
        eps: eps.clone(),
        inf_type,
        pm,
        ctx: ctx.clone(),
        ring,
        torsion: field.units(),
    });

    // Well-definedness: the rule must kill the torsion units that lie in
    // the order; for m >= 1 only -1 does, and this is the parity
    // condition eps(-1) = (-1)^{a+b}.
    let one = PadicNum::one(ctx);
    for u in &setup.torsion {
        if u.y.rem_euclid(pm) != 0 {
            continue;
        }
        if !setup.alg_elem(u)?.eq_working(&one)? {
            return Err(Error::Parity(format!(
                "the rule sends the order unit {}+{}w to a nontrivial root",
                u.x, u.y
            )));
        }
    }

    let ring = &setup.ring;
    let orders = ring.decomposition().to_vec();
    let size = ring.order() as usize;
    let w = ring
        .canonical_ideal(ring.identity())?
        .find_generator()
        .ok_or_else(|| {
            Error::RelationInconsistent("identity ideal is not principal".into())
        })?;

    // Relation values: d_j steps of the j-th invariant generator walk
    // A_{B_j}^{d_j} = (acc_j) as honest ideals, so chi(A_{B_j}) is a
    // d_j-th root of the steered rule on acc_j.
    let mut base_roots: Vec<PadicNum> = Vec::with_capacity(orders.len());
    for (j, &d) in orders.iter().enumerate() {
        let b = ring.snf_gen(j);
        let mut cur = ring.identity();
        let mut acc = KFraction::one();
        for _ in 0..d {
            let (next, f) = ring.mul_tracked(cur, b);
            acc = acc.concat(&f);
            cur = next;
        }
        if cur != ring.identity() {
            return Err(Error::RelationInconsistent(
                "generator order does not close".into(),
            ));
        }
        base_roots.push(nth_root(&setup.chi_principal(&acc)?, d)?);
    }

    // Mixed-radix walk over the coordinate lattice: each element's
    // canonical ideal is tied to the generator word by a fraction,
    // Prod_j A_{B_j}^{e_j(g)} = (rho_g / w) A_g, visiting coordinates in
    // counting order so every predecessor is already computed.
    let radix_index = |coords: &[u64]| -> usize {
        let mut idx = 0usize;
        for (c, d) in coords.iter().zip(&orders).rev() {
            idx = idx * *d as usize + *c as usize;
        }
        idx
    };
    let mut elem_at: Vec<usize> = vec![usize::MAX; size];
    let mut base_vals: Vec<PadicNum> = vec![PadicNum::zero(ctx); size];
    let mut exps: Vec<Vec<u64>> = vec![Vec::new(); size];
    let mut rho: Vec<KFraction> = vec![KFraction::one(); size];
    let mut coords = vec![0u64; orders.len()];
    for step in 0..size {
        let idx = radix_index(&coords);
        if step > 0 {
            // The increment zeroed positions below j, so the edge from
            // (0, .., 0, e_j - 1, e_{j+1}, ..) lands here without wraps.
            let j = coords.iter().position(|&c| c > 0).expect("nonzero step");
            let mut prev = coords.clone();
            prev[j] -= 1;
            let pidx = radix_index(&prev);
            let (next, f) = ring.mul_tracked(elem_at[pidx], ring.snf_gen(j));
            elem_at[idx] = next;
            rho[idx] = rho[pidx].clone().concat(&f);
        } else {
            elem_at[idx] = ring.identity();
        }
        let g = elem_at[idx];
        if ring.dlog(g) != coords.as_slice() {
            return Err(Error::RelationInconsistent(
                "coordinate walk disagrees with the discrete log".into(),
            ));
        }
        // chi(A_g) = chi((w / rho_g)) * prod chi(A_{B_j})^{e_j}.
        let inv_frac = KFraction {
            num: std::iter::once(w)
                .chain(rho[idx].den.iter().copied())
                .collect(),
            den: rho[idx].num.clone(),
        };
        base_vals[g] = setup.chi_principal(&inv_frac)?;
        exps[g] = coords.clone();
        if step + 1 < size {
            let mut j = 0;
            loop {
                coords[j] += 1;
                if coords[j] < orders[j] {
                    break;
                }
                coords[j] = 0;
                j += 1;
            }
        }
    }

    // Edge data for the homomorphism certificate, shared by the family.
    let mut edges: Vec<(usize, usize, usize, PadicNum)> = Vec::new();
    for g in 0..size {
        for (j, _) in orders.iter().enumerate() {
            let b = ring.snf_gen(j);
            let (gb, f) = ring.mul_tracked(g, b);
            edges.push((g, b, gb, setup.chi_principal(&f)?));
        }
    }

    // Torsor sweep: twist each base root by the roots of unity of its
    // order and tabulate chi on every canonical ideal.
    let zetas: Vec<PadicNum> = orders
        .iter()
        .map(|&d| root_of_unity(ctx, d))
        .collect::<Result<_>>()?;
    let total: u64 = orders.iter().product();
    let mut out = Vec::with_capacity(total as usize);
    for t in 0..total {
        let mut twists = Vec::with_capacity(orders.len());
        let mut rest = t;
        for &d in &orders {
            twists.push(rest % d);
            rest /= d;
        }
        let gens: Vec<PadicNum> = base_roots
            .iter()
            .zip(&zetas)
            .zip(&twists)
            .map(|((c, z), &tw)| c.mul(&z.pow_biguint(&tw.into())?))
            .collect::<Result<_>>()?;
        let mut values = vec![PadicNum::zero(ctx); size];
        for g in 0..size {
            let mut v = base_vals[g].clone();
            for (c, &e) in gens.iter().zip(&exps[g]) {
                v = v.mul(&c.pow_biguint(&e.into())?)?;
            }
            values[g] = v;
        }
        // chi(A_g) chi(A_b) = chi((f)) chi(A_gb) on every generator edge;
        // wrap-around edges certify the chosen roots against the
        // relation values.
        for (g, b, gb, fval) in &edges {
            let lhs = values[*g].mul(&values[*b])?;
            let rhs = fval.mul(&values[*gb])?;
            if !lhs.eq_working(&rhs)? {
                return Err(Error::RelationInconsistent(
                    "character table fails the homomorphism law".into(),
                ));
            }
        }
        out.push(GrossenChar {
            setup: setup.clone(),
            twists,
            values,
        });
    }

    Ok(out)
}

impl std::fmt::Debug for GrossenChar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GrossenChar")
            .field("inf_type", &self.setup.inf_type)
            .field("m", &self.setup.ring.m())
            .field("twists", &self.twists)
            .finish()
    }
}

impl GrossenChar {
    pub fn inf_type(&self) -> (i64, i64) {
        self.setup.inf_type
    }
    pub fn m(&self) -> u32 {
        self.setup.ring.m()
    }
    pub fn twists(&self) -> &[u64] {
        &self.twists
    }
    /// Order of Pic(Z + p^m O_K), the size of the family.
    pub fn class_count(&self) -> u64 {
        self.setup.ring.order()
    }

    /// chi(a) for an ideal coprime to frakN p^m.
    pub fn eval(&self, a: &QFIdeal) -> Result<PadicNum> {
        if !a.is_coprime(&self.setup.frak_n)? {
            return Err(Error::NonCoprime(
                "ideal meets the prime-to-p conductor".into(),
            ));
        }
        let (g, f) = self.setup.ring.pair_of_ideal(a)?;
        self.setup.chi_principal(&f)?.mul(&self.values[g])
    }

    /// The defining rule on an order element; exposed so the pinned
    /// invariant chi((xi)) = rule(xi) is testable against `eval`.
    pub fn rule_value(&self, xi: &KElem) -> Result<PadicNum> {
        if !self.setup.ring.in_congruence_set(xi) {
            return Err(Error::Invalid(
                "generator does not lie in the order".into(),
            ));
        }
        self.setup.alg_elem(xi)
    }
}

fn modinv(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 == 1 {
        Some(s0.rem_euclid(m))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cm::dirichlet::DirichletGroup;
    use crate::cm::ideal::choose_frak_n;
    use crate::cm::kronecker;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn gaussian() -> (QuadField, QFIdeal) {
        let field = QuadField::new(1).unwrap();
        let (frak_n, _) = choose_frak_n(&field, 13).unwrap();
        (field, frak_n)
    }

    fn trivial_eps_mod_one() -> DirichletChar {
        DirichletGroup::new(1).unwrap().trivial()
    }

    fn odd_eps_mod_13() -> DirichletChar {
        DirichletGroup::new(13)
            .unwrap()
            .characters()
            .into_iter()
            .find(|c| c.parity().unwrap() == -1)
            .unwrap()
    }

    #[test]
    fn parity_violations_are_rejected_with_a_reason() {
        let field = QuadField::new(1).unwrap();
        let whole = QFIdeal::whole_ring(&field);
        let ctx = PadicContext::base(5, 10).unwrap();
        let err = grossenchar_enumerate(
            &field,
            &whole,
            &trivial_eps_mod_one(),
            (1, 0),
            0,
            5,
            &ctx,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parity(_)));
    }

    #[test]
    fn the_norm_character_emerges_at_type_one_one() {
        let field = QuadField::new(1).unwrap();
        let whole = QFIdeal::whole_ring(&field);
        let ctx = PadicContext::base(5, 10).unwrap();
        let chars = grossenchar_enumerate(
            &field,
            &whole,
            &trivial_eps_mod_one(),
            (1, 1),
            0,
            5,
            &ctx,
        )
        .unwrap();
        assert_eq!(chars.len(), 1);
        let chi = &chars[0];
        for q in [13i64, 17, 29] {
            let prime = QFIdeal::prime_above(&field, q).unwrap();
            let val = chi.eval(&prime).unwrap();
            assert!(
                val.eq_working(&PadicNum::from_i64(&ctx, q)).unwrap(),
                "norm character at a prime over {q}"
            );
        }
        // A non-prime principal ideal takes its norm as well.
        let xi = KElem::new(1, 2);
        let a = QFIdeal::principal(&field, &xi).unwrap();
        let val = chi.eval(&a).unwrap();
        assert!(val
            .eq_working(&PadicNum::from_i64(&ctx, xi.norm(&field)))
            .unwrap());
    }

    #[test]
    fn the_count_matches_the_ring_class_order_and_values_obey_the_rule() {
        let (field, frak_n) = gaussian();
        let ctx = PadicContext::unramified(5, 2, 8).unwrap();
        // An odd character mod 13 pairs with infinity type (1, 0).
        let eps = odd_eps_mod_13();
        let chars =
            grossenchar_enumerate(&field, &frak_n, &eps, (1, 0), 1, 5, &ctx).unwrap();
        assert_eq!(chars.len(), 2, "the family has #Pic(Z + 5 O_K) members");
        assert_eq!(chars[0].class_count(), 2);

        // chi((xi)) equals the defining rule on order generators.
        let mut rng = StdRng::seed_from_u64(11);
        for chi in &chars {
            let mut done = 0;
            while done < 20 {
                let xi = KElem::new(rng.gen_range(-300..300), 5 * rng.gen_range(-60..60));
                if xi == KElem::zero() {
                    continue;
                }
                let norm = xi.norm(&field);
                if norm % 5 == 0 || norm % 13 == 0 {
                    continue;
                }
                let ideal = QFIdeal::principal(&field, &xi).unwrap();
                let lhs = chi.eval(&ideal).unwrap();
                let rhs = chi.rule_value(&xi).unwrap();
                assert!(lhs.eq_working(&rhs).unwrap(), "rule at {}+{}w", xi.x, xi.y);
                done += 1;
            }
        }

        // The torsor twist is visible: the two characters disagree at
        // some prime in a nontrivial ring class.
        let mut differ = false;
        for q in [17i64, 29, 37] {
            let prime = QFIdeal::prime_above(&field, q).unwrap();
            let v0 = chars[0].eval(&prime).unwrap();
            let v1 = chars[1].eval(&prime).unwrap();
            if !v0.eq_working(&v1).unwrap() {
                differ = true;
            }
        }
        assert!(differ, "torsor twists produce distinct characters");
    }

    #[test]
    fn characters_are_multiplicative_on_random_ideal_pairs() {
        let (field, frak_n) = gaussian();
        let ctx = PadicContext::unramified(5, 2, 8).unwrap();
        // Total degree of (2, 1) is odd, matching an odd character.
        let eps = odd_eps_mod_13();
        let chars =
            grossenchar_enumerate(&field, &frak_n, &eps, (2, 1), 1, 5, &ctx).unwrap();
        assert_eq!(chars.len(), 2);
        let chi = &chars[1];
        let mut pool: Vec<QFIdeal> = Vec::new();
        for q in [17i64, 29, 37, 41] {
            assert_eq!(kronecker(field.disc(), q), 1);
            let p = QFIdeal::prime_above(&field, q).unwrap();
            pool.push(p.conj());
            pool.push(p);
        }
        let mut rng = StdRng::seed_from_u64(12);
        for _ in 0..30 {
            let a = &pool[rng.gen_range(0..pool.len())];
            let b = &pool[rng.gen_range(0..pool.len())];
            let prod = a.mul(b).unwrap();
            let lhs = chi.eval(&prod).unwrap();
            let rhs = chi.eval(a).unwrap().mul(&chi.eval(b).unwrap()).unwrap();
            assert!(lhs.eq_working(&rhs).unwrap());
        }
    }

    #[test]
    fn conjugate_prime_values_multiply_to_the_rational_rule() {
        // With m = 0 both primes over q are in the domain, and their
        // values multiply to the rule at the rational generator:
        // chi(q) = eps(q)^{-1} q^{a+b}.
        let (field, frak_n) = gaussian();
        let ctx = PadicContext::unramified(5, 2, 8).unwrap();
        // An order-3 character is even and kills the residue of i, so the
        // m = 0 torsion precondition holds for type (1, 1).
        let eps = DirichletGroup::new(13)
            .unwrap()
            .characters()
            .into_iter()
            .find(|c| c.order() == 3)
            .unwrap();
        let chars =
            grossenchar_enumerate(&field, &frak_n, &eps, (1, 1), 0, 5, &ctx).unwrap();
        assert_eq!(chars.len(), 1, "class number one base layer");
        let chi = &chars[0];
        for q in [17i64, 29, 37] {
            let prime = QFIdeal::prime_above(&field, q).unwrap();
            let lhs = chi
                .eval(&prime)
                .unwrap()
                .mul(&chi.eval(&prime.conj()).unwrap())
                .unwrap();
            let rhs = chi.rule_value(&KElem::new(q, 0)).unwrap();
            assert!(lhs.eq_working(&rhs).unwrap(), "q = {q}");
        }
    }

    #[test]
    fn class_characters_of_disc_minus_23_are_the_cube_root_family() {
        // (a, b) = (0, 0) with trivial eps and m = 0 degenerates to the
        // characters of the class group: three of them, valued in mu_3.
        let field = QuadField::from_disc(-23).unwrap();
        let whole = QFIdeal::whole_ring(&field);
        let ctx = PadicContext::unramified(5, 2, 8).unwrap();
        let chars = grossenchar_enumerate(
            &field,
            &whole,
            &trivial_eps_mod_one(),
            (0, 0),
            0,
            5,
            &ctx,
        )
        .unwrap();
        assert_eq!(chars.len(), 3);
        let one = PadicNum::one(&ctx);
        // A prime in a nontrivial class: 2 splits in disc -23.
        let p2 = QFIdeal::prime_above(&field, 2).unwrap();
        let mut nontrivial = 0;
        for chi in &chars {
            let v = chi.eval(&p2).unwrap();
            let cube = v.pow_i64(3).unwrap();
            assert!(cube.eq_working(&one).unwrap(), "values live in mu_3");
            if !v.eq_working(&one).unwrap() {
                nontrivial += 1;
            }
        }
        assert_eq!(nontrivial, 2, "two faithful cube-root characters");
        // Orthogonality: summing over the family kills a nontrivial class.
        let mut sum = PadicNum::zero(&ctx);
        for chi in &chars {
            sum = sum.add(&chi.eval(&p2).unwrap()).unwrap();
        }
        assert!(sum.is_zero_at_prec());
    }
}
