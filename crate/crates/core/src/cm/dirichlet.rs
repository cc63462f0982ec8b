//! Dirichlet characters with exact root-of-unity bookkeeping.
//!
//! A character mod N is stored by its exponents against the invariant
//! factor generators of (Z/N)^x: the value at a is zeta_E^k where E is
//! the group exponent and k is an integer computed from discrete logs.
//! Evaluation into a p-adic context only happens at the edge, through
//! the context's certified root of unity, so all structural questions
//! (conductor, parity, order, products) are settled in integer
//! arithmetic.

use std::collections::HashMap;
use std::sync::Arc;

use super::abelian::{presentation, AbelianPresentation};
use crate::error::{Error, Result};
use crate::padic::{root_of_unity, PadicContext, PadicNum};

/// The unit group (Z/N)^x with its invariant-factor presentation.
pub struct DirichletGroup {
    modulus: u64,
    residues: Vec<u64>,
    pos: HashMap<u64, usize>,
    pres: AbelianPresentation,
}

/// A character of (Z/N)^x: exponent t_j against invariant factor d_j
/// means the j-th generator maps to zeta_E^{t_j E / d_j}.
#[derive(Clone)]
pub struct DirichletChar {
    group: Arc<DirichletGroup>,
    exps: Vec<u64>,
}

impl DirichletGroup {
    pub fn new(modulus: u64) -> Result<Arc<Self>> {
        if modulus == 0 {
            return Err(Error::Invalid("modulus must be positive".into()));
        }
        let residues: Vec<u64> = if modulus == 1 {
            vec![0]
        } else {
            (1..modulus).filter(|&a| gcd(a, modulus) == 1).collect()
        };
        let pos: HashMap<u64, usize> = residues
            .iter()
            .enumerate()
            .map(|(i, &a)| (a, i))
            .collect();
        let identity = if modulus == 1 { 0 } else { pos[&1] };
        let mul = |i: usize, j: usize| -> usize {
            pos[&(residues[i] * residues[j] % modulus)]
        };
        let pres = presentation(residues.len(), identity, &mul)?;
        Ok(Arc::new(DirichletGroup {
            modulus,
            residues,
            pos,
            pres,
        }))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        self.residues.len() as u64
    }

    /// Largest invariant factor: every character value is a zeta_E power.
    pub fn exponent(&self) -> u64 {
        self.pres.orders().last().copied().unwrap_or(1)
    }

    fn dlog(&self, a: u64) -> Result<&[u64]> {
        let r = a % self.modulus;
        let key = if self.modulus == 1 { 0 } else { r };
        self.pos
            .get(&key)
            .map(|&i| self.pres.dlog(i))
            .ok_or_else(|| {
                Error::NonCoprime(format!("{a} shares a factor with {}", self.modulus))
            })
    }

    /// All characters, in mixed-radix order over the generator exponents;
    /// index 0 is the trivial character.
    pub fn characters(self: &Arc<Self>) -> Vec<DirichletChar> {
        let orders = self.pres.orders().to_vec();
        let total: u64 = orders.iter().product();
        let mut out = Vec::with_capacity(total as usize);
        for idx in 0..total {
            let mut exps = Vec::with_capacity(orders.len());
            let mut rest = idx;
            for &d in &orders {
                exps.push(rest % d);
                rest /= d;
            }
            out.push(DirichletChar {
                group: self.clone(),
                exps,
            });
        }
        out
    }

    pub fn trivial(self: &Arc<Self>) -> DirichletChar {
        DirichletChar {
            group: self.clone(),
            exps: vec![0; self.pres.orders().len()],
        }
    }
}

impl DirichletChar {
    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    pub fn group(&self) -> &Arc<DirichletGroup> {
        &self.group
    }

    /// The exponent k with chi(a) = zeta_E^k, reduced mod E.
    pub fn exp_of(&self, a: i64) -> Result<u64> {
        let e = self.group.exponent();
        let m = self.group.modulus as i64;
        let coords = self.group.dlog(a.rem_euclid(m.max(1)) as u64)?;
        let mut k: u64 = 0;
        for ((t, d), c) in self
            .exps
            .iter()
            .zip(self.group.pres.orders())
            .zip(coords)
        {
            // t * (E/d) * c, accumulated mod E.
            k = (k + t * (e / d) % e * c) % e;
        }
        Ok(k)
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&t| t == 0)
    }

    /// Multiplicative order of the character.
    pub fn order(&self) -> u64 {
        self.exps
            .iter()
            .zip(self.group.pres.orders())
            .map(|(&t, &d)| d / gcd(t, d))
            .fold(1, lcm)
    }

    /// chi(-1) = +1 or -1.
    pub fn parity(&self) -> Result<i64> {
        if self.group.modulus <= 2 {
            return Ok(1);
        }
        let k = self.exp_of(-1)?;
        if k == 0 {
            Ok(1)
        } else if 2 * k == self.group.exponent() {
            Ok(-1)
        } else {
            Err(Error::RelationInconsistent(
                "chi(-1) is not an exact sign".into(),
            ))
        }
    }

    pub fn is_even(&self) -> Result<bool> {
        Ok(self.parity()? == 1)
    }

    /// Smallest divisor q of the modulus such that chi is trivial on all
    /// units congruent to 1 mod q.
    pub fn conductor(&self) -> Result<u64> {
        let n = self.group.modulus;
        let mut divisors: Vec<u64> = (1..=n).filter(|q| n % q == 0).collect();
        divisors.sort_unstable();
        'next: for q in divisors {
            for &a in &self.group.residues {
                if a % q == 1 % q && self.exp_of(a as i64)? != 0 {
                    continue 'next;
                }
            }
            return Ok(q);
        }
        Ok(n)
    }

    pub fn is_primitive(&self) -> Result<bool> {
        Ok(self.conductor()? == self.group.modulus)
    }

    pub fn conjugate(&self) -> DirichletChar {
        let exps = self
            .exps
            .iter()
            .zip(self.group.pres.orders())
            .map(|(&t, &d)| (d - t) % d)
            .collect();
        DirichletChar {
            group: self.group.clone(),
            exps,
        }
    }

    pub fn mul(&self, other: &DirichletChar) -> Result<DirichletChar> {
        if !Arc::ptr_eq(&self.group, &other.group)
            && self.group.modulus != other.group.modulus
        {
            return Err(Error::Invalid("characters of different moduli".into()));
        }
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .zip(self.group.pres.orders())
            .map(|((&s, &t), &d)| (s + t) % d)
            .collect();
        Ok(DirichletChar {
            group: self.group.clone(),
            exps,
        })
    }

    /// The certified primitive root zeta_E in the context, shared by all
    /// evaluations of characters on this group.
    pub fn zeta(&self, ctx: &Arc<PadicContext>) -> Result<PadicNum> {
        root_of_unity(ctx, self.group.exponent())
    }

    /// chi(a) as a p-adic number: zero on shared factors, otherwise the
    /// exact root-of-unity power.
    pub fn eval(&self, a: i64, ctx: &Arc<PadicContext>) -> Result<PadicNum> {
        match self.exp_of(a) {
            Ok(k) => Ok(self.zeta(ctx)?.pow_biguint(&k.into())?),
            Err(Error::NonCoprime(_)) => Ok(PadicNum::zero(ctx)),
            Err(e) => Err(e),
        }
    }

    /// chi(a) given a precomputed zeta_E.
    pub fn eval_with_zeta(&self, a: i64, zeta: &PadicNum) -> Result<PadicNum> {
        match self.exp_of(a) {
            Ok(k) => zeta.pow_biguint(&k.into()),
            Err(Error::NonCoprime(_)) => Ok(PadicNum::zero(zeta.ctx())),
            Err(e) => Err(e),
        }
    }

    /// chi(a) through a root of unity of the character's own order, for
    /// contexts too small to hold zeta_E of the full group exponent.
    /// Values of one character are mutually consistent; products across
    /// characters of different orders are only as compatible as the
    /// underlying roots.
    pub fn eval_min(&self, a: i64, ctx: &Arc<PadicContext>) -> Result<PadicNum> {
        match self.exp_of(a) {
            Ok(k) => {
                let d = self.order();
                let e = self.group.exponent();
                // exp_of lands in (E/d)Z because chi^d = 1.
                debug_assert_eq!(k % (e / d), 0);
                root_of_unity(ctx, d)?.pow_biguint(&(k / (e / d)).into())
            }
            Err(Error::NonCoprime(_)) => Ok(PadicNum::zero(ctx)),
            Err(e) => Err(e),
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cm::kronecker;

    #[test]
    fn unit_group_structures_match_known_tables() {
        assert_eq!(DirichletGroup::new(40).unwrap().pres.orders(), &[2, 2, 4]);
        assert_eq!(DirichletGroup::new(13).unwrap().pres.orders(), &[12]);
        assert_eq!(DirichletGroup::new(1).unwrap().order(), 1);
        assert_eq!(DirichletGroup::new(2).unwrap().order(), 1);
    }

    #[test]
    fn character_counts_and_primitive_counts_are_classical() {
        // Number of primitive characters mod n, via conductor sieve.
        let primitive_count = |n: u64| -> usize {
            DirichletGroup::new(n)
                .unwrap()
                .characters()
                .iter()
                .filter(|c| c.is_primitive().unwrap())
                .count()
        };
        for n in 1..=24u64 {
            let g = DirichletGroup::new(n).unwrap();
            assert_eq!(g.characters().len() as u64, g.order());
        }
        assert_eq!(primitive_count(1), 1);
        assert_eq!(primitive_count(2), 0);
        assert_eq!(primitive_count(3), 1);
        assert_eq!(primitive_count(4), 1);
        assert_eq!(primitive_count(8), 2);
        assert_eq!(primitive_count(12), 1);
        assert_eq!(primitive_count(5), 3);
    }

    #[test]
    fn quadratic_characters_agree_with_the_kronecker_symbol() {
        for q in [5i64, 13, 17] {
            let g = DirichletGroup::new(q as u64).unwrap();
            let chi = g
                .characters()
                .into_iter()
                .find(|c| c.order() == 2)
                .unwrap();
            for a in 1..q {
                let k = chi.exp_of(a).unwrap();
                let sign = if k == 0 { 1 } else { -1 };
                assert_eq!(sign, kronecker(a, q), "a = {a} mod {q}");
            }
            let parity = chi.parity().unwrap();
            assert_eq!(parity, kronecker(-1, q));
        }
    }

    #[test]
    fn conjugates_and_products_cancel() {
        let g = DirichletGroup::new(13).unwrap();
        for chi in g.characters() {
            let prod = chi.mul(&chi.conjugate()).unwrap();
            assert!(prod.is_trivial());
            assert_eq!(chi.order(), chi.conjugate().order());
        }
    }

    #[test]
    fn evaluation_lands_on_exact_roots_of_unity() {
        // mu_12 lives in Q_13, which covers every character mod 13.
        let ctx = PadicContext::base(13, 9).unwrap();
        let g = DirichletGroup::new(13).unwrap();
        let chi = g.characters().into_iter().find(|c| c.order() == 4).unwrap();
        let v2 = chi.eval(2, &ctx).unwrap();
        let v4 = chi.eval(4, &ctx).unwrap();
        assert!(v2.mul(&v2).unwrap().eq_working(&v4).unwrap());
        let one = PadicNum::one(&ctx);
        let fourth = v2.mul(&v2).unwrap().mul(&v2).unwrap().mul(&v2).unwrap();
        assert!(fourth.eq_working(&one).unwrap());
        assert!(!v2.mul(&v2).unwrap().eq_working(&one).unwrap());
        // Non-units evaluate to zero.
        assert!(chi.eval(13, &ctx).unwrap().is_zero_at_prec());
        // Multiplicativity on units.
        for a in 1..13 {
            for b in 1..13 {
                let lhs = chi.eval(a * b, &ctx).unwrap();
                let rhs = chi.eval(a, &ctx).unwrap().mul(&chi.eval(b, &ctx).unwrap()).unwrap();
                assert!(lhs.eq_working(&rhs).unwrap());
            }
        }
    }

    #[test]
    fn character_sums_vanish_except_for_the_trivial_one() {
        let ctx = PadicContext::base(13, 9).unwrap();
        let g = DirichletGroup::new(13).unwrap();
        for chi in g.characters() {
            let mut acc = PadicNum::zero(&ctx);
            for a in 1..13i64 {
                acc = acc.add(&chi.eval(a, &ctx).unwrap()).unwrap();
            }
            if chi.is_trivial() {
                assert!(acc.eq_working(&PadicNum::from_i64(&ctx, 12)).unwrap());
            } else {
                assert!(acc.is_zero_at_prec());
            }
        }
    }

    #[test]
    fn small_contexts_evaluate_characters_through_their_own_order() {
        // Q_5 holds mu_4 only, so the full exponent-10 zeta of the
        // mod-11 group is out of reach, but the quadratic character is
        // still evaluable there.
        let ctx = PadicContext::base(5, 8).unwrap();
        let g = DirichletGroup::new(11).unwrap();
        let quad = g.characters().into_iter().find(|c| c.order() == 2).unwrap();
        assert!(quad.eval(3, &ctx).is_err());
        for a in 1..11i64 {
            let v = quad.eval_min(a, &ctx).unwrap();
            let leg = crate::cm::kronecker(a, 11);
            assert!(v.eq_working(&PadicNum::from_i64(&ctx, leg)).unwrap());
        }
        let triv = g.trivial();
        assert!(triv.eval_min(22, &ctx).unwrap().is_zero_at_prec());
        assert!(triv
            .eval_min(7, &ctx)
            .unwrap()
            .eq_working(&PadicNum::one(&ctx))
            .unwrap());
    }
}
