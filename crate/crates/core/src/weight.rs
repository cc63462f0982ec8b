//! Weight space: closed discs, their truncated coordinate rings, the
//! universal character, and binomials in the weight operator.
//!
//! A disc U is centred at an integer weight k_0 with radius exponent r >= 1.
//! Its coordinate ring is modelled as polynomials of degree <= d_max in the
//! coordinate u, normalised so that the admissible integer weight k sits at
//! u = (k - k_0)/p^r; admissibility means k = k_0 mod (p-1) and
//! v_p(k - k_0) >= r.  The weight operator is the affine element
//! nabla = k_0 + p^r u, which specialises to k at weight k.
//!
//! Products are truncated at d_max; every element carries a lower bound for
//! the valuation of everything that has been discarded (measured in the
//! sup norm over integral u), so specialisation reports honest precision.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::padic::{log1, teichmuller, PadicContext, PadicNum, Val, ValBound};
use crate::ring::{RingElem, WeightLaw};
#[cfg(test)]
use crate::ring::binom_int_big;

#[derive(Clone, Debug)]
pub struct WeightDisc {
    ctx: Arc<PadicContext>,
    k0: i64,
    r: u32,
    d_max: u32,
}

impl PartialEq for WeightDisc {
    fn eq(&self, other: &Self) -> bool {
        self.k0 == other.k0
            && self.r == other.r
            && self.d_max == other.d_max
            && *self.ctx == *other.ctx
    }
}

impl WeightDisc {
    pub fn new(ctx: &Arc<PadicContext>, k0: i64, r: u32, d_max: u32) -> Result<Self> {
        if r == 0 {
            return Err(Error::Invalid("disc radius exponent must be >= 1".into()));
        }
        if d_max == 0 {
            return Err(Error::Invalid("truncation degree must be >= 1".into()));
        }
        Ok(WeightDisc {
            ctx: ctx.clone(),
            k0,
            r,
            d_max,
        })
    }

    pub fn ctx(&self) -> &Arc<PadicContext> {
        &self.ctx
    }
    pub fn k0(&self) -> i64 {
        self.k0
    }
    pub fn r(&self) -> u32 {
        self.r
    }
    pub fn d_max(&self) -> u32 {
        self.d_max
    }

    /// Admissible integer weights: congruent to the centre mod p-1 and
    /// p-adically within the disc radius.
    pub fn is_admissible(&self, k: i64) -> bool {
        let p = self.ctx.p() as i64;
        let d = k - self.k0;
        if d == 0 {
            return true;
        }
        if d.rem_euclid(p - 1) != 0 {
            return false;
        }
        let mut v = 0u32;
        let mut d = d.unsigned_abs();
        while d % self.ctx.p() as u64 == 0 {
            d /= self.ctx.p() as u64;
            v += 1;
        }
        v >= self.r
    }

    /// Admissible weights in the closed interval [lo, hi].
    pub fn admissible_in(&self, lo: i64, hi: i64) -> Vec<i64> {
        let p = self.ctx.p() as i64;
        let step = (p - 1) * p.pow(self.r);
        // admissible weights form the arithmetic progression k0 + step*Z
        let mut out = Vec::new();
        let first = self.k0 + ((lo - self.k0).div_euclid(step)) * step;
        let mut k = first;
        while k <= hi {
            if k >= lo && self.is_admissible(k) {
                out.push(k);
            }
            k += step;
        }
        out
    }

    /// Coordinate value of an admissible weight: u_k = (k - k_0)/p^r.
    pub fn u_of_weight(&self, k: i64) -> Result<PadicNum> {
        if !self.is_admissible(k) {
            return Err(Error::Inadmissible { k });
        }
        let num = BigInt::from(k - self.k0);
        let den = BigInt::from(self.ctx.p()).pow(self.r);
        PadicNum::from_rational(&self.ctx, &num, &den)
    }

    /// The same disc with the centre retagged by an integer shift.  The
    /// coordinate is unchanged: weight k on the shifted disc sits at the
    /// same u as weight k + delta on the original.
    pub fn shift_center(&self, delta: i64) -> WeightDisc {
        WeightDisc {
            ctx: self.ctx.clone(),
            k0: self.k0 + delta,
            r: self.r,
            d_max: self.d_max,
        }
    }

    /// Sup-norm valuation bound of κ_U(1+p) - 1 over the disc.
    pub fn analytic_bound(&self) -> Result<Val> {
        let x = PadicNum::from_u64(&self.ctx, self.ctx.p() + 1);
        let karg = kappa_eval(self, &x)?;
        let diff = karg.sub(&IwasawaElem::one(self))?;
        Ok(diff.val_lower())
    }

    /// Whether the universal character is n-analytic: its distance from 1
    /// at 1+p exceeds 1/(p^(n-1)(p-1)) everywhere on the disc.
    pub fn is_n_analytic(&self, n: u32) -> Result<bool> {
        let bound = self.analytic_bound()?;
        let p = self.ctx.p();
        let den = (p - 1) * p.pow(n - 1);
        if den > u32::MAX as u64 {
            return Ok(true);
        }
        Ok(bound > Val::new(1, den as u32))
    }

    /// The smallest n >= 1 at which the disc is n-analytic.
    pub fn min_analytic_level(&self) -> Result<u32> {
        for n in 1..=32 {
            if self.is_n_analytic(n)? {
                return Ok(n);
            }
        }
        Err(Error::Invalid(
            "disc is not n-analytic for any reasonable n".into(),
        ))
    }
}

impl fmt::Display for WeightDisc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "disc(p={}, k0={}, r={}, dmax={})",
            self.ctx.p(),
            self.k0,
            self.r,
            self.d_max
        )
    }
}

/// Element of the truncated coordinate ring Λ_U[1/p]: a polynomial
/// Σ c_i u^i of degree <= d_max, plus a lower bound on the valuation of all
/// discarded higher-degree content (None = nothing was discarded).
#[derive(Clone)]
pub struct IwasawaElem {
    disc: WeightDisc,
    coeffs: Vec<PadicNum>,
    tail: Option<Val>,
}

fn tail_min(a: Option<Val>, b: Option<Val>) -> Option<Val> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

impl IwasawaElem {
    pub fn zero(disc: &WeightDisc) -> Self {
        let n = disc.d_max as usize + 1;
        IwasawaElem {
            disc: disc.clone(),
            coeffs: vec![PadicNum::zero(&disc.ctx); n],
            tail: None,
        }
    }

    pub fn one(disc: &WeightDisc) -> Self {
        Self::constant(disc, &PadicNum::one(&disc.ctx))
    }

    pub fn constant(disc: &WeightDisc, c: &PadicNum) -> Self {
        let mut out = Self::zero(disc);
        out.coeffs[0] = c.clone();
        out
    }

    pub fn from_coeffs(disc: &WeightDisc, coeffs: Vec<PadicNum>) -> Result<Self> {
        if coeffs.len() > disc.d_max as usize + 1 {
            return Err(Error::Invalid(format!(
                "{} coefficients exceed truncation degree {}",
                coeffs.len(),
                disc.d_max
            )));
        }
        let mut out = Self::zero(disc);
        for (i, c) in coeffs.into_iter().enumerate() {
            if !(**c.ctx() == *disc.ctx) {
                return Err(Error::ContextMismatch(
                    "coefficient context differs from the disc context".into(),
                ));
            }
            out.coeffs[i] = c;
        }
        Ok(out)
    }

    /// The disc coordinate u as a ring element.
    pub fn coordinate(disc: &WeightDisc) -> Self {
        let mut out = Self::zero(disc);
        out.coeffs[1] = PadicNum::one(&disc.ctx);
        out
    }

    pub fn disc(&self) -> &WeightDisc {
        &self.disc
    }
    pub fn coeff(&self, i: usize) -> &PadicNum {
        &self.coeffs[i]
    }
    pub fn coeffs(&self) -> &[PadicNum] {
        &self.coeffs
    }
    pub fn tail_bound(&self) -> Option<Val> {
        self.tail
    }

    pub fn degree(&self) -> usize {
        for i in (0..self.coeffs.len()).rev() {
            if !self.coeffs[i].is_zero_at_prec() {
                return i;
            }
        }
        0
    }

    /// Largest denominator exponent among the coefficients: the element
    /// lies in p^(-e) Λ_U up to the recorded tail.
    pub fn denom_exponent(&self) -> u32 {
        self.coeffs.iter().map(|c| c.denom_exp()).max().unwrap_or(0)
    }

    pub fn is_zero_elem(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero_at_prec())
    }

    /// Sup-norm valuation lower bound over integral u, tail included.
    pub fn val_lower(&self) -> Val {
        let mut best: Option<Val> = None;
        for c in &self.coeffs {
            let v = c.valuation().lower();
            best = Some(match best {
                None => v,
                Some(b) => b.min(v),
            });
        }
        let mut v = best.unwrap_or(Val::int(self.disc.ctx.prec_cap() as i64));
        if let Some(t) = self.tail {
            v = v.min(t);
        }
        v
    }

    fn check_disc(&self, other: &Self) -> Result<()> {
        if self.disc != other.disc {
            return Err(Error::ContextMismatch(
                "elements belong to different weight discs".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_disc(other)?;
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            coeffs.push(a.add(b)?);
        }
        Ok(IwasawaElem {
            disc: self.disc.clone(),
            coeffs,
            tail: tail_min(self.tail, other.tail),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        IwasawaElem {
            disc: self.disc.clone(),
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
            tail: self.tail,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_disc(other)?;
        let d = self.disc.d_max as usize;
        let mut coeffs = vec![PadicNum::zero(&self.disc.ctx); d + 1];
        let mut dropped: Option<Val> = None;
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero_at_prec() {
                continue;
            }
            let va = a.valuation().lower();
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero_at_prec() {
                    continue;
                }
                if i + j <= d {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b)?)?;
                } else {
                    let vb = b.valuation().lower();
                    dropped = tail_min(dropped, Some(va.add(&vb)));
                }
            }
        }
        // tails of the factors spread over the whole product
        let mut tail = dropped;
        if let Some(tb) = other.tail {
            tail = tail_min(tail, Some(self.val_lower().add(&tb)));
        }
        if let Some(ta) = self.tail {
            tail = tail_min(tail, Some(other.val_lower().add(&ta)));
        }
        Ok(IwasawaElem {
            disc: self.disc.clone(),
            coeffs,
            tail,
        })
    }

    pub fn scale(&self, c: &PadicNum) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            coeffs.push(a.mul(c)?);
        }
        let tail = self.tail.map(|t| t.add(&c.valuation().lower()));
        Ok(IwasawaElem {
            disc: self.disc.clone(),
            coeffs,
            tail,
        })
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        IwasawaElem {
            disc: self.disc.clone(),
            coeffs: self.coeffs.iter().map(|c| c.mul_i64(k)).collect(),
            tail: self.tail,
        }
    }

    pub fn pow_u32(&self, n: u32) -> Result<Self> {
        let mut acc = Self::one(&self.disc);
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Coefficientwise equality at working precision (tails are bounds on
    /// discarded content, not part of the stored value).
    pub fn eq_elem(&self, other: &Self) -> Result<bool> {
        self.check_disc(other)?;
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            if !a.eq_working(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Evaluate at an admissible integer weight.  The result's precision is
    /// capped by the recorded truncation-loss bound.
    /// Reinterprets the element over another disc sharing the coordinate:
    /// same base context, same spacing exponent, same truncation order.
    /// Coefficients and tail carry over unchanged; only the centre of the
    /// disc (hence the weights the coordinate values stand for) moves.
    pub fn retag_disc(&self, disc: &WeightDisc) -> Result<Self> {
        if *self.disc.ctx != *disc.ctx || self.disc.r != disc.r || self.disc.d_max != disc.d_max
        {
            return Err(Error::ContextMismatch(
                "disc retag needs an identical coordinate".into(),
            ));
        }
        Ok(IwasawaElem {
            disc: disc.clone(),
            coeffs: self.coeffs.clone(),
            tail: self.tail,
        })
    }

    pub fn specialize(&self, k: i64) -> Result<PadicNum> {
        let u = self.disc.u_of_weight(k)?;
        let mut acc = PadicNum::zero(&self.disc.ctx);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&u)?.add(c)?;
        }
        match self.tail {
            None => Ok(acc),
            Some(t) => {
                let cap = t.floor();
                if cap <= 0 {
                    return Err(Error::Precision(format!(
                        "truncation loss (valuation floor {t}) consumes all precision at weight {k}"
                    )));
                }
                let pr = acc.prec().min(cap as u32);
                acc.with_prec(pr)
            }
        }
    }
}

impl fmt::Debug for IwasawaElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")?;
        if let Some(t) = self.tail {
            write!(f, " (tail >= {t})")?;
        }
        Ok(())
    }
}

/// The weight operator: the element with specialize(nabla, k) = k.
pub fn nabla(disc: &WeightDisc) -> IwasawaElem {
    let mut out = IwasawaElem::zero(disc);
    out.coeffs[0] = PadicNum::from_i64(&disc.ctx, disc.k0);
    let pr = BigInt::from(disc.ctx.p()).pow(disc.r);
    out.coeffs[1] = PadicNum::from_bigint(&disc.ctx, &pr);
    out
}

/// binom(nabla - shift, j): the divided product
/// (nabla-shift)(nabla-shift-1)...(nabla-shift-j+1)/j!.
pub fn binom_nabla(disc: &WeightDisc, shift: i64, j: u32) -> Result<IwasawaElem> {
    let mut acc = IwasawaElem::one(disc);
    let nb = nabla(disc);
    for i in 0..j as i64 {
        let factor = nb.add(&IwasawaElem::constant(
            disc,
            &PadicNum::from_i64(&disc.ctx, -(shift + i)),
        ))?;
        acc = acc.mul(&factor)?;
    }
    if j >= 2 {
        let mut fact = BigInt::one();
        for i in 2..=j as i64 {
            fact *= BigInt::from(i);
        }
        let inv = PadicNum::from_rational(&disc.ctx, &BigInt::one(), &fact)?;
        acc = acc.scale(&inv)?;
    }
    Ok(acc)
}

fn series_threshold(ctx: &PadicContext) -> Val {
    Val::new(1, (ctx.p() - 1) as u32)
}

fn series_envelope(v: Val, m: i64, p: u64) -> Val {
    v.scale(m).add(&Val::new(-(m - 1), (p - 1) as u32))
}

/// exp of a family element with val_lower > 1/(p-1).
pub fn fam_exp(x: &IwasawaElem) -> Result<IwasawaElem> {
    let disc = x.disc.clone();
    let v = x.val_lower();
    if v <= series_threshold(&disc.ctx) {
        return Err(Error::Convergence(format!(
            "family exp needs sup-norm valuation > 1/(p-1); got {v}"
        )));
    }
    let p = disc.ctx.p();
    let target = Val::int(disc.ctx.prec_cap() as i64);
    let mut sum = IwasawaElem::one(&disc);
    let mut term = IwasawaElem::one(&disc);
    let mut n: i64 = 1;
    loop {
        let recip = PadicNum::from_rational(&disc.ctx, &BigInt::one(), &BigInt::from(n))?;
        term = term.mul(x)?.scale(&recip)?;
        sum = sum.add(&term)?;
        n += 1;
        if series_envelope(v, n, p) >= target {
            break;
        }
    }
    Ok(sum)
}

/// log of a family element with val_lower(x - 1) > 1/(p-1).
pub fn fam_log(x: &IwasawaElem) -> Result<IwasawaElem> {
    let disc = x.disc.clone();
    let u = x.sub(&IwasawaElem::one(&disc))?;
    let v = u.val_lower();
    if v <= series_threshold(&disc.ctx) {
        return Err(Error::Convergence(format!(
            "family log needs sup-norm valuation of x-1 > 1/(p-1); got {v}"
        )));
    }
    let p = disc.ctx.p();
    let target = Val::int(disc.ctx.prec_cap() as i64);
    let mut sum = IwasawaElem::zero(&disc);
    let mut upow = u.clone();
    let mut n: i64 = 1;
    loop {
        let recip = PadicNum::from_rational(&disc.ctx, &BigInt::one(), &BigInt::from(n))?;
        let term = upow.scale(&recip)?;
        sum = if n % 2 == 1 {
            sum.add(&term)?
        } else {
            sum.sub(&term)?
        };
        n += 1;
        if series_envelope(v, n, p) >= target {
            break;
        }
        upow = upow.mul(&u)?;
    }
    Ok(sum)
}

/// The universal character at a unit x:
/// κ_U(x) = ω(x)^{k_0} · exp(nabla · log⟨x⟩).
/// Requires the Teichmüller part of x to have order dividing p-1, so that
/// specialisation at any admissible k gives exactly x^k.
pub fn kappa_eval(disc: &WeightDisc, x: &PadicNum) -> Result<IwasawaElem> {
    if !(**x.ctx() == *disc.ctx) {
        return Err(Error::ContextMismatch(
            "argument context differs from the disc context".into(),
        ));
    }
    match x.valuation() {
        ValBound::Exact(v) if v.num == 0 => {}
        _ => return Err(Error::Invalid("universal character needs a unit".into())),
    }
    let omega = teichmuller(x)?;
    let w_order = omega.pow_i64((disc.ctx.p() - 1) as i64)?;
    if !w_order.eq_working(&PadicNum::one(&disc.ctx))? {
        return Err(Error::Invalid(
            "unit is not in the image of Z_p^x: Teichmüller order exceeds p-1".into(),
        ));
    }
    let wild = x.div(&omega)?;
    let l = log1(&wild)?;
    if l.is_zero_at_prec() {
        // x is its own Teichmüller representative
        return Ok(IwasawaElem::constant(disc, &omega.pow_i64(disc.k0)?));
    }
    let nl = nabla(disc).scale(&l)?;
    let wild_part = fam_exp(&nl)?;
    wild_part.scale(&omega.pow_i64(disc.k0)?)
}

/// Family weight law over a disc.
#[derive(Clone, Debug)]
pub struct FamWeight {
    disc: WeightDisc,
}

impl FamWeight {
    pub fn new(disc: &WeightDisc) -> Self {
        FamWeight { disc: disc.clone() }
    }
    pub fn disc(&self) -> &WeightDisc {
        &self.disc
    }
}

impl RingElem for IwasawaElem {
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
        self.scale_i64(k)
    }
    fn rscale_big(&self, k: &BigInt) -> Result<Self> {
        self.scale(&PadicNum::from_bigint(&self.disc.ctx, k))
    }
    fn req(&self, other: &Self) -> Result<bool> {
        self.eq_elem(other)
    }
    fn rzero_like(&self) -> Self {
        IwasawaElem::zero(&self.disc)
    }
    fn rone_like(&self) -> Self {
        IwasawaElem::one(&self.disc)
    }
    fn ris_zero(&self) -> bool {
        self.is_zero_elem()
    }
    fn rdenom_exp(&self) -> u32 {
        self.denom_exponent()
    }
    fn rval_lower(&self) -> Val {
        self.val_lower()
    }
}

impl WeightLaw for FamWeight {
    type Coef = IwasawaElem;

    fn base_ctx(&self) -> &Arc<PadicContext> {
        &self.disc.ctx
    }

    fn embed(&self, c: &PadicNum) -> Result<IwasawaElem> {
        if !(**c.ctx() == *self.disc.ctx) {
            return Err(Error::ContextMismatch(
                "scalar context differs from the disc context".into(),
            ));
        }
        Ok(IwasawaElem::constant(&self.disc, c))
    }

    fn kappa(&self, d: &PadicNum) -> Result<IwasawaElem> {
        kappa_eval(&self.disc, d)
    }

    fn binom_weight(&self, shift: i64, j: u32) -> Result<IwasawaElem> {
        binom_nabla(&self.disc, shift, j)
    }

    fn same_law(&self, other: &Self) -> bool {
        self.disc == other.disc
    }

    fn specialize_coef(&self, c: &IwasawaElem, k: i64) -> Result<PadicNum> {
        if *c.disc() != self.disc {
            return Err(Error::ContextMismatch(
                "coefficient belongs to a different disc".into(),
            ));
        }
        c.specialize(k)
    }

    fn raise(&self, j: u32) -> Self {
        FamWeight {
            disc: self.disc.shift_center(j as i64),
        }
    }

    fn retag_coef(&self, c: &IwasawaElem, target: &Self) -> Result<IwasawaElem> {
        c.retag_disc(&target.disc)
    }

    fn min_level(&self) -> Result<u32> {
        self.disc.min_analytic_level()
    }

    fn describe(&self) -> String {
        format!("family over {}", self.disc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn disc_5(k0: i64) -> WeightDisc {
        let ctx = PadicContext::base(5, 12).unwrap();
        WeightDisc::new(&ctx, k0, 1, 12).unwrap()
    }

    #[test]
    fn admissibility_is_the_joint_congruence() {
        let d = disc_5(2);
        assert!(d.is_admissible(2));
        assert!(d.is_admissible(22));
        assert!(d.is_admissible(-18));
        assert!(!d.is_admissible(3));
        assert!(!d.is_admissible(6)); // congruent mod 4 fails
        assert!(!d.is_admissible(7)); // 7-2=5 has v=1 but 5 % 4 != 0
        assert_eq!(d.admissible_in(0, 50), vec![2, 22, 42]);
    }

    #[test]
    fn nabla_specialises_to_the_weight() {
        let d = disc_5(2);
        let nb = nabla(&d);
        for k in [2i64, 22, -18, 102] {
            let got = nb.specialize(k).unwrap();
            let want = PadicNum::from_i64(d.ctx(), k);
            assert!(got.eq_working(&want).unwrap(), "nabla at k={k}");
        }
        assert!(nb.specialize(3).is_err());
        // nabla - k0 is p^r * u: a single coefficient of valuation r
        let shifted = nb
            .sub(&IwasawaElem::constant(&d, &PadicNum::from_i64(d.ctx(), 2)))
            .unwrap();
        assert!(shifted.coeff(0).is_zero_at_prec());
        assert_eq!(
            shifted.coeff(1).valuation(),
            ValBound::Exact(Val::int(1))
        );
    }

    #[test]
    fn kappa_at_one_and_at_teichmuller_points() {
        let d = disc_5(2);
        let one = PadicNum::one(d.ctx());
        let k1 = kappa_eval(&d, &one).unwrap();
        assert!(k1.eq_elem(&IwasawaElem::one(&d)).unwrap());
        // a Teichmüller root: the wild part vanishes, leaving ω(x)^{k0}
        let w = teichmuller(&PadicNum::from_u64(d.ctx(), 2)).unwrap();
        let kw = kappa_eval(&d, &w).unwrap();
        let expect = IwasawaElem::constant(&d, &w.pow_i64(2).unwrap());
        assert!(kw.eq_elem(&expect).unwrap());
        assert_eq!(kw.degree(), 0);
    }

    #[test]
    fn kappa_specialises_to_integer_powers() {
        // frozen case: p=5, k0=2, r=1, x=6, k=2 gives 36 to precision 8
        let d = disc_5(2);
        let x = PadicNum::from_u64(d.ctx(), 6);
        let kx = kappa_eval(&d, &x).unwrap();
        let at2 = kx.specialize(2).unwrap();
        assert!(at2.prec() >= 8);
        assert!(at2
            .eq_at_prec(&PadicNum::from_u64(d.ctx(), 36), 8)
            .unwrap());
        // a further admissible weight, against the repeated-multiplication oracle
        let at22 = kx.specialize(22).unwrap();
        let oracle = x.pow_i64(22).unwrap();
        assert!(at22.eq_at_prec(&oracle, at22.prec()).unwrap());
    }

    #[test]
    fn kappa_of_one_plus_p_matches_power_oracle() {
        let d = disc_5(2);
        let x = PadicNum::from_u64(d.ctx(), 6);
        let kx = kappa_eval(&d, &x).unwrap();
        for k in [2i64, 22, 42, -18] {
            let got = kx.specialize(k).unwrap();
            let want = x.pow_i64(k).unwrap();
            assert!(got.eq_at_prec(&want, got.prec().min(want.prec())).unwrap());
        }
    }

    #[test]
    fn kappa_on_random_units_and_weights() {
        let d = disc_5(2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1701);
        for _ in 0..12 {
            let raw: u64 = rng.gen_range(1..5u64.pow(9));
            if raw % 5 == 0 {
                continue;
            }
            let x = PadicNum::from_u64(d.ctx(), raw);
            let kx = kappa_eval(&d, &x).unwrap();
            for k in [2i64, 22, 42] {
                let got = kx.specialize(k).unwrap();
                let want = x.pow_i64(k).unwrap();
                assert!(
                    got.eq_at_prec(&want, got.prec().min(want.prec())).unwrap(),
                    "x={raw}, k={k}"
                );
            }
        }
    }

    #[test]
    fn binomial_nabla_basics() {
        let d = disc_5(2);
        let b0 = binom_nabla(&d, 0, 0).unwrap();
        assert!(b0.eq_elem(&IwasawaElem::one(&d)).unwrap());
        let b2 = binom_nabla(&d, 0, 2).unwrap();
        for k in [2i64, 22, 42] {
            let got = b2.specialize(k).unwrap();
            let want =
                PadicNum::from_rational(d.ctx(), &BigInt::from(k * (k - 1)), &BigInt::from(2))
                    .unwrap();
            assert!(got.eq_working(&want).unwrap());
        }
        // denominator exponent bounded by v_p(j!)
        let b7 = binom_nabla(&d, 0, 7).unwrap();
        assert!(b7.denom_exponent() <= 1);
    }

    #[test]
    fn pascal_style_identity_for_nabla_binomials() {
        // binom(h,j) * binom(nabla, h) = binom(nabla, j) * binom(nabla - j, h - j)
        let d = disc_5(2);
        for h in 0..=4u32 {
            for j in 0..=h {
                let (bn, bd) = binom_int_big(h as i64, j);
                let c = PadicNum::from_rational(d.ctx(), &bn, &bd).unwrap();
                let lhs = binom_nabla(&d, 0, h).unwrap().scale(&c).unwrap();
                let rhs = binom_nabla(&d, 0, j)
                    .unwrap()
                    .mul(&binom_nabla(&d, j as i64, h - j).unwrap())
                    .unwrap();
                assert!(lhs.eq_elem(&rhs).unwrap(), "h={h}, j={j}");
            }
        }
    }

    #[test]
    fn ring_axioms_sampled() {
        let d = disc_5(2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let rand_elem = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut coeffs = Vec::new();
            for _ in 0..4 {
                coeffs.push(PadicNum::from_u64(d.ctx(), rng.gen_range(0..5u64.pow(6))));
            }
            IwasawaElem::from_coeffs(&d, coeffs).unwrap()
        };
        for _ in 0..25 {
            let a = rand_elem(&mut rng);
            let b = rand_elem(&mut rng);
            let c = rand_elem(&mut rng);
            let ab_c = a.mul(&b).unwrap().mul(&c).unwrap();
            let a_bc = a.mul(&b.mul(&c).unwrap()).unwrap();
            assert!(ab_c.eq_elem(&a_bc).unwrap(), "associativity");
            let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            assert!(lhs.eq_elem(&rhs).unwrap(), "distributivity");
        }
    }

    #[test]
    fn truncation_loss_is_tracked_and_capped() {
        let d = disc_5(2);
        // degree-12 elements whose product overflows the truncation degree
        let mut coeffs = Vec::new();
        for i in 0..=12u32 {
            coeffs.push(PadicNum::from_u64(d.ctx(), (i as u64 % 4) + 1));
        }
        let a = IwasawaElem::from_coeffs(&d, coeffs).unwrap();
        let sq = a.mul(&a).unwrap();
        let t = sq.tail_bound().expect("tail must be recorded");
        assert_eq!(t, Val::int(0));
        // unit coefficients dropped at degree > 12: nothing survives specialisation
        assert!(sq.specialize(2).is_err());
        // exact elements never acquire tails
        let nb = nabla(&d);
        assert!(nb.mul(&nb).unwrap().tail_bound().is_none());
    }

    #[test]
    fn analyticity_level_of_standard_discs() {
        let d = disc_5(2);
        let bound = d.analytic_bound().unwrap();
        assert!(bound >= Val::int(1));
        assert_eq!(d.min_analytic_level().unwrap(), 1);
        assert!(d.is_n_analytic(2).unwrap());
    }

    #[test]
    fn specialization_is_a_ring_map_on_samples() {
        let d = disc_5(2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                let mut coeffs = Vec::new();
                for _ in 0..5 {
                    coeffs.push(PadicNum::from_u64(d.ctx(), rng.gen_range(0..5u64.pow(5))));
                }
                IwasawaElem::from_coeffs(&d, coeffs).unwrap()
            };
            let a = mk(&mut rng);
            let b = mk(&mut rng);
            let k = 2 + 20 * (rng.gen_range(0..5i64));
            let sum = a.add(&b).unwrap().specialize(k).unwrap();
            let sum2 = a.specialize(k).unwrap().add(&b.specialize(k).unwrap()).unwrap();
            assert!(sum.eq_working(&sum2).unwrap());
            let prod = a.mul(&b).unwrap().specialize(k).unwrap();
            let prod2 = a.specialize(k).unwrap().mul(&b.specialize(k).unwrap()).unwrap();
            assert!(prod.eq_at_prec(&prod2, prod.prec().min(prod2.prec())).unwrap());
        }
    }

    #[test]
    fn fam_log_inverts_fam_exp() {
        let d = disc_5(2);
        let l = log1(&PadicNum::from_u64(d.ctx(), 6)).unwrap();
        let x = nabla(&d).scale(&l).unwrap();
        let e = fam_exp(&x).unwrap();
        let back = fam_log(&e).unwrap();
        assert!(back.eq_elem(&x).unwrap());
    }
}
