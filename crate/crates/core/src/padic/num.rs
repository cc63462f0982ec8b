//! Capped-precision elements of a p-adic field.
//!
//! An element is stored as an integral coefficient vector against the power
//! basis of the defining polynomial, divided by an explicit power of p:
//!
//! ```text
//!     value = p^(-denom) * (c_0 + c_1 θ + ... + c_{d-1} θ^{d-1})
//! ```
//!
//! with every `c_i` reduced into `[0, p^(prec + denom))`.  `prec` is the
//! absolute precision of the *value*: two elements that compare equal at
//! precision t agree modulo p^t.  Representations are canonical: when
//! `denom > 0` at least one coefficient is a p-adic unit, so equal values
//! have equal stored forms at equal precision.
//!
//! Valuations are computed from the Newton polygon of the representative:
//! `min_i v_p(c_i)` in the unramified case, `min_i (e * v_p(c_i) + i)` in
//! uniformiser units for an Eisenstein presentation (the slopes are distinct
//! below the precision horizon, so the minimum is exact).

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::context::{ExtKind, PadicContext};
use super::fppoly;
use crate::error::{Error, Result};

/// Exact rational valuation, denominator the ramification index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Val {
    pub num: i64,
    pub den: u32,
}

impl Val {
    pub fn new(num: i64, den: u32) -> Self {
        assert!(den > 0);
        let g = gcd_u64(num.unsigned_abs(), den as u64) as i64;
        Val {
            num: num / g,
            den: (den as i64 / g) as u32,
        }
    }
    pub fn int(n: i64) -> Self {
        Val { num: n, den: 1 }
    }
    pub fn floor(&self) -> i64 {
        self.num.div_euclid(self.den as i64)
    }
    pub fn ceil(&self) -> i64 {
        -((-self.num).div_euclid(self.den as i64))
    }
    pub fn add(&self, other: &Val) -> Val {
        let den = lcm_u32(self.den, other.den);
        Val::new(
            self.num * (den / self.den) as i64 + other.num * (den / other.den) as i64,
            den,
        )
    }
    pub fn neg(&self) -> Val {
        Val {
            num: -self.num,
            den: self.den,
        }
    }
    pub fn scale(&self, k: i64) -> Val {
        Val::new(self.num * k, self.den)
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if a == 0 {
        b.max(1)
    } else if b == 0 {
        a
    } else {
        let (mut a, mut b) = (a, b);
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }
}
fn lcm_u32(a: u32, b: u32) -> u32 {
    (a as u64 / gcd_u64(a as u64, b as u64) * b as u64) as u32
}

impl PartialOrd for Val {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Val {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let l = self.num as i128 * other.den as i128;
        let r = other.num as i128 * self.den as i128;
        l.cmp(&r)
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// A valuation, either exact or only bounded below (the element is
/// indistinguishable from zero at its working precision).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValBound {
    Exact(Val),
    AtLeast(Val),
}

impl ValBound {
    pub fn lower(&self) -> Val {
        match self {
            ValBound::Exact(v) | ValBound::AtLeast(v) => *v,
        }
    }
    pub fn is_exact(&self) -> bool {
        matches!(self, ValBound::Exact(_))
    }
}

impl fmt::Display for ValBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValBound::Exact(v) => write!(f, "{v}"),
            ValBound::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

#[derive(Clone)]
pub struct PadicNum {
    ctx: Arc<PadicContext>,
    /// Numerator coefficients, constant term first, length = ctx.degree().
    coeffs: Vec<BigUint>,
    /// Absolute precision of the value.
    prec: u32,
    /// The value is the coefficient vector divided by p^denom.
    denom: u32,
}

impl PadicNum {
    // ---------- constructors ----------

    pub fn from_parts(
        ctx: &Arc<PadicContext>,
        coeffs: Vec<BigInt>,
        prec: u32,
        denom: u32,
    ) -> Result<Self> {
        let d = ctx.degree();
        if coeffs.len() > d {
            return Err(Error::Invalid(format!(
                "coefficient vector of length {} exceeds degree {}",
                coeffs.len(),
                d
            )));
        }
        let prec = prec.min(ctx.prec_cap());
        if prec == 0 {
            return Err(Error::Precision("element carries no precision".into()));
        }
        let modulus = ctx.p_pow(prec + denom);
        let mut v = Vec::with_capacity(d);
        for i in 0..d {
            let c = coeffs.get(i).cloned().unwrap_or_else(BigInt::zero);
            v.push(reduce_int(&c, &modulus));
        }
        let mut out = PadicNum {
            ctx: ctx.clone(),
            coeffs: v,
            prec,
            denom,
        };
        out.normalize();
        Ok(out)
    }

    pub fn zero(ctx: &Arc<PadicContext>) -> Self {
        PadicNum {
            ctx: ctx.clone(),
            coeffs: vec![BigUint::zero(); ctx.degree()],
            prec: ctx.prec_cap(),
            denom: 0,
        }
    }

    pub fn one(ctx: &Arc<PadicContext>) -> Self {
        let mut coeffs = vec![BigUint::zero(); ctx.degree()];
        coeffs[0] = BigUint::one();
        PadicNum {
            ctx: ctx.clone(),
            coeffs,
            prec: ctx.prec_cap(),
            denom: 0,
        }
    }

    pub fn from_u64(ctx: &Arc<PadicContext>, n: u64) -> Self {
        Self::from_bigint(ctx, &BigInt::from(n))
    }

    pub fn from_i64(ctx: &Arc<PadicContext>, n: i64) -> Self {
        Self::from_bigint(ctx, &BigInt::from(n))
    }

    pub fn from_bigint(ctx: &Arc<PadicContext>, n: &BigInt) -> Self {
        let modulus = ctx.p_pow(ctx.prec_cap());
        let mut coeffs = vec![BigUint::zero(); ctx.degree()];
        coeffs[0] = reduce_int(n, &modulus);
        let mut out = PadicNum {
            ctx: ctx.clone(),
            coeffs,
            prec: ctx.prec_cap(),
            denom: 0,
        };
        out.normalize();
        out
    }

    /// The generator θ of the extension (errors on the base field).
    pub fn gen(ctx: &Arc<PadicContext>) -> Result<Self> {
        if ctx.degree() < 2 {
            return Err(Error::Invalid("base field has no generator".into()));
        }
        let mut coeffs = vec![BigUint::zero(); ctx.degree()];
        coeffs[1] = BigUint::one();
        Ok(PadicNum {
            ctx: ctx.clone(),
            coeffs,
            prec: ctx.prec_cap(),
            denom: 0,
        })
    }

    /// Canonical representative over the power basis: reduced digit
    /// vector (constant coefficient first), absolute precision, and the
    /// denominator exponent, in the shape consumed by from_parts.
    pub fn parts(&self) -> (Vec<BigInt>, u32, u32) {
        let coeffs = self.coeffs.iter().cloned().map(BigInt::from).collect();
        (coeffs, self.prec, self.denom)
    }

    /// a/b as an element, for any b coprime-or-not to p (p-part of b becomes
    /// an explicit denominator).
    pub fn from_rational(ctx: &Arc<PadicContext>, a: &BigInt, b: &BigInt) -> Result<Self> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = BigInt::from(ctx.p());
        let mut b = b.clone();
        let mut a = a.clone();
        if b.is_negative() {
            b = -b;
            a = -a;
        }
        let mut s = 0u32;
        while (&b % &p).is_zero() {
            b /= &p;
            s += 1;
        }
        let modulus = ctx.p_pow(ctx.prec_cap() + s);
        let mod_int = BigInt::from_biguint(Sign::Plus, modulus.clone());
        let binv = modinv_bigint(&b, &mod_int).ok_or(Error::DivisionByZero)?;
        let num = reduce_int(&(a * binv), &modulus);
        let mut coeffs = vec![BigUint::zero(); ctx.degree()];
        coeffs[0] = num;
        let mut out = PadicNum {
            ctx: ctx.clone(),
            coeffs,
            prec: ctx.prec_cap(),
            denom: s,
        };
        out.normalize();
        Ok(out)
    }

    // ---------- accessors ----------

    pub fn ctx(&self) -> &Arc<PadicContext> {
        &self.ctx
    }
    pub fn prec(&self) -> u32 {
        self.prec
    }
    pub fn denom_exp(&self) -> u32 {
        self.denom
    }
    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    /// Signed numerator coefficients (balanced representatives not used;
    /// plain `[0, p^sprec)` lifts).
    pub fn coeffs_bigint(&self) -> Vec<BigInt> {
        self.coeffs
            .iter()
            .map(|c| BigInt::from_biguint(Sign::Plus, c.clone()))
            .collect()
    }

    fn sprec(&self) -> u32 {
        self.prec + self.denom
    }

    // ---------- canonical form ----------

    fn normalize(&mut self) {
        let p = self.ctx.p_big();
        while self.denom > 0 {
            let all_div = self
                .coeffs
                .iter()
                .all(|c| c.is_zero() || (c % &p).is_zero());
            if !all_div {
                break;
            }
            for c in self.coeffs.iter_mut() {
                if !c.is_zero() {
                    *c /= &p;
                }
            }
            self.denom -= 1;
        }
        // clamp precision at cap and re-reduce
        if self.prec > self.ctx.prec_cap() {
            self.prec = self.ctx.prec_cap();
        }
        let modulus = self.ctx.p_pow(self.sprec());
        for c in self.coeffs.iter_mut() {
            *c %= &modulus;
        }
        // a numerically-zero vector needs no denominator
        if self.denom > 0 && self.coeffs.iter().all(|c| c.is_zero()) {
            self.denom = 0;
        }
    }

    // ---------- predicates / valuation ----------

    pub fn same_ctx(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx
    }

    pub fn is_zero_at_prec(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Valuation of the value, exact or a lower bound (zero at precision).
    pub fn valuation(&self) -> ValBound {
        let e = self.ctx.ram_index();
        if self.is_zero_at_prec() {
            return ValBound::AtLeast(Val::int(self.prec as i64));
        }
        let p = self.ctx.p_big();
        let mut best: Option<i64> = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let vp = vp_biguint(c, &p) as i64;
            let scaled = match self.ctx.kind() {
                ExtKind::Eisenstein => vp * e as i64 + i as i64,
                _ => vp * e as i64,
            };
            best = Some(match best {
                None => scaled,
                Some(b) => b.min(scaled),
            });
        }
        let b = best.unwrap();
        ValBound::Exact(Val::new(b - (self.denom as i64) * e as i64, e))
    }

    /// Reduce the claimed precision (never increases it).
    pub fn with_prec(&self, prec: u32) -> Result<Self> {
        if prec == 0 {
            return Err(Error::Precision("cannot truncate to zero precision".into()));
        }
        let prec = prec.min(self.prec);
        let mut out = self.clone();
        out.prec = prec;
        let modulus = out.ctx.p_pow(out.sprec());
        for c in out.coeffs.iter_mut() {
            *c %= &modulus;
        }
        out.normalize();
        Ok(out)
    }

    // ---------- ring operations ----------

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let denom = self.denom.max(other.denom);
        let prec = self.prec.min(other.prec);
        let sprec = prec + denom;
        let modulus = self.ctx.p_pow(sprec);
        let pa = self.ctx.p_pow(denom - self.denom);
        let pb = self.ctx.p_pow(denom - other.denom);
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for i in 0..self.coeffs.len() {
            let v = (&self.coeffs[i] * &pa + &other.coeffs[i] * &pb) % &modulus;
            coeffs.push(v);
        }
        let mut out = PadicNum {
            ctx: self.ctx.clone(),
            coeffs,
            prec,
            denom,
        };
        out.normalize();
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let modulus = self.ctx.p_pow(self.sprec());
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                if c.is_zero() {
                    BigUint::zero()
                } else {
                    &modulus - c
                }
            })
            .collect();
        let mut out = PadicNum {
            ctx: self.ctx.clone(),
            coeffs,
            prec: self.prec,
            denom: self.denom,
        };
        out.normalize();
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let va = self.valuation().lower();
        let vb = other.valuation().lower();
        // value precision of the product
        let cand1 = Val::int(self.prec as i64).add(&vb);
        let cand2 = Val::int(other.prec as i64).add(&va);
        let prec_val = cand1.min(cand2);
        let prec = prec_val.floor();
        if prec <= 0 {
            return Err(Error::Precision(
                "product has no remaining precision".into(),
            ));
        }
        let prec = (prec as u32).min(self.ctx.prec_cap());
        let denom = self.denom + other.denom;
        let sprec = prec + denom;
        let modulus = self.ctx.p_pow(sprec);
        let coeffs = mul_vecs_mod(&self.coeffs, &other.coeffs, &self.ctx, &modulus);
        let mut out = PadicNum {
            ctx: self.ctx.clone(),
            coeffs,
            prec,
            denom,
        };
        out.normalize();
        Ok(out)
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        let kk = PadicNum::from_i64(&self.ctx, k);
        // multiplication by an integer never fails on precision
        self.mul(&kk).expect("integer scaling cannot exhaust precision")
    }

    /// Multiply by p^t (t may be negative: this grows the denominator).
    pub fn shift_p(&self, t: i64) -> Result<Self> {
        if t == 0 {
            return Ok(self.clone());
        }
        if t > 0 {
            let f = self.ctx.p_pow(t as u32);
            let sprec = self.sprec() + t as u32;
            let modulus = self.ctx.p_pow(sprec.min(self.ctx.prec_cap() + self.denom));
            let prec = (self.prec + t as u32).min(self.ctx.prec_cap());
            let coeffs = self
                .coeffs
                .iter()
                .map(|c| (c * &f) % &modulus)
                .collect();
            let mut out = PadicNum {
                ctx: self.ctx.clone(),
                coeffs,
                prec,
                denom: self.denom,
            };
            out.normalize();
            Ok(out)
        } else {
            let s = (-t) as u32;
            let prec = self.prec as i64 + t;
            if prec <= 0 {
                return Err(Error::Precision("p-shift exhausts precision".into()));
            }
            let mut out = self.clone();
            out.denom += s;
            out.prec = prec as u32;
            out.normalize();
            Ok(out)
        }
    }

    /// Inverse; requires exact (finite) valuation.
    pub fn inv(&self) -> Result<Self> {
        let v = match self.valuation() {
            ValBound::Exact(v) => v,
            ValBound::AtLeast(_) => return Err(Error::DivisionByZero),
        };
        // value precision of the inverse: prec - 2*v
        let target_val = Val::int(self.prec as i64).add(&v.scale(-2));
        let target = target_val.floor();
        if target <= 0 {
            return Err(Error::Precision("inverse has no remaining precision".into()));
        }
        let target = (target as u32).min(self.ctx.prec_cap());

        // invert the integral numerator, then restore the denominator as a
        // positive power of p on the numerator side
        let inv_num = invert_integral(&self.ctx, &self.coeffs, target)?;
        let restored = inv_num.shift_p(self.denom as i64)?;
        restored.with_prec(target)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    /// Integer power by square-and-multiply; negative powers via the inverse.
    pub fn pow_i64(&self, n: i64) -> Result<Self> {
        if n == 0 {
            return Ok(PadicNum::one(&self.ctx));
        }
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = PadicNum::one(&self.ctx);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b)?;
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b)?;
            }
        }
        Ok(acc)
    }

    /// Nonnegative big-integer power (used for Teichmüller and root-of-unity
    /// arithmetic, where exponents are of size p^f).
    pub fn pow_biguint(&self, n: &BigUint) -> Result<Self> {
        let mut acc = PadicNum::one(&self.ctx);
        let mut b = self.clone();
        let bits = n.bits();
        for i in 0..bits {
            if n.bit(i) {
                acc = acc.mul(&b)?;
            }
            if i + 1 < bits {
                b = b.mul(&b)?;
            }
        }
        Ok(acc)
    }

    // ---------- comparisons ----------

    /// Difference is zero at precision t.
    pub fn eq_at_prec(&self, other: &Self, t: u32) -> Result<bool> {
        let d = self.sub(other)?;
        Ok(match d.valuation() {
            ValBound::AtLeast(v) => v >= Val::int(t as i64),
            ValBound::Exact(v) => v >= Val::int(t as i64),
        })
    }

    /// Equality at the joint working precision.
    pub fn eq_working(&self, other: &Self) -> Result<bool> {
        let t = self.prec.min(other.prec);
        self.eq_at_prec(other, t)
    }

    fn check_ctx(&self, other: &Self) -> Result<()> {
        if !self.same_ctx(other) {
            return Err(Error::ContextMismatch(format!(
                "p={} deg={} vs p={} deg={}",
                self.ctx.p(),
                self.ctx.degree(),
                other.ctx.p(),
                other.ctx.degree()
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for PadicNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom > 0 {
            write!(f, "p^-{}*", self.denom)?;
        }
        write!(f, "{:?} + O({}^{})", self.coeffs, self.ctx.p(), self.prec)
    }
}

impl fmt::Display for PadicNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ctx.degree() == 1 {
            if self.denom > 0 {
                write!(f, "{}/{}^{}", self.coeffs[0], self.ctx.p(), self.denom)?;
            } else {
                write!(f, "{}", self.coeffs[0])?;
            }
        } else {
            if self.denom > 0 {
                write!(f, "p^-{}*", self.denom)?;
            }
            write!(f, "[")?;
            for (i, c) in self.coeffs.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, "]")?;
        }
        write!(f, " + O({}^{})", self.ctx.p(), self.prec)
    }
}

// ---------- helpers ----------

pub(crate) fn reduce_int(c: &BigInt, modulus: &BigUint) -> BigUint {
    let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
    let r = ((c % &m) + &m) % &m;
    r.to_biguint().unwrap()
}

pub(crate) fn vp_biguint(c: &BigUint, p: &BigUint) -> u32 {
    let mut v = 0;
    let mut c = c.clone();
    while !c.is_zero() && (&c % p).is_zero() {
        c /= p;
        v += 1;
    }
    v
}

pub(crate) fn modinv_bigint(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(((g.x % m) + m) % m)
}

/// Schoolbook product of coefficient vectors, reduced by the monic defining
/// polynomial (if any) and by the modulus.
fn mul_vecs_mod(
    a: &[BigUint],
    b: &[BigUint],
    ctx: &Arc<PadicContext>,
    modulus: &BigUint,
) -> Vec<BigUint> {
    let d = ctx.degree();
    if d == 1 {
        return vec![(&a[0] * &b[0]) % modulus];
    }
    let mut prod = vec![BigUint::zero(); 2 * d - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            prod[i + j] = (&prod[i + j] + ai * bj) % modulus;
        }
    }
    reduce_by_poly(&mut prod, ctx, modulus);
    prod.truncate(d);
    prod
}

/// Reduce a raw product in place by the monic defining polynomial.
fn reduce_by_poly(prod: &mut Vec<BigUint>, ctx: &Arc<PadicContext>, modulus: &BigUint) {
    let d = ctx.degree();
    let poly = ctx.poly();
    // θ^d = -(poly[0] + poly[1] θ + ... + poly[d-1] θ^{d-1})
    for i in (d..prod.len()).rev() {
        let c = std::mem::replace(&mut prod[i], BigUint::zero());
        if c.is_zero() {
            continue;
        }
        for j in 0..d {
            if poly[j].is_zero() {
                continue;
            }
            // subtract c * poly[j] at position i - d + j
            let sub = (&c * &poly[j]) % modulus;
            let idx = i - d + j;
            let cur = &prod[idx] % modulus;
            prod[idx] = if cur >= sub {
                cur - sub
            } else {
                cur + modulus - sub
            };
        }
    }
    while prod.len() < d {
        prod.push(BigUint::zero());
    }
}

/// Inverse of an integral coefficient vector to value precision `want`.
/// Strips the common power of p, reduces an Eisenstein non-unit to a unit by
/// a uniformiser power, then Newton-lifts the residue-field inverse.  All
/// intermediate digit counts are raw (uncapped): only the final value
/// precision is subject to the context cap, via `from_parts`.
fn invert_integral(ctx: &Arc<PadicContext>, coeffs: &[BigUint], want: u32) -> Result<PadicNum> {
    let p = ctx.p_big();
    if coeffs.iter().all(|c| c.is_zero()) {
        return Err(Error::DivisionByZero);
    }
    // strip the common power of p
    let mut work: Vec<BigUint> = coeffs.to_vec();
    let mut s = 0u32;
    while work.iter().all(|c| c.is_zero() || (c % &p).is_zero()) {
        for c in work.iter_mut() {
            if !c.is_zero() {
                *c /= &p;
            }
        }
        s += 1;
    }
    let as_bigint = |v: Vec<BigUint>| -> Vec<BigInt> {
        v.into_iter()
            .map(|c| BigInt::from_biguint(Sign::Plus, c))
            .collect()
    };
    match ctx.kind() {
        ExtKind::Base => {
            let m = want + s;
            let modulus = ctx.p_pow(m);
            let m_int = BigInt::from_biguint(Sign::Plus, modulus.clone());
            let c_int = BigInt::from_biguint(Sign::Plus, &work[0] % &modulus);
            let inv = modinv_bigint(&c_int, &m_int).ok_or(Error::DivisionByZero)?;
            PadicNum::from_parts(ctx, vec![inv], want, s)
        }
        ExtKind::Unramified => {
            let m = want + s;
            let z = newton_invert_raw(ctx, &work, m)?;
            PadicNum::from_parts(ctx, as_bigint(z), want, s)
        }
        ExtKind::Eisenstein => {
            let e = ctx.degree();
            // uniformiser valuation of the p-free part, in [0, e)
            let mut w = usize::MAX;
            for (i, c) in work.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                w = w.min(vp_biguint(c, &p) as usize * e + i);
            }
            if w == 0 {
                let m = want + s;
                let z = newton_invert_raw(ctx, &work, m)?;
                return PadicNum::from_parts(ctx, as_bigint(z), want, s);
            }
            // work * θ^(e-w) = p * V with V a unit, so
            // 1/work = θ^(e-w) * V^(-1) / p.
            let m = want + s + 1;
            let modulus = ctx.p_pow(m + 1);
            let mut theta_pow = vec![BigUint::zero(); e];
            theta_pow[0] = BigUint::one();
            for _ in 0..(e - w) {
                theta_pow.rotate_right(1);
                let wrap = std::mem::replace(&mut theta_pow[0], BigUint::zero());
                if !wrap.is_zero() {
                    // θ^e = -(a_0 + a_1 θ + ...): fold the overflow back in
                    let mut shifted = vec![BigUint::zero(); e + 1];
                    shifted[e] = wrap;
                    let mut tmp = shifted;
                    reduce_by_poly(&mut tmp, ctx, &modulus);
                    for i in 0..e {
                        theta_pow[i] = (&theta_pow[i] + &tmp[i]) % &modulus;
                    }
                }
            }
            let prod = mul_vecs_mod(&work, &theta_pow, ctx, &modulus);
            let mut v_unit = Vec::with_capacity(e);
            for c in &prod {
                if !(c % &p).is_zero() {
                    return Err(Error::Precision(
                        "uniformiser reduction did not clear the residue".into(),
                    ));
                }
                v_unit.push(c / &p);
            }
            let zi = newton_invert_raw(ctx, &v_unit, m)?;
            let small = ctx.p_pow(m);
            let num = mul_vecs_mod(&zi, &theta_pow, ctx, &small);
            PadicNum::from_parts(ctx, as_bigint(num), want, s + 1)
        }
    }
}

/// Newton inversion of a unit vector: seed with the residue-field inverse,
/// then z <- z(2 - az) doubles the digit count each step.  Returns raw
/// coefficients mod p^m, not subject to the context precision cap.
fn newton_invert_raw(
    ctx: &Arc<PadicContext>,
    unit: &[BigUint],
    m: u32,
) -> Result<Vec<BigUint>> {
    let p = ctx.p();
    let pb = ctx.p_big();
    let d = ctx.degree();
    let res: Vec<u64> = unit
        .iter()
        .map(|c| (c % &pb).to_u64().unwrap_or(0))
        .collect();
    let seed = if d == 1 {
        let c = res[0] % p;
        if c == 0 {
            return Err(Error::DivisionByZero);
        }
        vec![fppoly::modinv_u64(c, p)]
    } else {
        let poly_res: Vec<u64> = ctx
            .poly()
            .iter()
            .map(|c| (c % &pb).to_u64().unwrap_or(0))
            .collect();
        fppoly::inverse_mod(&res, &poly_res, p).ok_or(Error::DivisionByZero)?
    };
    let mut z: Vec<BigUint> = seed.into_iter().map(BigUint::from).collect();
    z.resize(d, BigUint::zero());
    let mut digits = 1u32;
    while digits < m {
        digits = (digits * 2).min(m);
        let modulus = ctx.p_pow(digits);
        let az = mul_vecs_mod(unit, &z, ctx, &modulus);
        let mut two_minus = vec![BigUint::zero(); d];
        for i in 0..d {
            let t = &az[i] % &modulus;
            let lead = if i == 0 {
                BigUint::from(2u32)
            } else {
                BigUint::zero()
            };
            two_minus[i] = if lead >= t {
                lead - t
            } else {
                lead + &modulus - t
            };
        }
        z = mul_vecs_mod(&z, &two_minus, ctx, &modulus);
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q5(prec: u32) -> Arc<PadicContext> {
        PadicContext::base(5, prec).unwrap()
    }

    #[test]
    fn half_in_q5_matches_euclid_oracle() {
        // Oracle: extended Euclid gives 2 * 4882813 = 1 mod 5^10.
        let ctx = q5(10);
        let one = PadicNum::one(&ctx);
        let two = PadicNum::from_u64(&ctx, 2);
        let half = one.div(&two).unwrap();
        let expected = PadicNum::from_u64(&ctx, 4_882_813);
        assert!(half.eq_at_prec(&expected, 10).unwrap());
    }

    #[test]
    fn valuation_additive_under_mul() {
        let ctx = q5(12);
        let a = PadicNum::from_u64(&ctx, 50); // v = 2
        let b = PadicNum::from_u64(&ctx, 15); // v = 1
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.valuation(), ValBound::Exact(Val::int(3)));
    }

    #[test]
    fn denominator_bookkeeping() {
        let ctx = q5(10);
        let fifth = PadicNum::from_rational(&ctx, &BigInt::from(1), &BigInt::from(5)).unwrap();
        assert_eq!(fifth.valuation(), ValBound::Exact(Val::int(-1)));
        let one = fifth.mul(&PadicNum::from_u64(&ctx, 5)).unwrap();
        assert!(one.eq_at_prec(&PadicNum::one(&ctx), 9).unwrap());
        assert_eq!(one.denom_exp(), 0, "normalisation strips the denominator");
    }

    #[test]
    fn zero_at_precision_reports_lower_bound() {
        let ctx = q5(6);
        let z = PadicNum::from_bigint(&ctx, &BigInt::from(5u64.pow(6)));
        assert!(z.is_zero_at_prec());
        assert_eq!(z.valuation(), ValBound::AtLeast(Val::int(6)));
    }

    #[test]
    fn precision_drops_through_division_by_p_multiples() {
        let ctx = q5(10);
        let x = PadicNum::from_u64(&ctx, 7);
        let five = PadicNum::from_u64(&ctx, 5);
        let q = x.div(&five).unwrap();
        // 7/5 has valuation -1; absolute precision at most 10 - 2 = 8... the
        // inverse of 5 is known to precision 10 - 2*1 = 8, so q to 8 - 0.
        assert!(q.prec() <= 9);
        let back = q.mul(&five).unwrap();
        assert!(back.eq_at_prec(&x, back.prec()).unwrap());
    }

    #[test]
    fn unramified_field_inverse() {
        let ctx =
            PadicContext::with_poly(5, vec![BigInt::from(2), BigInt::from(0), BigInt::from(1)], 8)
                .unwrap();
        let theta = PadicNum::gen(&ctx).unwrap();
        let x = theta.add(&PadicNum::from_u64(&ctx, 3)).unwrap();
        let xi = x.inv().unwrap();
        let prod = x.mul(&xi).unwrap();
        assert!(prod.eq_at_prec(&PadicNum::one(&ctx), 8).unwrap());
    }

    #[test]
    fn eisenstein_uniformiser_valuation() {
        let ctx =
            PadicContext::with_poly(5, vec![BigInt::from(-5), BigInt::from(0), BigInt::from(1)], 8)
                .unwrap();
        let theta = PadicNum::gen(&ctx).unwrap();
        assert_eq!(theta.valuation(), ValBound::Exact(Val::new(1, 2)));
        let sq = theta.mul(&theta).unwrap();
        assert_eq!(sq.valuation(), ValBound::Exact(Val::int(1)));
        let inv = theta.inv().unwrap();
        assert_eq!(inv.valuation(), ValBound::Exact(Val::new(-1, 2)));
        let prod = theta.mul(&inv).unwrap();
        assert!(prod.eq_at_prec(&PadicNum::one(&ctx), prod.prec()).unwrap());
    }

    #[test]
    fn pow_negative_matches_inverse() {
        let ctx = q5(10);
        let x = PadicNum::from_u64(&ctx, 7);
        let a = x.pow_i64(-3).unwrap();
        let b = x.pow_i64(3).unwrap().inv().unwrap();
        assert!(a.eq_working(&b).unwrap());
    }
}
