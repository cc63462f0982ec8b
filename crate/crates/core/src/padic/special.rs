//! Transcendental maps on p-adic units: Teichmüller lift, logarithm and
//! exponential on principal units, p-adic powers, and root extraction.
//!
//! Series are summed with exact rational stopping bounds.  For v(u) >
//! 1/(p-1) both log(1+u) and exp(u) preserve absolute precision: the term
//! u^n/n! (resp. u^n/n) has valuation at least n*v - (n-1)/(p-1), an
//! increasing envelope, and the same bound controls error propagation.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::context::{ExtKind, PadicContext};
use super::num::{PadicNum, Val, ValBound};
use crate::error::{Error, Result};

/// Prime factorisation by trial division; fine for the 64-bit moduli and
/// group orders that appear here.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn vp_u64(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n > 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Teichmüller lift: the root of unity of order dividing q-1 congruent to
/// the given unit modulo the maximal ideal.  Iterates x -> x^q, which fixes
/// the limit and contracts towards it.
pub fn teichmuller(x: &PadicNum) -> Result<PadicNum> {
    let ctx = x.ctx().clone();
    match x.valuation() {
        ValBound::Exact(v) if v == Val::int(0) => {}
        _ => {
            return Err(Error::Invalid(
                "Teichmüller lift requires a unit".into(),
            ))
        }
    }
    let q = ctx.residue_size();
    let mut z = x.clone();
    // f digits per step unramified, at least one digit per e steps ramified
    let max_iter = (ctx.prec_cap() as u64 * ctx.ram_index() as u64
        / ctx.res_degree() as u64
        + 4) as u32;
    for _ in 0..max_iter {
        let znew = z.pow_biguint(&q)?;
        if znew.eq_working(&z)? {
            return Ok(znew);
        }
        z = znew;
    }
    Err(Error::Convergence(
        "Teichmüller iteration did not stabilise".into(),
    ))
}

fn min_series_val(ctx: &PadicContext) -> Val {
    // strict threshold 1/(p-1)
    Val::new(1, (ctx.p() - 1) as u32)
}

/// Envelope bound: terms of index >= m in both series have valuation at
/// least m*v - (m-1)/(p-1), which increases in m once v > 1/(p-1).
fn envelope(v: Val, m: i64, p: u64) -> Val {
    v.scale(m).add(&Val::new(-(m - 1), (p - 1) as u32))
}

/// log(x) for x a principal unit with v(x-1) > 1/(p-1).  No precision loss.
pub fn log1(x: &PadicNum) -> Result<PadicNum> {
    let ctx = x.ctx().clone();
    let u = x.sub(&PadicNum::one(&ctx))?;
    let target = Val::int(u.prec() as i64);
    let v = match u.valuation() {
        ValBound::Exact(v) => v,
        // u is zero at precision: log is zero at the same precision
        ValBound::AtLeast(_) => return u.with_prec(u.prec()),
    };
    if v <= min_series_val(&ctx) {
        return Err(Error::Convergence(format!(
            "log series needs v(x-1) > 1/(p-1); got {v}"
        )));
    }
    let p = ctx.p();
    let mut sum = PadicNum::zero(&ctx);
    let mut upow = u.clone();
    let mut n: i64 = 1;
    loop {
        let recip_n =
            PadicNum::from_rational(&ctx, &BigInt::one(), &BigInt::from(n))?;
        let term = upow.mul(&recip_n)?;
        sum = if n % 2 == 1 {
            sum.add(&term)?
        } else {
            sum.sub(&term)?
        };
        n += 1;
        if envelope(v, n, p) >= target {
            break;
        }
        upow = upow.mul(&u)?;
    }
    sum.with_prec(u.prec())
}

/// exp(u) for v(u) > 1/(p-1).  No precision loss.
pub fn exp1(u: &PadicNum) -> Result<PadicNum> {
    let ctx = u.ctx().clone();
    let target = Val::int(u.prec() as i64);
    let v = match u.valuation() {
        ValBound::Exact(v) => v,
        ValBound::AtLeast(_) => {
            // exp(0 + O(p^N)) = 1 + O(p^N)
            return PadicNum::one(&ctx).with_prec(u.prec());
        }
    };
    if v <= min_series_val(&ctx) {
        return Err(Error::Convergence(format!(
            "exp series needs v(u) > 1/(p-1); got {v}"
        )));
    }
    let p = ctx.p();
    let mut sum = PadicNum::one(&ctx);
    let mut term = PadicNum::one(&ctx);
    let mut n: i64 = 1;
    loop {
        let recip_n =
            PadicNum::from_rational(&ctx, &BigInt::one(), &BigInt::from(n))?;
        term = term.mul(u)?.mul(&recip_n)?;
        sum = sum.add(&term)?;
        n += 1;
        if envelope(v, n, p) >= target {
            break;
        }
    }
    sum.with_prec(u.prec())
}

/// x^s for x a principal unit with v(x-1) > 1/(p-1) and s integral
/// (an exact rational with no p in the denominator also works).
pub fn unit_power(x: &PadicNum, s: &PadicNum) -> Result<PadicNum> {
    let lx = log1(x)?;
    exp1(&s.mul(&lx)?)
}

/// n-th root, n >= 1.  The valuation must be divisible by n in the value
/// group; the Teichmüller part must be an n-th power in the cyclic group of
/// order q-1; the principal part must clear the wild obstruction
/// v(log) > a + 1/(p-1) where p^a is the p-part of n.
pub fn nth_root(x: &PadicNum, n: u64) -> Result<PadicNum> {
    if n == 0 {
        return Err(Error::Invalid("0-th root".into()));
    }
    if n == 1 {
        return Ok(x.clone());
    }
    let ctx = x.ctx().clone();
    let v = match x.valuation() {
        ValBound::Exact(v) => v,
        ValBound::AtLeast(_) => {
            return Err(Error::NoRoot(
                "cannot take a root of zero at working precision".into(),
            ))
        }
    };
    // valuation in uniformiser units
    let e = ctx.ram_index() as i64;
    let vnum = v.num * (e / v.den as i64);
    if vnum % n as i64 != 0 {
        return Err(Error::NoRoot(format!(
            "valuation {v} is not divisible by {n}"
        )));
    }
    // strip the uniformiser power
    let (unit, restore) = strip_uniformiser(x, vnum, &ctx)?;
    let root_val = vnum / n as i64;

    let omega = teichmuller(&unit)?;
    let principal = unit.div(&omega)?;

    // tame + wild split of n
    let p = ctx.p();
    let a = vp_u64(n, p);
    let tame = n / p.pow(a);

    // principal part
    let l = log1(&principal)?;
    let wild_root = match l.valuation() {
        ValBound::AtLeast(b) => {
            // principal = 1 + O(p^b): the root is 1 + O(p^(b - a))
            let red = b.add(&Val::int(-(a as i64))).floor();
            if red <= 0 {
                return Err(Error::Precision(
                    "not enough precision to certify the wild root".into(),
                ));
            }
            PadicNum::one(&ctx).with_prec(red as u32)?
        }
        ValBound::Exact(lv) => {
            let shifted_v = lv.add(&Val::int(-(a as i64)));
            if shifted_v <= min_series_val(&ctx) {
                return Err(Error::NoRoot(format!(
                    "wild obstruction: v(log) = {lv} does not exceed {} + 1/(p-1)",
                    a
                )));
            }
            let divided = l
                .shift_p(-(a as i64))?
                .mul(&PadicNum::from_rational(&ctx, &BigInt::one(), &BigInt::from(tame))?)?;
            exp1(&divided)?
        }
    };

    // Teichmüller part: root in the cyclic group of order q-1
    let omega_root = cyclic_root(&omega, n, &ctx)?;

    let unit_root = omega_root.mul(&wild_root)?;
    let full = restore_uniformiser(&unit_root, root_val, &ctx)?;
    let _ = restore;

    // confirm at the root's own precision
    let check = full.pow_i64(n as i64)?;
    let t = check.prec().min(x.prec());
    if !check.eq_at_prec(x, t)? {
        return Err(Error::NoRoot(
            "candidate root failed verification".into(),
        ));
    }
    Ok(full)
}

pub fn sqrt(x: &PadicNum) -> Result<PadicNum> {
    nth_root(x, 2)
}

fn strip_uniformiser(
    x: &PadicNum,
    vnum: i64,
    ctx: &Arc<PadicContext>,
) -> Result<(PadicNum, i64)> {
    if vnum == 0 {
        return Ok((x.clone(), 0));
    }
    match ctx.kind() {
        ExtKind::Eisenstein => {
            let theta = PadicNum::gen(ctx)?;
            Ok((x.mul(&theta.pow_i64(-vnum)?)?, vnum))
        }
        _ => Ok((x.shift_p(-vnum)?, vnum)),
    }
}

fn restore_uniformiser(
    x: &PadicNum,
    vnum: i64,
    ctx: &Arc<PadicContext>,
) -> Result<PadicNum> {
    if vnum == 0 {
        return Ok(x.clone());
    }
    match ctx.kind() {
        ExtKind::Eisenstein => {
            let theta = PadicNum::gen(ctx)?;
            x.mul(&theta.pow_i64(vnum)?)
        }
        _ => x.shift_p(vnum),
    }
}

/// Solve y^n = omega inside the cyclic group of (q-1)-th roots of unity,
/// prime by prime: factors of n away from q-1 invert by exponentiation;
/// each remaining prime power applies the cyclic-root step.
fn cyclic_root(omega: &PadicNum, n: u64, ctx: &Arc<PadicContext>) -> Result<PadicNum> {
    let mut cur = omega.clone();
    for (l, mult) in factor_u64(n) {
        for _ in 0..mult {
            cur = cyclic_prime_root(&cur, l, ctx)?;
        }
    }
    Ok(cur)
}

/// One l-th root in the cyclic group of order q-1 (l prime).
fn cyclic_prime_root(u: &PadicNum, l: u64, ctx: &Arc<PadicContext>) -> Result<PadicNum> {
    let q1 = &ctx.residue_size() - BigUint::one();
    let lb = BigUint::from(l);
    if (&q1 % &lb) != BigUint::zero() {
        // l is invertible mod q-1: unique root by inverse exponent
        let linv = modinv_biguint(&lb, &q1).ok_or_else(|| {
            Error::Invalid("prime unexpectedly divides the group order".into())
        })?;
        return u.pow_biguint(&linv);
    }
    // l-part of q-1
    let mut m = q1.clone();
    let mut t = 0u32;
    while (&m % &lb) == BigUint::zero() {
        m /= &lb;
        t += 1;
    }
    // necessary and sufficient: u^((q-1)/l) = 1
    let cond = u.pow_biguint(&(&q1 / &lb))?;
    let one = PadicNum::one(ctx);
    if !cond.eq_working(&one)? {
        return Err(Error::NoRoot(format!(
            "Teichmüller part is not an {l}-th power in the residue group"
        )));
    }
    // x0 = u^(l^{-1} mod m); then x0^l = u * A with A in the l-Sylow part
    let linv_m = modinv_biguint(&lb, &m)
        .ok_or_else(|| Error::Invalid("l not invertible mod the prime-to-l part".into()))?;
    let x0 = u.pow_biguint(&linv_m)?;
    let a_elem = x0.pow_i64(l as i64)?.div(u)?;
    // generator of the l-Sylow subgroup
    let zeta = sylow_generator(ctx, l, t, &m)?;
    // dlog of A in <zeta>, digit by digit
    let d = sylow_dlog(&a_elem, &zeta, l, t, ctx)?;
    if d % l != 0 {
        return Err(Error::NoRoot(
            "sylow discrete log is not divisible by the root degree".into(),
        ));
    }
    let corr = zeta.pow_biguint(&BigUint::from(l.pow(t) as u64 - d / l))?;
    x0.mul(&corr)
}

/// An element of exact order l^t inside the group of (q-1)-th roots of
/// unity, by a deterministic sweep of residue-field representatives.
fn sylow_generator(
    ctx: &Arc<PadicContext>,
    l: u64,
    t: u32,
    m: &BigUint,
) -> Result<PadicNum> {
    let one = PadicNum::one(ctx);
    let lt_over_l = BigUint::from(l).pow(t - 1);
    for idx in 2u64..20_000 {
        let cand = residue_candidate(ctx, idx)?;
        if cand.is_zero_at_prec() {
            continue;
        }
        if !matches!(cand.valuation(), ValBound::Exact(v) if v == Val::int(0)) {
            continue;
        }
        let z = teichmuller(&cand)?;
        let zeta = z.pow_biguint(m)?;
        // zeta has order dividing l^t; exact order l^t iff zeta^(l^(t-1)) != 1
        let probe = zeta.pow_biguint(&lt_over_l)?;
        if !probe.eq_working(&one)? {
            return Ok(zeta);
        }
    }
    Err(Error::Convergence(
        "no Sylow generator found in the candidate sweep".into(),
    ))
}

/// Build the idx-th residue-field representative from base-p digits.
fn residue_candidate(ctx: &Arc<PadicContext>, idx: u64) -> Result<PadicNum> {
    let p = ctx.p();
    let d = ctx.degree();
    let mut digits = Vec::with_capacity(d);
    let mut rest = idx;
    for _ in 0..d {
        digits.push(BigInt::from(rest % p));
        rest /= p;
    }
    if rest > 0 {
        // beyond the field size: wrap to keep the sweep going
        digits[0] += BigInt::from(rest % p);
    }
    PadicNum::from_parts(ctx, digits, ctx.prec_cap(), 0)
}

/// Discrete log of `a` with respect to `zeta` of order l^t, by the
/// digit-peeling reduction to logs in the subgroup of order l.
fn sylow_dlog(
    a: &PadicNum,
    zeta: &PadicNum,
    l: u64,
    t: u32,
    ctx: &Arc<PadicContext>,
) -> Result<u64> {
    let one = PadicNum::one(ctx);
    // table of powers of the order-l element zeta^(l^(t-1))
    let base = zeta.pow_biguint(&BigUint::from(l).pow(t - 1))?;
    let mut table = Vec::with_capacity(l as usize);
    let mut acc = one.clone();
    for _ in 0..l {
        table.push(acc.clone());
        acc = acc.mul(&base)?;
    }
    let order = l.pow(t);
    let mut d = 0u64;
    let mut cur = a.clone();
    for i in 0..t {
        // cur = zeta^(remaining); its l^(t-1-i)-th power lies in <base>
        let probe = cur.pow_biguint(&BigUint::from(l).pow(t - 1 - i))?;
        let mut digit = None;
        for (j, tv) in table.iter().enumerate() {
            if probe.eq_working(tv)? {
                digit = Some(j as u64);
                break;
            }
        }
        let digit = digit.ok_or_else(|| {
            Error::Convergence("sylow dlog probe missed the power table".into())
        })?;
        d += digit * l.pow(i);
        // strip the recovered digit
        let strip = zeta.pow_biguint(&BigUint::from(order - digit * l.pow(i)))?;
        cur = cur.mul(&strip)?;
    }
    Ok(d % order)
}

/// A primitive M-th root of unity, when the field contains one
/// (equivalently M | q-1; p is odd so there is no wild part).
pub fn root_of_unity(ctx: &Arc<PadicContext>, m_order: u64) -> Result<PadicNum> {
    if m_order == 0 {
        return Err(Error::Invalid("root of unity of order 0".into()));
    }
    let one = PadicNum::one(ctx);
    if m_order == 1 {
        return Ok(one);
    }
    let q1 = &ctx.residue_size() - BigUint::one();
    let mb = BigUint::from(m_order);
    if (&q1 % &mb) != BigUint::zero() {
        return Err(Error::MissingRoot(m_order));
    }
    let cof = &q1 / &mb;
    let primes = factor_u64(m_order);
    for idx in 2u64..20_000 {
        let cand = residue_candidate(ctx, idx)?;
        if cand.is_zero_at_prec() {
            continue;
        }
        if !matches!(cand.valuation(), ValBound::Exact(v) if v == Val::int(0)) {
            continue;
        }
        let z = teichmuller(&cand)?;
        let zeta = z.pow_biguint(&cof)?;
        let mut ok = true;
        for (l, _) in &primes {
            let probe = zeta.pow_biguint(&(&mb / BigUint::from(*l)))?;
            if probe.eq_working(&one)? {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(zeta);
        }
    }
    Err(Error::Convergence(
        "no primitive root of unity found in the candidate sweep".into(),
    ))
}

fn modinv_biguint(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    use num_bigint::Sign;
    let ai = BigInt::from_biguint(Sign::Plus, a.clone());
    let mi = BigInt::from_biguint(Sign::Plus, m.clone());
    super::num::modinv_bigint(&ai, &mi).and_then(|x| x.to_biguint())
}
