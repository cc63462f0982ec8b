//! Validated newform records.
//!
//! A record is ingested, never computed: construction checks that
//! a_1 = 1, that coefficients are multiplicative on coprime pairs up
//! to the square root of the truncation, and that prime powers away
//! from the level obey the Hecke recursion
//! a_{l^{r+1}} = a_l a_{l^r} - eps(l) l^{w-1} a_{l^{r-1}}.
//! Downstream consumers rely on the eigen-structure without
//! re-deriving it.  Two built-in sources cover the classical range:
//! the weight-2 level-11 eta product and a seeded synthetic eigenform
//! whose prime coefficients are drawn at random and extended by the
//! same recursion.
//!
//! The JSON form carries rational coefficient data as decimal strings
//! ("a" or "a/b") and the character as its exponent table against the
//! group's zeta_E, so a file round-trips into the exact same p-adic
//! values in the declared context.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use super::expansion::{QExpansion, WeightTag};
use crate::cm::{factorize, DirichletChar, DirichletGroup};
use crate::error::{Error, Result};
use crate::padic::{ExtKind, PadicContext, PadicNum};

/// A cuspidal eigenform given by its first M coefficients over a
/// p-adic coefficient context, with level, weight, and nebentypus.
#[derive(Clone)]
pub struct NewformRecord {
    label: String,
    level: u64,
    weight: u32,
    eps: DirichletChar,
    coeffs: Vec<PadicNum>,
    ctx: Arc<PadicContext>,
}

impl std::fmt::Debug for NewformRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "NewformRecord({}, level {}, weight {}, {} coefficients)",
            self.label,
            self.level,
            self.weight,
            self.coeffs.len()
        )
    }
}

impl NewformRecord {
    pub fn new(
        ctx: &Arc<PadicContext>,
        label: &str,
        level: u64,
        weight: u32,
        eps: DirichletChar,
        coeffs: Vec<PadicNum>,
    ) -> Result<Self> {
        if level == 0 {
            return Err(Error::Invalid("level must be positive".into()));
        }
        if weight < 2 {
            return Err(Error::Invalid(format!("weight {weight} is below 2")));
        }
        if coeffs.is_empty() {
            return Err(Error::Invalid("a record needs at least a_1".into()));
        }
        if eps.modulus() != level {
            return Err(Error::Invalid(format!(
                "nebentypus modulus {} differs from the level {}",
                eps.modulus(),
                level
            )));
        }
        for (i, c) in coeffs.iter().enumerate() {
            if !Arc::ptr_eq(c.ctx(), ctx) {
                return Err(Error::ContextMismatch(format!(
                    "coefficient a_{} lives in a different context",
                    i + 1
                )));
            }
        }
        let record = NewformRecord {
            label: label.to_string(),
            level,
            weight,
            eps,
            coeffs,
            ctx: ctx.clone(),
        };
        record.check_eigen_structure()?;
        Ok(record)
    }

    /// a_1 = 1, multiplicativity on coprime pairs below sqrt(M), and
    /// the Hecke recursion at prime powers away from the level.
    fn check_eigen_structure(&self) -> Result<()> {
        let m = self.coeffs.len();
        if !self.an(1).eq_working(&PadicNum::one(&self.ctx))? {
            return Err(Error::Fixture("a_1 is not 1".into()));
        }
        let s = isqrt(m);
        for a in 2..=s {
            for b in (a + 1)..=s {
                if gcd(a as u64, b as u64) != 1 {
                    continue;
                }
                let prod = self.an(a).mul(self.an(b))?;
                if !self.an(a * b).eq_working(&prod)? {
                    return Err(Error::Fixture(format!(
                        "a_{} differs from a_{a} a_{b}",
                        a * b
                    )));
                }
            }
        }
        for l in primes_up_to(m) {
            if self.level % l as u64 == 0 {
                continue;
            }
            let scale = self
                .eps
                .eval_min(l as i64, &self.ctx)?
                .mul(&PadicNum::from_u64(&self.ctx, l as u64).pow_i64(self.weight as i64 - 1)?)?;
            let mut prev = l;
            let mut cur = l * l;
            while cur <= m {
                let expect = self
                    .an(l)
                    .mul(self.an(prev))?
                    .sub(&scale.mul(self.an(prev / l))?)?;
                if !self.an(cur).eq_working(&expect)? {
                    return Err(Error::Fixture(format!(
                        "a_{cur} breaks the Hecke recursion at {l}"
                    )));
                }
                prev = cur;
                match cur.checked_mul(l) {
                    Some(next) => cur = next,
                    None => break,
                }
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn level(&self) -> u64 {
        self.level
    }
    pub fn weight(&self) -> u32 {
        self.weight
    }
    pub fn eps(&self) -> &DirichletChar {
        &self.eps
    }
    pub fn ctx(&self) -> &Arc<PadicContext> {
        &self.ctx
    }
    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }
    /// Coefficient of q^n, 1-based; n must lie within the truncation.
    pub fn an(&self, n: usize) -> &PadicNum {
        assert!(n >= 1 && n <= self.coeffs.len(), "q^{n} outside truncation");
        &self.coeffs[n - 1]
    }

    pub fn to_expansion(&self) -> QExpansion {
        QExpansion::new(
            &self.ctx,
            self.coeffs.clone(),
            WeightTag::Int(self.weight as i64),
            self.level,
        )
        .expect("a validated record always converts")
    }
}

/// The weight-2 level-11 form, derived from its eta-product expansion
/// q prod_{n>=1} (1 - q^n)^2 (1 - q^{11n})^2 by exact integer
/// polynomial arithmetic, then validated like any ingested record.
pub fn eta_square_11(ctx: &Arc<PadicContext>, m: usize) -> Result<NewformRecord> {
    if m == 0 {
        return Err(Error::Invalid("truncation must be positive".into()));
    }
    let mut g = vec![0i64; m];
    g[0] = 1;
    for d in 1..m {
        for _ in 0..2 {
            for i in (d..m).rev() {
                g[i] -= g[i - d];
            }
        }
    }
    for d in 1..m {
        let dd = 11 * d;
        if dd >= m {
            break;
        }
        for _ in 0..2 {
            for i in (dd..m).rev() {
                g[i] -= g[i - dd];
            }
        }
    }
    let coeffs = g.iter().map(|&c| PadicNum::from_i64(ctx, c)).collect();
    let eps = DirichletGroup::new(11)?.trivial();
    NewformRecord::new(ctx, "11.2.a.a", 11, 2, eps, coeffs)
}

/// A synthetic eigenform with trivial nebentypus: prime coefficients
/// are seeded draws (kept a unit at the context prime so the form is
/// ordinary there), prime powers follow the Hecke recursion, and
/// composites are filled in multiplicatively.
pub fn synthetic_record(
    ctx: &Arc<PadicContext>,
    label: &str,
    level: u64,
    weight: u32,
    seed: u64,
    m: usize,
) -> Result<NewformRecord> {
    if m == 0 {
        return Err(Error::Invalid("truncation must be positive".into()));
    }
    let p = ctx.p();
    let mut rng = StdRng::seed_from_u64(seed);
    let eps = DirichletGroup::new(level)?.trivial();
    let mut a: Vec<PadicNum> = vec![PadicNum::zero(ctx); m + 1];
    a[1] = PadicNum::one(ctx);
    for l in primes_up_to(m) {
        let mut c: i64 = rng.gen_range(-999..1000);
        if l as u64 == p && c.rem_euclid(p as i64) == 0 {
            c += 1;
        }
        a[l] = PadicNum::from_i64(ctx, c);
        let scale = eps
            .eval_min(l as i64, ctx)?
            .mul(&PadicNum::from_u64(ctx, l as u64).pow_i64(weight as i64 - 1)?)?;
        let mut prev = l;
        let mut cur = l * l;
        while cur <= m {
            a[cur] = a[l].mul(&a[prev])?.sub(&scale.mul(&a[prev / l])?)?;
            prev = cur;
            match cur.checked_mul(l) {
                Some(next) => cur = next,
                None => break,
            }
        }
    }
    for n in 2..=m {
        let fac = factorize(n as u64);
        if fac.len() < 2 {
            continue;
        }
        let mut acc = PadicNum::one(ctx);
        for (l, e) in fac {
            acc = acc.mul(&a[l.pow(e) as usize])?;
        }
        a[n] = acc;
    }
    NewformRecord::new(ctx, label, level, weight, eps, a.split_off(1))
}

/// Serialise a record whose coefficients are plain p-adic rationals.
pub fn newform_to_json(f: &NewformRecord) -> Result<Value> {
    let ctx = f.ctx();
    let degree = match ctx.kind() {
        ExtKind::Base => 1usize,
        ExtKind::Unramified => ctx.degree(),
        ExtKind::Eisenstein => {
            return Err(Error::Invalid(
                "JSON records support base and unramified contexts only".into(),
            ))
        }
    };
    let mut an = Vec::with_capacity(f.truncation());
    for n in 1..=f.truncation() {
        let (digits, _, denom) = f.an(n).parts();
        if digits.iter().skip(1).any(|d| !d.is_zero()) {
            return Err(Error::Invalid(format!(
                "a_{n} is not rational over the base field"
            )));
        }
        if denom == 0 {
            an.push(digits[0].to_string());
        } else {
            let den = BigInt::from(ctx.p()).pow(denom);
            an.push(format!("{}/{}", digits[0], den));
        }
    }
    let modulus = f.eps().modulus();
    let table: Vec<Value> = (0..modulus as i64)
        .map(|x| match f.eps().exp_of(x) {
            Ok(k) => json!(k),
            Err(_) => Value::Null,
        })
        .collect();
    Ok(json!({
        "label": f.label(),
        "level": f.level(),
        "weight": f.weight(),
        "eps": { "modulus": modulus, "valueTable": table },
        "an": an,
        "context": { "p": ctx.p(), "degree": degree, "prec": ctx.prec_cap() },
    }))
}

pub fn newform_from_json(v: &Value) -> Result<NewformRecord> {
    let label = str_field(v, "label")?;
    let level = u64_field(v, "level")?;
    let weight = u64_field(v, "weight")? as u32;
    let cv = v
        .get("context")
        .ok_or_else(|| Error::Invalid("record lacks a context".into()))?;
    let p = u64_field(cv, "p")?;
    let degree = u64_field(cv, "degree")?;
    let prec = u64_field(cv, "prec")? as u32;
    let ctx = if degree <= 1 {
        PadicContext::base(p, prec)?
    } else {
        PadicContext::unramified(p, degree as u32, prec)?
    };
    let ev = v
        .get("eps")
        .ok_or_else(|| Error::Invalid("record lacks a nebentypus".into()))?;
    let modulus = u64_field(ev, "modulus")?;
    let table = ev
        .get("valueTable")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Invalid("nebentypus lacks a value table".into()))?;
    if table.len() != modulus as usize {
        return Err(Error::Invalid(format!(
            "value table has {} entries for modulus {}",
            table.len(),
            modulus
        )));
    }
    let group = DirichletGroup::new(modulus)?;
    let eps = group
        .characters()
        .into_iter()
        .find(|c| {
            (0..modulus as i64).all(|x| match c.exp_of(x) {
                Ok(k) => table[x as usize].as_u64() == Some(k),
                Err(_) => table[x as usize].is_null(),
            })
        })
        .ok_or_else(|| Error::Invalid("value table matches no character of the modulus".into()))?;
    let an = v
        .get("an")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Invalid("record lacks coefficients".into()))?;
    let mut coeffs = Vec::with_capacity(an.len());
    for (i, entry) in an.iter().enumerate() {
        let s = entry
            .as_str()
            .ok_or_else(|| Error::Invalid(format!("a_{} is not a string", i + 1)))?;
        coeffs.push(parse_coeff(&ctx, s)?);
    }
    NewformRecord::new(&ctx, &label, level, weight, eps, coeffs)
}

fn parse_coeff(ctx: &Arc<PadicContext>, s: &str) -> Result<PadicNum> {
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let bad = || Error::Invalid(format!("unreadable coefficient {s}"));
    let a = BigInt::parse_bytes(num.trim().as_bytes(), 10).ok_or_else(bad)?;
    let b = BigInt::parse_bytes(den.trim().as_bytes(), 10).ok_or_else(bad)?;
    PadicNum::from_rational(ctx, &a, &b)
}

fn str_field(v: &Value, key: &str) -> Result<String> {
    v.get(key)
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| Error::Invalid(format!("missing string field {key}")))
}

fn u64_field(v: &Value, key: &str) -> Result<u64> {
    v.get(key)
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Invalid(format!("missing numeric field {key}")))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn isqrt(n: usize) -> usize {
    let mut s = 0usize;
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    s
}

fn primes_up_to(m: usize) -> Vec<usize> {
    let mut sieve = vec![true; m + 1];
    let mut out = Vec::new();
    for n in 2..=m {
        if sieve[n] {
            out.push(n);
            let mut k = n * n;
            while k <= m {
                sieve[k] = false;
                k += n;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx5() -> Arc<PadicContext> {
        PadicContext::base(5, 10).unwrap()
    }

    #[test]
    fn the_eta_product_gives_the_level_eleven_form() {
        let ctx = ctx5();
        let f = eta_square_11(&ctx, 200).unwrap();
        let expected = [1i64, -2, -1, 2, 1, 2, -2, 0, -2, -2];
        for (n, &e) in expected.iter().enumerate() {
            assert!(f
                .an(n + 1)
                .eq_working(&PadicNum::from_i64(&ctx, e))
                .unwrap());
        }
        assert_eq!(f.level(), 11);
        assert_eq!(f.weight(), 2);
        assert_eq!(f.to_expansion().weight(), WeightTag::Int(2));
    }

    #[test]
    fn corrupted_coefficients_are_caught() {
        let ctx = ctx5();
        let f = eta_square_11(&ctx, 60).unwrap();
        let eps = DirichletGroup::new(11).unwrap().trivial();

        let mut broken_mult: Vec<PadicNum> = (1..=60).map(|n| f.an(n).clone()).collect();
        broken_mult[5] = broken_mult[5].add(&PadicNum::one(&ctx)).unwrap();
        let err = NewformRecord::new(&ctx, "x", 11, 2, eps.clone(), broken_mult).unwrap_err();
        assert!(matches!(err, Error::Fixture(ref s) if s.contains("a_6")));

        let mut broken_rec: Vec<PadicNum> = (1..=60).map(|n| f.an(n).clone()).collect();
        broken_rec[3] = broken_rec[3].add(&PadicNum::one(&ctx)).unwrap();
        let err = NewformRecord::new(&ctx, "x", 11, 2, eps, broken_rec).unwrap_err();
        assert!(matches!(err, Error::Fixture(_)));
    }

    #[test]
    fn json_round_trips_into_the_same_values() {
        let ctx = ctx5();
        let f = eta_square_11(&ctx, 80).unwrap();
        let v = newform_to_json(&f).unwrap();
        let g = newform_from_json(&v).unwrap();
        assert_eq!(g.label(), f.label());
        assert_eq!(g.level(), f.level());
        assert_eq!(g.weight(), f.weight());
        assert_eq!(g.truncation(), f.truncation());
        for n in 1..=f.truncation() {
            // contexts are distinct arcs, so compare through parts
            let (da, pa, xa) = f.an(n).parts();
            let (db, pb, xb) = g.an(n).parts();
            assert_eq!((da, pa, xa), (db, pb, xb));
        }
        for x in 0..11 {
            assert_eq!(
                f.eps().exp_of(x).ok(),
                g.eps().exp_of(x).ok()
            );
        }
    }

    #[test]
    fn synthetic_records_validate_at_high_weight() {
        let ctx = PadicContext::base(5, 12).unwrap();
        let f = synthetic_record(&ctx, "synthetic-22", 11, 22, 4242, 200).unwrap();
        assert!(f.an(1).eq_working(&PadicNum::one(&ctx)).unwrap());
        let v = f.an(5).valuation();
        assert!(v.is_exact());
        assert_eq!(v.lower(), crate::padic::Val::int(0));
    }

    #[test]
    fn a_nebentypus_off_the_level_is_rejected() {
        let ctx = ctx5();
        let f = eta_square_11(&ctx, 30).unwrap();
        let eps13 = DirichletGroup::new(13).unwrap().trivial();
        let coeffs = (1..=30).map(|n| f.an(n).clone()).collect();
        let err = NewformRecord::new(&ctx, "x", 11, 2, eps13, coeffs).unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
    }
}
