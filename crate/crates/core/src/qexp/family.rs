//! Eigenform families as stubs of classical specialisations, and the
//! two-parameter theta twist feeding the anticyclotomic direction.
//!
//! Families are ingested, never computed: a stub carries at least two
//! p-stabilised classical points sharing tame level and character,
//! plus an optional Lambda-expansion whose coefficients live on the
//! weight disc.  Ingestion certifies the expansion against each
//! stabilisation coefficient by coefficient, so a stub that constructs
//! is already a witness of its own coherence.
//!
//! The twist multiplies the n-th coefficient by n^{-(shift+b)} as b
//! moves over the anticyclotomic coordinate.  Only the principal-unit
//! part <n> varies analytically: its exponential series in b is stored
//! as a truncated polynomial with an explicit tail bound.  The
//! Teichmuller part is locally constant, so the base root omega(n) is
//! kept on the side and raised to the integer exponent -(shift+b) only
//! when a specialisation fixes b.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::padic::{log1, teichmuller, PadicContext, PadicNum, Val};
use crate::weight::{IwasawaElem, WeightDisc};

use super::expansion::{QExpansion, WeightTag};
use super::newform::NewformRecord;
use super::stabilize::p_stabilize;

/// The anticyclotomic coordinate: the twist family n^{-(shift+b)}
/// truncated at degree d_max in b.  shift = 1 is the theta depth of
/// the generalised Heegner setting.
#[derive(Clone)]
pub struct CharSpace {
    ctx: Arc<PadicContext>,
    d_max: u32,
    shift: i64,
}

impl CharSpace {
    pub fn new(ctx: &Arc<PadicContext>, d_max: u32, shift: i64) -> Result<Self> {
        if ctx.p() == 2 {
            return Err(Error::Invalid(
                "the anticyclotomic twist assumes p is odd".into(),
            ));
        }
        if d_max == 0 {
            return Err(Error::Invalid("char space needs degree at least 1".into()));
        }
        Ok(CharSpace {
            ctx: ctx.clone(),
            d_max,
            shift,
        })
    }

    /// The standard twist n^{-(1+b)}.
    pub fn anticyclotomic(ctx: &Arc<PadicContext>, d_max: u32) -> Result<Self> {
        CharSpace::new(ctx, d_max, 1)
    }

    pub fn ctx(&self) -> &Arc<PadicContext> {
        &self.ctx
    }
    pub fn d_max(&self) -> u32 {
        self.d_max
    }
    pub fn shift(&self) -> i64 {
        self.shift
    }
}

/// One classical point of a family: an admissible weight, the chosen
/// U_p eigenvalue, and the record it stabilises.
#[derive(Clone)]
pub struct FamilySpec {
    weight: i64,
    alpha: PadicNum,
    record: NewformRecord,
}

impl FamilySpec {
    pub fn new(weight: i64, alpha: PadicNum, record: NewformRecord) -> Result<Self> {
        if weight != record.weight() as i64 {
            return Err(Error::Invalid(format!(
                "spec weight {weight} differs from the record weight {}",
                record.weight()
            )));
        }
        Ok(FamilySpec {
            weight,
            alpha,
            record,
        })
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }
    pub fn alpha(&self) -> &PadicNum {
        &self.alpha
    }
    pub fn record(&self) -> &NewformRecord {
        &self.record
    }
}

/// A family stub: certified classical specialisations on one weight
/// disc, with an optional Lambda-expansion of the stabilised family.
pub struct FamilyStub {
    disc: WeightDisc,
    level: u64,
    specs: Vec<FamilySpec>,
    stabilised: Vec<QExpansion>,
    lambda: Option<Vec<IwasawaElem>>,
    lambda_prec: u32,
}

impl std::fmt::Debug for FamilyStub {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "FamilyStub(level {}, weights {:?}, lambda: {})",
            self.level,
            self.specs.iter().map(FamilySpec::weight).collect::<Vec<_>>(),
            self.lambda.is_some()
        )
    }
}

impl FamilyStub {
    /// Ingest a stub.  The Lambda-expansion, when given, must agree
    /// with every p-stabilised specialisation to lambda_prec digits;
    /// the rejection names each offending coefficient.
    pub fn new(
        disc: &WeightDisc,
        specs: Vec<FamilySpec>,
        lambda: Option<Vec<IwasawaElem>>,
        lambda_prec: u32,
    ) -> Result<Self> {
        if specs.len() < 2 {
            return Err(Error::Invalid(
                "a family stub needs at least two classical specialisations".into(),
            ));
        }
        if lambda_prec == 0 || lambda_prec > disc.ctx().prec_cap() {
            return Err(Error::Invalid(format!(
                "declared precision {lambda_prec} is outside the context range"
            )));
        }
        let level = specs[0].record().level();
        let eps0 = specs[0].record().eps().clone();
        for s in &specs {
            if !Arc::ptr_eq(s.record().ctx(), disc.ctx()) {
                return Err(Error::ContextMismatch(
                    "record context differs from the weight disc".into(),
                ));
            }
            if s.record().level() != level {
                return Err(Error::Invalid(format!(
                    "tame levels {} and {} differ across the stub",
                    level,
                    s.record().level()
                )));
            }
            if !same_char(&eps0, s.record().eps()) {
                return Err(Error::Invalid(
                    "specialisations carry different characters".into(),
                ));
            }
            if !disc.is_admissible(s.weight()) {
                return Err(Error::Inadmissible { k: s.weight() });
            }
        }
        for (i, s) in specs.iter().enumerate() {
            for t in &specs[i + 1..] {
                if s.weight() == t.weight() {
                    return Err(Error::Invalid(format!(
                        "weight {} appears twice in the stub",
                        s.weight()
                    )));
                }
            }
        }
        let mut stabilised = Vec::with_capacity(specs.len());
        for s in &specs {
            stabilised.push(p_stabilize(s.record(), s.alpha())?);
        }
        if let Some(ref lam) = lambda {
            if lam.is_empty() {
                return Err(Error::Invalid("the Lambda-expansion is empty".into()));
            }
            for (i, c) in lam.iter().enumerate() {
                if !same_disc(c.disc(), disc) {
                    return Err(Error::Invalid(format!(
                        "Lambda coefficient of q^{} lives on a different disc",
                        i + 1
                    )));
                }
            }
            for (s, stab) in specs.iter().zip(&stabilised) {
                let mut bad: Vec<String> = Vec::new();
                let reach = lam.len().min(stab.truncation());
                for n in 1..=reach {
                    let got = lam[n - 1].specialize(s.weight())?;
                    if !got.eq_at_prec(stab.an(n), lambda_prec)? {
                        let v = got.sub(stab.an(n))?.valuation();
                        bad.push(format!("q^{n} (difference valuation {v})"));
                    }
                }
                if !bad.is_empty() {
                    let shown = bad.iter().take(5).cloned().collect::<Vec<_>>().join(", ");
                    let more = if bad.len() > 5 {
                        format!(" and {} more", bad.len() - 5)
                    } else {
                        String::new()
                    };
                    return Err(Error::Fixture(format!(
                        "Lambda-expansion disagrees with the weight-{} stabilisation at {shown}{more}",
                        s.weight()
                    )));
                }
            }
        }
        Ok(FamilyStub {
            disc: disc.clone(),
            level,
            specs,
            stabilised,
            lambda,
            lambda_prec,
        })
    }

    /// Build the Lambda-expansion through the stabilised coefficients
    /// by Newton interpolation on the weight coordinate, then ingest.
    /// The disc truncation must hold a polynomial with one node per
    /// specialisation.
    pub fn interpolated(
        disc: &WeightDisc,
        specs: Vec<FamilySpec>,
        lambda_prec: u32,
    ) -> Result<Self> {
        let deg = disc.d_max() as usize + 1;
        if specs.len() > deg {
            return Err(Error::Invalid(format!(
                "{} nodes do not fit a degree-{} truncation",
                specs.len(),
                disc.d_max()
            )));
        }
        let ctx = disc.ctx();
        let mut stabs = Vec::with_capacity(specs.len());
        for s in &specs {
            stabs.push(p_stabilize(s.record(), s.alpha())?);
        }
        let us = specs
            .iter()
            .map(|s| disc.u_of_weight(s.weight()))
            .collect::<Result<Vec<_>>>()?;
        let count = specs.len();
        let reach = stabs.iter().map(|e| e.truncation()).min().unwrap_or(0);
        let mut lambda = Vec::with_capacity(reach);
        for n in 1..=reach {
            let mut table: Vec<PadicNum> = stabs.iter().map(|e| e.an(n).clone()).collect();
            for j in 1..count {
                for i in (j..count).rev() {
                    let num = table[i].sub(&table[i - 1])?;
                    let den = us[i].sub(&us[i - j])?;
                    table[i] = num.div(&den)?;
                }
            }
            let mut coeffs = vec![PadicNum::zero(ctx); deg];
            for i in (0..count).rev() {
                let mut next = vec![PadicNum::zero(ctx); deg];
                for d in 0..deg {
                    if d + 1 < deg {
                        next[d + 1] = next[d + 1].add(&coeffs[d])?;
                    }
                    next[d] = next[d].sub(&coeffs[d].mul(&us[i])?)?;
                }
                next[0] = next[0].add(&table[i])?;
                coeffs = next;
            }
            lambda.push(IwasawaElem::from_coeffs(disc, coeffs)?);
        }
        FamilyStub::new(disc, specs, Some(lambda), lambda_prec)
    }

    pub fn disc(&self) -> &WeightDisc {
        &self.disc
    }
    pub fn level(&self) -> u64 {
        self.level
    }
    pub fn specs(&self) -> &[FamilySpec] {
        &self.specs
    }
    pub fn lambda(&self) -> Option<&[IwasawaElem]> {
        self.lambda.as_deref()
    }
    pub fn lambda_prec(&self) -> u32 {
        self.lambda_prec
    }
    /// The certified p-stabilisation of the i-th specialisation.
    pub fn stabilised(&self, i: usize) -> &QExpansion {
        &self.stabilised[i]
    }
}

fn same_char(a: &crate::cm::DirichletChar, b: &crate::cm::DirichletChar) -> bool {
    a.modulus() == b.modulus()
        && (0..a.modulus() as i64).all(|x| a.exp_of(x).ok() == b.exp_of(x).ok())
}

fn same_disc(a: &WeightDisc, b: &WeightDisc) -> bool {
    Arc::ptr_eq(a.ctx(), b.ctx()) && a.k0() == b.k0() && a.r() == b.r() && a.d_max() == b.d_max()
}

/// One coefficient of the twisted family: the weight polynomial, the
/// wild series of <n>^{-(shift+b)} in b with its tail bound, and the
/// Teichmuller base omega(n).
struct TwistCoeff {
    u_part: IwasawaElem,
    wild: Vec<PadicNum>,
    wild_tail: Val,
    teich: PadicNum,
}

/// The depleted family twisted by n^{-(shift+b)}: coefficients in the
/// two-variable truncated ring over (weight coordinate, anticyclotomic
/// coordinate), with p-divisible indices dropped.
pub struct FamilyTwist {
    space: CharSpace,
    disc: WeightDisc,
    level: u64,
    coeffs: Vec<Option<TwistCoeff>>,
}

/// Twist the stub's Lambda-expansion coefficient-wise.  Requires the
/// expansion to be present; the result stores a_n(F) n^{-(shift+b)}
/// for p prime to n and zero otherwise.
pub fn family_theta_twist(stub: &FamilyStub, space: &CharSpace) -> Result<FamilyTwist> {
    let lambda = stub.lambda().ok_or_else(|| {
        Error::Invalid("the family stub carries no Lambda-expansion to twist".into())
    })?;
    let ctx = stub.disc().ctx();
    if !Arc::ptr_eq(space.ctx(), ctx) {
        return Err(Error::ContextMismatch(
            "char space context differs from the family".into(),
        ));
    }
    let p = ctx.p();
    let d_max = space.d_max() as usize;
    let mut coeffs = Vec::with_capacity(lambda.len());
    for (i, lam) in lambda.iter().enumerate() {
        let n = (i + 1) as u64;
        if n % p == 0 {
            coeffs.push(None);
            continue;
        }
        let nn = PadicNum::from_u64(ctx, n);
        let teich = teichmuller(&nn)?;
        let principal = nn.div(&teich)?;
        let log = log1(&principal)?;
        let mut wild = Vec::with_capacity(d_max + 1);
        let mut term = principal.pow_i64(-space.shift())?;
        wild.push(term.clone());
        for j in 1..=d_max {
            term = term
                .mul(&log.neg())?
                .div(&PadicNum::from_u64(ctx, j as u64))?;
            wild.push(term.clone());
        }
        // terms beyond d_max have valuation at least
        // J v(log) - (J-1)/(p-1) with J = d_max + 1, increasing in J
        // because v(log) >= 1 > 1/(p-1).
        let big_j = (d_max + 1) as i64;
        let wild_tail = log
            .valuation()
            .lower()
            .scale(big_j)
            .add(&Val::new(-(big_j - 1), p as u32 - 1));
        coeffs.push(Some(TwistCoeff {
            u_part: lam.clone(),
            wild,
            wild_tail,
            teich,
        }));
    }
    Ok(FamilyTwist {
        space: space.clone(),
        disc: stub.disc().clone(),
        level: stub.level() * p * p,
        coeffs,
    })
}

impl FamilyTwist {
    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }
    pub fn level(&self) -> u64 {
        self.level
    }
    pub fn space(&self) -> &CharSpace {
        &self.space
    }
    pub fn disc(&self) -> &WeightDisc {
        &self.disc
    }

    /// The two-variable coefficient of q^n as a matrix over
    /// (weight power, anticyclotomic power); None on depleted indices.
    /// The Teichmuller tag is not part of the matrix.
    pub fn matrix(&self, n: usize) -> Option<Vec<Vec<PadicNum>>> {
        assert!(n >= 1 && n <= self.coeffs.len(), "q^{n} outside truncation");
        let c = self.coeffs[n - 1].as_ref()?;
        let rows = c
            .u_part
            .coeffs()
            .iter()
            .map(|a| {
                c.wild
                    .iter()
                    .map(|b| a.mul(b))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
            .ok()?;
        Some(rows)
    }

    /// Specialise the twist at an admissible weight k and an integer
    /// anticyclotomic point b.  Precision is capped by the wild tail
    /// bound; the Teichmuller part is raised to -(shift+b) exactly.
    pub fn specialize(&self, k: i64, b: i64) -> Result<QExpansion> {
        let ctx = self.disc.ctx();
        let bb = PadicNum::from_i64(ctx, b);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let c = match c {
                None => {
                    out.push(PadicNum::zero(ctx));
                    continue;
                }
                Some(c) => c,
            };
            let u_val = c.u_part.specialize(k)?;
            let mut wild = PadicNum::zero(ctx);
            for t in c.wild.iter().rev() {
                wild = wild.mul(&bb)?.add(t)?;
            }
            let cap = c.wild_tail.floor();
            if cap <= 0 {
                return Err(Error::Precision(format!(
                    "wild tail bound {} consumes all precision",
                    c.wild_tail
                )));
            }
            let wild = wild.with_prec(wild.prec().min(cap as u32))?;
            let teich = c.teich.pow_i64(-(self.space.shift() + b))?;
            out.push(u_val.mul(&wild)?.mul(&teich)?);
        }
        QExpansion::new(ctx, out, WeightTag::Family, self.level)
    }
}
