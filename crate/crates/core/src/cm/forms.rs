//! Positive definite binary quadratic forms and the ideal class group.
//!
//! A form (a, b, c) of discriminant d = b^2 - 4ac < 0 corresponds to the
//! ideal Z a + Z (-b + sqrt(d))/2; composition of classes is computed on the
//! ideal side (product, then primitive part) and carried back, so the group
//! law inherits its correctness from the ideal arithmetic instead of a
//! transcribed composition recipe.  Reduced representatives satisfy
//! |b| <= a <= c with b >= 0 whenever |b| = a or a = c, one per class.

use std::collections::HashMap;

use super::abelian::{presentation, AbelianPresentation};
use super::field::QuadField;
use super::ideal::QFIdeal;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        let f = QuadForm { a, b, c };
        if a <= 0 || f.disc() >= 0 {
            return Err(Error::Invalid(format!(
                "({a}, {b}, {c}) is not positive definite"
            )));
        }
        Ok(f)
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn content(&self) -> i64 {
        gcd(gcd(self.a.abs(), self.b.abs()), self.c.abs())
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    pub fn is_reduced(&self) -> bool {
        self.b.abs() <= self.a
            && self.a <= self.c
            && (self.b >= 0 || (self.b.abs() < self.a && self.a < self.c))
    }

    /// The reduced representative of the class.
    pub fn reduce(&self) -> QuadForm {
        let (mut a, mut b, mut c) = (self.a, self.b, self.c);
        loop {
            // Normalise b into (-a, a].
            let shift = div_round(b, 2 * a);
            if shift != 0 {
                c += shift * shift * a - shift * b;
                b -= 2 * shift * a;
            }
            if a > c {
                (a, b, c) = (c, -b, a);
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            break;
        }
        QuadForm { a, b, c }
    }
}

/// Quotient rounding b/m to the nearest integer with remainder in (-m/2, m/2].
fn div_round(b: i64, m: i64) -> i64 {
    let q = b.div_euclid(m);
    let r = b.rem_euclid(m);
    if 2 * r > m {
        q + 1
    } else {
        q
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// All reduced primitive forms of discriminant d < 0, sorted.
pub fn reduced_forms(d: i64) -> Result<Vec<QuadForm>> {
    if d >= 0 || d.rem_euclid(4) > 1 {
        return Err(Error::Invalid(format!(
            "{d} is not a negative discriminant"
        )));
    }
    let mut out = Vec::new();
    let mut b = d.rem_euclid(2);
    while b * b <= -d / 3 {
        let m = (b * b - d) / 4;
        let mut a = b.max(1);
        while a * a <= m {
            if m % a == 0 {
                let c = m / a;
                let f = QuadForm { a, b, c };
                if f.is_primitive() {
                    out.push(f);
                    // The opposite class, unless b = -b or the tie-break
                    // rules force b >= 0.
                    if b > 0 && b < a && a < c {
                        out.push(QuadForm { a, b: -b, c });
                    }
                }
            }
            a += 1;
        }
        b += 2;
    }
    out.sort();
    Ok(out)
}

/// The class group of the maximal order, with composition computed through
/// ideal multiplication and the cyclic decomposition certified by the
/// abelian-group engine.
pub struct ClassGroupData {
    field: QuadField,
    forms: Vec<QuadForm>,
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    identity: usize,
    pres: AbelianPresentation,
}

pub fn class_group(field: &QuadField) -> Result<ClassGroupData> {
    let d = field.disc();
    let forms = reduced_forms(d)?;
    let index: HashMap<QuadForm, usize> =
        forms.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let lookup = |f: QuadForm| -> Result<usize> {
        index.get(&f.reduce()).copied().ok_or_else(|| {
            Error::Invalid(format!(
                "class of ({}, {}, {}) missing from the reduced list",
                f.a, f.b, f.c
            ))
        })
    };

    let identity = lookup(QuadForm {
        a: 1,
        b: d.rem_euclid(2),
        c: (d.rem_euclid(2) - d) / 4,
    })?;

    let mut table = vec![vec![0usize; forms.len()]; forms.len()];
    let mut inverse = vec![0usize; forms.len()];
    for (i, fi) in forms.iter().enumerate() {
        inverse[i] = lookup(QuadForm {
            a: fi.a,
            b: -fi.b,
            c: fi.c,
        })?;
        for (j, fj) in forms.iter().enumerate() {
            let prod = form_to_ideal(field, fi)?.mul(&form_to_ideal(field, fj)?)?;
            table[i][j] = lookup(ideal_to_form(&prod)?)?;
        }
    }

    let pres = presentation(forms.len(), identity, &|i, j| table[i][j])?;

    Ok(ClassGroupData {
        field: field.clone(),
        forms,
        table,
        inverse,
        identity,
        pres,
    })
}

impl ClassGroupData {
    pub fn field(&self) -> &QuadField {
        &self.field
    }
    pub fn order(&self) -> usize {
        self.forms.len()
    }
    pub fn forms(&self) -> &[QuadForm] {
        &self.forms
    }
    pub fn identity(&self) -> usize {
        self.identity
    }
    pub fn compose(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }
    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i]
    }
    /// Invariant factors of the group, d_1 | d_2 | ...
    pub fn decomposition(&self) -> &[u64] {
        self.pres.orders()
    }
    pub fn dlog(&self, i: usize) -> &[u64] {
        self.pres.dlog(i)
    }

    /// Index of the class of a form of the right discriminant.
    pub fn class_of_form(&self, f: &QuadForm) -> Result<usize> {
        if f.disc() != self.field.disc() || !f.is_primitive() {
            return Err(Error::Invalid(
                "form does not belong to this class group".into(),
            ));
        }
        let red = f.reduce();
        self.forms
            .binary_search(&red)
            .map_err(|_| Error::Invalid("reduced form missing from the class list".into()))
    }

    /// Index of the class of a nonzero ideal.
    pub fn class_of_ideal(&self, ideal: &QFIdeal) -> Result<usize> {
        self.class_of_form(&ideal_to_form(ideal)?)
    }

    /// One ideal per class with norm coprime to `avoid`, found by steering
    /// each reduced form to an equivalent form whose leading coefficient is
    /// a coprime represented value.
    pub fn representatives_coprime_to(&self, avoid: i64) -> Result<Vec<QFIdeal>> {
        let mut out = Vec::with_capacity(self.forms.len());
        for f in &self.forms {
            let g = steer_coprime(f, avoid)?;
            out.push(form_to_ideal(&self.field, &g)?);
        }
        Ok(out)
    }
}

/// The ideal Z a + Z (-b + sqrt(d))/2 attached to a primitive form.
pub fn form_to_ideal(field: &QuadField, f: &QuadForm) -> Result<QFIdeal> {
    if f.disc() != field.disc() {
        return Err(Error::Invalid("form discriminant mismatch".into()));
    }
    QFIdeal::new(field, 1, f.a, -f.b)
}

/// The form (a, -b, (b^2 - d)/(4a)) of the primitive part of an ideal.
pub fn ideal_to_form(ideal: &QFIdeal) -> Result<QuadForm> {
    let d = ideal.field().disc();
    let (a, b) = (ideal.a(), ideal.b());
    QuadForm::new(a, -b, (b * b - d) / (4 * a))
}

/// An equivalent form whose leading coefficient is coprime to `avoid`:
/// searches primitive vectors (x, y), then completes to a determinant-one
/// change of variable.
fn steer_coprime(f: &QuadForm, avoid: i64) -> Result<QuadForm> {
    let bound = 40i64;
    // Sweep by increasing radius so the first hit has a small value: the
    // steered forms seed ideal lattices whose products must stay well
    // inside the working integer size.
    for r in 0..=bound {
        for x in 0..=r {
            for y in -r..=r {
                if x.max(y.abs()) != r || gcd(x, y) != 1 {
                    continue;
                }
                let val = f.eval(x, y);
                if val <= 0 || gcd(val, avoid) != 1 {
                    continue;
                }
                // Complete (x, y) to [[x, u], [y, v]] with xv - yu = 1.
                let (u, v) = bezout_complement(x, y);
                let a = val;
                let b = 2 * f.a * x * u + f.b * (x * v + u * y) + 2 * f.c * y * v;
                let c = f.eval(u, v);
                let g = QuadForm { a, b, c };
                debug_assert_eq!(g.disc(), f.disc());
                return Ok(g);
            }
        }
    }
    Err(Error::Invalid(format!(
        "no represented value coprime to {avoid} within the search bound"
    )))
}

/// (u, v) with x v - y u = 1, for coprime (x, y).
fn bezout_complement(x: i64, y: i64) -> (i64, i64) {
    let (mut r0, mut r1) = (x, y);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    // r0 = gcd = +-1 = s0 x + t0 y; scale so the combination equals 1.
    let (s, t) = (s0 * r0.signum(), t0 * r0.signum());
    // x v - y u = 1 with v = s + k y, u = -t + k x for any k; take k = 0.
    (-t, s)
}
