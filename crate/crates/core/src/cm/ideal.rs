//! Ideals of O_K in Hermite normal form.
//!
//! An ideal is stored as content times a primitive part: c (Z a +
//! Z (b + sqrt(d_K))/2) with 4a | b^2 - d_K and 0 <= b < 2a.  In the
//! integral basis (1, omega) the primitive part is Z a + Z (beta +
//! omega) with beta = (b - d_K)/2, so the full module has HNF
//! [[ca, c beta], [0, c]].  Products are computed by reducing the four
//! generator products back to HNF; the conjugate flips the sign of b.

use super::field::{KElem, QuadField};
use crate::error::{Error, Result};

/// Ideal of O_K: content times a primitive HNF pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QFIdeal {
    field: QuadField,
    content: i64,
    a: i64,
    b: i64,
}

impl QFIdeal {
    /// Primitive ideal Z a + Z (b + sqrt(d_K))/2 scaled by content.
    pub fn new(field: &QuadField, content: i64, a: i64, b: i64) -> Result<Self> {
        if content <= 0 || a <= 0 {
            return Err(Error::Invalid("ideal parameters must be positive".into()));
        }
        let d = field.disc();
        if (b * b - d).rem_euclid(4 * a) != 0 {
            return Err(Error::Invalid(format!(
                "({}, {}) is not an ideal of disc {}",
                a, b, d
            )));
        }
        Ok(QFIdeal {
            field: field.clone(),
            content,
            a,
            b: b.rem_euclid(2 * a),
        })
    }

    pub fn whole_ring(field: &QuadField) -> Self {
        let b = field.disc().rem_euclid(2);
        QFIdeal {
            field: field.clone(),
            content: 1,
            a: 1,
            b,
        }
    }

    /// The principal ideal (xi).
    pub fn principal(field: &QuadField, xi: &KElem) -> Result<Self> {
        if *xi == KElem::zero() {
            return Err(Error::Invalid("zero generator".into()));
        }
        let omega = KElem::new(0, 1);
        Self::from_generators(field, &[*xi, xi.mul(&omega, field)])
    }

    pub fn scalar(field: &QuadField, n: i64) -> Result<Self> {
        Self::principal(field, &KElem::new(n, 0))
    }

    /// HNF of the module spanned by the given elements.
    pub fn from_generators(field: &QuadField, gens: &[KElem]) -> Result<Self> {
        let mut rows: Vec<(i128, i128)> = gens
            .iter()
            .map(|g| (g.x as i128, g.y as i128))
            .collect();
        // Clear the omega column down to one row by gcd steps.
        loop {
            rows.retain(|r| *r != (0, 0));
            if rows.is_empty() {
                return Err(Error::Invalid("rank-0 module is not an ideal".into()));
            }
            let mut nz: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].1 != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            nz.sort_by_key(|&i| rows[i].1.abs());
            let (small, big) = (nz[0], nz[1]);
            let q = rows[big].1.div_euclid(rows[small].1);
            rows[big].0 -= q * rows[small].0;
            rows[big].1 -= q * rows[small].1;
        }
        let omega_row = rows.iter().position(|r| r.1 != 0);
        let mut int_vals: Vec<i128> = rows
            .iter()
            .filter(|r| r.1 == 0)
            .map(|r| r.0)
            .collect();
        let row = match omega_row {
            None => return Err(Error::Invalid("module has rank 1".into())),
            Some(i) => rows[i],
        };
        if int_vals.is_empty() {
            return Err(Error::Invalid("module has rank 1".into()));
        }
        let mut a0 = 0i128;
        int_vals.drain(..).for_each(|v| a0 = gcd_i128(a0, v));
        if a0 == 0 {
            return Err(Error::Invalid("module has rank 1".into()));
        }
        let c = row.1.abs();
        let x = if row.1 < 0 { -row.0 } else { row.0 }.rem_euclid(a0);
        // Module = Z a0 + Z (x + c omega); ideal form needs c | a0, c | x.
        if a0 % c != 0 || x % c != 0 {
            return Err(Error::Invalid("module is not an O_K ideal".into()));
        }
        let content = c;
        let a = a0 / c;
        let beta = x / c;
        // beta = (b - d_K)/2 recovers b.
        let b = 2 * beta + field.disc() as i128;
        let ideal = QFIdeal::new(
            field,
            i64::try_from(content).map_err(|_| Error::Invalid("content overflow".into()))?,
            i64::try_from(a).map_err(|_| Error::Invalid("ideal overflow".into()))?,
            i64::try_from(b.rem_euclid(2 * a)).map_err(|_| Error::Invalid("ideal overflow".into()))?,
        )?;
        Ok(ideal)
    }

    pub fn field(&self) -> &QuadField {
        &self.field
    }
    pub fn content(&self) -> i64 {
        self.content
    }
    /// Norm of the primitive part.
    pub fn a(&self) -> i64 {
        self.a
    }
    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn norm(&self) -> i64 {
        self.content * self.content * self.a
    }

    pub fn is_primitive(&self) -> bool {
        self.content == 1
    }

    /// Generators as elements: (content a, content (beta + omega)).
    pub fn generators(&self) -> [KElem; 2] {
        let beta = (self.b - self.field.disc()) / 2;
        [
            KElem::new(self.content * self.a, 0),
            KElem::new(self.content * beta, self.content),
        ]
    }

    pub fn conj(&self) -> Self {
        QFIdeal {
            field: self.field.clone(),
            content: self.content,
            a: self.a,
            b: (-self.b).rem_euclid(2 * self.a),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::ContextMismatch("ideals over different fields".into()));
        }
        let g1 = self.generators();
        let g2 = other.generators();
        let mut prods = Vec::with_capacity(4);
        for x in &g1 {
            for y in &g2 {
                prods.push(x.mul(y, &self.field));
            }
        }
        Self::from_generators(&self.field, &prods)
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = QFIdeal::whole_ring(&self.field);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Membership: xi lies in the module.
    pub fn contains(&self, xi: &KElem) -> bool {
        if xi.y.rem_euclid(self.content) != 0 {
            return false;
        }
        let t = xi.y / self.content;
        let beta = (self.b - self.field.disc()) / 2;
        let rem = xi.x as i128 - t as i128 * (self.content * beta) as i128;
        rem.rem_euclid((self.content * self.a) as i128) == 0
    }

    /// Coprimality: I + J = O_K.
    pub fn is_coprime(&self, other: &Self) -> Result<bool> {
        let mut gens = self.generators().to_vec();
        gens.extend_from_slice(&other.generators());
        let sum = Self::from_generators(&self.field, &gens)?;
        Ok(sum.norm() == 1)
    }

    /// Searches for a generator: xi in I with N(xi) = N(I).  Returns
    /// None when the ideal is not principal.
    pub fn find_generator(&self) -> Option<KElem> {
        let n = self.norm();
        let d = self.field.disc();
        // N(x + y omega) = n is an ellipse; |y| <= sqrt(4n / |d|).
        let ybound = (((4 * n as i128) / (-d) as i128) as f64).sqrt() as i64 + 1;
        for y in -ybound..=ybound {
            // x^2 + x y d + y^2 N(omega) = n.
            let disc_q = (y * y * d * d) as i128
                - 4 * ((y * y * self.field.omega_norm()) as i128 - n as i128);
            if disc_q < 0 {
                continue;
            }
            let s = isqrt_i128(disc_q);
            if s * s != disc_q {
                continue;
            }
            for sign in [1i128, -1] {
                let num = -(y * d) as i128 + sign * s;
                if num.rem_euclid(2) != 0 {
                    continue;
                }
                let x = num / 2;
                if let Ok(x) = i64::try_from(x) {
                    let xi = KElem::new(x, y);
                    if xi.norm(&self.field) == n && self.contains(&xi) {
                        return Some(xi);
                    }
                }
            }
        }
        None
    }

    /// A prime ideal above a split or ramified rational prime.
    pub fn prime_above(field: &QuadField, p: i64) -> Result<Self> {
        for b in 0..2 * p {
            if (b * b - field.disc()).rem_euclid(4 * p) == 0 {
                return QFIdeal::new(field, 1, p, b);
            }
        }
        Err(Error::Invalid(format!(
            "{} is inert in disc {}",
            p,
            field.disc()
        )))
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn isqrt_i128(n: i128) -> i128 {
    if n < 0 {
        return -1;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// The deterministic level ideal: smallest b0 >= 0 with b0^2 = d_K
/// mod 4N, giving the cyclic quotient O_K / frakN of order N.
pub fn choose_frak_n(field: &QuadField, n: u64) -> Result<(QFIdeal, i64)> {
    let d = field.disc();
    let modulus = 4 * n as i64;
    for b0 in 0..modulus {
        if (b0 * b0 - d).rem_euclid(modulus) == 0 {
            let ideal = QFIdeal::new(field, 1, n as i64, b0)?;
            return Ok((ideal, b0));
        }
    }
    Err(Error::Invalid(format!(
        "no square root of {} mod {}",
        d, modulus
    )))
}
