//! Imaginary quadratic fields K = Q(sqrt(-D)) in the integral basis
//! (1, omega) with omega = (d_K + sqrt(d_K))/2.
//!
//! d_K is the fundamental discriminant: -D when -D = 1 mod 4, else
//! -4D.  omega satisfies omega^2 = d_K omega - (d_K^2 - d_K)/4, the
//! conjugate of omega is d_K - omega, and x + y omega has trace
//! 2x + y d_K and norm x^2 + x y d_K + y^2 (d_K^2 - d_K)/4.

use crate::error::{Error, Result};

/// The field Q(sqrt(-D)) for squarefree D > 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadField {
    d: i64,
    disc: i64,
}

impl QuadField {
    pub fn new(d: i64) -> Result<Self> {
        if d <= 0 {
            return Err(Error::Invalid("D must be positive".into()));
        }
        if !is_squarefree(d) {
            return Err(Error::Invalid(format!("D = {} is not squarefree", d)));
        }
        let disc = if (-d).rem_euclid(4) == 1 { -d } else { -4 * d };
        Ok(QuadField { d, disc })
    }

    /// Recovers the field from a fundamental discriminant d_K < 0.
    pub fn from_disc(disc: i64) -> Result<Self> {
        if disc >= 0 {
            return Err(Error::Invalid("discriminant must be negative".into()));
        }
        let d = match disc.rem_euclid(4) {
            1 => -disc,
            0 => {
                let m = -disc / 4;
                if m.rem_euclid(4) == 3 {
                    return Err(Error::Invalid(format!(
                        "{} is not fundamental: {} = 1 mod 4 already",
                        disc, -m
                    )));
                }
                m
            }
            _ => {
                return Err(Error::Invalid(format!(
                    "{disc} is not a discriminant (must be 0 or 1 mod 4)"
                )))
            }
        };
        let field = Self::new(d)?;
        if field.disc != disc {
            return Err(Error::Invalid(format!("{disc} is not fundamental")));
        }
        Ok(field)
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// Fundamental discriminant d_K < 0.
    pub fn disc(&self) -> i64 {
        self.disc
    }

    /// Trace of omega.
    pub fn omega_trace(&self) -> i64 {
        self.disc
    }

    /// Norm of omega: (d_K^2 - d_K)/4.
    pub fn omega_norm(&self) -> i64 {
        (self.disc * self.disc - self.disc) / 4
    }

    /// Torsion units of O_K: powers of i for d_K = -4, of a sixth root
    /// of unity for d_K = -3, otherwise +-1.
    pub fn units(&self) -> Vec<KElem> {
        let gen = match self.disc {
            -4 => KElem { x: 2, y: 1 },
            -3 => KElem { x: 2, y: 1 },
            _ => KElem { x: -1, y: 0 },
        };
        let mut units = vec![KElem::one()];
        let mut cur = gen;
        while cur != KElem::one() {
            units.push(cur);
            cur = cur.mul(&gen, self);
        }
        units
    }
}

/// Integral element x + y omega of O_K.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KElem {
    pub x: i64,
    pub y: i64,
}

impl KElem {
    pub fn new(x: i64, y: i64) -> Self {
        KElem { x, y }
    }
    pub fn one() -> Self {
        KElem { x: 1, y: 0 }
    }
    pub fn zero() -> Self {
        KElem { x: 0, y: 0 }
    }
    pub fn add(&self, other: &KElem) -> KElem {
        KElem {
            x: self.x + other.x,
            y: self.y + other.y,
        }
    }
    pub fn sub(&self, other: &KElem) -> KElem {
        KElem {
            x: self.x - other.x,
            y: self.y - other.y,
        }
    }
    pub fn neg(&self) -> KElem {
        KElem {
            x: -self.x,
            y: -self.y,
        }
    }
    pub fn scale(&self, k: i64) -> KElem {
        KElem {
            x: self.x * k,
            y: self.y * k,
        }
    }

    /// Product in O_K, reducing omega^2 = d_K omega - N(omega).
    pub fn mul(&self, other: &KElem, field: &QuadField) -> KElem {
        let cross = self.x as i128 * other.y as i128 + self.y as i128 * other.x as i128;
        let yy = self.y as i128 * other.y as i128;
        let x = self.x as i128 * other.x as i128 - yy * field.omega_norm() as i128;
        let y = cross + yy * field.omega_trace() as i128;
        KElem {
            x: i64::try_from(x).expect("coordinate overflow"),
            y: i64::try_from(y).expect("coordinate overflow"),
        }
    }

    /// Conjugate: omega maps to d_K - omega.
    pub fn conj(&self, field: &QuadField) -> KElem {
        KElem {
            x: self.x + self.y * field.disc(),
            y: -self.y,
        }
    }

    pub fn trace(&self, field: &QuadField) -> i64 {
        2 * self.x + self.y * field.disc()
    }

    pub fn norm(&self, field: &QuadField) -> i64 {
        let x = self.x as i128;
        let y = self.y as i128;
        let n = x * x + x * y * field.disc() as i128 + y * y * field.omega_norm() as i128;
        i64::try_from(n).expect("norm overflow")
    }
}

fn is_squarefree(d: i64) -> bool {
    let mut n = d;
    let mut q = 2i64;
    while q * q <= n {
        if n % q == 0 {
            n /= q;
            if n % q == 0 {
                return false;
            }
        }
        q += 1;
    }
    true
}

/// Trial-division factorisation into (prime, exponent) pairs.
pub(crate) fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut n = n;
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= n {
        if n % q == 0 {
            let mut e = 0;
            while n % q == 0 {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Kronecker symbol (a | n), fully general.
pub fn kronecker(a: i64, n: i64) -> i64 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut a = a;
    let mut n = n;
    let mut result = 1i64;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    // (a | 2) factors: 0 for even a, chi_8(a) otherwise.
    while n % 2 == 0 {
        n /= 2;
        if a % 2 == 0 {
            return 0;
        }
        let r = a.rem_euclid(8);
        if r == 3 || r == 5 {
            result = -result;
        }
    }
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.rem_euclid(4) == 3 && n.rem_euclid(4) == 3 {
            result = -result;
        }
        a = a.rem_euclid(n);
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Per-prime splitting certificate for the Heegner condition.
#[derive(Clone, Debug)]
pub struct HeegnerCert {
    pub ok: bool,
    pub disc: i64,
    pub symbols: Vec<(u64, i64)>,
}

/// Checks that every prime divisor of N splits in K.
pub fn heegner_check(d: i64, n: u64) -> Result<HeegnerCert> {
    if n < 4 {
        return Err(Error::Invalid("level N must be at least 4".into()));
    }
    let field = QuadField::new(d)?;
    let mut symbols = Vec::new();
    let mut ok = true;
    for (q, _) in factorize(n) {
        let s = kronecker(field.disc(), q as i64);
        if s != 1 {
            ok = false;
        }
        symbols.push((q, s));
    }
    Ok(HeegnerCert {
        ok,
        disc: field.disc(),
        symbols,
    })
}
