//! Polynomial arithmetic over F_p for small primes.
//!
//! Used for two jobs only: certifying that a candidate defining polynomial is
//! irreducible modulo p, and computing the residue-field inverse that seeds
//! Newton lifting of extension-field inverses.  Coefficients live in `[0, p)`
//! as `u64`; degrees stay small (a few dozen), so schoolbook arithmetic is
//! plenty.

/// Trim trailing zero coefficients.
fn trim(v: &mut Vec<u64>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
}

pub fn deg(a: &[u64]) -> usize {
    let mut d = a.len();
    while d > 1 && a[d - 1] == 0 {
        d -= 1;
    }
    d - 1
}

fn is_zero(a: &[u64]) -> bool {
    a.iter().all(|&c| c == 0)
}

pub fn mul_mod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u128; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai as u128 * bj as u128) % p as u128;
        }
    }
    let mut prod: Vec<u64> = prod.into_iter().map(|c| c as u64).collect();
    rem(&mut prod, modulus, p);
    prod
}

/// In-place remainder of `a` by the monic polynomial `m`.
pub fn rem(a: &mut Vec<u64>, m: &[u64], p: u64) {
    let dm = deg(m);
    while deg(a) >= dm && !is_zero(a) {
        let da = deg(a);
        let c = a[da];
        if c == 0 {
            a.pop();
            continue;
        }
        let shift = da - dm;
        for i in 0..=dm {
            let sub = (c as u128 * m[i] as u128) % p as u128;
            let idx = i + shift;
            a[idx] = ((a[idx] as u128 + p as u128 * p as u128 - sub) % p as u128) as u64;
        }
        trim(a);
    }
    trim(a);
}

/// x^(p^reps) modulo `m`, by repeated p-th powering.
pub fn frobenius_iterate(m: &[u64], p: u64, reps: usize) -> Vec<u64> {
    let mut t = vec![0, 1]; // x
    rem(&mut t, m, p);
    for _ in 0..reps {
        t = pow_mod(&t, p, m, p);
    }
    t
}

pub fn pow_mod(a: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut base = a.to_vec();
    rem(&mut base, m, p);
    let mut acc = vec![1u64];
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(&acc, &base, m, p);
        }
        base = mul_mod(&base, &base, m, p);
        e >>= 1;
    }
    acc
}

fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        let ai = a.get(i).copied().unwrap_or(0);
        let bi = b.get(i).copied().unwrap_or(0);
        out[i] = (ai + p - bi) % p;
    }
    trim(&mut out);
    out
}

pub(crate) fn modinv_u64(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a != 0 mod p.
    let mut e = p - 2;
    let mut base = a % p;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * base as u128 % p as u128) as u64;
        }
        base = (base as u128 * base as u128 % p as u128) as u64;
        e >>= 1;
    }
    acc
}

pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !is_zero(&b) {
        let lead = b[deg(&b)];
        let inv = modinv_u64(lead, p);
        let monic: Vec<u64> = b.iter().map(|&c| (c as u128 * inv as u128 % p as u128) as u64).collect();
        rem(&mut a, &monic, p);
        std::mem::swap(&mut a, &mut b);
        trim(&mut b);
    }
    let d = deg(&a);
    if !is_zero(&a) && a[d] != 0 {
        let inv = modinv_u64(a[d], p);
        for c in a.iter_mut() {
            *c = (*c as u128 * inv as u128 % p as u128) as u64;
        }
    }
    a
}

/// Irreducibility over F_p: x^(p^f) = x mod g, and gcd(x^(p^(f/l)) - x, g) = 1
/// for each prime l dividing f.
pub fn is_irreducible(g: &[u64], p: u64) -> bool {
    let f = deg(g);
    if f == 0 {
        return false;
    }
    if f == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let top = frobenius_iterate(g, p, f);
    if sub(&top, &x, p) != vec![0] {
        return false;
    }
    let mut primes = vec![];
    let mut m = f;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            primes.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    for l in primes {
        let t = frobenius_iterate(g, p, f / l);
        let diff = sub(&t, &x, p);
        if deg(&gcd(&diff, g, p)) != 0 || is_zero(&gcd(&diff, g, p)) {
            // gcd must be the constant 1
            let gg = gcd(&diff, g, p);
            if !(gg.len() == 1 && gg[0] == 1) {
                return false;
            }
        }
    }
    true
}

/// Extended gcd returning s with s*a = gcd mod m, for a coprime to the monic
/// modulus m.  Used to seed Newton inversion.
pub fn inverse_mod(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
    // Standard extended Euclid over F_p[x].
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    rem(&mut r1, m, p);
    trim(&mut r0);
    trim(&mut r1);
    let mut s0 = vec![0u64];
    let mut s1 = vec![1u64];
    while !is_zero(&r1) {
        // divide r0 by r1
        let mut q = vec![0u64; r0.len()];
        let mut rem_poly = r0.clone();
        let d1 = deg(&r1);
        let lead_inv = modinv_u64(r1[d1], p);
        while !is_zero(&rem_poly) && deg(&rem_poly) >= d1 {
            let dr = deg(&rem_poly);
            let c = (rem_poly[dr] as u128 * lead_inv as u128 % p as u128) as u64;
            if c == 0 {
                rem_poly.pop();
                trim(&mut rem_poly);
                continue;
            }
            let shift = dr - d1;
            q[shift] = (q[shift] + c) % p;
            for i in 0..=d1 {
                let sub_v = (c as u128 * r1[i] as u128) % p as u128;
                rem_poly[i + shift] =
                    ((rem_poly[i + shift] as u128 + p as u128 * p as u128 - sub_v) % p as u128) as u64;
            }
            trim(&mut rem_poly);
        }
        trim(&mut q);
        // (r0, r1) = (r1, r0 - q r1); (s0, s1) = (s1, s0 - q s1)
        let qs1 = {
            let mut prod = vec![0u128; q.len() + s1.len()];
            for (i, &qi) in q.iter().enumerate() {
                for (j, &sj) in s1.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + qi as u128 * sj as u128) % p as u128;
                }
            }
            let mut v: Vec<u64> = prod.into_iter().map(|c| c as u64).collect();
            trim(&mut v);
            v
        };
        let new_s = sub(&s0, &qs1, p);
        r0 = r1;
        r1 = rem_poly;
        s0 = s1;
        s1 = new_s;
        trim(&mut r1);
    }
    // r0 = gcd; must be a nonzero constant
    if deg(&r0) != 0 || r0[0] == 0 {
        return None;
    }
    let inv = modinv_u64(r0[0], p);
    let mut out: Vec<u64> = s0.iter().map(|&c| (c as u128 * inv as u128 % p as u128) as u64).collect();
    rem(&mut out, m, p);
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducible_quadratics_mod_5() {
        // x^2 + 2 is irreducible mod 5 (-2 = 3 is a non-residue), x^2 + 1 is not.
        assert!(is_irreducible(&[2, 0, 1], 5));
        assert!(!is_irreducible(&[1, 0, 1], 5));
        assert!(!is_irreducible(&[0, 0, 1], 5));
    }

    #[test]
    fn inverse_round_trip() {
        let m = [2u64, 0, 1]; // x^2 + 2 mod 5
        let a = [3u64, 4];
        let inv = inverse_mod(&a, &m, 5).unwrap();
        let prod = mul_mod(&a, &inv, &m, 5);
        assert_eq!(prod, vec![1]);
    }

    #[test]
    fn gcd_of_coprime_is_one() {
        let g = gcd(&[1, 1], &[2, 0, 1], 5);
        assert_eq!(g, vec![1]);
    }
}
