//! Structure computation for finite abelian groups given by an opaque
//! multiplication law on indices.
//!
//! The engine grows a generating set greedily, labels every element with an
//! exponent vector over those generators by a layered closure walk, and
//! extracts the relation lattice.  The walk visits each element exactly once,
//! so the staircase relations it records have determinant equal to the group
//! order; that equality certifies the relation matrix before Smith reduction.
//! The Smith normal form then yields the invariant factors, elements
//! realising each cyclic factor, and a discrete logarithm in the cyclic
//! coordinates.

use crate::error::{Error, Result};

/// Smith normal form presentation of a finite abelian group whose elements
/// are the indices `0..size`.
pub struct AbelianPresentation {
    size: u64,
    /// Invariant factors > 1, in divisibility order d_1 | d_2 | ...
    orders: Vec<u64>,
    /// Element index realising each cyclic factor.
    snf_gens: Vec<usize>,
    /// Cyclic coordinates of every element; dlog is a table lookup.
    coords: Vec<Vec<u64>>,
}

/// Builds the presentation.  `mul` must be a group law on `0..size` with
/// identity `identity`; the walk itself detects any failure to close.
pub fn presentation(
    size: usize,
    identity: usize,
    mul: &dyn Fn(usize, usize) -> usize,
) -> Result<AbelianPresentation> {
    if size == 0 || identity >= size {
        return Err(Error::Invalid(
            "group must be nonempty with a valid identity index".into(),
        ));
    }

    // Layered closure: vecs[x] is the exponent vector of x over the greedy
    // generators, with entry i confined to 0..steps[i].
    let mut vecs: Vec<Option<Vec<i128>>> = vec![None; size];
    vecs[identity] = Some(Vec::new());
    let mut marked: Vec<usize> = vec![identity];
    let mut gens: Vec<usize> = Vec::new();
    // Staircase data: g_i^steps[i] equals the already-marked element with
    // exponent vector returns[i] (supported on earlier generators).
    let mut steps: Vec<i128> = Vec::new();
    let mut returns: Vec<Vec<i128>> = Vec::new();

    for cand in 0..size {
        if vecs[cand].is_some() {
            continue;
        }
        let gi = gens.len();
        gens.push(cand);
        for v in vecs.iter_mut().flatten() {
            v.push(0);
        }
        // Multiply the current subgroup by successive powers of the new
        // generator until a power folds back into it.
        let prev: Vec<usize> = marked.clone();
        let mut power = cand;
        let mut j: i128 = 1;
        loop {
            if let Some(back) = vecs[power].clone() {
                steps.push(j);
                returns.push(back);
                break;
            }
            for &x in &prev {
                let y = mul(x, power);
                if vecs[y].is_none() {
                    let mut v = vecs[x].clone().expect("walk invariant: x is marked");
                    v[gi] = j;
                    vecs[y] = Some(v);
                    marked.push(y);
                }
            }
            power = mul(power, cand);
            j += 1;
        }
    }

    if marked.len() != size {
        return Err(Error::Invalid(format!(
            "multiplication law does not close: reached {} of {} elements",
            marked.len(),
            size
        )));
    }
    let t = gens.len();
    let mut det: i128 = 1;
    for &s in &steps {
        det *= s;
    }
    if det != size as i128 {
        return Err(Error::RelationInconsistent(format!(
            "staircase determinant {det} disagrees with group order {size}"
        )));
    }

    // Relation matrix rows: steps[i] * e_i - returns[i].
    let mut rel = vec![vec![0i128; t]; t];
    for i in 0..t {
        rel[i][i] = steps[i];
        for (k, &r) in returns[i].iter().enumerate() {
            rel[i][k] -= r;
        }
    }
    let (d, v, vinv) = smith(rel);

    // Keep the nontrivial factors; Smith order puts d_1 | d_2 | ... first.
    let kept: Vec<usize> = (0..t).filter(|&j| d[j] > 1).collect();
    let orders: Vec<u64> = kept.iter().map(|&j| d[j] as u64).collect();

    // Coordinates of x: (e(x) · V) mod d, restricted to the kept columns.
    let mut coords: Vec<Vec<u64>> = vec![Vec::new(); size];
    for (x, ve) in vecs.iter().enumerate() {
        let e = ve.as_ref().expect("walk invariant: all elements marked");
        let mut c = Vec::with_capacity(kept.len());
        for &j in &kept {
            let mut acc: i128 = 0;
            for i in 0..t {
                acc += e[i] * v[i][j];
            }
            c.push(acc.rem_euclid(d[j]) as u64);
        }
        coords[x] = c;
    }

    // Element realising cyclic factor j: product over i of g_i^(Vinv[j][i]).
    let ord_of = |g: usize| -> i128 {
        let mut o = 1i128;
        let mut cur = g;
        while cur != identity {
            cur = mul(cur, g);
            o += 1;
        }
        o
    };
    let mut snf_gens = Vec::with_capacity(kept.len());
    for &j in &kept {
        let mut acc = identity;
        for i in 0..t {
            let o = ord_of(gens[i]);
            let exp = vinv[j][i].rem_euclid(o);
            let mut cur = identity;
            for _ in 0..exp {
                cur = mul(cur, gens[i]);
            }
            acc = mul(acc, cur);
        }
        snf_gens.push(acc);
    }

    let pres = AbelianPresentation {
        size: size as u64,
        orders,
        snf_gens,
        coords,
    };
    for (j, &g) in pres.snf_gens.iter().enumerate() {
        let mut expect = vec![0u64; pres.orders.len()];
        expect[j] = 1 % pres.orders[j];
        if pres.coords[g] != expect {
            return Err(Error::RelationInconsistent(
                "cyclic generator does not project to a unit coordinate".into(),
            ));
        }
    }
    Ok(pres)
}

impl AbelianPresentation {
    pub fn size(&self) -> u64 {
        self.size
    }
    /// Invariant factors > 1 in divisibility order; empty for the trivial group.
    pub fn orders(&self) -> &[u64] {
        &self.orders
    }
    /// Exponent of the group: the largest invariant factor.
    pub fn exponent(&self) -> u64 {
        self.orders.last().copied().unwrap_or(1)
    }
    /// Element index realising the j-th cyclic factor.
    pub fn snf_gen(&self, j: usize) -> usize {
        self.snf_gens[j]
    }
    /// Cyclic coordinates of x: x = prod_j snf_gen(j)^dlog(x)[j], uniquely
    /// with dlog(x)[j] in 0..orders()[j].
    pub fn dlog(&self, x: usize) -> &[u64] {
        &self.coords[x]
    }
}

/// Smith normal form over the integers for a square matrix of full rank:
/// returns (diag, V, Vinv) with U*M*V diagonal for some unimodular U, the
/// diagonal entries positive in divisibility order.  Only the column
/// transform is kept; row operations are applied and dropped.
fn smith(mut m: Vec<Vec<i128>>) -> (Vec<i128>, Vec<Vec<i128>>, Vec<Vec<i128>>) {
    let n = m.len();
    let mut v = ident(n);
    let mut vinv = ident(n);

    // Column op on V mirrors into a row op on Vinv to keep Vinv = V^{-1}.
    fn col_addmul(m: &mut [Vec<i128>], v: &mut [Vec<i128>], vinv: &mut [Vec<i128>], dst: usize, src: usize, q: i128) {
        for row in m.iter_mut() {
            row[dst] += q * row[src];
        }
        for row in v.iter_mut() {
            row[dst] += q * row[src];
        }
        for k in 0..vinv[0].len() {
            vinv[src][k] -= q * vinv[dst][k];
        }
    }
    fn col_swap(m: &mut [Vec<i128>], v: &mut [Vec<i128>], vinv: &mut [Vec<i128>], a: usize, b: usize) {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
        for row in v.iter_mut() {
            row.swap(a, b);
        }
        vinv.swap(a, b);
    }

    for k in 0..n {
        loop {
            // Pivot: smallest nonzero entry in the trailing block.
            let mut pivot: Option<(usize, usize)> = None;
            for i in k..n {
                for j in k..n {
                    if m[i][j] != 0
                        && pivot.map_or(true, |(pi, pj)| m[i][j].abs() < m[pi][pj].abs())
                    {
                        pivot = Some((i, j));
                    }
                }
            }
            let (pi, pj) = match pivot {
                Some(p) => p,
                None => break,
            };
            m.swap(k, pi);
            col_swap(&mut m, &mut v, &mut vinv, k, pj);

            let mut dirty = false;
            for i in k + 1..n {
                let q = m[i][k].div_euclid(m[k][k]);
                if q != 0 {
                    for j in k..n {
                        let s = q * m[k][j];
                        m[i][j] -= s;
                    }
                }
                if m[i][k] != 0 {
                    dirty = true;
                }
            }
            for j in k + 1..n {
                let q = m[k][j].div_euclid(m[k][k]);
                if q != 0 {
                    col_addmul(&mut m, &mut v, &mut vinv, j, k, -q);
                }
                if m[k][j] != 0 {
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Divisibility sweep: fold any non-multiple into column k.
            let mut fixed = true;
            'scan: for i in k + 1..n {
                for j in k + 1..n {
                    if m[i][j] % m[k][k] != 0 {
                        col_addmul(&mut m, &mut v, &mut vinv, k, j, 1);
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
    }
    let mut d = Vec::with_capacity(n);
    for k in 0..n {
        let mut x = m[k][k];
        if x < 0 {
            x = -x;
            for row in v.iter_mut() {
                row[k] = -row[k];
            }
            for e in vinv[k].iter_mut() {
                *e = -*e;
            }
        }
        d.push(x);
    }
    (d, v, vinv)
}

fn ident(n: usize) -> Vec<Vec<i128>> {
    let mut v = vec![vec![0i128; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_hom(p: &AbelianPresentation, mul: &dyn Fn(usize, usize) -> usize, size: usize) {
        for x in 0..size {
            for y in 0..size {
                let lhs = p.dlog(mul(x, y));
                let rhs: Vec<u64> = p
                    .dlog(x)
                    .iter()
                    .zip(p.dlog(y))
                    .zip(p.orders())
                    .map(|((a, b), d)| (a + b) % d)
                    .collect();
                assert_eq!(lhs, rhs.as_slice(), "dlog not a homomorphism at {x},{y}");
            }
        }
    }

    #[test]
    fn cyclic_group_is_recognised() {
        let mul = |x: usize, y: usize| (x + y) % 12;
        let p = presentation(12, 0, &mul).unwrap();
        assert_eq!(p.orders(), &[12]);
        assert_eq!(p.dlog(p.snf_gen(0)), &[1]);
        check_hom(&p, &mul, 12);
    }

    #[test]
    fn direct_product_splits_into_invariant_factors() {
        // Z/2 x Z/4 encoded as pairs (a, b) -> 4a + b.
        let mul = |x: usize, y: usize| {
            let (a1, b1) = (x / 4, x % 4);
            let (a2, b2) = (y / 4, y % 4);
            4 * ((a1 + a2) % 2) + (b1 + b2) % 4
        };
        let p = presentation(8, 0, &mul).unwrap();
        assert_eq!(p.orders(), &[2, 4]);
        check_hom(&p, &mul, 8);
        // Each generator has the order of its factor.
        for (j, &d) in p.orders().iter().enumerate() {
            let g = p.snf_gen(j);
            let mut cur = g;
            let mut o = 1;
            while cur != 0 {
                cur = mul(cur, g);
                o += 1;
            }
            assert_eq!(o, d);
        }
    }

    #[test]
    fn trivial_group_has_no_factors() {
        let mul = |_: usize, _: usize| 0usize;
        let p = presentation(1, 0, &mul).unwrap();
        assert!(p.orders().is_empty());
        assert_eq!(p.exponent(), 1);
        assert_eq!(p.dlog(0), &[] as &[u64]);
    }

    #[test]
    fn unit_groups_match_known_structure() {
        // (Z/N)^x for a few N with known decompositions.
        let unit_group = |n: u64| -> (Vec<usize>, Vec<Vec<usize>>) {
            let units: Vec<usize> = (1..n as usize)
                .filter(|&a| gcd(a as u64, n) == 1)
                .collect();
            let pos: std::collections::HashMap<usize, usize> =
                units.iter().enumerate().map(|(i, &a)| (a, i)).collect();
            let table: Vec<Vec<usize>> = units
                .iter()
                .map(|&a| {
                    units
                        .iter()
                        .map(|&b| pos[&(a * b % n as usize)])
                        .collect()
                })
                .collect();
            (units, table)
        };
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }

        let (units, table) = unit_group(24);
        let id = units.iter().position(|&a| a == 1).unwrap();
        let p = presentation(units.len(), id, &|x, y| table[x][y]).unwrap();
        assert_eq!(p.orders(), &[2, 2, 2]);

        let (units, table) = unit_group(63);
        let id = units.iter().position(|&a| a == 1).unwrap();
        let p = presentation(units.len(), id, &|x, y| table[x][y]).unwrap();
        assert_eq!(p.orders(), &[6, 6]);

        let (units, table) = unit_group(13);
        let id = units.iter().position(|&a| a == 1).unwrap();
        let p = presentation(units.len(), id, &|x, y| table[x][y]).unwrap();
        assert_eq!(p.orders(), &[12]);
    }

    #[test]
    fn non_closing_law_is_rejected() {
        // A law that never reaches index 2.
        let mul = |x: usize, y: usize| (x + y) % 2;
        assert!(presentation(3, 0, &mul).is_err());
    }
}
