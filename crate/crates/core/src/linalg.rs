//! Exact sparse linear algebra over the rationals.
//!
//! Rows are scaled to primitive integer vectors and reduced fraction-free:
//! eliminating a leading entry replaces `r` by `lead(p) * r - lead(r) * p`
//! followed by division by the content of the result. No thresholds exist;
//! every rank and kernel reported here is exact.

use std::collections::BTreeMap;

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

use crate::tensor::Rational;

/// Sparse row as `(column, value)` pairs; columns strictly increasing, no zero values.
pub type SparseRow = Vec<(usize, Rational)>;

type IntRow = Vec<(usize, BigInt)>;

/// Scales a rational row by the lcm of its denominators and divides out the content.
fn to_primitive(row: &[(usize, Rational)]) -> IntRow {
    let lcm = row.iter().fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
    let mut out: IntRow = row
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(c, v)| (*c, v.numer() * (&lcm / v.denom())))
        .collect();
    out.sort_by_key(|(c, _)| *c);
    normalize(&mut out);
    out
}

fn normalize(row: &mut IntRow) {
    let Some((_, first)) = row.first() else { return };
    let mut g = first.abs();
    for (_, v) in row.iter().skip(1) {
        if g.is_one() {
            break;
        }
        g = g.gcd(v);
    }
    if row[0].1.is_negative() {
        g = -g;
    }
    if !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v /= &g;
        }
    }
}

/// `sa * a - sb * b`, dropping zeros.
fn combine(a: &IntRow, sa: &BigInt, b: &IntRow, sb: &BigInt) -> IntRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut x, mut y) = (0, 0);
    while x < a.len() || y < b.len() {
        let ca = a.get(x).map(|e| e.0).unwrap_or(usize::MAX);
        let cb = b.get(y).map(|e| e.0).unwrap_or(usize::MAX);
        if ca < cb {
            out.push((ca, sa * &a[x].1));
            x += 1;
        } else if cb < ca {
            out.push((cb, -(sb * &b[y].1)));
            y += 1;
        } else {
            let v = sa * &a[x].1 - sb * &b[y].1;
            if !v.is_zero() {
                out.push((ca, v));
            }
            x += 1;
            y += 1;
        }
    }
    out
}

fn entry(row: &IntRow, col: usize) -> Option<&BigInt> {
    row.binary_search_by_key(&col, |e| e.0).ok().map(|i| &row[i].1)
}

/// Row echelon form maintained incrementally; pivots keyed by their leading column.
#[derive(Debug, Default, Clone)]
pub struct Echelon {
    ncols: usize,
    pivots: BTreeMap<usize, IntRow>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, pivots: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Adds a row; returns true iff it was independent of the rows already present.
    pub fn insert(&mut self, row: &[(usize, Rational)]) -> bool {
        let mut r = to_primitive(row);
        debug_assert!(r.iter().all(|(c, _)| *c < self.ncols));
        while let Some((lead_col, _)) = r.first() {
            match self.pivots.get(lead_col) {
                Some(p) => {
                    let lp = p[0].1.clone();
                    let lr = r[0].1.clone();
                    let g = lp.gcd(&lr);
                    r = combine(&r, &(&lp / &g), p, &(&lr / &g));
                    normalize(&mut r);
                }
                None => {
                    self.pivots.insert(*lead_col, r);
                    return true;
                }
            }
        }
        false
    }

    /// Exact basis of the right kernel, one vector per non-pivot column.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let mut rows = self.pivots.clone();
        let cols: Vec<usize> = rows.keys().copied().collect();
        // Back substitution into reduced echelon form, largest pivot first.
        for (n, &c) in cols.iter().enumerate().rev() {
            let p = rows[&c].clone();
            for &other in &cols[..n] {
                let r = rows.get_mut(&other).unwrap();
                if let Some(v) = entry(r, c).cloned() {
                    let g = p[0].1.gcd(&v);
                    let mut next = combine(r, &(&p[0].1 / &g), &p, &(&v / &g));
                    normalize(&mut next);
                    *r = next;
                }
            }
        }
        let is_pivot = {
            let mut v = vec![false; self.ncols];
            for &c in &cols {
                v[c] = true;
            }
            v
        };
        let mut basis = Vec::new();
        for free in (0..self.ncols).filter(|&c| !is_pivot[c]) {
            let mut x = vec![Rational::zero(); self.ncols];
            x[free] = Rational::one();
            for (&c, r) in &rows {
                if let Some(v) = entry(r, free) {
                    x[c] = -Rational::new(v.clone(), r[0].1.clone());
                }
            }
            basis.push(x);
        }
        basis
    }
}

/// Exact rank; see [`nullspace`].
pub fn rank(rows: &[SparseRow], ncols: usize) -> usize {
    ncols - nullspace(rows, ncols).len()
}

/// Exact kernel basis: for each non-pivot column `f` the vector with `x_f = 1`, zero on
/// the other non-pivot columns.
///
/// Computed by [`nullspace_modular`], falling back to fraction-free elimination when
/// reconstruction does not settle within the prime budget.
pub fn nullspace(rows: &[SparseRow], ncols: usize) -> Vec<Vec<Rational>> {
    nullspace_modular(rows, ncols).unwrap_or_else(|| nullspace_fraction_free(rows, ncols))
}

pub fn rank_fraction_free(rows: &[SparseRow], ncols: usize) -> usize {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

pub fn nullspace_fraction_free(rows: &[SparseRow], ncols: usize) -> Vec<Vec<Rational>> {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert(r);
    }
    e.kernel()
}

/// Primes below `2^31`, largest first, so products of residues fit in a `u64`.
fn primes() -> impl Iterator<Item = u64> {
    ((1u64 << 30)..(1u64 << 31)).rev().filter(|&n| {
        n % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= n).all(|d| n % d != 0)
    })
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a is nonzero mod p.
    let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

fn residue(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue below p")
}

/// Kernel modulo `p` in reduced echelon normal form: pivot columns and, per free
/// column, the kernel vector with a one in that column.
fn kernel_mod(rows: &[IntRow], ncols: usize, p: u64) -> (Vec<usize>, Vec<Vec<u64>>) {
    // Each basis row is monic at its pivot and zero at every other pivot column.
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut pivot_row: Vec<Option<usize>> = vec![None; ncols];
    for r in rows {
        let mut v = vec![0u64; ncols];
        for (c, x) in r {
            v[*c] = residue(x, p);
        }
        for (pc, b) in &basis {
            let f = v[*pc];
            if f != 0 {
                let f = p - f;
                for (x, y) in v.iter_mut().zip(b) {
                    if *y != 0 {
                        *x = (*x + f * y) % p;
                    }
                }
            }
        }
        let Some(lead) = v.iter().position(|&x| x != 0) else { continue };
        let inv = mod_inverse(v[lead], p);
        v.iter_mut().for_each(|x| *x = *x * inv % p);
        for (_, b) in basis.iter_mut() {
            let f = b[lead];
            if f != 0 {
                let f = p - f;
                for (x, y) in b.iter_mut().zip(&v) {
                    if *y != 0 {
                        *x = (*x + f * y) % p;
                    }
                }
            }
        }
        pivot_row[lead] = Some(basis.len());
        basis.push((lead, v));
    }
    let mut pivots: Vec<usize> = basis.iter().map(|(c, _)| *c).collect();
    pivots.sort_unstable();
    let kernel = (0..ncols)
        .filter(|&f| pivot_row[f].is_none())
        .map(|f| {
            let mut x = vec![0u64; ncols];
            x[f] = 1;
            for (c, b) in &basis {
                x[*c] = (p - b[f]) % p;
            }
            x
        })
        .collect();
    (pivots, kernel)
}

/// `n / d` with `|n|, d <= sqrt(m / 2)` and `n = u d mod m`, if one exists.
fn reconstruct(u: &BigInt, m: &BigInt) -> Option<Rational> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(Rational::new(r1, t1))
}

fn annihilates(rows: &[IntRow], v: &[Rational]) -> bool {
    let x = integer_multiple(v);
    rows.iter().all(|r| r.iter().fold(BigInt::zero(), |acc, (c, a)| acc + a * &x[*c]).is_zero())
}

const MAX_PRIMES: usize = 400;

/// Multimodular kernel with exact verification.
///
/// Kernels modulo primes are combined by CRT and lifted by rational reconstruction.
/// Any prime bounds the rational kernel dimension from above, and lifted vectors that
/// annihilate every row over the integers bound it from below, so a verified lift of
/// the full modular kernel is the exact answer. Primes whose pivot columns disagree
/// with the earliest profile seen are discarded. Returns `None` if nothing verifies
/// within the prime budget.
pub fn nullspace_modular(rows: &[SparseRow], ncols: usize) -> Option<Vec<Vec<Rational>>> {
    let int_rows: Vec<IntRow> = rows.iter().map(|r| to_primitive(r)).filter(|r| !r.is_empty()).collect();
    let mut pivots: Option<Vec<usize>> = None;
    let mut modulus = BigInt::one();
    let mut acc: Vec<Vec<BigInt>> = Vec::new();
    let mut last: Option<Vec<Vec<Rational>>> = None;
    for p in primes().take(MAX_PRIMES) {
        let (piv, ker) = kernel_mod(&int_rows, ncols, p);
        match &pivots {
            Some(current) if *current == piv => {}
            // Lexicographically earlier pivots mean a larger prefix rank; the old primes were unlucky.
            Some(current) if piv < *current => {
                pivots = Some(piv);
                modulus = BigInt::one();
                acc = Vec::new();
                last = None;
            }
            Some(_) => continue,
            None => pivots = Some(piv),
        }
        if ker.is_empty() {
            return Some(Vec::new());
        }
        let pb = BigInt::from(p);
        if acc.is_empty() {
            acc = ker.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
        } else {
            // x = a + M * ((r - a) * M^-1 mod p)
            let minv = BigInt::from(mod_inverse(residue(&modulus, p), p));
            for (a_vec, r_vec) in acc.iter_mut().zip(&ker) {
                for (a, &r) in a_vec.iter_mut().zip(r_vec) {
                    let diff = (BigInt::from(r) - &*a).mod_floor(&pb);
                    if !diff.is_zero() {
                        *a += &modulus * ((diff * &minv) % &pb);
                    }
                }
            }
        }
        modulus *= &pb;
        let lifted: Option<Vec<Vec<Rational>>> =
            acc.iter().map(|v| v.iter().map(|u| reconstruct(u, &modulus)).collect()).collect();
        let Some(lifted) = lifted else { continue };
        // Verify only once the lift is stable across one extra prime.
        if last.as_ref() == Some(&lifted) && lifted.iter().all(|v| annihilates(&int_rows, v)) {
            return Some(lifted);
        }
        last = Some(lifted);
    }
    None
}

pub fn dense_to_sparse(rows: &[Vec<Rational>]) -> Vec<SparseRow> {
    rows.iter()
        .map(|r| {
            r.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(c, v)| (c, v.clone())).collect()
        })
        .collect()
}

pub fn dot_sparse(row: &[(usize, Rational)], x: &[Rational]) -> Rational {
    row.iter().fold(Rational::zero(), |acc, (c, v)| acc + v * &x[*c])
}

/// Smallest positive integer multiple of a rational vector, with content removed.
pub fn integer_multiple(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

/// Dense Gauss-Jordan over the rationals. Returns the reduced matrix and its pivot columns.
pub fn rref(mut m: Vec<Vec<Rational>>) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let sub = &f * &m[r][j];
                    m[i][j] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

/// Inverse of a square matrix, or `None` if it is singular.
pub fn inverse(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let aug: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let (red, pivots) = rref(aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(red.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{int, rat};

    fn row(v: &[i64]) -> SparseRow {
        v.iter().enumerate().filter(|(_, x)| **x != 0).map(|(c, x)| (c, int(*x))).collect()
    }

    #[test]
    fn rank_of_dependent_rows() {
        let rows = vec![row(&[1, 2, 3]), row(&[2, 4, 6]), row(&[0, 1, 1])];
        assert_eq!(rank(&rows, 3), 2);
    }

    #[test]
    fn kernel_vectors_annihilate_rows() {
        let rows = vec![row(&[1, 1, 1, 0]), row(&[0, 2, -1, 3]), row(&[1, 3, 0, 3])];
        let ker = nullspace(&rows, 4);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            for r in &rows {
                assert!(dot_sparse(r, v).is_zero());
            }
        }
    }

    #[test]
    fn rational_rows_are_handled_exactly() {
        let rows = vec![vec![(0, rat(1, 3)), (1, rat(-1, 2))], vec![(0, rat(2, 3)), (1, int(-1))]];
        let ker = nullspace(&rows, 2);
        assert_eq!(ker.len(), 1);
        assert_eq!(ker[0], vec![rat(3, 2), int(1)]);
    }

    #[test]
    fn empty_system_has_full_kernel() {
        assert_eq!(nullspace(&[], 3).len(), 3);
        assert_eq!(rank(&[vec![]], 3), 0);
    }

    #[test]
    fn integer_multiple_clears_denominators() {
        assert_eq!(integer_multiple(&[rat(1, 2), rat(-3, 4), int(0)]), vec![2.into(), (-3).into(), 0.into()]);
    }

    #[test]
    fn modular_and_fraction_free_kernels_agree() {
        let rows = vec![
            vec![(0, rat(7, 3)), (2, rat(-5, 11)), (3, int(123_456_789))],
            vec![(1, int(2)), (2, rat(1, 1_000_003))],
            vec![(0, rat(14, 3)), (1, int(2)), (2, rat(-10_000_019, 11_000_033)), (3, int(246_913_578))],
        ];
        let modular = nullspace_modular(&rows, 5).unwrap();
        assert_eq!(modular, nullspace_fraction_free(&rows, 5));
        assert_eq!(modular.len(), 3);
        assert_eq!(rank(&rows, 5), rank_fraction_free(&rows, 5));
    }

    #[test]
    fn reconstruction_recovers_small_fractions() {
        let m = BigInt::from(1_000_000_007u64) * BigInt::from(998_244_353u64);
        let x = rat(-355, 113);
        let u = (BigInt::from(-355) * BigInt::from(113).modinv(&m).unwrap()).mod_floor(&m);
        assert_eq!(reconstruct(&u, &m), Some(x));
    }

    #[test]
    fn dense_inverse() {
        let m = vec![vec![int(2), int(1)], vec![int(1), int(1)]];
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, vec![vec![int(1), int(-1)], vec![int(-1), int(2)]]);
        assert!(inverse(&[vec![int(1), int(2)], vec![int(2), int(4)]]).is_none());
    }
}

#[cfg(test)]
mod properties {
    use proptest::prelude::*;

    use super::*;

    fn matrix() -> impl Strategy<Value = (Vec<SparseRow>, usize)> {
        (1usize..=7).prop_flat_map(|ncols| {
            let row = proptest::collection::vec((0..ncols, -40i64..=40), 0..=ncols)
                .prop_map(move |r| {
                    let mut dense = vec![Rational::zero(); ncols];
                    for (c, v) in r {
                        dense[c] += Rational::from_integer(v.into());
                    }
                    dense.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect::<SparseRow>()
                });
            (proptest::collection::vec(row, 0..=8), Just(ncols))
        })
    }

    proptest! {
        #[test]
        fn modular_and_fraction_free_routes_agree((rows, ncols) in matrix()) {
            let exact = nullspace_fraction_free(&rows, ncols);
            let modular = nullspace_modular(&rows, ncols).expect("small entries lift");
            prop_assert_eq!(modular.len(), exact.len());
            prop_assert_eq!(rank(&rows, ncols), rank_fraction_free(&rows, ncols));
            for v in &modular {
                prop_assert!(rows.iter().all(|r| dot_sparse(r, v).is_zero()));
            }
            // Same span: stacking the two bases does not raise the rank.
            let mut both = Echelon::new(ncols);
            for v in modular.iter().chain(&exact) {
                both.insert(&dense_to_sparse(std::slice::from_ref(v))[0]);
            }
            prop_assert_eq!(both.rank(), exact.len());
        }
    }
}
