//! Coordinate compressibility, multicompressibility and slice covers.
//!
//! A zero box `I x J x K` misses the support entirely; the restriction of any tensor
//! with that support to the dual coordinate subspaces then vanishes. The complement
//! of a zero box is a slice cover and conversely, so
//! `min cover + max (|I| + |J| + |K|) = a + b + c`.
//!
//! All searches here are over coordinate subspaces only, so they certify
//! compressibility but never refute it for general subspaces.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::rref;
use crate::tensor::{Rational, Shape, Support, Tensor, Triple};
use crate::deciders::TightWitness;

use num::{One, Zero};

/// Index subsets `I, J, K` with `(I x J x K) cap S` empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZeroBox {
    pub sets: [Vec<usize>; 3],
}

impl ZeroBox {
    pub fn sizes(&self) -> [usize; 3] {
        [self.sets[0].len(), self.sets[1].len(), self.sets[2].len()]
    }

    pub fn total(&self) -> usize {
        self.sizes().iter().sum()
    }

    pub fn verify(&self, s: &Support) -> Result<()> {
        let d = s.shape().dims();
        for axis in 0..3 {
            if self.sets[axis].iter().any(|&x| x >= d[axis]) {
                return Err(Error::Shape(format!("box index out of range on axis {axis}")));
            }
        }
        let mut member: [Vec<bool>; 3] = Default::default();
        for axis in 0..3 {
            member[axis] = vec![false; d[axis]];
            for &x in &self.sets[axis] {
                member[axis][x] = true;
            }
        }
        if let Some(t) = s.iter().find(|t| (0..3).all(|x| member[x][t[x]])) {
            return Err(Error::Invariant(format!("support triple {t:?} lies in the box")));
        }
        Ok(())
    }
}

/// Axis slices `(axis, index)` whose union contains the support.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SliceCover {
    pub slices: Vec<(usize, usize)>,
}

impl SliceCover {
    pub fn size(&self) -> usize {
        self.slices.len()
    }

    pub fn covers(&self, s: &Support) -> bool {
        s.iter().all(|t| self.slices.iter().any(|&(axis, x)| t[axis] == x))
    }
}

fn check_mask_dims(shape: Shape) -> Result<()> {
    if shape.dims().iter().any(|&d| d > 64) {
        return Err(Error::InvalidInput(format!("compressibility search supports dims up to 64, got {shape}")));
    }
    Ok(())
}

/// Support viewed with axes reordered so that `order[0]` is the outer axis.
struct Layout {
    order: [usize; 3],
    dims: [usize; 3],
    /// `blocked[x][y]` has bit `z` set iff the reordered triple `(x, y, z)` is in the support.
    blocked: Vec<Vec<u64>>,
}

impl Layout {
    fn new(s: &Support, order: [usize; 3]) -> Self {
        let d = s.shape().dims();
        let dims = order.map(|a| d[a]);
        let mut blocked = vec![vec![0u64; dims[1]]; dims[0]];
        for t in s {
            let r = order.map(|a| t[a]);
            blocked[r[0]][r[1]] |= 1 << r[2];
        }
        Layout { order, dims, blocked }
    }

    fn unorder(&self, sets: [Vec<usize>; 3]) -> ZeroBox {
        let mut out: [Vec<usize>; 3] = Default::default();
        for (n, set) in sets.into_iter().enumerate() {
            let mut set = set;
            set.sort_unstable();
            out[self.order[n]] = set;
        }
        ZeroBox { sets: out }
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn lowest_bits(mask: u64, n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    let mut m = mask;
    while out.len() < n {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

/// Exact search for a zero box of sizes `(a', b', c')`.
///
/// The axis with the smallest target is enumerated outermost, indices in ascending
/// order of slice occupancy; for each outer choice a `b' x c'` biclique is sought in the
/// bipartite graph of pairs not blocked by any chosen outer index.
pub fn find_zero_box(s: &Support, target: [usize; 3]) -> Result<Option<ZeroBox>> {
    let shape = s.shape();
    check_mask_dims(shape)?;
    let d = shape.dims();
    for axis in 0..3 {
        if target[axis] > d[axis] {
            return Err(Error::InvalidInput(format!(
                "target {target:?} exceeds shape {shape} on axis {axis}"
            )));
        }
    }
    let mut axes = [0, 1, 2];
    axes.sort_by_key(|&a| (target[a], a));
    let layout = Layout::new(s, axes);
    let t = axes.map(|a| target[a]);
    let occupancy: Vec<usize> =
        (0..layout.dims[0]).map(|x| layout.blocked[x].iter().map(|m| m.count_ones() as usize).sum()).collect();
    let mut outer: Vec<usize> = (0..layout.dims[0]).collect();
    outer.sort_by_key(|&x| (occupancy[x], x));
    let mut chosen = Vec::with_capacity(t[0]);
    let blocked0 = vec![0u64; layout.dims[1]];
    Ok(outer_search(&layout, &outer, 0, &mut chosen, &blocked0, t).map(|sets| layout.unorder(sets)))
}

fn outer_search(
    layout: &Layout,
    outer: &[usize],
    from: usize,
    chosen: &mut Vec<usize>,
    blocked: &[u64],
    t: [usize; 3],
) -> Option<[Vec<usize>; 3]> {
    // Rows that still have room for t[2] free columns.
    let full = full_mask(layout.dims[2]);
    let viable = blocked.iter().filter(|&&m| (full & !m).count_ones() as usize >= t[2]).count();
    if viable < t[1] {
        return None;
    }
    if chosen.len() == t[0] {
        let (rows, cols) = biclique(blocked, full, t[1], t[2])?;
        return Some([chosen.clone(), rows, cols]);
    }
    let remaining = t[0] - chosen.len();
    for n in from..outer.len() {
        if outer.len() - n < remaining {
            break;
        }
        let x = outer[n];
        let next: Vec<u64> = blocked.iter().zip(&layout.blocked[x]).map(|(a, b)| a | b).collect();
        chosen.push(x);
        let r = outer_search(layout, outer, n + 1, chosen, &next, t);
        chosen.pop();
        if r.is_some() {
            return r;
        }
    }
    None
}

/// `rows x cols` all-free biclique, rows chosen in index order, columns the lowest common free ones.
fn biclique(blocked: &[u64], full: u64, rows: usize, cols: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    fn go(
        blocked: &[u64],
        from: usize,
        common: u64,
        chosen: &mut Vec<usize>,
        rows: usize,
        cols: usize,
    ) -> Option<u64> {
        if (common.count_ones() as usize) < cols {
            return None;
        }
        if chosen.len() == rows {
            return Some(common);
        }
        for y in from..blocked.len() {
            if blocked.len() - y < rows - chosen.len() {
                break;
            }
            chosen.push(y);
            let r = go(blocked, y + 1, common & !blocked[y], chosen, rows, cols);
            if r.is_some() {
                return r;
            }
            chosen.pop();
        }
        None
    }
    let mut chosen = Vec::with_capacity(rows);
    let common = go(blocked, 0, full, &mut chosen, rows, cols)?;
    Some((chosen, lowest_bits(common, cols)))
}

/// Largest `rho` such that every `(a', b', c')` with `a' + b' + c' = rho` admits a zero box.
pub fn multicompressibility(s: &Support) -> Result<usize> {
    let d = s.shape().dims();
    let mut rho = 0;
    while rho < d.iter().sum::<usize>() {
        let next = rho + 1;
        let mut all = true;
        'outer: for x in 0..=d[0].min(next) {
            for y in 0..=d[1].min(next - x) {
                let z = next - x - y;
                if z > d[2] {
                    continue;
                }
                if find_zero_box(s, [x, y, z])?.is_none() {
                    all = false;
                    break 'outer;
                }
            }
        }
        if !all {
            break;
        }
        rho = next;
    }
    Ok(rho)
}

/// Maximum `|I| + |J| + |K|` over zero boxes, with a box attaining it.
///
/// Every subset of the smallest axis is tried; for a fixed outer subset the best
/// `|J| + |K|` is a maximum independent set in the bipartite graph of blocked pairs,
/// which by Koenig's theorem is `b + c` minus a maximum matching.
pub fn total_compressibility(s: &Support) -> Result<(usize, ZeroBox)> {
    let shape = s.shape();
    check_mask_dims(shape)?;
    let d = shape.dims();
    let mut axes = [0, 1, 2];
    axes.sort_by_key(|&a| (d[a], a));
    let layout = Layout::new(s, axes);
    if layout.dims[0] > 24 {
        return Err(Error::InvalidInput(format!("smallest axis of {shape} is too large for exhaustive search")));
    }
    let mut best: Option<(usize, [Vec<usize>; 3])> = None;
    for subset in 0u64..(1u64 << layout.dims[0]) {
        let outer: Vec<usize> = (0..layout.dims[0]).filter(|&x| subset >> x & 1 == 1).collect();
        let mut blocked = vec![0u64; layout.dims[1]];
        for &x in &outer {
            for (b, m) in blocked.iter_mut().zip(&layout.blocked[x]) {
                *b |= m;
            }
        }
        let (rows, cols) = max_free_biclique_sides(&blocked, layout.dims[2]);
        let total = outer.len() + rows.len() + cols.len();
        if best.as_ref().is_none_or(|(b, _)| total > *b) {
            best = Some((total, [outer, rows, cols]));
        }
    }
    let (total, sets) = best.expect("the empty outer subset is always tried");
    Ok((total, layout.unorder(sets)))
}

/// Maximum independent set `(J, K)` in the bipartite graph with edges `blocked[y] bit z`.
fn max_free_biclique_sides(blocked: &[u64], ncols: usize) -> (Vec<usize>, Vec<usize>) {
    let nrows = blocked.len();
    // Kuhn's augmenting paths.
    let mut match_col: Vec<Option<usize>> = vec![None; ncols];
    let mut match_row: Vec<Option<usize>> = vec![None; nrows];
    fn augment(
        y: usize,
        blocked: &[u64],
        seen: &mut [bool],
        match_col: &mut [Option<usize>],
        match_row: &mut [Option<usize>],
    ) -> bool {
        let mut m = blocked[y];
        while m != 0 {
            let z = m.trailing_zeros() as usize;
            m &= m - 1;
            if seen[z] {
                continue;
            }
            seen[z] = true;
            let free = match match_col[z] {
                None => true,
                Some(y2) => augment(y2, blocked, seen, match_col, match_row),
            };
            if free {
                match_col[z] = Some(y);
                match_row[y] = Some(z);
                return true;
            }
        }
        false
    }
    for y in 0..nrows {
        let mut seen = vec![false; ncols];
        augment(y, blocked, &mut seen, &mut match_col, &mut match_row);
    }
    // Koenig: Z = vertices reachable from unmatched rows by alternating paths.
    // Minimum vertex cover = (rows not in Z) + (cols in Z); its complement is independent.
    let mut row_in_z = vec![false; nrows];
    let mut col_in_z = vec![false; ncols];
    let mut stack: Vec<usize> = (0..nrows).filter(|&y| match_row[y].is_none()).collect();
    for &y in &stack {
        row_in_z[y] = true;
    }
    while let Some(y) = stack.pop() {
        let mut m = blocked[y];
        while m != 0 {
            let z = m.trailing_zeros() as usize;
            m &= m - 1;
            if col_in_z[z] || match_row[y] == Some(z) {
                continue;
            }
            col_in_z[z] = true;
            if let Some(y2) = match_col[z] {
                if !row_in_z[y2] {
                    row_in_z[y2] = true;
                    stack.push(y2);
                }
            }
        }
    }
    let rows = (0..nrows).filter(|&y| row_in_z[y]).collect();
    let cols = (0..ncols).filter(|&z| !col_in_z[z]).collect();
    (rows, cols)
}

/// Minimum slice cover by exact branch and bound.
///
/// Each uncovered triple must be hit by one of its three slices, which gives a
/// three-way branching; a set of uncovered triples that pairwise share no
/// coordinate needs one slice each, which gives the lower bound.
pub fn slice_cover(s: &Support) -> SliceCover {
    let d = s.shape().dims();
    // Initial incumbent: all slices of the axis with the fewest occupied indices.
    let mut best: Vec<(usize, usize)> = (0..3)
        .map(|axis| {
            let proj = s.projection(axis);
            (0..d[axis]).filter(|&x| proj[x]).map(|x| (axis, x)).collect::<Vec<_>>()
        })
        .min_by_key(Vec::len)
        .unwrap();
    let mut chosen: [Vec<bool>; 3] = [vec![false; d[0]], vec![false; d[1]], vec![false; d[2]]];
    let mut current = Vec::new();
    cover_search(s.triples(), &mut chosen, &mut current, &mut best);
    best.sort_unstable();
    SliceCover { slices: best }
}

fn cover_search(
    triples: &[Triple],
    chosen: &mut [Vec<bool>; 3],
    current: &mut Vec<(usize, usize)>,
    best: &mut Vec<(usize, usize)>,
) {
    let covered = |t: &Triple, chosen: &[Vec<bool>; 3]| (0..3).any(|x| chosen[x][t[x]]);
    let uncovered: Vec<&Triple> = triples.iter().filter(|t| !covered(t, chosen)).collect();
    let Some(first) = uncovered.first() else {
        if current.len() < best.len() {
            *best = current.clone();
        }
        return;
    };
    let mut packing: Vec<&Triple> = Vec::new();
    for t in &uncovered {
        if packing.iter().all(|p| (0..3).all(|x| p[x] != t[x])) {
            packing.push(t);
        }
    }
    if current.len() + packing.len() >= best.len() {
        return;
    }
    for axis in 0..3 {
        let x = first[axis];
        chosen[axis][x] = true;
        current.push((axis, x));
        cover_search(triples, chosen, current, best);
        current.pop();
        chosen[axis][x] = false;
    }
}

/// Zero box of sizes `floor(m/2)` on `floor_axis` and `ceil(m/2)` on the others, built
/// from a tight witness on an `m x m x m` support.
///
/// With weights sorted increasingly, either the box of the smallest weights has all
/// sums negative, or the largest weight sums on the complementary ranges are all positive.
pub fn tight_zero_box(w: &TightWitness, floor_axis: usize) -> Result<ZeroBox> {
    let d = w.dims();
    let m = d[0];
    if d != [m, m, m] {
        return Err(Error::Shape(format!("tight zero box needs a cube witness, got {d:?}")));
    }
    if floor_axis > 2 {
        return Err(Error::InvalidInput(format!("axis {floor_axis} out of range")));
    }
    let (p, q) = (m / 2, m.div_ceil(2));
    let sorted: [Vec<usize>; 3] = std::array::from_fn(|axis| {
        let tau = w.tau(axis);
        let mut idx: Vec<usize> = (0..m).collect();
        idx.sort_by_key(|&i| tau[i]);
        idx
    });
    let size = |axis: usize| if axis == floor_axis { p } else { q };
    let lower_max: i64 = (0..3)
        .map(|axis| if size(axis) == 0 { i64::MIN / 4 } else { w.tau(axis)[sorted[axis][size(axis) - 1]] })
        .sum();
    let sets: [Vec<usize>; 3] = if lower_max < 0 {
        std::array::from_fn(|axis| sorted[axis][..size(axis)].to_vec())
    } else {
        // Floor axis takes positions [p, m); the others take [q - 1, m) truncated to q.
        std::array::from_fn(|axis| {
            let start = if axis == floor_axis { p } else { q - 1 };
            sorted[axis][start..].iter().take(size(axis)).copied().collect()
        })
    };
    let mut sets = sets;
    for set in sets.iter_mut() {
        set.sort_unstable();
    }
    let b = ZeroBox { sets };
    b.verify(&w.zero_set()?)?;
    Ok(b)
}

/// Result of the `(1, b', c')` check along a covector `alpha` of the first factor.
#[derive(Debug, Clone, Serialize)]
pub struct OneSliceCompression {
    /// Rank of the contraction `T_A(alpha) = sum_i alpha_i T[i, ., .]`.
    pub rank: usize,
    /// Row operations `P` on factor B (rows are the new basis covectors).
    #[serde(skip)]
    pub p: Vec<Vec<Rational>>,
    /// Row operations `Q` on factor C.
    #[serde(skip)]
    pub q: Vec<Vec<Rational>>,
    /// Zero rows/columns of `P T_A(alpha) Q^T = diag(I_r, 0)` of the requested sizes.
    pub box_rows: Option<Vec<usize>>,
    pub box_cols: Option<Vec<usize>>,
}

/// Contracts `T` with `alpha` on factor A, normalizes the slice to `diag(I_r, 0)` by
/// exact row and column operations, and searches a `b' x c'` zero block in it.
///
/// A hit certifies `(1, b', c')`-compressibility with `A' = <alpha>` and `B'`, `C'`
/// spanned by the chosen rows of `P` and `Q`.
pub fn one_slice_compression(t: &Tensor, alpha: &[Rational], b_target: usize, c_target: usize) -> Result<OneSliceCompression> {
    let [a, b, c] = t.shape().dims();
    if alpha.len() != a {
        return Err(Error::Shape(format!("alpha has length {}, factor A has dimension {a}", alpha.len())));
    }
    if alpha.iter().all(Zero::is_zero) {
        return Err(Error::InvalidInput("alpha must be nonzero".into()));
    }
    if b_target > b || c_target > c {
        return Err(Error::InvalidInput(format!("target ({b_target}, {c_target}) exceeds ({b}, {c})")));
    }
    let mut m = vec![vec![Rational::zero(); c]; b];
    for (idx, v) in t.entries() {
        m[idx[1]][idx[2]] += &alpha[idx[0]] * v;
    }
    let (p, r) = row_normalizer(&m);
    let pm = matmul(&p, &m);
    let (q, _) = row_normalizer(&transpose(&pm));
    let normal = matmul(&pm, &transpose(&q));
    for (i, row) in normal.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let expect = if i == j && i < r { Rational::one() } else { Rational::zero() };
            if *v != expect {
                return Err(Error::Invariant(format!("normal form mismatch at ({i}, {j})")));
            }
        }
    }
    let slice = Support::new(Shape::new(1, b, c)?, (0..r).map(|i| [0, i, i]))?;
    let found = find_zero_box(&slice, [1, b_target, c_target])?;
    let (box_rows, box_cols) = match found {
        Some(zb) => (Some(zb.sets[1].clone()), Some(zb.sets[2].clone())),
        None => (None, None),
    };
    Ok(OneSliceCompression { rank: r, p, q, box_rows, box_cols })
}

/// Invertible `E` with `E M` in reduced row echelon form, and the rank of `M`.
fn row_normalizer(m: &[Vec<Rational>]) -> (Vec<Vec<Rational>>, usize) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let aug: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..rows).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let (red, pivots) = rref(aug);
    let rank = pivots.iter().filter(|&&c| c < cols).count();
    (red.into_iter().map(|r| r[cols..].to_vec()).collect(), rank)
}

fn transpose(m: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

fn matmul(x: &[Vec<Rational>], y: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let inner = y.len();
    let cols = y.first().map_or(0, Vec::len);
    x.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Rational::zero(), |acc, k| acc + &row[k] * &y[k][j]))
                .collect()
        })
        .collect()
}


#[cfg(test)]
mod properties {
    use proptest::prelude::*;

    use super::*;
    use crate::strategies::support;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn cover_and_total_compressibility_are_dual(s in support(5)) {
            let cover = slice_cover(&s);
            prop_assert!(cover.covers(&s));
            let (kappa, b) = total_compressibility(&s).unwrap();
            prop_assert!(b.verify(&s).is_ok());
            prop_assert_eq!(b.total(), kappa);
            let d = s.shape().dims();
            prop_assert_eq!(cover.size() + kappa, d[0] + d[1] + d[2]);
        }

        #[test]
        fn zero_boxes_are_monotone(s in support(4), target in (1usize..=4, 1usize..=4, 1usize..=4)) {
            let d = s.shape().dims();
            let target = [target.0.min(d[0]), target.1.min(d[1]), target.2.min(d[2])];
            if let Some(b) = find_zero_box(&s, target).unwrap() {
                prop_assert!(b.verify(&s).is_ok());
                prop_assert_eq!(b.sizes(), target);
                for axis in 0..3 {
                    if target[axis] > 1 {
                        let mut smaller = target;
                        smaller[axis] -= 1;
                        prop_assert!(find_zero_box(&s, smaller).unwrap().is_some());
                    }
                }
            }
        }
    }
}
