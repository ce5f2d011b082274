//! Shapes, supports, sparse rational tensors and the structural operations on them.
//!
//! Indices are 0-based on every axis. A [`Support`] keeps its triples sorted
//! lexicographically without duplicates, and a [`Tensor`] never stores a zero
//! coefficient, so two equal objects always serialize to the same bytes.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Zero};

use crate::error::{Error, Result};
use crate::linalg;

pub type Rational = BigRational;

/// An index triple `(i, j, k)`.
pub type Triple = [usize; 3];

/// Dimensions `(a, b, c)` of the three tensor factors, each at least one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct Shape {
    dims: [usize; 3],
}

impl Shape {
    pub fn new(a: usize, b: usize, c: usize) -> Result<Self> {
        if a == 0 || b == 0 || c == 0 {
            return Err(Error::Shape(format!(
                "dimensions must be positive, got ({a}, {b}, {c})"
            )));
        }
        Ok(Shape { dims: [a, b, c] })
    }

    pub fn cube(m: usize) -> Result<Self> {
        Self::new(m, m, m)
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn dim(&self, axis: usize) -> usize {
        self.dims[axis]
    }

    /// Number of grid cells `a * b * c`.
    pub fn volume(&self) -> usize {
        self.dims.iter().product()
    }

    /// `Some(m)` when `a = b = c = m`.
    pub fn cube_side(&self) -> Option<usize> {
        let [a, b, c] = self.dims;
        (a == b && b == c).then_some(a)
    }

    pub fn contains(&self, t: &Triple) -> bool {
        t.iter().zip(self.dims.iter()).all(|(&x, &d)| x < d)
    }

    /// All cells of the grid in lexicographic order.
    pub fn cells(&self) -> impl Iterator<Item = Triple> + '_ {
        let [a, b, c] = self.dims;
        (0..a).flat_map(move |i| (0..b).flat_map(move |j| (0..c).map(move |k| [i, j, k])))
    }

    /// Linear index of a cell, row-major.
    pub fn linear_index(&self, t: &Triple) -> usize {
        (t[0] * self.dims[1] + t[1]) * self.dims[2] + t[2]
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.dims;
        write!(f, "{a}x{b}x{c}")
    }
}

/// A canonically sorted, duplicate-free set of triples inside a shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Support {
    shape: Shape,
    triples: Vec<Triple>,
}

impl Support {
    pub fn new(shape: Shape, triples: impl IntoIterator<Item = Triple>) -> Result<Self> {
        let mut triples: Vec<Triple> = triples.into_iter().collect();
        if let Some(bad) = triples.iter().find(|t| !shape.contains(t)) {
            return Err(Error::Shape(format!("triple {bad:?} outside shape {shape}")));
        }
        triples.sort_unstable();
        triples.dedup();
        Ok(Support { shape, triples })
    }

    pub fn empty(shape: Shape) -> Self {
        Support { shape, triples: Vec::new() }
    }

    /// The full grid `[a] x [b] x [c]`.
    pub fn full(shape: Shape) -> Self {
        Support { shape, triples: shape.cells().collect() }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.triples.binary_search(t).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Triple> {
        self.triples.iter()
    }

    /// Occupancy mask over the grid, indexed by [`Shape::linear_index`].
    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.shape.volume()];
        for t in &self.triples {
            mask[self.shape.linear_index(t)] = true;
        }
        mask
    }

    /// Indices of `axis` that occur in some triple.
    pub fn projection(&self, axis: usize) -> Vec<bool> {
        let mut hit = vec![false; self.shape.dim(axis)];
        for t in &self.triples {
            hit[t[axis]] = true;
        }
        hit
    }

    /// True iff all three coordinate projections are surjective.
    pub fn is_concise(&self) -> bool {
        (0..3).all(|axis| self.projection(axis).into_iter().all(|h| h))
    }

    /// Relabels the three index ranges.
    pub fn permute(&self, perms: &AxisPermutations) -> Result<Support> {
        perms.check_shape(self.shape)?;
        Support::new(self.shape, self.triples.iter().map(|t| perms.apply(t)))
    }

    /// Restriction to the sub-grid `I x J x K`, reindexed in the order given.
    pub fn restrict(&self, index_sets: &[Vec<usize>; 3]) -> Result<Support> {
        let shape = Shape::new(index_sets[0].len(), index_sets[1].len(), index_sets[2].len())?;
        let mut pos: [Vec<Option<usize>>; 3] = Default::default();
        for axis in 0..3 {
            pos[axis] = vec![None; self.shape.dim(axis)];
            for (n, &x) in index_sets[axis].iter().enumerate() {
                if x >= self.shape.dim(axis) {
                    return Err(Error::Shape(format!("index {x} outside axis {axis}")));
                }
                pos[axis][x] = Some(n);
            }
        }
        let triples = self.triples.iter().filter_map(|t| {
            Some([pos[0][t[0]]?, pos[1][t[1]]?, pos[2][t[2]]?])
        });
        Support::new(shape, triples)
    }

    /// Support obtained by permuting the three factors: output axis `n` is input axis `order[n]`.
    pub fn permute_factors(&self, order: [usize; 3]) -> Support {
        let d = self.shape.dims();
        let shape = Shape { dims: [d[order[0]], d[order[1]], d[order[2]]] };
        let triples = self.triples.iter().map(|t| [t[order[0]], t[order[1]], t[order[2]]]);
        Support::new(shape, triples).expect("factor permutation keeps triples in range")
    }
}

impl<'a> IntoIterator for &'a Support {
    type Item = &'a Triple;
    type IntoIter = std::slice::Iter<'a, Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}

/// A sparse tensor with exact rational coefficients; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tensor {
    shape: Shape,
    entries: BTreeMap<Triple, Rational>,
}

impl Tensor {
    pub fn zero(shape: Shape) -> Self {
        Tensor { shape, entries: BTreeMap::new() }
    }

    /// Builds a tensor by summing the given terms; coefficients that cancel are dropped.
    pub fn from_terms(
        shape: Shape,
        terms: impl IntoIterator<Item = (Triple, Rational)>,
    ) -> Result<Self> {
        let mut t = Tensor::zero(shape);
        for (idx, coef) in terms {
            t.add_term(idx, coef)?;
        }
        Ok(t)
    }

    /// The tensor with coefficient one on every triple of the support.
    pub fn from_support(support: &Support) -> Self {
        Tensor {
            shape: support.shape(),
            entries: support.iter().map(|t| (*t, Rational::one())).collect(),
        }
    }

    pub fn add_term(&mut self, idx: Triple, coef: Rational) -> Result<()> {
        if !self.shape.contains(&idx) {
            return Err(Error::Shape(format!("triple {idx:?} outside shape {}", self.shape)));
        }
        let slot = self.entries.entry(idx).or_insert_with(Rational::zero);
        *slot += coef;
        if slot.is_zero() {
            self.entries.remove(&idx);
        }
        Ok(())
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn entries(&self) -> &BTreeMap<Triple, Rational> {
        &self.entries
    }

    pub fn get(&self, idx: &Triple) -> Rational {
        self.entries.get(idx).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn support(&self) -> Support {
        Support { shape: self.shape, triples: self.entries.keys().copied().collect() }
    }

    pub fn scale(&self, factor: &Rational) -> Tensor {
        if factor.is_zero() {
            return Tensor::zero(self.shape);
        }
        Tensor {
            shape: self.shape,
            entries: self.entries.iter().map(|(k, v)| (*k, v * factor)).collect(),
        }
    }

    pub fn permute(&self, perms: &AxisPermutations) -> Result<Tensor> {
        perms.check_shape(self.shape)?;
        Ok(Tensor {
            shape: self.shape,
            entries: self.entries.iter().map(|(t, v)| (perms.apply(t), v.clone())).collect(),
        })
    }

    /// Matrix of the flattening `axis^* -> (other two factors)`, one row per index of `axis`.
    pub fn flattening(&self, axis: usize) -> Vec<Vec<(usize, Rational)>> {
        let d = self.shape.dims();
        let (p, q) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); d[axis]];
        for (t, v) in &self.entries {
            rows[t[axis]].push((t[p] * d[q] + t[q], v.clone()));
        }
        for row in &mut rows {
            row.sort_by_key(|(c, _)| *c);
        }
        rows
    }

    pub fn flattening_rank(&self, axis: usize) -> usize {
        let d = self.shape.dims();
        let cols = d.iter().product::<usize>() / d[axis];
        linalg::rank(&self.flattening(axis), cols)
    }

    /// Conciseness of the tensor itself: every flattening is injective.
    /// Returns the first axis whose flattening is rank deficient.
    pub fn first_degenerate_flattening(&self) -> Option<usize> {
        (0..3).find(|&axis| self.flattening_rank(axis) < self.shape.dim(axis))
    }

    pub fn is_concise(&self) -> bool {
        self.first_degenerate_flattening().is_none()
    }
}

/// Three bijections on `[a]`, `[b]`, `[c]`; triple `(i, j, k)` maps to `(pA(i), pB(j), pC(k))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AxisPermutations {
    maps: [Vec<usize>; 3],
}

impl AxisPermutations {
    pub fn new(maps: [Vec<usize>; 3]) -> Result<Self> {
        for (axis, map) in maps.iter().enumerate() {
            let mut seen = vec![false; map.len()];
            for &x in map {
                if x >= map.len() || std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidInput(format!(
                        "axis {axis} map {map:?} is not a bijection"
                    )));
                }
            }
        }
        Ok(AxisPermutations { maps })
    }

    pub fn identity(shape: Shape) -> Self {
        let d = shape.dims();
        AxisPermutations { maps: [(0..d[0]).collect(), (0..d[1]).collect(), (0..d[2]).collect()] }
    }

    /// Permutations sending the `n`-th smallest value of each key list to position `n`.
    pub fn sorting_by<K: Ord>(keys: [&[K]; 3]) -> Self {
        let maps = keys.map(|k| {
            let mut order: Vec<usize> = (0..k.len()).collect();
            order.sort_by(|&x, &y| k[x].cmp(&k[y]).then(x.cmp(&y)));
            let mut map = vec![0; k.len()];
            for (pos, &old) in order.iter().enumerate() {
                map[old] = pos;
            }
            map
        });
        AxisPermutations { maps }
    }

    pub fn maps(&self) -> &[Vec<usize>; 3] {
        &self.maps
    }

    pub fn apply(&self, t: &Triple) -> Triple {
        [self.maps[0][t[0]], self.maps[1][t[1]], self.maps[2][t[2]]]
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &AxisPermutations) -> Result<AxisPermutations> {
        for axis in 0..3 {
            if self.maps[axis].len() != next.maps[axis].len() {
                return Err(Error::Shape("permutation lengths differ".into()));
            }
        }
        let maps = std::array::from_fn(|axis| {
            self.maps[axis].iter().map(|&x| next.maps[axis][x]).collect()
        });
        Ok(AxisPermutations { maps })
    }

    pub fn inverse(&self) -> AxisPermutations {
        let maps = self.maps.clone().map(|m| {
            let mut inv = vec![0; m.len()];
            for (x, &y) in m.iter().enumerate() {
                inv[y] = x;
            }
            inv
        });
        AxisPermutations { maps }
    }

    fn check_shape(&self, shape: Shape) -> Result<()> {
        let lens = [self.maps[0].len(), self.maps[1].len(), self.maps[2].len()];
        if lens != shape.dims() {
            return Err(Error::Shape(format!(
                "permutation domains {lens:?} do not match shape {shape}"
            )));
        }
        Ok(())
    }
}

pub fn is_concise_support(s: &Support) -> bool {
    s.is_concise()
}

/// Block-diagonal direct sum; the second operand is shifted past the first on every axis.
pub fn direct_sum(t1: &Tensor, t2: &Tensor) -> Tensor {
    let d1 = t1.shape.dims();
    let d2 = t2.shape.dims();
    let shape = Shape { dims: [d1[0] + d2[0], d1[1] + d2[1], d1[2] + d2[2]] };
    let mut entries = t1.entries.clone();
    for (t, v) in &t2.entries {
        entries.insert([t[0] + d1[0], t[1] + d1[1], t[2] + d1[2]], v.clone());
    }
    Tensor { shape, entries }
}

/// Flattened index of the pair `(x1, x2)` on an axis where the second factor has size `n2`.
pub fn kron_index(x1: usize, x2: usize, n2: usize) -> usize {
    x1 * n2 + x2
}

/// Kronecker product with row-major index flattening `(i1, i2) -> i1 * a2 + i2` on each axis.
pub fn kronecker(t1: &Tensor, t2: &Tensor) -> Tensor {
    let d1 = t1.shape.dims();
    let d2 = t2.shape.dims();
    let shape = Shape { dims: [d1[0] * d2[0], d1[1] * d2[1], d1[2] * d2[2]] };
    let mut entries = BTreeMap::new();
    for (s, u) in &t1.entries {
        for (t, v) in &t2.entries {
            let idx = std::array::from_fn(|ax| kron_index(s[ax], t[ax], d2[ax]));
            entries.insert(idx, u * v);
        }
    }
    Tensor { shape, entries }
}

pub fn direct_sum_support(s1: &Support, s2: &Support) -> Support {
    direct_sum(&Tensor::from_support(s1), &Tensor::from_support(s2)).support()
}

pub fn kronecker_support(s1: &Support, s2: &Support) -> Support {
    kronecker(&Tensor::from_support(s1), &Tensor::from_support(s2)).support()
}

pub fn apply_permutations(s: &Support, perms: &AxisPermutations) -> Result<Support> {
    s.permute(perms)
}

/// Parses `"p/q"` or `"p"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidInput(format!("malformed rational {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Always `"p/q"` with `q > 0` and `gcd(p, q) = 1`.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(m: usize) -> Shape {
        Shape::cube(m).unwrap()
    }

    fn sum_slice(m: usize, h: usize) -> Support {
        Support::new(cube(m), cube(m).cells().filter(|t| t.iter().sum::<usize>() == h)).unwrap()
    }

    #[test]
    fn conciseness_of_small_supports() {
        assert!(Support::new(cube(2), [[0, 0, 0], [1, 1, 1]]).unwrap().is_concise());
        assert!(!Support::new(cube(2), [[0, 0, 0]]).unwrap().is_concise());
        let s = sum_slice(3, 3);
        assert_eq!(s.len(), 7);
        assert!(is_concise_support(&s));
    }

    #[test]
    fn zero_dimension_is_rejected() {
        assert!(Shape::new(0, 1, 1).is_err());
        assert!(Shape::new(2, 2, 0).is_err());
    }

    #[test]
    fn support_is_canonical() {
        let s = Support::new(cube(2), [[1, 1, 1], [0, 0, 0], [1, 1, 1]]).unwrap();
        assert_eq!(s.triples(), &[[0, 0, 0], [1, 1, 1]]);
        assert!(Support::new(cube(2), [[2, 0, 0]]).is_err());
    }

    #[test]
    fn direct_sum_of_units_is_diagonal() {
        let one = Tensor::from_terms(cube(1), [([0, 0, 0], int(1))]).unwrap();
        let d = direct_sum(&one, &one);
        assert_eq!(d.shape(), cube(2));
        assert_eq!(d.support().triples(), &[[0, 0, 0], [1, 1, 1]]);
        assert_eq!(d.get(&[1, 1, 1]), int(1));
    }

    #[test]
    fn direct_sum_sizes_add() {
        let t1 = Tensor::from_support(&sum_slice(3, 3));
        let t2 = Tensor::from_support(&Support::new(cube(2), [[0, 1, 1], [1, 0, 1], [1, 1, 0]]).unwrap());
        let d = direct_sum(&t1, &t2);
        assert_eq!(d.nnz(), 10);
        assert_eq!(d.shape(), cube(5));
    }

    #[test]
    fn kronecker_with_unit_is_identity() {
        let one = Tensor::from_terms(cube(1), [([0, 0, 0], int(1))]).unwrap();
        let t = Tensor::from_terms(
            Shape::new(2, 3, 2).unwrap(),
            [([0, 1, 1], rat(1, 2)), ([1, 2, 0], int(-3))],
        )
        .unwrap();
        assert_eq!(kronecker(&one, &t), t);
        assert_eq!(kronecker(&t, &one), t);
    }

    #[test]
    fn kronecker_multiplies_coefficients() {
        let t1 = Tensor::from_terms(cube(2), [([1, 0, 1], rat(1, 2))]).unwrap();
        let t2 = Tensor::from_terms(cube(3), [([2, 1, 0], rat(2, 3))]).unwrap();
        let k = kronecker(&t1, &t2);
        assert_eq!(k.shape(), cube(6));
        assert_eq!(k.nnz(), 1);
        assert_eq!(k.get(&[5, 1, 3]), rat(1, 3));
    }

    #[test]
    fn cancelling_terms_are_not_stored() {
        let t = Tensor::from_terms(cube(2), [([0, 0, 0], int(2)), ([0, 0, 0], int(-2))]).unwrap();
        assert_eq!(t.nnz(), 0);
        assert!(t.support().is_empty());
    }

    #[test]
    fn permutation_examples() {
        let s = sum_slice(3, 3);
        let id = AxisPermutations::identity(cube(3));
        assert_eq!(s.permute(&id).unwrap(), s);
        let rev = AxisPermutations::new([vec![2, 1, 0], vec![2, 1, 0], vec![2, 1, 0]]).unwrap();
        assert_eq!(s.permute(&rev).unwrap(), s);
        let swap = AxisPermutations::new([vec![1, 0], vec![0, 1], vec![0, 1]]).unwrap();
        let single = Support::new(cube(2), [[0, 0, 0]]).unwrap();
        assert_eq!(single.permute(&swap).unwrap().triples(), &[[1, 0, 0]]);
        assert!(single.permute(&AxisPermutations::identity(cube(3))).is_err());
        assert!(AxisPermutations::new([vec![0, 0], vec![0, 1], vec![1, 0]]).is_err());
    }

    #[test]
    fn rational_text_round_trip() {
        let r = parse_rational("-6/4").unwrap();
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(format_rational(&int(7)), "7/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn flattening_rank_detects_degenerate_tensor() {
        let diag = Tensor::from_support(&Support::new(cube(2), [[0, 0, 0], [1, 1, 1]]).unwrap());
        assert!(diag.is_concise());
        let rank_one = Tensor::from_support(&Support::full(cube(2)));
        assert_eq!(rank_one.first_degenerate_flattening(), Some(0));
    }

    #[test]
    fn restriction_reindexes() {
        let s = sum_slice(3, 3);
        let r = s.restrict(&[vec![0, 1], vec![1, 2], vec![2]]).unwrap();
        assert_eq!(r.triples(), &[[0, 0, 0]]);
    }
}

#[cfg(test)]
mod properties {
    use proptest::prelude::*;

    use super::*;
    use crate::strategies::{concise_support, permutations, support, support_in, tensor};

    proptest! {
        #[test]
        fn kronecker_support_is_the_flattened_product(s1 in support(3), s2 in support(3)) {
            let k = kronecker_support(&s1, &s2);
            let d2 = s2.shape().dims();
            let mut product: Vec<Triple> = s1
                .iter()
                .flat_map(|a| s2.iter().map(move |b| std::array::from_fn(|x| a[x] * d2[x] + b[x])))
                .collect();
            product.sort();
            prop_assert_eq!(k.triples(), &product[..]);
        }

        #[test]
        fn products_and_sums_keep_conciseness(s1 in concise_support(3), s2 in concise_support(3)) {
            prop_assert!(direct_sum_support(&s1, &s2).is_concise());
            prop_assert!(kronecker_support(&s1, &s2).is_concise());
        }

        #[test]
        fn permutations_act_as_a_group(
            (s, p, q) in support(4).prop_flat_map(|s| {
                let shape = s.shape();
                (Just(s), permutations(shape), permutations(shape))
            })
        ) {
            let composed = apply_permutations(&s, &p.then(&q).unwrap()).unwrap();
            let stepwise = apply_permutations(&apply_permutations(&s, &p).unwrap(), &q).unwrap();
            prop_assert_eq!(&composed, &stepwise);
            prop_assert_eq!(apply_permutations(&composed, &p.then(&q).unwrap().inverse()).unwrap(), s);
        }

        #[test]
        fn tensors_store_no_zeros(t in tensor(3), u in tensor(3)) {
            let sum = {
                let mut sum = t.clone();
                for (idx, v) in t.entries() {
                    sum.add_term(*idx, -v.clone()).unwrap();
                }
                sum
            };
            prop_assert_eq!(sum.nnz(), 0);
            for x in [&t, &u, &kronecker(&t, &u), &direct_sum(&t, &u)] {
                prop_assert!(x.entries().values().all(|v| !v.is_zero()));
                prop_assert_eq!(Tensor::from_support(&x.support()).support(), x.support());
            }
        }

        #[test]
        fn restriction_keeps_only_chosen_slices(s in support_in(Shape::cube(3).unwrap()), mask in 0u32..512) {
            let sets: [Vec<usize>; 3] =
                std::array::from_fn(|x| (0..3).filter(|&i| mask >> (3 * x + i) & 1 == 1).collect());
            if sets.iter().all(|v| !v.is_empty()) {
                let r = s.restrict(&sets).unwrap();
                let expected = s.iter().filter(|t| (0..3).all(|x| sets[x].contains(&t[x]))).count();
                prop_assert_eq!(r.len(), expected);
            }
        }
    }
}
