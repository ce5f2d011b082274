//! Support-level deciders for the tight, oblique and free classes.
//!
//! Tightness is a linear condition: the weightings `tau` with
//! `tau_A(i) + tau_B(j) + tau_C(k) = 0` on `S` form a subspace `V` of
//! `Q^(a+b+c)`, and `S` is tight iff `V` is not contained in any of the finitely
//! many hyperplanes `tau_X(i) = tau_X(i')`. Over an infinite field that holds
//! iff it holds hyperplane by hyperplane, which is what [`decide_tight`] checks.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigInt, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{integer_multiple, Echelon, SparseRow};
use crate::tensor::{int, AxisPermutations, Shape, Support, Triple};

/// Three injective integer weightings with `tau_A(i) + tau_B(j) + tau_C(k) = 0` on a support.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TightWitness {
    #[serde(rename = "tauA")]
    tau_a: Vec<i64>,
    #[serde(rename = "tauB")]
    tau_b: Vec<i64>,
    #[serde(rename = "tauC")]
    tau_c: Vec<i64>,
}

impl TightWitness {
    /// Validates injectivity of each weighting; empty weightings are rejected.
    pub fn new(tau_a: Vec<i64>, tau_b: Vec<i64>, tau_c: Vec<i64>) -> Result<Self> {
        let w = TightWitness { tau_a, tau_b, tau_c };
        w.check_injective()?;
        Ok(w)
    }

    fn check_injective(&self) -> Result<()> {
        for axis in 0..3 {
            let tau = self.tau(axis);
            if tau.is_empty() {
                return Err(Error::InvalidInput(format!("tau on axis {axis} is empty")));
            }
            let distinct: BTreeSet<_> = tau.iter().collect();
            if distinct.len() != tau.len() {
                return Err(Error::Invariant(format!("tau on axis {axis} is not injective: {tau:?}")));
            }
        }
        Ok(())
    }

    pub fn tau_a(&self) -> &[i64] {
        &self.tau_a
    }

    pub fn tau_b(&self) -> &[i64] {
        &self.tau_b
    }

    pub fn tau_c(&self) -> &[i64] {
        &self.tau_c
    }

    pub fn tau(&self, axis: usize) -> &[i64] {
        match axis {
            0 => &self.tau_a,
            1 => &self.tau_b,
            2 => &self.tau_c,
            _ => panic!("axis {axis} out of range"),
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.tau_a.len(), self.tau_b.len(), self.tau_c.len()]
    }

    pub fn shape(&self) -> Result<Shape> {
        let [a, b, c] = self.dims();
        Shape::new(a, b, c)
    }

    /// `tau_A(i) + tau_B(j) + tau_C(k)`.
    pub fn sum(&self, t: &Triple) -> i64 {
        self.tau_a[t[0]] + self.tau_b[t[1]] + self.tau_c[t[2]]
    }

    /// Checks injectivity, dimensions and the zero-sum condition on every triple of `s`.
    pub fn verify(&self, s: &Support) -> Result<()> {
        self.check_injective()?;
        if self.dims() != s.shape().dims() {
            return Err(Error::Shape(format!(
                "witness dims {:?} do not match support shape {}",
                self.dims(),
                s.shape()
            )));
        }
        if let Some(t) = s.iter().find(|t| self.sum(t) != 0) {
            return Err(Error::Invariant(format!("witness sum at {t:?} is {}", self.sum(t))));
        }
        Ok(())
    }

    /// The full set of triples on which the weights sum to zero.
    pub fn zero_set(&self) -> Result<Support> {
        let shape = self.shape()?;
        Support::new(shape, shape.cells().filter(|t| self.sum(t) == 0))
    }

    /// Axis permutations sorting each factor by increasing weight.
    pub fn sorting_permutations(&self) -> AxisPermutations {
        AxisPermutations::sorting_by([&self.tau_a[..], &self.tau_b[..], &self.tau_c[..]])
    }

    /// The witness transported along `perms` (index `p(i)` receives weight `tau(i)`).
    pub fn permute(&self, perms: &AxisPermutations) -> TightWitness {
        let maps = perms.maps();
        let moved = |axis: usize| {
            let tau = self.tau(axis);
            let mut out = vec![0; tau.len()];
            for (i, &v) in tau.iter().enumerate() {
                out[maps[axis][i]] = v;
            }
            out
        };
        TightWitness { tau_a: moved(0), tau_b: moved(1), tau_c: moved(2) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TightDecision {
    Tight(TightWitness),
    NotTight,
}

impl TightDecision {
    pub fn witness(&self) -> Option<&TightWitness> {
        match self {
            TightDecision::Tight(w) => Some(w),
            TightDecision::NotTight => None,
        }
    }

    pub fn is_tight(&self) -> bool {
        matches!(self, TightDecision::Tight(_))
    }
}

/// True iff every two distinct triples differ in at least two coordinates.
pub fn is_free(s: &Support) -> bool {
    // Two triples differ in exactly one coordinate iff they agree on some pair of axes
    // and differ on the third; bucket by each pair of axes.
    for drop in 0..3 {
        let mut seen = BTreeSet::new();
        for t in s {
            let key: Vec<usize> = (0..3).filter(|&x| x != drop).map(|x| t[x]).collect();
            if !seen.insert(key) {
                return false;
            }
        }
    }
    true
}

fn comparable(s: &Triple, t: &Triple) -> bool {
    (s[0] <= t[0] && s[1] <= t[1] && s[2] <= t[2]) || (t[0] <= s[0] && t[1] <= s[1] && t[2] <= s[2])
}

/// True iff no two distinct triples are componentwise comparable.
pub fn is_antichain(s: &Support) -> bool {
    let v = s.triples();
    (0..v.len()).all(|x| (x + 1..v.len()).all(|y| !comparable(&v[x], &v[y])))
}

/// Rows of the constraint system `tau_A(i) + tau_B(j) + tau_C(k) = 0`;
/// unknowns are ordered `tau_A, tau_B, tau_C`.
fn incidence_rows(s: &Support) -> (Vec<SparseRow>, [usize; 3]) {
    let [a, b, _] = s.shape().dims();
    let offsets = [0, a, a + b];
    let rows = s
        .iter()
        .map(|t| (0..3).map(|x| (offsets[x] + t[x], int(1))).collect())
        .collect();
    (rows, offsets)
}

/// Decides support tightness with the default seed for witness extraction.
pub fn decide_tight(s: &Support) -> TightDecision {
    decide_tight_seeded(s, 0)
}

/// Decides support tightness; `seed` only affects which witness is returned.
pub fn decide_tight_seeded(s: &Support, seed: u64) -> TightDecision {
    let dims = s.shape().dims();
    let (rows, offsets) = incidence_rows(s);
    let ncols = dims.iter().sum();
    let mut ech = Echelon::new(ncols);
    for r in &rows {
        ech.insert(r);
    }
    let basis: Vec<Vec<BigInt>> = ech.kernel().iter().map(|v| integer_multiple(v)).collect();
    for axis in 0..3 {
        for i in 0..dims[axis] {
            for i2 in i + 1..dims[axis] {
                let (p, q) = (offsets[axis] + i, offsets[axis] + i2);
                if basis.iter().all(|v| v[p] == v[q]) {
                    return TightDecision::NotTight;
                }
            }
        }
    }
    let w = extract_witness(&basis, dims, offsets, seed)
        .expect("generic combination of a separating basis is injective");
    if let Err(e) = w.verify(s) {
        panic!("extracted witness failed verification: {e}");
    }
    TightDecision::Tight(w)
}

fn to_witness(v: &[BigInt], dims: [usize; 3], offsets: [usize; 3]) -> Option<TightWitness> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| num::Integer::gcd(&acc, x));
    let scaled: Vec<BigInt> = if g.is_zero() { v.to_vec() } else { v.iter().map(|x| x / &g).collect() };
    let part = |axis: usize| -> Option<Vec<i64>> {
        scaled[offsets[axis]..offsets[axis] + dims[axis]].iter().map(|x| x.to_i64()).collect()
    };
    TightWitness::new(part(0)?, part(1)?, part(2)?).ok()
}

/// Integer combination of the kernel basis that is injective on every axis.
///
/// Basis vectors are tried alone, then 88 seeded random combinations with coefficient
/// ranges doubling from 1 to 1000. The fallback uses coefficients
/// `N^t` with `N = 2D + 1`, where `D` bounds every coordinate difference inside one
/// basis vector; a nonzero balanced base-`N` expansion is nonzero, so separation by
/// any basis vector implies separation by the combination.
pub(crate) fn extract_witness(
    basis: &[Vec<BigInt>],
    dims: [usize; 3],
    offsets: [usize; 3],
    seed: u64,
) -> Option<TightWitness> {
    let n = basis.first().map_or(0, Vec::len);
    let combine = |coef: &[BigInt]| -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); n];
        for (c, v) in coef.iter().zip(basis) {
            for (o, x) in out.iter_mut().zip(v) {
                *o += c * x;
            }
        }
        out
    };
    // Small coefficients first so that witnesses stay readable.
    for v in basis {
        if let Some(w) = to_witness(v, dims, offsets) {
            return Some(w);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for radius in [1i64, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1000] {
        for _ in 0..8 {
            let coef: Vec<BigInt> = basis.iter().map(|_| BigInt::from(rng.gen_range(-radius..=radius))).collect();
            if let Some(w) = to_witness(&combine(&coef), dims, offsets) {
                return Some(w);
            }
        }
    }
    let mut d = BigInt::zero();
    for v in basis {
        for axis in 0..3 {
            let part = &v[offsets[axis]..offsets[axis] + dims[axis]];
            if let (Some(lo), Some(hi)) = (part.iter().min(), part.iter().max()) {
                d = d.max(hi - lo);
            }
        }
    }
    let base = 2 * d + 1;
    let mut coef = Vec::with_capacity(basis.len());
    let mut power = BigInt::from(1);
    for _ in basis {
        coef.push(power.clone());
        power *= &base;
    }
    to_witness(&combine(&coef), dims, offsets)
}

/// Axis orders under which a support becomes an antichain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObliqueWitness {
    pub perms: AxisPermutations,
}

impl ObliqueWitness {
    pub fn verify(&self, s: &Support) -> Result<()> {
        let p = s.permute(&self.perms)?;
        if !is_antichain(&p) {
            return Err(Error::Invariant("permuted support is not an antichain".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObliqueDecision {
    Oblique(ObliqueWitness),
    NotOblique,
    /// The node budget ran out before the search completed.
    Unknown { nodes: u64 },
}

pub const DEFAULT_OBLIQUE_BUDGET: u64 = 10_000_000;

/// Decides obliqueness exactly within `budget` search nodes.
///
/// Tight supports are answered by sorting each axis by its weight. Otherwise
/// orders of axis A and then axis B are enumerated by backtracking; once both are
/// fixed, every pair whose A and B comparisons do not already disagree forces a
/// strict comparison on axis C, and a C order exists iff those constraints are acyclic.
pub fn decide_oblique(s: &Support, budget: u64) -> ObliqueDecision {
    if let TightDecision::Tight(w) = decide_tight(s) {
        return ObliqueDecision::Oblique(ObliqueWitness { perms: w.sorting_permutations() });
    }
    if !is_free(s) {
        return ObliqueDecision::NotOblique;
    }
    let mut search = ObliqueSearch::new(s, budget);
    match search.run() {
        Some(Some(perms)) => ObliqueDecision::Oblique(ObliqueWitness { perms }),
        Some(None) => ObliqueDecision::NotOblique,
        None => ObliqueDecision::Unknown { nodes: search.nodes },
    }
}

struct ObliqueSearch<'a> {
    s: &'a Support,
    dims: [usize; 3],
    budget: u64,
    nodes: u64,
    /// Position of each index in the partial order of axes A and B.
    pos: [Vec<Option<usize>>; 2],
    /// Pairs of distinct triples that agree on axis C, grouped for the partial-B check.
    equal_c_pairs: Vec<(Triple, Triple)>,
}

fn sign(x: Option<usize>, y: Option<usize>) -> Option<i8> {
    match (x, y) {
        (Some(p), Some(q)) => Some((p as i64 - q as i64).signum() as i8),
        _ => None,
    }
}

impl<'a> ObliqueSearch<'a> {
    fn new(s: &'a Support, budget: u64) -> Self {
        let dims = s.shape().dims();
        let v = s.triples();
        let mut equal_c_pairs = Vec::new();
        for x in 0..v.len() {
            for y in x + 1..v.len() {
                if v[x][2] == v[y][2] {
                    equal_c_pairs.push((v[x], v[y]));
                }
            }
        }
        ObliqueSearch {
            s,
            dims,
            budget,
            nodes: 0,
            pos: [vec![None; dims[0]], vec![None; dims[1]]],
            equal_c_pairs,
        }
    }

    /// `None` on budget exhaustion, `Some(None)` when exhausted without success.
    fn run(&mut self) -> Option<Option<AxisPermutations>> {
        self.place(0, 0)
    }

    fn place(&mut self, axis: usize, next: usize) -> Option<Option<AxisPermutations>> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        if axis == 1 && !self.partial_b_ok() {
            return Some(None);
        }
        if next == self.dims[axis] {
            if axis == 0 {
                return self.place(1, 0);
            }
            return Some(self.complete_c());
        }
        for idx in 0..self.dims[axis] {
            if self.pos[axis][idx].is_some() {
                continue;
            }
            // Reversing all three orders preserves antichains, so index 0 of axis A
            // may be assumed to precede index 1.
            if axis == 0 && idx == 1 && self.pos[0][0].is_none() {
                continue;
            }
            self.pos[axis][idx] = Some(next);
            let r = self.place(axis, next + 1);
            self.pos[axis][idx] = None;
            match r {
                Some(None) => {}
                other => return other,
            }
        }
        Some(None)
    }

    /// Pairs with equal C coordinate need opposite strict comparisons on A and B.
    fn partial_b_ok(&self) -> bool {
        self.equal_c_pairs.iter().all(|(s, t)| {
            let da = sign(self.pos[0][s[0]], self.pos[0][t[0]]);
            let db = sign(self.pos[1][s[1]], self.pos[1][t[1]]);
            match (da, db) {
                (Some(x), Some(y)) => x * y < 0,
                _ => true,
            }
        })
    }

    fn complete_c(&self) -> Option<AxisPermutations> {
        let c = self.dims[2];
        // Edge u -> w means index u must precede index w on axis C.
        let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); c];
        let v = self.s.triples();
        for x in 0..v.len() {
            for y in x + 1..v.len() {
                let (s, t) = (v[x], v[y]);
                let da = sign(self.pos[0][s[0]], self.pos[0][t[0]]).unwrap();
                let db = sign(self.pos[1][s[1]], self.pos[1][t[1]]).unwrap();
                if da * db < 0 {
                    continue;
                }
                let d = if da != 0 { da } else { db };
                if s[2] == t[2] {
                    return None;
                }
                if d > 0 {
                    succ[s[2]].insert(t[2]);
                } else if d < 0 {
                    succ[t[2]].insert(s[2]);
                }
            }
        }
        let mut indeg = vec![0usize; c];
        for out in &succ {
            for &w in out {
                indeg[w] += 1;
            }
        }
        let mut ready: BTreeSet<usize> = (0..c).filter(|&u| indeg[u] == 0).collect();
        let mut map_c = vec![0; c];
        let mut placed = 0;
        while let Some(u) = ready.pop_first() {
            map_c[u] = placed;
            placed += 1;
            for &w in &succ[u] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.insert(w);
                }
            }
        }
        if placed < c {
            return None;
        }
        let map = |axis: usize| self.pos[axis].iter().map(|p| p.unwrap()).collect::<Vec<_>>();
        AxisPermutations::new([map(0), map(1), map_c]).ok()
    }
}

/// Maximum antichain size in `[a] x [b] x [c]` and the central slice attaining it.
///
/// With `a <= b <= c`, the bound is `ab - floor((a+b-c)^2 / 4)` if `a + b >= c`
/// and `ab` otherwise; the slice is `i + j + k = floor((a+b+c-3)/2)`.
pub fn max_oblique_size(a: usize, b: usize, c: usize) -> Result<(usize, Support)> {
    let shape = Shape::new(a, b, c)?;
    let mut d = [a, b, c];
    d.sort_unstable();
    let [x, y, z] = d;
    let bound = if x + y >= z { x * y - (x + y - z).pow(2) / 4 } else { x * y };
    let h = (a + b + c - 3) / 2;
    let slice = crate::constructions::rank_slice(shape, h);
    if slice.len() != bound {
        return Err(Error::Invariant(format!(
            "central slice of {shape} has {} elements, bound is {bound}",
            slice.len()
        )));
    }
    Ok((bound, slice))
}

/// Maximal antichains of `[a] x [b] x [c]`, as maximal cliques of the incomparability graph.
pub fn maximal_antichains(shape: Shape) -> Vec<Support> {
    let cells: Vec<Triple> = shape.cells().collect();
    let n = cells.len();
    assert!(n <= 128, "maximal antichain enumeration is limited to 128 cells");
    let adj: Vec<u128> = (0..n)
        .map(|x| {
            (0..n)
                .filter(|&y| y != x && !comparable(&cells[x], &cells[y]))
                .fold(0u128, |m, y| m | (1 << y))
        })
        .collect();
    let mut out = Vec::new();
    let all = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    bron_kerbosch(&adj, 0, all, 0, &mut out);
    let mut supports: Vec<Support> = out
        .into_iter()
        .map(|mask| {
            Support::new(shape, (0..n).filter(|&x| mask >> x & 1 == 1).map(|x| cells[x]))
                .expect("grid cells are in range")
        })
        .collect();
    supports.sort_by(|p, q| p.triples().cmp(q.triples()));
    supports
}

fn bron_kerbosch(adj: &[u128], r: u128, mut p: u128, mut x: u128, out: &mut Vec<u128>) {
    if p == 0 {
        if x == 0 {
            out.push(r);
        }
        return;
    }
    let pivot_src = p | x;
    let pivot = (0..adj.len())
        .filter(|&u| pivot_src >> u & 1 == 1)
        .max_by_key(|&u| (adj[u] & p).count_ones())
        .unwrap();
    let mut cand = p & !adj[pivot];
    while cand != 0 {
        let v = cand.trailing_zeros() as usize;
        cand &= cand - 1;
        bron_kerbosch(adj, r | 1 << v, p & adj[v], x & adj[v], out);
        p &= !(1 << v);
        x |= 1 << v;
    }
}

/// The 12 symmetries of `[m]^3` used by the census: factor permutations, optionally
/// composed with the reversal `(i, j, k) -> (m-1-i, m-1-j, m-1-k)`.
pub fn census_group_images(s: &Support) -> Vec<Support> {
    const ORDERS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let m = s.shape().cube_side().expect("census group acts on cubes");
    let mut out = Vec::with_capacity(12);
    for order in ORDERS {
        let p = s.permute_factors(order);
        let rev = Support::new(p.shape(), p.iter().map(|t| t.map(|x| m - 1 - x))).unwrap();
        out.push(p);
        out.push(rev);
    }
    out
}

/// Lexicographically smallest sorted triple list in the orbit of `s`.
pub fn census_canonical_form(s: &Support) -> Support {
    census_group_images(s)
        .into_iter()
        .min_by(|p, q| p.triples().cmp(q.triples()))
        .unwrap()
}

#[derive(Debug, Clone)]
pub struct CensusOrbit {
    pub representative: Support,
    pub orbit_size: usize,
    pub decision: TightDecision,
}

#[derive(Debug, Clone)]
pub struct CensusReport {
    pub maximal: usize,
    pub concise: usize,
    pub orbits: Vec<CensusOrbit>,
    /// For each entry of [`census_reference_table`], the index of the matching orbit.
    pub reference_matches: Vec<Option<usize>>,
}

impl CensusReport {
    pub fn all_tight(&self) -> bool {
        self.orbits.iter().all(|o| o.decision.is_tight())
    }

    /// Every reference support matches an orbit and no two share one.
    pub fn reference_matching_is_bijective(&self) -> bool {
        let hits: Vec<usize> = self.reference_matches.iter().flatten().copied().collect();
        let distinct: BTreeSet<_> = hits.iter().collect();
        hits.len() == self.reference_matches.len() && distinct.len() == hits.len()
    }
}

/// Census of maximal antichains in `[3]^3` classified up to the 12-element symmetry group.
pub fn census_m3() -> CensusReport {
    let shape = Shape::cube(3).unwrap();
    let all = maximal_antichains(shape);
    let concise: Vec<&Support> = all.iter().filter(|s| s.is_concise()).collect();
    let mut orbits: BTreeMap<Vec<Triple>, usize> = BTreeMap::new();
    for s in &concise {
        *orbits.entry(census_canonical_form(s).triples().to_vec()).or_default() += 1;
    }
    let orbits: Vec<CensusOrbit> = orbits
        .into_iter()
        .map(|(triples, orbit_size)| {
            let representative = Support::new(shape, triples).unwrap();
            let decision = decide_tight(&representative);
            CensusOrbit { representative, orbit_size, decision }
        })
        .collect();
    let reference_matches = census_reference_table()
        .iter()
        .map(|(s, _)| {
            let canon = census_canonical_form(s);
            orbits.iter().position(|o| o.representative == canon)
        })
        .collect();
    CensusReport { maximal: all.len(), concise: concise.len(), orbits, reference_matches }
}

/// Thirteen published orbit representatives of concise maximal antichains in `[3]^3`,
/// each with its published weighting.
///
/// The weighting printed for row 7 sums to 4 at `(0, 0, 2)` and does not certify
/// that support. It is kept verbatim, and [`census_m3`] derives its own witnesses.
pub fn census_reference_table() -> Vec<(Support, TightWitness)> {
    type Row = (&'static [[usize; 3]], [[i64; 3]; 3]);
    const TABLE: [Row; 13] = [
        (&[[0, 0, 2], [0, 1, 1], [1, 0, 1], [2, 2, 0]], [[-2, -3, 1], [2, 1, 0], [-1, 1, 0]]),
        (&[[0, 0, 2], [0, 2, 0], [1, 1, 1], [2, 0, 0]], [[1, -2, 2], [-1, 1, 0], [-1, 1, 0]]),
        (&[[0, 0, 2], [0, 2, 1], [1, 1, 0], [2, 0, 1]], [[-1, 2, -2], [1, 2, 0], [-4, 1, 0]]),
        (&[[0, 0, 2], [0, 2, 1], [1, 2, 0], [2, 1, 1]], [[-2, 2, -1], [2, -1, 0], [-2, 2, 0]]),
        (
            &[[0, 0, 2], [0, 1, 1], [0, 2, 0], [1, 0, 1], [2, 1, 0]],
            [[-1, -3, 2], [1, -1, 2], [-1, 2, 0]],
        ),
        (
            &[[0, 0, 2], [0, 1, 1], [1, 0, 1], [1, 2, 0], [2, 1, 0]],
            [[0, -1, 2], [0, -1, 2], [-1, 1, 0]],
        ),
        (
            &[[0, 0, 2], [0, 1, 1], [1, 2, 0], [2, 0, 1], [2, 1, 0]],
            [[2, -3, 1], [2, -3, 1], [2, 1, 0]],
        ),
        (
            &[[0, 0, 2], [0, 2, 0], [1, 1, 1], [2, 0, 1], [2, 1, 0]],
            [[2, -2, 1], [-2, 1, 0], [-2, 1, 0]],
        ),
        (
            &[[0, 0, 2], [0, 2, 1], [1, 1, 1], [2, 0, 1], [2, 2, 0]],
            [[0, 1, 2], [0, 1, 2], [-4, -2, 0]],
        ),
        (
            &[[0, 1, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]],
            [[-2, 2, 1], [-2, 1, 0], [-2, 1, 0]],
        ),
        (
            &[[0, 0, 2], [0, 1, 1], [0, 2, 0], [1, 0, 1], [1, 1, 0], [2, 0, 0]],
            [[-2, 1, 4], [-2, 1, 4], [-2, 1, 4]],
        ),
        (
            &[[0, 0, 2], [0, 2, 1], [1, 1, 1], [1, 2, 0], [2, 0, 1], [2, 1, 0]],
            [[-2, 1, 4], [-2, 1, 4], [-5, -2, 4]],
        ),
        (
            &[[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 1, 1], [1, 2, 0], [2, 0, 1], [2, 1, 0]],
            [[-1, 0, 1], [-1, 0, 1], [-1, 0, 1]],
        ),
    ];
    let shape = Shape::cube(3).unwrap();
    TABLE
        .iter()
        .map(|(triples, [ta, tb, tc])| {
            let s = Support::new(shape, triples.iter().copied()).unwrap();
            let w = TightWitness::new(ta.to_vec(), tb.to_vec(), tc.to_vec()).unwrap();
            (s, w)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{free_max_support, matmul, oblique_not_tight_4, tight_max_support};

    fn sup(m: usize, t: &[[usize; 3]]) -> Support {
        Support::new(Shape::cube(m).unwrap(), t.iter().copied()).unwrap()
    }

    #[test]
    fn freeness() {
        assert!(is_free(&free_max_support(3).unwrap()));
        assert!(!is_free(&sup(2, &[[0, 0, 0], [0, 0, 1]])));
        assert!(is_free(&matmul(2).unwrap().support()));
    }

    #[test]
    fn antichains() {
        assert!(is_antichain(&tight_max_support(5).unwrap().0));
        assert!(!is_antichain(&sup(2, &[[0, 0, 0], [1, 1, 1]])));
        assert!(is_antichain(&oblique_not_tight_4().support()));
    }

    #[test]
    fn diagonal_is_tight() {
        let s = sup(2, &[[0, 0, 0], [1, 1, 1]]);
        let w = decide_tight(&s).witness().cloned().unwrap();
        w.verify(&s).unwrap();
        // The published witness for this example also verifies.
        TightWitness::new(vec![0, 1], vec![0, 1], vec![0, -2]).unwrap().verify(&s).unwrap();
    }

    #[test]
    fn tmax5_is_tight_and_oblique_example_is_not() {
        let (s, constructed) = tight_max_support(5).unwrap();
        constructed.verify(&s).unwrap();
        assert_eq!(constructed.tau_b(), &[-2, -1, 0, 1, 2]);
        assert!(decide_tight(&s).is_tight());
        assert_eq!(decide_tight(&oblique_not_tight_4().support()), TightDecision::NotTight);
    }

    #[test]
    fn witness_rejects_collisions() {
        assert!(TightWitness::new(vec![0, 0], vec![1], vec![-1]).is_err());
        let s = sup(2, &[[0, 0, 0]]);
        let w = TightWitness::new(vec![0, 1], vec![0, 1], vec![0, 5]).unwrap();
        w.verify(&s).unwrap();
        let bad = TightWitness::new(vec![1, 0], vec![0, 1], vec![0, 5]).unwrap();
        assert!(bad.verify(&s).is_err());
    }

    #[test]
    fn fallback_combination_is_injective() {
        // Each basis vector separates only some pairs of axis A; layout is 3x1x1.
        let v = |x: [i64; 5]| x.map(BigInt::from).to_vec();
        let basis = vec![v([0, 1, 1, 0, 0]), v([0, 0, 1, 0, 0])];
        let w = extract_witness(&basis, [3, 1, 1], [0, 3, 4], 0).unwrap();
        let distinct: BTreeSet<_> = w.tau_a().iter().collect();
        assert_eq!(distinct.len(), 3);
    }

    #[test]
    fn oblique_decisions() {
        let (s, _) = tight_max_support(4).unwrap();
        match decide_oblique(&s, DEFAULT_OBLIQUE_BUDGET) {
            ObliqueDecision::Oblique(w) => w.verify(&s).unwrap(),
            other => panic!("{other:?}"),
        }
        let ont = oblique_not_tight_4().support();
        match decide_oblique(&ont, DEFAULT_OBLIQUE_BUDGET) {
            ObliqueDecision::Oblique(w) => w.verify(&ont).unwrap(),
            other => panic!("{other:?}"),
        }
        let full = Support::full(Shape::cube(2).unwrap());
        assert_eq!(decide_oblique(&full, DEFAULT_OBLIQUE_BUDGET), ObliqueDecision::NotOblique);
    }

    #[test]
    fn oblique_budget_exhaustion_is_unknown() {
        let ont = oblique_not_tight_4().support();
        assert!(matches!(decide_oblique(&ont, 1), ObliqueDecision::Unknown { .. }));
    }

    #[test]
    fn free_but_not_oblique() {
        // The maximal free support in [3]^3 has 9 > 7 elements, above the antichain bound.
        let f = free_max_support(3).unwrap();
        assert_eq!(decide_oblique(&f, DEFAULT_OBLIQUE_BUDGET), ObliqueDecision::NotOblique);
    }

    #[test]
    fn max_oblique_examples() {
        for m in 1..=6 {
            assert_eq!(max_oblique_size(m, m, m).unwrap().0, (3 * m * m).div_ceil(4));
        }
        assert_eq!(max_oblique_size(2, 2, 4).unwrap().0, 4);
        let (n, s) = max_oblique_size(2, 3, 3).unwrap();
        assert_eq!(n, 5);
        assert!(is_antichain(&s));
        assert_eq!(max_oblique_size(4, 2, 2).unwrap().0, 4);
    }

    #[test]
    fn reference_table_witnesses_verify_except_row_seven() {
        for (n, (s, w)) in census_reference_table().into_iter().enumerate() {
            assert!(s.is_concise());
            assert!(is_antichain(&s));
            if n == 6 {
                assert!(w.verify(&s).is_err());
                decide_tight(&s).witness().unwrap().verify(&s).unwrap();
            } else {
                w.verify(&s).unwrap();
            }
        }
    }

    #[test]
    fn canonical_form_is_orbit_invariant() {
        let s = census_reference_table()[3].0.clone();
        let c = census_canonical_form(&s);
        for img in census_group_images(&s) {
            assert_eq!(census_canonical_form(&img), c);
        }
    }

    #[test]
    fn census_counts() {
        let r = census_m3();
        assert_eq!((r.maximal, r.concise, r.orbits.len()), (144, 80, 13));
        assert_eq!(r.orbits.iter().map(|o| o.orbit_size).sum::<usize>(), 80);
        assert!(r.all_tight());
        assert!(r.reference_matching_is_bijective());
    }

    #[test]
    fn witness_permutation_transports_zero_sums() {
        let (s, w) = tight_max_support(4).unwrap();
        let p = w.sorting_permutations();
        let ps = s.permute(&p).unwrap();
        w.permute(&p).verify(&ps).unwrap();
        let sorted = w.permute(&p);
        assert!(sorted.tau_a().windows(2).all(|x| x[0] < x[1]));
    }
}

#[cfg(test)]
mod properties {
    use proptest::prelude::*;

    use super::*;
    use crate::constructions::ceil_three_quarters_square;
    use crate::strategies::{permutations, support, support_in};

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn tight_implies_oblique_implies_free(s in support(4), seed in any::<u64>()) {
            let d = decide_tight_seeded(&s, seed);
            prop_assert_eq!(d.is_tight(), decide_tight(&s).is_tight());
            if let Some(w) = d.witness() {
                prop_assert!(w.verify(&s).is_ok());
                if let Some(m) = s.shape().cube_side() {
                    prop_assert!(s.len() <= ceil_three_quarters_square(m));
                }
            }
            match decide_oblique(&s, DEFAULT_OBLIQUE_BUDGET) {
                ObliqueDecision::Oblique(w) => {
                    prop_assert!(w.verify(&s).is_ok());
                    prop_assert!(is_free(&s.permute(&w.perms).unwrap()));
                    prop_assert!(is_free(&s));
                }
                ObliqueDecision::NotOblique => prop_assert!(!d.is_tight()),
                ObliqueDecision::Unknown { .. } => prop_assert!(false, "undecided for m <= 4"),
            }
        }

        #[test]
        fn decisions_ignore_relabeling(
            (s, p, order) in support(4).prop_flat_map(|s| {
                let shape = s.shape();
                (Just(s), permutations(shape), Just([0usize, 1, 2]).prop_shuffle())
            })
        ) {
            let moved = s.permute(&p).unwrap();
            let swapped = s.permute_factors([order[0], order[1], order[2]]);
            let tight = decide_tight(&s).is_tight();
            prop_assert_eq!(decide_tight(&moved).is_tight(), tight);
            prop_assert_eq!(decide_tight(&swapped).is_tight(), tight);
            prop_assert_eq!(is_free(&moved), is_free(&s));
            prop_assert_eq!(is_free(&swapped), is_free(&s));
            let oblique = |x: &Support| matches!(decide_oblique(x, DEFAULT_OBLIQUE_BUDGET), ObliqueDecision::Oblique(_));
            prop_assert_eq!(oblique(&moved), oblique(&s));
        }

        #[test]
        fn census_canonical_form_is_constant_on_orbits(s in support_in(Shape::cube(3).unwrap())) {
            let c = census_canonical_form(&s);
            for img in census_group_images(&s) {
                prop_assert_eq!(census_canonical_form(&img), c.clone());
                prop_assert!(img.triples() >= c.triples());
            }
        }
    }
}
