//! Annihilator Lie algebras, support-span stabilizers and dimension formulas.
//!
//! An element `L = (X, Y, Z)` of `gl(A) + gl(B) + gl(C)` acts on a tensor by
//!
//! ```text
//! (L.T)[i,j,k] = sum_i' X[i][i'] T[i',j,k] + sum_j' Y[j][j'] T[i,j',k] + sum_k' Z[k][k'] T[i,j,k']
//! ```
//!
//! The two-dimensional center `{(x I, y I, -(x+y) I)}` kills every tensor, so the
//! annihilator dimension is the kernel dimension minus 2.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::{BigInt, Zero};
use serde::Serialize;

use crate::deciders::{extract_witness, TightWitness};
use crate::error::{Error, Result};
use crate::linalg::{integer_multiple, nullspace, rank, Echelon, SparseRow};
use crate::tensor::{direct_sum, kronecker, Rational, Support, Tensor};

/// A triple of square matrices `(X, Y, Z)` acting on `A (x) B (x) C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieElement {
    pub x: Vec<Vec<Rational>>,
    pub y: Vec<Vec<Rational>>,
    pub z: Vec<Vec<Rational>>,
}

impl LieElement {
    fn matrices(&self) -> [&Vec<Vec<Rational>>; 3] {
        [&self.x, &self.y, &self.z]
    }

    /// Reassembles an element from a flat vector ordered `X, Y, Z`, each row-major.
    pub fn from_flat(v: &[Rational], dims: [usize; 3]) -> LieElement {
        let mut off = 0;
        let mut mats: Vec<Vec<Vec<Rational>>> = Vec::with_capacity(3);
        for &d in &dims {
            mats.push((0..d).map(|r| v[off + r * d..off + (r + 1) * d].to_vec()).collect());
            off += d * d;
        }
        let z = mats.pop().unwrap();
        let y = mats.pop().unwrap();
        let x = mats.pop().unwrap();
        LieElement { x, y, z }
    }

    /// The Leibniz action `L.T`.
    pub fn act(&self, t: &Tensor) -> Tensor {
        let mut out = Tensor::zero(t.shape());
        let mats = self.matrices();
        for (idx, v) in t.entries() {
            for axis in 0..3 {
                let m = mats[axis];
                for (row, coefs) in m.iter().enumerate() {
                    let c = &coefs[idx[axis]];
                    if !c.is_zero() {
                        let mut target = *idx;
                        target[axis] = row;
                        out.add_term(target, c * v).expect("target in range");
                    }
                }
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        self.matrices()
            .iter()
            .all(|m| m.iter().enumerate().all(|(r, row)| row.iter().enumerate().all(|(c, v)| r == c || v.is_zero())))
    }

    pub fn diagonal(&self, axis: usize) -> Vec<Rational> {
        let m = self.matrices()[axis];
        (0..m.len()).map(|i| m[i][i].clone()).collect()
    }
}

/// Kernel of the action map on a tensor, with the annihilator dimension modulo the center.
#[derive(Debug, Clone)]
pub struct LieSolveReport {
    pub dims: [usize; 3],
    pub kernel_dim: usize,
    pub annihilator_dim: usize,
    pub basis: Vec<LieElement>,
}

/// Rows of the action matrix, one per output cell that any term can reach.
fn action_rows(t: &Tensor) -> (Vec<SparseRow>, usize) {
    let d = t.shape().dims();
    let offsets = [0, d[0] * d[0], d[0] * d[0] + d[1] * d[1]];
    let ncols = offsets[2] + d[2] * d[2];
    let mut rows: BTreeMap<[usize; 3], BTreeMap<usize, Rational>> = BTreeMap::new();
    for (idx, v) in t.entries() {
        for axis in 0..3 {
            for row in 0..d[axis] {
                let mut target = *idx;
                target[axis] = row;
                // Unknown M_axis[row][idx[axis]].
                let col = offsets[axis] + row * d[axis] + idx[axis];
                *rows.entry(target).or_default().entry(col).or_insert_with(Rational::zero) += v;
            }
        }
    }
    let rows = rows
        .into_values()
        .map(|r| r.into_iter().filter(|(_, v)| !v.is_zero()).collect())
        .collect();
    (rows, ncols)
}

/// Exact annihilator of `t`, with a verified kernel basis.
pub fn annihilator(t: &Tensor) -> Result<LieSolveReport> {
    let dims = t.shape().dims();
    let (rows, ncols) = action_rows(t);
    let kernel = nullspace(&rows, ncols);
    let basis: Vec<LieElement> = kernel.iter().map(|v| LieElement::from_flat(v, dims)).collect();
    for (n, l) in basis.iter().enumerate() {
        if l.act(t).nnz() != 0 {
            return Err(Error::Invariant(format!("kernel basis element {n} does not annihilate")));
        }
    }
    report(dims, basis.len(), basis)
}

/// Annihilator dimension only, skipping the kernel basis.
pub fn annihilator_dim(t: &Tensor) -> Result<usize> {
    let (rows, ncols) = action_rows(t);
    let kernel_dim = ncols - rank(&rows, ncols);
    Ok(report(t.shape().dims(), kernel_dim, Vec::new())?.annihilator_dim)
}

fn report(dims: [usize; 3], kernel_dim: usize, basis: Vec<LieElement>) -> Result<LieSolveReport> {
    let annihilator_dim = kernel_dim
        .checked_sub(2)
        .ok_or_else(|| Error::Invariant(format!("kernel dimension {kernel_dim} is below the center")))?;
    Ok(LieSolveReport { dims, kernel_dim, annihilator_dim, basis })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TightEvidence {
    /// Trivial annihilator: no regular semisimple element exists in any basis.
    NotTight,
    /// A diagonal element of the kernel with distinct eigenvalues on every factor.
    TightWitnessFound(TightWitness),
    Inconclusive,
}

/// Looks for a regular semisimple element among the diagonal elements of the kernel.
///
/// The diagonal part of the kernel is computed exactly as the combinations of basis
/// elements whose off-diagonal entries cancel; a generic integer combination of it is
/// then tested for distinct eigenvalues. Diagonal `(u, v, w)` kills `T` iff
/// `u_i + v_j + w_k = 0` on the support, so a hit is a weighting of the support.
pub fn has_regular_semisimple(report: &LieSolveReport, seed: u64) -> TightEvidence {
    if report.annihilator_dim == 0 {
        return TightEvidence::NotTight;
    }
    if report.basis.len() != report.kernel_dim {
        return TightEvidence::Inconclusive;
    }
    let dims = report.dims;
    // One constraint row per off-diagonal matrix position, columns index basis elements.
    let mut rows: Vec<SparseRow> = Vec::new();
    for axis in 0..3 {
        for r in 0..dims[axis] {
            for c in 0..dims[axis] {
                if r == c {
                    continue;
                }
                let row: SparseRow = report
                    .basis
                    .iter()
                    .enumerate()
                    .filter_map(|(n, l)| {
                        let v = &l.matrices()[axis][r][c];
                        (!v.is_zero()).then(|| (n, v.clone()))
                    })
                    .collect();
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
    }
    let combos = nullspace(&rows, report.basis.len());
    let offsets = [0, dims[0], dims[0] + dims[1]];
    let diagonal_basis: Vec<Vec<BigInt>> = combos
        .iter()
        .map(|coef| {
            let mut diag = vec![Rational::zero(); dims.iter().sum()];
            for (c, l) in coef.iter().zip(&report.basis) {
                if c.is_zero() {
                    continue;
                }
                for axis in 0..3 {
                    for (i, v) in l.diagonal(axis).into_iter().enumerate() {
                        diag[offsets[axis] + i] += c * v;
                    }
                }
            }
            integer_multiple(&diag)
        })
        .collect();
    if diagonal_basis.is_empty() {
        return TightEvidence::Inconclusive;
    }
    match extract_witness(&diagonal_basis, dims, offsets, seed) {
        Some(w) => TightEvidence::TightWitnessFound(w),
        None => TightEvidence::Inconclusive,
    }
}

/// Dimension of `{L : L <S> subset <S>}`, where `<S>` is the coordinate span of `S`.
///
/// `L e_s` has coefficient `M_X[t_X][s_X]` on each `e_t` that differs from `s` on axis
/// `X` alone, so the stabilizer is cut out by the vanishing of single entries.
pub fn span_stabilizer_dim(s: &Support) -> usize {
    let dims = s.shape().dims();
    let total: usize = dims.iter().map(|d| d * d).sum();
    total - span_stabilizer_forced_entries(s).len()
}

/// Matrix entries `(axis, row, col)` that must vanish on the span stabilizer.
pub fn span_stabilizer_forced_entries(s: &Support) -> std::collections::BTreeSet<(usize, usize, usize)> {
    let dims = s.shape().dims();
    let mut forced = std::collections::BTreeSet::new();
    for t in s {
        for axis in 0..3 {
            for v in 0..dims[axis] {
                if v == t[axis] {
                    continue;
                }
                let mut u = *t;
                u[axis] = v;
                if !s.contains(&u) {
                    forced.insert((axis, v, t[axis]));
                }
            }
        }
    }
    forced
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Class {
    MaMu,
    Tight,
    Oblique,
    Free,
    Ambient,
}

impl FromStr for Class {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mamu" => Ok(Class::MaMu),
            "tight" => Ok(Class::Tight),
            "oblique" => Ok(Class::Oblique),
            "free" => Ok(Class::Free),
            "ambient" => Ok(Class::Ambient),
            _ => Err(Error::InvalidInput(format!(
                "unknown class {s:?}; expected MaMu, Tight, Oblique, Free or Ambient"
            ))),
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Closed-form dimension of the closure of a class in `C^m (x) C^m (x) C^m`.
///
/// Defined for `m >= 2`. At `m = 2` the Tight, Oblique and Free forms exceed `m^3 = 8`,
/// so they are rejected there as outside the range where they are dimensions.
pub fn class_dimension(class: Class, m: usize) -> Result<usize> {
    if class == Class::Ambient {
        return Ok(m * m * m);
    }
    if m < 2 {
        return Err(Error::InvalidInput(format!("class dimensions need m >= 2, got {m}")));
    }
    let value = match class {
        Class::MaMu => {
            let n = (m as f64).sqrt().round() as usize;
            if n * n != m {
                return Err(Error::InvalidInput(format!("MaMu needs m to be a perfect square, got {m}")));
            }
            3 * m * m - 3 * m
        }
        Class::Tight | Class::Oblique => 3 * m * m + (3 * m * m).div_ceil(4) - 3 * m,
        Class::Free => 4 * m * m - 3 * m,
        Class::Ambient => unreachable!(),
    };
    if value > m * m * m {
        return Err(Error::Domain(format!(
            "closed form {value} for {class} exceeds the ambient dimension {} at m = {m}",
            m * m * m
        )));
    }
    Ok(value)
}

/// `3m^2 - 3m + |S|`: the dimension of the orbit closure of the span of a concise free support.
pub fn incidence_dimension(s: &Support) -> Result<usize> {
    let m = s.shape().cube_side().ok_or_else(|| Error::Shape("support must live in a cube".into()))?;
    Ok(3 * m * m - 3 * m + s.len())
}

#[derive(Debug, Clone, Serialize)]
pub struct PropagationReport {
    pub dim_t: usize,
    pub dim_s: usize,
    pub dim_direct_sum: usize,
    pub dim_kronecker: usize,
    /// `dim(T + S) = dim T + dim S`, dimensions taken modulo the center.
    pub additive: bool,
    /// Kernel dimensions in `gl + gl + gl` add up under the direct sum. This is the
    /// block-diagonal statement; modulo the center it reads `dim(T + S) = dim T + dim S + 2`,
    /// because each summand brings its own two-dimensional center.
    pub kernel_additive: bool,
    /// `dim(T x S) >= dim T + dim S`.
    pub kronecker_superadditive: bool,
    /// Both trivial implies the Kronecker product trivial; vacuously true otherwise.
    pub trivial_propagates: bool,
    /// `dim(T x S) > dim T + dim S`.
    pub kronecker_strict: bool,
}

fn require_concise(t: &Tensor, name: &str) -> Result<()> {
    match t.first_degenerate_flattening() {
        None => Ok(()),
        Some(axis) => Err(Error::Precondition(format!(
            "{name} is not concise: flattening {} is degenerate",
            ["A", "B", "C"][axis]
        ))),
    }
}

/// Annihilator dimensions of `T`, `S`, `T + S` and `T x S` with the three propagation verdicts.
pub fn check_propagation(t: &Tensor, s: &Tensor) -> Result<PropagationReport> {
    require_concise(t, "first tensor")?;
    require_concise(s, "second tensor")?;
    let dim_t = annihilator_dim(t)?;
    let dim_s = annihilator_dim(s)?;
    let dim_direct_sum = annihilator_dim(&direct_sum(t, s))?;
    let dim_kronecker = annihilator_dim(&kronecker(t, s))?;
    Ok(PropagationReport {
        dim_t,
        dim_s,
        dim_direct_sum,
        dim_kronecker,
        additive: dim_direct_sum == dim_t + dim_s,
        kernel_additive: dim_direct_sum + 2 == (dim_t + 2) + (dim_s + 2),
        kronecker_superadditive: dim_kronecker >= dim_t + dim_s,
        trivial_propagates: !(dim_t == 0 && dim_s == 0) || dim_kronecker == 0,
        kronecker_strict: dim_kronecker > dim_t + dim_s,
    })
}

/// Rank of the full linear system defining the span stabilizer; used to cross-check
/// the entry-counting shortcut.
pub fn span_stabilizer_dim_by_elimination(s: &Support) -> usize {
    let dims = s.shape().dims();
    let offsets = [0, dims[0] * dims[0], dims[0] * dims[0] + dims[1] * dims[1]];
    let ncols = offsets[2] + dims[2] * dims[2];
    let mut ech = Echelon::new(ncols);
    // Coefficient of e_u in L e_t for every t in S and every u outside S.
    for t in s {
        let mut coeffs: BTreeMap<[usize; 3], Vec<usize>> = BTreeMap::new();
        for axis in 0..3 {
            for row in 0..dims[axis] {
                let mut u = *t;
                u[axis] = row;
                coeffs.entry(u).or_default().push(offsets[axis] + row * dims[axis] + t[axis]);
            }
        }
        for (u, cols) in coeffs {
            if s.contains(&u) {
                continue;
            }
            let row: SparseRow = cols.into_iter().map(|c| (c, Rational::from_integer(1.into()))).collect();
            ech.insert(&row);
        }
    }
    ncols - ech.rank()
}


#[cfg(test)]
mod properties {
    use proptest::prelude::*;

    use super::*;
    use crate::constructions::generic_on_support;
    use crate::deciders::decide_tight;
    use crate::strategies::{permutations, support, tensor};
    use crate::tensor::rat;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn annihilator_ignores_relabeling_and_scaling(
            (t, p, num) in tensor(3).prop_flat_map(|t| {
                let shape = t.shape();
                (Just(t), permutations(shape), (1i64..=7).prop_union(-7i64..=-1))
            })
        ) {
            let report = annihilator(&t).unwrap();
            prop_assert_eq!(report.basis.len(), report.kernel_dim);
            for l in &report.basis {
                prop_assert_eq!(l.act(&t).nnz(), 0);
            }
            let dim = report.annihilator_dim;
            prop_assert_eq!(annihilator_dim(&t).unwrap(), dim);
            prop_assert_eq!(annihilator_dim(&t.permute(&p).unwrap()).unwrap(), dim);
            prop_assert_eq!(annihilator_dim(&t.scale(&rat(num, 3))).unwrap(), dim);
        }

        #[test]
        fn generic_tensors_on_tight_supports_have_a_torus_element(s in support(3), seed in any::<u64>()) {
            if !s.is_empty() && decide_tight(&s).is_tight() {
                prop_assert!(annihilator_dim(&generic_on_support(&s, seed)).unwrap() >= 1);
            }
        }
    }
}
