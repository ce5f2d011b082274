//! Support functionals at coordinate flags.
//!
//! For a support `S` the incompressibility set is the downward closure of `S`; the
//! functional is `2^max sum_X theta_X H(p_X)` over probability distributions `p` on
//! that set, where `p_X` is the marginal on factor `X` and `H` is the base-2 entropy.
//! This is the only module that uses floating point.

use std::collections::BTreeSet;

use num::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{AxisPermutations, Rational, Shape, Support, Triple};

/// Nonnegative weights `(theta_A, theta_B, theta_C)` summing to one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectralWeights {
    #[serde(serialize_with = "serialize_rationals")]
    theta: [Rational; 3],
}

fn serialize_rationals<S: serde::Serializer>(v: &[Rational; 3], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(3))?;
    for r in v {
        seq.serialize_element(&crate::tensor::format_rational(r))?;
    }
    seq.end()
}

impl SpectralWeights {
    pub fn new(theta: [Rational; 3]) -> Result<Self> {
        if theta.iter().any(Signed::is_negative) {
            return Err(Error::InvalidInput("weights must be nonnegative".into()));
        }
        let sum = theta.iter().fold(Rational::zero(), |acc, x| acc + x);
        if sum != Rational::from_integer(1.into()) {
            return Err(Error::InvalidInput(format!("weights must sum to 1, got {sum}")));
        }
        Ok(SpectralWeights { theta })
    }

    pub fn uniform() -> Self {
        let third = crate::tensor::rat(1, 3);
        SpectralWeights { theta: [third.clone(), third.clone(), third] }
    }

    pub fn rational(&self) -> &[Rational; 3] {
        &self.theta
    }

    pub fn as_f64(&self) -> [f64; 3] {
        self.theta.clone().map(|r| r.to_f64().expect("weights are finite"))
    }

    /// Weights with the factors reordered: output axis `n` takes the weight of axis `order[n]`.
    pub fn permute_factors(&self, order: [usize; 3]) -> Self {
        SpectralWeights { theta: order.map(|a| self.theta[a].clone()) }
    }
}

/// Downward-closed set of flag indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IncomprSet {
    pub shape: Shape,
    pub points: Vec<Triple>,
}

impl IncomprSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_downward_closed(&self) -> bool {
        let set: BTreeSet<&Triple> = self.points.iter().collect();
        self.points.iter().all(|p| {
            (0..3).all(|x| p[x] == 0 || {
                let mut q = *p;
                q[x] -= 1;
                set.contains(&q)
            })
        })
    }
}

/// All flag indices `(i, j, k)` dominated componentwise by some triple of `S`.
///
/// Index `i` means the first `i` basis vectors of the factor are annihilated, so
/// `(i, j, k)` survives iff some support triple has every coordinate at least as large.
pub fn incompr_set(s: &Support) -> IncomprSet {
    let shape = s.shape();
    let points = shape
        .cells()
        .filter(|p| s.iter().any(|t| (0..3).all(|x| t[x] >= p[x])))
        .collect();
    IncomprSet { shape, points }
}

/// Probability distribution on a finite set of grid points.
#[derive(Debug, Clone, Serialize)]
pub struct SupportDistribution {
    pub shape: Shape,
    pub points: Vec<Triple>,
    pub probs: Vec<f64>,
}

impl SupportDistribution {
    pub fn new(shape: Shape, points: Vec<Triple>, probs: Vec<f64>) -> Result<Self> {
        if points.len() != probs.len() {
            return Err(Error::InvalidInput("points and probabilities differ in length".into()));
        }
        if probs.iter().any(|&p| p.is_nan() || p < 0.0) {
            return Err(Error::InvalidInput("probabilities must be nonnegative".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("probabilities sum to {sum}, not 1")));
        }
        if points.iter().any(|p| !shape.contains(p)) {
            return Err(Error::Shape("distribution point outside the shape".into()));
        }
        Ok(SupportDistribution { shape, points, probs })
    }

    pub fn marginal(&self, axis: usize) -> Vec<f64> {
        marginal(&self.points, &self.probs, self.shape.dim(axis), axis)
    }
}

fn marginal(points: &[Triple], probs: &[f64], n: usize, axis: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (p, &w) in points.iter().zip(probs) {
        out[p[axis]] += w;
    }
    out
}

fn shannon(dist: &[f64]) -> f64 {
    dist.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// Base-2 entropy of the marginal of `p` on `axis`, with `0 log 0 = 0`.
pub fn entropy(p: &SupportDistribution, axis: usize) -> f64 {
    shannon(&p.marginal(axis))
}

#[derive(Debug, Clone, Serialize)]
pub struct ZetaResult {
    /// `2^objective`.
    pub value: f64,
    /// `max sum_X theta_X H(p_X)` as reached by the optimizer.
    pub objective: f64,
    /// Frank-Wolfe gap at the final point; bounds the distance to the true maximum
    /// of the objective from above.
    pub gap: f64,
    pub iterations: usize,
    pub distribution: SupportDistribution,
}

pub const DEFAULT_TOL: f64 = 1e-9;
pub const MAX_ITERATIONS: usize = 100_000;

struct Objective<'a> {
    points: &'a [Triple],
    dims: [usize; 3],
    theta: [f64; 3],
}

impl Objective<'_> {
    fn value(&self, p: &[f64]) -> f64 {
        (0..3)
            .filter(|&x| self.theta[x] > 0.0)
            .map(|x| self.theta[x] * shannon(&marginal(self.points, p, self.dims[x], x)))
            .sum()
    }

    /// Gradient up to the additive constant `-1/ln 2`, which cancels on the simplex.
    fn gradient(&self, p: &[f64]) -> Vec<f64> {
        let logs: Vec<Vec<f64>> = (0..3)
            .map(|x| marginal(self.points, p, self.dims[x], x).iter().map(|&q| q.max(1e-300).log2()).collect())
            .collect();
        self.points
            .iter()
            .map(|s| -(0..3).filter(|&x| self.theta[x] > 0.0).map(|x| self.theta[x] * logs[x][s[x]]).sum::<f64>())
            .collect()
    }
}

/// Maximizes the weighted marginal entropy on the incompressibility set of `S`.
///
/// Exponentiated gradient with step `1/(1 + t/100)`; a step that would lower the
/// objective is halved until it does not, so the objective never decreases. That phase
/// stops when the Frank-Wolfe gap drops below `tol`, when an accepted step improves the
/// objective by less than `tol`, or after the iteration cap. Pairwise Frank-Wolfe steps
/// with exact line search then run until the gap is below `tol` or the cap is hit; they
/// converge linearly where the optimum is degenerate, which exponentiated gradient does not.
pub fn zeta(s: &Support, theta: &SpectralWeights, tol: f64) -> Result<ZetaResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidInput("tol must be positive".into()));
    }
    let set = incompr_set(s);
    if set.is_empty() {
        return Err(Error::Domain("the incompressibility set of an empty support is empty".into()));
    }
    let dims = s.shape().dims();
    let th = theta.as_f64();
    let obj = Objective { points: &set.points, dims, theta: th };
    let n = set.len();
    let mut p = vec![1.0 / n as f64; n];
    let mut f = obj.value(&p);
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    for t in 0..MAX_ITERATIONS {
        iterations = t + 1;
        let g = obj.gradient(&p);
        let avg: f64 = p.iter().zip(&g).map(|(a, b)| a * b).sum();
        let gmax = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        gap = (gmax - avg).max(0.0);
        if gap < tol {
            break;
        }
        let mut eta = 1.0 / (1.0 + t as f64 / 100.0);
        let mut accepted = None;
        for _ in 0..60 {
            let mut q: Vec<f64> = p.iter().zip(&g).map(|(a, b)| a * (eta * (b - gmax)).exp()).collect();
            let z: f64 = q.iter().sum();
            q.iter_mut().for_each(|x| *x /= z);
            let fq = obj.value(&q);
            if fq >= f {
                accepted = Some((q, fq));
                break;
            }
            eta /= 2.0;
        }
        let Some((q, fq)) = accepted else { break };
        if fq < f {
            return Err(Error::Invariant("objective decreased".into()));
        }
        let improvement = fq - f;
        p = q;
        f = fq;
        if improvement < tol {
            break;
        }
    }
    if gap >= tol {
        let (polished, steps) = pairwise_polish(&obj, p, tol);
        p = polished;
        iterations += steps;
        let g = obj.gradient(&p);
        let avg: f64 = p.iter().zip(&g).map(|(a, b)| a * b).sum();
        gap = (g.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - avg).max(0.0);
        let fp = obj.value(&p);
        if fp < f - 1e-12 {
            return Err(Error::Invariant("objective decreased".into()));
        }
        f = fp;
    }
    let bound: f64 = (0..3).map(|x| th[x] * (dims[x] as f64).log2()).sum();
    if f > bound + 1e-9 {
        return Err(Error::Invariant(format!("objective {f} exceeds entropy cap {bound}")));
    }
    let distribution = SupportDistribution { shape: set.shape, points: set.points, probs: p };
    Ok(ZetaResult { value: f.exp2(), objective: f, gap, iterations, distribution })
}

/// Pairwise Frank-Wolfe: moves mass from the worst support point to the best point
/// with an exact line search. The objective is nondecreasing along each step.
fn pairwise_polish(obj: &Objective<'_>, mut p: Vec<f64>, tol: f64) -> (Vec<f64>, usize) {
    let mut marg: Vec<Vec<f64>> = (0..3).map(|x| marginal(obj.points, &p, obj.dims[x], x)).collect();
    let live: Vec<usize> = (0..3).filter(|&x| obj.theta[x] > 0.0).collect();
    let mut steps = 0;
    for _ in 0..MAX_ITERATIONS {
        let logs: Vec<Vec<f64>> = marg.iter().map(|m| m.iter().map(|&q| q.max(1e-300).log2()).collect()).collect();
        let g: Vec<f64> = obj
            .points
            .iter()
            .map(|s| -live.iter().map(|&x| obj.theta[x] * logs[x][s[x]]).sum::<f64>())
            .collect();
        let avg: f64 = p.iter().zip(&g).map(|(a, b)| a * b).sum();
        let to = (0..g.len()).max_by(|&a, &b| g[a].total_cmp(&g[b])).unwrap();
        if g[to] - avg < tol {
            break;
        }
        let from = (0..g.len())
            .filter(|&i| p[i] > 0.0)
            .min_by(|&a, &b| g[a].total_cmp(&g[b]))
            .unwrap();
        if from == to || g[to] - g[from] <= 0.0 {
            break;
        }
        let (s, v) = (obj.points[to], obj.points[from]);
        // Derivative of the objective along e_to - e_from at step gamma.
        let slope = |gamma: f64| -> f64 {
            live.iter()
                .filter(|&&x| s[x] != v[x])
                .map(|&x| {
                    let up = (marg[x][s[x]] + gamma).max(1e-300);
                    let down = (marg[x][v[x]] - gamma).max(1e-300);
                    obj.theta[x] * (down.log2() - up.log2())
                })
                .sum()
        };
        let cap = p[from];
        let gamma = if slope(cap) >= 0.0 {
            cap
        } else {
            let (mut lo, mut hi) = (0.0, cap);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if slope(mid) >= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        if gamma <= 0.0 {
            break;
        }
        p[to] += gamma;
        p[from] = if gamma == cap { 0.0 } else { p[from] - gamma };
        for x in 0..3 {
            marg[x][s[x]] += gamma;
            marg[x][v[x]] -= gamma;
            if marg[x][v[x]] < 0.0 {
                marg[x][v[x]] = 0.0;
            }
        }
        steps += 1;
    }
    (p, steps)
}

#[derive(Debug, Clone, Serialize)]
pub enum ZetaOrders {
    /// Minimum over all axis reorderings, with one ordering attaining it.
    Value {
        value: f64,
        #[serde(skip)]
        perms: AxisPermutations,
        orderings: usize,
        distinct_sets: usize,
    },
    /// Some axis has more than four indices.
    Unknown,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                go(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Minimum of [`zeta`] over all reorderings of the three index ranges; an upper bound
/// for the flag-minimized functional. Limited to factors of dimension at most 4.
pub fn zeta_min_over_axis_orders(s: &Support, theta: &SpectralWeights, tol: f64) -> Result<ZetaOrders> {
    let d = s.shape().dims();
    if d.iter().any(|&x| x > 4) {
        return Ok(ZetaOrders::Unknown);
    }
    let perms: [Vec<Vec<usize>>; 3] = d.map(permutations);
    let mut cache: std::collections::BTreeMap<Vec<Triple>, f64> = Default::default();
    let mut best: Option<(f64, AxisPermutations)> = None;
    let mut orderings = 0;
    for pa in &perms[0] {
        for pb in &perms[1] {
            for pc in &perms[2] {
                orderings += 1;
                let ap = AxisPermutations::new([pa.clone(), pb.clone(), pc.clone()])?;
                let moved = s.permute(&ap)?;
                let key = incompr_set(&moved).points;
                let value = match cache.get(&key) {
                    Some(&v) => v,
                    None => {
                        let v = zeta(&moved, theta, tol)?.value;
                        cache.insert(key, v);
                        v
                    }
                };
                if best.as_ref().is_none_or(|(b, _)| value < *b) {
                    best = Some((value, ap));
                }
            }
        }
    }
    let (value, perms) = best.ok_or_else(|| Error::Domain("no orderings".into()))?;
    Ok(ZetaOrders::Value { value, perms, orderings, distinct_sets: cache.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::rat;

    fn sup(m: usize, t: &[[usize; 3]]) -> Support {
        Support::new(Shape::cube(m).unwrap(), t.iter().copied()).unwrap()
    }

    #[test]
    fn incompr_examples() {
        let diag = sup(3, &[[0, 0, 0], [1, 1, 1], [2, 2, 2]]);
        assert_eq!(incompr_set(&diag).len(), 27);
        assert_eq!(incompr_set(&sup(1, &[[0, 0, 0]])).points, vec![[0, 0, 0]]);
        let two = sup(2, &[[0, 0, 0], [1, 1, 0]]);
        let set = incompr_set(&two);
        assert_eq!(set.points, vec![[0, 0, 0], [0, 1, 0], [1, 0, 0], [1, 1, 0]]);
        assert!(set.is_downward_closed());
    }

    #[test]
    fn entropies() {
        let shape = Shape::cube(2).unwrap();
        let point = SupportDistribution::new(shape, vec![[0, 0, 0]], vec![1.0]).unwrap();
        assert_eq!(entropy(&point, 0), 0.0);
        let u = SupportDistribution::new(shape, vec![[0, 0, 0], [1, 1, 1]], vec![0.5, 0.5]).unwrap();
        assert!((entropy(&u, 2) - 1.0).abs() < 1e-15);
        let skew = SupportDistribution::new(shape, vec![[0, 0, 0], [1, 0, 0]], vec![0.25, 0.75]).unwrap();
        assert!((entropy(&skew, 0) - 0.811278).abs() < 1e-6);
        assert!(SupportDistribution::new(shape, vec![[0, 0, 0]], vec![0.5]).is_err());
    }

    #[test]
    fn diagonal_value_is_rank() {
        for r in 1..=4 {
            let diag = Support::new(Shape::cube(r).unwrap(), (0..r).map(|i| [i, i, i])).unwrap();
            let z = zeta(&diag, &SpectralWeights::uniform(), DEFAULT_TOL).unwrap();
            assert!((z.value - r as f64).abs() < 1e-6, "r = {r}: {}", z.value);
        }
    }

    #[test]
    fn two_point_example() {
        let two = sup(2, &[[0, 0, 0], [1, 1, 0]]);
        let z = zeta(&two, &SpectralWeights::uniform(), DEFAULT_TOL).unwrap();
        assert!((z.value - 2f64.powf(2.0 / 3.0)).abs() < 1e-6);
    }

    #[test]
    fn weights_validation() {
        assert!(SpectralWeights::new([rat(1, 2), rat(1, 2), rat(0, 1)]).is_ok());
        assert!(SpectralWeights::new([rat(1, 2), rat(1, 2), rat(1, 2)]).is_err());
        assert!(SpectralWeights::new([rat(3, 2), rat(-1, 2), rat(0, 1)]).is_err());
    }

    #[test]
    fn empty_support_is_a_domain_error() {
        let e = Support::empty(Shape::cube(2).unwrap());
        assert!(matches!(zeta(&e, &SpectralWeights::uniform(), 1e-9), Err(Error::Domain(_))));
    }

    #[test]
    fn order_minimization_scope() {
        let big = Support::new(Shape::cube(5).unwrap(), [[0, 0, 0]]).unwrap();
        assert!(matches!(
            zeta_min_over_axis_orders(&big, &SpectralWeights::uniform(), 1e-9).unwrap(),
            ZetaOrders::Unknown
        ));
        let diag = sup(3, &[[0, 0, 0], [1, 1, 1], [2, 2, 2]]);
        match zeta_min_over_axis_orders(&diag, &SpectralWeights::uniform(), 1e-9).unwrap() {
            ZetaOrders::Value { value, .. } => assert!((value - 3.0).abs() < 1e-6),
            ZetaOrders::Unknown => panic!(),
        }
    }
}
