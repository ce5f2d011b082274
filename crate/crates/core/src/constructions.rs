//! Catalog of explicit supports and tensors.
//!
//! Index conventions: every constructor is 0-based, and matrix multiplication
//! flattens the pair `(i, j)` to `i * n + j`.

use std::fmt;
use std::str::FromStr;

use num::One;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::deciders::TightWitness;
use crate::error::{Error, Result};
use crate::tensor::{int, Rational, Shape, Support, Tensor};

fn check_positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(Error::InvalidInput(format!("{name} must be positive")));
    }
    Ok(())
}

/// The largest tight support in `[m]^3`, with its witness.
///
/// For odd `m = 2l + 1` it is the slice `i + j + k = 3l` with `tau(i) = i - l` on
/// every axis. For even `m = 2l` the witness is `tau_A(i) = i - l + 1`,
/// `tau_B(j) = tau_C(j) = j - l`, i.e. the slice `i + j + k = 3l - 1`.
/// Either way the cardinality is `ceil(3 m^2 / 4)`.
pub fn tight_max_support(m: usize) -> Result<(Support, TightWitness)> {
    check_positive("m", m)?;
    let l = (m / 2) as i64;
    let idx = |x: usize| x as i64;
    let (ta, tb): (Vec<i64>, Vec<i64>) = if m % 2 == 1 {
        ((0..m).map(|i| idx(i) - l).collect(), (0..m).map(|j| idx(j) - l).collect())
    } else {
        ((0..m).map(|i| idx(i) - l + 1).collect(), (0..m).map(|j| idx(j) - l).collect())
    };
    let witness = TightWitness::new(ta, tb.clone(), tb)?;
    let shape = Shape::cube(m)?;
    let support = Support::new(shape, shape.cells().filter(|t| witness.sum(t) == 0))?;
    Ok((support, witness))
}

/// Circulant free support `{(i, j, k) : i + j + k = floor(m/2) mod m}` of size `m^2`.
///
/// For odd `m` it contains the largest tight support after the cyclic shift
/// `i -> i + 1 mod m` on axis A.
pub fn free_max_support(m: usize) -> Result<Support> {
    check_positive("m", m)?;
    let shape = Shape::cube(m)?;
    let l = m / 2;
    Support::new(shape, shape.cells().filter(|t| (t[0] + t[1] + t[2]) % m == l))
}

/// Slice `{i + j + k = h}` of a grid.
pub fn rank_slice(shape: Shape, h: usize) -> Support {
    Support::new(shape, shape.cells().filter(|t| t[0] + t[1] + t[2] == h)).expect("cells in range")
}

/// Matrix multiplication `sum a_(i,j) b_(j,k) c_(k,i)` on `(n^2, n^2, n^2)`.
pub fn matmul(n: usize) -> Result<Tensor> {
    check_positive("n", n)?;
    let shape = Shape::cube(n * n)?;
    let mut terms = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                terms.push(([i * n + j, j * n + k, k * n + i], Rational::one()));
            }
        }
    }
    Tensor::from_terms(shape, terms)
}

/// `M<1>^{+r}`: the diagonal `sum_i a_i b_i c_i` in `[r]^3`.
pub fn unit_sum(r: usize) -> Result<Tensor> {
    check_positive("r", r)?;
    Tensor::from_terms(Shape::cube(r)?, (0..r).map(|i| ([i, i, i], Rational::one())))
}

/// `M<1>^{+m} + (sum a_i)(sum b_j)(sum c_k)`: diagonal coefficients 2, all others 1.
pub fn t_std(m: usize) -> Result<Tensor> {
    check_positive("m", m)?;
    let shape = Shape::cube(m)?;
    let diag = (0..m).map(|i| ([i, i, i], Rational::one()));
    let ones = shape.cells().map(|t| (t, Rational::one())).collect::<Vec<_>>();
    Tensor::from_terms(shape, diag.chain(ones))
}

/// Small (`big = false`, shape `(q+1)^3`) or big (`(q+2)^3`) Coppersmith-Winograd tensor.
pub fn coppersmith_winograd(q: usize, big: bool) -> Result<Tensor> {
    check_positive("q", q)?;
    let m = if big { q + 2 } else { q + 1 };
    let mut terms = Vec::new();
    for i in 1..=q {
        terms.push(([0, i, i], Rational::one()));
        terms.push(([i, 0, i], Rational::one()));
        terms.push(([i, i, 0], Rational::one()));
    }
    if big {
        let e = q + 1;
        terms.push(([0, 0, e], Rational::one()));
        terms.push(([0, e, 0], Rational::one()));
        terms.push(([e, 0, 0], Rational::one()));
    }
    Tensor::from_terms(Shape::cube(m)?, terms)
}

/// A 4x4x4 tensor whose support is an antichain but which has trivial annihilator.
pub fn oblique_not_tight_4() -> Tensor {
    const SUPPORT: [[usize; 3]; 10] = [
        [0, 2, 3],
        [0, 3, 2],
        [1, 0, 3],
        [1, 1, 2],
        [1, 2, 1],
        [1, 3, 0],
        [2, 1, 1],
        [2, 2, 0],
        [3, 0, 2],
        [3, 1, 0],
    ];
    Tensor::from_terms(Shape::cube(4).unwrap(), SUPPORT.map(|t| (t, Rational::one())))
        .expect("catalog triples are in range")
}

/// A 4x4x4 tensor that is 6-multicompressible but has trivial annihilator:
///
/// ```text
/// a0 b0 c0 + a1 b1 c1 + a2 b2 c2 + a3 b3 c3
///   + (a0+a1+a2+a3)(b0+b1)(c2+c3) + (a1+a2+a3) b2 (c2+c3)
///   + (a1+a2+a3) b3 c3 + (a2+a3) b3 c2
/// ```
pub fn not_tight_compressible_4() -> Tensor {
    fn products(a: &[usize], b: &[usize], c: &[usize]) -> Vec<([usize; 3], Rational)> {
        let mut out = Vec::new();
        for &i in a {
            for &j in b {
                for &k in c {
                    out.push(([i, j, k], Rational::one()));
                }
            }
        }
        out
    }
    let mut terms: Vec<([usize; 3], Rational)> = (0..4).map(|i| ([i, i, i], Rational::one())).collect();
    terms.extend(products(&[0, 1, 2, 3], &[0, 1], &[2, 3]));
    terms.extend(products(&[1, 2, 3], &[2], &[2, 3]));
    terms.extend(products(&[1, 2, 3], &[3], &[3]));
    terms.extend(products(&[2, 3], &[3], &[2]));
    Tensor::from_terms(Shape::cube(4).unwrap(), terms).expect("catalog triples are in range")
}

/// Seeded "generic" tensor on a support: integer coefficients drawn uniformly
/// from `[-100, 100] \ {0}`.
pub fn generic_on_support(support: &Support, seed: u64) -> Tensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms = support.iter().map(|t| {
        let mut v = 0i64;
        while v == 0 {
            v = rng.gen_range(-100..=100);
        }
        (*t, int(v))
    });
    Tensor::from_terms(support.shape(), terms).expect("support triples are in range")
}

/// Identifier of a catalog entry together with its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CatalogId {
    TMax(usize),
    FMax(usize),
    MatMul(usize),
    MOneSum(usize),
    TStd(usize),
    /// Small Coppersmith-Winograd tensor.
    Tcw(usize),
    /// Big Coppersmith-Winograd tensor.
    TCW(usize),
    ObliqueNotTight4,
    NotTightCompressible4,
}

impl CatalogId {
    /// Builds the tensor; supports are returned with all coefficients equal to one.
    pub fn build(&self) -> Result<Tensor> {
        match *self {
            CatalogId::TMax(m) => Ok(Tensor::from_support(&tight_max_support(m)?.0)),
            CatalogId::FMax(m) => Ok(Tensor::from_support(&free_max_support(m)?)),
            CatalogId::MatMul(n) => matmul(n),
            CatalogId::MOneSum(r) => unit_sum(r),
            CatalogId::TStd(m) => t_std(m),
            CatalogId::Tcw(q) => coppersmith_winograd(q, false),
            CatalogId::TCW(q) => coppersmith_winograd(q, true),
            CatalogId::ObliqueNotTight4 => Ok(oblique_not_tight_4()),
            CatalogId::NotTightCompressible4 => Ok(not_tight_compressible_4()),
        }
    }

    /// True for entries that are pure supports (no meaningful coefficients).
    pub fn is_support(&self) -> bool {
        matches!(self, CatalogId::TMax(_) | CatalogId::FMax(_))
    }

    pub fn names() -> &'static [&'static str] {
        &[
            "tmax",
            "fmax",
            "matmul",
            "mone-sum",
            "tstd",
            "cw-small",
            "cw-big",
            "oblique-not-tight-4",
            "not-tight-compressible-4",
        ]
    }

    /// Parses a name plus optional parameter, e.g. `("tmax", Some(5))`.
    pub fn parse(name: &str, param: Option<usize>) -> Result<Self> {
        let need = || {
            param.ok_or_else(|| Error::InvalidInput(format!("catalog entry {name} needs a parameter")))
        };
        let id = match name {
            "tmax" => CatalogId::TMax(need()?),
            "fmax" => CatalogId::FMax(need()?),
            "matmul" => CatalogId::MatMul(need()?),
            "mone-sum" => CatalogId::MOneSum(need()?),
            "tstd" => CatalogId::TStd(need()?),
            "cw-small" => CatalogId::Tcw(need()?),
            "cw-big" => CatalogId::TCW(need()?),
            "oblique-not-tight-4" => CatalogId::ObliqueNotTight4,
            "not-tight-compressible-4" => CatalogId::NotTightCompressible4,
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown catalog entry {other:?}; expected one of {:?}",
                    CatalogId::names()
                )))
            }
        };
        if let Some(0) = param {
            return Err(Error::InvalidInput("catalog parameters must be positive".into()));
        }
        Ok(id)
    }
}

impl fmt::Display for CatalogId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogId::TMax(m) => write!(f, "tmax:{m}"),
            CatalogId::FMax(m) => write!(f, "fmax:{m}"),
            CatalogId::MatMul(n) => write!(f, "matmul:{n}"),
            CatalogId::MOneSum(r) => write!(f, "mone-sum:{r}"),
            CatalogId::TStd(m) => write!(f, "tstd:{m}"),
            CatalogId::Tcw(q) => write!(f, "cw-small:{q}"),
            CatalogId::TCW(q) => write!(f, "cw-big:{q}"),
            CatalogId::ObliqueNotTight4 => write!(f, "oblique-not-tight-4"),
            CatalogId::NotTightCompressible4 => write!(f, "not-tight-compressible-4"),
        }
    }
}

impl FromStr for CatalogId {
    type Err = Error;

    /// Accepts `"name"` or `"name:param"`, the inverse of `Display`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some((name, p)) => {
                let p = p.parse().map_err(|_| Error::InvalidInput(format!("bad parameter in {s:?}")))?;
                CatalogId::parse(name, Some(p))
            }
            None => CatalogId::parse(s, None),
        }
    }
}

/// `ceil(3 m^2 / 4)`.
pub fn ceil_three_quarters_square(m: usize) -> usize {
    (3 * m * m).div_ceil(4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{kronecker, AxisPermutations};

    #[test]
    fn tight_max_sizes() {
        let (s5, w5) = tight_max_support(5).unwrap();
        assert_eq!(s5.len(), 19);
        assert_eq!(ceil_three_quarters_square(5), 19);
        assert_eq!(w5.tau_a(), &[-2, -1, 0, 1, 2]);
        let (s2, _) = tight_max_support(2).unwrap();
        assert_eq!(s2.triples(), &[[0, 1, 1], [1, 0, 1], [1, 1, 0]]);
        assert_eq!(tight_max_support(4).unwrap().0.len(), 12);
        assert_eq!(tight_max_support(1).unwrap().0.len(), 1);
    }

    #[test]
    fn tight_max_witness_is_valid_for_many_m() {
        for m in 1..=9 {
            let (s, w) = tight_max_support(m).unwrap();
            assert_eq!(s.len(), ceil_three_quarters_square(m), "m = {m}");
            w.verify(&s).unwrap();
            assert!(s.is_concise());
        }
    }

    #[test]
    fn free_max_contains_tight_max_for_odd_m() {
        let f3 = free_max_support(3).unwrap();
        assert_eq!(f3.len(), 9);
        let f5 = free_max_support(5).unwrap();
        assert_eq!(f5.len(), 25);
        // The slice i + j + k = 3l has residue l - 1; shifting axis A by one lands it
        // on residue l.
        let (t5, _) = tight_max_support(5).unwrap();
        assert!(t5.iter().all(|t| f5.contains(&[(t[0] + 1) % 5, t[1], t[2]])));
    }

    #[test]
    fn free_max_m2_pairs_differ_twice() {
        let f = free_max_support(2).unwrap();
        assert_eq!(f.len(), 4);
        for (n, s) in f.iter().enumerate() {
            for t in &f.triples()[n + 1..] {
                assert!((0..3).filter(|&x| s[x] != t[x]).count() >= 2);
            }
        }
    }

    #[test]
    fn matmul_sizes() {
        assert_eq!(matmul(1).unwrap().nnz(), 1);
        let m2 = matmul(2).unwrap();
        assert_eq!(m2.nnz(), 8);
        assert_eq!(m2.shape(), Shape::cube(4).unwrap());
        assert_eq!(matmul(3).unwrap().nnz(), 27);
    }

    #[test]
    fn matmul_self_reproduces_under_kronecker() {
        // M<2> (x) M<2> has the support of M<4> after reindexing the pairs
        // ((i1,j1),(i2,j2)) -> (i1*2+i2, j1*2+j2) on every axis.
        let k = kronecker(&matmul(2).unwrap(), &matmul(2).unwrap());
        let m4 = matmul(4).unwrap();
        assert_eq!(k.nnz(), 64);
        // index x = (i1*2 + j1)*4 + (i2*2 + j2) on the product; M<4> uses I*4 + J
        // with I = i1*2 + i2, J = j1*2 + j2.
        let remap = |x: usize| {
            let (p1, p2) = (x / 4, x % 4);
            let (i1, j1, i2, j2) = (p1 / 2, p1 % 2, p2 / 2, p2 % 2);
            (i1 * 2 + i2) * 4 + (j1 * 2 + j2)
        };
        let perm: Vec<usize> = (0..16).map(remap).collect();
        let perms = AxisPermutations::new([perm.clone(), perm.clone(), perm]).unwrap();
        assert_eq!(k.support().permute(&perms).unwrap(), m4.support());
    }

    #[test]
    fn t_std_coefficients() {
        let t2 = t_std(2).unwrap();
        assert_eq!(t2.get(&[0, 0, 0]), int(2));
        assert_eq!(t2.get(&[0, 1, 1]), int(1));
        assert_eq!(t_std(3).unwrap().nnz(), 27);
        let t1 = t_std(1).unwrap();
        assert_eq!(t1.nnz(), 1);
        assert_eq!(t1.get(&[0, 0, 0]), int(2));
    }

    #[test]
    fn coppersmith_winograd_shapes() {
        assert_eq!(coppersmith_winograd(2, false).unwrap().shape(), Shape::cube(3).unwrap());
        assert_eq!(coppersmith_winograd(1, false).unwrap().nnz(), 3);
        let big = coppersmith_winograd(1, true).unwrap();
        assert_eq!(big.nnz(), 6);
        assert!(big.support().is_concise());
        assert_eq!(coppersmith_winograd(3, true).unwrap().nnz(), 12);
    }

    #[test]
    fn counterexample_tensors() {
        let t = oblique_not_tight_4();
        assert_eq!(t.nnz(), 10);
        let c = not_tight_compressible_4();
        assert_eq!(c.get(&[0, 0, 0]), int(1));
        assert_eq!(c.get(&[0, 0, 2]), int(1));
        // (1,2,2) collects a1 b2 c2 from the diagonal and from (a1+a2+a3) b2 (c2+c3)? no:
        // the diagonal has (2,2,2), so (1,2,2) has coefficient 1 and (2,2,2) has 2.
        assert_eq!(c.get(&[1, 2, 2]), int(1));
        assert_eq!(c.get(&[2, 2, 2]), int(2));
        assert_eq!(c.get(&[3, 3, 3]), int(2));
        assert_eq!(c.nnz(), 29);
    }

    #[test]
    fn generic_tensor_is_seed_deterministic() {
        let (s, _) = tight_max_support(3).unwrap();
        let a = generic_on_support(&s, 7);
        let b = generic_on_support(&s, 7);
        assert_eq!(a, b);
        assert_eq!(a.support(), s);
        assert_ne!(a, generic_on_support(&s, 8));
    }

    #[test]
    fn catalog_parsing() {
        assert_eq!("tmax:5".parse::<CatalogId>().unwrap(), CatalogId::TMax(5));
        assert_eq!(
            "oblique-not-tight-4".parse::<CatalogId>().unwrap(),
            CatalogId::ObliqueNotTight4
        );
        assert!("tmax".parse::<CatalogId>().is_err());
        assert!("tmax:0".parse::<CatalogId>().is_err());
        assert!("nope:1".parse::<CatalogId>().is_err());
        for id in [CatalogId::Tcw(2), CatalogId::TCW(1), CatalogId::MOneSum(3)] {
            assert!(id.build().unwrap().shape().dims()[0] >= 2);
        }
    }
}
