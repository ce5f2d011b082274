//! Proptest strategies shared by the unit tests.

use proptest::prelude::*;
use proptest::sample::subsequence;

use crate::tensor::{rat, AxisPermutations, Shape, Support, Tensor, Triple};

pub fn shape(max: usize) -> impl Strategy<Value = Shape> {
    (1..=max, 1..=max, 1..=max).prop_map(|(a, b, c)| Shape::new(a, b, c).unwrap())
}

pub fn support_in(shape: Shape) -> impl Strategy<Value = Support> {
    let cells: Vec<Triple> = shape.cells().collect();
    let n = cells.len();
    subsequence(cells, 0..=n).prop_map(move |t| Support::new(shape, t).unwrap())
}

pub fn support(max: usize) -> impl Strategy<Value = Support> {
    shape(max).prop_flat_map(support_in)
}

/// Nonempty support with every slice occupied.
pub fn concise_support(max: usize) -> impl Strategy<Value = Support> {
    support(max).prop_filter("concise", Support::is_concise)
}

pub fn tensor_on(s: Support) -> impl Strategy<Value = Tensor> {
    let n = s.len();
    proptest::collection::vec((-9i64..=9).prop_filter("nonzero", |&v| v != 0), n).prop_map(move |coefs| {
        Tensor::from_terms(s.shape(), s.iter().zip(coefs).map(|(&t, c)| (t, rat(c, 1)))).unwrap()
    })
}

pub fn tensor(max: usize) -> impl Strategy<Value = Tensor> {
    support(max).prop_flat_map(tensor_on)
}

pub fn permutations(shape: Shape) -> impl Strategy<Value = AxisPermutations> {
    let [a, b, c] = shape.dims();
    let perm = |n: usize| Just((0..n).collect::<Vec<usize>>()).prop_shuffle();
    (perm(a), perm(b), perm(c)).prop_map(|(x, y, z)| AxisPermutations::new([x, y, z]).unwrap())
}
