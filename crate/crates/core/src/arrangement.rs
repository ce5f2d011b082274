//! Line arrangements in the plane `x + y + z = 0` induced by tight witnesses.
//!
//! A witness `tau` gives three families of parallel lines: `x = tau_A(i)`,
//! `y = tau_B(j)` and `x + y = -tau_C(k)`. A joint is a point where one line of
//! each family meets, i.e. a triple with zero weight sum. Joints are computed
//! from integer offsets only.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::compress::{find_zero_box, ZeroBox};
use crate::deciders::TightWitness;
use crate::error::{Error, Result};
use crate::tensor::{Shape, Support, Triple};

/// One line of the arrangement: its offset and the factor index it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Line {
    pub offset: i64,
    pub index: usize,
}

/// Three families of lines, each sorted by strictly increasing offset.
///
/// `zs` holds the offsets `-tau_C(k)` of the lines `x + y = -tau_C(k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Arrangement {
    pub xs: Vec<Line>,
    pub ys: Vec<Line>,
    pub zs: Vec<Line>,
}

/// A triple point: lines `idx[0]`, `idx[1]`, `idx[2]` of the three families meet at `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Joint {
    pub idx: Triple,
    pub x: i64,
    pub y: i64,
}

fn sorted_lines(offsets: impl Iterator<Item = i64>) -> Result<Vec<Line>> {
    let mut lines: Vec<Line> = offsets.enumerate().map(|(index, offset)| Line { offset, index }).collect();
    lines.sort_by_key(|l| l.offset);
    if lines.windows(2).any(|w| w[0].offset == w[1].offset) {
        return Err(Error::Invariant("two parallel lines coincide".into()));
    }
    Ok(lines)
}

pub fn build_arrangement(w: &TightWitness) -> Result<Arrangement> {
    Ok(Arrangement {
        xs: sorted_lines(w.tau_a().iter().copied())?,
        ys: sorted_lines(w.tau_b().iter().copied())?,
        zs: sorted_lines(w.tau_c().iter().map(|&t| -t))?,
    })
}

impl Arrangement {
    /// Number of lines per family, indexed by factor.
    pub fn dims(&self) -> [usize; 3] {
        [self.xs.len(), self.ys.len(), self.zs.len()]
    }

    /// Joints as a support in the witness indexing.
    pub fn joint_support(&self) -> Result<Support> {
        let [a, b, c] = self.dims();
        Support::new(Shape::new(a, b, c)?, joints(self).into_iter().map(|j| j.idx))
    }
}

/// All joints, sorted by index triple.
pub fn joints(arr: &Arrangement) -> Vec<Joint> {
    let mut out = Vec::new();
    for lx in &arr.xs {
        for ly in &arr.ys {
            let sum = lx.offset + ly.offset;
            if let Ok(pos) = arr.zs.binary_search_by_key(&sum, |l| l.offset) {
                out.push(Joint { idx: [lx.index, ly.index, arr.zs[pos].index], x: lx.offset, y: ly.offset });
            }
        }
    }
    out.sort();
    out
}

/// Chooses `a'`, `b'`, `c'` lines of the three families with no joint among them.
///
/// Exact: such a choice is the same thing as a zero box of the joint support.
pub fn joint_free_subarrangement(arr: &Arrangement, target: [usize; 3]) -> Result<Option<ZeroBox>> {
    let dims = arr.dims();
    for axis in 0..3 {
        if target[axis] == 0 || target[axis] > dims[axis] {
            return Err(Error::InvalidInput(format!(
                "sub-arrangement needs 1..={} lines in family {axis}, got {}",
                dims[axis], target[axis]
            )));
        }
    }
    find_zero_box(&arr.joint_support()?, target)
}

const COLORS: [&str; 3] = ["#d62728", "#1f77b4", "#2ca02c"];

/// Deterministic SVG drawing: x-lines red, y-lines blue, diagonal lines green and
/// joints as black dots. The frame extends one unit beyond every line offset and
/// is wide enough for every diagonal to cross the inner region.
pub fn render_svg(arr: &Arrangement) -> String {
    let (ylo, yhi) = extent(arr.ys.iter().map(|l| l.offset));
    let diag_lo = arr.zs.iter().map(|l| l.offset - yhi);
    let diag_hi = arr.zs.iter().map(|l| l.offset - ylo);
    let (xlo, _) = extent(arr.xs.iter().map(|l| l.offset).chain(diag_lo));
    let (_, xhi) = extent(arr.xs.iter().map(|l| l.offset).chain(diag_hi));
    let (x0, x1, y0, y1) = (xlo - 1, xhi + 1, ylo - 1, yhi + 1);

    // SVG y grows downwards, so the plane's y is negated.
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">",
        x0,
        -y1,
        x1 - x0,
        y1 - y0
    );
    let mut line = |color: &str, (ax, ay): (i64, i64), (bx, by): (i64, i64)| {
        let _ = writeln!(
            svg,
            "  <line x1=\"{ax}\" y1=\"{}\" x2=\"{bx}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"0.05\"/>",
            -ay,
            -by
        );
    };
    for l in &arr.xs {
        line(COLORS[0], (l.offset, y0), (l.offset, y1));
    }
    for l in &arr.ys {
        line(COLORS[1], (x0, l.offset), (x1, l.offset));
    }
    for l in &arr.zs {
        let start = x0.max(l.offset - y1);
        let end = x1.min(l.offset - y0);
        line(COLORS[2], (start, l.offset - start), (end, l.offset - end));
    }
    for j in joints(arr) {
        let _ = writeln!(svg, "  <circle cx=\"{}\" cy=\"{}\" r=\"0.15\" fill=\"black\"/>", j.x, -j.y);
    }
    svg.push_str("</svg>\n");
    svg
}

fn extent(values: impl Iterator<Item = i64>) -> (i64, i64) {
    values.fold(None, |acc: Option<(i64, i64)>, v| Some(acc.map_or((v, v), |(lo, hi)| (lo.min(v), hi.max(v)))))
        .unwrap_or((0, 0))
}

pub fn write_svg(arr: &Arrangement, path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(arr))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::tight_max_support;
    use crate::deciders::census_reference_table;

    fn symmetric3() -> TightWitness {
        TightWitness::new(vec![-1, 0, 1], vec![-1, 0, 1], vec![-1, 0, 1]).unwrap()
    }

    #[test]
    fn line_counts_and_joints() {
        let arr = build_arrangement(&symmetric3()).unwrap();
        assert_eq!(arr.dims(), [3, 3, 3]);
        let js = joints(&arr);
        // Oracle: triples in {-1,0,1}^3 with zero sum.
        let mut expected = 0;
        for a in -1..=1i64 {
            for b in -1..=1i64 {
                for c in -1..=1i64 {
                    expected += usize::from(a + b + c == 0);
                }
            }
        }
        assert_eq!(js.len(), expected);
        assert_eq!(js.len(), 7);
        for j in &js {
            let t = j.idx.map(|i| i as i64 - 1);
            assert_eq!(t[0] + t[1] + t[2], 0);
            assert_eq!((j.x, j.y), (t[0], t[1]));
        }
    }

    #[test]
    fn single_line_per_family() {
        let hit = build_arrangement(&TightWitness::new(vec![2], vec![3], vec![-5]).unwrap()).unwrap();
        assert_eq!(joints(&hit).len(), 1);
        let miss = build_arrangement(&TightWitness::new(vec![2], vec![3], vec![-4]).unwrap()).unwrap();
        assert!(joints(&miss).is_empty());
        assert!(render_svg(&miss).matches("<circle").count() == 0);
    }

    #[test]
    fn last_census_row_has_joints_on_its_support() {
        let (s, w) = census_reference_table().pop().unwrap();
        assert_eq!(w, symmetric3());
        let arr = build_arrangement(&w).unwrap();
        assert_eq!(arr.joint_support().unwrap(), s);
    }

    #[test]
    fn joint_free_choices() {
        let (_, w) = tight_max_support(5).unwrap();
        let arr = build_arrangement(&w).unwrap();
        let b = joint_free_subarrangement(&arr, [3, 3, 2]).unwrap().unwrap();
        b.verify(&arr.joint_support().unwrap()).unwrap();

        let single = build_arrangement(&TightWitness::new(vec![0], vec![0], vec![0]).unwrap()).unwrap();
        assert_eq!(joint_free_subarrangement(&single, [1, 1, 1]).unwrap(), None);
        assert_eq!(joint_free_subarrangement(&arr, [5, 5, 5]).unwrap(), None);
        assert!(joint_free_subarrangement(&arr, [0, 1, 1]).is_err());
        assert!(joint_free_subarrangement(&arr, [6, 1, 1]).is_err());
    }

    #[test]
    fn svg_element_counts_and_determinism() {
        let arr = build_arrangement(&symmetric3()).unwrap();
        let svg = render_svg(&arr);
        assert_eq!(svg.matches("<line").count(), 9);
        assert_eq!(svg.matches("<circle").count(), 7);
        assert_eq!(svg, render_svg(&arr));
        assert!(svg.contains("viewBox=\"-3 -2 6 4\""));
    }

    #[test]
    fn svg_golden_for_largest_tight_support() {
        let (_, w) = tight_max_support(3).unwrap();
        let svg = render_svg(&build_arrangement(&w).unwrap());
        assert_eq!(svg, include_str!("../tests/data/tmax3_arrangement.svg"));
    }
}

#[cfg(test)]
mod properties {
    use proptest::prelude::*;

    use super::*;
    use crate::deciders::decide_tight;
    use crate::strategies::support;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn support_embeds_into_joints(s in support(4), target in (1usize..=4, 1usize..=4, 1usize..=4)) {
            let decision = decide_tight(&s);
            let Some(w) = decision.witness() else { return Ok(()) };
            let arr = build_arrangement(w).unwrap();
            for family in [&arr.xs, &arr.ys, &arr.zs] {
                prop_assert!(family.windows(2).all(|p| p[0].offset < p[1].offset));
            }
            let js = joints(&arr);
            prop_assert!(js.iter().all(|j| w.sum(&j.idx) == 0));
            let joint_support = arr.joint_support().unwrap();
            prop_assert!(s.iter().all(|t| joint_support.contains(t)));

            let d = arr.dims();
            let target = [target.0.min(d[0]), target.1.min(d[1]), target.2.min(d[2])];
            let sub = joint_free_subarrangement(&arr, target).unwrap();
            prop_assert_eq!(sub.is_some(), find_zero_box(&joint_support, target).unwrap().is_some());
            prop_assert_eq!(render_svg(&arr), render_svg(&build_arrangement(w).unwrap()));
        }
    }
}
