//! Line arrangement of a tight witness, written as SVG.
//!
//! `cargo run --example arrangement_svg -- out.svg` writes the drawing; without an
//! argument it is printed.

use tensorclass::arrangement::{build_arrangement, joint_free_subarrangement, joints, render_svg};
use tensorclass::constructions::tight_max_support;

fn main() -> tensorclass::Result<()> {
    let (s, w) = tight_max_support(5)?;
    let arr = build_arrangement(&w)?;
    let js = joints(&arr);
    println!("{} lines, {} joints, support of {} triples", arr.xs.len() + arr.ys.len() + arr.zs.len(), js.len(), s.len());
    if let Some(b) = joint_free_subarrangement(&arr, [3, 3, 2])? {
        println!("joint-free choice of 3 + 3 + 2 lines: {:?}", b.sets);
    }
    let svg = render_svg(&arr);
    match std::env::args().nth(1) {
        Some(path) => std::fs::write(&path, svg)?,
        None => print!("{svg}"),
    }
    Ok(())
}
