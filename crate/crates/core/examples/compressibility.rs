//! Zero boxes, multicompressibility and the slice-cover duality.

use tensorclass::compress::{find_zero_box, multicompressibility, slice_cover, total_compressibility};
use tensorclass::constructions::{coppersmith_winograd, not_tight_compressible_4, tight_max_support};

fn main() -> tensorclass::Result<()> {
    for m in 3..=7 {
        let (s, _) = tight_max_support(m)?;
        let target = [m.div_ceil(2), m.div_ceil(2), m / 2];
        let b = find_zero_box(&s, target)?.expect("largest tight supports compress");
        println!("tight m = {m}: zero box {:?}", b.sets);
    }
    for q in 1..=2 {
        let small = multicompressibility(&coppersmith_winograd(q, false)?.support())?;
        let big = multicompressibility(&coppersmith_winograd(q, true)?.support())?;
        println!("Coppersmith-Winograd q = {q}: small {small}, big {big}");
    }
    let s = not_tight_compressible_4().support();
    println!("not tight 4x4x4 example: multicompressibility {}", multicompressibility(&s)?);
    let cover = slice_cover(&s);
    let (kappa, _) = total_compressibility(&s)?;
    let d = s.shape().dims();
    println!(
        "cover {:?} of size {} plus total compressibility {kappa} = {}",
        cover.slices,
        cover.size(),
        d.iter().sum::<usize>()
    );
    Ok(())
}
