//! Support functional upper bounds at coordinate flags.

use tensorclass::constructions::{coppersmith_winograd, matmul, tight_max_support};
use tensorclass::spectral::{zeta, zeta_min_over_axis_orders, SpectralWeights, ZetaOrders, DEFAULT_TOL};
use tensorclass::tensor::rat;

fn main() -> tensorclass::Result<()> {
    let uniform = SpectralWeights::uniform();
    let skewed = SpectralWeights::new([rat(1, 2), rat(1, 3), rat(1, 6)])?;
    let supports = [
        ("largest tight 3x3x3", tight_max_support(3)?.0),
        ("small Coppersmith-Winograd q = 2", coppersmith_winograd(2, false)?.support()),
        ("matmul(2)", matmul(2)?.support()),
    ];
    for (name, s) in supports {
        let u = zeta(&s, &uniform, DEFAULT_TOL)?;
        let k = zeta(&s, &skewed, DEFAULT_TOL)?;
        println!("{name}: uniform {:.6} (gap {:.1e}), skewed {:.6}", u.value, u.gap, k.value);
        if let ZetaOrders::Value { value, orderings, .. } = zeta_min_over_axis_orders(&s, &uniform, DEFAULT_TOL)? {
            println!("    minimum over {orderings} index orders: {value:.6}");
        }
    }
    Ok(())
}
