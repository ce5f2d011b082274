//! Annihilator dimensions under direct sums and Kronecker products.

use tensorclass::constructions::{generic_on_support, t_std, tight_max_support};
use tensorclass::symmetry::check_propagation;

fn main() -> tensorclass::Result<()> {
    let tight = generic_on_support(&tight_max_support(3)?.0, 7);
    let pairs = [("T_std,3 with itself", t_std(3)?, t_std(3)?), ("generic tight with T_std,3", tight, t_std(3)?)];
    for (name, t, s) in pairs {
        let r = check_propagation(&t, &s)?;
        println!(
            "{name}: dim T {} dim S {} direct sum {} Kronecker {} (kernel additive {}, superadditive {})",
            r.dim_t, r.dim_s, r.dim_direct_sum, r.dim_kronecker, r.kernel_additive, r.kronecker_superadditive
        );
    }
    Ok(())
}
