//! Maximal antichains of [3]^3 up to symmetry, each with a tightness witness.

use tensorclass::deciders::census_m3;

fn main() {
    let r = census_m3();
    println!("maximal {} concise {} orbits {}", r.maximal, r.concise, r.orbits.len());
    for (n, o) in r.orbits.iter().enumerate() {
        let w = o.decision.witness().expect("every census orbit is tight");
        println!(
            "{:>2}: size {} orbit {:>2} tauA {:?} tauB {:?} tauC {:?}",
            n + 1,
            o.representative.len(),
            o.orbit_size,
            w.tau_a(),
            w.tau_b(),
            w.tau_c()
        );
    }
}
