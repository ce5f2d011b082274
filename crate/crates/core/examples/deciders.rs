//! Tight, oblique and free decisions on a few supports, with certificates.

use tensorclass::constructions::{matmul, oblique_not_tight_4, tight_max_support};
use tensorclass::deciders::{decide_oblique, decide_tight, is_free, ObliqueDecision, DEFAULT_OBLIQUE_BUDGET};

fn main() -> tensorclass::Result<()> {
    let supports = [
        ("largest tight 4x4x4", tight_max_support(4)?.0),
        ("oblique, not tight 4x4x4", oblique_not_tight_4().support()),
        ("matmul(2)", matmul(2)?.support()),
    ];
    for (name, s) in supports {
        println!("{name} ({} triples)", s.len());
        match decide_tight(&s).witness() {
            Some(w) => println!("    tight: tauA {:?} tauB {:?} tauC {:?}", w.tau_a(), w.tau_b(), w.tau_c()),
            None => println!("    not tight"),
        }
        match decide_oblique(&s, DEFAULT_OBLIQUE_BUDGET) {
            ObliqueDecision::Oblique(w) => println!("    oblique under orders {:?}", w.perms.maps()),
            ObliqueDecision::NotOblique => println!("    not oblique"),
            ObliqueDecision::Unknown { nodes } => println!("    oblique search undecided after {nodes} nodes"),
        }
        println!("    free: {}", is_free(&s));
    }
    Ok(())
}
