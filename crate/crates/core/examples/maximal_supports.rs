//! Largest tight, free and oblique supports for small shapes.

use tensorclass::constructions::{free_max_support, tight_max_support};
use tensorclass::deciders::{decide_tight, is_free, max_oblique_size};

fn main() -> tensorclass::Result<()> {
    println!(" m  tight  free");
    for m in 2..=8 {
        let (tight, w) = tight_max_support(m)?;
        w.verify(&tight)?;
        assert!(decide_tight(&tight).is_tight());
        let free = free_max_support(m)?;
        assert!(is_free(&free));
        println!("{m:>2} {:>6} {:>5}", tight.len(), free.len());
    }
    for (a, b, c) in [(2, 2, 2), (2, 3, 4), (3, 3, 3), (4, 4, 4)] {
        let (size, s) = max_oblique_size(a, b, c)?;
        println!("largest oblique support in {a}x{b}x{c}: {size} triples, e.g. {:?}", s.triples());
    }
    Ok(())
}
