//! Annihilator dimensions of catalog tensors, with a torus element when one exists.

use tensorclass::constructions::{generic_on_support, matmul, oblique_not_tight_4, t_std, tight_max_support};
use tensorclass::symmetry::{annihilator, has_regular_semisimple, TightEvidence};
use tensorclass::Tensor;

fn main() -> tensorclass::Result<()> {
    let (tmax, _) = tight_max_support(4)?;
    let cases: Vec<(&str, Tensor)> = vec![
        ("generic on the largest tight 4x4x4 support", generic_on_support(&tmax, 1)),
        ("T_std,4", t_std(4)?),
        ("oblique, not tight 4x4x4", oblique_not_tight_4()),
        ("matmul(2)", matmul(2)?),
    ];
    for (name, t) in cases {
        let report = annihilator(&t)?;
        let evidence = match has_regular_semisimple(&report, 0) {
            TightEvidence::TightWitnessFound(w) => format!("torus element {:?} {:?} {:?}", w.tau_a(), w.tau_b(), w.tau_c()),
            TightEvidence::NotTight => "no torus element".to_string(),
            TightEvidence::Inconclusive => "inconclusive".to_string(),
        };
        println!("{name}: annihilator dimension {} ({evidence})", report.annihilator_dim);
    }
    Ok(())
}
