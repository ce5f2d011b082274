//! Command line front end. Every subcommand prints one JSON run report on stdout;
//! progress and errors go to stderr.
//!
//! Exit codes: 0 success, 1 invalid input, 2 undecided within budget or scope,
//! 3 internal invariant violation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use tensorclass::arrangement::{build_arrangement, joint_free_subarrangement, joints, write_svg};
use tensorclass::compress::{find_zero_box, multicompressibility, slice_cover, total_compressibility};
use tensorclass::constructions::{generic_on_support, CatalogId};
use tensorclass::deciders::{
    census_m3, decide_oblique, decide_tight_seeded, is_free, max_oblique_size, ObliqueDecision,
    DEFAULT_OBLIQUE_BUDGET,
};
use tensorclass::io::{read_document, read_witness, support_to_value, tensor_to_value, to_pretty, write_json};
use tensorclass::reproduce::reproduce;
use tensorclass::spectral::{zeta, zeta_min_over_axis_orders, SpectralWeights, ZetaOrders, DEFAULT_TOL};
use tensorclass::symmetry::{annihilator, check_propagation, class_dimension, has_regular_semisimple, Class, TightEvidence};
use tensorclass::tensor::{format_rational, parse_rational};
use tensorclass::Error;

#[derive(Parser)]
#[command(name = "tensorclass", version, about = "Tight, oblique and free tensor supports")]
struct Cli {
    /// Seed for randomized witnesses and generic coefficients.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a catalog tensor or support, e.g. `construct tmax 5`.
    Construct {
        /// One of tmax, fmax, matmul, mone-sum, tstd, cw-small, cw-big,
        /// oblique-not-tight-4, not-tight-compressible-4; `name:param` is accepted too.
        id: String,
        param: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide a support class.
    Decide {
        class: DecideClass,
        #[arg(long = "in")]
        input: PathBuf,
        /// Node budget of the oblique search.
        #[arg(long, default_value_t = DEFAULT_OBLIQUE_BUDGET)]
        budget: u64,
    },
    /// Maximal antichains of [3]^3 up to symmetry.
    #[command(name = "census-m3")]
    CensusM3 {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest antichain in [a] x [b] x [c] with one attaining support.
    #[command(name = "max-oblique")]
    MaxOblique { a: usize, b: usize, c: usize },
    #[command(subcommand)]
    Symmetry(SymmetryCommand),
    #[command(subcommand)]
    Compress(CompressCommand),
    /// Support functional at coordinate flags.
    Zeta {
        #[arg(long = "in")]
        input: PathBuf,
        /// Three rational weights summing to one.
        #[arg(long, num_args = 3, value_names = ["TA", "TB", "TC"], allow_negative_numbers = true)]
        theta: Option<Vec<String>>,
        /// Minimize over all reorderings of the index ranges (factors of size <= 4).
        #[arg(long)]
        min_orders: bool,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Line arrangement of a tight witness.
    Arrange {
        #[arg(long)]
        witness: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Look for a joint-free choice of this many lines per family.
        #[arg(long, num_args = 3, value_names = ["A", "B", "C"])]
        dims: Option<Vec<usize>>,
    },
    /// Recompute every headline result and report each check.
    Reproduce {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DecideClass {
    Tight,
    Oblique,
    Free,
}

#[derive(Subcommand)]
enum SymmetryCommand {
    /// Annihilator of a tensor; a pure support is read with all coefficients one.
    Annihilator {
        #[arg(long = "in")]
        input: PathBuf,
        /// Replace the coefficients by seeded generic ones on the same support.
        #[arg(long)]
        generic: bool,
    },
    /// Direct-sum and Kronecker propagation of annihilator dimensions.
    Propagate {
        #[arg(long)]
        in1: PathBuf,
        #[arg(long)]
        in2: PathBuf,
    },
    /// Closed-form class dimension, e.g. `class-dim Tight 4`.
    #[command(name = "class-dim")]
    ClassDim { class: String, m: usize },
}

#[derive(Subcommand)]
enum CompressCommand {
    /// Zero box of the given sizes.
    Box {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, num_args = 3, value_names = ["A", "B", "C"], required = true)]
        dims: Vec<usize>,
    },
    /// Multicompressibility.
    Multi {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Minimum slice cover together with the total compressibility.
    Cover {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

/// A result together with the exit status it implies.
struct Outcome {
    result: Value,
    undecided: bool,
}

fn done(result: Value) -> Outcome {
    Outcome { result, undecided: false }
}

struct Inputs(Vec<Value>);

impl Inputs {
    fn record(&mut self, path: &Path) -> tensorclass::Result<()> {
        let bytes = std::fs::read(path)?;
        let digest: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        self.0.push(json!({"path": path.display().to_string(), "sha256": digest}));
        Ok(())
    }
}

fn dims3(v: &[usize]) -> [usize; 3] {
    [v[0], v[1], v[2]]
}

fn run(cli: &Cli, inputs: &mut Inputs) -> tensorclass::Result<Outcome> {
    let seed = cli.seed;
    match &cli.command {
        Command::Construct { id, param, out } => {
            let id: CatalogId = match param {
                Some(p) => CatalogId::parse(id, Some(*p))?,
                None => id.parse()?,
            };
            let t = id.build()?;
            let doc = if id.is_support() { support_to_value(&t.support()) } else { tensor_to_value(&t) };
            if let Some(path) = out {
                write_json(path, &doc)?;
                eprintln!("wrote {}", path.display());
            }
            Ok(done(json!({"id": id.to_string(), "document": doc})))
        }
        Command::Decide { class, input, budget } => {
            inputs.record(input)?;
            let s = read_document(input)?.support();
            match class {
                DecideClass::Tight => {
                    let d = decide_tight_seeded(&s, seed);
                    Ok(done(match d.witness() {
                        Some(w) => json!({"class": "tight", "decision": true, "witness": w}),
                        None => json!({"class": "tight", "decision": false}),
                    }))
                }
                DecideClass::Oblique => match decide_oblique(&s, *budget) {
                    ObliqueDecision::Oblique(w) => {
                        Ok(done(json!({"class": "oblique", "decision": true, "orders": w.perms.maps()})))
                    }
                    ObliqueDecision::NotOblique => Ok(done(json!({"class": "oblique", "decision": false}))),
                    ObliqueDecision::Unknown { nodes } => Ok(Outcome {
                        result: json!({"class": "oblique", "decision": "unknown", "nodes": nodes}),
                        undecided: true,
                    }),
                },
                DecideClass::Free => Ok(done(json!({"class": "free", "decision": is_free(&s)}))),
            }
        }
        Command::CensusM3 { out } => {
            let r = census_m3();
            let orbits: Vec<Value> = r
                .orbits
                .iter()
                .map(|o| {
                    json!({
                        "representative": support_to_value(&o.representative),
                        "orbit_size": o.orbit_size,
                        "witness": o.decision.witness(),
                    })
                })
                .collect();
            let result = json!({
                "counts": {"maximal": r.maximal, "concise": r.concise, "orbits": r.orbits.len()},
                "all_tight": r.all_tight(),
                "reference_matches": r.reference_matches,
                "orbits": orbits,
            });
            if let Some(path) = out {
                write_json(path, &result)?;
            }
            Ok(done(result))
        }
        Command::MaxOblique { a, b, c } => {
            let (size, s) = max_oblique_size(*a, *b, *c)?;
            Ok(done(json!({"size": size, "support": support_to_value(&s)})))
        }
        Command::Symmetry(sub) => symmetry(sub, seed, inputs),
        Command::Compress(sub) => compress(sub, inputs),
        Command::Zeta { input, theta, min_orders, tol } => {
            inputs.record(input)?;
            let s = read_document(input)?.support();
            let theta = match theta {
                Some(v) => SpectralWeights::new([parse_rational(&v[0])?, parse_rational(&v[1])?, parse_rational(&v[2])?])?,
                None => SpectralWeights::uniform(),
            };
            let theta_json: Vec<String> = theta.rational().iter().map(format_rational).collect();
            if *min_orders {
                return Ok(match zeta_min_over_axis_orders(&s, &theta, *tol)? {
                    ZetaOrders::Value { value, perms, orderings, distinct_sets } => done(json!({
                        "theta": theta_json,
                        "value": value,
                        "label": "coordinate-flag upper bound",
                        "orders": perms.maps(),
                        "orderings": orderings,
                        "distinct_sets": distinct_sets,
                    })),
                    ZetaOrders::Unknown => Outcome {
                        result: json!({"theta": theta_json, "value": null, "reason": "some factor exceeds 4"}),
                        undecided: true,
                    },
                });
            }
            let z = zeta(&s, &theta, *tol)?;
            Ok(done(json!({
                "theta": theta_json,
                "value": z.value,
                "objective": z.objective,
                "gap": z.gap,
                "iterations": z.iterations,
                "label": "coordinate-flag upper bound",
            })))
        }
        Command::Arrange { witness, svg, dims } => {
            inputs.record(witness)?;
            let w = read_witness(witness)?;
            let arr = build_arrangement(&w)?;
            if let Some(path) = svg {
                write_svg(&arr, path)?;
                eprintln!("wrote {}", path.display());
            }
            let js = joints(&arr);
            let sub = match dims {
                Some(d) => Some(joint_free_subarrangement(&arr, dims3(d))?),
                None => None,
            };
            Ok(done(json!({
                "lines": arr,
                "joints": js,
                "joint_free": sub.map(|b| json!(b)),
            })))
        }
        Command::Reproduce { out } => {
            let report = reproduce(seed)?;
            for c in &report.checks {
                eprintln!("criterion {}: {} {}", c.criterion, if c.passed { "PASS" } else { "FAIL" }, c.name);
            }
            let result = json!({"all_passed": report.all_passed(), "report": report});
            if let Some(path) = out {
                write_json(path, &result)?;
            }
            Ok(done(result))
        }
    }
}

fn symmetry(sub: &SymmetryCommand, seed: u64, inputs: &mut Inputs) -> tensorclass::Result<Outcome> {
    match sub {
        SymmetryCommand::Annihilator { input, generic } => {
            inputs.record(input)?;
            let doc = read_document(input)?;
            let t = if *generic { generic_on_support(&doc.support(), seed) } else { doc.tensor() };
            let report = annihilator(&t)?;
            let evidence = match has_regular_semisimple(&report, seed) {
                TightEvidence::NotTight => json!({"verdict": "not-tight"}),
                TightEvidence::TightWitnessFound(w) => json!({"verdict": "tight", "witness": w}),
                TightEvidence::Inconclusive => json!({"verdict": "inconclusive"}),
            };
            Ok(done(json!({
                "dims": report.dims,
                "kernel_dim": report.kernel_dim,
                "annihilator_dim": report.annihilator_dim,
                "regular_semisimple": evidence,
            })))
        }
        SymmetryCommand::Propagate { in1, in2 } => {
            inputs.record(in1)?;
            inputs.record(in2)?;
            let r = check_propagation(&read_document(in1)?.tensor(), &read_document(in2)?.tensor())?;
            Ok(done(json!(r)))
        }
        SymmetryCommand::ClassDim { class, m } => {
            let c: Class = class.parse()?;
            Ok(done(json!({"class": c.to_string(), "m": m, "dimension": class_dimension(c, *m)?})))
        }
    }
}

fn compress(sub: &CompressCommand, inputs: &mut Inputs) -> tensorclass::Result<Outcome> {
    match sub {
        CompressCommand::Box { input, dims } => {
            inputs.record(input)?;
            let s = read_document(input)?.support();
            let b = find_zero_box(&s, dims3(dims))?;
            Ok(done(json!({"dims": dims, "found": b.is_some(), "box": b})))
        }
        CompressCommand::Multi { input } => {
            inputs.record(input)?;
            let s = read_document(input)?.support();
            Ok(done(json!({"multicompressibility": multicompressibility(&s)?})))
        }
        CompressCommand::Cover { input } => {
            inputs.record(input)?;
            let s = read_document(input)?.support();
            let cover = slice_cover(&s);
            let (kappa, b) = total_compressibility(&s)?;
            let d = s.shape().dims();
            Ok(done(json!({
                "cover_size": cover.size(),
                "cover": cover,
                "total_compressibility": kappa,
                "box": b,
                "duality_holds": cover.size() + kappa == d[0] + d[1] + d[2],
            })))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Invariant(_) => 3,
        _ => 1,
    }
}

/// Parses `argv`, runs the command and returns the exit code with the text for stdout.
fn execute(argv: &[String]) -> (u8, Option<String>) {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return (code, None);
        }
    };
    let start = Instant::now();
    let mut inputs = Inputs(Vec::new());
    let outcome = run(&cli, &mut inputs);
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let (status, result, code) = match outcome {
        Ok(o) if o.undecided => ("unknown", o.result, 2),
        Ok(o) => ("ok", o.result, 0),
        Err(e) => {
            eprintln!("error: {e}");
            ("error", json!({"error": e.to_string()}), exit_code(&e))
        }
    };
    let report = json!({
        "command": argv.get(1..).unwrap_or_default(),
        "version": env!("CARGO_PKG_VERSION"),
        "seed": cli.seed,
        "inputs": inputs.0,
        "status": status,
        "result": result,
        "elapsed_ms": elapsed_ms,
    });
    match to_pretty(&report) {
        Ok(s) => (code, Some(s)),
        Err(e) => {
            eprintln!("error: {e}");
            (3, None)
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let (code, out) = execute(&argv);
    if let Some(s) = out {
        // A closed pipe downstream is not an error of this tool.
        let _ = std::io::Write::write_all(&mut std::io::stdout().lock(), s.as_bytes());
    }
    ExitCode::from(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, Value) {
        let argv: Vec<String> = std::iter::once("tensorclass").chain(args.iter().copied()).map(String::from).collect();
        let (code, out) = execute(&argv);
        let report = out.map_or(Value::Null, |s| serde_json::from_str(&s).expect("stdout is JSON"));
        (i32::from(code), report)
    }

    fn path(p: &Path) -> &str {
        p.to_str().unwrap()
    }

    #[test]
    fn construct_writes_a_document_that_decides_tight() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("tmax5.json");
        let (code, report) = run(&["construct", "tmax", "5", "--out", path(&file)]);
        assert_eq!(code, 0);
        assert_eq!(report["status"], "ok");
        assert_eq!(report["result"]["id"], "tmax:5");
        let on_disk: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
        assert_eq!(on_disk, report["result"]["document"]);
        assert_eq!(on_disk["entries"].as_array().unwrap().len(), 19);

        let (code, report) = run(&["decide", "tight", "--in", path(&file)]);
        assert_eq!(code, 0);
        assert_eq!(report["result"]["decision"], true);
        assert_eq!(report["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
        let w = &report["result"]["witness"];
        for t in on_disk["entries"].as_array().unwrap() {
            let idx: Vec<usize> = serde_json::from_value(t["idx"].clone()).unwrap();
            let sum = w["tauA"][idx[0]].as_i64().unwrap() + w["tauB"][idx[1]].as_i64().unwrap()
                + w["tauC"][idx[2]].as_i64().unwrap();
            assert_eq!(sum, 0);
        }
    }

    #[test]
    fn report_envelope() {
        let (code, report) = run(&["--seed", "7", "symmetry", "class-dim", "Tight", "4"]);
        assert_eq!(code, 0);
        let keys: Vec<&str> = report.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, ["command", "version", "seed", "inputs", "status", "result", "elapsed_ms"]);
        assert_eq!(report["seed"], 7);
        assert_eq!(report["result"]["dimension"], 48);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(&["construct", "nonsense"]).0, 1);
        assert_eq!(run(&["symmetry", "class-dim", "Tight", "2"]).0, 1);
        assert_eq!(run(&["decide", "tight", "--in", "/nonexistent/file.json"]).0, 1);
        assert_eq!(run(&["--help"]).0, 0);
        assert_eq!(run(&["no-such-command"]).0, 1);

        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("t.json");
        run(&["construct", "tmax", "5", "--out", path(&file)]);
        let (code, report) = run(&["zeta", "--in", path(&file), "--min-orders"]);
        assert_eq!(code, 2);
        assert_eq!(report["status"], "unknown");

        std::fs::write(&file, r#"{"shape":[2,2,2],"entries":[{"idx":[2,0,0]}]}"#).unwrap();
        let (code, report) = run(&["compress", "multi", "--in", path(&file)]);
        assert_eq!(code, 1);
        assert_eq!(report["status"], "error");
    }

    #[test]
    fn census_counts() {
        let (code, report) = run(&["census-m3"]);
        assert_eq!(code, 0);
        let r = &report["result"];
        assert_eq!(r["counts"]["maximal"], 144);
        assert_eq!(r["counts"]["concise"], 80);
        assert_eq!(r["counts"]["orbits"], 13);
        assert_eq!(r["all_tight"], true);
    }

    #[test]
    fn arrangement_svg_from_a_decided_witness() {
        let dir = tempfile::tempdir().unwrap();
        let support = dir.path().join("s.json");
        let witness = dir.path().join("w.json");
        let svg = dir.path().join("a.svg");
        run(&["construct", "tmax", "3", "--out", path(&support)]);
        let (_, report) = run(&["decide", "tight", "--in", path(&support)]);
        std::fs::write(&witness, report["result"]["witness"].to_string()).unwrap();
        let (code, report) = run(&["arrange", "--witness", path(&witness), "--svg", path(&svg), "--dims", "2", "2", "1"]);
        assert_eq!(code, 0);
        assert_eq!(report["result"]["joints"].as_array().unwrap().len(), 7);
        assert!(report["result"]["joint_free"].is_object());
        let text = std::fs::read_to_string(&svg).unwrap();
        assert_eq!(text.matches("<line").count(), 9);
        assert_eq!(text.matches("<circle").count(), 7);
    }

    #[test]
    fn compress_and_zeta_on_a_catalog_support() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("cw.json");
        run(&["construct", "cw-small", "2", "--out", path(&file)]);
        let (code, report) = run(&["compress", "cover", "--in", path(&file)]);
        assert_eq!(code, 0);
        assert_eq!(report["result"]["duality_holds"], true);
        let (code, report) = run(&["zeta", "--in", path(&file), "--theta", "1/2", "1/4", "1/4"]);
        assert_eq!(code, 0);
        assert_eq!(report["result"]["theta"], serde_json::json!(["1/2", "1/4", "1/4"]));
        let v = report["result"]["value"].as_f64().unwrap();
        assert!((1.0..=3.0 + 1e-9).contains(&v), "{v}");
    }
}
