//! Command-line surface: product classification, disc injectivization,
//! counterexample certification, and the verification suites.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 input error, 3 degenerate
//! mathematical input, 4 classification mismatch.

use clap::{Args, Parser, Subcommand};
use kh_core::counterexample::{certify_pair, intersection_persistence, transversality_check};
use kh_core::covering::covering_of;
use kh_core::injectivize::{injectivize, verify_injectivity_full, DiscPair};
use kh_core::metrics::classify_product;
use kh_core::parse::{parse, parse_complex};
use kh_core::report::{Report, ResidualEntry};
use kh_core::{Error, PlanarDomain, Result};
use serde::Deserialize;
use std::io::Read;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "kh",
    about = "Kobayashi-Royden vs Hahn pseudometrics on planar product domains",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for all quasi-random sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print the JSON report to stdout instead of the table.
    #[arg(long)]
    json: bool,
    /// Write the JSON report to a file.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide Hahn-vs-Kobayashi equality on d1 x d2.
    Classify {
        /// First factor: disc | plane | cstar | pdisc | annulus:<r>.
        #[arg(long)]
        d1: String,
        /// Second factor descriptor.
        #[arg(long)]
        d2: String,
        #[command(flatten)]
        common: Common,
    },
    /// Build an injective disc with g(0) = f(0), g'(0) = theta f'(0).
    Injectivize {
        /// Disc-pair JSON file ({"comp1", "comp2", "target1", "target2"}), or - for stdin.
        spec: String,
        #[arg(long)]
        theta: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Certify that the pseudometrics differ on d1 x d2.
    Counterexample {
        #[arg(long)]
        d1: String,
        #[arg(long)]
        d2: String,
        /// Base point for the reduced branch (complex literal, non-real).
        #[arg(long)]
        a: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification suite: auts | coverings | metrics | injectivize | counterexample | all.
    Verify {
        #[arg(long)]
        suite: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Deserialize)]
struct DiscPairSpec {
    comp1: String,
    comp2: String,
    target1: String,
    target2: String,
}

fn read_spec(path: &str) -> Result<DiscPairSpec> {
    let text = if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::InvalidArgument(format!("reading stdin: {e}")))?;
        buf
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("reading {path}: {e}")))?
    };
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidArgument(format!("disc-pair JSON: {e}")))
}

fn emit(report: &Report, common: &Common) -> Result<()> {
    if let Some(path) = &common.out {
        std::fs::write(path, report.to_json())
            .map_err(|e| Error::InvalidArgument(format!("writing {}: {e}", path.display())))?;
    }
    if common.json {
        println!("{}", report.to_json());
    } else {
        println!("command: {}", report.command);
        if !report.outputs.is_null() {
            println!(
                "{}",
                serde_json::to_string_pretty(&report.outputs).expect("outputs")
            );
        }
        println!("{}", report.table());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Report> {
    match cli.command {
        Command::Classify { d1, d2, common } => {
            let dom1 = PlanarDomain::parse_descriptor(&d1)?;
            let dom2 = PlanarDomain::parse_descriptor(&d2)?;
            let verdict = classify_product(&dom1, &dom2);
            let report = Report::new(
                "classify",
                serde_json::json!({"d1": d1, "d2": d2, "seed": common.seed}),
                serde_json::json!({
                    "case": format!("{:?}", verdict.case),
                    "equal": verdict.equal(),
                    "witness": verdict.witness,
                }),
                vec![],
            );
            emit(&report, &common)?;
            Ok(report)
        }
        Command::Injectivize {
            spec,
            theta,
            common,
        } => {
            let spec = read_spec(&spec)?;
            let pair = DiscPair::new(
                parse(&spec.comp1)?,
                parse(&spec.comp2)?,
                PlanarDomain::parse_descriptor(&spec.target1)?,
                PlanarDomain::parse_descriptor(&spec.target2)?,
            )?;
            let r = injectivize(&pair, theta)?;
            let v = verify_injectivity_full(&r.g, 10_000, common.seed, &r.injective_components)?;
            let winding_defect = v
                .windings
                .iter()
                .flat_map(|(_, counts)| counts.iter())
                .map(|&w| (w - 1).unsigned_abs() as f64)
                .fold(0.0, f64::max);
            let report = Report::new(
                "injectivize",
                serde_json::json!({
                    "comp1": spec.comp1, "comp2": spec.comp2,
                    "target1": spec.target1, "target2": spec.target2,
                    "theta": theta, "seed": common.seed,
                }),
                serde_json::json!({
                    "case": format!("{:?}", r.case),
                    "swapped": r.swapped,
                    "g1": r.g.comp1.render(),
                    "g2": r.g.comp2.render(),
                    "k": r.k,
                    "c_k": r.c_k.map(|c| serde_json::json!({"re": c.re, "im": c.im})),
                    "pairs_checked": v.pairs_checked,
                    "min_separation_ratio": v.min_separation_ratio,
                    "windings": v.windings,
                }),
                vec![
                    ResidualEntry::new("jet_residual", r.jet_residual, 1e-10),
                    ResidualEntry::new("collisions", v.collisions as f64, 0.0),
                    ResidualEntry::new("winding_defect", winding_defect, 0.0),
                ],
            );
            emit(&report, &common)?;
            Ok(report)
        }
        Command::Counterexample { d1, d2, a, common } => {
            let dom1 = PlanarDomain::parse_descriptor(&d1)?;
            let dom2 = PlanarDomain::parse_descriptor(&d2)?;
            let verdict = classify_product(&dom1, &dom2);
            if verdict.equal() {
                return Err(Error::CaseMismatch(format!(
                    "the pseudometrics agree on {d1} x {d2}: {}",
                    verdict.witness
                )));
            }
            let a = a.map(|s| parse_complex(&s)).transpose()?;
            let cov1 = covering_of(&dom1)?;
            let cov2 = covering_of(&dom2)?;
            let cert = certify_pair(&cov1, &cov2, a)?;
            let (s1, s2) = cert.difference_surfaces();
            let jac = transversality_check(&s1, &s2, &cert);
            let trans_rel = (jac + cert.det_value).norm() / cert.det_value.norm();
            let pers = intersection_persistence(&s1, &s2, &cert, 1e-3)?;
            let mut residuals = vec![
                ResidualEntry::new(
                    "cover_equality_1",
                    cert.residuals["cover_equality_1"],
                    1e-9,
                ),
                ResidualEntry::new(
                    "cover_equality_2",
                    cert.residuals["cover_equality_2"],
                    1e-9,
                ),
                ResidualEntry::new(
                    "involution_defect",
                    cert.residuals["involution_defect"],
                    1e-10,
                ),
                ResidualEntry::new(
                    "det_two_route_rel",
                    cert.residuals["det_two_route_rel"],
                    1e-9,
                ),
                ResidualEntry::lower_bound("abs_det", cert.absdet(), 1e-6),
                ResidualEntry::new("transversality_sign", trans_rel, 1e-9),
                ResidualEntry::new("persistence_residual", pers.residual, 1e-10),
            ];
            if let Some(rel) = cert.residuals.get("dichotomy_margin_rel") {
                residuals.push(ResidualEntry::lower_bound("dichotomy_margin_rel", *rel, 1e-3));
            }
            let report = Report::new(
                "counterexample",
                serde_json::json!({"d1": d1, "d2": d2, "a": a.map(kh_core::format_complex), "seed": common.seed}),
                serde_json::json!({
                    "certificate": cert.to_json_value(),
                    "transversality_jacobian": {"re": jac.re, "im": jac.im},
                    "persistence": pers,
                }),
                residuals,
            );
            emit(&report, &common)?;
            Ok(report)
        }
        Command::Verify { suite, common } => {
            let report = kh_core::suites::run_suite(&suite, common.seed)?;
            emit(&report, &common)?;
            Ok(report)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
