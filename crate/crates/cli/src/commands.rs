use std::path::Path;
use std::time::SystemTime;

use eta_core::config::{Tolerances, P_GAGB_TARGET};
use eta_core::eta::{certify, solve_eta, Certification, EtaDocument, SCHEMA_VERSION};
use eta_core::json::{complex_to_json, Exact, ExactComplex};
use eta_core::lhv::{enumerate_contradiction_with, lhv_best_model_with, Classifier, ConstraintMask, ContradictionCertificate, LhvBound};
use eta_core::measurement::Outcome4;
use eta_core::montecarlo::{pair_label, run_experiment_logged, EstimateReport, ExperimentConfig, ShotEvent};
use eta_core::spin::StateVector;
use eta_core::{Error, Family};
use serde::Serialize;
use serde_json::json;

use crate::args::{Cli, Command, DeriveEtaArgs, LhvCheckArgs, SampleArgs, VerifyArgs};
use crate::exit;
use crate::manifest::{Report, RunManifest};
use crate::output::{resolve, write_atomic, write_json};

pub fn dispatch(cli: Cli) -> u8 {
    let started = cli.timestamps.then(SystemTime::now);
    match &cli.command {
        Command::DeriveEta(a) => derive_eta(a, started),
        Command::Verify(a) => verify(a, started),
        Command::LhvCheck(a) => lhv_check(a, started),
        Command::Sample(a) => sample(a, started),
    }
}

fn emit<T: Serialize>(path: &Path, manifest: &mut RunManifest, started: Option<SystemTime>, body: &T) -> Result<(), u8> {
    manifest.outputs.push(path.display().to_string());
    manifest.stamp(started);
    let report = Report { schema_version: SCHEMA_VERSION, manifest, body };
    write_json(path, &report).map_err(|e| {
        eprintln!("eta: cannot write {}: {e}", path.display());
        exit::CANT_CREATE
    })
}

#[derive(Serialize)]
struct AmbiguityReport {
    nullspace_dimension: usize,
    candidates: Vec<Candidate>,
}

#[derive(Serialize)]
struct Candidate {
    p_gagb: Option<Exact>,
    amplitudes: Vec<ExactComplex>,
}

fn derive_eta(args: &DeriveEtaArgs, started: Option<SystemTime>) -> u8 {
    let path = resolve(args.out.as_deref(), "eta.json");
    let mut manifest = RunManifest::new("derive-eta", json!({ "tol": args.tol, "format": "json" }), None);
    if !(args.tol > 0.0) {
        eprintln!("eta: --tol must be positive");
        return exit::USAGE;
    }
    match solve_eta(args.tol) {
        Ok(solution) => {
            let doc = EtaDocument::from_solution(&solution);
            if let Err(code) = emit(&path, &mut manifest, started, &doc) {
                return code;
            }
            println!(
                "nullspace dimension 1; P(G_A=1,G_B=1) = {:.17} (target 9/112 = {:.17})",
                solution.p_gagb, P_GAGB_TARGET
            );
            exit::SUCCESS
        }
        Err(Error::AmbiguousSolution(states)) => {
            let report = AmbiguityReport {
                nullspace_dimension: states.len(),
                candidates: states
                    .iter()
                    .map(|s| Candidate {
                        p_gagb: eta_core::eta::p_gagb_of(s).ok().map(Exact),
                        amplitudes: s.amplitudes().iter().map(|&c| complex_to_json(c)).collect(),
                    })
                    .collect(),
            };
            if let Err(code) = emit(&path, &mut manifest, started, &report) {
                return code;
            }
            eprintln!("eta: constraint nullspace has dimension {}; candidates written to {}", states.len(), path.display());
            exit::AMBIGUOUS
        }
        Err(e @ Error::NoSolution { .. }) => {
            eprintln!("eta: {e}");
            exit::FAILURE
        }
        Err(e) => {
            eprintln!("eta: {e}");
            exit::FAILURE
        }
    }
}

#[derive(serde::Deserialize)]
struct EtaFile {
    report: EtaDocument,
}

/// Loads a `derive-eta` report. Err carries the exit code.
fn load_state(path: &Path) -> Result<StateVector, u8> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("eta: cannot read {}: {e}", path.display());
        exit::NO_INPUT
    })?;
    let file: EtaFile = serde_json::from_str(&text).map_err(|e| {
        eprintln!("eta: {} is not a state file: {e}", path.display());
        exit::DATA_ERR
    })?;
    file.report.state().map_err(|e| {
        eprintln!("eta: {} failed validation: {e}", path.display());
        exit::DATA_ERR
    })
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    tolerances: Tolerances,
    targets: [f64; 4],
    certification: &'a Certification,
}

fn verify(args: &VerifyArgs, started: Option<SystemTime>) -> u8 {
    let state = match load_state(&args.eta) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let path = resolve(args.out.as_deref(), "certification.json");
    let mut manifest = RunManifest::new(
        "verify",
        json!({ "eta": args.eta.display().to_string(), "rotations": args.rotations }),
        Some(args.seed),
    );
    let cert = match certify(&state, args.rotations, args.seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("eta: {e}");
            return exit::FAILURE;
        }
    };
    let body = VerifyReport {
        tolerances: Tolerances::default(),
        targets: eta_core::measurement::HardyRecord::TARGETS,
        certification: &cert,
    };
    if let Err(code) = emit(&path, &mut manifest, started, &body) {
        return code;
    }
    let names = ["P(F_A=1,F_B=1)", "P(F_A=1|G_B=1)", "P(F_B=1|G_A=1)", "P(G_A=1,G_B=1)"];
    for (name, dev) in names.iter().zip(cert.max_deviation) {
        println!("{name:<16} max deviation {dev:.3e}");
    }
    println!("{} records, {}", cert.records.len(), if cert.pass { "PASS" } else { "FAIL" });
    if cert.pass {
        exit::SUCCESS
    } else {
        exit::FAILURE
    }
}

#[derive(Serialize)]
struct LhvReport {
    certificate: ContradictionCertificate,
    lhv_bound: LhvBound,
    quantum_p_gagb: f64,
    relaxations: Vec<LhvBound>,
    mutation: Option<String>,
}

fn parse_flip(spec: &str) -> Option<Outcome4> {
    let (family, bits) = spec.split_once(':')?;
    let family = match family {
        "F" | "f" => Family::F,
        "G" | "g" => Family::G,
        _ => return None,
    };
    let bits: Vec<u8> = bits.chars().map(|c| c.to_digit(2).map(|d| d as u8)).collect::<Option<_>>()?;
    Some(Outcome4::new(bits.try_into().ok()?, family))
}

fn lhv_check(args: &LhvCheckArgs, started: Option<SystemTime>) -> u8 {
    let mut classifier = Classifier::default();
    if let Some(spec) = &args.flip_entry {
        match parse_flip(spec) {
            Some(o) => classifier = classifier.with_flipped(o),
            None => {
                eprintln!("eta: --flip-entry expects FAMILY:BITS, e.g. G:0011");
                return exit::USAGE;
            }
        }
    }
    let path = resolve(args.out.as_deref(), "lhv.json");
    let mut manifest = RunManifest::new("lhv-check", json!({ "flip_entry": args.flip_entry }), None);

    let certificate = enumerate_contradiction_with(&classifier);
    let relaxations = [
        ConstraintMask { not_both_f_plus: false, ..ConstraintMask::ALL },
        ConstraintMask { gb_implies_fa: false, ..ConstraintMask::ALL },
        ConstraintMask { ga_implies_fb: false, ..ConstraintMask::ALL },
    ]
    .into_iter()
    .map(lhv_best_model_with)
    .collect();
    let report = LhvReport {
        lhv_bound: lhv_best_model_with(ConstraintMask::ALL),
        quantum_p_gagb: P_GAGB_TARGET,
        relaxations,
        mutation: args.flip_entry.clone(),
        certificate,
    };
    if let Err(code) = emit(&path, &mut manifest, started, &report) {
        return code;
    }
    let c = &report.certificate;
    println!(
        "{} strategies, {} respect the zero constraints, {} witnesses; LHV bound {} vs quantum 9/112",
        c.n_strategies,
        c.n_respecting_zero_constraints,
        c.witnesses.len(),
        report.lhv_bound.max_gg
    );
    if let Some(w) = c.witnesses.first() {
        println!("witness: a_F={} a_G={} b_F={} b_G={}", w.a_f, w.a_g, w.b_f, w.b_g);
    }
    if c.is_valid() {
        exit::SUCCESS
    } else {
        exit::FAILURE
    }
}

#[derive(Serialize)]
struct EventRow {
    block: u64,
    setting_pair: String,
    outcome_a: String,
    outcome_b: String,
}

fn bits(o: Outcome4) -> String {
    o.bits.iter().map(|b| char::from(b'0' + b)).collect()
}

fn write_events(path: &Path, events: &[ShotEvent]) -> Result<(), String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for e in events {
        w.serialize(EventRow { block: e.block, setting_pair: pair_label(e.pair), outcome_a: bits(e.a), outcome_b: bits(e.b) })
            .map_err(|e| e.to_string())?;
    }
    let data = w.into_inner().map_err(|e| e.to_string())?;
    write_atomic(path, &data).map_err(|e| e.to_string())
}

fn sample(args: &SampleArgs, started: Option<SystemTime>) -> u8 {
    let config = ExperimentConfig {
        shots_per_setting_pair: args.shots,
        rotation_policy: args.policy.into(),
        block_size: args.block,
        seed: args.seed,
    };
    if let Err(e) = config.validate() {
        eprintln!("eta: {e}");
        return exit::USAGE;
    }
    let state = match load_state(&args.eta) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let path = resolve(args.out.as_deref(), "estimates.json");
    let mut manifest = RunManifest::new(
        "sample",
        json!({
            "eta": args.eta.display().to_string(),
            "shots": args.shots,
            "policy": config.rotation_policy,
            "block": args.block,
            "events": args.events.as_ref().map(|p| p.display().to_string()),
        }),
        Some(args.seed),
    );
    let (report, events): (EstimateReport, Vec<ShotEvent>) = match run_experiment_logged(&state, &config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("eta: {e}");
            return exit::FAILURE;
        }
    };
    if let Some(ev) = &args.events {
        if let Err(e) = write_events(ev, &events) {
            eprintln!("eta: cannot write {}: {e}", ev.display());
            return exit::CANT_CREATE;
        }
        manifest.outputs.push(ev.display().to_string());
    }
    if let Err(code) = emit(&path, &mut manifest, started, &report) {
        return code;
    }
    for q in &report.quantities {
        match (q.estimate, q.z_score) {
            (Some(e), Some(z)) => println!("{:<16} {e:.6} (target {:.6}, z = {z:+.2})", q.name, q.target),
            (Some(e), None) => println!("{:<16} {e:.6} (target {:.6}, {} / {})", q.name, q.target, q.numerator, q.denominator),
            (None, _) => println!("{:<16} n/a", q.name),
        }
    }
    for w in &report.warnings {
        eprintln!("eta: warning: {w}");
    }
    println!("zero-probability cell hits: {}; {}", report.zero_cell_hits, if report.pass { "PASS" } else { "FAIL" });
    if report.pass {
        exit::SUCCESS
    } else {
        exit::FAILURE
    }
}
