//! Task runners. Each produces an in-memory [`Artifacts`] bundle; writing is
//! left to the caller.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use homsym_core::detection::{self, DualProbability, OutcomeDistribution};
use homsym_core::metrology::{self, EstimationProtocol, Probe};
use homsym_core::numeric;
use homsym_core::symmetry::{self, SymmetryReport};
use homsym_core::verify::{self, VerifyOptions};
use homsym_core::{FockState, MixedState, ModeUnitary, Sector};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{ConfigError, Scenario, ScenarioState, Task};
use crate::CliError;

pub const DEFAULT_SEED: u64 = 2024;
pub const DEFAULT_KAPPA_MAX: f64 = 0.5;
pub const DEFAULT_POINTS: usize = 25;
pub const DEFAULT_CASES: usize = 100;

/// Files produced by one run: `(file name, contents)`.
pub struct Artifacts {
    pub record: Value,
    pub csv: Vec<(String, String)>,
    pub summary: String,
    /// Set by `verify` when an identity check failed.
    pub failed: bool,
}

fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn tolerances() -> Value {
    json!({
        "prune_threshold": numeric::PRUNE_THRESHOLD,
        "normalization": numeric::NORM_TOLERANCE,
        "unitarity": numeric::UNITARITY_TOLERANCE,
        "hermiticity": numeric::HERMITICITY_TOLERANCE,
        "imaginary_residue": numeric::IMAGINARY_RESIDUE_TOLERANCE,
        "eigenstate": numeric::EIGENSTATE_TOLERANCE,
        "probability_floor": numeric::PROBABILITY_FLOOR,
        "richardson_kappa": metrology::RICHARDSON_KAPPA,
    })
}

fn record(task: Task, scenario: Option<&Scenario>, results: Value) -> Value {
    let mut meta = json!({
        "program": "homsym",
        "version": env!("CARGO_PKG_VERSION"),
        "task": task.name(),
    });
    if let Some(s) = scenario {
        meta["layout"] = json!({ "spatial": s.layout.spatial, "internal": s.layout.internal });
    }
    json!({ "metadata": meta, "tolerances": tolerances(), "results": results })
}

fn mixed(state: &ScenarioState) -> Result<MixedState, CliError> {
    state.as_mixed().map_err(CliError::Core)
}

fn sector_label(s: Sector) -> String {
    match s {
        Sector::Definite(n) => n.to_string(),
        Sector::Mixed => "mixed".into(),
        Sector::Zero => "zero".into(),
    }
}

fn complex_json(z: homsym_core::Complex64) -> Value {
    json!([z.re, z.im])
}

fn report_json(r: &SymmetryReport) -> Value {
    json!({
        "expectation": complex_json(r.expectation),
        "symmetric_weight": r.symmetric_weight,
        "antisymmetric_weight": r.antisymmetric_weight,
        "residue_weights": r.residue_weights,
        "cyclic_expectations": r.cyclic_expectations.iter().copied().map(complex_json).collect::<Vec<_>>(),
    })
}

pub fn symmetry(scenario: &Scenario) -> Result<Artifacts, CliError> {
    let (report, extra) = match &scenario.state {
        ScenarioState::Pure(s) => {
            let report = symmetry::symmetry_report(s);
            let eigen = symmetry::cyclic_eigenvalue(s, numeric::EIGENSTATE_TOLERANCE);
            let extra = json!({
                "kind": "pure",
                "norm": s.norm(),
                "photon_number": sector_label(s.photon_number_sector()),
                "terms": s.len(),
                "cyclic_eigenvalue_index": eigen,
            });
            (report, extra)
        }
        ScenarioState::Mixed(rho) => {
            let report = symmetry::mixed_symmetry_report(rho);
            let extra = json!({
                "kind": "mixed",
                "components": rho.components().len(),
                "photon_numbers": rho.photon_numbers(),
            });
            (report, extra)
        }
    };
    let n = scenario.layout.spatial;
    let mut csv = String::from("index,cyclic_re,cyclic_im,residue_weight\n");
    for l in 0..n {
        let z = report.cyclic_expectations[l];
        let _ = writeln!(csv, "{l},{},{},{}", num(z.re), num(z.im), num(report.residue_weights[l]));
    }

    let mut summary = format!("symmetry: n = {n}, d = {}\n", scenario.layout.internal);
    let _ = writeln!(
        summary,
        "  <P> = {:+.6} {:+.6}i",
        report.expectation.re, report.expectation.im
    );
    let _ = writeln!(summary, "  symmetric weight     = {:.6}", report.symmetric_weight);
    if let Some(w) = report.antisymmetric_weight {
        let _ = writeln!(summary, "  antisymmetric weight = {w:.6}");
    }
    for (j, w) in report.residue_weights.iter().enumerate() {
        let _ = writeln!(summary, "  weight of eigenvalue omega^{j}: {w:.6}");
    }
    let mut results = report_json(&report);
    results["state"] = extra;
    Ok(Artifacts {
        record: record(Task::Symmetry, Some(scenario), results),
        csv: vec![("symmetry.csv".into(), csv)],
        summary,
        failed: false,
    })
}

fn mixture_distribution(rho: &MixedState, u: &ModeUnitary) -> Result<OutcomeDistribution, CliError> {
    let mut entries: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    for (p, s) in rho.components() {
        let dist = detection::output_distribution(s, u).map_err(CliError::Core)?;
        for (k, q) in dist.entries() {
            *entries.entry(k.clone()).or_default() += p * q;
        }
    }
    Ok(OutcomeDistribution::from_entries(rho.layout().spatial, entries))
}

fn dual_json(p: DualProbability) -> Value {
    json!({ "detection": p.detection, "symmetry": p.symmetry, "discrepancy": p.discrepancy() })
}

fn pure_two_mode(state: &FockState) -> Result<Value, CliError> {
    let parity = detection::parity_even_probability(state).map_err(CliError::Core)?;
    let mut out = json!({ "parity_even": dual_json(parity) });
    if state.photon_number_sector() == Sector::Definite(2) {
        let c = detection::coincidence_probability(state).map_err(CliError::Core)?;
        out["coincidence"] = dual_json(c);
    }
    Ok(out)
}

pub fn detect(scenario: &Scenario) -> Result<Artifacts, CliError> {
    let layout = scenario.layout;
    let n = layout.spatial;
    let u = match &scenario.interferometer {
        Some(u) => u.clone(),
        None => ModeUnitary::dft(layout).map_err(CliError::Core)?,
    };
    let rho = mixed(&scenario.state)?;
    let dist = match &scenario.state {
        ScenarioState::Pure(s) => detection::output_distribution(s, &u).map_err(CliError::Core)?,
        ScenarioState::Mixed(r) => mixture_distribution(r, &u)?,
    };

    let mut residues = Vec::with_capacity(n);
    let mut residue_csv = String::from("residue,minus_convention,plus_convention,symmetry_side\n");
    for j in 0..n {
        let dual = detection::mixed_output_statistics(&rho, &u, j).map_err(CliError::Core)?;
        let plus = dist.weighted_sum_probability(j);
        let _ = writeln!(residue_csv, "{j},{},{},{}", num(dual.detection), num(plus), num(dual.symmetry));
        residues.push(json!({
            "residue": j,
            "sum_equals_minus_j": dual.detection,
            "sum_equals_plus_j": plus,
            "symmetry_side": dual.symmetry,
            "discrepancy": dual.discrepancy(),
        }));
    }

    let requested = scenario.params.residue.unwrap_or(0);
    let req = detection::mixed_output_statistics(&rho, &u, requested).map_err(CliError::Core)?;

    let mut results = json!({
        "interferometer_structure": format!("{:?}", u.structure()).to_lowercase(),
        "outcomes": dist.entries().len(),
        "total_probability": dist.total(),
        "residues": residues,
        "requested": {
            "residue": requested,
            "probability": req.detection,
            "symmetry_side": req.symmetry,
        },
    });
    if n == 2 {
        if let ScenarioState::Pure(s) = &scenario.state {
            results["hadamard"] = pure_two_mode(s)?;
        }
        results["parity_even_configured"] = json!(dist.parity_even());
    }

    let mut csv = vec![
        ("distribution.csv".to_string(), dist.to_csv()),
        ("residues.csv".to_string(), residue_csv),
    ];
    let samples = scenario.params.samples.unwrap_or(0);
    if samples > 0 {
        let seed = scenario.params.seed.unwrap_or(DEFAULT_SEED);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draws = dist.sample(&mut rng, samples).map_err(CliError::Core)?;
        let mut counts: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
        for d in draws {
            *counts.entry(d).or_default() += 1;
        }
        let mut text = String::new();
        for k in 0..n {
            let _ = write!(text, "m{k},");
        }
        text.push_str("count\n");
        for (k, c) in &counts {
            for m in k {
                let _ = write!(text, "{m},");
            }
            let _ = writeln!(text, "{c}");
        }
        let hits = counts
            .iter()
            .filter(|(k, _)| {
                let s: u64 = k.iter().enumerate().map(|(i, &m)| i as u64 * m as u64).sum();
                s % n as u64 == ((n - requested) % n) as u64
            })
            .map(|(_, c)| c)
            .sum::<usize>();
        results["sampling"] = json!({
            "seed": seed,
            "samples": samples,
            "requested_residue_frequency": hits as f64 / samples as f64,
        });
        csv.push(("samples.csv".into(), text));
    }

    let mut summary = format!("detect: n = {n}, d = {}, {} outcomes\n", layout.internal, dist.entries().len());
    for (counts, p) in dist.entries() {
        let _ = writeln!(summary, "  P{counts:?} = {p:.6}");
    }
    let _ = writeln!(
        summary,
        "  P[sum k m_k = -{requested} mod {n}] = {:.6} (symmetry side {:.6})",
        req.detection, req.symmetry
    );
    if let Some(h) = results.get("hadamard").and_then(|h| h.get("coincidence")) {
        let _ = writeln!(summary, "  coincidence behind 50:50 splitter = {:.6}", h["detection"].as_f64().unwrap_or(f64::NAN));
    }
    Ok(Artifacts {
        record: record(Task::Detect, Some(scenario), results),
        csv,
        summary,
        failed: false,
    })
}

fn optional(r: homsym_core::Result<f64>) -> Value {
    match r {
        Ok(v) => json!({ "value": v }),
        Err(e) => json!({ "unavailable": e.to_string() }),
    }
}

pub fn fisher(scenario: &Scenario) -> Result<Artifacts, CliError> {
    let generator = scenario
        .generator
        .clone()
        .ok_or_else(|| CliError::Config(ConfigError::new("generator", "the fisher task needs a generator")))?;
    let u = match &scenario.interferometer {
        Some(u) => u.clone(),
        None => ModeUnitary::dft(scenario.layout).map_err(CliError::Core)?,
    };
    let probe = match &scenario.state {
        ScenarioState::Pure(s) => Probe::Pure(s.clone()),
        ScenarioState::Mixed(r) => Probe::Mixed(r.clone()),
    };
    let is_mixed = matches!(probe, Probe::Mixed(_));
    let residue = scenario.params.residue.unwrap_or(0);
    let protocol = EstimationProtocol::new(probe, generator, u, residue).map_err(CliError::Core)?;

    let kappa_max = scenario.params.kappa_max.unwrap_or(DEFAULT_KAPPA_MAX);
    let points = scenario.params.points.unwrap_or(DEFAULT_POINTS);
    let grid: Vec<f64> = (1..=points).map(|i| kappa_max * i as f64 / points as f64).collect();
    let sweep = metrology::fisher_two_outcome(&protocol, &grid).map_err(CliError::Core)?;
    let qfi = protocol.qfi().map_err(CliError::Core)?;
    let extrapolated = metrology::fisher_limit_extrapolated(&protocol).map_err(CliError::Core)?;

    let mut csv = String::from("kappa,fisher,hit_probability,qfi\n");
    for p in &sweep {
        let _ = writeln!(csv, "{},{},{},{}", num(p.kappa), num(p.fisher), num(p.hit_probability), num(qfi));
    }

    let commutator = if is_mixed {
        json!({ "unavailable": "pure probes only; see mixed" })
    } else {
        optional(metrology::fisher_limit_commutator(&protocol))
    };
    let mixed_value = if is_mixed {
        optional(metrology::fisher_mixed(&protocol))
    } else {
        json!({ "unavailable": "mixed probes only" })
    };
    let bound = |f: f64| if f > 0.0 { json!(1.0 / f.sqrt()) } else { Value::Null };
    let results = json!({
        "residue": residue,
        "symmetry_class": protocol.symmetry_class(),
        "qfi": qfi,
        "fisher_limit": {
            "extrapolated": extrapolated,
            "commutator": commutator,
            "symmetry_adapted": optional(metrology::fisher_symmetry_adapted(&protocol)),
            "mixed": mixed_value,
        },
        "relative_gap": if qfi > 0.0 { json!((extrapolated - qfi).abs() / qfi) } else { Value::Null },
        "single_shot_bounds": {
            "classical": bound(extrapolated),
            "quantum": bound(qfi),
        },
        "grid": { "kappa_max": kappa_max, "points": points },
        "sweep": sweep,
    });

    let mut summary = format!(
        "fisher: n = {}, d = {}, residue {residue}, class {}\n",
        scenario.layout.spatial,
        scenario.layout.internal,
        serde_json::to_string(&protocol.symmetry_class()).unwrap_or_default()
    );
    let _ = writeln!(summary, "  QFI                   = {qfi:.9}");
    let _ = writeln!(summary, "  FI (kappa -> 0)       = {extrapolated:.9}");
    let _ = writeln!(summary, "  sweep: {points} points on (0, {kappa_max}]");
    Ok(Artifacts {
        record: record(Task::Fisher, Some(scenario), results),
        csv: vec![("fisher.csv".into(), csv)],
        summary,
        failed: false,
    })
}

pub fn verify(seed: Option<u64>, cases: Option<usize>) -> Artifacts {
    let options = VerifyOptions {
        seed: seed.unwrap_or(DEFAULT_SEED),
        cases: cases.unwrap_or(DEFAULT_CASES),
    };
    let results = verify::run_suite(options);
    let failed = results.iter().filter(|r| !r.passed).count();
    let mut csv = String::from("name,cases,max_error,tolerance,passed\n");
    let mut summary = format!(
        "verify: {} checks, seed {}, {} cases each\n",
        results.len(),
        options.seed,
        options.cases
    );
    for r in &results {
        let _ = writeln!(csv, "{},{},{},{},{}", r.name, r.cases, num(r.max_error), num(r.tolerance), r.passed);
        let mark = if r.passed { "ok  " } else { "FAIL" };
        let _ = write!(summary, "  {mark} {:<36} {:.3e} / {:.0e}", r.name, r.max_error, r.tolerance);
        if let Some(e) = &r.error {
            let _ = write!(summary, "  ({e})");
        }
        summary.push('\n');
    }
    let _ = writeln!(summary, "{} passed, {failed} failed", results.len() - failed);
    let results_json = json!({
        "seed": options.seed,
        "cases": options.cases,
        "failed": failed,
        "checks": results,
    });
    Artifacts {
        record: record(Task::Verify, None, results_json),
        csv: vec![("verify.csv".into(), csv)],
        summary,
        failed: failed > 0,
    }
}
