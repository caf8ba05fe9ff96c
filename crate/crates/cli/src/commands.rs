//! One function per subcommand: typed config in, summary and artifacts out.

use serde::Serialize;
use serde_json::{json, Value};
use toric_core::gauge_mc::{simulate, transition_from_rows, FractionProbe, GaugeModel, McParams, MeasurementPlan};
use toric_core::homology::{torus_betti, torus_betti_expected};
use toric_core::lattice::{Lattice, LatticeSpec};
use toric_core::memory_sim::{
    lifetime_estimate, memory_classification, LifetimeParams, LifetimeReport, SectorKind, SectorSpec,
};
use toric_core::partitions::{
    build_partitions, build_partitions_relaxed, build_partitions_slabs, scheme_betti, PartitionScheme,
};
use toric_core::stabilizer::{topological_entropy_zero_t, ModelSpec};
use toric_core::thermal_exact::{duality_check, exact_w, full_partition_function, qtop_exact, stop_finite_t, Sector};

use crate::config::*;
use crate::error::CliError;
use crate::output::Artifact;

pub struct RunOutput {
    /// Printed on stdout.
    pub summary: Value,
    pub artifacts: Vec<Artifact>,
    pub seeds: Vec<u64>,
    /// Raised after the artifacts are written, so a failing check still
    /// leaves its evidence on disk.
    pub verdict: Option<CliError>,
}

impl RunOutput {
    fn json(name: &str, summary: Value) -> Self {
        RunOutput {
            artifacts: vec![Artifact::json(name, &summary)],
            summary,
            seeds: Vec::new(),
            verdict: None,
        }
    }
}

fn lattice(model: &ModelBlock) -> Result<Lattice, CliError> {
    Ok(Lattice::new(LatticeSpec::new(model.dim()?, model.size()?)?))
}

fn scheme(lat: &Lattice, model: &ModelBlock, kind: SchemeKind) -> Result<PartitionScheme, CliError> {
    let k = model.k()?;
    Ok(match kind {
        SchemeKind::Nested => build_partitions(lat, k, model.a()?)?,
        SchemeKind::Relaxed => build_partitions_relaxed(lat, k, model.a()?)?,
        SchemeKind::Slabs => build_partitions_slabs(lat, k)?,
    })
}

fn nonempty_grid(v: &[f64], field: &str) -> Result<(), CliError> {
    if v.is_empty() {
        return Err(CliError::schema(format!("/task/{field}"), "grid is empty"));
    }
    if let Some(i) = v.iter().position(|b| !b.is_finite() || *b < 0.0) {
        return Err(CliError::schema(
            format!("/task/{field}/{i}"),
            "must be finite and >= 0",
        ));
    }
    Ok(())
}

pub fn te0(cfg: &Config<Te0Task>) -> Result<RunOutput, CliError> {
    let lat = lattice(&cfg.model)?;
    let k = cfg.model.k()?;
    let s = scheme(&lat, &cfg.model, cfg.task.scheme)?;
    let te = topological_entropy_zero_t(&lat, k, &s)?;
    let summary = json!({
        "D": lat.dim(),
        "k": k,
        "L": lat.size(),
        "a": s.a,
        "degenerate_geometry": s.degenerate,
        "s_top_log2": te.rank_path,
        "rank_path": te.rank_path,
        "betti_path": te.betti_path,
        "gi_part": te.gi_part,
        "hi_part": te.hi_part,
        "partitions": te.partitions,
    });
    let mut out = RunOutput::json("te0.json", summary);
    if te.rank_path != te.betti_path {
        out.verdict = Some(CliError::Invariant(format!(
            "rank path {} and Betti path {} disagree",
            te.rank_path, te.betti_path
        )));
    }
    Ok(out)
}

pub fn betti(cfg: &Config<BettiTask>) -> Result<RunOutput, CliError> {
    let lat = lattice(&cfg.model)?;
    let torus = torus_betti(&lat);
    let mut summary = json!({
        "D": lat.dim(),
        "L": lat.size(),
        "torus": torus,
        "expected": torus_betti_expected(lat.dim()),
    });
    if cfg.task.partitions {
        let s = scheme(&lat, &cfg.model, SchemeKind::Relaxed)?;
        let sb = scheme_betti(&lat, &s)?;
        let rows: Vec<Value> = s
            .entries
            .iter()
            .zip(sb.c.iter().zip(&sb.d))
            .map(|(e, (c, d))| json!({ "index": e.index, "sign": e.sign, "reduced_c": c, "reduced_d": d }))
            .collect();
        summary["partitions"] = json!(rows);
    }
    let mut out = RunOutput::json("betti.json", summary);
    if torus != torus_betti_expected(lat.dim()) {
        out.verdict = Some(CliError::Invariant(
            "torus Betti numbers differ from binomial(D,j)".into(),
        ));
    }
    Ok(out)
}

pub fn partitions(cfg: &Config<PartitionsTask>) -> Result<RunOutput, CliError> {
    let lat = lattice(&cfg.model)?;
    let s = scheme(&lat, &cfg.model, cfg.task.scheme)?;
    let entries: Vec<Value> = s
        .entries
        .iter()
        .map(|e| {
            let vertices: Vec<usize> = (0..lat.num_vertices()).filter(|&v| e.region_c.contains(v)).collect();
            json!({
                "index": e.index,
                "sign": e.sign,
                "vertices_c": vertices,
                "spins_c": e.spins_c_indices(),
                "spins_d": e.spins_d_indices(),
            })
        })
        .collect();
    let summary = json!({
        "D": s.dim,
        "L": s.size,
        "k": s.k,
        "a": s.a,
        "degenerate": s.degenerate,
        "entries": entries,
    });
    Ok(RunOutput::json("partitions.json", summary))
}

#[derive(Serialize)]
struct ThermalRow {
    beta: f64,
    #[serde(rename = "Z")]
    z: f64,
    #[serde(rename = "W")]
    w: f64,
    #[serde(rename = "Qtop_routeA")]
    qtop_route_a: f64,
    #[serde(rename = "Qtop_routeB")]
    qtop_route_b: f64,
    #[serde(rename = "Stop_nats")]
    stop_nats: f64,
    #[serde(rename = "Stop_log2units")]
    stop_log2units: f64,
}

pub fn thermal_exact(cfg: &Config<ThermalTask>) -> Result<RunOutput, CliError> {
    nonempty_grid(&cfg.task.beta, "beta")?;
    let m = &cfg.model;
    let spec = ModelSpec::new(m.dim()?, m.k()?, m.size()?, m.lambda, m.mu)?;
    let lat = Lattice::new(spec.lattice_spec());
    let s = scheme(&lat, m, cfg.task.scheme)?;
    let plaquette = Sector::plaquette(&lat, spec.k, spec.mu)?;
    let mut rows = Vec::new();
    for &beta in &cfg.task.beta {
        let q = qtop_exact(&plaquette, &s, beta)?;
        let st = stop_finite_t(&spec, &s, beta)?;
        rows.push(ThermalRow {
            beta,
            z: full_partition_function(&lat, spec.k, beta, spec.lambda, spec.mu)?.value(),
            w: exact_w(&plaquette, beta)?,
            qtop_route_a: q.route_a,
            qtop_route_b: q.route_b,
            stop_nats: st.total_nats,
            stop_log2units: st.total_log2,
        });
    }
    let worst = rows
        .iter()
        .map(|r| (r.qtop_route_a - r.qtop_route_b).abs())
        .fold(0.0, f64::max);
    let summary = json!({
        "D": spec.dim,
        "k": spec.k,
        "L": spec.size,
        "degenerate_geometry": s.degenerate,
        "rows": rows.len(),
        "max_route_difference": worst,
        "csv": "thermal_exact.csv",
    });
    let verdict = (worst >= 1e-9).then(|| CliError::Invariant(format!("Q_top routes differ by {worst:e}")));
    Ok(RunOutput {
        artifacts: vec![
            Artifact::csv("thermal_exact.csv", &rows)?,
            Artifact::json("thermal_exact.json", &summary),
        ],
        summary,
        seeds: Vec::new(),
        verdict,
    })
}

#[derive(Serialize)]
struct McRow {
    beta_mu: f64,
    chain: usize,
    observable: String,
    value: f64,
    error: Option<f64>,
}

pub fn mc(cfg: &Config<McTask>) -> Result<RunOutput, CliError> {
    let t = &cfg.task;
    let model = GaugeModel::new(cfg.model.dim()?, cfg.model.k()?, cfg.model.size()?)?;
    let params = McParams {
        seed: t.seed,
        sweeps: t.sweeps,
        thermalization: t.thermalization.unwrap_or(t.sweeps / 10),
        stride: t.stride,
        beta_mu: t.beta_mu.clone(),
        chains: t.chains,
    };
    let fraction = match t.fraction_entry {
        Some(i) => {
            let s = scheme(model.lattice(), &cfg.model, SchemeKind::Relaxed)?;
            let entry = s
                .entry(i)
                .map_err(|_| CliError::schema("/task/fraction_entry", format!("no partition {i}")))?;
            Some(FractionProbe::new(model.lattice(), model.k(), entry)?)
        }
        None => None,
    };
    let plan = MeasurementPlan {
        wilson_sizes: t.wilson_sizes.clone(),
        fraction,
    };
    let rows = simulate(&model, &params, &plan)?;
    let mut csv_rows = Vec::new();
    let mut push = |r: &toric_core::gauge_mc::ObservableRow, name: String, value: f64, error: Option<f64>| {
        csv_rows.push(McRow {
            beta_mu: r.beta_mu,
            chain: r.chain,
            observable: name,
            value,
            error,
        })
    };
    for r in &rows {
        let e = &r.energy;
        push(r, "energy_per_term".into(), e.energy_per_term, Some(e.energy_error));
        push(r, "specific_heat".into(), e.specific_heat, Some(e.specific_heat_error));
        push(r, "tau_int".into(), e.tau_int, None);
        push(r, "acceptance".into(), r.acceptance, None);
        if let Some(w) = &r.wilson {
            for (i, &size) in w.sizes.iter().enumerate() {
                push(r, format!("wilson_{size}"), w.means[i], Some(w.errors[i]));
                if let Some(c) = w.creutz[i] {
                    push(r, format!("creutz_{size}"), c, None);
                }
            }
        }
        if let Some(f) = &r.defect_fraction {
            push(r, "defect_admissible".into(), f.admissible as f64, None);
            if let Some(v) = f.fraction {
                push(r, "defect_fraction".into(), v, f.error);
            }
        }
    }
    let transition = transition_from_rows(&model, &rows, &params.beta_mu);
    let summary = json!({
        "D": model.lattice().dim(),
        "k": model.k(),
        "L": model.lattice().size(),
        "transition": {
            "beta_mu_crit": transition.beta_mu_crit,
            "t_crit": transition.t_crit(),
            "bracket": [transition.bracket.0, transition.bracket.1],
            "inconclusive": transition.inconclusive,
            "by_rule": transition.by_rule,
        },
        "rows": rows,
        "csv": "mc.csv",
    });
    Ok(RunOutput {
        artifacts: vec![
            Artifact::csv("mc.csv", &csv_rows)?,
            Artifact::json("mc_summary.json", &summary),
        ],
        summary,
        seeds: vec![t.seed],
        verdict: None,
    })
}

#[derive(Serialize)]
struct TrialRow {
    sector: &'static str,
    size: usize,
    trial: usize,
    first_flip_sweeps: Option<f64>,
    censored: bool,
}

fn sector_name(kind: SectorKind) -> &'static str {
    match kind {
        SectorKind::ADefect => "a",
        SectorKind::BDefect => "b",
    }
}

fn report_json(r: &LifetimeReport) -> Value {
    let points: Vec<Value> = r
        .points
        .iter()
        .map(|p| {
            json!({
                "size": p.size,
                "trials": p.trials,
                "censored": p.censored,
                "mean_sweeps": p.mean,
                "ci95": [p.ci_low, p.ci_high],
                "lower_bound": p.lower_bound,
            })
        })
        .collect();
    json!({
        "sector": sector_name(r.sector.kind),
        "temperature": r.sector.temperature,
        "points": points,
        "trend": r.trend,
    })
}

pub fn memory(cfg: &Config<MemoryTask>) -> Result<RunOutput, CliError> {
    let t = &cfg.task;
    let params = LifetimeParams {
        dim: cfg.model.dim()?,
        k: cfg.model.k()?,
        sizes: t.sizes.clone(),
        trials: t.trials,
        max_sweeps: t.max_sweeps,
        seed: t.seed,
    };
    let kinds: &[SectorKind] = match t.sector {
        SectorChoice::A => &[SectorKind::ADefect],
        SectorChoice::B => &[SectorKind::BDefect],
        SectorChoice::Both => &[SectorKind::ADefect, SectorKind::BDefect],
    };
    let mut reports = Vec::new();
    for &kind in kinds {
        let (field, specific) = match kind {
            SectorKind::ADefect => ("temperature_a", t.temperature_a),
            SectorKind::BDefect => ("temperature_b", t.temperature_b),
        };
        let temperature = specific
            .or(t.temperature)
            .ok_or_else(|| CliError::schema(format!("/task/{field}"), "no temperature given for this sector"))?;
        reports.push(lifetime_estimate(SectorSpec { kind, temperature }, &params)?);
    }
    let mut trials = Vec::new();
    for r in &reports {
        for p in &r.points {
            for (i, time) in p.times.iter().enumerate() {
                trials.push(TrialRow {
                    sector: sector_name(r.sector.kind),
                    size: p.size,
                    trial: i,
                    first_flip_sweeps: *time,
                    censored: time.is_none(),
                });
            }
        }
    }
    let label = (reports.len() == 2).then(|| memory_classification(reports[0].trend, reports[1].trend));
    let summary = json!({
        "D": params.dim,
        "k": params.k,
        "max_sweeps": params.max_sweeps,
        "sectors": reports.iter().map(report_json).collect::<Vec<_>>(),
        "label": label,
        "csv": "memory_trials.csv",
    });
    Ok(RunOutput {
        artifacts: vec![
            Artifact::csv("memory_trials.csv", &trials)?,
            Artifact::json("memory_summary.json", &summary),
        ],
        summary,
        seeds: vec![t.seed],
        verdict: None,
    })
}

pub fn duality(cfg: &Config<DualityTask>) -> Result<RunOutput, CliError> {
    nonempty_grid(&cfg.task.beta, "beta")?;
    let m = &cfg.model;
    let spec = ModelSpec::new(m.dim()?, m.k()?, m.size()?, m.lambda, m.mu)?;
    let mut checks = Vec::new();
    for &beta in &cfg.task.beta {
        let r = duality_check(&spec, beta)?;
        checks.push(json!({
            "beta": beta,
            "ln_z_primal": r.ln_z_primal,
            "ln_z_dual": r.ln_z_dual,
            "relative_difference": r.relative_difference,
            "passed": r.passed,
        }));
    }
    let passed = checks.iter().all(|c| c["passed"] == json!(true));
    let summary = json!({
        "D": spec.dim,
        "k": spec.k,
        "dual_k": spec.dual().k,
        "L": spec.size,
        "lambda": spec.lambda,
        "mu": spec.mu,
        "checks": checks,
        "result": if passed { "pass" } else { "fail" },
    });
    let mut out = RunOutput::json("duality.json", summary);
    if !passed {
        out.verdict = Some(CliError::Invariant(
            "Z^(D,k) and Z^(D,D-k) with swapped couplings differ".into(),
        ));
    }
    Ok(out)
}
