//! Subcommand implementations.

use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use bernstein_core::gaussian_linalg::SymMatrix;
use bernstein_core::mehler_kernel::{mehler_closed, mehler_series};
use bernstein_core::mixtures::{ln_mixture_weight, weight_partial_sum, MixtureParams};
use bernstein_core::processes::ProcessSpec;
use bernstein_core::samplers::{
    empirical_covariance, sample_exact, sample_ou_recursion, sample_periodic_ou, OuStart, PathBatch,
};
use bernstein_core::special_functions::multi_indices_by_degree;
use bernstein_core::verify::{run_all, VerifyConfig};
use bernstein_core::{HarmonicParams, TimeGrid};
use serde_json::{json, Value};

use crate::output::{emit, Cell, Metadata, Table, SCHEMA_VERSION};
use crate::{ProcessArg, RunArgs, SamplerArg};

/// Runs `command`; `Ok(false)` means a verification check failed.
pub fn run(command: &str, args: &RunArgs) -> Result<bool> {
    let params = HarmonicParams::new(args.lambda, args.horizon, args.dim)?;
    let mut metadata = base_metadata(command, args)?;
    let (table, ok) = match command {
        "kernel" => (kernel(args, &params)?, true),
        "law" => (law(args, &params, &mut metadata)?, true),
        "sample" => (sample(args, &params, &mut metadata)?, true),
        "verify" => verify(args, &params, &mut metadata)?,
        "weights" => (weights(args, &params, &mut metadata)?, true),
        other => bail!("unknown command {other}"),
    };
    emit(args.out.as_deref(), args.format, &metadata, &table)?;
    Ok(ok)
}

fn base_metadata(command: &str, args: &RunArgs) -> Result<Metadata> {
    let mut meta: Metadata = vec![
        ("schema_version", json!(SCHEMA_VERSION)),
        ("command", json!(command)),
        ("config", serde_json::to_value(args)?),
    ];
    if !args.deterministic {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        meta.push(("timestamp_unix", json!(now)));
    }
    Ok(meta)
}

fn endpoint(args: &RunArgs) -> Vec<f64> {
    args.endpoint.clone().unwrap_or_else(|| vec![1.0; args.dim])
}

fn grid(args: &RunArgs) -> Result<TimeGrid> {
    let grid = match (&args.grid, &args.grid_range) {
        (Some(times), _) => TimeGrid::new(times.clone())?,
        (None, Some(range)) => TimeGrid::uniform(range[0], range[1], args.grid_count)?,
        (None, None) => TimeGrid::uniform(0.0, args.horizon, args.grid_count)?,
    };
    if grid.last() > args.horizon {
        bail!("grid time {} exceeds T = {}", grid.last(), args.horizon);
    }
    Ok(grid)
}

fn spec(args: &RunArgs, params: &HarmonicParams) -> Result<ProcessSpec> {
    Ok(match args.process {
        ProcessArg::Stationary => ProcessSpec::stationary(*params),
        ProcessArg::Pinned => ProcessSpec::pinned(*params),
        ProcessArg::Reversed => ProcessSpec::pinned_reversed(*params),
        ProcessArg::Bridge => ProcessSpec::bridge(*params, endpoint(args))?,
        ProcessArg::Periodic => ProcessSpec::periodic(*params, args.theta)?,
    })
}

fn kernel(args: &RunArgs, params: &HarmonicParams) -> Result<Table> {
    if args.points == 0 {
        bail!("--points must be positive");
    }
    let (lo, hi) = (args.point_range[0], args.point_range[1]);
    let coords: Vec<f64> = if args.points == 1 {
        vec![lo]
    } else {
        (0..args.points)
            .map(|i| lo + (hi - lo) * i as f64 / (args.points - 1) as f64)
            .collect()
    };
    let mut table = Table::new(&["x", "y", "t", "g_closed", "g_series", "abs_diff", "tail_bound"]);
    for &a in &coords {
        for &b in &coords {
            // points on the diagonal of R^N
            let (x, y) = (vec![a; params.dim], vec![b; params.dim]);
            let closed = mehler_closed(&x, args.time, &y, params)?;
            let series = mehler_series(&x, args.time, &y, params, args.truncation)?;
            table.push(vec![
                a.into(),
                b.into(),
                args.time.into(),
                closed.into(),
                series.value.into(),
                (closed - series.value).abs().into(),
                series.error_bound().into(),
            ]);
        }
    }
    Ok(table)
}

fn law(args: &RunArgs, params: &HarmonicParams, metadata: &mut Metadata) -> Result<Table> {
    let spec = spec(args, params)?;
    let grid = grid(args)?;
    let law = spec.fdd_law(&grid)?;
    let precision = match spec.precision_matrix(&grid) {
        Ok(p) => Some(p),
        Err(e) => {
            metadata.push(("precision_unavailable", json!(e.to_string())));
            None
        }
    };
    metadata.push(("spec", serde_json::to_value(&spec)?));
    metadata.push(("deterministic_coordinates", json!(law.deterministic)));
    let dim = params.dim;
    let times = grid.times();
    let mut table = Table::new(&[
        "row",
        "col",
        "time_row",
        "time_col",
        "component_row",
        "component_col",
        "mean_row",
        "covariance",
        "precision",
    ]);
    for r in 0..law.len() {
        for c in 0..law.len() {
            let (kr, ir, kc, ic) = (r / dim, r % dim, c / dim, c % dim);
            let prec = precision
                .as_ref()
                .map(|p: &SymMatrix| if ir == ic { p.get(kr, kc) } else { 0.0 });
            table.push(vec![
                r.into(),
                c.into(),
                times[kr].into(),
                times[kc].into(),
                ir.into(),
                ic.into(),
                law.mean[r].into(),
                law.covariance.get(r, c).into(),
                prec.into(),
            ]);
        }
    }
    Ok(table)
}

fn draw(args: &RunArgs, params: &HarmonicParams) -> Result<PathBatch> {
    let grid = grid(args)?;
    Ok(match args.sampler {
        SamplerArg::Exact => sample_exact(&spec(args, params)?, &grid, args.paths, args.seed)?,
        SamplerArg::Ou => {
            let start = match args.process {
                ProcessArg::Stationary => OuStart::Stationary,
                ProcessArg::Pinned => OuStart::Origin,
                other => bail!("the OU recursion samples the stationary or pinned process, not {other:?}"),
            };
            sample_ou_recursion(params, &grid, start, args.paths, args.seed)?
        }
        SamplerArg::Periodic => sample_periodic_ou(params, &grid, args.paths, args.seed, args.substeps)?,
    })
}

fn sample(args: &RunArgs, params: &HarmonicParams, metadata: &mut Metadata) -> Result<Table> {
    let batch = draw(args, params).context("sampling failed")?;
    metadata.push(("seed", json!(batch.seed)));
    metadata.push(("sampler_tag", json!(batch.sampler.as_str())));
    metadata.push(("rng", json!(batch.rng)));
    metadata.push(("substeps", json!(batch.substeps)));
    metadata.push(("spec", serde_json::to_value(&batch.spec)?));
    if batch.count >= 2 {
        let report = empirical_covariance(&batch)?;
        metadata.push(("summary", summary(&report)));
    }
    let dim = batch.dim();
    let times = batch.grid.times();
    let mut table = Table::new(&["path_id", "time_index", "time", "component", "value"]);
    for p in 0..batch.count {
        for (k, &t) in times.iter().enumerate() {
            for i in 0..dim {
                table.push(vec![
                    p.into(),
                    k.into(),
                    t.into(),
                    i.into(),
                    batch.value(p, k, i).into(),
                ]);
            }
        }
    }
    Ok(table)
}

fn summary(report: &bernstein_core::samplers::MomentReport) -> Value {
    let n = report.covariance.order();
    let rows = |m: &SymMatrix| -> Vec<Vec<f64>> { (0..n).map(|i| m.row(i).to_vec()).collect() };
    json!({
        "count": report.count,
        "mean": report.mean,
        "covariance": rows(&report.covariance),
        "covariance_std_errors": rows(&report.std_errors),
    })
}

fn verify(args: &RunArgs, params: &HarmonicParams, metadata: &mut Metadata) -> Result<(Table, bool)> {
    let config = VerifyConfig {
        params: *params,
        theta: args.theta,
        endpoint: endpoint(args),
        truncation: args.truncation,
        quad_order: args.quad_order,
        paths: args.paths,
        seed: args.seed,
        perturb: args.perturb,
    };
    let results = run_all(&config);
    let failed = results.iter().filter(|r| !r.passed).count();
    metadata.push(("checks", json!(results.len())));
    metadata.push(("failed", json!(failed)));
    let mut table = Table::new(&["name", "tag", "measured", "tolerance", "passed", "note"]);
    for r in &results {
        eprintln!(
            "{} {:<34} {:>12.3e} <= {:.1e}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.measured,
            r.tolerance
        );
        table.push(vec![
            r.name.clone().into(),
            r.tag.clone().into(),
            r.measured.into(),
            r.tolerance.into(),
            r.passed.into(),
            r.note.clone().map_or(Cell::Empty, Cell::Text),
        ]);
    }
    Ok((table, failed == 0))
}

fn weights(args: &RunArgs, params: &HarmonicParams, metadata: &mut Metadata) -> Result<Table> {
    let mp = MixtureParams::new(*params, args.theta)?;
    let partial = weight_partial_sum(&mp, args.truncation)?;
    metadata.push(("partial_sum", json!(partial.value)));
    metadata.push(("tail_bound", json!(partial.tail_bound)));
    let mut table = Table::new(&["index", "total_degree", "weight", "ln_weight"]);
    for m in multi_indices_by_degree(params.dim, args.truncation) {
        let ln_w = ln_mixture_weight(&m, &mp)?;
        table.push(vec![
            m.to_string().into(),
            m.total_degree().into(),
            ln_w.exp().into(),
            ln_w.into(),
        ]);
    }
    Ok(table)
}
