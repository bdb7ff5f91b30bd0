use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use amplisat::landscape::{brute_force_amplify, stats, vertex_sweep};
use amplisat::solvers::{benchmark_streaming, instance_seed, summarize, BENCH_CSV_HEADER};
use amplisat::{
    build_ledger, generate_planted, optimal_iterations, AnnealConfig, BenchInstance, BenchOptions,
    ConditionedObjective, GradientConfig, InitialObjective, InstanceJson, ObjectiveHandle,
    OracleKind, SolverConfig, DEFAULT_N_LIMIT, OPTIMAL_ELL,
};
use anyhow::{Context, Result};
use clap::Parser;
use serde_json::json;

use crate::instance::{load, resolve_l};
use crate::manifest::{manifest_path, resolved_args, with_suffix, RunManifest};
use crate::{
    exit, run, BenchArgs, Cli, GenArgs, Invalid, LandscapeArgs, LedgerArgs, ReplayArgs, SolveArgs,
    SolverArg, ValidateArgs,
};

/// Relative tolerance for `landscape --verify`.
const VERIFY_TOLERANCE: f64 = 1e-9;

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    ensure_parent(path)?;
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// `auto` and `-1` map to [`OPTIMAL_ELL`].
fn parse_ell_choice(s: &str) -> Result<i64> {
    match s.trim() {
        "auto" => Ok(OPTIMAL_ELL),
        other => {
            let v: i64 = other
                .parse()
                .map_err(|_| Invalid(format!("invalid iteration count `{other}`")))?;
            if v < OPTIMAL_ELL {
                return Err(Invalid(format!("invalid iteration count `{other}`")).into());
            }
            Ok(v)
        }
    }
}

fn resolve_ell(choice: i64, n: usize, l: u64) -> Result<usize> {
    if choice == OPTIMAL_ELL {
        Ok(optimal_iterations(n, l)?)
    } else {
        Ok(choice as usize)
    }
}

pub fn gen(a: GenArgs, raw: &[String]) -> Result<u8> {
    let seed = a.seed.unwrap_or_else(rand::random);
    let (formula, planted) = generate_planted(a.n, a.m, a.k, a.target_l, seed)?;
    let mut sidecar = InstanceJson::new(&formula, Some(&planted), Some(seed));
    if formula.num_vars() <= DEFAULT_N_LIMIT {
        sidecar.solution_count = Some(formula.count_solutions(false, DEFAULT_N_LIMIT)?.count);
    }

    let cnf_path = with_suffix(&a.out, ".cnf");
    let json_path = with_suffix(&a.out, ".json");
    write_file(&cnf_path, &formula.to_dimacs())?;
    write_file(
        &json_path,
        &(serde_json::to_string_pretty(&sidecar)? + "\n"),
    )?;

    let mut manifest = RunManifest::new(
        "gen",
        resolved_args(raw, Some(seed)),
        json!({"n": a.n, "M": a.m, "k": a.k, "target_L": a.target_l}),
        Some(seed),
    );
    manifest.add_output(&cnf_path);
    manifest.add_output(&json_path);
    manifest.complete = true;
    manifest.write(&manifest_path(&a.out))?;
    eprintln!(
        "wrote {} (n = {}, M = {}, L = {})",
        cnf_path.display(),
        formula.num_vars(),
        formula.num_clauses(),
        sidecar
            .solution_count
            .map_or_else(|| "uncounted".to_string(), |l| l.to_string())
    );
    Ok(exit::OK)
}

pub fn validate(a: ValidateArgs) -> Result<u8> {
    let inst = load(&a.instance)?;
    let f = &inst.formula;
    if a.canonical {
        print!("{}", f.to_dimacs());
        return Ok(exit::OK);
    }
    let l = (f.num_vars() <= DEFAULT_N_LIMIT)
        .then(|| f.count_solutions(false, DEFAULT_N_LIMIT).map(|c| c.count))
        .transpose()?;
    let summary = json!({
        "n": f.num_vars(),
        "M": f.num_clauses(),
        "uniform_k": f.uniform_k(),
        "L": l,
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(exit::OK)
}

pub fn ledger(a: LedgerArgs) -> Result<u8> {
    let inst = load(&a.instance)?;
    let l = resolve_l(&inst, a.l)?;
    let f = &inst.formula;
    let ledger = build_ledger(f.num_vars(), l, &f.widths(), a.f0.into(), a.ell_max)?;
    println!("{}", ledger.to_json());
    Ok(exit::OK)
}

pub fn landscape(a: LandscapeArgs, raw: &[String]) -> Result<u8> {
    let inst = load(&a.instance)?;
    let l = resolve_l(&inst, a.l)?;
    let formula = &inst.formula;
    let f0: InitialObjective = a.f0.into();
    let oracle: OracleKind = a.oracle.into();

    let mut manifest = RunManifest::new(
        "landscape",
        resolved_args(raw, None),
        json!({"f0": f0, "oracle": oracle, "ell": a.ell, "L": l, "verify": a.verify}),
        None,
    );
    manifest.add_input(&a.instance)?;

    let mut all_stats = Vec::new();
    for choice in &a.ell {
        let ell = resolve_ell(parse_ell_choice(choice)?, formula.num_vars(), l)?;
        let objective = ConditionedObjective::new(formula.clone(), oracle, f0, ell, l)?;
        let sweep = vertex_sweep(&objective)?;
        if a.verify {
            let reference = brute_force_amplify(formula, f0, ell)?;
            let worst = sweep
                .values
                .iter()
                .zip(&reference.values)
                .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1.0))
                .fold(0.0, f64::max);
            if worst > VERIFY_TOLERANCE {
                return Err(Invalid(format!(
                    "ℓ = {ell}: pointwise sweep differs from reference by {worst:e} (tolerance {VERIFY_TOLERANCE:e})"
                ))
                .into());
            }
            eprintln!("ℓ = {ell}: verified, max relative deviation {worst:e}");
        }
        let csv_path = with_suffix(&a.out, &format!("_ell{ell}.csv"));
        write_file(&csv_path, &sweep.to_csv())?;
        manifest.add_output(&csv_path);
        all_stats.push(stats(&sweep)?);
    }

    let stats_path = with_suffix(&a.out, "_stats.json");
    let stats_json = serde_json::to_string_pretty(&all_stats)? + "\n";
    write_file(&stats_path, &stats_json)?;
    manifest.add_output(&stats_path);
    manifest.complete = true;
    manifest.write(&manifest_path(&a.out))?;
    print!("{stats_json}");
    Ok(exit::OK)
}

/// Reads a solver config file. Returns the config and whether it set a seed.
fn read_solver_config(solver: SolverArg, path: Option<&Path>) -> Result<(SolverConfig, bool)> {
    let Some(path) = path else {
        let cfg = match solver {
            SolverArg::Anneal => SolverConfig::Anneal(AnnealConfig::default()),
            SolverArg::Gradient => SolverConfig::Gradient(GradientConfig::default()),
        };
        return Ok((cfg, false));
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let has_seed = value.get("seed").is_some();
    let cfg = match solver {
        SolverArg::Anneal => SolverConfig::Anneal(serde_json::from_value(value)?),
        SolverArg::Gradient => SolverConfig::Gradient(serde_json::from_value(value)?),
    };
    cfg.validate()?;
    Ok((cfg, has_seed))
}

pub fn solve(a: SolveArgs, raw: &[String]) -> Result<u8> {
    let inst = load(&a.instance)?;
    let (cfg, config_seeded) = read_solver_config(a.solver, a.config.as_deref())?;
    let l = resolve_l(&inst, a.l)?;
    let n = inst.formula.num_vars();
    let ell = resolve_ell(parse_ell_choice(&a.ell)?, n, l)?;
    let seed = match (a.seed, config_seeded) {
        (Some(seed), _) => seed,
        (None, true) => cfg.seed(),
        (None, false) => rand::random(),
    };
    let cfg = cfg.with_seed(seed);

    let objective =
        ConditionedObjective::new(inst.formula.clone(), a.oracle.into(), a.f0.into(), ell, l)?;
    let handle = ObjectiveHandle::maximize(objective);
    let report = cfg.run(&handle)?;
    let text = serde_json::to_string_pretty(&json!({
        "solver": cfg.name(),
        "ell": ell,
        "L": l,
        "report": report,
    }))? + "\n";
    print!("{text}");

    if let Some(out) = &a.out {
        write_file(out, &text)?;
        let mut manifest = RunManifest::new(
            "solve",
            resolved_args(raw, Some(seed)),
            json!({"solver": cfg, "ell": ell, "L": l, "oracle": OracleKind::from(a.oracle), "f0": InitialObjective::from(a.f0)}),
            Some(seed),
        );
        manifest.add_input(&a.instance)?;
        if let Some(config) = &a.config {
            manifest.add_input(config)?;
        }
        manifest.add_output(out);
        manifest.complete = true;
        manifest.write(&manifest_path(out))?;
    }
    Ok(if report.satisfied {
        exit::OK
    } else {
        exit::BUDGET
    })
}

fn bench_instances(a: &BenchArgs, seed: u64) -> Result<Vec<BenchInstance>> {
    if !a.instances.is_empty() {
        return a
            .instances
            .iter()
            .enumerate()
            .map(|(id, path)| {
                let inst = load(path)?;
                let solution_count = resolve_l(&inst, None)?;
                Ok(BenchInstance {
                    id,
                    formula: inst.formula,
                    solution_count,
                })
            })
            .collect();
    }
    let m = a.m.unwrap_or_else(|| (4.26 * a.n as f64).round() as usize);
    (0..a.count)
        .map(|id| {
            let (formula, _) = generate_planted(a.n, m, a.k, a.target_l, instance_seed(seed, id))?;
            let solution_count = formula.count_solutions(false, DEFAULT_N_LIMIT)?.count;
            Ok(BenchInstance {
                id,
                formula,
                solution_count,
            })
        })
        .collect()
}

pub fn bench(a: BenchArgs, raw: &[String]) -> Result<u8> {
    let seed = a.seed.unwrap_or_else(rand::random);
    let (solver, _) = read_solver_config(a.solver, a.config.as_deref())?;
    let choices = a
        .ell
        .iter()
        .map(|s| parse_ell_choice(s))
        .collect::<Result<Vec<i64>>>()?;
    let instances = bench_instances(&a, seed)?;
    let opts = BenchOptions {
        oracle: a.oracle.into(),
        f0: a.f0.into(),
        base_seed: seed,
        measure_time: !a.no_wall_time,
    };

    let jobs = a.jobs.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("building thread pool")?;

    let mut manifest = RunManifest::new(
        "bench",
        resolved_args(raw, Some(seed)),
        json!({
            "n": a.n, "M": a.m, "k": a.k, "count": a.count, "target_L": a.target_l,
            "solver": solver, "ell": choices, "oracle": opts.oracle, "f0": opts.f0,
            "wall_time": opts.measure_time,
        }),
        Some(seed),
    );
    for path in &a.instances {
        manifest.add_input(path)?;
    }
    if let Some(config) = &a.config {
        manifest.add_input(config)?;
    }
    manifest.add_output(&a.out);
    let manifest_file = manifest_path(&a.out);
    ensure_parent(&a.out)?;
    manifest.write(&manifest_file)?;

    let file = File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let mut csv = BufWriter::new(file);
    writeln!(csv, "{BENCH_CSV_HEADER}")?;
    csv.flush()?;

    let mut rows = Vec::new();
    let chunk = pool.current_num_threads().max(1);
    let mut io_error = None;
    pool.install(|| {
        benchmark_streaming(&instances, &solver, &choices, &opts, chunk, |batch| {
            // rows reach disk per batch so an interrupted run leaves a valid prefix
            let mut text = String::new();
            for row in batch {
                text.push_str(&row.to_csv_line());
                text.push('\n');
            }
            if let Err(e) = csv.write_all(text.as_bytes()).and_then(|_| csv.flush()) {
                io_error = Some(e);
                return Err(amplisat::Error::InvalidConfig("output write failed".into()));
            }
            rows.extend_from_slice(batch);
            Ok(())
        })
    })
    .map_err(|e| match io_error.take() {
        Some(io) => anyhow::Error::new(io).context(format!("writing {}", a.out.display())),
        None => e.into(),
    })?;

    manifest.complete = true;
    manifest.write(&manifest_file)?;
    let summary = summarize(&rows);
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(exit::OK)
}

pub fn replay(a: ReplayArgs) -> Result<u8> {
    let manifest = RunManifest::read(&a.manifest)?;
    let argv = std::iter::once("amplisat".to_string()).chain(manifest.args.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| Invalid(format!("manifest arguments: {e}")))?;
    run(cli, &manifest.args)
}
