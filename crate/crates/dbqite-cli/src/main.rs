//! Command-line driver: runs flows and baselines from JSON configs, checks
//! the guarantee suites, emits cost tables and SVG charts.

mod config;
mod plot;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use config::{EngineSpec, ExperimentConfig, InitSpec, ModelSpec, RunArtifact, RunOutcome};
use dbqite::costing::{GateCounts, ReflectionModel};
use dbqite::flow::{run_flow_with_summary, square_grid, verify_theorem2, Engine, Schedule};
use dbqite::hamiltonian::{EvolutionMethod, PauliSum, SpectralMode, SpectralSummary};
use dbqite::qpe::{qpe_spectral, rescale_hamiltonian};
use dbqite::state::StateVector;
use dbqite::trace::{self, TraceRow};
use dbqite::verify::{self, Suite, VerifyConfig};

#[derive(Parser)]
#[command(
    name = "dbqite",
    about = "Double-bracket imaginary-time flows, their guarantees, gate costs, and a QPE baseline",
    after_help = "The DBQITE_DENSE_THRESHOLD environment variable overrides the dense cutoff \
                  (default 12 qubits)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a JSON config and write CSV/JSON artifacts.
    Run(RunArgs),
    /// Run the guarantee suites over seeded ensembles; exit 0 iff all pass.
    Verify(VerifyArgs),
    /// Render trace CSVs as a static SVG chart.
    Plot(PlotArgs),
    /// Emit the gate-cost table for flow circuits (and optionally QPE).
    Cost(CostArgs),
    /// Run the phase-estimation baseline directly from flags.
    Qpe(QpeArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment description (JSON, schema_version 1).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (single runs are sequential).
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// frr | fidelity | lemmas | all
    #[arg(long, default_value = "all")]
    suite: Suite,
    #[arg(long, default_value_t = VerifyConfig::default().seed)]
    seed: u64,
    /// Check the fidelity-guarantee preconditions and bounds on a custom
    /// Hamiltonian (JSON) instead of the built-in ensembles.
    #[arg(long)]
    hamiltonian: Option<PathBuf>,
    /// Run independent criteria on this many worker threads.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct PlotArgs {
    /// energy | fidelity | gates-vs-fidelity
    #[arg(long)]
    kind: plot::PlotKind,
    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
    /// Input trace CSVs.
    inputs: Vec<PathBuf>,
}

#[derive(Args)]
struct CostArgs {
    #[arg(long)]
    length: usize,
    /// Flow steps to tabulate (rows k = 0..=steps).
    #[arg(long, default_value_t = 3)]
    steps: usize,
    #[arg(long, default_value_t = 2)]
    trotter_steps: usize,
    /// zindorf | balauca_gidney | cca
    #[arg(long, default_value = "balauca_gidney")]
    model: String,
    /// singlet | hva | none
    #[arg(long, default_value = "hva")]
    init: String,
    /// Also append QPE rows up to this precision.
    #[arg(long)]
    qpe_precision: Option<usize>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QpeArgs {
    #[arg(long)]
    length: usize,
    /// Precision qubits.
    #[arg(long)]
    precision: usize,
    /// Norm over-estimation factor κ (spectrum lands in [0, 1/κ)).
    #[arg(long, default_value_t = 1.0)]
    rescale_factor: f64,
    /// singlet | hva | zero
    #[arg(long, default_value = "singlet")]
    init: String,
    /// Append a trace-schema row for the result here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Plot(args) => cmd_plot(args),
        Command::Cost(args) => cmd_cost(args),
        Command::Qpe(args) => cmd_qpe(args),
    };
    if let Err(err) = outcome {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn summary_for(h: &PauliSum) -> anyhow::Result<SpectralSummary> {
    let mode = if h.num_qubits() <= dbqite::dense::dense_threshold() {
        SpectralMode::Dense
    } else {
        SpectralMode::Iterative
    };
    Ok(h.spectral_summary(mode)?)
}

fn initial_state(init: &InitSpec, h: &PauliSum) -> anyhow::Result<StateVector> {
    Ok(match init {
        InitSpec::Singlet => StateVector::singlet_state(h.num_qubits())?,
        InitSpec::Hva { points, t_max } => {
            dbqite::flow::hva_state(h, &square_grid(*points, *t_max))?.0
        }
        InitSpec::Zero => StateVector::zero_state(h.num_qubits()),
        InitSpec::File { path } => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read state {}", path.display()))?;
            let state: StateVector =
                serde_json::from_str(&text).context("state file does not parse")?;
            state.normalized()?
        }
    })
}

fn init_cost(init: &InitSpec, l: usize) -> GateCounts {
    match init {
        InitSpec::Singlet => dbqite::costing::singlet_init_cost(l).unwrap_or(GateCounts::ZERO),
        InitSpec::Hva { .. } => dbqite::costing::hva_init_cost(l).unwrap_or(GateCounts::ZERO),
        InitSpec::Zero | InitSpec::File { .. } => GateCounts::ZERO,
    }
}

fn trotter_steps_for_cost(evo: EvolutionMethod) -> usize {
    match evo {
        // the benchmark layout for exact runs is still costed at 2 steps
        EvolutionMethod::Exact => 2,
        EvolutionMethod::Trotter2 { steps } => steps,
    }
}

fn cmd_run(args: RunArgs) -> anyhow::Result<()> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = args.out {
        cfg.outputs.dir = out;
    }
    let started = Instant::now();
    let h = cfg.load_model()?;
    let l = h.num_qubits();
    let is_chain_model = matches!(cfg.model, ModelSpec::Heisenberg { .. });

    let (rows, outcome, costs): (Vec<TraceRow>, RunOutcome, Vec<GateCounts>) = match cfg.engine {
        EngineSpec::Dbqite | EngineSpec::Dbi => {
            let engine =
                if cfg.engine == EngineSpec::Dbqite { Engine::Dbqite } else { Engine::Dbi };
            let summary = summary_for(&h)?;
            let psi0 = initial_state(&cfg.init, &h)?;
            let trace = run_flow_with_summary(
                &h,
                &summary,
                &psi0,
                engine,
                &cfg.schedule,
                cfg.steps,
                cfg.evolution,
            )?;
            // gate costs exist for the chain layout only
            let costs = if is_chain_model {
                verify::cumulative_flow_costs(
                    l,
                    cfg.steps,
                    trotter_steps_for_cost(cfg.evolution),
                    ReflectionModel::BalaucaGidney,
                    init_cost(&cfg.init, l),
                )?
            } else {
                vec![GateCounts::ZERO; trace.records.len()]
            };
            let rows = trace::flow_rows(&trace, Some(&costs))?;
            (rows, RunOutcome::Flow { trace }, costs)
        }
        EngineSpec::Ite => {
            let spacing = match cfg.schedule.kind {
                dbqite::flow::ScheduleKind::Fixed { s } => s,
                _ => bail!("the ite engine uses a fixed schedule as the τ spacing"),
            };
            let psi0 = initial_state(&cfg.init, &h)?;
            let taus: Vec<f64> = (0..=cfg.steps).map(|k| k as f64 * spacing).collect();
            let curve = dbqite::ite::ite_curve(&h, &psi0, &taus)?;
            let rows = trace::ite_rows(&curve);
            (rows, RunOutcome::Ite { curve }, Vec::new())
        }
        EngineSpec::Qpe => {
            let summary = summary_for(&h)?;
            let norm_est =
                summary.lambda0 + cfg.rescale_factor * (summary.spectral_norm - summary.lambda0);
            let h_prime = rescale_hamiltonian(&h, summary.lambda0, norm_est)?;
            let psi0 = initial_state(&cfg.init, &h)?;
            let mut result = qpe_spectral(&h_prime, &psi0, cfg.steps)?;
            result.rescale_factor = cfg.rescale_factor;
            let cost = if is_chain_model {
                verify::qpe_cost_for(l, cfg.steps, 2)?
            } else {
                GateCounts::ZERO
            };
            let rows = vec![trace::qpe_row(&result, cost)];
            (rows, RunOutcome::Qpe { result }, vec![cost])
        }
    };

    std::fs::create_dir_all(&cfg.outputs.dir)
        .with_context(|| format!("cannot create {}", cfg.outputs.dir.display()))?;
    let stem = cfg.outputs.dir.join(&cfg.outputs.stem);
    let csv_path = stem.with_extension("csv");
    std::fs::write(&csv_path, trace::to_csv(&rows))?;

    let cost_path = stem.with_extension("cost.csv");
    std::fs::write(&cost_path, cost_table_csv(&cfg, l, &rows, &costs))?;

    let artifact = RunArtifact {
        config: cfg.clone(),
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        outcome,
        gate_counts: costs,
    };
    let json_path = stem.with_extension("json");
    std::fs::write(&json_path, serde_json::to_string_pretty(&artifact)?)?;

    println!(
        "wrote {}, {}, {}",
        csv_path.display(),
        cost_path.display(),
        json_path.display()
    );
    Ok(())
}

const COST_CSV_HEADER: &str = "engine,L,k,cz,u3,t,depth,ancillas";

fn cost_table_csv(
    cfg: &ExperimentConfig,
    l: usize,
    rows: &[TraceRow],
    costs: &[GateCounts],
) -> String {
    let mut out = String::from(COST_CSV_HEADER);
    out.push('\n');
    let engine = match cfg.engine {
        EngineSpec::Ite => "ite",
        EngineSpec::Dbi => "dbi",
        EngineSpec::Dbqite => "dbqite",
        EngineSpec::Qpe => "qpe",
    };
    for (i, row) in rows.iter().enumerate() {
        let g = costs.get(i).copied().unwrap_or(GateCounts::ZERO);
        out.push_str(&format!(
            "{engine},{l},{},{},{},{},{},{}\n",
            row.k, g.cz, g.u3, g.t, g.depth, g.ancillas
        ));
    }
    out
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<()> {
    if let Some(path) = &args.hamiltonian {
        return verify_custom_hamiltonian(path, args.seed);
    }
    let cfg = VerifyConfig { seed: args.seed };
    let results = if args.threads > 1 {
        run_suite_parallel(args.suite, &cfg, args.threads)
    } else {
        verify::run_suite(args.suite, &cfg)
    };
    let mut all_passed = true;
    for result in &results {
        println!("{}", result.summary_line());
        for line in &result.details {
            println!("    {line}");
        }
        all_passed &= result.passed;
    }
    if !all_passed {
        eprintln!("verification failed");
        std::process::exit(1);
    }
    Ok(())
}

fn run_suite_parallel(
    suite: Suite,
    cfg: &VerifyConfig,
    threads: usize,
) -> Vec<verify::CriterionResult> {
    // criteria are independent and deterministic; evaluate them on a small
    // worker pool and restore the declaration order afterwards
    let jobs: Vec<fn(&VerifyConfig) -> verify::CriterionResult> = match suite {
        Suite::Frr => vec![
            verify::criterion_01_ite_frr,
            verify::criterion_02_ite_dbf,
            verify::criterion_07_theorem1,
        ],
        Suite::Fidelity => vec![verify::criterion_06_theorem2, verify::criterion_08_dbi_theorems],
        Suite::Lemmas => vec![
            verify::criterion_03_compact_form,
            verify::criterion_04_dbi_oracle,
            verify::criterion_05_gci_bound,
            verify::extra_bracket_lemmas,
        ],
        Suite::All => vec![
            verify::criterion_01_ite_frr,
            verify::criterion_02_ite_dbf,
            verify::criterion_03_compact_form,
            verify::criterion_04_dbi_oracle,
            verify::criterion_05_gci_bound,
            verify::criterion_06_theorem2,
            verify::criterion_07_theorem1,
            verify::criterion_08_dbi_theorems,
            verify::criterion_09_heisenberg,
            verify::criterion_10_excess_energy,
            verify::criterion_11_gate_counts,
            verify::criterion_12_qpe,
            verify::criterion_13_warm_start,
        ],
    };
    let mut results: Vec<Option<verify::CriterionResult>> = (0..jobs.len()).map(|_| None).collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots = std::sync::Mutex::new(&mut results);
    std::thread::scope(|scope| {
        for _ in 0..threads.min(jobs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= jobs.len() {
                    break;
                }
                let r = jobs[i](cfg);
                slots.lock().expect("no poisoned workers")[i] = Some(r);
            });
        }
    });
    results.into_iter().map(|r| r.expect("every job ran")).collect()
}

fn verify_custom_hamiltonian(path: &Path, seed: u64) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read hamiltonian {}", path.display()))?;
    let h: PauliSum = serde_json::from_str(&text).context("hamiltonian file does not parse")?;
    let summary = summary_for(&h)?;
    if let Err(e) = summary.require_unique_ground() {
        eprintln!("{e}");
        std::process::exit(1);
    }
    let mut rng = dbqite::ensemble::rng_for(seed, "verify/custom");
    let psi0 = dbqite::ensemble::random_state_with_fidelity(&summary.ground_state, 0.5, &mut rng)?;
    let trace = run_flow_with_summary(
        &h,
        &summary,
        &psi0,
        Engine::Dbqite,
        &Schedule::theorem2(),
        8,
        EvolutionMethod::Exact,
    )?;
    let report = verify_theorem2(&trace, &summary);
    println!(
        "fidelity guarantee on {}: {} ({} steps checked, {} unchecked)",
        path.display(),
        if report.passed { "PASS" } else { "FAIL" },
        report.steps.len(),
        report.unchecked_steps()
    );
    for note in &report.notes {
        println!("    {note}");
    }
    if !report.passed {
        std::process::exit(1);
    }
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> anyhow::Result<()> {
    if args.inputs.is_empty() {
        bail!("no input CSVs given");
    }
    let mut inputs = Vec::new();
    for path in &args.inputs {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        let rows =
            trace::parse_csv(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        inputs.push((label, rows));
    }
    let svg = plot::render(args.kind, &inputs)?;
    std::fs::write(&args.out, svg)
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn parse_reflection_model(name: &str) -> anyhow::Result<ReflectionModel> {
    Ok(match name {
        "zindorf" => ReflectionModel::Zindorf,
        "balauca_gidney" => ReflectionModel::BalaucaGidney,
        "cca" => ReflectionModel::Cca,
        other => bail!("unknown reflection model {other:?}"),
    })
}

fn cmd_cost(args: CostArgs) -> anyhow::Result<()> {
    let model = parse_reflection_model(&args.model)?;
    let init = match args.init.as_str() {
        "singlet" => dbqite::costing::singlet_init_cost(args.length)?,
        "hva" => dbqite::costing::hva_init_cost(args.length)?,
        "none" => GateCounts::ZERO,
        other => bail!("unknown init {other:?} (want singlet|hva|none)"),
    };
    let costs =
        verify::cumulative_flow_costs(args.length, args.steps, args.trotter_steps, model, init)?;
    let mut out = String::from(COST_CSV_HEADER);
    out.push('\n');
    for (k, g) in costs.iter().enumerate() {
        out.push_str(&format!(
            "dbqite,{},{k},{},{},{},{},{}\n",
            args.length, g.cz, g.u3, g.t, g.depth, g.ancillas
        ));
    }
    if let Some(precision) = args.qpe_precision {
        for k in 1..=precision {
            let g = verify::qpe_cost_for(args.length, k, args.trotter_steps)?;
            out.push_str(&format!(
                "qpe,{},{k},{},{},{},{},{}\n",
                args.length, g.cz, g.u3, g.t, g.depth, g.ancillas
            ));
        }
    }
    let expected = model.expected_cz(args.length)?;
    match &args.out {
        Some(path) => {
            std::fs::write(path, out)?;
            println!(
                "wrote {} (reflection worst-case CZ {}, expected-case {expected:.1})",
                path.display(),
                dbqite::costing::reflection_cost(args.length, model)?.cz
            );
        }
        None => print!("{out}"),
    }
    Ok(())
}

fn cmd_qpe(args: QpeArgs) -> anyhow::Result<()> {
    if args.rescale_factor < 1.0 {
        bail!("rescale factor must be ≥ 1 (norm over-estimation)");
    }
    let h = PauliSum::heisenberg_chain(args.length)?;
    let summary = summary_for(&h)?;
    let psi0 = match args.init.as_str() {
        "singlet" => StateVector::singlet_state(args.length)?,
        "hva" => {
            dbqite::flow::hva_state(
                &h,
                &square_grid(verify::HVA_GRID_POINTS, verify::HVA_GRID_T_MAX),
            )?
            .0
        }
        "zero" => StateVector::zero_state(args.length),
        other => bail!("unknown init {other:?} (want singlet|hva|zero)"),
    };
    let norm_est =
        summary.lambda0 + args.rescale_factor * (summary.spectral_norm - summary.lambda0);
    let h_prime = rescale_hamiltonian(&h, summary.lambda0, norm_est)?;
    let mut result = qpe_spectral(&h_prime, &psi0, args.precision)?;
    result.rescale_factor = args.rescale_factor;
    println!(
        "L = {}, k = {}: success probability {:.4}, post-selected fidelity {:.4}",
        args.length, args.precision, result.success_prob, result.post_fidelity
    );
    if let Some(path) = &args.out {
        let cost = verify::qpe_cost_for(args.length, args.precision, 2)?;
        let row = trace::qpe_row(&result, cost);
        let text = if path.exists() {
            let existing = std::fs::read_to_string(path)?;
            let mut rows = trace::parse_csv(&existing)
                .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
            rows.push(row);
            trace::to_csv(&rows)
        } else {
            trace::to_csv(&[row])
        };
        std::fs::write(path, text)?;
        println!("appended to {}", path.display());
    }
    Ok(())
}
