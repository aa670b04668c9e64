use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use harmoniq::circuit::naive_cost;
use harmoniq::estimator::{self, DeltaMode};
use harmoniq::harmonic::{self, Variant};
use harmoniq::sim::{self, SynthesisModel};
use harmoniq::{circulant, linear, qft, report, widgets, Circuit, Error, StateVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

/// Default seed for every randomized command ("HARM" in ASCII).
const DEFAULT_SEED: u64 = 0x4841_524D;

#[derive(Parser)]
#[command(name = "harmoniq", version, about = "Harmonic-sequence state preparation and block-encoding toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; HARMONIQ_THREADS takes precedence.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Perturbed,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Costing {
    Formula,
    Naive,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    State,
    Block,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Lemmas,
    Circuits,
    All,
}

#[derive(Args, Clone, Copy)]
struct Sim {
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value = "formula")]
    costing: Costing,
}

impl Sim {
    fn model(&self) -> SynthesisModel {
        match self.mode {
            Mode::Exact => SynthesisModel::exact(),
            Mode::Perturbed => SynthesisModel::perturbed(self.seed),
        }
    }

    fn mode_name(&self) -> &'static str {
        match self.mode {
            Mode::Exact => "exact",
            Mode::Perturbed => "perturbed",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the harmonic-sequence state pipeline.
    State {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        /// Keep only the first asymptote instead of combining both.
        #[arg(long)]
        single: bool,
        #[command(flatten)]
        sim: Sim,
    },
    /// Simulate linear-state preparation.
    Linear {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        sim: Sim,
    },
    /// Approximate QFT applied to the linear state.
    Qft {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        /// Perturbed instances to average over.
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[command(flatten)]
        sim: Sim,
    },
    /// Monte Carlo of parallel repeat-until-success widgets.
    Rus {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Block-encode the linear circulant matrix.
    Block {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[command(flatten)]
        sim: Sim,
    },
    /// Block-encode diag(h) through QFT conjugation.
    Diag {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Accuracy of the circulant rotations; the QFTs get twice this.
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        #[command(flatten)]
        sim: Sim,
    },
    /// Minimize expected T-depth for a target error.
    Optimize {
        #[arg(long, value_enum)]
        target: Target,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        epsilon: f64,
        /// Optimize the two rotation accuracies independently.
        #[arg(long)]
        free: bool,
    },
    /// Check the error lemmas and circuit identities numerically.
    Verify {
        #[arg(long, value_enum, default_value = "lemmas")]
        suite: Suite,
        #[arg(long, default_value_t = 10)]
        nmax: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Headline comparison, or an optimizer grid with --grid.
    Table {
        #[arg(long)]
        grid: bool,
        #[arg(long, value_enum, default_value = "state")]
        target: Target,
        #[arg(long, default_value_t = 2)]
        nmin: usize,
        #[arg(long, default_value_t = 24)]
        nmax: usize,
        /// Error targets 10^-2 down to 10^-decades.
        #[arg(long, default_value_t = 12)]
        decades: i32,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::OutOfRange(_)
            | Error::CapExceeded { .. }
            | Error::Infeasible(_)
            | Error::UnsupportedBase(_)
            | Error::QubitOutOfRange { .. } => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome<()> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Usage(msg()))
    }
}

fn check_delta(delta: f64) -> Outcome<()> {
    ensure(delta > 0.0 && delta < 1.0, || format!("--delta must lie in (0, 1), got {delta}"))
}

fn ledger_json(c: &Circuit, costing: Costing) -> Outcome<Value> {
    Ok(match costing {
        Costing::Formula => serde_json::to_value(c.ledger()).map_err(|e| Failure::Runtime(e.to_string()))?,
        Costing::Naive => {
            let cost = naive_cost(c)?;
            json!({ "t_count": cost.t_count, "t_depth": cost.t_depth, "uncosted_rotations": cost.uncosted })
        }
    })
}

fn costing_name(c: Costing) -> &'static str {
    match c {
        Costing::Formula => "formula",
        Costing::Naive => "naive",
    }
}

fn state_cmd(n: usize, m: usize, delta: f64, single: bool, sim: Sim) -> Outcome<Value> {
    check_delta(delta)?;
    let prog = harmonic::build_harmonic(n, m, delta, !single)?;
    let out = prog.simulate(&sim.model())?;
    let target = prog.target()?;
    let harmonic_distance = sim::distance(&out.state, &harmonic::harmonic_target(n)?.scaled(C64::i()))?;
    Ok(json!({
        "command": "state",
        "n": n,
        "m": m,
        "delta": delta,
        "variant": if single { "single" } else { "combined" },
        "mode": sim.mode_name(),
        "seed": sim.seed,
        "distance_to_cotangent": sim::distance(&out.state, &target)?,
        "distance_to_harmonic": harmonic_distance,
        "predicted_harmonic_distance": harmonic::lemma_fit(n, m, prog.variant()),
        "success_prob": out.success_prob,
        "success_prob_oracle": harmonic::success_probability(n, m, !single),
        "linear_success": out.linear_success,
        "costing": costing_name(sim.costing),
        "cost": ledger_json(&prog.circuit, sim.costing)?,
    }))
}

fn linear_cmd(n: usize, sim: Sim) -> Outcome<Value> {
    let prog = linear::build_linear(n)?;
    let (state, p) = prog.simulate()?;
    Ok(json!({
        "command": "linear",
        "n": n,
        "distance": sim::distance_raw(&state, &linear::linear_target(n)?)?,
        "success_prob": p,
        "reductions": prog.reductions,
        "costing": costing_name(sim.costing),
        "cost": ledger_json(&prog.circuit, sim.costing)?,
    }))
}

fn qft_cmd(n: usize, delta: f64, trials: usize, sim: Sim) -> Outcome<Value> {
    check_delta(delta)?;
    ensure(trials >= 1, || "--trials must be positive".into())?;
    let circuit = qft::build_approx_qft(n, delta)?;
    let lin = linear::linear_target(n)?;
    let closed = StateVector::from_amplitudes(qft::cotangent_amplitudes(n))?;
    let (error, seeds) = match sim.mode {
        Mode::Exact => {
            let out = sim::run(&circuit, &lin, &SynthesisModel::exact())?;
            (sim::distance_raw(&out, &closed)?, 0)
        }
        Mode::Perturbed => (qft::measure_state_error(n, delta, trials, sim.seed)?.mean, trials),
    };
    Ok(json!({
        "command": "qft",
        "n": n,
        "delta": delta,
        "mode": sim.mode_name(),
        "seed": sim.seed,
        "seeds": seeds,
        "state_error": error,
        "predicted_error": if sim.mode == Mode::Exact { 0.0 } else { estimator::qft_state_error(n, delta) },
        "costing": costing_name(sim.costing),
        "cost": ledger_json(&circuit, sim.costing)?,
    }))
}

fn rus_cmd(n: usize, trials: usize, seed: u64) -> Outcome<Value> {
    ensure(n >= 1, || "--n must be positive".into())?;
    let est = widgets::expected_tdepth_mc(n, trials, seed)?;
    Ok(json!({
        "command": "rus",
        "n": n,
        "trials": trials,
        "seed": seed,
        "mean": est.mean,
        "stderr": est.stderr,
        "exact": widgets::expected_tdepth_exact(&widgets::component_probabilities(n)),
        "fit": est.fit,
    }))
}

fn block_cmd(n: usize, delta: f64, trials: usize, sim: Sim) -> Outcome<Value> {
    check_delta(delta)?;
    let (circuit, r) = circulant::build_circulant_encoding(n, delta)?;
    let mut v = json!({
        "command": "block",
        "n": n,
        "delta": delta,
        "mode": sim.mode_name(),
        "seed": sim.seed,
        "alpha": r.alpha,
        "alpha_predicted": circulant::lcu_alpha(n)?,
        "max_element": r.max_element,
        "residual": r.distance,
        "qubits": circuit.width(),
        "costing": costing_name(sim.costing),
        "cost": ledger_json(&circuit, sim.costing)?,
    });
    if sim.mode == Mode::Perturbed {
        ensure(trials >= 1, || "--trials must be positive".into())?;
        let (mean, predicted) = circulant::measure_circulant_error(n, delta, trials, sim.seed)?;
        v["perturbed_error"] = json!(mean);
        v["predicted_error"] = json!(predicted);
        v["seeds"] = json!(trials);
    }
    Ok(v)
}

fn diag_cmd(n: usize, m: usize, delta: f64, sim: Sim) -> Outcome<Value> {
    check_delta(delta)?;
    check_delta(2.0 * delta)?;
    let circuit = circulant::diag_harmonic_circuit(n, m, 2.0 * delta, delta)?;
    ensure(n + m <= circulant::MAX_ENCODE_QUBITS, || {
        format!("n + m = {} exceeds the simulation cap {}", n + m, circulant::MAX_ENCODE_QUBITS)
    })?;
    let r = circulant::diag_harmonic_report(&circuit, &sim.model())?;
    Ok(json!({
        "command": "diag",
        "n": n,
        "m": m,
        "delta0": 2.0 * delta,
        "delta1": delta,
        "mode": sim.mode_name(),
        "seed": sim.seed,
        "distance": r.distance,
        "predicted_distance": circulant::diag_harmonic_prediction(n, m),
        "block_norm": r.alpha,
        "costing": costing_name(sim.costing),
        "cost": ledger_json(&circuit, sim.costing)?,
    }))
}

fn plan_row(target: Target, n: usize, epsilon: f64, free: bool) -> Outcome<Value> {
    Ok(match target {
        Target::State => {
            let p = estimator::optimize_state(n, epsilon)?;
            json!({
                "target": "state",
                "n": p.n,
                "epsilon": p.epsilon,
                "epsilon_achieved": p.epsilon_achieved,
                "m": p.m,
                "delta0": p.delta,
                "delta1": p.delta,
                "t_depth": p.expected_t_depth,
                "t_count": p.t_count,
                "ancilla_clean": p.ancilla_clean,
                "ancilla_persistent": p.ancilla_persistent,
                "qft_share": p.qft_share(),
                "qft_count_share": p.qft_count_share(),
                "success_prob": p.success_prob,
            })
        }
        Target::Block => {
            let mode = if free { DeltaMode::Free } else { DeltaMode::Tied };
            let p = estimator::optimize_block(n, epsilon, mode)?;
            json!({
                "target": "block",
                "n": p.n,
                "epsilon": p.epsilon,
                "epsilon_achieved": p.epsilon_achieved,
                "m": p.m,
                "delta0": p.delta0,
                "delta1": p.delta1,
                "t_depth": p.t_depth,
                "t_count": p.t_count,
                "ancilla_clean": p.ancilla_clean,
                "ancilla_persistent": p.ancilla_persistent,
                "qft_share": p.qft_share(),
                "qft_count_share": p.qft_t_count / p.t_count,
            })
        }
    })
}

fn optimize_cmd(target: Target, n: usize, epsilon: f64, free: bool) -> Outcome<Value> {
    ensure(epsilon > 0.0 && epsilon < 1.0, || format!("--epsilon must lie in (0, 1), got {epsilon}"))?;
    ensure(!(free && target == Target::State), || "--free applies to --target block only".into())?;
    plan_row(target, n, epsilon, free)
}

fn table_cmd(grid: bool, target: Target, nmin: usize, nmax: usize, decades: i32) -> Outcome<Vec<Value>> {
    if !grid {
        return estimator::comparison_table()?
            .iter()
            .map(|r| serde_json::to_value(r).map_err(|e| Failure::Runtime(e.to_string())))
            .collect();
    }
    ensure(nmin >= 1 && nmin <= nmax, || format!("need 1 <= --nmin <= --nmax, got {nmin}, {nmax}"))?;
    ensure((2..=13).contains(&decades), || format!("--decades must lie in 2..=13, got {decades}"))?;
    let cells: Vec<(usize, f64)> =
        (nmin..=nmax).flat_map(|n| (2..=decades).map(move |d| (n, 10f64.powi(-d)))).collect();
    // indexed collect keeps row order independent of the thread count
    let rows: Vec<Option<Value>> = cells
        .par_iter()
        .map(|&(n, eps)| match plan_row(target, n, eps, false) {
            Ok(v) => Ok(Some(v)),
            Err(Failure::Usage(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Outcome<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

struct Line {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn lemma_suite(nmax: usize, seed: u64) -> Outcome<Vec<Line>> {
    let mut lines = Vec::new();

    let mut worst: f64 = 0.0;
    for k in 1..=8 {
        let (state, p) = widgets::simulate_widget(k)?;
        let spec = widgets::WidgetSpec::new(k)?;
        worst = worst.max((p - spec.success_probability()).abs());
        worst = worst.max(sim::distance_raw(&state, &spec.target())?);
    }
    lines.push(Line { name: "widget", pass: worst <= 1e-12, detail: format!("k in 1..=8, worst error {worst:.1e}") });

    let mut worst: f64 = 0.0;
    for n in 1..=nmax {
        let closed = StateVector::from_amplitudes(qft::cotangent_amplitudes(n))?;
        worst = worst.max(sim::distance_raw(&qft::qft_state(&linear::linear_target(n)?), &closed)?);
    }
    lines.push(Line {
        name: "cotangent",
        pass: worst <= 1e-10,
        detail: format!("QFT of the linear state, n in 1..={nmax}, worst distance {worst:.1e}"),
    });

    let mut dev = [0.0f64; 2];
    let mut ordered = true;
    for n in 4..=nmax.max(4) {
        for m in 1..=5 {
            let mut d = [0.0; 2];
            for (i, v) in [Variant::Single, Variant::Combined].into_iter().enumerate() {
                d[i] = harmonic::lemma_distance(n, m, v)?;
                dev[i] = dev[i].max((d[i] / harmonic::lemma_fit(n, m, v) - 1.0).abs());
            }
            ordered &= d[1] < d[0];
        }
    }
    let grid = format!("n in 4..={}, m in 1..=5", nmax.max(4));
    lines.push(Line {
        name: "first-asymptote",
        pass: dev[0] <= 0.30,
        detail: format!("{grid}, worst deviation from √6/2^(n/2+m) {:.3}", dev[0]),
    });
    lines.push(Line {
        name: "combined-asymptotes",
        pass: dev[1] <= 0.30,
        detail: format!("{grid}, worst deviation from √3/2^(n+m+1/2) {:.3}", dev[1]),
    });
    lines.push(Line { name: "combined-beats-single", pass: ordered, detail: grid });

    let mut rule = true;
    for d in 1..=12 {
        let eps = 10f64.powi(-d);
        let expect = ((3f64.sqrt() / eps).log2() - 0.5).ceil() as usize;
        rule &= estimator::required_qubits(eps) == expect;
    }
    lines.push(Line { name: "qubit-rule", pass: rule, detail: "ε = 10^-1 .. 10^-12".into() });

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let top = nmax.min(4);
    for n in 1..=top {
        for _ in 0..20 {
            let v: Vec<C64> =
                (0..1usize << n).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            worst = worst.max(circulant::convolution_check(&v, n)?.off_diagonal);
        }
    }
    lines.push(Line {
        name: "convolution",
        pass: worst <= 1e-10,
        detail: format!("20 random vectors for n in 1..={top}, worst off-diagonal {worst:.1e}"),
    });

    let top = nmax.min(6);
    let mut ratios = (f64::INFINITY, 0.0f64);
    for q in 3..=top {
        for m in 1..q {
            let (_, r) = circulant::build_diag_harmonic(q - m, m, 2e-3, 1e-3)?;
            let ratio = r.distance / circulant::diag_harmonic_prediction(q - m, m);
            ratios = (ratios.0.min(ratio), ratios.1.max(ratio));
        }
    }
    lines.push(Line {
        name: "diagonal-harmonic",
        pass: ratios.0 >= 0.5 && ratios.1 <= 2.0,
        detail: format!("3 <= n+m <= {top}, distance / (π/2^(n+m)) in [{:.3}, {:.3}]", ratios.0, ratios.1),
    });
    Ok(lines)
}

fn circuit_suite(nmax: usize) -> Outcome<Vec<Line>> {
    let mut lines = Vec::new();
    let mut worst: f64 = 0.0;
    let mut n = 2;
    while n <= nmax.min(8) {
        let (s, _) = linear::build_linear(n)?.simulate()?;
        worst = worst.max(sim::distance_raw(&s, &linear::linear_target(n)?)?);
        n *= 2;
    }
    lines.push(Line { name: "linear", pass: worst <= 1e-12, detail: format!("powers of two up to {}, distance {worst:.1e}", nmax.min(8)) });

    let mut worst: f64 = 0.0;
    let mut worst_p: f64 = 0.0;
    for q in 2..=nmax.min(10) {
        for m in 1..q {
            let prog = harmonic::build_harmonic(q - m, m, 1e-3, true)?;
            let out = prog.simulate(&SynthesisModel::exact())?;
            worst = worst.max(sim::distance(&out.state, &prog.target()?)?);
            worst_p = worst_p.max((out.success_prob - harmonic::success_probability(q - m, m, true)).abs());
        }
    }
    lines.push(Line {
        name: "pipeline",
        pass: worst <= 1e-10 && worst_p <= 1e-10,
        detail: format!("n+m <= {}, distance {worst:.1e}, success vs oracle {worst_p:.1e}", nmax.min(10)),
    });

    let mut worst: f64 = 0.0;
    for n in circulant::MIN_CIRCULANT_QUBITS..=nmax.min(6) {
        worst = worst.max(circulant::build_circulant_encoding(n, 1e-3)?.1.distance);
    }
    lines.push(Line { name: "circulant", pass: worst <= 1e-10, detail: format!("n in 3..={}, residual {worst:.1e}", nmax.min(6)) });
    Ok(lines)
}

fn verify_cmd(suite: Suite, nmax: usize, seed: u64) -> Outcome<Vec<Line>> {
    ensure((1..=12).contains(&nmax), || format!("--nmax must lie in 1..=12, got {nmax}"))?;
    let mut lines = Vec::new();
    if matches!(suite, Suite::Lemmas | Suite::All) {
        lines.extend(lemma_suite(nmax, seed)?);
    }
    if matches!(suite, Suite::Circuits | Suite::All) {
        lines.extend(circuit_suite(nmax)?);
    }
    Ok(lines)
}

fn render(rows: &[Value], format: Format) -> Outcome<String> {
    match format {
        Format::Json if rows.len() == 1 => Ok(report::to_json(&rows[0])?),
        Format::Json => Ok(report::to_json(rows)?),
        Format::Csv => {
            let columns: Vec<String> = match rows.first() {
                Some(Value::Object(map)) => map.iter().filter(|(_, v)| !v.is_object()).map(|(k, _)| k.clone()).collect(),
                _ => Vec::new(),
            };
            let table_layout = report::TABLE_COLUMNS.iter().all(|c| columns.iter().any(|k| k == c));
            let columns: Vec<&str> = if table_layout {
                report::TABLE_COLUMNS.to_vec()
            } else {
                columns.iter().map(String::as_str).collect()
            };
            Ok(report::to_csv(rows, &columns)?)
        }
    }
}

fn emit(text: &str, output: &Option<PathBuf>) -> Outcome<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn threads(flag: Option<usize>) -> Outcome<Option<usize>> {
    match std::env::var("HARMONIQ_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .map(Some)
            .ok_or_else(|| Failure::Usage(format!("HARMONIQ_THREADS must be a positive integer, got `{v}`"))),
        _ => {
            ensure(flag != Some(0), || "--threads must be positive".into())?;
            Ok(flag)
        }
    }
}

fn run(cli: Cli) -> Outcome<()> {
    if let Some(t) = threads(cli.common.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    let format = cli.common.format;
    let rows = match cli.command {
        Command::State { n, m, delta, single, sim } => vec![state_cmd(n, m, delta, single, sim)?],
        Command::Linear { n, sim } => vec![linear_cmd(n, sim)?],
        Command::Qft { n, delta, trials, sim } => vec![qft_cmd(n, delta, trials, sim)?],
        Command::Rus { n, trials, seed } => vec![rus_cmd(n, trials, seed)?],
        Command::Block { n, delta, trials, sim } => vec![block_cmd(n, delta, trials, sim)?],
        Command::Diag { n, m, delta, sim } => vec![diag_cmd(n, m, delta, sim)?],
        Command::Optimize { target, n, epsilon, free } => vec![optimize_cmd(target, n, epsilon, free)?],
        Command::Table { grid, target, nmin, nmax, decades } => table_cmd(grid, target, nmin, nmax, decades)?,
        Command::Verify { suite, nmax, seed } => {
            let lines = verify_cmd(suite, nmax, seed)?;
            let failed = lines.iter().filter(|l| !l.pass).count();
            let text = match format {
                None => lines
                    .iter()
                    .map(|l| format!("{} {}: {}\n", if l.pass { "PASS" } else { "FAIL" }, l.name, l.detail))
                    .collect(),
                Some(f) => {
                    let rows: Vec<Value> =
                        lines.iter().map(|l| json!({ "check": l.name, "pass": l.pass, "detail": l.detail })).collect();
                    render(&rows, f)?
                }
            };
            emit(&text, &cli.common.output)?;
            return if failed == 0 {
                Ok(())
            } else {
                Err(Failure::Verification(format!("{failed} of {} checks failed", lines.len())))
            };
        }
    };
    emit(&render(&rows, format.unwrap_or(Format::Json))?, &cli.common.output)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(3)
        }
    }
}
