//! `hcre`: resource estimates and verification oracles from the command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use honeycomb_re::config::{Config, EstimateInputs};
use honeycomb_re::noise::{
    cycle_outcome_distribution, derive_noise_params, heralded_cz_distribution, heralded_mzz_distribution,
    AttemptCaps, NoiseBiases,
};
use honeycomb_re::pipeline::{solve_estimate, EstimateReport, REPORT_KEYS};
use honeycomb_re::plaquette::verify_all;
use honeycomb_re::rus_oracle::{mc_rus_oracle, RusGate};
use honeycomb_re::surgery::{
    bundled_error_data, extrapolate_error, fit_error_curve, ladder_widths, patch_geometry, read_error_data,
    select_distance,
};
use honeycomb_re::synthesis::Rounding;
use rayon::prelude::*;

#[derive(Parser, Debug)]
#[command(name = "hcre", version, about = "Honeycomb Floquet-code resource estimator")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Output file (report, CSV or table, depending on the subcommand).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve for the self-consistent estimate and print the report.
    Estimate,
    /// Vary one key and emit one CSV row of report values per setting.
    Sweep(SweepArgs),
    /// Fit the lattice-surgery error curve and print the extrapolated ladder.
    Fit {
        /// Also report the smallest ladder patch reaching this error.
        #[arg(long)]
        target: Option<f64>,
    },
    /// Compare closed-form heralded distributions with sampled RUS histories.
    VerifyNoise {
        #[arg(long, default_value_t = 0.01)]
        p: f64,
        /// RUS attempt cap; defaults to the configured `noise.n_rus`.
        #[arg(long)]
        n_rus: Option<u32>,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run the dense-matrix plaquette checks.
    VerifyPlaquette {
        #[arg(long, default_value_t = 20)]
        angles: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
    },
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Configuration key to vary, e.g. `problem.L`.
    #[arg(long)]
    key: String,
    /// Explicit comma-separated values.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["from", "to"])]
    values: Vec<String>,
    #[arg(long, requires = "to")]
    from: Option<f64>,
    #[arg(long, requires = "from")]
    to: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    step: f64,
}

type AppResult<T> = std::result::Result<T, Box<dyn std::error::Error>>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` means a check ran and failed.
fn run(cli: Cli) -> AppResult<bool> {
    let mut cfg = match &cli.common.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    for pair in &cli.common.set {
        cfg.set_pair(pair)?;
    }
    let out = cli.common.out.as_deref();
    match cli.command {
        Command::Estimate => estimate(&cfg, out),
        Command::Sweep(args) => sweep(&cfg, &args, out),
        Command::Fit { target } => fit(&cfg, target, out),
        Command::VerifyNoise { p, n_rus, trials, seed } => verify_noise(&cfg, p, n_rus, trials, seed, out),
        Command::VerifyPlaquette { angles, seed, tolerance } => verify_plaquette(angles, seed, tolerance, out),
    }
}

fn solve(cfg: &Config) -> AppResult<EstimateReport> {
    let i = EstimateInputs::from_config(cfg)?;
    Ok(solve_estimate(&i.spec, &i.noise, &i.caps, &i.budget, &i.options)?)
}

fn estimate(cfg: &Config, out: Option<&Path>) -> AppResult<bool> {
    let inputs = EstimateInputs::from_config(cfg)?;
    let report = solve_estimate(&inputs.spec, &inputs.noise, &inputs.caps, &inputs.budget, &inputs.options)?;
    print!("{report}");
    if inputs.options.rounding == Rounding::Integer {
        let mut exact = inputs.options.clone();
        exact.rounding = Rounding::Exact;
        match solve_estimate(&inputs.spec, &inputs.noise, &inputs.caps, &inputs.budget, &exact) {
            Ok(e) => println!(
                "\nexact rounding: t_synth {:.2}, {:.2} timesteps/step, {:.4e} qubits, {:.4e} s",
                e.rotation.logical_timesteps, e.step.logical_timesteps, e.physical_qubits, e.runtime_seconds
            ),
            Err(err) => println!("\nexact rounding: {err}"),
        }
    }
    match out {
        Some(path) => report.write_key_values(File::create(path)?)?,
        None => {
            println!();
            report.write_key_values(io::stdout().lock())?;
        }
    }
    Ok(true)
}

fn sweep_values(args: &SweepArgs) -> AppResult<Vec<String>> {
    if !args.values.is_empty() {
        return Ok(args.values.clone());
    }
    let (Some(from), Some(to)) = (args.from, args.to) else {
        return Err("sweep needs --values or --from/--to".into());
    };
    if !(args.step > 0.0) {
        return Err("--step must be positive".into());
    }
    let n = ((to - from) / args.step + 1e-9).floor();
    if n < 0.0 {
        return Err("--to is below --from".into());
    }
    Ok((0..=n as u64).map(|k| (from + k as f64 * args.step).to_string()).collect())
}

fn sweep(cfg: &Config, args: &SweepArgs, out: Option<&Path>) -> AppResult<bool> {
    let values = sweep_values(args)?;
    let rows: Vec<(String, std::result::Result<EstimateReport, String>)> = values
        .par_iter()
        .map(|v| {
            let mut c = cfg.clone();
            let result = c
                .set(&args.key, v)
                .map_err(|e| e.to_string())
                .and_then(|()| solve(&c).map_err(|e| e.to_string()));
            (v.clone(), result)
        })
        .collect();
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    let mut header = vec![args.key.as_str()];
    header.extend(REPORT_KEYS);
    header.push("error");
    w.write_record(&header)?;
    for (v, result) in rows {
        let mut record = vec![v];
        match result {
            Ok(report) => {
                record.extend(report.key_values().into_iter().map(|(_, x)| x));
                record.push(String::new());
            }
            Err(e) => {
                record.extend(std::iter::repeat_n(String::new(), REPORT_KEYS.len()));
                record.push(e);
            }
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(true)
}

fn fit(cfg: &Config, target: Option<f64>, out: Option<&Path>) -> AppResult<bool> {
    let data = match cfg.get("data.lattice_surgery_csv") {
        Some(path) => read_error_data(File::open(path)?)?,
        None => bundled_error_data(),
    };
    let params = fit_error_curve(&data)?;
    println!("a = {:.5}", params.a);
    println!("b = {:.5}", params.b);
    println!("\n{:>5} {:>6} {:>6} {:>7} {:>12}", "w", "h", "rounds", "qubits", "E_hv");
    let mut ladder = Vec::new();
    for w in ladder_widths() {
        let g = patch_geometry(w)?;
        let e = extrapolate_error(&params, w)?;
        println!("{:>5} {:>6} {:>6} {:>7} {:>12.3e}", g.width, g.height, g.rounds, g.qubits, e);
        ladder.push((g, e));
    }
    if let Some(t) = target {
        let g = select_distance(&params, t)?;
        println!("\ntarget {t:e}: w = {}, h = {}, rounds = {}", g.width, g.height, g.rounds);
    }
    if let Some(path) = out {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["width", "height", "rounds", "qubits", "ehv"])?;
        for (g, e) in ladder {
            w.write_record([
                g.width.to_string(),
                g.height.to_string(),
                g.rounds.to_string(),
                g.qubits.to_string(),
                format!("{e:e}"),
            ])?;
        }
        w.flush()?;
    }
    Ok(true)
}

fn verify_noise(cfg: &Config, p: f64, n_rus: Option<u32>, trials: u64, seed: u64, out: Option<&Path>) -> AppResult<bool> {
    let num = |key: &str| -> AppResult<f64> {
        Ok(cfg.get(key).ok_or_else(|| format!("missing {key}"))?.parse()?)
    };
    let int = |key: &str| -> AppResult<u32> { Ok(cfg.get(key).ok_or_else(|| format!("missing {key}"))?.parse()?) };
    let biases = NoiseBiases {
        loss: num("noise.biases.loss")?,
        distinguishability: num("noise.biases.distinguishability")?,
        idle: num("noise.biases.idle")?,
        gate: num("noise.biases.gate")?,
    };
    let params = derive_noise_params(p, Some(biases))?;
    let caps = AttemptCaps::new(
        match n_rus {
            Some(n) => n,
            None => int("noise.n_rus")?,
        },
        int("noise.n_init")?,
        int("noise.n_measure")?,
    )?;
    let cycle = cycle_outcome_distribution(params.epsilon, params.distinguishability)?;
    let mut table: Vec<[String; 6]> = Vec::new();
    let mut ok = true;
    println!("p = {p}, eps = {:.4e}, N_RUS = {}, trials = {trials}, seed = {seed}", params.epsilon, caps.n_rus);
    for (gate, name, closed) in [
        (RusGate::Cz, "cz", heralded_cz_distribution(&params, &caps)?),
        (RusGate::Mzz, "mzz", heralded_mzz_distribution(&params, &caps)?),
    ] {
        let sampled = mc_rus_oracle(&cycle, &caps, gate, trials, seed)?;
        println!("\n{name}: closed-form total {:.15}", closed.total());
        println!("{:<24} {:>12} {:>12} {:>10} {:>7}", "category", "closed", "sampled", "sigma", "z");
        for row in sampled.compare(&closed) {
            let flag = if row.z > 5.0 { "  FAIL" } else { "" };
            ok &= row.z <= 5.0;
            println!(
                "{:<24} {:>12.4e} {:>12.4e} {:>10.2e} {:>7.2}{flag}",
                row.label.to_string(),
                row.expected,
                row.observed,
                row.sigma,
                row.z
            );
            table.push([
                name.to_string(),
                row.label.to_string(),
                format!("{:e}", row.expected),
                format!("{:e}", row.observed),
                format!("{:e}", row.sigma),
                format!("{}", row.z),
            ]);
        }
    }
    if let Some(path) = out {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["gate", "category", "closed", "sampled", "sigma", "z"])?;
        for row in table {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    println!("\n{}", if ok { "all categories within 5 sigma" } else { "deviation beyond 5 sigma" });
    Ok(ok)
}

fn verify_plaquette(angles: usize, seed: u64, tolerance: f64, out: Option<&Path>) -> AppResult<bool> {
    let v = verify_all(angles, seed, tolerance)?;
    let mark = |ok: bool| if ok { "pass" } else { "FAIL" };
    let mut lines = Vec::new();
    for c in &v.relations.checks {
        lines.push(format!("{}  relation: {}", mark(c.passed), c.description));
    }
    lines.push(format!("{}  single-letter mutation detected", mark(v.mutation_detected)));
    let (cz2, cz3) = v.clifford_deviations;
    lines.push(format!("{}  Clifford conjugation of Z2: {cz2:.3e}", mark(cz2 <= 1e-12)));
    lines.push(format!("{}  Clifford conjugation of Z3: {cz3:.3e}", mark(cz3 <= 1e-12)));
    lines.push(format!(
        "{}  circuit at theta = 0 vs identity: {:.3e}",
        mark(v.circuit_identity_at_zero <= 1e-12),
        v.circuit_identity_at_zero
    ));
    lines.push(format!("{}  circuit unitarity defect: {:.3e}", mark(v.circuit_unitarity <= 1e-12), v.circuit_unitarity));
    for &(theta, d) in &v.evolution {
        lines.push(format!("{}  evolution theta = {theta:.6}: {d:.3e}", mark(d <= tolerance)));
    }
    for &(theta, d) in &v.fourier {
        lines.push(format!("{}  Fourier identity theta = {theta:.6}: {d:.3e}", mark(d <= tolerance)));
    }
    lines.push(format!(
        "max evolution deviation {:.3e}, max Fourier deviation {:.3e}, tolerance {tolerance:e}",
        v.max_evolution_deviation(),
        v.max_fourier_deviation()
    ));
    let passed = v.all_passed();
    lines.push(if passed { "all checks passed".into() } else { "some checks failed".into() });
    let text = lines.join("\n") + "\n";
    print!("{text}");
    if let Some(path) = out {
        std::fs::write(path, text)?;
    }
    Ok(passed)
}
