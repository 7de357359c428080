//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, ExitCode, Result};
use crate::estimate::{
    check_bounds, estimate_mbqc_fidelity, estimate_state_fidelity, BoundsVerdict, EstimationReport,
};
use crate::omega::{
    build_omega, build_omega_fixed, build_omega_recursive, omega_spectrum, omega_tilde_from_omega,
    spectral_summary, BasisMap, PauliSum, SpectralSummary,
};
use crate::resource::{cluster_1d, cluster_2d, ResourceFile, ResourceState};
use crate::sampler::{empirical_check, RngStream, Sampler};
use crate::sim::{
    average_mbqc_fidelity, expectation, ideal_vector, state_fidelity, AngleSpec, AverageFidelity,
    DensityState, NoiseModel,
};
use crate::DEFAULT_SEED;

/// Environment variable overriding the default seed.
pub const SEED_ENV: &str = "MBQC_FIDELITY_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "mbqc-fidelity",
    version,
    long_version = concat!(env!("CARGO_PKG_VERSION"), " (", env!("CARGO_PKG_NAME"), ")"),
    about = "Average MBQC fidelity of noisy stabilizer resource states"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Random seed (default: $MBQC_FIDELITY_SEED or a fixed constant).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Largest state simulated with dense matrices.
    #[arg(long, global = true, default_value_t = 12)]
    pub dense_cap: usize,
    /// Largest state whose spectrum is computed.
    #[arg(long, global = true, default_value_t = 26)]
    pub spectral_cap: usize,
    /// Largest generator count for exact group enumeration.
    #[arg(long, global = true, default_value_t = 24)]
    pub enum_cap: usize,
    /// Tabular CSV output where supported.
    #[arg(long, global = true)]
    pub csv: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StateKind {
    Cluster1d,
    Cluster2d,
    Custom,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OmegaMethod {
    Enumerate,
    Recursive,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TargetArg {
    Mbqc,
    State,
}

#[derive(Debug, Args)]
pub struct StateInput {
    /// Resource-state JSON file.
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct NoiseArg {
    /// Noise applied to the ideal state, e.g. `depolarizing:0.01`.
    #[arg(long, default_value = "none")]
    pub noise: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a resource-state file.
    Build {
        #[arg(long = "type", value_enum)]
        kind: StateKind,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
        /// Input file for `--type custom`.
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// Emit the fidelity operator as a Pauli sum.
    Omega {
        #[command(flatten)]
        state: StateInput,
        #[arg(long, value_enum, default_value = "enumerate")]
        method: OmegaMethod,
        /// Fixed measurement bases for the measured qubits, e.g. `X,X,XY`.
        #[arg(long)]
        basis: Option<String>,
        /// Emit the chain-transformed operator instead.
        #[arg(long)]
        tilde: bool,
    },
    /// Largest, second largest and smallest eigenvalue of Ω and the gap.
    Spectrum {
        #[command(flatten)]
        state: StateInput,
    },
    /// Draw stabilizers from the Ω distribution.
    Sample {
        #[command(flatten)]
        state: StateInput,
        #[arg(long, default_value_t = 10)]
        count: u64,
        /// Also report the largest deviation from the exact distribution.
        #[arg(long)]
        check: bool,
    },
    /// Simulate noisy MBQC and average the fidelity over angles.
    Simulate {
        #[command(flatten)]
        state: StateInput,
        #[command(flatten)]
        noise: NoiseArg,
        /// `mc:N`, `clifford_mc:N`, `clifford_exact` or `explicit:a,b,...`.
        #[arg(long, default_value = "clifford_exact")]
        angles: String,
    },
    /// Direct fidelity estimation on a simulated noisy state.
    Estimate {
        #[command(flatten)]
        state: StateInput,
        #[command(flatten)]
        noise: NoiseArg,
        #[arg(long, value_enum, default_value = "mbqc")]
        target: TargetArg,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
    },
    /// Check ν(1 − F_S) ≤ 1 − F̄ ≤ 1 − F_S.
    Bounds {
        /// Resource state; exact fidelities are computed from it.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[command(flatten)]
        noise: NoiseArg,
        #[arg(long)]
        f_state: Option<f64>,
        #[arg(long)]
        f_mbqc: Option<f64>,
        #[arg(long)]
        nu: Option<f64>,
    },
    /// Everything at once.
    Report {
        #[command(flatten)]
        state: StateInput,
        #[command(flatten)]
        noise: NoiseArg,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value = "clifford_mc:64")]
        angles: String,
    },
}

/// Resolved settings shared by all commands.
struct Context {
    seed: u64,
    dense_cap: usize,
    spectral_cap: usize,
    enum_cap: usize,
    csv: bool,
    command_line: Vec<String>,
}

impl Context {
    fn provenance(&self) -> Value {
        json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command_line,
            "seed": self.seed,
        })
    }

    fn emit<T: Serialize>(&self, result: &T) -> Result<String> {
        let mut value = serde_json::to_value(result)?;
        match value.as_object_mut() {
            Some(map) => {
                map.insert("provenance".into(), self.provenance());
            }
            None => value = json!({ "result": value, "provenance": self.provenance() }),
        }
        Ok(serde_json::to_string_pretty(&value)? + "\n")
    }

    fn no_csv(&self, command: &str) -> Result<()> {
        if self.csv {
            Err(Error::invalid(format!("--csv is not supported by `{command}`")))
        } else {
            Ok(())
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text.trim().parse().map_err(|_| Error::Parse {
            text,
            reason: format!("{SEED_ENV} must be an unsigned integer"),
        }),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn load_file(path: &Path) -> Result<ResourceFile> {
    ResourceFile::from_json(&fs::read_to_string(path)?)
}

fn load_state(path: &Path) -> Result<ResourceState> {
    ResourceState::from_file(&load_file(path)?)
}

fn noisy_state(state: &ResourceState, noise: &str, cap: usize) -> Result<(NoiseModel, DensityState)> {
    let model: NoiseModel = noise.parse()?;
    let ideal = ideal_vector(state, cap)?.to_density();
    let rho = model.apply(state, &ideal, cap)?;
    Ok((model, rho))
}

fn omega_csv(sum: &PauliSum) -> String {
    let mut out = String::from("word,coeff,num,log2den\n");
    for (w, c) in sum.terms() {
        out += &format!("{w},{},{},{}\n", c.to_f64(), c.num(), c.log2den());
    }
    out
}

#[derive(Serialize)]
struct SpectrumOut {
    n: usize,
    max: f64,
    beta: f64,
    tau: f64,
    nu: f64,
    max_multiplicity: u64,
}

impl From<(usize, &SpectralSummary)> for SpectrumOut {
    fn from((n, s): (usize, &SpectralSummary)) -> Self {
        Self {
            n,
            max: s.max_eig,
            beta: s.second_eig,
            tau: s.min_eig,
            nu: s.nu,
            max_multiplicity: s.max_multiplicity,
        }
    }
}

#[derive(Serialize)]
struct FidelityPair {
    exact: f64,
    estimated: EstimationReport,
}

#[derive(Serialize)]
struct MbqcFidelities {
    exact: f64,
    estimated: EstimationReport,
    simulated: AverageFidelity,
    angles: String,
}

#[derive(Serialize)]
struct Report {
    n: usize,
    outputs: Vec<usize>,
    noise: String,
    state_fidelity: FidelityPair,
    mbqc_fidelity: MbqcFidelities,
    spectrum: SpectrumOut,
    bounds_exact: BoundsVerdict,
    bounds_estimated: BoundsVerdict,
    timings_ms: Value,
}

fn run(cli: Cli, command_line: Vec<String>) -> Result<String> {
    let ctx = Context {
        seed: resolve_seed(cli.common.seed)?,
        dense_cap: cli.common.dense_cap,
        spectral_cap: cli.common.spectral_cap,
        enum_cap: cli.common.enum_cap,
        csv: cli.common.csv,
        command_line,
    };
    match cli.command {
        Command::Build {
            kind,
            n,
            rows,
            cols,
            input,
        } => {
            ctx.no_csv("build")?;
            let need = |v: Option<usize>, name: &str| {
                v.ok_or_else(|| Error::invalid(format!("--{name} is required for this state type")))
            };
            let state = match kind {
                StateKind::Cluster1d => cluster_1d(need(n, "n")?)?,
                StateKind::Cluster2d => cluster_2d(need(rows, "rows")?, need(cols, "cols")?)?,
                StateKind::Custom => {
                    let path = input.ok_or_else(|| Error::invalid("--in is required for custom states"))?;
                    let state = ResourceState::assemble_from_file(&load_file(&path)?)?;
                    state.verify_flow().into_result()?;
                    state
                }
            };
            ctx.emit(&state.to_file())
        }
        Command::Omega {
            state,
            method,
            basis,
            tilde,
        } => {
            let state = load_state(&state.input)?;
            let sum = match (basis, method) {
                (Some(b), _) => build_omega_fixed(&state, &BasisMap::parse(&state, &b)?, ctx.enum_cap)?,
                (None, OmegaMethod::Enumerate) => build_omega(&state, ctx.enum_cap)?,
                (None, OmegaMethod::Recursive) => build_omega_recursive(&state, ctx.enum_cap)?,
            };
            let sum = if tilde { omega_tilde_from_omega(&sum)? } else { sum };
            if ctx.csv {
                Ok(omega_csv(&sum))
            } else {
                ctx.emit(&sum.to_file())
            }
        }
        Command::Spectrum { state } => {
            let state = load_state(&state.input)?;
            if ctx.csv {
                let spec = omega_spectrum(&state, ctx.spectral_cap)?;
                let mut values: Vec<f64> = spec.values().to_vec();
                values.sort_by(|a, b| b.total_cmp(a));
                let mut out = String::from("eigenvalue,multiplicity\n");
                let mut k = 0;
                while k < values.len() {
                    let run = values[k..].iter().take_while(|&&v| v == values[k]).count();
                    out += &format!("{},{}\n", values[k], run as u64 * spec.multiplicity());
                    k += run;
                }
                Ok(out)
            } else {
                let s = spectral_summary(&state, ctx.spectral_cap)?;
                ctx.emit(&SpectrumOut::from((state.n(), &s)))
            }
        }
        Command::Sample { state, count, check } => {
            let state = load_state(&state.input)?;
            let sampler = Sampler::new(&state)?;
            let traces: Vec<_> = (0..count)
                .map(|k| sampler.sample_stream(RngStream::new(ctx.seed, k)))
                .collect();
            if ctx.csv {
                let mut out = String::from("index,word,log2_prob\n");
                for (k, t) in traces.iter().enumerate() {
                    out += &format!("{k},{},{}\n", t.result, t.log2_prob);
                }
                return Ok(out);
            }
            let deviation = if check {
                Some(empirical_check(&state, count as usize, ctx.seed)?)
            } else {
                None
            };
            let t_stabilizers = sampler.t_stabilizers().to_vec();
            ctx.emit(&json!({
                "count": count,
                "t_stabilizers": t_stabilizers,
                "samples": traces,
                "max_deviation": deviation,
            }))
        }
        Command::Simulate { state, noise, angles } => {
            ctx.no_csv("simulate")?;
            let state = load_state(&state.input)?;
            let (model, rho) = noisy_state(&state, &noise.noise, ctx.dense_cap)?;
            let spec = AngleSpec::parse(&angles, ctx.seed)?;
            let avg = average_mbqc_fidelity(&state, &rho, &spec, ctx.dense_cap)?;
            let exact = build_omega(&state, ctx.enum_cap).and_then(|o| expectation(&rho, &o)).ok();
            ctx.emit(&json!({
                "noise": model.to_string(),
                "angles": spec.to_string(),
                "simulated": avg,
                "exact_average": exact,
                "state_fidelity": state_fidelity(&rho, &state, ctx.dense_cap)?,
            }))
        }
        Command::Estimate {
            state,
            noise,
            target,
            eps,
            delta,
        } => {
            ctx.no_csv("estimate")?;
            let state = load_state(&state.input)?;
            let (model, rho) = noisy_state(&state, &noise.noise, ctx.dense_cap)?;
            let report = match target {
                TargetArg::Mbqc => estimate_mbqc_fidelity(&state, &rho, eps, delta, ctx.seed)?,
                TargetArg::State => estimate_state_fidelity(&state, &rho, eps, delta, ctx.seed)?,
            };
            let mut value = serde_json::to_value(&report)?;
            value["noise"] = json!(model.to_string());
            ctx.emit(&value)
        }
        Command::Bounds {
            input,
            noise,
            f_state,
            f_mbqc,
            nu,
        } => {
            ctx.no_csv("bounds")?;
            let verdict = match input {
                Some(path) => {
                    let state = load_state(&path)?;
                    let (_, rho) = noisy_state(&state, &noise.noise, ctx.dense_cap)?;
                    let fs = state_fidelity(&rho, &state, ctx.dense_cap)?;
                    let fm = expectation(&rho, &build_omega(&state, ctx.enum_cap)?)?;
                    let nu = spectral_summary(&state, ctx.spectral_cap)?.nu;
                    check_bounds(fs, fm, nu)
                }
                None => {
                    let need = |v: Option<f64>, name: &str| {
                        v.ok_or_else(|| Error::invalid(format!("--{name} is required without --in")))
                    };
                    let (fs, fm, nu) = (need(f_state, "f-state")?, need(f_mbqc, "f-mbqc")?, need(nu, "nu")?);
                    for (name, v) in [("f-state", fs), ("f-mbqc", fm)] {
                        if !(0.0..=1.0).contains(&v) {
                            return Err(Error::invalid(format!("--{name} {v} outside [0, 1]")));
                        }
                    }
                    if !(nu > 0.0 && nu < 1.0) {
                        return Err(Error::invalid(format!("--nu {nu} outside (0, 1)")));
                    }
                    check_bounds(fs, fm, nu)
                }
            };
            ctx.emit(&verdict)
        }
        Command::Report {
            state,
            noise,
            eps,
            delta,
            angles,
        } => {
            ctx.no_csv("report")?;
            let state = load_state(&state.input)?;
            let mut timings = serde_json::Map::new();
            let mut time = |name: &str, start: Instant| {
                timings.insert(name.into(), json!(start.elapsed().as_secs_f64() * 1e3));
            };

            let t = Instant::now();
            let (model, rho) = noisy_state(&state, &noise.noise, ctx.dense_cap)?;
            time("prepare", t);

            let t = Instant::now();
            let omega = build_omega(&state, ctx.enum_cap)?;
            let f_mbqc = expectation(&rho, &omega)?;
            let f_state = state_fidelity(&rho, &state, ctx.dense_cap)?;
            time("exact", t);

            let t = Instant::now();
            let spectrum = spectral_summary(&state, ctx.spectral_cap)?;
            time("spectrum", t);

            let t = Instant::now();
            let est_mbqc = estimate_mbqc_fidelity(&state, &rho, eps, delta, ctx.seed)?;
            let est_state = estimate_state_fidelity(&state, &rho, eps, delta, ctx.seed)?;
            time("estimate", t);

            let t = Instant::now();
            let spec = AngleSpec::parse(&angles, ctx.seed)?;
            let simulated = average_mbqc_fidelity(&state, &rho, &spec, ctx.dense_cap)?;
            time("simulate", t);

            let report = Report {
                n: state.n(),
                outputs: state.outputs().iter().collect(),
                noise: model.to_string(),
                bounds_exact: check_bounds(f_state, f_mbqc, spectrum.nu),
                bounds_estimated: check_bounds(est_state.estimate, est_mbqc.estimate, spectrum.nu),
                state_fidelity: FidelityPair {
                    exact: f_state,
                    estimated: est_state,
                },
                mbqc_fidelity: MbqcFidelities {
                    exact: f_mbqc,
                    estimated: est_mbqc,
                    simulated,
                    angles: spec.to_string(),
                },
                spectrum: SpectrumOut::from((state.n(), &spectrum)),
                timings_ms: Value::Object(timings),
            };
            ctx.emit(&report)
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the text it would print.
pub fn execute<I, T>(args: I) -> std::result::Result<String, CliFailure>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(&args).map_err(CliFailure::Usage)?;
    if let Some(t) = cli.common.threads {
        // A pool may already exist when called repeatedly in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
    let out = cli.common.out.clone();
    let command_line = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let text = run(cli, command_line).map_err(CliFailure::Run)?;
    match out {
        Some(path) => {
            fs::File::create(&path)
                .and_then(|mut f| f.write_all(text.as_bytes()))
                .map_err(|e| CliFailure::Run(e.into()))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

#[derive(Debug)]
pub enum CliFailure {
    Usage(clap::Error),
    Run(Error),
}

impl CliFailure {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliFailure::Usage(e) if !e.use_stderr() => ExitCode::Success as i32,
            CliFailure::Usage(_) => ExitCode::Validation as i32,
            CliFailure::Run(e) => e.exit_code() as i32,
        }
    }
}

/// Entry point of the binary.
pub fn main_entry() -> std::process::ExitCode {
    match execute(std::env::args_os()) {
        Ok(text) => {
            print!("{text}");
            std::process::ExitCode::SUCCESS
        }
        Err(CliFailure::Usage(e)) => {
            let code = if e.use_stderr() { ExitCode::Validation } else { ExitCode::Success };
            let _ = e.print();
            std::process::ExitCode::from(code as u8)
        }
        Err(CliFailure::Run(e)) => {
            eprintln!("error: {e}");
            std::process::ExitCode::from(e.exit_code() as u8)
        }
    }
}
