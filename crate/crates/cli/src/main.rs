use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use mqcomp::bench::{self, BenchOptions};
use mqcomp::circuit::DEFAULT_ORACLE_CAP;
use mqcomp::cost::{CostOrder, RealizationScheme};
use mqcomp::noise::{
    paired_relative_error, paired_success_error, relative_error, sample_runs, Estimate, Experiment, NoiseModel,
};
use mqcomp::passes::{optimize_traced, CompileOptions};
use mqcomp::qasm::{parse_qasm, to_zz_basis};
use mqcomp::Error;

#[derive(Parser)]
#[command(name = "mqcomp", version, about = "Compile OpenQASM circuits to programmable multiqubit gates")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile a QASM file to a program JSON and a metrics JSON.
    Compile {
        input: PathBuf,
        #[command(flatten)]
        compile: CompileArgs,
        /// Program output (default: `<input stem>.program.json`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Metrics output (default: next to the program, `.metrics.json`).
        #[arg(long)]
        metrics: Option<PathBuf>,
    },
    /// Check a compiled program against its source circuit.
    Verify {
        program: PathBuf,
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        oracle_cap: usize,
        /// Compare on random states when the register exceeds the cap.
        #[arg(long)]
        states: bool,
    },
    /// Compile and measure every `.qasm` file of a directory.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        compile: CompileArgs,
        #[command(flatten)]
        noise: NoiseArgs,
        /// Widest physical register that gets fidelity estimates.
        #[arg(long, default_value_t = 12)]
        oracle_cap: usize,
        /// JSON report path.
        #[arg(long, default_value = "report.json")]
        out: PathBuf,
        /// CSV report path.
        #[arg(long, default_value = "report.csv")]
        csv: PathBuf,
    },
    /// Estimate the fidelity of a compiled program under noise.
    Simulate {
        program: PathBuf,
        /// Source circuit; enables the relative error against it.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CompileArgs {
    /// Merge gadget interfaces through an ancilla qubit (default).
    #[arg(long, overrides_with = "no_ancilla")]
    ancilla: bool,
    #[arg(long, overrides_with = "ancilla")]
    no_ancilla: bool,
    /// Cost order: `lex` or `weighted:<w>`.
    #[arg(long, default_value = "lex")]
    cost: CostOrder,
    #[arg(long, default_value_t = 50)]
    max_iters: usize,
}

impl CompileArgs {
    fn scheme(&self) -> RealizationScheme {
        if self.no_ancilla {
            RealizationScheme::NoAncilla
        } else {
            RealizationScheme::AncillaMerged
        }
    }

    fn options(&self) -> CompileOptions {
        CompileOptions {
            scheme: self.scheme(),
            cost: self.cost,
            max_iters: self.max_iters,
            ..CompileOptions::default()
        }
    }
}

#[derive(Args)]
struct NoiseArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo noise samples (0 disables Monte Carlo).
    #[arg(long, default_value_t = 0)]
    samples: usize,
    #[arg(long, default_value_t = 10)]
    shots: u32,
    #[arg(long, default_value_t = 1e-3)]
    p_dephase: f64,
    #[arg(long, default_value_t = 1e-3)]
    p_depol: f64,
}

impl NoiseArgs {
    fn model(&self) -> mqcomp::Result<NoiseModel> {
        NoiseModel::new(self.p_dephase, self.p_depol, self.seed)
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_qasm(path: &Path) -> anyhow::Result<mqcomp::circuit::Circuit> {
    let src = read(path)?;
    let c = parse_qasm(&src).map_err(|e| Error::Qasm(e)).with_context(|| path.display().to_string())?;
    Ok(to_zz_basis(&c))
}

fn compile(input: &Path, args: &CompileArgs, out: Option<PathBuf>, metrics: Option<PathBuf>) -> anyhow::Result<()> {
    let circuit = load_qasm(input)?;
    let (program, trace) = optimize_traced(&circuit, &args.options())?;
    let stem = input.file_stem().map_or("program".into(), |s| s.to_string_lossy().into_owned());
    let out = out.unwrap_or_else(|| PathBuf::from(format!("{stem}.program.json")));
    let metrics_path = metrics.unwrap_or_else(|| {
        let name = out.file_name().map_or(String::new(), |s| s.to_string_lossy().into_owned());
        let base = name.strip_suffix(".program.json").or_else(|| name.strip_suffix(".json")).unwrap_or(&name);
        out.with_file_name(format!("{base}.metrics.json"))
    });
    write(&out, &bench::program_to_json(&program)?)?;
    let m = bench::metrics(&program, &circuit)?;
    #[derive(Serialize)]
    #[serde(rename_all = "camelCase")]
    struct MetricsFile<'a> {
        version: &'a str,
        #[serde(flatten)]
        metrics: &'a bench::Metrics,
        iterations: usize,
        accepted_costs: &'a [mqcomp::cost::CostVector],
    }
    let mf = MetricsFile {
        version: bench::FORMAT_VERSION,
        metrics: &m,
        iterations: trace.accepted.len().saturating_sub(1),
        accepted_costs: &trace.accepted,
    };
    write(&metrics_path, &(serde_json::to_string_pretty(&mf)? + "\n"))?;
    println!(
        "{}: {} two-qubit gates -> {} multiqubit gates (baseline {}), norm {:.4} -> {:.4}",
        input.display(),
        m.two_qubit_count,
        m.compiled_mq_count,
        m.baseline_mq_count,
        m.input_norm,
        m.compiled_norm
    );
    println!("wrote {} and {}", out.display(), metrics_path.display());
    Ok(())
}

fn verify(program: &Path, input: &Path, cap: usize, states: bool) -> anyhow::Result<bool> {
    let p = bench::program_from_json(&read(program)?).with_context(|| program.display().to_string())?;
    let c = load_qasm(input)?;
    let r = bench::verify(&p, &c, cap, states)?;
    println!("{}", serde_json::to_string_pretty(&r)?);
    println!("{}", if r.passed { "PASS" } else { "FAIL" });
    Ok(r.passed)
}

fn simulate(program: &Path, input: Option<&Path>, noise: &NoiseArgs, out: Option<&Path>) -> anyhow::Result<()> {
    let p = bench::program_from_json(&read(program)?).with_context(|| program.display().to_string())?;
    let model = noise.model()?;
    let e_comp = Experiment::from_program(&p)?;
    let e_inp = match input {
        Some(path) => Some(Experiment::from_circuit(&load_qasm(path)?)?),
        None => None,
    };
    #[derive(Serialize)]
    #[serde(rename_all = "camelCase")]
    struct SimReport {
        version: &'static str,
        model: NoiseModel,
        f_comp_success: f64,
        f_inp_success: Option<f64>,
        eps_success: Option<f64>,
        eps_success_sampled: Option<Estimate>,
        samples: usize,
        shots: u32,
        f_comp_mc: Option<Estimate>,
        f_inp_mc: Option<Estimate>,
        eps_mc: Option<Estimate>,
    }
    let fc = e_comp.success_probability(&model)?;
    let fi = e_inp.as_ref().map(|e| e.success_probability(&model)).transpose()?;
    let mut rep = SimReport {
        version: bench::FORMAT_VERSION,
        model,
        f_comp_success: fc,
        f_inp_success: fi,
        eps_success: fi.and_then(|fi| relative_error(fc, fi)),
        eps_success_sampled: None,
        samples: noise.samples,
        shots: noise.shots,
        f_comp_mc: None,
        f_inp_mc: None,
        eps_mc: None,
    };
    if noise.samples > 0 {
        let ideal = e_comp.ideal()?;
        let rc = sample_runs(&e_comp, &model, noise.samples, noise.shots)?;
        rep.f_comp_mc = Some(rc.fidelity(&ideal)?);
        if let Some(ei) = &e_inp {
            let ri = sample_runs(ei, &model, noise.samples, noise.shots)?;
            rep.f_inp_mc = Some(ri.fidelity(&ideal)?);
            rep.eps_mc = paired_relative_error(&rc, &ri, &ideal).ok();
            rep.eps_success_sampled = paired_success_error(&rc, &ri).ok();
        }
    }
    let js = serde_json::to_string_pretty(&rep)? + "\n";
    match out {
        Some(path) => write(path, &js)?,
        None => print!("{js}"),
    }
    Ok(())
}

fn bench_cmd(
    dir: &Path,
    compile: &CompileArgs,
    noise: &NoiseArgs,
    cap: usize,
    out: &Path,
    csv: &Path,
) -> anyhow::Result<()> {
    if !dir.is_dir() {
        bail!("{} is not a directory", dir.display());
    }
    noise.model()?;
    let opts = BenchOptions {
        scheme: compile.scheme(),
        cost: compile.cost,
        max_iters: compile.max_iters,
        seed: noise.seed,
        samples: noise.samples,
        shots: noise.shots,
        p_dephase: noise.p_dephase,
        p_depol_tq: noise.p_depol,
        sim_cap: cap,
    };
    let report = bench::run_bench(dir, &opts)?;
    write(csv, &report.to_csv()?)?;
    write(out, &report.to_json()?)?;
    for r in report.rows() {
        match (r.compiled_mq_count, r.gate_count_ratio) {
            (Some(k), Some(g)) => println!("{:<24} {:>4} -> {:>4}  x{:.2}  {}", r.name, r.two_qubit_count.unwrap_or(0), k, g, r.status),
            _ => println!("{:<24} {}", r.name, r.status),
        }
    }
    println!("wrote {} and {}", csv.display(), out.display());
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::Qasm(_) | Error::UnsupportedGate(_) => 2,
                Error::Invariant(_) => 3,
                _ => 1,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Compile {
            input,
            compile: c,
            out,
            metrics,
        } => compile(input, c, out.clone(), metrics.clone()).map(|_| true),
        Cmd::Verify {
            program,
            input,
            oracle_cap,
            states,
        } => verify(program, input, *oracle_cap, *states),
        Cmd::Bench {
            dir,
            compile: c,
            noise,
            oracle_cap,
            out,
            csv,
        } => bench_cmd(dir, c, noise, *oracle_cap, out, csv).map(|_| true),
        Cmd::Simulate {
            program,
            input,
            noise,
            out,
        } => simulate(program, input.as_deref(), noise, out.as_deref()).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
