//! `vbstab`: filtration tables, Shatz polygons, Yang-Mills flows, invariant
//! suites and clutching degrees from the command line.
//!
//! Exit codes: 0 success, 2 input error, 3 non-convergence, 1 for failed
//! verification checks or output I/O errors.

mod bundle;
mod svg;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use vbstab::clutching::{winding_turns, ClutchError, SampledLoop};
use vbstab::filtration::{graded, hn_filtration, hn_type, shatz_polygon};
use vbstab::flow::{
    central_residual, initial_field, jacobian_coordinates, run_flow, FlowConfig, FlowOutcome,
};
use vbstab::lattice::snapshot::write_connection;
use vbstab::verify::{run_suite, Suite};

#[derive(Parser, Debug)]
#[command(name = "vbstab", version, about)]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Seed for random fields (overrides the flow config).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Tolerance: gradient-norm target for `flow`, integer band for `clutch`.
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Harder-Narasimhan data of a split bundle given as JSON.
    Analyze { spec: PathBuf },
    /// Yang-Mills descent from a key-value config.
    Flow { config: PathBuf },
    /// Run an invariant suite: momentum, reduction, algebra or all.
    Verify { suite: String },
    /// Degree of a line bundle from sampled transition values, one `re im`
    /// pair per line.
    Clutch { samples: PathBuf },
}

enum Failure {
    Input(String),
    NotConverged(String),
    ChecksFailed(String),
    Output(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::NotConverged(_) => 3,
            Failure::ChecksFailed(_) | Failure::Output(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m)
            | Failure::NotConverged(m)
            | Failure::ChecksFailed(m)
            | Failure::Output(m) => m,
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_output(dir: &Path, name: &str, contents: &[u8]) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Output(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Failure::Output(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn cmd_analyze(cli: &Cli, spec: &Path) -> Result<(), Failure> {
    let b = bundle::parse_bundle(&read_input(spec)?).map_err(Failure::Input)?;
    let hn = hn_filtration(&b);
    let data = hn
        .quotient_data()
        .map_err(|e| Failure::Output(format!("internal filtration error: {e:?}")))?;

    let mut csv = String::from("step,rank,degree,mu_num,mu_den\n");
    for (i, q) in data.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            i + 1,
            q.rd.rank(),
            q.rd.degree(),
            q.slope.numer(),
            q.slope.denom()
        );
    }
    write_output(&cli.out, "hn.csv", csv.as_bytes())?;

    let polygon = shatz_polygon(&b);
    let mut csv = String::from("x,y\n");
    for (x, y) in &polygon.vertices {
        let _ = writeln!(csv, "{x},{y}");
    }
    write_output(&cli.out, "shatz.csv", csv.as_bytes())?;
    write_output(&cli.out, "shatz.svg", svg::render(&polygon).as_bytes())?;

    let verdict = if b.is_stable() {
        "stable"
    } else if b.is_semistable() {
        "semi-stable (not stable)"
    } else {
        "unstable"
    };
    let mut summary = String::new();
    let _ = writeln!(summary, "rank: {}", b.rank());
    let _ = writeln!(summary, "degree: {}", b.degree());
    let _ = writeln!(summary, "slope: {}", b.slope());
    let _ = writeln!(summary, "verdict: {verdict}");
    let _ = writeln!(summary, "semistable: {}", b.is_semistable());
    let _ = writeln!(summary, "stable: {}", b.is_stable());
    let _ = writeln!(summary, "hn_length: {}", hn.len());
    let ty: Vec<String> = hn_type(&b).0.iter().map(|q| q.to_string()).collect();
    let _ = writeln!(summary, "hn_type: [{}]", ty.join(", "));
    if let Ok(gr) = graded(&b) {
        let labels: Vec<&str> = gr.atoms().iter().map(|a| a.label.as_str()).collect();
        let _ = writeln!(summary, "jh_graded: [{}]", labels.join(", "));
    }
    write_output(&cli.out, "summary.txt", summary.as_bytes())?;
    print!("{summary}");
    Ok(())
}

fn cmd_flow(cli: &Cli, config: &Path) -> Result<(), Failure> {
    let mut cfg =
        FlowConfig::parse(&read_input(config)?).map_err(|e| Failure::Input(e.to_string()))?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = cli.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Failure::Input(format!("--tol must be positive, got {tol}")));
        }
        cfg.tol = tol;
    }
    let res = run_flow(&initial_field(&cfg), &cfg)
        .map_err(|e| Failure::NotConverged(format!("flow aborted: {e}")))?;

    let mut trace = Vec::new();
    res.trace
        .write_csv(&mut trace)
        .map_err(|e| Failure::Output(e.to_string()))?;
    write_output(&cli.out, "trace.csv", &trace)?;
    let mut snap = Vec::new();
    write_connection(&res.field, &mut snap).map_err(|e| Failure::Output(e.to_string()))?;
    write_output(&cli.out, "final_connection.txt", &snap)?;

    let residual = central_residual(&res.field);
    println!("steps: {}", res.steps);
    println!("grad_norm: {:e}", res.grad_norm);
    println!("central_residual: {residual:e}");
    if cfg.grid.rank() == 1 && cfg.grid.degree() == 0 {
        match jacobian_coordinates(&res.field, 1e-5) {
            Ok((x, y)) => println!("jacobian_coordinates: {x:.10} {y:.10}"),
            Err(e) => println!("jacobian_coordinates: unavailable ({e})"),
        }
    }
    match res.outcome {
        FlowOutcome::Converged => Ok(()),
        FlowOutcome::BudgetExhausted => Err(Failure::NotConverged(format!(
            "step budget of {} exhausted with grad_norm {:e}",
            cfg.max_steps, res.grad_norm
        ))),
        FlowOutcome::Stalled => Err(Failure::NotConverged(format!(
            "line search stalled at step {} with grad_norm {:e}",
            res.steps, res.grad_norm
        ))),
    }
}

fn cmd_verify(cli: &Cli, suite: &str) -> Result<(), Failure> {
    let suite: Suite = suite.parse().map_err(Failure::Input)?;
    let checks = run_suite(suite, cli.seed.unwrap_or(0));
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::ChecksFailed(format!("{failed} check(s) failed")))
    }
}

fn parse_samples(text: &str) -> Result<Vec<Complex64>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parsed = match fields[..] {
            [re, im] => re.parse::<f64>().ok().zip(im.parse::<f64>().ok()),
            _ => None,
        };
        let (re, im) = parsed.ok_or_else(|| format!("line {}: expected `re im`", i + 1))?;
        out.push(Complex64::new(re, im));
    }
    Ok(out)
}

fn cmd_clutch(cli: &Cli, samples: &Path) -> Result<(), Failure> {
    let band = cli.tol.unwrap_or(0.25);
    if !(band > 0.0 && band < 0.5) {
        return Err(Failure::Input(format!(
            "--tol for clutch must lie in (0, 0.5), got {band}"
        )));
    }
    let values = parse_samples(&read_input(samples)?).map_err(Failure::Input)?;
    let input_err = |e: ClutchError| Failure::Input(e.to_string());
    let l = SampledLoop::new(values).map_err(input_err)?;
    let turns = winding_turns(&l).map_err(input_err)?;
    let degree = turns.round();
    if (turns - degree).abs() > band {
        return Err(Failure::Input(format!(
            "accumulated argument {turns:.6} turns is not within {band} of an integer"
        )));
    }
    println!("{}", degree as i64);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze { spec } => cmd_analyze(&cli, spec),
        Command::Flow { config } => cmd_flow(&cli, config),
        Command::Verify { suite } => cmd_verify(&cli, suite),
        Command::Clutch { samples } => cmd_clutch(&cli, samples),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_parsing() {
        let v = parse_samples("# loop\n1 0\n\n0.5 -0.25\n").unwrap();
        assert_eq!(
            v,
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, -0.25)]
        );
        assert_eq!(
            parse_samples("1 0\n1\n").unwrap_err(),
            "line 2: expected `re im`"
        );
    }
}
