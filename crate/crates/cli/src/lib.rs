//! The `segcover` command line.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use segcover::error::Error;
use segcover::ext::{infeasibility_precheck, kernelize, long_lines, solve_ext, KernelOutcome};
use segcover::fpt::solve_fpt;
use segcover::generators::{gen_choice, gen_psi, gen_sat, ChoiceInput, CnfFormula, PsiInput};
use segcover::geometry::{format_rational, parse_rational, Line, Rational};
use segcover::instance::{
    load_instance, load_solution, save_instance, verify_cover, Instance, Solution,
};
use segcover::oracle::brute_force;
use segcover::pas::solve_pas;

#[derive(Parser, Debug)]
#[command(
    name = "segcover",
    version,
    about = "Cover planar points with few weighted segments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an instance file and print the solution as JSON.
    Solve {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Maximum number of segments.
        #[arg(long)]
        k: usize,
        /// Approximation slack for `--mode pas`.
        #[arg(long, value_parser = positive_rational)]
        epsilon: Option<Rational>,
        /// Extension factor for `--mode ext`.
        #[arg(long, value_parser = positive_rational)]
        delta: Option<Rational>,
        file: PathBuf,
    },
    /// Generate a reduction instance from a JSON input.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Check whether a solution covers an instance.
    Verify {
        file: PathBuf,
        solution: PathBuf,
        #[arg(long, value_parser = positive_rational)]
        delta: Option<Rational>,
    },
    /// Write the kernel of an instance and print its provenance.
    Kernelize {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(long, value_parser = positive_rational)]
        delta: Rational,
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print counts, the line census and the number of distinct weights.
    Stats {
        file: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Exact,
    Pas,
    Ext,
    Brute,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenKind {
    Choice,
    Psi,
    Sat,
}

fn positive_rational(s: &str) -> Result<Rational, String> {
    let r = parse_rational(s).map_err(|e| e.to_string())?;
    if r > Rational::from_integer(0.into()) {
        Ok(r)
    } else {
        Err(format!("{s} is not positive"))
    }
}

enum Failure {
    Usage(String),
    Input(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Input(m) => f.write_str(m),
        }
    }
}

type Outcome = Result<String, Failure>;

fn at(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure::Input(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    load_instance(&read(path)?).map_err(at(path))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn pretty(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON output");
    text.push('\n');
    text
}

fn solution_json(answer: Option<&Solution>) -> Value {
    match answer {
        Some(s) => json!({
            "feasible": true,
            "indices": s.indices(),
            "weight": format_rational(s.weight()),
        }),
        None => json!({ "feasible": false }),
    }
}

fn line_json(line: &Line) -> Value {
    serde_json::to_value(line).expect("JSON output")
}

/// Runs the command line `args` (program name first) and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                1
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    match dispatch(cli.command) {
        Ok(text) => {
            let _ = stdout.write_all(text.as_bytes());
            0
        }
        Err(failure) => {
            let _ = writeln!(stderr, "error: {failure}");
            match failure {
                Failure::Usage(_) => 1,
                Failure::Input(_) => 2,
            }
        }
    }
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Solve {
            mode,
            k,
            epsilon,
            delta,
            file,
        } => solve(mode, k, epsilon, delta, &file),
        Command::Gen {
            kind,
            input,
            out,
            meta,
        } => generate(kind, &input, &out, meta.as_deref()),
        Command::Verify {
            file,
            solution,
            delta,
        } => verify(&file, &solution, delta),
        Command::Kernelize {
            k,
            delta,
            file,
            out,
        } => kernel(k as usize, &delta, &file, &out),
        Command::Stats { file, k } => stats(&file, k),
    }
}

fn solve(
    mode: Mode,
    k: usize,
    epsilon: Option<Rational>,
    delta: Option<Rational>,
    file: &Path,
) -> Outcome {
    match mode {
        Mode::Pas if epsilon.is_none() => {
            return Err(Failure::Usage("--mode pas needs --epsilon".into()))
        }
        Mode::Ext if delta.is_none() => {
            return Err(Failure::Usage("--mode ext needs --delta".into()))
        }
        Mode::Pas if delta.is_some() => {
            return Err(Failure::Usage("--delta only applies to --mode ext".into()))
        }
        Mode::Ext if epsilon.is_some() => {
            return Err(Failure::Usage(
                "--epsilon only applies to --mode pas".into(),
            ))
        }
        Mode::Exact | Mode::Brute if epsilon.is_some() || delta.is_some() => {
            return Err(Failure::Usage(
                "--epsilon and --delta only apply to --mode pas and --mode ext".into(),
            ))
        }
        _ => {}
    }
    let instance = read_instance(file)?;
    let value = match mode {
        Mode::Exact => solution_json(solve_fpt(&instance, k).as_ref()),
        Mode::Brute => solution_json(brute_force(&instance, k).as_ref()),
        Mode::Pas => {
            let eps = epsilon.expect("checked above");
            let answer = solve_pas(&instance, k, &eps).map_err(at(file))?;
            let mut value = solution_json(answer.as_ref());
            value["bound_factor"] =
                json!(format_rational(&(eps + Rational::from_integer(1.into()))));
            value
        }
        Mode::Ext => {
            let delta = delta.expect("checked above");
            solution_json(solve_ext(&instance, k, &delta).map_err(at(file))?.as_ref())
        }
    };
    Ok(format!("{value}\n"))
}

fn generate(kind: GenKind, source: &Path, out: &Path, meta_path: Option<&Path>) -> Outcome {
    let (instance, meta) = match kind {
        GenKind::Choice => {
            let input: ChoiceInput = read_json(source)?;
            let (i, m) = gen_choice(input.n, &input.chains).map_err(at(source))?;
            (i, pretty(&m))
        }
        GenKind::Psi => {
            let input: PsiInput = read_json(source)?;
            let (i, m) = gen_psi(&input).map_err(at(source))?;
            (i, pretty(&m))
        }
        GenKind::Sat => {
            let formula: CnfFormula = read_json(source)?;
            let (i, m) = gen_sat(&formula).map_err(at(source))?;
            (i, pretty(&m))
        }
    };
    write(out, &save_instance(&instance))?;
    if let Some(path) = meta_path {
        write(path, &meta)?;
    }
    Ok(pretty(&json!({
        "points": instance.points().len(),
        "segments": instance.segments().len(),
    })))
}

fn verify(file: &Path, solution: &Path, delta: Option<Rational>) -> Outcome {
    let instance = read_instance(file)?;
    let record = load_solution(&read(solution)?).map_err(at(solution))?;
    let selected = record
        .to_solution(&instance)
        .map_err(at(solution))?
        .unwrap_or_else(Solution::empty);
    let report = verify_cover(&instance, &selected, delta.as_ref()).map_err(at(solution))?;
    Ok(pretty(&report))
}

fn kernel(k: usize, delta: &Rational, file: &Path, out: &Path) -> Outcome {
    let instance = read_instance(file)?;
    let value = match kernelize(&instance, k, delta).map_err(at(file))? {
        KernelOutcome::Infeasible(reason) => json!({ "kernel": false, "infeasibility": reason }),
        KernelOutcome::Kernel(kernel) => {
            write(out, &save_instance(&kernel.reduced))?;
            json!({
                "kernel": true,
                "points": kernel.reduced.points().len(),
                "segments": kernel.reduced.segments().len(),
                "point_provenance": kernel.point_provenance,
                "segment_provenance": kernel.segment_provenance,
                "long_lines": kernel.long_lines.iter().map(line_json).collect::<Vec<_>>(),
                "off_line": kernel.off_line,
            })
        }
    };
    Ok(pretty(&value))
}

fn stats(file: &Path, k: Option<usize>) -> Outcome {
    let instance = read_instance(file)?;
    let points = instance.points();
    let mut locations = points.to_vec();
    locations.sort();
    locations.dedup();
    // Number of spanned lines by how many distinct locations they carry.
    let mut lines: BTreeMap<Line, usize> = BTreeMap::new();
    for (a, p) in locations.iter().enumerate() {
        for q in &locations[a + 1..] {
            let line = Line::through(p, q).expect("distinct locations");
            lines
                .entry(line)
                .or_insert_with_key(|l| locations.iter().filter(|t| l.contains(t)).count());
        }
    }
    let mut census: BTreeMap<usize, usize> = BTreeMap::new();
    for &size in lines.values() {
        *census.entry(size).or_default() += 1;
    }
    let degenerate = instance
        .segments()
        .iter()
        .filter(|s| s.segment.is_degenerate())
        .count();
    let mut value = json!({
        "points": points.len(),
        "distinct_locations": locations.len(),
        "segments": instance.segments().len(),
        "degenerate_segments": degenerate,
        "distinct_weights": instance.distinct_weights().len(),
        "line_census": census
            .iter()
            .rev()
            .map(|(size, count)| json!({ "points": size, "lines": count }))
            .collect::<Vec<_>>(),
    });
    if let Some(k) = k {
        let long: Vec<Value> = long_lines(&instance, k).iter().map(line_json).collect();
        value["k"] = json!(k);
        value["long_lines"] = json!(long);
        value["precheck"] = json!(infeasibility_precheck(&instance, k));
    }
    Ok(pretty(&value))
}
