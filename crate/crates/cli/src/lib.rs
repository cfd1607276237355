//! Command-line front end for `systolic-morse`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use systolic_morse::critical::{census, find_critical};
use systolic_morse::eutactic::surface_classify;
use systolic_morse::flow::{
    boundary_decay_rate, integrate, known_orbits, render_svg, separatrix_search, write_csv, Direction, FlowConfig, Metric,
    Trajectory,
};
use systolic_morse::homology::{invariant_rational_homology, m11_cover_complex, m11_deck_action, MorseComplex};
use systolic_morse::syst::{SystParams, SystState};
use systolic_morse::torus::{enumerate_geodesics, Branch, MarkovPoint};
use systolic_morse::Error;

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "SYSTOLIC_MORSE_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "systolic-morse", version, about = "The syst Morse functions on the moduli space of once-punctured tori")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simple closed geodesics up to a length cutoff, as JSON lines.
    Enumerate {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 10.0)]
        cutoff: f64,
        /// Output file; standard output if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Value and gradient of syst.
    Syst {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long = "T")]
        t: f64,
        #[arg(long, default_value_t = 1e-12)]
        tail_tol: f64,
    },
    /// Eutacticity of the minimal gradients at a point.
    Classify {
        #[command(flatten)]
        point: PointArgs,
        /// Print the full classification as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Critical point of syst near a start, or a census from random starts.
    FindCritical {
        #[command(flatten)]
        point: OptionalPointArgs,
        #[arg(long = "T")]
        t: f64,
        /// Number of random fundamental-domain starts; replaces --point.
        #[arg(long)]
        census: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        cluster_tol: f64,
    },
    /// Gradient flow lines, written as CSV with an SVG figure.
    Flow {
        #[command(flatten)]
        point: OptionalPointArgs,
        #[arg(long = "T")]
        t: f64,
        #[arg(long, value_enum, default_value_t = MetricArg::Wp)]
        metric: MetricArg,
        #[arg(long, value_enum, default_value_t = DirectionArg::Down)]
        direction: DirectionArg,
        /// Trace the separatrices out of a critical orbit instead of one start.
        #[arg(long, value_enum)]
        separatrices: Option<OrbitArg>,
        #[arg(long, default_value_t = 5000)]
        max_steps: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Homology of an integer chain complex.
    Homology {
        /// JSON file `{"degrees": [...], "boundaries": [...]}`.
        #[arg(long, conflicts_with = "fixture")]
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        fixture: Option<FixtureArg>,
    },
}

#[derive(clap::Args, Debug)]
pub struct PointArgs {
    /// `x,y` (with --branch) or `x,y,z`.
    #[arg(long)]
    pub point: String,
    #[arg(long, value_enum, default_value_t = BranchArg::Lower)]
    pub branch: BranchArg,
}

#[derive(clap::Args, Debug)]
pub struct OptionalPointArgs {
    #[arg(long)]
    pub point: Option<String>,
    #[arg(long, value_enum, default_value_t = BranchArg::Lower)]
    pub branch: BranchArg,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum BranchArg {
    Lower,
    Upper,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum MetricArg {
    Euclidean,
    Wp,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum DirectionArg {
    Up,
    Down,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum OrbitArg {
    Hexagonal,
    Square,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum FixtureArg {
    M11cover,
}

/// Error from a command: a library error or a bad argument value.
#[derive(Debug)]
enum Failure {
    Lib(Error),
    Usage(String),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Parses `x,y` or `x,y,z` into a point on the Markov surface.
pub fn parse_point(spec: &str, branch: BranchArg) -> Result<MarkovPoint<f64>, Error> {
    let vals: Vec<f64> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("point component {s:?}: {e}"))))
        .collect::<Result<_, _>>()?;
    match vals[..] {
        [x, y] => MarkovPoint::from_xy(
            x,
            y,
            match branch {
                BranchArg::Lower => Branch::Lower,
                BranchArg::Upper => Branch::Upper,
            },
        ),
        [x, y, z] => MarkovPoint::new(x, y, z),
        _ => Err(Error::Parse(format!("point {spec:?} needs 2 or 3 components"))),
    }
}

fn json_line<T: Serialize>(out: &mut dyn Write, v: &T) -> Outcome {
    writeln!(out, "{}", serde_json::to_string(v).map_err(|e| Failure::Usage(e.to_string()))?)?;
    Ok(())
}

#[derive(Serialize)]
struct SystReport {
    point: MarkovPoint<f64>,
    #[serde(rename = "T")]
    t: f64,
    value: f64,
    sys: f64,
    gap: f64,
    count: usize,
    cutoff_used: f64,
    tail_bound: f64,
    gradient: [f64; 3],
}

#[derive(Serialize)]
struct FlowReport {
    csv: PathBuf,
    terminal: systolic_morse::flow::Terminal,
    samples: usize,
    t_end: f64,
    l_min_end: f64,
    decay_rate: Option<f64>,
    decay_r_squared: Option<f64>,
}

fn enumerate(point: &PointArgs, cutoff: f64, out_path: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let p = parse_point(&point.point, point.branch)?;
    let entries = enumerate_geodesics(&p, cutoff)?;
    let text: String = entries.iter().map(|e| e.to_json_line() + "\n").collect();
    match out_path {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn syst(point: &PointArgs, t: f64, tail_tol: f64, out: &mut dyn Write) -> Outcome {
    let p = parse_point(&point.point, point.branch)?;
    let params = SystParams::new(t)?.with_tail_tol(tail_tol)?;
    let st = SystState::evaluate(&p, &params)?;
    let v = st.syst_value();
    json_line(
        out,
        &SystReport {
            point: p,
            t,
            value: v.value,
            sys: st.sys,
            gap: st.gap,
            count: v.count,
            cutoff_used: v.cutoff_used,
            tail_bound: v.tail_bound,
            gradient: st.ambient_gradient(),
        },
    )
}

fn classify(point: &PointArgs, json: bool, out: &mut dyn Write) -> Outcome {
    let p = parse_point(&point.point, point.branch)?;
    let (class, rank) = surface_classify(&p)?;
    if json {
        json_line(out, &serde_json::json!({ "class": class, "rank": rank }))
    } else {
        writeln!(out, "{} rank={rank}", class.kind)?;
        Ok(())
    }
}

fn random_fd_point(rng: &mut ChaCha8Rng) -> MarkovPoint<f64> {
    loop {
        let x = rng.gen_range(2.05..3.0);
        let y = rng.gen_range(x..8.0);
        let Ok(p) = MarkovPoint::from_xy(x, y, Branch::Lower) else { continue };
        if p.z() >= p.y() && p.z() <= p.x() * p.y() - p.z() {
            return p;
        }
    }
}

fn find(point: &OptionalPointArgs, t: f64, n: Option<usize>, seed: u64, tol: f64, out: &mut dyn Write) -> Outcome {
    let params = SystParams::new(t)?;
    match (n, &point.point) {
        (Some(n), _) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let seeds: Vec<MarkovPoint<f64>> = (0..n).map(|_| random_fd_point(&mut rng)).collect();
            json_line(out, &census(&seeds, &params, tol)?)
        }
        (None, Some(spec)) => json_line(out, &find_critical(&parse_point(spec, point.branch)?, &params)?),
        (None, None) => Err(Failure::Usage("find-critical needs --point or --census".into())),
    }
}

#[allow(clippy::too_many_arguments)]
fn flow(
    point: &OptionalPointArgs,
    t: f64,
    metric: MetricArg,
    direction: DirectionArg,
    separatrices: Option<OrbitArg>,
    max_steps: usize,
    tol: f64,
    out_dir: &Path,
    out: &mut dyn Write,
) -> Outcome {
    let params = SystParams::new(t)?;
    let mut cfg = FlowConfig::new(
        match metric {
            MetricArg::Euclidean => Metric::Euclidean,
            MetricArg::Wp => Metric::Wp,
        },
        match direction {
            DirectionArg::Up => Direction::Up,
            DirectionArg::Down => Direction::Down,
        },
    );
    cfg.max_steps = max_steps;
    cfg.tol = tol;
    cfg.validate()?;
    let orbits = known_orbits(&params)?;
    let trajectories: Vec<Trajectory<f64>> = match (separatrices, &point.point) {
        (Some(o), _) => {
            let k = match o {
                OrbitArg::Hexagonal => 0,
                OrbitArg::Square => 1,
            };
            separatrix_search(&orbits[k], &params, &cfg)?
        }
        (None, Some(spec)) => vec![integrate(&parse_point(spec, point.branch)?, &params, &cfg)?],
        (None, None) => return Err(Failure::Usage("flow needs --point or --separatrices".into())),
    };
    fs::create_dir_all(out_dir)?;
    for (i, tr) in trajectories.iter().enumerate() {
        let csv = out_dir.join(format!("trajectory_{i:02}.csv"));
        write_csv(tr, fs::File::create(&csv)?)?;
        let fit = boundary_decay_rate(tr).ok();
        let last = tr.last();
        json_line(
            out,
            &FlowReport {
                csv,
                terminal: tr.terminal,
                samples: tr.samples.len(),
                t_end: last.t,
                l_min_end: last.l_min,
                decay_rate: fit.map(|f| f.rate),
                decay_r_squared: fit.map(|f| f.r_squared),
            },
        )?;
    }
    let critical: Vec<MarkovPoint<f64>> = orbits.iter().map(|c| c.point).collect();
    fs::write(out_dir.join("flow.svg"), render_svg(&trajectories, &critical)?)?;
    Ok(())
}

fn homology(input: Option<&Path>, fixture: Option<FixtureArg>, out: &mut dyn Write) -> Outcome {
    let (complex, action) = match (input, fixture) {
        (Some(path), _) => (MorseComplex::from_json(&fs::read_to_string(path)?)?, None),
        (None, Some(FixtureArg::M11cover)) => (m11_cover_complex(), Some(m11_deck_action())),
        (None, None) => return Err(Failure::Usage("homology needs --input or --fixture".into())),
    };
    writeln!(out, "{}", complex.homology()?)?;
    if let Some(action) = action {
        let rational = invariant_rational_homology(&complex, &action)?;
        let parts: Vec<String> = rational
            .iter()
            .enumerate()
            .map(|(k, &b)| match b {
                0 => format!("H{k}=0"),
                1 => format!("H{k}=Q"),
                b => format!("H{k}=Q^{b}"),
            })
            .collect();
        writeln!(out, "quotient over Q: {}", parts.join(" "))?;
    }
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Outcome {
    match &cli.command {
        Command::Enumerate { point, cutoff, out: path } => enumerate(point, *cutoff, path.as_deref(), out),
        Command::Syst { point, t, tail_tol } => syst(point, *t, *tail_tol, out),
        Command::Classify { point, json } => classify(point, *json, out),
        Command::FindCritical { point, t, census, seed, cluster_tol } => find(point, *t, *census, *seed, *cluster_tol, out),
        Command::Flow { point, t, metric, direction, separatrices, max_steps, tol, out_dir } => {
            flow(point, *t, *metric, *direction, *separatrices, *max_steps, *tol, out_dir, out)
        }
        Command::Homology { input, fixture } => homology(input.as_deref(), *fixture, out),
    }
}

/// Caps the global worker pool from [`THREADS_VAR`], once per process.
fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_VAR).ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        // a pool built earlier in the same process stays in place
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Runs the command line `args` (program name first), writing results to
/// `out` and diagnostics to `err`; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_DOMAIN } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    configure_threads();
    match dispatch(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_no_convergence() {
                EXIT_NO_CONVERGENCE
            } else {
                EXIT_DOMAIN
            }
        }
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_DOMAIN
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DOMAIN
        }
    }
}
