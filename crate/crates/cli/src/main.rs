//! Command-line front end: parse problem files, run the pipeline stages
//! individually or end to end, and emit machine-readable reports.

mod schema;

use clap::{Parser, Subcommand};
use gamma_interp::cpick::{self, PencilStatus};
use gamma_interp::diamond::{self, DiamondProblem};
use gamma_interp::gamma::RoyalStructure;
use gamma_interp::pipeline::{self, SolveStatus};
use gamma_interp::rational::BlaschkeProduct;
use gamma_interp::{c64, families, gamma, GridConfig, Tolerances};
use num_complex::Complex64;
use schema::{MapFile, ProblemFile};
use std::path::{Path, PathBuf};

const EXIT_OK: i32 = 0;
const EXIT_FAIL: i32 = 1;
const EXIT_PENCIL_FAILS: i32 = 2;
const EXIT_UNSOLVABLE_C1: i32 = 3;
const EXIT_INCONCLUSIVE: i32 = 4;
const EXIT_SUPERFICIAL: i32 = 5;
const EXIT_USAGE: i32 = 64;

#[derive(Parser)]
#[command(
    name = "gamma-interp",
    about = "3-point interpolation from the disc into the symmetrised bidisc",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan the pencil condition over degree-ν parameters.
    Check {
        problem: PathBuf,
        /// Highest parameter degree to scan (0 or 1).
        #[arg(long, default_value_t = 1)]
        nu: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the eigenvalue surface as <PLOT>_surface.csv.
        #[arg(long)]
        plot: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Inline JSON overriding grid resolutions.
        #[arg(long)]
        grid: Option<String>,
        /// Inline JSON overriding tolerances.
        #[arg(long)]
        tol: Option<String>,
    },
    /// Run the full solver.
    Solve {
        problem: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write <PLOT>_boundary.csv and <PLOT>_royal.csv.
        #[arg(long)]
        plot: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        tol: Option<String>,
    },
    /// Classify a rational map given by a map file.
    Classify {
        map: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        tol: Option<String>,
    },
    /// Pose and solve the mixed interior/boundary problem for p.
    Diamond {
        /// A problem file (with an m override or free search), or a
        /// serialized mixed-problem file.
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        tol: Option<String>,
    },
    /// Generate a named fixture: problem file plus reference map.
    Examples {
        /// ex52_1 | ex52_2 | ex52_3 | excaddy2 | excaddy3 | excaddy4 | surprise
        name: String,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        /// Complex parameter "re,im".
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        c: Option<f64>,
        /// Interpolation nodes "re,im;re,im;re,im".
        #[arg(long)]
        nodes: Option<String>,
        /// Output stem (default: the example name).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a candidate map against a problem file.
    Verify {
        map: PathBuf,
        problem: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        tol: Option<String>,
    },
}

fn main() {
    std::process::exit(run(Cli::parse()));
}

fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Check {
            problem,
            nu,
            out,
            plot,
            seed,
            grid,
            tol,
        } => cmd_check(&problem, nu, out, plot, seed, grid, tol),
        Command::Solve {
            problem,
            out,
            plot,
            seed,
            grid,
            tol,
        } => cmd_solve(&problem, out, plot, seed, grid, tol),
        Command::Classify { map, out, tol } => cmd_classify(&map, out, tol),
        Command::Diamond {
            file,
            out,
            seed,
            grid,
            tol,
        } => cmd_diamond(&file, out, seed, grid, tol),
        Command::Examples {
            name,
            r,
            alpha,
            a,
            c,
            nodes,
            out,
        } => cmd_examples(&name, r, alpha, a, c, nodes, out),
        Command::Verify {
            map,
            problem,
            out,
            grid,
            tol,
        } => cmd_verify(&map, &problem, out, grid, tol),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("cannot parse {}: {e}", path.display()))
}

fn emit<T: serde::Serialize>(value: &T, out: Option<&PathBuf>) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn usage_err(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

/// Settings come from the file's `overrides` block, then CLI flags on top.
fn effective_settings(
    pf: &ProblemFile,
    seed: Option<u64>,
    grid: Option<String>,
    tol: Option<String>,
) -> Result<(Tolerances, GridConfig), String> {
    let mut tols = pf.tolerances();
    let mut g = pf.grid();
    if let Some(t) = tol {
        tols = serde_json::from_str(&t).map_err(|e| format!("bad --tol: {e}"))?;
    }
    if let Some(gs) = grid {
        g = serde_json::from_str(&gs).map_err(|e| format!("bad --grid: {e}"))?;
    }
    if let Some(s) = seed {
        g.seed = s;
    }
    Ok((tols, g))
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    problem: &Path,
    nu: usize,
    out: Option<PathBuf>,
    plot: Option<PathBuf>,
    seed: Option<u64>,
    grid: Option<String>,
    tol: Option<String>,
) -> i32 {
    let pf: ProblemFile = match read_json(problem) {
        Ok(p) => p,
        Err(e) => return usage_err(&e),
    };
    let (tols, g) = match effective_settings(&pf, seed, grid, tol) {
        Ok(v) => v,
        Err(e) => return usage_err(&e),
    };
    let prob = match pf.to_problem(tols) {
        Ok(p) => p,
        Err(e) => return usage_err(&e),
    };
    if nu > 1 {
        return usage_err("--nu must be 0 or 1");
    }
    let report = cpick::check_c_nu(&prob, nu, &g);
    if let Some(stem) = plot {
        let surface = cpick::pencil_surface(&prob, nu, &g);
        let mut csv = String::from("c_theta,alpha_re,alpha_im,min_eig\n");
        for pt in surface {
            let (ar, ai) = pt
                .alpha
                .map(|[x, y]| (x.to_string(), y.to_string()))
                .unwrap_or_default();
            csv.push_str(&format!("{},{},{},{}\n", pt.c_theta, ar, ai, pt.min_eig));
        }
        if let Err(e) = std::fs::write(path_with(&stem, "_surface.csv"), csv) {
            return usage_err(&format!("cannot write surface: {e}"));
        }
    }
    if let Err(e) = emit(&report, out.as_ref()) {
        return usage_err(&e);
    }
    match report.status {
        PencilStatus::Fails => EXIT_PENCIL_FAILS,
        _ => EXIT_OK,
    }
}

fn path_with(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_solve(
    problem: &Path,
    out: Option<PathBuf>,
    plot: Option<PathBuf>,
    seed: Option<u64>,
    grid: Option<String>,
    tol: Option<String>,
) -> i32 {
    let pf: ProblemFile = match read_json(problem) {
        Ok(p) => p,
        Err(e) => return usage_err(&e),
    };
    let (tols, g) = match effective_settings(&pf, seed, grid, tol) {
        Ok(v) => v,
        Err(e) => return usage_err(&e),
    };
    let prob = match pf.to_problem(tols) {
        Ok(p) => p,
        Err(e) => return usage_err(&e),
    };
    let report = pipeline::solve_3pt(&prob, &pf.solve_options(), &g);
    if let (Some(stem), Some(h)) = (plot.as_ref(), report.h.as_ref()) {
        let n = g.s_bound_samples.max(64);
        let mut csv = String::from("theta,abs_s\n");
        for k in 0..n {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let v = h.s.eval(Complex64::from_polar(1.0, th)).norm();
            csv.push_str(&format!("{th},{v}\n"));
        }
        let mut royal =
            String::from("node_re,node_im,multiplicity,on_circle,target_re,target_im\n");
        if let Ok(RoyalStructure::Nodes(nodes)) = gamma::royal_nodes(h, &tols) {
            for nd in nodes {
                if let Some(w) = nd.point() {
                    let t = 0.5 * h.s.eval(w).conj();
                    royal.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        w.re,
                        w.im,
                        nd.multiplicity,
                        u8::from(nd.on_circle),
                        t.re,
                        t.im
                    ));
                }
            }
        }
        let w1 = std::fs::write(path_with(stem, "_boundary.csv"), csv);
        let w2 = std::fs::write(path_with(stem, "_royal.csv"), royal);
        if let Err(e) = w1.and(w2) {
            return usage_err(&format!("cannot write plots: {e}"));
        }
    }
    if let Err(e) = emit(&report, out.as_ref()) {
        return usage_err(&e);
    }
    match report.status {
        SolveStatus::Solved => EXIT_OK,
        SolveStatus::UnsolvableC1 => EXIT_UNSOLVABLE_C1,
        _ => EXIT_INCONCLUSIVE,
    }
}

fn cmd_classify(map: &Path, out: Option<PathBuf>, tol: Option<String>) -> i32 {
    let mf: MapFile = match read_json(map) {
        Ok(m) => m,
        Err(e) => return usage_err(&e),
    };
    let tols: Tolerances = match tol {
        Some(t) => match serde_json::from_str(&t) {
            Ok(v) => v,
            Err(e) => return usage_err(&format!("bad --tol: {e}")),
        },
        None => Tolerances::default(),
    };
    let h = match mf.to_map() {
        Ok(h) => h,
        Err(e) => return usage_err(&e),
    };
    match pipeline::classify(&h, &tols) {
        Ok(c) => {
            if emit(&c, out.as_ref()).is_err() {
                return EXIT_FAIL;
            }
            EXIT_OK
        }
        Err(pipeline::PipelineError::SuperficialMap) => {
            eprintln!("error: superficial map");
            EXIT_SUPERFICIAL
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAIL
        }
    }
}

#[derive(serde::Serialize)]
struct DiamondOutput {
    problem: DiamondProblem,
    feasibility: diamond::FeasibilityReport,
    p: Option<BlaschkeProduct>,
    error: Option<String>,
}

fn cmd_diamond(
    file: &Path,
    out: Option<PathBuf>,
    seed: Option<u64>,
    grid: Option<String>,
    tol: Option<String>,
) -> i32 {
    // accept either a serialized mixed problem or a problem file
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => return usage_err(&format!("cannot read {}: {e}", file.display())),
    };
    let mut tols = Tolerances::default();
    let mut g = GridConfig::default();
    let dp: DiamondProblem = if let Ok(dp) = serde_json::from_str::<DiamondProblem>(&text) {
        if let Some(t) = tol {
            match serde_json::from_str(&t) {
                Ok(v) => tols = v,
                Err(e) => return usage_err(&format!("bad --tol: {e}")),
            }
        }
        if let Some(gs) = grid {
            match serde_json::from_str(&gs) {
                Ok(v) => g = v,
                Err(e) => return usage_err(&format!("bad --grid: {e}")),
            }
        }
        if let Some(s) = seed {
            g.seed = s;
        }
        dp
    } else {
        let pf: ProblemFile = match serde_json::from_str(&text) {
            Ok(p) => p,
            Err(e) => return usage_err(&format!("cannot parse {}: {e}", file.display())),
        };
        let settings = match effective_settings(&pf, seed, grid, tol) {
            Ok(v) => v,
            Err(e) => return usage_err(&e),
        };
        tols = settings.0;
        g = settings.1;
        let prob = match pf.to_problem(tols) {
            Ok(p) => p,
            Err(e) => return usage_err(&e),
        };
        let opts = pf.solve_options();
        let (m, q) = match opts.fixed_m {
            Some(m) => {
                let q = match opts.fixed_q {
                    Some(q) => q,
                    None => match cpick::compute_q(&prob, &m)
                        .or_else(|_| cpick::refine_extremal_pair(&prob, &m).map(|(_, q)| q))
                    {
                        Ok(q) => q,
                        Err(e) => return usage_err(&format!("cannot derive q: {e}")),
                    },
                };
                (m, q)
            }
            None => {
                let rep = cpick::check_c_nu(&prob, 1, &g);
                match (rep.auxiliary_extremal, rep.q) {
                    (Some(m), Some(q)) => (m, q),
                    _ => {
                        return usage_err("no auxiliary extremal available; supply an m override")
                    }
                }
            }
        };
        match diamond::make_diamond(&prob, &m, &q) {
            Ok(dp) => dp,
            Err(e) => return usage_err(&format!("{e}")),
        }
    };
    let feasibility = diamond::diamond_feasible(&dp, &tols);
    let (p, error) = if feasibility.feasible {
        match diamond::diamond_solve(&dp, &tols, &g) {
            Ok(p) => (Some(p), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };
    let ok = p.is_some();
    let output = DiamondOutput {
        problem: dp,
        feasibility,
        p,
        error,
    };
    if let Err(e) = emit(&output, out.as_ref()) {
        return usage_err(&e);
    }
    if ok {
        EXIT_OK
    } else {
        EXIT_INCONCLUSIVE
    }
}

fn parse_complex(text: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = text.split(',').collect();
    match parts.as_slice() {
        [re] => Ok(c64(re.trim().parse().map_err(|e| format!("{e}"))?, 0.0)),
        [re, im] => Ok(c64(
            re.trim().parse().map_err(|e| format!("{e}"))?,
            im.trim().parse().map_err(|e| format!("{e}"))?,
        )),
        _ => Err(format!("cannot parse complex number {text:?}")),
    }
}

fn default_nodes() -> Vec<Complex64> {
    vec![c64(0.3, 0.0), c64(-0.2, 0.0), c64(0.0, 0.4)]
}

#[allow(clippy::too_many_arguments)]
fn cmd_examples(
    name: &str,
    r: Option<f64>,
    alpha: Option<f64>,
    a: Option<String>,
    c: Option<f64>,
    nodes: Option<String>,
    out: Option<PathBuf>,
) -> i32 {
    let nodes = match nodes {
        Some(text) => {
            let mut v = Vec::new();
            for part in text.split(';') {
                match parse_complex(part) {
                    Ok(z) => v.push(z),
                    Err(e) => return usage_err(&e),
                }
            }
            v
        }
        None => default_nodes(),
    };
    let a_param = match a.map(|t| parse_complex(&t)).transpose() {
        Ok(v) => v,
        Err(e) => return usage_err(&e),
    };
    let h = match name {
        "ex52_1" => families::ex52_1(r.unwrap_or(0.9)),
        "ex52_2" => families::ex52_2(r.unwrap_or(0.5)),
        "ex52_3" => {
            let zero = a_param.unwrap_or(c64(0.3, 0.0));
            match BlaschkeProduct::factor(zero) {
                Ok(f) => families::ex52_3(&f),
                Err(e) => return usage_err(&format!("{e}")),
            }
        }
        "excaddy2" => match families::excaddy2(alpha.unwrap_or(0.5)) {
            Ok(h) => h,
            Err(e) => return usage_err(&format!("{e}")),
        },
        "excaddy3" => match families::excaddy3(alpha.unwrap_or(-1.0 / 3.0f64.sqrt())) {
            Ok(h) => h,
            Err(e) => return usage_err(&format!("{e}")),
        },
        "excaddy4" => match families::excaddy4(alpha.unwrap_or(1.0 / 3.0)) {
            Ok(h) => h,
            Err(e) => return usage_err(&format!("{e}")),
        },
        "surprise" => families::surprise(a_param.unwrap_or(c64(0.5, 0.0)), c.unwrap_or(1.0)),
        other => return usage_err(&format!("unknown example name {other:?}")),
    };
    let tols = Tolerances::default();
    let prob = match cpick::InterpProblem::from_map(&h, &nodes, tols) {
        Ok(p) => p,
        Err(e) => return usage_err(&format!("{e}")),
    };
    let stem = out.unwrap_or_else(|| PathBuf::from(name));
    let pf = ProblemFile::from_problem(&prob);
    let mf = MapFile::from_map(&h);
    let p1 = path_with(&stem, "_problem.json");
    let p2 = path_with(&stem, "_map.json");
    if let Err(e) = emit(&pf, Some(&p1)).and(emit(&mf, Some(&p2))) {
        return usage_err(&e);
    }
    println!("wrote {} and {}", p1.display(), p2.display());
    EXIT_OK
}

fn cmd_verify(
    map: &Path,
    problem: &Path,
    out: Option<PathBuf>,
    grid: Option<String>,
    tol: Option<String>,
) -> i32 {
    let mf: MapFile = match read_json(map) {
        Ok(m) => m,
        Err(e) => return usage_err(&e),
    };
    let pf: ProblemFile = match read_json(problem) {
        Ok(p) => p,
        Err(e) => return usage_err(&e),
    };
    let (tols, g) = match effective_settings(&pf, None, grid, tol) {
        Ok(v) => v,
        Err(e) => return usage_err(&e),
    };
    let prob = match pf.to_problem(tols) {
        Ok(p) => p,
        Err(e) => return usage_err(&e),
    };
    let h = match mf.to_map() {
        Ok(h) => h,
        Err(e) => return usage_err(&e),
    };
    let report = pipeline::verify_interpolant(&h, &prob, &g);
    let pass = report.pass;
    if let Err(e) = emit(&report, out.as_ref()) {
        return usage_err(&e);
    }
    if pass {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}
