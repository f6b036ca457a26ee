//! `exdisc`: analyze point sets, write grids, run verification campaigns and
//! export distribution profiles. Exit codes: 0 success, 1 violation found,
//! 2 usage or parse error, 3 I/O error.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use exdisc_core::distribution::{
    dist_d, dist_dtilde, grid_profile_d, grid_profile_dtilde, profile_csv, profile_table,
};
use exdisc_core::norms::{lorentz_norm_pow, lp_norm_pow, parse_exponent, psi_norm};
use exdisc_core::rational::{fmt_q, parse_q, to_f64};
use exdisc_core::verify::campaign;
use exdisc_core::{
    ClosedForms, CheckKind, DistributionProfile, GridClass, NormValue, PiecewisePoly, PointSet,
    PsiSpec, Q,
};

#[derive(Parser)]
#[command(name = "exdisc", version, about = "Exact discrepancy, distribution and norm toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Input {
    /// Point-set JSON file, or `-` for stdin.
    input: Option<PathBuf>,
    /// Inline points, comma separated (e.g. `1/4,3/4` or `0.25,0.75`).
    #[arg(long, conflicts_with = "input")]
    points: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed forms, density, profiles and norms of one point set.
    Analyze {
        #[command(flatten)]
        input: Input,
        /// L_p exponents (repeatable); Lorentz norms use them with `--q`.
        #[arg(long = "p", default_values = ["2"])]
        p: Vec<String>,
        /// Lorentz second exponent.
        #[arg(long = "q")]
        q: Option<String>,
        /// ψ preset (`power:k`, `taylor:k`, `huber`, `mixed`) or inline JSON.
        #[arg(long)]
        psi: Option<String>,
        /// Bisection tolerance for ψ-norms.
        #[arg(long, default_value = "1e-12")]
        tol: String,
        /// Add rounded decimal values next to the exact ones.
        #[arg(long)]
        decimal: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write the centered grid, or a translated grid with `--delta`.
    Grid {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a seeded verification campaign.
    Verify {
        /// charest, main, riesz, nconv, thm1, thm2 or all.
        #[arg(long, default_value = "all")]
        check: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long = "n-max", default_value_t = 30)]
        n_max: usize,
        /// Write the JSON summary here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Distribution profile CSV: alpha, F, grid F, gap.
    Export {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Which::D)]
        which: Which,
        /// Split each gap between breakpoints into this many parts.
        #[arg(long, default_value_t = 4)]
        refine: usize,
        #[arg(long)]
        decimal: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    D,
    Dtilde,
}

/// An error with its exit code.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

fn usage(err: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 2,
        err: err.into(),
    }
}

fn io_err(err: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 3,
        err: err.into(),
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Analyze {
            input,
            p,
            q,
            psi,
            tol,
            decimal,
            output,
        } => {
            let set = read_points(&input)?;
            let opts = NormOptions::parse(&p, q.as_deref(), psi.as_deref(), &tol)?;
            let report = analyze(&set, &opts, decimal).map_err(usage)?;
            emit(output.as_deref(), &to_json(&report))?;
            Ok(0)
        }
        Command::Grid { n, delta, output } => {
            if n == 0 {
                return Err(usage(anyhow!("--n must be at least 1")));
            }
            let set = match delta {
                None => PointSet::centered_grid(n),
                Some(d) => {
                    let d = parse_q(&d).map_err(usage)?;
                    PointSet::translated_grid(n, &d).map_err(usage)?
                }
            };
            emit(output.as_deref(), &format!("{}\n", set.to_json()))?;
            Ok(0)
        }
        Command::Verify {
            check,
            trials,
            seed,
            n_max,
            json,
        } => {
            let checks = CheckKind::parse_set(&check).map_err(usage)?;
            if n_max == 0 {
                return Err(usage(anyhow!("--n-max must be at least 1")));
            }
            let summary = campaign(seed, trials, n_max, &checks);
            let text = format!("{}\n", summary.to_json());
            match json {
                Some(path) => {
                    write_file(&path, &text)?;
                    for (c, t) in &summary.tallies {
                        eprintln!(
                            "{c}: {} run, {} strict, {} equality, {} violations, {} inconsistent, {} errors",
                            t.run, t.holds, t.equality, t.violations, t.inconsistent, t.errors
                        );
                    }
                }
                None => emit(None, &text)?,
            }
            Ok(if summary.ok() { 0 } else { 1 })
        }
        Command::Export {
            input,
            which,
            refine,
            decimal,
            output,
        } => {
            let set = read_points(&input)?;
            let (profile, grid) = match which {
                Which::D => (dist_d(&set), grid_profile_d()),
                Which::Dtilde => (dist_dtilde(&set), grid_profile_dtilde()),
            };
            let rows = profile_table(&profile, &grid, refine);
            emit(output.as_deref(), &profile_csv(&rows, decimal))?;
            Ok(0)
        }
    }
}

fn read_points(input: &Input) -> CliResult<PointSet> {
    if let Some(list) = &input.points {
        let items: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        return PointSet::parse(&items).map_err(usage);
    }
    let path = input
        .input
        .as_ref()
        .ok_or_else(|| usage(anyhow!("give a point-set file, `-` for stdin, or --points")))?;
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")
            .map_err(io_err)?;
        s
    } else {
        fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(io_err)?
    };
    PointSet::from_json(&text).map_err(usage)
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(io_err)
}

fn emit(output: Option<&Path>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => write_file(path, text),
        None => io::stdout()
            .write_all(text.as_bytes())
            .context("writing stdout")
            .map_err(io_err),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("reports serialize"))
}

struct NormOptions {
    ps: Vec<Q>,
    q: Option<Q>,
    psi: Option<PsiSpec>,
    tol: Q,
}

impl NormOptions {
    fn parse(ps: &[String], q: Option<&str>, psi: Option<&str>, tol: &str) -> CliResult<Self> {
        let ps = ps
            .iter()
            .map(|p| parse_exponent(p))
            .collect::<Result<Vec<_>, _>>()
            .map_err(usage)?;
        let q = q.map(parse_exponent).transpose().map_err(usage)?;
        let psi = psi.map(PsiSpec::parse).transpose().map_err(usage)?;
        let tol = parse_q(tol).map_err(usage)?;
        if tol <= Q::from_integer(0.into()) {
            return Err(usage(anyhow!("--tol must be positive")));
        }
        Ok(NormOptions { ps, q, psi, tol })
    }
}

#[derive(Serialize)]
struct Classification {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<String>,
}

#[derive(Serialize)]
struct NormEntry {
    function: &'static str,
    norm: String,
    value: NormValue,
}

#[derive(Serialize)]
struct AnalyzeReport {
    points: Vec<String>,
    n: usize,
    classification: Classification,
    closed_forms: ClosedForms,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_forms_decimal: Option<serde_json::Value>,
    density: PiecewisePoly,
    profile_d: DistributionProfile,
    profile_dtilde: DistributionProfile,
    norms: Vec<NormEntry>,
}

fn analyze(set: &PointSet, opts: &NormOptions, decimal: bool) -> anyhow::Result<AnalyzeReport> {
    let classification = match set.classify() {
        GridClass::CenteredGrid => Classification {
            kind: "centered_grid",
            delta: None,
        },
        GridClass::TranslatedGrid(d) => Classification {
            kind: "translated_grid",
            delta: Some(fmt_q(&d)),
        },
        GridClass::Other => Classification {
            kind: "other",
            delta: None,
        },
    };
    let closed = ClosedForms::of(set);
    let closed_forms_decimal = decimal.then(|| {
        serde_json::json!({
            "star": to_f64(&closed.star),
            "l2_sq": to_f64(&closed.l2_sq),
            "extreme_star": to_f64(&closed.extreme_star),
            "extreme_l2_sq_triangle": to_f64(&closed.extreme_l2_sq_triangle),
            "extreme_l2_sq_square": to_f64(&closed.extreme_l2_sq_square),
        })
    });
    let profile_d = dist_d(set);
    let profile_dtilde = dist_dtilde(set);
    let mut norms = Vec::new();
    for (function, profile) in [("D", &profile_d), ("Dtilde", &profile_dtilde)] {
        for p in &opts.ps {
            norms.push(NormEntry {
                function,
                norm: format!("lp_pow(p={})", fmt_q(p)),
                value: lp_norm_pow(profile, p)?,
            });
            if let Some(q) = &opts.q {
                norms.push(NormEntry {
                    function,
                    norm: format!("lorentz_pow(p={},q={})", fmt_q(p), fmt_q(q)),
                    value: lorentz_norm_pow(profile, p, q)?,
                });
            }
        }
        if let Some(psi) = &opts.psi {
            norms.push(NormEntry {
                function,
                norm: format!("psi({})", psi.name),
                value: psi_norm(profile, psi, &opts.tol)?.value(),
            });
        }
    }
    Ok(AnalyzeReport {
        points: set.points().iter().map(fmt_q).collect(),
        n: set.len(),
        classification,
        closed_forms: closed,
        closed_forms_decimal,
        density: exdisc_core::distribution::density_of_d(set).density,
        profile_d,
        profile_dtilde,
        norms,
    })
}
