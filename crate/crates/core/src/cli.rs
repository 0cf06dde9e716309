//! Command-line front end. Exit codes: 0 ok, 2 parse, 3 validation,
//! 4 divergent coupling, 5 numerics (including a failed certificate).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde::Deserialize;

use crate::bimoment::RecurrenceSystem;
use crate::config::Tolerances;
use crate::contour::{build_contours, contour_dump};
use crate::error::Error;
use crate::favard::{favard_reconstruct, favard_verify};
use crate::quadrature::{asymptotic_check, rank_certificate, FunctionalHandle};
use crate::semiclassical::{recurrence_residual, validate_spec, SemiclassicalSpec, SpecWire};
use crate::serde_complex::poly_from_wire;
use crate::weight::{build_weight, WeightSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_DIVERGENT: i32 = 4;
pub const EXIT_NUMERICS: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "bimoment", version, about = "Bilinear semiclassical moment functionals")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the degree assumptions and report the bi-class.
    Validate { spec: PathBuf },
    /// Bimoment table of one fundamental functional as CSV.
    Moments {
        spec: PathBuf,
        /// Contour index for x (1-based).
        #[arg(long, default_value_t = 1)]
        contour_x: usize,
        /// Contour index for y (1-based).
        #[arg(long, default_value_t = 1)]
        contour_y: usize,
        #[arg(long, default_value_t = 8)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank certificate, recurrence residuals and asymptotics.
    Certify {
        spec: PathBuf,
        #[arg(long, default_value_t = 3)]
        order: usize,
    },
    /// Contour polylines of one marginal as JSON.
    Contours {
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = Marginal::X)]
        marginal: Marginal,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bimoment table reconstructed from recurrence coefficients.
    Favard {
        rec: PathBuf,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Marginal {
    X,
    Y,
}

/// Spec file: the four polynomials plus optional 1-based contour lists.
#[derive(Deserialize)]
struct ProblemFile {
    #[serde(flatten)]
    spec: SpecWire,
    #[serde(default)]
    contours_x: Option<Vec<usize>>,
    #[serde(default)]
    contours_y: Option<Vec<usize>>,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), message: e.to_string() }
    }
}

type Outcome = std::result::Result<String, Failure>;

fn parse_failure(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_PARSE, message: msg.into() }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invalid(_) => EXIT_PARSE,
        Error::DivergentCoupling => EXIT_DIVERGENT,
        Error::QuadratureStall(_)
        | Error::DivergentTail
        | Error::Singular
        | Error::SingularFrontier(_)
        | Error::InconsistentSeed { .. }
        | Error::DegenerateMinor(_)
        | Error::StokesProximity(_)
        | Error::SaddleCollision => EXIT_NUMERICS,
        _ => EXIT_VALIDATION,
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| parse_failure(format!("{}: {e}", path.display())))
}

fn load_problem(path: &Path) -> std::result::Result<(SemiclassicalSpec<f64>, ProblemFile), Failure> {
    let text = read(path)?;
    let file: ProblemFile = serde_json::from_str(&text).map_err(|e| parse_failure(format!("{}: {e}", path.display())))?;
    let w = &file.spec;
    let spec = validate_spec(&poly_from_wire(&w.a1), &poly_from_wire(&w.b1), &poly_from_wire(&w.a2), &poly_from_wire(&w.b2))?;
    Ok((spec, file))
}

fn fmt_c(z: C64) -> String {
    format!("{:.16e},{:.16e}", z.re, z.im)
}

fn emit(text: String, out: Option<&PathBuf>) -> Outcome {
    match out {
        Some(p) => {
            std::fs::write(p, &text).map_err(|e| Failure { code: EXIT_NUMERICS, message: format!("{}: {e}", p.display()) })?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn cmd_validate(path: &Path) -> Outcome {
    let (spec, _) = load_problem(path)?;
    let mut s = String::new();
    let deg = |p: &crate::poly::CPoly<f64>| p.degree().map_or("-inf".to_string(), |d| d.to_string());
    let _ = writeln!(s, "degrees A1={} B1={} A2={} B2={}", deg(spec.a1()), deg(spec.b1()), deg(spec.a2()), deg(spec.b2()));
    let (s1, s2) = spec.bi_class();
    let _ = writeln!(s, "case {:?}, s1={s1} s2={s2} M={}", spec.case(), s1 * s2);
    let _ = writeln!(s, "assumption A: ok");
    if let Some(d) = spec.determinant() {
        let _ = writeln!(s, "leading-coefficient determinant: {}", fmt_c(d));
    }
    if spec.reducible().is_empty() {
        let _ = writeln!(s, "assumption B: ok");
    } else {
        for (i, c) in spec.reducible() {
            let _ = writeln!(s, "assumption B: A{i}, B{i} share the root {} (reducible)", fmt_c(*c));
        }
    }
    Ok(s)
}

fn pick(list: &Option<Vec<usize>>, count: usize) -> std::result::Result<Vec<usize>, Failure> {
    match list {
        None => Ok((0..count).collect()),
        Some(v) => v
            .iter()
            .map(|&i| {
                if i == 0 || i > count {
                    Err(Failure { code: EXIT_VALIDATION, message: format!("contour index {i} outside 1..={count}") })
                } else {
                    Ok(i - 1)
                }
            })
            .collect(),
    }
}

fn cmd_moments(path: &Path, i: usize, j: usize, order: usize, out: Option<&PathBuf>) -> Outcome {
    let (spec, _) = load_problem(path)?;
    let (s1, s2) = spec.bi_class();
    let i = pick(&Some(vec![i]), s1)?[0];
    let j = pick(&Some(vec![j]), s2)?[0];
    let h = FunctionalHandle::new(&spec, i, j)?;
    let t = h.bimoment_table(order)?;
    let mut s = String::new();
    let _ = writeln!(s, "# functional L_{}{} order {order}", i + 1, j + 1);
    let _ = writeln!(s, "# recurrence residual {:.16e}", recurrence_residual(&spec, &t));
    let _ = writeln!(s, "n,m,re,im,err");
    for n in 0..=order {
        for m in 0..=order {
            let _ = writeln!(s, "{n},{m},{},{:.16e}", fmt_c(t.get(n, m)), t.error(n, m));
        }
    }
    emit(s, out)
}

fn asymptotic_line(name: &str, w: &WeightSpec) -> String {
    if !w.singularities.is_empty() {
        return format!("asymptotics {name}: skipped (finite singularities)\n");
    }
    let d = w.d as f64;
    let arg = -std::f64::consts::PI / (4.0 * (d + 1.0));
    let zs: Vec<C64> = [20.0, 30.0, 40.0].iter().map(|&r| C64::from_polar(r, arg)).collect();
    match asymptotic_check(w, 0, &zs) {
        Ok(rep) => {
            let ratios: Vec<String> = rep.points.iter().map(|p| format!("{:.6}", p.ratio)).collect();
            let slope = rep.slope.map_or("n/a".to_string(), |v| format!("{v:.3}"));
            format!("asymptotics {name}: ratios [{}] slope {slope} {}\n", ratios.join(", "), if rep.pass { "pass" } else { "fail" })
        }
        Err(Error::NotNormalized) => format!("asymptotics {name}: skipped (potential not normalized)\n"),
        Err(e) => format!("asymptotics {name}: skipped ({e})\n"),
    }
}

fn cmd_certify(path: &Path, order: usize) -> Outcome {
    let (spec, file) = load_problem(path)?;
    let (s1, s2) = spec.bi_class();
    let xs = pick(&file.contours_x, s1)?;
    let ys = pick(&file.contours_y, s2)?;
    let tol = Tolerances::from_env();
    let mut s = String::new();
    let mut tables = Vec::new();
    let mut residuals_ok = true;
    for &i in &xs {
        for &j in &ys {
            let t = FunctionalHandle::new(&spec, i, j)?.bimoment_table(order)?;
            let r = recurrence_residual(&spec, &t);
            residuals_ok &= r <= tol.recurrence;
            let _ = writeln!(s, "L_{}{} residual {r:.16e}", i + 1, j + 1);
            tables.push(t);
        }
    }
    let cert = rank_certificate(&tables, tol.rank);
    let m = s1 * s2;
    let _ = writeln!(s, "rank {}/{m} (rows {})", cert.rank, cert.rows);
    let _ = writeln!(s, "sigma ratio {:.16e}", cert.ratio);
    s.push_str(&asymptotic_line("x", &build_weight(spec.a1(), spec.b1())?));
    s.push_str(&asymptotic_line("y", &build_weight(spec.a2(), spec.b2())?));
    if cert.rank == m && cert.rows == m && residuals_ok {
        let _ = writeln!(s, "certificate: pass");
        Ok(s)
    } else {
        let _ = writeln!(s, "certificate: fail");
        Err(Failure { code: EXIT_NUMERICS, message: s })
    }
}

fn cmd_contours(path: &Path, marginal: Marginal, out: Option<&PathBuf>) -> Outcome {
    let (spec, _) = load_problem(path)?;
    let w = match marginal {
        Marginal::X => build_weight(spec.a1(), spec.b1())?,
        Marginal::Y => build_weight(spec.a2(), spec.b2())?,
    };
    let cs = build_contours(&w)?;
    let dump = contour_dump(&w, &cs)?;
    emit(serde_json::to_string_pretty(&dump).expect("serializable") + "\n", out)
}

fn cmd_favard(path: &Path, order: Option<usize>, out: Option<&PathBuf>) -> Outcome {
    let text = read(path)?;
    let rec = RecurrenceSystem::<f64>::from_json(&text)?;
    let size = order.unwrap_or(rec.len());
    let t = favard_reconstruct(&rec, size)?;
    let r = favard_verify(&rec, &t)?;
    let mut s = String::new();
    let _ = writeln!(s, "# roundtrip residual {r:.16e}");
    let _ = writeln!(s, "n,m,re,im");
    for n in 0..=size {
        for m in 0..=size {
            let _ = writeln!(s, "{n},{m},{}", fmt_c(t.get(n, m)));
        }
    }
    emit(s, out)
}

/// Run the CLI on `args` (including the program name); returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let result = match &cli.cmd {
        Command::Validate { spec } => cmd_validate(spec),
        Command::Moments { spec, contour_x, contour_y, order, out } => cmd_moments(spec, *contour_x, *contour_y, *order, out.as_ref()),
        Command::Certify { spec, order } => cmd_certify(spec, *order),
        Command::Contours { spec, marginal, out } => cmd_contours(spec, *marginal, out.as_ref()),
        Command::Favard { rec, order, out } => cmd_favard(rec, *order, out.as_ref()),
    };
    match result {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message.trim_end());
            f.code
        }
    }
}
