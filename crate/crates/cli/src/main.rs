//! `riflab`: command-line front end for the RIF laboratory.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;
use serde_json::json;

use riflab::analysis::{self, AnalysisConfig};
use riflab::boundary::{self, ContactConfig};
use riflab::halfplane::{self, TraceConfig};
use riflab::kernels::{self, AglerVectors, DougConfig, DougTarget, LocalConfig};
use riflab::norms::{self, QuadConfig};
use riflab::poly2::{inv_series, PolyJson};
use riflab::registry;
use riflab::rif::RifJson;
use riflab::{Axis, Error, Rif};

#[derive(Parser)]
#[command(name = "riflab", version, about = "Numerical laboratory for rational inner functions on the bidisk")]
#[command(after_help = "Exit codes: 0 ok, 1 parse error, 2 validation failure, 3 numerical failure.\n\
Input polynomials use {\"m\": int, \"n\": int, \"coeffs\": [[[re, im], ...], ...]}, rows indexed by the z1 degree.")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Input {
    /// Polynomial JSON file for the denominator p.
    path: Option<PathBuf>,
    /// Registry entry instead of a file: favorite, amy, psi, continuous, monomial.
    #[arg(long, conflicts_with = "path")]
    example: Option<String>,
}

#[derive(Args, Clone)]
struct Common {
    /// Grid size: scan angles, first quadrature level or first Doug level, per command.
    #[arg(long)]
    grid: Option<usize>,
    /// Tolerance: relative quadrature tolerance or singular residual, per command.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Emit JSON (the default for every command).
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV where the command documents a table.
    #[arg(long)]
    csv: bool,
    /// Truncation order for coefficient computations.
    #[arg(long)]
    max_order: Option<usize>,
    /// Write output to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full report: singularities, contact orders, memberships, H^1 check, Dirichlet verdicts.
    Analyze {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
        /// Agler vectors JSON {"E1": [...], "F2": [...]}; registry entries use their own.
        #[arg(long)]
        agler: Option<PathBuf>,
        /// Isotropic Dirichlet weights.
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        /// Exponents for the derivative H^p checks.
        #[arg(long, value_delimiter = ',')]
        exponents: Option<Vec<f64>>,
    },
    /// Contact orders at every singularity.
    #[command(after_help = "CSV columns: singularity,tau1_arg,tau2_arg,axis,side,delta,epsilon")]
    Contact {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// H^p norm of a partial derivative by graded boundary quadrature.
    #[command(after_help = "CSV columns: grid,estimate,extrapolated")]
    Hpnorm {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        axis: u8,
        #[arg(long)]
        p: f64,
    },
    /// Weighted coefficient sums and tail verdict for phi, or for 1/p with --inverse.
    #[command(after_help = "CSV columns: n,annular_sum")]
    Dirichlet {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
        /// Isotropic weight; overridden per axis by --alpha1/--alpha2.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        alpha1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        alpha2: Option<f64>,
        #[arg(long)]
        inverse: bool,
    },
    /// Common zeros of p and p~ on the torus.
    #[command(after_help = "CSV columns: tau1_re,tau1_im,tau2_re,tau2_im,residual_p,residual_ptilde,cluster_size")]
    Singularities {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// Residuals of |p|^2 - |p~|^2 = (1-|z1|^2)|E1|^2 + (1-|z2|^2)|F2|^2 at seeded points.
    VerifyAgler {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        agler: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Local Dirichlet integral at a point, in boundary and kernel forms.
    LocalDirichlet {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        agler: Option<PathBuf>,
        /// First coordinate as re,im.
        #[arg(long, allow_hyphen_values = true)]
        z1: String,
        /// Second coordinate as re,im.
        #[arg(long, allow_hyphen_values = true)]
        z2: String,
    },
    /// Doug functional by boundary quadrature, beside the coefficient formula.
    #[command(after_help = "CSV columns: grid,estimate")]
    Doug {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// Pick function f = i(1 - phi(beta(w)))/(1 + phi(beta(w))) as polynomial data.
    Pick {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// Real level curve of the Pick function.
    #[command(after_help = "CSV columns: x,y,residual")]
    TraceLevel {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
        /// Start point as x,y.
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        /// Level; defaults to the value at the start point.
        #[arg(long, allow_hyphen_values = true)]
        level: Option<f64>,
        /// Preferred initial direction as dx,dy.
        #[arg(long, allow_hyphen_values = true)]
        heading: Option<String>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        bound: Option<f64>,
    },
    /// Taylor coefficients of phi.
    #[command(after_help = "CSV columns: k,l,re,im")]
    Taylor {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// RIF construction.
    Rif {
        #[command(subcommand)]
        cmd: RifCmd,
    },
}

#[derive(Subcommand)]
enum RifCmd {
    /// Validate p and print p, p~ and the bidegree.
    New {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoConvergence { .. }
            | Error::InsufficientSamples { .. }
            | Error::DegenerateSlice(_)
            | Error::DenominatorVanishes(_)
            | Error::SingularEvaluationPoint
            | Error::FlatGradient => 3,
            _ => 2,
        };
        Failure { code, err: e.into() }
    }
}

fn parse_failure(err: anyhow::Error) -> Failure {
    Failure { code: 1, err }
}

type Out = Result<String, Failure>;

struct Loaded {
    name: Option<String>,
    json: PolyJson,
    phi: Rif,
}

fn load_poly(input: &Input) -> Result<(Option<String>, PolyJson), Failure> {
    match (&input.path, &input.example) {
        (_, Some(name)) => match registry::entry(name) {
            Some(e) => Ok((Some(e.name.to_string()), e.p)),
            None => Err(Failure {
                code: 2,
                err: anyhow::anyhow!("unknown example {name:?}; known: {}", registry::NAMES.join(", ")),
            }),
        },
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(parse_failure)?;
            let json: PolyJson = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))
                .map_err(parse_failure)?;
            Ok((None, json))
        }
        (None, None) => Err(parse_failure(anyhow::anyhow!("give a polynomial file or --example"))),
    }
}

fn load(input: &Input) -> Result<Loaded, Failure> {
    let (name, json) = load_poly(input)?;
    let p = json.to_poly()?;
    let phi = Rif::with_bidegree(p, json.declared_bidegree())?;
    Ok(Loaded { name, json, phi })
}

fn load_agler(path: &Option<PathBuf>, name: &Option<String>) -> Result<Option<AglerVectors>, Failure> {
    if let Some(path) = path {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(parse_failure)?;
        let v: AglerVectors = serde_json::from_str(&text)
            .with_context(|| format!("parsing {}", path.display()))
            .map_err(parse_failure)?;
        return Ok(Some(v));
    }
    Ok(name
        .as_deref()
        .and_then(registry::entry)
        .and_then(|e| e.expected.agler_vectors))
}

fn require_agler(v: Option<AglerVectors>) -> Result<AglerVectors, Failure> {
    v.ok_or_else(|| Failure {
        code: 2,
        err: anyhow::anyhow!("no Agler vectors: pass --agler FILE"),
    })
}

fn parse_pair(s: &str, what: &str) -> Result<[f64; 2], Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(parse_failure(anyhow::anyhow!("{what}: expected two comma-separated numbers, got {s:?}")));
    }
    let a = parts[0].parse::<f64>().with_context(|| format!("{what}: {s:?}")).map_err(parse_failure)?;
    let b = parts[1].parse::<f64>().with_context(|| format!("{what}: {s:?}")).map_err(parse_failure)?;
    Ok([a, b])
}

fn parse_axis(a: u8) -> Result<Axis, Failure> {
    match a {
        1 => Ok(Axis::One),
        2 => Ok(Axis::Two),
        _ => Err(Failure {
            code: 2,
            err: anyhow::anyhow!("axis must be 1 or 2"),
        }),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Out {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| Failure { code: 3, err: e.into() })
}

fn finite_or_inf(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!("inf")
    }
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

fn quad_config(common: &Common) -> QuadConfig {
    let mut cfg = QuadConfig::default();
    if let Some(g) = common.grid {
        cfg.ladder = (0..4).map(|k| g << k).collect();
    }
    if let Some(t) = common.tol {
        cfg.rel_tol = t;
    }
    cfg
}

fn contact_config(common: &Common) -> ContactConfig {
    let mut cfg = ContactConfig::default();
    if let Some(g) = common.grid {
        cfg.scan.angles = g;
    }
    if let Some(t) = common.tol {
        cfg.scan.tol_singular = t;
    }
    cfg
}

fn run(cli: Cli) -> Out {
    match cli.cmd {
        Cmd::Analyze {
            input,
            common,
            agler,
            alphas,
            exponents,
        } => {
            let l = load(&input)?;
            let v = load_agler(&agler, &l.name)?;
            let mut cfg = AnalysisConfig {
                contact: contact_config(&common),
                quad: quad_config(&common),
                seed: common.seed,
                ..AnalysisConfig::default()
            };
            // The scan settings feed both the contact fit and the quadrature windows.
            cfg.quad.scan = cfg.contact.scan;
            if let Some(n) = common.max_order {
                cfg.dirichlet_order = n;
            }
            if let Some(a) = alphas {
                cfg.dirichlet_alphas = a;
            }
            if let Some(e) = exponents {
                cfg.hp_exponents = e;
            }
            let report = analysis::analyze(&l.phi, l.json, l.name, v, &cfg)?;
            to_json(&report)
        }
        Cmd::Contact { input, common } => {
            let l = load(&input)?;
            let report = boundary::contact_report(&l.phi, &contact_config(&common))?;
            if common.csv {
                let mut rows = Vec::new();
                for (i, fit) in report.per_singularity.iter().enumerate() {
                    let s = i / 2;
                    for smp in &fit.samples {
                        rows.push(format!(
                            "{s},{},{},{},{},{:e},{:e}",
                            fit.tau.angles[0], fit.tau.angles[1], fit.axis, smp.side, smp.delta, smp.epsilon
                        ));
                    }
                }
                Ok(csv("singularity,tau1_arg,tau2_arg,axis,side,delta,epsilon", rows))
            } else {
                to_json(&report)
            }
        }
        Cmd::Hpnorm { input, common, axis, p } => {
            let l = load(&input)?;
            let axis = parse_axis(axis)?;
            let cfg = quad_config(&common);
            let sings = boundary::find_singularities(&l.phi, &cfg.scan);
            let contact = boundary::contact_report_at(&l.phi, sings, &boundary::FitConfig::default())?;
            if !(p > 0.0) {
                return Err(Error::InvalidExponent(p).into());
            }
            let cell = analysis::hp_cell(&l.phi, &contact, axis, p, &cfg)?;
            if common.csv {
                let q = match &cell.quadrature {
                    Some(q) => q,
                    None => return Ok(csv("grid,estimate,extrapolated", [])),
                };
                let rows = q
                    .levels
                    .iter()
                    .zip(&q.extrapolated)
                    .map(|((n, v), e)| format!("{n},{v:.17e},{e:.17e}"));
                Ok(csv("grid,estimate,extrapolated", rows))
            } else {
                to_json(&json!({
                    "axis": axis,
                    "p": p,
                    "k": contact.k(axis),
                    "threshold": finite_or_inf(contact.hp_threshold(axis)),
                    "borderline": analysis::is_borderline(p, contact.hp_threshold(axis)),
                    "result": cell,
                }))
            }
        }
        Cmd::Dirichlet {
            input,
            common,
            alpha,
            alpha1,
            alpha2,
            inverse,
        } => {
            let l = load(&input)?;
            let order = common.max_order.unwrap_or(512);
            let weights = [alpha1.unwrap_or(alpha), alpha2.unwrap_or(alpha)];
            let series = if inverse {
                inv_series(l.phi.p(), order)?
            } else {
                l.phi.taylor(order)?
            };
            let tail = norms::dirichlet_partial(&series, weights, order);
            if common.csv {
                let rows = tail.annular_sums.iter().map(|(n, t)| format!("{n},{t:.17e}"));
                Ok(csv("n,annular_sum", rows))
            } else {
                to_json(&json!({
                    "target": if inverse { "inverse_denominator" } else { "phi" },
                    "order": order,
                    "tail": tail,
                }))
            }
        }
        Cmd::Singularities { input, common } => {
            let l = load(&input)?;
            let sings = boundary::find_singularities(&l.phi, &contact_config(&common).scan);
            if common.csv {
                let rows = sings.iter().map(|s| {
                    format!(
                        "{},{},{},{},{:e},{:e},{}",
                        s.tau[0].re, s.tau[0].im, s.tau[1].re, s.tau[1].im, s.residual_p, s.residual_ptilde, s.cluster_size
                    )
                });
                Ok(csv("tau1_re,tau1_im,tau2_re,tau2_im,residual_p,residual_ptilde,cluster_size", rows))
            } else {
                to_json(&sings)
            }
        }
        Cmd::VerifyAgler {
            input,
            common,
            agler,
            samples,
        } => {
            let l = load(&input)?;
            let v = require_agler(load_agler(&agler, &l.name)?)?;
            let stats = kernels::verify_agler_rif(&l.phi, &v, samples, common.seed);
            to_json(&json!({
                "seed": common.seed,
                "fits_bidegree": v.fits_bidegree(l.phi.bidegree().0, l.phi.bidegree().1),
                "residuals": stats,
            }))
        }
        Cmd::LocalDirichlet {
            input,
            common,
            agler,
            z1,
            z2,
        } => {
            let l = load(&input)?;
            let a = parse_pair(&z1, "--z1")?;
            let b = parse_pair(&z2, "--z2")?;
            let z = (C64::new(a[0], a[1]), C64::new(b[0], b[1]));
            let mut cfg = LocalConfig::default();
            if let Some(t) = common.tol {
                cfg.rel_tol = t;
            }
            let on_torus = z.0.norm().max(z.1.norm()) > 1.0 - 1e-3;
            let boundary_form = if on_torus {
                None
            } else {
                Some(kernels::local_dirichlet_boundary(&l.phi, z, &cfg)?)
            };
            let v = load_agler(&agler, &l.name)?;
            if on_torus && v.is_none() {
                return Err(Error::PointTooCloseToBoundary(z.0.norm().max(z.1.norm())).into());
            }
            let kernel_form = match &v {
                Some(v) => Some(kernels::local_dirichlet_kernel(&l.phi, v, z, &cfg)?),
                None => None,
            };
            to_json(&json!({
                "z": [[a[0], a[1]], [b[0], b[1]]],
                "boundary_form": boundary_form,
                "kernel_form": kernel_form,
            }))
        }
        Cmd::Doug { input, common } => {
            let l = load(&input)?;
            let mut cfg = DougConfig::default();
            if let Some(g) = common.grid {
                cfg.ladder = (0..3).map(|k| g << k).collect();
            }
            if let Some(t) = common.tol {
                cfg.rel_tol = t;
            }
            let r = kernels::doug_quadrature(DougTarget::Rif(&l.phi), &cfg);
            let order = common.max_order.unwrap_or(256);
            let coeff = kernels::doug_coefficients(&l.phi.taylor(order)?);
            if common.csv {
                let rows = r.result.levels.iter().map(|(n, v)| format!("{n},{v:.17e}"));
                Ok(csv("grid,estimate", rows))
            } else {
                to_json(&json!({
                    "quadrature": r,
                    "coefficient_partial_sum": coeff,
                    "coefficient_order": order,
                }))
            }
        }
        Cmd::Pick { input, .. } => {
            let l = load(&input)?;
            let f = halfplane::pick_transform(&l.phi);
            to_json(&json!({
                "num": PolyJson::from(&f.num),
                "den": PolyJson::from(&f.den),
            }))
        }
        Cmd::TraceLevel {
            input,
            common,
            start,
            level,
            heading,
            step,
            bound,
        } => {
            let l = load(&input)?;
            let f = halfplane::pick_transform(&l.phi);
            let s = parse_pair(&start, "--start")?;
            let mut cfg = TraceConfig::default();
            if let Some(h) = heading {
                cfg.heading = Some(parse_pair(&h, "--heading")?);
            }
            if let Some(h) = step {
                cfg.step = h;
            }
            if let Some(b) = bound {
                cfg.bound = b;
            }
            if let Some(t) = common.tol {
                cfg.corrector_tol = t;
            }
            let level = level.unwrap_or_else(|| f.real_jet(s[0], s[1]).0);
            let curve = halfplane::trace_level_curve(&f, s, level, &cfg)?;
            if common.csv {
                let rows = curve
                    .points
                    .iter()
                    .zip(&curve.residuals)
                    .map(|(p, r)| format!("{:.17e},{:.17e},{r:e}", p[0], p[1]));
                Ok(csv("x,y,residual", rows))
            } else {
                to_json(&curve)
            }
        }
        Cmd::Taylor { input, common } => {
            let l = load(&input)?;
            let order = common.max_order.unwrap_or(8);
            let s = l.phi.taylor(order)?;
            if common.csv {
                let mut rows = Vec::new();
                for k in 0..=order {
                    for m in 0..=order {
                        let c = s.get(k, m);
                        rows.push(format!("{k},{m},{:.17e},{:.17e}", c.re, c.im));
                    }
                }
                Ok(csv("k,l,re,im", rows))
            } else {
                to_json(&s)
            }
        }
        Cmd::Rif {
            cmd: RifCmd::New { input, .. },
        } => {
            let l = load(&input)?;
            to_json(&RifJson::from(&l.phi))
        }
    }
}

/// Writes through a sibling temporary file so readers never see partial output.
fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)
}

fn out_path(cmd: &Cmd) -> Option<PathBuf> {
    let c = match cmd {
        Cmd::Analyze { common, .. }
        | Cmd::Contact { common, .. }
        | Cmd::Hpnorm { common, .. }
        | Cmd::Dirichlet { common, .. }
        | Cmd::Singularities { common, .. }
        | Cmd::VerifyAgler { common, .. }
        | Cmd::LocalDirichlet { common, .. }
        | Cmd::Doug { common, .. }
        | Cmd::Pick { common, .. }
        | Cmd::TraceLevel { common, .. }
        | Cmd::Taylor { common, .. } => common,
        Cmd::Rif {
            cmd: RifCmd::New { common, .. },
        } => common,
    };
    c.out.clone()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = out_path(&cli.cmd);
    match run(cli) {
        Ok(text) => {
            let written = match out {
                Some(p) => write_atomic(&p, &text),
                None => std::io::stdout().lock().write_all(text.as_bytes()),
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(3)
                }
            }
        }
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
