//! `kernelcomp` command-line tool. Prints JSON on standard output (CSV with
//! `--csv`); exits 0 on success, 1 on a failed check or computation, 2 on a
//! usage error.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kernelcomp::adjointclassify::{self, AdjointClassification};
use kernelcomp::certify::{self, KernelExpr, PointFunction, PointMap, PointSet};
use kernelcomp::multivar::{self, GridSpec};
use kernelcomp::operators::{self, build_matrix};
use kernelcomp::oracle::{self, BoundaryFunction, QuadratureSpec};
use kernelcomp::symbols::{PolySymbol, SymbolMap};
use kernelcomp::{closedforms, parse, report, Complex64, Point, SpaceDescriptor};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "kernelcomp", version, about = "Reproducing-kernel numerics for composition operators")]
struct Cli {
    /// Emit CSV (one row per leaf value, or per report item) instead of JSON.
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kernel evaluation.
    #[command(subcommand)]
    Kernel(KernelCmd),
    /// Operator norms: closed forms and truncated-matrix estimates.
    #[command(subcommand)]
    Norm(NormCmd),
    /// Forward and adjoint kernel ratios for an automorphism along its ray.
    Ratios {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        r: f64,
    },
    /// Kernel-ratio sequence approaching the norm of an automorphism.
    Sequence {
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        /// Increasing radii in (0, 1), comma separated.
        #[arg(long, default_value = "0.5,0.9,0.99,0.999")]
        radii: String,
    },
    /// Lower bounds from kernel ratios on a grid.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Positive-semidefinite certificates on finite point sets.
    #[command(subcommand)]
    Certify(CertifyCmd),
    /// Adjoint classification.
    #[command(subcommand)]
    Adjoint(AdjointCmd),
    /// Independent quadrature oracles.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Recompute every reproduction item and print the report.
    Reproduce {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum KernelCmd {
    /// kappa(z, w) for points given as comma-separated complex coordinates.
    Eval {
        #[arg(long)]
        space: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true)]
        w: String,
    },
}

#[derive(Subcommand)]
enum NormCmd {
    /// Closed-form norm on the Hardy space for inner or affine symbols.
    Exact {
        /// Inner symbol with |phi(0)| = p.
        #[arg(long, requires = "p", conflicts_with_all = ["affine", "symbol"])]
        inner: bool,
        #[arg(long)]
        p: Option<f64>,
        /// Affine symbol a z + b.
        #[arg(long, requires_all = ["a", "b"], conflicts_with = "symbol")]
        affine: bool,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(long)]
        symbol: Option<String>,
    },
    /// Largest singular value of the truncated operator matrix.
    Estimate {
        #[arg(long, default_value = "hardy")]
        space: String,
        #[arg(long)]
        symbol: String,
        #[arg(long)]
        weight: Option<String>,
        #[arg(long, default_value_t = 256)]
        truncation: usize,
        #[arg(long, default_value_t = operators::DEFAULT_TOL)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum BoundCmd {
    /// Grid supremum of the kernel ratio, a lower bound for the squared norm.
    Lower {
        #[arg(long)]
        space: String,
        #[arg(long)]
        symbol: String,
        /// RADII,ANGLES[,MAX_RADIUS] per axis.
        #[arg(long, default_value = "20,20")]
        grid: String,
    },
}

#[derive(Args)]
struct PointsArg {
    /// Point set: `grid:R,A[,MIN,MAX]`, `random:COUNT,SEED[,DIM]`,
    /// `default:P`, `;`-separated points or JSON.
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
    /// Shorthand for `--points grid:R,A`.
    #[arg(long, conflicts_with = "points")]
    grid: Option<String>,
}

impl PointsArg {
    fn resolve(&self, fallback: impl FnOnce() -> kernelcomp::Result<PointSet>) -> Result<PointSet, CliError> {
        match (&self.points, &self.grid) {
            (Some(p), _) => usage(parse::point_set(p)),
            (None, Some(g)) => usage(parse::point_set(&format!("grid:{g}"))),
            (None, None) => usage(fallback()),
        }
    }
}

#[derive(Subcommand)]
enum CertifyCmd {
    /// PSD check of a space kernel, or of (1 - conj(psi(w)) psi(z)) kappa with --weight.
    Psd {
        #[arg(long)]
        space: String,
        #[arg(long)]
        weight: Option<String>,
        #[command(flatten)]
        points: PointsArg,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Smallest c with c^2 kappa_2 - psi(z) conj(psi(w)) kappa_1(phi(z), phi(w)) PSD.
    MinC {
        #[arg(long, default_value = "hardy")]
        space1: String,
        #[arg(long, default_value = "hardy")]
        space2: String,
        #[arg(long)]
        symbol: String,
        #[arg(long)]
        weight: Option<String>,
        #[command(flatten)]
        points: PointsArg,
        #[arg(long, default_value_t = 0.0)]
        reg: f64,
    },
    /// Whether f with the given Taylor coefficients satisfies ||f|| <= c on the sample.
    Membership {
        #[arg(long)]
        space: String,
        /// Taylor coefficients, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long)]
        c: f64,
        #[command(flatten)]
        points: PointsArg,
    },
    /// Whether c^2 kappa_2 - kappa_1 is PSD on the sample.
    Inclusion {
        #[arg(long)]
        space1: String,
        #[arg(long)]
        space2: String,
        #[arg(long)]
        c: f64,
        #[command(flatten)]
        points: PointsArg,
    },
    /// PSD check of the pulled-back kernel psi(z) conj(psi(w)) kappa(phi(z), phi(w)).
    Pullback {
        #[arg(long)]
        space: String,
        #[arg(long)]
        symbol: String,
        #[arg(long)]
        weight: Option<String>,
        #[command(flatten)]
        points: PointsArg,
    },
}

#[derive(Subcommand)]
enum AdjointCmd {
    /// Decide whether the adjoint of C_phi is again a composition operator.
    Classify {
        #[arg(long, default_value = "hardy")]
        space: String,
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value_t = adjointclassify::DEFAULT_DEGREE)]
        truncation: usize,
        #[arg(long, default_value_t = adjointclassify::DEFAULT_TAU)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Trapezoid mean of |f|^2 on the circle.
    Circle {
        /// Taylor coefficients of a polynomial, comma separated.
        #[arg(long, allow_hyphen_values = true, required_unless_present = "symbol", conflicts_with = "symbol")]
        f: Option<String>,
        /// A symbol evaluated on the circle instead of a polynomial.
        #[arg(long)]
        symbol: Option<String>,
        #[arg(long, default_value_t = 1024)]
        nodes: usize,
    },
    /// Weighted Bergman norm of a polynomial by area quadrature.
    Bergman {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1024)]
        nodes: usize,
        #[arg(long, default_value_t = 32)]
        radial_nodes: usize,
    },
}

enum CliError {
    Usage(String),
    Failed(String),
}

impl From<kernelcomp::Error> for CliError {
    fn from(e: kernelcomp::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

/// Errors while interpreting arguments are usage errors.
fn usage<T>(r: kernelcomp::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Usage(e.to_string()))
}

/// JSON result plus whether the check it reports passed.
struct Outcome {
    value: Value,
    passed: bool,
    csv: Option<String>,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Outcome { value, passed: true, csv: None }
    }

    fn check(value: Value, passed: bool) -> Self {
        Outcome { value, passed, csv: None }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("result serializes")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = std::env::var("KERNELCOMP_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match run(cli.command) {
        Ok(out) => {
            let text = match (cli.csv, out.csv) {
                (true, Some(csv)) => csv,
                (true, None) => output::flatten_csv(&out.value),
                (false, _) => serde_json::to_string_pretty(&out.value).expect("json") + "\n",
            };
            print!("{text}");
            ExitCode::from(if out.passed { 0 } else { 1 })
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Kernel(KernelCmd::Eval { space, z, w }) => {
            let s = usage(parse::space(&space))?;
            let (z, w) = (usage(parse::point(&z))?, usage(parse::point(&w))?);
            let v = s.kernel_eval(&z, &w)?;
            Ok(Outcome::ok(json!({"space": s.to_json(), "z": z, "w": w, "value": v})))
        }
        Command::Norm(NormCmd::Exact { inner, p, affine, a, b, symbol }) => norm_exact(inner, p, affine, a, b, symbol),
        Command::Norm(NormCmd::Estimate { space, symbol, weight, truncation, tol }) => {
            let s = usage(parse::space(&space))?;
            let phi = usage(parse::symbol(&symbol))?;
            let w = weight.map(|w| usage(parse::weight(&w))).transpose()?;
            let m = build_matrix(&s, &phi, w.as_ref(), truncation)?;
            let est = m.norm_estimate(tol, operators::DEFAULT_MAX_ITERS)?;
            Ok(Outcome::ok(json!({
                "norm": est.sigma_max,
                "estimate": est,
                "self_map_screen": m.screen,
            })))
        }
        Command::Ratios { p, r } => {
            let rp = closedforms::ratio_pair(p, r)?;
            Ok(Outcome::ok(json!({
                "forward_ratio_sq": rp.forward_ratio_sq,
                "adjoint_ratio_sq": rp.adjoint_ratio_sq,
                "margin": rp.margin(),
                "residue_norm_f": closedforms::residue_norm_f(p, r)?,
            })))
        }
        Command::Sequence { p, radii } => {
            let p = usage(parse::complex(&p))?;
            let radii = usage(radii.split(',').map(parse::real).collect::<kernelcomp::Result<Vec<_>>>())?;
            let spec = usage(closedforms::ApproachSequenceSpec::new(p, radii))?;
            let terms = closedforms::approach_sequence(&spec);
            Ok(Outcome::ok(json!({"p": p, "ceiling": closedforms::inner_norm(p.norm())?, "terms": terms})))
        }
        Command::Bound(BoundCmd::Lower { space, symbol, grid }) => bound_lower(&space, &symbol, &grid),
        Command::Certify(c) => certify_cmd(c),
        Command::Adjoint(AdjointCmd::Classify { space, symbol, truncation, tol }) => {
            let s = usage(parse::space(&space))?;
            let phi = usage(parse::symbol(&symbol))?;
            let verdict = adjointclassify::classify(&s, &phi, truncation, tol)?;
            let delta = match &verdict {
                AdjointClassification::IsComposition { delta, .. } => Some(*delta),
                _ => None,
            };
            Ok(Outcome::ok(json!({"is_composition": verdict.is_composition(), "delta": delta, "classification": verdict})))
        }
        Command::Oracle(OracleCmd::Circle { f, symbol, nodes }) => {
            let func = match (f, symbol) {
                (Some(f), _) => BoundaryFunction::poly(usage(parse_series(&f))?),
                (None, Some(s)) => usage(BoundaryFunction::symbol(usage(parse::symbol(&s))?))?,
                (None, None) => return Err(CliError::Usage("need --f or --symbol".into())),
            };
            Ok(Outcome::ok(json!({"norm_sq": oracle::circle_norm_sq(&func, nodes)?, "nodes": nodes})))
        }
        Command::Oracle(OracleCmd::Bergman { f, alpha, nodes, radial_nodes }) => {
            let f = usage(parse_series(&f))?;
            let spec = usage(QuadratureSpec::new(nodes, radial_nodes, 0))?;
            Ok(Outcome::ok(json!({"norm_sq": oracle::bergman_norm_sq(&f, alpha, &spec)?, "alpha": alpha, "quadrature": spec})))
        }
        Command::Reproduce { seed, out } => {
            let rep = report::reproduce(seed);
            if let Some(path) = out {
                std::fs::write(&path, rep.to_json() + "\n")
                    .map_err(|e| CliError::Failed(format!("writing {}: {e}", path.display())))?;
            }
            Ok(Outcome { value: to_value(&rep), passed: rep.passed(), csv: Some(rep.to_csv()) })
        }
    }
}

fn parse_series(s: &str) -> kernelcomp::Result<kernelcomp::PowerSeries> {
    let s = s.trim();
    let body = s.strip_prefix("series:").unwrap_or(s);
    kernelcomp::PowerSeries::new(parse::complex_list(body)?)
}

fn norm_exact(
    inner: bool,
    p: Option<f64>,
    affine: bool,
    a: Option<String>,
    b: Option<String>,
    symbol: Option<String>,
) -> Result<Outcome, CliError> {
    if inner {
        let p = p.ok_or_else(|| CliError::Usage("--inner needs --p".into()))?;
        return Ok(Outcome::ok(json!({"norm": closedforms::inner_norm(p)?, "kind": "inner", "p": p})));
    }
    if affine {
        let a = usage(parse::complex(a.as_deref().unwrap_or_default()))?;
        let b = usage(parse::complex(b.as_deref().unwrap_or_default()))?;
        return Ok(Outcome::ok(json!({"norm": closedforms::affine_inner_norm(a, b)?, "kind": "affine", "a": a, "b": b})));
    }
    let Some(sym) = symbol else {
        return Err(CliError::Usage("norm exact needs --inner, --affine or --symbol".into()));
    };
    let phi = usage(parse::symbol(&sym))?;
    let zero = Complex64::new(0.0, 0.0);
    let norm = match &phi {
        SymbolMap::Affine { a, b } => closedforms::affine_inner_norm(*a, *b)?,
        SymbolMap::Constant { b } => closedforms::affine_inner_norm(zero, *b)?,
        s if s.is_inner() => closedforms::inner_norm(s.eval(zero)?.norm())?,
        other => {
            return Err(CliError::Failed(format!(
                "no closed form for a {} symbol; use `norm estimate`",
                other.kind_name()
            )))
        }
    };
    Ok(Outcome::ok(json!({"norm": norm, "kind": phi.kind_name(), "symbol": phi})))
}

fn bound_lower(space: &str, symbol: &str, grid: &str) -> Result<Outcome, CliError> {
    let s = usage(parse::space(space))?;
    let grid: GridSpec = usage(parse::grid_spec(grid))?;
    let grid_json = to_value(&grid);
    match &s {
        SpaceDescriptor::HardyDisk | SpaceDescriptor::BergmanDisk { .. } | SpaceDescriptor::WeightedHardy(_) => {
            let phi = usage(parse::symbol(symbol))?;
            let pts: Vec<Point> = grid.axis_points().into_iter().map(Point::disk).collect();
            let lb = operators::kernel_lower_bound(&s, &s, &phi, &pts)?;
            Ok(Outcome::ok(json!({"sup": lb.sup_ratio * lb.sup_ratio, "norm_lower": lb.sup_ratio, "argmax": lb.argmax, "grid": grid_json})))
        }
        SpaceDescriptor::HardyPolydisc { .. } | SpaceDescriptor::BergmanPolydisc { .. } => {
            let phi = poly_symbol_for(&s, symbol)?;
            let b = match s {
                SpaceDescriptor::BergmanPolydisc { alpha, .. } => multivar::polydisc_bergman_lower(&phi, alpha, &grid)?,
                _ => multivar::polydisc_hardy_lower(&phi, &grid)?,
            };
            Ok(Outcome::ok(json!({"sup": b.sup, "norm_lower": b.sup.sqrt(), "argmax": b.argmax, "grid": grid_json})))
        }
        SpaceDescriptor::BergmanPolydiscStar { alpha, trunc, .. } => {
            let phi = poly_symbol_for(&s, symbol)?;
            let r = multivar::jafari_a_grid(&phi, *alpha, &grid, trunc)?;
            Ok(Outcome::ok(json!({
                "sup": r.improved,
                "norm_lower": r.improved.sqrt(),
                "argmax": r.grid_argmax,
                "grid": grid_json,
                "jafari": r,
            })))
        }
        SpaceDescriptor::HardyBall { n } => {
            let phi = poly_symbol_for(&s, symbol)?;
            let phi0 = phi.eval(&Point::new(vec![Complex64::new(0.0, 0.0); *n]))?;
            let b = multivar::ball_lower(&phi0, *n)?;
            Ok(Outcome::ok(json!({"sup": b.bound * b.bound, "norm_lower": b.bound, "weaker": b.weaker, "phi0": phi0})))
        }
    }
}

fn poly_symbol_for(s: &SpaceDescriptor, symbol: &str) -> Result<PolySymbol, CliError> {
    let phi = usage(parse::poly_symbol(symbol))?;
    if phi.dim() != s.dim() {
        return Err(CliError::Usage(format!("symbol has {} components but the space has dimension {}", phi.dim(), s.dim())));
    }
    Ok(phi)
}

fn point_map(s: &SpaceDescriptor, symbol: &str) -> Result<PointMap, CliError> {
    if s.dim() == 1 {
        Ok(PointMap::Disk(usage(parse::symbol(symbol))?))
    } else {
        Ok(PointMap::Poly(poly_symbol_for(s, symbol)?))
    }
}

fn weight_fn(s: &SpaceDescriptor, weight: Option<&str>) -> Result<Option<PointFunction>, CliError> {
    weight.map(|w| usage(parse::point_function(w, s.dim()))).transpose()
}

fn default_points(s: &SpaceDescriptor) -> kernelcomp::Result<PointSet> {
    if s.dim() == 1 {
        PointSet::radial_grid(8, 16, 0.1, 0.95)
    } else {
        PointSet::random(64, 0, s.dim())
    }
}

fn certificate(cert: certify::Certificate) -> Outcome {
    let passed = cert.is_psd();
    Outcome::check(to_value(&cert), passed)
}

fn certify_cmd(cmd: CertifyCmd) -> Result<Outcome, CliError> {
    match cmd {
        CertifyCmd::Psd { space, weight, points, tol } => {
            let s = usage(parse::space(&space))?;
            let pts = points.resolve(|| default_points(&s))?;
            let base = KernelExpr::space(s.clone());
            let k = match weight_fn(&s, weight.as_deref())? {
                Some(psi) => KernelExpr::multiplier(base, psi),
                None => base,
            };
            Ok(certificate(certify::psd_check(&certify::gram(&k, &pts)?, tol)?))
        }
        CertifyCmd::MinC { space1, space2, symbol, weight, points, reg } => {
            let s1 = usage(parse::space(&space1))?;
            let s2 = usage(parse::space(&space2))?;
            let phi = point_map(&s2, &symbol)?;
            let psi = weight_fn(&s2, weight.as_deref())?;
            let pts = points.resolve(|| match &phi {
                PointMap::Disk(m) => PointSet::default_grid(m.eval(Complex64::new(0.0, 0.0))?),
                PointMap::Poly(_) => default_points(&s2),
            })?;
            let r = certify::min_c(&KernelExpr::space(s2), &KernelExpr::space(s1), &phi, psi.as_ref(), &pts, reg)?;
            Ok(Outcome::ok(json!({
                "c_min": r.c_min,
                "conditioning": {
                    "condition_number": r.condition_number,
                    "ill_conditioned": r.ill_conditioned,
                    "kept_rank": r.kept_rank,
                },
                "point_count": r.point_count,
                "regularization": r.regularization,
                "provenance": pts.provenance(),
            })))
        }
        CertifyCmd::Membership { space, f, c, points } => {
            let s = usage(parse::space(&space))?;
            if s.dim() != 1 {
                return Err(CliError::Usage("membership takes a one-variable space".into()));
            }
            let f = usage(parse_series(&f))?;
            let pts = points.resolve(|| default_points(&s))?;
            let vals: Vec<Complex64> = pts.points().iter().map(|x| f.eval(x.z())).collect();
            Ok(certificate(certify::membership_test(&KernelExpr::space(s), &vals, &pts, c)?))
        }
        CertifyCmd::Inclusion { space1, space2, c, points } => {
            let s1 = usage(parse::space(&space1))?;
            let s2 = usage(parse::space(&space2))?;
            let pts = points.resolve(|| default_points(&s1))?;
            Ok(certificate(certify::inclusion_test(&KernelExpr::space(s1), &KernelExpr::space(s2), c, &pts)?))
        }
        CertifyCmd::Pullback { space, symbol, weight, points } => {
            let s = usage(parse::space(&space))?;
            let phi = point_map(&s, &symbol)?;
            let psi = weight_fn(&s, weight.as_deref())?;
            let pts = points.resolve(|| default_points(&s))?;
            let k = certify::pullback_kernel(KernelExpr::space(s), phi, psi);
            Ok(certificate(certify::psd_check(&certify::gram(&k, &pts)?, None)?))
        }
    }
}
