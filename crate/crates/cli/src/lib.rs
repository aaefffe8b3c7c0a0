//! Command-line front end for `nullgauge`.
//!
//! Every command produces a [`ReportEnvelope`] and an exit code; `main`
//! only chooses between the JSON and the text rendering.

pub mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nullgauge::action::{action_integral, gauge_shift_check, QuadMethod, QuadOptions, DEFAULT_QUAD_TOL};
use nullgauge::domain::DEFAULT_SEED;
use nullgauge::exactness::{is_exact, EndConditions, DEFAULT_EXACT_TOL};
use nullgauge::expr::Trajectory;
use nullgauge::families::{self as fam, CoefficientSet, FamilyName, NsCoefficients, StandardParams};
use nullgauge::inertia::{
    check_pole_free, coefficient_condition_residuals, nsl_coefficients, riccati_numeric_crosscheck, riccati_residual,
    riccati_u, verify_inertia_nsl, POLE_PAD,
};
use nullgauge::variational::{
    derive_ode, el_residual, gauge_consistency, is_null, GaugeSpec, LagrangianSpec, DEFAULT_NULL_TOL, DEFAULT_SAMPLES,
};
use nullgauge::{parse_expr, DomainBox, Error, EvalPoint, Expr, Interval, Result, Var, VarSet};
use serde::Serialize;
use serde_json::{json, Value};

use report::{error_kind, exit_code, ErrorReport, SCHEMA_VERSION, TOOL_VERSION};
pub use report::{ReportEnvelope, Verdict};

/// Bound on the coefficient-condition and Riccati residuals in `derive-nsl`.
pub const CONDITION_TOL: f64 = 1e-10;
/// Bound on the RK4 deviation in `derive-nsl`.
pub const RK4_TOL: f64 = 1e-8;
pub const GRID_POINTS: usize = 101;

#[derive(Debug, Parser, Serialize)]
#[command(name = "nullgauge", version, about = "Construct and verify null Lagrangians and gauge functions")]
pub struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub json: bool,
    /// Seed of the point sampler.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Tolerance of the nullness or exactness gate.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Number of sample points.
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Sampling box, e.g. `t=0..1,x=-2..2,xdot=-2..2,xddot=-2..2`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub domain: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Test whether a Lagrangian satisfies the EL equation identically.
    CheckNull(CheckNullArgs),
    /// Test whether a gauge function vanishes at both ends.
    CheckExact(CheckExactArgs),
    /// Build a Lagrangian from one of the families.
    Make(Box<MakeArgs>),
    /// Integrate the action along a trajectory.
    Action(ActionArgs),
    /// Derive the non-standard Lagrangian for the free particle.
    DeriveNsl(DeriveNslArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckNull(_) => "check-null",
            Command::CheckExact(_) => "check-exact",
            Command::Make(_) => "make",
            Command::Action(_) => "action",
            Command::DeriveNsl(_) => "derive-nsl",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct CheckNullArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub lagrangian: String,
    /// Gauge function expected to satisfy `L = dΦ/dt`.
    #[arg(long, allow_hyphen_values = true)]
    pub gauge: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct CheckExactArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub gauge: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t0: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub t1: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub x1: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct MakeArgs {
    /// One of: standard, standard-null-const, standard-null-general,
    /// standard-test, nonstandard, nonstandard-test,
    /// nonstandard-null-general, time-only-null.
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub beta: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub f1: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub f2: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub f3: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub f4: String,
    #[arg(long, allow_hyphen_values = true)]
    pub g1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub g2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub g3: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub h1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub h2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a3: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a4: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b3: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c3: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c4: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadChoice {
    Gl,
    Simpson,
}

#[derive(Debug, Args, Serialize)]
pub struct ActionArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub lagrangian: String,
    /// Trajectory `x(t)`.
    #[arg(long, allow_hyphen_values = true)]
    pub trajectory: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t0: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub t1: f64,
    /// Prescribed `x(t0)`; defaults to the trajectory's own value.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    /// Prescribed `x(t1)`; defaults to the trajectory's own value.
    #[arg(long, allow_hyphen_values = true)]
    pub x1: Option<f64>,
    #[arg(long, value_enum, default_value_t = QuadChoice::Gl)]
    pub quad: QuadChoice,
    #[arg(long, default_value_t = DEFAULT_QUAD_TOL)]
    pub quad_tol: f64,
    /// Null Lagrangian added for the gauge-shift check; requires `--gauge`.
    #[arg(long, allow_hyphen_values = true)]
    pub null_lagrangian: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gauge: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct DeriveNslArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub a0: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub v0: f64,
    #[arg(long = "C1", default_value_t = 1.0, allow_hyphen_values = true)]
    pub c1: f64,
    #[arg(long = "C2", default_value_t = 1.0, allow_hyphen_values = true)]
    pub c2: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t0: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub t1: f64,
}

/// Exit code and report of one invocation.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub envelope: ReportEnvelope,
}

pub fn run(cli: &Cli) -> Outcome {
    let inputs = serde_json::to_value(cli).expect("arguments serialize");
    let envelope = |verdict, payload, error| ReportEnvelope {
        schema_version: SCHEMA_VERSION,
        command: cli.command.name(),
        inputs: inputs.clone(),
        verdict,
        payload,
        error,
        tool_version: TOOL_VERSION,
    };
    match dispatch(cli) {
        Ok((verdict, payload)) => Outcome { code: exit_code(verdict), envelope: envelope(verdict, payload, None) },
        Err(e) => {
            let (kind, code) = error_kind(&e);
            let err = ErrorReport { kind, message: e.to_string() };
            Outcome { code, envelope: envelope(Verdict::Fail, Value::Null, Some(err)) }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(Verdict, Value)> {
    match &cli.command {
        Command::CheckNull(a) => check_null(cli, a),
        Command::CheckExact(a) => check_exact(cli, a),
        Command::Make(a) => make(cli, a),
        Command::Action(a) => action(a),
        Command::DeriveNsl(a) => derive_nsl(cli, a),
    }
}

fn domain(cli: &Cli) -> Result<DomainBox> {
    let b = match &cli.domain {
        Some(s) => DomainBox::parse_ranges(s)?,
        None => DomainBox::default(),
    };
    Ok(b.with_seed(cli.seed))
}

fn parse(src: &str, allowed: VarSet) -> Result<Expr> {
    Ok(parse_expr(src, allowed)?)
}

fn to_json(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn check_null(cli: &Cli, a: &CheckNullArgs) -> Result<(Verdict, Value)> {
    let l = LagrangianSpec::custom(parse(&a.lagrangian, VarSet::LAGRANGIAN)?)?;
    let gauge = a.gauge.as_deref().map(|g| parse(g, VarSet::GAUGE).and_then(GaugeSpec::new)).transpose()?;
    let dom = domain(cli)?;
    let tol = cli.tol.unwrap_or(DEFAULT_NULL_TOL);
    let report = is_null(&l, &dom, cli.samples, tol)?;
    let mut pass = report.is_null;
    let mut payload = json!({
        "lagrangian": l.body().to_text(),
        "el_residual": el_residual(&l).to_text(),
        "nullness": report,
    });
    if let Some(g) = gauge {
        let (raw, scaled) = gauge_consistency(&l, &g, &dom, cli.samples)?;
        pass &= scaled <= tol;
        payload["gauge_consistency"] = json!({
            "gauge": g.body().to_text(),
            "max_abs_deviation": raw,
            "max_scaled_deviation": scaled,
            "consistent": scaled <= tol,
        });
    }
    Ok((Verdict::from_bool(pass), payload))
}

fn check_exact(cli: &Cli, a: &CheckExactArgs) -> Result<(Verdict, Value)> {
    let g = GaugeSpec::new(parse(&a.gauge, VarSet::GAUGE)?)?;
    let ends = EndConditions::new(a.t0, a.t1, a.x0, a.x1)?;
    let report = is_exact(&g, &ends, cli.tol.unwrap_or(DEFAULT_EXACT_TOL))?;
    let payload = json!({ "gauge": g.body().to_text(), "ends": ends, "exactness": report });
    Ok((Verdict::from_bool(report.is_exact), payload))
}

fn required(v: Option<f64>, flag: &str) -> Result<f64> {
    v.ok_or_else(|| Error::InvalidParameter(format!("--{flag} is required for this family")))
}

fn required_expr(v: &Option<String>, flag: &str) -> Result<Expr> {
    let src = v.as_deref().ok_or_else(|| Error::InvalidParameter(format!("--{flag} is required for this family")))?;
    parse(src, VarSet::TIME)
}

fn coefficients(a: &MakeArgs) -> Result<CoefficientSet> {
    let f = |s: &str| parse(s, VarSet::TIME);
    CoefficientSet::new(f(&a.f1)?, f(&a.f2)?, f(&a.f3)?, f(&a.f4)?)
}

fn make(cli: &Cli, a: &MakeArgs) -> Result<(Verdict, Value)> {
    let family: FamilyName = a.family.parse()?;
    let mut gauge = None;
    let mut closed_form = None;
    let mut warnings = Vec::new();
    let lagrangian = match family {
        FamilyName::Standard => {
            let p = StandardParams::new(parse(&a.alpha, VarSet::TIME)?, parse(&a.beta, VarSet::TIME)?)?;
            fam::standard_lagrangian(&p)
        }
        FamilyName::StandardNullConst => {
            let (l, g) = fam::standard_null_const(
                required(a.c1, "c1")?,
                required(a.c2, "c2")?,
                required(a.c3, "c3")?,
                required(a.c4, "c4")?,
            );
            gauge = Some(g);
            l
        }
        FamilyName::StandardNullGeneral => {
            let (l, g) = fam::standard_null_general(&coefficients(a)?);
            gauge = Some(g);
            l
        }
        FamilyName::StandardTest => {
            let (l, r) = fam::standard_test_residual(&coefficients(a)?);
            closed_form = Some(r);
            l
        }
        FamilyName::Nonstandard => {
            let (l, w) = fam::nonstandard_lagrangian(
                &required_expr(&a.g1, "g1")?,
                &required_expr(&a.g2, "g2")?,
                &required_expr(&a.g3, "g3")?,
            )?;
            warnings.extend(w.map(|w| w.to_string()));
            l
        }
        FamilyName::NonstandardTest => {
            let (l, r) = fam::nonstandard_test_residual(
                required(a.a1, "a1")?,
                required(a.a2, "a2")?,
                required(a.a3, "a3")?,
                required(a.a4, "a4")?,
            )?;
            closed_form = Some(r);
            l
        }
        FamilyName::NonstandardNullGeneral => {
            let c =
                NsCoefficients::new(required_expr(&a.h1, "h1")?, required_expr(&a.h2, "h2")?, required(a.a4, "a4")?)?;
            let (l, g) = fam::nonstandard_null_general(&c);
            gauge = Some(g);
            l
        }
        FamilyName::TimeOnlyNull => {
            let (l, g) = fam::time_only_null(required(a.b1, "b1")?, required(a.b2, "b2")?, required(a.b3, "b3")?)?;
            gauge = Some(g);
            l
        }
    };
    let dom = domain(cli)?;
    let report = is_null(&lagrangian, &dom, cli.samples, cli.tol.unwrap_or(DEFAULT_NULL_TOL))?;
    let verdict = match family {
        FamilyName::Standard | FamilyName::Nonstandard => Verdict::NotApplicable,
        _ => Verdict::from_bool(report.is_null),
    };
    let payload = json!({
        "family": family,
        "lagrangian": lagrangian.body().to_text(),
        "gauge": gauge.map(|g| g.body().to_text()),
        "closed_form_residual": closed_form.map(|r| r.to_text()),
        "warnings": warnings,
        "nullness": report,
    });
    Ok((verdict, payload))
}

fn action(a: &ActionArgs) -> Result<(Verdict, Value)> {
    let l = LagrangianSpec::custom(parse(&a.lagrangian, VarSet::LAGRANGIAN)?)?;
    let path = Trajectory::new(parse(&a.trajectory, VarSet::TIME)?)?;
    let null_pair = match (&a.null_lagrangian, &a.gauge) {
        (Some(n), Some(g)) => {
            Some((LagrangianSpec::custom(parse(n, VarSet::LAGRANGIAN)?)?, GaugeSpec::new(parse(g, VarSet::GAUGE)?)?))
        }
        (None, None) => None,
        _ => return Err(Error::InvalidParameter("--null-lagrangian and --gauge must be given together".into())),
    };
    let x_at = |t: f64| path.x().eval(&EvalPoint::at_time(t)).map_err(|source| Error::SingularityOnPath { t, source });
    let x0 = a.x0.map_or_else(|| x_at(a.t0), Ok)?;
    let x1 = a.x1.map_or_else(|| x_at(a.t1), Ok)?;
    let ends = EndConditions::new(a.t0, a.t1, x0, x1)?;
    let method = match a.quad {
        QuadChoice::Gl => QuadMethod::GaussLegendre,
        QuadChoice::Simpson => QuadMethod::Simpson,
    };
    let opts = QuadOptions { method, tol: a.quad_tol, ..QuadOptions::default() };
    let result = action_integral(&l, &path, &ends, &opts)?;
    let mut pass = result.estimated_error <= a.quad_tol;
    let mut payload = json!({
        "lagrangian": l.body().to_text(),
        "trajectory": path.x().to_text(),
        "ends": ends,
        "quad": method,
        "action": result,
    });
    if let Some((null, gauge)) = null_pair {
        let shift = gauge_shift_check(&l, &null, &gauge, &path, &ends, &opts)?;
        pass &= shift.passes(a.quad_tol);
        payload["gauge_shift"] = to_json(shift);
        payload["gauge_shift"]["passes"] = json!(shift.passes(a.quad_tol));
    }
    Ok((Verdict::from_bool(pass), payload))
}

fn derive_nsl(cli: &Cli, a: &DeriveNslArgs) -> Result<(Verdict, Value)> {
    if a.t0 >= a.t1 {
        return Err(Error::InvalidParameter(format!("t0 = {} must precede t1 = {}", a.t0, a.t1)));
    }
    check_pole_free(a.a0, a.v0, a.t0, a.t1, POLE_PAD)?;
    let d = nsl_coefficients(a.a0, a.v0, a.c1, a.c2)?;
    let riccati = riccati_u(a.a0, a.v0)?;
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| a.t0 + (a.t1 - a.t0) * i as f64 / (GRID_POINTS - 1) as f64).collect();
    let mut conditions = [0.0f64; 3];
    let mut riccati_max = 0.0f64;
    for &t in &grid {
        let (r1, r2, r3) = coefficient_condition_residuals(&d, t)?;
        for (m, r) in conditions.iter_mut().zip([r1, r2, r3]) {
            *m = m.max(r.abs());
        }
        riccati_max = riccati_max.max(riccati_residual(&riccati, t)?.abs());
    }
    // the numeric integration starts at t = 0, which may lie across the pole
    let rk4 = match riccati_numeric_crosscheck(a.a0, a.v0, &grid) {
        Ok(v) => Some(v),
        Err(Error::Pole { .. }) => None,
        Err(e) => return Err(e),
    };
    let mut dom = domain(cli)?;
    dom.set_range(Var::T, Interval::new(a.t0, a.t1)?);
    let check = verify_inertia_nsl(&d, &dom, cli.samples)?;
    let standard = derive_ode(&fam::standard_lagrangian(&StandardParams::new(Expr::one(), Expr::zero())?));
    let conditions_pass = conditions.iter().all(|r| *r <= CONDITION_TOL) && riccati_max <= CONDITION_TOL;
    let pass = conditions_pass && check.passes && rk4.is_none_or(|v| v <= RK4_TOL);
    let payload = json!({
        "parameters": { "a0": a.a0, "v0": a.v0, "C1": a.c1, "C2": a.c2, "t0": a.t0, "t1": a.t1 },
        "riccati": { "u": riccati.u.to_text(), "v": riccati.v.to_text(), "max_residual": riccati_max },
        "rk4_max_deviation": rk4,
        "g1": d.g1.to_text(),
        "g2": d.g2.to_text(),
        "g3": d.g3.to_text(),
        "lagrangian": d.lagrangian.body().to_text(),
        "condition_residual_max": { "r1": conditions[0], "r2": conditions[1], "r3": conditions[2] },
        "ode": {
            "p": check.ode.p.to_text(),
            "q_is_symbolically_zero": check.ode.q.is_zero(),
            "max_abs_q": check.max_abs_q,
            "max_scaled_q": check.max_scaled_q,
            "min_abs_p": check.min_abs_p,
            "samples": check.samples,
            "reduces_to_inertia": check.passes,
        },
        "standard_ode": { "p": standard.p.to_text(), "q": standard.q.to_text() },
    });
    Ok((Verdict::from_bool(pass), payload))
}
