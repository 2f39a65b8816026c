//! Scenario files, built-in reproductions and CSV output.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channels::KrausChannel;
use crate::dynamics::{analytic_trajectory, integrate, LindbladModel, RhoDotSource, Trajectory};
use crate::error::Error;
use crate::linalg::{pauli, ComplexMatrix};
use crate::observables::{CoefficientFunction, TimeDependentObservable};
use crate::state::DensityMatrix;
use crate::stats::{
    cauchy_schwarz_margin, closed_bound_from, eq36_residual_from, expectation, open_bound_from,
    variance, variance_rate, BoundReport,
};
use crate::tolerances;

/// Complex matrix as paired real and imaginary row-major grids. A missing
/// `im` means all zeros.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<Vec<f64>>,
}

impl MatrixSpec {
    pub fn real(rows: Vec<Vec<f64>>) -> Self {
        Self {
            re: rows,
            im: Vec::new(),
        }
    }

    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let (re, im) = m.to_real_imag();
        if im.iter().flatten().all(|&x| x == 0.0) {
            Self::real(re)
        } else {
            Self { re, im }
        }
    }

    pub fn to_matrix(&self) -> crate::Result<ComplexMatrix> {
        if self.im.is_empty() {
            let zeros: Vec<Vec<f64>> = self.re.iter().map(|r| vec![0.0; r.len()]).collect();
            ComplexMatrix::from_real_imag(&self.re, &zeros)
        } else {
            ComplexMatrix::from_real_imag(&self.re, &self.im)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub function: CoefficientFunction,
    pub matrix: MatrixSpec,
}

/// `sum_i c_i(t) B_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub terms: Vec<TermSpec>,
}

impl ObservableSpec {
    pub fn constant(m: &ComplexMatrix) -> Self {
        Self {
            terms: vec![TermSpec {
                function: CoefficientFunction::constant(1.0),
                matrix: MatrixSpec::from_matrix(m),
            }],
        }
    }

    pub fn build(&self) -> crate::Result<TimeDependentObservable> {
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((t.function.clone(), t.matrix.to_matrix()?)))
            .collect::<crate::Result<Vec<_>>>()?;
        TimeDependentObservable::new(terms)
    }
}

/// Jump operator `sqrt(rate) * matrix`; `rate` defaults to 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpSpec {
    pub matrix: MatrixSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
}

/// Discrete channel description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    AmplitudeDamping { gamma: f64 },
    Kraus { operators: Vec<MatrixSpec> },
}

impl ChannelSpec {
    pub fn build(&self) -> crate::Result<KrausChannel> {
        match self {
            Self::AmplitudeDamping { gamma } => KrausChannel::amplitude_damping(*gamma),
            Self::Kraus { operators } => KrausChannel::new(
                operators
                    .iter()
                    .map(MatrixSpec::to_matrix)
                    .collect::<crate::Result<Vec<_>>>()?,
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSelection {
    Open,
    Closed,
    Eq36,
    CauchySchwarz,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoDotMode {
    #[default]
    Analytic,
    FiniteDifference,
}

impl From<RhoDotMode> for RhoDotSource {
    fn from(m: RhoDotMode) -> Self {
        match m {
            RhoDotMode::Analytic => RhoDotSource::Analytic,
            RhoDotMode::FiniteDifference => RhoDotSource::FiniteDifference,
        }
    }
}

/// A model, an initial state, an observable, a time grid and the checks to run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub dimension: usize,
    pub initial_state: MatrixSpec,
    #[serde(default)]
    pub hamiltonian: Option<ObservableSpec>,
    #[serde(default)]
    pub jump_operators: Vec<JumpSpec>,
    pub observable: ObservableSpec,
    pub t_max: f64,
    pub dt: f64,
    pub bounds: Vec<BoundSelection>,
    #[serde(default)]
    pub rho_dot_mode: RhoDotMode,
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("cannot parse scenario: {0}")]
    Parse(String),
    #[error("invalid scenario: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("run failed at t = {t}: {source}")]
    Run {
        t: f64,
        #[source]
        source: Error,
    },
    #[error("unknown parameter {0:?}")]
    UnknownParameter(String),
}

impl ScenarioError {
    /// Single-line JSON description for machine consumption.
    pub fn to_json(&self) -> String {
        let value = match self {
            Self::Io { path, message } => {
                serde_json::json!({"error": "io", "path": path, "message": message})
            }
            Self::Parse(m) => serde_json::json!({"error": "parse", "message": m}),
            Self::Invalid(v) => serde_json::json!({"error": "invalid", "violations": v}),
            Self::Run { t, source } => {
                serde_json::json!({"error": "run", "t": t, "message": source.to_string()})
            }
            Self::UnknownParameter(p) => {
                serde_json::json!({"error": "unknown_parameter", "name": p})
            }
        };
        value.to_string()
    }
}

/// Validated, ready-to-run scenario.
#[derive(Clone, Debug)]
pub struct PreparedScenario {
    pub spec: ScenarioSpec,
    pub initial_state: DensityMatrix,
    pub model: LindbladModel,
    pub observable: TimeDependentObservable,
}

impl ScenarioSpec {
    /// Checks every invariant and reports all violations together.
    pub fn prepare(&self) -> Result<PreparedScenario, ScenarioError> {
        let mut errors = Vec::new();
        let dim = self.dimension;
        if self.name.trim().is_empty() {
            errors.push("name: must not be empty".to_string());
        }
        if dim == 0 {
            errors.push("dimension: must be at least 1".to_string());
        }
        let check_dim = |what: &str, d: usize, errors: &mut Vec<String>| {
            if d != dim {
                errors.push(format!("{what}: dimension {d} does not match {dim}"));
            }
        };

        let initial_state = match self.initial_state.to_matrix() {
            Ok(m) => {
                check_dim("initial_state", m.dim(), &mut errors);
                match DensityMatrix::new(m) {
                    Ok(s) => Some(s),
                    Err(e) => {
                        errors.push(format!("initial_state: {e}"));
                        None
                    }
                }
            }
            Err(e) => {
                errors.push(format!("initial_state: {e}"));
                None
            }
        };

        let hamiltonian = match &self.hamiltonian {
            None => Some(None),
            Some(h) => match h.build() {
                Ok(h) => {
                    check_dim("hamiltonian", h.dim(), &mut errors);
                    Some(Some(h))
                }
                Err(e) => {
                    errors.push(format!("hamiltonian: {e}"));
                    None
                }
            },
        };

        let mut jumps = Vec::with_capacity(self.jump_operators.len());
        for (i, j) in self.jump_operators.iter().enumerate() {
            let rate = j.rate.unwrap_or(1.0);
            if !(rate >= 0.0 && rate.is_finite()) {
                errors.push(format!(
                    "jump_operators[{i}].rate: must be finite and non-negative, got {rate}"
                ));
                continue;
            }
            match j.matrix.to_matrix() {
                Ok(m) => {
                    check_dim(&format!("jump_operators[{i}]"), m.dim(), &mut errors);
                    jumps.push(m.scale(rate.sqrt()));
                }
                Err(e) => errors.push(format!("jump_operators[{i}].matrix: {e}")),
            }
        }

        let observable = match self.observable.build() {
            Ok(a) => {
                check_dim("observable", a.dim(), &mut errors);
                Some(a)
            }
            Err(e) => {
                errors.push(format!("observable: {e}"));
                None
            }
        };

        if !(self.dt > 0.0 && self.dt.is_finite()) {
            errors.push(format!("dt: must be positive and finite, got {}", self.dt));
        } else if !(self.t_max.is_finite() && self.t_max >= 10.0 * self.dt * (1.0 - 1e-12)) {
            errors.push(format!(
                "t_max: must be at least 10 dt = {}, got {}",
                10.0 * self.dt,
                self.t_max
            ));
        }

        if !errors.is_empty() {
            return Err(ScenarioError::Invalid(errors));
        }
        let (Some(initial_state), Some(hamiltonian), Some(observable)) =
            (initial_state, hamiltonian, observable)
        else {
            unreachable!("missing parts always record an error");
        };
        let model = LindbladModel::new(dim, hamiltonian, jumps)
            .map_err(|e| ScenarioError::Invalid(vec![format!("model: {e}")]))?;
        Ok(PreparedScenario {
            spec: self.clone(),
            initial_state,
            model,
            observable,
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialises")
    }

    pub fn wants(&self, b: BoundSelection) -> bool {
        self.bounds.contains(&b)
    }
}

/// Parses and validates scenario text.
pub fn parse_scenario(text: &str) -> Result<ScenarioSpec, ScenarioError> {
    let spec: ScenarioSpec =
        serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    spec.prepare()?;
    Ok(spec)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioSpec, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_scenario(&text)
}

/// Bit set in [`ResultRow::skipped_flags`] when the open bound was skipped.
pub const SKIPPED_OPEN: u32 = 1;
/// Bit set in [`ResultRow::skipped_flags`] when the closed bound was skipped.
pub const SKIPPED_CLOSED: u32 = 2;

/// One interior grid point of a run. Columns that were not requested or were
/// skipped hold NaN.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub t: f64,
    pub mean: f64,
    pub sigma: f64,
    pub sigma_sq: f64,
    pub var_rate: f64,
    pub lhs_open: f64,
    pub rhs_open: f64,
    pub margin_open: f64,
    pub lhs_closed: f64,
    pub rhs_closed: f64,
    pub margin_closed: f64,
    pub eq36_residual: f64,
    pub skipped_flags: u32,
    /// Not part of the CSV.
    #[serde(skip)]
    pub cauchy_schwarz_margin: f64,
}

pub const CSV_HEADER: &str = "t,mean,sigma,sigma_sq,var_rate,lhs_open,rhs_open,margin_open,\
lhs_closed,rhs_closed,margin_closed,eq36_residual,skipped_flags";

/// Scientific notation with 12 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.11e}")
    }
}

impl ResultRow {
    pub fn to_csv_line(&self) -> String {
        let mut line = String::new();
        for x in [
            self.t,
            self.mean,
            self.sigma,
            self.sigma_sq,
            self.var_rate,
            self.lhs_open,
            self.rhs_open,
            self.margin_open,
            self.lhs_closed,
            self.rhs_closed,
            self.margin_closed,
            self.eq36_residual,
        ] {
            line.push_str(&format_float(x));
            line.push(',');
        }
        let _ = write!(line, "{}", self.skipped_flags);
        line
    }
}

pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::with_capacity(64 + rows.len() * 200);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}

/// `(rate, omega)` when the model is exactly qubit amplitude damping with
/// `H = (omega/2) sigma_z` or no Hamiltonian.
pub fn match_amplitude_damping(model: &LindbladModel) -> Option<(f64, f64)> {
    if model.dim() != 2 || model.jump_operators().len() != 1 {
        return None;
    }
    let l = &model.jump_operators()[0];
    let amp = l[(0, 1)];
    if amp.im != 0.0 || amp.re < 0.0 || [l[(0, 0)], l[(1, 0)], l[(1, 1)]].iter().any(|z| z.norm() != 0.0) {
        return None;
    }
    let omega = match model.hamiltonian() {
        None => 0.0,
        Some(h) => {
            if !h.is_time_independent() {
                return None;
            }
            let m = h.evaluate(0.0);
            let omega = 2.0 * m[(0, 0)].re;
            let expected = pauli::z().scale(omega / 2.0);
            if m.max_abs_diff(&expected) != 0.0 {
                return None;
            }
            omega
        }
    };
    Some((amp.re * amp.re, omega))
}

/// Trajectory for a prepared scenario: closed form for exact amplitude
/// damping, Runge-Kutta otherwise.
pub fn scenario_trajectory(p: &PreparedScenario) -> Result<Trajectory, ScenarioError> {
    let run_err = |e: Error| {
        let t = match &e {
            Error::PositivityViolation { t, .. } | Error::StateAt { t, .. } => *t,
            _ => 0.0,
        };
        ScenarioError::Run { t, source: e }
    };
    match match_amplitude_damping(&p.model) {
        Some((rate, omega)) => {
            analytic_trajectory(&p.initial_state, rate, omega, p.spec.t_max, p.spec.dt)
                .map_err(run_err)
        }
        None => integrate(&p.model, &p.initial_state, p.spec.t_max, p.spec.dt).map_err(run_err),
    }
}

/// Evaluates the requested statistics at every interior grid point.
pub fn run_prepared(p: &PreparedScenario) -> Result<Vec<ResultRow>, ScenarioError> {
    let traj = scenario_trajectory(p)?;
    let source: RhoDotSource = p.spec.rho_dot_mode.into();
    let eps = tolerances::SIGMA_FLOOR;
    let mut rows = Vec::with_capacity(traj.len().saturating_sub(2));
    for k in 1..traj.len().saturating_sub(1) {
        let t = traj.time(k);
        let at = |e: Error| ScenarioError::Run { t, source: e };
        let sp = variance_rate(&traj, &p.observable, k, source).map_err(at)?;
        let mut row = ResultRow {
            t,
            mean: sp.mean,
            sigma: sp.sigma,
            sigma_sq: sp.variance,
            var_rate: sp.var_rate,
            lhs_open: f64::NAN,
            rhs_open: f64::NAN,
            margin_open: f64::NAN,
            lhs_closed: f64::NAN,
            rhs_closed: f64::NAN,
            margin_closed: f64::NAN,
            eq36_residual: f64::NAN,
            skipped_flags: 0,
            cauchy_schwarz_margin: f64::NAN,
        };
        let fill = |r: &BoundReport| (r.lhs, r.rhs, r.margin, r.is_skipped());
        if p.spec.wants(BoundSelection::Open) {
            let skipped;
            (row.lhs_open, row.rhs_open, row.margin_open, skipped) = fill(&open_bound_from(&sp, eps));
            if skipped {
                row.skipped_flags |= SKIPPED_OPEN;
            }
        }
        if p.spec.wants(BoundSelection::Closed) {
            let r = closed_bound_from(&traj, &p.model, &p.observable, k, &sp, eps).map_err(at)?;
            let skipped;
            (row.lhs_closed, row.rhs_closed, row.margin_closed, skipped) = fill(&r);
            if skipped {
                row.skipped_flags |= SKIPPED_CLOSED;
            }
        }
        if p.spec.wants(BoundSelection::Eq36) {
            row.eq36_residual = eq36_residual_from(&sp);
        }
        if p.spec.wants(BoundSelection::CauchySchwarz) {
            row.cauchy_schwarz_margin = cauchy_schwarz_margin(&sp);
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn run_scenario(spec: &ScenarioSpec) -> Result<Vec<ResultRow>, ScenarioError> {
    run_prepared(&spec.prepare()?)
}

/// Tolerance on the identity residual column: central differences are
/// second order in the step.
pub fn eq36_tolerance(dt: f64) -> f64 {
    10.0 * dt * dt
}

/// First violated check in a run, if any.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub t: f64,
    pub check: BoundSelection,
    pub margin: f64,
}

/// Scans rows for the first time any requested, non-skipped check fails.
pub fn first_violation(spec: &ScenarioSpec, rows: &[ResultRow]) -> Option<Violation> {
    let bound = -tolerances::BOUND;
    let eq36_tol = eq36_tolerance(spec.dt);
    for r in rows {
        let mut checks = Vec::new();
        if spec.wants(BoundSelection::Open) && r.skipped_flags & SKIPPED_OPEN == 0 {
            checks.push((BoundSelection::Open, r.margin_open, r.margin_open >= bound));
        }
        if spec.wants(BoundSelection::Closed) && r.skipped_flags & SKIPPED_CLOSED == 0 {
            checks.push((BoundSelection::Closed, r.margin_closed, r.margin_closed >= bound));
        }
        if spec.wants(BoundSelection::Eq36) && !r.eq36_residual.is_nan() {
            let m = eq36_tol - r.eq36_residual;
            checks.push((BoundSelection::Eq36, m, m >= 0.0));
        }
        if spec.wants(BoundSelection::CauchySchwarz) {
            let m = r.cauchy_schwarz_margin;
            checks.push((BoundSelection::CauchySchwarz, m, m >= -1e-10));
        }
        if let Some((check, margin, _)) = checks.into_iter().find(|c| !c.2) {
            return Some(Violation {
                t: r.t,
                check,
                margin,
            });
        }
    }
    None
}

/// One sample of the Figure 1 curves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Figure1Point {
    pub t: f64,
    /// `<sigma_z>`
    pub mu: f64,
    /// standard deviation of `sigma_z`
    pub sigma: f64,
    /// `sqrt(<A_dot^2>)`
    pub v: f64,
    /// `v^2 - mu_dot^2 - sigma_dot^2`; `-inf` where `sigma = 0`.
    pub consistency: f64,
}

pub const FIGURE1_HEADER: &str = "t,mu,sigma,v,consistency";

/// Mean, spread and speed of `sigma_z` for a qubit decaying from `|1>` at
/// `rate`, computed from the analytic state.
pub fn figure1_curves(rate: f64, t_max: f64, dt: f64) -> crate::Result<Vec<Figure1Point>> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "rate",
            value: rate,
            reason: "decay rate must be positive",
        });
    }
    let traj = analytic_trajectory(&DensityMatrix::basis(2, 1), rate, 0.0, t_max, dt)?;
    let model = traj.model().expect("analytic trajectory carries its model").clone();
    let a = TimeDependentObservable::constant(pauli::z())?;
    let mut out = Vec::with_capacity(traj.len());
    for k in 0..traj.len() {
        let t = traj.time(k);
        let rho = traj.state(k);
        let sp = variance_rate(&traj, &a, k, RhoDotSource::Analytic)?;
        let adot = crate::stats::adjoint_heisenberg_rate(&model, &a, t)?;
        let v = expectation(rho, &(&adot * &adot))?.max(0.0).sqrt();
        let mu_dot = expectation(rho, &adot)?;
        let sigma_dot_sq = if sp.variance > 0.0 {
            sp.var_rate * sp.var_rate / (4.0 * sp.variance)
        } else {
            f64::INFINITY
        };
        out.push(Figure1Point {
            t,
            mu: sp.mean,
            sigma: variance(rho, &pauli::z())?.sqrt(),
            v,
            consistency: v * v - mu_dot * mu_dot - sigma_dot_sq,
        });
    }
    Ok(out)
}

pub fn figure1_to_csv(points: &[Figure1Point]) -> String {
    let mut out = String::from(FIGURE1_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            format_float(p.t),
            format_float(p.mu),
            format_float(p.sigma),
            format_float(p.v),
            format_float(p.consistency)
        );
    }
    out
}

/// Parameters that builtins and sweeps may override.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub gamma: Option<f64>,
    pub omega: Option<f64>,
}

pub const BUILTIN_NAMES: [&str; 4] = ["example1", "example2", "appendixC", "figure1"];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Figure1Params {
    pub rate: f64,
    pub t_max: f64,
    pub dt: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Builtin {
    Scenario(ScenarioSpec),
    Figure1(Figure1Params),
}

fn damped_qubit(
    name: &str,
    rate: f64,
    omega: f64,
    observable: ObservableSpec,
    t_max: f64,
    dt: f64,
    bounds: Vec<BoundSelection>,
) -> ScenarioSpec {
    ScenarioSpec {
        name: name.to_string(),
        dimension: 2,
        initial_state: MatrixSpec::real(vec![vec![0.0, 0.0], vec![0.0, 1.0]]),
        hamiltonian: (omega != 0.0).then(|| ObservableSpec::constant(&pauli::z().scale(omega / 2.0))),
        jump_operators: vec![JumpSpec {
            matrix: MatrixSpec::from_matrix(&pauli::minus()),
            rate: Some(rate),
        }],
        observable,
        t_max,
        dt,
        bounds,
        rho_dot_mode: RhoDotMode::Analytic,
    }
}

/// Rotating observable `cos t sigma_x + sin t sigma_y`.
pub fn rotating_observable_spec() -> ObservableSpec {
    ObservableSpec {
        terms: vec![
            TermSpec {
                function: CoefficientFunction::cosine(1.0, 1.0, 0.0),
                matrix: MatrixSpec::from_matrix(&pauli::x()),
            },
            TermSpec {
                function: CoefficientFunction::sine(1.0, 1.0, 0.0),
                matrix: MatrixSpec::from_matrix(&pauli::y()),
            },
        ],
    }
}

/// Built-in reproduction by name, with optional parameter overrides.
pub fn builtin(name: &str, o: &Overrides) -> Result<Builtin, ScenarioError> {
    let gamma = o.gamma.unwrap_or(1.0);
    let dt = o.dt.unwrap_or(1e-3);
    let t_max = o.t_max.unwrap_or(5.0);
    let sz = ObservableSpec::constant(&pauli::z());
    use BoundSelection::*;
    let b = match name {
        "example1" => Builtin::Scenario(damped_qubit(
            "example1",
            gamma,
            o.omega.unwrap_or(0.0),
            sz,
            t_max,
            dt,
            vec![Open, Eq36, CauchySchwarz],
        )),
        "example2" => Builtin::Scenario(damped_qubit(
            "example2",
            gamma,
            o.omega.unwrap_or(1.0),
            rotating_observable_spec(),
            t_max,
            dt,
            vec![Open, Eq36, CauchySchwarz],
        )),
        "appendixC" => Builtin::Scenario(damped_qubit(
            "appendixC",
            gamma,
            o.omega.unwrap_or(0.0),
            sz,
            t_max,
            dt,
            vec![Closed, Open],
        )),
        "figure1" => Builtin::Figure1(Figure1Params {
            rate: gamma,
            t_max,
            dt: o.dt.unwrap_or(1e-2),
        }),
        other => return Err(ScenarioError::UnknownParameter(other.to_string())),
    };
    Ok(b)
}

/// Applies a named override to a scenario: `dt`, `t_max` or `gamma` (which
/// rescales every jump operator rate).
pub fn apply_parameter(
    spec: &ScenarioSpec,
    param: &str,
    value: f64,
) -> Result<ScenarioSpec, ScenarioError> {
    let mut s = spec.clone();
    match param {
        "dt" => s.dt = value,
        "t_max" => s.t_max = value,
        "gamma" => {
            for j in &mut s.jump_operators {
                j.rate = Some(value);
            }
        }
        other => return Err(ScenarioError::UnknownParameter(other.to_string())),
    }
    s.name = format!("{}_{param}_{value}", spec.name);
    s.prepare()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(name: &str) -> ScenarioSpec {
        match builtin(name, &Overrides::default()).unwrap() {
            Builtin::Scenario(s) => s,
            Builtin::Figure1(_) => panic!("not a scenario"),
        }
    }

    #[test]
    fn builtin_round_trips_through_json() {
        for name in ["example1", "example2", "appendixC"] {
            let s = scenario(name);
            let back = parse_scenario(&s.to_json_pretty()).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn rejects_bad_trace() {
        let mut s = scenario("example1");
        s.initial_state = MatrixSpec::real(vec![vec![0.0, 0.0], vec![0.0, 0.9]]);
        let ScenarioError::Invalid(v) = s.prepare().unwrap_err() else {
            panic!()
        };
        assert!(v.iter().any(|m| m.contains("trace")), "{v:?}");
    }

    #[test]
    fn rejects_negative_rate_and_collects_all() {
        let mut s = scenario("example1");
        s.jump_operators[0].rate = Some(-1.0);
        s.dt = 0.0;
        s.name = String::new();
        let ScenarioError::Invalid(v) = s.prepare().unwrap_err() else {
            panic!()
        };
        assert_eq!(v.len(), 3, "{v:?}");
        assert!(v.iter().any(|m| m.contains("rate")));
    }

    #[test]
    fn rejects_short_horizon_and_wrong_dimension() {
        let mut s = scenario("example1");
        s.t_max = 5.0 * s.dt;
        s.dimension = 3;
        let ScenarioError::Invalid(v) = s.prepare().unwrap_err() else {
            panic!()
        };
        assert!(v.iter().any(|m| m.starts_with("t_max")));
        assert!(v.iter().filter(|m| m.contains("does not match")).count() >= 3);
    }

    #[test]
    fn rejects_unknown_fields_and_bad_json() {
        let mut v: serde_json::Value = serde_json::from_str(&scenario("example1").to_json_pretty()).unwrap();
        v["extra"] = serde_json::json!(1);
        assert!(matches!(parse_scenario(&v.to_string()), Err(ScenarioError::Parse(_))));
        assert!(matches!(parse_scenario("{"), Err(ScenarioError::Parse(_))));
    }

    #[test]
    fn example1_rows() {
        let rows = run_scenario(&scenario("example1")).unwrap();
        assert_eq!(rows.len(), 4999);
        for r in &rows {
            if r.skipped_flags == 0 {
                assert!((r.rhs_open - 2.0 * r.lhs_open).abs() <= 1e-8, "{r:?}");
            }
            assert!(r.lhs_closed.is_nan());
        }
        assert!(first_violation(&scenario("example1"), &rows).is_none());
    }

    #[test]
    fn example2_rows() {
        let rows = run_scenario(&scenario("example2")).unwrap();
        for r in &rows {
            assert!(r.lhs_open.abs() <= 1e-8 && (r.rhs_open - 2.0).abs() <= 1e-8);
        }
    }

    #[test]
    fn appendix_c_margin_changes_sign_at_threshold() {
        let s = scenario("appendixC");
        let rows = run_scenario(&s).unwrap();
        let t_star = (4.0f64 / 3.0).ln();
        let flip = rows
            .windows(2)
            .find(|w| w[0].margin_closed < 0.0 && w[1].margin_closed >= 0.0)
            .unwrap();
        assert!(flip[0].t <= t_star && t_star <= flip[1].t);
        let v = first_violation(&s, &rows).unwrap();
        assert_eq!(v.check, BoundSelection::Closed);
        assert!((v.t - s.dt).abs() < 1e-12);
    }

    #[test]
    fn integrated_and_analytic_runs_agree() {
        let s = scenario("example1");
        let mut general = s.clone();
        // Same physics written so the closed-form path is not taken.
        general.jump_operators[0].matrix = MatrixSpec {
            re: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            im: vec![vec![0.0, 1.0], vec![0.0, 0.0]],
        };
        assert!(match_amplitude_damping(&general.prepare().unwrap().model).is_none());
        let a = run_scenario(&s).unwrap();
        let b = run_scenario(&general).unwrap();
        for (x, y) in a.iter().zip(&b).step_by(101) {
            assert!((x.mean - y.mean).abs() < 1e-9);
        }
    }

    #[test]
    fn csv_is_deterministic_and_well_formed() {
        let s = scenario("example2");
        let a = rows_to_csv(&run_scenario(&s).unwrap());
        let b = rows_to_csv(&run_scenario(&s).unwrap());
        assert_eq!(a, b);
        let mut lines = a.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let first = lines.next().unwrap();
        assert_eq!(first.split(',').count(), 13);
        assert!(first.starts_with("1.00000000000e-3,"));
        assert!(!a.contains('\r'));
    }

    #[test]
    fn figure1_endpoints() {
        let pts = figure1_curves(2.0, 25.0, 0.05).unwrap();
        let p0 = pts[0];
        assert_eq!((p0.mu, p0.sigma), (-1.0, 0.0));
        assert!((p0.v - 4.0).abs() < 1e-15);
        assert_eq!(p0.consistency, f64::NEG_INFINITY);
        let last = pts.last().unwrap();
        assert!((last.mu - 1.0).abs() < 1e-10 && last.sigma < 1e-10);
        assert!(figure1_curves(0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn figure1_matches_closed_forms() {
        let rate = 0.7;
        let t_star = (4.0f64 / 3.0).ln() / rate;
        for p in figure1_curves(rate, 5.0, 0.01).unwrap() {
            let e = (-rate * p.t).exp();
            assert!((p.mu - (1.0 - 2.0 * e)).abs() < 1e-12);
            assert!((p.sigma - 2.0 * e.sqrt() * (1.0 - e).sqrt()).abs() < 1e-12);
            assert!((p.v - 2.0 * rate * e.sqrt()).abs() < 1e-12);
            // mu_dot^2 + sigma_dot^2 <= v^2 exactly when t >= ln(4/3)/rate.
            if (p.t - t_star).abs() > 1e-6 {
                assert_eq!(p.consistency >= 0.0, p.t > t_star, "{p:?}");
            }
        }
    }

    #[test]
    fn overrides_and_parameters() {
        let o = Overrides {
            gamma: Some(2.0),
            dt: Some(1e-2),
            ..Default::default()
        };
        let Builtin::Scenario(s) = builtin("appendixC", &o).unwrap() else {
            panic!()
        };
        assert_eq!(s.jump_operators[0].rate, Some(2.0));
        assert_eq!(s.dt, 1e-2);
        assert!(builtin("nope", &o).is_err());
        let t = apply_parameter(&s, "t_max", 2.0).unwrap();
        assert_eq!(t.t_max, 2.0);
        assert!(apply_parameter(&s, "dt", -1.0).is_err());
        assert!(matches!(
            apply_parameter(&s, "omega", 1.0),
            Err(ScenarioError::UnknownParameter(_))
        ));
    }

    #[test]
    fn channel_specs() {
        let ad: ChannelSpec = serde_json::from_str(r#"{"type":"amplitude_damping","gamma":0.3}"#).unwrap();
        assert_eq!(ad.build().unwrap(), KrausChannel::amplitude_damping(0.3).unwrap());
        let k: ChannelSpec = serde_json::from_str(
            r#"{"type":"kraus","operators":[{"re":[[1,0],[0,1]]}]}"#,
        )
        .unwrap();
        assert_eq!(k.build().unwrap().dim(), 2);
        let bad: ChannelSpec = serde_json::from_str(
            r#"{"type":"kraus","operators":[{"re":[[0.5,0],[0,0.5]]}]}"#,
        )
        .unwrap();
        assert!(bad.build().is_err());
    }

    #[test]
    fn error_lines_are_json() {
        let e = ScenarioError::Invalid(vec!["a".into(), "b".into()]);
        let v: serde_json::Value = serde_json::from_str(&e.to_json()).unwrap();
        assert_eq!(v["error"], "invalid");
        assert_eq!(v["violations"].as_array().unwrap().len(), 2);
    }
}
