//! The alternating-minimization solver.
//!
//! One iteration maps `x` to
//!
//! ```text
//! x'_j = x_j (1/c) sum_l x_l y_{l+j} / (x*x)_{l+j},      c = sqrt(sum y)
//! ```
//!
//! which is the composition of the two closed-form partial minimizers in
//! [`crate::lifted`]. Every iterate after the first sums to `c`, zeros are
//! absorbing, and `I(y || x*x)` never increases.

mod closed_form;
mod diagnostics;
mod kuhn_tucker;
mod multi_start;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use closed_form::{closed_form_m1, exact_match_condition_m1};
pub use diagnostics::{gain_decomposition, step_diagnostics, GainCheck, StepDiagnostics};
pub use kuhn_tucker::{kuhn_tucker_check, KtReport, KtStatus};
pub use multi_start::{multi_start, MultiStartResult, DISAGREEMENT_THRESHOLD};

use crate::divergence::i_divergence;
use crate::error::{Error, Result};
use crate::objective::{autoconvolve, data_ratio, gradient, hessian, objective, Spectrum};
use crate::signal::{Observations, Signal};

/// Identifier of the random generator used for initial points.
pub const RNG_ID: &str = "ChaCha8Rng::seed_from_u64";

/// How starting points are produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitPolicy {
    /// i.i.d. uniform entries on `[lo, hi)`.
    UniformRandom { lo: f64, hi: f64 },
    /// A fixed starting vector.
    Given { x: Vec<f64> },
    /// Constant vector on the simplex, every entry `c / (m + 1)`.
    Flat,
}

impl Default for InitPolicy {
    fn default() -> Self {
        InitPolicy::UniformRandom { lo: 0.1, hi: 0.2 }
    }
}

impl InitPolicy {
    /// Draws the starting point for observations `y` from `seed`.
    pub fn initial_point(&self, y: &Observations, seed: u64) -> Result<Signal> {
        let n = y.m() + 1;
        match self {
            InitPolicy::UniformRandom { lo, hi } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Signal::new((0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect())
            }
            InitPolicy::Given { x } => {
                let x = Signal::new(x.clone())?;
                y.check_signal(&x)?;
                Ok(x)
            }
            InitPolicy::Flat => Signal::constant(y.m(), y.c() / n as f64),
        }
    }
}

/// Solver settings.
///
/// `tol_step` and `zero_threshold` are relative: the run multiplies them by
/// `c = sqrt(sum y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Stop once `I(x^{t+1} || x^t) <= tol_step * c`.
    pub tol_step: f64,
    /// Kuhn-Tucker tolerance, applied as `tol_grad * (1 + 2c)`.
    pub tol_grad: f64,
    /// Coordinates at or below `zero_threshold * c` count as boundary.
    pub zero_threshold: f64,
    pub init: InitPolicy,
    pub seed: u64,
    pub n_starts: usize,
    pub record_trace: bool,
    pub record_x_snapshots: bool,
    /// Compute the eigenvalues of the Hessian at the returned point.
    pub hessian_spectrum: bool,
    /// Permit starting points with zero entries.
    pub allow_boundary_start: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 1000,
            tol_step: 1e-14,
            tol_grad: 1e-6,
            zero_threshold: 1e-12,
            init: InitPolicy::default(),
            seed: 0,
            n_starts: 1,
            record_trace: true,
            record_x_snapshots: false,
            hessian_spectrum: false,
            allow_boundary_start: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::usage("max_iters must be at least 1"));
        }
        if self.n_starts < 1 {
            return Err(Error::usage("n_starts must be at least 1"));
        }
        if !(self.tol_step > 0.0) || !(self.tol_grad > 0.0) {
            return Err(Error::usage("tol_step and tol_grad must be positive"));
        }
        if !(self.zero_threshold >= 0.0) {
            return Err(Error::usage("zero_threshold must be nonnegative"));
        }
        if let InitPolicy::UniformRandom { lo, hi } = self.init {
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(Error::usage(format!(
                    "uniform initialization needs 0 < lo < hi, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// `I(x^{t+1} || x^t)` fell below the step tolerance.
    Tolerance,
    MaxIters,
    /// The divergence reached zero up to `1e-14 * sum y`.
    ExactMatch,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::Tolerance => "tolerance",
            StopReason::MaxIters => "max-iters",
            StopReason::ExactMatch => "exact-match",
        }
    }
}

/// State after iteration `t >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub t: usize,
    /// `I(y || x^t * x^t)`.
    pub divergence: f64,
    /// `I(x^t || x^{t-1})`.
    pub step_div: f64,
    /// `sum_j |x^t_j - x^{t-1}_j|`.
    pub step_l1: f64,
    pub x_snapshot: Option<Signal>,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub x_initial: Signal,
    pub x_final: Signal,
    pub initial_divergence: f64,
    pub divergence: f64,
    pub iterations: usize,
    pub stop_reason: StopReason,
    /// `I(x^T || x^{T-1})` for the last iteration.
    pub final_step_div: f64,
    pub gradient: Vec<f64>,
    pub kt: KtReport,
    pub trace: Vec<IterationRecord>,
    pub hessian_spectrum: Option<Spectrum>,
    /// Seed the starting point was drawn from, if it was drawn.
    pub seed: Option<u64>,
    /// Whether `I(x_final || x^t)` decreased along the recorded snapshots.
    /// Only available with `record_x_snapshots`.
    pub proviso_monotone: Option<bool>,
}

/// One multiplicative update.
pub fn update_step(y: &Observations, x: &Signal) -> Result<Signal> {
    y.check_signal(x)?;
    let conv = autoconvolve(x);
    let (ys, xs) = (y.as_slice(), x.as_slice());
    let c = y.c();
    let mut next = vec![0.0; xs.len()];
    for (j, out) in next.iter_mut().enumerate() {
        if xs[j] == 0.0 {
            continue;
        }
        let mut acc = 0.0;
        for (l, &xl) in xs.iter().enumerate() {
            if xl == 0.0 {
                continue;
            }
            let k = l + j;
            acc += xl * data_ratio(ys[k], conv[k]).ok_or(Error::UndefinedUpdate { index: j, k })?;
        }
        *out = xs[j] * acc / c;
    }
    Signal::new(next)
}

/// The same update written as `x'_j = x_j (1 - grad_j / (2c))`.
///
/// Only valid on the simplex `sum x = c`.
pub fn update_step_gradient_form(y: &Observations, x: &Signal) -> Result<Signal> {
    y.check_signal(x)?;
    let c = y.c();
    if (x.sum() - c).abs() > 1e-10 * c {
        return Err(Error::usage(format!(
            "x is off the simplex: sum x = {} but c = {c}",
            x.sum()
        )));
    }
    let g = gradient(y, x)?;
    let next = x
        .as_slice()
        .iter()
        .zip(&g)
        .map(|(&xj, &gj)| (xj * (1.0 - gj / (2.0 * c))).max(0.0))
        .collect();
    Signal::new(next)
}

/// Iterates the update from `x0` until a stopping rule fires.
pub fn run(y: &Observations, x0: &Signal, cfg: &SolverConfig) -> Result<RunResult> {
    run_seeded(y, x0, cfg, None)
}

pub(crate) fn run_seeded(
    y: &Observations,
    x0: &Signal,
    cfg: &SolverConfig,
    seed: Option<u64>,
) -> Result<RunResult> {
    cfg.validate()?;
    y.check_signal(x0)?;
    if !cfg.allow_boundary_start && !x0.is_strictly_positive() {
        return Err(Error::usage(
            "starting point has zero entries; enable boundary starts to allow this",
        ));
    }
    let c = y.c();
    let step_tol = cfg.tol_step * c;
    let exact_tol = 1e-14 * y.total();

    let initial_divergence = objective(y, x0)?;
    if initial_divergence.is_infinite() {
        return Err(Error::InfiniteDivergence { iteration: 0 });
    }

    let mut x = x0.clone();
    let mut divergence = initial_divergence;
    let mut trace = Vec::new();
    let mut stop_reason = StopReason::MaxIters;
    let mut iterations = 0;
    let mut final_step_div = f64::NAN;

    for t in 1..=cfg.max_iters {
        let next = update_step(y, &x)?;
        let step_div = i_divergence(next.as_slice(), x.as_slice())?;
        let step_l1 = next
            .as_slice()
            .iter()
            .zip(x.as_slice())
            .map(|(a, b)| (a - b).abs())
            .sum();
        let next_div = objective(y, &next)?;
        if next_div.is_infinite() {
            return Err(Error::InfiniteDivergence { iteration: t });
        }
        if cfg.record_trace {
            trace.push(IterationRecord {
                t,
                divergence: next_div,
                step_div,
                step_l1,
                x_snapshot: cfg.record_x_snapshots.then(|| next.clone()),
            });
        }
        x = next;
        divergence = next_div;
        iterations = t;
        final_step_div = step_div;
        if divergence <= exact_tol {
            stop_reason = StopReason::ExactMatch;
            break;
        }
        if step_div <= step_tol {
            stop_reason = StopReason::Tolerance;
            break;
        }
    }

    let grad = gradient(y, &x)?;
    let kt = kuhn_tucker_check(y, &x, cfg.tol_grad, cfg.zero_threshold * c)?;
    let hessian_spectrum = if cfg.hessian_spectrum {
        hessian(y, &x).ok().map(|h| h.spectrum())
    } else {
        None
    };
    let proviso_monotone = if cfg.record_trace && cfg.record_x_snapshots {
        let dists = trace
            .iter()
            .filter_map(|r| r.x_snapshot.as_ref())
            .map(|s| i_divergence(x.as_slice(), s.as_slice()))
            .collect::<Result<Vec<f64>>>()?;
        Some(
            dists
                .windows(2)
                .all(|w| w[1] <= w[0] + 1e-12 * (1.0 + w[0])),
        )
    } else {
        None
    };

    Ok(RunResult {
        x_initial: x0.clone(),
        x_final: x,
        initial_divergence,
        divergence,
        iterations,
        stop_reason,
        final_step_div,
        gradient: grad,
        kt,
        trace,
        hessian_spectrum,
        seed,
        proviso_monotone,
    })
}
