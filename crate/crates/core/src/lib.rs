//! Nonnegative deautoconvolution.
//!
//! Given data `y` of length `2m + 1`, find `x >= 0` of length `m + 1`
//! minimizing the I-divergence `I(y || x*x)` between the data and the
//! autoconvolution of `x`. The solver is a multiplicative fixed-point
//! iteration obtained by alternating two closed-form minimizations in a
//! lifted space of banded matrices.
//!
//! ```
//! use deautoconv::{multi_start, Observations, SolverConfig};
//!
//! let y = Observations::new(vec![1.0, 4.0, 10.0, 12.0, 9.0]).unwrap();
//! let res = multi_start(&y, &SolverConfig { n_starts: 4, ..Default::default() }).unwrap();
//! let best = res.best();
//! assert!(best.divergence < 1e-10);
//! assert!(best.kt.pass);
//! ```

pub mod divergence;
pub mod error;
pub mod experiment;
pub mod io;
pub mod lifted;
pub mod objective;
pub mod signal;
pub mod solver;

pub use divergence::i_divergence;
pub use error::{Error, Result};
pub use lifted::{
    best_w, best_y, check_pythagoras_w, check_pythagoras_y, i_divergence_matrix, rank_one_x,
    rectify, BandedMatrix, LiftedW, LiftedY, PythagorasReport,
};
pub use objective::{autoconvolve, gradient, hessian, objective, HessianDecomposition, Spectrum};
pub use signal::{normalize_probability, pad_to_odd, Observations, Signal};
pub use solver::{
    closed_form_m1, exact_match_condition_m1, gain_decomposition, kuhn_tucker_check, multi_start,
    run, step_diagnostics, update_step, update_step_gradient_form, InitPolicy, IterationRecord,
    KtReport, KtStatus, MultiStartResult, RunResult, SolverConfig, StopReason,
};
