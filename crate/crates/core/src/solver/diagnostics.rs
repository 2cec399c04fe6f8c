//! Per-step identities that hold along the iterates.

use crate::divergence::i_divergence;
use crate::error::{Error, Result};
use crate::lifted::{best_y, i_divergence_matrix, LiftedW};
use crate::objective::objective;
use crate::signal::{Observations, Signal};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    /// `I(x_next || x_prev)`.
    pub div_x: f64,
    /// `I(W_next || W_prev)` as `2c * div_x`.
    pub div_w: f64,
    /// `I(W_next || W_prev)` summed over the band.
    pub div_w_direct: f64,
    /// `sum_j |x_next_j - x_prev_j|`.
    pub l1: f64,
    /// `l1 <= sqrt(div_w) + 1e-12`.
    pub pinsker_ok: bool,
}

impl StepDiagnostics {
    /// `|div_w - div_w_direct|` relative to `1 + div_w_direct`.
    pub fn relative_gap(&self) -> f64 {
        (self.div_w - self.div_w_direct).abs() / (1.0 + self.div_w_direct)
    }
}

/// Compares two consecutive iterates lying on the same simplex `sum x = c`.
pub fn step_diagnostics(x_prev: &Signal, x_next: &Signal) -> Result<StepDiagnostics> {
    if x_prev.len() != x_next.len() {
        return Err(Error::usage("step diagnostics: iterates differ in length"));
    }
    let c = x_next.sum();
    if (x_prev.sum() - c).abs() > 1e-10 * c {
        return Err(Error::usage(format!(
            "step diagnostics need both iterates on one simplex (sums {} and {c})",
            x_prev.sum()
        )));
    }
    let div_x = i_divergence(x_next.as_slice(), x_prev.as_slice())?;
    let div_w = 2.0 * c * div_x;
    let div_w_direct = i_divergence_matrix(
        &LiftedW::new(x_next.clone()).matrix(),
        &LiftedW::new(x_prev.clone()).matrix(),
    )?;
    let l1 = x_next
        .as_slice()
        .iter()
        .zip(x_prev.as_slice())
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>();
    Ok(StepDiagnostics {
        div_x,
        div_w,
        div_w_direct,
        l1,
        pinsker_ok: l1 <= div_w.sqrt() + 1e-12,
    })
}

/// Split of the objective decrease over one update:
/// `drop = I(Y^t || Y^{t+1}) + I(W^{t+1} || W^t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainCheck {
    /// `I(y || x^t*x^t) - I(y || x^{t+1}*x^{t+1})`.
    pub drop: f64,
    pub y_term: f64,
    pub w_term: f64,
}

impl GainCheck {
    pub fn relative_residual(&self) -> f64 {
        (self.drop - self.y_term - self.w_term).abs() / (1.0 + self.drop.abs())
    }
}

pub fn gain_decomposition(y: &Observations, x: &Signal, x_next: &Signal) -> Result<GainCheck> {
    let drop = objective(y, x)? - objective(y, x_next)?;
    let y_now = best_y(x, y)?;
    let y_next = best_y(x_next, y)?;
    Ok(GainCheck {
        drop,
        y_term: i_divergence_matrix(y_now.matrix(), y_next.matrix())?,
        w_term: i_divergence_matrix(
            &LiftedW::new(x_next.clone()).matrix(),
            &LiftedW::new(x.clone()).matrix(),
        )?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::update_step;

    fn sig(v: &[f64]) -> Signal {
        Signal::new(v.to_vec()).unwrap()
    }

    #[test]
    fn identical_iterates() {
        let x = sig(&[0.4, 1.6]);
        let d = step_diagnostics(&x, &x).unwrap();
        assert_eq!((d.div_x, d.div_w, d.l1), (0.0, 0.0, 0.0));
        assert_eq!(d.div_w_direct, 0.0);
        assert!(d.pinsker_ok);
    }

    #[test]
    fn consecutive_iterates() {
        let y = Observations::new(vec![0.8, 1.3, 2.2, 0.4, 1.9, 0.7, 0.2]).unwrap();
        let mut x = sig(&[0.11, 0.17, 0.13, 0.19]);
        x = update_step(&y, &x).unwrap();
        for _ in 0..30 {
            let next = update_step(&y, &x).unwrap();
            let d = step_diagnostics(&x, &next).unwrap();
            assert!(d.relative_gap() <= 1e-10, "{d:?}");
            assert!(d.pinsker_ok);
            let g = gain_decomposition(&y, &x, &next).unwrap();
            assert!(g.relative_residual() <= 1e-9, "{g:?}");
            x = next;
        }
    }

    #[test]
    fn off_simplex_rejected() {
        assert!(step_diagnostics(&sig(&[1.0, 1.0]), &sig(&[1.0, 2.0])).unwrap_err().is_usage());
    }

    #[test]
    fn support_shrink_reports_infinity() {
        let d = step_diagnostics(&sig(&[2.0, 0.0]), &sig(&[1.0, 1.0])).unwrap();
        assert_eq!(d.div_x, f64::INFINITY);
        assert_eq!(d.div_w_direct, f64::INFINITY);
    }
}
