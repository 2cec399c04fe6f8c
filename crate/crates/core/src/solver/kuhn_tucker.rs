use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::objective::gradient;
use crate::signal::{Observations, Signal};

/// Classification of one coordinate against the Kuhn-Tucker conditions
/// `grad_j = 0` where `x_j > 0` and `grad_j >= 0` where `x_j = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KtStatus {
    InteriorStationary,
    BoundaryOk,
    Violation,
}

impl KtStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            KtStatus::InteriorStationary => "interior-stationary",
            KtStatus::BoundaryOk => "boundary-ok",
            KtStatus::Violation => "violation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KtReport {
    pub status: Vec<KtStatus>,
    pub gradient: Vec<f64>,
    /// Absolute gradient tolerance that was applied.
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks the Kuhn-Tucker conditions at `x`.
///
/// The gradient tolerance is `tol_grad * (1 + 2c)`. The factor `2c` is the
/// natural scale: on the simplex the update multiplies `x_j` by
/// `1 - grad_j / (2c)`, so `tol_grad` bounds the relative change a further
/// iteration would make to an interior coordinate. Coordinates with
/// `x_j <= zero_threshold` are treated as sitting on the boundary.
pub fn kuhn_tucker_check(
    y: &Observations,
    x: &Signal,
    tol_grad: f64,
    zero_threshold: f64,
) -> Result<KtReport> {
    let grad = gradient(y, x)?;
    let tolerance = tol_grad * (1.0 + 2.0 * y.c());
    let status: Vec<KtStatus> = x
        .as_slice()
        .iter()
        .zip(&grad)
        .map(|(&xj, &gj)| {
            if xj > zero_threshold {
                if gj.abs() <= tolerance {
                    KtStatus::InteriorStationary
                } else {
                    KtStatus::Violation
                }
            } else if gj >= -tolerance {
                KtStatus::BoundaryOk
            } else {
                KtStatus::Violation
            }
        })
        .collect();
    let pass = status.iter().all(|s| *s != KtStatus::Violation);
    Ok(KtReport {
        status,
        gradient: grad,
        tolerance,
        pass,
    })
}
