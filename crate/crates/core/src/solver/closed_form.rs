use crate::error::{Error, Result};
use crate::signal::{Observations, Signal};

fn require_m1(y: &Observations) -> Result<()> {
    if y.m() != 1 {
        return Err(Error::usage(format!("closed form needs m = 1, got m = {}", y.m())));
    }
    Ok(())
}

/// Unique minimizer for `m = 1`:
/// `x_0 = (2 y_0 + y_1) / (2 sqrt(sum y))`, `x_1 = (2 y_2 + y_1) / (2 sqrt(sum y))`.
pub fn closed_form_m1(y: &Observations) -> Result<Signal> {
    require_m1(y)?;
    let denom = 2.0 * y.c();
    Signal::new(vec![(2.0 * y[0] + y[1]) / denom, (2.0 * y[2] + y[1]) / denom])
}

/// Whether `y = x*x` has an exact nonnegative solution for `m = 1`,
/// i.e. `y_1^2 = 4 y_0 y_2` to relative tolerance `1e-10`.
pub fn exact_match_condition_m1(y: &Observations) -> Result<bool> {
    require_m1(y)?;
    let lhs = y[1] * y[1];
    let rhs = 4.0 * y[0] * y[2];
    Ok((lhs - rhs).abs() <= 1e-10 * lhs.max(rhs))
}
