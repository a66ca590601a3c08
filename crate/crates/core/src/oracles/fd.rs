use crate::error::{Error, Result};

/// Default step for derivatives of `g(s)`.
pub const FD_STEP_G: f64 = 1e-3;

/// Central difference of order 1 or 2 at `s0`.
pub fn finite_diff<F: FnMut(f64) -> f64>(mut f: F, s0: f64, order: u8, step: f64) -> Result<f64> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidStep(step));
    }
    match order {
        1 => Ok((f(s0 + step) - f(s0 - step)) / (2.0 * step)),
        2 => {
            let (p, c, m) = (f(s0 + step), f(s0), f(s0 - step));
            Ok((p - 2.0 * c + m) / (step * step))
        }
        _ => Err(Error::InvalidParameter(format!("finite difference order must be 1 or 2, got {order}"))),
    }
}

/// One Richardson step on the central difference: `(4 D(step/2) - D(step)) / 3`.
pub fn finite_diff_richardson<F: FnMut(f64) -> f64>(mut f: F, s0: f64, order: u8, step: f64) -> Result<f64> {
    let coarse = finite_diff(&mut f, s0, order, step)?;
    let fine = finite_diff(&mut f, s0, order, 0.5 * step)?;
    Ok((4.0 * fine - coarse) / 3.0)
}
