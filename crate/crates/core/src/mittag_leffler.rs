use statrs::function::gamma::ln_gamma;

use crate::fde::FracOrder;
use crate::{Error, Result};

const MAX_TERMS: usize = 10_000;
const REL_CUTOFF: f64 = 1e-16;

/// One-parameter Mittag-Leffler function `E_α(z) = Σ_k z^k / Γ(αk + 1)`.
///
/// Plain power series, summed until a term drops below `1e-16` of the partial
/// sum. Terms are formed in log space so `Γ` never overflows. The alternating
/// series for large negative `z` loses digits to cancellation; arguments with
/// `|z| ≤ 10` are fine for `α` close to 1, and `|z| ≲ 3` is safe for any `α`.
/// `E_α(−t^α)` solves `D^α x = −x`, `x(0) = 1`.
pub fn mittag_leffler(alpha: FracOrder, z: f64) -> Result<f64> {
    if z == 0.0 {
        return Ok(1.0);
    }
    let a = alpha.value();
    let ln_abs_z = z.abs().ln();
    let negative = z < 0.0;

    let mut sum = 1.0;
    for k in 1..=MAX_TERMS {
        let kf = k as f64;
        let magnitude = (kf * ln_abs_z - ln_gamma(a * kf + 1.0)).exp();
        let term = if negative && k % 2 == 1 { -magnitude } else { magnitude };
        sum += term;
        if magnitude < REL_CUTOFF * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::NoConvergence { terms: MAX_TERMS })
}
