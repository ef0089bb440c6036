//! Normalization of the diagonal Gaussian reference restricted to the prior box.

use statrs::function::erf::erfc;

use super::{StiffnessDiag, TiError};
use crate::model::PriorBox;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `log Phi(x)` for the standard normal CDF, accurate far into both tails.
pub fn log_ndtr(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x > 6.0 {
        // Phi(x) = 1 - Phi(-x), with Phi(-x) < 1e-9
        return (-0.5 * erfc(x / std::f64::consts::SQRT_2)).ln_1p();
    }
    if x > -20.0 {
        return (0.5 * erfc(-x / std::f64::consts::SQRT_2)).ln();
    }
    // Mills-ratio expansion: Phi(x) ~ phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8)
    let z = 1.0 / (x * x);
    let series = 1.0 - z * (1.0 - z * (3.0 - z * (15.0 - 105.0 * z)));
    -0.5 * x * x - (-x).ln() - HALF_LN_2PI + series.ln()
}

/// `log(Phi(b) - Phi(a))` for `a < b`.
pub fn log_ndtr_diff(a: f64, b: f64) -> f64 {
    debug_assert!(a <= b);
    // work on the side where both CDF values are small, avoiding 1 - Phi cancellation
    let (lo, hi) = if a + b > 0.0 { (-b, -a) } else { (a, b) };
    let l_hi = log_ndtr(hi);
    let l_lo = log_ndtr(lo);
    l_hi + (-(l_lo - l_hi).exp_m1()).ln()
}

/// Bounds beyond which the truncation of a coordinate is ignored.
const FAST_PATH: f64 = 8.0;

/// `log Z0 = sum_i [ log sqrt(2 pi / k_i) + log(Phi(b_i) - Phi(a_i)) ]` with
/// `a_i, b_i` the box edges relative to `w0_i` in units of `1/sqrt(k_i)`.
/// Without a box this is the untruncated Gaussian normalization.
pub fn log_z0(stiff: &StiffnessDiag, prior: Option<&PriorBox>) -> Result<f64, TiError> {
    let mut total = crate::stats::CompensatedSum::new();
    for (i, (&k, &c)) in stiff.k.iter().zip(&stiff.w0).enumerate() {
        total.add(HALF_LN_2PI - 0.5 * k.ln());
        let Some(b) = prior else { continue };
        let s = k.sqrt();
        let half = b.half_width(i);
        let lo = (-half - c) * s;
        let hi = (half - c) * s;
        if lo > 1.0 || hi < -1.0 {
            return Err(TiError::EmptyOverlap { index: i });
        }
        if lo < -FAST_PATH && hi > FAST_PATH {
            continue;
        }
        total.add(log_ndtr_diff(lo, hi));
    }
    let v = total.value();
    if !v.is_finite() {
        return Err(TiError::EmptyOverlap { index: usize::MAX });
    }
    Ok(v)
}
