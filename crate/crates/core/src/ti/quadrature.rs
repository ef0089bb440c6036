//! Simpson quadrature on a uniform grid.

use super::TiError;

/// Quadrature weights for `n` uniformly spaced points with spacing `h`:
/// composite Simpson when the interval count is even, otherwise Simpson on
/// all but the last three intervals plus Simpson's 3/8 rule on those.
pub fn simpson_weights(n: usize, h: f64) -> Result<Vec<f64>, TiError> {
    if n < 3 {
        return Err(TiError::GridMismatch(format!("need at least 3 points, got {n}")));
    }
    let intervals = n - 1;
    let mut w = vec![0.0; n];
    let simpson_end = if intervals % 2 == 0 { intervals } else { intervals - 3 };
    for i in (0..simpson_end).step_by(2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if simpson_end < intervals {
        let s = simpson_end;
        for (j, c) in [1.0, 3.0, 3.0, 1.0].into_iter().enumerate() {
            w[s + j] += 3.0 * h / 8.0 * c;
        }
    }
    Ok(w)
}

/// Checks that `xs` is uniformly spaced and returns the spacing.
pub fn uniform_spacing(xs: &[f64]) -> Result<f64, TiError> {
    if xs.len() < 2 {
        return Err(TiError::GridMismatch("grid needs at least 2 points".into()));
    }
    let h = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    if !(h > 0.0) {
        return Err(TiError::GridMismatch("grid must be increasing".into()));
    }
    for (i, x) in xs.iter().enumerate() {
        if (x - (xs[0] + i as f64 * h)).abs() > 1e-9 * h {
            return Err(TiError::GridMismatch(format!("point {i} breaks uniform spacing")));
        }
    }
    Ok(h)
}

/// `int f` over the grid `xs` given samples `ys`.
pub fn simpson(xs: &[f64], ys: &[f64]) -> Result<f64, TiError> {
    if xs.len() != ys.len() {
        return Err(TiError::GridMismatch(format!("{} points but {} values", xs.len(), ys.len())));
    }
    let h = uniform_spacing(xs)?;
    let w = simpson_weights(xs.len(), h)?;
    Ok(w.iter().zip(ys).map(|(w, y)| w * y).sum())
}

/// Standard error of the quadrature for independent per-point errors.
pub fn simpson_std_error(xs: &[f64], errors: &[f64]) -> Result<f64, TiError> {
    let h = uniform_spacing(xs)?;
    let w = simpson_weights(xs.len(), h)?;
    Ok(w.iter().zip(errors).map(|(w, e)| (w * e).powi(2)).sum::<f64>().sqrt())
}

/// `n` uniform points on `[0, 1]`, endpoints exact.
pub fn lambda_grid(n: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    if let Some(last) = g.last_mut() {
        *last = 1.0;
    }
    g
}
