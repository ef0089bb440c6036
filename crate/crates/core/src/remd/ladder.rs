use serde::{Deserialize, Serialize};

use super::RemdError;

/// Temperatures of the replica slots, coldest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemperatureLadder {
    temperatures: Vec<f64>,
}

impl TemperatureLadder {
    /// Any non-empty, non-decreasing list of positive temperatures. Repeated
    /// temperatures are allowed here (useful for diagnostics) but not by
    /// [`make_ladder`].
    pub fn from_temperatures(temperatures: Vec<f64>) -> Result<Self, RemdError> {
        if temperatures.is_empty() {
            return Err(RemdError::BadRange("empty ladder".into()));
        }
        if temperatures.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(RemdError::BadRange("temperatures must be positive".into()));
        }
        if temperatures.windows(2).any(|w| w[1] < w[0]) {
            return Err(RemdError::BadRange("temperatures must be sorted".into()));
        }
        Ok(Self { temperatures })
    }

    pub fn temperatures(&self) -> &[f64] {
        &self.temperatures
    }

    pub fn len(&self) -> usize {
        self.temperatures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.temperatures.is_empty()
    }
}

/// `T_i = T_min (T_max / T_min)^(i / (n - 1))` for `i = 0..n`.
pub fn make_ladder(t_min: f64, t_max: f64, n: usize) -> Result<TemperatureLadder, RemdError> {
    if !(t_min > 0.0 && t_min.is_finite() && t_max.is_finite() && t_max > t_min) {
        return Err(RemdError::BadRange(format!("need 0 < T_min < T_max, got {t_min}, {t_max}")));
    }
    if n < 2 {
        return Err(RemdError::BadRange(format!("need at least 2 temperatures, got {n}")));
    }
    let log_ratio = (t_max / t_min).ln();
    let mut temperatures: Vec<f64> = (0..n)
        .map(|i| t_min * (log_ratio * i as f64 / (n - 1) as f64).exp())
        .collect();
    temperatures[0] = t_min;
    temperatures[n - 1] = t_max;
    Ok(TemperatureLadder { temperatures })
}
