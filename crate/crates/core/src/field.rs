//! The control field theta(x, t): the single object that parameterizes all
//! three local-equilibrium levels. A snapshot carries theta on cell centers
//! of the unit interval; a stack of snapshots interpolates in time as well.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// theta on the cell centers of a 1-D grid at a fixed time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ControlField {
    /// Cell-center coordinates, strictly increasing.
    pub xs: Vec<f64>,
    /// theta vector per cell.
    pub thetas: Vec<Vec<f64>>,
    pub time: f64,
}

impl ControlField {
    pub fn new(xs: Vec<f64>, thetas: Vec<Vec<f64>>, time: f64) -> Result<Self> {
        if xs.len() != thetas.len() || xs.is_empty() {
            return Err(CoreError::Input("control field grid/value mismatch".into()));
        }
        Ok(ControlField { xs, thetas, time })
    }

    /// Uniform field on `cells` cells of [0, 1].
    pub fn uniform(theta: Vec<f64>, cells: usize) -> Self {
        let xs = centers(cells);
        let thetas = vec![theta; cells];
        ControlField { xs, thetas, time: 0.0 }
    }

    /// Field from a profile function evaluated at cell centers of [0, 1].
    pub fn from_profile(f: &dyn Fn(f64) -> Vec<f64>, cells: usize) -> Self {
        let xs = centers(cells);
        let thetas = xs.iter().map(|&x| f(x)).collect();
        ControlField { xs, thetas, time: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.thetas[0].len()
    }

    pub fn cells(&self) -> usize {
        self.xs.len()
    }

    /// Cell spacing of a uniform grid.
    pub fn spacing(&self) -> f64 {
        if self.xs.len() > 1 {
            self.xs[1] - self.xs[0]
        } else {
            1.0
        }
    }

    /// Linear interpolation of theta at x, clamped at the grid ends.
    pub fn theta_at(&self, x: f64) -> Vec<f64> {
        let xs = &self.xs;
        if x <= xs[0] {
            return self.thetas[0].clone();
        }
        if x >= *xs.last().unwrap() {
            return self.thetas.last().unwrap().clone();
        }
        let i = match xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => return self.thetas[i].clone(),
            Err(i) => i - 1,
        };
        let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
        self.thetas[i]
            .iter()
            .zip(&self.thetas[i + 1])
            .map(|(a, b)| a + t * (b - a))
            .collect()
    }
}

/// Time-ordered stack of control-field snapshots.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ControlFieldHistory {
    pub snapshots: Vec<ControlField>,
}

impl ControlFieldHistory {
    pub fn new(snapshots: Vec<ControlField>) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(CoreError::Input("history needs at least one snapshot".into()));
        }
        if !snapshots.windows(2).all(|w| w[1].time >= w[0].time) {
            return Err(CoreError::Input("snapshots must be time-ordered".into()));
        }
        Ok(ControlFieldHistory { snapshots })
    }

    pub fn time_range(&self) -> (f64, f64) {
        (self.snapshots[0].time, self.snapshots.last().unwrap().time)
    }

    /// theta(x, t) by linear interpolation in t between snapshots and in x
    /// within each snapshot. Errors outside the covered time range.
    pub fn theta_at(&self, x: f64, t: f64) -> Result<Vec<f64>> {
        let (t0, t1) = self.time_range();
        let eps = 1e-12 * (1.0 + t1.abs());
        if t < t0 - eps || t > t1 + eps {
            return Err(CoreError::Input(format!(
                "t = {t} outside trajectory coverage [{t0}, {t1}]"
            )));
        }
        let snaps = &self.snapshots;
        let mut hi = snaps.len() - 1;
        let mut lo = 0;
        while lo + 1 < hi {
            let mid = (lo + hi) / 2;
            if snaps[mid].time <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (a, b) = (&snaps[lo], &snaps[hi]);
        let ta = a.theta_at(x);
        if (b.time - a.time).abs() < 1e-300 {
            return Ok(ta);
        }
        let tb = b.theta_at(x);
        let w = ((t - a.time) / (b.time - a.time)).clamp(0.0, 1.0);
        Ok(ta.iter().zip(&tb).map(|(p, q)| p + w * (q - p)).collect())
    }
}

fn centers(cells: usize) -> Vec<f64> {
    let h = 1.0 / cells as f64;
    (0..cells).map(|i| (i as f64 + 0.5) * h).collect()
}
