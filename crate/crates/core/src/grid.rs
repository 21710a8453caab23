use crate::error::{Error, Result};

/// Uniform time grid on `[t_start, t_end]` with `steps` intervals, i.e.
/// `steps + 1` sample points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, steps: usize) -> Result<Self> {
        if !t_start.is_finite() || !t_end.is_finite() {
            return Err(Error::InvalidParameter {
                name: "grid",
                message: "bounds must be finite".into(),
            });
        }
        if t_end <= t_start {
            return Err(Error::InvalidParameter {
                name: "grid",
                message: format!("t_end {t_end} must exceed t_start {t_start}"),
            });
        }
        if steps == 0 {
            return Err(Error::InvalidParameter {
                name: "grid",
                message: "steps must be at least 1".into(),
            });
        }
        Ok(Self {
            t_start,
            t_end,
            steps,
        })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// Number of intervals.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of sample points, `steps + 1`.
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / self.steps as f64
    }

    /// Sample point `k`; the last point is pinned to `t_end` exactly.
    pub fn at(&self, k: usize) -> f64 {
        if k >= self.steps {
            self.t_end
        } else {
            self.t_start + k as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.at(k)).collect()
    }
}
