use num_traits::Float;

use crate::{Error, Result};

/// Uniform partition of `[t0, t1]` into `n` intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    t1: f64,
    n: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, n: usize) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite()) || t0 >= t1 {
            return Err(Error::InvalidInput("time grid needs t0 < t1"));
        }
        if n == 0 {
            return Err(Error::InvalidInput("time grid needs at least one interval"));
        }
        Ok(TimeGrid { t0, t1, n })
    }

    /// Default grid for the Riccati solvers on `[0, horizon]`:
    /// `max(2000, 400 T)` steps.
    pub fn for_horizon(horizon: f64) -> Result<Self> {
        let n = (400.0 * horizon).ceil().max(2000.0) as usize;
        TimeGrid::new(0.0, horizon, n)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    /// Number of intervals.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.t1 - self.t0) / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i <= self.n);
        if i == self.n {
            self.t1
        } else {
            self.t0 + i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |i| self.node(i))
    }

    /// Same span, twice the number of intervals.
    pub fn refined(&self) -> Self {
        TimeGrid { n: 2 * self.n, ..*self }
    }

    /// Interval index `i` and offset `t - t_i`, with `t` clamped to the grid.
    pub(crate) fn locate(&self, t: f64) -> (usize, f64) {
        let h = self.step();
        let t = t.max(self.t0).min(self.t1);
        let i = (((t - self.t0) / h).floor() as usize).min(self.n - 1);
        (i, t - self.node(i))
    }

    /// Index of the node equal to `t` up to a relative tolerance.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let pos = (t - self.t0) / self.step();
        let i = pos.round();
        if i < 0.0 || i > self.n as f64 || (pos - i).abs() > 1e-9 {
            None
        } else {
            Some(i as usize)
        }
    }

    pub fn covers(&self, other: &TimeGrid) -> bool {
        let tol = 1e-12 * (1.0 + self.t1.abs());
        self.t0 <= other.t0 + tol && self.t1 >= other.t1 - tol
    }

    pub fn same_as(&self, other: &TimeGrid) -> bool {
        let tol = 1e-12 * (1.0 + self.t1.abs());
        self.n == other.n && (self.t0 - other.t0).abs() <= tol && (self.t1 - other.t1).abs() <= tol
    }
}
