//! Cubic Hermite evaluation on uniform grids.
//!
//! Node slopes come from the right-hand side of the ODE that produced the
//! values, so the interpolant is fourth-order accurate like the integrators.

use alloc::vec::Vec;

use crate::grid::TimeGrid;

#[inline]
pub(crate) fn hermite(y0: f64, y1: f64, d0: f64, d1: f64, h: f64, off: f64) -> f64 {
    let s = off / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// Node values plus node slopes of one scalar function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Series {
    pub vals: Vec<f64>,
    pub slopes: Vec<f64>,
}

impl Series {
    pub fn eval(&self, grid: &TimeGrid, t: f64) -> f64 {
        if t >= grid.t1() {
            return self.vals[grid.n()];
        }
        let (i, off) = grid.locate(t);
        if off == 0.0 {
            return self.vals[i];
        }
        hermite(
            self.vals[i],
            self.vals[i + 1],
            self.slopes[i],
            self.slopes[i + 1],
            grid.step(),
            off,
        )
    }
}
