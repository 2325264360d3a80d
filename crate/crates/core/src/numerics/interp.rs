//! Shape-preserving cubic interpolation (Fritsch–Carlson / PCHIP).
//!
//! Used to invert tabulated cumulative distributions: because the
//! interpolant never overshoots monotone data, inverting it through
//! [`MonotoneCubic::solve`] is always well posed on increasing tables,
//! which a natural cubic spline does not guarantee.

use crate::error::{Error, Result};

/// A C1 piecewise-cubic interpolant through `(xs[i], ys[i])` whose node
/// derivatives are limited so that every monotone run of the data stays
/// monotone in the interpolant (Fritsch & Carlson 1980).
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Derivative at each node after monotonicity limiting.
    ds: Vec<f64>,
}

impl MonotoneCubic {
    /// Builds the interpolant. `xs` must be strictly increasing, the same
    /// length as `ys`, with at least two finite points.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidParameter {
                name: "interpolation nodes",
                value: xs.len() as f64,
                reason: "xs and ys must have equal length",
            });
        }
        if xs.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "interpolation nodes",
                value: xs.len() as f64,
                reason: "need at least two points",
            });
        }
        for w in xs.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidParameter {
                    name: "xs",
                    value: w[1],
                    reason: "abscissae must be strictly increasing and finite",
                });
            }
        }
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "ys",
                value: f64::NAN,
                reason: "ordinates must be finite",
            });
        }

        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();

        let mut ds = vec![0.0; n];
        // interior nodes: weighted harmonic mean of the adjacent secants,
        // zero at local extrema (sign change or flat secant)
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] <= 0.0 {
                ds[i] = 0.0;
            } else {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                ds[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        ds[0] = endpoint_derivative(h[0], h.get(1).copied(), delta[0], delta.get(1).copied());
        ds[n - 1] = endpoint_derivative(
            h[n - 2],
            (n >= 3).then(|| h[n - 3]),
            delta[n - 2],
            (n >= 3).then(|| delta[n - 3]),
        );

        Ok(MonotoneCubic { xs, ys, ds })
    }

    /// Index of the segment containing `x` (clamped to the outermost ones).
    fn segment(&self, x: f64) -> usize {
        match self.xs.partition_point(|&xi| xi <= x) {
            0 => 0,
            k if k >= self.xs.len() => self.xs.len() - 2,
            k => k - 1,
        }
    }

    /// Evaluates the interpolant; `x` outside the node range is clamped to
    /// the nearest endpoint.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.ds[i] + h01 * self.ys[i + 1] + h11 * h * self.ds[i + 1]
    }

    /// Solves `eval(x) = y` for increasing data by bisection.
    ///
    /// `y` below the first ordinate (or above the last) returns the
    /// corresponding endpoint abscissa. Errors if the data is not strictly
    /// increasing, since the inverse is then ill defined.
    pub fn solve(&self, y: f64) -> Result<f64> {
        let n = self.ys.len();
        if self.ys.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter {
                name: "ys",
                value: y,
                reason: "inversion needs strictly increasing ordinates",
            });
        }
        if y <= self.ys[0] {
            return Ok(self.xs[0]);
        }
        if y >= self.ys[n - 1] {
            return Ok(self.xs[n - 1]);
        }
        let i = self.ys.partition_point(|&yi| yi <= y) - 1;
        let mut lo = self.xs[i];
        let mut hi = self.xs[i + 1];
        // interpolant is monotone on the segment, so bisection converges
        let tol = 1e-13 * (1.0 + hi.abs().max(lo.abs()));
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Three-point one-sided endpoint derivative with the Fritsch–Carlson
/// shape-preserving clamps. Falls back to the single secant when only two
/// data points exist.
fn endpoint_derivative(h0: f64, h1: Option<f64>, d0: f64, d1: Option<f64>) -> f64 {
    let (h1, d1) = match (h1, d1) {
        (Some(h1), Some(d1)) => (h1, d1),
        _ => return d0,
    };
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}
