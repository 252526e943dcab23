//! Pointwise transport of a Dym profile to a Qiao profile and back.
//!
//! `x = X - ln(U)/2` and `1/u = (1/P)(1 - P_X/P)` with `P = sqrt(U)`.

use serde::{Deserialize, Serialize};

use super::fd::derivative;
use super::grid::{Boundary, Grid1D, GridField};
use super::NumericError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interpolation {
    /// Fritsch-Butland monotone cubic Hermite.
    MonotoneCubic,
    /// Eight-point Lagrange, degree seven.
    Lagrange8,
}

struct Periodic<'a> {
    nodes: &'a [f64],
    vals: &'a [f64],
    period: f64,
}

impl Periodic<'_> {
    fn x(&self, k: isize) -> f64 {
        let n = self.nodes.len() as isize;
        self.nodes[k.rem_euclid(n) as usize] + self.period * k.div_euclid(n) as f64
    }

    fn v(&self, k: isize) -> f64 {
        self.vals[k.rem_euclid(self.nodes.len() as isize) as usize]
    }

    /// `(j, t')` with `x(j) <= t' < x(j+1)` and `t'` congruent to `t`.
    fn locate(&self, t: f64) -> (isize, f64) {
        let x0 = self.nodes[0];
        let t = x0 + (t - x0).rem_euclid(self.period);
        let j = self.nodes.partition_point(|x| *x <= t) as isize - 1;
        (j, t)
    }

    fn slope(&self, k: isize) -> f64 {
        (self.v(k + 1) - self.v(k)) / (self.x(k + 1) - self.x(k))
    }

    fn tangent(&self, k: isize) -> f64 {
        let (d0, d1) = (self.slope(k - 1), self.slope(k));
        if d0 * d1 <= 0.0 {
            return 0.0;
        }
        let (h0, h1) = (self.x(k) - self.x(k - 1), self.x(k + 1) - self.x(k));
        let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
        (w1 + w2) / (w1 / d0 + w2 / d1)
    }

    fn eval(&self, t: f64, method: Interpolation) -> f64 {
        let (j, t) = self.locate(t);
        match method {
            Interpolation::Lagrange8 => {
                let ks: Vec<isize> = (j - 3..=j + 4).collect();
                let mut s = 0.0;
                for &a in &ks {
                    let mut w = 1.0;
                    for &b in &ks {
                        if a != b {
                            w *= (t - self.x(b)) / (self.x(a) - self.x(b));
                        }
                    }
                    s += w * self.v(a);
                }
                s
            }
            Interpolation::MonotoneCubic => {
                let (xa, xb) = (self.x(j), self.x(j + 1));
                let h = xb - xa;
                let s = (t - xa) / h;
                let (ya, yb) = (self.v(j), self.v(j + 1));
                let (ma, mb) = (self.tangent(j), self.tangent(j + 1));
                let s2 = s * s;
                let s3 = s2 * s;
                (2.0 * s3 - 3.0 * s2 + 1.0) * ya
                    + (s3 - 2.0 * s2 + s) * h * ma
                    + (-2.0 * s3 + 3.0 * s2) * yb
                    + (s3 - s2) * h * mb
            }
        }
    }
}

/// Interpolates periodic samples at increasing `nodes` onto `targets`.
pub fn interpolate_periodic(nodes: &[f64], vals: &[f64], period: f64, targets: &[f64], method: Interpolation) -> Vec<f64> {
    let p = Periodic { nodes, vals, period };
    targets.iter().map(|t| p.eval(*t, method)).collect()
}

#[derive(Clone, Debug)]
pub struct Transported {
    /// `x(X_i)` at the source nodes.
    pub x_nodes: Vec<f64>,
    pub u_nodes: Vec<f64>,
    /// `u` on the uniform x-grid.
    pub u: GridField,
    /// `ln(U)/2 = X - x` on the uniform x-grid.
    pub shift: GridField,
}

/// Set `drop_slope` to use the mutated `u = P`, which omits the `P_X` term.
pub fn transport(big_u: &GridField, method: Interpolation, drop_slope: bool) -> Result<Transported, NumericError> {
    let g = &big_u.grid;
    if g.boundary != Boundary::Periodic {
        return Err(NumericError::Config("transport needs a periodic grid".into()));
    }
    if big_u.min() <= 0.0 {
        return Err(NumericError::Floor { time: big_u.time, min: big_u.min() });
    }
    let ux = derivative(&big_u.values, g.h, 1, true);
    let mut x_nodes = Vec::with_capacity(g.points);
    let mut u_nodes = Vec::with_capacity(g.points);
    let mut shift = Vec::with_capacity(g.points);
    for i in 0..g.points {
        let uu = big_u.values[i];
        let jac = 1.0 - ux[i] / (2.0 * uu);
        if jac <= 0.0 {
            return Err(NumericError::NotMonotone { index: i, jacobian: jac });
        }
        let s = 0.5 * uu.ln();
        x_nodes.push(g.x(i) - s);
        shift.push(s);
        u_nodes.push(if drop_slope { uu.sqrt() } else { uu.sqrt() / jac });
    }
    if let Some(i) = (1..g.points).find(|&i| x_nodes[i] <= x_nodes[i - 1]) {
        return Err(NumericError::NotMonotone { index: i, jacobian: 0.0 });
    }
    let xg = Grid1D::periodic(g.x_min, g.x_max, g.points);
    let targets = xg.coords();
    let u = interpolate_periodic(&x_nodes, &u_nodes, g.length(), &targets, method);
    let sh = interpolate_periodic(&x_nodes, &shift, g.length(), &targets, method);
    Ok(Transported {
        x_nodes,
        u_nodes,
        u: GridField::new(xg.clone(), u, big_u.time),
        shift: GridField::new(xg, sh, big_u.time),
    })
}

/// Rebuilds `U` on `target` from the uniform-x data: `X = x + shift`, `U = exp(2 shift)`.
pub fn inverse_transport(t: &Transported, target: &Grid1D, method: Interpolation) -> Result<GridField, NumericError> {
    let xg = &t.shift.grid;
    let nodes: Vec<f64> = (0..xg.points).map(|j| xg.x(j) + t.shift.values[j]).collect();
    if let Some(i) = (1..nodes.len()).find(|&i| nodes[i] <= nodes[i - 1]) {
        return Err(NumericError::NotMonotone { index: i, jacobian: 0.0 });
    }
    let vals: Vec<f64> = t.shift.values.iter().map(|s| (2.0 * s).exp()).collect();
    let u = interpolate_periodic(&nodes, &vals, xg.length(), &target.coords(), method);
    Ok(GridField::new(target.clone(), u, t.u.time))
}
