//! Traveling-wave check of the n = 1 Miura map.
//!
//! `W = x_0` solves `W'' = c W + W^3/2`, so `x(z0, z2) = Xi(z0 - c z2)` with
//! `Xi' = W` is a potential mKdV solution. The Miura image
//! `q = (x_00 - x_0^2/2)/4` must satisfy `q_2 + q_000 + 12 q q_0 = 0`.

use serde::{Deserialize, Serialize};

use super::convergence::{Convergence, LadderPoint};
use super::fd::derivative;
use super::grid::{Grid1D, GridField};
use super::NumericError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolitonConfig {
    pub speed: f64,
    pub amplitude: f64,
    pub length: f64,
    /// Oracle RK4 substeps per grid spacing.
    pub substeps: usize,
}

impl Default for SolitonConfig {
    fn default() -> Self {
        SolitonConfig { speed: -1.0, amplitude: 0.8, length: 20.0, substeps: 16 }
    }
}

/// `Xi` at `xi_j = (j - pad) h` for `j in 0..points + 2 pad`, from `W(0) = amplitude, W'(0) = 0`.
pub fn oracle_profile(cfg: &SolitonConfig, h: f64, points: usize, pad: usize) -> Result<Vec<f64>, NumericError> {
    let c = cfg.speed;
    let f = |s: [f64; 3]| [s[1], c * s[0] + 0.5 * s[0].powi(3), s[0]];
    let step = |s: [f64; 3], dt: f64| {
        let add = |a: [f64; 3], k: [f64; 3], t: f64| [a[0] + t * k[0], a[1] + t * k[1], a[2] + t * k[2]];
        let k1 = f(s);
        let k2 = f(add(s, k1, dt / 2.0));
        let k3 = f(add(s, k2, dt / 2.0));
        let k4 = f(add(s, k3, dt));
        let mut o = s;
        for i in 0..3 {
            o[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        o
    };
    let march = |dir: f64, count: usize| -> Vec<f64> {
        let mut s = [cfg.amplitude, 0.0, 0.0];
        let dt = dir * h / cfg.substeps as f64;
        let mut out = vec![0.0];
        for _ in 0..count {
            for _ in 0..cfg.substeps {
                s = step(s, dt);
            }
            out.push(s[2]);
        }
        out
    };
    let back = march(-1.0, pad);
    let fwd = march(1.0, points + pad - 1);
    let mut xi: Vec<f64> = back.into_iter().skip(1).rev().collect();
    xi.extend(fwd);
    if xi.iter().any(|v| !v.is_finite()) {
        return Err(NumericError::Oracle("traveling-wave ODE blew up".into()));
    }
    Ok(xi)
}

/// Miura image `q = (x_00 - s x_0^2/2)/4`; `s = -1` is the sign-flipped mutation.
fn miura_q(x: &[f64], h: f64, sign: f64) -> Vec<f64> {
    let x1 = derivative(x, h, 1, false);
    let x2 = derivative(x, h, 2, false);
    x1.iter().zip(&x2).map(|(a, b)| (b - sign * 0.5 * a * a) / 4.0).collect()
}

/// Potential KdV residual of the Miura image on a `points`-point grid.
pub fn miura_residual(cfg: &SolitonConfig, points: usize, mutated: bool) -> Result<GridField, NumericError> {
    let grid = Grid1D::compact(0.0, cfg.length, points);
    let h = grid.h;
    if cfg.speed == 0.0 {
        return Err(NumericError::Config("traveling-wave speed must be nonzero".into()));
    }
    // one time step moves the profile by exactly one node
    let dt = h / cfg.speed.abs();
    let shift: isize = if -cfg.speed > 0.0 { 1 } else { -1 };
    let xi = oracle_profile(cfg, h, points, 1)?;
    let row = |k: isize| -> Vec<f64> { (0..points).map(|j| xi[(j as isize + 1 + k) as usize]).collect() };
    let sign = if mutated { -1.0 } else { 1.0 };
    let q = miura_q(&row(0), h, sign);
    let qp = miura_q(&row(shift), h, sign);
    let qm = miura_q(&row(-shift), h, sign);
    let q1 = derivative(&q, h, 1, false);
    let q3 = derivative(&q, h, 3, false);
    let r = (0..points)
        .map(|j| (qp[j] - qm[j]) / (2.0 * dt) + q3[j] + 12.0 * q[j] * q1[j])
        .collect();
    Ok(GridField::new(grid, r, 0.0))
}

pub fn miura_soliton_check(cfg: &SolitonConfig, ladder: &[usize], mutated: bool) -> Result<Convergence, NumericError> {
    let mut pts = Vec::new();
    for &n in ladder {
        let r = miura_residual(cfg, n, mutated)?;
        let range = 4..n - 4;
        pts.push(LadderPoint { points: n, h: r.grid.h, linf: r.linf(range.clone()), l2: r.l2(range) });
    }
    let label = if mutated { "Miura soliton (sign-flipped mutation)" } else { "Miura soliton" };
    Ok(Convergence::new(label, pts))
}
