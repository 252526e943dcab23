//! Time integration of the Harry Dym equation `U_T = k1 ((U^{-1/2})_XXX - (U^{-1/2})_X)`.

use serde::{Deserialize, Serialize};

use super::fd::derivative;
use super::grid::{Boundary, GridField};
use super::NumericError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DymConfig {
    pub k1: f64,
    /// `dt = cfl * h^3`.
    pub cfl: f64,
    /// `U` must stay above this everywhere.
    pub floor: f64,
    /// Per-step tolerance for the step-doubling estimate.
    pub step_tol: f64,
}

impl Default for DymConfig {
    fn default() -> Self {
        DymConfig { k1: 2.0, cfl: 0.1, floor: 1e-6, step_tol: 1e-10 }
    }
}

pub fn dym_rhs(u: &[f64], h: f64, k1: f64, periodic: bool) -> Vec<f64> {
    let g: Vec<f64> = u.iter().map(|v| 1.0 / v.sqrt()).collect();
    let g1 = derivative(&g, h, 1, periodic);
    let g3 = derivative(&g, h, 3, periodic);
    g3.iter().zip(&g1).map(|(a, b)| k1 * (a - b)).collect()
}

fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub struct DymRun {
    pub snapshots: Vec<GridField>,
    pub steps: usize,
    pub dt: f64,
}

/// Classical RK4 on a periodic grid; returns a snapshot at every requested time.
pub fn integrate_dym(u0: &GridField, times: &[f64], cfg: &DymConfig) -> Result<DymRun, NumericError> {
    if u0.grid.boundary != Boundary::Periodic {
        return Err(NumericError::Config("Dym integration needs a periodic grid".into()));
    }
    if cfg.cfl.is_nan() || cfg.cfl <= 0.0 {
        return Err(NumericError::Config("cfl must be positive".into()));
    }
    let h = u0.grid.h;
    let dt_max = cfg.cfl * h * h * h;
    let check = |u: &[f64], t: f64| -> Result<(), NumericError> {
        let m = u.iter().cloned().fold(f64::INFINITY, f64::min);
        if !m.is_finite() || m <= cfg.floor || u.iter().any(|v| !v.is_finite()) {
            return Err(NumericError::Floor { time: t, min: m });
        }
        Ok(())
    };
    let mut u = u0.values.clone();
    check(&u, u0.time)?;
    let mut t = u0.time;
    let mut steps = 0;
    let mut snapshots = Vec::new();
    let f = |u: &[f64]| dym_rhs(u, h, cfg.k1, true);
    for &target in times {
        if target < t {
            return Err(NumericError::Config("snapshot times must be increasing".into()));
        }
        let span = target - t;
        let nsteps = (span / dt_max).ceil() as usize;
        if nsteps > 0 {
            let dt = span / nsteps as f64;
            for _ in 0..nsteps {
                u = rk4_step(&u, dt, &f);
                t += dt;
                steps += 1;
                check(&u, t)?;
            }
        }
        t = target;
        snapshots.push(GridField::new(u0.grid.clone(), u.clone(), t));
    }
    Ok(DymRun { snapshots, steps, dt: dt_max })
}

fn rk4_step(u: &[f64], dt: f64, f: &impl Fn(&[f64]) -> Vec<f64>) -> Vec<f64> {
    let k1 = f(u);
    let k2 = f(&axpy(u, dt / 2.0, &k1));
    let k3 = f(&axpy(u, dt / 2.0, &k2));
    let k4 = f(&axpy(u, dt, &k3));
    (0..u.len())
        .map(|i| u[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Largest difference between one step and two half steps over `steps`
/// consecutive steps from `u0`.
pub fn step_doubling_estimate(u0: &GridField, cfg: &DymConfig, steps: usize) -> f64 {
    let h = u0.grid.h;
    let dt = cfg.cfl * h * h * h;
    let f = |u: &[f64]| dym_rhs(u, h, cfg.k1, true);
    let mut u = u0.values.clone();
    let mut worst = 0.0f64;
    for _ in 0..steps {
        let full = rk4_step(&u, dt, &f);
        let half = rk4_step(&rk4_step(&u, dt / 2.0, &f), dt / 2.0, &f);
        let d = full.iter().zip(&half).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        worst = worst.max(d);
        u = half;
    }
    worst
}
