//! Observed orders of convergence.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderPoint {
    pub points: usize,
    pub h: f64,
    pub linf: f64,
    pub l2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub label: String,
    pub ladder: Vec<LadderPoint>,
    /// Least-squares slope of `log linf` against `log h`.
    pub slope: f64,
    /// Same fit for the L2 norm.
    pub slope_l2: f64,
}

/// Least-squares slope of `ys` against `xs`, both in log space.
pub fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.max(f64::MIN_POSITIVE).ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

impl Convergence {
    pub fn new(label: impl Into<String>, ladder: Vec<LadderPoint>) -> Self {
        let hs: Vec<f64> = ladder.iter().map(|p| p.h).collect();
        let inf: Vec<f64> = ladder.iter().map(|p| p.linf).collect();
        let l2: Vec<f64> = ladder.iter().map(|p| p.l2).collect();
        Convergence {
            label: label.into(),
            slope: log_slope(&hs, &inf),
            slope_l2: log_slope(&hs, &l2),
            ladder,
        }
    }

    pub fn finest(&self) -> &LadderPoint {
        self.ladder.iter().min_by(|a, b| a.h.total_cmp(&b.h)).expect("non-empty ladder")
    }

    pub fn csv_rows(&self) -> Vec<String> {
        self.ladder
            .iter()
            .map(|p| format!("{},{},{:e},{:e},{:e}", self.label, p.points, p.h, p.linf, p.l2))
            .collect()
    }
}

pub const CSV_HEADER: &str = "check,points,h,linf,l2";
