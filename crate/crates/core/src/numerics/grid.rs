//! Uniform 1D grids and sampled fields.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    Periodic,
    /// Values only trusted away from the ends; stencils trim the edges.
    CompactSupport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    pub h: f64,
    pub boundary: Boundary,
}

impl Grid1D {
    pub const MIN_POINTS: usize = 16;

    /// Periodic grid on `[x_min, x_max)`.
    pub fn periodic(x_min: f64, x_max: f64, points: usize) -> Self {
        assert!(points >= Self::MIN_POINTS, "grid needs at least 16 points");
        Grid1D {
            x_min,
            x_max,
            points,
            h: (x_max - x_min) / points as f64,
            boundary: Boundary::Periodic,
        }
    }

    /// Grid with both end points included.
    pub fn compact(x_min: f64, x_max: f64, points: usize) -> Self {
        assert!(points >= Self::MIN_POINTS, "grid needs at least 16 points");
        Grid1D {
            x_min,
            x_max,
            points,
            h: (x_max - x_min) / (points - 1) as f64,
            boundary: Boundary::CompactSupport,
        }
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + self.h * i as f64
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.x(i)).collect()
    }

    /// Indices where a stencil of half-width `w` is valid.
    pub fn interior(&self, w: usize) -> std::ops::Range<usize> {
        match self.boundary {
            Boundary::Periodic => 0..self.points,
            Boundary::CompactSupport => w..self.points - w,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub grid: Grid1D,
    pub values: Vec<f64>,
    pub time: f64,
}

impl GridField {
    pub fn new(grid: Grid1D, values: Vec<f64>, time: f64) -> Self {
        assert_eq!(grid.points, values.len());
        GridField { grid, values, time }
    }

    pub fn sample(grid: &Grid1D, time: f64, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.coords().into_iter().map(f).collect();
        GridField::new(grid.clone(), values, time)
    }

    pub fn constant(grid: &Grid1D, c: f64) -> Self {
        GridField::sample(grid, 0.0, |_| c)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Norms over the trusted region `range`.
    pub fn linf(&self, range: std::ops::Range<usize>) -> f64 {
        self.values[range].iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn l2(&self, range: std::ops::Range<usize>) -> f64 {
        let s: f64 = self.values[range].iter().map(|v| v * v).sum();
        (s * self.grid.h).sqrt()
    }

    /// Self-describing JSON (grid metadata plus values).
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("field serializes")
    }
}
