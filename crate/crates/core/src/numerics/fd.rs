//! Second-order centered stencils and residuals of symbolic equations on grids.

use std::collections::HashMap;

use num_traits::ToPrimitive;

use crate::jet::{Catalog, Expr, JetVar, Poly, SymbolKind};

use super::grid::{Boundary, GridField};
use super::NumericError;

fn at(v: &[f64], i: usize, k: isize, periodic: bool) -> f64 {
    let n = v.len() as isize;
    let j = i as isize + k;
    if periodic {
        v[j.rem_euclid(n) as usize]
    } else {
        v[j.clamp(0, n - 1) as usize]
    }
}

/// `d^order f / dx^order`; the third and fourth derivatives use five points.
/// On a non-periodic grid the two outermost points at each end are not valid.
pub fn derivative(f: &[f64], h: f64, order: usize, periodic: bool) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let g = |k: isize| at(f, i, k, periodic);
        *o = match order {
            0 => g(0),
            1 => (g(1) - g(-1)) / (2.0 * h),
            2 => (g(1) - 2.0 * g(0) + g(-1)) / (h * h),
            3 => (g(2) - 2.0 * g(1) + 2.0 * g(-1) - g(-2)) / (2.0 * h * h * h),
            4 => (g(2) - 4.0 * g(1) + 6.0 * g(0) - 4.0 * g(-1) + g(-2)) / (h * h * h * h),
            _ => panic!("stencil order {order} not available"),
        };
    }
    out
}

pub fn dx(f: &GridField, order: usize) -> GridField {
    let periodic = f.grid.boundary == Boundary::Periodic;
    GridField::new(f.grid.clone(), derivative(&f.values, f.grid.h, order, periodic), f.time)
}

/// A polynomial with f64 coefficients over numbered columns.
struct Compiled(Vec<(f64, Vec<(usize, i32)>)>);

impl Compiled {
    fn new(p: &Poly, index: &HashMap<JetVar, usize>) -> Self {
        Compiled(
            p.terms()
                .iter()
                .map(|(m, c)| {
                    let c = c.to_f64().unwrap_or(f64::NAN);
                    (c, m.pairs().iter().map(|(v, e)| (index[v], *e as i32)).collect())
                })
                .collect(),
        )
    }

    fn eval(&self, cols: &[Vec<f64>], i: usize) -> f64 {
        self.0
            .iter()
            .map(|(c, m)| m.iter().fold(*c, |t, (k, e)| t * cols[*k][i].powi(*e)))
            .sum()
    }
}

/// Inputs for [`fd_residual`].
#[derive(Default)]
pub struct FdInputs<'a> {
    /// Sampled undifferentiated fields, by name.
    pub fields: HashMap<&'a str, &'a GridField>,
    /// Sampled jets that are not spatial derivatives (e.g. `U_T`), by jet name.
    pub jets: HashMap<String, &'a GridField>,
    pub constants: HashMap<&'a str, f64>,
}

/// Pointwise value of a symbolic residual over `space`: spatial derivatives
/// come from stencils, other jets from `inputs.jets`, and algebraic
/// extensions from the square root of their defining square.
pub fn fd_residual(cat: &Catalog, e: &Expr, space: &str, inputs: &FdInputs) -> Result<GridField, NumericError> {
    let sv = cat
        .var_id(space)
        .ok_or_else(|| NumericError::Config(format!("unknown variable {space}")))?;
    let grid = inputs
        .fields
        .values()
        .next()
        .map(|f| f.grid.clone())
        .or_else(|| inputs.jets.values().next().map(|f| f.grid.clone()))
        .ok_or_else(|| NumericError::Config("no sampled fields".into()))?;
    let periodic = grid.boundary == Boundary::Periodic;
    let mut columns: HashMap<JetVar, Vec<f64>> = HashMap::new();
    let mut vars: Vec<JetVar> = e.vars().into_iter().collect();
    // extensions need the jets inside their square
    let mut k = 0;
    while k < vars.len() {
        let v = vars[k];
        if let SymbolKind::Extension { square } = &cat.symbol(v.field).kind {
            for w in square.vars() {
                if !vars.contains(&w) {
                    vars.push(w);
                }
            }
        }
        k += 1;
    }
    for v in &vars {
        let sym = cat.symbol(v.field);
        let name = cat.jet_name(v);
        if let Some(f) = inputs.jets.get(&name) {
            columns.insert(*v, f.values.clone());
            continue;
        }
        match &sym.kind {
            SymbolKind::Constant => {
                let c = inputs
                    .constants
                    .get(sym.name.as_str())
                    .ok_or_else(|| NumericError::Config(format!("no value for constant {}", sym.name)))?;
                columns.insert(*v, vec![*c; grid.points]);
            }
            SymbolKind::Extension { .. } => {}
            SymbolKind::Field => {
                let orders = cat.orders_by_var(v);
                if orders.iter().any(|(w, o)| *w != sv && *o > 0) {
                    return Err(NumericError::Config(format!("jet {name} has no sample")));
                }
                let order = orders.iter().find(|(w, _)| *w == sv).map(|(_, o)| *o as usize).unwrap_or(0);
                let f = inputs
                    .fields
                    .get(sym.name.as_str())
                    .ok_or_else(|| NumericError::Config(format!("no samples for field {}", sym.name)))?;
                columns.insert(*v, derivative(&f.values, grid.h, order, periodic));
            }
        }
    }
    for v in &vars {
        if let SymbolKind::Extension { square } = &cat.symbol(v.field).kind {
            let col: Vec<f64> = (0..grid.points)
                .map(|i| square.eval_f64(&mut |w: JetVar| columns[&w][i]).sqrt())
                .collect();
            columns.insert(*v, col);
        }
    }
    let index: HashMap<JetVar, usize> = vars.iter().enumerate().map(|(k, v)| (*v, k)).collect();
    let cols: Vec<Vec<f64>> = vars.iter().map(|v| columns.remove(v).expect("column")).collect();
    let (num, den) = (Compiled::new(e.num(), &index), Compiled::new(e.den(), &index));
    let values = (0..grid.points).map(|i| num.eval(&cols, i) / den.eval(&cols, i)).collect();
    Ok(GridField::new(grid, values, 0.0))
}
