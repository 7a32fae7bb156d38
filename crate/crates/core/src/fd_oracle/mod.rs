//! Explicit finite-difference solver for `F_tt − F_xx = −(m²/2) e^F`,
//! used to cross-check the constructive solution.
//!
//! The grid is `x_j = j h`, `t_n = n k` with `k = λ h`. Each step discards
//! one cell at either end, so every stored value depends only on Cauchy
//! data and no boundary condition is ever imposed. Negative times come
//! from solving forward with data `(f1, −f2)` and reflecting.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::liouville_map::{InitialData, JetField, MapError};
use crate::smooth_fn::ExprError;

/// Values with `|F|` beyond this abort the run.
pub const BLOW_UP_BOUND: f64 = 700.0;

/// Layers shorter than this are updated sequentially.
const PAR_THRESHOLD: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FdError {
    #[error("Courant ratio {0} outside (0, 1]")]
    Cfl(f64),
    #[error("invalid grid parameters: {0}")]
    InvalidGrid(String),
    #[error("initial data at x = {x}: {source}")]
    Data { x: f64, source: ExprError },
    #[error("|F| exceeded {BLOW_UP_BOUND} at t = {t}, x = {x}")]
    BlowUp { t: f64, x: f64 },
    #[error("grids are not nested: {0}")]
    GridMismatch(String),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// One time level; `values[i]` sits at `x = (i − half_width) h`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level {
    pub n: i64,
    pub half_width: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridField {
    pub h: f64,
    pub k: f64,
    pub lambda: f64,
    /// Number of steps taken in each time direction.
    pub steps: usize,
    /// Half width, in cells, of the final layers.
    pub final_half_width: usize,
    /// Levels ordered from `n = −steps` to `n = steps`.
    pub levels: Vec<Level>,
}

impl GridField {
    pub fn x(&self, j: i64) -> f64 {
        j as f64 * self.h
    }

    pub fn t(&self, n: i64) -> f64 {
        n as f64 * self.k
    }

    pub fn level(&self, n: i64) -> Option<&Level> {
        let idx = n + self.steps as i64;
        usize::try_from(idx).ok().and_then(|i| self.levels.get(i))
    }

    /// `F(n k, j h)` if the point is stored.
    pub fn value(&self, n: i64, j: i64) -> Option<f64> {
        let l = self.level(n)?;
        let i = j + l.half_width as i64;
        usize::try_from(i).ok().and_then(|i| l.values.get(i).copied())
    }

    pub fn time_extent(&self) -> f64 {
        self.t(self.steps as i64)
    }

    pub fn space_extent(&self) -> f64 {
        self.x(self.final_half_width as i64)
    }

    /// `(t, x, F)` for every stored point, by increasing `t` then `x`.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.levels.iter().flat_map(move |l| {
            let w = l.half_width as i64;
            l.values
                .iter()
                .enumerate()
                .map(move |(i, v)| (self.t(l.n), self.x(i as i64 - w), *v))
        })
    }

    /// The same grid filled with values of `field`.
    pub fn sample<F: JetField + ?Sized>(&self, field: &F) -> Result<GridField, FdError> {
        let mut out = self.clone();
        for l in &mut out.levels {
            let t = l.n as f64 * self.k;
            let w = l.half_width as i64;
            let h = self.h;
            l.values = (0..l.values.len())
                .into_par_iter()
                .map(|i| field.value(t, (i as i64 - w) as f64 * h))
                .collect::<Result<_, _>>()?;
        }
        Ok(out)
    }
}

fn cells(extent: f64, step: f64) -> usize {
    // Small slack so that exact multiples are not rounded up.
    ((extent / step) - 1e-9).ceil().max(0.0) as usize
}

fn eval(e: &crate::smooth_fn::SmoothExpr, x: f64, order: usize) -> Result<Vec<f64>, FdError> {
    e.jet_generic(&x, order).map_err(|source| FdError::Data { x, source })
}

/// Marches `steps` levels forward from the given data. Returns levels
/// `0..=steps` with half widths `w0, w0 − 1, ...`.
fn march(
    d: &InitialData,
    f2_sign: f64,
    h: f64,
    k: f64,
    w0: usize,
    steps: usize,
) -> Result<Vec<Vec<f64>>, FdError> {
    let m2h = 0.5 * d.m * d.m;
    let lam2 = (k / h).powi(2);
    let xs = |w: usize| (0..2 * w + 1).map(move |i| (i as i64 - w as i64) as f64 * h);

    let first: Vec<(f64, f64)> = xs(w0)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|x| {
            let f1 = eval(&d.f1, x, 2)?;
            let f2 = d.f2.eval(x).map_err(|source| FdError::Data { x, source })?;
            let ftt = f1[2] - m2h * f1[0].exp();
            Ok((f1[0], f1[0] + k * f2_sign * f2 + 0.5 * k * k * ftt))
        })
        .collect::<Result<_, FdError>>()?;
    let layer0: Vec<f64> = first.iter().map(|p| p.0).collect();
    let mut levels = vec![layer0];
    if steps == 0 {
        return Ok(levels);
    }
    // The Taylor layer is trimmed like any other so widths shrink by one.
    let layer1: Vec<f64> = first[1..first.len() - 1].iter().map(|p| p.1).collect();
    check_layer(&layer1, k, h, w0 - 1)?;
    levels.push(layer1);

    for n in 1..steps {
        let cur = &levels[n];
        let prev = &levels[n - 1];
        let update = |i: usize| {
            // `cur[i + 1]` is the centre; `prev` is one cell wider on each side.
            let c = cur[i + 1];
            2.0 * c - prev[i + 2] + lam2 * (cur[i + 2] - 2.0 * c + cur[i]) - k * k * m2h * c.exp()
        };
        let len = cur.len() - 2;
        let next: Vec<f64> = if len >= PAR_THRESHOLD {
            (0..len).into_par_iter().map(update).collect()
        } else {
            (0..len).map(update).collect()
        };
        check_layer(&next, (n + 1) as f64 * k, h, w0 - n - 1)?;
        levels.push(next);
    }
    Ok(levels)
}

fn check_layer(values: &[f64], t: f64, h: f64, w: usize) -> Result<(), FdError> {
    match values.iter().position(|v| v.is_nan() || v.abs() > BLOW_UP_BOUND) {
        Some(i) => Err(FdError::BlowUp {
            t,
            x: (i as i64 - w as i64) as f64 * h,
        }),
        None => Ok(()),
    }
}

/// Solves on `|t| <= t_extent`, keeping at least `|x| <= x_extent` at the
/// final times. Initial data are sampled on `|x| <= x_extent + N h`, `N`
/// the number of steps.
pub fn fd_solve(
    d: &InitialData,
    x_extent: f64,
    t_extent: f64,
    h: f64,
    lambda: f64,
) -> Result<GridField, FdError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(FdError::Cfl(lambda));
    }
    if !(h > 0.0 && h.is_finite()) || x_extent.is_nan() || x_extent < 0.0 || t_extent.is_nan() || t_extent < 0.0 {
        return Err(FdError::InvalidGrid(format!(
            "h = {h}, x_extent = {x_extent}, t_extent = {t_extent}"
        )));
    }
    let k = lambda * h;
    let steps = cells(t_extent, k);
    let final_w = cells(x_extent, h);
    let w0 = final_w + steps;
    if w0 > 50_000_000 {
        return Err(FdError::InvalidGrid(format!("{w0} cells requested")));
    }

    let (fwd, bwd) = rayon::join(
        || march(d, 1.0, h, k, w0, steps),
        || march(d, -1.0, h, k, w0, steps),
    );
    let (fwd, bwd) = (fwd?, bwd?);

    let mut levels = Vec::with_capacity(2 * steps + 1);
    for (n, values) in bwd.into_iter().enumerate().skip(1).rev() {
        levels.push(Level { n: -(n as i64), half_width: w0 - n, values });
    }
    for (n, values) in fwd.into_iter().enumerate() {
        levels.push(Level { n: n as i64, half_width: w0 - n, values });
    }
    Ok(GridField {
        h,
        k,
        lambda,
        steps,
        final_half_width: final_w,
        levels,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunDiscrepancy {
    pub h: f64,
    pub sup: f64,
    /// `sqrt(h_c k_c Σ e²)` over the common points (coarsest spacing).
    pub l2: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub runs: Vec<RunDiscrepancy>,
    /// `log₂(e(h_i)/e(h_{i+1}))` of consecutive sup errors.
    pub observed_orders: Vec<f64>,
}

/// Rectangle `[−t_max, t_max] × [−x_max, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Region {
    pub t_max: f64,
    pub x_max: f64,
}

/// Compares each run with `exact` on the coarsest run's points inside
/// `region`. Runs must be ordered by halving steps with a common ratio.
pub fn compare_and_order<F: JetField + ?Sized>(
    exact: &F,
    runs: &[GridField],
    region: Region,
) -> Result<ComparisonReport, FdError> {
    let Some(coarse) = runs.first() else {
        return Err(FdError::GridMismatch("no runs".into()));
    };
    let nt = ((region.t_max / coarse.k) + 1e-9).floor() as i64;
    let nx = ((region.x_max / coarse.h) + 1e-9).floor() as i64;
    let points: Vec<(i64, i64)> = (-nt..=nt)
        .flat_map(|n| (-nx..=nx).map(move |j| (n, j)))
        .collect();

    let exact_values: Vec<f64> = points
        .par_iter()
        .map(|&(n, j)| exact.value(coarse.t(n), coarse.x(j)))
        .collect::<Result<_, _>>()?;

    let mut out = Vec::with_capacity(runs.len());
    for run in runs {
        let ratio = coarse.h / run.h;
        let r = ratio.round();
        if (ratio - r).abs() > 1e-9 || r < 1.0 || (coarse.lambda - run.lambda).abs() > 1e-12 {
            return Err(FdError::GridMismatch(format!(
                "h = {} does not refine h = {} at equal Courant ratio",
                run.h, coarse.h
            )));
        }
        let r = r as i64;
        let mut sup: f64 = 0.0;
        let mut sq = 0.0;
        for (&(n, j), e) in points.iter().zip(&exact_values) {
            let v = run.value(n * r, j * r).ok_or_else(|| {
                FdError::GridMismatch(format!(
                    "point (t, x) = ({}, {}) missing from run with h = {}",
                    coarse.t(n),
                    coarse.x(j),
                    run.h
                ))
            })?;
            let err = (v - e).abs();
            sup = if err.is_nan() { f64::NAN } else { sup.max(err) };
            sq += err * err;
        }
        out.push(RunDiscrepancy {
            h: run.h,
            sup,
            l2: (sq * coarse.h * coarse.k).sqrt(),
            points: points.len(),
        });
    }
    let observed_orders = out.windows(2).map(|w| (w[0].sup / w[1].sup).log2()).collect();
    Ok(ComparisonReport {
        runs: out,
        observed_orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville_map::{build_quartet, ProductField, SolutionField};

    fn data(f1: &str, f2: &str, m: f64) -> InitialData {
        InitialData::parse(f1, f2, m).unwrap()
    }

    fn log_cosh_field() -> ProductField {
        // −2 log cosh t, the solution for zero data with m = 2.
        ProductField::of_time("-2*log(cosh(x))".parse().unwrap())
    }

    #[test]
    fn layer_zero_is_sampled_data() {
        let g = fd_solve(&data("sin(x)", "0", 1.0), 1.0, 0.5, 0.1, 0.5).unwrap();
        let l = g.level(0).unwrap();
        for (i, v) in l.values.iter().enumerate() {
            let x = (i as i64 - l.half_width as i64) as f64 * 0.1;
            assert_eq!(*v, x.sin());
        }
        assert_eq!(g.steps, 10);
        assert_eq!(g.final_half_width, 10);
        assert_eq!(g.level(10).unwrap().values.len(), 21);
        assert_eq!(g.levels.len(), 21);
    }

    #[test]
    fn constant_data_second_order() {
        let d = data("0", "0", 2.0);
        let exact = log_cosh_field();
        let runs: Vec<GridField> = [0.02, 0.01]
            .iter()
            .map(|&h| fd_solve(&d, 2.0, 2.0, h, 0.5).unwrap())
            .collect();
        let report = compare_and_order(&exact, &runs, Region { t_max: 2.0, x_max: 2.0 }).unwrap();
        let order = report.observed_orders[0];
        assert!((order - 2.0).abs() < 0.1, "{report:?}");
        assert!(report.runs[1].sup < 1e-4);
    }

    #[test]
    fn identical_fields_have_zero_discrepancy() {
        let g = fd_solve(&data("0", "0", 2.0), 1.0, 1.0, 0.05, 1.0).unwrap();
        let exact = log_cosh_field();
        let sampled = g.sample(&exact).unwrap();
        let r = compare_and_order(&exact, &[sampled], Region { t_max: 1.0, x_max: 1.0 }).unwrap();
        assert_eq!(r.runs[0].sup, 0.0);
        assert_eq!(r.runs[0].l2, 0.0);
    }

    #[test]
    fn general_data_matches_constructive_field() {
        let d = data("sin(x)", "cos(2*x)", 1.0);
        let field = SolutionField::new(build_quartet(&d, 3.0, 1e-10).unwrap());
        let runs: Vec<GridField> = [0.02, 0.01]
            .iter()
            .map(|&h| fd_solve(&d, 1.0, 1.0, h, 0.5).unwrap())
            .collect();
        let r = compare_and_order(&field, &runs, Region { t_max: 1.0, x_max: 1.0 }).unwrap();
        assert!(r.runs[1].sup < 5e-3, "{r:?}");
        let order = r.observed_orders[0];
        assert!((1.7..=2.3).contains(&order), "{r:?}");
    }

    #[test]
    fn first_layer_reproduces_velocity() {
        let d = data("0.3*x", "cos(x)", 1.0);
        let g = fd_solve(&d, 1.0, 0.1, 0.01, 0.5).unwrap();
        let k = g.k;
        for j in -50..=50 {
            let x = g.x(j);
            let fd = (g.value(1, j).unwrap() - g.value(0, j).unwrap()) / k;
            assert!((fd - x.cos()).abs() < 2.0 * k, "x = {x}");
        }
    }

    #[test]
    fn deterministic() {
        let d = data("sin(x)", "cos(2*x)", 1.0);
        let a = fd_solve(&d, 1.0, 1.0, 0.01, 0.8).unwrap();
        let b = fd_solve(&d, 1.0, 1.0, 0.01, 0.8).unwrap();
        assert!(a.rows().zip(b.rows()).all(|(p, q)| p.2.to_bits() == q.2.to_bits()));
    }

    #[test]
    fn errors() {
        let d = data("0", "0", 2.0);
        assert_eq!(fd_solve(&d, 1.0, 1.0, 0.1, 1.5), Err(FdError::Cfl(1.5)));
        assert!(matches!(fd_solve(&d, 1.0, 1.0, -0.1, 0.5), Err(FdError::InvalidGrid(_))));
        assert!(matches!(
            fd_solve(&data("log(x)", "0", 1.0), 1.0, 1.0, 0.1, 0.5),
            Err(FdError::Data { .. })
        ));
        assert!(matches!(
            fd_solve(&data("690", "0", 1.0), 1.0, 1.0, 0.1, 0.5),
            Err(FdError::BlowUp { .. })
        ));
        let a = fd_solve(&d, 1.0, 1.0, 0.1, 0.5).unwrap();
        let b = fd_solve(&d, 1.0, 1.0, 0.03, 0.5).unwrap();
        let exact = log_cosh_field();
        assert!(matches!(
            compare_and_order(&exact, &[a, b], Region { t_max: 1.0, x_max: 1.0 }),
            Err(FdError::GridMismatch(_))
        ));
    }
}
