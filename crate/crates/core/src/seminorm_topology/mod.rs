//! Seminorms `sup_{K_α} |∂^β f|` evaluated as grid maxima, and the
//! continuity experiment for the solution map.
//!
//! `K_α = [−α, α]` for functions of `x` and `[−α, α]²` for fields of
//! `(t, x)`. Grid values are lower bounds of the true suprema.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::liouville_map::{
    build_quartet, InitialData, JetField, MapError, PartialTable, SolutionField,
    MAX_PARTIAL_ORDER,
};
use crate::ode_fundamental::{derivative_jet, FundamentalSolution, OdeError};
use crate::smooth_fn::{ExprError, SmoothExpr};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeminormError {
    #[error("invalid seminorm index: {0}")]
    InvalidIndex(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Compact radius `α >= 1` and derivative multi-index `β`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SeminormIndex {
    alpha: u32,
    beta: Vec<usize>,
}

impl SeminormIndex {
    pub fn new(alpha: u32, beta: Vec<usize>) -> Result<Self, SeminormError> {
        if alpha == 0 {
            return Err(SeminormError::InvalidIndex("alpha must be at least 1".into()));
        }
        if beta.is_empty() || beta.len() > 2 {
            return Err(SeminormError::InvalidIndex(format!(
                "beta must have one or two components, got {}",
                beta.len()
            )));
        }
        Ok(SeminormIndex { alpha, beta })
    }

    pub fn one_d(alpha: u32, beta: usize) -> Result<Self, SeminormError> {
        Self::new(alpha, vec![beta])
    }

    pub fn two_d(alpha: u32, beta_t: usize, beta_x: usize) -> Result<Self, SeminormError> {
        Self::new(alpha, vec![beta_t, beta_x])
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn beta(&self) -> &[usize] {
        &self.beta
    }

    pub fn order(&self) -> usize {
        self.beta.iter().sum()
    }

    fn expect_dim(&self, dim: usize) -> Result<(), SeminormError> {
        if self.beta.len() == dim {
            Ok(())
        } else {
            Err(SeminormError::InvalidIndex(format!(
                "expected a {dim}-component multi-index, got {:?}",
                self.beta
            )))
        }
    }

    /// All two-dimensional indices with `α <= alpha_max`, `|β| <= order`.
    pub fn all_two_d(alpha_max: u32, order: usize) -> Vec<SeminormIndex> {
        (1..=alpha_max)
            .flat_map(|a| {
                PartialTable::indices(order).map(move |(bt, bx)| SeminormIndex {
                    alpha: a,
                    beta: vec![bt, bx],
                })
            })
            .collect()
    }
}

/// Uniform sampling of `K_α` with a fixed number of points per unit length.
///
/// Nodes are `k / ppu` for integers `|k| <= α ppu`, so grids for different
/// `α` nest exactly and doubling `ppu` keeps all previous nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridSpec {
    pub points_per_unit: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { points_per_unit: 64 }
    }
}

impl GridSpec {
    pub fn new(points_per_unit: usize) -> Result<Self, SeminormError> {
        if points_per_unit == 0 {
            return Err(SeminormError::InvalidInput(
                "points per unit must be positive".into(),
            ));
        }
        Ok(GridSpec { points_per_unit })
    }

    pub fn nodes(&self, alpha: u32) -> Vec<f64> {
        let ppu = self.points_per_unit as i64;
        let k = i64::from(alpha) * ppu;
        (-k..=k).map(|i| i as f64 / ppu as f64).collect()
    }
}

/// A function of one variable with derivatives on demand.
pub trait Jet1d: Sync {
    fn derivative(&self, x: f64, k: usize) -> Result<f64, SeminormError>;
}

impl Jet1d for SmoothExpr {
    fn derivative(&self, x: f64, k: usize) -> Result<f64, SeminormError> {
        Ok(self.jet_generic(&x, k)?[k])
    }
}

impl Jet1d for FundamentalSolution {
    fn derivative(&self, x: f64, k: usize) -> Result<f64, SeminormError> {
        Ok(derivative_jet(self, x, k)?.values[k])
    }
}

/// `F − G` for two jet fields.
#[derive(Debug, Clone, Copy)]
pub struct DifferenceField<A, B> {
    pub lhs: A,
    pub rhs: B,
}

impl<A: JetField, B: JetField> JetField for DifferenceField<A, B> {
    fn partials(&self, t: f64, x: f64, order: usize) -> Result<PartialTable, MapError> {
        let a = self.lhs.partials(t, x, order)?;
        let b = self.rhs.partials(t, x, order)?;
        let mut d = PartialTable::zeros(order);
        for ((i, j), v) in a.iter() {
            d.set(i, j, v - b.get(i, j));
        }
        Ok(d)
    }
}

fn max_abs(values: impl ParallelIterator<Item = Result<f64, SeminormError>>) -> Result<f64, SeminormError> {
    values.try_fold(|| 0.0f64, |m, v| v.map(|v| m.max(v.abs())))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// `p_{αβ}(f) = max_{x ∈ grid(K_α)} |f^(β)(x)|`.
pub fn seminorm_1d<F: Jet1d + ?Sized>(
    f: &F,
    idx: &SeminormIndex,
    grid: &GridSpec,
) -> Result<f64, SeminormError> {
    idx.expect_dim(1)?;
    let k = idx.beta[0];
    max_abs(grid.nodes(idx.alpha).into_par_iter().map(|x| f.derivative(x, k)))
}

/// `r_{αβ}` for a vector of functions: the grid maximum of the Euclidean
/// norm of the componentwise `β`-th derivatives.
pub fn seminorm_vector(
    components: &[&dyn Jet1d],
    idx: &SeminormIndex,
    grid: &GridSpec,
) -> Result<f64, SeminormError> {
    idx.expect_dim(1)?;
    let k = idx.beta[0];
    max_abs(grid.nodes(idx.alpha).into_par_iter().map(|x| {
        let mut s = 0.0;
        for c in components {
            let v = c.derivative(x, k)?;
            s += v * v;
        }
        Ok(s.sqrt())
    }))
}

/// `r_{αβ}(Ψ)` for `Ψ = (g, g')` of a fundamental solution.
pub fn state_seminorm(
    s: &FundamentalSolution,
    idx: &SeminormIndex,
    grid: &GridSpec,
) -> Result<f64, SeminormError> {
    idx.expect_dim(1)?;
    let k = idx.beta[0];
    max_abs(grid.nodes(idx.alpha).into_par_iter().map(|x| {
        let v = derivative_jet(s, x, k + 1)?.values;
        Ok(v[k].hypot(v[k + 1]))
    }))
}

/// `q_{αβ}(F) = max_{(t,x) ∈ grid(K_α²)} |∂t^β1 ∂x^β2 F(t,x)|`.
pub fn seminorm_2d<F: JetField + ?Sized>(
    field: &F,
    idx: &SeminormIndex,
    grid: &GridSpec,
) -> Result<f64, SeminormError> {
    idx.expect_dim(2)?;
    let beta = (idx.beta[0], idx.beta[1]);
    if idx.order() > MAX_PARTIAL_ORDER {
        return Err(MapError::OrderCap {
            requested: idx.order(),
            cap: MAX_PARTIAL_ORDER,
        }
        .into());
    }
    let nodes = grid.nodes(idx.alpha);
    let points: Vec<(f64, f64)> = nodes
        .iter()
        .flat_map(|&t| nodes.iter().map(move |&x| (t, x)))
        .collect();
    max_abs(
        points
            .into_par_iter()
            .map(|(t, x)| Ok(field.partial(t, x, beta)?)),
    )
}

/// Settings for [`convergence_study`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyOptions {
    pub grid: GridSpec,
    pub tol: f64,
}

impl Default for StudyOptions {
    fn default() -> Self {
        StudyOptions {
            grid: GridSpec::default(),
            tol: crate::liouville_map::DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub alpha: u32,
    pub beta1: usize,
    pub beta2: usize,
    /// `max(p_{α,|β|}(f1_n − f1), p_{α,|β|}(f2_n − f2))`.
    pub input_dist: f64,
    /// `q_{αβ}(F_n − F)`.
    pub output_dist: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnVerdict {
    pub alpha: u32,
    pub beta1: usize,
    pub beta2: usize,
    pub strictly_decreasing: bool,
    pub first: f64,
    pub last: f64,
}

impl ColumnVerdict {
    /// `last / first`, or 0 for an all-zero column.
    pub fn ratio(&self) -> f64 {
        if self.first == 0.0 {
            0.0
        } else {
            self.last / self.first
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub verdicts: Vec<ColumnVerdict>,
}

/// Distances between the fields of a data family and the target field.
pub fn convergence_study(
    family: &[InitialData],
    target: &InitialData,
    indices: &[SeminormIndex],
    opts: &StudyOptions,
) -> Result<ConvergenceTable, SeminormError> {
    if family.iter().any(|d| d.m != target.m) {
        return Err(SeminormError::InvalidInput(
            "all data must share the mass parameter".into(),
        ));
    }
    for idx in indices {
        idx.expect_dim(2)?;
    }
    let alpha_max = indices.iter().map(|i| i.alpha).max().unwrap_or(1);
    let order = indices.iter().map(SeminormIndex::order).max().unwrap_or(0);
    if order > MAX_PARTIAL_ORDER {
        return Err(MapError::OrderCap {
            requested: order,
            cap: MAX_PARTIAL_ORDER,
        }
        .into());
    }
    let radius = 2.0 * f64::from(alpha_max) + 1.0;
    let nodes = opts.grid.nodes(alpha_max);
    let points: Vec<(f64, f64)> = nodes
        .iter()
        .flat_map(|&t| nodes.iter().map(move |&x| (t, x)))
        .collect();

    let tables = |d: &InitialData| -> Result<Vec<PartialTable>, SeminormError> {
        let field = SolutionField::new(build_quartet(d, radius, opts.tol)?);
        points
            .par_iter()
            .map(|&(t, x)| Ok(field.partials(t, x, order)?))
            .collect()
    };
    let target_tables = tables(target)?;

    let mut rows = Vec::new();
    for (n, d) in family.iter().enumerate() {
        let member = tables(d)?;
        let df1 = &d.f1 - &target.f1;
        let df2 = &d.f2 - &target.f2;
        for idx in indices {
            let (b1, b2) = (idx.beta[0], idx.beta[1]);
            let a = f64::from(idx.alpha);
            let output_dist = points
                .iter()
                .zip(member.iter().zip(&target_tables))
                .filter(|((t, x), _)| t.abs() <= a && x.abs() <= a)
                .map(|(_, (p, q))| (p.get(b1, b2) - q.get(b1, b2)).abs())
                .fold(0.0, f64::max);
            let one = SeminormIndex::one_d(idx.alpha, idx.order())?;
            let input_dist = seminorm_1d(&df1, &one, &opts.grid)?
                .max(seminorm_1d(&df2, &one, &opts.grid)?);
            rows.push(ConvergenceRow {
                n,
                alpha: idx.alpha,
                beta1: b1,
                beta2: b2,
                input_dist,
                output_dist,
            });
        }
    }

    let verdicts = indices
        .iter()
        .map(|idx| {
            let col: Vec<f64> = rows
                .iter()
                .filter(|r| r.alpha == idx.alpha && r.beta1 == idx.beta[0] && r.beta2 == idx.beta[1])
                .map(|r| r.output_dist)
                .collect();
            ColumnVerdict {
                alpha: idx.alpha,
                beta1: idx.beta[0],
                beta2: idx.beta[1],
                strictly_decreasing: col.windows(2).all(|w| w[1] < w[0]),
                first: col.first().copied().unwrap_or(0.0),
                last: col.last().copied().unwrap_or(0.0),
            }
        })
        .collect();
    Ok(ConvergenceTable { rows, verdicts })
}
