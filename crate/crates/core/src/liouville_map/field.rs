//! Fields on the `(t, x)` plane with mixed partial derivatives.

use rayon::prelude::*;

use super::{MapError, Quartet};
use crate::ode_fundamental::{ldexp, ScaledReal};
use crate::smooth_fn::SmoothExpr;
use crate::util::binomial;

/// Highest total derivative order of a [`PartialTable`].
pub const MAX_PARTIAL_ORDER: usize = 8;

/// All partials `∂t^a ∂x^b F` with `a + b <= order` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialTable {
    order: usize,
    values: Vec<f64>,
}

fn tri_index(a: usize, b: usize) -> usize {
    let n = a + b;
    n * (n + 1) / 2 + b
}

impl PartialTable {
    pub fn zeros(order: usize) -> Self {
        PartialTable {
            order,
            values: vec![0.0; tri_index(0, order) + 1],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `∂t^a ∂x^b F`. Panics when `a + b` exceeds the table order.
    pub fn get(&self, a: usize, b: usize) -> f64 {
        assert!(a + b <= self.order, "partial ({a},{b}) beyond order {}", self.order);
        self.values[tri_index(a, b)]
    }

    pub fn set(&mut self, a: usize, b: usize, v: f64) {
        assert!(a + b <= self.order);
        self.values[tri_index(a, b)] = v;
    }

    /// Multi-indices in order of increasing total degree.
    pub fn indices(order: usize) -> impl Iterator<Item = (usize, usize)> {
        (0..=order).flat_map(|n| (0..=n).map(move |b| (n - b, b)))
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        Self::indices(self.order).map(|(a, b)| ((a, b), self.get(a, b)))
    }
}

fn check_order(order: usize) -> Result<(), MapError> {
    if order > MAX_PARTIAL_ORDER {
        Err(MapError::OrderCap {
            requested: order,
            cap: MAX_PARTIAL_ORDER,
        })
    } else {
        Ok(())
    }
}

/// A smooth scalar field that can report its partial derivatives.
pub trait JetField: Sync {
    fn partials(&self, t: f64, x: f64, order: usize) -> Result<PartialTable, MapError>;

    fn value(&self, t: f64, x: f64) -> Result<f64, MapError> {
        Ok(self.partials(t, x, 0)?.get(0, 0))
    }

    fn partial(&self, t: f64, x: f64, beta: (usize, usize)) -> Result<f64, MapError> {
        Ok(self.partials(t, x, beta.0 + beta.1)?.get(beta.0, beta.1))
    }
}

impl<T: JetField + ?Sized> JetField for &T {
    fn partials(&self, t: f64, x: f64, order: usize) -> Result<PartialTable, MapError> {
        (**self).partials(t, x, order)
    }
}

/// `F(t, x) = a(t) b(x)`; useful for closed-form and synthetic fields.
#[derive(Debug, Clone)]
pub struct ProductField {
    pub time: SmoothExpr,
    pub space: SmoothExpr,
}

impl ProductField {
    pub fn new(time: SmoothExpr, space: SmoothExpr) -> Self {
        ProductField { time, space }
    }

    /// A field depending on `t` only.
    pub fn of_time(time: SmoothExpr) -> Self {
        Self::new(time, SmoothExpr::one())
    }
}

impl JetField for ProductField {
    fn partials(&self, t: f64, x: f64, order: usize) -> Result<PartialTable, MapError> {
        check_order(order)?;
        let a = self.time.jet_generic(&t, order)?;
        let b = self.space.jet_generic(&x, order)?;
        let mut table = PartialTable::zeros(order);
        for (i, j) in PartialTable::indices(order) {
            table.set(i, j, a[i] * b[j]);
        }
        Ok(table)
    }
}

/// The solution `F` assembled from a quartet.
#[derive(Debug, Clone)]
pub struct SolutionField {
    quartet: Quartet,
}

impl SolutionField {
    pub fn new(quartet: Quartet) -> Self {
        SolutionField { quartet }
    }

    pub fn quartet(&self) -> &Quartet {
        &self.quartet
    }

    pub fn mass(&self) -> f64 {
        self.quartet.mass()
    }

    pub fn radius(&self) -> f64 {
        self.quartet.radius()
    }

    fn check_domain(&self, t: f64, x: f64) -> Result<(), MapError> {
        let r = self.radius();
        if !((x + t).abs() <= r && (x - t).abs() <= r) {
            return Err(MapError::OutOfDomain { t, x, radius: r });
        }
        Ok(())
    }

    /// Table of `∂ξ^p ∂η^q G` (`p + q <= n`, indexed `[p][q]`) and its
    /// shared power-of-two exponent.
    fn characteristic_partials(
        &self,
        t: f64,
        x: f64,
        n: usize,
    ) -> Result<(Vec<Vec<f64>>, i32), MapError> {
        self.check_domain(t, x)?;
        let (xi, eta) = (x + t, x - t);
        let (g1, g3) = self.quartet.derived_jets(xi, n)?;
        let g2 = self.quartet.g2().scaled_jet(eta, n)?;
        let g4 = self.quartet.g4().scaled_jet(eta, n)?;
        let ea = g1.exponent + g2.exponent;
        let eb = g3.exponent + g4.exponent;
        let e = ea.max(eb);
        let (sa, sb) = (ldexp(1.0, ea - e), ldexp(1.0, eb - e));
        let table = (0..=n)
            .map(|p| {
                (0..=n - p)
                    .map(|q| sa * g1.values[p] * g2.values[q] + sb * g3.values[p] * g4.values[q])
                    .collect()
            })
            .collect();
        Ok((table, e))
    }

    /// `G(t, x)` in scaled form.
    pub fn g_value(&self, t: f64, x: f64) -> Result<ScaledReal, MapError> {
        let (table, e) = self.characteristic_partials(t, x, 0)?;
        Ok(ScaledReal::from_parts(table[0][0], e))
    }

    /// `H = (m²/16) G²`, positive wherever the construction is valid.
    pub fn h_value(&self, t: f64, x: f64) -> Result<ScaledReal, MapError> {
        let g = self.g_value(t, x)?;
        Ok(ScaledReal::new(self.mass().powi(2) / 16.0) * g * g)
    }

    pub fn residual(&self, t: f64, x: f64) -> Result<f64, MapError> {
        residual(self, self.mass(), t, x)
    }
}

impl JetField for SolutionField {
    fn partials(&self, t: f64, x: f64, order: usize) -> Result<PartialTable, MapError> {
        check_order(order)?;
        let (gc, e) = self.characteristic_partials(t, x, order)?;

        // ∂t = ∂ξ − ∂η, ∂x = ∂ξ + ∂η.
        let mut g = PartialTable::zeros(order);
        for (a, b) in PartialTable::indices(order) {
            let mut acc = 0.0;
            for i in 0..=a {
                let sign = if (a - i) % 2 == 0 { 1.0 } else { -1.0 };
                for j in 0..=b {
                    acc += sign * binomial(a, i) * binomial(b, j) * gc[i + j][a - i + b - j];
                }
            }
            g.set(a, b, acc);
        }

        let g0 = g.get(0, 0);
        if g0 == 0.0 || !g0.is_finite() {
            return Err(MapError::Degenerate { t, x });
        }
        let l = log_partials(&g);

        let mut f = PartialTable::zeros(order);
        let log_g = ScaledReal::from_parts(g0, e).ln_abs();
        f.set(0, 0, -2.0 * log_g - 2.0 * (self.mass() / 4.0).ln());
        for (a, b) in PartialTable::indices(order).skip(1) {
            f.set(a, b, -2.0 * l.get(a, b));
        }
        Ok(f)
    }
}

/// Partials of `log |G|` of positive total order from those of `G`, via
/// the Leibniz recurrence for `G ∂(log G) = ∂G`. Entry `(0, 0)` is left 0.
pub fn log_partials(g: &PartialTable) -> PartialTable {
    let order = g.order();
    let g0 = g.get(0, 0);
    let mut l = PartialTable::zeros(order);
    for (a, b) in PartialTable::indices(order).skip(1) {
        let mut s = 0.0;
        if a > 0 {
            for i in 0..a {
                for j in 0..=b {
                    if i + j > 0 {
                        s += binomial(a - 1, i) * binomial(b, j) * g.get(i, j) * l.get(a - i, b - j);
                    }
                }
            }
        } else {
            for j in 1..b {
                s += binomial(b - 1, j) * g.get(0, j) * l.get(0, b - j);
            }
        }
        l.set(a, b, (g.get(a, b) - s) / g0);
    }
    l
}

pub fn evaluate_solution(s: &SolutionField, t: f64, x: f64) -> Result<f64, MapError> {
    s.value(t, x)
}

pub fn solution_partial_jet(
    s: &SolutionField,
    t: f64,
    x: f64,
    beta: (usize, usize),
) -> Result<f64, MapError> {
    s.partial(t, x, beta)
}

/// `F_tt − F_xx + (m²/2) e^F`.
pub fn residual<F: JetField + ?Sized>(field: &F, m: f64, t: f64, x: f64) -> Result<f64, MapError> {
    let p = field.partials(t, x, 2)?;
    Ok(p.get(2, 0) - p.get(0, 2) + 0.5 * m * m * p.get(0, 0).exp())
}

/// `(F(0, x_i), ∂t F(0, x_i))` for each sample.
pub fn restrict_initial<F: JetField + ?Sized>(
    field: &F,
    samples: &[f64],
) -> Result<Vec<(f64, f64)>, MapError> {
    samples
        .par_iter()
        .map(|&x| {
            let p = field.partials(0.0, x, 1)?;
            Ok((p.get(0, 0), p.get(1, 0)))
        })
        .collect()
}
