//! Fundamental solutions of `g'' = u g`.
//!
//! The second-order equation is integrated as the first-order system
//! `Ψ' = A(u) Ψ` with `Ψ = (g, g')`, outward from `x = 0` in both
//! directions. The state is kept as an `f64` pair times a power of two,
//! so exponentially growing solutions never overflow. Every accepted node
//! stores the Taylor coefficients of `g` up to [`NODE_ORDER`], obtained
//! from the equation itself; dense output between nodes is the two-point
//! Hermite interpolant matching those coefficients.

mod rk;
mod scaled;

use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::smooth_fn::{ExprError, Jet, SmoothExpr, MAX_DERIVATIVE_ORDER};
use crate::util::binomial;

pub use scaled::{frexp, ldexp, ScaledReal};

/// Taylor order stored per node; the interpolant has degree `2 * NODE_ORDER + 1`.
pub const NODE_ORDER: usize = 4;

/// Largest step the adaptive integrator takes.
pub const DEFAULT_MAX_STEP: f64 = 0.125;

const RESCALE_HI: f64 = 18446744073709551616.0; // 2^64
const RESCALE_LO: f64 = 1.0 / RESCALE_HI;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("potential not evaluable at x = {x}: {source}")]
    Domain { x: f64, source: ExprError },
    #[error("potential is not finite at x = {x}")]
    NonFinite { x: f64 },
    #[error("step size underflow at x = {x} (h = {h:e})")]
    NonConvergence { x: f64, h: f64 },
    #[error("x = {x} lies outside [-{radius}, {radius}]")]
    OutOfDomain { x: f64, radius: f64 },
    #[error("derivative order {requested} exceeds the cap of {cap}")]
    OrderCap { requested: usize, cap: usize },
    #[error("value at x = {x} overflows f64 (exponent {exponent})")]
    Overflow { x: f64, exponent: i32 },
    #[error("solutions were integrated under different potentials")]
    MismatchedPotential,
}

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    /// Local error bound per unit step, relative to the state norm.
    pub tol: f64,
    pub max_step: f64,
    /// Take uniform steps of this size and skip error control.
    pub fixed_step: Option<f64>,
}

impl IntegratorOptions {
    pub fn adaptive(tol: f64) -> Self {
        IntegratorOptions {
            tol,
            max_step: DEFAULT_MAX_STEP,
            fixed_step: None,
        }
    }

    pub fn fixed(tol: f64, step: f64) -> Self {
        IntegratorOptions {
            fixed_step: Some(step),
            ..Self::adaptive(tol)
        }
    }
}

#[derive(Debug, Clone)]
struct Node {
    x: f64,
    exponent: i32,
    /// `g^(k)(x) / k! * 2^-exponent`.
    taylor: [f64; NODE_ORDER + 1],
    local_error: f64,
}

/// One row of the dense trajectory.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrajectoryPoint {
    pub x: f64,
    pub g: ScaledReal,
    pub gp: ScaledReal,
}

/// Derivative values sharing one power-of-two scale:
/// the `k`-th derivative is `values[k] * 2^exponent`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledJet {
    pub exponent: i32,
    pub values: Vec<f64>,
}

impl ScaledJet {
    pub fn get(&self, k: usize) -> ScaledReal {
        ScaledReal::from_parts(self.values[k], self.exponent)
    }

    pub fn unscale(&self) -> Option<Vec<f64>> {
        self.values
            .iter()
            .map(|&v| {
                let r = ldexp(v, self.exponent);
                r.is_finite().then_some(r)
            })
            .collect()
    }
}

/// A solution of `g'' = u g` on `[-radius, radius]` with `g(0) = a`,
/// `g'(0) = b`.
#[derive(Debug, Clone)]
pub struct FundamentalSolution {
    potential: SmoothExpr,
    initial: (f64, f64),
    radius: f64,
    tol: f64,
    nodes: Vec<Node>,
}

pub fn integrate_fundamental(
    u: &SmoothExpr,
    a: f64,
    b: f64,
    radius: f64,
    tol: f64,
) -> Result<FundamentalSolution, OdeError> {
    integrate_fundamental_with(u, a, b, radius, &IntegratorOptions::adaptive(tol))
}

pub fn integrate_fundamental_with(
    u: &SmoothExpr,
    a: f64,
    b: f64,
    radius: f64,
    opts: &IntegratorOptions,
) -> Result<FundamentalSolution, OdeError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(OdeError::InvalidArgument(format!(
            "radius must be positive and finite, got {radius}"
        )));
    }
    if !(opts.tol > 0.0 && opts.tol <= 1e-4) {
        return Err(OdeError::InvalidArgument(format!(
            "tolerance must lie in (0, 1e-4], got {}",
            opts.tol
        )));
    }
    if !(opts.max_step > 0.0 && opts.max_step.is_finite()) {
        return Err(OdeError::InvalidArgument("max_step must be positive".into()));
    }
    if let Some(h) = opts.fixed_step {
        if !(h > 0.0 && h.is_finite()) {
            return Err(OdeError::InvalidArgument(format!(
                "fixed step must be positive, got {h}"
            )));
        }
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(OdeError::InvalidArgument("initial values must be finite".into()));
    }

    let mut forward = march(u, a, b, radius, opts)?;
    let backward = march(u, a, b, -radius, opts)?;
    let mut nodes: Vec<Node> = backward.into_iter().skip(1).rev().collect();
    nodes.append(&mut forward);
    Ok(FundamentalSolution {
        potential: u.clone(),
        initial: (a, b),
        radius,
        tol: opts.tol,
        nodes,
    })
}

fn eval_potential(u: &SmoothExpr, x: f64) -> Result<f64, OdeError> {
    let v = u.eval(x).map_err(|source| OdeError::Domain { x, source })?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(OdeError::NonFinite { x })
    }
}

fn make_node(u: &SmoothExpr, x: f64, y: &rk::State, exponent: i32, err: f64) -> Result<Node, OdeError> {
    let mut taylor = [0.0; NODE_ORDER + 1];
    taylor[0] = y[0];
    taylor[1] = y[1];
    let ut = u
        .taylor(&x, NODE_ORDER - 2)
        .map_err(|source| OdeError::Domain { x, source })?;
    if ut.iter().any(|v| !v.is_finite()) {
        return Err(OdeError::NonFinite { x });
    }
    taylor_recurrence(&ut, &mut taylor);
    Ok(Node {
        x,
        exponent,
        taylor,
        local_error: err,
    })
}

/// Fills `c[2..]` from `c[0], c[1]` using `(k+2)(k+1) c[k+2] = Σ u[j] c[k-j]`
/// (all coefficients normalized by factorials).
fn taylor_recurrence(ut: &[f64], c: &mut [f64]) {
    for k in 0..c.len().saturating_sub(2) {
        let s: f64 = (0..=k).map(|j| ut[j] * c[k - j]).sum();
        c[k + 2] = s / ((k + 2) * (k + 1)) as f64;
    }
}

/// Integrates from 0 to `end` (either sign); nodes come out ordered by
/// increasing distance from 0.
fn march(
    u: &SmoothExpr,
    a: f64,
    b: f64,
    end: f64,
    opts: &IntegratorOptions,
) -> Result<Vec<Node>, OdeError> {
    let dir = end.signum();
    let mut x = 0.0;
    let mut exponent = 0i32;
    let mut y: rk::State = [a, b];
    let mut nodes = vec![make_node(u, x, &y, exponent, 0.0)?];
    if a == 0.0 && b == 0.0 {
        nodes.push(make_node(u, end, &y, 0, 0.0)?);
        return Ok(nodes);
    }

    let mut f = |x: f64, y: &rk::State| -> Result<rk::State, OdeError> {
        Ok([y[1], eval_potential(u, x)? * y[0]])
    };
    let mut k1 = f(x, &y)?;
    let mut h = match opts.fixed_step {
        Some(h) => h.min(end.abs()),
        None => opts.max_step.min(opts.tol.powf(0.25)).min(end.abs()),
    };

    loop {
        let remaining = (end - x).abs();
        let last = h >= remaining * (1.0 - 1e-12);
        let hs = if last { remaining } else { h };
        let r = rk::step(&mut f, x, &y, dir * hs, k1)?;
        let scale = y[0].abs().max(y[1].abs()).max(r.y[0].abs()).max(r.y[1].abs());
        let err = r.err[0].abs().max(r.err[1].abs()) / (scale * hs);

        if opts.fixed_step.is_none() {
            if !err.is_finite() {
                h *= 0.2;
                continue;
            }
            if err > opts.tol {
                let fac = (0.9 * (opts.tol / err).powf(0.25)).clamp(0.2, 1.0);
                h = hs * fac;
                if h < 1e-12 * x.abs().max(1.0) {
                    return Err(OdeError::NonConvergence { x, h });
                }
                continue;
            }
        }

        x = if last { end } else { x + dir * hs };
        y = r.y;
        k1 = r.k_last;
        let norm = y[0].abs().max(y[1].abs());
        if norm > RESCALE_HI || (norm > 0.0 && norm < RESCALE_LO) {
            let (_, e) = frexp(norm);
            for v in y.iter_mut().chain(k1.iter_mut()) {
                *v = ldexp(*v, -e);
            }
            exponent += e;
        }
        nodes.push(make_node(u, x, &y, exponent, err)?);
        if last {
            return Ok(nodes);
        }
        if opts.fixed_step.is_none() {
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * (opts.tol / err).powf(0.25)).clamp(0.2, 5.0)
            };
            h = (hs * fac).min(opts.max_step);
        }
    }
}

const HALF: usize = NODE_ORDER + 1;

/// Inverse of `M[r][j] = C(HALF + j, r)`, the map from the upper
/// coefficients of the interpolant to its right-end Taylor data.
fn hermite_inverse() -> &'static [[f64; HALF]; HALF] {
    static INV: OnceLock<[[f64; HALF]; HALF]> = OnceLock::new();
    INV.get_or_init(|| {
        let mut m = [[0.0; 2 * HALF]; HALF];
        for (r, row) in m.iter_mut().enumerate() {
            for j in 0..HALF {
                row[j] = binomial(HALF + j, r);
            }
            row[HALF + r] = 1.0;
        }
        for col in 0..HALF {
            let piv = (col..HALF)
                .max_by(|&p, &q| m[p][col].abs().total_cmp(&m[q][col].abs()))
                .unwrap();
            m.swap(col, piv);
            let d = m[col][col];
            for v in m[col].iter_mut() {
                *v /= d;
            }
            for r in 0..HALF {
                if r != col {
                    let factor = m[r][col];
                    if factor != 0.0 {
                        for c in 0..2 * HALF {
                            m[r][c] -= factor * m[col][c];
                        }
                    }
                }
            }
        }
        let mut inv = [[0.0; HALF]; HALF];
        for r in 0..HALF {
            inv[r].copy_from_slice(&m[r][HALF..]);
        }
        inv
    })
}

impl FundamentalSolution {
    pub fn potential(&self) -> &SmoothExpr {
        &self.potential
    }

    pub fn initial_values(&self) -> (f64, f64) {
        self.initial
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Largest accepted local error estimate (per unit step, relative).
    pub fn max_local_error(&self) -> f64 {
        self.nodes.iter().map(|n| n.local_error).fold(0.0, f64::max)
    }

    pub fn trajectory(&self) -> Vec<TrajectoryPoint> {
        self.nodes
            .iter()
            .map(|n| TrajectoryPoint {
                x: n.x,
                g: ScaledReal::from_parts(n.taylor[0], n.exponent),
                gp: ScaledReal::from_parts(n.taylor[1], n.exponent),
            })
            .collect()
    }

    fn check_domain(&self, x: f64) -> Result<f64, OdeError> {
        let slack = self.radius * 1e-12;
        if x.is_nan() || x.abs() > self.radius + slack {
            return Err(OdeError::OutOfDomain {
                x,
                radius: self.radius,
            });
        }
        Ok(x.clamp(-self.radius, self.radius))
    }

    /// `(g, g')` at `x` sharing the returned exponent.
    fn value_pair(&self, x: f64) -> (f64, f64, i32) {
        let idx = self.nodes.partition_point(|n| n.x <= x).max(1) - 1;
        let left = &self.nodes[idx];
        if left.x == x || idx + 1 == self.nodes.len() {
            return (left.taylor[0], left.taylor[1], left.exponent);
        }
        let right = &self.nodes[idx + 1];
        let h = right.x - left.x;
        let e = left.exponent.max(right.exponent);
        let mut lo = [0.0; HALF];
        let mut hi = [0.0; HALF];
        let mut hk = 1.0;
        for k in 0..HALF {
            lo[k] = ldexp(left.taylor[k] * hk, left.exponent - e);
            hi[k] = ldexp(right.taylor[k] * hk, right.exponent - e);
            hk *= h;
        }
        let mut rhs = [0.0; HALF];
        for r in 0..HALF {
            rhs[r] = hi[r] - (r..HALF).map(|i| binomial(i, r) * lo[i]).sum::<f64>();
        }
        let inv = hermite_inverse();
        let mut coeffs = [0.0; 2 * HALF];
        coeffs[..HALF].copy_from_slice(&lo);
        for j in 0..HALF {
            coeffs[HALF + j] = (0..HALF).map(|r| inv[j][r] * rhs[r]).sum();
        }
        let s = (x - left.x) / h;
        let mut p = 0.0;
        let mut dp = 0.0;
        for c in coeffs.iter().rev() {
            dp = dp * s + p;
            p = p * s + c;
        }
        (p, dp / h, e)
    }

    /// Derivatives of `g` at `x` up to order `n`, in scaled form.
    pub fn scaled_jet(&self, x: f64, n: usize) -> Result<ScaledJet, OdeError> {
        if n > MAX_DERIVATIVE_ORDER {
            return Err(OdeError::OrderCap {
                requested: n,
                cap: MAX_DERIVATIVE_ORDER,
            });
        }
        let x = self.check_domain(x)?;
        let (g, gp, exponent) = self.value_pair(x);
        let mut c = vec![0.0; n.max(1) + 1];
        c[0] = g;
        c[1] = gp;
        if n >= 2 {
            let ut = self
                .potential
                .taylor(&x, n - 2)
                .map_err(|source| OdeError::Domain { x, source })?;
            taylor_recurrence(&ut, &mut c);
        }
        c.truncate(n + 1);
        let mut fact = 1.0;
        for (k, v) in c.iter_mut().enumerate() {
            if k > 1 {
                fact *= k as f64;
            }
            *v *= fact;
        }
        Ok(ScaledJet {
            exponent,
            values: c,
        })
    }
}

/// Derivative jet of `g` at `x`, unscaled.
pub fn derivative_jet(s: &FundamentalSolution, x: f64, n: usize) -> Result<Jet, OdeError> {
    let sj = s.scaled_jet(x, n)?;
    let values = sj.unscale().ok_or(OdeError::Overflow {
        x,
        exponent: sj.exponent,
    })?;
    Ok(Jet { base: x, values })
}

/// `W(x) - W(0)` for `W = g1 g2' - g1' g2`, relative to the larger of the
/// two products at `x`.
pub fn wronskian_defect(
    s1: &FundamentalSolution,
    s2: &FundamentalSolution,
    x: f64,
) -> Result<f64, OdeError> {
    if s1.potential != s2.potential {
        return Err(OdeError::MismatchedPotential);
    }
    let j1 = s1.scaled_jet(x, 1)?;
    let j2 = s2.scaled_jet(x, 1)?;
    let p = j1.get(0) * j2.get(1);
    let q = j1.get(1) * j2.get(0);
    let (a1, b1) = s1.initial;
    let (a2, b2) = s2.initial;
    let w0 = ScaledReal::new(a1 * b2 - b1 * a2);
    let diff = p - q - w0;
    let scale = if p.cmp_abs(&q).is_ge() { p.abs() } else { q.abs() };
    if scale.is_zero() {
        return Ok(diff.to_f64().unwrap_or(f64::INFINITY));
    }
    Ok((diff / scale).to_f64().unwrap_or(f64::INFINITY))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn expr(s: &str) -> SmoothExpr {
        s.parse().unwrap()
    }

    #[test]
    fn linear_solution_for_zero_potential() {
        let s = integrate_fundamental(&expr("0"), 0.0, 1.0, 2.0, 1e-10).unwrap();
        let j = derivative_jet(&s, 2.0, 1).unwrap();
        assert_relative_eq!(j.values[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(j.values[1], 1.0, epsilon = 1e-12);
        let j = derivative_jet(&s, 1.5, 3).unwrap();
        for (v, e) in j.values.iter().zip([1.5, 1.0, 0.0, 0.0]) {
            assert!((v - e).abs() < 1e-12, "{v} vs {e}");
        }
    }

    #[test]
    fn hyperbolic_sine_for_constant_potential() {
        let s = integrate_fundamental(&expr("0.25"), 0.0, 1.0, 1.0, 1e-10).unwrap();
        let g1 = derivative_jet(&s, 1.0, 0).unwrap().values[0];
        assert_relative_eq!(g1, 2.0 * 0.5f64.sinh(), max_relative = 1e-9);
        assert!((g1 - 1.04219061).abs() < 1e-8);
    }

    #[test]
    fn cosh_jet_for_constant_potential() {
        let s = integrate_fundamental(&expr("0.25"), 1.0, 0.0, 1.0, 1e-10).unwrap();
        let j = derivative_jet(&s, 1.0, 2).unwrap();
        let c = 0.5f64.cosh();
        let sh = 0.5f64.sinh();
        assert_relative_eq!(j.values[0], c, max_relative = 1e-9);
        assert_relative_eq!(j.values[1], 0.5 * sh, max_relative = 1e-9);
        assert_relative_eq!(j.values[2], 0.25 * c, max_relative = 1e-9);
        for (v, e) in j.values.iter().zip([1.12762597, 0.26054765, 0.28190649]) {
            assert!((v - e).abs() < 1e-8);
        }
        // Dense output between nodes as well as at them.
        for i in 0..=40 {
            let x = -1.0 + 0.05 * f64::from(i) + 1e-3;
            let x = x.min(1.0);
            let j = derivative_jet(&s, x, 1).unwrap();
            assert_relative_eq!(j.values[0], (x / 2.0).cosh(), max_relative = 1e-9);
            assert_relative_eq!(j.values[1], 0.5 * (x / 2.0).sinh(), epsilon = 1e-9);
        }
    }

    /// Power series of the Airy-type solution of `g'' = x g`, `g(0)=1`,
    /// `g'(0)=0`: `a[k+2] = a[k-1] / ((k+2)(k+1))`.
    fn airy_series(x: f64) -> f64 {
        let mut a = vec![1.0, 0.0, 0.0];
        for k in 1..60 {
            let next = a[k - 1] / ((k + 2) * (k + 1)) as f64;
            a.push(next);
        }
        a.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    #[test]
    fn linear_potential_matches_power_series() {
        let s = integrate_fundamental(&expr("x"), 1.0, 0.0, 1.0, 1e-10).unwrap();
        let g1 = derivative_jet(&s, 1.0, 0).unwrap().values[0];
        assert!((g1 - airy_series(1.0)).abs() < 1e-9);
        assert!((g1 - 1.1723000).abs() < 1e-7);
        let g = derivative_jet(&s, -0.8, 0).unwrap().values[0];
        assert!((g - airy_series(-0.8)).abs() < 1e-9);
        let j = derivative_jet(&s, 0.0, 3).unwrap();
        assert_eq!(j.values, vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn initial_values_are_exact() {
        let s = integrate_fundamental(&expr("exp(x)/3 + 1"), 0.3, -1.7, 4.0, 1e-9).unwrap();
        let j = derivative_jet(&s, 0.0, 1).unwrap();
        assert_eq!(j.values, vec![0.3, -1.7]);
    }

    #[test]
    fn wronskian_examples() {
        let zero = expr("0");
        let lin = integrate_fundamental(&zero, 0.0, 1.0, 6.0, 1e-10).unwrap();
        let one = integrate_fundamental(&zero, 1.0, 0.0, 6.0, 1e-10).unwrap();
        assert!(wronskian_defect(&lin, &one, 5.0).unwrap().abs() < 1e-13);
        assert_eq!(wronskian_defect(&lin, &one, 0.0).unwrap(), 0.0);

        let q = expr("0.25");
        let s = integrate_fundamental(&q, 0.0, 1.0, 3.0, 1e-10).unwrap();
        let c = integrate_fundamental(&q, 1.0, 0.0, 3.0, 1e-10).unwrap();
        assert!(wronskian_defect(&s, &c, 3.0).unwrap().abs() <= 1e-9);

        assert_eq!(
            wronskian_defect(&lin, &s, 1.0),
            Err(OdeError::MismatchedPotential)
        );
    }

    #[test]
    fn growth_beyond_f64_range() {
        // g = cosh(30 x) reaches about 2^2600 at x = 60.
        let s = integrate_fundamental(&expr("900"), 1.0, 0.0, 60.0, 1e-8).unwrap();
        let sj = s.scaled_jet(60.0, 2).unwrap();
        let expected_ln = 1800.0 - std::f64::consts::LN_2;
        assert!((sj.get(0).ln_abs() - expected_ln).abs() < 1e-5);
        assert!((sj.get(2).ln_abs() - (expected_ln + 900f64.ln())).abs() < 1e-5);
        assert!(matches!(
            derivative_jet(&s, 60.0, 0),
            Err(OdeError::Overflow { .. })
        ));
        let a = integrate_fundamental(&expr("900"), 0.0, 1.0, 60.0, 1e-8).unwrap();
        assert!(wronskian_defect(&s, &a, -59.0).unwrap().abs() < 1e-6);
    }

    #[test]
    fn fixed_step_mode() {
        let opts = IntegratorOptions::fixed(1e-8, 0.01);
        let s = integrate_fundamental_with(&expr("0.25"), 1.0, 0.0, 2.0, &opts).unwrap();
        assert_eq!(s.node_count(), 401);
        let g = derivative_jet(&s, 1.234, 0).unwrap().values[0];
        assert_relative_eq!(g, (1.234f64 / 2.0).cosh(), max_relative = 1e-10);
    }

    #[test]
    fn errors() {
        let u = expr("log(x)");
        assert!(matches!(
            integrate_fundamental(&u, 1.0, 0.0, 1.0, 1e-8),
            Err(OdeError::Domain { .. })
        ));
        assert!(matches!(
            integrate_fundamental(&expr("1"), 1.0, 0.0, 1.0, 1e-3),
            Err(OdeError::InvalidArgument(_))
        ));
        let s = integrate_fundamental(&expr("1"), 1.0, 0.0, 1.0, 1e-8).unwrap();
        assert!(matches!(
            derivative_jet(&s, 1.5, 0),
            Err(OdeError::OutOfDomain { .. })
        ));
        assert!(matches!(
            derivative_jet(&s, 0.5, 17),
            Err(OdeError::OrderCap { .. })
        ));
    }

    #[test]
    fn accepted_steps_respect_tolerance() {
        let s = integrate_fundamental(&expr("1 + sin(3*x)^2"), 0.5, 1.0, 5.0, 1e-9).unwrap();
        assert!(s.max_local_error() <= 1e-9);
        let xs: Vec<f64> = s.trajectory().iter().map(|p| p.x).collect();
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(xs[0], -5.0);
        assert_eq!(*xs.last().unwrap(), 5.0);
    }

    #[test]
    fn trivial_data_gives_zero() {
        let s = integrate_fundamental(&expr("x^2"), 0.0, 0.0, 3.0, 1e-8).unwrap();
        assert_eq!(derivative_jet(&s, 2.5, 4).unwrap().values, vec![0.0; 5]);
    }

    fn potential() -> impl Strategy<Value = SmoothExpr> {
        prop_oneof![
            Just(expr("0.25")),
            Just(expr("x")),
            Just(expr("1 + cos(x)")),
            Just(expr("exp(x/2)/4")),
            Just(expr("x^2/4 - 1")),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn wronskian_is_constant(
            u in potential(),
            a1 in -2.0f64..2.0, b1 in -2.0f64..2.0,
            a2 in -2.0f64..2.0, b2 in -2.0f64..2.0,
            x in -3.0f64..3.0,
        ) {
            prop_assume!((a1 * b2 - b1 * a2).abs() > 1e-2);
            let tol = 1e-9;
            let s1 = integrate_fundamental(&u, a1, b1, 3.0, tol).unwrap();
            let s2 = integrate_fundamental(&u, a2, b2, 3.0, tol).unwrap();
            let d = wronskian_defect(&s1, &s2, x).unwrap();
            prop_assert!(d.abs() <= 10.0 * tol, "defect {d}");
        }

        #[test]
        fn solutions_are_linear_in_data(
            u in potential(),
            a1 in -2.0f64..2.0, b1 in -2.0f64..2.0,
            a2 in -2.0f64..2.0, b2 in -2.0f64..2.0,
            x in -3.0f64..3.0,
        ) {
            let tol = 1e-9;
            let s1 = integrate_fundamental(&u, a1, b1, 3.0, tol).unwrap();
            let s2 = integrate_fundamental(&u, a2, b2, 3.0, tol).unwrap();
            let s = integrate_fundamental(&u, a1 + a2, b1 + b2, 3.0, tol).unwrap();
            let j1 = derivative_jet(&s1, x, 1).unwrap().values;
            let j2 = derivative_jet(&s2, x, 1).unwrap().values;
            let j = derivative_jet(&s, x, 1).unwrap().values;
            for k in 0..2 {
                let scale = j1[k].abs().max(j2[k].abs()).max(1.0);
                prop_assert!((j[k] - j1[k] - j2[k]).abs() <= 10.0 * tol * scale);
            }
        }
    }
}
