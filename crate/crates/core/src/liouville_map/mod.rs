//! The constructive solution map for the Liouville equation
//! `(∂t² − ∂x²)F + (m²/2) e^F = 0`.
//!
//! Cauchy data `(f1, f2)` determine the potential
//! `u = [(f1' − f2)² − 4(f1' − f2)' + m² e^f1] / 16`. Two fundamental
//! solutions of `g'' = u g` (`g2` with data (0,1), `g4` with data (1,0))
//! and the derived pair
//!
//! ```text
//! g1 = −c (g4' + φ g4),   g3 = c (g2' + φ g2),
//! c = (4/m) e^{−f1/2},     φ = (f1' − f2) / 4
//! ```
//!
//! give `G(t,x) = g1(x+t) g2(x−t) + g3(x+t) g4(x−t)` and
//! `F = −2 log|G| − 2 log(m/4)`.

mod diagnostics;
mod field;

use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::ode_fundamental::{
    integrate_fundamental_with, wronskian_defect, FundamentalSolution, IntegratorOptions,
    OdeError, ScaledJet, ScaledReal,
};
use crate::smooth_fn::{ExprError, SmoothExpr};
use crate::util::binomial;

pub use diagnostics::{diagnostics, DiagnosticEntry, DiagnosticReport};
pub use field::{
    evaluate_solution, log_partials, residual, restrict_initial, solution_partial_jet, JetField, PartialTable,
    ProductField, SolutionField, MAX_PARTIAL_ORDER,
};

/// Integrator tolerance used when none is given.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error("point (t, x) = ({t}, {x}) leaves the working radius {radius}")]
    OutOfDomain { t: f64, x: f64, radius: f64 },
    #[error("derivative order {requested} exceeds the cap of {cap}")]
    OrderCap { requested: usize, cap: usize },
    #[error("G vanishes at (t, x) = ({t}, {x})")]
    Degenerate { t: f64, x: f64 },
    #[error("value at (t, x) = ({t}, {x}) overflows f64")]
    Overflow { t: f64, x: f64 },
}

/// Cauchy data `F(0,·) = f1`, `∂t F(0,·) = f2` and the mass parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub f1: SmoothExpr,
    pub f2: SmoothExpr,
    pub m: f64,
}

impl InitialData {
    pub fn new(f1: SmoothExpr, f2: SmoothExpr, m: f64) -> Result<Self, MapError> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(MapError::InvalidInput(format!(
                "mass parameter must be positive and finite, got {m}"
            )));
        }
        Ok(InitialData { f1, f2, m })
    }

    pub fn parse(f1: &str, f2: &str, m: f64) -> Result<Self, MapError> {
        Self::new(SmoothExpr::from_str(f1)?, SmoothExpr::from_str(f2)?, m)
    }

    /// Same data with another mass parameter.
    pub fn with_mass(&self, m: f64) -> Result<Self, MapError> {
        Self::new(self.f1.clone(), self.f2.clone(), m)
    }
}

/// The potentials `u` (from `f1' − f2`) and `w` (from `f1' + f2`).
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialPair {
    pub u: SmoothExpr,
    pub w: SmoothExpr,
}

fn potential_from(s: &SmoothExpr, f1: &SmoothExpr, m: f64) -> SmoothExpr {
    (s.powi(2) - 4.0 * s.derivative() + (m * m) * f1.exp()) / 16.0
}

pub fn compute_potentials(d: &InitialData) -> PotentialPair {
    let f1p = d.f1.derivative();
    PotentialPair {
        u: potential_from(&(&f1p - &d.f2), &d.f1, d.m),
        w: potential_from(&(&f1p + &d.f2), &d.f1, d.m),
    }
}

/// Which member of the quartet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Component {
    G1,
    G2,
    G3,
    G4,
}

/// `g2`, `g4` integrated under `u`, and the recipe for `g1`, `g3`.
#[derive(Debug, Clone)]
pub struct Quartet {
    data: InitialData,
    potentials: PotentialPair,
    g2: FundamentalSolution,
    g4: FundamentalSolution,
    /// `(4/m) e^{−f1/2}`.
    scale: SmoothExpr,
    /// `(f1' − f2) / 4`.
    phi: SmoothExpr,
}

pub fn build_quartet(d: &InitialData, radius: f64, tol: f64) -> Result<Quartet, MapError> {
    build_quartet_with(d, radius, &IntegratorOptions::adaptive(tol))
}

pub fn build_quartet_with(
    d: &InitialData,
    radius: f64,
    opts: &IntegratorOptions,
) -> Result<Quartet, MapError> {
    if !(radius >= 1.0 && radius.is_finite()) {
        return Err(MapError::InvalidInput(format!(
            "working radius must be at least 1, got {radius}"
        )));
    }
    let potentials = compute_potentials(d);
    let u = &potentials.u;
    let (g2, g4) = rayon::join(
        || integrate_fundamental_with(u, 0.0, 1.0, radius, opts),
        || integrate_fundamental_with(u, 1.0, 0.0, radius, opts),
    );
    let scale = (4.0 / d.m) * (d.f1.clone() * -0.5).exp();
    let phi = (d.f1.derivative() - d.f2.clone()) * 0.25;
    Ok(Quartet {
        data: d.clone(),
        potentials,
        g2: g2?,
        g4: g4?,
        scale,
        phi,
    })
}

/// `values[k] = Σ_j C(k,j) a[j] b[k−j]` for `k < n`.
fn leibniz(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (0..=k).map(|j| binomial(k, j) * a[j] * b[k - j]).sum())
        .collect()
}

/// Sum of two scaled products `p1 q1 + p2 q2` evaluated at a point, where
/// the exponents of the pairs may differ.
fn scaled_sum(terms: &[(ScaledReal, ScaledReal)]) -> ScaledReal {
    terms
        .iter()
        .fold(ScaledReal::ZERO, |acc, (p, q)| acc + *p * *q)
}

impl Quartet {
    pub fn data(&self) -> &InitialData {
        &self.data
    }

    pub fn potentials(&self) -> &PotentialPair {
        &self.potentials
    }

    pub fn mass(&self) -> f64 {
        self.data.m
    }

    pub fn radius(&self) -> f64 {
        self.g2.radius()
    }

    pub fn g2(&self) -> &FundamentalSolution {
        &self.g2
    }

    pub fn g4(&self) -> &FundamentalSolution {
        &self.g4
    }

    /// Jets of the derived pair `(g1, g3)` at `x` up to order `n`.
    pub fn derived_jets(&self, x: f64, n: usize) -> Result<(ScaledJet, ScaledJet), MapError> {
        let c = self.scale.jet_generic(&x, n)?;
        let phi = self.phi.jet_generic(&x, n)?;
        let g2 = self.g2.scaled_jet(x, n + 1)?;
        let g4 = self.g4.scaled_jet(x, n + 1)?;
        let derived = |g: &ScaledJet, sign: f64| {
            let pg = leibniz(&phi, &g.values, n + 1);
            let q: Vec<f64> = (0..=n).map(|k| g.values[k + 1] + pg[k]).collect();
            let values = leibniz(&c, &q, n + 1)
                .into_iter()
                .map(|v| sign * v)
                .collect();
            ScaledJet {
                exponent: g.exponent,
                values,
            }
        };
        Ok((derived(&g4, -1.0), derived(&g2, 1.0)))
    }

    /// Jet of one member at `x` up to order `n`.
    pub fn jet(&self, which: Component, x: f64, n: usize) -> Result<ScaledJet, MapError> {
        Ok(match which {
            Component::G1 => self.derived_jets(x, n)?.0,
            Component::G3 => self.derived_jets(x, n)?.1,
            Component::G2 => self.g2.scaled_jet(x, n)?,
            Component::G4 => self.g4.scaled_jet(x, n)?,
        })
    }

    /// Relative defect of `g2 g4' − g2' g4 = −1`.
    pub fn fundamental_wronskian_defect(&self, x: f64) -> Result<f64, MapError> {
        Ok(wronskian_defect(&self.g2, &self.g4, x)?)
    }

    /// Relative defect of `g1 g3' − g1' g3 = 1`.
    pub fn derived_wronskian_defect(&self, x: f64) -> Result<f64, MapError> {
        let (g1, g3) = self.derived_jets(x, 1)?;
        let p = g1.get(0) * g3.get(1);
        let q = g1.get(1) * g3.get(0);
        let diff = p - q - ScaledReal::new(1.0);
        let mag = if p.cmp_abs(&q).is_ge() { p.abs() } else { q.abs() };
        let mag = if mag.cmp_abs(&ScaledReal::new(1.0)).is_ge() {
            mag
        } else {
            ScaledReal::new(1.0)
        };
        Ok((diff / mag).to_f64().unwrap_or(f64::INFINITY))
    }

    /// `ℵ(x) = g1 g2 + g3 g4` at `x`, with its first `n` derivatives.
    pub fn aleph_jet(&self, x: f64, n: usize) -> Result<Vec<f64>, MapError> {
        let (g1, g3) = self.derived_jets(x, n)?;
        let g2 = self.g2.scaled_jet(x, n)?;
        let g4 = self.g4.scaled_jet(x, n)?;
        (0..=n)
            .map(|k| {
                let terms: Vec<_> = (0..=k)
                    .flat_map(|j| {
                        let b = ScaledReal::new(binomial(k, j));
                        [
                            (b * g1.get(j), g2.get(k - j)),
                            (b * g3.get(j), g4.get(k - j)),
                        ]
                    })
                    .collect();
                scaled_sum(&terms)
                    .to_f64()
                    .ok_or(MapError::Overflow { t: 0.0, x })
            })
            .collect()
    }

    /// Relative error of `ℵ = (4/m) e^{−f1/2}`.
    pub fn aleph_relative_error(&self, x: f64) -> Result<f64, MapError> {
        let aleph = self.aleph_jet(x, 0)?[0];
        let expected = self.scale.eval(x)?;
        Ok((aleph - expected).abs() / expected.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn constant_data() -> InitialData {
        InitialData::parse("0", "0", 2.0).unwrap()
    }

    #[test]
    fn potentials_of_constant_data() {
        let p = compute_potentials(&constant_data());
        for x in [-1.0, 0.0, 2.5] {
            assert_eq!(p.u.eval(x).unwrap(), 0.25);
            assert_eq!(p.w.eval(x).unwrap(), 0.25);
        }
        let p = compute_potentials(&InitialData::parse("log(2)", "0", 2.0).unwrap());
        assert_relative_eq!(p.u.eval(0.3).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(p.w.eval(0.3).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn potentials_of_asymmetric_data() {
        let p = compute_potentials(&InitialData::parse("x", "1", 2.0).unwrap());
        for x in [-2.0, -0.5, 0.0, 1.0, 3.0] {
            let e = f64::exp(x);
            assert_relative_eq!(p.u.eval(x).unwrap(), 0.25 * e, max_relative = 1e-15);
            assert_relative_eq!(
                p.w.eval(x).unwrap(),
                (4.0 + 4.0 * e) / 16.0,
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(InitialData::parse("x", "0", 0.0).is_err());
        assert!(InitialData::parse("x", "0", f64::NAN).is_err());
        assert!(matches!(
            InitialData::parse("x+", "0", 1.0),
            Err(MapError::Expr(_))
        ));
        assert!(build_quartet(&constant_data(), 0.5, 1e-10).is_err());
    }

    #[test]
    fn constant_data_quartet_closed_forms() {
        let q = build_quartet(&constant_data(), 2.0, 1e-10).unwrap();
        let at0 = |c| q.jet(c, 0.0, 0).unwrap().unscale().unwrap()[0];
        assert!(at0(Component::G1).abs() < 1e-15);
        assert!(at0(Component::G2).abs() < 1e-15);
        assert_relative_eq!(at0(Component::G3), 2.0, epsilon = 1e-14);
        assert_relative_eq!(at0(Component::G4), 1.0, epsilon = 1e-14);
        for i in 0..=20 {
            let x = -2.0 + 0.2 * f64::from(i);
            let h = x / 2.0;
            let v = |c| q.jet(c, x, 1).unwrap().unscale().unwrap();
            let close = |a: f64, b: f64| assert!((a - b).abs() < 1e-9, "{a} vs {b} at {x}");
            close(v(Component::G1)[0], -h.sinh());
            close(v(Component::G2)[0], 2.0 * h.sinh());
            close(v(Component::G3)[0], 2.0 * h.cosh());
            close(v(Component::G4)[0], h.cosh());
            close(v(Component::G1)[1], -0.5 * h.cosh());
            close(v(Component::G3)[1], h.sinh());
            assert!(q.aleph_jet(x, 0).unwrap()[0] - 2.0 < 1e-9);
        }
        assert!(q.derived_wronskian_defect(1.3).unwrap().abs() < 1e-9);
        assert!(q.fundamental_wronskian_defect(1.3).unwrap().abs() < 1e-9);
    }

    #[test]
    fn quartet_invariants_for_general_data() {
        let d = InitialData::parse("sin(x)", "cos(2*x)", 1.0).unwrap();
        let q = build_quartet(&d, 4.0, 1e-10).unwrap();
        for i in 0..=40 {
            let x = -4.0 + 0.2 * f64::from(i);
            assert!(q.fundamental_wronskian_defect(x).unwrap().abs() < 1e-8);
            assert!(q.derived_wronskian_defect(x).unwrap().abs() < 1e-8);
            assert!(q.aleph_relative_error(x).unwrap() < 1e-8);
        }
    }

    #[test]
    fn derived_pair_solves_the_other_potential() {
        // g1'' = w g1 and g3'' = w g3.
        let d = InitialData::parse("x/2 + sin(x)/3", "0.5*cos(x)", 1.5).unwrap();
        let q = build_quartet(&d, 3.0, 1e-10).unwrap();
        let w = &q.potentials().w;
        for x in [-2.5, -1.0, 0.0, 0.7, 2.9] {
            let (g1, g3) = q.derived_jets(x, 2).unwrap();
            let wx = w.eval(x).unwrap();
            for g in [g1, g3] {
                let v = g.unscale().unwrap();
                assert!((v[2] - wx * v[0]).abs() < 1e-8 * (1.0 + v[2].abs()));
            }
        }
    }

    #[test]
    fn mass_changes_propagate() {
        let d = InitialData::parse("0.3*x", "sin(x)", 1.0).unwrap();
        let d2 = d.with_mass(3.0).unwrap();
        let q = build_quartet(&d2, 2.0, 1e-10).unwrap();
        let a = q.aleph_jet(0.4, 0).unwrap()[0];
        assert_relative_eq!(a, (4.0 / 3.0) * (-0.06f64).exp(), max_relative = 1e-9);
        let u1 = compute_potentials(&d).u.eval(0.4).unwrap();
        let u2 = compute_potentials(&d2).u.eval(0.4).unwrap();
        assert_relative_eq!(u2 - u1, (9.0 - 1.0) * 0.12f64.exp() / 16.0, max_relative = 1e-12);
    }
}
