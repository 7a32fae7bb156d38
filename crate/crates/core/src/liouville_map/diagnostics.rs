//! Pointwise identities linking the quartet to the Cauchy data.
//!
//! With `ℵ = g1 g2 + g3 g4` and `ℏ = g1' g2' + g3' g4'`, all evaluated at
//! the same `x`:
//!
//! | name | identity |
//! |------|----------|
//! | D1 | `ℵ = (4/m) e^{−f1/2}` |
//! | D2 | `−g1' g2 − g3' g4 = ¼ (f1' + f2) ℵ` |
//! | D3 | `g1 g2' + g3 g4' = −¼ (f1' − f2) ℵ` |
//! | D4 | `ℏ/ℵ = (1/16) [f1'² − f2² − m² e^f1]` |
//! | D5 | `∂t² F(0,·) = ½ f2² + 4 ℏ/ℵ − 2 (u + w)` |
//! | D6 | `f1'' = 2 (ℵ'/ℵ)² − 2 ℵ''/ℵ` |

use rayon::prelude::*;
use serde::Serialize;

use super::field::{JetField, SolutionField};
use super::{compute_potentials, InitialData, MapError, Quartet};
use crate::ode_fundamental::ScaledReal;

pub const IDENTITIES: [(&str, &str); 6] = [
    ("D1", "aleph = (4/m) exp(-f1/2)"),
    ("D2", "-g1' g2 - g3' g4 = (f1' + f2) aleph / 4"),
    ("D3", "g1 g2' + g3 g4' = -(f1' - f2) aleph / 4"),
    ("D4", "hbar/aleph = (f1'^2 - f2^2 - m^2 exp f1) / 16"),
    ("D5", "F_tt(0,x) = f2^2/2 + 4 hbar/aleph - 2 (u + w)"),
    ("D6", "f1'' = 2 (aleph'/aleph)^2 - 2 aleph''/aleph"),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticEntry {
    pub name: String,
    pub identity: String,
    pub max_defect: f64,
    pub argmax_point: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticReport {
    pub entries: Vec<DiagnosticEntry>,
}

impl DiagnosticReport {
    pub fn get(&self, name: &str) -> Option<&DiagnosticEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn max_defect(&self) -> f64 {
        self.entries.iter().map(|e| e.max_defect).fold(0.0, f64::max)
    }
}

fn real(v: ScaledReal, x: f64) -> Result<f64, MapError> {
    v.to_f64().ok_or(MapError::Overflow { t: 0.0, x })
}

fn defects_at(d: &InitialData, q: &Quartet, x: f64) -> Result<[f64; 6], MapError> {
    let m = d.m;
    let (g1, g3) = q.derived_jets(x, 1)?;
    let g2 = q.g2().scaled_jet(x, 1)?;
    let g4 = q.g4().scaled_jet(x, 1)?;
    let pair = |a: usize, b: usize, c: usize, e: usize| {
        real(g1.get(a) * g2.get(b) + g3.get(c) * g4.get(e), x)
    };
    let aleph = pair(0, 0, 0, 0)?;
    let d2_lhs = -pair(1, 0, 1, 0)?;
    let d3_lhs = pair(0, 1, 0, 1)?;
    let hbar = pair(1, 1, 1, 1)?;

    let f1 = d.f1.jet_generic(&x, 2)?;
    let f2 = d.f2.eval(x)?;
    let p = compute_potentials(d);
    let uw = p.u.eval(x)? + p.w.eval(x)?;

    let d1 = aleph - (4.0 / m) * (-f1[0] / 2.0).exp();
    let d2 = d2_lhs - 0.25 * (f1[1] + f2) * aleph;
    let d3 = d3_lhs + 0.25 * (f1[1] - f2) * aleph;
    let d4 = hbar / aleph - (f1[1] * f1[1] - f2 * f2 - m * m * f1[0].exp()) / 16.0;

    let field = SolutionField::new(q.clone());
    let ftt = field.partial(0.0, x, (2, 0))?;
    let d5 = ftt - (0.5 * f2 * f2 + 4.0 * hbar / aleph - 2.0 * uw);

    let a = q.aleph_jet(x, 2)?;
    let d6 = f1[2] - (2.0 * (a[1] / a[0]).powi(2) - 2.0 * a[2] / a[0]);
    Ok([d1, d2, d3, d4, d5, d6].map(f64::abs))
}

/// Maximum absolute defect of each identity over the sample points.
pub fn diagnostics(d: &InitialData, q: &Quartet, samples: &[f64]) -> Result<DiagnosticReport, MapError> {
    let rows: Vec<(f64, [f64; 6])> = samples
        .par_iter()
        .map(|&x| Ok((x, defects_at(d, q, x)?)))
        .collect::<Result<_, MapError>>()?;
    let entries = IDENTITIES
        .iter()
        .enumerate()
        .map(|(i, (name, identity))| {
            let (argmax_point, max_defect) = rows
                .iter()
                .map(|(x, v)| (*x, v[i]))
                .fold((f64::NAN, 0.0), |best, cur| {
                    if cur.1 > best.1 || best.0.is_nan() || cur.1.is_nan() {
                        cur
                    } else {
                        best
                    }
                });
            DiagnosticEntry {
                name: (*name).to_string(),
                identity: (*identity).to_string(),
                max_defect,
                argmax_point,
            }
        })
        .collect();
    Ok(DiagnosticReport { entries })
}
