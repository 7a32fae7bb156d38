//! Higher derivatives of `exp h` and `log(1 + J)` as sums over
//! partition-type index sets.
//!
//! Index sets (all vectors are of natural numbers):
//!
//! * `R(β)`: `a ∈ ℕ^β` with `Σ j a_j = β` (one element per integer
//!   partition of `β`; `a_j` counts the parts equal to `j`).
//! * `R(λ, μ)`: `a ∈ ℕ^{λ+1}` with `Σ_{j≥1} j a_j = λ` and `Σ_{j≥0} a_j = μ`.
//! * `T(λ, μ)`: `a ∈ ℕ^λ` with `Σ a_j = μ`.
//!
//! Coefficients: `P_β(a) = β!/∏ (j!)^{a_j} a_j!`, `l_β(a) = Σ a_j`,
//! `W_{λ,μ}(a) = μ!/a_0! · λ!/∏_{j≥1} (j!)^{a_j} a_j!`,
//! `N_{λ,μ}(a) = μ!/∏ a_j!`.

mod formulas;
pub mod oracle;
mod verify;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

pub use formulas::{
    exp_derivative, exp_derivative_factor, exp_expansion, log_derivative_1d, log_derivative_mixed,
    log_expansion_1d, log_expansion_mixed, printed_mixed_expansion, printed_mixed_value,
    Expansion, MixedJet, Monomial, WReading, MAX_MIXED_ORDER, MAX_ONE_D_ORDER,
};
pub use verify::{verify_formulas, FormulaCheck, VerificationReport};

/// Largest `β` (or `λ`) accepted by the enumerations.
pub const MAX_ENUMERATION_ORDER: usize = 24;

/// Largest element count [`enumerate_compositions`] will produce.
pub const MAX_ENUMERATION_SIZE: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FdbError {
    #[error("invalid parameters: {0}")]
    InvalidParameter(String),
    #[error("enumeration of {0} refused: too many elements")]
    SizeGuard(String),
    #[error("{vector:?} is not an element of {set}")]
    NotMember { vector: Vec<usize>, set: String },
    #[error("order {requested} exceeds the cap of {cap}")]
    OrderCap { requested: usize, cap: usize },
    #[error("jet of order {have} is too short for derivative order {need}")]
    InsufficientJet { have: usize, need: usize },
    #[error("mixed jet table lacks entry ({0}, {1})")]
    IncompleteJet(usize, usize),
    #[error("1 + J must be positive")]
    NonPositive,
    #[error("the number type cannot evaluate exp")]
    Unsupported,
}

/// Which index set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CompositionKind {
    /// `R(β)`
    R { beta: usize },
    /// `R(λ, μ)`
    RPair { lambda: usize, mu: usize },
    /// `T(λ, μ)`
    T { lambda: usize, mu: usize },
}

impl std::fmt::Display for CompositionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CompositionKind::R { beta } => write!(f, "R({beta})"),
            CompositionKind::RPair { lambda, mu } => write!(f, "R({lambda},{mu})"),
            CompositionKind::T { lambda, mu } => write!(f, "T({lambda},{mu})"),
        }
    }
}

/// An index set with its elements in ascending lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompositionSet {
    pub kind: CompositionKind,
    pub elements: Vec<Vec<usize>>,
}

impl CompositionSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, a: &[usize]) -> bool {
        self.elements.binary_search_by(|e| e.as_slice().cmp(a)).is_ok()
    }
}

/// Public entry point; `R(0)` is rejected.
pub fn enumerate_compositions(kind: CompositionKind) -> Result<CompositionSet, FdbError> {
    if let CompositionKind::R { beta: 0 } = kind {
        return Err(FdbError::InvalidParameter("R(β) needs β >= 1".into()));
    }
    let elements = elements(kind)?;
    Ok(CompositionSet { kind, elements })
}

/// Elements of an index set, also for the degenerate cases
/// `R(0) = {()}` and `R(0, μ) = {(μ)}` used by the mixed formula.
pub(crate) fn elements(kind: CompositionKind) -> Result<Vec<Vec<usize>>, FdbError> {
    let mut out = Vec::new();
    match kind {
        CompositionKind::R { beta } => {
            guard_order(beta, kind)?;
            let mut a = vec![0; beta];
            parts(beta, 1, &mut a, &mut out, |a| a.to_vec());
        }
        CompositionKind::RPair { lambda, mu } => {
            guard_order(lambda, kind)?;
            let mut a = vec![0; lambda];
            parts(lambda, 1, &mut a, &mut out, |a| {
                let used: usize = a.iter().sum();
                if used > mu {
                    return Vec::new();
                }
                let mut v = Vec::with_capacity(lambda + 1);
                v.push(mu - used);
                v.extend_from_slice(a);
                v
            });
            out.retain(|v| !v.is_empty());
        }
        CompositionKind::T { lambda, mu } => {
            let count = binomial_u64(mu + lambda.saturating_sub(1), lambda.saturating_sub(1));
            if count.map_or(true, |c| c > MAX_ENUMERATION_SIZE) {
                return Err(FdbError::SizeGuard(kind.to_string()));
            }
            if lambda == 0 {
                if mu == 0 {
                    out.push(Vec::new());
                }
            } else {
                let mut a = vec![0; lambda];
                weak_compositions(mu, 0, &mut a, &mut out);
            }
        }
    }
    out.sort();
    Ok(out)
}

fn guard_order(n: usize, kind: CompositionKind) -> Result<(), FdbError> {
    if n > MAX_ENUMERATION_ORDER {
        Err(FdbError::SizeGuard(kind.to_string()))
    } else {
        Ok(())
    }
}

/// Fills `a[j-1]` (multiplicity of part `j`) for `j >= part`, with
/// `remaining` still to cover.
fn parts(
    remaining: usize,
    part: usize,
    a: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    emit: impl Fn(&[usize]) -> Vec<usize> + Copy,
) {
    if remaining == 0 {
        out.push(emit(a));
        return;
    }
    if part > a.len() {
        return;
    }
    for m in 0..=remaining / part {
        a[part - 1] = m;
        parts(remaining - m * part, part + 1, a, out, emit);
    }
    a[part - 1] = 0;
}

fn weak_compositions(remaining: usize, pos: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if pos + 1 == a.len() {
        a[pos] = remaining;
        out.push(a.clone());
        a[pos] = 0;
        return;
    }
    for m in 0..=remaining {
        a[pos] = m;
        weak_compositions(remaining - m, pos + 1, a, out);
    }
    a[pos] = 0;
}

fn binomial_u64(n: usize, k: usize) -> Option<u64> {
    let k = k.min(n.saturating_sub(k));
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
        if r > u128::from(u64::MAX) {
            return None;
        }
    }
    u64::try_from(r).ok()
}

pub(crate) fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Coefficient functions on the index sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Coefficient {
    /// `P_β`
    P { beta: usize },
    /// `l_β`
    L { beta: usize },
    /// `W_{λ,μ}` (with `a_0!` in the first denominator)
    W { lambda: usize, mu: usize },
    /// `N_{λ,μ}`
    N { lambda: usize, mu: usize },
}

fn check_member(a: &[usize], kind: CompositionKind) -> Result<(), FdbError> {
    let ok = match kind {
        CompositionKind::R { beta } => {
            a.len() == beta && a.iter().enumerate().map(|(i, v)| (i + 1) * v).sum::<usize>() == beta
        }
        CompositionKind::RPair { lambda, mu } => {
            a.len() == lambda + 1
                && a.iter().enumerate().map(|(j, v)| j * v).sum::<usize>() == lambda
                && a.iter().sum::<usize>() == mu
        }
        CompositionKind::T { lambda, mu } => a.len() == lambda && a.iter().sum::<usize>() == mu,
    };
    if ok {
        Ok(())
    } else {
        Err(FdbError::NotMember {
            vector: a.to_vec(),
            set: kind.to_string(),
        })
    }
}

/// `λ! / ∏_{j≥1} (j!)^{a_j} a_j!` where `a[j-1]` is the multiplicity of `j`.
pub(crate) fn partition_weight(total: usize, a: &[usize]) -> BigUint {
    let mut den = BigUint::one();
    for (i, &m) in a.iter().enumerate() {
        den *= factorial(i + 1).pow(m as u32) * factorial(m);
    }
    factorial(total) / den
}

pub(crate) fn w_value(lambda: usize, mu: usize, a: &[usize]) -> BigUint {
    factorial(mu) / factorial(a[0]) * partition_weight(lambda, &a[1..])
}

pub(crate) fn n_value(mu: usize, a: &[usize]) -> BigUint {
    let den = a.iter().fold(BigUint::one(), |acc, &m| acc * factorial(m));
    factorial(mu) / den
}

/// Exact value of a coefficient function at `a`.
pub fn composition_coefficient(c: Coefficient, a: &[usize]) -> Result<BigUint, FdbError> {
    match c {
        Coefficient::P { beta } => {
            check_member(a, CompositionKind::R { beta })?;
            Ok(partition_weight(beta, a))
        }
        Coefficient::L { beta } => {
            check_member(a, CompositionKind::R { beta })?;
            Ok(BigUint::from(a.iter().sum::<usize>()))
        }
        Coefficient::W { lambda, mu } => {
            check_member(a, CompositionKind::RPair { lambda, mu })?;
            Ok(w_value(lambda, mu, a))
        }
        Coefficient::N { lambda, mu } => {
            check_member(a, CompositionKind::T { lambda, mu })?;
            Ok(n_value(mu, a))
        }
    }
}

/// `W_{λ,μ}(a)` with the first factor read literally as `μ!/a_0`;
/// `None` where `a_0 = 0`.
pub fn w_literal(lambda: usize, mu: usize, a: &[usize]) -> Result<Option<BigRational>, FdbError> {
    check_member(a, CompositionKind::RPair { lambda, mu })?;
    if a[0] == 0 {
        return Ok(None);
    }
    let num = factorial(mu) * partition_weight(lambda, &a[1..]);
    Ok(Some(BigRational::new(num.into(), BigUint::from(a[0]).into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn r(beta: usize) -> Vec<Vec<usize>> {
        enumerate_compositions(CompositionKind::R { beta }).unwrap().elements
    }

    fn sorted(mut v: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
        v.sort();
        v
    }

    #[test]
    fn small_sets() {
        assert_eq!(r(1), vec![vec![1]]);
        assert_eq!(
            r(3),
            sorted(vec![vec![3, 0, 0], vec![1, 1, 0], vec![0, 0, 1]])
        );
        let rp = enumerate_compositions(CompositionKind::RPair { lambda: 2, mu: 2 }).unwrap();
        assert_eq!(rp.elements, vec![vec![0, 2, 0], vec![1, 0, 1]]);
        let t = enumerate_compositions(CompositionKind::T { lambda: 2, mu: 3 }).unwrap();
        assert_eq!(t.len(), 4);
        assert!(t.contains(&[1, 2]));
        assert!(enumerate_compositions(CompositionKind::R { beta: 0 }).is_err());
    }

    #[test]
    fn degenerate_sets() {
        assert_eq!(elements(CompositionKind::R { beta: 0 }).unwrap(), vec![Vec::<usize>::new()]);
        assert_eq!(elements(CompositionKind::RPair { lambda: 0, mu: 3 }).unwrap(), vec![vec![3]]);
        assert!(elements(CompositionKind::RPair { lambda: 2, mu: 0 }).unwrap().is_empty());
        assert_eq!(elements(CompositionKind::T { lambda: 0, mu: 0 }).unwrap().len(), 1);
        assert!(elements(CompositionKind::T { lambda: 0, mu: 2 }).unwrap().is_empty());
    }

    #[test]
    fn size_guard() {
        assert!(matches!(
            enumerate_compositions(CompositionKind::R { beta: 25 }),
            Err(FdbError::SizeGuard(_))
        ));
        assert!(matches!(
            enumerate_compositions(CompositionKind::T { lambda: 24, mu: 24 }),
            Err(FdbError::SizeGuard(_))
        ));
        assert_eq!(r(24).len(), 1575);
    }

    #[test]
    fn coefficient_examples() {
        let p = composition_coefficient(Coefficient::P { beta: 3 }, &[1, 1, 0]).unwrap();
        assert_eq!(p, BigUint::from(3u32));
        let l = composition_coefficient(Coefficient::L { beta: 3 }, &[1, 1, 0]).unwrap();
        assert_eq!(l, BigUint::from(2u32));
        let n = composition_coefficient(Coefficient::N { lambda: 2, mu: 3 }, &[2, 1]).unwrap();
        assert_eq!(n, BigUint::from(3u32));
        let w = composition_coefficient(Coefficient::W { lambda: 1, mu: 1 }, &[0, 1]).unwrap();
        assert_eq!(w, BigUint::one());
        assert_eq!(w_literal(1, 1, &[0, 1]).unwrap(), None);
        assert_eq!(
            w_literal(1, 2, &[1, 1]).unwrap(),
            Some(BigRational::from_integer(2.into()))
        );
        assert!(matches!(
            composition_coefficient(Coefficient::P { beta: 3 }, &[1, 0, 0]),
            Err(FdbError::NotMember { .. })
        ));
    }

    /// Brute force over the box `0..=bound` in every coordinate.
    fn brute(len: usize, bound: usize, keep: impl Fn(&[usize]) -> bool) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut a = vec![0; len];
        loop {
            if keep(&a) {
                out.push(a.clone());
            }
            let mut i = 0;
            loop {
                if i == len {
                    out.sort();
                    return out;
                }
                a[i] += 1;
                if a[i] <= bound {
                    break;
                }
                a[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn enumerations_match_brute_force() {
        for beta in 1..=6 {
            let expect = brute(beta, beta, |a| {
                a.iter().enumerate().map(|(i, v)| (i + 1) * v).sum::<usize>() == beta
            });
            assert_eq!(r(beta), expect, "R({beta})");
        }
        for lambda in 0..=4 {
            for mu in 0..=4 {
                let expect = brute(lambda + 1, lambda.max(mu), |a| {
                    a.iter().enumerate().map(|(j, v)| j * v).sum::<usize>() == lambda
                        && a.iter().sum::<usize>() == mu
                });
                let got = elements(CompositionKind::RPair { lambda, mu }).unwrap();
                assert_eq!(got, expect, "R({lambda},{mu})");
                if lambda > 0 {
                    let expect = brute(lambda, mu, |a| a.iter().sum::<usize>() == mu);
                    let got = elements(CompositionKind::T { lambda, mu }).unwrap();
                    assert_eq!(got, expect, "T({lambda},{mu})");
                }
            }
        }
    }

    #[test]
    fn partition_counts_and_remark_bound() {
        for beta in 1..=20 {
            let n = r(beta).len();
            assert_eq!(BigUint::from(n), oracle::partition_count(beta), "p({beta})");
            assert!((n as u64) <= binomial_u64(2 * beta, beta - 1).unwrap());
        }
    }

    proptest! {
        #[test]
        fn coefficients_are_positive_integers(beta in 1usize..10, lambda in 0usize..6, mu in 0usize..6) {
            for a in r(beta) {
                let p = composition_coefficient(Coefficient::P { beta }, &a).unwrap();
                prop_assert!(!p.is_zero());
            }
            for a in elements(CompositionKind::RPair { lambda, mu }).unwrap() {
                let w = composition_coefficient(Coefficient::W { lambda, mu }, &a).unwrap();
                prop_assert!(!w.is_zero());
                // W is an exact quotient.
                let back = w.clone() * factorial(a[0]);
                prop_assert_eq!(back / factorial(mu), partition_weight(lambda, &a[1..]));
            }
            if lambda > 0 {
                for a in elements(CompositionKind::T { lambda, mu }).unwrap() {
                    let n = composition_coefficient(Coefficient::N { lambda, mu }, &a).unwrap();
                    prop_assert!(!n.is_zero());
                }
            }
        }

        #[test]
        fn p_sums_to_bell_numbers(beta in 1usize..12) {
            // Σ_a P_β(a) counts all set partitions of β labels.
            let total = r(beta).iter().fold(BigUint::zero(), |acc, a| acc + partition_weight(beta, a));
            prop_assert_eq!(total, oracle::bell_number(beta));
        }
    }
}
