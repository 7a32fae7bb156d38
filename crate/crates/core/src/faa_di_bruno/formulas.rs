//! The three derivative formulas, built as symbolic expansions and then
//! evaluated in any [`Scalar`] type.
//!
//! An expansion is a map from monomials to integer coefficients. A monomial
//! `(p, [(i1, k1), (i2, k2), ...])` stands for `(1 + J)^{-p} ∏ ∂1^i ∂2^k J`;
//! one-dimensional expansions use the indices `(j, 0)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::{elements, factorial, n_value, partition_weight, w_value, CompositionKind, FdbError};
use crate::smooth_fn::Func;
use crate::smooth_fn::Scalar;

pub const MAX_ONE_D_ORDER: usize = 12;
/// Cap on `γ + β` for the mixed formula.
pub const MAX_MIXED_ORDER: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Monomial {
    pub inv_power: u32,
    /// Sorted derivative indices, with repetition.
    pub factors: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Expansion {
    pub terms: BTreeMap<Monomial, BigInt>,
}

impl Expansion {
    pub(crate) fn add(&mut self, mut m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        m.factors.sort_unstable();
        let e = self.terms.entry(m.clone()).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest derivative orders `(∂1, ∂2)` referenced by any factor.
    pub fn max_indices(&self) -> (usize, usize) {
        self.terms
            .keys()
            .flat_map(|m| m.factors.iter())
            .fold((0, 0), |acc, &(i, k)| (acc.0.max(i), acc.1.max(k)))
    }

    /// Evaluates with `lookup(i, k) = ∂1^i ∂2^k J` and `inv = 1/(1 + J)`.
    pub fn eval<T: Scalar>(
        &self,
        lookup: impl Fn(usize, usize) -> Result<T, FdbError>,
        inv: &T,
    ) -> Result<T, FdbError> {
        let mut total = T::zero();
        for (m, c) in &self.terms {
            let mut term = to_scalar::<T>(c);
            for _ in 0..m.inv_power {
                term = term * inv.clone();
            }
            for &(i, k) in &m.factors {
                term = term * lookup(i, k)?;
            }
            total = total + term;
        }
        Ok(total)
    }
}

pub(crate) fn to_scalar<T: Scalar>(n: &BigInt) -> T {
    if let Some(v) = n.to_i64() {
        return T::from_i64(v);
    }
    let (sign, digits) = n.to_u32_digits();
    let base = T::from_i64(1 << 32);
    let mut acc = T::zero();
    for d in digits.iter().rev() {
        acc = acc * base.clone() + T::from_i64(i64::from(*d));
    }
    if sign == Sign::Minus {
        -acc
    } else {
        acc
    }
}

/// `(-1)^{l-1} (l-1)!`, the `l`-th derivative of `log(1+J)` times `(1+J)^l`.
fn log_outer(l: usize) -> BigInt {
    let f = BigInt::from(factorial(l - 1));
    if l % 2 == 1 {
        f
    } else {
        -f
    }
}

fn cap(requested: usize, cap: usize) -> Result<(), FdbError> {
    if requested > cap {
        Err(FdbError::OrderCap { requested, cap })
    } else {
        Ok(())
    }
}

fn one_d_factors(a: &[usize]) -> Vec<(usize, usize)> {
    a.iter()
        .enumerate()
        .flat_map(|(i, &m)| std::iter::repeat((i + 1, 0)).take(m))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    Exp(usize),
    Log(usize),
    Mixed(usize, usize),
}

fn memo(key: Key, build: impl FnOnce() -> Result<Expansion, FdbError>) -> Result<Arc<Expansion>, FdbError> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Expansion>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(e) = cache.lock().unwrap_or_else(|p| p.into_inner()).get(&key) {
        return Ok(e.clone());
    }
    let e = Arc::new(build()?);
    cache
        .lock()
        .unwrap_or_else(|p| p.into_inner())
        .insert(key, e.clone());
    Ok(e)
}

/// `∂^β e^h = e^h Σ_{a∈R(β)} P_β(a) ∏ (∂^j h)^{a_j}`; the expansion holds
/// the sum (no `1+J` factors).
pub fn exp_expansion(beta: usize) -> Result<Arc<Expansion>, FdbError> {
    check_one_d(beta)?;
    memo(Key::Exp(beta), || {
        let mut e = Expansion::default();
        for a in elements(CompositionKind::R { beta })? {
            let m = Monomial { inv_power: 0, factors: one_d_factors(&a) };
            e.add(m, partition_weight(beta, &a).into());
        }
        Ok(e)
    })
}

/// `∂^β log(1+J) = Σ_{a∈R(β)} (-1)^{l-1} (l-1)!/(1+J)^l P_β(a) ∏ (∂^j J)^{a_j}`.
pub fn log_expansion_1d(beta: usize) -> Result<Arc<Expansion>, FdbError> {
    check_one_d(beta)?;
    memo(Key::Log(beta), || {
        let mut e = Expansion::default();
        for a in elements(CompositionKind::R { beta })? {
            let l: usize = a.iter().sum();
            let m = Monomial { inv_power: l as u32, factors: one_d_factors(&a) };
            e.add(m, log_outer(l) * BigInt::from(partition_weight(beta, &a)));
        }
        Ok(e)
    })
}

fn check_one_d(beta: usize) -> Result<(), FdbError> {
    if beta == 0 {
        return Err(FdbError::InvalidParameter("derivative order must be >= 1".into()));
    }
    cap(beta, MAX_ONE_D_ORDER)
}

fn check_mixed(gamma: usize, beta: usize) -> Result<(), FdbError> {
    if gamma == 0 || beta == 0 {
        return Err(FdbError::InvalidParameter("mixed orders must both be >= 1".into()));
    }
    cap(gamma + beta, MAX_MIXED_ORDER)
}

/// Calls `f` for every choice of one element per set.
fn for_each_product<'a>(sets: &'a [Vec<Vec<usize>>], f: &mut dyn FnMut(&[&'a Vec<usize>])) {
    fn go<'a>(
        sets: &'a [Vec<Vec<usize>>],
        pick: &mut Vec<&'a Vec<usize>>,
        f: &mut dyn FnMut(&[&'a Vec<usize>]),
    ) {
        if pick.len() == sets.len() {
            f(pick);
            return;
        }
        for e in &sets[pick.len()] {
            pick.push(e);
            go(sets, pick, f);
            pick.pop();
        }
    }
    go(sets, &mut Vec::with_capacity(sets.len()), f);
}

/// Sets `R(d_k, a_k)` for `k = 1..=β`.
fn block_sets(a: &[usize], d: &[usize]) -> Result<Vec<Vec<Vec<usize>>>, FdbError> {
    a.iter()
        .zip(d)
        .map(|(&ak, &dk)| elements(CompositionKind::RPair { lambda: dk, mu: ak }))
        .collect()
}

/// `∂1^γ ∂2^β log(1+J)` for `γ, β >= 1`.
///
/// Blocks of the set partition are split into pure `∂1` blocks (carrying
/// `s` of the `γ` first-variable derivatives, shape `b ∈ R(s)`) and blocks
/// containing `∂2`, whose `∂2` shape is `a ∈ R(β)`. The remaining `γ − s`
/// first-variable derivatives are spread over the `a_k` blocks of `∂2`-size
/// `k` as `d ∈ T(β, γ−s)`, and `c^k ∈ R(d_k, a_k)` records how many of those
/// blocks receive `j = 0, 1, ...` of them:
///
/// `Σ_s C(γ,s) Σ_b Σ_a Σ_d Σ_c (-1)^{L-1}(L-1)!/(1+J)^L P_s(b) P_β(a)
///  N_{β,γ−s}(d) ∏_k W_{d_k,a_k}(c^k) ∏_j (∂1^j J)^{b_j}
///  ∏_k ∏_{j≥0} (∂1^j ∂2^k J)^{c^k_j}`, with `L = l(b) + l(a)`.
pub fn log_expansion_mixed(gamma: usize, beta: usize) -> Result<Arc<Expansion>, FdbError> {
    check_mixed(gamma, beta)?;
    memo(Key::Mixed(gamma, beta), || {
        let mut e = Expansion::default();
        let shapes_a = elements(CompositionKind::R { beta })?;
        for s in 0..=gamma {
            let choose = factorial(gamma) / (factorial(s) * factorial(gamma - s));
            for b in elements(CompositionKind::R { beta: s })? {
                let lb: usize = b.iter().sum();
                let pb = partition_weight(s, &b);
                for a in &shapes_a {
                    let la: usize = a.iter().sum();
                    let outer = log_outer(la + lb);
                    let pa = partition_weight(beta, a);
                    for d in elements(CompositionKind::T { lambda: beta, mu: gamma - s })? {
                        let sets = block_sets(a, &d)?;
                        let base: BigUint = &choose * &pb * &pa * n_value(gamma - s, &d);
                        for_each_product(&sets, &mut |c| {
                            let mut coeff = base.clone();
                            let mut factors = one_d_factors(&b);
                            for (k, ck) in c.iter().enumerate() {
                                coeff *= w_value(d[k], a[k], ck);
                                for (j, &mult) in ck.iter().enumerate() {
                                    factors.extend(std::iter::repeat((j, k + 1)).take(mult));
                                }
                            }
                            let m = Monomial { inv_power: (la + lb) as u32, factors };
                            e.add(m, &outer * BigInt::from(coeff));
                        });
                    }
                }
            }
        }
        Ok(e)
    })
}

/// Readings of the first factor of `W` in the printed mixed formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WReading {
    /// `μ!/a_0!`
    A0Factorial,
    /// `μ!/a_0`, undefined when `a_0 = 0`.
    Literal,
}

/// The mixed formula exactly as printed in its two-sum form: a pure
/// part pairing `a ∈ R(β)` with `∂1^j J` and `b ∈ R(γ)` with `∂2^k J`,
/// and a part with every `∂1` attached to a `∂2` block and the inner
/// product taken over `j = 1..=b_k` only. `None` when the chosen `W`
/// reading is undefined for some term.
pub fn printed_mixed_expansion(
    gamma: usize,
    beta: usize,
    reading: WReading,
) -> Result<Option<Expansion>, FdbError> {
    check_mixed(gamma, beta)?;
    let mut e = Expansion::default();
    let shapes_a = elements(CompositionKind::R { beta })?;

    for b in elements(CompositionKind::R { beta: gamma })? {
        for a in &shapes_a {
            let l = a.iter().sum::<usize>() + b.iter().sum::<usize>();
            let mut factors: Vec<(usize, usize)> = one_d_factors(a);
            for (k, &m) in b.iter().enumerate() {
                factors.extend(std::iter::repeat((0, k + 1)).take(m));
            }
            let coeff = BigInt::from(partition_weight(beta, a) * partition_weight(gamma, &b));
            e.add(Monomial { inv_power: l as u32, factors }, log_outer(l) * coeff);
        }
    }

    let mut undefined = false;
    for a in &shapes_a {
        let la: usize = a.iter().sum();
        let outer = log_outer(la);
        let pa = partition_weight(beta, a);
        for d in elements(CompositionKind::T { lambda: beta, mu: gamma })? {
            let sets = block_sets(a, &d)?;
            let base: BigUint = &pa * n_value(gamma, &d);
            for_each_product(&sets, &mut |c| {
                let mut coeff = BigInt::from(base.clone());
                let mut factors = Vec::new();
                for (k, ck) in c.iter().enumerate() {
                    let w = match reading {
                        WReading::A0Factorial => w_value(d[k], a[k], ck),
                        WReading::Literal => {
                            if ck[0] == 0 {
                                undefined = true;
                                return;
                            }
                            factorial(a[k]) / BigUint::from(ck[0]) * partition_weight(d[k], &ck[1..])
                        }
                    };
                    coeff *= BigInt::from(w);
                    for (j, &mult) in ck.iter().enumerate().skip(1) {
                        factors.extend(std::iter::repeat((j, k + 1)).take(mult));
                    }
                }
                e.add(Monomial { inv_power: la as u32, factors }, &outer * coeff);
            });
        }
    }
    Ok((!undefined).then_some(e))
}

/// Rectangular table of `∂1^i ∂2^k J` for `i <= γ`, `k <= β`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedJet<T> {
    values: Vec<Vec<T>>,
}

impl<T: Clone> MixedJet<T> {
    /// `values[i][k] = ∂1^i ∂2^k J`.
    pub fn new(values: Vec<Vec<T>>) -> Self {
        MixedJet { values }
    }

    pub fn from_fn(gamma: usize, beta: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let values = (0..=gamma).map(|i| (0..=beta).map(|k| f(i, k)).collect()).collect();
        MixedJet { values }
    }

    pub fn get(&self, i: usize, k: usize) -> Option<&T> {
        self.values.get(i).and_then(|row| row.get(k))
    }

    fn lookup(&self, i: usize, k: usize) -> Result<T, FdbError> {
        self.get(i, k).cloned().ok_or(FdbError::IncompleteJet(i, k))
    }
}

fn inverse_of_one_plus<T: Scalar>(j: &T) -> Result<T, FdbError> {
    let s = T::one() + j.clone();
    if s <= T::zero() {
        return Err(FdbError::NonPositive);
    }
    Ok(T::one() / s)
}

fn check_jet<T>(jet: &[T], beta: usize) -> Result<(), FdbError> {
    if jet.len() <= beta {
        Err(FdbError::InsufficientJet { have: jet.len().saturating_sub(1), need: beta })
    } else {
        Ok(())
    }
}

/// `e^{-h} ∂^β e^h` from the derivative values `h_jet[j] = h^{(j)}(x)`.
pub fn exp_derivative_factor<T: Scalar>(h_jet: &[T], beta: usize) -> Result<T, FdbError> {
    let e = exp_expansion(beta)?;
    check_jet(h_jet, beta)?;
    e.eval(|i, _| Ok(h_jet[i].clone()), &T::one())
}

/// `∂^β e^h` at the point where `h_jet` was taken.
pub fn exp_derivative<T: Scalar>(h_jet: &[T], beta: usize) -> Result<T, FdbError> {
    let factor = exp_derivative_factor(h_jet, beta)?;
    let eh = T::apply(Func::Exp, &h_jet[0]).ok_or(FdbError::Unsupported)?;
    Ok(factor * eh)
}

/// `∂^β log(1+J)` from `j_jet[i] = J^{(i)}(x)`; requires `1 + J > 0`.
pub fn log_derivative_1d<T: Scalar>(j_jet: &[T], beta: usize) -> Result<T, FdbError> {
    let e = log_expansion_1d(beta)?;
    check_jet(j_jet, beta)?;
    let inv = inverse_of_one_plus(&j_jet[0])?;
    e.eval(|i, _| Ok(j_jet[i].clone()), &inv)
}

/// `∂1^γ ∂2^β log(1+J)`; requires `1 + J > 0`.
pub fn log_derivative_mixed<T: Scalar>(
    jet: &MixedJet<T>,
    gamma: usize,
    beta: usize,
) -> Result<T, FdbError> {
    let e = log_expansion_mixed(gamma, beta)?;
    let inv = inverse_of_one_plus(&jet.lookup(0, 0)?)?;
    e.eval(|i, k| jet.lookup(i, k), &inv)
}

/// The printed mixed formula evaluated on `jet`; `Ok(None)` when the
/// reading leaves it undefined.
pub fn printed_mixed_value<T: Scalar>(
    jet: &MixedJet<T>,
    gamma: usize,
    beta: usize,
    reading: WReading,
) -> Result<Option<T>, FdbError> {
    let Some(e) = printed_mixed_expansion(gamma, beta, reading)? else {
        return Ok(None);
    };
    let inv = inverse_of_one_plus(&jet.lookup(0, 0)?)?;
    let lookup = |i: usize, k: usize| jet.lookup(i, k);
    e.eval(lookup, &inv).map(Some)
}
