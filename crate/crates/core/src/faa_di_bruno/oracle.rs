//! Reference expansions by repeated formal differentiation, with no use
//! of the index sets. Also integer-partition and set-partition counts.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::formulas::{Expansion, Monomial};

/// One derivative of every term. `dir` is `(1, 0)` or `(0, 1)`; the
/// symbol `P = (1+J)^{-1}` has `∂P = −P² ∂J`, and `∂1^i ∂2^k J` moves to
/// the next index. With `exp_symbol` set, the implicit factor is `e^h`
/// instead of a power of `P`, and `∂e^h = e^h ∂h`.
fn differentiate(e: &Expansion, dir: (usize, usize), exp_symbol: bool) -> Expansion {
    let mut out = Expansion::default();
    for (m, c) in &e.terms {
        if exp_symbol {
            let mut f = m.factors.clone();
            f.push(dir);
            out.add(Monomial { inv_power: 0, factors: f }, c.clone());
        } else if m.inv_power > 0 {
            let mut f = m.factors.clone();
            f.push(dir);
            let p = m.inv_power;
            out.add(Monomial { inv_power: p + 1, factors: f }, -(c * BigInt::from(p)));
        }
        for i in 0..m.factors.len() {
            let mut f = m.factors.clone();
            f[i] = (f[i].0 + dir.0, f[i].1 + dir.1);
            out.add(Monomial { inv_power: m.inv_power, factors: f }, c.clone());
        }
    }
    out
}

/// `e^{-h} ∂^β e^h` as a polynomial in `(j, 0) = h^{(j)}`.
pub fn exp_expansion(beta: usize) -> Expansion {
    let mut e = Expansion::default();
    e.add(Monomial { inv_power: 0, factors: Vec::new() }, BigInt::one());
    for _ in 0..beta {
        e = differentiate(&e, (1, 0), true);
    }
    e
}

/// `∂1^γ ∂2^β log(1+J)` for `γ + β >= 1`.
pub fn log_expansion(gamma: usize, beta: usize) -> Expansion {
    assert!(gamma + beta >= 1, "at least one derivative is needed");
    let first = if gamma > 0 { (1, 0) } else { (0, 1) };
    let mut e = Expansion::default();
    e.add(Monomial { inv_power: 1, factors: vec![first] }, BigInt::one());
    let (rest1, rest2) = if gamma > 0 { (gamma - 1, beta) } else { (0, beta - 1) };
    for _ in 0..rest1 {
        e = differentiate(&e, (1, 0), false);
    }
    for _ in 0..rest2 {
        e = differentiate(&e, (0, 1), false);
    }
    e
}

/// Number of integer partitions of `n`, by dynamic programming over parts.
pub fn partition_count(n: usize) -> BigUint {
    let mut ways = vec![BigUint::zero(); n + 1];
    ways[0] = BigUint::one();
    for part in 1..=n {
        for total in part..=n {
            let add = ways[total - part].clone();
            ways[total] += add;
        }
    }
    ways[n].clone()
}

/// Number of set partitions of `n` labels, by the Bell triangle.
pub fn bell_number(n: usize) -> BigUint {
    let mut row = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = vec![row.last().cloned().unwrap_or_else(BigUint::one)];
        for v in &row {
            let add = next.last().unwrap() + v;
            next.push(add);
        }
        row = next;
    }
    row[0].clone()
}
