//! Truncated Taylor series arithmetic.
//!
//! A series of order `n` stores the normalized coefficients
//! `c[k] = f^(k)(x0) / k!` for `k = 0..=n`. All operations here are the
//! standard recurrences; none of them need symbolic differentiation.

use super::scalar::Scalar;

pub type Series<T> = Vec<T>;

pub fn constant<T: Scalar>(c: T, n: usize) -> Series<T> {
    let mut s = vec![T::zero(); n + 1];
    s[0] = c;
    s
}

pub fn variable<T: Scalar>(x: T, n: usize) -> Series<T> {
    let mut s = constant(x, n);
    if n >= 1 {
        s[1] = T::one();
    }
    s
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Series<T> {
    a.iter().zip(b).map(|(p, q)| p.clone() + q.clone()).collect()
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Series<T> {
    a.iter().zip(b).map(|(p, q)| p.clone() - q.clone()).collect()
}

pub fn neg<T: Scalar>(a: &[T]) -> Series<T> {
    a.iter().map(|p| -p.clone()).collect()
}

pub fn mul<T: Scalar>(a: &[T], b: &[T]) -> Series<T> {
    let n = a.len();
    (0..n)
        .map(|k| {
            let mut acc = T::zero();
            for j in 0..=k {
                acc = acc + a[j].clone() * b[k - j].clone();
            }
            acc
        })
        .collect()
}

/// `a / b`; the caller guarantees `b[0] != 0`.
pub fn div<T: Scalar>(a: &[T], b: &[T]) -> Series<T> {
    let n = a.len();
    let mut c: Series<T> = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = a[k].clone();
        for j in 1..=k {
            acc = acc - b[j].clone() * c[k - j].clone();
        }
        c.push(acc / b[0].clone());
    }
    c
}

/// Non-negative integer power by repeated squaring.
pub fn powi<T: Scalar>(a: &[T], k: u32) -> Series<T> {
    let n = a.len() - 1;
    let mut result = constant(T::one(), n);
    let mut base = a.to_vec();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = mul(&result, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(&base, &base);
        }
    }
    result
}

/// `exp(a)` given `e0 = exp(a[0])`.
pub fn exp<T: Scalar>(a: &[T], e0: T) -> Series<T> {
    let n = a.len();
    let mut e: Series<T> = Vec::with_capacity(n);
    e.push(e0);
    for k in 1..n {
        let mut acc = T::zero();
        for j in 1..=k {
            acc = acc + T::from_i64(j as i64) * a[j].clone() * e[k - j].clone();
        }
        e.push(acc / T::from_i64(k as i64));
    }
    e
}

/// `log(a)` given `l0 = log(a[0])`; the caller guarantees `a[0] > 0`.
pub fn log<T: Scalar>(a: &[T], l0: T) -> Series<T> {
    let n = a.len();
    let mut l: Series<T> = Vec::with_capacity(n);
    l.push(l0);
    for k in 1..n {
        let mut acc = T::zero();
        for j in 1..k {
            acc = acc + T::from_i64(j as i64) * l[j].clone() * a[k - j].clone();
        }
        let lk = (a[k].clone() - acc / T::from_i64(k as i64)) / a[0].clone();
        l.push(lk);
    }
    l
}

/// Joint recurrence for `(sin a, cos a)`, or `(sinh a, cosh a)` when
/// `hyperbolic` is set.
pub fn sin_cos<T: Scalar>(a: &[T], s0: T, c0: T, hyperbolic: bool) -> (Series<T>, Series<T>) {
    let n = a.len();
    let mut s: Series<T> = Vec::with_capacity(n);
    let mut c: Series<T> = Vec::with_capacity(n);
    s.push(s0);
    c.push(c0);
    for k in 1..n {
        let mut sk = T::zero();
        let mut ck = T::zero();
        for j in 1..=k {
            let ja = T::from_i64(j as i64) * a[j].clone();
            sk = sk + ja.clone() * c[k - j].clone();
            ck = ck + ja * s[k - j].clone();
        }
        let kk = T::from_i64(k as i64);
        s.push(sk / kk.clone());
        c.push(if hyperbolic { ck / kk } else { -(ck / kk) });
    }
    (s, c)
}

/// Converts normalized coefficients to derivative values (multiplies by k!).
pub fn to_derivatives<T: Scalar>(s: Series<T>) -> Vec<T> {
    let mut fact = T::one();
    s.into_iter()
        .enumerate()
        .map(|(k, c)| {
            if k > 0 {
                fact = fact.clone() * T::from_i64(k as i64);
            }
            c * fact.clone()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exp_of_variable_is_factorial_series() {
        let a = variable(0.0_f64, 6);
        let e = to_derivatives(exp(&a, 1.0));
        for v in e {
            assert_relative_eq!(v, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = vec![1.0, 2.0, -0.5, 0.25];
        let b = vec![2.0, 1.0, 3.0, -1.0];
        let q = div(&mul(&a, &b), &b);
        for (p, r) in q.iter().zip(&a) {
            assert_relative_eq!(*p, *r, epsilon = 1e-13);
        }
    }

    #[test]
    fn log_inverts_exp() {
        let a = vec![0.3, -1.0, 0.5, 2.0, 0.1];
        let e = exp(&a, a[0].exp());
        let l = log(&e, e[0].ln());
        for (p, r) in l.iter().zip(&a) {
            assert_relative_eq!(*p, *r, epsilon = 1e-13);
        }
    }

    #[test]
    fn pythagoras_holds_for_series() {
        let a = vec![0.7, 1.3, -0.2, 0.4, 0.9];
        let (s, c) = sin_cos(&a, a[0].sin(), a[0].cos(), false);
        let one = add(&mul(&s, &s), &mul(&c, &c));
        assert_relative_eq!(one[0], 1.0, epsilon = 1e-14);
        for v in &one[1..] {
            assert!(v.abs() < 1e-13);
        }
    }
}
