//! Expression algebra for smooth functions of one real variable.
//!
//! A [`SmoothExpr`] is an immutable, reference-counted expression tree over
//! the variable `x`. It can be parsed from text, printed back in canonical
//! form, differentiated exactly to any order up to
//! [`MAX_DERIVATIVE_ORDER`], evaluated over `f64` or exact rationals, and
//! expanded into a derivative [`Jet`] at a point by Taylor-mode arithmetic.
//!
//! The only simplification performed is constant folding (including the
//! neutral elements `0` and `1`); derivative trees are otherwise left as
//! the differentiation rules produce them.

mod parse;
pub mod scalar;
pub mod taylor;

use std::fmt;
use std::ops;
use std::sync::Arc;

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

pub use parse::parse_expression;
pub use scalar::Scalar;

/// Highest derivative order accepted by [`SmoothExpr::differentiate`] and
/// [`SmoothExpr::jet`].
pub const MAX_DERIVATIVE_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", .expected.join(" | "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("empty expression")]
    Empty,
    #[error("{reason} in `{node}`")]
    Domain { node: String, reason: &'static str },
    #[error("`{node}` cannot be evaluated over this number type")]
    Unsupported { node: String },
    #[error("derivative order {requested} exceeds the cap of {cap}")]
    OrderCap { requested: usize, cap: usize },
}

/// Elementary functions available in expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sinh,
    Cosh,
}

impl Func {
    pub const ALL: [Func; 6] = [
        Func::Exp,
        Func::Log,
        Func::Sin,
        Func::Cos,
        Func::Sinh,
        Func::Cosh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var,
    Neg(SmoothExpr),
    Add(SmoothExpr, SmoothExpr),
    Sub(SmoothExpr, SmoothExpr),
    Mul(SmoothExpr, SmoothExpr),
    Div(SmoothExpr, SmoothExpr),
    Pow(SmoothExpr, i32),
    Apply(Func, SmoothExpr),
}

/// Symbolic smooth function of `x`. Cloning is cheap (shared tree).
#[derive(Clone, PartialEq)]
pub struct SmoothExpr(Arc<Node>);

impl SmoothExpr {
    fn from_node(node: Node) -> Self {
        SmoothExpr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(c: f64) -> Self {
        Self::from_node(Node::Const(c))
    }

    pub fn var() -> Self {
        Self::from_node(Node::Var)
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn neg_expr(&self) -> Self {
        match self.node() {
            Node::Const(c) => Self::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Self::from_node(Node::Neg(self.clone())),
        }
    }

    pub fn add_expr(&self, rhs: &Self) -> Self {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Self::constant(a + b),
            (Some(a), _) if a == 0.0 => rhs.clone(),
            (_, Some(b)) if b == 0.0 => self.clone(),
            _ => Self::from_node(Node::Add(self.clone(), rhs.clone())),
        }
    }

    pub fn sub_expr(&self, rhs: &Self) -> Self {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Self::constant(a - b),
            (Some(a), _) if a == 0.0 => rhs.neg_expr(),
            (_, Some(b)) if b == 0.0 => self.clone(),
            _ => Self::from_node(Node::Sub(self.clone(), rhs.clone())),
        }
    }

    pub fn mul_expr(&self, rhs: &Self) -> Self {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Self::constant(a * b),
            (Some(a), _) | (_, Some(a)) if a == 0.0 => Self::zero(),
            (Some(a), _) if a == 1.0 => rhs.clone(),
            (_, Some(b)) if b == 1.0 => self.clone(),
            (Some(a), _) if a == -1.0 => rhs.neg_expr(),
            (_, Some(b)) if b == -1.0 => self.neg_expr(),
            _ => Self::from_node(Node::Mul(self.clone(), rhs.clone())),
        }
    }

    pub fn div_expr(&self, rhs: &Self) -> Self {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) if b != 0.0 => Self::constant(a / b),
            (Some(a), _) if a == 0.0 => Self::zero(),
            (_, Some(b)) if b == 1.0 => self.clone(),
            _ => Self::from_node(Node::Div(self.clone(), rhs.clone())),
        }
    }

    pub fn powi(&self, k: i32) -> Self {
        match (k, self.as_const()) {
            (0, _) => Self::one(),
            (1, _) => self.clone(),
            (_, Some(c)) if k > 0 || c != 0.0 => Self::constant(c.powi(k)),
            _ => Self::from_node(Node::Pow(self.clone(), k)),
        }
    }

    pub fn apply(&self, func: Func) -> Self {
        Self::from_node(Node::Apply(func, self.clone()))
    }

    pub fn exp(&self) -> Self {
        self.apply(Func::Exp)
    }

    pub fn log(&self) -> Self {
        self.apply(Func::Log)
    }

    pub fn sin(&self) -> Self {
        self.apply(Func::Sin)
    }

    pub fn cos(&self) -> Self {
        self.apply(Func::Cos)
    }

    pub fn sinh(&self) -> Self {
        self.apply(Func::Sinh)
    }

    pub fn cosh(&self) -> Self {
        self.apply(Func::Cosh)
    }

    /// First derivative with respect to `x`.
    pub fn derivative(&self) -> Self {
        match self.node() {
            Node::Const(_) => Self::zero(),
            Node::Var => Self::one(),
            Node::Neg(a) => a.derivative().neg_expr(),
            Node::Add(a, b) => a.derivative().add_expr(&b.derivative()),
            Node::Sub(a, b) => a.derivative().sub_expr(&b.derivative()),
            Node::Mul(a, b) => a
                .derivative()
                .mul_expr(b)
                .add_expr(&a.mul_expr(&b.derivative())),
            Node::Div(a, b) => a
                .derivative()
                .mul_expr(b)
                .sub_expr(&a.mul_expr(&b.derivative()))
                .div_expr(&b.powi(2)),
            Node::Pow(a, k) => Self::constant(f64::from(*k))
                .mul_expr(&a.powi(k - 1))
                .mul_expr(&a.derivative()),
            Node::Apply(func, a) => {
                let da = a.derivative();
                let outer = match func {
                    Func::Exp => self.clone(),
                    Func::Log => a.powi(-1),
                    Func::Sin => a.cos(),
                    Func::Cos => a.sin().neg_expr(),
                    Func::Sinh => a.cosh(),
                    Func::Cosh => a.sinh(),
                };
                outer.mul_expr(&da)
            }
        }
    }

    /// Exact `n`-th derivative; `differentiate(0)` is the expression itself.
    pub fn differentiate(&self, n: usize) -> Result<Self, ExprError> {
        check_order(n)?;
        let mut e = self.clone();
        for _ in 0..n {
            e = e.derivative();
        }
        Ok(e)
    }

    /// Point evaluation over `f64`.
    pub fn eval(&self, x: f64) -> Result<f64, ExprError> {
        let v = match self.node() {
            Node::Const(c) => *c,
            Node::Var => x,
            Node::Neg(a) => -a.eval(x)?,
            Node::Add(a, b) => a.eval(x)? + b.eval(x)?,
            Node::Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Node::Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Node::Div(a, b) => {
                let d = b.eval(x)?;
                if d == 0.0 {
                    return Err(self.domain("division by zero"));
                }
                a.eval(x)? / d
            }
            Node::Pow(a, k) => {
                let base = a.eval(x)?;
                if base == 0.0 && *k < 0 {
                    return Err(self.domain("negative power of zero"));
                }
                base.powi(*k)
            }
            Node::Apply(func, a) => {
                let arg = a.eval(x)?;
                if *func == Func::Log && arg <= 0.0 {
                    return Err(self.domain("log of a non-positive value"));
                }
                <f64 as Scalar>::apply(*func, &arg).expect("f64 supports every function")
            }
        };
        Ok(v)
    }

    /// Point evaluation over any [`Scalar`].
    pub fn eval_generic<T: Scalar>(&self, x: &T) -> Result<T, ExprError> {
        let v = match self.node() {
            Node::Const(c) => T::from_f64(*c).ok_or_else(|| self.unsupported())?,
            Node::Var => x.clone(),
            Node::Neg(a) => -a.eval_generic(x)?,
            Node::Add(a, b) => a.eval_generic(x)? + b.eval_generic(x)?,
            Node::Sub(a, b) => a.eval_generic(x)? - b.eval_generic(x)?,
            Node::Mul(a, b) => a.eval_generic(x)? * b.eval_generic(x)?,
            Node::Div(a, b) => {
                let d = b.eval_generic(x)?;
                if d.is_zero() {
                    return Err(self.domain("division by zero"));
                }
                a.eval_generic(x)? / d
            }
            Node::Pow(a, k) => {
                let base = a.eval_generic(x)?;
                if *k < 0 {
                    if base.is_zero() {
                        return Err(self.domain("negative power of zero"));
                    }
                    T::one() / pow_nonneg(base, k.unsigned_abs())
                } else {
                    pow_nonneg(base, k.unsigned_abs())
                }
            }
            Node::Apply(func, a) => {
                let arg = a.eval_generic(x)?;
                if *func == Func::Log && arg <= T::zero() {
                    return Err(self.domain("log of a non-positive value"));
                }
                T::apply(*func, &arg).ok_or_else(|| self.unsupported())?
            }
        };
        Ok(v)
    }

    /// Exact evaluation over rationals (polynomial / rational expressions).
    pub fn eval_rational(&self, x: &BigRational) -> Result<BigRational, ExprError> {
        self.eval_generic(x)
    }

    /// Normalized Taylor coefficients `f^(k)(x)/k!`, `k = 0..=n`.
    pub fn taylor<T: Scalar>(&self, x: &T, n: usize) -> Result<Vec<T>, ExprError> {
        let s = match self.node() {
            Node::Const(c) => {
                taylor::constant(T::from_f64(*c).ok_or_else(|| self.unsupported())?, n)
            }
            Node::Var => taylor::variable(x.clone(), n),
            Node::Neg(a) => taylor::neg(&a.taylor(x, n)?),
            Node::Add(a, b) => taylor::add(&a.taylor(x, n)?, &b.taylor(x, n)?),
            Node::Sub(a, b) => taylor::sub(&a.taylor(x, n)?, &b.taylor(x, n)?),
            Node::Mul(a, b) => taylor::mul(&a.taylor(x, n)?, &b.taylor(x, n)?),
            Node::Div(a, b) => {
                let d = b.taylor(x, n)?;
                if d[0].is_zero() {
                    return Err(self.domain("division by zero"));
                }
                taylor::div(&a.taylor(x, n)?, &d)
            }
            Node::Pow(a, k) => {
                let base = a.taylor(x, n)?;
                if *k < 0 {
                    if base[0].is_zero() {
                        return Err(self.domain("negative power of zero"));
                    }
                    let inv = taylor::div(&taylor::constant(T::one(), n), &base);
                    taylor::powi(&inv, k.unsigned_abs())
                } else {
                    taylor::powi(&base, k.unsigned_abs())
                }
            }
            Node::Apply(func, a) => {
                let s = a.taylor(x, n)?;
                let f0 = |f: Func| T::apply(f, &s[0]).ok_or_else(|| self.unsupported());
                match func {
                    Func::Exp => taylor::exp(&s, f0(Func::Exp)?),
                    Func::Log => {
                        if s[0] <= T::zero() {
                            return Err(self.domain("log of a non-positive value"));
                        }
                        taylor::log(&s, f0(Func::Log)?)
                    }
                    Func::Sin | Func::Cos => {
                        let (sin, cos) =
                            taylor::sin_cos(&s, f0(Func::Sin)?, f0(Func::Cos)?, false);
                        if *func == Func::Sin {
                            sin
                        } else {
                            cos
                        }
                    }
                    Func::Sinh | Func::Cosh => {
                        let (sinh, cosh) =
                            taylor::sin_cos(&s, f0(Func::Sinh)?, f0(Func::Cosh)?, true);
                        if *func == Func::Sinh {
                            sinh
                        } else {
                            cosh
                        }
                    }
                }
            }
        };
        Ok(s)
    }

    /// Derivative values `f^(k)(x)`, `k = 0..=n`, over any [`Scalar`].
    pub fn jet_generic<T: Scalar>(&self, x: &T, n: usize) -> Result<Vec<T>, ExprError> {
        check_order(n)?;
        Ok(taylor::to_derivatives(self.taylor(x, n)?))
    }

    /// Derivative jet at `x` up to order `n`.
    pub fn jet(&self, x: f64, n: usize) -> Result<Jet, ExprError> {
        let values = self.jet_generic(&x, n)?;
        Ok(Jet { base: x, values })
    }

    /// Number of nodes in the tree (shared subtrees counted each time).
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Const(_) | Node::Var => 1,
            Node::Neg(a) | Node::Pow(a, _) | Node::Apply(_, a) => 1 + a.size(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    fn domain(&self, reason: &'static str) -> ExprError {
        ExprError::Domain {
            node: self.to_string(),
            reason,
        }
    }

    fn unsupported(&self) -> ExprError {
        ExprError::Unsupported {
            node: self.to_string(),
        }
    }
}

fn pow_nonneg<T: Scalar>(base: T, k: u32) -> T {
    let mut result = T::one();
    for _ in 0..k {
        result = result * base.clone();
    }
    result
}

fn check_order(n: usize) -> Result<(), ExprError> {
    if n > MAX_DERIVATIVE_ORDER {
        Err(ExprError::OrderCap {
            requested: n,
            cap: MAX_DERIVATIVE_ORDER,
        })
    } else {
        Ok(())
    }
}

/// Derivative values of a function at a base point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Jet {
    pub base: f64,
    /// `values[k]` is the `k`-th derivative; `values.len() == order + 1`.
    pub values: Vec<f64>,
}

impl Jet {
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }
}

impl std::str::FromStr for SmoothExpr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expression(s)
    }
}

impl From<f64> for SmoothExpr {
    fn from(c: f64) -> Self {
        SmoothExpr::constant(c)
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $impl_fn:ident) => {
        impl ops::$trait<SmoothExpr> for SmoothExpr {
            type Output = SmoothExpr;
            fn $method(self, rhs: SmoothExpr) -> SmoothExpr {
                self.$impl_fn(&rhs)
            }
        }
        impl ops::$trait<&SmoothExpr> for &SmoothExpr {
            type Output = SmoothExpr;
            fn $method(self, rhs: &SmoothExpr) -> SmoothExpr {
                self.$impl_fn(rhs)
            }
        }
        impl ops::$trait<f64> for SmoothExpr {
            type Output = SmoothExpr;
            fn $method(self, rhs: f64) -> SmoothExpr {
                self.$impl_fn(&SmoothExpr::constant(rhs))
            }
        }
        impl ops::$trait<SmoothExpr> for f64 {
            type Output = SmoothExpr;
            fn $method(self, rhs: SmoothExpr) -> SmoothExpr {
                SmoothExpr::constant(self).$impl_fn(&rhs)
            }
        }
    };
}

binary_op!(Add, add, add_expr);
binary_op!(Sub, sub, sub_expr);
binary_op!(Mul, mul, mul_expr);
binary_op!(Div, div, div_expr);

impl ops::Neg for SmoothExpr {
    type Output = SmoothExpr;
    fn neg(self) -> SmoothExpr {
        self.neg_expr()
    }
}

impl ops::Neg for &SmoothExpr {
    type Output = SmoothExpr;
    fn neg(self) -> SmoothExpr {
        self.neg_expr()
    }
}

// Canonical printing. Precedence levels: 1 additive, 2 multiplicative,
// 3 unary minus, 4 power, 5 atom.
fn precedence(node: &Node) -> u8 {
    match node {
        Node::Add(..) | Node::Sub(..) => 1,
        Node::Mul(..) | Node::Div(..) => 2,
        Node::Neg(_) => 3,
        Node::Const(c) if c.is_sign_negative() => 3,
        Node::Pow(..) => 4,
        Node::Const(_) | Node::Var | Node::Apply(..) => 5,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &SmoothExpr, min_prec: u8) -> fmt::Result {
    if precedence(e.node()) < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn write_const(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    if c.is_sign_negative() {
        write!(f, "-{:?}", -c)
    } else {
        write!(f, "{c:?}")
    }
}

impl fmt::Display for SmoothExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => write_const(f, *c),
            Node::Var => write!(f, "x"),
            Node::Neg(a) => {
                write!(f, "-")?;
                write_operand(f, a, 4)
            }
            Node::Add(a, b) => {
                write_operand(f, a, 1)?;
                write!(f, " + ")?;
                write_operand(f, b, 2)
            }
            Node::Sub(a, b) => {
                write_operand(f, a, 1)?;
                write!(f, " - ")?;
                write_operand(f, b, 2)
            }
            Node::Mul(a, b) => {
                write_operand(f, a, 2)?;
                write!(f, "*")?;
                write_operand(f, b, 4)
            }
            Node::Div(a, b) => {
                write_operand(f, a, 2)?;
                write!(f, "/")?;
                write_operand(f, b, 4)
            }
            Node::Pow(a, k) => {
                write_operand(f, a, 5)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            Node::Apply(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

impl fmt::Debug for SmoothExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothExpr({self})")
    }
}
