//! Single-variable expressions with evaluation and exact symbolic
//! differentiation.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          right associative
//! primary := number | 'pi' | 'e' | var | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | sinh | cosh | tanh | exp | ln | sqrt | abs
//! ```
//!
//! Exponents must be constant. There is no implicit multiplication.

pub(crate) mod diff;
mod parser;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::scalar::Real;

pub use parser::ParseError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree node. The variable carries no name; [`Expr`] holds it.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Num(f64),
    Var,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, f64),
    Call(Func, Box<Node>),
}

impl Node {
    pub fn contains_var(&self) -> bool {
        match self {
            Node::Num(_) => false,
            Node::Var => true,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.contains_var(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.contains_var() || b.contains_var()
            }
        }
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Node::Num(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error: {op} of {value} in `{subexpr}`")]
    Domain {
        op: &'static str,
        value: f64,
        subexpr: String,
    },
    #[error("non-finite result in `{subexpr}`")]
    NonFinite { subexpr: String },
}

/// A parsed expression in one named variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    var: Arc<str>,
    root: Node,
}

/// Parses `text` as an expression in the variable `var`.
pub fn parse(text: &str, var: &str) -> Result<Expr, ParseError> {
    let root = parser::Parser::new(text, var).parse()?;
    Ok(Expr { var: Arc::from(var), root })
}

impl Expr {
    pub fn from_node(var: &str, root: Node) -> Self {
        Self { var: Arc::from(var), root }
    }

    pub fn constant(var: &str, v: f64) -> Self {
        Self::from_node(var, Node::Num(v))
    }

    pub fn var_name(&self) -> &str {
        &self.var
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn is_constant(&self) -> bool {
        !self.root.contains_var()
    }

    /// Evaluates the tree at `value`.
    pub fn eval<T: Real>(&self, value: T) -> Result<T, EvalError> {
        self.eval_node(&self.root, value)
    }

    /// Exact derivative with respect to the variable.
    pub fn derivative(&self) -> Expr {
        Expr { var: self.var.clone(), root: diff::differentiate(&self.root) }
    }

    /// The `k`-th derivative.
    pub fn nth_derivative(&self, k: usize) -> Expr {
        (0..k).fold(self.clone(), |e, _| e.derivative())
    }

    /// Combines two expressions in the same variable.
    pub fn combine(&self, other: &Expr, f: impl FnOnce(Node, Node) -> Node) -> Expr {
        Expr { var: self.var.clone(), root: f(self.root.clone(), other.root.clone()) }
    }

    pub fn map(&self, f: impl FnOnce(Node) -> Node) -> Expr {
        Expr { var: self.var.clone(), root: f(self.root.clone()) }
    }

    fn fail(&self, node: &Node, op: &'static str, value: f64) -> EvalError {
        EvalError::Domain { op, value, subexpr: self.show(node) }
    }

    fn show(&self, node: &Node) -> String {
        Display { node, var: &self.var }.to_string()
    }

    fn eval_node<T: Real>(&self, node: &Node, x: T) -> Result<T, EvalError> {
        let out = match node {
            Node::Num(v) => T::lit(*v),
            Node::Var => x,
            Node::Neg(a) => -self.eval_node(a, x)?,
            Node::Add(a, b) => self.eval_node(a, x)? + self.eval_node(b, x)?,
            Node::Sub(a, b) => self.eval_node(a, x)? - self.eval_node(b, x)?,
            Node::Mul(a, b) => self.eval_node(a, x)? * self.eval_node(b, x)?,
            Node::Div(a, b) => {
                let den = self.eval_node(b, x)?;
                if den == T::zero() {
                    return Err(self.fail(node, "division by", 0.0));
                }
                self.eval_node(a, x)? / den
            }
            Node::Pow(a, p) => {
                let base = self.eval_node(a, x)?;
                pow(base, *p).ok_or_else(|| self.fail(node, "power", base.to_f64_lossy()))?
            }
            Node::Call(f, a) => {
                let u = self.eval_node(a, x)?;
                match f {
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Sinh => u.sinh(),
                    Func::Cosh => u.cosh(),
                    Func::Tanh => u.tanh(),
                    Func::Exp => u.exp(),
                    Func::Ln => {
                        if u <= T::zero() {
                            return Err(self.fail(node, "ln", u.to_f64_lossy()));
                        }
                        u.ln()
                    }
                    Func::Sqrt => {
                        if u < T::zero() {
                            return Err(self.fail(node, "sqrt", u.to_f64_lossy()));
                        }
                        u.sqrt()
                    }
                    Func::Abs => u.abs(),
                }
            }
        };
        if out.is_finite() {
            Ok(out)
        } else {
            Err(EvalError::NonFinite { subexpr: self.show(node) })
        }
    }
}

fn pow<T: Real>(base: T, p: f64) -> Option<T> {
    if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
        if base == T::zero() && p < 0.0 {
            return None;
        }
        Some(base.powi(p as i32))
    } else if base < T::zero() {
        None
    } else if base == T::zero() && p < 0.0 {
        None
    } else {
        Some(base.powf(T::lit(p)))
    }
}

struct Display<'a> {
    node: &'a Node,
    var: &'a str,
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, self.node, self.var)
    }
}

fn write_num(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    if v < 0.0 || (v == 0.0 && v.is_sign_negative()) {
        write!(f, "(-{:?})", -v)
    } else {
        write!(f, "{v:?}")
    }
}

// Fully parenthesized so that the output reparses to the same tree shape.
fn write_node(f: &mut fmt::Formatter<'_>, node: &Node, var: &str) -> fmt::Result {
    let bin = |f: &mut fmt::Formatter<'_>, a: &Node, op: &str, b: &Node| -> fmt::Result {
        f.write_str("(")?;
        write_node(f, a, var)?;
        write!(f, " {op} ")?;
        write_node(f, b, var)?;
        f.write_str(")")
    };
    match node {
        Node::Num(v) => write_num(f, *v),
        Node::Var => f.write_str(var),
        Node::Neg(a) => {
            f.write_str("(-")?;
            write_node(f, a, var)?;
            f.write_str(")")
        }
        Node::Add(a, b) => bin(f, a, "+", b),
        Node::Sub(a, b) => bin(f, a, "-", b),
        Node::Mul(a, b) => bin(f, a, "*", b),
        Node::Div(a, b) => bin(f, a, "/", b),
        Node::Pow(a, p) => {
            f.write_str("(")?;
            write_node(f, a, var)?;
            f.write_str("^")?;
            write_num(f, *p)?;
            f.write_str(")")
        }
        Node::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_node(f, a, var)?;
            f.write_str(")")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.root, &self.var)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(text: &str, var: &str, at: f64) -> f64 {
        parse(text, var).unwrap().eval(at).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(ev("s^2/2", "s", 2.0), 2.0);
        assert_eq!(ev("sinh(2*ln(s))", "s", 1.0), 0.0);
        assert_eq!(ev("cosh(2*ln(s))", "s", 1.0), 1.0);
        let v = ev("2*cosh(2*ln(s)) - sinh(2*ln(s))", "s", 2.0);
        assert!((v - 19.0 / 8.0).abs() < 1e-15, "{v}");
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("-x^2", "x", 3.0), -9.0);
        assert_eq!(ev("2^3^2", "x", 0.0), 512.0);
        assert_eq!(ev("8/4/2", "x", 0.0), 1.0);
        assert_eq!(ev("1-2-3", "x", 0.0), -4.0);
        assert_eq!(ev("2*-x", "x", 3.0), -6.0);
        assert_eq!(ev("x^-1", "x", 4.0), 0.25);
        assert_eq!(ev("(1+x)*(1-x)", "x", 2.0), -3.0);
        assert!((ev("pi", "x", 0.0) - std::f64::consts::PI).abs() < 1e-15);
        assert!((ev("e^2", "x", 1.0) - std::f64::consts::E.powi(2)).abs() < 1e-14);
        assert_eq!(ev("1.5e2 + 2E-1", "x", 0.0), 150.2);
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let e = parse("1/s", "s").unwrap();
        match e.eval(0.0f64) {
            Err(EvalError::Domain { op, subexpr, .. }) => {
                assert_eq!(op, "division by");
                assert_eq!(subexpr, "(1.0 / s)");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse("ln(x - 1)", "x").unwrap().eval(0.5f64),
            Err(EvalError::Domain { op: "ln", .. })
        ));
        assert!(matches!(
            parse("sqrt(x)", "x").unwrap().eval(-1.0f64),
            Err(EvalError::Domain { op: "sqrt", .. })
        ));
        assert!(matches!(
            parse("x^0.5", "x").unwrap().eval(-1.0f64),
            Err(EvalError::Domain { op: "power", .. })
        ));
        assert!(matches!(
            parse("exp(x)", "x").unwrap().eval(1000.0f64),
            Err(EvalError::NonFinite { .. })
        ));
    }

    #[test]
    fn generic_scalar_evaluation() {
        let e = parse("cosh(2*ln(s))", "s").unwrap();
        let v32: f32 = e.eval(2.0f32).unwrap();
        assert!((v32 - 2.125).abs() < 1e-6);
    }

    #[test]
    fn display_reparses() {
        let e = parse("-x^2 + 3*sin(x)/(1 - x) - 2^-1", "x").unwrap();
        let again = parse(&e.to_string(), "x").unwrap();
        assert_eq!(e, again);
    }
}
