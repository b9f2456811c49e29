use super::{Func, Node};

fn num(v: f64) -> Node {
    Node::Num(v)
}

fn is(n: &Node, v: f64) -> bool {
    n.as_num() == Some(v)
}

// Smart constructors: constant folding and identity elimination only.

pub(crate) fn add(a: Node, b: Node) -> Node {
    match (a.as_num(), b.as_num()) {
        (Some(x), Some(y)) => num(x + y),
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        _ => Node::Add(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn sub(a: Node, b: Node) -> Node {
    match (a.as_num(), b.as_num()) {
        (Some(x), Some(y)) => num(x - y),
        (Some(x), _) if x == 0.0 => neg(b),
        (_, Some(y)) if y == 0.0 => a,
        _ => Node::Sub(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn mul(a: Node, b: Node) -> Node {
    match (a.as_num(), b.as_num()) {
        (Some(x), Some(y)) => num(x * y),
        (Some(x), _) | (_, Some(x)) if x == 0.0 => num(0.0),
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        (Some(x), _) if x == -1.0 => neg(b),
        (_, Some(y)) if y == -1.0 => neg(a),
        _ => Node::Mul(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn div(a: Node, b: Node) -> Node {
    match (a.as_num(), b.as_num()) {
        (Some(x), Some(y)) if y != 0.0 => num(x / y),
        (Some(x), _) if x == 0.0 => num(0.0),
        (_, Some(y)) if y == 1.0 => a,
        _ => Node::Div(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn neg(a: Node) -> Node {
    match a {
        Node::Num(x) => num(-x),
        Node::Neg(inner) => *inner,
        other => Node::Neg(Box::new(other)),
    }
}

pub(crate) fn pow(a: Node, p: f64) -> Node {
    if p == 0.0 {
        return num(1.0);
    }
    if p == 1.0 {
        return a;
    }
    match a.as_num() {
        Some(x) if (x > 0.0 || p.fract() == 0.0) && x.powf(p).is_finite() && x != 0.0 => num(x.powf(p)),
        _ => Node::Pow(Box::new(a), p),
    }
}

pub(crate) fn call(f: Func, a: Node) -> Node {
    Node::Call(f, Box::new(a))
}

/// Exact derivative with respect to the variable.
pub(crate) fn differentiate(node: &Node) -> Node {
    match node {
        Node::Num(_) => num(0.0),
        Node::Var => num(1.0),
        Node::Neg(a) => neg(differentiate(a)),
        Node::Add(a, b) => add(differentiate(a), differentiate(b)),
        Node::Sub(a, b) => sub(differentiate(a), differentiate(b)),
        Node::Mul(a, b) => {
            let (da, db) = (differentiate(a), differentiate(b));
            add(mul(da, (**b).clone()), mul((**a).clone(), db))
        }
        Node::Div(a, b) => {
            let (da, db) = (differentiate(a), differentiate(b));
            if is(&db, 0.0) {
                return div(da, (**b).clone());
            }
            div(
                sub(mul(da, (**b).clone()), mul((**a).clone(), db)),
                pow((**b).clone(), 2.0),
            )
        }
        Node::Pow(a, p) => {
            let da = differentiate(a);
            mul(mul(num(*p), pow((**a).clone(), p - 1.0)), da)
        }
        Node::Call(f, a) => {
            let da = differentiate(a);
            if is(&da, 0.0) {
                return num(0.0);
            }
            let u = (**a).clone();
            let outer = match f {
                Func::Sin => call(Func::Cos, u),
                Func::Cos => neg(call(Func::Sin, u)),
                Func::Sinh => call(Func::Cosh, u),
                Func::Cosh => call(Func::Sinh, u),
                Func::Tanh => sub(num(1.0), pow(call(Func::Tanh, u), 2.0)),
                Func::Exp => call(Func::Exp, u),
                Func::Ln => return div(da, u),
                Func::Sqrt => return div(da, mul(num(2.0), call(Func::Sqrt, u))),
                Func::Abs => div(u.clone(), call(Func::Abs, u)),
            };
            mul(outer, da)
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::parse;

    fn d_at(text: &str, var: &str, at: f64) -> f64 {
        parse(text, var).unwrap().derivative().eval(at).unwrap()
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(d_at("s^2/2", "s", 3.0), 3.0);
        assert!((d_at("sinh(2*ln(s))", "s", 1.0) - 2.0).abs() < 1e-15);
        let c = parse("3.7 + pi", "s").unwrap().derivative();
        assert!(c.is_constant());
        assert_eq!(c.eval(12.0).unwrap(), 0.0);
    }

    #[test]
    fn sinh_chain_rule_matches_central_difference() {
        let e = parse("sinh(2*ln(s))", "s").unwrap();
        let h = 1e-5;
        for &s in &[0.7f64, 1.0, 1.9, 3.3] {
            let fd = (e.eval(s + h).unwrap() - e.eval(s - h).unwrap()) / (2.0 * h);
            let exact = (2.0 * s.ln()).cosh() * 2.0 / s;
            assert!((fd - exact).abs() < 1e-8);
            assert!((d_at("sinh(2*ln(s))", "s", s) - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn every_function_has_a_rule() {
        let cases = [
            ("sin(x)", 0.3f64.cos()),
            ("cos(x)", -(0.3f64.sin())),
            ("sinh(x)", 0.3f64.cosh()),
            ("cosh(x)", 0.3f64.sinh()),
            ("tanh(x)", 1.0 - 0.3f64.tanh().powi(2)),
            ("exp(x)", 0.3f64.exp()),
            ("ln(x)", 1.0 / 0.3),
            ("sqrt(x)", 0.5 / 0.3f64.sqrt()),
            ("abs(x)", 1.0),
            ("abs(-x)", 1.0),
            ("x^2.5", 2.5 * 0.3f64.powf(1.5)),
            ("1/x", -1.0 / 0.09),
        ];
        for (text, want) in cases {
            let got = d_at(text, "x", 0.3);
            assert!((got - want).abs() < 1e-12, "{text}: {got} vs {want}");
        }
    }

    #[test]
    fn third_derivative_is_closed_under_the_grammar() {
        let e = parse("x^3/6 + exp(-x)*cos(x)", "x").unwrap();
        let d3 = e.nth_derivative(3);
        let again = parse(&d3.to_string(), "x").unwrap();
        for &x in &[-1.0, 0.0, 0.8] {
            let want = 1.0 + 2.0 * (-x as f64).exp() * ((x as f64).cos() - (x as f64).sin());
            assert!((d3.eval(x).unwrap() - want).abs() < 1e-12);
            assert!((again.eval(x).unwrap() - want).abs() < 1e-12);
        }
    }
}
