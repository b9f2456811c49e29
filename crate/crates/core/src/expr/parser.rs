use thiserror::Error;

use super::{Expr, Func, Node};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown identifier `{name}` at column {column}")]
    UnknownIdentifier { name: String, column: usize },
    #[error("exponent at column {column} must be a constant")]
    NonConstantExponent { column: usize },
}

impl ParseError {
    pub fn column(&self) -> usize {
        match self {
            ParseError::Syntax { column, .. }
            | ParseError::UnknownIdentifier { column, .. }
            | ParseError::NonConstantExponent { column } => *column,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, col));
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit: String = chars[start..i].iter().collect();
            let v = lit.parse::<f64>().map_err(|_| ParseError::Syntax {
                column: col,
                message: format!("malformed number `{lit}`"),
            })?;
            out.push((Tok::Num(v), col));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else {
            return Err(ParseError::Syntax { column: col, message: format!("unexpected character `{c}`") });
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

pub(crate) struct Parser<'a> {
    text: &'a str,
    var: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(text: &'a str, var: &'a str) -> Self {
        Self { text, var, toks: Vec::new(), pos: 0 }
    }

    pub(crate) fn parse(mut self) -> Result<Node, ParseError> {
        self.toks = lex(self.text)?;
        let node = self.expr()?;
        match self.peek() {
            Tok::End => Ok(node),
            t => Err(self.unexpected(&t.clone())),
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, t: &Tok) -> ParseError {
        ParseError::Syntax { column: self.column(), message: format!("unexpected {}", describe(t)) }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let column = self.column();
        let exponent = self.unary()?;
        if exponent.contains_var() {
            return Err(ParseError::NonConstantExponent { column });
        }
        let p = Expr::from_node(self.var, exponent)
            .eval(0.0f64)
            .map_err(|_| ParseError::Syntax { column, message: "exponent does not evaluate to a finite constant".into() })?;
        Ok(Node::Pow(Box::new(base), p))
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let column = self.column();
        match self.bump() {
            Tok::Num(v) => Ok(Node::Num(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if name == self.var {
                    return Ok(Node::Var);
                }
                if let Some(func) = Func::from_name(&name) {
                    if *self.peek() != Tok::LParen {
                        let t = self.peek().clone();
                        return Err(ParseError::Syntax {
                            column: self.column(),
                            message: format!("expected `(` after `{name}`, found {}", describe(&t)),
                        });
                    }
                    self.bump();
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Node::Call(func, Box::new(arg)));
                }
                match name.as_str() {
                    "pi" => Ok(Node::Num(std::f64::consts::PI)),
                    "e" => Ok(Node::Num(std::f64::consts::E)),
                    _ => Err(ParseError::UnknownIdentifier { name, column }),
                }
            }
            t => Err(ParseError::Syntax { column, message: format!("unexpected {}", describe(&t)) }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::RParen => {
                self.bump();
                Ok(())
            }
            t => {
                let t = t.clone();
                Err(ParseError::Syntax { column: self.column(), message: format!("expected `)`, found {}", describe(&t)) })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn syntax_error_columns() {
        assert_eq!(parse("2*+x", "x").unwrap_err().column(), 3);
        assert_eq!(parse("(x + 1", "x").unwrap_err().column(), 7);
        assert_eq!(parse("x + ", "x").unwrap_err().column(), 5);
        assert_eq!(parse("2x", "x").unwrap_err().column(), 2);
        assert_eq!(parse("x $ 1", "x").unwrap_err().column(), 3);
        assert_eq!(parse("sin x", "x").unwrap_err().column(), 5);
    }

    #[test]
    fn unknown_identifier_is_named() {
        match parse("s + y", "s").unwrap_err() {
            ParseError::UnknownIdentifier { name, column } => {
                assert_eq!(name, "y");
                assert_eq!(column, 5);
            }
            e => panic!("{e:?}"),
        }
        // the declared variable decides what is known
        assert!(matches!(parse("x", "s"), Err(ParseError::UnknownIdentifier { .. })));
    }

    #[test]
    fn exponents_must_be_constant() {
        assert!(matches!(parse("2^x", "x"), Err(ParseError::NonConstantExponent { column: 3 })));
        assert!(parse("x^(1/3)", "x").is_ok());
        assert!(parse("x^-(2)", "x").is_ok());
    }

    #[test]
    fn utf8_columns_count_characters() {
        let e = parse("σ + φ", "σ").unwrap_err();
        assert_eq!(e.column(), 5);
    }
}
