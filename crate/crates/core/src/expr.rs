// Copyright 2026 The qisxml Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Symbolic expressions attached to complex values.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := atom ('^' unary)?
//! atom    := number | ident | func '(' sum ')' | '(' sum ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-2^2`
//! is `-4`. Identifiers `pi`, `e` and `i` are constants; the only functions
//! are `sqrt`, `exp`, `sin`, `cos`.

use crate::scalar::Scalar;
use num_complex::Complex;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
    I,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Sin,
    Cos,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprNode {
    Number(f64),
    Constant(Constant),
    Ident(String),
    Neg(Box<ExprNode>),
    Binary(BinOp, Box<ExprNode>, Box<ExprNode>),
    Call(Func, Box<ExprNode>),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at offset {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),
    #[error("domain error: {0}")]
    Domain(String),
}

/// Parameter bindings for evaluation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EvalContext<T> {
    pub bindings: BTreeMap<String, Complex<T>>,
}

impl<T: Scalar> EvalContext<T> {
    pub fn new() -> Self {
        Self {
            bindings: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: impl Into<String>, value: Complex<T>) -> Self {
        self.bindings.insert(name.into(), value);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        if ch.is_ascii_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let v: f64 = lit.parse().map_err(|_| ExprError::Syntax {
                position: start,
                expected: "number".into(),
            })?;
            out.push((start, Tok::Num(v)));
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if "+-*/^".contains(ch) {
            out.push((i, Tok::Op(ch)));
            i += 1;
        } else if ch == '(' {
            out.push((i, Tok::LParen));
            i += 1;
        } else if ch == ')' {
            out.push((i, Tok::RParen));
            i += 1;
        } else {
            return Err(ExprError::Syntax {
                position: i,
                expected: "operand or operator".into(),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn err<R>(&self, expected: &str) -> Result<R, ExprError> {
        Err(ExprError::Syntax {
            position: self.offset(),
            expected: expected.to_string(),
        })
    }

    fn sum(&mut self) -> Result<ExprNode, ExprError> {
        let mut lhs = self.product()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek() {
            let op = if *op == '+' { BinOp::Add } else { BinOp::Sub };
            self.pos += 1;
            let rhs = self.product()?;
            lhs = ExprNode::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<ExprNode, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek() {
            let op = if *op == '*' { BinOp::Mul } else { BinOp::Div };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = ExprNode::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<ExprNode, ExprError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(ExprNode::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<ExprNode, ExprError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(ExprNode::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprNode, ExprError> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(ExprNode::Number(v))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let (Some(func), Some(Tok::LParen)) = (Func::from_name(&name), self.peek()) {
                    self.pos += 1;
                    let arg = self.sum()?;
                    self.expect_rparen()?;
                    return Ok(ExprNode::Call(func, Box::new(arg)));
                }
                Ok(match name.as_str() {
                    "pi" => ExprNode::Constant(Constant::Pi),
                    "e" => ExprNode::Constant(Constant::E),
                    "i" => ExprNode::Constant(Constant::I),
                    _ => ExprNode::Ident(name),
                })
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.sum()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            _ => self.err("number, identifier or `(`"),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        if let Some(Tok::RParen) = self.peek() {
            self.pos += 1;
            Ok(())
        } else {
            self.err("`)`")
        }
    }
}

/// Parses an expression with the grammar documented at module level.
pub fn parse_expr(text: &str) -> Result<ExprNode, ExprError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    if p.toks.is_empty() {
        return p.err("expression");
    }
    let node = p.sum()?;
    if p.pos != p.toks.len() {
        return p.err("end of expression");
    }
    Ok(node)
}

fn is_zero<T: Scalar>(z: Complex<T>) -> bool {
    z.re == T::zero() && z.im == T::zero()
}

fn complex_pow<T: Scalar>(base: Complex<T>, exp: Complex<T>) -> Result<Complex<T>, ExprError> {
    let zero = T::zero();
    if exp.im == zero && exp.re == zero {
        return Ok(Complex::new(T::one(), zero));
    }
    if is_zero(base) {
        return if exp.re > zero {
            Ok(Complex::new(zero, zero))
        } else {
            Err(ExprError::Domain("zero raised to a non-positive power".into()))
        };
    }
    if base.im == zero && exp.im == zero && (base.re > zero || exp.re.fract() == zero) {
        return Ok(Complex::new(base.re.powf(exp.re), zero));
    }
    Ok((exp * base.ln()).exp())
}

/// Evaluates `node` over the complex field.
pub fn eval_expr<T: Scalar>(node: &ExprNode, ctx: &EvalContext<T>) -> Result<Complex<T>, ExprError> {
    let zero = T::zero();
    Ok(match node {
        ExprNode::Number(v) => Complex::new(T::from_f64(*v), zero),
        ExprNode::Constant(Constant::Pi) => Complex::new(T::PI(), zero),
        ExprNode::Constant(Constant::E) => Complex::new(T::E(), zero),
        ExprNode::Constant(Constant::I) => Complex::new(zero, T::one()),
        ExprNode::Ident(name) => *ctx
            .bindings
            .get(name)
            .ok_or_else(|| ExprError::UnboundParameter(name.clone()))?,
        // Subtract from zero so a real operand keeps a +0 imaginary part and
        // sqrt(-x) lands on the principal branch.
        ExprNode::Neg(inner) => Complex::new(T::zero(), T::zero()) - eval_expr(inner, ctx)?,
        ExprNode::Binary(op, l, r) => {
            let a = eval_expr(l, ctx)?;
            let b = eval_expr(r, ctx)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if is_zero(b) {
                        return Err(ExprError::Domain("division by zero".into()));
                    }
                    a / b
                }
                BinOp::Pow => complex_pow(a, b)?,
            }
        }
        ExprNode::Call(func, arg) => {
            let a = eval_expr(arg, ctx)?;
            match func {
                // Real non-negative arguments stay on the real axis exactly.
                Func::Sqrt if a.im == zero && a.re >= zero => Complex::new(a.re.sqrt(), zero),
                Func::Sqrt => a.sqrt(),
                Func::Exp => a.exp(),
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
            }
        }
    })
}

/// Free identifiers referenced by the expression, in first-seen order.
pub fn free_idents(node: &ExprNode) -> Vec<String> {
    fn walk(n: &ExprNode, out: &mut Vec<String>) {
        match n {
            ExprNode::Ident(name) => {
                if !out.contains(name) {
                    out.push(name.clone());
                }
            }
            ExprNode::Neg(x) | ExprNode::Call(_, x) => walk(x, out),
            ExprNode::Binary(_, l, r) => {
                walk(l, out);
                walk(r, out);
            }
            ExprNode::Number(_) | ExprNode::Constant(_) => {}
        }
    }
    let mut out = Vec::new();
    walk(node, &mut out);
    out
}

impl fmt::Display for ExprNode {
    /// Fully parenthesised rendering that reparses to the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprNode::Number(v) => write!(f, "{v}"),
            ExprNode::Constant(Constant::Pi) => f.write_str("pi"),
            ExprNode::Constant(Constant::E) => f.write_str("e"),
            ExprNode::Constant(Constant::I) => f.write_str("i"),
            ExprNode::Ident(name) => f.write_str(name),
            ExprNode::Neg(x) => write!(f, "(-{x})"),
            ExprNode::Binary(op, l, r) => {
                let sym = match op {
                    BinOp::Add => '+',
                    BinOp::Sub => '-',
                    BinOp::Mul => '*',
                    BinOp::Div => '/',
                    BinOp::Pow => '^',
                };
                write!(f, "({l}{sym}{r})")
            }
            ExprNode::Call(func, x) => write!(f, "{}({x})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn eval(text: &str) -> Complex<f64> {
        eval_expr(&parse_expr(text).unwrap(), &EvalContext::new()).unwrap()
    }

    #[test]
    fn inverse_sqrt_two_tree() {
        let node = parse_expr("1/sqrt(2)").unwrap();
        assert_eq!(
            node,
            ExprNode::Binary(
                BinOp::Div,
                Box::new(ExprNode::Number(1.0)),
                Box::new(ExprNode::Call(Func::Sqrt, Box::new(ExprNode::Number(2.0))))
            )
        );
        let v = eval("1/sqrt(2)");
        assert!((v.re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
        // Stored document value agrees to within the printed precision.
        assert!((v.re - 0.707106781).abs() < 1e-9);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("2+3*4").re, 14.0);
        assert_eq!(eval("2^3^2").re, 512.0);
        assert_eq!(eval("-2^2").re, -4.0);
        assert_eq!(eval("8-3-2").re, 3.0);
        assert_eq!(eval("8/4/2").re, 1.0);
        assert_eq!(eval("2^-1").re, 0.5);
        assert_eq!(eval("1.5e2").re, 150.0);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_expr("sqrt("), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr(""), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("1 +"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("(1"), Err(ExprError::Syntax { position: 2, .. })));
        assert!(matches!(parse_expr("1 2"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("3 $ 4"), Err(ExprError::Syntax { position: 2, .. })));
    }

    #[test]
    fn euler_identity() {
        let v = eval("exp(i*pi)");
        assert!((v - Complex::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn phase_parameter_binding() {
        let node = parse_expr("exp(i*theta)").unwrap();
        let ctx = EvalContext::new().with("theta", Complex::new(PI / 2.0, 0.0));
        let v = eval_expr(&node, &ctx).unwrap();
        assert!((v - Complex::new(0.0, 1.0)).norm() < 1e-12);
        assert_eq!(
            eval_expr(&node, &EvalContext::<f64>::new()),
            Err(ExprError::UnboundParameter("theta".into()))
        );
        assert_eq!(free_idents(&node), vec!["theta".to_string()]);
    }

    #[test]
    fn domain_errors() {
        let ctx = EvalContext::<f64>::new();
        assert!(matches!(eval_expr(&parse_expr("0^-1").unwrap(), &ctx), Err(ExprError::Domain(_))));
        assert!(matches!(eval_expr(&parse_expr("1/0").unwrap(), &ctx), Err(ExprError::Domain(_))));
        assert_eq!(eval("0^0").re, 1.0);
    }

    #[test]
    fn principal_square_root_of_negative() {
        let v = eval("sqrt(-4)");
        assert!((v - Complex::new(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn single_precision_evaluation() {
        let v: Complex<f32> = eval_expr(&parse_expr("1/sqrt(2)").unwrap(), &EvalContext::new()).unwrap();
        assert!((v.re - std::f32::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    }

    fn arb_expr() -> impl Strategy<Value = ExprNode> {
        let leaf = prop_oneof![
            (0.0f64..1e6).prop_map(ExprNode::Number),
            Just(ExprNode::Constant(Constant::Pi)),
            Just(ExprNode::Constant(Constant::E)),
            Just(ExprNode::Constant(Constant::I)),
            "[a-d][a-z0-9_]{0,3}".prop_filter_map("reserved", |s| {
                (Func::from_name(&s).is_none() && !["e", "i", "pi"].contains(&s.as_str()))
                    .then_some(ExprNode::Ident(s))
            }),
        ];
        leaf.prop_recursive(5, 48, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|x| ExprNode::Neg(Box::new(x))),
                (
                    prop_oneof![
                        Just(BinOp::Add),
                        Just(BinOp::Sub),
                        Just(BinOp::Mul),
                        Just(BinOp::Div),
                        Just(BinOp::Pow)
                    ],
                    inner.clone(),
                    inner.clone()
                )
                    .prop_map(|(op, l, r)| ExprNode::Binary(op, Box::new(l), Box::new(r))),
                (
                    prop_oneof![Just(Func::Sqrt), Just(Func::Exp), Just(Func::Sin), Just(Func::Cos)],
                    inner
                )
                    .prop_map(|(f, x)| ExprNode::Call(f, Box::new(x))),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_is_identity(node in arb_expr()) {
            let printed = node.to_string();
            let reparsed = parse_expr(&printed).unwrap();
            prop_assert_eq!(&reparsed, &node);
            prop_assert_eq!(parse_expr(&reparsed.to_string()).unwrap(), reparsed);
        }

        #[test]
        fn constant_expressions_are_deterministic(a in 0.0f64..10.0, b in 0.1f64..10.0) {
            let text = format!("sqrt({a})*exp(i*{b})/{b}");
            let node = parse_expr(&text).unwrap();
            let ctx1 = EvalContext::<f64>::new();
            let ctx2 = EvalContext::new().with("unused", Complex::new(3.0, 1.0));
            prop_assert_eq!(eval_expr(&node, &ctx1).unwrap(), eval_expr(&node, &ctx2).unwrap());
        }
    }
}
