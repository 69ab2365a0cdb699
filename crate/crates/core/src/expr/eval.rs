//! Floating-point evaluation.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_traits::ToPrimitive;

use super::{Expr, ExprError, Func, Symbol, PI_NAME};

/// Generator values for [`eval_numeric`].
pub type Point = HashMap<Symbol, f64>;

fn lookup(s: &Symbol, point: &Point) -> Result<f64, ExprError> {
    if let Some(v) = point.get(s) {
        return Ok(*v);
    }
    match s {
        Symbol::Param(n) if n.as_ref() == PI_NAME => Ok(PI),
        _ => Err(ExprError::Unbound(s.to_string())),
    }
}

fn apply(f: Func, a: f64) -> Result<f64, ExprError> {
    match f {
        Func::Sin => Ok(a.sin()),
        Func::Cos => Ok(a.cos()),
        Func::Sqrt if a < 0.0 => Err(ExprError::Domain(format!("sqrt of negative value {a}"))),
        Func::Sqrt => Ok(a.sqrt()),
        Func::Arctan => Ok(a.atan()),
    }
}

fn powi(b: f64, n: i64) -> Result<f64, ExprError> {
    if b == 0.0 && n < 0 {
        return Err(ExprError::Domain("division by zero".into()));
    }
    Ok(match i32::try_from(n) {
        Ok(k) => b.powi(k),
        Err(_) => b.powf(n as f64),
    })
}

/// Evaluates `e` in IEEE double precision. `pi` falls back to π when the
/// point does not bind it.
pub fn eval_numeric(e: &Expr, point: &Point) -> Result<f64, ExprError> {
    match e {
        Expr::Num(r) => Ok(r.to_f64().unwrap_or(f64::NAN)),
        Expr::Sym(s) => lookup(s, point),
        Expr::Add(terms) => terms.iter().map(|t| eval_numeric(t, point)).sum(),
        Expr::Mul(factors) => factors.iter().map(|f| eval_numeric(f, point)).product(),
        Expr::Pow(b, n) => powi(eval_numeric(b, point)?, *n),
        Expr::Func(f, a) => apply(*f, eval_numeric(a, point)?),
    }
}

#[derive(Debug, Clone)]
enum Node {
    Const(f64),
    Slot(usize),
    Add(Vec<Node>),
    Mul(Vec<Node>),
    Pow(Box<Node>, i32),
    Func(Func, Box<Node>),
}

/// An expression lowered to slot indices for repeated evaluation, e.g. once
/// per grid point. Evaluation is infallible; out-of-domain inputs produce
/// NaN, which callers check for.
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    root: Node,
}

impl CompiledExpr {
    /// `slots[i]` is the symbol read from `values[i]` at evaluation time.
    /// Every symbol of `e` except `pi` must appear in `slots`.
    pub fn compile(e: &Expr, slots: &[Symbol]) -> Result<Self, ExprError> {
        let index: HashMap<&Symbol, usize> = slots.iter().enumerate().map(|(i, s)| (s, i)).collect();
        Ok(Self {
            root: lower(e, &index)?,
        })
    }

    pub fn eval(&self, values: &[f64]) -> f64 {
        run(&self.root, values)
    }
}

fn lower(e: &Expr, index: &HashMap<&Symbol, usize>) -> Result<Node, ExprError> {
    Ok(match e {
        Expr::Num(r) => Node::Const(r.to_f64().unwrap_or(f64::NAN)),
        Expr::Sym(s) => match index.get(s) {
            Some(i) => Node::Slot(*i),
            None => Node::Const(lookup(s, &Point::new())?),
        },
        Expr::Add(v) => Node::Add(v.iter().map(|t| lower(t, index)).collect::<Result<_, _>>()?),
        Expr::Mul(v) => Node::Mul(v.iter().map(|t| lower(t, index)).collect::<Result<_, _>>()?),
        Expr::Pow(b, n) => Node::Pow(
            Box::new(lower(b, index)?),
            i32::try_from(*n).map_err(|_| ExprError::Domain(format!("exponent {n} too large")))?,
        ),
        Expr::Func(f, a) => Node::Func(*f, Box::new(lower(a, index)?)),
    })
}

fn run(n: &Node, values: &[f64]) -> f64 {
    match n {
        Node::Const(c) => *c,
        Node::Slot(i) => values[*i],
        Node::Add(v) => v.iter().map(|t| run(t, values)).sum(),
        Node::Mul(v) => v.iter().map(|t| run(t, values)).product(),
        Node::Pow(b, k) => run(b, values).powi(*k),
        Node::Func(f, a) => {
            let x = run(a, values);
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Sqrt => x.sqrt(),
                Func::Arctan => x.atan(),
            }
        }
    }
}
