//! Exact symbolic expressions over jet variables.
//!
//! An [`Expr`] is an immutable tree whose leaves are exact rationals or
//! [`Symbol`]s (independent variables, parameters, and jet variables such as
//! `u_xx`). Constructors canonicalize lightly: nested sums and products are
//! flattened, numeric constants are folded, and zero/one identities are
//! dropped. Deciding identities is the job of [`normalize`], which maps an
//! expression to its [`PolyNormalForm`].

mod calculus;
mod eval;
mod parse;
mod poly;
mod render;

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use calculus::{partial, substitute, Bindings};
pub use eval::{eval_numeric, CompiledExpr, Point};
pub use poly::{normalize, Gen, Monomial, PolyNormalForm};

/// Name reserved for the circle constant. Every [`Context`] declares it as a
/// parameter and evaluation binds it to `π` when the caller does not.
pub const PI_NAME: &str = "pi";

/// Default bound on the total derivative order of a jet variable.
pub const DEFAULT_MAX_ORDER: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown identifier `{name}` at column {column}")]
    UnknownIdentifier { name: String, column: usize },
    #[error("`{name}` at column {column}: only dependent variables take derivative suffixes")]
    NotDependent { name: String, column: usize },
    #[error("`{name}` at column {column}: `{letter}` is not a declared independent variable")]
    UnknownSuffix { name: String, letter: char, column: usize },
    #[error("jet variable `{name}` exceeds the maximum order {max}")]
    OrderOverflow { name: String, max: u32 },
    #[error("`{name}` is already declared as {existing:?}")]
    Redeclared { name: String, existing: VarKind },
    #[error("unsupported node for polynomial normalization: {node}")]
    Unsupported { node: String },
    #[error("non-monomial denominator in {node}")]
    NonPolynomial { node: String },
    #[error("no value bound for `{0}`")]
    Unbound(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("cyclic substitution through `{0}`")]
    CyclicBinding(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    Independent,
    Dependent,
    Parameter,
}

/// A declared name together with its role. The kind never changes once the
/// name is registered in a [`Context`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId {
    kind: VarKind,
    name: Arc<str>,
}

impl VarId {
    pub fn new(kind: VarKind, name: &str) -> Self {
        Self {
            kind,
            name: Arc::from(name),
        }
    }

    pub fn kind(&self) -> VarKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// A dependent variable together with its derivative multi-index.
///
/// Orders are kept sorted by independent-variable name with zero counts
/// removed, so `u_xt` and `u_tx` are the same value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetVar {
    dep: Arc<str>,
    orders: Vec<(Arc<str>, u32)>,
}

impl JetVar {
    pub fn new(dep: &str, orders: &[(&str, u32)]) -> Self {
        let mut merged: BTreeMap<Arc<str>, u32> = BTreeMap::new();
        for (name, count) in orders {
            *merged.entry(Arc::from(*name)).or_insert(0) += count;
        }
        Self {
            dep: Arc::from(dep),
            orders: merged.into_iter().filter(|(_, n)| *n > 0).collect(),
        }
    }

    /// The dependent variable itself (no derivatives).
    pub fn base(dep: &str) -> Self {
        Self::new(dep, &[])
    }

    pub fn dependent(&self) -> &str {
        &self.dep
    }

    pub fn orders(&self) -> impl Iterator<Item = (&str, u32)> {
        self.orders.iter().map(|(n, k)| (n.as_ref(), *k))
    }

    pub fn order_in(&self, indep: &str) -> u32 {
        self.orders
            .iter()
            .find(|(n, _)| n.as_ref() == indep)
            .map_or(0, |(_, k)| *k)
    }

    pub fn total_order(&self) -> u32 {
        self.orders.iter().map(|(_, k)| k).sum()
    }

    /// One more derivative with respect to `indep`.
    pub fn bump(&self, indep: &str) -> Self {
        let mut out: Vec<(&str, u32)> = self.orders().collect();
        out.push((indep, 1));
        Self::new(&self.dep, &out)
    }

    /// One derivative fewer with respect to `indep`, if there is one.
    pub fn lower(&self, indep: &str) -> Option<Self> {
        if self.order_in(indep) == 0 {
            return None;
        }
        let out: Vec<(&str, u32)> = self
            .orders()
            .map(|(n, k)| if n == indep { (n, k - 1) } else { (n, k) })
            .collect();
        Some(Self::new(&self.dep, &out))
    }

    /// Rendering suffix, letters sorted alphabetically (`xxt` renders `txx`).
    pub fn suffix(&self) -> String {
        let mut s = String::new();
        for (name, k) in &self.orders {
            for _ in 0..*k {
                s.push_str(name);
            }
        }
        s
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orders.is_empty() {
            write!(f, "{}", self.dep)
        } else {
            write!(f, "{}_{}", self.dep, self.suffix())
        }
    }
}

/// A leaf of an expression tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Indep(Arc<str>),
    Param(Arc<str>),
    Jet(JetVar),
}

impl Symbol {
    pub fn indep(name: &str) -> Self {
        Symbol::Indep(Arc::from(name))
    }

    pub fn param(name: &str) -> Self {
        Symbol::Param(Arc::from(name))
    }

    pub fn jet(dep: &str, orders: &[(&str, u32)]) -> Self {
        Symbol::Jet(JetVar::new(dep, orders))
    }

    pub fn as_jet(&self) -> Option<&JetVar> {
        match self {
            Symbol::Jet(j) => Some(j),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Indep(n) | Symbol::Param(n) => write!(f, "{n}"),
            Symbol::Jet(j) => write!(f, "{j}"),
        }
    }
}

impl From<JetVar> for Symbol {
    fn from(j: JetVar) -> Self {
        Symbol::Jet(j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Sin,
    Cos,
    Sqrt,
    Arctan,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Arctan => "arctan",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "sqrt" => Some(Func::Sqrt),
            "arctan" => Some(Func::Arctan),
            _ => None,
        }
    }
}

/// Symbolic expression tree.
///
/// Build values through the associated constructors (or the arithmetic
/// operators) rather than the variants directly; the constructors keep the
/// tree in the shape that [`Expr::render`] and [`Context::parse`] agree on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Num(BigRational),
    Sym(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, i64),
    Func(Func, Box<Expr>),
}

impl Expr {
    pub fn zero() -> Self {
        Expr::Num(BigRational::zero())
    }

    pub fn one() -> Self {
        Expr::Num(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Expr::Num(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Expr::Num(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn num(r: BigRational) -> Self {
        Expr::Num(r)
    }

    pub fn sym(s: impl Into<Symbol>) -> Self {
        Expr::Sym(s.into())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Num(r) if r.is_one())
    }

    pub fn as_num(&self) -> Option<&BigRational> {
        match self {
            Expr::Num(r) => Some(r),
            _ => None,
        }
    }

    pub fn add(terms: impl IntoIterator<Item = Expr>) -> Self {
        let mut out = Vec::new();
        let mut constant = BigRational::zero();
        let mut stack: Vec<Expr> = terms.into_iter().collect();
        stack.reverse();
        while let Some(t) = stack.pop() {
            match t {
                Expr::Add(inner) => stack.extend(inner.into_iter().rev()),
                Expr::Num(r) => constant += r,
                other => out.push(other),
            }
        }
        if !constant.is_zero() {
            out.push(Expr::Num(constant));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::Add(out),
        }
    }

    pub fn mul(factors: impl IntoIterator<Item = Expr>) -> Self {
        let mut out = Vec::new();
        let mut constant = BigRational::one();
        let mut stack: Vec<Expr> = factors.into_iter().collect();
        stack.reverse();
        while let Some(f) = stack.pop() {
            match f {
                Expr::Mul(inner) => stack.extend(inner.into_iter().rev()),
                Expr::Num(r) => constant *= r,
                other => out.push(other),
            }
        }
        if constant.is_zero() {
            return Expr::zero();
        }
        if out.is_empty() {
            return Expr::Num(constant);
        }
        if !constant.is_one() {
            out.insert(0, Expr::Num(constant));
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Expr::Mul(out)
        }
    }

    pub fn pow(base: Expr, exp: i64) -> Self {
        if exp == 0 {
            return Expr::one();
        }
        if exp == 1 {
            return base;
        }
        match base {
            Expr::Num(r) if !r.is_zero() || exp > 0 => Expr::Num(rational_pow(&r, exp)),
            Expr::Pow(inner, e) => Expr::pow(*inner, e * exp),
            other => Expr::Pow(Box::new(other), exp),
        }
    }

    pub fn func(f: Func, arg: Expr) -> Self {
        Expr::Func(f, Box::new(arg))
    }

    pub fn sin(arg: Expr) -> Self {
        Expr::func(Func::Sin, arg)
    }

    pub fn cos(arg: Expr) -> Self {
        Expr::func(Func::Cos, arg)
    }

    pub fn sqrt(arg: Expr) -> Self {
        Expr::func(Func::Sqrt, arg)
    }

    pub fn arctan(arg: Expr) -> Self {
        Expr::func(Func::Arctan, arg)
    }

    pub fn recip(self) -> Self {
        Expr::pow(self, -1)
    }

    /// All symbols occurring anywhere in the tree.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Expr::Num(_) => {}
            Expr::Sym(s) => {
                out.insert(s.clone());
            }
            Expr::Add(v) | Expr::Mul(v) => v.iter().for_each(|e| e.collect_symbols(out)),
            Expr::Pow(b, _) => b.collect_symbols(out),
            Expr::Func(_, a) => a.collect_symbols(out),
        }
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Sym(t) => t == s,
            Expr::Add(v) | Expr::Mul(v) => v.iter().any(|e| e.contains(s)),
            Expr::Pow(b, _) => b.contains(s),
            Expr::Func(_, a) => a.contains(s),
        }
    }

    /// Highest total derivative order among the jet variables in the tree.
    pub fn jet_order(&self) -> u32 {
        self.symbols()
            .iter()
            .filter_map(Symbol::as_jet)
            .map(JetVar::total_order)
            .max()
            .unwrap_or(0)
    }

    /// Round-trips through the normal form when the tree is polynomial in
    /// its generators; leaves the tree untouched otherwise.
    pub fn simplified(&self) -> Expr {
        match normalize(self) {
            Ok(p) => p.to_expr(),
            Err(_) => self.clone(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Sym(_) => 1,
            Expr::Add(v) | Expr::Mul(v) => 1 + v.iter().map(Expr::node_count).sum::<usize>(),
            Expr::Pow(b, _) => 1 + b.node_count(),
            Expr::Func(_, a) => 1 + a.node_count(),
        }
    }
}

fn rational_pow(r: &BigRational, exp: i64) -> BigRational {
    let base = if exp < 0 { r.recip() } else { r.clone() };
    let mut acc = BigRational::one();
    for _ in 0..exp.unsigned_abs() {
        acc *= &base;
    }
    acc
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Self {
        Expr::Sym(s)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add([self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::add([self, -rhs])
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul([self, rhs])
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::mul([self, rhs.recip()])
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul([Expr::int(-1), self])
    }
}

/// Name registry for one problem: which identifiers exist and what they are.
#[derive(Debug, Clone)]
pub struct Context {
    vars: BTreeMap<String, VarKind>,
    max_order: u32,
}

impl Default for Context {
    fn default() -> Self {
        Self::new()
    }
}

impl Context {
    pub fn new() -> Self {
        let mut vars = BTreeMap::new();
        vars.insert(PI_NAME.to_string(), VarKind::Parameter);
        Self {
            vars,
            max_order: DEFAULT_MAX_ORDER,
        }
    }

    pub fn with_max_order(mut self, max_order: u32) -> Self {
        self.max_order = max_order;
        self
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn declare(&mut self, name: &str, kind: VarKind) -> Result<VarId, ExprError> {
        if let Some(existing) = self.vars.get(name) {
            if *existing != kind {
                return Err(ExprError::Redeclared {
                    name: name.to_string(),
                    existing: *existing,
                });
            }
        } else {
            self.vars.insert(name.to_string(), kind);
        }
        Ok(VarId::new(kind, name))
    }

    pub fn kind_of(&self, name: &str) -> Option<VarKind> {
        self.vars.get(name).copied()
    }

    pub fn names(&self, kind: VarKind) -> impl Iterator<Item = &str> {
        self.vars
            .iter()
            .filter(move |(_, k)| **k == kind)
            .map(|(n, _)| n.as_str())
    }

    pub fn parse(&self, text: &str) -> Result<Expr, ExprError> {
        parse::parse(self, text)
    }
}

/// Converts an integer-valued rational to `i64`, if it is one.
pub(crate) fn rational_to_i64(r: &BigRational) -> Option<i64> {
    if !r.is_integer() {
        return None;
    }
    i64::try_from(r.to_integer()).ok()
}

pub(crate) fn is_negative(r: &BigRational) -> bool {
    r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_jet_suffix_is_canonical() {
        let a = JetVar::new("u", &[("x", 1), ("t", 1)]);
        let b = JetVar::new("u", &[("t", 1), ("x", 1)]);
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "u_tx");
        assert_eq!(a.total_order(), 2);
        assert_eq!(a.lower("t").unwrap().to_string(), "u_x");
        assert_eq!(JetVar::base("v").bump("x").bump("x").to_string(), "v_xx");
    }

    #[test]
    fn constructors_fold_constants() {
        let u = Expr::sym(Symbol::jet("u", &[]));
        assert!(Expr::mul([Expr::int(0), u.clone()]).is_zero());
        assert_eq!(Expr::mul([Expr::int(1), u.clone()]), u);
        assert_eq!(Expr::add([Expr::int(2), Expr::int(-2)]), Expr::zero());
        assert_eq!(Expr::pow(Expr::int(2), -2), Expr::rational(1, 4));
        assert_eq!(Expr::pow(Expr::pow(u.clone(), 2), 3), Expr::pow(u, 6));
    }

    #[test]
    fn redeclaring_with_another_kind_fails() {
        let mut ctx = Context::new();
        ctx.declare("x", VarKind::Independent).unwrap();
        assert!(ctx.declare("x", VarKind::Independent).is_ok());
        assert!(matches!(
            ctx.declare("x", VarKind::Parameter),
            Err(ExprError::Redeclared { .. })
        ));
    }
}
