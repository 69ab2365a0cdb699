//! Jet-space calculus: total derivatives, the Euler operator, prolongation
//! of vector fields, and the verification predicates built on them.

mod field;
mod system;

use std::sync::Arc;

use thiserror::Error;

use crate::expr::{partial, Expr, ExprError, JetVar, Symbol};

pub use field::{association_residual, prolong, ProlongedField, VectorField};
pub use system::{
    divergence_match, multiplier_condition, symmetry_invariance, ConservedVector, MultiplierPair, PDESystem,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("`{0}` is not an independent variable of the jet space")]
    NotIndependent(String),
    #[error("`{0}` is not a dependent variable of the jet space")]
    NotDependent(String),
    #[error("prolongation order {order} outside 1..={max}")]
    ProlongationOrder { order: u32, max: u32 },
    #[error("`{jet}` is beyond the prolongation order {order}")]
    BeyondProlongation { jet: String, order: u32 },
    #[error("invalid system: {0}")]
    InvalidSystem(String),
}

/// Which dependents exist, which independents each of them depends on, and
/// the highest admissible derivative order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetSpace {
    independents: Vec<Arc<str>>,
    dependents: Vec<(Arc<str>, Vec<Arc<str>>)>,
    max_order: u32,
}

impl JetSpace {
    /// Every dependent depends on every independent.
    pub fn new(independents: &[&str], dependents: &[&str], max_order: u32) -> Self {
        let indeps: Vec<Arc<str>> = independents.iter().map(|s| Arc::from(*s)).collect();
        Self {
            dependents: dependents.iter().map(|d| (Arc::from(*d), indeps.clone())).collect(),
            independents: indeps,
            max_order,
        }
    }

    /// Restricts `dep` to depend only on `on`; its derivatives in any other
    /// direction vanish.
    pub fn with_dependence(mut self, dep: &str, on: &[&str]) -> Self {
        if let Some(slot) = self.dependents.iter_mut().find(|(d, _)| d.as_ref() == dep) {
            slot.1 = on.iter().map(|s| Arc::from(*s)).collect();
        }
        self
    }

    pub fn independents(&self) -> impl Iterator<Item = &str> {
        self.independents.iter().map(|s| s.as_ref())
    }

    pub fn dependents(&self) -> impl Iterator<Item = &str> {
        self.dependents.iter().map(|(d, _)| d.as_ref())
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn depends(&self, dep: &str, indep: &str) -> bool {
        self.dependents
            .iter()
            .find(|(d, _)| d.as_ref() == dep)
            .is_some_and(|(_, on)| on.iter().any(|i| i.as_ref() == indep))
    }

    fn require_independent(&self, name: &str) -> Result<(), JetError> {
        if self.independents.iter().any(|i| i.as_ref() == name) {
            Ok(())
        } else {
            Err(JetError::NotIndependent(name.to_string()))
        }
    }

    fn require_dependent(&self, name: &str) -> Result<(), JetError> {
        if self.dependents().any(|d| d == name) {
            Ok(())
        } else {
            Err(JetError::NotDependent(name.to_string()))
        }
    }

    /// `D_wrt e = ∂e/∂wrt + Σ_g (∂e/∂g)·g_wrt` over the jet variables `g`
    /// of `e`.
    pub fn total_derivative(&self, e: &Expr, wrt: &str) -> Result<Expr, JetError> {
        self.require_independent(wrt)?;
        let mut terms = vec![partial(e, &Symbol::indep(wrt))];
        for s in e.symbols() {
            let Symbol::Jet(j) = &s else { continue };
            if !self.depends(j.dependent(), wrt) {
                continue;
            }
            let d = partial(e, &s);
            if d.is_zero() {
                continue;
            }
            let next = j.bump(wrt);
            if next.total_order() > self.max_order {
                return Err(ExprError::OrderOverflow {
                    name: next.to_string(),
                    max: self.max_order,
                }
                .into());
            }
            terms.push(d * Expr::sym(next));
        }
        Ok(Expr::add(terms).simplified())
    }

    /// Applies `D^J` for the multi-index of `j` (ignoring the dependent).
    pub fn total_derivative_multi(&self, e: &Expr, j: &JetVar) -> Result<Expr, JetError> {
        let mut out = e.clone();
        for (indep, count) in j.orders() {
            for _ in 0..count {
                out = self.total_derivative(&out, indep)?;
            }
        }
        Ok(out)
    }

    /// Variational derivative `Σ_J (−D)^J ∂e/∂dep_J`.
    pub fn euler_operator(&self, e: &Expr, dep: &str) -> Result<Expr, JetError> {
        self.require_dependent(dep)?;
        let mut terms = Vec::new();
        for s in e.symbols() {
            let Symbol::Jet(j) = &s else { continue };
            if j.dependent() != dep {
                continue;
            }
            let d = partial(e, &s);
            let term = self.total_derivative_multi(&d, j)?;
            terms.push(if j.total_order() % 2 == 1 { -term } else { term });
        }
        Ok(Expr::add(terms).simplified())
    }

    /// All jets of `dep` with total order in `1..=order`, in graded order.
    pub fn jets_of(&self, dep: &str, order: u32) -> Vec<JetVar> {
        let mut layer = vec![JetVar::base(dep)];
        let mut out = Vec::new();
        for _ in 0..order {
            let mut next: Vec<JetVar> = Vec::new();
            for j in &layer {
                for i in &self.independents {
                    if self.depends(dep, i) {
                        let b = j.bump(i);
                        if !next.contains(&b) {
                            next.push(b);
                        }
                    }
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{normalize, Context, VarKind};

    fn ctx() -> Context {
        let mut c = Context::new();
        for n in ["t", "x"] {
            c.declare(n, VarKind::Independent).unwrap();
        }
        for n in ["u", "v"] {
            c.declare(n, VarKind::Dependent).unwrap();
        }
        c
    }

    fn space() -> JetSpace {
        JetSpace::new(&["t", "x"], &["u", "v"], 4)
    }

    fn same(a: &Expr, src: &str) -> bool {
        let b = ctx().parse(src).unwrap();
        normalize(&(a.clone() - b)).unwrap().is_zero()
    }

    #[test]
    fn total_derivative_examples() {
        let c = ctx();
        let sp = space();
        let dx = sp.total_derivative(&c.parse("u^2").unwrap(), "x").unwrap();
        assert!(same(&dx, "2*u*u_x"));
        let dt = sp.total_derivative(&c.parse("1/2*(u^2+v^2)").unwrap(), "t").unwrap();
        assert!(same(&dt, "u*u_t + v*v_t"));
        let leibniz = sp.total_derivative(&c.parse("u*v_x").unwrap(), "x").unwrap();
        assert!(same(&leibniz, "u_x*v_x + u*v_xx"));
    }

    #[test]
    fn explicit_independent_dependence() {
        let c = ctx();
        let d = space().total_derivative(&c.parse("x*t*u").unwrap(), "x").unwrap();
        assert!(same(&d, "t*u + x*t*u_x"));
    }

    #[test]
    fn overflow_only_when_partial_is_nonzero() {
        let c = ctx();
        let sp = space();
        assert!(matches!(
            sp.total_derivative(&c.parse("u_xxxx").unwrap(), "x"),
            Err(JetError::Expr(ExprError::OrderOverflow { .. }))
        ));
        assert!(sp.total_derivative(&c.parse("u_x").unwrap(), "y").is_err());
    }

    #[test]
    fn reduced_dependence_drops_directions() {
        let mut c = Context::new();
        c.declare("s", VarKind::Independent).unwrap();
        c.declare("r", VarKind::Independent).unwrap();
        c.declare("w", VarKind::Dependent).unwrap();
        let sp = JetSpace::new(&["s", "r"], &["w"], 4).with_dependence("w", &["r"]);
        let e = c.parse("w^2 + s").unwrap();
        let ds = sp.total_derivative(&e, "s").unwrap();
        assert_eq!(ds, Expr::one());
        assert_eq!(sp.jets_of("w", 2).len(), 2);
    }

    #[test]
    fn euler_of_quadratic_gradient() {
        let c = ctx();
        let e = space().euler_operator(&c.parse("1/2*u_x^2").unwrap(), "u").unwrap();
        assert!(same(&e, "-u_xx"));
    }

    #[test]
    fn jets_enumeration_counts() {
        let sp = space();
        let j = sp.jets_of("u", 2);
        assert_eq!(j.len(), 5);
        assert!(j.contains(&JetVar::new("u", &[("t", 1), ("x", 1)])));
    }
}
