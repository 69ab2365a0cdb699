use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::expr::{normalize, substitute, Bindings, Expr, JetVar, PolyNormalForm, Symbol};

use super::field::{prolong, VectorField};
use super::{JetError, JetSpace};

/// Equations `G^a = 0` together with their evolution form `dep_t = rhs`.
#[derive(Debug, Clone)]
pub struct PDESystem {
    space: JetSpace,
    time: Arc<str>,
    equations: Vec<Expr>,
    evolution: BTreeMap<JetVar, Expr>,
}

impl PDESystem {
    /// The first independent variable of `space` plays the role of time.
    ///
    /// Every dependent needs an evolution law free of time derivatives, and
    /// every equation must vanish once the laws are substituted.
    pub fn new(space: JetSpace, equations: Vec<Expr>, evolution: Vec<(String, Expr)>) -> Result<Self, JetError> {
        let time: Arc<str> = Arc::from(
            space
                .independents()
                .next()
                .ok_or_else(|| JetError::InvalidSystem("no independent variables".into()))?,
        );
        let mut laws = BTreeMap::new();
        for (dep, rhs) in evolution {
            space.require_dependent(&dep)?;
            if let Some(j) = rhs
                .symbols()
                .iter()
                .filter_map(Symbol::as_jet)
                .find(|j| j.order_in(&time) > 0)
            {
                return Err(JetError::InvalidSystem(format!(
                    "evolution law for {dep} contains the time derivative {j}"
                )));
            }
            laws.insert(JetVar::new(&dep, &[(&time, 1)]), rhs);
        }
        for dep in space.dependents() {
            if !laws.contains_key(&JetVar::new(dep, &[(&time, 1)])) {
                return Err(JetError::InvalidSystem(format!("no evolution law for {dep}")));
            }
        }
        let sys = Self {
            space,
            time,
            equations,
            evolution: laws,
        };
        for (i, g) in sys.equations.iter().enumerate() {
            let r = sys.on_shell_reduce(g)?;
            if !r.is_zero() {
                return Err(JetError::InvalidSystem(format!(
                    "equation {} does not vanish on its evolution form: {r}",
                    i + 1
                )));
            }
        }
        Ok(sys)
    }

    pub fn space(&self) -> &JetSpace {
        &self.space
    }

    pub fn equations(&self) -> &[Expr] {
        &self.equations
    }

    pub fn evolution_rhs(&self, dep: &str) -> Option<&Expr> {
        self.evolution.get(&JetVar::new(dep, &[(&self.time, 1)]))
    }

    /// Eliminates every time derivative through the evolution laws and their
    /// total derivatives, then normalizes.
    pub fn on_shell_reduce(&self, e: &Expr) -> Result<PolyNormalForm, JetError> {
        let mut memo = HashMap::new();
        let reduced = self.shell_expr(e, &mut memo)?;
        Ok(normalize(&reduced)?)
    }

    fn shell_expr(&self, e: &Expr, memo: &mut HashMap<JetVar, Expr>) -> Result<Expr, JetError> {
        let mut b = Bindings::new();
        for s in e.symbols() {
            if let Symbol::Jet(j) = &s {
                if j.order_in(&self.time) > 0 {
                    let image = self.shell_jet(j, memo)?;
                    b.insert(s.clone(), image);
                }
            }
        }
        if b.is_empty() {
            return Ok(e.clone());
        }
        Ok(substitute(e, &b)?.simplified())
    }

    fn shell_jet(&self, j: &JetVar, memo: &mut HashMap<JetVar, Expr>) -> Result<Expr, JetError> {
        if let Some(v) = memo.get(j) {
            return Ok(v.clone());
        }
        let value = if let Some(rhs) = self.evolution.get(j) {
            rhs.clone()
        } else if let Some((other, _)) = j.orders().find(|(n, _)| *n != self.time.as_ref()) {
            let other = other.to_string();
            let lower = j.lower(&other).expect("order is positive");
            let inner = self.shell_jet(&lower, memo)?;
            self.space.total_derivative(&inner, &other)?
        } else {
            let lower = j.lower(&self.time).expect("order is positive");
            if lower.total_order() == 0 {
                return Err(JetError::InvalidSystem(format!("no evolution law for {j}")));
            }
            let inner = self.shell_jet(&lower, memo)?;
            let d = self.space.total_derivative(&inner, &self.time)?;
            self.shell_expr(&d, memo)?
        };
        memo.insert(j.clone(), value.clone());
        Ok(value)
    }
}

/// Characteristic `(q¹, q²)` of a conservation law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplierPair {
    pub q: Vec<Expr>,
}

impl MultiplierPair {
    pub fn new(q1: Expr, q2: Expr) -> Self {
        Self { q: vec![q1, q2] }
    }

    /// Describes the problem when a component depends on jets above first
    /// order.
    pub fn order_warning(&self) -> Option<String> {
        let worst = self.q.iter().map(Expr::jet_order).max().unwrap_or(0);
        (worst > 1).then(|| format!("multiplier has jet order {worst} (expected at most 1)"))
    }

    fn contraction(&self, sys: &PDESystem) -> Result<Expr, JetError> {
        if self.q.len() != sys.equations.len() {
            return Err(JetError::InvalidSystem(format!(
                "{} multiplier components for {} equations",
                self.q.len(),
                sys.equations.len()
            )));
        }
        Ok(Expr::add(
            self.q.iter().zip(&sys.equations).map(|(q, g)| q.clone() * g.clone()),
        ))
    }
}

/// Density and flux `(Tᵗ, Tˣ)`, one component per independent variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConservedVector {
    pub components: Vec<Expr>,
}

impl ConservedVector {
    pub fn new(tt: Expr, tx: Expr) -> Self {
        Self {
            components: vec![tt, tx],
        }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            components: vec![Expr::zero(); n],
        }
    }

    pub fn density(&self) -> &Expr {
        &self.components[0]
    }

    pub fn flux(&self) -> &Expr {
        &self.components[1]
    }

    pub fn jet_order(&self) -> u32 {
        self.components.iter().map(Expr::jet_order).max().unwrap_or(0)
    }

    /// `Σ_i D_i T^i`.
    pub fn divergence(&self, space: &JetSpace) -> Result<Expr, JetError> {
        let indeps: Vec<&str> = space.independents().collect();
        let mut terms = Vec::with_capacity(indeps.len());
        for (c, i) in self.components.iter().zip(indeps) {
            terms.push(space.total_derivative(c, i)?);
        }
        Ok(Expr::add(terms))
    }
}

/// Euler derivatives of `q·G` with respect to each dependent; all zero iff
/// the pair is a multiplier.
pub fn multiplier_condition(m: &MultiplierPair, sys: &PDESystem) -> Result<Vec<PolyNormalForm>, JetError> {
    let l = m.contraction(sys)?;
    sys.space
        .dependents()
        .map(|d| Ok(normalize(&sys.space.euler_operator(&l, d)?)?))
        .collect()
}

/// `D_t Tᵗ + D_x Tˣ − q·G`, normalized. Zero iff the conservation law holds
/// identically with the given characteristic.
pub fn divergence_match(t: &ConservedVector, m: &MultiplierPair, sys: &PDESystem) -> Result<PolyNormalForm, JetError> {
    let div = t.divergence(&sys.space)?;
    let l = m.contraction(sys)?;
    Ok(normalize(&(div - l))?)
}

/// On-shell values of `pr²X(G^a)` for every equation; all zero iff `X`
/// generates a symmetry of the system.
pub fn symmetry_invariance(x: &VectorField, sys: &PDESystem) -> Result<Vec<PolyNormalForm>, JetError> {
    let order = sys.equations.iter().map(Expr::jet_order).max().unwrap_or(1).max(1);
    let pr = prolong(x, &sys.space, order)?;
    sys.equations
        .iter()
        .map(|g| sys.on_shell_reduce(&pr.apply(g)?))
        .collect()
}
