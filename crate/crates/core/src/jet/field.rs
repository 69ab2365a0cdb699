use std::collections::BTreeMap;

use crate::expr::{normalize, partial, Expr, JetVar, PolyNormalForm, Symbol};

use super::system::ConservedVector;
use super::{JetError, JetSpace};

/// `X = Σ ξ^i ∂_{x^i} + Σ η^a ∂_{u^a}`, coefficients listed in the order of
/// the jet space's independents and dependents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorField {
    pub xi: Vec<Expr>,
    pub eta: Vec<Expr>,
}

impl VectorField {
    pub fn new(xi: Vec<Expr>, eta: Vec<Expr>) -> Self {
        Self { xi, eta }
    }

    /// True when no coefficient involves a derivative jet.
    pub fn is_point(&self) -> bool {
        self.xi.iter().chain(&self.eta).all(|c| c.jet_order() == 0)
    }

    /// `Σ a_k X_k`, coefficient-wise.
    pub fn linear_combination(terms: &[(Expr, &VectorField)]) -> Self {
        let width = |f: fn(&VectorField) -> usize| terms.iter().map(|(_, x)| f(x)).max().unwrap_or(0);
        let nxi = width(|x| x.xi.len());
        let neta = width(|x| x.eta.len());
        let combine = |pick: fn(&VectorField) -> &Vec<Expr>, n: usize| -> Vec<Expr> {
            (0..n)
                .map(|i| {
                    Expr::add(
                        terms
                            .iter()
                            .map(|(a, x)| a.clone() * pick(x).get(i).cloned().unwrap_or_else(Expr::zero)),
                    )
                    .simplified()
                })
                .collect()
        };
        Self {
            xi: combine(|x| &x.xi, nxi),
            eta: combine(|x| &x.eta, neta),
        }
    }

    fn check_shape(&self, space: &JetSpace) -> Result<(), JetError> {
        let ni = space.independents().count();
        let nd = space.dependents().count();
        if self.xi.len() != ni || self.eta.len() != nd {
            return Err(JetError::InvalidSystem(format!(
                "vector field has {}+{} coefficients, jet space needs {ni}+{nd}",
                self.xi.len(),
                self.eta.len()
            )));
        }
        Ok(())
    }
}

/// A vector field extended to derivative coordinates up to `order`.
#[derive(Debug, Clone)]
pub struct ProlongedField {
    pub base: VectorField,
    order: u32,
    independents: Vec<String>,
    dependents: Vec<String>,
    zeta: BTreeMap<JetVar, Expr>,
}

impl ProlongedField {
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Coefficient of `∂/∂j`; `η` for an undifferentiated dependent, zero
    /// for jets that cannot occur in this jet space.
    pub fn coefficient(&self, j: &JetVar) -> Expr {
        if j.total_order() == 0 {
            return self
                .dependents
                .iter()
                .position(|d| d == j.dependent())
                .map_or_else(Expr::zero, |i| self.base.eta[i].clone());
        }
        self.zeta.get(j).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn zeta(&self) -> impl Iterator<Item = (&JetVar, &Expr)> {
        self.zeta.iter()
    }

    /// `prX(e) = Σ ξ^i ∂e/∂x^i + Σ_J ζ_J ∂e/∂u_J`.
    pub fn apply(&self, e: &Expr) -> Result<Expr, JetError> {
        let mut terms = Vec::new();
        for (name, xi) in self.independents.iter().zip(&self.base.xi) {
            let d = partial(e, &Symbol::indep(name));
            if !d.is_zero() && !xi.is_zero() {
                terms.push(xi.clone() * d);
            }
        }
        for s in e.symbols() {
            let Symbol::Jet(j) = &s else { continue };
            if j.total_order() > self.order {
                return Err(JetError::BeyondProlongation {
                    jet: j.to_string(),
                    order: self.order,
                });
            }
            let coeff = self.coefficient(j);
            if coeff.is_zero() {
                continue;
            }
            terms.push(coeff * partial(e, &s));
        }
        Ok(Expr::add(terms).simplified())
    }
}

/// Prolongs `x` through `ζ_{J,i} = D_i ζ_J − Σ_k (D_i ξ^k) u_{J,k}` with
/// `ζ_∅ = η`.
pub fn prolong(x: &VectorField, space: &JetSpace, order: u32) -> Result<ProlongedField, JetError> {
    let max = space.max_order().saturating_sub(1).max(1);
    if order == 0 || order > max {
        return Err(JetError::ProlongationOrder { order, max });
    }
    x.check_shape(space)?;
    let indeps: Vec<String> = space.independents().map(str::to_string).collect();
    let deps: Vec<String> = space.dependents().map(str::to_string).collect();
    // D_i ξ^k, shared by every dependent and order.
    let mut dxi: BTreeMap<(usize, usize), Expr> = BTreeMap::new();
    for (i, name) in indeps.iter().enumerate() {
        for (k, xi) in x.xi.iter().enumerate() {
            dxi.insert((i, k), space.total_derivative(xi, name)?);
        }
    }
    let mut zeta: BTreeMap<JetVar, Expr> = BTreeMap::new();
    for (a, dep) in deps.iter().enumerate() {
        let mut layer = vec![(JetVar::base(dep), x.eta[a].clone())];
        for _ in 0..order {
            let mut next = Vec::new();
            for (j, zj) in &layer {
                for (i, name) in indeps.iter().enumerate() {
                    if !space.depends(dep, name) {
                        continue;
                    }
                    let target = j.bump(name);
                    if zeta.contains_key(&target) {
                        continue;
                    }
                    let mut terms = vec![space.total_derivative(zj, name)?];
                    for (k, kname) in indeps.iter().enumerate() {
                        if !space.depends(dep, kname) {
                            continue;
                        }
                        let d = &dxi[&(i, k)];
                        if d.is_zero() {
                            continue;
                        }
                        terms.push(-(d.clone() * Expr::sym(j.bump(kname))));
                    }
                    let value = Expr::add(terms).simplified();
                    zeta.insert(target.clone(), value.clone());
                    next.push((target, value));
                }
            }
            layer = next;
        }
    }
    Ok(ProlongedField {
        base: x.clone(),
        order,
        independents: indeps,
        dependents: deps,
        zeta,
    })
}

/// Components `T*^i = prX(T^i) + T^i Σ_j D_j ξ^j − Σ_j T^j D_j ξ^i`; all zero
/// iff `X` is associated with `T`.
pub fn association_residual(
    x: &VectorField,
    t: &ConservedVector,
    space: &JetSpace,
) -> Result<Vec<PolyNormalForm>, JetError> {
    let indeps: Vec<String> = space.independents().map(str::to_string).collect();
    let pr = prolong(x, space, t.jet_order().max(1))?;
    let mut div_xi = Vec::new();
    for (xi, name) in x.xi.iter().zip(&indeps) {
        div_xi.push(space.total_derivative(xi, name)?);
    }
    let div_xi = Expr::add(div_xi);
    let mut out = Vec::with_capacity(t.components.len());
    for (i, ti) in t.components.iter().enumerate() {
        let mut terms = vec![pr.apply(ti)?, ti.clone() * div_xi.clone()];
        for (tj, name) in t.components.iter().zip(&indeps) {
            let d = space.total_derivative(&x.xi[i], name)?;
            terms.push(-(tj.clone() * d));
        }
        out.push(normalize(&Expr::add(terms))?);
    }
    Ok(out)
}
