use crate::expr::{normalize, substitute, Bindings, Expr, PolyNormalForm, Symbol};

use super::transform::{CanonicalTransform, Frame};
use super::{ReductionError, EPS, SHIFT};

const QUOTED_REDUCED: &str = "-c*eps*sin(2*p+2*c*s) - beta*eps*p_r*sin(2*p+2*c*s) \
    - gamma*eps*p_rr*cos(2*p+2*c*s) + gamma*eps*p_r^2*sin(2*p+2*c*s) \
    + delta*eps^2*sin(2*p+2*c*s)";

const FACTORIZED: &str = "eps*((-c - beta*p_r + gamma*p_r^2 + delta*eps)*sin(2*p+2*c*s) - gamma*p_rr*cos(2*p+2*c*s))";

const PRINTED_FLUX: &str = "1/2*(2*beta*w^2 + gamma*w*w_r*sin(2*(p+c*s)) + 2*gamma*w^2*cos(2*(p+c*s)))";

/// The flux `T^r` of the mass law in the reduced frame as usually quoted.
/// It differs from the one obtained by transforming `T²`, which is
/// `½βw² − γw²p_r`.
pub fn printed_reduced_flux(tr: &CanonicalTransform) -> Result<Expr, ReductionError> {
    parse_shifted(tr, PRINTED_FLUX)
}

/// The scalar equation left for the phase `p(r)` once `w = √ε`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedODE {
    pub residual: PolyNormalForm,
}

impl ReducedODE {
    pub fn matches(&self, e: &Expr) -> Result<bool, ReductionError> {
        Ok(normalize(e)? == self.residual)
    }
}

fn parse_shifted(tr: &CanonicalTransform, src: &str) -> Result<Expr, ReductionError> {
    let e = tr.context().parse(src)?;
    let b = Bindings::from([(Symbol::param(SHIFT), tr.c.clone())]);
    Ok(substitute(&e, &b)?)
}

/// The reduced equation in the form it is usually quoted.
pub fn quoted_reduced_equation(tr: &CanonicalTransform) -> Result<Expr, ReductionError> {
    parse_shifted(tr, QUOTED_REDUCED)
}

/// `ε[A sin(2p+2cs) − γ p_rr cos(2p+2cs)]` with `A = −c − βp_r + γp_r² + δε`.
pub fn factorized_reduced_equation(tr: &CanonicalTransform) -> Result<Expr, ReductionError> {
    parse_shifted(tr, FACTORIZED)
}

/// Substitutes `u = w cos(p+cs)`, `v = w sin(p+cs)` with `w` constant into
/// `u·G¹ + v·G²`, then rewrites `w²` as `ε`.
pub fn reduced_ode(equations: &[Expr], tr: &CanonicalTransform) -> Result<ReducedODE, ReductionError> {
    let [g1, g2] = equations else {
        return Err(ReductionError::Jet(crate::jet::JetError::InvalidSystem(format!(
            "the reduction needs two equations, got {}",
            equations.len()
        ))));
    };
    let u = Expr::sym(Symbol::jet("u", &[]));
    let v = Expr::sym(Symbol::jet("v", &[]));
    let scalar = u * g1.clone() + v * g2.clone();
    let b = tr.bindings_for(&scalar, Frame::Stationary)?;
    let reduced = substitute(&scalar, &b)?;
    let frozen: Bindings = reduced
        .symbols()
        .into_iter()
        .filter(|s| s.as_jet().is_some_and(|j| j.dependent() == "w" && j.total_order() > 0))
        .map(|s| (s, Expr::zero()))
        .collect();
    let reduced = substitute(&reduced, &frozen)?;
    let residual = normalize(&reduced)?.replace_square(&Symbol::jet("w", &[]), &Symbol::param(EPS))?;
    Ok(ReducedODE { residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Context;
    use crate::reduction::reduction_context;

    fn setup() -> (CanonicalTransform, Vec<Expr>) {
        let ctx = reduction_context(&Context::new()).unwrap();
        let tr = CanonicalTransform::build(&ctx, Expr::sym(Symbol::param("c"))).unwrap();
        let eqs = vec![
            ctx.parse("u_t + beta*u_x - gamma*v_xx + delta*v*(u^2+v^2)").unwrap(),
            ctx.parse("-v_t - beta*v_x - gamma*u_xx + delta*u*(u^2+v^2)").unwrap(),
        ];
        (tr, eqs)
    }

    fn restrict(tr: &CanonicalTransform, e: &PolyNormalForm, zero: &[&str]) -> PolyNormalForm {
        let b: Bindings = zero
            .iter()
            .map(|n| {
                (
                    tr.context().parse(n).unwrap().symbols().into_iter().next().unwrap(),
                    Expr::zero(),
                )
            })
            .collect();
        normalize(&substitute(&e.to_expr(), &b).unwrap()).unwrap()
    }

    #[test]
    fn reproduces_printed_form_and_factorization() {
        let (tr, eqs) = setup();
        let ode = reduced_ode(&eqs, &tr).unwrap();
        assert!(ode.matches(&quoted_reduced_equation(&tr).unwrap()).unwrap());
        assert!(ode.matches(&factorized_reduced_equation(&tr).unwrap()).unwrap());
    }

    #[test]
    fn dispersionless_static_case_factors() {
        let (tr, eqs) = setup();
        let ode = reduced_ode(&eqs, &tr).unwrap();
        let r = restrict(&tr, &ode.residual, &["c", "gamma"]);
        let want = normalize(&tr.context().parse("eps*sin(2*p)*(delta*eps - beta*p_r)").unwrap()).unwrap();
        assert_eq!(r, want);
    }

    #[test]
    fn vanishes_for_trivial_phase() {
        let (tr, eqs) = setup();
        let ode = reduced_ode(&eqs, &tr).unwrap();
        let r = restrict(&tr, &ode.residual, &["c", "gamma", "delta", "p", "p_r", "p_rr"]);
        assert!(r.is_zero());
    }

    #[test]
    fn printed_second_equation_breaks_the_identity() {
        let (tr, mut eqs) = setup();
        eqs[1] = tr
            .context()
            .parse("-v_t - beta*v_x - gamma*u_xx + delta*(u^2+v^2)")
            .unwrap();
        match reduced_ode(&eqs, &tr) {
            Ok(ode) => assert!(!ode.matches(&quoted_reduced_equation(&tr).unwrap()).unwrap()),
            Err(ReductionError::Expr(_)) => {}
            Err(e) => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn mass_law_flux_differs_from_printed_form() {
        use crate::jet::ConservedVector;
        use crate::reduction::transform_conserved;
        let (tr, _) = setup();
        let ctx = tr.context();
        let t2 = ConservedVector::new(
            ctx.parse("1/2*(u^2 + v^2)").unwrap(),
            ctx.parse("1/2*(beta*u^2 + v*(beta*v + 2*gamma*u_x) - 2*gamma*u*v_x)")
                .unwrap(),
        );
        let out = transform_conserved(&t2, &tr, Frame::Stationary).unwrap();
        assert_eq!(out.ts, normalize(&ctx.parse("1/2*w^2").unwrap()).unwrap());
        assert_eq!(
            out.tr,
            normalize(&ctx.parse("1/2*beta*w^2 - gamma*w^2*p_r").unwrap()).unwrap()
        );
        assert_ne!(out.tr, normalize(&printed_reduced_flux(&tr).unwrap()).unwrap());
    }
}
