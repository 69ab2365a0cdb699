//! Formal partial derivatives and simultaneous substitution.

use std::collections::{BTreeMap, BTreeSet};

use super::{Expr, ExprError, Func, Symbol};

/// Generator → replacement.
pub type Bindings = BTreeMap<Symbol, Expr>;

/// Formal partial derivative with respect to one generator, every other
/// symbol held fixed. The chain rule is applied through function nodes.
pub fn partial(e: &Expr, g: &Symbol) -> Expr {
    if !e.contains(g) {
        return Expr::zero();
    }
    match e {
        Expr::Num(_) => Expr::zero(),
        Expr::Sym(s) => {
            if s == g {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Add(terms) => Expr::add(terms.iter().map(|t| partial(t, g))),
        Expr::Mul(factors) => {
            let mut out = Vec::new();
            for (i, f) in factors.iter().enumerate() {
                let d = partial(f, g);
                if d.is_zero() {
                    continue;
                }
                let mut prod: Vec<Expr> = factors
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, h)| h.clone())
                    .collect();
                prod.push(d);
                out.push(Expr::mul(prod));
            }
            Expr::add(out)
        }
        Expr::Pow(base, n) => Expr::mul([Expr::int(*n), Expr::pow((**base).clone(), n - 1), partial(base, g)]),
        Expr::Func(f, arg) => {
            let inner = partial(arg, g);
            let a = (**arg).clone();
            let outer = match f {
                Func::Sin => Expr::cos(a),
                Func::Cos => -Expr::sin(a),
                Func::Sqrt => Expr::mul([Expr::rational(1, 2), Expr::sqrt(a).recip()]),
                Func::Arctan => Expr::add([Expr::one(), Expr::pow(a, 2)]).recip(),
            };
            Expr::mul([outer, inner])
        }
    }
}

/// Replaces every bound generator by its image in one pass. Images are not
/// substituted again, but a binding set whose images refer back to bound
/// generators in a cycle is rejected. Identity bindings `g ↦ g` are no-ops.
pub fn substitute(e: &Expr, bindings: &Bindings) -> Result<Expr, ExprError> {
    let effective: Bindings = bindings
        .iter()
        .filter(|(s, img)| !matches!(img, Expr::Sym(t) if t == *s))
        .map(|(s, img)| (s.clone(), img.clone()))
        .collect();
    if effective.is_empty() {
        return Ok(e.clone());
    }
    check_acyclic(&effective)?;
    Ok(subst(e, &effective))
}

fn subst(e: &Expr, b: &Bindings) -> Expr {
    match e {
        Expr::Num(_) => e.clone(),
        Expr::Sym(s) => b.get(s).cloned().unwrap_or_else(|| e.clone()),
        Expr::Add(terms) => Expr::add(terms.iter().map(|t| subst(t, b))),
        Expr::Mul(factors) => Expr::mul(factors.iter().map(|f| subst(f, b))),
        Expr::Pow(base, n) => Expr::pow(subst(base, b), *n),
        Expr::Func(f, arg) => Expr::func(*f, subst(arg, b)),
    }
}

fn check_acyclic(b: &Bindings) -> Result<(), ExprError> {
    // 0 = unvisited, 1 = on stack, 2 = done
    fn visit(s: &Symbol, b: &Bindings, state: &mut BTreeMap<Symbol, u8>) -> Result<(), ExprError> {
        match state.get(s) {
            Some(1) => return Err(ExprError::CyclicBinding(s.to_string())),
            Some(2) => return Ok(()),
            _ => {}
        }
        state.insert(s.clone(), 1);
        if let Some(img) = b.get(s) {
            let next: BTreeSet<Symbol> = img.symbols();
            for t in next.iter().filter(|t| b.contains_key(*t)) {
                visit(t, b, state)?;
            }
        }
        state.insert(s.clone(), 2);
        Ok(())
    }
    let mut state = BTreeMap::new();
    for s in b.keys() {
        visit(s, b, &mut state)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{normalize, Context, VarKind};

    fn ctx() -> Context {
        let mut c = Context::new();
        for n in ["t", "x", "s", "r"] {
            c.declare(n, VarKind::Independent).unwrap();
        }
        for n in ["u", "v", "w", "p"] {
            c.declare(n, VarKind::Dependent).unwrap();
        }
        for n in ["c", "delta"] {
            c.declare(n, VarKind::Parameter).unwrap();
        }
        c
    }

    fn same(a: &Expr, b: &Expr) -> bool {
        normalize(&(a.clone() - b.clone())).unwrap().is_zero()
    }

    #[test]
    fn power_rule_on_jet_generator() {
        let c = ctx();
        let d = partial(&c.parse("u^2*u_x").unwrap(), &Symbol::jet("u", &[("x", 1)]));
        assert!(same(&d, &c.parse("u^2").unwrap()));
    }

    #[test]
    fn chain_rule_through_sine() {
        let c = ctx();
        let d = partial(&c.parse("sin(p + c*s)").unwrap(), &Symbol::jet("p", &[]));
        assert_eq!(d, c.parse("cos(p + c*s)").unwrap());
    }

    #[test]
    fn cubic_term_partial() {
        let c = ctx();
        let d = partial(&c.parse("delta*v*(u^2+v^2)").unwrap(), &Symbol::jet("v", &[]));
        assert!(same(&d, &c.parse("delta*(u^2+3*v^2)").unwrap()));
    }

    #[test]
    fn polar_substitution_gives_w_squared() {
        let c = ctx();
        let mut b = Bindings::new();
        b.insert(Symbol::jet("u", &[]), c.parse("w*cos(p+c*s)").unwrap());
        b.insert(Symbol::jet("v", &[]), c.parse("w*sin(p+c*s)").unwrap());
        let e = substitute(&c.parse("u^2+v^2").unwrap(), &b).unwrap();
        assert!(same(&e, &c.parse("w^2").unwrap()));
    }

    #[test]
    fn empty_binding_is_identity_and_derivative_entry_passes_through() {
        let c = ctx();
        let e = c.parse("u_x + v").unwrap();
        assert_eq!(substitute(&e, &Bindings::new()).unwrap(), e);
        let rhs = c.parse("w_r*cos(p+c*s) - w*p_r*sin(p+c*s)").unwrap();
        let mut b = Bindings::new();
        b.insert(Symbol::jet("u", &[("x", 1)]), rhs.clone());
        assert_eq!(substitute(&c.parse("u_x").unwrap(), &b).unwrap(), rhs);
    }

    #[test]
    fn simultaneous_not_sequential() {
        let c = ctx();
        let mut b = Bindings::new();
        b.insert(Symbol::jet("u", &[]), c.parse("w").unwrap());
        b.insert(Symbol::jet("v", &[]), c.parse("p").unwrap());
        let e = substitute(&c.parse("u*v").unwrap(), &b).unwrap();
        assert_eq!(e, c.parse("w*p").unwrap());
    }

    #[test]
    fn cycles_rejected() {
        let c = ctx();
        let mut b = Bindings::new();
        b.insert(Symbol::jet("u", &[]), c.parse("v + 1").unwrap());
        b.insert(Symbol::jet("v", &[]), c.parse("2*u").unwrap());
        assert!(matches!(
            substitute(&c.parse("u").unwrap(), &b),
            Err(ExprError::CyclicBinding(_))
        ));
        let mut selfloop = Bindings::new();
        selfloop.insert(Symbol::jet("u", &[]), c.parse("u + 1").unwrap());
        assert!(substitute(&c.parse("u").unwrap(), &selfloop).is_err());
        let identity = Bindings::from([(Symbol::jet("u", &[]), c.parse("u").unwrap())]);
        assert_eq!(
            substitute(&c.parse("u").unwrap(), &identity).unwrap(),
            c.parse("u").unwrap()
        );
    }
}
