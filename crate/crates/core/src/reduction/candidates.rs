use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;

use crate::expr::{eval_numeric, partial, substitute, Bindings, Context, Expr, ExprError, JetVar, Point, Symbol};

use super::{ReductionError, EPS};

/// Parameter name → value.
pub type NumericParams = BTreeMap<String, f64>;

/// Absolute tolerance for calling a residual zero.
pub const CLASSIFY_TOL: f64 = 1e-10;
/// Quasi-random sample points per classification.
pub const CLASSIFY_SAMPLES: usize = 100;

/// Parameters that closed-form candidates may mention.
const FREE_PARAMS: [&str; 6] = ["beta", "gamma", "delta", "c", "eps", "c1"];

/// A closed-form `(u, v)` offered as a solution, valid under parameter
/// equalities.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionCandidate {
    pub label: String,
    pub constraints: Vec<(String, BigRational)>,
    /// Set for entries whose phase, supposedly a function of `r`, depends
    /// on `s`.
    pub suspect: bool,
    /// The reduced phase `p(r, s)` the candidate was generated from.
    pub phase: Option<Expr>,
    pub u: Expr,
    pub v: Expr,
    pub q_form: String,
}

impl SolutionCandidate {
    pub fn check_constraints(&self, params: &NumericParams) -> Result<(), ReductionError> {
        for (name, required) in &self.constraints {
            let required = required.to_f64().unwrap_or(f64::NAN);
            let given = *params
                .get(name)
                .ok_or_else(|| ReductionError::MissingParam(name.clone()))?;
            if (given - required).abs() > 1e-12 {
                return Err(ReductionError::ConstraintViolation {
                    param: name.clone(),
                    required,
                    given,
                });
            }
        }
        Ok(())
    }

    /// The constraint list rendered as `name=value, ...`.
    pub fn constraint_text(&self) -> String {
        let mut parts: Vec<String> = self.constraints.iter().map(|(n, v)| format!("{n}={v}")).collect();
        if self.suspect {
            parts.push("suspect".into());
        }
        parts.join(", ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Exact,
    ReducedOnly,
    NotSolution,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Exact => "Exact",
            Verdict::ReducedOnly => "ReducedOnly",
            Verdict::NotSolution => "NotSolution",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub verdict: Verdict,
    pub suspect: bool,
    pub g1_max: f64,
    pub g2_max: f64,
    pub reduced_max: f64,
}

impl Classification {
    pub fn g_max(&self) -> f64 {
        self.g1_max.max(self.g2_max)
    }
}

/// `(G¹, G², u·G¹ + v·G²)` evaluated symbolically on the candidate: every
/// jet `u_J` becomes the matching explicit partial of `u(x, t)`.
pub fn candidate_residuals(cand: &SolutionCandidate, equations: &[Expr]) -> Result<[Expr; 3], ReductionError> {
    let [g1, g2] = equations else {
        return Err(ReductionError::Jet(crate::jet::JetError::InvalidSystem(format!(
            "candidates are checked against two equations, got {}",
            equations.len()
        ))));
    };
    let fields = [("u", &cand.u), ("v", &cand.v)];
    let mut b = Bindings::new();
    for s in g1.symbols().into_iter().chain(g2.symbols()) {
        let Symbol::Jet(j) = &s else { continue };
        let (_, base) = fields
            .iter()
            .find(|(n, _)| *n == j.dependent())
            .ok_or_else(|| ExprError::Unbound(j.to_string()))?;
        b.insert(s.clone(), explicit_derivative(base, j));
    }
    let r1 = substitute(g1, &b)?;
    let r2 = substitute(g2, &b)?;
    let reduced = cand.u.clone() * r1.clone() + cand.v.clone() * r2.clone();
    Ok([r1, r2, reduced])
}

fn explicit_derivative(e: &Expr, j: &JetVar) -> Expr {
    let mut out = e.clone();
    for (indep, count) in j.orders() {
        for _ in 0..count {
            out = partial(&out, &Symbol::indep(indep));
        }
    }
    out
}

/// Halton points `(x, t)` in `[0, 2π] × [0, 1]` (bases 2 and 3).
pub fn sample_points(n: usize) -> Vec<(f64, f64)> {
    halton::Sequence::new(2)
        .zip(halton::Sequence::new(3))
        .take(n)
        .map(|(a, b)| (2.0 * PI * a, b))
        .collect()
}

pub(crate) fn param_point(params: &NumericParams) -> Point {
    params.iter().map(|(n, v)| (Symbol::param(n), *v)).collect()
}

fn max_abs(e: &Expr, base: &Point, points: &[(f64, f64)]) -> Result<f64, ReductionError> {
    let mut pt = base.clone();
    let mut worst: f64 = 0.0;
    for (x, t) in points {
        pt.insert(Symbol::indep("x"), *x);
        pt.insert(Symbol::indep("t"), *t);
        let val = eval_numeric(e, &pt)?;
        if !val.is_finite() {
            return Ok(f64::INFINITY);
        }
        worst = worst.max(val.abs());
    }
    Ok(worst)
}

/// Evaluates both equations and the reduced scalar on the candidate at the
/// sample points and adjudicates.
pub fn classify(
    cand: &SolutionCandidate,
    params: &NumericParams,
    equations: &[Expr],
    tol: f64,
) -> Result<Classification, ReductionError> {
    cand.check_constraints(params)?;
    let eps = *params
        .get(EPS)
        .ok_or_else(|| ReductionError::MissingParam(EPS.into()))?;
    if eps <= 0.0 {
        return Err(ReductionError::NonPositiveEps(eps));
    }
    let [r1, r2, red] = candidate_residuals(cand, equations)?;
    let base = param_point(params);
    let points = sample_points(CLASSIFY_SAMPLES);
    let g1_max = max_abs(&r1, &base, &points)?;
    let g2_max = max_abs(&r2, &base, &points)?;
    let reduced_max = max_abs(&red, &base, &points)?;
    let verdict = if g1_max < tol && g2_max < tol {
        Verdict::Exact
    } else if reduced_max < tol {
        Verdict::ReducedOnly
    } else {
        Verdict::NotSolution
    };
    Ok(Classification {
        verdict,
        suspect: cand.suspect,
        g1_max,
        g2_max,
        reduced_max,
    })
}

/// Largest `|−c − βp_r + γp_r² + δε|` and `|γ p_rr|` over the sample points
/// for a candidate generated from a phase `p(r)`; both vanish exactly when
/// the candidate solves the full system. `None` when there is no phase or
/// it depends on `s`.
pub fn factorized_conditions(
    cand: &SolutionCandidate,
    params: &NumericParams,
    ctx: &Context,
) -> Result<Option<(f64, f64)>, ReductionError> {
    let Some(phase) = cand.phase.as_ref().filter(|p| !p.contains(&Symbol::indep("s"))) else {
        return Ok(None);
    };
    let r = Symbol::indep("r");
    let p_r = partial(phase, &r);
    let p_rr = partial(&p_r, &r);
    let to_xt = Bindings::from([
        (Symbol::indep("r"), Expr::sym(Symbol::indep("x"))),
        (Symbol::indep("s"), Expr::sym(Symbol::indep("t"))),
    ]);
    let amp = ctx.parse("-c - beta*p_r + gamma*p_r^2 + delta*eps")?;
    let disp = ctx.parse("gamma*p_rr")?;
    let b = Bindings::from([
        (Symbol::jet("p", &[("r", 1)]), substitute(&p_r, &to_xt)?),
        (Symbol::jet("p", &[("r", 2)]), substitute(&p_rr, &to_xt)?),
    ]);
    let base = param_point(params);
    let points = sample_points(CLASSIFY_SAMPLES);
    Ok(Some((
        max_abs(&substitute(&amp, &b)?, &base, &points)?,
        max_abs(&substitute(&disp, &b)?, &base, &points)?,
    )))
}

/// Parameters for one admissible draw: constrained values are pinned, the
/// others uniform in `[0.1, 2]`.
pub fn draw_params<R: Rng>(cand: &SolutionCandidate, rng: &mut R) -> NumericParams {
    FREE_PARAMS
        .iter()
        .map(|name| {
            let pinned = cand
                .constraints
                .iter()
                .find(|(n, _)| n == name)
                .and_then(|(_, v)| v.to_f64());
            (name.to_string(), pinned.unwrap_or_else(|| rng.gen_range(0.1..2.0)))
        })
        .collect()
}

struct CaseSpec {
    constraints: &'static [(&'static str, i64)],
    phases: [(&'static str, bool); 4],
}

fn case_spec(case_id: u32) -> Result<CaseSpec, ReductionError> {
    Ok(match case_id {
        1 => CaseSpec {
            constraints: &[("c", 0), ("gamma", 0)],
            phases: [
                ("0", false),
                ("-pi/2", false),
                ("pi/2", false),
                ("r*delta*eps/beta + c1", false),
            ],
        },
        2 => CaseSpec {
            constraints: &[("c", 0), ("beta", 0)],
            phases: [("0", false), ("-pi/2", false), ("pi/2", false), ("c1", false)],
        },
        3 => CaseSpec {
            constraints: &[("delta", 0), ("gamma", 0)],
            phases: [
                ("-c*s", true),
                ("-pi/2 - c*s", true),
                ("pi/2 - c*s", true),
                ("-c*r/beta + c1", false),
            ],
        },
        other => return Err(ReductionError::UnknownCase(other)),
    })
}

/// The printed solutions of one case, generated from their phases through
/// `u = √ε cos(p + cs)`, `v = √ε sin(p + cs)` with `s = t`, `r = x`.
pub fn case_solutions(case_id: u32, ctx: &Context) -> Result<Vec<SolutionCandidate>, ReductionError> {
    let spec = case_spec(case_id)?;
    let mut pinned = Bindings::new();
    let mut constraints = Vec::new();
    for (name, value) in spec.constraints {
        pinned.insert(Symbol::param(name), Expr::int(*value));
        constraints.push((name.to_string(), BigRational::from_integer((*value).into())));
    }
    let to_xt = Bindings::from([
        (Symbol::indep("r"), Expr::sym(Symbol::indep("x"))),
        (Symbol::indep("s"), Expr::sym(Symbol::indep("t"))),
    ]);
    let amplitude = ctx.parse("sqrt(eps)")?;
    let drift = ctx.parse("c*s")?;
    let mut out = Vec::new();
    for (i, (src, suspect)) in spec.phases.iter().enumerate() {
        let phase = substitute(&ctx.parse(src)?, &pinned)?;
        let arg = substitute(&substitute(&(phase.clone() + drift.clone()), &pinned)?, &to_xt)?;
        let q_form = if arg.is_zero() {
            amplitude.render()
        } else {
            format!("{}*exp(i*({}))", amplitude.render(), arg.render())
        };
        out.push(SolutionCandidate {
            label: format!("case{case_id}.p{}", i + 1),
            constraints: constraints.clone(),
            suspect: *suspect,
            phase: Some(phase),
            u: amplitude.clone() * Expr::cos(arg.clone()),
            v: amplitude.clone() * Expr::sin(arg),
            q_form,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::reduction_context;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (Context, Vec<Expr>) {
        let ctx = reduction_context(&Context::new()).unwrap();
        let eqs = vec![
            ctx.parse("u_t + beta*u_x - gamma*v_xx + delta*v*(u^2+v^2)").unwrap(),
            ctx.parse("-v_t - beta*v_x - gamma*u_xx + delta*u*(u^2+v^2)").unwrap(),
        ];
        (ctx, eqs)
    }

    fn params(pairs: &[(&str, f64)]) -> NumericParams {
        pairs.iter().map(|(n, v)| (n.to_string(), *v)).collect()
    }

    #[test]
    fn case_one_final_entry_is_exact() {
        let (ctx, eqs) = setup();
        let cands = case_solutions(1, &ctx).unwrap();
        let p = params(&[
            ("beta", 1.0),
            ("gamma", 0.0),
            ("delta", 1.0),
            ("c", 0.0),
            ("eps", 0.25),
            ("c1", 0.3),
        ]);
        let cl = classify(&cands[3], &p, &eqs, CLASSIFY_TOL).unwrap();
        assert_eq!(cl.verdict, Verdict::Exact);
        assert_eq!(cands[3].u, ctx.parse("sqrt(eps)*cos(x*delta*eps/beta + c1)").unwrap());
    }

    #[test]
    fn constant_phase_is_reduced_only_with_known_residual() {
        let (ctx, eqs) = setup();
        let cands = case_solutions(1, &ctx).unwrap();
        let p = params(&[
            ("beta", 1.0),
            ("gamma", 0.0),
            ("delta", 1.0),
            ("c", 0.0),
            ("eps", 0.25),
            ("c1", 0.0),
        ]);
        let cl = classify(&cands[0], &p, &eqs, CLASSIFY_TOL).unwrap();
        assert_eq!(cl.verdict, Verdict::ReducedOnly);
        assert!((cl.g2_max - 0.25f64.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn case_three_final_entry_is_exact() {
        let (ctx, eqs) = setup();
        let cands = case_solutions(3, &ctx).unwrap();
        let p = params(&[
            ("beta", 2.0),
            ("gamma", 0.0),
            ("delta", 0.0),
            ("c", 1.0),
            ("eps", 1.0),
            ("c1", 0.0),
        ]);
        let cl = classify(&cands[3], &p, &eqs, CLASSIFY_TOL).unwrap();
        assert_eq!(cl.verdict, Verdict::Exact);
        assert!(cands[0].suspect && !cands[3].suspect);
        assert_eq!(factorized_conditions(&cands[0], &p, &ctx).unwrap(), None);
        let (amp, disp) = factorized_conditions(&cands[3], &p, &ctx).unwrap().unwrap();
        assert!(amp < 1e-12 && disp < 1e-12);
    }

    #[test]
    fn constraint_violation_and_bad_case() {
        let (ctx, eqs) = setup();
        let cands = case_solutions(1, &ctx).unwrap();
        let p = params(&[
            ("beta", 1.0),
            ("gamma", 0.5),
            ("delta", 1.0),
            ("c", 0.0),
            ("eps", 0.25),
            ("c1", 0.0),
        ]);
        assert!(matches!(
            classify(&cands[3], &p, &eqs, CLASSIFY_TOL),
            Err(ReductionError::ConstraintViolation { .. })
        ));
        assert!(matches!(case_solutions(4, &ctx), Err(ReductionError::UnknownCase(4))));
    }

    #[test]
    fn draws_respect_constraints() {
        let (ctx, _) = setup();
        let cands = case_solutions(2, &ctx).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = draw_params(&cands[0], &mut rng);
        assert_eq!(p["c"], 0.0);
        assert_eq!(p["beta"], 0.0);
        assert!((0.1..2.0).contains(&p["delta"]));
    }

    #[test]
    fn sample_points_cover_box() {
        let pts = sample_points(CLASSIFY_SAMPLES);
        assert_eq!(pts.len(), 100);
        assert!(pts
            .iter()
            .all(|(x, t)| (0.0..=2.0 * PI).contains(x) && (0.0..=1.0).contains(t)));
    }
}
