use rand::Rng;

use crate::expr::{
    eval_numeric, normalize, partial, substitute, Bindings, Context, Expr, JetVar, Point, PolyNormalForm, Symbol,
};
use crate::jet::{ConservedVector, JetError, JetSpace};

use super::{reduction_context, ReductionError, REDUCED_DEPENDENTS, REDUCED_INDEPENDENTS, SHIFT};

/// How the new dependents may vary. The reduction proper assumes `w(r)`,
/// `p(r)`; the general frame keeps `w(s, r)`, `p(s, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Stationary,
    General,
}

/// The change of variables `(t, x, u, v) ↔ (s, r, w, p)` with
/// `r = x`, `s = t`, `w = √(u²+v²)`, `p = arctan(v/u) − ct`.
#[derive(Debug, Clone)]
pub struct CanonicalTransform {
    ctx: Context,
    pub c: Expr,
    pub forward: Vec<(Symbol, Expr)>,
    pub inverse: Bindings,
    /// The six first/second derivative images as printed for the reduction.
    pub derivative_table: Vec<(JetVar, Expr)>,
    pub invariants: Vec<(String, Expr)>,
    pub a: [[Expr; 2]; 2],
    pub j: Expr,
}

const TABLE: [(&str, &str); 6] = [
    ("u_x", "w_r*cos(p+c*s) - w*p_r*sin(p+c*s)"),
    (
        "u_xx",
        "w_rr*cos(p+c*s) - 2*w_r*p_r*sin(p+c*s) - w*p_r^2*cos(p+c*s) - w*p_rr*sin(p+c*s)",
    ),
    ("u_t", "-c*w*sin(p+c*s)"),
    ("v_x", "w_r*sin(p+c*s) + w*p_r*cos(p+c*s)"),
    (
        "v_xx",
        "w_rr*sin(p+c*s) + 2*w_r*p_r*cos(p+c*s) + w*p_rr*cos(p+c*s) - w*p_r^2*sin(p+c*s)",
    ),
    ("v_t", "c*w*cos(p+c*s)"),
];

const INVARIANTS: [(&str, &str); 7] = [
    ("b1", "s - t"),
    ("b2", "u^2 + v^2"),
    ("b3", "arctan(v/u) - c*t"),
    ("b4", "r"),
    ("b5", "p"),
    ("b6", "w"),
    ("b7", "x"),
];

impl CanonicalTransform {
    /// Builds the transform for the shift `c` (a parameter symbol or a
    /// number) and checks the printed derivative table against the chain
    /// rule, `A = I` and `J = 1`.
    pub fn build(base: &Context, c: Expr) -> Result<Self, ReductionError> {
        let ctx = reduction_context(base)?;
        let shift = Bindings::from([(Symbol::param(SHIFT), c.clone())]);
        let parse = |src: &str| -> Result<Expr, ReductionError> {
            let e = ctx.parse(src)?;
            Ok(if c == Expr::sym(Symbol::param(SHIFT)) {
                e
            } else {
                substitute(&e, &shift)?
            })
        };
        let forward = vec![
            (Symbol::indep("r"), parse("x")?),
            (Symbol::indep("s"), parse("t")?),
            (Symbol::jet("w", &[]), parse("sqrt(u^2+v^2)")?),
            (Symbol::jet("p", &[]), parse("arctan(v/u) - c*t")?),
        ];
        let inverse = Bindings::from([
            (Symbol::indep("x"), parse("r")?),
            (Symbol::indep("t"), parse("s")?),
            (Symbol::jet("u", &[]), parse("w*cos(p+c*s)")?),
            (Symbol::jet("v", &[]), parse("w*sin(p+c*s)")?),
        ]);
        let mut derivative_table = Vec::new();
        for (name, src) in TABLE {
            let Expr::Sym(Symbol::Jet(j)) = ctx.parse(name)? else {
                unreachable!("table keys are jet variables")
            };
            derivative_table.push((j, parse(src)?));
        }
        let invariants = INVARIANTS
            .iter()
            .map(|(n, src)| Ok((n.to_string(), parse(src)?)))
            .collect::<Result<Vec<_>, ReductionError>>()?;

        let space = frame_space(Frame::Stationary);
        let image = |v: &str| inverse[&Symbol::indep(v)].clone();
        let d = |e: &Expr, by: &str| space.total_derivative(e, by);
        let a = [
            [d(&image("t"), "s")?, d(&image("x"), "s")?],
            [d(&image("t"), "r")?, d(&image("x"), "r")?],
        ];
        let j = (a[0][0].clone() * a[1][1].clone() - a[0][1].clone() * a[1][0].clone()).simplified();
        let tr = Self {
            ctx,
            c,
            forward,
            inverse,
            derivative_table,
            invariants,
            a,
            j,
        };
        tr.check_table()?;
        tr.check_jacobian()?;
        Ok(tr)
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    fn check_table(&self) -> Result<(), ReductionError> {
        for (jet, printed) in &self.derivative_table {
            let derived = self.image(jet, Frame::Stationary)?;
            let diff = normalize(&(derived - printed.clone()))?;
            if !diff.is_zero() {
                return Err(ReductionError::TableMismatch {
                    entry: jet.to_string(),
                    residual: diff.to_string(),
                });
            }
        }
        Ok(())
    }

    fn check_jacobian(&self) -> Result<(), ReductionError> {
        for (i, row) in self.a.iter().enumerate() {
            for (k, entry) in row.iter().enumerate() {
                let expected = if i == k { Expr::one() } else { Expr::zero() };
                if normalize(&(entry.clone() - expected.clone()))? != PolyNormalForm::zero() {
                    return Err(ReductionError::Jacobian {
                        what: format!("A[{i}][{k}]"),
                        value: entry.to_string(),
                        expected: expected.to_string(),
                    });
                }
            }
        }
        if !normalize(&(self.j.clone() - Expr::one()))?.is_zero() {
            return Err(ReductionError::Jacobian {
                what: "J".into(),
                value: self.j.to_string(),
                expected: "1".into(),
            });
        }
        Ok(())
    }

    /// Image of an original jet variable, `u_J ↦ D^J(w cos(p + cs))` with
    /// `t ↦ s`, `x ↦ r`, computed by the chain rule in the given frame.
    pub fn image(&self, jet: &JetVar, frame: Frame) -> Result<Expr, ReductionError> {
        let space = frame_space(frame);
        let mut e = self
            .inverse
            .get(&Symbol::jet(jet.dependent(), &[]))
            .cloned()
            .ok_or_else(|| JetError::NotDependent(jet.dependent().to_string()))?;
        for (indep, count) in jet.orders() {
            let by = match indep {
                "t" => "s",
                "x" => "r",
                other => return Err(JetError::NotIndependent(other.to_string()).into()),
            };
            for _ in 0..count {
                e = space.total_derivative(&e, by)?;
            }
        }
        Ok(e)
    }

    /// Bindings that rewrite an expression in `(t, x, u, v)` and jets into
    /// the reduced frame.
    pub fn bindings_for(&self, e: &Expr, frame: Frame) -> Result<Bindings, ReductionError> {
        let mut b = Bindings::new();
        for s in e.symbols() {
            match &s {
                Symbol::Indep(_) => {
                    if let Some(img) = self.inverse.get(&s) {
                        b.insert(s.clone(), img.clone());
                    }
                }
                Symbol::Jet(j) => {
                    b.insert(s.clone(), self.image(j, frame)?);
                }
                Symbol::Param(_) => {}
            }
        }
        Ok(b)
    }

    /// Forward map evaluated numerically with the quadrant-aware angle, so
    /// `w ≥ 0` always. Returns `(s, r, w, p)`.
    pub fn forward_numeric(&self, t: f64, x: f64, u: f64, v: f64, c: f64) -> (f64, f64, f64, f64) {
        (t, x, u.hypot(v), v.atan2(u) - c * t)
    }

    /// Largest deviation of `X(r), X(s) − 1, X(w), X(p)` and `X(b_i)` from
    /// zero at random points, where `X = ∂_t + ∂_s + c(u∂_v − v∂_u)` acts on
    /// both coordinate sets.
    pub fn invariant_defect<R: Rng>(&self, rng: &mut R, c_value: f64, samples: usize) -> f64 {
        let gens = [
            (Symbol::indep("t"), Expr::one()),
            (Symbol::indep("s"), Expr::one()),
            (
                Symbol::jet("u", &[]),
                -(self.c.clone() * Expr::sym(Symbol::jet("v", &[]))),
            ),
            (Symbol::jet("v", &[]), self.c.clone() * Expr::sym(Symbol::jet("u", &[]))),
        ];
        let apply = |e: &Expr| Expr::add(gens.iter().map(|(s, coef)| coef.clone() * partial(e, s)));
        let mut checks: Vec<(Expr, f64)> = self.invariants.iter().map(|(_, b)| (apply(b), 0.0)).collect();
        for (sym, image) in &self.forward {
            let target = if *sym == Symbol::indep("s") { 1.0 } else { 0.0 };
            checks.push((apply(image), target));
        }
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let mut pt = Point::new();
            for name in ["t", "x", "s", "r"] {
                pt.insert(Symbol::indep(name), rng.gen_range(-2.0..2.0));
            }
            for name in ["u", "v", "w", "p"] {
                pt.insert(Symbol::jet(name, &[]), rng.gen_range(0.2..2.0));
            }
            pt.insert(Symbol::param(SHIFT), c_value);
            for (e, target) in &checks {
                let val = eval_numeric(e, &pt).unwrap_or(f64::INFINITY);
                worst = worst.max((val - target).abs());
            }
        }
        worst
    }
}

/// Jet space of the reduced frame.
pub fn frame_space(frame: Frame) -> JetSpace {
    let space = JetSpace::new(&REDUCED_INDEPENDENTS, &REDUCED_DEPENDENTS, 4);
    match frame {
        Frame::General => space,
        Frame::Stationary => space.with_dependence("w", &["r"]).with_dependence("p", &["r"]),
    }
}

/// `(T^s, T^r) = J (A⁻¹)ᵀ (Tᵗ, Tˣ)` after rewriting in the reduced frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformedConserved {
    pub ts: PolyNormalForm,
    pub tr: PolyNormalForm,
}

pub fn transform_conserved(
    t: &ConservedVector,
    tr: &CanonicalTransform,
    frame: Frame,
) -> Result<TransformedConserved, ReductionError> {
    let mut rewritten = Vec::with_capacity(2);
    for comp in &t.components {
        let b = tr.bindings_for(comp, frame)?;
        rewritten.push(substitute(comp, &b)?);
    }
    let [[a00, a01], [a10, a11]] = tr.a.clone();
    // (A⁻¹)ᵀ = (1/det) [[a11, −a10], [−a01, a00]]
    let det = tr.j.clone();
    let inv_t = [[a11, -a10], [-a01, a00]];
    let scale = tr.j.clone() * det.recip();
    let mut out = Vec::with_capacity(2);
    for row in &inv_t {
        let comb = Expr::add(row.iter().zip(&rewritten).map(|(k, e)| k.clone() * e.clone()));
        out.push(normalize(&(scale.clone() * comb))?);
    }
    let tr_ = out.pop().expect("two components");
    let ts = out.pop().expect("two components");
    Ok(TransformedConserved { ts, tr: tr_ })
}
