//! One line per acceptance criterion. Run with
//! `cargo test -p nlse-core --test acceptance -- --nocapture` to see them.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use common::*;
use nlse_core::expr::{normalize, Expr, Symbol};
use nlse_core::jet::{
    association_residual, divergence_match, multiplier_condition, prolong, symmetry_invariance, VectorField,
};
use nlse_core::numerics::{plane_wave, plane_wave_semidiscrete, run, Grid, NlseParams, SimConfig};
use nlse_core::problem::Problem;
use nlse_core::reduction::{
    case_solutions, classify, draw_params, quoted_reduced_equation, reduced_ode, reduction_context,
    transform_conserved, CanonicalTransform, Frame, Verdict, CLASSIFY_TOL,
};
use proptest::prelude::*;
use proptest::test_runner::TestRunner;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn multipliers() -> Outcome {
    let start = Instant::now();
    let p = Problem::cubic_nlse();
    let sys = p.system().map_err(|e| e.to_string())?;
    let mut bad = Vec::new();
    for m in &p.multipliers {
        let r = multiplier_condition(&m.value, &sys).map_err(|e| e.to_string())?;
        if r.iter().any(|c| !c.is_zero()) {
            bad.push(m.name.clone());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        bad.is_empty() && secs < 5.0,
        format!("{} pairs, failing {bad:?}, {secs:.3} s", p.multipliers.len()),
    )
}

fn conservation_laws() -> Outcome {
    let shipped = Problem::cubic_nlse();
    let sys = shipped.system().map_err(|e| e.to_string())?;
    let mut bad = Vec::new();
    for c in &shipped.conserved {
        let m = shipped.multiplier(&c.value.multiplier).ok_or("missing multiplier")?;
        if !divergence_match(&c.value.vector, m, &sys)
            .map_err(|e| e.to_string())?
            .is_zero()
        {
            bad.push(c.name.clone());
        }
    }
    let printed = shipped.variant(true);
    let psys = printed.system().map_err(|e| e.to_string())?;
    let t2 = printed.conserved.iter().find(|c| c.name == "T2").ok_or("no T2")?;
    let m = printed.multiplier(&t2.value.multiplier).ok_or("missing multiplier")?;
    let r = divergence_match(&t2.value.vector, m, &psys).map_err(|e| e.to_string())?;
    let names_delta = r.symbols().contains(&Symbol::param("delta"));
    check(
        bad.is_empty() && !r.is_zero() && names_delta,
        format!("failing {bad:?}; printed T2 residual {r}"),
    )
}

fn symmetries() -> Outcome {
    let p = Problem::cubic_nlse();
    let sys = p.system().map_err(|e| e.to_string())?;
    let mut bad = Vec::new();
    for x in &p.symmetries {
        let r = symmetry_invariance(&x.value, &sys).map_err(|e| e.to_string())?;
        if r.iter().any(|c| !c.is_zero()) {
            bad.push(x.name.clone());
        }
    }
    // amplitude scaling without the matching rescaling of t and x
    let broken = VectorField::new(
        vec![Expr::zero(), Expr::zero()],
        vec![Expr::sym(Symbol::jet("u", &[])), Expr::sym(Symbol::jet("v", &[]))],
    );
    let r = symmetry_invariance(&broken, &sys).map_err(|e| e.to_string())?;
    let caught = r.iter().any(|c| !c.is_zero());
    check(
        bad.is_empty() && caught,
        format!(
            "{} generators, failing {bad:?}; broken generator rejected: {caught}",
            p.symmetries.len()
        ),
    )
}

fn association() -> Outcome {
    let p = Problem::cubic_nlse();
    let space = p.space();
    let matrix = || -> Result<Vec<String>, String> {
        let mut rows = Vec::new();
        for x in &p.symmetries {
            let mut row = String::new();
            for t in &p.conserved {
                let r = association_residual(&x.value, &t.value.vector, &space).map_err(|e| e.to_string())?;
                row.push(if r.iter().all(|c| c.is_zero()) { '1' } else { '0' });
            }
            rows.push(format!("{}:{row}", x.name));
        }
        Ok(rows)
    };
    let (a, b) = (matrix()?, matrix()?);
    let t2 = p.conserved_vector("T2").ok_or("no T2")?;
    let claimed = ["X1", "X3"].iter().all(|x| {
        p.symmetry(x)
            .and_then(|f| association_residual(f, t2, &space).ok())
            .is_some_and(|r| r.iter().all(|c| c.is_zero()))
    });
    check(
        claimed && a == b,
        format!("(X1,T2) and (X3,T2) vanish: {claimed}; matrix {}", a.join(" ")),
    )
}

fn reduction() -> Outcome {
    let p = Problem::cubic_nlse();
    let ctx = reduction_context(&p.context).map_err(|e| e.to_string())?;
    let tr = CanonicalTransform::build(&ctx, Expr::sym(Symbol::param("c"))).map_err(|e| e.to_string())?;
    let j_one = tr.j.is_one();
    let t2 = p.conserved_vector("T2").ok_or("no T2")?;
    let out = transform_conserved(t2, &tr, Frame::Stationary).map_err(|e| e.to_string())?;
    let half_w2 = normalize(&ctx.parse("1/2*w^2").map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let density = out.ts == half_w2;
    let ode = reduced_ode(&p.equation_exprs(), &tr).map_err(|e| e.to_string())?;
    let quoted = ode
        .matches(&quoted_reduced_equation(&tr).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    check(
        j_one && density && quoted,
        format!(
            "J = {}; T^s = {}; reduced residual matches quoted form: {quoted}",
            tr.j, out.ts
        ),
    )
}

fn solutions() -> Outcome {
    let p = Problem::cubic_nlse();
    let ctx = reduction_context(&p.context).map_err(|e| e.to_string())?;
    let eqs = p.equation_exprs();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut notes = Vec::new();
    let mut ok = true;
    let case1 = case_solutions(1, &ctx).map_err(|e| e.to_string())?;
    let case3 = case_solutions(3, &ctx).map_err(|e| e.to_string())?;
    for cand in [&case1[3], &case3[3]] {
        let mut worst = 0.0f64;
        for _ in 0..3 {
            let cl = classify(cand, &draw_params(cand, &mut rng), &eqs, CLASSIFY_TOL).map_err(|e| e.to_string())?;
            ok &= cl.verdict == Verdict::Exact && cl.g_max() < 1e-10;
            worst = worst.max(cl.g_max());
        }
        notes.push(format!("{} max residual {worst:.1e}", cand.label));
    }
    for cand in &case1[..3] {
        let mut worst = 0.0f64;
        for _ in 0..3 {
            let params = draw_params(cand, &mut rng);
            let cl = classify(cand, &params, &eqs, CLASSIFY_TOL).map_err(|e| e.to_string())?;
            let predicted = params["delta"] * params["eps"].powf(1.5);
            let rel = (cl.g_max() - predicted).abs() / predicted;
            ok &= cl.verdict == Verdict::ReducedOnly && rel < 1e-8;
            worst = worst.max(rel);
        }
        notes.push(format!(
            "{} ReducedOnly, G vs delta*eps^(3/2) rel {worst:.1e}",
            cand.label
        ));
    }
    check(ok, notes.join("; "))
}

fn numeric_oracle() -> Outcome {
    let p = Problem::cubic_nlse();
    let vectors: Vec<_> = p.conserved.iter().map(|c| c.value.vector.clone()).collect();
    let params = NlseParams::new(1.0, 0.5, 1.0);
    let cfg = |grid, dt, t_end| SimConfig {
        grid,
        params,
        t_end,
        dt,
        sample_every: 10,
    };
    let start = Instant::now();
    let g = Grid::new(8.0 * PI, 256).map_err(|e| e.to_string())?;
    let (series, _) =
        run(&cfg(g, 1e-3, 1.0), &plane_wave(&g, &params, 0.5, 1.0, 0.0), &vectors).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let drifts = series.drifts();

    let small = Grid::new(2.0 * PI, 32).map_err(|e| e.to_string())?;
    let err = |dt: f64| -> Result<f64, String> {
        let (_, fin) =
            run(&cfg(small, dt, 0.1), &plane_wave(&small, &params, 0.5, 4.0, 0.0), &[]).map_err(|e| e.to_string())?;
        Ok(fin.max_diff(&plane_wave_semidiscrete(&small, &params, 0.5, 4.0, 0.1)))
    };
    let ratio = err(0.02)? / err(0.01)?;
    let text: Vec<String> = drifts.iter().map(|d| format!("{d:.1e}")).collect();
    check(
        drifts.iter().all(|d| *d < 1e-6) && secs < 60.0 && (14.0..=18.0).contains(&ratio),
        format!(
            "drifts [{}] in {secs:.2} s; dt-halving ratio {ratio:.2}",
            text.join(", ")
        ),
    )
}

fn engine_properties() -> Outcome {
    let s = space();
    let zero = |e: Expr| normalize(&e).map(|p| p.is_zero()).unwrap_or(false);
    let mut failures = Vec::new();
    let mut run = |name: &str, cases: u32, test: &dyn Fn(&mut TestRunner) -> Result<(), String>| {
        let mut runner = TestRunner::new(config(cases));
        if let Err(e) = test(&mut runner) {
            failures.push(format!("{name}: {e}"));
        }
    };
    let corpus = || tree(jet_generators(), 3, true);
    run("commutation", 100, &|r| {
        r.run(&corpus(), |e| {
            let dtdx = s.total_derivative(&s.total_derivative(&e, "x").unwrap(), "t").unwrap();
            let dxdt = s.total_derivative(&s.total_derivative(&e, "t").unwrap(), "x").unwrap();
            prop_assert!(zero(dtdx - dxdt));
            Ok(())
        })
        .map_err(|e| e.to_string())
    });
    run("leibniz", 100, &|r| {
        r.run(&(corpus(), corpus()), |(e, f)| {
            let d = |g: &Expr| s.total_derivative(g, "x").unwrap();
            prop_assert!(zero(d(&(e.clone() * f.clone())) - d(&e) * f.clone() - e * d(&f)));
            Ok(())
        })
        .map_err(|e| e.to_string())
    });
    run("euler", 50, &|r| {
        let poly = || tree(jet_generators(), 3, false);
        r.run(&(poly(), poly()), |(a, b)| {
            let div = s.total_derivative(&a, "t").unwrap() + s.total_derivative(&b, "x").unwrap();
            for dep in ["u", "v"] {
                prop_assert!(zero(s.euler_operator(&div, dep).unwrap()));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
    });
    run("prolongation", 50, &|r| {
        let gens = vec![
            Symbol::indep("x"),
            Symbol::indep("t"),
            Symbol::jet("u", &[]),
            Symbol::jet("v", &[]),
        ];
        let field = || {
            prop::collection::vec(tree(gens.clone(), 2, true), 4)
                .prop_map(|c| VectorField::new(c[..2].to_vec(), c[2..].to_vec()))
        };
        r.run(&(rational(), field(), field()), |(a, x, y)| {
            let comb = VectorField::linear_combination(&[(a.clone(), &x), (Expr::one(), &y)]);
            let (px, py, pc) = (
                prolong(&x, &s, 2).unwrap(),
                prolong(&y, &s, 2).unwrap(),
                prolong(&comb, &s, 2).unwrap(),
            );
            for dep in ["u", "v"] {
                for j in s.jets_of(dep, 2) {
                    prop_assert!(zero(
                        pc.coefficient(&j) - a.clone() * px.coefficient(&j) - py.coefficient(&j)
                    ));
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
    });
    check(
        failures.is_empty(),
        if failures.is_empty() {
            "commutation 100, Leibniz 100, Euler 50, prolongation 50 cases zero".into()
        } else {
            failures.join("; ")
        },
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 8] = [
        ("multiplier check", multipliers),
        ("conservation laws", conservation_laws),
        ("symmetries", symmetries),
        ("association", association),
        ("reduction identities", reduction),
        ("solutions", solutions),
        ("numeric oracle", numeric_oracle),
        ("engine properties", engine_properties),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = f();
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {} {tag} {name}: {detail}", i + 1);
        if outcome.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria {failed:?}");
}
