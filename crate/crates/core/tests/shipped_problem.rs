use std::time::Instant;

use nlse_core::jet::{association_residual, divergence_match, multiplier_condition, symmetry_invariance};
use nlse_core::problem::Problem;

#[test]
fn all_multipliers_conservation_laws_and_symmetries_verify() {
    let start = Instant::now();
    let p = Problem::cubic_nlse();
    let sys = p.system().unwrap();
    for m in &p.multipliers {
        let r = multiplier_condition(&m.value, &sys).unwrap();
        assert!(r.iter().all(|c| c.is_zero()), "{}: {r:?}", m.name);
    }
    for c in &p.conserved {
        let m = p.multiplier(&c.value.multiplier).unwrap();
        let r = divergence_match(&c.value.vector, m, &sys).unwrap();
        assert!(r.is_zero(), "{}: {r}", c.name);
    }
    for x in &p.symmetries {
        let r = symmetry_invariance(&x.value, &sys).unwrap();
        assert!(r.iter().all(|c| c.is_zero()), "{}: {r:?}", x.name);
    }
    eprintln!("elapsed {:?}", start.elapsed());
}

#[test]
fn association_matrix() {
    let p = Problem::cubic_nlse();
    let space = p.space();
    let expected = [
        ("X1", [true, true, true, false]),
        ("X2", [true, true, true, false]),
        ("X3", [true, true, true, true]),
        ("X4", [false, true, false, true]),
        ("X5", [false, false, false, true]),
    ];
    for (x, row) in expected {
        for (t, want) in p.conserved.iter().zip(row) {
            let r = association_residual(p.symmetry(x).unwrap(), &t.value.vector, &space).unwrap();
            assert_eq!(r.iter().all(|c| c.is_zero()), want, "({x}, {})", t.name);
        }
    }
}
