use nsppt_sdp::{sdpa, solve, BlockKind, ConicProgram, Functional, Relation, Sense, SolverOptions};
use proptest::prelude::*;

/// `max <C, X>` over 2x2 density matrices; the optimum is the top eigenvalue of `C`.
fn top_eigenvalue_program(a: f64, b: f64, c: f64) -> ConicProgram {
    let mut p = ConicProgram::new(Sense::Maximize);
    let x = p.add_block("x", 2, BlockKind::Psd);
    p.objective = Functional::new().with(x, 0, 0, a).with(x, 0, 1, b).with(x, 1, 1, c);
    p.add_constraint(Functional::new().with(x, 0, 0, 1.0).with(x, 1, 1, 1.0), Relation::Eq, 1.0);
    p
}

fn top_eigenvalue(a: f64, b: f64, c: f64) -> f64 {
    (a + c) / 2.0 + (((a - c) / 2.0).powi(2) + b * b).sqrt()
}

/// A strictly feasible program with a PSD and a diagonal block: the identity
/// satisfies every row, and the trace row bounds the feasible set.
fn random_program(sides: (usize, usize), rows: &[Vec<f64>], objective: &[f64]) -> ConicProgram {
    let mut p = ConicProgram::new(Sense::Maximize);
    let x = p.add_block("x", sides.0, BlockKind::Psd);
    let y = p.add_block("y", sides.1, BlockKind::Diagonal);
    let entries: Vec<(usize, usize, usize)> = (0..sides.0)
        .flat_map(|r| (r..sides.0).map(move |c| (x, r, c)))
        .chain((0..sides.1).map(|i| (y, i, i)))
        .collect();
    let functional = |coef: &[f64]| {
        let mut f = Functional::new();
        for (&(b, r, c), &v) in entries.iter().zip(coef) {
            f.push(b, r, c, v);
        }
        f
    };
    p.objective = functional(objective);
    let mut trace = Functional::new();
    for i in 0..sides.0 {
        trace.push(x, i, i, 1.0);
    }
    for i in 0..sides.1 {
        trace.push(y, i, i, 1.0);
    }
    p.add_constraint(trace, Relation::Eq, (sides.0 + sides.1) as f64);
    for row in rows {
        let f = functional(row);
        let identity = [identity(sides.0), identity(sides.1)];
        let rhs = f.evaluate(&identity, &[sides.0, sides.1]);
        p.add_constraint(f, Relation::Eq, rhs);
    }
    p
}

fn identity(n: usize) -> Vec<f64> {
    (0..n * n).map(|k| if k % (n + 1) == 0 { 1.0 } else { 0.0 }).collect()
}

fn coefficients(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n)
}

fn program_strategy() -> impl Strategy<Value = ConicProgram> {
    (1usize..4, 1usize..3).prop_flat_map(|(s, t)| {
        let n = s * (s + 1) / 2 + t;
        (Just((s, t)), prop::collection::vec(coefficients(n), 0..3), coefficients(n))
            .prop_map(|(sides, rows, obj)| random_program(sides, &rows, &obj))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matches_closed_form(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
        let r = solve(&top_eigenvalue_program(a, b, c), &SolverOptions::default()).unwrap();
        prop_assert!(r.is_optimal());
        prop_assert!((r.primal_value - top_eigenvalue(a, b, c)).abs() <= 1e-6);
    }

    #[test]
    fn objective_scaling(p in program_strategy(), scale in 0.1f64..10.0) {
        let opts = SolverOptions::default();
        let base = solve(&p, &opts).unwrap();
        let scaled = solve(&p.scale_objective(scale), &opts).unwrap();
        prop_assert!(base.is_optimal() && scaled.is_optimal());
        let tol = 1e-6 * (1.0 + base.primal_value.abs()) * scale.max(1.0);
        prop_assert!((scaled.primal_value - scale * base.primal_value).abs() <= tol);
    }

    #[test]
    fn deterministic(p in program_strategy()) {
        let opts = SolverOptions::default();
        prop_assert_eq!(solve(&p, &opts).unwrap(), solve(&p, &opts).unwrap());
    }

    #[test]
    fn weak_duality_and_feasibility(p in program_strategy()) {
        let r = solve(&p, &SolverOptions::default()).unwrap();
        prop_assert!(r.is_optimal());
        prop_assert!(p.linear_residual(&r.blocks) <= 1e-6 * (1.0 + p.constraints.len() as f64));
        prop_assert!(r.dual_value - r.primal_value >= -1e-6 * (1.0 + r.primal_value.abs()));
    }

    #[test]
    fn sdpa_round_trip(p in program_strategy()) {
        let text = sdpa::export(&p).unwrap();
        let parsed = sdpa::parse(&text).unwrap();
        prop_assert_eq!(sdpa::export(&parsed).unwrap(), text);
        let opts = SolverOptions::default();
        let (a, b) = (solve(&p, &opts).unwrap(), solve(&parsed, &opts).unwrap());
        prop_assert!((a.primal_value - b.primal_value).abs() <= 1e-9 * (1.0 + a.primal_value.abs()));
    }
}
