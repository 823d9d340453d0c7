use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::linalg::SymMatrix;
use crate::problems::random_convex_subproblem;
use crate::rng::SplitMix64;

const TOL: f64 = 1e-8;

fn solve(sp: &ConvexSubproblem) -> InnerSolution {
    solve_subproblem(sp, None, TOL, 500).unwrap()
}

fn ball_lp(c: &[f64]) -> ConvexSubproblem {
    let n = c.len();
    let obj = ConvexQuadratic::affine(c.to_vec(), 0.0);
    ConvexSubproblem::boxed(obj, vec![f64::NEG_INFINITY; n], vec![f64::INFINITY; n])
        .with_qc(ConvexQuadratic::scaled_norm(n, 1.0, vec![0.0; n], -0.5))
}

#[test]
fn box_qp_returns_interior_minimizer() {
    let c = [1.5, -2.0, 0.25, 9.0];
    let obj = ConvexQuadratic::scaled_norm(4, 1.0, c.iter().map(|v| -v).collect(), 0.0);
    let sp = ConvexSubproblem::boxed(obj, vec![-10.0; 4], vec![10.0; 4]);
    let sol = solve(&sp);
    assert_eq!(sol.status, InnerStatus::Optimal);
    for i in 0..4 {
        assert!((sol.z[i] - c[i]).abs() <= 1e-8, "{:?}", sol.z);
    }
    assert!(sol.kkt_residual <= TOL);
}

#[test]
fn ball_lp_matches_closed_form() {
    let c = [3.0, -4.0, 1.0];
    let norm = (9.0f64 + 16.0 + 1.0).sqrt();
    let sol = solve(&ball_lp(&c));
    assert_eq!(sol.status, InnerStatus::Optimal);
    for i in 0..3 {
        assert!((sol.z[i] + c[i] / norm).abs() <= 1e-8);
    }
    assert!((sol.lambda_qc[0] - norm).abs() <= 1e-8 * norm);
}

#[test]
fn small_example_first_subproblem() {
    let obj = ConvexQuadratic::affine(vec![-4.0, 1.0], 0.0);
    let qc = ConvexQuadratic::new(SymMatrix::diagonal(&[2.0, 0.0]), vec![0.0; 2], -4.0).unwrap();
    let sp = ConvexSubproblem::boxed(obj, vec![-3.0, -2.0], vec![3.0, 2.0]).with_qc(qc);
    let sol = solve(&sp);
    assert_eq!(sol.status, InnerStatus::Optimal);
    assert!((sol.z[0] - 2.0).abs() < 1e-7 && (sol.z[1] + 2.0).abs() < 1e-7);
    assert!((sp.objective_value(&sol.z) + 10.0).abs() < 1e-7);
    assert!(sol.lambda_qc[0] > 0.0);
}

#[test]
fn phase1_examples() {
    let lb = vec![-1.0, 2.0, f64::NEG_INFINITY, 0.0];
    let ub = vec![3.0, 4.0, 5.0, f64::INFINITY];
    let sp = ConvexSubproblem::boxed(ConvexQuadratic::zero(4), lb, ub);
    assert_eq!(
        phase1_point(&sp, TOL).unwrap(),
        Phase1Outcome::Point(vec![1.0, 3.0, 4.0, 1.0])
    );

    let n = 3;
    let sp = ConvexSubproblem::boxed(ConvexQuadratic::zero(n), vec![-10.0; n], vec![10.0; n])
        .with_qc(ConvexQuadratic::scaled_norm(n, 2.0, vec![0.0; n], -1.0));
    assert_eq!(
        phase1_point(&sp, TOL).unwrap(),
        Phase1Outcome::Point(vec![0.0; n])
    );

    let sp = ConvexSubproblem::boxed(ConvexQuadratic::zero(2), vec![0.0, -1.0], vec![1.0, 1.0])
        .with_ineq(Matrix::from_rows(&[[1.0, 0.0]], 2).unwrap(), vec![-1.0]);
    assert!(matches!(
        phase1_point(&sp, TOL).unwrap(),
        Phase1Outcome::Infeasible { .. }
    ));
    assert_eq!(solve(&sp).status, InnerStatus::Infeasible);
}

#[test]
fn phase1_moves_into_intersection() {
    // disc of radius 1 around (3, 0) intersected with x₁ ≤ 3.5
    let qc = ConvexQuadratic::scaled_norm(2, 1.0, vec![-3.0, 0.0], 4.0);
    let sp = ConvexSubproblem::boxed(ConvexQuadratic::zero(2), vec![-10.0; 2], vec![10.0; 2])
        .with_qc(qc.clone())
        .with_ineq(Matrix::from_rows(&[[1.0, 0.0]], 2).unwrap(), vec![3.5]);
    let Phase1Outcome::Point(z) = phase1_point(&sp, TOL).unwrap() else {
        panic!("expected a point");
    };
    assert!(qc.value(&z) < 0.0 && z[0] < 3.5);
}

#[test]
fn kkt_residual_examples() {
    let c = [1.0, 2.0];
    let sp = ball_lp(&c);
    let norm = 5.0f64.sqrt();
    let exact = InnerSolution {
        z: vec![-1.0 / norm, -2.0 / norm],
        lambda_qc: vec![norm],
        mult_lin: LinearMultipliers::zeros(&sp),
        status: InnerStatus::Optimal,
        kkt_residual: 0.0,
        iterations: 0,
        central_path: vec![],
        infeasibility: None,
    };
    assert!(inner_kkt_residual(&sp, &exact) <= 1e-12);

    let mut neg = exact.clone();
    neg.lambda_qc[0] = -0.5;
    assert!(inner_kkt_residual(&sp, &neg) >= 0.5);

    // free coordinate of an unconstrained quadratic: gradient changes by 1e-3·Q
    let obj = ConvexQuadratic::scaled_norm(2, 4.0, vec![0.0; 2], 0.0);
    let sp = ConvexSubproblem::boxed(obj, vec![f64::NEG_INFINITY; 2], vec![f64::INFINITY; 2]);
    let sol = InnerSolution {
        z: vec![1e-3, 0.0],
        lambda_qc: vec![],
        mult_lin: LinearMultipliers::zeros(&sp),
        ..exact
    };
    let r = inner_kkt_residual(&sp, &sol);
    assert!((4e-3 / (1.0 + 4e-3) * 0.999..=4e-3 * 1.001).contains(&r));
}

#[test]
fn equality_constrained_qp() {
    // min ½‖z‖² s.t. z₁ + z₂ + z₃ = 3 has z = (1,1,1), η = −1
    let obj = ConvexQuadratic::scaled_norm(3, 1.0, vec![0.0; 3], 0.0);
    let sp = ConvexSubproblem::boxed(obj, vec![-10.0; 3], vec![10.0; 3])
        .with_eq(Matrix::from_rows(&[[1.0, 1.0, 1.0]], 3).unwrap(), vec![3.0]);
    let sol = solve(&sp);
    assert_eq!(sol.status, InnerStatus::Optimal);
    for v in &sol.z {
        assert!((v - 1.0).abs() < 1e-8);
    }
    assert!((sol.mult_lin.eq[0] + 1.0).abs() < 1e-7);
}

#[test]
fn fixed_coordinate_is_respected() {
    let obj = ConvexQuadratic::scaled_norm(2, 1.0, vec![-5.0, -5.0], 0.0);
    let sp = ConvexSubproblem::boxed(obj, vec![1.0, -10.0], vec![1.0, 10.0]);
    let sol = solve(&sp);
    assert_eq!(sol.status, InnerStatus::Optimal);
    assert_eq!(sol.z[0], 1.0);
    assert!((sol.z[1] - 5.0).abs() < 1e-8);
    // ∂f/∂z₁ = 1 − 5 = −4 is balanced by the upper-bound multiplier
    assert!((sol.mult_lin.upper[0] - 4.0).abs() < 1e-7);
}

#[test]
fn inconsistent_equalities_are_infeasible() {
    let sp = ConvexSubproblem::boxed(ConvexQuadratic::zero(2), vec![-1.0; 2], vec![1.0; 2])
        .with_eq(
            Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]], 2).unwrap(),
            vec![0.0, 1.0],
        );
    let sol = solve(&sp);
    assert_eq!(sol.status, InnerStatus::Infeasible);
    assert!(sol.infeasibility.unwrap() > 0.1);
}

#[test]
fn unbounded_problem_is_not_optimal() {
    let sp = ConvexSubproblem::boxed(
        ConvexQuadratic::affine(vec![1.0], 0.0),
        vec![f64::NEG_INFINITY],
        vec![f64::INFINITY],
    );
    assert_ne!(solve(&sp).status, InnerStatus::Optimal);
}

#[test]
fn strictly_feasible_warm_start_is_used() {
    let sp = ball_lp(&[1.0, 1.0]);
    let cold = solve(&sp);
    let warm = solve_subproblem(&sp, Some(&[-0.5, -0.5]), TOL, 500).unwrap();
    assert_eq!(warm.status, InnerStatus::Optimal);
    for i in 0..2 {
        assert!((cold.z[i] - warm.z[i]).abs() < 1e-8);
    }
}

#[test]
fn repeated_solves_are_bit_identical() {
    let sp = random_convex_subproblem(12, 77);
    let a = solve(&sp);
    let b = solve(&sp);
    assert_eq!(a, b);
    let mut reused = BarrierSolver::new(InnerOptions::default());
    let c = reused.solve(&random_convex_subproblem(5, 1), None).unwrap();
    let d = reused.solve(&sp, None).unwrap();
    assert_eq!(d, a);
    assert_eq!(c.status, InnerStatus::Optimal);
}

/// Random point of the subproblem's feasible set near `z`, or `None`.
fn feasible_sample(sp: &ConvexSubproblem, z: &[f64], rng: &mut SplitMix64) -> Option<Vec<f64>> {
    let n = sp.dim_total;
    // directions in the null space of E keep equality rows satisfied
    let mut d: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
    for i in 0..n {
        if sp.lb[i] == sp.ub[i] {
            d[i] = 0.0;
        }
    }
    for r in 0..sp.lin_eq.len() {
        let row = sp.lin_eq.a.row(r);
        let free: Vec<usize> = (0..n).filter(|&i| sp.lb[i] != sp.ub[i]).collect();
        let nn: f64 = free.iter().map(|&i| row[i] * row[i]).sum();
        if nn > 0.0 {
            let proj: f64 = free.iter().map(|&i| row[i] * d[i]).sum::<f64>() / nn;
            for &i in &free {
                d[i] -= proj * row[i];
            }
        }
    }
    let y: Vec<f64> = if rng.next_f64() < 0.5 {
        // perturbation of z along d
        let scale = 10f64.powf(rng.uniform(-6.0, 0.5));
        z.iter().zip(&d).map(|(a, b)| a + scale * b).collect()
    } else {
        // segment toward a point near the origin, which is strictly feasible
        // for every corpus instance
        let theta = 10f64.powf(rng.uniform(-6.0, 0.0));
        z.iter()
            .zip(&d)
            .map(|(a, b)| a + theta * (0.01 * b - a))
            .collect()
    };
    let viol = sp.primal_violation(&y);
    (viol <= 1e-12 && ineq_ok(sp, &y)).then_some(y)
}

fn ineq_ok(sp: &ConvexSubproblem, y: &[f64]) -> bool {
    sp.qcs.iter().all(|c| c.value(y) <= 0.0)
        && sp
            .lin_ineq
            .a
            .mul_vec(y)
            .iter()
            .zip(&sp.lin_ineq.b)
            .all(|(a, b)| a <= b)
        && (0..y.len()).all(|i| sp.lb[i] <= y[i] && y[i] <= sp.ub[i])
}

#[test]
fn random_corpus_self_check_and_certificate() {
    let mut solver = BarrierSolver::new(InnerOptions::default());
    let mut rng = SplitMix64::new(2024);
    let mut checked = 0;
    for seed in 0..200u64 {
        let n = 2 + (seed as usize * 7) % 49;
        let sp = random_convex_subproblem(n, seed);
        let sol = solver.solve(&sp, None).unwrap();
        assert_eq!(sol.status, InnerStatus::Optimal, "seed {seed} n {n}");
        assert!(
            sol.kkt_residual <= TOL,
            "seed {seed}: residual {:e}",
            sol.kkt_residual
        );
        assert!(sol.lambda_qc.iter().all(|&l| l >= 0.0));
        let f = sp.objective_value(&sol.z);
        let mut found = 0;
        for _ in 0..10_000 {
            if found == 100 {
                break;
            }
            if let Some(y) = feasible_sample(&sp, &sol.z, &mut rng) {
                found += 1;
                assert!(sp.objective_value(&y) >= f - 1e-7, "seed {seed}");
            }
        }
        checked += found;
        let path = &sol.central_path;
        for w in path.windows(2) {
            assert!(
                w[1] <= w[0] + 1e-9 * (1.0 + w[0].abs()),
                "seed {seed}: path {path:?}"
            );
        }
    }
    assert!(checked >= 100 * 150, "only {checked} feasible samples");
}
