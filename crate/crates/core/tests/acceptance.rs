//! End-to-end acceptance suite. Prints one line per criterion and exits
//! nonzero if any criterion fails.
#![allow(clippy::needless_range_loop)]

use std::process::ExitCode;
use std::time::{Duration, Instant};

use scpdc_core::inner::{BarrierSolver, ConvexSubproblem, InnerOptions, InnerStatus};
use scpdc_core::problems::{
    build_dca_comparison, build_mpcc, build_small_example, gen_random_mpcc, gen_random_ncvqcqp,
    mpcc_oracle, random_convex_subproblem, SmallCase,
};
use scpdc_core::rng::SplitMix64;
use scpdc_core::scp::{
    build_scp_subproblem, check_descent, dc_feasible_start, project_onto_omega, solve_dca,
    solve_rscp, solve_scp, Algorithm, MuUpdate, SolveReport, SolveStatus, SolverConfig, Variant,
};
use scpdc_core::{ConvexQuadratic, DCProgram, Matrix};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

/// Every run of the suite, kept for the cross-cutting checks.
#[derive(Default)]
struct Runs {
    descent: Vec<(String, DCProgram, SolveReport)>,
    converged: Vec<(String, f64, SolveReport)>,
}

impl Runs {
    fn keep(&mut self, name: String, p: &DCProgram, eps: f64, r: &SolveReport, descent: bool) {
        if r.status == SolveStatus::ConvergedStationary {
            self.converged.push((name.clone(), eps, r.clone()));
        }
        if descent {
            self.descent.push((name, p.clone(), r.clone()));
        }
    }
}

fn cfg(eps: f64) -> SolverConfig {
    SolverConfig {
        eps,
        ..SolverConfig::default()
    }
}

fn max_g(p: &DCProgram, x: &[f64]) -> f64 {
    p.constraint_values(x)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

fn criterion1(runs: &mut Runs) -> Outcome {
    let target = [2.0 * 2f64.sqrt(), -2.0];
    let clock = Instant::now();
    let mut notes = Vec::new();
    let mut pass = true;
    for (case, want) in [(SmallCase::Case1, 2), (SmallCase::Case2, 4)] {
        let p = build_small_example(case);
        let c = cfg(1e-5);
        match solve_scp(&p, &[0.0, 0.0], &c) {
            Ok(r) => {
                let dist = ((r.final_x[0] - target[0]).powi(2)
                    + (r.final_x[1] - target[1]).powi(2))
                .sqrt();
                let ok = r.status == SolveStatus::ConvergedStationary
                    && r.iter_count() == want
                    && dist <= 1e-3;
                pass &= ok;
                notes.push(format!("{case:?} iter={} dist={dist:.1e}", r.iter_count()));
                runs.keep(format!("small {case:?}"), &p, c.eps, &r, true);
            }
            Err(e) => {
                pass = false;
                notes.push(format!("{case:?} error {e}"));
            }
        }
    }
    let t = clock.elapsed();
    pass &= t < Duration::from_secs(1);
    Outcome::new(
        pass,
        format!("{}, {:.3}s", notes.join(", "), t.as_secs_f64()),
    )
}

fn criterion2(runs: &mut Runs) -> Outcome {
    let clock = Instant::now();
    let c = cfg(1e-6);
    let mut worst = f64::NEG_INFINITY;
    let mut failures = Vec::new();
    let mut iterates = 0;
    for seed in 1..=50u64 {
        let n = [10, 20, 30, 40, 50][(seed as usize - 1) % 5];
        let m2 = if seed % 2 == 0 { 10 } else { 5 };
        let p = gen_random_ncvqcqp(n, m2, seed);
        let x0 = match dc_feasible_start(&p, &vec![0.0; n], &c) {
            Ok(Some(x)) => x,
            Ok(None) => {
                failures.push(format!("seed {seed}: no feasible start"));
                continue;
            }
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        match solve_scp(&p, &x0, &c) {
            Ok(r) => {
                for rec in r.iterations.iter() {
                    let g = max_g(&p, &rec.x);
                    worst = worst.max(g);
                    iterates += 1;
                    if g > 1e-7 {
                        failures.push(format!("seed {seed} k={} g={g:.2e}", rec.k));
                    }
                }
                if r.status == SolveStatus::SubproblemInfeasible
                    || r.status == SolveStatus::NumericalFailure
                {
                    failures.push(format!("seed {seed}: {}", r.status.as_str()));
                }
                runs.keep(format!("ncvqcqp seed {seed}"), &p, c.eps, &r, true);
            }
            Err(e) => failures.push(format!("seed {seed}: {e}")),
        }
    }
    let t = clock.elapsed();
    let pass = failures.is_empty() && t < Duration::from_secs(120);
    let mut detail = format!(
        "50 instances, {iterates} iterates, max g = {worst:.2e}, {:.1}s",
        t.as_secs_f64()
    );
    if !failures.is_empty() {
        detail += &format!("; {}", failures.join("; "));
    }
    Outcome::new(pass, detail)
}

fn criterion3(runs: &mut Runs) -> Outcome {
    let c = SolverConfig {
        mu0: 0.1,
        mu_update: MuUpdate::Fixed,
        ..cfg(1e-6)
    };
    for seed in 1..=20u64 {
        let n = [10, 20, 30][(seed as usize - 1) % 3];
        let p = gen_random_ncvqcqp(n, 5, 100 + seed);
        match solve_rscp(&p, &vec![0.0; n], &c) {
            Ok(r) => runs.keep(
                format!("rscp ncvqcqp seed {}", 100 + seed),
                &p,
                c.eps,
                &r,
                true,
            ),
            Err(e) => return Outcome::new(false, format!("seed {}: {e}", 100 + seed)),
        }
    }
    let mut checked = 0;
    let mut failures = Vec::new();
    for (name, p, r) in &runs.descent {
        let mut prev = &r.start;
        for rec in &r.iterations {
            let d = check_descent(prev, rec, p);
            checked += 1;
            if !d.ok {
                failures.push(format!(
                    "{name} k={} lhs={:.3e} rhs={:.3e}",
                    rec.k, d.lhs, d.rhs
                ));
            }
            prev = rec;
        }
    }
    let mut detail = format!("{} runs, {checked} steps checked", runs.descent.len());
    if !failures.is_empty() {
        detail += &format!("; {} failures: {}", failures.len(), failures.join("; "));
    }
    Outcome::new(failures.is_empty(), detail)
}

fn criterion5(runs: &mut Runs) -> Outcome {
    let clock = Instant::now();
    let c = SolverConfig {
        mu0: 0.1,
        mu_update: MuUpdate::Geometric {
            factor: 10.0,
            cap: 1e8,
        },
        max_iter: 500,
        ..cfg(1e-6)
    };
    let mut matched = 0;
    let mut local = 0;
    let mut failures = Vec::new();
    for seed in 1..=20u64 {
        let nx = 1 + (seed as usize - 1) % 6;
        let ny = (seed as usize) % 3;
        let d = gen_random_mpcc(nx, ny, seed);
        let (p, idx) = match build_mpcc(&d) {
            Ok(v) => v,
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        let oracle = match mpcc_oracle(&d, 1e-9) {
            Ok(o) => o,
            Err(e) => {
                failures.push(format!("seed {seed}: oracle {e}"));
                continue;
            }
        };
        let r = match solve_rscp(&p, &vec![0.0; idx.dim()], &c) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        runs.keep(format!("mpcc seed {seed}"), &p, c.eps, &r, false);
        let f = r.final_f();
        let gap = idx.complementarity_gap(&r.final_x);
        let stationary = r.status == SolveStatus::ConvergedStationary
            && r.kkt_fixed_point_residual
                .is_some_and(|v| v <= 10.0 * c.eps);
        if (f - oracle.f_star).abs() <= 1e-4 && gap <= 1e-6 {
            matched += 1;
        } else if stationary && gap <= 1e-6 && f >= oracle.f_star - 1e-6 {
            local += 1;
        } else {
            failures.push(format!(
                "seed {seed}: f={f:.6} f*={:.6} gap={gap:.1e} status={}",
                oracle.f_star,
                r.status.as_str()
            ));
        }
    }
    let t = clock.elapsed();
    let pass = failures.is_empty() && t < Duration::from_secs(300);
    let mut detail = format!(
        "{matched} match the oracle, {local} stationary local, {:.1}s",
        t.as_secs_f64()
    );
    if !failures.is_empty() {
        detail += &format!("; {}", failures.join("; "));
    }
    Outcome::new(pass, detail)
}

fn criterion6(runs: &mut Runs) -> Outcome {
    let c = SolverConfig {
        mu0: 0.1,
        mu_update: MuUpdate::Geometric {
            factor: 10.0,
            cap: 1e8,
        },
        max_iter: 500,
        ..cfg(1e-6)
    };
    let mut solver = BarrierSolver::new(InnerOptions {
        tol: c.inner_tol,
        max_newton: c.max_newton,
    });
    let mut used = 0;
    let mut failures = Vec::new();
    for seed in 1..=40u64 {
        if used == 10 {
            break;
        }
        let nx = 2 + (seed as usize) % 4;
        let d = gen_random_mpcc(nx, 1, 1000 + seed);
        let (p, idx) = build_mpcc(&d).expect("valid data");
        // x and z both positive in every coordinate
        let mut guess = vec![0.0; idx.dim()];
        for i in idx.x.clone() {
            guess[i] = 2.0;
        }
        for i in idx.z.clone() {
            guess[i] = 2.0;
        }
        let Ok(w0) = project_onto_omega(&p, &guess, &c) else {
            continue;
        };
        let xz: f64 = idx
            .x
            .clone()
            .zip(idx.z.clone())
            .map(|(i, j)| w0[i] * w0[j])
            .sum();
        if xz <= 0.0 {
            continue;
        }
        let sp = build_scp_subproblem(&p, &w0, Variant::Plain, false).expect("w0 in Omega");
        let plain = solver.solve(&sp, Some(&w0)).expect("valid subproblem");
        if plain.status != InnerStatus::Infeasible {
            continue;
        }
        used += 1;
        match solve_rscp(&p, &w0, &c) {
            Ok(r) => {
                let all_optimal = r
                    .iterations
                    .iter()
                    .all(|rec| rec.inner_status == InnerStatus::Optimal);
                let s_last = r.final_s.iter().map(|s| s * s).sum::<f64>().sqrt();
                let raised = r.iterations.last().map_or(c.mu0, |rec| rec.mu_used);
                if !(all_optimal && r.status == SolveStatus::ConvergedStationary && s_last <= 1e-6)
                {
                    failures.push(format!(
                        "seed {}: status={} ‖s‖={s_last:.1e} mu={raised:e}",
                        1000 + seed,
                        r.status.as_str()
                    ));
                }
                runs.keep(
                    format!("relaxed mpcc seed {}", 1000 + seed),
                    &p,
                    c.eps,
                    &r,
                    false,
                );
            }
            Err(e) => failures.push(format!("seed {}: {e}", 1000 + seed)),
        }
    }
    let pass = failures.is_empty() && used >= 5;
    let mut detail = format!("{used} instances with infeasible plain subproblem at w0");
    if !failures.is_empty() {
        detail += &format!("; {}", failures.join("; "));
    }
    Outcome::new(pass, detail)
}

fn criterion7(runs: &mut Runs) -> Outcome {
    let p = build_dca_comparison();
    // DCA contracts by about μ/(1+μ) per step, so its distance to the limit
    // is roughly (1+μ)·step; a tight ε is needed for a 1e-5 residual
    let c = SolverConfig {
        max_iter: 20_000,
        ..cfg(1e-8)
    };
    let x0 = [3.0, -1.0];
    let scp = match solve_scp(&p, &x0, &c) {
        Ok(r) => r,
        Err(e) => return Outcome::new(false, format!("scp: {e}")),
    };
    let dca = match solve_dca(&p, &x0, 100.0, &c) {
        Ok(r) => r,
        Err(e) => return Outcome::new(false, format!("dca: {e}")),
    };
    runs.keep("dca comparison scp".into(), &p, c.eps, &scp, true);
    runs.keep("dca comparison dca".into(), &p, c.eps, &dca, false);
    let mut monotone = true;
    let mut prev = dca.start.f_mu_val;
    for rec in &dca.iterations {
        monotone &= rec.f_mu_val <= prev + 1e-6 * (1.0 + prev.abs());
        prev = rec.f_mu_val;
    }
    let res = |r: &SolveReport| r.kkt_fixed_point_residual.unwrap_or(f64::INFINITY);
    let pass = scp.status == SolveStatus::ConvergedStationary
        && dca.status == SolveStatus::ConvergedStationary
        && dca.iter_count() >= scp.iter_count()
        && res(&scp) <= 1e-5
        && res(&dca) <= 1e-5
        && monotone;
    Outcome::new(
        pass,
        format!(
            "iter dca={} scp={}, residual dca={:.1e} scp={:.1e}, phi monotone={monotone}",
            dca.iter_count(),
            scp.iter_count(),
            res(&dca),
            res(&scp)
        ),
    )
}

fn criterion4(runs: &Runs) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    let mut dca_ratio: f64 = 0.0;
    let mut counted = 0;
    for (name, eps, r) in &runs.converged {
        if r.algorithm == Algorithm::Dca {
            // the certificate is built from the SCP subproblem; DCA runs are
            // reported but not held to it
            if let Some(v) = r.kkt_fixed_point_residual {
                dca_ratio = dca_ratio.max(v / eps);
            }
            continue;
        }
        counted += 1;
        match r.kkt_fixed_point_residual {
            Some(v) => {
                worst = worst.max(v / eps);
                if v > 10.0 * eps {
                    failures.push(format!("{name}: {v:.2e}"));
                }
            }
            None => failures.push(format!("{name}: residual unavailable")),
        }
    }
    let mut detail = format!(
        "{counted} converged SCP/rSCP runs, worst residual/eps = {worst:.2e}; \
         DCA runs (not held to it) residual/eps = {dca_ratio:.1e}"
    );
    if !failures.is_empty() {
        detail += &format!("; {}", failures.join("; "));
    }
    Outcome::new(failures.is_empty(), detail)
}

fn criterion8() -> Outcome {
    let mut solver = BarrierSolver::new(InnerOptions {
        tol: 1e-10,
        max_newton: 500,
    });
    let mut notes = Vec::new();
    let mut pass = true;

    // min cᵀz over ‖z‖ ≤ 1: z = −c/‖c‖
    let cvec = [3.0, -4.0, 12.0];
    let norm = 13.0;
    let sp = ConvexSubproblem::boxed(
        ConvexQuadratic::affine(cvec.to_vec(), 0.0),
        vec![f64::NEG_INFINITY; 3],
        vec![f64::INFINITY; 3],
    )
    .with_qc(ConvexQuadratic::scaled_norm(3, 2.0, vec![0.0; 3], -1.0));
    let sol = solver.solve(&sp, None).expect("valid");
    let err = (0..3)
        .map(|i| (sol.z[i] + cvec[i] / norm).abs())
        .fold(0.0, f64::max);
    pass &= sol.status == InnerStatus::Optimal && err <= 1e-8;
    notes.push(format!("ball LP err={err:.1e}"));

    // min ½‖z − c‖² over [0,1]³: clip
    let target: [f64; 3] = [1.7, -0.3, 0.4];
    let sp = ConvexSubproblem::boxed(
        ConvexQuadratic::scaled_norm(3, 1.0, target.iter().map(|v| -v).collect(), 0.0),
        vec![0.0; 3],
        vec![1.0; 3],
    );
    let sol = solver.solve(&sp, None).expect("valid");
    let err = (0..3)
        .map(|i| (sol.z[i] - target[i].clamp(0.0, 1.0)).abs())
        .fold(0.0, f64::max);
    pass &= sol.status == InnerStatus::Optimal && err <= 1e-8;
    notes.push(format!("box QP err={err:.1e}"));

    let mut solver = BarrierSolver::new(InnerOptions {
        tol: 1e-8,
        max_newton: 500,
    });
    let mut worst_kkt: f64 = 0.0;
    let mut worst_gap = f64::INFINITY;
    let mut bad = Vec::new();
    for seed in 0..200u64 {
        let n = 2 + ((seed * 7) % 49) as usize;
        let sp = random_convex_subproblem(n, seed);
        let sol = match solver.solve(&sp, None) {
            Ok(s) => s,
            Err(e) => {
                bad.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        worst_kkt = worst_kkt.max(sol.kkt_residual);
        if sol.status != InnerStatus::Optimal || sol.kkt_residual > 1e-8 {
            bad.push(format!(
                "seed {seed}: {} kkt={:.1e}",
                sol.status.as_str(),
                sol.kkt_residual
            ));
            continue;
        }
        let f = sp.objective_value(&sol.z);
        let mut rng = SplitMix64::new(seed ^ 0x5eed);
        let mut found = 0;
        let mut tries = 0;
        while found < 100 && tries < 20_000 {
            tries += 1;
            let Some(cand) = feasible_sample(&sp, &sol.z, &mut rng) else {
                continue;
            };
            found += 1;
            worst_gap = worst_gap.min(sp.objective_value(&cand) - f);
        }
        if found < 100 {
            bad.push(format!("seed {seed}: only {found} feasible samples"));
        }
    }
    pass &= bad.is_empty() && worst_gap >= -1e-7;
    notes.push(format!(
        "200 QCQPs worst kkt={worst_kkt:.1e} min(sample − opt)={worst_gap:.1e}"
    ));
    let mut detail = notes.join(", ");
    if !bad.is_empty() {
        detail += &format!("; {}", bad.join("; "));
    }
    Outcome::new(pass, detail)
}

/// A random feasible point: a uniform point on a random chord through the
/// origin (strictly feasible for every corpus instance), then pulled toward
/// `z` by a log-uniform factor so that points near the optimum are covered.
fn feasible_sample(sp: &ConvexSubproblem, z: &[f64], rng: &mut SplitMix64) -> Option<Vec<f64>> {
    let n = z.len();
    let mut d: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
    for i in 0..n {
        if sp.lb[i] == sp.ub[i] {
            d[i] = 0.0;
        }
    }
    project_null(&sp.lin_eq.a, &mut d);
    let reach = max_step(sp, &d);
    let t = 0.999 * reach * rng.next_f64();
    let theta = if rng.next_f64() < 0.5 {
        1.0
    } else {
        10f64.powf(rng.uniform(-6.0, 0.0))
    };
    let y: Vec<f64> = (0..n)
        .map(|i| theta * t * d[i] + (1.0 - theta) * z[i])
        .collect();
    let ok = sp.qcs.iter().all(|c| c.value(&y) <= 0.0)
        && sp
            .lin_ineq
            .a
            .mul_vec(&y)
            .iter()
            .zip(&sp.lin_ineq.b)
            .all(|(a, b)| a <= b)
        && (0..n).all(|i| sp.lb[i] <= y[i] && y[i] <= sp.ub[i])
        && sp.primal_violation(&y) <= 1e-12;
    ok.then_some(y)
}

/// Largest `t` with `t·d` feasible, capped at 10⁶.
fn max_step(sp: &ConvexSubproblem, d: &[f64]) -> f64 {
    let n = d.len();
    let zero = vec![0.0; n];
    let minus: Vec<f64> = d.iter().map(|v| -v).collect();
    let mut t: f64 = 1e6;
    for c in &sp.qcs {
        let c0 = c.value(&zero);
        let (cp, cm) = (c.value(d), c.value(&minus));
        let a = 0.5 * (cp + cm) - c0;
        let b = 0.5 * (cp - cm);
        let root = if a > 1e-300 {
            (-b + (b * b - 4.0 * a * c0).sqrt()) / (2.0 * a)
        } else if b > 0.0 {
            -c0 / b
        } else {
            f64::INFINITY
        };
        t = t.min(root);
    }
    for (ad, b) in sp.lin_ineq.a.mul_vec(d).iter().zip(&sp.lin_ineq.b) {
        if *ad > 0.0 {
            t = t.min(b / ad);
        }
    }
    for i in 0..n {
        if d[i] > 0.0 {
            t = t.min(sp.ub[i] / d[i]);
        } else if d[i] < 0.0 {
            t = t.min(sp.lb[i] / d[i]);
        }
    }
    t
}

fn project_null(e: &Matrix, d: &mut [f64]) {
    // Gram-Schmidt on the rows, then remove their span.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for r in 0..e.rows() {
        let mut v = e.row(r).to_vec();
        for b in &basis {
            let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv > 1e-12 {
            v.iter_mut().for_each(|x| *x /= nv);
            basis.push(v);
        }
    }
    for b in &basis {
        let c: f64 = d.iter().zip(b).map(|(x, y)| x * y).sum();
        d.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
    }
}

fn main() -> ExitCode {
    let mut runs = Runs::default();
    // 3 and 4 inspect the runs collected by the others
    let mut results: Vec<(usize, Outcome)> = vec![
        (1, criterion1(&mut runs)),
        (2, criterion2(&mut runs)),
        (5, criterion5(&mut runs)),
        (6, criterion6(&mut runs)),
        (7, criterion7(&mut runs)),
    ];
    results.push((3, criterion3(&mut runs)));
    results.push((4, criterion4(&runs)));
    results.push((8, criterion8()));
    results.sort_by_key(|(k, _)| *k);
    let mut failed = 0;
    for (k, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("criterion {k}: {tag}: {}", o.detail);
    }
    println!("criterion 9: NOTE: published tables depend on unpublished random data and external test sets; covered by criteria 2 to 7");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
