//! Acceptance suite. Each test covers one acceptance criterion, prints one
//! PASS/FAIL line, and pins every tolerance in code:
//!
//! 1. closed-form coefficient recovery across the built-in library
//! 2. low-order value reproduction to all reference digits
//! 3. absolute-error grids within 1% relative (entries >= 1e-10) and a
//!    factor of 2 (floating-point-floor entries below 1e-10)
//! 4. control-term behavior, including the inapplicability window
//! 5. time-domain residual vanishing, structural and numeric
//! 6. transform laws on randomized series corpora
//! 7. special-function identities against independent oracles

use std::time::Instant;

use num::{One, Zero};

use lrps_core::engine::{evaluate, evaluate_truncated, residual_parts, solve};
use lrps_core::expr::{rat, rat_int, Expr, Rat};
use lrps_core::fpe::{builtin_example_with, ExampleId};
use lrps_core::series::{LaplaceSeries, TimeSeries};
use lrps_core::special::{exact_reference, gamma_fn, mittag_leffler, MlParams};

fn criterion(name: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("criterion {name}: PASS");
    } else {
        println!("criterion {name}: FAIL ({} issue(s))", failures.len());
    }
    assert!(
        failures.is_empty(),
        "criterion {name} failed:\n{}",
        failures.join("\n")
    );
}

fn solve_builtin(id: ExampleId, gamma: Rat) -> lrps_core::FpsSolution {
    let p = builtin_example_with(id, gamma, 8).unwrap();
    solve(&p).unwrap().0
}

/// Matching rule for reference absolute errors: 1% relative above 1e-10,
/// a factor of two at the floating-point floor below.
fn matches_abs_error(computed: f64, printed: f64) -> bool {
    if printed >= 1e-10 {
        ((computed - printed) / printed).abs() <= 0.01
    } else {
        computed > 0.0 && computed / printed <= 2.0 && printed / computed <= 2.0
    }
}

#[test]
fn criterion_1_coefficient_recovery() {
    let mut failures = Vec::new();
    let start = Instant::now();
    let gammas = [rat(1, 2), rat(3, 4), Rat::one()];
    type Family = Box<dyn Fn(usize) -> Expr>;
    let expected: Vec<(ExampleId, Family)> = vec![
        (
            ExampleId::Ex1,
            Box::new(|k| match k {
                0 => Expr::var(0),
                1 => Expr::one(),
                _ => Expr::zero(),
            }),
        ),
        (ExampleId::Ex2, Box::new(|_| Expr::var(0))),
        (ExampleId::Ex4, Box::new(|_| Expr::var(0))),
        (ExampleId::Ex5, Box::new(|_| Expr::var(0))),
        (
            ExampleId::Ex6,
            Box::new(|k| {
                let c = Expr::var(0).pow(2);
                if k % 2 == 0 {
                    c
                } else {
                    c.neg()
                }
            }),
        ),
        (ExampleId::Ex7, Box::new(|_| Expr::var(2))),
        (
            ExampleId::Ex8,
            Box::new(|_| Expr::affine_pow(2, rat_int(-1), 2)),
        ),
    ];
    for (id, family) in &expected {
        for gamma in &gammas {
            let sol = solve_builtin(*id, gamma.clone());
            for k in 0..=8 {
                let want = family(k);
                if sol.coefficients[k] != want {
                    failures.push(format!(
                        "{id:?} gamma {gamma}: p_{k} = {}, expected {want}",
                        sol.coefficients[k]
                    ));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() >= 5.0 {
        failures.push(format!("runtime {elapsed:?} exceeds 5 s"));
    }
    criterion("1 (coefficient recovery)", failures);
}

#[test]
fn criterion_2_low_order_values() {
    let mut failures = Vec::new();
    let p = builtin_example_with(ExampleId::Ex2, Rat::one(), 3).unwrap();
    let (sol, _) = solve(&p).unwrap();
    // (z, tau, reference value, reference decimal places)
    let cases = [
        (0.25, 0.01, 0.2525125417, 10),
        (0.50, 0.01, 0.5050250833, 10),
        (0.75, 0.01, 0.7575376250, 10),
        (1.00, 0.01, 1.010050167, 9),
        (0.25, 0.6, 0.45400000000, 11),
        (0.50, 0.6, 0.90800000000, 11),
        (0.75, 0.6, 1.36200000000, 11),
        (1.00, 0.6, 1.81600000000, 11),
    ];
    for (z, tau, printed, decimals) in cases {
        let got = evaluate(&sol, &[z], tau).unwrap();
        let tol = 0.5 * 10f64.powi(-decimals);
        if (got - printed).abs() > tol {
            failures.push(format!("({z}, {tau}): {got} vs reference {printed}"));
        }
    }
    criterion("2 (low-order truncation values)", failures);
}

#[test]
fn criterion_3_error_tables() {
    let mut failures = Vec::new();
    let mut check_errors = |id: ExampleId, point: &[f64], printed: &[(f64, f64)]| {
        let sol = solve_builtin(id, Rat::one());
        let exact_kind = lrps_core::fpe::builtin_exact(id).unwrap();
        for &(tau, expect) in printed {
            let v = evaluate(&sol, point, tau).unwrap();
            let ex = exact_reference(&exact_kind, point, tau, &Rat::one()).unwrap();
            let err = (v - ex).abs();
            if !matches_abs_error(err, expect) {
                failures.push(format!(
                    "{id:?} abs err at tau {tau}: {err:.4e} vs {expect:.4e}"
                ));
            }
        }
    };
    // K = 8 absolute errors at the half-coordinate point, gamma = 1
    check_errors(
        ExampleId::Ex2,
        &[0.5],
        &[
            (0.15, 5.373e-14),
            (0.30, 2.795e-11),
            (0.45, 1.091e-09),
            (0.60, 1.476e-08),
            (0.75, 1.117e-07),
            (0.90, 5.861e-07),
        ],
    );
    check_errors(
        ExampleId::Ex6,
        &[0.5, 0.5],
        &[
            (0.15, 2.609e-14),
            (0.30, 1.316e-11),
            (0.45, 4.987e-10),
            (0.60, 6.547e-09),
            (0.75, 4.809e-08),
            (0.90, 2.447e-07),
        ],
    );
    check_errors(
        ExampleId::Ex8,
        &[0.5, 0.5, 0.5],
        &[
            (0.15, 2.692e-14),
            (0.30, 1.397e-11),
            (0.45, 5.457e-10),
            (0.60, 7.383e-09),
            (0.75, 5.589e-08),
            (0.90, 2.930e-07),
        ],
    );

    // truncation-order sweeps: rows are (point, tau, err_k4, err_k6, err_k8)
    let mut check_sweep = |id: ExampleId, rows: &[(Vec<f64>, f64, [f64; 3])]| {
        let sol = solve_builtin(id, Rat::one());
        let exact_kind = lrps_core::fpe::builtin_exact(id).unwrap();
        for (point, tau, printed) in rows {
            let ex = exact_reference(&exact_kind, point, *tau, &Rat::one()).unwrap();
            for (oi, &order) in [4usize, 6, 8].iter().enumerate() {
                let v = evaluate_truncated(&sol, point, *tau, order).unwrap();
                let err = (v - ex).abs();
                if !matches_abs_error(err, printed[oi]) {
                    failures.push(format!(
                        "{id:?} K={order} at ({point:?}, {tau}): {err:.4e} vs {:.4e}",
                        printed[oi]
                    ));
                }
            }
        }
    };
    let taus = [0.1, 0.2, 0.3, 0.4, 0.5];
    let rows = |point: Vec<f64>,
                k4: [f64; 5],
                k6: [f64; 5],
                k8: [f64; 5]|
     -> Vec<(Vec<f64>, f64, [f64; 3])> {
        taus.iter()
            .enumerate()
            .map(|(i, &tau)| (point.clone(), tau, [k4[i], k6[i], k8[i]]))
            .collect()
    };
    let mut table: Vec<(Vec<f64>, f64, [f64; 3])> = rows(
        vec![0.5],
        [4.237e-08, 1.379e-06, 1.065e-05, 4.568e-05, 1.419e-04],
        [1.005e-11, 1.302e-09, 2.254e-08, 1.710e-07, 8.263e-07],
        [1.554e-15, 7.199e-13, 2.796e-11, 3.762e-10, 2.832e-09],
    );
    table.extend(rows(
        vec![1.0],
        [8.474e-08, 2.758e-06, 2.131e-05, 9.136e-05, 2.838e-04],
        [2.009e-11, 2.605e-09, 4.508e-08, 3.421e-07, 1.653e-06],
        [3.109e-15, 1.440e-12, 5.591e-11, 7.524e-10, 5.664e-09],
    ));
    check_sweep(ExampleId::Ex2, &table);

    let mut table = rows(
        vec![0.5, 0.5],
        [2.049e-08, 6.451e-07, 4.820e-06, 1.999e-05, 6.004e-05],
        [4.899e-12, 6.194e-10, 1.045e-08, 7.738e-08, 3.646e-07],
        [7.216e-16, 3.458e-13, 1.316e-11, 1.736e-10, 1.281e-09],
    );
    table.extend(rows(
        vec![1.0, 1.0],
        [8.196e-08, 2.580e-06, 1.928e-05, 7.995e-05, 2.402e-04],
        [1.960e-11, 2.478e-09, 4.182e-08, 3.095e-07, 1.458e-06],
        [2.887e-15, 1.383e-12, 5.266e-11, 6.945e-10, 5.125e-09],
    ));
    check_sweep(ExampleId::Ex6, &table);

    let mut table = rows(
        vec![0.5, 0.5, 0.5],
        [2.119e-08, 6.895e-07, 5.327e-06, 2.284e-05, 7.094e-05],
        [5.023e-12, 6.512e-10, 1.127e-08, 8.552e-08, 4.132e-07],
        [7.772e-16, 3.599e-13, 1.398e-11, 1.881e-10, 1.416e-09],
    );
    table.extend(rows(
        vec![0.75, 0.75, 0.75],
        [5.296e-09, 1.724e-07, 1.332e-06, 5.710e-06, 1.774e-05],
        [1.256e-12, 1.628e-10, 2.817e-09, 2.138e-08, 1.033e-07],
        [1.943e-16, 8.998e-14, 3.495e-12, 4.702e-11, 3.540e-10],
    ));
    check_sweep(ExampleId::Ex8, &table);

    criterion("3 (error tables)", failures);
}

#[test]
fn criterion_4_control_term_behavior() {
    let mut failures = Vec::new();

    // the solvable control problem: every coefficient is the shifted
    // initial datum, at every tested order
    let shifted = Expr::var(0).add(&Expr::int(2));
    for gamma in [rat(1, 2), rat(4, 5), Rat::one()] {
        let sol = solve_builtin(ExampleId::S6a, gamma.clone());
        for k in 0..=8 {
            if sol.coefficients[k] != shifted {
                failures.push(format!(
                    "s6a gamma {gamma}: p_{k} = {}",
                    sol.coefficients[k]
                ));
            }
        }
    }

    // the divergence window: step 3 fails for gamma strictly inside (2/3, 1)
    for gamma in [rat(7, 10), rat(4, 5), rat(9, 10)] {
        let p = builtin_example_with(ExampleId::S6b, gamma.clone(), 8).unwrap();
        match solve(&p) {
            Err(e) if e.inapplicable_step() == Some(3) => {}
            Err(e) => failures.push(format!("s6b gamma {gamma}: wrong failure {e}")),
            Ok(_) => failures.push(format!("s6b gamma {gamma}: unexpectedly solvable")),
        }
    }

    // at the window edge and at gamma = 1, a single coefficient survives
    let two_sin = Expr::sin_pi(0).scale(&rat_int(2));
    let sol = solve_builtin(ExampleId::S6b, rat(2, 3));
    if sol.coefficients[3] != two_sin {
        failures.push(format!("s6b gamma 2/3: p_3 = {}", sol.coefficients[3]));
    }
    let sol = solve_builtin(ExampleId::S6b, Rat::one());
    if sol.coefficients[2] != two_sin {
        failures.push(format!("s6b gamma 1: p_2 = {}", sol.coefficients[2]));
    }

    criterion("4 (control-term behavior)", failures);
}

#[test]
fn criterion_5_residual_suite() {
    let mut failures = Vec::new();
    for id in ExampleId::ALL {
        for gamma in [rat(1, 2), rat(3, 4), Rat::one()] {
            let problem = builtin_example_with(id, gamma.clone(), 8).unwrap();
            let sol = match solve(&problem) {
                Ok((sol, _)) => sol,
                Err(e) => {
                    // the divergence window is the one legitimate refusal
                    let in_window = id == ExampleId::S6b && gamma == rat(3, 4);
                    if !(in_window && e.inapplicable_step() == Some(3)) {
                        failures.push(format!("{id:?} gamma {gamma}: solve failed: {e}"));
                    }
                    continue;
                }
            };
            let parts = residual_parts(&sol).unwrap();
            let combined = parts.combined();
            if !combined.is_empty() {
                failures.push(format!(
                    "{id:?} gamma {gamma}: residual not structurally zero ({} entries)",
                    combined.len()
                ));
            }
            for (point, tau) in lrps_core::report::residual_sample_pairs(problem.dimension) {
                let defect = parts.eval_defect(&point, tau).unwrap().abs();
                if defect >= 1e-9 {
                    failures.push(format!(
                        "{id:?} gamma {gamma}: |residual| = {defect:.3e} at ({point:?}, {tau})"
                    ));
                }
            }
        }
    }
    criterion("5 (residual suite)", failures);
}

// -- deterministic generator for the randomized corpora ---------------------

struct SplitMix64(u64);

impl SplitMix64 {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

fn random_expr(rng: &mut SplitMix64, dim: usize) -> Expr {
    let mut acc = Expr::zero();
    let terms = 1 + rng.below(2);
    for _ in 0..terms {
        let coeff = rat(rng.below(11) as i64 - 5, 1 + rng.below(3) as i64);
        if coeff.is_zero() {
            continue;
        }
        let mut t = Expr::constant(coeff);
        for _ in 0..rng.below(3) {
            let var = rng.below(dim as u64) as usize;
            match rng.below(4) {
                0 => t = t.mul(&Expr::affine_pow(var, Rat::zero(), 1 + rng.below(2) as i64)),
                1 => t = t.mul(&Expr::affine_pow(var, rat_int(-1), -1)),
                2 => t = t.mul(&Expr::sin_pi(var)),
                _ => t = t.mul(&Expr::gamma_token(rat(3 + rng.below(4) as i64, 2), 1)),
            }
        }
        acc = acc.add(&t);
    }
    acc
}

fn random_grid_series(rng: &mut SplitMix64, max_entries: usize) -> TimeSeries {
    let gammas = [rat(1, 2), rat(3, 4), rat(2, 5), Rat::one()];
    let gamma = gammas[rng.below(4) as usize].clone();
    let dim = 1 + rng.below(2) as usize;
    let mut u = TimeSeries::new(dim, gamma.clone());
    for k in 0..=5u64 {
        if u.len() >= max_entries {
            break;
        }
        if rng.below(10) < 6 {
            u.insert(
                Rat::from_integer((k as i64).into()) * &gamma,
                random_expr(rng, dim),
            );
        }
    }
    u
}

#[test]
fn criterion_6_transform_laws() {
    let mut failures = Vec::new();
    let mut rng = SplitMix64(0x5eed_1234_abcd_0001);

    for i in 0..200 {
        let u = random_grid_series(&mut rng, 6);
        // transform law for the fractional derivative, shift-safe form:
        // s^-gamma L{D^gamma u} = L{u} - u(0)/s
        let lhs = u.caputo().unwrap().laplace().shift(&u.gamma);
        let mut initial = LaplaceSeries::new(u.dimension, u.gamma.clone());
        if let Some(u0) = u.get(&Rat::zero()) {
            initial.insert(Rat::one(), u0.clone());
        }
        let rhs = u.laplace().sub(&initial);
        if lhs != rhs {
            failures.push(format!(
                "derivative transform law failed on corpus item {i}"
            ));
        }
        // round trip
        if u.laplace().inverse() != u {
            failures.push(format!("transform round trip failed on corpus item {i}"));
        }
    }

    // Cauchy products against a brute-force convolution
    for i in 0..200 {
        let u = random_grid_series(&mut rng, 6);
        let mut v = TimeSeries::new(u.dimension, u.gamma.clone());
        for k in 0..=5u64 {
            if v.len() >= 6 {
                break;
            }
            if rng.below(10) < 6 {
                v.insert(
                    Rat::from_integer((k as i64).into()) * &u.gamma,
                    random_expr(&mut rng, u.dimension),
                );
            }
        }
        for cutoff in [rat_int(3), rat_int(100)] {
            let mut oracle = TimeSeries::new(u.dimension, u.gamma.clone());
            for (e1, c1) in u.iter() {
                for (e2, c2) in v.iter() {
                    let e = e1 + e2;
                    if e <= cutoff {
                        oracle.insert(e, c1.mul(c2));
                    }
                }
            }
            if u.product(&v, &cutoff) != oracle {
                failures.push(format!("product vs convolution oracle failed on pair {i}"));
            }
        }
    }

    criterion("6 (transform laws)", failures);
}

#[test]
fn criterion_7_special_functions() {
    let mut failures = Vec::new();

    // order-1 envelope equals the exponential
    let p = MlParams::new(Rat::one());
    for i in 0..=20 {
        let x = -1.0 + 0.1 * i as f64;
        let got = mittag_leffler(&p, x).unwrap();
        if ((got - x.exp()) / x.exp()).abs() > 1e-12 {
            failures.push(format!("E_1({x}) = {got}"));
        }
    }

    // half-order value against the erfc-identity quadrature oracle:
    // E_{1/2}(1) = e * (1 + erf(1)), erf by composite Simpson
    let n = 4000usize;
    let h = 1.0 / n as f64;
    let f = |t: f64| (-t * t).exp();
    let mut s = f(0.0) + f(1.0);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    let erf1 = 2.0 / std::f64::consts::PI.sqrt() * s * h / 3.0;
    let oracle = 1.0f64.exp() * (1.0 + erf1);
    let got = mittag_leffler(&MlParams::new(rat(1, 2)), 1.0).unwrap();
    if (got - oracle).abs() > 1e-10 {
        failures.push(format!("E_1/2(1) = {got}, oracle {oracle}"));
    }

    // Gamma recurrence on [0.5, 20]
    let mut x = 0.5;
    while x <= 20.0 {
        let lhs = gamma_fn(x + 1.0).unwrap();
        let rhs = x * gamma_fn(x).unwrap();
        if ((lhs - rhs) / rhs).abs() > 1e-12 {
            failures.push(format!("recurrence at {x}"));
        }
        x += 0.25;
    }

    criterion("7 (special functions)", failures);
}
