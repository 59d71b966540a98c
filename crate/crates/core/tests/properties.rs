use num_complex::Complex64;
use num_rational::Ratio;
use proptest::prelude::*;

use pds_schemes::integrators::{integrate, phi, SchemeId, SchemeSpec};
use pds_schemes::linalg::{eigenvalues, Matrix, SPECTRUM_ZERO_TOL};
use pds_schemes::pds::{steady_state_for, Builtin, LinearPds, Pds};
use pds_schemes::stability::{
    classify_fixed_point, closed_form_jacobian, critical_step, random_system_8, stability_value,
    w_vector, Verdict,
};

fn positive_schemes() -> Vec<SchemeSpec> {
    vec![
        SchemeSpec::geco1(),
        SchemeSpec::geco2(),
        SchemeSpec::bbks1(),
        SchemeSpec::bbks2(1.0).unwrap(),
        SchemeSpec::bbks2(0.5).unwrap(),
        SchemeSpec::bbks2(2.0).unwrap(),
    ]
}

fn rel_gap(a: &[f64], b: &[f64]) -> f64 {
    let scale = b
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / scale
}

/// A zero is only accepted right after a component already sat far below
/// the normal range, where the next value is not representable.
fn underflowed_to_zero(min_component: &[f64]) -> bool {
    match min_component.iter().position(|m| *m == 0.0) {
        Some(k) => k > 0 && min_component[k - 1] < 1e-100,
        None => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn two_by_two_runs_conserve_and_stay_positive(
        a in 0.1f64..10.0, b in 0.1f64..10.0, c in 0.1f64..10.0,
        y1 in 0.01f64..10.0, y2 in 0.01f64..10.0,
        log_dt in -2.0f64..2.0,
    ) {
        let model = Builtin::Paper2x2 { a, b, c }.model();
        let dt = 10f64.powf(log_dt);
        for scheme in positive_schemes() {
            let traj = match integrate(&model, &scheme, &[y1, y2], dt, 20) {
                Ok(t) => t,
                Err(e) if underflowed_to_zero(&e.partial.min_component) => e.partial,
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            };
            prop_assert!(traj.max_invariant_defect() <= 1e-12, "{} defect {}", scheme.id(), traj.max_invariant_defect());
            prop_assert!(
                traj.min_over_run() > 0.0 || underflowed_to_zero(&traj.min_component),
                "{}: {:?}",
                scheme.id(),
                traj.min_component
            );
        }
    }

    #[test]
    fn steady_states_are_fixed_points(a in 0.1f64..10.0, b in 0.1f64..10.0, c in 0.1f64..10.0, s in 0.1f64..10.0, dt in 0.01f64..5.0) {
        let model = Builtin::Paper2x2 { a, b, c }.model();
        let y_star = [s * b, s * a];
        let amplification = (1.0 + dt * model.matrix().norm_inf()).powi(2);
        for id in SchemeId::ALL {
            let next = SchemeSpec::new(id).step(&model, &y_star, dt).unwrap().next_state;
            prop_assert!(rel_gap(&next, &y_star) <= 1e-14 * amplification, "{id}: {next:?}");
        }
    }

    #[test]
    fn splitting_a_run_changes_nothing(n in 0usize..15, m in 0usize..15, dt in 0.05f64..2.0) {
        let model = Builtin::Paper5x5.model();
        let y0 = [1.0, 3.0, 3.0, 3.0, 3.0];
        for scheme in positive_schemes() {
            let whole = integrate(&model, &scheme, &y0, dt, n + m).unwrap();
            let head = integrate(&model, &scheme, &y0, dt, n).unwrap();
            let tail = integrate(&model, &scheme, head.last(), dt, m).unwrap();
            prop_assert_eq!(whole.last(), tail.last());
        }
    }

    #[test]
    fn w_vector_signs(a in 0.1f64..10.0, b in 0.1f64..10.0, c in 0.1f64..10.0, y1 in 0.01f64..10.0, y2 in 0.01f64..10.0, log_dt in -2.0f64..2.0) {
        let w = w_vector(a, b, c, &[y1, y2], 10f64.powf(log_dt)).unwrap();
        let d = y1 - (b / a) * y2;
        prop_assume!(d.abs() > 1e-9 * y1.max(y2));
        prop_assert_eq!(w[0].signum(), d.signum());
        prop_assert_eq!(w[1].signum(), -d.signum());
        prop_assert!((w[0] + c * w[1]).abs() <= 1e-11 * w[0].abs().max((c * w[1]).abs()));
    }

    #[test]
    fn geco1_is_the_closed_linear_map(seed in 0u64..1000, n in 2usize..8, dt in 0.001f64..100.0) {
        let model = random_system_8(seed, n).unwrap();
        let y: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 * 0.37).sin().abs()).collect();
        let step = SchemeSpec::geco1().step(&model, &y, dt).unwrap().next_state;
        let big_phi = dt * phi(dt * model.trace_s_minus()).unwrap();
        let ay = model.matrix().mul_vec(&y);
        let expected: Vec<f64> = y.iter().zip(&ay).map(|(v, f)| v + big_phi * f).collect();
        prop_assert!(rel_gap(&step, &expected) <= 1e-14);
    }

    #[test]
    fn random_systems_are_in_class(seed in 0u64..10_000, n in 2usize..9) {
        let model = random_system_8(seed, n).unwrap();
        let a = model.matrix();
        for j in 0..n {
            let col: f64 = (0..n).map(|i| a[(i, j)]).sum();
            prop_assert!(col.abs() <= 1e-12 * a.norm_inf());
            for i in 0..n {
                prop_assert!(i == j || a[(i, j)] >= 0.0);
            }
        }
        let again = random_system_8(seed, n).unwrap();
        prop_assert_eq!(again.matrix(), a);
    }
}

#[test]
fn jacobians_fix_kernel_vectors_on_random_systems() {
    for seed in 0..40u64 {
        let model = random_system_8(seed, 2 + (seed % 7) as usize).unwrap();
        for id in SchemeId::ALL {
            for dt in [0.01, 0.3, 2.0] {
                let j = closed_form_jacobian(&model, id, dt).unwrap();
                for v in model.kernel_basis() {
                    let jv = j.mul_vec(v);
                    let gap = jv
                        .iter()
                        .zip(v)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    assert!(gap <= 1e-10, "seed {seed} {id} dt {dt}: {gap}");
                }
            }
        }
    }
}

#[test]
fn critical_steps_sit_on_the_unit_circle() {
    for seed in 0..40u64 {
        let model = random_system_8(seed, 2 + (seed % 7) as usize).unwrap();
        for id in [SchemeId::Geco2, SchemeId::Gbbks1, SchemeId::Gbbks2] {
            let cs = critical_step(&model, id).unwrap();
            let (Some(dt), Some(l)) = (cs.dt_star, cs.binding_eigenvalue) else {
                continue;
            };
            let r = stability_value(id, l * dt, dt * model.trace_s_minus())
                .unwrap()
                .norm();
            assert!((r - 1.0).abs() <= 1e-8, "seed {seed} {id}: |R| = {r}");
        }
    }
}

#[test]
fn verdict_flips_across_the_critical_step() {
    let b = Builtin::Paper5x5;
    let model = b.model();
    let y_star = steady_state_for(&model, &b.y0()).unwrap();
    for scheme in [
        SchemeSpec::geco2(),
        SchemeSpec::bbks1(),
        SchemeSpec::bbks2(1.0).unwrap(),
    ] {
        let dt = critical_step(&model, scheme.id()).unwrap().dt_star.unwrap();
        let below = classify_fixed_point(&model, &scheme, &y_star, dt * (1.0 - 1e-3)).unwrap();
        let above = classify_fixed_point(&model, &scheme, &y_star, dt * (1.0 + 1e-3)).unwrap();
        assert_eq!(below.verdict, Verdict::Stable, "{}", scheme.id());
        assert_eq!(above.verdict, Verdict::Unstable, "{}", scheme.id());
    }
}

#[test]
fn spectrum_of_the_five_by_five_problem() {
    let a = Builtin::Paper5x5.matrix();
    let mut got = eigenvalues(&a)
        .unwrap()
        .nonzero(SPECTRUM_ZERO_TOL * a.norm_fro());
    got.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
    let s3 = 3f64.sqrt();
    let expected = [
        Complex64::new(-5.0 - s3, 0.0),
        Complex64::new(-5.0, -1.0),
        Complex64::new(-5.0, 1.0),
        Complex64::new(-5.0 + s3, 0.0),
    ];
    assert_eq!(got.len(), 4);
    for (g, e) in got.iter().zip(&expected) {
        assert!((g - e).norm() < 1e-10, "{g} vs {e}");
    }
}

type Q = Ratio<i64>;

fn exact_kernel(a: &Matrix) -> Vec<Q> {
    let n = a.rows();
    let mut m: Vec<Vec<Q>> = (0..n)
        .map(|i| (0..n).map(|j| Q::from_integer(a[(i, j)] as i64)).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..n).find(|&r| m[r][col] != Q::from_integer(0)) else {
            continue;
        };
        m.swap(row, p);
        let lead = m[row][col];
        for v in m[row].iter_mut() {
            *v /= lead;
        }
        for r in 0..n {
            if r != row && m[r][col] != Q::from_integer(0) {
                let f = m[r][col];
                let pivot_row = m[row].clone();
                for (v, p) in m[r].iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    assert_eq!(free.len(), 1, "one-dimensional kernel expected");
    let mut v = vec![Q::from_integer(0); n];
    v[free[0]] = Q::from_integer(1);
    for (r, &pc) in pivots.iter().enumerate() {
        v[pc] = -m[r][free[0]];
    }
    v
}

#[test]
fn five_by_five_steady_state_matches_exact_rational_kernel() {
    let b = Builtin::Paper5x5;
    let a = b.matrix();
    for i in 0..5 {
        for j in 0..5 {
            assert_eq!(a[(i, j)].fract(), 0.0);
        }
    }
    let v = exact_kernel(&a);
    let mass: Q = v.iter().sum();
    let total = Q::from_integer(b.y0().iter().sum::<f64>() as i64);
    let exact: Vec<Q> = v.iter().map(|x| x * total / mass).collect();
    let as_int: Vec<i64> = exact.iter().map(|x| x.to_integer()).collect();
    assert_eq!(as_int, vec![4, 2, 2, 4, 1]);
    let y_star = steady_state_for(&b.model(), &b.y0()).unwrap();
    for (y, e) in y_star.iter().zip(&as_int) {
        assert!((y - *e as f64).abs() <= 1e-12, "{y_star:?}");
    }
}

#[test]
fn stiff_chain_invariant_is_total_mass() {
    let model = LinearPds::new(Builtin::PaperStiff { k: 1e4 }.matrix()).unwrap();
    let rows = model.invariant_rows().expect("one invariant");
    assert_eq!(rows.rows(), 1);
    let r = rows.row(0);
    assert!(r.iter().all(|v| (v - r[0]).abs() <= 1e-12 * r[0].abs()));
}
