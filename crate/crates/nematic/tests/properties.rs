//! Property tests for the spectral core and the stepper.

use proptest::prelude::*;

use nematic::coefficients::LeslieCoefficients;
use nematic::constitutive::{self, kinematics};
use nematic::field::{dealias_multiply, integrate_product, Field, VectorField};
use nematic::grid::PeriodicGrid;
use nematic::presets;
use nematic::solver::{self, Scheme, State, StepperConfig};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// A smooth band-limited field built from a handful of bounded-amplitude
/// modes, so products and derivatives stay O(1).
fn smooth_field(grid: PeriodicGrid, params: &[(i64, i64, f64, f64)]) -> Field {
    let params = params.to_vec();
    Field::from_fn(grid, move |x| {
        params
            .iter()
            .map(|&(k0, k1, amp, phase)| {
                amp * (TAU * (k0 as f64 * x[0] + k1 as f64 * x[1]) + phase).cos()
            })
            .sum()
    })
}

fn mode_strategy() -> impl Strategy<Value = Vec<(i64, i64, f64, f64)>> {
    prop::collection::vec(
        (-4i64..=4, -4i64..=4, -1.0f64..1.0, 0.0f64..TAU),
        1..4,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn spectral_round_trip(modes in mode_strategy()) {
        let grid = PeriodicGrid::square(2, 16).unwrap();
        let mut f = smooth_field(grid, &modes);
        let before = f.physical_data().unwrap().to_vec();
        f.ensure_spectral();
        f.ensure_physical();
        let after = f.physical_data().unwrap();
        let err = before.iter().zip(after).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
        prop_assert!(err <= 1e-13, "round trip error {err}");
    }

    #[test]
    fn parseval(modes in mode_strategy()) {
        let grid = PeriodicGrid::square(2, 16).unwrap();
        let mut f = smooth_field(grid, &modes);
        let spectral = f.l2_norm().powi(2);
        f.ensure_physical();
        let physical = f.physical_data().unwrap().iter().map(|x| x * x).sum::<f64>()
            / grid.len() as f64;
        prop_assert!((spectral - physical).abs() <= 1e-12);
    }

    #[test]
    fn integration_by_parts(fm in mode_strategy(), gm in mode_strategy(), axis in 0usize..2) {
        let grid = PeriodicGrid::square(2, 16).unwrap();
        let f = smooth_field(grid, &fm);
        let g = smooth_field(grid, &gm);
        let lhs = dealias_multiply(&f, &g.partial(axis, 1), 2.0).unwrap().integrate();
        let rhs = -dealias_multiply(&f.partial(axis, 1), &g, 2.0).unwrap().integrate();
        prop_assert!((lhs - rhs).abs() <= 1e-12, "ibp {lhs} vs {rhs}");
    }

    #[test]
    fn leray_idempotent_and_orthogonal(um in mode_strategy(), vm in mode_strategy()) {
        let grid = PeriodicGrid::square(2, 16).unwrap();
        let mut v = VectorField::new(vec![
            smooth_field(grid, &um),
            smooth_field(grid, &vm),
        ]).unwrap();
        let orig = v.clone();
        v.leray_project().unwrap();
        let once = v.clone();
        v.leray_project().unwrap();
        for i in 0..2 {
            let mut diff = v.comp(i).clone();
            diff.add_assign(once.comp(i), -1.0);
            prop_assert!(diff.l2_norm() <= 1e-13);
        }
        let mut ip = 0.0;
        for i in 0..2 {
            let mut res = orig.comp(i).clone();
            res.add_assign(once.comp(i), -1.0);
            ip += integrate_product(&[&res, once.comp(i)]).unwrap();
        }
        prop_assert!(ip.abs() <= 1e-12, "orthogonality defect {ip}");
    }

    #[test]
    fn product_translation_equivariance(fm in mode_strategy(), gm in mode_strategy()) {
        // shifting both factors by one grid cell shifts the product
        let grid = PeriodicGrid::square(2, 16).unwrap();
        let n = 16usize;
        let shift = |h: &Field| -> Field {
            let mut h = h.clone();
            h.ensure_physical();
            let data = h.physical_data().unwrap();
            let mut out = vec![0.0; data.len()];
            for i in 0..n {
                for j in 0..n {
                    out[((i + 1) % n) * n + j] = data[i * n + j];
                }
            }
            Field::from_physical(grid, out).unwrap()
        };
        let f = smooth_field(grid, &fm);
        let g = smooth_field(grid, &gm);
        let a = shift(&dealias_multiply(&f, &g, 2.0).unwrap());
        let mut b = dealias_multiply(&shift(&f), &shift(&g), 2.0).unwrap();
        b.ensure_physical();
        let mut a = a;
        a.ensure_physical();
        let err = a.physical_data().unwrap().iter()
            .zip(b.physical_data().unwrap())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        prop_assert!(err <= 1e-12, "equivariance defect {err}");
    }

    #[test]
    fn leslie_stress_linear_in_corotational_rate(
        um in mode_strategy(), n1m in mode_strategy(), n2m in mode_strategy(), dm in mode_strategy()
    ) {
        let grid = PeriodicGrid::square(2, 16).unwrap();
        let c = LeslieCoefficients::new([1.0, -1.5, 0.5, 2.0, 1.0, 0.0], 0.5).unwrap();
        let u = VectorField::new(vec![smooth_field(grid, &um), smooth_field(grid, &um)]).unwrap();
        let kin = kinematics(&u);
        let d = VectorField::new(vec![
            smooth_field(grid, &dm),
            smooth_field(grid, &dm),
            Field::constant(grid, 0.1),
        ]).unwrap();
        let n1 = VectorField::new(vec![
            smooth_field(grid, &n1m), smooth_field(grid, &n1m), Field::constant(grid, 0.0),
        ]).unwrap();
        let n2 = VectorField::new(vec![
            smooth_field(grid, &n2m), smooth_field(grid, &n2m), Field::constant(grid, 0.0),
        ]).unwrap();
        let mut nsum = n1.clone();
        for i in 0..3 {
            nsum.comp_mut(i).add_assign(n2.comp(i), 1.0);
        }
        let s1 = constitutive::leslie_stress(&c, &kin.a, &n1, &d, 2.0).unwrap();
        let s2 = constitutive::leslie_stress(&c, &kin.a, &n2, &d, 2.0).unwrap();
        let s0 = constitutive::leslie_stress(&c, &kin.a, &VectorField::zeros_spectral(grid, 3), &d, 2.0).unwrap();
        let ssum = constitutive::leslie_stress(&c, &kin.a, &nsum, &d, 2.0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                // sigma(N1+N2) + sigma(0) = sigma(N1) + sigma(N2)
                let mut lhs = ssum.comp(i, j).clone();
                lhs.add_assign(s0.comp(i, j), 1.0);
                lhs.add_assign(s1.comp(i, j), -1.0);
                lhs.add_assign(s2.comp(i, j), -1.0);
                prop_assert!(lhs.linf_norm() <= 1e-11, "nonlinearity in N at ({i},{j})");
            }
        }
    }

    #[test]
    fn leslie_stress_linear_in_strain(um in mode_strategy(), dm in mode_strategy(), s in 0.25f64..4.0) {
        // with N = 0 the stress is linear in A: sigma(s A) = s sigma(A)
        let grid = PeriodicGrid::square(2, 16).unwrap();
        let c = LeslieCoefficients::new([1.0, -1.5, 0.5, 2.0, 1.0, 0.0], 0.5).unwrap();
        let mut u = VectorField::new(vec![smooth_field(grid, &um), smooth_field(grid, &um)]).unwrap();
        let kin1 = kinematics(&u);
        for i in 0..2 {
            u.comp_mut(i).scale(s);
        }
        let kin2 = kinematics(&u);
        let d = VectorField::new(vec![
            smooth_field(grid, &dm),
            smooth_field(grid, &dm),
            Field::constant(grid, 0.1),
        ]).unwrap();
        let zero_n = VectorField::zeros_spectral(grid, 3);
        let s1 = constitutive::leslie_stress(&c, &kin1.a, &zero_n, &d, 2.0).unwrap();
        let s2 = constitutive::leslie_stress(&c, &kin2.a, &zero_n, &d, 2.0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut lhs = s2.comp(i, j).clone();
                lhs.add_assign(s1.comp(i, j), -s);
                let scale = s2.comp(i, j).linf_norm().max(1.0);
                prop_assert!(lhs.linf_norm() <= 1e-11 * scale, "nonlinearity in A at ({i},{j})");
            }
        }
    }
}

fn short_run(scheme: Scheme, dt: f64, t_final: f64) -> State {
    let grid = PeriodicGrid::square(2, 16).unwrap();
    let c = LeslieCoefficients::new([1.0, -1.5, 0.5, 2.0, 1.0, 0.0], 0.5).unwrap();
    let cfg = StepperConfig {
        dt,
        scheme,
        report_every: usize::MAX,
        ..StepperConfig::default()
    };
    let initial = presets::director_wave(grid, 0.5, 1.5, 0.4);
    solver::run(initial, &c, &cfg, t_final, false)
        .unwrap()
        .final_state
}

fn state_distance(a: &State, b: &State) -> f64 {
    let mut acc: f64 = 0.0;
    let mut diff = a.rho.clone();
    diff.add_assign(&b.rho, -1.0);
    acc = acc.max(diff.l2_norm());
    for i in 0..2 {
        let mut du = a.u.comp(i).clone();
        du.add_assign(b.u.comp(i), -1.0);
        acc = acc.max(du.l2_norm());
    }
    for i in 0..3 {
        let mut dd = a.d.comp(i).clone();
        dd.add_assign(b.d.comp(i), -1.0);
        acc = acc.max(dd.l2_norm());
    }
    acc
}

/// Self-convergence order under dt halving against a dt/4 fine run.
fn convergence_order(scheme: Scheme) -> f64 {
    let t_final = 0.02;
    let fine = short_run(scheme, 2.5e-4, t_final);
    let e1 = state_distance(&short_run(scheme, 1e-3, t_final), &fine);
    let e2 = state_distance(&short_run(scheme, 5e-4, t_final), &fine);
    (e1 / e2).log2()
}

#[test]
fn imex1_first_order_in_time() {
    let p = convergence_order(Scheme::Imex1);
    assert!(p >= 0.9, "imex1 measured order {p}");
}

#[test]
fn imex2_second_order_in_time() {
    let p = convergence_order(Scheme::Imex2);
    assert!(p >= 1.8, "imex2 measured order {p}");
}
