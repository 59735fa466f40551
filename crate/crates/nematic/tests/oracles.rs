//! Quadrature and closed-form oracles for the diagnostic quantities:
//! everything here is computed twice, once by the library and once by
//! brute-force real-space quadrature of analytic expressions on a finer
//! grid.

use nematic::coefficients::{small_data_functional, LeslieCoefficients};
use nematic::constitutive::{self, kinematics, OmegaConvention};
use nematic::diagnostics;
use nematic::field::{Field, VectorField};
use nematic::galerkin::{self, MomentumForm};
use nematic::grid::PeriodicGrid;
use nematic::solver::State;

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Mean of an analytic integrand over a fine quadrature grid.
fn quad2d(n: usize, f: impl Fn(f64, f64) -> f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += f(i as f64 / n as f64, j as f64 / n as f64);
        }
    }
    acc / (n * n) as f64
}

#[test]
fn sobolev_norm_vs_quadrature() {
    // f = 0.7 cos(2 pi x) + 0.4 sin(2 pi (x + 2y))
    let grid = PeriodicGrid::square(2, 16).unwrap();
    let f = Field::from_fn(grid, |x| {
        0.7 * (TAU * x[0]).cos() + 0.4 * (TAU * (x[0] + 2.0 * x[1])).sin()
    });
    let h1 = diagnostics::sobolev_norm(&f, 1);
    let fine = 64;
    let val = quad2d(fine, |x, y| {
        let v = 0.7 * (TAU * x).cos() + 0.4 * (TAU * (x + 2.0 * y)).sin();
        let vx = -0.7 * TAU * (TAU * x).sin() + 0.4 * TAU * (TAU * (x + 2.0 * y)).cos();
        let vy = 0.8 * TAU * (TAU * (x + 2.0 * y)).cos();
        v * v + vx * vx + vy * vy
    });
    let oracle = val.sqrt();
    assert!(
        (h1 - oracle).abs() <= 1e-10 * oracle,
        "H1 {h1} vs quadrature {oracle}"
    );
}

#[test]
fn dissipation_rhs_single_mode_director() {
    // u = 0, d = (0.8 cos 2 pi x, 0, 0), lambda1 = -1, lambda2 = 0:
    // rhs = -|lap d - f(d)|_2^2, by direct quadrature of the analytic
    // integrand.
    let grid = PeriodicGrid::square(2, 32).unwrap();
    let c = LeslieCoefficients::new([0.0, -0.5, 0.5, 2.0, 0.0, 0.0], 0.5).unwrap();
    assert_eq!(c.lambda1(), -1.0);
    assert_eq!(c.lambda2(), 0.0);
    let a = 0.8f64;
    let eta = 0.5f64;
    let s = State {
        rho: Field::constant(grid, 1.0),
        u: VectorField::zeros_spectral(grid, 2),
        d: VectorField::new(vec![
            Field::from_fn(grid, move |x| a * (TAU * x[0]).cos()),
            Field::constant(grid, 0.0),
            Field::constant(grid, 0.0),
        ])
        .unwrap(),
        t: 0.0,
        m1: 0.5,
        m2: 1.5,
    };
    let rhs = diagnostics::dissipation_rhs(&s, &c).unwrap();
    let oracle = -quad2d(256, |x, _| {
        let d1 = a * (TAU * x).cos();
        let lap = -TAU * TAU * d1;
        let f = (d1 * d1 - 1.0) * d1 / (eta * eta);
        (lap - f) * (lap - f)
    });
    assert!(
        (rhs - oracle).abs() <= 1e-10 * oracle.abs(),
        "rhs {rhs} vs quadrature {oracle}"
    );
}

#[test]
fn phi_squared_vs_quadrature() {
    // rho = 1 + 0.25 sin 2 pi x, u = (0.3 sin 2 pi y, 0),
    // d = (0.9 cos 2 pi x, 0, 0)
    let grid = PeriodicGrid::square(2, 32).unwrap();
    let eta = 0.5f64;
    let s = State {
        rho: Field::from_fn(grid, |x| 1.0 + 0.25 * (TAU * x[0]).sin()),
        u: VectorField::new(vec![
            Field::from_fn(grid, |x| 0.3 * (TAU * x[1]).sin()),
            Field::constant(grid, 0.0),
        ])
        .unwrap(),
        d: VectorField::new(vec![
            Field::from_fn(grid, |x| 0.9 * (TAU * x[0]).cos()),
            Field::constant(grid, 0.0),
            Field::constant(grid, 0.0),
        ])
        .unwrap(),
        t: 0.0,
        m1: 0.5,
        m2: 1.5,
    };
    let phi2 = diagnostics::phi_squared(&s, eta).unwrap();
    let oracle = quad2d(256, |x, y| {
        let rho = 1.0 + 0.25 * (TAU * x).sin();
        let du1dy = 0.3 * TAU * (TAU * y).cos();
        let d1 = 0.9 * (TAU * x).cos();
        let lap = -TAU * TAU * d1;
        let f = (d1 * d1 - 1.0) * d1 / (eta * eta);
        rho * du1dy * du1dy + (lap - f) * (lap - f)
    });
    assert!(
        (phi2 - oracle).abs() <= 1e-10 * oracle,
        "phi2 {phi2} vs quadrature {oracle}"
    );
}

#[test]
fn small_data_functional_vs_quadrature() {
    // rho = 1, u a single shear mode, d a single director wave
    let grid = PeriodicGrid::square(2, 32).unwrap();
    let c = LeslieCoefficients::new([1.0, -1.5, 0.5, 2.0, 1.0, 0.0], 0.5).unwrap();
    let b = 0.3f64;
    let m2 = 1.5f64;
    let rho = Field::constant(grid, 1.0);
    let u = VectorField::new(vec![
        Field::from_fn(grid, move |x| b * (TAU * x[1]).sin()),
        Field::constant(grid, 0.0),
    ])
    .unwrap();
    let d = VectorField::new(vec![
        Field::from_fn(grid, |x| (TAU * x[0]).cos()),
        Field::from_fn(grid, |x| (TAU * x[0]).sin()),
        Field::constant(grid, 0.0),
    ])
    .unwrap();
    let value = small_data_functional(&c, m2, &rho, &u, &d).unwrap();
    // 4x-resolution quadrature of the analytic integrands; |d| = 1 so the
    // penalty force vanishes and lap d = -4 pi^2 d
    let u_part = quad2d(128, |_, y| {
        let u1 = b * (TAU * y).sin();
        let du1 = b * TAU * (TAU * y).cos();
        u1 * u1 + du1 * du1
    });
    let d_h1 = quad2d(128, |x, _| {
        let (dc, ds) = ((TAU * x).cos(), (TAU * x).sin());
        let (gc, gs) = (-TAU * (TAU * x).sin(), TAU * (TAU * x).cos());
        dc * dc + ds * ds + gc * gc + gs * gs
    });
    let lap_sq = quad2d(128, |x, _| {
        let k2 = TAU * TAU;
        let v1 = -k2 * (TAU * x).cos();
        let v2 = -k2 * (TAU * x).sin();
        v1 * v1 + v2 * v2
    });
    let oracle = (m2 / c.mu4 + 1.0) * u_part + d_h1 + lap_sq;
    assert!(
        (value - oracle).abs() <= 1e-10 * oracle,
        "functional {value} vs quadrature {oracle}"
    );
}

#[test]
fn leslie_stress_entry_pointwise() {
    // single-mode u and d, all mu = 1, N taken as the corotational rate of
    // a frozen director (d_t = 0); sigma_12 at the origin equals 3 pi b
    let grid = PeriodicGrid::square(2, 32).unwrap();
    let c = LeslieCoefficients::new([1.0; 6], 0.5).unwrap();
    let b = 0.4f64;
    let u = VectorField::new(vec![
        Field::from_fn(grid, move |x| b * (TAU * x[1]).sin()),
        Field::constant(grid, 0.0),
    ])
    .unwrap();
    let d = VectorField::new(vec![
        Field::from_fn(grid, |x| (TAU * x[0]).cos()),
        Field::from_fn(grid, |x| (TAU * x[0]).sin()),
        Field::constant(grid, 0.0),
    ])
    .unwrap();
    let kin = kinematics(&u);
    let d_t = VectorField::zeros_spectral(grid, 3);
    let n = constitutive::corotational_rate(&d_t, &u, &d, &kin.omega, OmegaConvention::Standard, 2.0)
        .unwrap();
    let sigma = constitutive::leslie_stress(&c, &kin.a, &n, &d, 2.0).unwrap();
    let mut s12 = sigma.comp(0, 1).clone();
    s12.ensure_physical();
    let at_origin = s12.physical_data().unwrap()[0];
    // independent pointwise evaluation at (0,0): d = (1,0,0),
    // A12 = pi b cos(2 pi y) = pi b, (u.grad)d = 0, Omega d = (0, -pi b),
    // N = -Omega d => sigma_12 = mu3 N_2 + mu4 A_12 + mu6 (A d)_2 = 3 pi b
    let expect = 3.0 * std::f64::consts::PI * b;
    assert!(
        (at_origin - expect).abs() <= 1e-10,
        "sigma_12(0,0) = {at_origin} vs {expect}"
    );
}

#[test]
fn gram_matrix_vs_high_resolution_quadrature() {
    // rho = 1 + 0.5 sin 2 pi x, two lowest modes
    let grid = PeriodicGrid::square(2, 16).unwrap();
    let c = LeslieCoefficients::new([1.0, -1.5, 0.5, 2.0, 1.0, 0.0], 0.5).unwrap();
    let rho = Field::from_fn(grid, |x| 1.0 + 0.5 * (TAU * x[0]).sin());
    let d = VectorField::new(vec![
        Field::constant(grid, 1.0),
        Field::constant(grid, 0.0),
        Field::constant(grid, 0.0),
    ])
    .unwrap();
    let sys = galerkin::GalerkinSystem::new(
        grid,
        2,
        c,
        MomentumForm::Anse,
        rho,
        d,
        &VectorField::zeros_spectral(grid, 2),
    )
    .unwrap();
    let asm = galerkin::assemble(&sys).unwrap();
    // 8x-resolution quadrature with the analytic mode shapes: both modes
    // have k = (0,1) and polarization (-1, 0), cos then sin
    let modes: [Box<dyn Fn(f64, f64) -> f64>; 2] = [
        Box::new(|_, y: f64| std::f64::consts::SQRT_2 * -(TAU * y).cos()),
        Box::new(|_, y: f64| std::f64::consts::SQRT_2 * -(TAU * y).sin()),
    ];
    for i in 0..2 {
        for j in 0..2 {
            let oracle = quad2d(128, |x, y| {
                (1.0 + 0.5 * (TAU * x).sin()) * modes[i](x, y) * modes[j](x, y)
            });
            assert!(
                (asm.a[(i, j)] - oracle).abs() <= 1e-12,
                "A[{i}][{j}] = {} vs quadrature {oracle}",
                asm.a[(i, j)]
            );
        }
    }
}

#[test]
fn oracle_energy_law_along_trajectory() {
    // Under the strong-form momentum reading the truncated system is
    // dissipative; the total energy of the oracle trajectory must not grow
    // beyond first-order-in-dt slack.
    let grid = PeriodicGrid::square(2, 16).unwrap();
    let c = LeslieCoefficients::new([1.0, -1.5, 0.5, 2.0, 1.0, 0.0], 0.5).unwrap();
    let modes = galerkin::enumerate_basis(2, 3);
    let mut u0 = VectorField::zeros_spectral(grid, 2);
    for (i, m) in modes.iter().enumerate() {
        let phi = galerkin::basis_field(m, grid);
        for cix in 0..2 {
            u0.comp_mut(cix).add_assign(phi.comp(cix), 0.2 / (1.0 + i as f64));
        }
    }
    let d0 = VectorField::new(vec![
        Field::from_fn(grid, |x| 0.9 * (TAU * x[0]).cos()),
        Field::from_fn(grid, |x| 0.9 * (TAU * x[0]).sin()),
        Field::constant(grid, 0.0),
    ])
    .unwrap();
    let mut sys = galerkin::GalerkinSystem::new(
        grid,
        3,
        c,
        MomentumForm::EqL2,
        Field::constant(grid, 1.0),
        d0,
        &u0,
    )
    .unwrap();
    let dt = 2e-4;
    let mut energies = Vec::new();
    for _ in 0..10 {
        let u = sys.velocity();
        let (kin, el, pen) = constitutive::energies(&sys.rho, &u, &sys.d, c.eta).unwrap();
        energies.push(kin + el + pen);
        galerkin::integrate_ode(&mut sys, dt, 10.0 * dt).unwrap();
    }
    let e0 = energies[0];
    for w in energies.windows(2) {
        assert!(
            w[1] <= w[0] + 10.0 * dt * e0,
            "oracle energy grew: {} -> {}",
            w[0],
            w[1]
        );
    }
    assert!(
        energies.last().unwrap() < &e0,
        "no net dissipation over the horizon"
    );
}

#[test]
fn cancellation_residuals_resolution_independent() {
    let c = LeslieCoefficients::new([1.0, -1.5, 0.5, 2.0, 1.0, 0.0], 0.5).unwrap();
    for n in [16usize, 32] {
        let grid = PeriodicGrid::square(2, n).unwrap();
        let mut u = VectorField::new(vec![
            Field::from_fn(grid, |x| (TAU * x[1]).sin() + 0.3 * (TAU * 2.0 * x[0]).cos()),
            Field::from_fn(grid, |x| 0.5 * (TAU * x[0]).sin()),
        ])
        .unwrap();
        u.leray_project().unwrap();
        let d = VectorField::new(vec![
            Field::from_fn(grid, |x| 0.8 * (TAU * x[0]).cos()),
            Field::from_fn(grid, |x| 0.8 * (TAU * (x[0] + x[1])).sin()),
            Field::constant(grid, 0.2),
        ])
        .unwrap();
        let r = diagnostics::cancellation_check(&u, &d, &c).unwrap();
        for (name, v) in [
            ("pair_a", r.pair_a),
            ("pair_b", r.pair_b),
            ("pair_c", r.pair_c),
            ("antisymmetry", r.antisymmetry),
        ] {
            assert!(v.abs() <= 1e-10, "n={n}: {name} = {v:.3e}");
        }
    }
}
