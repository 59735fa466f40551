//! Seeded self-check battery behind the `verify` subcommand. Each check is
//! named and returns an error string on failure; the CLI prints one line
//! per check and exits nonzero if any fail.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coefficients::{check_dissipation, check_parodi, LeslieCoefficients};
use crate::constitutive::{self, kinematics};
use crate::diagnostics;
use crate::field::{dealias_multiply, integrate_product, Field, VectorField};
use crate::galerkin;
use crate::grid::PeriodicGrid;
use crate::presets;
use crate::solver::{self, StepperConfig};

type Check = std::result::Result<(), String>;

const TAU: f64 = 2.0 * std::f64::consts::PI;

fn random_field(grid: PeriodicGrid, rng: &mut ChaCha8Rng) -> Field {
    let mut spec = vec![num_complex::Complex64::new(0.0, 0.0); grid.len()];
    let n = grid.shape()[0] as i64;
    for (flat, v) in spec.iter_mut().enumerate() {
        let k = grid.wave_at(flat);
        let k2: i64 = k.iter().map(|x| x * x).sum();
        if k2 == 0 || k2 > 9 || k.iter().any(|&ki| 2 * ki.abs() >= n) {
            continue;
        }
        *v = num_complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            / (1.0 + k2 as f64);
    }
    // make it real-valued by symmetrizing through a physical round trip
    let mut f = Field::from_spectral(grid, spec).unwrap();
    f.ensure_physical();
    f
}

fn check_roundtrip(rng: &mut ChaCha8Rng) -> Check {
    let grid = PeriodicGrid::square(2, 16).unwrap();
    let mut f = random_field(grid, rng);
    let before = f.physical_data().map_err(|e| e.to_string())?.to_vec();
    f.ensure_spectral();
    f.ensure_physical();
    let after = f.physical_data().map_err(|e| e.to_string())?;
    let err = before
        .iter()
        .zip(after)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    if err <= 1e-13 {
        Ok(())
    } else {
        Err(format!("round-trip error {err:.3e} > 1e-13"))
    }
}

fn check_parseval(rng: &mut ChaCha8Rng) -> Check {
    let grid = PeriodicGrid::square(2, 16).unwrap();
    let f = random_field(grid, rng);
    let spectral = f.l2_norm().powi(2);
    let mut g = f.clone();
    g.ensure_physical();
    let physical = g
        .physical_data()
        .map_err(|e| e.to_string())?
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        / grid.len() as f64;
    let err = (spectral - physical).abs();
    if err <= 1e-12 {
        Ok(())
    } else {
        Err(format!("Parseval mismatch {err:.3e} > 1e-12"))
    }
}

fn check_integration_by_parts(rng: &mut ChaCha8Rng) -> Check {
    let grid = PeriodicGrid::square(2, 16).unwrap();
    let f = random_field(grid, rng);
    let g = random_field(grid, rng);
    for axis in 0..2 {
        let lhs = dealias_multiply(&f, &g.partial(axis, 1), 2.0)
            .map_err(|e| e.to_string())?
            .integrate();
        let rhs = -dealias_multiply(&f.partial(axis, 1), &g, 2.0)
            .map_err(|e| e.to_string())?
            .integrate();
        if (lhs - rhs).abs() > 1e-12 {
            return Err(format!(
                "axis {axis}: int f dg = {lhs:.3e} vs -int df g = {rhs:.3e}"
            ));
        }
    }
    Ok(())
}

fn check_leray(rng: &mut ChaCha8Rng) -> Check {
    let grid = PeriodicGrid::square(2, 16).unwrap();
    let mut v = VectorField::new(vec![random_field(grid, rng), random_field(grid, rng)])
        .map_err(|e| e.to_string())?;
    let orig = v.clone();
    v.leray_project().map_err(|e| e.to_string())?;
    let once = v.clone();
    v.leray_project().map_err(|e| e.to_string())?;
    for i in 0..2 {
        let mut diff = v.comp(i).clone();
        diff.add_assign(once.comp(i), -1.0);
        if diff.l2_norm() > 1e-13 {
            return Err(format!("not idempotent: component {i}"));
        }
    }
    // orthogonality: (v - Pv, Pv) = 0
    let mut ip = 0.0;
    for i in 0..2 {
        let mut res = orig.comp(i).clone();
        res.add_assign(once.comp(i), -1.0);
        ip += integrate_product(&[&res, once.comp(i)]).map_err(|e| e.to_string())?;
    }
    if ip.abs() > 1e-12 {
        return Err(format!("projection not orthogonal: {ip:.3e}"));
    }
    let div = v.divergence().linf_norm();
    if div > 1e-11 {
        return Err(format!("projected divergence {div:.3e}"));
    }
    Ok(())
}

fn check_kinematics(rng: &mut ChaCha8Rng) -> Check {
    let grid = PeriodicGrid::square(2, 16).unwrap();
    let u = VectorField::new(vec![random_field(grid, rng), random_field(grid, rng)])
        .map_err(|e| e.to_string())?;
    let kin = kinematics(&u);
    for k in 0..2 {
        for l in 0..2 {
            let mut sym = kin.a.comp(k, l).clone();
            sym.add_assign(kin.a.comp(l, k), -1.0);
            if sym.linf_norm() > 1e-13 {
                return Err("A not symmetric".into());
            }
            let mut anti = kin.omega.comp(k, l).clone();
            anti.add_assign(kin.omega.comp(l, k), 1.0);
            if anti.linf_norm() > 1e-13 {
                return Err("Omega not antisymmetric".into());
            }
            let mut grad = u.comp(k).partial(l, 1);
            grad.add_assign(kin.a.comp(k, l), -1.0);
            grad.add_assign(kin.omega.comp(k, l), -1.0);
            if grad.linf_norm() > 1e-12 {
                return Err("A + Omega != grad u".into());
            }
        }
    }
    Ok(())
}

/// Directional derivative of the penalty energy against f(d).
pub fn variational_check(
    d: &VectorField,
    v: &VectorField,
    eta: f64,
    eps: f64,
) -> crate::Result<(f64, f64)> {
    let perturbed = |s: f64| -> crate::Result<f64> {
        let mut ds = d.clone();
        for i in 0..3 {
            ds.comp_mut(i).add_assign(v.comp(i), s);
        }
        let rho = Field::constant(*d.grid(), 1.0);
        let u = VectorField::zeros_spectral(*d.grid(), d.grid().dim());
        let (_, _, pen) = constitutive::energies(&rho, &u, &ds, eta)?;
        Ok(pen)
    };
    let central = (perturbed(eps)? - perturbed(-eps)?) / (2.0 * eps);
    let f = constitutive::penalty_force_with(d, eta, 2.0)?;
    let mut inner = 0.0;
    for i in 0..3 {
        inner += integrate_product(&[f.comp(i), v.comp(i)])?;
    }
    Ok((central, inner))
}

fn check_variational(rng: &mut ChaCha8Rng) -> Check {
    let grid = PeriodicGrid::square(2, 16).unwrap();
    let d = VectorField::new((0..3).map(|_| random_field(grid, rng)).collect())
        .map_err(|e| e.to_string())?;
    let v = VectorField::new((0..3).map(|_| random_field(grid, rng)).collect())
        .map_err(|e| e.to_string())?;
    let (central, inner) = variational_check(&d, &v, 0.5, 1e-5).map_err(|e| e.to_string())?;
    let rel = (central - inner).abs() / inner.abs().max(1e-30);
    if rel <= 1e-6 {
        Ok(())
    } else {
        Err(format!("variational mismatch rel {rel:.3e} > 1e-6"))
    }
}

fn check_cancellations(rng: &mut ChaCha8Rng) -> Check {
    let grid = PeriodicGrid::square(2, 16).unwrap();
    let c = LeslieCoefficients::new([1.0, -1.5, 0.5, 2.0, 1.0, 0.0], 0.5).unwrap();
    for trial in 0..5 {
        let mut u = VectorField::new(vec![random_field(grid, rng), random_field(grid, rng)])
            .map_err(|e| e.to_string())?;
        u.leray_project().map_err(|e| e.to_string())?;
        let d = VectorField::new((0..3).map(|_| random_field(grid, rng)).collect())
            .map_err(|e| e.to_string())?;
        let r = diagnostics::cancellation_check(&u, &d, &c).map_err(|e| e.to_string())?;
        for (name, v) in [
            ("pair_a", r.pair_a),
            ("pair_b", r.pair_b),
            ("pair_c", r.pair_c),
            ("antisymmetry", r.antisymmetry),
        ] {
            if v.abs() > 1e-10 {
                return Err(format!("trial {trial}: {name} = {v:.3e} > 1e-10"));
            }
        }
        if r.sign_term > 0.0 {
            return Err(format!("trial {trial}: sign_term {0:.3e} > 0", r.sign_term));
        }
    }
    Ok(())
}

fn check_admissibility() -> Check {
    let c = LeslieCoefficients::new([1.0, -1.5, 0.5, 2.0, 1.0, 0.0], 0.5).unwrap();
    let rep = check_dissipation(&c);
    if !rep.ok() {
        return Err(format!("reference coefficients rejected: {:?}", rep.violations));
    }
    let (residual, ok) = check_parodi(&c, crate::coefficients::PARODI_TOL_DEFAULT);
    if !ok || residual.abs() > 1e-12 {
        return Err(format!("Parodi residual {residual:.3e}"));
    }
    let bad = LeslieCoefficients::new([1.0, -1.5, 0.5, 0.0, 1.0, 0.0], 0.5).unwrap();
    if check_dissipation(&bad).dissipation_ok {
        return Err("mu4 = 0 accepted".into());
    }
    Ok(())
}

fn check_checkpoint() -> Check {
    let dir = std::env::temp_dir().join(format!("nematic-verify-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let path = dir.join("roundtrip.elcs");
    let grid = PeriodicGrid::square(2, 8).unwrap();
    let mut st = presets::director_wave(grid, 0.5, 1.5, 0.3);
    st.t = 0.125;
    crate::checkpoint::save(&path, &st).map_err(|e| e.to_string())?;
    let back = crate::checkpoint::load(&path, 0.5, 1.5).map_err(|e| e.to_string())?;
    let _ = std::fs::remove_dir_all(&dir);
    if back.t != st.t {
        return Err("time not preserved".into());
    }
    let mut orig = st.clone();
    orig.rho.ensure_physical();
    let mut got = back.rho.clone();
    got.ensure_physical();
    if orig.rho.physical_data().map_err(|e| e.to_string())?
        != got.physical_data().map_err(|e| e.to_string())?
    {
        return Err("density not bit-exact".into());
    }
    Ok(())
}

fn check_galerkin_basis() -> Check {
    let grid = PeriodicGrid::square(2, 16).unwrap();
    let modes = galerkin::enumerate_basis(2, 6);
    let fields: Vec<_> = modes
        .iter()
        .map(|m| galerkin::basis_field(m, grid))
        .collect();
    for (i, a) in fields.iter().enumerate() {
        for (j, b) in fields.iter().enumerate() {
            let ip = galerkin::inner_vec(a, b);
            let expect = if i == j { 1.0 } else { 0.0 };
            if (ip - expect).abs() > 1e-12 {
                return Err(format!("Gram[{i}][{j}] = {ip:.3e}"));
            }
        }
        if fields[i].divergence().linf_norm() > 1e-12 {
            return Err(format!("mode {i} not divergence-free"));
        }
    }
    Ok(())
}

fn check_equilibrium_fixed_point() -> Check {
    let grid = PeriodicGrid::square(2, 16).unwrap();
    let c = LeslieCoefficients::new([1.0, -1.5, 0.5, 2.0, 1.0, 0.0], 0.5).unwrap();
    let cfg = StepperConfig {
        dt: 1e-3,
        ..StepperConfig::default()
    };
    let st = presets::equilibrium(grid, 0.5, 1.5);
    let out = solver::run(st, &c, &cfg, 0.01, false).map_err(|e| e.to_string())?;
    let u_inf = out.final_state.u.linf_norm();
    if u_inf > 1e-12 {
        return Err(format!("equilibrium velocity drift {u_inf:.3e}"));
    }
    Ok(())
}

fn check_director_wave_energy() -> Check {
    let grid = PeriodicGrid::square(2, 32).unwrap();
    let st = presets::director_wave(grid, 0.5, 1.5, 0.0);
    let (_, elastic, _) =
        constitutive::energies(&st.rho, &st.u, &st.d, 0.5).map_err(|e| e.to_string())?;
    let expect = 2.0 * std::f64::consts::PI.powi(2);
    if (elastic - expect).abs() > 1e-10 {
        return Err(format!("elastic energy {elastic} != 2 pi^2"));
    }
    Ok(())
}

fn check_translation_equivariance(rng: &mut ChaCha8Rng) -> Check {
    // shifting by one grid cell commutes with differentiation
    let grid = PeriodicGrid::square(2, 16).unwrap();
    let f = random_field(grid, rng);
    let n = grid.shape()[0];
    let shift = |g: &Field| -> Field {
        let mut h = g.clone();
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
    let a = shift(&f.partial(0, 1));
    let mut b = shift(&f).partial(0, 1);
    b.add_assign(&a, -1.0);
    if b.linf_norm() > 1e-12 {
        return Err(format!("shift/derivative mismatch {:.3e}", b.linf_norm()));
    }
    let _ = TAU;
    Ok(())
}

/// Run every check; returns (name, result) pairs in a fixed order.
pub fn run_battery() -> Vec<(&'static str, Check)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    vec![
        ("spectral round-trip", check_roundtrip(&mut rng)),
        ("Parseval identity", check_parseval(&mut rng)),
        ("integration by parts", check_integration_by_parts(&mut rng)),
        ("Leray projection", check_leray(&mut rng)),
        ("kinematic decomposition", check_kinematics(&mut rng)),
        ("penalty variational identity", check_variational(&mut rng)),
        ("energy-law cancellations", check_cancellations(&mut rng)),
        ("coefficient admissibility", check_admissibility()),
        ("checkpoint round-trip", check_checkpoint()),
        ("oracle basis orthonormality", check_galerkin_basis()),
        ("equilibrium fixed point", check_equilibrium_fixed_point()),
        ("director-wave elastic energy", check_director_wave_energy()),
        (
            "translation equivariance",
            check_translation_equivariance(&mut rng),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_is_clean() {
        for (name, result) in run_battery() {
            assert!(result.is_ok(), "{name}: {:?}", result.err());
        }
    }
}
