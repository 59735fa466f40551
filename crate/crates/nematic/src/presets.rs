//! Initial-data presets. Every preset produces a density inside [m1, m2],
//! a Leray-projected zero-mean velocity, and a three-component director.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coefficients::{small_data_functional, LeslieCoefficients};
use crate::config::{Preset, RunConfig};
use crate::error::{NematicError, Result};
use crate::field::{Field, VectorField};
use crate::grid::PeriodicGrid;
use crate::solver::State;

const TAU: f64 = 2.0 * std::f64::consts::PI;

fn unit_director_x(grid: PeriodicGrid) -> VectorField {
    VectorField::new(vec![
        Field::constant(grid, 1.0),
        Field::constant(grid, 0.0),
        Field::constant(grid, 0.0),
    ])
    .unwrap()
}

pub fn equilibrium(grid: PeriodicGrid, m1: f64, m2: f64) -> State {
    State {
        rho: Field::constant(grid, 1.0f64.clamp(m1, m2)),
        u: VectorField::zeros_spectral(grid, grid.dim()),
        d: unit_director_x(grid),
        t: 0.0,
        m1,
        m2,
    }
}

/// Plane shear: u = (sin 2πy, 0[, 0]), constant density and director.
pub fn shear_wave(grid: PeriodicGrid, m1: f64, m2: f64) -> State {
    let dim = grid.dim();
    let mut comps = vec![Field::from_fn(grid, |x| (TAU * x[1]).sin())];
    comps.resize_with(dim, || Field::constant(grid, 0.0));
    let mut u = VectorField::new(comps).unwrap();
    u.ensure_spectral();
    State {
        rho: Field::constant(grid, 1.0f64.clamp(m1, m2)),
        u,
        d: unit_director_x(grid),
        t: 0.0,
        m1,
        m2,
    }
}

/// In-plane director winding once across the cell, with an optional plane
/// shear u = shear·(sin 2πy, 0[, 0]).
pub fn director_wave(grid: PeriodicGrid, m1: f64, m2: f64, shear: f64) -> State {
    let dim = grid.dim();
    let mut comps = vec![Field::from_fn(grid, move |x| shear * (TAU * x[1]).sin())];
    comps.resize_with(dim, || Field::constant(grid, 0.0));
    let mut u = VectorField::new(comps).unwrap();
    u.ensure_spectral();
    let mut d = VectorField::new(vec![
        Field::from_fn(grid, |x| (TAU * x[0]).cos()),
        Field::from_fn(grid, |x| (TAU * x[0]).sin()),
        Field::constant(grid, 0.0),
    ])
    .unwrap();
    d.ensure_spectral();
    State {
        rho: Field::constant(grid, 1.0f64.clamp(m1, m2)),
        u,
        d,
        t: 0.0,
        m1,
        m2,
    }
}

/// A smooth random scalar field: a few low wavevectors with coefficients
/// damped like (1+|k|²)^(−decay/2), unit L∞ after normalization.
fn random_scalar(grid: PeriodicGrid, rng: &mut ChaCha8Rng, decay: f64) -> Field {
    let dim = grid.dim();
    let kmax = 3i64;
    struct Wave {
        k: [f64; 3],
        amp: f64,
        phase: f64,
    }
    let mut waves = Vec::new();
    let mut push = |rng: &mut ChaCha8Rng, k: [i64; 3]| {
        let k2: i64 = k.iter().map(|x| x * x).sum();
        if k2 == 0 {
            return;
        }
        let first = k.iter().find(|&&x| x != 0).copied().unwrap();
        if first <= 0 {
            return;
        }
        let amp = rng.gen_range(-1.0..1.0) * (1.0 + k2 as f64).powf(-decay / 2.0);
        let phase = rng.gen_range(0.0..TAU);
        waves.push(Wave {
            k: [k[0] as f64, k[1] as f64, k[2] as f64],
            amp,
            phase,
        });
    };
    for k0 in -kmax..=kmax {
        for k1 in -kmax..=kmax {
            if dim == 2 {
                push(rng, [k0, k1, 0]);
            } else {
                for k2 in -kmax..=kmax {
                    push(rng, [k0, k1, k2]);
                }
            }
        }
    }
    let mut f = Field::from_fn(grid, |x| {
        waves
            .iter()
            .map(|w| {
                let dot: f64 = x.iter().zip(&w.k).map(|(xi, ki)| xi * ki).sum();
                w.amp * (TAU * dot + w.phase).cos()
            })
            .sum()
    });
    let sup = f.linf_norm();
    if sup > 0.0 {
        f.scale(1.0 / sup);
    }
    f
}

pub fn random_smooth(grid: PeriodicGrid, m1: f64, m2: f64, seed: u64, decay: f64) -> State {
    let dim = grid.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mid = 0.5 * (m1 + m2);
    let half = 0.5 * (m2 - m1);
    let mut rho = random_scalar(grid, &mut rng, decay);
    rho.scale(0.8 * half);
    let mut rho_full = Field::constant(grid, mid);
    rho_full.add_assign(&rho, 1.0);
    let mut u = VectorField::new(
        (0..dim)
            .map(|_| random_scalar(grid, &mut rng, decay))
            .collect(),
    )
    .unwrap();
    u.ensure_spectral();
    u.leray_project().unwrap();
    let mut d = unit_director_x(grid);
    for i in 0..3 {
        d.comp_mut(i)
            .add_assign(&random_scalar(grid, &mut rng, decay), 0.3);
    }
    d.ensure_spectral();
    State {
        rho: rho_full,
        u,
        d,
        t: 0.0,
        m1,
        m2,
    }
}

/// Rescale a random-smooth perturbation so the small-data functional hits
/// `epsilon` exactly, by bisection on the amplitude. Density is constant
/// and the director perturbs zero, so the functional grows monotonically
/// with the amplitude for small amplitudes.
pub fn small_data(
    grid: PeriodicGrid,
    c: &LeslieCoefficients,
    m1: f64,
    m2: f64,
    seed: u64,
    decay: f64,
    epsilon: f64,
) -> Result<State> {
    let dim = grid.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = Field::constant(grid, 1.0f64.clamp(m1, m2));
    let mut u_dir = VectorField::new(
        (0..dim)
            .map(|_| random_scalar(grid, &mut rng, decay))
            .collect(),
    )
    .unwrap();
    u_dir.ensure_spectral();
    u_dir.leray_project()?;
    let mut d_dir = VectorField::new(
        (0..3)
            .map(|_| random_scalar(grid, &mut rng, decay))
            .collect(),
    )
    .unwrap();
    d_dir.ensure_spectral();

    let state_at = |s: f64| -> State {
        let mut u = u_dir.clone();
        let mut d = d_dir.clone();
        for i in 0..dim {
            u.comp_mut(i).scale(s);
        }
        for i in 0..3 {
            d.comp_mut(i).scale(s);
        }
        State {
            rho: rho.clone(),
            u,
            d,
            t: 0.0,
            m1,
            m2,
        }
    };
    let eval = |s: f64| -> Result<f64> {
        let st = state_at(s);
        small_data_functional(c, m2, &st.rho, &st.u, &st.d)
    };

    let mut hi = 1.0;
    let mut tries = 0;
    while eval(hi)? < epsilon {
        hi *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(NematicError::Unsatisfiable(format!(
                "small-data preset cannot reach epsilon = {epsilon}"
            )));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = eval(mid)?;
        if (v - epsilon).abs() <= 1e-9 * epsilon.max(1.0) {
            return Ok(state_at(mid));
        }
        if v < epsilon {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(state_at(0.5 * (lo + hi)))
}

/// Dispatch on the configured preset.
pub fn make_initial_data(cfg: &RunConfig) -> Result<State> {
    let grid = PeriodicGrid::square(cfg.dim, cfg.n)?;
    let c = cfg.coefficients()?;
    Ok(match cfg.preset {
        Preset::Equilibrium => equilibrium(grid, cfg.m1, cfg.m2),
        Preset::ShearWave => shear_wave(grid, cfg.m1, cfg.m2),
        Preset::DirectorWave => director_wave(grid, cfg.m1, cfg.m2, cfg.shear),
        Preset::RandomSmooth => random_smooth(grid, cfg.m1, cfg.m2, cfg.seed, cfg.decay),
        Preset::SmallData => small_data(
            grid, &c, cfg.m1, cfg.m2, cfg.seed, cfg.decay, cfg.epsilon,
        )?,
    })
}
