//! Pointwise constitutive quantities: strain rate and vorticity tensors,
//! the Ginzburg-Landau penalty force, the corotational rate of the director,
//! and the Ericksen and Leslie stresses.
//!
//! Conventions, fixed so the basic energy law closes:
//! (grad u)_ij = d_j u_i, A = (grad u + grad u^T)/2, Omega = (grad u -
//! grad u^T)/2, (Omega d)_i = Omega_ij d_j, N = d_t + (u.grad)d - Omega d,
//! and divergence of a stress contracts the second index.
//!
//! Every nonlinear product is staged pairwise through `dealias_multiply`,
//! so each result is the exact Galerkin projection of the product of its
//! (already truncated) operands.

use crate::coefficients::LeslieCoefficients;
use crate::error::{NematicError, Result};
use crate::field::{dealias_multiply, integrate_product, Field, VectorField};
use crate::grid::PeriodicGrid;

pub const DEALIAS_FACTOR_DEFAULT: f64 = 2.0;

/// Square dim x dim tensor field, row-major components.
#[derive(Debug, Clone)]
pub struct TensorField {
    grid: PeriodicGrid,
    dim: usize,
    comps: Vec<Field>,
}

impl TensorField {
    pub fn zeros_spectral(grid: PeriodicGrid) -> Self {
        let dim = grid.dim();
        TensorField {
            grid,
            dim,
            comps: (0..dim * dim).map(|_| Field::zeros_spectral(grid)).collect(),
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn comp(&self, i: usize, j: usize) -> &Field {
        &self.comps[i * self.dim + j]
    }

    pub fn comp_mut(&mut self, i: usize, j: usize) -> &mut Field {
        &mut self.comps[i * self.dim + j]
    }

    /// (div T)_i = d_j T_ij.
    pub fn divergence(&self) -> VectorField {
        let mut out = VectorField::zeros_spectral(self.grid, self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.comp_mut(i).add_assign(&self.comp(i, j).partial(j, 1), 1.0);
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct KinematicTensors {
    pub a: TensorField,
    pub omega: TensorField,
}

/// Strain rate A and vorticity tensor Omega from the velocity.
pub fn kinematics(u: &VectorField) -> KinematicTensors {
    let grid = *u.grid();
    let dim = grid.dim();
    let mut a = TensorField::zeros_spectral(grid);
    let mut omega = TensorField::zeros_spectral(grid);
    for i in 0..dim {
        for j in 0..dim {
            let dui_dj = u.comp(i).partial(j, 1);
            let duj_di = u.comp(j).partial(i, 1);
            a.comp_mut(i, j).add_assign(&dui_dj, 0.5);
            a.comp_mut(i, j).add_assign(&duj_di, 0.5);
            omega.comp_mut(i, j).add_assign(&dui_dj, 0.5);
            omega.comp_mut(i, j).add_assign(&duj_di, -0.5);
        }
    }
    KinematicTensors { a, omega }
}

/// Truncated |d|^2 as a scalar field (staged, alias-free).
pub fn director_magnitude_squared(d: &VectorField, factor: f64) -> Result<Field> {
    let mut w = Field::zeros_spectral(*d.grid());
    for c in d.comps() {
        w.add_assign(&dealias_multiply(c, c, factor)?, 1.0);
    }
    Ok(w)
}

/// Ginzburg-Landau penalty force f(d) = (|d|^2 - 1) d / eta^2.
pub fn penalty_force(d: &VectorField, eta: f64) -> Result<VectorField> {
    penalty_force_with(d, eta, DEALIAS_FACTOR_DEFAULT)
}

pub fn penalty_force_with(d: &VectorField, eta: f64, factor: f64) -> Result<VectorField> {
    let grid = *d.grid();
    let mut w = director_magnitude_squared(d, factor)?;
    w.add_assign(&Field::constant(grid, 1.0), -1.0);
    let mut out = VectorField::zeros_spectral(grid, d.ncomp());
    let scale = 1.0 / (eta * eta);
    for (i, c) in d.comps().iter().enumerate() {
        let mut f = dealias_multiply(&w, c, factor)?;
        f.scale(scale);
        *out.comp_mut(i) = f;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OmegaConvention {
    /// N = d_t + (u.grad)d - Omega d; this is the convention under which
    /// the energy law closes, and the default everywhere.
    #[default]
    Standard,
    /// N = d_t + (u.grad)d + Omega d, kept for investigation only.
    Flipped,
}

/// (Omega d)_i = Omega_ij d_j; third component zero in 2D.
pub fn omega_d(omega: &TensorField, d: &VectorField, factor: f64) -> Result<VectorField> {
    let grid = *omega.grid();
    let dim = omega.dim();
    let mut out = VectorField::zeros_spectral(grid, d.ncomp());
    for i in 0..dim {
        for j in 0..dim {
            let prod = dealias_multiply(omega.comp(i, j), d.comp(j), factor)?;
            out.comp_mut(i).add_assign(&prod, 1.0);
        }
    }
    Ok(out)
}

/// (A d)_i = A_ij d_j; third component zero in 2D.
pub fn a_d(a: &TensorField, d: &VectorField, factor: f64) -> Result<VectorField> {
    omega_d(a, d, factor)
}

/// (u.grad) v componentwise, staged.
pub fn advect(u: &VectorField, v: &VectorField, factor: f64) -> Result<VectorField> {
    let grid = *u.grid();
    let dim = grid.dim();
    let mut out = VectorField::zeros_spectral(grid, v.ncomp());
    for (c, vc) in v.comps().iter().enumerate() {
        for j in 0..dim {
            let prod = dealias_multiply(u.comp(j), &vc.partial(j, 1), factor)?;
            out.comp_mut(c).add_assign(&prod, 1.0);
        }
    }
    Ok(out)
}

/// Corotational rate N = d_t + (u.grad)d -/+ Omega d.
pub fn corotational_rate(
    d_t: &VectorField,
    u: &VectorField,
    d: &VectorField,
    omega: &TensorField,
    convention: OmegaConvention,
    factor: f64,
) -> Result<VectorField> {
    if d_t.grid() != u.grid() || d_t.grid() != d.grid() {
        return Err(NematicError::GridMismatch);
    }
    let mut n = advect(u, d, factor)?;
    let od = omega_d(omega, d, factor)?;
    let sign = match convention {
        OmegaConvention::Standard => -1.0,
        OmegaConvention::Flipped => 1.0,
    };
    for i in 0..n.ncomp() {
        n.comp_mut(i).add_assign(d_t.comp(i), 1.0);
        n.comp_mut(i).add_assign(od.comp(i), sign);
    }
    Ok(n)
}

/// Leslie stress
/// sigma_ij = mu1 d_k A_kp d_p d_i d_j + mu2 N_i d_j + mu3 d_i N_j
///          + mu4 A_ij + mu5 A_ik d_k d_j + mu6 d_i A_jk d_k.
pub fn leslie_stress(
    c: &LeslieCoefficients,
    a: &TensorField,
    n: &VectorField,
    d: &VectorField,
    factor: f64,
) -> Result<TensorField> {
    let grid = *a.grid();
    let dim = a.dim();
    let r = a_d(a, d, factor)?; // r_i = A_ik d_k
    // s = d.r, q_i = s d_i (each stage quadratic in truncated operands)
    let mut s = Field::zeros_spectral(grid);
    for i in 0..dim {
        s.add_assign(&dealias_multiply(d.comp(i), r.comp(i), factor)?, 1.0);
    }
    let mut sigma = TensorField::zeros_spectral(grid);
    // the mu2/mu3 and mu5/mu6 pairs share products up to transposition
    let need_nd = c.mu2 != 0.0 || c.mu3 != 0.0;
    let need_rd = c.mu5 != 0.0 || c.mu6 != 0.0;
    let mut nd = Vec::new();
    let mut rd = Vec::new();
    for i in 0..dim {
        for j in 0..dim {
            if need_nd {
                nd.push(dealias_multiply(n.comp(i), d.comp(j), factor)?);
            }
            if need_rd {
                rd.push(dealias_multiply(r.comp(i), d.comp(j), factor)?);
            }
        }
    }
    for i in 0..dim {
        let qi = if c.mu1 != 0.0 {
            Some(dealias_multiply(&s, d.comp(i), factor)?)
        } else {
            None
        };
        for j in 0..dim {
            let out = sigma.comp_mut(i, j);
            if let Some(qi) = &qi {
                out.add_assign(&dealias_multiply(qi, d.comp(j), factor)?, c.mu1);
            }
            if need_nd {
                out.add_assign(&nd[i * dim + j], c.mu2);
                out.add_assign(&nd[j * dim + i], c.mu3);
            }
            if c.mu4 != 0.0 {
                out.add_assign(a.comp(i, j), c.mu4);
            }
            if need_rd {
                out.add_assign(&rd[i * dim + j], c.mu5);
                out.add_assign(&rd[j * dim + i], c.mu6);
            }
        }
    }
    Ok(sigma)
}

/// Ericksen stress: entries (grad d x grad d)_ij = d_i d . d_j d, where the
/// dot runs over all three director components.
pub fn ericksen_stress(d: &VectorField, factor: f64) -> Result<TensorField> {
    let grid = *d.grid();
    let dim = grid.dim();
    let mut t = TensorField::zeros_spectral(grid);
    for c in d.comps() {
        let grads: Vec<Field> = (0..dim).map(|ax| c.partial(ax, 1)).collect();
        for i in 0..dim {
            for j in i..dim {
                let prod = dealias_multiply(&grads[i], &grads[j], factor)?;
                t.comp_mut(i, j).add_assign(&prod, 1.0);
                if j > i {
                    t.comp_mut(j, i).add_assign(&prod, 1.0);
                }
            }
        }
    }
    Ok(t)
}

/// Total, elastic, kinetic, penalty energies:
/// kinetic = int rho |u|^2 / 2, elastic = int |grad d|^2 / 2,
/// penalty = int (|d|^2 - 1)^2 / (4 eta^2).
pub fn energies(
    rho: &Field,
    u: &VectorField,
    d: &VectorField,
    eta: f64,
) -> Result<(f64, f64, f64)> {
    let mut kinetic = 0.0;
    for c in u.comps() {
        kinetic += 0.5 * integrate_product(&[rho, c, c])?;
    }
    let mut elastic = 0.0;
    for c in d.comps() {
        for ax in 0..d.grid().dim() {
            let g = c.partial(ax, 1);
            let n = g.l2_norm();
            elastic += 0.5 * n * n;
        }
    }
    // (|d|^2-1)^2 expanded so every integral is an exact product quadrature
    let mut quartic = 0.0;
    let mut quad = 0.0;
    for a in d.comps() {
        let n = a.l2_norm();
        quad += n * n;
        for b in d.comps() {
            quartic += integrate_product(&[a, a, b, b])?;
        }
    }
    let penalty = (quartic - 2.0 * quad + 1.0) / (4.0 * eta * eta);
    Ok((kinetic, elastic, penalty))
}

/// N recovered from the director equation: on a solution,
/// N = -(1/lambda1)(lap d - f(d)) - (lambda2/lambda1) A d.
pub fn corotational_rate_from_state(
    c: &LeslieCoefficients,
    a: &TensorField,
    d: &VectorField,
    factor: f64,
) -> Result<VectorField> {
    let l1 = c.lambda1();
    if l1 == 0.0 {
        return Err(NematicError::Inadmissible(vec!["lambda1 != 0".to_string()]));
    }
    let f = penalty_force_with(d, c.eta, factor)?;
    let r = a_d(a, d, factor)?;
    let mut n = VectorField::zeros_spectral(*d.grid(), d.ncomp());
    for i in 0..d.ncomp() {
        let out = n.comp_mut(i);
        out.add_assign(&d.comp(i).laplacian(), -1.0 / l1);
        out.add_assign(f.comp(i), 1.0 / l1);
        out.add_assign(r.comp(i), -c.lambda2() / l1);
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    fn grid2(n: usize) -> PeriodicGrid {
        PeriodicGrid::square(2, n).unwrap()
    }

    fn shear_u(g: PeriodicGrid) -> VectorField {
        VectorField::new(vec![
            Field::from_fn(g, |x| (TAU * x[1]).sin()),
            Field::constant(g, 0.0),
        ])
        .unwrap()
    }

    #[test]
    fn kinematics_of_shear() {
        let g = grid2(16);
        let kin = kinematics(&shear_u(g));
        let mut a12 = kin.a.comp(0, 1).clone();
        a12.ensure_physical();
        let mut o21 = kin.omega.comp(1, 0).clone();
        o21.ensure_physical();
        for i in 0..g.len() {
            let y = g.coords(i)[1];
            let expect = std::f64::consts::PI * (TAU * y).cos();
            assert!((a12.physical_data().unwrap()[i] - expect).abs() < 1e-11);
            assert!((o21.physical_data().unwrap()[i] + expect).abs() < 1e-11);
        }
        assert!(kin.a.comp(0, 0).l2_norm() < 1e-13);
        assert!(kin.a.comp(1, 1).l2_norm() < 1e-13);
    }

    #[test]
    fn trace_free_strain_for_streamfunction_flow() {
        let g = grid2(16);
        let psi = Field::from_fn(g, |x| (TAU * x[0]).sin() * (TAU * x[1]).sin());
        let mut u = VectorField::new(vec![psi.partial(1, 1), psi.partial(0, 1)]).unwrap();
        u.comp_mut(0).scale(-1.0);
        let kin = kinematics(&u);
        let mut trace = kin.a.comp(0, 0).clone();
        trace.add_assign(kin.a.comp(1, 1), 1.0);
        assert!(trace.linf_norm() < 1e-11);
    }

    #[test]
    fn penalty_force_examples() {
        let g = grid2(8);
        // unit director
        let d = VectorField::new(vec![
            Field::constant(g, 1.0),
            Field::constant(g, 0.0),
            Field::constant(g, 0.0),
        ])
        .unwrap();
        let f = penalty_force(&d, 1.0).unwrap();
        assert!(f.comp(0).l2_norm() < 1e-13);
        // d = (2,0,0): f = (6,0,0)
        let d = VectorField::new(vec![
            Field::constant(g, 2.0),
            Field::constant(g, 0.0),
            Field::constant(g, 0.0),
        ])
        .unwrap();
        let f = penalty_force(&d, 1.0).unwrap();
        assert!((f.comp(0).integrate() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn leslie_stress_mu4_only() {
        let g = grid2(16);
        let u = shear_u(g);
        let kin = kinematics(&u);
        let c = LeslieCoefficients::new([0.0, 0.0, 0.0, 1.0, 0.0, 0.0], 0.5).unwrap();
        let d = VectorField::zeros_spectral(g, 3);
        let n = VectorField::zeros_spectral(g, 3);
        let sigma = leslie_stress(&c, &kin.a, &n, &d, 2.0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut diff = sigma.comp(i, j).clone();
                diff.add_assign(kin.a.comp(i, j), -1.0);
                assert!(diff.l2_norm() < 1e-13);
            }
        }
    }

    #[test]
    fn ericksen_stress_director_wave() {
        let g = grid2(16);
        let d = VectorField::new(vec![
            Field::from_fn(g, |x| (TAU * x[0]).cos()),
            Field::from_fn(g, |x| (TAU * x[0]).sin()),
            Field::constant(g, 0.0),
        ])
        .unwrap();
        let t = ericksen_stress(&d, 2.0).unwrap();
        assert!((t.comp(0, 0).integrate() - TAU * TAU).abs() < 1e-10);
        assert!(t.comp(0, 1).l2_norm() < 1e-12);
        assert!(t.comp(1, 1).l2_norm() < 1e-12);
    }

    #[test]
    fn ericksen_divergence_identity() {
        // -div(grad d x grad d) = -lap d . grad d - grad(|grad d|^2 / 2)
        let g = grid2(24);
        let d = VectorField::new(vec![
            Field::from_fn(g, |x| {
                1.0 + 0.3 * (TAU * x[0]).cos() * (TAU * 2.0 * x[1]).sin()
            }),
            Field::from_fn(g, |x| 0.2 * (TAU * (x[0] + x[1])).sin()),
            Field::from_fn(g, |x| 0.1 * (TAU * 2.0 * x[0]).cos()),
        ])
        .unwrap();
        let lhs = ericksen_stress(&d, 2.0).unwrap().divergence();
        let mut rhs = VectorField::zeros_spectral(g, 2);
        // lap d . d_i d  +  d_i (|grad d|^2)/2
        for c in d.comps() {
            let lap = c.laplacian();
            for i in 0..2 {
                rhs.comp_mut(i)
                    .add_assign(&dealias_multiply(&lap, &c.partial(i, 1), 2.0).unwrap(), 1.0);
            }
            for ax in 0..2 {
                let gax = c.partial(ax, 1);
                let sq = dealias_multiply(&gax, &gax, 2.0).unwrap();
                for i in 0..2 {
                    rhs.comp_mut(i).add_assign(&sq.partial(i, 1), 0.5);
                }
            }
        }
        for i in 0..2 {
            let mut diff = lhs.comp(i).clone();
            diff.add_assign(rhs.comp(i), -1.0);
            assert!(diff.l2_norm() < 1e-10, "component {i}: {}", diff.l2_norm());
        }
    }

    #[test]
    fn energies_closed_forms() {
        let g = grid2(16);
        // d = (cos 2pi x, sin 2pi x, 0): elastic 2 pi^2, penalty 0
        let d = VectorField::new(vec![
            Field::from_fn(g, |x| (TAU * x[0]).cos()),
            Field::from_fn(g, |x| (TAU * x[0]).sin()),
            Field::constant(g, 0.0),
        ])
        .unwrap();
        let rho = Field::constant(g, 2.0);
        let u = shear_u(g);
        let (kin, el, pen) = energies(&rho, &u, &d, 0.5).unwrap();
        assert!((el - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-10);
        assert!(pen.abs() < 1e-12);
        assert!((kin - 0.5).abs() < 1e-12);
    }
}
