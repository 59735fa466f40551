//! Numerical evaluation of the analytic machinery: energy law sides,
//! higher-order energy, Sobolev norms, cancellation identities, weak-form
//! residuals, and the weak-strong distance functional.

use crate::coefficients::LeslieCoefficients;
use crate::constitutive::{self, kinematics};
use crate::error::{NematicError, Result};
use crate::field::{integrate_product, Field, VectorField};
use crate::grid::PeriodicGrid;
use crate::pad::Pad;
use crate::solver::{State, StepperConfig};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// High-order quadrature workspace: fields evaluated on a grid padded far
/// enough that pointwise products of up to six band-limited factors
/// integrate exactly (mode zero is alias-free).
struct Quad {
    pad: Pad,
}

impl Quad {
    fn new(grid: PeriodicGrid, degree: usize) -> Self {
        let n = *grid.shape().iter().min().unwrap() as f64;
        let factor = degree as f64 / 2.0 + 2.0 / n;
        Quad {
            pad: Pad::new(grid, factor.max(1.0)),
        }
    }

    fn phys(&self, f: &Field) -> Vec<f64> {
        self.pad.to_phys(self.pad.pad(&f.spectral_copy()))
    }

    fn len(&self) -> usize {
        self.pad.padded_len()
    }
}

fn mean(vals: &[f64]) -> f64 {
    vals.iter().sum::<f64>() / vals.len() as f64
}

/// H^m norm via spectral weights: sum over multi-indices |a| <= m of the
/// squared L2 norms of D^a f.
pub fn sobolev_norm(f: &Field, m: usize) -> f64 {
    let grid = *f.grid();
    let dim = grid.dim();
    let spec = f.spectral_copy();
    let mut total = 0.0;
    for (flat, c) in spec.iter().enumerate() {
        let k = grid.wave_at(flat);
        let kappa2: Vec<f64> = (0..dim).map(|ax| (TAU * k[ax] as f64).powi(2)).collect();
        let mut weight = 0.0;
        // enumerate multi-indices of total order <= m over `dim` axes
        let mut alpha = vec![0usize; dim];
        loop {
            let order: usize = alpha.iter().sum();
            if order <= m {
                let mut w = 1.0;
                for ax in 0..dim {
                    w *= kappa2[ax].powi(alpha[ax] as i32);
                }
                weight += w;
            }
            // odometer over 0..=m per axis
            let mut ax = 0;
            loop {
                if ax == dim {
                    break;
                }
                alpha[ax] += 1;
                if alpha[ax] > m {
                    alpha[ax] = 0;
                    ax += 1;
                } else {
                    break;
                }
            }
            if ax == dim {
                break;
            }
        }
        total += weight * c.norm_sqr();
    }
    total.sqrt()
}

pub fn sobolev_norm_vec(v: &VectorField, m: usize) -> f64 {
    v.comps()
        .iter()
        .map(|c| {
            let n = sobolev_norm(c, m);
            n * n
        })
        .sum::<f64>()
        .sqrt()
}

/// Exact |grad u|_2^2 (all dim^2 entries) by Parseval.
fn grad_norm_sq(u: &VectorField) -> f64 {
    let dim = u.grid().dim();
    let mut total = 0.0;
    for c in u.comps() {
        for ax in 0..dim {
            let n = c.partial(ax, 1).l2_norm();
            total += n * n;
        }
    }
    total
}

/// Pointwise samples of the penalty force f(d) on the quadrature grid,
/// exact (no truncation of intermediates).
fn penalty_phys(q: &Quad, d_phys: &[Vec<f64>], eta: f64) -> Vec<Vec<f64>> {
    let len = q.len();
    let inv_eta2 = 1.0 / (eta * eta);
    let mut out = vec![vec![0.0; len]; d_phys.len()];
    for p in 0..len {
        let w: f64 = d_phys.iter().map(|c| c[p] * c[p]).sum();
        for (c, o) in d_phys.iter().zip(out.iter_mut()) {
            o[p] = (w - 1.0) * c[p] * inv_eta2;
        }
    }
    out
}

/// |lap d - f(d)|_2^2 by exact quadrature.
pub fn lap_d_minus_f_norm_sq(d: &VectorField, eta: f64) -> f64 {
    let q = Quad::new(*d.grid(), 6);
    let d_phys: Vec<Vec<f64>> = d.comps().iter().map(|c| q.phys(c)).collect();
    let f_phys = penalty_phys(&q, &d_phys, eta);
    let mut total = 0.0;
    for (c, f) in d.comps().iter().zip(&f_phys) {
        let lap = q.phys(&c.laplacian());
        total += mean(
            &lap.iter()
                .zip(f)
                .map(|(l, fv)| (l - fv) * (l - fv))
                .collect::<Vec<_>>(),
        );
    }
    total
}

/// Right-hand side of the basic energy law:
/// -mu1 int |d^T A d|^2 - (mu4/2) |grad u|^2 + (1/lambda1) |lap d - f|^2
/// - (mu5 + mu6 + lambda2^2/lambda1) |A d|^2.
pub fn dissipation_rhs(s: &State, c: &LeslieCoefficients) -> Result<f64> {
    let grid = s.grid();
    let dim = grid.dim();
    let q = Quad::new(grid, 6);
    let kin = kinematics(&s.u);
    let d_phys: Vec<Vec<f64>> = s.d.comps().iter().map(|c| q.phys(c)).collect();
    let mut a_phys = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            a_phys.push(q.phys(kin.a.comp(i, j)));
        }
    }
    let len = q.len();
    // int |d^T A d|^2 and int |A d|^2
    let (mut dtad2, mut ad2) = (0.0, 0.0);
    for p in 0..len {
        let mut s_val = 0.0;
        for i in 0..dim {
            let mut r = 0.0;
            for j in 0..dim {
                r += a_phys[i * dim + j][p] * d_phys[j][p];
            }
            s_val += d_phys[i][p] * r;
            ad2 += r * r;
        }
        dtad2 += s_val * s_val;
    }
    dtad2 /= len as f64;
    ad2 /= len as f64;
    let lapdf2 = lap_d_minus_f_norm_sq(&s.d, c.eta);
    let l1 = c.lambda1();
    let l2 = c.lambda2();
    Ok(-c.mu1 * dtad2 - 0.5 * c.mu4 * grad_norm_sq(&s.u) + lapdf2 / l1
        - (c.mu5 + c.mu6 + l2 * l2 / l1) * ad2)
}

fn average_state(a: &State, b: &State) -> State {
    let mut rho = a.rho.clone();
    rho.ensure_spectral();
    rho.scale(0.5);
    rho.add_assign(&b.rho, 0.5);
    let avg_vec = |x: &VectorField, y: &VectorField| {
        let mut out = x.clone();
        out.ensure_spectral();
        for i in 0..out.ncomp() {
            out.comp_mut(i).scale(0.5);
            out.comp_mut(i).add_assign(y.comp(i), 0.5);
        }
        out
    };
    State {
        rho,
        u: avg_vec(&a.u, &b.u),
        d: avg_vec(&a.d, &b.d),
        t: 0.5 * (a.t + b.t),
        m1: a.m1,
        m2: a.m2,
    }
}

/// Discrete check of the basic energy law between two consecutive states:
/// lhs = (E_next - E)/dt, rhs = dissipation at the averaged state.
pub fn energy_balance(
    s: &State,
    s_next: &State,
    c: &LeslieCoefficients,
    dt: f64,
) -> Result<(f64, f64, f64)> {
    let (k0, e0, p0) = constitutive::energies(&s.rho, &s.u, &s.d, c.eta)?;
    let (k1, e1, p1) = constitutive::energies(&s_next.rho, &s_next.u, &s_next.d, c.eta)?;
    let lhs = ((k1 + e1 + p1) - (k0 + e0 + p0)) / dt;
    let rhs = dissipation_rhs(&average_state(s, s_next), c)?;
    Ok((lhs, rhs, lhs - rhs))
}

/// Higher-order energy |sqrt(rho) grad u|_2^2 + |lap d - f(d)|_2^2.
pub fn phi_squared(s: &State, eta: f64) -> Result<f64> {
    let dim = s.grid().dim();
    let mut weighted = 0.0;
    for c in s.u.comps() {
        for ax in 0..dim {
            let g = c.partial(ax, 1);
            weighted += integrate_product(&[&s.rho, &g, &g])?;
        }
    }
    Ok(weighted + lap_d_minus_f_norm_sq(&s.d, eta))
}

/// The three time-integrand companions of the higher-order estimate:
/// (|lap u|_2^2, |grad(lap d - f)|_2^2, |d^T grad A d|_2^2).
pub fn phi_companions(s: &State, eta: f64) -> Result<(f64, f64, f64)> {
    let grid = s.grid();
    let dim = grid.dim();
    let lap_u_sq: f64 = s
        .u
        .comps()
        .iter()
        .map(|c| {
            let n = c.laplacian().l2_norm();
            n * n
        })
        .sum();

    let q = Quad::new(grid, 6);
    let d_phys: Vec<Vec<f64>> = s.d.comps().iter().map(|c| q.phys(c)).collect();
    let len = q.len();
    // grad f assembled from exact pointwise products of d and its gradients
    let mut grad_lapdf_sq = 0.0;
    let inv_eta2 = 1.0 / (eta * eta);
    let d_grads: Vec<Vec<Vec<f64>>> = s
        .d
        .comps()
        .iter()
        .map(|c| (0..dim).map(|ax| q.phys(&c.partial(ax, 1))).collect())
        .collect();
    for ax in 0..dim {
        for (ci, c) in s.d.comps().iter().enumerate() {
            let lap_grad = q.phys(&c.laplacian().partial(ax, 1));
            let mut acc = 0.0;
            for p in 0..len {
                let w: f64 = d_phys.iter().map(|x| x[p] * x[p]).sum();
                let dw: f64 = 2.0
                    * d_phys
                        .iter()
                        .zip(&d_grads)
                        .map(|(x, g)| x[p] * g[ax][p])
                        .sum::<f64>();
                let df = (dw * d_phys[ci][p] + (w - 1.0) * d_grads[ci][ax][p]) * inv_eta2;
                let v = lap_grad[p] - df;
                acc += v * v;
            }
            grad_lapdf_sq += acc / len as f64;
        }
    }

    // |d^T grad A d|_2^2 with (d^T grad A d)_l = d_i d_l A_ij d_j
    let kin = kinematics(&s.u);
    let mut grad_a = vec![vec![Vec::new(); dim * dim]; dim];
    for l in 0..dim {
        for i in 0..dim {
            for j in 0..dim {
                grad_a[l][i * dim + j] = q.phys(&kin.a.comp(i, j).partial(l, 1));
            }
        }
    }
    let mut dtgad_sq = 0.0;
    for p in 0..len {
        for l in 0..dim {
            let mut v = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    v += d_phys[i][p] * grad_a[l][i * dim + j][p] * d_phys[j][p];
                }
            }
            dtgad_sq += v * v;
        }
    }
    dtgad_sq /= len as f64;
    Ok((lap_u_sq, grad_lapdf_sq, dtgad_sq))
}

#[derive(Debug, Clone, Copy)]
pub struct CancellationResiduals {
    /// (mu2 + mu3 + lambda2) * int d_j N_i lap A_ij
    pub pair_a: f64,
    /// (mu2 - mu3 - lambda1) * int d_j N_i lap Omega_ij
    pub pair_b: f64,
    /// (mu5 - mu6 - lambda2) * int (Ad)_i lap Omega_ij d_j
    pub pair_c: f64,
    /// int (d_k d_p A_kp d_i d_j) lap Omega_ij (zero by antisymmetry)
    pub antisymmetry: f64,
    /// -(mu5 + mu6 + lambda2^2/lambda1) * int |d grad A|^2 (must be <= 0)
    pub sign_term: f64,
}

/// Evaluate the paired cancellation identities of the higher-order energy
/// estimate by exact padded quadrature. N is recovered from the director
/// equation. All pairs vanish when the coefficient relations and Parodi hold.
pub fn cancellation_check(
    u: &VectorField,
    d: &VectorField,
    c: &LeslieCoefficients,
) -> Result<CancellationResiduals> {
    let grid = *u.grid();
    let dim = grid.dim();
    let l1 = c.lambda1();
    let l2 = c.lambda2();
    if l1 == 0.0 {
        return Err(NematicError::Inadmissible(vec!["lambda1 != 0".to_string()]));
    }
    let q = Quad::new(grid, 6);
    let len = q.len();
    let kin = kinematics(u);
    let d_phys: Vec<Vec<f64>> = d.comps().iter().map(|c| q.phys(c)).collect();
    let f_phys = penalty_phys(&q, &d_phys, c.eta);
    let lap_d: Vec<Vec<f64>> = d.comps().iter().map(|c| q.phys(&c.laplacian())).collect();
    let mut a_phys = vec![Vec::new(); dim * dim];
    let mut lap_a = vec![Vec::new(); dim * dim];
    let mut lap_o = vec![Vec::new(); dim * dim];
    let mut grad_a = vec![vec![Vec::new(); dim * dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            a_phys[i * dim + j] = q.phys(kin.a.comp(i, j));
            lap_a[i * dim + j] = q.phys(&kin.a.comp(i, j).laplacian());
            lap_o[i * dim + j] = q.phys(&kin.omega.comp(i, j).laplacian());
            for l in 0..dim {
                grad_a[l][i * dim + j] = q.phys(&kin.a.comp(i, j).partial(l, 1));
            }
        }
    }

    let (mut j_a, mut j_o, mut j_ao, mut antis, mut dgrada2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in 0..len {
        // Ad and N at this point
        let mut ad = [0.0f64; 3];
        for i in 0..dim {
            for j in 0..dim {
                ad[i] += a_phys[i * dim + j][p] * d_phys[j][p];
            }
        }
        let mut n_val = [0.0f64; 3];
        for i in 0..3 {
            let g = lap_d[i][p] - f_phys[i][p];
            let a_term = if i < dim { ad[i] } else { 0.0 };
            n_val[i] = -g / l1 - l2 * a_term / l1;
        }
        let mut dtad = 0.0;
        for i in 0..dim {
            dtad += d_phys[i][p] * ad[i];
        }
        for i in 0..dim {
            for j in 0..dim {
                j_a += d_phys[j][p] * n_val[i] * lap_a[i * dim + j][p];
                j_o += d_phys[j][p] * n_val[i] * lap_o[i * dim + j][p];
                j_ao += ad[i] * lap_o[i * dim + j][p] * d_phys[j][p];
                antis += dtad * d_phys[i][p] * d_phys[j][p] * lap_o[i * dim + j][p];
            }
        }
        for l in 0..dim {
            for i in 0..dim {
                let mut v = 0.0;
                for k in 0..dim {
                    v += d_phys[k][p] * grad_a[l][k * dim + i][p];
                }
                dgrada2 += v * v;
            }
        }
    }
    let scale = 1.0 / len as f64;
    j_a *= scale;
    j_o *= scale;
    j_ao *= scale;
    antis *= scale;
    dgrada2 *= scale;

    Ok(CancellationResiduals {
        pair_a: (c.mu2 + c.mu3) * j_a + l2 * j_a,
        pair_b: (c.mu2 - c.mu3) * j_o - l1 * j_o,
        pair_c: (c.mu5 - c.mu6) * j_ao - l2 * j_ao,
        antisymmetry: antis,
        sign_term: -(c.mu5 + c.mu6 + l2 * l2 / l1) * dgrada2,
    })
}

/// Polynomial in t with real coefficients, lowest degree first.
#[derive(Debug, Clone)]
pub struct Poly {
    pub coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Poly { coeffs }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn deriv(&self) -> Poly {
        Poly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect(),
        }
    }
}

fn inner(a: &Field, b: &Field) -> Result<f64> {
    integrate_product(&[a, b])
}

/// Space-time weak-form residuals (mass, momentum, director) along a
/// trajectory stored at uniform cadence, for a divergence-free vector test
/// function phi and a temporal weight psi with psi(T) = 0.
///
/// The identities are the weak formulation that strong solutions satisfy
/// after integration by parts in time, with the momentum equation tested in
/// the conservative form (rho u) against divergence-free phi (so the
/// pressure drops out). The scalar test for the mass equation is the sum of
/// phi's components; the director test embeds phi with zero third component.
pub fn weak_residual(
    traj: &[State],
    c: &LeslieCoefficients,
    cfg: &StepperConfig,
    phi: &VectorField,
    psi: &Poly,
) -> Result<(f64, f64, f64)> {
    if traj.len() < 8 {
        return Err(NematicError::InsufficientCadence {
            got: traj.len(),
            need: 8,
        });
    }
    let grid = traj[0].grid();
    let dim = grid.dim();
    let factor = cfg.dealias_factor;
    let psi_t = psi.deriv();
    let t_end = traj.last().unwrap().t;
    if psi.eval(t_end).abs() > 1e-12 {
        return Err(NematicError::Unsatisfiable(format!(
            "psi(T) must vanish, got {}",
            psi.eval(t_end)
        )));
    }
    // scalar test and its gradient
    let mut phi_s = Field::zeros_spectral(grid);
    for i in 0..dim {
        phi_s.add_assign(phi.comp(i), 1.0);
    }
    let grad_phi_s: Vec<Field> = (0..dim).map(|ax| phi_s.partial(ax, 1)).collect();
    let grad_phi: Vec<Vec<Field>> = (0..dim)
        .map(|i| (0..dim).map(|ax| phi.comp(i).partial(ax, 1)).collect())
        .collect();

    let mut mass_vals = Vec::with_capacity(traj.len());
    let mut mom_vals = Vec::with_capacity(traj.len());
    let mut dir_vals = Vec::with_capacity(traj.len());
    let mut times = Vec::with_capacity(traj.len());
    for s in traj {
        let (pt, pv) = (psi_t.eval(s.t), psi.eval(s.t));
        times.push(s.t);

        let mut m = pt * inner(&s.rho, &phi_s)?;
        for i in 0..dim {
            m += pv * integrate_product(&[&s.rho, s.u.comp(i), &grad_phi_s[i]])?;
        }
        mass_vals.push(m);

        let kin = kinematics(&s.u);
        let n_field = constitutive::corotational_rate_from_state(c, &kin.a, &s.d, factor)?;
        let sigma = constitutive::leslie_stress(c, &kin.a, &n_field, &s.d, factor)?;
        let eric = constitutive::ericksen_stress(&s.d, factor)?;
        let mut v = 0.0;
        for i in 0..dim {
            v += pt * integrate_product(&[&s.rho, s.u.comp(i), phi.comp(i)])?;
            for j in 0..dim {
                v += pv
                    * integrate_product(&[&s.rho, s.u.comp(i), s.u.comp(j), &grad_phi[i][j]])?;
                v += pv * inner(eric.comp(i, j), &grad_phi[i][j])?;
                v -= pv * inner(sigma.comp(i, j), &grad_phi[i][j])?;
            }
        }
        mom_vals.push(v);

        let adv = constitutive::advect(&s.u, &s.d, factor)?;
        let od = constitutive::omega_d(&kin.omega, &s.d, factor)?;
        let ad = constitutive::a_d(&kin.a, &s.d, factor)?;
        let f = constitutive::penalty_force_with(&s.d, c.eta, factor)?;
        let l1 = c.lambda1();
        let l2 = c.lambda2();
        let mut w = 0.0;
        for i in 0..dim {
            w += pt * inner(s.d.comp(i), phi.comp(i))?;
            w -= pv * inner(adv.comp(i), phi.comp(i))?;
            w += pv * inner(od.comp(i), phi.comp(i))?;
            w -= pv * (l2 / l1) * inner(ad.comp(i), phi.comp(i))?;
            let mut g = s.d.comp(i).laplacian();
            g.add_assign(f.comp(i), -1.0);
            w -= pv * (1.0 / l1) * inner(&g, phi.comp(i))?;
        }
        dir_vals.push(w);
    }

    let trapz = |vals: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 1..vals.len() {
            acc += 0.5 * (vals[i] + vals[i - 1]) * (times[i] - times[i - 1]);
        }
        acc
    };
    let s0 = &traj[0];
    let psi0 = psi.eval(s0.t);
    let mut mass_res = trapz(&mass_vals) + psi0 * inner(&s0.rho, &phi_s)?;
    let mut mom_res = trapz(&mom_vals);
    let mut dir_res = trapz(&dir_vals);
    for i in 0..dim {
        mom_res += psi0 * integrate_product(&[&s0.rho, s0.u.comp(i), phi.comp(i)])?;
        dir_res += psi0 * inner(s0.d.comp(i), phi.comp(i))?;
    }
    // keep residuals scale-aware but simple: no normalization applied
    mass_res = mass_res.abs();
    mom_res = mom_res.abs();
    dir_res = dir_res.abs();
    Ok((mass_res, mom_res, dir_res))
}

/// Gronwall distance between a (possibly coarser) state and a reference:
/// 1/2 int |rho - rho_bar|^2 + rho_bar |u - u_bar|^2 + |grad(d - d_bar)|^2.
/// The coarser state is lifted spectrally onto the finer grid.
pub fn weak_strong_distance(s: &State, s_bar: &State) -> Result<f64> {
    if s.grid().len() >= s_bar.grid().len() {
        let lifted = lift_state(s_bar, s.grid())?;
        distance_same_grid(s, &lifted)
    } else {
        let lifted = lift_state(s, s_bar.grid())?;
        distance_same_grid(&lifted, s_bar)
    }
}

fn lift_state(s: &State, target: PeriodicGrid) -> Result<State> {
    let lift_vec = |v: &VectorField| -> Result<VectorField> {
        VectorField::new(
            v.comps()
                .iter()
                .map(|c| c.lift_to(target))
                .collect::<Result<Vec<_>>>()?,
        )
    };
    Ok(State {
        rho: s.rho.lift_to(target)?,
        u: lift_vec(&s.u)?,
        d: lift_vec(&s.d)?,
        t: s.t,
        m1: s.m1,
        m2: s.m2,
    })
}

fn distance_same_grid(s: &State, s_bar: &State) -> Result<f64> {
    let dim = s.grid().dim();
    let mut drho = s.rho.clone();
    drho.ensure_spectral();
    drho.add_assign(&s_bar.rho, -1.0);
    let mut total = drho.l2_norm().powi(2);
    for i in 0..dim {
        let mut du = s.u.comp(i).clone();
        du.ensure_spectral();
        du.add_assign(s_bar.u.comp(i), -1.0);
        total += integrate_product(&[&s_bar.rho, &du, &du])?;
    }
    for i in 0..s.d.ncomp() {
        let mut dd = s.d.comp(i).clone();
        dd.ensure_spectral();
        dd.add_assign(s_bar.d.comp(i), -1.0);
        for ax in 0..dim {
            total += dd.partial(ax, 1).l2_norm().powi(2);
        }
    }
    Ok(0.5 * total)
}

/// Running maximum of |d|_inf over a trajectory of reports; the flag raises
/// when it exceeds max(1, |d0|_inf) + 1e-3.
pub fn max_principle_monitor(linf_d_series: &[f64]) -> (f64, bool) {
    if linf_d_series.is_empty() {
        return (0.0, false);
    }
    let bound = linf_d_series[0].max(1.0) + 1e-3;
    let running_max = linf_d_series.iter().cloned().fold(0.0f64, f64::max);
    (running_max, running_max > bound)
}

/// 2D Gagliardo-Nirenberg ratio |f|_4^4 / (|f|_2^2 (|grad f|_2^2 + |f|_2^2));
/// exposed for observation, no constant asserted.
pub fn gn_ratio_2d(f: &Field) -> Result<f64> {
    let l4_4 = integrate_product(&[f, f, f, f])?;
    let l2_sq = f.l2_norm().powi(2);
    let mut grad_sq = 0.0;
    for ax in 0..f.grid().dim() {
        grad_sq += f.partial(ax, 1).l2_norm().powi(2);
    }
    Ok(l4_4 / (l2_sq * (grad_sq + l2_sq)))
}

/// One diagnostic row of a run.
#[derive(Debug, Clone)]
pub struct EnergyReport {
    pub t: f64,
    pub kinetic: f64,
    pub elastic: f64,
    pub penalty: f64,
    pub total: f64,
    pub dissipation_rhs: f64,
    pub energy_residual: f64,
    pub phi2: f64,
    pub h1_u: f64,
    pub h1_d: f64,
    pub l2_lapd_f: f64,
    pub linf_d: f64,
    pub mass: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub div_u_inf: f64,
}

impl EnergyReport {
    pub fn csv_header() -> &'static str {
        "t,E_kin,E_el,E_pen,E_tot,diss_rhs,e_resid,phi2,h1_u,h1_d,l2_lapd_f,linf_d,mass,rho_min,rho_max,div_u_inf"
    }

    pub fn csv_row(&self) -> String {
        let v = [
            self.t,
            self.kinetic,
            self.elastic,
            self.penalty,
            self.total,
            self.dissipation_rhs,
            self.energy_residual,
            self.phi2,
            self.h1_u,
            self.h1_d,
            self.l2_lapd_f,
            self.linf_d,
            self.mass,
            self.rho_min,
            self.rho_max,
            self.div_u_inf,
        ];
        v.iter()
            .map(|x| format!("{:.16e}", x))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Assemble the full diagnostic row; `prev` is the state at the previous
/// report (the same state at t=0, giving zero residual there).
pub fn energy_report(
    s: &State,
    prev: &State,
    c: &LeslieCoefficients,
    _cfg: &StepperConfig,
) -> Result<EnergyReport> {
    let (kinetic, elastic, penalty) = constitutive::energies(&s.rho, &s.u, &s.d, c.eta)?;
    let total = kinetic + elastic + penalty;
    let (dissipation_rhs, energy_residual) = if s.t > prev.t {
        let (_, rhs, resid) = energy_balance(prev, s, c, s.t - prev.t)?;
        (rhs, resid)
    } else {
        (dissipation_rhs_only(s, c)?, 0.0)
    };
    let mut rho = s.rho.clone();
    rho.ensure_physical();
    let (mut rho_min, mut rho_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in rho.physical_data()? {
        rho_min = rho_min.min(v);
        rho_max = rho_max.max(v);
    }
    Ok(EnergyReport {
        t: s.t,
        kinetic,
        elastic,
        penalty,
        total,
        dissipation_rhs,
        energy_residual,
        phi2: phi_squared(s, c.eta)?,
        h1_u: sobolev_norm_vec(&s.u, 1),
        h1_d: sobolev_norm_vec(&s.d, 1),
        l2_lapd_f: lap_d_minus_f_norm_sq(&s.d, c.eta).sqrt(),
        linf_d: s.d.linf_norm(),
        mass: s.rho.integrate(),
        rho_min,
        rho_max,
        div_u_inf: s.u.divergence().linf_norm(),
    })
}

fn dissipation_rhs_only(s: &State, c: &LeslieCoefficients) -> Result<f64> {
    dissipation_rhs(s, c)
}
