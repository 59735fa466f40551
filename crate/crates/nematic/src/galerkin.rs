//! Low-mode Galerkin oracle: the velocity is expanded in the divergence-free
//! Stokes eigenbasis of the torus and its amplitudes are advanced through
//! the quadrature-assembled ODE system, while density and director evolve on
//! a companion grid. A pseudo-spectral counterpart restricted to the same
//! modes provides the cross-check.

use nalgebra::{DMatrix, DVector};

use crate::coefficients::LeslieCoefficients;
use crate::constitutive::{self, kinematics};
use crate::error::{NematicError, Result};
use crate::field::{dealias_multiply, Field, VectorField};
use crate::grid::PeriodicGrid;
use crate::pad::Pad;

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Which momentum equation the oracle integrates: the printed approximate
/// system has unit viscosity `lap u` and a minus sign on `div sigma`
/// (`Anse`); the strong formulation has `+div sigma` and all viscosity
/// inside sigma (`EqL2`). Both readings are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MomentumForm {
    #[default]
    Anse,
    EqL2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trig {
    Cos,
    Sin,
}

/// One divergence-free, zero-mean, unit-norm trigonometric velocity mode:
/// sqrt(2) * e * cos/sin(2 pi k.x), with e a unit polarization normal to k.
#[derive(Debug, Clone)]
pub struct BasisMode {
    pub k: [i64; 3],
    pub polarization: Vec<f64>,
    pub trig: Trig,
    /// Stokes eigenvalue |2 pi k|^2.
    pub eigenvalue: f64,
}

fn polarizations(k: [i64; 3], dim: usize) -> Vec<Vec<f64>> {
    let kf: Vec<f64> = (0..dim).map(|i| k[i] as f64).collect();
    let norm = kf.iter().map(|x| x * x).sum::<f64>().sqrt();
    if dim == 2 {
        vec![vec![-kf[1] / norm, kf[0] / norm]]
    } else {
        // e1 = normalize(k x a), a = ez unless k is parallel to ez
        let a = if k[0] == 0 && k[1] == 0 {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 0.0, 1.0]
        };
        let cross = |p: &[f64], q: &[f64]| {
            vec![
                p[1] * q[2] - p[2] * q[1],
                p[2] * q[0] - p[0] * q[2],
                p[0] * q[1] - p[1] * q[0],
            ]
        };
        let normalize = |mut v: Vec<f64>| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= n);
            v
        };
        let e1 = normalize(cross(&kf, &a));
        let e2 = normalize(cross(&kf, &e1));
        vec![e1, e2]
    }
}

/// Enumerate the first `m` basis modes, ordered by eigenvalue, then
/// lexicographic wavevector, then polarization index, with cos before sin.
pub fn enumerate_basis(dim: usize, m: usize) -> Vec<BasisMode> {
    let mut modes = Vec::new();
    let mut kmax = 1i64;
    while modes.len() < m {
        modes.clear();
        let range = -kmax..=kmax;
        let mut push = |k: [i64; 3]| {
            // half-space representative: first nonzero component positive
            let first = k.iter().find(|&&x| x != 0).copied().unwrap_or(0);
            if first <= 0 {
                return;
            }
            let k2: i64 = k.iter().map(|x| x * x).sum();
            for e in polarizations(k, dim) {
                for trig in [Trig::Cos, Trig::Sin] {
                    modes.push(BasisMode {
                        k,
                        polarization: e.clone(),
                        trig,
                        eigenvalue: TAU * TAU * k2 as f64,
                    });
                }
            }
        };
        if dim == 2 {
            for k0 in range.clone() {
                for k1 in range.clone() {
                    push([k0, k1, 0]);
                }
            }
        } else {
            for k0 in range.clone() {
                for k1 in range.clone() {
                    for k2 in range.clone() {
                        push([k0, k1, k2]);
                    }
                }
            }
        }
        modes.sort_by(|a, b| {
            a.eigenvalue
                .partial_cmp(&b.eigenvalue)
                .unwrap()
                .then(a.k.cmp(&b.k))
                .then(
                    a.polarization
                        .partial_cmp(&b.polarization)
                        .unwrap()
                        .reverse(),
                )
                .then((a.trig == Trig::Sin).cmp(&(b.trig == Trig::Sin)))
        });
        if modes.len() >= m {
            break;
        }
        kmax += 1;
    }
    modes.truncate(m);
    modes
}

/// Materialize one basis mode as a physical vector field on `grid`.
pub fn basis_field(mode: &BasisMode, grid: PeriodicGrid) -> VectorField {
    let dim = grid.dim();
    let comps = (0..dim)
        .map(|c| {
            let e = mode.polarization[c];
            let k = mode.k;
            let trig = mode.trig;
            Field::from_fn(grid, move |x| {
                let phase: f64 = TAU
                    * x.iter()
                        .zip(k.iter())
                        .map(|(xi, ki)| xi * *ki as f64)
                        .sum::<f64>();
                let t = match trig {
                    Trig::Cos => phase.cos(),
                    Trig::Sin => phase.sin(),
                };
                std::f64::consts::SQRT_2 * e * t
            })
        })
        .collect();
    let mut v = VectorField::new(comps).unwrap();
    v.ensure_spectral();
    v
}

pub struct GalerkinSystem {
    pub m: usize,
    pub grid: PeriodicGrid,
    pub modes: Vec<BasisMode>,
    pub basis: Vec<VectorField>,
    pub g: DVector<f64>,
    pub rho: Field,
    pub d: VectorField,
    pub coeffs: LeslieCoefficients,
    pub form: MomentumForm,
    pub dealias_factor: f64,
}

impl GalerkinSystem {
    pub fn new(
        grid: PeriodicGrid,
        m: usize,
        coeffs: LeslieCoefficients,
        form: MomentumForm,
        rho: Field,
        d: VectorField,
        u0: &VectorField,
    ) -> Result<Self> {
        if m > 16 {
            return Err(NematicError::Unsatisfiable(format!(
                "oracle mode count {m} exceeds the cap"
            )));
        }
        let modes = enumerate_basis(grid.dim(), m);
        let basis: Vec<VectorField> = modes.iter().map(|md| basis_field(md, grid)).collect();
        let mut g = DVector::zeros(m);
        for (i, phi) in basis.iter().enumerate() {
            g[i] = inner_vec(u0, phi);
        }
        let mut rho = rho;
        rho.ensure_spectral();
        let mut d = d;
        d.ensure_spectral();
        Ok(GalerkinSystem {
            m,
            grid,
            modes,
            basis,
            g,
            rho,
            d,
            coeffs,
            form,
            dealias_factor: 2.0,
        })
    }

    pub fn velocity(&self) -> VectorField {
        synthesize(&self.basis, self.g.as_slice(), self.grid)
    }
}

/// L2 inner product of two band-limited vector fields (exact, spectral).
pub fn inner_vec(a: &VectorField, b: &VectorField) -> f64 {
    let mut total = 0.0;
    for (ac, bc) in a.comps().iter().zip(b.comps()) {
        let sa = ac.spectral_copy();
        let sb = bc.spectral_copy();
        total += sa
            .iter()
            .zip(&sb)
            .map(|(x, y)| (x * y.conj()).re)
            .sum::<f64>();
    }
    total
}

fn synthesize(basis: &[VectorField], g: &[f64], grid: PeriodicGrid) -> VectorField {
    let dim = grid.dim();
    let mut u = VectorField::zeros_spectral(grid, dim);
    for (phi, &gi) in basis.iter().zip(g) {
        for c in 0..dim {
            u.comp_mut(c).add_assign(phi.comp(c), gi);
        }
    }
    u
}

/// Assembled ODE coefficients.
pub struct Assembled {
    pub a: DMatrix<f64>,
    /// b[j][(i,k)] multiplies g_i g_k in equation j.
    pub b: Vec<DMatrix<f64>>,
    pub c_diag: DVector<f64>,
    pub d: DVector<f64>,
}

/// Quadrature assembly of the ODE system exactly as displayed: A from the
/// weighted Gram matrix, B from the advection trilinear form, C from the
/// Stokes eigenvalues, D from the elastic and Leslie stresses tested
/// against the basis gradients. Pointwise quadrature happens on a grid
/// padded enough for the sextic products to integrate exactly.
pub fn assemble(sys: &GalerkinSystem) -> Result<Assembled> {
    let grid = sys.grid;
    let dim = grid.dim();
    let m = sys.m;
    let cf = &sys.coeffs;
    let pad = Pad::new(grid, 3.0 + 2.0 / grid.shape()[0] as f64);
    let len = pad.padded_len();
    let phys = |f: &Field| pad.to_phys(pad.pad(&f.spectral_copy()));

    let rho_p = phys(&sys.rho);
    // basis values and gradients
    let mut phi_p = vec![vec![Vec::new(); dim]; m];
    let mut dphi_p = vec![vec![vec![Vec::new(); dim]; dim]; m]; // [i][comp][axis]
    for i in 0..m {
        for c in 0..dim {
            phi_p[i][c] = phys(sys.basis[i].comp(c));
            for ax in 0..dim {
                dphi_p[i][c][ax] = phys(&sys.basis[i].comp(c).partial(ax, 1));
            }
        }
    }
    // director values, gradients, laplacian
    let d_p: Vec<Vec<f64>> = sys.d.comps().iter().map(|c| phys(c)).collect();
    let dd_p: Vec<Vec<Vec<f64>>> = sys
        .d
        .comps()
        .iter()
        .map(|c| (0..dim).map(|ax| phys(&c.partial(ax, 1))).collect())
        .collect();
    let lapd_p: Vec<Vec<f64>> = sys.d.comps().iter().map(|c| phys(&c.laplacian())).collect();

    let mut a = DMatrix::zeros(m, m);
    let mut b = vec![DMatrix::zeros(m, m); m];
    for i in 0..m {
        for j in i..m {
            let mut acc = 0.0;
            for c in 0..dim {
                for p in 0..len {
                    acc += rho_p[p] * phi_p[i][c][p] * phi_p[j][c][p];
                }
            }
            a[(i, j)] = acc / len as f64;
            a[(j, i)] = a[(i, j)];
        }
    }
    for j in 0..m {
        for i in 0..m {
            for k in 0..m {
                let mut acc = 0.0;
                for p in 0..len {
                    let mut v = 0.0;
                    for cb in 0..dim {
                        let mut adv = 0.0;
                        for ca in 0..dim {
                            adv += phi_p[i][ca][p] * dphi_p[k][cb][ca][p];
                        }
                        v += adv * phi_p[j][cb][p];
                    }
                    acc += rho_p[p] * v;
                }
                b[j][(i, k)] = acc / len as f64;
            }
        }
    }
    let c_diag = DVector::from_iterator(m, sys.modes.iter().map(|md| md.eigenvalue));

    // velocity-dependent tensors from the current amplitudes
    let l1 = cf.lambda1();
    let l2 = cf.lambda2();
    let mut d_vec = DVector::zeros(m);
    let inv_eta2 = 1.0 / (cf.eta * cf.eta);
    let sigma_sign = match sys.form {
        MomentumForm::Anse => 1.0,
        MomentumForm::EqL2 => -1.0,
    };
    for p in 0..len {
        // A_kl at this point
        let mut a_t = [[0.0f64; 3]; 3];
        for k in 0..dim {
            for l in 0..dim {
                let mut v = 0.0;
                for (i, gi) in sys.g.iter().enumerate() {
                    v += gi * 0.5 * (dphi_p[i][k][l][p] + dphi_p[i][l][k][p]);
                }
                a_t[k][l] = v;
            }
        }
        let dv: Vec<f64> = (0..3).map(|c| d_p[c][p]).collect();
        let w: f64 = dv.iter().map(|x| x * x).sum();
        let mut ad = [0.0f64; 3];
        for k in 0..dim {
            for l in 0..dim {
                ad[k] += a_t[k][l] * dv[l];
            }
        }
        let mut n_v = [0.0f64; 3];
        for c in 0..3 {
            let f_c = (w - 1.0) * dv[c] * inv_eta2;
            n_v[c] = -(lapd_p[c][p] - f_c) / l1 - l2 * ad[c] / l1;
        }
        let dtad: f64 = (0..dim).map(|k| dv[k] * ad[k]).sum();
        for j in 0..m {
            let mut acc = 0.0;
            for k in 0..dim {
                for l in 0..dim {
                    // Ericksen entry: full 3-component dot of gradients
                    let t_kl: f64 = (0..3).map(|c| dd_p[c][k][p] * dd_p[c][l][p]).sum();
                    let sigma_kl = cf.mu1 * dtad * dv[k] * dv[l]
                        + cf.mu2 * n_v[k] * dv[l]
                        + cf.mu3 * dv[k] * n_v[l]
                        + cf.mu4 * a_t[k][l]
                        + cf.mu5 * ad[k] * dv[l]
                        + cf.mu6 * dv[k] * ad[l];
                    acc += (t_kl + sigma_sign * sigma_kl) * dphi_p[j][k][l][p];
                }
            }
            d_vec[j] += acc;
        }
    }
    d_vec /= len as f64;

    Ok(Assembled {
        a,
        b,
        c_diag,
        d: d_vec,
    })
}

fn gdot(sys: &GalerkinSystem, asm: &Assembled) -> Result<DVector<f64>> {
    let m = sys.m;
    let mut rhs = asm.d.clone();
    for j in 0..m {
        let mut quad = 0.0;
        for i in 0..m {
            for k in 0..m {
                quad += asm.b[j][(i, k)] * sys.g[i] * sys.g[k];
            }
        }
        rhs[j] -= quad;
        if sys.form == MomentumForm::Anse {
            rhs[j] -= asm.c_diag[j] * sys.g[j];
        }
    }
    asm.a
        .clone()
        .cholesky()
        .map(|ch| ch.solve(&rhs))
        .ok_or_else(|| NematicError::Unsatisfiable("singular Gram matrix".into()))
}

fn scalar_advection(u: &VectorField, f: &Field, factor: f64) -> Result<Field> {
    let mut out = Field::zeros_spectral(*f.grid());
    for ax in 0..u.grid().dim() {
        out.add_assign(&dealias_multiply(u.comp(ax), &f.partial(ax, 1), factor)?, -1.0);
    }
    Ok(out)
}

fn director_rhs(
    u: &VectorField,
    d: &VectorField,
    c: &LeslieCoefficients,
    factor: f64,
) -> Result<VectorField> {
    let grid = *u.grid();
    let kin = kinematics(u);
    let f = constitutive::penalty_force_with(d, c.eta, factor)?;
    let ad = constitutive::a_d(&kin.a, d, factor)?;
    let od = constitutive::omega_d(&kin.omega, d, factor)?;
    let adv = constitutive::advect(u, d, factor)?;
    let l1 = c.lambda1();
    let l2 = c.lambda2();
    let mut d_t = VectorField::zeros_spectral(grid, 3);
    for i in 0..3 {
        let out = d_t.comp_mut(i);
        out.add_assign(adv.comp(i), -1.0);
        out.add_assign(od.comp(i), 1.0);
        out.add_assign(ad.comp(i), -l2 / l1);
        let mut glap = d.comp(i).laplacian();
        glap.add_assign(f.comp(i), -1.0);
        out.add_assign(&glap, -1.0 / l1);
    }
    Ok(d_t)
}

#[derive(Clone)]
struct OracleDeriv {
    g: DVector<f64>,
    rho: Field,
    d: VectorField,
}

fn oracle_deriv(sys: &GalerkinSystem) -> Result<OracleDeriv> {
    let asm = assemble(sys)?;
    let gd = gdot(sys, &asm)?;
    let u = sys.velocity();
    let rho_t = scalar_advection(&u, &sys.rho, sys.dealias_factor)?;
    let d_t = director_rhs(&u, &sys.d, &sys.coeffs, sys.dealias_factor)?;
    Ok(OracleDeriv {
        g: gd,
        rho: rho_t,
        d: d_t,
    })
}

fn advanced(sys: &GalerkinSystem, k: &OracleDeriv, h: f64) -> GalerkinSystem {
    let mut rho = sys.rho.clone();
    rho.add_assign(&k.rho, h);
    let mut d = sys.d.clone();
    for i in 0..3 {
        d.comp_mut(i).add_assign(k.d.comp(i), h);
    }
    GalerkinSystem {
        m: sys.m,
        grid: sys.grid,
        modes: sys.modes.clone(),
        basis: sys.basis.clone(),
        g: &sys.g + h * &k.g,
        rho,
        d,
        coeffs: sys.coeffs,
        form: sys.form,
        dealias_factor: sys.dealias_factor,
    }
}

/// Classical RK4 on the coupled (g, rho, d) system; returns the sampled
/// amplitude trajectory (one row per step, starting with the initial g).
pub fn integrate_ode(sys: &mut GalerkinSystem, dt: f64, t_final: f64) -> Result<Vec<DVector<f64>>> {
    let steps = (t_final / dt).round() as usize;
    let mut traj = Vec::with_capacity(steps + 1);
    traj.push(sys.g.clone());
    for _ in 0..steps {
        let k1 = oracle_deriv(sys)?;
        let s2 = advanced(sys, &k1, 0.5 * dt);
        let k2 = oracle_deriv(&s2)?;
        let s3 = advanced(sys, &k2, 0.5 * dt);
        let k3 = oracle_deriv(&s3)?;
        let s4 = advanced(sys, &k3, dt);
        let k4 = oracle_deriv(&s4)?;
        sys.g += dt / 6.0 * (&k1.g + 2.0 * &k2.g + 2.0 * &k3.g + &k4.g);
        let mut rho = sys.rho.clone();
        rho.add_assign(&k1.rho, dt / 6.0);
        rho.add_assign(&k2.rho, dt / 3.0);
        rho.add_assign(&k3.rho, dt / 3.0);
        rho.add_assign(&k4.rho, dt / 6.0);
        sys.rho = rho;
        for i in 0..3 {
            let dc = sys.d.comp_mut(i);
            dc.add_assign(k1.d.comp(i), dt / 6.0);
            dc.add_assign(k2.d.comp(i), dt / 3.0);
            dc.add_assign(k3.d.comp(i), dt / 3.0);
            dc.add_assign(k4.d.comp(i), dt / 6.0);
        }
        if !sys.g.iter().all(|x| x.is_finite()) {
            return Err(NematicError::Unsatisfiable(
                "oracle amplitudes became non-finite".into(),
            ));
        }
        traj.push(sys.g.clone());
    }
    Ok(traj)
}

/// Pseudo-spectral counterpart restricted to the same modes: the momentum
/// right-hand side is evaluated with the staged dealiased operators of the
/// main solver and then projected onto span{phi_1..phi_m}. Requires
/// constant density (the weighted projection is the identity there).
pub struct Counterpart {
    pub u: VectorField,
    pub rho: Field,
    pub d: VectorField,
}

fn project_span(basis: &[VectorField], v: &VectorField, grid: PeriodicGrid) -> VectorField {
    let g: Vec<f64> = basis.iter().map(|phi| inner_vec(v, phi)).collect();
    synthesize(basis, &g, grid)
}

fn counterpart_deriv(
    st: &Counterpart,
    basis: &[VectorField],
    c: &LeslieCoefficients,
    form: MomentumForm,
    factor: f64,
) -> Result<(VectorField, Field, VectorField)> {
    let grid = *st.u.grid();
    let dim = grid.dim();
    let kin = kinematics(&st.u);
    let n_field = constitutive::corotational_rate_from_state(c, &kin.a, &st.d, factor)?;
    let sigma = constitutive::leslie_stress(c, &kin.a, &n_field, &st.d, factor)?;
    let div_sigma = sigma.divergence();
    let div_t = constitutive::ericksen_stress(&st.d, factor)?.divergence();
    let adv_u = constitutive::advect(&st.u, &st.u, factor)?;
    let mut rhs = VectorField::zeros_spectral(grid, dim);
    for i in 0..dim {
        let out = rhs.comp_mut(i);
        out.add_assign(&dealias_multiply(&st.rho, adv_u.comp(i), factor)?, -1.0);
        out.add_assign(div_t.comp(i), -1.0);
        match form {
            MomentumForm::Anse => {
                out.add_assign(div_sigma.comp(i), -1.0);
                out.add_assign(&st.u.comp(i).laplacian(), 1.0);
            }
            MomentumForm::EqL2 => {
                out.add_assign(div_sigma.comp(i), 1.0);
            }
        }
    }
    let u_t = project_span(basis, &rhs, grid);
    let rho_t = scalar_advection(&st.u, &st.rho, factor)?;
    let d_t = director_rhs(&st.u, &st.d, c, factor)?;
    Ok((u_t, rho_t, d_t))
}

/// RK4 for the counterpart; returns the amplitude trajectory with respect
/// to the shared basis.
pub fn integrate_counterpart(
    st: &mut Counterpart,
    basis: &[VectorField],
    c: &LeslieCoefficients,
    form: MomentumForm,
    factor: f64,
    dt: f64,
    t_final: f64,
) -> Result<Vec<DVector<f64>>> {
    let grid = *st.u.grid();
    let dim = grid.dim();
    let steps = (t_final / dt).round() as usize;
    let amplitudes = |u: &VectorField| {
        DVector::from_iterator(basis.len(), basis.iter().map(|phi| inner_vec(u, phi)))
    };
    let mut traj = Vec::with_capacity(steps + 1);
    st.u = project_span(basis, &st.u, grid);
    traj.push(amplitudes(&st.u));
    for _ in 0..steps {
        let k1 = counterpart_deriv(st, basis, c, form, factor)?;
        let at = |h: f64, k: &(VectorField, Field, VectorField)| -> Counterpart {
            let mut u = st.u.clone();
            for i in 0..dim {
                u.comp_mut(i).add_assign(k.0.comp(i), h);
            }
            let mut rho = st.rho.clone();
            rho.add_assign(&k.1, h);
            let mut d = st.d.clone();
            for i in 0..3 {
                d.comp_mut(i).add_assign(k.2.comp(i), h);
            }
            Counterpart { u, rho, d }
        };
        let k2 = counterpart_deriv(&at(0.5 * dt, &k1), basis, c, form, factor)?;
        let k3 = counterpart_deriv(&at(0.5 * dt, &k2), basis, c, form, factor)?;
        let k4 = counterpart_deriv(&at(dt, &k3), basis, c, form, factor)?;
        for i in 0..dim {
            let uc = st.u.comp_mut(i);
            uc.add_assign(k1.0.comp(i), dt / 6.0);
            uc.add_assign(k2.0.comp(i), dt / 3.0);
            uc.add_assign(k3.0.comp(i), dt / 3.0);
            uc.add_assign(k4.0.comp(i), dt / 6.0);
        }
        let rc = &mut st.rho;
        rc.add_assign(&k1.1, dt / 6.0);
        rc.add_assign(&k2.1, dt / 3.0);
        rc.add_assign(&k3.1, dt / 3.0);
        rc.add_assign(&k4.1, dt / 6.0);
        for i in 0..3 {
            let dc = st.d.comp_mut(i);
            dc.add_assign(k1.2.comp(i), dt / 6.0);
            dc.add_assign(k2.2.comp(i), dt / 3.0);
            dc.add_assign(k3.2.comp(i), dt / 3.0);
            dc.add_assign(k4.2.comp(i), dt / 6.0);
        }
        traj.push(amplitudes(&st.u));
    }
    Ok(traj)
}

/// Discrepancy report between the two trajectories.
pub struct OracleComparison {
    pub max_discrepancy: f64,
    pub l2_discrepancy: f64,
    pub per_mode_max: Vec<f64>,
}

pub fn compare_trajectories(a: &[DVector<f64>], b: &[DVector<f64>]) -> OracleComparison {
    let m = a.first().map(|v| v.len()).unwrap_or(0);
    let mut per_mode_max = vec![0.0f64; m];
    let mut l2 = 0.0;
    for (ga, gb) in a.iter().zip(b) {
        for i in 0..m {
            let d = (ga[i] - gb[i]).abs();
            per_mode_max[i] = per_mode_max[i].max(d);
            l2 += d * d;
        }
    }
    OracleComparison {
        max_discrepancy: per_mode_max.iter().cloned().fold(0.0, f64::max),
        l2_discrepancy: (l2 / a.len().max(1) as f64).sqrt(),
        per_mode_max,
    }
}
