//! Leslie viscosity coefficients, derived rotational/stretching parameters,
//! and admissibility checks that gate every simulation.

use crate::error::{NematicError, Result};
use crate::field::{integrate_product, Field, VectorField};

pub const PARODI_TOL_DEFAULT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeslieCoefficients {
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub mu4: f64,
    pub mu5: f64,
    pub mu6: f64,
    pub eta: f64,
}

impl LeslieCoefficients {
    pub fn new(mu: [f64; 6], eta: f64) -> Result<Self> {
        if !(eta > 0.0) {
            return Err(NematicError::Inadmissible(vec![format!(
                "eta > 0 (got {eta})"
            )]));
        }
        Ok(LeslieCoefficients {
            mu1: mu[0],
            mu2: mu[1],
            mu3: mu[2],
            mu4: mu[3],
            mu5: mu[4],
            mu6: mu[5],
            eta,
        })
    }

    /// Rotational viscosity; always recomputed, never stored.
    pub fn lambda1(&self) -> f64 {
        self.mu2 - self.mu3
    }

    /// Stretching parameter; always recomputed, never stored.
    pub fn lambda2(&self) -> f64 {
        self.mu5 - self.mu6
    }
}

pub fn derive_lambdas(mu: [f64; 6]) -> (f64, f64) {
    (mu[1] - mu[2], mu[4] - mu[5])
}

/// Onsager reciprocity residual: (mu5 - mu6) + (mu2 + mu3).
pub fn check_parodi(c: &LeslieCoefficients, tol: f64) -> (f64, bool) {
    let residual = (c.mu5 - c.mu6) + (c.mu2 + c.mu3);
    (residual, residual.abs() <= tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime2d {
    CaseI,
    CaseII,
    Neither,
}

impl std::fmt::Display for Regime2d {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime2d::CaseI => write!(f, "CaseI"),
            Regime2d::CaseII => write!(f, "CaseII"),
            Regime2d::Neither => write!(f, "Neither"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    pub parodi_residual: f64,
    pub parodi_ok: bool,
    pub dissipation_ok: bool,
    pub regime_2d: Regime2d,
    pub violations: Vec<String>,
}

impl AdmissibilityReport {
    pub fn ok(&self) -> bool {
        self.dissipation_ok && self.parodi_ok
    }
}

/// Check the dissipation conditions lambda1 < 0, mu1 >= 0, mu4 > 0,
/// mu5 + mu6 >= 0 and lambda2^2/(-lambda1) <= mu5 + mu6, and classify the
/// 2D coupling regime. Failure is data, not an error.
pub fn check_dissipation(c: &LeslieCoefficients) -> AdmissibilityReport {
    let l1 = c.lambda1();
    let l2 = c.lambda2();
    let mut violations = Vec::new();
    if l1 == 0.0 {
        // lambda1 divides the director equation; zero is its own failure mode.
        violations.push("lambda1 != 0".to_string());
    } else if l1 > 0.0 {
        violations.push("lambda1 < 0".to_string());
    }
    if c.mu1 < 0.0 {
        violations.push("mu1 >= 0".to_string());
    }
    if !(c.mu4 > 0.0) {
        violations.push("mu4 > 0".to_string());
    }
    if c.mu5 + c.mu6 < 0.0 {
        violations.push("mu5 + mu6 >= 0".to_string());
    }
    if l1 < 0.0 && l2 * l2 / (-l1) > c.mu5 + c.mu6 {
        violations.push("lambda2^2/(-lambda1) <= mu5 + mu6".to_string());
    }
    let regime_2d = if l2 == 0.0 && c.mu1 >= 0.0 {
        Regime2d::CaseI
    } else if c.mu1 == 0.0 && l2 != 0.0 {
        Regime2d::CaseII
    } else {
        Regime2d::Neither
    };
    let (parodi_residual, parodi_ok) = check_parodi(c, PARODI_TOL_DEFAULT);
    AdmissibilityReport {
        parodi_residual,
        parodi_ok,
        dissipation_ok: violations.is_empty(),
        regime_2d,
        violations,
    }
}

/// Smallness functional of the initial data:
/// (M2/mu4 + 1) * sum_{|a|<=1} |sqrt(rho0) D^a u0|_2^2 + |d0|_H1^2
/// + |lap d0 - f(d0)|_2^2.
pub fn small_data_functional(
    c: &LeslieCoefficients,
    m2: f64,
    rho0: &Field,
    u0: &VectorField,
    d0: &VectorField,
) -> Result<f64> {
    if !(c.mu4 > 0.0) {
        return Err(NematicError::Inadmissible(vec!["mu4 > 0".to_string()]));
    }
    if rho0.grid() != u0.grid() || rho0.grid() != d0.grid() {
        return Err(NematicError::GridMismatch);
    }
    let mut u_h1 = 0.0;
    for comp in u0.comps() {
        u_h1 += integrate_product(&[rho0, comp, comp])?;
        for ax in 0..u0.grid().dim() {
            let du = comp.partial(ax, 1);
            u_h1 += integrate_product(&[rho0, &du, &du])?;
        }
    }
    let mut d_h1 = 0.0;
    for comp in d0.comps() {
        let n = comp.l2_norm();
        d_h1 += n * n;
        for ax in 0..d0.grid().dim() {
            let n = comp.partial(ax, 1).l2_norm();
            d_h1 += n * n;
        }
    }
    let mut resid = 0.0;
    let f = crate::constitutive::penalty_force(d0, c.eta)?;
    for (comp, fc) in d0.comps().iter().zip(f.comps()) {
        let mut g = comp.laplacian();
        g.add_assign(fc, -1.0);
        let n = g.l2_norm();
        resid += n * n;
    }
    Ok((m2 / c.mu4 + 1.0) * u_h1 + d_h1 + resid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::PeriodicGrid;

    fn coeffs(mu: [f64; 6]) -> LeslieCoefficients {
        LeslieCoefficients::new(mu, 0.5).unwrap()
    }

    #[test]
    fn lambda_derivation() {
        assert_eq!(derive_lambdas([0.0, -1.0, 1.0, 0.0, 1.0, 1.0]), (-2.0, 0.0));
        assert_eq!(derive_lambdas([0.0; 6]), (0.0, 0.0));
        assert_eq!(derive_lambdas([0.0, 1.0, 0.0, 0.0, 2.0, 1.0]), (1.0, 1.0));
    }

    #[test]
    fn parodi_examples() {
        let (r, ok) = check_parodi(&coeffs([0.0, -1.0, 1.0, 1.0, 1.0, 1.0]), 1e-12);
        assert_eq!(r, 0.0);
        assert!(ok);
        let (r, ok) = check_parodi(&coeffs([0.0, 1.0, 0.0, 1.0, 2.0, 1.0]), 1e-12);
        assert_eq!(r, 2.0);
        assert!(!ok);
        let (r, ok) = check_parodi(&coeffs([0.0, -2.0, 1.0, 1.0, 0.0, -1.0]), 1e-12);
        assert_eq!(r, 0.0);
        assert!(ok);
    }

    #[test]
    fn dissipation_examples() {
        let rep = check_dissipation(&coeffs([0.0, -1.0, 1.0, 1.0, 1.0, 1.0]));
        assert!(rep.dissipation_ok, "{:?}", rep.violations);
        assert_eq!(rep.regime_2d, Regime2d::CaseI);

        let rep = check_dissipation(&coeffs([0.0, -2.0, 0.0, 1.0, 1.0, 0.0]));
        assert!(rep.dissipation_ok, "{:?}", rep.violations);
        assert_eq!(rep.regime_2d, Regime2d::CaseII);

        let rep = check_dissipation(&coeffs([0.0, -1.0, 1.0, 0.0, 1.0, 1.0]));
        assert!(!rep.dissipation_ok);
        assert!(rep.violations.iter().any(|v| v == "mu4 > 0"));
    }

    #[test]
    fn lambda1_zero_is_distinct_violation() {
        let rep = check_dissipation(&coeffs([0.0, 1.0, 1.0, 1.0, 0.0, 0.0]));
        assert!(rep.violations.iter().any(|v| v == "lambda1 != 0"));
    }

    #[test]
    fn mu4_monotonicity() {
        // if admissible at mu4, admissible at any larger mu4
        let base = [1.0, -1.5, 0.5, 2.0, 1.0, 0.0];
        assert!(check_dissipation(&coeffs(base)).dissipation_ok);
        let mut bigger = base;
        bigger[3] = 10.0;
        assert!(check_dissipation(&coeffs(bigger)).dissipation_ok);
    }

    #[test]
    fn small_data_constant_director() {
        let g = PeriodicGrid::square(2, 8).unwrap();
        let c = coeffs([0.0, -1.0, 1.0, 1.0, 1.0, 1.0]);
        let rho = Field::constant(g, 1.0);
        let u = VectorField::new(vec![Field::constant(g, 0.0), Field::constant(g, 0.0)]).unwrap();
        let d = VectorField::new(vec![
            Field::constant(g, 1.0),
            Field::constant(g, 0.0),
            Field::constant(g, 0.0),
        ])
        .unwrap();
        let v = small_data_functional(&c, 2.0, &rho, &u, &d).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "{v}");
        let d0 = VectorField::zeros_spectral(g, 3);
        let v = small_data_functional(&c, 2.0, &rho, &u, &d0).unwrap();
        assert!(v.abs() < 1e-14);
    }
}
