//! The singular-term reduction chain: the absolutely convergent
//! mid-chain representation of the singular orbital sum (2-dimensional
//! quadrature against the slice transform with a double Hecke sum), its
//! fully reduced closed form (Gamma and Bessel-Mellin factors), the
//! cusp-fiber vanishing checks, and the contour integrand that drives the
//! final smallness estimate.
//!
//! Both representations are independent re-derivations from the same
//! starting integral, so their agreement is the module's core acceptance.

use crate::maass::{MaassError, MaassForm};
use crate::quad::{de_finite, gl_composite};
use crate::special::{bessel_k, gamma_complex, KBesselTable, SpecialError};
use crate::testfn::{slice_bound, SliceTable, TestFnMinus};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SingularError {
    #[error("(s, w) outside the absolute-convergence region: Re w = {0}")]
    OutsideRegion(f64),
    #[error("Gamma factor too close to a pole")]
    NearPole,
    #[error("truncation limits insufficient; first neglected term (l, m) = {0:?}")]
    Truncation((u64, u64)),
    #[error(transparent)]
    Maass(#[from] MaassError),
    #[error(transparent)]
    Special(#[from] SpecialError),
}

/// Parameters of the singular-term evaluation, s = 1/2 + i tau.
#[derive(Clone, Copy, Debug)]
pub struct SingularSpec {
    pub tau: f64,
    pub w: Complex64,
    pub k: u32,
    pub l_max: u64,
    pub m_max: u64,
}

impl SingularSpec {
    pub fn new(tau: f64, w: Complex64, k: u32) -> Self {
        Self {
            tau,
            w,
            k,
            l_max: 600,
            m_max: 200,
        }
    }

    pub fn s(&self) -> Complex64 {
        Complex64::new(0.5, self.tau)
    }

    /// q = 1 - s + w.
    pub fn q(&self) -> Complex64 {
        Complex64::new(0.5, -self.tau) + self.w
    }

    fn check_region(&self) -> Result<(), SingularError> {
        if self.w.re <= -0.25 {
            return Err(SingularError::OutsideRegion(self.w.re));
        }
        Ok(())
    }
}

/// Result of the mid-chain evaluation with its epsilon split (the two
/// half-space slice contributions; equal by evenness of the test function).
#[derive(Clone, Copy, Debug)]
pub struct SigmaMid {
    pub value: Complex64,
    pub eps_plus: Complex64,
    pub eps_minus: Complex64,
}

/// The double Hecke sum over (l, m): sum rho(3 l m) l^{-2q-1/2} m^{1/2-6q}.
fn hecke_double_sum(
    spec: &SingularSpec,
    phi: &MaassForm,
) -> Result<Complex64, SingularError> {
    let q = spec.q();
    let el = -2.0 * q - 0.5;
    let em = 0.5 - 6.0 * q;
    let mut acc = Complex64::new(0.0, 0.0);
    for l in 1..=spec.l_max {
        let lw = (el.re * (l as f64).ln()).exp();
        let mut row = Complex64::new(0.0, 0.0);
        let mut row_bound = 0.0f64;
        for m in 1..=spec.m_max {
            let mw = (em.re * (m as f64).ln()).exp();
            let bound = 3.0 * ((3 * l * m) as f64).powf(0.25) * lw * mw;
            row_bound = row_bound.max(bound);
            if bound < 1e-18 * acc.norm().max(1e-12) {
                break;
            }
            let rho = match phi.rho(3 * l * m) {
                Ok(v) => v,
                Err(_) => {
                    if bound > 1e-12 * acc.norm().max(1e-12) {
                        return Err(SingularError::Truncation((l, m)));
                    }
                    continue;
                }
            };
            row += rho
                * ((el * (l as f64).ln()).exp())
                * ((em * (m as f64).ln()).exp());
        }
        acc += row;
        if row_bound < 1e-18 * acc.norm().max(1e-12) && l > 4 {
            break;
        }
    }
    Ok(acc)
}

/// Fully reduced closed form of the singular sum:
///
///   Sigma(q) = S_lm(q) · 4 pi · 3^{3/2-6q}/6 · 2^{2q} Gamma(k+2-2q)
///              (pi/3)^{1/2-2q} / Gamma(1-2q) · K_nu(2) · INT,
///
/// (the 4 pi is the constant of the coordinate Jacobian at the orbit
/// parameterization step)
///   INT = ∫_0^∞ alpha^{4q-1} K_nu(2 pi alpha) K_{2q-1/2}(2 pi alpha/3) dalpha,
///
/// with the alpha-integral through the K-Bessel Mellin pair.
pub fn sigma_closed(spec: &SingularSpec, phi: &MaassForm) -> Result<Complex64, SingularError> {
    spec.check_region()?;
    let q = spec.q();
    let nu = phi.nu();
    let s_lm = hecke_double_sum(spec, phi)?;
    let g_top = gamma_complex(Complex64::new(spec.k as f64 + 2.0, 0.0) - 2.0 * q)
        .map_err(|_| SingularError::NearPole)?;
    let g_bot = gamma_complex(Complex64::new(1.0, 0.0) - 2.0 * q)
        .map_err(|_| SingularError::NearPole)?;
    let k2 = bessel_k(nu, 2.0)?.value;
    let ik = crate::special::mellin_kk(
        nu,
        2.0 * q - 0.5,
        2.0 * std::f64::consts::PI,
        2.0 * std::f64::consts::PI / 3.0,
        4.0 * q,
    )?;
    let c3 = ((1.5 - 6.0 * q) * 3.0_f64.ln()).exp() / 6.0;
    let c2 = (2.0 * q * 2.0_f64.ln()).exp();
    let cpi = ((0.5 - 2.0 * q) * (std::f64::consts::PI / 3.0).ln()).exp();
    let jac = 4.0 * std::f64::consts::PI;
    Ok(s_lm * jac * c3 * c2 * cpi * g_top / g_bot * k2 * ik)
}

/// Shared slice-transform table (k = 6), built lazily on first use.
pub fn shared_slice_table() -> &'static SliceTable {
    static TABLE: std::sync::OnceLock<SliceTable> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| SliceTable::build(6, 160.0, 30.0, 340, 210))
}

/// Mid-chain representation: 2 × ∫∫ lambda^{4q-1} t
///   sum_{l,m} rho(3lm) K_nu(6 pi l m t²) G(l t³/lambda, 3 m lambda / t)
/// dlambda/lambda dt, with the (l, m) sum truncated on rigorous envelopes.
pub fn sigma_mid(
    spec: &SingularSpec,
    phi: &MaassForm,
    table: &SliceTable,
) -> Result<SigmaMid, SingularError> {
    spec.check_region()?;
    assert_eq!(table.kparam, spec.k, "slice table built for a different k");
    let q = spec.q();
    let nu = phi.nu();
    // K-Bessel values on a log grid; arguments below keep 6 pi l m t² <= 50.
    let ktab = KBesselTable::build(nu, 1e-4, 50.0, 3000)?;
    let t_lo = 0.045f64;
    let t_hi = 1.7f64;
    let lam_lo = 5e-3f64;
    let lam_hi = 0.34 * table.alpha_max * t_hi;
    let mut neglected: Option<(u64, u64)> = None;
    let mut scale_seen = 0.0f64;
    let outer = de_finite(t_lo.ln(), t_hi.ln(), 1e-8, |tv: f64| {
        let t = tv.exp();
        let inner = de_finite(lam_lo.ln(), lam_hi.ln(), 1e-8, |lv: f64| {
            let lam = lv.exp();
            let mut sum = 0.0f64;
            let mut m = 1u64;
            loop {
                let alpha = 3.0 * m as f64 * lam / t;
                let x_m = 6.0 * std::f64::consts::PI * m as f64 * t * t;
                if x_m > 50.0 {
                    break;
                }
                if !table.covers(0.0, alpha) {
                    // Significance estimate for the skipped alpha tail.
                    let bound = ktab.envelope(x_m) * slice_bound(t * t * t / lam, alpha);
                    if bound > 1e-10 * scale_seen.max(1e-30) && neglected.is_none() {
                        neglected = Some((1, m));
                    }
                    break;
                }
                let mut l = 1u64;
                loop {
                    let b = l as f64 * t * t * t / lam;
                    let x = x_m * l as f64;
                    if x > 50.0 || !table.covers(b, alpha) {
                        break;
                    }
                    let gbound = slice_bound(b, alpha);
                    if gbound * ktab.envelope(x) < 1e-18 * scale_seen.max(1e-30) {
                        break;
                    }
                    let n = 3 * l * m;
                    match phi.rho(n) {
                        Ok(rho) => {
                            if rho != 0.0 {
                                sum += rho * ktab.eval(x) * table.eval(b, alpha);
                            }
                        }
                        Err(_) => {
                            let bound = 3.0 * (n as f64).powf(0.25)
                                * ktab.envelope(x)
                                * gbound;
                            if bound > 1e-10 * scale_seen.max(1e-30) && neglected.is_none() {
                                neglected = Some((l, m));
                            }
                        }
                    }
                    l += 1;
                }
                m += 1;
            }
            // lambda^{4q-1} dlambda/lambda dt in log variables: the
            // Jacobian contributes lambda · t, leaving lambda^{4q-1} t².
            let v = ((4.0 * q - 1.0) * lv).exp() * sum;
            scale_seen = scale_seen.max(v.norm() * t * t);
            v
        });
        inner.value * t * t
    });
    if let Some(nm) = neglected {
        return Err(SingularError::Truncation(nm));
    }
    let half = outer.value;
    Ok(SigmaMid {
        value: 2.0 * half,
        eps_plus: half,
        eps_minus: half,
    })
}

/// The same quantity in the rescaled variables (alpha, B): the (l, m)
/// dependence factors out exactly and the plane integral becomes
/// ∫∫ alpha^{6q-3/2} B^{2q-1/2} K_nu(2 pi alpha B) G(B, alpha) dalpha dB.
/// Independent bookkeeping route for the change-of-variables step.
pub fn sigma_mid_rescaled(
    spec: &SingularSpec,
    phi: &MaassForm,
    table: &SliceTable,
) -> Result<Complex64, SingularError> {
    spec.check_region()?;
    let q = spec.q();
    let nu = phi.nu();
    let ktab = KBesselTable::build(nu, 1e-4, 50.0, 3000)?;
    let s_lm = hecke_double_sum(spec, phi)?;
    let c3 = ((1.5 - 6.0 * q) * 3.0_f64.ln()).exp() / 6.0;
    let ea = 6.0 * q - 1.5;
    let eb = 2.0 * q - 0.5;
    let plane = de_finite((1e-3f64).ln(), table.alpha_max.ln(), 1e-8, |av: f64| {
        let alpha = av.exp();
        let inner = de_finite((1e-4f64).ln(), table.b_max.ln(), 1e-8, |bv: f64| {
            let b = bv.exp();
            let x = 2.0 * std::f64::consts::PI * alpha * b;
            if x > 50.0 {
                return Complex64::new(0.0, 0.0);
            }
            let g = table.eval(b, alpha);
            if g == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            // Extra B from the log substitution.
            ((eb + 1.0) * bv).exp() * ktab.eval(x) * g
        });
        inner.value * ((ea + 1.0) * av).exp()
    });
    Ok(2.0 * c3 * s_lm * plane.value)
}

/// Residuals of the vanishing singular fibers: the zero fiber (constant term
/// of the cusp form) and the unipotent fiber (its u-average), at sample
/// points (t, lambda).
pub fn vanishing_fibers_check(
    phi: &MaassForm,
    samples: &[(f64, f64)],
) -> Result<(f64, f64), SingularError> {
    let f = TestFnMinus::new(6);
    let mut zero_residual = 0.0f64;
    let mut uni_residual = 0.0f64;
    for &(t, lam) in samples {
        let avg = gl_composite(0.0, 1.0, 2, 64, |u: f64| {
            phi.eval(u, t).unwrap_or(0.0)
        });
        zero_residual = zero_residual.max(avg.abs());
        // Unipotent fiber: the u-integral factors out of the m-sum of
        // axis-transform weights.
        let mut wsum = 0.0;
        for m in 1..=30u64 {
            let v = lam * m as f64 / (t * t * t);
            let term = f.fhat_axis(v);
            wsum += term;
            if term.abs() < 1e-14 * wsum.abs().max(1e-12) {
                break;
            }
        }
        uni_residual = uni_residual.max((wsum * avg).abs());
    }
    Ok((zero_residual, uni_residual))
}

/// Component breakdown of the shifted-contour integrand at one w.
#[derive(Clone, Copy, Debug)]
pub struct ContourIntegrand {
    pub g_over_w: Complex64,
    /// Gamma cluster: Gamma(k+2-2q) Gamma(3q-1/4+nu/2) Gamma(q+1/4-nu/2)
    /// / (Gamma(2s+k) Gamma(1-2q)).
    pub gamma_ratio: Complex64,
    pub lm_sum: Complex64,
    pub alpha_integral: Complex64,
    pub total: Complex64,
}

/// Evaluate the integrand of the w-contour against the closed singular sum,
/// normalized by 2/(sqrt(pi) K_nu(2) Gamma(2s+k)); used to confirm the
/// Stirling smallness of the Gamma cluster at moderate tau.
pub fn contour_integrand(
    spec: &SingularSpec,
    phi: &MaassForm,
) -> Result<ContourIntegrand, SingularError> {
    if !(spec.w.re > 0.0 && spec.w.re < 0.25) {
        return Err(SingularError::OutsideRegion(spec.w.re));
    }
    let q = spec.q();
    let nu = phi.nu();
    let sigma = sigma_closed(spec, phi)?;
    let lm_sum = hecke_double_sum(spec, phi)?;
    let g_over_w = (spec.w * spec.w).exp() / spec.w;
    let g1 = gamma_complex(Complex64::new(spec.k as f64 + 2.0, 0.0) - 2.0 * q)
        .map_err(|_| SingularError::NearPole)?;
    let g2 = gamma_complex(3.0 * q - 0.25 + nu * 0.5).map_err(|_| SingularError::NearPole)?;
    let g3 = gamma_complex(q + 0.25 - nu * 0.5).map_err(|_| SingularError::NearPole)?;
    let g4 = gamma_complex(2.0 * spec.s() + spec.k as f64).map_err(|_| SingularError::NearPole)?;
    let g5 = gamma_complex(Complex64::new(1.0, 0.0) - 2.0 * q)
        .map_err(|_| SingularError::NearPole)?;
    let gamma_ratio = g1 * g2 * g3 / (g4 * g5);
    let ik = crate::special::mellin_kk(
        nu,
        2.0 * q - 0.5,
        2.0 * std::f64::consts::PI,
        2.0 * std::f64::consts::PI / 3.0,
        4.0 * q,
    )?;
    let k2 = bessel_k(nu, 2.0)?.value;
    let norm = 2.0 / (std::f64::consts::PI.sqrt() * k2 * g4);
    Ok(ContourIntegrand {
        g_over_w,
        gamma_ratio,
        lm_sum,
        alpha_integral: ik,
        total: norm * sigma * g_over_w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cplx;
    use crate::maass::Parity;
    use std::collections::BTreeMap;

    fn fake_form() -> MaassForm {
        // Synthetic spectral data: drives the chain identity independently
        // of real Maass data.
        let mut l = BTreeMap::new();
        l.insert(2, 0.8);
        l.insert(3, 0.5);
        l.insert(5, -0.3);
        l.insert(7, 0.2);
        MaassForm::from_parts(1.3, Parity::Even, l)
    }

    #[test]
    fn double_sum_truncates() {
        let spec = SingularSpec::new(1.0, cplx(2.0, 0.0), 6);
        let phi = fake_form();
        let s = hecke_double_sum(&spec, &phi).unwrap();
        assert!(s.norm() > 0.0 && s.norm() < 10.0);
        let zero = MaassForm::from_parts(1.3, Parity::Even, {
            let mut l = BTreeMap::new();
            l.insert(2, 0.0);
            l.insert(3, 0.0);
            l.insert(5, 0.0);
            l.insert(7, 0.0);
            l
        });
        let sz = hecke_double_sum(&spec, &zero).unwrap();
        assert!(sz.norm() < 1e-12, "{sz}");
    }

    #[test]
    fn closed_form_region_checks() {
        let phi = fake_form();
        let bad = SingularSpec::new(1.0, cplx(-0.5, 0.0), 6);
        assert!(sigma_closed(&bad, &phi).is_err());
        let ok = SingularSpec::new(1.0, cplx(2.0, 0.0), 6);
        let v = sigma_closed(&ok, &phi).unwrap();
        assert!(v.norm().is_finite() && v.norm() > 0.0);
    }
}
