//! Complex Gamma, complex-order K-Bessel, the Gauss hypergeometric function
//! via its Euler integral, and the Mellin transform of a K-Bessel pair.

use crate::quad::{de_finite, de_semi_inf, gl_composite};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecialError {
    #[error("gamma pole at z = {0}")]
    GammaPole(Complex64),
    #[error("bessel_k domain error: x = {0} must be positive")]
    BesselDomain(f64),
    #[error("hyp2f1 parameter domain violated: {0}")]
    HypDomain(String),
    #[error("mellin_kk domain violated: {0}")]
    MellinDomain(String),
}

// Lanczos approximation, g = 607/128, 15 terms. Good to ~1e-14 relative.
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_C: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    3.399_464_998_481_188_9e-5,
    4.652_362_892_704_857_5e-5,
    -9.837_447_530_487_956e-5,
    1.580_887_032_249_124_9e-4,
    -2.102_644_417_241_048_8e-4,
    2.174_396_181_152_126_4e-4,
    -1.643_181_065_367_639e-4,
    8.441_822_398_385_274e-5,
    -2.619_083_840_158_141e-5,
    3.689_918_265_953_162e-6,
];

/// Complex Gamma function.  At least 12 significant digits away from poles.
pub fn gamma_complex(z: Complex64) -> Result<Complex64, SpecialError> {
    if z.re < 0.5 {
        // Reject (near-)poles at nonpositive integers.
        let nearest = z.re.round();
        if nearest <= 0.0 && (z.re - nearest).abs() < 1e-12 && z.im.abs() < 1e-12 {
            return Err(SpecialError::GammaPole(z));
        }
        // Reflection: Γ(z) Γ(1-z) = π / sin(πz).
        let pi = std::f64::consts::PI;
        let s = (z * pi).sin();
        let g = gamma_complex(Complex64::new(1.0, 0.0) - z)?;
        return Ok(pi / (s * g));
    }
    let mut a = Complex64::new(LANCZOS_C[0], 0.0);
    for (k, &c) in LANCZOS_C.iter().enumerate().skip(1) {
        a += c / (z + (k as f64 - 1.0));
    }
    let t = z + (LANCZOS_G - 0.5);
    let sqrt_two_pi = (2.0 * std::f64::consts::PI).sqrt();
    Ok(sqrt_two_pi * t.powc(z - 0.5) * (-t).exp() * a)
}

/// log |Γ(z)| convenience used by Stirling-smallness checks.
pub fn ln_abs_gamma(z: Complex64) -> Result<f64, SpecialError> {
    Ok(gamma_complex(z)?.norm().ln())
}

/// K-Bessel value with an explicit underflow flag.
#[derive(Clone, Copy, Debug)]
pub struct KBessel {
    pub value: Complex64,
    pub underflow: bool,
}

/// Modified Bessel function of the second kind with complex order,
/// K_nu(x) = ∫_0^∞ e^{-x cosh t} cosh(nu t) dt, for x > 0.
///
/// Evaluated as e^{-x} ∫_0^∞ e^{-x(cosh t - 1)} cosh(nu t) dt by
/// double-exponential quadrature on a truncated range.  Arguments beyond the
/// f64 exponent range return exact 0 with the underflow flag set.
pub fn bessel_k(nu: Complex64, x: f64) -> Result<KBessel, SpecialError> {
    if x <= 0.0 {
        return Err(SpecialError::BesselDomain(x));
    }
    if x > 700.0 {
        return Ok(KBessel {
            value: Complex64::new(0.0, 0.0),
            underflow: true,
        });
    }
    let re_nu = nu.re.abs();
    // Truncation point: e^{-x(cosh T - 1)} cosh(|Re nu| T) < 1e-330 of peak.
    let mut t_max = 2.0_f64;
    for _ in 0..40 {
        let target = (770.0 + re_nu * t_max + 30.0) / x;
        let new_t = (1.0 + target).max(1.0 + 1e-12).acosh();
        if (new_t - t_max).abs() < 1e-9 {
            t_max = new_t;
            break;
        }
        t_max = new_t;
    }
    let r = de_finite(0.0, t_max, 1e-13, |t| {
        let decay = (-x * (t.cosh() - 1.0)).exp();
        (nu * t).cosh() * decay
    });
    Ok(KBessel {
        value: r.value * (-x).exp(),
        underflow: false,
    })
}

/// Real shortcut for purely-imaginary or real order where the value is real.
pub fn bessel_k_re(nu: Complex64, x: f64) -> Result<f64, SpecialError> {
    Ok(bessel_k(nu, x)?.value.re)
}

/// Bessel J_0 by quadrature of its cosine representation.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    let panels = (ax / 3.0).ceil().max(1.0) as usize;
    gl_composite(0.0, std::f64::consts::FRAC_PI_2, panels.min(400), 32, |t| {
        (ax * t.sin()).cos()
    }) * std::f64::consts::FRAC_2_PI
}

/// Gauss hypergeometric function 2F1(a, b; c; z) by the Euler integral,
/// valid for Re(c) > Re(b) > 0 and |z| < 1.
pub fn hyp2f1(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: Complex64,
) -> Result<Complex64, SpecialError> {
    if !(c.re > b.re && b.re > 0.0) {
        return Err(SpecialError::HypDomain(format!(
            "need Re(c) > Re(b) > 0, got b = {b}, c = {c}"
        )));
    }
    if z.norm() >= 1.0 {
        return Err(SpecialError::HypDomain(format!("need |z| < 1, got z = {z}")));
    }
    let gc = gamma_complex(c)?;
    let gb = gamma_complex(b)?;
    let gcb = gamma_complex(c - b)?;
    let r = de_finite(0.0, 1.0, 1e-12, |t| {
        let lt = t.ln();
        let l1t = (1.0 - t).ln();
        let core = (b - 1.0) * lt + (c - b - 1.0) * l1t;
        let pole = (Complex64::new(1.0, 0.0) - t * z).ln() * (-a);
        (core + pole).exp()
    });
    Ok(gc / (gb * gcb) * r.value)
}

/// Closed-form Mellin transform of a product of two K-Bessel functions:
///
///   ∫_0^∞ K_mu(alpha x) K_nu(beta x) x^{s-1} dx
///     = 2^{s-3} alpha^{-s-nu} beta^nu Γ((s+mu+nu)/2) Γ((s-mu-nu)/2)
///       × ∫_0^1 t^{(s-mu+nu)/2-1} (1-t)^{(s+mu-nu)/2-1}
///               (1 - (1-beta²/alpha²) t)^{-(s+mu+nu)/2} dt
///
/// for Re(alpha+beta) > 0, Re(s) > |Re mu| + |Re nu| and alpha > beta > 0.
pub fn mellin_kk(
    mu: Complex64,
    nu: Complex64,
    alpha: f64,
    beta: f64,
    s: Complex64,
) -> Result<Complex64, SpecialError> {
    if !(alpha > beta && beta > 0.0) {
        return Err(SpecialError::MellinDomain(format!(
            "need alpha > beta > 0, got alpha = {alpha}, beta = {beta}"
        )));
    }
    if s.re <= mu.re.abs() + nu.re.abs() {
        return Err(SpecialError::MellinDomain(format!(
            "need Re(s) > |Re mu| + |Re nu|, got s = {s}"
        )));
    }
    let g1 = gamma_complex((s + mu + nu) * 0.5)?;
    let g2 = gamma_complex((s - mu - nu) * 0.5)?;
    near_pole_guard((s + mu + nu) * 0.5)?;
    near_pole_guard((s - mu - nu) * 0.5)?;
    let zfac = 1.0 - (beta / alpha) * (beta / alpha);
    let e1 = (s - mu + nu) * 0.5; // exponent of t is e1 - 1
    let e2 = (s + mu - nu) * 0.5; // exponent of (1-t) is e2 - 1
    let e3 = (s + mu + nu) * 0.5;
    let r = de_finite(0.0, 1.0, 1e-12, |t| {
        let lt = t.ln();
        let l1t = (1.0 - t).ln();
        let lz = (1.0 - zfac * t).ln(); // real positive argument
        ((e1 - 1.0) * lt + (e2 - 1.0) * l1t - e3 * lz).exp()
    });
    let pre = Complex64::new(2.0_f64.ln(), 0.0) * (s - 3.0)
        - (s + nu) * alpha.ln()
        + nu * beta.ln();
    Ok(pre.exp() * g1 * g2 * r.value)
}

/// Tabulated K_nu on a logarithmic argument grid with cubic interpolation,
/// for hot loops that evaluate one fixed order at many arguments.
pub struct KBesselTable {
    pub nu: Complex64,
    lo: f64,
    step: f64,
    vals: Vec<f64>,
    sup: f64,
}

impl KBesselTable {
    pub fn build(nu: Complex64, x_min: f64, x_max: f64, n: usize) -> Result<Self, SpecialError> {
        assert!(x_min > 0.0 && x_max > x_min && n >= 8);
        let lo = x_min.ln();
        let step = (x_max.ln() - lo) / (n - 1) as f64;
        let vals: Vec<f64> = (0..n)
            .map(|i| bessel_k_re(nu, (lo + step * i as f64).exp()))
            .collect::<Result<_, _>>()?;
        let r = nu.im.abs();
        let sup = if r < 1.0 {
            f64::INFINITY
        } else {
            5.0 * (-std::f64::consts::FRAC_PI_2 * r).exp() / r.powf(1.0 / 3.0)
        };
        Ok(Self {
            nu,
            lo,
            step,
            vals,
            sup,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let pos = (x.ln() - self.lo) / self.step;
        if pos <= 1.0 || pos >= (self.vals.len() - 3) as f64 {
            return bessel_k_re(self.nu, x).unwrap_or(0.0);
        }
        let i = pos.floor() as usize;
        let t = pos - i as f64;
        let (p0, p1, p2, p3) = (
            self.vals[i - 1],
            self.vals[i],
            self.vals[i + 1],
            self.vals[i + 2],
        );
        let a = 2.0 * p1;
        let b = p2 - p0;
        let c = 2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3;
        let d = -p0 + 3.0 * p1 - 3.0 * p2 + p3;
        0.5 * (a + b * t + c * t * t + d * t * t * t)
    }

    /// Valid upper bound for |K_nu(x)| used by truncation logic.
    pub fn envelope(&self, x: f64) -> f64 {
        let k0 = if x > 700.0 {
            0.0
        } else if x <= 1.0 {
            (2.0 / x).ln() + 0.2
        } else {
            (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() * (1.0 + 1.0 / (8.0 * x)) * 1.05
        };
        k0.min(self.sup)
    }
}

fn near_pole_guard(z: Complex64) -> Result<(), SpecialError> {
    let nearest = z.re.round();
    if nearest <= 0.0 && (z.re - nearest).abs() < 1e-8 && z.im.abs() < 1e-8 {
        return Err(SpecialError::GammaPole(z));
    }
    Ok(())
}

/// Direct quadrature of ∫_0^∞ K_mu(alpha x) K_nu(beta x) x^{s-1} dx.
/// Oracle twin of [`mellin_kk`]; intentionally goes through `bessel_k`.
pub fn mellin_kk_direct(
    mu: Complex64,
    nu: Complex64,
    alpha: f64,
    beta: f64,
    s: Complex64,
) -> Result<Complex64, SpecialError> {
    let r = de_semi_inf(1.0 / (alpha + beta), 1e-11, |x| {
        let ka = bessel_k(mu, alpha * x).map(|k| k.value).unwrap_or_default();
        let kb = bessel_k(nu, beta * x).map(|k| k.value).unwrap_or_default();
        ka * kb * ((s - 1.0) * x.ln()).exp()
    });
    Ok(r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cplx;

    #[test]
    fn gamma_basics() {
        let one = gamma_complex(cplx(1.0, 0.0)).unwrap();
        assert!((one - cplx(1.0, 0.0)).norm() < 1e-13);
        let half = gamma_complex(cplx(0.5, 0.0)).unwrap();
        assert!((half.re - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        assert!(gamma_complex(cplx(-3.0, 0.0)).is_err());
        // Γ(5) = 24.
        let five = gamma_complex(cplx(5.0, 0.0)).unwrap();
        assert!((five.re - 24.0).abs() < 1e-11);
    }

    #[test]
    fn gamma_against_integral_oracle() {
        // |Γ(2+10i)| against direct quadrature of ∫_0^∞ t^{z-1} e^{-t} dt.
        let z = cplx(2.0, 10.0);
        let oracle = de_semi_inf(1.0, 1e-13, |t: f64| {
            (Complex64::new(t.ln(), 0.0) * (z - 1.0)).exp() * (-t).exp()
        });
        let g = gamma_complex(z).unwrap();
        assert!(
            (g.norm() - oracle.value.norm()).abs() < 1e-10 * g.norm(),
            "lanczos {} vs oracle {}",
            g.norm(),
            oracle.value.norm()
        );
    }

    #[test]
    fn bessel_half_closed_form() {
        // K_{1/2}(x) = sqrt(pi/(2x)) e^{-x}.
        for &x in &[0.3, 1.0, 5.0, 40.0] {
            let k = bessel_k(cplx(0.5, 0.0), x).unwrap().value.re;
            let closed = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
            assert!(
                (k - closed).abs() < 1e-10 * closed,
                "x = {x}: {k} vs {closed}"
            );
        }
        let k1 = bessel_k(cplx(0.5, 0.0), 1.0).unwrap().value.re;
        assert!((k1 - 0.461_068_504_447_894_45).abs() < 1e-12);
    }

    #[test]
    fn bessel_k0_reference() {
        let k0 = bessel_k(cplx(0.0, 0.0), 1.0).unwrap().value.re;
        assert!((k0 - 0.421_024_438_240_708_34).abs() < 1e-12, "{k0}");
    }

    #[test]
    fn bessel_exponential_decay() {
        let k = bessel_k(cplx(0.0, 0.0), 50.0).unwrap().value.re;
        let scaled = k * 50.0_f64.exp();
        assert!(scaled > 0.0 && scaled < 1.0, "{scaled}");
    }

    #[test]
    fn bessel_underflow_flag() {
        let k = bessel_k(cplx(0.0, 0.0), 800.0).unwrap();
        assert!(k.underflow);
        assert_eq!(k.value, cplx(0.0, 0.0));
        assert!(bessel_k(cplx(0.0, 0.0), -1.0).is_err());
    }

    #[test]
    fn bessel_imaginary_order_is_real() {
        let k = bessel_k(cplx(0.0, 9.5), 2.0).unwrap().value;
        assert!(k.im.abs() < 1e-15 * k.re.abs().max(1e-300));
    }

    #[test]
    fn hyp_at_zero_and_log_identity() {
        let one = hyp2f1(cplx(0.7, 0.1), cplx(0.5, 0.0), cplx(1.5, 0.0), cplx(0.0, 0.0)).unwrap();
        assert!((one - cplx(1.0, 0.0)).norm() < 1e-12);
        // 2F1(1,1;2;z) = -ln(1-z)/z at z = 1/2.
        let v = hyp2f1(cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(2.0, 0.0), cplx(0.5, 0.0)).unwrap();
        let expect = -(0.5_f64.ln()) / 0.5;
        assert!((v.re - expect).abs() < 1e-9, "{v} vs {expect}");
        assert!(hyp2f1(cplx(1.0, 0.0), cplx(2.0, 0.0), cplx(1.0, 0.0), cplx(0.5, 0.0)).is_err());
    }

    #[test]
    fn hyp_against_power_series() {
        // a = b = 1/2, c = 3/2, z = 0.3 against the defining series.
        let (a, b, c) = (cplx(0.5, 0.0), cplx(0.5, 0.0), cplx(1.5, 0.0));
        let z = 0.3;
        let mut term = 1.0;
        let mut sum = 0.0;
        for n in 0..200 {
            sum += term;
            let nf = n as f64;
            term *= (0.5 + nf) * (0.5 + nf) / ((1.5 + nf) * (1.0 + nf)) * z;
        }
        let v = hyp2f1(a, b, c, cplx(z, 0.0)).unwrap();
        assert!((v.re - sum).abs() < 1e-9 * sum);
    }

    #[test]
    fn mellin_closed_vs_direct() {
        // Real parameters, comfortably inside the validity region.
        let mu = cplx(0.0, 0.0);
        let nu = cplx(0.0, 0.0);
        let s = cplx(2.0, 0.0);
        let closed = mellin_kk(mu, nu, 2.0, 1.0, s).unwrap();
        let direct = mellin_kk_direct(mu, nu, 2.0, 1.0, s).unwrap();
        assert!(
            (closed - direct).norm() < 1e-7 * closed.norm(),
            "{closed} vs {direct}"
        );
    }

    #[test]
    fn mellin_rejects_bad_domain() {
        assert!(mellin_kk(cplx(0.0, 0.0), cplx(0.0, 0.0), 1.0, 2.0, cplx(2.0, 0.0)).is_err());
        assert!(mellin_kk(cplx(3.0, 0.0), cplx(0.0, 0.0), 2.0, 1.0, cplx(2.0, 0.0)).is_err());
    }

    #[test]
    fn j0_reference_values() {
        // J_0(1) = 0.7651976865579666, J_0(10) = -0.2459357644513483.
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-12);
        assert!((bessel_j0(10.0) + 0.245_935_764_451_348_3).abs() < 1e-12);
    }
}
