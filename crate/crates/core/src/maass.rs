//! Evaluation of a Hecke-Maass cusp form from ingested spectral data.
//!
//! The form is determined by its spectral parameter r (Laplace eigenvalue
//! 1/4 + r²), a parity flag, and Hecke eigenvalues at primes; all other
//! Fourier coefficients follow from the Hecke relations
//! rho(m) rho(n) = sum_{d | (m,n)} rho(mn/d²) with rho(1) = 1.
//!
//! Data file format (text): optional '#' comment lines, then
//! `r <decimal>`, `parity even|odd`, then one `<p> <lambda_p>` line per prime.

use crate::gl2::GroupElement;
use crate::quad::de_finite;
use crate::special::{bessel_k_re, SpecialError};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MaassError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed data file: {0}")]
    Malformed(String),
    #[error("coefficient cache does not cover n = {0} (missing prime data)")]
    MissingPrime(u64),
    #[error("coefficient cache too small for requested accuracy (need n > {0})")]
    CacheExhausted(u64),
    #[error("evaluation point has |phi| below the usable threshold")]
    SmallValue,
    #[error("quadrature did not converge")]
    NoConvergence,
    #[error(transparent)]
    Special(#[from] SpecialError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Spectral data and derived coefficient cache for one Maass cusp form.
#[derive(Clone, Debug)]
pub struct MaassForm {
    pub r: f64,
    pub parity: Parity,
    pub lambda_p: BTreeMap<u64, f64>,
    rho: Vec<Option<f64>>,
}

const CACHE_LEN: usize = 4096;

impl MaassForm {
    /// nu = i r, the K-Bessel order of the Fourier expansion.
    pub fn nu(&self) -> Complex64 {
        Complex64::new(0.0, self.r)
    }

    pub fn from_parts(r: f64, parity: Parity, lambda_p: BTreeMap<u64, f64>) -> Self {
        let rho = build_cache(&lambda_p, CACHE_LEN);
        Self {
            r,
            parity,
            lambda_p,
            rho,
        }
    }

    pub fn load(path: &Path) -> Result<Self, MaassError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, MaassError> {
        let mut r = None;
        let mut parity = None;
        let mut lambda_p = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let head = it.next().unwrap();
            let rest = it.next().ok_or_else(|| {
                MaassError::Malformed(format!("line {}: missing value", lineno + 1))
            })?;
            match head {
                "r" => {
                    r = Some(rest.parse::<f64>().map_err(|e| {
                        MaassError::Malformed(format!("line {}: bad r: {e}", lineno + 1))
                    })?)
                }
                "parity" => {
                    parity = Some(match rest {
                        "even" => Parity::Even,
                        "odd" => Parity::Odd,
                        other => {
                            return Err(MaassError::Malformed(format!(
                                "line {}: bad parity '{other}'",
                                lineno + 1
                            )))
                        }
                    })
                }
                p => {
                    let p: u64 = p.parse().map_err(|e| {
                        MaassError::Malformed(format!("line {}: bad prime: {e}", lineno + 1))
                    })?;
                    if !is_prime(p) {
                        return Err(MaassError::Malformed(format!(
                            "line {}: {p} is not prime",
                            lineno + 1
                        )));
                    }
                    let v: f64 = rest.parse().map_err(|e| {
                        MaassError::Malformed(format!("line {}: bad eigenvalue: {e}", lineno + 1))
                    })?;
                    lambda_p.insert(p, v);
                }
            }
        }
        let r = r.ok_or_else(|| MaassError::Malformed("missing r line".into()))?;
        let parity = parity.ok_or_else(|| MaassError::Malformed("missing parity line".into()))?;
        if lambda_p.is_empty() {
            return Err(MaassError::Malformed("no prime eigenvalues".into()));
        }
        Ok(Self::from_parts(r, parity, lambda_p))
    }

    /// Fourier coefficient rho(n); errors name the smallest prime whose data
    /// is missing when n is not covered.
    pub fn rho(&self, n: u64) -> Result<f64, MaassError> {
        if n == 0 {
            return Err(MaassError::Malformed("rho(0) undefined".into()));
        }
        if (n as usize) < self.rho.len() {
            if let Some(v) = self.rho[n as usize] {
                return Ok(v);
            }
            // Name the smallest uncovered prime factor.
            let mut m = n;
            let mut p = 2;
            while p * p <= m {
                if m % p == 0 {
                    if !self.lambda_p.contains_key(&p) {
                        return Err(MaassError::MissingPrime(p));
                    }
                    while m % p == 0 {
                        m /= p;
                    }
                }
                p += 1;
            }
            if m > 1 && !self.lambda_p.contains_key(&m) {
                return Err(MaassError::MissingPrime(m));
            }
            return Err(MaassError::CacheExhausted(n));
        }
        Err(MaassError::CacheExhausted(n))
    }

    pub fn max_cached(&self) -> u64 {
        (self.rho.len() - 1) as u64
    }

    /// Largest n such that rho(1..=n) are all available.
    pub fn contiguous_cover(&self) -> u64 {
        let mut n = 1u64;
        while (n as usize + 1) < self.rho.len() && self.rho[n as usize + 1].is_some() {
            n += 1;
        }
        n
    }

    /// Evaluate the Fourier expansion at the expansion coordinates (u, t):
    /// 2t Σ rho(n) K_{ir}(2π n t²) trig(2π n u), cosine for even forms.
    /// Terms are truncated once a rigorous envelope falls below
    /// max(1e-14·|accumulated|, abs_floor).
    pub fn eval(&self, u: f64, t: f64) -> Result<f64, MaassError> {
        self.eval_with_floor(u, t, 0.0)
    }

    pub fn eval_with_floor(&self, u: f64, t: f64, abs_floor: f64) -> Result<f64, MaassError> {
        assert!(t > 0.0);
        let y = t * t;
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut acc = 0.0f64;
        let mut acc_scale = 0.0f64;
        let mut n = 1u64;
        loop {
            let env = 2.0 * t * rho_envelope(n) * k_envelope(self.r, two_pi * n as f64 * y);
            if env < (1e-14 * acc_scale).max(abs_floor) || env < 1e-300 {
                break;
            }
            let rho = match self.rho(n) {
                Ok(v) => v,
                Err(MaassError::MissingPrime(_)) | Err(MaassError::CacheExhausted(_)) => {
                    // A missing term only matters if its envelope is significant.
                    if env > (1e-12 * acc_scale).max(abs_floor.max(1e-280)) {
                        return Err(MaassError::CacheExhausted(n));
                    }
                    n += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let k = bessel_k_re(self.nu(), two_pi * n as f64 * y)?;
            let trig = match self.parity {
                Parity::Even => (two_pi * n as f64 * u).cos(),
                Parity::Odd => (two_pi * n as f64 * u).sin(),
            };
            acc += 2.0 * t * rho * k * trig;
            acc_scale = acc_scale.max(acc.abs()).max((2.0 * t * rho * k).abs());
            n += 1;
        }
        Ok(acc)
    }

    /// Evaluate at a group element, dropping the rotation and dilation parts
    /// and pulling the half-plane point back to the fundamental domain.
    pub fn eval_group(&self, g: &GroupElement) -> Result<f64, MaassError> {
        let (x, y) = reduce_point(-g.u, g.t * g.t);
        self.eval(x, y.sqrt())
    }

    /// As [`eval_group`] but without the fundamental-domain pullback; exact
    /// for the series the data defines, automorphic only to data precision.
    pub fn eval_group_raw(&self, g: &GroupElement) -> Result<f64, MaassError> {
        self.eval(-g.u, g.t)
    }

    /// Ratio of the Gaussian-kernel convolution over the det-1 subgroup to
    /// the value at `h`.  For a true Hecke-Maass form this is the constant
    /// sqrt(pi) K_{ir}(2) independent of h.
    pub fn convolution_eigenvalue(&self, h: &GroupElement) -> Result<Complex64, MaassError> {
        let phi_h = self.eval_group_raw(h)?;
        if phi_h.abs() < 1e-8 {
            return Err(MaassError::SmallValue);
        }
        let hm = h.to_matrix();
        // After integrating out the rotation subgroup the kernel contributes
        // exp(-t² - (1+u²)/t²) against phi(h n_u a_t), with measure du dt/t³.
        let outer = de_finite(0.08, 5.2, 1e-10, |t: f64| {
            let uscale = t.max(0.3);
            let inner = de_finite(-14.0 * uscale, 14.0 * uscale, 1e-10, |u: f64| {
                let na = GroupElement::new(u, t, 0.0, 1.0).to_matrix();
                let m = hm.mul(&na);
                let g = match crate::gl2::decompose(&m) {
                    Ok(g) => g,
                    Err(_) => return 0.0,
                };
                let phi = self.eval(-g.u, g.t).unwrap_or(0.0);
                (-(t * t) - (1.0 + u * u) / (t * t)).exp() * phi
            });
            inner.value / (t * t * t)
        });
        if !outer.converged {
            return Err(MaassError::NoConvergence);
        }
        Ok(Complex64::new(outer.value / phi_h, 0.0))
    }

    /// Monitors over the coefficient cache: the constant in
    /// |rho(n)| <= C n^{7/64 + 0.05}, and in sum_{n<=X} |rho(n)|² <= C X.
    pub fn coefficient_monitors(&self) -> (f64, f64) {
        let cover = self.contiguous_cover();
        let mut c_single = 0.0f64;
        let mut c_square = 0.0f64;
        let mut sq = 0.0;
        for n in 1..=cover {
            let v = self.rho(n).unwrap();
            c_single = c_single.max(v.abs() / (n as f64).powf(7.0 / 64.0 + 0.05));
            sq += v * v;
            c_square = c_square.max(sq / n as f64);
        }
        (c_single, c_square)
    }
}

/// Pull an upper-half-plane point back into the standard fundamental domain.
pub fn reduce_point(mut x: f64, mut y: f64) -> (f64, f64) {
    for _ in 0..200 {
        x -= x.round();
        let r2 = x * x + y * y;
        if r2 >= 1.0 - 1e-15 {
            break;
        }
        // z -> -1/z.
        x = -x / r2;
        y /= r2;
    }
    (x, y)
}

fn build_cache(lambda_p: &BTreeMap<u64, f64>, len: usize) -> Vec<Option<f64>> {
    let mut rho: Vec<Option<f64>> = vec![None; len + 1];
    rho[1] = Some(1.0);
    // Prime powers by the Hecke recursion, then multiplicativity in
    // increasing-n order (smallest prime factor split).
    for n in 2..=len as u64 {
        let p = smallest_prime_factor(n);
        let mut pk = p;
        let mut m = n / p;
        while m % p == 0 {
            m /= p;
            pk *= p;
        }
        if m == 1 {
            // n = p^k: rho(p^k) = rho(p) rho(p^{k-1}) - rho(p^{k-2}).
            if let Some(&lp) = lambda_p.get(&p) {
                if n == p {
                    rho[n as usize] = Some(lp);
                } else {
                    let k1 = rho[(n / p) as usize];
                    let k2 = rho[(n / p / p) as usize];
                    if let (Some(k1), Some(k2)) = (k1, k2) {
                        rho[n as usize] = Some(lp * k1 - k2);
                    }
                }
            }
        } else if let (Some(a), Some(b)) = (rho[pk as usize], rho[m as usize]) {
            rho[n as usize] = Some(a * b);
        }
    }
    rho
}

fn smallest_prime_factor(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut p = 3;
    while p * p <= n {
        if n % p == 0 {
            return p;
        }
        p += 2;
    }
    n
}

fn is_prime(n: u64) -> bool {
    n >= 2 && smallest_prime_factor(n) == n
}

/// Conservative envelope for K_0(x) >= |K_{ir}(x)|.
fn k0_envelope(x: f64) -> f64 {
    if x > 700.0 {
        0.0
    } else if x <= 1.0 {
        (2.0 / x).ln() + 0.2
    } else {
        (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() * (1.0 + 1.0 / (8.0 * x)) * 1.05
    }
}

/// Envelope for |K_{ir}(x)|: the K_0 bound capped by the e^{-pi r/2} scale
/// of the oscillatory regime (with a generous margin over the Airy bump).
fn k_envelope(r: f64, x: f64) -> f64 {
    let k0 = k0_envelope(x);
    if r < 1.0 {
        return k0;
    }
    let sup = 5.0 * (-std::f64::consts::FRAC_PI_2 * r).exp() / r.powf(1.0 / 3.0);
    k0.min(sup)
}

/// Loose a-priori bound for |rho(n)| used only in truncation decisions.
fn rho_envelope(n: u64) -> f64 {
    3.0 * (n as f64).powf(0.25)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_form() -> MaassForm {
        let mut l = BTreeMap::new();
        l.insert(2, 1.5);
        l.insert(3, 0.25);
        MaassForm::from_parts(13.78, Parity::Even, l)
    }

    #[test]
    fn hecke_extension() {
        let f = toy_form();
        assert_eq!(f.rho(1).unwrap(), 1.0);
        assert_eq!(f.rho(6).unwrap(), 1.5 * 0.25);
        assert!((f.rho(4).unwrap() - (1.5 * 1.5 - 1.0)).abs() < 1e-15);
        // rho(8) = l2^3 - 2 l2.
        assert!((f.rho(8).unwrap() - (1.5f64.powi(3) - 2.0 * 1.5)).abs() < 1e-15);
        match f.rho(10) {
            Err(MaassError::MissingPrime(5)) => {}
            other => panic!("expected MissingPrime(5), got {other:?}"),
        }
    }

    #[test]
    fn hecke_identity_on_cache() {
        let f = toy_form();
        // rho(m) rho(n) = sum_{d | (m,n)} rho(m n / d^2) for covered arguments.
        for m in 1..=24u64 {
            for n in 1..=24u64 {
                let (rm, rn) = match (f.rho(m), f.rho(n)) {
                    (Ok(a), Ok(b)) => (a, b),
                    _ => continue,
                };
                let mut rhs = 0.0;
                let mut covered = true;
                for d in 1..=m.min(n) {
                    if m % d == 0 && n % d == 0 {
                        match f.rho(m * n / (d * d)) {
                            Ok(v) => rhs += v,
                            Err(_) => {
                                covered = false;
                                break;
                            }
                        }
                    }
                }
                if covered {
                    assert!(
                        (rm * rn - rhs).abs() < 1e-12 * (1.0 + rhs.abs()),
                        "hecke failed at ({m},{n})"
                    );
                }
            }
        }
    }

    #[test]
    fn parse_and_errors() {
        let good = "# comment\nr 13.5\nparity even\n2 1.0\n3 0.5\n";
        let f = MaassForm::parse(good).unwrap();
        assert_eq!(f.parity, Parity::Even);
        assert!((f.r - 13.5).abs() < 1e-15);
        assert!(MaassForm::parse("parity even\n2 1.0").is_err());
        assert!(MaassForm::parse("r 13.5\nparity even\n4 1.0").is_err());
        assert!(MaassForm::parse("r 13.5\nparity weird\n2 1.0").is_err());
    }

    #[test]
    fn eval_periodicity_and_decay() {
        // The toy table covers primes {2, 3}; at t = 1.4 the first missing
        // term is provably below the truncation threshold.
        let f = toy_form();
        let a = f.eval(0.3, 1.4).unwrap();
        let b = f.eval(1.3, 1.4).unwrap();
        assert!((a - b).abs() < 1e-13);
        // Exponential K-Bessel decay in t.
        let big = f.eval(0.2, 10.0).unwrap();
        assert!(big.abs() < 1e-40, "{big}");
    }

    #[test]
    fn reduce_point_basic() {
        let (x, y) = reduce_point(0.7, 2.0);
        assert!((x + 0.3).abs() < 1e-14 && (y - 2.0).abs() < 1e-14);
        let (x, y) = reduce_point(0.0, 0.25);
        assert!(x.abs() < 1e-12 && (y - 4.0).abs() < 1e-12);
        let (x, y) = reduce_point(0.4, 0.2);
        assert!(x.abs() <= 0.5 + 1e-12 && x * x + y * y >= 1.0 - 1e-12);
    }
}
