//! Double-exponential (tanh-sinh family) quadrature and Gauss-Legendre panels.
//!
//! The DE rules are the workhorse for every integral in the crate: they handle
//! endpoint singularities of Euler-type integrals and the semi-infinite ranges
//! of the Bessel and Mellin integrals.  Truncation follows the usual scheme:
//! node generation stops once the transformed weight underflows relative to
//! the running peak.

use num_complex::Complex64;
use std::sync::OnceLock;

/// Result of a quadrature call.
#[derive(Clone, Copy, Debug)]
pub struct QuadResult<T> {
    pub value: T,
    /// Estimated absolute error (difference of the last two refinement levels).
    pub abs_err: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Scalar types a quadrature can accumulate.
pub trait Integrand: Copy {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, w: f64) -> Self;
    fn norm(self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, w: f64) -> Self {
        self * w
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, w: f64) -> Self {
        self * w
    }
    fn norm(self) -> f64 {
        self.norm()
    }
}

const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;
/// |u| beyond which the tanh-sinh abscissa is within 1 ulp of the endpoint.
const U_MAX: f64 = 6.6;

#[derive(Clone, Copy)]
struct Node {
    x: f64,
    w: f64,
}

/// Kahan-compensated accumulator.
struct Acc<T: Integrand> {
    sum: T,
    comp: T,
}

impl<T: Integrand> Acc<T> {
    fn new() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }
    fn add(&mut self, v: T) {
        // Kahan: comp carries the rounding residue.
        let y = v.add(self.comp.scale(-1.0));
        let t = self.sum.add(y);
        self.comp = t.add(self.sum.scale(-1.0)).add(y.scale(-1.0));
        self.sum = t;
    }
}

fn de_run<T: Integrand>(
    f: &mut dyn FnMut(f64) -> T,
    map: &dyn Fn(f64) -> Option<Node>,
    rel_tol: f64,
    abs_floor: f64,
    max_level: u32,
) -> QuadResult<T> {
    let mut evals = 0usize;
    let mut eval = |u: f64, acc: &mut Acc<T>| {
        if let Some(n) = map(u) {
            if n.w.is_finite() && n.w != 0.0 {
                let v = f(n.x);
                evals += 1;
                if v.norm().is_finite() {
                    acc.add(v.scale(n.w));
                }
            }
        }
    };

    // Level 0: spacing 1.
    let mut acc = Acc::new();
    eval(0.0, &mut acc);
    let mut k = 1.0;
    while k <= U_MAX {
        eval(k, &mut acc);
        eval(-k, &mut acc);
        k += 1.0;
    }
    let mut h = 1.0;
    let mut total = acc.sum; // integral estimate = h * sum
    let mut prev = total.scale(h);
    let mut result = prev;
    let mut abs_err = f64::INFINITY;
    let mut converged = false;

    for _level in 1..=max_level {
        h *= 0.5;
        // New nodes at odd multiples of h.
        let mut acc_new = Acc::new();
        let mut u = h;
        while u <= U_MAX {
            eval(u, &mut acc_new);
            eval(-u, &mut acc_new);
            u += 2.0 * h;
        }
        total = total.add(acc_new.sum);
        result = total.scale(h);
        abs_err = result.add(prev.scale(-1.0)).norm();
        let scale = result.norm().max(1e-300);
        if abs_err <= (rel_tol * scale).max(abs_floor) {
            converged = true;
            break;
        }
        prev = result;
    }

    QuadResult {
        value: result,
        abs_err,
        evals,
        converged,
    }
}

/// Integrate over the finite interval [a, b] with tanh-sinh.
pub fn de_finite<T: Integrand>(
    a: f64,
    b: f64,
    rel_tol: f64,
    f: impl FnMut(f64) -> T,
) -> QuadResult<T> {
    de_finite_floored(a, b, rel_tol, 0.0, f)
}

/// As [`de_finite`] with an absolute convergence floor, for integrals whose
/// value is small against the integrand scale (heavy cancellation).
pub fn de_finite_floored<T: Integrand>(
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_floor: f64,
    mut f: impl FnMut(f64) -> T,
) -> QuadResult<T> {
    let len = b - a;
    let map = move |u: f64| -> Option<Node> {
        let s = HALF_PI * u.sinh();
        // sigma = (1 - tanh|s|)/2, computed without cancellation so nodes can
        // approach a singular endpoint to within ~1e-300.
        let sa = s.abs();
        if sa > 350.0 {
            return None;
        }
        let sigma = 1.0 / (1.0 + (2.0 * sa).exp());
        let x = if s >= 0.0 {
            b - len * sigma
        } else {
            a + len * sigma
        };
        if x <= a.min(b) || x >= a.max(b) {
            return None;
        }
        let ch = s.cosh();
        let w = 0.5 * len * HALF_PI * u.cosh() / (ch * ch);
        if !w.is_finite() || w == 0.0 {
            return None;
        }
        Some(Node { x, w })
    };
    de_run(&mut f, &map, rel_tol, abs_floor, 12)
}

/// Integrate over (0, inf) with exp-sinh; `scale` places the clustering point.
pub fn de_semi_inf<T: Integrand>(
    scale: f64,
    rel_tol: f64,
    mut f: impl FnMut(f64) -> T,
) -> QuadResult<T> {
    let map = move |u: f64| -> Option<Node> {
        let s = HALF_PI * u.sinh();
        if s > 690.0 || s < -690.0 {
            return None;
        }
        let x = scale * s.exp();
        if x == 0.0 || !x.is_finite() {
            return None;
        }
        let w = x * HALF_PI * u.cosh();
        Some(Node { x, w })
    };
    de_run(&mut f, &map, rel_tol, 0.0, 12)
}

/// Integrate over the whole real line with sinh-sinh.
pub fn de_real_line<T: Integrand>(
    scale: f64,
    rel_tol: f64,
    mut f: impl FnMut(f64) -> T,
) -> QuadResult<T> {
    let map = move |u: f64| -> Option<Node> {
        let s = HALF_PI * u.sinh();
        if s.abs() > 690.0 {
            return None;
        }
        let x = scale * s.sinh();
        let w = scale * HALF_PI * u.cosh() * s.cosh();
        if !w.is_finite() {
            return None;
        }
        Some(Node { x, w })
    };
    de_run(&mut f, &map, rel_tol, 0.0, 12)
}

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence and cached for reuse.
pub fn gauss_legendre(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<std::sync::Mutex<std::collections::HashMap<usize, &'static (Vec<f64>, Vec<f64>)>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| std::sync::Mutex::new(std::collections::HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(&r) = guard.get(&n) {
        return r;
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pd(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_pd(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    let boxed: &'static (Vec<f64>, Vec<f64>) = Box::leak(Box::new((nodes, weights)));
    guard.insert(n, boxed);
    boxed
}

fn legendre_pd(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Fixed-order Gauss-Legendre on [a, b].
pub fn gl_panel<T: Integrand>(a: f64, b: f64, n: usize, mut f: impl FnMut(f64) -> T) -> T {
    let (nodes, weights) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Acc::new();
    for (x, w) in nodes.iter().zip(weights) {
        acc.add(f(c + half * x).scale(w * half));
    }
    acc.sum
}

/// Composite Gauss-Legendre: `panels` equal panels of order `n` on [a, b].
pub fn gl_composite<T: Integrand>(
    a: f64,
    b: f64,
    panels: usize,
    n: usize,
    mut f: impl FnMut(f64) -> T,
) -> T {
    let mut acc = Acc::new();
    let step = (b - a) / panels as f64;
    for k in 0..panels {
        let lo = a + step * k as f64;
        acc.add(gl_panel(lo, lo + step, n, &mut f));
    }
    acc.sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn finite_polynomial() {
        let r = de_finite(0.0, 1.0, 1e-13, |x| x * x);
        assert!((r.value - 1.0 / 3.0).abs() < 1e-13);
        assert!(r.converged);
    }

    #[test]
    fn finite_endpoint_singularity() {
        // ∫_0^1 dx/√x = 2, integrable endpoint singularity.
        let r = de_finite(0.0, 1.0, 1e-13, |x| 1.0 / x.sqrt());
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn semi_infinite_gamma() {
        // ∫_0^∞ x^3 e^{-x} dx = 6.
        let r = de_semi_inf(1.0, 1e-13, |x| x.powi(3) * (-x).exp());
        assert!((r.value - 6.0).abs() < 1e-11);
    }

    #[test]
    fn real_line_gaussian() {
        let r = de_real_line(1.0, 1e-13, |x| (-x * x).exp());
        assert!((r.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn complex_oscillatory() {
        // ∫_0^∞ e^{-x} e^{ix} dx = 1/(1-i).
        let r = de_semi_inf(1.0, 1e-13, |x| {
            Complex64::new(0.0, x).exp() * (-x).exp()
        });
        let expect = Complex64::new(1.0, 0.0) / Complex64::new(1.0, -1.0);
        assert!((r.value - expect).norm() < 1e-12);
    }

    #[test]
    fn gauss_legendre_exactness() {
        // Order-32 GL integrates degree-63 polynomials exactly.
        let v = gl_panel(-1.0, 1.0, 32, |x| x.powi(10));
        assert!((v - 2.0 / 11.0).abs() < 1e-14);
        let s = gl_composite(0.0, std::f64::consts::PI, 4, 32, |x| x.sin());
        assert!((s - 2.0).abs() < 1e-13);
    }
}
