//! Truncated Taylor (jet) arithmetic over the complex numbers.
//!
//! A `Jet` stores the coefficients f(x0), f'(x0)/1!, f''(x0)/2!, ... of a
//! function at a point.  The integration-by-parts operator needs exact
//! derivatives of quotients like ψ/(iλφ'), which jets deliver without
//! symbolic differentiation.

use num_complex::Complex64;

#[derive(Clone, Debug)]
pub struct Jet {
    /// Taylor coefficients: c[k] = f^(k)(x0) / k!.
    pub c: Vec<Complex64>,
}

impl Jet {
    pub fn constant(v: Complex64, order: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); order + 1];
        c[0] = v;
        Self { c }
    }

    /// Jet of the identity function x at x0.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); order + 1];
        c[0] = Complex64::new(x0, 0.0);
        if order >= 1 {
            c[1] = Complex64::new(1.0, 0.0);
        }
        Self { c }
    }

    /// Build from raw derivative values f^(k)(x0) (not divided by k!).
    pub fn from_derivatives(derivs: &[Complex64]) -> Self {
        let mut c = Vec::with_capacity(derivs.len());
        let mut fact = 1.0;
        for (k, d) in derivs.iter().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            c.push(d / fact);
        }
        Self { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    pub fn truncate(&self, order: usize) -> Jet {
        Jet {
            c: self.c[..=order.min(self.order())].to_vec(),
        }
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let n = self.c.len().min(o.c.len());
        Jet {
            c: (0..n).map(|k| self.c[k] + o.c[k]).collect(),
        }
    }

    pub fn neg(&self) -> Jet {
        Jet {
            c: self.c.iter().map(|v| -v).collect(),
        }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let n = self.c.len().min(o.c.len());
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        for (k, ck) in c.iter_mut().enumerate() {
            for j in 0..=k {
                *ck += self.c[j] * o.c[k - j];
            }
        }
        Jet { c }
    }

    pub fn scale(&self, s: Complex64) -> Jet {
        Jet {
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    /// self / o, requires o(x0) != 0.
    pub fn div(&self, o: &Jet) -> Jet {
        let n = self.c.len().min(o.c.len());
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            let mut acc = if k < self.c.len() {
                self.c[k]
            } else {
                Complex64::new(0.0, 0.0)
            };
            for j in 0..k {
                acc -= c[j] * o.c[k - j];
            }
            c[k] = acc / o.c[0];
        }
        Jet { c }
    }

    /// exp(self), via the standard ODE recurrence.
    pub fn exp(&self) -> Jet {
        let n = self.c.len();
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        c[0] = self.c[0].exp();
        for k in 1..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                acc += (j as f64) * self.c[j] * c[k - j];
            }
            c[k] = acc / (k as f64);
        }
        Jet { c }
    }

    /// Derivative as a jet of one lower order.
    pub fn derivative(&self) -> Jet {
        let n = self.c.len();
        if n <= 1 {
            return Jet::constant(Complex64::new(0.0, 0.0), 0);
        }
        Jet {
            c: (1..n).map(|k| self.c[k] * (k as f64)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn exp_of_square_matches_hand_derivatives() {
        // f(x) = exp(x^2) at x0 = 0.7; f' = 2x f, f'' = (2 + 4x^2) f.
        let x0 = 0.7;
        let x = Jet::variable(x0, 4);
        let f = x.mul(&x).exp();
        let e = (x0 * x0_f64(x0)).exp();
        assert!((f.c[0] - c(e)).norm() < 1e-14 * e);
        assert!((f.c[1] - c(2.0 * x0 * e)).norm() < 1e-13 * e);
        let f2 = (2.0 + 4.0 * x0 * x0) * e;
        assert!((f.c[2] * 2.0 - c(f2)).norm() < 1e-12 * e);
    }

    fn x0_f64(x: f64) -> f64 {
        x
    }

    #[test]
    fn div_round_trip() {
        let x = Jet::variable(0.3, 5);
        let g = x.exp();
        let h = Jet::constant(c(1.0), 5).div(&g);
        let prod = g.mul(&h);
        assert!((prod.c[0] - c(1.0)).norm() < 1e-14);
        for k in 1..=5 {
            assert!(prod.c[k].norm() < 1e-13);
        }
    }

    #[test]
    fn derivative_shifts() {
        let x = Jet::variable(2.0, 3);
        let f = x.mul(&x).mul(&x); // x^3
        let d = f.derivative(); // 3x^2
        assert!((d.c[0] - c(12.0)).norm() < 1e-13);
        assert!((d.c[1] - c(12.0)).norm() < 1e-13);
    }
}
