//! Coordinates on the positive-determinant 2x2 group: Iwasawa-dilation
//! decomposition g = n_u a_t k_theta d_lambda, the involution, fundamental
//! domain and Siegel-set membership, and the homogeneous-coordinate
//! bijections with the open orbits of binary cubic forms.
//!
//! Conventions: n_u is lower triangular with u in the bottom-left, a_t is
//! diag(1/t, t), k_theta has entries cos(2 pi theta), sin(2 pi theta), and
//! d_lambda is the scalar lambda.  Haar measure is du dt/t^3 dtheta dlambda/lambda.

use crate::cubic::{CubicForm, CubicError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Gl2Error {
    #[error("matrix determinant must be positive and nondegenerate, got {0}")]
    BadDeterminant(f64),
    #[error("form discriminant {0} too close to the singular set")]
    NearSingular(f64),
    #[error("sign does not match the discriminant sign")]
    SignMismatch,
    #[error("coordinate recovery did not converge (residual {0})")]
    NoConvergence(f64),
    #[error(transparent)]
    Cubic(#[from] CubicError),
}

/// Real 2x2 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub m: [[f64; 2]; 2],
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        m: [[1.0, 0.0], [0.0, 1.0]],
    };

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let mut m = [[0.0; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j];
            }
        }
        Mat2 { m }
    }

    pub fn inverse(&self) -> Mat2 {
        let det = self.det();
        Mat2 {
            m: [
                [self.m[1][1] / det, -self.m[0][1] / det],
                [-self.m[1][0] / det, self.m[0][0] / det],
            ],
        }
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2 {
            m: [
                [self.m[0][0], self.m[1][0]],
                [self.m[0][1], self.m[1][1]],
            ],
        }
    }

    pub fn max_norm(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn sub(&self, o: &Mat2) -> Mat2 {
        let mut m = [[0.0; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.m[i][j] - o.m[i][j];
            }
        }
        Mat2 { m }
    }
}

/// Iwasawa-dilation coordinates (u, t, theta, lambda) of an element of G+.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement {
    pub u: f64,
    pub t: f64,
    pub theta: f64,
    pub lambda: f64,
}

fn c2pi(theta: f64) -> f64 {
    (2.0 * std::f64::consts::PI * theta).cos()
}

fn s2pi(theta: f64) -> f64 {
    (2.0 * std::f64::consts::PI * theta).sin()
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement {
        u: 0.0,
        t: 1.0,
        theta: 0.0,
        lambda: 1.0,
    };

    pub fn new(u: f64, t: f64, theta: f64, lambda: f64) -> Self {
        debug_assert!(t > 0.0 && lambda > 0.0);
        Self { u, t, theta, lambda }
    }

    /// n_u a_t k_theta d_lambda as a matrix.
    pub fn to_matrix(&self) -> Mat2 {
        let (c, s) = (c2pi(self.theta), s2pi(self.theta));
        let (t, l, u) = (self.t, self.lambda, self.u);
        // n_u a_t = [[1/t, 0], [u/t, t]]; right-multiply by k_theta, scale by lambda.
        Mat2 {
            m: [
                [l * c / t, l * s / t],
                [l * (u * c / t - t * s), l * (u * s / t + t * c)],
            ],
        }
    }

    /// The involution in coordinates: (u, t, theta, 1/lambda).
    pub fn involution(&self) -> GroupElement {
        GroupElement {
            u: self.u,
            t: self.t,
            theta: self.theta,
            lambda: 1.0 / self.lambda,
        }
    }

    pub fn compose(&self, o: &GroupElement) -> Result<GroupElement, Gl2Error> {
        decompose(&self.to_matrix().mul(&o.to_matrix()))
    }
}

/// Iwasawa-dilation decomposition of a positive-determinant matrix.
pub fn decompose(m: &Mat2) -> Result<GroupElement, Gl2Error> {
    let det = m.det();
    if !(det > 1e-300) || !det.is_finite() {
        return Err(Gl2Error::BadDeterminant(det));
    }
    let lambda = det.sqrt();
    let m1 = [
        [m.m[0][0] / lambda, m.m[0][1] / lambda],
        [m.m[1][0] / lambda, m.m[1][1] / lambda],
    ];
    // First row of n_u a_t k_theta is (c/t, s/t).
    let row0 = (m1[0][0] * m1[0][0] + m1[0][1] * m1[0][1]).sqrt();
    let t = 1.0 / row0;
    let theta_raw = m1[0][1].atan2(m1[0][0]) / (2.0 * std::f64::consts::PI);
    let theta = theta_raw.rem_euclid(1.0);
    let (c, s) = (c2pi(theta), s2pi(theta));
    let u = t * (c * m1[1][0] + s * m1[1][1]);
    Ok(GroupElement { u, t, theta, lambda })
}

/// Matrix route for the involution: J (g^{-1})^T J^{-1}.
pub fn involution_matrix(m: &Mat2) -> Mat2 {
    let j = Mat2 {
        m: [[0.0, 1.0], [-1.0, 0.0]],
    };
    let jinv = Mat2 {
        m: [[0.0, -1.0], [1.0, 0.0]],
    };
    j.mul(&m.inverse().transpose()).mul(&jinv)
}

/// Threshold value 3^{1/4}/sqrt(2) for the torus coordinate on the
/// fundamental domain.
pub fn t_min_fundamental() -> f64 {
    3.0_f64.powf(0.25) / 2.0_f64.sqrt()
}

/// Membership in the standard fundamental domain for SL2(Z)\SL2(R):
/// |u| <= 1/2 together with u^2 + t^4 >= 1 (the two-subinterval structure for
/// small t is exactly the arc condition on the half-plane point).
pub fn in_fundamental_domain(g: &GroupElement) -> bool {
    g.u.abs() <= 0.5 && g.u * g.u + g.t.powi(4) >= 1.0
}

/// Siegel-set membership: |u| <= A and t >= B.
pub fn in_siegel_set(g: &GroupElement, a: f64, b: f64) -> bool {
    g.u.abs() <= a && g.t >= b
}

/// Orbit sign of a nonsingular form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrbitSign {
    Plus,
    Minus,
}

impl OrbitSign {
    pub fn of_disc(disc: f64) -> Option<OrbitSign> {
        if disc > 0.0 {
            Some(OrbitSign::Plus)
        } else if disc < 0.0 {
            Some(OrbitSign::Minus)
        } else {
            None
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            OrbitSign::Plus => 1.0,
            OrbitSign::Minus => -1.0,
        }
    }
}

/// Base points of the open orbits: f+ = (0,3,0,-1)/108^{1/4} with
/// discriminant +1, f- = (0,1,0,1)/sqrt(2) with discriminant -1.
pub fn base_form(sign: OrbitSign) -> CubicForm {
    match sign {
        OrbitSign::Plus => {
            let s = 108.0_f64.powf(-0.25);
            CubicForm::new(0.0, 3.0 * s, 0.0, -s)
        }
        OrbitSign::Minus => {
            let s = 0.5_f64.sqrt();
            CubicForm::new(0.0, s, 0.0, s)
        }
    }
}

/// Homogeneous coordinates of a nonsingular form: sign and (u, t, theta,
/// lambda) with theta in [0, 1/3) for the plus orbit, [0, 1) for minus,
/// and lambda^4 = |Disc|.
#[derive(Clone, Copy, Debug)]
pub struct HomogeneousCoords {
    pub sign: OrbitSign,
    pub g: GroupElement,
}

/// k_theta . f_sign in closed form.
fn k_orbit(sign: OrbitSign, theta: f64) -> CubicForm {
    match sign {
        OrbitSign::Minus => {
            let s = s2pi(theta);
            let c = c2pi(theta);
            let k = 0.5_f64.sqrt();
            CubicForm::new(k * s, k * c, k * s, k * c)
        }
        OrbitSign::Plus => {
            let s3 = s2pi(3.0 * theta);
            let c3 = c2pi(3.0 * theta);
            let k = 108.0_f64.powf(-0.25);
            CubicForm::new(k * s3, 3.0 * k * c3, -3.0 * k * s3, -k * c3)
        }
    }
}

/// Evaluate n_u a_t k_theta d_lambda . f_sign.
pub fn to_form(h: &HomogeneousCoords) -> CubicForm {
    let base = k_orbit(h.sign, h.g.theta);
    let t = h.g.t;
    // a_t: (a, b, c, d) -> (a/t^3, b/t, c t, d t^3).
    let at = CubicForm::new(
        base.a / (t * t * t),
        base.b / t,
        base.c * t,
        base.d * t * t * t,
    );
    // n_u: (a, b, c, d) -> (a, 3au+b, 3au^2+2bu+c, au^3+bu^2+cu+d).
    let u = h.g.u;
    let nu = CubicForm::new(
        at.a,
        3.0 * at.a * u + at.b,
        3.0 * at.a * u * u + 2.0 * at.b * u + at.c,
        at.a * u * u * u + at.b * u * u + at.c * u + at.d,
    );
    nu.scale(h.g.lambda)
}

/// Upper-half-plane point (x, y) attached to a nonsingular real form:
/// x = -u, y = t^2 in the coordinates of the form.  For the minus orbit it
/// is the root of the definite quadratic factor; for plus, of the Hessian.
/// Returns None when the discriminant vanishes (or the quadratic degenerates).
pub fn h_point(f: &CubicForm) -> Option<(f64, f64)> {
    let disc = f.disc();
    if disc == 0.0 || !disc.is_finite() {
        return None;
    }
    let (qa, qb, qc);
    if disc > 0.0 {
        // Hessian (b^2 - 3ac, bc - 9ad, c^2 - 3bd), definite here.
        qa = f.b * f.b - 3.0 * f.a * f.c;
        qb = f.b * f.c - 9.0 * f.a * f.d;
        qc = f.c * f.c - 3.0 * f.b * f.d;
    } else {
        // Split off the unique real root; the quadratic cofactor is definite.
        if f.a.abs() >= f.d.abs() {
            let r = real_root_monic_like(f.a, f.b, f.c, f.d)?;
            qa = f.a;
            qb = f.b + r * f.a;
            qc = f.c + r * qb;
        } else {
            // Work with f(1, y) and the cofactor in the reversed variable.
            let rho = real_root_monic_like(f.d, f.c, f.b, f.a)?;
            let dd = f.d;
            let e = f.c + rho * dd;
            let ff = f.b + rho * e;
            // Quadratic form F x^2 + E xy + D y^2 (coefficients in (x^2, xy, y^2)).
            qa = ff;
            qb = e;
            qc = dd;
        }
    }
    let (qa, qb, qc) = if qa < 0.0 { (-qa, -qb, -qc) } else { (qa, qb, qc) };
    let delta = 4.0 * qa * qc - qb * qb;
    if !(delta > 0.0) || qa == 0.0 {
        return None;
    }
    Some((-qb / (2.0 * qa), delta.sqrt() / (2.0 * qa)))
}

/// The real root of a x^3 + b x^2 + c x + d with |a| >= |d|, assuming exactly
/// one real root (negative cubic discriminant).  Cardano plus Newton polish.
fn real_root_monic_like(a: f64, b: f64, c: f64, d: f64) -> Option<f64> {
    if a == 0.0 {
        // Degenerate leading coefficient: fall back to the quadratic root.
        // (Callers arrange |a| >= |d| so this only happens for tiny forms.)
        if b != 0.0 {
            let disc = c * c - 4.0 * b * d;
            if disc >= 0.0 {
                return Some((-c - disc.sqrt().copysign(c + 1e-300)) / (2.0 * b));
            }
        }
        return None;
    }
    let p = b / a;
    let q = c / a;
    let r = d / a;
    // Depressed cubic s^3 + ps' s + qs'.
    let ps = q - p * p / 3.0;
    let qs = 2.0 * p * p * p / 27.0 - p * q / 3.0 + r;
    let half_q = qs / 2.0;
    let third_p = ps / 3.0;
    let delta = half_q * half_q + third_p * third_p * third_p;
    let mut root = if delta >= 0.0 {
        let sd = delta.sqrt();
        let u = cbrt(-half_q + sd);
        let v = cbrt(-half_q - sd);
        u + v - p / 3.0
    } else {
        // Three real roots; pick any (caller only hits this off the minus orbit).
        let rho = (-third_p).powf(1.5);
        let phi = (-half_q / rho).clamp(-1.0, 1.0).acos();
        2.0 * (-third_p).sqrt() * (phi / 3.0).cos() - p / 3.0
    };
    // Newton polish on the original cubic.
    for _ in 0..4 {
        let f = ((a * root + b) * root + c) * root + d;
        let df = (3.0 * a * root + 2.0 * b) * root + c;
        if df != 0.0 {
            root -= f / df;
        }
    }
    root.is_finite().then_some(root)
}

fn cbrt(x: f64) -> f64 {
    x.signum() * x.abs().powf(1.0 / 3.0)
}

/// Recover homogeneous coordinates from a nonsingular real form.
pub fn from_form(f: &CubicForm, sign: OrbitSign) -> Result<HomogeneousCoords, Gl2Error> {
    let disc = f.disc();
    if disc.abs() < 1e-250 {
        return Err(Gl2Error::NearSingular(disc));
    }
    if sign.as_f64() * disc < 0.0 {
        return Err(Gl2Error::SignMismatch);
    }
    let lambda = disc.abs().powf(0.25);
    let (x, y) = h_point(f).ok_or(Gl2Error::NearSingular(disc))?;
    let u = -x;
    let t = y.sqrt();
    // theta from the 1/2-slots of (n_u a_t d_lambda)^{-1} . f = k_theta . f_sign.
    let g0 = GroupElement::new(u, t, 0.0, lambda);
    let kpart = f.act(&g0.to_matrix().inverse())?;
    let theta = match sign {
        OrbitSign::Minus => {
            let s = kpart.a * 2.0_f64.sqrt();
            let c = kpart.b * 2.0_f64.sqrt();
            (s.atan2(c) / (2.0 * std::f64::consts::PI)).rem_euclid(1.0)
        }
        OrbitSign::Plus => {
            let k = 108.0_f64.powf(0.25);
            let s3 = kpart.a * k;
            let c3 = kpart.b * k / 3.0;
            let th3 = (s3.atan2(c3) / (2.0 * std::f64::consts::PI)).rem_euclid(1.0);
            (th3 / 3.0).rem_euclid(1.0 / 3.0)
        }
    };
    let mut h = HomogeneousCoords {
        sign,
        g: GroupElement::new(u, t, theta, lambda),
    };
    let scale = f.max_norm();
    let mut residual = to_form(&h).sub(f).max_norm() / scale;
    if residual > 1e-12 {
        // Damped Gauss-Newton polish on (u, t, theta).
        let mut best = h;
        let mut best_res = residual;
        for _ in 0..100 {
            let step = newton_step(&h, f);
            let mut damp = 1.0;
            let mut improved = false;
            for _ in 0..8 {
                let cand = apply_step(&h, &step, damp);
                let res = to_form(&cand).sub(f).max_norm() / scale;
                if res < residual {
                    h = cand;
                    residual = res;
                    improved = true;
                    break;
                }
                damp *= 0.5;
            }
            if residual < best_res {
                best = h;
                best_res = residual;
            }
            if !improved || residual < 1e-13 {
                break;
            }
        }
        h = best;
        residual = best_res;
        if residual > 1e-10 {
            return Err(Gl2Error::NoConvergence(residual));
        }
    }
    // Canonicalize theta range.
    let modulus = match sign {
        OrbitSign::Plus => 1.0 / 3.0,
        OrbitSign::Minus => 1.0,
    };
    h.g.theta = h.g.theta.rem_euclid(modulus);
    Ok(h)
}

fn newton_step(h: &HomogeneousCoords, target: &CubicForm) -> [f64; 3] {
    // 4x3 finite-difference Jacobian in (u, t, theta), normal equations.
    let f0 = to_form(h);
    let r0 = [
        f0.a - target.a,
        f0.b - target.b,
        f0.c - target.c,
        f0.d - target.d,
    ];
    let eps = 1e-7;
    let mut jac = [[0.0; 3]; 4];
    for p in 0..3 {
        let mut hp = *h;
        match p {
            0 => hp.g.u += eps,
            1 => hp.g.t += eps,
            _ => hp.g.theta += eps,
        }
        let fp = to_form(&hp);
        let col = [
            (fp.a - f0.a) / eps,
            (fp.b - f0.b) / eps,
            (fp.c - f0.c) / eps,
            (fp.d - f0.d) / eps,
        ];
        for (i, ji) in jac.iter_mut().enumerate() {
            ji[p] = col[i];
        }
    }
    // Solve (J^T J) s = -J^T r.
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for i in 0..3 {
        for j in 0..3 {
            for (k, jk) in jac.iter().enumerate() {
                ata[i][j] += jk[i] * jac[k][j];
                let _ = k;
            }
        }
        for (k, jk) in jac.iter().enumerate() {
            atb[i] -= jk[i] * r0[k];
        }
    }
    solve3(ata, atb)
}

fn apply_step(h: &HomogeneousCoords, step: &[f64; 3], damp: f64) -> HomogeneousCoords {
    let mut out = *h;
    out.g.u += damp * step[0];
    out.g.t = (out.g.t + damp * step[1]).max(1e-12);
    out.g.theta += damp * step[2];
    out
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let mut piv = col;
        for r in col + 1..3 {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let p = a[col][col];
        if p.abs() < 1e-300 {
            continue;
        }
        for r in 0..3 {
            if r != col {
                let fac = a[r][col] / p;
                for c in col..3 {
                    a[r][c] -= fac * a[col][c];
                }
                b[r] -= fac * b[col];
            }
        }
    }
    let mut x = [0.0; 3];
    for i in 0..3 {
        x[i] = if a[i][i].abs() < 1e-300 {
            0.0
        } else {
            b[i] / a[i][i]
        };
    }
    x
}

/// Finite-difference Jacobian of the coordinate map (u, t, theta, lambda) ->
/// (a, b, c, d), columns in that parameter order.
pub fn jacobian_probe(h: &HomogeneousCoords) -> Result<[[f64; 4]; 4], Gl2Error> {
    let mut jac = [[0.0; 4]; 4];
    for p in 0..4 {
        let base = match p {
            0 => h.g.u,
            1 => h.g.t,
            2 => h.g.theta,
            _ => h.g.lambda,
        };
        let eps = (1e-6 * base.abs()).max(1e-7);
        let mut hp = *h;
        let mut hm = *h;
        match p {
            0 => {
                hp.g.u += eps;
                hm.g.u -= eps;
            }
            1 => {
                hp.g.t += eps;
                hm.g.t -= eps;
            }
            2 => {
                hp.g.theta += eps;
                hm.g.theta -= eps;
            }
            _ => {
                hp.g.lambda += eps;
                hm.g.lambda -= eps;
            }
        }
        let fp = to_form(&hp);
        let fm = to_form(&hm);
        let col = [
            (fp.a - fm.a) / (2.0 * eps),
            (fp.b - fm.b) / (2.0 * eps),
            (fp.c - fm.c) / (2.0 * eps),
            (fp.d - fm.d) / (2.0 * eps),
        ];
        // Convergence guard: halve the step and compare.
        let eps2 = eps * 0.5;
        let mut hp2 = *h;
        let mut hm2 = *h;
        match p {
            0 => {
                hp2.g.u += eps2;
                hm2.g.u -= eps2;
            }
            1 => {
                hp2.g.t += eps2;
                hm2.g.t -= eps2;
            }
            2 => {
                hp2.g.theta += eps2;
                hm2.g.theta -= eps2;
            }
            _ => {
                hp2.g.lambda += eps2;
                hm2.g.lambda -= eps2;
            }
        }
        let fp2 = to_form(&hp2);
        let fm2 = to_form(&hm2);
        for (i, ji) in jac.iter_mut().enumerate() {
            ji[p] = col[i];
            let refine = (fp2.coeffs()[i] - fm2.coeffs()[i]) / (2.0 * eps2);
            let scale = col[i].abs().max(1.0);
            if ((refine - col[i]) / scale).abs() > 1e-3 {
                return Err(Gl2Error::NoConvergence((refine - col[i]).abs()));
            }
        }
    }
    Ok(jac)
}

pub fn det4(j: &[[f64; 4]; 4]) -> f64 {
    // Expansion by LU with partial pivoting.
    let mut a = *j;
    let mut det = 1.0;
    for col in 0..4 {
        let mut piv = col;
        for r in col + 1..4 {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if piv != col {
            a.swap(col, piv);
            det = -det;
        }
        let p = a[col][col];
        if p == 0.0 {
            return 0.0;
        }
        det *= p;
        for r in col + 1..4 {
            let fac = a[r][col] / p;
            for c in col..4 {
                a[r][c] -= fac * a[col][c];
            }
        }
    }
    det
}
