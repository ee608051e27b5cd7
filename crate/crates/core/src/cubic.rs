//! Exact arithmetic on integral binary cubic forms and their orbits:
//! discriminant, dual pairing, the GL2 substitution action, singular-fiber
//! classification, stabilizers, and canonicalization into the fundamental
//! domain.
//!
//! Integral coefficients are i64 with all invariant computations done in
//! i128.  That is exact for |coefficient| up to 1e8, far beyond every
//! enumeration bound used here.

use crate::gl2::{self, Mat2};
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CubicError {
    #[error("form is singular (discriminant 0)")]
    Singular,
    #[error("sign does not match the discriminant sign")]
    SignMismatch,
    #[error("coefficients exceed the exact-arithmetic bound")]
    Overflow,
    #[error("reduction walk did not terminate")]
    WalkBudget,
    #[error("singular-fiber search budget exhausted")]
    SearchBudget,
    #[error("matrix must have positive determinant")]
    BadDeterminant,
    #[error("form is not a dual-lattice member")]
    NotDual,
    #[error("form is not singular (discriminant nonzero)")]
    NotSingular,
}

/// Integral binary cubic form a x^3 + b x^2 y + c x y^2 + d y^3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

/// Real binary cubic form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubicForm {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Element of SL2(Z) (row-major entries).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SlMat {
    pub m: [[i64; 2]; 2],
}

/// Fiber of a singular (discriminant-zero) integral dual form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingularFiber {
    Zero,
    Unipotent(u64),
    Generic { m: u64, n: u64 },
}

pub const COEFF_BOUND: i64 = 100_000_000;

impl IntForm {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self { a, b, c, d }
    }

    pub fn coeffs(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0 && self.c == 0 && self.d == 0
    }

    pub fn max_abs(&self) -> i64 {
        self.coeffs().iter().map(|v| v.abs()).max().unwrap()
    }

    /// Discriminant b²c² - 4ac³ - 4b³d - 27a²d² + 18abcd, exact.
    pub fn disc(&self) -> i128 {
        debug_assert!(self.max_abs() <= COEFF_BOUND);
        let (a, b, c, d) = (
            self.a as i128,
            self.b as i128,
            self.c as i128,
            self.d as i128,
        );
        b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d
            + 18 * a * b * c * d
    }

    /// Three times the dual pairing <f, g>; always an integer.
    pub fn pairing3(&self, g: &IntForm) -> i128 {
        let (f1, f2, f3, f4) = (
            self.a as i128,
            self.b as i128,
            self.c as i128,
            self.d as i128,
        );
        let (g1, g2, g3, g4) = (g.a as i128, g.b as i128, g.c as i128, g.d as i128);
        3 * f1 * g4 - f2 * g3 + f3 * g2 - 3 * f4 * g1
    }

    /// Dual-lattice membership: pairs integrally with every integral form.
    pub fn is_dual_member(&self) -> bool {
        self.b % 3 == 0 && self.c % 3 == 0
    }

    /// Substitution action of gamma in SL2(Z): (gamma . f)(x, y) = f((x, y) gamma).
    pub fn act(&self, g: &SlMat) -> IntForm {
        debug_assert_eq!(g.det(), 1, "IntForm::act expects det 1");
        let (p, q) = (g.m[0][0] as i128, g.m[0][1] as i128);
        let (r, s) = (g.m[1][0] as i128, g.m[1][1] as i128);
        let (a, b, c, d) = (
            self.a as i128,
            self.b as i128,
            self.c as i128,
            self.d as i128,
        );
        let na = a * p * p * p + b * p * p * q + c * p * q * q + d * q * q * q;
        let nb = 3 * a * p * p * r
            + b * (p * p * s + 2 * p * q * r)
            + c * (q * q * r + 2 * p * q * s)
            + 3 * d * q * q * s;
        let nc = 3 * a * p * r * r
            + b * (r * r * q + 2 * p * r * s)
            + c * (p * s * s + 2 * q * r * s)
            + 3 * d * q * s * s;
        let nd = a * r * r * r + b * r * r * s + c * r * s * s + d * s * s * s;
        let cast = |v: i128| -> i64 {
            debug_assert!(v.abs() <= COEFF_BOUND as i128);
            v as i64
        };
        IntForm::new(cast(na), cast(nb), cast(nc), cast(nd))
    }

    pub fn neg(&self) -> IntForm {
        IntForm::new(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn to_real(&self) -> CubicForm {
        CubicForm {
            a: self.a as f64,
            b: self.b as f64,
            c: self.c as f64,
            d: self.d as f64,
        }
    }

    fn key(&self) -> (i64, i64, i64, i64) {
        (self.a, self.b, self.c, self.d)
    }
}

impl CubicForm {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn disc(&self) -> f64 {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        b * b * c * c - 4.0 * a * c * c * c - 4.0 * b * b * b * d - 27.0 * a * a * d * d
            + 18.0 * a * b * c * d
    }

    pub fn pairing(&self, g: &CubicForm) -> f64 {
        self.a * g.d - self.b * g.c / 3.0 + self.c * g.b / 3.0 - self.d * g.a
    }

    /// GL2(R)+ action: (gamma . f)(x, y) = f((x, y) gamma) / det(gamma).
    pub fn act(&self, g: &Mat2) -> Result<CubicForm, CubicError> {
        let det = g.det();
        if det <= 0.0 {
            return Err(CubicError::BadDeterminant);
        }
        let (p, q) = (g.m[0][0], g.m[0][1]);
        let (r, s) = (g.m[1][0], g.m[1][1]);
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let na = a * p * p * p + b * p * p * q + c * p * q * q + d * q * q * q;
        let nb = 3.0 * a * p * p * r
            + b * (p * p * s + 2.0 * p * q * r)
            + c * (q * q * r + 2.0 * p * q * s)
            + 3.0 * d * q * q * s;
        let nc = 3.0 * a * p * r * r
            + b * (r * r * q + 2.0 * p * r * s)
            + c * (p * s * s + 2.0 * q * r * s)
            + 3.0 * d * q * s * s;
        let nd = a * r * r * r + b * r * r * s + c * r * s * s + d * s * s * s;
        Ok(CubicForm::new(na / det, nb / det, nc / det, nd / det))
    }

    pub fn scale(&self, k: f64) -> CubicForm {
        CubicForm::new(k * self.a, k * self.b, k * self.c, k * self.d)
    }

    pub fn sub(&self, o: &CubicForm) -> CubicForm {
        CubicForm::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }

    pub fn max_norm(&self) -> f64 {
        self.a
            .abs()
            .max(self.b.abs())
            .max(self.c.abs())
            .max(self.d.abs())
    }

    pub fn coeffs(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

impl SlMat {
    pub const IDENTITY: SlMat = SlMat {
        m: [[1, 0], [0, 1]],
    };
    /// Inversion move: acts on the half-plane point of a form by z -> -1/z.
    pub const S: SlMat = SlMat {
        m: [[0, -1], [1, 0]],
    };
    pub const NEG_IDENTITY: SlMat = SlMat {
        m: [[-1, 0], [0, -1]],
    };

    pub fn det(&self) -> i64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Lower-triangular unipotent n_u with integer u; acts on the
    /// half-plane point of a form by z -> z - u.
    pub fn n(u: i64) -> SlMat {
        SlMat {
            m: [[1, 0], [u, 1]],
        }
    }

    pub fn mul(&self, o: &SlMat) -> SlMat {
        let mut m = [[0i64; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j];
            }
        }
        SlMat { m }
    }

    pub fn max_abs(&self) -> i64 {
        self.m.iter().flatten().map(|v| v.abs()).max().unwrap()
    }

    pub fn to_real(&self) -> Mat2 {
        Mat2 {
            m: [
                [self.m[0][0] as f64, self.m[0][1] as f64],
                [self.m[1][0] as f64, self.m[1][1] as f64],
            ],
        }
    }
}

/// All integral forms with max |coefficient| <= h, row-major order.
pub fn box_forms(h: i64) -> impl Iterator<Item = IntForm> {
    let r = move || -h..=h;
    r().flat_map(move |a| {
        r().flat_map(move |b| r().flat_map(move |c| r().map(move |d| IntForm::new(a, b, c, d))))
    })
}

/// Dual-lattice forms with max |coefficient| <= h (middle coefficients in 3Z).
pub fn dual_box_forms(h: i64) -> impl Iterator<Item = IntForm> {
    let outer = move || -h..=h;
    let mid = move || (-h..=h).filter(|v| v % 3 == 0);
    outer().flat_map(move |a| {
        mid().flat_map(move |b| {
            mid().flat_map(move |c| outer().map(move |d| IntForm::new(a, b, c, d)))
        })
    })
}

/// Result of a stabilizer count.
#[derive(Clone, Copy, Debug)]
pub struct StabCount {
    pub order: u32,
    /// Some stabilizing matrix has an entry within 10% of the search bound;
    /// the bound may be too small to be conclusive.
    pub near_bound: bool,
}

/// Count gamma in SL2(Z) with all entries bounded by `bound` fixing `f`.
pub fn stabilizer_order(f: &IntForm, bound: i64) -> Result<StabCount, CubicError> {
    if f.disc() == 0 {
        return Err(CubicError::Singular);
    }
    let mut order = 0u32;
    let mut near = false;
    let flag_cut = bound - (bound as f64 * 0.1).ceil() as i64;
    let mut check = |g: SlMat| {
        if f.act(&g) == *f {
            order += 1;
            if g.max_abs() >= flag_cut {
                near = true;
            }
        }
    };
    for p in -bound..=bound {
        for q in -bound..=bound {
            if p == 0 {
                // det = -qr = 1.
                if q == 1 || q == -1 {
                    for s in -bound..=bound {
                        check(SlMat {
                            m: [[0, q], [-q, s]],
                        });
                    }
                }
                continue;
            }
            for r in -bound..=bound {
                // p s - q r = 1  =>  s = (1 + q r) / p.
                let num = 1 + q * r;
                if num % p != 0 {
                    continue;
                }
                let s = num / p;
                if s.abs() <= bound {
                    check(SlMat {
                        m: [[p, q], [r, s]],
                    });
                }
            }
        }
    }
    Ok(StabCount {
        order,
        near_bound: near,
    })
}

/// Classify a singular integral dual form into its fiber.
pub fn classify_singular(xi: &IntForm) -> Result<SingularFiber, CubicError> {
    if !xi.is_dual_member() {
        return Err(CubicError::NotDual);
    }
    if xi.disc() != 0 {
        return Err(CubicError::NotSingular);
    }
    if xi.is_zero() {
        return Ok(SingularFiber::Zero);
    }
    // Best-first search over generator moves, ordered by coefficient norm,
    // until a representative (0, 0, *, *) is found.
    let gens = [SlMat::n(1), SlMat::n(-1), SlMat::S];
    let norm = |f: &IntForm| -> i128 {
        f.coeffs()
            .iter()
            .map(|&v| (v as i128) * (v as i128))
            .sum()
    };
    let mut seen: HashSet<(i64, i64, i64, i64)> = HashSet::new();
    let mut heap: BinaryHeap<std::cmp::Reverse<(i128, IntForm)>> = BinaryHeap::new();
    heap.push(std::cmp::Reverse((norm(xi), *xi)));
    seen.insert(xi.key());
    let budget = 200_000usize;
    let mut steps = 0usize;
    while let Some(std::cmp::Reverse((_, f))) = heap.pop() {
        steps += 1;
        if steps > budget {
            return Err(CubicError::SearchBudget);
        }
        if f.a == 0 && f.b == 0 {
            let (mut c, mut d) = (f.c, f.d);
            if c == 0 {
                return Ok(SingularFiber::Unipotent(d.unsigned_abs()));
            }
            if c < 0 {
                c = -c;
                d = -d;
            }
            debug_assert_eq!(c % 3, 0);
            let m = (c / 3) as u64;
            let n = d.rem_euclid(c) as u64;
            return Ok(SingularFiber::Generic { m, n });
        }
        if f.max_abs() > COEFF_BOUND / 8 {
            continue;
        }
        for g in &gens {
            let nf = f.act(g);
            if seen.insert(nf.key()) {
                heap.push(std::cmp::Reverse((norm(&nf), nf)));
            }
        }
    }
    Err(CubicError::SearchBudget)
}

fn candidate_matrices() -> &'static Vec<SlMat> {
    static CACHE: OnceLock<Vec<SlMat>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let bound = 8i64;
        let mut v = Vec::new();
        for p in -bound..=bound {
            for q in -bound..=bound {
                if p == 0 {
                    if q == 1 || q == -1 {
                        for s in -bound..=bound {
                            v.push(SlMat {
                                m: [[0, q], [-q, s]],
                            });
                        }
                    }
                    continue;
                }
                for r in -bound..=bound {
                    let num = 1 + q * r;
                    if num % p == 0 {
                        let s = num / p;
                        if s.abs() <= bound {
                            v.push(SlMat {
                                m: [[p, q], [r, s]],
                            });
                        }
                    }
                }
            }
        }
        v
    })
}

const DOMAIN_TOL: f64 = 1e-9;

fn in_domain_tol(x: f64, y: f64) -> bool {
    x.abs() <= 0.5 + DOMAIN_TOL && x * x + y * y >= 1.0 - DOMAIN_TOL
}

/// Canonical fundamental-domain representative of the SL2(Z)-orbit of `f`,
/// with a matrix carrying f onto it.  Two nonsingular integral forms are
/// equivalent iff their canonical representatives are equal.
pub fn canonicalize(f: &IntForm, sign: i32) -> Result<(IntForm, SlMat), CubicError> {
    let disc = f.disc();
    if disc == 0 {
        return Err(CubicError::Singular);
    }
    if (disc > 0) != (sign > 0) {
        return Err(CubicError::SignMismatch);
    }
    canonicalize_auto(f)
}

/// As [`canonicalize`], with the orbit sign inferred from the discriminant.
pub fn canonicalize_auto(f: &IntForm) -> Result<(IntForm, SlMat), CubicError> {
    if f.disc() == 0 {
        return Err(CubicError::Singular);
    }
    // Walk the upper-half-plane point into the standard fundamental domain.
    let mut cur = *f;
    let mut gamma = SlMat::IDENTITY;
    let mut boundary = false;
    let mut done = false;
    for _ in 0..500 {
        let (x, y) = gl2::h_point(&cur.to_real()).ok_or(CubicError::Singular)?;
        if x.abs() > 0.5 + DOMAIN_TOL {
            let step = SlMat::n(x.round() as i64);
            cur = cur.act(&step);
            gamma = step.mul(&gamma);
            continue;
        }
        let r2 = x * x + y * y;
        if r2 < 1.0 - DOMAIN_TOL {
            cur = cur.act(&SlMat::S);
            gamma = SlMat::S.mul(&gamma);
            continue;
        }
        boundary = x.abs() > 0.5 - 1e-7 || r2 < 1.0 + 1e-7;
        done = true;
        break;
    }
    if !done {
        return Err(CubicError::WalkBudget);
    }

    // Resolve residual ambiguity (±f always; boundary identifications and
    // elliptic stabilizers when the walk ended near the domain boundary) by
    // taking the lexicographically smallest reduced candidate.
    let mut best = cur.min(cur.neg());
    let mut best_gamma = gamma;
    if best == cur.neg() {
        best_gamma = SlMat::NEG_IDENTITY.mul(&gamma);
    }
    if boundary {
        for g in candidate_matrices() {
            let h = cur.act(g);
            let hh = h.min(h.neg());
            if hh < best {
                if let Some((x, y)) = gl2::h_point(&h.to_real()) {
                    if in_domain_tol(x, y) {
                        best = hh;
                        let mut gm = g.mul(&gamma);
                        if hh == h.neg() {
                            gm = SlMat::NEG_IDENTITY.mul(&gm);
                        }
                        best_gamma = gm;
                    }
                }
            }
        }
    }
    debug_assert_eq!(f.act(&best_gamma), best);
    Ok((best, best_gamma))
}

/// Partition a list of nonsingular forms into SL2(Z)-orbit classes by breadth
/// first closure over generator moves, allowing intermediate forms with
/// coefficients up to `coeff_cap`.  Brute-force oracle for the enumerator.
pub fn orbit_partition(list: &[IntForm], coeff_cap: i64) -> Vec<usize> {
    let index: HashMap<(i64, i64, i64, i64), usize> =
        list.iter().enumerate().map(|(i, f)| (f.key(), i)).collect();
    let gens = [SlMat::n(1), SlMat::n(-1), SlMat::S, SlMat::NEG_IDENTITY];
    let mut comp = vec![usize::MAX; list.len()];
    let mut ncomp = 0usize;
    for start in 0..list.len() {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = ncomp;
        ncomp += 1;
        comp[start] = id;
        let mut frontier = vec![list[start]];
        let mut visited: HashSet<(i64, i64, i64, i64)> = HashSet::new();
        visited.insert(list[start].key());
        while let Some(f) = frontier.pop() {
            for g in &gens {
                let nf = f.act(g);
                if nf.max_abs() > coeff_cap {
                    continue;
                }
                if visited.insert(nf.key()) {
                    if let Some(&i) = index.get(&nf.key()) {
                        comp[i] = id;
                    }
                    frontier.push(nf);
                }
            }
        }
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn disc_examples() {
        assert_eq!(IntForm::new(1, 0, -1, 0).disc(), 4);
        assert_eq!(IntForm::new(0, 0, 3, 1).disc(), 0);
        assert_eq!(IntForm::new(1, 1, 1, 1).disc(), -16);
        assert_eq!(IntForm::new(0, 1, 1, 0).disc(), 1);
    }

    #[test]
    fn pairing_examples() {
        let e1 = IntForm::new(1, 0, 0, 0);
        let e4 = IntForm::new(0, 0, 0, 1);
        assert_eq!(e1.pairing3(&e4), 3); // <e1, e4> = 1
        let f = IntForm::new(2, -5, 7, 3);
        assert_eq!(f.pairing3(&f), 0);
        let x = IntForm::new(0, 3, 0, 0);
        let y = IntForm::new(0, 0, 1, 0);
        assert_eq!(x.pairing3(&y), -3); // <x, y> = -1
    }

    #[test]
    fn pairing_antisymmetry_sweep() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..200 {
            let f = IntForm::new(
                rng.int_in(-50, 50),
                rng.int_in(-50, 50),
                rng.int_in(-50, 50),
                rng.int_in(-50, 50),
            );
            let g = IntForm::new(
                rng.int_in(-50, 50),
                rng.int_in(-50, 50),
                rng.int_in(-50, 50),
                rng.int_in(-50, 50),
            );
            assert_eq!(f.pairing3(&g), -g.pairing3(&f));
        }
    }

    #[test]
    fn action_examples() {
        let f = IntForm::new(2, 3, 5, 7);
        assert_eq!(f.act(&SlMat::IDENTITY), f);
        // ((0,1),(-1,0)) sends (a,b,c,d) to (d,-c,b,-a).
        let s_up = SlMat {
            m: [[0, 1], [-1, 0]],
        };
        assert_eq!(f.act(&s_up), IntForm::new(7, -5, 3, -2));
        // n_1: (x, y) -> (x + y, y).
        let g = IntForm::new(1, 0, 0, 0).act(&SlMat::n(1));
        assert_eq!(g, IntForm::new(1, 3, 3, 1));
    }

    #[test]
    fn disc_invariance_under_action() {
        let mut rng = SplitMix64::new(11);
        let gens = [SlMat::n(1), SlMat::n(-1), SlMat::S];
        for _ in 0..500 {
            let f = IntForm::new(
                rng.int_in(-30, 30),
                rng.int_in(-30, 30),
                rng.int_in(-30, 30),
                rng.int_in(-30, 30),
            );
            let mut g = SlMat::IDENTITY;
            for _ in 0..6 {
                g = gens[(rng.next_u64() % 3) as usize].mul(&g);
            }
            assert_eq!(f.act(&g).disc(), f.disc());
        }
    }

    #[test]
    fn dual_membership() {
        assert!(IntForm::new(0, 0, 3, 1).is_dual_member());
        assert!(!IntForm::new(0, 1, 0, 0).is_dual_member());
        assert!(IntForm::new(1, 3, 6, 2).is_dual_member());
    }

    #[test]
    fn box_counts() {
        assert_eq!(box_forms(1).count(), 81);
        assert_eq!(box_forms(2).count(), 625);
    }

    #[test]
    fn stabilizers() {
        let f = IntForm::new(0, 1, 1, 0);
        let st = stabilizer_order(&f, 10).unwrap();
        assert_eq!(st.order, 3);
        assert!(!st.near_bound);
        // The order-3 element ((0,-1),(1,-1)) fixes it.
        let g = SlMat {
            m: [[0, -1], [1, -1]],
        };
        assert_eq!(f.act(&g), f);
        let f2 = IntForm::new(1, 0, -1, 0);
        assert_eq!(stabilizer_order(&f2, 10).unwrap().order, 1);
    }

    #[test]
    fn singular_fibers() {
        assert_eq!(
            classify_singular(&IntForm::new(0, 0, 0, 0)).unwrap(),
            SingularFiber::Zero
        );
        assert_eq!(
            classify_singular(&IntForm::new(0, 0, 0, 5)).unwrap(),
            SingularFiber::Unipotent(5)
        );
        assert_eq!(
            classify_singular(&IntForm::new(0, 0, 3, 2)).unwrap(),
            SingularFiber::Generic { m: 1, n: 2 }
        );
        // A translated/inverted image classifies identically.
        let base = IntForm::new(0, 0, 6, 5);
        let moved = base.act(&SlMat::n(3)).act(&SlMat::S).act(&SlMat::n(-2));
        assert_eq!(
            classify_singular(&moved).unwrap(),
            SingularFiber::Generic { m: 2, n: 5 }
        );
        assert!(classify_singular(&IntForm::new(0, 1, 1, 0)).is_err());
    }

    #[test]
    fn canonicalize_basic() {
        let f = IntForm::new(1, 0, -1, 0);
        let (rep, g) = canonicalize_auto(&f).unwrap();
        let (rep2, _) = canonicalize_auto(&rep).unwrap();
        assert_eq!(rep, rep2, "idempotence");
        assert_eq!(f.act(&g), rep);
        // A translated form recovers the same representative.
        let moved = f.act(&SlMat::n(4));
        let (rep3, _) = canonicalize_auto(&moved).unwrap();
        assert_eq!(rep, rep3);
    }

    #[test]
    fn canonicalize_equivalence_oracle() {
        // Orbit invariance under random small matrices, over a small box.
        let mut rng = SplitMix64::new(23);
        let gens = [SlMat::n(1), SlMat::n(-1), SlMat::S];
        let mut tested = 0;
        for f in box_forms(3) {
            if f.disc() == 0 {
                continue;
            }
            tested += 1;
            if tested > 400 {
                break;
            }
            let (rep, _) = canonicalize_auto(&f).unwrap();
            for _ in 0..5 {
                let mut g = SlMat::IDENTITY;
                for _ in 0..5 {
                    g = gens[(rng.next_u64() % 3) as usize].mul(&g);
                }
                let (rep2, _) = canonicalize_auto(&f.act(&g)).unwrap();
                assert_eq!(rep, rep2, "orbit invariance failed for {f:?} under {g:?}");
            }
        }
    }
}
