//! Concrete Lie groups near the identity: `R^d`, the Heisenberg group,
//! SU(2), SL(2,R) and SL(2,R) ⋉ H3(R).
//!
//! Each backend fixes an ordered basis of its Lie algebra and the Euclidean
//! norm in that basis. Algebra vectors are plain coordinate slices of length
//! [`Backend::dim`]. The metric is the chart distance `|log(g^-1 h)|`, which
//! is left invariant by construction and bi-Lipschitz to a Riemannian
//! left-invariant metric on the chart.

mod heisenberg;
mod matrix;
mod sl2;
mod su2;
mod subgroups;

pub use matrix::Mat;
pub use subgroups::{
    abelianization_target, abelianize, bracket_closure_residual, catalog, derived_rank, dist_to_subgroup, lower_central_series,
    quotient_project, quotient_target, span_rank, subgroup, SubgroupDescriptor, SubgroupKind,
};

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::free_lie::FreeLieElement;
use crate::scalar::{Field, Real};
use crate::word_synth::{GroupWord, SynthesizedApproximant};

/// A concrete group together with its fixed algebra basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    /// `R^d` under addition.
    Abelian(usize),
    /// Unipotent upper-triangular 3x3 matrices, basis `X, Y, Z`.
    Heisenberg3,
    /// Unit quaternions, basis `-i sigma_k`.
    Su2,
    /// 2x2 real matrices of determinant one, basis `H, E, F`.
    Sl2r,
    /// `SL(2,R) ⋉ H3(R)`, basis `H, E, F, X, Y, Z`.
    Sl2rH3,
}

impl Backend {
    /// Dimension of the Lie algebra.
    pub fn dim(&self) -> usize {
        match self {
            Backend::Abelian(d) => *d,
            Backend::Heisenberg3 | Backend::Su2 | Backend::Sl2r => 3,
            Backend::Sl2rH3 => 6,
        }
    }

    /// Number of stored coordinates of a group element.
    pub fn coords_len(&self) -> usize {
        match self {
            Backend::Abelian(d) => *d,
            Backend::Heisenberg3 => 3,
            Backend::Su2 | Backend::Sl2r => 4,
            Backend::Sl2rH3 => 16,
        }
    }

    /// Radius of the algebra ball on which `exp` is used as a chart.
    /// Nilpotent backends have global charts.
    pub fn chart_radius(&self) -> f64 {
        match self {
            Backend::Abelian(_) | Backend::Heisenberg3 => f64::INFINITY,
            Backend::Su2 => std::f64::consts::PI - 0.1,
            Backend::Sl2r | Backend::Sl2rH3 => 1.0,
        }
    }

    pub fn basis_names(&self) -> Vec<String> {
        let fixed: &[&str] = match self {
            Backend::Abelian(d) => return (1..=*d).map(|i| format!("e{i}")).collect(),
            Backend::Heisenberg3 => &["X", "Y", "Z"],
            Backend::Su2 => &["e1", "e2", "e3"],
            Backend::Sl2r => &["H", "E", "F"],
            Backend::Sl2rH3 => &["H", "E", "F", "X", "Y", "Z"],
        };
        fixed.iter().map(|s| s.to_string()).collect()
    }

    /// Whether the Lie algebra equals its derived algebra.
    pub fn is_perfect(&self) -> bool {
        matches!(self, Backend::Su2 | Backend::Sl2r | Backend::Sl2rH3)
    }

    pub fn identity<T: Real>(&self) -> GroupElement<T> {
        let (o, l) = (T::zero(), T::one());
        let coords = match self {
            Backend::Abelian(d) => vec![o; *d],
            Backend::Heisenberg3 => vec![o; 3],
            Backend::Su2 => vec![l, o, o, o],
            Backend::Sl2r => Mat::identity(2).into_vec(),
            Backend::Sl2rH3 => Mat::identity(4).into_vec(),
        };
        GroupElement { backend: *self, coords }
    }

    /// Wraps stored coordinates, checking group membership.
    pub fn element<T: Real>(&self, coords: Vec<T>) -> Result<GroupElement<T>> {
        if coords.len() != self.coords_len() {
            return Err(Error::usage(format!(
                "{self} elements have {} coordinates, got {}",
                self.coords_len(),
                coords.len()
            )));
        }
        let g = GroupElement { backend: *self, coords };
        let residual = self.membership_residual(&g);
        if residual > membership_tolerance::<T>() {
            return Err(Error::domain(format!("not an element of {self} (residual {residual})")));
        }
        Ok(g)
    }

    /// Largest violation of the defining equations of the group.
    pub fn membership_residual<T: Real>(&self, g: &GroupElement<T>) -> f64 {
        let c = &g.coords;
        let r = match self {
            Backend::Abelian(_) | Backend::Heisenberg3 => T::zero(),
            Backend::Su2 => (c.iter().fold(T::zero(), |a, &x| a + x * x) - T::one()).abs(),
            Backend::Sl2r => (c[0] * c[3] - c[1] * c[2] - T::one()).abs(),
            Backend::Sl2rH3 => sl2::semi_membership_residual(c),
        };
        r.to_real()
    }

    fn check_algebra<T: Real>(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::usage(format!(
                "{self} algebra vectors have {} coordinates, got {}",
                self.dim(),
                x.len()
            )));
        }
        Ok(())
    }

    /// Exponential map, restricted to the chart ball.
    pub fn exp<T: Real>(&self, x: &[T]) -> Result<GroupElement<T>> {
        self.check_algebra(x)?;
        let n = norm(x).to_real();
        if n > self.chart_radius() {
            return Err(Error::domain(format!(
                "|x| = {n} exceeds the {self} chart radius {}",
                self.chart_radius()
            )));
        }
        let coords = match self {
            Backend::Abelian(_) => x.to_vec(),
            Backend::Heisenberg3 => heisenberg::exp(x),
            Backend::Su2 => su2::exp(x),
            Backend::Sl2r => sl2::sl2_exp(x),
            Backend::Sl2rH3 => sl2::semi_exp(x),
        };
        Ok(GroupElement { backend: *self, coords })
    }

    /// Inverse chart; fails outside the chart ball.
    pub fn log<T: Real>(&self, g: &GroupElement<T>) -> Result<Vec<T>> {
        self.check_element(g)?;
        let c = &g.coords;
        let x = match self {
            Backend::Abelian(_) => c.clone(),
            Backend::Heisenberg3 => heisenberg::log(c),
            Backend::Su2 => su2::log(c),
            Backend::Sl2r => sl2::sl2_log(c)?,
            Backend::Sl2rH3 => sl2::semi_log(c)?,
        };
        let n = norm(&x).to_real();
        // Slack for rounding at the boundary of the ball.
        if !(n <= self.chart_radius() * (1.0 + 1e-12)) {
            return Err(Error::domain(format!(
                "element lies outside the {self} chart (|log g| = {n})"
            )));
        }
        Ok(x)
    }

    pub fn mul<T: Real>(&self, g: &GroupElement<T>, h: &GroupElement<T>) -> GroupElement<T> {
        debug_assert!(g.backend == *self && h.backend == *self);
        let (a, b) = (&g.coords, &h.coords);
        let coords = match self {
            Backend::Abelian(_) => a.iter().zip(b).map(|(&x, &y)| x + y).collect(),
            Backend::Heisenberg3 => heisenberg::mul(a, b),
            Backend::Su2 => su2::mul(a, b),
            Backend::Sl2r => Mat::from_rows(2, a.clone()).mul(&Mat::from_rows(2, b.clone())).into_vec(),
            Backend::Sl2rH3 => Mat::from_rows(4, a.clone()).mul(&Mat::from_rows(4, b.clone())).into_vec(),
        };
        GroupElement { backend: *self, coords }
    }

    pub fn inv<T: Real>(&self, g: &GroupElement<T>) -> GroupElement<T> {
        let c = &g.coords;
        let coords = match self {
            Backend::Abelian(_) => c.iter().map(|&x| -x).collect(),
            Backend::Heisenberg3 => heisenberg::inv(c),
            Backend::Su2 => su2::inv(c),
            Backend::Sl2r => sl2::sl2_inv(c),
            Backend::Sl2rH3 => semi_inverse(c),
        };
        GroupElement { backend: *self, coords }
    }

    /// `|log(g^-1 h)|`.
    pub fn dist<T: Real>(&self, g: &GroupElement<T>, h: &GroupElement<T>) -> Result<T> {
        Ok(norm(&self.log(&self.mul(&self.inv(g), h))?))
    }

    /// Lie bracket in the fixed basis.
    pub fn bracket<T: Real>(&self, x: &[T], y: &[T]) -> Vec<T> {
        match self {
            Backend::Abelian(d) => vec![T::zero(); *d],
            Backend::Heisenberg3 => heisenberg::bracket(x, y),
            Backend::Su2 => su2::bracket(x, y),
            Backend::Sl2r => sl2::sl2_bracket(x, y),
            Backend::Sl2rH3 => sl2::semi_bracket(x, y),
        }
    }

    /// `c[i][j][k]`, the `k`-th coordinate of `[b_i, b_j]`, flattened
    /// row-major.
    pub fn structure_constants<T: Real>(&self) -> Vec<T> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                out.extend(self.bracket(&unit::<T>(n, i), &unit::<T>(n, j)));
            }
        }
        out
    }

    /// Matrix of `Ad(g)` in the fixed basis (column `j` is `Ad(g) b_j`).
    pub fn adjoint<T: Real>(&self, g: &GroupElement<T>) -> Mat<T> {
        let c = &g.coords;
        match self {
            Backend::Abelian(d) => Mat::identity(*d),
            Backend::Heisenberg3 => heisenberg::adjoint(c),
            Backend::Su2 => su2::adjoint(c),
            Backend::Sl2r => {
                let m = Mat::from_rows(2, c.clone());
                let mi = Mat::from_rows(2, sl2::sl2_inv(c));
                conjugation_matrix(3, |x| {
                    sl2::sl2_algebra_coords(&m.mul(&sl2::sl2_algebra_matrix(x)).mul(&mi))
                })
            }
            Backend::Sl2rH3 => {
                let m = Mat::from_rows(4, c.clone());
                let mi = Mat::from_rows(4, semi_inverse(c));
                conjugation_matrix(6, |x| {
                    sl2::semi_algebra_coords(&m.mul(&sl2::semi_algebra_matrix(x)).mul(&mi))
                })
            }
        }
    }

    /// `Ad(g) x`.
    pub fn adjoint_apply<T: Real>(&self, g: &GroupElement<T>, x: &[T]) -> Vec<T> {
        let a = self.adjoint(g);
        let n = self.dim();
        (0..n).map(|i| (0..n).fold(T::zero(), |acc, j| acc + a[(i, j)] * x[j])).collect()
    }

    fn check_element<T>(&self, g: &GroupElement<T>) -> Result<()> {
        if g.backend != *self {
            return Err(Error::usage(format!("element of {} passed to {self}", g.backend)));
        }
        Ok(())
    }

    /// Uniform sample from the algebra ball of radius `r`.
    pub fn sample_algebra_ball<T: Real, R: Rng + ?Sized>(&self, rng: &mut R, r: f64) -> Vec<T> {
        sample_ball(rng, self.dim(), r)
    }
}

/// Uniform point of the Euclidean ball of radius `r` in `R^dim`, by
/// rejection from the cube.
pub fn sample_ball<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, r: f64) -> Vec<T> {
    if dim == 0 {
        return Vec::new();
    }
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return v.into_iter().map(|x| T::c(x * r)).collect();
        }
    }
}

fn semi_inverse<T: Real>(c: &[T]) -> Vec<T> {
    let m = Mat::from_rows(4, c.to_vec());
    m.inverse().expect("group elements are invertible").into_vec()
}

fn conjugation_matrix<T: Real>(n: usize, f: impl Fn(&[T]) -> Vec<T>) -> Mat<T> {
    let mut out = Mat::zeros(n);
    for j in 0..n {
        let col = f(&unit::<T>(n, j));
        for i in 0..n {
            out[(i, j)] = col[i];
        }
    }
    out
}

pub(crate) fn unit<T: Real>(n: usize, i: usize) -> Vec<T> {
    let mut v = vec![T::zero(); n];
    v[i] = T::one();
    v
}

/// Euclidean norm of an algebra vector.
pub fn norm<T: Real>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt()
}

fn membership_tolerance<T: Real>() -> f64 {
    (T::epsilon().to_real() * 1e4).max(1e-12)
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Abelian(d) => write!(f, "abelian:{d}"),
            Backend::Heisenberg3 => write!(f, "heis3"),
            Backend::Su2 => write!(f, "su2"),
            Backend::Sl2r => write!(f, "sl2r"),
            Backend::Sl2rH3 => write!(f, "sl2rxh3"),
        }
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "heis3" => Ok(Backend::Heisenberg3),
            "su2" => Ok(Backend::Su2),
            "sl2r" => Ok(Backend::Sl2r),
            "sl2rxh3" => Ok(Backend::Sl2rH3),
            other => {
                let d = other
                    .strip_prefix("abelian:")
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|&d| d >= 1)
                    .ok_or_else(|| {
                        Error::parse(format!(
                            "unknown backend '{s}' (expected abelian:<d>, heis3, su2, sl2r, sl2rxh3)"
                        ))
                    })?;
                Ok(Backend::Abelian(d))
            }
        }
    }
}

impl Serialize for Backend {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Backend {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A point of a backend group, stored in the backend's native coordinates
/// (see [`Backend::coords_len`]).
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement<T> {
    backend: Backend,
    coords: Vec<T>,
}

impl<T: Real> GroupElement<T> {
    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.backend.mul(self, other)
    }

    pub fn inv(&self) -> Self {
        self.backend.inv(self)
    }

    pub fn log(&self) -> Result<Vec<T>> {
        self.backend.log(self)
    }

    /// `g^n` by binary powering; negative `n` powers the inverse.
    pub fn pow(&self, n: i64) -> Self {
        let mut base = if n < 0 { self.inv() } else { self.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = self.backend.identity();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

/// Evaluates a group word with `letters[i]` substituted for `g_{i+1}`.
pub fn evaluate_word<T: Real>(w: &GroupWord, letters: &[GroupElement<T>]) -> Result<GroupElement<T>> {
    let Some(first) = letters.first() else {
        return Err(Error::usage("no letter images given"));
    };
    if letters.len() != w.generators() {
        return Err(Error::usage(format!("expected {} letter images, got {}", w.generators(), letters.len())));
    }
    if letters.iter().any(|g| g.backend() != first.backend()) {
        return Err(Error::usage("letter images live in different backends"));
    }
    Ok(w.evaluate(first.backend().identity(), |i, k| letters[i].pow(k), |a, b| a.mul(b)))
}

/// `d(exp(C (x_1 + ... + x_s)), w(exp x_1, ..., exp x_s))`, the numeric
/// defect of a synthesized approximant at the algebra vectors `xs`.
pub fn approximant_error<T: Real>(backend: Backend, a: &SynthesizedApproximant, xs: &[Vec<T>]) -> Result<T> {
    let mut sum = vec![T::zero(); backend.dim()];
    for x in xs {
        for (s, &v) in sum.iter_mut().zip(x) {
            *s = *s + v;
        }
    }
    let c = T::c(a.scale() as f64);
    let target = backend.exp(&sum.iter().map(|&v| c * v).collect::<Vec<_>>())?;
    let letters = xs.iter().map(|x| backend.exp(x)).collect::<Result<Vec<_>>>()?;
    backend.dist(&target, &evaluate_word(a.word(), &letters)?)
}

/// Evaluates a free Lie algebra element in the backend's algebra with
/// `xs[i]` substituted for `x_{i+1}`.
pub fn evaluate_lie<K: Field, T: Real>(backend: Backend, a: &FreeLieElement<K>, xs: &[Vec<T>]) -> Result<Vec<T>> {
    if xs.iter().any(|x| x.len() != backend.dim()) {
        return Err(Error::usage(format!("{backend} algebra vectors have {} coordinates", backend.dim())));
    }
    a.evaluate(
        xs,
        vec![T::zero(); backend.dim()],
        &|x: &Vec<T>, y: &Vec<T>| backend.bracket(x, y),
        &|acc: &mut Vec<T>, c: f64, v: &Vec<T>| {
            for (o, &vi) in acc.iter_mut().zip(v) {
                *o = *o + T::c(c) * vi;
            }
        },
    )
}

impl<T: Real + Serialize> Serialize for GroupElement<T> {
    /// A JSON array of the stored coordinates.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const ALL: [Backend; 6] = [
        Backend::Abelian(2),
        Backend::Abelian(3),
        Backend::Heisenberg3,
        Backend::Su2,
        Backend::Sl2r,
        Backend::Sl2rH3,
    ];

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn names_round_trip() {
        for b in ALL {
            assert_eq!(b.to_string().parse::<Backend>().unwrap(), b);
        }
        assert!("abelian:0".parse::<Backend>().is_err());
        assert!("so3".parse::<Backend>().is_err());
    }

    #[test]
    fn exp_of_zero_is_identity_and_log_inverts_exp() {
        let mut rng = rng();
        for b in ALL {
            let zero = vec![0.0; b.dim()];
            assert_eq!(b.exp(&zero).unwrap(), b.identity());
            assert!(close(&b.log(&b.identity::<f64>()).unwrap(), &zero, 0.0));
            let mut worst: f64 = 0.0;
            for _ in 0..1000 {
                let x: Vec<f64> = b.sample_algebra_ball(&mut rng, 0.1);
                let back = b.log(&b.exp(&x).unwrap()).unwrap();
                worst = worst.max(x.iter().zip(&back).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max));
            }
            assert!(worst <= 1e-10, "{b}: {worst}");
        }
    }

    #[test]
    fn round_trip_near_chart_boundary() {
        let mut rng = rng();
        for b in [Backend::Su2, Backend::Sl2r, Backend::Sl2rH3] {
            for _ in 0..200 {
                let x: Vec<f64> = b.sample_algebra_ball(&mut rng, b.chart_radius() * 0.99);
                let g = b.exp(&x).unwrap();
                assert!(b.membership_residual(&g) < 1e-12, "{b}");
                let back = b.log(&g).unwrap();
                assert!(close(&x, &back, 1e-10), "{b}: {x:?} vs {back:?}");
            }
        }
    }

    #[test]
    fn out_of_chart_is_a_domain_error() {
        assert!(matches!(Backend::Su2.exp(&[3.2, 0.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(Backend::Sl2r.exp(&[1.5, 0.0, 0.0]), Err(Error::Domain(_))));
        let far = Backend::Sl2r.element(vec![-2.0, 0.0, 0.0, -0.5]).unwrap();
        assert!(matches!(Backend::Sl2r.log(&far), Err(Error::Domain(_))));
        assert!(Backend::Su2.element(vec![1.0, 1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn heisenberg_commutator_is_central() {
        let b = Backend::Heisenberg3;
        let mut rng = rng();
        for _ in 0..100 {
            let t: f64 = rng.gen_range(-2.0..2.0);
            let gx = b.exp(&[t, 0.0, 0.0]).unwrap();
            let gy = b.exp(&[0.0, t, 0.0]).unwrap();
            let comm = gx.mul(&gy).mul(&gx.inv()).mul(&gy.inv());
            assert!(close(comm.coords(), b.exp(&[0.0, 0.0, t * t]).unwrap().coords(), 1e-14));
        }
        let sc: Vec<f64> = b.structure_constants();
        // Only [X,Y] = Z and [Y,X] = -Z survive.
        let nonzero: Vec<usize> = sc.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, _)| i).collect();
        assert_eq!(nonzero, vec![5, 11]);
    }

    #[test]
    fn su2_trace_and_series_oracle() {
        let b = Backend::Su2;
        let theta: f64 = 0.8;
        let g = b.exp(&[0.0, theta, 0.0]).unwrap();
        // Trace of the 2x2 matrix is 2w.
        assert!((2.0 * g.coords()[0] - 2.0 * theta.cos()).abs() < 1e-15);
        // Series oracle in the 4x4 real representation of left quaternion
        // multiplication.
        let v = [0.3, -0.5, 0.6];
        let left = |q: &[f64]| {
            Mat::from_rows(
                4,
                vec![
                    q[0], -q[1], -q[2], -q[3], q[1], q[0], -q[3], q[2], q[2], q[3], q[0], -q[1], q[3], -q[2],
                    q[1], q[0],
                ],
            )
        };
        let mut series = Mat::identity(4);
        let mut term = Mat::identity(4);
        let gen = left(&[0.0, v[0], v[1], v[2]]);
        for k in 1..40 {
            term = term.mul(&gen).scale(1.0 / k as f64);
            series = series.add(&term);
        }
        let e = b.exp(&v).unwrap();
        let col0: Vec<f64> = (0..4).map(|i| series[(i, 0)]).collect();
        assert!(close(&col0, e.coords(), 1e-12));
    }

    #[test]
    fn heisenberg_log_matches_matrix_log() {
        let g = [0.4, -0.7, 0.3];
        let m = heisenberg::matrix(&g).log().unwrap();
        let x = Backend::Heisenberg3.log(&Backend::Heisenberg3.element(g.to_vec()).unwrap()).unwrap();
        assert!(close(&x, &[m[(0, 1)], m[(1, 2)], m[(0, 2)]], 1e-13));
    }

    #[test]
    fn metric_is_left_invariant_and_symmetric() {
        let mut rng = rng();
        for b in ALL {
            for _ in 0..100 {
                let g = b.exp::<f64>(&b.sample_algebra_ball(&mut rng, 0.2)).unwrap();
                let h = b.exp::<f64>(&b.sample_algebra_ball(&mut rng, 0.2)).unwrap();
                let k = b.exp::<f64>(&b.sample_algebra_ball(&mut rng, 0.2)).unwrap();
                let d = b.dist(&g, &h).unwrap();
                assert!(b.dist(&g, &g).unwrap().abs() < 1e-12);
                assert!((b.dist(&k.mul(&g), &k.mul(&h)).unwrap() - d).abs() < 1e-12, "{b}");
                assert!((b.dist(&h, &g).unwrap() - d).abs() < 1e-10, "{b}");
            }
        }
    }

    #[test]
    fn adjoint_is_conjugation_differential_and_functorial() {
        let mut rng = rng();
        for b in ALL {
            let id: Mat<f64> = b.adjoint(&b.identity());
            assert_eq!(id, Mat::identity(b.dim()));
            for _ in 0..50 {
                let g = b.exp::<f64>(&b.sample_algebra_ball(&mut rng, 0.3)).unwrap();
                let h = b.exp::<f64>(&b.sample_algebra_ball(&mut rng, 0.3)).unwrap();
                let lhs = b.adjoint(&g.mul(&h));
                let rhs = b.adjoint(&g).mul(&b.adjoint(&h));
                assert!(lhs.sub(&rhs).norm() < 1e-10, "{b}");
                let x: Vec<f64> = b.sample_algebra_ball(&mut rng, 1.0);
                let eps = 1e-6;
                let small: Vec<f64> = x.iter().map(|v| v * eps).collect();
                let conj = g.mul(&b.exp(&small).unwrap()).mul(&g.inv());
                let lin: Vec<f64> = b.log(&conj).unwrap().iter().map(|v| v / eps).collect();
                assert!(close(&lin, &b.adjoint_apply(&g, &x), 1e-5), "{b}");
            }
        }
    }

    #[test]
    fn su2_adjoint_is_isometric() {
        let mut rng = rng();
        let b = Backend::Su2;
        for _ in 0..100 {
            let g = b.exp::<f64>(&b.sample_algebra_ball(&mut rng, 2.0)).unwrap();
            let x: Vec<f64> = b.sample_algebra_ball(&mut rng, 1.0);
            assert!((norm(&b.adjoint_apply(&g, &x)) - norm(&x)).abs() < 1e-10);
        }
    }

    #[test]
    fn f32_backends_work() {
        let b = Backend::Su2;
        let g = b.exp(&[0.1f32, 0.2, -0.1]).unwrap();
        let x = b.log(&g).unwrap();
        assert!((x[1] - 0.2).abs() < 1e-6);
    }

    #[test]
    fn elements_serialize_as_coordinate_arrays() {
        let g = Backend::Heisenberg3.exp(&[1.0, 2.0, 0.0]).unwrap();
        assert_eq!(serde_json::to_string(&g).unwrap(), "[1.0,2.0,1.0]");
        assert_eq!(serde_json::to_string(&Backend::Abelian(3)).unwrap(), "\"abelian:3\"");
    }

    fn random_direction(rng: &mut ChaCha8Rng, dim: usize, h: f64) -> Vec<f64> {
        let v: Vec<f64> = sample_ball(rng, dim, 1.0);
        let n = norm(&v);
        v.iter().map(|x| x * h / n).collect()
    }

    #[test]
    fn bch_series_matches_group_product() {
        use crate::free_lie::{FreeLieAlgebra, FreeLieElement};
        let alg = FreeLieAlgebra::<crate::Rational>::new(2, 5).unwrap();
        let x = FreeLieElement::generator(&alg, 0);
        let y = FreeLieElement::generator(&alg, 1);
        let z = x.bch(&y, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for b in [Backend::Su2, Backend::Sl2r, Backend::Sl2rH3] {
            let dx = random_direction(&mut rng, b.dim(), 1.0);
            let dy = random_direction(&mut rng, b.dim(), 1.0);
            let hs = crate::fit::log_space(0.02, 0.2, 8);
            let errs: Vec<f64> = hs
                .iter()
                .map(|&h| {
                    let xs = vec![dx.iter().map(|v| v * h).collect(), dy.iter().map(|v| v * h).collect()];
                    let zv = evaluate_lie(b, &z, &xs).unwrap();
                    let lhs = b.exp(&xs[0]).unwrap().mul(&b.exp(&xs[1]).unwrap());
                    b.dist(&lhs, &b.exp(&zv).unwrap()).unwrap()
                })
                .collect();
            let slope = crate::fit::log_log_slope(&hs, &errs).unwrap();
            assert!(slope >= 5.7, "{b}: slope {slope}");
        }
    }

    #[test]
    fn synthesized_words_have_numeric_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for order in 2..=4 {
            let a = crate::word_synth::synthesize(2, order).unwrap();
            for b in [Backend::Su2, Backend::Sl2r, Backend::Sl2rH3] {
                let dirs = [random_direction(&mut rng, b.dim(), 1.0), random_direction(&mut rng, b.dim(), 1.0)];
                let hs = crate::fit::log_space(1e-3, 10f64.powf(-1.5), 20);
                let errs: Vec<f64> = hs
                    .iter()
                    .map(|&h| {
                        let xs: Vec<Vec<f64>> = dirs.iter().map(|d| d.iter().map(|v| v * h).collect()).collect();
                        approximant_error(b, &a, &xs).unwrap()
                    })
                    .collect();
                let slope = crate::fit::log_log_slope(&hs, &errs).unwrap();
                assert!(slope >= order as f64 - 0.3, "{b} order {order}: slope {slope}, C = {}", a.scale());
            }
        }
    }

    #[test]
    fn powers_and_word_evaluation() {
        let b = Backend::Su2;
        let g = b.exp(&[0.1, 0.2, -0.05]).unwrap();
        let direct = b.exp(&[0.7, 1.4, -0.35]).unwrap();
        assert!(b.dist(&g.pow(7), &direct).unwrap() < 1e-13);
        assert!(b.dist(&g.pow(-3).mul(&g.pow(3)), &b.identity()).unwrap() < 1e-14);
        let w: GroupWord = "g1 g2 g1^-1 g2^-1".parse().unwrap();
        let (x, y) = (Backend::Heisenberg3.exp::<f64>(&[0.5, 0.0, 0.0]).unwrap(), Backend::Heisenberg3.exp(&[0.0, 0.3, 0.0]).unwrap());
        let c = evaluate_word(&w, &[x, y]).unwrap();
        assert!((c.coords()[2] - 0.15).abs() < 1e-15);
    }
}
