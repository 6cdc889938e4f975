//! A fixed catalog of closed connected subgroups per backend, distances to
//! them in the log chart, and the supported quotient maps.

use serde::Serialize;

use super::{norm, unit, Backend, GroupElement};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubgroupKind {
    Trivial,
    /// The center; for the Heisenberg group also the second term of the
    /// lower central series.
    Center,
    /// Kernel of the projection onto a factor of a semidirect product.
    FactorKernel,
    NormalIdeal,
    /// A coordinate subspace of `R^d`.
    Coordinate,
    OneParameter,
    Torus,
    Levi,
    Borel,
}

/// A connected subgroup given by an orthonormal basis of its Lie algebra.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubgroupDescriptor {
    pub backend: Backend,
    pub name: String,
    pub kind: SubgroupKind,
    pub normal: bool,
    /// Orthonormal basis of the subalgebra in the backend's coordinates.
    pub basis: Vec<Vec<f64>>,
}

impl SubgroupDescriptor {
    /// Subgroup spanned by `vectors`, which are orthonormalized. Fails when
    /// the span is not closed under the bracket.
    pub fn span(
        backend: Backend,
        name: impl Into<String>,
        kind: SubgroupKind,
        normal: bool,
        vectors: &[Vec<f64>],
    ) -> Result<Self> {
        if vectors.iter().any(|v| v.len() != backend.dim()) {
            return Err(Error::usage(format!("{backend} algebra vectors have {} coordinates", backend.dim())));
        }
        let basis = orthonormalize(vectors, 1e-12);
        let h = SubgroupDescriptor { backend, name: name.into(), kind, normal, basis };
        let residual = bracket_closure_residual(&h);
        if residual > 1e-12 {
            return Err(Error::usage(format!("span is not a subalgebra (residual {residual})")));
        }
        Ok(h)
    }

    /// The coordinate subgroup `span{e_i : i in axes}` of `R^d`.
    pub fn coordinate(d: usize, axes: &[usize]) -> Result<Self> {
        if axes.iter().any(|&i| i >= d) {
            return Err(Error::usage(format!("axis out of range for abelian:{d}")));
        }
        let names: Vec<String> = axes.iter().map(|i| format!("e{}", i + 1)).collect();
        let vectors: Vec<Vec<f64>> = axes.iter().map(|&i| unit(d, i)).collect();
        let kind = if axes.is_empty() { SubgroupKind::Trivial } else { SubgroupKind::Coordinate };
        Self::span(Backend::Abelian(d), format!("span{{{}}}", names.join(",")), kind, true, &vectors)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Orthogonal projection onto the subalgebra.
    pub fn project<T: Real>(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); x.len()];
        for b in &self.basis {
            let c = x.iter().zip(b).fold(T::zero(), |acc, (&xi, &bi)| acc + xi * T::c(bi));
            for (o, &bi) in out.iter_mut().zip(b) {
                *o = *o + c * T::c(bi);
            }
        }
        out
    }
}

/// Gram–Schmidt, dropping vectors within `tol` of the running span.
pub(crate) fn orthonormalize(vectors: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let n = norm(&w);
        if n > tol {
            basis.push(w.into_iter().map(|x| x / n).collect());
        }
    }
    basis
}

/// Largest distance from a bracket of basis vectors to the subalgebra.
pub fn bracket_closure_residual(h: &SubgroupDescriptor) -> f64 {
    let mut worst: f64 = 0.0;
    for a in &h.basis {
        for b in &h.basis {
            let c = h.backend.bracket(a, b);
            let p = h.project(&c);
            let r: Vec<f64> = c.iter().zip(&p).map(|(x, y)| x - y).collect();
            worst = worst.max(norm(&r));
        }
    }
    worst
}

/// Dimension of the span of `vectors`, ignoring directions below `tol`.
pub fn span_rank(vectors: &[Vec<f64>], tol: f64) -> usize {
    orthonormalize(vectors, tol).len()
}

/// Orthonormal bases of the lower central series `R_1 = g`,
/// `R_{i+1} = [g, R_i]`, up to the first repeated term.
pub fn lower_central_series(backend: Backend) -> Vec<Vec<Vec<f64>>> {
    let n = backend.dim();
    let mut series = vec![(0..n).map(|i| unit::<f64>(n, i)).collect::<Vec<_>>()];
    loop {
        let last = series.last().expect("nonempty");
        let brackets: Vec<Vec<f64>> =
            (0..n).flat_map(|i| last.iter().map(move |v| backend.bracket(&unit::<f64>(n, i), v))).collect();
        let next = orthonormalize(&brackets, 1e-10);
        if next.len() == last.len() {
            return series;
        }
        let done = next.is_empty();
        series.push(next);
        if done {
            return series;
        }
    }
}

/// Dimension of the derived algebra `[g, g]`.
pub fn derived_rank(backend: Backend) -> usize {
    let n = backend.dim();
    let mut brackets = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            brackets.push(backend.bracket(&unit::<f64>(n, i), &unit::<f64>(n, j)));
        }
    }
    orthonormalize(&brackets, 1e-10).len()
}

/// The curated subgroup family of a backend. Always contains the trivial
/// subgroup first.
pub fn catalog(backend: Backend) -> Vec<SubgroupDescriptor> {
    use SubgroupKind::*;
    let n = backend.dim();
    let e = |i: usize| unit::<f64>(n, i);
    let mk = |name: &str, kind, normal, vectors: Vec<Vec<f64>>| {
        SubgroupDescriptor::span(backend, name, kind, normal, &vectors).expect("catalog entries are subalgebras")
    };
    let mut out = vec![mk("trivial", Trivial, true, vec![])];
    match backend {
        Backend::Abelian(d) => {
            for i in 0..d {
                out.push(SubgroupDescriptor::coordinate(d, &[i]).expect("in range"));
            }
            if d > 2 {
                for i in 0..d {
                    let rest: Vec<usize> = (0..d).filter(|&j| j != i).collect();
                    out.push(SubgroupDescriptor::coordinate(d, &rest).expect("in range"));
                }
            }
        }
        Backend::Heisenberg3 => {
            out.push(mk("center", Center, true, vec![e(2)]));
            out.push(mk("xz", NormalIdeal, true, vec![e(0), e(2)]));
            out.push(mk("yz", NormalIdeal, true, vec![e(1), e(2)]));
            out.push(mk("x", OneParameter, false, vec![e(0)]));
            out.push(mk("y", OneParameter, false, vec![e(1)]));
        }
        Backend::Su2 => {
            out.push(mk("torus1", Torus, false, vec![e(0)]));
            out.push(mk("torus2", Torus, false, vec![e(1)]));
            out.push(mk("torus3", Torus, false, vec![e(2)]));
        }
        Backend::Sl2r => {
            out.push(mk("diagonal", Torus, false, vec![e(0)]));
            out.push(mk("upper", OneParameter, false, vec![e(1)]));
            out.push(mk("lower", OneParameter, false, vec![e(2)]));
            out.push(mk("rotation", Torus, false, vec![vec![0.0, 1.0, -1.0]]));
            out.push(mk("borel", Borel, false, vec![e(0), e(1)]));
        }
        Backend::Sl2rH3 => {
            out.push(mk("center", Center, true, vec![e(5)]));
            out.push(mk("heis", FactorKernel, true, vec![e(3), e(4), e(5)]));
            out.push(mk("levi", Levi, false, vec![e(0), e(1), e(2)]));
            out.push(mk("diagonal", Torus, false, vec![e(0)]));
        }
    }
    out
}

/// Catalog lookup by name.
pub fn subgroup(backend: Backend, name: &str) -> Result<SubgroupDescriptor> {
    catalog(backend)
        .into_iter()
        .find(|h| h.name == name)
        .ok_or_else(|| Error::usage(format!("{backend} has no catalog subgroup '{name}'")))
}

/// `|log g - P_h log g|`, the chart proxy for the distance from `g` to `H`.
pub fn dist_to_subgroup<T: Real>(g: &GroupElement<T>, h: &SubgroupDescriptor) -> Result<T> {
    if g.backend() != h.backend {
        return Err(Error::usage(format!("element of {} against subgroup of {}", g.backend(), h.backend)));
    }
    let x = g.log()?;
    let p = h.project(&x);
    let r: Vec<T> = x.iter().zip(&p).map(|(&a, &b)| a - b).collect();
    Ok(norm(&r))
}

enum QuotientMap {
    Identity,
    KeepCoords(Vec<usize>),
    LeviBlock,
}

fn quotient_map(backend: Backend, n: &SubgroupDescriptor) -> Result<(Backend, QuotientMap)> {
    if n.backend != backend {
        return Err(Error::usage(format!("subgroup of {} used with {backend}", n.backend)));
    }
    if n.dim() == 0 {
        return Ok((backend, QuotientMap::Identity));
    }
    let unsupported = || {
        Error::usage(format!("quotient of {backend} by '{}' is not supported", n.name))
    };
    if !n.normal {
        return Err(Error::usage(format!("'{}' is not normal in {backend}", n.name)));
    }
    match backend {
        Backend::Abelian(d) => {
            let is_axis = |b: &Vec<f64>| b.iter().filter(|x| **x != 0.0).count() == 1;
            if !n.basis.iter().all(is_axis) {
                return Err(unsupported());
            }
            let keep: Vec<usize> = (0..d).filter(|&i| n.basis.iter().all(|b| b[i] == 0.0)).collect();
            Ok((Backend::Abelian(keep.len()), QuotientMap::KeepCoords(keep)))
        }
        Backend::Heisenberg3 => match n.name.as_str() {
            "center" => Ok((Backend::Abelian(2), QuotientMap::KeepCoords(vec![0, 1]))),
            "xz" => Ok((Backend::Abelian(1), QuotientMap::KeepCoords(vec![1]))),
            "yz" => Ok((Backend::Abelian(1), QuotientMap::KeepCoords(vec![0]))),
            _ => Err(unsupported()),
        },
        Backend::Sl2rH3 if n.name == "heis" => Ok((Backend::Sl2r, QuotientMap::LeviBlock)),
        _ => Err(unsupported()),
    }
}

/// The backend that `G / N` is realized in.
pub fn quotient_target(backend: Backend, n: &SubgroupDescriptor) -> Result<Backend> {
    quotient_map(backend, n).map(|(b, _)| b)
}

/// Image of `g` in `G / N`. The quotient metric of the images equals
/// `dist_to_subgroup(x^-1 y, N)`.
pub fn quotient_project<T: Real>(g: &GroupElement<T>, n: &SubgroupDescriptor) -> Result<GroupElement<T>> {
    let (target, map) = quotient_map(g.backend(), n)?;
    let coords = match map {
        QuotientMap::Identity => g.coords().to_vec(),
        QuotientMap::KeepCoords(keep) => keep.iter().map(|&i| g.coords()[i]).collect(),
        QuotientMap::LeviBlock => super::sl2::semi_levi_block(g.coords()),
    };
    target.element(coords)
}

/// Target of the abelianization map, for backends that are not perfect.
pub fn abelianization_target(backend: Backend) -> Result<Backend> {
    match backend {
        Backend::Abelian(d) => Ok(Backend::Abelian(d)),
        Backend::Heisenberg3 => Ok(Backend::Abelian(2)),
        _ => Err(Error::usage(format!("{backend} is perfect: its abelianization is trivial"))),
    }
}

/// The abelianization `G -> R^d`.
pub fn abelianize<T: Real>(g: &GroupElement<T>) -> Result<GroupElement<T>> {
    let target = abelianization_target(g.backend())?;
    let coords = match g.backend() {
        Backend::Heisenberg3 => g.coords()[..2].to_vec(),
        _ => g.coords().to_vec(),
    };
    target.element(coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const ALL: [Backend; 5] =
        [Backend::Abelian(3), Backend::Heisenberg3, Backend::Su2, Backend::Sl2r, Backend::Sl2rH3];

    #[test]
    fn catalog_entries_are_subalgebras_and_normal_flags_hold() {
        for b in ALL {
            for h in catalog(b) {
                assert!(bracket_closure_residual(&h) < 1e-12, "{b} {}", h.name);
                if h.normal {
                    // [g, h] lands in h.
                    for i in 0..b.dim() {
                        for v in &h.basis {
                            let c = b.bracket(&unit::<f64>(b.dim(), i), v);
                            let p = h.project(&c);
                            let r: Vec<f64> = c.iter().zip(&p).map(|(x, y)| x - y).collect();
                            assert!(norm(&r) < 1e-12, "{b} {}", h.name);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn perfectness_by_derived_rank() {
        assert_eq!(derived_rank(Backend::Abelian(4)), 0);
        assert_eq!(derived_rank(Backend::Heisenberg3), 1);
        assert_eq!(derived_rank(Backend::Su2), 3);
        assert_eq!(derived_rank(Backend::Sl2r), 3);
        assert_eq!(derived_rank(Backend::Sl2rH3), 6);
        for b in ALL {
            assert_eq!(b.is_perfect(), derived_rank(b) == b.dim(), "{b}");
        }
    }

    #[test]
    fn lower_central_series_dimensions() {
        let dims = |b| lower_central_series(b).iter().map(Vec::len).collect::<Vec<_>>();
        assert_eq!(dims(Backend::Heisenberg3), vec![3, 1, 0]);
        assert_eq!(dims(Backend::Abelian(2)), vec![2, 0]);
        assert_eq!(dims(Backend::Sl2rH3), vec![6]);
    }

    #[test]
    fn heisenberg_three_step_brackets_vanish() {
        let b = Backend::Heisenberg3;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let inner = b.bracket(&unit::<f64>(3, j), &unit::<f64>(3, k));
                    assert!(norm(&b.bracket(&unit::<f64>(3, i), &inner)) == 0.0);
                }
            }
        }
    }

    #[test]
    fn distances_in_the_chart() {
        let b = Backend::Heisenberg3;
        let center = subgroup(b, "center").unwrap();
        let g = b.exp::<f64>(&[0.3, 0.0, 0.7]).unwrap();
        assert!((dist_to_subgroup(&g, &center).unwrap() - 0.3).abs() < 1e-15);
        let inside = b.exp::<f64>(&[0.0, 0.0, 0.9]).unwrap();
        assert!(dist_to_subgroup(&inside, &center).unwrap() < 1e-10);

        let s = Backend::Su2;
        let torus = subgroup(s, "torus3").unwrap();
        for eps in [1e-2, 1e-3] {
            let g = s.exp::<f64>(&[0.0, eps, 0.0]).unwrap();
            let d = dist_to_subgroup(&g, &torus).unwrap();
            assert!((d - eps).abs() <= 0.1 * eps);
        }
    }

    #[test]
    fn quotient_metric_matches_subgroup_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for b in ALL {
            for n in catalog(b).into_iter().filter(|n| n.normal) {
                let Ok(target) = quotient_target(b, &n) else { continue };
                for _ in 0..50 {
                    let x = b.exp::<f64>(&b.sample_algebra_ball(&mut rng, 0.3)).unwrap();
                    let y = b.exp::<f64>(&b.sample_algebra_ball(&mut rng, 0.3)).unwrap();
                    let px = quotient_project(&x, &n).unwrap();
                    let py = quotient_project(&y, &n).unwrap();
                    let lhs = target.dist(&px, &py).unwrap();
                    let rhs = dist_to_subgroup(&x.inv().mul(&y), &n).unwrap();
                    assert!((lhs - rhs).abs() < 1e-8, "{b} / {}: {lhs} vs {rhs}", n.name);
                }
            }
        }
    }

    #[test]
    fn supported_quotients() {
        let q = |b: Backend, name: &str| quotient_target(b, &subgroup(b, name).unwrap());
        assert_eq!(q(Backend::Sl2rH3, "heis").unwrap(), Backend::Sl2r);
        assert_eq!(q(Backend::Heisenberg3, "center").unwrap(), Backend::Abelian(2));
        assert_eq!(q(Backend::Abelian(3), "span{e1,e3}").unwrap(), Backend::Abelian(1));
        assert!(q(Backend::Sl2rH3, "center").is_err());
        assert!(q(Backend::Heisenberg3, "x").is_err());
        let g = Backend::Sl2rH3.exp::<f64>(&[0.1, 0.2, -0.1, 0.3, 0.2, 0.1]).unwrap();
        let p = quotient_project(&g, &subgroup(Backend::Sl2rH3, "heis").unwrap()).unwrap();
        let direct = Backend::Sl2r.exp(&[0.1, 0.2, -0.1]).unwrap();
        assert!(p.coords().iter().zip(direct.coords()).all(|(a, b)| (a - b).abs() < 1e-13));
    }

    #[test]
    fn abelianization() {
        let g = Backend::Heisenberg3.element(vec![0.5, -0.25, 3.0]).unwrap();
        assert_eq!(abelianize(&g).unwrap().coords(), &[0.5, -0.25]);
        for b in [Backend::Su2, Backend::Sl2r, Backend::Sl2rH3] {
            assert!(matches!(abelianization_target(b), Err(Error::Usage(_))));
        }
    }
}
