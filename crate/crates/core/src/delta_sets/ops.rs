//! Product sets, sum sets and the generated set `<A, X>_s`.

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{restride, snap_point, Ambient, DeltaSet, Run, MAX_DIM};
use crate::error::{Error, Result};
use crate::group_backends::{Backend, Mat};

/// Caps on set-producing operations. A result that hits a cap is cut and
/// flagged as truncated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationBudget {
    /// Points of chart norm above this radius are dropped.
    pub region_radius: f64,
    /// Largest number of points kept in a result.
    pub max_points: u64,
}

impl Default for GenerationBudget {
    fn default() -> Self {
        GenerationBudget { region_radius: f64::INFINITY, max_points: 50_000_000 }
    }
}

impl GenerationBudget {
    fn validate(&self) -> Result<()> {
        if !(self.region_radius > 0.0) || self.max_points == 0 {
            return Err(Error::usage("budget caps must be positive"));
        }
        Ok(())
    }

    /// Applies both caps.
    fn enforce(&self, set: DeltaSet) -> DeltaSet {
        let set = if set.radius() > self.region_radius {
            set.restrict_to_ball(self.region_radius).with_truncated(true)
        } else {
            set
        };
        if set.len() <= self.max_points {
            return set;
        }
        let d = set.dim();
        let mut left = self.max_points;
        let mut runs = Vec::new();
        for r in set.runs() {
            if left == 0 {
                break;
            }
            let take = r.len(d).min(left);
            runs.push(Run { key: r.key, hi: r.lo(d) + take as i64 - 1 });
            left -= take;
        }
        DeltaSet::from_runs(set.ambient(), set.delta(), set.stride(), runs, true)
    }
}

/// `A + sign B` for sets in an additive ambient, computed run by run.
pub fn sumset(a: &DeltaSet, b: &DeltaSet, sign: i64, budget: &GenerationBudget) -> Result<DeltaSet> {
    a.check_compatible(b)?;
    budget.validate()?;
    if !a.ambient().is_additive() {
        return Err(Error::usage(format!("{} is not additive", a.ambient())));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::usage("sumset sign must be 1 or -1"));
    }
    let truncated = a.truncated() || b.truncated();
    if a.is_empty() || b.is_empty() {
        return Ok(DeltaSet::empty(a.ambient(), a.delta())?.with_truncated(truncated));
    }
    let d = a.dim();
    let g = a.stride().gcd(&b.stride());
    let ra = restride(a, g);
    let mut rb = restride(b, g);
    if sign == -1 {
        for r in &mut rb {
            for v in &mut r.key[..d - 1] {
                *v = -*v;
            }
            let (lo, hi) = (r.lo(d), r.hi);
            r.key[d - 1] = -hi;
            r.hi = -lo;
        }
    }
    let mut acc = DeltaSet::empty(a.ambient(), a.delta())?.with_truncated(truncated);
    for chunk in ra.chunks(64) {
        let partial: Vec<Run> = chunk
            .par_iter()
            .flat_map_iter(|x| {
                rb.iter().map(move |y| {
                    let mut key = [0i64; MAX_DIM];
                    for i in 0..d {
                        key[i] = x.key[i] + y.key[i];
                    }
                    Run { key, hi: x.hi + y.hi }
                })
            })
            .collect();
        let part = DeltaSet::from_runs(a.ambient(), a.delta(), g, partial, false);
        acc = budget.enforce(acc.union(&part)?);
        if acc.len() >= budget.max_points && acc.truncated() {
            break;
        }
    }
    Ok(acc)
}

/// `AB = {ab}`, snapped at δ. In additive ambients this is the sum set.
pub fn product_set(a: &DeltaSet, b: &DeltaSet, budget: &GenerationBudget) -> Result<DeltaSet> {
    a.check_compatible(b)?;
    budget.validate()?;
    let Ambient::Group(backend) = a.ambient() else {
        return Err(Error::usage(format!("{} is not a group ambient", a.ambient())));
    };
    if a.ambient().is_additive() {
        return sumset(a, b, 1, budget);
    }
    let ea = a.elements()?;
    let eb = b.elements()?;
    let delta = a.delta();
    let mut acc = DeltaSet::empty(a.ambient(), delta)?.with_truncated(a.truncated() || b.truncated());
    for chunk in ea.chunks(16) {
        let results: Vec<Option<Vec<i64>>> = chunk
            .par_iter()
            .flat_map_iter(|x| {
                eb.iter().map(move |y| backend.log(&x.mul(y)).ok().map(|v| snap_point(&v, delta)))
            })
            .collect();
        let outside = results.iter().any(Option::is_none);
        let part = DeltaSet::from_lattice(results.into_iter().flatten(), delta, a.ambient())?;
        acc = budget.enforce(acc.union(&part)?.with_truncated(outside));
        if acc.len() >= budget.max_points && acc.truncated() {
            break;
        }
    }
    Ok(acc)
}

/// The `k`-fold product set `A^k`; `A^0` is the identity.
pub fn k_fold(a: &DeltaSet, k: usize, budget: &GenerationBudget) -> Result<DeltaSet> {
    let d = a.dim();
    if k == 0 {
        return DeltaSet::from_lattice([vec![0; d]], a.delta(), a.ambient());
    }
    let mut out = budget.enforce(a.clone());
    for _ in 1..k {
        out = product_set(&out, a, budget)?;
    }
    Ok(out)
}

/// How the group of `A` acts on the vector space of `X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModuleAction {
    /// `a.x = Ad(exp a) x` on the backend's own Lie algebra.
    Adjoint,
    /// For `Abelian(1)`: the point `a` acts on `R^n` as multiplication by
    /// the real number `a`.
    Scalar,
}

impl ModuleAction {
    fn check(&self, backend: Backend, n: usize) -> Result<()> {
        match self {
            ModuleAction::Adjoint if n != backend.dim() => Err(Error::usage(format!(
                "adjoint action of {backend} needs vectors of dimension {}, got {n}",
                backend.dim()
            ))),
            ModuleAction::Scalar if backend != Backend::Abelian(1) => {
                Err(Error::usage(format!("scalar action needs abelian:1, got {backend}")))
            }
            _ => Ok(()),
        }
    }

    /// The linear map by which the chart point `a` acts on `R^n`.
    pub fn matrix(&self, backend: Backend, a: &[f64], n: usize) -> Result<Mat<f64>> {
        self.check(backend, n)?;
        match self {
            ModuleAction::Adjoint => Ok(backend.adjoint(&backend.exp(a)?)),
            ModuleAction::Scalar => Ok(Mat::identity(n).scale(a[0])),
        }
    }
}

/// Applies `m` to the lattice point `k` and snaps the image.
pub fn act_snapped(m: &Mat<f64>, k: &[i64], delta: f64) -> Vec<i64> {
    let n = k.len();
    let image: Vec<f64> =
        (0..n).map(|i| (0..n).map(|j| m[(i, j)] * (k[j] as f64 * delta)).sum()).collect();
    snap_point(&image, delta)
}

/// `<A, X>_s`: all vectors from expressions with at most `s` atoms of `A`
/// and `X` under `x + y`, `x - y` and `a.x`, snapped after every operation.
/// Built breadth first by the exact atom count.
pub fn generate_bracket(
    a: &DeltaSet,
    x: &DeltaSet,
    s: usize,
    action: ModuleAction,
    budget: &GenerationBudget,
) -> Result<DeltaSet> {
    budget.validate()?;
    let Ambient::Group(backend) = a.ambient() else {
        return Err(Error::usage("A must live in a group backend"));
    };
    let Ambient::Vector(n) = x.ambient() else {
        return Err(Error::usage("X must live in a vector space"));
    };
    if s == 0 {
        return Err(Error::usage("s must be at least 1"));
    }
    if a.delta() != x.delta() {
        return Err(Error::usage("A and X must share δ"));
    }
    let delta = x.delta();
    let ops: Vec<Mat<f64>> = a.points().map(|p| action.matrix(backend, &p, n)).collect::<Result<_>>()?;
    let mut levels: Vec<DeltaSet> = vec![budget.enforce(x.clone())];
    let mut total = levels[0].clone();
    for count in 2..=s {
        let prev: Vec<Vec<i64>> = levels[count - 2].lattice_points().collect();
        let acted: Vec<Vec<i64>> =
            ops.par_iter().flat_map_iter(|m| prev.iter().map(move |k| act_snapped(m, k, delta))).collect();
        let mut level = DeltaSet::from_lattice(acted, delta, x.ambient())?;
        for i in 1..count {
            let (l, r) = (&levels[i - 1], &levels[count - i - 1]);
            if i <= count - i {
                level = level.union(&sumset(l, r, 1, budget)?)?;
            }
            level = level.union(&sumset(l, r, -1, budget)?)?;
        }
        let level = budget.enforce(level);
        total = budget.enforce(total.union(&level)?);
        levels.push(level);
    }
    Ok(total)
}
