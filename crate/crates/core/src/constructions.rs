//! Explicit constructions: the arithmetic-progression approximate subgroups
//! that do not grow in non-perfect groups, and the commutator witness maps
//! that fill the lower central series.

use serde::{Deserialize, Serialize};

use crate::delta_sets::{
    away_from_subgroups, envelope_exponent, k_fold, profile_fit, Ambient, AwayReport, CoveringProfile, DeltaSet,
    GenerationBudget, ProfileFit, Run, MAX_DIM,
};
use crate::error::{Error, Result};
use crate::fit::log_log_slope;
use crate::group_backends::{
    abelianization_target, catalog, lower_central_series, quotient_project, quotient_target, span_rank, Backend,
    GroupElement,
};

/// Parameters of the progression `P = δ^κ (Z^d ∩ [-δ^-κ r, δ^-κ r]^d)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct APConfig {
    pub d: usize,
    pub kappa: f64,
    pub delta: f64,
    pub r: f64,
}

impl APConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d > MAX_DIM {
            return Err(Error::usage(format!("dimension must be in 1..={MAX_DIM}, got {}", self.d)));
        }
        if !(self.kappa > 0.0 && self.kappa <= 1.0) {
            return Err(Error::usage(format!("κ must lie in (0, 1], got {}", self.kappa)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::usage(format!("δ must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.delta.powf(self.kappa) < self.r) {
            return Err(Error::usage(format!("δ^κ = {} is not below r = {}", self.delta.powf(self.kappa), self.r)));
        }
        Ok(())
    }

    /// Spacing of the progression in δ units: `δ^(κ-1)` rounded to the
    /// nearest integer, so that `P` lies on the δ-grid.
    pub fn spacing(&self) -> i64 {
        self.delta.powf(self.kappa - 1.0).round().max(1.0) as i64
    }

    /// Largest index `K` with `K · spacing · δ ≤ r`.
    pub fn half_length(&self) -> i64 {
        (self.r / (self.spacing() as f64 * self.delta) + 1e-9).floor() as i64
    }
}

/// The progression `P` in `Abelian(d)`, built directly as runs.
pub fn arithmetic_progression_set(c: &APConfig) -> Result<DeltaSet> {
    c.validate()?;
    let (m, k) = (c.spacing(), c.half_length());
    let d = c.d;
    let mut runs = Vec::new();
    let rows = (2 * k + 1).pow(d as u32 - 1);
    for idx in 0..rows {
        let mut key = [0i64; MAX_DIM];
        let mut rest = idx;
        for slot in key.iter_mut().take(d - 1) {
            *slot = (rest % (2 * k + 1) - k) * m;
            rest /= 2 * k + 1;
        }
        key[d - 1] = -k;
        runs.push(Run { key, hi: k });
    }
    Ok(DeltaSet::from_runs(Ambient::Group(Backend::Abelian(d)), c.delta, m, runs, false))
}

/// `B_G(1, 2r) ∩ π^-1(P)` on the δ-grid, with `π` the abelianization:
/// the grid points of the chart ball whose projection is a point of `P`.
pub fn lift_to_group(p: &DeltaSet, backend: Backend, r: f64) -> Result<DeltaSet> {
    let target = abelianization_target(backend)?;
    if p.ambient() != Ambient::Group(target) {
        return Err(Error::usage(format!("{backend} abelianizes to {target}, but P lives in {}", p.ambient())));
    }
    if !(r > 0.0) {
        return Err(Error::usage("radius must be positive"));
    }
    let delta = p.delta();
    let ambient = Ambient::Group(backend);
    let limit = 2.0 * r;
    let norm2 = |k: &[i64]| k.iter().map(|&v| (v as f64 * delta).powi(2)).sum::<f64>();
    let base: Vec<Vec<i64>> = p.lattice_points().filter(|k| norm2(k) <= limit * limit).collect();
    match backend {
        Backend::Abelian(_) => DeltaSet::from_lattice(base, delta, ambient),
        Backend::Heisenberg3 => {
            // The chart coordinates (a, b, z) project to (a, b); each fibre
            // is a run in z.
            let runs = base
                .iter()
                .map(|k| {
                    let room = (limit * limit - norm2(k)).max(0.0).sqrt();
                    let mut h = (room / delta).floor() as i64;
                    while norm2(&[k[0], k[1], h + 1]) <= limit * limit {
                        h += 1;
                    }
                    while h > 0 && norm2(&[k[0], k[1], h]) > limit * limit {
                        h -= 1;
                    }
                    let mut key = [0i64; MAX_DIM];
                    key[0] = k[0];
                    key[1] = k[1];
                    key[2] = -h;
                    Run { key, hi: h }
                })
                .collect();
            Ok(DeltaSet::from_runs(ambient, delta, 1, runs, false))
        }
        _ => unreachable!("abelianization_target rejects perfect backends"),
    }
}

/// Covering data of one quotient `π_{G/N}(A)`.
#[derive(Clone, Debug, Serialize)]
pub struct QuotientReport {
    pub subgroup: String,
    pub target: Backend,
    pub profile: CoveringProfile,
    pub fit: Option<ProfileFit>,
    /// Largest `κ` with `N(π(A), ρ) ≥ ρ^-κ` along the ladder.
    pub envelope: f64,
}

/// Growth of `A` under tripling together with the hypotheses of the
/// non-growth construction.
#[derive(Clone, Debug, Serialize)]
pub struct NongrowthReport {
    pub ambient: Ambient,
    pub delta: f64,
    pub points: u64,
    pub n_a: u64,
    pub n_aaa: u64,
    pub ratio: f64,
    pub truncated: bool,
    pub quotients: Vec<QuotientReport>,
    pub away_threshold: f64,
    pub away: Vec<AwayReport>,
}

/// Image of a set in `G/N`, snapped at the same δ.
pub fn project_set(a: &DeltaSet, n: &crate::group_backends::SubgroupDescriptor) -> Result<DeltaSet> {
    let Ambient::Group(backend) = a.ambient() else {
        return Err(Error::usage("quotients need a group ambient"));
    };
    let target = quotient_target(backend, n)?;
    if n.dim() == 0 {
        return Ok(a.clone());
    }
    let mut logs = Vec::with_capacity(a.len() as usize);
    for p in a.points() {
        logs.push(quotient_project(&backend.exp(&p)?, n)?.log()?);
    }
    Ok(DeltaSet::snap(logs.iter().map(|v| v.as_slice()), a.delta(), Ambient::Group(target))?.with_truncated(a.truncated()))
}

/// `N_δ(A)`, `N_δ(AAA)` and their ratio; covering profiles of every
/// supported proper quotient; distances to the proper catalog subgroups
/// against `away_threshold`.
pub fn verify_nongrowth(a: &DeltaSet, away_threshold: f64, budget: &GenerationBudget) -> Result<NongrowthReport> {
    let Ambient::Group(backend) = a.ambient() else {
        return Err(Error::usage("non-growth needs a group ambient"));
    };
    if a.is_empty() {
        return Err(Error::usage("non-growth needs a nonempty set"));
    }
    let delta = a.delta();
    let n_a = a.covering_number(delta)?;
    let aaa = k_fold(a, 3, budget)?;
    let n_aaa = aaa.covering_number(delta)?;
    let levels = ((1.0 / delta).log2().floor() as usize).max(1);
    let mut quotients = Vec::new();
    for n in catalog(backend).into_iter().filter(|n| n.normal && n.dim() < backend.dim()) {
        let Ok(target) = quotient_target(backend, &n) else { continue };
        let image = project_set(a, &n)?;
        let profile = image.covering_profile(levels)?;
        let fit = if levels >= 3 { Some(profile_fit(&profile)?) } else { None };
        let envelope = envelope_exponent(&profile)?;
        quotients.push(QuotientReport { subgroup: n.name.clone(), target, profile, fit, envelope });
    }
    let proper: Vec<_> = catalog(backend).into_iter().filter(|h| h.dim() < backend.dim()).collect();
    let away = away_from_subgroups(a, &proper, away_threshold)?;
    Ok(NongrowthReport {
        ambient: a.ambient(),
        delta,
        points: a.len(),
        n_a,
        n_aaa,
        ratio: n_aaa as f64 / n_a as f64,
        truncated: aaa.truncated(),
        quotients,
        away_threshold,
        away,
    })
}

/// Slope of `ln N_δ(P_δ)` against `ln(1/δ)` for the progressions of one
/// `(d, κ, r)` across several scales; `d κ` in the limit.
pub fn ap_covering_exponent(d: usize, kappa: f64, r: f64, deltas: &[f64]) -> Result<f64> {
    let mut counts = Vec::new();
    for &delta in deltas {
        let p = arithmetic_progression_set(&APConfig { d, kappa, delta, r })?;
        counts.push(p.covering_number(delta)? as f64);
    }
    let inv: Vec<f64> = deltas.iter().map(|d| 1.0 / d).collect();
    log_log_slope(&inv, &counts)
}

/// Commutator pairs `(x_j, y_j)` whose brackets `z_j = [x_j, y_j]` form a
/// basis of the term `R_{level+1}` of the lower central series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CentralSeriesWitness {
    pub backend: Backend,
    pub level: usize,
    pub pairs: Vec<(Vec<f64>, Vec<f64>)>,
}

impl CentralSeriesWitness {
    pub fn new(backend: Backend, level: usize, pairs: Vec<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        let series = lower_central_series(backend);
        // The series is listed until it stabilizes; a stable nonzero term
        // repeats forever.
        let stable = series.last().is_some_and(|t| !t.is_empty());
        if level == 0 || (level >= series.len() && !stable) || series.len() < 2 && !stable {
            return Err(Error::usage(format!("{backend} has no lower central term {}", level + 1)));
        }
        let n = backend.dim();
        if pairs.iter().any(|(x, y)| x.len() != n || y.len() != n) {
            return Err(Error::usage(format!("{backend} algebra vectors have {n} coordinates")));
        }
        let target = &series[level.min(series.len() - 1)];
        let zs: Vec<Vec<f64>> = pairs.iter().map(|(x, y)| backend.bracket(x, y)).collect();
        let mut with_target = target.clone();
        with_target.extend(zs.iter().cloned());
        if zs.len() != target.len() || span_rank(&zs, 1e-10) != target.len() || span_rank(&with_target, 1e-10) != target.len()
        {
            return Err(Error::usage(format!(
                "the brackets do not form a basis of the {}-dimensional term R_{}",
                target.len(),
                level + 1
            )));
        }
        Ok(CentralSeriesWitness { backend, level, pairs })
    }

    /// The pair `(X, Y)` with `[X, Y] = Z` in the Heisenberg group.
    pub fn heisenberg() -> Self {
        Self::new(Backend::Heisenberg3, 1, vec![(vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0])]).expect("[X, Y] = Z")
    }

    /// The brackets `z_j`.
    pub fn brackets(&self) -> Vec<Vec<f64>> {
        self.pairs.iter().map(|(x, y)| self.backend.bracket(x, y)).collect()
    }

    /// `f_j(t) = [exp(√t x_j), exp(√t y_j)]` for `t ≥ 0` and the reversed
    /// commutator `[exp(√-t y_j), exp(√-t x_j)]` for `t < 0`.
    pub fn single(&self, j: usize, t: f64) -> Result<GroupElement<f64>> {
        let (x, y) = &self.pairs[j];
        let s = t.abs().sqrt();
        let (u, v) = if t >= 0.0 { (x, y) } else { (y, x) };
        let g = self.backend.exp(&u.iter().map(|c| c * s).collect::<Vec<_>>())?;
        let h = self.backend.exp(&v.iter().map(|c| c * s).collect::<Vec<_>>())?;
        Ok(g.mul(&h).mul(&g.inv()).mul(&h.inv()))
    }

    /// `f(t_1, ..., t_m) = f_1(t_1) ... f_m(t_m)`.
    pub fn apply(&self, ts: &[f64]) -> Result<GroupElement<f64>> {
        if ts.len() != self.pairs.len() {
            return Err(Error::usage(format!("expected {} parameters", self.pairs.len())));
        }
        let mut out = self.backend.identity();
        for (j, &t) in ts.iter().enumerate() {
            out = out.mul(&self.single(j, t)?);
        }
        Ok(out)
    }

    /// Central differences of `log f` at 0 with step `h`; column `j`
    /// approximates `z_j` with an error of order `√h` from the
    /// `|t|^(3/2)` terms of the commutator.
    pub fn differential(&self, h: f64) -> Result<Vec<Vec<f64>>> {
        let m = self.pairs.len();
        (0..m)
            .map(|j| {
                let mut tp = vec![0.0; m];
                let mut tm = vec![0.0; m];
                tp[j] = h;
                tm[j] = -h;
                let a = self.apply(&tp)?.log()?;
                let b = self.apply(&tm)?.log()?;
                Ok(a.iter().zip(&b).map(|(p, q)| (p - q) / (2.0 * h)).collect())
            })
            .collect()
    }
}

/// The Heisenberg witness `f(t)` with `|t| ≤ ρ²`.
pub fn central_series_witness_map(t: f64, rho: f64) -> Result<GroupElement<f64>> {
    if !(rho > 0.0 && rho < Backend::Heisenberg3.chart_radius()) {
        return Err(Error::domain(format!("ρ = {rho} is outside the chart")));
    }
    if t.abs() > rho * rho {
        return Err(Error::domain(format!("|t| = {} exceeds ρ² = {}", t.abs(), rho * rho)));
    }
    CentralSeriesWitness::heisenberg().single(0, t)
}

/// Constants `c` scanned by [`commutator_coverage`], largest first.
pub const COVERAGE_CONSTANTS: [f64; 4] = [1.0, 0.5, 0.25, 0.125];

/// How much of a central ball products of commutators reach.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverageReport {
    pub rho: f64,
    pub k: usize,
    pub delta: f64,
    /// Largest scanned `c` with full coverage, or the smallest scanned `c`
    /// when none is full.
    pub c: f64,
    pub fraction: f64,
    /// `(c, fraction)` for every scanned constant.
    pub scan: Vec<(f64, f64)>,
}

/// Fraction of the δ-grid of the central ball `B_Z(1, c ρ²)` in the
/// Heisenberg group reached by products of `k` commutators of elements of
/// `B(1, ρ)`. Each target `exp(z Z)` is inverted in closed form as
/// `f(z/k)^k`, accepted when `√|z/k| ≤ ρ` and the product reproduces it.
/// The empty product does not count, so `k = 0` gives 0.
pub fn commutator_coverage(rho: f64, k: usize, delta: f64) -> Result<CoverageReport> {
    if !(rho > 0.0 && delta > 0.0) {
        return Err(Error::usage("ρ and δ must be positive"));
    }
    let b = Backend::Heisenberg3;
    let w = CentralSeriesWitness::heisenberg();
    let fraction = |c: f64| -> Result<f64> {
        let reach = (c * rho * rho / delta + 1e-9).floor() as i64;
        let mut hit = 0u64;
        for j in -reach..=reach {
            let z = j as f64 * delta;
            if k == 0 {
                continue;
            }
            let t = z / k as f64;
            if t.abs().sqrt() > rho * (1.0 + 1e-12) {
                continue;
            }
            let factor = w.single(0, t)?;
            let product = factor.pow(k as i64);
            if b.dist(&product, &b.exp(&[0.0, 0.0, z])?)? <= 1e-12 * (1.0 + z.abs()) {
                hit += 1;
            }
        }
        Ok(hit as f64 / (2 * reach + 1) as f64)
    };
    let scan = COVERAGE_CONSTANTS.iter().map(|&c| Ok((c, fraction(c)?))).collect::<Result<Vec<_>>>()?;
    let (c, fraction) =
        scan.iter().copied().find(|&(_, f)| f == 1.0).unwrap_or(*scan.last().expect("nonempty scan"));
    Ok(CoverageReport { rho, k, delta, c, fraction, scan })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn progression_examples() {
        let p = arithmetic_progression_set(&APConfig { d: 1, kappa: 1.0, delta: 1.0 / 16.0, r: 1.0 }).unwrap();
        let expect: Vec<Vec<i64>> = (-16..=16).map(|k| vec![k]).collect();
        assert_eq!(p.lattice_points().collect::<Vec<_>>(), expect);

        // κ = 1 gives the full δ-net of the cube.
        let c = APConfig { d: 2, kappa: 1.0, delta: 1.0 / 8.0, r: 0.5 };
        let p = arithmetic_progression_set(&c).unwrap();
        assert_eq!(p.len(), 81);
        let net = DeltaSet::from_lattice((-4..=4).flat_map(|i| (-4..=4).map(move |j| vec![i, j])), c.delta, p.ambient()).unwrap();
        assert_eq!(p, net);

        let c = APConfig { d: 2, kappa: 0.5, delta: 2f64.powi(-10), r: 0.5 };
        let n = arithmetic_progression_set(&c).unwrap().covering_number(c.delta).unwrap() as f64;
        let target = 2f64.powi(10);
        assert!(n <= 4.0 * target && n >= target / 4.0, "{n}");

        assert!(APConfig { d: 1, kappa: 0.5, delta: 0.25, r: 0.4 }.validate().is_err());
        assert!(APConfig { d: 1, kappa: 0.0, delta: 0.25, r: 1.0 }.validate().is_err());
    }

    #[test]
    fn progression_does_not_grow() {
        let c = APConfig { d: 1, kappa: 0.5, delta: 2f64.powi(-10), r: 1.0 };
        let a = arithmetic_progression_set(&c).unwrap();
        let rep = verify_nongrowth(&a, 0.5, &GenerationBudget::default()).unwrap();
        // P + P + P is the progression with the same spacing and three times
        // the span: (6K + 1) / (2K + 1) points.
        let k = c.half_length() as f64;
        assert_eq!(rep.ratio, (6.0 * k + 1.0) / (2.0 * k + 1.0));
        assert!(rep.ratio <= 10.0);
        assert_eq!(rep.quotients.len(), 1);
        assert!(rep.quotients[0].envelope >= c.kappa - 0.1);
    }

    #[test]
    fn ball_nets_triple_boundedly() {
        let amb = Ambient::Group(Backend::Abelian(2));
        let delta = 1.0 / 32.0;
        let pts = (-8..=8).flat_map(|i| (-8..=8).map(move |j| vec![i, j])).filter(|k: &Vec<i64>| k[0] * k[0] + k[1] * k[1] <= 64);
        let a = DeltaSet::from_lattice(pts, delta, amb).unwrap();
        let rep = verify_nongrowth(&a, 0.1, &GenerationBudget::default()).unwrap();
        assert!(rep.ratio <= 9.0 * 1.2, "{}", rep.ratio);
        assert!(rep.away.iter().all(|r| r.away));
    }

    #[test]
    fn lifts_to_non_perfect_groups() {
        let c = APConfig { d: 2, kappa: 0.5, delta: 1.0 / 64.0, r: 0.25 };
        let p = arithmetic_progression_set(&c).unwrap();
        let lifted = lift_to_group(&p, Backend::Abelian(2), 0.25).unwrap();
        assert_eq!(lifted.lattice_points().collect::<Vec<_>>(), p.restrict_to_ball(0.5).lattice_points().collect::<Vec<_>>());

        let h = lift_to_group(&p, Backend::Heisenberg3, 0.25).unwrap();
        for k in h.lattice_points() {
            assert!(p.contains(&k[..2]));
            assert!(k.iter().map(|&v| (v as f64 * c.delta).powi(2)).sum::<f64>() <= 0.25 + 1e-12);
        }
        // Each fibre is the full central segment of the ball.
        let origin_fibre = h.lattice_points().filter(|k| k[0] == 0 && k[1] == 0).count();
        assert_eq!(origin_fibre, 2 * 32 + 1);

        let empty = DeltaSet::empty(Ambient::Group(Backend::Abelian(2)), c.delta).unwrap();
        assert!(lift_to_group(&empty, Backend::Heisenberg3, 0.25).unwrap().is_empty());
        assert!(lift_to_group(&p, Backend::Su2, 0.25).is_err());
        assert!(lift_to_group(&p, Backend::Sl2r, 0.25).is_err());
    }

    #[test]
    fn witness_map_is_exact_in_heisenberg() {
        let b = Backend::Heisenberg3;
        assert_eq!(central_series_witness_map(0.0, 0.1).unwrap(), b.identity());
        for t in [0.004, -0.007, 0.01, -0.01] {
            let f = central_series_witness_map(t, 0.1).unwrap();
            assert!(b.dist(&f, &b.exp(&[0.0, 0.0, t]).unwrap()).unwrap() < 1e-15, "{t}");
        }
        assert!(central_series_witness_map(0.02, 0.1).is_err());
        // Continuity at 0.
        let small = central_series_witness_map(1e-14, 0.1).unwrap();
        assert!(b.dist(&small, &b.identity()).unwrap() < 1e-13);
    }

    #[test]
    fn witness_differential_has_full_rank() {
        let w = CentralSeriesWitness::heisenberg();
        let jac = w.differential(1e-4).unwrap();
        assert!((jac[0][2] - 1.0).abs() < 1e-8 && jac[0][0].abs() < 1e-12);

        // SL(2,R) ⋉ H3 is perfect: its derived algebra is everything, and
        // these six commutators span it.
        let e = |i: usize| (0..6).map(|j| if i == j { 1.0 } else { 0.0 }).collect::<Vec<f64>>();
        let pairs = vec![(e(1), e(2)), (e(0), e(1)), (e(0), e(2)), (e(0), e(3)), (e(0), e(4)), (e(3), e(4))];
        let w = CentralSeriesWitness::new(Backend::Sl2rH3, 1, pairs).unwrap();
        let jac = w.differential(1e-8).unwrap();
        assert_eq!(span_rank(&jac, 1e-3), 6);
        for (col, z) in jac.iter().zip(w.brackets()) {
            assert!(col.iter().zip(&z).all(|(a, b)| (a - b).abs() < 1e-3), "{col:?} vs {z:?}");
        }
        let bad = vec![(e(0), e(1)), (e(0), e(1)), (e(0), e(2)), (e(0), e(3)), (e(0), e(4)), (e(3), e(4))];
        assert!(CentralSeriesWitness::new(Backend::Sl2rH3, 1, bad).is_err());
    }

    #[test]
    fn commutator_coverage_examples() {
        let rep = commutator_coverage(0.1, 1, 0.01 * 0.01 / 64.0).unwrap();
        assert_eq!(rep.c, 1.0);
        assert_eq!(rep.fraction, 1.0);
        assert!(rep.scan.iter().any(|&(c, f)| c == 0.5 && f == 1.0));
        assert_eq!(commutator_coverage(0.1, 0, 1e-4).unwrap().fraction, 0.0);
        let mut last = 0.0;
        for k in 0..4 {
            let f = commutator_coverage(0.05, k, 1e-4).unwrap().scan[0].1;
            assert!(f >= last);
            last = f;
        }
    }

    #[test]
    fn commutator_identity_on_samples() {
        let b = Backend::Heisenberg3;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let t: f64 = rng.gen_range(-1.0..1.0);
            let g = b.exp(&[t, 0.0, 0.0]).unwrap();
            let h = b.exp(&[0.0, t, 0.0]).unwrap();
            let c = g.mul(&h).mul(&g.inv()).mul(&h.inv());
            assert!(b.dist(&c, &b.exp(&[0.0, 0.0, t * t]).unwrap()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn covering_exponent_across_scales() {
        let deltas = [2f64.powi(-8), 2f64.powi(-10), 2f64.powi(-12)];
        for d in [1, 2] {
            for kappa in [0.25, 0.5, 0.75] {
                let s = ap_covering_exponent(d, kappa, 1.0, &deltas).unwrap();
                assert!((s - d as f64 * kappa).abs() <= 0.1, "d={d} κ={kappa}: {s}");
            }
        }
    }
}
