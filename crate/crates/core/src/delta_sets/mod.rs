//! δ-discretized finite sets: snapping to the δ-grid of a chart, covering
//! numbers, product and sum sets, the generated set `<A, X>_s`, and the
//! non-concentration probes.
//!
//! A set is stored as integer lattice indices `k` standing for the chart
//! point `k δ`. Points are grouped in runs along the last axis, with a
//! common stride on that axis, so arithmetic progressions cost one run per
//! row regardless of their length.

mod ops;
mod probes;

pub use ops::{generate_bracket, k_fold, product_set, sumset, GenerationBudget, ModuleAction};
pub use probes::{
    away_from_subgroups, ball_coverage, envelope_exponent, profile_fit, AwayReport, ProfileFit,
};

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group_backends::{Backend, GroupElement};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 6;

/// The space a [`DeltaSet`] lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ambient {
    /// A group backend, with points in its log chart.
    Group(Backend),
    /// The vector space `R^n`.
    Vector(usize),
}

impl Ambient {
    pub fn dim(&self) -> usize {
        match self {
            Ambient::Group(b) => b.dim(),
            Ambient::Vector(n) => *n,
        }
    }

    /// Whether the set operation is vector addition.
    pub fn is_additive(&self) -> bool {
        matches!(self, Ambient::Vector(_) | Ambient::Group(Backend::Abelian(_)))
    }

    pub fn backend(&self) -> Option<Backend> {
        match self {
            Ambient::Group(b) => Some(*b),
            Ambient::Vector(_) => None,
        }
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ambient::Group(b) => write!(f, "{b}"),
            Ambient::Vector(n) => write!(f, "vector:{n}"),
        }
    }
}

impl FromStr for Ambient {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.strip_prefix("vector:") {
            Some(n) => n.parse().map(Ambient::Vector).map_err(|_| Error::parse(format!("bad vector ambient '{s}'"))),
            None => s.parse().map(Ambient::Group),
        }
    }
}

impl Serialize for Ambient {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ambient {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A maximal run of points sharing all but the last lattice coordinate.
/// `key[..dim-1]` is the shared prefix, `key[dim-1]` the first compressed
/// last coordinate and `hi` the last one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Run {
    pub key: [i64; MAX_DIM],
    pub hi: i64,
}

impl Run {
    fn point(dim: usize, k: &[i64], stride: i64) -> Run {
        let mut key = [0; MAX_DIM];
        key[..dim].copy_from_slice(k);
        key[dim - 1] /= stride;
        Run { key, hi: key[dim - 1] }
    }

    fn lo(&self, dim: usize) -> i64 {
        self.key[dim - 1]
    }

    fn same_row(&self, other: &Run, dim: usize) -> bool {
        self.key[..dim - 1] == other.key[..dim - 1]
    }

    fn len(&self, dim: usize) -> u64 {
        (self.hi - self.lo(dim) + 1) as u64
    }
}

/// A finite set of δ-grid points in the chart of an ambient space.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaSet {
    ambient: Ambient,
    delta: f64,
    /// Common divisor of all last lattice coordinates.
    stride: i64,
    runs: Vec<Run>,
    radius: f64,
    truncated: bool,
}

/// Nearest δ-grid lattice index of a chart point.
pub fn snap_point(x: &[f64], delta: f64) -> Vec<i64> {
    x.iter().map(|v| (v / delta).round() as i64).collect()
}

fn check_ambient(ambient: Ambient, delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::usage(format!("δ must be positive and finite, got {delta}")));
    }
    let d = ambient.dim();
    if d == 0 || d > MAX_DIM {
        return Err(Error::usage(format!("ambient dimension must be in 1..={MAX_DIM}, got {d}")));
    }
    Ok(())
}

impl DeltaSet {
    /// The empty set.
    pub fn empty(ambient: Ambient, delta: f64) -> Result<Self> {
        check_ambient(ambient, delta)?;
        Ok(DeltaSet { ambient, delta, stride: 1, runs: Vec::new(), radius: 0.0, truncated: false })
    }

    /// Snaps chart points to the nearest δ-grid points and deduplicates.
    pub fn snap<'a>(points: impl IntoIterator<Item = &'a [f64]>, delta: f64, ambient: Ambient) -> Result<Self> {
        check_ambient(ambient, delta)?;
        let d = ambient.dim();
        let mut lattice = Vec::new();
        for p in points {
            if p.len() != d {
                return Err(Error::usage(format!("{ambient} points have {d} coordinates, got {}", p.len())));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::usage("non-finite coordinate"));
            }
            lattice.push(snap_point(p, delta));
        }
        Self::from_lattice(lattice, delta, ambient)
    }

    /// Snaps group elements through the backend's log chart.
    pub fn from_elements(elements: &[GroupElement<f64>], delta: f64) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::usage("no elements given; use DeltaSet::empty for the empty set"));
        };
        let backend = first.backend();
        let logs = elements.iter().map(|g| g.log()).collect::<Result<Vec<_>>>()?;
        Self::snap(logs.iter().map(|v| v.as_slice()), delta, Ambient::Group(backend))
    }

    /// Builds a set from lattice indices.
    pub fn from_lattice(points: impl IntoIterator<Item = Vec<i64>>, delta: f64, ambient: Ambient) -> Result<Self> {
        check_ambient(ambient, delta)?;
        let d = ambient.dim();
        let points: Vec<Vec<i64>> = points.into_iter().collect();
        if points.iter().any(|p| p.len() != d) {
            return Err(Error::usage(format!("{ambient} lattice points have {d} coordinates")));
        }
        let stride = points.iter().fold(0i64, |g, p| g.gcd(&p[d - 1])).max(1);
        let runs = points.iter().map(|p| Run::point(d, p, stride)).collect();
        Ok(Self::from_runs(ambient, delta, stride, runs, false))
    }

    /// Normalizes runs: canonical stride, sorted, merged.
    pub(crate) fn from_runs(ambient: Ambient, delta: f64, stride: i64, mut runs: Vec<Run>, truncated: bool) -> Self {
        let d = ambient.dim();
        // Every run longer than one point pins the stride; otherwise the
        // singletons may share a larger common factor.
        let mut stride = stride;
        if !runs.iter().any(|r| r.hi > r.lo(d)) {
            let g = runs.iter().fold(0i64, |g, r| g.gcd(&(r.lo(d) * stride))).max(1);
            if g != stride {
                for r in &mut runs {
                    let v = r.lo(d) * stride / g;
                    r.key[d - 1] = v;
                    r.hi = v;
                }
                stride = g;
            }
        }
        if runs.is_empty() {
            stride = 1;
        }
        runs.sort_unstable();
        let mut merged: Vec<Run> = Vec::with_capacity(runs.len());
        for r in runs {
            if let Some(last) = merged.last_mut() {
                if last.same_row(&r, d) && r.lo(d) <= last.hi + 1 {
                    last.hi = last.hi.max(r.hi);
                    continue;
                }
            }
            merged.push(r);
        }
        let mut set = DeltaSet { ambient, delta, stride, runs: merged, radius: 0.0, truncated };
        set.radius = set.compute_radius();
        set
    }

    fn compute_radius(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        let mut buf = vec![0i64; d];
        for r in &self.runs {
            // The norm is convex, so the extremes of a run are at its ends.
            for c in [r.lo(d), r.hi] {
                buf[..d - 1].copy_from_slice(&r.key[..d - 1]);
                buf[d - 1] = c * self.stride;
                worst = worst.max(self.norm_of(&buf));
            }
        }
        worst
    }

    fn norm_of(&self, k: &[i64]) -> f64 {
        k.iter().map(|&v| (v as f64 * self.delta).powi(2)).sum::<f64>().sqrt()
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.ambient.dim()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Largest chart norm of a point; 0 for the empty set.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Whether a budget cap removed points while building this set.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub(crate) fn with_truncated(mut self, t: bool) -> Self {
        self.truncated |= t;
        self
    }

    pub(crate) fn stride(&self) -> i64 {
        self.stride
    }

    pub(crate) fn runs(&self) -> &[Run] {
        &self.runs
    }

    /// Number of stored points.
    pub fn len(&self) -> u64 {
        let d = self.dim();
        self.runs.iter().map(|r| r.len(d)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Lattice indices of the points, in lexicographic order.
    pub fn lattice_points(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        let d = self.dim();
        self.runs.iter().flat_map(move |r| {
            (r.lo(d)..=r.hi).map(move |c| {
                let mut k = r.key[..d].to_vec();
                k[d - 1] = c * self.stride;
                k
            })
        })
    }

    /// Chart coordinates of the points.
    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        self.lattice_points().map(|k| k.iter().map(|&v| v as f64 * self.delta).collect())
    }

    /// Group elements `exp(p)` for a group ambient.
    pub fn elements(&self) -> Result<Vec<GroupElement<f64>>> {
        let Ambient::Group(b) = self.ambient else {
            return Err(Error::usage(format!("{} is not a group ambient", self.ambient)));
        };
        self.points().map(|p| b.exp(&p)).collect()
    }

    /// Membership of a lattice point.
    pub fn contains(&self, k: &[i64]) -> bool {
        let d = self.dim();
        if k.len() != d || k[d - 1] % self.stride != 0 {
            return false;
        }
        let probe = Run::point(d, k, self.stride);
        let idx = self.runs.partition_point(|r| r.key <= probe.key);
        idx > 0 && {
            let r = &self.runs[idx - 1];
            r.same_row(&probe, d) && probe.lo(d) <= r.hi
        }
    }

    /// Union of two sets over the same ambient and δ.
    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let g = self.stride.gcd(&other.stride);
        let mut runs = restride(self, g);
        runs.extend(restride(other, g));
        Ok(Self::from_runs(self.ambient, self.delta, g, runs, self.truncated || other.truncated))
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::usage(format!("ambients differ: {} vs {}", self.ambient, other.ambient)));
        }
        if self.delta != other.delta {
            return Err(Error::usage(format!("scales differ: {} vs {}", self.delta, other.delta)));
        }
        Ok(())
    }

    /// Keeps the points of chart norm at most `r`.
    pub fn restrict_to_ball(&self, r: f64) -> Self {
        let pts: Vec<Vec<i64>> = self.lattice_points().filter(|k| self.norm_of(k) <= r).collect();
        let d = self.dim();
        let runs = pts.iter().map(|p| Run::point(d, p, self.stride)).collect();
        Self::from_runs(self.ambient, self.delta, self.stride, runs, self.truncated)
    }

    /// Number of occupied cells of side `ρ/√dim` in the chart.
    ///
    /// A cell has diameter `ρ`, so the count bounds the minimal number of
    /// `ρ`-balls from above. A ball of radius `ρ` meets at most
    /// `(⌈2√dim⌉ + 1)^dim ≤ 6^dim` cells, which bounds it from below.
    pub fn covering_number(&self, rho: f64) -> Result<u64> {
        if !(rho >= self.delta) {
            return Err(Error::usage(format!("covering scale {rho} is below δ = {}", self.delta)));
        }
        Ok(self.cell_count(rho))
    }

    fn cell_count(&self, rho: f64) -> u64 {
        let d = self.dim();
        let root = (d as f64).sqrt();
        let ratio = self.delta / rho;
        let cell = |v: i64| ((v as f64 * root) * ratio).floor() as i64;
        // Step between consecutive points of a run, measured in cells.
        let step = (self.stride as f64 * root) * ratio;
        let mut rows: HashMap<[i64; MAX_DIM], Vec<(i64, i64)>> = HashMap::new();
        for r in &self.runs {
            let mut key = [0i64; MAX_DIM];
            for i in 0..d - 1 {
                key[i] = cell(r.key[i]);
            }
            let span = if step >= 1.0 {
                // Distinct points land in distinct cells, so count points.
                (r.lo(d), r.hi)
            } else {
                (cell(r.lo(d) * self.stride), cell(r.hi * self.stride))
            };
            rows.entry(key).or_default().push(span);
        }
        rows.into_values()
            .map(|mut spans| {
                spans.sort_unstable();
                let mut total = 0u64;
                let mut cur: Option<(i64, i64)> = None;
                for (lo, hi) in spans {
                    match cur {
                        Some((a, b)) if lo <= b + 1 => cur = Some((a, b.max(hi))),
                        Some((a, b)) => {
                            total += (b - a + 1) as u64;
                            cur = Some((lo, hi));
                        }
                        None => cur = Some((lo, hi)),
                    }
                }
                total + cur.map_or(0, |(a, b)| (b - a + 1) as u64)
            })
            .sum()
    }

    /// Greedy cover by `ρ`-balls centred at points of the set. The centres
    /// are pairwise more than `ρ` apart, so the count is at most the cell
    /// count. Quadratic in the worst case; meant as an oracle.
    pub fn greedy_covering_number(&self, rho: f64) -> Result<u64> {
        if !(rho >= self.delta) {
            return Err(Error::usage(format!("covering scale {rho} is below δ = {}", self.delta)));
        }
        let pts: Vec<Vec<f64>> = self.points().collect();
        let d = self.dim();
        let bucket = |p: &[f64]| -> Vec<i64> { p.iter().map(|v| (v / rho).floor() as i64).collect() };
        let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in pts.iter().enumerate() {
            grid.entry(bucket(p)).or_default().push(i);
        }
        let mut covered = vec![false; pts.len()];
        let mut count = 0u64;
        let offsets: Vec<Vec<i64>> = (0..3usize.pow(d as u32))
            .map(|mut m| {
                (0..d)
                    .map(|_| {
                        let o = (m % 3) as i64 - 1;
                        m /= 3;
                        o
                    })
                    .collect()
            })
            .collect();
        for i in 0..pts.len() {
            if covered[i] {
                continue;
            }
            count += 1;
            let b = bucket(&pts[i]);
            for off in &offsets {
                let nb: Vec<i64> = b.iter().zip(off).map(|(x, o)| x + o).collect();
                for &j in grid.get(&nb).into_iter().flatten() {
                    let dist2: f64 = pts[i].iter().zip(&pts[j]).map(|(x, y)| (x - y) * (x - y)).sum();
                    if dist2 <= rho * rho {
                        covered[j] = true;
                    }
                }
            }
        }
        Ok(count)
    }

    /// Cell counts along the dyadic ladder `ρ = δ 2^k`, `k = 0..levels`.
    pub fn covering_profile(&self, levels: usize) -> Result<CoveringProfile> {
        if levels == 0 {
            return Err(Error::usage("a covering profile needs at least one scale"));
        }
        let rhos: Vec<f64> = (0..levels).map(|k| self.delta * (1u64 << k) as f64).collect();
        let counts = rhos.iter().map(|&r| self.cell_count(r)).collect();
        Ok(CoveringProfile { delta: self.delta, rhos, counts })
    }

    /// Writes a JSON header line followed by CSV lattice indices.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let header = SetHeader {
            ambient: self.ambient,
            delta: self.delta,
            radius: self.radius,
            points: self.len(),
            truncated: self.truncated,
            coords: "lattice".into(),
        };
        writeln!(w, "{}", serde_json::to_string(&header)?)?;
        for k in self.lattice_points() {
            let row: Vec<String> = k.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Reads the format produced by [`DeltaSet::write_to`].
    pub fn read_from(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let header_line = lines.next().ok_or_else(|| Error::parse("empty δ-set file"))??;
        let header: SetHeader = serde_json::from_str(&header_line)?;
        if header.coords != "lattice" {
            return Err(Error::parse(format!("unsupported coordinate block '{}'", header.coords)));
        }
        let mut pts = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let k = line
                .split(',')
                .map(|t| t.trim().parse::<i64>().map_err(|_| Error::parse(format!("bad lattice row '{line}'"))))
                .collect::<Result<Vec<_>>>()?;
            pts.push(k);
        }
        Ok(Self::from_lattice(pts, header.delta, header.ambient)?.with_truncated(header.truncated))
    }
}

/// Runs of `set` re-expressed with a stride dividing its own.
pub(crate) fn restride(set: &DeltaSet, g: i64) -> Vec<Run> {
    let d = set.dim();
    let f = set.stride / g;
    if f == 1 {
        return set.runs.clone();
    }
    let mut out = Vec::new();
    for r in &set.runs {
        for c in r.lo(d)..=r.hi {
            let mut key = r.key;
            key[d - 1] = c * f;
            out.push(Run { key, hi: c * f });
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct SetHeader {
    ambient: Ambient,
    delta: f64,
    radius: f64,
    points: u64,
    truncated: bool,
    coords: String,
}

/// Covering numbers along a dyadic ladder of scales.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoveringProfile {
    pub delta: f64,
    pub rhos: Vec<f64>,
    pub counts: Vec<u64>,
}

impl CoveringProfile {
    /// `rho,count` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rho,count\n");
        for (r, c) in self.rhos.iter().zip(&self.counts) {
            out.push_str(&format!("{r},{c}\n"));
        }
        out
    }
}
