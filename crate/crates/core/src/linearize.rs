//! Recovery of a linear map from an almost additive map sampled on the
//! δ-grid of a ball.
//!
//! Given `σ` on the grid points of `B(0, ρ2)` in `R^n` with
//! `|σ(x) + σ(y) - σ(x+y)| ≤ ρ1` and `|σ(x)| ≤ ρ1` for `|x| ≤ δ`, the map
//! `φ` pinned on each axis at the outermost grid point,
//! `φ(e_i) = σ(m δ e_i) / (m δ)` with `m = ⌊ρ2/δ⌋`, satisfies
//! `|σ(x) - φ(x)| ≤ K (log2(1/δ) + 1) ρ1` on the grid. The constant `K` is
//! measured and reported rather than assumed.

use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Field;

/// Largest number of cells in the bounding box of a sampled grid.
pub const MAX_GRID_CELLS: u64 = 50_000_000;

/// Random triples drawn when checking almost additivity.
pub const ADDITIVITY_SAMPLES: usize = 10_000;

/// A dense `rows x cols` matrix over `K`, acting on column vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap<K> {
    rows: usize,
    cols: usize,
    entries: Vec<K>,
}

impl<K: Field> LinearMap<K> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        LinearMap { rows, cols, entries: vec![K::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = K::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<K>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::usage("matrix rows differ in length"));
        }
        Ok(LinearMap { rows: rows.len(), cols, entries: rows.into_iter().flatten().collect() })
    }

    /// Converts an `f64` matrix, exactly when `K` is a rational type.
    pub fn from_real(m: &LinearMap<f64>) -> Result<Self> {
        let entries = m
            .entries
            .iter()
            .map(|&x| K::from_real(x).ok_or_else(|| Error::usage(format!("entry {x} is not representable"))))
            .collect::<Result<_>>()?;
        Ok(LinearMap { rows: m.rows, cols: m.cols, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &K {
        &self.entries[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<K> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn apply(&self, x: &[K]) -> Vec<K> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(K::zero(), |acc, j| acc + self.get(i, j).clone() * x[j].clone()))
            .collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::usage(format!(
                "cannot compose {}x{} after {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                out.entries[i * other.cols + j] = (0..self.cols)
                    .fold(K::zero(), |acc, k| acc + self.get(i, k).clone() * other.get(k, j).clone());
            }
        }
        Ok(out)
    }

    /// Largest entry of `|self - other|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<K> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::usage("matrix shapes differ"));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a.clone() - b.clone()).magnitude())
            .fold(K::zero(), |m, x| if x > m { x } else { m }))
    }

    pub fn to_real(&self) -> LinearMap<f64> {
        LinearMap { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(Field::to_real).collect() }
    }

    fn set_column(&mut self, j: usize, v: &[K]) {
        for (i, x) in v.iter().enumerate() {
            self.entries[i * self.cols + j] = x.clone();
        }
    }
}

impl LinearMap<f64> {
    fn apply_real(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.entries[i * self.cols + j] * x[j]).sum()).collect()
    }
}

impl<K: Field> Serialize for LinearMap<K> {
    /// The matrix as rows of floats, plus the exact entries as strings when
    /// `K` is exact.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = |f: &dyn Fn(&K) -> serde_json::Value| -> Vec<Vec<serde_json::Value>> {
            (0..self.rows).map(|i| (0..self.cols).map(|j| f(self.get(i, j))).collect()).collect()
        };
        let mut st = s.serialize_struct("LinearMap", 4)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        st.serialize_field("matrix", &rows(&|x| serde_json::json!(x.to_real())))?;
        if K::is_exact() {
            st.serialize_field("exact", &rows(&|x| serde_json::json!(x.to_string())))?;
        }
        st.end()
    }
}

/// Values of a map `R^n -> R^m` on the δ-grid points of `B(0, ρ2)`.
#[derive(Clone, Debug)]
pub struct SampledMap {
    dim_in: usize,
    dim_out: usize,
    delta: f64,
    rho1: f64,
    rho2: f64,
    /// Grid points per axis on each side of the origin, `⌊ρ2/δ⌋`.
    reach: i64,
    present: Vec<bool>,
    values: Vec<f64>,
}

/// Measured hypotheses of a sampled map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HypothesisReport {
    /// `max |σ(x)|` over grid points with `|x| ≤ δ`.
    pub continuity_defect: f64,
    /// `max |σ(x) + σ(y) - σ(x+y)|` over the checked triples.
    pub additivity_defect: f64,
    pub triples_checked: usize,
    /// Whether both defects are at most `ρ1`.
    pub holds: bool,
}

impl SampledMap {
    /// An empty sample; requires `0 < δ < ρ1 < ρ2 ≤ 1`.
    pub fn new(dim_in: usize, dim_out: usize, delta: f64, rho1: f64, rho2: f64) -> Result<Self> {
        if !(0.0 < delta && delta < rho1 && rho1 < rho2 && rho2 <= 1.0) {
            return Err(Error::usage(format!("need 0 < δ < ρ1 < ρ2 ≤ 1, got δ={delta}, ρ1={rho1}, ρ2={rho2}")));
        }
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::usage("dimensions must be positive"));
        }
        let reach = (rho2 / delta).floor() as i64;
        let cells = (2 * reach as u64 + 1).checked_pow(dim_in as u32).filter(|&c| c <= MAX_GRID_CELLS);
        let Some(cells) = cells else {
            return Err(Error::ResourceLimit(format!("grid of B(0,{rho2}) at δ={delta} in dimension {dim_in}")));
        };
        Ok(SampledMap {
            dim_in,
            dim_out,
            delta,
            rho1,
            rho2,
            reach,
            present: vec![false; cells as usize],
            values: vec![0.0; cells as usize * dim_out],
        })
    }

    /// Samples `f` at every grid point of the ball.
    pub fn from_fn(
        dim_in: usize,
        dim_out: usize,
        delta: f64,
        rho1: f64,
        rho2: f64,
        f: impl Fn(&[f64]) -> Vec<f64> + Sync,
    ) -> Result<Self> {
        let mut m = Self::new(dim_in, dim_out, delta, rho1, rho2)?;
        let pts: Vec<Vec<i64>> = m.grid_points().collect();
        let vals: Vec<Vec<f64>> = pts.par_iter().map(|k| f(&m.coords(k))).collect();
        for (k, v) in pts.iter().zip(vals) {
            m.set(k, v)?;
        }
        Ok(m)
    }

    /// Reads rows `x_1, ..., x_n, v_1, ..., v_m` of grid coordinates and
    /// values.
    pub fn from_csv(
        r: impl BufRead,
        dim_in: usize,
        dim_out: usize,
        delta: f64,
        rho1: f64,
        rho2: f64,
    ) -> Result<Self> {
        let mut m = Self::new(dim_in, dim_out, delta, rho1, rho2)?;
        let mut seen_data = false;
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parsed = line.split(',').map(|t| t.trim().parse::<f64>()).collect::<std::result::Result<Vec<_>, _>>();
            let nums = match parsed {
                Ok(nums) => nums,
                // A header row is allowed before the data.
                Err(_) if !seen_data => {
                    seen_data = true;
                    continue;
                }
                Err(_) => return Err(Error::parse(format!("bad sample row '{line}'"))),
            };
            seen_data = true;
            if nums.len() != dim_in + dim_out {
                return Err(Error::parse(format!("expected {} columns in '{line}'", dim_in + dim_out)));
            }
            let k: Vec<i64> = nums[..dim_in].iter().map(|x| (x / delta).round() as i64).collect();
            m.set(&k, nums[dim_in..].to_vec())?;
        }
        Ok(m)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    pub fn rho2(&self) -> f64 {
        self.rho2
    }

    fn in_ball(&self, k: &[i64]) -> bool {
        let n2: f64 = k.iter().map(|&v| (v as f64 * self.delta).powi(2)).sum();
        n2 <= self.rho2 * self.rho2
    }

    fn index(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.dim_in || !self.in_ball(k) {
            return None;
        }
        let side = 2 * self.reach + 1;
        Some(k.iter().rev().fold(0i64, |acc, &v| acc * side + (v + self.reach)) as usize)
    }

    fn coords(&self, k: &[i64]) -> Vec<f64> {
        k.iter().map(|&v| v as f64 * self.delta).collect()
    }

    /// Lattice indices of the grid points of the ball.
    pub fn grid_points(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        let side = (2 * self.reach + 1) as usize;
        (0..self.present.len()).filter_map(move |mut idx| {
            let mut k = Vec::with_capacity(self.dim_in);
            for _ in 0..self.dim_in {
                k.push((idx % side) as i64 - self.reach);
                idx /= side;
            }
            self.in_ball(&k).then_some(k)
        })
    }

    pub fn set(&mut self, k: &[i64], v: Vec<f64>) -> Result<()> {
        if v.len() != self.dim_out {
            return Err(Error::usage(format!("values have {} coordinates, expected {}", v.len(), self.dim_out)));
        }
        let i = self.index(k).ok_or_else(|| Error::usage(format!("{k:?} is not a grid point of the ball")))?;
        self.present[i] = true;
        self.values[i * self.dim_out..(i + 1) * self.dim_out].copy_from_slice(&v);
        Ok(())
    }

    pub fn get(&self, k: &[i64]) -> Option<&[f64]> {
        let i = self.index(k)?;
        self.present[i].then(|| &self.values[i * self.dim_out..(i + 1) * self.dim_out])
    }

    /// Number of grid points of the ball without a value.
    pub fn missing(&self) -> usize {
        self.grid_points().filter(|k| self.get(k).is_none()).count()
    }

    /// The one-dimensional sample along the axis `e_i`.
    pub fn restrict_to_axis(&self, i: usize) -> Result<SampledMap> {
        if i >= self.dim_in {
            return Err(Error::usage(format!("axis {i} out of range")));
        }
        let mut out = SampledMap::new(1, self.dim_out, self.delta, self.rho1, self.rho2)?;
        for t in -self.reach..=self.reach {
            let mut k = vec![0; self.dim_in];
            k[i] = t;
            if let Some(v) = self.get(&k) {
                out.set(&[t], v.to_vec())?;
            }
        }
        Ok(out)
    }

    /// Measures the almost-continuity and almost-additivity defects on
    /// [`ADDITIVITY_SAMPLES`] seeded random triples and on the dyadic axis
    /// chains `(2^j e_i, 2^j e_i, 2^(j+1) e_i)`.
    pub fn hypotheses(&self, seed: u64) -> HypothesisReport {
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut continuity_defect: f64 = 0.0;
        let mut near = vec![vec![0i64; self.dim_in]];
        for i in 0..self.dim_in {
            for s in [-1, 1] {
                let mut k = vec![0i64; self.dim_in];
                k[i] = s;
                near.push(k);
            }
        }
        for k in &near {
            if let Some(v) = self.get(k) {
                continuity_defect = continuity_defect.max(norm(v));
            }
        }
        let mut additivity_defect: f64 = 0.0;
        let mut checked = 0;
        let mut check = |x: &[i64], y: &[i64]| {
            let z: Vec<i64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
            if let (Some(a), Some(b), Some(c)) = (self.get(x), self.get(y), self.get(&z)) {
                let d: Vec<f64> = (0..self.dim_out).map(|i| a[i] + b[i] - c[i]).collect();
                additivity_defect = additivity_defect.max(norm(&d));
                checked += 1;
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw = |rng: &mut ChaCha8Rng| -> Vec<i64> {
            loop {
                let k: Vec<i64> = (0..self.dim_in).map(|_| rng.gen_range(-self.reach..=self.reach)).collect();
                if self.in_ball(&k) {
                    return k;
                }
            }
        };
        let mut drawn = 0;
        let mut attempts = 0;
        while drawn < ADDITIVITY_SAMPLES && attempts < 100 * ADDITIVITY_SAMPLES {
            attempts += 1;
            let (x, y) = (draw(&mut rng), draw(&mut rng));
            let z: Vec<i64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            if self.in_ball(&z) {
                check(&x, &y);
                drawn += 1;
            }
        }
        for i in 0..self.dim_in {
            let mut step = 1i64;
            while 2 * step <= self.reach {
                let mut k = vec![0i64; self.dim_in];
                k[i] = step;
                check(&k, &k);
                step *= 2;
            }
        }
        HypothesisReport {
            continuity_defect,
            additivity_defect,
            triples_checked: checked,
            holds: continuity_defect <= self.rho1 && additivity_defect <= self.rho1,
        }
    }

    /// `max |σ(x) - φ(x)|` over the grid.
    pub fn sup_error(&self, phi: &LinearMap<f64>) -> f64 {
        let pts: Vec<Vec<i64>> = self.grid_points().collect();
        pts.par_iter()
            .filter_map(|k| {
                let v = self.get(k)?;
                let w = phi.apply_real(&self.coords(k));
                Some(v.iter().zip(&w).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
            })
            .reduce(|| 0.0, f64::max)
    }

    /// `(log2(1/δ) + 1) ρ1`, the scale of the recovery bound.
    pub fn error_scale(&self) -> f64 {
        ((1.0 / self.delta).log2() + 1.0) * self.rho1
    }
}

/// A recovered linear map with its measured error constants.
#[derive(Clone, Debug, Serialize)]
pub struct Linearization<K: Field> {
    pub map: LinearMap<K>,
    /// `max |σ(x) - φ(x)|` over the grid.
    pub sup_error: f64,
    /// `sup_error / ((log2(1/δ) + 1) ρ1)`.
    pub constant: f64,
    pub hypotheses: HypothesisReport,
}

/// Seed for the random triples of the hypothesis check.
const HYPOTHESIS_SEED: u64 = 0x5eed;

fn pins<K: Field>(sigma: &SampledMap) -> Result<Vec<Vec<K>>> {
    let missing = sigma.missing();
    if missing > 0 {
        return Err(Error::usage(format!("{missing} grid values are missing")));
    }
    let m = sigma.reach;
    let scale = m as f64 * sigma.delta;
    (0..sigma.dim_in)
        .map(|i| {
            let mut k = vec![0; sigma.dim_in];
            k[i] = m;
            let v = sigma.get(&k).expect("no missing values");
            v.iter()
                .map(|x| K::from_real(x / scale).ok_or_else(|| Error::usage("non-finite sample")))
                .collect()
        })
        .collect()
}

fn finish<K: Field>(sigma: &SampledMap, map: LinearMap<K>) -> Linearization<K> {
    let sup_error = sigma.sup_error(&map.to_real());
    Linearization { constant: sup_error / sigma.error_scale(), sup_error, hypotheses: sigma.hypotheses(HYPOTHESIS_SEED), map }
}

/// The linear map pinned at `σ(⌊ρ2/δ⌋ δ e_i)` on each axis.
pub fn linearize<K: Field>(sigma: &SampledMap) -> Result<Linearization<K>> {
    let mut map = LinearMap::zeros(sigma.dim_out, sigma.dim_in);
    for (i, p) in pins::<K>(sigma)?.iter().enumerate() {
        map.set_column(i, p);
    }
    Ok(finish(sigma, map))
}

/// As [`linearize`], with each pinning vector moved to the nearest point
/// of the affine space `{p : π p = ψ e_i}`, so that `π ∘ φ = ψ` holds in
/// the arithmetic of `K` (exactly for rational `K`).
pub fn linearize_constrained<K: Field>(
    sigma: &SampledMap,
    pi: &LinearMap<K>,
    psi: &LinearMap<K>,
) -> Result<Linearization<K>> {
    if pi.cols != sigma.dim_out || psi.cols != sigma.dim_in || pi.rows != psi.rows {
        return Err(Error::usage(format!(
            "π must be {}x{} and ψ {}x{}",
            psi.rows, sigma.dim_out, pi.rows, sigma.dim_in
        )));
    }
    let (pi_r, psi_r) = (pi.to_real(), psi.to_real());
    let worst = sigma
        .grid_points()
        .filter_map(|k| {
            let v = sigma.get(&k)?;
            let a = pi_r.apply_real(v);
            let b = psi_r.apply_real(&sigma.coords(&k));
            Some(a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt())
        })
        .fold(0.0, f64::max);
    if worst > sigma.delta {
        return Err(Error::Infeasible(format!("π∘σ differs from ψ by {worst} on the grid, above δ = {}", sigma.delta)));
    }
    // Normal equations of the projection: (π π^T) y = π p - ψ e_i.
    let pi_t = transpose(pi);
    let gram = pi.compose(&pi_t)?;
    let mut map = LinearMap::zeros(sigma.dim_out, sigma.dim_in);
    for (i, p) in pins::<K>(sigma)?.into_iter().enumerate() {
        let target = psi.column(i);
        let r: Vec<K> = pi.apply(&p).into_iter().zip(target).map(|(a, b)| a - b).collect();
        let y = solve_consistent(&gram, r).ok_or_else(|| Error::Infeasible(format!("ψ e_{} is not in the image of π", i + 1)))?;
        let shift = pi_t.apply(&y);
        let q: Vec<K> = p.into_iter().zip(shift).map(|(a, b)| a - b).collect();
        map.set_column(i, &q);
    }
    Ok(finish(sigma, map))
}

fn transpose<K: Field>(m: &LinearMap<K>) -> LinearMap<K> {
    let mut t = LinearMap::zeros(m.cols, m.rows);
    for i in 0..m.rows {
        for j in 0..m.cols {
            t.entries[j * m.rows + i] = m.get(i, j).clone();
        }
    }
    t
}

/// Some solution of `a y = b` for square `a`, or `None` when the system is
/// inconsistent. Exact fields pivot on any nonzero entry; floating fields
/// treat entries below a relative tolerance as zero.
fn solve_consistent<K: Field>(a: &LinearMap<K>, b: Vec<K>) -> Option<Vec<K>> {
    let n = a.rows;
    let scale = a.entries.iter().map(|x| x.to_real().abs()).fold(0.0, f64::max);
    let tol = if K::is_exact() { 0.0 } else { 1e-12 * scale.max(1.0) };
    let negligible = |x: &K| x.to_real().abs() <= tol && (!K::is_exact() || x.is_zero());
    let mut rows: Vec<Vec<K>> = (0..n)
        .map(|i| {
            let mut r: Vec<K> = (0..n).map(|j| a.get(i, j).clone()).collect();
            r.push(b[i].clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let best = (row..n)
            .filter(|&i| !negligible(&rows[i][col]))
            .max_by(|&i, &j| rows[i][col].to_real().abs().total_cmp(&rows[j][col].to_real().abs()));
        let Some(p) = best else { continue };
        rows.swap(row, p);
        let piv = rows[row][col].clone();
        for x in rows[row].iter_mut() {
            *x = x.clone() / piv.clone();
        }
        for i in 0..n {
            if i != row && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..=n {
                    let v = rows[row][j].clone();
                    rows[i][j] = rows[i][j].clone() - f.clone() * v;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if rows[row..].iter().any(|r| !negligible(&r[n])) {
        return None;
    }
    let mut y = vec![K::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        y[c] = rows[r][n].clone();
    }
    Some(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::Zero;

    fn noisy(delta: f64, rho1: f64, rho2: f64, phi0: [[f64; 2]; 2], seed: u64) -> SampledMap {
        SampledMap::from_fn(2, 2, delta, rho1, rho2, move |x| {
            // Deterministic per-point noise bounded by ρ1.
            let h = ((x[0] * 1e6).round() as i64).wrapping_mul(0x9E37_79B9) ^ ((x[1] * 1e6).round() as i64) ^ seed as i64;
            let mut rng = ChaCha8Rng::seed_from_u64(h as u64);
            let (t, r) = (rng.gen_range(0.0..std::f64::consts::TAU), rho1 * rng.gen_range(0.0..1.0));
            (0..2).map(|i| phi0[i][0] * x[0] + phi0[i][1] * x[1] + r * if i == 0 { t.cos() } else { t.sin() }).collect()
        })
        .unwrap()
    }

    #[test]
    fn parameter_ordering_is_enforced() {
        assert!(SampledMap::new(2, 2, 0.1, 0.05, 0.5).is_err());
        assert!(SampledMap::new(2, 2, 0.01, 0.05, 1.5).is_err());
        assert!(matches!(SampledMap::new(4, 1, 1e-3, 2e-3, 1.0), Err(Error::ResourceLimit(_))));
        let empty = SampledMap::new(1, 1, 0.01, 0.02, 0.5).unwrap();
        assert!(linearize::<f64>(&empty).is_err());
    }

    #[test]
    fn linear_inputs_are_recovered() {
        let a = [[0.7, -1.2], [0.3, 2.0]];
        let sigma = SampledMap::from_fn(2, 2, 1.0 / 64.0, 0.05, 0.5, |x| {
            vec![a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]]
        })
        .unwrap();
        let lin = linearize::<f64>(&sigma).unwrap();
        assert!(lin.sup_error < 1e-12);
        assert!(lin.hypotheses.holds);
        for i in 0..2 {
            for j in 0..2 {
                assert!((lin.map.get(i, j) - a[i][j]).abs() < 1e-12);
            }
        }
        let flip = SampledMap::from_fn(2, 2, 1.0 / 64.0, 0.02, 0.5, |x| vec![-x[0], -x[1]]).unwrap();
        let lin = linearize::<Rational>(&flip).unwrap();
        assert_eq!(lin.map, LinearMap::from_rows(vec![vec![-Rational::from_integer(1.into()), Rational::from_integer(0.into())], vec![Rational::from_integer(0.into()), -Rational::from_integer(1.into())]]).unwrap());
    }

    #[test]
    fn noisy_recovery_is_within_the_bound() {
        let (delta, rho1) = (2f64.powi(-10), 1e-3);
        let sigma = noisy(delta, rho1, 0.5, [[1.5, -0.5], [0.25, 0.75]], 1);
        let lin = linearize::<f64>(&sigma).unwrap();
        assert!(lin.sup_error <= 10.0 * sigma.error_scale(), "{lin:?}");
        assert!(lin.hypotheses.triples_checked >= ADDITIVITY_SAMPLES);
        assert!(lin.hypotheses.additivity_defect <= 3.0 * rho1);
    }

    #[test]
    fn error_grows_at_most_linearly_in_log_scale() {
        let rho1 = 0.05;
        let err = |delta: f64| linearize::<f64>(&noisy(delta, rho1, 0.8, [[1.0, 0.0], [0.5, -1.0]], 2)).unwrap().sup_error;
        let (coarse, fine) = (err(2f64.powi(-5)), err(2f64.powi(-10)));
        assert!(fine <= 2.0 * coarse + 2.0 * rho1, "{coarse} {fine}");
    }

    #[test]
    fn axis_restriction_matches_the_full_construction() {
        let sigma = noisy(1.0 / 128.0, 0.02, 0.5, [[0.4, 1.1], [-0.9, 0.2]], 3);
        let full = linearize::<f64>(&sigma).unwrap();
        for i in 0..2 {
            let axis = linearize::<f64>(&sigma.restrict_to_axis(i).unwrap()).unwrap();
            assert_eq!(axis.map.column(0), full.map.column(i));
        }
    }

    #[test]
    fn constrained_section_is_exact() {
        // V = R^2 ⊕ R, π the projection onto R^2, σ a noisy section.
        let (delta, rho1) = (2f64.powi(-8), 4e-3);
        let sigma = SampledMap::from_fn(2, 3, delta, rho1, 0.5, |x| {
            let wobble = rho1 * (37.0 * x[0] + 91.0 * x[1]).sin();
            vec![x[0], x[1], 0.6 * x[0] - 0.2 * x[1] + wobble]
        })
        .unwrap();
        let one = || Rational::from_integer(1.into());
        let zero = || Rational::from_integer(0.into());
        let pi = LinearMap::from_rows(vec![vec![one(), zero(), zero()], vec![zero(), one(), zero()]]).unwrap();
        let psi = LinearMap::<Rational>::identity(2);
        let lin = linearize_constrained(&sigma, &pi, &psi).unwrap();
        assert_eq!(pi.compose(&lin.map).unwrap(), psi);
        assert!(lin.sup_error <= 10.0 * sigma.error_scale());

        // ψ = 0 with σ into ker π keeps φ in ker π.
        let kernel = SampledMap::from_fn(2, 3, delta, rho1, 0.5, |x| vec![0.0, 0.0, x[0] - x[1]]).unwrap();
        let zero_psi = LinearMap::<Rational>::zeros(2, 2);
        let lin = linearize_constrained(&kernel, &pi, &zero_psi).unwrap();
        assert!(pi.compose(&lin.map).unwrap().max_abs_diff(&zero_psi).unwrap().is_zero());

        // A constraint σ does not satisfy is rejected.
        let shifted = LinearMap::from_rows(vec![vec![one(), one()], vec![zero(), one()]]).unwrap();
        assert!(matches!(linearize_constrained(&sigma, &pi, &shifted), Err(Error::Infeasible(_))));
    }

    #[test]
    fn rank_deficient_constraints() {
        let a = LinearMap::<Rational>::from_rows(vec![
            vec![Rational::from_integer(1.into()), Rational::from_integer(1.into())],
            vec![Rational::from_integer(1.into()), Rational::from_integer(1.into())],
        ])
        .unwrap();
        let two = Rational::from_integer(2.into());
        let y = solve_consistent(&a, vec![two.clone(), two.clone()]).unwrap();
        assert_eq!(a.apply(&y), vec![two.clone(), two.clone()]);
        assert!(solve_consistent(&a, vec![two, Rational::from_integer(3.into())]).is_none());
    }

    #[test]
    fn csv_loading_and_json_output() {
        let text = "x1,v1\n-0.5,-1.0\n-0.25,-0.5\n0,0\n0.25,0.5\n0.5,1.0\n";
        let sigma = SampledMap::from_csv(text.as_bytes(), 1, 1, 0.25, 0.3, 0.5).unwrap();
        let lin = linearize::<Rational>(&sigma).unwrap();
        let json = serde_json::to_value(&lin.map).unwrap();
        assert_eq!(json["matrix"], serde_json::json!([[2.0]]));
        assert_eq!(json["exact"], serde_json::json!([["2"]]));
        let partial = SampledMap::from_csv("0,0\n".as_bytes(), 1, 1, 0.25, 0.3, 0.5).unwrap();
        assert_eq!(partial.missing(), 4);
    }
}
