//! Non-concentration probes and covering-profile fits.

use serde::Serialize;

use super::{Ambient, CoveringProfile, DeltaSet};
use crate::error::{Error, Result};
use crate::fit::least_squares;
use crate::group_backends::{norm, SubgroupDescriptor};

/// Distance of a set from one subgroup.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AwayReport {
    pub subgroup: String,
    /// Largest chart distance from a point of the set to the subgroup.
    pub max_distance: f64,
    /// Whether `max_distance > ρ`.
    pub away: bool,
}

/// For each subgroup `H`, the largest distance from a point of `A` to `H`
/// and whether it exceeds `ρ`.
pub fn away_from_subgroups(a: &DeltaSet, subgroups: &[SubgroupDescriptor], rho: f64) -> Result<Vec<AwayReport>> {
    let Ambient::Group(backend) = a.ambient() else {
        return Err(Error::usage(format!("{} is not a group ambient", a.ambient())));
    };
    let pts: Vec<Vec<f64>> = a.points().collect();
    subgroups
        .iter()
        .map(|h| {
            if h.backend != backend {
                return Err(Error::usage(format!("subgroup '{}' belongs to {}", h.name, h.backend)));
            }
            let max_distance = pts
                .iter()
                .map(|p| {
                    let q = h.project(p);
                    let r: Vec<f64> = p.iter().zip(&q).map(|(x, y)| x - y).collect();
                    norm(&r)
                })
                .fold(0.0, f64::max);
            Ok(AwayReport { subgroup: h.name.clone(), max_distance, away: max_distance > rho })
        })
        .collect()
}

/// Fraction of the δ-grid points of `B(0, r)` that lie within δ of a point
/// of `Y`, with δ the scale of `Y`.
pub fn ball_coverage(y: &DeltaSet, r: f64) -> Result<f64> {
    if !y.ambient().is_additive() {
        return Err(Error::usage(format!("{} is not a vector ambient", y.ambient())));
    }
    if !(r > 0.0) {
        return Err(Error::usage("coverage radius must be positive"));
    }
    let d = y.dim();
    let bound = (r / y.delta()).floor() as i64;
    let limit = (r / y.delta()).powi(2);
    let mut total = 0u64;
    let mut hit = 0u64;
    let mut k = vec![-bound; d];
    loop {
        let n2: f64 = k.iter().map(|&v| (v as f64).powi(2)).sum();
        if n2 <= limit {
            total += 1;
            if near(y, &mut k) {
                hit += 1;
            }
        }
        // Odometer over the box [-bound, bound]^d.
        let mut i = 0;
        while i < d {
            if k[i] < bound {
                k[i] += 1;
                break;
            }
            k[i] = -bound;
            i += 1;
        }
        if i == d {
            break;
        }
    }
    Ok(if total == 0 { 0.0 } else { hit as f64 / total as f64 })
}

/// Whether a lattice point or one of its axis neighbours is in `y`.
fn near(y: &DeltaSet, k: &mut [i64]) -> bool {
    if y.contains(k) {
        return true;
    }
    for i in 0..k.len() {
        for step in [-1, 1] {
            k[i] += step;
            let found = y.contains(k);
            k[i] -= step;
            if found {
                return true;
            }
        }
    }
    false
}

/// Least-squares fit `ln N = κ ln(1/ρ) + b`, reported as the slope `κ̂`
/// and `ε̂ = -b / ln(1/δ)`, so that `N ≈ δ^ε̂ ρ^-κ̂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProfileFit {
    pub kappa: f64,
    pub epsilon: f64,
}

pub fn profile_fit(p: &CoveringProfile) -> Result<ProfileFit> {
    if p.rhos.len() < 3 || p.rhos.len() != p.counts.len() {
        return Err(Error::usage("a profile fit needs at least three scales"));
    }
    if !(p.delta > 0.0 && p.delta < 1.0) {
        return Err(Error::usage("a profile fit needs 0 < δ < 1"));
    }
    if p.counts.contains(&0) {
        return Err(Error::usage("a profile fit needs a nonempty set"));
    }
    let xs: Vec<f64> = p.rhos.iter().map(|r| -r.ln()).collect();
    let ys: Vec<f64> = p.counts.iter().map(|&c| (c as f64).ln()).collect();
    let line = least_squares(&xs, &ys)?;
    Ok(ProfileFit { kappa: line.slope, epsilon: -line.intercept / (1.0 / p.delta).ln() })
}

/// The largest `κ` with `N(ρ) ≥ ρ^-κ` at every scale `ρ < 1` of the
/// profile: the minimum of `ln N(ρ) / ln(1/ρ)`.
pub fn envelope_exponent(p: &CoveringProfile) -> Result<f64> {
    p.rhos
        .iter()
        .zip(&p.counts)
        .filter(|(r, _)| **r < 1.0)
        .map(|(r, &c)| (c as f64).ln() / (1.0 / r).ln())
        .reduce(f64::min)
        .ok_or_else(|| Error::usage("an envelope exponent needs a scale below 1"))
}
