//! Parameter schemas, defaults and bodies of the individual scenarios.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use super::svg::{Plot, Series};
use super::{Outcome, Params, Scenario, ScenarioConfig, Table};
use crate::constructions::{arithmetic_progression_set, commutator_coverage, verify_nongrowth, APConfig};
use crate::delta_sets::{ball_coverage, generate_bracket, k_fold, Ambient, DeltaSet, GenerationBudget, ModuleAction};
use crate::error::{Error, Result};
use crate::fit::{log_log_slope, log_space};
use crate::free_lie::{FreeLieAlgebra, FreeLieElement};
use crate::group_backends::{approximant_error, evaluate_lie, norm, sample_ball, Backend};
use crate::linearize::{linearize, linearize_constrained, LinearMap, SampledMap};
use crate::word_synth::{certify, synthesize};
use crate::Rational;

/// Errors below this are rounding noise in `f64` and are left out of
/// slope fits.
const ERROR_FLOOR: f64 = 1e-13;

pub(super) fn allowed_params(s: Scenario) -> &'static [&'static str] {
    match s {
        Scenario::BchOrder => &["backend", "s", "ell", "seed", "samples"],
        Scenario::SynthWord => &["s", "ell"],
        Scenario::NongrowthAp => &["d", "kappa", "delta", "r", "rho", "max_points", "region_radius"],
        Scenario::GrowthSu2 => &["points", "delta", "r", "seed", "max_points", "region_radius"],
        Scenario::SumProductGenerate => {
            &["backend", "s", "delta", "points", "r", "seed", "max_points", "region_radius"]
        }
        Scenario::CommutatorCoverage => &["rho", "k", "delta", "seed", "samples"],
        Scenario::LinearizeDemo => &["delta", "rho", "r", "noise", "seed"],
    }
}

/// Parameters with every default filled in.
pub(super) struct Resolved {
    pub p: Params,
    pub backend: Option<Backend>,
}

impl Resolved {
    pub fn to_map(&self) -> BTreeMap<String, Value> {
        let Ok(Value::Object(obj)) = serde_json::to_value(&self.p) else { return BTreeMap::new() };
        obj.into_iter().filter(|(_, v)| !v.is_null()).collect()
    }

    fn budget(&self) -> GenerationBudget {
        let mut b = GenerationBudget::default();
        if let Some(r) = self.p.region_radius {
            b.region_radius = r;
        }
        if let Some(m) = self.p.max_points {
            b.max_points = m;
        }
        b
    }

    fn seed_rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.p.seed.expect("randomized scenarios resolve a seed"))
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(config_err(msg()))
    }
}

pub(super) fn resolve(config: &ScenarioConfig) -> Result<Resolved> {
    let given = &config.params;
    let mut p = Params::default();
    match config.scenario {
        Scenario::BchOrder => {
            p.backend = Some("su2".into());
            p.s = Some(2);
            p.ell = Some(3);
            p.seed = Some(1);
            p.samples = Some(20);
        }
        Scenario::SynthWord => {
            p.s = Some(2);
            p.ell = Some(4);
        }
        Scenario::NongrowthAp => {
            p.d = Some(1);
            p.kappa = Some(0.5);
            p.delta = Some(2f64.powi(-10));
            p.r = Some(1.0);
            p.rho = Some(0.25);
            p.max_points = Some(GenerationBudget::default().max_points);
        }
        Scenario::GrowthSu2 => {
            p.points = Some(200);
            p.delta = Some(2f64.powi(-7));
            p.r = Some(0.1);
            p.seed = Some(7);
            p.max_points = Some(GenerationBudget::default().max_points);
        }
        Scenario::SumProductGenerate => {
            p.backend = Some("abelian:1".into());
            p.s = Some(3);
            p.delta = Some(2f64.powi(-5));
            p.points = Some(3);
            p.r = Some(1.0);
            p.seed = Some(3);
            p.max_points = Some(1_000_000);
        }
        Scenario::CommutatorCoverage => {
            p.rho = Some(0.1);
            p.k = Some(1);
            p.seed = Some(1);
            p.samples = Some(1000);
        }
        Scenario::LinearizeDemo => {
            p.delta = Some(2f64.powi(-10));
            p.rho = Some(1e-3);
            p.r = Some(0.5);
            p.seed = Some(1);
        }
    }
    p.merge(given);
    // Defaults that depend on other parameters.
    match config.scenario {
        Scenario::CommutatorCoverage if p.delta.is_none() => {
            let rho = p.rho.unwrap_or(0.1);
            p.delta = Some(rho * rho / 64.0);
        }
        Scenario::LinearizeDemo if p.noise.is_none() => p.noise = p.rho,
        _ => {}
    }
    let backend = p.backend.as_deref().map(str::parse::<Backend>).transpose().map_err(|e| config_err(e.to_string()))?;
    let r = Resolved { p, backend };
    check(config.scenario, &r)?;
    Ok(r)
}

fn check(s: Scenario, r: &Resolved) -> Result<()> {
    let p = &r.p;
    let pos = |name: &str, v: Option<f64>| require(v.is_some_and(|v| v > 0.0 && v.is_finite()), || format!("{name} must be positive and finite"));
    if let Some(m) = p.max_points {
        require(m > 0, || "max_points must be positive".into())?;
    }
    if let Some(rr) = p.region_radius {
        require(rr > 0.0, || "region_radius must be positive".into())?;
    }
    match s {
        Scenario::BchOrder => {
            let b = r.backend.expect("defaulted");
            require(matches!(b, Backend::Su2 | Backend::Sl2r | Backend::Sl2rH3), || {
                format!("bch-order needs a non-nilpotent backend (su2, sl2r, sl2rxh3), got {b}")
            })?;
            require((2..=3).contains(&p.s.unwrap()), || "s must be 2 or 3".into())?;
            require((2..=6).contains(&p.ell.unwrap()), || "ell must lie in 2..=6".into())?;
            require(p.samples.unwrap() >= 3, || "samples must be at least 3".into())?;
        }
        Scenario::SynthWord => {
            require((1..=4).contains(&p.s.unwrap()), || "s must lie in 1..=4".into())?;
            require((2..=6).contains(&p.ell.unwrap()), || "ell must lie in 2..=6".into())?;
        }
        Scenario::NongrowthAp => {
            pos("rho", p.rho)?;
            ap_config(p).validate().map_err(|e| config_err(e.to_string()))?;
        }
        Scenario::GrowthSu2 => {
            pos("delta", p.delta)?;
            pos("r", p.r)?;
            require(p.r.unwrap() < Backend::Su2.chart_radius() / 3.0, || "r must keep A^3 inside the chart".into())?;
            require(p.points.unwrap() >= 1, || "points must be positive".into())?;
        }
        Scenario::SumProductGenerate => {
            let b = r.backend.expect("defaulted");
            require(matches!(b, Backend::Abelian(1) | Backend::Su2), || {
                format!("sum-product-generate runs abelian:1 (scalar action on R^2) or su2 (adjoint), got {b}")
            })?;
            pos("delta", p.delta)?;
            pos("r", p.r)?;
            require((1..=6).contains(&p.s.unwrap()), || "s must lie in 1..=6".into())?;
            require((1..=64).contains(&p.points.unwrap()), || "points must lie in 1..=64".into())?;
        }
        Scenario::CommutatorCoverage => {
            pos("rho", p.rho)?;
            pos("delta", p.delta)?;
            require(p.samples.unwrap() >= 1, || "samples must be positive".into())?;
            let reach = p.rho.unwrap().powi(2) / p.delta.unwrap();
            require(reach <= 1e7, || "delta is too fine for rho (more than 1e7 targets)".into())?;
        }
        Scenario::LinearizeDemo => {
            pos("noise", p.noise)?;
            require(p.noise.unwrap() <= p.rho.unwrap(), || "noise must not exceed rho".into())?;
            SampledMap::new(2, 2, p.delta.unwrap(), p.rho.unwrap(), p.r.unwrap())
                .map_err(|e| config_err(e.to_string()))?;
        }
    }
    Ok(())
}

fn ap_config(p: &Params) -> APConfig {
    APConfig { d: p.d.unwrap(), kappa: p.kappa.unwrap(), delta: p.delta.unwrap(), r: p.r.unwrap() }
}

pub(super) fn execute(s: Scenario, r: &Resolved, out: &mut Outcome) -> Result<()> {
    match s {
        Scenario::BchOrder => bch_order(r, out),
        Scenario::SynthWord => synth_word(r, out),
        Scenario::NongrowthAp => nongrowth_ap(r, out),
        Scenario::GrowthSu2 => growth_su2(r, out),
        Scenario::SumProductGenerate => sum_product_generate(r, out),
        Scenario::CommutatorCoverage => coverage(r, out),
        Scenario::LinearizeDemo => linearize_demo(r, out),
    }
}

fn unit_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = sample_ball(rng, dim, 1.0);
        let n = norm(&v);
        if n > 1e-3 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// Slope over the samples whose error is above [`ERROR_FLOOR`].
fn fitted_slope(hs: &[f64], errs: &[f64]) -> (f64, usize) {
    let (x, y): (Vec<f64>, Vec<f64>) = hs.iter().zip(errs).filter(|(_, e)| **e > ERROR_FLOOR).map(|(h, e)| (*h, *e)).unzip();
    if x.len() < 3 {
        return (0.0, x.len());
    }
    (log_log_slope(&x, &y).unwrap_or(0.0), x.len())
}

fn bch_order(r: &Resolved, out: &mut Outcome) -> Result<()> {
    let b = r.backend.expect("defaulted");
    let (s, ell, samples) = (r.p.s.unwrap(), r.p.ell.unwrap(), r.p.samples.unwrap());
    let approximant = synthesize(s, ell)?;
    let cert = certify(&approximant)?;
    let alg = FreeLieAlgebra::<Rational>::new(s, ell)?;
    let mut series = FreeLieElement::generator(&alg, 0);
    for i in 1..s {
        series = series.bch(&FreeLieElement::generator(&alg, i), ell)?;
    }
    let mut rng = r.seed_rng();
    let dirs: Vec<Vec<f64>> = (0..s).map(|_| unit_direction(&mut rng, b.dim())).collect();
    let hs = log_space(1e-3, 10f64.powf(-1.5), samples);
    let mut table = Table::new("error_vs_h", &["h", "word_error", "bch_error"]);
    let (mut word_errs, mut bch_errs) = (Vec::new(), Vec::new());
    for &h in &hs {
        let xs: Vec<Vec<f64>> = dirs.iter().map(|d| d.iter().map(|v| v * h).collect()).collect();
        let we = approximant_error(b, &approximant, &xs)?;
        let z = evaluate_lie(b, &series, &xs)?;
        let mut product = b.identity();
        for x in &xs {
            product = product.mul(&b.exp(x)?);
        }
        let be = b.dist(&product, &b.exp(&z)?)?;
        table.push(vec![h, we, be]);
        word_errs.push(we);
        bch_errs.push(be);
    }
    let (word_slope, word_used) = fitted_slope(&hs, &word_errs);
    let (bch_slope, bch_used) = fitted_slope(&hs, &bch_errs);
    let l = ell as f64;
    out.metric("word_slope", word_slope, "log-log slope", &format!("expected >= {}", l - 0.3));
    out.metric("word_samples_fitted", word_used as f64, "count", &format!("errors above {ERROR_FLOOR}"));
    out.metric("bch_slope", bch_slope, "log-log slope", &format!("expected >= {}", l + 0.7));
    out.metric("bch_samples_fitted", bch_used as f64, "count", &format!("errors above {ERROR_FLOOR}"));
    out.metric("word_letters", approximant.word().len() as f64, "letters", "informational");
    out.metric("word_scale", approximant.scale() as f64, "integer C", "informational");
    out.metric("certified", if cert.certified() { 1.0 } else { 0.0 }, "boolean", "expected 1");
    let pts = |e: &[f64]| hs.iter().copied().zip(e.iter().copied()).collect();
    out.plots.push(Plot::log_log(
        "error_vs_h",
        &format!("approximation error in {b}, order {ell}"),
        "h",
        "chart distance",
        vec![
            Series { label: "synthesized word".into(), points: pts(&word_errs) },
            Series { label: "truncated BCH".into(), points: pts(&bch_errs) },
        ],
    ));
    out.tables.push(table);
    Ok(())
}

fn synth_word(r: &Resolved, out: &mut Outcome) -> Result<()> {
    let (s, ell) = (r.p.s.unwrap(), r.p.ell.unwrap());
    let mut table = Table::new("synthesis", &["order", "letters", "runs", "scale", "certified", "defect_terms"]);
    let mut bars = Vec::new();
    for order in 2..=ell {
        let a = synthesize(s, order)?;
        let cert = certify(&a)?;
        let letters = a.word().len() as f64;
        table.push(vec![
            order as f64,
            letters,
            a.word().runs().len() as f64,
            a.scale() as f64,
            if cert.certified() { 1.0 } else { 0.0 },
            cert.defect.len() as f64,
        ]);
        bars.push((format!("order {order}"), letters));
        if order == ell {
            out.metric("letters", letters, "letters", "informational");
            out.metric("scale", a.scale() as f64, "integer C", "informational");
            out.metric("certified", if cert.certified() { 1.0 } else { 0.0 }, "boolean", "expected 1");
        }
    }
    let all = table.rows.iter().all(|row| row[4] == 1.0);
    out.metric("all_certified", if all { 1.0 } else { 0.0 }, "boolean", "expected 1");
    out.tables.push(table);
    out.plots.push(Plot::bars("letters", &format!("word length, s = {s}"), "letters", bars));
    Ok(())
}

fn nongrowth_ap(r: &Resolved, out: &mut Outcome) -> Result<()> {
    let c = ap_config(&r.p);
    let a = arithmetic_progression_set(&c)?;
    let rep = verify_nongrowth(&a, r.p.rho.unwrap(), &r.budget())?;
    if rep.truncated {
        out.truncated.push("AAA".into());
    }
    let bound = 3f64.powi(c.d as i32) * 8.0;
    out.metric("points", rep.points as f64, "count", "informational");
    out.metric("n_a", rep.n_a as f64, "cells of side delta/sqrt(d)", "informational");
    out.metric("n_aaa", rep.n_aaa as f64, "cells of side delta/sqrt(d)", "informational");
    out.metric("ratio", rep.ratio, "N(AAA)/N(A)", &format!("expected <= 3^d * 8 = {bound}"));

    // Covering exponent of the progression family across scales.
    let deltas: Vec<f64> = [16.0, 4.0, 1.0]
        .iter()
        .map(|m| m * c.delta)
        .filter(|&delta| APConfig { delta, ..c }.validate().is_ok())
        .collect();
    if deltas.len() >= 2 {
        let exponent = crate::constructions::ap_covering_exponent(c.d, c.kappa, c.r, &deltas)?;
        out.metric(
            "covering_exponent",
            exponent,
            "slope of ln N against ln(1/delta)",
            &format!("expected {} +- 0.1", c.d as f64 * c.kappa),
        );
    }
    let min_env = rep.quotients.iter().map(|q| q.envelope).fold(f64::INFINITY, f64::min);
    if min_env.is_finite() {
        out.metric("quotient_kappa", min_env, "envelope exponent", &format!("expected >= {}", c.kappa - 0.1));
    }
    let away = rep.away.iter().filter(|a| a.away).count();
    out.metric("away_subgroups", away as f64, "count", &format!("of {} proper catalog subgroups", rep.away.len()));

    if let Some(first) = rep.quotients.first() {
        let mut cols = vec!["rho".to_string()];
        cols.extend(rep.quotients.iter().map(|q| format!("count_{}", q.subgroup)));
        let mut table = Table { name: "quotient_profiles".into(), columns: cols, rows: Vec::new() };
        for (i, rho) in first.profile.rhos.iter().enumerate() {
            let mut row = vec![*rho];
            row.extend(rep.quotients.iter().map(|q| q.profile.counts[i] as f64));
            table.push(row);
        }
        out.tables.push(table);
        out.plots.push(Plot::log_log(
            "quotient_profiles",
            "covering profiles of the quotients",
            "rho",
            "N(pi(A), rho)",
            rep.quotients
                .iter()
                .map(|q| Series {
                    label: format!("G/{}", q.subgroup),
                    points: q.profile.rhos.iter().zip(&q.profile.counts).map(|(r, n)| (*r, *n as f64)).collect(),
                })
                .collect(),
        ));
    }
    out.plots.push(Plot::bars("ratio", "tripling ratio", "N(AAA)/N(A)", vec![("AP".into(), rep.ratio), ("3^d * 8".into(), bound)]));
    Ok(())
}

fn growth_su2(r: &Resolved, out: &mut Outcome) -> Result<()> {
    let (n, delta, radius) = (r.p.points.unwrap(), r.p.delta.unwrap(), r.p.r.unwrap());
    let mut rng = r.seed_rng();
    let pts: Vec<Vec<f64>> = (0..n).map(|_| Backend::Su2.sample_algebra_ball(&mut rng, radius)).collect();
    let a = DeltaSet::snap(pts.iter().map(|p| p.as_slice()), delta, Ambient::Group(Backend::Su2))?;
    let budget = r.budget();
    let mut table = Table::new("power_growth", &["k", "points", "covering"]);
    let mut bars = Vec::new();
    let n_a = a.covering_number(delta)? as f64;
    let mut n_k = n_a;
    for k in 1..=3 {
        let ak = k_fold(&a, k, &budget)?;
        if ak.truncated() {
            out.truncated.push(format!("A^{k}"));
        }
        n_k = ak.covering_number(delta)? as f64;
        table.push(vec![k as f64, ak.len() as f64, n_k]);
        bars.push((format!("A^{k}"), n_k));
    }
    out.metric("n_a", n_a, "cells of side delta/sqrt(3)", "informational");
    out.metric("n_aaa", n_k, "cells of side delta/sqrt(3)", "informational");
    out.metric("ratio", n_k / n_a, "N(AAA)/N(A)", "diagnostic; compare with the progression ratios");
    out.tables.push(table);
    out.plots.push(Plot::bars("power_growth", "growth of a random set in SU(2)", "covering number", bars));
    Ok(())
}

fn sum_product_generate(r: &Resolved, out: &mut Outcome) -> Result<()> {
    let b = r.backend.expect("defaulted");
    let (s, delta, n, radius) = (r.p.s.unwrap(), r.p.delta.unwrap(), r.p.points.unwrap(), r.p.r.unwrap());
    let (action, xdim) = match b {
        Backend::Su2 => (ModuleAction::Adjoint, 3),
        _ => (ModuleAction::Scalar, 2),
    };
    let mut rng = r.seed_rng();
    let apts: Vec<Vec<f64>> = (0..n).map(|_| sample_ball(&mut rng, b.dim(), radius)).collect();
    let xpts: Vec<Vec<f64>> = (0..n).map(|_| sample_ball(&mut rng, xdim, radius)).collect();
    let a = DeltaSet::snap(apts.iter().map(|p| p.as_slice()), delta, Ambient::Group(b))?;
    let x = DeltaSet::snap(xpts.iter().map(|p| p.as_slice()), delta, Ambient::Vector(xdim))?;
    let budget = r.budget();
    let mut table = Table::new("generated", &["s", "points", "covering", "ball_coverage"]);
    let mut bars = Vec::new();
    for level in 1..=s {
        let g = generate_bracket(&a, &x, level, action, &budget)?;
        if g.truncated() {
            out.truncated.push(format!("s={level}"));
        }
        let cov = ball_coverage(&g, radius)?;
        table.push(vec![level as f64, g.len() as f64, g.covering_number(delta)? as f64, cov]);
        bars.push((format!("s={level}"), cov));
        if level == s {
            out.metric("points", g.len() as f64, "count", "informational");
            out.metric("ball_coverage", cov, "fraction of grid points of B(0, r)", "informational");
        }
    }
    out.tables.push(table);
    out.plots.push(Plot::bars("ball_coverage", "coverage of B(0, r) by <A, X>_s", "fraction", bars));
    Ok(())
}

fn coverage(r: &Resolved, out: &mut Outcome) -> Result<()> {
    let (rho, k, delta, samples) = (r.p.rho.unwrap(), r.p.k.unwrap(), r.p.delta.unwrap(), r.p.samples.unwrap());
    let rep = commutator_coverage(rho, k, delta)?;
    out.metric("c", rep.c, "fraction of rho^2", "largest scanned c with full coverage");
    out.metric("fraction", rep.fraction, "fraction of central grid points", "expected 1 for k >= 1");
    let b = Backend::Heisenberg3;
    let mut rng = r.seed_rng();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let t: f64 = rng.gen_range(-1.0..1.0);
        let g = b.exp(&[t, 0.0, 0.0])?;
        let h = b.exp(&[0.0, t, 0.0])?;
        let c = g.mul(&h).mul(&g.inv()).mul(&h.inv());
        worst = worst.max(b.dist(&c, &b.exp(&[0.0, 0.0, t * t])?)?);
    }
    out.metric("commutator_identity_error", worst, "chart distance", "expected <= 1e-12");
    let mut table = Table::new("coverage_scan", &["c", "fraction"]);
    for &(c, f) in &rep.scan {
        table.push(vec![c, f]);
    }
    out.tables.push(table);
    out.plots.push(Plot::bars(
        "coverage_scan",
        &format!("central coverage, rho = {rho}, k = {k}"),
        "fraction",
        rep.scan.iter().map(|(c, f)| (format!("c={c}"), *f)).collect(),
    ));
    Ok(())
}

fn linearize_demo(r: &Resolved, out: &mut Outcome) -> Result<()> {
    let (delta, rho1, rho2, noise, seed) = (r.p.delta.unwrap(), r.p.rho.unwrap(), r.p.r.unwrap(), r.p.noise.unwrap(), r.p.seed.unwrap());
    let mut rng = r.seed_rng();
    let mut phi0 = [[0.0; 2]; 2];
    for row in &mut phi0 {
        for v in row.iter_mut() {
            *v = rng.gen_range(-2.0..2.0);
        }
    }
    // Per-point noise of norm at most `noise`, a function of the grid point
    // and the seed only.
    let wobble = move |x: &[f64]| -> [f64; 2] {
        let key = ((x[0] / delta).round() as i64).wrapping_mul(0x9E37_79B9) ^ ((x[1] / delta).round() as i64);
        let mut prng = ChaCha8Rng::seed_from_u64(key as u64 ^ seed);
        let (t, m): (f64, f64) = (prng.gen_range(0.0..std::f64::consts::TAU), noise * prng.gen_range(0.0..1.0));
        [m * t.cos(), m * t.sin()]
    };
    let sigma = SampledMap::from_fn(2, 2, delta, rho1, rho2, |x| {
        let w = wobble(x);
        (0..2).map(|i| phi0[i][0] * x[0] + phi0[i][1] * x[1] + w[i]).collect()
    })?;
    let lin = linearize::<f64>(&sigma)?;
    let bound = 10.0 * sigma.error_scale();
    out.metric("sup_error", lin.sup_error, "sup norm", &format!("expected <= 10 (log2(1/delta) + 1) rho1 = {bound}"));
    out.metric("constant", lin.constant, "sup_error / ((log2(1/delta) + 1) rho1)", "expected <= 10");
    out.metric("continuity_defect", lin.hypotheses.continuity_defect, "sup norm", &format!("hypothesis <= {rho1}"));
    out.metric("additivity_defect", lin.hypotheses.additivity_defect, "sup norm", &format!("hypothesis <= {rho1}"));
    let mut table = Table::new("recovered_map", &["row", "col", "recovered", "underlying"]);
    for (i, row) in phi0.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            table.push(vec![i as f64, j as f64, *lin.map.get(i, j), *v]);
        }
    }
    out.tables.push(table);

    // A noisy section of the projection R^2 + R -> R^2, recovered in exact
    // arithmetic under the constraint pi o phi = id.
    let section = SampledMap::from_fn(2, 3, delta, rho1, rho2, |x| {
        let w = wobble(x);
        vec![x[0], x[1], phi0[0][0] * x[0] + phi0[0][1] * x[1] + w[0]]
    })?;
    let one = || Rational::from_integer(1.into());
    let zero = || Rational::from_integer(0.into());
    let pi = LinearMap::from_rows(vec![vec![one(), zero(), zero()], vec![zero(), one(), zero()]])?;
    let psi = LinearMap::<Rational>::identity(2);
    let exact = linearize_constrained(&section, &pi, &psi)?;
    let residual = pi.compose(&exact.map)?.max_abs_diff(&psi)?;
    let residual = if num_traits::Zero::is_zero(&residual) { 0.0 } else { num_traits::ToPrimitive::to_f64(&residual).unwrap_or(f64::NAN) };
    out.metric("constraint_residual", residual, "max entry of pi o phi - psi, exact", "expected 0");
    out.metric("constrained_sup_error", exact.sup_error, "sup norm", &format!("expected <= {bound}"));
    out.plots.push(Plot::bars(
        "recovery_error",
        "almost-additive recovery",
        "sup norm",
        vec![("unconstrained".into(), lin.sup_error), ("constrained".into(), exact.sup_error), ("bound".into(), bound)],
    ));
    Ok(())
}
