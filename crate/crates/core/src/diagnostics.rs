//! Regularity diagnostics for weights on the circle.
//!
//! Every supremum is taken over an explicit [`IntervalFamily`] and is therefore
//! a lower bound for the continuum quantity. Integrals use plain `dx` on
//! `[0, 2π)` except in [`verify_llogl_lp_bound`], which normalises to `dx/2π`.

use std::collections::BTreeMap;
use std::f64::consts::{E, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maximal::{self, IntervalStats};
use crate::riesz::IndexPolicy;
use crate::sampled::SampledFunction;
use crate::sum::{self, Compensated};

/// How the weight was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightProvenance {
    /// `None` for weights that do not come from a Riesz construction.
    pub epsilon: Option<f64>,
    pub selected_indices: Vec<usize>,
    /// Per level, whether the index was capped at the grid resolution.
    pub saturated: Vec<bool>,
    pub grid: usize,
    pub index_policy: Option<IndexPolicy>,
    pub norm_convention: String,
}

impl WeightProvenance {
    pub const PLAIN_DX: &'static str = "dx";

    pub fn synthetic(grid: usize) -> Self {
        Self {
            epsilon: None,
            selected_indices: Vec::new(),
            saturated: Vec::new(),
            grid,
            index_policy: None,
            norm_convention: Self::PLAIN_DX.into(),
        }
    }

    /// Truncation `K` of the series.
    pub fn terms(&self) -> usize {
        self.selected_indices.len()
    }
}

/// A non-negative weight `ω^t` together with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightBundle {
    omega: SampledFunction,
    t: f64,
    provenance: WeightProvenance,
}

impl WeightBundle {
    pub fn new(omega: SampledFunction, t: f64, provenance: WeightProvenance) -> Result<Self> {
        maximal::check_exponent(t)?;
        if provenance.grid != omega.grid_size() {
            return Err(Error::GridMismatch { expected: provenance.grid, found: omega.grid_size() });
        }
        if let Some(i) = omega.values().iter().position(|&v| v < 0.0) {
            return Err(Error::invalid("omega", format!("negative sample at index {i}")));
        }
        Ok(Self { omega, t, provenance })
    }

    /// Wraps an arbitrary weight with synthetic provenance and `t = 1`.
    pub fn from_weight(omega: SampledFunction) -> Result<Self> {
        let grid = omega.grid_size();
        Self::new(omega, 1.0, WeightProvenance::synthetic(grid))
    }

    pub fn omega(&self) -> &SampledFunction {
        &self.omega
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn provenance(&self) -> &WeightProvenance {
        &self.provenance
    }

    pub fn grid_size(&self) -> usize {
        self.omega.grid_size()
    }
}

/// Intervals over which suprema are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntervalFamily {
    /// Every wrapped run of `1..G` samples. The full circle is excluded.
    All,
    /// Runs of `G/3^k` samples for every `k >= 1` with `3^k | G`, starting at
    /// multiples of the length and at those multiples shifted by half a length.
    Triadic,
}

/// Largest grid for which [`IntervalFamily::auto`] picks [`IntervalFamily::All`].
pub const ALL_INTERVALS_LIMIT: usize = 2 * 3usize.pow(8);

impl IntervalFamily {
    pub fn auto(grid: usize) -> Self {
        if grid <= ALL_INTERVALS_LIMIT {
            IntervalFamily::All
        } else {
            IntervalFamily::Triadic
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            IntervalFamily::All => "all",
            IntervalFamily::Triadic => "triadic",
        }
    }

    /// `(start, len)` pairs of the triadic family.
    fn triadic(grid: usize) -> Result<Vec<(usize, usize)>> {
        let mut out = Vec::new();
        let mut len = grid;
        while len.is_multiple_of(3) {
            len /= 3;
            let half = len / 2;
            for j in 0..grid / len {
                out.push((j * len, len));
                if half > 0 {
                    out.push((j * len + half, len));
                }
            }
        }
        if out.is_empty() {
            return Err(Error::MisalignedGrid { grid, scale: 1 });
        }
        Ok(out)
    }
}

fn max_len_all(grid: usize) -> usize {
    (grid - 1).max(1)
}

/// Supremum of `eval(start, len)` over the family; NaN values are skipped.
fn sup_over<F>(family: IntervalFamily, grid: usize, eval: F) -> Result<f64>
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let sup = match family {
        IntervalFamily::All => {
            let lmax = max_len_all(grid);
            (0..grid)
                .into_par_iter()
                .map(|s| (1..=lmax).map(|len| eval(s, len)).fold(f64::NEG_INFINITY, f64::max))
                .reduce(|| f64::NEG_INFINITY, f64::max)
        }
        IntervalFamily::Triadic => IntervalFamily::triadic(grid)?
            .into_par_iter()
            .map(|(s, len)| eval(s, len))
            .reduce(|| f64::NEG_INFINITY, f64::max),
    };
    Ok(sup)
}

/// Largest `k` with `3^k | G`.
pub fn triadic_depth(grid: usize) -> u32 {
    let mut k = 0;
    let mut g = grid;
    while g > 0 && g.is_multiple_of(3) {
        g /= 3;
        k += 1;
    }
    k
}

pub(crate) fn check_alignment(grid: usize, max_scale: u32) -> Result<()> {
    if max_scale == 0 || triadic_depth(grid) < max_scale {
        return Err(Error::MisalignedGrid { grid, scale: max_scale });
    }
    Ok(())
}

/// Largest two-sided ratio between consecutive aligned blocks of `G/3^k` cells,
/// for `k = 1..=max_scale`. `block_mass(start, len)` gives the mass of a block.
pub(crate) fn adjacent_ratios(
    grid: usize,
    max_scale: u32,
    block_mass: impl Fn(usize, usize) -> f64,
) -> Result<BTreeMap<u32, f64>> {
    check_alignment(grid, max_scale)?;
    let mut out = BTreeMap::new();
    for k in 1..=max_scale {
        let count = 3usize.pow(k);
        let len = grid / count;
        let masses: Vec<f64> = (0..count).map(|j| block_mass(j * len, len)).collect();
        let mut worst: f64 = 1.0;
        for j in 0..count {
            let (a, b) = (masses[j], masses[(j + 1) % count]);
            let r = if a == b {
                1.0
            } else if a == 0.0 || b == 0.0 {
                f64::INFINITY
            } else {
                (a / b).max(b / a)
            };
            worst = worst.max(r);
        }
        out.insert(k, worst);
    }
    Ok(out)
}

/// Per triadic scale `k`, the largest `∫_{I*} ω / ∫_I ω` (or its reciprocal)
/// over adjacent blocks of length `2π/3^k`.
pub fn doubling_constant(w: &WeightBundle, max_scale: u32) -> Result<BTreeMap<u32, f64>> {
    let stats = IntervalStats::from_values(w.omega.values());
    adjacent_ratios(w.grid_size(), max_scale, |s, len| stats.window_sum(s, len))
}

/// `sup_I (mean_I ω)(mean_I ω^{-1/(p-1)})^{p-1}`; `+∞` if `ω` has a zero sample.
pub fn ap_characteristic(w: &WeightBundle, p: f64, family: IntervalFamily) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::invalid("p", format!("must exceed 1, got {p}")));
    }
    let omega = w.omega.values();
    if omega.contains(&0.0) {
        return Ok(f64::INFINITY);
    }
    let q = -1.0 / (p - 1.0);
    let dual: Vec<f64> = omega.iter().map(|&v| v.powf(q)).collect();
    let direct = IntervalStats::from_values(omega);
    let dual = IntervalStats::from_values(&dual);
    sup_over(family, w.grid_size(), |s, len| direct.window_mean(s, len) * dual.window_mean(s, len).powf(p - 1.0))
}

/// `max_i M(ω)(x_i) / ω(x_i)`; `+∞` if `ω` has a zero sample.
pub fn a1_characteristic(w: &WeightBundle) -> Result<f64> {
    let omega = w.omega.values();
    if omega.contains(&0.0) {
        return Ok(f64::INFINITY);
    }
    let m = maximal::maximal_fast(&w.omega)?;
    Ok(m.values.values().iter().zip(omega).map(|(a, b)| a / b).fold(1.0, f64::max))
}

/// `sup_I mean_I |f - mean_I f|`.
pub fn bmo_norm(f: &SampledFunction, family: IntervalFamily) -> Result<f64> {
    let g = f.grid_size();
    let v = f.values();
    let stats = IntervalStats::from_values(v);
    let sup = match family {
        IntervalFamily::All => bmo_all(v, &stats),
        IntervalFamily::Triadic => sup_over(family, g, |s, len| {
            let mu = stats.window_mean(s, len);
            let mut acc = Compensated::new();
            for k in 0..len {
                acc.add((v[(s + k) % g] - mu).abs());
            }
            acc.value() / len as f64
        })?,
    };
    Ok(sup.max(0.0))
}

/// Exhaustive BMO scan in `O(G² log G)`: per start, a Fenwick tree over value
/// ranks answers the split of the window at its mean.
fn bmo_all(v: &[f64], stats: &IntervalStats) -> f64 {
    let g = v.len();
    let lmax = max_len_all(g);
    let mut order: Vec<usize> = (0..g).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b)));
    let mut rank = vec![0; g];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let sorted: Vec<f64> = order.iter().map(|&i| v[i]).collect();

    (0..g)
        .into_par_iter()
        .map(|s| {
            let mut count = vec![0u32; g + 1];
            let mut mass = vec![0.0f64; g + 1];
            let mut best: f64 = 0.0;
            for len in 1..=lmax {
                let i = (s + len - 1) % g;
                let mut r = rank[i] + 1;
                while r <= g {
                    count[r] += 1;
                    mass[r] += v[i];
                    r += r & r.wrapping_neg();
                }
                let total = stats.window_sum(s, len);
                let mu = total / len as f64;
                let cut = sorted.partition_point(|&x| x <= mu);
                let (mut c_lo, mut m_lo) = (0u32, 0.0);
                let mut r = cut;
                while r > 0 {
                    c_lo += count[r];
                    m_lo += mass[r];
                    r &= r - 1;
                }
                let c_lo = c_lo as f64;
                let dev = (mu * c_lo - m_lo) + ((total - m_lo) - mu * (len as f64 - c_lo));
                best = best.max(dev / len as f64);
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// For each `δ`, `sup_I (mean_I ω^{1+δ})^{1/(1+δ)} / mean_I ω`.
pub fn reverse_holder_probe(w: &WeightBundle, deltas: &[f64], family: IntervalFamily) -> Result<Vec<(f64, f64)>> {
    let omega = w.omega.values();
    let direct = IntervalStats::from_values(omega);
    deltas
        .iter()
        .map(|&delta| {
            if !(delta > 0.0) {
                return Err(Error::invalid("delta", format!("must be positive, got {delta}")));
            }
            let q = 1.0 + delta;
            let lifted: Vec<f64> = omega.iter().map(|&v| v.powf(q)).collect();
            let lifted = IntervalStats::from_values(&lifted);
            let sup = sup_over(family, w.grid_size(), |s, len| {
                let m = direct.window_mean(s, len);
                if m > 0.0 {
                    lifted.window_mean(s, len).powf(1.0 / q) / m
                } else {
                    f64::NAN
                }
            })?;
            Ok((delta, sup.max(1.0)))
        })
        .collect()
}

/// `m(t) = |{x : |f(x)| > t}|` on a set of thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionFunction {
    pub thresholds: Vec<f64>,
    pub masses: Vec<f64>,
}

/// Sorted absolute values, for repeated distribution queries.
struct Levels {
    sorted: Vec<f64>,
}

impl Levels {
    fn new(f: &SampledFunction) -> Self {
        let mut sorted: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
        sorted.sort_by(f64::total_cmp);
        Self { sorted }
    }

    fn mass_above(&self, t: f64) -> f64 {
        let n = self.sorted.len();
        let above = n - self.sorted.partition_point(|&x| x <= t);
        TAU * above as f64 / n as f64
    }

    fn max(&self) -> f64 {
        *self.sorted.last().expect("non-empty")
    }
}

pub fn distribution_function(f: &SampledFunction, thresholds: &[f64]) -> Result<DistributionFunction> {
    if thresholds.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::invalid("thresholds", "must be sorted ascending"));
    }
    let levels = Levels::new(f);
    Ok(DistributionFunction {
        thresholds: thresholds.to_vec(),
        masses: thresholds.iter().map(|&t| levels.mass_above(t)).collect(),
    })
}

/// Increasing functions for the layer-cake identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psi {
    /// `t^p`
    Power(f64),
    /// `t log(e + t)`
    LLogL,
}

impl Psi {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Psi::Power(p) => t.powf(p),
            Psi::LLogL => t * (E + t).ln(),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            Psi::Power(p) => p * t.powf(p - 1.0),
            Psi::LLogL => (E + t).ln() + t / (E + t),
        }
    }
}

/// Thresholds used by [`layer_cake_check`].
pub const LAYER_CAKE_THRESHOLDS: usize = 1 << 14;

/// Returns `(∫ ψ(|f|) dx, ∫_0^∞ ψ'(t) m(t) dt)`, the first by the grid rule and
/// the second by the midpoint rule over thresholds in `[0, max |f|]`.
pub fn layer_cake_check(f: &SampledFunction, psi: Psi) -> (f64, f64) {
    let lhs = TAU * sum::mean_by(f.values(), |v| psi.value(v.abs()));
    let levels = Levels::new(f);
    let top = levels.max();
    if top == 0.0 {
        return (lhs, 0.0);
    }
    let n = LAYER_CAKE_THRESHOLDS;
    let h = top / n as f64;
    let rhs = h * sum::sum((0..n).map(|j| {
        let t = (j as f64 + 0.5) * h;
        psi.derivative(t) * levels.mass_above(t)
    }));
    (lhs, rhs)
}

/// Empirical constant of the `L log L` versus `L^p` bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlogLBound {
    pub p: f64,
    /// `‖f‖_p` after normalising `‖f‖_1 = 1`, both under `dx/2π`.
    pub lp_norm: f64,
    /// `∫ f log(e + f) dx/2π` after normalisation.
    pub llogl: f64,
    /// `llogl · (p-1)² / log ‖f‖_p`.
    pub ratio: f64,
    pub measure: String,
}

/// Normalises `f` to unit mean and reports the ratio bounded by the
/// `L log L` versus `L^p` inequality. Requires `‖f‖_p >= 2` after normalisation.
pub fn verify_llogl_lp_bound(f: &SampledFunction, p: f64) -> Result<LlogLBound> {
    if !(p > 1.0) {
        return Err(Error::invalid("p", format!("must exceed 1, got {p}")));
    }
    if let Some(i) = f.values().iter().position(|&v| v < 0.0) {
        return Err(Error::invalid("f", format!("negative sample at index {i}")));
    }
    let mean = f.mean();
    if !(mean > 0.0) {
        return Err(Error::invalid("f", "must have positive mass"));
    }
    let lp_norm = sum::mean_by(f.values(), |v| (v / mean).powf(p)).powf(1.0 / p);
    if lp_norm < 2.0 {
        return Err(Error::HypothesisNotMet { norm: lp_norm });
    }
    let llogl = sum::mean_by(f.values(), |v| {
        let g = v / mean;
        g * (E + g).ln()
    });
    Ok(LlogLBound { p, lp_norm, llogl, ratio: llogl * (p - 1.0).powi(2) / lp_norm.ln(), measure: "dx/2pi".into() })
}

/// Settings for [`DiagnosticsReport::compute`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsOptions {
    /// Defaults to the deepest triadic scale of the grid.
    pub max_scale: Option<u32>,
    pub p_values: Vec<f64>,
    pub deltas: Vec<f64>,
    pub norm_exponents: Vec<f64>,
    /// Defaults to [`IntervalFamily::auto`].
    pub family: Option<IntervalFamily>,
    /// Family for the BMO norm; defaults to [`IntervalFamily::Triadic`] above
    /// [`BMO_ALL_LIMIT`] samples and to [`IntervalFamily::All`] below.
    pub bmo_family: Option<IntervalFamily>,
}

/// Largest grid on which the BMO norm defaults to the exhaustive family.
pub const BMO_ALL_LIMIT: usize = 2 * 3usize.pow(6);

impl Default for DiagnosticsOptions {
    fn default() -> Self {
        Self {
            max_scale: None,
            p_values: vec![1.5, 2.0, 3.0],
            deltas: vec![0.25, 0.5],
            norm_exponents: vec![1.0, 1.5, 2.0],
            family: None,
            bmo_family: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub family: IntervalFamily,
    pub bmo_family: IntervalFamily,
    pub doubling_by_scale: BTreeMap<u32, f64>,
    pub ap_char: Vec<(f64, f64)>,
    pub a1_char: f64,
    /// `bmo_norm(log ω)`; `+∞` if `ω` has a zero sample.
    pub bmo_lognorm: f64,
    pub rh_probe: Vec<(f64, f64)>,
    pub norm_table: Vec<(f64, f64)>,
}

impl DiagnosticsReport {
    pub fn compute(w: &WeightBundle, options: &DiagnosticsOptions) -> Result<Self> {
        let grid = w.grid_size();
        let family = options.family.unwrap_or(IntervalFamily::auto(grid));
        let bmo_family = options.bmo_family.unwrap_or(if grid <= BMO_ALL_LIMIT {
            IntervalFamily::All
        } else {
            IntervalFamily::Triadic
        });
        let max_scale = options.max_scale.unwrap_or(triadic_depth(grid));
        let doubling_by_scale = if max_scale == 0 { BTreeMap::new() } else { doubling_constant(w, max_scale)? };
        let ap_char =
            options.p_values.iter().map(|&p| Ok((p, ap_characteristic(w, p, family)?))).collect::<Result<_>>()?;
        let bmo_lognorm =
            if w.omega.values().contains(&0.0) { f64::INFINITY } else { bmo_norm(&w.omega.ln()?, bmo_family)? };
        Ok(Self {
            family,
            bmo_family,
            doubling_by_scale,
            ap_char,
            a1_char: a1_characteristic(w)?,
            bmo_lognorm,
            rh_probe: reverse_holder_probe(w, &options.deltas, family)?,
            norm_table: options.norm_exponents.iter().map(|&p| (p, crate::riesz::lp_norm(&w.omega, p))).collect(),
        })
    }

    /// Flat `key -> number` view; keys are stable and sort lexicographically.
    pub fn entries(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        for (k, v) in &self.doubling_by_scale {
            out.push((format!("doubling.k{k}"), *v));
        }
        for (p, v) in &self.ap_char {
            out.push((format!("ap.p{p}"), *v));
        }
        out.push(("a1".into(), self.a1_char));
        out.push(("bmo_log".into(), self.bmo_lognorm));
        for (d, v) in &self.rh_probe {
            out.push((format!("rh.d{d}"), *v));
        }
        for (p, v) in &self.norm_table {
            out.push((format!("norm.p{p}"), *v));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bundle(f: SampledFunction) -> WeightBundle {
        WeightBundle::from_weight(f).unwrap()
    }

    fn ones(g: usize) -> WeightBundle {
        bundle(SampledFunction::constant(g, 1.0).unwrap())
    }

    #[test]
    fn constant_weight_is_perfect() {
        let w = ones(54);
        assert!(doubling_constant(&w, 3).unwrap().values().all(|&r| r == 1.0));
        for family in [IntervalFamily::All, IntervalFamily::Triadic] {
            assert_eq!(ap_characteristic(&w, 2.0, family).unwrap(), 1.0);
            for (_, v) in reverse_holder_probe(&w, &[0.25, 1.0], family).unwrap() {
                assert!((v - 1.0).abs() < 1e-15);
            }
            assert_eq!(bmo_norm(w.omega(), family).unwrap(), 0.0);
        }
        assert_eq!(a1_characteristic(&w).unwrap(), 1.0);
    }

    #[test]
    fn zero_sample_reports_infinity() {
        let w = bundle(SampledFunction::new(vec![1.0, 0.0, 2.0]).unwrap());
        assert_eq!(ap_characteristic(&w, 2.0, IntervalFamily::All).unwrap(), f64::INFINITY);
        assert_eq!(a1_characteristic(&w).unwrap(), f64::INFINITY);
    }

    #[test]
    fn misaligned_grids_are_rejected() {
        let w = ones(20);
        assert!(matches!(doubling_constant(&w, 1), Err(Error::MisalignedGrid { .. })));
        assert!(matches!(doubling_constant(&ones(18), 3), Err(Error::MisalignedGrid { .. })));
        assert!(bmo_norm(w.omega(), IntervalFamily::Triadic).is_err());
    }

    #[test]
    fn triadic_family_layout() {
        let fam = IntervalFamily::triadic(18).unwrap();
        assert!(fam.contains(&(0, 6)) && fam.contains(&(3, 6)) && fam.contains(&(12, 6)));
        assert!(fam.contains(&(16, 2)) && fam.contains(&(17, 2)));
        assert_eq!(fam.len(), 6 + 18);
    }

    fn bmo_oracle(v: &[f64]) -> f64 {
        let g = v.len();
        let mut best: f64 = 0.0;
        for s in 0..g {
            for len in 1..g {
                let w: Vec<f64> = (0..len).map(|k| v[(s + k) % g]).collect();
                let mu = w.iter().sum::<f64>() / len as f64;
                best = best.max(w.iter().map(|x| (x - mu).abs()).sum::<f64>() / len as f64);
            }
        }
        best
    }

    #[test]
    fn exhaustive_bmo_matches_oracle() {
        let f = SampledFunction::from_fn(729, |x| (2.0 + x.cos()).ln()).unwrap();
        let fast = bmo_norm(&f, IntervalFamily::All).unwrap();
        assert!((fast - bmo_oracle(f.values())).abs() < 1e-12, "{fast}");
    }

    #[test]
    fn ap_matches_oracle() {
        let g = 729;
        let f = SampledFunction::from_fn(g, |x| 2.0 + x.cos()).unwrap();
        let v = f.values();
        let mut oracle: f64 = 0.0;
        for s in 0..g {
            let (mut a, mut b) = (0.0, 0.0);
            for len in 1..g {
                a += v[(s + len - 1) % g];
                b += 1.0 / v[(s + len - 1) % g];
                oracle = oracle.max(a * b / (len * len) as f64);
            }
        }
        let got = ap_characteristic(&bundle(f), 2.0, IntervalFamily::All).unwrap();
        assert!((got - oracle).abs() < 1e-12 * oracle);
    }

    #[test]
    fn distribution_examples() {
        let one = SampledFunction::constant(10, 1.0).unwrap();
        let d = distribution_function(&one, &[0.5, 1.5]).unwrap();
        assert_eq!(d.masses, vec![TAU, 0.0]);
        assert!(distribution_function(&one, &[1.0, 0.5]).is_err());
    }

    #[test]
    fn layer_cake_trivial_cases() {
        let one = SampledFunction::constant(10, 1.0).unwrap();
        let (l, r) = layer_cake_check(&one, Psi::Power(2.0));
        assert!((l - TAU).abs() < 1e-14 && (r - TAU).abs() < 1e-12, "{l} {r}");
        let zero = SampledFunction::constant(10, 0.0).unwrap();
        assert_eq!(layer_cake_check(&zero, Psi::LLogL), (0.0, 0.0));
    }

    #[test]
    fn llogl_bound_gates_hypothesis() {
        let one = SampledFunction::constant(10, 3.0).unwrap();
        assert!(matches!(verify_llogl_lp_bound(&one, 1.5), Err(Error::HypothesisNotMet { .. })));
        let mut spike = vec![0.0; 100];
        spike[0] = 1.0;
        let r = verify_llogl_lp_bound(&SampledFunction::new(spike).unwrap(), 1.5).unwrap();
        assert!((r.lp_norm - 100f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert_eq!(r.measure, "dx/2pi");
    }

    fn positive_vec() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.1f64..10.0, 27..=27)
    }

    proptest! {
        #[test]
        fn ap_nonincreasing_in_p(v in positive_vec()) {
            let w = bundle(SampledFunction::new(v).unwrap());
            let a2 = ap_characteristic(&w, 2.0, IntervalFamily::All).unwrap();
            let a3 = ap_characteristic(&w, 3.0, IntervalFamily::All).unwrap();
            prop_assert!(a3 <= a2 * (1.0 + 1e-12));
            prop_assert!(a2 >= 1.0 - 1e-12);
        }

        #[test]
        fn a1_at_least_one(v in positive_vec()) {
            let w = bundle(SampledFunction::new(v).unwrap());
            prop_assert!(a1_characteristic(&w).unwrap() >= 1.0);
        }

        #[test]
        fn bmo_translation_and_scaling(v in prop::collection::vec(-5.0f64..5.0, 2..40), c in -4.0f64..4.0) {
            let f = SampledFunction::new(v).unwrap();
            let base = bmo_norm(&f, IntervalFamily::All).unwrap();
            let shifted = bmo_norm(&f.map(|x| x + c).unwrap(), IntervalFamily::All).unwrap();
            let scaled = bmo_norm(&f.map(|x| c * x).unwrap(), IntervalFamily::All).unwrap();
            prop_assert!((shifted - base).abs() <= 1e-12 * (1.0 + base));
            prop_assert!((scaled - c.abs() * base).abs() <= 1e-12 * (1.0 + base));
        }

        #[test]
        fn chebychev_holds(v in prop::collection::vec(-10.0f64..10.0, 1..200)) {
            let f = SampledFunction::new(v).unwrap();
            let norm = crate::riesz::lp_norm(&f, 2.0);
            let ts: Vec<f64> = (1..50).map(|k| k as f64 * 0.25).collect();
            let d = distribution_function(&f, &ts).unwrap();
            for (t, m) in d.thresholds.iter().zip(&d.masses) {
                prop_assert!(*m <= norm * norm / (t * t) * (1.0 + 1e-12));
            }
            prop_assert!(d.masses.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
