//! Lacunary Riesz products and the density `f̃` built from them.
//!
//! `P_N(x) = ∏_{j=0}^{N} (1 + ε cos 3^j x)` is a non-negative trigonometric
//! polynomial of degree `(3^{N+1} - 1)/2` with mean one. Its `L^p` norms diverge
//! as `N → ∞` for every `p > 1`, which is what drives the index selection.

use std::f64::consts::{E, PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampled::SampledFunction;
use crate::sum;

/// Parameters of a partial Riesz product `P_level`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszSpec {
    epsilon: f64,
    level: usize,
}

impl RieszSpec {
    pub fn new(epsilon: f64, level: usize) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self { epsilon, level })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Trigonometric degree `(3^{level+1} - 1) / 2`.
    pub fn degree(&self) -> u128 {
        (pow3(self.level as u32 + 1) - 1) / 2
    }
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("epsilon", format!("must lie in (0, 1), got {epsilon}")))
    }
}

fn pow3(k: u32) -> u128 {
    3u128.pow(k)
}

/// Largest level whose product is integrated exactly on `grid` points,
/// i.e. the largest `N` with `3^{N+1} < G`.
pub fn max_resolved_level(grid: usize) -> Option<usize> {
    let mut level = None;
    let mut n = 0u32;
    while pow3(n + 1) < grid as u128 {
        level = Some(n as usize);
        n += 1;
    }
    level
}

/// The two-sided shift constant `exp(πε/(1-ε))`.
pub fn shift_bound(epsilon: f64) -> f64 {
    (PI * epsilon / (1.0 - epsilon)).exp()
}

/// `P_n(x)`, with `x` reduced modulo 2π.
///
/// The angles `3^j x` are formed by repeated tripling, so the result inherits
/// the `3^n` conditioning of the function itself. For samples on a grid use
/// [`sample_riesz`], which reduces angles in exact integer arithmetic.
pub fn eval_riesz_product(spec: &RieszSpec, x: f64) -> f64 {
    let mut angle = x.rem_euclid(TAU);
    let mut product = 1.0;
    for _ in 0..=spec.level {
        product *= 1.0 + spec.epsilon * angle.cos();
        angle = (3.0 * angle).rem_euclid(TAU);
    }
    product
}

/// `P_n` on the grid `2πi/G`.
pub fn sample_riesz(spec: &RieszSpec, grid: usize) -> Result<SampledFunction> {
    if grid == 0 {
        return Err(Error::EmptyGrid);
    }
    let g = grid as u128;
    let cosines: Vec<f64> = (0..grid).map(|k| crate::grid_point(k, grid).cos()).collect();
    let mut values = vec![1.0; grid];
    let mut frequency = 1u128 % g;
    for _ in 0..=spec.level {
        for (i, v) in values.iter_mut().enumerate() {
            let k = (frequency * i as u128 % g) as usize;
            *v *= 1.0 + spec.epsilon * cosines[k];
        }
        frequency = frequency * 3 % g;
    }
    SampledFunction::new(values)
}

/// Rectangle-rule `(∫_0^{2π} |f|^p dx)^{1/p}` with plain Lebesgue measure.
pub fn lp_norm(f: &SampledFunction, p: f64) -> f64 {
    if p == 1.0 {
        return TAU * sum::mean_by(f.values(), f64::abs);
    }
    (TAU * sum::mean_by(f.values(), |v| v.abs().powf(p))).powf(1.0 / p)
}

/// Rectangle-rule `∫_0^{2π} |f| log(e + |f|) dx`.
pub fn llogl_norm(f: &SampledFunction) -> f64 {
    TAU * sum::mean_by(f.values(), |v| {
        let a = v.abs();
        a * (E + a).ln()
    })
}

/// Computes `mean_x P_N(x)^p` for `N = 0, 1, 2, ...` without sampling `P_N`.
///
/// Writing `φ(x) = (1 + ε cos x)^p`, the substitution `y = 3x` gives
/// `∫ F(x) G(3x) dx = ∫ (LF)(y) G(y) dy` with the transfer operator
/// `(LF)(y) = (1/3) Σ_{q=0}^{2} F((y + 2πq)/3)`. Iterating `h ← L(h φ)` from
/// `h = 1` yields `mean(h) = mean(P_N^p)` after `N + 1` steps. Every iterate
/// is smooth, so it is carried on a fixed grid of `M` points and
/// interpolated to `3M` points spectrally.
pub struct PowerMeanRecursion {
    m: usize,
    weight: Vec<f64>,
    h: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    level: Option<usize>,
}

impl PowerMeanRecursion {
    pub const DEFAULT_POINTS: usize = 2048;

    pub fn new(epsilon: f64, p: f64) -> Result<Self> {
        Self::with_points(epsilon, p, Self::DEFAULT_POINTS)
    }

    pub fn with_points(epsilon: f64, p: f64, m: usize) -> Result<Self> {
        check_epsilon(epsilon)?;
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::invalid("p", format!("must be >= 1, got {p}")));
        }
        if m < 8 || !m.is_multiple_of(2) {
            return Err(Error::invalid("points", "must be even and at least 8"));
        }
        let fine = 3 * m;
        let weight = (0..fine).map(|i| (1.0 + epsilon * crate::grid_point(i, fine).cos()).powf(p)).collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            m,
            weight,
            h: vec![1.0; m],
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(fine),
            level: None,
        })
    }

    /// Advances one level and returns `mean(P_level^p)` for the new level.
    pub fn step(&mut self) -> f64 {
        let m = self.m;
        let fine = 3 * m;
        let mut spectrum: Vec<Complex64> = self.h.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut spectrum);

        let mut padded = vec![Complex64::new(0.0, 0.0); fine];
        let half = m / 2;
        padded[..half].copy_from_slice(&spectrum[..half]);
        for k in 1..half {
            padded[fine - k] = spectrum[m - k];
        }
        padded[half] = spectrum[half] * 0.5;
        padded[fine - half] = spectrum[half] * 0.5;
        self.inverse.process(&mut padded);

        let scale = 1.0 / m as f64;
        for i in 0..m {
            let folded = (0..3).map(|q| padded[i + q * m].re * scale * self.weight[i + q * m]).sum::<f64>();
            self.h[i] = folded / 3.0;
        }
        self.level = Some(self.level.map_or(0, |l| l + 1));
        sum::mean(&self.h)
    }

    /// Level reached by the last [`step`](Self::step), if any.
    pub fn level(&self) -> Option<usize> {
        self.level
    }
}

/// `‖P_N‖_p` (plain `dx`) for `N = 0..=max_level`, via [`PowerMeanRecursion`].
pub fn riesz_lp_norms(epsilon: f64, p: f64, max_level: usize) -> Result<Vec<f64>> {
    let mut recursion = PowerMeanRecursion::new(epsilon, p)?;
    Ok((0..=max_level).map(|_| (TAU * recursion.step()).powf(1.0 / p)).collect())
}

/// Outcome of the index search at one level `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexSelection {
    pub level: usize,
    pub index: usize,
    pub p: f64,
    pub threshold: f64,
    pub norm: f64,
    /// `‖P_N‖_p` for `N = 0..=index`.
    pub norms: Vec<f64>,
    /// Indices `N` at which `‖P_N‖_p < ‖P_{N-1}‖_p`.
    pub monotonicity_violations: Vec<usize>,
}

/// Smallest `N ≤ n_max` with `‖P_N‖_{p_n} ≥ 4^n`, where `p_n = 1 + 1/n`.
///
/// Norms use plain Lebesgue measure on `[0, 2π)` and are computed by the
/// transfer-operator recursion, so `N` is not limited by any sampling grid.
pub fn select_index(epsilon: f64, level: usize, n_max: usize) -> Result<IndexSelection> {
    if level == 0 {
        return Err(Error::invalid("n", "levels start at 1"));
    }
    let p = level_exponent(level);
    let threshold = level_threshold(level);
    let mut recursion = PowerMeanRecursion::new(epsilon, p)?;
    let mut norms = Vec::new();
    let mut violations = Vec::new();
    for index in 0..=n_max {
        let norm = (TAU * recursion.step()).powf(1.0 / p);
        if norms.last().is_some_and(|&prev| norm < prev) {
            violations.push(index);
        }
        norms.push(norm);
        if norm >= threshold {
            return Ok(IndexSelection { level, index, p, threshold, norm, norms, monotonicity_violations: violations });
        }
    }
    Err(Error::NotFound {
        level,
        n_max,
        p,
        threshold,
        best_norm: norms.iter().copied().fold(0.0, f64::max),
        hint: "raise the search bound N_max or epsilon".into(),
    })
}

/// `p_n = 1 + 1/n`.
pub fn level_exponent(level: usize) -> f64 {
    1.0 + 1.0 / level as f64
}

/// `4^n`.
pub fn level_threshold(level: usize) -> f64 {
    4f64.powi(level as i32)
}

/// How a level whose selected index the grid cannot resolve is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexPolicy {
    /// Search only resolvable indices; fail with `NotFound` otherwise.
    Strict,
    /// Replace an unresolvable index by the finest resolvable level.
    Saturate,
}

/// One entry of the selected-index table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedIndex {
    pub level: usize,
    pub index: usize,
    /// `‖P_index‖_{p_n}` under plain `dx`.
    pub norm: f64,
    /// True when `index` was capped at the grid resolution.
    pub saturated: bool,
}

/// Upper limit for searches that are not tied to a grid.
pub const LITERAL_SEARCH_LIMIT: usize = 4096;

/// Runs [`select_index`] for `n = 1..=terms`, restricted to levels that a grid
/// of `grid` points resolves exactly.
pub fn select_indices(epsilon: f64, terms: usize, grid: usize, policy: IndexPolicy) -> Result<Vec<SelectedIndex>> {
    if terms == 0 {
        return Err(Error::invalid("terms", "must be at least 1"));
    }
    let cap = max_resolved_level(grid).ok_or(Error::InsufficientGrid { index: 0, required: 3, actual: grid })?;
    let mut table = Vec::with_capacity(terms);
    for level in 1..=terms {
        match select_index(epsilon, level, cap) {
            Ok(sel) => table.push(SelectedIndex { level, index: sel.index, norm: sel.norm, saturated: false }),
            Err(Error::NotFound { .. }) if policy == IndexPolicy::Saturate => {
                let norm = *riesz_lp_norms(epsilon, level_exponent(level), cap)?.last().expect("non-empty");
                table.push(SelectedIndex { level, index: cap, norm, saturated: true });
            }
            Err(Error::NotFound { level, n_max, p, threshold, best_norm, .. }) => {
                let hint = match select_index(epsilon, level, LITERAL_SEARCH_LIMIT) {
                    Ok(sel) => format!(
                        "the threshold is first met at N={}, which needs a grid exponent of at least {}",
                        sel.index,
                        sel.index + 1
                    ),
                    Err(_) => format!("the threshold is not met for any N <= {LITERAL_SEARCH_LIMIT}; increase epsilon"),
                };
                return Err(Error::NotFound { level, n_max, p, threshold, best_norm, hint });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(table)
}

/// The truncated series `f̃ = Σ_{n=1}^{K} 2^{-n} P_{N_n} / ‖P_{N_n}‖_{L log L}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FtildeSpec {
    epsilon: f64,
    selected_indices: Vec<usize>,
}

impl FtildeSpec {
    pub fn new(epsilon: f64, selected_indices: Vec<usize>) -> Result<Self> {
        check_epsilon(epsilon)?;
        if selected_indices.is_empty() {
            return Err(Error::invalid("selected_indices", "at least one term is required"));
        }
        if selected_indices.contains(&0) {
            return Err(Error::invalid("selected_indices", "indices must be strictly positive"));
        }
        Ok(Self { epsilon, selected_indices })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Truncation `K`.
    pub fn terms(&self) -> usize {
        self.selected_indices.len()
    }

    pub fn selected_indices(&self) -> &[usize] {
        &self.selected_indices
    }

    /// `p_n = 1 + 1/n` for `n = 1..=K`.
    pub fn p_exponents(&self) -> Vec<f64> {
        (1..=self.terms()).map(level_exponent).collect()
    }
}

/// Samples `f̃` on `grid` points. Every `P_{N_n}` must be resolved exactly,
/// i.e. `G > 3^{N_n + 1}`.
pub fn build_ftilde(spec: &FtildeSpec, grid: usize) -> Result<SampledFunction> {
    if grid == 0 {
        return Err(Error::EmptyGrid);
    }
    let deepest = *spec.selected_indices.iter().max().expect("non-empty");
    let required = pow3(deepest as u32 + 1);
    if (grid as u128) <= required {
        return Err(Error::InsufficientGrid { index: deepest, required, actual: grid });
    }
    let mut acc = vec![0.0; grid];
    let mut weight = 1.0;
    for &index in &spec.selected_indices {
        weight *= 0.5;
        let term = sample_riesz(&RieszSpec::new(spec.epsilon, index)?, grid)?;
        let scale = weight / llogl_norm(&term);
        for (a, v) in acc.iter_mut().zip(term.values()) {
            *a += scale * v;
        }
    }
    SampledFunction::new(acc)
}
