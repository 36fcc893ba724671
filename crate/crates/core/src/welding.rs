//! Circle homeomorphisms `h_t(e^{ix}) = e^{i g_t(x)}` with `g_t' ∝ ω^t`.

use std::f64::consts::TAU;

use crate::diagnostics::{self, WeightBundle};
use crate::error::{Error, Result};
use crate::maximal::check_exponent;
use crate::sampled::{grid_point, SampledFunction};
use crate::sum::Compensated;

#[derive(Debug, Clone, PartialEq)]
pub struct WeldingMap {
    t: f64,
    /// `g(x_k)` for `k = 0..=G`, with `g(x_0) = 0` and `g(x_G) = 2π`.
    g_values: Vec<f64>,
    /// `∫ ω^t dx` before rescaling.
    total_mass: f64,
}

impl WeldingMap {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn g_values(&self) -> &[f64] {
        &self.g_values
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn grid_size(&self) -> usize {
        self.g_values.len() - 1
    }

    /// `2π / ∫ ω^t dx`, the constant absorbed into `g_t'`.
    pub fn rescale(&self) -> f64 {
        TAU / self.total_mass
    }
}

/// Left-rectangle primitive of `ω^t` (with `ω` the bundle's weight), rescaled
/// to close up at `2π`.
pub fn build_welding(w: &WeightBundle, t: f64) -> Result<WeldingMap> {
    check_exponent(t)?;
    let omega = w.omega().values();
    let g = omega.len();
    let mut cumulative = Vec::with_capacity(g + 1);
    let mut acc = Compensated::new();
    cumulative.push(0.0);
    for &v in omega {
        acc.add(if t == 0.0 { 1.0 } else { v.powf(t) });
        cumulative.push(acc.value());
    }
    let total = cumulative[g];
    if !(total > 0.0) {
        return Err(Error::NonIncreasing { index: 0 });
    }
    let mut g_values: Vec<f64> = cumulative.iter().map(|&c| TAU * c / total).collect();
    g_values[g] = TAU;
    if let Some(index) = g_values.windows(2).position(|p| !(p[1] > p[0])) {
        return Err(Error::NonIncreasing { index });
    }
    Ok(WeldingMap { t, g_values, total_mass: TAU * (total / g as f64) })
}

/// Largest `|h(I)| / |h(I*)|` over adjacent aligned arcs of length `2π/3^k`,
/// `k = 1..=max_scale`, in both orders.
pub fn quasisymmetry_constant(m: &WeldingMap, max_scale: u32) -> Result<f64> {
    let g = &m.g_values;
    let ratios = diagnostics::adjacent_ratios(m.grid_size(), max_scale, |s, len| g[s + len] - g[s])?;
    Ok(ratios.values().copied().fold(1.0, f64::max))
}

/// `(log g_t', g_t(x) - x)` on the grid, i.e. the real and imaginary parts of
/// `log h_t'`.
pub fn log_derivative_parts(m: &WeldingMap, w: &WeightBundle) -> Result<(SampledFunction, SampledFunction)> {
    let grid = m.grid_size();
    if w.grid_size() != grid {
        return Err(Error::GridMismatch { expected: grid, found: w.grid_size() });
    }
    let shift = m.rescale().ln();
    let real =
        if m.t == 0.0 { SampledFunction::constant(grid, shift)? } else { w.omega().map(|v| m.t * v.ln() + shift)? };
    let imag = SampledFunction::new((0..grid).map(|k| m.g_values[k] - grid_point(k, grid)).collect())?;
    Ok((real, imag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{bmo_norm, IntervalFamily};
    use proptest::prelude::*;

    fn bundle(f: SampledFunction) -> WeightBundle {
        WeightBundle::from_weight(f).unwrap()
    }

    #[test]
    fn constant_weight_gives_identity() {
        let w = bundle(SampledFunction::constant(54, 1.0).unwrap());
        let m = build_welding(&w, 1.0).unwrap();
        for (k, &g) in m.g_values().iter().enumerate() {
            assert_eq!(g, grid_point(k, 54));
        }
        assert_eq!(m.total_mass(), TAU);
        assert!((quasisymmetry_constant(&m, 3).unwrap() - 1.0).abs() < 1e-12);
        let (re, im) = log_derivative_parts(&m, &w).unwrap();
        assert!(re.values().iter().all(|&v| v == 0.0));
        assert!(im.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_power_is_identity() {
        let w = bundle(SampledFunction::from_fn(27, |x| 2.0 + x.sin()).unwrap());
        let m = build_welding(&w, 0.0).unwrap();
        for (k, &g) in m.g_values().iter().enumerate() {
            assert_eq!(g, grid_point(k, 27));
        }
    }

    #[test]
    fn matches_closed_form() {
        let grid = 2 * 3usize.pow(6);
        let w = bundle(SampledFunction::from_fn(grid, |x| 2.0 + x.cos()).unwrap());
        let m = build_welding(&w, 1.0).unwrap();
        assert!((m.total_mass() - 2.0 * TAU).abs() < 1e-12);
        let h = TAU / grid as f64;
        for (k, &g) in m.g_values().iter().enumerate() {
            let x = grid_point(k, grid);
            // Left-rectangle rule has O(h) error against the antiderivative.
            let exact = TAU * (2.0 * x + x.sin()) / (4.0 * std::f64::consts::PI);
            assert!((g - exact).abs() < h, "k={k}");
        }
        assert_eq!(m.g_values()[grid], TAU);
    }

    #[test]
    fn vanishing_weight_is_rejected() {
        let w = bundle(SampledFunction::new(vec![1.0, 0.0, 1.0]).unwrap());
        assert!(matches!(build_welding(&w, 1.0), Err(Error::NonIncreasing { index: 1 })));
    }

    #[test]
    fn real_part_bmo_scales_with_t() {
        let w = bundle(SampledFunction::from_fn(81, |x| (3.0 + 2.0 * x.cos()).powi(2)).unwrap());
        let base = bmo_norm(&w.omega().ln().unwrap(), IntervalFamily::All).unwrap();
        for t in [0.25, 0.5, 1.0] {
            let m = build_welding(&w, t).unwrap();
            let (re, _) = log_derivative_parts(&m, &w).unwrap();
            let got = bmo_norm(&re, IntervalFamily::All).unwrap();
            assert!((got - t * base).abs() <= 1e-12 * base, "t={t}");
        }
    }

    proptest! {
        #[test]
        fn scale_invariant(v in prop::collection::vec(0.1f64..10.0, 1..60), e in -3i32..3) {
            let c = 2f64.powi(e);
            let a = build_welding(&bundle(SampledFunction::new(v.clone()).unwrap()), 0.7).unwrap();
            let scaled: Vec<f64> = v.iter().map(|x| x * c).collect();
            let b = build_welding(&bundle(SampledFunction::new(scaled).unwrap()), 1.0).unwrap();
            let a1 = build_welding(&bundle(SampledFunction::new(v).unwrap()), 1.0).unwrap();
            prop_assert_eq!(a1.g_values(), b.g_values());
            prop_assert!(a.g_values().windows(2).all(|p| p[1] > p[0]));
        }
    }
}
