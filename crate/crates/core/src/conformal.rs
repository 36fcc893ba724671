//! Boundary and disk probes for the curve `Γ̂` with `γ' = ω e^{ib}`, where
//! `b` is the conjugate function of `log ω`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::diagnostics::WeightBundle;
use crate::error::{Error, Result};
use crate::maximal::IntervalStats;
use crate::sampled::{grid_point, SampledFunction};
use crate::sum::{self, Compensated};

/// Discrete Fourier coefficients `c_k = (1/G) Σ_j f(x_j) e^{-ikx_j}`, stored in
/// transform order (`k = 0, 1, ..., G-1` with `k >= G/2` meaning `k - G`).
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    coefficients: Vec<Complex64>,
}

impl FourierSeries {
    pub fn of(f: &SampledFunction) -> Self {
        let g = f.grid_size();
        let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(g).process(&mut buf);
        let scale = 1.0 / g as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        Self { coefficients: buf }
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `c_k` for `k` in `-G/2..G/2`, extended periodically.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        let g = self.len() as i64;
        self.coefficients[k.rem_euclid(g) as usize]
    }

    /// Signed frequency of the coefficient at transform position `j`.
    pub fn frequency(&self, j: usize) -> i64 {
        let g = self.len();
        if j < g.div_ceil(2) {
            j as i64
        } else {
            j as i64 - g as i64
        }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Samples of the real part of the inverse transform.
    pub fn to_samples(&self) -> Result<SampledFunction> {
        let mut buf = self.coefficients.clone();
        FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
        SampledFunction::new(buf.iter().map(|c| c.re).collect())
    }
}

/// Boundary values of the harmonic conjugate with `v(0) = 0`: the multiplier
/// `-i sign(k)`, with the mean and the Nyquist term removed.
pub fn conjugate_function(f: &SampledFunction) -> Result<SampledFunction> {
    let g = f.grid_size();
    if !g.is_multiple_of(2) {
        return Err(Error::invalid("grid", format!("must be even, got {g}")));
    }
    let mut series = FourierSeries::of(f);
    for j in 0..g {
        let k = series.frequency(j);
        let c = &mut series.coefficients[j];
        *c = if k == 0 || j == g / 2 {
            Complex64::new(0.0, 0.0)
        } else {
            *c * Complex64::new(0.0, -(k.signum() as f64))
        };
    }
    series.to_samples()
}

/// `(1 - r²) / (1 - 2r cos θ + r²)`.
#[inline]
fn poisson_kernel(r: f64, theta: f64) -> f64 {
    (1.0 - r * r) / (1.0 - 2.0 * r * theta.cos() + r * r)
}

/// `P_r * f` at angle `phi`, by direct summation of the kernel sampled on the
/// grid and normalised to unit mass.
pub fn poisson_extension(f: &SampledFunction, r: f64, phi: f64) -> Result<f64> {
    check_radius(r)?;
    let g = f.grid_size();
    let mut num = Compensated::new();
    let mut den = Compensated::new();
    for (i, &v) in f.values().iter().enumerate() {
        let k = poisson_kernel(r, phi - grid_point(i, g));
        num.add(k * v);
        den.add(k);
    }
    Ok(num.value() / den.value())
}

fn check_radius(r: f64) -> Result<()> {
    if (0.0..1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::invalid("r", format!("must lie in [0, 1), got {r}")))
    }
}

fn positive_log(w: &WeightBundle) -> Result<SampledFunction> {
    if let Some(i) = w.omega().values().iter().position(|&v| !(v > 0.0)) {
        return Err(Error::invalid("omega", format!("must be positive, zero at index {i}")));
    }
    w.omega().ln()
}

/// Disk-probe results at one radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusProbe {
    pub r: f64,
    /// `min_φ [(P_r*ω)(φ) - exp(P_r*log ω)(φ)]` over the test angles.
    pub min_jensen_gap: f64,
    /// `∫ exp(P_r*log ω)(φ) dφ`, the `L^1` mean of `|Φ̂'|` on the circle of radius `r`.
    pub h1_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JensenReport {
    pub probes: Vec<RadiusProbe>,
    /// `∫ ω dx`.
    pub l1_norm: f64,
    pub jensen_holds: bool,
    pub h1_nondecreasing: bool,
    pub h1_bounded: bool,
}

/// Tolerance on the `H^1` bound by `‖ω‖_1`.
pub const H1_SLACK: f64 = 1e-8;

/// Checks `exp(P_r*log ω) <= P_r*ω` on `angles` equally spaced test angles
/// (offset by half a cell from the grid) and tabulates the `H^1` means.
pub fn jensen_h1_probe(w: &WeightBundle, radii: &[f64], angles: usize) -> Result<JensenReport> {
    let log_w = positive_log(w)?;
    let l1_norm = crate::riesz::lp_norm(w.omega(), 1.0);
    let probes: Vec<RadiusProbe> = radii
        .par_iter()
        .map(|&r| {
            check_radius(r)?;
            let gaps = (0..angles)
                .map(|j| {
                    let phi = TAU * (j as f64 + 0.5) / angles as f64;
                    Ok(poisson_extension(w.omega(), r, phi)? - poisson_extension(&log_w, r, phi)?.exp())
                })
                .collect::<Result<Vec<f64>>>()?;
            let u = smooth_on_grid(&log_w, r)?;
            Ok(RadiusProbe {
                r,
                min_jensen_gap: gaps.into_iter().fold(f64::INFINITY, f64::min),
                h1_mean: TAU * sum::mean_by(u.values(), f64::exp),
            })
        })
        .collect::<Result<_>>()?;
    let jensen_holds = probes.iter().all(|p| p.min_jensen_gap >= 0.0);
    let mut sorted: Vec<&RadiusProbe> = probes.iter().collect();
    sorted.sort_by(|a, b| a.r.total_cmp(&b.r));
    let h1_nondecreasing = sorted.windows(2).all(|p| p[1].h1_mean >= p[0].h1_mean);
    let h1_bounded = probes.iter().all(|p| p.h1_mean <= l1_norm + H1_SLACK);
    Ok(JensenReport { probes, l1_norm, jensen_holds, h1_nondecreasing, h1_bounded })
}

/// Circular convolution of `f` with the grid-sampled, unit-mass Poisson kernel.
fn smooth_on_grid(f: &SampledFunction, r: f64) -> Result<SampledFunction> {
    let g = f.grid_size();
    let kernel: Vec<f64> = (0..g).map(|i| poisson_kernel(r, grid_point(i, g))).collect();
    let mass = sum::sum(kernel.iter().copied());
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(g);
    let mut kf: Vec<Complex64> = kernel.iter().map(|&k| Complex64::new(k / mass, 0.0)).collect();
    let mut ff: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward.process(&mut kf);
    forward.process(&mut ff);
    for (a, b) in ff.iter_mut().zip(&kf) {
        *a *= b / g as f64;
    }
    planner.plan_fft_inverse(g).process(&mut ff);
    SampledFunction::new(ff.iter().map(|c| c.re).collect())
}

/// Orientation of the traced tangent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TangentConvention {
    /// `γ' = i e^{ix} ω e^{ib}`; the constant weight traces the unit circle.
    #[default]
    Rotated,
    /// `γ' = ω e^{ib}`.
    Raw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveTrace {
    /// `γ(x_k)` for `k = 0..=G`, starting at `γ(0) = 1`.
    pub points: Vec<Complex64>,
    /// `s(x_k) = ∫_0^{x_k} ω`, for `k = 0..=G`.
    pub cumulative_length: Vec<f64>,
    pub closure_defect: f64,
    pub closed: bool,
    pub convention: TangentConvention,
}

/// Relative closure defect below which a trace counts as closed.
pub const CLOSURE_TOLERANCE: f64 = 1e-6;

impl CurveTrace {
    pub fn length(&self) -> f64 {
        *self.cumulative_length.last().expect("non-empty")
    }

    pub fn grid_size(&self) -> usize {
        self.points.len() - 1
    }

    /// Applies `z ↦ rotation·z + shift` to every point.
    pub fn transformed(&self, rotation: Complex64, shift: Complex64) -> Self {
        Self { points: self.points.iter().map(|&z| rotation * z + shift).collect(), ..self.clone() }
    }
}

/// Integrates `γ'` with the left-rectangle rule on the weight's grid.
pub fn trace_curve(w: &WeightBundle, convention: TangentConvention) -> Result<CurveTrace> {
    let g = w.grid_size();
    let b = conjugate_function(&positive_log(w)?)?;
    let omega = w.omega().values();
    let h = TAU / g as f64;
    let mut points = Vec::with_capacity(g + 1);
    let (mut re, mut im) = (Compensated::new(), Compensated::new());
    re.add(1.0);
    points.push(Complex64::new(1.0, 0.0));
    for (k, (&w, &arg)) in omega.iter().zip(b.values()).enumerate() {
        let mut d = Complex64::from_polar(w, arg);
        if convention == TangentConvention::Rotated {
            d *= Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, grid_point(k, g));
        }
        re.add(d.re * h);
        im.add(d.im * h);
        points.push(Complex64::new(re.value(), im.value()));
    }
    let stats = IntervalStats::from_values(omega);
    let cumulative_length: Vec<f64> = stats.prefix().iter().map(|&s| TAU * (s / g as f64)).collect();
    let closure_defect = (points[g] - points[0]).norm();
    let length = cumulative_length[g];
    Ok(CurveTrace {
        points,
        cumulative_length,
        closure_defect,
        closed: closure_defect <= CLOSURE_TOLERANCE * length,
        convention,
    })
}

/// Below this many points, every pair is scanned.
pub const FULL_SCAN_LIMIT: usize = 4096;

/// `max min(arc, L - arc) / chord` over sampled point pairs (plain `arc` for
/// open traces). Coincident distinct points give `+∞`.
///
/// Small traces are scanned exhaustively. Larger ones use every pair at the
/// triadic offsets `n/3^k` and `n/(2·3^k)`, plus `pair_budget` pairs from a
/// low-discrepancy sequence whose offset is drawn from `seed`.
pub fn chord_arc_scan(c: &CurveTrace, pair_budget: usize, seed: u64) -> f64 {
    let n = if c.closed { c.grid_size() } else { c.points.len() };
    let total = c.length();
    let ratio = |i: usize, j: usize| -> f64 {
        if i == j {
            return f64::NEG_INFINITY;
        }
        let arc = (c.cumulative_length[i] - c.cumulative_length[j]).abs();
        let arc = if c.closed { arc.min(total - arc) } else { arc };
        let chord = (c.points[i] - c.points[j]).norm();
        if chord == 0.0 {
            if arc == 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        } else {
            arc / chord
        }
    };
    if n <= FULL_SCAN_LIMIT {
        return (0..n)
            .into_par_iter()
            .map(|i| (i + 1..n).map(|j| ratio(i, j)).fold(f64::NEG_INFINITY, f64::max))
            .reduce(|| f64::NEG_INFINITY, f64::max);
    }
    let mut offsets = Vec::new();
    let mut d = n;
    while d > 0 {
        offsets.push(d / 2);
        d /= 3;
        offsets.push(d);
    }
    offsets.retain(|&d| d > 0 && d < n);
    offsets.sort_unstable();
    offsets.dedup();
    let structured = (0..n)
        .into_par_iter()
        .map(|i| {
            offsets
                .iter()
                .filter(|&&d| c.closed || i + d < n)
                .map(|&d| ratio(i, (i + d) % n))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (u0, v0): (f64, f64) = (rng.gen(), rng.gen());
    // Additive recurrence on the two-dimensional plastic-number lattice.
    let (a1, a2) = (0.754_877_666_246_692_8, 0.569_840_290_998_053_2);
    let sampled = (0..pair_budget)
        .map(|k| {
            let i = ((u0 + a1 * k as f64).fract() * n as f64) as usize;
            let j = ((v0 + a2 * k as f64).fract() * n as f64) as usize;
            ratio(i.min(n - 1), j.min(n - 1))
        })
        .fold(f64::NEG_INFINITY, f64::max);
    structured.max(sampled)
}

/// `max (1 - r²)|φ'(re^{iθ})|` for `φ(z) = Σ_k a_k z^k`, over the given radii
/// and `angles` equally spaced `θ`.
pub fn bloch_norm_from_coefficients(coefficients: &[Complex64], radii: &[f64], angles: usize) -> Result<f64> {
    if angles == 0 {
        return Err(Error::invalid("angles_per_radius", "must be positive"));
    }
    let inverse = FftPlanner::new().plan_fft_inverse(angles);
    radii
        .par_iter()
        .map(|&r| {
            check_radius(r)?;
            // φ'(re^{iθ_j}) = Σ_k k a_k r^{k-1} e^{i(k-1)θ_j}, folded onto `angles` bins.
            let mut bins = vec![Complex64::new(0.0, 0.0); angles];
            let mut rk = 1.0;
            for (k, &a) in coefficients.iter().enumerate().skip(1) {
                bins[(k - 1) % angles] += a * (k as f64 * rk);
                rk *= r;
                if rk == 0.0 {
                    break;
                }
            }
            inverse.process(&mut bins);
            let peak = bins.iter().map(|z| z.norm()).fold(0.0, f64::max);
            Ok((1.0 - r * r) * peak)
        })
        .collect::<Result<Vec<f64>>>()
        .map(|v| v.into_iter().fold(0.0, f64::max))
}

/// Bloch probe of `φ(z) = c_0 + 2 Σ_{k>0} c_k z^k` with `c_k` the Fourier
/// coefficients of `log ω`. Radii above `1 - 3/G` are skipped.
pub fn bloch_norm_probe(w: &WeightBundle, radii: &[f64], angles_per_radius: usize) -> Result<f64> {
    let g = w.grid_size();
    let series = FourierSeries::of(&positive_log(w)?);
    let coefficients: Vec<Complex64> = (0..g.div_ceil(2))
        .map(|k| if k == 0 { series.coefficient(0) } else { series.coefficient(k as i64) * 2.0 })
        .collect();
    let limit = 1.0 - 3.0 / g as f64;
    let usable: Vec<f64> = radii.iter().copied().filter(|&r| r <= limit).collect();
    bloch_norm_from_coefficients(&coefficients, &usable, angles_per_radius)
}

/// `β(σ_j) = b(α(σ_j))` on the uniform arclength grid `σ_j = L j / G`, where
/// `α` inverts `s(x) = ∫_0^x ω` piecewise linearly and `b` is read off by
/// periodic linear interpolation.
pub fn arclength_reparam(c: &CurveTrace, b: &SampledFunction) -> Result<SampledFunction> {
    let g = c.grid_size();
    if b.grid_size() != g {
        return Err(Error::GridMismatch { expected: g, found: b.grid_size() });
    }
    let s = &c.cumulative_length;
    if let Some(index) = s.windows(2).position(|p| !(p[1] > p[0])) {
        return Err(Error::NonMonotonic { index });
    }
    let total = s[g];
    let h = TAU / g as f64;
    let bv = b.values();
    let mut k = 0;
    let values = (0..g)
        .map(|j| {
            let sigma = total * j as f64 / g as f64;
            while k + 1 < g && s[k + 1] <= sigma {
                k += 1;
            }
            let frac = ((sigma - s[k]) / (s[k + 1] - s[k])).clamp(0.0, 1.0);
            let alpha = (k as f64 + frac) * h;
            let pos = alpha / h;
            let i = (pos.floor() as usize).min(g - 1);
            let u = pos - i as f64;
            let next = bv[(i + 1) % g];
            if u == 0.0 {
                bv[i]
            } else {
                bv[i] + u * (next - bv[i])
            }
        })
        .collect();
    SampledFunction::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn bundle(f: SampledFunction) -> WeightBundle {
        WeightBundle::from_weight(f).unwrap()
    }

    #[test]
    fn conjugate_of_trig_monomials() {
        let g = 64;
        for k in 1..=5 {
            let kf = k as f64;
            let c = conjugate_function(&SampledFunction::from_fn(g, |x| (kf * x).cos()).unwrap()).unwrap();
            let s = conjugate_function(&SampledFunction::from_fn(g, |x| (kf * x).sin()).unwrap()).unwrap();
            for i in 0..g {
                let x = grid_point(i, g);
                assert!((c.values()[i] - (kf * x).sin()).abs() < 1e-12);
                assert!((s.values()[i] + (kf * x).cos()).abs() < 1e-12);
            }
        }
        let zero = conjugate_function(&SampledFunction::constant(8, 3.0).unwrap()).unwrap();
        assert!(zero.values().iter().all(|v| v.abs() < 1e-15));
        assert!(conjugate_function(&SampledFunction::constant(9, 1.0).unwrap()).is_err());
    }

    #[test]
    fn fourier_indexing() {
        let f = SampledFunction::from_fn(16, |x| (3.0 * x).cos()).unwrap();
        let s = FourierSeries::of(&f);
        assert!((s.coefficient(3) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((s.coefficient(-3) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(s.frequency(15), -1);
        assert_eq!(s.frequency(8), -8);
    }

    #[test]
    fn poisson_examples() {
        let one = SampledFunction::constant(64, 1.0).unwrap();
        assert_eq!(poisson_extension(&one, 0.7, 1.3).unwrap(), 1.0);
        let cos = SampledFunction::from_fn(256, f64::cos).unwrap();
        for (r, phi) in [(0.3, 0.2), (0.9, 2.0), (0.0, 1.0)] {
            let v = poisson_extension(&cos, r, phi).unwrap();
            assert!((v - r * phi.cos()).abs() < 1e-12, "{r} {phi}");
        }
        assert!(poisson_extension(&one, 1.0, 0.0).is_err());
    }

    #[test]
    fn constant_weight_jensen_equality() {
        let w = bundle(SampledFunction::constant(128, 1.0).unwrap());
        let rep = jensen_h1_probe(&w, &[0.5, 0.9, 0.99], 16).unwrap();
        for p in &rep.probes {
            assert_eq!(p.min_jensen_gap, 0.0);
            assert!((p.h1_mean - TAU).abs() < 1e-12);
        }
        assert!(rep.jensen_holds && rep.h1_bounded);
    }

    #[test]
    fn unit_circle_trace() {
        let g = 2 * 3usize.pow(7);
        let w = bundle(SampledFunction::constant(g, 1.0).unwrap());
        let c = trace_curve(&w, TangentConvention::Rotated).unwrap();
        assert!(c.closure_defect < 1e-10 && c.closed);
        assert_eq!(c.length(), crate::riesz::lp_norm(w.omega(), 1.0));
        let ratio = chord_arc_scan(&c, 1000, 7);
        assert!((ratio - FRAC_PI_2).abs() < 1e-6, "{ratio}");
        let moved = c.transformed(Complex64::from_polar(1.0, 0.8), Complex64::new(3.0, -2.0));
        assert!((chord_arc_scan(&moved, 1000, 7) - ratio).abs() < 1e-9);
    }

    #[test]
    fn raw_convention_is_a_segment() {
        let w = bundle(SampledFunction::constant(200, 1.0).unwrap());
        let c = trace_curve(&w, TangentConvention::Raw).unwrap();
        assert!(!c.closed);
        assert!((c.closure_defect - TAU).abs() < 1e-12);
        assert!((chord_arc_scan(&c, 0, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bloch_examples() {
        let w = bundle(SampledFunction::constant(64, 1.0).unwrap());
        assert_eq!(bloch_norm_probe(&w, &[0.0, 0.5, 0.9], 32).unwrap(), 0.0);
        let z = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        assert_eq!(bloch_norm_from_coefficients(&z, &[0.0, 0.5, 0.9], 16).unwrap(), 1.0);
    }

    #[test]
    fn bloch_of_single_mode() {
        // log ω = a cos(x) gives φ(z) = a z, so the probe is a·max(1 - r²).
        let a = 0.3;
        let w = bundle(SampledFunction::from_fn(64, |x| (a * x.cos()).exp()).unwrap());
        let v = bloch_norm_probe(&w, &[0.2, 0.5], 32).unwrap();
        assert!((v - a * (1.0 - 0.04)).abs() < 1e-12, "{v}");
    }

    #[test]
    fn reparam_examples() {
        let g = 60;
        let b = SampledFunction::from_fn(g, |x| x.sin() + 0.3 * (2.0 * x).cos()).unwrap();
        for c in [1.0, 2.0] {
            let w = bundle(SampledFunction::constant(g, c).unwrap());
            let trace = trace_curve(&w, TangentConvention::Rotated).unwrap();
            let beta = arclength_reparam(&trace, &b).unwrap();
            for (x, y) in beta.values().iter().zip(b.values()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        let mut stalled =
            trace_curve(&bundle(SampledFunction::constant(g, 1.0).unwrap()), TangentConvention::Raw).unwrap();
        stalled.cumulative_length[5] = stalled.cumulative_length[4];
        assert!(matches!(arclength_reparam(&stalled, &b), Err(Error::NonMonotonic { index: 4 })));
    }
}
