//! Discrete uncentered Hardy–Littlewood maximal operator on the circle.
//!
//! A sampled function is read as a step density, so the mean over an interval
//! is the mean of the samples it covers. The interval family is every run of
//! `1..=G` consecutive samples, wrapping around the end of the grid.
//!
//! Both implementations evaluate interval means through
//! [`IntervalStats::window_mean`], so they agree bit-for-bit. Ties are broken
//! by the shortest interval, then by the one that starts furthest to the left
//! of the point.

use std::cmp::Ordering;

use crate::diagnostics::{WeightBundle, WeightProvenance};
use crate::error::{Error, Result};
use crate::sampled::SampledFunction;
use crate::sum::Compensated;

/// Prefix sums `prefix[j] = Σ_{i<j} values[i]` with compensated accumulation.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalStats {
    prefix: Vec<f64>,
    values: Vec<f64>,
}

pub fn prefix_sums(f: &SampledFunction) -> IntervalStats {
    IntervalStats::from_values(f.values())
}

impl IntervalStats {
    pub fn from_values(values: &[f64]) -> Self {
        let mut prefix = Vec::with_capacity(values.len() + 1);
        let mut acc = Compensated::new();
        prefix.push(0.0);
        for &v in values {
            acc.add(v);
            prefix.push(acc.value());
        }
        Self { prefix, values: values.to_vec() }
    }

    pub fn grid_size(&self) -> usize {
        self.prefix.len() - 1
    }

    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    pub fn total(&self) -> f64 {
        self.prefix[self.grid_size()]
    }

    /// Sum of the `len` samples starting at `start`, wrapping modulo `G`.
    /// Requires `start < G` and `1 <= len <= G`. Single samples are returned
    /// as stored, so a window of one never rounds.
    #[inline]
    pub fn window_sum(&self, start: usize, len: usize) -> f64 {
        let g = self.grid_size();
        debug_assert!(start < g && len >= 1 && len <= g);
        let end = start + len;
        if len == 1 {
            self.values[start]
        } else if end <= g {
            self.prefix[end] - self.prefix[start]
        } else {
            (self.prefix[g] - self.prefix[start]) + self.prefix[end - g]
        }
    }

    #[inline]
    pub fn window_mean(&self, start: usize, len: usize) -> f64 {
        self.window_sum(start, len) / len as f64
    }
}

/// A wrapped run of samples `start, start+1, ..., start+len-1 (mod G)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BestInterval {
    pub start: usize,
    pub len: usize,
}

impl BestInterval {
    /// Index of the last covered sample.
    pub fn end(&self, grid: usize) -> usize {
        (self.start + self.len - 1) % grid
    }

    pub fn contains(&self, i: usize, grid: usize) -> bool {
        (i + grid - self.start) % grid < self.len
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaximalResult {
    pub values: SampledFunction,
    pub argbest: Vec<BestInterval>,
}

/// Upper bound on `G` accepted by [`maximal_naive`].
pub const NAIVE_LIMIT: usize = 1 << 16;

/// Selection order at a fixed point: larger mean, then shorter, then larger
/// left extent (the number of covered samples before the point).
#[inline]
fn key_order(mean_a: f64, len_a: usize, ext_a: usize, mean_b: f64, len_b: usize, ext_b: usize) -> Ordering {
    mean_a.partial_cmp(&mean_b).unwrap_or(Ordering::Equal).then(len_b.cmp(&len_a)).then(ext_a.cmp(&ext_b))
}

/// Exhaustive `O(G²)` evaluation.
pub fn maximal_naive(f: &SampledFunction) -> Result<MaximalResult> {
    let g = f.grid_size();
    if g > NAIVE_LIMIT {
        return Err(Error::GridTooLarge { grid: g, limit: NAIVE_LIMIT });
    }
    let stats = IntervalStats::from_values(&abs_values(f));
    let mut best: Vec<Option<(f64, usize, usize)>> = vec![None; g];
    let mut suffix = vec![(0.0, 0usize); g + 1];
    for s in 0..g {
        // suffix[l] is the preferred (mean, len) among lengths >= l.
        for len in (1..=g).rev() {
            let m = stats.window_mean(s, len);
            suffix[len] = if len == g {
                (m, len)
            } else {
                let (bm, bl) = suffix[len + 1];
                if key_order(m, len, 0, bm, bl, 0) == Ordering::Greater {
                    (m, len)
                } else {
                    (bm, bl)
                }
            };
        }
        for ext in 0..g {
            let i = (s + ext) % g;
            let (m, len) = suffix[ext + 1];
            let replace = match best[i] {
                None => true,
                Some((bm, bl, be)) => key_order(m, len, ext, bm, bl, be) == Ordering::Greater,
            };
            if replace {
                best[i] = Some((m, len, ext));
            }
        }
    }
    finish(
        g,
        best.into_iter().enumerate().map(|(i, b)| {
            let (m, len, ext) = b.expect("every point is covered");
            (m, BestInterval { start: (i + g - ext) % g, len })
        }),
    )
}

fn abs_values(f: &SampledFunction) -> Vec<f64> {
    f.values().iter().map(|v| v.abs()).collect()
}

fn finish(g: usize, items: impl Iterator<Item = (f64, BestInterval)>) -> Result<MaximalResult> {
    let mut values = Vec::with_capacity(g);
    let mut argbest = Vec::with_capacity(g);
    for (m, b) in items {
        values.push(m);
        argbest.push(b);
    }
    Ok(MaximalResult { values: SampledFunction::new(values)?, argbest })
}

/// Candidate interval `[start, start + len)` on the doubled grid.
#[derive(Debug, Clone, Copy)]
struct Cand {
    mean: f64,
    len: usize,
    start: usize,
}

impl Cand {
    const NONE: Cand = Cand { mean: f64::NEG_INFINITY, len: usize::MAX, start: usize::MAX };

    /// Order for candidates competing at the same position.
    #[inline]
    fn beats(&self, other: &Cand) -> bool {
        match self.mean.partial_cmp(&other.mean) {
            Some(Ordering::Greater) => true,
            Some(Ordering::Less) => false,
            _ => self.len < other.len || (self.len == other.len && self.start < other.start),
        }
    }
}

/// Upper convex hull of points appended in strictly increasing `x`.
/// Collinear points are dropped.
struct UpperHull {
    xs: Vec<i64>,
    ys: Vec<f64>,
}

impl UpperHull {
    fn with_capacity(n: usize) -> Self {
        Self { xs: Vec::with_capacity(n), ys: Vec::with_capacity(n) }
    }

    fn clear(&mut self) {
        self.xs.clear();
        self.ys.clear();
    }

    fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    fn push(&mut self, x: i64, y: f64) {
        while self.xs.len() >= 2 {
            let n = self.xs.len();
            let (ox, oy) = (self.xs[n - 2], self.ys[n - 2]);
            let (ax, ay) = (self.xs[n - 1], self.ys[n - 1]);
            let cross = (ax - ox) as f64 * (y - oy) - (ay - oy) * (x - ox) as f64;
            if cross >= 0.0 {
                self.xs.pop();
                self.ys.pop();
            } else {
                break;
            }
        }
        self.xs.push(x);
        self.ys.push(y);
    }

    /// Leftmost vertex maximising the slope from `(px, py)`, which lies
    /// strictly left of every vertex.
    fn tangent(&self, px: i64, py: f64) -> usize {
        let not_past = |k: usize| {
            // slope(p, v_{k+1}) > slope(p, v_k)
            let dx0 = (self.xs[k] - px) as f64;
            let dx1 = (self.xs[k + 1] - px) as f64;
            (self.ys[k + 1] - py) * dx0 > (self.ys[k] - py) * dx1
        };
        let (mut lo, mut hi) = (0, self.xs.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if not_past(mid) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

struct Doubled<'a> {
    g: usize,
    stats: &'a IntervalStats,
    prefix: Vec<f64>,
}

impl Doubled<'_> {
    #[inline]
    fn mean(&self, a: usize, b: usize) -> f64 {
        self.stats.window_mean(a % self.g, b - a)
    }

    /// Best interval `[a, b)` over hull vertices near `k`, for fixed `a`.
    fn refine_right(&self, hull: &UpperHull, k: usize, a: usize) -> Cand {
        let mut best = Cand::NONE;
        for j in k.saturating_sub(1)..(k + 2).min(hull.xs.len()) {
            let b = hull.xs[j] as usize;
            let c = Cand { mean: self.mean(a, b), len: b - a, start: a };
            if c.beats(&best) {
                best = c;
            }
        }
        best
    }

    /// Same as [`refine_right`] for a reflected hull holding `-a`, for fixed `b`.
    fn refine_left(&self, hull: &UpperHull, k: usize, b: usize) -> Cand {
        let mut best = Cand::NONE;
        for j in k.saturating_sub(1)..(k + 2).min(hull.xs.len()) {
            let a = (-hull.xs[j]) as usize;
            let c = Cand { mean: self.mean(a, b), len: b - a, start: a };
            if c.beats(&best) {
                best = c;
            }
        }
        best
    }

    /// Best interval over `[lo, hi)` for every position, written to `out`.
    fn solve(&self, lo: usize, hi: usize, out: &mut [Cand]) {
        let n = hi - lo;
        if n == 1 {
            out[0] = Cand { mean: self.mean(lo, hi), len: 1, start: lo };
            return;
        }
        let mid = lo + n / 2;
        let (left, right) = out.split_at_mut(mid - lo);
        if n >= 4096 {
            rayon::join(|| self.solve(lo, mid, left), || self.solve(mid, hi, right));
        } else {
            self.solve(lo, mid, left);
            self.solve(mid, hi, right);
        }
        self.cross(lo, mid, hi, left, right);
    }

    /// Merges intervals `[a, b)` with `lo <= a < mid < b <= hi`.
    fn cross(&self, lo: usize, mid: usize, hi: usize, left: &mut [Cand], right: &mut [Cand]) {
        let mut hull = UpperHull::with_capacity(hi - mid);
        for b in mid + 1..=hi {
            hull.push(b as i64, self.prefix[b]);
        }
        let mut run = Cand::NONE;
        for a in lo..mid {
            let k = hull.tangent(a as i64, self.prefix[a]);
            let c = self.refine_right(&hull, k, a);
            if c.beats(&run) {
                run = c;
            }
            merge(&mut left[a - lo], run);
        }

        hull.clear();
        for a in (lo..mid).rev() {
            hull.push(-(a as i64), -self.prefix[a]);
        }
        let mut run = Cand::NONE;
        for b in (mid + 1..=hi).rev() {
            let k = hull.tangent(-(b as i64), -self.prefix[b]);
            let c = self.refine_left(&hull, k, b);
            if c.beats(&run) {
                run = c;
            }
            merge(&mut right[b - 1 - mid], run);
        }
    }

    /// Root merge on `[0, 2G)` with split at `G`, restricted to length `<= G`.
    fn cross_root(&self, left: &mut [Cand], right: &mut [Cand]) {
        let g = self.g;
        let mut hull = UpperHull::with_capacity(g);
        let mut run = Cand::NONE;
        for (a, slot) in left.iter_mut().enumerate().take(g) {
            if a >= 1 {
                hull.push((a + g) as i64, self.prefix[a + g]);
            }
            if !hull.is_empty() {
                let k = hull.tangent(a as i64, self.prefix[a]);
                let c = self.refine_right(&hull, k, a);
                if c.beats(&run) {
                    run = c;
                }
            }
            merge(slot, run);
        }

        hull.clear();
        let mut run = Cand::NONE;
        for b in (g + 1..=2 * g).rev() {
            if b < 2 * g {
                let a = b - g;
                hull.push(-(a as i64), -self.prefix[a]);
            }
            if !hull.is_empty() {
                let k = hull.tangent(-(b as i64), -self.prefix[b]);
                let c = self.refine_left(&hull, k, b);
                if c.beats(&run) {
                    run = c;
                }
            }
            merge(&mut right[b - 1 - g], run);
        }
    }
}

#[inline]
fn merge(slot: &mut Cand, c: Cand) {
    if c.beats(slot) {
        *slot = c;
    }
}

/// Hull-based evaluation in `O(G log² G)`.
///
/// The circle is unrolled to `2G` samples so that every wrapped interval is an
/// ordinary run. A divide-and-conquer pass finds, for each position, the best
/// run inside each node that crosses the node's midpoint: runs starting at `a`
/// are maximised by the tangent from the prefix point `(a, S_a)` to the upper
/// hull of the right half, and the symmetric pass uses a reflected hull. The
/// two halves of the unrolled grid are identical, so only one is solved.
pub fn maximal_fast(f: &SampledFunction) -> Result<MaximalResult> {
    let g = f.grid_size();
    let stats = IntervalStats::from_values(&abs_values(f));
    let total = stats.total();
    let mut prefix = stats.prefix().to_vec();
    prefix.extend(stats.prefix()[1..].iter().map(|&s| total + s));
    let doubled = Doubled { g, stats: &stats, prefix };

    let mut cands = vec![Cand::NONE; 2 * g];
    let (left, right) = cands.split_at_mut(g);
    doubled.solve(0, g, left);
    for (r, l) in right.iter_mut().zip(left.iter()) {
        *r = Cand { start: l.start + g, ..*l };
    }
    doubled.cross_root(left, right);

    finish(
        g,
        (0..g).map(|i| {
            let lo = cands[i];
            let hi = cands[i + g];
            let (ext_lo, ext_hi) = (i - lo.start, i + g - hi.start);
            let c =
                if key_order(hi.mean, hi.len, ext_hi, lo.mean, lo.len, ext_lo) == Ordering::Greater { hi } else { lo };
            (c.mean, BestInterval { start: c.start % g, len: c.len })
        }),
    )
}

/// `ω^t` with `ω = M f̃`.
pub fn build_omega(ftilde: &SampledFunction, t: f64, provenance: WeightProvenance) -> Result<WeightBundle> {
    if let Some(i) = ftilde.values().iter().position(|&v| v < 0.0) {
        return Err(Error::invalid("ftilde", format!("negative sample at index {i}")));
    }
    check_exponent(t)?;
    let omega = maximal_fast(ftilde)?.values;
    let powered = if t == 1.0 { omega } else { omega.map(|w| w.powf(t))? };
    WeightBundle::new(powered, t, provenance)
}

pub(crate) fn check_exponent(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::invalid("t", format!("must lie in [0, 1], got {t}")))
    }
}
