//! End-to-end construction of `ω^t = (M f̃)^t` on `G = 2·3^m` points.

use crate::diagnostics::{WeightBundle, WeightProvenance};
use crate::error::{Error, Result};
use crate::maximal;
use crate::riesz::{self, FtildeSpec, IndexPolicy, SelectedIndex};
use crate::sampled::SampledFunction;

/// `2·3^m`.
pub fn grid_for_exponent(m: u32) -> Result<usize> {
    if !(1..=16).contains(&m) {
        return Err(Error::invalid("grid_exponent", format!("must lie in 1..=16, got {m}")));
    }
    Ok(2 * 3usize.pow(m))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Construction {
    pub table: Vec<SelectedIndex>,
    pub ftilde: SampledFunction,
    /// `ω = M f̃` (power one).
    pub omega: WeightBundle,
}

impl Construction {
    pub fn provenance(&self) -> &WeightProvenance {
        self.omega.provenance()
    }

    /// `ω^t` with the same provenance.
    pub fn power(&self, t: f64) -> Result<WeightBundle> {
        maximal::check_exponent(t)?;
        let values = if t == 1.0 { self.omega.omega().clone() } else { self.omega.omega().map(|w| w.powf(t))? };
        WeightBundle::new(values, t, self.provenance().clone())
    }
}

/// Selects `N_1..N_K`, builds `f̃` and `ω = M f̃` on `grid` points.
pub fn construct(epsilon: f64, terms: usize, grid: usize, policy: IndexPolicy) -> Result<Construction> {
    let table = riesz::select_indices(epsilon, terms, grid, policy)?;
    let indices: Vec<usize> = table.iter().map(|s| s.index).collect();
    let ftilde = riesz::build_ftilde(&FtildeSpec::new(epsilon, indices.clone())?, grid)?;
    let provenance = WeightProvenance {
        epsilon: Some(epsilon),
        selected_indices: indices,
        saturated: table.iter().map(|s| s.saturated).collect(),
        grid,
        index_policy: Some(policy),
        norm_convention: WeightProvenance::PLAIN_DX.into(),
    };
    let omega = maximal::build_omega(&ftilde, 1.0, provenance)?;
    Ok(Construction { table, ftilde, omega })
}
