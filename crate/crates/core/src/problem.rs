//! Search-problem instance: database size, marked count, and energy scale.

use crate::error::{Error, Result};

/// An unstructured-search instance with `N` items of which `M` are marked.
///
/// The marked fraction `r = M/N` drives every dimensionless quantity in the
/// library; the energy scale `J` only matters when converting the scaled
/// time `JT` back to physical run time.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    counts: Option<(u64, u64)>,
    r: f64,
    j: f64,
}

impl ProblemInstance {
    /// Build from integer counts; `r = M/N` is exact.
    pub fn from_counts(n_items: u64, n_marked: u64, energy_scale: f64) -> Result<Self> {
        if n_items == 0 {
            return Err(Error::Domain("n_items must be positive".into()));
        }
        if n_marked == 0 || n_marked > n_items {
            return Err(Error::Domain(format!(
                "n_marked must satisfy 1 <= M <= N, got M={n_marked}, N={n_items}"
            )));
        }
        let r = n_marked as f64 / n_items as f64;
        Self::check_scale(energy_scale)?;
        Ok(Self { counts: Some((n_items, n_marked)), r, j: energy_scale })
    }

    /// Build directly from a marked fraction in (0, 1].
    pub fn from_fraction(r: f64, energy_scale: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::Domain(format!("marked fraction must lie in (0,1], got {r}")));
        }
        Self::check_scale(energy_scale)?;
        Ok(Self { counts: None, r, j: energy_scale })
    }

    fn check_scale(j: f64) -> Result<()> {
        if !(j > 0.0 && j.is_finite()) {
            return Err(Error::Domain(format!("energy scale J must be positive, got {j}")));
        }
        Ok(())
    }

    /// Database size, when the instance was built from counts.
    pub fn n_items(&self) -> Option<u64> {
        self.counts.map(|(n, _)| n)
    }

    /// Marked count, when the instance was built from counts.
    pub fn n_marked(&self) -> Option<u64> {
        self.counts.map(|(_, m)| m)
    }

    /// Marked fraction r = M/N.
    pub fn marked_fraction(&self) -> f64 {
        self.r
    }

    /// Energy scale J.
    pub fn energy_scale(&self) -> f64 {
        self.j
    }
}
