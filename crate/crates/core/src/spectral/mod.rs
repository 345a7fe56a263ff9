//! Degree decomposition of real functions on `S_n`, the level-1 formula,
//! globalness of families and the level-d audit.
//!
//! A function on a sub-permutation space `P_{n,k}` is handled as a function on
//! `S_{n-k}` after order-preserving relabelling of the free coordinates.

mod basis;
mod globalness;
mod level_one;

use serde::{Deserialize, Serialize};

pub use basis::{decompose, LevelDecomposition, MAX_DECOMPOSE_N};
pub use globalness::{
    global_restriction, globalness, is_gamma_global, level_d_audit, pattern_counts, GlobalRestriction,
    GlobalnessReport, DEFAULT_DEPTH_CAP,
};
pub use level_one::{level_one_check, level_one_coeffs, restriction_variance, LevelOneCheck, LevelOneCoefficients};

use crate::error::{Error, Result};
use crate::numbers::factorial_u64;
use crate::perm_core::{symmetric_group, PermFamily, SubFamily, SubSpace, MAX_ENUM_N};

/// A real function on `S_n` (or on a tagged sub-space), indexed by
/// lexicographic rank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnFunction {
    n: usize,
    space: Option<SubSpace>,
    values: Vec<f64>,
}

impl SnFunction {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || n > MAX_ENUM_N {
            return Err(Error::Capacity { what: "function on S_n", n, max: MAX_ENUM_N });
        }
        Error::dims(factorial_u64(n) as usize, values.len())?;
        Ok(SnFunction { n, space: None, values })
    }

    /// A function on `P_{n,k}`; `values` has length `(n-k)!`, indexed by the
    /// rank of the relabelled permutation.
    pub fn on_subspace(space: SubSpace, values: Vec<f64>) -> Result<Self> {
        let m = space.free_count();
        if m == 0 || m > MAX_ENUM_N {
            return Err(Error::Capacity { what: "function on a sub-space", n: m, max: MAX_ENUM_N });
        }
        Error::dims(factorial_u64(m) as usize, values.len())?;
        Ok(SnFunction { n: space.n(), space: Some(space), values })
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(n, vec![c; factorial_u64(n.min(20)) as usize])
    }

    pub fn indicator(f: &PermFamily) -> Self {
        let mut values = vec![0.0; f.bits().capacity()];
        for r in f.ranks() {
            values[r] = 1.0;
        }
        SnFunction { n: f.n(), space: None, values }
    }

    /// Indicator of a family inside its space.
    pub fn sub_indicator(a: &SubFamily) -> Result<Self> {
        if a.space().fixed().is_empty() {
            return Ok(Self::indicator(a.family()));
        }
        let small = a.compress()?;
        let mut values = vec![0.0; factorial_u64(small.n()) as usize];
        for r in small.ranks() {
            values[r] = 1.0;
        }
        Ok(SnFunction { n: a.n(), space: Some(a.space().clone()), values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> Option<&SubSpace> {
        self.space.as_ref()
    }

    /// Size of the symmetric group the values live on.
    pub fn domain_n(&self) -> usize {
        self.space.as_ref().map_or(self.n, |s| s.free_count())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `‖f‖₂²` under the uniform measure.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() / self.values.len() as f64
    }

    /// `⟨f, g⟩` under the uniform measure.
    pub fn inner(&self, other: &SnFunction) -> Result<f64> {
        Error::dims(self.values.len(), other.values.len())?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() / self.values.len() as f64)
    }

    pub(crate) fn with_values(&self, values: Vec<f64>) -> SnFunction {
        SnFunction { n: self.n, space: self.space.clone(), values }
    }

    fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(i) => Err(Error::Numeric(i)),
            None => Ok(()),
        }
    }

    /// The family whose indicator this is; fails unless every value is 0 or 1.
    pub fn to_family(&self) -> Result<SubFamily> {
        if let Some(i) = self.values.iter().position(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::domain(format!("value {} at rank {i} is not 0/1", self.values[i])));
        }
        let m = self.domain_n();
        let small = PermFamily::from_ranks(m, self.values.iter().enumerate().filter(|(_, &v)| v == 1.0).map(|(r, _)| r))?;
        match &self.space {
            None => Ok(small.into()),
            Some(space) => {
                let fixed = space.fixed();
                let big: Vec<_> = small.iter().map(|s| s.expand(fixed, self.n)).collect();
                SubFamily::new(space.clone(), PermFamily::from_perms(self.n, &big)?)
            }
        }
    }
}

/// Values of `σ ↦ Σ_i a[i][σ(i)]` over `S_m`, used for dictator-linear functions.
pub(crate) fn linear_in_dictators(m: usize, a: &[f64]) -> Result<Vec<f64>> {
    let all = symmetric_group(m)?;
    Ok(all
        .iter()
        .map(|s| (0..m).map(|i| a[i * m + s.images()[i] as usize - 1]).sum())
        .collect())
}
