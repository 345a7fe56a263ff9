use serde::{Deserialize, Serialize};

use super::{decompose, linear_in_dictators, SnFunction};
use crate::error::{Error, Result};
use crate::perm_core::symmetric_group;

/// Coefficients `a_ij = (1 − 1/n)(E[f_{i→j}] − E[f])` of the first level,
/// with `f^{=1} = Σ a_ij x_{i→j}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelOneCoefficients {
    n: usize,
    /// Row-major `n × n`; entry `(i-1)·n + (j-1)`.
    a: Vec<f64>,
    /// `E[f_{i→j}]`, same layout.
    restricted_means: Vec<f64>,
    mean: f64,
}

impl LevelOneCoefficients {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `a_ij` for one-based `i, j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[(i - 1) * self.n + (j - 1)]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.a
    }

    pub fn restricted_mean(&self, i: usize, j: usize) -> f64 {
        self.restricted_means[(i - 1) * self.n + (j - 1)]
    }

    /// `(1/(n−1)) Σ a_ij²`.
    pub fn weight(&self) -> f64 {
        self.a.iter().map(|x| x * x).sum::<f64>() / (self.n - 1) as f64
    }

    /// `σ ↦ Σ_ij a_ij x_{i→j}(σ)` on the same domain as `like`.
    pub fn as_function(&self, like: &SnFunction) -> Result<SnFunction> {
        Ok(like.with_values(linear_in_dictators(self.n, &self.a)?))
    }

    /// `max_i |Σ_j (E[f_{i→j}] − E[f])|`; zero up to rounding since every
    /// row of restricted means averages to `E[f]`.
    pub fn row_balance(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.restricted_means[i * n + j] - self.mean).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }
}

fn restricted_means(f: &SnFunction) -> Result<(usize, Vec<f64>, f64)> {
    let m = f.domain_n();
    if m < 2 {
        return Err(Error::domain("needs n >= 2"));
    }
    let all = symmetric_group(m)?;
    let mut sums = vec![0.0; m * m];
    for (s, &v) in all.iter().zip(f.values()) {
        for (i, &img) in s.images().iter().enumerate() {
            sums[i * m + img as usize - 1] += v;
        }
    }
    let per_cell = (all.len() / m) as f64;
    sums.iter_mut().for_each(|x| *x /= per_cell);
    Ok((m, sums, f.mean()))
}

pub fn level_one_coeffs(f: &SnFunction) -> Result<LevelOneCoefficients> {
    let (n, restricted_means, mean) = restricted_means(f)?;
    let scale = 1.0 - 1.0 / n as f64;
    let a = restricted_means.iter().map(|e| scale * (e - mean)).collect();
    Ok(LevelOneCoefficients { n, a, restricted_means, mean })
}

/// Variance over a uniform cell `(i, j)` of `E[f_{i→j}] − E[f]`.
pub fn restriction_variance(f: &SnFunction) -> Result<f64> {
    let (_, means, mean) = restricted_means(f)?;
    let k = means.len() as f64;
    let first = means.iter().map(|e| e - mean).sum::<f64>() / k;
    let second = means.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / k;
    Ok(second - first * first)
}

/// Agreement between the closed-form first level and the projection.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelOneCheck {
    pub max_pointwise: f64,
    pub weight_formula: f64,
    pub weight_projection: f64,
}

impl LevelOneCheck {
    pub fn weight_rel_err(&self) -> f64 {
        let scale = self.weight_formula.abs().max(self.weight_projection.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.weight_formula - self.weight_projection).abs() / scale
        }
    }
}

pub fn level_one_check(f: &SnFunction) -> Result<LevelOneCheck> {
    let coeffs = level_one_coeffs(f)?;
    let dec = decompose(f)?;
    let formula = coeffs.as_function(f)?;
    let max_pointwise = formula
        .values()
        .iter()
        .zip(dec.components[1].values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(LevelOneCheck { max_pointwise, weight_formula: coeffs.weight(), weight_projection: dec.weights[1] })
}
