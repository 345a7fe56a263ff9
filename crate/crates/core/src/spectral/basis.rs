use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SnFunction;
use crate::error::{Error, Result};
use crate::perm_core::symmetric_group;

pub const MAX_DECOMPOSE_N: usize = 7;

/// Squared residual (relative to the generator's squared norm) below which a
/// junta indicator is treated as lying in the span already built.
const DEPENDENCE_TOL: f64 = 1e-10;

/// Orthonormal basis of `L²(S_m)` (Euclidean inner product on rank-indexed
/// vectors), graded so that levels `0..=d` span `V_{≤d}`.
struct JuntaBasis {
    size: usize,
    /// Row-major, one row per basis vector.
    rows: Vec<f64>,
    /// `level_end[d]` = number of rows spanning `V_{≤d}`.
    level_end: Vec<usize>,
}

impl JuntaBasis {
    fn row(&self, k: usize) -> &[f64] {
        &self.rows[k * self.size..(k + 1) * self.size]
    }

    fn rank(&self) -> usize {
        self.rows.len() / self.size
    }

    /// Grows the span with the `d`-umvirate indicators for `d = 1, 2, …`
    /// using Gram–Schmidt with re-orthogonalization; a generator is dropped
    /// when its residual vanishes.
    fn build(m: usize) -> JuntaBasis {
        let all = symmetric_group(m).expect("m within enumeration cap");
        let size = all.len();
        let mut basis = JuntaBasis { size, rows: vec![1.0 / (size as f64).sqrt(); size], level_end: vec![1] };
        for d in 1..m {
            if basis.rank() < size {
                for inputs in (0..m).combinations(d) {
                    let mut groups: BTreeMap<Vec<u8>, Vec<usize>> = BTreeMap::new();
                    for (r, s) in all.iter().enumerate() {
                        let key = inputs.iter().map(|&i| s.images()[i]).collect();
                        groups.entry(key).or_default().push(r);
                    }
                    for support in groups.values() {
                        basis.try_add(support);
                        if basis.rank() == size {
                            break;
                        }
                    }
                    if basis.rank() == size {
                        break;
                    }
                }
            }
            basis.level_end.push(basis.rank());
        }
        basis
    }

    fn try_add(&mut self, support: &[usize]) {
        let norm_sq = support.len() as f64;
        let size = self.size;
        let coeffs: Vec<f64> = self
            .rows
            .par_chunks(size)
            .map(|q| support.iter().map(|&r| q[r]).sum())
            .collect();
        let resid_sq = norm_sq - coeffs.iter().map(|c| c * c).sum::<f64>();
        if resid_sq <= DEPENDENCE_TOL * norm_sq {
            return;
        }
        let mut v = vec![0.0; size];
        for &r in support {
            v[r] = 1.0;
        }
        self.subtract_projection(&mut v, &coeffs);
        let again: Vec<f64> = self.rows.par_chunks(size).map(|q| dot(q, &v)).collect();
        self.subtract_projection(&mut v, &again);
        let norm = dot(&v, &v).sqrt();
        if norm * norm <= DEPENDENCE_TOL * norm_sq {
            return;
        }
        self.rows.extend(v.iter().map(|x| x / norm));
    }

    fn subtract_projection(&self, v: &mut [f64], coeffs: &[f64]) {
        const CHUNK: usize = 256;
        let size = self.size;
        v.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
            let start = ci * CHUNK;
            for (k, &c) in coeffs.iter().enumerate() {
                if c != 0.0 {
                    let q = &self.rows[k * size + start..k * size + start + chunk.len()];
                    for (x, y) in chunk.iter_mut().zip(q) {
                        *x -= c * y;
                    }
                }
            }
        });
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn junta_basis(m: usize) -> Arc<JuntaBasis> {
    static CACHE: [OnceLock<Arc<JuntaBasis>>; MAX_DECOMPOSE_N + 1] = [const { OnceLock::new() }; MAX_DECOMPOSE_N + 1];
    CACHE[m].get_or_init(|| Arc::new(JuntaBasis::build(m))).clone()
}

/// Components `f^{=0}, …, f^{=n-1}` and their squared norms.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelDecomposition {
    pub components: Vec<SnFunction>,
    /// `‖f^{=d}‖₂²` under the uniform measure.
    pub weights: Vec<f64>,
    /// `dim V_{=d}` as found by the projection.
    pub dims: Vec<usize>,
}

impl LevelDecomposition {
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `max_σ |Σ_d f^{=d}(σ) − f(σ)|`.
    pub fn reconstruction_error(&self, f: &SnFunction) -> f64 {
        (0..f.values().len())
            .map(|r| {
                let s: f64 = self.components.iter().map(|c| c.values()[r]).sum();
                (s - f.values()[r]).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `max_{d≠d'} |⟨f^{=d}, f^{=d'}⟩|`.
    pub fn max_cross_inner(&self) -> f64 {
        let k = self.components.len();
        let mut worst: f64 = 0.0;
        for a in 0..k {
            for b in a + 1..k {
                let ip = self.components[a].inner(&self.components[b]).expect("same domain");
                worst = worst.max(ip.abs());
            }
        }
        worst
    }
}

/// Orthogonal projection of `f` onto each `V_{=d} = V_{≤d} ∩ V_{≤d-1}^⊥`,
/// `V_{≤d}` being the span of the indicators of `d`-umvirates.
pub fn decompose(f: &SnFunction) -> Result<LevelDecomposition> {
    let m = f.domain_n();
    if m > MAX_DECOMPOSE_N {
        return Err(Error::Capacity { what: "degree decomposition", n: m, max: MAX_DECOMPOSE_N });
    }
    f.check_finite()?;
    let basis = junta_basis(m);
    let size = basis.size;
    if basis.rank() != size {
        return Err(Error::Invariant(format!("junta span has rank {} < {size}", basis.rank())));
    }
    let coeffs: Vec<f64> = (0..basis.rank()).into_par_iter().map(|k| dot(basis.row(k), f.values())).collect();
    let mut components = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    let mut dims = Vec::with_capacity(m);
    let mut start = 0;
    for &end in &basis.level_end {
        let mut values = vec![0.0; size];
        for (k, &c) in coeffs.iter().enumerate().take(end).skip(start) {
            for (x, q) in values.iter_mut().zip(basis.row(k)) {
                *x += c * q;
            }
        }
        weights.push(coeffs[start..end].iter().map(|c| c * c).sum::<f64>() / size as f64);
        dims.push(end - start);
        components.push(f.with_values(values));
        start = end;
    }
    Ok(LevelDecomposition { components, weights, dims })
}
