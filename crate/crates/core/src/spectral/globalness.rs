use std::cmp::Ordering;
use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{decompose, SnFunction};
use crate::error::{Error, Result};
use crate::numbers::{cmp_rational_roots, factorial_u64};
use crate::perm_core::{RestrictionPattern, SubFamily};

pub const DEFAULT_DEPTH_CAP: usize = 3;

/// Relative margin under which two floating scores count as tied.
const TIE_TOL: f64 = 1e-12;

/// Every pattern of length `1..=depth_cap` on the free coordinates of the
/// space that some member extends, with its member count, in
/// `(len, inputs, outputs)` order.
pub fn pattern_counts(a: &SubFamily, depth_cap: usize) -> Vec<(RestrictionPattern, usize)> {
    let free = a.space().free_inputs();
    let members: Vec<_> = a.family().iter().collect();
    (1..=depth_cap.min(free.len()))
        .flat_map(|d| free.iter().copied().combinations(d))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|inputs| {
            let mut tally: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
            for s in &members {
                *tally.entry(inputs.iter().map(|&i| s.apply(i)).collect()).or_default() += 1;
            }
            tally
                .into_iter()
                .map(|(outputs, c)| {
                    let p = RestrictionPattern::from_tuples(&inputs, &outputs).expect("images are injective");
                    (p, c)
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Result of a globalness scan.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GlobalnessReport {
    pub depth_cap: usize,
    /// `max_p (μ(A_p)/μ(A))^{1/|p|}`.
    pub gamma_density: f64,
    /// `max_p (‖1_{A_p}‖₂/‖1_A‖₂)^{1/|p|}`, the square root of `gamma_density`.
    pub gamma_l2: f64,
    pub witness: RestrictionPattern,
    /// `μ(A_witness)/μ(A)`.
    pub witness_ratio: f64,
}

fn falling(m: usize, k: usize) -> u64 {
    (0..k).map(|i| (m - i) as u64).product()
}

fn check_nonempty(a: &SubFamily) -> Result<()> {
    if a.is_empty() {
        Err(Error::EmptyFamily("globalness"))
    } else {
        Ok(())
    }
}

/// Largest per-coordinate density gain over restrictions of up to
/// `depth_cap` free coordinates; the witness is the first maximizer in
/// pattern order.
pub fn globalness(a: &SubFamily, depth_cap: usize) -> Result<GlobalnessReport> {
    check_nonempty(a)?;
    let m = a.space().free_count();
    if depth_cap == 0 || depth_cap > m.min(4) {
        return Err(Error::domain(format!("depth_cap {depth_cap} outside 1..={}", m.min(4))));
    }
    let size = BigUint::from(a.len());
    // μ(A_p)/μ(A) = count · m!/(m-k)! / |A|
    let mut best: Option<(RestrictionPattern, BigUint, u32)> = None;
    for (p, c) in pattern_counts(a, depth_cap) {
        let k = p.len() as u32;
        let num = BigUint::from(c as u64 * falling(m, p.len()));
        let better = match &best {
            None => true,
            Some((_, bn, bk)) => cmp_rational_roots(&num, &size, k, bn, &size, *bk) == Ordering::Greater,
        };
        if better {
            best = Some((p, num, k));
        }
    }
    let (witness, num, k) = best.ok_or(Error::EmptyFamily("globalness"))?;
    let ratio = num_traits::ToPrimitive::to_f64(&num).expect("finite") / a.len() as f64;
    let gamma_density = ratio.powf(1.0 / k as f64);
    Ok(GlobalnessReport { depth_cap, gamma_density, gamma_l2: gamma_density.sqrt(), witness, witness_ratio: ratio })
}

/// `μ(A_p) ≤ γ^{|p|} μ(A)` for every pattern of length `≤ depth`.
pub fn is_gamma_global(a: &SubFamily, gamma: f64, depth: usize) -> bool {
    let m = a.space().free_count();
    let base = a.density();
    pattern_counts(a, depth).into_iter().all(|(p, c)| {
        let dens = c as f64 / factorial_u64(m - p.len()) as f64;
        dens <= gamma.powi(p.len() as i32) * base * (1.0 + TIE_TOL)
    })
}

#[derive(Clone, Debug)]
pub struct GlobalRestriction {
    pub pattern: RestrictionPattern,
    pub restricted: SubFamily,
    pub density_before: f64,
    pub density_after: f64,
    /// `μ(A_p)/γ^{|p|}`.
    pub score: f64,
}

/// The restriction maximizing `μ(A_p)/γ^{|p|}` over `|p| ≤ depth_cap`
/// (the empty pattern included), so that `μ(A_p) ≥ γ^{|p|} μ(A)`.
pub fn global_restriction(a: &SubFamily, gamma: f64, depth_cap: usize) -> Result<GlobalRestriction> {
    check_nonempty(a)?;
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(Error::domain(format!("gamma must exceed 1, got {gamma}")));
    }
    let m = a.space().free_count();
    let density_before = a.density();
    let mut best_pattern = RestrictionPattern::empty();
    let mut best_score = density_before;
    let mut best_density = density_before;
    for (p, c) in pattern_counts(a, depth_cap.min(m)) {
        let dens = c as f64 / factorial_u64(m - p.len()) as f64;
        let score = dens / gamma.powi(p.len() as i32);
        if score > best_score * (1.0 + TIE_TOL) {
            best_pattern = p;
            best_score = score;
            best_density = dens;
        }
    }
    let restricted = a.restrict(&best_pattern)?;
    let bound = gamma.powi(best_pattern.len() as i32) * density_before;
    if best_density < bound * (1.0 - 1e-9) {
        return Err(Error::Invariant(format!(
            "global restriction {best_pattern} has density {best_density} < {bound}"
        )));
    }
    Ok(GlobalRestriction {
        pattern: best_pattern,
        restricted,
        density_before,
        density_after: best_density,
        score: best_score,
    })
}

/// `‖1_A^{=d}‖₂² / (μ² (γ⁴ d⁻¹ ln(1/μ))^d)`: the constant the level-d
/// inequality would need for this family.
pub fn level_d_audit(a: &SubFamily, d: usize, gamma: f64) -> Result<f64> {
    let mu = a.density();
    if mu <= 0.0 || mu >= 1.0 {
        return Err(Error::domain(format!("log(1/mu) undefined or zero at mu = {mu}")));
    }
    let m = a.space().free_count();
    if d == 0 || d > 4.min(m - 1) {
        return Err(Error::domain(format!("d = {d} outside 1..={}", 4.min(m - 1))));
    }
    let dec = decompose(&SnFunction::sub_indicator(a)?)?;
    let weight = dec.weights[d];
    let denom = mu * mu * (gamma.powi(4) / d as f64 * (1.0 / mu).ln()).powi(d as i32);
    Ok(weight / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm_core::{antipodal_pair, umvirate, PermFamily, Permutation};

    fn sub(f: PermFamily) -> SubFamily {
        f.into()
    }

    #[test]
    fn full_group_is_one_global() {
        for n in 3..=5 {
            for depth in 1..=3 {
                let r = globalness(&sub(PermFamily::full(n).unwrap()), depth).unwrap();
                assert!((r.gamma_density - 1.0).abs() < 1e-12);
                assert_eq!(r.witness, "1->1".parse().unwrap());
            }
        }
    }

    #[test]
    fn dictator_has_gamma_n() {
        let a = sub(umvirate(5, &[1], &[1]).unwrap());
        let r = globalness(&a, 1).unwrap();
        assert!((r.gamma_density - 5.0).abs() < 1e-12);
        assert!((r.gamma_l2 - 5f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.witness, "1->1".parse().unwrap());
    }

    #[test]
    fn antipodal_depth_one() {
        // each member of F fixes 1 into {1,2}: F_{1→1} has 2 of 4 members,
        // density 2/3! vs 4/4!, ratio 2
        let (f, _) = antipodal_pair(4).unwrap();
        let r = globalness(&sub(f), 1).unwrap();
        assert!((r.gamma_density - 2.0).abs() < 1e-12);
        assert_eq!(r.witness, "1->1".parse().unwrap());
    }

    #[test]
    fn empty_and_bad_depth() {
        let e = sub(PermFamily::empty(4).unwrap());
        assert_eq!(globalness(&e, 1).unwrap_err(), Error::EmptyFamily("globalness"));
        let a = sub(PermFamily::full(4).unwrap());
        assert!(globalness(&a, 5).is_err());
        assert!(globalness(&a, 0).is_err());
    }

    #[test]
    fn global_restriction_examples() {
        let full = sub(PermFamily::full(4).unwrap());
        let g = global_restriction(&full, 2.0, 3).unwrap();
        assert!(g.pattern.is_empty());
        assert_eq!(g.restricted.len(), 24);

        let dict = sub(umvirate(4, &[1], &[1]).unwrap());
        let g = global_restriction(&dict, 2.0, 3).unwrap();
        assert_eq!(g.pattern, "1->1".parse().unwrap());
        assert!((g.density_after - 1.0).abs() < 1e-12);

        // density 1/(4-k)! against 2^k: k = 2 and k = 3 tie at 1/8, shorter wins
        let single = sub(PermFamily::from_perms(4, [&Permutation::identity(4)]).unwrap());
        let g = global_restriction(&single, 2.0, 3).unwrap();
        assert_eq!(g.pattern, "1->1,2->2".parse().unwrap());
        assert!((g.score - 0.125).abs() < 1e-12);
        assert!(is_gamma_global(&g.restricted, 2.0, 1));
    }

    #[test]
    fn audit_domain() {
        let full = sub(PermFamily::full(4).unwrap());
        assert!(level_d_audit(&full, 1, 2.0).is_err());
        // two disjoint dictators inside S_5
        let a = umvirate(5, &[1], &[1]).unwrap().union(&umvirate(5, &[1], &[2]).unwrap()).unwrap();
        let a = sub(a);
        let g = globalness(&a, 1).unwrap();
        let c = level_d_audit(&a, 1, g.gamma_l2).unwrap();
        assert!(c.is_finite() && c > 0.0);
        // a 1-junta has nothing above level 1
        assert!(level_d_audit(&a, 2, 2.0).unwrap().abs() < 1e-10);
    }
}
