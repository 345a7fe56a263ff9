//! The invariant suite behind `permint verify`.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Check;
use crate::bounds;
use crate::error::Result;
use crate::extremal;
use crate::numbers::{factorial, factorial_u64};
use crate::perm_core::{
    agreements, antipodal_pair, count_with_fixed_points, fixed_point_free_involutions, is_cross_free, symmetric_group,
    umvirate, unseparated_pairs_family, PermFamily, Permutation,
};
use crate::spectral::{self, SnFunction};
use crate::spread;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Level {
    /// `n ≤ 5` checks, a few seconds.
    Quick,
    /// Adds the `n = 6` checks and the `n = 4` search oracle comparison.
    Full,
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn add(&mut self, name: &str, outcome: Result<(bool, String)>) {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        self.checks.push(Check { name: name.to_string(), passed, detail });
    }
}

fn random_function(n: usize, rng: &mut ChaCha8Rng) -> SnFunction {
    let values = (0..factorial_u64(n)).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    SnFunction::new(n, values).expect("valid length")
}

fn ranks(max_n: usize) -> Result<(bool, String)> {
    for n in 1..=max_n {
        for (r, p) in symmetric_group(n)?.iter().enumerate() {
            if p.rank() != r as u64 || Permutation::from_rank(n, r as u64)? != *p {
                return Ok((false, format!("rank mismatch at n={n} r={r}")));
            }
        }
    }
    Ok((true, format!("n <= {max_n}")))
}

fn umvirates(max_n: usize) -> Result<(bool, String)> {
    for n in 1..=max_n {
        for t in 1..=n.min(3) {
            let fixed: Vec<usize> = (1..=t).collect();
            let u = umvirate(n, &fixed, &fixed)?;
            if u.len() as u64 != factorial_u64(n - t) {
                return Ok((false, format!("size at n={n} t={t}")));
            }
            let m = u.members();
            if m.iter().any(|a| m.iter().any(|b| agreements(a, b) < t)) {
                return Ok((false, format!("pair below t at n={n} t={t}")));
            }
        }
    }
    Ok((true, String::new()))
}

fn constructions(max_n: usize) -> Result<(bool, String)> {
    for n in (2..=max_n).step_by(2) {
        let (f, g) = antipodal_pair(n)?;
        let disjoint = f.iter().all(|a| g.iter().all(|b| agreements(a, b) == 0));
        let sizes = BigUint::from(unseparated_pairs_family(n)?.len()) == bounds::unseparated_size(n)?
            && BigUint::from(fixed_point_free_involutions(n)?.len()) == bounds::involution_size(n)?;
        if !disjoint || !sizes {
            return Ok((false, format!("n={n}")));
        }
    }
    Ok((true, String::new()))
}

fn fixed_points(max_n: usize) -> Result<(bool, String)> {
    for n in 1..=max_n {
        let mut tally = vec![0usize; n + 1];
        for p in symmetric_group(n)? {
            tally[p.fixed_points()] += 1;
        }
        let mut sum = BigUint::zero();
        for (j, &c) in tally.iter().enumerate() {
            let formula = count_with_fixed_points(n, j)?;
            if formula != BigUint::from(c) {
                return Ok((false, format!("n={n} j={j}")));
            }
            sum += formula;
        }
        if sum != factorial(n) {
            return Ok((false, format!("sum at n={n}")));
        }
    }
    Ok((true, String::new()))
}

fn spectral_identities(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let f = random_function(n, rng);
        let dec = spectral::decompose(&f)?;
        let parseval = (dec.total_weight() - f.norm_sq()).abs() / f.norm_sq();
        let l1 = spectral::level_one_check(&f)?;
        let var = spectral::restriction_variance(&f)? * (n - 1) as f64;
        let var_err = (var - dec.weights[1]).abs() / dec.weights[1].abs().max(1e-300);
        for e in [parseval, dec.max_cross_inner(), l1.max_pointwise, l1.weight_rel_err(), var_err] {
            worst = worst.max(e);
        }
    }
    Ok((worst <= 1e-8, format!("n={n} worst error {worst:.3e}")))
}

fn embedding(max_n: usize) -> Result<(bool, String)> {
    for n in 1..=max_n {
        let all = symmetric_group(n)?;
        let c = spread::embed(&PermFamily::full(n)?)?;
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                if c.sets()[i].intersection_count(&c.sets()[j]) != agreements(a, b) {
                    return Ok((false, format!("n={n}")));
                }
            }
        }
    }
    Ok((true, String::new()))
}

fn spread_floor(ns: &[usize]) -> Result<(bool, String)> {
    let mut detail = Vec::new();
    for &n in ns {
        let r = spread::spreadness(&spread::embed(&PermFamily::full(n)?)?, 3)?.r;
        detail.push(format!("n={n} r={r:.4}"));
        if r < n as f64 / std::f64::consts::E {
            return Ok((false, detail.join(" ")));
        }
    }
    Ok((true, detail.join(" ")))
}

fn agreement_formula(max_n: usize) -> Result<(bool, String)> {
    for n in 1..=max_n {
        for r in 0..=3.min(n / 2) {
            let mut sum = BigUint::zero();
            for j in 0..=n - r {
                let exact = bounds::agreement_count_exact(n, r, j)?;
                let f = bounds::agreement_prob_formula(n, r, j)? * num_rational::BigRational::from_integer(factorial(n - r).into());
                if f != num_rational::BigRational::from_integer(exact.clone().into()) {
                    return Ok((false, format!("n={n} r={r} j={j}")));
                }
                sum += exact;
            }
            if sum != factorial(n - r) {
                return Ok((false, format!("row sum n={n} r={r}")));
            }
        }
    }
    Ok((true, String::new()))
}

fn main_recurrence() -> Result<(bool, String)> {
    for n in 1..=12 {
        for t in 1..=n {
            for m in 0..n - t {
                let k = (n - m - t) as u64;
                if bounds::main_bound(n, t, m)? * 4u32 != bounds::main_bound(n, t, m + 1)? * (k * k) {
                    return Ok((false, format!("n={n} t={t} m={m}")));
                }
            }
        }
    }
    Ok((true, String::new()))
}

fn crossover(ns: &[usize]) -> Result<(bool, String)> {
    let mut detail = Vec::new();
    for &n in ns {
        let c = bounds::crossover_t(n)?;
        let x = c as f64 * (n as f64).log2() / n as f64;
        detail.push(format!("n={n} t={c}"));
        if !(x > 0.5 && x <= 1.1) {
            return Ok((false, detail.join(" ")));
        }
    }
    Ok((true, detail.join(" ")))
}

fn search_oracle(max_n: usize) -> Result<(bool, String)> {
    for n in 1..=max_n {
        for t in 1..=n {
            let e = extremal::exact_max_product(n, t)?;
            let b = extremal::bb_max_product(n, t, 10_000_000)?;
            if (e.product, e.status) != (b.product, b.status)
                || !is_cross_free(&e.f, &e.g, t)?
                || !is_cross_free(&b.f, &b.g, t)?
                || e.product < e.witness_bound
            {
                return Ok((false, format!("n={n} t={t}")));
            }
        }
    }
    Ok((true, format!("n <= {max_n}")))
}

fn antitone(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let n = 4;
    let size = factorial_u64(n) as usize;
    for t in 1..=n {
        let mut f = PermFamily::empty(n)?;
        let mut prev = extremal::best_response(&f, t)?;
        for _ in 0..8 {
            f = f.union(&PermFamily::from_ranks(n, [rng.random_range(0..size)])?)?;
            let next = extremal::best_response(&f, t)?;
            if !next.is_subset(&prev) {
                return Ok((false, format!("t={t}")));
            }
            prev = next;
        }
    }
    Ok((true, String::new()))
}

fn coverage(seed: u64) -> Result<(bool, String)> {
    let c = spread::embed(&PermFamily::full(4)?)?;
    let r = spread::spreadness(&c, 3)?.r;
    let a = spread::coverage_mc_with_spread(&c, 4, 0.1, 2000, seed, r)?;
    let b = spread::coverage_mc_with_spread(&c, 4, 0.1, 2000, seed, r)?;
    Ok((a == b && a.consistent(), format!("estimate {:.4}", a.estimate)))
}

/// Runs the invariant checks; randomized ones draw from ChaCha8 seeded
/// with `seed`.
pub fn run_suite(level: Level, seed: u64) -> Vec<Check> {
    let full = level == Level::Full;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Suite { checks: Vec::new() };
    s.add("rank_round_trip", ranks(if full { 7 } else { 5 }));
    s.add("umvirate_agreement", umvirates(if full { 6 } else { 5 }));
    s.add("constructions", constructions(if full { 8 } else { 6 }));
    s.add("fixed_point_counts", fixed_points(if full { 8 } else { 6 }));
    s.add("spectral_identities_s4", spectral_identities(4, 10, &mut rng));
    if full {
        s.add("spectral_identities_s5", spectral_identities(5, 10, &mut rng));
    }
    s.add("embedding_agreements", embedding(if full { 5 } else { 4 }));
    s.add("spreadness_floor", spread_floor(if full { &[4, 5, 6] } else { &[4, 5] }));
    s.add("agreement_formula", agreement_formula(if full { 8 } else { 6 }));
    s.add("main_bound_recurrence", main_recurrence());
    s.add("crossover_window", crossover(if full { &[256, 512, 1024] } else { &[256] }));
    s.add("search_oracle", search_oracle(if full { 4 } else { 3 }));
    s.add("best_response_antitone", antitone(&mut rng));
    s.add("coverage_determinism", coverage(seed));
    s.checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let checks = run_suite(Level::Quick, 0);
        let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
        assert!(failed.is_empty(), "{failed:?}");
    }
}
