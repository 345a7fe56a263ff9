use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_t, closure};
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::numbers::factorial_u64;
use crate::perm_core::{agreements, antipodal_pair, symmetric_group, umvirate, PermFamily};

/// Largest `n` for the exhaustive subset scan (`2^{24}` subsets at 4).
pub const MAX_EXACT_N: usize = 4;
/// Largest `n` accepted by branch and bound.
pub const MAX_BB_N: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    ExactOptimal,
    LowerBound,
}

impl std::fmt::Display for SearchStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SearchStatus::ExactOptimal => "exact-optimal",
            SearchStatus::LowerBound => "lower-bound",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub n: usize,
    pub t: usize,
    pub f: PermFamily,
    pub g: PermFamily,
    /// `|F|·|G|`.
    pub product: u64,
    pub status: SearchStatus,
    /// Subsets visited by the scan or nodes expanded by branch and bound.
    pub explored: u64,
    /// `((n - t)!)²`, attained by a pair of equal `t`-umvirates.
    pub witness_bound: u64,
}

fn umvirate_bound(n: usize, t: usize) -> u64 {
    factorial_u64(n - t).pow(2)
}

/// Ranks `τ` with exactly `t - 1` agreements with each `σ`, as rows of
/// `words`-word masks.
fn forbidden_rows(n: usize, t: usize) -> Result<Vec<Vec<u64>>> {
    let all = symmetric_group(n)?;
    let words = all.len().div_ceil(64);
    Ok(all
        .par_iter()
        .map(|s| {
            let mut row = vec![0u64; words];
            for (r, tau) in all.iter().enumerate() {
                if agreements(s, tau) == t - 1 {
                    row[r / 64] |= 1 << (r % 64);
                }
            }
            row
        })
        .collect())
}

fn family_from_words(n: usize, words: &[u64]) -> Result<PermFamily> {
    let size = factorial_u64(n) as usize;
    let ranks = (0..size).filter(|&r| words[r / 64] >> (r % 64) & 1 == 1);
    PermFamily::from_ranks(n, ranks)
}

/// Scans every `F ⊆ S_n` with `G = best_response(F)` maintained as an
/// incremental union of forbidden masks. Ties keep the larger product, then
/// the numerically smaller `F` mask.
pub fn exact_max_product(n: usize, t: usize) -> Result<SearchResult> {
    if n == 0 || n > MAX_EXACT_N {
        return Err(Error::Capacity { what: "exhaustive search", n, max: MAX_EXACT_N });
    }
    check_t(n, t)?;
    let size = factorial_u64(n) as u32;
    let full: u32 = if size == 32 { u32::MAX } else { (1 << size) - 1 };
    let forbid: Vec<u32> = forbidden_rows(n, t)?.into_iter().map(|r| r[0] as u32).collect();

    // (product, F mask) with ties toward the smaller mask
    fn better(a: (u64, u32), b: (u64, u32)) -> (u64, u32) {
        if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
            a
        } else {
            b
        }
    }
    fn scan(k: u32, size: u32, fmask: u32, blocked: u32, full: u32, forbid: &[u32], best: &mut (u64, u32)) {
        if k == size {
            let prod = fmask.count_ones() as u64 * (full & !blocked).count_ones() as u64;
            *best = better((prod, fmask), *best);
            return;
        }
        scan(k + 1, size, fmask, blocked, full, forbid, best);
        scan(k + 1, size, fmask | 1 << k, blocked | forbid[k as usize], full, forbid, best);
    }

    // the top `split` ranks are enumerated as independent prefixes
    let split = size.min(8);
    let low = size - split;
    let best = (0u32..1 << split)
        .into_par_iter()
        .map(|prefix| {
            let mut fmask = 0u32;
            let mut blocked = 0u32;
            for b in 0..split {
                if prefix >> b & 1 == 1 {
                    fmask |= 1 << (low + b);
                    blocked |= forbid[(low + b) as usize];
                }
            }
            let mut best = (0, u32::MAX);
            scan(0, low, fmask, blocked, full, &forbid, &mut best);
            best
        })
        .reduce(|| (0, u32::MAX), better);

    let fmask = best.1;
    let blocked = (0..size).filter(|&k| fmask >> k & 1 == 1).fold(0, |acc, k| acc | forbid[k as usize]);
    let f = family_from_words(n, &[fmask as u64])?;
    let g = family_from_words(n, &[(full & !blocked) as u64])?;
    Ok(SearchResult {
        n,
        t,
        product: (f.len() * g.len()) as u64,
        f,
        g,
        status: SearchStatus::ExactOptimal,
        explored: 1u64 << size,
        witness_bound: umvirate_bound(n, t),
    })
}

fn popcount(a: &[u64]) -> u64 {
    a.iter().map(|w| w.count_ones() as u64).sum()
}

fn and_count(a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as u64).sum()
}

struct Bb<'a> {
    forbid: &'a [Vec<u64>],
    budget: u64,
    nodes: u64,
    aborted: bool,
    best: u64,
    best_f: Vec<u64>,
}

impl Bb<'_> {
    fn offer(&mut self, f: &[u64], g: &[u64]) {
        let prod = popcount(f) * popcount(g);
        if prod > self.best {
            self.best = prod;
            self.best_f = f.to_vec();
        }
    }

    /// `f` is the committed part of `F`, `g = best_response(f)`, `cand` the
    /// undecided permutations.
    fn expand(&mut self, mut f: Vec<u64>, g: Vec<u64>, mut cand: Vec<usize>) {
        if self.nodes >= self.budget {
            self.aborted = true;
            return;
        }
        self.nodes += 1;

        // candidates blocking nothing in G are free to include
        let mut losses = Vec::with_capacity(cand.len());
        cand.retain(|&c| {
            let loss = and_count(&self.forbid[c], &g);
            if loss == 0 {
                f[c / 64] |= 1 << (c % 64);
                false
            } else {
                losses.push(loss);
                true
            }
        });
        self.offer(&f, &g);
        if cand.is_empty() {
            return;
        }

        // adding k candidates costs at least the k-th smallest loss
        let (fc, gc) = (popcount(&f), popcount(&g));
        let mut sorted = losses.clone();
        sorted.sort_unstable();
        let bound = sorted
            .iter()
            .enumerate()
            .map(|(k, &l)| (fc + k as u64 + 1) * (gc - l))
            .fold(fc * gc, u64::max);
        if bound <= self.best {
            return;
        }

        let (pos, _) = losses.iter().enumerate().fold((0, 0), |acc, (p, &l)| if l > acc.1 { (p, l) } else { acc });
        let c = cand.remove(pos);
        let mut f_in = f.clone();
        f_in[c / 64] |= 1 << (c % 64);
        let g_in: Vec<u64> = g.iter().zip(&self.forbid[c]).map(|(x, y)| x & !y).collect();
        self.expand(f_in, g_in, cand.clone());
        self.expand(f, g, cand);
    }
}

/// Branch and bound over membership in `F`, with `G` always the best
/// response. The identity is placed in `F` at the root (left translation
/// preserves agreements), candidates are branched in descending order of
/// how much of `G` they would block, and a subtree is cut when
/// `max_k (|F| + k)(|G| − L_(k))`, `L_(k)` the `k`-th smallest loss, cannot
/// beat the incumbent. Exhausting `node_budget` yields a lower bound.
pub fn bb_max_product(n: usize, t: usize, node_budget: u64) -> Result<SearchResult> {
    if n == 0 || n > MAX_BB_N {
        return Err(Error::Capacity { what: "branch and bound", n, max: MAX_BB_N });
    }
    check_t(n, t)?;
    let size = factorial_u64(n) as usize;
    let words = size.div_ceil(64);
    let forbid = forbidden_rows(n, t)?;

    let mut bb = Bb { forbid: &forbid, budget: node_budget, nodes: 0, aborted: false, best: 0, best_f: vec![0; words] };

    // seed incumbents from the known constructions and their closures
    let fixed: Vec<usize> = (1..=t).collect();
    let mut seeds = vec![umvirate(n, &fixed, &fixed)?];
    if n.is_multiple_of(2) && t >= 2 {
        seeds.push(antipodal_pair(n)?.0);
    }
    for s in seeds {
        let (f, _, _) = closure(&s, t)?;
        let fw: Vec<u64> = f.bits().words().to_vec();
        let g = blocked_complement(&fw, &forbid, size);
        bb.offer(&fw, &g);
    }

    let mut root_f = vec![0u64; words];
    root_f[0] |= 1;
    let root_g: Vec<u64> = BitSet::full(size).words().iter().zip(&forbid[0]).map(|(x, y)| x & !y).collect();
    bb.expand(root_f, root_g, (1..size).collect());

    let f = family_from_words(n, &bb.best_f)?;
    let g = family_from_words(n, &blocked_complement(&bb.best_f, &forbid, size))?;
    Ok(SearchResult {
        n,
        t,
        product: (f.len() * g.len()) as u64,
        f,
        g,
        status: if bb.aborted { SearchStatus::LowerBound } else { SearchStatus::ExactOptimal },
        explored: bb.nodes,
        witness_bound: umvirate_bound(n, t),
    })
}

fn blocked_complement(f: &[u64], forbid: &[Vec<u64>], size: usize) -> Vec<u64> {
    let mut g = BitSet::full(size).words().to_vec();
    for r in (0..size).filter(|&r| f[r / 64] >> (r % 64) & 1 == 1) {
        g.iter_mut().zip(&forbid[r]).for_each(|(x, y)| *x &= !y);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm_core::is_cross_free;

    #[test]
    fn exact_small_cases() {
        let r = exact_max_product(3, 3).unwrap();
        assert_eq!(r.product, 36);
        assert_eq!(r.status, SearchStatus::ExactOptimal);
        assert_eq!(exact_max_product(2, 1).unwrap().product, 1);
        assert!(exact_max_product(5, 2).is_err());
        assert!(exact_max_product(3, 0).is_err());
    }

    #[test]
    fn bb_matches_exact_up_to_three() {
        for n in 1..=3 {
            for t in 1..=n {
                let e = exact_max_product(n, t).unwrap();
                let b = bb_max_product(n, t, 1_000_000).unwrap();
                assert_eq!((b.product, b.status), (e.product, e.status), "n={n} t={t}");
                assert!(is_cross_free(&b.f, &b.g, t).unwrap());
                assert!(e.product >= e.witness_bound);
            }
        }
    }

    #[test]
    fn bb_budget_gives_lower_bound() {
        let r = bb_max_product(5, 2, 1).unwrap();
        assert_eq!(r.status, SearchStatus::LowerBound);
        assert!(r.product >= 36);
        assert!(is_cross_free(&r.f, &r.g, 2).unwrap());
        assert!(bb_max_product(7, 2, 10).is_err());
    }
}
