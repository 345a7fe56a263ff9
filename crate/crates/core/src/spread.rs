//! Permutation families as set systems in the `n²`-element cube, their
//! spreadness, and Monte Carlo coverage by random subsets.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::numbers::cmp_rational_roots;
use crate::perm_core::PermFamily;

pub const MAX_SPREAD_DEPTH: usize = 4;

/// A uniform family of subsets of `{1..ground_size}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeFamily {
    ground_size: usize,
    sets: Vec<BitSet>,
}

impl CubeFamily {
    /// Sets are one-based, deduplicated and kept in lexicographic order.
    pub fn new(ground_size: usize, sets: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        if ground_size == 0 {
            return Err(Error::domain("ground set must be nonempty"));
        }
        let mut sorted = Vec::new();
        for mut s in sets {
            s.sort_unstable();
            s.dedup();
            if let Some(&x) = s.iter().find(|&&x| x == 0 || x > ground_size) {
                return Err(Error::domain(format!("element {x} outside 1..={ground_size}")));
            }
            sorted.push(s);
        }
        sorted.sort();
        sorted.dedup();
        let sets = sorted
            .into_iter()
            .map(|s| {
                let mut b = BitSet::new(ground_size);
                s.into_iter().for_each(|x| {
                    b.insert(x - 1);
                });
                b
            })
            .collect();
        Ok(Self { ground_size, sets })
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[BitSet] {
        &self.sets
    }

    /// Member `k` as one-based elements.
    pub fn set(&self, k: usize) -> Vec<usize> {
        self.sets[k].iter().map(|x| x + 1).collect()
    }

    /// `|μ₀| = Σ |S| μ₀(S)`, the mean member size.
    pub fn mean_size(&self) -> f64 {
        if self.sets.is_empty() {
            return 0.0;
        }
        self.sets.iter().map(BitSet::count).sum::<usize>() as f64 / self.sets.len() as f64
    }

    fn check_ground(&self, other: &CubeFamily) -> Result<()> {
        Error::dims(self.ground_size, other.ground_size)
    }
}

/// `σ ↦ {(i−1)n + σ(i)}`: one element per block of `n`.
pub fn embed(f: &PermFamily) -> Result<CubeFamily> {
    if f.is_empty() {
        return Err(Error::domain("cannot embed an empty family"));
    }
    let n = f.n();
    let sets = f.iter().map(|s| (1..=n).map(|i| (i - 1) * n + s.apply(i)).collect());
    CubeFamily::new(n * n, sets)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadReport {
    /// Smallest `(|C| / #{S ⊇ X})^{1/|X|}` over probed `X`.
    pub r: f64,
    pub witness: Vec<usize>,
    /// Members containing the witness.
    pub witness_count: usize,
    pub members: usize,
    pub depth_cap: usize,
}

/// Spreadness certified over all `X` with `1 ≤ |X| ≤ depth_cap` that lie in
/// some member. Ties keep the shortest, then lexicographically first, `X`.
pub fn spreadness(c: &CubeFamily, depth_cap: usize) -> Result<SpreadReport> {
    if c.is_empty() {
        return Err(Error::EmptyFamily("spreadness"));
    }
    if depth_cap == 0 || depth_cap > MAX_SPREAD_DEPTH {
        return Err(Error::domain(format!("depth_cap {depth_cap} outside 1..={MAX_SPREAD_DEPTH}")));
    }
    let counts = c
        .sets
        .par_iter()
        .fold(BTreeMap::<(usize, Vec<usize>), usize>::new, |mut acc, s| {
            let elems: Vec<usize> = s.iter().map(|x| x + 1).collect();
            for d in 1..=depth_cap.min(elems.len()) {
                for x in elems.iter().copied().combinations(d) {
                    *acc.entry((d, x)).or_default() += 1;
                }
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });
    let total = BigUint::from(c.len());
    let mut best: Option<(Vec<usize>, usize)> = None;
    for ((d, x), cnt) in counts {
        let better = match &best {
            None => true,
            Some((bx, bc)) => {
                cmp_rational_roots(&total, &BigUint::from(cnt), d as u32, &total, &BigUint::from(*bc), bx.len() as u32)
                    == Ordering::Less
            }
        };
        if better {
            best = Some((x, cnt));
        }
    }
    // every nonempty member contributes at least one X; all-empty members give r = ∞ in principle
    let Some((witness, cnt)) = best else {
        return Ok(SpreadReport { r: f64::INFINITY, witness: vec![], witness_count: 0, members: c.len(), depth_cap });
    };
    let r = (c.len() as f64 / cnt as f64).powf(1.0 / witness.len() as f64);
    Ok(SpreadReport { r, witness, witness_count: cnt, members: c.len(), depth_cap })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageEstimate {
    pub m: usize,
    pub delta: f64,
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    /// `sqrt(p̂(1−p̂)/samples)`.
    pub std_error: f64,
    pub r: f64,
    pub mean_size: f64,
    /// `1 − (5/log₂(rδ))^m |μ₀|`; `None` when `rδ ≤ 1` leaves it undefined.
    pub theorem_bound: Option<f64>,
    /// No information: undefined or `≤ 0`.
    pub vacuous: bool,
    pub seed: u64,
}

impl CoverageEstimate {
    /// `estimate ≥ max(0, bound) − 3·SE`.
    pub fn consistent(&self) -> bool {
        let floor = self.theorem_bound.unwrap_or(0.0).max(0.0);
        self.estimate >= floor - 3.0 * self.std_error
    }
}

pub fn theorem_bound(r: f64, delta: f64, m: usize, mean_size: f64) -> Option<f64> {
    let l = (r * delta).log2();
    (l > 0.0).then(|| 1.0 - (5.0 / l).powi(m as i32) * mean_size)
}

fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn random_subset(rng: &mut ChaCha8Rng, len: usize, p: f64) -> BitSet {
    let mut w = BitSet::new(len);
    for x in 0..len {
        if p >= 1.0 || rng.random::<f64>() < p {
            w.insert(x);
        }
    }
    w
}

/// Coverage with a depth-3 spreadness computed on the fly.
pub fn coverage_mc(c: &CubeFamily, m: usize, delta: f64, samples: u64, seed: u64) -> Result<CoverageEstimate> {
    let r = spreadness(c, 3)?.r;
    coverage_mc_with_spread(c, m, delta, samples, seed, r)
}

/// Estimates `Pr[∃S ∈ C : S ⊆ W]` for `W` an `(mδ)`-random subset.
/// Sample `s` draws from ChaCha8 seeded by `seed` on stream `s`, so the
/// result does not depend on the thread count.
pub fn coverage_mc_with_spread(
    c: &CubeFamily,
    m: usize,
    delta: f64,
    samples: u64,
    seed: u64,
    r: f64,
) -> Result<CoverageEstimate> {
    if c.is_empty() {
        return Err(Error::EmptyFamily("coverage"));
    }
    let p = m as f64 * delta;
    if m == 0 || delta.is_nan() || delta <= 0.0 || p.is_nan() || p > 1.0 {
        return Err(Error::domain(format!("need 0 < m·delta ≤ 1, got {m}·{delta}")));
    }
    if samples == 0 {
        return Err(Error::domain("samples must be positive"));
    }
    let hits = (0..samples)
        .into_par_iter()
        .filter(|&s| {
            let w = random_subset(&mut sample_rng(seed, s), c.ground_size, p);
            c.sets.iter().any(|a| a.is_subset(&w))
        })
        .count() as u64;
    let estimate = hits as f64 / samples as f64;
    let mean_size = c.mean_size();
    let bound = theorem_bound(r, delta, m, mean_size);
    Ok(CoverageEstimate {
        m,
        delta,
        samples,
        hits,
        estimate,
        std_error: (estimate * (1.0 - estimate) / samples as f64).sqrt(),
        r,
        mean_size,
        theorem_bound: bound,
        vacuous: bound.is_none_or(|b| b <= 0.0),
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossOneCheck {
    /// Every `a ∈ A`, `b ∈ B` share an element.
    pub cross_intersecting: bool,
    /// Indices of the first disjoint pair.
    pub disjoint_witness: Option<(usize, usize)>,
}

pub fn cross_one_check(a: &CubeFamily, b: &CubeFamily) -> Result<CrossOneCheck> {
    a.check_ground(b)?;
    let witness = a
        .sets
        .iter()
        .enumerate()
        .find_map(|(i, x)| b.sets.iter().position(|y| x.is_disjoint(y)).map(|j| (i, j)));
    Ok(CrossOneCheck { cross_intersecting: witness.is_none(), disjoint_witness: witness })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub trials: u64,
    pub seed: u64,
    /// Trials where some `a ∈ A` lies inside `S`.
    pub a_inside: u64,
    /// Trials where some `b ∈ B` lies inside the complement of `S`.
    pub b_outside: u64,
    pub both: u64,
    /// `(trial, a, b)` for the first trial where both events occur.
    pub witness: Option<(u64, Vec<usize>, Vec<usize>)>,
}

impl SplitReport {
    pub fn frequencies(&self) -> (f64, f64, f64) {
        let t = self.trials as f64;
        (self.a_inside as f64 / t, self.b_outside as f64 / t, self.both as f64 / t)
    }
}

/// Splits the ground set by `½`-random subsets `S` and records when `A`
/// has a member inside `S` and `B` a member inside its complement. Any
/// such trial certifies a disjoint pair `(a, b)`.
pub fn disjoint_split_experiment(a: &CubeFamily, b: &CubeFamily, trials: u64, seed: u64) -> Result<SplitReport> {
    a.check_ground(b)?;
    let outcomes: Vec<(Option<usize>, Option<usize>)> = (0..trials)
        .into_par_iter()
        .map(|s| {
            let inside = random_subset(&mut sample_rng(seed, s), a.ground_size, 0.5);
            let outside = inside.complement();
            (
                a.sets.iter().position(|x| x.is_subset(&inside)),
                b.sets.iter().position(|y| y.is_subset(&outside)),
            )
        })
        .collect();
    let mut rep = SplitReport { trials, seed, a_inside: 0, b_outside: 0, both: 0, witness: None };
    for (s, o) in outcomes.into_iter().enumerate() {
        rep.a_inside += o.0.is_some() as u64;
        rep.b_outside += o.1.is_some() as u64;
        if let (Some(i), Some(j)) = o {
            rep.both += 1;
            rep.witness.get_or_insert_with(|| (s as u64, a.set(i), b.set(j)));
        }
    }
    Ok(rep)
}
