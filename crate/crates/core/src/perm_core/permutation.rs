use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numbers::factorial_u64;

/// Largest `n` for which the whole of `S_n` is ever materialized.
pub const MAX_ENUM_N: usize = 8;

/// Largest `n` whose lexicographic ranks fit in a `u64`.
pub const MAX_RANK_N: usize = 20;

/// A bijection on `{1..n}` stored by its one-based images.
///
/// The derived ordering is lexicographic on the image sequence, which is the
/// order of lexicographic rank.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::domain("a permutation needs n >= 1"));
        }
        if n > u8::MAX as usize {
            return Err(Error::Capacity { what: "permutation", n, max: u8::MAX as usize });
        }
        let mut seen = vec![false; n];
        for (pos, &v) in images.iter().enumerate() {
            if v == 0 || v > n {
                return Err(Error::domain(format!("image {v} at position {} is outside 1..={n}", pos + 1)));
            }
            if std::mem::replace(&mut seen[v - 1], true) {
                return Err(Error::domain(format!("image {v} appears twice")));
            }
        }
        Ok(Permutation { images: images.into_iter().map(|v| v as u8).collect() })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (1..=n as u8).collect() }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// `σ(i)` for one-based `i`.
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1] as usize
    }

    /// One-based images, position `i - 1` holding `σ(i)`.
    #[inline]
    pub fn images(&self) -> &[u8] {
        &self.images
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.images.iter().map(|&v| v as usize).collect()
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.n()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v as usize - 1] = i as u8 + 1;
        }
        Permutation { images: inv }
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        Error::dims(self.n(), other.n())?;
        Ok(Permutation { images: other.images.iter().map(|&v| self.images[v as usize - 1]).collect() })
    }

    pub fn fixed_points(&self) -> usize {
        self.images.iter().enumerate().filter(|(i, &v)| *i + 1 == v as usize).count()
    }

    /// Lexicographic rank in `S_n` via the factorial number system.
    pub fn rank(&self) -> u64 {
        let n = self.n();
        assert!(n <= MAX_RANK_N, "rank needs n <= {MAX_RANK_N}");
        let mut used: u32 = 0;
        let mut rank = 0u64;
        for (pos, &v) in self.images.iter().enumerate() {
            let v = v as u32 - 1;
            let smaller_unused = v - (used & ((1 << v) - 1)).count_ones();
            rank += smaller_unused as u64 * factorial_u64(n - 1 - pos);
            used |= 1 << v;
        }
        rank
    }

    pub fn from_rank(n: usize, rank: u64) -> Result<Permutation> {
        if n == 0 || n > MAX_RANK_N {
            return Err(Error::Capacity { what: "rank/unrank", n, max: MAX_RANK_N });
        }
        if rank >= factorial_u64(n) {
            return Err(Error::domain(format!("rank {rank} >= {n}!")));
        }
        let mut pool: Vec<u8> = (1..=n as u8).collect();
        let mut rem = rank;
        let mut images = Vec::with_capacity(n);
        for pos in 0..n {
            let f = factorial_u64(n - 1 - pos);
            let idx = (rem / f) as usize;
            rem %= f;
            images.push(pool.remove(idx));
        }
        Ok(Permutation { images })
    }

    /// Drops the positions and values of `fixed` and relabels the rest
    /// order-preservingly, giving a permutation of `S_{n-k}`.
    ///
    /// The caller guarantees `self` extends `fixed`.
    pub fn compress(&self, fixed: &super::RestrictionPattern) -> Permutation {
        debug_assert!(fixed.matches(self));
        let n = self.n();
        let mut in_dropped = vec![false; n + 1];
        let mut out_dropped = vec![false; n + 1];
        for &(i, j) in fixed.pairs() {
            in_dropped[i] = true;
            out_dropped[j] = true;
        }
        // new label of value v = v - #dropped values below v
        let mut relabel = vec![0u8; n + 1];
        let mut next = 0u8;
        for v in 1..=n {
            if !out_dropped[v] {
                next += 1;
                relabel[v] = next;
            }
        }
        let images = (1..=n)
            .filter(|&i| !in_dropped[i])
            .map(|i| relabel[self.apply(i)])
            .collect();
        Permutation { images }
    }

    /// Inverse of [`compress`](Self::compress): re-inserts the fixed coordinates.
    pub fn expand(&self, fixed: &super::RestrictionPattern, n: usize) -> Permutation {
        let mut in_fixed = vec![0u8; n + 1];
        let mut out_dropped = vec![false; n + 1];
        for &(i, j) in fixed.pairs() {
            in_fixed[i] = j as u8;
            out_dropped[j] = true;
        }
        let free_values: Vec<u8> = (1..=n as u8).filter(|&v| !out_dropped[v as usize]).collect();
        let mut small = self.images.iter();
        let images = (1..=n)
            .map(|i| match in_fixed[i] {
                0 => free_values[*small.next().expect("enough free positions") as usize - 1],
                j => j,
            })
            .collect();
        Permutation { images }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, v) in self.images.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.images.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.to_vec()
    }
}

/// `|{i : a(i) = b(i)}|`.
pub fn intersection_size(a: &Permutation, b: &Permutation) -> Result<usize> {
    Error::dims(a.n(), b.n())?;
    Ok(agreements(a, b))
}

#[inline]
pub(crate) fn agreements(a: &Permutation, b: &Permutation) -> usize {
    a.images.iter().zip(&b.images).filter(|(x, y)| x == y).count()
}

/// All of `S_n` in lexicographic order, materialized once per `n`.
pub fn symmetric_group(n: usize) -> Result<&'static [Permutation]> {
    static TABLES: [OnceLock<Vec<Permutation>>; MAX_ENUM_N + 1] = [const { OnceLock::new() }; MAX_ENUM_N + 1];
    if n == 0 || n > MAX_ENUM_N {
        return Err(Error::Capacity { what: "S_n enumeration", n, max: MAX_ENUM_N });
    }
    Ok(TABLES[n].get_or_init(|| LexPermutations::new(n).collect()))
}

/// Lexicographic enumeration of `S_n` by the next-permutation step.
pub struct LexPermutations {
    current: Option<Vec<u8>>,
}

impl LexPermutations {
    pub fn new(n: usize) -> Self {
        LexPermutations { current: Some((1..=n as u8).collect()) }
    }
}

impl Iterator for LexPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let cur = self.current.take()?;
        let out = Permutation { images: cur.clone() };
        let mut next = cur;
        let n = next.len();
        if n >= 2 {
            if let Some(i) = (0..n - 1).rev().find(|&i| next[i] < next[i + 1]) {
                let j = (i + 1..n).rev().find(|&j| next[j] > next[i]).expect("successor exists");
                next.swap(i, j);
                next[i + 1..].reverse();
                self.current = Some(next);
            }
        }
        Some(out)
    }
}
