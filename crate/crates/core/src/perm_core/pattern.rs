use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Permutation;
use crate::error::{Error, Result};
use crate::numbers::factorial_u64;

/// A partial injection `i_1→j_1, …, i_k→j_k`, kept sorted by input.
///
/// Ordering is by `(len, inputs, outputs)`, the tie-break order used by every
/// maximizing scan in the crate.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct RestrictionPattern {
    pairs: Vec<(usize, usize)>,
}

impl RestrictionPattern {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::pattern(format!("input {} restricted twice", w[0].0)));
            }
        }
        let mut outs: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        outs.sort_unstable();
        if let Some(w) = outs.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::pattern(format!("output {} used twice", w[0])));
        }
        if pairs.iter().any(|&(i, j)| i == 0 || j == 0) {
            return Err(Error::pattern("coordinates are one-based"));
        }
        Ok(RestrictionPattern { pairs })
    }

    pub fn empty() -> Self {
        RestrictionPattern::default()
    }

    pub fn single(i: usize, j: usize) -> Result<Self> {
        Self::new(vec![(i, j)])
    }

    /// Pairs `inputs[ℓ] → outputs[ℓ]`.
    pub fn from_tuples(inputs: &[usize], outputs: &[usize]) -> Result<Self> {
        if inputs.len() != outputs.len() {
            return Err(Error::pattern(format!(
                "{} inputs but {} outputs",
                inputs.len(),
                outputs.len()
            )));
        }
        Self::new(inputs.iter().copied().zip(outputs.iter().copied()).collect())
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn inputs(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().map(|p| p.0)
    }

    pub fn outputs(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().map(|p| p.1)
    }

    pub fn output_of(&self, i: usize) -> Option<usize> {
        self.pairs.binary_search_by_key(&i, |p| p.0).ok().map(|k| self.pairs[k].1)
    }

    pub fn validate_for(&self, n: usize) -> Result<()> {
        match self.pairs.iter().find(|&&(i, j)| i > n || j > n) {
            Some((i, j)) => Err(Error::pattern(format!("{i}->{j} outside 1..={n}"))),
            None => Ok(()),
        }
    }

    /// True iff `sigma(i) = j` for every pair.
    pub fn matches(&self, sigma: &Permutation) -> bool {
        self.pairs.iter().all(|&(i, j)| i <= sigma.n() && sigma.apply(i) == j)
    }

    /// True iff `sigma(i) != j` for every pair.
    pub fn avoided_by(&self, sigma: &Permutation) -> bool {
        self.pairs.iter().all(|&(i, j)| i > sigma.n() || sigma.apply(i) != j)
    }

    /// Union of two patterns; identical pairs merge, conflicting ones fail.
    pub fn concat(&self, other: &RestrictionPattern) -> Result<RestrictionPattern> {
        let mut pairs = self.pairs.clone();
        for &p in &other.pairs {
            if !pairs.contains(&p) {
                pairs.push(p);
            }
        }
        Self::new(pairs)
    }
}

impl PartialOrd for RestrictionPattern {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RestrictionPattern {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.inputs().cmp(other.inputs()))
            .then_with(|| self.outputs().cmp(other.outputs()))
    }
}

impl fmt::Debug for RestrictionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RestrictionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            return write!(f, "-");
        }
        for (k, (i, j)) in self.pairs.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}->{j}")?;
        }
        Ok(())
    }
}

impl FromStr for RestrictionPattern {
    type Err = Error;

    /// Parses `1->2,3->1`; `-` or the empty string is the empty pattern.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "-" {
            return Ok(Self::empty());
        }
        let pairs = s
            .split(',')
            .map(|item| {
                let (a, b) = item
                    .split_once("->")
                    .ok_or_else(|| Error::pattern(format!("expected i->j, got {item:?}")))?;
                let parse = |x: &str| {
                    x.trim().parse::<usize>().map_err(|e| Error::pattern(format!("{x:?}: {e}")))
                };
                Ok((parse(a)?, parse(b)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(pairs)
    }
}

/// The permutations of `S_n` extending a fixed pattern, `P_{n,k}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct SubSpace {
    n: usize,
    fixed: RestrictionPattern,
}

impl SubSpace {
    pub fn new(n: usize, fixed: RestrictionPattern) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("n must be positive"));
        }
        fixed.validate_for(n)?;
        Ok(SubSpace { n, fixed })
    }

    pub fn full(n: usize) -> Self {
        SubSpace { n, fixed: RestrictionPattern::empty() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fixed(&self) -> &RestrictionPattern {
        &self.fixed
    }

    /// Number of unrestricted coordinates, `n - k`.
    pub fn free_count(&self) -> usize {
        self.n - self.fixed.len()
    }

    /// `(n - k)!`; requires `n - k <= 20`.
    pub fn size(&self) -> u64 {
        factorial_u64(self.free_count())
    }

    pub fn contains(&self, sigma: &Permutation) -> bool {
        sigma.n() == self.n && self.fixed.matches(sigma)
    }

    pub fn is_free_input(&self, i: usize) -> bool {
        self.fixed.output_of(i).is_none()
    }

    pub fn is_free_output(&self, j: usize) -> bool {
        !self.fixed.outputs().any(|x| x == j)
    }

    pub fn free_inputs(&self) -> Vec<usize> {
        (1..=self.n).filter(|&i| self.is_free_input(i)).collect()
    }

    pub fn free_outputs(&self) -> Vec<usize> {
        (1..=self.n).filter(|&j| self.is_free_output(j)).collect()
    }

    pub fn extend(&self, more: &RestrictionPattern) -> Result<SubSpace> {
        SubSpace::new(self.n, self.fixed.concat(more)?)
    }

    /// Two spaces fixing a common input to different outputs on every shared
    /// input, so no pair drawn from them agrees on a shared fixed coordinate.
    pub fn non_intersecting(&self, other: &SubSpace) -> bool {
        let mut shared = 0;
        for &(i, j) in self.fixed.pairs() {
            if let Some(j2) = other.fixed.output_of(i) {
                if j == j2 {
                    return false;
                }
                shared += 1;
            }
        }
        self.n == other.n && shared > 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_injective() {
        assert!(RestrictionPattern::new(vec![(1, 2), (1, 3)]).is_err());
        assert!(RestrictionPattern::new(vec![(1, 2), (3, 2)]).is_err());
        assert!(RestrictionPattern::from_tuples(&[1, 2], &[1]).is_err());
    }

    #[test]
    fn parse_and_display() {
        let p: RestrictionPattern = "3->1, 1->2".parse().unwrap();
        assert_eq!(p.to_string(), "1->2,3->1");
        assert_eq!("-".parse::<RestrictionPattern>().unwrap(), RestrictionPattern::empty());
        assert!("1-2".parse::<RestrictionPattern>().is_err());
    }

    #[test]
    fn ordering_is_len_then_inputs_then_outputs() {
        let a: RestrictionPattern = "2->1".parse().unwrap();
        let b: RestrictionPattern = "1->3,2->1".parse().unwrap();
        let c: RestrictionPattern = "1->4,2->1".parse().unwrap();
        assert!(a < b && b < c);
    }

    #[test]
    fn concat_conflicts() {
        let a: RestrictionPattern = "1->2".parse().unwrap();
        let b: RestrictionPattern = "1->3".parse().unwrap();
        assert!(a.concat(&b).is_err());
        assert_eq!(a.concat(&a).unwrap(), a);
    }

    #[test]
    fn non_intersecting_spaces() {
        let s1 = SubSpace::new(4, "1->1".parse().unwrap()).unwrap();
        let s2 = SubSpace::new(4, "1->2".parse().unwrap()).unwrap();
        assert!(s1.non_intersecting(&s2));
        assert!(!s1.non_intersecting(&s1));
        assert_eq!(s1.size(), 6);
        assert_eq!(s1.free_inputs(), vec![2, 3, 4]);
    }
}
