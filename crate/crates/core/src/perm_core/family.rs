use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{agreements, symmetric_group, Permutation, RestrictionPattern, SubSpace, MAX_ENUM_N};
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::numbers::{binomial, derangements, factorial_u64};

/// A set of permutations of `S_n`, stored as a bitset over lexicographic ranks.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PermFamily {
    n: usize,
    bits: BitSet,
}

impl PermFamily {
    fn check_n(n: usize) -> Result<()> {
        if n == 0 || n > MAX_ENUM_N {
            return Err(Error::Capacity { what: "permutation family", n, max: MAX_ENUM_N });
        }
        Ok(())
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::check_n(n)?;
        Ok(PermFamily { n, bits: BitSet::new(factorial_u64(n) as usize) })
    }

    pub fn full(n: usize) -> Result<Self> {
        Self::check_n(n)?;
        Ok(PermFamily { n, bits: BitSet::full(factorial_u64(n) as usize) })
    }

    /// Builds a family from members; duplicates collapse.
    pub fn from_perms<'a>(n: usize, members: impl IntoIterator<Item = &'a Permutation>) -> Result<Self> {
        let mut fam = Self::empty(n)?;
        for m in members {
            Error::dims(n, m.n())?;
            fam.bits.insert(m.rank() as usize);
        }
        Ok(fam)
    }

    pub fn from_ranks(n: usize, ranks: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut fam = Self::empty(n)?;
        let cap = fam.bits.capacity();
        for r in ranks {
            if r >= cap {
                return Err(Error::domain(format!("rank {r} >= {n}!")));
            }
            fam.bits.insert(r);
        }
        Ok(fam)
    }

    pub fn from_bits(n: usize, bits: BitSet) -> Result<Self> {
        Self::check_n(n)?;
        Error::dims(factorial_u64(n) as usize, bits.capacity())?;
        Ok(PermFamily { n, bits })
    }

    /// Members of `S_n` satisfying `keep`.
    pub fn from_predicate(n: usize, keep: impl Fn(&Permutation) -> bool) -> Result<Self> {
        let all = symmetric_group(n)?;
        let mut fam = Self::empty(n)?;
        for (r, p) in all.iter().enumerate() {
            if keep(p) {
                fam.bits.insert(r);
            }
        }
        Ok(fam)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.bits.count()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &BitSet {
        &self.bits
    }

    pub fn contains(&self, sigma: &Permutation) -> bool {
        sigma.n() == self.n && self.bits.contains(sigma.rank() as usize)
    }

    pub fn contains_rank(&self, rank: usize) -> bool {
        self.bits.contains(rank)
    }

    pub fn ranks(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter()
    }

    /// Members in rank order.
    pub fn iter(&self) -> impl Iterator<Item = &'static Permutation> + '_ {
        let table = symmetric_group(self.n).expect("n validated at construction");
        self.bits.iter().map(move |r| &table[r])
    }

    pub fn members(&self) -> Vec<Permutation> {
        self.iter().cloned().collect()
    }

    /// Uniform density `|F| / n!`.
    pub fn density(&self) -> f64 {
        self.len() as f64 / self.bits.capacity() as f64
    }

    pub fn filter(&self, keep: impl Fn(&Permutation) -> bool) -> PermFamily {
        let mut out = PermFamily { n: self.n, bits: BitSet::new(self.bits.capacity()) };
        for (r, p) in self.bits.iter().zip(self.iter()) {
            if keep(p) {
                out.bits.insert(r);
            }
        }
        out
    }

    pub fn union(&self, other: &PermFamily) -> Result<PermFamily> {
        Error::dims(self.n, other.n)?;
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        Ok(PermFamily { n: self.n, bits })
    }

    pub fn intersection(&self, other: &PermFamily) -> Result<PermFamily> {
        Error::dims(self.n, other.n)?;
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        Ok(PermFamily { n: self.n, bits })
    }

    pub fn difference(&self, other: &PermFamily) -> Result<PermFamily> {
        Error::dims(self.n, other.n)?;
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        Ok(PermFamily { n: self.n, bits })
    }

    pub fn complement(&self) -> PermFamily {
        PermFamily { n: self.n, bits: self.bits.complement() }
    }

    pub fn is_subset(&self, other: &PermFamily) -> bool {
        self.n == other.n && self.bits.is_subset(&other.bits)
    }

    /// Left translate `{π ∘ σ : σ ∈ F}`; preserves all agreement counts.
    pub fn left_translate(&self, pi: &Permutation) -> Result<PermFamily> {
        Error::dims(self.n, pi.n())?;
        let mut out = Self::empty(self.n)?;
        for s in self.iter() {
            out.bits.insert(pi.compose(s)?.rank() as usize);
        }
        Ok(out)
    }
}

impl fmt::Debug for PermFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermFamily")
            .field("n", &self.n)
            .field("members", &self.iter().collect::<Vec<_>>())
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    n: usize,
    members: Vec<Vec<usize>>,
}

impl Serialize for PermFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyRepr { n: self.n, members: self.iter().map(|p| p.to_vec()).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PermFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = FamilyRepr::deserialize(d)?;
        let perms = repr
            .members
            .into_iter()
            .map(Permutation::new)
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        PermFamily::from_perms(repr.n, &perms).map_err(serde::de::Error::custom)
    }
}

/// A family living inside a sub-permutation space.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubFamily {
    space: SubSpace,
    family: PermFamily,
}

impl SubFamily {
    pub fn new(space: SubSpace, family: PermFamily) -> Result<Self> {
        Error::dims(space.n(), family.n())?;
        if let Some(bad) = family.iter().find(|s| !space.contains(s)) {
            return Err(Error::pattern(format!("{bad:?} lies outside the space {}", space.fixed())));
        }
        Ok(SubFamily { space, family })
    }

    pub fn space(&self) -> &SubSpace {
        &self.space
    }

    pub fn family(&self) -> &PermFamily {
        &self.family
    }

    pub fn into_family(self) -> PermFamily {
        self.family
    }

    pub fn n(&self) -> usize {
        self.family.n()
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }

    /// `|A| / (n - k)!`, the density inside the space.
    pub fn density(&self) -> f64 {
        self.len() as f64 / self.space.size() as f64
    }

    pub fn density_exact(&self) -> BigRational {
        BigRational::new(BigUint::from(self.len()).into(), BigUint::from(self.space.size()).into())
    }

    /// `A_p`, tagged with the extended space.
    pub fn restrict(&self, p: &RestrictionPattern) -> Result<SubFamily> {
        p.validate_for(self.n())?;
        let space = self.space.extend(p)?;
        let family = self.family.filter(|s| p.matches(s));
        Ok(SubFamily { space, family })
    }

    /// `{σ ∈ A : σ(i) ≠ x_i for every i→x_i in p}`, in the same space.
    pub fn avoid(&self, p: &RestrictionPattern) -> SubFamily {
        SubFamily { space: self.space.clone(), family: self.family.filter(|s| p.avoided_by(s)) }
    }

    /// The members relabelled into `S_{n-k}`.
    pub fn compress(&self) -> Result<PermFamily> {
        let m = self.space.free_count();
        let small: Vec<Permutation> = self.family.iter().map(|s| s.compress(self.space.fixed())).collect();
        PermFamily::from_perms(m, &small)
    }
}

impl From<PermFamily> for SubFamily {
    fn from(family: PermFamily) -> Self {
        SubFamily { space: SubSpace::full(family.n()), family }
    }
}

/// The first pair `(σ, τ) ∈ F × G` (in rank order) with exactly `t - 1`
/// agreements, if any.
pub fn cross_violation(f: &PermFamily, g: &PermFamily, t: usize) -> Result<Option<(Permutation, Permutation)>> {
    Error::dims(f.n(), g.n())?;
    if t == 0 || t > f.n() {
        return Err(Error::domain(format!("t = {t} outside 1..={}", f.n())));
    }
    let gs: Vec<&Permutation> = g.iter().collect();
    for s in f.iter() {
        if let Some(tau) = gs.iter().find(|tau| agreements(s, tau) == t - 1) {
            return Ok(Some((s.clone(), (*tau).clone())));
        }
    }
    Ok(None)
}

/// No `σ ∈ F`, `τ ∈ G` agree on exactly `t - 1` positions.
pub fn is_cross_free(f: &PermFamily, g: &PermFamily, t: usize) -> Result<bool> {
    Ok(cross_violation(f, g, t)?.is_none())
}

/// `(S_n)_{I→J}`, of size `(n - |I|)!`.
pub fn umvirate(n: usize, inputs: &[usize], outputs: &[usize]) -> Result<PermFamily> {
    let p = RestrictionPattern::from_tuples(inputs, outputs)?;
    p.validate_for(n)?;
    PermFamily::from_predicate(n, |s| p.matches(s))
}

pub fn restrict(f: &PermFamily, p: &RestrictionPattern) -> Result<SubFamily> {
    SubFamily::from(f.clone()).restrict(p)
}

/// The block-preserving family `F` and block-swapping family `G` on `S_n`,
/// `n` even: `F` maps `[n/2]` onto itself, `G` maps it onto its complement.
pub fn antipodal_pair(n: usize) -> Result<(PermFamily, PermFamily)> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::domain(format!("antipodal pair needs positive even n, got {n}")));
    }
    let h = n / 2;
    let f = PermFamily::from_predicate(n, |s| (1..=h).all(|i| s.apply(i) <= h))?;
    let g = PermFamily::from_predicate(n, |s| (1..=h).all(|i| s.apply(i) > h))?;
    Ok((f, g))
}

/// Number of permutations of `S_n` with exactly `j` fixed points,
/// `C(n, j) · D_{n-j}`.
pub fn count_with_fixed_points(n: usize, j: usize) -> Result<BigUint> {
    if j > n {
        return Err(Error::domain(format!("j = {j} exceeds n = {n}")));
    }
    let d = derangements(n - j);
    Ok(binomial(n, j) * &d[n - j])
}

/// Permutations keeping every pair `{2k-1, 2k}` unseparated.
pub fn unseparated_pairs_family(n: usize) -> Result<PermFamily> {
    if n % 2 == 1 {
        return Err(Error::domain(format!("needs even n, got {n}")));
    }
    let block = |x: usize| (x - 1) / 2;
    PermFamily::from_predicate(n, |s| (1..=n).step_by(2).all(|i| block(s.apply(i)) == block(s.apply(i + 1))))
}

/// Products of `n/2` disjoint transpositions.
pub fn fixed_point_free_involutions(n: usize) -> Result<PermFamily> {
    if n % 2 == 1 {
        return Err(Error::domain(format!("needs even n, got {n}")));
    }
    PermFamily::from_predicate(n, |s| (1..=n).all(|i| s.apply(i) != i && s.apply(s.apply(i)) == i))
}

/// The near-extremal pair `(F', G')` built from the `t`-umvirate fixing `[t]`
/// pointwise: `F'` adds the cycle `σ' = (1 2 … t+1)` to it, and `G'` drops from
/// it everything meeting `σ'` in exactly `t - 1` positions.
pub fn perturbed_umvirate(n: usize, t: usize) -> Result<(PermFamily, PermFamily, Permutation)> {
    if t == 0 || t >= n {
        return Err(Error::domain(format!("needs 1 <= t < n, got t = {t}, n = {n}")));
    }
    let mut images: Vec<usize> = (1..=n).collect();
    for i in 1..=t {
        images[i - 1] = i + 1;
    }
    images[t] = 1;
    let sigma = Permutation::new(images)?;
    let fixed: Vec<usize> = (1..=t).collect();
    let u = umvirate(n, &fixed, &fixed)?;
    let f = u.union(&PermFamily::from_perms(n, [&sigma])?)?;
    let g = u.filter(|tau| agreements(tau, &sigma) != t - 1);
    Ok((f, g, sigma))
}
