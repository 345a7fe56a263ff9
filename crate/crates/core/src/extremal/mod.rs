//! Extremal cross-intersection-free pairs: best responses, exhaustive and
//! branch-and-bound search, density bumps and the reduction process.

mod reduction;
mod search;

use rayon::prelude::*;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::perm_core::{agreements, symmetric_group, PermFamily, SubFamily};

pub use reduction::{reduction_round, GlobalStep, ReductionState, RoundLog, Termination};
pub use search::{bb_max_product, exact_max_product, SearchResult, SearchStatus, MAX_BB_N, MAX_EXACT_N};

fn check_t(n: usize, t: usize) -> Result<()> {
    if t == 0 || t > n {
        return Err(Error::domain(format!("t = {t} outside 1..={n}")));
    }
    Ok(())
}

/// The largest `G` with `(F, G)` cross-free at `t`: every `τ` meeting no
/// member of `F` in exactly `t - 1` positions.
pub fn best_response(f: &PermFamily, t: usize) -> Result<PermFamily> {
    let n = f.n();
    check_t(n, t)?;
    let all = symmetric_group(n)?;
    let members: Vec<_> = f.iter().collect();
    let keep: Vec<bool> = all
        .par_iter()
        .map(|tau| members.iter().all(|s| agreements(s, tau) != t - 1))
        .collect();
    let mut bits = BitSet::new(all.len());
    keep.iter().enumerate().filter(|(_, &k)| k).for_each(|(r, _)| {
        bits.insert(r);
    });
    PermFamily::from_bits(n, bits)
}

/// Iterates mutual best responses from `F` to a fixed point `(F*, G*)`
/// with `F ⊆ F*`. Returns the pair and the number of rounds taken.
pub fn closure(f: &PermFamily, t: usize) -> Result<(PermFamily, PermFamily, usize)> {
    if f.is_empty() {
        return Err(Error::EmptyFamily("closure"));
    }
    let mut cur = f.clone();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let g = best_response(&cur, t)?;
        let next = best_response(&g, t)?;
        if next == cur {
            return Ok((cur, g, rounds));
        }
        cur = next;
    }
}

/// The first `(i, j)` in lexicographic order with both
/// `|A_{i→j}| > |A|·m/k_A` and `|B_{i→j}| > |B|·m/k_B`, `k` being the free
/// coordinate count of each family's space. Only coordinates free in both
/// spaces are probed.
pub fn density_bump_search(a: &SubFamily, b: &SubFamily, m_thresh: f64) -> Result<Option<(usize, usize)>> {
    Error::dims(a.n(), b.n())?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("density bump search needs nonempty families"));
    }
    let n = a.n();
    let (sa, sb) = (a.space(), b.space());
    let exceeds = |x: &SubFamily, i: usize, j: usize| {
        let c = x.family().iter().filter(|s| s.apply(i) == j).count();
        c as f64 > x.len() as f64 * m_thresh / x.space().free_count() as f64
    };
    for i in (1..=n).filter(|&i| sa.is_free_input(i) && sb.is_free_input(i)) {
        for j in (1..=n).filter(|&j| sa.is_free_output(j) && sb.is_free_output(j)) {
            if exceeds(a, i, j) && exceeds(b, i, j) {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm_core::{antipodal_pair, is_cross_free, umvirate, Permutation};

    #[test]
    fn best_response_examples() {
        for n in 3..=4 {
            let e = PermFamily::empty(n).unwrap();
            assert_eq!(best_response(&e, 1).unwrap(), PermFamily::full(n).unwrap());
            let full = PermFamily::full(n).unwrap();
            assert!(best_response(&full, 1).unwrap().is_empty());
        }
        let u = umvirate(4, &[1, 2], &[1, 2]).unwrap();
        let g = best_response(&u, 2).unwrap();
        assert!(u.is_subset(&g));
        assert!(is_cross_free(&u, &g, 2).unwrap());
        assert!(best_response(&u, 0).is_err());
        assert!(best_response(&u, 5).is_err());
    }

    #[test]
    fn best_response_is_antitone() {
        let small = umvirate(4, &[1, 2], &[1, 2]).unwrap();
        let big = umvirate(4, &[1], &[1]).unwrap();
        for t in 1..=4 {
            assert!(best_response(&big, t).unwrap().is_subset(&best_response(&small, t).unwrap()));
        }
    }

    #[test]
    fn closure_examples() {
        let id3 = PermFamily::from_perms(3, [&Permutation::identity(3)]).unwrap();
        let (f, g, rounds) = closure(&id3, 3).unwrap();
        assert!(rounds <= 2);
        assert_eq!(f, PermFamily::full(3).unwrap());
        assert_eq!(g, PermFamily::full(3).unwrap());

        let id4 = PermFamily::from_perms(4, [&Permutation::identity(4)]).unwrap();
        let (f, g, _) = closure(&id4, 2).unwrap();
        assert!(id4.is_subset(&f));
        assert_eq!(best_response(&f, 2).unwrap(), g);
        assert_eq!(best_response(&g, 2).unwrap(), f);

        for t in 1..=2 {
            let u = umvirate(5, &[1, 2], &[3, 4]).unwrap();
            let (f, g, _) = closure(&u, t).unwrap();
            assert!(u.is_subset(&f));
            assert!(is_cross_free(&f, &g, t).unwrap());
        }
        assert!(closure(&PermFamily::empty(3).unwrap(), 1).is_err());
    }

    #[test]
    fn density_bumps() {
        let d = SubFamily::from(umvirate(4, &[1], &[1]).unwrap());
        assert_eq!(density_bump_search(&d, &d, 2.0).unwrap(), Some((1, 1)));
        for n in 3..=5 {
            let f = SubFamily::from(PermFamily::full(n).unwrap());
            assert_eq!(density_bump_search(&f, &f, 1.5).unwrap(), None);
        }
        // F keeps {1,2} inside, G swaps it out: no coordinate is dense in both
        let (f, g) = antipodal_pair(4).unwrap();
        assert_eq!(density_bump_search(&f.into(), &g.into(), 1.5).unwrap(), None);
        let e = SubFamily::from(PermFamily::empty(4).unwrap());
        assert!(density_bump_search(&e, &d, 1.0).is_err());
    }
}
