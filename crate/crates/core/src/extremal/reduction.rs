use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm_core::{intersection_size, is_cross_free, PermFamily, Permutation, RestrictionPattern, SubFamily};
use crate::spectral::{global_restriction, DEFAULT_DEPTH_CAP};

/// A pair of families being driven toward cross-intersection freeness with
/// a smaller forbidden agreement count.
///
/// Agreement counts are taken over *residual* coordinates: every common
/// restriction made so far is an agreement both sides share and is
/// discounted. The pair is meant to satisfy "no `(a, b)` with exactly
/// `t_remaining − 1` residual agreements".
#[derive(Clone, Debug)]
pub struct ReductionState {
    pub a: SubFamily,
    pub b: SubFamily,
    pub t_remaining: usize,
    /// Restrictions applied to both families.
    pub common: RestrictionPattern,
    pub history: Vec<RoundLog>,
    /// `(μ(A), μ(B))` within their spaces, one entry per completed step.
    pub densities: Vec<(f64, f64)>,
    pub terminated: Option<Termination>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Termination {
    pub round: usize,
    pub step: &'static str,
}

/// One call to [`global_restriction`] and the density guarantee it made.
#[derive(Clone, Debug, Serialize)]
pub struct GlobalStep {
    pub pattern: RestrictionPattern,
    pub density_before: f64,
    pub density_after: f64,
    pub gamma: f64,
}

impl GlobalStep {
    /// `μ(A_p) ≥ γ^{|p|} μ(A)`.
    pub fn guarantee_holds(&self) -> bool {
        self.density_after >= self.gamma.powi(self.pattern.len() as i32) * self.density_before * (1.0 - 1e-9)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundLog {
    pub round: usize,
    pub a_step: GlobalStep,
    pub b_step: Option<GlobalStep>,
    pub common: Option<(usize, usize)>,
    /// `(|A|, |B|)` after each of steps a–e that ran.
    pub sizes: Vec<(usize, usize)>,
    pub cross_free_checked: bool,
}

impl ReductionState {
    /// Starts from two families on `S_n` that are cross-free at `t`.
    pub fn new(a: PermFamily, b: PermFamily, t: usize) -> Result<Self> {
        Error::dims(a.n(), b.n())?;
        if t == 0 || t > a.n() {
            return Err(Error::domain(format!("t = {t} outside 1..={}", a.n())));
        }
        let (a, b) = (SubFamily::from(a), SubFamily::from(b));
        let densities = vec![(a.density(), b.density())];
        Ok(Self { a, b, t_remaining: t, common: RestrictionPattern::empty(), history: vec![], densities, terminated: None })
    }

    /// Independent check that no pair has exactly `t_remaining − 1`
    /// residual agreements: both sides are relabelled past the common
    /// restrictions and handed to the plain cross-freeness predicate.
    pub fn residual_cross_free(&self) -> Result<bool> {
        let n = self.a.n();
        let m = n - self.common.len();
        if self.t_remaining == 0 || self.t_remaining > m {
            return Ok(true);
        }
        let project = |x: &SubFamily| -> Result<PermFamily> {
            let small: Vec<Permutation> = x.family().iter().map(|s| s.compress(&self.common)).collect();
            PermFamily::from_perms(m, &small)
        };
        is_cross_free(&project(&self.a)?, &project(&self.b)?, self.t_remaining)
    }

    /// True when no pair agrees anywhere outside the common restrictions.
    pub fn residually_disjoint(&self) -> Result<bool> {
        let bs: Vec<&Permutation> = self.b.family().iter().collect();
        for x in self.a.family().iter() {
            for y in &bs {
                if intersection_size(x, y)? != self.common.len() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn record(&mut self, log: &mut RoundLog) {
        self.densities.push((self.a.density(), self.b.density()));
        log.sizes.push((self.a.len(), self.b.len()));
    }

    fn stop(mut self, mut log: RoundLog, step: &'static str) -> ReductionState {
        self.terminated = Some(Termination { round: log.round, step });
        log.cross_free_checked = false;
        self.history.push(log);
        self
    }
}

fn global_step(x: &SubFamily, gamma: f64) -> Result<(GlobalStep, SubFamily)> {
    let g = global_restriction(x, gamma, DEFAULT_DEPTH_CAP)?;
    let step = GlobalStep { pattern: g.pattern, density_before: g.density_before, density_after: g.density_after, gamma };
    Ok((step, g.restricted))
}

/// `μ(X_{i→j}) / μ(X)` for a family in its own space.
fn ratio(x: &SubFamily, i: usize, j: usize) -> f64 {
    let c = x.family().iter().filter(|s| s.apply(i) == j).count();
    c as f64 * x.space().free_count() as f64 / x.len() as f64
}

/// One reduction round:
///
/// 1. restrict `A` to its most profitable global restriction `S→x`;
/// 2. keep the `σ ∈ B` with `σ(i) ≠ x_i` on all of `S`;
/// 3. restrict that `B` to its global restriction `S'→x'`;
/// 4. keep the `σ ∈ A` with `σ(i) ≠ x'_i` on all of `S'`;
/// 5. restrict both to the common `i→j` maximizing the smaller of the two
///    density gains (first in lexicographic order on ties).
///
/// Steps 1–4 rule out agreement on `S ∪ S'`, and step 5 adds one agreement
/// to every pair, so a pair cross-free at `t_remaining` comes out cross-free
/// at `t_remaining − 1` in residual coordinates; this is re-verified and a
/// violation is an [`Error::Invariant`]. A family emptied along the way
/// ends the process with a [`Termination`] rather than an error.
pub fn reduction_round(state: ReductionState, gamma: f64) -> Result<ReductionState> {
    if state.terminated.is_some() {
        return Err(Error::domain("reduction already terminated"));
    }
    if state.t_remaining < 2 {
        return Err(Error::domain(format!("t_remaining = {} < 2", state.t_remaining)));
    }
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(Error::domain(format!("gamma must exceed 1, got {gamma}")));
    }
    let round = state.history.len() + 1;
    let placeholder = GlobalStep { pattern: RestrictionPattern::empty(), density_before: 0.0, density_after: 0.0, gamma };
    let mut log = RoundLog { round, a_step: placeholder, b_step: None, common: None, sizes: vec![], cross_free_checked: false };
    if state.a.is_empty() || state.b.is_empty() {
        return Ok(state.stop(log, "input"));
    }
    if !state.residual_cross_free()? {
        return Err(Error::domain(format!("input pair is not cross-free at t = {}", state.t_remaining)));
    }
    let mut st = state;

    let (a_step, a1) = global_step(&st.a, gamma)?;
    st.a = a1;
    st.b = st.b.avoid(&a_step.pattern);
    log.a_step = a_step;
    st.record(&mut log);
    if st.b.is_empty() {
        return Ok(st.stop(log, "prune B"));
    }

    let (b_step, b1) = global_step(&st.b, gamma)?;
    st.b = b1;
    st.a = st.a.avoid(&b_step.pattern);
    log.b_step = Some(b_step);
    st.record(&mut log);
    if st.a.is_empty() {
        return Ok(st.stop(log, "prune A"));
    }

    let n = st.a.n();
    let (sa, sb) = (st.a.space(), st.b.space());
    let mut best: Option<((usize, usize), f64)> = None;
    for i in (1..=n).filter(|&i| sa.is_free_input(i) && sb.is_free_input(i)) {
        for j in (1..=n).filter(|&j| sa.is_free_output(j) && sb.is_free_output(j)) {
            let score = ratio(&st.a, i, j).min(ratio(&st.b, i, j));
            if best.is_none_or(|(_, s)| score > s) {
                best = Some(((i, j), score));
            }
        }
    }
    let Some(((i, j), _)) = best else {
        // the per-side prunes already cover every coordinate left
        if !st.residually_disjoint()? {
            return Err(Error::Invariant(format!("round {round}: no common coordinate but residual agreements remain")));
        }
        return Ok(st.stop(log, "residually disjoint"));
    };
    let p = RestrictionPattern::single(i, j)?;
    st.a = st.a.restrict(&p)?;
    st.b = st.b.restrict(&p)?;
    st.common = st.common.concat(&p)?;
    st.t_remaining -= 1;
    log.common = Some((i, j));
    st.record(&mut log);
    // a zero best score means every common restriction empties a side
    if st.a.is_empty() || st.b.is_empty() {
        return Ok(st.stop(log, "common restriction"));
    }

    if !st.residual_cross_free()? {
        return Err(Error::Invariant(format!(
            "round {round} broke residual cross-freeness at t = {}",
            st.t_remaining
        )));
    }
    log.cross_free_checked = true;
    st.history.push(log);
    Ok(st)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm_core::umvirate;

    #[test]
    fn umvirate_round() {
        let u = umvirate(5, &[1, 2], &[1, 2]).unwrap();
        let st = ReductionState::new(u.clone(), u.clone(), 2).unwrap();
        // a small gamma restricts A onto the fixed coordinates and B, which
        // must then avoid them, empties out
        let early = reduction_round(st.clone(), 2.0).unwrap();
        assert_eq!(early.terminated, Some(Termination { round: 1, step: "prune B" }));
        // gamma² > 20 keeps both global steps trivial
        let out = reduction_round(st, 6.0).unwrap();
        assert!(out.terminated.is_none());
        assert_eq!(out.t_remaining, 1);
        assert!(!out.a.is_empty() && !out.b.is_empty());
        let log = &out.history[0];
        assert!(log.cross_free_checked);
        assert!(log.a_step.guarantee_holds());
        assert!(log.b_step.as_ref().unwrap().guarantee_holds());
    }

    #[test]
    fn three_umvirate_round() {
        let u = umvirate(6, &[1, 2, 3], &[1, 2, 3]).unwrap();
        let st = ReductionState::new(u.clone(), u, 3).unwrap();
        let out = reduction_round(st, 7.0).unwrap();
        assert!(out.terminated.is_none());
        assert!(out.residual_cross_free().unwrap());
    }

    #[test]
    fn empty_signal() {
        let a = PermFamily::from_perms(4, [&Permutation::identity(4)]).unwrap();
        let st = ReductionState::new(a, PermFamily::empty(4).unwrap(), 2).unwrap();
        let out = reduction_round(st, 2.0).unwrap();
        assert_eq!(out.terminated, Some(Termination { round: 1, step: "input" }));
        assert!(reduction_round(out, 2.0).is_err());
    }

    #[test]
    fn disjoint_singletons_run_out_of_coordinates() {
        let a = PermFamily::from_perms(4, [&Permutation::identity(4)]).unwrap();
        let b = PermFamily::from_perms(4, [&Permutation::new(vec![2, 3, 4, 1]).unwrap()]).unwrap();
        let st = ReductionState::new(a, b, 2).unwrap();
        // both sides restrict onto their single member, leaving no shared free (i, j)
        let out = reduction_round(st, 1.5).unwrap();
        assert_eq!(out.terminated, Some(Termination { round: 1, step: "residually disjoint" }));
        assert!(!out.a.is_empty() && !out.b.is_empty());
        assert!(out.residually_disjoint().unwrap());
        assert_eq!(out.t_remaining, 2);
    }

    #[test]
    fn full_group_skips_global_steps() {
        let f = PermFamily::full(4).unwrap();
        let g = umvirate(4, &[1, 2], &[1, 2]).unwrap();
        // F = S_4 meets everything in some count; use t = 4 so "3 agreements" is impossible
        let st = ReductionState::new(f, g, 4).unwrap();
        let out = reduction_round(st, 1.0 + 1e-6).unwrap();
        assert!(out.history[0].a_step.pattern.is_empty());
        assert_eq!(out.t_remaining, 3);
    }

    #[test]
    fn rejects_bad_input() {
        let f = PermFamily::full(4).unwrap();
        let st = ReductionState::new(f.clone(), f, 2).unwrap();
        assert!(reduction_round(st, 2.0).is_err());
    }
}
