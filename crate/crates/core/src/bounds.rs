//! Exact evaluation of the closed-form extremal bounds and counts.
//!
//! Everything is computed with big integers or exact rationals; `log2`
//! columns are derived from the exact values for display only.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numbers::{binomial, double_factorial, factorial, log2_biguint, log2_rational};
use crate::perm_core::{agreements, count_with_fixed_points, perturbed_umvirate, symmetric_group, Permutation, MAX_ENUM_N};

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn int(x: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn require_even(n: usize, what: &str) -> Result<()> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::domain(format!("{what} needs positive even n, got {n}")));
    }
    Ok(())
}

fn require_t(n: usize, t: usize) -> Result<()> {
    if t == 0 || t > n {
        return Err(Error::domain(format!("t = {t} outside 1..={n}")));
    }
    Ok(())
}

/// `4^m ((n − m − t)!)²`.
pub fn main_bound(n: usize, t: usize, m: usize) -> Result<BigUint> {
    require_t(n, t)?;
    if m > n - t {
        return Err(Error::domain(format!("m = {m} exceeds n - t = {}", n - t)));
    }
    Ok((BigUint::one() << (2 * m)) * factorial(n - m - t).pow(2))
}

/// `((n/2)!)⁴`, the product of the block-preserving/block-swapping pair.
pub fn antipodal_product(n: usize) -> Result<BigUint> {
    require_even(n, "antipodal product")?;
    Ok(factorial(n / 2).pow(4))
}

/// `((n/2)!)⁴ > ((n−t)!)²`, decided as `((n/2)!)² > (n−t)!`.
pub fn antipodal_beats_umvirate(n: usize, t: usize) -> Result<bool> {
    require_even(n, "antipodal comparison")?;
    require_t(n, t)?;
    Ok(factorial(n / 2).pow(2) > factorial(n - t))
}

/// Smallest `t ∈ 1..=n` at which the antipodal pair beats the equal
/// umvirates; `n` when none does.
pub fn crossover_t(n: usize) -> Result<usize> {
    require_even(n, "crossover")?;
    let half_sq = factorial(n / 2).pow(2);
    // (n - t)! decreases in t, so walk t upward from 1 dividing as we go
    let mut fact = factorial(n - 1);
    for t in 1..=n {
        if half_sq > fact {
            return Ok(t);
        }
        if n - t > 0 {
            fact /= (n - t) as u64;
        }
    }
    Ok(n)
}

/// `(⌊0.5 n / log₂ n⌋, ⌈1.1 n / log₂ n⌉)`: where the crossover is expected to lie.
pub fn tightness_window(n: usize) -> (usize, usize) {
    let l = (n as f64).log2();
    ((0.5 * n as f64 / l).floor() as usize, (1.1 * n as f64 / l).ceil() as usize)
}

/// `(1 − (100t)^{−t}) ((n − t)!)²`.
pub fn stability_threshold(n: usize, t: usize) -> Result<BigRational> {
    require_t(n, t)?;
    let c = BigUint::from(100 * t as u64).pow(t as u32);
    let one_minus = ratio(&c - 1u32, c);
    Ok(one_minus * int(factorial(n - t).pow(2)))
}

/// `(1 − 1/(2(100t)^t)) (n − t)!`.
pub fn single_family_stability(n: usize, t: usize) -> Result<BigRational> {
    require_t(n, t)?;
    let c = BigUint::from(100 * t as u64).pow(t as u32) * 2u32;
    Ok(ratio(&c - 1u32, c) * int(factorial(n - t)))
}

/// `(n/2)! · 2^{n/2}`.
pub fn unseparated_size(n: usize) -> Result<BigUint> {
    require_even(n, "unseparated pairs")?;
    Ok(factorial(n / 2) << (n / 2))
}

/// `(n − 1)!!`.
pub fn involution_size(n: usize) -> Result<BigUint> {
    require_even(n, "fixed-point-free involutions")?;
    Ok(double_factorial(n - 1))
}

fn check_agreement_params(n: usize, r: usize, j: usize) -> Result<()> {
    if 2 * r > n {
        return Err(Error::domain(format!("r = {r} needs 2r <= n = {n}")));
    }
    if j > n - r {
        return Err(Error::domain(format!("j = {j} exceeds n - r = {}", n - r)));
    }
    Ok(())
}

/// Members of the canonical `r`-umvirate of `S_{n'}` sharing no position
/// with the identity, by inclusion–exclusion over the `n' − 2r` positions
/// that could agree: `Σ_i (−1)^i C(n'−2r, i) (n'−r−i)!`.
pub fn agreement_base_count(n_prime: usize, r: usize) -> Result<BigUint> {
    check_agreement_params(n_prime, r, 0)?;
    let k = n_prime - 2 * r;
    let mut pos = BigUint::zero();
    let mut neg = BigUint::zero();
    for i in 0..=k {
        let term = binomial(k, i) * factorial(n_prime - r - i);
        if i % 2 == 0 {
            pos += term;
        } else {
            neg += term;
        }
    }
    Ok(pos - neg)
}

/// `f(n, r, j)`: probability that a uniform member of an `r`-umvirate
/// disagreeing with a reference permutation on its fixed coordinates agrees
/// with it on exactly `j` further positions,
/// `C(n−2r, j) · f(n−j, r, 0) (n−r−j)! / (n−r)!`.
pub fn agreement_prob_formula(n: usize, r: usize, j: usize) -> Result<BigRational> {
    check_agreement_params(n, r, j)?;
    let den = factorial(n - r);
    if j > n - 2 * r {
        return Ok(ratio(BigUint::zero(), den));
    }
    // f(n−j, r, 0)·(n−r−j)! is exactly the base count at n' = n − j
    Ok(ratio(binomial(n - 2 * r, j) * agreement_base_count(n - j, r)?, den))
}

/// The canonical reference: `τ(i) = r + i` on `i ≤ r`, against the identity.
fn canonical_pattern(r: usize) -> Vec<(usize, usize)> {
    (1..=r).map(|i| (i, r + i)).collect()
}

/// Exhaustive count of `τ ∈ (S_n)_{i→r+i, i≤r}` with exactly `j` agreements
/// with the identity.
pub fn agreement_count_exact(n: usize, r: usize, j: usize) -> Result<BigUint> {
    if n > MAX_ENUM_N {
        return Err(Error::Capacity { what: "agreement enumeration", n, max: MAX_ENUM_N });
    }
    check_agreement_params(n, r, j)?;
    let id = Permutation::identity(n);
    let fixed = canonical_pattern(r);
    let count = symmetric_group(n)?
        .iter()
        .filter(|s| fixed.iter().all(|&(i, v)| s.apply(i) == v))
        .filter(|s| agreements(s, &id) == j)
        .count();
    Ok(BigUint::from(count))
}

/// The lemma's preconditions `n ≥ 20`, `r ≤ n/6`, `n − j − r ≥ 10`.
pub fn agreement_lemma_applies(n: usize, r: usize, j: usize) -> bool {
    n >= 20 && 6 * r <= n && n >= j + r + 10
}

/// Exact value of a table row.
#[derive(Clone, Debug, PartialEq)]
pub enum Exact {
    Int(BigUint),
    Ratio(BigRational),
}

impl Exact {
    pub fn log2(&self) -> f64 {
        match self {
            Exact::Int(x) => log2_biguint(x),
            Exact::Ratio(x) if x.is_zero() => f64::NEG_INFINITY,
            Exact::Ratio(x) => log2_rational(x),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Exact::Int(x) => x.to_f64().unwrap_or(f64::INFINITY),
            Exact::Ratio(x) => crate::numbers::rational_to_f64(x),
        }
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exact::Int(x) => write!(f, "{x}"),
            Exact::Ratio(x) if x.is_integer() => write!(f, "{}", x.numer()),
            Exact::Ratio(x) => write!(f, "{}/{}", x.numer(), x.denom()),
        }
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundRow {
    pub label: String,
    pub params: String,
    pub value: Exact,
    pub log2: f64,
    /// Whether the stated preconditions of the underlying inequality hold.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub applicable: Option<bool>,
    /// Outcome of the comparison the row encodes, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holds: Option<bool>,
}

impl BoundRow {
    fn new(label: &str, params: String, value: Exact) -> Self {
        let log2 = value.log2();
        BoundRow { label: label.to_string(), params, value, log2, applicable: None, holds: None }
    }

    fn holds(mut self, h: bool) -> Self {
        self.holds = Some(h);
        self
    }

    fn applicable(mut self, a: bool) -> Self {
        self.applicable = Some(a);
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundTable {
    pub name: String,
    pub rows: Vec<BoundRow>,
}

impl BoundTable {
    /// Rows whose comparison failed.
    pub fn failures(&self) -> impl Iterator<Item = &BoundRow> {
        self.rows.iter().filter(|r| r.holds == Some(false))
    }
}

/// `4^m ((n−m−t)!)²` for every `m ∈ 0..=n−t`.
pub fn main_table(n: usize, t: usize) -> Result<BoundTable> {
    require_t(n, t)?;
    let mut rows = Vec::new();
    for m in 0..=n - t {
        rows.push(BoundRow::new("main_bound", format!("n={n} t={t} m={m}"), Exact::Int(main_bound(n, t, m)?)));
    }
    Ok(BoundTable { name: "main".into(), rows })
}

/// The antipodal pair against the umvirate pair at the crossover and at the
/// two ends of the expected window.
pub fn tightness_table(n: usize) -> Result<BoundTable> {
    let ap = antipodal_product(n)?;
    let cross = crossover_t(n)?;
    let (lo, hi) = tightness_window(n);
    let mut rows = vec![
        BoundRow::new("antipodal_product", format!("n={n}"), Exact::Int(ap)),
        BoundRow::new("crossover_t", format!("n={n}"), Exact::Int(BigUint::from(cross))),
    ];
    for t in [cross.saturating_sub(1), cross] {
        if (1..=n).contains(&t) {
            let beats = antipodal_beats_umvirate(n, t)?;
            rows.push(
                BoundRow::new("umvirate_product", format!("n={n} t={t}"), Exact::Int(factorial(n - t).pow(2)))
                    .holds(beats == (t == cross)),
            );
        }
    }
    if n >= 4 {
        if (1..=n).contains(&hi) {
            rows.push(
                BoundRow::new("antipodal_beats_at_upper", format!("n={n} t={hi}"), Exact::Int(BigUint::from(hi)))
                    .holds(antipodal_beats_umvirate(n, hi)?),
            );
        }
        if (1..=n).contains(&lo) {
            rows.push(
                BoundRow::new("umvirate_holds_at_lower", format!("n={n} t={lo}"), Exact::Int(BigUint::from(lo)))
                    .holds(!antipodal_beats_umvirate(n, lo)?),
            );
        }
    }
    Ok(BoundTable { name: "tightness".into(), rows })
}

/// Stability thresholds, plus the perturbed umvirate pair's exact sizes
/// when it can be enumerated.
pub fn stability_table(n: usize, t: usize) -> Result<BoundTable> {
    let target = factorial(n - t).pow(2);
    let mut rows = vec![
        BoundRow::new("umvirate_product", format!("n={n} t={t}"), Exact::Int(target.clone())),
        BoundRow::new("stability_threshold", format!("n={n} t={t}"), Exact::Ratio(stability_threshold(n, t)?)),
        BoundRow::new("single_family_stability", format!("n={n} t={t}"), Exact::Ratio(single_family_stability(n, t)?)),
    ];
    if n <= MAX_ENUM_N && t < n {
        let (f, g, _) = perturbed_umvirate(n, t)?;
        let prod = BigUint::from(f.len()) * BigUint::from(g.len());
        rows.push(BoundRow::new("perturbed_F", format!("n={n} t={t}"), Exact::Int(BigUint::from(f.len()))));
        rows.push(BoundRow::new("perturbed_G", format!("n={n} t={t}"), Exact::Int(BigUint::from(g.len()))));
        rows.push(BoundRow::new("perturbed_product", format!("n={n} t={t}"), Exact::Int(prod.clone())));
        rows.push(BoundRow::new("perturbed_ratio", format!("n={n} t={t}"), Exact::Ratio(ratio(prod, target))));
    }
    Ok(BoundTable { name: "stability".into(), rows })
}

/// `f(n, r, j)` for every `j`, the exhaustive count where `n ≤ 8`, and the
/// complement bound `#{≠ j} ≤ (1 − 1/(4·2^j·j!))(n−r)!`.
pub fn agreement_table(n: usize, r: usize) -> Result<BoundTable> {
    check_agreement_params(n, r, 0)?;
    let total = factorial(n - r);
    let mut rows = Vec::new();
    for j in 0..=n - r {
        let f = agreement_prob_formula(n, r, j)?;
        let count = f.clone() * int(total.clone());
        let mut row = BoundRow::new("agreement_prob", format!("n={n} r={r} j={j}"), Exact::Ratio(f));
        if n <= MAX_ENUM_N {
            row = row.holds(int(agreement_count_exact(n, r, j)?) == count);
        }
        rows.push(row);
        if j <= r {
            let complement = int(total.clone()) - count;
            let c = BigUint::from(4u32) * (BigUint::one() << j) * factorial(j);
            let rhs = ratio(&c - 1u32, c) * int(total.clone());
            rows.push(
                BoundRow::new("agreement_complement", format!("n={n} r={r} j={j}"), Exact::Ratio(complement.clone()))
                    .applicable(agreement_lemma_applies(n, r, j))
                    .holds(complement <= rhs),
            );
        }
    }
    Ok(BoundTable { name: "agreement".into(), rows })
}

/// `#{σ : exactly j fixed points}` and its probability, for every `j`.
pub fn fixed_points_table(n: usize) -> Result<BoundTable> {
    let total = factorial(n);
    let mut rows = Vec::new();
    let mut sum = BigUint::zero();
    for j in 0..=n {
        let c = count_with_fixed_points(n, j)?;
        sum += &c;
        rows.push(BoundRow::new("fixed_points_count", format!("n={n} j={j}"), Exact::Int(c.clone())));
        rows.push(BoundRow::new("fixed_points_prob", format!("n={n} j={j}"), Exact::Ratio(ratio(c, total.clone()))));
    }
    rows.push(BoundRow::new("fixed_points_total", format!("n={n}"), Exact::Int(sum.clone())).holds(sum == total));
    Ok(BoundTable { name: "fixed-points".into(), rows })
}

/// Sizes of the unseparated-pairs family and the fixed-point-free involutions.
pub fn constructions_table(n: usize) -> Result<BoundTable> {
    Ok(BoundTable {
        name: "constructions".into(),
        rows: vec![
            BoundRow::new("unseparated_size", format!("n={n}"), Exact::Int(unseparated_size(n)?)),
            BoundRow::new("involution_size", format!("n={n}"), Exact::Int(involution_size(n)?)),
        ],
    })
}
