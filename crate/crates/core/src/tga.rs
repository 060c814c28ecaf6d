//! Greedy sets and the thresholding greedy algorithm over an arbitrary
//! coefficient quasi-norm.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bases::{CoeffNorm, IndexSet};
use crate::error::{Error, Result};

/// Default cap on the number of greedy sets produced by [`TieRule::AllMaximal`].
pub const DEFAULT_SET_LIMIT: u128 = 1 << 20;

/// How ties at the threshold magnitude are resolved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieRule {
    #[default]
    LowestIndex,
    HighestIndex,
    /// Every valid greedy set.
    AllMaximal,
}

/// Strictly-above-threshold indices plus the tied indices (0-based, ascending)
/// from which `need` more must be drawn.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Threshold {
    pub strict: Vec<usize>,
    pub ties: Vec<usize>,
    pub need: usize,
}

pub(crate) fn threshold(a: &[f64], m: usize) -> Result<Threshold> {
    if m > a.len() {
        return Err(Error::InvalidArgument(format!(
            "greedy set of size {m} requested from {} coefficients",
            a.len()
        )));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("coefficients must be finite".into()));
    }
    if m == 0 {
        return Ok(Threshold {
            strict: Vec::new(),
            ties: Vec::new(),
            need: 0,
        });
    }
    let mut mags: Vec<f64> = a.iter().map(|x| x.abs()).collect();
    mags.sort_unstable_by(|x, y| y.total_cmp(x));
    let tau = mags[m - 1];
    let strict: Vec<usize> = (0..a.len()).filter(|j| a[*j].abs() > tau).collect();
    let ties: Vec<usize> = (0..a.len()).filter(|j| a[*j].abs() == tau).collect();
    let need = m - strict.len();
    Ok(Threshold { strict, ties, need })
}

fn to_set(strict: &[usize], chosen: impl IntoIterator<Item = usize>) -> IndexSet {
    IndexSet::from_indices(strict.iter().copied().chain(chosen).map(|j| j + 1))
        .expect("indices are valid")
}

/// `C(n, k)` saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Lexicographic `k`-subsets of `0..n`.
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        let current = if k <= n { Some((0..k).collect()) } else { None };
        Combinations { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let cur = self.current.as_mut().expect("checked");
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if cur[i] < self.n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Number of greedy sets of size `m`.
pub fn count_greedy_sets(a: &[f64], m: usize) -> Result<u128> {
    let t = threshold(a, m)?;
    Ok(binomial(t.ties.len(), t.need))
}

/// A greedy set of size `m` under a deterministic tie rule.
pub fn greedy_set(a: &[f64], m: usize, tie: TieRule) -> Result<IndexSet> {
    let t = threshold(a, m)?;
    match tie {
        TieRule::LowestIndex => Ok(to_set(&t.strict, t.ties[..t.need].iter().copied())),
        TieRule::HighestIndex => Ok(to_set(
            &t.strict,
            t.ties[t.ties.len() - t.need..].iter().copied(),
        )),
        TieRule::AllMaximal => Err(Error::InvalidArgument(
            "all-maximal yields several sets; use greedy_sets".into(),
        )),
    }
}

/// Greedy sets of size `m`: one set for the deterministic rules, every valid
/// set (up to [`DEFAULT_SET_LIMIT`]) for [`TieRule::AllMaximal`].
pub fn greedy_sets(a: &[f64], m: usize, tie: TieRule) -> Result<Vec<IndexSet>> {
    greedy_sets_limited(a, m, tie, DEFAULT_SET_LIMIT)
}

pub fn greedy_sets_limited(a: &[f64], m: usize, tie: TieRule, limit: u128) -> Result<Vec<IndexSet>> {
    if tie != TieRule::AllMaximal {
        return Ok(vec![greedy_set(a, m, tie)?]);
    }
    let t = threshold(a, m)?;
    let count = binomial(t.ties.len(), t.need);
    if count > limit {
        return Err(Error::BudgetExceeded {
            needed: count,
            budget: limit,
        });
    }
    Ok(Combinations::new(t.ties.len(), t.need)
        .map(|pick| to_set(&t.strict, pick.into_iter().map(|i| t.ties[i])))
        .collect())
}

/// Greedy set whose tied part is chosen by `pick`, which receives the tied
/// indices (0-based, ascending) and how many are needed, and returns
/// positions into that slice.
pub fn greedy_set_with<F>(a: &[f64], m: usize, pick: F) -> Result<IndexSet>
where
    F: FnOnce(&[usize], usize) -> Vec<usize>,
{
    let t = threshold(a, m)?;
    let chosen = pick(&t.ties, t.need);
    if chosen.len() != t.need || chosen.iter().any(|i| *i >= t.ties.len()) {
        return Err(Error::InvalidArgument("tie picker returned an invalid choice".into()));
    }
    let set = to_set(&t.strict, chosen.iter().map(|i| t.ties[*i]));
    if set.len() != m {
        return Err(Error::InvalidArgument("tie picker repeated an index".into()));
    }
    Ok(set)
}

/// `min_{j∈A} |a_j| ≥ max_{k∉A} |a_k|`.
pub fn is_greedy_set(a: &[f64], set: &IndexSet) -> bool {
    if set.max().is_some_and(|j| j > a.len()) {
        return false;
    }
    let inside = set.iter().map(|j| a[j - 1].abs()).fold(f64::INFINITY, f64::min);
    let outside = (1..=a.len())
        .filter(|j| !set.contains(*j))
        .map(|j| a[j - 1].abs())
        .fold(0.0, f64::max);
    set.is_empty() || inside >= outside
}

/// Coefficients of `f − S_A f`.
pub(crate) fn residual(a: &[f64], set: &IndexSet) -> Vec<f64> {
    let mut r = a.to_vec();
    for j in set.iter() {
        r[j - 1] = 0.0;
    }
    r
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyStep {
    pub m: usize,
    /// The set realizing `residual`; under all-maximal, the worst one.
    pub set: IndexSet,
    /// `‖f − S_{A_m} f‖`.
    pub residual: f64,
    /// Number of greedy sets evaluated at this step.
    pub sets_checked: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyRun {
    pub coefficients: Vec<f64>,
    pub tie: TieRule,
    pub normer: String,
    pub steps: Vec<GreedyStep>,
}

impl GreedyRun {
    /// Rows `m,size,residual` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,size,residual\n");
        for s in &self.steps {
            let _ = writeln!(out, "{},{},{:.16e}", s.m, s.set.len(), s.residual);
        }
        out
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.residual).collect()
    }
}

/// TGA error sequence `‖f − S_{A_m} f‖` for `m = 0..=m_max`.
pub fn greedy_residual_curve(
    normer: &dyn CoeffNorm,
    a: &[f64],
    m_max: usize,
    tie: TieRule,
) -> Result<GreedyRun> {
    if a.len() > normer.dim() {
        return Err(Error::DimensionMismatch {
            len: a.len(),
            dim: normer.dim(),
        });
    }
    if m_max > a.len() {
        return Err(Error::InvalidArgument(format!(
            "m_max = {m_max} exceeds {} coefficients",
            a.len()
        )));
    }
    let steps = (0..=m_max)
        .into_par_iter()
        .map(|m| -> Result<GreedyStep> {
            let sets = greedy_sets(a, m, tie)?;
            let mut best: Option<(f64, IndexSet)> = None;
            for set in &sets {
                let v = normer.coeff_norm(&residual(a, set));
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, set.clone()));
                }
            }
            let (residual, set) = best.expect("at least one greedy set");
            Ok(GreedyStep {
                m,
                set,
                residual,
                sets_checked: sets.len() as u64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GreedyRun {
        coefficients: a.to_vec(),
        tie,
        normer: normer.label(),
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::SpaceSpec;

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::from_indices(v.iter().copied()).unwrap()
    }

    #[test]
    fn examples() {
        let a = [3.0, -5.0, 2.0];
        assert_eq!(greedy_set(&a, 1, TieRule::LowestIndex).unwrap(), set(&[2]));
        assert_eq!(greedy_set(&a, 2, TieRule::LowestIndex).unwrap(), set(&[1, 2]));
        let t = [1.0, 1.0];
        assert_eq!(greedy_set(&t, 1, TieRule::LowestIndex).unwrap(), set(&[1]));
        assert_eq!(greedy_set(&t, 1, TieRule::HighestIndex).unwrap(), set(&[2]));
        assert_eq!(
            greedy_sets(&t, 1, TieRule::AllMaximal).unwrap(),
            vec![set(&[1]), set(&[2])]
        );
        assert!(greedy_set(&a, 4, TieRule::LowestIndex).is_err());
    }

    #[test]
    fn zero_coefficients_tie() {
        let a = [2.0, 0.0, 0.0];
        assert_eq!(count_greedy_sets(&a, 2).unwrap(), 2);
        assert_eq!(greedy_set(&a, 3, TieRule::LowestIndex).unwrap(), set(&[1, 2, 3]));
    }

    #[test]
    fn limit_is_enforced() {
        let a = [1.0; 30];
        assert!(matches!(
            greedy_sets_limited(&a, 15, TieRule::AllMaximal, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn custom_picker() {
        let a = [1.0, 1.0, 1.0, 1.0, 3.0];
        let s = greedy_set_with(&a, 3, |ties, need| {
            assert_eq!(ties, &[0, 1, 2, 3]);
            (0..need).map(|i| 2 * i).collect()
        })
        .unwrap();
        assert_eq!(s, set(&[1, 3, 5]));
        assert!(greedy_set_with(&a, 3, |_, _| vec![0]).is_err());
    }

    #[test]
    fn combinations_and_binomials() {
        let all: Vec<Vec<usize>> = Combinations::new(4, 2).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
        assert_eq!(Combinations::new(3, 0).count(), 1);
        assert_eq!(Combinations::new(2, 3).count(), 0);
        assert_eq!(binomial(63, 31), 916312070471295267);
    }

    #[test]
    fn residual_curve_examples() {
        let l2 = SpaceSpec::lp(2.0, 2).unwrap();
        let run = greedy_residual_curve(&l2, &[3.0, 4.0], 2, TieRule::LowestIndex).unwrap();
        assert_eq!(run.residuals(), vec![5.0, 3.0, 0.0]);
        assert_eq!(run.steps[1].set, set(&[2]));
        assert!(run.to_csv().starts_with("m,size,residual\n0,0,5.0000000000000000e0\n"));
    }

    #[test]
    fn all_maximal_reports_worst_residual() {
        let b = crate::bases::BasisRep::difference(0.5, 3).unwrap();
        // f = e_3; removing d_2 leaves d_1 + d_3 = e_1 − e_2 + e_3
        let run = greedy_residual_curve(&b, &[1.0, 1.0, 1.0], 1, TieRule::AllMaximal).unwrap();
        assert_eq!(run.steps[1].sets_checked, 3);
        assert_eq!(run.steps[1].residual, 9.0);
        assert_eq!(run.steps[1].set, set(&[2]));
    }
}
