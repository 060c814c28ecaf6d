//! Measurement of greedy-approximation parameters: super-democracy functions,
//! unconditionality parameters, embedding constants, quasi-greedy and
//! suppression constants and lower bounds for Lebesgue parameters.
//!
//! Suprema over quasi-norm balls are nonconvex, so sampled values are only
//! ever reported as lower bounds (upper bounds for infima). A value is called
//! exact only when it is the optimum of a complete enumeration over a finite
//! candidate set.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bases::{project_mask, BasisRep, IndexSet};
use crate::dkk::{DkkSpace, OrderedPartition};
use crate::error::{Error, Result};
use crate::spaces::{lp_norm, Exponent, SpaceKind};
use crate::tga::{self, binomial, Combinations};

/// Relative tolerance for witness re-evaluation.
pub const WITNESS_RTOL: f64 = 1e-9;

/// Accept a refinement step only when it improves by more than this factor.
const STEP_RTOL: f64 = 1e-12;

/// Greedy sets per size beyond which ties are sampled rather than enumerated.
const TIE_ENUMERATION_LIMIT: u128 = 256;

fn default_max_m() -> usize {
    8
}
fn default_max_dim() -> usize {
    24
}
fn default_budget() -> u64 {
    500_000_000
}
fn default_levels() -> usize {
    7
}
fn default_refine() -> usize {
    3
}

/// How a supremum is searched for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum SearchMode {
    /// Complete enumeration of subsets, sign patterns and coefficient grids
    /// `{0} ∪ {±2^{-k} : 0 ≤ k < grid_levels}`.
    Exhaustive {
        #[serde(default = "default_max_m")]
        max_m: usize,
        #[serde(default = "default_max_dim")]
        max_dim: usize,
        #[serde(default = "default_budget")]
        budget: u64,
        #[serde(default = "default_levels")]
        grid_levels: usize,
        /// Hill-climbing rounds started from the best enumerated candidates.
        #[serde(default)]
        refine: usize,
    },
    /// Seeded random search; trial `i` draws from stream `i` of the seed.
    Sampled {
        trials: u64,
        seed: u64,
        #[serde(default = "default_refine")]
        refine: usize,
    },
}

impl SearchMode {
    pub fn exhaustive() -> Self {
        SearchMode::Exhaustive {
            max_m: default_max_m(),
            max_dim: default_max_dim(),
            budget: default_budget(),
            grid_levels: default_levels(),
            refine: 0,
        }
    }

    pub fn sampled(trials: u64, seed: u64) -> Self {
        SearchMode::Sampled {
            trials,
            seed,
            refine: default_refine(),
        }
    }

    pub fn with_grid_levels(self, levels: usize) -> Self {
        match self {
            SearchMode::Exhaustive {
                max_m,
                max_dim,
                budget,
                refine,
                ..
            } => SearchMode::Exhaustive {
                max_m,
                max_dim,
                budget,
                grid_levels: levels,
                refine,
            },
            other => other,
        }
    }

    pub fn with_refine(self, rounds: usize) -> Self {
        match self {
            SearchMode::Exhaustive {
                max_m,
                max_dim,
                budget,
                grid_levels,
                ..
            } => SearchMode::Exhaustive {
                max_m,
                max_dim,
                budget,
                grid_levels,
                refine: rounds,
            },
            SearchMode::Sampled { trials, seed, .. } => SearchMode::Sampled {
                trials,
                seed,
                refine: rounds,
            },
        }
    }

    pub fn with_budget(self, new_budget: u64) -> Self {
        match self {
            SearchMode::Exhaustive {
                max_m,
                max_dim,
                grid_levels,
                refine,
                ..
            } => SearchMode::Exhaustive {
                max_m,
                max_dim,
                budget: new_budget,
                grid_levels,
                refine,
            },
            other => other,
        }
    }

    fn refine_rounds(&self) -> usize {
        match self {
            SearchMode::Exhaustive { refine, .. } | SearchMode::Sampled { refine, .. } => *refine,
        }
    }

    fn is_exhaustive(&self) -> bool {
        matches!(self, SearchMode::Exhaustive { .. })
    }

    fn check_exhaustive(&self, m: usize, dim: usize, needed: u128) -> Result<()> {
        if let SearchMode::Exhaustive {
            max_m,
            max_dim,
            budget,
            ..
        } = self
        {
            if m > *max_m || dim > *max_dim {
                return Err(Error::BudgetExceeded {
                    needed,
                    budget: *budget as u128,
                });
            }
            if needed > *budget as u128 {
                return Err(Error::BudgetExceeded {
                    needed,
                    budget: *budget as u128,
                });
            }
        }
        Ok(())
    }

    fn grid(&self) -> Vec<f64> {
        let levels = match self {
            SearchMode::Exhaustive { grid_levels, .. } => *grid_levels,
            SearchMode::Sampled { .. } => default_levels(),
        };
        dyadic_grid(levels)
    }
}

/// `{0} ∪ {±2^{-k} : 0 ≤ k < levels}`, ascending.
pub fn dyadic_grid(levels: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..levels)
        .flat_map(|k| {
            let v = (0.5f64).powi(k as i32);
            [v, -v]
        })
        .collect();
    g.push(0.0);
    g.sort_by(f64::total_cmp);
    g
}

/// What a reported value measures; fixes how witnesses are re-evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Parameter {
    /// `φ_u^s(m)`; witness value `‖f‖` with `f` a signed indicator.
    UpperDemocracy,
    /// `φ_l^s(m)`; witness value `‖f‖`.
    LowerDemocracy,
    /// `k̃_m`; witness value `‖S_A f‖ / ‖f‖`.
    KTilde,
    /// `k_m`; witness value `‖S_A f‖ / ‖f‖`.
    K,
    /// `β_r`; witness value `‖f‖ / ‖f‖_q`.
    Beta { q: Exponent },
    /// `η_r`; witness value `‖f‖_q / ‖f‖`.
    Eta { q: Exponent },
    /// Quasi-greedy constant; witness value `‖S_A f‖ / ‖f‖`, `A` greedy.
    QuasiGreedy,
    /// Suppression constant over sets with `|A| > d` and `b|A| < min A`.
    Suppression { b: usize, d: usize },
    /// `‖f‖ / ‖g‖` over pairs satisfying the cardinality hypothesis.
    DemTqg,
    /// `‖f − S_A f‖ / ‖f − g‖` with `A` greedy and `g` an `m`-term vector.
    Lebesgue,
    /// `‖f + g‖ / (‖f‖ + ‖g‖)`.
    Concavity,
    /// `‖S_{[1,m]} f‖ / ‖f‖`.
    BasisConstant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Optimum of a complete enumeration over the stated candidate grid.
    ExactOnGrid,
    /// Realized by a witness; the true supremum is at least this.
    LowerBound,
    /// Realized by a witness; the true infimum is at most this.
    UpperBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub f: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<IndexSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<f64>>,
}

impl Witness {
    fn vector(f: Vec<f64>) -> Self {
        Witness {
            f,
            set: None,
            g: None,
        }
    }

    fn projection(f: Vec<f64>, set: IndexSet) -> Self {
        Witness {
            f,
            set: Some(set),
            g: None,
        }
    }

    fn pair(f: Vec<f64>, g: Vec<f64>) -> Self {
        Witness {
            f,
            set: None,
            g: Some(g),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub m: usize,
    pub value: f64,
    pub bound: BoundKind,
    /// Best value over the enumerated grid alone, when a grid was enumerated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_value: Option<f64>,
    /// Analytic ceiling on the true value, when one is known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ceiling: Option<f64>,
    pub witness: Witness,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCurve {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SearchSummary {
    Exhaustive { grid_levels: usize },
    Sampled { trials: u64, seed: u64 },
}

impl From<&SearchMode> for SearchSummary {
    fn from(mode: &SearchMode) -> Self {
        match mode {
            SearchMode::Exhaustive { grid_levels, .. } => SearchSummary::Exhaustive {
                grid_levels: *grid_levels,
            },
            SearchMode::Sampled { trials, seed, .. } => SearchSummary::Sampled {
                trials: *trials,
                seed: *seed,
            },
        }
    }
}

/// A measured parameter table with witnesses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamReport {
    pub parameter: Parameter,
    pub basis: String,
    pub search: SearchSummary,
    pub entries: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reference: Vec<ReferenceCurve>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ParamReport {
    fn new(parameter: Parameter, basis: &BasisRep, search: SearchSummary) -> Self {
        ParamReport {
            parameter,
            basis: basis.label(),
            search,
            entries: Vec::new(),
            reference: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    pub fn value_at(&self, m: usize) -> Option<f64> {
        self.entries.iter().find(|e| e.m == m).map(|e| e.value)
    }

    pub fn entry(&self, m: usize) -> Option<&Entry> {
        self.entries.iter().find(|e| e.m == m)
    }

    pub fn max_value(&self) -> f64 {
        self.entries.iter().map(|e| e.value).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Add `ψ_r(m) = m^{1/r}` as a reference column.
    pub fn add_power_reference(&mut self, name: &str, r: f64) {
        let values = self.entries.iter().map(|e| (e.m as f64).powf(1.0 / r)).collect();
        self.reference.push(ReferenceCurve {
            name: name.to_string(),
            values,
        });
    }

    /// Add `φ(log₂ m)^{1/p}` with `φ(t) = 1 + t`.
    pub fn add_log_reference(&mut self, name: &str, p: f64) {
        let values = self
            .entries
            .iter()
            .map(|e| (1.0 + (e.m as f64).log2()).powf(1.0 / p))
            .collect();
        self.reference.push(ReferenceCurve {
            name: name.to_string(),
            values,
        });
    }

    /// Re-evaluate every witness against `basis`.
    pub fn verify(&self, basis: &BasisRep) -> Result<()> {
        for e in &self.entries {
            let actual = evaluate_witness(self.parameter, basis, &e.witness)?;
            let tol = WITNESS_RTOL * e.value.abs().max(1e-300);
            if !((actual - e.value).abs() <= tol) {
                return Err(Error::WitnessMismatch {
                    m: e.m,
                    reported: e.value,
                    actual,
                });
            }
        }
        Ok(())
    }

    /// `m,value,bound` rows with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,value,bound\n");
        for e in &self.entries {
            let bound = match e.bound {
                BoundKind::ExactOnGrid => "exact_on_grid",
                BoundKind::LowerBound => "lower_bound",
                BoundKind::UpperBound => "upper_bound",
            };
            let _ = writeln!(out, "{},{:.16e},{}", e.m, e.value, bound);
        }
        out
    }

    /// `m,value` plus one column per reference curve.
    pub fn plot_csv(&self) -> String {
        let mut out = String::from("m,value");
        for r in &self.reference {
            out.push(',');
            out.push_str(&r.name);
        }
        out.push('\n');
        for (i, e) in self.entries.iter().enumerate() {
            let _ = write!(out, "{},{:.16e}", e.m, e.value);
            for r in &self.reference {
                let _ = write!(out, ",{:.16e}", r.values[i]);
            }
            out.push('\n');
        }
        out
    }
}

fn project(f: &[f64], set: &IndexSet) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    for j in set.iter() {
        if j <= f.len() {
            out[j - 1] = f[j - 1];
        }
    }
    out
}

fn mask_set(mask: u64) -> IndexSet {
    IndexSet::from_mask(mask)
}

fn evaluate_witness(parameter: Parameter, basis: &BasisRep, w: &Witness) -> Result<f64> {
    let norm = |v: &[f64]| basis.norm(v);
    let set = || {
        w.set
            .clone()
            .ok_or_else(|| Error::InvalidArgument("witness lacks an index set".into()))
    };
    let g = || {
        w.g.clone()
            .ok_or_else(|| Error::InvalidArgument("witness lacks a second vector".into()))
    };
    Ok(match parameter {
        Parameter::UpperDemocracy | Parameter::LowerDemocracy => norm(&w.f)?,
        Parameter::KTilde
        | Parameter::K
        | Parameter::QuasiGreedy
        | Parameter::Suppression { .. }
        | Parameter::BasisConstant => norm(&project(&w.f, &set()?))? / norm(&w.f)?,
        Parameter::Beta { q } => norm(&w.f)? / lp_norm(&w.f, q),
        Parameter::Eta { q } => lp_norm(&w.f, q) / norm(&w.f)?,
        Parameter::DemTqg => norm(&w.f)? / norm(&g()?)?,
        Parameter::Lebesgue => {
            let a = set()?;
            let g = g()?;
            let rest = tga::residual(&w.f, &a);
            let diff: Vec<f64> = w.f.iter().zip(&g).map(|(x, y)| x - y).collect();
            norm(&rest)? / norm(&diff)?
        }
        Parameter::Concavity => {
            let g = g()?;
            let sum: Vec<f64> = w.f.iter().zip(&g).map(|(x, y)| x + y).collect();
            norm(&sum)? / (norm(&w.f)? + norm(&g)?)
        }
    })
}

// ---------------------------------------------------------------------------
// search engine

#[derive(Clone, Debug)]
struct Cand {
    value: f64,
    key: (u64, u64),
    witness: Witness,
}

/// Larger value wins; equal values resolve to the smaller key. The result is
/// independent of evaluation order.
fn better(a: Cand, b: Cand) -> Cand {
    match a.value.total_cmp(&b.value) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if a.key <= b.key {
                a
            } else {
                b
            }
        }
    }
}

fn better_opt(a: Option<Cand>, b: Option<Cand>) -> Option<Cand> {
    match (a, b) {
        (Some(a), Some(b)) => Some(better(a, b)),
        (a, None) => a,
        (None, b) => b,
    }
}

fn par_best<F>(n: u64, eval: F) -> Option<Cand>
where
    F: Fn(u64) -> Option<Cand> + Sync + Send,
{
    (0..n)
        .into_par_iter()
        .filter_map(|i| eval(i).filter(|c| c.value.is_finite()))
        .reduce_with(better)
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Number of sampling families.
const FAMILIES: u64 = 8;

/// Draw a vector of length `n` from family `trial % FAMILIES`.
fn sample_vector(rng: &mut ChaCha8Rng, n: usize, trial: u64, blocks: Option<&OrderedPartition>) -> Vec<f64> {
    let mut f = vec![0.0; n];
    if n == 0 {
        return f;
    }
    let sign = |rng: &mut ChaCha8Rng| if rng.gen::<bool>() { 1.0 } else { -1.0 };
    match trial % FAMILIES {
        0 => f.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0)),
        1 => f.iter_mut().for_each(|x| *x = sign(rng)),
        2 => f.iter_mut().for_each(|x| {
            let k = rng.gen_range(0..8);
            *x = if k == 7 { 0.0 } else { sign(rng) * 0.5f64.powi(k) };
        }),
        3 => {
            let levels = [1.0, 0.5, 0.25];
            let mut j = 0;
            while j < n {
                let run = rng.gen_range(1..=n.div_ceil(2).max(1));
                let v = sign(rng) * levels[rng.gen_range(0..levels.len())];
                for x in f.iter_mut().skip(j).take(run) {
                    *x = v;
                }
                j += run;
            }
        }
        4 => {
            let s = rng.gen_range(1..=n);
            for _ in 0..s {
                let j = rng.gen_range(0..n);
                f[j] = rng.gen_range(-1.0..1.0);
            }
        }
        5 => {
            let rho: f64 = rng.gen_range(0.5..1.0);
            let mut order: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                order.swap(i, rng.gen_range(0..=i));
            }
            for (k, j) in order.into_iter().enumerate() {
                f[j] = sign(rng) * rho.powi(k as i32);
            }
        }
        6 => {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(a..n);
            let alternate = rng.gen::<bool>();
            for (k, x) in f[a..=b].iter_mut().enumerate() {
                *x = if alternate && k % 2 == 1 { -1.0 } else { 1.0 };
            }
        }
        _ => match blocks {
            Some(part) => {
                let levels = [1.0, 0.5, 0.0];
                let perturb = rng.gen::<bool>();
                for r in 1..=part.block_count() {
                    let range = part.block_range(r);
                    if range.start >= n {
                        break;
                    }
                    let size = (range.end - range.start) as f64;
                    let v = sign(rng) * levels[rng.gen_range(0..levels.len())] / size.sqrt();
                    for x in &mut f[range.start..range.end.min(n)] {
                        *x = v;
                        if perturb {
                            *x += rng.gen_range(-0.5..0.5) / size.sqrt();
                        }
                    }
                }
            }
            None => f.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0) * rng.gen::<f64>()),
        },
    }
    if f.iter().all(|x| *x == 0.0) {
        f[rng.gen_range(0..n)] = 1.0;
    }
    f
}

fn block_hint(basis: &BasisRep) -> Option<&OrderedPartition> {
    match basis {
        BasisRep::Dkk(space) => Some(space.partition()),
        _ => None,
    }
}

/// Deterministic local search: coordinate moves relative to `max |f|`.
fn hill_climb<F>(start: Cand, support: usize, rounds: usize, objective: &F) -> Cand
where
    F: Fn(&[f64]) -> Option<Cand>,
{
    let steps = [0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625];
    let mut best = start;
    for _ in 0..rounds {
        let mut improved = false;
        for j in 0..support.min(best.witness.f.len()) {
            let scale = best.witness.f.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
            let base = best.witness.f.clone();
            let mut moves: Vec<f64> = Vec::with_capacity(2 * steps.len() + 2);
            for s in steps {
                moves.push(base[j] + s * scale);
                moves.push(base[j] - s * scale);
            }
            moves.push(0.0);
            moves.push(-base[j]);
            for v in moves {
                let mut f = best.witness.f.clone();
                f[j] = v;
                if let Some(c) = objective(&f) {
                    if c.value > best.value * (1.0 + STEP_RTOL) {
                        best = Cand { key: best.key, ..c };
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
    best
}

/// Refine the `starts` best candidates in parallel, keeping the overall best.
fn refine_all<F>(mut starts: Vec<Cand>, support: usize, rounds: usize, objective: &F) -> Option<Cand>
where
    F: Fn(&[f64]) -> Option<Cand> + Sync,
{
    if rounds == 0 {
        return starts.into_iter().reduce(better);
    }
    starts.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.key.cmp(&b.key)));
    starts.truncate(8);
    starts
        .into_par_iter()
        .map(|c| hill_climb(c, support, rounds, objective))
        .reduce_with(better)
}

/// Run `trials` sampled trials; return the best candidate and the top few
/// for refinement.
fn sampled_best<S, F>(trials: u64, seed: u64, sample: &S, objective: &F) -> Vec<Cand>
where
    S: Fn(&mut ChaCha8Rng, u64) -> Vec<f64> + Sync,
    F: Fn(&[f64]) -> Option<Cand> + Sync,
{
    let mut all: Vec<Cand> = (0..trials)
        .into_par_iter()
        .filter_map(|t| {
            let mut rng = trial_rng(seed, t);
            let f = sample(&mut rng, t);
            objective(&f)
                .filter(|c| c.value.is_finite())
                .map(|c| Cand { key: (1, t), ..c })
        })
        .collect();
    all.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.key.cmp(&b.key)));
    all.truncate(8);
    all
}

/// Index `i` of the grid product `grid^n` as a vector.
fn grid_point(grid: &[f64], n: usize, mut i: u64) -> Vec<f64> {
    let g = grid.len() as u64;
    (0..n)
        .map(|_| {
            let v = grid[(i % g) as usize];
            i /= g;
            v
        })
        .collect()
}

fn pow_u128(base: u128, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base))
}

// ---------------------------------------------------------------------------
// democracy

/// `φ_u^s` and `φ_l^s` side by side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemocracyFunctions {
    pub upper: ParamReport,
    pub lower: ParamReport,
}

impl DemocracyFunctions {
    /// `max_m φ_u^s(m) / φ_l^s(m)`.
    pub fn max_ratio(&self) -> f64 {
        self.upper
            .entries
            .iter()
            .zip(&self.lower.entries)
            .map(|(u, l)| u.value / l.value)
            .fold(0.0, f64::max)
    }
}

fn signed_indicator(dim: usize, mask: u64, signs: u64) -> Vec<f64> {
    let mut f = vec![0.0; dim];
    let mut k = 0;
    for (j, x) in f.iter_mut().enumerate() {
        if mask >> j & 1 == 1 {
            *x = if signs >> k & 1 == 1 { -1.0 } else { 1.0 };
            k += 1;
        }
    }
    f
}

#[derive(Clone)]
struct SizeExtremes {
    max: Vec<(f64, u64, u64)>,
    min: Vec<(f64, u64, u64)>,
}

impl SizeExtremes {
    fn new(dim: usize) -> Self {
        SizeExtremes {
            max: vec![(f64::NEG_INFINITY, u64::MAX, u64::MAX); dim + 1],
            min: vec![(f64::INFINITY, u64::MAX, u64::MAX); dim + 1],
        }
    }

    fn push(&mut self, k: usize, v: f64, mask: u64, signs: u64) {
        let key = (mask, signs);
        let (mv, mm, ms) = self.max[k];
        if v > mv || (v == mv && key < (mm, ms)) {
            self.max[k] = (v, mask, signs);
        }
        let (nv, nm, ns) = self.min[k];
        if v < nv || (v == nv && key < (nm, ns)) {
            self.min[k] = (v, mask, signs);
        }
    }

    fn merge(mut self, other: SizeExtremes) -> SizeExtremes {
        for k in 0..self.max.len() {
            let (v, m, s) = other.max[k];
            if v.is_finite() {
                self.push_max(k, v, m, s);
            }
            let (v, m, s) = other.min[k];
            if v.is_finite() {
                self.push_min(k, v, m, s);
            }
        }
        self
    }

    fn push_max(&mut self, k: usize, v: f64, mask: u64, signs: u64) {
        let (mv, mm, ms) = self.max[k];
        if v > mv || (v == mv && (mask, signs) < (mm, ms)) {
            self.max[k] = (v, mask, signs);
        }
    }

    fn push_min(&mut self, k: usize, v: f64, mask: u64, signs: u64) {
        let (nv, nm, ns) = self.min[k];
        if v < nv || (v == nv && (mask, signs) < (nm, ns)) {
            self.min[k] = (v, mask, signs);
        }
    }
}

/// `φ_u^s(m) = max{‖1_{ε,A}‖ : |A| ≤ m}` and `φ_l^s(m) = min{‖1_{ε,A}‖ : m ≤ |A| ≤ dim}`
/// for `1 ≤ m ≤ m_max`.
pub fn democracy_functions(basis: &BasisRep, m_max: usize, mode: &SearchMode) -> Result<DemocracyFunctions> {
    let dim = basis.dim();
    if m_max == 0 || m_max > dim {
        return Err(Error::InvalidArgument(format!("m_max must lie in 1..={dim}")));
    }
    if dim > 63 {
        return Err(Error::InvalidArgument("democracy search supports dim ≤ 63".into()));
    }
    let ext = match mode {
        SearchMode::Exhaustive { .. } => {
            // every signed set once, first sign fixed
            let needed = (pow_u128(3, dim) - 1) / 2;
            mode.check_exhaustive(m_max, dim, needed)?;
            (1u64..1u64 << dim)
                .into_par_iter()
                .fold(
                    || SizeExtremes::new(dim),
                    |mut acc, mask| {
                        let k = mask.count_ones() as usize;
                        for signs in 0..1u64 << (k - 1) {
                            let f = signed_indicator(dim, mask, signs << 1);
                            let v = basis.norm_unchecked(&f);
                            acc.push(k, v, mask, signs << 1);
                        }
                        acc
                    },
                )
                .reduce(|| SizeExtremes::new(dim), SizeExtremes::merge)
        }
        SearchMode::Sampled { trials, seed, .. } => {
            let structured = structured_signed_sets(dim);
            let base = structured.iter().fold(SizeExtremes::new(dim), |mut acc, (mask, signs)| {
                let f = signed_indicator(dim, *mask, *signs);
                acc.push(mask.count_ones() as usize, basis.norm_unchecked(&f), *mask, *signs);
                acc
            });
            let sampled = (0..*trials)
                .into_par_iter()
                .fold(
                    || SizeExtremes::new(dim),
                    |mut acc, t| {
                        let mut rng = trial_rng(*seed, t);
                        let k = rng.gen_range(1..=dim);
                        let mut idx: Vec<usize> = (0..dim).collect();
                        for i in 0..k {
                            let j = rng.gen_range(i..dim);
                            idx.swap(i, j);
                        }
                        let mask = idx[..k].iter().fold(0u64, |m, j| m | 1 << j);
                        let signs = rng.gen::<u64>() & ((1u64 << k) - 1);
                        let f = signed_indicator(dim, mask, signs);
                        acc.push(k, basis.norm_unchecked(&f), mask, signs);
                        acc
                    },
                )
                .reduce(|| SizeExtremes::new(dim), SizeExtremes::merge);
            base.merge(sampled)
        }
    };

    let search = SearchSummary::from(mode);
    let (upper_bound, lower_bound) = if mode.is_exhaustive() {
        (BoundKind::ExactOnGrid, BoundKind::ExactOnGrid)
    } else {
        (BoundKind::LowerBound, BoundKind::UpperBound)
    };
    let mut upper = ParamReport::new(Parameter::UpperDemocracy, basis, search.clone());
    let mut lower = ParamReport::new(Parameter::LowerDemocracy, basis, search);
    let mut run_max = (f64::NEG_INFINITY, 0u64, 0u64);
    for m in 1..=m_max {
        let c = ext.max[m];
        if c.0.is_finite() && (c.0 > run_max.0) {
            run_max = c;
        }
        let mut best_min = (f64::INFINITY, 0u64, 0u64);
        for k in m..=dim {
            let c = ext.min[k];
            if c.0 < best_min.0 {
                best_min = c;
            }
        }
        if !run_max.0.is_finite() || !best_min.0.is_finite() {
            return Err(Error::InvalidArgument(format!("no signed set of size {m} was evaluated")));
        }
        upper.entries.push(Entry {
            m,
            value: run_max.0,
            bound: upper_bound,
            grid_value: None,
            ceiling: None,
            witness: Witness::vector(signed_indicator(dim, run_max.1, run_max.2)),
        });
        lower.entries.push(Entry {
            m,
            value: best_min.0,
            bound: lower_bound,
            grid_value: None,
            ceiling: None,
            witness: Witness::vector(signed_indicator(dim, best_min.1, best_min.2)),
        });
    }
    lower
        .notes
        .push(format!("lower function restricted to sets inside [1, {dim}]"));
    Ok(DemocracyFunctions { upper, lower })
}

/// Intervals and alternating intervals of every length and offset.
fn structured_signed_sets(dim: usize) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for k in 1..=dim {
        for start in 0..=dim - k {
            let mask = ((1u64 << k) - 1) << start;
            out.push((mask, 0));
            out.push((mask, 0xAAAA_AAAA_AAAA_AAAA & ((1u64 << k) - 1)));
        }
        if 2 * k - 1 <= dim {
            let mask = (0..k).fold(0u64, |m, i| m | 1 << (2 * i));
            out.push((mask, 0));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// unconditionality parameters

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionalityKind {
    K,
    KTilde,
}

/// `sup ‖x_n‖‖x_n*‖` when known in closed form, giving the ceiling
/// `k_m ≤ sup ‖x_n‖‖x_n*‖ · m^{1/p}` in a `p`-Banach ambient.
fn biorthogonal_bound(basis: &BasisRep) -> Option<f64> {
    match basis {
        BasisRep::UnitVectors(s) => match s.kind() {
            SpaceKind::Lp { .. } => Some(1.0),
            _ => None,
        },
        BasisRep::Difference { p, dim } => Some(if *dim >= 2 { 2f64.powf(1.0 / p.value()) } else { 1.0 }),
        _ => None,
    }
}

/// Analytic ceiling on `k_m` (and hence `k̃_m`).
pub fn conditionality_ceiling(basis: &BasisRep, m: usize) -> Option<f64> {
    let p = basis.banach_exponent()?;
    Some(biorthogonal_bound(basis)? * (m as f64).powf(1.0 / p))
}

/// Objective for `k̃`/`k`: best `‖S_A f‖/‖f‖` over the subsets `A` of the
/// first `support` coordinates listed in `masks`.
fn projection_objective<'a>(basis: &'a BasisRep, masks: &'a [u64]) -> impl Fn(&[f64]) -> Option<Cand> + Sync + 'a {
    move |f: &[f64]| {
        let nf = basis.norm_unchecked(f);
        if !(nf > 0.0) {
            return None;
        }
        let mut best: Option<(f64, u64)> = None;
        for &mask in masks {
            let v = basis.norm_unchecked(&project_mask(f, mask)) / nf;
            if best.is_none_or(|(b, bm)| v > b || (v == b && mask < bm)) {
                best = Some((v, mask));
            }
        }
        best.map(|(value, mask)| Cand {
            value,
            key: (0, 0),
            witness: Witness::projection(f.to_vec(), mask_set(mask)),
        })
    }
}

/// Closed-form candidates for `k̃_m` that are not necessarily on the grid.
fn closed_form_k_tilde(m: usize) -> Vec<(Vec<f64>, IndexSet)> {
    let mut out = Vec::new();
    let ones = vec![1.0; m];
    let odd = IndexSet::from_indices((1..=m).step_by(2)).expect("valid");
    let even = IndexSet::from_indices((2..=m).step_by(2)).expect("valid");
    out.push((ones.clone(), odd));
    if m >= 2 {
        out.push((ones, even));
    }
    out
}

/// Lift the best `k̃_r[X]` witness into a DKK space (group `A` by blocks).
fn lifted_candidate(space: &DkkSpace, x_entry: &Entry, m: usize) -> Option<(Vec<f64>, IndexSet)> {
    let set = x_entry.witness.set.as_ref()?;
    let mut f = space.lift(&x_entry.witness.f).ok()?;
    f.truncate(m.max(1));
    f.resize(m, 0.0);
    let part = space.partition();
    let mut indices = Vec::new();
    for n in set.iter() {
        if n > part.block_count() {
            continue;
        }
        let range = part.block_range(n);
        indices.extend((range.start + 1..=range.end).filter(|j| *j <= m));
    }
    Some((f, IndexSet::from_indices(indices).ok()?))
}

fn masks_for(support: usize) -> Vec<u64> {
    (1u64..1u64 << support).collect()
}

fn k_tilde_entry(basis: &BasisRep, m: usize, mode: &SearchMode) -> Result<Entry> {
    if m == 0 || m > basis.dim() {
        return Err(Error::InvalidArgument(format!("m must lie in 1..={}", basis.dim())));
    }
    if m > 20 {
        return Err(Error::InvalidArgument("k̃ search enumerates all subsets; m ≤ 20".into()));
    }
    let masks = masks_for(m);
    let objective = projection_objective(basis, &masks);
    let mut grid_value = None;
    let mut best: Option<Cand> = None;
    let mut starts: Vec<Cand> = Vec::new();

    match mode {
        SearchMode::Exhaustive { .. } => {
            let grid = mode.grid();
            let points = pow_u128(grid.len() as u128, m);
            let needed = points.saturating_mul(masks.len() as u128 + 1);
            mode.check_exhaustive(m, m, needed)?;
            let grid_best = par_best(points as u64, |i| {
                let f = grid_point(&grid, m, i);
                objective(&f).map(|c| Cand { key: (2, i), ..c })
            });
            grid_value = grid_best.as_ref().map(|c| c.value);
            if let Some(c) = &grid_best {
                starts.push(c.clone());
            }
            best = better_opt(best, grid_best);
        }
        SearchMode::Sampled { trials, seed, .. } => {
            let hint = block_hint(basis);
            let sample = |rng: &mut ChaCha8Rng, t: u64| sample_vector(rng, m, t, hint);
            let top = sampled_best(*trials, *seed, &sample, &objective);
            starts.extend(top.iter().cloned());
            best = better_opt(best, top.into_iter().next());
        }
    }

    for (k, (f, set)) in closed_form_k_tilde(m).into_iter().enumerate() {
        if let Some(c) = objective(&f) {
            let direct = closed_form_cand(basis, &f, &set, (0, k as u64));
            let cand = better_opt(Some(Cand { key: (0, k as u64), ..c }), direct);
            if let Some(c) = cand {
                starts.push(c.clone());
                best = better_opt(best, Some(c));
            }
        }
    }

    if let BasisRep::Dkk(space) = basis {
        let part = space.partition();
        let r = part.cumulative_sums().iter().take_while(|big_m| **big_m <= m).count();
        if r >= 1 {
            let x_entry = k_tilde_entry(space.x(), r, mode)?;
            if let Some((f, set)) = lifted_candidate(space, &x_entry, m) {
                if let Some(c) = closed_form_cand(basis, &f, &set, (0, 100)) {
                    starts.push(c.clone());
                    best = better_opt(best, Some(c));
                }
            }
        }
    }

    let rounds = mode.refine_rounds();
    if rounds > 0 {
        best = better_opt(best, refine_all(starts, m, rounds, &objective));
    }
    let best = best.ok_or_else(|| Error::InvalidArgument("no candidate evaluated".into()))?;
    let bound = match grid_value {
        Some(g) if g >= best.value => BoundKind::ExactOnGrid,
        _ => BoundKind::LowerBound,
    };
    Ok(Entry {
        m,
        value: best.value,
        bound,
        grid_value,
        ceiling: conditionality_ceiling(basis, m),
        witness: best.witness,
    })
}

fn closed_form_cand(basis: &BasisRep, f: &[f64], set: &IndexSet, key: (u64, u64)) -> Option<Cand> {
    let nf = basis.norm_unchecked(f);
    if !(nf > 0.0) {
        return None;
    }
    let value = basis.norm_unchecked(&project(f, set)) / nf;
    value.is_finite().then(|| Cand {
        value,
        key,
        witness: Witness::projection(f.to_vec(), set.clone()),
    })
}

/// Masks of all subsets of `0..dim` with at most `m` elements.
fn small_masks(dim: usize, m: usize) -> Vec<u64> {
    let mut out = Vec::new();
    for k in 1..=m.min(dim) {
        for c in Combinations::new(dim, k) {
            out.push(c.iter().fold(0u64, |acc, j| acc | 1 << j));
        }
    }
    out
}

fn k_entry(basis: &BasisRep, m: usize, mode: &SearchMode) -> Result<Entry> {
    let dim = basis.dim();
    if dim > 63 {
        return Err(Error::InvalidArgument("k search supports dim ≤ 63".into()));
    }
    // the k̃ candidates are a subset of the k candidates
    let tilde = k_tilde_entry(basis, m, mode)?;
    let mut best = Some(Cand {
        value: tilde.value,
        key: (0, 0),
        witness: tilde.witness.clone(),
    });
    let subset_count: u128 = (1..=m).map(|k| binomial(dim, k)).sum();
    let masks: Vec<u64> = if subset_count <= 4096 {
        small_masks(dim, m)
    } else {
        // intervals, spread sets and their shifts
        let mut v = Vec::new();
        for k in 1..=m {
            for start in 0..dim {
                if start + k <= dim {
                    v.push(((1u64 << k) - 1) << start);
                }
                if start + 2 * k - 1 <= dim {
                    v.push((0..k).fold(0u64, |acc, i| acc | 1 << (start + 2 * i)));
                }
            }
        }
        v.sort_unstable();
        v.dedup();
        v
    };
    let objective = projection_objective(basis, &masks);
    let mut starts = Vec::new();
    match mode {
        SearchMode::Exhaustive { .. } => {
            let grid = mode.grid();
            let points = pow_u128(grid.len() as u128, dim);
            let needed = points.saturating_mul(masks.len() as u128 + 1);
            if mode.check_exhaustive(m, dim, needed).is_ok() {
                let c = par_best(points as u64, |i| {
                    let f = grid_point(&grid, dim, i);
                    objective(&f).map(|c| Cand { key: (2, i), ..c })
                });
                if let Some(c) = &c {
                    starts.push(c.clone());
                }
                best = better_opt(best, c);
            }
        }
        SearchMode::Sampled { trials, seed, .. } => {
            let hint = block_hint(basis);
            let sample = |rng: &mut ChaCha8Rng, t: u64| sample_vector(rng, dim, t, hint);
            let top = sampled_best(*trials, seed.wrapping_add(0x6b), &sample, &objective);
            starts.extend(top.iter().cloned());
            best = better_opt(best, top.into_iter().next());
        }
    }
    // a constant vector with a spread set: e_dim for the difference system
    if 2 * m <= dim {
        let f = vec![1.0; dim];
        let set = IndexSet::from_indices((1..=m).map(|i| 2 * i)).expect("valid");
        best = better_opt(best, closed_form_cand(basis, &f, &set, (0, 1)));
    }
    let rounds = mode.refine_rounds();
    if rounds > 0 {
        best = better_opt(best, refine_all(starts, dim, rounds, &objective));
    }
    let best = best.expect("k̃ candidate present");
    Ok(Entry {
        m,
        value: best.value,
        bound: BoundKind::LowerBound,
        grid_value: None,
        ceiling: conditionality_ceiling(basis, m),
        witness: best.witness,
    })
}

/// `k_m` or `k̃_m` for `1 ≤ m ≤ m_max`.
pub fn conditionality(
    basis: &BasisRep,
    m_max: usize,
    kind: ConditionalityKind,
    mode: &SearchMode,
) -> Result<ParamReport> {
    let parameter = match kind {
        ConditionalityKind::K => Parameter::K,
        ConditionalityKind::KTilde => Parameter::KTilde,
    };
    let mut report = ParamReport::new(parameter, basis, SearchSummary::from(mode));
    for m in 1..=m_max {
        let e = match kind {
            ConditionalityKind::KTilde => k_tilde_entry(basis, m, mode)?,
            ConditionalityKind::K => k_entry(basis, m, mode)?,
        };
        report.entries.push(e);
    }
    if let Some(p) = basis.banach_exponent() {
        report.add_power_reference("psi_p", p);
        report.add_log_reference("phi_log", p);
    }
    if let BasisRep::Dkk(space) = basis {
        if let SpaceKind::Lp { p } = space.s().kind() {
            report.add_power_reference("psi_q", p.value());
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// embeddings

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingKind {
    Beta,
    Eta,
}

/// `β_r[X, q]` or `η_r[X, q]` for `1 ≤ r ≤ r_max`.
pub fn embedding_constants(
    basis: &BasisRep,
    r_max: usize,
    q: f64,
    kind: EmbeddingKind,
    mode: &SearchMode,
) -> Result<ParamReport> {
    let q = Exponent::new(q)?;
    if r_max == 0 || r_max > basis.dim() {
        return Err(Error::InvalidArgument(format!("r must lie in 1..={}", basis.dim())));
    }
    let parameter = match kind {
        EmbeddingKind::Beta => Parameter::Beta { q },
        EmbeddingKind::Eta => Parameter::Eta { q },
    };
    let objective = |f: &[f64]| -> Option<Cand> {
        let nx = basis.norm_unchecked(f);
        let nq = lp_norm(f, q);
        if !(nx > 0.0 && nq > 0.0) {
            return None;
        }
        let value = match kind {
            EmbeddingKind::Beta => nx / nq,
            EmbeddingKind::Eta => nq / nx,
        };
        Some(Cand {
            value,
            key: (0, 0),
            witness: Witness::vector(f.to_vec()),
        })
    };
    let mut report = ParamReport::new(parameter, basis, SearchSummary::from(mode));
    for r in 1..=r_max {
        let mut starts = Vec::new();
        let mut best: Option<Cand> = None;
        let mut structured: Vec<Vec<f64>> = vec![vec![1.0; r]];
        structured.push((0..r).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect());
        for j in 0..r {
            let mut e = vec![0.0; r];
            e[j] = 1.0;
            structured.push(e);
        }
        for (k, f) in structured.iter().enumerate() {
            if let Some(c) = objective(f) {
                let c = Cand { key: (0, k as u64), ..c };
                starts.push(c.clone());
                best = better_opt(best, Some(c));
            }
        }
        let mut grid_value = None;
        match mode {
            SearchMode::Exhaustive { .. } => {
                let grid = mode.grid();
                let points = pow_u128(grid.len() as u128, r);
                mode.check_exhaustive(r, r, points)?;
                let c = par_best(points as u64, |i| {
                    objective(&grid_point(&grid, r, i)).map(|c| Cand { key: (2, i), ..c })
                });
                grid_value = c.as_ref().map(|c| c.value);
                if let Some(c) = &c {
                    starts.push(c.clone());
                }
                best = better_opt(best, c);
            }
            SearchMode::Sampled { trials, seed, .. } => {
                let sample = |rng: &mut ChaCha8Rng, t: u64| sample_vector(rng, r, t, None);
                let top = sampled_best(*trials, *seed, &sample, &objective);
                starts.extend(top.iter().cloned());
                best = better_opt(best, top.into_iter().next());
            }
        }
        let rounds = mode.refine_rounds();
        if rounds > 0 {
            best = better_opt(best, refine_all(starts, r, rounds, &objective));
        }
        let best = best.ok_or_else(|| Error::InvalidArgument("no candidate evaluated".into()))?;
        let bound = match grid_value {
            Some(g) if g >= best.value => BoundKind::ExactOnGrid,
            _ => BoundKind::LowerBound,
        };
        report.entries.push(Entry {
            m: r,
            value: best.value,
            bound,
            grid_value,
            ceiling: None,
            witness: best.witness,
        });
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// greedy-set measurements

/// Greedy sets of size `m` used by the samplers: all of them when few,
/// otherwise deterministic and random tie choices.
fn sampled_greedy_sets(a: &[f64], m: usize, rng: &mut ChaCha8Rng, extra: usize) -> (Vec<IndexSet>, bool) {
    let n_sets = tga::count_greedy_sets(a, m).unwrap_or(0);
    if n_sets <= TIE_ENUMERATION_LIMIT {
        let sets = tga::greedy_sets(a, m, tga::TieRule::AllMaximal).unwrap_or_default();
        return (sets, false);
    }
    let mut sets = Vec::new();
    let mut push = |s: Result<IndexSet>| {
        if let Ok(s) = s {
            if !sets.contains(&s) {
                sets.push(s);
            }
        }
    };
    push(tga::greedy_set(a, m, tga::TieRule::LowestIndex));
    push(tga::greedy_set(a, m, tga::TieRule::HighestIndex));
    for offset in 0..2usize {
        push(tga::greedy_set_with(a, m, |ties, need| {
            let mut pick: Vec<usize> = (offset..ties.len()).step_by(2).take(need).collect();
            let mut fill = (0..ties.len()).filter(|i| !pick.contains(i)).collect::<Vec<_>>().into_iter();
            while pick.len() < need {
                pick.push(fill.next().expect("enough ties"));
            }
            pick
        }));
    }
    for _ in 0..extra {
        let seed_word: u64 = rng.gen();
        push(tga::greedy_set_with(a, m, |ties, need| {
            let mut r = ChaCha8Rng::seed_from_u64(seed_word);
            let mut idx: Vec<usize> = (0..ties.len()).collect();
            for i in 0..need {
                let j = r.gen_range(i..ties.len());
                idx.swap(i, j);
            }
            idx.truncate(need);
            idx
        }));
    }
    (sets, true)
}

/// Per-size best of `‖S_A f‖/‖f‖` over greedy sets of `f`.
fn greedy_ratios(basis: &BasisRep, f: &[f64], rng: &mut ChaCha8Rng) -> (Vec<Option<(f64, IndexSet)>>, bool) {
    let dim = f.len();
    let nf = basis.norm_unchecked(f);
    let mut out = vec![None; dim + 1];
    let mut truncated = false;
    if !(nf > 0.0) {
        return (out, truncated);
    }
    for (m, slot) in out.iter_mut().enumerate().skip(1) {
        let (sets, t) = sampled_greedy_sets(f, m, rng, 4);
        truncated |= t;
        for set in sets {
            let v = basis.norm_unchecked(&project(f, &set)) / nf;
            if slot.as_ref().is_none_or(|(b, _)| v > *b) {
                *slot = Some((v, set));
            }
        }
    }
    (out, truncated)
}

#[derive(Clone)]
struct PerSize {
    best: Vec<Option<Cand>>,
    truncated: u64,
}

impl PerSize {
    fn new(dim: usize) -> Self {
        PerSize {
            best: vec![None; dim + 1],
            truncated: 0,
        }
    }

    fn merge(mut self, other: PerSize) -> PerSize {
        for (a, b) in self.best.iter_mut().zip(other.best) {
            *a = better_opt(a.take(), b);
        }
        self.truncated += other.truncated;
        self
    }
}

fn per_size_report(
    parameter: Parameter,
    basis: &BasisRep,
    search: SearchSummary,
    acc: PerSize,
) -> ParamReport {
    let mut report = ParamReport::new(parameter, basis, search);
    for (m, c) in acc.best.into_iter().enumerate() {
        if let Some(c) = c {
            report.entries.push(Entry {
                m,
                value: c.value,
                bound: BoundKind::LowerBound,
                grid_value: None,
                ceiling: None,
                witness: c.witness,
            });
        }
    }
    if acc.truncated > 0 {
        report.notes.push(format!(
            "{} trials had more than {TIE_ENUMERATION_LIMIT} greedy sets of some size; tie choices were sampled",
            acc.truncated
        ));
    }
    report
}

/// Sampled quasi-greedy constant: the best `‖S_A f‖/‖f‖` over greedy sets
/// `A` of every size; one entry per size.
pub fn quasi_greedy_constant(basis: &BasisRep, trials: u64, seed: u64) -> Result<ParamReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let dim = basis.dim();
    let hint = block_hint(basis);
    let acc = (0..trials)
        .into_par_iter()
        .fold(
            || PerSize::new(dim),
            |mut acc, t| {
                let mut rng = trial_rng(seed, t);
                let f = sample_vector(&mut rng, dim, t, hint);
                let (ratios, truncated) = greedy_ratios(basis, &f, &mut rng);
                acc.truncated += truncated as u64;
                for (m, r) in ratios.into_iter().enumerate() {
                    if let Some((value, set)) = r {
                        let c = Cand {
                            value,
                            key: (t, m as u64),
                            witness: Witness::projection(f.clone(), set),
                        };
                        acc.best[m] = better_opt(acc.best[m].take(), Some(c));
                    }
                }
                acc
            },
        )
        .reduce(|| PerSize::new(dim), PerSize::merge);
    Ok(per_size_report(
        Parameter::QuasiGreedy,
        basis,
        SearchSummary::Sampled { trials, seed },
        acc,
    ))
}

/// Index sets satisfying `|A| > d` and `b|A| < min A`, structured plus random.
fn suppression_sets(dim: usize, b: usize, d: usize, rng: &mut ChaCha8Rng, exhaustive: bool) -> Vec<IndexSet> {
    let ok = |s: &IndexSet| s.len() > d && s.min().is_some_and(|lo| b * s.len() < lo);
    let mut out: Vec<IndexSet> = Vec::new();
    if exhaustive {
        for mask in 1u64..1u64 << dim {
            let s = IndexSet::from_mask(mask);
            if ok(&s) {
                out.push(s);
            }
        }
        return out;
    }
    for k in d + 1..=dim {
        let lo = b * k + 1;
        if lo > dim {
            break;
        }
        for start in lo..=dim {
            if start + k - 1 <= dim {
                out.push(IndexSet::interval(start, start + k - 1).expect("valid"));
            }
            if start + 2 * (k - 1) <= dim {
                out.push(IndexSet::from_indices((0..k).map(|i| start + 2 * i)).expect("valid"));
            }
        }
        for _ in 0..4 {
            let start = rng.gen_range(lo..=dim);
            let span = dim - start + 1;
            if span < k {
                continue;
            }
            let mut idx: Vec<usize> = (start..=dim).collect();
            for i in 0..k {
                let j = rng.gen_range(i..idx.len());
                idx.swap(i, j);
            }
            out.push(IndexSet::from_indices(idx[..k].iter().copied()).expect("valid"));
        }
    }
    out.retain(|s| ok(s));
    out
}

/// Suppression constant over sets with `|A| > d` and `b|A| < min A`
/// (`b = 1, d = 0` gives `|A| < min A`); one entry per `|A|`.
pub fn suppression_asymptotic(basis: &BasisRep, b: usize, d: usize, mode: &SearchMode) -> Result<ParamReport> {
    let dim = basis.dim();
    if dim < 2 || b == 0 {
        return Err(Error::InvalidArgument("need dim ≥ 2 and b ≥ 1".into()));
    }
    let (trials, seed) = match mode {
        SearchMode::Sampled { trials, seed, .. } => (*trials, *seed),
        SearchMode::Exhaustive { .. } => (1024, 0),
    };
    let exhaustive = mode.is_exhaustive();
    if exhaustive {
        mode.check_exhaustive(dim, dim, (1u128 << dim).saturating_mul(trials as u128))?;
    }
    let hint = block_hint(basis);
    let shared_sets = if exhaustive {
        let mut rng = trial_rng(seed, u64::MAX);
        suppression_sets(dim, b, d, &mut rng, true)
    } else {
        Vec::new()
    };
    let acc = (0..trials)
        .into_par_iter()
        .fold(
            || PerSize::new(dim),
            |mut acc, t| {
                let mut rng = trial_rng(seed, t);
                let f = sample_vector(&mut rng, dim, t, hint);
                let nf = basis.norm_unchecked(&f);
                if !(nf > 0.0) {
                    return acc;
                }
                let local;
                let sets = if exhaustive {
                    &shared_sets
                } else {
                    local = suppression_sets(dim, b, d, &mut rng, false);
                    &local
                };
                for (i, set) in sets.iter().enumerate() {
                    let value = basis.norm_unchecked(&project(&f, set)) / nf;
                    let k = set.len();
                    if acc.best[k].as_ref().is_none_or(|c| value >= c.value) {
                        let c = Cand {
                            value,
                            key: (t, i as u64),
                            witness: Witness::projection(f.clone(), set.clone()),
                        };
                        acc.best[k] = better_opt(acc.best[k].take(), Some(c));
                    }
                }
                acc
            },
        )
        .reduce(|| PerSize::new(dim), PerSize::merge);
    // a constant vector against a single late index
    let mut acc = acc;
    let f = vec![1.0; dim];
    for j in (b + 1).max(2)..=dim {
        if d == 0 {
            let set = IndexSet::from_indices([j]).expect("valid");
            let c = closed_form_cand(basis, &f, &set, (u64::MAX, j as u64));
            acc.best[1] = better_opt(acc.best[1].take(), c);
        }
    }
    Ok(per_size_report(
        Parameter::Suppression { b, d },
        basis,
        SearchSummary::from(mode),
        acc,
    ))
}

/// `max ‖f‖/‖g‖` over sampled pairs with
/// `|supp f| ≤ #{n : max_s |f_s| ≤ |g_n|}`; one entry, at `m = dim`.
pub fn dem_tqg_check(basis: &BasisRep, trials: u64, seed: u64) -> Result<ParamReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let dim = basis.dim();
    let hint = block_hint(basis);
    let best = par_best(trials, |t| {
        let mut rng = trial_rng(seed, t);
        let g = sample_vector(&mut rng, dim, t, hint);
        let mut mags: Vec<f64> = g.iter().map(|x| x.abs()).filter(|x| *x > 0.0).collect();
        mags.sort_by(|a, b| b.total_cmp(a));
        if mags.is_empty() {
            return None;
        }
        let k = rng.gen_range(1..=mags.len());
        let tau = mags[k - 1];
        let count = g.iter().filter(|x| x.abs() >= tau).count();
        let size = rng.gen_range(1..=count);
        let mut idx: Vec<usize> = (0..dim).collect();
        match rng.gen_range(0..3) {
            0 => {}
            1 => idx.reverse(),
            _ => {
                for i in 0..size {
                    let j = rng.gen_range(i..dim);
                    idx.swap(i, j);
                }
            }
        }
        let alternate = rng.gen::<bool>();
        let mut f = vec![0.0; dim];
        for (i, j) in idx[..size].iter().enumerate() {
            let s = if alternate && i % 2 == 1 { -1.0 } else { 1.0 };
            f[*j] = s * tau;
        }
        let value = basis.norm_unchecked(&f) / basis.norm_unchecked(&g);
        Some(Cand {
            value,
            key: (0, t),
            witness: Witness::pair(f, g),
        })
    })
    .ok_or_else(|| Error::InvalidArgument("no admissible pair sampled".into()))?;
    let mut report = ParamReport::new(Parameter::DemTqg, basis, SearchSummary::Sampled { trials, seed });
    report.entries.push(Entry {
        m: dim,
        value: best.value,
        bound: BoundKind::LowerBound,
        grid_value: None,
        ceiling: None,
        witness: best.witness,
    });
    Ok(report)
}

/// Whether `(f, g)` satisfies `|supp f| ≤ #{n : max_s |f_s| ≤ |g_n|}`.
pub fn dem_tqg_admissible(f: &[f64], g: &[f64]) -> bool {
    let support = f.iter().filter(|x| **x != 0.0).count();
    let top = f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    support <= g.iter().filter(|x| x.abs() >= top).count()
}

// ---------------------------------------------------------------------------
// Lebesgue parameter

/// Budget for the Lebesgue witness search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LebesgueBudget {
    pub trials: u64,
    pub seed: u64,
    /// Candidate supports per `f` beyond which supports are sampled.
    #[serde(default = "default_support_cap")]
    pub support_cap: u64,
    #[serde(default = "default_descent_rounds")]
    pub descent_rounds: usize,
}

fn default_support_cap() -> u64 {
    512
}
fn default_descent_rounds() -> usize {
    6
}

impl LebesgueBudget {
    pub fn new(trials: u64, seed: u64) -> Self {
        LebesgueBudget {
            trials,
            seed,
            support_cap: default_support_cap(),
            descent_rounds: default_descent_rounds(),
        }
    }
}

/// Coordinate descent on the coefficients of `g` over `support`, minimizing
/// `‖f − g‖`. A step is taken only on a relative decrease above `STEP_RTOL`.
fn best_approximant(basis: &BasisRep, f: &[f64], support: &[usize], rounds: usize, grid: &[f64]) -> (f64, Vec<f64>) {
    let err = |g: &[f64]| {
        let d: Vec<f64> = f.iter().zip(g).map(|(x, y)| x - y).collect();
        basis.norm_unchecked(&d)
    };
    let scale = f.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    let mut g = vec![0.0; f.len()];
    for &j in support {
        g[j] = f[j];
    }
    let mut best = err(&g);
    // grid starts on small supports
    if pow_u128(grid.len() as u128, support.len()) <= 4096 {
        let points = pow_u128(grid.len() as u128, support.len()) as u64;
        for i in 0..points {
            let c = grid_point(grid, support.len(), i);
            let mut trial = vec![0.0; f.len()];
            for (k, &j) in support.iter().enumerate() {
                trial[j] = c[k] * scale;
            }
            let e = err(&trial);
            if e < best * (1.0 - STEP_RTOL) {
                best = e;
                g = trial;
            }
        }
    }
    let steps = [0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125];
    for _ in 0..rounds {
        let mut improved = false;
        for &j in support {
            for s in steps {
                for dir in [1.0, -1.0] {
                    let mut trial = g.clone();
                    trial[j] += dir * s * scale;
                    let e = err(&trial);
                    if e < best * (1.0 - STEP_RTOL) {
                        best = e;
                        g = trial;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
    (best, g)
}

fn candidate_supports(f: &[f64], m: usize, cap: u64, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let dim = f.len();
    if binomial(dim, m) <= cap as u128 {
        return Combinations::new(dim, m).collect();
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|a, b| f[*b].abs().total_cmp(&f[*a].abs()).then(a.cmp(b)));
    out.push({
        let mut v = order[..m].to_vec();
        v.sort_unstable();
        v
    });
    for start in 0..=dim - m {
        out.push((start..start + m).collect());
    }
    while (out.len() as u64) < cap {
        let mut idx: Vec<usize> = (0..dim).collect();
        for i in 0..m {
            let j = rng.gen_range(i..dim);
            idx.swap(i, j);
        }
        let mut v = idx[..m].to_vec();
        v.sort_unstable();
        out.push(v);
    }
    out.sort();
    out.dedup();
    out
}

fn lebesgue_objective(basis: &BasisRep, f: &[f64], m: usize, budget: &LebesgueBudget, rng: &mut ChaCha8Rng) -> Option<Cand> {
    let (sets, _) = sampled_greedy_sets(f, m, rng, 4);
    let mut worst: Option<(f64, IndexSet)> = None;
    for set in sets {
        let v = basis.norm_unchecked(&tga::residual(f, &set));
        if worst.as_ref().is_none_or(|(b, _)| v > *b) {
            worst = Some((v, set));
        }
    }
    let (num, set) = worst?;
    if !(num > 0.0) {
        return None;
    }
    let grid = dyadic_grid(4);
    let mut best_g: Option<(f64, Vec<f64>)> = None;
    for support in candidate_supports(f, m, budget.support_cap, rng) {
        let (e, g) = best_approximant(basis, f, &support, budget.descent_rounds, &grid);
        if best_g.as_ref().is_none_or(|(b, _)| e < *b) {
            best_g = Some((e, g));
        }
    }
    let (den, g) = best_g?;
    if !(den > 0.0) {
        return None;
    }
    Some(Cand {
        value: num / den,
        key: (0, 0),
        witness: Witness {
            f: f.to_vec(),
            set: Some(set),
            g: Some(g),
        },
    })
}

/// Certified lower bound for the `m`-th Lebesgue parameter over sampled `f`,
/// all greedy sets of size `m` and `m`-term approximants found by grids and
/// coordinate descent.
pub fn lebesgue_lower(basis: &BasisRep, m: usize, budget: &LebesgueBudget) -> Result<ParamReport> {
    let dim = basis.dim();
    let mut report = ParamReport::new(
        Parameter::Lebesgue,
        basis,
        SearchSummary::Sampled {
            trials: budget.trials,
            seed: budget.seed,
        },
    );
    if m == 0 {
        let f = vec![1.0; dim];
        report.entries.push(Entry {
            m,
            value: 1.0,
            bound: BoundKind::LowerBound,
            grid_value: None,
            ceiling: None,
            witness: Witness {
                g: Some(vec![0.0; dim]),
                ..Witness::projection(f, IndexSet::empty())
            },
        });
        return Ok(report);
    }
    if m >= dim {
        return Err(Error::InvalidArgument(format!("m must be below the dimension {dim}")));
    }
    let hint = block_hint(basis);
    let sampled = par_best(budget.trials, |t| {
        let mut rng = trial_rng(budget.seed, t);
        let f = sample_vector(&mut rng, dim, t, hint);
        lebesgue_objective(basis, &f, m, budget, &mut rng).map(|c| Cand { key: (1, t), ..c })
    });
    // constant vectors on initial segments
    let structured = par_best((dim - m) as u64, |k| {
        let n = m + 1 + k as usize;
        let mut f = vec![0.0; dim];
        f[..n].iter_mut().for_each(|x| *x = 1.0);
        let mut rng = trial_rng(budget.seed, u64::MAX - k);
        lebesgue_objective(basis, &f, m, budget, &mut rng).map(|c| Cand { key: (0, k), ..c })
    });
    let best = better_opt(structured, sampled)
        .ok_or_else(|| Error::InvalidArgument("no Lebesgue candidate evaluated".into()))?;
    report.entries.push(Entry {
        m,
        value: best.value,
        bound: BoundKind::LowerBound,
        grid_value: None,
        ceiling: None,
        witness: best.witness,
    });
    Ok(report)
}

// ---------------------------------------------------------------------------
// geometric constants

/// Sampled lower bound for the modulus of concavity
/// `sup ‖f + g‖ / (‖f‖ + ‖g‖)`, including pairs of distinct basis vectors.
pub fn concavity_modulus(basis: &BasisRep, trials: u64, seed: u64) -> Result<ParamReport> {
    let dim = basis.dim();
    let ratio = |f: &[f64], g: &[f64]| {
        let s: Vec<f64> = f.iter().zip(g).map(|(x, y)| x + y).collect();
        basis.norm_unchecked(&s) / (basis.norm_unchecked(f) + basis.norm_unchecked(g))
    };
    let pairs = (dim * dim) as u64;
    let unit = par_best(pairs, |k| {
        let (i, j) = ((k as usize) / dim, (k as usize) % dim);
        if i == j {
            return None;
        }
        let mut f = vec![0.0; dim];
        let mut g = vec![0.0; dim];
        f[i] = 1.0;
        g[j] = 1.0;
        let value = ratio(&f, &g);
        Some(Cand {
            value,
            key: (0, k),
            witness: Witness::pair(f, g),
        })
    });
    let hint = block_hint(basis);
    let sampled = par_best(trials, |t| {
        let mut rng = trial_rng(seed, t);
        let f = sample_vector(&mut rng, dim, t, hint);
        let g = sample_vector(&mut rng, dim, t / FAMILIES, hint);
        let value = ratio(&f, &g);
        Some(Cand {
            value,
            key: (1, t),
            witness: Witness::pair(f, g),
        })
    });
    let best = better_opt(unit, sampled).ok_or_else(|| Error::InvalidArgument("no pair evaluated".into()))?;
    let mut report = ParamReport::new(Parameter::Concavity, basis, SearchSummary::Sampled { trials, seed });
    report.entries.push(Entry {
        m: 1,
        value: best.value,
        bound: BoundKind::LowerBound,
        grid_value: None,
        ceiling: None,
        witness: best.witness,
    });
    Ok(report)
}

/// Sampled lower bound for `sup_m ‖S_{[1,m]}‖`; one entry per `m`.
pub fn basis_constant(basis: &BasisRep, trials: u64, seed: u64) -> Result<ParamReport> {
    let dim = basis.dim();
    let hint = block_hint(basis);
    let acc = (0..trials)
        .into_par_iter()
        .fold(
            || PerSize::new(dim),
            |mut acc, t| {
                let mut rng = trial_rng(seed, t);
                let f = sample_vector(&mut rng, dim, t, hint);
                let nf = basis.norm_unchecked(&f);
                if !(nf > 0.0) {
                    return acc;
                }
                for m in 1..=dim {
                    let set = IndexSet::interval(1, m).expect("valid");
                    let value = basis.norm_unchecked(&project(&f, &set)) / nf;
                    let c = Cand {
                        value,
                        key: (t, m as u64),
                        witness: Witness::projection(f.clone(), set),
                    };
                    acc.best[m] = better_opt(acc.best[m].take(), Some(c));
                }
                acc
            },
        )
        .reduce(|| PerSize::new(dim), PerSize::merge);
    Ok(per_size_report(
        Parameter::BasisConstant,
        basis,
        SearchSummary::Sampled { trials, seed },
        acc,
    ))
}

/// The decomposition `S_A f = S_F f + S_E f − S_B f` with `F = [1, m]`,
/// `E = A ∖ F` and `B = F ∖ A`, evaluated coordinatewise.
pub fn decompose_projection(f: &[f64], set: &IndexSet, m: usize) -> (Vec<f64>, Vec<f64>) {
    let first = IndexSet::interval(1, m.min(f.len())).expect("valid");
    let e = set.difference(&first);
    let b = first.difference(set);
    let lhs = project(f, set);
    let sf = project(f, &first);
    let se = project(f, &e);
    let sb = project(f, &b);
    let rhs = sf.iter().zip(&se).zip(&sb).map(|((x, y), z)| x + y - z).collect();
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::SpaceSpec;

    fn unit(p: f64, dim: usize) -> BasisRep {
        BasisRep::unit_vectors(SpaceSpec::lp(p, dim).unwrap())
    }

    #[test]
    fn grid_has_expected_points() {
        let g = dyadic_grid(2);
        assert_eq!(g, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(dyadic_grid(7).len(), 15);
    }

    #[test]
    fn democracy_of_unit_vectors() {
        for p in [0.5, 1.0, 2.0] {
            let d = democracy_functions(&unit(p, 6), 4, &SearchMode::exhaustive()).unwrap();
            for m in 1..=4 {
                let want = (m as f64).powf(1.0 / p);
                assert!((d.upper.value_at(m).unwrap() - want).abs() < 1e-12 * want);
                assert!((d.lower.value_at(m).unwrap() - want).abs() < 1e-12 * want);
            }
            d.upper.verify(&unit(p, 6)).unwrap();
            d.lower.verify(&unit(p, 6)).unwrap();
        }
    }

    #[test]
    fn democracy_of_c0() {
        let b = BasisRep::unit_vectors(SpaceSpec::new(SpaceKind::Lp { p: Exponent::INFINITY }, 5).unwrap());
        let d = democracy_functions(&b, 5, &SearchMode::exhaustive()).unwrap();
        assert!(d.upper.values().iter().all(|v| *v == 1.0));
        assert!(d.lower.values().iter().all(|v| *v == 1.0));
    }

    #[test]
    fn democracy_budget_guard() {
        let mode = SearchMode::exhaustive().with_budget(100);
        assert!(matches!(
            democracy_functions(&unit(1.0, 8), 2, &mode),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn k_tilde_of_difference() {
        let b = BasisRep::difference(0.5, 5).unwrap();
        let mode = SearchMode::exhaustive().with_grid_levels(2);
        let r = conditionality(&b, 3, ConditionalityKind::KTilde, &mode).unwrap();
        assert_eq!(r.value_at(1).unwrap(), 1.0);
        assert_eq!(r.value_at(3).unwrap(), 9.0);
        r.verify(&b).unwrap();
    }

    #[test]
    fn k_tilde_of_l2_is_one() {
        let b = unit(2.0, 4);
        let r = conditionality(&b, 3, ConditionalityKind::KTilde, &SearchMode::exhaustive().with_grid_levels(2)).unwrap();
        assert!(r.values().iter().all(|v| *v == 1.0));
    }

    #[test]
    fn k_dominates_k_tilde_and_respects_ceiling() {
        let b = BasisRep::difference(0.5, 5).unwrap();
        let mode = SearchMode::exhaustive().with_grid_levels(2);
        let kt = conditionality(&b, 2, ConditionalityKind::KTilde, &mode).unwrap();
        let k = conditionality(&b, 2, ConditionalityKind::K, &mode).unwrap();
        for m in 1..=2 {
            let e = k.entry(m).unwrap();
            assert!(e.value >= kt.value_at(m).unwrap());
            assert!(e.value <= e.ceiling.unwrap() * (1.0 + 1e-12));
        }
        assert_eq!(k.value_at(1).unwrap(), 4.0);
        k.verify(&b).unwrap();
    }

    #[test]
    fn beta_of_l_half() {
        let b = unit(0.5, 4);
        let r = embedding_constants(&b, 4, 2.0, EmbeddingKind::Beta, &SearchMode::exhaustive().with_grid_levels(3)).unwrap();
        assert!((r.value_at(4).unwrap() - 8.0).abs() < 1e-12);
        let e = embedding_constants(&b, 4, 2.0, EmbeddingKind::Eta, &SearchMode::sampled(200, 1)).unwrap();
        assert!((e.value_at(4).unwrap() - 1.0).abs() < 1e-12);
        r.verify(&b).unwrap();
    }

    #[test]
    fn eta_of_difference() {
        let b = BasisRep::difference(0.5, 6).unwrap();
        let r = embedding_constants(&b, 6, 2.0, EmbeddingKind::Eta, &SearchMode::sampled(100, 3)).unwrap();
        for m in 1..=6 {
            assert!(r.value_at(m).unwrap() >= (m as f64).sqrt() * (1.0 - 1e-12));
        }
    }

    #[test]
    fn quasi_greedy_examples() {
        for p in [0.5, 1.0, 2.0] {
            let r = quasi_greedy_constant(&unit(p, 6), 200, 5).unwrap();
            assert!((r.max_value() - 1.0).abs() < 1e-12);
        }
        let d = BasisRep::difference(0.5, 8).unwrap();
        let r = quasi_greedy_constant(&d, 400, 5).unwrap();
        assert!(r.max_value() >= 4.0);
        r.verify(&d).unwrap();
    }

    #[test]
    fn suppression_examples() {
        let r = suppression_asymptotic(&unit(0.5, 6), 1, 0, &SearchMode::sampled(200, 2)).unwrap();
        assert!((r.max_value() - 1.0).abs() < 1e-12);
        let d = BasisRep::difference(0.5, 6).unwrap();
        let r = suppression_asymptotic(&d, 1, 0, &SearchMode::sampled(200, 2)).unwrap();
        assert!(r.value_at(1).unwrap() >= 4.0);
        r.verify(&d).unwrap();
    }

    #[test]
    fn dem_tqg_examples() {
        let b = unit(2.0, 3);
        let w = Witness::pair(vec![1.0, 1.0, 0.0], vec![2.0, 1.0, 1.0]);
        let v = evaluate_witness(Parameter::DemTqg, &b, &w).unwrap();
        assert!((v - (2f64 / 6.0).sqrt()).abs() < 1e-15);
        assert!(dem_tqg_admissible(&w.f, w.g.as_ref().unwrap()));
        let r = dem_tqg_check(&b, 300, 4).unwrap();
        assert!(r.max_value() <= 1.0 + 1e-12);
        let e = r.entry(3).unwrap();
        assert!(dem_tqg_admissible(&e.witness.f, e.witness.g.as_ref().unwrap()));
    }

    #[test]
    fn lebesgue_examples() {
        let b = unit(2.0, 6);
        for m in 0..=4 {
            let r = lebesgue_lower(&b, m, &LebesgueBudget::new(64, 9)).unwrap();
            assert_eq!(r.value_at(m).unwrap(), 1.0, "m = {m}");
        }
        let d = BasisRep::difference(0.5, 4).unwrap();
        let r = lebesgue_lower(&d, 1, &LebesgueBudget::new(32, 9)).unwrap();
        assert!(r.value_at(1).unwrap() >= 4.0);
        r.verify(&d).unwrap();
    }

    #[test]
    fn concavity_of_lp() {
        let r = concavity_modulus(&unit(0.5, 4), 100, 1).unwrap();
        assert!((r.max_value() - 2.0).abs() < 1e-12);
        let r = concavity_modulus(&unit(1.0, 4), 100, 1).unwrap();
        assert!((r.max_value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn difference_is_monotone() {
        let d = BasisRep::difference(0.5, 10).unwrap();
        let r = basis_constant(&d, 500, 1).unwrap();
        assert!(r.max_value() <= 1.0 + 1e-12);
    }

    #[test]
    fn verify_catches_tampering() {
        let b = unit(2.0, 3);
        let mut r = quasi_greedy_constant(&b, 20, 1).unwrap();
        r.entries[0].value *= 1.5;
        assert!(matches!(r.verify(&b), Err(Error::WitnessMismatch { .. })));
    }

    #[test]
    fn sampled_reports_are_reproducible() {
        let d = BasisRep::difference(0.5, 6).unwrap();
        let a = quasi_greedy_constant(&d, 300, 11).unwrap();
        let b = quasi_greedy_constant(&d, 300, 11).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
