//! The DKK construction `Y[X, S, σ]`: ordered partitions, the averaging
//! projection, the biorthogonal system `(v_n, v_n*)`, the map `H` and the
//! resulting quasi-norm. Also the concave-function partition generator and
//! the regularity-sum estimates used for democracy.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bases::BasisRep;
use crate::error::{Error, Result};
use crate::spaces::{check_vector, SpaceSpec};

/// Consecutive integer-interval blocks `σ_n = [1+M_{n−1}, M_n]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct OrderedPartition {
    sizes: Vec<usize>,
    /// `cumulative[r] = M_r`, with `M_0 = 0`.
    cumulative: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartitionRepr {
    sizes: Vec<usize>,
}

impl TryFrom<PartitionRepr> for OrderedPartition {
    type Error = Error;

    fn try_from(r: PartitionRepr) -> Result<Self> {
        OrderedPartition::from_sizes(r.sizes)
    }
}

impl From<OrderedPartition> for PartitionRepr {
    fn from(p: OrderedPartition) -> Self {
        PartitionRepr { sizes: p.sizes }
    }
}

impl OrderedPartition {
    pub fn from_sizes(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidPartition("no blocks given".into()));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidPartition("block sizes must be positive".into()));
        }
        let mut cumulative = Vec::with_capacity(sizes.len() + 1);
        cumulative.push(0usize);
        for n in &sizes {
            let last = *cumulative.last().expect("nonempty");
            let next = last
                .checked_add(*n)
                .ok_or_else(|| Error::InvalidPartition("cumulative size overflows".into()))?;
            cumulative.push(next);
        }
        Ok(OrderedPartition { sizes, cumulative })
    }

    /// Sizes `1, 2, 4, …, 2^{blocks−1}`.
    pub fn dyadic(blocks: usize) -> Result<Self> {
        OrderedPartition::from_sizes((0..blocks).map(|k| 1usize << k).collect())
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn block_count(&self) -> usize {
        self.sizes.len()
    }

    /// `M_{r_max}`.
    pub fn dim(&self) -> usize {
        *self.cumulative.last().expect("nonempty")
    }

    /// `M_r` for `0 ≤ r ≤ r_max`.
    pub fn cumulative(&self, r: usize) -> usize {
        self.cumulative[r]
    }

    pub fn cumulative_sums(&self) -> &[usize] {
        &self.cumulative[1..]
    }

    /// `σ_n` as a 1-based inclusive interval.
    pub fn block(&self, n: usize) -> Result<(usize, usize)> {
        if n == 0 || n > self.sizes.len() {
            return Err(Error::IndexOutOfRange {
                index: n,
                dim: self.sizes.len(),
            });
        }
        Ok((self.cumulative[n - 1] + 1, self.cumulative[n]))
    }

    /// Zero-based half-open coordinate range of block `n` (1-based).
    pub(crate) fn block_range(&self, n: usize) -> std::ops::Range<usize> {
        self.cumulative[n - 1]..self.cumulative[n]
    }

    /// `B_m = min{r : m ≤ M_r}`.
    pub fn right_inverse(&self, m: usize) -> Result<usize> {
        if m == 0 || m > self.dim() {
            return Err(Error::IndexOutOfRange {
                index: m,
                dim: self.dim(),
            });
        }
        Ok(self.cumulative[1..].partition_point(|big_m| *big_m < m) + 1)
    }

    /// The block containing coordinate `j` (1-based).
    pub fn block_of(&self, j: usize) -> Result<usize> {
        self.right_inverse(j)
    }

    /// `(P_σ f, Q_σ f)`: block averages and their complement.
    pub fn averaging_projection(&self, f: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        check_vector(f, self.dim())?;
        let mut padded = f.to_vec();
        padded.resize(self.dim(), 0.0);
        let p = self.average(&padded);
        let q = padded.iter().zip(&p).map(|(x, y)| x - y).collect();
        Ok((p, q))
    }

    fn average(&self, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; f.len()];
        for n in 1..=self.sizes.len() {
            let range = self.block_range(n);
            let block = &f[range.clone()];
            // constant blocks are reproduced exactly
            let mean = if block.iter().all(|x| *x == block[0]) {
                block[0]
            } else {
                block.iter().sum::<f64>() / block.len() as f64
            };
            out[range].iter_mut().for_each(|x| *x = mean);
        }
        out
    }
}

/// Closed-form concave increasing functions `φ: [0,∞) → [1,∞)` with exact
/// inverses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConcaveFamily {
    /// `a + b t`.
    Affine { a: f64, b: f64 },
    /// `1 + t^α`.
    Power { alpha: f64 },
    /// `1 + log(1+t)`.
    Log,
}

impl ConcaveFamily {
    pub fn phi(&self, t: f64) -> f64 {
        match *self {
            ConcaveFamily::Affine { a, b } => a + b * t,
            ConcaveFamily::Power { alpha } => 1.0 + t.powf(alpha),
            ConcaveFamily::Log => 1.0 + t.ln_1p(),
        }
    }

    /// Inverse of `φ`, extended by `0` below `φ(0)`.
    pub fn psi(&self, u: f64) -> f64 {
        match *self {
            ConcaveFamily::Affine { a, b } => ((u - a) / b).max(0.0),
            ConcaveFamily::Power { alpha } => (u - 1.0).max(0.0).powf(1.0 / alpha),
            ConcaveFamily::Log => (u - 1.0).max(0.0).exp_m1(),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ConcaveFamily::Affine { a, b } => {
                if !(a >= 1.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "affine φ needs a ≥ 1 and b > 0, got a={a}, b={b}"
                    )));
                }
            }
            ConcaveFamily::Power { alpha } => {
                if !(alpha > 0.0 && alpha <= 1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "power φ needs 0 < α ≤ 1, got {alpha}"
                    )));
                }
            }
            ConcaveFamily::Log => {}
        }
        // finite-difference monotonicity and concavity on a grid
        let h = 0.125;
        let vals: Vec<f64> = (0..=400).map(|k| self.phi(k as f64 * h)).collect();
        if vals.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("φ is not increasing".into()));
        }
        if vals
            .windows(3)
            .any(|w| w[2] - 2.0 * w[1] + w[0] > 1e-12 * w[1].abs())
        {
            return Err(Error::InvalidArgument("φ is not concave".into()));
        }
        Ok(())
    }
}

/// A concave function together with the base `b` of the partition generator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConcaveRepr", into = "ConcaveRepr")]
pub struct ConcaveSpec {
    phi: ConcaveFamily,
    base: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConcaveRepr {
    phi: ConcaveFamily,
    base: f64,
}

impl TryFrom<ConcaveRepr> for ConcaveSpec {
    type Error = Error;

    fn try_from(r: ConcaveRepr) -> Result<Self> {
        ConcaveSpec::new(r.phi, r.base)
    }
}

impl From<ConcaveSpec> for ConcaveRepr {
    fn from(s: ConcaveSpec) -> Self {
        ConcaveRepr {
            phi: s.phi,
            base: s.base,
        }
    }
}

impl ConcaveSpec {
    pub fn new(phi: ConcaveFamily, base: f64) -> Result<Self> {
        if !(base > 1.0 && base.is_finite()) {
            return Err(Error::InvalidArgument(format!("base must exceed 1, got {base}")));
        }
        phi.validate()?;
        let spec = ConcaveSpec { phi, base };
        let c = spec.growth_constant();
        if !(c > 2.0) {
            return Err(Error::InvalidArgument(format!(
                "b^(ψ(2)/2) = {c} must exceed 2"
            )));
        }
        Ok(spec)
    }

    pub fn family(&self) -> ConcaveFamily {
        self.phi
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    /// `C = b^{ψ(2)/2}`.
    pub fn growth_constant(&self) -> f64 {
        self.base.powf(self.phi.psi(2.0) / 2.0)
    }

    pub fn phi(&self, t: f64) -> f64 {
        self.phi.phi(t)
    }

    pub fn psi(&self, u: f64) -> f64 {
        self.phi.psi(u)
    }

    /// `⌊b^{ψ(r)}⌋`, snapped to the nearest integer when within rounding.
    pub fn cumulative(&self, r: usize) -> Result<u64> {
        let x = self.base.powf(self.psi(r as f64));
        if !x.is_finite() || x >= 9.0e18 {
            return Err(Error::InvalidPartition(format!("M_{r} = {x} overflows")));
        }
        let nearest = x.round();
        let v = if (x - nearest).abs() <= 1e-9 * nearest.max(1.0) {
            nearest
        } else {
            x.floor()
        };
        Ok(v as u64)
    }

    /// Checks `−1 + B_m ≤ φ(log_b m) ≤ B_m` for `1 ≤ m ≤ m_max` and returns the
    /// first violating `m`.
    pub fn first_right_inverse_violation(
        &self,
        partition: &OrderedPartition,
        m_max: usize,
    ) -> Result<Option<usize>> {
        let tol = 1e-9;
        for m in 1..=m_max {
            let b_m = partition.right_inverse(m)? as f64;
            let v = self.phi((m as f64).ln() / self.base.ln());
            if v > b_m + tol * b_m || v < b_m - 1.0 - tol * b_m {
                return Ok(Some(m));
            }
        }
        Ok(None)
    }
}

/// The partition with cumulative sums `M_r = ⌊b^{ψ(r)}⌋`, `1 ≤ r ≤ r_max`.
pub fn partition_from_concave(spec: &ConcaveSpec, r_max: usize) -> Result<OrderedPartition> {
    if r_max < 2 {
        return Err(Error::InvalidArgument("r_max must be at least 2".into()));
    }
    let cum: Vec<u64> = (1..=r_max).map(|r| spec.cumulative(r)).collect::<Result<_>>()?;
    if cum[0] == 0 {
        return Err(Error::InvalidPartition("M_1 = 0".into()));
    }
    if cum.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidPartition(format!("M is not increasing: {cum:?}")));
    }
    let c = spec.growth_constant();
    for (r, w) in cum.windows(2).enumerate() {
        let (lo, hi) = (w[0] as f64, w[1] as f64);
        let tol = 1e-9 * hi;
        if (c - 1.0) * lo > hi + tol || (c - 2.0) * lo > hi - lo + tol {
            return Err(Error::InvalidPartition(format!(
                "growth inequalities fail at r = {}",
                r + 1
            )));
        }
    }
    let mut sizes = Vec::with_capacity(cum.len());
    let mut prev = 0u64;
    for m in cum {
        sizes.push((m - prev) as usize);
        prev = m;
    }
    OrderedPartition::from_sizes(sizes)
}

/// The triple `(X, S, σ)` with cached fundamental-function values of `S`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DkkRepr", into = "DkkRepr")]
pub struct DkkSpace {
    s: SpaceSpec,
    x: BasisRep,
    partition: OrderedPartition,
    lambda: Vec<f64>,
    lambda_dual: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DkkRepr {
    s: SpaceSpec,
    x: BasisRep,
    partition: OrderedPartition,
}

impl TryFrom<DkkRepr> for DkkSpace {
    type Error = Error;

    fn try_from(r: DkkRepr) -> Result<Self> {
        DkkSpace::new(r.s, r.x, r.partition)
    }
}

impl From<DkkSpace> for DkkRepr {
    fn from(d: DkkSpace) -> Self {
        DkkRepr {
            s: d.s,
            x: d.x,
            partition: d.partition,
        }
    }
}

/// One row of the block table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockRow {
    pub n: usize,
    pub start: usize,
    pub end: usize,
    pub size: usize,
    pub cumulative: usize,
    pub lambda: f64,
    pub lambda_dual: f64,
}

impl DkkSpace {
    /// `S` is re-truncated to the partition dimension.
    pub fn new(s: SpaceSpec, x: BasisRep, partition: OrderedPartition) -> Result<Self> {
        if !s.is_rearrangement_invariant() {
            return Err(Error::NotSymmetric(
                "the S side of a DKK space must be subsymmetric".into(),
            ));
        }
        if !s.is_locally_convex() {
            return Err(Error::InvalidSpace(
                "the S side of a DKK space must be locally convex".into(),
            ));
        }
        if x.dim() < partition.block_count() {
            return Err(Error::InvalidBasis(format!(
                "X has dimension {}, partition has {} blocks",
                x.dim(),
                partition.block_count()
            )));
        }
        let s = s.with_dim(partition.dim())?;
        let mut lambda = Vec::with_capacity(partition.block_count());
        let mut lambda_dual = Vec::with_capacity(partition.block_count());
        for &n in partition.sizes() {
            let (l, d) = s.lambda_pair(n)?;
            lambda.push(l);
            lambda_dual.push(d);
        }
        Ok(DkkSpace {
            s,
            x,
            partition,
            lambda,
            lambda_dual,
        })
    }

    /// `S = ℓ_2`, `X = Difference(1/2)`, sizes `1, 2, 4, …, 2^{blocks−1}`.
    pub fn default_instance(blocks: usize) -> Result<Self> {
        let partition = OrderedPartition::dyadic(blocks)?;
        let s = SpaceSpec::lp(2.0, partition.dim())?;
        let x = BasisRep::difference(0.5, blocks)?;
        DkkSpace::new(s, x, partition)
    }

    pub fn dim(&self) -> usize {
        self.partition.dim()
    }

    pub fn s(&self) -> &SpaceSpec {
        &self.s
    }

    pub fn x(&self) -> &BasisRep {
        &self.x
    }

    pub fn partition(&self) -> &OrderedPartition {
        &self.partition
    }

    /// `Λ_{N_n}` per block.
    pub fn lambdas(&self) -> &[f64] {
        &self.lambda
    }

    /// `Λ*_{N_n}` per block.
    pub fn lambda_duals(&self) -> &[f64] {
        &self.lambda_dual
    }

    pub fn banach_exponent(&self) -> Option<f64> {
        let sx = self.x.banach_exponent()?;
        Some(sx.min(self.s.banach_exponent()?))
    }

    pub fn averaging_projection(&self, f: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.partition.averaging_projection(f)
    }

    /// `v_n*(f) = (Σ_{j∈σ_n} f_j) / Λ*_{N_n}`, i.e. the coefficients of `H f`.
    pub fn v_dual_coeffs(&self, f: &[f64]) -> Result<Vec<f64>> {
        check_vector(f, self.dim())?;
        Ok(self.v_dual_unchecked(f))
    }

    fn v_dual_unchecked(&self, f: &[f64]) -> Vec<f64> {
        (1..=self.partition.block_count())
            .map(|n| {
                let range = self.partition.block_range(n);
                let lo = range.start.min(f.len());
                let hi = range.end.min(f.len());
                let sum: f64 = f[lo..hi].iter().sum();
                sum / self.lambda_dual[n - 1]
            })
            .collect()
    }

    /// `v_n = 𝟙_{σ_n} / Λ_{N_n}` in the coordinates of `Y`.
    pub fn v_vector(&self, n: usize) -> Result<Vec<f64>> {
        let (start, end) = self.partition.block(n)?;
        let mut v = vec![0.0; self.dim()];
        let value = 1.0 / self.lambda[n - 1];
        v[start - 1..end].iter_mut().for_each(|x| *x = value);
        Ok(v)
    }

    /// `Σ b_n v_n`: the vector of `Y` whose `H`-image has coefficients `b`.
    pub fn lift(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() > self.partition.block_count() {
            return Err(Error::DimensionMismatch {
                len: b.len(),
                dim: self.partition.block_count(),
            });
        }
        let mut f = vec![0.0; self.dim()];
        for (n, coeff) in b.iter().enumerate() {
            let value = coeff / self.lambda[n];
            f[self.partition.block_range(n + 1)]
                .iter_mut()
                .for_each(|x| *x = value);
        }
        Ok(f)
    }

    /// `(‖Q_σ f‖_S, ‖H f‖_X)`.
    pub fn norm_parts(&self, f: &[f64]) -> Result<(f64, f64)> {
        check_vector(f, self.dim())?;
        Ok(self.norm_parts_unchecked(f))
    }

    fn norm_parts_unchecked(&self, f: &[f64]) -> (f64, f64) {
        let mut padded = f.to_vec();
        padded.resize(self.dim(), 0.0);
        let p = self.partition.average(&padded);
        let q: Vec<f64> = padded.iter().zip(&p).map(|(x, y)| x - y).collect();
        let h = self.v_dual_unchecked(&padded);
        (self.s.norm_unchecked(&q), self.x.norm_unchecked(&h))
    }

    /// `‖Q_σ f‖_S + ‖H f‖_X`.
    pub fn dkk_norm(&self, f: &[f64]) -> Result<f64> {
        let (q, h) = self.norm_parts(f)?;
        Ok(q + h)
    }

    pub(crate) fn norm_unchecked(&self, f: &[f64]) -> f64 {
        let (q, h) = self.norm_parts_unchecked(f);
        q + h
    }

    pub fn block_table(&self) -> Vec<BlockRow> {
        (1..=self.partition.block_count())
            .map(|n| {
                let (start, end) = self.partition.block(n).expect("in range");
                BlockRow {
                    n,
                    start,
                    end,
                    size: self.partition.sizes()[n - 1],
                    cumulative: self.partition.cumulative(n),
                    lambda: self.lambda[n - 1],
                    lambda_dual: self.lambda_dual[n - 1],
                }
            })
            .collect()
    }

    /// Plain-text dump of `σ`, `M_r`, `Λ_{N_n}` and `Λ*_{N_n}`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>4} {:>14} {:>8} {:>10} {:>22} {:>22}",
            "n", "block", "N_n", "M_n", "Lambda_N", "Lambda*_N"
        );
        for row in self.block_table() {
            let _ = writeln!(
                out,
                "{:>4} {:>14} {:>8} {:>10} {:>22.16e} {:>22.16e}",
                row.n,
                format!("[{},{}]", row.start, row.end),
                row.size,
                row.cumulative,
                row.lambda,
                row.lambda_dual
            );
        }
        out
    }
}

/// Growth constants for a sequence `Γ` sampled at increasing points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// Largest `α` with `Γ_n / n^α` nondecreasing on the sample points.
    pub alpha: f64,
    /// Smallest `C₁ ≥ 1` with `Γ_n/n^α ≤ C₁ Γ_m/m^α` for sampled `n ≤ m`.
    pub c1: f64,
}

/// Fit `(α, C₁)` on the points `xs` (sorted, deduplicated internally).
pub fn fit_growth(gamma: &dyn Fn(u64) -> f64, xs: &[u64]) -> Result<GrowthFit> {
    let mut xs = xs.to_vec();
    xs.sort_unstable();
    xs.dedup();
    if xs.len() < 2 || xs[0] == 0 {
        return Err(Error::InvalidArgument("need at least two positive sample points".into()));
    }
    let vals: Vec<f64> = xs.iter().map(|x| gamma(*x)).collect();
    if vals.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument("Γ must be positive and finite".into()));
    }
    let ratios = |alpha: f64| -> Vec<f64> {
        xs.iter()
            .zip(&vals)
            .map(|(x, v)| v / (*x as f64).powf(alpha))
            .collect()
    };
    let nondecreasing = |alpha: f64| {
        ratios(alpha)
            .windows(2)
            .all(|w| w[1] >= w[0] * (1.0 - 1e-12))
    };
    if !nondecreasing(0.0) {
        return Err(Error::InvalidArgument("Γ is not nondecreasing".into()));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if nondecreasing(hi) {
        lo = hi;
    } else {
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if nondecreasing(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let r = ratios(lo);
    let mut suffix_min = f64::INFINITY;
    let mut c1 = 1.0f64;
    for v in r.iter().rev() {
        suffix_min = suffix_min.min(*v);
        c1 = c1.max(v / suffix_min);
    }
    Ok(GrowthFit { alpha: lo, c1 })
}

/// Measured regularity sums and the explicit bounds they are compared with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularitySums {
    pub p: f64,
    pub fit: GrowthFit,
    /// `max_r M_r / N_r`.
    pub c2: f64,
    /// `C₂ / (1 + C₂)`; satisfies `M_r ≤ t M_{r+1}`.
    pub t: f64,
    /// `Σ_{n≤r} Γ^p_{N_n} / Γ^p_{N_r}` for each `r`.
    pub head_sums: Vec<f64>,
    /// `Σ_{r≤n≤r_max} Γ^p_{N_r} / Γ^p_{N_n}` for each `r`.
    pub tail_sums: Vec<f64>,
    /// `C₁^p C₂^p / (1 − t^{p(1−α)})`.
    pub head_bound: f64,
    /// `C₁^p C₂^p / (1 − t^{pα})`.
    pub tail_bound: f64,
    /// Integer `b ≥ M_r / N_r` for all `r`.
    pub b: u64,
    /// `Σ_{n≥r} (Γ_{M_r} / Γ_{N_n})^p` with the adversarial choice `m_n = M_r`.
    pub adversarial_sums: Vec<f64>,
    /// `b^p · tail_bound`.
    pub adversarial_bound: f64,
}

impl RegularitySums {
    pub fn within_bounds(&self) -> bool {
        let ok = |sums: &[f64], bound: f64| bound.is_finite() && sums.iter().all(|s| *s <= bound);
        ok(&self.head_sums, self.head_bound)
            && ok(&self.tail_sums, self.tail_bound)
            && ok(&self.adversarial_sums, self.adversarial_bound)
    }
}

/// Evaluate both regularity sums for block sizes `sizes` and exponent `p`.
/// `Γ` is fitted on every integer up to 4096 plus every `N_r` and `M_r`.
pub fn regularity_sums(gamma: &dyn Fn(u64) -> f64, sizes: &[u64], p: f64) -> Result<RegularitySums> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    if sizes.len() < 2 || sizes.contains(&0) {
        return Err(Error::InvalidPartition("need at least two positive sizes".into()));
    }
    let mut cum = Vec::with_capacity(sizes.len());
    let mut acc = 0u64;
    for n in sizes {
        acc = acc
            .checked_add(*n)
            .ok_or_else(|| Error::InvalidPartition("cumulative size overflows".into()))?;
        cum.push(acc);
    }
    let mut points: Vec<u64> = (1..=4096).collect();
    points.extend_from_slice(sizes);
    points.extend_from_slice(&cum);
    let fit = fit_growth(gamma, &points)?;

    let c2 = sizes
        .iter()
        .zip(&cum)
        .map(|(n, m)| *m as f64 / *n as f64)
        .fold(1.0f64, f64::max);
    let t = c2 / (1.0 + c2);
    if cum.windows(2).any(|w| w[0] as f64 > t * w[1] as f64 * (1.0 + 1e-12)) {
        return Err(Error::InvalidPartition("M_r ≤ t M_{r+1} fails".into()));
    }
    let g: Vec<f64> = sizes.iter().map(|n| gamma(*n).powf(p)).collect();
    let head_sums = (0..sizes.len())
        .map(|r| g[..=r].iter().map(|x| x / g[r]).sum())
        .collect();
    let tail_sums = (0..sizes.len())
        .map(|r| g[r..].iter().map(|x| g[r] / x).sum())
        .collect();
    let scale = (fit.c1 * c2).powf(p);
    let head_bound = scale / (1.0 - t.powf(p * (1.0 - fit.alpha)));
    let tail_bound = scale / (1.0 - t.powf(p * fit.alpha));
    let b = c2.ceil() as u64;
    let adversarial_sums = (0..sizes.len())
        .map(|r| {
            let top = gamma(cum[r]).powf(p);
            g[r..].iter().map(|x| top / x).sum()
        })
        .collect();
    let adversarial_bound = (b as f64).powf(p) * tail_bound;
    Ok(RegularitySums {
        p,
        fit,
        c2,
        t,
        head_sums,
        tail_sums,
        head_bound,
        tail_bound,
        b,
        adversarial_sums,
        adversarial_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_from_sizes() {
        let p = OrderedPartition::from_sizes(vec![1, 2, 3]).unwrap();
        assert_eq!(p.cumulative_sums(), &[1, 3, 6]);
        assert_eq!(p.block(1).unwrap(), (1, 1));
        assert_eq!(p.block(2).unwrap(), (2, 3));
        assert_eq!(p.block(3).unwrap(), (4, 6));
        let q = OrderedPartition::from_sizes(vec![2, 2]).unwrap();
        assert_eq!(q.block(2).unwrap(), (3, 4));
        assert_eq!(OrderedPartition::from_sizes(vec![1]).unwrap().dim(), 1);
        assert!(OrderedPartition::from_sizes(vec![]).is_err());
        assert!(OrderedPartition::from_sizes(vec![1, 0]).is_err());
    }

    #[test]
    fn right_inverse_examples() {
        let p = OrderedPartition::from_sizes(vec![1, 4, 20]).unwrap();
        assert_eq!(p.right_inverse(3).unwrap(), 2);
        assert_eq!(p.right_inverse(1).unwrap(), 1);
        assert_eq!(p.right_inverse(5).unwrap(), 2);
        assert_eq!(p.right_inverse(6).unwrap(), 3);
        assert!(p.right_inverse(0).is_err());
        assert!(p.right_inverse(26).is_err());
    }

    #[test]
    fn concave_affine_partition() {
        let spec = ConcaveSpec::new(ConcaveFamily::Affine { a: 1.0, b: 1.0 }, 5.0).unwrap();
        assert!((spec.growth_constant() - 5f64.sqrt()).abs() < 1e-15);
        let p = partition_from_concave(&spec, 4).unwrap();
        assert_eq!(p.cumulative_sums(), &[1, 5, 25, 125]);
        assert!(ConcaveSpec::new(ConcaveFamily::Affine { a: 1.0, b: 1.0 }, 4.0).is_err());
        assert!(partition_from_concave(&spec, 1).is_err());
    }

    #[test]
    fn concave_spec_rejects_bad_families() {
        assert!(ConcaveSpec::new(ConcaveFamily::Power { alpha: 1.5 }, 5.0).is_err());
        assert!(ConcaveSpec::new(ConcaveFamily::Affine { a: 0.5, b: 1.0 }, 5.0).is_err());
        // ψ(2) = e − 1, so b must exceed roughly 2.24
        assert!(ConcaveSpec::new(ConcaveFamily::Log, 2.2).is_err());
        assert!(ConcaveSpec::new(ConcaveFamily::Log, 3.0).is_ok());
    }

    #[test]
    fn averaging_examples() {
        let p = OrderedPartition::from_sizes(vec![2]).unwrap();
        let (pf, qf) = p.averaging_projection(&[1.0, 3.0]).unwrap();
        assert_eq!(pf, vec![2.0, 2.0]);
        assert_eq!(qf, vec![-1.0, 1.0]);
        let p = OrderedPartition::from_sizes(vec![1, 2]).unwrap();
        let (pf, qf) = p.averaging_projection(&[0.3, 0.1, 0.1]).unwrap();
        assert_eq!(pf, vec![0.3, 0.1, 0.1]);
        assert_eq!(qf, vec![0.0; 3]);
        let (pf, qf) = p.averaging_projection(&[0.0, 1.0, -1.0]).unwrap();
        assert_eq!(pf, vec![0.0; 3]);
        assert_eq!(qf, vec![0.0, 1.0, -1.0]);
        assert!(p.averaging_projection(&[0.0; 4]).is_err());
    }

    fn small_space() -> DkkSpace {
        let s = SpaceSpec::lp(2.0, 3).unwrap();
        let x = BasisRep::unit_vectors(SpaceSpec::lp(1.0, 2).unwrap());
        DkkSpace::new(s, x, OrderedPartition::from_sizes(vec![1, 2]).unwrap()).unwrap()
    }

    #[test]
    fn v_dual_examples() {
        let s = SpaceSpec::lp(2.0, 4).unwrap();
        let x = BasisRep::unit_vectors(SpaceSpec::lp(1.0, 1).unwrap());
        let d = DkkSpace::new(s, x, OrderedPartition::from_sizes(vec![4]).unwrap()).unwrap();
        assert_eq!(d.v_dual_coeffs(&[1.0; 4]).unwrap(), vec![2.0]);
        assert_eq!(d.v_dual_coeffs(&[1.0, -1.0, 2.0, -2.0]).unwrap(), vec![0.0]);
        let d = small_space();
        let v = d.v_dual_coeffs(&[0.0, 1.0, 1.0]).unwrap();
        assert_eq!(v, vec![0.0, 2f64.sqrt()]);
    }

    #[test]
    fn dkk_norm_matches_hand_evaluation() {
        // oracle: step-by-step evaluation of the definition, written out by hand
        let oracle = |f: [f64; 3]| {
            let mean = (f[1] + f[2]) / 2.0;
            let q = [0.0, f[1] - mean, f[2] - mean];
            let q_norm = (q[1] * q[1] + q[2] * q[2]).sqrt();
            let v1 = f[0];
            let v2 = (f[1] + f[2]) / (2.0 / 2f64.sqrt());
            q_norm + v1.abs() + v2.abs()
        };
        let d = small_space();
        for f in [[0.0, 1.0, 1.0], [0.0, 1.0, -1.0], [1.0, 0.0, 0.0], [0.5, 2.0, -0.25]] {
            let got = d.dkk_norm(&f).unwrap();
            assert!((got - oracle(f)).abs() < 1e-12, "{f:?}: {got}");
        }
        assert!((d.dkk_norm(&[0.0, 1.0, 1.0]).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((d.dkk_norm(&[0.0, 1.0, -1.0]).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(d.dkk_norm(&[1.0]).unwrap(), 1.0);
    }

    #[test]
    fn dkk_rejects_bad_components() {
        let part = OrderedPartition::from_sizes(vec![1, 2]).unwrap();
        let x = BasisRep::difference(0.5, 2).unwrap();
        let half = SpaceSpec::lp(0.5, 3).unwrap();
        assert!(matches!(
            DkkSpace::new(half, x.clone(), part.clone()),
            Err(Error::InvalidSpace(_))
        ));
        let mixed = SpaceSpec::mixed_z(2.0, 2.0, 1, 3).unwrap();
        assert!(DkkSpace::new(mixed, x, part.clone()).is_err());
        let short = BasisRep::difference(0.5, 1).unwrap();
        assert!(DkkSpace::new(SpaceSpec::lp(2.0, 3).unwrap(), short, part).is_err());
    }

    #[test]
    fn lifted_vectors_carry_x_norms() {
        let d = DkkSpace::default_instance(3).unwrap();
        let b = [1.0, 0.0, 1.0];
        let f = d.lift(&b).unwrap();
        let (q, h) = d.norm_parts(&f).unwrap();
        assert!(q.abs() < 1e-12);
        assert!((h - d.x().norm(&b).unwrap()).abs() < 1e-12);
        assert_eq!(d.v_vector(2).unwrap()[1], 1.0 / 2f64.sqrt());
    }

    #[test]
    fn dump_lists_every_block() {
        let d = DkkSpace::default_instance(4).unwrap();
        let text = d.dump();
        assert_eq!(text.lines().count(), 5);
        assert!(text.contains("[8,15]"));
    }

    #[test]
    fn growth_fit_of_square_root() {
        let g = |m: u64| (m as f64).sqrt();
        let xs: Vec<u64> = (1..=1000).collect();
        let fit = fit_growth(&g, &xs).unwrap();
        assert!((fit.alpha - 0.5).abs() < 1e-9);
        assert!(fit.c1 < 1.0 + 1e-9);
    }

    #[test]
    fn regularity_sums_square_root_dyadic() {
        let g = |m: u64| (m as f64).sqrt();
        let sizes: Vec<u64> = (1..=30).map(|n| 1u64 << n).collect();
        let r = regularity_sums(&g, &sizes, 0.5).unwrap();
        assert!(r.within_bounds());
        assert!((r.head_bound - r.tail_bound).abs() < 1e-6 * r.tail_bound);
        assert_eq!(r.b, 2);
    }
}
