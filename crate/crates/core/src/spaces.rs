//! Finite truncations of the sequence spaces used by the constructions:
//! `ℓ_p`, Lorentz `d_q(w)`, weak Lorentz `d_∞(w)`, the matrix spaces
//! `ℓ_q(ℓ_p)`, the mixed-norm spaces `(⊕ ℓ_p^{d_n})_q` and the direct sum
//! `ℓ_p ⊕ ℓ_q`.
//!
//! Every evaluator works on real coefficient vectors. Vectors shorter than
//! the truncation dimension are treated as zero-padded; longer vectors are
//! rejected.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative slack used by the regularity checks when comparing sequence terms.
const REGULARITY_RTOL: f64 = 1e-12;

/// An exponent in `(0, ∞]`. The value `∞` stands for the `c_0` convention.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value <= 0.0 {
            return Err(Error::InvalidExponent(value));
        }
        Ok(Exponent(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let value = match Raw::deserialize(deserializer)? {
            Raw::Num(v) => v,
            Raw::Text(s) => match s.to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "c0" => f64::INFINITY,
                other => {
                    return Err(serde::de::Error::custom(format!(
                        "unrecognised exponent {other:?}"
                    )))
                }
            },
        };
        Exponent::new(value).map_err(serde::de::Error::custom)
    }
}

/// `(Σ |a_j|^p)^{1/p}`, or `max |a_j|` when `p = ∞`.
///
/// Magnitudes are summed in sorted order, so the result is exactly invariant
/// under permutations and sign changes of the input.
pub fn lp_norm(coeffs: &[f64], p: Exponent) -> f64 {
    if p.is_infinite() {
        return coeffs.iter().fold(0.0, |acc, x| acc.max(x.abs()));
    }
    let mut mags: Vec<f64> = coeffs.iter().map(|x| x.abs()).filter(|x| *x > 0.0).collect();
    if mags.is_empty() {
        return 0.0;
    }
    mags.sort_unstable_by(f64::total_cmp);
    let p = p.0;
    if p == 1.0 {
        mags.iter().sum()
    } else if p == 2.0 {
        mags.iter().map(|x| x * x).sum::<f64>().sqrt()
    } else if p == 0.5 {
        let s: f64 = mags.iter().map(|x| x.sqrt()).sum();
        s * s
    } else {
        let top = mags[mags.len() - 1];
        let s: f64 = mags.iter().map(|x| (x / top).powf(p)).sum();
        top * s.powf(1.0 / p)
    }
}

/// Aggregate already-computed block norms in the `ℓ_q` sense.
fn outer_norm(block_norms: &[f64], q: Exponent) -> f64 {
    lp_norm(block_norms, q)
}

/// A weight `(w_n)`: nonnegative with `w_1 > 0`, together with its primitive
/// sums `s_n = w_1 + … + w_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    w: Vec<f64>,
    s: Vec<f64>,
}

impl Weight {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidWeight("weight must be nonempty".into()));
        }
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidWeight("entries must be finite and nonnegative".into()));
        }
        if w[0] <= 0.0 {
            return Err(Error::InvalidWeight("w_1 must be positive".into()));
        }
        let mut s = Vec::with_capacity(w.len());
        let mut acc = 0.0;
        for x in &w {
            acc += x;
            s.push(acc);
        }
        Ok(Weight { w, s })
    }

    /// Build the weight whose primitive sequence is `s`.
    pub fn from_primitive(s: Vec<f64>) -> Result<Self> {
        if s.is_empty() || !(s[0] > 0.0) {
            return Err(Error::InvalidWeight("primitive must start with s_1 > 0".into()));
        }
        if s.windows(2).any(|p| !(p[1] >= p[0])) || s.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidWeight("primitive must be finite and nondecreasing".into()));
        }
        let mut w = Vec::with_capacity(s.len());
        w.push(s[0]);
        w.extend(s.windows(2).map(|p| p[1] - p[0]));
        Ok(Weight { w, s })
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn primitives(&self) -> &[f64] {
        &self.s
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Nonincreasing weights have a concave primitive sequence.
    pub fn is_nonincreasing(&self) -> bool {
        self.w.windows(2).all(|p| p[1] <= p[0])
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.w.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let w = Vec::<f64>::deserialize(deserializer)?;
        Weight::new(w).map_err(serde::de::Error::custom)
    }
}

/// Non-increasing rearrangement of `|f|`, zeros dropped.
fn decreasing_magnitudes(f: &[f64]) -> Vec<f64> {
    let mut mags: Vec<f64> = f.iter().map(|x| x.abs()).filter(|x| *x > 0.0).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    mags
}

fn lorentz_norm(f: &[f64], q: Exponent, weight: &Weight) -> f64 {
    if q.is_infinite() {
        return weak_lorentz_norm(f, weight);
    }
    let star = decreasing_magnitudes(f);
    if q.0 == 1.0 {
        // (s_n a_n)^1 w_n / s_n collapses to a_n w_n
        return star.iter().zip(&weight.w).rev().map(|(a, w)| a * w).sum();
    }
    let q = q.0;
    let total: f64 = star
        .iter()
        .zip(weight.w.iter().zip(&weight.s))
        .rev()
        .map(|(a, (w, s))| (s * a).powf(q) * w / s)
        .sum();
    total.powf(1.0 / q)
}

fn weak_lorentz_norm(f: &[f64], weight: &Weight) -> f64 {
    decreasing_magnitudes(f)
        .iter()
        .zip(&weight.s)
        .fold(0.0, |acc, (a, s)| acc.max(a * s))
}

/// The family a truncated space belongs to.
#[derive(Clone, Debug, PartialEq)]
pub enum SpaceKind {
    Lp { p: Exponent },
    Lorentz { q: Exponent, weight: Weight },
    WeakLorentz { weight: Weight },
    /// `ℓ_q(ℓ_p)`: consecutive inner blocks of fixed length.
    MixedZ { p: Exponent, q: Exponent, inner: usize },
    /// `(⊕ ℓ_p^{d_n})_q` with block sizes `d_n`.
    MixedB { p: Exponent, q: Exponent, blocks: Vec<usize> },
    /// `ℓ_p ⊕ ℓ_q` with interleaved coordinates: odd positions carry the
    /// `ℓ_p` component, even positions the `ℓ_q` component. The quasi-norm is
    /// the sum of the two component quasi-norms.
    DirectSumD { p: Exponent, q: Exponent },
}

/// A finite-truncation sequence-space descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct SpaceSpec {
    kind: SpaceKind,
    dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SpaceRepr {
    Lp {
        p: Exponent,
        dim: usize,
    },
    Lorentz {
        q: Exponent,
        weights: Vec<f64>,
        dim: usize,
    },
    WeakLorentz {
        weights: Vec<f64>,
        dim: usize,
    },
    MixedZ {
        p: Exponent,
        q: Exponent,
        inner: usize,
        dim: usize,
    },
    MixedB {
        p: Exponent,
        q: Exponent,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        blocks: Option<Vec<usize>>,
        dim: usize,
    },
    DirectSumD {
        p: Exponent,
        q: Exponent,
        dim: usize,
    },
}

impl TryFrom<SpaceRepr> for SpaceSpec {
    type Error = Error;

    fn try_from(repr: SpaceRepr) -> Result<Self> {
        match repr {
            SpaceRepr::Lp { p, dim } => SpaceSpec::new(SpaceKind::Lp { p }, dim),
            SpaceRepr::Lorentz { q, weights, dim } => SpaceSpec::new(
                SpaceKind::Lorentz {
                    q,
                    weight: Weight::new(weights)?,
                },
                dim,
            ),
            SpaceRepr::WeakLorentz { weights, dim } => SpaceSpec::new(
                SpaceKind::WeakLorentz {
                    weight: Weight::new(weights)?,
                },
                dim,
            ),
            SpaceRepr::MixedZ { p, q, inner, dim } => {
                SpaceSpec::new(SpaceKind::MixedZ { p, q, inner }, dim)
            }
            SpaceRepr::MixedB { p, q, blocks, dim } => {
                let blocks = blocks.unwrap_or_else(|| dyadic_blocks(dim));
                SpaceSpec::new(SpaceKind::MixedB { p, q, blocks }, dim)
            }
            SpaceRepr::DirectSumD { p, q, dim } => {
                SpaceSpec::new(SpaceKind::DirectSumD { p, q }, dim)
            }
        }
    }
}

impl From<SpaceSpec> for SpaceRepr {
    fn from(spec: SpaceSpec) -> Self {
        let dim = spec.dim;
        match spec.kind {
            SpaceKind::Lp { p } => SpaceRepr::Lp { p, dim },
            SpaceKind::Lorentz { q, weight } => SpaceRepr::Lorentz {
                q,
                weights: weight.w,
                dim,
            },
            SpaceKind::WeakLorentz { weight } => SpaceRepr::WeakLorentz {
                weights: weight.w,
                dim,
            },
            SpaceKind::MixedZ { p, q, inner } => SpaceRepr::MixedZ { p, q, inner, dim },
            SpaceKind::MixedB { p, q, blocks } => SpaceRepr::MixedB {
                p,
                q,
                blocks: Some(blocks),
                dim,
            },
            SpaceKind::DirectSumD { p, q } => SpaceRepr::DirectSumD { p, q, dim },
        }
    }
}

/// Block sizes `2, 4, 8, …` until they cover `dim` coordinates.
pub fn dyadic_blocks(dim: usize) -> Vec<usize> {
    let mut blocks = Vec::new();
    let mut covered = 0usize;
    let mut size = 2usize;
    while covered < dim {
        blocks.push(size);
        covered += size;
        size = size.saturating_mul(2);
    }
    if blocks.is_empty() {
        blocks.push(2);
    }
    blocks
}

impl SpaceSpec {
    pub fn new(kind: SpaceKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpace("dimension must be at least 1".into()));
        }
        match &kind {
            SpaceKind::Lp { .. } | SpaceKind::DirectSumD { .. } => {}
            SpaceKind::Lorentz { weight, .. } | SpaceKind::WeakLorentz { weight } => {
                if weight.len() < dim {
                    return Err(Error::InvalidWeight(format!(
                        "weight has {} terms, dimension is {dim}",
                        weight.len()
                    )));
                }
            }
            SpaceKind::MixedZ { inner, .. } => {
                if *inner == 0 {
                    return Err(Error::InvalidSpace("inner block length must be positive".into()));
                }
            }
            SpaceKind::MixedB { blocks, .. } => {
                if blocks.contains(&0) {
                    return Err(Error::InvalidSpace("block sizes must be positive".into()));
                }
                if blocks.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::InvalidSpace("block sizes must be nondecreasing".into()));
                }
                let total: usize = blocks.iter().sum();
                if total < dim {
                    return Err(Error::InvalidSpace(format!(
                        "blocks cover {total} coordinates, dimension is {dim}"
                    )));
                }
            }
        }
        Ok(SpaceSpec { kind, dim })
    }

    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        SpaceSpec::new(SpaceKind::Lp { p: Exponent::new(p)? }, dim)
    }

    pub fn lorentz(q: f64, weights: Vec<f64>, dim: usize) -> Result<Self> {
        SpaceSpec::new(
            SpaceKind::Lorentz {
                q: Exponent::new(q)?,
                weight: Weight::new(weights)?,
            },
            dim,
        )
    }

    pub fn weak_lorentz(weights: Vec<f64>, dim: usize) -> Result<Self> {
        SpaceSpec::new(
            SpaceKind::WeakLorentz {
                weight: Weight::new(weights)?,
            },
            dim,
        )
    }

    pub fn mixed_z(p: f64, q: f64, inner: usize, dim: usize) -> Result<Self> {
        SpaceSpec::new(
            SpaceKind::MixedZ {
                p: Exponent::new(p)?,
                q: Exponent::new(q)?,
                inner,
            },
            dim,
        )
    }

    /// `blocks = None` selects the dyadic sizes `d_n = 2^n`.
    pub fn mixed_b(p: f64, q: f64, blocks: Option<Vec<usize>>, dim: usize) -> Result<Self> {
        SpaceSpec::new(
            SpaceKind::MixedB {
                p: Exponent::new(p)?,
                q: Exponent::new(q)?,
                blocks: blocks.unwrap_or_else(|| dyadic_blocks(dim)),
            },
            dim,
        )
    }

    pub fn direct_sum_d(p: f64, q: f64, dim: usize) -> Result<Self> {
        SpaceSpec::new(
            SpaceKind::DirectSumD {
                p: Exponent::new(p)?,
                q: Exponent::new(q)?,
            },
            dim,
        )
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Same space family truncated at another dimension.
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        let kind = match &self.kind {
            SpaceKind::MixedB { p, q, blocks } => {
                let total: usize = blocks.iter().sum();
                let blocks = if total >= dim {
                    blocks.clone()
                } else {
                    dyadic_blocks(dim)
                };
                SpaceKind::MixedB {
                    p: *p,
                    q: *q,
                    blocks,
                }
            }
            other => other.clone(),
        };
        SpaceSpec::new(kind, dim)
    }

    /// Quasi-norm of `f` in the truncation.
    pub fn norm(&self, f: &[f64]) -> Result<f64> {
        check_vector(f, self.dim)?;
        Ok(self.norm_unchecked(f))
    }

    /// Quasi-norm without length or finiteness validation.
    pub(crate) fn norm_unchecked(&self, f: &[f64]) -> f64 {
        match &self.kind {
            SpaceKind::Lp { p } => lp_norm(f, *p),
            SpaceKind::Lorentz { q, weight } => lorentz_norm(f, *q, weight),
            SpaceKind::WeakLorentz { weight } => weak_lorentz_norm(f, weight),
            SpaceKind::MixedZ { p, q, inner } => {
                let inner_norms: Vec<f64> = f.chunks(*inner).map(|c| lp_norm(c, *p)).collect();
                outer_norm(&inner_norms, *q)
            }
            SpaceKind::MixedB { p, q, blocks } => {
                let mut inner_norms = Vec::with_capacity(blocks.len());
                let mut start = 0usize;
                for d in blocks {
                    if start >= f.len() {
                        break;
                    }
                    let end = (start + d).min(f.len());
                    inner_norms.push(lp_norm(&f[start..end], *p));
                    start = end;
                }
                outer_norm(&inner_norms, *q)
            }
            SpaceKind::DirectSumD { p, q } => {
                let odd: Vec<f64> = f.iter().step_by(2).copied().collect();
                let even: Vec<f64> = f.iter().skip(1).step_by(2).copied().collect();
                lp_norm(&odd, *p) + lp_norm(&even, *q)
            }
        }
    }

    /// Short human-readable description.
    pub fn label(&self) -> String {
        let e = |x: &Exponent| {
            if x.is_infinite() {
                "inf".to_string()
            } else {
                format!("{}", x.value())
            }
        };
        let body = match &self.kind {
            SpaceKind::Lp { p } => format!("lp(p={})", e(p)),
            SpaceKind::Lorentz { q, .. } => format!("lorentz(q={})", e(q)),
            SpaceKind::WeakLorentz { .. } => "weak_lorentz".to_string(),
            SpaceKind::MixedZ { p, q, inner } => format!("mixed_z(p={}, q={}, inner={inner})", e(p), e(q)),
            SpaceKind::MixedB { p, q, .. } => format!("mixed_b(p={}, q={})", e(p), e(q)),
            SpaceKind::DirectSumD { p, q } => format!("direct_sum_d(p={}, q={})", e(p), e(q)),
        };
        format!("{body}[dim={}]", self.dim)
    }

    /// Symmetric (rearrangement-invariant) families.
    pub fn is_rearrangement_invariant(&self) -> bool {
        matches!(
            self.kind,
            SpaceKind::Lp { .. } | SpaceKind::Lorentz { .. } | SpaceKind::WeakLorentz { .. }
        )
    }

    /// Whether the quasi-norm is a norm (so averaging projections are bounded).
    pub fn is_locally_convex(&self) -> bool {
        match &self.kind {
            SpaceKind::Lp { p } => p.0 >= 1.0,
            SpaceKind::Lorentz { q, weight } => q.0 >= 1.0 && !q.is_infinite() && weight.is_nonincreasing(),
            SpaceKind::WeakLorentz { .. } => false,
            SpaceKind::MixedZ { p, q, .. }
            | SpaceKind::MixedB { p, q, .. }
            | SpaceKind::DirectSumD { p, q } => p.0 >= 1.0 && q.0 >= 1.0,
        }
    }

    /// The exponent `r ≤ 1` for which the quasi-norm is an `r`-norm, when one
    /// is known in closed form.
    pub fn banach_exponent(&self) -> Option<f64> {
        match &self.kind {
            SpaceKind::Lp { p } => Some(p.0.min(1.0)),
            SpaceKind::MixedZ { p, q, .. } | SpaceKind::MixedB { p, q, .. } => {
                Some(p.0.min(q.0).min(1.0))
            }
            SpaceKind::DirectSumD { p, q } => Some(p.0.min(q.0).min(1.0)),
            SpaceKind::Lorentz { .. } if self.is_locally_convex() => Some(1.0),
            _ => None,
        }
    }

    /// `(Λ_m, Λ*_m)`: the norm of an `m`-term signed indicator and `m/Λ_m`.
    ///
    /// The value is cross-checked on several index sets and sign patterns.
    pub fn lambda_pair(&self, m: usize) -> Result<(f64, f64)> {
        if !self.is_rearrangement_invariant() {
            return Err(Error::NotSymmetric(format!("{:?}", self.kind)));
        }
        if m == 0 || m > self.dim {
            return Err(Error::InvalidArgument(format!(
                "m = {m} must lie in 1..={}",
                self.dim
            )));
        }
        let mut head = vec![0.0; self.dim];
        head[..m].iter_mut().for_each(|x| *x = 1.0);
        let lambda = self.norm_unchecked(&head);

        let mut tail = vec![0.0; self.dim];
        for (k, x) in tail[self.dim - m..].iter_mut().enumerate() {
            *x = if k % 2 == 0 { 1.0 } else { -1.0 };
        }
        let mut probes = vec![tail];
        if 2 * m - 1 <= self.dim {
            let mut spread = vec![0.0; self.dim];
            for k in 0..m {
                spread[2 * k] = if k % 3 == 1 { -1.0 } else { 1.0 };
            }
            probes.push(spread);
        }
        for probe in &probes {
            let other = self.norm_unchecked(probe);
            if (other - lambda).abs() > 1e-12 * lambda.max(1.0) {
                return Err(Error::NotSymmetric(format!(
                    "indicator norms differ: {lambda} vs {other}"
                )));
            }
        }
        Ok((lambda, m as f64 / lambda))
    }
}

pub(crate) fn check_vector(f: &[f64], dim: usize) -> Result<()> {
    if f.len() > dim {
        return Err(Error::DimensionMismatch { len: f.len(), dim });
    }
    if f.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("vector entries must be finite".into()));
    }
    Ok(())
}

/// Which regularity property to test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegularityKind {
    /// `2Γ_m ≤ Γ_{bm}`.
    Lower,
    /// `2Γ_{bm} ≤ bΓ_m`.
    Upper,
    /// `Γ_{2m} ≤ C·Γ_m`.
    Doubling { constant: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityOutcome {
    pub passed: bool,
    pub first_violation: Option<usize>,
}

/// Check a regularity property of `Γ = (Γ_1, Γ_2, …)` for `1 ≤ m ≤ m_max`.
///
/// `gamma[0]` holds `Γ_1`. For the doubling check `b` is ignored.
pub fn regularity_check(
    gamma: &[f64],
    kind: RegularityKind,
    b: usize,
    m_max: usize,
) -> Result<RegularityOutcome> {
    let stretch = match kind {
        RegularityKind::Doubling { .. } => 2,
        _ => {
            if b == 0 {
                return Err(Error::InvalidArgument("b must be positive".into()));
            }
            b
        }
    };
    let need = stretch
        .checked_mul(m_max)
        .ok_or_else(|| Error::InvalidArgument("b·m_max overflows".into()))?;
    if gamma.len() < need {
        return Err(Error::InsufficientLength {
            need,
            have: gamma.len(),
        });
    }
    let at = |m: usize| gamma[m - 1];
    let leq = |lhs: f64, rhs: f64| lhs <= rhs + REGULARITY_RTOL * rhs.abs().max(lhs.abs());
    for m in 1..=m_max {
        let ok = match kind {
            RegularityKind::Lower => leq(2.0 * at(m), at(b * m)),
            RegularityKind::Upper => leq(2.0 * at(b * m), b as f64 * at(m)),
            RegularityKind::Doubling { constant } => leq(at(2 * m), constant * at(m)),
        };
        if !ok {
            return Ok(RegularityOutcome {
                passed: false,
                first_violation: Some(m),
            });
        }
    }
    Ok(RegularityOutcome {
        passed: true,
        first_violation: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * b.abs().max(1.0)
    }

    #[test]
    fn lp_half_of_two_ones() {
        let s = SpaceSpec::lp(0.5, 2).unwrap();
        assert_eq!(s.norm(&[1.0, 1.0]).unwrap(), 4.0);
    }

    #[test]
    fn mixed_z_blocks() {
        let s = SpaceSpec::mixed_z(1.0, 2.0, 2, 4).unwrap();
        assert!(close(s.norm(&[1.0, 1.0, 0.0, 1.0]).unwrap(), 5f64.sqrt()));
    }

    #[test]
    fn lorentz_q1_is_weighted_sum() {
        let s = SpaceSpec::lorentz(1.0, vec![1.0, 0.5, 0.25], 3).unwrap();
        assert_eq!(s.norm(&[2.0, 1.0, 0.0]).unwrap(), 2.5);
        // order and signs do not matter
        assert_eq!(s.norm(&[0.0, -1.0, 2.0]).unwrap(), 2.5);
    }

    #[test]
    fn weak_lorentz_harmonic() {
        let s = SpaceSpec::weak_lorentz(vec![1.0, 1.0, 1.0], 3).unwrap();
        assert!(close(s.norm(&[1.0, 0.5, 1.0 / 3.0]).unwrap(), 1.0));
    }

    #[test]
    fn lorentz_general_q_matches_formula() {
        let w = vec![1.0, 0.5, 0.25];
        let s = SpaceSpec::lorentz(2.0, w.clone(), 3).unwrap();
        let star = [3.0f64, 2.0, 1.0];
        let prim = [1.0, 1.5, 1.75];
        let expected: f64 = (0..3)
            .map(|n| (prim[n] * star[n]).powi(2) * w[n] / prim[n])
            .sum::<f64>()
            .sqrt();
        assert!(close(s.norm(&[1.0, -3.0, 2.0]).unwrap(), expected));
    }

    #[test]
    fn mixed_b_default_blocks_are_dyadic() {
        let s = SpaceSpec::mixed_b(1.0, 2.0, None, 6).unwrap();
        match s.kind() {
            SpaceKind::MixedB { blocks, .. } => assert_eq!(blocks, &vec![2, 4]),
            _ => unreachable!(),
        }
        // blocks (1,1) and (1,1,0,0): inner ℓ_1 norms (2,2), outer ℓ_2
        assert!(close(s.norm(&[1.0, 1.0, 1.0, 1.0]).unwrap(), 8f64.sqrt()));
    }

    #[test]
    fn direct_sum_adds_components() {
        let s = SpaceSpec::direct_sum_d(1.0, 2.0, 4).unwrap();
        assert!(close(s.norm(&[1.0, 1.0, 1.0, 1.0]).unwrap(), 2.0 + 2f64.sqrt()));
    }

    #[test]
    fn c0_is_sup() {
        let s = SpaceSpec::new(SpaceKind::Lp { p: Exponent::INFINITY }, 3).unwrap();
        assert_eq!(s.norm(&[0.5, -2.0, 1.0]).unwrap(), 2.0);
    }

    #[test]
    fn zero_padding_and_overflow() {
        let s = SpaceSpec::lp(2.0, 3).unwrap();
        assert_eq!(s.norm(&[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(
            s.norm(&[1.0; 4]),
            Err(Error::DimensionMismatch { len: 4, dim: 3 })
        );
        assert!(s.norm(&[f64::NAN]).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(SpaceSpec::lp(0.0, 2), Err(Error::InvalidExponent(_))));
        assert!(matches!(SpaceSpec::lp(-1.0, 2), Err(Error::InvalidExponent(_))));
        assert!(matches!(
            SpaceSpec::lorentz(1.0, vec![0.0, 1.0], 2),
            Err(Error::InvalidWeight(_))
        ));
        assert!(matches!(
            SpaceSpec::lorentz(1.0, vec![1.0], 2),
            Err(Error::InvalidWeight(_))
        ));
        assert!(SpaceSpec::lp(1.0, 0).is_err());
        assert!(SpaceSpec::mixed_b(1.0, 1.0, Some(vec![2, 1]), 3).is_err());
        assert!(SpaceSpec::mixed_b(1.0, 1.0, Some(vec![1, 1]), 3).is_err());
    }

    #[test]
    fn lambda_pairs() {
        let l2 = SpaceSpec::lp(2.0, 8).unwrap();
        let (l, d) = l2.lambda_pair(4).unwrap();
        assert!(close(l, 2.0) && close(d, 2.0));

        let lor = SpaceSpec::lorentz(1.0, vec![1.0, 0.5, 0.25], 3).unwrap();
        let (l, d) = lor.lambda_pair(2).unwrap();
        assert_eq!(l, 1.5);
        assert!(close(d, 4.0 / 3.0));

        let c0 = SpaceSpec::new(SpaceKind::Lp { p: Exponent::INFINITY }, 9).unwrap();
        assert_eq!(c0.lambda_pair(7).unwrap(), (1.0, 7.0));
    }

    #[test]
    fn lambda_pair_rejects_mixed_spaces() {
        let z = SpaceSpec::mixed_z(1.0, 2.0, 2, 4).unwrap();
        assert!(matches!(z.lambda_pair(2), Err(Error::NotSymmetric(_))));
        let d = SpaceSpec::direct_sum_d(0.5, 2.0, 4).unwrap();
        assert!(matches!(d.lambda_pair(1), Err(Error::NotSymmetric(_))));
        let l = SpaceSpec::lp(1.0, 3).unwrap();
        assert!(l.lambda_pair(0).is_err());
        assert!(l.lambda_pair(4).is_err());
    }

    #[test]
    fn regularity_examples() {
        let sqrt: Vec<f64> = (1..=400).map(|m| (m as f64).sqrt()).collect();
        let out = regularity_check(&sqrt, RegularityKind::Lower, 4, 100).unwrap();
        assert!(out.passed);

        let linear: Vec<f64> = (1..=400).map(|m| m as f64).collect();
        let out = regularity_check(&linear, RegularityKind::Upper, 4, 100).unwrap();
        assert_eq!(out.first_violation, Some(1));

        let log: Vec<f64> = (1..=16 * 64).map(|m| 1.0 + (m as f64).log2()).collect();
        let out = regularity_check(&log, RegularityKind::Lower, 16, 64).unwrap();
        assert!(!out.passed);
        // 2(1 + log m) ≤ 5 + log m  fails once log m > 3
        assert_eq!(out.first_violation, Some(9));

        let out = regularity_check(&linear, RegularityKind::Doubling { constant: 2.0 }, 0, 200).unwrap();
        assert!(out.passed);
    }

    #[test]
    fn regularity_needs_enough_terms() {
        let g = vec![1.0; 10];
        assert_eq!(
            regularity_check(&g, RegularityKind::Lower, 4, 3),
            Err(Error::InsufficientLength { need: 12, have: 10 })
        );
    }

    #[test]
    fn json_round_trip_and_infinity() {
        let s: SpaceSpec = serde_json::from_str(r#"{"kind":"lp","p":"inf","dim":3}"#).unwrap();
        assert!(matches!(s.kind(), SpaceKind::Lp { p } if p.is_infinite()));
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"kind":"lp","p":"inf","dim":3}"#);

        let b: SpaceSpec =
            serde_json::from_str(r#"{"kind":"mixed_b","p":0.5,"q":2,"dim":5}"#).unwrap();
        let back: SpaceSpec = serde_json::from_str(&serde_json::to_string(&b).unwrap()).unwrap();
        assert_eq!(b, back);

        assert!(serde_json::from_str::<SpaceSpec>(r#"{"kind":"lp","p":1,"dim":3,"x":1}"#).is_err());
        assert!(serde_json::from_str::<SpaceSpec>(r#"{"kind":"lp","p":-1,"dim":3}"#).is_err());
    }
}
