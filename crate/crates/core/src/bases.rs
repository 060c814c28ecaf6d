//! Schauder bases as synthesis/analysis pairs over an ambient quasi-norm.
//!
//! Every basis here is square: its ambient coordinate space has the same
//! dimension as its coefficient space, and analysis is the exact inverse of
//! synthesis.

use serde::{Deserialize, Serialize};

use crate::dkk::DkkSpace;
use crate::error::{Error, Result};
use crate::spaces::{check_vector, lp_norm, Exponent, SpaceSpec};

/// A quasi-norm on coefficient vectors of a fixed dimension.
pub trait CoeffNorm: Sync {
    fn dim(&self) -> usize;

    /// Quasi-norm of the vector whose basis coefficients are `a`.
    /// `a` may be shorter than `dim`; longer input is a caller bug.
    fn coeff_norm(&self, a: &[f64]) -> f64;

    fn label(&self) -> String;
}

impl CoeffNorm for SpaceSpec {
    fn dim(&self) -> usize {
        SpaceSpec::dim(self)
    }

    fn coeff_norm(&self, a: &[f64]) -> f64 {
        self.norm_unchecked(a)
    }

    fn label(&self) -> String {
        SpaceSpec::label(self)
    }
}

/// A sorted set of 1-based indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct IndexSet(Vec<usize>);

impl TryFrom<Vec<usize>> for IndexSet {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        if v.first() == Some(&0) {
            return Err(Error::InvalidArgument("indices are 1-based".into()));
        }
        if v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "index set must be strictly increasing".into(),
            ));
        }
        Ok(IndexSet(v))
    }
}

impl From<IndexSet> for Vec<usize> {
    fn from(s: IndexSet) -> Self {
        s.0
    }
}

impl IndexSet {
    pub fn empty() -> Self {
        IndexSet(Vec::new())
    }

    /// Build from any collection of indices, sorting and deduplicating.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Result<Self> {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        IndexSet::try_from(v)
    }

    /// `{lo, lo+1, …, hi}`; empty when `hi < lo`.
    pub fn interval(lo: usize, hi: usize) -> Result<Self> {
        if lo == 0 {
            return Err(Error::InvalidArgument("indices are 1-based".into()));
        }
        Ok(IndexSet((lo..=hi).collect()))
    }

    /// Indices whose bits are set in `mask` (bit 0 is index 1).
    pub fn from_mask(mask: u64) -> Self {
        IndexSet((0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.iter().filter(|j| other.contains(*j)).collect())
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.iter().filter(|j| !other.contains(*j)).collect())
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let mut v: Vec<usize> = self.iter().chain(other.iter()).collect();
        v.sort_unstable();
        v.dedup();
        IndexSet(v)
    }
}

/// `S_A a`: zero every coefficient outside `A`.
pub fn coordinate_projection(a: &[f64], set: &IndexSet) -> Result<Vec<f64>> {
    if let Some(max) = set.max() {
        if max > a.len() {
            return Err(Error::IndexOutOfRange {
                index: max,
                dim: a.len(),
            });
        }
    }
    let mut out = vec![0.0; a.len()];
    for j in set.iter() {
        out[j - 1] = a[j - 1];
    }
    Ok(out)
}

/// Projection onto the indices set in `mask` (bit 0 is index 1).
pub(crate) fn project_mask(a: &[f64], mask: u64) -> Vec<f64> {
    a.iter()
        .enumerate()
        .map(|(j, x)| if j < 64 && mask >> j & 1 == 1 { *x } else { 0.0 })
        .collect()
}

/// A basis with its ambient space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BasisRepr", into = "BasisRepr")]
pub enum BasisRep {
    UnitVectors(SpaceSpec),
    /// `d_n = e_n − e_{n−1}` in `ℓ_p`.
    Difference { p: Exponent, dim: usize },
    /// `x_{(n−1)K+k} = L_k(x_{k,n})`; the ambient quasi-norm is the sum of the
    /// component quasi-norms.
    Interleaved(Vec<BasisRep>),
    /// Parts placed one after another; the part norms are aggregated by `outer`.
    Concatenated { parts: Vec<BasisRep>, outer: SpaceSpec },
    /// The unit vector system of a DKK space.
    Dkk(Box<DkkSpace>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum BasisRepr {
    UnitVectors { space: SpaceSpec },
    Difference { p: Exponent, dim: usize },
    Interleaved { parts: Vec<BasisRep> },
    Concatenated { parts: Vec<BasisRep>, outer: SpaceSpec },
    Dkk { space: DkkSpace },
}

impl TryFrom<BasisRepr> for BasisRep {
    type Error = Error;

    fn try_from(r: BasisRepr) -> Result<Self> {
        match r {
            BasisRepr::UnitVectors { space } => Ok(BasisRep::UnitVectors(space)),
            BasisRepr::Difference { p, dim } => BasisRep::difference(p.value(), dim),
            BasisRepr::Interleaved { parts } => BasisRep::interleaved(parts),
            BasisRepr::Concatenated { parts, outer } => BasisRep::concatenated(parts, outer),
            BasisRepr::Dkk { space } => Ok(BasisRep::Dkk(Box::new(space))),
        }
    }
}

impl From<BasisRep> for BasisRepr {
    fn from(b: BasisRep) -> Self {
        match b {
            BasisRep::UnitVectors(space) => BasisRepr::UnitVectors { space },
            BasisRep::Difference { p, dim } => BasisRepr::Difference { p, dim },
            BasisRep::Interleaved(parts) => BasisRepr::Interleaved { parts },
            BasisRep::Concatenated { parts, outer } => BasisRepr::Concatenated { parts, outer },
            BasisRep::Dkk(space) => BasisRepr::Dkk { space: *space },
        }
    }
}

/// Dimension of the `k`-th (0-based) of `parts` interleaved components of a
/// space of dimension `total`.
fn interleaved_part_dim(total: usize, parts: usize, k: usize) -> usize {
    (total - k).div_ceil(parts)
}

impl BasisRep {
    pub fn unit_vectors(space: SpaceSpec) -> Self {
        BasisRep::UnitVectors(space)
    }

    pub fn difference(p: f64, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidBasis("dimension must be at least 1".into()));
        }
        Ok(BasisRep::Difference {
            p: Exponent::new(p)?,
            dim,
        })
    }

    pub fn interleaved(parts: Vec<BasisRep>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidBasis("interleaving needs at least one part".into()));
        }
        let k = parts.len();
        let total: usize = parts.iter().map(BasisRep::dim).sum();
        for (i, part) in parts.iter().enumerate() {
            let want = interleaved_part_dim(total, k, i);
            if part.dim() != want {
                return Err(Error::InvalidBasis(format!(
                    "part {} has dimension {}, interleaving {total} coordinates needs {want}",
                    i + 1,
                    part.dim()
                )));
            }
        }
        let mut hits = vec![0u8; total];
        for (i, part) in parts.iter().enumerate() {
            for n in 0..part.dim() {
                let j = n * k + i;
                if j >= total || hits[j] != 0 {
                    return Err(Error::InvalidBasis("interleaving index map is not a bijection".into()));
                }
                hits[j] = 1;
            }
        }
        if hits.contains(&0) {
            return Err(Error::InvalidBasis("interleaving index map is not onto".into()));
        }
        Ok(BasisRep::Interleaved(parts))
    }

    pub fn concatenated(parts: Vec<BasisRep>, outer: SpaceSpec) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidBasis("concatenation needs at least one part".into()));
        }
        if outer.dim() < parts.len() {
            return Err(Error::InvalidBasis(format!(
                "outer lattice has dimension {}, there are {} parts",
                outer.dim(),
                parts.len()
            )));
        }
        let total: usize = parts.iter().map(BasisRep::dim).sum();
        let mut hits = vec![0u8; total];
        let mut offset = 0;
        for part in &parts {
            for n in 0..part.dim() {
                let j = offset + n;
                if hits[j] != 0 {
                    return Err(Error::InvalidBasis("concatenation index map is not a bijection".into()));
                }
                hits[j] = 1;
            }
            offset += part.dim();
        }
        Ok(BasisRep::Concatenated { parts, outer })
    }

    pub fn dkk(space: DkkSpace) -> Self {
        BasisRep::Dkk(Box::new(space))
    }

    pub fn dim(&self) -> usize {
        match self {
            BasisRep::UnitVectors(s) => s.dim(),
            BasisRep::Difference { dim, .. } => *dim,
            BasisRep::Interleaved(parts) | BasisRep::Concatenated { parts, .. } => {
                parts.iter().map(BasisRep::dim).sum()
            }
            BasisRep::Dkk(space) => space.dim(),
        }
    }

    /// The exponent `p` such that the ambient quasi-norm is a `p`-norm, when
    /// known in closed form.
    pub fn banach_exponent(&self) -> Option<f64> {
        match self {
            BasisRep::UnitVectors(s) => s.banach_exponent(),
            BasisRep::Difference { p, .. } => Some(p.value().min(1.0)),
            BasisRep::Interleaved(parts) => parts
                .iter()
                .map(BasisRep::banach_exponent)
                .try_fold(1.0f64, |acc, e| e.map(|e| acc.min(e))),
            BasisRep::Concatenated { parts, outer } => parts
                .iter()
                .map(BasisRep::banach_exponent)
                .chain(std::iter::once(outer.banach_exponent()))
                .try_fold(1.0f64, |acc, e| e.map(|e| acc.min(e))),
            BasisRep::Dkk(space) => space.banach_exponent(),
        }
    }

    /// Split `a` into per-part coefficient vectors.
    fn split_interleaved(parts: &[BasisRep], a: &[f64]) -> Vec<Vec<f64>> {
        let k = parts.len();
        let mut out: Vec<Vec<f64>> = parts.iter().map(|p| vec![0.0; p.dim()]).collect();
        for (j, x) in a.iter().enumerate() {
            out[j % k][j / k] = *x;
        }
        out
    }

    fn split_concatenated(parts: &[BasisRep], a: &[f64]) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(parts.len());
        let mut offset = 0;
        for part in parts {
            let end = (offset + part.dim()).min(a.len());
            let lo = offset.min(a.len());
            out.push(a[lo..end].to_vec());
            offset += part.dim();
        }
        out
    }

    fn synthesize_unchecked(&self, a: &[f64]) -> Vec<f64> {
        match self {
            BasisRep::UnitVectors(_) | BasisRep::Dkk(_) => {
                let mut f = a.to_vec();
                f.resize(self.dim(), 0.0);
                f
            }
            BasisRep::Difference { dim, .. } => {
                let mut c = vec![0.0; *dim];
                for n in 0..a.len() {
                    let next = a.get(n + 1).copied().unwrap_or(0.0);
                    c[n] = a[n] - next;
                }
                c
            }
            BasisRep::Interleaved(parts) => {
                let k = parts.len();
                let mut f = vec![0.0; self.dim()];
                for (i, (part, coeffs)) in parts.iter().zip(Self::split_interleaved(parts, a)).enumerate() {
                    for (n, x) in part.synthesize_unchecked(&coeffs).into_iter().enumerate() {
                        f[n * k + i] = x;
                    }
                }
                f
            }
            BasisRep::Concatenated { parts, .. } => parts
                .iter()
                .zip(Self::split_concatenated(parts, a))
                .flat_map(|(part, coeffs)| part.synthesize_unchecked(&coeffs))
                .collect(),
        }
    }

    fn analyze_unchecked(&self, f: &[f64]) -> Vec<f64> {
        match self {
            BasisRep::UnitVectors(_) | BasisRep::Dkk(_) => {
                let mut a = f.to_vec();
                a.resize(self.dim(), 0.0);
                a
            }
            BasisRep::Difference { dim, .. } => {
                let mut a = vec![0.0; *dim];
                let mut acc = 0.0;
                for n in (0..f.len()).rev() {
                    acc += f[n];
                    a[n] = acc;
                }
                a
            }
            BasisRep::Interleaved(parts) => {
                let k = parts.len();
                let mut a = vec![0.0; self.dim()];
                for (i, (part, amb)) in parts.iter().zip(Self::split_interleaved(parts, f)).enumerate() {
                    for (n, x) in part.analyze_unchecked(&amb).into_iter().enumerate() {
                        a[n * k + i] = x;
                    }
                }
                a
            }
            BasisRep::Concatenated { parts, .. } => parts
                .iter()
                .zip(Self::split_concatenated(parts, f))
                .flat_map(|(part, amb)| part.analyze_unchecked(&amb))
                .collect(),
        }
    }

    /// Ambient coordinates of `Σ a_n x_n`.
    pub fn synthesize(&self, a: &[f64]) -> Result<Vec<f64>> {
        check_vector(a, self.dim())?;
        Ok(self.synthesize_unchecked(a))
    }

    /// Basis coefficients of the ambient vector `f`.
    pub fn analyze(&self, f: &[f64]) -> Result<Vec<f64>> {
        check_vector(f, self.dim())?;
        Ok(self.analyze_unchecked(f))
    }

    /// `‖Σ a_n x_n‖` in the ambient space.
    pub fn norm(&self, a: &[f64]) -> Result<f64> {
        check_vector(a, self.dim())?;
        Ok(self.norm_unchecked(a))
    }

    pub(crate) fn norm_unchecked(&self, a: &[f64]) -> f64 {
        match self {
            BasisRep::UnitVectors(s) => s.norm_unchecked(a),
            BasisRep::Difference { p, .. } => {
                let c: Vec<f64> = (0..a.len())
                    .map(|n| a[n] - a.get(n + 1).copied().unwrap_or(0.0))
                    .collect();
                lp_norm(&c, *p)
            }
            BasisRep::Interleaved(parts) => parts
                .iter()
                .zip(Self::split_interleaved(parts, a))
                .map(|(part, coeffs)| part.norm_unchecked(&coeffs))
                .sum(),
            BasisRep::Concatenated { parts, outer } => {
                let norms: Vec<f64> = parts
                    .iter()
                    .zip(Self::split_concatenated(parts, a))
                    .map(|(part, coeffs)| part.norm_unchecked(&coeffs))
                    .collect();
                outer.norm_unchecked(&norms)
            }
            BasisRep::Dkk(space) => space.norm_unchecked(a),
        }
    }

    /// `‖x_n‖` for `n = 1..=dim`.
    pub fn element_norms(&self) -> Vec<f64> {
        let dim = self.dim();
        (0..dim)
            .map(|n| {
                let mut e = vec![0.0; n + 1];
                e[n] = 1.0;
                self.norm_unchecked(&e)
            })
            .collect()
    }

    /// `max_n ‖x_n‖ / min_n ‖x_n‖`.
    pub fn semi_normalization_ratio(&self) -> f64 {
        let norms = self.element_norms();
        let max = norms.iter().cloned().fold(0.0, f64::max);
        let min = norms.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }

    pub fn label(&self) -> String {
        match self {
            BasisRep::UnitVectors(s) => format!("unit_vectors({})", s.label()),
            BasisRep::Difference { p, dim } => format!("difference(p={}, dim={dim})", p.value()),
            BasisRep::Interleaved(parts) => format!(
                "interleaved[{}]",
                parts.iter().map(BasisRep::label).collect::<Vec<_>>().join(", ")
            ),
            BasisRep::Concatenated { parts, .. } => format!(
                "concatenated[{}]",
                parts.iter().map(BasisRep::label).collect::<Vec<_>>().join(", ")
            ),
            BasisRep::Dkk(space) => format!("dkk(dim={})", space.dim()),
        }
    }
}

impl CoeffNorm for BasisRep {
    fn dim(&self) -> usize {
        BasisRep::dim(self)
    }

    fn coeff_norm(&self, a: &[f64]) -> f64 {
        self.norm_unchecked(a)
    }

    fn label(&self) -> String {
        BasisRep::label(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diff(dim: usize) -> BasisRep {
        BasisRep::difference(0.5, dim).unwrap()
    }

    #[test]
    fn difference_synthesis_examples() {
        assert_eq!(diff(3).synthesize(&[1.0, 1.0, 1.0]).unwrap(), vec![0.0, 0.0, 1.0]);
        assert_eq!(diff(2).synthesize(&[1.0, 0.0]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(diff(3).analyze(&[1.0, -1.0, 1.0]).unwrap(), vec![1.0, 0.0, 1.0]);
        assert_eq!(diff(3).analyze(&[0.0, 0.0, 1.0]).unwrap(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn difference_norm_of_odd_sum() {
        assert_eq!(diff(5).norm(&[1.0, 0.0, 1.0, 0.0, 1.0]).unwrap(), 25.0);
    }

    #[test]
    fn unit_vectors_are_identity() {
        let b = BasisRep::unit_vectors(SpaceSpec::lp(2.0, 2).unwrap());
        assert_eq!(b.synthesize(&[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);
        assert_eq!(b.analyze(&[5.0, 2.0]).unwrap(), vec![5.0, 2.0]);
        assert_eq!(b.norm(&[3.0, 4.0]).unwrap(), 5.0);
    }

    #[test]
    fn interleaved_direct_sum() {
        let l1 = BasisRep::unit_vectors(SpaceSpec::lp(1.0, 2).unwrap());
        let l2 = BasisRep::unit_vectors(SpaceSpec::lp(2.0, 2).unwrap());
        let b = BasisRep::interleaved(vec![l1, l2]).unwrap();
        let v = b.norm(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!((v - (2.0 + 2f64.sqrt())).abs() < 1e-12);
        let d = SpaceSpec::direct_sum_d(1.0, 2.0, 4).unwrap();
        assert_eq!(d.norm(&[1.0, 2.0, 3.0, 4.0]).unwrap(), b.norm(&[1.0, 2.0, 3.0, 4.0]).unwrap());
    }

    #[test]
    fn interleaved_rejects_wrong_dims() {
        let a = BasisRep::unit_vectors(SpaceSpec::lp(1.0, 1).unwrap());
        let b = BasisRep::unit_vectors(SpaceSpec::lp(1.0, 3).unwrap());
        assert!(matches!(BasisRep::interleaved(vec![a, b]), Err(Error::InvalidBasis(_))));
    }

    #[test]
    fn interleaved_difference_round_trip() {
        let b = BasisRep::interleaved(vec![diff(3), diff(2)]).unwrap();
        let a = [1.0, -2.0, 0.5, 3.0, 0.25];
        let f = b.synthesize(&a).unwrap();
        assert_eq!(b.analyze(&f).unwrap(), a.to_vec());
    }

    #[test]
    fn concatenated_uses_outer_lattice() {
        let outer = SpaceSpec::lp(2.0, 2).unwrap();
        let b = BasisRep::concatenated(vec![diff(2), diff(3)], outer).unwrap();
        // parts: d_1 + d_2 = e_2 (norm 1) and d_1 (norm 1)
        let v = b.norm(&[1.0, 1.0, 1.0, 0.0, 0.0]).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-12);
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(b.analyze(&b.synthesize(&a).unwrap()).unwrap(), a.to_vec());
        let small = SpaceSpec::lp(2.0, 1).unwrap();
        assert!(BasisRep::concatenated(vec![diff(2), diff(3)], small).is_err());
    }

    #[test]
    fn projections() {
        let a = [5.0, 2.0, 7.0];
        let s = IndexSet::from_indices([1, 3]).unwrap();
        assert_eq!(coordinate_projection(&a, &s).unwrap(), vec![5.0, 0.0, 7.0]);
        assert_eq!(coordinate_projection(&a, &IndexSet::empty()).unwrap(), vec![0.0; 3]);
        let full = IndexSet::interval(1, 3).unwrap();
        assert_eq!(coordinate_projection(&a, &full).unwrap(), a.to_vec());
        let bad = IndexSet::from_indices([4]).unwrap();
        assert_eq!(
            coordinate_projection(&a, &bad),
            Err(Error::IndexOutOfRange { index: 4, dim: 3 })
        );
    }

    #[test]
    fn index_set_helpers() {
        let s = IndexSet::from_indices([4, 2, 2, 9]).unwrap();
        assert_eq!(s.as_slice(), &[2, 4, 9]);
        assert_eq!((s.len(), s.min(), s.max()), (3, Some(2), Some(9)));
        assert_eq!(IndexSet::from_mask(0b101).as_slice(), &[1, 3]);
        assert!(IndexSet::try_from(vec![3, 2]).is_err());
        assert!(IndexSet::try_from(vec![0, 2]).is_err());
        assert!(serde_json::from_str::<IndexSet>("[1,1]").is_err());
    }

    #[test]
    fn semi_normalization_of_difference() {
        let r = diff(6).semi_normalization_ratio();
        assert_eq!(r, 4.0);
    }

    #[test]
    fn basis_json_round_trip() {
        let b = BasisRep::interleaved(vec![
            BasisRep::unit_vectors(SpaceSpec::lp(1.0, 2).unwrap()),
            diff(2),
        ])
        .unwrap();
        let text = serde_json::to_string(&b).unwrap();
        let back: BasisRep = serde_json::from_str(&text).unwrap();
        assert_eq!(b, back);
        let bad = r#"{"kind":"interleaved","parts":[{"kind":"difference","p":1,"dim":1},{"kind":"difference","p":1,"dim":3}]}"#;
        assert!(serde_json::from_str::<BasisRep>(bad).is_err());
    }
}
