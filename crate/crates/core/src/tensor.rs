//! Entanglement tensor components of a pure multipartite state.
//!
//! For a subset `S = {s_0 < s_1 < … < s_{D-1}}` of parties, the component is
//!
//! ```text
//! c_S = ( N_D · Σ_u (1/p_u) · Σ_{k_s < l_s, s ∈ S} F_1(k, l) )^{1/2}
//! ```
//!
//! where `u` runs over basis outcomes of the parties outside `S`, `p_u` is
//! the probability of that outcome, and the nested quantity is
//!
//! ```text
//! F_{D-1}(k, l) = |α(k) α(l) − α(k') α(l')|²          (k', l': swap k_{s_{D-1}} ↔ l_{s_{D-1}})
//! F_i(k, l)     = |F_{i+1}(k, l) − F_{i+1}(swap_{s_i}(k, l))|     for 1 ≤ i < D-1
//! ```
//!
//! The lowest party `s_0` is the anchor and is never swapped. Sectors with
//! `p_u = 0` contribute nothing.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::StateVector;

/// Components below this value are treated as zero by [`separability_scan`].
pub const ZERO_THRESHOLD: f64 = 1e-10;

pub const BASIS_NOTE: &str =
    "component values refer to the computational basis of each party; for more than two parties they change under local unitaries";

/// An ascending set of at least two distinct party indices (0-based).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubsetSelector {
    parties: Vec<usize>,
}

impl SubsetSelector {
    pub fn new(mut parties: Vec<usize>, num_parties: usize) -> Result<Self> {
        parties.sort_unstable();
        if parties.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Subset(format!(
                "duplicate party in {:?}",
                one_based(&parties)
            )));
        }
        if parties.len() < 2 {
            return Err(Error::Subset("a subset needs at least two parties".into()));
        }
        if let Some(&p) = parties.iter().find(|&&p| p >= num_parties) {
            return Err(Error::Subset(format!(
                "party {} does not exist in a {}-party state",
                p + 1,
                num_parties
            )));
        }
        Ok(Self { parties })
    }

    /// Parses a 1-based party list such as `[1, 3]`.
    pub fn from_one_based(parties: &[usize], num_parties: usize) -> Result<Self> {
        if parties.contains(&0) {
            return Err(Error::Subset("party labels start at 1".into()));
        }
        Self::new(parties.iter().map(|p| p - 1).collect(), num_parties)
    }

    pub fn parties(&self) -> &[usize] {
        &self.parties
    }

    pub fn one_based(&self) -> Vec<usize> {
        one_based(&self.parties)
    }

    pub fn size(&self) -> usize {
        self.parties.len()
    }

    pub fn contains(&self, party: usize) -> bool {
        self.parties.binary_search(&party).is_ok()
    }

    /// All subsets of the given size, in lexicographic order.
    pub fn all_of_size(num_parties: usize, size: usize) -> Vec<SubsetSelector> {
        let mut out = Vec::new();
        if size < 2 || size > num_parties {
            return out;
        }
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(SubsetSelector {
                parties: idx.clone(),
            });
            let mut i = size;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if idx[i] < num_parties - size + i {
                    break;
                }
                if i == 0 {
                    return out;
                }
            }
            idx[i] += 1;
            for j in i + 1..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
}

fn one_based(parties: &[usize]) -> Vec<usize> {
    parties.iter().map(|p| p + 1).collect()
}

impl fmt::Display for SubsetSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parties.iter().map(|p| (p + 1).to_string()).collect();
        write!(f, "c{{{}}}", s.join(","))
    }
}

/// Normalization constants `N_D` per subset size. Sizes without an explicit
/// entry use the default of 4.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationScheme {
    constants: BTreeMap<usize, f64>,
    default: f64,
}

impl Default for NormalizationScheme {
    fn default() -> Self {
        Self {
            constants: BTreeMap::new(),
            default: 4.0,
        }
    }
}

impl NormalizationScheme {
    pub fn with_constant(mut self, size: usize, value: f64) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::Argument(format!(
                "normalization constant for size {size} must be positive, got {value}"
            )));
        }
        self.constants.insert(size, value);
        Ok(self)
    }

    pub fn constant(&self, size: usize) -> f64 {
        self.constants.get(&size).copied().unwrap_or(self.default)
    }
}

/// Shared evaluation context for one subset of one state.
struct Nesting<'a> {
    amps: &'a [Complex64],
    /// Strides of the selected parties, anchor first.
    sel_strides: Vec<usize>,
}

impl Nesting<'_> {
    #[inline]
    fn flats(&self, base: usize, k: &[usize], l: &[usize], mask: u64) -> (usize, usize) {
        let mut kf = base;
        let mut lf = base;
        for (i, &st) in self.sel_strides.iter().enumerate() {
            if mask >> i & 1 == 1 {
                kf += l[i] * st;
                lf += k[i] * st;
            } else {
                kf += k[i] * st;
                lf += l[i] * st;
            }
        }
        (kf, lf)
    }

    /// `α(k)α(l) − α(k')α(l')` with the innermost party swapped on top of `mask`.
    #[inline]
    fn innermost(&self, base: usize, k: &[usize], l: &[usize], mask: u64) -> Complex64 {
        let last = self.sel_strides.len() - 1;
        let (kf, lf) = self.flats(base, k, l, mask);
        let (ks, ls) = self.flats(base, k, l, mask ^ (1 << last));
        self.amps[kf] * self.amps[lf] - self.amps[ks] * self.amps[ls]
    }

    /// `F_level` evaluated at the tuples obtained by applying `mask` swaps.
    fn nested(&self, level: usize, base: usize, k: &[usize], l: &[usize], mask: u64) -> f64 {
        let last = self.sel_strides.len() - 1;
        if level == last {
            self.innermost(base, k, l, mask).norm_sqr()
        } else {
            let a = self.nested(level + 1, base, k, l, mask);
            let b = self.nested(level + 1, base, k, l, mask ^ (1 << level));
            (a - b).abs()
        }
    }
}

/// Value of the index permutation operator for one party of a subset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PermutationDifference {
    /// Innermost level: `α(k)α(l) − α(k')α(l')`.
    Amplitude(Complex64),
    /// Outer level: inner value minus inner value with this party swapped.
    /// The component uses its absolute value.
    Magnitude(f64),
}

impl PermutationDifference {
    pub fn abs(&self) -> f64 {
        match self {
            PermutationDifference::Amplitude(z) => z.norm(),
            PermutationDifference::Magnitude(x) => x.abs(),
        }
    }
}

/// Evaluates the permutation operator of `party` on the coefficient product
/// `α(k)·α(l)` nested inside `subset`.
///
/// `k` and `l` are full index tuples that must agree on every party outside
/// the subset. The anchor (lowest) party of the subset carries no operator.
pub fn permutation_difference(
    state: &StateVector,
    subset: &SubsetSelector,
    k: &[usize],
    l: &[usize],
    party: usize,
) -> Result<PermutationDifference> {
    let structure = state.structure();
    let m = structure.num_parties();
    if subset.parties().iter().any(|&p| p >= m) {
        return Err(Error::Subset("subset does not fit the state".into()));
    }
    structure.flat_index(k)?;
    structure.flat_index(l)?;
    for j in 0..m {
        if !subset.contains(j) && k[j] != l[j] {
            return Err(Error::Argument(format!(
                "tuples differ at unselected party {}",
                j + 1
            )));
        }
    }
    let level = subset
        .parties()
        .iter()
        .position(|&p| p == party)
        .ok_or_else(|| Error::Subset(format!("party {} is not in {}", party + 1, subset)))?;
    if level == 0 {
        return Err(Error::Subset(format!(
            "party {} is the anchor of {} and carries no permutation",
            party + 1,
            subset
        )));
    }

    let strides = structure.strides();
    let sel_strides: Vec<usize> = subset.parties().iter().map(|&p| strides[p]).collect();
    let ks: Vec<usize> = subset.parties().iter().map(|&p| k[p]).collect();
    let ls: Vec<usize> = subset.parties().iter().map(|&p| l[p]).collect();
    let base: usize = (0..m)
        .filter(|j| !subset.contains(*j))
        .map(|j| k[j] * strides[j])
        .sum();
    let nest = Nesting {
        amps: state.amplitudes(),
        sel_strides,
    };
    let last = subset.size() - 1;
    if level == last {
        Ok(PermutationDifference::Amplitude(
            nest.innermost(base, &ks, &ls, 0),
        ))
    } else {
        let a = nest.nested(level + 1, base, &ks, &ls, 0);
        let b = nest.nested(level + 1, base, &ks, &ls, 1 << level);
        Ok(PermutationDifference::Magnitude(a - b))
    }
}

/// Entanglement tensor component for `subset`.
pub fn component(
    state: &StateVector,
    subset: &SubsetSelector,
    scheme: &NormalizationScheme,
) -> Result<f64> {
    let structure = state.structure();
    let m = structure.num_parties();
    if subset.parties().iter().any(|&p| p >= m) {
        return Err(Error::Subset(format!(
            "{} does not fit a {}-party state",
            subset, m
        )));
    }
    if subset.size() > 64 {
        return Err(Error::Subset(
            "subsets larger than 64 parties are unsupported".into(),
        ));
    }
    let dims = structure.dims();
    let strides = structure.strides();
    let amps = state.amplitudes();

    let selected = subset.parties();
    let unselected: Vec<usize> = (0..m).filter(|j| !subset.contains(*j)).collect();
    let sel_strides: Vec<usize> = selected.iter().map(|&p| strides[p]).collect();
    let nest = Nesting {
        amps,
        sel_strides: sel_strides.clone(),
    };

    // (k_s, l_s) pairs with k_s < l_s for every selected party.
    let pair_lists: Vec<Vec<(usize, usize)>> = selected
        .iter()
        .map(|&p| {
            let n = dims[p];
            (0..n)
                .flat_map(|k| (k + 1..n).map(move |l| (k, l)))
                .collect()
        })
        .collect();

    let sel_dims: Vec<usize> = selected.iter().map(|&p| dims[p]).collect();
    let sector_size: usize = sel_dims.iter().product();
    let sel_offsets: Vec<usize> = (0..sector_size)
        .map(|mut r| {
            let mut off = 0;
            for i in (0..selected.len()).rev() {
                off += (r % sel_dims[i]) * sel_strides[i];
                r /= sel_dims[i];
            }
            off
        })
        .collect();

    let unsel_dims: Vec<usize> = unselected.iter().map(|&p| dims[p]).collect();
    let num_sectors: usize = unsel_dims.iter().product();

    let d = selected.len();
    let mut k = vec![0usize; d];
    let mut l = vec![0usize; d];
    let mut pair_idx = vec![0usize; d];

    let mut total = 0.0;
    for sector in 0..num_sectors {
        let mut rest = sector;
        let mut base = 0;
        for i in (0..unselected.len()).rev() {
            base += (rest % unsel_dims[i]) * strides[unselected[i]];
            rest /= unsel_dims[i];
        }
        let p: f64 = sel_offsets.iter().map(|&o| amps[base + o].norm_sqr()).sum();
        if p <= 0.0 {
            continue;
        }

        let mut sum = 0.0;
        pair_idx.iter_mut().for_each(|x| *x = 0);
        'pairs: loop {
            for i in 0..d {
                let (a, b) = pair_lists[i][pair_idx[i]];
                k[i] = a;
                l[i] = b;
            }
            sum += nest.nested(1, base, &k, &l, 0);

            let mut i = d;
            loop {
                if i == 0 {
                    break 'pairs;
                }
                i -= 1;
                pair_idx[i] += 1;
                if pair_idx[i] < pair_lists[i].len() {
                    break;
                }
                pair_idx[i] = 0;
            }
        }
        total += sum / p;
    }
    Ok((scheme.constant(d) * total).sqrt())
}

/// All requested components of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorReport {
    pub dims: Vec<usize>,
    pub labels: Vec<String>,
    pub components: BTreeMap<SubsetSelector, f64>,
    pub scheme: NormalizationScheme,
    pub basis_note: String,
}

impl TensorReport {
    /// Looks up a component by 0-based party list.
    pub fn get(&self, parties: &[usize]) -> Option<f64> {
        let key = SubsetSelector {
            parties: parties.to_vec(),
        };
        self.components.get(&key).copied()
    }

    /// Looks up a component by 1-based party list.
    pub fn get_one_based(&self, parties: &[usize]) -> Option<f64> {
        let zero: Vec<usize> = parties.iter().map(|p| p.wrapping_sub(1)).collect();
        self.get(&zero)
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.components.keys().map(|k| k.size()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn of_size(&self, size: usize) -> impl Iterator<Item = (&SubsetSelector, f64)> {
        self.components
            .iter()
            .filter(move |(k, _)| k.size() == size)
            .map(|(k, v)| (k, *v))
    }

    pub fn to_json_value(&self) -> ReportJson {
        ReportJson {
            dims: self.dims.clone(),
            norm_constants: self
                .sizes()
                .into_iter()
                .map(|d| (d.to_string(), self.scheme.constant(d)))
                .collect(),
            components: self
                .components
                .iter()
                .map(|(k, &value)| ComponentJson {
                    subset: k.one_based(),
                    value,
                })
                .collect(),
            tensor_norm: tensor_norm(self),
            basis_note: self.basis_note.clone(),
        }
    }
}

/// Serialized form of a [`TensorReport`]; subsets are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub dims: Vec<usize>,
    pub norm_constants: BTreeMap<String, f64>,
    pub components: Vec<ComponentJson>,
    pub tensor_norm: f64,
    #[serde(default)]
    pub basis_note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub subset: Vec<usize>,
    pub value: f64,
}

/// Every component of the requested sizes (default: `2..=M`).
pub fn full_tensor(
    state: &StateVector,
    scheme: &NormalizationScheme,
    sizes: Option<&[usize]>,
) -> Result<TensorReport> {
    let m = state.num_parties();
    let sizes: Vec<usize> = match sizes {
        Some(s) => {
            if let Some(&bad) = s.iter().find(|&&d| d < 2 || d > m) {
                return Err(Error::Subset(format!("subset size {bad} outside 2..={m}")));
            }
            s.to_vec()
        }
        None => (2..=m).collect(),
    };
    let subsets: Vec<SubsetSelector> = sizes
        .iter()
        .flat_map(|&d| SubsetSelector::all_of_size(m, d))
        .collect();
    let values: Vec<f64> = subsets
        .par_iter()
        .map(|s| component(state, s, scheme))
        .collect::<Result<_>>()?;
    Ok(TensorReport {
        dims: state.dims().to_vec(),
        labels: state.structure().labels().to_vec(),
        components: subsets.into_iter().zip(values).collect(),
        scheme: scheme.clone(),
        basis_note: BASIS_NOTE.to_string(),
    })
}

/// Per party: `true` when every component involving it is below
/// [`ZERO_THRESHOLD`] in the current basis.
pub fn separability_scan(state: &StateVector, scheme: &NormalizationScheme) -> Result<Vec<bool>> {
    let m = state.num_parties();
    if m < 2 {
        return Ok(vec![true; m]);
    }
    let report = full_tensor(state, scheme, None)?;
    Ok((0..m)
        .map(|j| {
            report
                .components
                .iter()
                .filter(|(k, _)| k.contains(j))
                .all(|(_, &v)| v < ZERO_THRESHOLD)
        })
        .collect())
}

/// Unweighted aggregate `sqrt(Σ c_S²)` over every component in the report.
///
/// This mixes different subset sizes with equal weight, so it cannot tell a
/// state with one large component apart from one with many small ones.
pub fn tensor_norm(report: &TensorReport) -> f64 {
    report
        .components
        .values()
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
}
