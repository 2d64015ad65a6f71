//! Simple normal crossing pairs `(X, D)` modelled by the Poincaré classes of their strata.
//!
//! A pair records the dimension `n`, the parameter `d` of condition (⋆_d), the divisor
//! components with their multiplicities and, for every subset `J` of components, the class
//! `[D_J]` of the stratum `D_J = ∩_{j∈J} D_j` (with `D_∅ = X`). Absent subsets are empty
//! strata. Everything downstream (weighted sums, zeta specializations, the τ ledger) only
//! reads these classes, so the blow-up transform below is the single place where geometry
//! enters.

mod class;
mod subset;

use std::collections::BTreeMap;

pub use class::MotClass;
pub use subset::{Subset, MAX_DIVISORS};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PairError {
    #[error("condition (⋆_d) violated: divisor {index} has multiplicity {mult} = -d")]
    ConditionStarViolation { index: usize, mult: i64 },
    #[error("divisor {index} has multiplicity 0")]
    ZeroMultiplicity { index: usize },
    #[error("d must be positive, got {0}")]
    NonPositiveD(i64),
    #[error("pairs have different d ({0} vs {1})")]
    MismatchedD(i64, i64),
    #[error("stratum {0:?} is empty")]
    EmptyStratum(Subset),
    #[error("pair has no coordinate-model tag")]
    NoModelTag,
    #[error("divisor {index} contains the center but has multiplicity {mult} <= 0")]
    NegativeMultAtCenter { index: usize, mult: i64 },
    #[error("exceptional divisor would have multiplicity 0 (center is a divisor not contained in D)")]
    DegenerateCenter,
    #[error("invalid center: {0}")]
    InvalidCenter(String),
    #[error("invariant `{invariant}` violated at stratum {subset:?}")]
    InvalidStratum {
        invariant: &'static str,
        subset: Subset,
    },
    #[error("invalid coordinate data: {0}")]
    InvalidCoordinates(String),
    #[error("too many divisors ({0}); at most 64 are supported")]
    TooManyDivisors(usize),
}

/// A divisor component `m · D_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Divisor {
    pub label: String,
    pub mult: i64,
}

impl Divisor {
    pub fn new(label: impl Into<String>, mult: i64) -> Self {
        Divisor {
            label: label.into(),
            mult,
        }
    }
}

/// Records that a pair is `(CP^n, Σ m_j H_{c_j})` with coordinate hyperplanes `H_c = {ξ_c = 0}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoordinateModel {
    pub n: usize,
    /// Coordinate of each divisor, by divisor index.
    pub divisor_coords: Vec<usize>,
}

#[derive(Clone, PartialEq, Eq)]
pub struct SncPair {
    n: usize,
    d: i64,
    divisors: Vec<Divisor>,
    strata: BTreeMap<Subset, MotClass>,
    d_canonical: bool,
    model: Option<CoordinateModel>,
}

impl std::fmt::Debug for SncPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SncPair")
            .field("n", &self.n)
            .field("d", &self.d)
            .field("divisors", &self.divisors)
            .field("strata", &self.strata)
            .field("d_canonical", &self.d_canonical)
            .finish()
    }
}

/// Checks condition (⋆_d) on a multiplicity list.
pub fn check_condition_star(mults: impl IntoIterator<Item = i64>, d: i64) -> Result<(), PairError> {
    for (index, mult) in mults.into_iter().enumerate() {
        if mult == 0 {
            return Err(PairError::ZeroMultiplicity { index });
        }
        if mult == -d {
            return Err(PairError::ConditionStarViolation { index, mult });
        }
    }
    Ok(())
}

impl SncPair {
    /// Builds and validates a pair. Empty classes in `strata` are dropped.
    pub fn new(
        n: usize,
        d: i64,
        divisors: Vec<Divisor>,
        strata: BTreeMap<Subset, MotClass>,
        d_canonical: bool,
    ) -> Result<Self, PairError> {
        let strata = strata.into_iter().filter(|(_, c)| !c.is_empty()).collect();
        let pair = SncPair {
            n,
            d,
            divisors,
            strata,
            d_canonical,
            model: None,
        };
        pair.validate()?;
        Ok(pair)
    }

    fn validate(&self) -> Result<(), PairError> {
        if self.d <= 0 {
            return Err(PairError::NonPositiveD(self.d));
        }
        if self.divisors.len() > MAX_DIVISORS {
            return Err(PairError::TooManyDivisors(self.divisors.len()));
        }
        check_condition_star(self.divisors.iter().map(|x| x.mult), self.d)?;
        if !self.strata.contains_key(&Subset::EMPTY) {
            return Err(PairError::EmptyStratum(Subset::EMPTY));
        }
        let all = self.all_divisors();
        for (&subset, class) in &self.strata {
            let bad = |invariant| PairError::InvalidStratum { invariant, subset };
            if !subset.is_subset_of(all) {
                return Err(bad("stratum indices name existing divisors"));
            }
            if subset.len() > self.n {
                return Err(bad("strata of more than n divisors are empty"));
            }
            let dim = self.n - subset.len();
            if class.degree().is_some_and(|deg| deg > 2 * dim as i64) {
                return Err(bad("deg [D_J] <= 2(n - |J|)"));
            }
            if !class.is_palindromic_of_dim(dim) {
                return Err(bad("Poincaré duality: palindromic of degree 2 dim"));
            }
            if !class.has_nonnegative_coeffs() {
                return Err(bad("Betti numbers are non-negative"));
            }
        }
        if let Some(model) = &self.model {
            if model.divisor_coords.len() != self.divisors.len() {
                return Err(PairError::InvalidCoordinates(
                    "model tag does not match divisor list".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn divisors(&self) -> &[Divisor] {
        &self.divisors
    }

    pub fn num_divisors(&self) -> usize {
        self.divisors.len()
    }

    pub fn mults(&self) -> Vec<i64> {
        self.divisors.iter().map(|x| x.mult).collect()
    }

    pub fn mult(&self, j: usize) -> i64 {
        self.divisors[j].mult
    }

    pub fn all_divisors(&self) -> Subset {
        Subset::full(self.divisors.len())
    }

    /// Nonzero strata, keyed by subset.
    pub fn strata(&self) -> &BTreeMap<Subset, MotClass> {
        &self.strata
    }

    /// `[D_J]`, the empty class when absent.
    pub fn stratum(&self, j: Subset) -> MotClass {
        self.strata.get(&j).cloned().unwrap_or_default()
    }

    pub fn ambient(&self) -> &MotClass {
        &self.strata[&Subset::EMPTY]
    }

    pub fn is_d_canonical(&self) -> bool {
        self.d_canonical
    }

    pub fn model(&self) -> Option<&CoordinateModel> {
        self.model.as_ref()
    }

    /// Multiplicities of the divisors in `j`.
    pub fn mults_of(&self, j: Subset) -> Vec<i64> {
        j.iter().map(|i| self.divisors[i].mult).collect()
    }

    fn fresh_label(&self, base: &str) -> String {
        let mut label = base.to_string();
        while self.divisors.iter().any(|x| x.label == label) {
            label.push('\'');
        }
        label
    }
}

/// `(CP^n, Σ m H_c)` over the given `(coordinate, multiplicity)` assignments.
pub fn projective_space_pair(n: usize, d: i64, assigned: &[(usize, i64)]) -> Result<SncPair, PairError> {
    let mut seen = Subset::EMPTY;
    for &(c, _) in assigned {
        if c > n {
            return Err(PairError::InvalidCoordinates(format!("coordinate {c} exceeds n = {n}")));
        }
        if seen.contains(c) {
            return Err(PairError::InvalidCoordinates(format!("coordinate {c} assigned twice")));
        }
        seen = seen.with(c);
    }
    let divisors: Vec<Divisor> = assigned
        .iter()
        .map(|&(c, m)| Divisor::new(format!("H{c}"), m))
        .collect();
    if divisors.len() > MAX_DIVISORS {
        return Err(PairError::TooManyDivisors(divisors.len()));
    }
    let strata = Subset::full(divisors.len())
        .subsets()
        .filter(|j| j.len() <= n)
        .map(|j| (j, MotClass::projective_space((n - j.len()) as i64)))
        .collect();
    let total: i64 = assigned.iter().map(|&(_, m)| m).sum();
    let d_canonical = total == -((n as i64 + 1) * d);
    let mut pair = SncPair::new(n, d, divisors, strata, d_canonical)?;
    pair.model = Some(CoordinateModel {
        n,
        divisor_coords: assigned.iter().map(|&(c, _)| c).collect(),
    });
    Ok(pair)
}

/// The model pair `(CP^n, γ_{m_1,…,m_s})`: `m_j` on `H_j` for `j = 1..s` (zero entries
/// omitted) and the forced multiplicity `-(Σ m + (n+1) d)` on `H_0`.
pub fn gamma_model_pair(n: usize, d: i64, mults: &[u64]) -> Result<SncPair, PairError> {
    if mults.len() > n {
        return Err(PairError::InvalidCoordinates(format!(
            "{} multiplicities for CP^{n}",
            mults.len()
        )));
    }
    let total: i64 = mults.iter().map(|&m| m as i64).sum();
    let mut assigned = vec![(0, -(total + (n as i64 + 1) * d))];
    assigned.extend(
        mults
            .iter()
            .enumerate()
            .filter(|(_, &m)| m != 0)
            .map(|(i, &m)| (i + 1, m as i64)),
    );
    projective_space_pair(n, d, &assigned)
}

/// Class-level product `(Y × Z, pr_1^* D_Y + pr_2^* D_Z)` modelling a fibration.
pub fn fibration_pair(base: &SncPair, fiber: &SncPair) -> Result<SncPair, PairError> {
    if base.d != fiber.d {
        return Err(PairError::MismatchedD(base.d, fiber.d));
    }
    let lb = base.num_divisors();
    if lb + fiber.num_divisors() > MAX_DIVISORS {
        return Err(PairError::TooManyDivisors(lb + fiber.num_divisors()));
    }
    let mut divisors = base.divisors.clone();
    for x in &fiber.divisors {
        let label = if divisors.iter().any(|y| y.label == x.label) {
            format!("f.{}", x.label)
        } else {
            x.label.clone()
        };
        divisors.push(Divisor::new(label, x.mult));
    }
    let mut strata = BTreeMap::new();
    for (jb, cb) in &base.strata {
        for (jf, cf) in &fiber.strata {
            let j = Subset::from_bits(jb.bits() | (jf.bits() << lb));
            strata.insert(j, cb * cf);
        }
    }
    SncPair::new(
        base.n + fiber.n,
        base.d,
        divisors,
        strata,
        base.d_canonical && fiber.d_canonical,
    )
}

/// A smooth connected center `Y` meeting the divisors transversally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenterDescriptor {
    r: usize,
    contains: Subset,
    incidence: BTreeMap<Subset, MotClass>,
}

impl CenterDescriptor {
    /// `incidence[J] = [Y ∩ D_J]`; empty classes may be omitted.
    pub fn new(r: usize, contains: Subset, incidence: BTreeMap<Subset, MotClass>) -> Self {
        let incidence = incidence.into_iter().filter(|(_, c)| !c.is_empty()).collect();
        CenterDescriptor {
            r,
            contains,
            incidence,
        }
    }

    pub fn codim(&self) -> usize {
        self.r
    }

    /// Divisors containing `Y`.
    pub fn contains(&self) -> Subset {
        self.contains
    }

    pub fn incidence(&self) -> &BTreeMap<Subset, MotClass> {
        &self.incidence
    }

    /// `[Y ∩ D_J]`.
    pub fn meet(&self, j: Subset) -> MotClass {
        self.incidence.get(&j).cloned().unwrap_or_default()
    }

    /// `[Y]`.
    pub fn class(&self) -> MotClass {
        self.meet(Subset::EMPTY)
    }

    /// Checks the descriptor against the ambient pair.
    pub fn validate(&self, pair: &SncPair) -> Result<(), PairError> {
        let bad = |msg: String| Err(PairError::InvalidCenter(msg));
        if self.r == 0 || self.r > pair.n {
            return bad(format!("codimension {} outside 1..={}", self.r, pair.n));
        }
        if self.contains.len() > self.r {
            return bad(format!(
                "{} divisors contain a center of codimension {}",
                self.contains.len(),
                self.r
            ));
        }
        let all = pair.all_divisors();
        if !self.contains.is_subset_of(all) {
            return bad("contained divisors out of range".into());
        }
        if self.class().is_empty() {
            return bad("[Y] is empty".into());
        }
        for (&j, class) in &self.incidence {
            if !j.is_subset_of(all) {
                return bad(format!("incidence key {j:?} out of range"));
            }
            let free = j.difference(self.contains).len();
            if self.r + free > pair.n {
                return bad(format!("Y ∩ D_{j:?} should be empty"));
            }
            let dim = pair.n - self.r - free;
            if !class.is_palindromic_of_dim(dim) || !class.has_nonnegative_coeffs() {
                return bad(format!("[Y ∩ D_{j:?}] is not a class of dimension {dim}"));
            }
            if pair.stratum(j).is_empty() {
                return bad(format!("Y meets the empty stratum {j:?}"));
            }
        }
        for j in all.subsets() {
            for s in self.contains.iter() {
                if self.meet(j) != self.meet(j.with(s)) {
                    return bad(format!(
                        "incidence changes when intersecting {j:?} with a divisor containing Y"
                    ));
                }
            }
        }
        Ok(())
    }
}

/// The center `Y = D_{J0}`.
pub fn stratum_center(pair: &SncPair, j0: Subset) -> Result<CenterDescriptor, PairError> {
    if j0.is_empty() {
        return Err(PairError::InvalidCenter("a stratum center needs |J0| >= 1".into()));
    }
    if pair.stratum(j0).is_empty() {
        return Err(PairError::EmptyStratum(j0));
    }
    let mut incidence = BTreeMap::new();
    for (&k, class) in &pair.strata {
        if !j0.is_subset_of(k) {
            continue;
        }
        let free = k.difference(j0);
        for t in j0.subsets() {
            incidence.insert(free.union(t), class.clone());
        }
    }
    Ok(CenterDescriptor::new(j0.len(), j0, incidence))
}

/// The coordinate subspace `Y = {ξ_c = 0 : c ∈ coords}` of a coordinate model.
pub fn coordinate_center(pair: &SncPair, coords: &[usize]) -> Result<CenterDescriptor, PairError> {
    let model = pair.model.as_ref().ok_or(PairError::NoModelTag)?;
    let n = model.n;
    let coord_set: Subset = coords.iter().copied().collect();
    if coord_set.len() != coords.len() || coords.iter().any(|&c| c > n) {
        return Err(PairError::InvalidCoordinates(format!(
            "coordinates {coords:?} must be distinct and at most {n}"
        )));
    }
    let r = coords.len();
    if r == 0 || r > n {
        return Err(PairError::InvalidCenter(format!(
            "coordinate subspace of codimension {r} in CP^{n} is {}",
            if r == 0 { "the whole space" } else { "empty" }
        )));
    }
    let contains: Subset = model
        .divisor_coords
        .iter()
        .enumerate()
        .filter(|(_, c)| coord_set.contains(**c))
        .map(|(i, _)| i)
        .collect();
    let incidence = pair
        .all_divisors()
        .subsets()
        .map(|j| {
            let free = j.difference(contains).len() as i64;
            (j, MotClass::projective_space(n as i64 - r as i64 - free))
        })
        .collect();
    Ok(CenterDescriptor::new(r, contains, incidence))
}

/// Result of blowing up a pair along a center.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupRecord {
    pub new_pair: SncPair,
    pub exceptional_index: usize,
    pub m_e: i64,
}

/// `m_E = Σ_{j∈S} m_j + (r - 1) d`, the multiplicity of `E` in `f^*D + d K_{X'/X}`.
pub fn exceptional_mult(pair: &SncPair, c: &CenterDescriptor) -> i64 {
    let s: i64 = pair.mults_of(c.contains).iter().sum();
    s + (c.r as i64 - 1) * pair.d
}

/// Blows up `pair` along `c`, appending the exceptional divisor `E` last.
pub fn blow_up(pair: &SncPair, c: &CenterDescriptor) -> Result<BlowupRecord, PairError> {
    blow_up_with_mult(pair, c, exceptional_mult(pair, c))
}

/// Blow-up with a caller-supplied multiplicity on `E`. [`blow_up`] passes
/// [`exceptional_mult`]; other values describe a different divisor upstairs.
pub fn blow_up_with_mult(pair: &SncPair, c: &CenterDescriptor, m_e: i64) -> Result<BlowupRecord, PairError> {
    c.validate(pair)?;
    for j in c.contains.iter() {
        let mult = pair.mult(j);
        if mult <= 0 {
            return Err(PairError::NegativeMultAtCenter { index: j, mult });
        }
    }
    let e = pair.num_divisors();
    if m_e == -pair.d {
        return Err(PairError::ConditionStarViolation { index: e, mult: m_e });
    }
    if m_e == 0 {
        return Err(PairError::DegenerateCenter);
    }
    if e + 1 > MAX_DIVISORS {
        return Err(PairError::TooManyDivisors(e + 1));
    }
    let r = c.r as i64;
    let one = MotClass::point();
    let mut strata = BTreeMap::new();
    let keys: std::collections::BTreeSet<Subset> =
        pair.strata.keys().chain(c.incidence.keys()).copied().collect();
    for j in keys {
        let meet = c.meet(j);
        let through = j.intersection(c.contains).len() as i64;
        // strict transform of D_J: [D_J] + [Y ∩ D_J]([CP^{c-1}] - 1), c = codim of Y ∩ D_J in D_J
        let fiber_gain = &MotClass::projective_space(r - through - 1) - &one;
        let strict = &pair.stratum(j) + &(&meet * &fiber_gain);
        strata.insert(j, strict);
        // D'_J ∩ E: a CP^{r-1-|J∩S|}-bundle over Y ∩ D_J
        let on_e = &meet * &MotClass::projective_space(r - 1 - through);
        strata.insert(j.with(e), on_e);
    }
    let mut divisors = pair.divisors.clone();
    divisors.push(Divisor::new(pair.fresh_label(&format!("E{e}")), m_e));
    let new_pair = SncPair::new(pair.n, pair.d, divisors, strata, pair.d_canonical)?;
    Ok(BlowupRecord {
        new_pair,
        exceptional_index: e,
        m_e,
    })
}

/// `(D_j, Σ_{i≠j} m_i (D_i ∩ D_j))`.
pub fn restrict_to_divisor(pair: &SncPair, j: usize) -> Result<SncPair, PairError> {
    if j >= pair.num_divisors() {
        return Err(PairError::InvalidCenter(format!("no divisor {j}")));
    }
    let js = Subset::singleton(j);
    if pair.stratum(js).is_empty() {
        return Err(PairError::EmptyStratum(js));
    }
    let divisors = pair
        .divisors
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != j)
        .map(|(_, x)| x.clone())
        .collect();
    let strata = pair
        .strata
        .iter()
        .filter(|(k, _)| k.contains(j))
        .map(|(k, class)| (k.without(j).compress(js), class.clone()))
        .collect();
    SncPair::new(pair.n - 1, pair.d, divisors, strata, false)
}

/// `(Y, Σ_{j∉S} m_j (D_j ∩ Y))`.
pub fn center_pair(pair: &SncPair, c: &CenterDescriptor) -> Result<SncPair, PairError> {
    c.validate(pair)?;
    let s = c.contains;
    let divisors = pair
        .divisors
        .iter()
        .enumerate()
        .filter(|(i, _)| !s.contains(*i))
        .map(|(_, x)| x.clone())
        .collect();
    let strata = c
        .incidence
        .iter()
        .filter(|(k, _)| k.intersection(s).is_empty())
        .map(|(k, class)| (k.compress(s), class.clone()))
        .collect();
    SncPair::new(pair.n - c.r, pair.d, divisors, strata, false)
}
