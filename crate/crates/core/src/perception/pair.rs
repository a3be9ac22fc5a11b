use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{induce_point_metric, sup_dist, Signal, SignalSpace};
use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;
use crate::DEFAULT_TOLERANCE;

/// Largest group a pair may be closed to.
pub const MAX_GROUP_ORDER: usize = 100_000;

/// A self-map of the domain given by its point-index table.
///
/// Serialized as `{"forward": [int]}`; the inverse is derived.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "RawOperation", into = "RawOperation")]
pub struct OperationMap {
    forward: Vec<usize>,
    inverse: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawOperation {
    forward: Vec<usize>,
}

impl From<RawOperation> for OperationMap {
    fn from(raw: RawOperation) -> Self {
        OperationMap::new(raw.forward)
    }
}

impl From<OperationMap> for RawOperation {
    fn from(op: OperationMap) -> Self {
        RawOperation { forward: op.forward }
    }
}

impl OperationMap {
    /// Wraps a forward table; the inverse is present iff the table is a
    /// bijection of `0..len`.
    pub fn new(forward: Vec<usize>) -> Self {
        let n = forward.len();
        let mut inv = vec![usize::MAX; n];
        let mut bijective = true;
        for (x, &y) in forward.iter().enumerate() {
            if y >= n || inv[y] != usize::MAX {
                bijective = false;
                break;
            }
            inv[y] = x;
        }
        OperationMap {
            forward,
            inverse: bijective.then_some(inv),
        }
    }

    pub fn identity(n: usize) -> Self {
        OperationMap::new((0..n).collect())
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn inverse(&self) -> Option<&[usize]> {
        self.inverse.as_deref()
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn is_bijection(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &OperationMap) -> OperationMap {
        OperationMap::new(inner.forward.iter().map(|&x| self.forward[x]).collect())
    }

    pub fn inverted(&self) -> Option<OperationMap> {
        self.inverse.clone().map(OperationMap::new)
    }
}

/// Outcome of [`validate_operation`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperationCheck {
    /// Every `φ ∘ g` matches a member of Φ within tolerance.
    pub is_phi_op: bool,
    /// Additionally bijective with every `φ ∘ g⁻¹` in Φ.
    pub is_invertible: bool,
    /// `matches[i]` is the member matching `φ_i ∘ g`.
    pub matches: Vec<Option<usize>>,
    pub inverse_matches: Option<Vec<Option<usize>>>,
    /// Worst nearest-member distance over all composites checked.
    pub residual: f64,
}

fn match_composites(phi: &SignalSpace, forward: &[usize]) -> (Vec<Option<usize>>, f64) {
    let mut residual = 0.0f64;
    let matches = phi
        .signals()
        .iter()
        .map(|s| {
            let composite = s.compose(forward);
            let (k, d) = phi.nearest(composite.values()).expect("nonempty");
            residual = residual.max(d);
            (d <= phi.tolerance()).then_some(k)
        })
        .collect();
    (matches, residual)
}

/// Checks whether `g` is a (invertible) Φ-operation, recording which member of
/// Φ each composite `φ ∘ g` matches.
pub fn validate_operation(phi: &SignalSpace, g: &OperationMap) -> Result<OperationCheck> {
    let n = phi.points();
    if g.len() != n {
        return Err(Error::Malformed(format!(
            "operation is defined on {} points, domain has {n}",
            g.len()
        )));
    }
    if let Some(x) = g.forward().iter().position(|&y| y >= n) {
        return Err(Error::Malformed(format!(
            "operation sends point {x} outside the domain"
        )));
    }
    if phi.is_empty() {
        return Err(Error::Parameter("empty signal space".into()));
    }
    let (matches, mut residual) = match_composites(phi, g.forward());
    let is_phi_op = matches.iter().all(Option::is_some);
    let inverse_matches = g.inverse().map(|inv| {
        let (m, r) = match_composites(phi, inv);
        residual = residual.max(r);
        m
    });
    let is_invertible = is_phi_op
        && inverse_matches
            .as_ref()
            .is_some_and(|m| m.iter().all(Option::is_some));
    Ok(OperationCheck {
        is_phi_op,
        is_invertible,
        matches,
        inverse_matches,
        residual,
    })
}

/// JSON form of a perception pair:
/// `{"points": int, "signals": [[real]], "group": [{"forward": [int]}], "tolerance": real}`.
///
/// `group` lists generators; loading closes it under composition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairFile {
    pub points: usize,
    pub signals: Vec<Vec<f64>>,
    #[serde(default)]
    pub group: Vec<OperationMap>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

/// A signal space Φ on a finite domain X with a group G of invertible
/// Φ-operations. `D_X` is always derived from Φ.
#[derive(Clone, Debug)]
pub struct PerceptionPair {
    domain: DistanceMatrix,
    phi: SignalSpace,
    group: Vec<OperationMap>,
    /// `actions[g][i]` is the member equal to `φ_i ∘ g`.
    actions: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    identity: usize,
}

impl PerceptionPair {
    /// Builds a pair from an explicit group list, which must contain the
    /// identity and be closed under composition and inverses.
    pub fn new(phi: SignalSpace, group: Vec<OperationMap>) -> Result<Self> {
        let mut pair = Self::empty(phi)?;
        for g in group {
            pair.insert(g)?;
        }
        let n = pair.points();
        let id = pair
            .group_index(OperationMap::identity(n).forward())
            .ok_or_else(|| Error::Malformed("group does not contain the identity".into()))?;
        pair.identity = id;
        for a in 0..pair.order() {
            let inv = pair.group[a].inverted().expect("validated bijection");
            if pair.group_index(inv.forward()).is_none() {
                return Err(Error::Malformed(format!("inverse of element {a} is missing")));
            }
            for b in 0..pair.order() {
                if pair.compose(a, b).is_none() {
                    return Err(Error::Malformed(format!(
                        "group not closed: product of elements {a} and {b} is missing"
                    )));
                }
            }
        }
        Ok(pair)
    }

    /// Builds the pair whose group is generated by `gens` (identity included).
    pub fn generated(phi: SignalSpace, gens: Vec<OperationMap>) -> Result<Self> {
        let mut pair = Self::empty(phi)?;
        let n = pair.points();
        pair.insert(OperationMap::identity(n))?;
        let mut gen_ops = Vec::new();
        for (k, g) in gens.into_iter().enumerate() {
            let check = validate_operation(&pair.phi, &g)?;
            if !check.is_invertible {
                return Err(Error::InvalidOperation(format!(
                    "generator {k} is not an invertible Φ-operation (residual {})",
                    check.residual
                )));
            }
            gen_ops.push(g);
        }
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        for g in &gen_ops {
            if pair.group_index(g.forward()).is_none() {
                queue.push_back(pair.insert(g.clone())?);
            }
        }
        while let Some(a) = queue.pop_front() {
            for g in &gen_ops {
                let prod = pair.group[a].compose(g);
                if pair.group_index(prod.forward()).is_none() {
                    if pair.order() >= MAX_GROUP_ORDER {
                        return Err(Error::Parameter(format!(
                            "generated group exceeds {MAX_GROUP_ORDER} elements"
                        )));
                    }
                    queue.push_back(pair.insert(prod)?);
                }
            }
        }
        Ok(pair)
    }

    /// Loads a [`PairFile`], closing its generator list.
    pub fn from_file(file: PairFile) -> Result<Self> {
        let signals = file
            .signals
            .into_iter()
            .map(Signal::new)
            .collect();
        let phi = SignalSpace::new(file.points, signals, file.tolerance)?;
        Self::generated(phi, file.group)
    }

    pub fn to_file(&self) -> PairFile {
        PairFile {
            points: self.points(),
            signals: self.phi.signals().iter().map(|s| s.values().to_vec()).collect(),
            group: self.group.clone(),
            tolerance: self.tolerance(),
        }
    }

    fn empty(phi: SignalSpace) -> Result<Self> {
        let domain = induce_point_metric(&phi)?;
        Ok(PerceptionPair {
            domain,
            phi,
            group: Vec::new(),
            actions: Vec::new(),
            index: HashMap::new(),
            identity: 0,
        })
    }

    fn insert(&mut self, g: OperationMap) -> Result<usize> {
        if let Some(i) = self.group_index(g.forward()) {
            return Ok(i);
        }
        let check = validate_operation(&self.phi, &g)?;
        if !check.is_invertible {
            return Err(Error::InvalidOperation(format!(
                "{:?} is not an invertible Φ-operation (residual {})",
                g.forward(),
                check.residual
            )));
        }
        let i = self.group.len();
        self.actions
            .push(check.matches.into_iter().map(|m| m.expect("checked")).collect());
        self.index.insert(g.forward().to_vec(), i);
        self.group.push(g);
        Ok(i)
    }

    /// The induced `D_X`.
    pub fn domain(&self) -> &DistanceMatrix {
        &self.domain
    }

    pub fn phi(&self) -> &SignalSpace {
        &self.phi
    }

    pub fn group(&self) -> &[OperationMap] {
        &self.group
    }

    pub fn element(&self, g: usize) -> &OperationMap {
        &self.group[g]
    }

    pub fn points(&self) -> usize {
        self.phi.points()
    }

    pub fn order(&self) -> usize {
        self.group.len()
    }

    pub fn tolerance(&self) -> f64 {
        self.phi.tolerance()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    /// Index of the member of Φ equal to `φ_i ∘ g`.
    pub fn act(&self, i: usize, g: usize) -> usize {
        self.actions[g][i]
    }

    /// The permutation of Φ induced by group element `g`.
    pub fn action(&self, g: usize) -> &[usize] {
        &self.actions[g]
    }

    pub fn group_index(&self, forward: &[usize]) -> Option<usize> {
        self.index.get(forward).copied()
    }

    /// Index of `a ∘ b`.
    pub fn compose(&self, a: usize, b: usize) -> Option<usize> {
        self.group_index(self.group[a].compose(&self.group[b]).forward())
    }

    pub fn inverse(&self, a: usize) -> Option<usize> {
        self.group_index(self.group[a].inverse()?)
    }

    /// Validates `g` against this pair's signal space.
    pub fn validate_operation(&self, g: &OperationMap) -> Result<OperationCheck> {
        validate_operation(&self.phi, g)
    }

    /// `d_∞(g, h) = max_x D_X(g(x), h(x))`.
    pub fn sup_point_distance(&self, g: &OperationMap, h: &OperationMap) -> f64 {
        g.forward()
            .iter()
            .zip(h.forward())
            .map(|(&a, &b)| self.domain.get(a, b))
            .fold(0.0, f64::max)
    }

    /// `D_Aut` on the group, evaluated through `d_∞`.
    pub fn group_distance_matrix(&self) -> DistanceMatrix {
        let k = self.order();
        let mut m = DistanceMatrix::zeros(k);
        for a in 0..k {
            for b in a + 1..k {
                let d = self.sup_point_distance(&self.group[a], &self.group[b]);
                m.set(a, b, d);
                m.set(b, a, d);
            }
        }
        m
    }
}

fn check_op(pair: &PerceptionPair, g: &OperationMap) -> Result<()> {
    if g.len() != pair.points() || g.forward().iter().any(|&y| y >= pair.points()) {
        return Err(Error::Malformed("operation is not total on the domain".into()));
    }
    Ok(())
}

/// `D_Aut(g, h) = sup_φ ‖φ∘g − φ∘h‖_∞`, cross-checked against `d_∞(g, h)`.
pub fn aut_distance(pair: &PerceptionPair, g: &OperationMap, h: &OperationMap) -> Result<f64> {
    check_op(pair, g)?;
    check_op(pair, h)?;
    let via_signals = pair
        .phi()
        .signals()
        .iter()
        .map(|s| sup_dist(s.compose(g.forward()).values(), s.compose(h.forward()).values()))
        .fold(0.0, f64::max);
    let via_points = pair.sup_point_distance(g, h);
    if (via_signals - via_points).abs() > pair.tolerance() {
        return Err(Error::Consistency(format!(
            "D_Aut = {via_signals} but d_inf = {via_points}"
        )));
    }
    Ok(via_signals)
}

/// Natural pseudo-distance `d_G(a, b) = min_g ‖a − b∘g‖_∞` over the pair's group.
pub fn natural_pseudo_distance(pair: &PerceptionPair, a: &Signal, b: &Signal) -> Result<f64> {
    natural_pseudo_distance_over(pair.group(), a, b)
}

/// `min_g ‖a − b∘g‖_∞` over an explicit list of operations.
pub fn natural_pseudo_distance_over(group: &[OperationMap], a: &Signal, b: &Signal) -> Result<f64> {
    if group.is_empty() {
        return Err(Error::Parameter("natural pseudo-distance over an empty group".into()));
    }
    if a.len() != b.len() {
        return Err(Error::Shape {
            expected: a.len(),
            found: b.len(),
        });
    }
    let mut best = f64::INFINITY;
    for g in group {
        if g.len() != a.len() {
            return Err(Error::Shape {
                expected: a.len(),
                found: g.len(),
            });
        }
        let d = a
            .values()
            .iter()
            .zip(g.forward())
            .map(|(x, &gx)| (x - b.values()[gx]).abs())
            .fold(0.0, f64::max);
        best = best.min(d);
    }
    Ok(best)
}

/// Whether `D_X` separates points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Separation {
    pub separated: bool,
    pub witness: Option<(usize, usize)>,
}

pub fn separation_check(pair: &PerceptionPair) -> Separation {
    let d = pair.domain();
    let tol = pair.tolerance();
    for i in 0..d.n() {
        for j in i + 1..d.n() {
            if d.get(i, j) <= tol {
                return Separation {
                    separated: false,
                    witness: Some((i, j)),
                };
            }
        }
    }
    Separation {
        separated: true,
        witness: None,
    }
}
