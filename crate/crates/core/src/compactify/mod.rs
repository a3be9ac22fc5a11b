//! Compactification of perception pairs and GENEO spaces at a finite
//! resolution `eps`.
//!
//! The pipeline runs on both source and target pairs:
//!
//! 1. a certified ε-net of the completion X̂ with the sample embedded by `j`,
//! 2. signals extended to the net (Φ̂) and group elements transported to net
//!    maps (Ĝ),
//! 3. closures Φ̄̂ and Ḡ̂ represented by ε-nets,
//! 4. operators F̂, F̄̂ and the extended homomorphism T̄̂,
//! 5. a report with one residual per condition, each with its bound.

mod closure;
mod completion;
mod operators;
mod report;

pub use closure::{closure_group, closure_signals, ClosedGroup, ClosedSignalSpace};
pub use completion::{CompletionPair, ExtendedSignal, InducedOperation};
pub use operators::{
    extend_geneo, extend_homomorphism, induce_geneo, ExtendedGeneo, ExtendedHom, InducedGeneo,
};
pub use report::{
    exact_resolution, verify_compactification, verify_finite, CompactificationReport, Condition,
    NetSizes, Profiles,
};

use std::fmt::Debug;
use std::hash::Hash;

use crate::metric::{CompletionOptions, DensePresentation, DistanceMatrix};
use crate::perception::PerceptionPair;
use crate::DEFAULT_TOLERANCE;

/// A dense presentation on which group elements act by exact descriptor
/// transport.
pub trait PresentedAction: DensePresentation {
    type Op: Clone + Debug + Eq + Hash;

    /// Recognizes a permutation of the sample as an operation, if it is one.
    fn lift(&self, forward: &[usize]) -> Option<Self::Op>;

    fn act(&self, op: &Self::Op, p: &Self::Point) -> Self::Point;

    /// `outer ∘ inner`.
    fn compose(&self, outer: &Self::Op, inner: &Self::Op) -> Self::Op;

    fn inverse(&self, op: &Self::Op) -> Self::Op;

    fn identity(&self) -> Self::Op;
}

/// A finite domain presented by itself: every point is a sample point.
#[derive(Clone, Debug)]
pub struct FiniteDomain {
    d: DistanceMatrix,
}

impl FiniteDomain {
    pub fn new(d: DistanceMatrix) -> Self {
        FiniteDomain { d }
    }

    pub fn of(pair: &PerceptionPair) -> Self {
        FiniteDomain::new(pair.domain().clone())
    }
}

impl DensePresentation for FiniteDomain {
    type Point = usize;

    fn point(&self, rank: usize) -> Option<usize> {
        (rank < self.d.n()).then_some(rank)
    }

    fn distance(&self, a: &usize, b: &usize) -> f64 {
        self.d.get(*a, *b)
    }

    fn sample_len(&self) -> usize {
        self.d.n()
    }
}

impl PresentedAction for FiniteDomain {
    type Op = Vec<usize>;

    fn lift(&self, forward: &[usize]) -> Option<Vec<usize>> {
        let n = self.d.n();
        let mut seen = vec![false; n];
        for &y in forward {
            if y >= n || std::mem::replace(&mut seen[y], true) {
                return None;
            }
        }
        (forward.len() == n).then(|| forward.to_vec())
    }

    fn act(&self, op: &Vec<usize>, p: &usize) -> usize {
        op[*p]
    }

    fn compose(&self, outer: &Vec<usize>, inner: &Vec<usize>) -> Vec<usize> {
        inner.iter().map(|&x| outer[x]).collect()
    }

    fn inverse(&self, op: &Vec<usize>) -> Vec<usize> {
        let mut inv = vec![0; op.len()];
        for (x, &y) in op.iter().enumerate() {
            inv[y] = x;
        }
        inv
    }

    fn identity(&self) -> Vec<usize> {
        (0..self.d.n()).collect()
    }
}

/// A presentation together with the generators used to saturate the group
/// closure. An empty generator list means "use every induced group element".
#[derive(Clone, Debug)]
pub struct Presented<P: PresentedAction> {
    pub presentation: P,
    pub generators: Vec<P::Op>,
}

impl<P: PresentedAction> Presented<P> {
    pub fn new(presentation: P, generators: Vec<P::Op>) -> Self {
        Presented {
            presentation,
            generators,
        }
    }
}

impl Presented<FiniteDomain> {
    pub fn finite(pair: &PerceptionPair) -> Self {
        Presented::new(FiniteDomain::of(pair), Vec::new())
    }
}

/// Parameters of the compactification pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct CompactifyConfig {
    pub eps: f64,
    /// Snapping tolerance for induced operations; defaults to `eps`.
    pub delta: Option<f64>,
    pub tolerance: f64,
    pub completion: CompletionOptions,
    /// Maximum size of a group closure.
    pub group_cap: usize,
    /// Proceed with unsaturated completions.
    pub force: bool,
    /// Radii for the compactness profiles; defaults to `8, 4, 2, 1` times eps.
    pub schedule: Option<Vec<f64>>,
    /// Maximum number of pairs sampled by the pairwise closure checks.
    pub pair_cap: usize,
    /// Maximum number of group pairs sampled for the hyperspace check.
    pub hyperspace_cap: usize,
}

impl CompactifyConfig {
    pub fn new(eps: f64) -> Self {
        CompactifyConfig {
            eps,
            delta: None,
            tolerance: DEFAULT_TOLERANCE,
            completion: CompletionOptions::default(),
            group_cap: 100_000,
            force: false,
            schedule: None,
            pair_cap: 4096,
            hyperspace_cap: 256,
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(self.eps)
    }

    pub fn schedule(&self) -> Vec<f64> {
        self.schedule
            .clone()
            .unwrap_or_else(|| vec![8.0 * self.eps, 4.0 * self.eps, 2.0 * self.eps, self.eps])
    }
}
