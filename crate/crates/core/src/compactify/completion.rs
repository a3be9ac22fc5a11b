use serde::Serialize;

use super::PresentedAction;
use crate::error::{Error, Result};
use crate::metric::{completion_net_with, CompletionApprox, CompletionOptions, DistanceMatrix};
use crate::perception::{OperationMap, PerceptionPair, Signal, SignalSpace};

/// A signal extended from the sample to the completion net.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtendedSignal {
    pub values: Vec<f64>,
    pub eps: f64,
    /// Index of the source signal in Φ, when it came from one.
    pub origin: Option<usize>,
}

/// A group element transported to the completion net.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedOperation<Op> {
    /// Exact operation on descriptors.
    pub op: Op,
    /// Net index map obtained by snapping exact images.
    pub map: Vec<usize>,
    /// Largest snapping distance.
    pub snap: f64,
    pub bijective: bool,
    /// Index of the source group element, when it came from one.
    pub origin: Option<usize>,
}

fn is_bijection(map: &[usize]) -> bool {
    let mut seen = vec![false; map.len()];
    map.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
}

/// A perception pair together with a certified net of its completion, the
/// extended signal space Φ̂ and the induced group Ĝ.
#[derive(Clone, Debug)]
pub struct CompletionPair<P: PresentedAction> {
    presentation: P,
    pair: PerceptionPair,
    xhat: CompletionApprox<P::Point>,
    /// Per net point: nearest sample index and its distance.
    representative: Vec<(usize, f64)>,
    phihat: SignalSpace,
    ghat: Vec<InducedOperation<P::Op>>,
    delta: f64,
}

impl<P: PresentedAction + Clone> CompletionPair<P> {
    /// Builds the completion net at `eps`, extends every signal of the pair and
    /// induces every group element with snapping tolerance `delta`.
    pub fn build(
        pair: &PerceptionPair,
        presentation: &P,
        eps: f64,
        delta: f64,
        opts: &CompletionOptions,
        force: bool,
    ) -> Result<Self> {
        if presentation.sample_len() != pair.points() {
            return Err(Error::Shape {
                expected: pair.points(),
                found: presentation.sample_len(),
            });
        }
        let xhat = completion_net_with(presentation, eps, opts)?;
        if !xhat.saturated && !force {
            return Err(Error::Unsaturated {
                explored: xhat.explored(),
            });
        }
        let samples: Vec<P::Point> = xhat.sample_embedding.iter().map(|&i| xhat.points[i].clone()).collect();
        let representative = xhat
            .points
            .iter()
            .map(|p| {
                samples
                    .iter()
                    .enumerate()
                    .map(|(s, q)| (s, presentation.distance(p, q)))
                    .fold((0, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best })
            })
            .collect();
        let mut comp = CompletionPair {
            presentation: presentation.clone(),
            pair: pair.clone(),
            xhat,
            representative,
            phihat: SignalSpace::new(0, vec![], pair.tolerance())?,
            ghat: Vec::new(),
            delta,
        };
        let extended = pair
            .phi()
            .signals()
            .iter()
            .map(|s| comp.extend_signal(s, true).map(|e| Signal::new(e.values)))
            .collect::<Result<Vec<_>>>()?;
        comp.phihat = SignalSpace::new(comp.len(), extended, pair.tolerance())?;
        if comp.phihat.len() != pair.phi().len() {
            return Err(Error::Consistency("extension identified two distinct signals".into()));
        }
        comp.ghat = pair
            .group()
            .iter()
            .map(|g| comp.induce_operation(g))
            .collect::<Result<_>>()?;
        Ok(comp)
    }

    pub fn presentation(&self) -> &P {
        &self.presentation
    }

    pub fn pair(&self) -> &PerceptionPair {
        &self.pair
    }

    pub fn approx(&self) -> &CompletionApprox<P::Point> {
        &self.xhat
    }

    /// Number of net points.
    pub fn len(&self) -> usize {
        self.xhat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xhat.is_empty()
    }

    pub fn eps(&self) -> f64 {
        self.xhat.eps
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Oracle distances on the net.
    pub fn space(&self) -> &DistanceMatrix {
        &self.xhat.space
    }

    /// The inclusion `j`: sample index to net index.
    pub fn j(&self, i: usize) -> usize {
        self.xhat.sample_embedding[i]
    }

    /// Largest distance from a net point to its nearest sample point.
    pub fn density(&self) -> f64 {
        self.representative.iter().map(|r| r.1).fold(0.0, f64::max)
    }

    /// True when the net is exactly the embedded sample.
    pub fn is_sample_net(&self) -> bool {
        self.len() == self.pair.points()
    }

    /// The extended signal space Φ̂, index-aligned with Φ.
    pub fn phihat(&self) -> &SignalSpace {
        &self.phihat
    }

    /// The induced group Ĝ, index-aligned with G.
    pub fn ghat(&self) -> &[InducedOperation<P::Op>] {
        &self.ghat
    }

    /// Extends a signal on the sample by nearest-sample values.
    ///
    /// Refused on an unsaturated completion unless `force` is set.
    pub fn extend_signal(&self, phi: &Signal, force: bool) -> Result<ExtendedSignal> {
        if phi.len() != self.pair.points() {
            return Err(Error::Shape {
                expected: self.pair.points(),
                found: phi.len(),
            });
        }
        if !self.xhat.saturated && !force {
            return Err(Error::Unsaturated {
                explored: self.xhat.explored(),
            });
        }
        Ok(ExtendedSignal {
            values: self.representative.iter().map(|&(s, _)| phi.values()[s]).collect(),
            eps: self.eps(),
            origin: self.pair.phi().position(phi.values()),
        })
    }

    /// Transports an exact operation to a net map.
    pub fn induce_op(&self, op: &P::Op) -> Result<InducedOperation<P::Op>> {
        let mut snap = 0.0f64;
        let mut map = Vec::with_capacity(self.len());
        for p in &self.xhat.points {
            let image = self.presentation.act(op, p);
            let (k, d) = self.xhat.nearest(&image, &self.presentation);
            snap = snap.max(d);
            map.push(k);
        }
        if snap > self.delta {
            return Err(Error::Resolution(format!(
                "snapping distance {snap} exceeds {}; the net is too coarse for {op:?}",
                self.delta
            )));
        }
        let origin = self.lookup_origin(op);
        Ok(InducedOperation {
            op: op.clone(),
            bijective: is_bijection(&map),
            map,
            snap,
            origin,
        })
    }

    fn lookup_origin(&self, op: &P::Op) -> Option<usize> {
        let n = self.pair.points();
        let forward: Option<Vec<usize>> = (0..n)
            .map(|i| {
                let image = self.presentation.act(op, &self.xhat.points[self.j(i)]);
                let k = self.xhat.index_of(&image)?;
                self.xhat.sample_embedding.iter().position(|&s| s == k)
            })
            .collect();
        let g = self.pair.group_index(&forward?)?;
        // the sample permutation must determine the operation
        let lifted = self.presentation.lift(self.pair.element(g).forward())?;
        (lifted == *op).then_some(g)
    }

    /// Induces a validated group element of the pair.
    pub fn induce_operation(&self, g: &OperationMap) -> Result<InducedOperation<P::Op>> {
        let op = self.presentation.lift(g.forward()).ok_or_else(|| {
            Error::InvalidOperation(format!("{:?} has no lift to the presentation", g.forward()))
        })?;
        for (i, &gi) in g.forward().iter().enumerate() {
            let image = self.presentation.act(&op, &self.xhat.points[self.j(i)]);
            if image != self.xhat.points[self.j(gi)] {
                return Err(Error::InvalidOperation(format!(
                    "lift of {:?} disagrees with the sample at point {i}",
                    g.forward()
                )));
            }
        }
        let mut induced = self.induce_op(&op)?;
        induced.origin = self.pair.group_index(g.forward());
        Ok(induced)
    }

    /// `d_∞` between exact operations, evaluated over the net points.
    pub fn op_distance(&self, a: &P::Op, b: &P::Op) -> f64 {
        self.op_distance_within(a, b, f64::INFINITY).expect("unbounded")
    }

    /// `d_∞(a, b)` if it is at most `limit`, else `None` (with early exit).
    pub fn op_distance_within(&self, a: &P::Op, b: &P::Op, limit: f64) -> Option<f64> {
        let mut worst = 0.0f64;
        for p in &self.xhat.points {
            let d = self
                .presentation
                .distance(&self.presentation.act(a, p), &self.presentation.act(b, p));
            if d > limit {
                return None;
            }
            worst = worst.max(d);
        }
        Some(worst)
    }

    /// `d_∞` between two net maps.
    pub fn map_distance(&self, a: &[usize], b: &[usize]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| self.xhat.space.get(x, y))
            .fold(0.0, f64::max)
    }

    /// The point metric induced on the net by a list of signals over it.
    pub fn induced_net_metric(&self, signals: &[&[f64]]) -> DistanceMatrix {
        let n = self.len();
        let mut m = DistanceMatrix::zeros(n);
        for v in signals {
            for p in 0..n {
                for q in p + 1..n {
                    let d = (v[p] - v[q]).abs();
                    if d > m.get(p, q) {
                        m.set(p, q, d);
                        m.set(q, p, d);
                    }
                }
            }
        }
        m
    }
}

/// `a ∘ b` for net maps.
pub(crate) fn compose_maps(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&x| a[x]).collect()
}

/// `values ∘ map`.
pub(crate) fn precompose(values: &[f64], map: &[usize]) -> Vec<f64> {
    map.iter().map(|&x| values[x]).collect()
}
