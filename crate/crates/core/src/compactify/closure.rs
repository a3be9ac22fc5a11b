use std::collections::{HashMap, VecDeque};

use super::completion::{CompletionPair, InducedOperation};
use super::PresentedAction;
use crate::error::{Error, Result};
use crate::metric::{greedy_eps_net, DistanceMatrix, EpsNet};
use crate::perception::{Signal, SignalSpace};

/// An ε-net of Φ̂ under the sup metric, standing in for the closure Φ̄̂.
#[derive(Clone, Debug)]
pub struct ClosedSignalSpace {
    /// Net over Φ̂ indices; `coverage[i]` snaps member `i` to a center.
    pub net: EpsNet,
    signals: SignalSpace,
}

impl ClosedSignalSpace {
    pub fn len(&self) -> usize {
        self.net.len()
    }

    pub fn is_empty(&self) -> bool {
        self.net.is_empty()
    }

    pub fn eps(&self) -> f64 {
        self.net.eps
    }

    /// Φ̂ index of center `k`.
    pub fn center(&self, k: usize) -> usize {
        self.net.centers[k]
    }

    /// The center signals, in center order.
    pub fn signals(&self) -> &SignalSpace {
        &self.signals
    }

    /// Center position covering Φ̂ member `i`, and its distance.
    pub fn snap_member(&self, i: usize) -> (usize, f64) {
        let (c, d) = self.net.coverage[i];
        let k = self.net.centers.iter().position(|&x| x == c).expect("certified center");
        (k, d)
    }

    /// Nearest center to arbitrary values.
    pub fn nearest(&self, values: &[f64]) -> (usize, f64) {
        self.signals.nearest(values).expect("nonempty closure")
    }
}

/// Greedy ε-net of the extended signals under the sup metric.
pub fn closure_signals(phihat: &SignalSpace, eps: f64) -> Result<ClosedSignalSpace> {
    let net = greedy_eps_net(&phihat.distance_matrix(), eps)?;
    let signals = SignalSpace::new(
        phihat.points(),
        net.centers.iter().map(|&c| phihat.get(c).clone()).collect::<Vec<Signal>>(),
        0.0,
    )?;
    Ok(ClosedSignalSpace { net, signals })
}

/// A finite list of exact operations standing in for the closure Ḡ̂.
#[derive(Clone, Debug)]
pub struct ClosedGroup<Op> {
    pub elements: Vec<InducedOperation<Op>>,
    pub generators: Vec<Op>,
    pub eps: f64,
    /// False when the element cap stopped the saturation.
    pub saturated: bool,
    index: HashMap<Op, usize>,
    by_origin: HashMap<usize, usize>,
}

impl<Op: Clone + std::fmt::Debug + Eq + std::hash::Hash> ClosedGroup<Op> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, k: usize) -> &InducedOperation<Op> {
        &self.elements[k]
    }

    pub fn index_of(&self, op: &Op) -> Option<usize> {
        self.index.get(op).copied()
    }

    /// Closure index of the induced element coming from group element `g`.
    pub fn by_origin(&self, g: usize) -> Option<usize> {
        self.by_origin.get(&g).copied()
    }

    /// Nearest listed element in `d_∞` and its distance.
    pub fn nearest<P>(&self, op: &Op, comp: &CompletionPair<P>) -> (usize, f64)
    where
        P: PresentedAction<Op = Op> + Clone,
    {
        if let Some(k) = self.index_of(op) {
            return (k, 0.0);
        }
        let mut best = (0, f64::INFINITY);
        for (k, e) in self.elements.iter().enumerate() {
            if let Some(d) = comp.op_distance_within(op, &e.op, best.1) {
                if d < best.1 {
                    best = (k, d);
                }
            }
        }
        best
    }

    /// `d_∞` matrix over the listed elements (exact images on the net).
    pub fn distance_matrix<P>(&self, comp: &CompletionPair<P>) -> DistanceMatrix
    where
        P: PresentedAction<Op = Op> + Clone,
    {
        let n = self.len();
        let mut m = DistanceMatrix::zeros(n);
        for a in 0..n {
            for b in a + 1..n {
                let d = comp.op_distance(&self.elements[a].op, &self.elements[b].op);
                m.set(a, b, d);
                m.set(b, a, d);
            }
        }
        m
    }

    /// Worst distance from the identity, from products and from inverses to
    /// the nearest listed element.
    pub fn invariant_residual<P>(&self, comp: &CompletionPair<P>) -> f64
    where
        P: PresentedAction<Op = Op> + Clone,
    {
        let pres = comp.presentation();
        let mut worst = self.nearest(&pres.identity(), comp).1;
        for a in &self.elements {
            worst = worst.max(self.nearest(&pres.inverse(&a.op), comp).1);
            for b in &self.elements {
                worst = worst.max(self.nearest(&pres.compose(&a.op, &b.op), comp).1);
            }
        }
        worst
    }
}

/// Saturates the induced group under right multiplication by `gens` and their
/// inverses.
///
/// Every element of Ĝ is listed (deduplicated only exactly); a new product is
/// listed iff it is farther than `eps` in `d_∞` from every listed element.
/// With an empty `gens` the elements of Ĝ are used as generators.
pub fn closure_group<P>(
    comp: &CompletionPair<P>,
    gens: &[P::Op],
    eps: f64,
    cap: usize,
) -> Result<ClosedGroup<P::Op>>
where
    P: PresentedAction + Clone,
{
    if !(eps > 0.0) {
        return Err(Error::Parameter(format!("eps must be > 0, got {eps}")));
    }
    let pres = comp.presentation();
    let mut group = ClosedGroup {
        elements: Vec::new(),
        generators: Vec::new(),
        eps,
        saturated: true,
        index: HashMap::new(),
        by_origin: HashMap::new(),
    };
    let push = |group: &mut ClosedGroup<P::Op>, e: InducedOperation<P::Op>| {
        let k = group.elements.len();
        group.index.insert(e.op.clone(), k);
        if let Some(g) = e.origin {
            group.by_origin.entry(g).or_insert(k);
        }
        group.elements.push(e);
        k
    };
    let identity = comp.induce_op(&pres.identity())?;
    push(&mut group, identity);
    for e in comp.ghat() {
        match group.index_of(&e.op) {
            Some(k) => {
                if let Some(g) = e.origin {
                    group.by_origin.entry(g).or_insert(k);
                }
            }
            None => {
                push(&mut group, e.clone());
            }
        }
    }
    let base: Vec<P::Op> = if gens.is_empty() {
        comp.ghat().iter().map(|e| e.op.clone()).collect()
    } else {
        gens.to_vec()
    };
    for g in &base {
        for h in [g.clone(), pres.inverse(g)] {
            if !group.generators.contains(&h) {
                group.generators.push(h);
            }
        }
    }
    let mut queue: VecDeque<usize> = (0..group.len()).collect();
    'bfs: while let Some(a) = queue.pop_front() {
        for s in 0..group.generators.len() {
            let prod = pres.compose(&group.elements[a].op, &group.generators[s]);
            if group.index_of(&prod).is_some() {
                continue;
            }
            let near = group
                .elements
                .iter()
                .any(|e| comp.op_distance_within(&prod, &e.op, eps).is_some());
            if near {
                continue;
            }
            if group.len() >= cap {
                group.saturated = false;
                break 'bfs;
            }
            let induced = comp.induce_op(&prod)?;
            queue.push_back(push(&mut group, induced));
        }
    }
    Ok(group)
}
