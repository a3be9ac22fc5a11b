use serde::Serialize;

use super::closure::{ClosedGroup, ClosedSignalSpace};
use super::completion::CompletionPair;
use super::PresentedAction;
use crate::error::{Error, Result};
use crate::geneo::{collectionwise_surjective, Geneo, GeneoSpace};
use crate::perception::SignalSpace;

/// `F̂`: the operator induced on Φ̂, as a table of Ψ̂ indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InducedGeneo {
    pub table: Vec<usize>,
}

impl InducedGeneo {
    pub fn apply(&self, i: usize) -> usize {
        self.table[i]
    }
}

/// `F̂(φ̂) := (F(φ))̂`. Since Φ̂ and Ψ̂ are index-aligned with Φ and Ψ, the
/// table carries over unchanged.
pub fn induce_geneo<P, Q>(
    f: &Geneo,
    src: &CompletionPair<P>,
    dst: &CompletionPair<Q>,
) -> Result<InducedGeneo>
where
    P: PresentedAction + Clone,
    Q: PresentedAction + Clone,
{
    if f.table.len() != src.phihat().len() {
        return Err(Error::MalformedOperator(format!(
            "table has {} entries, Φ̂ has {}",
            f.table.len(),
            src.phihat().len()
        )));
    }
    if let Some(&bad) = f.table.iter().find(|&&j| j >= dst.phihat().len()) {
        return Err(Error::MalformedOperator(format!("table maps to missing signal {bad}")));
    }
    Ok(InducedGeneo {
        table: f.table.clone(),
    })
}

/// `F̄̂`: the operator on the closure net.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtendedGeneo {
    pub fhat: InducedGeneo,
    /// Per source closure center: (target closure center, snapping distance).
    pub table: Vec<(usize, f64)>,
}

impl ExtendedGeneo {
    /// Evaluates `F̄̂` on arbitrary values over the source net: nearest Φ̂
    /// member, then `F̂`, then the certified snap into the target closure.
    pub fn apply(&self, values: &[f64], phihat: &SignalSpace, closed_dst: &ClosedSignalSpace) -> usize {
        let (m, _) = phihat.nearest(values).expect("nonempty Φ̂");
        closed_dst.snap_member(self.fhat.apply(m)).0
    }
}

/// Extends `F̂` to the closure nets.
pub fn extend_geneo(
    fhat: &InducedGeneo,
    closed_src: &ClosedSignalSpace,
    closed_dst: &ClosedSignalSpace,
) -> Result<ExtendedGeneo> {
    let table = (0..closed_src.len())
        .map(|k| {
            let (c, d) = closed_dst.snap_member(fhat.apply(closed_src.center(k)));
            if d > closed_dst.eps() {
                return Err(Error::Resolution(format!(
                    "image of center {k} is {d} from the target closure"
                )));
            }
            Ok((c, d))
        })
        .collect::<Result<_>>()?;
    Ok(ExtendedGeneo {
        fhat: fhat.clone(),
        table,
    })
}

/// `T̄̂`: the homomorphism extended to the closed groups.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtendedHom {
    /// `T` on source group indices.
    pub hom: Vec<usize>,
    /// Source closure index to target closure index.
    pub table: Vec<usize>,
    /// Source group element whose image was used for each closure element.
    pub via: Vec<usize>,
}

fn nearest_induced<P>(comp: &CompletionPair<P>, op: &P::Op) -> usize
where
    P: PresentedAction + Clone,
{
    let mut best = (0, f64::INFINITY);
    for (g, e) in comp.ghat().iter().enumerate() {
        if e.op == *op {
            return g;
        }
        if let Some(d) = comp.op_distance_within(op, &e.op, best.1) {
            if d < best.1 {
                best = (g, d);
            }
        }
    }
    best.0
}

impl ExtendedHom {
    /// `T̄̂` on an arbitrary source operation, as a target closure index.
    pub fn apply<P, Op2>(
        &self,
        op: &P::Op,
        src_comp: &CompletionPair<P>,
        src_closed: &ClosedGroup<P::Op>,
        dst_closed: &ClosedGroup<Op2>,
    ) -> usize
    where
        P: PresentedAction + Clone,
        Op2: Clone + std::fmt::Debug + Eq + std::hash::Hash,
    {
        if let Some(k) = src_closed.index_of(op) {
            return self.table[k];
        }
        let g = nearest_induced(src_comp, op);
        dst_closed.by_origin(self.hom[g]).expect("target closure lists Ĥ")
    }
}

/// Extends `T` to the closures: each closure element goes through its nearest
/// induced element `ĝ` to the listed target element `(T g)̂`.
///
/// Refused unless the space is collectionwise surjective.
pub fn extend_homomorphism<P, Op2>(
    space: &GeneoSpace,
    src_comp: &CompletionPair<P>,
    src_closed: &ClosedGroup<P::Op>,
    dst_closed: &ClosedGroup<Op2>,
) -> Result<ExtendedHom>
where
    P: PresentedAction + Clone,
    Op2: Clone + std::fmt::Debug + Eq + std::hash::Hash,
{
    let coverage = collectionwise_surjective(space);
    if !coverage.covered {
        return Err(Error::Refused {
            reason: format!(
                "space is not collectionwise surjective; uncovered target signals {:?}",
                coverage.uncovered
            ),
            uncovered: coverage.uncovered,
        });
    }
    let hom = space.hom().table.clone();
    let mut table = Vec::with_capacity(src_closed.len());
    let mut via = Vec::with_capacity(src_closed.len());
    for e in &src_closed.elements {
        let g = e.origin.unwrap_or_else(|| nearest_induced(src_comp, &e.op));
        let k = dst_closed.by_origin(hom[g]).ok_or_else(|| {
            Error::Consistency(format!("target closure does not list the image of element {g}"))
        })?;
        via.push(g);
        table.push(k);
    }
    Ok(ExtendedHom { hom, table, via })
}
