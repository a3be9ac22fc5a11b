//! Group equivariant non-expansive operators between perception pairs, stored
//! extensionally as index tables on the source signal space.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;
use crate::perception::{sup_dist, PairFile, PerceptionPair, Signal};

/// A group homomorphism `T: G → H` as a table of target group indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homomorphism {
    pub table: Vec<usize>,
}

impl Homomorphism {
    /// `T = id` between two pairs sharing the same group list.
    pub fn identity(order: usize) -> Self {
        Homomorphism {
            table: (0..order).collect(),
        }
    }

    /// Sends every element to the target identity.
    pub fn trivial(src: &PerceptionPair, dst: &PerceptionPair) -> Self {
        Homomorphism {
            table: vec![dst.identity(); src.order()],
        }
    }

    /// Matches every source element to the target element with the same
    /// forward map. Requires both pairs to live on the same domain.
    pub fn by_forward(src: &PerceptionPair, dst: &PerceptionPair) -> Result<Self> {
        let table = src
            .group()
            .iter()
            .map(|g| {
                dst.group_index(g.forward()).ok_or_else(|| {
                    Error::Malformed(format!("{:?} is not in the target group", g.forward()))
                })
            })
            .collect::<Result<_>>()?;
        Ok(Homomorphism { table })
    }

    pub fn apply(&self, g: usize) -> usize {
        self.table[g]
    }

    /// Checks totality, `T(id) = id` and `T(gh) = T(g)T(h)`; the returned
    /// residual is the worst `d_∞` mismatch on the target.
    pub fn validate(&self, src: &PerceptionPair, dst: &PerceptionPair) -> Result<f64> {
        if self.table.len() != src.order() {
            return Err(Error::Shape {
                expected: src.order(),
                found: self.table.len(),
            });
        }
        if let Some(&bad) = self.table.iter().find(|&&h| h >= dst.order()) {
            return Err(Error::Malformed(format!(
                "homomorphism maps to element {bad}, target group has {}",
                dst.order()
            )));
        }
        let mut residual = dst.sup_point_distance(
            dst.element(self.apply(src.identity())),
            dst.element(dst.identity()),
        );
        for a in 0..src.order() {
            for b in 0..src.order() {
                let ab = src.compose(a, b).expect("closed group");
                let prod = dst.element(self.apply(a)).compose(dst.element(self.apply(b)));
                residual = residual.max(dst.sup_point_distance(dst.element(self.apply(ab)), &prod));
            }
        }
        Ok(residual)
    }
}

/// An operator `F: Φ → Ψ` as a table of target signal indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Geneo {
    pub table: Vec<usize>,
}

impl Geneo {
    pub fn new(table: Vec<usize>) -> Self {
        Geneo { table }
    }

    pub fn apply(&self, i: usize) -> usize {
        self.table[i]
    }
}

/// Worst-case violations of equivariance and non-expansivity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeneoCheck {
    pub equiv_residual: f64,
    pub exp_residual: f64,
}

impl GeneoCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.equiv_residual <= tol && self.exp_residual <= tol
    }
}

fn check_table(f: &Geneo, src: &PerceptionPair, dst: &PerceptionPair) -> Result<()> {
    if f.table.len() != src.phi().len() {
        return Err(Error::MalformedOperator(format!(
            "table has {} entries, source space has {} signals",
            f.table.len(),
            src.phi().len()
        )));
    }
    if let Some(&bad) = f.table.iter().find(|&&j| j >= dst.phi().len()) {
        return Err(Error::MalformedOperator(format!(
            "table maps to signal {bad}, target space has {}",
            dst.phi().len()
        )));
    }
    Ok(())
}

/// Evaluates `F(φ∘g) = F(φ)∘T(g)` and non-expansivity over all of Φ and G.
pub fn validate_geneo(
    f: &Geneo,
    hom: &Homomorphism,
    src: &PerceptionPair,
    dst: &PerceptionPair,
) -> Result<GeneoCheck> {
    check_table(f, src, dst)?;
    if hom.table.len() != src.order() || hom.table.iter().any(|&h| h >= dst.order()) {
        return Err(Error::Malformed("homomorphism does not fit the pairs".into()));
    }
    let psi = dst.phi();
    let mut equiv = 0.0f64;
    for i in 0..src.phi().len() {
        let image = psi.get(f.apply(i));
        for g in 0..src.order() {
            let lhs = psi.get(f.apply(src.act(i, g)));
            let rhs = image.compose(dst.element(hom.apply(g)).forward());
            equiv = equiv.max(sup_dist(lhs.values(), rhs.values()));
        }
    }
    let mut exp = 0.0f64;
    let phi = src.phi();
    for i in 0..phi.len() {
        for j in i + 1..phi.len() {
            let out = sup_dist(psi.get(f.apply(i)).values(), psi.get(f.apply(j)).values());
            let inp = sup_dist(phi.get(i).values(), phi.get(j).values());
            exp = exp.max(out - inp);
        }
    }
    Ok(GeneoCheck {
        equiv_residual: equiv,
        exp_residual: exp,
    })
}

fn check_pair(f1: &Geneo, f2: &Geneo, dst: &PerceptionPair) -> Result<()> {
    if f1.table.len() != f2.table.len() {
        return Err(Error::Shape {
            expected: f1.table.len(),
            found: f2.table.len(),
        });
    }
    if let Some(&bad) = f1.table.iter().chain(&f2.table).find(|&&j| j >= dst.phi().len()) {
        return Err(Error::MalformedOperator(format!("table maps to missing signal {bad}")));
    }
    Ok(())
}

/// `D_GENEO(F1, F2) = sup_φ ‖F1(φ) − F2(φ)‖_∞`.
pub fn geneo_distance(dst: &PerceptionPair, f1: &Geneo, f2: &Geneo) -> Result<f64> {
    check_pair(f1, f2, dst)?;
    let psi = dst.phi();
    Ok(f1
        .table
        .iter()
        .zip(&f2.table)
        .map(|(&a, &b)| sup_dist(psi.get(a).values(), psi.get(b).values()))
        .fold(0.0, f64::max))
}

/// `D_GENEO,H(F1, F2) = sup_φ d_H(F1(φ), F2(φ))`.
pub fn geneo_distance_natural(dst: &PerceptionPair, f1: &Geneo, f2: &Geneo) -> Result<f64> {
    check_pair(f1, f2, dst)?;
    let mut worst = 0.0f64;
    for (&a, &b) in f1.table.iter().zip(&f2.table) {
        worst = worst.max(natural_by_index(dst, a, b));
    }
    Ok(worst)
}

/// `d_H(ψ_a, ψ_b)` using the precomputed action of H on Ψ.
fn natural_by_index(dst: &PerceptionPair, a: usize, b: usize) -> f64 {
    let psi = dst.phi();
    (0..dst.order())
        .map(|h| sup_dist(psi.get(a).values(), psi.get(dst.act(b, h)).values()))
        .fold(f64::INFINITY, f64::min)
}

/// Result of [`collectionwise_surjective`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Coverage {
    pub covered: bool,
    /// Indices into Ψ of signals no operator reaches.
    pub uncovered: Vec<usize>,
}

/// Result of [`check_hom_nonexpansive`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomExpansion {
    /// `max_{a,b} D_Aut(T a, T b) − D_Aut(a, b)`; never below 0 since `a = b` is included.
    pub max_violation: f64,
    pub witness: Option<(usize, usize)>,
    /// Whether the space is collectionwise surjective.
    pub precondition_holds: bool,
}

/// A finite set of GENEOs between two pairs, all sharing one homomorphism.
#[derive(Clone, Debug)]
pub struct GeneoSpace {
    source: PerceptionPair,
    target: PerceptionPair,
    hom: Homomorphism,
    operators: Vec<Geneo>,
}

impl GeneoSpace {
    /// Validates the homomorphism and every operator.
    pub fn new(
        source: PerceptionPair,
        target: PerceptionPair,
        hom: Homomorphism,
        operators: Vec<Geneo>,
    ) -> Result<Self> {
        let tol = source.tolerance().max(target.tolerance());
        let r = hom.validate(&source, &target)?;
        if r > tol {
            return Err(Error::InvalidOperation(format!(
                "T is not a homomorphism (residual {r})"
            )));
        }
        for (k, f) in operators.iter().enumerate() {
            let c = validate_geneo(f, &hom, &source, &target)?;
            if !c.passes(tol) {
                return Err(Error::MalformedOperator(format!(
                    "operator {k} is not a GENEO (equivariance {}, expansion {})",
                    c.equiv_residual, c.exp_residual
                )));
            }
        }
        Ok(GeneoSpace {
            source,
            target,
            hom,
            operators,
        })
    }

    pub fn source(&self) -> &PerceptionPair {
        &self.source
    }

    pub fn target(&self) -> &PerceptionPair {
        &self.target
    }

    pub fn hom(&self) -> &Homomorphism {
        &self.hom
    }

    pub fn operators(&self) -> &[Geneo] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn tolerance(&self) -> f64 {
        self.source.tolerance().max(self.target.tolerance())
    }

    /// `D_GENEO` between members `a` and `b`.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        geneo_distance(&self.target, &self.operators[a], &self.operators[b]).expect("validated")
    }

    /// `D_GENEO` over all members.
    pub fn distance_matrix(&self) -> DistanceMatrix {
        self.matrix(|a, b| self.distance(a, b))
    }

    /// `D_GENEO,H` over all members.
    pub fn natural_distance_matrix(&self) -> DistanceMatrix {
        self.matrix(|a, b| {
            geneo_distance_natural(&self.target, &self.operators[a], &self.operators[b])
                .expect("validated")
        })
    }

    fn matrix(&self, f: impl Fn(usize, usize) -> f64) -> DistanceMatrix {
        let n = self.len();
        let mut m = DistanceMatrix::zeros(n);
        for a in 0..n {
            for b in a + 1..n {
                let d = f(a, b);
                m.set(a, b, d);
                m.set(b, a, d);
            }
        }
        m
    }

    /// `D_𝓕,Φ(φ_a, φ_b)` for member indices of Φ.
    pub fn signal_distance_by_index(&self, a: usize, b: usize) -> f64 {
        let psi = self.target.phi();
        self.operators
            .iter()
            .map(|f| sup_dist(psi.get(f.apply(a)).values(), psi.get(f.apply(b)).values()))
            .fold(0.0, f64::max)
    }

    /// `D_𝓕,Φ` over the whole source space.
    pub fn signal_distance_matrix(&self) -> DistanceMatrix {
        let n = self.source.phi().len();
        let mut m = DistanceMatrix::zeros(n);
        for a in 0..n {
            for b in a + 1..n {
                let d = self.signal_distance_by_index(a, b);
                m.set(a, b, d);
                m.set(b, a, d);
            }
        }
        m
    }

    /// The file form, with both pairs inlined.
    pub fn to_file(&self) -> GeneoSpaceFile {
        GeneoSpaceFile {
            source: PairRef::Inline(self.source.to_file()),
            target: PairRef::Inline(self.target.to_file()),
            hom: self.hom.table.iter().copied().enumerate().map(|(s, d)| [s, d]).collect(),
            operators: self
                .operators
                .iter()
                .map(|f| OperatorFile {
                    table: f.table.iter().copied().enumerate().map(|(s, d)| [s, d]).collect(),
                })
                .collect(),
        }
    }
}

/// `D_𝓕,Φ(a, b) = sup_F ‖F(a) − F(b)‖_∞`; `a` and `b` must be members of Φ.
pub fn signal_distance_via_geneos(space: &GeneoSpace, a: &Signal, b: &Signal) -> Result<f64> {
    let phi = space.source().phi();
    let locate = |s: &Signal| -> Result<usize> {
        if s.len() != phi.points() {
            return Err(Error::Shape {
                expected: phi.points(),
                found: s.len(),
            });
        }
        let (i, d) = phi.nearest(s.values()).expect("nonempty");
        if d > phi.tolerance() {
            return Err(Error::NotMember { distance: d });
        }
        Ok(i)
    };
    Ok(space.signal_distance_by_index(locate(a)?, locate(b)?))
}

/// Whether every ψ ∈ Ψ is the image of some φ under some operator.
pub fn collectionwise_surjective(space: &GeneoSpace) -> Coverage {
    let psi = space.target().phi();
    let mut hit = vec![false; psi.len()];
    for f in space.operators() {
        for &j in &f.table {
            hit[j] = true;
        }
    }
    // images are members of Ψ, which is deduplicated at τ, so index hits are exact
    let uncovered: Vec<usize> = (0..psi.len()).filter(|&j| !hit[j]).collect();
    Coverage {
        covered: uncovered.is_empty(),
        uncovered,
    }
}

/// Measures how far `T` is from non-expansive under `D_Aut`.
pub fn check_hom_nonexpansive(space: &GeneoSpace) -> HomExpansion {
    let (src, dst) = (space.source(), space.target());
    let mut worst = 0.0f64;
    let mut witness = None;
    for a in 0..src.order() {
        for b in a + 1..src.order() {
            let din = src.sup_point_distance(src.element(a), src.element(b));
            let dout = dst.sup_point_distance(
                dst.element(space.hom().apply(a)),
                dst.element(space.hom().apply(b)),
            );
            if dout - din > worst {
                worst = dout - din;
                witness = Some((a, b));
            }
        }
    }
    HomExpansion {
        max_violation: worst,
        witness,
        precondition_holds: collectionwise_surjective(space).covered,
    }
}

/// Result of [`enumerate_geneos`].
#[derive(Clone, Debug, PartialEq)]
pub struct GeneoEnumeration {
    pub operators: Vec<Geneo>,
    pub tables_checked: usize,
    pub complete: bool,
}

/// Brute-force search over all `|Ψ|^|Φ|` tables for those that are GENEOs
/// with respect to `hom`. At most `cap` tables are checked.
pub fn enumerate_geneos(
    src: &PerceptionPair,
    dst: &PerceptionPair,
    hom: &Homomorphism,
    cap: usize,
) -> Result<GeneoEnumeration> {
    let (n, m) = (src.phi().len(), dst.phi().len());
    let tol = src.tolerance().max(dst.tolerance());
    let mut out = GeneoEnumeration {
        operators: Vec::new(),
        tables_checked: 0,
        complete: true,
    };
    if m == 0 {
        return Ok(out);
    }
    let mut table = vec![0usize; n];
    loop {
        if out.tables_checked >= cap {
            out.complete = false;
            break;
        }
        out.tables_checked += 1;
        let f = Geneo::new(table.clone());
        if validate_geneo(&f, hom, src, dst)?.passes(tol) {
            out.operators.push(f);
        }
        // odometer increment, last position fastest
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            table[k] += 1;
            if table[k] < m {
                break;
            }
            table[k] = 0;
        }
    }
    Ok(out)
}

/// A perception pair given inline or as a path to a pair file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairRef {
    Path(PathBuf),
    Inline(PairFile),
}

impl PairRef {
    /// Loads the pair; relative paths resolve against `base`.
    pub fn load(&self, base: &Path) -> Result<PerceptionPair> {
        let file = match self {
            PairRef::Inline(f) => f.clone(),
            PairRef::Path(p) => {
                let full = if p.is_relative() { base.join(p) } else { p.clone() };
                serde_json::from_str(&std::fs::read_to_string(full)?)?
            }
        };
        PerceptionPair::from_file(file)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorFile {
    pub table: Vec<[usize; 2]>,
}

/// JSON form of a GENEO space:
/// `{"source": pair-ref, "target": pair-ref, "T": [[src, dst]], "operators": [{"table": [[phi, psi]]}]}`.
///
/// Group indices refer to the closed group in generation order: identity
/// first, then the listed generators, then breadth-first products.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneoSpaceFile {
    pub source: PairRef,
    pub target: PairRef,
    #[serde(rename = "T")]
    pub hom: Vec<[usize; 2]>,
    pub operators: Vec<OperatorFile>,
}

fn pairs_to_table(pairs: &[[usize; 2]], len: usize, what: &str) -> Result<Vec<usize>> {
    let mut table = vec![None; len];
    for &[s, d] in pairs {
        let slot = table.get_mut(s).ok_or_else(|| {
            Error::MalformedOperator(format!("{what} entry for index {s} is out of range"))
        })?;
        if slot.replace(d).is_some_and(|old| old != d) {
            return Err(Error::MalformedOperator(format!("{what} maps index {s} twice")));
        }
    }
    table
        .into_iter()
        .enumerate()
        .map(|(s, d)| d.ok_or_else(|| Error::MalformedOperator(format!("{what} misses index {s}"))))
        .collect()
}

impl GeneoSpaceFile {
    pub fn load(&self, base: &Path) -> Result<GeneoSpace> {
        let (source, target, hom, operators) = self.parts(base)?;
        GeneoSpace::new(source, target, hom, operators)
    }

    /// Loads the pairs and tables without checking that the operators are GENEOs.
    pub fn parts(&self, base: &Path) -> Result<(PerceptionPair, PerceptionPair, Homomorphism, Vec<Geneo>)> {
        let source = self.source.load(base)?;
        let target = self.target.load(base)?;
        let hom = Homomorphism {
            table: pairs_to_table(&self.hom, source.order(), "T")?,
        };
        let operators = self
            .operators
            .iter()
            .map(|o| pairs_to_table(&o.table, source.phi().len(), "operator table").map(Geneo::new))
            .collect::<Result<_>>()?;
        Ok((source, target, hom, operators))
    }
}

/// Reads a GENEO space file, resolving pair paths relative to it.
pub fn load_geneo_space(path: &Path) -> Result<GeneoSpace> {
    let file: GeneoSpaceFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    file.load(path.parent().unwrap_or(Path::new(".")))
}
