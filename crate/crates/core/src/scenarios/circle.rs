use std::f64::consts::TAU;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::compactify::{Presented, PresentedAction};
use crate::error::{Error, Result};
use crate::geneo::{Geneo, GeneoSpace, Homomorphism};
use crate::metric::DensePresentation;
use crate::perception::{OperationMap, PerceptionPair, Signal, SignalSpace};
use crate::DEFAULT_TOLERANCE;

/// An angle measured in turns.
pub type Turn = Ratio<i64>;

/// Reduces an angle into `[0, 1)`.
pub fn normalize(t: Turn) -> Turn {
    let f = t - t.floor();
    if f < Turn::zero() {
        f + Turn::one()
    } else {
        f
    }
}

/// Arc length in radians between two angles.
pub fn geodesic(a: Turn, b: Turn) -> f64 {
    let f = normalize(a - b);
    let short = if f * 2 > Turn::one() { Turn::one() - f } else { f };
    TAU * (*short.numer() as f64) / (*short.denom() as f64)
}

/// `min(geodesic, 1)`: the metric induced on the circle by 1-Lipschitz
/// signals with values in `[0, 1]`.
pub fn circle_distance(a: Turn, b: Turn) -> f64 {
    geodesic(a, b).min(1.0)
}

/// Tent of height 1 and radius 1 radian centered at `center`.
pub fn tent(center: Turn, x: Turn) -> f64 {
    (1.0 - geodesic(x, center)).max(0.0)
}

/// The `rank`-th term of the base-2 van der Corput sequence, starting at 1/2.
fn van_der_corput(rank: usize) -> Turn {
    let mut n = rank as i64 + 1;
    let (mut num, mut den) = (0i64, 1i64);
    while n > 0 {
        num = 2 * num + (n & 1);
        den *= 2;
        n >>= 1;
    }
    Turn::new(num, den)
}

/// The circle presented by a grid of `m` sample angles followed by every
/// dyadic angle; rotations act by exact addition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CirclePresentation {
    m: i64,
}

impl CirclePresentation {
    pub fn new(m: usize) -> Self {
        CirclePresentation { m: m as i64 }
    }

    pub fn grid(&self) -> usize {
        self.m as usize
    }
}

impl DensePresentation for CirclePresentation {
    type Point = Turn;

    fn point(&self, rank: usize) -> Option<Turn> {
        if (rank as i64) < self.m {
            Some(Turn::new(rank as i64, self.m))
        } else {
            Some(van_der_corput(rank - self.m as usize))
        }
    }

    fn distance(&self, a: &Turn, b: &Turn) -> f64 {
        circle_distance(*a, *b)
    }

    fn sample_len(&self) -> usize {
        self.m as usize
    }
}

impl PresentedAction for CirclePresentation {
    type Op = Turn;

    fn lift(&self, forward: &[usize]) -> Option<Turn> {
        let m = self.m as usize;
        if forward.len() != m {
            return None;
        }
        let s = forward[0];
        forward
            .iter()
            .enumerate()
            .all(|(i, &y)| y == (i + s) % m)
            .then(|| Turn::new(s as i64, self.m))
    }

    fn act(&self, op: &Turn, p: &Turn) -> Turn {
        normalize(p + op)
    }

    fn compose(&self, outer: &Turn, inner: &Turn) -> Turn {
        normalize(outer + inner)
    }

    fn inverse(&self, op: &Turn) -> Turn {
        normalize(-op)
    }

    fn identity(&self) -> Turn {
        Turn::zero()
    }
}

/// Rotation by `1/d` turn for each denominator.
pub fn rotations(denoms: &[i64]) -> Result<Vec<Turn>> {
    denoms
        .iter()
        .map(|&d| {
            if d < 1 {
                Err(Error::Parameter(format!("denominator must be >= 1, got {d}")))
            } else {
                Ok(normalize(Turn::new(1, d)))
            }
        })
        .collect()
}

/// Tent signals on an `m`-point grid under the rotations `1/d` turn.
#[derive(Clone, Debug)]
pub struct CircleScenario {
    pub m: usize,
    pub denoms: Vec<i64>,
    pub eps: f64,
    pub pair: PerceptionPair,
    pub presentation: CirclePresentation,
    /// Rotations by `1/d` turn, used to saturate group closures.
    pub generators: Vec<Turn>,
    /// Largest gap between the induced grid metric and `min(geodesic, 1)`.
    pub resolution_gap: f64,
}

/// Builds the circle scenario. Every denominator must divide `m` so that the
/// grid is preserved.
pub fn gen_circle(m: usize, denoms: &[i64], eps: f64) -> Result<CircleScenario> {
    if m < 4 {
        return Err(Error::Parameter(format!("grid size must be >= 4, got {m}")));
    }
    if denoms.is_empty() {
        return Err(Error::Parameter("at least one rotation denominator is required".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Parameter(format!("eps must be > 0, got {eps}")));
    }
    let generators = rotations(denoms)?;
    if let Some(&d) = denoms.iter().find(|&&d| m as i64 % d != 0) {
        return Err(Error::Parameter(format!(
            "rotation by 1/{d} turn does not preserve a grid of {m} points"
        )));
    }
    let grid: Vec<Turn> = (0..m as i64).map(|k| Turn::new(k, m as i64)).collect();
    let signals = grid
        .iter()
        .map(|&c| Signal::new(grid.iter().map(|&x| tent(c, x)).collect()))
        .collect();
    let phi = SignalSpace::new(m, signals, DEFAULT_TOLERANCE)?;
    let gens = denoms
        .iter()
        .map(|&d| {
            let s = m / d as usize;
            OperationMap::new((0..m).map(|i| (i + s) % m).collect())
        })
        .collect();
    let pair = PerceptionPair::generated(phi, gens)?;

    let mut gap = 0.0f64;
    for (i, &a) in grid.iter().enumerate() {
        for (k, &b) in grid.iter().enumerate() {
            gap = gap.max((pair.domain().get(i, k) - circle_distance(a, b)).abs());
        }
    }
    if gap > pair.tolerance() {
        return Err(Error::Consistency(format!(
            "tent metric deviates from min(geodesic, 1) by {gap} on the grid"
        )));
    }
    Ok(CircleScenario {
        m,
        denoms: denoms.to_vec(),
        eps,
        pair,
        presentation: CirclePresentation::new(m),
        generators,
        resolution_gap: gap,
    })
}

impl CircleScenario {
    /// Angle of grid rotation `g` of the pair.
    pub fn angle(&self, g: usize) -> Turn {
        self.presentation
            .lift(self.pair.element(g).forward())
            .expect("grid rotation")
    }

    /// The presentation with the scenario generators plus rotations by `1/d`
    /// turn for `extra` denominators (which need not divide `m`).
    pub fn presented(&self, extra: &[i64]) -> Result<Presented<CirclePresentation>> {
        let mut gens = self.generators.clone();
        for r in rotations(extra)? {
            if !gens.contains(&r) {
                gens.push(r);
            }
        }
        Ok(Presented::new(self.presentation.clone(), gens))
    }

    /// Operators `F_a(φ) = φ ∘ ρ_a` for grid shifts `a` (in grid steps), with
    /// `Ψ = Φ`, `H = G` and `T = id`.
    pub fn rotation_space(&self, shifts: &[usize]) -> Result<GeneoSpace> {
        let m = self.m;
        // tent index c is centered at c/m, and φ_c ∘ ρ_a = φ_{c−a}
        let operators = shifts
            .iter()
            .map(|&a| Geneo::new((0..m).map(|c| (c + m - a % m) % m).collect()))
            .collect();
        GeneoSpace::new(
            self.pair.clone(),
            self.pair.clone(),
            Homomorphism::identity(self.pair.order()),
            operators,
        )
    }

    /// Eight evenly spread shifts (or every shift when `m < 8`).
    pub fn default_shifts(&self) -> Vec<usize> {
        let k = self.m.min(8);
        (0..k).map(|i| i * self.m / k).collect()
    }
}
