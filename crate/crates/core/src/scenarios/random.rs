use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geneo::{Geneo, GeneoSpace, Homomorphism};
use crate::perception::{OperationMap, PerceptionPair, Signal, SignalSpace};
use crate::DEFAULT_TOLERANCE;

pub const MAX_RANDOM_DOMAIN: usize = 16;
pub const MAX_RANDOM_SIGNALS: usize = 32;

/// A random permutation made of cycles of length at most 4 whose order does
/// not exceed `max_order`.
fn random_permutation(rng: &mut ChaCha8Rng, n: usize, max_order: usize) -> Vec<usize> {
    let mut points: Vec<usize> = (0..n).collect();
    points.shuffle(rng);
    let lengths = loop {
        let mut lengths = Vec::new();
        let mut left = n;
        while left > 0 {
            let l = rng.gen_range(1..=left.min(4));
            lengths.push(l);
            left -= l;
        }
        if lengths.iter().fold(1, |acc: usize, &l| acc.lcm(&l)) <= max_order.max(1) {
            break lengths;
        }
    };
    let mut forward: Vec<usize> = (0..n).collect();
    let mut start = 0;
    for l in lengths {
        let cycle = &points[start..start + l];
        for k in 0..l {
            forward[cycle[k]] = cycle[(k + 1) % l];
        }
        start += l;
    }
    forward
}

fn orbit(base: &[f64], sigma: &[usize]) -> Vec<Vec<f64>> {
    let mut out = vec![base.to_vec()];
    loop {
        let next: Vec<f64> = sigma.iter().map(|&x| out.last().unwrap()[x]).collect();
        if next == out[0] {
            return out;
        }
        out.push(next);
    }
}

/// Random values in `[lo, hi)`, optionally rounded to `levels` steps.
fn random_signal(rng: &mut ChaCha8Rng, n: usize, range: (f64, f64), levels: Option<u32>) -> Vec<f64> {
    let (lo, hi) = range;
    (0..n)
        .map(|_| match levels {
            Some(l) if l > 0 => lo + (hi - lo) * rng.gen_range(0..=l) as f64 / l as f64,
            _ => rng.gen_range(lo..hi),
        })
        .collect()
}

fn check_sizes(domain: usize, signals: usize, range: (f64, f64)) -> Result<()> {
    if domain == 0 || domain > MAX_RANDOM_DOMAIN {
        return Err(Error::Parameter(format!(
            "domain size must be in 1..={MAX_RANDOM_DOMAIN}, got {domain}"
        )));
    }
    if signals == 0 || signals > MAX_RANDOM_SIGNALS {
        return Err(Error::Parameter(format!(
            "signal count must be in 1..={MAX_RANDOM_SIGNALS}, got {signals}"
        )));
    }
    if !(range.0 < range.1) || !range.0.is_finite() || !range.1.is_finite() {
        return Err(Error::Parameter(format!("bad value range {range:?}")));
    }
    Ok(())
}

fn random_pair(
    rng: &mut ChaCha8Rng,
    domain: usize,
    signals: usize,
    range: (f64, f64),
    levels: Option<u32>,
) -> Result<(PerceptionPair, Vec<usize>)> {
    let sigma = random_permutation(rng, domain, signals);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    loop {
        let o = orbit(&random_signal(rng, domain, range, levels), &sigma);
        if !rows.is_empty() && rows.len() + o.len() > signals {
            break;
        }
        rows.extend(o);
        if rows.len() >= signals {
            break;
        }
    }
    let phi = SignalSpace::new(domain, rows.into_iter().map(Signal::new).collect(), DEFAULT_TOLERANCE)?;
    let pair = PerceptionPair::generated(phi, vec![OperationMap::new(sigma.clone())])?;
    Ok((pair, sigma))
}

/// A seeded random pair: Φ is a union of orbits of random signals under a
/// cyclic group generated by a random permutation.
pub fn gen_random_finite(seed: u64, domain: usize, signals: usize, range: (f64, f64)) -> Result<PerceptionPair> {
    check_sizes(domain, signals, range)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(random_pair(&mut rng, domain, signals, range, None)?.0)
}

/// As [`gen_random_finite`], with values rounded to `levels` steps of the
/// range so that ties (and extra symmetries) occur.
pub fn gen_random_quantized(
    seed: u64,
    domain: usize,
    signals: usize,
    range: (f64, f64),
    levels: u32,
) -> Result<PerceptionPair> {
    check_sizes(domain, signals, range)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(random_pair(&mut rng, domain, signals, range, Some(levels))?.0)
}

/// Kinds of random GENEO spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    /// `Y = X`, `H = G`, `T = id`; operators built from shifts and maxima.
    Equivariant,
    /// `Y = X` with trivial `H`; operators are orbit averages and maxima.
    Invariant,
    /// `Y` is a single point; operators take maxima and minima.
    Point,
    /// `Y` is two copies of `X` with `H` acting diagonally.
    TwoCopies,
}

impl SpaceKind {
    pub const ALL: [SpaceKind; 4] = [
        SpaceKind::Equivariant,
        SpaceKind::Invariant,
        SpaceKind::Point,
        SpaceKind::TwoCopies,
    ];
}

type SignalMap = Box<dyn Fn(&[f64]) -> Vec<f64>>;

/// Builds the space whose target signals are exactly the images of the
/// given maps; collectionwise surjective by construction.
fn space_from_maps(
    src: PerceptionPair,
    target_points: usize,
    target_gens: Vec<OperationMap>,
    maps: Vec<SignalMap>,
    hom_of: impl Fn(&PerceptionPair, &PerceptionPair, usize) -> Option<usize>,
    extra: Vec<Vec<f64>>,
) -> Result<GeneoSpace> {
    let images: Vec<Vec<Vec<f64>>> = maps
        .iter()
        .map(|f| src.phi().signals().iter().map(|s| f(s.values())).collect())
        .collect();
    let rows: Vec<Signal> = images
        .iter()
        .flatten()
        .chain(&extra)
        .cloned()
        .map(Signal::new)
        .collect();
    let psi = SignalSpace::new(target_points, rows, src.tolerance())?;
    let dst = PerceptionPair::generated(psi, target_gens)?;
    let operators = images
        .iter()
        .map(|imgs| {
            imgs.iter()
                .map(|v| dst.phi().position(v).expect("image is in Ψ"))
                .collect()
        })
        .map(Geneo::new)
        .collect();
    let table = (0..src.order())
        .map(|g| {
            hom_of(&src, &dst, g)
                .ok_or_else(|| Error::Consistency(format!("no image for group element {g}")))
        })
        .collect::<Result<_>>()?;
    GeneoSpace::new(src, dst, Homomorphism { table }, operators)
}

fn affine(c: f64, b: f64, shift: Vec<usize>) -> SignalMap {
    Box::new(move |v: &[f64]| shift.iter().map(|&x| c * v[x] + b).collect())
}

fn shifted_max(c: f64, b: f64, shift: Vec<usize>) -> SignalMap {
    Box::new(move |v: &[f64]| {
        v.iter()
            .zip(&shift)
            .map(|(&a, &x)| c * a.max(v[x]) + b)
            .collect()
    })
}

fn random_space(rng: &mut ChaCha8Rng, kind: SpaceKind, domain: usize, signals: usize, uncovered: bool) -> Result<GeneoSpace> {
    let (src, sigma) = random_pair(rng, domain, signals, (0.0, 1.0), None)?;
    let group: Vec<Vec<usize>> = src.group().iter().map(|g| g.forward().to_vec()).collect();
    let pick_shift = |rng: &mut ChaCha8Rng| group[rng.gen_range(0..group.len())].clone();
    let n = domain;
    let extra = |rng: &mut ChaCha8Rng, points: usize, gens: &[Vec<usize>]| -> Vec<Vec<f64>> {
        if !uncovered {
            return vec![];
        }
        let base: Vec<f64> = (0..points).map(|_| rng.gen_range(2.0..3.0)).collect();
        match gens.first() {
            Some(s) => orbit(&base, s),
            None => vec![base],
        }
    };
    match kind {
        SpaceKind::Equivariant => {
            let mut maps: Vec<SignalMap> = vec![affine(1.0, 0.0, (0..n).collect())];
            for _ in 0..rng.gen_range(1..=2) {
                let (c, b) = (rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5));
                let s = pick_shift(rng);
                maps.push(if rng.gen_bool(0.5) { affine(c, b, s) } else { shifted_max(c, b, s) });
            }
            let extra = extra(rng, n, std::slice::from_ref(&sigma));
            space_from_maps(
                src,
                n,
                vec![OperationMap::new(sigma)],
                maps,
                |s, d, g| d.group_index(s.element(g).forward()),
                extra,
            )
        }
        SpaceKind::Invariant => {
            let avg: SignalMap = {
                let group = group.clone();
                Box::new(move |v: &[f64]| {
                    (0..v.len())
                        .map(|x| group.iter().map(|g| v[g[x]]).sum::<f64>() / group.len() as f64)
                        .collect()
                })
            };
            let top: SignalMap = {
                let group = group.clone();
                Box::new(move |v: &[f64]| {
                    (0..v.len())
                        .map(|x| group.iter().map(|g| v[g[x]]).fold(f64::NEG_INFINITY, f64::max))
                        .collect()
                })
            };
            let extra = extra(rng, n, &[]);
            space_from_maps(src, n, vec![], vec![avg, top], |_, d, _| Some(d.identity()), extra)
        }
        SpaceKind::Point => {
            let maps: Vec<SignalMap> = vec![
                Box::new(|v: &[f64]| vec![v.iter().copied().fold(f64::NEG_INFINITY, f64::max)]),
                Box::new(|v: &[f64]| vec![v.iter().copied().fold(f64::INFINITY, f64::min)]),
            ];
            let extra = extra(rng, 1, &[]);
            space_from_maps(src, 1, vec![], maps, |_, d, _| Some(d.identity()), extra)
        }
        SpaceKind::TwoCopies => {
            let double = |g: &[usize]| -> Vec<usize> {
                g.iter().copied().chain(g.iter().map(|&x| x + n)).collect()
            };
            let mut maps: Vec<SignalMap> = Vec::new();
            for _ in 0..rng.gen_range(1..=2) {
                let (c, b) = (rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5));
                let s = pick_shift(rng);
                maps.push(Box::new(move |v: &[f64]| {
                    v.iter().copied().chain(s.iter().map(|&x| c * v[x] + b)).collect()
                }));
            }
            let sigma2 = double(&sigma);
            let extra = extra(rng, 2 * n, std::slice::from_ref(&sigma2));
            space_from_maps(
                src,
                2 * n,
                vec![OperationMap::new(sigma2)],
                maps,
                move |s, d, g| d.group_index(&double(s.element(g).forward())),
                extra,
            )
        }
    }
}

/// A seeded, collectionwise surjective GENEO space of the given kind.
pub fn gen_random_geneo_space(seed: u64, kind: SpaceKind, domain: usize, signals: usize) -> Result<GeneoSpace> {
    check_sizes(domain, signals, (0.0, 1.0))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_space(&mut rng, kind, domain, signals, false)
}

/// As [`gen_random_geneo_space`], with target signals no operator reaches.
pub fn gen_non_surjective_space(seed: u64, kind: SpaceKind, domain: usize, signals: usize) -> Result<GeneoSpace> {
    check_sizes(domain, signals, (0.0, 1.0))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_space(&mut rng, kind, domain, signals, true)
}
