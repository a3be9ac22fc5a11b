//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use geneo_core::compactify::{
    closure_group, closure_signals, exact_resolution, induce_geneo, verify_compactification,
    verify_finite, CompactifyConfig, CompletionPair, FiniteDomain,
};
use geneo_core::geneo::{
    check_hom_nonexpansive, collectionwise_surjective, enumerate_geneos, geneo_distance, Geneo,
    GeneoSpace, Homomorphism,
};
use geneo_core::metric::{hausdorff_distance, CompletionOptions, DistanceMatrix};
use geneo_core::perception::{
    aut_distance, enumerate_automorphisms, natural_pseudo_distance, OperationMap, PerceptionPair,
    SignalSpace,
};
use geneo_core::scenarios::{gen_circle, gen_random_finite, gen_random_geneo_space, SpaceKind, Turn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;
const INSTANCES: u64 = 500;

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: usize, title: &str, limit: Duration, check: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = check();
    let elapsed = start.elapsed();
    let pass = out.pass && elapsed <= limit;
    println!(
        "criterion {id} {}: {title}: {} ({:.2} s, limit {} s)",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

/// `max_φ |φ(i) − φ(j)|` computed directly from the signal values.
fn oracle_point_metric(phi: &SignalSpace) -> Vec<Vec<f64>> {
    let n = phi.points();
    let mut d = vec![vec![0.0f64; n]; n];
    for s in phi.signals() {
        let v = s.values();
        for i in 0..n {
            for j in 0..n {
                d[i][j] = d[i][j].max((v[i] - v[j]).abs());
            }
        }
    }
    d
}

/// Largest violation of the pseudo-metric axioms.
fn axiom_residual(d: &DistanceMatrix) -> f64 {
    let n = d.n();
    let mut worst = 0.0f64;
    for i in 0..n {
        worst = worst.max(d.get(i, i).abs());
        for j in 0..n {
            worst = worst.max(-d.get(i, j)).max((d.get(i, j) - d.get(j, i)).abs());
            for k in 0..n {
                worst = worst.max(d.get(i, k) - d.get(i, j) - d.get(j, k));
            }
        }
    }
    worst
}

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn space_for(seed: u64) -> GeneoSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = SpaceKind::ALL[rng.gen_range(0..4)];
    gen_random_geneo_space(seed, kind, rng.gen_range(1..=8), rng.gen_range(1..=12)).unwrap()
}

/// Residuals of the single-pair propositions on one pair.
fn pair_residual(pair: &PerceptionPair) -> f64 {
    let n = pair.points();
    let d = pair.domain();
    let oracle = oracle_point_metric(pair.phi());
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((d.get(i, j) - oracle[i][j]).abs());
        }
    }
    // every signal is non-expansive for D_X
    for s in pair.phi().signals() {
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((s.values()[i] - s.values()[j]).abs() - oracle[i][j]);
            }
        }
    }
    // automorphisms of the pair are D_X isometries and include G
    let auts = enumerate_automorphisms(pair, 1_000_000).unwrap();
    assert!(auts.complete);
    for g in &auts.maps {
        let f = g.forward();
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((oracle[f[i]][f[j]] - oracle[i][j]).abs());
            }
        }
    }
    for g in pair.group() {
        if !auts.maps.contains(g) {
            worst = f64::INFINITY;
        }
    }
    // D_Aut against d_∞ computed from the oracle metric
    for g in pair.group() {
        for h in pair.group() {
            let d_inf = (0..n).map(|x| oracle[g.forward()[x]][h.forward()[x]]).fold(0.0, f64::max);
            worst = worst.max((aut_distance(pair, g, h).unwrap() - d_inf).abs());
        }
    }
    // d_G is a pseudo-metric below D_Φ
    let signals = pair.phi().signals();
    let rows = signals
        .iter()
        .map(|a| signals.iter().map(|b| natural_pseudo_distance(pair, a, b).unwrap()).collect())
        .collect();
    let dg = DistanceMatrix::from_rows(rows).unwrap();
    worst = worst.max(axiom_residual(&dg));
    for (i, a) in signals.iter().enumerate() {
        for (j, b) in signals.iter().enumerate() {
            worst = worst.max(dg.get(i, j) - sup(a.values(), b.values()));
        }
    }
    worst
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for seed in 0..INSTANCES {
        let pair = gen_random_finite(seed, rng.gen_range(1..=8), rng.gen_range(1..=12), (0.0, 1.0)).unwrap();
        worst = worst.max(pair_residual(&pair));
        let space = space_for(seed);
        worst = worst
            .max(pair_residual(space.source()))
            .max(axiom_residual(&space.distance_matrix()))
            .max(axiom_residual(&space.natural_distance_matrix()))
            .max(axiom_residual(&space.signal_distance_matrix()));
    }
    Outcome {
        pass: worst <= TOL,
        detail: format!("{INSTANCES} pairs and spaces, max residual {worst:.3e} <= {TOL:e}"),
    }
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    let mut surjective = true;
    for seed in 0..INSTANCES {
        let space = space_for(seed);
        surjective &= collectionwise_surjective(&space).covered;
        let e = check_hom_nonexpansive(&space);
        surjective &= e.precondition_holds;
        // independent G × G scan with d_∞ from the oracle metrics
        let (src, dst) = (space.source(), space.target());
        let (ds, dt) = (oracle_point_metric(src.phi()), oracle_point_metric(dst.phi()));
        let d_inf = |d: &[Vec<f64>], g: &OperationMap, h: &OperationMap| {
            g.forward().iter().zip(h.forward()).map(|(&a, &b)| d[a][b]).fold(0.0, f64::max)
        };
        let t = &space.hom().table;
        let mut scan = 0.0f64;
        for a in 0..src.order() {
            for b in 0..src.order() {
                let image = d_inf(&dt, dst.element(t[a]), dst.element(t[b]));
                scan = scan.max(image - d_inf(&ds, src.element(a), src.element(b)));
            }
        }
        worst = worst.max(e.max_violation).max(scan);
    }
    Outcome {
        pass: surjective && worst <= TOL,
        detail: format!("{INSTANCES} surjective spaces, max violation {worst:.3e} <= {TOL:e}"),
    }
}

fn criterion_3() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut pairs = 0usize;
    for seed in 0..INSTANCES {
        let space = space_for(seed);
        for pair in [space.source(), space.target()] {
            let dphi = pair.phi().distance_matrix();
            let orbit = |g: usize| (0..pair.phi().len()).map(|i| pair.act(i, g)).collect::<Vec<_>>();
            for g in 0..pair.order() {
                for h in 0..pair.order() {
                    let haus = hausdorff_distance(&orbit(g), &orbit(h), &dphi).unwrap();
                    let d_inf = pair.sup_point_distance(pair.element(g), pair.element(h));
                    worst = worst.max(haus - d_inf);
                    pairs += 1;
                }
            }
        }
    }
    Outcome {
        pass: worst <= TOL,
        detail: format!("{pairs} group pairs, max excess of Hausdorff over d_inf {worst:.3e}"),
    }
}

fn criterion_4() -> Outcome {
    let mut checked = 0;
    let mut refused = 0;
    let mut failures = Vec::new();
    let mut slowest = Duration::ZERO;
    for seed in 0..100u64 {
        let space = space_for(seed);
        let eps = exact_resolution(&space);
        let start = Instant::now();
        let report = match verify_finite(&space, &CompactifyConfig::new(eps)) {
            Ok(r) => r,
            Err(e) if e.to_string().contains("separat") => {
                refused += 1;
                continue;
            }
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        checked += 1;
        let mut ok = report.exact && report.conditions.iter().all(|c| c.residual == 0.0);
        // every net equals its input set
        for pair in [space.source(), space.target()] {
            let c = CompletionPair::build(pair, &FiniteDomain::of(pair), eps, eps, &CompletionOptions::default(), false).unwrap();
            ok &= c.is_sample_net() && c.len() == pair.points();
            ok &= closure_signals(c.phihat(), eps).unwrap().len() == pair.phi().len();
            ok &= closure_group(&c, &[], eps, 100_000).unwrap().len() == pair.order();
            for (phi, ext) in pair.phi().signals().iter().zip(c.phihat().signals()) {
                ok &= phi.values() == ext.values();
            }
        }
        ok &= report.net_sizes.phi_bar == space.source().phi().len()
            && report.net_sizes.g_bar == space.source().order()
            && report.net_sizes.f_bar == distinct_operators(&space);
        slowest = slowest.max(start.elapsed());
        if !ok {
            failures.push(format!("seed {seed}: {:?}", report.failures()));
        }
    }
    Outcome {
        pass: failures.is_empty() && slowest <= Duration::from_secs(5) && checked > 0,
        detail: format!(
            "{checked} exact spaces with every residual 0 and nets equal to inputs, {refused} non-separating refused, slowest {:.3} s{}",
            slowest.as_secs_f64(),
            failures.first().map(|f| format!(", first failure {f}")).unwrap_or_default()
        ),
    }
}

fn distinct_operators(space: &GeneoSpace) -> usize {
    let mut tables: Vec<&Vec<usize>> = space.operators().iter().map(|f| &f.table).collect();
    tables.sort();
    tables.dedup();
    tables.len()
}

fn criterion_5() -> Outcome {
    let s = gen_circle(64, &[64], 0.01).unwrap();
    let dyadic: Vec<i64> = (1..=12).map(|k| 1i64 << k).collect();
    let p = s.presented(&dyadic).unwrap();
    let c = CompletionPair::build(&s.pair, &p.presentation, 0.01, 0.01, &CompletionOptions::default(), false).unwrap();
    let schedule = [0.08, 0.04, 0.02, 0.01];
    let mut sizes = Vec::new();
    let mut saturated = true;
    let mut finest = None;
    for &eps in &schedule {
        let g = closure_group(&c, &p.generators, eps, 100_000).unwrap();
        saturated &= g.saturated;
        sizes.push(g.len());
        finest = Some(g);
    }
    let g = finest.unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4096);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let k = rng.gen_range(0..4096i64);
        worst = worst.max(g.nearest(&Turn::new(k, 4096), &c).1);
    }
    // halving eps must at least double the net size, up to 5%
    let linear = sizes.windows(2).all(|w| w[1] as f64 >= 1.9 * w[0] as f64);
    Outcome {
        pass: saturated && worst <= 0.01 && linear,
        detail: format!(
            "closure sizes {sizes:?} over eps {schedule:?}, 1000 dyadic rotations within {worst:.4} <= 0.01"
        ),
    }
}

fn criterion_6() -> Outcome {
    let s = gen_circle(64, &[64], 0.05).unwrap();
    let dyadic: Vec<i64> = (1..=12).map(|k| 1i64 << k).collect();
    let p = s.presented(&dyadic).unwrap();
    let space = s.rotation_space(&s.default_shifts()).unwrap();
    let report = verify_compactification(&space, &p, &p, &CompactifyConfig::new(0.05)).unwrap();
    let ladder = ["ExtSgIso", "kiso", "f1Iso", "f2Iso", "ComGN4"];
    let commuting = ["ComSg", "ComBj", "ComGN1", "ComGN2", "ComGNT", "ComGNF"];
    let mut worst = 0.0f64;
    let mut ok = report.passed();
    for name in ladder {
        let c = report.condition(name).expect("listed condition");
        worst = worst.max(c.residual);
        ok &= c.residual <= 0.1;
    }
    for name in commuting {
        ok &= report.condition(name).is_some_and(|c| c.pass);
    }
    Outcome {
        pass: ok,
        detail: format!(
            "M = 64, eps = 0.05: isometry ladder max residual {worst:.3e} <= 0.1, {} of {} conditions within bounds",
            report.conditions.len() - report.failures().len(),
            report.conditions.len()
        ),
    }
}

/// All tables `Φ → Ψ` that are equivariant and non-expansive, by direct
/// evaluation of signal values.
fn oracle_geneos(src: &PerceptionPair, dst: &PerceptionPair, t: &[usize]) -> Vec<Vec<usize>> {
    let (phi, psi) = (src.phi().signals(), dst.phi().signals());
    let mut found = Vec::new();
    for code in 0..psi.len().pow(phi.len() as u32) {
        let table: Vec<usize> = (0..phi.len()).map(|i| code / psi.len().pow((phi.len() - 1 - i) as u32) % psi.len()).collect();
        let mut ok = true;
        for (i, a) in phi.iter().enumerate() {
            for (j, b) in phi.iter().enumerate() {
                ok &= sup(psi[table[i]].values(), psi[table[j]].values()) <= sup(a.values(), b.values()) + TOL;
            }
            for (g, op) in src.group().iter().enumerate() {
                let moved = a.compose(op.forward());
                let k = phi.iter().position(|x| sup(x.values(), moved.values()) <= TOL).unwrap();
                let lhs = psi[table[k]].values();
                let rhs = psi[table[i]].compose(dst.element(t[g]).forward());
                ok &= sup(lhs, rhs.values()) <= TOL;
            }
        }
        if ok {
            found.push(table);
        }
    }
    found
}

fn criterion_7() -> Outcome {
    let r = OperationMap::new(vec![2, 1, 0]);
    let phi = SignalSpace::from_values(3, vec![vec![0.0, 0.5, 1.0], vec![1.0, 0.5, 0.0], vec![0.5, 0.5, 0.5]]).unwrap();
    let src = PerceptionPair::generated(phi, vec![r]).unwrap();
    let psi = SignalSpace::from_values(2, vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![0.2, 0.2]]).unwrap();
    let dst = PerceptionPair::generated(psi, vec![OperationMap::new(vec![1, 0])]).unwrap();
    assert_eq!((src.phi().len(), dst.phi().len(), src.order(), dst.order()), (3, 3, 2, 2));

    let sc = CompletionPair::build(&src, &FiniteDomain::of(&src), 0.1, 0.1, &CompletionOptions::default(), false).unwrap();
    let dc = CompletionPair::build(&dst, &FiniteDomain::of(&dst), 0.1, 0.1, &CompletionOptions::default(), false).unwrap();
    let hat = |c: &CompletionPair<FiniteDomain>| {
        let ops = c.ghat().iter().map(|e| OperationMap::new(e.map.clone())).collect();
        PerceptionPair::new(c.phihat().clone(), ops).unwrap()
    };
    let (src_hat, dst_hat) = (hat(&sc), hat(&dc));

    let mut total = 0;
    let mut ok = true;
    for t in [Homomorphism::identity(2), Homomorphism::trivial(&src, &dst)] {
        let expected = oracle_geneos(&src, &dst, &t.table);
        let found = enumerate_geneos(&src, &dst, &t, 10_000).unwrap();
        ok &= found.complete && found.tables_checked == 27;
        ok &= found.operators.iter().map(|f| f.table.clone()).collect::<Vec<_>>() == expected;
        total += found.operators.len();
        let induced: Vec<Geneo> = found
            .operators
            .iter()
            .map(|f| Geneo::new(induce_geneo(f, &sc, &dc).unwrap().table))
            .collect();
        for f in &induced {
            let check = geneo_core::geneo::validate_geneo(f, &t, &src_hat, &dst_hat).unwrap();
            ok &= check.equiv_residual == 0.0 && check.exp_residual == 0.0;
        }
        for (a, fa) in found.operators.iter().enumerate() {
            for (b, fb) in found.operators.iter().enumerate() {
                let d1 = (0..src_hat.phi().len())
                    .map(|i| sup(dst_hat.phi().get(induced[a].apply(i)).values(), dst_hat.phi().get(induced[b].apply(i)).values()))
                    .fold(0.0, f64::max);
                ok &= d1 == geneo_distance(&dst, fa, fb).unwrap();
            }
        }
        if let Ok(space) = GeneoSpace::new(src.clone(), dst.clone(), t, found.operators) {
            if collectionwise_surjective(&space).covered {
                let report = verify_finite(&space, &CompactifyConfig::new(0.1)).unwrap();
                ok &= report.condition("f1Iso").is_some_and(|c| c.residual == 0.0);
            }
        }
    }
    Outcome {
        pass: ok && total > 0,
        detail: format!("{total} GENEOs over both homomorphisms match the oracle; induced operators valid with residual 0, D1 = D_GENEO exactly"),
    }
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let results = [
        run(1, "random pair propositions", secs(60), criterion_1),
        run(2, "non-expansive homomorphism", secs(60), criterion_2),
        run(3, "orbit map non-expansive", secs(60), criterion_3),
        run(4, "exact finite fixed point", secs(500), criterion_4),
        run(5, "circle closure density", secs(120), criterion_5),
        run(6, "circle isometry ladder", secs(120), criterion_6),
        run(7, "micro operator enumeration", secs(30), criterion_7),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed} of {} criteria pass", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
