mod common;

use common::{toy, TOL};
use geneo_core::compactify::{
    closure_group, closure_signals, extend_geneo, extend_homomorphism, induce_geneo,
    verify_compactification, verify_finite, CompactifyConfig, CompletionPair, FiniteDomain,
};
use geneo_core::error::Error;
use geneo_core::geneo::{Geneo, GeneoSpace, Homomorphism};
use geneo_core::metric::CompletionOptions;
use geneo_core::perception::{PerceptionPair, Signal, SignalSpace};
use geneo_core::scenarios::{
    circle_distance, gen_circle, gen_non_surjective_space, gen_random_geneo_space, tent,
    normalize, CirclePresentation, CircleScenario, SpaceKind, Turn,
};

fn finite(pair: &PerceptionPair, eps: f64) -> CompletionPair<FiniteDomain> {
    CompletionPair::build(pair, &FiniteDomain::of(pair), eps, eps, &CompletionOptions::default(), false).unwrap()
}

fn circle(s: &CircleScenario, eps: f64) -> CompletionPair<CirclePresentation> {
    CompletionPair::build(&s.pair, &s.presentation, eps, eps, &CompletionOptions::default(), false).unwrap()
}

#[test]
fn finite_domain_extension_is_the_signal() {
    let pair = toy();
    let c = finite(&pair, 0.1);
    assert!(c.is_sample_net());
    for (phi, ext) in pair.phi().signals().iter().zip(c.phihat().signals()) {
        assert_eq!(phi.values(), ext.values());
    }
}

#[test]
fn constant_signal_extends_to_a_constant() {
    let s = gen_circle(8, &[8], 0.1).unwrap();
    let c = circle(&s, 0.1);
    let e = c.extend_signal(&Signal::new(vec![0.25; 8]), false).unwrap();
    assert!(e.values.iter().all(|&v| v == 0.25));
    assert_eq!(e.origin, None);
}

#[test]
fn extended_tent_is_close_to_the_analytic_tent() {
    let s = gen_circle(32, &[32], 0.02).unwrap();
    let c = circle(&s, 0.02);
    assert!(c.len() > 32);
    let e = c.extend_signal(s.pair.phi().get(0), false).unwrap();
    let bound = std::f64::consts::TAU / 32.0;
    for (p, v) in c.approx().points.iter().zip(&e.values) {
        assert!((v - tent(Turn::new(0, 1), *p)).abs() <= bound);
    }
}

#[test]
fn identity_induces_the_identity_map() {
    let s = gen_circle(8, &[8], 0.4).unwrap();
    let c = circle(&s, 0.4);
    let id = c.induce_op(&Turn::new(0, 1)).unwrap();
    assert_eq!(id.map, (0..c.len()).collect::<Vec<_>>());
    assert_eq!(id.snap, 0.0);
}

#[test]
fn quarter_turn_shifts_an_eighth_grid_by_two() {
    let s = gen_circle(8, &[8], 0.4).unwrap();
    let c = circle(&s, 0.4);
    assert!(c.is_sample_net());
    let q = c.induce_op(&Turn::new(1, 4)).unwrap();
    for i in 0..8 {
        assert_eq!(q.map[c.j(i)], c.j((i + 2) % 8));
    }
    assert!(q.bijective);
    assert!(q.origin.is_some());
}

#[test]
fn induced_maps_compose_like_angles() {
    let s = gen_circle(16, &[16], 0.2).unwrap();
    let c = circle(&s, 0.2);
    for a in 0..16 {
        for b in 0..16 {
            let ma = c.induce_op(&Turn::new(a, 16)).unwrap().map;
            let mb = c.induce_op(&Turn::new(b, 16)).unwrap().map;
            let sum = c.induce_op(&(Turn::new(a, 16) + Turn::new(b, 16))).unwrap().map;
            let composed: Vec<usize> = mb.iter().map(|&x| ma[x]).collect();
            assert_eq!(composed, sum);
        }
    }
}

#[test]
fn off_grid_rotation_needs_a_finer_net() {
    let s = gen_circle(8, &[8], 0.4).unwrap();
    let c = CompletionPair::build(&s.pair, &s.presentation, 0.4, 0.1, &CompletionOptions::default(), false).unwrap();
    assert!(matches!(c.induce_op(&Turn::new(1, 16)), Err(Error::Resolution(_))));
}

#[test]
fn fine_signal_closure_keeps_every_member() {
    let c = finite(&toy(), 0.1);
    let closed = closure_signals(c.phihat(), 0.5).unwrap();
    assert_eq!(closed.len(), 2);
}

#[test]
fn duplicated_signals_are_deduplicated() {
    let phi = SignalSpace::from_values(2, vec![vec![0.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    assert_eq!(phi.len(), 2);
}

#[test]
fn coarse_tent_closure_covers_at_the_center_distance() {
    let s = gen_circle(32, &[32], 0.1).unwrap();
    let c = circle(&s, 0.1);
    let grid = |k: usize| Turn::new(k as i64, 32);
    // sup distance between tents is the capped geodesic between centers
    let dphi = s.pair.phi().distance_matrix();
    for a in 0..32 {
        for b in 0..32 {
            assert!((dphi.get(a, b) - circle_distance(grid(a), grid(b))).abs() <= TOL);
        }
    }
    let closed = closure_signals(c.phihat(), 0.25).unwrap();
    assert!(closed.len() < 32);
    for i in 0..32 {
        let (k, d) = closed.snap_member(i);
        assert!(d <= 0.25);
        assert!(circle_distance(grid(i), grid(closed.center(k))) <= 0.25 + TOL);
    }
}

#[test]
fn finite_group_closure_is_the_group() {
    let pair = toy();
    let c = finite(&pair, 0.1);
    let g = closure_group(&c, &[], 0.1, 1000).unwrap();
    assert!(g.saturated);
    assert_eq!(g.len(), pair.order());
}

#[test]
fn third_turn_closes_after_three_elements() {
    let s = gen_circle(6, &[3], 0.3).unwrap();
    let c = circle(&s, 0.3);
    let g = closure_group(&c, &[Turn::new(1, 3)], 0.3, 1000).unwrap();
    assert!(g.saturated);
    let mut ops: Vec<Turn> = g.elements.iter().map(|e| e.op).collect();
    ops.sort();
    assert_eq!(ops, vec![Turn::new(0, 1), Turn::new(1, 3), Turn::new(2, 3)]);
}

#[test]
fn dyadic_generators_approach_every_dyadic_rotation() {
    let s = gen_circle(16, &[16], 0.05).unwrap();
    let p = s.presented(&[32, 64, 128]).unwrap();
    let c = CompletionPair::build(&s.pair, &p.presentation, 0.05, 0.05, &CompletionOptions::default(), false).unwrap();
    let g = closure_group(&c, &p.generators, 0.05, 10_000).unwrap();
    assert!(g.saturated);
    for k in 0..128 {
        let (_, d) = g.nearest(&Turn::new(k, 128), &c);
        assert!(d <= 0.05, "rotation {k}/128 is {d} from the closure");
    }
}

#[test]
fn induced_geneos_keep_their_tables() {
    let pair = toy();
    let c = finite(&pair, 0.1);
    assert_eq!(induce_geneo(&Geneo::new(vec![0, 1]), &c, &c).unwrap().table, vec![0, 1]);
    assert_eq!(induce_geneo(&Geneo::new(vec![1, 0]), &c, &c).unwrap().table, vec![1, 0]);
    assert!(induce_geneo(&Geneo::new(vec![0]), &c, &c).is_err());
}

#[test]
fn extension_over_an_exact_closure_is_the_induced_operator() {
    let pair = toy();
    let c = finite(&pair, 0.1);
    let closed = closure_signals(c.phihat(), 0.1).unwrap();
    let fhat = induce_geneo(&Geneo::new(vec![1, 0]), &c, &c).unwrap();
    let ext = extend_geneo(&fhat, &closed, &closed).unwrap();
    assert_eq!(ext.table, vec![(1, 0.0), (0, 0.0)]);
}

#[test]
fn rotation_operator_shifts_closure_centers() {
    let s = gen_circle(16, &[16], 0.1).unwrap();
    let c = circle(&s, 0.1);
    let closed = closure_signals(c.phihat(), 0.01).unwrap();
    assert_eq!(closed.len(), 16);
    let space = s.rotation_space(&[3]).unwrap();
    let fhat = induce_geneo(&space.operators()[0], &c, &c).unwrap();
    let ext = extend_geneo(&fhat, &closed, &closed).unwrap();
    for k in 0..16 {
        let (target, d) = ext.table[k];
        assert_eq!(closed.center(target), (closed.center(k) + 13) % 16);
        assert_eq!(d, 0.0);
    }
}

#[test]
fn identity_hom_extends_to_the_identity() {
    let s = gen_circle(16, &[16], 0.1).unwrap();
    let c = circle(&s, 0.1);
    let g = closure_group(&c, &s.generators, 0.1, 1000).unwrap();
    let space = s.rotation_space(&[0, 5]).unwrap();
    let t = extend_homomorphism(&space, &c, &g, &g).unwrap();
    assert_eq!(t.table, (0..g.len()).collect::<Vec<_>>());
}

#[test]
fn extended_hom_respects_addition_on_the_grid_closure() {
    let s = gen_circle(16, &[16], 0.1).unwrap();
    let c = circle(&s, 0.1);
    let g = closure_group(&c, &s.generators, 0.1, 1000).unwrap();
    let space = s.rotation_space(&[0]).unwrap();
    let t = extend_homomorphism(&space, &c, &g, &g).unwrap();
    for a in 0..g.len() {
        for b in 0..g.len() {
            let sum = g.element(a).op + g.element(b).op;
            let lhs = g.element(t.apply(&sum, &c, &g, &g)).op;
            let rhs = g.element(t.table[a]).op + g.element(t.table[b]).op;
            assert_eq!(normalize(lhs), normalize(rhs));
        }
    }
}

#[test]
fn extended_hom_on_dense_elements_goes_through_the_nearest_grid_rotation() {
    let s = gen_circle(16, &[16], 0.1).unwrap();
    let p = s.presented(&[32]).unwrap();
    let c = CompletionPair::build(&s.pair, &p.presentation, 0.1, 0.1, &CompletionOptions::default(), false).unwrap();
    let g = closure_group(&c, &p.generators, 0.1, 1000).unwrap();
    assert_eq!(g.len(), 32);
    let space = s.rotation_space(&[0]).unwrap();
    let t = extend_homomorphism(&space, &c, &g, &g).unwrap();
    // every closure element is within half a grid step of an induced rotation
    let r = std::f64::consts::TAU / 32.0;
    for a in 0..g.len() {
        assert!(c.op_distance(&g.element(a).op, &g.element(t.table[a]).op) <= r + TOL);
        for b in 0..g.len() {
            let sum = g.element(a).op + g.element(b).op;
            let lhs = g.element(t.apply(&sum, &c, &g, &g)).op;
            let rhs = g.element(t.table[a]).op + g.element(t.table[b]).op;
            assert!(c.op_distance(&lhs, &rhs) <= 3.0 * r + TOL);
        }
    }
}

#[test]
fn non_surjective_space_is_refused() {
    let space = gen_non_surjective_space(5, SpaceKind::Equivariant, 4, 6).unwrap();
    let cfg = CompactifyConfig::new(0.01);
    match verify_finite(&space, &cfg) {
        Err(e) => {
            let mut e = &e;
            while let Error::Stage { source, .. } = e {
                e = source;
            }
            match e {
                Error::Refused { uncovered, .. } => assert!(!uncovered.is_empty()),
                other => panic!("unexpected error {other}"),
            }
        }
        Ok(_) => panic!("non-surjective space was compactified"),
    }
}

#[test]
fn non_separating_pair_is_refused() {
    let phi = SignalSpace::from_values(2, vec![vec![0.5, 0.5]]).unwrap();
    let pair = PerceptionPair::generated(phi, vec![]).unwrap();
    let space = GeneoSpace::new(pair.clone(), pair.clone(), Homomorphism::identity(1), vec![Geneo::new(vec![0])]).unwrap();
    assert!(verify_finite(&space, &CompactifyConfig::new(0.1)).is_err());
}

#[test]
fn exact_finite_compactification_is_a_fixed_point() {
    let pair = toy();
    let space = GeneoSpace::new(pair.clone(), pair.clone(), Homomorphism::identity(2), vec![Geneo::new(vec![0, 1]), Geneo::new(vec![1, 0])]).unwrap();
    let report = verify_finite(&space, &CompactifyConfig::new(0.1)).unwrap();
    assert!(report.exact && report.saturated && report.passed());
    assert!(report.conditions.iter().all(|c| c.residual == 0.0));
    assert_eq!((report.net_sizes.phi_bar, report.net_sizes.g_bar, report.net_sizes.f_bar), (2, 2, 2));
}

#[test]
fn random_finite_spaces_compactify_exactly() {
    for seed in 0..8 {
        let kind = SpaceKind::ALL[seed as usize % 4];
        let space = gen_random_geneo_space(seed, kind, 5, 8).unwrap();
        let eps = geneo_core::compactify::exact_resolution(&space);
        match verify_finite(&space, &CompactifyConfig::new(eps)) {
            Ok(r) => {
                assert!(r.exact, "seed {seed}");
                assert!(r.conditions.iter().all(|c| c.residual == 0.0), "seed {seed}: {:?}", r.failures());
            }
            // random pairs may fail to separate points
            Err(e) => assert!(e.to_string().contains("separat"), "seed {seed}: {e}"),
        }
    }
}

#[test]
fn coarse_circle_report_stays_within_bounds() {
    let s = gen_circle(32, &[32], 0.2).unwrap();
    let space = s.rotation_space(&s.default_shifts()).unwrap();
    let p = s.presented(&[]).unwrap();
    let report = verify_compactification(&space, &p, &p, &CompactifyConfig::new(0.2)).unwrap();
    assert!(!report.exact);
    assert!(report.passed(), "{:?}", report.failures());
    assert_eq!(report.conditions.len(), 26);
}
