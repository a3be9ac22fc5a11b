use serde::{Deserialize, Serialize};

use super::closure::{closure_group, closure_signals, ClosedGroup, ClosedSignalSpace};
use super::completion::{compose_maps, precompose, CompletionPair};
use super::operators::{extend_geneo, extend_homomorphism, induce_geneo, ExtendedGeneo, ExtendedHom, InducedGeneo};
use super::{CompactifyConfig, FiniteDomain, Presented, PresentedAction};
use crate::error::{Error, Result};
use crate::geneo::{check_hom_nonexpansive, GeneoSpace};
use crate::metric::{greedy_eps_net, tb_profile, DistanceMatrix};
use crate::perception::{separation_check, sup_dist, PerceptionPair, SignalSpace};

/// One checked condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub residual: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetSizes {
    pub phi_bar: usize,
    pub g_bar: usize,
    pub f_bar: usize,
}

/// Net sizes of Φ̄̂, Ḡ̂ and the extended operator set along a radius schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Profiles {
    pub schedule: Vec<f64>,
    pub phi_bar: Vec<usize>,
    pub g_bar: Vec<usize>,
    pub f_bar: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactificationReport {
    pub eps: f64,
    pub conditions: Vec<Condition>,
    pub net_sizes: NetSizes,
    /// Completions and group closures all saturated.
    pub saturated: bool,
    /// Nets equal the samples and closures dropped nothing; bounds are then τ.
    pub exact: bool,
    pub profiles: Profiles,
}

impl CompactificationReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }

    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&Condition> {
        self.conditions.iter().filter(|c| !c.pass).collect()
    }
}

/// Half the smallest positive separation among points, signals, group
/// elements and operators of a space: any eps below it makes every net exact.
pub fn exact_resolution(space: &GeneoSpace) -> f64 {
    let mut matrices = Vec::new();
    for pair in [space.source(), space.target()] {
        matrices.push(pair.domain().clone());
        matrices.push(pair.phi().distance_matrix());
        matrices.push(pair.group_distance_matrix());
    }
    matrices.push(space.distance_matrix());
    let min = matrices
        .iter()
        .flat_map(|m| (0..m.n()).flat_map(move |i| (0..m.n()).map(move |j| m.get(i, j))))
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min);
    if min.is_finite() {
        0.5 * min
    } else {
        1.0
    }
}

/// All `(a, b)` index pairs, or an evenly strided subset of at most `cap`.
fn strided_pairs(n1: usize, n2: usize, cap: usize) -> impl Iterator<Item = (usize, usize)> {
    let total = n1 * n2;
    let step = if total <= cap || cap == 0 { 1 } else { total.div_ceil(cap) };
    (0..total).step_by(step).map(move |t| (t / n2.max(1), t % n2.max(1)))
}

fn matrix_of(n: usize, f: impl Fn(usize, usize) -> f64) -> DistanceMatrix {
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

/// Residuals that only involve one pair.
#[derive(Default)]
struct Side {
    sp_dns: f64,
    ps_met_eq: f64,
    d_tild: f64,
    com_sg: f64,
    ext_non_exp: f64,
    ext_sg_iso: f64,
    com_bj: f64,
    ind_bj_inv: f64,
    ind_bj_cmt: f64,
    ind_bj_fn_comp_cmt: f64,
    kiso: f64,
    cl_grp: f64,
    aut_comp: f64,
}

fn side<P>(
    c: &CompletionPair<P>,
    closed_phi: &ClosedSignalSpace,
    closed_g: &ClosedGroup<P::Op>,
    hyperspace_cap: usize,
) -> Side
where
    P: PresentedAction + Clone,
{
    let pair = c.pair();
    let n = pair.points();
    let space = c.space();
    let phihat = c.phihat();
    let ghat = c.ghat();
    let mut s = Side {
        sp_dns: c.density(),
        ..Default::default()
    };

    for i in 0..n {
        for k in 0..n {
            s.ps_met_eq = s.ps_met_eq.max((space.get(c.j(i), c.j(k)) - pair.domain().get(i, k)).abs());
        }
    }
    let rows: Vec<&[f64]> = phihat.signals().iter().map(|x| x.values()).collect();
    let dhat = c.induced_net_metric(&rows);
    s.ps_met_eq = s.ps_met_eq.max(dhat.max_abs_diff(space).unwrap_or(f64::INFINITY));
    let bar_rows: Vec<&[f64]> = closed_phi.signals().signals().iter().map(|x| x.values()).collect();
    s.d_tild = c.induced_net_metric(&bar_rows).max_abs_diff(&dhat).unwrap_or(f64::INFINITY);

    for (phi, ext) in pair.phi().signals().iter().zip(phihat.signals()) {
        let v = ext.values();
        for x in 0..n {
            s.com_sg = s.com_sg.max((v[c.j(x)] - phi.values()[x]).abs());
        }
        for p in 0..c.len() {
            for q in p + 1..c.len() {
                s.ext_non_exp = s.ext_non_exp.max((v[p] - v[q]).abs() - space.get(p, q));
            }
        }
    }
    s.ext_sg_iso = phihat
        .distance_matrix()
        .max_abs_diff(&pair.phi().distance_matrix())
        .unwrap_or(f64::INFINITY);

    let identity: Vec<usize> = (0..c.len()).collect();
    for (g, gh) in ghat.iter().enumerate() {
        let fwd = pair.element(g).forward();
        for x in 0..n {
            s.com_bj = s.com_bj.max(space.get(gh.map[c.j(x)], c.j(fwd[x])));
        }
        let inv = &ghat[pair.inverse(g).expect("group")].map;
        s.ind_bj_inv = s
            .ind_bj_inv
            .max(c.map_distance(&compose_maps(&gh.map, inv), &identity))
            .max(c.map_distance(&compose_maps(inv, &gh.map), &identity));
        for i in 0..phihat.len() {
            let moved = precompose(phihat.get(i).values(), &gh.map);
            s.ind_bj_cmt = s.ind_bj_cmt.max(sup_dist(&moved, phihat.get(pair.act(i, g)).values()));
        }
        for (h, hh) in ghat.iter().enumerate() {
            let gh_map = &ghat[pair.compose(g, h).expect("group")].map;
            s.ind_bj_fn_comp_cmt = s
                .ind_bj_fn_comp_cmt
                .max(c.map_distance(&compose_maps(&gh.map, &hh.map), gh_map));
            if h > g {
                let exact = c.op_distance(&gh.op, &hh.op);
                s.kiso = s
                    .kiso
                    .max((exact - pair.sup_point_distance(pair.element(g), pair.element(h))).abs());
            }
        }
    }
    s.cl_grp = closed_g.invariant_residual(c);

    let orbit = |g: usize| -> Vec<Vec<f64>> {
        phihat.signals().iter().map(|x| precompose(x.values(), &ghat[g].map)).collect()
    };
    let directed = |a: &[Vec<f64>], b: &[Vec<f64>]| {
        a.iter()
            .map(|x| b.iter().map(|y| sup_dist(x, y)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    let k = ghat.len();
    for (g, h) in strided_pairs(k, k, hyperspace_cap) {
        if h <= g {
            continue;
        }
        let (a, b) = (orbit(g), orbit(h));
        let haus = directed(&a, &b).max(directed(&b, &a));
        s.aut_comp = s.aut_comp.max(haus - c.op_distance(&ghat[g].op, &ghat[h].op));
    }
    s
}

fn check_separated(pair: &PerceptionPair, which: &str) -> Result<()> {
    let sep = separation_check(pair);
    if let Some((i, j)) = sep.witness {
        return Err(Error::Refused {
            reason: format!("{which} points {i} and {j} are not separated by the signals; apply metric_quotient first"),
            uncovered: vec![i, j],
        });
    }
    Ok(())
}

/// Runs the whole pipeline on both pairs of `space` and checks every
/// condition.
pub fn verify_compactification<P, Q>(
    space: &GeneoSpace,
    src: &Presented<P>,
    dst: &Presented<Q>,
    cfg: &CompactifyConfig,
) -> Result<CompactificationReport>
where
    P: PresentedAction + Clone,
    Q: PresentedAction + Clone,
{
    let eps = cfg.eps;
    if !(eps > 0.0) {
        return Err(Error::Parameter(format!("eps must be > 0, got {eps}")));
    }
    let tol = cfg.tolerance;
    check_separated(space.source(), "source")?;
    check_separated(space.target(), "target")?;

    let sc = CompletionPair::build(space.source(), &src.presentation, eps, cfg.delta(), &cfg.completion, cfg.force)
        .map_err(Error::at("source completion"))?;
    let dc = CompletionPair::build(space.target(), &dst.presentation, eps, cfg.delta(), &cfg.completion, cfg.force)
        .map_err(Error::at("target completion"))?;
    let phi_s = closure_signals(sc.phihat(), eps).map_err(Error::at("signal closure"))?;
    let phi_t = closure_signals(dc.phihat(), eps).map_err(Error::at("signal closure"))?;
    let g_s = closure_group(&sc, &src.generators, eps, cfg.group_cap).map_err(Error::at("group closure"))?;
    let g_t = closure_group(&dc, &dst.generators, eps, cfg.group_cap).map_err(Error::at("group closure"))?;
    let fhats: Vec<InducedGeneo> = space
        .operators()
        .iter()
        .map(|f| induce_geneo(f, &sc, &dc))
        .collect::<Result<_>>()
        .map_err(Error::at("induce_geneo"))?;
    let fbars: Vec<ExtendedGeneo> = fhats
        .iter()
        .map(|f| extend_geneo(f, &phi_s, &phi_t))
        .collect::<Result<_>>()
        .map_err(Error::at("extend_geneo"))?;
    let tbar = extend_homomorphism(space, &sc, &g_s, &g_t).map_err(Error::at("extend_homomorphism"))?;

    let exact = sc.is_sample_net()
        && dc.is_sample_net()
        && phi_s.len() == sc.phihat().len()
        && phi_t.len() == dc.phihat().len()
        && g_s.len() == space.source().order()
        && g_t.len() == space.target().order();
    let bound = |k: f64| if exact { tol } else { tol + k * eps };

    let a = side(&sc, &phi_s, &g_s, cfg.hyperspace_cap);
    let b = side(&dc, &phi_t, &g_t, cfg.hyperspace_cap);
    let ops = Operators {
        space,
        sc: &sc,
        dc: &dc,
        phi_s: &phi_s,
        phi_t: &phi_t,
        g_s: &g_s,
        g_t: &g_t,
        fhats: &fhats,
        fbars: &fbars,
        tbar: &tbar,
        pair_cap: cfg.pair_cap,
    }
    .residuals();

    let mut conditions = Vec::new();
    let mut push = |name: &str, residual: f64, bound: f64| {
        conditions.push(Condition {
            name: name.to_string(),
            residual,
            bound,
            pass: residual <= bound,
        })
    };
    push("SpDns", a.sp_dns.max(b.sp_dns), bound(1.0));
    push("PsMetEq", a.ps_met_eq.max(b.ps_met_eq), bound(2.0));
    push("DTild", a.d_tild.max(b.d_tild), bound(2.0));
    push("ComSg", a.com_sg.max(b.com_sg), bound(2.0));
    push("ExtNonExp", a.ext_non_exp.max(b.ext_non_exp), bound(2.0));
    push("ExtSgIso", a.ext_sg_iso.max(b.ext_sg_iso), bound(2.0));
    push("ComBj", a.com_bj.max(b.com_bj), bound(2.0));
    push("IndBjInv", a.ind_bj_inv.max(b.ind_bj_inv), bound(2.0));
    push("IndBjCmt", a.ind_bj_cmt.max(b.ind_bj_cmt), bound(2.0));
    push("IndBjFnCompCmt", a.ind_bj_fn_comp_cmt.max(b.ind_bj_fn_comp_cmt), bound(2.0));
    push("kiso", a.kiso.max(b.kiso), bound(2.0));
    push("ClCpGTpGp", a.cl_grp.max(b.cl_grp), bound(2.0));
    push("CpFGO", ops.cp_fgo, bound(2.0));
    push("f1Iso", ops.f1_iso, bound(2.0));
    push("ComGN1", ops.com_gn1, bound(2.0));
    push("ClCpFNExp", ops.cl_cp_f_nexp, bound(4.0));
    push("f2Iso", ops.f2_iso, bound(2.0));
    push("ComGN2", ops.com_gn2, bound(1.0));
    push("TnExp", ops.tn_exp, tol);
    push("CpTNExp", ops.cp_t_nexp, bound(2.0));
    push("ComGNT", ops.com_gnt, bound(2.0));
    push("thmgrouphom", ops.group_hom, bound(2.0));
    push("thmextequiv", ops.ext_equiv, bound(4.0));
    push("ComGN4", ops.com_gn4, bound(2.0));
    push("ComGNF", ops.com_gnf, bound(1.0));
    push("AutComp", a.aut_comp.max(b.aut_comp), bound(2.0));

    let schedule = cfg.schedule();
    let d3 = &ops.d3;
    let f_net = greedy_eps_net(d3, eps)?;
    let profiles = Profiles {
        phi_bar: tb_profile(&sc.phihat().distance_matrix(), &schedule)?,
        g_bar: tb_profile(&g_s.distance_matrix(&sc), &schedule)?,
        f_bar: tb_profile(d3, &schedule)?,
        schedule,
    };
    Ok(CompactificationReport {
        eps,
        conditions,
        net_sizes: NetSizes {
            phi_bar: phi_s.len(),
            g_bar: g_s.len(),
            f_bar: f_net.len(),
        },
        saturated: sc.approx().saturated && dc.approx().saturated && g_s.saturated && g_t.saturated,
        exact,
        profiles,
    })
}

/// [`verify_compactification`] for finite pairs presented by themselves.
pub fn verify_finite(space: &GeneoSpace, cfg: &CompactifyConfig) -> Result<CompactificationReport> {
    let src: Presented<FiniteDomain> = Presented::finite(space.source());
    let dst: Presented<FiniteDomain> = Presented::finite(space.target());
    verify_compactification(space, &src, &dst, cfg)
}

struct Operators<'a, P: PresentedAction, Q: PresentedAction> {
    space: &'a GeneoSpace,
    sc: &'a CompletionPair<P>,
    dc: &'a CompletionPair<Q>,
    phi_s: &'a ClosedSignalSpace,
    phi_t: &'a ClosedSignalSpace,
    g_s: &'a ClosedGroup<P::Op>,
    g_t: &'a ClosedGroup<Q::Op>,
    fhats: &'a [InducedGeneo],
    fbars: &'a [ExtendedGeneo],
    tbar: &'a ExtendedHom,
    pair_cap: usize,
}

struct OperatorResiduals {
    cp_fgo: f64,
    f1_iso: f64,
    com_gn1: f64,
    cl_cp_f_nexp: f64,
    f2_iso: f64,
    com_gn2: f64,
    tn_exp: f64,
    cp_t_nexp: f64,
    com_gnt: f64,
    group_hom: f64,
    ext_equiv: f64,
    com_gn4: f64,
    com_gnf: f64,
    /// `D³` between extended operators.
    d3: DistanceMatrix,
}

impl<P, Q> Operators<'_, P, Q>
where
    P: PresentedAction + Clone,
    Q: PresentedAction + Clone,
{
    fn psihat(&self) -> &SignalSpace {
        self.dc.phihat()
    }

    fn residuals(&self) -> OperatorResiduals {
        let (src, dst) = (self.space.source(), self.space.target());
        let phihat = self.sc.phihat();
        let psihat = self.psihat();
        let hom = &self.space.hom().table;
        let nf = self.fhats.len();

        let mut cp_fgo = 0.0f64;
        let mut com_gn1 = 0.0f64;
        for (f, fh) in self.space.operators().iter().zip(self.fhats) {
            for i in 0..phihat.len() {
                let image = psihat.get(fh.apply(i)).values();
                for (g, gh) in self.sc.ghat().iter().enumerate() {
                    let moved = precompose(phihat.get(i).values(), &gh.map);
                    let (m, _) = phihat.nearest(&moved).expect("nonempty");
                    let rhs = precompose(image, &self.dc.ghat()[hom[g]].map);
                    cp_fgo = cp_fgo.max(sup_dist(psihat.get(fh.apply(m)).values(), &rhs));
                }
                for k in i + 1..phihat.len() {
                    let out = sup_dist(image, psihat.get(fh.apply(k)).values());
                    cp_fgo = cp_fgo.max(out - sup_dist(phihat.get(i).values(), phihat.get(k).values()));
                }
                let psi = dst.phi().get(f.apply(i));
                let direct = self.dc.extend_signal(psi, true).expect("shape checked").values;
                com_gn1 = com_gn1.max(sup_dist(image, &direct));
                for x in 0..dst.points() {
                    com_gn1 = com_gn1.max((image[self.dc.j(x)] - psi.values()[x]).abs());
                }
            }
        }

        let d_geneo = self.space.distance_matrix();
        let d1 = matrix_of(nf, |a, b| {
            (0..phihat.len())
                .map(|i| {
                    sup_dist(
                        psihat.get(self.fhats[a].apply(i)).values(),
                        psihat.get(self.fhats[b].apply(i)).values(),
                    )
                })
                .fold(0.0, f64::max)
        });
        let bar = |k: usize| self.phi_t.signals().get(k).values();
        let d3 = matrix_of(nf, |a, b| {
            self.fbars[a]
                .table
                .iter()
                .zip(&self.fbars[b].table)
                .map(|(x, y)| sup_dist(bar(x.0), bar(y.0)))
                .fold(0.0, f64::max)
        });
        let f1_iso = d1.max_abs_diff(&d_geneo).unwrap_or(f64::INFINITY);
        let f2_iso = d3.max_abs_diff(&d1).unwrap_or(f64::INFINITY);
        let com_gn4 = d3.max_abs_diff(&d_geneo).unwrap_or(f64::INFINITY);

        let src_bar = |k: usize| self.phi_s.signals().get(k).values();
        let mut cl_cp_f_nexp = 0.0f64;
        let mut com_gn2 = 0.0f64;
        let mut com_gnf = 0.0f64;
        for (f, (fh, fb)) in self.space.operators().iter().zip(self.fhats.iter().zip(self.fbars)) {
            for k in 0..self.phi_s.len() {
                for l in k + 1..self.phi_s.len() {
                    let out = sup_dist(bar(fb.table[k].0), bar(fb.table[l].0));
                    cl_cp_f_nexp = cl_cp_f_nexp.max(out - sup_dist(src_bar(k), src_bar(l)));
                }
                let member = self.phi_s.center(k);
                com_gn2 = com_gn2.max(sup_dist(bar(fb.table[k].0), psihat.get(fh.apply(member)).values()));
            }
            for i in 0..phihat.len() {
                let via_bar = bar(fb.apply(phihat.get(i).values(), phihat, self.phi_t));
                let direct = self
                    .dc
                    .extend_signal(dst.phi().get(f.apply(i)), true)
                    .expect("shape checked")
                    .values;
                com_gnf = com_gnf.max(sup_dist(via_bar, &direct));
            }
        }

        let tn_exp = check_hom_nonexpansive(self.space).max_violation;
        let mut cp_t_nexp = 0.0f64;
        let (sg, dg) = (self.sc.ghat(), self.dc.ghat());
        for g in 0..src.order() {
            for h in g + 1..src.order() {
                let out = self.dc.op_distance(&dg[hom[g]].op, &dg[hom[h]].op);
                cp_t_nexp = cp_t_nexp.max(out - self.sc.op_distance(&sg[g].op, &sg[h].op));
            }
        }
        let mut com_gnt = 0.0f64;
        for g in 0..src.order() {
            let k = self.g_s.by_origin(g).expect("closure lists Ĝ");
            let image = &self.g_t.element(self.tbar.table[k]).op;
            com_gnt = com_gnt.max(self.dc.op_distance(image, &dg[hom[g]].op));
        }

        let (sp, dp) = (self.sc.presentation(), self.dc.presentation());
        let t_of = |op: &P::Op| self.tbar.apply(op, self.sc, self.g_s, self.g_t);
        let mut group_hom = self.dc.op_distance(&self.g_t.element(t_of(&sp.identity())).op, &dp.identity());
        let ng = self.g_s.len();
        for (a, b) in strided_pairs(ng, ng, self.pair_cap) {
            let (ea, eb) = (self.g_s.element(a), self.g_s.element(b));
            let lhs = &self.g_t.element(t_of(&sp.compose(&ea.op, &eb.op))).op;
            let rhs = dp.compose(
                &self.g_t.element(self.tbar.table[a]).op,
                &self.g_t.element(self.tbar.table[b]).op,
            );
            group_hom = group_hom.max(self.dc.op_distance(lhs, &rhs));
        }

        let mut ext_equiv = 0.0f64;
        for fb in self.fbars {
            for (k, e) in strided_pairs(self.phi_s.len(), ng, self.pair_cap) {
                let elem = self.g_s.element(e);
                let moved = precompose(src_bar(k), &elem.map);
                let lhs = bar(fb.apply(&moved, phihat, self.phi_t));
                let target_map = &self.g_t.element(self.tbar.table[e]).map;
                let rhs = precompose(bar(fb.table[k].0), target_map);
                ext_equiv = ext_equiv.max(sup_dist(lhs, &rhs));
            }
        }

        OperatorResiduals {
            cp_fgo,
            f1_iso,
            com_gn1,
            cl_cp_f_nexp,
            f2_iso,
            com_gn2,
            tn_exp,
            cp_t_nexp,
            com_gnt,
            group_hom,
            ext_equiv,
            com_gn4,
            com_gnf,
            d3,
        }
    }
}
