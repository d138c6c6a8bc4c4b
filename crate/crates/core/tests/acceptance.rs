//! End-to-end acceptance checks. Runs as a plain binary and prints one
//! `[PASS]`/`[FAIL]` line per criterion; exits nonzero if any fails.

use std::path::Path;
use std::time::Instant;

use equityrank::cli::{
    cmd_sweep, min_unfairness_point, policy_envelope, read_results, summarize, ExperimentPlan, PointSummary,
    RESULTS_FILE,
};
use equityrank::domain::{Catalog, ItemId, Mode, PositionModel, ProviderId, ProviderProfile, RankList, UserId};
use equityrank::metrics::{envelope_at, exposure_unfairness, fairness_gradient, unfairness, GainLedger};
use equityrank::rankers::{online_step_rank, rank_request, PolicyConfig, PolicyKind, RankContext, RankRequest};
use equityrank::sim::{run_online, OnlineState, SimConfig};
use equityrank::synth::{generate_dataset, Dataset, GeneratorSpec, ScenarioName, ScenarioSpec};
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Direct ordered-pair double sum, diagonal included.
fn unfairness_direct(g: &[f64], y: &[f64]) -> f64 {
    let m = g.len();
    let mut s = 0.0;
    for i in 0..m {
        for j in 0..m {
            s += (g[i] * y[j] - g[j] * y[i]).powi(2);
        }
    }
    s / (m * (m - 1)) as f64
}

fn exam_prob(slot: usize, k: usize) -> f64 {
    if slot < k {
        1.0 / ((slot as f64 + 1.0).log2() + 1.0)
    } else {
        0.0
    }
}

fn ac1_gradient_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..1000 {
        let m = rng.random_range(2..=10);
        let g: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..100.0)).collect();
        let y: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..10.0)).collect();
        let b = fairness_gradient(&g, &y).unwrap();
        let scale = b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for i in 0..m {
            let h = 1e-6 * g[i].abs().max(1.0);
            let mut up = g.clone();
            let mut down = g.clone();
            up[i] += h;
            down[i] -= h;
            let fd = -(unfairness_direct(&up, &y) - unfairness_direct(&down, &y)) / (2.0 * h);
            // Relative to the component, floored by the gradient's own
            // scale so components that vanish analytically do not divide
            // rounding noise by zero.
            let rel = (b[i] - fd).abs() / fd.abs().max(1e-3 * scale).max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
            if rel > 1e-5 {
                failures += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failures == 0 && secs < 5.0,
        format!("1000 cases, {failures} components over 1e-5, max rel err {worst:.2e}, {secs:.2} s"),
    )
}

fn random_catalog(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Catalog {
    let mut groups: Vec<ProviderId> = (0..n).map(|i| ProviderId::from(i % m)).collect();
    groups.shuffle(rng);
    Catalog::new(groups, m).unwrap()
}

fn ac2_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m = rng.random_range(2..=6);
        let n = rng.random_range(m.max(5)..=30);
        let k = rng.random_range(1..=5.min(n));
        let users = rng.random_range(1..=8);
        let catalog = random_catalog(&mut rng, n, m);
        let rows: Vec<Vec<f64>> = (0..users)
            .map(|_| (0..n).map(|_| rng.random_range(0.01..1.0)).collect())
            .collect();
        let rel = equityrank::domain::RelevanceTable::from_dense(&rows).unwrap();
        // Mean relevance of a group's items over users.
        let merit: Vec<f64> = (0..m)
            .map(|g| {
                let items = catalog.items_of(ProviderId::from(g));
                let total: f64 = rows.iter().flat_map(|r| items.iter().map(move |i| r[i.index()])).sum();
                total / (items.len() * users) as f64
            })
            .collect();
        let profiles: Vec<ProviderProfile> = merit.iter().map(|&r| ProviderProfile::new(1.0, 0.0, r).unwrap()).collect();
        let pm = PositionModel::new(k).unwrap();
        let steps = rng.random_range(1..=20);
        let mut ledger = GainLedger::for_catalog(&catalog);
        let mut item_exposure = vec![0.0; n];
        for _ in 0..steps {
            let u = rng.random_range(0..users);
            let items: Vec<ItemId> = index::sample(&mut rng, n, k).into_iter().map(ItemId::from).collect();
            for (slot, it) in items.iter().enumerate() {
                item_exposure[it.index()] += exam_prob(slot, k);
            }
            let list = RankList::new(UserId::from(u), items, k, &catalog).unwrap();
            ledger.record_expected(&list, |i| rows[u][i.index()], &catalog, &profiles, &pm);
        }
        // Exposure totals from the served lists, compared as group totals
        // against group merit.
        let group_total: Vec<f64> = (0..m)
            .map(|g| {
                catalog
                    .items_of(ProviderId::from(g))
                    .iter()
                    .map(|i| item_exposure[i.index()])
                    .sum::<f64>()
                    / steps as f64
            })
            .collect();
        let direct = unfairness_direct(&group_total, &merit);
        let generic = unfairness(&ledger.averaged_gains().unwrap(), &merit).unwrap();
        let via_exposure = exposure_unfairness(&ledger, &catalog, &rel).unwrap();
        for v in [generic, via_exposure] {
            let rel_err = (v - direct).abs() / direct.abs().max(1e-300);
            worst = worst.max(if direct == 0.0 && v == 0.0 { 0.0 } else { rel_err });
        }
    }
    outcome(worst <= 1e-9, format!("100 random ledgers, max rel err {worst:.2e}"))
}

struct RandomState {
    catalog: Catalog,
    profiles: Vec<ProviderProfile>,
    y: Vec<f64>,
    pm: PositionModel,
    candidates: Vec<ItemId>,
    relevance: Vec<f64>,
    gains: Vec<f64>,
}

fn random_state(rng: &mut ChaCha8Rng) -> RandomState {
    let m = rng.random_range(2..=5);
    let n = rng.random_range(m.max(6)..=30);
    let k = rng.random_range(1..=5);
    let catalog = random_catalog(rng, n, m);
    let profiles: Vec<ProviderProfile> = (0..m)
        .map(|_| {
            ProviderProfile::new(rng.random_range(0.5..20.0), rng.random_range(1.0..200.0), rng.random_range(1.0..80.0))
                .unwrap()
        })
        .collect();
    let y = profiles.iter().map(|p| p.y).collect();
    let size = rng.random_range(k.max(5)..=n);
    let mut candidates: Vec<ItemId> = index::sample(rng, n, size).into_iter().map(ItemId::from).collect();
    candidates.sort_unstable();
    let quantise = rng.random_bool(0.5);
    let relevance = (0..size)
        .map(|_| {
            let r: f64 = rng.random();
            if quantise {
                (r * 4.0).round() / 4.0
            } else {
                r
            }
        })
        .collect();
    let gains = (0..m).map(|_| rng.random_range(0.0..1e4)).collect();
    RandomState {
        catalog,
        profiles,
        y,
        pm: PositionModel::new(k).unwrap(),
        candidates,
        relevance,
        gains,
    }
}

fn ac3_collapse() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut mismatches = Vec::new();
    for case in 0..100 {
        let s = random_state(&mut rng);
        let ctx = RankContext {
            catalog: &s.catalog,
            profiles: &s.profiles,
            y: &s.y,
            pm: &s.pm,
        };
        let req = RankRequest {
            user: UserId(0),
            candidates: &s.candidates,
            relevance: &s.relevance,
            gains: &s.gains,
        };
        for mode in [Mode::Offline, Mode::Online] {
            let run = |kind, alpha| rank_request(&PolicyConfig::new(kind, alpha).unwrap(), mode, &ctx, &req).unwrap();
            let top = run(PolicyKind::TopK, 0.0);
            let poor = run(PolicyKind::PoorK, 0.0);
            for kind in [PolicyKind::EquityRank, PolicyKind::FairCoStar, PolicyKind::MmfStar] {
                if run(kind, 0.0) != top {
                    mismatches.push(format!("case {case} {mode} {}(0)", kind.name()));
                }
            }
            if run(PolicyKind::MmfStar, 1.0) != poor {
                mismatches.push(format!("case {case} {mode} MMF*(1)"));
            }
        }
    }
    outcome(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "100 random states x 2 modes, all lists identical".to_string()
        } else {
            format!("{} mismatches, first: {}", mismatches.len(), mismatches[0])
        },
    )
}

/// Exact marginal objective of serving `list` once: unnormalised DCG plus
/// alpha times the drop in unfairness of the raw gains.
fn delta_obj(list: &[usize], s: &MicroInstance) -> f64 {
    let mut gains = s.gains.clone();
    let mut dcg = 0.0;
    for (slot, &i) in list.iter().enumerate() {
        let p = exam_prob(slot, s.k);
        let g = s.group[i];
        dcg += p * s.rel[i];
        gains[g] += p * (s.v_e[g] + s.rel[i] * s.v_b[g]);
    }
    dcg + s.alpha * (unfairness_direct(&s.gains, &s.y) - unfairness_direct(&gains, &s.y))
}

struct MicroInstance {
    k: usize,
    group: Vec<usize>,
    rel: Vec<f64>,
    gains: Vec<f64>,
    y: Vec<f64>,
    v_e: Vec<f64>,
    v_b: Vec<f64>,
    alpha: f64,
}

fn ordered_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for prefix in ordered_subsets(n, k - 1) {
        for i in 0..n {
            if !prefix.contains(&i) {
                let mut p = prefix.clone();
                p.push(i);
                out.push(p);
            }
        }
    }
    out
}

/// Relative gaps of EquityRank's list against the brute-force optimum on
/// 100 instances whose prior ledger is drawn from U(0, `ledger_scale`).
fn micro_gaps(seed: u64, ledger_scale: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gaps = Vec::with_capacity(100);
    for _ in 0..100 {
        let n = rng.random_range(4..=7);
        let k = 3;
        let mut group: Vec<usize> = (0..n).map(|i| i % 2).collect();
        group.shuffle(&mut rng);
        let inst = MicroInstance {
            k,
            rel: (0..n).map(|_| rng.random()).collect(),
            gains: (0..2).map(|_| rng.random_range(0.0..ledger_scale)).collect(),
            y: (0..2).map(|_| rng.random_range(1.0..10.0)).collect(),
            v_e: (0..2).map(|_| rng.random_range(0.5..2.0)).collect(),
            v_b: (0..2).map(|_| rng.random_range(1.0..10.0)).collect(),
            alpha: 10f64.powf(rng.random_range(-4.0..0.0)),
            group,
        };
        let catalog = Catalog::new(inst.group.iter().map(|&g| ProviderId::from(g)).collect(), 2).unwrap();
        let profiles: Vec<ProviderProfile> = (0..2)
            .map(|g| ProviderProfile::new(inst.v_e[g], inst.v_b[g], inst.y[g]).unwrap())
            .collect();
        let pm = PositionModel::new(k).unwrap();
        let ctx = RankContext {
            catalog: &catalog,
            profiles: &profiles,
            y: &inst.y,
            pm: &pm,
        };
        let candidates: Vec<ItemId> = (0..n).map(ItemId::from).collect();
        let req = RankRequest {
            user: UserId(0),
            candidates: &candidates,
            relevance: &inst.rel,
            gains: &inst.gains,
        };
        let list = rank_request(&PolicyConfig::new(PolicyKind::EquityRank, inst.alpha).unwrap(), Mode::Offline, &ctx, &req)
            .unwrap();
        let chosen: Vec<usize> = list.items().iter().map(|i| i.index()).collect();
        let ours = delta_obj(&chosen, &inst);
        let best = ordered_subsets(n, k)
            .iter()
            .map(|l| delta_obj(l, &inst))
            .fold(f64::NEG_INFINITY, f64::max);
        gaps.push((best - ours) / best.abs().max(1e-12));
    }
    gaps
}

fn ac4_micro_gap() -> Outcome {
    let start = Instant::now();
    let gaps = micro_gaps(404, 20.0);
    let within = gaps.iter().filter(|&&g| g <= 0.05).count();
    let mut sorted = gaps.clone();
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| sorted[((sorted.len() - 1) as f64 * p).round() as usize];
    let buckets = [0.0, 0.01, 0.05, 0.25, 1.0, f64::INFINITY];
    let histogram: Vec<String> = buckets
        .windows(2)
        .map(|w| {
            let c = gaps.iter().filter(|&&g| g > w[0] && g <= w[1]).count();
            format!("({},{}]:{c}", w[0], w[1])
        })
        .collect();
    let exact = gaps.iter().filter(|&&g| g <= 0.0).count();
    // Not gated: the same draw with deeper prior ledgers, where one list's
    // gain is small next to the cumulative gain.
    let warmer: Vec<String> = [200.0, 2000.0]
        .iter()
        .map(|&s| format!("U(0,{s}) {}/100", micro_gaps(404, s).iter().filter(|&&g| g <= 0.05).count()))
        .collect();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        within >= 90 && secs < 30.0,
        format!(
            "ledger U(0,20): {within}/100 within 5%; gaps <=0:{exact} {}; p50={:.2e} p90={:.2e} max={:.2e}; deeper ledgers (not gated): {}; {secs:.2} s",
            histogram.join(" "),
            q(0.5),
            q(0.9),
            q(1.0),
            warmer.join(", ")
        ),
    )
}

fn min_unf<'a>(points: &'a [PointSummary], policy: &str) -> &'a PointSummary {
    min_unfairness_point(points, policy).unwrap_or_else(|| panic!("no runs for {policy}"))
}

fn offline_plan(scenario: ScenarioName, out: &Path, policies: Vec<PolicyKind>) -> ExperimentPlan {
    ExperimentPlan {
        out: out.to_path_buf(),
        scenario,
        policies,
        ..ExperimentPlan::default()
    }
}

fn ac5_table2(points: &[PointSummary], secs: f64) -> Outcome {
    let ev = min_unf(points, "EquityRank_v").unfairness.0;
    let poor = min_unf(points, "PoorK").unfairness.0;
    let top = min_unf(points, "TopK").unfairness.0;
    outcome(
        ev <= 1.5 * poor && top >= 10.0 * ev && secs < 300.0,
        format!(
            "min unfairness EquityRank_v={ev:.4} PoorK={poor:.4} TopK={top:.4e} (TopK/EquityRank_v={:.3e}); sweep {secs:.1} s",
            top / ev
        ),
    )
}

fn ac6_table4(per_scenario: &[(ScenarioName, Vec<PointSummary>)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, points) in per_scenario {
        let ev = min_unf(points, "EquityRank_v");
        for other in ["PoorK", "FairCo*"] {
            let o = min_unf(points, other);
            let ok = ev.msd.0 < o.msd.0 && ev.pearson.0 > o.pearson.0;
            pass &= ok;
            parts.push(format!(
                "{name}: msd {:.4} vs {other} {:.4}, rho {:.4} vs {:.4}{}",
                ev.msd.0,
                o.msd.0,
                ev.pearson.0,
                o.pearson.0,
                if ok { "" } else { " (violated)" }
            ));
        }
    }
    outcome(pass, parts.join("; "))
}

fn ac7_dominance(points: &[PointSummary]) -> Outcome {
    let ev = policy_envelope(points, "EquityRank_v");
    let fc = policy_envelope(points, "FairCo*");
    let mut thresholds: Vec<f64> = ev.iter().chain(&fc).map(|p| p.0).collect();
    thresholds.sort_by(f64::total_cmp);
    let mut worst = (f64::INFINITY, f64::NAN);
    let mut compared = 0;
    for t in thresholds {
        if let (Some(e), Some(f)) = (envelope_at(&ev, t), envelope_at(&fc, t)) {
            compared += 1;
            if e - f < worst.0 {
                worst = (e - f, t);
            }
        }
    }
    let monotone = ["TopK", "PoorK", "FairCo*", "MMF*", "EquityRank", "EquityRank_v"]
        .iter()
        .all(|p| policy_envelope(points, p).windows(2).all(|w| w[1].1 >= w[0].1 && w[1].0 > w[0].0));
    outcome(
        worst.0 >= -0.02 && monotone && compared > 0,
        format!(
            "{compared} thresholds, worst EquityRank_v - FairCo* = {:.4} at unfairness {:.4e}; envelopes monotone: {monotone}",
            worst.0, worst.1
        ),
    )
}

fn ac8_online() -> Outcome {
    let ds = generate_dataset(&GeneratorSpec::default(), &ScenarioSpec::common()).unwrap();
    let cfg = SimConfig {
        mode: Mode::Online,
        record_ndcg: true,
        ..SimConfig::default()
    };
    let start = Instant::now();
    let out = run_online(&ds, &PolicyConfig::new(PolicyKind::EquityRank, 1e-4).unwrap(), 1, &cfg).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let series = out.ndcg.as_ref().unwrap();
    let t = series.len();
    let direct: f64 = series
        .iter()
        .enumerate()
        .map(|(i, n)| cfg.gamma.powi((t - 1 - i) as i32) * n)
        .sum();
    let cndcg_err = (out.result.effectiveness - direct).abs() / direct.abs();

    // Single-item Bernoulli harness for the estimator: r = 0.5 served at
    // the top for 1000 exposure units.
    let catalog = Catalog::new(vec![ProviderId(0), ProviderId(1)], 2).unwrap();
    let profiles = vec![ProviderProfile::new(1.0, 1.0, 1.0).unwrap(); 2];
    let rel = equityrank::domain::RelevanceTable::from_dense(&[vec![0.5, 0.0]]).unwrap();
    let tiny = Dataset::new(catalog, profiles, rel).unwrap();
    let pm = PositionModel::new(1).unwrap();
    let y = tiny.expected_gains();
    let ctx = RankContext {
        catalog: &tiny.catalog,
        profiles: &tiny.profiles,
        y: &y,
        pm: &pm,
    };
    let mut state = OnlineState::new(&tiny, vec![vec![ItemId(0), ItemId(1)]], ChaCha8Rng::seed_from_u64(808)).unwrap();
    let list = RankList::new(UserId(0), vec![ItemId(0)], 1, &tiny.catalog).unwrap();
    for _ in 0..1000 {
        state.apply_feedback(&list, &ctx).unwrap();
    }
    let r_hat = state.estimate(UserId(0), ItemId(0));
    let estimator_ok = (r_hat - 0.5).abs() <= 0.05;

    outcome(
        t == 250_000 && secs < 600.0 && estimator_ok && cndcg_err <= 1e-6,
        format!(
            "T={t} K={} gamma={} prefilter={} in {secs:.1} s; cNDCG={:.4} rel err vs direct sum {cndcg_err:.2e}; r_hat={r_hat:.4} after 1000 exposures",
            cfg.list_size, cfg.gamma, cfg.prefilter_size, out.result.effectiveness
        ),
    )
}

/// Seconds per online ranking request over all `n` items with `m` groups.
fn step_latency(n: usize, m: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64((n * 31 + m) as u64);
    let catalog = random_catalog(&mut rng, n, m);
    let profiles: Vec<ProviderProfile> = (0..m)
        .map(|_| ProviderProfile::new(rng.random_range(5.0..15.0), rng.random_range(50.0..150.0), rng.random_range(1.0..100.0)).unwrap())
        .collect();
    let y: Vec<f64> = profiles.iter().map(|p| p.y).collect();
    let pm = PositionModel::new(5).unwrap();
    let ctx = RankContext {
        catalog: &catalog,
        profiles: &profiles,
        y: &y,
        pm: &pm,
    };
    let candidates: Vec<ItemId> = (0..n).map(ItemId::from).collect();
    let relevance: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    let gains: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..1e5)).collect();
    let req = RankRequest {
        user: UserId(0),
        candidates: &candidates,
        relevance: &relevance,
        gains: &gains,
    };
    let policy = PolicyConfig::new(PolicyKind::EquityRank, 1e-4).unwrap();
    let reps = (2_000_000 / (n + m)).max(5);
    let mut best = f64::INFINITY;
    for _ in 0..5 {
        let start = Instant::now();
        for _ in 0..reps {
            std::hint::black_box(online_step_rank(&policy, &ctx, std::hint::black_box(&req)).unwrap());
        }
        best = best.min(start.elapsed().as_secs_f64() / reps as f64);
    }
    best
}

fn loglog_slope(xs: &[f64], ts: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let lt: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let mt = lt.iter().sum::<f64>() / k;
    let cov: f64 = lx.iter().zip(&lt).map(|(x, t)| (x - mx) * (t - mt)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

fn ac9_complexity() -> Outcome {
    let ns = [1_000.0, 10_000.0, 100_000.0];
    let tn: Vec<f64> = ns.iter().map(|&n| step_latency(n as usize, 20)).collect();
    let ms = [10.0, 100.0, 1_000.0];
    let tm: Vec<f64> = ms.iter().map(|&m| step_latency(10_000, m as usize)).collect();
    let sn = loglog_slope(&ns, &tn);
    let sm = loglog_slope(&ms, &tm);
    let us = |v: &[f64]| v.iter().map(|t| format!("{:.1}", t * 1e6)).collect::<Vec<_>>().join("/");
    outcome(
        sn <= 1.15 && sm <= 2.0,
        format!(
            "n=1e3/1e4/1e5 (m=20): {} us, slope {sn:.3}; m=10/100/1000 (n=1e4): {} us, slope {sm:.3}",
            us(&tn),
            us(&tm)
        ),
    )
}

fn ac10_determinism(first: &Path, root: &Path) -> Outcome {
    let again = root.join("common_again");
    let plan = offline_plan(ScenarioName::Common, &again, PolicyKind::ALL.to_vec());
    cmd_sweep(&plan).unwrap();
    let a = std::fs::read(first.join(RESULTS_FILE)).unwrap();
    let b = std::fs::read(again.join(RESULTS_FILE)).unwrap();

    let online = |dir: &str| {
        let mut plan = ExperimentPlan {
            out: root.join(dir),
            policies: vec![PolicyKind::TopK, PolicyKind::FairCoStar, PolicyKind::EquityRank],
            alpha_grid: vec![0.0, 1e-4],
            seeds: vec![1, 2],
            generator: GeneratorSpec {
                n_users: 100,
                n_items: 200,
                n_providers: 8,
                ..GeneratorSpec::default()
            },
            ..ExperimentPlan::default()
        };
        plan.sim.mode = Mode::Online;
        plan.sim.t_max = 5_000;
        cmd_sweep(&plan).unwrap();
        std::fs::read(plan.out.join(RESULTS_FILE)).unwrap()
    };
    let c = online("online_a");
    let d = online("online_b");
    outcome(
        a == b && c == d,
        format!(
            "offline results.csv {} bytes identical: {}; online results.csv {} bytes identical: {}",
            a.len(),
            a == b,
            c.len(),
            c == d
        ),
    )
}

fn sweep_points(plan: &ExperimentPlan) -> (Vec<PointSummary>, f64) {
    let start = Instant::now();
    cmd_sweep(plan).unwrap();
    let secs = start.elapsed().as_secs_f64();
    (summarize(&read_results(&plan.out).unwrap()), secs)
}

fn main() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    let mut failed = 0;
    let mut report = |id: &str, name: &str, o: Outcome| {
        println!("[{}] {id} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    };

    // Timing-sensitive criterion first, before the sweeps warm up the
    // allocator with large datasets.
    report("AC9", "complexity scaling", ac9_complexity());
    report("AC1", "gradient oracle", ac1_gradient_oracle());
    report("AC2", "exposure-fairness reduction", ac2_reduction());
    report("AC3", "collapse identities", ac3_collapse());
    report("AC4", "micro-instance optimality gap", ac4_micro_gap());

    let common_dir = root.join("common");
    let (common, secs) = sweep_points(&offline_plan(ScenarioName::Common, &common_dir, PolicyKind::ALL.to_vec()));
    report("AC5", "minimum-unfairness ordering (Common, offline)", ac5_table2(&common, secs));

    let mut per_scenario = vec![(ScenarioName::Common, common.clone())];
    for name in [ScenarioName::Exp1st, ScenarioName::Sale1st] {
        let plan = offline_plan(
            name,
            &root.join(name.to_string()),
            vec![PolicyKind::PoorK, PolicyKind::FairCoStar, PolicyKind::EquityRankV],
        );
        per_scenario.push((name, sweep_points(&plan).0));
    }
    report("AC6", "gain-ratio alignment ordering", ac6_table4(&per_scenario));
    report("AC7", "trade-off dominance (Common, offline)", ac7_dominance(&common));
    report("AC8", "online protocol", ac8_online());
    report("AC10", "sweep determinism", ac10_determinism(&common_dir, root));

    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
