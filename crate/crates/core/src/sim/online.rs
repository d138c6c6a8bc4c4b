use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::domain::{ItemId, Mode, RankList, RelevanceTable, UserId};
use crate::error::{Error, Result};
use crate::metrics::{
    alignment_diagnostics, cndcg_update, ndcg_from_parts, unfairness, user_ideal_dcg, GainLedger,
    RunResult,
};
use crate::rankers::{online_step_rank, PolicyConfig, PolicyKind, RankContext, RankRequest};
use crate::synth::Dataset;

use super::{stream_rng, SimConfig, STREAM_PREFILTER, STREAM_SERVING};

/// `cumB / E`, clamped to `[0, 1]`; the optimistic prior 1 before any
/// exposure.
pub fn estimate_relevance(purchases: u64, exposure: f64) -> f64 {
    if exposure > 0.0 {
        (purchases as f64 / exposure).clamp(0.0, 1.0)
    } else {
        1.0
    }
}

/// The `size` items with the highest `r + N(0, noise_sd)` for `user`,
/// ties broken by lower id, returned in ascending id order.
pub fn prefilter_candidates<R: Rng + ?Sized>(
    rel: &RelevanceTable,
    user: UserId,
    size: usize,
    noise_sd: f64,
    rng: &mut R,
) -> Result<Vec<ItemId>> {
    let n = rel.item_count();
    if size > n {
        return Err(Error::invalid(format!("prefilter size {size} exceeds {n} items")));
    }
    if size == 0 {
        return Ok(Vec::new());
    }
    let mut scored: Vec<(f64, usize)> = rel.dense_row(user).into_iter().zip(0..n).collect();
    if noise_sd > 0.0 {
        let noise = Normal::new(0.0, noise_sd).map_err(|e| Error::invalid(e.to_string()))?;
        for (s, _) in scored.iter_mut() {
            *s += noise.sample(rng);
        }
    }
    let order = |a: &(f64, usize), b: &(f64, usize)| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1));
    if size < n {
        scored.select_nth_unstable_by(size - 1, order);
        scored.truncate(size);
    }
    let mut items: Vec<ItemId> = scored.into_iter().map(|(_, i)| ItemId::from(i)).collect();
    items.sort_unstable();
    Ok(items)
}

/// Learner and ledger state of an online run.
///
/// Estimator counters are kept per `(user, candidate)`, aligned with each
/// user's candidate list.
#[derive(Debug)]
pub struct OnlineState {
    ledger: GainLedger,
    candidates: Vec<Vec<ItemId>>,
    true_rel: Vec<Vec<f64>>,
    exposure: Vec<Vec<f64>>,
    purchases: Vec<Vec<u64>>,
    cndcg: f64,
    rng: ChaCha8Rng,
}

impl OnlineState {
    /// `candidates[u]` must be sorted by id and free of duplicates.
    pub fn new(ds: &Dataset, candidates: Vec<Vec<ItemId>>, rng: ChaCha8Rng) -> Result<Self> {
        if candidates.len() != ds.user_count() {
            return Err(Error::invalid(format!(
                "{} candidate sets for {} users",
                candidates.len(),
                ds.user_count()
            )));
        }
        for (u, c) in candidates.iter().enumerate() {
            if !c.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::invalid(format!("candidates of user {u} not strictly sorted")));
            }
            if let Some(i) = c.iter().find(|i| !ds.catalog.contains(**i)) {
                return Err(Error::invalid(format!("unknown candidate {i}")));
            }
        }
        let true_rel = candidates
            .iter()
            .enumerate()
            .map(|(u, c)| c.iter().map(|&i| ds.relevance.get(UserId::from(u), i)).collect())
            .collect();
        let zeros_f = candidates.iter().map(|c| vec![0.0; c.len()]).collect();
        let zeros_u = candidates.iter().map(|c| vec![0; c.len()]).collect();
        Ok(OnlineState {
            ledger: GainLedger::for_catalog(&ds.catalog),
            candidates,
            true_rel,
            exposure: zeros_f,
            purchases: zeros_u,
            cndcg: 0.0,
            rng,
        })
    }

    pub fn ledger(&self) -> &GainLedger {
        &self.ledger
    }

    pub fn step(&self) -> u64 {
        self.ledger.step_count()
    }

    pub fn cndcg(&self) -> f64 {
        self.cndcg
    }

    pub fn candidates(&self, user: UserId) -> &[ItemId] {
        &self.candidates[user.index()]
    }

    fn slot_of(&self, user: UserId, item: ItemId) -> Option<usize> {
        self.candidates.get(user.index())?.binary_search(&item).ok()
    }

    /// Exposure units and purchase count of `(user, item)`; zero for items
    /// outside the user's candidate set.
    pub fn counters(&self, user: UserId, item: ItemId) -> (f64, u64) {
        match self.slot_of(user, item) {
            Some(c) => (self.exposure[user.index()][c], self.purchases[user.index()][c]),
            None => (0.0, 0),
        }
    }

    pub fn estimate(&self, user: UserId, item: ItemId) -> f64 {
        let (e, b) = self.counters(user, item);
        estimate_relevance(b, e)
    }

    fn fill_estimates(&self, user: UserId, out: &mut Vec<f64>) {
        out.clear();
        let u = user.index();
        out.extend(
            self.exposure[u]
                .iter()
                .zip(&self.purchases[u])
                .map(|(&e, &b)| estimate_relevance(b, e)),
        );
    }

    /// Serves `list` to its user: deterministic exposure gain `p_k * v_e`,
    /// a Bernoulli(`p_k * r`) purchase worth `v_b`, estimator updates, and
    /// one step. Returns the purchase outcome per slot.
    pub fn apply_feedback(&mut self, list: &RankList, ctx: &RankContext<'_>) -> Result<Vec<bool>> {
        let u = list.user.index();
        let slots: Vec<usize> = list
            .items()
            .iter()
            .map(|&i| {
                self.slot_of(list.user, i)
                    .ok_or_else(|| Error::invalid(format!("item {i} is not a candidate of user {}", list.user)))
            })
            .collect::<Result<_>>()?;
        let mut bought = Vec::with_capacity(slots.len());
        for (k, (&item, c)) in list.items().iter().zip(slots).enumerate() {
            let p = ctx.pm.at_slot(k);
            let g = ctx.catalog.group_of(item);
            let prof = &ctx.profiles[g.index()];
            self.ledger.add_exposure(item, g, p, prof.v_e);
            let b = p > 0.0 && self.rng.random_bool((p * self.true_rel[u][c]).clamp(0.0, 1.0));
            if b {
                self.ledger.add_purchase_gain(g, prof.v_b);
                self.purchases[u][c] += 1;
            }
            self.exposure[u][c] += p;
            bought.push(b);
        }
        self.ledger.finish_step();
        Ok(bought)
    }
}

/// Evaluation snapshot after `step` requests.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Checkpoint {
    pub step: u64,
    pub cndcg: f64,
    /// NaN before the first request.
    pub unfairness: f64,
}

#[derive(Debug)]
pub struct OnlineOutcome {
    pub result: RunResult,
    pub checkpoints: Vec<Checkpoint>,
    /// Per-step NDCG when `record_ndcg` is set.
    pub ndcg: Option<Vec<f64>>,
    pub state: OnlineState,
}

fn current_unfairness(ledger: &GainLedger, y: &[f64]) -> Result<f64> {
    match ledger.averaged_gains() {
        Some(g) => unfairness(&g, y),
        None => Ok(f64::NAN),
    }
}

/// Online protocol: `t_max` requests from uniformly drawn users, ranked
/// over prefiltered candidates with estimated relevance.
pub fn run_online(ds: &Dataset, policy: &PolicyConfig, seed: u64, cfg: &SimConfig) -> Result<OnlineOutcome> {
    if policy.kind == PolicyKind::EquityRankV {
        return Err(Error::InvalidMode(
            "EquityRank_v is only defined for offline allocation".into(),
        ));
    }
    cfg.check_dataset(ds)?;
    if cfg.prefilter_size > ds.catalog.item_count() {
        return Err(Error::invalid(format!(
            "prefilter size {} exceeds {} items",
            cfg.prefilter_size,
            ds.catalog.item_count()
        )));
    }
    let started = Instant::now();
    let pm = cfg.position_model()?;
    let y = ds.expected_gains();
    let ctx = RankContext {
        catalog: &ds.catalog,
        profiles: &ds.profiles,
        y: &y,
        pm: &pm,
    };
    let users = ds.user_count();

    let mut pre_rng = stream_rng(seed, STREAM_PREFILTER);
    let candidates = (0..users)
        .map(|u| prefilter_candidates(&ds.relevance, UserId::from(u), cfg.prefilter_size, cfg.prefilter_noise, &mut pre_rng))
        .collect::<Result<Vec<_>>>()?;
    let idcg = (0..users)
        .map(|u| user_ideal_dcg(&ds.relevance, UserId::from(u), cfg.k_c, &pm))
        .collect::<Result<Vec<_>>>()?;
    let mut state = OnlineState::new(ds, candidates, stream_rng(seed, STREAM_SERVING))?;

    let mut checkpoints = Vec::new();
    let mut ndcg_series = cfg.record_ndcg.then(|| Vec::with_capacity(cfg.t_max as usize));
    let mut estimates = Vec::with_capacity(cfg.prefilter_size);
    for t in 1..=cfg.t_max {
        let user = UserId::from(state.rng.random_range(0..users));
        state.fill_estimates(user, &mut estimates);
        let gains = state.ledger.raw_gains();
        let req = RankRequest {
            user,
            candidates: state.candidates(user),
            relevance: &estimates,
            gains: &gains,
        };
        let list = online_step_rank(policy, &ctx, &req)?;
        let u = user.index();
        let dcg: f64 = list
            .items()
            .iter()
            .take(cfg.k_c)
            .enumerate()
            .map(|(k, &i)| {
                let c = state.slot_of(user, i).expect("ranked from candidates");
                state.true_rel[u][c] * pm.at_slot(k)
            })
            .sum();
        state.apply_feedback(&list, &ctx)?;
        let n = ndcg_from_parts(dcg, idcg[u]);
        state.cndcg = cndcg_update(state.cndcg, n, cfg.gamma)?;
        if let Some(series) = ndcg_series.as_mut() {
            series.push(n);
        }
        if t % cfg.checkpoint_every == 0 || t == cfg.t_max {
            checkpoints.push(Checkpoint {
                step: t,
                cndcg: state.cndcg,
                unfairness: current_unfairness(&state.ledger, &y)?,
            });
        }
    }

    let unfair = current_unfairness(&state.ledger, &y)?;
    let (msd, pearson, excluded) = match alignment_diagnostics(&state.ledger, &ds.profiles) {
        Ok(a) => (a.msd, a.pearson, a.excluded),
        Err(_) => (f64::NAN, f64::NAN, ds.catalog.provider_count()),
    };
    let result = RunResult {
        mode: Mode::Online,
        policy: policy.kind.name().to_string(),
        alpha: policy.alpha,
        seed,
        effectiveness: state.cndcg,
        unfairness: unfair,
        msd,
        pearson,
        excluded_providers: excluded,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    Ok(OnlineOutcome {
        result,
        checkpoints,
        ndcg: ndcg_series,
        state,
    })
}
