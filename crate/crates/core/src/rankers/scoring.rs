use std::cmp::Ordering;

use crate::domain::{ItemId, RankList};
use crate::error::{Error, Result};
use crate::metrics::fairness_gradient_unchecked;

use super::{credit_slot, RankContext, RankRequest, TieBreak};

/// Per-candidate scores, aligned with the request's candidate list.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreVector(pub Vec<f64>);

impl ScoreVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Ordering of candidate `a` before candidate `b`: `Less` means `a` ranks
/// higher.
#[inline]
pub(crate) fn precedence(
    scores: &[f64],
    req: &RankRequest<'_>,
    a: usize,
    b: usize,
    _tie: TieBreak,
) -> Ordering {
    scores[b]
        .total_cmp(&scores[a])
        .then_with(|| req.relevance[b].total_cmp(&req.relevance[a]))
        .then_with(|| req.candidates[a].cmp(&req.candidates[b]))
}

/// Top `k` candidates by descending score under the tie-break rule.
pub fn rank_by_scores(
    scores: &ScoreVector,
    req: &RankRequest<'_>,
    k: usize,
    tie: TieBreak,
) -> Result<RankList> {
    let s = scores.as_slice();
    if s.len() != req.candidates.len() {
        return Err(Error::invalid("score vector does not match the candidate list"));
    }
    if s.len() < k {
        return Err(Error::invalid(format!(
            "{} candidates cannot fill a list of {k}",
            s.len()
        )));
    }
    if let Some(i) = s.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!(
            "non-finite score for item {}",
            req.candidates[i]
        )));
    }
    let mut order: Vec<usize> = (0..s.len()).collect();
    let cmp = |a: &usize, b: &usize| precedence(s, req, *a, *b, tie);
    // Selection keeps the per-request cost linear in the candidate count.
    if k > 0 && k < order.len() {
        order.select_nth_unstable_by(k - 1, cmp);
        order.truncate(k);
    }
    order.sort_unstable_by(cmp);
    order.truncate(k);
    Ok(RankList::from_ranker(
        req.user,
        order.into_iter().map(|i| req.candidates[i]).collect(),
    ))
}

/// `grad(item) = r + alpha * B(group) * (v_e + r * v_b)` for each
/// candidate, with `B` computed once from the request's raw gains.
pub fn equityrank_scores(
    ctx: &RankContext<'_>,
    req: &RankRequest<'_>,
    alpha: f64,
) -> Result<ScoreVector> {
    if req.candidates.len() != req.relevance.len() {
        return Err(Error::invalid("relevance does not match the candidate list"));
    }
    if let Some(item) = req.candidates.iter().find(|i| !ctx.catalog.contains(**i)) {
        return Err(Error::invalid(format!("unknown item {item}")));
    }
    if req.gains.len() != ctx.y.len() {
        return Err(Error::invalid("gain vector does not match the provider count"));
    }
    let b = fairness_gradient_unchecked(req.gains, ctx.y);
    Ok(ScoreVector(grad_scores(ctx, req, &b, alpha)))
}

fn grad_scores(ctx: &RankContext<'_>, req: &RankRequest<'_>, b: &[f64], alpha: f64) -> Vec<f64> {
    req.candidates
        .iter()
        .zip(req.relevance)
        .map(|(&item, &r)| {
            let g = ctx.catalog.group_of(item).index();
            r + alpha * b[g] * ctx.profiles[g].item_weight(r)
        })
        .collect()
}

/// Greedy slot filling: before each slot, `score` sees the working gain
/// vector; the best remaining candidate is placed and its expected gain
/// credited.
pub(crate) fn fill_slots<S>(ctx: &RankContext<'_>, req: &RankRequest<'_>, mut score: S) -> RankList
where
    S: FnMut(&[f64], &[bool]) -> Vec<f64>,
{
    let k = ctx.list_size();
    let mut gains = req.gains.to_vec();
    let mut taken = vec![false; req.candidates.len()];
    let mut out: Vec<ItemId> = Vec::with_capacity(k);
    for slot in 0..k {
        let scores = score(&gains, &taken);
        let best = (0..req.candidates.len())
            .filter(|&i| !taken[i])
            .min_by(|&a, &b| precedence(&scores, req, a, b, TieBreak::default()))
            .expect("validated: enough candidates");
        taken[best] = true;
        out.push(req.candidates[best]);
        credit_slot(ctx, &mut gains, req.candidates[best], req.relevance[best], slot);
    }
    RankList::from_ranker(req.user, out)
}

/// EquityRank for one request. With `per_slot`, the fairness gradient is
/// recomputed after every placed slot from the expected gains so far;
/// otherwise candidates are scored once and sorted.
pub fn rank_equityrank(
    ctx: &RankContext<'_>,
    req: &RankRequest<'_>,
    alpha: f64,
    per_slot: bool,
) -> Result<RankList> {
    req.validate(ctx)?;
    if !per_slot {
        let scores = equityrank_scores(ctx, req, alpha)?;
        return rank_by_scores(&scores, req, ctx.list_size(), TieBreak::default());
    }
    Ok(fill_slots(ctx, req, |gains, _| {
        let b = fairness_gradient_unchecked(gains, ctx.y);
        grad_scores(ctx, req, &b, alpha)
    }))
}
