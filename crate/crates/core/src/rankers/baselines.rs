//! Group-balancing baselines adapted to the gain-based fairness measure.
//! Each works on the imbalance ratio `D(g) = G_raw(g) / y_g`.

use crate::domain::{ProviderId, RankList};
use crate::error::{Error, Result};

use super::scoring::{fill_slots, rank_by_scores, ScoreVector};
use super::{RankContext, RankRequest, TieBreak};

fn imbalance(gains: &[f64], y: &[f64]) -> Vec<f64> {
    gains.iter().zip(y).map(|(g, y)| g / y).collect()
}

/// The provider with the smallest imbalance among those that still own an
/// untaken candidate; lower id wins ties.
fn worst_off_group(ctx: &RankContext<'_>, req: &RankRequest<'_>, d: &[f64], taken: &[bool]) -> ProviderId {
    req.candidates
        .iter()
        .zip(taken)
        .filter(|(_, &t)| !t)
        .map(|(&item, _)| ctx.catalog.group_of(item))
        .min_by(|a, b| d[a.index()].total_cmp(&d[b.index()]).then(a.cmp(b)))
        .expect("validated: enough candidates")
}

/// PoorK: every slot goes to the worst-off provider's most relevant
/// remaining candidate; the slot's expected gain is credited before the
/// next slot.
pub fn rank_poork(ctx: &RankContext<'_>, req: &RankRequest<'_>) -> Result<RankList> {
    req.validate(ctx)?;
    Ok(fill_slots(ctx, req, |gains, taken| {
        let d = imbalance(gains, ctx.y);
        let worst = worst_off_group(ctx, req, &d, taken);
        req.candidates
            .iter()
            .map(|&item| if ctx.catalog.group_of(item) == worst { 1.0 } else { 0.0 })
            .collect()
    }))
}

/// FairCo*: `score = r + alpha * err(group)` where
/// `err(g) = max(0, max_g' D(g') - D(g))` boosts lagging providers only.
pub fn rank_fairco_star(
    ctx: &RankContext<'_>,
    req: &RankRequest<'_>,
    alpha: f64,
    per_slot: bool,
) -> Result<RankList> {
    req.validate(ctx)?;
    let score = |gains: &[f64]| -> Vec<f64> {
        let d = imbalance(gains, ctx.y);
        let d_max = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        req.candidates
            .iter()
            .zip(req.relevance)
            .map(|(&item, &r)| {
                let err = (d_max - d[ctx.catalog.group_of(item).index()]).max(0.0);
                r + alpha * err
            })
            .collect()
    };
    if per_slot {
        Ok(fill_slots(ctx, req, |gains, _| score(gains)))
    } else {
        rank_by_scores(&ScoreVector(score(req.gains)), req, ctx.list_size(), TieBreak::default())
    }
}

/// MMF*: per slot, `score = (1 - alpha) * r_norm + alpha * [group is worst off]`
/// with `r_norm` the min-max normalized relevance of the remaining
/// candidates. `alpha = 1` reproduces PoorK exactly; `alpha = 0` is TopK.
pub fn rank_mmf_star(ctx: &RankContext<'_>, req: &RankRequest<'_>, alpha: f64) -> Result<RankList> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("MMF* alpha={alpha} outside [0, 1]")));
    }
    req.validate(ctx)?;
    Ok(fill_slots(ctx, req, |gains, taken| {
        let d = imbalance(gains, ctx.y);
        let worst = worst_off_group(ctx, req, &d, taken);
        let (lo, hi) = req
            .relevance
            .iter()
            .zip(taken)
            .filter(|(_, &t)| !t)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (&r, _)| {
                (lo.min(r), hi.max(r))
            });
        let span = hi - lo;
        req.candidates
            .iter()
            .zip(req.relevance)
            .map(|(&item, &r)| {
                let r_norm = if span > 0.0 { (r - lo) / span } else { 1.0 };
                let boost = if ctx.catalog.group_of(item) == worst { 1.0 } else { 0.0 };
                (1.0 - alpha) * r_norm + alpha * boost
            })
            .collect()
    }))
}
