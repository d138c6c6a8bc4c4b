//! DCG-family effectiveness measures under the position-bias model.

use crate::domain::{ItemId, PositionModel, RankList, RelevanceTable};
use crate::error::{Error, Result};

fn check_cutoff(k_c: usize, pm: &PositionModel) -> Result<()> {
    if k_c == 0 || k_c > pm.list_size() {
        return Err(Error::invalid(format!(
            "cutoff k_c={k_c} must lie in 1..={}",
            pm.list_size()
        )));
    }
    Ok(())
}

/// `sum_{k <= k_c} r(list[k]) * p_k`.
pub fn dcg<F>(list: &RankList, relevance: F, k_c: usize, pm: &PositionModel) -> Result<f64>
where
    F: Fn(ItemId) -> f64,
{
    check_cutoff(k_c, pm)?;
    Ok(list
        .iter()
        .take(k_c)
        .map(|(slot, item)| relevance(item) * pm.at_slot(slot))
        .sum())
}

/// DCG of the relevance-sorted ordering. `values` may be any subset of the
/// user's relevances that contains every nonzero one.
pub fn ideal_dcg(values: &[f64], k_c: usize, pm: &PositionModel) -> Result<f64> {
    check_cutoff(k_c, pm)?;
    // k_c is small; keep a descending top-k buffer instead of sorting.
    let mut top: Vec<f64> = Vec::with_capacity(k_c + 1);
    for &v in values {
        if v <= 0.0 {
            continue;
        }
        if top.len() == k_c && v <= top[k_c - 1] {
            continue;
        }
        let pos = top.partition_point(|&t| t >= v);
        top.insert(pos, v);
        top.truncate(k_c);
    }
    Ok(top
        .iter()
        .enumerate()
        .map(|(slot, v)| v * pm.at_slot(slot))
        .sum())
}

/// Ideal DCG of one user in a relevance table.
pub fn user_ideal_dcg(
    rel: &RelevanceTable,
    user: crate::domain::UserId,
    k_c: usize,
    pm: &PositionModel,
) -> Result<f64> {
    let values: Vec<f64> = rel.row(user).iter().map(|&(_, r)| r).collect();
    ideal_dcg(&values, k_c, pm)
}

/// `dcg / idcg`, with users whose ideal DCG is 0 scoring 1.
pub fn ndcg_from_parts(dcg: f64, idcg: f64) -> f64 {
    if idcg > 0.0 {
        (dcg / idcg).min(1.0)
    } else {
        1.0
    }
}

pub fn ndcg(list: &RankList, rel: &RelevanceTable, k_c: usize, pm: &PositionModel) -> Result<f64> {
    let user = list.user;
    let d = dcg(list, |item| rel.get(user, item), k_c, pm)?;
    let idcg = user_ideal_dcg(rel, user, k_c, pm)?;
    Ok(ndcg_from_parts(d, idcg))
}

/// One step of the discounted running sum: `gamma * prev + ndcg_t`.
pub fn cndcg_update(prev: f64, ndcg_t: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid(format!("gamma={gamma} outside (0, 1]")));
    }
    if !(prev >= 0.0) {
        return Err(Error::invalid(format!("cNDCG accumulator must be >= 0, got {prev}")));
    }
    Ok(gamma * prev + ndcg_t)
}

/// Mean NDCG over the served lists (one per user).
pub fn andcg(lists: &[RankList], rel: &RelevanceTable, k_c: usize, pm: &PositionModel) -> Result<f64> {
    if lists.is_empty() {
        return Err(Error::invalid("aNDCG of an empty list set"));
    }
    let mut total = 0.0;
    for list in lists {
        total += ndcg(list, rel, k_c, pm)?;
    }
    Ok(total / lists.len() as f64)
}
