use crate::domain::{ItemId, RankList, RelevanceTable, UserId};
use crate::error::{Error, Result};
use crate::metrics::{fairness_gradient_unchecked, GainLedger};

use super::RankContext;

/// Vertical allocation for the offline setting.
///
/// Fills position 1 for every user (in the given order), then position 2,
/// and so on. Each `(user, position)` receives the not-yet-listed item with
/// the largest current gradient, and its expected gain is credited to
/// `ledger` before the next assignment. Every user counts as one step.
/// Lists are returned in the order of `users`.
pub fn allocate_vertical(
    ctx: &RankContext<'_>,
    users: &[UserId],
    rel: &RelevanceTable,
    ledger: &mut GainLedger,
    alpha: f64,
) -> Result<Vec<RankList>> {
    let n = ctx.catalog.item_count();
    let k = ctx.list_size();
    if n < k {
        return Err(Error::invalid(format!("{n} items cannot fill lists of {k}")));
    }
    if rel.item_count() != n {
        return Err(Error::invalid("relevance table does not match the catalog"));
    }
    if let Some(u) = users.iter().find(|u| u.index() >= rel.user_count()) {
        return Err(Error::invalid(format!("unknown user {u}")));
    }
    let group_of = ctx.catalog.group_map();
    let mut lists: Vec<Vec<ItemId>> = vec![Vec::with_capacity(k); users.len()];
    let mut row = vec![0.0; n];

    for slot in 0..k {
        let p = ctx.pm.at_slot(slot);
        for (ui, &user) in users.iter().enumerate() {
            row.iter_mut().for_each(|r| *r = 0.0);
            for &(item, r) in rel.row(user) {
                row[item.index()] = r;
            }
            let b = fairness_gradient_unchecked(&ledger.raw_gains(), ctx.y);
            let mut best: Option<(f64, f64, usize)> = None;
            for (i, (&r, g)) in row.iter().zip(group_of).enumerate() {
                let gi = g.index();
                let grad = r + alpha * b[gi] * ctx.profiles[gi].item_weight(r);
                let better = match best {
                    None => true,
                    Some((bs, br, _)) => grad > bs || (grad == bs && r > br),
                };
                if better && !lists[ui].contains(&ItemId::from(i)) {
                    best = Some((grad, r, i));
                }
            }
            let (_, r, i) = best.expect("n >= K leaves a free item");
            let item = ItemId::from(i);
            let g = ctx.catalog.group_of(item);
            let prof = &ctx.profiles[g.index()];
            ledger.add_exposure(item, g, p, prof.v_e);
            ledger.add_purchase_gain(g, p * r * prof.v_b);
            lists[ui].push(item);
        }
    }
    for _ in users {
        ledger.finish_step();
    }
    Ok(users
        .iter()
        .zip(lists)
        .map(|(&u, items)| RankList::from_ranker(u, items))
        .collect())
}
