//! Gain-based provider fairness: per-list expected gain, the pairwise
//! unfairness measure, its analytic gradient, and the exposure-fairness
//! special case.

use crate::domain::{Catalog, ItemId, PositionModel, ProviderId, ProviderProfile, RankList, RelevanceTable};
use crate::error::{Error, Result};
use crate::metrics::GainLedger;

fn check_pairwise(gains: &[f64], y: &[f64]) -> Result<()> {
    if gains.len() != y.len() {
        return Err(Error::invalid(format!(
            "gain vector has {} providers, expected-gain vector has {}",
            gains.len(),
            y.len()
        )));
    }
    if gains.len() < 2 {
        return Err(Error::invalid("pairwise unfairness needs at least 2 providers"));
    }
    if let Some(g) = y.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::invalid(format!("provider {g}: expected gain must be > 0")));
    }
    Ok(())
}

/// Expected gain harvested by provider `g` from one list:
/// `sum p_rank * (r * v_b + v_e)` over `g`'s listed items.
pub fn expected_gain<F>(
    g: ProviderId,
    list: &RankList,
    relevance: F,
    catalog: &Catalog,
    profiles: &[ProviderProfile],
    pm: &PositionModel,
) -> f64
where
    F: Fn(ItemId) -> f64,
{
    let prof = &profiles[g.index()];
    list.iter()
        .filter(|&(_, item)| catalog.group_of(item) == g)
        .map(|(slot, item)| pm.at_slot(slot) * prof.item_weight(relevance(item)))
        .sum()
}

/// Mean over ordered provider pairs of `(G_i y_j - G_j y_i)^2`.
///
/// Diagonal terms vanish and are skipped; each unordered pair is counted
/// twice. Zero exactly when gains are proportional to `y`.
pub fn unfairness(gains: &[f64], y: &[f64]) -> Result<f64> {
    check_pairwise(gains, y)?;
    let m = gains.len();
    let mut sum = 0.0;
    for i in 0..m {
        for j in (i + 1)..m {
            let d = gains[i] * y[j] - gains[j] * y[i];
            sum += d * d;
        }
    }
    Ok(2.0 * sum / (m * (m - 1)) as f64)
}

/// Analytic derivative of `-unfairness` with respect to each provider's
/// gain: `4/(m(m-1)) * (y_g * sum G'y' - G_g * sum y'^2)`.
pub fn fairness_gradient(gains: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    check_pairwise(gains, y)?;
    Ok(fairness_gradient_unchecked(gains, y))
}

/// [`fairness_gradient`] without validation, for the rankers' hot path.
pub(crate) fn fairness_gradient_unchecked(gains: &[f64], y: &[f64]) -> Vec<f64> {
    let m = gains.len();
    if m < 2 {
        return vec![0.0; m];
    }
    let cross: f64 = gains.iter().zip(y).map(|(g, y)| g * y).sum();
    let y_sq: f64 = y.iter().map(|v| v * v).sum();
    let scale = 4.0 / (m * (m - 1)) as f64;
    gains
        .iter()
        .zip(y)
        .map(|(g, yg)| scale * (yg * cross - g * y_sq))
        .collect()
}

/// Mean relevance of each provider's items, where an item's merit is its
/// relevance averaged over all users.
pub fn group_mean_relevance(catalog: &Catalog, rel: &RelevanceTable) -> Vec<f64> {
    let item_means = rel.item_means();
    (0..catalog.provider_count())
        .map(|g| {
            let items = catalog.items_of(ProviderId::from(g));
            items.iter().map(|i| item_means[i.index()]).sum::<f64>() / items.len() as f64
        })
        .collect()
}

/// Exposure fairness as a special case of the gain metric: gains are the
/// averaged examination mass of each provider (`v_e = 1`, `v_b = 0`) and the
/// expected gain of a provider is the mean relevance of its items.
pub fn exposure_unfairness(ledger: &GainLedger, catalog: &Catalog, rel: &RelevanceTable) -> Result<f64> {
    if ledger.step_count() == 0 {
        return Err(Error::invalid("ledger has no recorded steps"));
    }
    let merit = group_mean_relevance(catalog, rel);
    if let Some(g) = merit.iter().position(|&r| !(r > 0.0)) {
        return Err(Error::DegenerateGroup { group: g });
    }
    let t = ledger.step_count() as f64;
    let gains: Vec<f64> = ledger.group_exposure().iter().map(|e| e / t).collect();
    unfairness(&gains, &merit)
}
