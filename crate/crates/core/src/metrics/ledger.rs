use crate::domain::{Catalog, ItemId, PositionModel, ProviderId, ProviderProfile, RankList};

/// Running provider gains and exposures for one simulation run.
///
/// Raw (cumulative) gains feed the rankers; averaged gains `raw / T` feed
/// the unfairness metric. Both read the same accumulators.
#[derive(Clone, Debug, PartialEq)]
pub struct GainLedger {
    step_count: u64,
    exposure_gain: Vec<f64>,
    purchase_gain: Vec<f64>,
    item_exposure: Vec<f64>,
    group_exposure: Vec<f64>,
}

impl GainLedger {
    pub fn new(item_count: usize, provider_count: usize) -> Self {
        GainLedger {
            step_count: 0,
            exposure_gain: vec![0.0; provider_count],
            purchase_gain: vec![0.0; provider_count],
            item_exposure: vec![0.0; item_count],
            group_exposure: vec![0.0; provider_count],
        }
    }

    pub fn for_catalog(catalog: &Catalog) -> Self {
        Self::new(catalog.item_count(), catalog.provider_count())
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn provider_count(&self) -> usize {
        self.exposure_gain.len()
    }

    pub fn exposure_gain(&self) -> &[f64] {
        &self.exposure_gain
    }

    pub fn purchase_gain(&self) -> &[f64] {
        &self.purchase_gain
    }

    /// Accumulated examination mass per item, summed over users.
    pub fn item_exposure(&self) -> &[f64] {
        &self.item_exposure
    }

    /// Accumulated examination mass per provider (sum over its items).
    pub fn group_exposure(&self) -> &[f64] {
        &self.group_exposure
    }

    pub fn raw_gain(&self, g: ProviderId) -> f64 {
        self.exposure_gain[g.index()] + self.purchase_gain[g.index()]
    }

    pub fn raw_gains(&self) -> Vec<f64> {
        self.exposure_gain
            .iter()
            .zip(&self.purchase_gain)
            .map(|(e, b)| e + b)
            .collect()
    }

    /// `G(g, T) = raw(g) / T`; `None` before the first step.
    pub fn averaged_gains(&self) -> Option<Vec<f64>> {
        if self.step_count == 0 {
            return None;
        }
        let t = self.step_count as f64;
        Some(self.raw_gains().into_iter().map(|g| g / t).collect())
    }

    /// Records one examination-weighted slot: `p` units of exposure and the
    /// exposure gain `p * v_e` for the owner.
    #[inline]
    pub fn add_exposure(&mut self, item: ItemId, group: ProviderId, p: f64, v_e: f64) {
        self.item_exposure[item.index()] += p;
        self.group_exposure[group.index()] += p;
        self.exposure_gain[group.index()] += p * v_e;
    }

    #[inline]
    pub fn add_purchase_gain(&mut self, group: ProviderId, amount: f64) {
        self.purchase_gain[group.index()] += amount;
    }

    pub fn finish_step(&mut self) {
        self.step_count += 1;
    }

    /// Offline accounting: credits the expected gain of every listed item
    /// (exposure `p_k * v_e`, purchase `p_k * r * v_b`) and counts one step.
    pub fn record_expected<F>(
        &mut self,
        list: &RankList,
        relevance: F,
        catalog: &Catalog,
        profiles: &[ProviderProfile],
        pm: &PositionModel,
    ) where
        F: Fn(ItemId) -> f64,
    {
        for (slot, item) in list.iter() {
            let p = pm.at_slot(slot);
            let g = catalog.group_of(item);
            let prof = &profiles[g.index()];
            self.add_exposure(item, g, p, prof.v_e);
            self.add_purchase_gain(g, p * relevance(item) * prof.v_b);
        }
        self.finish_step();
    }
}
