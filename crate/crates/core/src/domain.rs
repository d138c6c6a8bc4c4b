//! Shared domain types: catalog partition, provider profiles, the
//! position-bias examination model, rank lists and relevance tables.
//!
//! Ids are dense and 0-based. External string ids live in the dataset
//! layer (`synth::Dataset`) and never reach the hot loops.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! dense_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl From<usize> for $name {
            #[inline]
            fn from(i: usize) -> Self {
                $name(i as u32)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

dense_id!(
    /// Dense item index in `0..n`.
    ItemId
);
dense_id!(
    /// Dense user index in `0..|U|`.
    UserId
);
dense_id!(
    /// Dense provider (group) index in `0..m`.
    ProviderId
);

/// Evaluation protocol: all lists at once on true relevance, or one
/// request per step with learned relevance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Offline,
    Online,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Offline => "offline",
            Mode::Online => "online",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "offline" => Ok(Mode::Offline),
            "online" => Ok(Mode::Online),
            other => Err(Error::invalid(format!("unknown mode '{other}'"))),
        }
    }
}

/// Items partitioned into provider groups.
#[derive(Clone, Debug, PartialEq)]
pub struct Catalog {
    group_of: Vec<ProviderId>,
    items_of: Vec<Vec<ItemId>>,
}

impl Catalog {
    /// Builds the partition from the item → provider map. Every provider in
    /// `0..provider_count` must own at least one item.
    pub fn new(group_of: Vec<ProviderId>, provider_count: usize) -> Result<Self> {
        if group_of.is_empty() {
            return Err(Error::invalid("catalog has no items"));
        }
        if provider_count == 0 {
            return Err(Error::invalid("catalog has no providers"));
        }
        let mut items_of = vec![Vec::new(); provider_count];
        for (item, g) in group_of.iter().enumerate() {
            let slot = items_of.get_mut(g.index()).ok_or_else(|| {
                Error::invalid(format!(
                    "item {item} maps to provider {g} but only {provider_count} providers exist"
                ))
            })?;
            slot.push(ItemId::from(item));
        }
        if let Some(g) = items_of.iter().position(Vec::is_empty) {
            return Err(Error::invalid(format!("provider {g} owns no items")));
        }
        Ok(Catalog { group_of, items_of })
    }

    pub fn item_count(&self) -> usize {
        self.group_of.len()
    }

    pub fn provider_count(&self) -> usize {
        self.items_of.len()
    }

    #[inline]
    pub fn group_of(&self, item: ItemId) -> ProviderId {
        self.group_of[item.index()]
    }

    pub fn items_of(&self, g: ProviderId) -> &[ItemId] {
        &self.items_of[g.index()]
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        self.items_of.iter().map(Vec::len).collect()
    }

    pub fn group_map(&self) -> &[ProviderId] {
        &self.group_of
    }

    pub fn contains(&self, item: ItemId) -> bool {
        item.index() < self.group_of.len()
    }
}

/// Per-provider gain weights and expected gain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProviderProfile {
    /// Gain per unit of expected examination.
    pub v_e: f64,
    /// Gain per purchase.
    pub v_b: f64,
    /// Expected gain weight; fairness asks for gains proportional to it.
    pub y: f64,
}

impl ProviderProfile {
    pub fn new(v_e: f64, v_b: f64, y: f64) -> Result<Self> {
        let p = ProviderProfile { v_e, v_b, y };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_e >= 0.0 && self.v_e.is_finite()) {
            return Err(Error::invalid(format!("v_e must be >= 0, got {}", self.v_e)));
        }
        if !(self.v_b >= 0.0 && self.v_b.is_finite()) {
            return Err(Error::invalid(format!("v_b must be >= 0, got {}", self.v_b)));
        }
        if !(self.y > 0.0 && self.y.is_finite()) {
            return Err(Error::invalid(format!("y must be > 0, got {}", self.y)));
        }
        Ok(())
    }

    /// Expected gain of one examination-weighted slot holding an item of
    /// relevance `r`, before the position weight: `v_e + r * v_b`.
    #[inline]
    pub fn item_weight(&self, r: f64) -> f64 {
        self.v_e + r * self.v_b
    }
}

/// Position-bias examination model with a hard cutoff at the list size.
#[derive(Clone, Debug, PartialEq)]
pub struct PositionModel {
    probs: Vec<f64>,
}

impl PositionModel {
    /// `p_k = 1 / (log2(k) + 1)` for `k <= list_size`.
    pub fn new(list_size: usize) -> Result<Self> {
        if list_size == 0 {
            return Err(Error::invalid("list size must be positive"));
        }
        let probs = (1..=list_size)
            .map(|k| 1.0 / ((k as f64).log2() + 1.0))
            .collect();
        Ok(PositionModel { probs })
    }

    pub fn list_size(&self) -> usize {
        self.probs.len()
    }

    /// Examination probabilities for positions `1..=K`, 0-indexed.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability at 0-based slot `slot`; 0 past the cutoff.
    #[inline]
    pub fn at_slot(&self, slot: usize) -> f64 {
        self.probs.get(slot).copied().unwrap_or(0.0)
    }
}

/// Examination probability at 1-based position `k`.
pub fn examination_prob(k: i64, pm: &PositionModel) -> Result<f64> {
    if k < 1 {
        return Err(Error::invalid(format!("position must be >= 1, got {k}")));
    }
    Ok(pm.at_slot((k - 1) as usize))
}

/// The top-K list served to one user.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankList {
    pub user: UserId,
    positions: Vec<ItemId>,
}

impl RankList {
    pub fn new(user: UserId, positions: Vec<ItemId>, list_size: usize, catalog: &Catalog) -> Result<Self> {
        if positions.len() != list_size {
            return Err(Error::invalid(format!(
                "rank list has {} items, expected {list_size}",
                positions.len()
            )));
        }
        let mut seen = vec![false; catalog.item_count()];
        for &item in &positions {
            if !catalog.contains(item) {
                return Err(Error::invalid(format!("unknown item {item}")));
            }
            if std::mem::replace(&mut seen[item.index()], true) {
                return Err(Error::invalid(format!("item {item} appears twice")));
            }
        }
        Ok(RankList { user, positions })
    }

    /// Constructor for lists produced by the rankers, which guarantee the
    /// invariants by construction.
    pub(crate) fn from_ranker(user: UserId, positions: Vec<ItemId>) -> Self {
        debug_assert!({
            let mut sorted = positions.clone();
            sorted.sort_unstable();
            sorted.windows(2).all(|w| w[0] != w[1])
        });
        RankList { user, positions }
    }

    pub fn items(&self) -> &[ItemId] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// `(0-based slot, item)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, ItemId)> + '_ {
        self.positions.iter().copied().enumerate()
    }
}

/// Sparse user × item relevance probabilities. Absent pairs read as 0.
#[derive(Clone, Debug, PartialEq)]
pub struct RelevanceTable {
    item_count: usize,
    rows: Vec<Vec<(ItemId, f64)>>,
}

impl RelevanceTable {
    /// Rows must hold valid item ids; values must lie in `[0, 1]`. Zero
    /// entries are dropped and rows are sorted by item id.
    pub fn from_rows(item_count: usize, rows: Vec<Vec<(ItemId, f64)>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("relevance table has no users"));
        }
        let mut clean = Vec::with_capacity(rows.len());
        for (u, mut row) in rows.into_iter().enumerate() {
            for &(item, r) in &row {
                if item.index() >= item_count {
                    return Err(Error::invalid(format!("user {u}: unknown item {item}")));
                }
                if !(0.0..=1.0).contains(&r) {
                    return Err(Error::invalid(format!(
                        "user {u}, item {item}: relevance {r} outside [0, 1]"
                    )));
                }
            }
            row.retain(|&(_, r)| r > 0.0);
            row.sort_unstable_by_key(|&(item, _)| item);
            if row.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::invalid(format!("user {u}: duplicate item entry")));
            }
            clean.push(row);
        }
        Ok(RelevanceTable {
            item_count,
            rows: clean,
        })
    }

    pub fn from_dense(dense: &[Vec<f64>]) -> Result<Self> {
        let item_count = dense.first().map_or(0, Vec::len);
        if dense.iter().any(|row| row.len() != item_count) {
            return Err(Error::invalid("ragged dense relevance matrix"));
        }
        let rows = dense
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(i, &r)| (ItemId::from(i), r))
                    .collect()
            })
            .collect();
        Self::from_rows(item_count, rows)
    }

    pub fn user_count(&self) -> usize {
        self.rows.len()
    }

    pub fn item_count(&self) -> usize {
        self.item_count
    }

    pub fn get(&self, user: UserId, item: ItemId) -> f64 {
        let row = &self.rows[user.index()];
        match row.binary_search_by_key(&item, |&(i, _)| i) {
            Ok(pos) => row[pos].1,
            Err(_) => 0.0,
        }
    }

    /// Nonzero entries of one user, sorted by item id.
    pub fn row(&self, user: UserId) -> &[(ItemId, f64)] {
        &self.rows[user.index()]
    }

    pub fn dense_row(&self, user: UserId) -> Vec<f64> {
        let mut out = vec![0.0; self.item_count];
        for &(item, r) in self.row(user) {
            out[item.index()] = r;
        }
        out
    }

    /// Mean relevance of every item over all users (absent pairs count as 0).
    pub fn item_means(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.item_count];
        for row in &self.rows {
            for &(item, r) in row {
                sums[item.index()] += r;
            }
        }
        let users = self.rows.len() as f64;
        sums.iter_mut().for_each(|s| *s /= users);
        sums
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}
