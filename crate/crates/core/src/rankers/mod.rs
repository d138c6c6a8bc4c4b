//! Ranking policies behind one dispatch point: relevance-only TopK, the
//! gain-balancing PoorK, the equity-adapted FairCo* and MMF* baselines, and
//! the gradient ranker EquityRank with its vertical-allocation variant.
//!
//! All policies read raw cumulative provider gains (no `1/T`), so the
//! fairness gradient grows with the amount of traffic already served.

mod baselines;
mod scoring;
mod vertical;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use baselines::{rank_fairco_star, rank_mmf_star, rank_poork};
pub use scoring::{equityrank_scores, rank_by_scores, rank_equityrank, ScoreVector};
pub use vertical::allocate_vertical;

use crate::domain::{Catalog, ItemId, Mode, PositionModel, ProviderProfile, RankList, UserId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PolicyKind {
    TopK,
    PoorK,
    FairCoStar,
    MmfStar,
    EquityRank,
    EquityRankV,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 6] = [
        PolicyKind::TopK,
        PolicyKind::PoorK,
        PolicyKind::FairCoStar,
        PolicyKind::MmfStar,
        PolicyKind::EquityRank,
        PolicyKind::EquityRankV,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::TopK => "TopK",
            PolicyKind::PoorK => "PoorK",
            PolicyKind::FairCoStar => "FairCo*",
            PolicyKind::MmfStar => "MMF*",
            PolicyKind::EquityRank => "EquityRank",
            PolicyKind::EquityRankV => "EquityRank_v",
        }
    }

    /// Whether `alpha` changes the policy's output.
    pub fn uses_alpha(self) -> bool {
        !matches!(self, PolicyKind::TopK | PolicyKind::PoorK)
    }

    pub fn supports(self, mode: Mode) -> bool {
        !(self == PolicyKind::EquityRankV && mode == Mode::Online)
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl From<PolicyKind> for String {
    fn from(kind: PolicyKind) -> String {
        kind.name().to_string()
    }
}

impl TryFrom<String> for PolicyKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric() || *c == '*')
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match key.as_str() {
            "topk" => PolicyKind::TopK,
            "poork" => PolicyKind::PoorK,
            "fairco*" | "faircostar" | "fairco" => PolicyKind::FairCoStar,
            "mmf*" | "mmfstar" | "mmf" => PolicyKind::MmfStar,
            "equityrank" => PolicyKind::EquityRank,
            "equityrankv" => PolicyKind::EquityRankV,
            _ => return Err(Error::invalid(format!("unknown policy '{s}'"))),
        })
    }
}

/// Deterministic ordering among equal scores.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TieBreak {
    /// Score descending, then relevance descending, then item id ascending.
    #[default]
    ScoreRelevanceId,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    pub alpha: f64,
    pub tie_break: TieBreak,
}

impl PolicyConfig {
    pub fn new(kind: PolicyKind, alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::invalid(format!("alpha must be >= 0, got {alpha}")));
        }
        if kind == PolicyKind::MmfStar && alpha > 1.0 {
            return Err(Error::invalid(format!("MMF* needs alpha in [0, 1], got {alpha}")));
        }
        Ok(PolicyConfig {
            kind,
            alpha,
            tie_break: TieBreak::default(),
        })
    }
}

/// Per-run provider data shared by every request.
#[derive(Clone, Copy, Debug)]
pub struct RankContext<'a> {
    pub catalog: &'a Catalog,
    pub profiles: &'a [ProviderProfile],
    /// Expected gain weights, `profiles[g].y`.
    pub y: &'a [f64],
    pub pm: &'a PositionModel,
}

impl RankContext<'_> {
    pub fn list_size(&self) -> usize {
        self.pm.list_size()
    }
}

/// One ranking request: a user, its candidate items with the relevance the
/// policy may use (true or estimated), and the provider gains so far.
#[derive(Clone, Copy, Debug)]
pub struct RankRequest<'a> {
    pub user: UserId,
    pub candidates: &'a [ItemId],
    /// Aligned with `candidates`.
    pub relevance: &'a [f64],
    /// Raw cumulative gain per provider.
    pub gains: &'a [f64],
}

impl RankRequest<'_> {
    pub(crate) fn validate(&self, ctx: &RankContext<'_>) -> Result<()> {
        if self.candidates.len() != self.relevance.len() {
            return Err(Error::invalid(format!(
                "{} candidates but {} relevance values",
                self.candidates.len(),
                self.relevance.len()
            )));
        }
        if self.gains.len() != ctx.catalog.provider_count() {
            return Err(Error::invalid("gain vector does not match the provider count"));
        }
        if let Some(item) = self.candidates.iter().find(|i| !ctx.catalog.contains(**i)) {
            return Err(Error::invalid(format!("unknown item {item}")));
        }
        if self.candidates.len() < ctx.list_size() {
            return Err(Error::invalid(format!(
                "{} candidates cannot fill a list of {}",
                self.candidates.len(),
                ctx.list_size()
            )));
        }
        Ok(())
    }
}

/// TopK: candidates by relevance.
pub fn rank_topk(ctx: &RankContext<'_>, req: &RankRequest<'_>) -> Result<RankList> {
    req.validate(ctx)?;
    let scores = ScoreVector(req.relevance.to_vec());
    rank_by_scores(&scores, req, ctx.list_size(), TieBreak::default())
}

/// Ranks one request with a non-vertical policy.
///
/// Offline, the stateful policies refresh their provider signal after
/// every placed slot using expected gains; online, EquityRank and FairCo*
/// score once per request and sort.
pub fn rank_request(
    policy: &PolicyConfig,
    mode: Mode,
    ctx: &RankContext<'_>,
    req: &RankRequest<'_>,
) -> Result<RankList> {
    let per_slot = mode == Mode::Offline;
    match policy.kind {
        PolicyKind::TopK => rank_topk(ctx, req),
        PolicyKind::PoorK => rank_poork(ctx, req),
        PolicyKind::FairCoStar => rank_fairco_star(ctx, req, policy.alpha, per_slot),
        PolicyKind::MmfStar => rank_mmf_star(ctx, req, policy.alpha),
        PolicyKind::EquityRank => rank_equityrank(ctx, req, policy.alpha, per_slot),
        PolicyKind::EquityRankV => Err(Error::InvalidMode(
            "EquityRank_v allocates all users at once; use allocate_vertical".into(),
        )),
    }
}

/// Online dispatch over estimated relevance.
pub fn online_step_rank(policy: &PolicyConfig, ctx: &RankContext<'_>, req: &RankRequest<'_>) -> Result<RankList> {
    if policy.kind == PolicyKind::EquityRankV {
        return Err(Error::InvalidMode(
            "EquityRank_v is only defined for offline allocation".into(),
        ));
    }
    rank_request(policy, Mode::Online, ctx, req)
}

/// Adds the expected gain of placing a candidate of relevance `r` at `slot`
/// to a working gain vector.
#[inline]
pub(crate) fn credit_slot(
    ctx: &RankContext<'_>,
    gains: &mut [f64],
    item: ItemId,
    r: f64,
    slot: usize,
) {
    let g = ctx.catalog.group_of(item);
    gains[g.index()] += ctx.pm.at_slot(slot) * ctx.profiles[g.index()].item_weight(r);
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::domain::ProviderId;

    /// Owned backing data for a [`RankContext`].
    pub struct Fixture {
        pub catalog: Catalog,
        pub profiles: Vec<ProviderProfile>,
        pub y: Vec<f64>,
        pub pm: PositionModel,
    }

    impl Fixture {
        pub fn new(groups: &[u32], profiles: Vec<ProviderProfile>, k: usize) -> Self {
            let m = profiles.len();
            let catalog = Catalog::new(groups.iter().map(|&g| ProviderId(g)).collect(), m).unwrap();
            let y = profiles.iter().map(|p| p.y).collect();
            Fixture {
                catalog,
                profiles,
                y,
                pm: PositionModel::new(k).unwrap(),
            }
        }

        pub fn ctx(&self) -> RankContext<'_> {
            RankContext {
                catalog: &self.catalog,
                profiles: &self.profiles,
                y: &self.y,
                pm: &self.pm,
            }
        }
    }

    pub fn items(ids: &[u32]) -> Vec<ItemId> {
        ids.iter().map(|&i| ItemId(i)).collect()
    }

    pub fn ids(list: &RankList) -> Vec<u32> {
        list.items().iter().map(|i| i.0).collect()
    }
}
