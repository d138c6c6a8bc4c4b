use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::domain::{Catalog, ItemId, ProviderId, RelevanceTable};
use crate::error::{Error, Result};

use super::{sample_profiles, Dataset, ScenarioSpec};

/// Shape of a synthetic dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorSpec {
    pub n_users: usize,
    pub n_items: usize,
    pub n_providers: usize,
    /// Group sizes follow `rank^(-skew)`; 0 gives equal groups.
    pub group_size_skew: f64,
    pub latent_dim: usize,
    /// Fraction of items each user keeps a nonzero relevance for.
    pub sparsity: f64,
    pub seed: u64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            n_users: 500,
            n_items: 1000,
            n_providers: 20,
            group_size_skew: 0.8,
            latent_dim: 16,
            sparsity: 0.05,
            seed: 0,
        }
    }
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_users == 0 || self.n_items == 0 || self.n_providers == 0 || self.latent_dim == 0 {
            return Err(Error::invalid("generator sizes must be positive"));
        }
        if self.n_providers > self.n_items {
            return Err(Error::invalid(format!(
                "{} providers cannot each own one of {} items",
                self.n_providers, self.n_items
            )));
        }
        if !(self.group_size_skew >= 0.0 && self.group_size_skew.is_finite()) {
            return Err(Error::invalid("group size skew must be >= 0"));
        }
        if !(self.sparsity > 0.0 && self.sparsity <= 1.0) {
            return Err(Error::invalid(format!("sparsity {} outside (0, 1]", self.sparsity)));
        }
        Ok(())
    }
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Latent-factor relevance: `r = logistic(<u, v> / sqrt(dim))` with
/// standard normal factors, keeping a `sparsity` fraction of items per user
/// (at least one) chosen uniformly.
pub fn generate_relevance<R: Rng + ?Sized>(spec: &GeneratorSpec, rng: &mut R) -> Result<RelevanceTable> {
    spec.validate()?;
    let d = spec.latent_dim;
    let scale = (d as f64).sqrt();
    let mut draw = |len: usize| -> Vec<f64> { (0..len).map(|_| StandardNormal.sample(rng)).collect() };
    let item_factors = draw(spec.n_items * d);
    let user_factors = draw(spec.n_users * d);
    let keep = ((spec.sparsity * spec.n_items as f64).round() as usize).clamp(1, spec.n_items);
    let mut rows = Vec::with_capacity(spec.n_users);
    for u in 0..spec.n_users {
        let uf = &user_factors[u * d..(u + 1) * d];
        let mut kept: Vec<usize> = index::sample(rng, spec.n_items, keep).into_vec();
        kept.sort_unstable();
        let row = kept
            .into_iter()
            .map(|i| {
                let vf = &item_factors[i * d..(i + 1) * d];
                let dot: f64 = uf.iter().zip(vf).map(|(a, b)| a * b).sum();
                (ItemId::from(i), logistic(dot / scale))
            })
            .collect();
        rows.push(row);
    }
    RelevanceTable::from_rows(spec.n_items, rows)
}

/// Group sizes proportional to `rank^(-skew)`, each at least 1, summing to
/// `n_items` (largest-remainder rounding).
pub fn group_sizes(n_items: usize, n_providers: usize, skew: f64) -> Result<Vec<usize>> {
    if n_providers == 0 || n_providers > n_items {
        return Err(Error::invalid(format!(
            "cannot split {n_items} items into {n_providers} nonempty groups"
        )));
    }
    if !(skew >= 0.0 && skew.is_finite()) {
        return Err(Error::invalid("group size skew must be >= 0"));
    }
    let weights: Vec<f64> = (1..=n_providers).map(|r| (r as f64).powf(-skew)).collect();
    let total: f64 = weights.iter().sum();
    let ideal: Vec<f64> = weights.iter().map(|w| n_items as f64 * w / total).collect();
    let mut sizes: Vec<usize> = ideal.iter().map(|x| (x.floor() as usize).max(1)).collect();
    loop {
        let rem: Vec<f64> = ideal.iter().zip(&sizes).map(|(x, &s)| x - s as f64).collect();
        let remainder = |g: usize| rem[g];
        let assigned: usize = sizes.iter().sum();
        if assigned == n_items {
            break;
        }
        if assigned < n_items {
            let g = (0..n_providers)
                .max_by(|&a, &b| remainder(a).total_cmp(&remainder(b)).then(b.cmp(&a)))
                .expect("nonempty");
            sizes[g] += 1;
        } else {
            let g = (0..n_providers)
                .filter(|&g| sizes[g] > 1)
                .min_by(|&a, &b| remainder(a).total_cmp(&remainder(b)).then(b.cmp(&a)))
                .ok_or_else(|| Error::invalid("infeasible group sizes"))?;
            sizes[g] -= 1;
        }
    }
    Ok(sizes)
}

/// Contiguous blocks of [`group_sizes`] with item ids shuffled.
pub fn assign_groups<R: Rng + ?Sized>(
    n_items: usize,
    n_providers: usize,
    skew: f64,
    rng: &mut R,
) -> Result<Catalog> {
    let sizes = group_sizes(n_items, n_providers, skew)?;
    let mut group_of: Vec<ProviderId> = sizes
        .iter()
        .enumerate()
        .flat_map(|(g, &s)| std::iter::repeat_n(ProviderId::from(g), s))
        .collect();
    group_of.shuffle(rng);
    Catalog::new(group_of, n_providers)
}

/// Catalog, profiles and relevance from one seed. Each part draws from its
/// own stream so changing one size does not reshuffle the others.
pub fn generate_dataset(spec: &GeneratorSpec, scenario: &ScenarioSpec) -> Result<Dataset> {
    spec.validate()?;
    let stream = |s: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(s);
        rng
    };
    let catalog = assign_groups(spec.n_items, spec.n_providers, spec.group_size_skew, &mut stream(1))?;
    let profiles = sample_profiles(spec.n_providers, scenario, &mut stream(2))?;
    let relevance = generate_relevance(spec, &mut stream(3))?;
    Dataset::new(catalog, profiles, relevance)
}
