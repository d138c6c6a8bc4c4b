use crate::domain::ProviderProfile;
use crate::error::{Error, Result};
use crate::metrics::GainLedger;

/// How closely each provider's purchase-to-exposure gain ratio tracks its
/// declared `v_b / v_e`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Alignment {
    /// `mean_g (Gain_b/Gain_e - v_b/v_e)^2`.
    pub msd: f64,
    /// Pearson correlation of the two ratio vectors; NaN on zero variance.
    pub pearson: f64,
    /// Providers skipped for lacking exposure gain or exposure weight.
    pub excluded: usize,
}

/// Pearson correlation; NaN when either side has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    if n < 2 || n != b.len() {
        return f64::NAN;
    }
    let mean_a = a.iter().sum::<f64>() / n as f64;
    let mean_b = b.iter().sum::<f64>() / n as f64;
    let (mut cov, mut var_a, mut var_b) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - mean_a, y - mean_b);
        cov += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    if var_a <= 0.0 || var_b <= 0.0 {
        return f64::NAN;
    }
    (cov / (var_a.sqrt() * var_b.sqrt())).clamp(-1.0, 1.0)
}

/// MSD and Pearson correlation between realized and target ratios.
pub fn ratio_alignment(observed: &[f64], target: &[f64]) -> Result<(f64, f64)> {
    if observed.is_empty() || observed.len() != target.len() {
        return Err(Error::invalid("ratio vectors must be nonempty and of equal length"));
    }
    let msd = observed
        .iter()
        .zip(target)
        .map(|(o, t)| (o - t).powi(2))
        .sum::<f64>()
        / observed.len() as f64;
    Ok((msd, pearson(observed, target)))
}

pub fn alignment_diagnostics(ledger: &GainLedger, profiles: &[ProviderProfile]) -> Result<Alignment> {
    if profiles.len() != ledger.provider_count() {
        return Err(Error::invalid("profile count does not match the ledger"));
    }
    let mut observed = Vec::with_capacity(profiles.len());
    let mut target = Vec::with_capacity(profiles.len());
    for ((&e, &b), prof) in ledger
        .exposure_gain()
        .iter()
        .zip(ledger.purchase_gain())
        .zip(profiles)
    {
        if e > 0.0 && prof.v_e > 0.0 {
            observed.push(b / e);
            target.push(prof.v_b / prof.v_e);
        }
    }
    let excluded = profiles.len() - observed.len();
    if observed.is_empty() {
        return Err(Error::invalid("no provider has positive exposure gain"));
    }
    if excluded > 0 {
        log::warn!("alignment diagnostics: {excluded} provider(s) without exposure gain excluded");
    }
    let (msd, pearson) = ratio_alignment(&observed, &target)?;
    Ok(Alignment { msd, pearson, excluded })
}
