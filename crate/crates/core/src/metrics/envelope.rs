/// Best effectiveness reachable under each unfairness ceiling.
///
/// Emits one `(threshold, effectiveness)` step per distinct unfairness value,
/// ascending; effectiveness is the running maximum so the curve never dips.
/// Points with a non-finite coordinate are ignored.
pub fn tradeoff_envelope(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut sorted: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(u, e)| u.is_finite() && e.is_finite())
        .collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    let mut best = f64::NEG_INFINITY;
    for (u, e) in sorted {
        best = best.max(e);
        match out.last_mut() {
            Some(last) if last.0 == u => last.1 = best,
            _ => out.push((u, best)),
        }
    }
    out
}

/// Envelope value at an arbitrary ceiling, `None` when no point qualifies.
pub fn envelope_at(envelope: &[(f64, f64)], threshold: f64) -> Option<f64> {
    let idx = envelope.partition_point(|&(u, _)| u <= threshold);
    idx.checked_sub(1).map(|i| envelope[i].1)
}
