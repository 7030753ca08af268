use super::StatsError;

const PI_LO: f64 = 1e-300;
const PI_HI: f64 = 1.0 - 1e-12;

/// HC scores over j in [1, floor(p/2)] from p-values sorted ascending.
///
/// HC(j) = sqrt(p) * (j/p - pi_(j)) / sqrt(pi_(j) (1 - pi_(j))), with pi_(j)
/// clamped to [1e-300, 1 - 1e-12] before the denominator.
pub fn hc_scores(sorted_pi: &[f64], p: usize) -> Result<Vec<f64>, StatsError> {
    if sorted_pi.len() != p {
        return Err(StatsError::InvalidArgument(
            "sorted_pi length must equal p".into(),
        ));
    }
    for w in sorted_pi.windows(2) {
        if w[0] > w[1] {
            return Err(StatsError::InvalidArgument("p-values not sorted".into()));
        }
    }
    if sorted_pi.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(StatsError::InvalidArgument(
            "p-values must lie in [0,1]".into(),
        ));
    }
    let half = p / 2;
    let sp = (p as f64).sqrt();
    let mut scores = Vec::with_capacity(half);
    for j in 1..=half {
        let pi = sorted_pi[j - 1].clamp(PI_LO, PI_HI);
        let num = j as f64 / p as f64 - pi;
        scores.push(sp * num / (pi * (1.0 - pi)).sqrt());
    }
    Ok(scores)
}

/// The thresholding fragment of a selection: the no-signal test and, when it
/// rejects, the data-driven p-value cutoff.
#[derive(Debug, Clone)]
pub struct HctOutcome {
    pub order: Vec<usize>,
    pub hc: Vec<f64>,
    pub max_hc: f64,
    /// 1-based index attaining the max HC score
    pub shat: usize,
    pub tested_nonempty: bool,
    pub threshold: f64,
    pub selected: Vec<usize>,
}

/// Higher-Criticism thresholding over raw (unsorted) p-values.
///
/// The no-signal test compares max_{j <= p/2} HC(j) against
/// sqrt(2 log log p); below the gate the selection is empty. Otherwise the
/// cutoff index shat is the argmax of HC restricted to ranks with
/// pi_(j) >= 1/p (ties -> smallest j). Without the restriction a single
/// extremely small p-value pins the argmax at rank 1 and the strict cutoff
/// pi_j < pi_(shat) degenerates to the empty set exactly when signals are
/// strongest. Falls back to rank p/2 when every tested rank is below 1/p.
pub fn hct_select(pi: &[f64]) -> Result<HctOutcome, StatsError> {
    let p = pi.len();
    if p < 4 {
        return Err(StatsError::InvalidArgument(format!(
            "need p >= 4 p-values, got {p}"
        )));
    }
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| pi[a].partial_cmp(&pi[b]).unwrap().then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&i| pi[i]).collect();
    let hc = hc_scores(&sorted, p)?;

    let half = hc.len();
    let max_hc = hc.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let floor = 1.0 / p as f64;
    let mut shat = 0usize;
    let mut best = f64::NEG_INFINITY;
    for j in 1..=half {
        if sorted[j - 1] >= floor && hc[j - 1] > best {
            best = hc[j - 1];
            shat = j;
        }
    }
    if shat == 0 {
        shat = half;
    }
    let threshold = sorted[shat - 1];
    let gate = (2.0 * (p as f64).ln().ln()).sqrt();
    let tested_nonempty = max_hc > gate;
    let selected: Vec<usize> = if tested_nonempty {
        (0..p).filter(|&j| pi[j] < threshold).collect()
    } else {
        Vec::new()
    };
    Ok(HctOutcome {
        order,
        hc,
        max_hc,
        shat,
        tested_nonempty,
        threshold,
        selected,
    })
}

/// False discovery rate |selected \ truth| / max(|selected|, 1).
pub fn fdr(selected: &[usize], truth: &[usize]) -> f64 {
    if selected.is_empty() {
        return 0.0;
    }
    let truth: std::collections::HashSet<usize> = truth.iter().copied().collect();
    let false_pos = selected.iter().filter(|j| !truth.contains(j)).count();
    false_pos as f64 / selected.len() as f64
}
