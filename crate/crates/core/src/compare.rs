//! Two-corpus frequency comparison with Wilson score intervals.
//!
//! Heading frequencies are per-article proportions. The interval family
//! is the Wilson score interval, which stays well-behaved at zero and
//! small counts where rare headings live; the default `z` of 1.959964
//! gives 95% coverage. Two headings differ significantly when their
//! closed intervals do not overlap; touching intervals do not count as
//! different.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::num::Real;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompareError {
    #[error("degenerate sample: n = 0")]
    DegenerateSample,
    #[error("count {k} exceeds sample size {n}")]
    CountExceedsSample { k: u64, n: u64 },
    #[error("z must be positive and finite")]
    BadZ,
}

/// Wilson score interval for `k` successes out of `n` trials.
///
/// Bounds are clamped into `[0, 1]`, the lower bound is exactly 0 when
/// `k = 0`, and the `k <-> n - k` mirror symmetry holds exactly:
/// `lo(k) = 1 - hi(n - k)` bit for bit.
pub fn wilson_interval<T: Real>(k: u64, n: u64, z: T) -> Result<(T, T), CompareError> {
    if n == 0 {
        return Err(CompareError::DegenerateSample);
    }
    if k > n {
        return Err(CompareError::CountExceedsSample { k, n });
    }
    if !z.is_finite() || z <= T::zero() {
        return Err(CompareError::BadZ);
    }
    if 2 * k > n {
        let (lo, hi) = wilson_lower_half(n - k, n, z);
        return Ok((T::one() - hi, T::one() - lo));
    }
    Ok(wilson_lower_half(k, n, z))
}

/// The raw formula, only evaluated for `2k <= n`; the mirror above
/// covers the rest, which is what makes the symmetry exact.
fn wilson_lower_half<T: Real>(k: u64, n: u64, z: T) -> (T, T) {
    let one = T::one();
    let kf = T::from_count(k);
    let nf = T::from_count(n);
    let p = kf / nf;
    let zz = z * z;
    let denom = one + zz / nf;
    let center = (p + zz / (nf + nf)) / denom;
    let half = z * (p * (one - p) / nf + zz / ((nf + nf) * (nf + nf))).sqrt() / denom;

    let mut lo = (center - half).max(T::zero());
    let hi = (center + half).min(one);
    if k == 0 {
        lo = T::zero();
    }
    if 2 * k == n {
        // Center is exactly 1/2 algebraically; force the bounds to
        // mirror each other so self-symmetry holds bit for bit.
        lo = one - hi;
    }
    (lo, hi)
}

/// Significance verdict for one heading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    AOnly,
    BOnly,
    ASignificantlyMore,
    BSignificantlyMore,
    NoSignificantDifference,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::AOnly => "a_only",
            Verdict::BOnly => "b_only",
            Verdict::ASignificantlyMore => "a_significantly_more",
            Verdict::BSignificantlyMore => "b_significantly_more",
            Verdict::NoSignificantDifference => "no_significant_difference",
        }
    }

    fn swapped(self) -> Verdict {
        match self {
            Verdict::AOnly => Verdict::BOnly,
            Verdict::BOnly => Verdict::AOnly,
            Verdict::ASignificantlyMore => Verdict::BSignificantlyMore,
            Verdict::BSignificantlyMore => Verdict::ASignificantlyMore,
            Verdict::NoSignificantDifference => Verdict::NoSignificantDifference,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One heading's comparison between the two corpora.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow<T = crate::Score> {
    pub heading_id: String,
    pub name: String,
    pub k_a: u64,
    pub n_a: u64,
    pub k_b: u64,
    pub n_b: u64,
    pub ci_a: (T, T),
    pub ci_b: (T, T),
    pub verdict: Verdict,
}

/// Heading counts keyed by heading id, with a display name.
pub type HeadingFreqs = BTreeMap<String, (String, u64)>;

/// Compare per-heading frequencies between corpus A (`n_a` articles) and
/// corpus B (`n_b` articles). Headings absent from both corpora are
/// omitted; headings present in only one get the corresponding verdict
/// regardless of interval overlap. Output is sorted by verdict, then
/// heading name, then id.
pub fn compare_corpora<T: Real>(
    counts_a: &HeadingFreqs,
    n_a: u64,
    counts_b: &HeadingFreqs,
    n_b: u64,
    z: T,
) -> Result<Vec<ComparisonRow<T>>, CompareError> {
    if n_a == 0 || n_b == 0 {
        return Err(CompareError::DegenerateSample);
    }

    let mut rows = Vec::new();
    let mut ids: Vec<&String> = counts_a.keys().chain(counts_b.keys()).collect();
    ids.sort();
    ids.dedup();

    for heading_id in ids {
        let (name_a, k_a) = counts_a
            .get(heading_id)
            .map(|(name, k)| (Some(name), *k))
            .unwrap_or((None, 0));
        let (name_b, k_b) = counts_b
            .get(heading_id)
            .map(|(name, k)| (Some(name), *k))
            .unwrap_or((None, 0));
        if k_a == 0 && k_b == 0 {
            continue;
        }
        let name = name_a
            .or(name_b)
            .cloned()
            .unwrap_or_else(|| heading_id.clone());

        let ci_a = wilson_interval(k_a, n_a, z)?;
        let ci_b = wilson_interval(k_b, n_b, z)?;

        let verdict = interval_verdict(ci_a, ci_b, k_a, n_a, k_b, n_b);

        rows.push(ComparisonRow {
            heading_id: heading_id.clone(),
            name,
            k_a,
            n_a,
            k_b,
            n_b,
            ci_a,
            ci_b,
            verdict,
        });
    }

    rows.sort_by(|a, b| {
        a.verdict
            .cmp(&b.verdict)
            .then_with(|| a.name.cmp(&b.name))
            .then_with(|| a.heading_id.cmp(&b.heading_id))
    });
    Ok(rows)
}

/// The verdict a row would get with corpora A and B exchanged.
pub fn swapped_verdict(verdict: Verdict) -> Verdict {
    verdict.swapped()
}

/// Classify one heading given both confidence intervals. Presence in
/// only one corpus takes precedence; otherwise the intervals must be
/// disjoint as closed sets, so intervals that merely touch are not a
/// significant difference. The larger frequency side wins, compared
/// exactly in integers.
pub fn interval_verdict<T: Real>(
    ci_a: (T, T),
    ci_b: (T, T),
    k_a: u64,
    n_a: u64,
    k_b: u64,
    n_b: u64,
) -> Verdict {
    if k_a > 0 && k_b == 0 {
        Verdict::AOnly
    } else if k_b > 0 && k_a == 0 {
        Verdict::BOnly
    } else if ci_a.1 < ci_b.0 || ci_b.1 < ci_a.0 {
        if (k_a as u128) * (n_b as u128) > (k_b as u128) * (n_a as u128) {
            Verdict::ASignificantlyMore
        } else {
            Verdict::BSignificantlyMore
        }
    } else {
        Verdict::NoSignificantDifference
    }
}
