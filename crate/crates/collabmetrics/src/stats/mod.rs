//! Non-parametric statistics battery: tied ranking, Kruskal-Wallis,
//! Mann-Whitney U, Spearman correlation, and the p-value kernels.
//!
//! All tests are two-sided and rank-based, so they are invariant under any
//! strictly monotone transformation of the pooled data.

mod dist;

pub use dist::{chi_square_sf, normal_sf, t_sf};
pub(crate) use dist::{normal_cdf, reg_inc_beta};

use crate::indicators::{Form, PropensitySet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("empty input")]
    EmptyInput,
    #[error("need at least two groups")]
    TooFewGroups,
    #[error("need at least {needed} observations, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("constant input: rank variance is zero")]
    ConstantInput,
    #[error("domain error: {0}")]
    DomainError(String),
}

/// Significance stars matching the usual table legend.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stars {
    None,
    One,
    Two,
    Three,
}

impl Stars {
    /// `***` iff p < 0.001, `**` iff 0.001 <= p < 0.01, `*` iff 0.01 <= p < 0.05.
    pub fn from_p(p: f64) -> Self {
        if p < 0.001 {
            Stars::Three
        } else if p < 0.01 {
            Stars::Two
        } else if p < 0.05 {
            Stars::One
        } else {
            Stars::None
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Stars::None => "",
            Stars::One => "*",
            Stars::Two => "**",
            Stars::Three => "***",
        }
    }
}

impl std::fmt::Display for Stars {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one hypothesis test.
#[derive(Debug, Clone)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Sample sizes, one per group.
    pub n: Vec<usize>,
    /// Which approximation produced the p-value.
    pub method_note: String,
    pub stars: Stars,
}

impl TestResult {
    fn new(statistic: f64, p_value: f64, n: Vec<usize>, method_note: impl Into<String>) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        TestResult {
            statistic,
            p_value,
            n,
            method_note: method_note.into(),
            stars: Stars::from_p(p_value),
        }
    }
}

fn check_finite(values: &[f64]) -> Result<(), StatsError> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(StatsError::DomainError("NaN in input".into()));
    }
    Ok(())
}

/// Average ranks with ties (1-based). Ranks always sum to n(n+1)/2.
pub fn ranks_with_ties(values: &[f64]) -> Result<Vec<f64>, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    check_finite(values)?;
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // Positions i..j (0-based) share ranks i+1 ..= j, averaged.
        let avg = (i + j + 1) as f64 / 2.0;
        for k in i..j {
            ranks[order[k]] = avg;
        }
        i = j;
    }
    Ok(ranks)
}

/// Sum of t^3 - t over tie groups of the sorted pooled sample.
fn tie_correction_sum(pooled_sorted: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut i = 0;
    while i < pooled_sorted.len() {
        let mut j = i;
        while j < pooled_sorted.len() && pooled_sorted[j] == pooled_sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        sum += t * t * t - t;
        i = j;
    }
    sum
}

/// Kruskal-Wallis H test across two or more groups, with tie correction and
/// a chi-square upper-tail p-value on k-1 degrees of freedom.
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<TestResult, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups);
    }
    if groups.iter().any(|g| g.is_empty()) {
        return Err(StatsError::EmptyInput);
    }
    let sizes: Vec<usize> = groups.iter().map(|g| g.len()).collect();
    let total: usize = sizes.iter().sum();
    if total < 3 {
        return Err(StatsError::TooFewSamples {
            needed: 3,
            got: total,
        });
    }
    let mut pooled = Vec::with_capacity(total);
    for g in groups {
        check_finite(g)?;
        pooled.extend_from_slice(g);
    }
    if pooled.iter().all(|&v| v == pooled[0]) {
        return Ok(TestResult::new(
            0.0,
            1.0,
            sizes,
            "degenerate: all observations equal; p = 1 by convention",
        ));
    }
    let ranks = ranks_with_ties(&pooled)?;
    let nf = total as f64;
    let mut h = 0.0;
    let mut offset = 0;
    for &sz in &sizes {
        let r: f64 = ranks[offset..offset + sz].iter().sum();
        h += r * r / sz as f64;
        offset += sz;
    }
    h = 12.0 / (nf * (nf + 1.0)) * h - 3.0 * (nf + 1.0);
    let mut sorted = pooled.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let correction = 1.0 - tie_correction_sum(&sorted) / (nf * nf * nf - nf);
    let h = (h / correction).max(0.0);
    let df = (groups.len() - 1) as u32;
    let p = chi_square_sf(h, df)?;
    Ok(TestResult::new(
        h,
        p,
        sizes,
        format!("chi-square approximation, {df} df, tie-corrected"),
    ))
}

/// Counts of arrangements yielding each U value for tie-free samples of
/// sizes (na, nb). Index u runs 0..=na*nb.
fn mwu_exact_counts(na: usize, nb: usize) -> Vec<f64> {
    let mut table: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); nb + 1]; na + 1];
    for m in 0..=na {
        for n in 0..=nb {
            let size = m * n + 1;
            let mut counts = vec![0.0; size];
            if m == 0 || n == 0 {
                counts[0] = 1.0;
            } else {
                for (u, c) in counts.iter_mut().enumerate() {
                    // Largest pooled value is an X (beats all n Ys) or a Y.
                    if u >= n {
                        *c += table[m - 1][n][u - n];
                    }
                    if u < table[m][n - 1].len() {
                        *c += table[m][n - 1][u];
                    }
                }
            }
            table[m][n] = counts;
        }
    }
    std::mem::take(&mut table[na][nb])
}

const MWU_EXACT_LIMIT: usize = 20;

/// Mann-Whitney U test, two-sided. Exact enumeration for tie-free samples
/// with na + nb <= 20; tie-corrected, continuity-corrected normal
/// approximation otherwise. The reported statistic is min(U_a, U_b).
pub fn mann_whitney_u(sample_a: &[f64], sample_b: &[f64]) -> Result<TestResult, StatsError> {
    if sample_a.is_empty() || sample_b.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    check_finite(sample_a)?;
    check_finite(sample_b)?;
    let na = sample_a.len();
    let nb = sample_b.len();
    let total = na + nb;
    let mut pooled = Vec::with_capacity(total);
    pooled.extend_from_slice(sample_a);
    pooled.extend_from_slice(sample_b);
    let ranks = ranks_with_ties(&pooled)?;
    let ra: f64 = ranks[..na].iter().sum();
    let u_a = ra - (na * (na + 1)) as f64 / 2.0;
    let u_b = (na * nb) as f64 - u_a;
    let u = u_a.min(u_b);

    let mut sorted = pooled.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let tie_sum = tie_correction_sum(&sorted);
    let has_ties = tie_sum > 0.0;

    if total <= MWU_EXACT_LIMIT && !has_ties {
        let counts = mwu_exact_counts(na, nb);
        let total_count: f64 = counts.iter().sum();
        let u_lo = u.round() as usize;
        let u_hi = na * nb - u_lo;
        let low_tail: f64 = counts[..=u_lo].iter().sum();
        let high_tail: f64 = counts[u_hi..].iter().sum();
        let p = (low_tail + high_tail) / total_count;
        return Ok(TestResult::new(
            u,
            p,
            vec![na, nb],
            "exact enumeration, two-sided",
        ));
    }

    let naf = na as f64;
    let nbf = nb as f64;
    let nf = total as f64;
    let mean = naf * nbf / 2.0;
    let var = naf * nbf / 12.0 * ((nf + 1.0) - tie_sum / (nf * (nf - 1.0)));
    if var <= 0.0 {
        return Ok(TestResult::new(
            u,
            1.0,
            vec![na, nb],
            "degenerate: all observations equal; p = 1 by convention",
        ));
    }
    let diff = u - mean;
    let z = if diff < 0.0 {
        (diff + 0.5) / var.sqrt()
    } else if diff > 0.0 {
        (diff - 0.5) / var.sqrt()
    } else {
        0.0
    };
    let p = 2.0 * normal_sf(z.abs());
    Ok(TestResult::new(
        u,
        p,
        vec![na, nb],
        "normal approximation, tie-corrected, continuity-corrected, two-sided",
    ))
}

/// Spearman rank correlation with tie handling; two-sided p from the t
/// approximation on n-2 degrees of freedom.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<TestResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    if n < 3 {
        return Err(StatsError::TooFewSamples { needed: 3, got: n });
    }
    let rx = ranks_with_ties(x)?;
    let ry = ranks_with_ties(y)?;
    let nf = n as f64;
    let mean = (nf + 1.0) / 2.0;
    let mut num = 0.0;
    let mut den_x = 0.0;
    let mut den_y = 0.0;
    for i in 0..n {
        let dx = rx[i] - mean;
        let dy = ry[i] - mean;
        num += dx * dy;
        den_x += dx * dx;
        den_y += dy * dy;
    }
    if den_x == 0.0 || den_y == 0.0 {
        return Err(StatsError::ConstantInput);
    }
    let rho = (num / (den_x * den_y).sqrt()).clamp(-1.0, 1.0);
    let p = if 1.0 - rho * rho <= 0.0 {
        // Perfectly monotone: p = 0 by convention.
        0.0
    } else {
        let t = rho * ((nf - 2.0) / (1.0 - rho * rho)).sqrt();
        2.0 * t_sf(t.abs(), (n - 2) as u32)?
    };
    Ok(TestResult::new(
        rho,
        p,
        vec![n],
        "t approximation, n-2 df, two-sided",
    ))
}

/// One cell of the 4x4 propensity correlation matrix.
#[derive(Debug, Clone)]
pub enum CorrCell {
    Corr {
        rho: f64,
        p_value: f64,
        stars: Stars,
    },
    Undefined {
        reason: String,
    },
}

/// Symmetric Spearman correlation matrix over the four propensity
/// indicators of a population of academics.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    pub labels: [Form; 4],
    pub cells: [[CorrCell; 4]; 4],
}

impl CorrelationMatrix {
    pub fn get(&self, a: Form, b: Form) -> &CorrCell {
        let i = self.labels.iter().position(|f| *f == a).unwrap();
        let j = self.labels.iter().position(|f| *f == b).unwrap();
        &self.cells[i][j]
    }
}

/// All six pairwise Spearman correlations (plus unit diagonal) between the
/// C, CI, CED, CEF values of a population. Cells where a column is constant
/// carry the error reason instead of a coefficient.
pub fn correlation_matrix(per_academic: &[PropensitySet]) -> Result<CorrelationMatrix, StatsError> {
    let n = per_academic.len();
    if n < 3 {
        return Err(StatsError::TooFewSamples { needed: 3, got: n });
    }
    let labels = Form::ALL;
    let columns: Vec<Vec<f64>> = labels
        .iter()
        .map(|f| per_academic.iter().map(|p| p.get(*f)).collect())
        .collect();
    let constant: Vec<bool> = columns
        .iter()
        .map(|c| c.iter().all(|&v| v == c[0]))
        .collect();
    let mut cells: [[CorrCell; 4]; 4] = std::array::from_fn(|_| {
        std::array::from_fn(|_| CorrCell::Undefined {
            reason: String::new(),
        })
    });
    for i in 0..4 {
        for j in i..4 {
            let cell = if constant[i] || constant[j] {
                CorrCell::Undefined {
                    reason: StatsError::ConstantInput.to_string(),
                }
            } else if i == j {
                CorrCell::Corr {
                    rho: 1.0,
                    p_value: 0.0,
                    stars: Stars::Three,
                }
            } else {
                match spearman_rho(&columns[i], &columns[j]) {
                    Ok(r) => CorrCell::Corr {
                        rho: r.statistic,
                        p_value: r.p_value,
                        stars: r.stars,
                    },
                    Err(e) => CorrCell::Undefined {
                        reason: e.to_string(),
                    },
                }
            };
            cells[i][j] = cell.clone();
            cells[j][i] = cell;
        }
    }
    Ok(CorrelationMatrix { labels, cells })
}
