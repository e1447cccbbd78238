use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Longest common subsequence length over chars, by the bit-parallel
/// recurrence `V' = (V + (V & M)) | (V & !M)` on multiword bit vectors.
pub fn lcs_len(a: &[char], b: &[char]) -> usize {
    let (a, b) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let m = a.len();
    if m == 0 {
        return 0;
    }
    let words = m.div_ceil(64);
    let mut masks: HashMap<char, Vec<u64>> = HashMap::new();
    for (i, &c) in a.iter().enumerate() {
        masks.entry(c).or_insert_with(|| vec![0; words])[i / 64] |= 1 << (i % 64);
    }
    let zero = vec![0u64; words];
    let mut v = vec![u64::MAX; words];
    for c in b {
        let mask = masks.get(c).unwrap_or(&zero);
        let mut carry = 0u64;
        for w in 0..words {
            let x = v[w];
            let u = x & mask[w];
            let (s1, c1) = x.overflowing_add(u);
            let (s2, c2) = s1.overflowing_add(carry);
            carry = u64::from(c1 || c2);
            v[w] = s2 | (x & !mask[w]);
        }
    }
    let mut zeros = 0;
    for (w, &x) in v.iter().enumerate() {
        let bits = if w + 1 == words && m % 64 != 0 { m % 64 } else { 64 };
        let valid = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
        zeros += (!x & valid).count_ones() as usize;
    }
    zeros
}

/// `100 · (1 − indel(a, b) / (|a| + |b|))` over chars; 100 for two empty
/// strings. `indel = |a| + |b| − 2·LCS`.
pub fn similarity_ratio(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let total = a.len() + b.len();
    if total == 0 {
        return 100.0;
    }
    let indel = total - 2 * lcs_len(&a, &b);
    100.0 * (1.0 - indel as f64 / total as f64)
}

/// Keeps only lines that begin with an error tag (`[ERROR]`, `[Error]`, …).
pub fn error_lines(output: &str) -> String {
    output
        .lines()
        .filter(|l| l.trim_start().to_ascii_lowercase().starts_with("[error"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub runs: usize,
    pub mean_ratio_with_warnings: f64,
    pub mean_ratio_errors_only: f64,
    pub pairwise_with_warnings: Vec<Vec<f64>>,
    pub pairwise_errors_only: Vec<Vec<f64>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("a stability study needs at least 2 runs, got {0}")]
pub struct TooFewRuns(pub usize);

/// Mean pairwise ratio over the N(N−1)/2 unordered pairs, and the full
/// symmetric matrix with a diagonal of 100.
pub fn stability_study(outputs: &[String], include_warnings: bool) -> Result<(f64, Vec<Vec<f64>>), TooFewRuns> {
    let n = outputs.len();
    if n < 2 {
        return Err(TooFewRuns(n));
    }
    let texts: Vec<String> = if include_warnings {
        outputs.to_vec()
    } else {
        outputs.iter().map(|o| error_lines(o)).collect()
    };
    let mut matrix = vec![vec![100.0; n]; n];
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let r = similarity_ratio(&texts[i], &texts[j]);
            matrix[i][j] = r;
            matrix[j][i] = r;
            sum += r;
        }
    }
    Ok((sum / (n * (n - 1) / 2) as f64, matrix))
}

pub fn stability_report(outputs: &[String]) -> Result<StabilityReport, TooFewRuns> {
    let (with, with_m) = stability_study(outputs, true)?;
    let (errors, errors_m) = stability_study(outputs, false)?;
    Ok(StabilityReport {
        runs: outputs.len(),
        mean_ratio_with_warnings: with,
        mean_ratio_errors_only: errors,
        pairwise_with_warnings: with_m,
        pairwise_errors_only: errors_m,
    })
}
