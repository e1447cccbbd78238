use std::time::Instant;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

/// Dollar price per token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostModel {
    pub input_rate: Decimal,
    pub output_rate: Decimal,
}

impl Default for CostModel {
    /// $1.25 per million input tokens, $10.00 per million output tokens.
    fn default() -> Self {
        CostModel {
            input_rate: Decimal::new(125, 8),
            output_rate: Decimal::new(1, 5),
        }
    }
}

pub fn estimate_cost(input_tokens: u64, output_tokens: u64, model: &CostModel) -> Decimal {
    Decimal::from(input_tokens) * model.input_rate + Decimal::from(output_tokens) * model.output_rate
}

/// Runs `action` and returns its result with elapsed monotonic seconds.
pub fn measure_latency<T>(action: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = action();
    (out, start.elapsed().as_secs_f64())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencySummary {
    pub count: usize,
    pub mean: f64,
    pub p50: f64,
    pub p95: f64,
}

/// Nearest-rank percentile of sorted samples.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let rank = ((p / 100.0) * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

pub fn summarize_latency(samples: &[f64]) -> Option<LatencySummary> {
    if samples.is_empty() {
        return None;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Some(LatencySummary {
        count: sorted.len(),
        mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
        p50: percentile(&sorted, 50.0),
        p95: percentile(&sorted, 95.0),
    })
}
