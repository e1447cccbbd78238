use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Some ratio had a zero denominator and was reported as 0.
    pub degenerate: bool,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// `num/den` truncated to two decimals, computed on integers.
fn display(num: u64, den: u64) -> String {
    if den == 0 {
        return "0.00".to_string();
    }
    let hundredths = (u128::from(num) * 100) / u128::from(den);
    format!("{}.{:02}", hundredths / 100, hundredths % 100)
}

pub fn compute_metrics(tp: u64, fp: u64, fn_: u64) -> MetricsSummary {
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    MetricsSummary {
        tp,
        fp,
        fn_,
        precision,
        recall,
        f1,
        degenerate: tp + fp == 0 || tp + fn_ == 0 || tp == 0,
    }
}

impl MetricsSummary {
    // Display values are truncated, not rounded half-up: 1434/1435 shows as
    // 0.99. F1 uses the equivalent integer form 2tp/(2tp+fp+fn).

    pub fn precision_display(&self) -> String {
        display(self.tp, self.tp + self.fp)
    }

    pub fn recall_display(&self) -> String {
        display(self.tp, self.tp + self.fn_)
    }

    pub fn f1_display(&self) -> String {
        display(2 * self.tp, 2 * self.tp + self.fp + self.fn_)
    }
}
