//! Which trajectory got where first.

use std::cmp::Ordering;
use std::fmt;

use crate::run::TraceRecord;

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRanking {
    pub threshold: f64,
    /// Labels with the first step at which loss was at or below the
    /// threshold, earliest first. Traces that never got there come last.
    pub order: Vec<(String, Option<u64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    /// Number of leading records every trace has.
    pub common_steps: usize,
    /// Set when the traces differ in length; everything is then judged on the
    /// common prefix.
    pub length_mismatch: bool,
    pub lengths: Vec<(String, usize)>,
    pub thresholds: Vec<ThresholdRanking>,
    /// Loss at the last common step, lowest first. Empty traces come last.
    pub final_ranking: Vec<(String, Option<f64>)>,
}

impl CompareReport {
    pub fn winner_at(&self, threshold: f64) -> Option<&str> {
        self.thresholds
            .iter()
            .find(|t| t.threshold == threshold)
            .and_then(|t| t.order.first())
            .filter(|(_, step)| step.is_some())
            .map(|(label, _)| label.as_str())
    }
}

fn none_last<T: PartialOrd>(a: &Option<T>, b: &Option<T>) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) => x.partial_cmp(y).unwrap_or(Ordering::Equal),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

/// Ranks `traces` at each loss threshold and by final loss. Ties keep input
/// order.
pub fn compare_trajectories(
    traces: &[(String, Vec<TraceRecord>)],
    thresholds: &[f64],
) -> CompareReport {
    let common = traces.iter().map(|(_, r)| r.len()).min().unwrap_or(0);
    let length_mismatch = traces.iter().any(|(_, r)| r.len() != common);

    let thresholds = thresholds
        .iter()
        .map(|&threshold| {
            let mut order: Vec<(String, Option<u64>)> = traces
                .iter()
                .map(|(label, r)| {
                    let hit = r[..common]
                        .iter()
                        .find(|x| x.loss <= threshold)
                        .map(|x| x.step);
                    (label.clone(), hit)
                })
                .collect();
            order.sort_by(|a, b| none_last(&a.1, &b.1));
            ThresholdRanking { threshold, order }
        })
        .collect();

    let mut final_ranking: Vec<(String, Option<f64>)> = traces
        .iter()
        .map(|(label, r)| (label.clone(), common.checked_sub(1).map(|i| r[i].loss)))
        .collect();
    final_ranking.sort_by(|a, b| none_last(&a.1, &b.1));

    CompareReport {
        common_steps: common,
        length_mismatch,
        lengths: traces.iter().map(|(l, r)| (l.clone(), r.len())).collect(),
        thresholds,
        final_ranking,
    }
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "compared {} traces over {} common steps",
            self.lengths.len(),
            self.common_steps
        )?;
        if self.length_mismatch {
            let lens: Vec<String> = self
                .lengths
                .iter()
                .map(|(l, n)| format!("{l}={n}"))
                .collect();
            writeln!(
                f,
                "warning: trace lengths differ ({}); using the common prefix",
                lens.join(", ")
            )?;
        }
        for t in &self.thresholds {
            write!(f, "loss <= {}:", t.threshold)?;
            for (i, (label, step)) in t.order.iter().enumerate() {
                match step {
                    Some(s) => write!(f, "  {}. {label} (step {s})", i + 1)?,
                    None => write!(f, "  {}. {label} (never)", i + 1)?,
                }
            }
            writeln!(f)?;
        }
        write!(f, "final loss:")?;
        for (i, (label, loss)) in self.final_ranking.iter().enumerate() {
            match loss {
                Some(l) => write!(f, "  {}. {label} ({l:.6e})", i + 1)?,
                None => write!(f, "  {}. {label} (none)", i + 1)?,
            }
        }
        writeln!(f)
    }
}
