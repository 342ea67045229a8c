use serde::{Deserialize, Serialize};

use crate::chartcore::{ChartSpec, ChartType, Series};
use crate::{CsemError, Result};

pub const ANOMALY_Z: f64 = 2.5;
pub const DOMINANCE_SHARE: f64 = 0.5;
const FLAT_SLOPE_REL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendDirection {
    Increasing,
    Decreasing,
    Flat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trend {
    pub direction: TrendDirection,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub argmax: String,
    pub max: f64,
    pub argmin: String,
    pub min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anomaly {
    pub index: usize,
    pub label: String,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub stddev: f64,
    /// -1, 0 or 1.
    pub skewness_sign: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    pub sum: f64,
    /// Largest value over the sum; 0 when the sum is not positive.
    pub share_of_top: f64,
}

/// Results of the ten-task statistical battery on a chart's primary series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub trend: Trend,
    pub extremum: Extremum,
    pub range: (f64, f64),
    pub mean: f64,
    pub median: f64,
    pub correlation: Option<f64>,
    pub anomalies: Vec<Anomaly>,
    pub distribution: Distribution,
    pub top_categories: Vec<String>,
    pub derived: Derived,
    pub dominant: bool,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Least-squares slope of `y` on `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Pearson correlation; `None` for fewer than two points or zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

fn x_positions(s: &Series) -> Vec<f64> {
    let numeric: Option<Vec<f64>> = s.points.iter().map(|p| p.x.position()).collect();
    numeric.unwrap_or_else(|| (0..s.points.len()).map(|i| i as f64).collect())
}

/// Run the battery: trend, extremum, range, center, correlation, anomaly,
/// distribution, order, derived value and dominance.
pub fn run_stat_tasks(spec: &ChartSpec) -> Result<StatReport> {
    let s =
        spec.series.first().ok_or_else(|| CsemError::InsufficientData(format!("chart {} has no series", spec.id)))?;
    if s.points.len() < 2 {
        return Err(CsemError::InsufficientData(format!(
            "chart {} primary series has {} point(s)",
            spec.id,
            s.points.len()
        )));
    }
    let y: Vec<f64> = s.points.iter().map(|p| p.y).collect();
    let labels: Vec<String> = s.points.iter().map(|p| p.x.display()).collect();
    let x = x_positions(s);
    let n = y.len() as f64;

    let slope = ls_slope(&x, &y);
    let scale = y.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let direction = if slope.abs() < FLAT_SLOPE_REL * scale {
        TrendDirection::Flat
    } else if slope > 0.0 {
        TrendDirection::Increasing
    } else {
        TrendDirection::Decreasing
    };

    let (mut imax, mut imin) = (0, 0);
    for i in 1..y.len() {
        if y[i] > y[imax] {
            imax = i;
        }
        if y[i] < y[imin] {
            imin = i;
        }
    }
    let m = mean(&y);
    let mut sorted = y.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2]) / 2.0
    };
    // keep the center inside the range despite rounding
    let m = m.clamp(y[imin], y[imax]);

    let var = y.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
    let std = var.sqrt();
    let anomalies = if std > 0.0 {
        y.iter()
            .enumerate()
            .filter_map(|(i, v)| {
                let z = (v - m) / std;
                (z.abs() >= ANOMALY_Z).then(|| Anomaly { index: i, label: labels[i].clone(), z })
            })
            .collect()
    } else {
        Vec::new()
    };
    let third = y.iter().map(|v| (v - m).powi(3)).sum::<f64>() / n;
    let skewness_sign = if std == 0.0 || third.abs() <= 1e-12 * std.powi(3) {
        0
    } else if third > 0.0 {
        1
    } else {
        -1
    };

    let correlation = if spec.chart_type == ChartType::Scatter {
        pearson(&x, &y)
    } else if spec.series.len() == 2 {
        let other = &spec.series[1];
        let mut a = Vec::new();
        let mut b = Vec::new();
        for p in &s.points {
            if let Some(q) = other.points.iter().find(|q| q.x == p.x) {
                a.push(p.y);
                b.push(q.y);
            }
        }
        pearson(&a, &b)
    } else {
        None
    };

    let mut order: Vec<usize> = (0..y.len()).collect();
    order.sort_by(|&a, &b| y[b].total_cmp(&y[a]).then_with(|| labels[a].cmp(&labels[b])));
    let top_categories = order.iter().take(3).map(|&i| labels[i].clone()).collect();

    let sum: f64 = y.iter().sum();
    let share_of_top = if sum > 0.0 && y[imax] >= 0.0 { y[imax] / sum } else { 0.0 };

    Ok(StatReport {
        trend: Trend { direction, slope },
        extremum: Extremum { argmax: labels[imax].clone(), max: y[imax], argmin: labels[imin].clone(), min: y[imin] },
        range: (y[imin], y[imax]),
        mean: m,
        median,
        correlation,
        anomalies,
        distribution: Distribution { stddev: std, skewness_sign },
        top_categories,
        derived: Derived { sum, share_of_top },
        dominant: share_of_top >= DOMINANCE_SHARE,
    })
}
