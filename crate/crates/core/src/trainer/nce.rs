use crate::{CsemError, Result};

/// Loss and gradients of the symmetric InfoNCE objective with respect to
/// the pre-normalization projections.
#[derive(Debug, Clone, PartialEq)]
pub struct NceOutput {
    pub loss: f64,
    pub grad_text: Vec<Vec<f64>>,
    pub grad_chart: Vec<Vec<f64>>,
}

/// Unit vector and norm; a zero vector maps to the uniform sentinel with
/// norm 0 (its gradient is then defined as zero).
fn unit(u: &[f64]) -> (Vec<f64>, f64) {
    let n = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 && n.is_finite() {
        (u.iter().map(|x| x / n).collect(), n)
    } else {
        (vec![1.0 / (u.len() as f64).sqrt(); u.len()], 0.0)
    }
}

/// Back-propagate through `t = u / |u|`: `(g - t (t.g)) / |u|`.
fn through_norm(t: &[f64], norm: f64, g: &[f64]) -> Vec<f64> {
    if norm == 0.0 {
        return vec![0.0; g.len()];
    }
    let tg: f64 = t.iter().zip(g).map(|(a, b)| a * b).sum();
    t.iter().zip(g).map(|(ti, gi)| (gi - ti * tg) / norm).collect()
}

fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Symmetric InfoNCE over a batch where row `i` of each side is a positive
/// pair and every other row is a negative:
/// `0.5 * (mean_i CE(row_i) + mean_j CE(col_j))` on `S = t c^T / tau`.
pub fn info_nce(text_u: &[Vec<f64>], chart_u: &[Vec<f64>], tau: f64) -> Result<NceOutput> {
    let b = text_u.len();
    if b < 2 {
        return Err(CsemError::InvalidArgument(format!("batch of {b} has no negatives")));
    }
    if chart_u.len() != b {
        return Err(CsemError::DimMismatch { expected: b, actual: chart_u.len() });
    }
    let d = text_u[0].len();
    if let Some(bad) = text_u.iter().chain(chart_u).find(|r| r.len() != d) {
        return Err(CsemError::DimMismatch { expected: d, actual: bad.len() });
    }
    if tau.is_nan() || tau <= 0.0 {
        return Err(CsemError::InvalidArgument(format!("temperature must be positive, got {tau}")));
    }
    let (t, tn): (Vec<_>, Vec<_>) = text_u.iter().map(|u| unit(u)).unzip();
    let (c, cn): (Vec<_>, Vec<_>) = chart_u.iter().map(|u| unit(u)).unzip();
    let s: Vec<Vec<f64>> = t
        .iter()
        .map(|ti| c.iter().map(|cj| ti.iter().zip(cj).map(|(x, y)| x * y).sum::<f64>() / tau).collect())
        .collect();

    let row_lse: Vec<f64> = s.iter().map(|row| log_sum_exp(row.iter().copied())).collect();
    let col_lse: Vec<f64> = (0..b).map(|j| log_sum_exp((0..b).map(|i| s[i][j]))).collect();
    let bf = b as f64;
    let mut loss = 0.0;
    for i in 0..b {
        loss += (row_lse[i] - s[i][i]) + (col_lse[i] - s[i][i]);
    }
    loss *= 0.5 / bf;

    // dL/dS_ij = (P_ij + Q_ij - 2 delta_ij) / (2B), P row-softmax, Q column-softmax
    let mut g = vec![vec![0.0; b]; b];
    for i in 0..b {
        for j in 0..b {
            let p = (s[i][j] - row_lse[i]).exp();
            let q = (s[i][j] - col_lse[j]).exp();
            let delta = if i == j { 2.0 } else { 0.0 };
            g[i][j] = (p + q - delta) * 0.5 / bf;
        }
    }
    let mut grad_text = Vec::with_capacity(b);
    for i in 0..b {
        let mut gt = vec![0.0; d];
        for j in 0..b {
            let w = g[i][j] / tau;
            gt.iter_mut().zip(&c[j]).for_each(|(o, x)| *o += w * x);
        }
        grad_text.push(through_norm(&t[i], tn[i], &gt));
    }
    let mut grad_chart = Vec::with_capacity(b);
    for j in 0..b {
        let mut gc = vec![0.0; d];
        for i in 0..b {
            let w = g[i][j] / tau;
            gc.iter_mut().zip(&t[i]).for_each(|(o, x)| *o += w * x);
        }
        grad_chart.push(through_norm(&c[j], cn[j], &gc));
    }
    Ok(NceOutput { loss, grad_text, grad_chart })
}

/// `|a - n| / max(|a|, |n|, 1e-12)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-12)
}

/// Compare every analytic input gradient of [`info_nce`] against central
/// differences with step `eps`; returns the maximum relative error.
pub fn info_nce_fd_check(text_u: &[Vec<f64>], chart_u: &[Vec<f64>], tau: f64, eps: f64) -> Result<f64> {
    let out = info_nce(text_u, chart_u, tau)?;
    let mut worst: f64 = 0.0;
    for side in 0..2 {
        let grads = if side == 0 { &out.grad_text } else { &out.grad_chart };
        for (r, grow) in grads.iter().enumerate() {
            for (k, &analytic) in grow.iter().enumerate() {
                let eval = |delta: f64| -> Result<f64> {
                    let mut t = text_u.to_vec();
                    let mut c = chart_u.to_vec();
                    if side == 0 {
                        t[r][k] += delta;
                    } else {
                        c[r][k] += delta;
                    }
                    Ok(info_nce(&t, &c, tau)?.loss)
                };
                let numeric = (eval(eps)? - eval(-eps)?) / (2.0 * eps);
                worst = worst.max(relative_error(analytic, numeric));
            }
        }
    }
    Ok(worst)
}
