use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::vocab::{self, Granularity, NumericVocab};
use crate::chartcore::{Cell, Column, ColumnKind, Table, Theme};
use crate::{seeds, CsemError, Result};

/// Shape of a synthetic table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaProfile {
    pub n_categorical: usize,
    pub n_numeric: usize,
    pub n_temporal: usize,
    pub n_rows: usize,
    pub vocab_theme: Theme,
}

impl SchemaProfile {
    pub fn validate(&self) -> Result<()> {
        let v = vocab::theme_vocab(self.vocab_theme);
        let bad = |m: String| Err(CsemError::InvalidArgument(format!("schema profile: {m}")));
        if self.n_numeric < 1 {
            return bad("n_numeric must be at least 1".into());
        }
        if !(5..=200).contains(&self.n_rows) {
            return bad(format!("n_rows {} outside [5, 200]", self.n_rows));
        }
        if self.n_categorical + self.n_temporal == 0 {
            return bad("needs a categorical or temporal column".into());
        }
        if self.n_categorical > v.categorical.len() || self.n_numeric > v.numeric.len() {
            return bad(format!("theme {} cannot supply that many columns", self.vocab_theme));
        }
        if self.n_temporal > 1 {
            return bad("at most one temporal column".into());
        }
        Ok(())
    }

    /// Draw a random valid profile.
    pub fn random(seed: u64) -> SchemaProfile {
        let mut rng = seeds::rng(seed);
        let theme = *Theme::ALL.choose(&mut rng).unwrap();
        let n_temporal = usize::from(rng.random_bool(0.6));
        let n_categorical = match (n_temporal, rng.random_range(0..10)) {
            (0, 0..=5) => 1,
            (0, _) => 2,
            (_, 0..=2) => 0,
            (_, 3..=7) => 1,
            _ => 2,
        };
        SchemaProfile {
            n_categorical,
            n_numeric: rng.random_range(1..=3),
            n_temporal,
            n_rows: rng.random_range(8..=60),
            vocab_theme: theme,
        }
    }
}

#[derive(Clone, Copy)]
enum Generator {
    Linear { intercept: f64, slope: f64 },
    Seasonal { level: f64, amplitude: f64, period: f64, phase: f64 },
    RandomWalk { start: f64, step: f64 },
    HeavyTail { level: f64, spike_prob: f64 },
}

/// Generate a themed table. Deterministic in `(seed, profile)`.
pub fn gen_table(seed: u64, profile: &SchemaProfile) -> Result<Table> {
    profile.validate()?;
    let mut rng = seeds::rng(seed);
    let v = vocab::theme_vocab(profile.vocab_theme);
    let (nh, nm, nt) = vocab::NAME_PARTS;
    let entity = format!(
        "{} {}",
        vocab::entity_name(rng.random_range(0..nh), rng.random_range(0..nm), rng.random_range(0..nt)),
        v.entity_kinds.choose(&mut rng).unwrap()
    );

    let mut cat_idx: Vec<usize> = (0..v.categorical.len()).collect();
    cat_idx.shuffle(&mut rng);
    let cats: Vec<_> = cat_idx[..profile.n_categorical].iter().map(|&i| &v.categorical[i]).collect();
    let mut num_idx: Vec<usize> = (0..v.numeric.len()).collect();
    num_idx.shuffle(&mut rng);
    let nums: Vec<NumericVocab> = num_idx[..profile.n_numeric].iter().map(|&i| v.numeric[i]).collect();
    let temporal = (profile.n_temporal == 1).then(|| v.temporal.choose(&mut rng).unwrap());

    // category values per categorical column
    let cat_values: Vec<Vec<&str>> = cats
        .iter()
        .map(|c| {
            let k = rng.random_range(3..=c.values.len());
            let mut vals: Vec<&str> = c.values.to_vec();
            vals.shuffle(&mut rng);
            vals.truncate(k);
            vals
        })
        .collect();
    let cat_product: usize = cat_values.iter().map(Vec::len).product::<usize>().max(1);
    let n_steps = if temporal.is_some() { (profile.n_rows / cat_product).clamp(4, profile.n_rows) } else { 1 };
    let start_year: i32 = rng.random_range(1990..=2016);
    let start_month: u32 = rng.random_range(1..=12);

    let time_label = |step: usize| -> String {
        match temporal.map(|t| t.granularity) {
            Some(Granularity::Month) => {
                let m0 = (start_month - 1) as usize + step;
                format!("{}-{:02}", start_year + (m0 / 12) as i32, m0 % 12 + 1)
            }
            _ => format!("{}", start_year + step as i32),
        }
    };

    let generators: Vec<Generator> = nums.iter().map(|_| random_generator(&mut rng)).collect();
    let effects: Vec<Vec<f64>> =
        cat_values.iter().map(|vals| vals.iter().map(|_| rng.random_range(0.4..1.6)).collect()).collect();
    let noise = Normal::new(0.0, 0.06).unwrap();
    let mut walk_state: Vec<Vec<f64>> = generators
        .iter()
        .map(|g| match g {
            Generator::RandomWalk { start, .. } => vec![*start; cat_product],
            _ => vec![0.0; cat_product],
        })
        .collect();

    let mut columns = Vec::new();
    for c in &cats {
        columns.push(Column { name: c.name.to_string(), kind: ColumnKind::Categorical });
    }
    if let Some(t) = temporal {
        columns.push(Column { name: t.name.to_string(), kind: ColumnKind::Temporal });
    }
    for n in &nums {
        columns.push(Column { name: n.name.to_string(), kind: ColumnKind::Numeric });
    }

    let mut rows = Vec::with_capacity(profile.n_rows);
    for r in 0..profile.n_rows {
        // rows walk time-major over the category grid
        let combo = r % cat_product;
        let step = if temporal.is_some() { (r / cat_product) % n_steps } else { r / cat_product };
        let mut row = Vec::with_capacity(columns.len());
        let mut rem = combo;
        let mut effect = 1.0;
        for (ci, vals) in cat_values.iter().enumerate() {
            let vi = rem % vals.len();
            rem /= vals.len();
            effect *= effects[ci][vi];
            row.push(Cell::Text(vals[vi].to_string()));
        }
        if temporal.is_some() {
            row.push(Cell::Text(time_label(step)));
        }
        let t = if temporal.is_some() { step as f64 / n_steps.max(2) as f64 } else { r as f64 / profile.n_rows as f64 };
        for (ni, n) in nums.iter().enumerate() {
            let base = match generators[ni] {
                Generator::Linear { intercept, slope } => intercept + slope * t,
                Generator::Seasonal { level, amplitude, period, phase } => {
                    level + amplitude * (std::f64::consts::TAU * (step as f64) / period + phase).sin()
                }
                Generator::RandomWalk { step: s, .. } => {
                    let w = &mut walk_state[ni][combo];
                    *w += s * noise.sample(&mut rng) / 0.06;
                    *w
                }
                Generator::HeavyTail { level, spike_prob } => {
                    if rng.random_bool(spike_prob) {
                        level * rng.random_range(3.0..8.0)
                    } else {
                        level
                    }
                }
            };
            let mut value = n.scale * (base * effect + noise.sample(&mut rng));
            if n.signed {
                value -= n.scale * 0.5;
            } else {
                value = value.abs().max(n.scale * 0.01);
            }
            row.push(Cell::Num(round_for_scale(value, n.scale)));
        }
        rows.push(row);
    }

    Ok(Table { id: format!("t{:016x}", seeds::splitmix64(seed)), theme: profile.vocab_theme, entity, columns, rows })
}

fn random_generator(rng: &mut impl Rng) -> Generator {
    match rng.random_range(0..4) {
        0 => Generator::Linear { intercept: rng.random_range(0.5..1.0), slope: rng.random_range(-0.6..0.9) },
        1 => Generator::Seasonal {
            level: rng.random_range(0.6..1.0),
            amplitude: rng.random_range(0.1..0.4),
            period: *[4.0, 6.0, 12.0].choose(rng).unwrap(),
            phase: rng.random_range(0.0..std::f64::consts::TAU),
        },
        2 => Generator::RandomWalk { start: rng.random_range(0.6..1.0), step: rng.random_range(0.03..0.12) },
        _ => Generator::HeavyTail { level: rng.random_range(0.5..1.0), spike_prob: rng.random_range(0.03..0.12) },
    }
}

/// Keep about four significant digits relative to the column's scale.
fn round_for_scale(v: f64, scale: f64) -> f64 {
    let step = 10f64.powi((scale.log10().floor() as i32) - 3);
    let r = (v / step).round() * step;
    // strip binary noise from the multiply (0.30000000000000004)
    format!("{r:.6}").parse().unwrap_or(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(n_cat: usize, n_num: usize, n_temp: usize, n_rows: usize) -> SchemaProfile {
        SchemaProfile { n_categorical: n_cat, n_numeric: n_num, n_temporal: n_temp, n_rows, vocab_theme: Theme::Sales }
    }

    #[test]
    fn two_column_sales_table() {
        let t = gen_table(1, &profile(1, 1, 0, 10)).unwrap();
        assert_eq!(t.columns.len(), 2);
        assert_eq!(t.rows.len(), 10);
        assert!(t.violations().is_empty(), "{:?}", t.violations());
    }

    #[test]
    fn deterministic() {
        let p = profile(2, 3, 1, 50);
        assert_eq!(gen_table(9, &p).unwrap(), gen_table(9, &p).unwrap());
        assert_ne!(gen_table(9, &p).unwrap(), gen_table(10, &p).unwrap());
    }

    #[test]
    fn invalid_profiles_rejected() {
        assert!(gen_table(1, &profile(1, 0, 0, 10)).is_err());
        assert!(gen_table(1, &profile(0, 1, 0, 10)).is_err());
        assert!(gen_table(1, &profile(1, 1, 0, 4)).is_err());
        assert!(gen_table(1, &profile(1, 1, 0, 201)).is_err());
    }

    #[test]
    fn random_profiles_always_valid() {
        for s in 0..500 {
            let p = SchemaProfile::random(s);
            p.validate().unwrap();
            let t = gen_table(s, &p).unwrap();
            assert!(t.violations().is_empty());
        }
    }
}
