//! Deterministic insight templates.

use super::stats::{StatReport, TrendDirection};
use crate::chartcore::{
    format_sig, ChartSpec, ChartType, Insight, InsightLevel, LineStyle, Marker, PieVariant, Provenance, Theme,
};
use crate::{CsemError, Result};

fn num(v: f64) -> String {
    format_sig(v, 4)
}

fn join_names(names: &[String]) -> String {
    match names {
        [] => String::new(),
        [a] => a.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

fn quoted_title(spec: &ChartSpec) -> String {
    format!("\"{}\"", spec.title)
}

/// Visual-level insight: what is drawn and how it is encoded.
pub fn gen_visual_insight(spec: &ChartSpec) -> Insight {
    let (x, y) = (&spec.x_name, &spec.y_name);
    let pts = &spec.primary_series().points;
    let first = pts.first().map(|p| p.x.display()).unwrap_or_default();
    let last = pts.last().map(|p| p.x.display()).unwrap_or_default();
    let mut parts = vec![format!(
        "This {} chart titled {} presents {y} on the vertical axis against {x} on the horizontal axis.",
        spec.chart_type.as_str(),
        quoted_title(spec)
    )];
    if !spec.subtitle.is_empty() {
        parts.push(format!("A subtitle adds the context \"{}\".", spec.subtitle));
    }
    if spec.categories.is_empty() {
        parts.push(format!("It shows a single category of data with {} plotted values.", pts.len()));
    } else {
        parts.push(format!(
            "It compares {} categories of data, namely {}, each drawn in its own color and identified in the legend.",
            spec.categories.len(),
            join_names(&spec.categories)
        ));
    }
    parts.push(match spec.chart_type {
        ChartType::Bar => {
            format!("Bar heights make it easy to compare {y} across the {x} values from {first} to {last}.")
        }
        ChartType::GroupedBar => {
            format!("Bars sit side by side within each {x} group so {y} can be compared both within and across groups.")
        }
        ChartType::StackedBar => {
            format!("Segments stack within each {x} bar so the total {y} and its composition are visible together.")
        }
        ChartType::Pie => {
            format!("Each slice represents the share of {y} contributed by one {x} value, starting from {first}.")
        }
        ChartType::Line => format!("A connected line traces how {y} moves across {x} from {first} to {last}."),
        ChartType::GroupedLine => {
            format!("Separate lines trace how {y} moves across {x} from {first} to {last} for every category.")
        }
        ChartType::Scatter => {
            format!("Each point places one observation by its {x} and {y}, revealing how the two measures relate.")
        }
    });
    let style = &spec.style;
    parts.push(match spec.chart_type {
        ChartType::Pie if style.pie_variant == PieVariant::Donut => {
            "The slices are drawn as a donut with an open center.".to_string()
        }
        ChartType::Pie => "The slices form a full pie so relative sizes read at a glance.".to_string(),
        ChartType::Line | ChartType::GroupedLine => {
            let dash = match style.line_style {
                LineStyle::Solid => "solid",
                LineStyle::Dashed => "dashed",
                LineStyle::Dotted => "dotted",
            };
            match style.marker {
                Marker::None => format!("Lines are drawn {dash} without point markers."),
                m => format!("Lines are drawn {dash} with {} markers at each observation.", marker_name(m)),
            }
        }
        ChartType::Scatter => format!("Points are drawn with {} markers.", marker_name(style.marker)),
        _ => "Bars rise from a common baseline so differences in height are directly comparable.".to_string(),
    });
    parts.push(format!(
        "The title sits at the top with the {x} and {y} axis names placed around the plot so readers can relate the two variables quickly."
    ));
    Insight {
        chart_id: spec.id.clone(),
        level: InsightLevel::Visual,
        text: parts.join(" "),
        provenance: Provenance::Template,
    }
}

fn marker_name(m: Marker) -> &'static str {
    match m {
        Marker::Circle | Marker::None => "circle",
        Marker::Square => "square",
        Marker::Triangle => "triangle",
    }
}

/// Statistics-level insight summarizing a [`StatReport`].
pub fn gen_stats_insight(spec: &ChartSpec, report: &StatReport) -> Insight {
    let (x, y) = (&spec.x_name, &spec.y_name);
    let mut parts = Vec::new();
    let direction = match report.trend.direction {
        TrendDirection::Increasing => "an increasing",
        TrendDirection::Decreasing => "a decreasing",
        TrendDirection::Flat => "a flat",
    };
    parts.push(format!(
        "Statistical Analysis: {y} in {} follows {direction} trend with a least squares slope of {} per unit of {x}.",
        quoted_title(spec),
        num(report.trend.slope)
    ));
    parts.push(format!(
        "The maximum of {} occurs at {} while the minimum of {} occurs at {}, so values range from {} to {}.",
        num(report.extremum.max),
        report.extremum.argmax,
        num(report.extremum.min),
        report.extremum.argmin,
        num(report.range.0),
        num(report.range.1)
    ));
    let skew = match report.distribution.skewness_sign {
        1 => "right skewed",
        -1 => "left skewed",
        _ => "roughly symmetric",
    };
    parts.push(format!(
        "Values average {} with a median of {} and a standard deviation of {}, and the distribution is {skew}.",
        num(report.mean),
        num(report.median),
        num(report.distribution.stddev)
    ));
    if !report.top_categories.is_empty() {
        parts.push(format!("Ordered by value the leading entries are {}.", join_names(&report.top_categories)));
    }
    if let Some(r) = report.correlation {
        let strength = match r.abs() {
            a if a >= 0.7 => "strong",
            a if a >= 0.4 => "moderate",
            _ => "weak",
        };
        let sign = if r > 0.0 {
            "positive"
        } else if r < 0.0 {
            "negative"
        } else {
            "no"
        };
        let between =
            if spec.chart_type == ChartType::Scatter { format!("{x} and {y}") } else { join_names(&spec.categories) };
        parts.push(format!("There is a {strength} {sign} correlation between {between} with r = {}.", num(r)));
    }
    if !report.anomalies.is_empty() {
        let at: Vec<String> = report.anomalies.iter().map(|a| format!("{} (z = {})", a.label, num(a.z))).collect();
        parts.push(format!(
            "{} anomalous value{} stand{} out at {}.",
            report.anomalies.len(),
            if report.anomalies.len() == 1 { "" } else { "s" },
            if report.anomalies.len() == 1 { "s" } else { "" },
            join_names(&at)
        ));
    }
    let mut derived = format!(
        "The values sum to {} and the largest entry accounts for {} percent of the total",
        num(report.derived.sum),
        num(100.0 * report.derived.share_of_top)
    );
    if report.dominant {
        derived.push_str(&format!(", making {} the dominant entry", report.extremum.argmax));
    }
    derived.push('.');
    parts.push(derived);
    Insight {
        chart_id: spec.id.clone(),
        level: InsightLevel::Statistics,
        text: parts.join(" "),
        provenance: Provenance::Template,
    }
}

fn audience(theme: Theme) -> &'static str {
    match theme {
        Theme::Sales => "sales managers and merchandising teams",
        Theme::Population => "demographers and urban planners",
        Theme::Temperature => "climate analysts and agricultural planners",
        Theme::Bookings => "hotel revenue managers",
        Theme::Income => "labor economists and policy advisers",
        Theme::Energy => "grid operators and energy planners",
        Theme::Traffic => "transport engineers and city officials",
        Theme::Ratings => "content strategists and product teams",
        Theme::Inventory => "supply chain and warehouse managers",
        Theme::Budget => "finance officers and budget committees",
        Theme::Enrollment => "university administrators and admissions staff",
        Theme::Emissions => "sustainability officers and regulators",
    }
}

/// Task-level insight built on the visual insight of the same chart.
pub fn gen_task_insight(spec: &ChartSpec, visual: Option<&Insight>) -> Result<Insight> {
    let visual = visual.ok_or_else(|| {
        CsemError::MissingDependency(format!("task insight for {} needs its visual insight", spec.id))
    })?;
    if visual.chart_id != spec.id || visual.level != InsightLevel::Visual {
        return Err(CsemError::MissingDependency(format!(
            "task insight for {} was given the {} insight of {}",
            spec.id,
            visual.level.as_str(),
            visual.chart_id
        )));
    }
    let (x, y) = (&spec.x_name, &spec.y_name);
    let theme = spec.theme.as_str();
    let purpose = match spec.chart_type {
        ChartType::Line | ChartType::GroupedLine => format!(
            "supports monitoring trends over time in {theme} data so that changes in {y} across {x} can inform timing decisions and early warnings"
        ),
        ChartType::Pie | ChartType::StackedBar => format!(
            "supports allocation and proportion decision making by showing how total {y} is divided across {x} in the {theme} records"
        ),
        ChartType::Bar | ChartType::GroupedBar => format!(
            "supports ranking and comparison decisions by lining up {y} for each {x} so the strongest and weakest {theme} entries stand out"
        ),
        ChartType::Scatter => format!(
            "supports relationship screening between {x} and {y} so analysts can judge whether the two {theme} measures move together"
        ),
    };
    let followup = match spec.chart_type {
        ChartType::Line | ChartType::GroupedLine => {
            "Readers can spot turning points and compare recent periods against earlier ones."
        }
        ChartType::Pie | ChartType::StackedBar => {
            "Readers can see which parts dominate the whole and where resources may be rebalanced."
        }
        ChartType::Bar | ChartType::GroupedBar => {
            "Readers can rank entries quickly and decide where attention or investment is most needed."
        }
        ChartType::Scatter => {
            "Readers can flag outlying observations and decide whether one measure is a useful predictor of the other."
        }
    };
    let text = format!(
        "Main Purpose: The {} chart {} {purpose}. {followup} It is most useful for {} who need a compact view of {theme} figures{}.",
        spec.chart_type.label(),
        quoted_title(spec),
        audience(spec.theme),
        if spec.categories.is_empty() {
            String::new()
        } else {
            format!(" broken down by {}", join_names(&spec.categories))
        }
    );
    Ok(Insight { chart_id: spec.id.clone(), level: InsightLevel::Task, text, provenance: Provenance::Template })
}
