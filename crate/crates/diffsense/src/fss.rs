//! Functional sensitivity scoring.
//!
//! Aggregates the five category levels (B, R, C, I, A) into a 0.0..=10.0
//! score, CVSS-3.1 style: two multiplicative aggregates, a fixed weight
//! table per category group, and a roundup to one decimal implemented over
//! scaled integers so scores are bit-stable across platforms.

use crate::error::{Error, Result};
use crate::model::{FssClassification, FssLevel, FssScore};

/// FSS category selector for the weight table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Behaviors,
    Resources,
    Confidentiality,
    Integrity,
    Availability,
}

impl Category {
    pub fn letter(&self) -> char {
        match self {
            Category::Behaviors => 'B',
            Category::Resources => 'R',
            Category::Confidentiality => 'C',
            Category::Integrity => 'I',
            Category::Availability => 'A',
        }
    }
}

/// Tabulated weight for one category level.
///
/// B and R share one table, C/I/A another.
pub fn level_weight(category: Category, level: FssLevel) -> f64 {
    match category {
        Category::Behaviors | Category::Resources => match level {
            FssLevel::None => 0.0,
            FssLevel::Low => 0.1,
            FssLevel::Medium => 0.35,
            FssLevel::High => 0.6,
        },
        Category::Confidentiality | Category::Integrity | Category::Availability => match level {
            FssLevel::None => 0.0,
            FssLevel::Low => 0.22,
            FssLevel::Medium => 0.39,
            FssLevel::High => 0.56,
        },
    }
}

/// Sensitivity aggregate `S = 1 - (1-B)(1-R)`.
pub fn sensitivity_aggregate(b: f64, r: f64) -> f64 {
    1.0 - (1.0 - b) * (1.0 - r)
}

/// Impact aggregate `M = 1 - (1-C)(1-I)(1-A)`.
pub fn impact_aggregate(c: f64, i: f64, a: f64) -> f64 {
    1.0 - (1.0 - c) * (1.0 - i) * (1.0 - a)
}

/// Smallest one-decimal value >= x.
///
/// Scaled-integer form: exact one-decimal inputs pass through unchanged,
/// everything else rounds up, and float drift below 1e-5 cannot flip the
/// result.
pub fn roundup(x: f64) -> f64 {
    let scaled = (x * 100_000.0).round() as i64;
    if scaled % 10_000 == 0 {
        scaled as f64 / 100_000.0
    } else {
        (scaled / 10_000 + 1) as f64 / 10.0
    }
}

/// Scores a classification: `roundup(5.3*S + 6.1*M)` gated to 0 when M is 0
/// and capped at 10.0.
pub fn fss_score(cls: &FssClassification) -> FssScore {
    let s = sensitivity_aggregate(
        level_weight(Category::Behaviors, cls.behaviors),
        level_weight(Category::Resources, cls.resources),
    );
    let m = impact_aggregate(
        level_weight(Category::Confidentiality, cls.confidentiality),
        level_weight(Category::Integrity, cls.integrity),
        level_weight(Category::Availability, cls.availability),
    );
    let value = if m == 0.0 {
        0.0
    } else {
        roundup(5.3 * s + 6.1 * m).min(10.0)
    };
    FssScore {
        sensitivity: s,
        impact: m,
        value,
    }
}

const VECTOR_PREFIX: &str = "FSS:1";
const VECTOR_ORDER: [Category; 5] = [
    Category::Behaviors,
    Category::Resources,
    Category::Confidentiality,
    Category::Integrity,
    Category::Availability,
];

/// Renders the canonical vector string, e.g. `FSS:1/B:H/R:M/C:N/I:L/A:N`.
pub fn format_vector(cls: &FssClassification) -> String {
    let levels = [
        cls.behaviors,
        cls.resources,
        cls.confidentiality,
        cls.integrity,
        cls.availability,
    ];
    let mut out = String::from(VECTOR_PREFIX);
    for (cat, level) in VECTOR_ORDER.iter().zip(levels) {
        out.push('/');
        out.push(cat.letter());
        out.push(':');
        out.push(level.letter());
    }
    out
}

/// Parses a vector string in canonical category order.
pub fn parse_vector(s: &str) -> Result<FssClassification> {
    let mut parts = s.trim().split('/');
    let prefix = parts.next().unwrap_or_default();
    if prefix != VECTOR_PREFIX {
        return Err(Error::Parse(format!(
            "vector must start with `{VECTOR_PREFIX}`, got `{prefix}`"
        )));
    }
    let mut levels = [FssLevel::None; 5];
    for (slot, cat) in VECTOR_ORDER.iter().enumerate() {
        let token = parts.next().ok_or_else(|| {
            Error::Parse(format!("vector is missing the {} segment", cat.letter()))
        })?;
        let expected = format!("{}:", cat.letter());
        let level_str = token.strip_prefix(&expected).ok_or_else(|| {
            Error::Parse(format!(
                "expected segment `{}<level>` in position {}, got `{token}`",
                expected,
                slot + 1
            ))
        })?;
        let mut chars = level_str.chars();
        let level = match (chars.next(), chars.next()) {
            (Some(c), None) => FssLevel::from_letter(c),
            _ => None,
        }
        .ok_or_else(|| {
            Error::Parse(format!(
                "invalid level {level_str} for {}",
                cat.letter()
            ))
        })?;
        levels[slot] = level;
    }
    if let Some(extra) = parts.next() {
        return Err(Error::Parse(format!("unexpected trailing segment `{extra}`")));
    }
    Ok(FssClassification {
        behaviors: levels[0],
        resources: levels[1],
        confidentiality: levels[2],
        integrity: levels[3],
        availability: levels[4],
    })
}

/// Iterator over all 4^5 = 1024 classifications, in a fixed order.
pub fn all_classifications() -> impl Iterator<Item = FssClassification> {
    FssLevel::ALL.into_iter().flat_map(|b| {
        FssLevel::ALL.into_iter().flat_map(move |r| {
            FssLevel::ALL.into_iter().flat_map(move |c| {
                FssLevel::ALL.into_iter().flat_map(move |i| {
                    FssLevel::ALL.into_iter().map(move |a| FssClassification {
                        behaviors: b,
                        resources: r,
                        confidentiality: c,
                        integrity: i,
                        availability: a,
                    })
                })
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cls(b: FssLevel, r: FssLevel, c: FssLevel, i: FssLevel, a: FssLevel) -> FssClassification {
        FssClassification {
            behaviors: b,
            resources: r,
            confidentiality: c,
            integrity: i,
            availability: a,
        }
    }

    use FssLevel::{High as H, Low as L, Medium as M, None as N};

    #[test]
    fn weight_table_matches_published_values() {
        assert_eq!(level_weight(Category::Behaviors, H), 0.6);
        assert_eq!(level_weight(Category::Behaviors, M), 0.35);
        assert_eq!(level_weight(Category::Behaviors, L), 0.1);
        assert_eq!(level_weight(Category::Resources, N), 0.0);
        assert_eq!(level_weight(Category::Confidentiality, L), 0.22);
        assert_eq!(level_weight(Category::Integrity, M), 0.39);
        assert_eq!(level_weight(Category::Availability, H), 0.56);
    }

    #[test]
    fn aggregates() {
        assert_eq!(sensitivity_aggregate(0.0, 0.0), 0.0);
        assert!((sensitivity_aggregate(0.6, 0.6) - 0.84).abs() < 1e-12);
        assert!((sensitivity_aggregate(0.35, 0.0) - 0.35).abs() < 1e-12);
        assert_eq!(impact_aggregate(0.0, 0.0, 0.0), 0.0);
        assert!((impact_aggregate(0.56, 0.56, 0.56) - 0.914816).abs() < 1e-12);
        assert!((impact_aggregate(0.22, 0.0, 0.0) - 0.22).abs() < 1e-12);
    }

    #[test]
    fn roundup_one_decimal() {
        assert_eq!(roundup(3.197), 3.2);
        assert_eq!(roundup(4.0), 4.0);
        assert_eq!(roundup(0.0), 0.0);
        assert_eq!(roundup(0.01), 0.1);
        assert_eq!(roundup(9.91), 10.0);
        // Scaled-integer path shrugs off representation drift.
        assert_eq!(roundup(8.6 - 1e-13), 8.6);
    }

    #[test]
    fn score_gates_on_zero_impact() {
        assert_eq!(fss_score(&cls(N, N, N, N, N)).value, 0.0);
        let gated = fss_score(&cls(H, H, N, N, N));
        assert!((gated.sensitivity - 0.84).abs() < 1e-12);
        assert_eq!(gated.impact, 0.0);
        assert_eq!(gated.value, 0.0);
    }

    #[test]
    fn score_examples() {
        let s = fss_score(&cls(M, N, L, N, N));
        assert!((s.sensitivity - 0.35).abs() < 1e-12);
        assert!((s.impact - 0.22).abs() < 1e-12);
        assert_eq!(s.value_tenths(), 32);

        // 5.3*0.84 + 6.1*0.914816 = 10.0323776, capped after roundup.
        let all_high = fss_score(&cls(H, H, H, H, H));
        assert_eq!(all_high.value, 10.0);
    }

    #[test]
    fn vector_round_trip() {
        assert_eq!(
            parse_vector("FSS:1/B:N/R:N/C:N/I:N/A:N").unwrap(),
            FssClassification::all_none()
        );
        assert_eq!(format_vector(&cls(H, H, H, H, H)), "FSS:1/B:H/R:H/C:H/I:H/A:H");
        for c in all_classifications() {
            assert_eq!(parse_vector(&format_vector(&c)).unwrap(), c);
        }
    }

    #[test]
    fn vector_rejects_bad_level() {
        let err = parse_vector("FSS:1/B:X/R:N/C:N/I:N/A:N").unwrap_err();
        assert!(err.to_string().contains("invalid level X for B"), "{err}");
        let err = parse_vector("FSS:2/B:N/R:N/C:N/I:N/A:N").unwrap_err();
        assert!(err.to_string().contains("FSS:1"));
        let err = parse_vector("FSS:1/R:N/B:N/C:N/I:N/A:N").unwrap_err();
        assert!(err.to_string().contains("`B:<level>`"), "{err}");
        let err = parse_vector("FSS:1/B:N/R:N/C:N/I:N/A:N/Z:9").unwrap_err();
        assert!(err.to_string().contains("trailing"), "{err}");
    }
}
