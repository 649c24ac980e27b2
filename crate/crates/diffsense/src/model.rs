//! Domain types and the canonical on-disk artifact schema shared by the
//! whole pipeline.
//!
//! A `DiffArtifact` describes one software update as produced by a binary
//! diffing tool: metadata for the old/new binaries plus the added, deleted,
//! and modified function lists. All types are immutable value objects.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

/// Version of the artifact JSON schema this build reads and writes.
pub const SCHEMA_VERSION: u64 = 1;

/// Identity and description of one binary in an update pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryMeta {
    pub name: String,
    pub version: String,
    /// SHA-256 of the binary, lowercase hex.
    pub content_hash: String,
    pub project_description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub changelog: Option<String>,
}

/// How a function appears in the diff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionKind {
    Added,
    Deleted,
    Modified,
}

impl FunctionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FunctionKind::Added => "added",
            FunctionKind::Deleted => "deleted",
            FunctionKind::Modified => "modified",
        }
    }
}

/// Stable identity of a function across the old/new binaries.
///
/// Deleted functions carry only the old address, added functions only the
/// new address, modified functions both.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionId {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub old_address: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub new_address: Option<String>,
    pub display_name: String,
}

/// One function from the diff: identity, decompiled code for whichever
/// sides exist, callee names, and (for modified functions) the textual diff.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionRecord {
    pub kind: FunctionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub old_address: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub new_address: Option<String>,
    pub display_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code_old: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code_new: Option<String>,
    #[serde(default)]
    pub callees: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text_diff: Option<String>,
}

impl FunctionRecord {
    pub fn id(&self) -> FunctionId {
        FunctionId {
            old_address: self.old_address.clone(),
            new_address: self.new_address.clone(),
            display_name: self.display_name.clone(),
        }
    }

    /// The code side that feeds prompts: new for added/modified (what
    /// ships), old for deleted (nothing else exists).
    pub fn prompt_code(&self) -> Option<&str> {
        match self.kind {
            FunctionKind::Added | FunctionKind::Modified => self.code_new.as_deref(),
            FunctionKind::Deleted => self.code_old.as_deref(),
        }
    }
}

/// Ground-truth label for a diff or a function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Malicious,
    Benign,
}

/// One software-update diff, the unit the pipeline consumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffArtifact {
    pub schema_version: u64,
    pub old: BinaryMeta,
    pub new: BinaryMeta,
    pub functions: Vec<FunctionRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function_labels: Option<BTreeMap<String, Label>>,
}

/// Classification level for one FSS category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FssLevel {
    None,
    Low,
    Medium,
    High,
}

impl FssLevel {
    pub const ALL: [FssLevel; 4] = [
        FssLevel::None,
        FssLevel::Low,
        FssLevel::Medium,
        FssLevel::High,
    ];

    pub fn letter(&self) -> char {
        match self {
            FssLevel::None => 'N',
            FssLevel::Low => 'L',
            FssLevel::Medium => 'M',
            FssLevel::High => 'H',
        }
    }

    pub fn from_letter(c: char) -> Option<FssLevel> {
        match c {
            'N' => Some(FssLevel::None),
            'L' => Some(FssLevel::Low),
            'M' => Some(FssLevel::Medium),
            'H' => Some(FssLevel::High),
            _ => None,
        }
    }

    pub fn from_word(s: &str) -> Option<FssLevel> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Some(FssLevel::None),
            "low" => Some(FssLevel::Low),
            "medium" => Some(FssLevel::Medium),
            "high" => Some(FssLevel::High),
            _ => None,
        }
    }
}

/// The five category levels of a functional-sensitivity classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FssClassification {
    pub behaviors: FssLevel,
    pub resources: FssLevel,
    pub confidentiality: FssLevel,
    pub integrity: FssLevel,
    pub availability: FssLevel,
}

impl FssClassification {
    pub fn all_none() -> Self {
        FssClassification {
            behaviors: FssLevel::None,
            resources: FssLevel::None,
            confidentiality: FssLevel::None,
            integrity: FssLevel::None,
            availability: FssLevel::None,
        }
    }

    /// Element-wise maximum of two classifications.
    pub fn max(self, other: FssClassification) -> FssClassification {
        FssClassification {
            behaviors: self.behaviors.max(other.behaviors),
            resources: self.resources.max(other.resources),
            confidentiality: self.confidentiality.max(other.confidentiality),
            integrity: self.integrity.max(other.integrity),
            availability: self.availability.max(other.availability),
        }
    }
}

/// Aggregated functional sensitivity score.
///
/// `value` is on the 0.0..=10.0 scale with one-decimal granularity and is 0
/// whenever the impact aggregate is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FssScore {
    pub sensitivity: f64,
    pub impact: f64,
    pub value: f64,
}

impl FssScore {
    /// Score value scaled to integer tenths (0..=100); exact for comparison.
    pub fn value_tenths(&self) -> u32 {
        (self.value * 10.0).round() as u32
    }

    /// Canonical one-decimal rendering used in reports.
    pub fn value_string(&self) -> String {
        format!("{:.1}", self.value)
    }
}

/// Input/output token counts for one or more LLM calls.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenUsage {
    pub input_tokens: u64,
    pub output_tokens: u64,
}

impl TokenUsage {
    pub fn add(&mut self, other: TokenUsage) {
        self.input_tokens += other.input_tokens;
        self.output_tokens += other.output_tokens;
    }
}

/// Everything the pipeline learned about one function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionAnalysis {
    pub id: FunctionId,
    pub summary: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diff_summary: Option<String>,
    pub classification: FssClassification,
    pub score: FssScore,
    pub usage: TokenUsage,
}

/// Final per-diff outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Malicious,
    Benign,
    Unknown,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Malicious => "MALICIOUS",
            Verdict::Benign => "BENIGN",
            Verdict::Unknown => "UNKNOWN",
        }
    }
}

/// One entry of a verdict's supporting top-k list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFunction {
    pub id: FunctionId,
    pub score: f64,
    pub vector: String,
}

/// Per-diff verdict with the evidence it was based on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffVerdict {
    pub verdict: Verdict,
    pub rationale: String,
    /// Sorted by score descending (ties by display name).
    pub top_functions: Vec<RankedFunction>,
}

fn is_lower_hex(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_digit() || ('a'..='f').contains(&c))
}

fn check_meta(meta: &BinaryMeta, side: &str, out: &mut Vec<String>) {
    if meta.name.is_empty() {
        out.push(format!("{side}: name must be non-empty"));
    }
    if meta.version.is_empty() {
        out.push(format!("{side}: version must be non-empty"));
    }
    if meta.content_hash.len() != 64 || !is_lower_hex(&meta.content_hash) {
        out.push(format!(
            "{side}: content_hash must be 64 lowercase hex chars, got `{}`",
            meta.content_hash
        ));
    }
}

/// Checks every type invariant and returns human-readable violations.
///
/// An empty list means the artifact is exactly what the strict-mode parser
/// accepts. Validation reports, it never fails.
pub fn validate_artifact(artifact: &DiffArtifact) -> Vec<String> {
    let mut out = Vec::new();

    if artifact.schema_version != SCHEMA_VERSION {
        out.push(format!(
            "schema_version: expected {SCHEMA_VERSION}, got {}",
            artifact.schema_version
        ));
    }
    check_meta(&artifact.old, "old", &mut out);
    check_meta(&artifact.new, "new", &mut out);

    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (i, f) in artifact.functions.iter().enumerate() {
        let name = f.display_name.as_str();
        let at = format!("functions[{i}] `{name}`");
        if name.is_empty() {
            out.push(format!("functions[{i}]: display_name must be non-empty"));
        }
        if let Some(prev) = seen.insert(name, i) {
            out.push(format!(
                "duplicate display_name `{name}` (functions[{prev}] and functions[{i}])"
            ));
        }
        for (addr, field) in [(&f.old_address, "old_address"), (&f.new_address, "new_address")] {
            if let Some(a) = addr {
                if !is_lower_hex(a) {
                    out.push(format!("{at}: {field} must be lowercase hex, got `{a}`"));
                }
            }
        }
        match f.kind {
            FunctionKind::Added => {
                if f.new_address.is_none() {
                    out.push(format!("{at}: Added must carry new_address"));
                }
                if f.old_address.is_some() {
                    out.push(format!("{at}: Added must not carry old_address"));
                }
                if f.code_new.is_none() {
                    out.push(format!("{at}: Added must carry code_new"));
                }
                if f.code_old.is_some() {
                    out.push(format!("{at}: Added must not carry code_old"));
                }
            }
            FunctionKind::Deleted => {
                if f.old_address.is_none() {
                    out.push(format!("{at}: Deleted must carry old_address"));
                }
                if f.new_address.is_some() {
                    out.push(format!("{at}: Deleted must not carry new_address"));
                }
                if f.code_old.is_none() {
                    out.push(format!("{at}: Deleted must carry code_old"));
                }
                if f.code_new.is_some() {
                    out.push(format!("{at}: Deleted must not carry code_new"));
                }
            }
            FunctionKind::Modified => {
                if f.old_address.is_none() || f.new_address.is_none() {
                    out.push(format!("{at}: Modified must carry both addresses"));
                }
                if f.code_old.is_none() || f.code_new.is_none() {
                    out.push(format!("{at}: Modified must carry both code sides"));
                }
            }
        }
        if f.text_diff.is_some() && f.kind != FunctionKind::Modified {
            out.push(format!("{at}: text_diff is only valid on Modified functions"));
        }
        let mut callee_seen = HashMap::new();
        for c in &f.callees {
            if callee_seen.insert(c.as_str(), ()).is_some() {
                out.push(format!("{at}: duplicate callee `{c}`"));
            }
        }
    }

    if let Some(labels) = &artifact.function_labels {
        for name in labels.keys() {
            if !seen.contains_key(name.as_str()) {
                out.push(format!(
                    "function_labels: `{name}` does not match any function display_name"
                ));
            }
        }
    }

    out
}

/// Serializes an artifact in the canonical form: fixed field order, sorted
/// label map, two-space indent, trailing newline. Reserializing a parsed
/// canonical document is byte-identical.
pub fn to_canonical_json(artifact: &DiffArtifact) -> String {
    let mut s = serde_json::to_string_pretty(artifact).expect("artifact serialization");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn meta(name: &str, version: &str) -> BinaryMeta {
        BinaryMeta {
            name: name.to_string(),
            version: version.to_string(),
            content_hash: "0".repeat(63) + "a",
            project_description: format!("{name} test project"),
            changelog: None,
        }
    }

    pub(crate) fn added(name: &str, addr: &str, code: &str, callees: &[&str]) -> FunctionRecord {
        FunctionRecord {
            kind: FunctionKind::Added,
            old_address: None,
            new_address: Some(addr.to_string()),
            display_name: name.to_string(),
            code_old: None,
            code_new: Some(code.to_string()),
            callees: callees.iter().map(|s| s.to_string()).collect(),
            text_diff: None,
        }
    }

    fn artifact(functions: Vec<FunctionRecord>) -> DiffArtifact {
        DiffArtifact {
            schema_version: SCHEMA_VERSION,
            old: meta("proj", "1.0"),
            new: meta("proj", "1.1"),
            functions,
            label: None,
            function_labels: None,
        }
    }

    #[test]
    fn well_formed_artifact_validates_clean() {
        let a = artifact(vec![added("f", "00401000", "int f() { return 1; }", &[])]);
        assert_eq!(validate_artifact(&a), Vec::<String>::new());
    }

    #[test]
    fn added_with_code_old_is_flagged() {
        let mut f = added("f", "00401000", "int f() { return 1; }", &[]);
        f.code_old = Some("stale".into());
        let violations = validate_artifact(&artifact(vec![f]));
        assert_eq!(violations.len(), 1);
        assert!(violations[0].contains("`f`"), "{violations:?}");
        assert!(violations[0].contains("must not carry code_old"), "{violations:?}");
    }

    #[test]
    fn duplicate_display_name_names_both_records() {
        let a = artifact(vec![
            added("f", "00401000", "x", &[]),
            added("f", "00402000", "y", &[]),
        ]);
        let violations = validate_artifact(&a);
        assert_eq!(violations.len(), 1);
        assert!(violations[0].contains("functions[0]") && violations[0].contains("functions[1]"));
        assert!(violations[0].contains("`f`"));
    }

    #[test]
    fn kind_address_pairing_enforced() {
        let mut f = added("f", "00401000", "x", &[]);
        f.old_address = Some("00400000".into());
        let violations = validate_artifact(&artifact(vec![f]));
        assert!(violations.iter().any(|v| v.contains("must not carry old_address")));

        let del = FunctionRecord {
            kind: FunctionKind::Deleted,
            old_address: None,
            new_address: None,
            display_name: "g".into(),
            code_old: None,
            code_new: None,
            callees: vec![],
            text_diff: None,
        };
        let violations = validate_artifact(&artifact(vec![del]));
        assert!(violations.iter().any(|v| v.contains("Deleted must carry old_address")));
        assert!(violations.iter().any(|v| v.contains("Deleted must carry code_old")));
    }

    #[test]
    fn uppercase_hash_is_flagged() {
        let mut a = artifact(vec![]);
        a.new.content_hash = "A".repeat(64);
        assert!(validate_artifact(&a)[0].contains("content_hash"));
    }

    #[test]
    fn duplicate_callee_is_flagged() {
        let a = artifact(vec![added("f", "00401000", "x", &["g", "g"])]);
        assert!(validate_artifact(&a)[0].contains("duplicate callee `g`"));
    }

    #[test]
    fn unknown_function_label_is_flagged() {
        let mut a = artifact(vec![added("f", "00401000", "x", &[])]);
        a.function_labels = Some([("ghost".to_string(), Label::Malicious)].into());
        assert!(validate_artifact(&a)[0].contains("`ghost`"));
    }

    #[test]
    fn canonical_json_round_trips_byte_identical() {
        let mut a = artifact(vec![
            added("f", "00401000", "int f() {\n  return g();\n}", &["g"]),
            added("g", "00402000", "int g() { return 2; }", &[]),
        ]);
        a.label = Some(Label::Benign);
        a.function_labels = Some(
            [("f".to_string(), Label::Benign), ("g".to_string(), Label::Malicious)].into(),
        );
        let first = to_canonical_json(&a);
        let parsed: DiffArtifact = serde_json::from_str(&first).unwrap();
        assert_eq!(to_canonical_json(&parsed), first);
    }
}
