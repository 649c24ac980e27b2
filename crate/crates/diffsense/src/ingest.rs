//! Artifact loading and modified-function name canonicalization.
//!
//! Stripped binaries name functions by hexadecimal address, so a modified
//! function shows up as `FUN_<old>` on one side and `FUN_<new>` on the
//! other. Canonicalization renames it to `mod_<old>_<new>` and rewrites
//! every referencing location so the address churn does not show up as a
//! spurious difference in diffs or prompts.

use std::collections::BTreeMap;
use std::path::Path;

use regex::Regex;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::{validate_artifact, DiffArtifact, FunctionKind, SCHEMA_VERSION};
use crate::textdiff::{self, DEFAULT_CONTEXT};

const TOP_KEYS: &[&str] = &[
    "schema_version",
    "old",
    "new",
    "functions",
    "label",
    "function_labels",
];
const META_KEYS: &[&str] = &[
    "name",
    "version",
    "content_hash",
    "project_description",
    "changelog",
];
const FUNCTION_KEYS: &[&str] = &[
    "kind",
    "old_address",
    "new_address",
    "display_name",
    "code_old",
    "code_new",
    "callees",
    "text_diff",
];

fn unknown_keys(value: &Value, warnings: &mut Vec<String>) {
    let Some(top) = value.as_object() else { return };
    for key in top.keys() {
        if !TOP_KEYS.contains(&key.as_str()) {
            warnings.push(format!("unknown field `{key}`"));
        }
    }
    for side in ["old", "new"] {
        if let Some(meta) = top.get(side).and_then(Value::as_object) {
            for key in meta.keys() {
                if !META_KEYS.contains(&key.as_str()) {
                    warnings.push(format!("unknown field `{side}.{key}`"));
                }
            }
        }
    }
    if let Some(functions) = top.get("functions").and_then(Value::as_array) {
        for (i, f) in functions.iter().enumerate() {
            if let Some(obj) = f.as_object() {
                for key in obj.keys() {
                    if !FUNCTION_KEYS.contains(&key.as_str()) {
                        warnings.push(format!("unknown field `functions[{i}].{key}`"));
                    }
                }
            }
        }
    }
}

fn parse_value(path: &Path) -> Result<Value> {
    let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&raw)
        .map_err(|e| Error::schema(path.display().to_string(), format!("invalid JSON: {e}")))
}

fn decode(path: &Path, value: Value) -> Result<DiffArtifact> {
    let version = value
        .get("schema_version")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::schema(path.display().to_string(), "missing schema_version"))?;
    if version != SCHEMA_VERSION {
        return Err(Error::UnsupportedSchemaVersion {
            found: version,
            expected: SCHEMA_VERSION,
        });
    }
    let deserializer = value.clone();
    serde_path_to_error::deserialize(deserializer).map_err(|e| {
        Error::schema(
            format!("{}: {}", path.display(), e.path()),
            e.inner().to_string(),
        )
    })
}

/// Strict load: unknown fields and invariant violations are errors.
pub fn load_artifact(path: impl AsRef<Path>) -> Result<DiffArtifact> {
    let path = path.as_ref();
    let value = parse_value(path)?;
    let mut unknown = Vec::new();
    unknown_keys(&value, &mut unknown);
    if let Some(first) = unknown.first() {
        return Err(Error::schema(path.display().to_string(), first.clone()));
    }
    let artifact = decode(path, value)?;
    let violations = validate_artifact(&artifact);
    if violations.is_empty() {
        Ok(artifact)
    } else {
        Err(Error::Validation(violations))
    }
}

/// Lenient load: unknown fields are returned as warnings, invariants still
/// hold.
pub fn load_artifact_lenient(path: impl AsRef<Path>) -> Result<(DiffArtifact, Vec<String>)> {
    let path = path.as_ref();
    let value = parse_value(path)?;
    let mut warnings = Vec::new();
    unknown_keys(&value, &mut warnings);
    for w in &warnings {
        log::warn!("{}: {w} (ignored)", path.display());
    }
    let artifact = decode(path, value)?;
    let violations = validate_artifact(&artifact);
    if violations.is_empty() {
        Ok((artifact, warnings))
    } else {
        Err(Error::Validation(violations))
    }
}

fn canonical_name(old_addr: &str, new_addr: &str) -> String {
    format!("mod_{old_addr}_{new_addr}")
}

fn decompiler_token(addr: &str) -> String {
    format!("FUN_{addr}")
}

fn rewrite_code(code: &str, renames: &BTreeMap<String, String>) -> String {
    if renames.is_empty() {
        return code.to_string();
    }
    let pattern = format!(
        r"\b(?:{})\b",
        renames.keys().map(|k| regex::escape(k)).collect::<Vec<_>>().join("|")
    );
    let re = Regex::new(&pattern).expect("rename pattern");
    re.replace_all(code, |caps: &regex::Captures| renames[&caps[0]].clone())
        .into_owned()
}

fn rewrite_callees(callees: &[String], maps: &[&BTreeMap<String, String>]) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(callees.len());
    for callee in callees {
        let mut renamed = callee.clone();
        for map in maps {
            if let Some(target) = map.get(callee) {
                renamed = target.clone();
                break;
            }
        }
        if !out.contains(&renamed) {
            out.push(renamed);
        }
    }
    out
}

/// Renames every modified function to `mod_<old>_<new>` and rewrites all
/// referencing locations: `FUN_<old>` tokens in old-side code, `FUN_<new>`
/// tokens in new-side code, callee lists, and function-label keys.
/// Applying it twice equals applying it once.
pub fn canonicalize_names(artifact: &DiffArtifact) -> Result<DiffArtifact> {
    // Token → canonical name, per side.
    let mut old_map: BTreeMap<String, String> = BTreeMap::new();
    let mut new_map: BTreeMap<String, String> = BTreeMap::new();
    // Original display name → canonical name.
    let mut name_map: BTreeMap<String, String> = BTreeMap::new();

    for f in &artifact.functions {
        if f.kind != FunctionKind::Modified {
            continue;
        }
        let (Some(old_addr), Some(new_addr)) = (&f.old_address, &f.new_address) else {
            continue;
        };
        let canon = canonical_name(old_addr, new_addr);
        old_map.insert(decompiler_token(old_addr), canon.clone());
        new_map.insert(decompiler_token(new_addr), canon.clone());
        name_map.insert(f.display_name.clone(), canon);
    }

    // Collision check: canonical names must stay unique among themselves
    // and against every untouched display name.
    let mut taken: BTreeMap<&str, &str> = BTreeMap::new();
    for f in &artifact.functions {
        let effective = name_map
            .get(&f.display_name)
            .map(String::as_str)
            .unwrap_or(f.display_name.as_str());
        if let Some(previous) = taken.insert(effective, f.display_name.as_str()) {
            return Err(Error::NameCollision(format!(
                "`{previous}` and `{}` both map to `{effective}`",
                f.display_name
            )));
        }
    }

    let mut out = artifact.clone();
    for f in &mut out.functions {
        if let Some(canon) = name_map.get(&f.display_name) {
            f.display_name = canon.clone();
        }
        if let Some(code) = &f.code_old {
            f.code_old = Some(rewrite_code(code, &old_map));
        }
        if let Some(code) = &f.code_new {
            f.code_new = Some(rewrite_code(code, &new_map));
        }
        f.callees = match f.kind {
            FunctionKind::Deleted => rewrite_callees(&f.callees, &[&old_map]),
            FunctionKind::Added => rewrite_callees(&f.callees, &[&new_map]),
            FunctionKind::Modified => rewrite_callees(&f.callees, &[&old_map, &new_map]),
        };
        // Callee lists may also carry plain display names.
        f.callees = rewrite_callees(&f.callees, &[&name_map]);
    }
    if let Some(labels) = &artifact.function_labels {
        let mut rewritten = BTreeMap::new();
        for (name, label) in labels {
            let key = name_map.get(name).cloned().unwrap_or_else(|| name.clone());
            rewritten.insert(key, *label);
        }
        out.function_labels = Some(rewritten);
    }
    Ok(out)
}

/// Full preprocessing: canonicalize names, then (re)compute the textual
/// diff of every modified function from its canonicalized code sides.
pub fn prepare_artifact(artifact: &DiffArtifact) -> Result<DiffArtifact> {
    let mut out = canonicalize_names(artifact)?;
    for f in &mut out.functions {
        if f.kind == FunctionKind::Modified {
            if let (Some(old), Some(new)) = (&f.code_old, &f.code_new) {
                f.text_diff = Some(textdiff::unified_diff(old, new, DEFAULT_CONTEXT).text);
            }
        }
    }
    Ok(out)
}
