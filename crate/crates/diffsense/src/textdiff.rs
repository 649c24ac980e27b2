//! Unified textual diff of old/new decompiled code.
//!
//! Line matching follows the difflib reference behavior exactly, including
//! the auto-junk rule that drops over-popular lines from anchoring (but not
//! from match extension) once an input reaches 200 lines. Output is
//! byte-compatible with `difflib.unified_diff` over the same line lists.

use std::collections::HashMap;

pub const DEFAULT_CONTEXT: usize = 3;

/// A rendered unified diff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnifiedDiff {
    pub text: String,
    pub hunk_count: usize,
}

impl UnifiedDiff {
    pub fn is_empty(&self) -> bool {
        self.hunk_count == 0
    }
}

/// Splits code into comparison lines: trailing whitespace stripped, a final
/// newline does not produce a phantom empty line.
pub fn split_normalized_lines(s: &str) -> Vec<String> {
    if s.is_empty() {
        return Vec::new();
    }
    let mut parts: Vec<&str> = s.split('\n').collect();
    if parts.last() == Some(&"") {
        parts.pop();
    }
    parts.iter().map(|p| p.trim_end().to_string()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tag {
    Replace,
    Delete,
    Insert,
    Equal,
}

#[derive(Debug, Clone, Copy)]
struct Opcode {
    tag: Tag,
    i1: usize,
    i2: usize,
    j1: usize,
    j2: usize,
}

fn build_b2j<'a>(b: &'a [String]) -> HashMap<&'a str, Vec<usize>> {
    let mut b2j: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, line) in b.iter().enumerate() {
        b2j.entry(line.as_str()).or_default().push(i);
    }
    // Auto-junk: for inputs of 200+ lines, lines occurring in more than 1%
    // of positions stop anchoring matches.
    if b.len() >= 200 {
        let ntest = b.len() / 100 + 1;
        b2j.retain(|_, idxs| idxs.len() <= ntest);
    }
    b2j
}

fn find_longest_match(
    a: &[String],
    b: &[String],
    b2j: &HashMap<&str, Vec<usize>>,
    alo: usize,
    ahi: usize,
    blo: usize,
    bhi: usize,
) -> (usize, usize, usize) {
    let mut besti = alo;
    let mut bestj = blo;
    let mut bestsize = 0usize;
    let mut j2len: HashMap<usize, usize> = HashMap::new();
    for i in alo..ahi {
        let mut newj2len: HashMap<usize, usize> = HashMap::new();
        if let Some(indices) = b2j.get(a[i].as_str()) {
            for &j in indices {
                if j < blo {
                    continue;
                }
                if j >= bhi {
                    break;
                }
                let k = if j == 0 {
                    1
                } else {
                    j2len.get(&(j - 1)).copied().unwrap_or(0) + 1
                };
                newj2len.insert(j, k);
                if k > bestsize {
                    besti = i + 1 - k;
                    bestj = j + 1 - k;
                    bestsize = k;
                }
            }
        }
        j2len = newj2len;
    }
    // Extend over equal lines the popularity filter kept out of b2j.
    while besti > alo && bestj > blo && a[besti - 1] == b[bestj - 1] {
        besti -= 1;
        bestj -= 1;
        bestsize += 1;
    }
    while besti + bestsize < ahi && bestj + bestsize < bhi && a[besti + bestsize] == b[bestj + bestsize]
    {
        bestsize += 1;
    }
    (besti, bestj, bestsize)
}

fn matching_blocks(a: &[String], b: &[String]) -> Vec<(usize, usize, usize)> {
    let b2j = build_b2j(b);
    let (la, lb) = (a.len(), b.len());
    let mut queue = vec![(0, la, 0, lb)];
    let mut blocks = Vec::new();
    while let Some((alo, ahi, blo, bhi)) = queue.pop() {
        let (i, j, k) = find_longest_match(a, b, &b2j, alo, ahi, blo, bhi);
        if k > 0 {
            blocks.push((i, j, k));
            if alo < i && blo < j {
                queue.push((alo, i, blo, j));
            }
            if i + k < ahi && j + k < bhi {
                queue.push((i + k, ahi, j + k, bhi));
            }
        }
    }
    blocks.sort_unstable();

    let (mut i1, mut j1, mut k1) = (0usize, 0usize, 0usize);
    let mut merged = Vec::new();
    for (i2, j2, k2) in blocks {
        if i1 + k1 == i2 && j1 + k1 == j2 {
            k1 += k2;
        } else {
            if k1 > 0 {
                merged.push((i1, j1, k1));
            }
            (i1, j1, k1) = (i2, j2, k2);
        }
    }
    if k1 > 0 {
        merged.push((i1, j1, k1));
    }
    merged.push((la, lb, 0));
    merged
}

fn opcodes(a: &[String], b: &[String]) -> Vec<Opcode> {
    let mut i = 0usize;
    let mut j = 0usize;
    let mut out = Vec::new();
    for (ai, bj, size) in matching_blocks(a, b) {
        let tag = if i < ai && j < bj {
            Some(Tag::Replace)
        } else if i < ai {
            Some(Tag::Delete)
        } else if j < bj {
            Some(Tag::Insert)
        } else {
            None
        };
        if let Some(tag) = tag {
            out.push(Opcode { tag, i1: i, i2: ai, j1: j, j2: bj });
        }
        i = ai + size;
        j = bj + size;
        if size > 0 {
            out.push(Opcode { tag: Tag::Equal, i1: ai, i2: i, j1: bj, j2: j });
        }
    }
    out
}

fn grouped_opcodes(a: &[String], b: &[String], n: usize) -> Vec<Vec<Opcode>> {
    let mut codes = opcodes(a, b);
    if codes.is_empty() {
        codes.push(Opcode { tag: Tag::Equal, i1: 0, i2: 1, j1: 0, j2: 1 });
    }
    if codes[0].tag == Tag::Equal {
        let c = codes[0];
        codes[0] = Opcode {
            tag: Tag::Equal,
            i1: c.i1.max(c.i2.saturating_sub(n)),
            i2: c.i2,
            j1: c.j1.max(c.j2.saturating_sub(n)),
            j2: c.j2,
        };
    }
    let last = codes.len() - 1;
    if codes[last].tag == Tag::Equal {
        let c = codes[last];
        codes[last] = Opcode {
            tag: Tag::Equal,
            i1: c.i1,
            i2: c.i2.min(c.i1 + n),
            j1: c.j1,
            j2: c.j2.min(c.j1 + n),
        };
    }

    let nn = n + n;
    let mut groups = Vec::new();
    let mut group: Vec<Opcode> = Vec::new();
    for c in codes {
        if c.tag == Tag::Equal && c.i2 - c.i1 > nn {
            group.push(Opcode {
                tag: Tag::Equal,
                i1: c.i1,
                i2: c.i2.min(c.i1 + n),
                j1: c.j1,
                j2: c.j2.min(c.j1 + n),
            });
            groups.push(std::mem::take(&mut group));
            group.push(Opcode {
                tag: Tag::Equal,
                i1: c.i1.max(c.i2.saturating_sub(n)),
                i2: c.i2,
                j1: c.j1.max(c.j2.saturating_sub(n)),
                j2: c.j2,
            });
        } else {
            group.push(c);
        }
    }
    if !group.is_empty() && !(group.len() == 1 && group[0].tag == Tag::Equal) {
        groups.push(group);
    }
    groups
}

fn format_range(start: usize, stop: usize) -> String {
    let beginning = start + 1;
    let length = stop - start;
    if length == 1 {
        return beginning.to_string();
    }
    let beginning = if length == 0 { beginning - 1 } else { beginning };
    format!("{beginning},{length}")
}

/// Unified diff of two code bodies with `--- old` / `+++ new` headers and
/// `context` lines of surrounding context. Identical inputs produce an
/// entirely empty diff.
pub fn unified_diff(old_code: &str, new_code: &str, context: usize) -> UnifiedDiff {
    let a = split_normalized_lines(old_code);
    let b = split_normalized_lines(new_code);
    let groups = grouped_opcodes(&a, &b, context);

    let mut text = String::new();
    if !groups.is_empty() {
        text.push_str("--- old\n");
        text.push_str("+++ new\n");
    }
    for group in &groups {
        let first = group[0];
        let last = group[group.len() - 1];
        text.push_str(&format!(
            "@@ -{} +{} @@\n",
            format_range(first.i1, last.i2),
            format_range(first.j1, last.j2)
        ));
        for op in group {
            match op.tag {
                Tag::Equal => {
                    for line in &a[op.i1..op.i2] {
                        text.push(' ');
                        text.push_str(line);
                        text.push('\n');
                    }
                }
                Tag::Replace | Tag::Delete => {
                    for line in &a[op.i1..op.i2] {
                        text.push('-');
                        text.push_str(line);
                        text.push('\n');
                    }
                }
                _ => {}
            }
            match op.tag {
                Tag::Replace | Tag::Insert => {
                    for line in &b[op.j1..op.j2] {
                        text.push('+');
                        text.push_str(line);
                        text.push('\n');
                    }
                }
                _ => {}
            }
        }
    }
    UnifiedDiff {
        text,
        hunk_count: groups.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_inputs_give_empty_diff() {
        let d = unified_diff("int f() {\n  return 1;\n}\n", "int f() {\n  return 1;\n}\n", 3);
        assert_eq!(d.text, "");
        assert_eq!(d.hunk_count, 0);
        assert!(d.is_empty());
    }

    #[test]
    fn trailing_whitespace_differences_vanish() {
        let d = unified_diff("a   \nb\t\n", "a\nb\n", 3);
        assert!(d.is_empty());
    }

    #[test]
    fn one_changed_line_in_ten() {
        let old: String = (0..10).map(|i| format!("line {i}\n")).collect();
        let new = old.replace("line 4", "line four");
        let d = unified_diff(&old, &new, 3);
        assert_eq!(d.hunk_count, 1);
        let minus: Vec<&str> = d.text.lines().filter(|l| l.starts_with('-') && !l.starts_with("---")).collect();
        let plus: Vec<&str> = d.text.lines().filter(|l| l.starts_with('+') && !l.starts_with("+++")).collect();
        assert_eq!(minus, vec!["-line 4"]);
        assert_eq!(plus, vec!["+line four"]);
    }

    #[test]
    fn disjoint_edits_fifty_lines_apart_make_two_hunks() {
        let old: String = (0..60).map(|i| format!("row {i}\n")).collect();
        let new = old.replace("row 5\n", "ROW 5\n").replace("row 55\n", "ROW 55\n");
        assert_eq!(unified_diff(&old, &new, 3).hunk_count, 2);
    }

    #[test]
    fn hunk_headers_match_expected_shape() {
        let d = unified_diff("", "line one\nline two\nline three\n", 3);
        assert!(d.text.starts_with("--- old\n+++ new\n@@ -0,0 +1,3 @@\n"), "{}", d.text);
    }
}
