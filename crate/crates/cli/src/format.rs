//! System files.
//!
//! ```text
//! {"points": 4, "maps": [[1,2,2,2],[1,3,3,3]]}
//! {"points": ["a","b"], "maps": [[0,"b"],[1,1]], "labels": ["sigma","rho"]}
//! ```
//!
//! `points` is a count or a list of distinct names. Map images are indices or,
//! when points are named, names. `labels` optionally names the maps. The
//! canonical text written by [`canonical_text`] parses back to the same value
//! and re-serializes to the same bytes.

use serde_json::{json, Value};

use mvdyn_core::FiniteSystem;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemFile {
    pub system: FiniteSystem,
    pub point_names: Option<Vec<String>>,
    pub labels: Option<Vec<String>>,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Format(msg.into())
}

fn names(v: &Value, field: &str) -> Result<Vec<String>, CliError> {
    let arr = v.as_array().ok_or_else(|| bad(format!("field `{field}`: expected a list")))?;
    let mut out: Vec<String> = Vec::with_capacity(arr.len());
    for (k, item) in arr.iter().enumerate() {
        let s = item.as_str().ok_or_else(|| bad(format!("field `{field}[{k}]`: expected a string")))?;
        if out.iter().any(|o| o == s) {
            return Err(bad(format!("field `{field}[{k}]`: duplicate name {s:?}")));
        }
        out.push(s.to_string());
    }
    Ok(out)
}

/// Parses a system file. Errors name the offending field, and JSON syntax
/// errors carry line and column.
pub fn parse_system(text: &str) -> Result<SystemFile, CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| bad(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let obj = v.as_object().ok_or_else(|| bad("top level: expected an object"))?;
    if let Some(k) = obj.keys().find(|k| !matches!(k.as_str(), "points" | "maps" | "labels")) {
        return Err(bad(format!("unknown field `{k}`")));
    }
    let points = obj.get("points").ok_or_else(|| bad("missing field `points`"))?;
    let (size, point_names) = match points {
        Value::Number(n) => {
            let size = n.as_u64().ok_or_else(|| bad("field `points`: expected a non-negative integer"))?;
            (size as usize, None)
        }
        Value::Array(_) => {
            let n = names(points, "points")?;
            (n.len(), Some(n))
        }
        _ => return Err(bad("field `points`: expected an integer or a list of names")),
    };
    let maps = obj
        .get("maps")
        .ok_or_else(|| bad("missing field `maps`"))?
        .as_array()
        .ok_or_else(|| bad("field `maps`: expected a list of lists"))?;
    let mut tables = Vec::with_capacity(maps.len());
    for (i, row) in maps.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| bad(format!("field `maps[{i}]`: expected a list")))?;
        if row.len() != size {
            return Err(bad(format!("field `maps[{i}]`: has {} entries, expected {size}", row.len())));
        }
        let mut table = Vec::with_capacity(size);
        for (x, img) in row.iter().enumerate() {
            let y = match (img, &point_names) {
                (Value::Number(n), _) => n.as_u64().map(|y| y as usize),
                (Value::String(s), Some(pn)) => pn.iter().position(|p| p == s),
                _ => None,
            }
            .ok_or_else(|| bad(format!("field `maps[{i}][{x}]`: {img} is not a point")))?;
            if y >= size {
                return Err(bad(format!("field `maps[{i}][{x}]`: image {y} out of range")));
            }
            table.push(y);
        }
        tables.push(table);
    }
    let labels = obj.get("labels").map(|l| names(l, "labels")).transpose()?;
    if let Some(l) = &labels {
        if l.len() != tables.len() {
            return Err(bad(format!("field `labels`: {} labels for {} maps", l.len(), tables.len())));
        }
    }
    let system = FiniteSystem::new(size, tables).map_err(|e| bad(e.to_string()))?;
    Ok(SystemFile { system, point_names, labels })
}

/// Canonical compact form: fields in the order points, maps, labels; images
/// always as indices; one trailing newline.
pub fn canonical_text(f: &SystemFile) -> String {
    let points = match &f.point_names {
        Some(n) => json!(n),
        None => json!(f.system.size()),
    };
    let maps = serde_json::to_string(f.system.tables()).expect("tables serialize");
    let mut out = format!("{{\"points\":{points},\"maps\":{maps}");
    if let Some(l) = &f.labels {
        out.push_str(&format!(",\"labels\":{}", json!(l)));
    }
    out.push_str("}\n");
    out
}
