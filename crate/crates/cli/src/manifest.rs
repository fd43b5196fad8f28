//! Labeled-model manifests.
//!
//! One block per line: `<matrix-market file> label=AC|SING`. Blank lines and
//! `#` comments are ignored; relative paths resolve against the manifest's
//! directory. Block order in the file is the block order of the model.

use std::path::{Path, PathBuf};

use specshift::{Label, LabeledOperator};

use crate::error::CliError;
use crate::mtx;

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub path: PathBuf,
    pub label: Label,
}

pub fn parse_entries(text: &str, base: &Path, source: &Path) -> Result<Vec<Entry>, CliError> {
    let mut entries = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| CliError::Parse {
            input: source.display().to_string(),
            msg: format!("line {}: {msg}", k + 1),
        };
        let mut parts = line.split_whitespace();
        let file = parts.next().unwrap_or_default();
        let label = match (parts.next(), parts.next()) {
            (Some(tag), None) => tag
                .strip_prefix("label=")
                .ok_or_else(|| bad(format!("expected label=AC|SING, found '{tag}'")))?
                .parse::<Label>()
                .map_err(|e| bad(e.to_string()))?,
            _ => return Err(bad("expected '<file> label=AC|SING'".into())),
        };
        entries.push(Entry {
            path: base.join(file),
            label,
        });
    }
    if entries.is_empty() {
        return Err(CliError::Parse {
            input: source.display().to_string(),
            msg: "manifest lists no blocks".into(),
        });
    }
    Ok(entries)
}

pub fn load(path: &Path) -> Result<LabeledOperator, CliError> {
    let text = crate::read_text(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let blocks = parse_entries(&text, base, path)?
        .into_iter()
        .map(|e| Ok((crate::load_operator(&e.path)?, e.label)))
        .collect::<Result<Vec<_>, CliError>>()?;
    LabeledOperator::new(blocks).map_err(|e| CliError::module("decompose", path, e))
}

/// Writes every block next to `dir/<stem>.manifest` and returns the manifest path.
pub fn save(model: &LabeledOperator, dir: &Path, stem: &str) -> std::io::Result<PathBuf> {
    let mut text = String::new();
    for (k, (block, label)) in model.blocks().iter().enumerate() {
        let name = format!("{stem}_block{k}.mtx");
        std::fs::write(dir.join(&name), mtx::write(block))?;
        text.push_str(&format!("{name} label={label}\n"));
    }
    let path = dir.join(format!("{stem}.manifest"));
    std::fs::write(&path, text)?;
    Ok(path)
}
