//! Plain-text topology and dataset files.
//!
//! Topology: first line `N E`, then `E` lines `i j` (0-based, `i < j`).
//! Dataset: one configuration per line, `N` whitespace-separated entries
//! each `+1`, `1` or `-1`. Blank lines and lines starting with `#` are
//! skipped in both formats.

use std::fmt::Write as _;
use std::path::Path;

use super::{Dataset, GraphTopology, IsingModel, SpinConfiguration};
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn parse_topology(text: &str) -> Result<GraphTopology> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty topology file"))?;
    let nums: Vec<&str> = header.split_whitespace().collect();
    if nums.len() != 2 {
        return Err(parse_err(hline, "header must be `N E`"));
    }
    let n: usize = nums[0]
        .parse()
        .map_err(|_| parse_err(hline, format!("bad node count `{}`", nums[0])))?;
    let e: usize = nums[1]
        .parse()
        .map_err(|_| parse_err(hline, format!("bad edge count `{}`", nums[1])))?;
    let mut edges = Vec::with_capacity(e);
    for (lineno, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(parse_err(lineno, "edge line must be `i j`"));
        }
        let i: usize = parts[0]
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad node index `{}`", parts[0])))?;
        let j: usize = parts[1]
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad node index `{}`", parts[1])))?;
        edges.push((i, j));
    }
    if edges.len() != e {
        return Err(parse_err(
            hline,
            format!("header declares {e} edges, file lists {}", edges.len()),
        ));
    }
    GraphTopology::new(n, edges)
}

pub fn read_topology(path: impl AsRef<Path>) -> Result<GraphTopology> {
    parse_topology(&read_text(path.as_ref())?)
}

pub fn parse_dataset(text: &str, model: &IsingModel) -> Result<Dataset> {
    let n = model.num_nodes();
    let mut examples = Vec::new();
    for (lineno, line) in content_lines(text) {
        let spins = line
            .split_whitespace()
            .map(|tok| match tok {
                "+1" | "1" => Ok(1i8),
                "-1" => Ok(-1i8),
                other => Err(parse_err(lineno, format!("spin `{other}` is not ±1"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        if spins.len() != n {
            return Err(parse_err(
                lineno,
                format!("expected {n} spins, found {}", spins.len()),
            ));
        }
        examples.push(SpinConfiguration::from_raw(spins));
    }
    Dataset::new(model, examples)
}

pub fn read_dataset(path: impl AsRef<Path>, model: &IsingModel) -> Result<Dataset> {
    parse_dataset(&read_text(path.as_ref())?, model)
}

/// Inverse of [`parse_dataset`]; spins are written as `+1` / `-1`.
pub fn write_dataset(data: &Dataset) -> String {
    let mut out = String::new();
    for x in data.examples() {
        let line: Vec<&str> = x
            .spins()
            .iter()
            .map(|&s| if s == 1 { "+1" } else { "-1" })
            .collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}
