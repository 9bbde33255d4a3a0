//! Excavation blueprints and their ASCII file format.
//!
//! One character per cell, rows separated by newlines:
//! `0`-`9` target depth in soil units, `D` dump, `X` don't care.
//! Blank lines and lines starting with `#` are ignored.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Width of the dump ring around a generated excavation area.
pub const DUMP_RING: usize = 2;
/// Width of the don't-care border outside the dump ring.
pub const BORDER: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellSpec {
    /// Excavate to this depth below the original ground.
    Target(u8),
    Dump,
    DontCare,
}

impl CellSpec {
    pub fn is_target(self) -> bool {
        matches!(self, CellSpec::Target(_))
    }

    fn to_char(self) -> char {
        match self {
            CellSpec::Target(d) => char::from(b'0' + d.min(9)),
            CellSpec::Dump => 'D',
            CellSpec::DontCare => 'X',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Blueprint {
    width: usize,
    height: usize,
    cells: Vec<CellSpec>,
}

impl Blueprint {
    /// Builds a blueprint, rejecting one without any target cell.
    pub fn new(width: usize, height: usize, cells: Vec<CellSpec>) -> Result<Blueprint> {
        if width == 0 || height == 0 || cells.len() != width * height {
            return Err(Error::InvalidBlueprint(format!(
                "{} cells do not form a {width}x{height} grid",
                cells.len()
            )));
        }
        if !cells.iter().any(|c| c.is_target()) {
            return Err(Error::InvalidBlueprint("no target cells".into()));
        }
        Ok(Blueprint { width, height, cells })
    }

    /// Central `area_w x area_h` excavation at `depth`, ringed by dump cells,
    /// with a don't-care outer border.
    pub fn excavation(area_w: usize, area_h: usize, depth: u8) -> Result<Blueprint> {
        if area_w == 0 || area_h == 0 {
            return Err(Error::InvalidBlueprint("empty excavation area".into()));
        }
        if depth > 9 {
            return Err(Error::InvalidBlueprint(format!("depth {depth} exceeds 9")));
        }
        let margin = DUMP_RING + BORDER;
        let width = area_w + 2 * margin;
        let height = area_h + 2 * margin;
        let mut cells = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                let ring = x.min(y).min(width - 1 - x).min(height - 1 - y);
                cells.push(if ring < BORDER {
                    CellSpec::DontCare
                } else if ring < margin {
                    CellSpec::Dump
                } else {
                    CellSpec::Target(depth)
                });
            }
        }
        Blueprint::new(width, height, cells)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cells(&self) -> &[CellSpec] {
        &self.cells
    }

    pub fn get(&self, x: usize, y: usize) -> CellSpec {
        self.cells[y * self.width + x]
    }

    pub fn target_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_target()).count()
    }

    pub fn parse(text: &str) -> Result<Blueprint> {
        let mut rows: Vec<Vec<CellSpec>> = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut row = Vec::with_capacity(line.len());
            for (col, ch) in line.chars().enumerate() {
                let spec = match ch {
                    '0'..='9' => CellSpec::Target(ch as u8 - b'0'),
                    'D' | 'd' => CellSpec::Dump,
                    'X' | 'x' => CellSpec::DontCare,
                    other => {
                        return Err(Error::Blueprint {
                            line: line_no + 1,
                            column: col + 1,
                            message: format!("unexpected character {other:?}"),
                        })
                    }
                };
                row.push(spec);
            }
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(Error::Blueprint {
                        line: line_no + 1,
                        column: row.len().min(first.len()) + 1,
                        message: format!("row has {} cells, expected {}", row.len(), first.len()),
                    });
                }
            }
            rows.push(row);
        }
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        Blueprint::new(width, height, rows.into_iter().flatten().collect())
    }

    pub fn to_ascii(&self) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for row in self.cells.chunks(self.width) {
            for c in row {
                out.push(c.to_char());
            }
            out.push('\n');
        }
        out
    }
}

/// Renders a heightfield as rows of space-separated signed integers, preceded
/// by a `# t=<timestep>` header line.
pub fn format_snapshot(width: usize, heights: &[i64], timestep: u64) -> String {
    let mut out = format!("# t={timestep}\n");
    for row in heights.chunks(width) {
        let line: Vec<String> = row.iter().map(i64::to_string).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

/// Parses one snapshot block written by [`format_snapshot`].
pub fn parse_snapshot(text: &str) -> Result<(u64, usize, Vec<i64>)> {
    let mut timestep = 0;
    let mut width = None;
    let mut heights = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("# t=") {
            timestep = rest.parse().map_err(|_| Error::Blueprint {
                line: line_no + 1,
                column: 5,
                message: "bad timestep".into(),
            })?;
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Vec<i64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Blueprint {
                line: line_no + 1,
                column: 1,
                message: format!("{e}"),
            })?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Blueprint {
                    line: line_no + 1,
                    column: 1,
                    message: format!("row has {} values, expected {w}", row.len()),
                })
            }
            _ => {}
        }
        heights.extend(row);
    }
    Ok((timestep, width.unwrap_or(0), heights))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "\
XXXXXXXXXXXXXX
XDDDDDDDDDDDDX
XDDDDDDDDDDDDX
XDD11111111DDX
XDD11111111DDX
XDD11111111DDX
XDD11111111DDX
XDD11111111DDX
XDD11111111DDX
XDD11111111DDX
XDD11111111DDX
XDDDDDDDDDDDDX
XDDDDDDDDDDDDX
XXXXXXXXXXXXXX
";

    #[test]
    fn generated_layout_matches_documented_example() {
        let bp = Blueprint::excavation(8, 8, 1).unwrap();
        assert_eq!(bp.to_ascii(), EXAMPLE);
        assert_eq!(bp.target_count(), 64);
        assert_eq!(Blueprint::parse(EXAMPLE).unwrap(), bp);
    }

    #[test]
    fn parse_rejects_bad_characters_and_ragged_rows() {
        let err = Blueprint::parse("11\n1Q\n").unwrap_err();
        assert!(err.to_string().contains("line 2, column 2"), "{err}");
        assert!(Blueprint::parse("111\n11\n").is_err());
        assert!(Blueprint::parse("DD\nXX\n").is_err());
    }

    #[test]
    fn snapshot_round_trip() {
        let heights = vec![0, -1, 2, 3, -4, 5];
        let text = format_snapshot(3, &heights, 42);
        assert_eq!(text, "# t=42\n0 -1 2\n3 -4 5\n");
        assert_eq!(parse_snapshot(&text).unwrap(), (42, 3, heights));
    }
}
