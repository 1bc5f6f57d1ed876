//! Array files and report rendering.
//!
//! Two bit-exact text encodings of a square array: a plain grid (`side` lines
//! of `side` characters from `{0,1}`) and PBM P1 (magic `P1`, width and
//! height, then whitespace-separated `0`/`1` tokens at most 70 characters per
//! line). Reading auto-detects the format and reports malformed input with
//! line/column positions. Reports serialize to line-oriented `key: value`
//! text here and to JSON via serde in the types themselves.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::torus::ToroidalArray;
use crate::verify::{CensusMode, CensusReport, NestedReport, PerfectnessReport, Witness};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ArrayFormat {
    TextGrid,
    PbmP1,
}

impl std::str::FromStr for ArrayFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" | "grid" | "text-grid" => Ok(ArrayFormat::TextGrid),
            "pbm" | "p1" | "pbm-p1" => Ok(ArrayFormat::PbmP1),
            other => Err(Error::InvalidArgument(format!(
                "unknown array format {other:?} (expected text or pbm)"
            ))),
        }
    }
}

/// Serializes the array in the requested format.
pub fn write_array(a: &ToroidalArray, format: ArrayFormat) -> String {
    match format {
        ArrayFormat::TextGrid => {
            let mut out = String::with_capacity(a.side() * (a.side() + 1));
            for row in a.rows_as_strings() {
                out.push_str(&row);
                out.push('\n');
            }
            out
        }
        ArrayFormat::PbmP1 => {
            let mut out = format!("P1\n{} {}\n", a.side(), a.side());
            let mut line_len = 0usize;
            for r in 0..a.side() {
                for c in 0..a.side() {
                    let token = if a.bit(r, c) { "1" } else { "0" };
                    if line_len + 2 > 70 {
                        out.push('\n');
                        line_len = 0;
                    }
                    if line_len > 0 {
                        out.push(' ');
                        line_len += 1;
                    }
                    out.push_str(token);
                    line_len += 1;
                }
            }
            out.push('\n');
            out
        }
    }
}

pub fn save_array(a: &ToroidalArray, format: ArrayFormat, path: &Path) -> Result<()> {
    std::fs::write(path, write_array(a, format))?;
    Ok(())
}

/// Parses either format, detected from the leading bytes.
pub fn read_array(text: &str) -> Result<ToroidalArray> {
    if text.trim_start().starts_with("P1") {
        read_pbm(text)
    } else {
        read_text_grid(text)
    }
}

pub fn load_array(path: &Path) -> Result<ToroidalArray> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_array(&text)
}

fn read_text_grid(text: &str) -> Result<ToroidalArray> {
    let mut rows: Vec<Vec<u8>> = Vec::new();
    let mut side = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::with_capacity(line.len());
        for (col, ch) in line.chars().enumerate() {
            match ch {
                '0' => row.push(0),
                '1' => row.push(1),
                other => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        column: col + 1,
                        message: format!("illegal character {other:?} in grid row"),
                    })
                }
            }
        }
        let expected = *side.get_or_insert(row.len());
        if row.len() != expected {
            return Err(Error::Parse {
                line: lineno + 1,
                column: row.len() + 1,
                message: format!("row has {} cells, expected {expected}", row.len()),
            });
        }
        rows.push(row);
    }
    let side = side.ok_or(Error::Parse {
        line: 1,
        column: 1,
        message: "empty grid".into(),
    })?;
    if rows.len() != side {
        return Err(Error::Parse {
            line: rows.len() + 1,
            column: 1,
            message: format!("grid is {}x{side}, toroidal arrays must be square", rows.len()),
        });
    }
    ToroidalArray::from_rows(&rows)
}

/// Whitespace/comment-aware tokenizer tracking line and column.
struct Tokens<'a> {
    rest: std::str::Chars<'a>,
    line: usize,
    column: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Tokens {
            rest: text.chars(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let ch = self.rest.next()?;
        if ch == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(ch)
    }

    /// Next token together with its start position; `#` comments run to the
    /// end of the line.
    fn next_token(&mut self) -> Option<(String, usize, usize)> {
        loop {
            let (line, column) = (self.line, self.column);
            match self.bump()? {
                c if c.is_whitespace() => continue,
                '#' => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                c => {
                    let mut token = String::from(c);
                    loop {
                        let peek = self.rest.clone().next();
                        match peek {
                            Some(c) if !c.is_whitespace() && c != '#' => {
                                token.push(c);
                                self.bump();
                            }
                            _ => break,
                        }
                    }
                    return Some((token, line, column));
                }
            }
        }
    }
}

fn read_pbm(text: &str) -> Result<ToroidalArray> {
    let mut tokens = Tokens::new(text);
    let parse_err = |line: usize, column: usize, message: String| Error::Parse { line, column, message };

    let (magic, l, c) = tokens
        .next_token()
        .ok_or_else(|| parse_err(1, 1, "empty file".into()))?;
    if magic != "P1" {
        return Err(parse_err(l, c, format!("expected magic P1, found {magic:?}")));
    }
    let mut dim = |name: &str| -> Result<usize> {
        let (tok, l, c) = tokens
            .next_token()
            .ok_or_else(|| parse_err(l, c, format!("missing {name}")))?;
        tok.parse::<usize>()
            .map_err(|_| parse_err(l, c, format!("{name} must be a number, found {tok:?}")))
    };
    let width = dim("width")?;
    let height = dim("height")?;
    if width != height {
        return Err(parse_err(l, c, format!(
            "image is {width}x{height}, toroidal arrays must be square"
        )));
    }
    let mut rows = vec![vec![0u8; width]; height];
    let mut filled = 0usize;
    while let Some((tok, l, c)) = tokens.next_token() {
        // a token may pack several pixels (the PBM raster allows it)
        for (off, ch) in tok.chars().enumerate() {
            let bit = match ch {
                '0' => 0,
                '1' => 1,
                other => {
                    return Err(parse_err(l, c + off, format!("illegal raster character {other:?}")))
                }
            };
            if filled >= width * height {
                return Err(parse_err(l, c + off, format!(
                    "raster has more than {width}x{height} cells"
                )));
            }
            rows[filled / width][filled % width] = bit;
            filled += 1;
        }
    }
    if filled != width * height {
        return Err(Error::Parse {
            line: tokens.line,
            column: tokens.column,
            message: format!("raster ended after {filled} of {} cells", width * height),
        });
    }
    ToroidalArray::from_rows(&rows)
}

/// `key: value` rendering of a perfectness report.
pub fn render_perfectness(r: &PerfectnessReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "verdict: {}", if r.perfect { "perfect" } else { "not-perfect" });
    let _ = writeln!(out, "window: {}", r.window);
    let _ = writeln!(out, "modulo: {}", r.modulo);
    let _ = writeln!(out, "positions-scanned: {}", r.positions_scanned);
    if let Some(witness) = &r.witness {
        render_witness(&mut out, witness, "");
    }
    out
}

fn render_witness(out: &mut String, witness: &Witness, indent: &str) {
    match witness {
        Witness::Duplicate { pattern, class, positions } => {
            let _ = writeln!(out, "{indent}witness: duplicate");
            let _ = writeln!(out, "{indent}pattern: {}", pattern.join("/"));
            let _ = writeln!(out, "{indent}class: {},{}", class.0, class.1);
            let rendered: Vec<String> = positions.iter().map(|p| format!("({},{})", p.0, p.1)).collect();
            let _ = writeln!(out, "{indent}positions: {}", rendered.join(" "));
        }
        Witness::Missing { pattern, class } => {
            let _ = writeln!(out, "{indent}witness: missing");
            let _ = writeln!(out, "{indent}pattern: {}", pattern.join("/"));
            let _ = writeln!(out, "{indent}class: {},{}", class.0, class.1);
        }
        Witness::CountMismatch { positions_per_class, patterns_log2 } => {
            let _ = writeln!(out, "{indent}witness: count-mismatch");
            let _ = writeln!(out, "{indent}positions-per-class: {positions_per_class}");
            let _ = writeln!(out, "{indent}patterns-log2: {patterns_log2}");
        }
    }
}

/// `key: value` rendering of a nested report; at most three failing parts are
/// detailed per level.
pub fn render_nested(r: &NestedReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "verdict: {}", if r.nested { "nested" } else { "not-nested" });
    let _ = writeln!(out, "window: {}", r.window);
    let _ = writeln!(out, "modulo: {}", r.modulo);
    let _ = writeln!(out, "levels: {}", r.levels.len());
    for level in &r.levels {
        let _ = writeln!(
            out,
            "level: window {} part-side {} parts {} failures {}",
            level.window, level.part_side, level.part_count, level.failures.len()
        );
    }
    for level in &r.levels {
        for failure in level.failures.iter().take(3) {
            let _ = writeln!(
                out,
                "failing-part: side {} anchor ({},{})",
                level.part_side, failure.part_anchor.0, failure.part_anchor.1
            );
            if let Some(witness) = &failure.report.witness {
                render_witness(&mut out, witness, "  ");
            }
        }
    }
    out
}

/// `key: value` rendering of a census report.
pub fn render_census(r: &CensusReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "n: {}", r.n);
    match r.mode {
        CensusMode::Exhaustive => {
            let _ = writeln!(out, "mode: exhaustive");
        }
        CensusMode::Sample { count, seed } => {
            let _ = writeln!(out, "mode: sample");
            let _ = writeln!(out, "sample-count: {count}");
            let _ = writeln!(out, "seed: {seed}");
        }
    }
    let _ = writeln!(out, "family-size-log2: {}", r.family_size_log2);
    let _ = writeln!(out, "family-size: {}", r.family_size);
    let _ = writeln!(out, "generated: {}", r.generated);
    let _ = writeln!(out, "distinct: {}", r.distinct);
    let _ = writeln!(out, "nested-passing: {}", r.nested_passing);
    out
}
