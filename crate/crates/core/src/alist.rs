//! alist text format for sparse binary matrices.
//!
//! ```text
//! n_cols n_rows
//! max_col_degree max_row_degree
//! <column degrees>
//! <row degrees>
//! <one line per column: 1-based row indices, zero padded>
//! <one line per row: 1-based column indices, zero padded>
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lifted::SparseParity;

pub fn to_alist(h: &SparseParity) -> String {
    let max_col = h.col_rows.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = h.row_cols.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = String::new();
    writeln!(out, "{} {}", h.n_cols, h.n_rows).unwrap();
    writeln!(out, "{max_col} {max_row}").unwrap();
    write_line(&mut out, h.col_rows.iter().map(|v| v.len()));
    write_line(&mut out, h.row_cols.iter().map(|v| v.len()));
    for list in &h.col_rows {
        write_padded(&mut out, list, max_col);
    }
    for list in &h.row_cols {
        write_padded(&mut out, list, max_row);
    }
    out
}

fn write_line(out: &mut String, items: impl Iterator<Item = usize>) {
    let parts: Vec<String> = items.map(|x| x.to_string()).collect();
    out.push_str(&parts.join(" "));
    out.push('\n');
}

fn write_padded(out: &mut String, list: &[u32], width: usize) {
    let items = list
        .iter()
        .map(|&x| x as usize + 1)
        .chain(std::iter::repeat_n(0, width - list.len()));
    write_line(out, items);
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    /// Next non-empty line as numbers, with its 1-based line number.
    fn next_numbers(&mut self, what: &str) -> Result<(usize, Vec<usize>)> {
        for (idx, line) in self.inner.by_ref() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let nums = line
                .split_whitespace()
                .enumerate()
                .map(|(pos, tok)| {
                    tok.parse::<usize>().map_err(|_| {
                        Error::parse(
                            idx + 1,
                            format!("token {} ({tok:?}) of {what} is not a non-negative integer", pos + 1),
                        )
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok((idx + 1, nums));
        }
        Err(Error::parse(0, format!("unexpected end of input while reading {what}")))
    }
}

pub fn from_alist(text: &str) -> Result<SparseParity> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (ln, header) = lines.next_numbers("header")?;
    let [n_cols, n_rows] = header[..] else {
        return Err(Error::parse(ln, "header must hold exactly two numbers"));
    };
    let (ln, maxes) = lines.next_numbers("maximum degrees")?;
    let [max_col, max_row] = maxes[..] else {
        return Err(Error::parse(ln, "maximum degree line must hold exactly two numbers"));
    };
    let (ln, col_deg) = lines.next_numbers("column degrees")?;
    if col_deg.len() != n_cols {
        return Err(Error::parse(
            ln,
            format!("expected {n_cols} column degrees, found {}", col_deg.len()),
        ));
    }
    let (ln, row_deg) = lines.next_numbers("row degrees")?;
    if row_deg.len() != n_rows {
        return Err(Error::parse(
            ln,
            format!("expected {n_rows} row degrees, found {}", row_deg.len()),
        ));
    }
    let mut entries = Vec::new();
    for (c, &deg) in col_deg.iter().enumerate() {
        let (ln, list) = lines.next_numbers("column list")?;
        let used = check_list(ln, &list, deg, max_col, n_rows)?;
        entries.extend(used.iter().map(|&r| ((r - 1) as u32, c as u32)));
    }
    let mut from_rows = Vec::new();
    for (r, &deg) in row_deg.iter().enumerate() {
        let (ln, list) = lines.next_numbers("row list")?;
        let used = check_list(ln, &list, deg, max_row, n_cols)?;
        from_rows.extend(used.iter().map(|&c| (r as u32, (c - 1) as u32)));
    }
    let mut a = entries.clone();
    let mut b = from_rows;
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return Err(Error::parse(
            0,
            "column lists and row lists describe different matrices",
        ));
    }
    Ok(SparseParity::from_entries(n_rows, n_cols, entries))
}

fn check_list(line: usize, list: &[usize], degree: usize, max: usize, bound: usize) -> Result<Vec<usize>> {
    if degree > max {
        return Err(Error::parse(
            line,
            format!("degree {degree} exceeds declared maximum {max}"),
        ));
    }
    let used: Vec<usize> = list.iter().copied().filter(|&x| x != 0).collect();
    if used.len() != degree {
        return Err(Error::parse(
            line,
            format!("expected {degree} indices, found {}", used.len()),
        ));
    }
    if let Some(&bad) = used.iter().find(|&&x| x > bound) {
        return Err(Error::parse(line, format!("index {bad} out of range 1..={bound}")));
    }
    Ok(used)
}
