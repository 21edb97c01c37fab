//! alist serialization of compound codes.
//!
//! Layout, one item per line:
//!
//! ```text
//! cols rows
//! max_col_degree max_row_degree
//! column degrees
//! row degrees
//! <one line per column: 1-indexed rows>
//! <one line per row: 1-indexed columns>
//! ```
//!
//! Neighbor lists carry no zero padding, so an empty column or row is an
//! empty line. A code is stored as `<prefix>.G.alist`, `<prefix>.H.alist`
//! and a `<prefix>.meta` sidecar of `key=value` lines.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::gf2::SparseGF2Matrix;

use super::{assemble_compound, CompoundCode, EnsembleSpec};

fn join(items: impl Iterator<Item = usize>) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn to_alist(mat: &SparseGF2Matrix) -> String {
    let rows = mat.row_supports();
    let col_deg: Vec<usize> = mat.columns().iter().map(Vec::len).collect();
    let row_deg: Vec<usize> = rows.iter().map(Vec::len).collect();
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", mat.cols(), mat.rows());
    let _ = writeln!(
        out,
        "{} {}",
        col_deg.iter().max().unwrap_or(&0),
        row_deg.iter().max().unwrap_or(&0)
    );
    let _ = writeln!(out, "{}", join(col_deg.into_iter()));
    let _ = writeln!(out, "{}", join(row_deg.into_iter()));
    for col in mat.columns() {
        let _ = writeln!(out, "{}", join(col.iter().map(|r| r + 1)));
    }
    for row in &rows {
        let _ = writeln!(out, "{}", join(row.iter().map(|c| c + 1)));
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_numbers(&mut self, what: &str) -> Result<(usize, Vec<usize>)> {
        let (idx, line) = self.inner.next().ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("unexpected end of file reading {what}"),
        })?;
        let lineno = idx + 1;
        let nums = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("invalid integer {tok:?} in {what}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((lineno, nums))
    }

    fn expect_count(&mut self, what: &str, count: usize) -> Result<(usize, Vec<usize>)> {
        let (lineno, nums) = self.next_numbers(what)?;
        if nums.len() != count {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("{what}: expected {count} values, found {}", nums.len()),
            });
        }
        Ok((lineno, nums))
    }
}

/// Parses an alist matrix, checking that column and row lists agree.
pub fn from_alist(text: &str) -> Result<SparseGF2Matrix> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (_, dims) = lines.expect_count("dimensions", 2)?;
    let (cols, rows) = (dims[0], dims[1]);
    let (max_line, maxes) = lines.expect_count("maximum degrees", 2)?;
    let (_, col_deg) = lines.expect_count("column degrees", cols)?;
    let (_, row_deg) = lines.expect_count("row degrees", rows)?;
    if col_deg.iter().max().copied().unwrap_or(0) != maxes[0] || row_deg.iter().max().copied().unwrap_or(0) != maxes[1]
    {
        return Err(Error::Parse {
            line: max_line,
            msg: "maximum degrees disagree with degree lists".into(),
        });
    }

    let mut columns = Vec::with_capacity(cols);
    let mut column_lines = Vec::with_capacity(cols);
    for (c, &deg) in col_deg.iter().enumerate() {
        let (lineno, nums) = lines.expect_count(&format!("column {}", c + 1), deg)?;
        columns.push(to_zero_based(&nums, rows, lineno)?);
        column_lines.push(lineno);
    }
    let mut row_lists = Vec::with_capacity(rows);
    for (r, &deg) in row_deg.iter().enumerate() {
        let (lineno, nums) = lines.expect_count(&format!("row {}", r + 1), deg)?;
        row_lists.push((lineno, to_zero_based(&nums, cols, lineno)?));
    }
    if let Some((idx, line)) = lines.inner.find(|(_, l)| !l.trim().is_empty()) {
        return Err(Error::Parse {
            line: idx + 1,
            msg: format!("trailing content {line:?}"),
        });
    }

    let mat = SparseGF2Matrix::from_columns(rows, columns.clone())?;
    for (c, col) in columns.iter().enumerate() {
        if mat.column(c) != col.as_slice() {
            return Err(Error::Parse {
                line: column_lines[c],
                msg: format!("column {} lists a row twice", c + 1),
            });
        }
    }
    let transposed = mat.row_supports();
    for (r, (lineno, list)) in row_lists.into_iter().enumerate() {
        let mut sorted = list;
        sorted.sort_unstable();
        if sorted != transposed[r] {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("row {} disagrees with the column lists", r + 1),
            });
        }
    }
    Ok(mat)
}

fn to_zero_based(nums: &[usize], bound: usize, line: usize) -> Result<Vec<usize>> {
    nums.iter()
        .map(|&x| {
            if x == 0 || x > bound {
                Err(Error::Parse {
                    line,
                    msg: format!("index {x} outside 1..={bound}"),
                })
            } else {
                Ok(x - 1)
            }
        })
        .collect()
}

/// Paths of the three files making up a stored code.
pub fn code_paths(prefix: &Path) -> (PathBuf, PathBuf, PathBuf) {
    let with = |suffix: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(suffix);
        PathBuf::from(s)
    };
    (with(".G.alist"), with(".H.alist"), with(".meta"))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Sidecar text. Fields unknown for hand-built codes are left empty.
pub fn to_meta(code: &CompoundCode) -> String {
    let spec = code.spec();
    format!(
        "n={}\nm={}\nk={}\nd={}\nlambda={}\ngamma={}\nseed={}\n",
        code.n(),
        code.m(),
        code.k(),
        opt(spec.map(|s| s.d)),
        opt(spec.map(|s| s.lambda)),
        opt(spec.map(|s| s.gamma)),
        opt(code.seed()),
    )
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct Meta {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub d: Option<usize>,
    pub lambda: Option<usize>,
    pub gamma: Option<usize>,
    pub seed: Option<u64>,
}

pub fn parse_meta(text: &str) -> Result<Meta> {
    let mut meta = Meta::default();
    let mut seen = [false; 3];
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: idx + 1, msg };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, found {line:?}")))?;
        let value = value.trim();
        let parse = |v: &str| -> Result<Option<u64>> {
            if v.is_empty() {
                return Ok(None);
            }
            v.parse::<u64>()
                .map(Some)
                .map_err(|_| err(format!("invalid value {v:?} for {key}")))
        };
        let required = |v: &str| -> Result<usize> {
            parse(v)?
                .map(|x| x as usize)
                .ok_or_else(|| err(format!("{key} must be set")))
        };
        match key.trim() {
            "n" => {
                meta.n = required(value)?;
                seen[0] = true;
            }
            "m" => {
                meta.m = required(value)?;
                seen[1] = true;
            }
            "k" => {
                meta.k = required(value)?;
                seen[2] = true;
            }
            "d" => meta.d = parse(value)?.map(|x| x as usize),
            "lambda" => meta.lambda = parse(value)?.map(|x| x as usize),
            "gamma" => meta.gamma = parse(value)?.map(|x| x as usize),
            "seed" => meta.seed = parse(value)?,
            other => return Err(err(format!("unknown key {other:?}"))),
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: "metadata must define n, m and k".into(),
        });
    }
    Ok(meta)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse { line, msg } => Error::Parse {
            line,
            msg: format!("{}: {msg}", path.display()),
        },
        other => other,
    }
}

pub fn write_code(code: &CompoundCode, prefix: &Path) -> Result<()> {
    let (g_path, h_path, meta_path) = code_paths(prefix);
    write(&g_path, &to_alist(code.generator()))?;
    write(&h_path, &to_alist(code.parity_check()))?;
    write(&meta_path, &to_meta(code))
}

pub fn read_code(prefix: &Path) -> Result<CompoundCode> {
    let (g_path, h_path, meta_path) = code_paths(prefix);
    let g = from_alist(&read(&g_path)?).map_err(|e| with_path(&g_path, e))?;
    let h = from_alist(&read(&h_path)?).map_err(|e| with_path(&h_path, e))?;
    let meta = parse_meta(&read(&meta_path)?).map_err(|e| with_path(&meta_path, e))?;
    if (g.cols(), g.rows(), h.rows()) != (meta.n, meta.m, meta.k) {
        return Err(Error::Parse {
            line: 1,
            msg: format!("{}: dimensions disagree with the alist files", meta_path.display()),
        });
    }
    let spec = match (meta.d, meta.lambda, meta.gamma) {
        (Some(d), Some(lambda), Some(gamma)) => Some(EnsembleSpec {
            n: meta.n,
            m: meta.m,
            k: meta.k,
            d,
            lambda,
            gamma,
        }),
        _ => None,
    };
    Ok(assemble_compound(g, h)?.with_provenance(spec, meta.seed))
}

/// Writes `code` under `prefix` and reads it back.
pub fn roundtrip_alist(code: &CompoundCode, prefix: &Path) -> Result<CompoundCode> {
    write_code(code, prefix)?;
    read_code(prefix)
}
