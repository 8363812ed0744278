//! alist text format for sparse parity-check matrices, plus the JSON
//! metadata sidecar.

use crate::error::{Error, Result};
use crate::ldpc::code::{CodeMetadata, LdpcCode};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

/// Writes the standard alist representation: dimensions, max degrees,
/// per-node degrees, then 1-based neighbor lists padded with zeros.
pub fn write_alist<W: Write>(code: &LdpcCode, mut w: W) -> Result<()> {
    let max_col = code.cols.iter().map(|c| c.len()).max().unwrap_or(0);
    let max_row = code.rows.iter().map(|r| r.len()).max().unwrap_or(0);
    writeln!(w, "{} {}", code.n, code.m)?;
    writeln!(w, "{} {}", max_col, max_row)?;
    let join = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>().join(" ");
    writeln!(w, "{}", join(&mut code.cols.iter().map(|c| c.len().to_string())))?;
    writeln!(w, "{}", join(&mut code.rows.iter().map(|r| r.len().to_string())))?;
    for col in &code.cols {
        let mut entries: Vec<String> = col.iter().map(|&c| (c + 1).to_string()).collect();
        entries.resize(max_col, "0".to_string());
        writeln!(w, "{}", entries.join(" "))?;
    }
    for row in &code.rows {
        let mut entries: Vec<String> = row.iter().map(|&v| (v + 1).to_string()).collect();
        entries.resize(max_row, "0".to_string());
        writeln!(w, "{}", entries.join(" "))?;
    }
    Ok(())
}

pub fn read_alist<R: Read>(r: R) -> Result<LdpcCode> {
    let reader = BufReader::new(r);
    let mut tokens: Vec<i64> = Vec::new();
    for line in reader.lines() {
        for tok in line?.split_whitespace() {
            tokens.push(
                tok.parse::<i64>().map_err(|_| Error::MalformedAlist(format!("token {tok:?}")))?,
            );
        }
    }
    let mut it = tokens.into_iter();
    let mut next = |what: &str| {
        it.next().ok_or_else(|| Error::MalformedAlist(format!("truncated before {what}")))
    };
    let n = next("n")? as usize;
    let m = next("m")? as usize;
    if n == 0 || m == 0 {
        return Err(Error::MalformedAlist("zero dimension".into()));
    }
    let _max_col = next("max column degree")?;
    let _max_row = next("max row degree")?;
    let mut col_deg = Vec::with_capacity(n);
    for i in 0..n {
        col_deg.push(next(&format!("column degree {i}"))? as usize);
    }
    let mut row_deg = Vec::with_capacity(m);
    for i in 0..m {
        row_deg.push(next(&format!("row degree {i}"))? as usize);
    }
    let mut rows: Vec<Vec<u32>> = vec![Vec::new(); m];
    // column blocks (padded with zeros up to max_col)
    let max_col = _max_col as usize;
    for (v, &d) in col_deg.iter().enumerate() {
        for j in 0..max_col {
            let e = next("column entry")?;
            if j < d {
                if e < 1 || e as usize > m {
                    return Err(Error::MalformedAlist(format!("check index {e} out of range")));
                }
                rows[e as usize - 1].push(v as u32);
            } else if e != 0 {
                return Err(Error::MalformedAlist("nonzero padding".into()));
            }
        }
    }
    // row blocks are redundant; verify consistency
    let max_row = _max_row as usize;
    for (c, &d) in row_deg.iter().enumerate() {
        let mut listed: Vec<u32> = Vec::with_capacity(d);
        for j in 0..max_row {
            let e = next("row entry")?;
            if j < d {
                if e < 1 || e as usize > n {
                    return Err(Error::MalformedAlist(format!("variable index {e} out of range")));
                }
                listed.push(e as u32 - 1);
            } else if e != 0 {
                return Err(Error::MalformedAlist("nonzero padding".into()));
            }
        }
        listed.sort_unstable();
        let mut have = rows[c].clone();
        have.sort_unstable();
        if listed != have {
            return Err(Error::MalformedAlist(format!("row {c} disagrees with column blocks")));
        }
    }
    for r in rows.iter_mut() {
        r.sort_unstable();
    }
    LdpcCode::from_rows(n, rows, None)
}

/// Writes `<stem>.alist` plus `<stem>.json` metadata when present.
pub fn save_code(code: &LdpcCode, stem: &Path) -> Result<()> {
    let alist_path = stem.with_extension("alist");
    write_alist(code, std::fs::File::create(alist_path)?)?;
    if let Some(meta) = &code.metadata {
        let json_path = stem.with_extension("json");
        serde_json::to_writer_pretty(std::fs::File::create(json_path)?, meta)?;
    }
    Ok(())
}

pub fn load_code(stem: &Path) -> Result<LdpcCode> {
    let alist_path =
        if stem.extension().is_some() { stem.to_path_buf() } else { stem.with_extension("alist") };
    let mut code = read_alist(std::fs::File::open(&alist_path)?)?;
    let json_path = alist_path.with_extension("json");
    if json_path.exists() {
        let meta: CodeMetadata = serde_json::from_reader(std::fs::File::open(json_path)?)?;
        code.metadata = Some(meta);
    }
    Ok(code)
}
