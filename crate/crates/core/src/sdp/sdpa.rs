//! SDPA sparse (`.dat-s`) files.
//!
//! SDPA solves `min Σ c_i y_i` s.t. `Σ y_i F_i - F_0 ⪰ 0`, so the constant matrix is
//! written negated and a maximization objective is written as `-c`. Equality rows go
//! to a trailing diagonal block holding `a·y - rhs ≥ 0` and `-a·y + rhs ≥ 0` in
//! consecutive positions. Two comment lines carry the title and the objective offset
//! and sense, so a file written here parses back to the same program.

use std::fmt::Write as _;
use std::path::Path;

use super::model::{BlockSdp, EqRow, LmiBlock};
use crate::error::{Error, Result};
use crate::poly::Sense;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// SDPA text of the program.
pub fn to_sdpa_string(sdp: &BlockSdp, title: &str) -> String {
    let mut out = String::new();
    let sense = match sdp.sense {
        Sense::Min => "min",
        Sense::Max => "max",
    };
    let sign = if sdp.sense == Sense::Max { -1.0 } else { 1.0 };
    let _ = writeln!(out, "\"{}", title.replace('\n', " "));
    let _ = writeln!(out, "* offset {} sense {}", num(sdp.offset), sense);
    let _ = writeln!(out, "{}", sdp.m);
    let neq = sdp.eqs.len();
    let nblock = sdp.blocks.len() + usize::from(neq > 0);
    let _ = writeln!(out, "{nblock}");
    let mut sizes: Vec<String> = sdp.blocks.iter().map(|b| b.size.to_string()).collect();
    if neq > 0 {
        sizes.push(format!("-{}", 2 * neq));
    }
    let _ = writeln!(out, "{}", sizes.join(" "));
    let c: Vec<String> = sdp.c.iter().map(|&v| num(sign * v)).collect();
    let _ = writeln!(out, "{}", c.join(" "));
    for (bi, blk) in sdp.blocks.iter().enumerate() {
        for e in &blk.entries {
            let v = if e.mat == 0 { -e.value } else { e.value };
            let _ = writeln!(out, "{} {} {} {} {}", e.mat, bi + 1, e.row + 1, e.col + 1, num(v));
        }
    }
    if neq > 0 {
        let bi = sdp.blocks.len() + 1;
        // Constant matrix first, then variables in order, as in the PSD blocks.
        for (r, row) in sdp.eqs.iter().enumerate() {
            if row.rhs != 0.0 {
                let (p, q) = (2 * r + 1, 2 * r + 2);
                let _ = writeln!(out, "0 {bi} {p} {p} {}", num(row.rhs));
                let _ = writeln!(out, "0 {bi} {q} {q} {}", num(-row.rhs));
            }
        }
        let mut lines: Vec<(usize, usize, f64)> = Vec::new();
        for (r, row) in sdp.eqs.iter().enumerate() {
            for &(j, a) in &row.coeffs {
                lines.push((j + 1, 2 * r + 1, a));
                lines.push((j + 1, 2 * r + 2, -a));
            }
        }
        lines.sort_by_key(|&(mat, pos, _)| (mat, pos));
        for (mat, pos, v) in lines {
            let _ = writeln!(out, "{mat} {bi} {pos} {pos} {}", num(v));
        }
    }
    out
}

pub fn export_sdpa(sdp: &BlockSdp, title: &str, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_sdpa_string(sdp, title))?;
    Ok(())
}

fn parse_f(tok: &str, line: usize) -> Result<f64> {
    tok.trim_matches(|c| c == ',' || c == '{' || c == '}' || c == '(' || c == ')')
        .parse::<f64>()
        .map_err(|_| Error::Parse {
            line,
            msg: format!("bad number {tok:?}"),
        })
}

fn parse_u(tok: &str, line: usize) -> Result<usize> {
    tok.trim_matches(|c| c == ',' || c == '{' || c == '}' || c == '(' || c == ')')
        .parse::<usize>()
        .map_err(|_| Error::Parse {
            line,
            msg: format!("bad integer {tok:?}"),
        })
}

/// Parses SDPA sparse text. Files without the offset/sense comment are read as
/// minimization with zero offset. A trailing negative (diagonal) block whose entries
/// pair up as `±(a·y - rhs)` is read back as equality rows; other diagonal blocks
/// become ordinary blocks of their absolute size.
pub fn parse_sdpa(text: &str) -> Result<BlockSdp> {
    let mut sense = Sense::Min;
    let mut offset = 0.0;
    let mut data: Vec<(usize, &str)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('*') {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if let [ "offset", v, "sense", s ] = toks.as_slice() {
                offset = parse_f(v, k + 1)?;
                sense = if *s == "max" { Sense::Max } else { Sense::Min };
            }
            continue;
        }
        if line.starts_with('"') {
            continue;
        }
        data.push((k + 1, line));
    }
    let mut it = data.into_iter();
    let mut next = |what: &str| {
        it.next().ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("missing {what}"),
        })
    };
    let (ln, l) = next("m")?;
    let m = parse_u(l.split_whitespace().next().unwrap_or(""), ln)?;
    let (ln, l) = next("nBLOCK")?;
    let nblock = parse_u(l.split_whitespace().next().unwrap_or(""), ln)?;
    let (ln, l) = next("block sizes")?;
    let sizes: Vec<i64> = l
        .split(|c: char| c.is_whitespace() || c == ',' || c == '{' || c == '}' || c == '(' || c == ')')
        .filter(|t| !t.is_empty())
        .take(nblock)
        .map(|t| {
            t.parse::<i64>().map_err(|_| Error::Parse {
                line: ln,
                msg: format!("bad block size {t:?}"),
            })
        })
        .collect::<Result<_>>()?;
    if sizes.len() != nblock {
        return Err(Error::Parse {
            line: ln,
            msg: "too few block sizes".into(),
        });
    }
    let (ln, l) = next("objective")?;
    let craw: Vec<f64> = l
        .split(|c: char| c.is_whitespace() || c == ',' || c == '{' || c == '}' || c == '(' || c == ')')
        .filter(|t| !t.is_empty())
        .take(m)
        .map(|t| parse_f(t, ln))
        .collect::<Result<_>>()?;
    if craw.len() != m {
        return Err(Error::Parse {
            line: ln,
            msg: "objective too short".into(),
        });
    }
    let sign = if sense == Sense::Max { -1.0 } else { 1.0 };
    let eq_block = match sizes.last() {
        Some(&s) if s < 0 && s % 2 == 0 => Some(sizes.len() - 1),
        _ => None,
    };
    let mut blocks: Vec<LmiBlock> = sizes.iter().map(|&s| LmiBlock::new(s.unsigned_abs() as usize)).collect();
    for (ln, l) in it {
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() < 5 {
            return Err(Error::Parse {
                line: ln,
                msg: "entry needs 5 fields".into(),
            });
        }
        let mat = parse_u(t[0], ln)?;
        let b = parse_u(t[1], ln)?;
        let i = parse_u(t[2], ln)?;
        let j = parse_u(t[3], ln)?;
        let v = parse_f(t[4], ln)?;
        if mat > m || b == 0 || b > nblock || i == 0 || j == 0 || i.max(j) > blocks[b - 1].size {
            return Err(Error::Parse {
                line: ln,
                msg: "entry index out of range".into(),
            });
        }
        let v = if mat == 0 { -v } else { v };
        blocks[b - 1].add(mat, i - 1, j - 1, v);
    }
    let mut eqs = Vec::new();
    if let Some(eb) = eq_block {
        let blk = blocks.pop().expect("equality block");
        let npair = blk.size / 2;
        let mut rows = vec![EqRow::default(); npair];
        let mut paired = true;
        let mut upper: std::collections::BTreeMap<(usize, usize), f64> = Default::default();
        for e in &blk.entries {
            if e.row != e.col {
                paired = false;
            }
            upper.insert((e.mat, e.row), e.value);
        }
        for (&(mat, pos), &v) in &upper {
            let r = pos / 2;
            let first = pos % 2 == 0;
            let twin = upper.get(&(mat, if first { pos + 1 } else { pos - 1 }));
            if twin != Some(&-v) {
                paired = false;
            }
            if first {
                if mat == 0 {
                    // Constant entry -rhs was negated on read.
                    rows[r].rhs = -v;
                } else {
                    rows[r].coeffs.push((mat - 1, v));
                }
            }
        }
        if paired {
            eqs = rows;
        } else {
            blocks.insert(eb, blk);
        }
    }
    for b in blocks.iter_mut() {
        b.normalize();
    }
    let mut sdp = BlockSdp::new(m, sense);
    sdp.c = craw.into_iter().map(|v| sign * v).collect();
    sdp.offset = offset;
    sdp.blocks = blocks;
    sdp.eqs = eqs;
    sdp.validate()?;
    Ok(sdp)
}

pub fn read_sdpa(path: impl AsRef<Path>) -> Result<BlockSdp> {
    parse_sdpa(&std::fs::read_to_string(path)?)
}
