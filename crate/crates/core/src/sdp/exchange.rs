//! SDPA sparse format.
//!
//! SDPA solves `min c^T x` s.t. `sum_i x_i F_i - F_0 ⪰ 0`. A [`ConeProblem`]
//! `max b^T y` s.t. `C - sum_i y_i A_i ⪰ 0` maps to it with `x = y`,
//! `c = -b`, `F_0 = -C`, `F_i = -A_i`. Linear rows form one diagonal block
//! (negative size in the block structure line), placed after the PSD blocks.
//! Entry lines are `matrix block row col value`, 1-based, upper triangle.

use std::fmt::Write as _;

use super::{ConeProblem, LpRow, PsdConstraint, SdpError};
use crate::linalg::RMatrix;

pub fn write_sdpa(p: &ConeProblem) -> String {
    let mut out = String::new();
    let m = p.num_vars();
    let nlp = p.lp.len();
    let nblocks = p.psd.len() + usize::from(nlp > 0);
    let _ = writeln!(out, "\"cone problem exported in SDPA sparse format");
    let _ = writeln!(out, "{m}");
    let _ = writeln!(out, "{nblocks}");
    let mut sizes: Vec<String> = p.psd.iter().map(|b| b.c.nrows().to_string()).collect();
    if nlp > 0 {
        sizes.push(format!("-{nlp}"));
    }
    let _ = writeln!(out, "{}", sizes.join(" "));
    let c: Vec<String> = p.b.iter().map(|v| format!("{:e}", -v)).collect();
    let _ = writeln!(out, "{}", c.join(" "));
    let mut entry = |mat: usize, blk: usize, i: usize, j: usize, v: f64| {
        if v != 0.0 {
            let _ = writeln!(out, "{mat} {blk} {} {} {:e}", i + 1, j + 1, -v);
        }
    };
    for (bi, b) in p.psd.iter().enumerate() {
        let n = b.c.nrows();
        for i in 0..n {
            for j in i..n {
                entry(0, bi + 1, i, j, b.c[(i, j)]);
            }
        }
        for (var, a) in &b.a {
            for i in 0..n {
                for j in i..n {
                    entry(var + 1, bi + 1, i, j, a[(i, j)]);
                }
            }
        }
    }
    let lp_blk = p.psd.len() + 1;
    for (r, row) in p.lp.iter().enumerate() {
        entry(0, lp_blk, r, r, row.c);
        for (var, a) in &row.a {
            entry(var + 1, lp_blk, r, r, *a);
        }
    }
    out
}

fn err(line: usize, message: impl Into<String>) -> SdpError {
    SdpError::Exchange {
        line,
        message: message.into(),
    }
}

/// Parses the output of [`write_sdpa`] (or any SDPA sparse file whose only
/// diagonal block is the last one).
pub fn read_sdpa(text: &str) -> Result<ConeProblem, SdpError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('"') && !l.starts_with('*'));
    let clean = |l: &str| -> Vec<String> {
        l.replace(['{', '}', '(', ')', ','], " ")
            .split_whitespace()
            .map(str::to_owned)
            .collect()
    };
    let (ln, l) = lines.next().ok_or_else(|| err(0, "missing variable count"))?;
    let m: usize = clean(l)[0].parse().map_err(|_| err(ln, "bad variable count"))?;
    let (ln, l) = lines.next().ok_or_else(|| err(ln, "missing block count"))?;
    let nblocks: usize = clean(l)[0].parse().map_err(|_| err(ln, "bad block count"))?;
    let (ln, l) = lines.next().ok_or_else(|| err(ln, "missing block structure"))?;
    let sizes: Vec<i64> = clean(l)
        .iter()
        .take(nblocks)
        .map(|s| s.parse::<i64>().map_err(|_| err(ln, "bad block size")))
        .collect::<Result<_, _>>()?;
    if sizes.len() != nblocks {
        return Err(err(ln, "block structure too short"));
    }
    let (ln, l) = lines.next().ok_or_else(|| err(ln, "missing objective"))?;
    let c: Vec<f64> = clean(l)
        .iter()
        .take(m)
        .map(|s| s.parse::<f64>().map_err(|_| err(ln, "bad objective entry")))
        .collect::<Result<_, _>>()?;
    if c.len() != m {
        return Err(err(ln, "objective too short"));
    }

    let mut psd: Vec<(RMatrix, Vec<Option<RMatrix>>)> = Vec::new();
    let mut lp_rows = 0usize;
    for (k, &s) in sizes.iter().enumerate() {
        if s >= 0 {
            let n = s as usize;
            psd.push((RMatrix::zeros(n, n), vec![None; m]));
        } else {
            if k != nblocks - 1 {
                return Err(err(ln, "the diagonal block must be last"));
            }
            lp_rows = (-s) as usize;
        }
    }
    let mut lp_c = vec![0.0; lp_rows];
    let mut lp_a: Vec<Vec<(usize, f64)>> = vec![Vec::new(); lp_rows];

    for (ln, l) in lines {
        let tok = clean(l);
        if tok.len() < 5 {
            return Err(err(ln, "entry needs five fields"));
        }
        let parse_idx = |s: &str| s.parse::<usize>().map_err(|_| err(ln, "bad index"));
        let mat = parse_idx(&tok[0])?;
        let blk = parse_idx(&tok[1])?;
        let i = parse_idx(&tok[2])?;
        let j = parse_idx(&tok[3])?;
        let v: f64 = tok[4].parse().map_err(|_| err(ln, "bad value"))?;
        if mat > m || blk == 0 || blk > nblocks || i == 0 || j == 0 {
            return Err(err(ln, "index out of range"));
        }
        let (i, j, b) = (i - 1, j - 1, blk - 1);
        if b < psd.len() {
            let (cm, am) = &mut psd[b];
            let n = cm.nrows();
            if i >= n || j >= n {
                return Err(err(ln, "entry outside block"));
            }
            let target = if mat == 0 {
                cm
            } else {
                am[mat - 1].get_or_insert_with(|| RMatrix::zeros(n, n))
            };
            target[(i, j)] = -v;
            target[(j, i)] = -v;
        } else {
            if i != j || i >= lp_rows {
                return Err(err(ln, "diagonal block entry off the diagonal"));
            }
            if mat == 0 {
                lp_c[i] = -v;
            } else {
                lp_a[i].push((mat - 1, -v));
            }
        }
    }
    Ok(ConeProblem {
        b: c.iter().map(|v| -v).collect(),
        psd: psd
            .into_iter()
            .map(|(cm, am)| PsdConstraint {
                c: cm,
                a: am.into_iter().enumerate().filter_map(|(i, a)| a.map(|a| (i, a))).collect(),
            })
            .collect(),
        lp: lp_c
            .into_iter()
            .zip(lp_a)
            .map(|(c, mut a)| {
                a.sort_by_key(|(i, _)| *i);
                LpRow { c, a }
            })
            .collect(),
    })
}
