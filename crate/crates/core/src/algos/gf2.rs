//! Recovering Simon's hidden string from measured `x*` samples over GF(2).

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "a")]
pub enum Recovery {
    Found(u64),
    /// Rank below `n - 1`: more samples are needed.
    Insufficient,
    /// Rank `n`: no nonzero string is orthogonal to every sample.
    OracleViolation,
}

/// Row-reduces `rows` in place and returns the pivot bit of each kept row.
fn reduce(rows: &mut Vec<u64>, n: usize) -> Vec<u32> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in (0..n as u32).rev() {
        let Some(p) = (r..rows.len()).find(|&i| (rows[i] >> col) & 1 == 1) else {
            continue;
        };
        rows.swap(r, p);
        let pr = rows[r];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && (*row >> col) & 1 == 1 {
                *row ^= pr;
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn gf2_rank(samples: &[u64], n: usize) -> usize {
    let mut rows = samples.to_vec();
    reduce(&mut rows, n).len()
}

/// Solves `a · x* = 0 (mod 2)` for every sample.
pub fn simon_recover(samples: &[u64], n: usize) -> Result<Recovery> {
    if n == 0 || n > 63 {
        return Err(domain(format!("string length n = {n} out of range")));
    }
    if let Some(x) = samples.iter().find(|&&x| x >> n != 0) {
        return Err(domain(format!("sample {x:#b} has more than {n} bits")));
    }
    let mut rows = samples.to_vec();
    let pivots = reduce(&mut rows, n);
    match pivots.len() {
        k if k == n => Ok(Recovery::OracleViolation),
        k if k + 1 < n => Ok(Recovery::Insufficient),
        _ => {
            let free = (0..n as u32).find(|c| !pivots.contains(c)).expect("one free column");
            let mut a = 1u64 << free;
            for (row, &p) in rows.iter().zip(&pivots) {
                if (row >> free) & 1 == 1 {
                    a |= 1u64 << p;
                }
            }
            Ok(Recovery::Found(a))
        }
    }
}
