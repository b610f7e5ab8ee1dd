//! Smith normal form over ℤ and abelianization of presentations.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::presentation::Presentation;

/// `Γ^ab ≅ ℤ^rank ⊕ ⊕ ℤ/d_i`, with `d_1 | d_2 | …` and every `d_i ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    pub rank: usize,
    pub torsion: Vec<i64>,
}

impl SnfResult {
    /// Order of the torsion subgroup (1 when there is no torsion).
    pub fn torsion_order(&self) -> Result<i64> {
        self.torsion.iter().try_fold(1i64, |acc, &d| acc.checked_mul(d).ok_or(Error::Overflow))
    }
}

/// Nonzero invariant factors of an integer matrix, as a divisibility chain of
/// positive integers (units included).
///
/// Row and column reduction with the smallest nonzero entry as pivot, all in
/// checked arithmetic.
pub fn invariant_factors(matrix: &[Vec<i64>]) -> Result<Vec<i64>> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<i64>> = matrix.to_vec();
    let mut diag = Vec::new();

    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| a[i][j].unsigned_abs());
            let Some((pi, pj)) = pivot else {
                return Ok(diag);
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }

            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let q = a[i][t] / p;
                if q != 0 {
                    let (top, rest) = a.split_at_mut(i);
                    add_row(&mut rest[0][t..], &top[t][t..], q.checked_neg().ok_or(Error::Overflow)?)?;
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..cols {
                let q = a[t][j] / p;
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        let sub = q.checked_mul(row[t]).ok_or(Error::Overflow)?;
                        row[j] = row[j].checked_sub(sub).ok_or(Error::Overflow)?;
                    }
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // pivot must divide the rest of the block; otherwise fold an offending row in
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % p != 0));
            match bad {
                Some(i) => {
                    let (top, rest) = a.split_at_mut(i);
                    add_row(&mut top[t][t..], &rest[0][t..], 1)?;
                }
                None => {
                    diag.push(p.checked_abs().ok_or(Error::Overflow)?);
                    break;
                }
            }
        }
    }
    Ok(diag)
}

/// `target += q · src`, entrywise.
fn add_row(target: &mut [i64], src: &[i64], q: i64) -> Result<()> {
    for (x, &y) in target.iter_mut().zip(src) {
        let term = q.checked_mul(y).ok_or(Error::Overflow)?;
        *x = x.checked_add(term).ok_or(Error::Overflow)?;
    }
    Ok(())
}

/// Abelianization of a presentation from the Smith form of its exponent-sum matrix.
pub fn abelianize(p: &Presentation) -> Result<SnfResult> {
    let factors = invariant_factors(&p.exponent_matrix())?;
    Ok(SnfResult { rank: p.generators() - factors.len(), torsion: factors.into_iter().filter(|&d| d != 1).collect() })
}
