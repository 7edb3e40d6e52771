//! Exact rational row reduction with primitive integer rows.
//!
//! A system is kept in reduced row-echelon form over the rationals, each row
//! scaled to a primitive integer vector with positive pivot (entries cleared
//! at every other pivot). That scaling is a unique normal form for the row
//! space, so systems double as dictionary keys, and all arithmetic stays in
//! `BigInt` with one gcd per row operation instead of one per entry.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

pub type Row = Vec<BigInt>;

fn pivot_col(row: &[BigInt]) -> Option<usize> {
    row.iter().position(|v| !v.is_zero())
}

/// Divides out the content and makes the pivot positive.
fn normalize_row(row: &mut Row) {
    let mut g = BigInt::zero();
    for v in row.iter() {
        if !v.is_zero() {
            g = g.gcd(v);
        }
    }
    if g.is_zero() {
        return;
    }
    let pivot_negative = row
        .iter()
        .find(|v| !v.is_zero())
        .map(|v| v.is_negative())
        .unwrap_or(false);
    if pivot_negative {
        g = -g;
    }
    for v in row.iter_mut() {
        *v /= &g;
    }
}

/// Reduces `row` against an rref basis (over the rationals, carried with
/// integer cross-multiplication); returns the primitive remainder.
pub fn reduce_against(basis: &[Row], row: &Row) -> Row {
    let mut out = row.clone();
    for b in basis {
        let Some(p) = pivot_col(b) else { continue };
        if !out[p].is_zero() {
            let scale_out = b[p].clone();
            let scale_b = out[p].clone();
            for (o, bv) in out.iter_mut().zip(b.iter()) {
                *o = &*o * &scale_out - bv * &scale_b;
            }
            normalize_row(&mut out);
        }
    }
    out
}

/// True when `row` lies in the row space spanned by an rref basis.
pub fn row_space_contains(basis: &[Row], row: &Row) -> bool {
    reduce_against(basis, row).iter().all(|v| v.is_zero())
}

/// Merges rows into an rref basis incrementally, keeping the reduced normal
/// form; aborts with `None` as soon as the rank exceeds `max_rank`.
pub fn merge_rref_bounded(a: &[Row], b: &[Row], max_rank: usize) -> Option<Vec<Row>> {
    let mut rows: Vec<Row> = a.to_vec();
    if rows.len() > max_rank {
        return None;
    }
    for row in b {
        let mut r = reduce_against(&rows, row);
        normalize_row(&mut r);
        let Some(p) = pivot_col(&r) else { continue };
        if rows.len() + 1 > max_rank {
            return None;
        }
        for existing in rows.iter_mut() {
            if !existing[p].is_zero() {
                let scale_existing = r[p].clone();
                let scale_r = existing[p].clone();
                for (e, rv) in existing.iter_mut().zip(r.iter()) {
                    *e = &*e * &scale_existing - rv * &scale_r;
                }
                normalize_row(existing);
            }
        }
        let pos = rows
            .iter()
            .position(|x| pivot_col(x).is_none_or(|q| q > p))
            .unwrap_or(rows.len());
        rows.insert(pos, r);
    }
    Some(rows)
}

/// Reduced row-echelon normal form; zero rows dropped.
pub fn rref(rows: Vec<Row>) -> Vec<Row> {
    merge_rref_bounded(&[], &rows, usize::MAX).expect("unbounded merge cannot abort")
}

/// Bitmask of pivot columns, when the width fits; rowspace containment
/// `span(a) ⊆ span(b)` forces `pivot_mask(a) ⊆ pivot_mask(b)`.
pub fn pivot_mask(rows: &[Row]) -> Option<u128> {
    let mut mask: u128 = 0;
    for row in rows {
        let p = pivot_col(row)?;
        if p >= 128 {
            return None;
        }
        mask |= 1 << p;
    }
    Some(mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(vals: &[i64]) -> Row {
        vals.iter().map(|&v| BigInt::from(v)).collect()
    }

    #[test]
    fn rref_normalizes() {
        let m = rref(vec![row(&[2, 4, 6]), row(&[1, 2, 3]), row(&[0, 1, 1])]);
        assert_eq!(m, vec![row(&[1, 0, 1]), row(&[0, 1, 1])]);
    }

    #[test]
    fn rref_is_a_normal_form_for_the_row_space() {
        let a = rref(vec![row(&[1, 1, 0]), row(&[0, 2, 2])]);
        let b = rref(vec![row(&[1, 3, 2]), row(&[2, 4, 2])]);
        assert_eq!(a, b);
        let c = rref(vec![row(&[-3, -3, 0]), row(&[0, 1, 1])]);
        assert_eq!(a, c);
    }

    #[test]
    fn fractional_rowspaces_stay_exact() {
        // span{(2,1,0), (0,0,3)} has rref (1, 1/2, 0), (0,0,1) over Q;
        // the primitive form keeps (2,1,0)
        let m = rref(vec![row(&[2, 1, 0]), row(&[0, 0, 3])]);
        assert_eq!(m, vec![row(&[2, 1, 0]), row(&[0, 0, 1])]);
        let same = rref(vec![row(&[4, 2, 3]), row(&[0, 0, 7])]);
        assert_eq!(m, same);
    }

    #[test]
    fn containment() {
        let basis = rref(vec![row(&[1, 0, -1]), row(&[0, 1, 1])]);
        assert!(row_space_contains(&basis, &row(&[2, 3, 1])));
        assert!(!row_space_contains(&basis, &row(&[0, 0, 1])));
    }

    #[test]
    fn stacking_two_point_systems_overdetermines() {
        let p1 = rref(vec![row(&[1, -1])]);
        let p2 = rref(vec![row(&[1, -2])]);
        assert!(merge_rref_bounded(&p1, &p2, 1).is_none());
        assert_eq!(merge_rref_bounded(&p1, &p2, 2).unwrap().len(), 2);
    }

    #[test]
    fn masks() {
        let basis = rref(vec![row(&[1, 2, 0]), row(&[0, 0, 5])]);
        assert_eq!(pivot_mask(&basis), Some(0b101));
        assert_eq!(pivot_mask(&[]), Some(0));
    }
}
