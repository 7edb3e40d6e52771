//! Exact rational Betti numbers of finite unions of products of
//! projective-linear subspaces.
//!
//! The computation runs the closed-cover descent spectral sequence. Every
//! stratum (an intersection of pieces) is a smooth projective product, so its
//! cohomology is pure of weight equal to the degree; differentials past the
//! second page are morphisms between pure pieces of different weights and
//! vanish, so the E2 page already carries the Betti numbers:
//!
//! ```text
//! b_k(union) = Σ_{s + 2|μ| = k}  dim H^s(Δ_μ; Q)
//! ```
//!
//! where `μ` runs over per-block monomial exponents and `Δ_μ` is the
//! simplicial complex of piece subsets whose intersection dominates `μ` (each
//! block factor has dimension at least `μ_b`). `Δ_μ` is covered by the full
//! simplices of its witnesses, and every face's witness set has a maximum
//! (the intersection itself), so `Δ_μ` is homotopy equivalent to the order
//! complex of the poset `Q_μ` of intersections dominating `μ`. Chains of that
//! poset stay tractable where raw piece subsets explode.
//!
//! Cross-checks used throughout the test suite: single pieces and disjoint
//! unions (Kunneth/additivity closed forms), the four-line cycle
//! (b = 1, 1, 4), two concurrent lines (b = 1, 0, 2), and Euler
//! characteristics against the Grothendieck class at L = 1.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::Zero;

use super::pieces::{dominates, intersection_closure, monomials_within, union_dim, LinearPiece};
use super::MotivicError;
use crate::polyring::{ppoly_multiproj, BlockSignature, IntPoly};
use num_bigint::BigInt;

/// Resource limits for the descent computation.
#[derive(Clone, Copy, Debug)]
pub struct BettiBudget {
    /// Cap on distinct intersections per connected component.
    pub closure_cap: usize,
    /// Cap on poset chains enumerated per monomial row.
    pub chain_cap: usize,
    /// Cap on column operations during rank elimination.
    pub ops_cap: u64,
}

impl Default for BettiBudget {
    fn default() -> Self {
        BettiBudget {
            closure_cap: 20_000,
            chain_cap: 3_000_000,
            ops_cap: 2_000_000_000,
        }
    }
}

/// Betti numbers `b_0..b_{k_max}` of the union of the given pieces.
pub fn betti_numbers(
    pieces: &[LinearPiece],
    k_max: usize,
    budget: &BettiBudget,
) -> Result<Vec<u64>, MotivicError> {
    let mut out = vec![0u64; k_max + 1];
    if pieces.is_empty() {
        return Ok(out);
    }
    for component in connected_components(pieces) {
        let comp = component_betti(&component, k_max, budget)?;
        for (k, b) in comp.iter().enumerate() {
            out[k] += b;
        }
    }
    Ok(out)
}

/// Poincare polynomial `Σ b_k T^k` computed to the union's full cohomological
/// range.
pub fn poincare_via_betti(
    pieces: &[LinearPiece],
    budget: &BettiBudget,
) -> Result<IntPoly, MotivicError> {
    let Some(dim) = union_dim(pieces) else {
        return Ok(IntPoly::zero());
    };
    let b = betti_numbers(pieces, 2 * dim, budget)?;
    Ok(IntPoly::from_coeffs(
        b.iter().map(|&v| BigInt::from(v)).collect(),
    ))
}

/// Pseudo-Poincare polynomial `Σ (b_{2j} − b_{2j-1}) T^j`.
pub fn pseudo_poincare_via_betti(
    pieces: &[LinearPiece],
    budget: &BettiBudget,
) -> Result<IntPoly, MotivicError> {
    let p = poincare_via_betti(pieces, budget)?;
    Ok(crate::polyring::pseudo(&p))
}

/// Splits pieces into groups whose unions are pairwise disjoint.
fn connected_components(pieces: &[LinearPiece]) -> Vec<Vec<LinearPiece>> {
    let n = pieces.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for (i, left) in pieces.iter().enumerate() {
        for (j, right) in pieces.iter().enumerate().skip(i + 1) {
            if left.intersect(right).is_some() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: HashMap<usize, Vec<LinearPiece>> = HashMap::new();
    for (i, piece) in pieces.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(piece.clone());
    }
    let mut out: Vec<Vec<LinearPiece>> = groups.into_values().collect();
    out.sort_by_key(|g| g.len());
    out
}

fn component_betti(
    pieces: &[LinearPiece],
    k_max: usize,
    budget: &BettiBudget,
) -> Result<Vec<u64>, MotivicError> {
    let mut out = vec![0u64; k_max + 1];
    if pieces.len() == 1 {
        let p = ppoly_multiproj(&BlockSignature::new(pieces[0].proj_dims()));
        for (k, coeff) in p.coeffs().iter().enumerate() {
            if k > k_max {
                break;
            }
            out[k] = coeff.try_into().expect("product Betti numbers fit u64");
        }
        return Ok(out);
    }

    // intersection poset and its strict-containment relation
    let closure = intersection_closure(pieces, budget.closure_cap)?;
    let dims: Vec<Vec<usize>> = closure.iter().map(|p| p.proj_dims()).collect();
    let total_dims: Vec<usize> = closure.iter().map(|p| p.dim()).collect();
    let n = closure.len();
    // pivot masks give a cheap rejection before the exact containment test
    let masks: Option<Vec<Vec<u128>>> = closure.iter().map(|p| p.pivot_masks()).collect();
    let mask_subset = |inner: usize, outer: usize| -> bool {
        match &masks {
            Some(m) => m[outer].iter().zip(&m[inner]).all(|(mo, mi)| mo & !mi == 0),
            None => true,
        }
    };
    // below[x] = elements strictly contained in x
    let mut below: Vec<Vec<u32>> = vec![Vec::new(); n];
    for x in 0..n {
        for y in 0..n {
            if x != y
                && total_dims[y] < total_dims[x]
                && mask_subset(y, x)
                && closure[y].is_contained_in(&closure[x])
            {
                below[x].push(y as u32);
            }
        }
    }

    // bitsets: which original pieces contain each closure element
    let piece_masks: Option<Vec<Vec<u128>>> = pieces.iter().map(|p| p.pivot_masks()).collect();
    let words = pieces.len().div_ceil(64);
    let mut containers: Vec<Vec<u64>> = vec![vec![0u64; words]; n];
    for (x, row) in containers.iter_mut().enumerate() {
        for (i, piece) in pieces.iter().enumerate() {
            let mask_ok = match (&masks, &piece_masks) {
                (Some(m), Some(pm)) => pm[i].iter().zip(&m[x]).all(|(mo, mi)| mo & !mi == 0),
                _ => true,
            };
            if mask_ok && closure[x].is_contained_in(piece) {
                row[i / 64] |= 1 << (i % 64);
            }
        }
    }

    for mu in monomials_within(pieces, k_max) {
        let s_max = k_max - 2 * mu.iter().sum::<usize>();
        let eligible: Vec<u32> = (0..n as u32)
            .filter(|&x| dominates(&dims[x as usize], &mu))
            .collect();
        if eligible.is_empty() {
            continue;
        }
        let h = row_cohomology(&eligible, &below, &containers, s_max, budget)?;
        let weight = 2 * mu.iter().sum::<usize>();
        for (s, hs) in h.iter().enumerate() {
            let k = s + weight;
            if k <= k_max {
                out[k] += hs;
            }
        }
    }
    Ok(out)
}

/// Cohomology of one monomial row's complex, via whichever model is cheap:
///
/// - a unique minimal eligible intersection makes the order complex a cone;
/// - otherwise the Borsuk nerve on the minimal eligible witnesses (faces are
///   witness sets contained in a common piece), whose intersections of
///   covering simplices are again simplices;
/// - falling back to chains of the eligible poset (the order complex).
fn row_cohomology(
    eligible: &[u32],
    below: &[Vec<u32>],
    containers: &[Vec<u64>],
    s_max: usize,
    budget: &BettiBudget,
) -> Result<Vec<u64>, MotivicError> {
    let eligible_set: std::collections::HashSet<u32> = eligible.iter().copied().collect();
    // minimal eligible elements: nothing eligible strictly below them
    let minimal: Vec<u32> = eligible
        .iter()
        .copied()
        .filter(|&x| !below[x as usize].iter().any(|y| eligible_set.contains(y)))
        .collect();
    let mut h0 = vec![0u64; s_max + 1];
    if minimal.len() == 1 {
        // order complex is a cone over the minimum
        h0[0] = 1;
        return Ok(h0);
    }
    // contractible-nerve shortcut: one piece containing every minimal witness
    let words = containers.first().map(|w| w.len()).unwrap_or(0);
    let mut common = vec![u64::MAX; words];
    for &w in &minimal {
        for (a, b) in common.iter_mut().zip(&containers[w as usize]) {
            *a &= b;
        }
    }
    if common.iter().any(|&w| w != 0) {
        h0[0] = 1;
        return Ok(h0);
    }

    let nerve_bound = subset_bound(minimal.len(), s_max + 2);
    if nerve_bound <= budget.chain_cap as u128 {
        if let Some(cells) = nerve_cells(&minimal, containers, s_max + 2, budget.chain_cap) {
            return homology_from_cells(&cells, s_max, budget);
        }
    }
    let cells = chain_cells(eligible, &eligible_set, below, s_max + 2, budget.chain_cap)
        .or_else(|| nerve_cells(&minimal, containers, s_max + 2, budget.chain_cap))
        .ok_or_else(|| MotivicError::BettiBudgetExceeded {
            detail: format!(
                "both the nerve and the chain model exceed {} cells",
                budget.chain_cap
            ),
        })?;
    homology_from_cells(&cells, s_max, budget)
}

fn subset_bound(v: usize, max_size: usize) -> u128 {
    let mut total: u128 = 0;
    let mut term: u128 = 1;
    for k in 1..=max_size.min(v) {
        term = term.saturating_mul((v - k + 1) as u128) / k as u128;
        total = total.saturating_add(term);
        if total > u64::MAX as u128 {
            return total;
        }
    }
    total
}

/// Faces of the nerve on minimal witnesses: sets with a common containing
/// piece, enumerated ascending with bitset pruning.
fn nerve_cells(
    minimal: &[u32],
    containers: &[Vec<u64>],
    max_size: usize,
    cap: usize,
) -> Option<Vec<Vec<Vec<u32>>>> {
    let mut cells: Vec<Vec<Vec<u32>>> = vec![Vec::new(); max_size + 1];
    let words = containers.first().map(|w| w.len()).unwrap_or(0);
    let mut total = 0usize;
    struct Frame<'a> {
        minimal: &'a [u32],
        containers: &'a [Vec<u64>],
        max_size: usize,
        cap: usize,
    }
    fn extend(
        f: &Frame<'_>,
        start: usize,
        face: &mut Vec<u32>,
        mask: &[u64],
        cells: &mut Vec<Vec<Vec<u32>>>,
        total: &mut usize,
    ) -> bool {
        if face.len() == f.max_size {
            return true;
        }
        for idx in start..f.minimal.len() {
            let w = f.minimal[idx];
            let mut next_mask: Vec<u64> = mask
                .iter()
                .zip(&f.containers[w as usize])
                .map(|(a, b)| a & b)
                .collect();
            if next_mask.iter().all(|&v| v == 0) {
                continue;
            }
            face.push(w);
            *total += 1;
            if *total > f.cap {
                return false;
            }
            cells[face.len()].push(face.clone());
            let ok = extend(f, idx + 1, face, &next_mask, cells, total);
            next_mask.clear();
            face.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    let frame = Frame {
        minimal,
        containers,
        max_size,
        cap,
    };
    let full = vec![u64::MAX; words];
    let mut face = Vec::new();
    if extend(&frame, 0, &mut face, &full, &mut cells, &mut total) {
        Some(cells)
    } else {
        None
    }
}

/// Chains of the eligible poset (order-complex simplices), stored descending.
fn chain_cells(
    eligible: &[u32],
    eligible_set: &std::collections::HashSet<u32>,
    below: &[Vec<u32>],
    max_size: usize,
    cap: usize,
) -> Option<Vec<Vec<Vec<u32>>>> {
    let mut cells: Vec<Vec<Vec<u32>>> = vec![Vec::new(); max_size + 1];
    cells[1] = eligible.iter().map(|&x| vec![x]).collect();
    let mut total = cells[1].len();
    for size in 2..=max_size {
        let mut next = Vec::new();
        for chain in &cells[size - 1] {
            let last = *chain.last().unwrap() as usize;
            for &y in &below[last] {
                if eligible_set.contains(&y) {
                    let mut c = chain.clone();
                    c.push(y);
                    next.push(c);
                }
            }
        }
        total += next.len();
        if total > cap {
            return None;
        }
        cells[size] = next;
    }
    Some(cells)
}

/// Homology dimensions `H_0..H_{s_max}` (equal to the cohomology dimensions
/// over the rationals) of the simplicial complex whose `size`-element cells
/// are listed in `cells[size]`. A cell's facets must appear among the cells
/// one size down (removal of one entry, order preserved).
fn homology_from_cells(
    cells: &[Vec<Vec<u32>>],
    s_max: usize,
    budget: &BettiBudget,
) -> Result<Vec<u64>, MotivicError> {
    let max_size = s_max + 2;
    let mut index: Vec<HashMap<&[u32], usize>> = Vec::with_capacity(cells.len());
    for size_cells in cells {
        let mut m = HashMap::with_capacity(size_cells.len());
        for (i, c) in size_cells.iter().enumerate() {
            m.insert(c.as_slice(), i);
        }
        index.push(m);
    }

    // rank of each boundary map ∂: cells of `size` -> cells of `size − 1`
    let mut ranks = vec![0u64; max_size + 2];
    let mut ops: u64 = 0;
    for size in 2..=max_size {
        let cols: Vec<SparseCol> = cells[size]
            .iter()
            .map(|cell| {
                let mut col: Vec<(usize, BigRational)> = Vec::with_capacity(cell.len());
                let mut face = Vec::with_capacity(cell.len() - 1);
                for skip in 0..cell.len() {
                    face.clear();
                    face.extend(
                        cell.iter()
                            .enumerate()
                            .filter(|&(i, _)| i != skip)
                            .map(|(_, &v)| v),
                    );
                    let row = index[size - 1][face.as_slice()];
                    let sign = if skip % 2 == 0 { 1 } else { -1 };
                    col.push((row, BigRational::from_integer(BigInt::from(sign))));
                }
                col.sort_by_key(|&(r, _)| r);
                col
            })
            .collect();
        ranks[size] = sparse_rank(cols, &mut ops, budget.ops_cap)?;
    }

    let mut h = vec![0u64; s_max + 1];
    for s in 0..=s_max {
        let dim_cs = cells[s + 1].len() as u64;
        let boundary_in = ranks[s + 2];
        let boundary_out = ranks[s + 1];
        h[s] = dim_cs - boundary_in - boundary_out;
    }
    Ok(h)
}

type SparseCol = Vec<(usize, BigRational)>;

/// Rank by left-to-right column elimination with pivot bookkeeping (the
/// persistent-homology "reduction" over exact rationals).
fn sparse_rank(mut cols: Vec<SparseCol>, ops: &mut u64, ops_cap: u64) -> Result<u64, MotivicError> {
    // pivot row -> column index holding that pivot (its lowest row)
    let mut pivot_of_row: HashMap<usize, usize> = HashMap::new();
    let mut rank = 0u64;
    for j in 0..cols.len() {
        while let Some(&(low_row, _)) = cols[j].last() {
            let Some(&k) = pivot_of_row.get(&low_row) else {
                pivot_of_row.insert(low_row, j);
                rank += 1;
                break;
            };
            // cancel the low entry using column k
            let factor = {
                let (_, a) = cols[j].last().unwrap();
                let (_, b) = cols[k].last().unwrap();
                a / b
            };
            let other = cols[k].clone();
            let mine = std::mem::take(&mut cols[j]);
            *ops += (mine.len() + other.len()) as u64;
            if *ops > ops_cap {
                return Err(MotivicError::BettiBudgetExceeded {
                    detail: "rank elimination exceeded the operation budget".into(),
                });
            }
            cols[j] = col_sub(mine, &other, &factor);
        }
    }
    Ok(rank)
}

fn col_sub(a: SparseCol, b: &SparseCol, factor: &BigRational) -> SparseCol {
    let mut out = SparseCol::with_capacity(a.len() + b.len());
    let mut ia = a.into_iter().peekable();
    let mut ib = b.iter().peekable();
    loop {
        match (ia.peek(), ib.peek()) {
            (Some(&(ra, _)), Some(&&(rb, _))) => {
                if ra < rb {
                    out.push(ia.next().unwrap());
                } else if rb < ra {
                    let (r, v) = ib.next().unwrap();
                    out.push((*r, -(factor * v)));
                } else {
                    let (r, va) = ia.next().unwrap();
                    let (_, vb) = ib.next().unwrap();
                    let v = va - factor * vb;
                    if !v.is_zero() {
                        out.push((r, v));
                    }
                }
            }
            (Some(_), None) => out.push(ia.next().unwrap()),
            (None, Some(_)) => {
                let (r, v) = ib.next().unwrap();
                out.push((*r, -(factor * v)));
            }
            (None, None) => break,
        }
    }
    out
}
