//! Products of projective-linear subspaces and the DNF extraction that turns
//! a quantifier-free formula with single-block linear atoms into a finite
//! union of such pieces.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::formula::{FormulaNode, MultiHomPoly, ProperFormula};
use crate::polyring::{BlockSignature, IntPoly};

use super::linalg::{merge_rref_bounded, pivot_mask, row_space_contains, rref, Row};
use super::MotivicError;

/// One product of projective-linear subspaces: per block a constraint system
/// in reduced row-echelon form. Nonempty by construction (every block's rank
/// stays at most its dimension).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearPiece {
    blocks: BlockSignature,
    systems: Vec<Vec<Row>>,
}

impl LinearPiece {
    /// The unconstrained piece, the whole product of projective spaces.
    pub fn ambient(blocks: BlockSignature) -> Self {
        let systems = vec![Vec::new(); blocks.len()];
        LinearPiece { blocks, systems }
    }

    pub fn blocks(&self) -> &BlockSignature {
        &self.blocks
    }

    pub fn systems(&self) -> &[Vec<Row>] {
        &self.systems
    }

    pub fn rank(&self, block: usize) -> usize {
        self.systems[block].len()
    }

    /// Projective dimension of the block's factor, `n_b − rank_b`.
    pub fn proj_dim(&self, block: usize) -> usize {
        self.blocks.dim(block) - self.rank(block)
    }

    pub fn proj_dims(&self) -> Vec<usize> {
        (0..self.blocks.len()).map(|b| self.proj_dim(b)).collect()
    }

    /// Dimension of the piece, the sum of its factor dimensions.
    pub fn dim(&self) -> usize {
        (0..self.blocks.len()).map(|b| self.proj_dim(b)).sum()
    }

    /// Adds one linear constraint to a block; `None` when the block becomes
    /// overdetermined (empty projective factor).
    pub fn with_row(&self, block: usize, row: Row) -> Option<LinearPiece> {
        let new_system = merge_rref_bounded(&self.systems[block], &[row], self.blocks.dim(block))?;
        let mut out = self.clone();
        out.systems[block] = new_system;
        Some(out)
    }

    /// Blockwise stacked systems, re-reduced; `None` when any block
    /// overdetermines.
    pub fn intersect(&self, other: &LinearPiece) -> Option<LinearPiece> {
        debug_assert_eq!(self.blocks, other.blocks);
        let mut systems = Vec::with_capacity(self.systems.len());
        for b in 0..self.systems.len() {
            let merged =
                merge_rref_bounded(&self.systems[b], &other.systems[b], self.blocks.dim(b))?;
            systems.push(merged);
        }
        Some(LinearPiece {
            blocks: self.blocks.clone(),
            systems,
        })
    }

    /// Set containment: `self ⊆ other` iff every constraint of `other` is
    /// implied by the constraints of `self`, blockwise.
    pub fn is_contained_in(&self, other: &LinearPiece) -> bool {
        for b in 0..self.systems.len() {
            if other.systems[b].len() > self.systems[b].len() {
                return false;
            }
            for row in &other.systems[b] {
                if !row_space_contains(&self.systems[b], row) {
                    return false;
                }
            }
        }
        true
    }

    /// Per-block pivot-column masks, when every block fits 128 coordinates.
    /// If `self ⊆ other` then `other`'s mask is a subset of `self`'s,
    /// blockwise, so masks give a cheap rejection test.
    pub fn pivot_masks(&self) -> Option<Vec<u128>> {
        self.systems.iter().map(|rows| pivot_mask(rows)).collect()
    }

    /// Restriction to a subset of blocks (the image under the coordinate
    /// projection, exact for product pieces).
    pub fn project(&self, keep: &[usize]) -> LinearPiece {
        let dims: Vec<usize> = keep.iter().map(|&b| self.blocks.dim(b)).collect();
        let systems: Vec<Vec<Row>> = keep.iter().map(|&b| self.systems[b].clone()).collect();
        LinearPiece {
            blocks: BlockSignature::new(dims),
            systems,
        }
    }

    /// Grothendieck class `∏_b (1 + L + … + L^{proj_dim_b})`.
    pub fn class_poly(&self) -> IntPoly {
        crate::polyring::qpoly_multiproj(&BlockSignature::new(self.proj_dims()))
    }
}

/// Interpretation of an atom for the linear-piece oracle.
pub enum AtomKind {
    /// The zero polynomial: satisfied everywhere.
    True,
    /// A nonzero constant: satisfied nowhere.
    False,
    /// A linear form in the coordinates of exactly one block.
    Linear { block: usize, row: Row },
}

/// Classifies an atom, rejecting nonlinear and mixed-block ones.
pub fn classify_atom(atom: &MultiHomPoly, path: &[usize]) -> Result<AtomKind, MotivicError> {
    if atom.is_zero() {
        return Ok(AtomKind::True);
    }
    let positive: Vec<usize> = atom
        .multidegree()
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > 0)
        .map(|(b, _)| b)
        .collect();
    match positive.as_slice() {
        [] => Ok(AtomKind::False),
        [block] => {
            let block = *block;
            if atom.multidegree()[block] != 1 {
                return Err(MotivicError::NonLinearAtom {
                    path: path.to_vec(),
                });
            }
            let blocks = atom.blocks();
            let off = blocks.coord_offset(block);
            let width = blocks.dim(block) + 1;
            let mut row: Row = vec![BigInt::zero(); width];
            for (exps, coeff) in atom.terms() {
                let k = exps[off..off + width]
                    .iter()
                    .position(|&e| e == 1)
                    .expect("degree-one term has a unit exponent in its block");
                row[k] = coeff.clone();
            }
            Ok(AtomKind::Linear { block, row })
        }
        _ => Err(MotivicError::MixedBlockAtom {
            path: path.to_vec(),
        }),
    }
}

fn dedup_pieces(mut pieces: Vec<LinearPiece>) -> Vec<LinearPiece> {
    let mut seen = std::collections::HashSet::new();
    pieces.retain(|p| seen.insert(p.clone()));
    pieces
}

/// Removes pieces contained in another piece (union unchanged).
pub fn subsumption_reduce(pieces: Vec<LinearPiece>) -> Vec<LinearPiece> {
    let pieces = dedup_pieces(pieces);
    let mut keep = vec![true; pieces.len()];
    for i in 0..pieces.len() {
        if !keep[i] {
            continue;
        }
        for j in 0..pieces.len() {
            if i != j && keep[j] && pieces[i].is_contained_in(&pieces[j]) {
                keep[i] = false;
                break;
            }
        }
    }
    pieces
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect()
}

fn dnf(
    node: &FormulaNode,
    blocks: &BlockSignature,
    path: &mut Vec<usize>,
    cap: usize,
) -> Result<Vec<LinearPiece>, MotivicError> {
    match node {
        FormulaNode::Atom(atom) => match classify_atom(atom, path)? {
            AtomKind::True => Ok(vec![LinearPiece::ambient(blocks.clone())]),
            AtomKind::False => Ok(Vec::new()),
            AtomKind::Linear { block, row } => Ok(LinearPiece::ambient(blocks.clone())
                .with_row(block, row)
                .into_iter()
                .collect()),
        },
        FormulaNode::Or(children) => {
            let mut out = Vec::new();
            for (i, child) in children.iter().enumerate() {
                path.push(i);
                let pieces = dnf(child, blocks, path, cap)?;
                path.pop();
                out.extend(pieces);
                out = dedup_pieces(out);
                if out.len() > cap {
                    return Err(MotivicError::PieceLimitExceeded { limit: cap });
                }
            }
            Ok(out)
        }
        FormulaNode::And(children) => {
            // sequential expansion with eager pruning: dead partial pieces are
            // dropped the moment a block overdetermines
            let mut partials = vec![LinearPiece::ambient(blocks.clone())];
            for (i, child) in children.iter().enumerate() {
                path.push(i);
                let pieces = dnf(child, blocks, path, cap)?;
                path.pop();
                let mut next = Vec::new();
                for p in &partials {
                    for q in &pieces {
                        if let Some(meet) = p.intersect(q) {
                            next.push(meet);
                        }
                    }
                }
                partials = dedup_pieces(next);
                if partials.len() > cap {
                    return Err(MotivicError::PieceLimitExceeded { limit: cap });
                }
                if partials.is_empty() {
                    return Ok(Vec::new());
                }
            }
            Ok(partials)
        }
        FormulaNode::Not(_) => unreachable!("validated formulas are negation-free"),
    }
}

/// Turns a quantifier-free formula with single-block linear atoms into a list
/// of pairwise-distinct nonempty pieces whose union is the realization.
/// Subsumed pieces are removed.
pub fn formula_to_pieces(
    formula: &ProperFormula,
    cap: usize,
) -> Result<Vec<LinearPiece>, MotivicError> {
    let mut path = Vec::new();
    let pieces = dnf(formula.tree(), formula.blocks(), &mut path, cap)?;
    Ok(subsumption_reduce(pieces))
}

/// Restriction of a union to a subset of blocks, deduplicated and
/// subsumption-reduced.
pub fn project_pieces(pieces: &[LinearPiece], keep: &[usize]) -> Vec<LinearPiece> {
    subsumption_reduce(pieces.iter().map(|p| p.project(keep)).collect())
}

/// Helper for tests and instance construction: the piece cut out by integer
/// rows, given per block.
pub fn piece_from_rows(blocks: &BlockSignature, rows: &[(usize, Vec<i64>)]) -> LinearPiece {
    let mut systems = vec![Vec::new(); blocks.len()];
    for (block, row) in rows {
        systems[*block].push(row.iter().map(|&v| BigInt::from(v)).collect());
    }
    LinearPiece {
        blocks: blocks.clone(),
        systems: systems.into_iter().map(rref).collect(),
    }
}

/// Exponent-vector comparison for class computations: piece dominates the
/// monomial `μ` when every block dimension is at least the exponent.
pub fn dominates(dims: &[usize], mu: &[usize]) -> bool {
    dims.iter().zip(mu.iter()).all(|(d, m)| d >= m)
}

/// All distinct intersections of subsets of the given pieces (the pieces
/// themselves included), computed by closure under pairwise intersection.
pub fn intersection_closure(
    pieces: &[LinearPiece],
    cap: usize,
) -> Result<Vec<LinearPiece>, MotivicError> {
    let mut all: Vec<LinearPiece> = Vec::new();
    let mut seen: std::collections::HashSet<LinearPiece> = std::collections::HashSet::new();
    let mut frontier: Vec<LinearPiece> = Vec::new();
    for p in pieces {
        if seen.insert(p.clone()) {
            all.push(p.clone());
            frontier.push(p.clone());
        }
    }
    while let Some(x) = frontier.pop() {
        for p in pieces {
            if let Some(meet) = x.intersect(p) {
                if seen.insert(meet.clone()) {
                    if all.len() >= cap {
                        return Err(MotivicError::PieceLimitExceeded { limit: cap });
                    }
                    all.push(meet.clone());
                    frontier.push(meet);
                }
            }
        }
    }
    Ok(all)
}

/// Evaluates a multi-homogeneous atom at a coordinate vector mod `q`.
pub fn atom_vanishes_mod(atom: &MultiHomPoly, coords: &[u64], q: u64) -> bool {
    let mut total: u64 = 0;
    for (exps, coeff) in atom.terms() {
        let c = coeff_mod(coeff, q);
        if c == 0 {
            continue;
        }
        let mut term = c;
        for (i, &e) in exps.iter().enumerate() {
            for _ in 0..e {
                term = mulmod(term, coords[i], q);
                if term == 0 {
                    break;
                }
            }
            if term == 0 {
                break;
            }
        }
        total = (total + term) % q;
    }
    total == 0
}

pub fn coeff_mod(c: &BigInt, q: u64) -> u64 {
    use num_integer::Integer;
    let m = c.mod_floor(&BigInt::from(q));
    let digits = m.to_u64_digits();
    match digits.1.as_slice() {
        [] => 0,
        [d] => *d,
        _ => unreachable!("value reduced mod a u64 fits one digit"),
    }
}

fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

/// Evaluates the formula tree at a coordinate vector mod `q`.
pub fn formula_holds_mod(node: &FormulaNode, coords: &[u64], q: u64) -> bool {
    match node {
        FormulaNode::And(cs) => cs.iter().all(|c| formula_holds_mod(c, coords, q)),
        FormulaNode::Or(cs) => cs.iter().any(|c| formula_holds_mod(c, coords, q)),
        FormulaNode::Atom(a) => atom_vanishes_mod(a, coords, q),
        FormulaNode::Not(_) => unreachable!("validated formulas are negation-free"),
    }
}

/// The union's maximal piece dimension, or `None` for the empty union.
pub fn union_dim(pieces: &[LinearPiece]) -> Option<usize> {
    pieces.iter().map(|p| p.dim()).max()
}

/// Multi-exponents `μ` (one entry per block) dominated by at least one piece
/// and with `2|μ| ≤ k_max`.
pub fn monomials_within(pieces: &[LinearPiece], k_max: usize) -> Vec<Vec<usize>> {
    let nblocks = pieces.first().map(|p| p.blocks().len()).unwrap_or(0);
    let mut out = Vec::new();
    let mut current = vec![0usize; nblocks];
    collect_monomials(pieces, k_max, 0, 0, &mut current, &mut out);
    out
}

fn collect_monomials(
    pieces: &[LinearPiece],
    k_max: usize,
    block: usize,
    weight: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if block == current.len() {
        if pieces.iter().any(|p| dominates(&p.proj_dims(), current)) {
            out.push(current.clone());
        }
        return;
    }
    let max_here = pieces.iter().map(|p| p.proj_dim(block)).max().unwrap_or(0);
    for e in 0..=max_here {
        if 2 * (weight + e) > k_max {
            break;
        }
        current[block] = e;
        collect_monomials(pieces, k_max, block + 1, weight + e, current, out);
    }
    current[block] = 0;
}

type TermMap = BTreeMap<Vec<u32>, BigInt>;

/// Conjunction of linear equations describing a piece, as formula atoms
/// (used when a piece needs to be re-expressed as a formula).
pub fn piece_to_atoms(piece: &LinearPiece) -> Vec<TermMap> {
    let blocks = piece.blocks();
    let mut atoms = Vec::new();
    for b in 0..blocks.len() {
        let off = blocks.coord_offset(b);
        for row in &piece.systems[b] {
            let mut terms: TermMap = BTreeMap::new();
            for (k, v) in row.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let mut exps = vec![0u32; blocks.coord_count()];
                exps[off + k] = 1;
                terms.insert(exps, v.clone());
            }
            atoms.push(terms);
        }
    }
    atoms
}
