//! Exact pseudo-Poincare/Poincare computation for realizations that are
//! finite unions of products of projective-linear subspaces, with a
//! finite-field point-counting oracle for independent verification.
//!
//! Two computation routes coexist:
//!
//! - the Grothendieck-class route ([`pieces_class`], [`class_to_q`],
//!   [`class_to_p`]): scissor-relation inclusion-exclusion. The substitution
//!   `L ↦ T` (resp. `L ↦ T²`) recovers Q (resp. P) only for class-faithful
//!   realizations, those without odd cohomology; out-of-scope inputs are
//!   flagged by the `NegativeCoefficient` guard where detectable.
//! - the Betti route ([`betti::betti_numbers`] and friends): the descent
//!   computation in [`betti`], exact for every union of product pieces and
//!   the one the theorem verifiers rely on.
//!
//! Point counts over prime fields cross-check the class route: for every
//! in-scope formula, the number of points over `F_q` equals the class
//! polynomial evaluated at `q`.

pub mod betti;
pub mod counting;
pub mod linalg;
pub mod pieces;

use std::fmt;

use num_bigint::BigInt;

use crate::formula::ProperFormula;
use crate::polyring::IntPoly;

pub use betti::{betti_numbers, poincare_via_betti, pseudo_poincare_via_betti, BettiBudget};
pub use counting::{class_from_counts, count_points};
pub use pieces::{
    formula_to_pieces, intersection_closure, piece_from_rows, project_pieces, LinearPiece,
};

/// Default cap on surviving partial pieces during DNF expansion.
pub const DEFAULT_PIECE_CAP: usize = 4096;
/// Default enumeration budget for point counting.
pub const DEFAULT_COUNT_BUDGET: u64 = 10_000_000;
/// Inclusion-exclusion is capped at this many pieces (2^20 subsets).
pub const CLASS_PIECE_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MotivicError {
    NonLinearAtom { path: Vec<usize> },
    MixedBlockAtom { path: Vec<usize> },
    PieceLimitExceeded { limit: usize },
    BudgetExceeded { needed: String, budget: u64 },
    PrimeRequired { value: u64 },
    PrimeDividesCoefficient { prime: u64 },
    NegativeCoefficient,
    NotPolynomialCount { detail: String },
    InsufficientSamples { needed: usize, got: usize },
    BettiBudgetExceeded { detail: String },
    QuantifiedInput,
}

impl fmt::Display for MotivicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MotivicError::NonLinearAtom { path } => {
                write!(f, "atom at path {path:?} is not linear")
            }
            MotivicError::MixedBlockAtom { path } => {
                write!(f, "atom at path {path:?} involves more than one block")
            }
            MotivicError::PieceLimitExceeded { limit } => {
                write!(f, "piece limit {limit} exceeded")
            }
            MotivicError::BudgetExceeded { needed, budget } => {
                write!(f, "enumeration needs {needed} points, budget is {budget}")
            }
            MotivicError::PrimeRequired { value } => write!(f, "{value} is not prime"),
            MotivicError::PrimeDividesCoefficient { prime } => {
                write!(f, "prime {prime} divides an atom coefficient")
            }
            MotivicError::NegativeCoefficient => {
                write!(
                    f,
                    "class has a negative coefficient (out-of-scope realization)"
                )
            }
            MotivicError::NotPolynomialCount { detail } => {
                write!(f, "point counts are not polynomial: {detail}")
            }
            MotivicError::InsufficientSamples { needed, got } => {
                write!(f, "interpolation needs {needed} primes, got {got}")
            }
            MotivicError::BettiBudgetExceeded { detail } => {
                write!(f, "Betti computation budget exceeded: {detail}")
            }
            MotivicError::QuantifiedInput => {
                write!(f, "operation expects a quantifier-free formula")
            }
        }
    }
}

impl std::error::Error for MotivicError {}

/// Class in the Grothendieck ring of varieties, an integer polynomial in the
/// Lefschetz class `L` of the affine line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrothClass {
    pub poly_in_l: IntPoly,
}

/// Inclusion-exclusion over all nonempty subsets:
/// `Σ (−1)^{|S|+1} [∩S]`, with `[∏ P^{k_i}] = ∏ (1 + L + … + L^{k_i})`.
/// Intersections are memoized along the subset lattice and supersets of an
/// empty intersection are pruned.
pub fn pieces_class(pieces: &[LinearPiece]) -> Result<GrothClass, MotivicError> {
    if pieces.len() > CLASS_PIECE_CAP {
        return Err(MotivicError::PieceLimitExceeded {
            limit: CLASS_PIECE_CAP,
        });
    }
    let k = pieces.len();
    let mut acc = IntPoly::zero();
    if k == 0 {
        return Ok(GrothClass { poly_in_l: acc });
    }
    let mut memo: Vec<Option<Box<LinearPiece>>> = vec![None; 1usize << k];
    for mask in 1usize..(1 << k) {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let meet = if rest == 0 {
            Some(Box::new(pieces[low].clone()))
        } else {
            match &memo[rest] {
                None => None,
                Some(prev) => prev.intersect(&pieces[low]).map(Box::new),
            }
        };
        if let Some(piece) = &meet {
            let value = piece.class_poly();
            if mask.count_ones() % 2 == 1 {
                acc = &acc + &value;
            } else {
                acc = &acc - &value;
            }
        }
        memo[mask] = meet;
    }
    Ok(GrothClass { poly_in_l: acc })
}

/// `L ↦ T`. Valid as a pseudo-Poincare polynomial only for class-faithful
/// realizations; a negative coefficient flags an out-of-scope input.
pub fn class_to_q(c: &GrothClass) -> Result<IntPoly, MotivicError> {
    if c.poly_in_l.has_negative_coeff() {
        return Err(MotivicError::NegativeCoefficient);
    }
    Ok(c.poly_in_l.clone())
}

/// `L ↦ T²`. Valid as a Poincare polynomial under the same hypothesis as
/// [`class_to_q`].
pub fn class_to_p(c: &GrothClass) -> Result<IntPoly, MotivicError> {
    if c.poly_in_l.has_negative_coeff() {
        return Err(MotivicError::NegativeCoefficient);
    }
    Ok(c.poly_in_l.stretch_double())
}

/// DNF pieces of a quantifier-free formula with the default cap.
pub fn realization_pieces(formula: &ProperFormula) -> Result<Vec<LinearPiece>, MotivicError> {
    if !formula.is_quantifier_free() {
        return Err(MotivicError::QuantifiedInput);
    }
    formula_to_pieces(formula, DEFAULT_PIECE_CAP)
}

/// Exact pseudo-Poincare polynomial of a quantifier-free formula's
/// realization via the Betti route.
pub fn q_of_formula(formula: &ProperFormula) -> Result<IntPoly, MotivicError> {
    let pieces = realization_pieces(formula)?;
    pseudo_poincare_via_betti(&pieces, &BettiBudget::default())
}

/// Exact Poincare polynomial via the Betti route.
pub fn p_of_formula(formula: &ProperFormula) -> Result<IntPoly, MotivicError> {
    let pieces = realization_pieces(formula)?;
    poincare_via_betti(&pieces, &BettiBudget::default())
}

/// Number of `F_q` points predicted by the class: the class polynomial
/// evaluated at `q`.
pub fn class_point_prediction(c: &GrothClass, q: u64) -> BigInt {
    c.poly_in_l.eval(&BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::polyring::BlockSignature;
    use num_traits::One;

    fn p(coeffs: &[i64]) -> IntPoly {
        IntPoly::from_i64(coeffs)
    }

    #[test]
    fn class_of_a_single_product() {
        let piece = LinearPiece::ambient(BlockSignature::new(vec![1, 1]));
        let c = pieces_class(&[piece]).unwrap();
        assert_eq!(c.poly_in_l, p(&[1, 2, 1]));
    }

    #[test]
    fn class_of_two_distinct_points() {
        let s = BlockSignature::new(vec![1]);
        let a = piece_from_rows(&s, &[(0, vec![1, -1])]);
        let b = piece_from_rows(&s, &[(0, vec![1, -2])]);
        let c = pieces_class(&[a, b]).unwrap();
        assert_eq!(c.poly_in_l, p(&[2]));
    }

    #[test]
    fn class_of_two_concurrent_lines() {
        let s = BlockSignature::new(vec![2]);
        let l1 = piece_from_rows(&s, &[(0, vec![1, 0, 0])]);
        let l2 = piece_from_rows(&s, &[(0, vec![0, 1, 0])]);
        let c = pieces_class(&[l1, l2]).unwrap();
        assert_eq!(c.poly_in_l, p(&[1, 2]));
        assert_eq!(class_point_prediction(&c, 5), BigInt::from(11));
    }

    #[test]
    fn class_to_q_and_p() {
        let c = GrothClass {
            poly_in_l: p(&[1, 2]),
        };
        assert_eq!(class_to_q(&c).unwrap(), p(&[1, 2]));
        assert_eq!(class_to_p(&c).unwrap(), p(&[1, 0, 2]));
        let neg = GrothClass {
            poly_in_l: p(&[0, -1]),
        };
        assert!(matches!(
            class_to_q(&neg),
            Err(MotivicError::NegativeCoefficient)
        ));
        let two = GrothClass { poly_in_l: p(&[2]) };
        assert_eq!(class_to_q(&two).unwrap(), p(&[2]));
        assert_eq!(class_to_p(&two).unwrap(), p(&[2]));
    }

    #[test]
    fn class_of_the_cycle_is_not_faithful() {
        // the four-line cycle: class 4L but b = (1,1,4); class_to_q would
        // give 4T, not the true 1+3T, and the coefficient guard cannot see it
        let s = BlockSignature::new(vec![3]);
        let mk = |r1: Vec<i64>, r2: Vec<i64>| piece_from_rows(&s, &[(0, r1), (0, r2)]);
        let pieces = vec![
            mk(vec![0, 1, 0, 0], vec![0, 0, 0, 1]),
            mk(vec![0, 1, 0, 0], vec![0, 0, 1, 0]),
            mk(vec![1, 0, 0, 0], vec![0, 0, 0, 1]),
            mk(vec![1, 0, 0, 0], vec![0, 0, 1, 0]),
        ];
        let c = pieces_class(&pieces).unwrap();
        assert_eq!(c.poly_in_l, p(&[0, 4]));
        let q_true = pseudo_poincare_via_betti(&pieces, &BettiBudget::default()).unwrap();
        assert_eq!(q_true, p(&[1, 3]));
        // Euler characteristics agree between the two routes
        assert_eq!(
            c.poly_in_l.eval(&BigInt::one()),
            q_true.eval(&BigInt::one())
        );
    }

    #[test]
    fn realization_q_of_the_example_join_pieces() {
        let f = parse_formula("(blocks (x 2)) (or (=0 x0_0) (=0 x0_1))").unwrap();
        // two hyperplanes P^1 in P^2 meeting in a point: class 1 + 2L, and
        // Q via Betti agrees because the union is class-faithful
        let pieces = realization_pieces(&f).unwrap();
        let c = pieces_class(&pieces).unwrap();
        assert_eq!(class_to_q(&c).unwrap(), q_of_formula(&f).unwrap());
    }

    #[test]
    fn class_of_full_products_matches_qpoly() {
        use crate::polyring::qpoly_multiproj;
        for dims in [vec![1], vec![2, 3], vec![0, 1, 1], vec![4]] {
            let sig = BlockSignature::new(dims);
            let piece = LinearPiece::ambient(sig.clone());
            let c = pieces_class(&[piece]).unwrap();
            assert_eq!(class_to_q(&c).unwrap(), qpoly_multiproj(&sig), "{sig}");
        }
    }

    #[test]
    fn quantified_input_rejected() {
        let f = parse_formula("(blocks (x 1)) (prefix exists) (=0 x0_0)").unwrap();
        assert!(matches!(
            realization_pieces(&f),
            Err(MotivicError::QuantifiedInput)
        ));
    }
}
