//! Finite-field point counting and count-interpolated classes.
//!
//! Points of a product of projective spaces are enumerated one normalized
//! representative per projective point: the first nonzero coordinate is 1.
//! The aggregate count is independent of how the enumeration is partitioned
//! across worker threads.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::formula::{FormulaNode, ProperFormula};
use crate::polyring::IntPoly;

use super::pieces::coeff_mod;
use super::{GrothClass, MotivicError};

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Formula compiled for fast evaluation mod a fixed prime.
enum Compiled {
    And(Vec<Compiled>),
    Or(Vec<Compiled>),
    /// terms as (coefficient mod q, list of (coordinate index, exponent))
    Atom(Vec<(u64, Vec<(usize, u32)>)>),
}

fn compile(node: &FormulaNode, q: u64) -> Compiled {
    match node {
        FormulaNode::And(cs) => Compiled::And(cs.iter().map(|c| compile(c, q)).collect()),
        FormulaNode::Or(cs) => Compiled::Or(cs.iter().map(|c| compile(c, q)).collect()),
        FormulaNode::Atom(a) => Compiled::Atom(
            a.terms()
                .iter()
                .filter_map(|(exps, coeff)| {
                    let c = coeff_mod(coeff, q);
                    (c != 0).then(|| {
                        let vars: Vec<(usize, u32)> = exps
                            .iter()
                            .enumerate()
                            .filter(|(_, &e)| e > 0)
                            .map(|(i, &e)| (i, e))
                            .collect();
                        (c, vars)
                    })
                })
                .collect(),
        ),
        FormulaNode::Not(_) => unreachable!("validated formulas are negation-free"),
    }
}

fn powmod(mut base: u64, mut exp: u32, q: u64) -> u64 {
    let mut acc = 1u64;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % q as u128) as u64;
        }
        base = (base as u128 * base as u128 % q as u128) as u64;
        exp >>= 1;
    }
    acc
}

fn eval(node: &Compiled, coords: &[u64], q: u64) -> bool {
    match node {
        Compiled::And(cs) => cs.iter().all(|c| eval(c, coords, q)),
        Compiled::Or(cs) => cs.iter().any(|c| eval(c, coords, q)),
        Compiled::Atom(terms) => {
            let mut total: u64 = 0;
            for (c, vars) in terms {
                let mut term = *c;
                for &(i, e) in vars {
                    if coords[i] == 0 {
                        term = 0;
                        break;
                    }
                    term = (term as u128 * powmod(coords[i], e, q) as u128 % q as u128) as u64;
                }
                total = (total + term) % q;
            }
            total == 0
        }
    }
}

/// Representatives of the projective points of one block, each of width
/// `dim + 1`: leading zeros, a 1, then arbitrary field elements.
fn block_reps(dim: usize, q: u64) -> Vec<Vec<u64>> {
    let mut reps = Vec::new();
    for lead in 0..=dim {
        let tail = dim - lead;
        let mut suffix = vec![0u64; tail];
        loop {
            let mut rep = vec![0u64; dim + 1];
            rep[lead] = 1;
            for (k, &v) in suffix.iter().enumerate() {
                rep[lead + 1 + k] = v;
            }
            reps.push(rep);
            // advance odometer
            let mut pos = tail;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                suffix[pos] += 1;
                if suffix[pos] < q {
                    break;
                }
                suffix[pos] = 0;
            }
            if suffix.iter().all(|&v| v == 0) {
                break;
            }
        }
    }
    reps
}

fn projective_count(dim: usize, q: u64) -> BigInt {
    let q = BigInt::from(q);
    let mut total = BigInt::zero();
    let mut power = BigInt::one();
    for _ in 0..=dim {
        total += &power;
        power *= &q;
    }
    total
}

fn atom_coeff_divisible(formula: &ProperFormula, q: u64) -> bool {
    fn walk(node: &FormulaNode, q: &BigInt) -> bool {
        match node {
            FormulaNode::And(cs) | FormulaNode::Or(cs) => cs.iter().any(|c| walk(c, q)),
            FormulaNode::Atom(a) => a
                .terms()
                .values()
                .any(|c| (c % q).is_zero() && !c.is_zero()),
            FormulaNode::Not(_) => false,
        }
    }
    walk(formula.tree(), &BigInt::from(q))
}

/// Exact number of `F_q` points of the realization, `q` prime. Primes
/// dividing any nonzero atom coefficient are rejected (reduction would change
/// the variety), as are enumerations beyond the budget.
pub fn count_points(
    formula: &ProperFormula,
    q: u64,
    budget: u64,
    threads: usize,
) -> Result<BigInt, MotivicError> {
    if !formula.is_quantifier_free() {
        return Err(MotivicError::QuantifiedInput);
    }
    if !is_prime(q) {
        return Err(MotivicError::PrimeRequired { value: q });
    }
    if atom_coeff_divisible(formula, q) {
        return Err(MotivicError::PrimeDividesCoefficient { prime: q });
    }
    let blocks = formula.blocks();
    let mut total_points = BigInt::one();
    for b in 0..blocks.len() {
        total_points *= projective_count(blocks.dim(b), q);
    }
    if total_points > BigInt::from(budget) {
        return Err(MotivicError::BudgetExceeded {
            needed: total_points.to_string(),
            budget,
        });
    }

    let compiled = compile(formula.tree(), q);
    let per_block: Vec<Vec<Vec<u64>>> = (0..blocks.len())
        .map(|b| block_reps(blocks.dim(b), q))
        .collect();

    let first = &per_block[0];
    let rest = &per_block[1..];
    let threads = threads.max(1).min(first.len().max(1));
    let chunk = first.len().div_ceil(threads);
    let counts: Vec<u64> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for part in first.chunks(chunk.max(1)) {
            let compiled = &compiled;
            handles.push(scope.spawn(move || {
                let mut count = 0u64;
                let width: usize = part.first().map(|r| r.len()).unwrap_or(0)
                    + rest.iter().map(|r| r[0].len()).sum::<usize>();
                let mut coords = vec![0u64; width];
                for head in part {
                    coords[..head.len()].copy_from_slice(head);
                    count += count_rest(compiled, rest, &mut coords, head.len(), q);
                }
                count
            }));
        }
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    Ok(counts.iter().map(|&c| BigInt::from(c)).sum())
}

fn count_rest(
    compiled: &Compiled,
    rest: &[Vec<Vec<u64>>],
    coords: &mut Vec<u64>,
    offset: usize,
    q: u64,
) -> u64 {
    match rest {
        [] => u64::from(eval(compiled, coords, q)),
        [block, tail @ ..] => {
            let mut count = 0;
            for rep in block {
                coords[offset..offset + rep.len()].copy_from_slice(rep);
                count += count_rest(compiled, tail, coords, offset + rep.len(), q);
            }
            count
        }
    }
}

/// Lagrange interpolation of the count polynomial through prime sample
/// points. Needs at least `total ambient dimension + 1` primes; extra samples
/// must be consistent with the interpolant, whose coefficients must be
/// integers of degree at most the ambient dimension.
pub fn class_from_counts(
    formula: &ProperFormula,
    primes: &[u64],
    budget: u64,
    threads: usize,
) -> Result<GrothClass, MotivicError> {
    let needed = formula.blocks().total() + 1;
    if primes.len() < needed {
        return Err(MotivicError::InsufficientSamples {
            needed,
            got: primes.len(),
        });
    }
    for window in primes.windows(2) {
        if window[1] <= window[0] {
            return Err(MotivicError::NotPolynomialCount {
                detail: "primes must be strictly increasing".into(),
            });
        }
    }
    let samples: Vec<(BigInt, BigInt)> = primes
        .iter()
        .map(|&q| Ok((BigInt::from(q), count_points(formula, q, budget, threads)?)))
        .collect::<Result<_, MotivicError>>()?;

    // interpolate through the first `needed` samples
    let base = &samples[..needed];
    let mut acc: Vec<BigRational> = vec![BigRational::zero(); needed];
    for (i, (xi, yi)) in base.iter().enumerate() {
        // numerator polynomial ∏_{j≠i} (X - x_j), denominator ∏ (x_i - x_j)
        let mut num: Vec<BigRational> = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (j, (xj, _)) in base.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![BigRational::zero(); num.len() + 1];
            let xj_rat = BigRational::from_integer(xj.clone());
            for (k, c) in num.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * &xj_rat;
            }
            num = next;
            denom *= BigRational::from_integer(xi - xj);
        }
        let weight = BigRational::from_integer(yi.clone()) / denom;
        for (k, c) in num.iter().enumerate() {
            acc[k] += c * &weight;
        }
    }
    let mut coeffs = Vec::with_capacity(acc.len());
    for c in &acc {
        if !c.is_integer() {
            return Err(MotivicError::NotPolynomialCount {
                detail: format!("non-integer coefficient {c}"),
            });
        }
        coeffs.push(c.to_integer());
    }
    let poly = IntPoly::from_coeffs(coeffs);
    if poly.degree() > formula.blocks().total() as isize {
        return Err(MotivicError::NotPolynomialCount {
            detail: format!(
                "interpolant degree {} exceeds ambient dimension {}",
                poly.degree(),
                formula.blocks().total()
            ),
        });
    }
    // verify the remaining samples
    for (x, y) in &samples[needed..] {
        if &poly.eval(x) != y {
            return Err(MotivicError::NotPolynomialCount {
                detail: format!("sample at {x} disagrees with the interpolant"),
            });
        }
    }
    Ok(GrothClass { poly_in_l: poly })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::motivic::{class_point_prediction, pieces_class, realization_pieces};

    #[test]
    fn full_space_counts() {
        let f = parse_formula("(blocks (x 1) (x 1)) (and)").unwrap();
        assert_eq!(count_points(&f, 3, 1_000_000, 1).unwrap(), BigInt::from(16));
    }

    #[test]
    fn hyperplane_point_on_p1() {
        let f = parse_formula("(blocks (x 1)) (=0 x0_0)").unwrap();
        assert_eq!(count_points(&f, 2, 1_000_000, 1).unwrap(), BigInt::from(1));
    }

    #[test]
    fn concurrent_lines_count() {
        let f = parse_formula("(blocks (x 2)) (or (=0 x0_0) (=0 x0_1))").unwrap();
        // 2q + 1 points
        assert_eq!(count_points(&f, 5, 1_000_000, 1).unwrap(), BigInt::from(11));
    }

    #[test]
    fn count_matches_class_prediction() {
        let texts = [
            "(blocks (x 2)) (or (=0 x0_0) (=0 x0_1))",
            "(blocks (x 1) (x 1)) (or (=0 x0_0) (=0 x1_1))",
            "(blocks (x 1)) (and (=0 (+ x0_0 (* -1 x0_1))))",
            "(blocks (x 2)) (and)",
        ];
        for text in texts {
            let f = parse_formula(text).unwrap();
            let c = pieces_class(&realization_pieces(&f).unwrap()).unwrap();
            for q in [2u64, 3, 5, 7] {
                assert_eq!(
                    count_points(&f, q, 1_000_000, 1).unwrap(),
                    class_point_prediction(&c, q),
                    "{text} at q={q}"
                );
            }
        }
    }

    #[test]
    fn thread_partition_is_invariant() {
        let f = parse_formula("(blocks (x 2) (x 1)) (or (=0 x0_0) (=0 x1_1))").unwrap();
        let a = count_points(&f, 7, 1_000_000, 1).unwrap();
        let b = count_points(&f, 7, 1_000_000, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn prime_checks() {
        let f = parse_formula("(blocks (x 1)) (=0 x0_0)").unwrap();
        assert!(matches!(
            count_points(&f, 6, 1_000_000, 1),
            Err(MotivicError::PrimeRequired { value: 6 })
        ));
        let g = parse_formula("(blocks (x 1)) (=0 (+ x0_0 (* -2 x0_1)))").unwrap();
        assert!(matches!(
            count_points(&g, 2, 1_000_000, 1),
            Err(MotivicError::PrimeDividesCoefficient { prime: 2 })
        ));
    }

    #[test]
    fn budget_check() {
        let f = parse_formula("(blocks (x 5)) (and)").unwrap();
        assert!(matches!(
            count_points(&f, 97, 1000, 1),
            Err(MotivicError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn interpolation_examples() {
        let f = parse_formula("(blocks (x 1)) (=0 x0_0)").unwrap();
        let c = class_from_counts(&f, &[2, 3], 1_000_000, 1).unwrap();
        assert_eq!(c.poly_in_l, IntPoly::one());

        let full = parse_formula("(blocks (x 2)) (and)").unwrap();
        let c2 = class_from_counts(&full, &[2, 3, 5], 1_000_000, 1).unwrap();
        assert_eq!(c2.poly_in_l, IntPoly::from_i64(&[1, 1, 1]));

        let lines = parse_formula("(blocks (x 2)) (or (=0 x0_0) (=0 x0_1))").unwrap();
        let c3 = class_from_counts(&lines, &[2, 3, 5], 1_000_000, 1).unwrap();
        assert_eq!(c3.poly_in_l, IntPoly::from_i64(&[1, 2]));
    }

    #[test]
    fn interpolation_reproduces_class_with_extra_samples() {
        let f = parse_formula("(blocks (x 1) (x 1)) (or (=0 x0_0) (=0 x1_0))").unwrap();
        let from_counts = class_from_counts(&f, &[2, 3, 5, 7, 11], 1_000_000, 1).unwrap();
        let from_pieces = pieces_class(&realization_pieces(&f).unwrap()).unwrap();
        assert_eq!(from_counts, from_pieces);
    }

    #[test]
    fn insufficient_samples_rejected() {
        let f = parse_formula("(blocks (x 2)) (and)").unwrap();
        assert!(matches!(
            class_from_counts(&f, &[2, 3], 1_000_000, 1),
            Err(MotivicError::InsufficientSamples { needed: 3, got: 2 })
        ));
    }
}
