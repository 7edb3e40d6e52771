//! Join-versus-hypercover diagnostics and desk-scale theorem verifiers.
//!
//! The hypercover route bounds Betti numbers of a projection image by sums of
//! Betti numbers of fiber powers; the join route reads them off low degrees
//! of the relative join. On the full product `P^1 × P^n` the two differ
//! exponentially, which [`hypercover_sum_example`] and [`join_side_example`]
//! make explicit. The verifiers check, on linear-arrangement instances, the
//! congruence `P(J^{[p]}) ≡ P(π(X))·(1 + T² + …) mod T^p` and the
//! cohomological `p`-connectivity of multi-joins, both with exact Betti
//! numbers from the descent engine.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::formula::ProperFormula;
use crate::join::{multijoin_formula, relative_join_formula, JoinError};
use crate::motivic::{betti_numbers, formula_to_pieces, project_pieces, BettiBudget, MotivicError};
use crate::polyring::{poly_mul, ppoly_multiproj, BlockSignature, IntPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompareError {
    InvalidArgument(String),
    InsufficientDegrees { needed: usize, got: usize },
    Motivic(MotivicError),
    Join(JoinError),
}

impl fmt::Display for CompareError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompareError::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            CompareError::InsufficientDegrees { needed, got } => {
                write!(f, "need Betti numbers up to degree {needed}, got {got}")
            }
            CompareError::Motivic(e) => write!(f, "{e}"),
            CompareError::Join(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CompareError {}

impl From<MotivicError> for CompareError {
    fn from(e: MotivicError) -> Self {
        CompareError::Motivic(e)
    }
}

impl From<JoinError> for CompareError {
    fn from(e: JoinError) -> Self {
        CompareError::Join(e)
    }
}

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// The hypercover side of the full-product example:
/// `Σ_{0≤p≤n} Σ_{0≤j≤2(n−p)} C(2p+1, j)`.
pub fn hypercover_sum_example(n: usize) -> BigUint {
    let mut acc = BigUint::zero();
    for p in 0..=n {
        for j in 0..=2 * (n - p) {
            acc += binomial(2 * p + 1, j);
        }
    }
    acc
}

/// The join side of the same example: `b_{2n}(P^{2(2n+2)-1} × P^n) = n + 1`,
/// cross-checked as the coefficient of `T^{2n}` in the Poincare polynomial of
/// the product.
pub fn join_side_example(n: usize) -> BigUint {
    let sig = BlockSignature::new(vec![2 * (2 * n + 2) - 1, n]);
    let p = ppoly_multiproj(&sig);
    let coeff = p.coeff(2 * n);
    let direct = BigInt::from(n + 1);
    assert_eq!(coeff, direct, "coefficient extraction disagrees with n+1");
    BigUint::from(n + 1)
}

/// One row of the gap table.
#[derive(Clone, Debug)]
pub struct ComparisonReport {
    pub n: usize,
    pub hypercover_value: BigUint,
    pub join_value: BigUint,
    pub ratio: BigRational,
    /// hypercover inner sums per `p`, the per-degree breakdown
    pub per_degree: Vec<BigUint>,
}

impl ComparisonReport {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "hypercover": self.hypercover_value.to_string(),
            "join": self.join_value.to_string(),
            "ratio": self.ratio.to_string(),
            "per_degree": self.per_degree.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        })
    }
}

pub fn gap_report(n: usize) -> ComparisonReport {
    let hypercover_value = hypercover_sum_example(n);
    let join_value = join_side_example(n);
    let per_degree = (0..=n)
        .map(|p| {
            let mut acc = BigUint::zero();
            for j in 0..=2 * (n - p) {
                acc += binomial(2 * p + 1, j);
            }
            acc
        })
        .collect();
    let ratio = BigRational::new(
        BigInt::from(hypercover_value.clone()),
        BigInt::from(join_value.clone()),
    );
    ComparisonReport {
        n,
        hypercover_value,
        join_value,
        ratio,
        per_degree,
    }
}

/// Telescoped Betti sums of the image from the join's Betti list, `p` odd:
/// the even sum `Σ_{2i<p} b_{2i}(π(X))` equals `b_{p-1}` of the join, the odd
/// sum equals `b_{p-2}`.
pub fn telescoped_betti_sums(
    join_betti: &[BigInt],
    p: usize,
) -> Result<(BigInt, BigInt), CompareError> {
    if p == 0 || p.is_multiple_of(2) {
        return Err(CompareError::InvalidArgument(format!(
            "telescoping needs odd p >= 1, got {p}"
        )));
    }
    if join_betti.len() < p {
        return Err(CompareError::InsufficientDegrees {
            needed: p - 1,
            got: join_betti.len(),
        });
    }
    let even_sum = join_betti[p - 1].clone();
    let odd_sum = if p >= 2 {
        join_betti[p - 2].clone()
    } else {
        BigInt::zero()
    };
    Ok((even_sum, odd_sum))
}

/// Low-degree Betti numbers of the image of a local-complete-intersection of
/// pure dimension `n − r` in `P^N × P^n` with finite projection fibers (the
/// hypotheses are the caller's responsibility): below the threshold
/// `t = ⌊(n−r)/r⌋`, even degrees have `b_i = 1` and odd degrees `b_i = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinDefectReport {
    pub ambient_n: usize,
    pub fiber_n: usize,
    pub equations: usize,
    pub threshold: usize,
    pub betti: Vec<u64>,
    /// `M − E = p + n − (p+1) r` at the maximizing `p`
    pub m_minus_e: i64,
    pub maximizing_p: usize,
}

impl JoinDefectReport {
    pub fn to_json(&self) -> Value {
        json!({
            "N": self.ambient_n,
            "n": self.fiber_n,
            "r": self.equations,
            "threshold": self.threshold,
            "betti": self.betti,
            "m_minus_e": self.m_minus_e,
            "maximizing_p": self.maximizing_p,
        })
    }
}

pub fn join_defect_betti(
    ambient_n: usize,
    n: usize,
    r: usize,
) -> Result<JoinDefectReport, CompareError> {
    if r == 0 || n <= r {
        return Err(CompareError::InvalidArgument(format!(
            "join defect needs n > r >= 1 (got n={n}, r={r})"
        )));
    }
    let t = (n - r) / r;
    if t == 0 {
        return Err(CompareError::InvalidArgument(format!(
            "threshold floor((n-r)/r) = 0 for n={n}, r={r}"
        )));
    }
    let betti: Vec<u64> = (0..t).map(|i| u64::from(i % 2 == 0)).collect();
    let p = t;
    let m_minus_e = p as i64 + n as i64 - ((p + 1) * r) as i64;
    Ok(JoinDefectReport {
        ambient_n,
        fiber_n: n,
        equations: r,
        threshold: t,
        betti,
        m_minus_e,
        maximizing_p: p,
    })
}

/// `min(p, n − r − p(r−1))`, the connectivity window the proof maximizes.
pub fn defect_window(p: usize, n: usize, r: usize) -> i64 {
    let a = p as i64;
    let b = n as i64 - r as i64 - p as i64 * (r as i64 - 1);
    a.min(b)
}

/// Brute-force maximum of the window over `p ∈ [0, n]`, for cross-checking
/// the closed-form threshold.
pub fn defect_window_max(n: usize, r: usize) -> i64 {
    (0..=n).map(|p| defect_window(p, n, r)).max().unwrap()
}

/// Rich verification report: both sides of a polynomial identity, truncated
/// where the statement is a congruence.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub holds: bool,
    pub p: usize,
    pub left_label: String,
    pub right_label: String,
    pub left: IntPoly,
    pub right: IntPoly,
    pub detail: Value,
}

impl VerificationReport {
    pub fn to_json(&self) -> Value {
        json!({
            "holds": self.holds,
            "p": self.p,
            "left_label": self.left_label,
            "right_label": self.right_label,
            "left": serde_json::to_value(&self.left).unwrap(),
            "right": serde_json::to_value(&self.right).unwrap(),
            "detail": self.detail,
        })
    }
}

/// Checks `P(J^{[p]}_π(X)) ≡ P(π(X)) (1 + T² + … + T^{2((p+1)(n+1)−1)})
/// mod T^p` for a formula with one free and one bound block, with both sides
/// computed exactly.
pub fn verify_poincare_congruence(
    psi: &ProperFormula,
    p: usize,
    piece_cap: usize,
    budget: &BettiBudget,
) -> Result<VerificationReport, CompareError> {
    if p == 0 {
        return Err(CompareError::InvalidArgument("p must be >= 1".into()));
    }
    let joined = relative_join_formula(psi, p)?;
    let join_pieces = formula_to_pieces(&joined, piece_cap)?;
    let join_betti = betti_numbers(&join_pieces, p.saturating_sub(1), budget)?;
    let left = IntPoly::from_coeffs(join_betti.iter().map(|&b| BigInt::from(b)).collect());

    let base_pieces = formula_to_pieces(psi, piece_cap)?;
    let image = project_pieces(&base_pieces, &[0]);
    let image_dim = image.iter().map(|q| q.dim()).max();
    let image_betti = match image_dim {
        None => Vec::new(),
        Some(d) => betti_numbers(&image, 2 * d, budget)?,
    };
    let image_poly = IntPoly::from_coeffs(image_betti.iter().map(|&b| BigInt::from(b)).collect());

    let n = psi.bound_dims()[0];
    let fiber_ambient = (p + 1) * (n + 1) - 1;
    let even_geometric = ppoly_multiproj(&BlockSignature::new(vec![fiber_ambient]));
    let right_full = poly_mul(&image_poly, &even_geometric);

    let left_trunc = if p >= 1 {
        left.truncate_deg(p - 1)
    } else {
        IntPoly::zero()
    };
    let right_trunc = right_full.truncate_deg(p.saturating_sub(1));
    let holds = left_trunc == right_trunc;
    Ok(VerificationReport {
        holds,
        p,
        left_label: "P(relative join) mod T^p".into(),
        right_label: "P(image) * (1 + T^2 + ...) mod T^p".into(),
        left: left_trunc,
        right: right_trunc,
        detail: json!({
            "image_poincare": serde_json::to_value(&image_poly).unwrap(),
            "join_pieces": join_pieces.len(),
            "image_pieces": image.len(),
        }),
    })
}

/// Checks cohomological `p`-connectivity of the multi-join of `p+1` copies of
/// a single-block formula: `b_j` match the ambient projective space below
/// `p`, with `b_p` at least the ambient value.
pub fn verify_join_connectivity(
    psi: &ProperFormula,
    p: usize,
    piece_cap: usize,
    budget: &BettiBudget,
) -> Result<VerificationReport, CompareError> {
    if p == 0 {
        return Err(CompareError::InvalidArgument("p must be >= 1".into()));
    }
    let inputs = vec![psi.clone(); p + 1];
    let joined = multijoin_formula(&inputs)?;
    let pieces = formula_to_pieces(&joined, piece_cap)?;
    if pieces.is_empty() {
        return Err(CompareError::InvalidArgument(
            "connectivity check needs a nonempty realization".into(),
        ));
    }
    let ambient = joined.blocks().dims()[0];
    let betti = betti_numbers(&pieces, p, budget)?;
    let expected: Vec<u64> = (0..=p)
        .map(|j| u64::from(j % 2 == 0 && j <= 2 * ambient))
        .collect();
    let mut holds = betti[p] >= expected[p];
    for j in 0..p {
        holds &= betti[j] == expected[j];
    }
    Ok(VerificationReport {
        holds,
        p,
        left_label: format!("b_0..b_{p} of the {}-fold multi-join", p + 1),
        right_label: format!("b_0..b_{p} of P^{ambient} (inequality at degree p)"),
        left: IntPoly::from_coeffs(betti.iter().map(|&b| BigInt::from(b)).collect()),
        right: IntPoly::from_coeffs(expected.iter().map(|&b| BigInt::from(b)).collect()),
        detail: json!({
            "ambient_dimension": ambient,
            "pieces": pieces.len(),
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn u(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn hypercover_small_values() {
        assert_eq!(hypercover_sum_example(1), u(3));
        assert_eq!(hypercover_sum_example(2), u(10));
    }

    #[test]
    fn join_side_values() {
        assert_eq!(join_side_example(1), u(2));
        assert_eq!(join_side_example(5), u(6));
        for n in 1..=20 {
            assert_eq!(join_side_example(n), u(n as u64 + 1));
        }
    }

    #[test]
    fn hypercover_growth_lower_bound() {
        // value >= 2^{2 ceil(n/2)} / 2 for n >= 4
        for n in 4..=30 {
            let lhs = hypercover_sum_example(n) * u(2);
            let rhs = BigUint::from(2u32).pow(2 * ((n as u32) + 1) / 2);
            assert!(lhs >= rhs, "n={n}");
        }
    }

    #[test]
    fn gap_ratio_growth() {
        let mut prev: Option<BigRational> = None;
        for n in 2..=30 {
            let report = gap_report(n);
            if let Some(p) = &prev {
                assert!(&report.ratio > p, "ratio not increasing at n={n}");
            }
            if n >= 6 {
                let lower =
                    BigRational::new(BigInt::from(2u32).pow(n as u32), BigInt::from(n as u32 + 1));
                assert!(report.ratio > lower, "n={n}");
            }
            prev = Some(report.ratio);
        }
    }

    #[test]
    fn telescoped_sums() {
        // X = P^1 x P^n full space, p = 2n+1: even sum = n+1
        for n in 1..=4usize {
            let p = 2 * n + 1;
            let sig = BlockSignature::new(vec![2 * (2 * n + 2) - 1, n]);
            let join_p = ppoly_multiproj(&sig);
            let betti: Vec<BigInt> = (0..=join_p.degree() as usize)
                .map(|i| join_p.coeff(i))
                .collect();
            let (even, odd) = telescoped_betti_sums(&betti, p).unwrap();
            assert_eq!(even, BigInt::from(n + 1));
            assert_eq!(odd, BigInt::zero());
        }
        // p = 1: even sum = b_0
        let (even, odd) = telescoped_betti_sums(&[BigInt::from(7)], 1).unwrap();
        assert_eq!(even, BigInt::from(7));
        assert_eq!(odd, BigInt::zero());
        // insufficient degrees
        assert!(matches!(
            telescoped_betti_sums(&[BigInt::one()], 3),
            Err(CompareError::InsufficientDegrees { .. })
        ));
        assert!(matches!(
            telescoped_betti_sums(&[BigInt::one()], 2),
            Err(CompareError::InvalidArgument(_))
        ));
    }

    #[test]
    fn join_defect_values() {
        let r = join_defect_betti(3, 5, 1).unwrap();
        assert_eq!(r.threshold, 4);
        assert_eq!(r.betti, vec![1, 0, 1, 0]);
        assert_eq!(r.maximizing_p, 4);

        let r2 = join_defect_betti(3, 4, 2).unwrap();
        assert_eq!(r2.threshold, 1);
        assert_eq!(r2.betti, vec![1]);

        assert!(join_defect_betti(3, 2, 2).is_err());
    }

    #[test]
    fn defect_threshold_is_the_window_maximizer() {
        for n in 2..=12 {
            for r in 1..n {
                if (n - r) / r == 0 {
                    continue;
                }
                let t = (n - r) / r;
                assert_eq!(
                    defect_window(t, n, r),
                    defect_window_max(n, r),
                    "n={n} r={r}"
                );
            }
        }
    }

    #[test]
    fn congruence_on_the_full_product() {
        let psi = parse_formula("(blocks (w 1) (x 1)) (and)").unwrap();
        for p in [2, 3, 5] {
            let report =
                verify_poincare_congruence(&psi, p, 4096, &BettiBudget::default()).unwrap();
            assert!(report.holds, "p={p}: {:?}", report.to_json());
        }
    }

    #[test]
    fn congruence_on_two_disjoint_graphs() {
        // single-point fibers over two base points
        let psi = parse_formula(
            "(blocks (w 1) (x 1)) (or (and (=0 w0_0) (=0 x0_0)) (and (=0 w0_1) (=0 x0_1)))",
        )
        .unwrap();
        for p in [2, 3, 5] {
            let report =
                verify_poincare_congruence(&psi, p, 4096, &BettiBudget::default()).unwrap();
            assert!(report.holds, "p={p}");
        }
    }

    #[test]
    fn connectivity_small_instances() {
        let two_points = parse_formula("(blocks (x 1)) (or (=0 x0_0) (=0 x0_1))").unwrap();
        for p in 1..=3 {
            let report =
                verify_join_connectivity(&two_points, p, 100_000, &BettiBudget::default()).unwrap();
            assert!(report.holds, "p={p}");
        }
        let full_p1 = parse_formula("(blocks (x 1)) (and)").unwrap();
        let report =
            verify_join_connectivity(&full_p1, 2, 100_000, &BettiBudget::default()).unwrap();
        assert!(report.holds);
    }
}
