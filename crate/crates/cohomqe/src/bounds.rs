//! Explicit bounds on Euler characteristics and sums of Betti numbers of
//! affine and projective algebraic sets, in terms of ambient dimension `N`,
//! number of equations `r`, and degree bound `d`.
//!
//! Three Euler-characteristic bounds `E(N, r, d)` are available:
//!
//! - `Bombieri`: `(4(1+d)+5)^{N+r}`;
//! - `AdolphsonSperber`: `2^r (r+1+rd)^N`;
//! - `Char0OPTM`: `2^r (1+rd)(1+2rd)^{2N+1}`, valid in characteristic zero.
//!
//! On top of any such `E` sit the derived bounds
//! `A(N,r,d) = E(N,r,d) + 2 + 2 Σ_{n<N} E(n,r,d)` and
//! `B(N,r,d) = 1 + Σ_{∅≠S⊆[r]} A(N+1, 1, 1+d·|S|)`, which bound compactly
//! supported Betti sums of affine sets; the projective bound accumulates
//! `1 + Σ_{n≤N} B(n,r,d)`. For bi-projective sets and images of projections,
//! the sums run over degree lattices with `B(0) = 1` by convention. All
//! internal calls use the argument order `B(dimension, equations, degree)`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundMethod {
    Bombieri,
    AdolphsonSperber,
    /// Characteristic-zero bound; the caller asserts the characteristic.
    Char0OPTM,
}

impl BoundMethod {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bombieri" => Some(BoundMethod::Bombieri),
            "as" | "adolphson-sperber" => Some(BoundMethod::AdolphsonSperber),
            "char0" => Some(BoundMethod::Char0OPTM),
            _ => None,
        }
    }
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundMethod::Bombieri => write!(f, "bombieri"),
            BoundMethod::AdolphsonSperber => write!(f, "as"),
            BoundMethod::Char0OPTM => write!(f, "char0"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvalidArgument(pub String);

impl fmt::Display for InvalidArgument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid argument: {}", self.0)
    }
}

impl std::error::Error for InvalidArgument {}

/// Evaluation result with the intermediate values that produced it.
#[derive(Clone, Debug)]
pub struct BoundResult {
    pub value: BigUint,
    pub method: BoundMethod,
    pub arguments: Vec<(String, String)>,
    pub formula_trace: Vec<(String, BigUint)>,
}

impl BoundResult {
    pub fn to_json(&self) -> Value {
        json!({
            "value": self.value.to_string(),
            "method": self.method.to_string(),
            "arguments": self.arguments.iter().map(|(k, v)| json!({"name": k, "value": v})).collect::<Vec<_>>(),
            "trace": self.formula_trace.iter().map(|(k, v)| json!({"term": k, "value": v.to_string()})).collect::<Vec<_>>(),
        })
    }
}

fn upow(base: BigUint, exp: usize) -> BigUint {
    let mut acc = BigUint::one();
    for _ in 0..exp {
        acc *= &base;
    }
    acc
}

fn u(v: usize) -> BigUint {
    BigUint::from(v)
}

/// `E(N, r, d)`: the chosen Euler-characteristic bound. `N ≥ 1`, `r ≥ 1`.
pub fn euler_bound(
    n: usize,
    r: usize,
    d: usize,
    method: BoundMethod,
) -> Result<BigUint, InvalidArgument> {
    if n == 0 || r == 0 {
        return Err(InvalidArgument(format!(
            "euler bound needs N >= 1 and r >= 1 (got N={n}, r={r})"
        )));
    }
    Ok(match method {
        BoundMethod::Bombieri => upow(u(4 * (1 + d) + 5), n + r),
        BoundMethod::AdolphsonSperber => upow(u(2), r) * upow(u(r + 1 + r * d), n),
        BoundMethod::Char0OPTM => upow(u(2), r) * u(1 + r * d) * upow(u(1 + 2 * r * d), 2 * n + 1),
    })
}

/// `A(N, r, d) = E(N,r,d) + 2 + 2 Σ_{n=1}^{N-1} E(n,r,d)`; the sum is empty
/// for `N = 1`.
pub fn katz_a(
    n: usize,
    r: usize,
    d: usize,
    method: BoundMethod,
) -> Result<BigUint, InvalidArgument> {
    if n == 0 {
        return Err(InvalidArgument("A needs N >= 1".into()));
    }
    let mut acc = euler_bound(n, r, d, method)? + u(2);
    for m in 1..n {
        acc += u(2) * euler_bound(m, r, d, method)?;
    }
    Ok(acc)
}

/// `B(N, r, d) = 1 + Σ_{∅≠S⊆[r]} A(N+1, 1, 1+d·|S|)`, collapsed to binomial
/// weights `C(r,s)`.
pub fn katz_b(
    n: usize,
    r: usize,
    d: usize,
    method: BoundMethod,
) -> Result<BigUint, InvalidArgument> {
    if r == 0 {
        return Err(InvalidArgument("B needs r >= 1".into()));
    }
    let mut acc = BigUint::one();
    let mut binom = BigUint::one();
    for s in 1..=r {
        // C(r, s) updated incrementally
        binom = binom * u(r - s + 1) / u(s);
        acc += &binom * katz_a(n + 1, 1, 1 + d * s, method)?;
    }
    Ok(acc)
}

/// Literal subset enumeration of `B`, the independent oracle for the binomial
/// collapse (practical for `r ≤ ~16`).
pub fn katz_b_subset_enumeration(
    n: usize,
    r: usize,
    d: usize,
    method: BoundMethod,
) -> Result<BigUint, InvalidArgument> {
    if r == 0 {
        return Err(InvalidArgument("B needs r >= 1".into()));
    }
    let mut acc = BigUint::one();
    for mask in 1u64..(1 << r) {
        let size = mask.count_ones() as usize;
        acc += katz_a(n + 1, 1, 1 + d * size, method)?;
    }
    Ok(acc)
}

/// Affine Betti-sum bound, `h_c(X) ≤ B(N, r, d)`.
pub fn affine_betti_bound(
    n: usize,
    r: usize,
    d: usize,
    method: BoundMethod,
) -> Result<BigUint, InvalidArgument> {
    if n == 0 {
        return Err(InvalidArgument("affine bound needs N >= 1".into()));
    }
    katz_b(n, r, d, method)
}

/// Projective Betti-sum bound, `1 + Σ_{n=1}^{N} B(n, r, d)`.
pub fn projective_betti_bound(
    n: usize,
    r: usize,
    d: usize,
    method: BoundMethod,
) -> Result<BigUint, InvalidArgument> {
    if n == 0 {
        return Err(InvalidArgument("projective bound needs N >= 1".into()));
    }
    let mut acc = BigUint::one();
    for m in 1..=n {
        acc += katz_b(m, r, d, method)?;
    }
    Ok(acc)
}

/// Characteristic-zero bound on `h` (not `h_c`) for affine sets:
/// `d (2d−1)^{2N−1}`.
pub fn affine_h_bound_char0(n: usize, d: usize) -> Result<BigUint, InvalidArgument> {
    if n == 0 || d == 0 {
        return Err(InvalidArgument(
            "characteristic-zero h bound needs N >= 1 and d >= 1".into(),
        ));
    }
    Ok(u(d) * upow(u(2 * d - 1), 2 * n - 1))
}

/// `B̃(k)`: `1` for `k = 0`, otherwise `B(k, r, d)`.
fn b_tilde(k: usize, r: usize, d: usize, method: BoundMethod) -> Result<BigUint, InvalidArgument> {
    if k == 0 {
        Ok(BigUint::one())
    } else {
        katz_b(k, r, d, method)
    }
}

/// Betti-sum bound for a bi-projective set in `P^N × P^M` cut by `r`
/// bi-homogeneous equations of bi-degree `(d1, d2)`:
/// `Σ_{0≤i≤N, 0≤j≤M} B̃(i+j)` with `r` equations of degree `d1+d2`.
pub fn biprojective_bound(
    n: usize,
    m: usize,
    r: usize,
    d1: usize,
    d2: usize,
    method: BoundMethod,
) -> Result<BigUint, InvalidArgument> {
    if r == 0 {
        return Err(InvalidArgument("biprojective bound needs r >= 1".into()));
    }
    let mut acc = BigUint::zero();
    for i in 0..=n {
        for j in 0..=m {
            acc += b_tilde(i + j, r, d1 + d2, method)?;
        }
    }
    Ok(acc)
}

/// Betti-sum bound for the image of a bi-projective set under the projection,
/// through the `p`-fold relative join:
/// `(2/p) Σ_{0≤i≤(N+1)(p+1)−1, 0≤j≤M} B̃(i+j)` with `r(p+1)` equations of
/// degree `d1+d2`. Returned both as the exact rational and as its ceiling
/// (Betti sums are integers, but `2/p` of an integer need not be).
pub fn image_betti_bound(
    n: usize,
    m: usize,
    r: usize,
    d1: usize,
    d2: usize,
    p: usize,
    method: BoundMethod,
) -> Result<(BigRational, BigInt), InvalidArgument> {
    if p == 0 {
        return Err(InvalidArgument("image bound needs p >= 1".into()));
    }
    if r == 0 {
        return Err(InvalidArgument("image bound needs r >= 1".into()));
    }
    let mut acc = BigUint::zero();
    let i_max = (n + 1) * (p + 1) - 1;
    for i in 0..=i_max {
        for j in 0..=m {
            acc += b_tilde(i + j, r * (p + 1), d1 + d2, method)?;
        }
    }
    let exact = BigRational::new(BigInt::from(2u32) * BigInt::from(acc), BigInt::from(p));
    let ceiling = exact.ceil().to_integer();
    Ok((exact, ceiling))
}

/// Evaluation with an argument echo and the E trace, for reports.
pub fn euler_bound_result(
    n: usize,
    r: usize,
    d: usize,
    method: BoundMethod,
) -> Result<BoundResult, InvalidArgument> {
    let value = euler_bound(n, r, d, method)?;
    Ok(BoundResult {
        value: value.clone(),
        method,
        arguments: vec![
            ("N".into(), n.to_string()),
            ("r".into(), r.to_string()),
            ("d".into(), d.to_string()),
        ],
        formula_trace: vec![(format!("E({n},{r},{d})"), value)],
    })
}

/// `B` with its `A`-call trace.
pub fn katz_b_result(
    n: usize,
    r: usize,
    d: usize,
    method: BoundMethod,
) -> Result<BoundResult, InvalidArgument> {
    let value = katz_b(n, r, d, method)?;
    let mut trace = Vec::new();
    for s in 1..=r {
        trace.push((
            format!("A({},1,{})", n + 1, 1 + d * s),
            katz_a(n + 1, 1, 1 + d * s, method)?,
        ));
    }
    Ok(BoundResult {
        value,
        method,
        arguments: vec![
            ("N".into(), n.to_string()),
            ("r".into(), r.to_string()),
            ("d".into(), d.to_string()),
        ],
        formula_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const AS: BoundMethod = BoundMethod::AdolphsonSperber;
    const BOMB: BoundMethod = BoundMethod::Bombieri;
    const CH0: BoundMethod = BoundMethod::Char0OPTM;

    fn v(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn euler_bound_values() {
        assert_eq!(euler_bound(1, 1, 1, BOMB).unwrap(), v(169));
        assert_eq!(euler_bound(1, 1, 1, AS).unwrap(), v(6));
        assert_eq!(euler_bound(2, 1, 2, AS).unwrap(), v(32));
        assert_eq!(euler_bound(1, 1, 1, CH0).unwrap(), v(2 * 2 * 27));
        assert!(euler_bound(0, 1, 1, AS).is_err());
    }

    #[test]
    fn katz_a_values() {
        assert_eq!(katz_a(1, 1, 1, AS).unwrap(), v(8));
        assert_eq!(katz_a(2, 1, 2, AS).unwrap(), v(50));
        assert_eq!(katz_a(1, 1, 1, BOMB).unwrap(), v(171));
    }

    #[test]
    fn katz_b_values() {
        assert_eq!(katz_b(1, 1, 1, AS).unwrap(), v(51));
        assert_eq!(katz_b(1, 2, 1, AS).unwrap(), v(173));
    }

    #[test]
    fn katz_b_binomial_collapse_matches_subset_enumeration() {
        for r in 1..=6 {
            for n in 1..=4 {
                for d in 0..=4 {
                    for method in [AS, BOMB, CH0] {
                        assert_eq!(
                            katz_b(n, r, d, method).unwrap(),
                            katz_b_subset_enumeration(n, r, d, method).unwrap(),
                            "n={n} r={r} d={d} {method}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn affine_and_projective_bounds() {
        assert_eq!(
            affine_betti_bound(1, 1, 1, AS).unwrap(),
            katz_b(1, 1, 1, AS).unwrap()
        );
        assert_eq!(projective_betti_bound(1, 1, 1, AS).unwrap(), v(52));
    }

    #[test]
    fn biprojective_values() {
        assert_eq!(
            biprojective_bound(0, 0, 1, 1, 1, AS).unwrap(),
            BigUint::one()
        );
        let expect = BigUint::one() + katz_b(1, 1, 2, AS).unwrap();
        assert_eq!(biprojective_bound(1, 0, 1, 1, 1, AS).unwrap(), expect);
    }

    #[test]
    fn image_bound_values() {
        // N=0, M=0, r=1, d1=d2=1, p=1: 2 (B~(0) + B~(1)) = 2 (1 + B(1,2,2))
        let (exact, ceiling) = image_betti_bound(0, 0, 1, 1, 1, 1, AS).unwrap();
        let b122 = katz_b(1, 2, 2, AS).unwrap();
        let expect = BigInt::from(2u32) * (BigInt::from(1u32) + BigInt::from(b122));
        assert_eq!(exact, BigRational::from_integer(expect.clone()));
        assert_eq!(ceiling, expect);
        // a p that does not divide the doubled sum exercises the ceiling
        let (exact3, ceil3) = image_betti_bound(0, 0, 1, 1, 1, 3, AS).unwrap();
        assert!(BigRational::from_integer(ceil3.clone()) >= exact3);
        assert!(BigRational::from_integer(ceil3 - BigInt::from(1u32)) < exact3);
    }

    #[test]
    fn char0_h_bound() {
        assert_eq!(affine_h_bound_char0(1, 2).unwrap(), v(2 * 3));
        assert!(affine_h_bound_char0(0, 2).is_err());
    }

    #[test]
    fn monotone_on_the_grid() {
        for method in [AS, BOMB, CH0] {
            let grid: Vec<Vec<Vec<BigUint>>> = (1..=5usize)
                .map(|n| {
                    (1..=5usize)
                        .map(|r| {
                            (1..=5usize)
                                .map(|d| katz_b(n, r, d, method).unwrap())
                                .collect()
                        })
                        .collect()
                })
                .collect();
            for n in 0..5 {
                for r in 0..5 {
                    for d in 0..5 {
                        let here = &grid[n][r][d];
                        assert!(here > &BigUint::zero());
                        if n + 1 < 5 {
                            assert!(&grid[n + 1][r][d] >= here, "{method} N");
                        }
                        if r + 1 < 5 {
                            assert!(&grid[n][r + 1][d] >= here, "{method} r");
                        }
                        if d + 1 < 5 {
                            assert!(&grid[n][r][d + 1] >= here, "{method} d");
                        }
                    }
                }
            }
        }
    }
}
