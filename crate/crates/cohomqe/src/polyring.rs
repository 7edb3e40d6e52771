//! Exact univariate polynomial arithmetic over arbitrary-precision integers.
//!
//! [`IntPoly`] is the carrier for Poincare polynomials, pseudo-Poincare
//! polynomials and Grothendieck classes throughout the crate. Coefficients are
//! stored densely in ascending degree; the zero polynomial is the empty
//! coefficient vector, which makes equality a plain `Vec` comparison.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Dense univariate polynomial over `BigInt`, ascending degree.
///
/// Invariant: the last stored coefficient is nonzero; zero is the empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

/// Error raised when a reversal or Rec-style operation receives a polynomial
/// whose degree exceeds the operation's domain bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeTooHigh {
    pub degree: isize,
    pub bound: usize,
}

impl fmt::Display for DegreeTooHigh {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "polynomial degree {} exceeds the allowed bound {}",
            self.degree, self.bound
        )
    }
}

impl std::error::Error for DegreeTooHigh {}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        let mut p = IntPoly { coeffs: vec![c] };
        p.normalize();
        p
    }

    /// Builds a polynomial from ascending coefficients, trimming trailing zeros.
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        let mut p = IntPoly { coeffs };
        p.normalize();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// The monomial `c * T^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        if c.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c;
        IntPoly { coeffs }
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree; −1 for the zero polynomial (internal bookkeeping convention).
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    /// Degree clamped to 0, the form used in serialized reports.
    pub fn degree_for_report(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `T^i` (zero beyond the stored range).
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    /// `T^e * q(1/T)`: coefficient `i` of the result is coefficient `e − i` of `q`.
    pub fn reverse(&self, e: usize) -> Result<IntPoly, DegreeTooHigh> {
        if self.degree() > e as isize {
            return Err(DegreeTooHigh {
                degree: self.degree(),
                bound: e,
            });
        }
        let mut coeffs = vec![BigInt::zero(); e + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[e - i] = c.clone();
        }
        Ok(IntPoly::from_coeffs(coeffs))
    }

    /// Drops every coefficient of index `> m`.
    pub fn truncate_deg(&self, m: usize) -> IntPoly {
        IntPoly::from_coeffs(self.coeffs.iter().take(m + 1).cloned().collect())
    }

    /// Exact Horner evaluation.
    pub fn eval(&self, z: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Splits into even/odd parts: `p(T) = even(T²) + T·odd(T²)`.
    pub fn even_odd_split(&self) -> (IntPoly, IntPoly) {
        let even = self.coeffs.iter().step_by(2).cloned().collect();
        let odd = self.coeffs.iter().skip(1).step_by(2).cloned().collect();
        (IntPoly::from_coeffs(even), IntPoly::from_coeffs(odd))
    }

    /// Substitutes `T ↦ T²` (used to map Grothendieck classes to Poincare form).
    pub fn stretch_double(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); 2 * (self.coeffs.len() - 1) + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[2 * i] = c.clone();
        }
        IntPoly::from_coeffs(coeffs)
    }

    pub fn has_negative_coeff(&self) -> bool {
        self.coeffs.iter().any(|c| c.is_negative())
    }

    /// Human-readable form like `1 - 2*T + T^3`.
    pub fn display_expr(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    out.push('-');
                }
                first = false;
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let show_coeff = !mag.is_one() || i == 0;
            if show_coeff {
                out.push_str(&mag.to_string());
            }
            if i > 0 {
                if show_coeff {
                    out.push('*');
                }
                out.push('T');
                if i > 1 {
                    out.push_str(&format!("^{i}"));
                }
            }
        }
        out
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_expr())
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            let mut c = self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero);
            if let Some(d) = rhs.coeffs.get(i) {
                c += d;
            }
            coeffs.push(c);
        }
        IntPoly::from_coeffs(coeffs)
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            let mut c = self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero);
            if let Some(d) = rhs.coeffs.get(i) {
                c -= d;
            }
            coeffs.push(c);
        }
        IntPoly::from_coeffs(coeffs)
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        IntPoly::from_coeffs(coeffs)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

// Serialized as a JSON array of decimal strings so big coefficients survive
// every JSON consumer bit-exactly.
impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        strings.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let strings = Vec::<String>::deserialize(deserializer)?;
        let mut coeffs = Vec::with_capacity(strings.len());
        for s in &strings {
            let c: BigInt = s
                .parse()
                .map_err(|_| D::Error::custom(format!("invalid integer literal {s:?}")))?;
            coeffs.push(c);
        }
        Ok(IntPoly::from_coeffs(coeffs))
    }
}

/// Projective dimensions of the blocks of a product of projective spaces.
///
/// The empty signature is the zero-block product, a single point; it shows up
/// as the level-0 signature of sentence joins.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockSignature {
    dims: Vec<usize>,
}

impl BlockSignature {
    pub fn new(dims: Vec<usize>) -> Self {
        BlockSignature { dims }
    }

    pub fn empty() -> Self {
        BlockSignature { dims: Vec::new() }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn dim(&self, block: usize) -> usize {
        self.dims[block]
    }

    /// Sum of the block dimensions.
    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Number of homogeneous coordinates, `Σ (n_i + 1)`.
    pub fn coord_count(&self) -> usize {
        self.dims.iter().map(|d| d + 1).sum()
    }

    /// Offset of a block's first coordinate in the concatenated coordinate vector.
    pub fn coord_offset(&self, block: usize) -> usize {
        self.dims[..block].iter().map(|d| d + 1).sum()
    }
}

impl fmt::Display for BlockSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.dims.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

pub fn poly_add(a: &IntPoly, b: &IntPoly) -> IntPoly {
    a + b
}

pub fn poly_sub(a: &IntPoly, b: &IntPoly) -> IntPoly {
    a - b
}

pub fn poly_mul(a: &IntPoly, b: &IntPoly) -> IntPoly {
    a * b
}

pub fn poly_reverse(q: &IntPoly, e: usize) -> Result<IntPoly, DegreeTooHigh> {
    q.reverse(e)
}

pub fn poly_trunc(q: &IntPoly, m: usize) -> IntPoly {
    q.truncate_deg(m)
}

pub fn poly_eval_int(q: &IntPoly, z: &BigInt) -> BigInt {
    q.eval(z)
}

/// `∏_i (1 + T + … + T^{n_i})`, the pseudo-Poincare polynomial of the product
/// of projective spaces with the given block dimensions. Palindromic of degree
/// equal to the signature total.
pub fn qpoly_multiproj(sig: &BlockSignature) -> IntPoly {
    let mut acc = IntPoly::one();
    for &n in sig.dims() {
        let ones = IntPoly::from_coeffs(vec![BigInt::one(); n + 1]);
        acc = &acc * &ones;
    }
    acc
}

/// Poincare polynomial of the product of projective spaces:
/// `∏_i (1 + T² + … + T^{2 n_i})`.
pub fn ppoly_multiproj(sig: &BlockSignature) -> IntPoly {
    qpoly_multiproj(sig).stretch_double()
}

/// Even/odd fold: with `p = even(T²) + T·odd(T²)`, returns `even(T) − T·odd(T)`.
pub fn pseudo(p: &IntPoly) -> IntPoly {
    let (even, odd) = p.even_odd_split();
    let shifted_odd = &IntPoly::monomial(BigInt::one(), 1) * &odd;
    &even - &shifted_odd
}

/// Binomial expansion of `(1 − T)^n`.
pub fn one_minus_t_pow(n: usize) -> IntPoly {
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    for k in 0..=n {
        coeffs.push(if k % 2 == 0 { c.clone() } else { -c.clone() });
        // next binomial coefficient C(n, k+1)
        if k < n {
            c = c * BigInt::from(n - k) / BigInt::from(k + 1);
        }
    }
    IntPoly::from_coeffs(coeffs)
}
