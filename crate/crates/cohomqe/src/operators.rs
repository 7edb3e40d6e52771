//! The polynomial-operator algebra turning the pseudo-Poincare polynomial of a
//! join formula into that of the quantified formula.
//!
//! The primitive operators are complementation `Rec`, low-degree truncation
//! `Trunc`, multiplication by `(1−T)^N`, and the even/odd fold `Pseudo`. For a
//! quantifier word `ω` the composite is assembled stage by stage:
//!
//! ```text
//! stage i (∃):  Trunc_{d_{i-1}, d_i+N_i} ∘ (1−T)^{N_i}
//! stage i (∀):  Rec_{𝐦_{i-1}} ∘ Trunc_{d_{i-1}, d_i+N_i} ∘ (1−T)^{N_i} ∘ Rec_{𝐦_i}
//! ```
//!
//! applied innermost (stage n) first. `Rec` uses the reversal exponent `|𝐧|`:
//! `Rec_𝐧(Q) = Q(P^𝐧) − T^{|𝐧|} Q(1/T)`, the unique choice under which `Rec` is
//! an involution on polynomials of degree at most `|𝐧|` (the pseudo-Poincare
//! polynomial of `P^𝐧` is palindromic of degree exactly `|𝐧|`).

use std::fmt;

use num_traits::ToPrimitive;

use crate::formula::Quantifier;
use crate::join::{JoinError, JoinParams};
use crate::polyring::{one_minus_t_pow, pseudo, qpoly_multiproj, BlockSignature, IntPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OperatorError {
    DegreeTooHigh {
        stage: usize,
        degree: isize,
        bound: usize,
    },
    LengthMismatch {
        expected: usize,
        got: usize,
    },
    ParamsTooLarge(String),
    UnexpectedValue(IntPoly),
}

impl fmt::Display for OperatorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorError::DegreeTooHigh {
                stage,
                degree,
                bound,
            } => write!(
                f,
                "degree {degree} exceeds bound {bound} at operator stage {stage}"
            ),
            OperatorError::LengthMismatch { expected, got } => {
                write!(f, "quantifier word has length {got}, expected {expected}")
            }
            OperatorError::ParamsTooLarge(msg) => write!(f, "{msg}"),
            OperatorError::UnexpectedValue(q) => {
                write!(f, "sentence evaluation produced {q}, expected 0 or 1")
            }
        }
    }
}

impl std::error::Error for OperatorError {}

impl From<JoinError> for OperatorError {
    fn from(e: JoinError) -> Self {
        OperatorError::ParamsTooLarge(e.to_string())
    }
}

/// Word over {∃, ∀}, outermost quantifier first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantifierWord(pub Vec<Quantifier>);

impl QuantifierWord {
    /// Parses a compact word over {E, A}: E = ∃, A = ∀, outermost first.
    pub fn parse(s: &str) -> Option<Self> {
        let mut word = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                'E' | 'e' => word.push(Quantifier::Exists),
                'A' | 'a' => word.push(Quantifier::Forall),
                _ => return None,
            }
        }
        Some(QuantifierWord(word))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for QuantifierWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in &self.0 {
            match q {
                Quantifier::Exists => write!(f, "E")?,
                Quantifier::Forall => write!(f, "A")?,
            }
        }
        Ok(())
    }
}

/// One primitive polynomial operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Rec(BlockSignature),
    Trunc { keep: usize, domain: usize },
    MulOneMinusTPow(usize),
    Pseudo,
}

impl PolyOp {
    /// Maximum degree accepted, if the operator restricts its domain.
    fn domain_bound(&self) -> Option<usize> {
        match self {
            PolyOp::Rec(sig) => Some(sig.total()),
            PolyOp::Trunc { domain, .. } => Some(*domain),
            PolyOp::MulOneMinusTPow(_) | PolyOp::Pseudo => None,
        }
    }

    /// Degree bound of the output given an input degree bound.
    fn out_bound(&self, in_bound: usize) -> usize {
        match self {
            PolyOp::Rec(sig) => sig.total(),
            PolyOp::Trunc { keep, .. } => (*keep).min(in_bound),
            PolyOp::MulOneMinusTPow(n) => in_bound + n,
            PolyOp::Pseudo => in_bound.div_ceil(2),
        }
    }

    fn apply(&self, q: &IntPoly) -> Result<IntPoly, (isize, usize)> {
        match self {
            PolyOp::Rec(sig) => rec_inner(q, sig),
            PolyOp::Trunc { keep, domain } => {
                if q.degree() > *domain as isize {
                    return Err((q.degree(), *domain));
                }
                Ok(q.truncate_deg(*keep))
            }
            PolyOp::MulOneMinusTPow(n) => Ok(&one_minus_t_pow(*n) * q),
            PolyOp::Pseudo => Ok(pseudo(q)),
        }
    }
}

fn rec_inner(q: &IntPoly, sig: &BlockSignature) -> Result<IntPoly, (isize, usize)> {
    let e = sig.total();
    let reversed = q.reverse(e).map_err(|err| (err.degree, err.bound))?;
    Ok(&qpoly_multiproj(sig) - &reversed)
}

impl fmt::Display for PolyOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyOp::Rec(sig) => write!(f, "Rec_{}", display_sig_runs(sig)),
            PolyOp::Trunc { keep, domain } => write!(f, "Trunc_{{{keep},{domain}}}"),
            PolyOp::MulOneMinusTPow(n) => {
                if *n == 1 {
                    write!(f, "(1-T)")
                } else {
                    write!(f, "(1-T)^{n}")
                }
            }
            PolyOp::Pseudo => write!(f, "Pseudo"),
        }
    }
}

/// Run-length block display like `(1,7,35^4)`.
fn display_sig_runs(sig: &BlockSignature) -> String {
    let mut out = String::from("(");
    let dims = sig.dims();
    let mut i = 0;
    let mut first = true;
    while i < dims.len() {
        let mut j = i;
        while j < dims.len() && dims[j] == dims[i] {
            j += 1;
        }
        if !first {
            out.push(',');
        }
        first = false;
        if j - i > 1 {
            out.push_str(&format!("{}^{}", dims[i], j - i));
        } else {
            out.push_str(&dims[i].to_string());
        }
        i = j;
    }
    out.push(')');
    out
}

/// Composable operator pipeline; `stages[0]` is outermost, application runs
/// right-to-left (innermost first), matching functional composition order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorSpec {
    stages: Vec<PolyOp>,
}

impl OperatorSpec {
    pub fn identity() -> Self {
        OperatorSpec { stages: Vec::new() }
    }

    /// Builds a spec, checking symbolically that the degree bound flowing out
    /// of each stage fits the next stage's domain.
    pub fn new(stages: Vec<PolyOp>, input_bound: usize) -> Result<Self, OperatorError> {
        let mut bound = input_bound;
        for (idx, op) in stages.iter().enumerate().rev() {
            if let Some(dom) = op.domain_bound() {
                if bound > dom {
                    return Err(OperatorError::DegreeTooHigh {
                        stage: idx,
                        degree: bound as isize,
                        bound: dom,
                    });
                }
            }
            bound = op.out_bound(bound);
        }
        Ok(OperatorSpec { stages })
    }

    pub fn stages(&self) -> &[PolyOp] {
        &self.stages
    }

    /// Applies the stages innermost to outermost, exactly.
    pub fn apply(&self, q: &IntPoly) -> Result<IntPoly, OperatorError> {
        self.apply_traced(q, &mut |_, _| {})
    }

    /// Like [`apply`](Self::apply) but reporting each intermediate polynomial
    /// (stage index in `stages`, value after that stage).
    pub fn apply_traced(
        &self,
        q: &IntPoly,
        observe: &mut dyn FnMut(usize, &IntPoly),
    ) -> Result<IntPoly, OperatorError> {
        let mut acc = q.clone();
        for (idx, op) in self.stages.iter().enumerate().rev() {
            acc = op
                .apply(&acc)
                .map_err(|(degree, bound)| OperatorError::DegreeTooHigh {
                    stage: idx,
                    degree,
                    bound,
                })?;
            observe(idx, &acc);
        }
        Ok(acc)
    }
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.stages.is_empty() {
            return write!(f, "id");
        }
        for (i, op) in self.stages.iter().enumerate() {
            if i > 0 {
                write!(f, " o ")?;
            }
            write!(f, "{op}")?;
        }
        Ok(())
    }
}

/// Complementation inside the product of projective spaces:
/// `rec(q, 𝐧) = Q(P^𝐧) − T^{|𝐧|} q(1/T)`. An involution on degrees `≤ |𝐧|`.
pub fn rec(q: &IntPoly, sig: &BlockSignature) -> Result<IntPoly, OperatorError> {
    rec_inner(q, sig).map_err(|(degree, bound)| OperatorError::DegreeTooHigh {
        stage: 0,
        degree,
        bound,
    })
}

/// Assembles the composite operator for a quantifier word over the given join
/// parameters. Stage `i` uses `d_{i-1}`, `d_i`, `N_i` and the level signatures
/// `𝐦_{i-1}`, `𝐦_i`; the full composition is stage 1 ∘ … ∘ stage n.
pub fn build_f_omega(
    params: &JoinParams,
    word: &QuantifierWord,
) -> Result<OperatorSpec, OperatorError> {
    let n = params.bound_count();
    if word.len() != n {
        return Err(OperatorError::LengthMismatch {
            expected: n,
            got: word.len(),
        });
    }
    let mut stages = Vec::new();
    for i in 1..=n {
        let d_prev = params
            .threshold(i - 1)
            .to_usize()
            .ok_or_else(|| OperatorError::ParamsTooLarge(format!("d_{} too large", i - 1)))?;
        let d_i = params
            .threshold(i)
            .to_usize()
            .ok_or_else(|| OperatorError::ParamsTooLarge(format!("d_{i} too large")))?;
        let n_i = params
            .copies(i)
            .to_usize()
            .ok_or_else(|| OperatorError::ParamsTooLarge(format!("N_{i} too large")))?;
        let trunc = PolyOp::Trunc {
            keep: d_prev,
            domain: d_i + n_i,
        };
        let mul = PolyOp::MulOneMinusTPow(n_i);
        match word.0[i - 1] {
            Quantifier::Exists => {
                stages.push(trunc);
                stages.push(mul);
            }
            Quantifier::Forall => {
                stages.push(PolyOp::Rec(params.signature(i - 1)?));
                stages.push(trunc);
                stages.push(mul);
                stages.push(PolyOp::Rec(params.signature(i)?));
            }
        }
    }
    let input_bound = params
        .threshold(n)
        .to_usize()
        .ok_or_else(|| OperatorError::ParamsTooLarge(format!("d_{n} too large")))?;
    OperatorSpec::new(stages, input_bound)
}

/// Applies a built spec to a polynomial.
pub fn apply_operator_spec(spec: &OperatorSpec, q: &IntPoly) -> Result<IntPoly, OperatorError> {
    spec.apply(q)
}

/// The quantifier-elimination contract: when `q_join` is the pseudo-Poincare
/// polynomial of the join formula's realization, the result is the
/// pseudo-Poincare polynomial of the quantified formula's realization.
pub fn qe_pseudo_poincare(
    q_join: &IntPoly,
    params: &JoinParams,
    word: &QuantifierWord,
) -> Result<IntPoly, OperatorError> {
    let spec = build_f_omega(params, word)?;
    spec.apply(q_join)
}

/// Sentence decision (no free blocks): the pipeline value is 1 for a true
/// sentence and 0 for a false one; anything else means `q_join` was not the
/// pseudo-Poincare polynomial of a valid join realization.
pub fn decide_sentence(
    q_join: &IntPoly,
    params: &JoinParams,
    word: &QuantifierWord,
) -> Result<bool, OperatorError> {
    assert_eq!(
        params.free_count(),
        0,
        "decide_sentence requires a sentence (no free blocks)"
    );
    let value = qe_pseudo_poincare(q_join, params, word)?;
    if value.is_one() {
        Ok(true)
    } else if value.is_zero() {
        Ok(false)
    } else {
        Err(OperatorError::UnexpectedValue(value))
    }
}
