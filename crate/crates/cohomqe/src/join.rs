//! Join-formula construction.
//!
//! Given a quantifier-free proper formula with `m` free and `n` bound blocks,
//! the join construction replicates the bound blocks into towers of larger
//! blocks, producing a single quantifier-free conjunction whose realization
//! carries enough connectivity to recover the quantified formula's
//! pseudo-Poincare polynomial by polynomial operators alone.
//!
//! The derived quantities follow the recurrences
//!
//! ```text
//! d_0 = Σ e_i,   N_1 = 1,
//! m_j = 2(d_{j-1}+1)(f_j+1) - 1,
//! d_j = d_{j-1} + N_j m_j,
//! N_j = 2 N_{j-1} (d_{j-2}+1)          (j ≥ 2)
//! ```
//!
//! so the level-`j` copies are indexed by tuples
//! `(i_1,…,i_{j-1}) ∈ [0,2d_0+1]×⋯×[0,2d_{j-2}+1]`, and the sub-tuple for
//! index `i_j` occupies coordinates `[i_j (f_j+1), (i_j+1)(f_j+1))` of its
//! copy.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Value};

use crate::formula::{conjoin, substitute_blocks, BlockMapping, FormulaError, ProperFormula};
use crate::polyring::BlockSignature;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JoinError {
    BlockMismatch(String),
    ParamsTooLarge(String),
    Formula(FormulaError),
}

impl fmt::Display for JoinError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JoinError::BlockMismatch(msg) => write!(f, "block mismatch: {msg}"),
            JoinError::ParamsTooLarge(msg) => write!(f, "join parameters too large: {msg}"),
            JoinError::Formula(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for JoinError {}

impl From<FormulaError> for JoinError {
    fn from(e: FormulaError) -> Self {
        JoinError::Formula(e)
    }
}

/// Derived quantities of the join construction. Values are arbitrary
/// precision: the recurrences overflow 64-bit integers from five bound blocks
/// onward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinParams {
    free_dims: Vec<usize>,
    bound_dims: Vec<usize>,
    /// N_1..N_n
    copies: Vec<BigUint>,
    /// d_0..d_n
    thresholds: Vec<BigUint>,
    /// m_1..m_n
    joined_dims: Vec<BigUint>,
}

impl JoinParams {
    pub fn free_count(&self) -> usize {
        self.free_dims.len()
    }

    pub fn bound_count(&self) -> usize {
        self.bound_dims.len()
    }

    pub fn free_dims(&self) -> &[usize] {
        &self.free_dims
    }

    pub fn bound_dims(&self) -> &[usize] {
        &self.bound_dims
    }

    /// `N_j` for `1 ≤ j ≤ n`.
    pub fn copies(&self, j: usize) -> &BigUint {
        &self.copies[j - 1]
    }

    /// `d_j` for `0 ≤ j ≤ n`.
    pub fn threshold(&self, j: usize) -> &BigUint {
        &self.thresholds[j]
    }

    /// `m_j` for `1 ≤ j ≤ n`.
    pub fn joined_dim(&self, j: usize) -> &BigUint {
        &self.joined_dims[j - 1]
    }

    pub fn thresholds(&self) -> &[BigUint] {
        &self.thresholds
    }

    pub fn copies_all(&self) -> &[BigUint] {
        &self.copies
    }

    pub fn joined_dims_all(&self) -> &[BigUint] {
        &self.joined_dims
    }

    fn usize_of(v: &BigUint, what: &str) -> Result<usize, JoinError> {
        v.to_usize()
            .ok_or_else(|| JoinError::ParamsTooLarge(format!("{what} = {v} does not fit usize")))
    }

    /// Materializes the level-`level` signature
    /// `𝐦_level = (e_1,…,e_m, m_1×N_1, …, m_level×N_level)`.
    ///
    /// Level 0 is the free part alone (empty for sentences).
    pub fn signature(&self, level: usize) -> Result<BlockSignature, JoinError> {
        let mut dims: Vec<usize> = self.free_dims.clone();
        let mut entries = BigUint::from(dims.len());
        for j in 1..=level {
            entries += self.copies(j);
            if entries > BigUint::from(1_000_000u64) {
                return Err(JoinError::ParamsTooLarge(format!(
                    "signature at level {level} has {entries} blocks"
                )));
            }
            let count = Self::usize_of(self.copies(j), "N")?;
            let dim = Self::usize_of(self.joined_dim(j), "m")?;
            dims.extend(std::iter::repeat_n(dim, count));
        }
        Ok(BlockSignature::new(dims))
    }

    /// `|𝐦_j| = d_j` for every level; exercised by tests on every generated
    /// parameter set.
    pub fn signature_total_matches_threshold(&self) -> bool {
        for level in 0..=self.bound_count() {
            let mut total = BigUint::from(self.free_dims.iter().sum::<usize>());
            for j in 1..=level {
                total += self.copies(j) * self.joined_dim(j);
            }
            if &total != self.threshold(level) {
                return false;
            }
        }
        true
    }

    /// Conjunct-count factors `2d_{j-1}+2` for `j = 1..n`.
    pub fn tuple_ranges(&self) -> Vec<BigUint> {
        (1..=self.bound_count())
            .map(|j| BigUint::from(2u32) * self.threshold(j - 1) + BigUint::from(2u32))
            .collect()
    }

    /// JSON value for reports: the parameter table with decimal-string values.
    pub fn to_json(&self) -> Value {
        let mut table = Vec::new();
        table.push(json!({
            "i": 0,
            "N": Value::Null,
            "d": self.threshold(0).to_string(),
            "m": Value::Null,
            "msig": Value::Null,
        }));
        for j in 1..=self.bound_count() {
            let mut runs = Vec::new();
            for &e in &self.free_dims {
                runs.push(json!({"dim": e.to_string(), "count": "1"}));
            }
            for h in 1..=j {
                runs.push(json!({
                    "dim": self.joined_dim(h).to_string(),
                    "count": self.copies(h).to_string(),
                }));
            }
            table.push(json!({
                "i": j,
                "N": self.copies(j).to_string(),
                "d": self.threshold(j).to_string(),
                "m": self.joined_dim(j).to_string(),
                "msig": runs,
            }));
        }
        json!({
            "free_dims": self.free_dims,
            "bound_dims": self.bound_dims,
            "table": table,
        })
    }
}

/// Evaluates the parameter recurrences. The free tuple may be empty (sentence
/// case, `d_0 = 0`); the bound tuple must be nonempty.
pub fn join_params(free_dims: &[usize], bound_dims: &[usize]) -> JoinParams {
    assert!(
        !bound_dims.is_empty(),
        "join parameters need at least one bound block"
    );
    let n = bound_dims.len();
    let d0 = BigUint::from(free_dims.iter().sum::<usize>());
    let mut thresholds = vec![d0];
    let mut copies: Vec<BigUint> = Vec::with_capacity(n);
    let mut joined_dims: Vec<BigUint> = Vec::with_capacity(n);
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    for j in 1..=n {
        let nj = if j == 1 {
            BigUint::one()
        } else {
            &two * &copies[j - 2] * (&thresholds[j - 2] + &one)
        };
        let fj = BigUint::from(bound_dims[j - 1]);
        let mj = &two * (&thresholds[j - 1] + &one) * (&fj + &one) - &one;
        let dj = &thresholds[j - 1] + &nj * &mj;
        copies.push(nj);
        joined_dims.push(mj);
        thresholds.push(dj);
    }
    JoinParams {
        free_dims: free_dims.to_vec(),
        bound_dims: bound_dims.to_vec(),
        copies,
        thresholds,
        joined_dims,
    }
}

fn check_shape(psi: &ProperFormula, params: &JoinParams) -> Result<(), JoinError> {
    if !psi.is_quantifier_free() {
        return Err(JoinError::BlockMismatch(
            "join input must be quantifier-free".into(),
        ));
    }
    if psi.free_dims() != params.free_dims() || psi.bound_dims() != params.bound_dims() {
        return Err(JoinError::BlockMismatch(format!(
            "formula blocks ({:?} free, {:?} bound) do not match parameters ({:?}, {:?})",
            psi.free_dims(),
            psi.bound_dims(),
            params.free_dims(),
            params.bound_dims()
        )));
    }
    Ok(())
}

/// Builds the quantifier-free join formula: the conjunction over all index
/// tuples `(i_1,…,i_n)` of the input with bound block `j` substituted into
/// sub-tuple `i_j` of the level-`j` copy indexed by `(i_1,…,i_{j-1})`.
/// Conjuncts are generated in lexicographic tuple order; duplicates produced
/// by symmetric inputs are kept so the size statistics match the construction.
pub fn build_join_formula(
    psi: &ProperFormula,
    params: &JoinParams,
) -> Result<ProperFormula, JoinError> {
    check_shape(psi, params)?;
    let m = params.free_count();
    let n = params.bound_count();
    let target = params.signature(n)?;
    let ranges: Vec<usize> = params
        .tuple_ranges()
        .iter()
        .map(|r| JoinParams::usize_of(r, "2d+2"))
        .collect::<Result<_, _>>()?;
    let total: usize = ranges.iter().product();
    if total > 5_000_000 {
        return Err(JoinError::ParamsTooLarge(format!(
            "join would have {total} conjuncts"
        )));
    }
    // first block index of each level's copies
    let mut level_start = Vec::with_capacity(n + 1);
    let mut acc = m;
    for j in 1..=n {
        level_start.push(acc);
        acc += JoinParams::usize_of(params.copies(j), "N")?;
    }

    let mut conjuncts = Vec::with_capacity(total);
    let mut tuple = vec![0usize; n];
    loop {
        let mut slots = Vec::with_capacity(m + n);
        for i in 0..m {
            slots.push((i, 0usize));
        }
        for j in 1..=n {
            // lex rank of the prefix (i_1..i_{j-1})
            let mut rank = 0usize;
            for h in 0..j - 1 {
                rank = rank * ranges[h] + tuple[h];
            }
            let block = level_start[j - 1] + rank;
            let offset = tuple[j - 1] * (params.bound_dims[j - 1] + 1);
            slots.push((block, offset));
        }
        let mapping = BlockMapping {
            target: target.clone(),
            target_free_count: m,
            slots,
        };
        let mapped = substitute_blocks(psi, &mapping)?;
        conjuncts.push(mapped.tree().clone());

        // advance the mixed-radix tuple
        let mut pos = n;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < ranges[pos] {
                break;
            }
            tuple[pos] = 0;
        }
        if tuple.iter().all(|&i| i == 0) {
            break;
        }
    }
    Ok(ProperFormula::new(target, m, conjoin(conjuncts), None)?)
}

/// The `p`-fold iterated relative join over the free block: the conjunction
/// `⋀_{t=0}^{p} ψ(W; X^{(t)})` over blocks `(P^m, P^{(p+1)(n+1)-1})`.
pub fn relative_join_formula(psi: &ProperFormula, p: usize) -> Result<ProperFormula, JoinError> {
    if !psi.is_quantifier_free() || psi.free_count() != 1 || psi.bound_count() != 1 {
        return Err(JoinError::BlockMismatch(
            "relative join expects a quantifier-free formula with one free and one bound block"
                .into(),
        ));
    }
    let m = psi.free_dims()[0];
    let n = psi.bound_dims()[0];
    let target = BlockSignature::new(vec![m, (p + 1) * (n + 1) - 1]);
    let mut conjuncts = Vec::with_capacity(p + 1);
    for t in 0..=p {
        let mapping = BlockMapping {
            target: target.clone(),
            target_free_count: 1,
            slots: vec![(0, 0), (1, t * (n + 1))],
        };
        conjuncts.push(substitute_blocks(psi, &mapping)?.tree().clone());
    }
    Ok(ProperFormula::new(target, 1, conjoin(conjuncts), None)?)
}

/// Multi-join of single-block formulas: block `i` lands in the contiguous
/// slot `i` of one block of dimension `Σ(n_i+1) − 1`.
pub fn multijoin_formula(inputs: &[ProperFormula]) -> Result<ProperFormula, JoinError> {
    if inputs.is_empty() {
        return Err(JoinError::BlockMismatch(
            "multi-join needs at least one input".into(),
        ));
    }
    for psi in inputs {
        if !psi.is_quantifier_free() || psi.free_count() != 0 || psi.bound_count() != 1 {
            return Err(JoinError::BlockMismatch(
                "multi-join inputs must be quantifier-free with a single bound block".into(),
            ));
        }
    }
    let total: usize = inputs.iter().map(|f| f.bound_dims()[0] + 1).sum();
    let target = BlockSignature::new(vec![total - 1]);
    let mut conjuncts = Vec::with_capacity(inputs.len());
    let mut offset = 0usize;
    for psi in inputs {
        let mapping = BlockMapping {
            target: target.clone(),
            target_free_count: 0,
            slots: vec![(0, offset)],
        };
        conjuncts.push(substitute_blocks(psi, &mapping)?.tree().clone());
        offset += psi.bound_dims()[0] + 1;
    }
    Ok(ProperFormula::new(target, 0, conjoin(conjuncts), None)?)
}

/// Size accounting for the join construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeStats {
    /// `∏_{j=1}^{n} (2 d_{j-1} + 2)`, the number of index tuples.
    pub conjunct_count: BigUint,
    /// conjunct count times the input's atom count.
    pub atom_count: BigUint,
    /// `Σ (e_i+1) + Σ N_j (m_j+1)`.
    pub variable_count: BigUint,
    /// conjunct count times the input's serialized node count.
    pub circuit_size_bound: BigUint,
}

impl SizeStats {
    pub fn to_json(&self) -> Value {
        json!({
            "conjunct_count": self.conjunct_count.to_string(),
            "atom_count": self.atom_count.to_string(),
            "variable_count": self.variable_count.to_string(),
            "circuit_size_bound": self.circuit_size_bound.to_string(),
        })
    }
}

pub fn join_size_stats(psi: &ProperFormula, params: &JoinParams) -> Result<SizeStats, JoinError> {
    check_shape(psi, params)?;
    let mut conjunct_count = BigUint::one();
    for r in params.tuple_ranges() {
        conjunct_count *= r;
    }
    let mut variable_count = BigUint::from(params.free_dims().iter().map(|e| e + 1).sum::<usize>());
    for j in 1..=params.bound_count() {
        variable_count += params.copies(j) * (params.joined_dim(j) + BigUint::one());
    }
    let atom_count = &conjunct_count * BigUint::from(psi.atom_count());
    let circuit_size_bound = &conjunct_count * BigUint::from(psi.node_count());
    Ok(SizeStats {
        conjunct_count,
        atom_count,
        variable_count,
        circuit_size_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, FormulaNode};

    fn example_psi() -> ProperFormula {
        parse_formula(
            "(blocks (w 1) (x 1) (x 1))\n\
             (or (and (=0 (+ w0_0 (* -1 w0_1))) (=0 (+ x0_0 (* -1 x0_1))))\n\
                 (and (=0 (+ w0_0 (* -2 w0_1))) (=0 (+ x0_0 (* -2 x0_1))) (=0 (+ x1_0 (* -2 x1_1)))))",
        )
        .unwrap()
    }

    fn u(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn worked_example_parameter_table() {
        let p = join_params(&[1], &[1, 1]);
        assert_eq!(p.copies_all(), &[u(1), u(4)]);
        assert_eq!(p.thresholds(), &[u(1), u(8), u(148)]);
        assert_eq!(p.joined_dims_all(), &[u(7), u(35)]);
        assert_eq!(p.signature(1).unwrap().dims(), &[1, 7]);
        assert_eq!(p.signature(2).unwrap().dims(), &[1, 7, 35, 35, 35, 35]);
        assert!(p.signature_total_matches_threshold());
    }

    #[test]
    fn degenerate_parameter_cases() {
        let p = join_params(&[0], &[0]);
        assert_eq!(p.thresholds(), &[u(0), u(1)]);
        assert_eq!(p.copies_all(), &[u(1)]);
        assert_eq!(p.joined_dims_all(), &[u(1)]);

        let s = join_params(&[], &[1]);
        assert_eq!(s.thresholds(), &[u(0), u(3)]);
        assert_eq!(s.copies_all(), &[u(1)]);
        assert_eq!(s.joined_dims_all(), &[u(3)]);
        assert_eq!(s.signature(0).unwrap().dims(), &[] as &[usize]);
    }

    #[test]
    fn signature_totals_match_thresholds_on_a_grid() {
        for e in [vec![], vec![0], vec![1], vec![2, 1]] {
            for f in [vec![0], vec![1], vec![1, 1], vec![2, 1, 1]] {
                let p = join_params(&e, &f);
                assert!(p.signature_total_matches_threshold(), "e={e:?} f={f:?}");
            }
        }
    }

    #[test]
    fn join_of_worked_example_has_72_conjuncts() {
        let psi = example_psi();
        let params = join_params(&[1], &[1, 1]);
        let joined = build_join_formula(&psi, &params).unwrap();
        assert_eq!(joined.blocks().dims(), &[1, 7, 35, 35, 35, 35]);
        assert_eq!(joined.free_count(), 1);
        match joined.tree() {
            FormulaNode::And(cs) => assert_eq!(cs.len(), 72),
            other => panic!("{other:?}"),
        }
        assert_eq!(joined.atom_count(), 72 * 5);
        crate::formula::validate_proper(&joined).unwrap();
    }

    #[test]
    fn sentence_single_atom_join() {
        let psi = parse_formula("(blocks (x 1)) (=0 x0_0)").unwrap();
        let params = join_params(&[], &[1]);
        let joined = build_join_formula(&psi, &params).unwrap();
        assert_eq!(joined.blocks().dims(), &[3]);
        match joined.tree() {
            FormulaNode::And(cs) => assert_eq!(cs.len(), 2),
            other => panic!("{other:?}"),
        }
        assert_eq!(joined.atom_count(), 2);
    }

    #[test]
    fn join_of_true_is_true() {
        let psi = parse_formula("(blocks (w 1) (x 1) (x 1)) (and)").unwrap();
        let params = join_params(&[1], &[1, 1]);
        let joined = build_join_formula(&psi, &params).unwrap();
        assert!(joined.tree().is_and_true());
        assert_eq!(joined.blocks().dims(), &[1, 7, 35, 35, 35, 35]);
    }

    #[test]
    fn relative_join_examples() {
        // full space stays full space
        let full = parse_formula("(blocks (w 1) (x 1)) (and)").unwrap();
        let j = relative_join_formula(&full, 1).unwrap();
        assert!(j.tree().is_and_true());
        assert_eq!(j.blocks().dims(), &[1, 3]);

        // one coordinate hyperplane per slot
        let psi = parse_formula("(blocks (w 1) (x 1)) (=0 x0_0)").unwrap();
        let j2 = relative_join_formula(&psi, 2).unwrap();
        assert_eq!(j2.blocks().dims(), &[1, 5]);
        match j2.tree() {
            FormulaNode::And(cs) => assert_eq!(cs.len(), 3),
            other => panic!("{other:?}"),
        }

        // p = 0 returns the formula itself
        let j0 = relative_join_formula(&psi, 0).unwrap();
        assert_eq!(j0, psi);
    }

    #[test]
    fn multijoin_examples() {
        let psi = parse_formula("(blocks (x 1)) (=0 x0_0)").unwrap();
        let j = multijoin_formula(&[psi.clone(), psi.clone()]).unwrap();
        assert_eq!(j.blocks().dims(), &[3]);
        // slot offsets 0 and 2
        let text = crate::formula::format_formula(&j);
        assert!(text.contains("x0_0"), "{text}");
        assert!(text.contains("x0_2"), "{text}");

        let single = multijoin_formula(std::slice::from_ref(&psi)).unwrap();
        assert_eq!(single, psi);

        let t = parse_formula("(blocks (x 1)) (and)").unwrap();
        let jt = multijoin_formula(&[t.clone(), t]).unwrap();
        assert!(jt.tree().is_and_true());
    }

    #[test]
    fn size_stats_examples() {
        let psi = example_psi();
        let params = join_params(&[1], &[1, 1]);
        let stats = join_size_stats(&psi, &params).unwrap();
        assert_eq!(stats.conjunct_count, u(72));
        assert_eq!(stats.variable_count, u(2 + 8 + 4 * 36));
        assert_eq!(stats.atom_count, u(72 * 5));
        assert_eq!(
            stats.circuit_size_bound,
            u(72) * BigUint::from(psi.node_count())
        );

        let tiny = parse_formula("(blocks (w 0) (x 0)) (=0 x0_0)").unwrap();
        let tp = join_params(&[0], &[0]);
        assert_eq!(join_size_stats(&tiny, &tp).unwrap().conjunct_count, u(2));

        let truef = parse_formula("(blocks (w 1) (x 1) (x 1)) (and)").unwrap();
        assert_eq!(join_size_stats(&truef, &params).unwrap().atom_count, u(0));
    }

    #[test]
    fn conjunct_count_matches_generated_tuples() {
        for (e, f) in [
            (vec![0usize], vec![0usize]),
            (vec![1], vec![1]),
            (vec![], vec![1, 0]),
            (vec![0, 0], vec![1]),
        ] {
            let dims: Vec<String> = e
                .iter()
                .map(|d| format!("(w {d})"))
                .chain(f.iter().map(|d| format!("(x {d})")))
                .collect();
            let text = format!("(blocks {}) (=0 x0_0)", dims.join(" "));
            let psi = parse_formula(&text).unwrap();
            let params = join_params(&e, &f);
            let stats = join_size_stats(&psi, &params).unwrap();
            let joined = build_join_formula(&psi, &params).unwrap();
            let generated = match joined.tree() {
                FormulaNode::And(cs) => cs.len(),
                FormulaNode::Atom(_) => 1,
                other => panic!("{other:?}"),
            };
            assert_eq!(
                BigUint::from(generated),
                stats.conjunct_count,
                "e={e:?} f={f:?}"
            );
        }
    }

    #[test]
    fn block_mismatch_is_reported() {
        let psi = parse_formula("(blocks (x 1)) (=0 x0_0)").unwrap();
        let params = join_params(&[1], &[1]);
        assert!(matches!(
            build_join_formula(&psi, &params),
            Err(JoinError::BlockMismatch(_))
        ));
    }
}
