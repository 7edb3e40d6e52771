//! Data model, parser and validator for multi-homogeneous proper formulas.
//!
//! A proper formula is a negation-free and/or tree over atoms `P = 0`, where
//! each `P` is multi-homogeneous with respect to a block signature whose free
//! blocks (declared `w`) precede its bound blocks (declared `x`). An optional
//! quantifier prefix assigns one quantifier per bound block, outermost first.
//!
//! The wire format is the s-expression grammar documented on [`parse_formula`].
//! Formulas canonicalize on construction (lexicographic monomial order inside
//! atoms, lexicographic serialized order among and/or children), so structural
//! equality is plain `==` and `parse ∘ format` is the identity.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::polyring::BlockSignature;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantifier::Exists => write!(f, "exists"),
            Quantifier::Forall => write!(f, "forall"),
        }
    }
}

/// Multi-homogeneous polynomial atom over the formula's full block signature.
///
/// Terms map exponent vectors (one entry per homogeneous coordinate of every
/// block, in declaration order) to nonzero integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiHomPoly {
    blocks: BlockSignature,
    terms: BTreeMap<Vec<u32>, BigInt>,
    multidegree: Vec<u32>,
}

impl MultiHomPoly {
    /// Builds an atom from raw terms; zero coefficients are dropped and the
    /// multidegree is read off the lexicographically first term (all zeros for
    /// the zero polynomial). Per-term consistency is checked by
    /// [`validate_proper`].
    pub fn new(blocks: BlockSignature, raw_terms: BTreeMap<Vec<u32>, BigInt>) -> Self {
        let terms: BTreeMap<Vec<u32>, BigInt> = raw_terms
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let multidegree = match terms.keys().next() {
            Some(exps) => block_degrees(&blocks, exps),
            None => vec![0; blocks.len()],
        };
        MultiHomPoly {
            blocks,
            terms,
            multidegree,
        }
    }

    pub fn blocks(&self) -> &BlockSignature {
        &self.blocks
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, BigInt> {
        &self.terms
    }

    pub fn multidegree(&self) -> &[u32] {
        &self.multidegree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// True when every term has the block degrees announced by `multidegree`.
    pub fn is_multihomogeneous(&self) -> bool {
        self.offending_block().is_none()
    }

    /// First block index where some term's degree disagrees with the
    /// multidegree, if any.
    pub fn offending_block(&self) -> Option<usize> {
        for exps in self.terms.keys() {
            let degs = block_degrees(&self.blocks, exps);
            for (b, (&d, &m)) in degs.iter().zip(self.multidegree.iter()).enumerate() {
                if d != m {
                    return Some(b);
                }
            }
        }
        None
    }
}

fn block_degrees(blocks: &BlockSignature, exps: &[u32]) -> Vec<u32> {
    let mut degs = Vec::with_capacity(blocks.len());
    for b in 0..blocks.len() {
        let off = blocks.coord_offset(b);
        let w = blocks.dim(b) + 1;
        degs.push(exps[off..off + w].iter().sum());
    }
    degs
}

/// Raw tree as parsed; `Not` survives parsing so validation can point at it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FormulaNode {
    And(Vec<FormulaNode>),
    Or(Vec<FormulaNode>),
    Not(Box<FormulaNode>),
    Atom(MultiHomPoly),
}

impl FormulaNode {
    pub fn is_and_true(&self) -> bool {
        matches!(self, FormulaNode::And(cs) if cs.is_empty())
    }

    pub fn is_or_false(&self) -> bool {
        matches!(self, FormulaNode::Or(cs) if cs.is_empty())
    }

    pub fn atom_count(&self) -> usize {
        match self {
            FormulaNode::And(cs) | FormulaNode::Or(cs) => cs.iter().map(|c| c.atom_count()).sum(),
            FormulaNode::Not(c) => c.atom_count(),
            FormulaNode::Atom(_) => 1,
        }
    }

    /// Serialized node count: one per and/or node, and per atom one plus its
    /// term count. Used by the join size accounting.
    pub fn node_count(&self) -> usize {
        match self {
            FormulaNode::And(cs) | FormulaNode::Or(cs) => {
                1 + cs.iter().map(|c| c.node_count()).sum::<usize>()
            }
            FormulaNode::Not(c) => 1 + c.node_count(),
            FormulaNode::Atom(a) => 1 + a.term_count(),
        }
    }

    fn sort_key(&self, f: &ProperFormula) -> String {
        let mut out = String::new();
        write_node(&mut out, self, f);
        out
    }

    fn canonicalize(&mut self, f: &ProperFormula) {
        match self {
            FormulaNode::And(cs) | FormulaNode::Or(cs) => {
                for c in cs.iter_mut() {
                    c.canonicalize(f);
                }
                cs.sort_by_cached_key(|c| c.sort_key(f));
            }
            FormulaNode::Not(c) => c.canonicalize(f),
            FormulaNode::Atom(_) => {}
        }
    }
}

/// A validated proper formula: block signature (free first), tree, optional
/// quantifier prefix over the bound blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProperFormula {
    blocks: BlockSignature,
    free_count: usize,
    tree: FormulaNode,
    prefix: Option<Vec<Quantifier>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormulaError {
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    NotMultiHomogeneous {
        path: Vec<usize>,
        block: usize,
    },
    NegationPresent {
        path: Vec<usize>,
    },
    BlockMismatch {
        path: Vec<usize>,
    },
    EmptyJunction {
        path: Vec<usize>,
    },
    PrefixLengthMismatch {
        expected: usize,
        got: usize,
    },
    ArityMismatch {
        msg: String,
    },
}

impl fmt::Display for FormulaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormulaError::Syntax { line, col, msg } => {
                write!(f, "syntax error at {line}:{col}: {msg}")
            }
            FormulaError::NotMultiHomogeneous { path, block } => write!(
                f,
                "atom at path {path:?} is not multi-homogeneous in block {block}"
            ),
            FormulaError::NegationPresent { path } => {
                write!(f, "negation at path {path:?} is not allowed")
            }
            FormulaError::BlockMismatch { path } => {
                write!(f, "block signature mismatch at path {path:?}")
            }
            FormulaError::EmptyJunction { path } => write!(
                f,
                "empty and/or at path {path:?} is only allowed at top level"
            ),
            FormulaError::PrefixLengthMismatch { expected, got } => write!(
                f,
                "prefix length {got} does not match bound block count {expected}"
            ),
            FormulaError::ArityMismatch { msg } => write!(f, "arity mismatch: {msg}"),
        }
    }
}

impl std::error::Error for FormulaError {}

impl ProperFormula {
    /// Builds and validates; the tree is canonicalized (children of and/or
    /// sorted by serialized form, duplicates kept).
    pub fn new(
        blocks: BlockSignature,
        free_count: usize,
        tree: FormulaNode,
        prefix: Option<Vec<Quantifier>>,
    ) -> Result<Self, FormulaError> {
        let mut formula = ProperFormula {
            blocks,
            free_count,
            tree,
            prefix,
        };
        let probe = formula.clone();
        formula.tree.canonicalize(&probe);
        formula.validate()?;
        Ok(formula)
    }

    pub fn blocks(&self) -> &BlockSignature {
        &self.blocks
    }

    pub fn free_count(&self) -> usize {
        self.free_count
    }

    pub fn bound_count(&self) -> usize {
        self.blocks.len() - self.free_count
    }

    pub fn tree(&self) -> &FormulaNode {
        &self.tree
    }

    pub fn prefix(&self) -> Option<&[Quantifier]> {
        self.prefix.as_deref()
    }

    pub fn is_quantifier_free(&self) -> bool {
        self.prefix.is_none()
    }

    /// Same formula without its quantifier prefix.
    pub fn strip_prefix(&self) -> ProperFormula {
        ProperFormula {
            blocks: self.blocks.clone(),
            free_count: self.free_count,
            tree: self.tree.clone(),
            prefix: None,
        }
    }

    pub fn atom_count(&self) -> usize {
        self.tree.atom_count()
    }

    pub fn node_count(&self) -> usize {
        self.tree.node_count()
    }

    /// Free block dimensions, then bound block dimensions.
    pub fn free_dims(&self) -> &[usize] {
        &self.blocks.dims()[..self.free_count]
    }

    pub fn bound_dims(&self) -> &[usize] {
        &self.blocks.dims()[self.free_count..]
    }

    fn validate(&self) -> Result<(), FormulaError> {
        if self.blocks.is_empty() {
            return Err(FormulaError::ArityMismatch {
                msg: "a formula needs at least one block".into(),
            });
        }
        if self.free_count > self.blocks.len() {
            return Err(FormulaError::ArityMismatch {
                msg: "free block count exceeds block count".into(),
            });
        }
        if let Some(prefix) = &self.prefix {
            let bound = self.bound_count();
            if prefix.len() != bound {
                return Err(FormulaError::PrefixLengthMismatch {
                    expected: bound,
                    got: prefix.len(),
                });
            }
        }
        let mut path = Vec::new();
        validate_node(&self.tree, &self.blocks, &mut path, true)
    }
}

fn validate_node(
    node: &FormulaNode,
    blocks: &BlockSignature,
    path: &mut Vec<usize>,
    top: bool,
) -> Result<(), FormulaError> {
    match node {
        FormulaNode::Not(_) => Err(FormulaError::NegationPresent { path: path.clone() }),
        FormulaNode::And(cs) | FormulaNode::Or(cs) => {
            if cs.is_empty() && !top {
                return Err(FormulaError::EmptyJunction { path: path.clone() });
            }
            for (i, c) in cs.iter().enumerate() {
                path.push(i);
                validate_node(c, blocks, path, false)?;
                path.pop();
            }
            Ok(())
        }
        FormulaNode::Atom(a) => {
            if a.blocks() != blocks {
                return Err(FormulaError::BlockMismatch { path: path.clone() });
            }
            if let Some(block) = a.offending_block() {
                return Err(FormulaError::NotMultiHomogeneous {
                    path: path.clone(),
                    block,
                });
            }
            Ok(())
        }
    }
}

/// Validates an already-built formula; `Ok(())` iff every atom is
/// multi-homogeneous, trees are negation-free, and signatures agree.
pub fn validate_proper(f: &ProperFormula) -> Result<(), FormulaError> {
    f.validate()
}

// ---------------------------------------------------------------------------
// Block substitution
// ---------------------------------------------------------------------------

/// Relabeling of each source block to a (target block, coordinate offset) slot.
#[derive(Clone, Debug)]
pub struct BlockMapping {
    pub target: BlockSignature,
    pub target_free_count: usize,
    /// One entry per source block: target block index and coordinate offset
    /// inside that block.
    pub slots: Vec<(usize, usize)>,
}

/// Renames the blocks of `f` into slots of a target signature. The tree shape,
/// atom count and per-atom term count are preserved.
pub fn substitute_blocks(
    f: &ProperFormula,
    mapping: &BlockMapping,
) -> Result<ProperFormula, FormulaError> {
    if mapping.slots.len() != f.blocks().len() {
        return Err(FormulaError::ArityMismatch {
            msg: format!(
                "mapping covers {} blocks, formula has {}",
                mapping.slots.len(),
                f.blocks().len()
            ),
        });
    }
    for (src, &(tb, off)) in mapping.slots.iter().enumerate() {
        if tb >= mapping.target.len() {
            return Err(FormulaError::ArityMismatch {
                msg: format!("target block {tb} out of range"),
            });
        }
        let need = f.blocks().dim(src) + 1;
        let avail = mapping.target.dim(tb) + 1;
        if off + need > avail {
            return Err(FormulaError::ArityMismatch {
                msg: format!(
                    "source block {src} needs {need} coordinates at offset {off} of target block {tb} (width {avail})"
                ),
            });
        }
    }
    let tree = substitute_node(f.tree(), f.blocks(), mapping);
    ProperFormula::new(
        mapping.target.clone(),
        mapping.target_free_count,
        tree,
        None,
    )
}

fn substitute_node(
    node: &FormulaNode,
    src_blocks: &BlockSignature,
    mapping: &BlockMapping,
) -> FormulaNode {
    match node {
        FormulaNode::And(cs) => FormulaNode::And(
            cs.iter()
                .map(|c| substitute_node(c, src_blocks, mapping))
                .collect(),
        ),
        FormulaNode::Or(cs) => FormulaNode::Or(
            cs.iter()
                .map(|c| substitute_node(c, src_blocks, mapping))
                .collect(),
        ),
        FormulaNode::Not(c) => FormulaNode::Not(Box::new(substitute_node(c, src_blocks, mapping))),
        FormulaNode::Atom(a) => {
            let mut terms = BTreeMap::new();
            for (exps, coeff) in a.terms() {
                let mut new_exps = vec![0u32; mapping.target.coord_count()];
                for src in 0..src_blocks.len() {
                    let s_off = src_blocks.coord_offset(src);
                    let width = src_blocks.dim(src) + 1;
                    let (tb, off) = mapping.slots[src];
                    let t_off = mapping.target.coord_offset(tb) + off;
                    new_exps[t_off..t_off + width].copy_from_slice(&exps[s_off..s_off + width]);
                }
                terms.insert(new_exps, coeff.clone());
            }
            FormulaNode::Atom(MultiHomPoly::new(mapping.target.clone(), terms))
        }
    }
}

/// Conjunction smart constructor: `true` children vanish, any `false` child
/// collapses the result, a single survivor is returned as-is.
pub fn conjoin(nodes: Vec<FormulaNode>) -> FormulaNode {
    let mut out = Vec::new();
    for n in nodes {
        if n.is_and_true() {
            continue;
        }
        if n.is_or_false() {
            return FormulaNode::Or(Vec::new());
        }
        out.push(n);
    }
    match out.len() {
        0 => FormulaNode::And(Vec::new()),
        1 => out.into_iter().next().unwrap(),
        _ => FormulaNode::And(out),
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Token {
    LParen,
    RParen,
    Word(String),
}

struct Lexer<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    col: usize,
    /// LIFO pushback; `next_token` pops from here first.
    pushback: Vec<(Token, usize, usize)>,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            chars: src.char_indices().peekable(),
            line: 1,
            col: 1,
            pushback: Vec::new(),
        }
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        loop {
            match self.chars.peek().map(|&(_, c)| c) {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some(';') => {
                    // comment to end of line
                    while let Some(&(_, c)) = self.chars.peek() {
                        self.bump();
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
    }

    fn next_token(&mut self) -> Option<(Token, usize, usize)> {
        if let Some(t) = self.pushback.pop() {
            return Some(t);
        }
        self.skip_ws();
        let (line, col) = (self.line, self.col);
        let &(start, c) = self.chars.peek()?;
        match c {
            '(' => {
                self.bump();
                Some((Token::LParen, line, col))
            }
            ')' => {
                self.bump();
                Some((Token::RParen, line, col))
            }
            _ => {
                let mut end = start;
                while let Some(&(i, c)) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    end = i + c.len_utf8();
                    self.bump();
                }
                Some((Token::Word(self.src[start..end].to_string()), line, col))
            }
        }
    }

    fn peek_token(&mut self) -> Option<&(Token, usize, usize)> {
        if self.pushback.is_empty() {
            let t = self.next_token()?;
            self.pushback.push(t);
        }
        self.pushback.last()
    }

    fn push_back(&mut self, t: (Token, usize, usize)) {
        self.pushback.push(t);
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    blocks: BlockSignature,
    free_count: usize,
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> FormulaError {
    FormulaError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

impl<'a> Parser<'a> {
    fn expect_lparen(&mut self) -> Result<(), FormulaError> {
        match self.lexer.next_token() {
            Some((Token::LParen, _, _)) => Ok(()),
            Some((t, l, c)) => Err(syntax(l, c, format!("expected '(', found {t:?}"))),
            None => Err(syntax(
                self.lexer.line,
                self.lexer.col,
                "unexpected end of input",
            )),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), FormulaError> {
        match self.lexer.next_token() {
            Some((Token::RParen, _, _)) => Ok(()),
            Some((t, l, c)) => Err(syntax(l, c, format!("expected ')', found {t:?}"))),
            None => Err(syntax(
                self.lexer.line,
                self.lexer.col,
                "unexpected end of input",
            )),
        }
    }

    fn expect_word(&mut self) -> Result<(String, usize, usize), FormulaError> {
        match self.lexer.next_token() {
            Some((Token::Word(w), l, c)) => Ok((w, l, c)),
            Some((t, l, c)) => Err(syntax(l, c, format!("expected a word, found {t:?}"))),
            None => Err(syntax(
                self.lexer.line,
                self.lexer.col,
                "unexpected end of input",
            )),
        }
    }

    fn parse_header(&mut self) -> Result<Option<Vec<Quantifier>>, FormulaError> {
        self.expect_lparen()?;
        let (kw, l, c) = self.expect_word()?;
        if kw != "blocks" {
            return Err(syntax(l, c, format!("expected 'blocks', found {kw:?}")));
        }
        let mut dims = Vec::new();
        let mut free = 0usize;
        let mut seen_bound = false;
        loop {
            match self.lexer.peek_token() {
                Some((Token::RParen, _, _)) => {
                    self.lexer.next_token();
                    break;
                }
                Some((Token::LParen, _, _)) => {
                    self.expect_lparen()?;
                    let (kind, kl, kc) = self.expect_word()?;
                    let (dim_word, dl, dc) = self.expect_word()?;
                    let dim: usize = dim_word
                        .parse()
                        .map_err(|_| syntax(dl, dc, format!("invalid dimension {dim_word:?}")))?;
                    match kind.as_str() {
                        "w" => {
                            if seen_bound {
                                return Err(syntax(
                                    kl,
                                    kc,
                                    "free blocks (w) must be declared before bound blocks (x)",
                                ));
                            }
                            free += 1;
                        }
                        "x" => seen_bound = true,
                        other => {
                            return Err(syntax(
                                kl,
                                kc,
                                format!("block kind must be w or x, found {other:?}"),
                            ))
                        }
                    }
                    dims.push(dim);
                    self.expect_rparen()?;
                }
                Some((t, l, c)) => {
                    let (t, l, c) = (t.clone(), *l, *c);
                    return Err(syntax(l, c, format!("unexpected {t:?} in blocks header")));
                }
                None => {
                    return Err(syntax(
                        self.lexer.line,
                        self.lexer.col,
                        "unexpected end of input",
                    ))
                }
            }
        }
        if dims.is_empty() {
            return Err(syntax(l, c, "at least one block is required"));
        }
        self.blocks = BlockSignature::new(dims);
        self.free_count = free;

        // optional (prefix ...): needs two-token lookahead
        let mut prefix = None;
        if let Some((Token::LParen, _, _)) = self.lexer.peek_token() {
            let lparen = self.lexer.next_token().unwrap();
            let is_prefix = matches!(
                self.lexer.peek_token(),
                Some((Token::Word(w), _, _)) if w == "prefix"
            );
            if is_prefix {
                self.lexer.next_token();
                let mut quants = Vec::new();
                loop {
                    match self.lexer.next_token() {
                        Some((Token::RParen, _, _)) => break,
                        Some((Token::Word(q), l, c)) => match q.as_str() {
                            "exists" => quants.push(Quantifier::Exists),
                            "forall" => quants.push(Quantifier::Forall),
                            other => {
                                return Err(syntax(
                                    l,
                                    c,
                                    format!("quantifier must be exists or forall, found {other:?}"),
                                ))
                            }
                        },
                        Some((t, l, c)) => {
                            return Err(syntax(l, c, format!("unexpected {t:?} in prefix")))
                        }
                        None => {
                            return Err(syntax(
                                self.lexer.line,
                                self.lexer.col,
                                "unexpected end of input",
                            ))
                        }
                    }
                }
                prefix = Some(quants);
            } else {
                self.lexer.push_back(lparen);
            }
        }
        Ok(prefix)
    }

    fn parse_clause(&mut self, top: bool) -> Result<FormulaNode, FormulaError> {
        match self.lexer.next_token() {
            Some((Token::Word(w), l, c)) => match w.as_str() {
                "true" if top => Ok(FormulaNode::And(Vec::new())),
                "false" if top => Ok(FormulaNode::Or(Vec::new())),
                other => Err(syntax(l, c, format!("unexpected token {other:?}"))),
            },
            Some((Token::LParen, _, _)) => {
                let (op, l, c) = self.expect_word()?;
                match op.as_str() {
                    "and" | "or" => {
                        let mut children = Vec::new();
                        loop {
                            match self.lexer.peek_token() {
                                Some((Token::RParen, _, _)) => {
                                    self.lexer.next_token();
                                    break;
                                }
                                Some(_) => children.push(self.parse_clause(false)?),
                                None => {
                                    return Err(syntax(
                                        self.lexer.line,
                                        self.lexer.col,
                                        "unexpected end of input",
                                    ))
                                }
                            }
                        }
                        if children.is_empty() && !top {
                            return Err(syntax(l, c, "empty and/or only allowed at top level"));
                        }
                        Ok(if op == "and" {
                            FormulaNode::And(children)
                        } else {
                            FormulaNode::Or(children)
                        })
                    }
                    "not" => {
                        let inner = self.parse_clause(false)?;
                        self.expect_rparen()?;
                        Ok(FormulaNode::Not(Box::new(inner)))
                    }
                    "=0" => {
                        let poly = self.parse_poly()?;
                        self.expect_rparen()?;
                        Ok(FormulaNode::Atom(self.poly_to_atom(poly)))
                    }
                    other => Err(syntax(l, c, format!("unknown clause operator {other:?}"))),
                }
            }
            Some((Token::RParen, l, c)) => Err(syntax(l, c, "unexpected ')'")),
            None => Err(syntax(
                self.lexer.line,
                self.lexer.col,
                "unexpected end of input",
            )),
        }
    }

    /// Sparse multivariate polynomial over rationals, keyed by exponent vector.
    fn parse_poly(&mut self) -> Result<BTreeMap<Vec<u32>, BigRational>, FormulaError> {
        match self.lexer.next_token() {
            Some((Token::Word(w), l, c)) => self.word_to_poly(&w, l, c),
            Some((Token::LParen, _, _)) => {
                let (op, l, c) = self.expect_word()?;
                match op.as_str() {
                    "+" => {
                        let mut acc: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
                        let mut any = false;
                        loop {
                            match self.lexer.peek_token() {
                                Some((Token::RParen, _, _)) => {
                                    self.lexer.next_token();
                                    break;
                                }
                                Some(_) => {
                                    let term = self.parse_poly()?;
                                    for (e, q) in term {
                                        let entry = acc.entry(e).or_insert_with(BigRational::zero);
                                        *entry += q;
                                    }
                                    any = true;
                                }
                                None => {
                                    return Err(syntax(
                                        self.lexer.line,
                                        self.lexer.col,
                                        "unexpected end of input",
                                    ))
                                }
                            }
                        }
                        if !any {
                            return Err(syntax(l, c, "(+ ...) needs at least one summand"));
                        }
                        acc.retain(|_, q| !q.is_zero());
                        Ok(acc)
                    }
                    "*" => {
                        let mut acc: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
                        acc.insert(vec![0; self.blocks.coord_count()], BigRational::one());
                        let mut any = false;
                        loop {
                            match self.lexer.peek_token() {
                                Some((Token::RParen, _, _)) => {
                                    self.lexer.next_token();
                                    break;
                                }
                                Some(_) => {
                                    let factor = self.parse_poly()?;
                                    acc = poly_product(&acc, &factor);
                                    any = true;
                                }
                                None => {
                                    return Err(syntax(
                                        self.lexer.line,
                                        self.lexer.col,
                                        "unexpected end of input",
                                    ))
                                }
                            }
                        }
                        if !any {
                            return Err(syntax(l, c, "(* ...) needs at least one factor"));
                        }
                        Ok(acc)
                    }
                    other => Err(syntax(
                        l,
                        c,
                        format!("unknown polynomial operator {other:?}"),
                    )),
                }
            }
            Some((Token::RParen, l, c)) => Err(syntax(l, c, "unexpected ')' in polynomial")),
            None => Err(syntax(
                self.lexer.line,
                self.lexer.col,
                "unexpected end of input",
            )),
        }
    }

    fn word_to_poly(
        &self,
        w: &str,
        l: usize,
        c: usize,
    ) -> Result<BTreeMap<Vec<u32>, BigRational>, FormulaError> {
        let width = self.blocks.coord_count();
        // integer or rational literal
        if w.starts_with('-')
            || w.starts_with('+')
            || w.chars().next().is_some_and(|ch| ch.is_ascii_digit())
        {
            let value: BigRational = if let Some((num, den)) = w.split_once('/') {
                let n: BigInt = num
                    .parse()
                    .map_err(|_| syntax(l, c, format!("invalid numerator {num:?}")))?;
                let d: BigInt = den
                    .parse()
                    .map_err(|_| syntax(l, c, format!("invalid denominator {den:?}")))?;
                if d.is_zero() {
                    return Err(syntax(l, c, "zero denominator"));
                }
                BigRational::new(n, d)
            } else {
                let n: BigInt = w
                    .parse()
                    .map_err(|_| syntax(l, c, format!("invalid integer {w:?}")))?;
                BigRational::from_integer(n)
            };
            let mut m = BTreeMap::new();
            if !value.is_zero() {
                m.insert(vec![0; width], value);
            }
            return Ok(m);
        }
        // variable: (w|x)<blockIdx>_<coordIdx>, zero-indexed within its kind
        let kind = w.chars().next();
        let rest = &w[1..];
        let (bi_str, ci_str) = rest
            .split_once('_')
            .ok_or_else(|| syntax(l, c, format!("invalid variable {w:?}")))?;
        let bi: usize = bi_str
            .parse()
            .map_err(|_| syntax(l, c, format!("invalid block index in {w:?}")))?;
        let ci: usize = ci_str
            .parse()
            .map_err(|_| syntax(l, c, format!("invalid coordinate index in {w:?}")))?;
        let block = match kind {
            Some('w') => {
                if bi >= self.free_count {
                    return Err(syntax(l, c, format!("free block index {bi} out of range")));
                }
                bi
            }
            Some('x') => {
                let bound = self.blocks.len() - self.free_count;
                if bi >= bound {
                    return Err(syntax(l, c, format!("bound block index {bi} out of range")));
                }
                self.free_count + bi
            }
            _ => return Err(syntax(l, c, format!("invalid variable {w:?}"))),
        };
        if ci > self.blocks.dim(block) {
            return Err(syntax(
                l,
                c,
                format!(
                    "coordinate index {ci} out of range for block of dimension {}",
                    self.blocks.dim(block)
                ),
            ));
        }
        let mut exps = vec![0u32; width];
        exps[self.blocks.coord_offset(block) + ci] = 1;
        let mut m = BTreeMap::new();
        m.insert(exps, BigRational::one());
        Ok(m)
    }

    /// Clears denominators (multiply through by the lcm) and builds the atom.
    fn poly_to_atom(&self, poly: BTreeMap<Vec<u32>, BigRational>) -> MultiHomPoly {
        let mut lcm = BigInt::one();
        for q in poly.values() {
            lcm = lcm.lcm(q.denom());
        }
        let terms: BTreeMap<Vec<u32>, BigInt> = poly
            .into_iter()
            .map(|(e, q)| {
                let scaled = q * BigRational::from_integer(lcm.clone());
                debug_assert!(scaled.is_integer());
                (e, scaled.to_integer())
            })
            .collect();
        MultiHomPoly::new(self.blocks.clone(), terms)
    }
}

fn poly_product(
    a: &BTreeMap<Vec<u32>, BigRational>,
    b: &BTreeMap<Vec<u32>, BigRational>,
) -> BTreeMap<Vec<u32>, BigRational> {
    let mut out: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
            let entry = out.entry(e).or_insert_with(BigRational::zero);
            *entry += ca * cb;
        }
    }
    out.retain(|_, q| !q.is_zero());
    out
}

/// Parses the s-expression formula format:
///
/// ```text
/// file      := header body
/// header    := "(blocks" blockdecl+ ")" ["(prefix" ("exists"|"forall")+ ")"]
/// blockdecl := "(" ("w"|"x") <dim> ")"        ; w = free, x = bound
/// body      := clause
/// clause    := "(and" clause+ ")" | "(or" clause+ ")" | "(=0" poly ")"
/// poly      := factor | "(+" poly+ ")" | "(*" poly+ ")"
/// factor    := int | int/int | var
/// var       := ("w"|"x")<blockIdx>"_"<coordIdx>
/// ```
///
/// `(and)` / `(or)` (or the words `true` / `false`) are accepted at top level
/// only, as the trivial and the empty realization. `;` starts a line comment.
pub fn parse_formula(text: &str) -> Result<ProperFormula, FormulaError> {
    let mut parser = Parser {
        lexer: Lexer::new(text),
        blocks: BlockSignature::empty(),
        free_count: 0,
    };
    let prefix = parser.parse_header()?;
    let tree = parser.parse_clause(true)?;
    if let Some((t, l, c)) = parser.lexer.next_token() {
        return Err(syntax(l, c, format!("trailing input {t:?}")));
    }
    ProperFormula::new(parser.blocks, parser.free_count, tree, prefix)
}

// ---------------------------------------------------------------------------
// Formatter
// ---------------------------------------------------------------------------

fn var_name(f: &ProperFormula, block: usize, coord: usize) -> String {
    if block < f.free_count() {
        format!("w{block}_{coord}")
    } else {
        format!("x{}_{coord}", block - f.free_count())
    }
}

fn write_atom(out: &mut String, atom: &MultiHomPoly, f: &ProperFormula) {
    out.push_str("(=0 ");
    if atom.is_zero() {
        out.push('0');
    } else {
        let single = atom.terms().len() == 1;
        if !single {
            out.push_str("(+ ");
        }
        let mut first = true;
        for (exps, coeff) in atom.terms() {
            if !first {
                out.push(' ');
            }
            first = false;
            out.push_str("(* ");
            out.push_str(&coeff.to_string());
            for b in 0..f.blocks().len() {
                let off = f.blocks().coord_offset(b);
                for k in 0..=f.blocks().dim(b) {
                    for _ in 0..exps[off + k] {
                        out.push(' ');
                        out.push_str(&var_name(f, b, k));
                    }
                }
            }
            out.push(')');
        }
        if !single {
            out.push(')');
        }
    }
    out.push(')');
}

fn write_node(out: &mut String, node: &FormulaNode, f: &ProperFormula) {
    match node {
        FormulaNode::And(cs) => {
            out.push_str("(and");
            for c in cs {
                out.push(' ');
                write_node(out, c, f);
            }
            out.push(')');
        }
        FormulaNode::Or(cs) => {
            out.push_str("(or");
            for c in cs {
                out.push(' ');
                write_node(out, c, f);
            }
            out.push(')');
        }
        FormulaNode::Not(c) => {
            out.push_str("(not ");
            write_node(out, c, f);
            out.push(')');
        }
        FormulaNode::Atom(a) => write_atom(out, a, f),
    }
}

/// Canonical text; `parse_formula(format_formula(f))` is structurally `f`.
pub fn format_formula(f: &ProperFormula) -> String {
    let mut out = String::from("(blocks");
    for b in 0..f.blocks().len() {
        let kind = if b < f.free_count() { "w" } else { "x" };
        out.push_str(&format!(" ({kind} {})", f.blocks().dim(b)));
    }
    out.push(')');
    if let Some(prefix) = f.prefix() {
        out.push_str("\n(prefix");
        for q in prefix {
            out.push_str(&format!(" {q}"));
        }
        out.push(')');
    }
    out.push('\n');
    write_node(&mut out, f.tree(), f);
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Quantifier-free formula realizing the worked two-quantifier instance:
    /// one free P^1 block and two bound P^1 blocks; two branches selecting the
    /// diagonal point or the (2:1) point of the W line.
    pub(crate) fn example_psi_text() -> &'static str {
        "(blocks (w 1) (x 1) (x 1))\n\
         (or (and (=0 (+ w0_0 (* -1 w0_1))) (=0 (+ x0_0 (* -1 x0_1))))\n\
             (and (=0 (+ w0_0 (* -2 w0_1))) (=0 (+ x0_0 (* -2 x0_1))) (=0 (+ x1_0 (* -2 x1_1)))))"
    }

    #[test]
    fn parses_the_worked_example() {
        let f = parse_formula(example_psi_text()).unwrap();
        assert_eq!(f.blocks().dims(), &[1, 1, 1]);
        assert_eq!(f.free_count(), 1);
        assert_eq!(f.bound_count(), 2);
        assert_eq!(f.atom_count(), 5);
        match f.tree() {
            FormulaNode::Or(cs) => assert_eq!(cs.len(), 2),
            other => panic!("expected Or at top, got {other:?}"),
        }
    }

    #[test]
    fn single_atom_on_p1() {
        let f = parse_formula("(blocks (x 1)) (=0 x0_0)").unwrap();
        assert_eq!(f.free_count(), 0);
        assert_eq!(f.atom_count(), 1);
        match f.tree() {
            FormulaNode::Atom(a) => {
                assert_eq!(a.multidegree(), &[1]);
                assert_eq!(a.term_count(), 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negation_is_a_validation_error() {
        let err = parse_formula("(blocks (x 1)) (not (=0 x0_0))").unwrap_err();
        assert!(
            matches!(err, FormulaError::NegationPresent { .. }),
            "{err:?}"
        );
    }

    #[test]
    fn inhomogeneous_atom_is_rejected() {
        let err = parse_formula("(blocks (x 1)) (=0 (+ (* x0_0 x0_0) x0_1))").unwrap_err();
        match err {
            FormulaError::NotMultiHomogeneous { block, .. } => assert_eq!(block, 0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn homogeneous_atom_passes_validation() {
        // X_{1,0} - X_{1,1} on P^1: multidegree (1)
        let f = parse_formula("(blocks (x 1)) (=0 (+ x0_0 (* -1 x0_1)))").unwrap();
        match f.tree() {
            FormulaNode::Atom(a) => assert_eq!(a.multidegree(), &[1]),
            other => panic!("{other:?}"),
        }
        // the example's atoms have multidegrees e_1, e_2, e_3 over 3 blocks
        let g = parse_formula(example_psi_text()).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        collect_multidegrees(g.tree(), &mut seen);
        assert_eq!(
            seen,
            [vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]
                .into_iter()
                .collect()
        );
    }

    fn collect_multidegrees(node: &FormulaNode, out: &mut std::collections::BTreeSet<Vec<u32>>) {
        match node {
            FormulaNode::And(cs) | FormulaNode::Or(cs) => {
                cs.iter().for_each(|c| collect_multidegrees(c, out))
            }
            FormulaNode::Not(c) => collect_multidegrees(c, out),
            FormulaNode::Atom(a) => {
                out.insert(a.multidegree().to_vec());
            }
        }
    }

    #[test]
    fn rational_coefficients_are_cleared() {
        let f = parse_formula("(blocks (x 1)) (=0 (+ (* 1/2 x0_0) (* 1/3 x0_1)))").unwrap();
        match f.tree() {
            FormulaNode::Atom(a) => {
                // lex term order puts the x0_1 term (cleared to 2) first
                let coeffs: Vec<BigInt> = a.terms().values().cloned().collect();
                assert_eq!(coeffs, vec![BigInt::from(2), BigInt::from(3)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sentinels_only_at_top_level() {
        let t = parse_formula("(blocks (x 1)) (and)").unwrap();
        assert!(t.tree().is_and_true());
        let f = parse_formula("(blocks (x 1)) (or)").unwrap();
        assert!(f.tree().is_or_false());
        assert!(parse_formula("(blocks (x 1)) true")
            .unwrap()
            .tree()
            .is_and_true());
        let err = parse_formula("(blocks (x 1)) (and (or) (=0 x0_0))").unwrap_err();
        assert!(matches!(err, FormulaError::Syntax { .. }), "{err:?}");
    }

    #[test]
    fn prefix_parses_and_length_checked() {
        let f = parse_formula(
            "(blocks (w 1) (x 1) (x 1)) (prefix exists forall) (=0 (+ x0_0 (* -1 x0_1)))",
        )
        .unwrap();
        assert_eq!(
            f.prefix().unwrap(),
            &[Quantifier::Exists, Quantifier::Forall]
        );
        let err =
            parse_formula("(blocks (w 1) (x 1)) (prefix exists forall) (=0 x0_0)").unwrap_err();
        assert!(
            matches!(
                err,
                FormulaError::PrefixLengthMismatch {
                    expected: 1,
                    got: 2
                }
            ),
            "{err:?}"
        );
    }

    #[test]
    fn canonicalization_is_order_insensitive() {
        // the same formula written with branches and summands permuted
        // parses to the same canonical AST
        let a = parse_formula(
            "(blocks (x 1)) (or (=0 (+ x0_0 (* -1 x0_1))) (and (=0 x0_0) (=0 x0_1)))",
        )
        .unwrap();
        let b = parse_formula(
            "(blocks (x 1)) (or (and (=0 x0_1) (=0 x0_0)) (=0 (+ (* -1 x0_1) x0_0)))",
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn format_round_trips_the_example() {
        let f = parse_formula(example_psi_text()).unwrap();
        let text = format_formula(&f);
        let g = parse_formula(&text).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn substitute_identity_and_offsets() {
        let f = parse_formula("(blocks (x 1)) (=0 (+ x0_0 (* -1 x0_1)))").unwrap();
        // identity
        let id = BlockMapping {
            target: f.blocks().clone(),
            target_free_count: 0,
            slots: vec![(0, 0)],
        };
        assert_eq!(substitute_blocks(&f, &id).unwrap().tree(), f.tree());
        // into slot t=2 of a P^7 block: coordinates 4, 5
        let map = BlockMapping {
            target: BlockSignature::new(vec![7]),
            target_free_count: 0,
            slots: vec![(0, 4)],
        };
        let g = substitute_blocks(&f, &map).unwrap();
        match g.tree() {
            FormulaNode::Atom(a) => {
                let mut mentioned: Vec<usize> = a
                    .terms()
                    .keys()
                    .flat_map(|e| e.iter().enumerate().filter(|(_, &x)| x > 0).map(|(i, _)| i))
                    .collect();
                mentioned.sort_unstable();
                assert_eq!(mentioned, vec![4, 5]);
            }
            other => panic!("{other:?}"),
        }
        // wrong width
        let bad = BlockMapping {
            target: BlockSignature::new(vec![1]),
            target_free_count: 0,
            slots: vec![(0, 1)],
        };
        assert!(matches!(
            substitute_blocks(&f, &bad),
            Err(FormulaError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn substitute_preserves_shape_counts() {
        let f = parse_formula(example_psi_text()).unwrap();
        let map = BlockMapping {
            target: BlockSignature::new(vec![1, 7, 35]),
            target_free_count: 1,
            slots: vec![(0, 0), (1, 2), (2, 10)],
        };
        let g = substitute_blocks(&f, &map).unwrap();
        assert_eq!(g.atom_count(), f.atom_count());
        assert_eq!(g.node_count(), f.node_count());
    }

    // random quantifier-free formulas over small signatures, built from
    // single-variable linear atoms, for the parse/format round-trip property
    fn arb_formula() -> impl Strategy<Value = ProperFormula> {
        let sig = proptest::collection::vec(0usize..3, 1..3);
        (sig, 0usize..3).prop_flat_map(|(dims, depth)| {
            let blocks = BlockSignature::new(dims);
            arb_node(blocks.clone(), depth)
                .prop_map(move |tree| ProperFormula::new(blocks.clone(), 0, tree, None).unwrap())
        })
    }

    fn arb_node(blocks: BlockSignature, depth: usize) -> BoxedStrategy<FormulaNode> {
        let atom = {
            let blocks = blocks.clone();
            (0usize..blocks.len(), any::<i64>()).prop_map(move |(b, c)| {
                let b = b % blocks.len();
                let cosize = blocks.dim(b) + 1;
                let mut terms = BTreeMap::new();
                for k in 0..cosize {
                    let mut e = vec![0u32; blocks.coord_count()];
                    e[blocks.coord_offset(b) + k] = 1;
                    let coeff = BigInt::from(c.wrapping_add(k as i64) | 1);
                    terms.insert(e, coeff);
                }
                FormulaNode::Atom(MultiHomPoly::new(blocks.clone(), terms))
            })
        };
        if depth == 0 {
            atom.boxed()
        } else {
            let inner = arb_node(blocks, depth - 1);
            prop_oneof![
                atom,
                proptest::collection::vec(inner.clone(), 1..3).prop_map(FormulaNode::And),
                proptest::collection::vec(inner, 1..3).prop_map(FormulaNode::Or),
            ]
            .boxed()
        }
    }

    proptest! {
        #[test]
        fn parse_format_identity(f in arb_formula()) {
            let text = format_formula(&f);
            let g = parse_formula(&text).unwrap();
            prop_assert_eq!(f, g);
        }

        /// Bumping one exponent of one term de-homogenizes the atom, and
        /// validation must notice; restoring it must validate again.
        #[test]
        fn validation_detects_dehomogenized_atoms(
            f in arb_formula(),
            term_pick in any::<u64>(),
            coord_pick in any::<u64>(),
        ) {
            prop_assume!(f.atom_count() > 0);
            fn first_atom_mut(node: &mut FormulaNode) -> Option<&mut MultiHomPoly> {
                match node {
                    FormulaNode::Atom(a) => Some(a),
                    FormulaNode::And(cs) | FormulaNode::Or(cs) => {
                        cs.iter_mut().find_map(first_atom_mut)
                    }
                    FormulaNode::Not(c) => first_atom_mut(c),
                }
            }
            let mut tree = f.tree().clone();
            let atom = first_atom_mut(&mut tree).unwrap();
            prop_assume!(!atom.is_zero());
            let keys: Vec<Vec<u32>> = atom.terms().keys().cloned().collect();
            let key = &keys[(term_pick as usize) % keys.len()];
            let mut bumped = key.clone();
            let coord = (coord_pick as usize) % bumped.len();
            bumped[coord] += 1;
            // only a corruption if the bumped exponent vector is new
            prop_assume!(!atom.terms().contains_key(&bumped));
            let coeff = atom.terms()[key].clone();
            let mut terms = atom.terms().clone();
            terms.remove(key);
            terms.insert(bumped, coeff);
            // multidegree needs at least one untouched term to disagree with
            prop_assume!(terms.len() > 1);
            *atom = MultiHomPoly::new(atom.blocks().clone(), terms);
            let corrupted = ProperFormula::new(f.blocks().clone(), f.free_count(), tree, None);
            let rejected = matches!(corrupted, Err(FormulaError::NotMultiHomogeneous { .. }));
            prop_assert!(rejected);
        }
    }
}
