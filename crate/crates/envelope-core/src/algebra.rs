//! Finite event algebras generated by two partitions.
//!
//! An [`AtomSpace`] is the grid of nonempty atoms `H_i ∧ E_j` given by a
//! compatibility matrix. Events are atom bitsets; subalgebras are block
//! partitions of an index universe (atoms, conditioning rows, or capacity
//! ground elements, depending on the caller).

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("row or column {0} has no compatible atom")]
    EmptyRowOrColumn(String),
    #[error("index out of range: {0}")]
    BadIndex(String),
    #[error("conditioning event is empty")]
    EmptyConditioning,
    #[error("invalid subalgebra: {0}")]
    BadSubalgebra(String),
    #[error("parse error at byte {at}: {msg}")]
    Parse { at: usize, msg: String },
}

/// The finite atom grid. Atom ids are row-major over the true compat entries
/// and stable under that ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomSpace {
    n_rows: usize,
    n_cols: usize,
    compat: Vec<bool>,
    // (row, col) per atom id, row-major.
    atoms: Vec<(usize, usize)>,
    // (row, col) -> atom id.
    index: Vec<Option<usize>>,
}

impl AtomSpace {
    /// Validates the compat matrix: every row and every column must contain an atom
    /// (both families are partitions of Ω).
    pub fn build(n_rows: usize, n_cols: usize, compat: Vec<bool>) -> Result<Self, AlgebraError> {
        if n_rows == 0 || n_cols == 0 || compat.len() != n_rows * n_cols {
            return Err(AlgebraError::BadIndex(format!(
                "compat matrix must be {n_rows}x{n_cols}"
            )));
        }
        for i in 0..n_rows {
            if !(0..n_cols).any(|j| compat[i * n_cols + j]) {
                return Err(AlgebraError::EmptyRowOrColumn(format!("H{}", i + 1)));
            }
        }
        for j in 0..n_cols {
            if !(0..n_rows).any(|i| compat[i * n_cols + j]) {
                return Err(AlgebraError::EmptyRowOrColumn(format!("E{}", j + 1)));
            }
        }
        let mut atoms = Vec::new();
        let mut index = vec![None; n_rows * n_cols];
        for i in 0..n_rows {
            for j in 0..n_cols {
                if compat[i * n_cols + j] {
                    index[i * n_cols + j] = Some(atoms.len());
                    atoms.push((i, j));
                }
            }
        }
        Ok(AtomSpace {
            n_rows,
            n_cols,
            compat,
            atoms,
            index,
        })
    }

    /// Full grid: every H_i ∧ E_j nonempty.
    pub fn full(n_rows: usize, n_cols: usize) -> Self {
        Self::build(n_rows, n_cols, vec![true; n_rows * n_cols]).expect("full grid is valid")
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn compatible(&self, row: usize, col: usize) -> bool {
        self.compat[row * self.n_cols + col]
    }

    /// Atom id of (row, col) if compatible.
    pub fn atom_id(&self, row: usize, col: usize) -> Option<usize> {
        self.index[row * self.n_cols + col]
    }

    /// (row, col) of an atom id.
    pub fn atom_coords(&self, atom: usize) -> (usize, usize) {
        self.atoms[atom]
    }

    pub fn empty_event(&self) -> Event {
        Event::empty(self.n_atoms())
    }

    pub fn omega(&self) -> Event {
        Event::full(self.n_atoms())
    }

    /// The conditioning cell H_i as an event (0-based row index).
    pub fn row_event(&self, i: usize) -> Result<Event, AlgebraError> {
        if i >= self.n_rows {
            return Err(AlgebraError::BadIndex(format!("H{}", i + 1)));
        }
        let mut e = self.empty_event();
        for (a, &(r, _)) in self.atoms.iter().enumerate() {
            if r == i {
                e.insert(a);
            }
        }
        Ok(e)
    }

    /// The observable cell E_j as an event (0-based column index).
    pub fn col_event(&self, j: usize) -> Result<Event, AlgebraError> {
        if j >= self.n_cols {
            return Err(AlgebraError::BadIndex(format!("E{}", j + 1)));
        }
        let mut e = self.empty_event();
        for (a, &(_, c)) in self.atoms.iter().enumerate() {
            if c == j {
                e.insert(a);
            }
        }
        Ok(e)
    }

    /// Single-atom event for (row, col); empty if the pair is incompatible.
    pub fn atom_event(&self, row: usize, col: usize) -> Result<Event, AlgebraError> {
        if row >= self.n_rows || col >= self.n_cols {
            return Err(AlgebraError::BadIndex(format!("({},{})", row + 1, col + 1)));
        }
        let mut e = self.empty_event();
        if let Some(a) = self.atom_id(row, col) {
            e.insert(a);
        }
        Ok(e)
    }

    /// Evaluates an expression over H_i/E_j generators to an atom mask.
    pub fn event_of(&self, expr: &Expr) -> Result<Event, AlgebraError> {
        match expr {
            Expr::Omega => Ok(self.omega()),
            Expr::Empty => Ok(self.empty_event()),
            Expr::H(i) => self.row_event(*i),
            Expr::E(j) => self.col_event(*j),
            Expr::Ident(name) => Err(AlgebraError::Parse {
                at: 0,
                msg: format!("unknown identifier {name:?} on an atom space"),
            }),
            Expr::Not(e) => Ok(self.event_of(e)?.complement()),
            Expr::And(a, b) => Ok(self.event_of(a)?.and(&self.event_of(b)?)),
            Expr::Or(a, b) => Ok(self.event_of(a)?.or(&self.event_of(b)?)),
        }
    }

    /// Parses and evaluates an event expression, e.g. `"H1 & !(E2 | H3)"`.
    pub fn parse_event(&self, text: &str) -> Result<Event, AlgebraError> {
        self.event_of(&parse_expr(text)?)
    }
}

/// Event expression over the two generating partitions. Indices are 0-based.
/// Free identifiers (anything not of the `H<k>`/`E<k>` form) are kept verbatim
/// for resolvers with richer vocabularies; atom-space evaluation rejects them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Omega,
    Empty,
    H(usize),
    E(usize),
    Ident(String),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

/// An event as a bitset of atom ids. Value type; structural equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    n_atoms: usize,
    words: Vec<u64>,
}

impl Event {
    pub fn empty(n_atoms: usize) -> Self {
        Event {
            n_atoms,
            words: vec![0; n_atoms.div_ceil(64)],
        }
    }

    pub fn full(n_atoms: usize) -> Self {
        Event::empty(n_atoms).complement()
    }

    pub fn from_atoms(n_atoms: usize, atoms: &[usize]) -> Self {
        let mut e = Event::empty(n_atoms);
        for &a in atoms {
            e.insert(a);
        }
        e
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn insert(&mut self, atom: usize) {
        assert!(atom < self.n_atoms, "atom {atom} out of range");
        self.words[atom / 64] |= 1 << (atom % 64);
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.words[atom / 64] & (1 << (atom % 64)) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn zip_with(&self, other: &Event, f: impl Fn(u64, u64) -> u64) -> Event {
        assert_eq!(self.n_atoms, other.n_atoms, "events over different spaces");
        Event {
            n_atoms: self.n_atoms,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn and(&self, other: &Event) -> Event {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Event) -> Event {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn minus(&self, other: &Event) -> Event {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Event {
        let mut e = Event {
            n_atoms: self.n_atoms,
            words: self.words.iter().map(|&w| !w).collect(),
        };
        // Mask off padding bits beyond n_atoms.
        let tail = self.n_atoms % 64;
        if tail != 0 {
            if let Some(last) = e.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        e
    }

    pub fn is_subset(&self, other: &Event) -> bool {
        assert_eq!(self.n_atoms, other.n_atoms, "events over different spaces");
        self.words
            .iter()
            .zip(&other.words)
            .all(|(&a, &b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &Event) -> bool {
        !self.and(other).is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_atoms).filter(move |&a| self.contains(a))
    }
}

/// Checks the GN-implication `E|H ⊑ F|K`: `E∧H ⊆ F∧K` and `E^c∧H ⊇ F^c∧K`.
/// Every coherent conditional probability is monotone along this order.
pub fn gn_implies(e: &Event, h: &Event, f: &Event, k: &Event) -> Result<bool, AlgebraError> {
    if h.is_empty() || k.is_empty() {
        return Err(AlgebraError::EmptyConditioning);
    }
    let first = e.and(h).is_subset(&f.and(k));
    let second = f.complement().and(k).is_subset(&e.complement().and(h));
    Ok(first && second)
}

/// A partition of an index universe `0..n_universe` into labeled blocks.
/// The generated algebra consists of the 2^(#blocks) block unions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subalgebra {
    n_universe: usize,
    blocks: Vec<Vec<usize>>,
}

impl Subalgebra {
    pub fn new(n_universe: usize, blocks: Vec<Vec<usize>>) -> Result<Self, AlgebraError> {
        let mut seen = vec![false; n_universe];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(AlgebraError::BadSubalgebra(format!("block {b} is empty")));
            }
            for &x in block {
                if x >= n_universe {
                    return Err(AlgebraError::BadSubalgebra(format!(
                        "block {b} references {x} outside universe 0..{n_universe}"
                    )));
                }
                if seen[x] {
                    return Err(AlgebraError::BadSubalgebra(format!(
                        "element {x} appears in two blocks"
                    )));
                }
                seen[x] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(AlgebraError::BadSubalgebra(format!(
                "element {missing} not covered by any block"
            )));
        }
        let mut blocks = blocks;
        for b in &mut blocks {
            b.sort_unstable();
        }
        Ok(Subalgebra { n_universe, blocks })
    }

    /// One block per element.
    pub fn discrete(n_universe: usize) -> Self {
        Subalgebra::new(n_universe, (0..n_universe).map(|i| vec![i]).collect())
            .expect("discrete partition is valid")
    }

    pub fn n_universe(&self) -> usize {
        self.n_universe
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    /// Block containing a given element.
    pub fn block_of(&self, element: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.binary_search(&element).is_ok())
            .expect("universe covered by construction")
    }

    /// True iff the index set is a union of blocks (i.e. a member of the algebra).
    pub fn is_member(&self, set: &[usize]) -> bool {
        let mut in_set = vec![false; self.n_universe];
        for &x in set {
            if x >= self.n_universe {
                return false;
            }
            in_set[x] = true;
        }
        self.blocks.iter().all(|block| {
            let k = block.iter().filter(|&&x| in_set[x]).count();
            k == 0 || k == block.len()
        })
    }
}

/// All partitions of the block set of `sub`, finest first, as lists of parts
/// (each part a sorted list of block indices). Bounded by `max_count` partitions.
///
/// These are exactly the finite partitions of Ω into subalgebra events over
/// which the joint-envelope suprema are taken; on finite quotients the finest
/// partition (yielded first) attains every supremum used downstream.
pub fn finite_partitions(sub: &Subalgebra, max_count: usize) -> Vec<Vec<Vec<usize>>> {
    let n = sub.n_blocks();
    if max_count == 0 {
        return Vec::new();
    }
    let finest: Vec<Vec<usize>> = (0..n).map(|b| vec![b]).collect();
    let mut out = vec![finest];
    // Restricted-growth-string enumeration of the remaining set partitions,
    // stopping at max_count (the RGS 0,1,..,n-1 is the finest, already yielded).
    let mut rgs = vec![0usize; n];
    loop {
        if out.len() >= max_count {
            return out;
        }
        let n_parts = rgs.iter().copied().max().map_or(0, |m| m + 1);
        if n_parts < n {
            let mut parts: Vec<Vec<usize>> = vec![Vec::new(); n_parts];
            for (i, &p) in rgs.iter().enumerate() {
                parts[p].push(i);
            }
            out.push(parts);
        }
        // Next RGS: increment the rightmost position below its growth cap.
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if i == 0 {
                continue;
            }
            let cap = rgs[..i].iter().copied().max().unwrap() + 1;
            if rgs[i] < cap {
                rgs[i] += 1;
                for r in rgs.iter_mut().skip(i + 1) {
                    *r = 0;
                }
                break;
            }
        }
    }
}

// --- expression parser -----------------------------------------------------

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

/// Parses `H<k>`/`E<k>` generators (1-based in text), `&`, `|`, `!`, parens,
/// and the constants `omega`/`empty`.
pub fn parse_expr(text: &str) -> Result<Expr, AlgebraError> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(AlgebraError::Parse {
            at: p.pos,
            msg: "trailing input".into(),
        });
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, AlgebraError> {
        let mut e = self.term()?;
        while self.peek() == Some(b'|') {
            self.pos += 1;
            let rhs = self.term()?;
            e = Expr::Or(Box::new(e), Box::new(rhs));
        }
        Ok(e)
    }

    fn term(&mut self) -> Result<Expr, AlgebraError> {
        let mut e = self.factor()?;
        while self.peek() == Some(b'&') {
            self.pos += 1;
            let rhs = self.factor()?;
            e = Expr::And(Box::new(e), Box::new(rhs));
        }
        Ok(e)
    }

    fn factor(&mut self) -> Result<Expr, AlgebraError> {
        match self.peek() {
            Some(b'!') => {
                self.pos += 1;
                Ok(Expr::Not(Box::new(self.factor()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(AlgebraError::Parse {
                        at: self.pos,
                        msg: "expected ')'".into(),
                    });
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(AlgebraError::Parse {
                at: self.pos,
                msg: "expected '!', '(', or an identifier".into(),
            }),
        }
    }

    fn ident(&mut self) -> Result<Expr, AlgebraError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        match word.to_ascii_lowercase().as_str() {
            "omega" => return Ok(Expr::Omega),
            "empty" => return Ok(Expr::Empty),
            _ => {}
        }
        let (kind, digits) = word.split_at(1);
        if let Ok(idx) = digits.parse::<usize>() {
            if idx == 0 {
                return Err(AlgebraError::Parse {
                    at: start,
                    msg: "indices are 1-based".into(),
                });
            }
            match kind {
                "H" | "h" => return Ok(Expr::H(idx - 1)),
                "E" | "e" => return Ok(Expr::E(idx - 1)),
                _ => {}
            }
        }
        Ok(Expr::Ident(word.to_string()))
    }
}
