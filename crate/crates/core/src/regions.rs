//! Region abstraction of markings.
//!
//! A [`Symbol`] is a set of `(place, integer age)` pairs describing all
//! tokens that share one fractional clock value. A [`Word`] lists symbols by
//! ascending fractional value, position 0 holding the tokens whose age is an
//! integer. A [`SimpleExpr`] is a word in which some positions carry a Kleene
//! star; it denotes the downward closure of all markings whose abstraction it
//! matches.
//!
//! Symbols are bitsets over `|P| * (cmax + 2)` positions in place-major
//! order, so structural equality coincides with set equality. Interpreting
//! the bits needs an [`Alphabet`], which also renders and parses the textual
//! syntax `{p:0,q:1} {}*`.

use std::fmt::Write as _;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{Age, Marking, Net, PlaceId};

/// Canonical bitset: no trailing zero words, so equal sets compare equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    words: Vec<u64>,
}

impl Symbol {
    pub fn empty() -> Self {
        Symbol { words: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains_bit(&self, bit: usize) -> bool {
        self.words
            .get(bit / 64)
            .is_some_and(|w| w & (1 << (bit % 64)) != 0)
    }

    pub fn insert_bit(&mut self, bit: usize) {
        let idx = bit / 64;
        if self.words.len() <= idx {
            self.words.resize(idx + 1, 0);
        }
        self.words[idx] |= 1 << (bit % 64);
    }

    /// In-place union; reports whether `self` grew.
    pub fn union_with(&mut self, other: &Symbol) -> bool {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        let mut changed = false;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            let next = *a | *b;
            changed |= next != *a;
            *a = next;
        }
        changed
    }

    pub fn union(&self, other: &Symbol) -> Symbol {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn is_subset(&self, other: &Symbol) -> bool {
        self.words.iter().enumerate().all(|(i, &w)| {
            let o = other.words.get(i).copied().unwrap_or(0);
            w & !o == 0
        })
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn bits(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64)
                .filter(move |b| w & (1 << b) != 0)
                .map(move |b| i * 64 + b)
        })
    }
}

/// Interpretation of symbol bits for one net and one `cmax`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    places: Vec<String>,
    cmax: u32,
}

impl Alphabet {
    pub fn new(places: Vec<String>, cmax: u32) -> Self {
        Alphabet { places, cmax }
    }

    pub fn for_net(net: &Net, cmax: u32) -> Self {
        Alphabet::new(net.places().to_vec(), cmax)
    }

    pub fn cmax(&self) -> u32 {
        self.cmax
    }

    pub fn num_places(&self) -> usize {
        self.places.len()
    }

    pub fn place_names(&self) -> &[String] {
        &self.places
    }

    /// Number of distinct integer ages, `cmax + 2`.
    pub fn width(&self) -> usize {
        self.cmax as usize + 2
    }

    pub fn bit(&self, place: PlaceId, int_age: u32) -> usize {
        debug_assert!(int_age <= self.cmax + 1);
        debug_assert!(place.0 < self.places.len());
        place.0 * self.width() + int_age as usize
    }

    pub fn pair(&self, bit: usize) -> (PlaceId, u32) {
        (PlaceId(bit / self.width()), (bit % self.width()) as u32)
    }

    /// Integer part of an age, capped at `cmax + 1`.
    pub fn int_of(&self, age: &Age) -> u32 {
        let floor = age.to_integer();
        floor.min(u64::from(self.cmax) + 1) as u32
    }

    pub fn symbol<I: IntoIterator<Item = (PlaceId, u32)>>(&self, pairs: I) -> Symbol {
        let mut s = Symbol::empty();
        for (p, a) in pairs {
            s.insert_bit(self.bit(p, a.min(self.cmax + 1)));
        }
        s
    }

    /// Looks up places by name; panics on unknown names. Meant for tests and fixtures.
    pub fn symbol_named(&self, pairs: &[(&str, u32)]) -> Symbol {
        self.symbol(pairs.iter().map(|&(name, a)| {
            let p = self
                .places
                .iter()
                .position(|n| n == name)
                .unwrap_or_else(|| panic!("unknown place {name}"));
            (PlaceId(p), a)
        }))
    }

    pub fn pairs(&self, s: &Symbol) -> Vec<(PlaceId, u32)> {
        s.bits().map(|b| self.pair(b)).collect()
    }

    /// `(x+1)`: every integer age incremented, capped at `cmax + 1`.
    pub fn plus_one(&self, s: &Symbol) -> Symbol {
        self.symbol(self.pairs(s).into_iter().map(|(p, a)| (p, a + 1)))
    }

    pub fn render_symbol(&self, s: &Symbol) -> String {
        let mut out = String::from("{");
        for (i, (p, a)) in self.pairs(s).into_iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}:{}", self.places[p.0], a);
        }
        out.push('}');
        out
    }

    pub fn render_word(&self, w: &Word) -> String {
        w.symbols()
            .iter()
            .map(|s| self.render_symbol(s))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn render_expr(&self, e: &SimpleExpr) -> String {
        e.atoms()
            .iter()
            .map(|a| {
                let mut s = self.render_symbol(&a.symbol);
                if a.starred {
                    s.push('*');
                }
                s
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse_symbol(&self, text: &str) -> Result<Symbol> {
        let inner = text
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| Error::RejectedInput(format!("symbol '{text}' is not braced")))?;
        let mut s = Symbol::empty();
        for item in inner.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (name, age) = item
                .rsplit_once(':')
                .ok_or_else(|| Error::RejectedInput(format!("expected place:age, got '{item}'")))?;
            let p = self
                .places
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::RejectedInput(format!("unknown place '{name}'")))?;
            let age: u32 = age
                .parse()
                .map_err(|_| Error::RejectedInput(format!("bad age in '{item}'")))?;
            if age > self.cmax + 1 {
                return Err(Error::RejectedInput(format!(
                    "age {age} exceeds cmax+1 = {}",
                    self.cmax + 1
                )));
            }
            s.insert_bit(self.bit(PlaceId(p), age));
        }
        Ok(s)
    }

    pub fn parse_expr(&self, text: &str) -> Result<SimpleExpr> {
        let atoms = text
            .split_whitespace()
            .map(|tok| match tok.strip_suffix('*') {
                Some(sym) => Ok(Atom::starred(self.parse_symbol(sym)?)),
                None => Ok(Atom::plain(self.parse_symbol(tok)?)),
            })
            .collect::<Result<Vec<_>>>()?;
        SimpleExpr::new(atoms)
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let symbols = text
            .split_whitespace()
            .map(|tok| self.parse_symbol(tok))
            .collect::<Result<Vec<_>>>()?;
        Word::new(symbols)
    }
}

/// Nonempty sequence of symbols; position 0 is the integer-age class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    symbols: Vec<Symbol>,
}

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Shape("a word has at least one symbol".into()));
        }
        Ok(Word { symbols })
    }

    pub fn single(s: Symbol) -> Self {
        Word { symbols: vec![s] }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn front(&self) -> &Symbol {
        &self.symbols[0]
    }

    pub fn is_normalized(&self) -> bool {
        self.symbols[1..].iter().all(|s| !s.is_empty())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub symbol: Symbol,
    pub starred: bool,
}

impl Atom {
    pub fn plain(symbol: Symbol) -> Self {
        Atom {
            symbol,
            starred: false,
        }
    }

    pub fn starred(symbol: Symbol) -> Self {
        Atom {
            symbol,
            starred: true,
        }
    }
}

/// Concatenation of symbols, each optionally starred.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimpleExpr {
    atoms: Vec<Atom>,
}

impl SimpleExpr {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Shape(
                "a simple expression has at least one atom".into(),
            ));
        }
        Ok(SimpleExpr { atoms })
    }

    /// Star-free expression matching exactly `w`.
    pub fn from_word(w: &Word) -> Self {
        SimpleExpr {
            atoms: w.symbols.iter().cloned().map(Atom::plain).collect(),
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.atoms.iter().map(|a| &a.symbol)
    }

    /// Pointwise symbol inclusion on expressions of equal length; stars ignored.
    pub fn pointwise_subset(&self, other: &SimpleExpr) -> bool {
        self.len() == other.len()
            && self
                .symbols()
                .zip(other.symbols())
                .all(|(a, b)| a.is_subset(b))
    }

    /// `x·E` with `x` unstarred.
    pub fn prepend(&self, x: Symbol) -> SimpleExpr {
        let mut atoms = Vec::with_capacity(self.atoms.len() + 1);
        atoms.push(Atom::plain(x));
        atoms.extend(self.atoms.iter().cloned());
        SimpleExpr { atoms }
    }

    /// `α·z ↦ (z+1)·α` for an unstarred rightmost atom `z`.
    pub fn rotate(&self, alphabet: &Alphabet) -> Result<SimpleExpr> {
        let (last, rest) = self.atoms.split_last().expect("nonempty");
        if last.starred {
            return Err(Error::Shape(
                "rotation needs an unstarred rightmost atom".into(),
            ));
        }
        Ok(SimpleExpr::new(rest.to_vec())
            .map(|alpha| alpha.prepend(alphabet.plus_one(&last.symbol)))
            .unwrap_or_else(|_| SimpleExpr {
                atoms: vec![Atom::plain(alphabet.plus_one(&last.symbol))],
            }))
    }
}

/// Finite ascending set of fractional values containing 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionSet {
    values: Vec<Age>,
}

impl FractionSet {
    pub fn new(values: Vec<Age>) -> Result<Self> {
        if values.first() != Some(&Age::zero()) {
            return Err(Error::RejectedInput("fraction set must start at 0".into()));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::RejectedInput(
                "fraction set must be strictly ascending".into(),
            ));
        }
        if values.iter().any(|v| *v >= Age::from_integer(1)) {
            return Err(Error::RejectedInput("fractions must lie in [0,1)".into()));
        }
        Ok(FractionSet { values })
    }

    /// `{0} ∪ frac(M)`.
    pub fn of_marking(m: &Marking) -> Self {
        let mut values = vec![Age::zero()];
        values.extend(m.fractions().into_iter().filter(|f| !f.is_zero()));
        FractionSet { values }
    }

    pub fn values(&self) -> &[Age] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// S-abstraction of a marking: symbol `i` collects the tokens whose
/// fractional age equals the `i`-th element of `s`.
pub fn abstract_marking(m: &Marking, s: &FractionSet, alphabet: &Alphabet) -> Result<Word> {
    let mut symbols = vec![Symbol::empty(); s.len()];
    for (p, age, _) in m.iter() {
        let f = age.fract();
        let i = s.values.binary_search(&f).map_err(|_| {
            Error::RejectedInput(format!("fractional part {f} of a token is not in S"))
        })?;
        symbols[i].insert_bit(alphabet.bit(p, alphabet.int_of(age)));
    }
    Ok(Word { symbols })
}

/// Abstraction with respect to `{0} ∪ frac(M)`.
pub fn shortest_abstraction(m: &Marking, alphabet: &Alphabet) -> Word {
    abstract_marking(m, &FractionSet::of_marking(m), alphabet).expect("S contains frac(M)")
}

/// `α·z ↦ (z+1)·α` on words.
pub fn rotate_word(w: &Word, alphabet: &Alphabet) -> Word {
    let (last, rest) = w.symbols.split_last().expect("nonempty");
    let mut symbols = Vec::with_capacity(w.len());
    symbols.push(alphabet.plus_one(last));
    symbols.extend(rest.iter().cloned());
    Word { symbols }
}

/// `∅·E`.
pub fn prepend_empty(e: &SimpleExpr) -> SimpleExpr {
    e.prepend(Symbol::empty())
}

/// `∅·w`.
pub fn prepend_empty_word(w: &Word) -> Word {
    let mut symbols = Vec::with_capacity(w.len() + 1);
    symbols.push(Symbol::empty());
    symbols.extend(w.symbols.iter().cloned());
    Word { symbols }
}

/// Drops empty symbols after position 0; they do not change the denotation.
pub fn normalize_word(w: &Word) -> Word {
    let mut symbols = vec![w.symbols[0].clone()];
    symbols.extend(w.symbols[1..].iter().filter(|s| !s.is_empty()).cloned());
    Word { symbols }
}

/// Decides `⟦w⟧ ⊆ ⟦E⟧`: some word of `L(E)` dominates `w` pointwise after
/// inserting empty symbols into `w` after position 0 or at its end.
///
/// `w[0]` must sit on the first letter of the chosen word; later symbols of
/// `w` embed in order. The scan keeps the least atom index reachable, which
/// dominates every larger one because atoms may always be skipped after the
/// first letter.
pub fn word_covered_by_expr(w: &Word, e: &SimpleExpr) -> bool {
    let atoms = &e.atoms;
    // First letter: only starred atoms may be skipped before it.
    let mut state = None;
    for (j, atom) in atoms.iter().enumerate() {
        if w.symbols[0].is_subset(&atom.symbol) {
            state = Some(if atom.starred { j } else { j + 1 });
            break;
        }
        if !atom.starred {
            break;
        }
    }
    let Some(mut state) = state else {
        return false;
    };
    for sym in &w.symbols[1..] {
        if sym.is_empty() {
            continue;
        }
        let next = (state..atoms.len()).find(|&j| sym.is_subset(&atoms[j].symbol));
        match next {
            Some(j) => state = if atoms[j].starred { j } else { j + 1 },
            None => return false,
        }
    }
    true
}

/// Membership of a concrete marking in `⟦E⟧`.
pub fn marking_in_denotation(m: &Marking, e: &SimpleExpr, alphabet: &Alphabet) -> bool {
    word_covered_by_expr(&normalize_word(&shortest_abstraction(m, alphabet)), e)
}
