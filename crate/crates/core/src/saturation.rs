//! Abstract enabledness and saturation of simple expressions under maximal
//! discrete firing.
//!
//! For a non-consuming net a token, once present, can be read any number of
//! times, so firing only ever adds `(place, integer age)` pairs to the symbol
//! the produced token lands in: resets land in the integer class (position
//! 0), inherited ages land in the class of the token they were read from.
//!
//! Enabledness is decided per variable. A variable bound to an integer age
//! `c` needs every one of its precondition places at `c` in the front symbol;
//! a variable bound to a non-integer age with integer part `c` needs all its
//! precondition places at `c` inside one single non-front symbol, because
//! tokens sharing a variable share their exact age and hence their
//! fractional class. Guards are evaluated at `c` or `c + 1/2`; all finite
//! endpoints are integers at most `cmax`, so this representative decides the
//! whole class.

use crate::error::{Error, Result};
use crate::model::{cmax, is_nonconsuming, Arg, Interval, Net, TransitionId};
use crate::regions::{Alphabet, Atom, SimpleExpr, Symbol, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fraction {
    Zero,
    Positive,
}

/// Region of a single clock value: integer part (capped at `cmax + 1`) and
/// whether the fractional part is zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AbstractAge {
    pub int_age: u32,
    pub fraction: Fraction,
}

impl AbstractAge {
    pub fn zero(int_age: u32) -> Self {
        AbstractAge {
            int_age,
            fraction: Fraction::Zero,
        }
    }

    pub fn positive(int_age: u32) -> Self {
        AbstractAge {
            int_age,
            fraction: Fraction::Positive,
        }
    }
}

/// Evaluates the representative `c` (or `c + 1/2`) of `a` against `interval`.
pub fn guard_admits(a: AbstractAge, interval: &Interval) -> bool {
    let half_units = 2 * u64::from(a.int_age)
        + match a.fraction {
            Fraction::Zero => 0,
            Fraction::Positive => 1,
        };
    interval.contains_half_units(half_units)
}

/// One admissible integer part for a variable: the tokens it requires and
/// the tokens it hands to the postcondition.
#[derive(Clone, Debug)]
struct Choice {
    required: Symbol,
    produced: Symbol,
}

#[derive(Clone, Debug)]
struct VarTable {
    zero: Vec<Choice>,
    positive: Vec<Choice>,
}

#[derive(Clone, Debug)]
struct TransitionTable {
    vars: Vec<VarTable>,
    resets: Symbol,
}

/// Per-net saturation context: alphabet plus precomputed transition tables.
#[derive(Clone, Debug)]
pub struct Saturator {
    alphabet: Alphabet,
    tables: Vec<TransitionTable>,
}

impl Saturator {
    /// Context for `net` with its own `cmax`.
    pub fn for_net(net: &Net) -> Result<Self> {
        Self::new(net, cmax(net))
    }

    pub fn new(net: &Net, cmax: u32) -> Result<Self> {
        if !is_nonconsuming(net) {
            return Err(Error::RejectedInput(
                "saturation is defined for non-consuming nets only".into(),
            ));
        }
        let alphabet = Alphabet::for_net(net, cmax);
        let tables = net
            .transitions()
            .iter()
            .map(|t| {
                let vars = t
                    .variables()
                    .into_iter()
                    .map(|v| {
                        let guard = t.guard(v);
                        let pre_places: Vec<_> = t
                            .pre()
                            .keys()
                            .filter(|&&(_, w)| w == v)
                            .map(|&(p, _)| p)
                            .collect();
                        let post_places: Vec<_> = t
                            .post()
                            .keys()
                            .filter(|&&(_, arg)| arg == Arg::Var(v))
                            .map(|&(p, _)| p)
                            .collect();
                        let choice = |c: u32| Choice {
                            required: alphabet.symbol(pre_places.iter().map(|&p| (p, c))),
                            produced: alphabet.symbol(post_places.iter().map(|&p| (p, c))),
                        };
                        let ages = 0..=cmax + 1;
                        VarTable {
                            zero: ages
                                .clone()
                                .filter(|&c| guard_admits(AbstractAge::zero(c), &guard))
                                .map(choice)
                                .collect(),
                            positive: ages
                                .filter(|&c| guard_admits(AbstractAge::positive(c), &guard))
                                .map(choice)
                                .collect(),
                        }
                    })
                    .collect();
                let resets = alphabet.symbol(
                    t.post()
                        .keys()
                        .filter(|&&(_, arg)| arg == Arg::Zero)
                        .map(|&(p, _)| (p, 0)),
                );
                TransitionTable { vars, resets }
            })
            .collect();
        Ok(Saturator { alphabet, tables })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_transitions(&self) -> usize {
        self.tables.len()
    }

    /// Whether a marking whose integer class is `alpha` and whose other
    /// classes are `betas` can fire `t`.
    pub fn enables(&self, alpha: &Symbol, betas: &[Symbol], t: TransitionId) -> bool {
        self.tables[t.0].vars.iter().all(|var| {
            var.zero.iter().any(|c| c.required.is_subset(alpha))
                || var
                    .positive
                    .iter()
                    .any(|c| betas.iter().any(|b| c.required.is_subset(b)))
        })
    }

    /// Growth of the integer class `x` by one firing of `t`.
    pub fn f_step(&self, alpha: &Symbol, betas: &[Symbol], x: &Symbol, t: TransitionId) -> Symbol {
        let mut out = x.clone();
        if self.enables(alpha, betas, t) {
            let table = &self.tables[t.0];
            for var in &table.vars {
                for c in &var.zero {
                    if c.required.is_subset(x) {
                        out.union_with(&c.produced);
                    }
                }
            }
            out.union_with(&table.resets);
        }
        out
    }

    /// Growth of a non-integer class `x` by one firing of `t`.
    pub fn g_step(&self, alpha: &Symbol, betas: &[Symbol], x: &Symbol, t: TransitionId) -> Symbol {
        let mut out = x.clone();
        if self.enables(alpha, betas, t) {
            for var in &self.tables[t.0].vars {
                for c in &var.positive {
                    if c.required.is_subset(x) {
                        out.union_with(&c.produced);
                    }
                }
            }
        }
        out
    }

    /// Least fixpoint of all `f_step`/`g_step` applications, transitions in
    /// declaration order.
    pub fn fg_closure(&self, front: Symbol, rest: Vec<Symbol>) -> (Symbol, Vec<Symbol>) {
        let order: Vec<_> = (0..self.tables.len()).map(TransitionId).collect();
        self.fg_closure_ordered(front, rest, &order)
    }

    /// [`fg_closure`](Self::fg_closure) visiting transitions in `order`.
    pub fn fg_closure_ordered(
        &self,
        mut front: Symbol,
        mut rest: Vec<Symbol>,
        order: &[TransitionId],
    ) -> (Symbol, Vec<Symbol>) {
        loop {
            let mut changed = false;
            for &t in order {
                if !self.enables(&front, &rest, t) {
                    continue;
                }
                let table = &self.tables[t.0];
                for var in &table.vars {
                    for c in &var.zero {
                        if c.required.is_subset(&front) {
                            changed |= front.union_with(&c.produced);
                        }
                    }
                    for x in rest.iter_mut() {
                        for c in &var.positive {
                            if c.required.is_subset(x) {
                                changed |= x.union_with(&c.produced);
                            }
                        }
                    }
                }
                changed |= front.union_with(&table.resets);
            }
            if !changed {
                return (front, rest);
            }
        }
    }

    /// SAT(E): closure of every symbol of `e`, stars kept in place.
    pub fn saturate_expr(&self, e: &SimpleExpr) -> Result<SimpleExpr> {
        let (first, rest) = e.atoms().split_first().expect("nonempty");
        if first.starred {
            return Err(Error::Shape(
                "saturation needs an unstarred front atom".into(),
            ));
        }
        let (front, others) = self.fg_closure(
            first.symbol.clone(),
            rest.iter().map(|a| a.symbol.clone()).collect(),
        );
        let mut atoms = Vec::with_capacity(e.len());
        atoms.push(Atom::plain(front));
        atoms.extend(rest.iter().zip(others).map(|(a, symbol)| Atom {
            symbol,
            starred: a.starred,
        }));
        SimpleExpr::new(atoms)
    }

    pub fn saturate_word(&self, w: &Word) -> Word {
        let (front, rest) = self.fg_closure(w.front().clone(), w.symbols()[1..].to_vec());
        let mut symbols = Vec::with_capacity(w.len());
        symbols.push(front);
        symbols.extend(rest);
        Word::new(symbols).expect("nonempty")
    }

    /// Whether some marking of `⟦e⟧` enables `t`.
    pub fn expr_enables(&self, e: &SimpleExpr, t: TransitionId) -> bool {
        let mut symbols = e.symbols();
        let front = symbols.next().expect("nonempty");
        let rest: Vec<Symbol> = symbols.cloned().collect();
        self.enables(front, &rest, t)
    }
}
