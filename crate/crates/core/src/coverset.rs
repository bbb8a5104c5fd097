//! Symbolic cover set of `N·{(p,0)}` and the coverability decision built on it.
//!
//! Starting from `{(p,0)} ∅*`, each round runs [`accelerate`] on the current
//! `a b*` expression, records `S1`, `Sl` and `R`, and continues from `R`
//! until an `R` repeats. Every recorded expression has length 2 or 4, and the
//! union of their denotations is the cover set.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::accelerate::{accelerate, AccelerateResult};
use crate::error::{Error, Result};
use crate::model::{is_nonconsuming, Net, PlaceId, TransitionId};
use crate::regions::{Alphabet, Atom, SimpleExpr, Symbol};
use crate::saturation::Saturator;

/// `B(m) = 2^(|P|·(cmax+2)·m + m)`: number of simple expressions of length `m`.
pub fn expression_count_bound(m: u64, num_places: u64, cmax: u64) -> BigUint {
    let exp = num_places * (cmax + 2) * m + m;
    BigUint::one() << exp
}

/// An instance: non-consuming net, initial place, target transition.
#[derive(Clone, Debug)]
pub struct CoverQuery {
    net: Net,
    initial: PlaceId,
    target: TransitionId,
}

impl CoverQuery {
    pub fn new(net: Net, initial: PlaceId, target: TransitionId) -> Result<Self> {
        if initial.0 >= net.places().len() {
            return Err(Error::RejectedInput(format!("no place #{}", initial.0)));
        }
        if target.0 >= net.transitions().len() {
            return Err(Error::RejectedInput(format!("no transition #{}", target.0)));
        }
        if !is_nonconsuming(&net) {
            return Err(Error::RejectedInput(
                "coverability queries need a non-consuming net".into(),
            ));
        }
        Ok(CoverQuery {
            net,
            initial,
            target,
        })
    }

    pub fn by_name(net: Net, initial: &str, target: &str) -> Result<Self> {
        let p = net
            .place_id(initial)
            .ok_or_else(|| Error::RejectedInput(format!("unknown place '{initial}'")))?;
        let t = net
            .transition_id(target)
            .ok_or_else(|| Error::RejectedInput(format!("unknown transition '{target}'")))?;
        Self::new(net, p, t)
    }

    pub fn net(&self) -> &Net {
        &self.net
    }

    pub fn initial(&self) -> PlaceId {
        self.initial
    }

    pub fn target(&self) -> TransitionId {
        self.target
    }

    pub fn saturator(&self) -> Saturator {
        Saturator::for_net(&self.net).expect("query nets are non-consuming")
    }

    /// `{(p,0)} ∅*`, denoting exactly `N·{(p,0)}`.
    pub fn initial_expr(&self, alphabet: &Alphabet) -> SimpleExpr {
        initial_expr(alphabet, self.initial)
    }

    /// `B(2)` for this net.
    pub fn pair_bound(&self) -> BigUint {
        pair_bound(&self.net)
    }
}

fn initial_expr(alphabet: &Alphabet, initial: PlaceId) -> SimpleExpr {
    SimpleExpr::new(vec![
        Atom::plain(alphabet.symbol([(initial, 0)])),
        Atom::starred(Symbol::empty()),
    ])
    .expect("nonempty")
}

/// `B(2)` for `net`.
pub fn pair_bound(net: &Net) -> BigUint {
    let cmax = crate::model::cmax(net);
    expression_count_bound(2, net.places().len() as u64, u64::from(cmax))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSet {
    /// Recorded expressions in discovery order: `S1, Sl, R` per round.
    pub expressions: Vec<SimpleExpr>,
    pub rounds: usize,
}

/// Sequence of accelerate rounds from `{(p,0)} ∅*`, stopping once an `R`
/// repeats.
struct Rounds {
    sat: Saturator,
    current: SimpleExpr,
    visited: HashSet<SimpleExpr>,
    round_cap: BigUint,
    rounds: usize,
    done: bool,
}

impl Rounds {
    fn new(q: &CoverQuery) -> Self {
        Self::start(q.saturator(), q.initial, q.pair_bound())
    }

    fn start(sat: Saturator, initial: PlaceId, round_cap: BigUint) -> Self {
        let current = initial_expr(sat.alphabet(), initial);
        let visited = HashSet::from([current.clone()]);
        Rounds {
            sat,
            current,
            visited,
            round_cap,
            rounds: 0,
            done: false,
        }
    }

    fn next_round(&mut self) -> Option<Result<AccelerateResult>> {
        if self.done {
            return None;
        }
        if BigUint::from(self.rounds) >= self.round_cap {
            self.done = true;
            return Some(Err(Error::Invariant(format!(
                "no repeated seed after {} rounds",
                self.rounds
            ))));
        }
        let res = match accelerate(&self.sat, &self.current) {
            Ok(r) => r,
            Err(e) => {
                self.done = true;
                return Some(Err(e));
            }
        };
        self.rounds += 1;
        if !self.visited.insert(res.r.clone()) {
            self.done = true;
        }
        self.current = res.r.clone();
        Some(Ok(res))
    }
}

fn check_length_bound(expressions: usize, net: &Net) -> Result<()> {
    if BigUint::from(expressions) > pair_bound(net) * 3u32 {
        return Err(Error::Invariant(format!(
            "{expressions} recorded expressions exceed 3·B(2)"
        )));
    }
    Ok(())
}

/// All expressions of the cover set.
pub fn compute_coverset(q: &CoverQuery) -> Result<CoverSet> {
    collect(Rounds::new(q), &q.net)
}

/// Cover set of `N·{(initial,0)}` in a non-consuming net, with no target.
pub fn compute_coverset_from(net: &Net, initial: PlaceId) -> Result<CoverSet> {
    if initial.0 >= net.places().len() {
        return Err(Error::RejectedInput(format!("no place #{}", initial.0)));
    }
    let sat = Saturator::for_net(net)?;
    collect(Rounds::start(sat, initial, pair_bound(net)), net)
}

fn collect(mut rounds: Rounds, net: &Net) -> Result<CoverSet> {
    let mut expressions = Vec::new();
    while let Some(res) = rounds.next_round() {
        let res = res?;
        expressions.extend([res.s1, res.sl, res.r]);
    }
    check_length_bound(expressions.len(), net)?;
    Ok(CoverSet {
        expressions,
        rounds: rounds.rounds,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverVerdict {
    /// `witness` has a marking enabling the target; found in round `round`
    /// (1-based) as the `index`-th recorded expression overall.
    Yes {
        witness: SimpleExpr,
        round: usize,
        index: usize,
    },
    No {
        coverset: CoverSet,
    },
}

impl CoverVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, CoverVerdict::Yes { .. })
    }
}

/// Decides coverability, stopping at the first enabling expression.
pub fn exists_cover(q: &CoverQuery) -> Result<CoverVerdict> {
    let mut rounds = Rounds::new(q);
    let mut expressions = Vec::new();
    while let Some(res) = rounds.next_round() {
        let res = res?;
        for e in [res.s1, res.sl, res.r] {
            expressions.push(e.clone());
            if rounds.sat.expr_enables(&e, q.target) {
                return Ok(CoverVerdict::Yes {
                    witness: e,
                    round: rounds.rounds,
                    index: expressions.len() - 1,
                });
            }
        }
    }
    check_length_bound(expressions.len(), &q.net)?;
    Ok(CoverVerdict::No {
        coverset: CoverSet {
            expressions,
            rounds: rounds.rounds,
        },
    })
}

/// Default cap on `3·B(2)` for [`exists_cover_streaming`] without force.
pub const DEFAULT_STREAMING_BUDGET: u64 = 1024;

/// Coverability keeping only the current round: the seed index advances by
/// three per round and the search gives up at `3·B(2)`.
///
/// Refuses with [`Error::BudgetExceeded`] when `3·B(2) > budget` unless
/// `force` is set.
pub fn exists_cover_streaming(q: &CoverQuery, budget: u64, force: bool) -> Result<bool> {
    let cap = q.pair_bound() * 3u32;
    if !force && cap > BigUint::from(budget) {
        return Err(Error::BudgetExceeded {
            needed: cap.to_string(),
            budget,
        });
    }
    let sat = q.saturator();
    let mut current = q.initial_expr(sat.alphabet());
    let mut index = BigUint::from(0u32);
    // Small caps stay in machine integers.
    let small_cap = cap.to_u64();
    let mut small_index = 0u64;
    loop {
        let reached = match small_cap {
            Some(c) => small_index >= c,
            None => index >= cap,
        };
        if reached {
            return Ok(false);
        }
        let res = accelerate(&sat, &current)?;
        for e in [&res.s1, &res.sl, &res.r] {
            if sat.expr_enables(e, q.target) {
                return Ok(true);
            }
        }
        small_index += 3;
        if small_cap.is_none() {
            index += 3u32;
        }
        current = res.r;
    }
}
