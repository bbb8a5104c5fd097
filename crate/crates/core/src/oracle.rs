//! Brute-force engines used to validate the symbolic decision procedure.
//!
//! [`word_bfs`] explores region words of the non-consuming net with
//! subsumption pruning. [`concrete_bfs`] simulates the original net on
//! rational ages from a fixed number of initial tokens. Neither is a
//! decision procedure.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::coverset::{exists_cover, CoverQuery};
use crate::error::{Error, Result};
use crate::model::{
    cmax, elapse, fire, valuations, Age, Marking, Net, PlaceId, TransitionId, Valuation,
};
use crate::regions::{
    normalize_word, prepend_empty_word, rotate_word, word_covered_by_expr, Alphabet, SimpleExpr,
    Word,
};
use crate::saturation::Saturator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WordOp {
    Start,
    Saturate,
    Prepend,
    Rotate,
}

impl fmt::Display for WordOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WordOp::Start => "start",
            WordOp::Saturate => "saturate",
            WordOp::Prepend => "prepend",
            WordOp::Rotate => "rotate",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConcreteOp {
    Start,
    Fire {
        transition: TransitionId,
        valuation: Valuation,
    },
    Delay(Age),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Trace {
    Words(Vec<(WordOp, Word)>),
    Concrete(Vec<(ConcreteOp, Marking)>),
}

impl Trace {
    pub fn len(&self) -> usize {
        match self {
            Trace::Words(s) => s.len(),
            Trace::Concrete(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Found(Trace),
    ExhaustedNo,
    DepthBoundedUnknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleVerdict {
    pub outcome: Outcome,
    pub states_explored: usize,
}

impl OracleVerdict {
    pub fn is_found(&self) -> bool {
        matches!(self.outcome, Outcome::Found(_))
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self.outcome, Outcome::ExhaustedNo)
    }

    pub fn label(&self) -> &'static str {
        match self.outcome {
            Outcome::Found(_) => "FOUND",
            Outcome::ExhaustedNo => "EXHAUSTED",
            Outcome::DepthBoundedUnknown => "UNKNOWN",
        }
    }
}

struct Node<S, O> {
    state: S,
    op: O,
    parent: Option<usize>,
    depth: usize,
}

fn path<S: Clone, O: Clone>(nodes: &[Node<S, O>], mut id: usize) -> Vec<(O, S)> {
    let mut out = Vec::new();
    loop {
        let n = &nodes[id];
        out.push((n.op.clone(), n.state.clone()));
        match n.parent {
            Some(p) => id = p,
            None => break,
        }
    }
    out.reverse();
    out
}

fn word_enables(sat: &Saturator, w: &Word, t: TransitionId) -> bool {
    sat.enables(w.front(), &w.symbols()[1..], t)
}

/// Successors of a word: its saturation if that differs, otherwise the
/// rotation and, when the front is nonempty, the `∅`-prepend.
pub fn word_successors(sat: &Saturator, w: &Word) -> Vec<(WordOp, Word)> {
    let saturated = sat.saturate_word(w);
    if saturated != *w {
        return vec![(WordOp::Saturate, saturated)];
    }
    let mut out = vec![(
        WordOp::Rotate,
        normalize_word(&rotate_word(w, sat.alphabet())),
    )];
    if !w.front().is_empty() {
        out.push((WordOp::Prepend, prepend_empty_word(w)));
    }
    out
}

fn apply_word_op(sat: &Saturator, op: WordOp, w: &Word) -> Option<Word> {
    match op {
        WordOp::Start => None,
        WordOp::Saturate => Some(sat.saturate_word(w)),
        WordOp::Rotate => Some(normalize_word(&rotate_word(w, sat.alphabet()))),
        WordOp::Prepend => (!w.front().is_empty()).then(|| prepend_empty_word(w)),
    }
}

fn start_word(q: &CoverQuery, alphabet: &Alphabet) -> Word {
    Word::single(alphabet.symbol([(q.initial(), 0)]))
}

type WordNode = Node<Word, WordOp>;

/// Breadth-first search over normalized words from `start`, stopping at the
/// first word satisfying `goal`. Returns the outcome and all kept nodes.
fn search_words(
    sat: &Saturator,
    start: Word,
    goal: impl Fn(&Word) -> bool,
    max_depth: usize,
    max_states: usize,
) -> (Outcome, Vec<WordNode>) {
    let mut nodes = vec![Node {
        state: start.clone(),
        op: WordOp::Start,
        parent: None,
        depth: 0,
    }];
    if goal(&start) {
        let trace = Trace::Words(path(&nodes, 0));
        return (Outcome::Found(trace), nodes);
    }
    let mut seen: Vec<SimpleExpr> = vec![SimpleExpr::from_word(&start)];
    let mut queue = VecDeque::from([0usize]);
    let mut truncated = false;
    'search: while let Some(id) = queue.pop_front() {
        if nodes[id].depth >= max_depth {
            truncated = true;
            continue;
        }
        for (op, next) in word_successors(sat, &nodes[id].state) {
            if seen.iter().any(|u| word_covered_by_expr(&next, u)) {
                continue;
            }
            if nodes.len() >= max_states {
                truncated = true;
                break 'search;
            }
            seen.push(SimpleExpr::from_word(&next));
            let hit = goal(&next);
            nodes.push(Node {
                state: next,
                op,
                parent: Some(id),
                depth: nodes[id].depth + 1,
            });
            let new_id = nodes.len() - 1;
            if hit {
                let trace = Trace::Words(path(&nodes, new_id));
                return (Outcome::Found(trace), nodes);
            }
            queue.push_back(new_id);
        }
    }
    let outcome = if truncated {
        Outcome::DepthBoundedUnknown
    } else {
        Outcome::ExhaustedNo
    };
    (outcome, nodes)
}

/// Breadth-first search over normalized words from `{(p,0)}`.
///
/// Returns the verdict together with every word kept in the search.
pub fn word_bfs_with_words(
    q: &CoverQuery,
    max_depth: usize,
    max_states: usize,
) -> (OracleVerdict, Vec<Word>) {
    let sat = q.saturator();
    let start = start_word(q, sat.alphabet());
    let target = q.target();
    let (outcome, nodes) = search_words(
        &sat,
        start,
        |w| word_enables(&sat, w, target),
        max_depth,
        max_states,
    );
    let verdict = OracleVerdict {
        outcome,
        states_explored: nodes.len(),
    };
    (verdict, nodes.into_iter().map(|n| n.state).collect())
}

/// Words kept by an untargeted search from `{(initial,0)}`, or `None` if a
/// budget cut the search short.
pub fn reachable_words(
    sat: &Saturator,
    initial: PlaceId,
    max_depth: usize,
    max_states: usize,
) -> Option<Vec<Word>> {
    let start = Word::single(sat.alphabet().symbol([(initial, 0)]));
    let (outcome, nodes) = search_words(sat, start, |_| false, max_depth, max_states);
    (outcome == Outcome::ExhaustedNo).then(|| nodes.into_iter().map(|n| n.state).collect())
}

pub fn word_bfs(q: &CoverQuery, max_depth: usize, max_states: usize) -> OracleVerdict {
    word_bfs_with_words(q, max_depth, max_states).0
}

/// Re-applies the steps of a word trace from `{(p,0)}` and returns the final
/// word, failing if any recorded word differs from the recomputed one.
pub fn replay_word_trace(q: &CoverQuery, steps: &[(WordOp, Word)]) -> Result<Word> {
    let sat = q.saturator();
    let mut cur = start_word(q, sat.alphabet());
    let mismatch = |i: usize, what: &str| Error::RejectedInput(format!("step {i}: {what}"));
    let Some(((WordOp::Start, first), rest)) = steps.split_first() else {
        return Err(mismatch(0, "trace must begin with a start step"));
    };
    if *first != cur {
        return Err(mismatch(0, "start word differs"));
    }
    for (i, (op, w)) in rest.iter().enumerate() {
        let next =
            apply_word_op(&sat, *op, &cur).ok_or_else(|| mismatch(i + 1, "step not applicable"))?;
        if next != *w {
            return Err(mismatch(i + 1, "recorded word differs"));
        }
        cur = next;
    }
    Ok(cur)
}

pub fn render_word_trace(alphabet: &Alphabet, steps: &[(WordOp, Word)]) -> String {
    steps
        .iter()
        .map(|(op, w)| format!("{op} : {}\n", alphabet.render_word(w)))
        .collect()
}

/// Parses the output of [`render_word_trace`].
pub fn parse_word_trace(alphabet: &Alphabet, text: &str) -> Result<Vec<(WordOp, Word)>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let err = |message: String| Error::Syntax {
                line: i + 1,
                column: 1,
                message,
            };
            let (op, word) = line
                .split_once(" : ")
                .ok_or_else(|| err("expected '<op> : <word>'".into()))?;
            let op = match op.trim() {
                "start" => WordOp::Start,
                "saturate" => WordOp::Saturate,
                "prepend" => WordOp::Prepend,
                "rotate" => WordOp::Rotate,
                other => return Err(err(format!("unknown step '{other}'"))),
            };
            Ok((op, alphabet.parse_word(word.trim())?))
        })
        .collect()
}

pub fn render_marking(net: &Net, m: &Marking) -> String {
    let tokens: Vec<String> = m
        .iter()
        .map(|(p, a, c)| {
            let t = format!("({},{a})", net.place_name(p));
            if c == 1 {
                t
            } else {
                format!("{c}{t}")
            }
        })
        .collect();
    format!("{{{}}}", tokens.join(","))
}

pub fn render_concrete_trace(net: &Net, steps: &[(ConcreteOp, Marking)]) -> String {
    steps
        .iter()
        .map(|(op, m)| {
            let op = match op {
                ConcreteOp::Start => "start".to_string(),
                ConcreteOp::Delay(d) => format!("delay {d}"),
                ConcreteOp::Fire {
                    transition,
                    valuation,
                } => {
                    let t = net.transition(*transition);
                    let args: Vec<String> = valuation
                        .iter()
                        .map(|(v, a)| format!("{}={a}", net.variable_name(v)))
                        .collect();
                    format!("fire {}[{}]", t.name(), args.join(","))
                }
            };
            format!("{op} : {}\n", render_marking(net, m))
        })
        .collect()
}

/// Explicit search on the original net from `m·{(p,0)}`.
///
/// Discrete steps fire every transition under every valuation; time steps
/// advance by `k/denominator` for `k = 1..=denominator`. Ages above `cmax`
/// are merged, as guards cannot tell them apart. `max_states` bounds the
/// number of stored markings.
pub fn concrete_bfs(
    net: &Net,
    initial: PlaceId,
    target: TransitionId,
    m: u32,
    max_depth: usize,
    denominator: u64,
    max_states: usize,
) -> OracleVerdict {
    let c = cmax(net);
    let start = Marking::initial(initial, m);
    let t_target = net.transition(target);
    let mut nodes = vec![Node {
        state: start.clone(),
        op: ConcreteOp::Start,
        parent: None,
        depth: 0,
    }];
    let found = |nodes: &[Node<Marking, ConcreteOp>], id| OracleVerdict {
        outcome: Outcome::Found(Trace::Concrete(path(nodes, id))),
        states_explored: nodes.len(),
    };
    if !valuations(&start, t_target).is_empty() {
        return found(&nodes, 0);
    }
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([0usize]);
    let mut truncated = false;
    let denominator = denominator.max(1);
    'search: while let Some(id) = queue.pop_front() {
        if nodes[id].depth >= max_depth {
            truncated = true;
            continue;
        }
        let cur = nodes[id].state.clone();
        let mut succs = Vec::new();
        for tid in net.transition_ids() {
            let t = net.transition(tid);
            for pi in valuations(&cur, t) {
                let next = fire(&cur, t, &pi).expect("valuation enables t");
                succs.push((
                    ConcreteOp::Fire {
                        transition: tid,
                        valuation: pi,
                    },
                    next.collapse_above(c),
                ));
            }
        }
        for k in 1..=denominator {
            let d = Age::new(k, denominator);
            succs.push((ConcreteOp::Delay(d), elapse(&cur, d).collapse_above(c)));
        }
        for (op, next) in succs {
            if seen.contains(&next) {
                continue;
            }
            if nodes.len() >= max_states {
                truncated = true;
                break 'search;
            }
            seen.insert(next.clone());
            let enables = !valuations(&next, t_target).is_empty();
            nodes.push(Node {
                state: next,
                op,
                parent: Some(id),
                depth: nodes[id].depth + 1,
            });
            let new_id = nodes.len() - 1;
            if enables {
                return found(&nodes, new_id);
            }
            queue.push_back(new_id);
        }
    }
    OracleVerdict {
        outcome: if truncated {
            Outcome::DepthBoundedUnknown
        } else {
            Outcome::ExhaustedNo
        },
        states_explored: nodes.len(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budgets {
    pub word_depth: usize,
    pub word_states: usize,
    pub concrete_tokens: u32,
    pub concrete_depth: usize,
    pub denominator: u64,
    pub concrete_states: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            word_depth: 30,
            word_states: 5_000,
            concrete_tokens: 3,
            concrete_depth: 8,
            denominator: 8,
            concrete_states: 20_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CrosscheckReport {
    pub cover: bool,
    pub word: OracleVerdict,
    pub concrete: OracleVerdict,
    /// Hard disagreements; empty when the engines are consistent.
    pub divergences: Vec<String>,
}

impl CrosscheckReport {
    pub fn agrees(&self) -> bool {
        self.divergences.is_empty()
    }
}

/// Runs the decision procedure and both oracles on `original` and its
/// non-consuming reduction.
///
/// A found witness from either oracle must be matched by a positive answer.
/// An exhausted word search must be matched by a negative answer. An
/// exhausted concrete search only covers its fixed token count and is
/// informational.
pub fn crosscheck(
    original: &Net,
    initial: PlaceId,
    target: TransitionId,
    budgets: &Budgets,
) -> Result<CrosscheckReport> {
    let q = CoverQuery::new(crate::reduce::make_nonconsuming(original), initial, target)?;
    let cover = exists_cover(&q)?.is_yes();
    let word = word_bfs(&q, budgets.word_depth, budgets.word_states);
    let concrete = concrete_bfs(
        original,
        initial,
        target,
        budgets.concrete_tokens,
        budgets.concrete_depth,
        budgets.denominator,
        budgets.concrete_states,
    );
    let alphabet = q.saturator().alphabet().clone();
    let mut divergences = Vec::new();
    match (&word.outcome, cover) {
        (Outcome::Found(Trace::Words(steps)), false) => divergences.push(format!(
            "word search enables the target but the cover set does not:\n{}",
            render_word_trace(&alphabet, steps)
        )),
        (Outcome::ExhaustedNo, true) => divergences.push(format!(
            "word search exhausted after {} words but the cover set enables the target",
            word.states_explored
        )),
        _ => {}
    }
    if let (Outcome::Found(Trace::Concrete(steps)), false) = (&concrete.outcome, cover) {
        divergences.push(format!(
            "concrete run enables the target but the cover set does not:\n{}",
            render_concrete_trace(original, steps)
        ));
    }
    Ok(CrosscheckReport {
        cover,
        word,
        concrete,
        divergences,
    })
}
