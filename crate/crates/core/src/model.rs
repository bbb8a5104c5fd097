//! Timed-arc Petri nets with one clock per token: syntax, markings and the
//! concrete discrete/time step relations.
//!
//! Token ages are exact rationals. Guards are intervals with natural
//! endpoints, possibly unbounded above.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Exact token age.
pub type Age = Ratio<u64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlaceId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransitionId(pub usize);

/// Guard interval with natural endpoints. `hi == None` stands for infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: u32,
    lo_open: bool,
    hi: Option<u32>,
    hi_open: bool,
}

impl Interval {
    /// Builds an interval, rejecting empty ones such as `]a,a[`, `[a,a[` or `hi < lo`.
    pub fn new(lo: u32, lo_open: bool, hi: Option<u32>, hi_open: bool) -> Result<Self> {
        match hi {
            Some(hi) if hi < lo => Err(Error::Semantic(format!(
                "interval upper bound {hi} is below lower bound {lo}"
            ))),
            Some(hi) if hi == lo && (lo_open || hi_open) => Err(Error::Semantic(format!(
                "degenerate interval at {lo} with an open endpoint is empty"
            ))),
            Some(_) => Ok(Interval {
                lo,
                lo_open,
                hi,
                hi_open,
            }),
            None => Ok(Interval {
                lo,
                lo_open,
                hi: None,
                hi_open: false,
            }),
        }
    }

    pub fn closed(lo: u32, hi: u32) -> Self {
        Self::new(lo, false, Some(hi), false).expect("closed interval with lo <= hi")
    }

    pub fn point(c: u32) -> Self {
        Self::closed(c, c)
    }

    /// `[lo, ∞[`
    pub fn at_least(lo: u32) -> Self {
        Interval {
            lo,
            lo_open: false,
            hi: None,
            hi_open: false,
        }
    }

    /// `[0, ∞[`, the guard of an unconstrained variable.
    pub fn any() -> Self {
        Self::at_least(0)
    }

    pub fn lo(&self) -> u32 {
        self.lo
    }

    pub fn lo_open(&self) -> bool {
        self.lo_open
    }

    pub fn hi(&self) -> Option<u32> {
        self.hi
    }

    pub fn hi_open(&self) -> bool {
        self.hi_open
    }

    pub fn contains(&self, value: &Age) -> bool {
        let lo = Age::from_integer(u64::from(self.lo));
        let above_lo = if self.lo_open {
            *value > lo
        } else {
            *value >= lo
        };
        let below_hi = match self.hi {
            None => true,
            Some(hi) => {
                let hi = Age::from_integer(u64::from(hi));
                if self.hi_open {
                    *value < hi
                } else {
                    *value <= hi
                }
            }
        };
        above_lo && below_hi
    }

    /// Membership of `half_units / 2`. Lets abstract representatives with
    /// fractional part 1/2 be checked in integer arithmetic.
    pub fn contains_half_units(&self, half_units: u64) -> bool {
        let lo = 2 * u64::from(self.lo);
        let above_lo = if self.lo_open {
            half_units > lo
        } else {
            half_units >= lo
        };
        let below_hi = match self.hi {
            None => true,
            Some(hi) => {
                let hi = 2 * u64::from(hi);
                if self.hi_open {
                    half_units < hi
                } else {
                    half_units <= hi
                }
            }
        };
        above_lo && below_hi
    }

    /// Largest finite endpoint.
    pub fn max_finite_endpoint(&self) -> u32 {
        self.hi.unwrap_or(self.lo).max(self.lo)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_open { ']' } else { '[' };
        match self.hi {
            None => write!(f, "{open}{},inf[", self.lo),
            Some(hi) => {
                let close = if self.hi_open { '[' } else { ']' };
                write!(f, "{open}{},{hi}{close}", self.lo)
            }
        }
    }
}

/// Clock value of a produced token: a reset or the value bound to a variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arg {
    Zero,
    Var(VarId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    name: String,
    guard: BTreeMap<VarId, Interval>,
    pre: BTreeMap<(PlaceId, VarId), u32>,
    post: BTreeMap<(PlaceId, Arg), u32>,
}

impl Transition {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Guard of `var`; variables without an explicit guard are unconstrained.
    pub fn guard(&self, var: VarId) -> Interval {
        self.guard.get(&var).copied().unwrap_or_else(Interval::any)
    }

    pub fn guards(&self) -> &BTreeMap<VarId, Interval> {
        &self.guard
    }

    pub fn pre(&self) -> &BTreeMap<(PlaceId, VarId), u32> {
        &self.pre
    }

    pub fn post(&self) -> &BTreeMap<(PlaceId, Arg), u32> {
        &self.post
    }

    /// Variables occurring in the precondition, ascending.
    pub fn variables(&self) -> Vec<VarId> {
        let vars: BTreeSet<VarId> = self.pre.keys().map(|&(_, v)| v).collect();
        vars.into_iter().collect()
    }

    pub(crate) fn from_parts(
        name: String,
        guard: BTreeMap<VarId, Interval>,
        pre: BTreeMap<(PlaceId, VarId), u32>,
        post: BTreeMap<(PlaceId, Arg), u32>,
    ) -> Self {
        Transition {
            name,
            guard,
            pre,
            post,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Net {
    places: Vec<String>,
    variables: Vec<String>,
    transitions: Vec<Transition>,
}

impl Net {
    /// Validates and assembles a net from already-resolved transitions.
    pub fn new(
        places: Vec<String>,
        variables: Vec<String>,
        transitions: Vec<Transition>,
    ) -> Result<Self> {
        check_unique("place", &places)?;
        check_unique("variable", &variables)?;
        let names: Vec<String> = transitions.iter().map(|t| t.name.clone()).collect();
        check_unique("transition", &names)?;
        for t in &transitions {
            for (&(p, v), &mult) in &t.pre {
                check_index("place", p.0, places.len(), &t.name)?;
                check_index("variable", v.0, variables.len(), &t.name)?;
                if mult == 0 {
                    return Err(Error::Semantic(format!(
                        "transition {}: zero multiplicity in precondition",
                        t.name
                    )));
                }
            }
            for &v in t.guard.keys() {
                check_index("variable", v.0, variables.len(), &t.name)?;
            }
            let pre_vars = t.variables();
            for (&(p, arg), &mult) in &t.post {
                check_index("place", p.0, places.len(), &t.name)?;
                if mult == 0 {
                    return Err(Error::Semantic(format!(
                        "transition {}: zero multiplicity in postcondition",
                        t.name
                    )));
                }
                if let Arg::Var(v) = arg {
                    check_index("variable", v.0, variables.len(), &t.name)?;
                    if !pre_vars.contains(&v) {
                        return Err(Error::Semantic(format!(
                            "transition {}: postcondition variable {} does not occur in the precondition",
                            t.name, variables[v.0]
                        )));
                    }
                }
            }
        }
        Ok(Net {
            places,
            variables,
            transitions,
        })
    }

    pub fn places(&self) -> &[String] {
        &self.places
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, id: TransitionId) -> &Transition {
        &self.transitions[id.0]
    }

    pub fn place_name(&self, p: PlaceId) -> &str {
        &self.places[p.0]
    }

    pub fn variable_name(&self, v: VarId) -> &str {
        &self.variables[v.0]
    }

    pub fn place_id(&self, name: &str) -> Option<PlaceId> {
        self.places.iter().position(|p| p == name).map(PlaceId)
    }

    pub fn variable_id(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v == name).map(VarId)
    }

    pub fn transition_id(&self, name: &str) -> Option<TransitionId> {
        self.transitions
            .iter()
            .position(|t| t.name == name)
            .map(TransitionId)
    }

    pub fn transition_ids(&self) -> impl Iterator<Item = TransitionId> {
        (0..self.transitions.len()).map(TransitionId)
    }
}

fn check_unique(kind: &str, names: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(Error::Semantic(format!("duplicate {kind} name '{n}'")));
        }
    }
    Ok(())
}

fn check_index(kind: &str, idx: usize, len: usize, transition: &str) -> Result<()> {
    if idx >= len {
        return Err(Error::Semantic(format!(
            "transition {transition}: undefined {kind} #{idx}"
        )));
    }
    Ok(())
}

/// Name-based construction of nets.
///
/// ```
/// use tpncover::model::{Interval, NetBuilder, TransitionBuilder};
/// let net = NetBuilder::new()
///     .places(["p"])
///     .variables(["x"])
///     .transition(
///         TransitionBuilder::new("t")
///             .pre("p", "x", 1)
///             .guard("x", Interval::point(1))
///             .post_var("p", "x", 1)
///             .post_reset("p", 1),
///     )
///     .build()
///     .unwrap();
/// assert_eq!(net.transitions().len(), 1);
/// ```
#[derive(Clone, Debug, Default)]
pub struct NetBuilder {
    places: Vec<String>,
    variables: Vec<String>,
    transitions: Vec<TransitionBuilder>,
}

impl NetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn places<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.places.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn variables<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.variables.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn transition(mut self, t: TransitionBuilder) -> Self {
        self.transitions.push(t);
        self
    }

    pub fn build(self) -> Result<Net> {
        let place = |n: &str| {
            self.places
                .iter()
                .position(|p| p == n)
                .map(PlaceId)
                .ok_or_else(|| Error::Semantic(format!("undefined place '{n}'")))
        };
        let var = |n: &str| {
            self.variables
                .iter()
                .position(|v| v == n)
                .map(VarId)
                .ok_or_else(|| Error::Semantic(format!("undefined variable '{n}'")))
        };
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for tb in &self.transitions {
            let mut guard = BTreeMap::new();
            for (v, i) in &tb.guard {
                if guard.insert(var(v)?, *i).is_some() {
                    return Err(Error::Semantic(format!(
                        "transition {}: duplicate guard for '{v}'",
                        tb.name
                    )));
                }
            }
            let mut pre = BTreeMap::new();
            for (p, v, m) in &tb.pre {
                let v = var(v)?;
                guard.entry(v).or_insert_with(Interval::any);
                *pre.entry((place(p)?, v)).or_insert(0) += m;
            }
            let mut post = BTreeMap::new();
            for (p, arg, m) in &tb.post {
                let arg = match arg {
                    None => Arg::Zero,
                    Some(v) => Arg::Var(var(v)?),
                };
                *post.entry((place(p)?, arg)).or_insert(0) += m;
            }
            transitions.push(Transition::from_parts(tb.name.clone(), guard, pre, post));
        }
        Net::new(self.places, self.variables, transitions)
    }
}

#[derive(Clone, Debug)]
pub struct TransitionBuilder {
    name: String,
    guard: Vec<(String, Interval)>,
    pre: Vec<(String, String, u32)>,
    post: Vec<(String, Option<String>, u32)>,
}

impl TransitionBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        TransitionBuilder {
            name: name.into(),
            guard: Vec::new(),
            pre: Vec::new(),
            post: Vec::new(),
        }
    }

    pub fn guard(mut self, var: impl Into<String>, interval: Interval) -> Self {
        self.guard.push((var.into(), interval));
        self
    }

    pub fn pre(mut self, place: impl Into<String>, var: impl Into<String>, mult: u32) -> Self {
        self.pre.push((place.into(), var.into(), mult));
        self
    }

    pub fn post_var(mut self, place: impl Into<String>, var: impl Into<String>, mult: u32) -> Self {
        self.post.push((place.into(), Some(var.into()), mult));
        self
    }

    pub fn post_reset(mut self, place: impl Into<String>, mult: u32) -> Self {
        self.post.push((place.into(), None, mult));
        self
    }
}

/// Finite multiset of timed tokens.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking {
    tokens: BTreeMap<(PlaceId, Age), u32>,
}

impl Marking {
    pub fn new() -> Self {
        Self::default()
    }

    /// `count` tokens of age zero on `place`.
    pub fn initial(place: PlaceId, count: u32) -> Self {
        let mut m = Marking::new();
        m.add(place, Age::zero(), count);
        m
    }

    pub fn from_tokens<I: IntoIterator<Item = (PlaceId, Age)>>(tokens: I) -> Self {
        let mut m = Marking::new();
        for (p, a) in tokens {
            m.add(p, a, 1);
        }
        m
    }

    pub fn add(&mut self, place: PlaceId, age: Age, count: u32) {
        if count > 0 {
            *self.tokens.entry((place, age)).or_insert(0) += count;
        }
    }

    pub fn count(&self, place: PlaceId, age: &Age) -> u32 {
        self.tokens.get(&(place, *age)).copied().unwrap_or(0)
    }

    /// Number of tokens, counting multiplicity.
    pub fn size(&self) -> u64 {
        self.tokens.values().map(|&c| u64::from(c)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PlaceId, &Age, u32)> {
        self.tokens.iter().map(|(&(p, ref a), &c)| (p, a, c))
    }

    /// Distinct ages present, ascending.
    pub fn ages(&self) -> Vec<Age> {
        let set: BTreeSet<Age> = self.tokens.keys().map(|(_, a)| *a).collect();
        set.into_iter().collect()
    }

    /// Distinct fractional parts present, ascending.
    pub fn fractions(&self) -> Vec<Age> {
        let set: BTreeSet<Age> = self.tokens.keys().map(|(_, a)| a.fract()).collect();
        set.into_iter().collect()
    }

    /// Pointwise `self >= other`.
    pub fn covers(&self, other: &Marking) -> bool {
        other
            .tokens
            .iter()
            .all(|(k, &c)| self.tokens.get(k).copied().unwrap_or(0) >= c)
    }

    /// Multiset difference; `None` unless `self >= other`.
    pub fn minus(&self, other: &Marking) -> Option<Marking> {
        let mut out = self.clone();
        for (k, &c) in &other.tokens {
            let have = out.tokens.get_mut(k)?;
            if *have < c {
                return None;
            }
            *have -= c;
            if *have == 0 {
                out.tokens.remove(k);
            }
        }
        Some(out)
    }

    pub fn plus(&self, other: &Marking) -> Marking {
        let mut out = self.clone();
        for (&(p, a), &c) in &other.tokens {
            out.add(p, a, c);
        }
        out
    }

    /// Replaces every age strictly above `cmax` by `cmax + 1`. Guards whose
    /// finite endpoints are all at most `cmax` cannot tell such ages apart.
    pub fn collapse_above(&self, cmax: u32) -> Marking {
        let limit = Age::from_integer(u64::from(cmax));
        let top = Age::from_integer(u64::from(cmax) + 1);
        let mut out = Marking::new();
        for (&(p, a), &c) in &self.tokens {
            out.add(p, if a > limit { top } else { a }, c);
        }
        out
    }
}

/// Assignment of ages to transition variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Valuation(BTreeMap<VarId, Age>);

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, var: VarId, age: Age) {
        self.0.insert(var, age);
    }

    pub fn get(&self, var: VarId) -> Option<&Age> {
        self.0.get(&var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, &Age)> {
        self.0.iter().map(|(&v, a)| (v, a))
    }
}

impl<const N: usize> From<[(VarId, Age); N]> for Valuation {
    fn from(pairs: [(VarId, Age); N]) -> Self {
        Valuation(pairs.into_iter().collect())
    }
}

/// Largest finite guard endpoint of the net; zero when there is none.
pub fn cmax(net: &Net) -> u32 {
    net.transitions
        .iter()
        .flat_map(|t| t.guard.values())
        .map(Interval::max_finite_endpoint)
        .max()
        .unwrap_or(0)
}

/// Instantiates the precondition of `t` under `pi`.
fn instantiate_pre(t: &Transition, pi: &Valuation) -> Option<Marking> {
    let mut m = Marking::new();
    for (&(p, v), &mult) in &t.pre {
        m.add(p, *pi.get(v)?, mult);
    }
    Some(m)
}

fn instantiate_post(t: &Transition, pi: &Valuation) -> Option<Marking> {
    let mut m = Marking::new();
    for (&(p, arg), &mult) in &t.post {
        let age = match arg {
            Arg::Zero => Age::zero(),
            Arg::Var(v) => *pi.get(v)?,
        };
        m.add(p, age, mult);
    }
    Some(m)
}

/// All valuations of `Var(t)` over ages present in `m` that satisfy the guard
/// and whose instantiated precondition fits in `m`. Variables are assigned
/// in ascending id order, ages ascending, so the first element is canonical.
pub fn valuations(m: &Marking, t: &Transition) -> Vec<Valuation> {
    let vars = t.variables();
    let ages = m.ages();
    let candidates: Vec<Vec<Age>> = vars
        .iter()
        .map(|&v| {
            let g = t.guard(v);
            ages.iter().copied().filter(|a| g.contains(a)).collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut current = Valuation::new();
    search(
        m,
        t,
        &vars,
        &candidates,
        0,
        &mut current,
        &mut out,
        usize::MAX,
    );
    out
}

/// Canonical enabling valuation of `t` in `m`, if any.
pub fn enabled_concrete(m: &Marking, t: &Transition) -> Option<Valuation> {
    let vars = t.variables();
    let ages = m.ages();
    let candidates: Vec<Vec<Age>> = vars
        .iter()
        .map(|&v| {
            let g = t.guard(v);
            ages.iter().copied().filter(|a| g.contains(a)).collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut current = Valuation::new();
    search(m, t, &vars, &candidates, 0, &mut current, &mut out, 1);
    out.pop()
}

#[allow(clippy::too_many_arguments)]
fn search(
    m: &Marking,
    t: &Transition,
    vars: &[VarId],
    candidates: &[Vec<Age>],
    depth: usize,
    current: &mut Valuation,
    out: &mut Vec<Valuation>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    if depth == vars.len() {
        out.push(current.clone());
        return;
    }
    let var = vars[depth];
    for age in &candidates[depth] {
        current.set(var, *age);
        if partial_fits(m, t, current) {
            search(m, t, vars, candidates, depth + 1, current, out, limit);
            if out.len() >= limit {
                current.0.remove(&var);
                return;
            }
        }
    }
    current.0.remove(&var);
}

/// Checks the part of the precondition over assigned variables against `m`.
fn partial_fits(m: &Marking, t: &Transition, pi: &Valuation) -> bool {
    let mut need: BTreeMap<(PlaceId, Age), u32> = BTreeMap::new();
    for (&(p, v), &mult) in &t.pre {
        if let Some(a) = pi.get(v) {
            *need.entry((p, *a)).or_insert(0) += mult;
        }
    }
    need.iter().all(|(&(p, a), &c)| m.count(p, &a) >= c)
}

/// Discrete step `m --t,pi--> m'`.
pub fn fire(m: &Marking, t: &Transition, pi: &Valuation) -> Result<Marking> {
    for v in t.variables() {
        let a = pi.get(v).ok_or_else(|| {
            Error::RejectedInput(format!(
                "valuation does not bind variable #{} of {}",
                v.0, t.name
            ))
        })?;
        if !t.guard(v).contains(a) {
            return Err(Error::RejectedInput(format!(
                "valuation violates the guard of {} on variable #{}",
                t.name, v.0
            )));
        }
    }
    let pre = instantiate_pre(t, pi).expect("all variables bound");
    let rest = m.minus(&pre).ok_or_else(|| {
        Error::RejectedInput(format!(
            "marking does not contain the precondition of {}",
            t.name
        ))
    })?;
    let post = instantiate_post(t, pi).expect("post variables occur in pre");
    Ok(rest.plus(&post))
}

/// Time step: every age grows by `d`.
pub fn elapse(m: &Marking, d: Age) -> Marking {
    let mut out = Marking::new();
    for (&(p, a), &c) in &m.tokens {
        out.add(p, a + d, c);
    }
    out
}

/// Unit pre-multiplicities and `Pre(t) <= Post(t)` for every transition.
pub fn is_nonconsuming(net: &Net) -> bool {
    net.transitions.iter().all(|t| {
        t.pre.iter().all(|(&(p, v), &mult)| {
            mult <= 1 && t.post.get(&(p, Arg::Var(v))).copied().unwrap_or(0) >= mult
        })
    })
}
