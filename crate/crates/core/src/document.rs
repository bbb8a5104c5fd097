//! JSON surface syntax for nets.
//!
//! ```json
//! {
//!   "places": ["p", "q"],
//!   "variables": ["x"],
//!   "transitions": [
//!     {
//!       "id": "t",
//!       "guard": { "x": { "lo": 1, "lo_open": false, "hi": "inf", "hi_open": false } },
//!       "pre":  [ { "place": "p", "var": "x", "mult": 1 } ],
//!       "post": [ { "place": "p", "arg": "x", "mult": 1 }, { "place": "q", "arg": "0", "mult": 1 } ]
//!     }
//!   ],
//!   "query": { "initial": "p", "target": "t" }
//! }
//! ```
//!
//! Unknown keys are rejected. A variable without a guard entry is
//! unconstrained and `mult` defaults to 1. The `query` block is optional.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Arg, Interval, Net, NetBuilder, TransitionBuilder};

/// Upper interval bound: a natural number or the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Finite(u32),
    Infinite(Inf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Inf {
    #[serde(rename = "inf")]
    Inf,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalDoc {
    pub lo: u32,
    #[serde(default)]
    pub lo_open: bool,
    pub hi: Bound,
    #[serde(default)]
    pub hi_open: bool,
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreArc {
    pub place: String,
    pub var: String,
    #[serde(default = "one")]
    pub mult: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PostArc {
    pub place: String,
    /// `"0"` for a fresh token, otherwise a variable name.
    pub arg: String,
    #[serde(default = "one")]
    pub mult: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub id: String,
    #[serde(default)]
    pub guard: BTreeMap<String, IntervalDoc>,
    #[serde(default)]
    pub pre: Vec<PreArc>,
    #[serde(default)]
    pub post: Vec<PostArc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryDoc {
    pub initial: String,
    pub target: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetDocument {
    pub places: Vec<String>,
    #[serde(default)]
    pub variables: Vec<String>,
    #[serde(default)]
    pub transitions: Vec<TransitionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query: Option<QueryDoc>,
}

const RESET: &str = "0";

impl IntervalDoc {
    fn to_interval(&self) -> Result<Interval> {
        let hi = match self.hi {
            Bound::Finite(h) => Some(h),
            Bound::Infinite(_) => None,
        };
        Interval::new(self.lo, self.lo_open, hi, self.hi_open && hi.is_some())
    }

    fn from_interval(i: &Interval) -> Self {
        IntervalDoc {
            lo: i.lo(),
            lo_open: i.lo_open(),
            hi: i.hi().map_or(Bound::Infinite(Inf::Inf), Bound::Finite),
            hi_open: i.hi_open(),
        }
    }
}

impl NetDocument {
    pub fn from_net(net: &Net) -> Self {
        let transitions = net
            .transitions()
            .iter()
            .map(|t| TransitionDoc {
                id: t.name().to_string(),
                guard: t
                    .guards()
                    .iter()
                    .map(|(&v, i)| {
                        (
                            net.variable_name(v).to_string(),
                            IntervalDoc::from_interval(i),
                        )
                    })
                    .collect(),
                pre: t
                    .pre()
                    .iter()
                    .map(|(&(p, v), &mult)| PreArc {
                        place: net.place_name(p).to_string(),
                        var: net.variable_name(v).to_string(),
                        mult,
                    })
                    .collect(),
                post: t
                    .post()
                    .iter()
                    .map(|(&(p, arg), &mult)| PostArc {
                        place: net.place_name(p).to_string(),
                        arg: match arg {
                            Arg::Zero => RESET.to_string(),
                            Arg::Var(v) => net.variable_name(v).to_string(),
                        },
                        mult,
                    })
                    .collect(),
            })
            .collect();
        NetDocument {
            places: net.places().to_vec(),
            variables: net.variables().to_vec(),
            transitions,
            query: None,
        }
    }

    pub fn with_query(mut self, initial: &str, target: &str) -> Self {
        self.query = Some(QueryDoc {
            initial: initial.to_string(),
            target: target.to_string(),
        });
        self
    }

    pub fn to_net(&self) -> Result<Net> {
        if self.variables.iter().any(|v| v == RESET) {
            return Err(Error::Semantic(format!(
                "'{RESET}' is reserved for fresh tokens and cannot name a variable"
            )));
        }
        let mut b = NetBuilder::new()
            .places(self.places.iter().cloned())
            .variables(self.variables.iter().cloned());
        for td in &self.transitions {
            let mut tb = TransitionBuilder::new(td.id.clone());
            for (v, i) in &td.guard {
                let interval = i.to_interval().map_err(|e| {
                    Error::Semantic(format!("transition {}, guard of {v}: {e}", td.id))
                })?;
                tb = tb.guard(v.clone(), interval);
            }
            for a in &td.pre {
                tb = tb.pre(a.place.clone(), a.var.clone(), a.mult);
            }
            for a in &td.post {
                tb = if a.arg == RESET {
                    tb.post_reset(a.place.clone(), a.mult)
                } else {
                    tb.post_var(a.place.clone(), a.arg.clone(), a.mult)
                };
            }
            b = b.transition(tb);
        }
        b.build()
    }
}

/// Parses a document. Malformed JSON, unknown keys and wrongly typed values
/// are syntax errors with the position reported by the JSON reader.
pub fn parse_document(text: &str) -> Result<NetDocument> {
    serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn parse_net(text: &str) -> Result<Net> {
    parse_document(text)?.to_net()
}

pub fn print_document(doc: &NetDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}

pub fn print_net(net: &Net) -> String {
    print_document(&NetDocument::from_net(net))
}
