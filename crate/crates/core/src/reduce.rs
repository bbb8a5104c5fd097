//! Reduction of arbitrary nets to non-consuming ones.

use std::collections::BTreeMap;

use crate::model::{Arg, Net, Transition};

/// Non-consuming variant of `net` with the same coverability answer from
/// `N·{(p,0)}`.
///
/// Each precondition arc is capped at multiplicity one, and the capped
/// precondition is added back to the postcondition so that firing never
/// removes a token. Transition names and order are preserved.
pub fn make_nonconsuming(net: &Net) -> Net {
    let transitions = net
        .transitions()
        .iter()
        .map(|t| {
            let pre: BTreeMap<_, _> = t.pre().keys().map(|&k| (k, 1)).collect();
            let mut post = t.post().clone();
            for &(p, v) in pre.keys() {
                *post.entry((p, Arg::Var(v))).or_insert(0) += 1;
            }
            Transition::from_parts(t.name().to_string(), t.guards().clone(), pre, post)
        })
        .collect();
    Net::new(net.places().to_vec(), net.variables().to_vec(), transitions)
        .expect("reduction preserves well-formedness")
}
