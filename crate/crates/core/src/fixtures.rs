//! Small reference nets used throughout the tests and documentation.

use crate::model::{Interval, Net, NetBuilder, TransitionBuilder};

/// One transition consuming two equally aged `p` tokens and a `q` token aged
/// in `]1,2]`, producing three `r` tokens inheriting the `q` age and a fresh
/// `s` token.
pub fn n_ex() -> Net {
    NetBuilder::new()
        .places(["p", "q", "r", "s"])
        .variables(["x", "y"])
        .transition(
            TransitionBuilder::new("t")
                .pre("p", "x", 2)
                .pre("q", "y", 1)
                .guard("x", Interval::closed(0, 5))
                .guard("y", Interval::new(1, true, Some(2), false).unwrap())
                .post_var("r", "y", 3)
                .post_reset("s", 1),
        )
        .build()
        .expect("fixture is well formed")
}

/// Non-consuming variant of [`n_ex`], written out by hand.
pub fn n_ex_nonconsuming() -> Net {
    NetBuilder::new()
        .places(["p", "q", "r", "s"])
        .variables(["x", "y"])
        .transition(
            TransitionBuilder::new("t")
                .pre("p", "x", 1)
                .pre("q", "y", 1)
                .guard("x", Interval::closed(0, 5))
                .guard("y", Interval::new(1, true, Some(2), false).unwrap())
                .post_var("p", "x", 1)
                .post_var("q", "y", 1)
                .post_var("r", "y", 3)
                .post_reset("s", 1),
        )
        .build()
        .expect("fixture is well formed")
}

/// Single place `p`; `t1` spawns a fresh token whenever some token is exactly
/// one time unit old, `t_goal` needs a token at least two units old.
pub fn n_tick() -> Net {
    n_tick_with_goal(Interval::at_least(2))
}

/// [`n_tick`] with a different guard on `t_goal`.
pub fn n_tick_with_goal(goal: Interval) -> Net {
    NetBuilder::new()
        .places(["p"])
        .variables(["x", "y"])
        .transition(
            TransitionBuilder::new("t1")
                .pre("p", "x", 1)
                .guard("x", Interval::point(1))
                .post_var("p", "x", 1)
                .post_reset("p", 1),
        )
        .transition(
            TransitionBuilder::new("t_goal")
                .pre("p", "y", 1)
                .guard("y", goal)
                .post_var("p", "y", 1),
        )
        .build()
        .expect("fixture is well formed")
}
