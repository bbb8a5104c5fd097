//! Unfold, saturate and collapse loop turning one `a b*` expression into the
//! three expressions `(S1, Sl, R)` that describe its cover set:
//! `Cover(⟦a b*⟧) = ⟦S1⟧ ∪ ⟦Sl⟧ ∪ Cover(⟦R⟧)`.

use crate::error::{Error, Result};
use crate::regions::{Atom, SimpleExpr};
use crate::saturation::Saturator;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccelerateResult {
    /// `SAT(S0)`, shape `a b*`.
    pub s1: SimpleExpr,
    /// Fixpoint of the collapsed unfoldings, shape `a b* c d*`.
    pub sl: SimpleExpr,
    /// Seed of the next round, shape `a b*`.
    pub r: SimpleExpr,
    /// Index `i` of the fixpoint `S_i = S_{i-1}` (symbols compared
    /// pointwise); counting starts at 3.
    pub iterations: usize,
    /// `S_1, S_2, …, S_i` in order.
    pub history: Vec<SimpleExpr>,
}

/// Upper bound on the loop index implied by pointwise growth of the four
/// symbols of `S_i` from `i = 4` on. Exceeding it means the growth
/// argument failed.
pub fn safety_cap(num_places: usize, cmax: u32) -> usize {
    5 + 4 * num_places * (cmax as usize + 2)
}

/// `(x0 + 1)·E`, where `x0` is the symbol of the last atom of `e`.
fn unfold(sat: &Saturator, e: &SimpleExpr) -> SimpleExpr {
    let last = &e.atoms().last().expect("nonempty").symbol;
    e.prepend(sat.alphabet().plus_one(last))
}

fn check_shape(s0: &SimpleExpr) -> Result<()> {
    let atoms = s0.atoms();
    if atoms.len() != 2 || atoms[0].starred || !atoms[1].starred {
        return Err(Error::Shape(
            "accelerate expects a length-2 expression of the form a b*".into(),
        ));
    }
    Ok(())
}

/// `later[offset + j] ⊇ earlier[j]` for every `j`.
fn grows(earlier: &SimpleExpr, later: &SimpleExpr, offset: usize) -> bool {
    earlier
        .symbols()
        .zip(later.symbols().skip(offset))
        .all(|(a, b)| a.is_subset(b))
}

fn violated(what: &str, i: usize) -> Error {
    Error::Invariant(format!("accelerate step {i}: {what}"))
}

pub fn accelerate(sat: &Saturator, s0: &SimpleExpr) -> Result<AccelerateResult> {
    check_shape(s0)?;
    let alphabet = sat.alphabet();
    let cap = safety_cap(alphabet.num_places(), alphabet.cmax());

    let s1 = sat.saturate_expr(s0)?;
    let s2 = sat.saturate_expr(&unfold(sat, &s1))?;
    if !grows(&s1, &s2, 1) {
        return Err(violated("S2 does not extend S1", 2));
    }
    let s3 = sat.saturate_expr(&unfold(sat, &s2))?;
    if !grows(&s2, &s3, 1) {
        return Err(violated("S3 does not extend S2", 3));
    }
    if !s2.atoms()[0].symbol.is_subset(&s3.atoms()[0].symbol) {
        return Err(violated("front of S3 does not contain front of S2", 3));
    }

    let mut history = vec![s1.clone(), s2, s3];
    let mut i = 3;
    loop {
        let current = history.last().expect("nonempty");
        let long = sat.saturate_expr(&unfold(sat, current))?;
        if !grows(current, &long, 1) {
            return Err(violated(
                "saturated unfolding shrank a tracked symbol",
                i + 1,
            ));
        }
        let a = long.atoms();
        if !current.atoms()[1].symbol.is_subset(&a[1].symbol) {
            return Err(violated("second symbol of the unfolding shrank", i + 1));
        }
        let next = SimpleExpr::new(vec![
            a[0].clone(),
            Atom::starred(a[1].symbol.clone()),
            a[3].clone(),
            a[4].clone(),
        ])?;
        if !current.pointwise_subset(&next) {
            return Err(violated(
                "collapsed expression is not pointwise larger",
                i + 1,
            ));
        }
        i += 1;
        // S3 never carries the star that collapsing introduces, so only
        // symbols are compared.
        let fixpoint = next.symbols().eq(current.symbols());
        history.push(next);
        if fixpoint {
            break;
        }
        if i > cap {
            return Err(violated("no fixpoint within the growth bound", i));
        }
    }

    let sl = history.last().expect("nonempty").clone();
    let atoms = sl.atoms();
    let r = SimpleExpr::new(vec![
        Atom::plain(alphabet.plus_one(&atoms[2].symbol)),
        Atom::starred(atoms[1].symbol.clone()),
    ])?;
    Ok(AccelerateResult {
        s1,
        sl,
        r,
        iterations: i,
        history,
    })
}
