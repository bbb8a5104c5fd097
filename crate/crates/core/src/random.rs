//! Seeded generators for nets, symbols, expressions, markings and circuits.
//! Used by the property and acceptance tests; deterministic per seed.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::circuit::{BitVec, Circuit, Constraint, Op};
use crate::model::{
    Age, Arg, Interval, Marking, Net, NetBuilder, PlaceId, Transition, TransitionBuilder,
};
use crate::regions::{Alphabet, Atom, SimpleExpr, Symbol, Word};

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng as Rng64;

pub fn rng(seed: u64) -> Rng64 {
    Rng64::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug)]
pub struct NetShape {
    pub max_places: usize,
    pub max_cmax: u32,
    pub max_transitions: usize,
    pub max_variables: usize,
}

impl Default for NetShape {
    fn default() -> Self {
        NetShape {
            max_places: 4,
            max_cmax: 3,
            max_transitions: 4,
            max_variables: 2,
        }
    }
}

fn interval<R: Rng>(rng: &mut R, bound: u32) -> Interval {
    let lo = rng.gen_range(0..=bound);
    let lo_open = rng.gen_bool(0.3);
    if rng.gen_bool(0.3) {
        return Interval::new(lo, lo_open, None, false).expect("unbounded");
    }
    let hi = rng.gen_range(lo..=bound);
    let (lo_open, hi_open) = if hi == lo {
        (false, false)
    } else {
        (lo_open, rng.gen_bool(0.3))
    };
    Interval::new(lo, lo_open, Some(hi), hi_open).expect("nonempty by construction")
}

/// Random non-consuming net. Place 0 is meant as the initial place.
pub fn nonconsuming_net<R: Rng>(rng: &mut R, shape: &NetShape) -> Net {
    let n_places = rng.gen_range(1..=shape.max_places);
    let bound = rng.gen_range(0..=shape.max_cmax);
    let n_vars = rng.gen_range(1..=shape.max_variables);
    let places: Vec<String> = (0..n_places).map(|i| format!("p{i}")).collect();
    let vars: Vec<String> = (0..n_vars).map(|i| format!("x{i}")).collect();
    let n_trans = rng.gen_range(1..=shape.max_transitions);
    let mut builder = NetBuilder::new()
        .places(places.clone())
        .variables(vars.clone());
    for ti in 0..n_trans {
        let mut tb = TransitionBuilder::new(format!("t{ti}"));
        let used = rng.gen_range(1..=n_vars);
        let mut var_pool = vars.clone();
        var_pool.shuffle(rng);
        let used_vars: Vec<String> = var_pool.into_iter().take(used).collect();
        for v in &used_vars {
            let k = if n_places > 1 && rng.gen_bool(0.2) {
                2
            } else {
                1
            };
            let mut place_pool = places.clone();
            place_pool.shuffle(rng);
            for p in place_pool.into_iter().take(k) {
                tb = tb.pre(p.clone(), v.clone(), 1).post_var(p, v.clone(), 1);
            }
            tb = tb.guard(v.clone(), interval(rng, bound));
        }
        for _ in 0..rng.gen_range(1..=2) {
            let p = places.choose(rng).expect("nonempty").clone();
            if rng.gen_bool(0.5) {
                tb = tb.post_reset(p, 1);
            } else {
                let v = used_vars.choose(rng).expect("nonempty").clone();
                tb = tb.post_var(p, v, 1);
            }
        }
        builder = builder.transition(tb);
    }
    builder.build().expect("generated net is well formed")
}

/// Random net that may consume tokens: a non-consuming net whose mirrored
/// post arcs are dropped at random and whose pre arcs may be doubled.
pub fn consuming_net<R: Rng>(rng: &mut R, shape: &NetShape) -> Net {
    let base = nonconsuming_net(rng, shape);
    let transitions = base
        .transitions()
        .iter()
        .map(|t| {
            let mut pre = t.pre().clone();
            let mut post = t.post().clone();
            for (&(p, v), mult) in pre.iter_mut() {
                if rng.gen_bool(0.5) {
                    if let Some(m) = post.get_mut(&(p, Arg::Var(v))) {
                        *m -= 1;
                    }
                }
                if rng.gen_bool(0.25) {
                    *mult = 2;
                }
            }
            post.retain(|_, m| *m > 0);
            let used: Vec<_> = pre.keys().map(|&(_, v)| v).collect();
            post.retain(|(_, arg), _| match arg {
                Arg::Zero => true,
                Arg::Var(v) => used.contains(v),
            });
            Transition::from_parts(t.name().to_string(), t.guards().clone(), pre, post)
        })
        .collect();
    Net::new(
        base.places().to_vec(),
        base.variables().to_vec(),
        transitions,
    )
    .expect("dropping arcs keeps the net well formed")
}

pub fn symbol<R: Rng>(rng: &mut R, alphabet: &Alphabet, density: f64) -> Symbol {
    let mut s = Symbol::empty();
    for p in 0..alphabet.num_places() {
        for a in 0..=alphabet.cmax() + 1 {
            if rng.gen_bool(density) {
                s.insert_bit(alphabet.bit(PlaceId(p), a));
            }
        }
    }
    s
}

/// Symbol containing `s`, grown by random extra pairs.
pub fn superset<R: Rng>(rng: &mut R, alphabet: &Alphabet, s: &Symbol, density: f64) -> Symbol {
    s.union(&symbol(rng, alphabet, density))
}

/// Random expression with an unstarred front.
pub fn expr<R: Rng>(rng: &mut R, alphabet: &Alphabet, max_len: usize) -> SimpleExpr {
    let len = rng.gen_range(1..=max_len);
    let atoms = (0..len)
        .map(|i| Atom {
            symbol: symbol(rng, alphabet, 0.25),
            starred: i > 0 && rng.gen_bool(0.4),
        })
        .collect();
    SimpleExpr::new(atoms).expect("nonempty")
}

/// Random normalized word.
pub fn word<R: Rng>(rng: &mut R, alphabet: &Alphabet, max_len: usize) -> Word {
    let len = rng.gen_range(1..=max_len);
    let mut symbols = vec![symbol(rng, alphabet, 0.25)];
    while symbols.len() < len {
        let s = symbol(rng, alphabet, 0.25);
        if !s.is_empty() {
            symbols.push(s);
        }
    }
    Word::new(symbols).expect("nonempty")
}

/// Random marking with ages `k / denominator`, `k <= max_age * denominator`.
pub fn marking<R: Rng>(
    rng: &mut R,
    n_places: usize,
    max_tokens: usize,
    max_age: u64,
    denominator: u64,
) -> Marking {
    let mut m = Marking::new();
    for _ in 0..rng.gen_range(0..=max_tokens) {
        let p = PlaceId(rng.gen_range(0..n_places));
        let k = rng.gen_range(0..=max_age * denominator);
        m.add(p, Age::new(k, denominator), 1);
    }
    m
}

/// Circuit with uniformly chosen operators and operand indices.
pub fn circuit<R: Rng>(rng: &mut R, n: usize) -> Circuit {
    let constraints = (0..n)
        .map(|_| Constraint {
            op: if rng.gen_bool(0.5) { Op::And } else { Op::Or },
            j: rng.gen_range(0..n),
            k: rng.gen_range(0..n),
        })
        .collect();
    Circuit::new(n, constraints).expect("indices in range")
}

pub fn bitvec<R: Rng>(rng: &mut R, n: usize) -> BitVec {
    BitVec::new((0..n).map(|_| rng.gen_bool(0.5)).collect())
}
