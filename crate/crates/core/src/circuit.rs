//! Iterated depth-1 monotone Boolean circuits and their encoding as
//! coverability queries.
//!
//! Bit `i` of the next vector is `v[j] AND v[k]` or `v[j] OR v[k]`. The net
//! keeps one generation of tokens per time unit: a `(True_i, 0)` token means
//! bit `i` is set in the current generation, `(False_i, 0)` that it is clear.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::coverset::CoverQuery;
use crate::error::{Error, Result};
use crate::model::{Interval, NetBuilder, TransitionBuilder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    And,
    Or,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub op: Op,
    pub j: usize,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Circuit {
    n: usize,
    constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVec(Vec<bool>);

impl BitVec {
    pub fn new(bits: Vec<bool>) -> Self {
        BitVec(bits)
    }

    pub fn zeros(n: usize) -> Self {
        BitVec(vec![false; n])
    }

    pub fn ones(n: usize) -> Self {
        BitVec(vec![true; n])
    }

    /// All `2^n` vectors of length `n`, bit 0 least significant.
    pub fn all(n: usize) -> impl Iterator<Item = BitVec> {
        (0u64..1 << n).map(move |code| BitVec((0..n).map(|i| code >> i & 1 == 1).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }
}

impl FromStr for BitVec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Syntax {
                line: 1,
                column: 1,
                message: "empty bit vector".into(),
            });
        }
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Syntax {
                    line: 1,
                    column: i + 1,
                    message: format!("expected 0 or 1, found '{other}'"),
                }),
            })
            .collect::<Result<_>>()
            .map(BitVec)
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Circuit {
    pub fn new(n: usize, constraints: Vec<Constraint>) -> Result<Self> {
        if n == 0 {
            return Err(Error::RejectedInput(
                "a circuit needs at least one bit".into(),
            ));
        }
        if constraints.len() != n {
            return Err(Error::RejectedInput(format!(
                "expected {n} constraints, got {}",
                constraints.len()
            )));
        }
        if let Some((i, c)) = constraints
            .iter()
            .enumerate()
            .find(|(_, c)| c.j >= n || c.k >= n)
        {
            return Err(Error::RejectedInput(format!(
                "constraint {i} refers to bit {} of {n}",
                c.j.max(c.k)
            )));
        }
        Ok(Circuit { n, constraints })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Parses `n` on the first line followed by `i: j AND k` / `i: j OR k`
    /// lines, one per bit in any order. Blank lines and `#` comments are
    /// skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let syntax = |line: usize, message: String| Error::Syntax {
            line,
            column: 1,
            message,
        };
        let (first, header) = lines
            .next()
            .ok_or_else(|| syntax(1, "missing bit count".into()))?;
        let n: usize = header
            .parse()
            .map_err(|_| syntax(first, format!("expected bit count, found '{header}'")))?;
        let mut slots: Vec<Option<Constraint>> = vec![None; n];
        for (no, line) in lines {
            let (lhs, rhs) = line
                .split_once(':')
                .ok_or_else(|| syntax(no, "expected 'i: j OP k'".into()))?;
            let index = |s: &str| -> Result<usize> {
                s.trim()
                    .parse()
                    .map_err(|_| syntax(no, format!("expected bit index, found '{}'", s.trim())))
            };
            let i = index(lhs)?;
            let parts: Vec<&str> = rhs.split_whitespace().collect();
            let [j, op, k] = parts[..] else {
                return Err(syntax(no, "expected 'j AND k' or 'j OR k'".into()));
            };
            let op = match op.to_ascii_uppercase().as_str() {
                "AND" => Op::And,
                "OR" => Op::Or,
                other => return Err(syntax(no, format!("unknown operator '{other}'"))),
            };
            let c = Constraint {
                op,
                j: index(j)?,
                k: index(k)?,
            };
            let slot = slots
                .get_mut(i)
                .ok_or_else(|| syntax(no, format!("bit {i} out of range")))?;
            if slot.replace(c).is_some() {
                return Err(syntax(no, format!("bit {i} defined twice")));
            }
        }
        let constraints = slots
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| Error::Semantic(format!("no constraint for bit {i}"))))
            .collect::<Result<Vec<_>>>()?;
        Circuit::new(n, constraints).map_err(|e| match e {
            Error::RejectedInput(m) => Error::Semantic(m),
            other => other,
        })
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for (i, c) in self.constraints.iter().enumerate() {
            let op = match c.op {
                Op::And => "AND",
                Op::Or => "OR",
            };
            writeln!(f, "{i}: {} {op} {}", c.j, c.k)?;
        }
        Ok(())
    }
}

fn check_len(c: &Circuit, v: &BitVec) -> Result<()> {
    if v.len() != c.n {
        return Err(Error::RejectedInput(format!(
            "vector has {} bits, circuit has {}",
            v.len(),
            c.n
        )));
    }
    Ok(())
}

pub fn eval_step(c: &Circuit, v: &BitVec) -> Result<BitVec> {
    check_len(c, v)?;
    Ok(BitVec(
        c.constraints
            .iter()
            .map(|k| match k.op {
                Op::And => v.0[k.j] && v.0[k.k],
                Op::Or => v.0[k.j] || v.0[k.k],
            })
            .collect(),
    ))
}

/// Whether some iterate `F^m(v)`, `m >= 0`, has bit 0 set.
pub fn iterate_decide(c: &Circuit, v: &BitVec) -> Result<bool> {
    check_len(c, v)?;
    let mut seen = HashSet::new();
    let mut cur = v.clone();
    while seen.insert(cur.clone()) {
        if cur.0[0] {
            return Ok(true);
        }
        cur = eval_step(c, &cur)?;
    }
    Ok(false)
}

pub const INITIAL_PLACE: &str = "p_init";
pub const TARGET_TRANSITION: &str = "t_star";

fn true_place(i: usize) -> String {
    format!("True_{i}")
}

fn false_place(i: usize) -> String {
    format!("False_{i}")
}

type PlaceName = fn(usize) -> String;

/// Encodes `(C, v)` so that `t_star` is coverable from `N·{(p_init, 0)}`
/// exactly when some iterate of `v` has bit 0 set.
pub fn circuit_to_tpn(c: &Circuit, v: &BitVec) -> Result<CoverQuery> {
    check_len(c, v)?;
    let mut places = Vec::with_capacity(2 * c.n + 1);
    for i in 0..c.n {
        places.push(true_place(i));
        places.push(false_place(i));
    }
    places.push(INITIAL_PLACE.to_string());
    let mut b = NetBuilder::new()
        .places(places)
        .variables(["x", "y", "w", "z"]);
    let one = Interval::point(1);

    for (i, k) in c.constraints.iter().enumerate() {
        // Both operands must agree for `both`, either one suffices for `one_of`.
        let (both, one_of): (PlaceName, PlaceName) = match k.op {
            Op::And => (true_place, false_place),
            Op::Or => (false_place, true_place),
        };
        b = b
            .transition(
                TransitionBuilder::new(format!("{i}.B"))
                    .pre(both(k.j), "x", 1)
                    .pre(both(k.k), "y", 1)
                    .guard("x", one)
                    .guard("y", one)
                    .post_var(both(k.j), "x", 1)
                    .post_var(both(k.k), "y", 1)
                    .post_reset(both(i), 1),
            )
            .transition(
                TransitionBuilder::new(format!("{i}.L"))
                    .pre(one_of(k.j), "x", 1)
                    .guard("x", one)
                    .post_var(one_of(k.j), "x", 1)
                    .post_reset(one_of(i), 1),
            )
            .transition(
                TransitionBuilder::new(format!("{i}.R"))
                    .pre(one_of(k.k), "x", 1)
                    .guard("x", one)
                    .post_var(one_of(k.k), "x", 1)
                    .post_reset(one_of(i), 1),
            );
    }
    for i in 0..c.n {
        let place = if v.0[i] {
            true_place(i)
        } else {
            false_place(i)
        };
        b = b.transition(
            TransitionBuilder::new(format!("init_{i}"))
                .pre(INITIAL_PLACE, "w", 1)
                .guard("w", Interval::point(0))
                .post_var(INITIAL_PLACE, "w", 1)
                .post_reset(place, 1),
        );
    }
    b = b.transition(
        TransitionBuilder::new(TARGET_TRANSITION)
            .pre(true_place(0), "z", 1)
            .guard("z", Interval::point(0))
            .post_var(true_place(0), "z", 1),
    );
    CoverQuery::by_name(b.build()?, INITIAL_PLACE, TARGET_TRANSITION)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverset::exists_cover;
    use crate::model::is_nonconsuming;

    fn example() -> Circuit {
        Circuit::parse("2\n0: 0 OR 1\n1: 0 AND 1\n").unwrap()
    }

    #[test]
    fn two_bit_example() {
        let c = example();
        let v: BitVec = "01".parse().unwrap();
        assert_eq!(eval_step(&c, &v).unwrap(), "10".parse().unwrap());
        assert!(iterate_decide(&c, &v).unwrap());
        let q = circuit_to_tpn(&c, &v).unwrap();
        assert_eq!(q.net().places().len(), 5);
        assert_eq!(q.net().transitions().len(), 9);
        assert!(is_nonconsuming(q.net()));
        assert!(exists_cover(&q).unwrap().is_yes());
    }

    #[test]
    fn trivial_cases() {
        let all_and = Circuit::new(
            3,
            vec![
                Constraint {
                    op: Op::And,
                    j: 1,
                    k: 2,
                },
                Constraint {
                    op: Op::And,
                    j: 0,
                    k: 2,
                },
                Constraint {
                    op: Op::And,
                    j: 0,
                    k: 1,
                },
            ],
        )
        .unwrap();
        assert_eq!(
            eval_step(&all_and, &BitVec::zeros(3)).unwrap(),
            BitVec::zeros(3)
        );
        assert_eq!(
            eval_step(&all_and, &BitVec::ones(3)).unwrap(),
            BitVec::ones(3)
        );
        assert!(!iterate_decide(&all_and, &BitVec::zeros(3)).unwrap());
        assert!(iterate_decide(&all_and, &"100".parse().unwrap()).unwrap());
        let q = circuit_to_tpn(&all_and, &"100".parse().unwrap()).unwrap();
        assert!(exists_cover(&q).unwrap().is_yes());
        let q = circuit_to_tpn(&all_and, &BitVec::zeros(3)).unwrap();
        assert!(!exists_cover(&q).unwrap().is_yes());
    }

    #[test]
    fn length_mismatch() {
        assert!(eval_step(&example(), &BitVec::zeros(3)).is_err());
        assert!(iterate_decide(&example(), &BitVec::zeros(1)).is_err());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(Circuit::parse(""), Err(Error::Syntax { .. })));
        assert!(matches!(
            Circuit::parse("2\n0: 0 XOR 1\n1: 0 AND 1"),
            Err(Error::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            Circuit::parse("2\n0: 0 OR 1"),
            Err(Error::Semantic(_))
        ));
        assert!(matches!(
            Circuit::parse("1\n0: 0 OR 3"),
            Err(Error::Semantic(_))
        ));
        assert!(matches!(
            "01x".parse::<BitVec>(),
            Err(Error::Syntax { column: 3, .. })
        ));
    }

    #[test]
    fn display_round_trips() {
        let c = example();
        assert_eq!(Circuit::parse(&c.to_string()).unwrap(), c);
        assert_eq!(BitVec::all(2).count(), 4);
    }
}
