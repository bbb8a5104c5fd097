//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use tpncover::accelerate::accelerate;
use tpncover::circuit::{circuit_to_tpn, iterate_decide, BitVec};
use tpncover::coverset::{compute_coverset, exists_cover, exists_cover_streaming, CoverQuery};
use tpncover::fixtures;
use tpncover::model::{cmax, elapse, Age, Marking, PlaceId, TransitionId};
use tpncover::oracle::{concrete_bfs, replay_word_trace, word_bfs, Outcome, Trace};
use tpncover::random::{self, NetShape};
use tpncover::regions::{
    abstract_marking, marking_in_denotation, normalize_word, prepend_empty, shortest_abstraction,
    word_covered_by_expr, Alphabet, FractionSet, SimpleExpr, Symbol, Word,
};
use tpncover::saturation::Saturator;

struct Report {
    id: u32,
    name: &'static str,
    failures: Vec<String>,
    detail: String,
    elapsed: Duration,
    limit: Duration,
}

impl Report {
    fn passed(&self) -> bool {
        self.failures.is_empty() && self.elapsed <= self.limit
    }
}

fn run(
    id: u32,
    name: &'static str,
    limit: Duration,
    body: impl FnOnce(&mut Vec<String>) -> String,
) -> Report {
    let start = Instant::now();
    let mut failures = Vec::new();
    let detail = body(&mut failures);
    Report {
        id,
        name,
        failures,
        detail,
        elapsed: start.elapsed(),
        limit,
    }
}

fn random_query(rng: &mut random::Rng64, shape: &NetShape) -> CoverQuery {
    let net = random::nonconsuming_net(rng, shape);
    let t = TransitionId(rng.gen_range(0..net.transitions().len()));
    CoverQuery::new(net, PlaceId(0), t).expect("generated nets are non-consuming")
}

fn abstraction_example(fails: &mut Vec<String>) -> String {
    let a = Alphabet::new(vec!["p".into(), "q".into()], 5);
    let age = |n, d| Age::new(n, d);
    let m = Marking::from_tokens([
        (PlaceId(0), age(21, 10)),
        (PlaceId(1), age(22, 10)),
        (PlaceId(0), age(51, 10)),
        (PlaceId(1), age(51, 10)),
    ]);
    let start = Instant::now();
    let w = shortest_abstraction(&m, &a);
    let took = start.elapsed();
    let got = a.render_word(&w);
    if got != "{} {p:2,p:5,q:5} {q:2}" {
        fails.push(format!("got {got}"));
    }
    if took > Duration::from_millis(1) {
        fails.push(format!("took {took:?}"));
    }
    format!("{got} in {took:?}")
}

fn saturation_laws(fails: &mut Vec<String>) -> String {
    let mut rng = random::rng(2);
    let shape = NetShape::default();
    let (mut triples, mut exprs, mut perms) = (0, 0, 0);
    while triples < 1000 {
        let net = random::nonconsuming_net(&mut rng, &shape);
        let sat = Saturator::for_net(&net).unwrap();
        let a = sat.alphabet().clone();
        for _ in 0..20 {
            let t = TransitionId(rng.gen_range(0..net.transitions().len()));
            let alpha = random::symbol(&mut rng, &a, 0.3);
            let betas: Vec<Symbol> = (0..rng.gen_range(0..3))
                .map(|_| random::symbol(&mut rng, &a, 0.3))
                .collect();
            let x = random::symbol(&mut rng, &a, 0.3);
            let alpha2 = random::superset(&mut rng, &a, &alpha, 0.2);
            let betas2: Vec<Symbol> = betas
                .iter()
                .map(|b| random::superset(&mut rng, &a, b, 0.2))
                .collect();
            let x2 = random::superset(&mut rng, &a, &x, 0.2);
            for (kind, step) in [
                (
                    "f",
                    Saturator::f_step
                        as fn(&Saturator, &Symbol, &[Symbol], &Symbol, TransitionId) -> Symbol,
                ),
                ("g", Saturator::g_step),
            ] {
                let base = step(&sat, &alpha, &betas, &x, t);
                if !x.is_subset(&base) {
                    fails.push(format!("{kind} not extensive"));
                }
                for (arg, grown) in [
                    ("alpha", step(&sat, &alpha2, &betas, &x, t)),
                    ("beta", step(&sat, &alpha, &betas2, &x, t)),
                    ("x", step(&sat, &alpha, &betas, &x2, t)),
                ] {
                    if !base.is_subset(&grown) {
                        fails.push(format!("{kind} not monotone in {arg}"));
                    }
                }
            }
            triples += 1;
        }
        for _ in 0..10 {
            let e = random::expr(&mut rng, &a, 5);
            let once = sat.saturate_expr(&e).unwrap();
            if sat.saturate_expr(&once).unwrap() != once {
                fails.push(format!("SAT not idempotent on {}", a.render_expr(&e)));
            }
            exprs += 1;
            let w = random::word(&mut rng, &a, 4);
            let rest = w.symbols()[1..].to_vec();
            let reference = sat.fg_closure(w.front().clone(), rest.clone());
            let mut order: Vec<TransitionId> = net.transition_ids().collect();
            for _ in 0..10 {
                order.shuffle(&mut rng);
                if sat.fg_closure_ordered(w.front().clone(), rest.clone(), &order) != reference {
                    fails.push("fg_closure depends on transition order".into());
                }
                perms += 1;
            }
        }
    }
    if exprs < 200 {
        fails.push(format!("only {exprs} expressions sampled"));
    }
    format!("{triples} triples, {exprs} expressions, {perms} permutations")
}

fn accelerate_and_coverset(fails3: &mut Vec<String>, fails4: &mut Vec<String>) -> (String, String) {
    let mut rng = random::rng(3);
    let shape = NetShape::default();
    let (mut calls, mut worst, mut runs, mut longest) = (0, 0usize, 0, 0usize);
    for _ in 0..500 {
        let q = random_query(&mut rng, &shape);
        let sat = q.saturator();
        let places = q.net().places().len();
        let bound = 4 * places * (cmax(q.net()) as usize + 1);
        let mut seed = q.initial_expr(sat.alphabet());
        let mut seen = vec![seed.clone()];
        loop {
            let res = match accelerate(&sat, &seed) {
                Ok(r) => r,
                Err(e) => {
                    fails3.push(e.to_string());
                    break;
                }
            };
            calls += 1;
            worst = worst.max(res.iterations);
            if res.iterations > bound {
                fails3.push(format!("{} iterations, bound {bound}", res.iterations));
            }
            let h = &res.history;
            let extends = |a: &SimpleExpr, b: &SimpleExpr| {
                a.symbols()
                    .zip(b.symbols().skip(1))
                    .all(|(x, y)| x.is_subset(y))
            };
            if !extends(&h[0], &h[1]) || !extends(&h[1], &h[2]) {
                fails3.push("S1 ⊆ S2 ⊆ S3 shifted inclusion failed".into());
            }
            if !h[1].atoms()[0].symbol.is_subset(&h[2].atoms()[0].symbol) {
                fails3.push("front of S3 does not contain front of S2".into());
            }
            if h[2..].windows(2).any(|w| !w[0].pointwise_subset(&w[1])) {
                fails3.push("S_i not pointwise increasing".into());
            }
            if seen.contains(&res.r) {
                break;
            }
            seen.push(res.r.clone());
            seed = res.r;
        }
        match compute_coverset(&q) {
            Ok(cs) => {
                runs += 1;
                longest = longest.max(cs.expressions.len());
                let cap = q.pair_bound() * 3u32;
                if num_bigint::BigUint::from(cs.expressions.len()) > cap {
                    fails4.push(format!(
                        "{} expressions exceed 3·B(2)",
                        cs.expressions.len()
                    ));
                }
                if cs.expressions.iter().any(|e| e.len() != 2 && e.len() != 4) {
                    fails4.push("expression of length other than 2 or 4".into());
                }
            }
            Err(e) => fails4.push(e.to_string()),
        }
    }
    (
        format!("500 nets, {calls} accelerate calls, max i = {worst}"),
        format!("{runs} runs, longest cover set {longest} expressions"),
    )
}

fn circuits(fails: &mut Vec<String>) -> String {
    let mut rng = random::rng(5);
    let mut checked = 0;
    let mut yes = 0;
    let mut check = |c: &tpncover::circuit::Circuit, v: &BitVec, fails: &mut Vec<String>| {
        let want = iterate_decide(c, v).unwrap();
        let q = circuit_to_tpn(c, v).unwrap();
        let got = exists_cover(&q).unwrap().is_yes();
        if got != want {
            fails.push(format!(
                "circuit\n{c}vector {v}: cover {got}, iteration {want}"
            ));
        }
        checked += 1;
        yes += usize::from(want);
    };
    for n in 1..=3 {
        for _ in 0..50 {
            let c = random::circuit(&mut rng, n);
            for v in BitVec::all(n) {
                check(&c, &v, fails);
            }
        }
    }
    for _ in 0..200 {
        let n = rng.gen_range(4..=6);
        let c = random::circuit(&mut rng, n);
        let v = random::bitvec(&mut rng, n);
        check(&c, &v, fails);
    }
    format!("{checked} instances, {yes} positive")
}

fn oracles(fails: &mut Vec<String>) -> String {
    let mut rng = random::rng(6);
    let shape = NetShape::default();
    let (mut found, mut exhausted, mut unknown, mut concrete_found) = (0, 0, 0, 0);
    for i in 0..300 {
        let q = random_query(&mut rng, &shape);
        let cover = exists_cover(&q).unwrap().is_yes();
        let w = word_bfs(&q, 25, 3000);
        match &w.outcome {
            Outcome::Found(_) => {
                found += 1;
                if !cover {
                    fails.push(format!("net {i}: word search found, cover set says no"));
                }
            }
            Outcome::ExhaustedNo => {
                exhausted += 1;
                if cover {
                    fails.push(format!(
                        "net {i}: word search exhausted, cover set says yes"
                    ));
                }
            }
            Outcome::DepthBoundedUnknown => unknown += 1,
        }
        let m = (i % 6 + 1) as u32;
        let c = concrete_bfs(q.net(), q.initial(), q.target(), m, 8, 4, 2000);
        if c.is_found() {
            concrete_found += 1;
            if !cover {
                fails.push(format!(
                    "net {i}: concrete run found with m={m}, cover set says no"
                ));
            }
        }
    }
    format!(
        "300 nets: word found {found}, exhausted {exhausted}, unknown {unknown}; concrete found {concrete_found}"
    )
}

/// Marking whose abstraction with fractions `fracs` is exactly `w`, where
/// class `cmax+1` of the front symbol is realised as `top_front[p]`.
fn realise(w: &Word, fracs: &[Age], a: &Alphabet, top_front: impl Fn(PlaceId) -> u64) -> Marking {
    let mut m = Marking::new();
    for (i, s) in w.symbols().iter().enumerate() {
        for (p, n) in a.pairs(s) {
            let int = if i == 0 && n == a.cmax() + 1 {
                top_front(p)
            } else {
                u64::from(n)
            };
            m.add(p, Age::from_integer(int) + fracs[i], 1);
        }
    }
    m
}

fn time_steps(fails: &mut Vec<String>) -> String {
    let mut rng = random::rng(7);
    let (mut forward, mut backward, mut prepends) = (0, 0, 0);
    for _ in 0..200 {
        let places = rng.gen_range(1..=3);
        let c = rng.gen_range(0..=3u32);
        let a = Alphabet::new((0..places).map(|i| format!("p{i}")).collect(), c);
        let denom = rng.gen_range(1..=8u64);
        let m = random::marking(&mut rng, places, 6, u64::from(c) + 2, denom);
        let w = shortest_abstraction(&m, &a);
        let e = SimpleExpr::from_word(&w);
        let max = *FractionSet::of_marking(&m).values().last().unwrap();

        // Elapsing to the next integer boundary of the largest class.
        let d = Age::from_integer(1) - max;
        let after = normalize_word(&shortest_abstraction(&elapse(&m, d), &a));
        let rotated = e.rotate(&a).unwrap();
        if !word_covered_by_expr(&after, &rotated) {
            fails.push(format!(
                "rotation: {} elapsed by {d} gives {}, not in {}",
                a.render_word(&w),
                a.render_word(&after),
                a.render_expr(&rotated)
            ));
        }
        forward += 1;

        // Every realisation of the rotated word comes from a realisation of w.
        let rot_word = Word::new(rotated.symbols().cloned().collect()).unwrap();
        let k = rot_word.len() as u64;
        let mut fracs = vec![Age::from_integer(0)];
        fracs.extend((1..k).map(|i| Age::new(i, k)));
        let last = w.symbols().last().unwrap().clone();
        let top = |p: PlaceId| {
            if last.contains_bit(a.bit(p, c + 1)) {
                u64::from(c) + 2
            } else {
                u64::from(c) + 1
            }
        };
        let n_full = realise(&rot_word, &fracs, &a, top);
        let shift = if k == 1 {
            Age::from_integer(1)
        } else {
            fracs[1]
        };
        let back = Marking::from_tokens(
            n_full
                .iter()
                .flat_map(|(p, age, cnt)| std::iter::repeat_n((p, age - shift), cnt as usize)),
        );
        let mut s: Vec<Age> = fracs[1..].iter().map(|f| f - shift).collect();
        s.push(Age::from_integer(1) - shift);
        if k == 1 {
            s = vec![Age::from_integer(0)];
        }
        let ok = FractionSet::new(s.clone())
            .ok()
            .and_then(|fs| (fs.len() == w.len()).then_some(fs))
            .and_then(|fs| abstract_marking(&back, &fs, &a).ok())
            .is_some_and(|ab| word_covered_by_expr(&ab, &e))
            && elapse(&back, shift) == n_full;
        let sub = Marking::from_tokens(
            n_full
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .map(|(p, age, _)| (p, *age)),
        );
        let sub_ok = marking_in_denotation(&sub, &rotated, &a);
        if !ok || !sub_ok {
            fails.push(format!(
                "rotation converse: {} has no preimage in {}",
                a.render_word(&rot_word),
                a.render_word(&w)
            ));
        }
        backward += 1;

        // Small delays only prepend an empty class.
        let gap = Age::from_integer(1) - max;
        for j in 1..=3u64 {
            let d = gap * Age::new(j, 4);
            let moved = shortest_abstraction(&elapse(&m, d), &a);
            if !word_covered_by_expr(&moved, &prepend_empty(&e)) {
                fails.push(format!(
                    "prepend: {} elapsed by {d} gives {}",
                    a.render_word(&w),
                    a.render_word(&moved)
                ));
            }
            prepends += 1;
        }
    }
    format!("{forward} rotations, {backward} converse checks, {prepends} small delays")
}

fn streaming(fails: &mut Vec<String>) -> String {
    let mut rng = random::rng(8);
    let shape = NetShape {
        max_places: 1,
        max_cmax: 0,
        ..NetShape::default()
    };
    let mut yes = 0;
    for i in 0..100 {
        let q = random_query(&mut rng, &shape);
        let cap = q.pair_bound() * 3u32;
        if cap != num_bigint::BigUint::from(192u32) {
            fails.push(format!("net {i}: cap {cap}"));
        }
        let full = exists_cover(&q).unwrap().is_yes();
        match exists_cover_streaming(&q, 192, false) {
            Ok(s) if s == full => yes += usize::from(s),
            Ok(s) => fails.push(format!("net {i}: streaming {s}, full {full}")),
            Err(e) => fails.push(format!("net {i}: {e}")),
        }
    }
    format!("100 nets, {yes} positive")
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/n_tick.coverset")
}

fn render_coverset(q: &CoverQuery) -> String {
    let cs = compute_coverset(q).unwrap();
    let a = q.saturator().alphabet().clone();
    let mut out: String = cs
        .expressions
        .iter()
        .map(|e| format!("{}\n", a.render_expr(e)))
        .collect();
    out.push_str(&format!("rounds: {}\n", cs.rounds));
    out
}

fn tick_regression(fails: &mut Vec<String>) -> String {
    let q = CoverQuery::by_name(fixtures::n_tick(), "p", "t_goal").unwrap();
    if !exists_cover(&q).unwrap().is_yes() {
        fails.push("t_goal not covered".into());
    }
    let v = word_bfs(&q, 10, 1000);
    match &v.outcome {
        Outcome::Found(Trace::Words(steps)) => {
            if steps.len() != 4 {
                fails.push(format!("trace has {} steps", steps.len()));
            }
            match replay_word_trace(&q, steps) {
                Ok(w) if w == steps.last().unwrap().1 => {}
                Ok(_) => fails.push("replay ends elsewhere".into()),
                Err(e) => fails.push(format!("replay failed: {e}")),
            }
        }
        other => fails.push(format!("word search: {other:?}")),
    }
    let first = render_coverset(&q);
    let second = render_coverset(&q);
    if first != second {
        fails.push("cover set output differs between runs".into());
    }
    match fs::read_to_string(golden_path()) {
        Ok(golden) if golden == first => {}
        Ok(_) => fails.push("cover set output differs from the golden file".into()),
        Err(e) => fails.push(format!("golden file: {e}")),
    }
    format!("{} cover set lines", first.lines().count())
}

fn main() {
    let mut reports = Vec::new();
    reports.push(run(
        1,
        "abstraction worked example",
        Duration::from_millis(50),
        abstraction_example,
    ));
    reports.push(run(
        2,
        "saturation laws",
        Duration::from_secs(30),
        saturation_laws,
    ));

    let start = Instant::now();
    let (mut f3, mut f4) = (Vec::new(), Vec::new());
    let (d3, d4) = accelerate_and_coverset(&mut f3, &mut f4);
    let elapsed = start.elapsed();
    reports.push(Report {
        id: 3,
        name: "accelerate bound",
        failures: f3,
        detail: d3,
        elapsed,
        limit: Duration::from_secs(60),
    });
    reports.push(Report {
        id: 4,
        name: "cover set bound",
        failures: f4,
        detail: d4,
        elapsed,
        limit: Duration::from_secs(60),
    });

    reports.push(run(
        5,
        "circuit end-to-end",
        Duration::from_secs(300),
        circuits,
    ));
    reports.push(run(
        6,
        "oracle soundness",
        Duration::from_secs(300),
        oracles,
    ));
    reports.push(run(
        7,
        "rotation and delay correspondence",
        Duration::from_secs(30),
        time_steps,
    ));
    reports.push(run(
        8,
        "streaming agreement",
        Duration::from_secs(60),
        streaming,
    ));
    reports.push(run(
        9,
        "N_tick regression",
        Duration::from_secs(1),
        tick_regression,
    ));

    let mut all = true;
    for r in &reports {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        all &= r.passed();
        println!(
            "criterion {} [{status}] {}: {} ({:.2?})",
            r.id, r.name, r.detail, r.elapsed
        );
        if r.elapsed > r.limit {
            println!("    over time limit {:?}", r.limit);
        }
        for f in r.failures.iter().take(5) {
            println!("    {f}");
        }
        if r.failures.len() > 5 {
            println!("    ... {} more", r.failures.len() - 5);
        }
    }
    if !all {
        std::process::exit(1);
    }
}
