//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILING` are reported as they come out but do
//! not change the exit status; every other failure does.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use tempera_core::gen::{self, candidate_steps, random_triple, reachable_triples, rng, walk_chains, MAX_BLOCK};
use tempera_core::jacquet::{
    check_def_even, check_def_main, check_def_odd2, check_pr_def_t, cross_check_with, pi_delta_case,
    pi_delta_support_holds, Agreement, PiDeltaCase, Step, MAX_TERMS,
};
use tempera_core::jordan::{
    add_pair, deform_down, deform_up, delta_b_reduces, point_reduces, remove_pair, AdmissibleTriple, Reducibility,
};
use tempera_core::multiseg::{
    m_star, m_star_left, m_star_right, m_star_twisted, m_star_twisted_closed, tensor_times, twisted_segment_terms,
    Multisegment, Segment,
};
use tempera_core::symbols::{Catalog, HalfInt, Rho, Sign};
use tempera_core::tempered::{
    decompose, goldberg_length, param_to_triple, params_equivalent, triple_to_param, validate_tempered_triple, Delta,
};

const KNOWN_FAILING: &[u32] = &[7];

struct Outcome {
    ok: bool,
    detail: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { ok: true, detail: Vec::new() }
    }

    fn fail(&mut self, msg: String) {
        if self.detail.len() < 5 {
            self.detail.push(msg);
        }
        self.ok = false;
    }

    fn note(&mut self, msg: String) {
        self.detail.push(msg);
    }

    fn check(&mut self, cond: bool, msg: impl FnOnce() -> String) {
        if !cond {
            self.fail(msg());
        }
    }

    fn within(&mut self, t: Duration, budget: Duration) {
        self.note(format!("{:.2?} (budget {budget:?})", t));
        self.check(t < budget, || format!("over the {budget:?} budget"));
    }
}

fn half(twice: i64) -> HalfInt {
    HalfInt::from_twice(twice)
}

fn seg(rho: &Rho, lo: i64, hi: i64) -> Segment {
    Segment::new(rho.clone(), half(lo), half(hi)).expect("valid segment")
}

/// Multisets of `segs` (as indices, nondecreasing) of total length ≤ cap.
fn multisegments(segs: &[Segment], cap: usize) -> Vec<Multisegment> {
    fn go(segs: &[Segment], from: usize, left: usize, cur: &mut Vec<Segment>, out: &mut Vec<Multisegment>) {
        out.push(Multisegment::new(cur.clone()));
        for i in from..segs.len() {
            let n = segs[i].len();
            if n <= left {
                cur.push(segs[i].clone());
                go(segs, i, left - n, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(segs, 0, cap, &mut Vec::new(), &mut out);
    out
}

fn criterion_1(cat: &Catalog) -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let r1 = cat.rho("r1").unwrap();
    let u = cat.rho("u").unwrap();
    let mut segs = Vec::new();
    for (rho, lo) in [(&r1, 0), (&u, -1)] {
        for a in 0..3 {
            for b in a..3 {
                segs.push(seg(rho, lo + 2 * a, lo + 2 * b));
            }
        }
    }
    let all = multisegments(&segs, 6);
    for m in &all {
        o.check(m_star_left(m) == m_star_right(m), || format!("coassociativity fails on {m}"));
    }
    let mut pairs = 0;
    for x in &all {
        for y in &all {
            if x.degree() + y.degree() > 6 {
                continue;
            }
            pairs += 1;
            let xy = x.times(y);
            o.check(m_star(&xy) == tensor_times(&m_star(x), &m_star(y)), || format!("m* not multiplicative on {x}, {y}"));
        }
    }
    o.note(format!("{} multisegments, {pairs} products", all.len()));
    o.within(start.elapsed(), Duration::from_secs(10));
    o
}

fn criterion_2(cat: &Catalog) -> Outcome {
    let mut o = Outcome::new();
    let mut n_segs = 0;
    for id in ["r1", "r2", "u"] {
        let rho = cat.rho(id).unwrap();
        for lo in -5..=5 {
            for len in 0..5 {
                let s = seg(&rho, lo, lo + 2 * len);
                n_segs += 1;
                let m = Multisegment::single(s.clone());
                let pipeline = m_star_twisted(&m).unwrap();
                let closed = m_star_twisted_closed(&m).unwrap();
                o.check(pipeline == closed, || format!("pipeline and closed form differ on {s}"));
                let n = len as usize;
                let raw = twisted_segment_terms(&s).unwrap().len();
                o.check(raw == (n + 2) * (n + 3) / 2, || format!("{raw} uncollected terms for {s}"));
            }
        }
    }
    o.note(format!("{n_segs} segments"));
    o
}

fn criterion_3(cat: &Catalog) -> Outcome {
    let mut o = Outcome::new();
    let mut r = rng(3);
    let mut bases: Vec<AdmissibleTriple> = cat.cusps().map(AdmissibleTriple::cuspidal).collect();
    bases.extend((0..12).map(|_| random_triple(&mut r, cat)));
    let mut patterns = 0;
    for t in &bases {
        let red = gen::reducing_deltas(t, cat, 5);
        let irr = gen::irreducible_deltas(t, cat, 5);
        let pool: Vec<Delta> = red.iter().take(2).chain(irr.iter().take(2)).cloned().collect();
        let mut seqs: Vec<Vec<usize>> = vec![vec![]];
        for k in 1..=4 {
            let mut grown = Vec::new();
            for s in seqs.iter().filter(|s| s.len() == k - 1) {
                for i in 0..pool.len() {
                    let mut v = s.clone();
                    v.push(i);
                    grown.push(v);
                }
            }
            seqs.extend(grown);
        }
        for s in &seqs {
            patterns += 1;
            let ds: Vec<Delta> = s.iter().map(|&i| pool[i].clone()).collect();
            let l = ds.iter().filter(|d| delta_b_reduces(t, &d.rho, d.a)).collect::<BTreeSet<_>>().len();
            let parts = decompose(&ds, t);
            o.check(parts.len() == 1 << l, || format!("{} constituents for {ds:?} over {t}, want 2^{l}", parts.len()));
            o.check(goldberg_length(&ds, t) == 1 << l, || format!("goldberg_length off for {ds:?}"));
            for p in &parts {
                o.check(p.violations().is_empty(), || format!("invalid constituent {p}"));
            }
            if s.len() <= 3 {
                for (i, p) in parts.iter().enumerate() {
                    for q in &parts[i + 1..] {
                        o.check(!params_equivalent(p, q).unwrap(), || format!("{p} and {q} coincide"));
                    }
                }
            }
        }
    }
    o.note(format!("{patterns} patterns over {} base triples", bases.len()));
    o
}

fn criterion_4(triples: &[AdmissibleTriple], cat: &Catalog) -> Outcome {
    let mut o = Outcome::new();
    let mut cases = [0usize; 4];
    let mut n = 0;
    for t in triples {
        for rho in cat.selfdual_rhos() {
            for b in 1..=MAX_BLOCK {
                if !delta_b_reduces(t, &rho, b) {
                    continue;
                }
                n += 1;
                match pi_delta_case(t, &rho, b) {
                    Ok(c) => {
                        cases[match c {
                            PiDeltaCase::Case1 { .. } => 0,
                            PiDeltaCase::Case2a { .. } => 1,
                            PiDeltaCase::Case2bI { .. } => 2,
                            PiDeltaCase::Case2bII { .. } => 3,
                        }] += 1;
                        let holds = pi_delta_support_holds(&c, &rho, b).unwrap_or(false);
                        o.check(holds, || format!("support equation fails: {t}, d({rho},{b}), {c}"));
                    }
                    Err(e) => o.fail(format!("{t}, d({rho},{b}): {e}")),
                }
            }
        }
    }
    o.note(format!("{} triples, {n} instances, cases 1/2a/2bI/2bII = {cases:?}", triples.len()));
    o
}

fn criterion_5(cat: &Catalog) -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let mut r = rng(5);
    for (name, main) in [("def-main", true), ("def-even", false)] {
        for _ in 0..100 {
            let (c, rho, b) = gen::random_def_instance(&mut r, cat, main, gen::LEMMA);
            let rep = if main { check_def_main(&c, &rho, b, MAX_TERMS) } else { check_def_even(&c, &rho, b, MAX_TERMS) };
            match rep {
                Ok(rep) => o.check(rep.holds(), || format!("{name} on {c}, d({rho},{b}):\n{rep}")),
                Err(e) => o.fail(format!("{name} on {c}, d({rho},{b}): {e}")),
            }
        }
    }
    for _ in 0..100 {
        let (c, rho, b) = gen::random_def_odd2_instance(&mut r, cat, gen::LEMMA);
        match check_def_odd2(&c, &rho, b, MAX_TERMS) {
            Ok(rep) => o.check(rep.holds(), || format!("def-odd2 on {c}, d({rho},{b}):\n{rep}")),
            Err(e) => o.fail(format!("def-odd2 on {c}, d({rho},{b}): {e}")),
        }
    }
    for _ in 0..100 {
        let (c, ds) = gen::random_pr_def_t_instance(&mut r, cat, gen::LEMMA, 3);
        match check_pr_def_t(&c, &ds, MAX_TERMS) {
            Ok(rep) => o.check(rep.holds() && rep.expected == 2, || format!("pr-def-t on {c}, {ds:?}:\n{rep}")),
            Err(e) => o.fail(format!("pr-def-t on {c}, {ds:?}: {e}")),
        }
    }
    o.note(format!("100 instances per lemma, chains <= {} steps, blocks <= {}", gen::LEMMA.max_len, gen::LEMMA.max_block));
    o.within(start.elapsed(), Duration::from_secs(60));
    o
}

fn criterion_6(cat: &Catalog) -> Outcome {
    let mut o = Outcome::new();
    let mut r = rng(6);
    let rhos = cat.selfdual_rhos();
    let (mut downs, mut adds) = (0, 0);
    for _ in 0..1000 {
        let t = random_triple(&mut r, cat);
        for (rho, a) in t.jord.pairs().collect::<Vec<_>>() {
            for k in 1..=a / 2 {
                let Ok(d) = deform_down(&t, &rho, a, k) else { continue };
                downs += 1;
                let low = a - 2 * k;
                o.check(deform_up(&d, &rho, low, a).ok().as_ref() == Some(&t), || format!("up(down) != id on {t}"));
                o.check(d.cusp == t.cusp, || format!("cusp changed on {t}"));
                for (r2, b) in t.jord.pairs() {
                    if r2 != rho {
                        o.check(d.jord.contains(&r2, b), || format!("foreign block ({r2},{b}) lost on {t}"));
                    }
                }
                let moved = |b: i64| if b == a { low } else { b };
                for (r2, b) in t.jord.pairs() {
                    let b2 = if r2 == rho { moved(b) } else { b };
                    o.check(t.eps.singleton(&r2, b) == d.eps.singleton(&r2, b2), || {
                        format!("eps({r2},{b}) not transported by ({rho},{a}->{low}) on {t}")
                    });
                    for c in t.jord.of(&r2) {
                        let c2 = if r2 == rho { moved(c) } else { c };
                        o.check(t.eps.pair(&r2, b, c) == d.eps.pair(&r2, b2, c2), || {
                            format!("eps(({r2},{b}),({r2},{c})) not transported on {t}")
                        });
                    }
                }
            }
        }
        for s in candidate_steps(&t, &rhos, MAX_BLOCK) {
            let Step::AddPair { rho, a_minus, a, sign } = s else { continue };
            let u = add_pair(&t, &rho, a_minus, a, sign).unwrap();
            adds += 1;
            o.check(remove_pair(&u, &rho, a_minus, a).ok().as_ref() == Some(&t), || {
                format!("remove(add) != id for ({rho},{a_minus},{a}) on {t}")
            });
        }
    }
    o.note(format!("1000 triples, {downs} deformations, {adds} pair additions"));
    o
}

fn criterion_7(cat: &Catalog) -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let mut counts = [0usize; 3];
    let mut chains = 0;
    let mut examples: Vec<String> = Vec::new();
    let res = walk_chains(cat, 4, MAX_BLOCK, MAX_TERMS, |c, v| {
        chains += 1;
        for x in cross_check_with(c, v, MAX_TERMS)? {
            counts[x.agreement as usize] += 1;
            if x.agreement != Agreement::Agree && examples.len() < 3 {
                examples.push(format!("{c}: {} stored {} reported {} ({:?})", x.what, x.stored, x.reported, x.agreement));
            }
        }
        Ok(())
    });
    if let Err(e) = res {
        o.fail(format!("sweep aborted: {e}"));
    }
    o.note(format!(
        "{chains} chains: {} agree, {} soundness, {} imprecision ({:.2?})",
        counts[0],
        counts[1],
        counts[2],
        start.elapsed()
    ));
    for e in examples {
        o.note(e);
    }
    o.check(counts[1] == 0 && counts[2] == 0, || "criteria disagree with the replayed eps".into());
    o
}

fn criterion_8(cat: &Catalog) -> Outcome {
    let mut o = Outcome::new();
    let mut r = rng(8);
    for _ in 0..500 {
        let p = gen::random_tempered_param(&mut r, cat);
        let t = match param_to_triple(&p) {
            Ok(t) => t,
            Err(e) => {
                o.fail(format!("{p}: {e}"));
                continue;
            }
        };
        let v = validate_tempered_triple(&t);
        o.check(v.is_empty(), || format!("{t}: {v:?}"));
        match triple_to_param(&t) {
            Ok(q) => {
                o.check(params_equivalent(&p, &q).unwrap_or(false), || format!("{p} -> {t} -> {q}"));
                o.check(param_to_triple(&q).ok().as_ref() == Some(&t), || format!("{t} not fixed by the round trip"));
            }
            Err(e) => o.fail(format!("{t}: {e}")),
        }
    }
    o.note("500 parameters".into());
    o
}

fn with_pair(t: &AdmissibleTriple, rho: &Rho, lo: i64, hi: i64, s: Option<Sign>) -> AdmissibleTriple {
    add_pair(t, rho, lo, hi, s).expect("fixture")
}

fn criterion_9(cat: &Catalog, triples: &[AdmissibleTriple]) -> Outcome {
    use Reducibility::{Irreducible as I, Reduces as R};
    use Sign::{Minus, Plus};
    let mut o = Outcome::new();
    let r1 = cat.rho("r1").unwrap();
    let r2 = cat.rho("r2").unwrap();
    let u = cat.rho("u").unwrap();
    let base = |id: &str| AdmissibleTriple::cuspidal(&cat.cusp(id).unwrap());
    let s0 = base("s0");
    let s1 = base("s1");
    let s2 = base("s2");
    let s0_13 = with_pair(&s0, &r1, 1, 3, Some(Plus));
    let s0_24p = with_pair(&s0, &r2, 2, 4, Some(Plus));
    let s0_24m = with_pair(&s0, &r2, 2, 4, Some(Minus));
    let s2_46p = with_pair(&s2, &r2, 4, 6, Some(Plus));
    let s2_46m = with_pair(&s2, &r2, 4, 6, Some(Minus));
    let s2_57p = with_pair(&s2, &r1, 5, 7, Some(Plus));
    let s2_57m = with_pair(&s2, &r1, 5, 7, Some(Minus));
    let s1_35 = with_pair(&s1, &r1, 3, 5, Some(Plus));
    // (case, triple, ρ, 2α, expected)
    let fixtures: Vec<(&str, &AdmissibleTriple, &Rho, i64, Reducibility)> = vec![
        ("ii", &s0, &u, 2, I),
        ("ii", &s0_13, &u, 1, I),
        ("iii", &s0, &r1, 0, R),
        ("iii", &s0_13, &r1, 0, I),
        ("iii", &s1, &r1, 0, I),
        ("iii", &s0, &r2, 0, I),
        ("iv", &s0, &r1, 2, I),
        ("iv", &s0, &r2, 3, I),
        ("iv", &s0_13, &r1, 6, I),
        ("iv", &s2, &r2, 5, I),
        ("v", &s1, &r1, 2, R),
        ("v", &s0_13, &r1, 4, R),
        ("v", &s2, &r2, 3, R),
        ("v", &s1_35, &r1, 6, R),
        ("vi", &s2, &r1, 2, I),
        ("vi", &s2_57p, &r1, 6, R),
        ("vi", &s2_57p, &r1, 4, R),
        ("vi", &s2_57m, &r1, 4, I),
        ("vi", &s0_13, &r1, 2, R),
        ("vi", &s0_24p, &r2, 3, R),
        ("vi", &s2_46p, &r2, 3, I),
        ("vi", &s2_46p, &r2, 5, R),
        ("vi", &s2_46m, &r2, 3, R),
        ("vii", &s0, &r2, 1, R),
        ("vii", &s0_24p, &r2, 1, R),
        ("vii", &s0_24m, &r2, 1, I),
        ("vii", &s0, &r1, 1, I),
        ("vii", &s2, &r2, 1, I),
    ];
    let mut seen = BTreeSet::new();
    for (case, t, rho, twice, want) in &fixtures {
        seen.insert(*case);
        for sgn in [1, -1] {
            let got = point_reduces(t, rho, half(sgn * twice)).unwrap();
            o.check(got == *want, || format!("({case}) {t}, {rho}, alpha={}: {got:?}", half(sgn * twice)));
        }
    }
    o.check(seen.len() == 6, || format!("cases covered: {seen:?}"));
    let mut checked = 0;
    for t in triples {
        for rho in cat.rhos() {
            for twice in 0..=2 * MAX_BLOCK + 2 {
                checked += 1;
                let a = point_reduces(t, rho, half(twice)).unwrap();
                let b = point_reduces(t, rho, half(-twice)).unwrap();
                o.check(a == b, || format!("asymmetric at {t}, {rho}, {}", half(twice)));
            }
        }
    }
    o.note(format!("{} fixtures (cases ii-vii, each at +alpha and -alpha), symmetry on {checked} points", fixtures.len()));
    o
}

type Run<'a> = (u32, &'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() -> ExitCode {
    let cat = Catalog::sample();
    let triples = reachable_triples(&cat, MAX_BLOCK);
    println!("catalog: sample; {} square-integrable parameters with blocks <= {MAX_BLOCK}", triples.len());
    let runs: Vec<Run> = vec![
        (1, "Hopf axioms", Box::new(|| criterion_1(&cat))),
        (2, "M* pipeline vs closed form", Box::new(|| criterion_2(&cat))),
        (3, "Goldberg count", Box::new(|| criterion_3(&cat))),
        (4, "pi_delta dispatcher totality", Box::new(|| criterion_4(&triples, &cat))),
        (5, "lemma multiplicities", Box::new(|| criterion_5(&cat))),
        (6, "deformation calculus", Box::new(|| criterion_6(&cat))),
        (7, "eps criteria vs chain replay", Box::new(|| criterion_7(&cat))),
        (8, "tempered bijection", Box::new(|| criterion_8(&cat))),
        (9, "reducibility table", Box::new(|| criterion_9(&cat, &triples))),
    ];
    let mut unexpected = 0;
    for (n, name, run) in runs {
        let out = run();
        println!("criterion {n}: {} ({name})", if out.ok { "PASS" } else { "FAIL" });
        for d in &out.detail {
            println!("    {d}");
        }
        if !out.ok && !KNOWN_FAILING.contains(&n) {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
