//! Construction chains, the μ*-bound along a chain, the Jordan-block filter,
//! the π_δ case dispatcher, multiplicity checks for the reducibility lemmas
//! and the Jacquet-module ε criteria.
//!
//! The bound is an over-approximation of μ*(π) in the Grothendieck group:
//! every genuine Jacquet subquotient lies under some term, but terms of the
//! bound need not occur in μ*(π).

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{pre, Error, Result};
use crate::jordan::{add_pair, delta_b_reduces, deform_up, AdmissibleTriple};
use crate::multiseg::{
    mu_star_action_limited, supp, ClassicalTerm, Multisegment, RElement, RSElement, Segment, Support,
    DEFAULT_MAX_TERMS,
};
use crate::symbols::{Catalog, Cusp, HalfInt, Parity, Rho, Sign};
use crate::tempered::Delta;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Step {
    /// π ↪ δ([ν^{-(a_−-1)/2}ρ, ν^{(a-1)/2}ρ]) ⋊ π'.
    AddPair { rho: Rho, a_minus: i64, a: i64, sign: Option<Sign> },
    /// π ↪ δ([ν^{(a_low+1)/2}ρ, ν^{(a-1)/2}ρ]) ⋊ π'.
    DeformUp { rho: Rho, a_low: i64, a: i64 },
}

impl Step {
    pub fn rho(&self) -> &Rho {
        match self {
            Step::AddPair { rho, .. } | Step::DeformUp { rho, .. } => rho,
        }
    }

    /// The segment of the defining embedding.
    pub fn segment(&self) -> Result<Segment> {
        match self {
            Step::AddPair { rho, a_minus, a, .. } => {
                Segment::new(rho.clone(), -HalfInt::half_of_pred(*a_minus), HalfInt::half_of_pred(*a))
            }
            Step::DeformUp { rho, a_low, a } => {
                Segment::new(rho.clone(), HalfInt::half_of_pred(*a_low + 2), HalfInt::half_of_pred(*a))
            }
        }
    }

    pub fn apply(&self, t: &AdmissibleTriple) -> Result<AdmissibleTriple> {
        match self {
            Step::AddPair { rho, a_minus, a, sign } => add_pair(t, rho, *a_minus, *a, *sign),
            Step::DeformUp { rho, a_low, a } => deform_up(t, rho, *a_low, *a),
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::AddPair { rho, a_minus, a, sign: Some(s) } => write!(f, "add_pair({rho},{a_minus},{a},{s})"),
            Step::AddPair { rho, a_minus, a, sign: None } => write!(f, "add_pair({rho},{a_minus},{a})"),
            Step::DeformUp { rho, a_low, a } => write!(f, "deform_up({rho},{a_low},{a})"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConstructionChain {
    pub base: Cusp,
    pub steps: Vec<Step>,
}

impl ConstructionChain {
    pub fn new(base: Cusp) -> Self {
        ConstructionChain { base, steps: Vec::new() }
    }

    pub fn then(mut self, s: Step) -> Self {
        self.steps.push(s);
        self
    }

    pub fn truncated(&self, depth: usize) -> ConstructionChain {
        ConstructionChain { base: self.base.clone(), steps: self.steps[..depth].to_vec() }
    }

    /// The triples of all prefixes, starting with π_cusp.
    pub fn prefixes(&self) -> Result<Vec<AdmissibleTriple>> {
        let mut out = vec![AdmissibleTriple::cuspidal(&self.base)];
        for (index, s) in self.steps.iter().enumerate() {
            let next = s
                .apply(out.last().expect("nonempty"))
                .map_err(|e| Error::Step { index, source: Box::new(e) })?;
            out.push(next);
        }
        Ok(out)
    }

    /// Same steps with those on ρ moved to the front, if that still
    /// replays to the same triple.
    pub fn rho_first(&self, rho: &Rho) -> Option<ConstructionChain> {
        let (mut on, off): (Vec<Step>, Vec<Step>) = self.steps.iter().cloned().partition(|s| s.rho() == rho);
        on.extend(off);
        let c = ConstructionChain { base: self.base.clone(), steps: on };
        match (c.prefixes(), replay(self)) {
            (Ok(p), Ok(t)) if p.last() == Some(&t) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for ConstructionChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        for s in &self.steps {
            write!(f, " -> {s}")?;
        }
        Ok(())
    }
}

pub fn replay(chain: &ConstructionChain) -> Result<AdmissibleTriple> {
    Ok(chain.prefixes()?.pop().expect("nonempty"))
}

/// The partial cuspidal support of the chain's representation.
pub fn partial_cuspidal_support(chain: &ConstructionChain) -> Cusp {
    chain.base.clone()
}

/// M*(δ(step_d)) ⋊ … ⋊ M*(δ(step_1)) ⋊ (1 ⊗ π_cusp), without any pruning.
pub fn mu_star_bound(chain: &ConstructionChain, depth: usize, limit: usize) -> Result<RSElement> {
    if depth > chain.steps.len() {
        return pre(format!("depth {depth} exceeds chain length {}", chain.steps.len()));
    }
    chain.truncated(depth).prefixes()?;
    let mut b = RSElement::basis((Multisegment::one(), ClassicalTerm::Cusp(chain.base.clone())));
    for s in &chain.steps[..depth] {
        b = mu_star_action_limited(&RElement::basis(Multisegment::single(s.segment()?)), &b, limit)?;
    }
    Ok(b)
}

/// Whether a GL side can occur in a Jacquet module of t: some segment's
/// upper end ν^x ρ has ρ selfdual and (ρ, 2x+1) ∈ Jord(t).
fn gl_side_admissible(m: &Multisegment, t: &AdmissibleTriple) -> bool {
    m.is_one()
        || m.segments()
            .iter()
            .any(|s| s.rho.is_selfdual() && t.jord.contains(&s.rho, s.hi.block()))
}

/// Drops the terms whose GL side cannot occur in a Jacquet module of t.
pub fn jordan_filter(e: &RSElement, t: &AdmissibleTriple) -> RSElement {
    e.filter(|(m, _)| gl_side_admissible(m, t))
}

/// The filtered bound of one prefix: its terms, the classical symbol `top`
/// naming the representation itself, and its parameters.
#[derive(Clone, Debug)]
pub struct Bound {
    pub terms: RSElement,
    pub top: ClassicalTerm,
    pub triple: AdmissibleTriple,
}

/// The symbol standing for the representation after a step: a labeled
/// δ([νρ, ν^k ρ]_{τ_s}; σ) where the chain tracks one, else the triple.
fn next_top(prev: &ClassicalTerm, step: &Step, t: &AdmissibleTriple) -> ClassicalTerm {
    match (prev, step) {
        (ClassicalTerm::Cusp(c), Step::AddPair { rho, a_minus: 1, a, sign: Some(s) })
            if rho.symbol().parity == Parity::Odd && !c.has_blocks(rho) =>
        {
            ClassicalTerm::LabeledDelta { rho: rho.clone(), top: (a - 1) / 2, sign: *s, cusp: c.clone() }
        }
        (ClassicalTerm::LabeledDelta { rho: r, top, sign, cusp }, Step::DeformUp { rho, a_low, a })
            if r == rho && *a_low == 2 * top + 1 =>
        {
            ClassicalTerm::LabeledDelta { rho: rho.clone(), top: (a - 1) / 2, sign: *sign, cusp: cusp.clone() }
        }
        _ => ClassicalTerm::Discrete(Arc::new(t.clone())),
    }
}

/// Filtered bounds of every prefix. Each step applies M*(δ(step)) to the
/// previous bound, replaces the degree-zero term 1 ⊗ (δ(step) ⋊ π') by
/// 1 ⊗ π, and drops terms excluded by the Jordan blocks of π.
pub fn filtered_bounds(chain: &ConstructionChain, limit: usize) -> Result<Vec<Bound>> {
    let triples = chain.prefixes()?;
    let top0 = ClassicalTerm::Cusp(chain.base.clone());
    let mut out = vec![Bound {
        terms: RSElement::basis((Multisegment::one(), top0.clone())),
        top: top0,
        triple: triples[0].clone(),
    }];
    for (d, step) in chain.steps.iter().enumerate() {
        let prev = &out[d];
        let seg = Multisegment::single(step.segment()?);
        let mut e = mu_star_action_limited(&RElement::basis(seg.clone()), &prev.terms, limit)?;
        let old = (Multisegment::one(), prev.top.induce(&seg));
        let c = e.coeff(&old);
        if c != 1 {
            return Err(Error::Internal(format!("degree-zero term {} has coefficient {c}", old.1)));
        }
        e.add_term(old, -1);
        let t = &triples[d + 1];
        let top = next_top(&prev.top, step, t);
        e.add_term((Multisegment::one(), top.clone()), 1);
        out.push(Bound { terms: jordan_filter(&e, t), top, triple: t.clone() });
    }
    Ok(out)
}

pub fn filtered_bound(chain: &ConstructionChain, limit: usize) -> Result<Bound> {
    Ok(filtered_bounds(chain, limit)?.pop().expect("nonempty"))
}

/// The stored coefficient of a term.
pub fn multiplicity(term: &(Multisegment, ClassicalTerm), e: &RSElement) -> i64 {
    e.coeff(term)
}

/// Terms whose GL side has the given cuspidal support.
pub fn terms_with_support(e: &RSElement, target: &Support) -> Vec<((Multisegment, ClassicalTerm), i64)> {
    e.iter().filter(|((m, _), _)| &supp(m) == target).map(|(k, c)| (k.clone(), c)).collect()
}

fn supp_sum(parts: &[&Multisegment]) -> Support {
    let mut out = Support::new();
    for m in parts {
        for (k, v) in supp(m) {
            *out.entry(k).or_insert(0) += v;
        }
    }
    out
}

fn range(rho: &Rho, lo: HalfInt, hi: HalfInt) -> Result<Multisegment> {
    Multisegment::range(rho, lo, hi)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PiDeltaCase {
    Case1 { a: i64, witness_seg: Segment },
    Case2a { witness_seg: Segment },
    Case2bI { a: i64, seg_b: Option<Segment>, seg_a: Segment },
    Case2bII { tau_label: Sign },
}

impl fmt::Display for PiDeltaCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PiDeltaCase::Case1 { a, witness_seg } => write!(f, "case1 a={a} witness={witness_seg}"),
            PiDeltaCase::Case2a { witness_seg } => write!(f, "case2a witness={witness_seg}"),
            PiDeltaCase::Case2bI { a, seg_b: Some(sb), seg_a } => write!(f, "case2bI a={a} seg_b={sb} seg_a={seg_a}"),
            PiDeltaCase::Case2bI { a, seg_b: None, seg_a } => write!(f, "case2bI a={a} seg_b=1 seg_a={seg_a}"),
            PiDeltaCase::Case2bII { tau_label } => write!(f, "case2bII tau{tau_label}"),
        }
    }
}

fn first_seg(m: Multisegment) -> Option<Segment> {
    m.segments().first().cloned()
}

/// Which of the four constructions defines π_δ for δ = δ(ρ,b).
pub fn pi_delta_case(t: &AdmissibleTriple, rho: &Rho, b: i64) -> Result<PiDeltaCase> {
    if !delta_b_reduces(t, rho, b) {
        return pre(format!("d({rho},{b}) x| pi does not reduce"));
    }
    let top = HalfInt::half_of_pred(b);
    if let Some(&a) = t.jord.in_range(rho, 1, b).last() {
        let seg = Segment::new(rho.clone(), HalfInt::half_of_pred(a + 2), top)?;
        return Ok(PiDeltaCase::Case1 { a, witness_seg: seg });
    }
    if b % 2 == 0 {
        return Ok(PiDeltaCase::Case2a { witness_seg: Segment::new(rho.clone(), HalfInt::HALF, top)? });
    }
    if let Some(a) = t.jord.min_block(rho) {
        let seg_a = Segment::new(rho.clone(), HalfInt::ONE, HalfInt::half_of_pred(a))?;
        return Ok(PiDeltaCase::Case2bI { a, seg_b: first_seg(range(rho, HalfInt::ONE, top)?), seg_a });
    }
    if t.cusp.has_blocks(rho) {
        return Err(Error::Internal(format!("Jord_{rho}(pi) empty but Jord_{rho}(pi_cusp) is not")));
    }
    Ok(PiDeltaCase::Case2bII { tau_label: Sign::Plus })
}

/// The support identity behind the case: supp δ(ρ,b) splits as the
/// witness, its contragredient and the remaining central piece.
pub fn pi_delta_support_holds(case: &PiDeltaCase, rho: &Rho, b: i64) -> Result<bool> {
    let full = supp(&Multisegment::single(Segment::delta(rho.clone(), b)?));
    let one = |s: &Segment| Multisegment::single(s.clone());
    let dual = |s: &Segment| -> Result<Multisegment> { Ok(Multisegment::single(s.dual()?)) };
    let centre = Multisegment::single(Segment::point(rho.clone(), HalfInt::ZERO));
    let top = HalfInt::half_of_pred(b);
    Ok(match case {
        PiDeltaCase::Case1 { a, witness_seg } => {
            let d = Multisegment::single(Segment::delta(rho.clone(), *a)?);
            witness_seg.lo == HalfInt::half_of_pred(a + 2)
                && witness_seg.hi == top
                && supp_sum(&[&one(witness_seg), &dual(witness_seg)?, &d]) == full
        }
        PiDeltaCase::Case2a { witness_seg } => {
            witness_seg.lo == HalfInt::HALF
                && witness_seg.hi == top
                && supp_sum(&[&one(witness_seg), &dual(witness_seg)?]) == full
        }
        PiDeltaCase::Case2bI { a, seg_b, seg_a } => {
            let (sb, sbd) = match seg_b {
                Some(s) => (one(s), dual(s)?),
                None => (Multisegment::one(), Multisegment::one()),
            };
            let full_a = supp(&Multisegment::single(Segment::delta(rho.clone(), *a)?));
            supp_sum(&[&sb, &sbd, &centre]) == full
                && supp_sum(&[&one(seg_a), &dual(seg_a)?, &centre]) == full_a
        }
        PiDeltaCase::Case2bII { .. } => {
            let w = range(rho, HalfInt::ONE, top)?;
            supp_sum(&[&w, &crate::multiseg::check_dual(&w)?, &centre]) == full
        }
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma {
    DefMain,
    DefEven,
    DefOdd2,
    PrDefT,
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lemma::DefMain => "def-main",
            Lemma::DefEven => "def-even",
            Lemma::DefOdd2 => "def-odd2",
            Lemma::PrDefT => "pr-def-t",
        })
    }
}

/// Outcome of a multiplicity check on one instance.
#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub lemma: Lemma,
    pub key: (Multisegment, ClassicalTerm),
    pub multiplicity: i64,
    pub expected: i64,
    /// Terms with the prescribed GL support (empty for pr-def-t).
    pub support_matches: Vec<((Multisegment, ClassicalTerm), i64)>,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        let unique = match self.lemma {
            Lemma::PrDefT => true,
            _ => self.support_matches.len() == 1 && self.support_matches[0].0 == self.key,
        };
        unique && self.multiplicity == self.expected
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {} (x) {}", self.lemma, self.key.0, self.key.1)?;
        writeln!(f, "  multiplicity {} (expected {})", self.multiplicity, self.expected)?;
        if self.lemma != Lemma::PrDefT {
            writeln!(f, "  terms with the prescribed support: {}", self.support_matches.len())?;
            for ((m, s), c) in &self.support_matches {
                writeln!(f, "    {c} {m} (x) {s}")?;
            }
        }
        write!(f, "  {}", if self.holds() { "holds" } else { "FAILS" })
    }
}

fn lemma_expansion(bound: &Bound, rho: &Rho, b: i64, limit: usize) -> Result<RSElement> {
    let x = RElement::basis(Multisegment::single(Segment::delta(rho.clone(), b)?));
    mu_star_action_limited(&x, &bound.terms, limit)
}

fn support_report(
    lemma: Lemma,
    e: &RSElement,
    key: (Multisegment, ClassicalTerm),
    support: Support,
) -> LemmaReport {
    LemmaReport {
        lemma,
        multiplicity: multiplicity(&key, e),
        key,
        expected: 1,
        support_matches: terms_with_support(e, &support),
    }
}

/// δ(seg)² ⊗ δ(ρ,a) ⋊ π in μ*(δ(ρ,b) ⋊ π), seg = [ν^{(a+1)/2}ρ, ν^{(b-1)/2}ρ].
pub fn check_def_main(chain: &ConstructionChain, rho: &Rho, b: i64, limit: usize) -> Result<LemmaReport> {
    let bound = filtered_bound(chain, limit)?;
    let t = &bound.triple;
    if !delta_b_reduces(t, rho, b) {
        return pre(format!("d({rho},{b}) x| pi does not reduce"));
    }
    let Some(&a) = t.jord.in_range(rho, 1, b).last() else {
        return pre(format!("Jord_{rho} meets no block in [1,{b}]"));
    };
    let seg = range(rho, HalfInt::half_of_pred(a + 2), HalfInt::half_of_pred(b))?;
    let theta = seg.times(&seg);
    let key = (theta.clone(), bound.top.induce(&Multisegment::single(Segment::delta(rho.clone(), a)?)));
    let e = lemma_expansion(&bound, rho, b, limit)?;
    Ok(support_report(Lemma::DefMain, &e, key, supp(&theta)))
}

/// δ([ν^{1/2}ρ, ν^{(b-1)/2}ρ])² ⊗ π in μ*(δ(ρ,b) ⋊ π), b even.
pub fn check_def_even(chain: &ConstructionChain, rho: &Rho, b: i64, limit: usize) -> Result<LemmaReport> {
    let bound = filtered_bound(chain, limit)?;
    let t = &bound.triple;
    if !delta_b_reduces(t, rho, b) {
        return pre(format!("d({rho},{b}) x| pi does not reduce"));
    }
    if b % 2 != 0 {
        return pre(format!("b = {b} must be even"));
    }
    if !t.jord.in_range(rho, 1, b).is_empty() {
        return pre(format!("Jord_{rho} meets [1,{b}]"));
    }
    let seg = range(rho, HalfInt::HALF, HalfInt::half_of_pred(b))?;
    let theta = seg.times(&seg);
    let key = (theta.clone(), bound.top.clone());
    let e = lemma_expansion(&bound, rho, b, limit)?;
    Ok(support_report(Lemma::DefEven, &e, key, supp(&theta)))
}

/// δ([νρ, ν^{(a-1)/2}ρ]) × δ([νρ, ν^{(b-1)/2}ρ])² ⊗ ρ ⋊ π' in
/// μ*(δ(ρ,b) ⋊ π), b odd, a = min Jord_ρ(π) > b, π' = π^{(ρ, a↓1)}.
/// The chain must reach π from π' by its last step DeformUp(ρ,1,a).
pub fn check_def_odd2(chain: &ConstructionChain, rho: &Rho, b: i64, limit: usize) -> Result<LemmaReport> {
    let bounds = filtered_bounds(chain, limit)?;
    let bound = bounds.last().expect("nonempty");
    let t = &bound.triple;
    if !delta_b_reduces(t, rho, b) {
        return pre(format!("d({rho},{b}) x| pi does not reduce"));
    }
    if b % 2 == 0 {
        return pre(format!("b = {b} must be odd"));
    }
    if !t.jord.in_range(rho, 1, b).is_empty() {
        return pre(format!("Jord_{rho} meets [1,{b}]"));
    }
    let Some(a) = t.jord.min_block(rho) else { return pre(format!("Jord_{rho} is empty")) };
    match chain.steps.last() {
        Some(Step::DeformUp { rho: r, a_low: 1, a: top }) if r == rho && *top == a => {}
        _ => return pre(format!("chain must end with deform_up({rho},1,{a})")),
    }
    let prev_top = &bounds[bounds.len() - 2].top;
    let sa = range(rho, HalfInt::ONE, HalfInt::half_of_pred(a))?;
    let sb = range(rho, HalfInt::ONE, HalfInt::half_of_pred(b))?;
    let theta = sa.times(&sb).times(&sb);
    let key = (theta.clone(), prev_top.induce(&Multisegment::single(Segment::point(rho.clone(), HalfInt::ZERO))));
    let e = lemma_expansion(bound, rho, b, limit)?;
    Ok(support_report(Lemma::DefOdd2, &e, key, supp(&theta)))
}

/// δ_1 ⊗ (δ_2 × … × δ_n ⋊ π) in μ*(δ_1 × … × δ_n ⋊ π), with δ_1 of
/// largest length among distinct reducing δ's.
pub fn check_pr_def_t(chain: &ConstructionChain, deltas: &[Delta], limit: usize) -> Result<LemmaReport> {
    if deltas.is_empty() {
        return pre("at least one delta required");
    }
    let bound = filtered_bound(chain, limit)?;
    let t = &bound.triple;
    let mut seen = BTreeSet::new();
    for d in deltas {
        if !seen.insert(d) {
            return pre(format!("{d} listed twice"));
        }
        if !delta_b_reduces(t, &d.rho, d.a) {
            return pre(format!("{d} x| pi does not reduce"));
        }
    }
    let first = deltas.iter().enumerate().max_by_key(|(i, d)| (d.a, std::cmp::Reverse(*i))).expect("nonempty").0;
    let rest = Multisegment::new(
        deltas.iter().enumerate().filter(|(i, _)| *i != first).map(|(_, d)| d.segment()).collect(),
    );
    let d1 = Multisegment::single(deltas[first].segment());
    let all = d1.times(&rest);
    let e = mu_star_action_limited(&RElement::basis(all), &bound.terms, limit)?;
    let key = (d1, bound.top.induce(&rest));
    Ok(LemmaReport { lemma: Lemma::PrDefT, multiplicity: multiplicity(&key, &e), key, expected: 2, support_matches: Vec::new() })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Criterion {
    Plus,
    MinusOrAbsent,
}

/// What the ε-criteria can see of one bound term: the cuspidal support of
/// the GL side while it can still grow into a criterion target, the upper
/// ends of its segments (all the Jordan filter reads), and the classical
/// side when it is a bare symbol rather than an induced one.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ViewKey {
    pub supp: Option<Support>,
    pub ends: BTreeSet<(Rho, HalfInt)>,
    pub tag: Option<ClassicalTerm>,
}

/// A target support: one selfdual ρ at positive exponents, each once.
/// Supports only grow along a chain, so anything else is never a target.
fn may_grow_into_target(s: &Support) -> bool {
    let mut rhos = s.keys().map(|(r, _)| r);
    let first = rhos.next();
    rhos.all(|r| Some(r) == first) && s.iter().all(|((r, x), &n)| r.is_selfdual() && *x > HalfInt::ZERO && n == 1)
}

fn ends_of(m: &Multisegment) -> BTreeSet<(Rho, HalfInt)> {
    m.segments().iter().map(|s| (s.rho.clone(), s.hi)).collect()
}

fn ends_admissible(ends: &BTreeSet<(Rho, HalfInt)>, t: &AdmissibleTriple) -> bool {
    ends.is_empty() || ends.iter().any(|(r, x)| r.is_selfdual() && t.jord.contains(r, x.block()))
}

fn view_key(m: &Multisegment, s: &ClassicalTerm) -> Option<ViewKey> {
    let sp = supp(m);
    let supp = may_grow_into_target(&sp).then_some(sp);
    let tag = (!matches!(s, ClassicalTerm::Induced(..))).then(|| s.clone());
    (supp.is_some() || tag.is_some()).then(|| ViewKey { supp, ends: ends_of(m), tag })
}

/// The filtered bound of a chain as seen by the ε-criteria. All
/// coefficients of a filtered bound are positive, so every presence
/// question the criteria ask has the same answer here as on the bound.
#[derive(Clone, Debug)]
pub struct CriterionView {
    pub keys: BTreeSet<ViewKey>,
    pub top: ClassicalTerm,
    pub triple: AdmissibleTriple,
}

impl Bound {
    pub fn view(&self) -> BTreeSet<ViewKey> {
        self.terms.keys().filter_map(|(m, s)| view_key(m, s)).collect()
    }
}

/// Support, upper ends and bareness of one left factor of M* of a segment.
type Piece = (Support, BTreeSet<(Rho, HalfInt)>, bool);

impl CriterionView {
    pub fn cuspidal(base: &Cusp) -> CriterionView {
        let top = ClassicalTerm::Cusp(base.clone());
        let key = view_key(&Multisegment::one(), &top).expect("bare");
        CriterionView { keys: [key].into_iter().collect(), top, triple: AdmissibleTriple::cuspidal(base) }
    }

    /// The view after one more step; `t` is the triple the step produces.
    pub fn step(&self, step: &Step, t: &AdmissibleTriple, limit: usize) -> Result<CriterionView> {
        let seg = Multisegment::single(step.segment()?);
        let pieces: BTreeSet<Piece> =
            crate::multiseg::m_star_twisted_closed(&seg)?
                .keys()
                .map(|(a, b)| (supp(a), ends_of(a), b.is_one()))
                .collect();
        let mut keys = BTreeSet::new();
        for (sa, ea, bare) in &pieces {
            for k in &self.keys {
                let tag = if *bare { k.tag.clone() } else { None };
                let supp = k.supp.as_ref().and_then(|sc| {
                    let mut s = sc.clone();
                    for (x, n) in sa {
                        *s.entry(x.clone()).or_insert(0) += n;
                    }
                    may_grow_into_target(&s).then_some(s)
                });
                if supp.is_none() && tag.is_none() {
                    continue;
                }
                let ends: BTreeSet<_> = ea.union(&k.ends).cloned().collect();
                if !ends_admissible(&ends, t) {
                    continue;
                }
                keys.insert(ViewKey { supp, ends, tag });
                if keys.len() > limit {
                    return Err(Error::TooManyTerms { count: keys.len(), limit });
                }
            }
        }
        // The degree-zero term is 1 ⊗ (δ(step) ⋊ π'), which has an empty
        // support and an induced classical side; it is replaced by 1 ⊗ π.
        let top = next_top(&self.top, step, t);
        keys.remove(&ViewKey { supp: Some(Support::new()), ends: BTreeSet::new(), tag: None });
        keys.insert(view_key(&Multisegment::one(), &top).expect("bare"));
        Ok(CriterionView { keys, top, triple: t.clone() })
    }

    fn has_support(&self, target: &Multisegment) -> bool {
        let want = supp(target);
        self.keys.iter().any(|k| k.supp.as_ref() == Some(&want))
    }
}

pub fn criterion_view(chain: &ConstructionChain, limit: usize) -> Result<CriterionView> {
    let triples = chain.prefixes()?;
    let mut v = CriterionView::cuspidal(&chain.base);
    for (d, step) in chain.steps.iter().enumerate() {
        v = v.step(step, &triples[d + 1], limit)?;
    }
    Ok(v)
}

/// Plus iff the bound has a term whose GL side has the support of
/// δ([ν^{(a_−+1)/2}ρ, ν^{(a-1)/2}ρ]).
pub fn eps_criterion_pair_in(bound: &CriterionView, rho: &Rho, a_minus: i64, a: i64) -> Result<Criterion> {
    let t = &bound.triple;
    if !t.jord.contains(rho, a) || t.jord.below(rho, a) != Some(a_minus) {
        return pre(format!("({rho},{a_minus}),({rho},{a}) are not adjacent Jordan blocks"));
    }
    let seg = range(rho, HalfInt::half_of_pred(a_minus + 2), HalfInt::half_of_pred(a))?;
    Ok(if bound.has_support(&seg) { Criterion::Plus } else { Criterion::MinusOrAbsent })
}

pub fn eps_criterion_pair(chain: &ConstructionChain, rho: &Rho, a_minus: i64, a: i64, limit: usize) -> Result<Criterion> {
    eps_criterion_pair_in(&criterion_view(chain, limit)?, rho, a_minus, a)
}

/// Plus iff the bound has a term whose GL side has the support of
/// δ([ν^{1/2}ρ, ν^{(a-1)/2}ρ]), a = min Jord_ρ(π) even.
pub fn eps_criterion_min_even_in(bound: &CriterionView, rho: &Rho) -> Result<Criterion> {
    if rho.parity()? != Parity::Even {
        return pre(format!("`{rho}` must have even parity"));
    }
    let Some(a) = bound.triple.jord.min_block(rho) else { return pre(format!("Jord_{rho} is empty")) };
    let seg = range(rho, HalfInt::HALF, HalfInt::half_of_pred(a))?;
    Ok(if bound.has_support(&seg) { Criterion::Plus } else { Criterion::MinusOrAbsent })
}

pub fn eps_criterion_min_even(chain: &ConstructionChain, rho: &Rho, limit: usize) -> Result<Criterion> {
    eps_criterion_min_even_in(&criterion_view(chain, limit)?, rho)
}

/// Labels i of the bare terms θ ⊗ δ([νρ, ν^k ρ]_{τ_i}; π_cusp) in a bound.
pub fn labels_in(bound: &CriterionView, rho: &Rho, k: i64) -> BTreeSet<Sign> {
    bound
        .keys
        .iter()
        .filter_map(|v| match &v.tag {
            Some(ClassicalTerm::LabeledDelta { rho: r, top, sign, .. }) if r == rho && *top == k => Some(*sign),
            _ => None,
        })
        .collect()
}

/// The label i of the terms θ ⊗ δ([νρ, ν^{(a-1)/2}ρ]_{τ_i}; π_cusp) in
/// the bound, a = max Jord_ρ(π). The bound is taken along the chain with
/// its ρ-steps first when that reordering is valid.
pub fn eps_criterion_max_odd(chain: &ConstructionChain, rho: &Rho, limit: usize) -> Result<Sign> {
    eps_criterion_max_odd_with(chain, None, rho, limit)
}

/// [`eps_criterion_max_odd`] reusing the chain's own shape bound when the
/// reordering leaves the chain unchanged.
pub fn eps_criterion_max_odd_with(
    chain: &ConstructionChain,
    own: Option<&CriterionView>,
    rho: &Rho,
    limit: usize,
) -> Result<Sign> {
    if rho.parity()? != Parity::Odd {
        return pre(format!("`{rho}` must have odd parity"));
    }
    if chain.base.has_blocks(rho) {
        return pre(format!("Jord_{rho}(pi_cusp) must be empty"));
    }
    let t = match own {
        Some(b) => b.triple.clone(),
        None => replay(chain)?,
    };
    let Some(a) = t.jord.max_block(rho) else { return pre(format!("Jord_{rho} is empty")) };
    let reordered = chain.rho_first(rho).unwrap_or_else(|| chain.clone());
    let computed;
    let bound = match own {
        Some(b) if &reordered == chain => b,
        _ => {
            computed = criterion_view(&reordered, limit)?;
            &computed
        }
    };
    let k = (a - 1) / 2;
    let labels = labels_in(bound, rho, k);
    match labels.len() {
        1 => Ok(*labels.iter().next().expect("one")),
        0 => Err(Error::Undetermined(format!("no labeled term d({rho};1..{k})_tau in the bound"))),
        _ => Err(Error::Undetermined(format!("both labels of d({rho};1..{k})_tau occur"))),
    }
}

/// How a criterion relates to the ε stored by the chain replay.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Agreement {
    Agree,
    /// The stored ε is +1 (or the label disagrees) but the bound misses the
    /// required term: the bound itself would be wrong.
    Soundness,
    /// The stored ε is −1 but the bound still holds a candidate term, or
    /// no label could be read off: the bound is too coarse to decide.
    Imprecision,
}

#[derive(Clone, Debug)]
pub struct CrossCheck {
    pub what: String,
    pub stored: Sign,
    pub reported: String,
    pub agreement: Agreement,
}

fn classify(stored: Sign, c: Criterion) -> Agreement {
    match (stored, c) {
        (Sign::Plus, Criterion::Plus) | (Sign::Minus, Criterion::MinusOrAbsent) => Agreement::Agree,
        (Sign::Plus, Criterion::MinusOrAbsent) => Agreement::Soundness,
        (Sign::Minus, Criterion::Plus) => Agreement::Imprecision,
    }
}

/// Runs every applicable criterion on the chain's representation and
/// compares it with the replayed ε.
pub fn cross_check(chain: &ConstructionChain, limit: usize) -> Result<Vec<CrossCheck>> {
    cross_check_with(chain, &criterion_view(chain, limit)?, limit)
}

/// [`cross_check`] with the chain's shape bound already computed.
pub fn cross_check_with(chain: &ConstructionChain, bound: &CriterionView, limit: usize) -> Result<Vec<CrossCheck>> {
    let t = bound.triple.clone();
    let mut out = Vec::new();
    for (rho, set) in t.jord.iter() {
        let blocks: Vec<i64> = set.iter().copied().collect();
        for w in blocks.windows(2) {
            let stored = t.eps.pair(rho, w[0], w[1]).ok_or_else(|| Error::EpsilonUndefined(format!("({rho},{})", w[1])))?;
            let c = eps_criterion_pair_in(bound, rho, w[0], w[1])?;
            out.push(CrossCheck {
                what: format!("pair({rho},{},{})", w[0], w[1]),
                stored,
                reported: format!("{c:?}"),
                agreement: classify(stored, c),
            });
        }
        let parity = rho.parity()?;
        if parity == Parity::Even {
            let a = blocks[0];
            let stored = t.eps.singleton(rho, a).ok_or_else(|| Error::EpsilonUndefined(format!("({rho},{a})")))?;
            let c = eps_criterion_min_even_in(bound, rho)?;
            out.push(CrossCheck {
                what: format!("min_even({rho})"),
                stored,
                reported: format!("{c:?}"),
                agreement: classify(stored, c),
            });
        } else if !chain.base.has_blocks(rho) {
            let a = *blocks.last().expect("nonempty");
            let stored = t.eps.singleton(rho, a).ok_or_else(|| Error::EpsilonUndefined(format!("({rho},{a})")))?;
            let (reported, agreement) = match eps_criterion_max_odd_with(chain, Some(bound), rho, limit) {
                Ok(i) if i == stored => (i.to_string(), Agreement::Agree),
                Ok(i) => (i.to_string(), Agreement::Soundness),
                Err(Error::Undetermined(m)) => (format!("undetermined: {m}"), Agreement::Imprecision),
                Err(e) => return Err(e),
            };
            out.push(CrossCheck { what: format!("max_odd({rho})"), stored, reported, agreement });
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum StepWire {
    AddPair {
        rho: String,
        a_minus: i64,
        a: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sign: Option<i64>,
    },
    DeformUp { rho: String, a_low: i64, a: i64 },
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ChainWire {
    pub base: String,
    #[serde(default)]
    pub steps: Vec<StepWire>,
}

impl ConstructionChain {
    pub fn to_wire(&self) -> ChainWire {
        ChainWire {
            base: self.base.id().to_string(),
            steps: self
                .steps
                .iter()
                .map(|s| match s {
                    Step::AddPair { rho, a_minus, a, sign } => StepWire::AddPair {
                        rho: rho.id().to_string(),
                        a_minus: *a_minus,
                        a: *a,
                        sign: sign.map(Sign::to_i64),
                    },
                    Step::DeformUp { rho, a_low, a } => {
                        StepWire::DeformUp { rho: rho.id().to_string(), a_low: *a_low, a: *a }
                    }
                })
                .collect(),
        }
    }

    /// Resolves ids and checks that every prefix replays.
    pub fn from_wire(w: &ChainWire, cat: &Catalog) -> Result<ConstructionChain> {
        let mut steps = Vec::new();
        for s in &w.steps {
            steps.push(match s {
                StepWire::AddPair { rho, a_minus, a, sign } => Step::AddPair {
                    rho: cat.rho(rho)?,
                    a_minus: *a_minus,
                    a: *a,
                    sign: sign.map(Sign::from_i64).transpose()?,
                },
                StepWire::DeformUp { rho, a_low, a } => Step::DeformUp { rho: cat.rho(rho)?, a_low: *a_low, a: *a },
            });
        }
        let c = ConstructionChain { base: cat.cusp(&w.base)?, steps };
        c.prefixes()?;
        Ok(c)
    }

    pub fn from_json(s: &str, cat: &Catalog) -> Result<ConstructionChain> {
        let w: ChainWire = serde_json::from_str(s).map_err(|e| Error::Parse(format!("chain: {e}")))?;
        ConstructionChain::from_wire(&w, cat)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_wire()).expect("chain serializes")
    }
}

/// Default term guard for the bound computations.
pub const MAX_TERMS: usize = DEFAULT_MAX_TERMS;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiseg::render_rs;

    fn setup() -> (Catalog, Rho, Rho) {
        let c = Catalog::sample();
        let r1 = c.rho("r1").unwrap();
        let r2 = c.rho("r2").unwrap();
        (c, r1, r2)
    }

    fn add(rho: &Rho, a_minus: i64, a: i64, s: i64) -> Step {
        Step::AddPair { rho: rho.clone(), a_minus, a, sign: Some(Sign::from_i64(s).unwrap()) }
    }

    #[test]
    fn replay_examples() {
        let (c, r1, _) = setup();
        let base = c.cusp("s0").unwrap();
        let empty = ConstructionChain::new(base.clone());
        assert!(replay(&empty).unwrap().jord.is_empty());
        let ch = empty.then(add(&r1, 1, 3, 1));
        assert_eq!(replay(&ch).unwrap().jord.of(&r1), vec![1, 3]);
        let ch = ch.then(Step::DeformUp { rho: r1.clone(), a_low: 3, a: 7 });
        let t = replay(&ch).unwrap();
        assert_eq!(t.jord.of(&r1), vec![1, 7]);
        assert_eq!(t.eps.singleton(&r1, 7), Some(Sign::Plus));
        let bad = ConstructionChain::new(base).then(add(&r1, 1, 3, 1)).then(add(&r1, 3, 5, 1));
        assert!(matches!(replay(&bad), Err(Error::Step { index: 1, .. })));
    }

    #[test]
    fn cuspidal_bound_is_trivial() {
        let (c, _, _) = setup();
        let ch = ConstructionChain::new(c.cusp("s1").unwrap());
        let b = mu_star_bound(&ch, 0, MAX_TERMS).unwrap();
        assert_eq!(render_rs(&b), "1 1 (x) s1\n");
    }

    #[test]
    fn filter_examples() {
        let (c, r1, _) = setup();
        let t = replay(&ConstructionChain::new(c.cusp("s0").unwrap()).then(add(&r1, 1, 3, 1))).unwrap();
        let sigma = ClassicalTerm::Cusp(c.cusp("s0").unwrap());
        let e: RSElement = [
            (Multisegment::single(Segment::point(r1.clone(), HalfInt::int(2))), sigma.clone()),
            (Multisegment::one(), sigma.clone()),
            (Multisegment::single(Segment::new(r1.clone(), HalfInt::int(1), HalfInt::int(2)).unwrap()), sigma.clone()),
            (Multisegment::single(Segment::point(r1.clone(), HalfInt::int(1))), sigma.clone()),
        ]
        .into_iter()
        .map(|k| (k, 1))
        .collect();
        let f = jordan_filter(&e, &t);
        assert_eq!(f.len(), 2);
        let mut t5 = t.clone();
        t5.jord.insert(&r1, 5);
        assert_eq!(jordan_filter(&e, &t5).len(), 4);
    }

    #[test]
    fn dispatcher_examples() {
        let (c, r1, r2) = setup();
        let s0 = c.cusp("s0").unwrap();
        let t = replay(&ConstructionChain::new(s0.clone()).then(add(&r1, 1, 3, 1))).unwrap();
        match pi_delta_case(&t, &r1, 5).unwrap() {
            PiDeltaCase::Case1 { a: 3, witness_seg } => {
                assert_eq!((witness_seg.lo, witness_seg.hi), (HalfInt::int(2), HalfInt::int(2)))
            }
            other => panic!("{other:?}"),
        }
        let t = replay(&ConstructionChain::new(s0.clone()).then(add(&r2, 4, 6, 1))).unwrap();
        let case = pi_delta_case(&t, &r2, 2).unwrap();
        assert!(matches!(&case, PiDeltaCase::Case2a { witness_seg } if witness_seg.lo == HalfInt::HALF && witness_seg.hi == HalfInt::HALF));
        assert!(pi_delta_support_holds(&case, &r2, 2).unwrap());
        let t = AdmissibleTriple::cuspidal(&s0);
        assert_eq!(pi_delta_case(&t, &r1, 1).unwrap(), PiDeltaCase::Case2bII { tau_label: Sign::Plus });
        assert!(pi_delta_case(&t, &r2, 3).is_err());
    }

    #[test]
    fn def_main_instance() {
        let (c, r1, _) = setup();
        let ch = ConstructionChain::new(c.cusp("s0").unwrap()).then(add(&r1, 1, 3, 1));
        let r = check_def_main(&ch, &r1, 5, MAX_TERMS).unwrap();
        assert!(r.holds(), "{r}");
    }

    #[test]
    fn criteria_on_simple_chains() {
        let (c, r1, r2) = setup();
        let s0 = c.cusp("s0").unwrap();
        let ch = ConstructionChain::new(s0.clone()).then(add(&r1, 1, 3, 1));
        assert_eq!(eps_criterion_pair(&ch, &r1, 1, 3, MAX_TERMS).unwrap(), Criterion::Plus);
        assert!(eps_criterion_pair(&ch, &r1, 1, 5, MAX_TERMS).is_err());
        assert_eq!(eps_criterion_max_odd(&ch, &r1, MAX_TERMS).unwrap(), Sign::Plus);
        let ch = ConstructionChain::new(s0.clone()).then(add(&r1, 1, 3, -1));
        assert_eq!(eps_criterion_max_odd(&ch, &r1, MAX_TERMS).unwrap(), Sign::Minus);
        let ch = ConstructionChain::new(s0.clone()).then(add(&r2, 2, 4, 1));
        assert_eq!(eps_criterion_min_even(&ch, &r2, MAX_TERMS).unwrap(), Criterion::Plus);
        assert!(eps_criterion_min_even(&ch, &r1, MAX_TERMS).is_err());
        let ch = ConstructionChain::new(c.cusp("s1").unwrap()).then(Step::DeformUp { rho: r1.clone(), a_low: 1, a: 3 });
        assert!(eps_criterion_max_odd(&ch, &r1, MAX_TERMS).is_err());
    }

    #[test]
    fn chain_wire_roundtrip() {
        let (c, r1, _) = setup();
        let ch = ConstructionChain::new(c.cusp("s2").unwrap())
            .then(add(&r1, 5, 7, -1))
            .then(Step::DeformUp { rho: r1.clone(), a_low: 7, a: 9 });
        let back = ConstructionChain::from_json(&ch.to_json().to_string(), &c).unwrap();
        assert_eq!(back, ch);
    }
}
