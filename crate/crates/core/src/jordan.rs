//! Jordan blocks, partially defined sign functions ε, reducibility
//! predicates, and the operations that move between square-integrable
//! parameters: Jordan transfer, adding and removing a pair of blocks, and
//! deforming one block across an empty gap.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{pre, Error, Result};
use crate::multiseg::Segment;
use crate::symbols::{j1_satisfied, Catalog, Cusp, HalfInt, Parity, Rho, Sign};

/// Jord(π): for each selfdual ρ a nonempty set of positive integers.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct JordanBlocks {
    blocks: BTreeMap<Rho, BTreeSet<i64>>,
}

impl JordanBlocks {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, rho: &Rho) -> Option<&BTreeSet<i64>> {
        self.blocks.get(rho)
    }

    pub fn of(&self, rho: &Rho) -> Vec<i64> {
        self.blocks.get(rho).map(|s| s.iter().copied().collect()).unwrap_or_default()
    }

    pub fn contains(&self, rho: &Rho, a: i64) -> bool {
        self.blocks.get(rho).is_some_and(|s| s.contains(&a))
    }

    pub fn is_empty_at(&self, rho: &Rho) -> bool {
        self.blocks.get(rho).is_none_or(|s| s.is_empty())
    }

    /// Inserts a block; false if it was already present.
    pub fn insert(&mut self, rho: &Rho, a: i64) -> bool {
        self.blocks.entry(rho.clone()).or_default().insert(a)
    }

    pub fn remove(&mut self, rho: &Rho, a: i64) -> bool {
        let Some(s) = self.blocks.get_mut(rho) else { return false };
        let hit = s.remove(&a);
        if s.is_empty() {
            self.blocks.remove(rho);
        }
        hit
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Rho, &BTreeSet<i64>)> {
        self.blocks.iter()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Rho, i64)> + '_ {
        self.blocks.iter().flat_map(|(r, s)| s.iter().map(move |&a| (r.clone(), a)))
    }

    pub fn len(&self) -> usize {
        self.blocks.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn min_block(&self, rho: &Rho) -> Option<i64> {
        self.blocks.get(rho).and_then(|s| s.iter().next().copied())
    }

    pub fn max_block(&self, rho: &Rho) -> Option<i64> {
        self.blocks.get(rho).and_then(|s| s.iter().next_back().copied())
    }

    /// a_−: the largest block of ρ below a.
    pub fn below(&self, rho: &Rho, a: i64) -> Option<i64> {
        self.blocks.get(rho).and_then(|s| s.range(..a).next_back().copied())
    }

    pub fn above(&self, rho: &Rho, a: i64) -> Option<i64> {
        self.blocks.get(rho).and_then(|s| s.range(a + 1..).next().copied())
    }

    /// Blocks of ρ in the closed interval [lo, hi].
    pub fn in_range(&self, rho: &Rho, lo: i64, hi: i64) -> Vec<i64> {
        if lo > hi {
            return Vec::new();
        }
        self.blocks.get(rho).map(|s| s.range(lo..=hi).copied().collect()).unwrap_or_default()
    }

    fn from_cusp(c: &Cusp) -> JordanBlocks {
        let mut j = JordanBlocks::new();
        for (r, s) in c.blocks() {
            for &a in s {
                j.insert(r, a);
            }
        }
        j
    }
}

/// Whether ε is defined on the single block (ρ,a): a even, or a odd and
/// Jord_ρ(π_cusp) empty.
pub fn singleton_defined(cusp: &Cusp, rho: &Rho, a: i64) -> bool {
    a % 2 == 0 || !cusp.has_blocks(rho)
}

/// ε_π: values on single blocks plus explicitly stored pairwise values.
/// In normal form, ρ with singletons defined carry singletons only; other
/// ρ carry one pair (a, max Jord_ρ) per non-maximal block, the sign of a
/// relative to the maximal block.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct EpsilonMap {
    singleton: BTreeMap<(Rho, i64), Sign>,
    pairs: BTreeMap<(Rho, i64, i64), Sign>,
}

impl EpsilonMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_singleton(&mut self, rho: &Rho, a: i64, s: Sign) {
        self.singleton.insert((rho.clone(), a), s);
    }

    /// Stores ε((ρ,a),(ρ,b)) = ε(a)ε(b)^{-1}; the order of a and b is irrelevant.
    pub fn set_pair(&mut self, rho: &Rho, a: i64, b: i64, s: Sign) {
        let (x, y) = if a < b { (a, b) } else { (b, a) };
        self.pairs.insert((rho.clone(), x, y), s);
    }

    pub fn singleton(&self, rho: &Rho, a: i64) -> Option<Sign> {
        self.singleton.get(&(rho.clone(), a)).copied()
    }

    pub fn singletons(&self) -> impl Iterator<Item = (&(Rho, i64), &Sign)> {
        self.singleton.iter()
    }

    pub fn stored_pairs(&self) -> impl Iterator<Item = (&(Rho, i64, i64), &Sign)> {
        self.pairs.iter()
    }

    /// Sign potentials on the blocks of ρ reachable from `start`, with the
    /// absolute node encoded as 0. Returns None on an incoherent cycle.
    fn potentials(&self, rho: &Rho, start: i64) -> Option<BTreeMap<i64, Sign>> {
        let mut adj: BTreeMap<i64, Vec<(i64, Sign)>> = BTreeMap::new();
        for ((r, a), s) in &self.singleton {
            if r == rho {
                adj.entry(*a).or_default().push((0, *s));
                adj.entry(0).or_default().push((*a, *s));
            }
        }
        for ((r, a, b), s) in &self.pairs {
            if r == rho {
                adj.entry(*a).or_default().push((*b, *s));
                adj.entry(*b).or_default().push((*a, *s));
            }
        }
        let mut pot = BTreeMap::new();
        pot.insert(start, Sign::Plus);
        let mut q = VecDeque::from([start]);
        while let Some(v) = q.pop_front() {
            let pv = pot[&v];
            for &(w, s) in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
                let want = pv * s;
                match pot.get(&w) {
                    Some(&p) if p != want => return None,
                    Some(_) => {}
                    None => {
                        pot.insert(w, want);
                        q.push_back(w);
                    }
                }
            }
        }
        Some(pot)
    }

    /// ε((ρ,a),(ρ,b)) = ε(a)ε(b)^{-1}, derived from singletons and stored pairs.
    pub fn pair(&self, rho: &Rho, a: i64, b: i64) -> Option<Sign> {
        if a == b {
            return None;
        }
        if let (Some(x), Some(y)) = (self.singleton(rho, a), self.singleton(rho, b)) {
            return Some(x * y);
        }
        let pot = self.potentials(rho, a)?;
        pot.get(&b).map(|&p| Sign::Plus * p)
    }

    fn rename(&self, rho: &Rho, from: i64, to: i64) -> EpsilonMap {
        let mv = |r: &Rho, x: i64| if r == rho && x == from { to } else { x };
        let mut out = EpsilonMap::new();
        for ((r, a), s) in &self.singleton {
            out.set_singleton(r, mv(r, *a), *s);
        }
        for ((r, a, b), s) in &self.pairs {
            out.set_pair(r, mv(r, *a), mv(r, *b), *s);
        }
        out
    }

    fn without_rho(&self, rho: &Rho) -> EpsilonMap {
        EpsilonMap {
            singleton: self.singleton.iter().filter(|((r, _), _)| r != rho).map(|(k, v)| (k.clone(), *v)).collect(),
            pairs: self.pairs.iter().filter(|((r, _, _), _)| r != rho).map(|(k, v)| (k.clone(), *v)).collect(),
        }
    }
}

/// (Jord, π_cusp, ε): the parameters of a square-integrable representation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct AdmissibleTriple {
    pub cusp: Cusp,
    pub jord: JordanBlocks,
    pub eps: EpsilonMap,
}

impl AdmissibleTriple {
    /// The parameters of π_cusp itself. Its blocks have no gaps to close, so
    /// every adjacent quotient is −1 and an even minimum carries −1.
    pub fn cuspidal(cusp: &Cusp) -> AdmissibleTriple {
        let jord = JordanBlocks::from_cusp(cusp);
        let mut eps = EpsilonMap::new();
        for (rho, set) in cusp.blocks() {
            let v: Vec<i64> = set.iter().copied().collect();
            let m = v.len();
            if rho.symbol().parity == Parity::Even {
                for (i, &a) in v.iter().enumerate() {
                    eps.set_singleton(rho, a, if i % 2 == 0 { Sign::Minus } else { Sign::Plus });
                }
            } else {
                let top = v[m - 1];
                for (i, &a) in v.iter().enumerate().take(m - 1) {
                    let s = if (m - 1 - i).is_multiple_of(2) { Sign::Plus } else { Sign::Minus };
                    eps.set_pair(rho, a, top, s);
                }
            }
        }
        AdmissibleTriple { cusp: cusp.clone(), jord, eps }
    }

    /// Number of cuspidal points above π_cusp.
    pub fn degree(&self) -> usize {
        let total: i64 = self.jord.pairs().map(|(_, a)| a).sum();
        let base: i64 = self.cusp.blocks().flat_map(|(_, s)| s.iter()).sum();
        ((total - base) / 2) as usize
    }

    pub fn singletons_defined_for(&self, rho: &Rho) -> bool {
        rho.symbol().parity == Parity::Even || !self.cusp.has_blocks(rho)
    }

    /// Rewrites ε into normal form. Assumes the triple is coherent.
    pub fn normalized(&self) -> AdmissibleTriple {
        let mut eps = EpsilonMap::new();
        for (rho, set) in self.jord.iter() {
            if self.singletons_defined_for(rho) {
                for &a in set {
                    if let Some(s) = self.eps.singleton(rho, a) {
                        eps.set_singleton(rho, a, s);
                    }
                }
            } else {
                let top = *set.iter().next_back().expect("nonempty");
                for &a in set.range(..top) {
                    if let Some(s) = self.eps.pair(rho, a, top) {
                        eps.set_pair(rho, a, top, s);
                    }
                }
            }
        }
        AdmissibleTriple { cusp: self.cusp.clone(), jord: self.jord.clone(), eps }
    }

    fn checked(self) -> Result<AdmissibleTriple> {
        let v = validate_triple(&self);
        if v.is_empty() {
            Ok(self.normalized())
        } else {
            Err(Error::InvalidTriple(v))
        }
    }
}

impl fmt::Display for AdmissibleTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L2[{}", self.cusp)?;
        for (rho, set) in self.jord.iter() {
            write!(f, "; {rho}:")?;
            let top = *set.iter().next_back().expect("nonempty");
            for (k, &a) in set.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                match self.eps.singleton(rho, a) {
                    Some(s) => write!(f, "{a}{s}")?,
                    None if a == top => write!(f, "{a}/+")?,
                    None => match self.eps.pair(rho, a, top) {
                        Some(s) => write!(f, "{a}/{s}")?,
                        None => write!(f, "{a}")?,
                    },
                }
            }
        }
        f.write_str("]")
    }
}

/// Violations of parity, ε-domain and ε-coherence rules; empty iff valid.
pub fn validate_triple(t: &AdmissibleTriple) -> Vec<String> {
    let mut out = t.cusp.data().violations();
    for (rho, set) in t.jord.iter() {
        if !rho.is_selfdual() {
            out.push(format!("block on non-selfdual `{rho}`"));
            continue;
        }
        for &a in set {
            if a < 1 || !j1_satisfied(rho, a).unwrap_or(false) {
                out.push(format!("block ({rho},{a}) violates (J1) parity"));
            }
            let defined = singleton_defined(&t.cusp, rho, a);
            let has = t.eps.singleton(rho, a).is_some();
            if defined && !has {
                let kind = if a % 2 == 0 { "even" } else { "odd" };
                out.push(format!("{kind} block ({rho},{a}) missing required singleton eps"));
            }
            if !defined && has {
                out.push(format!("singleton eps on odd block ({rho},{a}) with cuspidal blocks"));
            }
        }
    }
    for ((rho, a), _) in t.eps.singletons() {
        if !t.jord.contains(rho, *a) {
            out.push(format!("eps on absent block ({rho},{a})"));
        }
    }
    for ((rho, a, b), _) in t.eps.stored_pairs() {
        for x in [a, b] {
            if !t.jord.contains(rho, *x) {
                out.push(format!("pair eps on absent block ({rho},{x})"));
            }
        }
    }
    for (rho, cusp_set) in t.cusp.blocks() {
        let n = t.jord.get(rho).map_or(0, |s| s.len());
        if n < cusp_set.len() || !(n - cusp_set.len()).is_multiple_of(2) {
            out.push(format!("{n} blocks on `{rho}` cannot reduce to the {} cuspidal ones", cusp_set.len()));
        }
    }
    for (rho, set) in t.jord.iter() {
        if !t.cusp.has_blocks(rho) && set.len() % 2 != 0 {
            out.push(format!("odd number of blocks on `{rho}` over a cusp without `{rho}` blocks"));
        }
        let Some(&first) = set.iter().next() else { continue };
        let mut seen = BTreeSet::new();
        for &a in set {
            if seen.contains(&a) {
                continue;
            }
            match t.eps.potentials(rho, a) {
                None => {
                    out.push(format!("eps coherence violated among blocks of `{rho}`"));
                    break;
                }
                Some(p) => seen.extend(p.keys().copied().filter(|&k| k != 0)),
            }
        }
        if !t.singletons_defined_for(rho) {
            if let Some(p) = t.eps.potentials(rho, first) {
                for &a in set {
                    if !p.contains_key(&a) {
                        out.push(format!("pairwise eps undetermined between ({rho},{first}) and ({rho},{a})"));
                    }
                }
            }
        }
    }
    out
}

/// δ(ρ,b) ⋊ π reduces: ρ selfdual, (ρ,b) satisfies (J1), b ∉ Jord_ρ(π).
pub fn delta_b_reduces(t: &AdmissibleTriple, rho: &Rho, b: i64) -> bool {
    rho.is_selfdual() && j1_satisfied(rho, b).unwrap_or(false) && !t.jord.contains(rho, b)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Reducibility {
    Reduces,
    Irreducible,
}

/// Reducibility of ν^α ρ ⋊ π.
pub fn point_reduces(t: &AdmissibleTriple, rho: &Rho, alpha: HalfInt) -> Result<Reducibility> {
    use Reducibility::*;
    if !rho.is_selfdual() {
        return Ok(Irreducible);
    }
    let parity = rho.parity()?;
    let al = alpha.abs();
    let r = |b: bool| if b { Reduces } else { Irreducible };
    if al == HalfInt::ZERO {
        return Ok(r(parity == Parity::Odd && !t.jord.contains(rho, 1)));
    }
    if al == HalfInt::HALF {
        if t.jord.contains(rho, 2) {
            let e = t
                .eps
                .singleton(rho, 2)
                .ok_or_else(|| Error::EpsilonUndefined(format!("({rho},2)")))?;
            return Ok(r(e == Sign::Plus));
        }
        return Ok(r(j1_satisfied(rho, 2)?));
    }
    let a = al.twice() - 1;
    if !t.jord.contains(rho, a) {
        return Ok(Irreducible);
    }
    if !t.jord.contains(rho, a + 2) {
        return Ok(Reduces);
    }
    let e = t
        .eps
        .pair(rho, a, a + 2)
        .ok_or_else(|| Error::EpsilonUndefined(format!("(({rho},{a}),({rho},{}))", a + 2)))?;
    Ok(r(e == Sign::Plus))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SegmentIrreducibility {
    Irreducible,
    Unknown,
}

/// δ(Δ) ⋊ π is irreducible when every ν^x ρ ⋊ π with x ∈ Δ is; otherwise
/// nothing is claimed.
pub fn segment_irreducible(t: &AdmissibleTriple, seg: Option<&Segment>) -> Result<SegmentIrreducibility> {
    let Some(seg) = seg else { return Ok(SegmentIrreducibility::Irreducible) };
    for x in seg.points() {
        if point_reduces(t, &seg.rho, x)? == Reducibility::Reduces {
            return Ok(SegmentIrreducibility::Unknown);
        }
    }
    Ok(SegmentIrreducibility::Irreducible)
}

/// Jordan blocks of the square-integrable subrepresentation of
/// δ([ν^{-y}ρ, ν^x ρ]) ⋊ π'.
pub fn jord_transfer(jp: &JordanBlocks, rho: &Rho, x: HalfInt, y: HalfInt) -> Result<JordanBlocks> {
    let parity = rho.parity()?;
    let d = x - y;
    if !d.is_integer() || d.twice() < 0 {
        return pre(format!("x - y = {d} must be a nonnegative integer"));
    }
    if x.is_integer() != (parity == Parity::Odd) {
        return pre(format!("exponents {x}, {y} have the wrong integrality for `{rho}`"));
    }
    let mut out = jp.clone();
    let top = x.block();
    if y.twice() > 0 {
        let old = y.block() - 2;
        if old >= 1 && !out.remove(rho, old) {
            return pre(format!("block ({rho},{old}) required but absent"));
        }
        if !out.insert(rho, top) {
            return pre(format!("block ({rho},{top}) already present"));
        }
    } else {
        let low = -y.twice() + 1;
        if top == low {
            return pre(format!("blocks ({rho},{top}) would be added twice"));
        }
        for b in [top, low] {
            if !out.insert(rho, b) {
                return pre(format!("block ({rho},{b}) already present"));
            }
        }
    }
    Ok(out)
}

fn require_block_parity(rho: &Rho, a: i64) -> Result<()> {
    if !rho.is_selfdual() {
        return Err(Error::NotSelfdual(rho.id().to_string()));
    }
    if a < 1 || !j1_satisfied(rho, a)? {
        return pre(format!("({rho},{a}) does not satisfy (J1)"));
    }
    Ok(())
}

/// Adds the pair (ρ,a_−),(ρ,a) of a square-integrable subrepresentation of
/// δ([ν^{-(a_−-1)/2}ρ, ν^{(a-1)/2}ρ]) ⋊ π'. The two new blocks have
/// relative sign +1. `new_sign` is their common ε when singletons are
/// defined for ρ, and otherwise their sign relative to the existing
/// blocks of ρ (omitted when there are none).
pub fn add_pair(
    t: &AdmissibleTriple,
    rho: &Rho,
    a_minus: i64,
    a: i64,
    new_sign: Option<Sign>,
) -> Result<AdmissibleTriple> {
    require_block_parity(rho, a_minus)?;
    require_block_parity(rho, a)?;
    if a <= a_minus || (a - a_minus) % 2 != 0 {
        return pre(format!("a - a_minus = {} must be a positive even integer", a - a_minus));
    }
    let hit = t.jord.in_range(rho, a_minus, a);
    if !hit.is_empty() {
        return pre(format!("Jord_{rho} meets [{a_minus},{a}] at {hit:?}"));
    }
    let mut out = t.clone();
    out.jord.insert(rho, a_minus);
    out.jord.insert(rho, a);
    if t.singletons_defined_for(rho) {
        let s = new_sign.ok_or_else(|| Error::Precondition("new_sign required but absent".into()))?;
        out.eps.set_singleton(rho, a_minus, s);
        out.eps.set_singleton(rho, a, s);
    } else {
        let old = t.jord.of(rho);
        let mut value: BTreeMap<i64, Sign> = BTreeMap::new();
        match old.last() {
            None => {
                if new_sign.is_some() {
                    return pre("new_sign given but singletons undefined and no blocks to compare with");
                }
                value.insert(a_minus, Sign::Plus);
                value.insert(a, Sign::Plus);
            }
            Some(&top) => {
                let s = new_sign.ok_or_else(|| {
                    Error::Precondition("new_sign (relative to existing blocks) required but absent".into())
                })?;
                for &c in &old {
                    let v = if c == top { Sign::Plus } else { t.eps.pair(rho, c, top).ok_or_else(|| Error::EpsilonUndefined(format!("({rho},{c})")))? };
                    value.insert(c, v);
                }
                value.insert(a_minus, s);
                value.insert(a, s);
            }
        }
        let anchor = *value.keys().next_back().expect("nonempty");
        let va = value[&anchor];
        out.eps = out.eps.without_rho(rho);
        for (&c, &v) in &value {
            if c != anchor {
                out.eps.set_pair(rho, c, anchor, v * va);
            }
        }
    }
    out.checked()
}

/// π^{-{(ρ,a_−),(ρ,a)}}: removes an adjacent pair whose ε quotient is +1.
pub fn remove_pair(t: &AdmissibleTriple, rho: &Rho, a_minus: i64, a: i64) -> Result<AdmissibleTriple> {
    if !t.jord.contains(rho, a_minus) || !t.jord.contains(rho, a) {
        return pre(format!("blocks ({rho},{a_minus}),({rho},{a}) absent"));
    }
    if t.jord.below(rho, a) != Some(a_minus) {
        return pre(format!("({rho},{a_minus}),({rho},{a}) are not adjacent"));
    }
    match t.eps.pair(rho, a_minus, a) {
        Some(Sign::Plus) => {}
        Some(Sign::Minus) => return pre(format!("eps quotient of ({rho},{a_minus}),({rho},{a}) is -1")),
        None => return Err(Error::EpsilonUndefined(format!("({rho},{a_minus}),({rho},{a})"))),
    }
    let mut out = t.clone();
    out.jord.remove(rho, a_minus);
    out.jord.remove(rho, a);
    if t.singletons_defined_for(rho) {
        out.eps.singleton.remove(&(rho.clone(), a_minus));
        out.eps.singleton.remove(&(rho.clone(), a));
    } else {
        let rest = out.jord.of(rho);
        let old_top = *t.jord.get(rho).and_then(|s| s.iter().next_back()).expect("nonempty");
        let rel = |c: i64| if c == old_top { Some(Sign::Plus) } else { t.eps.pair(rho, c, old_top) };
        out.eps = out.eps.without_rho(rho);
        if let Some(&top) = rest.last() {
            let vt = rel(top).expect("coherent");
            for &c in &rest[..rest.len() - 1] {
                out.eps.set_pair(rho, c, top, rel(c).expect("coherent") * vt);
            }
        }
    }
    out.checked()
}

/// π^{(ρ, a↓a-2k)}: replaces a by a-2k across an empty gap; ε moves with the block.
pub fn deform_down(t: &AdmissibleTriple, rho: &Rho, a: i64, k: i64) -> Result<AdmissibleTriple> {
    if !t.jord.contains(rho, a) {
        return pre(format!("({rho},{a}) is not a Jordan block"));
    }
    if a < 3 {
        return pre(format!("a = {a} must be at least 3"));
    }
    if k < 1 {
        return pre(format!("k = {k} must be positive"));
    }
    let low = a - 2 * k;
    let floor = rho.parity()?.floor();
    if low < floor {
        return pre(format!("a - 2k = {low} is below the parity floor {floor}"));
    }
    let hit = t.jord.in_range(rho, low, a - 2);
    if !hit.is_empty() {
        return pre(format!("gap [{low},{}] meets Jord_{rho} at {hit:?}", a - 2));
    }
    let mut out = t.clone();
    out.jord.remove(rho, a);
    out.jord.insert(rho, low);
    out.eps = t.eps.rename(rho, a, low);
    out.checked()
}

/// (π')^{(ρ, a_low↑a)}: the inverse of [`deform_down`].
pub fn deform_up(t: &AdmissibleTriple, rho: &Rho, a_low: i64, a: i64) -> Result<AdmissibleTriple> {
    if !t.jord.contains(rho, a_low) {
        return pre(format!("({rho},{a_low}) is not a Jordan block"));
    }
    if a <= a_low || (a - a_low) % 2 != 0 {
        return pre(format!("a - a_low = {} must be a positive even integer", a - a_low));
    }
    let hit = t.jord.in_range(rho, a_low + 1, a);
    if !hit.is_empty() {
        return pre(format!("({a_low},{a}] meets Jord_{rho} at {hit:?}"));
    }
    let mut out = t.clone();
    out.jord.remove(rho, a_low);
    out.jord.insert(rho, a);
    out.eps = t.eps.rename(rho, a_low, a);
    out.checked()
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct BlockWire {
    pub rho: String,
    pub a: i64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(untagged)]
pub enum EpsWire {
    Pair { rho: String, a: i64, b: i64, rel: i64 },
    Single { rho: String, a: i64, sign: i64 },
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct TripleWire {
    pub cusp: String,
    #[serde(default)]
    pub jord: Vec<BlockWire>,
    #[serde(default)]
    pub eps: Vec<EpsWire>,
}

impl TripleWire {
    /// Resolves ids without validating ε rules.
    pub fn resolve_raw(&self, cat: &Catalog) -> Result<AdmissibleTriple> {
        let cusp = cat.cusp(&self.cusp)?;
        let mut jord = JordanBlocks::new();
        for b in &self.jord {
            let rho = cat.rho(&b.rho)?;
            if !jord.insert(&rho, b.a) {
                return Err(Error::Parse(format!("block ({},{}) listed twice", b.rho, b.a)));
            }
        }
        let mut eps = EpsilonMap::new();
        for e in &self.eps {
            match e {
                EpsWire::Single { rho, a, sign } => {
                    let r = cat.rho(rho)?;
                    if eps.singleton(&r, *a).is_some() {
                        return Err(Error::Parse(format!("eps ({rho},{a}) listed twice")));
                    }
                    eps.set_singleton(&r, *a, Sign::from_i64(*sign)?);
                }
                EpsWire::Pair { rho, a, b, rel } => {
                    if a == b {
                        return Err(Error::Parse(format!("pair eps ({rho},{a}),({rho},{b}) repeats a block")));
                    }
                    let r = cat.rho(rho)?;
                    eps.set_pair(&r, *a, *b, Sign::from_i64(*rel)?);
                }
            }
        }
        Ok(AdmissibleTriple { cusp, jord, eps })
    }

    pub fn resolve(&self, cat: &Catalog) -> Result<AdmissibleTriple> {
        self.resolve_raw(cat)?.checked()
    }
}

impl AdmissibleTriple {
    pub fn to_wire(&self) -> TripleWire {
        let jord = self.jord.pairs().map(|(r, a)| BlockWire { rho: r.id().to_string(), a }).collect();
        let mut eps: Vec<EpsWire> = self
            .eps
            .singletons()
            .map(|((r, a), s)| EpsWire::Single { rho: r.id().to_string(), a: *a, sign: s.to_i64() })
            .collect();
        eps.extend(self.eps.stored_pairs().map(|((r, a, b), s)| EpsWire::Pair {
            rho: r.id().to_string(),
            a: *a,
            b: *b,
            rel: s.to_i64(),
        }));
        TripleWire { cusp: self.cusp.id().to_string(), jord, eps }
    }

    pub fn from_json(s: &str, cat: &Catalog) -> Result<AdmissibleTriple> {
        let w: TripleWire = serde_json::from_str(s).map_err(|e| Error::Parse(format!("triple: {e}")))?;
        w.resolve(cat)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_wire()).expect("triple serializes")
    }
}
