//! Seeded generators of small valid instances: chains, triples, tempered
//! parameters and lemma instances. Caps: at most 3 selfdual symbols,
//! blocks at most [`MAX_BLOCK`], chains of at most [`MAX_CHAIN`] steps.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::jacquet::{replay, ConstructionChain, CriterionView, Step};
use crate::jordan::{delta_b_reduces, singleton_defined, validate_triple, AdmissibleTriple, EpsilonMap, JordanBlocks};
use crate::symbols::{Catalog, Parity, Rho, Sign};
use crate::tempered::{in_d_irr, Delta, ETemperedParam, TemperedParam};

pub const MAX_BLOCK: i64 = 9;
pub const MAX_CHAIN: usize = 4;

/// Size limits for generated chains.
#[derive(Clone, Copy, Debug)]
pub struct Caps {
    pub max_len: usize,
    pub max_block: i64,
}

pub const FULL: Caps = Caps { max_len: MAX_CHAIN, max_block: MAX_BLOCK };

/// Lemma checks expand the full filtered bound, which grows quickly with
/// chain length and block size; their instances stay below these caps.
pub const LEMMA: Caps = Caps { max_len: 3, max_block: 7 };

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn symbols(cat: &Catalog) -> Vec<Rho> {
    let mut v = cat.selfdual_rhos();
    v.truncate(3);
    v
}

/// Every step applicable to t with blocks at most `max_block`, both signs
/// where a sign is meaningful.
pub fn candidate_steps(t: &AdmissibleTriple, rhos: &[Rho], max_block: i64) -> Vec<Step> {
    let mut out = Vec::new();
    for rho in rhos {
        let Ok(parity) = rho.parity() else { continue };
        let floor = parity.floor();
        let signs: Vec<Option<Sign>> = if t.singletons_defined_for(rho) || !t.jord.is_empty_at(rho) {
            vec![Some(Sign::Plus), Some(Sign::Minus)]
        } else {
            vec![None]
        };
        let mut lo = floor;
        while lo <= max_block {
            let mut hi = lo + 2;
            while hi <= max_block {
                if t.jord.in_range(rho, lo, hi).is_empty() {
                    for s in &signs {
                        out.push(Step::AddPair { rho: rho.clone(), a_minus: lo, a: hi, sign: *s });
                    }
                }
                hi += 2;
            }
            lo += 2;
        }
        for a_low in t.jord.of(rho) {
            let mut a = a_low + 2;
            while a <= max_block && !t.jord.contains(rho, a) {
                out.push(Step::DeformUp { rho: rho.clone(), a_low, a });
                a += 2;
            }
        }
    }
    out.retain(|s| s.apply(t).is_ok());
    out
}

/// A random valid chain of length at most `max_len`.
pub fn random_chain<R: Rng>(r: &mut R, cat: &Catalog, max_len: usize) -> ConstructionChain {
    random_chain_capped(r, cat, Caps { max_len, max_block: MAX_BLOCK })
}

pub fn random_chain_capped<R: Rng>(r: &mut R, cat: &Catalog, caps: Caps) -> ConstructionChain {
    let max_len = caps.max_len;
    let cusps: Vec<_> = cat.cusps().cloned().collect();
    let base = cusps.choose(r).expect("catalog has cusps").clone();
    let rhos = symbols(cat);
    let len = r.gen_range(0..=max_len);
    let mut chain = ConstructionChain::new(base.clone());
    let mut t = AdmissibleTriple::cuspidal(&base);
    for _ in 0..len {
        let c = candidate_steps(&t, &rhos, caps.max_block);
        let Some(s) = c.choose(r) else { break };
        t = s.apply(&t).expect("candidate applies");
        chain.steps.push(s.clone());
    }
    chain
}

/// Every valid chain of length at most `max_len` over every cusp.
pub fn all_chains(cat: &Catalog, max_len: usize, max_block: i64) -> Vec<ConstructionChain> {
    let rhos = symbols(cat);
    let mut out = Vec::new();
    for base in cat.cusps() {
        let mut frontier = vec![(ConstructionChain::new(base.clone()), AdmissibleTriple::cuspidal(base))];
        for depth in 0..=max_len {
            let mut next = Vec::new();
            for (c, t) in frontier {
                if depth < max_len {
                    for s in candidate_steps(&t, &rhos, max_block) {
                        let u = s.apply(&t).expect("candidate applies");
                        next.push((c.clone().then(s), u));
                    }
                }
                out.push(c);
            }
            frontier = next;
        }
    }
    out
}

/// Visits the same chains as [`all_chains`] depth first, extending the
/// criterion view of each prefix by one step instead of recomputing it.
pub fn walk_chains<F>(cat: &Catalog, max_len: usize, max_block: i64, limit: usize, mut f: F) -> Result<()>
where
    F: FnMut(&ConstructionChain, &CriterionView) -> Result<()>,
{
    let rhos = symbols(cat);
    for base in cat.cusps() {
        let chain = ConstructionChain::new(base.clone());
        walk(&chain, &CriterionView::cuspidal(base), &rhos, max_len, max_block, limit, &mut f)?;
    }
    Ok(())
}

fn walk<F>(
    chain: &ConstructionChain,
    bound: &CriterionView,
    rhos: &[Rho],
    left: usize,
    max_block: i64,
    limit: usize,
    f: &mut F,
) -> Result<()>
where
    F: FnMut(&ConstructionChain, &CriterionView) -> Result<()>,
{
    f(chain, bound)?;
    if left == 0 {
        return Ok(());
    }
    for s in candidate_steps(&bound.triple, rhos, max_block) {
        let t = s.apply(&bound.triple)?;
        let next = bound.step(&s, &t, limit)?;
        walk(&chain.clone().then(s), &next, rhos, left - 1, max_block, limit, f)?;
    }
    Ok(())
}

/// Every triple reachable from a cusp by construction steps with blocks at
/// most `max_block`. Removing pairs and deforming down never raise a block,
/// so these are all square-integrable parameters in that range.
pub fn reachable_triples(cat: &Catalog, max_block: i64) -> Vec<AdmissibleTriple> {
    let rhos = symbols(cat);
    let key = |t: &AdmissibleTriple| t.to_json().to_string();
    let mut seen = std::collections::BTreeMap::new();
    let mut queue: std::collections::VecDeque<AdmissibleTriple> = cat.cusps().map(AdmissibleTriple::cuspidal).collect();
    for t in &queue {
        seen.insert(key(t), t.clone());
    }
    while let Some(t) = queue.pop_front() {
        for s in candidate_steps(&t, &rhos, max_block) {
            let u = s.apply(&t).expect("candidate applies");
            let k = key(&u);
            if let std::collections::btree_map::Entry::Vacant(e) = seen.entry(k) {
                e.insert(u.clone());
                queue.push_back(u);
            }
        }
    }
    seen.into_values().collect()
}

/// Every triple over the catalog's selfdual symbols with blocks at
/// most `max_block` that passes [`validate_triple`].
pub fn all_triples(cat: &Catalog, max_block: i64) -> Vec<AdmissibleTriple> {
    let rhos = symbols(cat);
    let mut out = Vec::new();
    for cusp in cat.cusps() {
        let mut partial = vec![AdmissibleTriple { cusp: cusp.clone(), jord: JordanBlocks::new(), eps: EpsilonMap::new() }];
        for rho in &rhos {
            let Ok(parity) = rho.parity() else { continue };
            let allowed: Vec<i64> = (parity.floor()..=max_block).step_by(2).collect();
            let mut next = Vec::new();
            for t in &partial {
                for mask in 0u32..1 << allowed.len() {
                    let set: Vec<i64> = allowed.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &a)| a).collect();
                    let single = set.iter().all(|&a| singleton_defined(cusp, rho, a));
                    let free = if single { set.len() } else { set.len().saturating_sub(1) };
                    for signs in 0u32..1 << free {
                        let mut u = t.clone();
                        let sign = |i: usize| if signs >> i & 1 == 1 { Sign::Minus } else { Sign::Plus };
                        for (i, &a) in set.iter().enumerate() {
                            u.jord.insert(rho, a);
                            if single {
                                u.eps.set_singleton(rho, a, sign(i));
                            } else if i + 1 < set.len() {
                                u.eps.set_pair(rho, a, *set.last().expect("nonempty"), sign(i));
                            }
                        }
                        next.push(u);
                    }
                }
            }
            partial = next;
        }
        out.extend(partial.into_iter().filter(|t| validate_triple(t).is_empty()));
    }
    out
}

pub fn random_triple<R: Rng>(r: &mut R, cat: &Catalog) -> AdmissibleTriple {
    replay(&random_chain(r, cat, MAX_CHAIN)).expect("generated chains replay")
}

/// Selfdual δ(ρ,b), b ≤ max_block, with δ ⋊ π reducible.
pub fn reducing_deltas(t: &AdmissibleTriple, cat: &Catalog, max_block: i64) -> Vec<Delta> {
    let mut out = Vec::new();
    for rho in symbols(cat) {
        for b in 1..=max_block {
            if delta_b_reduces(t, &rho, b) {
                out.push(Delta { rho: rho.clone(), a: b });
            }
        }
    }
    out
}

/// Members of D^u_{π,irr} with small a: non-selfdual symbols, selfdual
/// ones failing (J1), and Jordan blocks of π.
pub fn irreducible_deltas(t: &AdmissibleTriple, cat: &Catalog, max_block: i64) -> Vec<Delta> {
    let mut out = Vec::new();
    for rho in cat.rhos() {
        for a in 1..=max_block {
            let d = Delta { rho: rho.clone(), a };
            if !rho.is_selfdual() && rho.dual().is_err() {
                continue;
            }
            if in_d_irr(&d, t) {
                out.push(d);
            }
        }
    }
    out
}

/// A random valid tempered parameter.
pub fn random_tempered_param<R: Rng>(r: &mut R, cat: &Catalog) -> TemperedParam {
    let core = random_triple(r, cat);
    let mut red = reducing_deltas(&core, cat, MAX_BLOCK);
    red.shuffle(r);
    let n = r.gen_range(0..=red.len().min(3));
    let signed: Vec<(Delta, Sign)> =
        red[..n].iter().map(|d| (d.clone(), if r.gen_bool(0.5) { Sign::Plus } else { Sign::Minus })).collect();
    let mut pool = irreducible_deltas(&core, cat, MAX_BLOCK);
    pool.extend(signed.iter().map(|(d, _)| d.clone()));
    let m = r.gen_range(0..=3);
    let gammas = (0..m).map(|_| pool.choose(r).expect("pool nonempty").clone()).collect();
    TemperedParam { gammas, e_core: ETemperedParam { core, signed_deltas: signed } }
}

/// A chain and (ρ, b) meeting the hypotheses of the even-or-main lemma:
/// `main` asks for Jord_ρ ∩ [1,b] ≠ ∅, otherwise b even with that set empty.
pub fn random_def_instance<R: Rng>(
    r: &mut R,
    cat: &Catalog,
    main: bool,
    caps: Caps,
) -> (ConstructionChain, Rho, i64) {
    loop {
        let chain = random_chain_capped(r, cat, caps);
        let t = replay(&chain).expect("replays");
        let mut opts = Vec::new();
        for rho in symbols(cat) {
            for b in 1..=caps.max_block {
                if !delta_b_reduces(&t, &rho, b) {
                    continue;
                }
                let meets = !t.jord.in_range(&rho, 1, b).is_empty();
                if (main && meets) || (!main && !meets && b % 2 == 0) {
                    opts.push((rho.clone(), b));
                }
            }
        }
        if let Some((rho, b)) = opts.choose(r) {
            return (chain, rho.clone(), *b);
        }
    }
}

/// A chain ending with DeformUp(ρ,1,a), a = min Jord_ρ(π), and an odd
/// b < a with δ(ρ,b) ⋊ π reducible.
pub fn random_def_odd2_instance<R: Rng>(r: &mut R, cat: &Catalog, caps: Caps) -> (ConstructionChain, Rho, i64) {
    let rhos: Vec<Rho> = symbols(cat).into_iter().filter(|x| x.symbol().parity == Parity::Odd).collect();
    let max_block = caps.max_block;
    loop {
        let mut chain = random_chain_capped(r, cat, Caps { max_len: caps.max_len - 1, max_block });
        let t = replay(&chain).expect("replays");
        let rho = rhos.choose(r).expect("an odd symbol").clone();
        if !t.jord.contains(&rho, 1) {
            let signs = if t.singletons_defined_for(&rho) || !t.jord.is_empty_at(&rho) {
                vec![Some(Sign::Plus), Some(Sign::Minus)]
            } else {
                vec![None]
            };
            let ups: Vec<i64> = (1..=(max_block - 1) / 2)
                .map(|k| 1 + 2 * k)
                .filter(|&a| t.jord.in_range(&rho, 1, a).is_empty())
                .collect();
            let (Some(&a), Some(&s)) = (ups.choose(r), signs.choose(r)) else { continue };
            if chain.steps.len() + 2 > caps.max_len {
                continue;
            }
            chain = chain.then(Step::AddPair { rho: rho.clone(), a_minus: 1, a, sign: s });
        }
        let t = replay(&chain).expect("replays");
        let ceiling = t.jord.above(&rho, 1).unwrap_or(max_block + 2);
        let tops: Vec<i64> = (3..ceiling).step_by(2).filter(|&a| a <= max_block).collect();
        let Some(&a) = tops.choose(r) else { continue };
        if chain.steps.len() + 1 > caps.max_len {
            continue;
        }
        let chain = chain.then(Step::DeformUp { rho: rho.clone(), a_low: 1, a });
        let t = replay(&chain).expect("replays");
        let bs: Vec<i64> = (1..a).step_by(2).filter(|&b| delta_b_reduces(&t, &rho, b)).collect();
        if let Some(&b) = bs.choose(r) {
            return (chain, rho, b);
        }
    }
}

/// A chain and 1..=max_n distinct reducing δ's with a ≤ caps.max_block.
pub fn random_pr_def_t_instance<R: Rng>(
    r: &mut R,
    cat: &Catalog,
    caps: Caps,
    max_n: usize,
) -> (ConstructionChain, Vec<Delta>) {
    loop {
        let chain = random_chain_capped(r, cat, caps);
        let t = replay(&chain).expect("replays");
        let mut red = reducing_deltas(&t, cat, caps.max_block);
        if red.is_empty() {
            continue;
        }
        red.shuffle(r);
        let n = r.gen_range(1..=red.len().min(max_n));
        red.truncate(n);
        return (chain, red);
    }
}
