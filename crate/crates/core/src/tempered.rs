//! Tempered representations: e-tempered constituents π_{j_1δ_1,…,j_nδ_n},
//! their Jordan multisets and ε_τ, tempered triples and the bijection
//! between parameters and triples.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jordan::{delta_b_reduces, validate_triple, AdmissibleTriple, EpsWire, EpsilonMap, JordanBlocks, TripleWire};
use crate::multiseg::Segment;
use crate::symbols::{j1_satisfied, Catalog, Cusp, HalfInt, Rho, Sign};

/// δ(ρ,a): the unitarizable essentially square-integrable representation
/// attached to the segment [ν^{-(a-1)/2}ρ, ν^{(a-1)/2}ρ].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Delta {
    pub rho: Rho,
    pub a: i64,
}

impl Delta {
    pub fn new(rho: &Rho, a: i64) -> Result<Delta> {
        if a < 1 {
            return Err(Error::InvalidSegment(format!("d({rho},{a}) needs a >= 1")));
        }
        Ok(Delta { rho: rho.clone(), a })
    }

    pub fn dual(&self) -> Result<Delta> {
        Ok(Delta { rho: self.rho.dual()?, a: self.a })
    }

    pub fn is_selfdual(&self) -> bool {
        self.rho.is_selfdual()
    }

    /// Selfdual and (ρ,a) satisfies (J1).
    pub fn is_j1(&self) -> bool {
        self.rho.is_selfdual() && j1_satisfied(&self.rho, self.a).unwrap_or(false)
    }

    pub fn segment(&self) -> Segment {
        let h = HalfInt::half_of_pred(self.a);
        Segment::new(self.rho.clone(), -h, h).expect("centered segment")
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d({},{})", self.rho, self.a)
    }
}

/// δ ∈ D^u_{π,irr}: δ ⋊ π is irreducible.
pub fn in_d_irr(d: &Delta, core: &AdmissibleTriple) -> bool {
    !delta_b_reduces(core, &d.rho, d.a)
}

/// π_{j_1δ_1,…,j_nδ_n}.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ETemperedParam {
    pub core: AdmissibleTriple,
    pub signed_deltas: Vec<(Delta, Sign)>,
}

/// γ_1 × … × γ_m ⋊ π_{j_1δ_1,…,j_nδ_n}.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TemperedParam {
    pub gammas: Vec<Delta>,
    pub e_core: ETemperedParam,
}

impl TemperedParam {
    pub fn square_integrable(core: AdmissibleTriple) -> TemperedParam {
        TemperedParam { gammas: Vec::new(), e_core: ETemperedParam { core, signed_deltas: Vec::new() } }
    }

    pub fn core(&self) -> &AdmissibleTriple {
        &self.e_core.core
    }

    /// Violations of the parameter invariants; empty iff valid.
    pub fn violations(&self) -> Vec<String> {
        let core = self.core();
        let mut out: Vec<String> = validate_triple(core).into_iter().map(|v| format!("core: {v}")).collect();
        let mut seen = BTreeSet::new();
        for (d, _) in &self.e_core.signed_deltas {
            if !seen.insert(d.clone()) {
                out.push(format!("{d} listed twice among the signed deltas"));
            }
            if !delta_b_reduces(core, &d.rho, d.a) {
                out.push(format!("{d} is not in D^u_red of the core"));
            }
        }
        for g in &self.gammas {
            if !g.is_selfdual() && g.dual().is_err() {
                out.push(format!("dual of {g} unknown"));
            }
            if !(in_d_irr(g, core) || seen.contains(g)) {
                out.push(format!("{g} is neither in D^u_irr nor among the signed deltas"));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidTriple(v))
        }
    }
}

impl fmt::Display for TemperedParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gammas {
            write!(f, "{g} x ")?;
        }
        write!(f, "pi[")?;
        for (k, (d, s)) in self.e_core.signed_deltas.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}{d}")?;
        }
        write!(f, "] over {}", self.core())
    }
}

/// Number of irreducible constituents of δ_1 × … × δ_n ⋊ π: 2^l with l the
/// number of non-isomorphic δ_i for which δ_i ⋊ π reduces.
pub fn goldberg_length(deltas: &[Delta], t: &AdmissibleTriple) -> u64 {
    let l = deltas.iter().filter(|d| delta_b_reduces(t, &d.rho, d.a)).collect::<BTreeSet<_>>().len();
    1u64 << l
}

/// The irreducible constituents of δ_1 × … × δ_n ⋊ π, one per sign vector
/// on the distinct reducing δ's. Non-reducing and repeated δ's become γ's.
pub fn decompose(deltas: &[Delta], t: &AdmissibleTriple) -> Vec<TemperedParam> {
    let mut reducing: Vec<Delta> = Vec::new();
    let mut gammas = Vec::new();
    for d in deltas {
        if delta_b_reduces(t, &d.rho, d.a) && !reducing.contains(d) {
            reducing.push(d.clone());
        } else {
            gammas.push(d.clone());
        }
    }
    reducing.sort();
    gammas.sort();
    let l = reducing.len();
    (0..1u64 << l)
        .map(|mask| {
            let signed = reducing
                .iter()
                .enumerate()
                .map(|(i, d)| (d.clone(), if mask >> (l - 1 - i) & 1 == 1 { Sign::Minus } else { Sign::Plus }))
                .collect();
            TemperedParam {
                gammas: gammas.clone(),
                e_core: ETemperedParam { core: t.clone(), signed_deltas: signed },
            }
        })
        .collect()
}

pub type Multiset = BTreeMap<Delta, u32>;

fn bump(m: &mut Multiset, d: Delta, k: u32) {
    *m.entry(d).or_insert(0) += k;
}

/// (γ_1,…,γ_m, γ̌_1,…,γ̌_m) + 2(δ_1,…,δ_n) + Jord(π).
pub fn jord_of_tempered(p: &TemperedParam) -> Result<Multiset> {
    let mut m = Multiset::new();
    for g in &p.gammas {
        bump(&mut m, g.clone(), 1);
        bump(&mut m, g.dual()?, 1);
    }
    for (d, _) in &p.e_core.signed_deltas {
        bump(&mut m, d.clone(), 2);
    }
    for (rho, a) in p.core().jord.pairs() {
        bump(&mut m, Delta { rho, a }, 1);
    }
    Ok(m)
}

/// A partially defined sign function on |Jord| ∪ |Jord|×|Jord|.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TemperedEps {
    pub single: BTreeMap<Delta, Sign>,
    pub pairs: BTreeMap<(Delta, Delta), Sign>,
}

/// ε_τ: j_i on the δ_i, ε_π on the blocks of π and its pairs.
pub fn eps_of_tempered(p: &TemperedParam) -> TemperedEps {
    let mut e = TemperedEps::default();
    for (d, s) in &p.e_core.signed_deltas {
        e.single.insert(d.clone(), *s);
    }
    let core = p.core().normalized();
    for ((rho, a), s) in core.eps.singletons() {
        e.single.insert(Delta { rho: rho.clone(), a: *a }, *s);
    }
    for ((rho, a, b), s) in core.eps.stored_pairs() {
        e.pairs.insert((Delta { rho: rho.clone(), a: *a }, Delta { rho: rho.clone(), a: *b }), *s);
    }
    e
}

/// (Jord, σ, ε) for tempered representations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TemperedTriple {
    pub jord: Multiset,
    pub cusp: Cusp,
    pub eps: TemperedEps,
}

impl TemperedTriple {
    fn mult(&self, d: &Delta) -> u32 {
        self.jord.get(d).copied().unwrap_or(0)
    }

    /// Jord^{(J1),odd} with the transported ε, as an admissible triple.
    pub fn core(&self) -> AdmissibleTriple {
        let mut jord = JordanBlocks::new();
        let mut eps = EpsilonMap::new();
        for (d, &k) in &self.jord {
            if d.is_selfdual() && k % 2 == 1 {
                jord.insert(&d.rho, d.a);
                if let Some(&s) = self.eps.single.get(d) {
                    eps.set_singleton(&d.rho, d.a, s);
                }
            }
        }
        for ((x, y), &s) in &self.eps.pairs {
            if x.rho == y.rho && self.mult(x) % 2 == 1 && self.mult(y) % 2 == 1 {
                eps.set_pair(&x.rho, x.a, y.a, s);
            }
        }
        AdmissibleTriple { cusp: self.cusp.clone(), jord, eps }
    }

    /// Same triple with the core's ε in normal form.
    pub fn normalized(&self) -> TemperedTriple {
        let core = self.core().normalized();
        let mut eps = TemperedEps::default();
        for (d, s) in &self.eps.single {
            if self.mult(d).is_multiple_of(2) {
                eps.single.insert(d.clone(), *s);
            }
        }
        for ((rho, a), s) in core.eps.singletons() {
            eps.single.insert(Delta { rho: rho.clone(), a: *a }, *s);
        }
        for ((rho, a, b), s) in core.eps.stored_pairs() {
            eps.pairs.insert((Delta { rho: rho.clone(), a: *a }, Delta { rho: rho.clone(), a: *b }), *s);
        }
        TemperedTriple { jord: self.jord.clone(), cusp: self.cusp.clone(), eps }
    }
}

impl fmt::Display for TemperedTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T[{}", self.cusp)?;
        for (d, k) in &self.jord {
            write!(f, "; {d}^{k}")?;
            if let Some(s) = self.eps.single.get(d) {
                write!(f, "{s}")?;
            }
        }
        for ((x, y), s) in &self.eps.pairs {
            write!(f, "; ({x},{y}){s}")?;
        }
        f.write_str("]")
    }
}

/// Violations of the tempered-triple conditions; empty iff valid.
pub fn validate_tempered_triple(t: &TemperedTriple) -> Vec<String> {
    let mut out = t.cusp.data().violations();
    for (d, &k) in &t.jord {
        if k == 0 {
            out.push(format!("{d} has multiplicity 0"));
        }
        if d.a < 1 {
            out.push(format!("{d} needs a >= 1"));
        }
        if !d.is_selfdual() {
            match d.dual() {
                Ok(dd) if t.mult(&dd) == k => {}
                Ok(dd) => out.push(format!("1(a) Jord not selfdual: {d} has multiplicity {k}, {dd} has {}", t.mult(&dd))),
                Err(e) => out.push(format!("1(a) Jord not selfdual: {e}")),
            }
        } else if !d.is_j1() && k % 2 == 1 {
            out.push(format!("1(b) {d} fails (J1) but has odd multiplicity {k}"));
        }
        if d.is_j1() {
            let required = k % 2 == 0 || d.a % 2 == 0 || !t.cusp.has_blocks(&d.rho);
            let has = t.eps.single.contains_key(d);
            if required && !has {
                let rule = if k % 2 == 0 { "3(a)" } else { "3(b)" };
                out.push(format!("{rule} eps must be defined on {d}"));
            }
            if !required && has {
                out.push(format!("3(b) eps must be undefined on {d} (odd a, cuspidal blocks present)"));
            }
        }
    }
    for d in t.eps.single.keys() {
        if !t.jord.contains_key(d) {
            out.push(format!("3 eps on {d} outside |Jord|"));
        } else if !d.is_j1() {
            out.push(format!("3 eps on {d}, which is not selfdual with (J1)"));
        }
    }
    for (x, y) in t.eps.pairs.keys() {
        if x == y {
            out.push(format!("3(c) pair eps on ({x},{y}) repeats a member"));
        }
        if x.rho != y.rho {
            out.push(format!("3(c) pair eps on ({x},{y}) across distinct rho"));
        }
        for d in [x, y] {
            if !t.jord.contains_key(d) {
                out.push(format!("3 pair eps on {d} outside |Jord|"));
            } else if !d.is_j1() {
                out.push(format!("3 pair eps on {d}, which is not selfdual with (J1)"));
            } else if t.mult(d).is_multiple_of(2) {
                out.push(format!("3(c) pair eps on {d} of even multiplicity"));
            }
        }
    }
    if out.is_empty() {
        out.extend(validate_triple(&t.core()).into_iter().map(|v| format!("4 core: {v}")));
    }
    out
}

pub fn param_to_triple(p: &TemperedParam) -> Result<TemperedTriple> {
    p.validate()?;
    Ok(TemperedTriple { jord: jord_of_tempered(p)?, cusp: p.core().cusp.clone(), eps: eps_of_tempered(p) })
}

pub fn triple_to_param(t: &TemperedTriple) -> Result<TemperedParam> {
    let v = validate_tempered_triple(t);
    if !v.is_empty() {
        return Err(Error::InvalidTriple(v));
    }
    let core = t.core().normalized();
    let mut gammas = Vec::new();
    let mut signed = Vec::new();
    for (d, &k) in &t.jord {
        if !d.is_selfdual() {
            let dd = d.dual()?;
            if d.rho.id() < dd.rho.id() {
                gammas.extend(std::iter::repeat_n(d.clone(), k as usize));
            }
        } else if !d.is_j1() {
            gammas.extend(std::iter::repeat_n(d.clone(), k as usize / 2));
        } else if k % 2 == 0 {
            signed.push((d.clone(), t.eps.single[d]));
            gammas.extend(std::iter::repeat_n(d.clone(), k as usize / 2 - 1));
        } else {
            gammas.extend(std::iter::repeat_n(d.clone(), k as usize / 2));
        }
    }
    Ok(TemperedParam { gammas, e_core: ETemperedParam { core, signed_deltas: signed } })
}

/// γ_1 × … × γ_m ⋊ π_{j_1δ_1,…} ≅ γ'_1 × … ⋊ π_{j'_1δ'_1,…}.
pub fn params_equivalent(p: &TemperedParam, q: &TemperedParam) -> Result<bool> {
    let closed = |x: &TemperedParam| -> Result<Multiset> {
        let mut m = Multiset::new();
        for g in &x.gammas {
            bump(&mut m, g.clone(), 1);
            bump(&mut m, g.dual()?, 1);
        }
        Ok(m)
    };
    let signs = |x: &TemperedParam| x.e_core.signed_deltas.iter().cloned().collect::<BTreeSet<_>>();
    Ok(closed(p)? == closed(q)? && p.core().normalized() == q.core().normalized() && signs(p) == signs(q))
}

/// Generic iff π_cusp is generic, ε_π ≡ 1 and all j_i = 1.
pub fn is_generic(p: &TemperedParam) -> Result<bool> {
    let core = p.core().normalized();
    let g = core.cusp.generic().ok_or_else(|| Error::Precondition("genericity data missing".into()))?;
    let eps_plus = core.eps.singletons().all(|(_, s)| *s == Sign::Plus)
        && core.eps.stored_pairs().all(|(_, s)| *s == Sign::Plus);
    let j_plus = p.e_core.signed_deltas.iter().all(|(_, s)| *s == Sign::Plus);
    Ok(g && eps_plus && j_plus)
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct DeltaWire {
    pub rho: String,
    pub a: i64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct SignedDeltaWire {
    pub rho: String,
    pub a: i64,
    pub sign: i64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct TemperedParamWire {
    pub core: TripleWire,
    #[serde(default)]
    pub deltas: Vec<SignedDeltaWire>,
    #[serde(default)]
    pub gammas: Vec<DeltaWire>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct MemberWire {
    pub rho: String,
    pub a: i64,
    pub mult: u32,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct TemperedTripleWire {
    pub cusp: String,
    #[serde(default)]
    pub jord: Vec<MemberWire>,
    #[serde(default)]
    pub eps: Vec<EpsWire>,
}

impl DeltaWire {
    pub fn resolve(&self, cat: &Catalog) -> Result<Delta> {
        Delta::new(&cat.rho(&self.rho)?, self.a)
    }
}

fn delta_wire(d: &Delta) -> DeltaWire {
    DeltaWire { rho: d.rho.id().to_string(), a: d.a }
}

impl TemperedParam {
    pub fn to_wire(&self) -> TemperedParamWire {
        TemperedParamWire {
            core: self.core().to_wire(),
            deltas: self
                .e_core
                .signed_deltas
                .iter()
                .map(|(d, s)| SignedDeltaWire { rho: d.rho.id().to_string(), a: d.a, sign: s.to_i64() })
                .collect(),
            gammas: self.gammas.iter().map(delta_wire).collect(),
        }
    }

    pub fn from_wire(w: &TemperedParamWire, cat: &Catalog) -> Result<TemperedParam> {
        let core = w.core.resolve(cat)?;
        let mut signed = Vec::new();
        for s in &w.deltas {
            signed.push((Delta::new(&cat.rho(&s.rho)?, s.a)?, Sign::from_i64(s.sign)?));
        }
        let gammas = w.gammas.iter().map(|g| g.resolve(cat)).collect::<Result<Vec<_>>>()?;
        let p = TemperedParam { gammas, e_core: ETemperedParam { core, signed_deltas: signed } };
        p.validate()?;
        Ok(p)
    }
}

impl TemperedTriple {
    pub fn to_wire(&self) -> TemperedTripleWire {
        let jord = self.jord.iter().map(|(d, k)| MemberWire { rho: d.rho.id().to_string(), a: d.a, mult: *k }).collect();
        let mut eps: Vec<EpsWire> = self
            .eps
            .single
            .iter()
            .map(|(d, s)| EpsWire::Single { rho: d.rho.id().to_string(), a: d.a, sign: s.to_i64() })
            .collect();
        eps.extend(self.eps.pairs.iter().map(|((x, y), s)| EpsWire::Pair {
            rho: x.rho.id().to_string(),
            a: x.a,
            b: y.a,
            rel: s.to_i64(),
        }));
        TemperedTripleWire { cusp: self.cusp.id().to_string(), jord, eps }
    }

    /// Resolves ids; the result may still violate the triple conditions.
    pub fn from_wire_raw(w: &TemperedTripleWire, cat: &Catalog) -> Result<TemperedTriple> {
        let cusp = cat.cusp(&w.cusp)?;
        let mut jord = Multiset::new();
        for m in &w.jord {
            let d = Delta::new(&cat.rho(&m.rho)?, m.a)?;
            if jord.insert(d.clone(), m.mult).is_some() {
                return Err(Error::Parse(format!("{d} listed twice")));
            }
        }
        let mut eps = TemperedEps::default();
        for e in &w.eps {
            match e {
                EpsWire::Single { rho, a, sign } => {
                    eps.single.insert(Delta { rho: cat.rho(rho)?, a: *a }, Sign::from_i64(*sign)?);
                }
                EpsWire::Pair { rho, a, b, rel } => {
                    let r = cat.rho(rho)?;
                    let (x, y) = if a <= b { (*a, *b) } else { (*b, *a) };
                    eps.pairs.insert((Delta { rho: r.clone(), a: x }, Delta { rho: r, a: y }), Sign::from_i64(*rel)?);
                }
            }
        }
        Ok(TemperedTriple { jord, cusp, eps })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::add_pair;

    fn setup() -> (Catalog, Rho, Rho, Rho) {
        let c = Catalog::sample();
        let r1 = c.rho("r1").unwrap();
        let r2 = c.rho("r2").unwrap();
        let u = c.rho("u").unwrap();
        (c, r1, r2, u)
    }

    #[test]
    fn goldberg_counts_distinct_reducing() {
        let (c, r1, r2, _) = setup();
        let t = AdmissibleTriple::cuspidal(&c.cusp("s0").unwrap());
        let d3 = Delta::new(&r1, 3).unwrap();
        let d2 = Delta::new(&r2, 2).unwrap();
        let d4 = Delta::new(&r1, 4).unwrap();
        assert_eq!(goldberg_length(&[], &t), 1);
        assert_eq!(goldberg_length(&[d3.clone(), d2.clone()], &t), 4);
        assert_eq!(goldberg_length(&[d3.clone(), d3.clone()], &t), 2);
        assert_eq!(goldberg_length(std::slice::from_ref(&d4), &t), 1);
        assert_eq!(decompose(&[d3, d2, d4], &t).len(), 4);
    }

    #[test]
    fn jord_of_tempered_example() {
        let (c, r1, _, u) = setup();
        let base = AdmissibleTriple::cuspidal(&c.cusp("s1").unwrap());
        let p = TemperedParam {
            gammas: vec![Delta::new(&u, 2).unwrap()],
            e_core: ETemperedParam { core: base, signed_deltas: vec![(Delta::new(&r1, 3).unwrap(), Sign::Plus)] },
        };
        p.validate().unwrap();
        let j = jord_of_tempered(&p).unwrap();
        let uc = c.rho("uc").unwrap();
        let expect: Multiset = [
            (Delta::new(&u, 2).unwrap(), 1),
            (Delta::new(&uc, 2).unwrap(), 1),
            (Delta::new(&r1, 3).unwrap(), 2),
            (Delta::new(&r1, 1).unwrap(), 1),
        ]
        .into_iter()
        .collect();
        assert_eq!(j, expect);
    }

    #[test]
    fn bijection_roundtrip_and_equivalence() {
        let (c, r1, r2, u) = setup();
        let core = add_pair(&AdmissibleTriple::cuspidal(&c.cusp("s1").unwrap()), &r1, 3, 5, Some(Sign::Minus)).unwrap();
        let d2 = Delta::new(&r2, 2).unwrap();
        let p = TemperedParam {
            gammas: vec![Delta::new(&u, 1).unwrap(), Delta::new(&r1, 5).unwrap(), d2.clone(), Delta::new(&r2, 3).unwrap()],
            e_core: ETemperedParam { core, signed_deltas: vec![(d2, Sign::Minus)] },
        };
        p.validate().unwrap();
        let t = param_to_triple(&p).unwrap();
        assert_eq!(validate_tempered_triple(&t), Vec::<String>::new());
        let q = triple_to_param(&t).unwrap();
        assert!(params_equivalent(&p, &q).unwrap());
        assert_eq!(param_to_triple(&q).unwrap(), t);
        let mut flipped = q.clone();
        flipped.e_core.signed_deltas[0].1 = Sign::Plus;
        assert!(!params_equivalent(&p, &flipped).unwrap());
        let mut dualized = p.clone();
        dualized.gammas[0] = Delta::new(&c.rho("uc").unwrap(), 1).unwrap();
        assert!(params_equivalent(&p, &dualized).unwrap());
    }

    #[test]
    fn validate_rejects_bad_triples() {
        let (c, r1, r2, u) = setup();
        let mut t = TemperedTriple { jord: Multiset::new(), cusp: c.cusp("s0").unwrap(), eps: TemperedEps::default() };
        t.jord.insert(Delta::new(&u, 2).unwrap(), 1);
        assert!(validate_tempered_triple(&t)[0].starts_with("1(a)"));
        t.jord.clear();
        t.jord.insert(Delta::new(&r1, 2).unwrap(), 1);
        assert!(validate_tempered_triple(&t)[0].starts_with("1(b)"));
        assert!(triple_to_param(&t).is_err());
        t.jord.clear();
        let a = Delta::new(&r1, 1).unwrap();
        let b = Delta::new(&r2, 2).unwrap();
        for d in [a.clone(), b.clone(), Delta::new(&r1, 3).unwrap(), Delta::new(&r2, 4).unwrap()] {
            t.jord.insert(d.clone(), 1);
            t.eps.single.insert(d, Sign::Plus);
        }
        assert!(validate_tempered_triple(&t).is_empty());
        t.jord.remove(&Delta::new(&r2, 4).unwrap());
        t.eps.single.remove(&Delta::new(&r2, 4).unwrap());
        assert!(validate_tempered_triple(&t).iter().any(|v| v.starts_with("4 core: odd number of blocks")));
        t.jord.insert(Delta::new(&r2, 4).unwrap(), 1);
        t.eps.single.insert(Delta::new(&r2, 4).unwrap(), Sign::Plus);
        t.eps.pairs.insert((a, b), Sign::Plus);
        assert!(validate_tempered_triple(&t).iter().any(|v| v.contains("3(c)") && v.contains("distinct rho")));
    }

    #[test]
    fn genericity() {
        let (c, r1, r2, _) = setup();
        let base = AdmissibleTriple::cuspidal(&c.cusp("s0").unwrap());
        let d = Delta::new(&r2, 2).unwrap();
        let mut p = TemperedParam {
            gammas: vec![],
            e_core: ETemperedParam { core: base, signed_deltas: vec![(d, Sign::Plus)] },
        };
        assert!(is_generic(&p).unwrap());
        p.e_core.signed_deltas[0].1 = Sign::Minus;
        assert!(!is_generic(&p).unwrap());
        let ng = TemperedParam::square_integrable(AdmissibleTriple::cuspidal(&c.cusp("s2").unwrap()));
        assert!(!is_generic(&ng).unwrap());
        let plain = add_pair(&AdmissibleTriple::cuspidal(&c.cusp("s0").unwrap()), &r1, 1, 3, Some(Sign::Plus)).unwrap();
        assert!(is_generic(&TemperedParam::square_integrable(plain)).unwrap());
    }
}
