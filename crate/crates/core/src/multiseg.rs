//! The ring R in the multisegment basis, its comultiplication m*, the
//! contragredient ˇ, the twisted comultiplication M*, and the action
//! M*(x) ⋊ s on formal classical terms.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jordan::AdmissibleTriple;
use crate::symbols::{Catalog, Cusp, HalfInt, Rho, Sign};

/// A formal ℤ-linear combination over an ordered basis. Zero coefficients
/// are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinComb<K: Ord>(BTreeMap<K, i64>);

impl<K: Ord> Default for LinComb<K> {
    fn default() -> Self {
        LinComb(BTreeMap::new())
    }
}

impl<K: Ord + Clone> LinComb<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(k: K) -> Self {
        let mut m = BTreeMap::new();
        m.insert(k, 1);
        LinComb(m)
    }

    pub fn add_term(&mut self, k: K, c: i64) {
        if c == 0 {
            return;
        }
        let e = self.0.entry(k.clone()).or_insert(0);
        *e += c;
        if *e == 0 {
            self.0.remove(&k);
        }
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (k, c) in &o.0 {
            self.add_term(k.clone(), *c);
        }
    }

    pub fn plus(&self, o: &Self) -> Self {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }

    pub fn scale(&self, c: i64) -> Self {
        if c == 0 {
            return Self::zero();
        }
        LinComb(self.0.iter().map(|(k, v)| (k.clone(), v * c)).collect())
    }

    pub fn coeff(&self, k: &K) -> i64 {
        self.0.get(k).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, i64)> {
        self.0.iter().map(|(k, c)| (k, *c))
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.0.keys()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Sum of coefficients.
    pub fn total(&self) -> i64 {
        self.0.values().sum()
    }

    pub fn filter(&self, mut keep: impl FnMut(&K) -> bool) -> Self {
        LinComb(self.0.iter().filter(|(k, _)| keep(k)).map(|(k, c)| (k.clone(), *c)).collect())
    }
}

impl<K: Ord + Clone> FromIterator<(K, i64)> for LinComb<K> {
    fn from_iter<I: IntoIterator<Item = (K, i64)>>(it: I) -> Self {
        let mut r = Self::zero();
        for (k, c) in it {
            r.add_term(k, c);
        }
        r
    }
}

/// A nonempty segment [ν^lo ρ, ν^hi ρ].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Segment {
    pub rho: Rho,
    pub lo: HalfInt,
    pub hi: HalfInt,
}

impl Segment {
    pub fn new(rho: Rho, lo: HalfInt, hi: HalfInt) -> Result<Segment> {
        let d = hi - lo;
        if !d.is_integer() || d.twice() < 0 {
            return Err(Error::InvalidSegment(format!(
                "[{lo}, {hi}] on `{rho}`: hi - lo must be a nonnegative integer"
            )));
        }
        Ok(Segment { rho, lo, hi })
    }

    /// δ(ρ,a) = [ν^{-(a-1)/2} ρ, ν^{(a-1)/2} ρ].
    pub fn delta(rho: Rho, a: i64) -> Result<Segment> {
        if a < 1 {
            return Err(Error::InvalidSegment(format!("δ({rho},{a}) needs a ≥ 1")));
        }
        let top = HalfInt::half_of_pred(a);
        Ok(Segment { rho, lo: -top, hi: top })
    }

    pub fn point(rho: Rho, x: HalfInt) -> Segment {
        Segment { rho, lo: x, hi: x }
    }

    /// Number of cuspidal points.
    pub fn len(&self) -> usize {
        ((self.hi - self.lo).twice() / 2 + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> impl Iterator<Item = HalfInt> + '_ {
        (0..self.len() as i64).map(move |k| self.lo + HalfInt::int(k))
    }

    pub fn contains(&self, x: HalfInt) -> bool {
        self.lo <= x && x <= self.hi && (x - self.lo).is_integer()
    }

    /// The segment is δ(ρ,a) for some a (centered).
    pub fn centered_length(&self) -> Option<i64> {
        (self.lo == -self.hi).then(|| self.len() as i64)
    }

    pub fn dual(&self) -> Result<Segment> {
        Ok(Segment { rho: self.rho.dual()?, lo: -self.hi, hi: -self.lo })
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d({};{}..{})", self.rho, self.lo, self.hi)
    }
}

/// A multiset of nonempty segments, kept sorted. The empty multiset is 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Multisegment(Vec<Segment>);

impl Multisegment {
    pub fn one() -> Multisegment {
        Multisegment(Vec::new())
    }

    pub fn new(mut segs: Vec<Segment>) -> Multisegment {
        segs.sort();
        Multisegment(segs)
    }

    pub fn single(s: Segment) -> Multisegment {
        Multisegment(vec![s])
    }

    /// [ν^lo ρ, ν^hi ρ] as a multisegment; the empty segment [x, x-1] gives 1.
    pub fn range(rho: &Rho, lo: HalfInt, hi: HalfInt) -> Result<Multisegment> {
        if hi - lo == HalfInt::int(-1) {
            return Ok(Multisegment::one());
        }
        Ok(Multisegment::single(Segment::new(rho.clone(), lo, hi)?))
    }

    pub fn segments(&self) -> &[Segment] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn times(&self, o: &Multisegment) -> Multisegment {
        if o.0.is_empty() {
            return self.clone();
        }
        if self.0.is_empty() {
            return o.clone();
        }
        let mut v = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < o.0.len() {
            if self.0[i] <= o.0[j] {
                v.push(self.0[i].clone());
                i += 1;
            } else {
                v.push(o.0[j].clone());
                j += 1;
            }
        }
        v.extend_from_slice(&self.0[i..]);
        v.extend_from_slice(&o.0[j..]);
        Multisegment(v)
    }

    /// Number of cuspidal points (the grading of R, in units of ρ).
    pub fn degree(&self) -> usize {
        self.0.iter().map(Segment::len).sum()
    }
}

impl fmt::Display for Multisegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" * ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl Multisegment {
    /// Parses `d(rho;lo..hi) * d(rho;lo..hi)` or `1`, resolving ids in `cat`.
    pub fn parse(s: &str, cat: &Catalog) -> Result<Multisegment> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(Multisegment::one());
        }
        let mut segs = Vec::new();
        for part in s.split('*') {
            segs.push(parse_segment(part, cat)?);
        }
        Ok(Multisegment::new(segs))
    }
}

pub fn parse_segment(s: &str, cat: &Catalog) -> Result<Segment> {
    let s = s.trim();
    let bad = || Error::Parse(format!("segment syntax is d(rho;lo..hi), got `{s}`"));
    let inner = s.strip_prefix("d(").and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
    let (id, range) = inner.split_once(';').ok_or_else(bad)?;
    let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
    let rho = cat.rho(id.trim())?;
    Segment::new(rho, HalfInt::from_str(lo)?, HalfInt::from_str(hi)?)
}

pub type RElement = LinComb<Multisegment>;
pub type RTensor = LinComb<(Multisegment, Multisegment)>;
pub type RTensor3 = LinComb<(Multisegment, Multisegment, Multisegment)>;
pub type RSElement = LinComb<(Multisegment, ClassicalTerm)>;

/// Multiset of cuspidal points ν^x ρ.
pub type Support = BTreeMap<(Rho, HalfInt), u32>;

/// Bilinear product on R.
pub fn times(x: &RElement, y: &RElement) -> RElement {
    let mut r = RElement::zero();
    for (a, c) in x.iter() {
        for (b, d) in y.iter() {
            r.add_term(a.times(b), c * d);
        }
    }
    r
}

/// Componentwise product on R ⊗ R.
pub fn tensor_times(x: &RTensor, y: &RTensor) -> RTensor {
    let mut r = RTensor::zero();
    for ((a1, a2), c) in x.iter() {
        for ((b1, b2), d) in y.iter() {
            r.add_term((a1.times(b1), a2.times(b2)), c * d);
        }
    }
    r
}

/// Segment-wise contragredient: [x,y]ˇ = [-y,-x] on ρˇ.
pub fn check_dual(m: &Multisegment) -> Result<Multisegment> {
    Ok(Multisegment::new(m.0.iter().map(Segment::dual).collect::<Result<_>>()?))
}

pub fn supp(m: &Multisegment) -> Support {
    let mut out = Support::new();
    for s in &m.0 {
        for x in s.points() {
            *out.entry((s.rho.clone(), x)).or_insert(0) += 1;
        }
    }
    out
}

/// m* on one segment: Σ_{i=x-1}^{y} δ([i+1,y]) ⊗ δ([x,i]).
pub fn m_star_segment(s: &Segment) -> RTensor {
    let mut r = RTensor::zero();
    let mut i = s.lo - HalfInt::ONE;
    while i <= s.hi {
        let upper = Multisegment::range(&s.rho, i + HalfInt::ONE, s.hi).expect("sub-segment");
        let lower = Multisegment::range(&s.rho, s.lo, i).expect("sub-segment");
        r.add_term((upper, lower), 1);
        i = i + HalfInt::ONE;
    }
    r
}

/// m*, extended multiplicatively from segments.
pub fn m_star(m: &Multisegment) -> RTensor {
    let mut r = RTensor::basis((Multisegment::one(), Multisegment::one()));
    for s in &m.0 {
        r = tensor_times(&r, &m_star_segment(s));
    }
    r
}

pub fn m_star_lin(x: &RElement) -> RTensor {
    let mut r = RTensor::zero();
    for (m, c) in x.iter() {
        r.add_assign(&m_star(m).scale(c));
    }
    r
}

/// (m* ⊗ 1) ∘ m*.
pub fn m_star_left(m: &Multisegment) -> RTensor3 {
    let mut r = RTensor3::zero();
    for ((a, b), c) in m_star(m).iter() {
        for ((a1, a2), d) in m_star(a).iter() {
            r.add_term((a1.clone(), a2.clone(), b.clone()), c * d);
        }
    }
    r
}

/// (1 ⊗ m*) ∘ m*.
pub fn m_star_right(m: &Multisegment) -> RTensor3 {
    let mut r = RTensor3::zero();
    for ((a, b), c) in m_star(m).iter() {
        for ((b1, b2), d) in m_star(b).iter() {
            r.add_term((a.clone(), b1.clone(), b2.clone()), c * d);
        }
    }
    r
}

/// M* = (m ⊗ 1) ∘ (ˇ ⊗ m*) ∘ κ ∘ m*.
pub fn m_star_twisted(m: &Multisegment) -> Result<RTensor> {
    let mut r = RTensor::zero();
    for ((a, b), c) in m_star(m).iter() {
        let bd = check_dual(b)?;
        for ((a1, a2), d) in m_star(a).iter() {
            r.add_term((bd.times(a1), a2.clone()), c * d);
        }
    }
    Ok(r)
}

/// The uncollected (i, j)-indexed terms
/// δ([-i,-x]) × δ([j+1,y]) ⊗ δ([i+1,j]), x-1 ≤ i ≤ j ≤ y, for one segment.
pub fn twisted_segment_terms(s: &Segment) -> Result<Vec<(Multisegment, Multisegment)>> {
    let dual = s.rho.dual()?;
    let (x, y) = (s.lo, s.hi);
    let mut out = Vec::new();
    let mut i = x - HalfInt::ONE;
    while i <= y {
        let left = Multisegment::range(&dual, -i, -x)?;
        let mut j = i;
        while j <= y {
            let a = left.times(&Multisegment::range(&s.rho, j + HalfInt::ONE, y)?);
            let b = Multisegment::range(&s.rho, i + HalfInt::ONE, j)?;
            out.push((a, b));
            j = j + HalfInt::ONE;
        }
        i = i + HalfInt::ONE;
    }
    Ok(out)
}

/// M* from the closed double sum, extended multiplicatively.
pub fn m_star_twisted_closed(m: &Multisegment) -> Result<RTensor> {
    let mut r = RTensor::basis((Multisegment::one(), Multisegment::one()));
    for s in &m.0 {
        let t: RTensor = twisted_segment_terms(s)?.into_iter().map(|k| (k, 1)).collect();
        r = tensor_times(&r, &t);
    }
    Ok(r)
}

/// The R ⊗ 1 part of M* on one selfdual segment:
/// Σ_{i=x-1}^{y} δ([-i,-x]) × δ([i+1,y]).
pub fn m_star_gl(s: &Segment) -> Result<RElement> {
    if !s.rho.is_selfdual() {
        return Err(Error::NotSelfdual(s.rho.id().to_string()));
    }
    let (x, y) = (s.lo, s.hi);
    let mut r = RElement::zero();
    let mut i = x - HalfInt::ONE;
    while i <= y {
        let a = Multisegment::range(&s.rho, -i, -x)?
            .times(&Multisegment::range(&s.rho, i + HalfInt::ONE, y)?);
        r.add_term(a, 1);
        i = i + HalfInt::ONE;
    }
    Ok(r)
}

/// A formal classical-group term.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ClassicalTerm {
    /// A cuspidal representation.
    Cusp(Cusp),
    /// The square-integrable representation with the given parameters.
    Discrete(Arc<AdmissibleTriple>),
    /// A constituent τ_{±1} of ρ ⋊ σ (reducing at 0).
    Tau { rho: Rho, cusp: Cusp, sign: Sign },
    /// δ([νρ, ν^top ρ]_{τ_sign}; σ), the unique irreducible subrepresentation
    /// of δ([νρ, ν^top ρ]) ⋊ τ_sign.
    LabeledDelta { rho: Rho, top: i64, sign: Sign, cusp: Cusp },
    /// An unevaluated m ⋊ base; `m` is never 1 and `base` never induced.
    Induced(Multisegment, Arc<ClassicalTerm>),
}

impl ClassicalTerm {
    /// m ⋊ self, flattening nested inductions.
    pub fn induce(&self, m: &Multisegment) -> ClassicalTerm {
        if m.is_one() {
            return self.clone();
        }
        match self {
            ClassicalTerm::Induced(inner, base) => ClassicalTerm::Induced(m.times(inner), base.clone()),
            other => ClassicalTerm::Induced(m.clone(), Arc::new(other.clone())),
        }
    }

    /// The partial cuspidal support reached at the bottom of the term.
    pub fn cusp(&self) -> Cusp {
        match self {
            ClassicalTerm::Cusp(c) => c.clone(),
            ClassicalTerm::Discrete(t) => t.cusp.clone(),
            ClassicalTerm::Tau { cusp, .. } | ClassicalTerm::LabeledDelta { cusp, .. } => cusp.clone(),
            ClassicalTerm::Induced(_, b) => b.cusp(),
        }
    }

    /// Number of cuspidal points above the partial cuspidal support.
    pub fn degree(&self) -> usize {
        match self {
            ClassicalTerm::Cusp(_) => 0,
            ClassicalTerm::Discrete(t) => t.degree(),
            ClassicalTerm::Tau { .. } => 1,
            ClassicalTerm::LabeledDelta { top, .. } => *top as usize + 1,
            ClassicalTerm::Induced(m, b) => m.degree() + b.degree(),
        }
    }
}

impl fmt::Display for ClassicalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassicalTerm::Cusp(c) => write!(f, "{c}"),
            ClassicalTerm::Discrete(t) => write!(f, "{t}"),
            ClassicalTerm::Tau { rho, cusp, sign } => write!(f, "tau{sign}({rho};{cusp})"),
            ClassicalTerm::LabeledDelta { rho, top, sign, cusp } => {
                write!(f, "d({rho};1..{top})_tau{sign}({cusp})")
            }
            ClassicalTerm::Induced(m, b) => write!(f, "{m} |x {b}"),
        }
    }
}

/// Renders `c A (x) B` lines, one per term, in canonical order.
pub fn render_tensor(t: &RTensor) -> String {
    let mut s = String::new();
    for ((a, b), c) in t.iter() {
        s.push_str(&format!("{c} {a} (x) {b}\n"));
    }
    s
}

pub fn render_rs(e: &RSElement) -> String {
    let mut s = String::new();
    for ((a, b), c) in e.iter() {
        s.push_str(&format!("{c} {a} (x) {b}\n"));
    }
    s
}

/// M*(x) ⋊ s: each a ⊗ b of M*(x) against each c ⊗ σ of s gives
/// (a × c) ⊗ (b ⋊ σ). Aborts once more than `limit` distinct terms exist.
pub fn mu_star_action_limited(x: &RElement, s: &RSElement, limit: usize) -> Result<RSElement> {
    let mut r = RSElement::zero();
    for (m, cx) in x.iter() {
        let mm = m_star_twisted_closed(m)?;
        for ((a, b), cm) in mm.iter() {
            for ((c, sigma), cs) in s.iter() {
                r.add_term((a.times(c), sigma.induce(b)), cx * cm * cs);
                if r.len() > limit {
                    return Err(Error::TooManyTerms { count: r.len(), limit });
                }
            }
        }
    }
    Ok(r)
}

pub const DEFAULT_MAX_TERMS: usize = 1_000_000;

pub fn mu_star_action(x: &RElement, s: &RSElement) -> Result<RSElement> {
    mu_star_action_limited(x, s, DEFAULT_MAX_TERMS)
}

/// Total degree of a term: GL points plus classical points.
pub fn rs_degree(k: &(Multisegment, ClassicalTerm)) -> usize {
    k.0.degree() + k.1.degree()
}
