//! Ground alphabet: half-integer exponents, cuspidal symbols of general
//! linear groups with their (J1) parity, and cuspidal symbols of classical
//! groups with their Jordan blocks.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of ½ℤ, stored as twice its value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };

    pub const fn from_twice(twice: i64) -> Self {
        HalfInt { twice }
    }

    pub const fn int(n: i64) -> Self {
        HalfInt { twice: 2 * n }
    }

    /// (n-1)/2, the top exponent of δ(ρ,n).
    pub const fn half_of_pred(n: i64) -> Self {
        HalfInt { twice: n - 1 }
    }

    pub const fn twice(self) -> i64 {
        self.twice
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub const fn is_half_odd(self) -> bool {
        self.twice % 2 != 0
    }

    /// The integer value, if any.
    pub const fn to_int(self) -> Option<i64> {
        if self.is_integer() {
            Some(self.twice / 2)
        } else {
            None
        }
    }

    /// 2x+1, the Jordan block attached to the point ν^x.
    pub const fn block(self) -> i64 {
        self.twice + 1
    }

    pub fn abs(self) -> Self {
        HalfInt { twice: self.twice.abs() }
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice + o.twice }
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice - o.twice }
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { twice: -self.twice }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl fmt::Debug for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts `n`, `p/2` and `p/1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a half-integer: `{s}`"));
        match s.split_once('/') {
            None => s.parse::<i64>().map(HalfInt::int).map_err(|_| bad()),
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| bad())?;
                match q.trim() {
                    "1" => Ok(HalfInt::int(p)),
                    "2" => Ok(HalfInt::from_twice(p)),
                    _ => Err(bad()),
                }
            }
        }
    }
}

/// A value in {+1, −1}.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn from_i64(v: i64) -> Result<Sign> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::Parse(format!("sign must be 1 or -1, got {v}"))),
        }
    }

    pub fn to_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn both() -> [Sign; 2] {
        [Sign::Plus, Sign::Minus]
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, o: Sign) -> Sign {
        if self == o {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Parity forced on Jordan blocks by (J1).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn matches(self, a: i64) -> bool {
        match self {
            Parity::Even => a % 2 == 0,
            Parity::Odd => a % 2 != 0,
        }
    }

    /// Smallest positive integer of this parity.
    pub fn floor(self) -> i64 {
        match self {
            Parity::Even => 2,
            Parity::Odd => 1,
        }
    }
}

/// A cuspidal symbol ρ of a general linear group.
#[derive(Clone, Debug)]
pub struct GLCuspidal {
    pub id: String,
    pub selfdual: bool,
    pub parity: Parity,
    pub dim: Option<u32>,
    /// Declared partner ρˇ of a non-selfdual symbol.
    pub dual: Option<String>,
}

/// Shared handle to a [`GLCuspidal`]; equality and order go by id.
#[derive(Clone)]
pub struct Rho(Arc<GLCuspidal>);

impl Rho {
    pub fn new(sym: GLCuspidal) -> Rho {
        Rho(Arc::new(sym))
    }

    pub fn selfdual(id: &str, parity: Parity) -> Rho {
        Rho::new(GLCuspidal { id: id.to_string(), selfdual: true, parity, dim: None, dual: None })
    }

    /// A non-selfdual symbol together with its declared partner.
    pub fn dual_pair(id: &str, partner: &str) -> (Rho, Rho) {
        let mk = |a: &str, b: &str| {
            Rho::new(GLCuspidal {
                id: a.to_string(),
                selfdual: false,
                parity: Parity::Odd,
                dim: None,
                dual: Some(b.to_string()),
            })
        };
        (mk(id, partner), mk(partner, id))
    }

    pub fn id(&self) -> &str {
        &self.0.id
    }

    pub fn is_selfdual(&self) -> bool {
        self.0.selfdual
    }

    pub fn symbol(&self) -> &GLCuspidal {
        &self.0
    }

    /// Parity, consulted only for selfdual symbols.
    pub fn parity(&self) -> Result<Parity> {
        if self.0.selfdual {
            Ok(self.0.parity)
        } else {
            Err(Error::NotSelfdual(self.0.id.clone()))
        }
    }

    /// The contragredient symbol ρˇ.
    pub fn dual(&self) -> Result<Rho> {
        if self.0.selfdual {
            return Ok(self.clone());
        }
        match &self.0.dual {
            Some(p) => Ok(Rho::new(GLCuspidal {
                id: p.clone(),
                selfdual: false,
                parity: self.0.parity,
                dim: self.0.dim,
                dual: Some(self.0.id.clone()),
            })),
            None => Err(Error::DualUnknown(self.0.id.clone())),
        }
    }
}

impl PartialEq for Rho {
    fn eq(&self, o: &Rho) -> bool {
        Arc::ptr_eq(&self.0, &o.0) || self.0.id == o.0.id
    }
}
impl Eq for Rho {}
impl PartialOrd for Rho {
    fn partial_cmp(&self, o: &Rho) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Rho {
    fn cmp(&self, o: &Rho) -> Ordering {
        self.0.id.cmp(&o.0.id)
    }
}
impl Hash for Rho {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.0.id.hash(h)
    }
}
impl fmt::Debug for Rho {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.id)
    }
}
impl fmt::Display for Rho {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.id)
    }
}

/// (J1): Even parity forces even blocks, Odd parity odd blocks.
pub fn j1_satisfied(rho: &Rho, a: i64) -> Result<bool> {
    Ok(a >= 1 && rho.parity()?.matches(a))
}

/// A cuspidal symbol of a classical group.
#[derive(Clone, Debug)]
pub struct ClassicalCuspidal {
    pub id: String,
    pub jord_cusp: BTreeMap<Rho, BTreeSet<i64>>,
    pub generic: Option<bool>,
}

impl ClassicalCuspidal {
    /// Checks the (J1) parity and selfduality of the cuspidal blocks.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (rho, set) in &self.jord_cusp {
            if !rho.is_selfdual() {
                out.push(format!("cusp `{}`: block key `{}` is not selfdual", self.id, rho));
                continue;
            }
            if set.is_empty() {
                out.push(format!("cusp `{}`: empty block set for `{}`", self.id, rho));
            }
            for &a in set {
                if !j1_satisfied(rho, a).unwrap_or(false) {
                    out.push(format!("cusp `{}`: block ({},{}) violates (J1) parity", self.id, rho, a));
                }
            }
        }
        out
    }
}

/// Shared handle to a [`ClassicalCuspidal`]; equality and order go by id.
#[derive(Clone)]
pub struct Cusp(Arc<ClassicalCuspidal>);

impl Cusp {
    pub fn new(c: ClassicalCuspidal) -> Result<Cusp> {
        let v = c.violations();
        if !v.is_empty() {
            return Err(Error::Catalog(v.join("; ")));
        }
        Ok(Cusp(Arc::new(c)))
    }

    pub fn id(&self) -> &str {
        &self.0.id
    }

    pub fn data(&self) -> &ClassicalCuspidal {
        &self.0
    }

    pub fn generic(&self) -> Option<bool> {
        self.0.generic
    }

    /// Jord_ρ(π_cusp), empty when absent.
    pub fn jord(&self, rho: &Rho) -> BTreeSet<i64> {
        self.0.jord_cusp.get(rho).cloned().unwrap_or_default()
    }

    pub fn has_blocks(&self, rho: &Rho) -> bool {
        self.0.jord_cusp.get(rho).is_some_and(|s| !s.is_empty())
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&Rho, &BTreeSet<i64>)> {
        self.0.jord_cusp.iter()
    }
}

impl PartialEq for Cusp {
    fn eq(&self, o: &Cusp) -> bool {
        Arc::ptr_eq(&self.0, &o.0) || self.0.id == o.0.id
    }
}
impl Eq for Cusp {}
impl PartialOrd for Cusp {
    fn partial_cmp(&self, o: &Cusp) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cusp {
    fn cmp(&self, o: &Cusp) -> Ordering {
        self.0.id.cmp(&o.0.id)
    }
}
impl Hash for Cusp {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.0.id.hash(h)
    }
}
impl fmt::Debug for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.id)
    }
}
impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.id)
    }
}

/// a_max of the basic assumption: max Jord_ρ(π_c), else 0 (Even) or −1 (Odd).
pub fn a_max(pc: &Cusp, rho: &Rho) -> Result<i64> {
    let parity = rho.parity()?;
    Ok(match pc.jord(rho).iter().next_back() {
        Some(&m) => m,
        None => match parity {
            Parity::Even => 0,
            Parity::Odd => -1,
        },
    })
}

/// (1 + a_max)/2, the nonnegative exponent where ν^x ρ ⋊ π_c reduces.
pub fn cuspidal_reducibility_exponent(pc: &Cusp, rho: &Rho) -> Result<HalfInt> {
    Ok(HalfInt::from_twice(1 + a_max(pc, rho)?))
}

#[derive(Serialize, Deserialize)]
struct GlWire {
    id: String,
    selfdual: bool,
    #[serde(default = "odd")]
    parity: Parity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<u32>,
}

fn odd() -> Parity {
    Parity::Odd
}

#[derive(Serialize, Deserialize)]
struct ClassicalWire {
    id: String,
    #[serde(default)]
    jord: BTreeMap<String, Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generic: Option<bool>,
}

#[derive(Serialize, Deserialize)]
struct CatalogWire {
    #[serde(default)]
    gl: Vec<GlWire>,
    #[serde(default)]
    classical: Vec<ClassicalWire>,
    #[serde(default)]
    dual_pairs: Vec<(String, String)>,
}

/// Symbol tables loaded from one JSON file.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    gl: BTreeMap<String, Rho>,
    classical: BTreeMap<String, Cusp>,
}

impl Catalog {
    pub fn from_json_str(s: &str) -> Result<Catalog> {
        let w: CatalogWire =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("catalog: {e}")))?;
        let mut partner: BTreeMap<String, String> = BTreeMap::new();
        for (a, b) in &w.dual_pairs {
            for (x, y) in [(a, b), (b, a)] {
                if let Some(prev) = partner.insert(x.clone(), y.clone()) {
                    if &prev != y {
                        return Err(Error::Catalog(format!(
                            "dual_pairs is not an involution at `{x}`"
                        )));
                    }
                }
            }
        }
        let mut gl = BTreeMap::new();
        for g in w.gl {
            if gl.contains_key(&g.id) {
                return Err(Error::Catalog(format!("duplicate gl id `{}`", g.id)));
            }
            let dual = partner.get(&g.id).cloned();
            if g.selfdual && dual.as_ref().is_some_and(|d| d != &g.id) {
                return Err(Error::Catalog(format!("selfdual `{}` has a distinct dual partner", g.id)));
            }
            let sym = GLCuspidal {
                id: g.id.clone(),
                selfdual: g.selfdual,
                parity: g.parity,
                dim: g.dim,
                dual: if g.selfdual { None } else { dual },
            };
            gl.insert(g.id, Rho::new(sym));
        }
        for (x, y) in &partner {
            for id in [x, y] {
                match gl.get(id) {
                    None => return Err(Error::Catalog(format!("dual_pairs names unknown `{id}`"))),
                    Some(r) if r.is_selfdual() && x != y => {
                        return Err(Error::Catalog(format!("dual_pairs names selfdual `{id}`")))
                    }
                    _ => {}
                }
            }
        }
        let mut classical = BTreeMap::new();
        for c in w.classical {
            let mut jord_cusp = BTreeMap::new();
            for (rid, blocks) in c.jord {
                let rho = gl
                    .get(&rid)
                    .cloned()
                    .ok_or_else(|| Error::UnknownSymbol(rid.clone()))?;
                let set: BTreeSet<i64> = blocks.iter().copied().collect();
                if set.len() != blocks.len() {
                    return Err(Error::Catalog(format!("cusp `{}`: repeated block for `{rid}`", c.id)));
                }
                if !set.is_empty() {
                    jord_cusp.insert(rho, set);
                }
            }
            let cusp = Cusp::new(ClassicalCuspidal { id: c.id.clone(), jord_cusp, generic: c.generic })?;
            if classical.insert(c.id.clone(), cusp).is_some() {
                return Err(Error::Catalog(format!("duplicate classical id `{}`", c.id)));
            }
        }
        Ok(Catalog { gl, classical })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let gl: Vec<GlWire> = self
            .gl
            .values()
            .map(|r| GlWire {
                id: r.id().to_string(),
                selfdual: r.is_selfdual(),
                parity: r.symbol().parity,
                dim: r.symbol().dim,
            })
            .collect();
        let classical: Vec<ClassicalWire> = self
            .classical
            .values()
            .map(|c| ClassicalWire {
                id: c.id().to_string(),
                jord: c
                    .blocks()
                    .map(|(r, s)| (r.id().to_string(), s.iter().copied().collect()))
                    .collect(),
                generic: c.generic(),
            })
            .collect();
        let dual_pairs: Vec<(String, String)> = self
            .gl
            .values()
            .filter_map(|r| {
                let d = r.symbol().dual.clone()?;
                (r.id() < d.as_str()).then(|| (r.id().to_string(), d))
            })
            .collect();
        serde_json::to_value(CatalogWire { gl, classical, dual_pairs }).expect("catalog serializes")
    }

    pub fn rho(&self, id: &str) -> Result<Rho> {
        self.gl.get(id).cloned().ok_or_else(|| Error::UnknownSymbol(id.to_string()))
    }

    pub fn cusp(&self, id: &str) -> Result<Cusp> {
        self.classical.get(id).cloned().ok_or_else(|| Error::UnknownSymbol(id.to_string()))
    }

    pub fn rhos(&self) -> impl Iterator<Item = &Rho> {
        self.gl.values()
    }

    pub fn selfdual_rhos(&self) -> Vec<Rho> {
        self.gl.values().filter(|r| r.is_selfdual()).cloned().collect()
    }

    pub fn cusps(&self) -> impl Iterator<Item = &Cusp> {
        self.classical.values()
    }

    /// A small catalog used by tests and the random-instance generators:
    /// an odd and an even selfdual symbol, a non-selfdual pair, and cusps
    /// with and without blocks.
    pub fn sample() -> Catalog {
        Catalog::from_json_str(SAMPLE_CATALOG).expect("sample catalog is valid")
    }
}

pub const SAMPLE_CATALOG: &str = r#"{
  "gl": [
    {"id": "r1", "selfdual": true, "parity": "odd"},
    {"id": "r2", "selfdual": true, "parity": "even"},
    {"id": "u", "selfdual": false},
    {"id": "uc", "selfdual": false}
  ],
  "dual_pairs": [["u", "uc"]],
  "classical": [
    {"id": "s0", "jord": {}, "generic": true},
    {"id": "s1", "jord": {"r1": [1]}, "generic": true},
    {"id": "s2", "jord": {"r1": [1, 3], "r2": [2]}, "generic": false}
  ]
}"#;
