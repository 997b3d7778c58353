//! Brute-force recomputation of `μ`, `μ_M`, `μ_{U_P}` and `ν_M` for block
//! upper triangular `g ∈ GL_n(Q_p)`, by enumerating compact open subgroups
//! modulo a congruence subgroup of depth `r`.
//!
//! Scalars carry explicit precision; a membership question that the available
//! digits cannot settle is an error, never a guess. Entries that vanish for
//! structural reasons (below the block diagonal of `P`, or outside `U_P` for a
//! conjugate of a unipotent element) are not tested.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::levi::LeviDatum;
use crate::rootdata::{LeviSubset, RootDatum, RootDatumSpec};
use crate::weyl::{Geometry, ParamMap};

/// Absolute precision assigned to exact zeros.
const EXACT: i64 = 1 << 40;
/// Largest admissible enumeration.
pub const MAX_ENUM: u64 = 1 << 24;
/// Largest congruence depth tried by the automatic search.
pub const MAX_DEPTH: u32 = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PadicError {
    #[error("insufficient precision: {0}")]
    Undecidable(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("oracle configuration: {0}")]
    Config(String),
    #[error("congruence subgroup of depth {0} is not preserved by conjugation")]
    Validation(u32),
    #[error("cannot parse {0}")]
    Parse(String),
    #[error("identity failed: {0}")]
    Identity(String),
}

fn pow(p: u64, e: u32) -> u64 {
    p.checked_pow(e).expect("p-power fits in u64")
}

fn vp(p: u64, mut x: u128) -> (u32, u128) {
    let mut v = 0;
    while x.is_multiple_of(p as u128) {
        x /= p as u128;
        v += 1;
    }
    (v, x)
}

fn mod_inv(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m as i128) as u64)
}

/// `p^val·(unit + O(p^prec))`; with `prec = 0` the value is only known to lie
/// in `p^val·Z_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedPadic {
    p: u64,
    val: i64,
    unit: u64,
    prec: u32,
}

impl TruncatedPadic {
    pub fn zero(p: u64) -> TruncatedPadic {
        TruncatedPadic { p, val: EXACT, unit: 0, prec: 0 }
    }

    /// An integer known to relative precision `k`.
    pub fn from_int(p: u64, x: i128, k: u32) -> TruncatedPadic {
        if x == 0 {
            return TruncatedPadic::zero(p);
        }
        let (v, u) = vp(p, x.unsigned_abs());
        let m = pow(p, k) as i128;
        let signed = if x < 0 { -(u as i128) } else { u as i128 };
        TruncatedPadic { p, val: v as i64, unit: signed.rem_euclid(m) as u64, prec: k }
    }

    /// `x / p^t`.
    pub fn from_ratio(p: u64, x: i128, t: u32, k: u32) -> TruncatedPadic {
        let mut a = TruncatedPadic::from_int(p, x, k);
        if a.prec > 0 {
            a.val -= t as i64;
        }
        a
    }

    pub fn p_power(p: u64, e: i64, k: u32) -> TruncatedPadic {
        TruncatedPadic { p, val: e, unit: 1 % pow(p, k), prec: k }
    }

    pub fn one(p: u64, k: u32) -> TruncatedPadic {
        TruncatedPadic::p_power(p, 0, k)
    }

    /// Absolute precision: the value is known modulo `p^abs`.
    pub fn abs_prec(&self) -> i64 {
        self.val + self.prec as i64
    }

    pub fn is_known_nonzero(&self) -> bool {
        self.prec > 0
    }

    pub fn is_exact_zero(&self) -> bool {
        self.prec == 0 && self.val >= EXACT
    }

    /// The valuation when the value is known to be nonzero.
    pub fn valuation(&self) -> Option<i64> {
        self.is_known_nonzero().then_some(self.val)
    }

    fn capped(mut self) -> TruncatedPadic {
        if self.prec == 0 {
            self.val = self.val.min(EXACT);
        }
        self
    }

    pub fn mul(&self, b: &TruncatedPadic) -> TruncatedPadic {
        let val = self.val.saturating_add(b.val);
        if self.prec == 0 || b.prec == 0 {
            return TruncatedPadic { p: self.p, val, unit: 0, prec: 0 }.capped();
        }
        let prec = self.prec.min(b.prec);
        let m = pow(self.p, prec) as u128;
        let unit = ((self.unit as u128 % m) * (b.unit as u128 % m) % m) as u64;
        TruncatedPadic { p: self.p, val, unit, prec }
    }

    pub fn add(&self, b: &TruncatedPadic) -> TruncatedPadic {
        let p = self.p;
        let abs = self.abs_prec().min(b.abs_prec()).min(EXACT);
        if abs >= EXACT {
            return TruncatedPadic::zero(p);
        }
        let m = self.val.min(b.val);
        let width = abs - m;
        if width <= 0 {
            return TruncatedPadic { p, val: abs, unit: 0, prec: 0 };
        }
        let modulus = pow(p, width as u32) as u128;
        let lift = |x: &TruncatedPadic| -> u128 {
            if x.prec == 0 || x.val - m >= width {
                0
            } else {
                (x.unit as u128 % modulus) * pow(p, (x.val - m) as u32) as u128 % modulus
            }
        };
        let s = (lift(self) + lift(b)) % modulus;
        if s == 0 {
            return TruncatedPadic { p, val: abs, unit: 0, prec: 0 };
        }
        let (v, u) = vp(p, s);
        TruncatedPadic { p, val: m + v as i64, unit: u as u64, prec: width as u32 - v }
    }

    pub fn neg(&self) -> TruncatedPadic {
        if self.prec == 0 {
            return *self;
        }
        let m = pow(self.p, self.prec);
        TruncatedPadic { unit: (m - self.unit) % m, ..*self }
    }

    pub fn sub(&self, b: &TruncatedPadic) -> TruncatedPadic {
        self.add(&b.neg())
    }

    pub fn inv(&self) -> Result<TruncatedPadic, PadicError> {
        if self.prec == 0 {
            return Err(PadicError::NotInvertible(format!("{self}")));
        }
        let unit = mod_inv(self.unit, pow(self.p, self.prec)).expect("units are invertible");
        Ok(TruncatedPadic { p: self.p, val: -self.val, unit, prec: self.prec })
    }

    /// Whether the valuation is at least `j`, if the digits decide it.
    pub fn val_at_least(&self, j: i64) -> Result<bool, PadicError> {
        if self.prec > 0 {
            Ok(self.val >= j)
        } else if self.val >= j {
            Ok(true)
        } else {
            Err(PadicError::Undecidable(format!("is {self} in p^{j}Z_p?")))
        }
    }

    /// The residue modulo `p^r` of an element of `Z_p`.
    pub fn residue(&self, r: u32) -> Result<u64, PadicError> {
        if self.abs_prec() < r as i64 {
            return Err(PadicError::Undecidable(format!("{self} modulo p^{r}")));
        }
        if self.prec == 0 || self.val >= r as i64 {
            return Ok(0);
        }
        if self.val < 0 {
            return Err(PadicError::Identity(format!("{self} is not integral")));
        }
        let m = pow(self.p, r) as u128;
        Ok((self.unit as u128 * pow(self.p, self.val as u32) as u128 % m) as u64)
    }
}

impl fmt::Display for TruncatedPadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact_zero() {
            write!(f, "0")
        } else if self.prec == 0 {
            write!(f, "O({}^{})", self.p, self.val)
        } else {
            write!(f, "{}^{}*{} + O({}^{})", self.p, self.val, self.unit, self.p, self.abs_prec())
        }
    }
}

/// A square matrix over truncated p-adics, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PMat {
    n: usize,
    a: Vec<TruncatedPadic>,
}

impl PMat {
    pub fn identity(n: usize, p: u64, k: u32) -> PMat {
        let mut a = vec![TruncatedPadic::zero(p); n * n];
        for i in 0..n {
            a[i * n + i] = TruncatedPadic::one(p, k);
        }
        PMat { n, a }
    }

    /// Lifts an integer residue matrix.
    pub fn from_ints(n: usize, p: u64, k: u32, entries: &[u64]) -> PMat {
        PMat { n, a: entries.iter().map(|&x| TruncatedPadic::from_int(p, x as i128, k)).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncatedPadic {
        &self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: TruncatedPadic) {
        self.a[i * self.n + j] = x;
    }

    pub fn mul(&self, b: &PMat) -> PMat {
        let n = self.n;
        let p = self.a[0].p;
        let mut out = vec![TruncatedPadic::zero(p); n * n];
        for i in 0..n {
            for k in 0..n {
                let x = &self.a[i * n + k];
                if x.is_exact_zero() {
                    continue;
                }
                for j in 0..n {
                    let y = &b.a[k * n + j];
                    if y.is_exact_zero() {
                        continue;
                    }
                    out[i * n + j] = out[i * n + j].add(&x.mul(y));
                }
            }
        }
        PMat { n, a: out }
    }

    /// Gauss–Jordan with a pivot of least valuation in each column.
    pub fn inverse(&self, k: u32) -> Result<PMat, PadicError> {
        let n = self.n;
        let p = self.a[0].p;
        let mut m = self.clone();
        let mut inv = PMat::identity(n, p, k);
        for c in 0..n {
            let piv = (c..n)
                .filter_map(|r| m.get(r, c).valuation().map(|v| (v, r)))
                .min()
                .map(|(_, r)| r)
                .ok_or_else(|| PadicError::NotInvertible(format!("no pivot in column {c}")))?;
            m.a.swap_range(n, piv, c);
            inv.a.swap_range(n, piv, c);
            let d = m.get(c, c).inv()?;
            for j in 0..n {
                let x = m.get(c, j).mul(&d);
                m.set(c, j, x);
                let y = inv.get(c, j).mul(&d);
                inv.set(c, j, y);
            }
            for r in 0..n {
                if r == c || m.get(r, c).is_exact_zero() {
                    continue;
                }
                let f = *m.get(r, c);
                for j in 0..n {
                    let x = m.get(r, j).sub(&f.mul(m.get(c, j)));
                    m.set(r, j, x);
                    let y = inv.get(r, j).sub(&f.mul(inv.get(c, j)));
                    inv.set(r, j, y);
                }
            }
        }
        Ok(inv)
    }

    /// Largest `|val|` among the known-nonzero entries.
    pub fn max_shift(&self) -> i64 {
        self.a.iter().filter_map(|x| x.valuation()).map(i64::abs).max().unwrap_or(0)
    }
}

trait SwapRows {
    fn swap_range(&mut self, n: usize, a: usize, b: usize);
}

impl SwapRows for Vec<TruncatedPadic> {
    fn swap_range(&mut self, n: usize, a: usize, b: usize) {
        if a != b {
            for j in 0..n {
                self.swap(a * n + j, b * n + j);
            }
        }
    }
}

impl fmt::Display for PMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).to_string()).collect::<Vec<_>>().join(", "))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

/// Constraint on one matrix entry of a compact open subgroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    /// `1 + pZ_p`.
    DiagUnit,
    /// `Z_p`.
    Int,
    /// `pZ_p`.
    PInt,
    /// Exactly 1 by structure.
    One,
    /// Exactly 0 by structure.
    Zero,
}

/// The three groups attached to `Γ = I_1 ∩ P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    /// `Γ` itself.
    Gamma,
    /// `Γ_M = Γ ∩ M`.
    GammaM,
    /// `Γ_{U_P} = Γ ∩ U_P`.
    GammaU,
}

/// Oracle parameters for `GL_n` with `P` given by its block sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub n: usize,
    pub p: u64,
    /// Relative precision in digits; chosen from the element when absent.
    pub k: Option<u32>,
    /// Congruence depth; the least validated depth when absent.
    pub r: Option<u32>,
    pub blocks: Vec<usize>,
}

impl OracleConfig {
    pub fn borel(n: usize, p: u64) -> OracleConfig {
        OracleConfig { n, p, k: None, r: None, blocks: vec![1; n] }
    }

    pub fn validate(&self) -> Result<(), PadicError> {
        if self.n == 0 || self.n > 4 {
            return Err(PadicError::Config(format!("matrix size {} outside 1..=4", self.n)));
        }
        if self.blocks.iter().sum::<usize>() != self.n || self.blocks.contains(&0) {
            return Err(PadicError::Config(format!("blocks {:?} do not partition {}", self.blocks, self.n)));
        }
        if ParamMap::equal(self.p, 1).is_err() {
            return Err(PadicError::Config(format!("{} is not prime", self.p)));
        }
        if let Some(k) = self.k {
            if (self.p as f64).powi(k as i32) > 2f64.powi(62) {
                return Err(PadicError::Config(format!("p^k = {}^{k} exceeds 2^62", self.p)));
            }
        }
        Ok(())
    }

    fn block_of(&self) -> Vec<usize> {
        self.blocks.iter().enumerate().flat_map(|(b, &s)| std::iter::repeat_n(b, s)).collect()
    }

    pub fn entry_kind(&self, kind: GroupKind, i: usize, j: usize) -> EntryKind {
        let bl = self.block_of();
        let same = bl[i] == bl[j];
        match kind {
            GroupKind::Gamma | GroupKind::GammaM => {
                if same {
                    match i.cmp(&j) {
                        std::cmp::Ordering::Equal => EntryKind::DiagUnit,
                        std::cmp::Ordering::Less => EntryKind::Int,
                        std::cmp::Ordering::Greater => EntryKind::PInt,
                    }
                } else if i < j && kind == GroupKind::Gamma {
                    EntryKind::Int
                } else {
                    EntryKind::Zero
                }
            }
            GroupKind::GammaU => {
                if i == j {
                    EntryKind::One
                } else if !same && i < j {
                    EntryKind::Int
                } else {
                    EntryKind::Zero
                }
            }
        }
    }

    /// The Levi of `GL_n` with these blocks.
    pub fn levi(&self, rd: &RootDatum) -> LeviSubset {
        let bl = self.block_of();
        let idx: Vec<usize> = (0..self.n - 1).filter(|&j| bl[j] == bl[j + 1]).collect();
        LeviSubset::new(rd, &idx).expect("block Levi is valid")
    }
}

/// Exact upper unitriangular entries `num / p^den_exp`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnipotentRep {
    pub n: usize,
    pub entries: Vec<((usize, usize), i128, u32)>,
}

impl UnipotentRep {
    /// Parses `u12=1/p,u13=3/p^2,u23=5` (indices from 1).
    pub fn parse(n: usize, s: &str) -> Result<UnipotentRep, PadicError> {
        let mut entries = Vec::new();
        for part in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let err = || PadicError::Parse(format!("unipotent entry '{part}'"));
            let (key, val) = part.split_once('=').ok_or_else(err)?;
            let digits: Vec<u32> =
                key.trim().strip_prefix('u').ok_or_else(err)?.chars().filter_map(|c| c.to_digit(10)).collect();
            if digits.len() != 2 {
                return Err(err());
            }
            let (i, j) = (digits[0] as usize - 1, digits[1] as usize - 1);
            if i >= j || j >= n {
                return Err(err());
            }
            let (num, den) = match val.split_once('/') {
                Some((a, b)) => {
                    let t = match b.trim() {
                        "p" => 1,
                        other => other.strip_prefix("p^").and_then(|e| e.parse().ok()).ok_or_else(err)?,
                    };
                    (a.trim().parse::<i128>().map_err(|_| err())?, t)
                }
                None => (val.trim().parse::<i128>().map_err(|_| err())?, 0),
            };
            entries.push(((i, j), num, den));
        }
        Ok(UnipotentRep { n, entries })
    }

    pub fn to_pmat(&self, p: u64, k: u32) -> PMat {
        let mut m = PMat::identity(self.n, p, k);
        for &((i, j), num, den) in &self.entries {
            m.set(i, j, TruncatedPadic::from_ratio(p, num, den, k));
        }
        m
    }

    /// Largest denominator exponent.
    pub fn max_den(&self) -> u32 {
        self.entries.iter().map(|e| e.2).max().unwrap_or(0)
    }
}

/// Parses `diag(p^1,p^-1,1)` into exponents.
pub fn parse_diag(s: &str) -> Result<Vec<i64>, PadicError> {
    let err = || PadicError::Parse(format!("diagonal '{s}'"));
    let inner = s.trim().strip_prefix("diag(").and_then(|x| x.strip_suffix(')')).ok_or_else(err)?;
    inner
        .split(',')
        .map(|t| match t.trim() {
            "1" => Ok(0),
            "p" => Ok(1),
            other => other.strip_prefix("p^").and_then(|e| e.parse().ok()).ok_or_else(err),
        })
        .collect()
}

/// A test element `g = g_M·g_U` with `g_M = diag(p^{a_1},…,p^{a_n})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestElement {
    pub diag: Vec<i64>,
    pub unipotent: UnipotentRep,
}

impl TestElement {
    pub fn diagonal(diag: Vec<i64>) -> TestElement {
        let n = diag.len();
        TestElement { diag, unipotent: UnipotentRep { n, entries: Vec::new() } }
    }

    /// A bound on the valuations met when conjugating by this element.
    pub fn shift(&self) -> i64 {
        let hi = self.diag.iter().copied().max().unwrap_or(0);
        let lo = self.diag.iter().copied().min().unwrap_or(0);
        hi.abs().max(lo.abs()) + (hi - lo) + self.unipotent.max_den() as i64 * self.diag.len() as i64
    }

    pub fn to_pmat(&self, p: u64, k: u32) -> PMat {
        let n = self.diag.len();
        let mut gm = PMat::identity(n, p, k);
        for (i, &a) in self.diag.iter().enumerate() {
            gm.set(i, i, TruncatedPadic::p_power(p, a, k));
        }
        gm.mul(&self.unipotent.to_pmat(p, k))
    }
}

/// One enumerated index `[H : H_(g)]` with the sizes behind it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexCount {
    pub index: u64,
    pub enumerated: u64,
    pub stabilizer: u64,
}

/// The four quantities of the double-coset identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleCosetReport {
    pub mu_total: u64,
    pub mu_m: u64,
    pub nu_m: u64,
    pub mu_u: u64,
    pub cosets: u64,
    pub disjoint: bool,
    pub r: u32,
    pub k: u32,
}

/// `g` together with its projection `g_M`, inverses and the chosen depths.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub cfg: OracleConfig,
    pub g: PMat,
    pub g_inv: PMat,
    pub gm: PMat,
    pub gm_inv: PMat,
    pub r: u32,
    pub k: u32,
}

impl Prepared {
    pub fn new(cfg: &OracleConfig, elt: &TestElement) -> Result<Prepared, PadicError> {
        cfg.validate()?;
        if elt.diag.len() != cfg.n || elt.unipotent.n != cfg.n {
            return Err(PadicError::Config("element size does not match the configuration".into()));
        }
        let bl = cfg.block_of();
        for &((i, j), _, _) in &elt.unipotent.entries {
            if bl[i] == bl[j] {
                return Err(PadicError::Config(format!("u{}{} lies inside a Levi block", i + 1, j + 1)));
            }
        }
        let cap = (62.0 / (cfg.p as f64).log2()).floor() as u32;
        let k = cfg.k.unwrap_or((3 * elt.shift() as u32 + 16).min(cap));
        if k > cap {
            return Err(PadicError::Config(format!("precision {k} too large for p = {}", cfg.p)));
        }
        let g = elt.to_pmat(cfg.p, k);
        Prepared::from_matrix(cfg, g, k)
    }

    /// `g` must be block upper triangular for `cfg.blocks`.
    pub fn from_matrix(cfg: &OracleConfig, g: PMat, k: u32) -> Result<Prepared, PadicError> {
        let n = cfg.n;
        let bl = cfg.block_of();
        for i in 0..n {
            for j in 0..n {
                if bl[i] > bl[j] && !g.get(i, j).is_exact_zero() {
                    return Err(PadicError::Config("g is not in P".into()));
                }
            }
        }
        let g_inv = g.inverse(k)?;
        let mut gm = g.clone();
        for i in 0..n {
            for j in 0..n {
                if bl[i] != bl[j] {
                    gm.set(i, j, TruncatedPadic::zero(cfg.p));
                }
            }
        }
        let gm_inv = gm.inverse(k)?;
        let mut prep = Prepared { cfg: cfg.clone(), g, g_inv, gm, gm_inv, r: 0, k };
        prep.r = match cfg.r {
            Some(r) => {
                prep.validate_depth(r)?;
                r
            }
            None => {
                (1..=MAX_DEPTH).find(|&r| prep.validate_depth(r).is_ok()).ok_or(PadicError::Validation(MAX_DEPTH))?
            }
        };
        Ok(prep)
    }

    /// Checks `h·H_r·h^{-1} ⊆ Γ` on generators `1 + p^r E_ij` of `H_r`, for
    /// each group and its conjugator.
    pub fn validate_depth(&self, r: u32) -> Result<(), PadicError> {
        for (kind, h, hi) in [
            (GroupKind::Gamma, &self.g, &self.g_inv),
            (GroupKind::GammaM, &self.gm, &self.gm_inv),
            (GroupKind::GammaU, &self.g, &self.g_inv),
        ] {
            let n = self.cfg.n;
            let pr = TruncatedPadic::p_power(self.cfg.p, r as i64, self.k);
            for i in 0..n {
                for j in 0..n {
                    if matches!(self.cfg.entry_kind(kind, i, j), EntryKind::One | EntryKind::Zero) {
                        continue;
                    }
                    for a in 0..n {
                        for b in 0..n {
                            let y = pr.mul(&h.get(a, i).mul(hi.get(j, b)));
                            let ok = match self.cfg.entry_kind(kind, a, b) {
                                EntryKind::DiagUnit | EntryKind::PInt => y.val_at_least(1)?,
                                EntryKind::Int => y.val_at_least(0)?,
                                EntryKind::One | EntryKind::Zero => true,
                            };
                            if !ok {
                                return Err(PadicError::Validation(r));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn with_depth(&self, r: u32) -> Result<Prepared, PadicError> {
        self.validate_depth(r)?;
        Ok(Prepared { r, ..self.clone() })
    }

    fn conj(&self, kind: GroupKind, x: &PMat) -> PMat {
        match kind {
            GroupKind::GammaM => self.gm.mul(x).mul(&self.gm_inv),
            _ => self.g.mul(x).mul(&self.g_inv),
        }
    }

    /// Whether `x` lies in the group, deciding every constrained entry.
    pub fn member(&self, kind: GroupKind, x: &PMat) -> Result<bool, PadicError> {
        let n = self.cfg.n;
        let one = TruncatedPadic::one(self.cfg.p, self.k);
        for i in 0..n {
            for j in 0..n {
                let e = x.get(i, j);
                let ok = match self.cfg.entry_kind(kind, i, j) {
                    EntryKind::DiagUnit => e.sub(&one).val_at_least(1)?,
                    EntryKind::Int => e.val_at_least(0)?,
                    EntryKind::PInt => e.val_at_least(1)?,
                    EntryKind::One | EntryKind::Zero => true,
                };
                if !ok {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Enumerates coset representatives of the group modulo depth `r`.
    pub fn reps(&self, kind: GroupKind) -> Result<RepSpace, PadicError> {
        RepSpace::new(&self.cfg, kind, self.r)
    }

    fn lift(&self, res: &[u64]) -> PMat {
        PMat::from_ints(self.cfg.n, self.cfg.p, self.k, res)
    }

    /// `[H : H ∩ g^{-1}Hg]` by enumeration of `H/H_r`.
    pub fn index(&self, kind: GroupKind) -> Result<IndexCount, PadicError> {
        let space = self.reps(kind)?;
        let stabilizer = (0..space.len())
            .into_par_iter()
            .map(|i| self.member(kind, &self.conj(kind, &self.lift(&space.get(i)))).map(u64::from))
            .try_reduce(|| 0, |a, b| Ok(a + b))?;
        if stabilizer == 0 || space.len() % stabilizer != 0 {
            return Err(PadicError::Identity(format!("stabilizer {stabilizer} does not divide {}", space.len())));
        }
        Ok(IndexCount { index: space.len() / stabilizer, enumerated: space.len(), stabilizer })
    }

    /// Residues of the members of `Γ_(g)` modulo `H_r`.
    fn stabilizer_elements(&self, kind: GroupKind) -> Result<Vec<Vec<u64>>, PadicError> {
        let space = self.reps(kind)?;
        let hits: Vec<Option<Vec<u64>>> = (0..space.len())
            .into_par_iter()
            .map(|i| {
                let x = space.get(i);
                Ok(self.member(kind, &self.conj(kind, &self.lift(&x)))?.then_some(x))
            })
            .collect::<Result<_, PadicError>>()?;
        Ok(hits.into_iter().flatten().collect())
    }

    fn project_m(&self, x: &[u64]) -> Vec<u64> {
        let n = self.cfg.n;
        let bl = self.cfg.block_of();
        (0..n * n).map(|t| if bl[t / n] == bl[t % n] { x[t] } else { 0 }).collect()
    }

    /// `ν_M(g) = [(Γ_M)_(g_M) : pr_M(Γ_(g))]`.
    pub fn nu(&self) -> Result<(u64, IndexCount), PadicError> {
        let proj: HashSet<Vec<u64>> =
            self.stabilizer_elements(GroupKind::Gamma)?.iter().map(|x| self.project_m(x)).collect();
        let m_stab: HashSet<Vec<u64>> = self.stabilizer_elements(GroupKind::GammaM)?.into_iter().collect();
        if !proj.is_subset(&m_stab) {
            return Err(PadicError::Identity("pr_M(Γ_(g)) is not inside (Γ_M)_(g_M)".into()));
        }
        let total = m_stab.len() as u64;
        let sub = proj.len() as u64;
        if !total.is_multiple_of(sub) {
            return Err(PadicError::Identity(format!("{sub} does not divide {total}")));
        }
        Ok((total / sub, IndexCount { index: total / sub, enumerated: total, stabilizer: sub }))
    }

    fn modulus(&self) -> u64 {
        pow(self.cfg.p, self.r)
    }

    /// Right coset representatives of `sub` inside the listed group elements,
    /// where `in_sub` decides membership of `x·y^{-1}`.
    fn right_cosets(
        &self,
        elements: &[Vec<u64>],
        in_sub: &dyn Fn(&[u64]) -> Result<bool, PadicError>,
    ) -> Result<Vec<Vec<u64>>, PadicError> {
        let m = self.modulus();
        let mut reps: Vec<(Vec<u64>, Vec<u64>)> = Vec::new();
        for x in elements {
            let mut fresh = true;
            for (_, yinv) in &reps {
                if in_sub(&res_mul(self.cfg.n, m, x, yinv))? {
                    fresh = false;
                    break;
                }
            }
            if fresh {
                reps.push((x.clone(), res_inv(self.cfg.n, m, x)?));
            }
        }
        Ok(reps.into_iter().map(|(x, _)| x).collect())
    }

    /// Builds the representatives `u_s h_j m_i` and checks that the cosets
    /// `Γ g u_s h_j m_i` are pairwise distinct.
    pub fn double_coset(&self) -> Result<DoubleCosetReport, PadicError> {
        let mu_total = self.index(GroupKind::Gamma)?.index;
        let mu_m = self.index(GroupKind::GammaM)?.index;
        let mu_u = self.index(GroupKind::GammaU)?.index;
        let (nu_m, _) = self.nu()?;
        let n = self.cfg.n;
        let m = self.modulus();

        let gamma_m: Vec<Vec<u64>> = self.reps(GroupKind::GammaM)?.iter().collect();
        let in_mstab = |x: &[u64]| self.member(GroupKind::GammaM, &self.conj(GroupKind::GammaM, &self.lift(x)));
        let m_reps = self.right_cosets(&gamma_m, &in_mstab)?;

        let proj: HashSet<Vec<u64>> =
            self.stabilizer_elements(GroupKind::Gamma)?.iter().map(|x| self.project_m(x)).collect();
        let m_stab = self.stabilizer_elements(GroupKind::GammaM)?;
        let in_proj = |x: &[u64]| Ok(proj.contains(x));
        let h_reps = self.right_cosets(&m_stab, &in_proj)?;

        let gamma_u: Vec<Vec<u64>> = self.reps(GroupKind::GammaU)?.iter().collect();
        let in_ustab = |x: &[u64]| self.member(GroupKind::GammaU, &self.conj(GroupKind::GammaU, &self.lift(x)));
        let u_reps = self.right_cosets(&gamma_u, &in_ustab)?;

        if m_reps.len() as u64 != mu_m || h_reps.len() as u64 != nu_m || u_reps.len() as u64 != mu_u {
            return Err(PadicError::Identity(format!(
                "coset counts ({}, {}, {}) differ from indices ({mu_m}, {nu_m}, {mu_u})",
                m_reps.len(),
                h_reps.len(),
                u_reps.len()
            )));
        }
        let mut zs = Vec::new();
        for u in &u_reps {
            for h in &h_reps {
                for mi in &m_reps {
                    zs.push(res_mul(n, m, &res_mul(n, m, u, h), mi));
                }
            }
        }
        let invs: Vec<Vec<u64>> = zs.iter().map(|z| res_inv(n, m, z)).collect::<Result<_, _>>()?;
        let clash = (0..zs.len())
            .into_par_iter()
            .map(|a| {
                for b in 0..a {
                    let x = res_mul(n, m, &zs[a], &invs[b]);
                    if self.member(GroupKind::Gamma, &self.conj(GroupKind::Gamma, &self.lift(&x)))? {
                        return Ok(true);
                    }
                }
                Ok(false)
            })
            .try_reduce(|| false, |a, b| Ok(a || b))?;
        Ok(DoubleCosetReport {
            mu_total,
            mu_m,
            nu_m,
            mu_u,
            cosets: zs.len() as u64,
            disjoint: !clash,
            r: self.r,
            k: self.k,
        })
    }
}

/// Representatives of a group modulo its depth-`r` congruence subgroup, as
/// integer matrices indexed by a mixed-radix counter.
#[derive(Debug, Clone)]
pub struct RepSpace {
    n: usize,
    base: Vec<u64>,
    free: Vec<(usize, u64, u64, u64)>,
    len: u64,
}

impl RepSpace {
    pub fn new(cfg: &OracleConfig, kind: GroupKind, r: u32) -> Result<RepSpace, PadicError> {
        let n = cfg.n;
        let p = cfg.p;
        let mut base = vec![0u64; n * n];
        let mut free = Vec::new();
        let mut len: u64 = 1;
        for i in 0..n {
            for j in 0..n {
                let t = i * n + j;
                let (offset, step, count) = match cfg.entry_kind(kind, i, j) {
                    EntryKind::One => {
                        base[t] = 1;
                        continue;
                    }
                    EntryKind::Zero => continue,
                    EntryKind::DiagUnit => (1, p, pow(p, r - 1)),
                    EntryKind::PInt => (0, p, pow(p, r - 1)),
                    EntryKind::Int => (0, 1, pow(p, r)),
                };
                base[t] = offset;
                if count > 1 {
                    free.push((t, offset, step, count));
                    len = len
                        .checked_mul(count)
                        .filter(|&l| l <= MAX_ENUM)
                        .ok_or_else(|| PadicError::Config(format!("enumeration beyond {MAX_ENUM} elements")))?;
                }
            }
        }
        Ok(RepSpace { n, base, free, len })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, mut idx: u64) -> Vec<u64> {
        let mut x = self.base.clone();
        for &(t, offset, step, count) in &self.free {
            x[t] = offset + step * (idx % count);
            idx /= count;
        }
        x
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    pub fn size(&self) -> usize {
        self.n
    }
}

fn res_mul(n: usize, m: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k] as u128;
            if x == 0 {
                continue;
            }
            for j in 0..n {
                let t = i * n + j;
                out[t] = ((out[t] as u128 + x * b[k * n + j] as u128) % m as u128) as u64;
            }
        }
    }
    out
}

/// Inverse modulo `m = p^r` of a matrix whose reduction mod `p` is upper
/// triangular with unit diagonal after row pivoting.
fn res_inv(n: usize, m: u64, a: &[u64]) -> Result<Vec<u64>, PadicError> {
    let mut x: Vec<i128> = a.iter().map(|&v| v as i128).collect();
    let mut inv: Vec<i128> = (0..n * n).map(|t| i128::from(t / n == t % n)).collect();
    let mm = m as i128;
    for c in 0..n {
        let piv = (c..n)
            .find(|&r| mod_inv(x[r * n + c].rem_euclid(mm) as u64, m).is_some())
            .ok_or_else(|| PadicError::NotInvertible("residue matrix".into()))?;
        for j in 0..n {
            x.swap(piv * n + j, c * n + j);
            inv.swap(piv * n + j, c * n + j);
        }
        let d = mod_inv(x[c * n + c].rem_euclid(mm) as u64, m).expect("pivot is a unit") as i128;
        for j in 0..n {
            x[c * n + j] = (x[c * n + j] * d).rem_euclid(mm);
            inv[c * n + j] = (inv[c * n + j] * d).rem_euclid(mm);
        }
        for r in 0..n {
            if r == c {
                continue;
            }
            let f = x[r * n + c];
            if f == 0 {
                continue;
            }
            for j in 0..n {
                x[r * n + j] = (x[r * n + j] - f * x[c * n + j]).rem_euclid(mm);
                inv[r * n + j] = (inv[r * n + j] - f * inv[c * n + j]).rem_euclid(mm);
            }
        }
    }
    Ok(inv.into_iter().map(|v| v as u64).collect())
}

/// `μ_{U_P}(g)` by enumeration of `I_{U_P}/H_r`.
pub fn mu_oracle(cfg: &OracleConfig, elt: &TestElement) -> Result<IndexCount, PadicError> {
    Prepared::new(cfg, elt)?.index(GroupKind::GammaU)
}

/// `ν_M(g)` for `Γ = I_1 ∩ P`.
pub fn nu_oracle(cfg: &OracleConfig, elt: &TestElement) -> Result<u64, PadicError> {
    Ok(Prepared::new(cfg, elt)?.nu()?.0)
}

/// `(μ, μ_M, ν_M, μ_{U_P})` with the disjointness of the coset decomposition.
pub fn double_coset_oracle(cfg: &OracleConfig, elt: &TestElement) -> Result<DoubleCosetReport, PadicError> {
    Prepared::new(cfg, elt)?.double_coset()
}

/// Outcome of comparing the enumerated `μ_{U_P}` with the product formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub lambda: Vec<i64>,
    pub oracle: u64,
    pub formula: u64,
    pub agree: bool,
}

/// `μ_{U_P}(diag(p^{λ_i}))` by enumeration against the root-datum formula at
/// `q = p`.
pub fn cross_check_mu(cfg: &OracleConfig, lambda: &[i64]) -> Result<CrossCheck, PadicError> {
    let rd = std::sync::Arc::new(
        RootDatum::build(&RootDatumSpec::Gl { n: cfg.n }).map_err(|e| PadicError::Config(e.to_string()))?,
    );
    let levi = cfg.levi(&rd);
    let ld = LeviDatum::new(std::sync::Arc::new(Geometry::levi(rd.clone(), levi)), rd.full_levi())
        .map_err(|e| PadicError::Config(e.to_string()))?;
    let params = ParamMap::equal(cfg.p, 1).map_err(|e| PadicError::Config(e.to_string()))?;
    let w = rd.translation(lambda).map_err(|e| PadicError::Config(e.to_string()))?;
    let formula = ld.mu(&params, &w).map_err(|e| PadicError::Config(e.to_string()))?;
    let formula = pow(cfg.p, formula.exp as u32);
    let oracle = mu_oracle(cfg, &TestElement::diagonal(lambda.to_vec()))?.index;
    Ok(CrossCheck { lambda: lambda.to_vec(), oracle, formula, agree: oracle == formula })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_arithmetic() {
        let p = 3;
        let a = TruncatedPadic::from_int(p, 9, 4);
        assert_eq!(a.valuation(), Some(2));
        let b = TruncatedPadic::from_ratio(p, 2, 1, 4);
        assert_eq!(a.mul(&b).valuation(), Some(1));
        let c = a.sub(&a);
        assert!(!c.is_known_nonzero());
        assert_eq!(c.abs_prec(), 6);
        assert!(c.val_at_least(6).unwrap());
        assert!(c.val_at_least(7).is_err());
        let x = TruncatedPadic::from_int(p, 5, 4);
        assert_eq!(x.mul(&x.inv().unwrap()), TruncatedPadic::one(p, 4));
        assert_eq!(TruncatedPadic::from_int(p, -1, 3).residue(2).unwrap(), 8);
        assert_eq!(TruncatedPadic::from_int(p, 10, 4).add(&TruncatedPadic::from_int(p, -1, 4)).valuation(), Some(2));
    }

    #[test]
    fn matrix_inverse() {
        let g =
            TestElement { diag: vec![2, -1], unipotent: UnipotentRep::parse(2, "u12=1/p^2").unwrap() }.to_pmat(2, 12);
        let gi = g.inverse(12).unwrap();
        let id = g.mul(&gi);
        for i in 0..2 {
            for j in 0..2 {
                let e = id.get(i, j);
                if i == j {
                    assert_eq!(e.sub(&TruncatedPadic::one(2, 12)).val_at_least(6), Ok(true));
                } else {
                    assert_eq!(e.val_at_least(6), Ok(true));
                }
            }
        }
    }

    #[test]
    fn mu_gl3_borel_closed_form() {
        let cfg = OracleConfig { k: Some(8), r: Some(4), ..OracleConfig::borel(3, 2) };
        for (m, n) in [(0, 0), (-1, 0), (0, -2), (-2, -2), (2, -1), (1, 1)] {
            let lambda = [m + n, n, 0];
            let got = mu_oracle(&cfg, &TestElement::diagonal(lambda.to_vec())).unwrap().index;
            let e = 0.max(-m) + 0.max(-n) + 0.max(-m - n);
            assert_eq!(got, 2u64.pow(e as u32), "m={m} n={n}");
        }
    }

    #[test]
    fn nu_gl2_example() {
        for p in [2, 3] {
            for n in 0..=2u32 {
                let cfg = OracleConfig::borel(2, p);
                let elt = TestElement {
                    diag: vec![0, 0],
                    unipotent: UnipotentRep::parse(2, &format!("u12=1/p^{}", n + 1)).unwrap(),
                };
                assert_eq!(nu_oracle(&cfg, &elt).unwrap(), p.pow(n));
                let dc = double_coset_oracle(&cfg, &elt).unwrap();
                assert_eq!(dc.mu_total, dc.mu_m * dc.nu_m * dc.mu_u);
                assert!(dc.disjoint);
            }
        }
    }

    #[test]
    fn cross_check_gl2() {
        let cfg = OracleConfig::borel(2, 3);
        let c = cross_check_mu(&cfg, &[0, 1]).unwrap();
        assert_eq!((c.oracle, c.formula), (3, 3));
        assert!(cross_check_mu(&cfg, &[0, 0]).unwrap().agree);
    }

    #[test]
    fn depth_independence() {
        let cfg = OracleConfig::borel(3, 2);
        let elt = TestElement { diag: vec![-1, 0, 1], unipotent: UnipotentRep::parse(3, "u12=1/p,u23=3").unwrap() };
        let prep = Prepared::new(&cfg, &elt).unwrap();
        let a = prep.index(GroupKind::GammaU).unwrap().index;
        let b = prep.with_depth(prep.r + 1).unwrap().index(GroupKind::GammaU).unwrap().index;
        assert_eq!(a, b);
    }

    #[test]
    fn parse_inputs() {
        assert_eq!(parse_diag("diag(p^1,p^-1,1)").unwrap(), vec![1, -1, 0]);
        assert!(parse_diag("diag(2,1)").is_err());
        let u = UnipotentRep::parse(3, "u12=1/p, u13=3/p^2,u23=5").unwrap();
        assert_eq!(u.entries.len(), 3);
        assert!(UnipotentRep::parse(3, "u21=1").is_err());
    }
}
