//! Iwahori–Hecke algebras `H(G)` and `H(M)` in the `T`-basis over exact
//! coefficient rings.
//!
//! Products use the Iwahori–Matsumoto rules, expanding the right factor along
//! its greedy reduced word. Inverses `T_w^{-1}` live over `Z[1/p]`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::weyl::{Geometry, ParamMap, WeylElt};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeckeError {
    #[error("elements belong to different algebras")]
    ContextMismatch,
    #[error("inversion needs Z[1/p] coefficients, not residues mod {0}")]
    ModularInverse(u64),
    #[error("element {0} is outside the algebra's Weyl group")]
    OutsideGroup(String),
    #[error("coefficient {0} is not integral")]
    NotIntegral(String),
    #[error("postcondition violated: {0}")]
    Invariant(String),
    #[error("cannot parse Hecke element: {0}")]
    Parse(String),
    #[error("cannot reduce modulo {0}: {1}")]
    Reduction(u64, String),
}

/// A coefficient: `num / p^t` in `Z[1/p]`, or a residue modulo `N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Coefficient {
    QLocal { num: BigInt, den_exp: u32 },
    Modular { residue: u64, modulus: u64 },
}

/// The coefficient ring of an algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoeffRing {
    /// `Z[1/p]`.
    QLocal { p: u64 },
    /// `Z/N`.
    Modular { n: u64 },
}

impl CoeffRing {
    pub fn zero(&self) -> Coefficient {
        self.from_int(&BigInt::zero())
    }

    pub fn one(&self) -> Coefficient {
        self.from_int(&BigInt::one())
    }

    pub fn from_int(&self, x: &BigInt) -> Coefficient {
        match *self {
            CoeffRing::QLocal { .. } => Coefficient::QLocal { num: x.clone(), den_exp: 0 },
            CoeffRing::Modular { n } => Coefficient::Modular {
                residue: x.mod_floor(&BigInt::from(n)).to_u64().expect("residue fits"),
                modulus: n,
            },
        }
    }

    pub fn from_i64(&self, x: i64) -> Coefficient {
        self.from_int(&BigInt::from(x))
    }

    /// `p^exp`; negative exponents need `Z[1/p]`.
    pub fn p_power(&self, p: u64, exp: i64) -> Coefficient {
        match *self {
            CoeffRing::QLocal { p: rp } => {
                debug_assert_eq!(rp, p);
                if exp >= 0 {
                    Coefficient::QLocal { num: BigInt::from(p).pow(exp as u64), den_exp: 0 }
                } else {
                    Coefficient::QLocal { num: BigInt::one(), den_exp: (-exp) as u32 }
                }
            }
            CoeffRing::Modular { n } => {
                assert!(exp >= 0, "negative power of p in a modular ring");
                let r = BigInt::from(p).modpow(&BigInt::from(exp), &BigInt::from(n));
                Coefficient::Modular { residue: r.to_u64().expect("residue fits"), modulus: n }
            }
        }
    }

    fn p(&self) -> u64 {
        match *self {
            CoeffRing::QLocal { p } => p,
            CoeffRing::Modular { .. } => unreachable!("no prime attached to a modular ring"),
        }
    }

    fn normalize(&self, mut num: BigInt, mut den_exp: u32) -> Coefficient {
        if num.is_zero() {
            return Coefficient::QLocal { num, den_exp: 0 };
        }
        let p = BigInt::from(self.p());
        while den_exp > 0 {
            let (q, r) = num.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            num = q;
            den_exp -= 1;
        }
        Coefficient::QLocal { num, den_exp }
    }

    pub fn add(&self, a: &Coefficient, b: &Coefficient) -> Coefficient {
        match (a, b) {
            (Coefficient::QLocal { num: x, den_exp: s }, Coefficient::QLocal { num: y, den_exp: t }) => {
                let p = BigInt::from(self.p());
                let m = (*s).max(*t);
                let num = x * p.clone().pow(m - s) + y * p.pow(m - t);
                self.normalize(num, m)
            }
            (Coefficient::Modular { residue: x, modulus: n }, Coefficient::Modular { residue: y, .. }) => {
                Coefficient::Modular { residue: ((*x as u128 + *y as u128) % *n as u128) as u64, modulus: *n }
            }
            _ => panic!("mixed coefficient kinds"),
        }
    }

    pub fn neg(&self, a: &Coefficient) -> Coefficient {
        match a {
            Coefficient::QLocal { num, den_exp } => Coefficient::QLocal { num: -num, den_exp: *den_exp },
            Coefficient::Modular { residue, modulus } => {
                Coefficient::Modular { residue: (modulus - residue) % modulus, modulus: *modulus }
            }
        }
    }

    pub fn sub(&self, a: &Coefficient, b: &Coefficient) -> Coefficient {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Coefficient, b: &Coefficient) -> Coefficient {
        match (a, b) {
            (Coefficient::QLocal { num: x, den_exp: s }, Coefficient::QLocal { num: y, den_exp: t }) => {
                if *s == 0 && *t == 0 {
                    Coefficient::QLocal { num: x * y, den_exp: 0 }
                } else {
                    self.normalize(x * y, s + t)
                }
            }
            (Coefficient::Modular { residue: x, modulus: n }, Coefficient::Modular { residue: y, .. }) => {
                Coefficient::Modular { residue: ((*x as u128 * *y as u128) % *n as u128) as u64, modulus: *n }
            }
            _ => panic!("mixed coefficient kinds"),
        }
    }
}

impl Coefficient {
    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::QLocal { num, .. } => num.is_zero(),
            Coefficient::Modular { residue, .. } => *residue == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coefficient::QLocal { num, den_exp } => *den_exp == 0 && num.is_one(),
            Coefficient::Modular { residue, modulus } => *residue == 1 % modulus,
        }
    }

    pub fn is_integral(&self) -> bool {
        match self {
            Coefficient::QLocal { den_exp, .. } => *den_exp == 0,
            Coefficient::Modular { .. } => true,
        }
    }

    /// `(numerator, denominator exponent)`; residues report exponent 0.
    pub fn parts(&self) -> (BigInt, u32) {
        match self {
            Coefficient::QLocal { num, den_exp } => (num.clone(), *den_exp),
            Coefficient::Modular { residue, .. } => (BigInt::from(*residue), 0),
        }
    }

    pub fn display_with(&self, p: u64) -> String {
        match self {
            Coefficient::QLocal { num, den_exp: 0 } => num.to_string(),
            Coefficient::QLocal { num, den_exp } => format!("{num}/{p}^{den_exp}"),
            Coefficient::Modular { residue, .. } => residue.to_string(),
        }
    }
}

/// The Hecke algebra of the extended affine Weyl group of a geometry.
#[derive(Debug)]
pub struct HeckeAlgebra {
    geom: Arc<Geometry>,
    params: Arc<ParamMap>,
    ring: CoeffRing,
}

type Terms = BTreeMap<WeylElt, Coefficient>;

impl HeckeAlgebra {
    pub fn new(geom: Arc<Geometry>, params: Arc<ParamMap>, ring: CoeffRing) -> Arc<HeckeAlgebra> {
        if let CoeffRing::QLocal { p } = ring {
            assert_eq!(p, params.p, "coefficient prime must match the parameters");
        }
        Arc::new(HeckeAlgebra { geom, params, ring })
    }

    pub fn geometry(&self) -> &Arc<Geometry> {
        &self.geom
    }

    pub fn params(&self) -> &Arc<ParamMap> {
        &self.params
    }

    pub fn ring(&self) -> CoeffRing {
        self.ring
    }

    pub fn same(&self, other: &HeckeAlgebra) -> bool {
        std::ptr::eq(self, other)
            || (Arc::ptr_eq(self.geom.rd(), other.geom.rd())
                && self.geom.levi_subset() == other.geom.levi_subset()
                && self.params == other.params
                && self.ring == other.ring)
    }

    fn add_term(&self, terms: &mut Terms, w: WeylElt, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        match terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = self.ring.add(e.get(), &c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn q_wall(&self, wall: usize) -> Coefficient {
        self.ring.p_power(self.params.p, self.geom.wall_param(&self.params, wall) as i64)
    }

    /// `x·T_s`.
    fn right_mul_wall(&self, x: &Terms, wall: usize) -> Terms {
        let rd = self.geom.rd();
        let s = self.geom.walls()[wall].elt;
        let q = self.q_wall(wall);
        let qm1 = self.ring.sub(&q, &self.ring.one());
        let mut out = Terms::new();
        for (y, c) in x {
            let ys = rd.mul(y, &s);
            if self.geom.is_right_descent(y, wall) {
                self.add_term(&mut out, ys, self.ring.mul(c, &q));
                self.add_term(&mut out, *y, self.ring.mul(c, &qm1));
            } else {
                self.add_term(&mut out, ys, c.clone());
            }
        }
        out
    }

    /// `x·T_s^{-1}`.
    fn right_mul_wall_inv(&self, x: &Terms, wall: usize) -> Terms {
        let rd = self.geom.rd();
        let s = self.geom.walls()[wall].elt;
        let exp = self.geom.wall_param(&self.params, wall) as i64;
        let qinv = self.ring.p_power(self.params.p, -exp);
        let qinv_m1 = self.ring.sub(&qinv, &self.ring.one());
        let mut out = Terms::new();
        for (y, c) in x {
            let ys = rd.mul(y, &s);
            if self.geom.is_right_descent(y, wall) {
                self.add_term(&mut out, ys, c.clone());
            } else {
                self.add_term(&mut out, ys, self.ring.mul(c, &qinv));
                self.add_term(&mut out, *y, self.ring.mul(c, &qinv_m1));
            }
        }
        out
    }

    /// `T_s^{-1}·x`.
    fn left_mul_wall_inv(&self, x: &Terms, wall: usize) -> Terms {
        let rd = self.geom.rd();
        let s = self.geom.walls()[wall].elt;
        let exp = self.geom.wall_param(&self.params, wall) as i64;
        let qinv = self.ring.p_power(self.params.p, -exp);
        let qinv_m1 = self.ring.sub(&qinv, &self.ring.one());
        let mut out = Terms::new();
        for (y, c) in x {
            let sy = rd.mul(&s, y);
            if self.geom.is_left_descent(y, wall) {
                self.add_term(&mut out, sy, c.clone());
            } else {
                self.add_term(&mut out, sy, self.ring.mul(c, &qinv));
                self.add_term(&mut out, *y, self.ring.mul(c, &qinv_m1));
            }
        }
        out
    }

    fn right_mul_elt(&self, x: &Terms, w: &WeylElt) -> Terms {
        let (word, u) = self.geom.reduced_word(w);
        let mut cur = x.clone();
        for s in word {
            cur = self.right_mul_wall(&cur, s);
        }
        if !u.is_identity() {
            let rd = self.geom.rd();
            cur = cur.into_iter().map(|(y, c)| (rd.mul(&y, &u), c)).collect();
        }
        cur
    }

    fn check_elt(&self, w: &WeylElt) -> Result<(), HeckeError> {
        if self.geom.contains(w) {
            Ok(())
        } else {
            Err(HeckeError::OutsideGroup(self.geom.rd().format_elt(w)))
        }
    }

    /// The basis element `T_w`.
    pub fn basis(self: &Arc<Self>, w: &WeylElt) -> Result<HeckeElt, HeckeError> {
        self.check_elt(w)?;
        Ok(self.basis_unchecked(w))
    }

    fn basis_unchecked(self: &Arc<Self>, w: &WeylElt) -> HeckeElt {
        let mut terms = Terms::new();
        terms.insert(*w, self.ring.one());
        HeckeElt { alg: self.clone(), terms }
    }

    pub fn zero(self: &Arc<Self>) -> HeckeElt {
        HeckeElt { alg: self.clone(), terms: Terms::new() }
    }

    pub fn from_terms(
        self: &Arc<Self>,
        terms: impl IntoIterator<Item = (WeylElt, Coefficient)>,
    ) -> Result<HeckeElt, HeckeError> {
        let mut out = Terms::new();
        for (w, c) in terms {
            self.check_elt(&w)?;
            self.add_term(&mut out, w, c);
        }
        Ok(HeckeElt { alg: self.clone(), terms: out })
    }

    /// `T_w^{-1}`, composed from `T_s^{-1} = q_s^{-1}T_s + (q_s^{-1} − 1)T_1`
    /// along the reduced word in reverse.
    pub fn t_inv(self: &Arc<Self>, w: &WeylElt) -> Result<HeckeElt, HeckeError> {
        if let CoeffRing::Modular { n } = self.ring {
            return Err(HeckeError::ModularInverse(n));
        }
        self.check_elt(w)?;
        let rd = self.geom.rd();
        let (word, u) = self.geom.reduced_word(w);
        let mut cur = Terms::new();
        cur.insert(rd.inv(&u), self.ring.one());
        for &s in word.iter().rev() {
            cur = self.right_mul_wall_inv(&cur, s);
        }
        Ok(HeckeElt { alg: self.clone(), terms: cur })
    }

    /// `T_v^{-1}·x`, by left division along the reduced word of `v`.
    pub fn left_inv_mul(self: &Arc<Self>, v: &WeylElt, x: &HeckeElt) -> Result<HeckeElt, HeckeError> {
        if let CoeffRing::Modular { n } = self.ring {
            return Err(HeckeError::ModularInverse(n));
        }
        if !self.same(&x.alg) {
            return Err(HeckeError::ContextMismatch);
        }
        self.check_elt(v)?;
        let rd = self.geom.rd();
        let (word, u) = self.geom.reduced_word(v);
        let mut cur = x.terms.clone();
        for &s in &word {
            cur = self.left_mul_wall_inv(&cur, s);
        }
        let ui = rd.inv(&u);
        let terms = cur.into_iter().map(|(y, c)| (rd.mul(&ui, &y), c)).collect();
        Ok(HeckeElt { alg: self.clone(), terms })
    }

    /// `q_{v,w}·T_v^{-1}·T_{vw}`, certified integral with leading term `T_w`
    /// and all other support strictly Bruhat-below `w`.
    pub fn fundamental_element(self: &Arc<Self>, v: &WeylElt, w: &WeylElt) -> Result<HeckeElt, HeckeError> {
        self.check_elt(v)?;
        self.check_elt(w)?;
        let rd = self.geom.rd();
        let vw = rd.mul(v, w);
        let q = self.geom.q_vw(&self.params, v, w);
        let raw = self.left_inv_mul(v, &self.basis_unchecked(&vw))?;
        let f = raw.scale(&self.ring.p_power(self.params.p, q.exp as i64));
        self.check_triangular(&f, w)?;
        Ok(f)
    }

    /// Checks that `x = T_w + Σ_{w' < w} c_{w'} T_{w'}` with integral `c`.
    pub fn check_triangular(&self, x: &HeckeElt, w: &WeylElt) -> Result<(), HeckeError> {
        let rd = self.geom.rd();
        for (y, c) in &x.terms {
            if !c.is_integral() {
                return Err(HeckeError::NotIntegral(format!(
                    "{} at {}",
                    c.display_with(self.params.p),
                    rd.format_elt(y)
                )));
            }
            if y == w {
                if !c.is_one() {
                    return Err(HeckeError::Invariant(format!(
                        "leading coefficient at {} is {}",
                        rd.format_elt(w),
                        c.display_with(self.params.p)
                    )));
                }
            } else if !self.geom.bruhat_leq(y, w) {
                return Err(HeckeError::Invariant(format!("{} is not below {}", rd.format_elt(y), rd.format_elt(w))));
            }
        }
        if !x.terms.contains_key(w) {
            return Err(HeckeError::Invariant(format!("no term at {}", rd.format_elt(w))));
        }
        Ok(())
    }

    /// Parses `c*(lambda=[..], sigma=..) + …`; coefficients are integers or
    /// `n/p^t`.
    pub fn parse_elt(self: &Arc<Self>, s: &str) -> Result<HeckeElt, HeckeError> {
        let rd = self.geom.rd();
        let mut terms = Vec::new();
        let mut depth = 0i32;
        let mut start = 0;
        let bytes: Vec<char> = s.chars().collect();
        let mut pieces = Vec::new();
        for (i, &ch) in bytes.iter().enumerate() {
            match ch {
                '(' | '[' => depth += 1,
                ')' | ']' => depth -= 1,
                '+' if depth == 0 => {
                    pieces.push(bytes[start..i].iter().collect::<String>());
                    start = i + 1;
                }
                _ => {}
            }
        }
        pieces.push(bytes[start..].iter().collect::<String>());
        for piece in pieces {
            let piece = piece.trim();
            if piece.is_empty() {
                continue;
            }
            let open = piece.find('(').ok_or_else(|| HeckeError::Parse(piece.to_string()))?;
            let coef_str = piece[..open].trim().trim_end_matches('*').trim();
            let elt = rd.parse_elt(&piece[open..]).map_err(|e| HeckeError::Parse(e.to_string()))?;
            let coef = self.parse_coeff(coef_str)?;
            terms.push((elt, coef));
        }
        self.from_terms(terms)
    }

    fn parse_coeff(&self, s: &str) -> Result<Coefficient, HeckeError> {
        let err = || HeckeError::Parse(format!("bad coefficient '{s}'"));
        match s {
            "" | "+" => return Ok(self.ring.one()),
            "-" => return Ok(self.ring.from_i64(-1)),
            _ => {}
        }
        if let Some((n, d)) = s.split_once('/') {
            let num: BigInt = n.trim().parse().map_err(|_| err())?;
            let (base, exp) = d.trim().split_once('^').unwrap_or((d.trim(), "1"));
            let base: u64 = base.trim().parse().map_err(|_| err())?;
            let exp: u32 = exp.trim().parse().map_err(|_| err())?;
            if base != self.params.p {
                return Err(err());
            }
            if let CoeffRing::Modular { n } = self.ring {
                return Err(HeckeError::ModularInverse(n));
            }
            Ok(self.ring.mul(&self.ring.from_int(&num), &self.ring.p_power(base, -(exp as i64))))
        } else {
            let num: BigInt = s.parse().map_err(|_| err())?;
            Ok(self.ring.from_int(&num))
        }
    }
}

/// A finite linear combination of `T_w`.
#[derive(Clone)]
pub struct HeckeElt {
    alg: Arc<HeckeAlgebra>,
    terms: Terms,
}

impl fmt::Debug for HeckeElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl PartialEq for HeckeElt {
    fn eq(&self, other: &Self) -> bool {
        self.alg.same(&other.alg) && self.terms == other.terms
    }
}

impl fmt::Display for HeckeElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let rd = self.alg.geom.rd();
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| format!("{}*{}", c.display_with(self.alg.params.p), rd.format_elt(w)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl HeckeElt {
    pub fn algebra(&self) -> &Arc<HeckeAlgebra> {
        &self.alg
    }

    pub fn terms(&self) -> &BTreeMap<WeylElt, Coefficient> {
        &self.terms
    }

    pub fn coeff(&self, w: &WeylElt) -> Coefficient {
        self.terms.get(w).cloned().unwrap_or_else(|| self.alg.ring.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(Coefficient::is_integral)
    }

    /// Largest denominator exponent among the coefficients.
    pub fn max_den_exp(&self) -> u32 {
        self.terms.values().map(|c| c.parts().1).max().unwrap_or(0)
    }

    pub fn add(&self, other: &HeckeElt) -> Result<HeckeElt, HeckeError> {
        if !self.alg.same(&other.alg) {
            return Err(HeckeError::ContextMismatch);
        }
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            self.alg.add_term(&mut terms, *w, c.clone());
        }
        Ok(HeckeElt { alg: self.alg.clone(), terms })
    }

    pub fn sub(&self, other: &HeckeElt) -> Result<HeckeElt, HeckeError> {
        self.add(&other.scale(&self.alg.ring.from_i64(-1)))
    }

    pub fn scale(&self, c: &Coefficient) -> HeckeElt {
        let mut terms = Terms::new();
        for (w, x) in &self.terms {
            self.alg.add_term(&mut terms, *w, self.alg.ring.mul(x, c));
        }
        HeckeElt { alg: self.alg.clone(), terms }
    }

    /// `self · other` by the Iwahori–Matsumoto rules.
    pub fn mul(&self, other: &HeckeElt) -> Result<HeckeElt, HeckeError> {
        if !self.alg.same(&other.alg) {
            return Err(HeckeError::ContextMismatch);
        }
        let alg = &self.alg;
        let mut out = Terms::new();
        for (y, c) in &other.terms {
            let part = alg.right_mul_elt(&self.terms, y);
            for (z, d) in part {
                alg.add_term(&mut out, z, alg.ring.mul(&d, c));
            }
        }
        Ok(HeckeElt { alg: alg.clone(), terms: out })
    }

    /// Image modulo `n` in the algebra with `Z/n` coefficients.
    pub fn reduce_mod(&self, target: &Arc<HeckeAlgebra>) -> Result<HeckeElt, HeckeError> {
        let CoeffRing::Modular { n } = target.ring else {
            return Err(HeckeError::ContextMismatch);
        };
        if !Arc::ptr_eq(self.alg.geom.rd(), target.geom.rd())
            || self.alg.geom.levi_subset() != target.geom.levi_subset()
            || self.alg.params != target.params
        {
            return Err(HeckeError::ContextMismatch);
        }
        let p = self.alg.params.p;
        let mut terms = Terms::new();
        for (w, c) in &self.terms {
            let (num, t) = c.parts();
            let r = if t == 0 {
                target.ring.from_int(&num)
            } else {
                let pt = BigInt::from(p).pow(t);
                let inv =
                    mod_inverse(&pt, &BigInt::from(n)).ok_or_else(|| HeckeError::Reduction(n, c.display_with(p)))?;
                target.ring.from_int(&(num * inv))
            };
            target.add_term(&mut terms, *w, r);
        }
        Ok(HeckeElt { alg: target.clone(), terms })
    }
}

fn mod_inverse(a: &BigInt, n: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(n);
    if e.gcd.abs().is_one() {
        Some(e.x.mod_floor(n))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::{RootDatum, RootDatumSpec};

    fn alg(s: &str, p: u64, e: u32) -> Arc<HeckeAlgebra> {
        let rd = Arc::new(RootDatum::build(&RootDatumSpec::from_short(s).unwrap()).unwrap());
        let geom = Arc::new(Geometry::full(rd));
        HeckeAlgebra::new(geom, Arc::new(ParamMap::equal(p, e).unwrap()), CoeffRing::QLocal { p })
    }

    #[test]
    fn coefficient_canonical_form() {
        let r = CoeffRing::QLocal { p: 3 };
        let a = r.p_power(3, -2);
        let b = r.from_i64(9);
        assert!(r.mul(&a, &b).is_one());
        let c = r.add(&r.p_power(3, -1), &r.p_power(3, -1));
        assert_eq!(c, Coefficient::QLocal { num: 2.into(), den_exp: 1 });
        let m = CoeffRing::Modular { n: 9 };
        assert!(m.p_power(3, 2).is_zero());
        assert_eq!(m.from_i64(-1), Coefficient::Modular { residue: 8, modulus: 9 });
    }

    #[test]
    fn quadratic_relation() {
        let a = alg("gl2", 3, 1);
        let r = a.ring();
        for (i, wall) in a.geometry().walls().iter().enumerate() {
            let ts = a.basis(&wall.elt).unwrap();
            let sq = ts.mul(&ts).unwrap();
            let q = a.geometry().wall_param(a.params(), i) as i64;
            assert_eq!(sq.coeff(&WeylElt::identity()), r.from_i64(3i64.pow(q as u32)));
            assert_eq!(sq.coeff(&wall.elt), r.from_i64(3i64.pow(q as u32) - 1));
            let inv = a.t_inv(&wall.elt).unwrap();
            assert_eq!(inv.mul(&ts).unwrap(), a.basis(&WeylElt::identity()).unwrap());
        }
    }

    #[test]
    fn t_inv_denominator() {
        let a = alg("gl2", 2, 3);
        let w = a.geometry().rd().translation(&[1, -1]).unwrap();
        let inv = a.t_inv(&w).unwrap();
        assert_eq!(inv.max_den_exp(), 6);
        assert_eq!(inv.mul(&a.basis(&w).unwrap()).unwrap(), a.basis(&WeylElt::identity()).unwrap());
    }

    #[test]
    fn fundamental_examples() {
        let a = alg("gl2", 2, 1);
        let rd = a.geometry().rd().clone();
        let v = rd.translation(&[1, -1]).unwrap();
        let w = rd.translation(&[0, 1]).unwrap();
        let f = a.fundamental_element(&v, &w).unwrap();
        assert!(f.coeff(&w).is_one());
        assert!(f.terms().len() > 1);
        let via_mul = a
            .t_inv(&v)
            .unwrap()
            .mul(&a.basis(&rd.mul(&v, &w)).unwrap())
            .unwrap()
            .scale(&a.ring().p_power(2, a.geometry().q_vw(a.params(), &v, &w).exp as i64));
        assert_eq!(f, via_mul);
        assert_eq!(a.fundamental_element(&WeylElt::identity(), &w).unwrap(), a.basis(&w).unwrap());
        let s = a.geometry().walls()[0].elt;
        let fs = a.fundamental_element(&s, &s).unwrap();
        assert!(fs.coeff(&s).is_one());
        assert_eq!(fs.coeff(&WeylElt::identity()), a.ring().from_i64(-1));
    }

    #[test]
    fn parse_round_trip() {
        let a = alg("gl2", 3, 1);
        let x = a
            .parse_elt("2*(lambda=[0,1], sigma=s1) + -1/3^2*(lambda=[1,-1], sigma=e) + (lambda=[0,0], sigma=e)")
            .unwrap();
        assert_eq!(x.terms().len(), 3);
        assert_eq!(a.parse_elt(&x.to_string()).unwrap(), x);
        assert!(a.parse_elt("2*(lambda=[0,1,2], sigma=e)").is_err());
        assert!(a.parse_elt("1/2*(lambda=[0,1], sigma=e)").is_err());
    }

    #[test]
    fn modular_mode() {
        let a = alg("gl2", 3, 1);
        let m = HeckeAlgebra::new(a.geometry().clone(), a.params().clone(), CoeffRing::Modular { n: 3 });
        assert!(matches!(m.t_inv(&WeylElt::identity()), Err(HeckeError::ModularInverse(3))));
        let s = a.geometry().walls()[0].elt;
        let ts = a.basis(&s).unwrap();
        let lhs = ts.mul(&ts).unwrap().reduce_mod(&m).unwrap();
        let tm = ts.reduce_mod(&m).unwrap();
        assert_eq!(lhs, tm.mul(&tm).unwrap());
        assert_eq!(lhs.coeff(&s), m.ring().from_i64(2));
        assert!(matches!(a.basis(&s).unwrap().mul(&tm), Err(HeckeError::ContextMismatch)));
    }
}
