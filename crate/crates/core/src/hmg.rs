//! The algebras `H(M,G)` in the basis `τ_w = μ(w)·T^M_w`, the maps `θ` and
//! `ξ` between them, localization, and the `μ`-filtration.
//!
//! Products are taken in `H(M)` and rescaled by `μ`; every rescaling is
//! certified integral. `ξ` is computed over `Z[1/p]` through the fundamental
//! element in `H(L)` and certified integral before use.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::hecke::{CoeffRing, Coefficient, HeckeElt, HeckeError};
use crate::levi::{minimal_positive_shift, strictly_positive_cochar, LeviDatum, LeviError};
use crate::rootdata::{Cochar, LeviSubset};
use crate::setting::Setting;
use crate::weyl::WeylElt;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HmgError {
    #[error("Levi chain violated: {0}")]
    Chain(String),
    #[error("elements belong to different algebras")]
    Mismatch,
    #[error("{0} is not in W_M")]
    NotInLevi(String),
    #[error("rescaled coefficient is not integral: {0}")]
    NotIntegral(String),
    #[error("ξ depends on the choice of positive direction at {0}")]
    ChoiceDependent(String),
    #[error("scalar identity failed: {0}")]
    Scalar(String),
    #[error("filtration levels need equal parameters")]
    UnequalParams,
    #[error(transparent)]
    Levi(#[from] LeviError),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
}

/// Integer combination of basis keys, the form in which basis images are cached.
pub type IntExpansion = Vec<(WeylElt, BigInt)>;

/// `H(M,G)` for `M ⊆ G'` with `G'` a standard Levi of the datum.
pub struct HmgAlgebra {
    setting: Arc<Setting>,
    m: LeviSubset,
    g: LeviSubset,
    ring: CoeffRing,
    ld: LeviDatum,
}

impl fmt::Debug for HmgAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H({}, {})", self.m.label(), self.g.label())
    }
}

impl HmgAlgebra {
    pub fn new(
        setting: Arc<Setting>,
        m: LeviSubset,
        g: LeviSubset,
        ring: CoeffRing,
    ) -> Result<Arc<HmgAlgebra>, HmgError> {
        if !m.is_subset(&g) {
            return Err(HmgError::Chain(format!("{} ⊄ {}", m.label(), g.label())));
        }
        let ld = setting.levi_datum(m, g)?;
        Ok(Arc::new(HmgAlgebra { setting, m, g, ring, ld }))
    }

    pub fn setting(&self) -> &Arc<Setting> {
        &self.setting
    }

    pub fn m(&self) -> LeviSubset {
        self.m
    }

    pub fn g(&self) -> LeviSubset {
        self.g
    }

    pub fn ring(&self) -> CoeffRing {
        self.ring
    }

    pub fn levi_datum(&self) -> &LeviDatum {
        &self.ld
    }

    pub fn label(&self) -> String {
        format!("H({},{})", self.m.label(), self.g.label())
    }

    fn same(&self, other: &HmgAlgebra) -> bool {
        std::ptr::eq(self, other)
            || (Arc::ptr_eq(self.setting.rd(), other.setting.rd())
                && self.setting.params() == other.setting.params()
                && self.m == other.m
                && self.g == other.g
                && self.ring == other.ring)
    }

    /// Same `M` and ambient group over another coefficient ring.
    pub fn with_ring(&self, ring: CoeffRing) -> Result<Arc<HmgAlgebra>, HmgError> {
        HmgAlgebra::new(self.setting.clone(), self.m, self.g, ring)
    }

    fn mu_exp(&self, w: &WeylElt) -> u64 {
        self.ld.mu_exp(self.setting.params(), &w.lambda)
    }

    fn check(&self, w: &WeylElt) -> Result<(), HmgError> {
        if self.ld.geometry().contains(w) {
            Ok(())
        } else {
            Err(HmgError::NotInLevi(self.setting.rd().format_elt(w)))
        }
    }

    pub fn basis(self: &Arc<Self>, w: &WeylElt) -> Result<TauElt, HmgError> {
        self.check(w)?;
        let mut terms = BTreeMap::new();
        terms.insert(*w, self.ring.one());
        Ok(TauElt { alg: self.clone(), terms })
    }

    pub fn zero(self: &Arc<Self>) -> TauElt {
        TauElt { alg: self.clone(), terms: BTreeMap::new() }
    }

    pub fn from_terms(
        self: &Arc<Self>,
        terms: impl IntoIterator<Item = (WeylElt, Coefficient)>,
    ) -> Result<TauElt, HmgError> {
        let mut out = self.zero();
        for (w, c) in terms {
            self.check(&w)?;
            out.add_term(w, c);
        }
        Ok(out)
    }

    /// Parses `c*tau(lambda=[..], sigma=..) + …`, the format of `Display`.
    pub fn parse_elt(self: &Arc<Self>, s: &str) -> Result<TauElt, HmgError> {
        let h = self.setting.hecke(self.m, self.ring);
        let x = h.parse_elt(&s.replace("tau(", "("))?;
        self.from_terms(x.terms().iter().map(|(w, c)| (*w, c.clone())))
    }

    fn from_ints(self: &Arc<Self>, exp: &IntExpansion, scale: &Coefficient) -> TauElt {
        let mut out = self.zero();
        for (w, c) in exp {
            out.add_term(*w, self.ring.mul(&self.ring.from_int(c), scale));
        }
        out
    }

    /// `τ_v·τ_w = Σ_x (μ(v)μ(w)/μ(x))·[T^M_v T^M_w]_x·τ_x`, over `Z`.
    pub fn basis_product(&self, v: &WeylElt, w: &WeylElt) -> Result<Arc<IntExpansion>, HmgError> {
        let key = (self.m, self.g, *v, *w);
        if let Some(hit) = self.setting.tau_products.lock().get(&key) {
            return Ok(hit.clone());
        }
        let hm = self.setting.hecke_local(self.m);
        let prod = hm.basis(v)?.mul(&hm.basis(w)?)?;
        let shift = (self.mu_exp(v) + self.mu_exp(w)) as i64;
        let p = self.setting.params().p;
        let mut out = Vec::with_capacity(prod.terms().len());
        for (x, c) in prod.terms() {
            let e = shift - self.mu_exp(x) as i64;
            let r = CoeffRing::QLocal { p };
            let scaled = r.mul(c, &r.p_power(p, e));
            if !scaled.is_integral() {
                return Err(HmgError::NotIntegral(format!(
                    "τ_v·τ_w at {} in {}",
                    self.setting.rd().format_elt(x),
                    self.label()
                )));
            }
            out.push((*x, scaled.parts().0));
        }
        let out = Arc::new(out);
        self.setting.tau_products.lock().insert(key, out.clone());
        Ok(out)
    }

    /// `ξ^G_{L,M}(τ^{M,G}_w)` in the `τ^{L,G}` basis, using the direction
    /// `scale·λ` and the minimal shift plus `extra`.
    pub fn xi_basis(&self, l: LeviSubset, w: &WeylElt, scale: i64, extra: u64) -> Result<Arc<IntExpansion>, HmgError> {
        self.check_chain(l)?;
        self.check(w)?;
        let key = (self.m, l, self.g, *w, scale, extra);
        if let Some(hit) = self.setting.xi_images.lock().get(&key) {
            return Ok(hit.clone());
        }
        let out = Arc::new(self.compute_xi(l, w, scale, extra)?);
        self.setting.xi_images.lock().insert(key, out.clone());
        Ok(out)
    }

    fn check_chain(&self, l: LeviSubset) -> Result<(), HmgError> {
        if self.m.is_subset(&l) && l.is_subset(&self.g) {
            Ok(())
        } else {
            Err(HmgError::Chain(format!("{} ⊆ {} ⊆ {} fails", self.m.label(), l.label(), self.g.label())))
        }
    }

    fn compute_xi(&self, l: LeviSubset, w: &WeylElt, scale: i64, extra: u64) -> Result<IntExpansion, HmgError> {
        let rd = self.setting.rd();
        let params = self.setting.params();
        if l == self.m {
            return Ok(vec![(*w, BigInt::from(1))]);
        }
        let ld_ml = self.setting.levi_datum(self.m, l)?;
        let ld_lg = self.setting.levi_datum(l, self.g)?;
        let mut lambda: Cochar = strictly_positive_cochar(rd, &self.m, &l)?;
        lambda.iter_mut().for_each(|x| *x *= scale);
        let n = minimal_positive_shift(&ld_ml, params, w, &lambda)? + extra;
        let mut shifted = lambda;
        shifted.iter_mut().for_each(|x| *x *= n as i64);
        let v = WeylElt::translation(shifted);
        let geom_l = self.setting.geometry(l);
        let q_vw = geom_l.q_vw(params, &v, w);
        let mu_ml = ld_ml.mu(params, w)?;
        if q_vw != mu_ml {
            return Err(HmgError::Scalar(format!("q_(nλ,w) = {} but μ(w) = {} at {}", q_vw, mu_ml, rd.format_elt(w))));
        }
        let hl = self.setting.hecke_local(l);
        let f = hl.fundamental_element(&v, w)?;
        let p = params.p;
        let r = CoeffRing::QLocal { p };
        let top = ld_lg.mu(params, w)?.exp as i64;
        let mut out = Vec::with_capacity(f.terms().len());
        for (y, c) in f.terms() {
            let e = top - ld_lg.mu(params, y)?.exp as i64;
            let scaled = r.mul(c, &r.p_power(p, e));
            if !scaled.is_integral() {
                return Err(HmgError::NotIntegral(format!(
                    "ξ(τ_w) at {} for w = {}",
                    rd.format_elt(y),
                    rd.format_elt(w)
                )));
            }
            out.push((*y, scaled.parts().0));
        }
        Ok(out)
    }

    /// Checks `ξ(τ_w) = τ_w + Σ_{w' <_L w} c τ_{w'}` with integer `c`.
    pub fn check_xi_triangular(&self, l: LeviSubset, w: &WeylElt, exp: &IntExpansion) -> Result<(), HmgError> {
        let geom_l = self.setting.geometry(l);
        let rd = self.setting.rd();
        let mut lead = false;
        for (y, c) in exp {
            if y == w {
                if *c != BigInt::from(1) {
                    return Err(HmgError::Scalar(format!("leading coefficient {c} at {}", rd.format_elt(w))));
                }
                lead = true;
            } else if !geom_l.bruhat_leq(y, w) {
                return Err(HmgError::Scalar(format!("{} not below {}", rd.format_elt(y), rd.format_elt(w))));
            }
        }
        if lead {
            Ok(())
        } else {
            Err(HmgError::Scalar(format!("no leading term at {}", rd.format_elt(w))))
        }
    }
}

/// An element of `H(M,G)` in the `τ` basis.
#[derive(Clone)]
pub struct TauElt {
    alg: Arc<HmgAlgebra>,
    terms: BTreeMap<WeylElt, Coefficient>,
}

impl PartialEq for TauElt {
    fn eq(&self, other: &Self) -> bool {
        self.alg.same(&other.alg) && self.terms == other.terms
    }
}

impl fmt::Debug for TauElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {self}", self.alg.label())
    }
}

impl fmt::Display for TauElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let rd = self.alg.setting.rd();
        let p = self.alg.setting.params().p;
        let parts: Vec<String> =
            self.terms.iter().map(|(w, c)| format!("{}*tau{}", c.display_with(p), rd.format_elt(w))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl TauElt {
    pub fn algebra(&self) -> &Arc<HmgAlgebra> {
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

    fn add_term(&mut self, w: WeylElt, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        let ring = self.alg.ring;
        let next = match self.terms.get(&w) {
            Some(old) => ring.add(old, &c),
            None => c,
        };
        if next.is_zero() {
            self.terms.remove(&w);
        } else {
            self.terms.insert(w, next);
        }
    }

    pub fn add(&self, other: &TauElt) -> Result<TauElt, HmgError> {
        if !self.alg.same(&other.alg) {
            return Err(HmgError::Mismatch);
        }
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(*w, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Coefficient) -> TauElt {
        let mut out = self.alg.zero();
        for (w, x) in &self.terms {
            out.add_term(*w, self.alg.ring.mul(x, c));
        }
        out
    }

    /// Product in `H(M,G)`.
    pub fn mul(&self, other: &TauElt) -> Result<TauElt, HmgError> {
        if !self.alg.same(&other.alg) {
            return Err(HmgError::Mismatch);
        }
        let ring = self.alg.ring;
        let mut out = self.alg.zero();
        for (v, a) in &self.terms {
            for (w, b) in &other.terms {
                let ab = ring.mul(a, b);
                for (x, c) in self.alg.basis_product(v, w)?.iter() {
                    out.add_term(*x, ring.mul(&ring.from_int(c), &ab));
                }
            }
        }
        Ok(out)
    }

    /// `θ^{L,G}_M`: `τ^{M,G}_w ↦ μ_{U_{P_L}}(w)·τ^{M,L}_w` with `μ` over
    /// `Σ_G^+ ∖ Σ_L`.
    pub fn theta(&self, l: LeviSubset) -> Result<TauElt, HmgError> {
        let alg = &self.alg;
        alg.check_chain(l)?;
        let target = HmgAlgebra::new(alg.setting.clone(), alg.m, l, alg.ring)?;
        let ld_lg = alg.setting.levi_datum(l, alg.g)?;
        let params = alg.setting.params();
        let mut out = target.zero();
        for (w, c) in &self.terms {
            let f = alg.ring.p_power(params.p, ld_lg.mu(params, w)?.exp as i64);
            out.add_term(*w, alg.ring.mul(c, &f));
        }
        Ok(out)
    }

    /// Same as [`TauElt::theta`] but landing in a caller-supplied algebra, so
    /// results can be compared against elements of that algebra.
    pub fn theta_into(&self, target: &Arc<HmgAlgebra>) -> Result<TauElt, HmgError> {
        let t = self.theta(target.g)?;
        Ok(TauElt { alg: target.clone(), terms: t.terms })
    }

    /// `τ_w ↦ μ(w)·T^M_w` in `H(M)` over the algebra's ring.
    pub fn to_hm(&self) -> Result<HeckeElt, HmgError> {
        let alg = &self.alg;
        let hm = alg.setting.hecke(alg.m, alg.ring);
        let p = alg.setting.params().p;
        let terms = self.terms.iter().map(|(w, c)| (*w, alg.ring.mul(c, &alg.ring.p_power(p, alg.mu_exp(w) as i64))));
        Ok(hm.from_terms(terms)?)
    }

    /// `ξ^G_{L,M}` with the canonical direction and minimal shift.
    pub fn xi(&self, l: LeviSubset) -> Result<TauElt, HmgError> {
        self.xi_with(l, 1, 0)
    }

    pub fn xi_with(&self, l: LeviSubset, scale: i64, extra: u64) -> Result<TauElt, HmgError> {
        let alg = &self.alg;
        let target = HmgAlgebra::new(alg.setting.clone(), l, alg.g, alg.ring)?;
        self.xi_into(&target, scale, extra)
    }

    pub fn xi_into(&self, target: &Arc<HmgAlgebra>, scale: i64, extra: u64) -> Result<TauElt, HmgError> {
        let alg = &self.alg;
        if target.g != alg.g || target.ring != alg.ring {
            return Err(HmgError::Mismatch);
        }
        let mut out = target.zero();
        for (w, c) in &self.terms {
            let img = alg.xi_basis(target.m, w, scale, extra)?;
            let part = target.from_ints(&img, c);
            out = out.add(&part)?;
        }
        Ok(out)
    }

    /// Least `n` with `μ(w) | q^n` for every support element.
    pub fn filtration_level(&self) -> Result<u64, HmgError> {
        let params = self.alg.setting.params();
        if !params.is_equal() {
            return Err(HmgError::UnequalParams);
        }
        let e = params.e as u64;
        Ok(self.terms.keys().map(|w| self.alg.mu_exp(w).div_ceil(e)).max().unwrap_or(0))
    }

    /// Reinterprets an element of `H(G,G)` as an element of `H(G)`.
    pub fn as_hecke(&self) -> Result<HeckeElt, HmgError> {
        if self.alg.m != self.alg.g {
            return Err(HmgError::Mismatch);
        }
        self.to_hm()
    }
}

/// `q^n`-scaled equality `T_{e^{nλ}}·ξ^G_{G,M}(τ_w) = μ(w)·T_{e^{nλ}w}`,
/// evaluated through multiplication in `H(G)`.
pub fn cor_xi_holds(alg: &Arc<HmgAlgebra>, w: &WeylElt) -> Result<bool, HmgError> {
    let setting = &alg.setting;
    let g = alg.g;
    let rd = setting.rd();
    let params = setting.params();
    let ld = setting.levi_datum(alg.m, g)?;
    let lambda = strictly_positive_cochar(rd, &alg.m, &g)?;
    let n = minimal_positive_shift(&ld, params, w, &lambda)?;
    let mut shifted = lambda;
    shifted.iter_mut().for_each(|x| *x *= n as i64);
    let v = WeylElt::translation(shifted);
    let top = HmgAlgebra::new(setting.clone(), g, g, CoeffRing::QLocal { p: params.p })?;
    let local = alg.with_ring(CoeffRing::QLocal { p: params.p })?;
    let xi = local.basis(w)?.xi_into(&top, 1, 0)?.as_hecke()?;
    let hg = setting.hecke_local(g);
    let lhs = hg.basis(&v)?.mul(&xi)?;
    let mu = hg.ring().p_power(params.p, ld.mu(params, w)?.exp as i64);
    let rhs = hg.basis(&rd.mul(&v, w))?.scale(&mu);
    Ok(lhs == rhs)
}

/// Both sides of `τ^{M,L}_w = τ^{M,L}_{−nλ}·θ^{L,G}_M(τ^{M,G}_{e^{nλ}w})` and
/// `τ^{M,G}_{nλ}·τ^{M,G}_w = μ_{U_{P_L}}(w)·τ^{M,G}_{e^{nλ}w}` for `n` the
/// minimal shift making `e^{nλ}w` positive for `L ⊂ G`.
pub fn localization_holds(alg: &Arc<HmgAlgebra>, l: LeviSubset, w: &WeylElt) -> Result<bool, HmgError> {
    alg.check_chain(l)?;
    let setting = &alg.setting;
    let rd = setting.rd();
    let params = setting.params();
    let ld_lg = setting.levi_datum(l, alg.g)?;
    let lambda = strictly_positive_cochar(rd, &l, &alg.g)?;
    let n = minimal_positive_shift(&ld_lg, params, w, &lambda)?;
    let target = HmgAlgebra::new(setting.clone(), alg.m, l, alg.ring)?;
    for extra in [0, 1] {
        let k = (n + extra) as i64;
        let mut pos = lambda;
        pos.iter_mut().for_each(|x| *x *= k);
        let mut neg = lambda;
        neg.iter_mut().for_each(|x| *x *= -k);
        let shift = WeylElt::translation(pos);
        let sw = rd.mul(&shift, w);
        let lhs = target.basis(w)?;
        let rhs = target.basis(&WeylElt::translation(neg))?.mul(&alg.basis(&sw)?.theta_into(&target)?)?;
        if lhs != rhs {
            return Ok(false);
        }
        let prod = alg.basis(&shift)?.mul(&alg.basis(w)?)?;
        let mu = alg.ring.p_power(params.p, ld_lg.mu(params, w)?.exp as i64);
        if prod != alg.basis(&sw)?.scale(&mu) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `τ_v·(μ(w)·fundamental_M(v,w))` equals `q_{v,w}·τ_{vw}` in `H(M,G)`.
pub fn alcove_scalar_holds(alg: &Arc<HmgAlgebra>, v: &WeylElt, w: &WeylElt) -> Result<bool, HmgError> {
    let setting = &alg.setting;
    let rd = setting.rd();
    let params = setting.params();
    let p = params.p;
    let hm = setting.hecke_local(alg.m);
    let fund = hm.fundamental_element(v, w)?;
    let r = CoeffRing::QLocal { p };
    let mu_w = alg.mu_exp(w) as i64;
    let mut terms = Vec::new();
    for (y, c) in fund.terms() {
        let scaled = r.mul(c, &r.p_power(p, mu_w - alg.mu_exp(y) as i64));
        if !scaled.is_integral() {
            return Err(HmgError::NotIntegral(format!("μ(w)·fundamental at {}", rd.format_elt(y))));
        }
        terms.push((*y, alg.ring.from_int(&scaled.parts().0)));
    }
    let x = alg.from_terms(terms)?;
    let lhs = alg.basis(v)?.mul(&x)?;
    let geom_g = setting.geometry(alg.g);
    let q = geom_g.q_vw(params, v, w);
    let rhs = alg.basis(&rd.mul(v, w))?.scale(&alg.ring.p_power(p, q.exp as i64));
    let scalar = {
        let ld = &alg.ld;
        let qm = ld.q_m_vw(params, v, w);
        alg.mu_exp(v) + alg.mu_exp(w) + qm.exp == q.exp + alg.mu_exp(&rd.mul(v, w))
    };
    Ok(scalar && lhs == rhs)
}
