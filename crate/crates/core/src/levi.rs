//! The index function `μ_{U_P}` on `W_M`, its opposite, `δ_M`, positivity, and
//! strictly positive cocharacters.
//!
//! A [`LeviDatum`] pairs a Levi `M` with an ambient Levi `L ⊇ M` (usually `G`);
//! `μ` is taken over the roots `Σ_L^+ ∖ Σ_M`.

use std::sync::Arc;

use thiserror::Error;

use crate::arith::{PPow, PRat};
use crate::rootdata::{relative_complement_roots, Cochar, LeviSubset, RootDatum, MAX_RANK};
use crate::weyl::{ApartmentPoint, Geometry, ParamMap, WeylElt};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LeviError {
    #[error("element {0} is not in W_M for M = {1}")]
    NotInLevi(String, String),
    #[error("Levi {inner} is not contained in {outer}")]
    NotNested { inner: String, outer: String },
    #[error("no strictly positive direction: M = L = {0}")]
    NoStrictDirection(String),
    #[error("strictly positive cocharacter failed validation: {0}")]
    Validation(String),
}

/// A Levi `M` inside an ambient Levi `L`, with `M`'s own alcove geometry.
#[derive(Debug, Clone)]
pub struct LeviDatum {
    geom: Arc<Geometry>,
    outer: LeviSubset,
    complement: Vec<usize>,
}

impl LeviDatum {
    /// `M` is the Levi of `geom`; `outer` names the ambient group.
    pub fn new(geom: Arc<Geometry>, outer: LeviSubset) -> Result<LeviDatum, LeviError> {
        let inner = geom.levi_subset();
        if !inner.is_subset(&outer) {
            return Err(LeviError::NotNested { inner: inner.label(), outer: outer.label() });
        }
        let complement = relative_complement_roots(geom.rd(), &inner, &outer);
        Ok(LeviDatum { geom, outer, complement })
    }

    pub fn rd(&self) -> &Arc<RootDatum> {
        self.geom.rd()
    }

    pub fn geometry(&self) -> &Arc<Geometry> {
        &self.geom
    }

    pub fn inner(&self) -> LeviSubset {
        self.geom.levi_subset()
    }

    pub fn outer(&self) -> LeviSubset {
        self.outer
    }

    /// `Σ_L^+ ∖ Σ_M` in the datum's fixed order.
    pub fn complement_roots(&self) -> &[usize] {
        &self.complement
    }

    /// Interior point of `M`'s fundamental alcove.
    pub fn m_alcove_point(&self) -> ApartmentPoint {
        self.geom.alcove_point()
    }

    pub fn check(&self, w: &WeylElt) -> Result<(), LeviError> {
        if self.geom.contains(w) {
            Ok(())
        } else {
            Err(LeviError::NotInLevi(self.rd().format_elt(w), self.inner().label()))
        }
    }

    /// `μ_{U_P}(e^λ w_0) = ∏_{α, ⟨α,ν(λ)⟩>0} ∏_{k=0}^{⟨α,ν(λ)⟩−1} q(α,k)`.
    pub fn mu(&self, params: &ParamMap, w: &WeylElt) -> Result<PPow, LeviError> {
        self.check(w)?;
        Ok(PPow { p: params.p, exp: self.mu_exp(params, &w.lambda) })
    }

    pub(crate) fn mu_exp(&self, params: &ParamMap, lambda: &Cochar) -> u64 {
        let rd = self.rd();
        let mut exp = 0;
        for &a in &self.complement {
            let m = -rd.pair(a, lambda);
            if m > 0 {
                exp += (0..m).map(|k| params.exp_of(rd, a, k)).sum::<u64>();
            }
        }
        exp
    }

    /// `μ_{U_{P^op}}(e^λ w_0) = ∏_{α∈−(Σ^+∖Σ_M), ⟨α,ν(λ)⟩>0} ∏_{k=1}^{⟨α,ν(λ)⟩} q(α,k)`.
    pub fn mu_op(&self, params: &ParamMap, w: &WeylElt) -> Result<PPow, LeviError> {
        self.check(w)?;
        let rd = self.rd();
        let mut exp = 0;
        for &a in &self.complement {
            let neg = rd.neg(a);
            let m = -rd.pair(neg, &w.lambda);
            if m > 0 {
                exp += (1..=m).map(|k| params.exp_of(rd, neg, k)).sum::<u64>();
            }
        }
        Ok(PPow { p: params.p, exp })
    }

    /// `δ_M(w) = μ(w)/μ(w^{-1})`.
    pub fn delta(&self, params: &ParamMap, w: &WeylElt) -> Result<PRat, LeviError> {
        let a = self.mu(params, w)?;
        let b = self.mu(params, &self.rd().inv(w))?;
        Ok(a.ratio(&b))
    }

    pub fn is_positive(&self, params: &ParamMap, w: &WeylElt) -> Result<bool, LeviError> {
        Ok(self.mu(params, w)?.is_one())
    }

    pub fn is_negative(&self, params: &ParamMap, w: &WeylElt) -> Result<bool, LeviError> {
        Ok(self.mu(params, &self.rd().inv(w))?.is_one())
    }

    /// Per-root table `(root, ⟨α, ν(λ)⟩, exponent contributed to μ)`.
    pub fn exponent_table(&self, params: &ParamMap, lambda: &Cochar) -> Vec<(usize, i64, u64)> {
        let rd = self.rd();
        self.complement
            .iter()
            .map(|&a| {
                let m = -rd.pair(a, lambda);
                let e = if m > 0 { (0..m).map(|k| params.exp_of(rd, a, k)).sum() } else { 0 };
                (a, m, e)
            })
            .collect()
    }

    pub fn ell_m(&self, w: &WeylElt) -> usize {
        self.geom.length(w)
    }

    pub fn q_m_w(&self, params: &ParamMap, w: &WeylElt) -> PPow {
        self.geom.q_w(params, w)
    }

    pub fn q_m_vw(&self, params: &ParamMap, v: &WeylElt, w: &WeylElt) -> PPow {
        self.geom.q_vw(params, v, w)
    }
}

/// `λ = Σ_{α ∈ Σ_L^+ ∖ Σ_M} α^∨`, validated to be central in `M` and strictly
/// positive on `Σ_L^+ ∖ Σ_M`.
pub fn strictly_positive_cochar(rd: &RootDatum, inner: &LeviSubset, outer: &LeviSubset) -> Result<Cochar, LeviError> {
    if !inner.is_subset(outer) {
        return Err(LeviError::NotNested { inner: inner.label(), outer: outer.label() });
    }
    let comp = relative_complement_roots(rd, inner, outer);
    if comp.is_empty() {
        return Err(LeviError::NoStrictDirection(outer.label()));
    }
    let mut lambda = [0i64; MAX_RANK];
    for &a in &comp {
        for (x, c) in lambda.iter_mut().zip(rd.coroot(a)) {
            *x += c;
        }
    }
    for b in inner.positive_roots(rd) {
        if rd.pair(b, &lambda) != 0 {
            return Err(LeviError::Validation(format!("pairs nontrivially with root {:?}", rd.root(b))));
        }
    }
    for &g in &comp {
        if rd.pair(g, &lambda) <= 0 {
            return Err(LeviError::Validation(format!("not positive on root {:?}", rd.root(g))));
        }
    }
    Ok(lambda)
}

/// Least `n ≥ 1` with `μ(e^{nλ}w) = 1`, for `μ` of `M` inside `L`.
pub fn minimal_positive_shift(
    ld: &LeviDatum,
    params: &ParamMap,
    w: &WeylElt,
    lambda: &Cochar,
) -> Result<u64, LeviError> {
    ld.check(w)?;
    let rd = ld.rd();
    let bound = ld
        .complement_roots()
        .iter()
        .map(|&a| {
            let step = rd.pair(a, lambda);
            let need = -rd.pair(a, &w.lambda);
            if step <= 0 {
                0
            } else {
                (need.max(0) + step - 1) / step
            }
        })
        .max()
        .unwrap_or(0) as u64
        + 1;
    for n in 1..=bound.max(1) {
        let mut shifted = w.lambda;
        for (x, l) in shifted.iter_mut().zip(lambda) {
            *x += n as i64 * l;
        }
        if ld.mu_exp(params, &shifted) == 0 {
            return Ok(n);
        }
    }
    Err(LeviError::Validation(format!("{} does not become positive along the given direction", rd.format_elt(w))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::RootDatumSpec;

    fn setup(s: &str, j: &[usize]) -> (Arc<RootDatum>, LeviDatum) {
        let rd = Arc::new(RootDatum::build(&RootDatumSpec::from_short(s).unwrap()).unwrap());
        let lv = LeviSubset::new(&rd, j).unwrap();
        let geom = Arc::new(Geometry::levi(rd.clone(), lv));
        let ld = LeviDatum::new(geom, rd.full_levi()).unwrap();
        (rd, ld)
    }

    #[test]
    fn mu_examples() {
        let p = ParamMap::equal(3, 1).unwrap();
        let (rd, ld) = setup("gl3", &[0]);
        assert_eq!(ld.mu(&p, &rd.translation(&[-2, -1, 0]).unwrap()).unwrap().exp, 3);
        assert_eq!(ld.mu(&p, &WeylElt::identity()).unwrap().exp, 0);
        let (rd, ld) = setup("gl3", &[]);
        for m in -2..=2i64 {
            for n in -2..=2i64 {
                let w = rd.translation(&[m + n, n, 0]).unwrap();
                let want = (-m).max(0) + (-n).max(0) + (-m - n).max(0);
                assert_eq!(ld.mu(&p, &w).unwrap().exp as i64, want);
            }
        }
        let s = WeylElt::finite(rd.w0().generator(0));
        assert!(ld.mu(&p, &s).is_err());
    }

    #[test]
    fn mu_op_and_delta() {
        let p = ParamMap::equal(2, 1).unwrap();
        let (rd, ld) = setup("gl2", &[]);
        assert_eq!(ld.mu_op(&p, &rd.translation(&[1, 0]).unwrap()).unwrap().exp, 1);
        for a in -3..=3 {
            for b in -3..=3 {
                let w = rd.translation(&[a, b]).unwrap();
                assert_eq!(ld.delta(&p, &w).unwrap().exp, b - a);
            }
        }
    }

    #[test]
    fn positivity() {
        let p = ParamMap::equal(2, 1).unwrap();
        let (rd, ld) = setup("gl3", &[]);
        assert!(ld.is_positive(&p, &rd.translation(&[2, 1, 0]).unwrap()).unwrap());
        assert!(ld.is_negative(&p, &rd.translation(&[0, 1, 2]).unwrap()).unwrap());
        assert!(!ld.is_positive(&p, &rd.translation(&[0, 1, 2]).unwrap()).unwrap());
    }

    #[test]
    fn strict_cochars() {
        let rd = RootDatum::build(&RootDatumSpec::Gl { n: 3 }).unwrap();
        let t = LeviSubset::empty();
        let l1 = LeviSubset::new(&rd, &[0]).unwrap();
        let g = rd.full_levi();
        assert_eq!(&strictly_positive_cochar(&rd, &t, &g).unwrap()[..3], &[2, 0, -2]);
        assert_eq!(&strictly_positive_cochar(&rd, &t, &l1).unwrap()[..3], &[1, -1, 0]);
        assert_eq!(&strictly_positive_cochar(&rd, &l1, &g).unwrap()[..3], &[1, 1, -2]);
        assert!(matches!(strictly_positive_cochar(&rd, &g, &g), Err(LeviError::NoStrictDirection(_))));
        assert!(strictly_positive_cochar(&rd, &g, &t).is_err());
    }

    #[test]
    fn shifts() {
        let p = ParamMap::equal(2, 1).unwrap();
        let (rd, ld) = setup("gl2", &[]);
        let lam = rd.cochar(&[1, -1]).unwrap();
        let shift = |v: &[i64]| minimal_positive_shift(&ld, &p, &rd.translation(v).unwrap(), &lam).unwrap();
        assert_eq!(shift(&[0, 1]), 1);
        assert_eq!(shift(&[0, 3]), 2);
        assert_eq!(shift(&[5, 0]), 1);
    }
}
