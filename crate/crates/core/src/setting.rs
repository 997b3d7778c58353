//! A root datum with fixed parameters, caching the geometries and Hecke
//! algebras of its standard Levis so repeated lookups share one instance, along
//! with the `τ`-basis products and `ξ` images computed so far.

use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::Mutex;

use crate::hecke::{CoeffRing, HeckeAlgebra};
use crate::hmg::IntExpansion;
use crate::levi::{LeviDatum, LeviError};
use crate::rootdata::{LeviSubset, RootDatum};
use crate::weyl::{Geometry, ParamMap, WeylElt};

#[derive(Debug)]
pub struct Setting {
    rd: Arc<RootDatum>,
    params: Arc<ParamMap>,
    geoms: Mutex<HashMap<LeviSubset, Arc<Geometry>>>,
    heckes: Mutex<HashMap<(LeviSubset, CoeffRing), Arc<HeckeAlgebra>>>,
    pub(crate) tau_products: Mutex<HashMap<TauKey, Arc<IntExpansion>>>,
    pub(crate) xi_images: Mutex<HashMap<XiKey, Arc<IntExpansion>>>,
}

/// `(M, G, v, w)`.
type TauKey = (LeviSubset, LeviSubset, WeylElt, WeylElt);

/// `(M, L, G, w, direction scale, extra shift)`.
type XiKey = (LeviSubset, LeviSubset, LeviSubset, WeylElt, i64, u64);

impl Setting {
    pub fn new(rd: Arc<RootDatum>, params: ParamMap) -> Arc<Setting> {
        Arc::new(Setting {
            rd,
            params: Arc::new(params),
            geoms: Mutex::new(HashMap::new()),
            heckes: Mutex::new(HashMap::new()),
            tau_products: Mutex::new(HashMap::new()),
            xi_images: Mutex::new(HashMap::new()),
        })
    }

    pub fn rd(&self) -> &Arc<RootDatum> {
        &self.rd
    }

    pub fn params(&self) -> &Arc<ParamMap> {
        &self.params
    }

    pub fn full(&self) -> LeviSubset {
        self.rd.full_levi()
    }

    /// The geometry of `M_J` (of `G` when `J` is full).
    pub fn geometry(&self, j: LeviSubset) -> Arc<Geometry> {
        self.geoms.lock().entry(j).or_insert_with(|| Arc::new(Geometry::levi(self.rd.clone(), j))).clone()
    }

    pub fn hecke(&self, j: LeviSubset, ring: CoeffRing) -> Arc<HeckeAlgebra> {
        let geom = self.geometry(j);
        self.heckes
            .lock()
            .entry((j, ring))
            .or_insert_with(|| HeckeAlgebra::new(geom, self.params.clone(), ring))
            .clone()
    }

    /// `H(M_J)` over `Z[1/p]`.
    pub fn hecke_local(&self, j: LeviSubset) -> Arc<HeckeAlgebra> {
        self.hecke(j, CoeffRing::QLocal { p: self.params.p })
    }

    /// `μ` data for `inner ⊆ outer`.
    pub fn levi_datum(&self, inner: LeviSubset, outer: LeviSubset) -> Result<LeviDatum, LeviError> {
        LeviDatum::new(self.geometry(inner), outer)
    }
}
