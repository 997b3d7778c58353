//! Fixtures shared by the benchmarks in `benches/`.

use std::sync::Arc;

use parahecke::{ParamMap, RootDatum, RootDatumSpec, Setting, WeylElt};

/// `GL(n)` or another datum with equal parameters `q = p`.
pub fn setting(spec: RootDatumSpec, p: u64) -> Arc<Setting> {
    let rd = Arc::new(RootDatum::build(&spec).expect("built-in datum"));
    Setting::new(rd, ParamMap::equal(p, 1).expect("prime p"))
}

/// The ball of radius `len` in the full group with trivial length-zero part.
pub fn ball(s: &Setting, len: usize) -> Vec<WeylElt> {
    s.geometry(s.full()).enumerate_ball(len, &[WeylElt::identity()]).expect("ball")
}
