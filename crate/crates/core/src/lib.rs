//! Extended affine Weyl groups, the index function `μ_{U_P}`, the algebras
//! `H(M,G)` with their `θ`/`ξ` morphisms, and a p-adic enumeration oracle.
#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod hecke;
pub mod hmg;
pub mod levi;
pub mod padic;
pub mod rootdata;
pub mod setting;
pub mod verify;
pub mod weyl;

pub use arith::{PPow, PRat};
pub use hecke::{CoeffRing, Coefficient, HeckeAlgebra, HeckeElt, HeckeError};
pub use hmg::{HmgAlgebra, HmgError, TauElt};
pub use levi::{minimal_positive_shift, strictly_positive_cochar, LeviDatum, LeviError};
pub use padic::{OracleConfig, PadicError, TestElement, TruncatedPadic, UnipotentRep};
pub use rootdata::{Cochar, LeviSubset, RootDatum, RootDatumError, RootDatumSpec, MAX_RANK};
pub use setting::Setting;
pub use verify::{run_check, run_suite, CheckId, CheckReport, CheckSpec, GroupConfig, SuiteConfig, VerifyError};
pub use weyl::{AffineRoot, ApartmentPoint, Geometry, ParamMap, WeylElt, WeylError};
