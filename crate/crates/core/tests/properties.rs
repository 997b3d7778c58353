use std::sync::Arc;

use parahecke::padic::TruncatedPadic;
use parahecke::{
    CoeffRing, HeckeAlgebra, HmgAlgebra, LeviSubset, ParamMap, RootDatum, RootDatumSpec, Setting, WeylElt, MAX_RANK,
};
use proptest::prelude::*;

fn setting(spec: RootDatumSpec) -> Arc<Setting> {
    let rd = Arc::new(RootDatum::build(&spec).unwrap());
    Setting::new(rd, ParamMap::equal(3, 1).unwrap())
}

fn specs() -> Vec<RootDatumSpec> {
    vec![RootDatumSpec::Gl { n: 2 }, RootDatumSpec::Gl { n: 3 }, RootDatumSpec::Sl { n: 3 }, RootDatumSpec::Sp4]
}

/// A product of walls of the full geometry followed by a power of the
/// length-zero generator.
fn word_elt(s: &Setting, word: &[usize], omega: i64) -> WeylElt {
    let geom = s.geometry(s.full());
    let walls = geom.walls();
    let mut w = word.iter().fold(WeylElt::identity(), |acc, &i| s.rd().mul(&acc, &walls[i % walls.len()].elt));
    let mut e1 = [0i64; MAX_RANK];
    e1[0] = 1;
    let window = geom.omega_window(&e1, omega..=omega);
    if let Some(u) = window.first() {
        w = s.rd().mul(&w, u);
    }
    w
}

fn arb_word() -> impl Strategy<Value = (Vec<usize>, i64)> {
    (prop::collection::vec(0usize..8, 0..7), -1i64..=1)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn group_laws(d in 0usize..4, a in arb_word(), b in arb_word(), c in arb_word()) {
        let s = setting(specs()[d].clone());
        let rd = s.rd();
        let (x, y, z) = (word_elt(&s, &a.0, a.1), word_elt(&s, &b.0, b.1), word_elt(&s, &c.0, c.1));
        prop_assert_eq!(rd.mul(&rd.mul(&x, &y), &z), rd.mul(&x, &rd.mul(&y, &z)));
        prop_assert!(rd.mul(&x, &rd.inv(&x)).is_identity());
        prop_assert_eq!(rd.parse_elt(&rd.format_elt(&x)).unwrap(), x);
    }

    #[test]
    fn length_counts_hyperplanes(d in 0usize..4, a in arb_word(), j in 0usize..8) {
        let s = setting(specs()[d].clone());
        let rd = s.rd();
        let geom = s.geometry(s.full());
        let w = word_elt(&s, &a.0, a.1);
        let l = geom.length(&w);
        prop_assert_eq!(l, geom.separating_hyperplanes(&w).len());
        prop_assert_eq!(l, geom.length(&rd.inv(&w)));
        let (word, omega) = geom.reduced_word(&w);
        prop_assert_eq!(word.len(), l);
        prop_assert_eq!(geom.length(&omega), 0);
        let sw = rd.mul(&geom.walls()[j % geom.walls().len()].elt, &w);
        prop_assert_eq!(geom.length(&sw).abs_diff(l), 1);
    }

    #[test]
    fn q_vw_trivial_iff_lengths_add(d in 0usize..4, a in arb_word(), b in arb_word()) {
        let s = setting(specs()[d].clone());
        let geom = s.geometry(s.full());
        let params = s.params();
        let (v, w) = (word_elt(&s, &a.0, a.1), word_elt(&s, &b.0, b.1));
        let vw = s.rd().mul(&v, &w);
        let additive = geom.length(&v) + geom.length(&w) == geom.length(&vw);
        prop_assert_eq!(geom.q_vw(params, &v, &w).is_one(), additive);
        prop_assert_eq!(2 * geom.q_vw(params, &v, &w).exp as usize, geom.length(&v) + geom.length(&w) - geom.length(&vw));
    }

    #[test]
    fn mu_on_translations_is_a_product_over_roots(lam in prop::collection::vec(-3i64..=3, 3), m in 0usize..3) {
        let s = setting(RootDatumSpec::Gl { n: 3 });
        let rd = s.rd();
        let levi = LeviSubset::parse(rd, ["t", "a1", "a2"][m]).unwrap();
        let ld = s.levi_datum(levi, s.full()).unwrap();
        let w = rd.translation(&lam).unwrap();
        let cochar = rd.cochar(&lam).unwrap();
        let expected: i64 = (0..rd.roots().len())
            .filter(|&i| rd.is_positive(i) && !levi.contains_root(rd, i))
            .map(|i| (-rd.pair(i, &cochar)).max(0))
            .sum();
        prop_assert_eq!(ld.mu(s.params(), &w).unwrap().exp as i64, expected);
    }

    #[test]
    fn hecke_associative_and_invertible(d in 0usize..4, a in arb_word(), b in arb_word(), c in arb_word()) {
        let s = setting(specs()[d].clone());
        let h: Arc<HeckeAlgebra> = s.hecke_local(s.full());
        let (x, y, z) = (word_elt(&s, &a.0, a.1), word_elt(&s, &b.0, b.1), word_elt(&s, &c.0, c.1));
        let (tx, ty, tz) = (h.basis(&x).unwrap(), h.basis(&y).unwrap(), h.basis(&z).unwrap());
        let left = tx.mul(&ty).unwrap().mul(&tz).unwrap();
        let right = tx.mul(&ty.mul(&tz).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let one = h.basis(&WeylElt::identity()).unwrap();
        prop_assert_eq!(tx.mul(&h.t_inv(&x).unwrap()).unwrap(), one);
    }

    #[test]
    fn tau_products_are_integral_and_associative(a in arb_word(), b in arb_word(), c in arb_word()) {
        let s = setting(RootDatumSpec::Gl { n: 3 });
        let a1 = LeviSubset::parse(s.rd(), "a1").unwrap();
        let alg = HmgAlgebra::new(s.clone(), a1, s.full(), CoeffRing::QLocal { p: 3 }).unwrap();
        let gm = s.geometry(a1);
        let pick = |w: (Vec<usize>, i64)| {
            // Walls of M only, so the element lies in W_M.
            let walls = gm.walls();
            w.0.iter().fold(s.rd().translation(&[w.1, 0, 0]).unwrap(), |acc, &i| s.rd().mul(&acc, &walls[i % walls.len()].elt))
        };
        let (x, y, z) = (alg.basis(&pick(a)).unwrap(), alg.basis(&pick(b)).unwrap(), alg.basis(&pick(c)).unwrap());
        let xy = x.mul(&y).unwrap();
        prop_assert!(xy.terms().values().all(|c| c.is_integral()));
        prop_assert_eq!(xy.mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
    }

    #[test]
    fn truncated_padics_match_integers(p in prop::sample::select(vec![2u64, 3, 5]), a in -500i128..500, b in -500i128..500) {
        let k = 12;
        let m = (p as i128).pow(6);
        let (x, y) = (TruncatedPadic::from_int(p, a, k), TruncatedPadic::from_int(p, b, k));
        let res = |v: &TruncatedPadic| v.residue(6).unwrap() as i128;
        prop_assert_eq!(res(&x.add(&y)), (a + b).rem_euclid(m));
        prop_assert_eq!(res(&x.mul(&y)), (a * b).rem_euclid(m));
        prop_assert_eq!(res(&x.sub(&y)), (a - b).rem_euclid(m));
        if a % p as i128 != 0 {
            prop_assert_eq!(res(&x.inv().unwrap().mul(&x)), 1);
        }
    }
}
