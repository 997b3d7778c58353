use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use parahecke::padic::{cross_check_mu, double_coset_oracle, parse_diag};
use parahecke::{CoeffRing, HmgAlgebra, LeviSubset, OracleConfig, RootDatumSpec, TestElement, UnipotentRep};
use parahecke_bench::{ball, setting};

fn weyl(c: &mut Criterion) {
    let s = setting(RootDatumSpec::Gl { n: 3 }, 3);
    let geom = s.geometry(s.full());
    let elts = ball(&s, 5);
    c.bench_function("gl3 length on the radius-5 ball", |b| {
        b.iter(|| elts.iter().map(|w| geom.length(black_box(w))).sum::<usize>())
    });
    c.bench_function("gl3 enumerate radius-6 ball", |b| b.iter(|| ball(&s, black_box(6)).len()));
}

fn hecke(c: &mut Criterion) {
    let s = setting(RootDatumSpec::Sl { n: 3 }, 2);
    let h = s.hecke_local(s.full());
    let elts = ball(&s, 4);
    let (v, w) = (elts[elts.len() / 2], elts[elts.len() - 1]);
    let (tv, tw) = (h.basis(&v).unwrap(), h.basis(&w).unwrap());
    c.bench_function("sl3 T_v T_w at length 4", |b| b.iter(|| tv.mul(black_box(&tw)).unwrap()));
    c.bench_function("sl3 fundamental element at length 4", |b| {
        b.iter(|| h.fundamental_element(black_box(&v), black_box(&w)).unwrap())
    });
}

fn hmg(c: &mut Criterion) {
    let s = setting(RootDatumSpec::Gl { n: 3 }, 2);
    let a1 = LeviSubset::parse(s.rd(), "a1").unwrap();
    let ring = CoeffRing::QLocal { p: 2 };
    let w = s.rd().parse_elt("(lambda=[1,0,-1], sigma=s1)").unwrap();
    c.bench_function("gl3 xi from the torus to GL2xGL1, uncached", |b| {
        b.iter(|| {
            let s = setting(RootDatumSpec::Gl { n: 3 }, 2);
            let alg = HmgAlgebra::new(s.clone(), LeviSubset::empty(), s.full(), ring).unwrap();
            let x = alg.basis(&s.rd().translation(&[0, 1, -1]).unwrap()).unwrap();
            x.xi(a1).unwrap()
        })
    });
    c.bench_function("gl3 tau product in H(GL2xGL1, G), uncached", |b| {
        b.iter(|| {
            let s = setting(RootDatumSpec::Gl { n: 3 }, 2);
            let alg = HmgAlgebra::new(s.clone(), a1, s.full(), ring).unwrap();
            let x = alg.basis(&w).unwrap();
            x.mul(&x).unwrap()
        })
    });
}

fn oracle(c: &mut Criterion) {
    let cfg = OracleConfig { k: Some(8), r: Some(4), ..OracleConfig::borel(3, 2) };
    c.bench_function("gl3 oracle mu at diag(p^-2,p^-1,1)", |b| {
        b.iter(|| cross_check_mu(&cfg, black_box(&[-2, -1, 0])).unwrap())
    });
    let elt = TestElement {
        diag: parse_diag("diag(p^-1,p)").unwrap(),
        unipotent: UnipotentRep::parse(2, "u12=2/p^2").unwrap(),
    };
    let cfg = OracleConfig::borel(2, 3);
    c.bench_function("gl2 double coset decomposition", |b| {
        b.iter(|| double_coset_oracle(&cfg, black_box(&elt)).unwrap())
    });
}

criterion_group!(benches, weyl, hecke, hmg, oracle);
criterion_main!(benches);
