//! The extended affine Weyl group `W = Λ ⋊ W_0` and its alcove geometry.
//!
//! An element `e^λ σ` acts on the apartment by `x ↦ σx + ν(λ)` with
//! `ν(λ) = −λ`. Pairings `⟨β, w·x_0⟩` against the fundamental alcove point are
//! kept as integer numerators over a common denominator, so all hyperplane
//! counting is exact.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use num_traits::Zero;
use parking_lot::Mutex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::PPow;
use crate::rootdata::{Cochar, LeviSubset, RootDatum, MAX_RANK};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeylError {
    #[error("element {0} is not in W_M for M = {1}")]
    NotInLevi(String, String),
    #[error("Ω window element {0} has nonzero length")]
    WindowNotLengthZero(String),
    #[error("cannot parse element: {0}")]
    Parse(String),
    #[error("invalid parameters: {0}")]
    Params(String),
}

/// An element `e^λ σ` of the extended affine Weyl group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElt {
    pub lambda: Cochar,
    pub sigma: u16,
}

impl WeylElt {
    pub fn identity() -> WeylElt {
        WeylElt { lambda: [0; MAX_RANK], sigma: 0 }
    }

    pub fn translation(lambda: Cochar) -> WeylElt {
        WeylElt { lambda, sigma: 0 }
    }

    pub fn finite(sigma: u16) -> WeylElt {
        WeylElt { lambda: [0; MAX_RANK], sigma }
    }

    pub fn is_identity(&self) -> bool {
        *self == WeylElt::identity()
    }
}

/// An affine root `(α, k)`, naming the hyperplane `⟨α, x⟩ + k = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineRoot {
    pub root: usize,
    pub k: i64,
}

/// A point of the apartment with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApartmentPoint {
    pub coords: Vec<Ratio<i64>>,
}

impl ApartmentPoint {
    pub fn pair(&self, alpha: &[i64]) -> Ratio<i64> {
        self.coords.iter().zip(alpha).map(|(c, &a)| c * a).sum()
    }
}

/// `ν(λ) = −λ` as a point of `V`.
pub fn nu(rd: &RootDatum, lambda: &Cochar) -> ApartmentPoint {
    ApartmentPoint { coords: lambda[..rd.rank()].iter().map(|&x| Ratio::from_integer(-x)).collect() }
}

impl RootDatum {
    pub fn mul(&self, a: &WeylElt, b: &WeylElt) -> WeylElt {
        let sb = self.w0().act(a.sigma, &b.lambda);
        let mut lambda = a.lambda;
        for i in 0..self.rank() {
            lambda[i] += sb[i];
        }
        WeylElt { lambda, sigma: self.w0().mul(a.sigma, b.sigma) }
    }

    pub fn inv(&self, a: &WeylElt) -> WeylElt {
        let si = self.w0().inv(a.sigma);
        let mut lambda = self.w0().act(si, &a.lambda);
        for x in lambda.iter_mut() {
            *x = -*x;
        }
        WeylElt { lambda, sigma: si }
    }

    pub fn translation(&self, v: &[i64]) -> Result<WeylElt, WeylError> {
        self.cochar(v).map(WeylElt::translation).map_err(|e| WeylError::Parse(e.to_string()))
    }

    /// The reflection `s_{(β,k)} = e^{kβ^∨} s_β` in the hyperplane `⟨β, x⟩ + k = 0`.
    pub fn affine_reflection(&self, root: usize, k: i64) -> WeylElt {
        let d = self.rank();
        let (b, bc) = (self.root(root), self.coroot(root));
        let mut m = vec![0i64; d * d];
        for i in 0..d {
            for j in 0..d {
                m[i * d + j] = i64::from(i == j) - bc[i] * b[j];
            }
        }
        let sigma = self.w0().find_matrix(&m).expect("root reflection lies in W_0");
        let mut lambda = [0i64; MAX_RANK];
        for i in 0..d {
            lambda[i] = k * bc[i];
        }
        WeylElt { lambda, sigma }
    }

    /// `w·x = σx + ν(λ)`.
    pub fn act(&self, w: &WeylElt, x: &ApartmentPoint) -> ApartmentPoint {
        let d = self.rank();
        let m = self.w0().matrix(w.sigma);
        let coords = (0..d)
            .map(|i| {
                let sx: Ratio<i64> = (0..d).map(|j| x.coords[j] * m[i * d + j]).sum();
                sx - w.lambda[i]
            })
            .collect();
        ApartmentPoint { coords }
    }

    /// Image of the hyperplane `(β, k)` under `w`, normalized to a positive root.
    pub fn act_hyperplane(&self, w: &WeylElt, h: &AffineRoot) -> AffineRoot {
        let sb = self.w0().act_root(w.sigma, h.root);
        let k = h.k + self.pair(sb, &w.lambda);
        if self.is_positive(sb) {
            AffineRoot { root: sb, k }
        } else {
            AffineRoot { root: self.neg(sb), k: -k }
        }
    }

    /// Renders `(lambda=[..], sigma=word)`.
    pub fn format_elt(&self, w: &WeylElt) -> String {
        let lam: Vec<String> = w.lambda[..self.rank()].iter().map(|x| x.to_string()).collect();
        let word = self.w0().word(w.sigma);
        let sigma = if word.is_empty() {
            "e".to_string()
        } else {
            word.iter().map(|j| format!("s{}", j + 1)).collect::<String>()
        };
        format!("(lambda=[{}], sigma={})", lam.join(","), sigma)
    }

    /// Parses the format produced by [`RootDatum::format_elt`].
    pub fn parse_elt(&self, s: &str) -> Result<WeylElt, WeylError> {
        let err = || WeylError::Parse(s.to_string());
        let body = s.trim().strip_prefix('(').and_then(|x| x.strip_suffix(')')).ok_or_else(err)?;
        let lpos = body.find("lambda=").ok_or_else(err)?;
        let open = body[lpos..].find('[').ok_or_else(err)? + lpos;
        let close = body[open..].find(']').ok_or_else(err)? + open;
        let nums: Vec<i64> = body[open + 1..close]
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<i64>().map_err(|_| err()))
            .collect::<Result<_, _>>()?;
        let lambda = self.cochar(&nums).map_err(|e| WeylError::Parse(e.to_string()))?;
        let spos = body.find("sigma=").ok_or_else(err)?;
        let word_str = body[spos + 6..].trim();
        let sigma = self.parse_w0_word(word_str)?;
        Ok(WeylElt { lambda, sigma })
    }

    /// Parses `e`, `1`, or a product of `s1`, `s2`, … with optional separators.
    pub fn parse_w0_word(&self, s: &str) -> Result<u16, WeylError> {
        let s = s.trim();
        if s.is_empty() || s == "e" || s == "1" || s == "id" {
            return Ok(0);
        }
        let mut letters = Vec::new();
        for part in s.split('s').skip(1) {
            let digits = part.trim_matches(|c: char| c == '*' || c == '.' || c.is_whitespace());
            let j: usize = digits.parse().map_err(|_| WeylError::Parse(s.to_string()))?;
            if j == 0 || j > self.semisimple_rank() {
                return Err(WeylError::Parse(format!("no simple reflection s{j}")));
            }
            letters.push(j - 1);
        }
        if !s.starts_with('s') {
            return Err(WeylError::Parse(s.to_string()));
        }
        Ok(self.w0().from_word(&letters))
    }

    pub fn format_affine_root(&self, h: &AffineRoot) -> String {
        let r: Vec<String> = self.root(h.root).iter().map(|x| x.to_string()).collect();
        format!("([{}],{})", r.join(","), h.k)
    }
}

/// Parameters `q(H)` on affine hyperplanes, as exponents of a prime `p`.
///
/// The default parameter is `q = p^e`; overrides are keyed by the `W`-orbit of
/// the hyperplane, which is `(W_0-orbit of α, k mod c_α)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamMap {
    pub p: u64,
    pub e: u32,
    overrides: BTreeMap<(usize, i64), u32>,
}

impl ParamMap {
    pub fn equal(p: u64, e: u32) -> Result<ParamMap, WeylError> {
        if p < 2 || !is_prime(p) {
            return Err(WeylError::Params(format!("{p} is not prime")));
        }
        if e == 0 {
            return Err(WeylError::Params("q = p^e needs e ≥ 1".into()));
        }
        Ok(ParamMap { p, e, overrides: BTreeMap::new() })
    }

    /// Sets `q(H)` for the orbit of the hyperplane `(α, k)`; `value` must be a
    /// power `p^f` with `f ≥ 1`.
    pub fn with_override(mut self, rd: &RootDatum, alpha: &[i64], k: i64, value: u64) -> Result<ParamMap, WeylError> {
        let root = rd.root_index(alpha).ok_or_else(|| WeylError::Params(format!("{alpha:?} is not a root")))?;
        let mut f = 0u32;
        let mut v = value;
        while v > 1 && v.is_multiple_of(self.p) {
            v /= self.p;
            f += 1;
        }
        if v != 1 || f == 0 {
            return Err(WeylError::Params(format!("{value} is not a positive power of {}", self.p)));
        }
        self.overrides.insert(orbit_key(rd, root, k), f);
        Ok(self)
    }

    pub fn is_equal(&self) -> bool {
        self.overrides.values().all(|&f| f == self.e)
    }

    pub fn q(&self) -> PPow {
        PPow { p: self.p, exp: self.e as u64 }
    }

    /// Exponent of `p` in `q(α, k)`; `α` may be any root.
    pub fn exp_of(&self, rd: &RootDatum, root: usize, k: i64) -> u64 {
        if self.overrides.is_empty() {
            return self.e as u64;
        }
        *self.overrides.get(&orbit_key(rd, root, k)).unwrap_or(&self.e) as u64
    }

    /// Checks that `q` is constant on `W`-orbits by applying random generators.
    pub fn validate(&self, rd: &RootDatum, samples: usize, seed: u64) -> Result<(), WeylError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = rd.semisimple_rank();
        let d = rd.rank();
        for _ in 0..samples {
            let root = rng.random_range(0..rd.roots().len());
            let k = rng.random_range(-6..=6);
            let g = if rng.random_bool(0.5) {
                WeylElt::finite(rd.w0().generator(rng.random_range(0..r)))
            } else {
                let mut lam = [0i64; MAX_RANK];
                lam[rng.random_range(0..d)] = if rng.random_bool(0.5) { 1 } else { -1 };
                WeylElt::translation(lam)
            };
            let img = rd.act_hyperplane(&g, &normalize(rd, root, k));
            if self.exp_of(rd, root, k) != self.exp_of(rd, img.root, img.k) {
                return Err(WeylError::Params(format!(
                    "q not constant on the orbit of {}",
                    rd.format_affine_root(&AffineRoot { root, k })
                )));
            }
        }
        Ok(())
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn normalize(rd: &RootDatum, root: usize, k: i64) -> AffineRoot {
    if rd.is_positive(root) {
        AffineRoot { root, k }
    } else {
        AffineRoot { root: rd.neg(root), k: -k }
    }
}

fn orbit_key(rd: &RootDatum, root: usize, k: i64) -> (usize, i64) {
    let c = rd.c_alpha(root);
    (rd.orbit(root), k.rem_euclid(c).min((-k).rem_euclid(c)))
}

/// A wall of the fundamental alcove and its reflection.
#[derive(Debug, Clone)]
pub struct Wall {
    pub hyperplane: AffineRoot,
    pub elt: WeylElt,
    pub label: String,
}

/// Alcove geometry of `G` or of a Levi `M` (its own alcove, walls and `Ω_M`).
pub struct Geometry {
    rd: Arc<RootDatum>,
    levi: LeviSubset,
    pos: Vec<usize>,
    denom: i64,
    walls: Vec<Wall>,
    bruhat_cache: Mutex<HashMap<(WeylElt, WeylElt), bool>>,
}

const BRUHAT_CACHE_LIMIT: usize = 1 << 20;

impl fmt::Debug for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Geometry").field("datum", &self.rd.name()).field("levi", &self.levi.label()).finish()
    }
}

impl Geometry {
    pub fn full(rd: Arc<RootDatum>) -> Geometry {
        let levi = rd.full_levi();
        Geometry::levi(rd, levi)
    }

    /// Geometry of the Levi `M_J`: hyperplanes from `Σ_M` only.
    pub fn levi(rd: Arc<RootDatum>, levi: LeviSubset) -> Geometry {
        let pos = levi.positive_roots(&rd);
        let max_height = pos.iter().map(|&b| rd.height(b)).max().unwrap_or(0);
        let denom = max_height + 1;
        let mut walls = Vec::new();
        for j in levi.indices() {
            let root = rd.simple_index(j);
            walls.push(Wall {
                hyperplane: AffineRoot { root, k: 0 },
                elt: rd.affine_reflection(root, 0),
                label: format!("s{}", j + 1),
            });
        }
        let comps = levi_components(&rd, &levi);
        let many = comps.len() > 1;
        for (c, comp) in comps.iter().enumerate() {
            let mask: u32 = comp.iter().map(|&i| 1u32 << i).sum();
            let theta = pos
                .iter()
                .copied()
                .filter(|&b| support(&rd, b) & !mask == 0)
                .max_by_key(|&b| rd.height(b))
                .expect("component has a highest root");
            walls.push(Wall {
                hyperplane: AffineRoot { root: theta, k: -1 },
                elt: rd.affine_reflection(theta, -1),
                label: if many { format!("s0_{}", c + 1) } else { "s0".to_string() },
            });
        }
        Geometry { rd, levi, pos, denom, walls, bruhat_cache: Mutex::new(HashMap::new()) }
    }

    pub fn rd(&self) -> &Arc<RootDatum> {
        &self.rd
    }

    pub fn levi_subset(&self) -> LeviSubset {
        self.levi
    }

    pub fn is_full(&self) -> bool {
        self.levi.is_full(&self.rd)
    }

    /// Positive roots whose hyperplanes this geometry sees.
    pub fn positive_roots(&self) -> &[usize] {
        &self.pos
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn contains(&self, w: &WeylElt) -> bool {
        self.levi.contains_w0(&self.rd, w.sigma)
    }

    pub fn check_contains(&self, w: &WeylElt) -> Result<(), WeylError> {
        if self.contains(w) {
            Ok(())
        } else {
            Err(WeylError::NotInLevi(self.rd.format_elt(w), self.levi.label()))
        }
    }

    /// Fundamental alcove interior point: `⟨α_j, x_0⟩ = 1/(h+1)` for the simple
    /// roots of this geometry, free coordinates zero.
    pub fn alcove_point(&self) -> ApartmentPoint {
        let rows: Vec<&[i64]> = self.levi.indices().iter().map(|&j| self.rd.simple_roots()[j].as_slice()).collect();
        let rhs = Ratio::new(1, self.denom);
        solve_free_zero(&rows, rhs, self.rd.rank())
    }

    /// `denom · ⟨β, w·x_0⟩` for a root `β` of this geometry.
    fn pairing_num(&self, w: &WeylElt, root: usize) -> i64 {
        let si = self.rd.w0().inv(w.sigma);
        self.rd.height(self.rd.w0().act_root(si, root)) - self.denom * self.rd.pair(root, &w.lambda)
    }

    /// Exact pairing `⟨β, w·x_0⟩`.
    pub fn pairing(&self, w: &WeylElt, root: usize) -> Ratio<i64> {
        Ratio::new(self.pairing_num(w, root), self.denom)
    }

    pub fn length(&self, w: &WeylElt) -> usize {
        self.pos.iter().map(|&b| self.pairing_num(w, b).div_euclid(self.denom).unsigned_abs() as usize).sum()
    }

    /// Hyperplanes separating `x_0` from `w·x_0`, each with positive root.
    pub fn separating_hyperplanes(&self, w: &WeylElt) -> Vec<AffineRoot> {
        let mut out = Vec::new();
        for &b in &self.pos {
            let f = self.pairing_num(w, b).div_euclid(self.denom);
            if f >= 1 {
                out.extend((1..=f).map(|t| AffineRoot { root: b, k: -t }));
            } else if f <= -1 {
                out.extend((0..-f).map(|k| AffineRoot { root: b, k }));
            }
        }
        out
    }

    pub fn q_w(&self, params: &ParamMap, w: &WeylElt) -> PPow {
        let exp = if params.overrides.is_empty() {
            params.e as u64 * self.length(w) as u64
        } else {
            self.separating_hyperplanes(w).iter().map(|h| params.exp_of(&self.rd, h.root, h.k)).sum()
        };
        PPow { p: params.p, exp }
    }

    /// `∏ q(H)` over `𝔥_v ∩ v𝔥_w`.
    pub fn q_vw(&self, params: &ParamMap, v: &WeylElt, w: &WeylElt) -> PPow {
        let hv: HashSet<AffineRoot> = self.separating_hyperplanes(v).into_iter().collect();
        let exp = self
            .separating_hyperplanes(w)
            .iter()
            .map(|h| self.rd.act_hyperplane(v, h))
            .filter(|h| hv.contains(h))
            .map(|h| params.exp_of(&self.rd, h.root, h.k))
            .sum();
        PPow { p: params.p, exp }
    }

    /// Parameter `q_s` of a wall.
    pub fn wall_param(&self, params: &ParamMap, wall: usize) -> u64 {
        let h = self.walls[wall].hyperplane;
        params.exp_of(&self.rd, h.root, h.k)
    }

    /// Whether the wall reflection `s` satisfies `ℓ(sw) < ℓ(w)`.
    pub fn is_left_descent(&self, w: &WeylElt, wall: usize) -> bool {
        let h = self.walls[wall].hyperplane;
        let a = self.rd.height(h.root) + h.k * self.denom;
        let b = self.pairing_num(w, h.root) + h.k * self.denom;
        (a > 0) != (b > 0)
    }

    /// Whether `ℓ(ws) < ℓ(w)`.
    pub fn is_right_descent(&self, w: &WeylElt, wall: usize) -> bool {
        self.is_left_descent(&self.rd.inv(w), wall)
    }

    pub fn first_left_descent(&self, w: &WeylElt) -> Option<usize> {
        (0..self.walls.len()).find(|&s| self.is_left_descent(w, s))
    }

    /// Greedy left-descent word: `w = s_1⋯s_n·u` with `ℓ(u) = 0`.
    pub fn reduced_word(&self, w: &WeylElt) -> (Vec<usize>, WeylElt) {
        let mut word = Vec::new();
        let mut cur = *w;
        while let Some(s) = self.first_left_descent(&cur) {
            word.push(s);
            cur = self.rd.mul(&self.walls[s].elt, &cur);
        }
        (word, cur)
    }

    pub fn omega_part(&self, w: &WeylElt) -> WeylElt {
        self.reduced_word(w).1
    }

    pub fn format_word(&self, word: &[usize], omega: &WeylElt) -> String {
        let mut parts: Vec<String> = word.iter().map(|&s| self.walls[s].label.clone()).collect();
        if !omega.is_identity() {
            parts.push(format!("u{}", self.rd.format_elt(omega)));
        }
        if parts.is_empty() {
            "e".to_string()
        } else {
            parts.join("·")
        }
    }

    /// Bruhat order: equal `Ω` parts and comparable `W^aff` parts.
    pub fn bruhat_leq(&self, v: &WeylElt, w: &WeylElt) -> bool {
        if v == w {
            return true;
        }
        if let Some(&r) = self.bruhat_cache.lock().get(&(*v, *w)) {
            return r;
        }
        let r = self.bruhat_uncached(*v, *w);
        let mut cache = self.bruhat_cache.lock();
        if cache.len() >= BRUHAT_CACHE_LIMIT {
            cache.clear();
        }
        cache.insert((*v, *w), r);
        r
    }

    fn bruhat_uncached(&self, mut v: WeylElt, mut w: WeylElt) -> bool {
        let mut lv = self.length(&v);
        let mut lw = self.length(&w);
        loop {
            if v == w {
                return true;
            }
            if lv >= lw {
                return false;
            }
            let s = self.first_left_descent(&w).expect("positive length has a descent");
            let se = self.walls[s].elt;
            if self.is_left_descent(&v, s) {
                v = self.rd.mul(&se, &v);
                lv -= 1;
            }
            w = self.rd.mul(&se, &w);
            lw -= 1;
        }
    }

    /// Length-0 elements `omega_part(e^{kλ})` for `k` in the given range.
    pub fn omega_window(&self, lambda: &Cochar, powers: std::ops::RangeInclusive<i64>) -> Vec<WeylElt> {
        let set: BTreeSet<WeylElt> = powers
            .map(|k| {
                let mut l = *lambda;
                l.iter_mut().for_each(|x| *x *= k);
                self.omega_part(&WeylElt::translation(l))
            })
            .collect();
        set.into_iter().collect()
    }

    /// The window `{u^{-1}, 1, u}` with `u = omega_part(e^{ε_1})`.
    pub fn default_omega_window(&self) -> Vec<WeylElt> {
        let mut e1 = [0i64; MAX_RANK];
        e1[0] = 1;
        self.omega_window(&e1, -1..=1)
    }

    /// All `w` with `ℓ(w) ≤ L` whose `Ω` part lies in the window, sorted by
    /// length and then by element.
    pub fn enumerate_ball(&self, max_len: usize, window: &[WeylElt]) -> Result<Vec<WeylElt>, WeylError> {
        for u in window {
            if self.length(u) != 0 {
                return Err(WeylError::WindowNotLengthZero(self.rd.format_elt(u)));
            }
        }
        let mut layer: BTreeSet<WeylElt> = window.iter().copied().collect();
        let mut out: Vec<WeylElt> = layer.iter().copied().collect();
        for _ in 0..max_len {
            let mut next = BTreeSet::new();
            for w in &layer {
                for s in 0..self.walls.len() {
                    if !self.is_left_descent(w, s) {
                        next.insert(self.rd.mul(&self.walls[s].elt, w));
                    }
                }
            }
            out.extend(next.iter().copied());
            layer = next;
        }
        Ok(out)
    }
}

fn support(rd: &RootDatum, b: usize) -> u32 {
    rd.coeffs(b).iter().enumerate().filter(|(_, &x)| x != 0).fold(0, |m, (i, _)| m | (1 << i))
}

fn levi_components(rd: &RootDatum, levi: &LeviSubset) -> Vec<Vec<usize>> {
    let idx = levi.indices();
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut assigned = HashSet::new();
    for &start in &idx {
        if assigned.contains(&start) {
            continue;
        }
        let mut comp = vec![start];
        assigned.insert(start);
        let mut i = 0;
        while i < comp.len() {
            let a = comp[i];
            for &b in &idx {
                if !assigned.contains(&b) && rd.cartan()[a][b] != 0 {
                    assigned.insert(b);
                    comp.push(b);
                }
            }
            i += 1;
        }
        comp.sort();
        comps.push(comp);
    }
    comps
}

/// Solves `⟨row, x⟩ = rhs` for every row, setting free coordinates to zero.
fn solve_free_zero(rows: &[&[i64]], rhs: Ratio<i64>, d: usize) -> ApartmentPoint {
    let mut m: Vec<Vec<Ratio<i64>>> = rows
        .iter()
        .map(|r| {
            let mut v: Vec<Ratio<i64>> = r.iter().map(|&x| Ratio::from_integer(x)).collect();
            v.push(rhs);
            v
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..d {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let pv = m[row][col];
        m[row].iter_mut().for_each(|x| *x /= pv);
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col];
                for c in 0..=d {
                    let t = m[row][c] * f;
                    m[i][c] -= t;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let mut coords = vec![Ratio::zero(); d];
    for (r, &c) in pivots.iter().enumerate() {
        coords[c] = m[r][d];
    }
    ApartmentPoint { coords }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::RootDatumSpec;

    fn rd(s: &str) -> Arc<RootDatum> {
        Arc::new(RootDatum::build(&RootDatumSpec::from_short(s).unwrap()).unwrap())
    }

    fn t(rd: &RootDatum, v: &[i64]) -> WeylElt {
        rd.translation(v).unwrap()
    }

    #[test]
    fn nu_is_minus_lambda() {
        let r = rd("gl3");
        let lam = r.cochar(&[-2, -1, 0]).unwrap();
        let e13 = r.root_index(&[1, 0, -1]).unwrap();
        assert_eq!(nu(&r, &lam).pair(r.root(e13)), Ratio::from_integer(2));
        let r2 = rd("gl2");
        assert_eq!(nu(&r2, &r2.cochar(&[1, 0]).unwrap()).pair(r2.root(0)), Ratio::from_integer(-1));
    }

    #[test]
    fn act_example() {
        let r = rd("gl2");
        let x = ApartmentPoint { coords: vec![Ratio::new(1, 3), Ratio::from_integer(0)] };
        let s = WeylElt::finite(r.w0().generator(0));
        let w = r.mul(&t(&r, &[0, 1]), &s);
        assert_eq!(r.act(&w, &x).pair(r.root(0)), Ratio::new(2, 3));
    }

    #[test]
    fn alcove_point_gl3() {
        let r = rd("gl3");
        let g = Geometry::full(r.clone());
        let x = g.alcove_point();
        for b in 0..r.n_pos() {
            let v = x.pair(r.root(b));
            assert!(v > Ratio::zero() && v < Ratio::from_integer(1));
        }
        assert_eq!(x.pair(r.root(0)), Ratio::new(1, 3));
    }

    #[test]
    fn hyperplanes_gl2() {
        let r = rd("gl2");
        let g = Geometry::full(r.clone());
        let w = t(&r, &[1, -1]);
        let hs = g.separating_hyperplanes(&w);
        assert_eq!(hs.len(), 2);
        assert_eq!(g.length(&w), 2);
        let ks: BTreeSet<i64> = hs.iter().map(|h| h.k).collect();
        assert_eq!(ks, [0, 1].into_iter().collect());
    }

    #[test]
    fn lengths_gl3() {
        let r = rd("gl3");
        let g = Geometry::full(r.clone());
        let w = t(&r, &[-2, -1, 0]);
        assert_eq!(g.length(&w), 4);
        let m = Geometry::levi(r.clone(), LeviSubset::new(&r, &[0]).unwrap());
        assert_eq!(m.separating_hyperplanes(&w).len(), 1);
        assert_eq!(m.length(&w), 1);
        let p = ParamMap::equal(3, 1).unwrap();
        assert_eq!(g.q_w(&p, &w).exp, 4);
        assert_eq!(m.q_w(&p, &w).exp, 1);
    }

    #[test]
    fn omega_elements_gl2() {
        let r = rd("gl2");
        let g = Geometry::full(r.clone());
        let s = WeylElt::finite(r.w0().generator(0));
        let u = r.mul(&t(&r, &[0, 1]), &s);
        assert_eq!(g.length(&u), 0);
        assert_eq!(g.reduced_word(&u), (vec![], u));
        assert_eq!(g.omega_part(&t(&r, &[0, 1])), u);
        let (word, om) = g.reduced_word(&t(&r, &[1, 0]));
        assert_eq!(word.len(), 1);
        assert_eq!(g.length(&om), 0);
        assert!(!om.is_identity());
    }

    #[test]
    fn q_vw_gl2() {
        let r = rd("gl2");
        let g = Geometry::full(r.clone());
        let p = ParamMap::equal(2, 1).unwrap();
        assert_eq!(g.q_vw(&p, &t(&r, &[0, 1]), &t(&r, &[1, 0])).exp, 1);
        for (i, wall) in g.walls().iter().enumerate() {
            assert_eq!(g.q_vw(&p, &wall.elt, &wall.elt).exp, g.wall_param(&p, i));
        }
    }

    #[test]
    fn ball_sizes() {
        let r = rd("gl2");
        let g = Geometry::full(r.clone());
        assert_eq!(g.enumerate_ball(0, &[WeylElt::identity()]).unwrap().len(), 1);
        assert_eq!(g.enumerate_ball(2, &[WeylElt::identity()]).unwrap().len(), 5);
        let r = rd("sl2");
        let g = Geometry::full(r.clone());
        assert_eq!(g.enumerate_ball(3, &[WeylElt::identity()]).unwrap().len(), 7);
        let bad = t(&r, &[1]);
        assert!(g.enumerate_ball(1, &[bad]).is_err());
    }

    #[test]
    fn walls_of_sl2_carry_two_parameters() {
        let r = rd("sl2");
        let g = Geometry::full(r.clone());
        let p = ParamMap::equal(2, 1).unwrap().with_override(&r, &[2], 1, 8).unwrap();
        p.validate(&r, 200, 1).unwrap();
        let exps: Vec<u64> = (0..g.walls().len()).map(|i| g.wall_param(&p, i)).collect();
        assert_eq!(exps, vec![1, 3]);
        assert!(ParamMap::equal(4, 1).is_err());
    }

    #[test]
    fn element_round_trip() {
        let r = rd("sp4");
        for s in 0..r.w0().order() as u16 {
            let w = WeylElt { lambda: r.cochar(&[3, -2]).unwrap(), sigma: s };
            assert_eq!(r.parse_elt(&r.format_elt(&w)).unwrap(), w);
        }
        assert!(r.parse_elt("(lambda=[1], sigma=e)").is_err());
        assert!(r.parse_elt("lambda=[1,2]").is_err());
    }

    #[test]
    fn bruhat_basics() {
        let r = rd("gl2");
        let g = Geometry::full(r.clone());
        let ball = g.enumerate_ball(3, &g.default_omega_window()).unwrap();
        for w in &ball {
            assert!(g.bruhat_leq(w, w));
            if g.omega_part(w).is_identity() {
                assert!(g.bruhat_leq(&WeylElt::identity(), w));
            } else {
                assert!(!g.bruhat_leq(&WeylElt::identity(), w));
            }
        }
    }
}
