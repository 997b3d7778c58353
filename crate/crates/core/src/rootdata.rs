//! Split reduced root data, their finite Weyl groups, and standard Levi subsets.
//!
//! Characters and cocharacters are both integer vectors in `Z^d`, paired by the
//! dot product. The finite Weyl group is tabulated once at construction: every
//! element carries its matrix on the cocharacter lattice, a reduced word, and
//! the permutation it induces on the roots.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported dimension of the cocharacter lattice.
pub const MAX_RANK: usize = 8;
const MAX_ROOTS: usize = 4096;
const MAX_W0: usize = 2000;

/// A cocharacter, stored in a fixed-size array; entries past the rank are zero.
pub type Cochar = [i64; MAX_RANK];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootDatumError {
    #[error("rank must be between 1 and {max}, got {0}", max = MAX_RANK)]
    BadRank(usize),
    #[error("malformed root datum: {0}")]
    Shape(String),
    #[error("Cartan matrix is not of finite type: {0}")]
    NotFiniteType(String),
    #[error("coroot is not integral: {0}")]
    NonIntegralCoroot(String),
    #[error("root system is not reduced: {0}")]
    NotReduced(String),
    #[error("finite Weyl group has more than {max} elements", max = MAX_W0)]
    TooLarge,
    #[error("invalid Levi subset: {0}")]
    BadLevi(String),
}

/// Named or explicit description of a root datum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum RootDatumSpec {
    Gl {
        n: usize,
    },
    Sl {
        n: usize,
    },
    Pgl {
        n: usize,
    },
    #[serde(alias = "sp")]
    Sp4,
    Explicit {
        rank: usize,
        simple_roots: Vec<Vec<i64>>,
        simple_coroots: Vec<Vec<i64>>,
    },
}

impl RootDatumSpec {
    /// Parses short names such as `gl3`, `sl2`, `pgl2`, `sp4`.
    pub fn from_short(s: &str) -> Result<Self, RootDatumError> {
        let s = s.trim().to_ascii_lowercase();
        if s == "sp4" {
            return Ok(RootDatumSpec::Sp4);
        }
        let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
        let (kind, digits) = s.split_at(split);
        let n: usize = digits.parse().map_err(|_| RootDatumError::Shape(format!("unknown group type '{s}'")))?;
        match kind {
            "gl" => Ok(RootDatumSpec::Gl { n }),
            "sl" => Ok(RootDatumSpec::Sl { n }),
            "pgl" => Ok(RootDatumSpec::Pgl { n }),
            _ => Err(RootDatumError::Shape(format!("unknown group type '{s}'"))),
        }
    }

    pub fn short_name(&self) -> String {
        match self {
            RootDatumSpec::Gl { n } => format!("GL({n})"),
            RootDatumSpec::Sl { n } => format!("SL({n})"),
            RootDatumSpec::Pgl { n } => format!("PGL({n})"),
            RootDatumSpec::Sp4 => "SP(4)".to_string(),
            RootDatumSpec::Explicit { rank, simple_roots, .. } => {
                format!("explicit(rank {rank}, {} simple roots)", simple_roots.len())
            }
        }
    }
}

/// An irreducible component of the Dynkin diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub simple: Vec<usize>,
    pub highest_root: usize,
}

/// The finite Weyl group `W_0`, fully tabulated. Element 0 is the identity.
#[derive(Debug, Clone)]
pub struct FiniteWeyl {
    dim: usize,
    mats: Vec<Vec<i64>>,
    words: Vec<Vec<u8>>,
    letters: Vec<u32>,
    lmul_gen: Vec<Vec<u16>>,
    mul: Vec<Vec<u16>>,
    inv: Vec<u16>,
    root_perm: Vec<Vec<u16>>,
    generators: Vec<u16>,
}

impl FiniteWeyl {
    pub fn order(&self) -> usize {
        self.mats.len()
    }

    /// Matrix of `σ` acting on the cocharacter lattice, row-major `d × d`.
    pub fn matrix(&self, s: u16) -> &[i64] {
        &self.mats[s as usize]
    }

    /// A reduced word for `σ` in the simple reflections (0-based indices).
    pub fn word(&self, s: u16) -> &[u8] {
        &self.words[s as usize]
    }

    pub fn length(&self, s: u16) -> usize {
        self.words[s as usize].len()
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize][b as usize]
    }

    pub fn inv(&self, a: u16) -> u16 {
        self.inv[a as usize]
    }

    /// Index of the simple reflection `s_j`.
    pub fn generator(&self, j: usize) -> u16 {
        self.generators[j]
    }

    /// Left multiplication by the simple reflection `s_j`.
    pub fn gen_mul(&self, j: usize, s: u16) -> u16 {
        self.lmul_gen[j][s as usize]
    }

    /// Index of `σ·β` for the root with index `root`.
    pub fn act_root(&self, s: u16, root: usize) -> usize {
        self.root_perm[s as usize][root] as usize
    }

    /// `σ·λ` for a cocharacter.
    pub fn act(&self, s: u16, lambda: &Cochar) -> Cochar {
        let m = &self.mats[s as usize];
        let mut out = [0i64; MAX_RANK];
        for (i, o) in out.iter_mut().enumerate().take(self.dim) {
            *o = (0..self.dim).map(|j| m[i * self.dim + j] * lambda[j]).sum();
        }
        out
    }

    /// Whether every letter of the reduced word of `σ` lies in the mask.
    pub fn in_parabolic(&self, s: u16, mask: u32) -> bool {
        self.letters[s as usize] & !mask == 0
    }

    /// Looks up an element by its matrix on the cocharacter lattice.
    pub fn find_matrix(&self, m: &[i64]) -> Option<u16> {
        self.mats.iter().position(|x| x == m).map(|i| i as u16)
    }

    /// Element with the given word (letters applied left to right as a product).
    pub fn from_word(&self, word: &[usize]) -> u16 {
        let mut s = 0u16;
        for &j in word.iter().rev() {
            s = self.gen_mul(j, s);
        }
        s
    }
}

/// A split reduced root datum with its finite Weyl group.
#[derive(Debug, Clone)]
pub struct RootDatum {
    name: String,
    dim: usize,
    simple_roots: Vec<Vec<i64>>,
    simple_coroots: Vec<Vec<i64>>,
    cartan: Vec<Vec<i64>>,
    roots: Vec<Vec<i64>>,
    coroots: Vec<Vec<i64>>,
    coeffs: Vec<Vec<i64>>,
    heights: Vec<i64>,
    n_pos: usize,
    index: HashMap<Vec<i64>, usize>,
    orbit: Vec<usize>,
    c_alpha: Vec<i64>,
    components: Vec<Component>,
    w0: FiniteWeyl,
}

impl PartialEq for RootDatum {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.simple_roots == other.simple_roots && self.simple_coroots == other.simple_coroots
    }
}

impl Eq for RootDatum {}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn unit(d: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; d];
    v[i] = 1;
    v
}

fn cartan_type_a(r: usize) -> Vec<Vec<i64>> {
    (0..r)
        .map(|i| {
            (0..r)
                .map(|j| match (i as i64 - j as i64).abs() {
                    0 => 2,
                    1 => -1,
                    _ => 0,
                })
                .collect()
        })
        .collect()
}

/// Rank of an integer matrix given as rows, by fraction-free elimination.
fn int_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        for i in 0..m.len() {
            if i != rank && m[i][col] != 0 {
                let (a, b) = (m[rank][col], m[i][col]);
                for c in 0..ncols {
                    m[i][c] = m[i][c] * a - m[rank][c] * b;
                }
                let g = m[i].iter().fold(0i128, |g, &x| g.gcd(&x));
                if g > 1 {
                    m[i].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}

impl RootDatum {
    /// Builds a root datum from a named type or explicit data.
    pub fn build(spec: &RootDatumSpec) -> Result<RootDatum, RootDatumError> {
        let name = spec.short_name();
        match spec {
            RootDatumSpec::Gl { n } => {
                let n = *n;
                if n < 2 {
                    return Err(RootDatumError::Shape("GL(n) needs n ≥ 2".into()));
                }
                let roots: Vec<Vec<i64>> = (0..n - 1)
                    .map(|i| {
                        let mut v = vec![0; n];
                        v[i] = 1;
                        v[i + 1] = -1;
                        v
                    })
                    .collect();
                Self::from_parts(name, n, roots.clone(), roots)
            }
            RootDatumSpec::Sl { n } => {
                let n = *n;
                if n < 2 {
                    return Err(RootDatumError::Shape("SL(n) needs n ≥ 2".into()));
                }
                let a = cartan_type_a(n - 1);
                let coroots = (0..n - 1).map(|j| unit(n - 1, j)).collect();
                Self::from_parts(name, n - 1, a, coroots)
            }
            RootDatumSpec::Pgl { n } => {
                let n = *n;
                if n < 2 {
                    return Err(RootDatumError::Shape("PGL(n) needs n ≥ 2".into()));
                }
                let a = cartan_type_a(n - 1);
                let roots = (0..n - 1).map(|i| unit(n - 1, i)).collect();
                let coroots = (0..n - 1).map(|j| (0..n - 1).map(|i| a[i][j]).collect()).collect();
                Self::from_parts(name, n - 1, roots, coroots)
            }
            RootDatumSpec::Sp4 => {
                Self::from_parts(name, 2, vec![vec![1, -1], vec![0, 2]], vec![vec![1, -1], vec![0, 1]])
            }
            RootDatumSpec::Explicit { rank, simple_roots, simple_coroots } => {
                Self::from_parts(name, *rank, simple_roots.clone(), simple_coroots.clone())
            }
        }
    }

    /// Builds a root datum from simple roots and coroots in `Z^d`.
    pub fn from_parts(
        name: String,
        dim: usize,
        simple_roots: Vec<Vec<i64>>,
        simple_coroots: Vec<Vec<i64>>,
    ) -> Result<RootDatum, RootDatumError> {
        if dim == 0 || dim > MAX_RANK {
            return Err(RootDatumError::BadRank(dim));
        }
        let r = simple_roots.len();
        if r == 0 || r != simple_coroots.len() {
            return Err(RootDatumError::Shape(format!(
                "{} simple roots but {} simple coroots",
                r,
                simple_coroots.len()
            )));
        }
        if r > 31 {
            return Err(RootDatumError::Shape("too many simple roots".into()));
        }
        if simple_roots.iter().chain(&simple_coroots).any(|v| v.len() != dim) {
            return Err(RootDatumError::Shape(format!("vectors must have length {dim}")));
        }
        if int_rank(&simple_roots) != r || int_rank(&simple_coroots) != r {
            return Err(RootDatumError::Shape("simple roots or coroots are linearly dependent".into()));
        }
        let cartan: Vec<Vec<i64>> =
            (0..r).map(|i| (0..r).map(|j| dot(&simple_roots[i], &simple_coroots[j])).collect()).collect();
        for i in 0..r {
            if cartan[i][i] != 2 {
                return Err(RootDatumError::NotFiniteType(format!("diagonal entry {i} is {}", cartan[i][i])));
            }
            for j in 0..r {
                if i == j {
                    continue;
                }
                let (a, b) = (cartan[i][j], cartan[j][i]);
                if a > 0 || (a == 0) != (b == 0) || a * b > 3 {
                    return Err(RootDatumError::NotFiniteType(format!("entries ({i},{j})={a}, ({j},{i})={b}")));
                }
            }
        }

        // Close the simple roots under simple reflections, tracking coroots and
        // simple-root coefficients alongside.
        let mut recs: Vec<(Vec<i64>, Vec<i64>, Vec<i64>)> = Vec::new();
        let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        for i in 0..r {
            let rec = (simple_roots[i].clone(), simple_coroots[i].clone(), unit(r, i));
            seen.insert(rec.0.clone(), recs.len());
            queue.push_back(recs.len());
            recs.push(rec);
        }
        while let Some(idx) = queue.pop_front() {
            for j in 0..r {
                let (b, bc, c) = recs[idx].clone();
                let pair = dot(&b, &simple_coroots[j]);
                let copair = dot(&simple_roots[j], &bc);
                let nb: Vec<i64> = b.iter().zip(&simple_roots[j]).map(|(x, a)| x - pair * a).collect();
                if seen.contains_key(&nb) {
                    continue;
                }
                let nbc: Vec<i64> = bc.iter().zip(&simple_coroots[j]).map(|(x, a)| x - copair * a).collect();
                let mut nc = c.clone();
                nc[j] -= pair;
                seen.insert(nb.clone(), recs.len());
                queue.push_back(recs.len());
                recs.push((nb, nbc, nc));
                if recs.len() > MAX_ROOTS {
                    return Err(RootDatumError::NotFiniteType("root closure does not terminate".into()));
                }
            }
        }
        for (b, _, c) in &recs {
            if !(c.iter().all(|&x| x >= 0) || c.iter().all(|&x| x <= 0)) {
                return Err(RootDatumError::NotFiniteType(format!("mixed-sign root {b:?}")));
            }
            let doubled: Vec<i64> = b.iter().map(|x| 2 * x).collect();
            if seen.contains_key(&doubled) {
                return Err(RootDatumError::NotReduced(format!("{b:?} and its double are roots")));
            }
        }
        let mut pos: Vec<(Vec<i64>, Vec<i64>, Vec<i64>)> =
            recs.into_iter().filter(|(_, _, c)| c.iter().all(|&x| x >= 0)).collect();
        pos.sort_by(|a, b| {
            let ha: i64 = a.2.iter().sum();
            let hb: i64 = b.2.iter().sum();
            ha.cmp(&hb).then_with(|| b.2.cmp(&a.2))
        });
        let n_pos = pos.len();
        let mut roots = Vec::with_capacity(2 * n_pos);
        let mut coroots = Vec::with_capacity(2 * n_pos);
        let mut coeffs = Vec::with_capacity(2 * n_pos);
        for (b, bc, c) in &pos {
            roots.push(b.clone());
            coroots.push(bc.clone());
            coeffs.push(c.clone());
        }
        for (b, bc, c) in &pos {
            roots.push(b.iter().map(|x| -x).collect());
            coroots.push(bc.iter().map(|x| -x).collect());
            coeffs.push(c.iter().map(|x| -x).collect());
        }
        for (i, (b, bc)) in roots.iter().zip(&coroots).enumerate() {
            if dot(b, bc) != 2 {
                return Err(RootDatumError::NonIntegralCoroot(format!("root {i} pairs to {}", dot(b, bc))));
            }
        }
        let heights = coeffs.iter().map(|c| c.iter().sum()).collect();
        let index: HashMap<Vec<i64>, usize> = roots.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();

        let refl_perm: Vec<Vec<u16>> = (0..r)
            .map(|j| {
                roots
                    .iter()
                    .map(|b| {
                        let pair = dot(b, &simple_coroots[j]);
                        let nb: Vec<i64> = b.iter().zip(&simple_roots[j]).map(|(x, a)| x - pair * a).collect();
                        index[&nb] as u16
                    })
                    .collect()
            })
            .collect();
        let w0 = Self::tabulate_w0(dim, &simple_roots, &simple_coroots, &refl_perm, roots.len())?;

        let mut orbit = vec![usize::MAX; roots.len()];
        let mut next = 0;
        for start in 0..n_pos {
            if orbit[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            orbit[start] = next;
            while let Some(b) = stack.pop() {
                for perm in &refl_perm {
                    let nb = perm[b] as usize;
                    if orbit[nb] == usize::MAX {
                        orbit[nb] = next;
                        stack.push(nb);
                    }
                }
            }
            next += 1;
        }
        let c_alpha = roots.iter().map(|b| b.iter().fold(0i64, |g, &x| g.gcd(&x))).collect();

        let mut comp_of: Vec<usize> = (0..r).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for i in 0..r {
            for j in 0..r {
                if i != j && cartan[i][j] != 0 {
                    let (a, b) = (find(&mut comp_of, i), find(&mut comp_of, j));
                    comp_of[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut label: HashMap<usize, usize> = HashMap::new();
        for i in 0..r {
            let root = find(&mut comp_of, i);
            let g = *label.entry(root).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[g].push(i);
        }
        let components = groups
            .into_iter()
            .map(|simple| {
                let mask: u32 = simple.iter().map(|&i| 1u32 << i).sum();
                let highest_root = (0..n_pos)
                    .filter(|&b| support_mask(&coeffs[b]) & !mask == 0)
                    .max_by_key(|&b| coeffs[b].iter().sum::<i64>())
                    .expect("component has a root");
                Component { simple, highest_root }
            })
            .collect();

        Ok(RootDatum {
            name,
            dim,
            simple_roots,
            simple_coroots,
            cartan,
            roots,
            coroots,
            coeffs,
            heights,
            n_pos,
            index,
            orbit,
            c_alpha,
            components,
            w0,
        })
    }

    fn tabulate_w0(
        dim: usize,
        simple_roots: &[Vec<i64>],
        simple_coroots: &[Vec<i64>],
        refl_perm: &[Vec<u16>],
        n_roots: usize,
    ) -> Result<FiniteWeyl, RootDatumError> {
        let r = simple_roots.len();
        // s_j acts on cocharacters by x ↦ x − ⟨α_j, x⟩ α_j^∨.
        let gen_mats: Vec<Vec<i64>> = (0..r)
            .map(|j| {
                let mut m = vec![0i64; dim * dim];
                for a in 0..dim {
                    for b in 0..dim {
                        m[a * dim + b] = i64::from(a == b) - simple_coroots[j][a] * simple_roots[j][b];
                    }
                }
                m
            })
            .collect();
        let matmul = |x: &[i64], y: &[i64]| -> Vec<i64> {
            let mut out = vec![0i64; dim * dim];
            for a in 0..dim {
                for b in 0..dim {
                    out[a * dim + b] = (0..dim).map(|c| x[a * dim + c] * y[c * dim + b]).sum();
                }
            }
            out
        };
        let mut mats = vec![(0..dim * dim).map(|i| i64::from(i % (dim + 1) == 0)).collect::<Vec<_>>()];
        let mut words: Vec<Vec<u8>> = vec![Vec::new()];
        let mut root_perm: Vec<Vec<u16>> = vec![(0..n_roots as u16).collect()];
        let mut lookup: HashMap<Vec<i64>, u16> = HashMap::new();
        lookup.insert(mats[0].clone(), 0);
        let mut lmul_gen: Vec<Vec<u16>> = vec![Vec::new(); r];
        let mut head = 0;
        while head < mats.len() {
            for j in 0..r {
                let m = matmul(&gen_mats[j], &mats[head]);
                let idx = match lookup.get(&m) {
                    Some(&i) => i,
                    None => {
                        if mats.len() >= MAX_W0 {
                            return Err(RootDatumError::TooLarge);
                        }
                        let i = mats.len() as u16;
                        let mut w = vec![j as u8];
                        w.extend_from_slice(&words[head]);
                        let perm = root_perm[head].iter().map(|&b| refl_perm[j][b as usize]).collect();
                        lookup.insert(m.clone(), i);
                        mats.push(m);
                        words.push(w);
                        root_perm.push(perm);
                        i
                    }
                };
                lmul_gen[j].push(idx);
            }
            head += 1;
        }
        let n = mats.len();
        let apply_word = |word: &[u8], start: u16| -> u16 {
            word.iter().rev().fold(start, |s, &j| lmul_gen[j as usize][s as usize])
        };
        let mul: Vec<Vec<u16>> = (0..n).map(|a| (0..n).map(|b| apply_word(&words[a], b as u16)).collect()).collect();
        let inv: Vec<u16> = (0..n)
            .map(|a| {
                let rev: Vec<u8> = words[a].iter().rev().copied().collect();
                apply_word(&rev, 0)
            })
            .collect();
        let letters = words.iter().map(|w| w.iter().fold(0u32, |m, &j| m | (1 << j))).collect();
        let generators = (0..r).map(|j| lmul_gen[j][0]).collect();
        Ok(FiniteWeyl { dim, mats, words, letters, lmul_gen, mul, inv, root_perm, generators })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Dimension `d` of the cocharacter lattice.
    pub fn rank(&self) -> usize {
        self.dim
    }

    /// Number of simple roots.
    pub fn semisimple_rank(&self) -> usize {
        self.simple_roots.len()
    }

    pub fn simple_roots(&self) -> &[Vec<i64>] {
        &self.simple_roots
    }

    pub fn simple_coroots(&self) -> &[Vec<i64>] {
        &self.simple_coroots
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    /// All roots: the positive roots first, then their negatives in the same order.
    pub fn roots(&self) -> &[Vec<i64>] {
        &self.roots
    }

    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.roots[..self.n_pos]
    }

    pub fn n_pos(&self) -> usize {
        self.n_pos
    }

    pub fn root(&self, i: usize) -> &[i64] {
        &self.roots[i]
    }

    pub fn coroot(&self, i: usize) -> &[i64] {
        &self.coroots[i]
    }

    /// Coefficients of a root in the simple roots.
    pub fn coeffs(&self, i: usize) -> &[i64] {
        &self.coeffs[i]
    }

    /// Signed height (sum of simple-root coefficients).
    pub fn height(&self, i: usize) -> i64 {
        self.heights[i]
    }

    pub fn is_positive(&self, i: usize) -> bool {
        i < self.n_pos
    }

    /// Index of `−β`.
    pub fn neg(&self, i: usize) -> usize {
        if i < self.n_pos {
            i + self.n_pos
        } else {
            i - self.n_pos
        }
    }

    /// Index of the simple root `α_j`.
    pub fn simple_index(&self, j: usize) -> usize {
        self.index[&self.simple_roots[j]]
    }

    pub fn root_index(&self, v: &[i64]) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// `⟨β, λ⟩` for the root with index `i`.
    pub fn pair(&self, i: usize, lambda: &Cochar) -> i64 {
        dot(&self.roots[i], &lambda[..self.dim])
    }

    /// Index of the `W_0`-orbit of a root.
    pub fn orbit(&self, i: usize) -> usize {
        self.orbit[i]
    }

    /// `gcd{⟨β, λ⟩ : λ ∈ Λ}`.
    pub fn c_alpha(&self, i: usize) -> i64 {
        self.c_alpha[i]
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn w0(&self) -> &FiniteWeyl {
        &self.w0
    }

    /// Simple reflections as matrices on `Z^d`.
    pub fn w0_generators(&self) -> Vec<Vec<i64>> {
        (0..self.semisimple_rank()).map(|j| self.w0.matrix(self.w0.generator(j)).to_vec()).collect()
    }

    /// Converts a slice to a cocharacter, checking its length.
    pub fn cochar(&self, v: &[i64]) -> Result<Cochar, RootDatumError> {
        if v.len() != self.dim {
            return Err(RootDatumError::Shape(format!("expected a vector of length {}, got {}", self.dim, v.len())));
        }
        let mut out = [0i64; MAX_RANK];
        out[..self.dim].copy_from_slice(v);
        Ok(out)
    }

    /// Sum of coroots as a cocharacter.
    pub fn coroot_cochar(&self, i: usize) -> Cochar {
        let mut out = [0i64; MAX_RANK];
        out[..self.dim].copy_from_slice(&self.coroots[i]);
        out
    }

    pub fn full_levi(&self) -> LeviSubset {
        LeviSubset { mask: (1u32 << self.semisimple_rank()) - 1 }
    }
}

fn support_mask(c: &[i64]) -> u32 {
    c.iter().enumerate().filter(|(_, &x)| x != 0).fold(0, |m, (i, _)| m | (1 << i))
}

impl fmt::Display for RootDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (rank {}, {} positive roots, |W_0| = {})", self.name, self.dim, self.n_pos, self.w0.order())
    }
}

/// A standard Levi subgroup, given by a subset `J` of the simple roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct LeviSubset {
    mask: u32,
}

impl LeviSubset {
    pub fn new(rd: &RootDatum, indices: &[usize]) -> Result<LeviSubset, RootDatumError> {
        let mut mask = 0u32;
        for &i in indices {
            if i >= rd.semisimple_rank() {
                return Err(RootDatumError::BadLevi(format!(
                    "simple root index {i} out of range (semisimple rank {})",
                    rd.semisimple_rank()
                )));
            }
            mask |= 1 << i;
        }
        Ok(LeviSubset { mask })
    }

    /// The torus (`J = ∅`).
    pub fn empty() -> LeviSubset {
        LeviSubset { mask: 0 }
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..32).filter(|i| self.mask & (1 << i) != 0).collect()
    }

    pub fn contains_simple(&self, j: usize) -> bool {
        self.mask & (1 << j) != 0
    }

    pub fn is_subset(&self, other: &LeviSubset) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn is_full(&self, rd: &RootDatum) -> bool {
        *self == rd.full_levi()
    }

    /// Whether the root with index `i` lies in `Σ_M`.
    pub fn contains_root(&self, rd: &RootDatum, i: usize) -> bool {
        support_mask(rd.coeffs(i)) & !self.mask == 0
    }

    /// Whether `σ ∈ W_{0,M}`.
    pub fn contains_w0(&self, rd: &RootDatum, s: u16) -> bool {
        rd.w0().in_parabolic(s, self.mask)
    }

    /// Positive roots of `M`, in the datum's order.
    pub fn positive_roots(&self, rd: &RootDatum) -> Vec<usize> {
        (0..rd.n_pos()).filter(|&i| self.contains_root(rd, i)).collect()
    }

    /// Names such as `a1,a2`; the torus prints as `t`.
    pub fn label(&self) -> String {
        if self.mask == 0 {
            return "t".to_string();
        }
        self.indices().iter().map(|i| format!("a{}", i + 1)).collect::<Vec<_>>().join(",")
    }

    /// Parses `t`/`none`/`` for the torus, `full`/`g` for everything, or `a1,a2`.
    pub fn parse(rd: &RootDatum, s: &str) -> Result<LeviSubset, RootDatumError> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "" | "t" | "none" | "torus" => return Ok(LeviSubset::empty()),
            "g" | "full" => return Ok(rd.full_levi()),
            _ => {}
        }
        let mut idx = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            let n: usize = part
                .strip_prefix('a')
                .and_then(|d| d.parse().ok())
                .filter(|&n| n >= 1)
                .ok_or_else(|| RootDatumError::BadLevi(format!("cannot parse simple root '{part}'")))?;
            idx.push(n - 1);
        }
        LeviSubset::new(rd, &idx)
    }
}

/// `Σ^+ ∖ Σ_M`, as root indices in the datum's fixed order.
pub fn levi_complement_roots(rd: &RootDatum, j: &LeviSubset) -> Vec<usize> {
    (0..rd.n_pos()).filter(|&i| !j.contains_root(rd, i)).collect()
}

/// `Σ_L^+ ∖ Σ_M` for `M ⊆ L`.
pub fn relative_complement_roots(rd: &RootDatum, inner: &LeviSubset, outer: &LeviSubset) -> Vec<usize> {
    (0..rd.n_pos()).filter(|&i| outer.contains_root(rd, i) && !inner.contains_root(rd, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(s: &str) -> RootDatum {
        RootDatum::build(&RootDatumSpec::from_short(s).unwrap()).unwrap()
    }

    #[test]
    fn gl3_roots_and_order() {
        let rd = build("gl3");
        assert_eq!(rd.positive_roots(), &[vec![1, -1, 0], vec![0, 1, -1], vec![1, 0, -1]]);
        assert_eq!(rd.w0().order(), 6);
        assert_eq!(rd.roots().len(), 6);
    }

    #[test]
    fn sl2_is_rank_one() {
        let rd = build("sl2");
        assert_eq!(rd.rank(), 1);
        assert_eq!(rd.n_pos(), 1);
        assert_eq!(rd.root(0), &[2]);
        assert_eq!(rd.coroot(0), &[1]);
        assert_eq!(rd.c_alpha(0), 2);
    }

    #[test]
    fn sp4_roots() {
        let rd = build("sp4");
        assert_eq!(rd.positive_roots(), &[vec![1, -1], vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(rd.w0().order(), 8);
        assert_eq!(rd.components().len(), 1);
        assert_eq!(rd.root(rd.components()[0].highest_root), &[2, 0]);
    }

    #[test]
    fn classical_counts() {
        for n in 2..=5 {
            let fact: usize = (1..=n).product();
            for kind in ["gl", "sl", "pgl"] {
                let rd = build(&format!("{kind}{n}"));
                assert_eq!(rd.roots().len(), n * (n - 1), "{kind}{n}");
                assert_eq!(rd.w0().order(), fact, "{kind}{n}");
            }
        }
    }

    #[test]
    fn complement_roots() {
        let rd = build("gl3");
        let c = |idx: &[usize]| -> Vec<Vec<i64>> {
            let j = LeviSubset::new(&rd, idx).unwrap();
            levi_complement_roots(&rd, &j).iter().map(|&i| rd.root(i).to_vec()).collect()
        };
        assert_eq!(c(&[0]), vec![vec![0, 1, -1], vec![1, 0, -1]]);
        assert_eq!(c(&[]).len(), 3);
        assert!(c(&[0, 1]).is_empty());
    }

    #[test]
    fn simple_reflections_permute_other_positive_roots() {
        for s in ["gl4", "sp4", "pgl3", "sl3"] {
            let rd = build(s);
            for j in 0..rd.semisimple_rank() {
                let g = rd.w0().generator(j);
                let a = rd.simple_index(j);
                for b in 0..rd.n_pos() {
                    let img = rd.w0().act_root(g, b);
                    if b == a {
                        assert_eq!(img, rd.neg(a));
                    } else {
                        assert!(rd.is_positive(img));
                    }
                }
            }
        }
    }

    #[test]
    fn root_action_matches_matrix_action() {
        let rd = build("sp4");
        let lam = rd.cochar(&[3, -1]).unwrap();
        for s in 0..rd.w0().order() as u16 {
            let sl = rd.w0().act(s, &lam);
            for b in 0..rd.roots().len() {
                // ⟨σβ, σλ⟩ = ⟨β, λ⟩
                assert_eq!(rd.pair(rd.w0().act_root(s, b), &sl), rd.pair(b, &lam));
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let affine = RootDatumSpec::Explicit {
            rank: 2,
            simple_roots: vec![vec![2, 0], vec![-2, 0]],
            simple_coroots: vec![vec![1, 0], vec![-1, 1]],
        };
        assert!(RootDatum::build(&affine).is_err());
        let bad_cartan = RootDatumSpec::Explicit {
            rank: 2,
            simple_roots: vec![vec![1, 0], vec![0, 1]],
            simple_coroots: vec![vec![2, 1], vec![-1, 2]],
        };
        assert!(matches!(RootDatum::build(&bad_cartan), Err(RootDatumError::NotFiniteType(_))));
    }

    #[test]
    fn explicit_g2_builds() {
        let g2 = RootDatumSpec::Explicit {
            rank: 2,
            simple_roots: vec![vec![1, 0], vec![0, 1]],
            simple_coroots: vec![vec![2, -1], vec![-3, 2]],
        };
        let rd = RootDatum::build(&g2).unwrap();
        assert_eq!(rd.n_pos(), 6);
        assert_eq!(rd.w0().order(), 12);
    }

    #[test]
    fn levi_inclusions() {
        let rd = build("gl4");
        let small = LeviSubset::new(&rd, &[0]).unwrap();
        let big = LeviSubset::new(&rd, &[0, 1]).unwrap();
        let a: Vec<usize> = small.positive_roots(&rd);
        let b: Vec<usize> = big.positive_roots(&rd);
        assert!(a.iter().all(|x| b.contains(x)));
        assert_eq!(LeviSubset::parse(&rd, "a1,a2").unwrap(), big);
        assert_eq!(big.label(), "a1,a2");
    }

    #[test]
    fn complement_is_stable_under_levi_weyl_group() {
        let rd = build("gl4");
        let j = LeviSubset::new(&rd, &[0, 2]).unwrap();
        let comp = levi_complement_roots(&rd, &j);
        for k in j.indices() {
            let g = rd.w0().generator(k);
            for &b in &comp {
                assert!(comp.contains(&rd.w0().act_root(g, b)));
            }
        }
    }
}
