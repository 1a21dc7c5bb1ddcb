//! Combinatorial maps given by face words over signed letters ±1…±n.
//!
//! Letters are darts; α swaps i and −i, F sends a letter to its successor in
//! its face word, and the vertex cycles are the cycles of α∘F. Duality swaps
//! faces and vertices and is realized by the cut-or-join involutions T_i.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{arg_err, Error, Result};
use crate::scalar::Field;
use crate::symfunc::eigenvalues;

/// A nonzero integer naming one side of an edge.
pub type SignedLetter = i32;

/// Position in the canonical order 1 < −1 < 2 < −2 < ….
pub fn letter_key(l: SignedLetter) -> usize {
    2 * (l.unsigned_abs() as usize - 1) + usize::from(l < 0)
}

pub fn key_letter(k: usize) -> SignedLetter {
    let m = (k / 2 + 1) as i32;
    if k % 2 == 0 {
        m
    } else {
        -m
    }
}

/// A cyclic word. Equality and hashing ignore rotation.
#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
pub struct CyclicWord(Vec<SignedLetter>);

impl CyclicWord {
    pub fn new(letters: Vec<SignedLetter>) -> Result<Self> {
        if letters.is_empty() {
            return arg_err("empty word");
        }
        if letters.contains(&0) {
            return arg_err("letter 0 is not allowed");
        }
        Ok(CyclicWord(letters))
    }

    pub fn letters(&self) -> &[SignedLetter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The rotation starting at `l`, if present.
    pub fn rotated_to(&self, l: SignedLetter) -> Option<Vec<SignedLetter>> {
        let pos = self.0.iter().position(|&x| x == l)?;
        Some(self.0[pos..].iter().chain(&self.0[..pos]).copied().collect())
    }

    /// Least rotation under the canonical letter order.
    pub fn canonical(&self) -> Vec<SignedLetter> {
        let keys: Vec<usize> = self.0.iter().map(|&l| letter_key(l)).collect();
        let n = keys.len();
        let best = (0..n)
            .min_by(|&a, &b| (0..n).map(|k| keys[(a + k) % n]).cmp((0..n).map(|k| keys[(b + k) % n])))
            .unwrap_or(0);
        (0..n).map(|k| self.0[(best + k) % n]).collect()
    }

    fn canonical_keys(&self) -> Vec<usize> {
        self.canonical().into_iter().map(letter_key).collect()
    }
}

impl PartialEq for CyclicWord {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.canonical() == other.canonical()
    }
}

impl Eq for CyclicWord {}

impl Hash for CyclicWord {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical().hash(state)
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Words rotated to their minimum and sorted; the key for all set comparisons.
pub fn canonical_wordset(words: &[CyclicWord]) -> Vec<Vec<SignedLetter>> {
    let mut v: Vec<(Vec<usize>, Vec<SignedLetter>)> = words.iter().map(|w| (w.canonical_keys(), w.canonical())).collect();
    v.sort();
    v.into_iter().map(|(_, w)| w).collect()
}

fn sort_canonically(words: Vec<CyclicWord>) -> Vec<CyclicWord> {
    canonical_wordset(&words).into_iter().map(CyclicWord).collect()
}

/// A validated map: faces, derived vertices and Euler characteristic.
#[derive(Clone, Debug, Serialize)]
pub struct DessinModel {
    pub n: usize,
    pub faces: Vec<CyclicWord>,
    pub vertices: Vec<CyclicWord>,
    pub euler: i64,
}

/// Successor-in-word permutation on letter keys.
fn successor_perm(n: usize, words: &[CyclicWord]) -> Vec<usize> {
    let mut f = vec![usize::MAX; 2 * n];
    for w in words {
        let l = w.letters();
        for (k, &x) in l.iter().enumerate() {
            f[letter_key(x)] = letter_key(l[(k + 1) % l.len()]);
        }
    }
    f
}

fn alpha(k: usize) -> usize {
    k ^ 1
}

fn cycles_of(perm: &[usize]) -> Vec<CyclicWord> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut k = s;
        while !seen[k] {
            seen[k] = true;
            cyc.push(key_letter(k));
            k = perm[k];
        }
        out.push(CyclicWord(cyc));
    }
    out
}

fn validate(n: usize, words: &[CyclicWord]) -> Result<()> {
    if words.is_empty() {
        return Err(Error::Validation("no faces given".into()));
    }
    let mut count = vec![0usize; 2 * n];
    for w in words {
        for &l in w.letters() {
            if l == 0 || l.unsigned_abs() as usize > n {
                return Err(Error::Validation(format!("letter {} outside ±1..±{}", l, n)));
            }
            count[letter_key(l)] += 1;
        }
    }
    for (k, &c) in count.iter().enumerate() {
        match c {
            1 => {}
            0 => return Err(Error::Validation(format!("letter {} missing", key_letter(k)))),
            _ => return Err(Error::Validation(format!("letter {} appears {} times", key_letter(k), c))),
        }
    }
    // union-find over letters joined by word adjacency and by α
    let mut parent: Vec<usize> = (0..2 * n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    let mut union = |a: usize, b: usize| {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    };
    for w in words {
        for pair in w.letters().windows(2) {
            union(letter_key(pair[0]), letter_key(pair[1]));
        }
    }
    for k in (0..2 * n).step_by(2) {
        union(k, k + 1);
    }
    let root = find(&mut parent, 0);
    if let Some(k) = (0..2 * n).find(|&k| find(&mut parent, k) != root) {
        return Err(Error::Validation(format!(
            "word set is disconnected: letter {} is not linked to letter 1",
            key_letter(k)
        )));
    }
    Ok(())
}

impl DessinModel {
    pub fn from_faces(n: usize, words: Vec<CyclicWord>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("need at least one edge".into()));
        }
        validate(n, &words)?;
        let f = successor_perm(n, &words);
        let af: Vec<usize> = (0..2 * n).map(|k| alpha(f[k])).collect();
        let vertices = sort_canonically(cycles_of(&af));
        let euler = words.len() as i64 - n as i64 + vertices.len() as i64;
        Ok(DessinModel { n, faces: words, vertices, euler })
    }

    /// Build from face words with n = max |letter|.
    pub fn from_words(words: Vec<CyclicWord>) -> Result<Self> {
        let n = words.iter().flat_map(|w| w.letters()).map(|l| l.unsigned_abs() as usize).max().unwrap_or(0);
        Self::from_faces(n, words)
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Apply T_1, …, T_n to the faces. The new faces are the old vertices,
    /// and the new vertices are the old faces in their original order.
    pub fn dual(&self) -> DessinModel {
        let mut words = self.faces.clone();
        for i in 1..=self.n as i32 {
            words = apply_t(&words, i).expect("valid model contains every letter");
        }
        DessinModel { n: self.n, faces: sort_canonically(words), vertices: self.faces.clone(), euler: self.euler }
    }

    pub fn canonical_faces(&self) -> Vec<Vec<SignedLetter>> {
        canonical_wordset(&self.faces)
    }

    pub fn canonical_vertices(&self) -> Vec<Vec<SignedLetter>> {
        canonical_wordset(&self.vertices)
    }

    /// Same faces up to rotation and ordering.
    pub fn same_map(&self, other: &DessinModel) -> bool {
        self.n == other.n && self.canonical_faces() == other.canonical_faces()
    }

    /// (∏α_i)(∏f_i) = ∏σ_i^{-1} as permutations of the 2n letters.
    pub fn graph_comb_holds(&self) -> bool {
        graph_comb_holds(self.n, &self.faces, &self.vertices)
    }
}

/// Checks α∘F = the permutation whose cycles are `vertices`.
pub fn graph_comb_holds(n: usize, faces: &[CyclicWord], vertices: &[CyclicWord]) -> bool {
    if validate(n, faces).is_err() || validate(n, vertices).is_err() {
        return false;
    }
    let f = successor_perm(n, faces);
    let sigma = successor_perm(n, vertices);
    (0..2 * n).all(|k| alpha(f[k]) == sigma[k])
}

/// The cut-or-join involution at letter i.
pub fn apply_t(words: &[CyclicWord], i: SignedLetter) -> Result<Vec<CyclicWord>> {
    if i <= 0 {
        return arg_err(format!("T_i needs i >= 1, got {}", i));
    }
    let wi = words.iter().position(|w| w.letters().contains(&i));
    let wj = words.iter().position(|w| w.letters().contains(&-i));
    let (Some(wi), Some(wj)) = (wi, wj) else {
        return arg_err(format!("letters ±{} not both present", i));
    };
    let mut out: Vec<CyclicWord> = Vec::with_capacity(words.len() + 1);
    if wi == wj {
        // C_i X C_{-i} Y → C_i X ⊗ C_{-i} Y
        let rot = words[wi].rotated_to(i).unwrap();
        let cut = rot.iter().position(|&x| x == -i).unwrap();
        for (k, w) in words.iter().enumerate() {
            if k == wi {
                out.push(CyclicWord(rot[..cut].to_vec()));
                out.push(CyclicWord(rot[cut..].to_vec()));
            } else {
                out.push(w.clone());
            }
        }
    } else {
        // C_i X ⊗ C_{-i} Y → C_i X C_{-i} Y
        let mut joined = words[wi].rotated_to(i).unwrap();
        joined.extend(words[wj].rotated_to(-i).unwrap());
        for (k, w) in words.iter().enumerate() {
            if k == wi {
                out.push(CyclicWord(joined.clone()));
            } else if k != wj {
                out.push(w.clone());
            }
        }
    }
    Ok(out)
}

/// Orientation-preserving relabeling of letters (commuting with i ↔ −i) that
/// carries the faces of `a` onto the faces of `b`, if one exists. The result
/// maps each letter of `a` to a letter of `b`.
pub fn find_isomorphism(a: &DessinModel, b: &DessinModel) -> Option<BTreeMap<SignedLetter, SignedLetter>> {
    if a.n != b.n || a.faces.len() != b.faces.len() || a.vertices.len() != b.vertices.len() {
        return None;
    }
    let n2 = 2 * a.n;
    let fa = successor_perm(a.n, &a.faces);
    let fb = successor_perm(b.n, &b.faces);
    'target: for t in 0..n2 {
        let mut phi = vec![usize::MAX; n2];
        let mut queue = VecDeque::from([(0usize, t)]);
        while let Some((x, y)) = queue.pop_front() {
            if phi[x] != usize::MAX {
                if phi[x] != y {
                    continue 'target;
                }
                continue;
            }
            phi[x] = y;
            queue.push_back((fa[x], fb[y]));
            queue.push_back((alpha(x), alpha(y)));
        }
        let mut used = vec![false; n2];
        for &y in &phi {
            if y == usize::MAX || used[y] {
                continue 'target;
            }
            used[y] = true;
        }
        return Some((0..n2).map(|k| (key_letter(k), key_letter(phi[k]))).collect());
    }
    None
}

/// Parse faces from text: one face per line (or separated by '|' or ';'),
/// letters separated by spaces or commas. A leading '[' selects JSON.
pub fn parse_faces(s: &str) -> Result<Vec<CyclicWord>> {
    let t = s.trim();
    if t.starts_with('[') {
        let v: Vec<Vec<i32>> = serde_json::from_str(t)
            .map_err(|e| Error::Argument(format!("faces JSON must be a list of integer lists: {}", e)))?;
        return v.into_iter().map(CyclicWord::new).collect();
    }
    t.split(['\n', '|', ';'])
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|line| {
            let letters = line
                .split(|c: char| c.is_whitespace() || matches!(c, ',' | '(' | ')'))
                .filter(|x| !x.is_empty())
                .map(|x| x.parse::<i32>().map_err(|_| Error::Argument(format!("bad letter '{}'", x))))
                .collect::<Result<Vec<_>>>()?;
            CyclicWord::new(letters)
        })
        .collect()
}

/// A uniformly random successor permutation on 2n letters, rejected until connected.
pub fn random_model<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DessinModel {
    loop {
        let mut darts: Vec<usize> = (0..2 * n).collect();
        darts.shuffle(rng);
        let mut f = vec![0usize; 2 * n];
        for k in 0..2 * n {
            f[darts[k]] = darts[(k + 1) % (2 * n)];
        }
        // break the single cycle into random pieces
        let mut perm = f.clone();
        for _ in 0..rng.random_range(0..=2 * n) {
            let (a, b) = (rng.random_range(0..2 * n), rng.random_range(0..2 * n));
            perm.swap(a, b);
        }
        let faces = cycles_of(&perm);
        if let Ok(m) = DessinModel::from_faces(n, faces) {
            return m;
        }
    }
}

/// Source matrix per signed letter, all N×N.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceAssignment<F: Field> {
    size: usize,
    matrices: BTreeMap<SignedLetter, DMatrix<F>>,
}

impl<F: Field> SourceAssignment<F> {
    pub fn new(matrices: BTreeMap<SignedLetter, DMatrix<F>>) -> Result<Self> {
        let Some(first) = matrices.values().next() else {
            return arg_err("no source matrices");
        };
        let size = first.nrows();
        for (l, m) in &matrices {
            if *l == 0 {
                return arg_err("letter 0 is not allowed");
            }
            if !m.is_square() || m.nrows() != size || size == 0 {
                return arg_err(format!("source for letter {} is {}x{}, expected {}x{}", l, m.nrows(), m.ncols(), size, size));
            }
        }
        Ok(SourceAssignment { size, matrices })
    }

    /// Every letter ±1…±n gets the identity.
    pub fn identity(n: usize, size: usize) -> Self {
        let m = (1..=n as i32)
            .flat_map(|i| [i, -i])
            .map(|l| (l, DMatrix::<F>::identity(size, size)))
            .collect();
        SourceAssignment { size, matrices: m }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, l: SignedLetter) -> Result<&DMatrix<F>> {
        self.matrices.get(&l).ok_or_else(|| Error::Argument(format!("no source matrix for letter {}", l)))
    }

    pub fn set(&mut self, l: SignedLetter, m: DMatrix<F>) -> Result<()> {
        if m.nrows() != self.size || !m.is_square() {
            return arg_err("size mismatch");
        }
        self.matrices.insert(l, m);
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SignedLetter, &DMatrix<F>)> {
        self.matrices.iter()
    }

    pub fn check_covers(&self, n: usize) -> Result<()> {
        for i in 1..=n as i32 {
            self.get(i)?;
            self.get(-i)?;
        }
        Ok(())
    }

    /// Ordered product C_{l1} C_{l2} ⋯ over a word.
    pub fn word_product(&self, w: &CyclicWord) -> Result<DMatrix<F>> {
        let mut acc = DMatrix::<F>::identity(self.size, self.size);
        for &l in w.letters() {
            acc = &acc * self.get(l)?;
        }
        Ok(acc)
    }

    pub fn to_complex(&self) -> SourceAssignment<Complex64> {
        SourceAssignment {
            size: self.size,
            matrices: self.matrices.iter().map(|(l, m)| (*l, m.map(|x| x.to_complex()))).collect(),
        }
    }

    /// Conjugate every source by g: C ↦ g C g⁻¹.
    pub fn conjugated(&self, g: &DMatrix<F>, g_inv: &DMatrix<F>) -> Self {
        SourceAssignment {
            size: self.size,
            matrices: self.matrices.iter().map(|(l, m)| (*l, g * m * g_inv)).collect(),
        }
    }
}

/// A cyclic product of sources with its spectrum.
#[derive(Clone, Debug)]
pub struct Monodromy {
    pub word: CyclicWord,
    pub matrix: DMatrix<Complex64>,
    pub spectrum: Vec<Complex64>,
}

fn monodromies(words: &[CyclicWord], sources: &SourceAssignment<Complex64>) -> Result<Vec<Monodromy>> {
    words
        .iter()
        .map(|w| {
            let matrix = sources.word_product(w)?;
            let spectrum = eigenvalues(&matrix)?;
            Ok(Monodromy { word: w.clone(), matrix, spectrum })
        })
        .collect()
}

/// W*_i for every vertex cycle.
pub fn star_monodromies(model: &DessinModel, sources: &SourceAssignment<Complex64>) -> Result<Vec<Monodromy>> {
    sources.check_covers(model.n)?;
    monodromies(&model.vertices, sources)
}

/// W_i for every face word (undressed).
pub fn face_monodromies(model: &DessinModel, sources: &SourceAssignment<Complex64>) -> Result<Vec<Monodromy>> {
    sources.check_covers(model.n)?;
    monodromies(&model.faces, sources)
}

pub mod examples {
    //! The worked maps and the five 2-edge maps.
    use super::*;

    fn w(v: &[i32]) -> CyclicWord {
        CyclicWord::new(v.to_vec()).unwrap()
    }

    pub fn words(v: &[&[i32]]) -> Vec<CyclicWord> {
        v.iter().map(|x| w(x)).collect()
    }

    /// Chain: face (1, 2, …, n, −n, …, −1).
    pub fn chain(n: usize) -> Vec<CyclicWord> {
        let n = n as i32;
        vec![w(&(1..=n).chain((1..=n).rev().map(|k| -k)).collect::<Vec<_>>())]
    }

    /// n-gon on the sphere: faces (1, …, n) and (−n, …, −1).
    pub fn polygon(n: usize) -> Vec<CyclicWord> {
        let n = n as i32;
        vec![w(&(1..=n).collect::<Vec<_>>()), w(&(1..=n).rev().map(|k| -k).collect::<Vec<_>>())]
    }

    /// Bouquet of n loops on the sphere: (1, −1, 2, −2, …, n, −n).
    pub fn planar_bouquet(n: usize) -> Vec<CyclicWord> {
        vec![w(&(1..=n as i32).flat_map(|k| [k, -k]).collect::<Vec<_>>())]
    }

    /// One vertex, one face, genus g: (a1, b1, −a1, −b1, …) with a_k = 2k−1, b_k = 2k.
    pub fn genus(g: usize) -> Vec<CyclicWord> {
        vec![w(&(0..g as i32).flat_map(|k| [2 * k + 1, 2 * k + 2, -(2 * k + 1), -(2 * k + 2)]).collect::<Vec<_>>())]
    }

    /// The five connected maps with two edges.
    pub fn two_edge_maps() -> Vec<(&'static str, Vec<CyclicWord>)> {
        vec![
            ("torus", words(&[&[1, 2, -1, -2]])),
            ("chain", words(&[&[1, 2, -2, -1]])),
            ("bouquet", words(&[&[-1, -2], &[1], &[2]])),
            ("loop-with-tail", words(&[&[1, 2, -1], &[-2]])),
            ("digon", words(&[&[1, 2], &[-2, -1]])),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;
    use rand::SeedableRng;

    fn set(v: &[&[i32]]) -> Vec<Vec<i32>> {
        canonical_wordset(&words(v))
    }

    #[test]
    fn canonical_order_and_rotation() {
        let a = CyclicWord::new(vec![-1, 2, 1, -2]).unwrap();
        assert_eq!(a.canonical(), vec![1, -2, -1, 2]);
        assert_eq!(a, CyclicWord::new(vec![1, -2, -1, 2]).unwrap());
        assert_ne!(a, CyclicWord::new(vec![1, 2, -1, -2]).unwrap());
        for k in 0..8 {
            assert_eq!(key_letter(k).signum() * if k % 2 == 0 { 1 } else { -1 }, 1);
            assert_eq!(letter_key(key_letter(k)), k);
        }
    }

    #[test]
    fn first_three_examples() {
        let m = DessinModel::from_faces(1, words(&[&[1], &[-1]])).unwrap();
        assert_eq!(m.canonical_vertices(), set(&[&[1, -1]]));
        assert_eq!(m.euler, 2);
        let m = DessinModel::from_faces(2, words(&[&[1, 2, -1, -2]])).unwrap();
        assert_eq!(m.canonical_vertices(), set(&[&[1, -2, -1, 2]]));
        assert_eq!(m.euler, 0);
        let m = DessinModel::from_faces(2, words(&[&[-1, -2], &[1], &[2]])).unwrap();
        assert_eq!(m.canonical_vertices(), set(&[&[1, -1, 2, -2]]));
        assert_eq!(m.euler, 2);
    }

    /// (faces, expected dual words) pairs; the dual words are the vertex cycles.
    fn known_pairs() -> Vec<(usize, Vec<CyclicWord>, Vec<CyclicWord>)> {
        vec![
            (1, words(&[&[1], &[-1]]), words(&[&[1, -1]])),
            (2, words(&[&[1, 2, -1, -2]]), words(&[&[1, -2, -1, 2]])),
            (2, words(&[&[-1, -2], &[1], &[2]]), words(&[&[1, -1, 2, -2]])),
            (2, words(&[&[1, 2, -1], &[-2]]), words(&[&[1, -2, 2], &[-1]])),
            (
                5,
                words(&[&[1, 2, 3, 4], &[-3, -2, 5], &[-5, -1, -4]]),
                words(&[&[1, -2, -5], &[2, -3], &[5, 3, -4], &[4, -1]]),
            ),
            (4, chain(4), words(&[&[1, -2], &[2, -3], &[3, -4], &[4], &[-1]])),
            (5, polygon(5), words(&[&[1, -2], &[2, -3], &[3, -4], &[4, -5], &[5, -1]])),
            (3, planar_bouquet(3), words(&[&[-1, -2, -3], &[1], &[2], &[3]])),
            (4, genus(2), words(&[&[-1, 2, 1, -2, -3, 4, 3, -4]])),
            // left side corrected; see tetrahedron test
            (
                6,
                words(&[&[-1, -2, -3], &[1, -4, -5], &[2, 5, -6], &[3, 6, 4]]),
                words(&[&[1, 4, -3], &[-5, -1, 2], &[-6, -2, 3], &[-4, 5, 6]]),
            ),
        ]
    }

    #[test]
    fn known_duals_reproduce() {
        let vfe = [(1, 2, 2), (1, 1, 0), (1, 3, 2), (2, 2, 2), (4, 3, 2), (5, 1, 2), (5, 2, 2), (4, 1, 2), (1, 1, -2), (4, 4, 2)];
        for ((n, faces, dual), (v, f, e)) in known_pairs().into_iter().zip(vfe) {
            let m = DessinModel::from_faces(n, faces.clone()).unwrap();
            assert_eq!(m.canonical_vertices(), canonical_wordset(&dual), "faces {:?}", faces);
            assert_eq!((m.vertex_count(), m.face_count(), m.euler), (v, f, e));
            assert_eq!(m.dual().canonical_faces(), canonical_wordset(&dual));
            assert!(graph_comb_holds(n, &faces, &dual));
        }
    }

    #[test]
    fn chain_polygon_genus_families() {
        for n in 1..=6 {
            let c = DessinModel::from_faces(n, chain(n)).unwrap();
            assert_eq!((c.vertex_count(), c.euler), (n + 1, 2));
            let b = DessinModel::from_faces(n, planar_bouquet(n)).unwrap();
            assert_eq!((b.vertex_count(), b.euler), (n + 1, 2));
            if n >= 2 {
                let p = DessinModel::from_faces(n, polygon(n)).unwrap();
                assert_eq!((p.vertex_count(), p.euler), (n, 2));
            }
        }
        for g in 1..=3 {
            let m = DessinModel::from_faces(2 * g, genus(g)).unwrap();
            assert_eq!(m.euler, 2 - 2 * g as i64);
        }
    }

    #[test]
    fn two_edge_maps_satisfy_graph_comb() {
        for (name, faces) in two_edge_maps() {
            let m = DessinModel::from_faces(2, faces).unwrap();
            assert!(m.graph_comb_holds(), "{}", name);
            assert!(m.dual().graph_comb_holds(), "{}", name);
        }
        // a wrong vertex list is rejected
        assert!(!graph_comb_holds(2, &words(&[&[1, 2, -1, -2]]), &words(&[&[1, 2, -1, -2]])));
    }

    #[test]
    fn tetrahedron_is_self_dual() {
        let rhs = words(&[&[1, 4, -3], &[-5, -1, 2], &[-6, -2, 3], &[-4, 5, 6]]);
        let m = DessinModel::from_faces(6, rhs).unwrap();
        assert_eq!((m.vertex_count(), m.face_count(), m.euler), (4, 4, 2));
        assert!(find_isomorphism(&m, &m.dual()).is_some());
        // reversing two faces changes the vertex count
        let reversed = DessinModel::from_faces(6, words(&[&[-1, -2, -3], &[-5, -4, 1], &[-6, 5, 2], &[6, 4, 3]])).unwrap();
        assert_eq!(reversed.vertex_count(), 2);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(DessinModel::from_faces(2, words(&[&[1, 2, -1]])), Err(Error::Validation(_))));
        assert!(matches!(DessinModel::from_faces(1, words(&[&[1, 1, -1]])), Err(Error::Validation(_))));
        assert!(matches!(DessinModel::from_faces(2, words(&[&[1, -1], &[2, -2]])), Err(Error::Validation(_))));
        assert!(DessinModel::from_faces(1, vec![]).is_err());
    }

    #[test]
    fn t_involutions() {
        assert_eq!(canonical_wordset(&apply_t(&words(&[&[1, -1]]), 1).unwrap()), set(&[&[1], &[-1]]));
        assert_eq!(canonical_wordset(&apply_t(&words(&[&[1], &[-1]]), 1).unwrap()), set(&[&[1, -1]]));
        let w = apply_t(&apply_t(&words(&[&[1, 2, -1, -2]]), 1).unwrap(), 2).unwrap();
        assert_eq!(canonical_wordset(&w), set(&[&[1, -2, -1, 2]]));
        for seed in 0..50 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let m = random_model(5, &mut rng);
            for i in 1..=5 {
                let twice = apply_t(&apply_t(&m.faces, i).unwrap(), i).unwrap();
                assert_eq!(canonical_wordset(&twice), m.canonical_faces());
            }
        }
    }

    #[test]
    fn t_involutions_commute() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let m = random_model(4, &mut rng);
            let ab = apply_t(&apply_t(&m.faces, 1).unwrap(), 3).unwrap();
            let ba = apply_t(&apply_t(&m.faces, 3).unwrap(), 1).unwrap();
            assert_eq!(canonical_wordset(&ab), canonical_wordset(&ba));
        }
    }

    #[test]
    fn dual_involution_on_random_models() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for k in 0..200 {
            let n = 1 + k % 6;
            let m = random_model(n, &mut rng);
            let d = m.dual();
            assert_eq!(d.canonical_faces(), m.canonical_vertices());
            assert_eq!(d.vertex_count(), m.face_count());
            assert_eq!(d.euler, m.euler);
            let dd = d.dual();
            assert!(dd.same_map(&m));
            assert!(m.graph_comb_holds() && d.graph_comb_holds());
            let rebuilt = DessinModel::from_faces(n, d.faces.clone()).unwrap();
            assert_eq!(rebuilt.canonical_vertices(), m.canonical_faces());
        }
    }

    #[test]
    fn vertex_count_is_cycle_count() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for k in 0..500 {
            let m = random_model(1 + k % 7, &mut rng);
            let f = successor_perm(m.n, &m.faces);
            let af: Vec<usize> = (0..2 * m.n).map(|x| alpha(f[x])).collect();
            assert_eq!(m.vertex_count(), cycles_of(&af).len());
        }
    }

    #[test]
    fn isomorphism_search() {
        let a = DessinModel::from_words(words(&[&[1, 2, -1], &[-2]])).unwrap();
        // relabel 1 ↔ 2 and flip the sign of the new 1
        let b = DessinModel::from_words(words(&[&[-2, 1, 2], &[-1]])).unwrap();
        assert!(find_isomorphism(&a, &b).is_some());
        let torus = DessinModel::from_words(words(&[&[1, 2, -1, -2]])).unwrap();
        let chain = DessinModel::from_words(words(&[&[1, 2, -2, -1]])).unwrap();
        assert!(find_isomorphism(&torus, &chain).is_none());
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_faces("1 2 -1 -2").unwrap(), words(&[&[1, 2, -1, -2]]));
        assert_eq!(parse_faces("1\n-1\n").unwrap(), words(&[&[1], &[-1]]));
        assert_eq!(parse_faces("1 | -1").unwrap(), words(&[&[1], &[-1]]));
        assert_eq!(parse_faces("[[1, 2], [-2, -1]]").unwrap(), words(&[&[1, 2], &[-2, -1]]));
        assert!(parse_faces("1 x").is_err());
    }

    #[test]
    fn monodromies_with_identity_sources() {
        let m = DessinModel::from_words(words(&[&[1, 2, -1, -2]])).unwrap();
        let s = SourceAssignment::<Complex64>::identity(2, 3);
        for w in star_monodromies(&m, &s).unwrap() {
            assert!((w.matrix.clone() - DMatrix::identity(3, 3)).norm() < 1e-15);
            assert!(w.spectrum.iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-12));
        }
    }
}
