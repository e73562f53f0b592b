//! Coverings of ℤ² by finitely many lattices.
//!
//! Every member of a covering contains `Mℤ²`, where `M` is the lcm of the
//! member indices, so all questions reduce to the finite grid `(ℤ/M)²`.
//! The grid is materialized as a bitset of `M²` cells, one per residue class
//! `(x1, x2)`, stored at position `x1·M + x2` so that bit order is the
//! lexicographic order on classes.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{extended_gcd, Int, Mat2, Rat, Vec2};
use crate::lattice::{Lattice, LatticeError};

/// Largest grid modulus materialized for reports and minimality checks.
pub const MAX_GRID_MODULUS: u64 = 4096;

/// Lengths above this need `allow_large`.
pub const SOFT_MAX_LENGTH: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("a covering needs at least one lattice")]
    Empty,
    #[error("the lattices do not cover Z^2")]
    NotACovering,
    #[error("transform is not unimodular")]
    NotUnimodular,
    #[error("grid modulus {0} exceeds the limit {MAX_GRID_MODULUS}")]
    ModulusTooLarge(String),
    #[error("length must be >= 1")]
    InvalidLength,
    #[error("length {0} is above the soft cap {SOFT_MAX_LENGTH}; pass allow_large to run it")]
    LengthAboveCap(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Duplicate-free, sorted family of lattices with its grid modulus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Covering {
    lattices: Vec<Lattice>,
    modulus: Int,
}

impl Covering {
    /// Sorts and deduplicates. Does not check the covering property; see
    /// [`is_covering`].
    pub fn new(mut lattices: Vec<Lattice>) -> Result<Self, CoverError> {
        if lattices.is_empty() {
            return Err(CoverError::Empty);
        }
        lattices.sort();
        lattices.dedup();
        let modulus = lattices.iter().fold(Int::one(), |m, l| m.lcm(&l.index()));
        Ok(Covering { lattices, modulus })
    }

    pub fn lattices(&self) -> &[Lattice] {
        &self.lattices
    }

    pub fn len(&self) -> usize {
        self.lattices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattices.is_empty()
    }

    pub fn modulus(&self) -> &Int {
        &self.modulus
    }

    /// One snapshot line, `k=<n> #<i>: [[a,0],[c,b]] ...`.
    pub fn snapshot_line(&self, position: usize) -> String {
        let mut s = format!("k={} #{}:", self.len(), position);
        for l in &self.lattices {
            s.push(' ');
            s.push_str(&l.to_string());
        }
        s
    }
}

impl Ord for Covering {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lattices.cmp(&other.lattices)
    }
}

impl PartialOrd for Covering {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Covering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.lattices.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}

/// Snapshot text for a list of coverings, one per line, numbered from 1.
pub fn snapshot(coverings: &[Covering]) -> String {
    coverings
        .iter()
        .enumerate()
        .map(|(i, c)| c.snapshot_line(i + 1) + "\n")
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverReport {
    pub covers: bool,
    /// Lexicographically least uncovered class in `[0, M)²`.
    pub witness: Option<Vec2>,
    /// Per member, the classes mod `M` that lie in that member only.
    pub uniquely_covered: Vec<Vec<Vec2>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    fn zeros(len: usize) -> Self {
        BitSet { words: vec![0; len.div_ceil(64)], len }
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn or_assign(&mut self, other: &BitSet) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    fn and_not(&self, other: &BitSet) -> BitSet {
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect();
        BitSet { words, len: self.len }
    }

    fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn is_subset(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    fn first_zero(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != u64::MAX {
                let i = k * 64 + (!w).trailing_zeros() as usize;
                return (i < self.len).then_some(i);
            }
        }
        None
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + t)
            })
        })
    }
}

/// The grid `(ℤ/m)²`.
#[derive(Debug, Clone)]
pub(crate) struct ResidueGrid {
    m: usize,
}

impl ResidueGrid {
    pub(crate) fn new(modulus: &Int) -> Result<Self, CoverError> {
        match modulus.to_u64() {
            Some(m) if m <= MAX_GRID_MODULUS => Ok(ResidueGrid { m: m as usize }),
            _ => Err(CoverError::ModulusTooLarge(modulus.to_string())),
        }
    }

    fn cells(&self) -> usize {
        self.m * self.m
    }

    fn contains_grid(&self, l: &Lattice) -> bool {
        let m = Int::from(self.m);
        l.contains(&Vec2::new(m.clone(), Int::zero())) && l.contains(&Vec2::new(Int::zero(), m))
    }

    /// Cells of a lattice containing `mℤ²`.
    pub(crate) fn bits(&self, l: &Lattice) -> BitSet {
        debug_assert!(self.contains_grid(l));
        let a = l.a().to_usize().expect("a divides m");
        let b = l.b().to_usize().expect("b divides m");
        let c = l.c().to_usize().expect("c < b");
        let mut out = BitSet::zeros(self.cells());
        for x1 in (0..self.m).step_by(a) {
            let start = ((x1 / a) * c) % b;
            for x2 in (start..self.m).step_by(b) {
                out.set(x1 * self.m + x2);
            }
        }
        out
    }

    fn point(&self, cell: usize) -> Vec2 {
        Vec2::new(Int::from(cell / self.m), Int::from(cell % self.m))
    }

    /// `⟨cells⟩ + mℤ²` as a lattice.
    fn generated(&self, cells: &BitSet) -> Lattice {
        let m = Int::from(self.m);
        let mut pts = vec![Vec2::new(m.clone(), Int::zero()), Vec2::new(Int::zero(), m)];
        pts.extend(cells.ones().map(|i| self.point(i)));
        Lattice::from_generators(&pts).expect("contains mℤ²")
    }

    /// Maximal proper sublattices of `l` that still contain `mℤ²`.
    fn maximal_sublattices(&self, l: &Lattice) -> Vec<Lattice> {
        let [u, v] = l.basis();
        let mut out = Vec::new();
        for p in prime_factors(self.m as u64) {
            let p = Int::from(p);
            let scale = |w: &Vec2, k: &Int| Vec2::new(&w.x1 * k, &w.x2 * k);
            let add = |w: &Vec2, z: &Vec2| Vec2::new(&w.x1 + &z.x1, &w.x2 + &z.x2);
            let mut subs = vec![Lattice::from_generators([&scale(&u, &p), &v]).expect("rank 2")];
            let pv = scale(&v, &p);
            let mut j = Int::zero();
            while j < p {
                let w = add(&u, &scale(&v, &j));
                subs.push(Lattice::from_generators([&w, &pv]).expect("rank 2"));
                j += 1;
            }
            out.extend(subs.into_iter().filter(|s| self.contains_grid(s)));
        }
        out
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Covering test with certificate, decided on the grid `(ℤ/M)²`.
pub fn is_covering(c: &Covering) -> Result<CoverReport, CoverError> {
    let grid = ResidueGrid::new(c.modulus())?;
    let bits: Vec<BitSet> = c.lattices.iter().map(|l| grid.bits(l)).collect();
    let mut union = BitSet::zeros(grid.cells());
    for b in &bits {
        union.or_assign(b);
    }
    let witness = union.first_zero().map(|i| grid.point(i));
    let uniquely_covered = (0..bits.len())
        .map(|i| {
            unique_cells(&bits, i)
                .ones()
                .map(|cell| grid.point(cell))
                .collect()
        })
        .collect();
    Ok(CoverReport { covers: witness.is_none(), witness, uniquely_covered })
}

fn unique_cells(bits: &[BitSet], i: usize) -> BitSet {
    let mut others = BitSet::zeros(bits[i].len);
    for (j, b) in bits.iter().enumerate() {
        if j != i {
            others.or_assign(b);
        }
    }
    bits[i].and_not(&others)
}

/// Exact covering decision without materializing the grid.
///
/// By inclusion–exclusion the union has density
/// `Σ_{∅≠S} (−1)^{|S|+1} / [ℤ² : ∩_S Λ_i]`, and a union of lattices is ℤ²
/// iff that density is 1. Cost is `2^k` intersections, independent of `M`.
pub fn covers(lattices: &[Lattice]) -> bool {
    if lattices.is_empty() {
        return false;
    }
    if lattices.iter().any(Lattice::is_full) {
        return true;
    }
    let density: Rat = lattices
        .iter()
        .map(|l| Rat::new(Int::one(), l.index()))
        .sum();
    if density < Rat::one() {
        return false;
    }
    fn walk(ls: &[Lattice], from: usize, meet: &Lattice, size: usize, acc: &mut Rat) {
        for i in from..ls.len() {
            let next = meet.intersect(&ls[i]);
            let term = Rat::new(Int::one(), next.index());
            if size.is_multiple_of(2) {
                *acc += term;
            } else {
                *acc -= term;
            }
            walk(ls, i + 1, &next, size + 1, acc);
        }
    }
    let mut acc = Rat::zero();
    walk(lattices, 0, &Lattice::full(), 0, &mut acc);
    acc.is_one()
}

/// Minimality: for each member, the classes only it covers generate it.
pub fn is_minimal(c: &Covering) -> Result<bool, CoverError> {
    let grid = ResidueGrid::new(c.modulus())?;
    let bits: Vec<BitSet> = c.lattices.iter().map(|l| grid.bits(l)).collect();
    let mut union = BitSet::zeros(grid.cells());
    for b in &bits {
        union.or_assign(b);
    }
    if union.first_zero().is_some() {
        return Err(CoverError::NotACovering);
    }
    for (i, l) in c.lattices.iter().enumerate() {
        let unique = unique_cells(&bits, i);
        if unique.is_zero() {
            return Ok(false);
        }
        let trapped = grid
            .maximal_sublattices(l)
            .iter()
            .any(|s| unique.is_subset(&grid.bits(s)));
        if trapped {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A minimal covering extracted from a covering, with the inclusion map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub covering: Covering,
    /// `map[j]` is the position in the input of the member containing
    /// output member `j`.
    pub map: Vec<usize>,
}

/// Extracts a minimal covering whose members sit inside input members.
///
/// Three passes: members that cover something alone are first shrunk to the
/// lattice generated by what only they cover; redundant members are then
/// dropped from the largest index down until the family is irredundant;
/// finally each member, from last to first, is replaced by the lattice
/// generated by the classes it alone covers against the current family.
pub fn extract_minimal(c: &Covering) -> Result<Extraction, CoverError> {
    let grid = ResidueGrid::new(c.modulus())?;
    let mut members: Vec<(usize, Lattice, BitSet)> = c
        .lattices
        .iter()
        .enumerate()
        .map(|(i, l)| (i, l.clone(), grid.bits(l)))
        .collect();

    let union_of = |ms: &[(usize, Lattice, BitSet)], skip: Option<usize>| {
        let mut u = BitSet::zeros(grid.cells());
        for (k, (_, _, b)) in ms.iter().enumerate() {
            if Some(k) != skip {
                u.or_assign(b);
            }
        }
        u
    };
    if union_of(&members, None).first_zero().is_some() {
        return Err(CoverError::NotACovering);
    }

    let shrink_pass = |ms: &mut Vec<(usize, Lattice, BitSet)>| {
        for s in (0..ms.len()).rev() {
            let unique = ms[s].2.and_not(&union_of(ms, Some(s)));
            if unique.is_zero() {
                continue;
            }
            let shrunk = grid.generated(&unique);
            ms[s].2 = grid.bits(&shrunk);
            ms[s].1 = shrunk;
        }
    };

    shrink_pass(&mut members);
    let mut s = members.len();
    while s > 0 {
        s -= 1;
        if members.len() > 1 && union_of(&members, Some(s)).first_zero().is_none() {
            members.remove(s);
        }
    }
    shrink_pass(&mut members);

    let mut pairs: Vec<(Lattice, usize)> = members.into_iter().map(|(i, l, _)| (l, i)).collect();
    pairs.sort();
    let map = pairs.iter().map(|(_, i)| *i).collect();
    let covering = Covering::new(pairs.into_iter().map(|(l, _)| l).collect())?;
    Ok(Extraction { covering, map })
}

/// Image of a covering under a unimodular change of coordinates.
pub fn transform(c: &Covering, u: &Mat2) -> Result<Covering, CoverError> {
    if !u.is_unimodular() {
        return Err(CoverError::NotUnimodular);
    }
    let imgs = c
        .lattices
        .iter()
        .map(|l| l.transform(u))
        .collect::<Result<Vec<_>, _>>()?;
    Covering::new(imgs)
}

/// Partitions coverings into GL(2,ℤ)-orbits, each completed by closure.
///
/// Orbits are returned sorted internally and ordered by their least member.
pub fn gl2z_orbits(coverings: &[Covering]) -> Result<Vec<Vec<Covering>>, CoverError> {
    let generators = [
        Mat2::from_i64(0, -1, 1, 0),
        Mat2::from_i64(1, 1, 0, 1),
        Mat2::from_i64(1, 0, 0, -1),
    ];
    let mut seen = BTreeSet::new();
    let mut orbits = Vec::new();
    for c in coverings {
        if seen.contains(c) {
            continue;
        }
        let mut orbit = BTreeSet::from([c.clone()]);
        let mut frontier = vec![c.clone()];
        while let Some(next) = frontier.pop() {
            for g in &generators {
                let img = transform(&next, g)?;
                if orbit.insert(img.clone()) {
                    frontier.push(img);
                }
            }
        }
        seen.extend(orbit.iter().cloned());
        orbits.push(orbit.into_iter().collect::<Vec<_>>());
    }
    orbits.sort();
    Ok(orbits)
}

#[derive(Debug, Clone, Default)]
pub struct EnumerateOptions {
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Lift the soft cap on the length.
    pub allow_large: bool,
}

/// All minimal coverings of length exactly `k`, sorted.
///
/// The search assigns points of ℤ² to `k` slots. Each slot holds the group
/// generated by its points, which lies inside the member it will become. At
/// every step the smallest point outside all slots is sent to each slot in
/// turn (empty slots are interchangeable, so only the first one is tried).
/// A slot that grows to ℤ² is dead. The first time the slots cover ℤ² they
/// are the only minimal covering the branch can still reach, so it is kept
/// if it is minimal. Subgroups of ℤ² satisfy the ascending chain condition,
/// hence the tree is finite and no bound on member indices is assumed.
pub fn enumerate_minimal(k: usize, opts: &EnumerateOptions) -> Result<Vec<Covering>, CoverError> {
    if k == 0 {
        return Err(CoverError::InvalidLength);
    }
    if k > SOFT_MAX_LENGTH && !opts.allow_large {
        return Err(CoverError::LengthAboveCap(k));
    }
    if k == 1 {
        return Ok(vec![Covering::new(vec![Lattice::full()])?]);
    }
    let run = || -> Result<Vec<Covering>, CoverError> {
        let found = Search { k }.branch(vec![Group::zero(); k], 0)?;
        let mut found: Vec<Covering> = found.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        found.sort();
        Ok(found)
    };
    match opts.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("thread pool");
            pool.install(run)
        }
        None => run(),
    }
}

/// Subgroup of ℤ² of any rank, generated by `(a, c)` and `(0, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Group {
    a: i64,
    c: i64,
    b: i64,
}

impl Group {
    fn zero() -> Self {
        Group { a: 0, c: 0, b: 0 }
    }

    fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    fn has_full_rank(&self) -> bool {
        self.a > 0 && self.b > 0
    }

    fn is_full(&self) -> bool {
        self.a == 1 && self.b == 1
    }

    fn contains(&self, x1: i64, x2: i64) -> bool {
        let rest = if self.a == 0 {
            if x1 != 0 {
                return false;
            }
            x2
        } else {
            if x1 % self.a != 0 {
                return false;
            }
            x2 - (x1 / self.a) * self.c
        };
        if self.b == 0 {
            rest == 0
        } else {
            rest % self.b == 0
        }
    }

    fn with(&self, w1: i64, w2: i64) -> Self {
        let Group { a, c, b } = *self;
        let (a, c, r) = if a == 0 && w1 == 0 {
            (0, 0, w2.abs().gcd(&c.abs()))
        } else {
            let (g, s, t) = extended_gcd(&a, &w1);
            let r = (w1 / g) * c - (a / g) * w2;
            (g, s * c + t * w2, r)
        };
        let b = b.gcd(&r);
        let c = if b > 0 { c.rem_euclid(b) } else { c };
        Group { a, c, b }
    }

    fn index(&self) -> i64 {
        self.a * self.b
    }

    fn lattice(&self) -> Lattice {
        Lattice::from_triple(self.a, self.c, self.b).expect("full rank")
    }
}

struct Search {
    k: usize,
}

/// Splits the tree into parallel tasks up to this depth.
const PARALLEL_DEPTH: usize = 6;

impl Search {
    fn branch(&self, slots: Vec<Group>, depth: usize) -> Result<Vec<Covering>, CoverError> {
        let Some((x1, x2)) = uncovered(&slots) else {
            return Ok(self.leaf(&slots)?.into_iter().collect());
        };
        let first_empty = slots.iter().position(Group::is_zero);
        let children: Vec<Vec<Group>> = (0..self.k)
            .filter(|&i| !slots[i].is_zero() || Some(i) == first_empty)
            .filter_map(|i| {
                let grown = slots[i].with(x1, x2);
                (!grown.is_full()).then(|| {
                    let mut next = slots.clone();
                    next[i] = grown;
                    next
                })
            })
            .collect();
        let results: Vec<Result<Vec<Covering>, CoverError>> = if depth < PARALLEL_DEPTH {
            children.into_par_iter().map(|s| self.branch(s, depth + 1)).collect()
        } else {
            children.into_iter().map(|s| self.branch(s, depth + 1)).collect()
        };
        let mut out = Vec::new();
        for r in results {
            out.extend(r?);
        }
        Ok(out)
    }

    fn leaf(&self, slots: &[Group]) -> Result<Option<Covering>, CoverError> {
        if !slots.iter().all(Group::has_full_rank) {
            return Ok(None);
        }
        let c = Covering::new(slots.iter().map(Group::lattice).collect())?;
        if c.len() == self.k && is_minimal(&c)? {
            Ok(Some(c))
        } else {
            Ok(None)
        }
    }
}

/// Smallest point, in max-norm then lexicographic order and up to sign,
/// lying in no slot; `None` when the full-rank slots already cover ℤ².
fn uncovered(slots: &[Group]) -> Option<(i64, i64)> {
    let period = slots
        .iter()
        .filter(|g| g.has_full_rank())
        .map(Group::index)
        .reduce(|m, n| m.lcm(&n));
    let mut r = 1i64;
    // set once a point is found that only lower-rank slots cover
    let mut thin = false;
    loop {
        if !thin && period.is_some_and(|m| r > m) {
            return None;
        }
        for x1 in 0..=r {
            for x2 in -r..=r {
                if x1.max(x2.abs()) != r || (x1 == 0 && x2 <= 0) {
                    continue;
                }
                let mut holders = slots.iter().filter(|g| g.contains(x1, x2));
                match holders.next() {
                    None => return Some((x1, x2)),
                    Some(g) if !thin && !g.has_full_rank() => {
                        thin = !holders.any(Group::has_full_rank);
                    }
                    _ => {}
                }
            }
        }
        r += 1;
    }
}
