//! Breadth-first orbit enumeration over freely reduced words.
//!
//! Certified presentations (those carrying a ping-pong certificate) are free
//! on their letters, so every reduced word is a distinct element and whole
//! subtrees are discarded with the half-space bound. Other presentations are
//! deduplicated on a coarse grid of the canonical matrix and pruned with the
//! prefix-slack bound: a word is abandoned once its displacement at `j`
//! exceeds `R + d(x,j) + d(y,j) + slack`.

use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use super::ball::OrbitBall;
use super::presentation::GroupPresentation;
use crate::error::{Error, Result};
use crate::hyperbolic::{dist, Isometry, PointH3};
use crate::par;

/// Projectively closer than `DUPLICATE * scale`: the same element.
pub const DUPLICATE: f64 = 1e-8;
/// Distinct elements closer than `ALARM * scale` raise a discreteness alarm.
pub const ALARM: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationConfig {
    /// Maximum number of word-tree nodes kept in memory.
    pub cap: usize,
    /// Keep one reduced word per element.
    pub keep_words: bool,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        Self { cap: 50_000_000, keep_words: false }
    }
}

impl EnumerationConfig {
    pub fn with_words(self) -> Self {
        Self { keep_words: true, ..self }
    }
}

const NO_PARENT: u32 = u32::MAX;
const NO_LETTER: u16 = u16::MAX;

#[derive(Clone, Copy)]
struct Node {
    parent: u32,
    letter: u16,
}

struct Frontier {
    node: u32,
    matrix: Isometry,
}

struct Candidate {
    parent: u32,
    letter: u16,
    matrix: Isometry,
    distance: f64,
}

/// All elements `g` with `d(x, g y) <= radius`.
pub fn enumerate_ball(
    group: &GroupPresentation,
    x: &PointH3,
    y: &PointH3,
    radius: f64,
    config: &EnumerationConfig,
) -> Result<OrbitBall> {
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("radius must be finite and nonnegative, got {radius}")));
    }
    let j = PointH3::basepoint();
    let dxj = dist(x, &j);
    let dyj = dist(y, &j);
    let letters = group.letters();
    let pingpong = group.pingpong();
    let y_outside = pingpong.is_some_and(|pp| pp.outside_all(y));
    let slack = group.prefix_slack();

    let mut nodes = vec![Node { parent: NO_PARENT, letter: NO_LETTER }];
    let mut store = match pingpong {
        Some(_) => None,
        None => {
            let mut s = DedupStore::default();
            s.insert(&Isometry::IDENTITY, 0);
            Some(s)
        }
    };
    let mut found: Vec<(f64, Isometry, u32)> = Vec::new();
    let d0 = dist(x, y);
    if d0 <= radius {
        found.push((d0, Isometry::IDENTITY, 0));
    }
    let mut frontier = vec![Frontier { node: 0, matrix: Isometry::IDENTITY }];
    let mut complete = true;

    while !frontier.is_empty() {
        let expansions = par::map(&frontier, |f| {
            let last = nodes[f.node as usize].letter;
            let finv = f.matrix.inverse();
            let (pj, px) = match pingpong {
                Some(_) => (finv.apply(&j), finv.apply(x)),
                None => (j, j),
            };
            let mut out = Vec::with_capacity(letters.len());
            for (s, letter) in letters.iter().enumerate() {
                if last != NO_LETTER && letters[last as usize].inverse == s {
                    continue;
                }
                if let Some(pp) = pingpong {
                    let disk = &pp.disks()[s];
                    let mut lb = disk.half_space_distance(&pj) - dxj - dyj;
                    if y_outside {
                        lb = lb.max(disk.half_space_distance(&px));
                    }
                    if lb > radius {
                        continue;
                    }
                }
                let matrix = f.matrix.compose(&letter.matrix);
                if pingpong.is_none() && matrix.displacement() - dxj - dyj - slack > radius {
                    continue;
                }
                let distance = dist(x, &matrix.apply(y));
                out.push(Candidate { parent: f.node, letter: s as u16, matrix, distance });
            }
            out
        });

        let mut next = Vec::new();
        'merge: for batch in expansions {
            for c in batch {
                if nodes.len() >= config.cap {
                    complete = false;
                    break 'merge;
                }
                let id = nodes.len() as u32;
                if let Some(store) = store.as_mut() {
                    match store.lookup(&c.matrix) {
                        Lookup::Duplicate => continue,
                        Lookup::Suspect { other, gap, scale } => {
                            nodes.push(Node { parent: c.parent, letter: c.letter });
                            return Err(Error::DiscretenessSuspect {
                                first: group.word_string(&word_of(&nodes, other)),
                                second: group.word_string(&word_of(&nodes, id)),
                                coarse: ALARM * scale,
                                fine: gap,
                            });
                        }
                        Lookup::New => store.insert(&c.matrix, id),
                    }
                }
                nodes.push(Node { parent: c.parent, letter: c.letter });
                if c.distance <= radius {
                    found.push((c.distance, c.matrix, id));
                }
                next.push(Frontier { node: id, matrix: c.matrix });
            }
        }
        frontier = next;
        if !complete {
            break;
        }
    }

    found.sort_by(|p, q| p.0.total_cmp(&q.0).then_with(|| p.1.lex_cmp(&q.1)));
    let words = config.keep_words.then(|| found.iter().map(|f| word_of(&nodes, f.2)).collect());
    Ok(OrbitBall::from_parts(
        *x,
        *y,
        radius,
        found.iter().map(|f| f.0).collect(),
        found.iter().map(|f| f.1).collect(),
        words,
        complete,
        letters.iter().map(|l| l.label.clone()).collect(),
    ))
}

fn word_of(nodes: &[Node], mut id: u32) -> Vec<u16> {
    let mut w = Vec::new();
    while nodes[id as usize].parent != NO_PARENT {
        w.push(nodes[id as usize].letter);
        id = nodes[id as usize].parent;
    }
    w.reverse();
    w
}

/// Pruning-free enumeration of all reduced words up to `max_len`, for tests
/// and oracles. Returns sorted distances of distinct elements within `radius`.
pub fn brute_force_distances(
    group: &GroupPresentation,
    x: &PointH3,
    y: &PointH3,
    radius: f64,
    max_len: usize,
) -> Vec<f64> {
    let letters = group.letters();
    let mut store = DedupStore::default();
    let mut out = Vec::new();
    let mut level: Vec<(Isometry, Option<usize>)> = vec![(Isometry::IDENTITY, None)];
    store.insert(&Isometry::IDENTITY, 0);
    let mut count = 1u32;
    let d0 = dist(x, y);
    if d0 <= radius {
        out.push(d0);
    }
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (g, last) in &level {
            for (s, l) in letters.iter().enumerate() {
                if last.is_some_and(|t| letters[t].inverse == s) {
                    continue;
                }
                let h = g.compose(&l.matrix);
                if !matches!(store.lookup(&h), Lookup::New) {
                    continue;
                }
                store.insert(&h, count);
                count += 1;
                let d = dist(x, &h.apply(y));
                if d <= radius {
                    out.push(d);
                }
                next.push((h, Some(s)));
            }
        }
        level = next;
    }
    out.sort_by(f64::total_cmp);
    out
}

enum Lookup {
    New,
    Duplicate,
    Suspect { other: u32, gap: f64, scale: f64 },
}

/// Hash index of matrices on a grid of width `10 * ALARM * scale`, where
/// `scale` is a power of two bounding the entries. Lookups visit every cell
/// that can hold a matrix within `ALARM * scale`, under both projective signs
/// when the canonical sign is fragile.
#[derive(Default)]
struct DedupStore {
    index: HashMap<u64, u32>,
    matrices: Vec<Isometry>,
}

const CELL: f64 = 10.0 * ALARM;
const PROBE_STEP: u64 = 0x9e37_79b9_7f4a_7c15;

fn components(m: &Isometry) -> [f64; 8] {
    let [a, b, c, d] = m.entries();
    [a.re, a.im, b.re, b.im, c.re, c.im, d.re, d.im]
}

fn scale_exponent(m: &Isometry) -> (i32, f64) {
    let big = components(m).iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let e = big.log2().ceil() as i32;
    (e, big)
}

fn cell_key(exp: i32, cells: &[i64; 8]) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    exp.hash(&mut h);
    cells.hash(&mut h);
    h.finish()
}

impl DedupStore {
    fn primary_key(m: &Isometry) -> u64 {
        let (e, _) = scale_exponent(m);
        let w = CELL * 2f64.powi(e);
        let v = components(m);
        let cells = std::array::from_fn(|i| (v[i] / w).floor() as i64);
        cell_key(e, &cells)
    }

    fn insert(&mut self, m: &Isometry, id: u32) {
        let mut k = Self::primary_key(m);
        while self.index.contains_key(&k) {
            k = k.wrapping_add(PROBE_STEP);
        }
        self.index.insert(k, id);
        debug_assert_eq!(id as usize, self.matrices.len());
        self.matrices.push(*m);
    }

    fn variant_keys(m: &Isometry) -> Vec<u64> {
        let (e, big) = scale_exponent(m);
        let scale = 2f64.powi(e);
        let mut exps = vec![e];
        if big >= scale * (1.0 - 4.0 * ALARM) {
            exps.push(e + 1);
        }
        if e > 0 && big <= 0.5 * scale * (1.0 + 4.0 * ALARM) {
            exps.push(e - 1);
        }

        let mut signs = vec![1.0];
        let margin = 2.0 * ALARM * scale;
        let entries = m.entries();
        let first_robust = entries.iter().position(|z| z.norm() > margin);
        let fragile = match first_robust {
            None => true,
            Some(i) => entries[..i].iter().any(|z| z.norm() > 1e-12) || entries[i].re.abs() <= margin,
        };
        if fragile {
            signs.push(-1.0);
        }

        let v = components(m);
        let mut keys = Vec::new();
        for &exp in &exps {
            let w = CELL * 2f64.powi(exp);
            let band = 1.1 * ALARM * scale / w;
            for &sign in &signs {
                let mut options: Vec<Vec<i64>> = Vec::with_capacity(8);
                for &c in &v {
                    let q = sign * c / w;
                    let base = q.floor();
                    let frac = q - base;
                    let mut o = vec![base as i64];
                    if frac < band {
                        o.push(base as i64 - 1);
                    }
                    if frac > 1.0 - band {
                        o.push(base as i64 + 1);
                    }
                    options.push(o);
                }
                let mut cells = [0i64; 8];
                expand(&options, 0, &mut cells, &mut |cells| keys.push(cell_key(exp, cells)));
            }
        }
        keys.sort_unstable();
        keys.dedup();
        keys
    }

    fn lookup(&self, m: &Isometry) -> Lookup {
        let scale = 2f64.powi(scale_exponent(m).0);
        let mut best: Option<(u32, f64)> = None;
        for key in Self::variant_keys(m) {
            let mut k = key;
            while let Some(&id) = self.index.get(&k) {
                let d = self.matrices[id as usize].projective_distance(m);
                if best.is_none_or(|(_, b)| d < b) {
                    best = Some((id, d));
                }
                k = k.wrapping_add(PROBE_STEP);
            }
        }
        match best {
            Some((_, d)) if d <= DUPLICATE * scale => Lookup::Duplicate,
            Some((other, d)) if d <= ALARM * scale => Lookup::Suspect { other, gap: d, scale },
            _ => Lookup::New,
        }
    }
}

fn expand(options: &[Vec<i64>], i: usize, cells: &mut [i64; 8], emit: &mut dyn FnMut(&[i64; 8])) {
    if i == options.len() {
        emit(cells);
        return;
    }
    for &o in &options[i] {
        cells[i] = o;
        expand(options, i + 1, cells, emit);
    }
}
