//! Finitely generated matrix groups: generators, inverse letters, optional
//! abelian exponent homomorphism, builtin example groups and the JSON group
//! file format.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pingpong::PingPong;
use crate::error::{Error, Result};
use crate::hyperbolic::Isometry;

/// Two matrices closer than this (projectively) are the same generator.
const INVERSE_MATCH: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub label: String,
    pub matrix: Isometry,
}

/// One letter of the word alphabet: a generator or the inverse of one.
#[derive(Debug, Clone, PartialEq)]
pub struct Letter {
    pub label: String,
    pub matrix: Isometry,
    /// Index of the inverse letter.
    pub inverse: usize,
    /// Exponent vector under the homomorphism, when one is given.
    pub hom: Option<Vec<i64>>,
}

#[derive(Debug, Clone)]
pub struct GroupPresentation {
    name: String,
    generators: Vec<Generator>,
    inverse_closed: bool,
    letters: Vec<Letter>,
    hom_rank: Option<usize>,
    prefix_slack: f64,
    pingpong: Option<PingPong>,
}

impl GroupPresentation {
    /// Builds a presentation. When `inverse_closed` is false the inverse of
    /// every generator is appended as its own letter, labelled `label^-1`.
    pub fn new(
        name: impl Into<String>,
        generators: Vec<Generator>,
        inverse_closed: bool,
        hom: Option<BTreeMap<String, Vec<i64>>>,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidPresentation("generator list is empty".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for g in &generators {
            if !seen.insert(g.label.as_str()) {
                return Err(Error::InvalidPresentation(format!("duplicate label {:?}", g.label)));
            }
            let det = g.matrix.det();
            if (det - Complex64::new(1.0, 0.0)).norm() > crate::hyperbolic::DET_TOLERANCE {
                return Err(Error::InvalidPresentation(format!("generator {} is not unimodular", g.label)));
            }
        }

        let hom_rank = match &hom {
            None => None,
            Some(map) => Some(validate_hom(map, &generators)?),
        };

        let mut letters: Vec<Letter> = generators
            .iter()
            .map(|g| Letter {
                label: g.label.clone(),
                matrix: g.matrix,
                inverse: usize::MAX,
                hom: hom.as_ref().and_then(|m| m.get(&g.label).cloned()),
            })
            .collect();

        if inverse_closed {
            for i in 0..letters.len() {
                let inv = letters[i].matrix.inverse();
                let j = letters.iter().position(|l| l.matrix.projective_distance(&inv) <= INVERSE_MATCH).ok_or_else(
                    || {
                        Error::InvalidPresentation(format!(
                            "inverse of {} missing from an inverse-closed list",
                            letters[i].label
                        ))
                    },
                )?;
                letters[i].inverse = j;
            }
            // Fill in or check negated hom vectors on inverse pairs.
            if hom_rank.is_some() {
                for i in 0..letters.len() {
                    let j = letters[i].inverse;
                    match (&letters[i].hom, &letters[j].hom) {
                        (Some(u), Some(v)) => {
                            if u.iter().zip(v).any(|(a, b)| *a != -*b) {
                                return Err(Error::InvalidPresentation(format!(
                                    "hom of {} is not the negation of hom of {}",
                                    letters[i].label, letters[j].label
                                )));
                            }
                        }
                        (Some(u), None) => letters[j].hom = Some(u.iter().map(|a| -a).collect()),
                        _ => {}
                    }
                }
                if let Some(l) = letters.iter().find(|l| l.hom.is_none()) {
                    return Err(Error::InvalidPresentation(format!("hom undefined on {}", l.label)));
                }
            }
        } else {
            let n = letters.len();
            for i in 0..n {
                let inv = Letter {
                    label: format!("{}^-1", letters[i].label),
                    matrix: letters[i].matrix.inverse(),
                    inverse: i,
                    hom: letters[i].hom.as_ref().map(|v| v.iter().map(|a| -a).collect()),
                };
                letters[i].inverse = n + i;
                letters.push(inv);
            }
            if hom_rank.is_some() {
                if let Some(l) = letters.iter().find(|l| l.hom.is_none()) {
                    return Err(Error::InvalidPresentation(format!("hom undefined on {}", l.label)));
                }
            }
        }

        let prefix_slack = letters.iter().map(|l| l.matrix.displacement()).fold(0.0, f64::max);
        Ok(Self { name: name.into(), generators, inverse_closed, letters, hom_rank, prefix_slack, pingpong: None })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn inverse_closed(&self) -> bool {
        self.inverse_closed
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn hom_rank(&self) -> Option<usize> {
        self.hom_rank
    }

    /// Slack `s` in the prefix assumption `d(j, p j) <= d(j, w j) + s` for
    /// prefixes `p` of words `w`, used to prune uncertified enumerations.
    pub fn prefix_slack(&self) -> f64 {
        self.prefix_slack
    }

    pub fn with_prefix_slack(mut self, slack: f64) -> Result<Self> {
        if !(slack >= 0.0 && slack.is_finite()) {
            return Err(Error::InvalidPresentation(format!(
                "prefix slack must be finite and nonnegative, got {slack}"
            )));
        }
        self.prefix_slack = slack;
        Ok(self)
    }

    pub fn pingpong(&self) -> Option<&PingPong> {
        self.pingpong.as_ref()
    }

    /// Attaches a ping-pong certificate after validating it against the letters.
    pub fn with_pingpong(mut self, pingpong: PingPong) -> Result<Self> {
        self.pingpong = Some(pingpong.certify(&self.letters)?);
        Ok(self)
    }

    /// Largest letter displacement at `j`.
    pub fn max_letter_displacement(&self) -> f64 {
        self.letters.iter().map(|l| l.matrix.displacement()).fold(0.0, f64::max)
    }

    /// Reorders the generator list (letters are rebuilt), keeping any certificate.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.generators.len() {
            return Err(Error::InvalidPresentation("permutation length mismatch".into()));
        }
        let generators: Vec<Generator> = order.iter().map(|&i| self.generators[i].clone()).collect();
        let hom = self.hom_map();
        let mut p = Self::new(self.name.clone(), generators, self.inverse_closed, hom)?;
        p.prefix_slack = self.prefix_slack;
        if let Some(pp) = &self.pingpong {
            let disks = p
                .letters
                .iter()
                .map(|l| {
                    let k = self.letters.iter().position(|m| m.label == l.label).expect("label present");
                    pp.disks()[k]
                })
                .collect();
            p = p.with_pingpong(PingPong::new(disks)?)?;
        }
        Ok(p)
    }

    fn hom_map(&self) -> Option<BTreeMap<String, Vec<i64>>> {
        self.hom_rank?;
        Some(
            self.generators
                .iter()
                .map(|g| {
                    let l = self.letters.iter().find(|l| l.label == g.label).expect("generator letter");
                    (g.label.clone(), l.hom.clone().expect("hom defined"))
                })
                .collect(),
        )
    }

    /// Replaces the homomorphism (keyed by generator label).
    pub fn with_hom(&self, hom: BTreeMap<String, Vec<i64>>) -> Result<Self> {
        let mut p = Self::new(self.name.clone(), self.generators.clone(), self.inverse_closed, Some(hom))?;
        p.prefix_slack = self.prefix_slack;
        p.pingpong = self.pingpong.clone();
        Ok(p)
    }

    /// Evaluates a word given as letter indices.
    pub fn evaluate(&self, word: &[u16]) -> Isometry {
        word.iter().fold(Isometry::IDENTITY, |acc, &l| acc.compose(&self.letters[l as usize].matrix))
    }

    /// Renders a word with letter labels, `e` for the empty word.
    pub fn word_string(&self, word: &[u16]) -> String {
        if word.is_empty() {
            "e".to_string()
        } else {
            word.iter().map(|&l| self.letters[l as usize].label.as_str()).collect::<Vec<_>>().join(" ")
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: GroupFile = serde_json::from_str(s)?;
        file.into_presentation("file")
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: GroupFile = serde_json::from_str(&text)?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "file".into());
        file.into_presentation(&name)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let file = GroupFile {
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorRecord {
                    label: g.label.clone(),
                    a: [g.matrix.a.re, g.matrix.a.im],
                    b: [g.matrix.b.re, g.matrix.b.im],
                    c: [g.matrix.c.re, g.matrix.c.im],
                    d: [g.matrix.d.re, g.matrix.d.im],
                })
                .collect(),
            hom: self.hom_map(),
            inverse_closed: Some(self.inverse_closed),
            prefix_slack: Some(self.prefix_slack),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }
}

fn validate_hom(map: &BTreeMap<String, Vec<i64>>, generators: &[Generator]) -> Result<usize> {
    let rank = map.values().next().map(Vec::len).unwrap_or(0);
    if map.values().any(|v| v.len() != rank) {
        return Err(Error::InvalidPresentation("hom vectors have different lengths".into()));
    }
    for key in map.keys() {
        if !generators.iter().any(|g| &g.label == key) {
            return Err(Error::InvalidPresentation(format!("hom names unknown generator {key:?}")));
        }
    }
    Ok(rank)
}

#[derive(Debug, Serialize, Deserialize)]
struct GeneratorRecord {
    label: String,
    a: [f64; 2],
    b: [f64; 2],
    c: [f64; 2],
    d: [f64; 2],
}

/// On-disk group description.
#[derive(Debug, Serialize, Deserialize)]
struct GroupFile {
    generators: Vec<GeneratorRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hom: Option<BTreeMap<String, Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inverse_closed: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prefix_slack: Option<f64>,
}

impl GroupFile {
    fn into_presentation(self, name: &str) -> Result<GroupPresentation> {
        let c = |v: [f64; 2]| Complex64::new(v[0], v[1]);
        let generators = self
            .generators
            .into_iter()
            .map(|g| {
                let raw = Isometry { a: c(g.a), b: c(g.b), c: c(g.c), d: c(g.d) };
                let det = raw.det();
                if (det - Complex64::new(1.0, 0.0)).norm() > crate::hyperbolic::DET_TOLERANCE {
                    return Err(Error::InvalidPresentation(format!(
                        "generator {} has determinant {det}, expected 1",
                        g.label
                    )));
                }
                Ok(Generator { label: g.label, matrix: raw.normalized() })
            })
            .collect::<Result<Vec<_>>>()?;
        let p = GroupPresentation::new(name, generators, self.inverse_closed.unwrap_or(false), self.hom)?;
        match self.prefix_slack {
            Some(s) => p.with_prefix_slack(s),
            None => Ok(p),
        }
    }
}

/// Example groups shipped with the library.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    /// Identity only.
    Trivial,
    /// Loxodromic `diag(e^{l/2}, e^{-l/2})` with translation length `l`.
    Cyclic { length: f64 },
    /// Rank-2 Schottky group: the axial translation of length `l` and its
    /// conjugate by the rotation taking the axis `0 -> inf` to `-1 -> 1`.
    Schottky { length: f64 },
    /// Parabolic `z -> z + 1`. Counts grow like `e^{rho/2}`; stress tests only.
    Parabolic,
}

/// Smallest Schottky translation length for which the round ping-pong disks
/// are disjoint: `e^{-l/2} < sqrt(2) - 1`.
pub fn schottky_min_length() -> f64 {
    -2.0 * (std::f64::consts::SQRT_2 - 1.0).ln()
}

impl Builtin {
    /// Parses `trivial`, `cyclic[:l]`, `schottky[:l]`, `parabolic`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, param) = match spec.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (spec, None),
        };
        let length = |default: f64| -> Result<f64> {
            match param {
                None => Ok(default),
                Some(p) => p
                    .parse::<f64>()
                    .ok()
                    .filter(|l| l.is_finite() && *l > 0.0)
                    .ok_or_else(|| Error::InvalidPresentation(format!("bad length parameter {p:?}"))),
            }
        };
        match name {
            "trivial" => Ok(Self::Trivial),
            "cyclic" => Ok(Self::Cyclic { length: length(1.0)? }),
            "schottky" => Ok(Self::Schottky { length: length(3.0)? }),
            "parabolic" => Ok(Self::Parabolic),
            _ => Err(Error::InvalidPresentation(format!("unknown builtin group {spec:?}"))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Trivial => "trivial".into(),
            Self::Cyclic { length } => format!("cyclic:{length}"),
            Self::Schottky { length } => format!("schottky:{length}"),
            Self::Parabolic => "parabolic".into(),
        }
    }

    pub fn presentation(&self) -> Result<GroupPresentation> {
        match *self {
            Self::Trivial => {
                let g = Generator { label: "e".into(), matrix: Isometry::IDENTITY };
                GroupPresentation::new(self.name(), vec![g], false, None)?.with_prefix_slack(0.0)
            }
            Self::Cyclic { length } => {
                let a = Generator { label: "a".into(), matrix: Isometry::axial_translation(length) };
                let p = GroupPresentation::new(self.name(), vec![a], false, None)?;
                p.with_pingpong(PingPong::cyclic_axial(length))
            }
            Self::Schottky { length } => {
                if length <= schottky_min_length() {
                    return Err(Error::InvalidPresentation(format!(
                        "schottky length {length} too short for disjoint ping-pong disks (need > {:.4})",
                        schottky_min_length()
                    )));
                }
                let rot = schottky_rotation();
                let a = Isometry::axial_translation(length);
                let b = a.conjugate_by(&rot);
                let gens = vec![Generator { label: "a".into(), matrix: a }, Generator { label: "b".into(), matrix: b }];
                let p = GroupPresentation::new(self.name(), gens, false, None)?;
                let pp = PingPong::schottky(length, &rot)?;
                p.with_pingpong(pp)
            }
            Self::Parabolic => {
                let t = Generator { label: "t".into(), matrix: Isometry::parabolic(Complex64::new(1.0, 0.0)) };
                // d(j, t^n j) = acosh(1 + n^2/2) is increasing in |n|.
                GroupPresentation::new(self.name(), vec![t], false, None)?.with_prefix_slack(0.0)
            }
        }
    }
}

/// `z -> (z - 1)/(z + 1)`, sending the axis `0 -> inf` to `-1 -> 1`.
pub fn schottky_rotation() -> Isometry {
    Isometry::real(1.0, -1.0, 1.0, 1.0).expect("unimodular after scaling")
}

/// Parses a group argument: a builtin name or a path to a JSON group file.
pub fn load_group(spec: &str) -> Result<GroupPresentation> {
    match Builtin::parse(spec) {
        Ok(b) => b.presentation(),
        Err(builtin_err) => {
            let path = Path::new(spec);
            if path.exists() {
                GroupPresentation::from_json_file(path)
            } else {
                Err(builtin_err)
            }
        }
    }
}
