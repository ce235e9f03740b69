//! The GSEMO population: one solution per non-dominated objective vector.
//!
//! Dump format, one member per line after a header:
//!
//! ```text
//! archive 3d <n> <size>
//! <mu> <v> <c> <hex bits>
//! ```
//!
//! 2D archives write `<mu_hat> <v_hat> <hex bits>`. Reals use shortest
//! round-trip decimal notation, so a dump reloads to bit-identical vectors.
//! See [`Solution::to_hex`] for the bit encoding.

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::objectives::{ObjectiveVector2D, ObjectiveVector3D, ParetoObjective};
use crate::solution::Solution;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Insertion {
    Accepted,
    Rejected,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParetoArchive<O> {
    bits: usize,
    vectors: Vec<O>,
    solutions: Vec<Solution>,
    max_size_seen: usize,
}

impl<O: ParetoObjective> ParetoArchive<O> {
    /// An empty archive for solutions of length `bits`.
    pub fn new(bits: usize) -> Self {
        ParetoArchive {
            bits,
            vectors: Vec::new(),
            solutions: Vec::new(),
            max_size_seen: 0,
        }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Largest size reached so far.
    pub fn max_size_seen(&self) -> usize {
        self.max_size_seen
    }

    pub fn members(&self) -> impl ExactSizeIterator<Item = (&Solution, &O)> {
        self.solutions.iter().zip(&self.vectors)
    }

    pub fn solutions(&self) -> &[Solution] {
        &self.solutions
    }

    pub fn vectors(&self) -> &[O] {
        &self.vectors
    }

    /// Rejects `y` if a member strongly dominates it. Otherwise every member
    /// that `y` weakly dominates is dropped (an equal vector included, so the
    /// newcomer replaces it) and `y` is added.
    pub fn try_insert(&mut self, y: Solution, fy: O) -> Insertion {
        assert_eq!(y.len(), self.bits, "solution length does not match the archive");
        if self.vectors.iter().any(|m| m.strongly_dominates(&fy)) {
            return Insertion::Rejected;
        }
        let mut kept = 0;
        for i in 0..self.vectors.len() {
            if !fy.weakly_dominates(&self.vectors[i]) {
                self.vectors.swap(kept, i);
                self.solutions.swap(kept, i);
                kept += 1;
            }
        }
        self.vectors.truncate(kept);
        self.solutions.truncate(kept);
        self.vectors.push(fy);
        self.solutions.push(y);
        self.max_size_seen = self.max_size_seen.max(self.vectors.len());
        Insertion::Accepted
    }

    /// A member chosen uniformly at random.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<&Solution> {
        if self.is_empty() {
            return Err(Error::Logic("cannot sample from an empty archive"));
        }
        Ok(&self.solutions[rng.random_range(0..self.len())])
    }

    /// `O(|P|^2)` scan for a strongly dominated member or a repeated vector.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                if i == j {
                    continue;
                }
                if a == b {
                    return Err(format!("members {i} and {j} share the vector {a:?}"));
                }
                if a.strongly_dominates(b) {
                    return Err(format!("member {i} {a:?} dominates member {j} {b:?}"));
                }
            }
        }
        if self.max_size_seen < self.len() {
            return Err("max_size_seen below current size".into());
        }
        Ok(())
    }
}

impl<O: DumpVector> ParetoArchive<O> {
    pub fn dump(&self) -> String {
        let mut out = format!("archive {} {} {}\n", O::TAG, self.bits, self.len());
        for (x, v) in self.members() {
            v.write_fields(&mut out);
            out.push(' ');
            out.push_str(&x.to_hex());
            out.push('\n');
        }
        out
    }

    /// Reads a dump produced by [`ParetoArchive::dump`]. Members keep their
    /// order; `max_size_seen` becomes the member count.
    pub fn parse_dump(text: &str) -> Result<Self> {
        O::unwrap_dump(ArchiveDump::parse(text)?)
    }
}

/// Text encoding of an objective vector inside an archive dump.
pub trait DumpVector: ParetoObjective + Sized {
    const TAG: &'static str;
    const FIELDS: usize;
    fn write_fields(&self, out: &mut String);
    fn read_fields(fields: &[&str]) -> Option<Self>;
    #[doc(hidden)]
    fn unwrap_dump(dump: ArchiveDump) -> Result<ParetoArchive<Self>>;
}

impl DumpVector for ObjectiveVector2D {
    const TAG: &'static str = "2d";
    const FIELDS: usize = 2;

    fn write_fields(&self, out: &mut String) {
        let _ = write!(out, "{} {}", self.mu_hat, self.v_hat);
    }

    fn read_fields(fields: &[&str]) -> Option<Self> {
        Some(ObjectiveVector2D {
            mu_hat: fields[0].parse().ok()?,
            v_hat: fields[1].parse().ok()?,
        })
    }

    fn unwrap_dump(dump: ArchiveDump) -> Result<ParetoArchive<Self>> {
        match dump {
            ArchiveDump::TwoD(a) => Ok(a),
            ArchiveDump::ThreeD(_) => Err(Error::Config("expected a 2d archive, found 3d".into())),
        }
    }
}

impl DumpVector for ObjectiveVector3D {
    const TAG: &'static str = "3d";
    const FIELDS: usize = 3;

    fn write_fields(&self, out: &mut String) {
        let _ = write!(out, "{} {} {}", self.mu, self.v, self.c);
    }

    fn read_fields(fields: &[&str]) -> Option<Self> {
        Some(ObjectiveVector3D {
            mu: fields[0].parse().ok()?,
            v: fields[1].parse().ok()?,
            c: fields[2].parse().ok()?,
        })
    }

    fn unwrap_dump(dump: ArchiveDump) -> Result<ParetoArchive<Self>> {
        match dump {
            ArchiveDump::ThreeD(a) => Ok(a),
            ArchiveDump::TwoD(_) => Err(Error::Config("expected a 3d archive, found 2d".into())),
        }
    }
}

/// An archive of either formulation, as read back from a dump.
#[derive(Clone, Debug, PartialEq)]
pub enum ArchiveDump {
    TwoD(ParetoArchive<ObjectiveVector2D>),
    ThreeD(ParetoArchive<ObjectiveVector3D>),
}

impl ArchiveDump {
    pub fn solutions(&self) -> &[Solution] {
        match self {
            ArchiveDump::TwoD(a) => a.solutions(),
            ArchiveDump::ThreeD(a) => a.solutions(),
        }
    }

    pub fn bits(&self) -> usize {
        match self {
            ArchiveDump::TwoD(a) => a.bits(),
            ArchiveDump::ThreeD(a) => a.bits(),
        }
    }

    pub fn dump(&self) -> String {
        match self {
            ArchiveDump::TwoD(a) => a.dump(),
            ArchiveDump::ThreeD(a) => a.dump(),
        }
    }

    /// Parses an archive section. Text after the declared members is ignored.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_lines(&mut text.lines().enumerate().map(|(i, l)| (i + 1, l)))
    }

    pub(crate) fn parse_lines<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>) -> Result<Self> {
        let origin = "<archive>";
        let (lineno, header) = lines
            .find(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .ok_or_else(|| Error::parse(origin, 1, "missing archive header"))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        let bad_header = || Error::parse(origin, lineno, "expected 'archive <2d|3d> <n> <size>'");
        if head.len() != 4 || head[0] != "archive" {
            return Err(bad_header());
        }
        let bits: usize = head[2].parse().map_err(|_| bad_header())?;
        let size: usize = head[3].parse().map_err(|_| bad_header())?;
        match head[1] {
            "2d" => Ok(ArchiveDump::TwoD(read_members(lines, bits, size, lineno)?)),
            "3d" => Ok(ArchiveDump::ThreeD(read_members(lines, bits, size, lineno)?)),
            _ => Err(bad_header()),
        }
    }
}

fn read_members<'a, O: DumpVector>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    bits: usize,
    size: usize,
    header_line: usize,
) -> Result<ParetoArchive<O>> {
    let origin = "<archive>";
    let mut archive = ParetoArchive::new(bits);
    for _ in 0..size {
        let (lineno, line) = lines
            .next()
            .ok_or_else(|| Error::parse(origin, header_line, format!("archive declares {size} members")))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != O::FIELDS + 1 {
            return Err(Error::parse(
                origin,
                lineno,
                format!("expected {} fields", O::FIELDS + 1),
            ));
        }
        let vector = O::read_fields(&fields[..O::FIELDS])
            .ok_or_else(|| Error::parse(origin, lineno, "malformed objective vector"))?;
        let x = Solution::from_hex(fields[O::FIELDS], bits).map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
        archive.vectors.push(vector);
        archive.solutions.push(x);
    }
    archive.max_size_seen = archive.len();
    Ok(archive)
}
