//! The edge-colored regular tree as reduced color words.
//!
//! Every vertex is named by the sequence of edge colors read along the
//! geodesic from a fixed base vertex `v0`. Because the colors around each
//! vertex are pairwise distinct, those sequences are exactly the reduced
//! words (no letter repeated twice in a row), and all the tree structure
//! (neighbors, geodesics, half-trees) is word combinatorics. The tree itself
//! is never materialized, so the color set may be infinite.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An edge color. Finite color sets are `0..d`; the infinite color set is
/// all of `i64`.
pub type Color = i64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("word {0:?} is not reduced")]
    NotReduced(Vec<Color>),
    #[error("color {color} is outside {omega}")]
    ColorOutOfRange { color: Color, omega: Omega },
    #[error("cannot enumerate a ball of radius {0} with an empty color window")]
    EmptyWindow(usize),
    #[error("invalid periodic end: {0}")]
    InvalidEnd(String),
    #[error("cannot parse vertex {0:?}")]
    Parse(String),
}

/// The color set Ω.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Omega {
    /// `{0, …, d-1}` with `d >= 3`.
    Finite(usize),
    Integers,
}

impl Omega {
    pub fn contains(&self, c: Color) -> bool {
        match self {
            Omega::Finite(d) => c >= 0 && (c as usize) < *d,
            Omega::Integers => true,
        }
    }

    pub fn degree(&self) -> Option<usize> {
        match self {
            Omega::Finite(d) => Some(*d),
            Omega::Integers => None,
        }
    }

    /// All colors, for a finite color set.
    pub fn colors(&self) -> Option<Vec<Color>> {
        self.degree().map(|d| (0..d as Color).collect())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Omega::Finite(_))
    }
}

impl fmt::Display for Omega {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Omega::Finite(d) => write!(f, "{{0..{}}}", d.saturating_sub(1)),
            Omega::Integers => f.write_str("Z"),
        }
    }
}

/// A vertex of the colored tree, as a reduced word read from `v0`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Color>", into = "Vec<Color>")]
pub struct Vertex {
    word: Vec<Color>,
}

impl Vertex {
    /// The base vertex `v0`.
    pub fn root() -> Self {
        Vertex { word: Vec::new() }
    }

    pub fn from_word(word: Vec<Color>) -> Result<Self, TreeError> {
        if word.windows(2).any(|w| w[0] == w[1]) {
            return Err(TreeError::NotReduced(word));
        }
        Ok(Vertex { word })
    }

    /// Reduces an arbitrary color sequence by walking it from `v0`.
    pub fn walk(colors: &[Color]) -> Self {
        colors.iter().fold(Vertex::root(), |v, &c| v.neighbor(c))
    }

    pub fn word(&self) -> &[Color] {
        &self.word
    }

    /// Distance to `v0`.
    pub fn depth(&self) -> usize {
        self.word.len()
    }

    pub fn is_root(&self) -> bool {
        self.word.is_empty()
    }

    pub fn last(&self) -> Option<Color> {
        self.word.last().copied()
    }

    pub fn parent(&self) -> Option<Vertex> {
        if self.word.is_empty() {
            None
        } else {
            Some(Vertex {
                word: self.word[..self.word.len() - 1].to_vec(),
            })
        }
    }

    /// The other endpoint of the edge of color `c` at this vertex.
    pub fn neighbor(&self, c: Color) -> Vertex {
        let mut word = self.word.clone();
        if word.last() == Some(&c) {
            word.pop();
        } else {
            word.push(c);
        }
        Vertex { word }
    }

    pub fn prefix(&self, len: usize) -> Vertex {
        Vertex {
            word: self.word[..len.min(self.word.len())].to_vec(),
        }
    }

    pub fn is_prefix_of(&self, other: &Vertex) -> bool {
        other.word.starts_with(&self.word)
    }

    pub fn common_prefix_len(&self, other: &Vertex) -> usize {
        self.word
            .iter()
            .zip(&other.word)
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// `v0`, then every proper and improper prefix in increasing length.
    pub fn prefixes(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..=self.word.len()).map(move |k| self.prefix(k))
    }

    pub fn distance(&self, other: &Vertex) -> usize {
        let l = self.common_prefix_len(other);
        self.depth() + other.depth() - 2 * l
    }

    /// The color of the first edge on the geodesic toward `target`, if distinct.
    pub fn direction_to(&self, target: &Vertex) -> Option<Color> {
        if self == target {
            return None;
        }
        let l = self.common_prefix_len(target);
        if l < self.depth() {
            self.last()
        } else {
            Some(target.word[l])
        }
    }
}

impl std::borrow::Borrow<[Color]> for Vertex {
    fn borrow(&self) -> &[Color] {
        &self.word
    }
}

impl TryFrom<Vec<Color>> for Vertex {
    type Error = TreeError;
    fn try_from(word: Vec<Color>) -> Result<Self, Self::Error> {
        Vertex::from_word(word)
    }
}

impl From<Vertex> for Vec<Color> {
    fn from(v: Vertex) -> Self {
        v.word
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("v0");
        }
        if self.word.iter().all(|c| (0..10).contains(c)) {
            for c in &self.word {
                write!(f, "{c}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.word.iter().map(|c| c.to_string()).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl FromStr for Vertex {
    type Err = TreeError;

    /// Accepts `v0`, a digit string such as `010`, or comma-separated integers.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "v0" {
            return Ok(Vertex::root());
        }
        let word: Option<Vec<Color>> = if s.contains(',') {
            s.split(',').map(|p| p.trim().parse::<Color>().ok()).collect()
        } else {
            s.chars().map(|ch| ch.to_digit(10).map(Color::from)).collect()
        };
        let word = word.ok_or_else(|| TreeError::Parse(s.to_string()))?;
        Vertex::from_word(word)
    }
}

/// The unique simple path from `u` to `w`, both endpoints included.
pub fn geodesic(u: &Vertex, w: &Vertex) -> Vec<Vertex> {
    let l = u.common_prefix_len(w);
    let mut path = Vec::with_capacity(u.distance(w) + 1);
    for k in (l..=u.depth()).rev() {
        path.push(u.prefix(k));
    }
    for k in l + 1..=w.depth() {
        path.push(w.prefix(k));
    }
    path
}

/// An edge with an orientation: the edge of color `color` at `tail`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DirectedEdge {
    pub tail: Vertex,
    pub color: Color,
}

impl DirectedEdge {
    pub fn new(tail: Vertex, color: Color) -> Self {
        DirectedEdge { tail, color }
    }

    pub fn head(&self) -> Vertex {
        self.tail.neighbor(self.color)
    }

    pub fn reversed(&self) -> DirectedEdge {
        DirectedEdge {
            tail: self.head(),
            color: self.color,
        }
    }

    /// The edge from `tail` to `head`, if they are adjacent.
    pub fn between(tail: &Vertex, head: &Vertex) -> Option<DirectedEdge> {
        if tail.distance(head) != 1 {
            return None;
        }
        let color = tail.direction_to(head)?;
        Some(DirectedEdge::new(tail.clone(), color))
    }
}

impl fmt::Display for DirectedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} -{}-> {})", self.tail, self.color, self.head())
    }
}

/// The component of the tree minus an edge that contains the edge's head.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfTree {
    pub edge: DirectedEdge,
}

impl HalfTree {
    pub fn new(edge: DirectedEdge) -> Self {
        HalfTree { edge }
    }

    pub fn at(tail: Vertex, color: Color) -> Self {
        HalfTree::new(DirectedEdge::new(tail, color))
    }

    /// The half-tree on the other side of the same edge.
    pub fn complement(&self) -> HalfTree {
        HalfTree::new(self.edge.reversed())
    }

    /// The endpoint of the defining edge inside the half-tree.
    pub fn root(&self) -> Vertex {
        self.edge.head()
    }

    /// Membership for a word, read as a vertex or as a finite ray prefix.
    fn contains_word(&self, word: &[Color]) -> bool {
        let head = self.edge.head();
        if head.depth() > self.edge.tail.depth() {
            word.starts_with(head.word())
        } else {
            !word.starts_with(self.edge.tail.word())
        }
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.contains_word(v.word())
    }

    /// Membership of an end, decided from a ray prefix of sufficient depth.
    pub fn contains_end(&self, end: &EndPoint) -> bool {
        let depth = self.edge.tail.depth().max(self.edge.head().depth());
        self.contains_word(&end.prefix(depth))
    }

    /// Membership of an end given by an explicit ray prefix from `v0`.
    pub fn contains_ray_prefix(&self, prefix: &[Color]) -> bool {
        debug_assert!(prefix.len() >= self.edge.tail.depth().max(self.edge.head().depth()));
        self.contains_word(prefix)
    }

    pub fn is_disjoint(&self, other: &HalfTree) -> bool {
        !other.contains(&self.root()) && !self.contains(&other.root())
    }

    pub fn is_subset(&self, other: &HalfTree) -> bool {
        other.contains(&self.root()) && !self.contains(&other.edge.tail)
    }
}

/// Something that lies on one side of an edge: a vertex or an end.
pub trait HalfTreeMember {
    fn lies_in(&self, h: &HalfTree) -> bool;
}

impl HalfTreeMember for Vertex {
    fn lies_in(&self, h: &HalfTree) -> bool {
        h.contains(self)
    }
}

impl HalfTreeMember for EndPoint {
    fn lies_in(&self, h: &HalfTree) -> bool {
        h.contains_end(self)
    }
}

pub fn half_tree_contains<X: HalfTreeMember + ?Sized>(h: &HalfTree, x: &X) -> bool {
    x.lies_in(h)
}

impl fmt::Display for HalfTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "half-tree{}", self.edge)
    }
}

/// All vertices within distance `r` of `v` whose letters lie in `window`.
///
/// Letters of `v` itself are kept as they are; only the new letters are
/// restricted to the window. The result is sorted.
pub fn enumerate_ball(v: &Vertex, r: usize, window: &[Color]) -> Result<Vec<Vertex>, TreeError> {
    if window.is_empty() && r > 0 {
        return Err(TreeError::EmptyWindow(r));
    }
    let window: BTreeSet<Color> = window.iter().copied().collect();
    let mut seen = BTreeSet::new();
    seen.insert(v.clone());
    let mut queue = VecDeque::from([(v.clone(), 0usize)]);
    while let Some((x, d)) = queue.pop_front() {
        if d == r {
            continue;
        }
        for &c in &window {
            let y = x.neighbor(c);
            if y.word().iter().all(|l| window.contains(l) || v.word().contains(l))
                && seen.insert(y.clone())
            {
                queue.push_back((y, d + 1));
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// An eventually periodic end `prefix · period^∞`, kept in a normal form
/// (primitive period, shortest prefix) so that equality is exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PeriodicEnd {
    prefix: Vec<Color>,
    period: Vec<Color>,
}

impl PeriodicEnd {
    pub fn new(prefix: Vec<Color>, period: Vec<Color>) -> Result<Self, TreeError> {
        if period.is_empty() {
            return Err(TreeError::InvalidEnd("empty period".into()));
        }
        let mut probe = prefix.clone();
        probe.extend_from_slice(&period);
        probe.extend_from_slice(&period);
        if probe.windows(2).any(|w| w[0] == w[1]) {
            return Err(TreeError::InvalidEnd(format!(
                "{prefix:?}·({period:?})^∞ is not reduced"
            )));
        }
        Ok(Self::normalized(prefix, period))
    }

    fn normalized(mut prefix: Vec<Color>, mut period: Vec<Color>) -> Self {
        // primitive root of the period
        let n = period.len();
        for k in 1..=n {
            if n.is_multiple_of(k) && (0..n).all(|i| period[i] == period[i % k]) {
                period.truncate(k);
                break;
            }
        }
        // absorb trailing prefix letters into the period
        while let Some(&l) = prefix.last() {
            if l == *period.last().unwrap() {
                prefix.pop();
                period.rotate_right(1);
            } else {
                break;
            }
        }
        PeriodicEnd { prefix, period }
    }

    pub fn prefix_word(&self) -> &[Color] {
        &self.prefix
    }

    pub fn period(&self) -> &[Color] {
        &self.period
    }

    /// The first `depth` letters of the ray from `v0`.
    pub fn ray(&self, depth: usize) -> Vec<Color> {
        self.prefix
            .iter()
            .chain(self.period.iter().cycle())
            .take(depth)
            .copied()
            .collect()
    }
}

impl fmt::Display for PeriodicEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |w: &[Color]| -> String {
            if w.iter().all(|c| (0..10).contains(c)) {
                w.iter().map(|c| c.to_string()).collect()
            } else {
                w.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
            }
        };
        write!(f, "{}({})^∞", show(&self.prefix), show(&self.period))
    }
}

/// A point of the boundary of the tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EndPoint {
    Periodic(PeriodicEnd),
    /// The attracting (`sign = +1`) or repelling (`sign = -1`) end of a
    /// hyperbolic element.
    AxisEnd {
        g: Box<crate::portrait::TreeAutomorphism>,
        sign: i8,
    },
}

/// How two ends were compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndComparison {
    Exact,
    Depth(usize),
}

impl EndPoint {
    pub fn periodic(prefix: Vec<Color>, period: Vec<Color>) -> Result<Self, TreeError> {
        Ok(EndPoint::Periodic(PeriodicEnd::new(prefix, period)?))
    }

    /// The first `depth` letters of the geodesic ray from `v0` to this end.
    pub fn prefix(&self, depth: usize) -> Vec<Color> {
        match self {
            EndPoint::Periodic(p) => p.ray(depth),
            EndPoint::AxisEnd { g, sign } => crate::dynamics::axis_ray_prefix(g, *sign, depth),
        }
    }

    /// Exact comparison for two periodic ends, prefix comparison at `depth`
    /// otherwise. The returned mode says which one was used.
    pub fn compare(&self, other: &EndPoint, depth: usize) -> (bool, EndComparison) {
        match (self, other) {
            (EndPoint::Periodic(a), EndPoint::Periodic(b)) => (a == b, EndComparison::Exact),
            _ => (
                self.prefix(depth) == other.prefix(depth),
                EndComparison::Depth(depth),
            ),
        }
    }
}

impl fmt::Display for EndPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EndPoint::Periodic(p) => p.fmt(f),
            EndPoint::AxisEnd { sign, .. } => {
                write!(f, "axis-end({})", if *sign > 0 { "+" } else { "-" })
            }
        }
    }
}
