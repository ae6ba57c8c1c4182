//! Isometry types, axes and ends, half-tree fixation, and free subgroups.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::portrait::TreeAutomorphism;
use crate::tree::{geodesic, DirectedEdge, EndPoint, HalfTree, PeriodicEnd, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynamicsError {
    #[error("element is not hyperbolic ({0})")]
    NotHyperbolic(IsometryType),
    #[error("the two elements have a common end to depth {0}")]
    SharedEnds(usize),
    #[error("power must be positive")]
    ZeroPower,
    #[error("no pairwise disjoint half-trees at power {0}")]
    NoDisjointHalfTrees(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IsometryType {
    Elliptic { fixed_vertex: Vertex },
    Inversion { edge: DirectedEdge },
    Hyperbolic { length: usize, axis_point: Vertex },
}

impl IsometryType {
    pub fn translation_length(&self) -> usize {
        match self {
            IsometryType::Hyperbolic { length, .. } => *length,
            _ => 0,
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        matches!(self, IsometryType::Hyperbolic { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            IsometryType::Elliptic { .. } => "Elliptic",
            IsometryType::Inversion { .. } => "Inversion",
            IsometryType::Hyperbolic { .. } => "Hyperbolic",
        }
    }
}

impl fmt::Display for IsometryType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsometryType::Elliptic { fixed_vertex } => write!(f, "Elliptic at {fixed_vertex}"),
            IsometryType::Inversion { edge } => write!(f, "Inversion of edge {edge}"),
            IsometryType::Hyperbolic { length, axis_point } => {
                write!(f, "Hyperbolic, length {length}, axis through {axis_point}")
            }
        }
    }
}

/// Classifies `g` by midpoint descent from `v0`.
///
/// Each step replaces `x` by the midpoint of `[x, g(x)]` (the endpoint
/// nearer `g(x)` when the midpoint is a mid-edge). The midpoint lies in the
/// minimal displacement set, so at most two steps are ever taken.
pub fn classify_isometry(g: &TreeAutomorphism) -> IsometryType {
    let mut x = Vertex::root();
    loop {
        let gx = g.evaluate(&x);
        let d = x.distance(&gx);
        if d == 0 {
            return IsometryType::Elliptic { fixed_vertex: x };
        }
        let g2x = g.evaluate(&gx);
        if d == 1 && g2x == x {
            let edge = DirectedEdge::between(&x, &gx).expect("adjacent vertices");
            return IsometryType::Inversion { edge };
        }
        if x.distance(&g2x) == 2 * d {
            return IsometryType::Hyperbolic {
                length: d,
                axis_point: x,
            };
        }
        let path = geodesic(&x, &gx);
        x = path[d.div_ceil(2)].clone();
    }
}

/// The first `depth` letters of the ray from `v0` to the attracting
/// (`sign > 0`) or repelling end of a hyperbolic `g`.
///
/// # Panics
/// If `g` is not hyperbolic.
pub fn axis_ray_prefix(g: &TreeAutomorphism, sign: i8, depth: usize) -> Vec<crate::tree::Color> {
    let IsometryType::Hyperbolic { axis_point, .. } = classify_isometry(g) else {
        panic!("axis end of a non-hyperbolic element");
    };
    let step = if sign > 0 { g.clone() } else { g.inverse() };
    let mut z = axis_point;
    loop {
        let next = step.evaluate(&z);
        if z.is_prefix_of(&next) && next.depth() >= depth {
            return next.word()[..depth].to_vec();
        }
        z = next;
    }
}

/// The attracting and repelling ends of a hyperbolic element.
pub fn axis_and_ends(g: &TreeAutomorphism) -> Result<(EndPoint, EndPoint), DynamicsError> {
    match classify_isometry(g) {
        IsometryType::Hyperbolic { .. } => Ok((
            EndPoint::AxisEnd {
                g: Box::new(g.clone()),
                sign: 1,
            },
            EndPoint::AxisEnd {
                g: Box::new(g.clone()),
                sign: -1,
            },
        )),
        other => Err(DynamicsError::NotHyperbolic(other)),
    }
}

/// The image of an end under `g`.
///
/// Periodic ends map to periodic ends exactly: far enough along the ray
/// the local action is one branch constant `f`, so the image ray is
/// `g(x_N)` followed by `f` applied to the remaining letters.
pub fn apply_to_end(g: &TreeAutomorphism, end: &EndPoint) -> EndPoint {
    match end {
        EndPoint::Periodic(p) => EndPoint::Periodic(apply_to_periodic(g, p)),
        EndPoint::AxisEnd { g: h, sign } => EndPoint::AxisEnd {
            g: Box::new(h.conjugate_by(g)),
            sign: *sign,
        },
    }
}

pub fn apply_to_periodic(g: &TreeAutomorphism, end: &PeriodicEnd) -> PeriodicEnd {
    let period = end.period();
    let plen = end.prefix_word().len();
    let mut n = (g.core_radius() + 1).max(plen);
    n += (period.len() - (n - plen) % period.len()) % period.len();
    let x = Vertex::from_word(end.ray(n)).expect("end rays are reduced");
    let f = g.local_action(&x);
    let image: Vec<_> = period.iter().map(|&c| f.apply(c)).collect();
    let mut y = g.evaluate(&x).word().to_vec();
    let mut pos = 0;
    while y.last() == Some(&image[pos % image.len()]) {
        y.pop();
        pos += 1;
    }
    y.extend_from_slice(&image[pos % image.len()..]);
    PeriodicEnd::new(y, image).expect("images of reduced rays are reduced")
}

/// Whether `g` fixes every vertex of `h`.
///
/// Equivalent to `g(head) = head` together with `σ(g, w) = id` for every
/// `w` in `h`, which only involves the finitely many core values and
/// branch rules whose branches meet `h`.
pub fn fixes_half_tree_pointwise(g: &TreeAutomorphism, h: &HalfTree) -> bool {
    let head = h.root();
    if g.evaluate(&head) != head {
        return false;
    }
    for (u, entry) in g.core() {
        if h.contains(u) && !entry.local.is_identity() {
            return false;
        }
        let meets = |c| !HalfTree::at(u.clone(), c).is_disjoint(h);
        let outward = |c| Some(c) != u.last() && !g.core().contains_key(&u.neighbor(c));
        for (&c, f) in &entry.branches.explicit {
            if meets(c) && !f.is_identity() {
                return false;
            }
        }
        if let Some(default) = &entry.branches.default {
            if h.contains(u) {
                if !default.is_identity() {
                    return false;
                }
            } else if let Some(c) = u.direction_to(&head) {
                if outward(c) && !entry.branches.explicit.contains_key(&c) && !default.is_identity() {
                    return false;
                }
            }
        }
    }
    true
}

/// Two hyperbolic elements with four distinct ends, found among products of
/// the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralTypeWitness {
    pub g1: TreeAutomorphism,
    pub g2: TreeAutomorphism,
    /// Generator indices, leftmost factor first.
    pub word1: Vec<usize>,
    pub word2: Vec<usize>,
    /// Depth at which the ends were compared.
    pub depth: usize,
}

/// Searches products of at most `search_len` generators for two hyperbolic
/// elements whose four ends differ at depth `2 · L · search_len`, where `L`
/// is the largest displacement of `v0` by a generator.
///
/// Products are visited by length, then lexicographically; the first
/// qualifying pair is returned. `None` means only that the bounded search
/// found nothing.
pub fn general_type_witness(
    gens: &[TreeAutomorphism],
    search_len: usize,
) -> Option<GeneralTypeWitness> {
    let omega = gens.first()?.omega();
    let max_disp = gens
        .iter()
        .map(|g| g.base_image().depth())
        .max()
        .unwrap_or(0)
        .max(1);
    let depth = 2 * max_disp * search_len.max(1);

    let mut seen: HashSet<TreeAutomorphism> = HashSet::new();
    let mut layer = vec![(Vec::new(), TreeAutomorphism::identity(omega))];
    seen.insert(layer[0].1.clone());
    let mut hyperbolic: Vec<(Vec<usize>, TreeAutomorphism, [Vec<crate::tree::Color>; 2])> = Vec::new();
    for _ in 0..search_len {
        let mut next = Vec::new();
        for (word, g) in &layer {
            for (i, s) in gens.iter().enumerate() {
                let p = g.compose(s);
                if !seen.insert(p.clone()) {
                    continue;
                }
                let mut w = word.clone();
                w.push(i);
                if classify_isometry(&p).is_hyperbolic() {
                    let ends = [axis_ray_prefix(&p, 1, depth), axis_ray_prefix(&p, -1, depth)];
                    for (w0, g0, e0) in &hyperbolic {
                        let all = [&e0[0], &e0[1], &ends[0], &ends[1]];
                        let distinct = (0..4).all(|a| (a + 1..4).all(|b| all[a] != all[b]));
                        if distinct {
                            return Some(GeneralTypeWitness {
                                g1: g0.clone(),
                                g2: p,
                                word1: w0.clone(),
                                word2: w,
                                depth,
                            });
                        }
                    }
                    hyperbolic.push((w.clone(), p.clone(), ends));
                }
                next.push((w, p));
            }
        }
        layer = next;
    }
    None
}

/// Four pairwise disjoint half-trees witnessing ping-pong for `g1^power`
/// and `g2^power`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeGroupCertificate {
    pub power: u32,
    /// `[H1-, H1+, H2-, H2+]`.
    pub half_trees: [HalfTree; 4],
    /// `gi^power` maps the complement of `Hi-` into `Hi+`.
    pub forward: [bool; 2],
    /// `gi^-power` maps the complement of `Hi+` into `Hi-`.
    pub backward: [bool; 2],
}

impl FreeGroupCertificate {
    pub fn holds(&self) -> bool {
        let h = &self.half_trees;
        let disjoint = (0..4).all(|a| (a + 1..4).all(|b| h[a].is_disjoint(&h[b])));
        disjoint && self.forward.iter().chain(&self.backward).all(|&b| b)
    }
}

fn image_half_tree(g: &TreeAutomorphism, h: &HalfTree) -> HalfTree {
    let tail = g.evaluate(&h.edge.tail);
    let head = g.evaluate(&h.root());
    HalfTree::new(DirectedEdge::between(&tail, &head).expect("automorphisms preserve edges"))
}

/// Axis vertices `x_k = ` position `k` along the axis of `g`, for
/// `k ∈ [0, 2·span]`, with the axis point at index `span`.
fn axis_vertices(g: &TreeAutomorphism, span_steps: usize) -> (Vec<Vertex>, usize) {
    let IsometryType::Hyperbolic { axis_point, length } = classify_isometry(g) else {
        unreachable!("checked by the caller")
    };
    let (mut back, mut fwd) = (axis_point.clone(), axis_point);
    let gi = g.inverse();
    for _ in 0..span_steps {
        back = gi.evaluate(&back);
        fwd = g.evaluate(&fwd);
    }
    (geodesic(&back, &fwd), span_steps * length)
}

/// Finds the ping-pong half-trees for `g1^power`, `g2^power`.
pub fn ping_pong_certificate(
    g1: &TreeAutomorphism,
    g2: &TreeAutomorphism,
    power: u32,
) -> Result<FreeGroupCertificate, DynamicsError> {
    if power == 0 {
        return Err(DynamicsError::ZeroPower);
    }
    let mut lengths = [0usize; 2];
    for (k, g) in [g1, g2].into_iter().enumerate() {
        let t = classify_isometry(g);
        if !t.is_hyperbolic() {
            return Err(DynamicsError::NotHyperbolic(t));
        }
        lengths[k] = t.translation_length();
    }
    let probe = 8 * lengths[0].max(lengths[1]) * power as usize;
    let same = |s: i8, t: i8| axis_ray_prefix(g1, s, probe) == axis_ray_prefix(g2, t, probe);
    if same(1, 1) || same(1, -1) || same(-1, 1) || same(-1, -1) {
        return Err(DynamicsError::SharedEnds(probe));
    }

    let span = power as usize + 6;
    let (ax1, c1) = axis_vertices(g1, span);
    let (ax2, c2) = axis_vertices(g2, span);
    let m1 = power as usize * lengths[0];
    let m2 = power as usize * lengths[1];
    let pair = |ax: &[Vertex], o: usize, m: usize| {
        [
            HalfTree::new(DirectedEdge::between(&ax[o], &ax[o - 1]).unwrap()),
            HalfTree::new(DirectedEdge::between(&ax[o + m - 1], &ax[o + m]).unwrap()),
        ]
    };
    // offsets ordered by distance from the axis points
    let offsets = |len: usize, centre: usize, m: usize| {
        let mut os: Vec<usize> = (1..len - m).collect();
        os.sort_by_key(|&o| (o as i64 - centre as i64).unsigned_abs());
        os
    };
    for o1 in offsets(ax1.len(), c1, m1) {
        let [a, b] = pair(&ax1, o1, m1);
        for &o2 in &offsets(ax2.len(), c2, m2) {
            let [c, d] = pair(&ax2, o2, m2);
            let hs = [a.clone(), b.clone(), c, d];
            if !(0..4).all(|i| (i + 1..4).all(|j| hs[i].is_disjoint(&hs[j]))) {
                continue;
            }
            let mut forward = [false; 2];
            let mut backward = [false; 2];
            for (k, g) in [g1, g2].into_iter().enumerate() {
                let gp = g.pow(power);
                let gm = gp.inverse();
                let (minus, plus) = (&hs[2 * k], &hs[2 * k + 1]);
                forward[k] = image_half_tree(&gp, &minus.complement()).is_subset(plus);
                backward[k] = image_half_tree(&gm, &plus.complement()).is_subset(minus);
            }
            return Ok(FreeGroupCertificate {
                power,
                half_trees: hs,
                forward,
                backward,
            });
        }
    }
    Err(DynamicsError::NoDisjointHalfTrees(power))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;
    use crate::tree::{enumerate_ball, Omega};

    fn v(s: &str) -> Vertex {
        s.parse().unwrap()
    }

    fn constant(f: Permutation, base: &str) -> TreeAutomorphism {
        TreeAutomorphism::from_constant(f, v(base))
    }

    fn id3() -> Permutation {
        Permutation::identity(Omega::Finite(3))
    }

    fn rot() -> Permutation {
        Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap()
    }

    #[test]
    fn classification_examples() {
        assert_eq!(
            classify_isometry(&TreeAutomorphism::identity(Omega::Finite(3))),
            IsometryType::Elliptic {
                fixed_vertex: Vertex::root()
            }
        );
        assert_eq!(
            classify_isometry(&constant(id3(), "0")),
            IsometryType::Inversion {
                edge: DirectedEdge::new(Vertex::root(), 0)
            }
        );
        assert_eq!(
            classify_isometry(&constant(id3(), "01")),
            IsometryType::Hyperbolic {
                length: 2,
                axis_point: Vertex::root()
            }
        );
    }

    #[test]
    fn descent_from_off_axis() {
        // conjugating moves the axis away from v0
        let t = constant(id3(), "01");
        let h = constant(rot(), "21");
        let c = t.conjugate_by(&h);
        let IsometryType::Hyperbolic { length, axis_point } = classify_isometry(&c) else {
            panic!("conjugate of a translation is a translation");
        };
        assert_eq!(length, 2);
        for n in 1..=5 {
            assert_eq!(axis_point.distance(&c.pow(n).evaluate(&axis_point)), 2 * n as usize);
        }
    }

    #[test]
    fn axis_prefix_of_translation() {
        let t = constant(id3(), "01");
        assert_eq!(axis_ray_prefix(&t, 1, 6), vec![0, 1, 0, 1, 0, 1]);
        assert_eq!(axis_ray_prefix(&t, -1, 4), vec![1, 0, 1, 0]);
        let (a, r) = axis_and_ends(&t.inverse()).unwrap();
        assert_eq!(a.prefix(4), vec![1, 0, 1, 0]);
        assert_eq!(r.prefix(4), vec![0, 1, 0, 1]);
        assert!(axis_and_ends(&constant(id3(), "0")).is_err());
    }

    #[test]
    fn periodic_end_images_match_ray_evaluation() {
        let end = PeriodicEnd::new(vec![2], vec![0, 1]).unwrap();
        let gs = [
            constant(rot(), "01"),
            constant(id3(), "0"),
            constant(rot(), "2").compose(&constant(id3(), "1201")),
        ];
        for g in &gs {
            let img = apply_to_periodic(g, &end);
            let ray = Vertex::from_word(end.ray(40)).unwrap();
            let gray = g.evaluate(&ray);
            assert_eq!(img.ray(20), gray.word()[..20].to_vec());
        }
    }

    #[test]
    fn half_tree_fixation_examples() {
        let h = HalfTree::at(Vertex::root(), 0);
        assert!(fixes_half_tree_pointwise(&TreeAutomorphism::identity(Omega::Finite(3)), &h));
        assert!(!fixes_half_tree_pointwise(&constant(id3(), "0"), &h));
        assert!(!fixes_half_tree_pointwise(&constant(rot(), ""), &h));
    }

    #[test]
    fn half_tree_fixation_matches_ball_check() {
        let g = constant(rot(), "").compose(&constant(id3(), "1")).compose(&constant(rot(), "1"));
        // a half-tree is fixed once the ball reaches two levels past both
        // the core and the half-tree's root
        let tails = enumerate_ball(&Vertex::root(), 3, &[0, 1, 2]).unwrap();
        let ball = enumerate_ball(&Vertex::root(), g.core_radius().max(4) + 2, &[0, 1, 2]).unwrap();
        for u in &tails {
            for c in 0..3 {
                if u.last() == Some(c) {
                    continue;
                }
                let h = HalfTree::at(u.clone(), c);
                let brute = ball.iter().filter(|x| h.contains(x)).all(|x| g.evaluate(x) == *x);
                assert_eq!(fixes_half_tree_pointwise(&g, &h), brute, "{h}");
            }
        }
    }

    #[test]
    fn general_type_search() {
        let gens = [constant(id3(), "0"), constant(rot(), "01")];
        let w = general_type_witness(&gens, 3).expect("witness at length 3");
        assert!(w.word1.len() <= 3 && w.word2.len() <= 3);
        assert!(general_type_witness(&[TreeAutomorphism::identity(Omega::Finite(3))], 3).is_none());
        assert!(general_type_witness(&[constant(id3(), "01")], 4).is_none());
    }

    #[test]
    fn ping_pong_for_translation_and_rotated_copy() {
        let t = constant(id3(), "01");
        let s = t.conjugate_by(&constant(rot(), ""));
        let cert = ping_pong_certificate(&t, &s, 1).unwrap();
        assert!(cert.holds());
        assert!(matches!(ping_pong_certificate(&t, &t, 1), Err(DynamicsError::SharedEnds(_))));
        assert_eq!(ping_pong_certificate(&t, &s, 0), Err(DynamicsError::ZeroPower));
    }
}
