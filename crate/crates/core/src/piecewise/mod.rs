//! Piecewise automorphisms: an explicit map on a finite subtree and one
//! global group element on each component of its complement.

mod free_product;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{Debug, Display};

use thiserror::Error;

use crate::dynamics::fixes_half_tree_pointwise;
use crate::perm::{PermGroupSpec, Permutation};
use crate::portrait::{GroupClass, TreeAutomorphism};
use crate::tree::{DirectedEdge, HalfTree, Omega, Vertex};

pub use free_product::{CosetVertex, FreeProductTree, FreeProductWord, Letter, Side};

/// A locally finite rooted tree given by its parent and neighbor maps.
pub trait TreeSpace {
    type V: Clone + Ord + Debug + Display;

    fn root(&self) -> Self::V;
    fn parent(&self, v: &Self::V) -> Option<Self::V>;
    fn neighbors(&self, v: &Self::V) -> Vec<Self::V>;

    fn depth(&self, v: &Self::V) -> usize {
        let mut d = 0;
        let mut x = v.clone();
        while let Some(p) = self.parent(&x) {
            x = p;
            d += 1;
        }
        d
    }

    fn geodesic(&self, u: &Self::V, w: &Self::V) -> Vec<Self::V> {
        let (mut a, mut b) = (u.clone(), w.clone());
        let (mut da, mut db) = (self.depth(&a), self.depth(&b));
        let (mut up, mut down) = (vec![a.clone()], vec![b.clone()]);
        while da > db {
            a = self.parent(&a).unwrap();
            da -= 1;
            up.push(a.clone());
        }
        while db > da {
            b = self.parent(&b).unwrap();
            db -= 1;
            down.push(b.clone());
        }
        while a != b {
            a = self.parent(&a).unwrap();
            b = self.parent(&b).unwrap();
            up.push(a.clone());
            down.push(b.clone());
        }
        down.pop();
        up.extend(down.into_iter().rev());
        up
    }

    fn distance(&self, u: &Self::V, w: &Self::V) -> usize {
        self.geodesic(u, w).len() - 1
    }

    fn ball(&self, v: &Self::V, r: usize) -> Vec<Self::V> {
        let mut seen = BTreeSet::from([v.clone()]);
        let mut queue = VecDeque::from([(v.clone(), 0)]);
        while let Some((x, d)) = queue.pop_front() {
            if d == r {
                continue;
            }
            for y in self.neighbors(&x) {
                if seen.insert(y.clone()) {
                    queue.push_back((y, d + 1));
                }
            }
        }
        seen.into_iter().collect()
    }

    /// The smallest subtree containing `vs`.
    fn hull(&self, vs: &BTreeSet<Self::V>) -> BTreeSet<Self::V> {
        let mut out = BTreeSet::new();
        let Some(first) = vs.iter().next() else {
            return out;
        };
        for v in vs {
            out.extend(self.geodesic(first, v));
        }
        out
    }

    /// The vertex of the (connected) set `a` nearest to `x`, and the next
    /// vertex on the way to `x` when `x ∉ a`.
    fn projection(&self, a: &BTreeSet<Self::V>, x: &Self::V) -> (Self::V, Option<Self::V>) {
        let anchor = a.iter().next().expect("nonempty subtree");
        let path = self.geodesic(x, anchor);
        let k = path.iter().position(|y| a.contains(y)).unwrap();
        (path[k].clone(), (k > 0).then(|| path[k - 1].clone()))
    }
}

/// A group acting on a [`TreeSpace`].
pub trait PieceAction<S: TreeSpace>: Clone + PartialEq + Debug {
    fn apply(&self, space: &S, v: &S::V) -> S::V;
    /// `self ∘ other`.
    fn compose(&self, space: &S, other: &Self) -> Self;
    fn inverse(&self, space: &S) -> Self;
    fn is_identity(&self) -> bool;

    /// Whether this element fixes the component beyond `tail → head`
    /// pointwise. The default suits actions where only the identity fixes
    /// a half-tree.
    fn fixes_branch(&self, _space: &S, _tail: &S::V, _head: &S::V) -> bool {
        self.is_identity()
    }
}

/// The regular tree of finite degree with colored edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegularTree {
    pub omega: Omega,
}

impl TreeSpace for RegularTree {
    type V = Vertex;

    fn root(&self) -> Vertex {
        Vertex::root()
    }

    fn parent(&self, v: &Vertex) -> Option<Vertex> {
        v.parent()
    }

    fn neighbors(&self, v: &Vertex) -> Vec<Vertex> {
        self.omega
            .colors()
            .expect("piecewise elements need a finite color set")
            .into_iter()
            .map(|c| v.neighbor(c))
            .collect()
    }

    fn depth(&self, v: &Vertex) -> usize {
        v.depth()
    }

    fn geodesic(&self, u: &Vertex, w: &Vertex) -> Vec<Vertex> {
        crate::tree::geodesic(u, w)
    }
}

impl PieceAction<RegularTree> for TreeAutomorphism {
    fn apply(&self, _: &RegularTree, v: &Vertex) -> Vertex {
        self.evaluate(v)
    }

    fn compose(&self, _: &RegularTree, other: &Self) -> Self {
        TreeAutomorphism::compose(self, other)
    }

    fn inverse(&self, _: &RegularTree) -> Self {
        TreeAutomorphism::inverse(self)
    }

    fn is_identity(&self) -> bool {
        TreeAutomorphism::is_identity(self)
    }

    fn fixes_branch(&self, _: &RegularTree, tail: &Vertex, head: &Vertex) -> bool {
        let edge = DirectedEdge::between(tail, head).expect("adjacent vertices");
        fixes_half_tree_pointwise(self, &HalfTree::new(edge))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PwError {
    #[error("the finite subtree is empty")]
    Empty,
    #[error("the finite subtree is not connected at {0}")]
    Disconnected(String),
    #[error("no image given for {0}")]
    MissingImage(String),
    #[error("map on the subtree is not injective: {0}")]
    NotInjective(String),
    #[error("frontier edge {0} has no piece")]
    MissingPiece(String),
    #[error("piece at {0} is not on a frontier edge")]
    ExtraPiece(String),
    #[error("piece at {0} disagrees with the map at its tail")]
    PieceMismatch(String),
    #[error("image collision at {0}")]
    ImageCollision(String),
    #[error("neighbors of {0} do not map onto the neighbors of its image")]
    NotLocallyBijective(String),
    #[error("{0} is not fixed by g")]
    NotFixed(String),
    #[error("g does not map the first edge to the second")]
    WrongImage,
    #[error("the two edges coincide")]
    SameEdge,
    #[error("{0} has degree {1} < 3")]
    DegreeTooSmall(String, usize),
    #[error("edge {0} does not start at the chosen vertex")]
    EdgeNotAtVertex(String),
    #[error("element is not in G(F, Sym) for F = {0}")]
    NotInClass(String),
    #[error("branch constant {0} at {1} is not in F")]
    NonExtendableBranch(String, String),
    #[error("color set must be finite")]
    InfiniteDegree,
}

/// An element acting as `map` on a finite subtree `A` and as one group
/// element on each component of `T ∖ A`, keyed by the frontier edge
/// `(v, u)` with `v ∈ A`, `u ∉ A`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseAut<S: TreeSpace, G> {
    pub subtree: BTreeSet<S::V>,
    pub map: BTreeMap<S::V, S::V>,
    pub pieces: BTreeMap<(S::V, S::V), G>,
}

fn show<V: Display>(v: &V) -> String {
    v.to_string()
}

fn show_edge<V: Display>(e: &(V, V)) -> String {
    format!("{}→{}", e.0, e.1)
}

impl<S: TreeSpace, G: PieceAction<S>> PiecewiseAut<S, G> {
    /// A global element as a one-piece-per-edge element around the root.
    pub fn global(space: &S, g: &G) -> Self {
        let root = space.root();
        let pieces = space
            .neighbors(&root)
            .into_iter()
            .map(|u| ((root.clone(), u), g.clone()))
            .collect();
        PiecewiseAut {
            subtree: BTreeSet::from([root.clone()]),
            map: BTreeMap::from([(root.clone(), g.apply(space, &root))]),
            pieces,
        }
    }

    pub fn evaluate(&self, space: &S, x: &S::V) -> S::V {
        if let Some(y) = self.map.get(x) {
            return y.clone();
        }
        let (v, u) = space.projection(&self.subtree, x);
        self.pieces[&(v, u.unwrap())].apply(space, x)
    }

    /// Checks that the data describe a tree automorphism.
    pub fn validate(&self, space: &S) -> Result<(), PwError> {
        let root = self.subtree.iter().next().ok_or(PwError::Empty)?;
        let mut seen = BTreeSet::from([root.clone()]);
        let mut queue = VecDeque::from([root.clone()]);
        while let Some(x) = queue.pop_front() {
            for y in space.neighbors(&x) {
                if self.subtree.contains(&y) && seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        if let Some(v) = self.subtree.iter().find(|v| !seen.contains(*v)) {
            return Err(PwError::Disconnected(show(v)));
        }
        if let Some(v) = self.subtree.iter().find(|v| !self.map.contains_key(*v)) {
            return Err(PwError::MissingImage(show(v)));
        }
        let images: BTreeSet<&S::V> = self.map.values().collect();
        if images.len() != self.map.len() || self.map.len() != self.subtree.len() {
            return Err(PwError::NotInjective(format!(
                "{} vertices, {} images",
                self.subtree.len(),
                images.len()
            )));
        }
        let mut frontier = BTreeSet::new();
        for v in &self.subtree {
            for u in space.neighbors(v) {
                if !self.subtree.contains(&u) {
                    frontier.insert((v.clone(), u));
                }
            }
        }
        if let Some(e) = frontier.iter().find(|e| !self.pieces.contains_key(*e)) {
            return Err(PwError::MissingPiece(show_edge(e)));
        }
        if let Some(e) = self.pieces.keys().find(|e| !frontier.contains(*e)) {
            return Err(PwError::ExtraPiece(show_edge(e)));
        }
        for ((v, _), g) in &self.pieces {
            if g.apply(space, v) != self.map[v] {
                return Err(PwError::PieceMismatch(show(v)));
            }
        }
        for v in &self.subtree {
            let mut got: Vec<S::V> = space
                .neighbors(v)
                .into_iter()
                .map(|u| match self.map.get(&u) {
                    Some(y) => y.clone(),
                    None => self.pieces[&(v.clone(), u.clone())].apply(space, &u),
                })
                .collect();
            got.sort();
            if got.windows(2).any(|w| w[0] == w[1]) {
                return Err(PwError::ImageCollision(show(v)));
            }
            let mut want = space.neighbors(&self.map[v]);
            want.sort();
            if got != want {
                return Err(PwError::NotLocallyBijective(show(v)));
            }
        }
        Ok(())
    }

    pub fn is_valid(&self, space: &S) -> bool {
        self.validate(space).is_ok()
    }

    /// Whether the element acts trivially.
    pub fn is_identity(&self, space: &S) -> bool {
        self.map.iter().all(|(x, y)| x == y)
            && self.pieces.iter().all(|((v, u), g)| g.fixes_branch(space, v, u))
    }

    pub fn inverse(&self, space: &S) -> Self {
        let map: BTreeMap<S::V, S::V> = self.map.iter().map(|(x, y)| (y.clone(), x.clone())).collect();
        let subtree = map.keys().cloned().collect();
        let pieces = self
            .pieces
            .iter()
            .map(|((v, u), g)| ((self.map[v].clone(), g.apply(space, u)), g.inverse(space)))
            .collect();
        PiecewiseAut { subtree, map, pieces }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, space: &S, other: &Self) -> Self {
        let q_inv = other.inverse(space);
        let mut support: BTreeSet<S::V> = other.subtree.clone();
        support.extend(self.subtree.iter().map(|x| q_inv.evaluate(space, x)));
        let subtree = space.hull(&support);
        let map = subtree
            .iter()
            .map(|x| (x.clone(), self.evaluate(space, &other.evaluate(space, x))))
            .collect();
        let mut pieces = BTreeMap::new();
        for s in &subtree {
            for t in space.neighbors(s) {
                if subtree.contains(&t) {
                    continue;
                }
                let (qv, qu) = space.projection(&other.subtree, &t);
                let gq = &other.pieces[&(qv, qu.unwrap())];
                let qt = gq.apply(space, &t);
                let (pv, pu) = space.projection(&self.subtree, &qt);
                let gp = &self.pieces[&(pv, pu.expect("image of a component avoids the subtree"))];
                pieces.insert((s.clone(), t), gp.compose(space, gq));
            }
        }
        PiecewiseAut { subtree, map, pieces }
    }
}

pub fn pw_validate<S: TreeSpace, G: PieceAction<S>>(
    space: &S,
    p: &PiecewiseAut<S, G>,
) -> Result<(), PwError> {
    p.validate(space)
}

pub fn pw_compose<S: TreeSpace, G: PieceAction<S>>(
    space: &S,
    p: &PiecewiseAut<S, G>,
    q: &PiecewiseAut<S, G>,
) -> PiecewiseAut<S, G> {
    p.compose(space, q)
}

/// The element acting as `g` beyond `e1`, as `g⁻¹` beyond `e2` and trivially
/// elsewhere, where `e1 = (v, u1)` and `e2 = (v, u2)` start at a vertex `v`
/// fixed by `g` with `g(u1) = u2`.
pub fn thm_b_witness<S: TreeSpace, G: PieceAction<S>>(
    space: &S,
    g: &G,
    identity: &G,
    v: &S::V,
    e1: &(S::V, S::V),
    e2: &(S::V, S::V),
) -> Result<PiecewiseAut<S, G>, PwError> {
    let nbrs = space.neighbors(v);
    for e in [e1, e2] {
        if e.0 != *v || !nbrs.contains(&e.1) {
            return Err(PwError::EdgeNotAtVertex(show_edge(e)));
        }
    }
    if nbrs.len() < 3 {
        return Err(PwError::DegreeTooSmall(show(v), nbrs.len()));
    }
    if e1 == e2 {
        return Err(PwError::SameEdge);
    }
    if g.apply(space, v) != *v {
        return Err(PwError::NotFixed(show(v)));
    }
    if g.apply(space, &e1.1) != e2.1 {
        return Err(PwError::WrongImage);
    }
    let pieces = nbrs
        .into_iter()
        .map(|u| {
            let piece = if u == e1.1 {
                g.clone()
            } else if u == e2.1 {
                g.inverse(space)
            } else {
                identity.clone()
            };
            ((v.clone(), u), piece)
        })
        .collect();
    Ok(PiecewiseAut {
        subtree: BTreeSet::from([v.clone()]),
        map: BTreeMap::from([(v.clone(), v.clone())]),
        pieces,
    })
}

/// The witness of [`thm_b_witness`] on the tree of `A ∗ B`, at the coset
/// `1·X` of the first factor `X` of order at least 3, with `g` its first
/// non-identity element.
pub fn free_product_witness(
    t: &FreeProductTree,
) -> Result<PiecewiseAut<FreeProductTree, FreeProductWord>, PwError> {
    let side = if t.b.order() >= 3 { Side::B } else { Side::A };
    let v = CosetVertex {
        word: FreeProductWord::identity(),
        side,
    };
    let group = if side == Side::A { &t.a } else { &t.b };
    let k = (0..group.order()).find(|&k| k != group.identity()).unwrap_or(0);
    let g = t.generator(side, k);
    let u1 = t.neighbors(&v).into_iter().next().expect("coset vertices have neighbors");
    let u2 = t.act(&g, &u1);
    thm_b_witness(t, &g, &FreeProductWord::identity(), &v, &(v.clone(), u1), &(v.clone(), u2))
}

/// Rewrites `g ∈ G(F, Sym(Ω))` as a piecewise element whose pieces are
/// constant portraits in `U(F)`: the core of `g` is the finite subtree and
/// each branch gets the constant portrait agreeing with `g` on it.
pub fn pw_identification_check(
    g: &TreeAutomorphism,
    f: &PermGroupSpec,
) -> Result<PiecewiseAut<RegularTree, TreeAutomorphism>, PwError> {
    let Omega::Finite(d) = g.omega() else {
        return Err(PwError::InfiniteDegree);
    };
    let class = GroupClass::GofFFp(f.clone(), PermGroupSpec::symmetric(d));
    if g.membership(&class) != Ok(true) {
        return Err(PwError::NotInClass(f.to_string()));
    }
    let subtree: BTreeSet<Vertex> = g.core().keys().cloned().collect();
    let map = subtree.iter().map(|u| (u.clone(), g.evaluate(u))).collect();
    let mut pieces = BTreeMap::new();
    for (u, entry) in g.core() {
        for (&c, branch) in &entry.branches.explicit {
            let anchor = u.neighbor(c);
            if !f.contains(branch) {
                return Err(PwError::NonExtendableBranch(branch.to_string(), anchor.to_string()));
            }
            pieces.insert((u.clone(), anchor.clone()), constant_through(branch, &anchor, &g.evaluate(&anchor)));
        }
    }
    Ok(PiecewiseAut { subtree, map, pieces })
}

/// The constant portrait `σ ≡ f` sending `x` to `y`.
fn constant_through(f: &Permutation, x: &Vertex, y: &Vertex) -> TreeAutomorphism {
    let mut base = y.clone();
    for &c in x.word().iter().rev() {
        base = base.neighbor(f.apply(c));
    }
    let h = TreeAutomorphism::from_constant(f.clone(), base);
    debug_assert_eq!(&h.evaluate(x), y);
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::FiniteGroup;

    fn v(s: &str) -> Vertex {
        s.parse().unwrap()
    }

    fn tree3() -> RegularTree {
        RegularTree {
            omega: Omega::Finite(3),
        }
    }

    #[test]
    fn generic_geodesic_matches_words() {
        let t = tree3();
        let ball = t.ball(&t.root(), 3);
        assert_eq!(ball.len(), 22);
        for a in &ball {
            for b in &ball {
                let generic = <RegularTree as TreeSpace>::geodesic(&t, a, b);
                assert_eq!(generic, crate::tree::geodesic(a, b));
            }
        }
        let fp = FreeProductTree::psl2z();
        let ball = fp.ball(&fp.root(), 4);
        for a in &ball {
            for b in &ball {
                let path = fp.geodesic(a, b);
                assert!(path.windows(2).all(|w| fp.neighbors(&w[0]).contains(&w[1])));
            }
        }
    }

    #[test]
    fn global_element_is_valid() {
        let t = FreeProductTree::psl2z();
        let g = t.multiply(&t.generator(Side::A, 1), &t.generator(Side::B, 1));
        let p = PiecewiseAut::global(&t, &g);
        assert_eq!(p.validate(&t), Ok(()));
        for x in t.ball(&t.root(), 4) {
            assert_eq!(p.evaluate(&t, &x), t.act(&g, &x));
        }
    }

    #[test]
    fn overlapping_images_collide() {
        let t = FreeProductTree::psl2z();
        let mut p = PiecewiseAut::global(&t, &FreeProductWord::identity());
        let b = t.generator(Side::B, 1);
        // send the branch at (1,B) onto itself by b, which moves the tail
        let key = p.pieces.keys().next().unwrap().clone();
        p.pieces.insert(key, b);
        assert!(matches!(p.validate(&t), Err(PwError::PieceMismatch(_))));

        let rt = tree3();
        let mut q = PiecewiseAut::global(&rt, &TreeAutomorphism::identity(Omega::Finite(3)));
        let swap = TreeAutomorphism::from_constant(
            Permutation::from_cycles(3, &[&[0, 1]]).unwrap(),
            Vertex::root(),
        );
        q.pieces.insert((Vertex::root(), v("0")), swap);
        assert!(matches!(q.validate(&rt), Err(PwError::ImageCollision(_))));
    }

    fn psl_witness() -> (FreeProductTree, PiecewiseAut<FreeProductTree, FreeProductWord>) {
        let t = FreeProductTree::psl2z();
        let w = free_product_witness(&t).unwrap();
        (t, w)
    }

    #[test]
    fn free_product_witness_needs_degree_three() {
        let t = FreeProductTree::new(FiniteGroup::cyclic(2), FiniteGroup::cyclic(2));
        assert!(matches!(free_product_witness(&t), Err(PwError::DegreeTooSmall(_, 2))));
    }

    #[test]
    fn psl2z_witness() {
        let (t, w) = psl_witness();
        assert_eq!(w.validate(&t), Ok(()));
        assert!(!w.is_identity(&t));
        let fixed: Vec<_> = w.pieces.iter().filter(|(_, g)| g.is_identity()).collect();
        assert_eq!(fixed.len(), 1);
        let ((_, u3), _) = fixed[0];
        for x in t.ball(u3, 4) {
            if t.distance(&x, u3) < t.distance(&x, &w.subtree.iter().next().unwrap().clone()) {
                assert_eq!(w.evaluate(&t, &x), x);
            }
        }
    }

    #[test]
    fn witness_errors() {
        let t = FreeProductTree::psl2z();
        let id = FreeProductWord::identity();
        let vb = CosetVertex {
            word: FreeProductWord::identity(),
            side: Side::B,
        };
        let nb = t.neighbors(&vb);
        let e1 = (vb.clone(), nb[0].clone());
        let e2 = (vb.clone(), nb[1].clone());
        assert_eq!(thm_b_witness(&t, &id, &id, &vb, &e1, &e2), Err(PwError::WrongImage));
        let g = t.generator(Side::B, 1);
        assert_eq!(thm_b_witness(&t, &g, &id, &vb, &e1, &e1), Err(PwError::SameEdge));
        let va = t.root();
        let na = t.neighbors(&va);
        let a = t.generator(Side::A, 1);
        assert!(matches!(
            thm_b_witness(&t, &a, &id, &va, &(va.clone(), na[0].clone()), &(va.clone(), na[1].clone())),
            Err(PwError::DegreeTooSmall(_, 2))
        ));
    }

    #[test]
    fn compose_and_inverse_laws() {
        let (t, w) = psl_witness();
        let a = t.generator(Side::A, 1);
        let ga = PiecewiseAut::global(&t, &a);
        let p = w.compose(&t, &ga).compose(&t, &w);
        assert_eq!(p.validate(&t), Ok(()));
        let inv = p.inverse(&t);
        assert_eq!(inv.validate(&t), Ok(()));
        let e = p.compose(&t, &inv);
        assert!(e.is_identity(&t));
        for x in t.ball(&t.root(), 5) {
            let direct = w.evaluate(&t, &ga.evaluate(&t, &w.evaluate(&t, &x)));
            assert_eq!(p.evaluate(&t, &x), direct);
            assert_eq!(inv.evaluate(&t, &direct), x);
        }
    }

    #[test]
    fn identification_of_constant_elements() {
        let alt = PermGroupSpec::alternating(3);
        let rt = tree3();
        let e = TreeAutomorphism::identity(Omega::Finite(3));
        let p = pw_identification_check(&e, &alt).unwrap();
        assert_eq!(p.subtree.len(), 1);
        assert!(p.is_identity(&rt));
        let rot = Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        let g = TreeAutomorphism::from_constant(rot, v("12"));
        let p = pw_identification_check(&g, &alt).unwrap();
        assert_eq!(p.validate(&rt), Ok(()));
        assert!(p.pieces.values().all(|h| *h == g));
    }
}
