//! The Bass-Serre tree of a free product `A ∗ B` of two finite groups.

use std::fmt;

use super::{PieceAction, TreeSpace};
use crate::perm::FiniteGroup;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

/// A non-identity element of one of the two factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A(usize),
    B(usize),
}

impl Letter {
    pub fn side(self) -> Side {
        match self {
            Letter::A(_) => Side::A,
            Letter::B(_) => Side::B,
        }
    }
}

/// An element of `A ∗ B` in normal form: non-identity letters alternating
/// between the factors.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeProductWord(Vec<Letter>);

impl FreeProductWord {
    pub fn identity() -> Self {
        FreeProductWord(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for FreeProductWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("·")?;
            }
            match l {
                Letter::A(k) => write!(f, "a{k}")?,
                Letter::B(k) => write!(f, "b{k}")?,
            }
        }
        Ok(())
    }
}

/// A vertex `w·A` or `w·B`, with `w` not ending in a letter of that side.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetVertex {
    pub word: FreeProductWord,
    pub side: Side,
}

impl fmt::Display for CosetVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.word, self.side)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeProductTree {
    pub a: FiniteGroup,
    pub b: FiniteGroup,
}

impl FreeProductTree {
    pub fn new(a: FiniteGroup, b: FiniteGroup) -> Self {
        FreeProductTree { a, b }
    }

    /// `Z/2 ∗ Z/3 ≅ PSL(2,Z)` acting on the (2,3)-biregular tree.
    pub fn psl2z() -> Self {
        Self::new(FiniteGroup::cyclic(2), FiniteGroup::cyclic(3))
    }

    fn group(&self, side: Side) -> &FiniteGroup {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    fn letter(side: Side, k: usize) -> Letter {
        match side {
            Side::A => Letter::A(k),
            Side::B => Letter::B(k),
        }
    }

    fn index(l: Letter) -> usize {
        match l {
            Letter::A(k) | Letter::B(k) => k,
        }
    }

    /// The one-letter word for `k` in the given factor.
    pub fn generator(&self, side: Side, k: usize) -> FreeProductWord {
        if k == self.group(side).identity() {
            FreeProductWord::identity()
        } else {
            FreeProductWord(vec![Self::letter(side, k)])
        }
    }

    pub fn multiply(&self, x: &FreeProductWord, y: &FreeProductWord) -> FreeProductWord {
        let mut out = x.0.clone();
        for &l in &y.0 {
            self.push_letter(&mut out, l);
        }
        FreeProductWord(out)
    }

    fn push_letter(&self, out: &mut Vec<Letter>, l: Letter) {
        match out.last() {
            Some(&last) if last.side() == l.side() => {
                let g = self.group(l.side());
                let p = g.mul(Self::index(last), Self::index(l));
                out.pop();
                if p != g.identity() {
                    out.push(Self::letter(l.side(), p));
                }
            }
            _ => out.push(l),
        }
    }

    pub fn invert(&self, x: &FreeProductWord) -> FreeProductWord {
        FreeProductWord(
            x.0.iter()
                .rev()
                .map(|&l| Self::letter(l.side(), self.group(l.side()).inv(Self::index(l))))
                .collect(),
        )
    }

    fn normalize(mut word: Vec<Letter>, side: Side) -> CosetVertex {
        if word.last().is_some_and(|l| l.side() == side) {
            word.pop();
        }
        CosetVertex {
            word: FreeProductWord(word),
            side,
        }
    }

    /// Left multiplication `g · v`.
    pub fn act(&self, g: &FreeProductWord, v: &CosetVertex) -> CosetVertex {
        Self::normalize(self.multiply(g, &v.word).0, v.side)
    }

    pub fn degree(&self, v: &CosetVertex) -> usize {
        self.group(v.side).order()
    }
}

impl TreeSpace for FreeProductTree {
    type V = CosetVertex;

    fn root(&self) -> CosetVertex {
        CosetVertex {
            word: FreeProductWord::identity(),
            side: Side::A,
        }
    }

    fn parent(&self, v: &CosetVertex) -> Option<CosetVertex> {
        let other = match v.side {
            Side::A => Side::B,
            Side::B => Side::A,
        };
        if v.side == Side::A && v.word.is_empty() {
            return None;
        }
        let mut w = v.word.0.clone();
        if w.last().is_some_and(|l| l.side() == other) {
            w.pop();
        }
        Some(CosetVertex {
            word: FreeProductWord(w),
            side: other,
        })
    }

    fn neighbors(&self, v: &CosetVertex) -> Vec<CosetVertex> {
        let other = match v.side {
            Side::A => Side::B,
            Side::B => Side::A,
        };
        let g = self.group(v.side);
        (0..g.order())
            .map(|k| {
                let mut w = v.word.0.clone();
                if k != g.identity() {
                    w.push(Self::letter(v.side, k));
                }
                Self::normalize(w, other)
            })
            .collect()
    }
}

impl PieceAction<FreeProductTree> for FreeProductWord {
    fn apply(&self, space: &FreeProductTree, v: &CosetVertex) -> CosetVertex {
        space.act(self, v)
    }

    fn compose(&self, space: &FreeProductTree, other: &Self) -> Self {
        space.multiply(self, other)
    }

    fn inverse(&self, space: &FreeProductTree) -> Self {
        space.invert(self)
    }

    fn is_identity(&self) -> bool {
        self.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn biregular_degrees() {
        let t = FreeProductTree::psl2z();
        for v in t.ball(&t.root(), 5) {
            let n = t.neighbors(&v);
            assert_eq!(n.len(), t.degree(&v));
            for u in &n {
                assert!(t.neighbors(u).contains(&v), "{u} ~ {v}");
                assert_eq!(t.depth(u).abs_diff(t.depth(&v)), 1);
            }
        }
    }

    #[test]
    fn action_preserves_adjacency() {
        let t = FreeProductTree::psl2z();
        let g = t.multiply(&t.generator(Side::A, 1), &t.generator(Side::B, 2));
        for v in t.ball(&t.root(), 4) {
            let gv = g.apply(&t, &v);
            let mut image: Vec<_> = t.neighbors(&v).iter().map(|u| g.apply(&t, u)).collect();
            let mut expected = t.neighbors(&gv);
            image.sort();
            expected.sort();
            assert_eq!(image, expected);
            assert_eq!(g.inverse(&t).apply(&t, &gv), v);
        }
    }

    #[test]
    fn word_arithmetic() {
        let t = FreeProductTree::psl2z();
        let b = t.generator(Side::B, 1);
        assert!(t.multiply(&b, &t.multiply(&b, &b)).is_empty());
        let a = t.generator(Side::A, 1);
        let ab = t.multiply(&a, &b);
        assert_eq!(ab.len(), 2);
        assert!(t.multiply(&ab, &t.invert(&ab)).is_empty());
    }
}
