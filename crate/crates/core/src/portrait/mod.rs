//! Tree automorphisms as branch-constant portraits.
//!
//! An automorphism `g` of the colored tree is determined by the image of
//! `v0` and its local actions `σ(g, v)`: the permutation of colors induced
//! around `v`, so that `g(v·c) = neighbor(g(v), σ(g, v)(c))`. A portrait is
//! *branch-constant* when there is a finite subtree (the core) containing
//! `v0` such that `σ(g, ·)` is constant on every component of its
//! complement. These elements form a group containing every element built
//! in this crate, and the canonical form below makes equality structural.

mod build;
mod sample;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::{PermGroupSpec, Permutation};
use crate::tree::{Color, Omega, Vertex};

pub use build::{assemble, prefix_closure};
pub use sample::{enumerate_elements, random_element, random_element_in};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PortraitError {
    #[error("core must contain v0 and be closed under prefixes (offending vertex {0})")]
    CoreNotSubtree(Vertex),
    #[error("local action at {vertex} acts on the wrong color set")]
    WrongDomain { vertex: Vertex },
    #[error("color {color} at {vertex} is outside the color set")]
    ColorOutOfRange { vertex: Vertex, color: Color },
    #[error("edge of color {color} at {vertex} is not compatible with its neighbor")]
    Incompatible { vertex: Vertex, color: Color },
    #[error("branch rules at {vertex} do not cover the frontier: {detail}")]
    BadFrontier { vertex: Vertex, detail: String },
    #[error("group class acts on {class} but the element acts on {element}")]
    ClassDomainMismatch { class: Omega, element: Omega },
    #[error("cannot sample from {0}")]
    Unsatisfiable(String),
    #[error("enumeration needs a finite color set")]
    NeedsFiniteOmega,
}

/// Local actions on the branches hanging off one core vertex.
///
/// For a finite color set every outward color is listed in `explicit` and
/// `default` is `None`. For the integers `default` covers all outward colors
/// not listed, and `explicit` only lists colors whose constant differs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BranchRule {
    pub default: Option<Permutation>,
    pub explicit: BTreeMap<Color, Permutation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoreEntry {
    pub local: Permutation,
    pub branches: BranchRule,
}

/// A branch-constant tree automorphism in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeAutomorphism {
    omega: Omega,
    base_image: Vertex,
    core: BTreeMap<Vertex, CoreEntry>,
}

impl TreeAutomorphism {
    /// Validates the portrait and returns its canonical form.
    pub fn new(
        omega: Omega,
        base_image: Vertex,
        core: BTreeMap<Vertex, CoreEntry>,
    ) -> Result<Self, PortraitError> {
        Ok(Self::new_raw(omega, base_image, core)?.canonicalize())
    }

    /// Validates the portrait but keeps the core as given.
    pub fn new_raw(
        omega: Omega,
        base_image: Vertex,
        core: BTreeMap<Vertex, CoreEntry>,
    ) -> Result<Self, PortraitError> {
        let g = TreeAutomorphism {
            omega,
            base_image,
            core,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn identity(omega: Omega) -> Self {
        Self::from_constant(Permutation::identity(omega), Vertex::root())
    }

    /// The automorphism with `σ ≡ f` everywhere and `g(v0) = base_image`.
    pub fn from_constant(f: Permutation, base_image: Vertex) -> Self {
        let omega = f.omega();
        let branches = match omega {
            Omega::Finite(d) => BranchRule {
                default: None,
                explicit: (0..d as Color).map(|c| (c, f.clone())).collect(),
            },
            Omega::Integers => BranchRule {
                default: Some(f.clone()),
                explicit: BTreeMap::new(),
            },
        };
        let core = BTreeMap::from([(Vertex::root(), CoreEntry { local: f, branches })]);
        let g = TreeAutomorphism {
            omega,
            base_image,
            core,
        };
        debug_assert!(g.validate().is_ok());
        g
    }

    pub fn omega(&self) -> Omega {
        self.omega
    }

    pub fn base_image(&self) -> &Vertex {
        &self.base_image
    }

    pub fn core(&self) -> &BTreeMap<Vertex, CoreEntry> {
        &self.core
    }

    /// Largest depth of a core vertex.
    pub fn core_radius(&self) -> usize {
        self.core.keys().map(Vertex::depth).max().unwrap_or(0)
    }

    pub fn is_identity(&self) -> bool {
        self.base_image.is_root()
            && self.core.len() == 1
            && self.core.values().all(|e| {
                e.local.is_identity()
                    && e.branches.default.iter().all(Permutation::is_identity)
                    && e.branches.explicit.values().all(Permutation::is_identity)
            })
    }

    /// Length of the longest prefix of `w` lying in the core.
    fn core_depth_of(&self, w: &[Color]) -> usize {
        let mut k = 0;
        while k < w.len() && self.core.contains_key(&w[..=k]) {
            k += 1;
        }
        k
    }

    fn rule(&self, u: &[Color], c: Color) -> &Permutation {
        let b = &self.core[u].branches;
        b.explicit
            .get(&c)
            .or(b.default.as_ref())
            .expect("branch rules cover the frontier")
    }

    fn sigma_word(&self, w: &[Color]) -> &Permutation {
        let k = self.core_depth_of(w);
        if k == w.len() {
            &self.core[w].local
        } else {
            self.rule(&w[..k], w[k])
        }
    }

    /// The local action `σ(g, v)`.
    pub fn local_action(&self, v: &Vertex) -> &Permutation {
        self.sigma_word(v.word())
    }

    /// The image `g(v)`.
    pub fn evaluate(&self, v: &Vertex) -> Vertex {
        let w = v.word();
        let mut image = self.base_image.clone();
        for k in 0..w.len() {
            image = image.neighbor(self.sigma_word(&w[..k]).apply(w[k]));
        }
        image
    }

    /// The unique `x` with `g(x) = target`.
    pub fn preimage(&self, target: &Vertex) -> Vertex {
        let mut x = Vertex::root();
        let mut y = self.base_image.clone();
        while let Some(d) = y.direction_to(target) {
            let c = self.local_action(&x).preimage(d);
            x = x.neighbor(c);
            y = y.neighbor(d);
        }
        x
    }

    /// A finite set of colors outside of which `c ↦ σ(g, x·c)` is constant.
    fn special_children(&self, x: &[Color]) -> BTreeSet<Color> {
        let mut out: BTreeSet<Color> = x.last().copied().into_iter().collect();
        if let Some(entry) = self.core.get(x) {
            out.extend(entry.branches.explicit.keys().copied());
            out.extend(self.core_children(x));
        }
        out
    }

    fn core_children<'a>(&'a self, u: &'a [Color]) -> impl Iterator<Item = Color> + 'a {
        self.core
            .range::<[Color], _>((std::ops::Bound::Excluded(u), std::ops::Bound::Unbounded))
            .take_while(move |(k, _)| k.word().starts_with(u))
            .filter(move |(k, _)| k.depth() == u.len() + 1)
            .map(|(k, _)| k.last().unwrap())
    }

    /// Every local action value occurring in the portrait, with a flag set
    /// for branch constants (values taken at infinitely many vertices).
    pub fn values(&self) -> impl Iterator<Item = (&Permutation, bool)> {
        self.core.values().flat_map(|e| {
            std::iter::once((&e.local, false))
                .chain(e.branches.default.iter().map(|p| (p, true)))
                .chain(e.branches.explicit.values().map(|p| (p, true)))
        })
    }

    /// Checks the structural invariants of a portrait.
    pub fn validate(&self) -> Result<(), PortraitError> {
        let omega = self.omega;
        if !self.core.contains_key(&Vertex::root()) {
            return Err(PortraitError::CoreNotSubtree(Vertex::root()));
        }
        for v in std::iter::once(&self.base_image).chain(self.core.keys()) {
            if let Some(&c) = v.word().iter().find(|&&c| !omega.contains(c)) {
                return Err(PortraitError::ColorOutOfRange {
                    vertex: v.clone(),
                    color: c,
                });
            }
        }
        for (u, entry) in &self.core {
            let in_domain = |p: &Permutation| p.omega() == omega;
            if !in_domain(&entry.local)
                || !entry.branches.default.iter().all(in_domain)
                || !entry.branches.explicit.values().all(in_domain)
            {
                return Err(PortraitError::WrongDomain { vertex: u.clone() });
            }
            if let Some(parent) = u.parent() {
                let Some(pe) = self.core.get(&parent) else {
                    return Err(PortraitError::CoreNotSubtree(u.clone()));
                };
                let c = u.last().unwrap();
                if entry.local.apply(c) != pe.local.apply(c) {
                    return Err(PortraitError::Incompatible {
                        vertex: u.clone(),
                        color: c,
                    });
                }
            }
            let children: BTreeSet<Color> = self.core_children(u.word()).collect();
            let is_outward = |c: Color| Some(c) != u.last() && !children.contains(&c);
            let bad = |detail: String| PortraitError::BadFrontier {
                vertex: u.clone(),
                detail,
            };
            for (&c, f) in &entry.branches.explicit {
                if !omega.contains(c) || !is_outward(c) {
                    return Err(bad(format!("color {c} is not a frontier edge")));
                }
                if f.apply(c) != entry.local.apply(c) {
                    return Err(PortraitError::Incompatible {
                        vertex: u.clone(),
                        color: c,
                    });
                }
            }
            match (omega, &entry.branches.default) {
                (Omega::Finite(d), None) => {
                    if let Some(c) = (0..d as Color)
                        .find(|&c| is_outward(c) && !entry.branches.explicit.contains_key(&c))
                    {
                        return Err(bad(format!("no rule for color {c}")));
                    }
                }
                (Omega::Finite(_), Some(_)) => {
                    return Err(bad("finite color sets list every branch".into()));
                }
                (Omega::Integers, None) => return Err(bad("missing default rule".into())),
                (Omega::Integers, Some(f)) => {
                    if f.shift() != entry.local.shift() {
                        return Err(bad("default rule disagrees with the local action".into()));
                    }
                    let candidates: BTreeSet<Color> =
                        f.support().union(&entry.local.support()).copied().collect();
                    if let Some(c) = candidates.into_iter().find(|&c| {
                        is_outward(c)
                            && !entry.branches.explicit.contains_key(&c)
                            && f.apply(c) != entry.local.apply(c)
                    }) {
                        return Err(PortraitError::Incompatible {
                            vertex: u.clone(),
                            color: c,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// The unique minimal-core form.
    ///
    /// A core leaf whose local action equals all of its branch constants is
    /// folded into its parent's branch rules, until no leaf qualifies. For
    /// the integers, explicit rules equal to the default are dropped.
    pub fn canonicalize(mut self) -> Self {
        loop {
            let leaves: Vec<Vertex> = self
                .core
                .keys()
                .filter(|u| !u.is_root() && self.core_children(u.word()).next().is_none())
                .cloned()
                .collect();
            let mut changed = false;
            for u in leaves {
                let entry = &self.core[&u];
                let constant = entry.branches.explicit.values().all(|p| *p == entry.local)
                    && entry.branches.default.iter().all(|p| *p == entry.local);
                if !constant {
                    continue;
                }
                let entry = self.core.remove(&u).unwrap();
                let parent = self.core.get_mut(&u.parent().unwrap()).unwrap();
                if parent.branches.default.as_ref() != Some(&entry.local) {
                    parent.branches.explicit.insert(u.last().unwrap(), entry.local);
                }
                changed = true;
            }
            if !changed {
                break;
            }
        }
        for entry in self.core.values_mut() {
            if let Some(d) = &entry.branches.default {
                entry.branches.explicit.retain(|_, p| p != d);
            }
        }
        self
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &TreeAutomorphism) -> TreeAutomorphism {
        build::compose(self, other)
    }

    pub fn inverse(&self) -> TreeAutomorphism {
        build::invert(self)
    }

    pub fn pow(&self, k: u32) -> TreeAutomorphism {
        let mut acc = TreeAutomorphism::identity(self.omega);
        for _ in 0..k {
            acc = self.compose(&acc);
        }
        acc
    }

    /// `h ∘ self ∘ h⁻¹`.
    pub fn conjugate_by(&self, h: &TreeAutomorphism) -> TreeAutomorphism {
        h.compose(self).compose(&h.inverse())
    }

    pub fn commutes_with(&self, other: &TreeAutomorphism) -> bool {
        self.compose(other) == other.compose(self)
    }

    pub fn membership(&self, class: &GroupClass) -> Result<bool, PortraitError> {
        membership(self, class)
    }
}

/// The portrait's local action `σ(g, v)`, as a free function.
pub fn local_action(g: &TreeAutomorphism, v: &Vertex) -> Permutation {
    g.local_action(v).clone()
}

/// The image `g(v)`, as a free function.
pub fn evaluate(g: &TreeAutomorphism, v: &Vertex) -> Vertex {
    g.evaluate(v)
}

pub fn from_constant(f: Permutation, base_image: Vertex) -> TreeAutomorphism {
    TreeAutomorphism::from_constant(f, base_image)
}

pub fn canonicalize(g: TreeAutomorphism) -> TreeAutomorphism {
    g.canonicalize()
}

impl fmt::Display for TreeAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[v0 ↦ {}", self.base_image)?;
        for (u, e) in &self.core {
            write!(f, "; σ({u})={}", e.local)?;
            if let Some(d) = &e.branches.default {
                write!(f, " else {d}")?;
            }
            let distinct: BTreeSet<&Permutation> = e.branches.explicit.values().collect();
            if distinct.len() == 1 && self.omega.is_finite() {
                write!(f, " branches {}", distinct.into_iter().next().unwrap())?;
            } else {
                for (c, p) in &e.branches.explicit {
                    write!(f, " {c}:{p}")?;
                }
            }
        }
        f.write_str("]")
    }
}

/// Wire form of a [`TreeAutomorphism`]: the base word, then one record per
/// core vertex with its local action, default branch constant (integers
/// only) and explicit branch constants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortraitRecord {
    pub omega: Omega,
    pub base: Vertex,
    pub core: Vec<CoreRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreRecord {
    pub vertex: Vertex,
    pub local: Permutation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<Permutation>,
    pub branches: Vec<BranchRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub color: Color,
    pub perm: Permutation,
}

impl From<&TreeAutomorphism> for PortraitRecord {
    fn from(g: &TreeAutomorphism) -> Self {
        PortraitRecord {
            omega: g.omega,
            base: g.base_image.clone(),
            core: g
                .core
                .iter()
                .map(|(v, e)| CoreRecord {
                    vertex: v.clone(),
                    local: e.local.clone(),
                    default: e.branches.default.clone(),
                    branches: e
                        .branches
                        .explicit
                        .iter()
                        .map(|(&color, p)| BranchRecord {
                            color,
                            perm: p.clone(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<PortraitRecord> for TreeAutomorphism {
    type Error = PortraitError;
    fn try_from(r: PortraitRecord) -> Result<Self, Self::Error> {
        let core = r
            .core
            .into_iter()
            .map(|c| {
                (
                    c.vertex,
                    CoreEntry {
                        local: c.local,
                        branches: BranchRule {
                            default: c.default,
                            explicit: c.branches.into_iter().map(|b| (b.color, b.perm)).collect(),
                        },
                    },
                )
            })
            .collect();
        TreeAutomorphism::new(r.omega, r.base, core)
    }
}

impl Serialize for TreeAutomorphism {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PortraitRecord::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for TreeAutomorphism {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = PortraitRecord::deserialize(d)?;
        TreeAutomorphism::try_from(r).map_err(serde::de::Error::custom)
    }
}

/// The groups an element can be tested against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupClass {
    /// Local actions in `F` everywhere.
    UofF(PermGroupSpec),
    /// Local actions in `F'` everywhere and in `F` off a finite set.
    GofFFp(PermGroupSpec, PermGroupSpec),
    /// The bipartition-preserving subgroup of `G(F, F')`.
    GofFFpStar(PermGroupSpec, PermGroupSpec),
    Unrestricted(Omega),
}

impl GroupClass {
    pub fn omega(&self) -> Omega {
        match self {
            GroupClass::UofF(f) | GroupClass::GofFFp(f, _) | GroupClass::GofFFpStar(f, _) => {
                f.omega()
            }
            GroupClass::Unrestricted(o) => *o,
        }
    }

    /// Groups allowed for core values and for branch constants.
    pub(crate) fn value_groups(&self) -> Option<(PermGroupSpec, PermGroupSpec)> {
        match self {
            GroupClass::UofF(f) => Some((f.clone(), f.clone())),
            GroupClass::GofFFp(f, fp) | GroupClass::GofFFpStar(f, fp) => {
                Some((fp.clone(), f.clone()))
            }
            GroupClass::Unrestricted(Omega::Finite(d)) => {
                let s = PermGroupSpec::symmetric(*d);
                Some((s.clone(), s))
            }
            GroupClass::Unrestricted(Omega::Integers) => None,
        }
    }

    pub fn is_star(&self) -> bool {
        matches!(self, GroupClass::GofFFpStar(..))
    }

    pub fn name(&self) -> String {
        match self {
            GroupClass::UofF(f) => format!("U({f})"),
            GroupClass::GofFFp(f, fp) => format!("G({f},{fp})"),
            GroupClass::GofFFpStar(f, fp) => format!("G({f},{fp})*"),
            GroupClass::Unrestricted(o) => format!("Aut(T_{o})"),
        }
    }
}

/// Membership of a canonical portrait in a group class.
///
/// Core values may be finitely many exceptions; branch constants are taken
/// at infinitely many vertices and must lie in the smaller group.
pub fn membership(g: &TreeAutomorphism, class: &GroupClass) -> Result<bool, PortraitError> {
    if class.omega() != g.omega {
        return Err(PortraitError::ClassDomainMismatch {
            class: class.omega(),
            element: g.omega,
        });
    }
    let ok = match class {
        GroupClass::UofF(f) => g.values().all(|(p, _)| f.contains(p)),
        GroupClass::GofFFp(f, fp) | GroupClass::GofFFpStar(f, fp) => g
            .values()
            .all(|(p, branch)| if branch { f.contains(p) } else { fp.contains(p) }),
        GroupClass::Unrestricted(_) => true,
    };
    Ok(ok && (!class.is_star() || g.base_image.depth().is_multiple_of(2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::enumerate_ball;

    fn v(s: &str) -> Vertex {
        s.parse().unwrap()
    }

    fn id3() -> Permutation {
        Permutation::identity(Omega::Finite(3))
    }

    fn rot() -> Permutation {
        Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let e = TreeAutomorphism::identity(Omega::Finite(3));
        assert_eq!(e.evaluate(&v("012")), v("012"));
        let inv = TreeAutomorphism::from_constant(id3(), v("0"));
        assert_eq!(inv.evaluate(&v("0")), Vertex::root());
        let t = TreeAutomorphism::from_constant(id3(), v("01"));
        assert_eq!(t.evaluate(&v("0")), v("010"));
    }

    #[test]
    fn compose_and_invert_examples() {
        let inv = TreeAutomorphism::from_constant(id3(), v("0"));
        assert!(inv.compose(&inv).is_identity());
        assert_eq!(inv.inverse(), inv);
        let t = TreeAutomorphism::from_constant(id3(), v("01"));
        let ti = t.inverse();
        assert_eq!(ti.base_image(), &v("10"));
        assert!(t.compose(&ti).is_identity());
        assert_eq!(t.compose(&TreeAutomorphism::identity(Omega::Finite(3))), t);
    }

    #[test]
    fn rotation_permutes_neighbors() {
        let r = TreeAutomorphism::from_constant(rot(), Vertex::root());
        assert_eq!(r.evaluate(&Vertex::root()), Vertex::root());
        assert_eq!(r.evaluate(&v("0")), v("1"));
        assert_eq!(r.evaluate(&v("1")), v("2"));
        assert_eq!(r.evaluate(&v("2")), v("0"));
        assert!(r.pow(3).is_identity());
    }

    #[test]
    fn padded_constant_canonicalizes_to_root_core() {
        let f = rot();
        let ball = enumerate_ball(&Vertex::root(), 2, &[0, 1, 2]).unwrap();
        let mut core = BTreeMap::new();
        for u in &ball {
            let explicit = (0..3)
                .filter(|&c| Some(c) != u.last() && u.depth() == 2)
                .map(|c| (c, f.clone()))
                .collect();
            core.insert(
                u.clone(),
                CoreEntry {
                    local: f.clone(),
                    branches: BranchRule {
                        default: None,
                        explicit,
                    },
                },
            );
        }
        let raw = TreeAutomorphism::new_raw(Omega::Finite(3), v("1"), core).unwrap();
        assert_eq!(raw.core().len(), 10);
        let canon = raw.clone().canonicalize();
        assert_eq!(canon.core().len(), 1);
        assert_eq!(canon, TreeAutomorphism::from_constant(f, v("1")));
        assert_eq!(canon.clone().canonicalize(), canon);
        for x in &ball {
            assert_eq!(raw.evaluate(x), canon.evaluate(x));
        }
    }

    #[test]
    fn incompatible_portrait_is_rejected() {
        let mut core = BTreeMap::new();
        core.insert(
            Vertex::root(),
            CoreEntry {
                local: id3(),
                branches: BranchRule {
                    default: None,
                    explicit: [(0, id3()), (1, id3()), (2, rot())].into(),
                },
            },
        );
        assert!(matches!(
            TreeAutomorphism::new(Omega::Finite(3), Vertex::root(), core),
            Err(PortraitError::Incompatible { color: 2, .. })
        ));
    }

    #[test]
    fn membership_examples() {
        let alt = PermGroupSpec::alternating(3);
        let sym = PermGroupSpec::symmetric(3);
        let e = TreeAutomorphism::identity(Omega::Finite(3));
        assert_eq!(e.membership(&GroupClass::UofF(alt.clone())), Ok(true));
        let t = TreeAutomorphism::from_constant(id3(), v("01"));
        assert_eq!(t.membership(&GroupClass::GofFFpStar(alt.clone(), sym.clone())), Ok(true));
        let inv = TreeAutomorphism::from_constant(id3(), v("0"));
        assert_eq!(inv.membership(&GroupClass::GofFFpStar(alt.clone(), sym)), Ok(false));
        assert!(e
            .membership(&GroupClass::UofF(PermGroupSpec::z_translations()))
            .is_err());
    }

    #[test]
    fn integer_portraits() {
        let tau = Permutation::translation(3);
        let g = TreeAutomorphism::from_constant(tau.clone(), Vertex::from_word(vec![5, -2]).unwrap());
        let x = Vertex::from_word(vec![1, 7, 1]).unwrap();
        assert_eq!(g.evaluate(&x).word(), &[5, -2, 4, 10, 4]);
        assert_eq!(g.preimage(&g.evaluate(&x)), x);
        let gi = g.inverse();
        assert!(g.compose(&gi).is_identity());
        assert!(!g.pow(4).is_identity());
    }

    #[test]
    fn serde_round_trip() {
        let t = TreeAutomorphism::from_constant(rot(), v("01"));
        let text = toml::to_string(&PortraitRecord::from(&t)).unwrap();
        let back: PortraitRecord = toml::from_str(&text).unwrap();
        assert_eq!(TreeAutomorphism::try_from(back).unwrap(), t);
    }
}
