//! Portrait construction from a local-action function on a finite core.

use std::collections::{BTreeMap, BTreeSet};

use super::{BranchRule, CoreEntry, TreeAutomorphism};
use crate::perm::Permutation;
use crate::tree::{Color, Omega, Vertex};

/// Closes a vertex set under taking prefixes; always contains `v0`.
pub fn prefix_closure<I: IntoIterator<Item = Vertex>>(vs: I) -> BTreeSet<Vertex> {
    let mut out = BTreeSet::from([Vertex::root()]);
    for v in vs {
        let mut w = Some(v);
        while let Some(x) = w {
            if !out.insert(x.clone()) {
                break;
            }
            w = x.parent();
        }
    }
    out
}

/// Builds the canonical portrait with `g(v0) = base_image` and local action
/// `sigma`, which must be constant on each component of the complement of
/// `core` (a prefix-closed set containing `v0`).
///
/// For the integers, `specials(u)` must contain every color `c` such that
/// `sigma(u·c)` differs from its value at all but finitely many colors.
/// Finite color sets ignore it.
pub fn assemble<S, P>(
    omega: Omega,
    base_image: Vertex,
    core: &BTreeSet<Vertex>,
    sigma: S,
    specials: P,
) -> TreeAutomorphism
where
    S: Fn(&Vertex) -> Permutation,
    P: Fn(&Vertex) -> BTreeSet<Color>,
{
    let mut entries = BTreeMap::new();
    for u in core {
        let local = sigma(u);
        let children: BTreeSet<Color> = core
            .range(u.clone()..)
            .skip(1)
            .take_while(|k| k.word().starts_with(u.word()))
            .filter(|k| k.depth() == u.depth() + 1)
            .filter_map(Vertex::last)
            .collect();
        let outward = |c: Color| Some(c) != u.last() && !children.contains(&c);
        let branches = match omega {
            Omega::Finite(d) => BranchRule {
                default: None,
                explicit: (0..d as Color)
                    .filter(|&c| outward(c))
                    .map(|c| (c, sigma(&u.neighbor(c))))
                    .collect(),
            },
            Omega::Integers => {
                let special = specials(u);
                let fresh = special
                    .iter()
                    .chain(&children)
                    .chain(u.last().as_ref())
                    .fold(0, |m, &c| m.max(c))
                    + 1;
                let default = sigma(&u.neighbor(fresh));
                let explicit = special
                    .into_iter()
                    .filter(|&c| outward(c))
                    .filter_map(|c| {
                        let p = sigma(&u.neighbor(c));
                        (p != default).then_some((c, p))
                    })
                    .collect();
                BranchRule {
                    default: Some(default),
                    explicit,
                }
            }
        };
        entries.insert(u.clone(), CoreEntry { local, branches });
    }
    let g = TreeAutomorphism {
        omega,
        base_image,
        core: entries,
    };
    debug_assert_eq!(g.validate(), Ok(()), "assembled portrait {g}");
    g.canonicalize()
}

pub(super) fn compose(g: &TreeAutomorphism, h: &TreeAutomorphism) -> TreeAutomorphism {
    assert_eq!(g.omega, h.omega, "composing automorphisms of different trees");
    let base = g.evaluate(&h.base_image);
    let core = prefix_closure(
        h.core
            .keys()
            .cloned()
            .chain(g.core.keys().map(|x| h.preimage(x))),
    );
    assemble(
        g.omega,
        base,
        &core,
        |v| g.local_action(&h.evaluate(v)).compose(h.local_action(v)),
        |u| {
            let hu = h.evaluate(u);
            let s = h.local_action(u);
            let mut out = h.special_children(u.word());
            out.extend(g.special_children(hu.word()).into_iter().map(|d| s.preimage(d)));
            out
        },
    )
}

pub(super) fn invert(g: &TreeAutomorphism) -> TreeAutomorphism {
    let base = g.preimage(&Vertex::root());
    let core = prefix_closure(g.core.keys().map(|u| g.evaluate(u)));
    assemble(
        g.omega,
        base,
        &core,
        |v| g.local_action(&g.preimage(v)).inverse(),
        |u| {
            let x = g.preimage(u);
            let s = g.local_action(&x);
            g.special_children(x.word())
                .into_iter()
                .map(|d| s.apply(d))
                .collect()
        },
    )
}
