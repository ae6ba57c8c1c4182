//! Brute-force oracles shared by the integration tests. They use only
//! `evaluate` and plain vertex arithmetic, never the portrait internals.
#![allow(dead_code)]

use std::collections::BTreeSet;

use arboreal::portrait::TreeAutomorphism;
use arboreal::tree::{Color, Vertex};

/// All reduced words of length ≤ r over `colors`, extended from `center`.
pub fn ball(center: &Vertex, r: usize, colors: &[Color]) -> Vec<Vertex> {
    let mut seen = BTreeSet::from([center.clone()]);
    let mut frontier = vec![center.clone()];
    for _ in 0..r {
        let mut next = Vec::new();
        for v in &frontier {
            for &c in colors {
                let u = v.neighbor(c);
                if seen.insert(u.clone()) {
                    next.push(u);
                }
            }
        }
        frontier = next;
    }
    seen.into_iter().collect()
}

/// The local action at `v` read off from images: `c ↦` direction from
/// `g(v)` to `g(v·c)`.
pub fn sigma_oracle(g: &TreeAutomorphism, v: &Vertex, colors: &[Color]) -> Vec<Color> {
    let gv = g.evaluate(v);
    colors
        .iter()
        .map(|&c| gv.direction_to(&g.evaluate(&v.neighbor(c))).expect("automorphisms move neighbors apart"))
        .collect()
}

/// Vertices of `ball(center, r)` lying beyond the edge `tail -color->`.
pub fn beyond(tail: &Vertex, color: Color, r: usize, colors: &[Color]) -> Vec<Vertex> {
    let head = tail.neighbor(color);
    ball(&head, r, colors)
        .into_iter()
        .filter(|x| x.distance(tail) == x.distance(&head) + 1)
        .collect()
}

/// Minimum displacement of `g` over `ball(v0, r)`, and whether some edge in
/// the ball is flipped.
pub fn displacement(g: &TreeAutomorphism, r: usize, colors: &[Color]) -> (usize, bool) {
    let vs = ball(&Vertex::root(), r, colors);
    let m = vs.iter().map(|x| x.distance(&g.evaluate(x))).min().unwrap();
    let flip = vs.iter().any(|x| {
        let y = g.evaluate(x);
        x.distance(&y) == 1 && g.evaluate(&y) == *x
    });
    (m, flip)
}
