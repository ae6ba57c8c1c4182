//! Half-tree fixators in `G(F, F')`, disjointly supported pairs, and the
//! finite convolution identity on truncated orbits of an end.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{apply_to_periodic, fixes_half_tree_pointwise};
use crate::perm::{
    check_freeness, check_orbit_preservation, point_stabilizer, GroupKind, PermError, PermGroupSpec,
    Permutation,
};
use crate::portrait::{assemble, enumerate_elements, prefix_closure, GroupClass, PortraitError, TreeAutomorphism};
use crate::tree::{geodesic, Color, DirectedEdge, EndPoint, HalfTree, Omega, PeriodicEnd, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObstructionError {
    #[error("F and F' coincide; no element of G(F, F') lies outside U(F)")]
    Degenerate,
    #[error("F does not act freely")]
    NotFree,
    #[error("F' does not preserve the orbits of F")]
    OrbitsNotPreserved,
    #[error("the stabilizer of color {0} in F' is trivial")]
    TrivialStabilizer(Color),
    #[error("no element of F maps {from} to {to}")]
    NoBranchElement { from: Color, to: Color },
    #[error("{0} does not fix the color {1}")]
    NotInStabilizer(String, Color),
    #[error("orbits are only computed for periodic ends")]
    UnsupportedEnd,
    #[error("filtration level {0} is not supported (levels 0 and 1 only)")]
    UnsupportedLevel(usize),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Portrait(#[from] PortraitError),
}

/// The distinguished local action: the first non-identity element of the
/// stabilizer of `a`.
fn first_nontrivial_stabilizer_element(fp_a: &PermGroupSpec, a: Color) -> Option<Permutation> {
    match &fp_a.kind {
        GroupKind::FiniteListed(els) => els.iter().find(|p| !p.is_identity()).cloned(),
        GroupKind::ZFinitaryStabilizer(_) => Some(Permutation::int_transposition(a + 1, a + 2)),
        _ => None,
    }
}

/// Checks the hypotheses on `(F, F')`: distinct, `F` free, `F'` preserving
/// the `F`-orbits.
pub fn check_pair(f: &PermGroupSpec, fp: &PermGroupSpec) -> Result<(), ObstructionError> {
    if !check_orbit_preservation(f, fp)? {
        return Err(ObstructionError::OrbitsNotPreserved);
    }
    if fp.is_subgroup_of(f) {
        return Err(ObstructionError::Degenerate);
    }
    if !check_freeness(f) {
        return Err(ObstructionError::NotFree);
    }
    Ok(())
}

/// A non-trivial element of `G(F, F')` fixing `h` pointwise.
///
/// With `v` the tail of `h`'s edge and `a` its color, the element is the
/// identity on `h`, has local action `σ ∈ F'_a ∖ {1}` at `v`, and on the
/// branch at `v` of color `b ≠ a` the unique `σ_b ∈ F` with
/// `σ_b(b) = σ(b)`.
pub fn thm_c_witness(
    f: &PermGroupSpec,
    fp: &PermGroupSpec,
    h: &HalfTree,
) -> Result<TreeAutomorphism, ObstructionError> {
    check_pair(f, fp)?;
    let a = h.edge.color;
    let stab = point_stabilizer(fp, a)?;
    let sigma = first_nontrivial_stabilizer_element(&stab, a).ok_or(ObstructionError::TrivialStabilizer(a))?;
    half_tree_fixator_element(f, &sigma, h)
}

/// The element fixing `h` pointwise with local action `sigma` at the tail
/// of `h`'s edge and values in `F` everywhere else.
pub fn half_tree_fixator_element(
    f: &PermGroupSpec,
    sigma: &Permutation,
    h: &HalfTree,
) -> Result<TreeAutomorphism, ObstructionError> {
    let v = h.edge.tail.clone();
    let a = h.edge.color;
    if !sigma.fixes(a) {
        return Err(ObstructionError::NotInStabilizer(sigma.to_string(), a));
    }
    let omega = sigma.omega();
    let mut branch: BTreeMap<Color, Permutation> = BTreeMap::new();
    let mut branch_for = |b: Color| -> Result<Permutation, ObstructionError> {
        if let Some(p) = branch.get(&b) {
            return Ok(p.clone());
        }
        let to = sigma.apply(b);
        let p = f
            .element_mapping(b, to)
            .ok_or(ObstructionError::NoBranchElement { from: b, to })?;
        branch.insert(b, p.clone());
        Ok(p)
    };
    // the colors whose branch constants are needed: every color at v for a
    // finite set, and for the integers the moved points plus a witness of
    // the generic value
    let colors: Vec<Color> = match omega.colors() {
        Some(cs) => cs,
        None => {
            let mut cs: Vec<Color> = sigma.support().into_iter().chain(v.last()).collect();
            let fresh = cs.iter().fold(a, |m, &c| m.max(c)) + 1;
            cs.push(fresh);
            cs
        }
    };
    for &b in &colors {
        if b != a {
            branch_for(b)?;
        }
    }
    let generic = match omega {
        Omega::Integers => Some(branch_for(*colors.last().unwrap())?),
        Omega::Finite(_) => None,
    };
    let id = Permutation::identity(omega);
    let sigma_at = |w: &Vertex| -> Permutation {
        if h.contains(w) {
            id.clone()
        } else if *w == v {
            sigma.clone()
        } else {
            let b = v.direction_to(w).expect("w differs from v");
            branch
                .get(&b)
                .cloned()
                .or_else(|| generic.clone())
                .expect("branch constants cover every color")
        }
    };
    // g fixes v; walk back to v0 to find g(v0)
    let path = geodesic(&v, &Vertex::root());
    let mut image = v.clone();
    for step in path.windows(2) {
        let c = DirectedEdge::between(&step[0], &step[1]).unwrap().color;
        image = image.neighbor(sigma_at(&step[0]).apply(c));
    }
    let core = prefix_closure([v.clone(), h.root()]);
    let special: BTreeSet<Color> = sigma.support().into_iter().chain([a]).collect();
    let g = assemble(omega, image, &core, sigma_at, |u| {
        if *u == v {
            special.clone()
        } else {
            BTreeSet::new()
        }
    });
    debug_assert_eq!(g.evaluate(&v), v);
    Ok(g)
}

/// Two non-trivial elements supported on the two sides of `e`: `a` fixes
/// the half-tree behind `e` and `b` the half-tree in front of it.
pub fn disjoint_pair(
    f: &PermGroupSpec,
    fp: &PermGroupSpec,
    e: &DirectedEdge,
) -> Result<(TreeAutomorphism, TreeAutomorphism), ObstructionError> {
    let t1 = HalfTree::new(e.clone());
    let t2 = t1.complement();
    let a = thm_c_witness(f, fp, &t2)?;
    let b = thm_c_witness(f, fp, &t1)?;
    Ok((a, b))
}

/// One end of a truncated orbit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitPoint {
    /// Generator indices of a shortest product reaching this end, leftmost
    /// factor first.
    pub word: Vec<usize>,
    pub end: PeriodicEnd,
    pub prefix: Vec<Color>,
}

/// The ends `w·ξ` for products `w` of at most `word_length` generators,
/// deduplicated by their prefix of length `depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitTruncation {
    pub base_end: PeriodicEnd,
    pub generators: Vec<TreeAutomorphism>,
    pub word_length: usize,
    pub depth: usize,
    /// Suggested minimum depth for the given parameters.
    pub depth_bound: usize,
    pub points: Vec<OrbitPoint>,
    pub warning: Option<String>,
}

/// Suggested depth: `2 · word_length · max displacement + |ξ data|`.
pub fn depth_bound(gens: &[TreeAutomorphism], xi: &PeriodicEnd, word_length: usize) -> usize {
    let disp = gens.iter().map(|g| g.base_image().depth()).max().unwrap_or(0);
    2 * word_length * disp + xi.prefix_word().len() + xi.period().len()
}

/// Breadth-first orbit enumeration.
///
/// Ends are compared exactly during the search; only the stored points are
/// merged by prefix, so the result equals the set of depth-prefixes of all
/// `w·ξ`. Points are ordered by word length, then word.
pub fn orbit_truncate(
    gens: &[TreeAutomorphism],
    xi: &EndPoint,
    word_length: usize,
    depth: usize,
) -> Result<OrbitTruncation, ObstructionError> {
    let EndPoint::Periodic(xi) = xi else {
        return Err(ObstructionError::UnsupportedEnd);
    };
    let bound = depth_bound(gens, xi, word_length);
    let warning = (depth < bound).then(|| format!("depth {depth} is below the suggested bound {bound}"));

    let mut exact: HashSet<PeriodicEnd> = HashSet::from([xi.clone()]);
    let mut layer = vec![(Vec::new(), xi.clone())];
    let mut reached = layer.clone();
    for _ in 0..word_length {
        let mut next = Vec::new();
        for (word, end) in &layer {
            for (i, g) in gens.iter().enumerate() {
                let image = apply_to_periodic(g, end);
                if exact.insert(image.clone()) {
                    let mut w = vec![i];
                    w.extend(word);
                    next.push((w, image));
                }
            }
        }
        next.sort();
        reached.extend(next.iter().cloned());
        layer = next;
    }
    let mut seen = HashSet::new();
    let points = reached
        .into_iter()
        .filter_map(|(word, end)| {
            let prefix = end.ray(depth);
            seen.insert(prefix.clone()).then_some(OrbitPoint { word, end, prefix })
        })
        .collect();
    Ok(OrbitTruncation {
        base_end: xi.clone(),
        generators: gens.to_vec(),
        word_length,
        depth,
        depth_bound: bound,
        points,
        warning,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportReport {
    pub depth: usize,
    pub points: usize,
    pub moved_by_a: usize,
    pub moved_by_b: usize,
    /// Indices of points moved by both.
    pub moved_by_both: Vec<usize>,
}

impl SupportReport {
    pub fn holds(&self) -> bool {
        self.moved_by_both.is_empty()
    }
}

pub fn disjoint_support_report(
    a: &TreeAutomorphism,
    b: &TreeAutomorphism,
    orbit: &OrbitTruncation,
) -> SupportReport {
    let d = orbit.depth;
    let mut report = SupportReport {
        depth: d,
        points: orbit.points.len(),
        moved_by_a: 0,
        moved_by_b: 0,
        moved_by_both: Vec::new(),
    };
    for (i, p) in orbit.points.iter().enumerate() {
        let ma = apply_to_periodic(a, &p.end).ray(d) != p.prefix;
        let mb = apply_to_periodic(b, &p.end).ray(d) != p.prefix;
        report.moved_by_a += ma as usize;
        report.moved_by_b += mb as usize;
        if ma && mb {
            report.moved_by_both.push(i);
        }
    }
    report
}

/// True iff no orbit point is moved by both `a` and `b` (at the orbit's
/// depth).
pub fn disjoint_support_check(a: &TreeAutomorphism, b: &TreeAutomorphism, orbit: &OrbitTruncation) -> bool {
    disjoint_support_report(a, b, orbit).holds()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnihilationReport {
    pub depth: usize,
    pub passed: usize,
    pub failed: usize,
    /// Indices of failing points, in orbit order.
    pub failures: Vec<usize>,
    pub caveat: String,
}

impl AnnihilationReport {
    pub fn holds(&self) -> bool {
        self.failed == 0
    }
}

/// Checks `δ_η − δ_{bη} − δ_{aη} + δ_{abη} = 0` at every orbit point, i.e.
/// that `{η, abη}` and `{aη, bη}` agree as multisets of depth-prefixes.
pub fn operator_annihilation_check(
    a: &TreeAutomorphism,
    b: &TreeAutomorphism,
    orbit: &OrbitTruncation,
) -> AnnihilationReport {
    let d = orbit.depth;
    let mut failures = Vec::new();
    for (i, p) in orbit.points.iter().enumerate() {
        let ae = apply_to_periodic(a, &p.end);
        let be = apply_to_periodic(b, &p.end);
        let abe = apply_to_periodic(a, &be);
        let mut plus = [p.prefix.clone(), abe.ray(d)];
        let mut minus = [ae.ray(d), be.ray(d)];
        plus.sort();
        minus.sort();
        if plus != minus {
            failures.push(i);
        }
    }
    AnnihilationReport {
        depth: d,
        passed: orbit.points.len() - failures.len(),
        failed: failures.len(),
        failures,
        caveat: format!("ends compared by their first {d} letters"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FiltrationReport {
    /// Elements of `U(F)` fixing the edge and half-tree, among all with
    /// core and base image in the ball of radius 2.
    Level0 {
        enumerated: usize,
        edge_fixers: usize,
        half_tree_fixers: usize,
        only_identity: bool,
    },
    /// For each `τ ∈ F'_a`, whether the constructed preimage fixes the
    /// half-tree, has local action `τ` at the edge tail and lies in
    /// `G(F, F')`; and whether `g ↦ σ(g, v)` is multiplicative on them.
    Level1 {
        stabilizer_order: usize,
        hits: Vec<(Permutation, bool)>,
        homomorphism: bool,
        onto: bool,
    },
}

impl FiltrationReport {
    pub fn holds(&self) -> bool {
        match self {
            FiltrationReport::Level0 { only_identity, .. } => *only_identity,
            FiltrationReport::Level1 { homomorphism, onto, .. } => *homomorphism && *onto,
        }
    }
}

/// Checks the bottom of the filtration `K_{n,T}` of the fixator of `h`:
/// `K_0` is trivial in `U(F)`, and `K_1` maps onto `F'_a`.
pub fn k_filtration_check(
    f: &PermGroupSpec,
    fp: &PermGroupSpec,
    h: &HalfTree,
    n: usize,
) -> Result<FiltrationReport, ObstructionError> {
    if n > 1 {
        return Err(ObstructionError::UnsupportedLevel(n));
    }
    if !check_freeness(f) {
        return Err(ObstructionError::NotFree);
    }
    if !f.omega().is_finite() {
        return Err(PortraitError::NeedsFiniteOmega.into());
    }
    let (tail, head) = (h.edge.tail.clone(), h.root());
    if n == 0 {
        let all = enumerate_elements(&GroupClass::UofF(f.clone()), 2, 2, 1_000_000)?;
        let edge: Vec<&TreeAutomorphism> = all
            .iter()
            .filter(|g| g.evaluate(&tail) == tail && g.evaluate(&head) == head)
            .collect();
        let fixers: Vec<&&TreeAutomorphism> = edge.iter().filter(|g| fixes_half_tree_pointwise(g, h)).collect();
        return Ok(FiltrationReport::Level0 {
            enumerated: all.len(),
            edge_fixers: edge.len(),
            half_tree_fixers: fixers.len(),
            only_identity: edge.iter().all(|g| g.is_identity()) && fixers.len() == 1,
        });
    }
    let a = h.edge.color;
    let stab = point_stabilizer(fp, a)?;
    let taus = stab.elements().expect("finite stabilizer").to_vec();
    let class = GroupClass::GofFFp(f.clone(), fp.clone());
    let mut preimages = Vec::new();
    let mut hits = Vec::new();
    for tau in &taus {
        let g = half_tree_fixator_element(f, tau, h)?;
        let ok = fixes_half_tree_pointwise(&g, h)
            && g.local_action(&tail) == tau
            && g.membership(&class)?
            && g.core()
                .iter()
                .all(|(u, e)| *u == tail || f.contains(&e.local));
        hits.push((tau.clone(), ok));
        preimages.push(g);
    }
    let homomorphism = preimages.iter().all(|g1| {
        preimages.iter().all(|g2| {
            *g1.compose(g2).local_action(&tail) == g1.local_action(&tail).compose(g2.local_action(&tail))
        })
    });
    let onto = hits.iter().all(|(_, ok)| *ok);
    Ok(FiltrationReport::Level1 {
        stabilizer_order: taus.len(),
        hits,
        homomorphism,
        onto,
    })
}
