//! Permutations of the color set.
//!
//! Finite color sets use image tables. On the integers the only
//! permutations needed are finitary permutations composed with a
//! translation, `x ↦ shift + finitary(x)`, stored with the finitary part
//! listed only on its support so that equal permutations are equal values.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::{Color, Omega};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("image table {0:?} is not a bijection")]
    NotBijective(Vec<u32>),
    #[error("finitary map is not a bijection of its support")]
    FinitaryNotBijective,
    #[error("permutations act on different color sets")]
    DomainMismatch,
    #[error("listed elements are not closed under {0}")]
    NotAGroup(&'static str),
    #[error("group is empty")]
    Empty,
    #[error("{sub} is not contained in {sup}")]
    NotContained { sub: String, sup: String },
    #[error("operation not supported for {0}")]
    Unsupported(String),
    #[error("invalid group table: {0}")]
    BadTable(String),
    #[error("wreath construction needs nontrivial factors ({0})")]
    TrivialFactor(&'static str),
    #[error("wreath construction self-check failed: {0}")]
    WreathCheck(String),
}

/// A bijection of Ω.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "PermRepr", into = "PermRepr")]
pub enum Permutation {
    /// `images[i]` is the image of color `i`.
    Table(Vec<u32>),
    /// `x ↦ shift + finitary(x)`; `finitary` lists only moved points.
    IntAffine {
        shift: i64,
        finitary: BTreeMap<i64, i64>,
    },
}

impl Permutation {
    pub fn identity(omega: Omega) -> Self {
        match omega {
            Omega::Finite(d) => Permutation::Table((0..d as u32).collect()),
            Omega::Integers => Permutation::translation(0),
        }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self, PermError> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            let i = i as usize;
            if i >= images.len() || seen[i] {
                return Err(PermError::NotBijective(images));
            }
            seen[i] = true;
        }
        Ok(Permutation::Table(images))
    }

    /// Builds a permutation of `{0..d}` from disjoint cycles.
    pub fn from_cycles(d: usize, cycles: &[&[u32]]) -> Result<Self, PermError> {
        let mut images: Vec<u32> = (0..d as u32).collect();
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                let y = cycle[(k + 1) % cycle.len()];
                if x as usize >= d {
                    return Err(PermError::NotBijective(images));
                }
                images[x as usize] = y;
            }
        }
        Permutation::from_images(images)
    }

    pub fn translation(shift: i64) -> Self {
        Permutation::IntAffine {
            shift,
            finitary: BTreeMap::new(),
        }
    }

    /// `x ↦ shift + finitary(x)`, with `finitary` a bijection of its keys.
    pub fn int_affine(shift: i64, finitary: BTreeMap<i64, i64>) -> Result<Self, PermError> {
        let keys: BTreeSet<i64> = finitary.keys().copied().collect();
        let values: BTreeSet<i64> = finitary.values().copied().collect();
        if keys != values || values.len() != finitary.len() {
            return Err(PermError::FinitaryNotBijective);
        }
        let finitary = finitary.into_iter().filter(|(k, v)| k != v).collect();
        Ok(Permutation::IntAffine { shift, finitary })
    }

    /// The transposition of two integers.
    pub fn int_transposition(a: i64, b: i64) -> Self {
        let mut finitary = BTreeMap::new();
        if a != b {
            finitary.insert(a, b);
            finitary.insert(b, a);
        }
        Permutation::IntAffine { shift: 0, finitary }
    }

    pub fn omega(&self) -> Omega {
        match self {
            Permutation::Table(t) => Omega::Finite(t.len()),
            Permutation::IntAffine { .. } => Omega::Integers,
        }
    }

    pub fn apply(&self, c: Color) -> Color {
        match self {
            Permutation::Table(t) => t[c as usize] as Color,
            Permutation::IntAffine { shift, finitary } => {
                shift + finitary.get(&c).copied().unwrap_or(c)
            }
        }
    }

    /// The unique preimage of `c`.
    pub fn preimage(&self, c: Color) -> Color {
        match self {
            Permutation::Table(t) => t.iter().position(|&x| x as Color == c).unwrap() as Color,
            Permutation::IntAffine { .. } => self.inverse().apply(c),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        match (self, other) {
            (Permutation::Table(p), Permutation::Table(q)) => {
                assert_eq!(p.len(), q.len(), "permutations act on different color sets");
                Permutation::Table(q.iter().map(|&i| p[i as usize]).collect())
            }
            (
                Permutation::IntAffine {
                    shift: sp,
                    finitary: fp,
                },
                Permutation::IntAffine {
                    shift: sq,
                    finitary: fq,
                },
            ) => {
                let candidates: BTreeSet<i64> = fq
                    .keys()
                    .copied()
                    .chain(fp.keys().map(|k| k - sq))
                    .collect();
                let finitary = candidates
                    .into_iter()
                    .filter_map(|x| {
                        let inner = sq + fq.get(&x).copied().unwrap_or(x);
                        let y = fp.get(&inner).copied().unwrap_or(inner) - sq;
                        (y != x).then_some((x, y))
                    })
                    .collect();
                Permutation::IntAffine {
                    shift: sp + sq,
                    finitary,
                }
            }
            _ => panic!("permutations act on different color sets"),
        }
    }

    pub fn inverse(&self) -> Permutation {
        match self {
            Permutation::Table(t) => {
                let mut inv = vec![0u32; t.len()];
                for (i, &x) in t.iter().enumerate() {
                    inv[x as usize] = i as u32;
                }
                Permutation::Table(inv)
            }
            Permutation::IntAffine { shift, finitary } => {
                let finitary = finitary.iter().map(|(&x, &y)| (y + shift, x + shift)).collect();
                Permutation::IntAffine {
                    shift: -shift,
                    finitary,
                }
            }
        }
    }

    pub fn pow(&self, k: u32) -> Permutation {
        let mut acc = Permutation::identity(self.omega());
        for _ in 0..k {
            acc = self.compose(&acc);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Permutation::Table(t) => t.iter().enumerate().all(|(i, &x)| i as u32 == x),
            Permutation::IntAffine { shift, finitary } => *shift == 0 && finitary.is_empty(),
        }
    }

    pub fn fixes(&self, c: Color) -> bool {
        self.apply(c) == c
    }

    /// Translation part of an integer permutation; zero for tables.
    pub fn shift(&self) -> i64 {
        match self {
            Permutation::Table(_) => 0,
            Permutation::IntAffine { shift, .. } => *shift,
        }
    }

    /// Points where the permutation differs from its translation part.
    /// For tables: the moved points.
    pub fn support(&self) -> BTreeSet<Color> {
        match self {
            Permutation::Table(t) => t
                .iter()
                .enumerate()
                .filter(|(i, &x)| *i as u32 != x)
                .map(|(i, _)| i as Color)
                .collect(),
            Permutation::IntAffine { finitary, .. } => finitary.keys().copied().collect(),
        }
    }
}

/// Wire form: an image array, or `{ shift, finitary = [[x, y], …] }`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PermRepr {
    Table(Vec<u32>),
    Affine { shift: i64, finitary: Vec<(i64, i64)> },
}

impl TryFrom<PermRepr> for Permutation {
    type Error = PermError;
    fn try_from(r: PermRepr) -> Result<Self, Self::Error> {
        match r {
            PermRepr::Table(t) => Permutation::from_images(t),
            PermRepr::Affine { shift, finitary } => {
                Permutation::int_affine(shift, finitary.into_iter().collect())
            }
        }
    }
}

impl From<Permutation> for PermRepr {
    fn from(p: Permutation) -> Self {
        match p {
            Permutation::Table(t) => PermRepr::Table(t),
            Permutation::IntAffine { shift, finitary } => PermRepr::Affine {
                shift,
                finitary: finitary.into_iter().collect(),
            },
        }
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation; `id` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Permutation::Table(t) => {
                if self.is_identity() {
                    return f.write_str("id");
                }
                let mut seen = vec![false; t.len()];
                for start in 0..t.len() {
                    if seen[start] || t[start] as usize == start {
                        continue;
                    }
                    let mut cycle = vec![start];
                    seen[start] = true;
                    let mut x = t[start] as usize;
                    while x != start {
                        seen[x] = true;
                        cycle.push(x);
                        x = t[x] as usize;
                    }
                    let parts: Vec<String> = cycle.iter().map(|c| c.to_string()).collect();
                    write!(f, "({})", parts.join(" "))?;
                }
                Ok(())
            }
            Permutation::IntAffine { shift, finitary } => {
                if self.is_identity() {
                    return f.write_str("id");
                }
                if *shift != 0 {
                    write!(f, "x+{shift}")?;
                    if !finitary.is_empty() {
                        f.write_str(" after ")?;
                    }
                }
                if !finitary.is_empty() {
                    let parts: Vec<String> =
                        finitary.iter().map(|(x, y)| format!("{x}->{y}")).collect();
                    write!(f, "[{}]", parts.join(" "))?;
                }
                Ok(())
            }
        }
    }
}

/// A finite group given by its multiplication table.
///
/// Elements are `0..order`; `table[i][j]` is the product `i·j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, PermError> {
        let n = table.len();
        if n == 0 {
            return Err(PermError::BadTable("empty table".into()));
        }
        if table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(PermError::BadTable("table is not square over 0..n".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| PermError::BadTable("no identity".into()))?;
        let mut inverses = Vec::with_capacity(n);
        for x in 0..n {
            let inv = (0..n)
                .find(|&y| table[x][y] == identity && table[y][x] == identity)
                .ok_or_else(|| PermError::BadTable(format!("element {x} has no inverse")))?;
            inverses.push(inv);
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(PermError::BadTable("not associative".into()));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            table,
            identity,
            inverses,
        })
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        FiniteGroup::from_table(table).expect("cyclic table is a group")
    }

    pub fn trivial() -> Self {
        FiniteGroup::cyclic(1)
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    /// Non-identity elements in increasing order.
    pub fn nontrivial_elements(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.order()).filter(move |&x| x != self.identity)
    }
}

impl TryFrom<Vec<Vec<usize>>> for FiniteGroup {
    type Error = PermError;
    fn try_from(t: Vec<Vec<usize>>) -> Result<Self, Self::Error> {
        FiniteGroup::from_table(t)
    }
}

impl From<FiniteGroup> for Vec<Vec<usize>> {
    fn from(g: FiniteGroup) -> Self {
        g.table
    }
}

/// Which permutation group a [`PermGroupSpec`] describes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupKind {
    /// All elements, sorted.
    FiniteListed(Vec<Permutation>),
    /// Translations of the integers.
    ZTranslations,
    /// Finitary permutations of the integers composed with translations.
    ZFinitaryAffine,
    /// Finitary permutations of the integers fixing one point.
    ZFinitaryStabilizer(Color),
}

/// A permutation group on Ω together with the reason it is amenable.
///
/// Amenability is never decided; `amenability_reason` is a structural
/// annotation carried into certificates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermGroupSpec {
    pub name: String,
    pub kind: GroupKind,
    pub amenability_reason: String,
}

impl PermGroupSpec {
    /// A finite group from its full element list, checked for closure.
    pub fn listed(name: impl Into<String>, elements: Vec<Permutation>) -> Result<Self, PermError> {
        let mut elements = elements;
        elements.sort();
        elements.dedup();
        let first = elements.first().ok_or(PermError::Empty)?;
        let omega = first.omega();
        if !omega.is_finite() || elements.iter().any(|p| p.omega() != omega) {
            return Err(PermError::DomainMismatch);
        }
        if !elements.iter().any(Permutation::is_identity) {
            return Err(PermError::NotAGroup("identity"));
        }
        let set: BTreeSet<&Permutation> = elements.iter().collect();
        for p in &elements {
            if !set.contains(&p.inverse()) {
                return Err(PermError::NotAGroup("inverses"));
            }
            for q in &elements {
                if !set.contains(&p.compose(q)) {
                    return Err(PermError::NotAGroup("composition"));
                }
            }
        }
        Ok(PermGroupSpec {
            name: name.into(),
            kind: GroupKind::FiniteListed(elements),
            amenability_reason: "finite".into(),
        })
    }

    /// The subgroup of `Sym(d)` generated by `gens`.
    pub fn generated(
        name: impl Into<String>,
        d: usize,
        gens: &[Permutation],
    ) -> Result<Self, PermError> {
        if gens.iter().any(|g| g.omega() != Omega::Finite(d)) {
            return Err(PermError::DomainMismatch);
        }
        let mut elements = BTreeSet::from([Permutation::identity(Omega::Finite(d))]);
        let mut frontier: Vec<Permutation> = elements.iter().cloned().collect();
        while let Some(p) = frontier.pop() {
            for g in gens {
                let q = g.compose(&p);
                if elements.insert(q.clone()) {
                    frontier.push(q);
                }
            }
        }
        PermGroupSpec::listed(name, elements.into_iter().collect())
    }

    pub fn symmetric(d: usize) -> Self {
        let elements = all_permutations(d);
        PermGroupSpec::listed(format!("Sym({d})"), elements).expect("Sym(d) is a group")
    }

    pub fn alternating(d: usize) -> Self {
        let elements = all_permutations(d).into_iter().filter(is_even).collect();
        PermGroupSpec::listed(format!("Alt({d})"), elements).expect("Alt(d) is a group")
    }

    /// The cyclic group generated by the cycle `(0 1 … d-1)`.
    pub fn cyclic_shift(d: usize) -> Self {
        let cycle: Vec<u32> = (0..d as u32).collect();
        let gen = Permutation::from_cycles(d, &[&cycle]).expect("valid cycle");
        PermGroupSpec::generated(format!("C{d}"), d, &[gen]).expect("cyclic group")
    }

    pub fn trivial(d: usize) -> Self {
        PermGroupSpec::listed("1", vec![Permutation::identity(Omega::Finite(d))])
            .expect("trivial group")
    }

    pub fn z_translations() -> Self {
        PermGroupSpec {
            name: "Z".into(),
            kind: GroupKind::ZTranslations,
            amenability_reason: "abelian".into(),
        }
    }

    pub fn z_finitary_affine() -> Self {
        PermGroupSpec {
            name: "Sym0(Z)⋊Z".into(),
            kind: GroupKind::ZFinitaryAffine,
            amenability_reason: "locally finite ⋊ Z".into(),
        }
    }

    pub fn omega(&self) -> Omega {
        match &self.kind {
            GroupKind::FiniteListed(els) => els[0].omega(),
            _ => Omega::Integers,
        }
    }

    pub fn elements(&self) -> Option<&[Permutation]> {
        match &self.kind {
            GroupKind::FiniteListed(els) => Some(els),
            _ => None,
        }
    }

    pub fn order(&self) -> Option<usize> {
        self.elements().map(<[Permutation]>::len)
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        if p.omega() != self.omega() {
            return false;
        }
        match (&self.kind, p) {
            (GroupKind::FiniteListed(els), _) => els.binary_search(p).is_ok(),
            (GroupKind::ZTranslations, Permutation::IntAffine { finitary, .. }) => {
                finitary.is_empty()
            }
            (GroupKind::ZFinitaryAffine, Permutation::IntAffine { .. }) => true,
            (GroupKind::ZFinitaryStabilizer(a), Permutation::IntAffine { shift, .. }) => {
                *shift == 0 && p.fixes(*a)
            }
            _ => false,
        }
    }

    /// Subgroup test. Exhaustive for listed groups, structural otherwise.
    pub fn is_subgroup_of(&self, other: &PermGroupSpec) -> bool {
        use GroupKind::*;
        match (&self.kind, &other.kind) {
            (FiniteListed(els), FiniteListed(_)) => els.iter().all(|p| other.contains(p)),
            (ZTranslations, ZTranslations | ZFinitaryAffine) => true,
            (ZFinitaryAffine, ZFinitaryAffine) => true,
            (ZFinitaryStabilizer(_), ZFinitaryAffine) => true,
            (ZFinitaryStabilizer(a), ZFinitaryStabilizer(b)) => a == b,
            _ => false,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == Some(1)
    }

    /// Some element mapping `c` to `target`, chosen deterministically.
    pub fn element_mapping(&self, c: Color, target: Color) -> Option<Permutation> {
        match &self.kind {
            GroupKind::FiniteListed(els) => els.iter().find(|p| p.apply(c) == target).cloned(),
            GroupKind::ZTranslations => Some(Permutation::translation(target - c)),
            GroupKind::ZFinitaryAffine => Some(Permutation::translation(target - c)),
            GroupKind::ZFinitaryStabilizer(a) => {
                if c == *a || target == *a {
                    (c == target).then(|| Permutation::translation(0))
                } else {
                    Some(Permutation::int_transposition(c, target))
                }
            }
        }
    }

    /// All elements mapping `c` to `target`, for listed groups.
    pub fn elements_mapping(&self, c: Color, target: Color) -> Option<Vec<Permutation>> {
        self.elements()
            .map(|els| els.iter().filter(|p| p.apply(c) == target).cloned().collect())
    }

    /// An element of this group agreeing with `p` at all but finitely many
    /// points, for integer groups.
    pub fn generic_completion(&self, p: &Permutation) -> Option<Permutation> {
        match (&self.kind, p) {
            (GroupKind::ZTranslations, Permutation::IntAffine { shift, .. }) => {
                Some(Permutation::translation(*shift))
            }
            (GroupKind::ZFinitaryAffine, Permutation::IntAffine { .. }) => Some(p.clone()),
            (GroupKind::ZFinitaryStabilizer(a), Permutation::IntAffine { shift: 0, .. }) => {
                Some(if p.fixes(*a) {
                    p.clone()
                } else {
                    Permutation::translation(0)
                })
            }
            _ => None,
        }
    }
}

impl fmt::Display for PermGroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn all_permutations(d: usize) -> Vec<Permutation> {
    fn rec(prefix: &mut Vec<u32>, used: &mut Vec<bool>, out: &mut Vec<Permutation>) {
        let d = used.len();
        if prefix.len() == d {
            out.push(Permutation::Table(prefix.clone()));
            return;
        }
        for x in 0..d {
            if !used[x] {
                used[x] = true;
                prefix.push(x as u32);
                rec(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; d], &mut out);
    out
}

fn is_even(p: &Permutation) -> bool {
    let Permutation::Table(t) = p else {
        return false;
    };
    let mut seen = vec![false; t.len()];
    let mut transpositions = 0;
    for start in 0..t.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = t[x] as usize;
            len += 1;
        }
        transpositions += len - 1;
    }
    transpositions % 2 == 0
}

/// True iff no non-identity element fixes a point.
///
/// Listed groups are checked exhaustively; translations are free by
/// construction; the finitary families never are.
pub fn check_freeness(f: &PermGroupSpec) -> bool {
    match &f.kind {
        GroupKind::FiniteListed(els) => {
            let d = f.omega().degree().unwrap() as Color;
            els.iter()
                .filter(|p| !p.is_identity())
                .all(|p| (0..d).all(|x| !p.fixes(x)))
        }
        GroupKind::ZTranslations => true,
        GroupKind::ZFinitaryAffine | GroupKind::ZFinitaryStabilizer(_) => false,
    }
}

/// Orbits of a listed group, as sorted color sets.
pub fn orbits(f: &PermGroupSpec) -> Option<Vec<BTreeSet<Color>>> {
    let els = f.elements()?;
    let d = f.omega().degree()? as Color;
    let mut assigned = BTreeSet::new();
    let mut out = Vec::new();
    for x in 0..d {
        if assigned.contains(&x) {
            continue;
        }
        let orbit: BTreeSet<Color> = els.iter().map(|p| p.apply(x)).collect();
        assigned.extend(orbit.iter().copied());
        out.push(orbit);
    }
    Some(out)
}

/// True iff every element of `fp` maps each `f`-orbit into itself.
///
/// Fails with [`PermError::NotContained`] when `f` is not a subgroup of `fp`.
pub fn check_orbit_preservation(f: &PermGroupSpec, fp: &PermGroupSpec) -> Result<bool, PermError> {
    if f.omega() != fp.omega() {
        return Err(PermError::DomainMismatch);
    }
    if !f.is_subgroup_of(fp) {
        return Err(PermError::NotContained {
            sub: f.name.clone(),
            sup: fp.name.clone(),
        });
    }
    match (&f.kind, &fp.kind) {
        (GroupKind::FiniteListed(_), GroupKind::FiniteListed(big)) => {
            let orbits = orbits(f).unwrap();
            Ok(big.iter().all(|p| {
                orbits
                    .iter()
                    .all(|orbit| orbit.iter().all(|&x| orbit.contains(&p.apply(x))))
            }))
        }
        // transitive on Z: a single orbit
        (GroupKind::ZTranslations | GroupKind::ZFinitaryAffine, _) => Ok(true),
        // orbits {a} and Z∖{a}
        (GroupKind::ZFinitaryStabilizer(_), GroupKind::ZFinitaryStabilizer(_)) => Ok(true),
        (GroupKind::ZFinitaryStabilizer(_), _) => Ok(false),
        _ => Err(PermError::Unsupported(format!("orbits of {}", f.name))),
    }
}

/// The stabilizer `{σ ∈ fp : σ(a) = a}`.
pub fn point_stabilizer(fp: &PermGroupSpec, a: Color) -> Result<PermGroupSpec, PermError> {
    if !fp.omega().contains(a) {
        return Err(PermError::Unsupported(format!("point {a} outside {}", fp.omega())));
    }
    match &fp.kind {
        GroupKind::FiniteListed(els) => {
            let stab: Vec<Permutation> = els.iter().filter(|p| p.fixes(a)).cloned().collect();
            PermGroupSpec::listed(format!("{}_{a}", fp.name), stab)
        }
        GroupKind::ZTranslations => Err(PermError::Unsupported(
            "stabilizers of the translation group (always trivial)".into(),
        )),
        GroupKind::ZFinitaryAffine => Ok(PermGroupSpec {
            name: format!("{}_{a}", fp.name),
            kind: GroupKind::ZFinitaryStabilizer(a),
            amenability_reason: "locally finite".into(),
        }),
        GroupKind::ZFinitaryStabilizer(b) if *b == a => Ok(fp.clone()),
        GroupKind::ZFinitaryStabilizer(_) => Err(PermError::Unsupported(
            "stabilizer of two points in the finitary family".into(),
        )),
    }
}

/// The output of [`wreath_embedding_spec`].
#[derive(Clone, Debug)]
pub struct WreathEmbedding {
    pub gamma: FiniteGroup,
    pub a: FiniteGroup,
    /// Ω as the functions `A → Γ`, each a vector indexed by `A`.
    pub points: Vec<Vec<usize>>,
    /// The base group `Γ^A`, acting simply transitively.
    pub f: PermGroupSpec,
    /// The wreath product `Γ ≀ A`.
    pub fp: PermGroupSpec,
    /// `embed[γ]` is the image of `γ ∈ Γ` in `F'`.
    pub embed: Vec<Permutation>,
    /// The copy of `A` stabilizing the constant-identity function.
    pub top: Vec<Permutation>,
}

impl WreathEmbedding {
    pub fn degree(&self) -> usize {
        self.points.len()
    }

    fn index_of(&self, x: &[usize]) -> usize {
        encode(x, self.gamma.order())
    }
}

fn encode(x: &[usize], base: usize) -> usize {
    x.iter().rev().fold(0, |acc, &d| acc * base + d)
}

/// `Γ ≀ A` acting on `Γ^A ≅ (Γ ≀ A)/A`, with the base group `F = Γ^A`
/// acting simply transitively.
///
/// The element `(f, α)` sends `x` to `t ↦ f(t)·x(α⁻¹t)`. Freeness and
/// transitivity of `F`, faithfulness of `F'` and the description of point
/// stabilizers as conjugates of `A` are all verified exhaustively before
/// returning.
pub fn wreath_embedding_spec(gamma: &FiniteGroup, a: &FiniteGroup) -> Result<WreathEmbedding, PermError> {
    if gamma.is_trivial() {
        return Err(PermError::TrivialFactor("Γ"));
    }
    if a.is_trivial() {
        return Err(PermError::TrivialFactor("A"));
    }
    let (ng, na) = (gamma.order(), a.order());
    let size = ng.pow(na as u32);
    let points: Vec<Vec<usize>> = (0..size)
        .map(|mut i| {
            (0..na)
                .map(|_| {
                    let d = i % ng;
                    i /= ng;
                    d
                })
                .collect()
        })
        .collect();
    let act = |f: &[usize], alpha: usize| -> Permutation {
        let images = points
            .iter()
            .map(|x| {
                let y: Vec<usize> = (0..na)
                    .map(|t| gamma.mul(f[t], x[a.mul(a.inv(alpha), t)]))
                    .collect();
                encode(&y, ng) as u32
            })
            .collect();
        Permutation::from_images(images).expect("wreath action is bijective")
    };
    let ida = a.identity();
    let base: Vec<Permutation> = points.iter().map(|f| act(f, ida)).collect();
    let top: Vec<Permutation> = (0..na).map(|alpha| act(&vec![gamma.identity(); na], alpha)).collect();
    let mut all = Vec::with_capacity(size * na);
    for f in &points {
        for alpha in 0..na {
            all.push(act(f, alpha));
        }
    }
    let distinct: BTreeSet<&Permutation> = all.iter().collect();
    if distinct.len() != size * na {
        return Err(PermError::WreathCheck("F' does not act faithfully".into()));
    }
    let f = PermGroupSpec::listed(format!("Γ^A (|Γ|={ng}, |A|={na})"), base)?;
    let mut fp = PermGroupSpec::listed(format!("Γ≀A (|Γ|={ng}, |A|={na})"), all)?;
    fp.amenability_reason = "finite".into();
    if !check_freeness(&f) {
        return Err(PermError::WreathCheck("F does not act freely".into()));
    }
    if orbits(&f).unwrap().len() != 1 {
        return Err(PermError::WreathCheck("F is not transitive".into()));
    }
    let mut embed = Vec::with_capacity(ng);
    for g in 0..ng {
        let mut f = vec![gamma.identity(); na];
        f[ida] = g;
        embed.push(act(&f, ida));
    }
    let w = WreathEmbedding {
        gamma: gamma.clone(),
        a: a.clone(),
        points,
        f,
        fp,
        embed,
        top,
    };
    if !stabilizers_are_conjugates_of_top(&w) {
        return Err(PermError::WreathCheck("stabilizers are not conjugates of A".into()));
    }
    Ok(w)
}

/// For every point `x`, the stabilizer of `x` in `F'` equals `π A π⁻¹`
/// where `π ∈ F` sends the constant-identity function to `x`.
pub fn stabilizers_are_conjugates_of_top(w: &WreathEmbedding) -> bool {
    let fp = w.fp.elements().unwrap();
    let origin = w.index_of(&vec![w.gamma.identity(); w.a.order()]) as Color;
    w.points.iter().enumerate().all(|(x, _)| {
        let x = x as Color;
        let stab: BTreeSet<Permutation> = fp.iter().filter(|p| p.fixes(x)).cloned().collect();
        let Some(pi) = w.f.elements().unwrap().iter().find(|p| p.apply(origin) == x) else {
            return false;
        };
        let conj: BTreeSet<Permutation> = w
            .top
            .iter()
            .map(|t| pi.compose(t).compose(&pi.inverse()))
            .collect();
        stab == conj
    })
}
