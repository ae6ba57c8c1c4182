//! Seeded random elements and exhaustive enumeration of small portraits.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BranchRule, CoreEntry, GroupClass, PortraitError, TreeAutomorphism};
use crate::perm::{GroupKind, PermGroupSpec, Permutation};
use crate::tree::{enumerate_ball, Color, Omega, Vertex};

const ATTEMPTS: usize = 200;

/// Colors used for cores and base words when Ω is the integers.
pub const INTEGER_WINDOW: std::ops::RangeInclusive<Color> = -4..=4;

fn default_window(omega: Omega) -> Vec<Color> {
    omega.colors().unwrap_or_else(|| INTEGER_WINDOW.collect())
}

/// A member of `class` whose core lies in the ball of radius `core_radius`,
/// determined by `seed`.
pub fn random_element(
    class: &GroupClass,
    core_radius: usize,
    seed: u64,
) -> Result<TreeAutomorphism, PortraitError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let window = default_window(class.omega());
    random_element_in(class, core_radius, &window, &mut rng)
}

/// Like [`random_element`], drawing from a caller-supplied generator. Core
/// vertices and the base image use colors from `window`.
pub fn random_element_in<R: Rng>(
    class: &GroupClass,
    core_radius: usize,
    window: &[Color],
    rng: &mut R,
) -> Result<TreeAutomorphism, PortraitError> {
    let (locals, branches) = class
        .value_groups()
        .ok_or_else(|| PortraitError::Unsatisfiable(class.name()))?;
    let mut ball = enumerate_ball(&Vertex::root(), core_radius, window)
        .map_err(|e| PortraitError::Unsatisfiable(e.to_string()))?;
    ball.sort_by(|a, b| (a.depth(), a).cmp(&(b.depth(), b)));
    for _ in 0..ATTEMPTS {
        let Some(core) = sample_core(&ball, &locals, &branches, class.omega(), window, rng) else {
            continue;
        };
        let base = random_base(window, core_radius + 1, class.is_star(), rng);
        if let Ok(g) = TreeAutomorphism::new(class.omega(), base, core) {
            debug_assert_eq!(g.membership(class), Ok(true));
            return Ok(g);
        }
    }
    Err(PortraitError::Unsatisfiable(format!(
        "{} at core radius {core_radius}",
        class.name()
    )))
}

fn random_base<R: Rng>(window: &[Color], max_len: usize, even: bool, rng: &mut R) -> Vertex {
    let mut len = rng.gen_range(0..=max_len);
    if even && len % 2 == 1 {
        len -= 1;
    }
    let mut word: Vec<Color> = Vec::with_capacity(len);
    while word.len() < len {
        let c = *window.choose(rng).unwrap();
        if word.last() != Some(&c) {
            word.push(c);
        }
    }
    Vertex::from_word(word).expect("sampled word is reduced")
}

fn outward_colors(u: &Vertex, ball: &[Vertex], omega: Omega, window: &[Color]) -> Vec<Color> {
    let in_core = |c: Color| ball.binary_search_by(|k| (k.depth(), k).cmp(&(u.depth() + 1, &u.neighbor(c)))).is_ok();
    let colors = omega.colors().unwrap_or_else(|| window.to_vec());
    colors
        .into_iter()
        .filter(|&c| Some(c) != u.last() && !in_core(c))
        .collect()
}

fn sample_core<R: Rng>(
    ball: &[Vertex],
    locals: &PermGroupSpec,
    branches: &PermGroupSpec,
    omega: Omega,
    window: &[Color],
    rng: &mut R,
) -> Option<BTreeMap<Vertex, CoreEntry>> {
    let mut values: BTreeMap<Vertex, Permutation> = BTreeMap::new();
    let mut core = BTreeMap::new();
    for u in ball {
        let constraint = u.parent().map(|p| {
            let c = u.last().unwrap();
            (c, values[&p].apply(c))
        });
        let outward = outward_colors(u, ball, omega, window);
        let local = match locals.elements() {
            Some(els) => {
                let ok: Vec<&Permutation> = els
                    .iter()
                    .filter(|p| constraint.is_none_or(|(c, t)| p.apply(c) == t))
                    .filter(|p| {
                        outward
                            .iter()
                            .all(|&e| branches.element_mapping(e, p.apply(e)).is_some())
                    })
                    .collect();
                (*ok.choose(rng)?).clone()
            }
            None => random_integer_element(locals, constraint, window, rng)?,
        };
        let rule = match omega {
            Omega::Finite(_) => {
                let mut explicit = BTreeMap::new();
                for &e in &outward {
                    let choices = branches.elements_mapping(e, local.apply(e))?;
                    explicit.insert(e, choices.choose(rng)?.clone());
                }
                BranchRule {
                    default: None,
                    explicit,
                }
            }
            Omega::Integers => {
                let default = branches.generic_completion(&local)?;
                let mut explicit = BTreeMap::new();
                let mut special: Vec<Color> = local.support().union(&default.support()).copied().collect();
                special.extend(&outward);
                for e in special {
                    if Some(e) == u.last() || ball.contains(&u.neighbor(e)) {
                        continue;
                    }
                    if default.apply(e) != local.apply(e) {
                        explicit.insert(e, branches.element_mapping(e, local.apply(e))?);
                    }
                }
                BranchRule {
                    default: Some(default),
                    explicit,
                }
            }
        };
        values.insert(u.clone(), local.clone());
        core.insert(u.clone(), CoreEntry { local, branches: rule });
    }
    Some(core)
}

/// A random element of an integer group, optionally mapping `c` to `t`.
fn random_integer_element<R: Rng>(
    group: &PermGroupSpec,
    constraint: Option<(Color, Color)>,
    window: &[Color],
    rng: &mut R,
) -> Option<Permutation> {
    let base = match constraint {
        Some((c, t)) => group.element_mapping(c, t)?,
        None => match group.kind {
            GroupKind::ZFinitaryStabilizer(_) => Permutation::translation(0),
            _ => Permutation::translation(rng.gen_range(-2..=2)),
        },
    };
    let avoid: Vec<Color> = match (&group.kind, constraint) {
        (GroupKind::ZTranslations, _) | (GroupKind::FiniteListed(_), _) => return Some(base),
        (GroupKind::ZFinitaryStabilizer(a), Some((c, _))) => vec![*a, c],
        (GroupKind::ZFinitaryStabilizer(a), None) => vec![*a],
        (GroupKind::ZFinitaryAffine, Some((c, _))) => vec![c],
        (GroupKind::ZFinitaryAffine, None) => vec![],
    };
    let free: Vec<Color> = window.iter().copied().filter(|c| !avoid.contains(c)).collect();
    if free.len() >= 2 && rng.gen_bool(0.5) {
        let pair: Vec<&Color> = free.choose_multiple(rng, 2).collect();
        Some(base.compose(&Permutation::int_transposition(*pair[0], *pair[1])))
    } else {
        Some(base)
    }
}

/// Every member of `class` with core inside the ball of radius `core_radius`
/// and base image inside the ball of radius `base_radius`, in canonical
/// form and without repetition.
///
/// Only finite color sets are supported. Fails with
/// [`PortraitError::Unsatisfiable`] once more than `limit` portraits would
/// be produced.
pub fn enumerate_elements(
    class: &GroupClass,
    core_radius: usize,
    base_radius: usize,
    limit: usize,
) -> Result<Vec<TreeAutomorphism>, PortraitError> {
    let omega = class.omega();
    let colors = omega.colors().ok_or(PortraitError::NeedsFiniteOmega)?;
    let (locals, branches) = class.value_groups().expect("finite classes have listed groups");
    let mut ball = enumerate_ball(&Vertex::root(), core_radius, &colors)
        .map_err(|e| PortraitError::Unsatisfiable(e.to_string()))?;
    ball.sort_by(|a, b| (a.depth(), a).cmp(&(b.depth(), b)));
    let mut bases = enumerate_ball(&Vertex::root(), base_radius, &colors)
        .map_err(|e| PortraitError::Unsatisfiable(e.to_string()))?;
    bases.sort();
    if class.is_star() {
        bases.retain(|b| b.depth() % 2 == 0);
    }

    let mut cores = Vec::new();
    let mut partial = BTreeMap::new();
    fill(&ball, 0, &locals, &branches, omega, &colors, &mut partial, &mut cores, limit)?;

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for core in cores {
        for base in &bases {
            let g = TreeAutomorphism::new(omega, base.clone(), core.clone())
                .expect("enumerated portraits are compatible");
            if seen.insert(g.clone()) {
                out.push(g);
                if out.len() > limit {
                    return Err(PortraitError::Unsatisfiable(format!("more than {limit} elements")));
                }
            }
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn fill(
    ball: &[Vertex],
    i: usize,
    locals: &PermGroupSpec,
    branches: &PermGroupSpec,
    omega: Omega,
    colors: &[Color],
    partial: &mut BTreeMap<Vertex, CoreEntry>,
    out: &mut Vec<BTreeMap<Vertex, CoreEntry>>,
    limit: usize,
) -> Result<(), PortraitError> {
    let Some(u) = ball.get(i) else {
        if out.len() >= limit {
            return Err(PortraitError::Unsatisfiable(format!("more than {limit} cores")));
        }
        out.push(partial.clone());
        return Ok(());
    };
    let constraint = u.parent().map(|p| {
        let c = u.last().unwrap();
        (c, partial[&p].local.apply(c))
    });
    let outward = outward_colors(u, ball, omega, colors);
    for local in locals.elements().unwrap() {
        if constraint.is_some_and(|(c, t)| local.apply(c) != t) {
            continue;
        }
        let options: Option<Vec<Vec<Permutation>>> = outward
            .iter()
            .map(|&e| branches.elements_mapping(e, local.apply(e)).filter(|v| !v.is_empty()))
            .collect();
        let Some(options) = options else { continue };
        let mut idx = vec![0usize; options.len()];
        loop {
            let explicit = outward
                .iter()
                .zip(&idx)
                .zip(&options)
                .map(|((&e, &k), opts)| (e, opts[k].clone()))
                .collect();
            partial.insert(
                u.clone(),
                CoreEntry {
                    local: local.clone(),
                    branches: BranchRule {
                        default: None,
                        explicit,
                    },
                },
            );
            fill(ball, i + 1, locals, branches, omega, colors, partial, out, limit)?;
            // odometer over the branch choices
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < options[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    partial.remove(u);
    Ok(())
}
