//! Certificates: the full disjoint-support pipeline for one group pair,
//! serialized as `arboreal-cert/1` (a header line followed by TOML).

use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{fixes_half_tree_pointwise, general_type_witness};
use crate::obstruction::{
    check_pair, disjoint_pair, disjoint_support_report, operator_annihilation_check, orbit_truncate,
    thm_c_witness, AnnihilationReport, SupportReport,
};
use crate::perm::{check_freeness, check_orbit_preservation, point_stabilizer, GroupKind, PermGroupSpec, Permutation};
use crate::portrait::{random_element_in, GroupClass, TreeAutomorphism};
use crate::presets::{ConfigError, GroupSource, Resolved};
use crate::tree::{Color, DirectedEdge, EndPoint, HalfTree, Omega, PeriodicEnd, Vertex};

pub const CERT_HEADER: &str = "arboreal-cert/1";

#[derive(Debug, Error)]
pub enum CertError {
    #[error("missing or wrong header (expected {CERT_HEADER:?})")]
    Header,
    #[error("malformed certificate: {0}")]
    Parse(String),
    #[error("certificate could not be serialized: {0}")]
    Serialize(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("re-verification differs: {0}")]
    Mismatch(String),
}

fn default_word_length() -> usize {
    3
}
fn default_depth() -> usize {
    16
}
fn default_search_len() -> usize {
    3
}
fn default_edge() -> DirectedEdge {
    DirectedEdge::new(Vertex::root(), 0)
}

/// Parameters of a certificate run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertConfig {
    pub groups: GroupSource,
    /// The edge separating the supports of the disjoint pair.
    #[serde(default = "default_edge")]
    pub edge: DirectedEdge,
    /// The base end; `(01)^∞` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<EndSpec>,
    #[serde(default = "default_word_length")]
    pub word_length: usize,
    #[serde(default = "default_depth")]
    pub depth: usize,
    /// Longest product tried by the general-type search.
    #[serde(default = "default_search_len")]
    pub search_len: usize,
    /// Seed for the randomized spot checks.
    #[serde(default)]
    pub seed: u64,
}

impl CertConfig {
    pub fn new(groups: GroupSource) -> Self {
        CertConfig {
            groups,
            edge: default_edge(),
            xi: None,
            word_length: default_word_length(),
            depth: default_depth(),
            search_len: default_search_len(),
            seed: 0,
        }
    }

    pub fn preset(name: &str) -> Self {
        Self::new(GroupSource::Preset { name: name.into() })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndSpec {
    #[serde(default)]
    pub prefix: Vec<Color>,
    pub period: Vec<Color>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Valid,
    Invalid,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupsSection {
    pub class: String,
    pub omega: Omega,
    pub f: String,
    pub fp: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fp_order: Option<usize>,
    pub f_free: bool,
    pub orbits_preserved: bool,
    /// The stabilizer `F'_a` of the edge color, when it is representable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stabilizer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stabilizer_order: Option<usize>,
    /// Why `F'_a` is amenable; recorded, never decided.
    pub amenability_reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralTypeSection {
    pub found: bool,
    pub search_len: usize,
    pub depth: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub word1: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub word2: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSection {
    pub half_tree: HalfTree,
    pub non_identity: bool,
    pub fixes_half_tree: bool,
    pub in_g: bool,
    pub in_u: bool,
    /// Local action at the tail of the half-tree's edge.
    pub local_action: Permutation,
}

impl WitnessSection {
    fn holds(&self) -> bool {
        self.non_identity && self.fixes_half_tree && self.in_g && !self.in_u
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSection {
    pub a: TreeAutomorphism,
    pub b: TreeAutomorphism,
    /// `a` fixes the half-tree behind the edge, `b` the one in front.
    pub a_fixes: HalfTree,
    pub b_fixes: HalfTree,
    pub a_fixation: bool,
    pub b_fixation: bool,
    pub commute: bool,
}

impl PairSection {
    fn holds(&self) -> bool {
        self.a_fixation && self.b_fixation && self.commute && !self.a.is_identity() && !self.b.is_identity()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitSection {
    pub xi: PeriodicEnd,
    pub word_length: usize,
    pub depth: usize,
    pub depth_bound: usize,
    pub generator_count: usize,
    pub points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpotChecks {
    pub seed: u64,
    pub samples: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failed_stage: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub config: CertConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<GroupsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spot_checks: Option<SpotChecks>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<TreeAutomorphism>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub general_type: Option<GeneralTypeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit: Option<OrbitSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disjoint_support: Option<SupportReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annihilation: Option<AnnihilationReport>,
    pub caveats: Vec<String>,
}

/// Two constant-portrait elements of `U(F)`: the inversion of the color-0
/// edge at `v0`, and the element with local action `f` everywhere sending
/// `v0` to `01`. `f` is the first non-identity element of `F` with
/// `f(0) ≠ 1`, so that the second generator is hyperbolic; when every
/// such element is missing the first non-identity element is used.
pub fn uf_generators(f: &PermGroupSpec) -> Vec<TreeAutomorphism> {
    let omega = f.omega();
    let step = match &f.kind {
        GroupKind::FiniteListed(els) => {
            let mut moving = els.iter().filter(|p| !p.is_identity());
            moving.clone().find(|p| p.apply(0) != 1).or_else(|| moving.next()).cloned()
        }
        GroupKind::ZTranslations | GroupKind::ZFinitaryAffine => Some(Permutation::translation(2)),
        GroupKind::ZFinitaryStabilizer(_) => None,
    }
    .unwrap_or_else(|| Permutation::identity(omega));
    vec![
        TreeAutomorphism::from_constant(Permutation::identity(omega), Vertex::walk(&[0])),
        TreeAutomorphism::from_constant(step, Vertex::walk(&[0, 1])),
    ]
}

/// `gens` together with their inverses, without repetition, in order.
pub fn symmetrize(gens: &[TreeAutomorphism]) -> Vec<TreeAutomorphism> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for g in gens {
        for h in [g.clone(), g.inverse()] {
            if seen.insert(h.clone()) {
                out.push(h);
            }
        }
    }
    out
}

struct Run {
    cert: Certificate,
}

impl Run {
    fn fail(mut self, stage: &str, why: impl ToString) -> Certificate {
        self.cert.status = Status::Invalid;
        self.cert.failed_stage = Some(stage.into());
        self.cert.failure = Some(why.to_string());
        self.cert
    }
}

/// Runs the pipeline. Configuration problems are errors; failed checks
/// produce an `INVALID` certificate naming the stage.
pub fn build_certificate(config: &CertConfig) -> Result<Certificate, CertError> {
    let (f, fp) = match config.groups.resolve()? {
        Resolved::Prescribed { f, fp } => (f, fp),
        Resolved::FreeProduct(_) => return Err(ConfigError::NotPrescribed(config.groups.label()).into()),
    };
    if config.depth == 0 {
        return Err(ConfigError::Invalid("depth must be positive".into()).into());
    }
    let xi_spec = config.xi.clone().unwrap_or(EndSpec {
        prefix: vec![],
        period: vec![0, 1],
    });
    let xi = PeriodicEnd::new(xi_spec.prefix, xi_spec.period)
        .map_err(|e| ConfigError::Invalid(format!("xi: {e}")))?;
    let omega = f.omega();
    let edge = config.edge.clone();
    if edge.tail.word().iter().chain([&edge.color]).any(|&c| !omega.contains(c))
        || xi.ray(xi.prefix_word().len() + xi.period().len()).iter().any(|&c| !omega.contains(c))
    {
        return Err(ConfigError::Invalid(format!("edge or xi uses colors outside {omega}")).into());
    }

    let mut run = Run {
        cert: Certificate {
            status: Status::Valid,
            failed_stage: None,
            failure: None,
            config: config.clone(),
            groups: None,
            spot_checks: None,
            generators: Vec::new(),
            general_type: None,
            witness: None,
            pair: None,
            orbit: None,
            disjoint_support: None,
            annihilation: None,
            caveats: vec![
                "end comparisons involving axis ends are by prefix to the recorded depth".into(),
                "orbit points are identified by their prefix at the orbit depth".into(),
                "amenability of the point stabilizer is a recorded annotation, not a computation".into(),
                "the general-type search can confirm but never refute".into(),
            ],
        },
    };

    // groups
    let orbits_preserved = match check_orbit_preservation(&f, &fp) {
        Ok(b) => b,
        Err(e) => return Ok(run.fail("groups", e)),
    };
    let stab = point_stabilizer(&fp, edge.color).ok();
    let class = GroupClass::GofFFp(f.clone(), fp.clone());
    run.cert.groups = Some(GroupsSection {
        class: class.name(),
        omega,
        f: f.name.clone(),
        fp: fp.name.clone(),
        f_order: f.order(),
        fp_order: fp.order(),
        f_free: check_freeness(&f),
        orbits_preserved,
        stabilizer: stab.as_ref().map(|s| s.name.clone()),
        stabilizer_order: stab.as_ref().and_then(PermGroupSpec::order),
        amenability_reason: stab
            .as_ref()
            .map(|s| s.amenability_reason.clone())
            .unwrap_or_else(|| "trivial".into()),
    });

    // spot checks of the group law on seeded random elements
    let samples = 12;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let window: Vec<Color> = omega.colors().unwrap_or_else(|| (-3..=3).collect());
    let mut elems = Vec::new();
    for _ in 0..samples {
        match random_element_in(&class, 1, &window, &mut rng) {
            Ok(g) => elems.push(g),
            Err(e) => return Ok(run.fail("spot_checks", e)),
        }
    }
    let passed = elems.windows(3).all(|w| {
        w[0].compose(&w[1]).compose(&w[2]) == w[0].compose(&w[1].compose(&w[2]))
            && w[0].compose(&w[0].inverse()).is_identity()
            && w[0].membership(&class) == Ok(true)
    });
    run.cert.spot_checks = Some(SpotChecks {
        seed: config.seed,
        samples,
        passed,
    });
    if !passed {
        return Ok(run.fail("spot_checks", "group law failed on a random triple"));
    }

    // general type
    let base_gens = uf_generators(&f);
    let gt = general_type_witness(&base_gens, config.search_len);
    run.cert.general_type = Some(match &gt {
        Some(w) => GeneralTypeSection {
            found: true,
            search_len: config.search_len,
            depth: w.depth,
            word1: w.word1.clone(),
            word2: w.word2.clone(),
        },
        None => GeneralTypeSection {
            found: false,
            search_len: config.search_len,
            depth: 0,
            word1: vec![],
            word2: vec![],
        },
    });
    if gt.is_none() {
        return Ok(run.fail("general_type_witness", "no witness within the search bound"));
    }

    // half-tree witness
    let h = HalfTree::new(edge.clone());
    let g = match thm_c_witness(&f, &fp, &h) {
        Ok(g) => g,
        Err(e) => return Ok(run.fail("thm_c_witness", e)),
    };
    let section = WitnessSection {
        half_tree: h.clone(),
        non_identity: !g.is_identity(),
        fixes_half_tree: fixes_half_tree_pointwise(&g, &h),
        in_g: g.membership(&class) == Ok(true),
        in_u: g.membership(&GroupClass::UofF(f.clone())) == Ok(true),
        local_action: g.local_action(&edge.tail).clone(),
    };
    let ok = section.holds();
    run.cert.witness = Some(section);
    if !ok {
        return Ok(run.fail("thm_c_witness", "witness properties failed"));
    }

    // disjoint pair
    let (a, b) = match disjoint_pair(&f, &fp, &edge) {
        Ok(p) => p,
        Err(e) => return Ok(run.fail("disjoint_pair", e)),
    };
    let t1 = HalfTree::new(edge.clone());
    let t2 = t1.complement();
    let pair = PairSection {
        a_fixation: fixes_half_tree_pointwise(&a, &t2),
        b_fixation: fixes_half_tree_pointwise(&b, &t1),
        commute: a.commutes_with(&b),
        a_fixes: t2,
        b_fixes: t1,
        a: a.clone(),
        b: b.clone(),
    };
    let ok = pair.holds();
    run.cert.pair = Some(pair);
    if !ok {
        return Ok(run.fail("disjoint_pair", "pair properties failed"));
    }

    // orbit
    let mut all = base_gens;
    all.extend([a.clone(), b.clone()]);
    let gens = symmetrize(&all);
    run.cert.generators = gens.clone();
    let orbit = match orbit_truncate(&gens, &EndPoint::Periodic(xi.clone()), config.word_length, config.depth) {
        Ok(o) => o,
        Err(e) => return Ok(run.fail("orbit_truncate", e)),
    };
    if let Some(w) = &orbit.warning {
        run.cert.caveats.push(w.clone());
    }
    run.cert.orbit = Some(OrbitSection {
        xi,
        word_length: orbit.word_length,
        depth: orbit.depth,
        depth_bound: orbit.depth_bound,
        generator_count: gens.len(),
        points: orbit.points.len(),
        warning: orbit.warning.clone(),
    });

    let support = disjoint_support_report(&a, &b, &orbit);
    let ok = support.holds();
    run.cert.disjoint_support = Some(support);
    if !ok {
        return Ok(run.fail("disjoint_support_check", "an orbit point is moved by both a and b"));
    }
    let ann = operator_annihilation_check(&a, &b, &orbit);
    let ok = ann.holds();
    run.cert.annihilation = Some(ann);
    if !ok {
        return Ok(run.fail("operator_annihilation_check", "the convolution identity failed"));
    }
    // sanity: the pipeline hypotheses were all met
    debug_assert!(check_pair(&f, &fp).is_ok());
    Ok(run.cert)
}

impl Certificate {
    pub fn is_valid(&self) -> bool {
        self.status == Status::Valid
    }

    pub fn to_text(&self) -> Result<String, CertError> {
        let body = toml::to_string(self).map_err(|e| CertError::Serialize(e.to_string()))?;
        Ok(format!("{CERT_HEADER}\n{body}"))
    }

    pub fn parse(text: &str) -> Result<Certificate, CertError> {
        let body = text
            .strip_prefix(CERT_HEADER)
            .and_then(|rest| rest.strip_prefix('\n').or(rest.strip_prefix("\r\n")))
            .ok_or(CertError::Header)?;
        toml::from_str(body).map_err(|e| CertError::Parse(e.to_string()))
    }

    /// Re-runs the pipeline from the recorded config and checks that every
    /// recorded section, including the serialized elements, is reproduced.
    /// The recorded `a` and `b` are also checked directly.
    pub fn reverify(&self) -> Result<(), CertError> {
        let again = build_certificate(&self.config)?;
        if again != *self {
            let diff = [
                ("status", again.status != self.status),
                ("groups", again.groups != self.groups),
                ("spot_checks", again.spot_checks != self.spot_checks),
                ("generators", again.generators != self.generators),
                ("general_type", again.general_type != self.general_type),
                ("witness", again.witness != self.witness),
                ("pair", again.pair != self.pair),
                ("orbit", again.orbit != self.orbit),
                ("disjoint_support", again.disjoint_support != self.disjoint_support),
                ("annihilation", again.annihilation != self.annihilation),
                ("caveats", again.caveats != self.caveats),
            ]
            .iter()
            .filter(|(_, d)| *d)
            .map(|(n, _)| *n)
            .collect::<Vec<_>>()
            .join(", ");
            return Err(CertError::Mismatch(diff));
        }
        if let Some(p) = &self.pair {
            if fixes_half_tree_pointwise(&p.a, &p.a_fixes) != p.a_fixation
                || fixes_half_tree_pointwise(&p.b, &p.b_fixes) != p.b_fixation
                || p.a.commutes_with(&p.b) != p.commute
            {
                return Err(CertError::Mismatch("recorded pair".into()));
            }
        }
        Ok(())
    }

    /// A human-readable summary.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("status: {:?}", self.status).to_uppercase());
        if let (Some(stage), Some(why)) = (&self.failed_stage, &self.failure) {
            line(format!("failed stage: {stage} ({why})"));
        }
        line(format!("groups: {}", self.config.groups.label()));
        if let Some(g) = &self.groups {
            line(format!(
                "  class {} on {}; F free: {}; orbits preserved: {}",
                g.class, g.omega, g.f_free, g.orbits_preserved
            ));
            line(format!(
                "  stabilizer {} ({})",
                g.stabilizer.as_deref().unwrap_or("-"),
                g.amenability_reason
            ));
        }
        if let Some(s) = &self.spot_checks {
            line(format!("spot checks (seed {}): {} samples, passed {}", s.seed, s.samples, s.passed));
        }
        if let Some(gt) = &self.general_type {
            if gt.found {
                line(format!(
                    "general type: words {:?} and {:?}, ends distinct to depth {}",
                    gt.word1, gt.word2, gt.depth
                ));
            } else {
                line(format!("general type: not found up to length {}", gt.search_len));
            }
        }
        if let Some(w) = &self.witness {
            line(format!(
                "witness at {}: local action {}, fixes half-tree {}, in G {}, in U {}",
                w.half_tree, w.local_action, w.fixes_half_tree, w.in_g, w.in_u
            ));
        }
        if let Some(p) = &self.pair {
            line(format!("a = {}", p.a));
            line(format!("b = {}", p.b));
            line(format!("ab = ba: {}", p.commute));
        }
        if let Some(o) = &self.orbit {
            line(format!(
                "orbit of {}: {} points (word length {}, depth {}, {} generators)",
                o.xi, o.points, o.word_length, o.depth, o.generator_count
            ));
        }
        if let Some(s) = &self.disjoint_support {
            line(format!(
                "disjoint support: {} (moved by a: {}, by b: {})",
                s.holds(),
                s.moved_by_a,
                s.moved_by_b
            ));
        }
        if let Some(a) = &self.annihilation {
            line(format!("annihilation: {}/{} points pass", a.passed, a.passed + a.failed));
        }
        for c in &self.caveats {
            line(format!("caveat: {c}"));
        }
        out
    }
}
