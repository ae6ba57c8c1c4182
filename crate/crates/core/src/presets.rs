//! Group sources: named presets and explicit descriptions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::{wreath_embedding_spec, FiniteGroup, PermError, PermGroupSpec, Permutation};
use crate::piecewise::FreeProductTree;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("unknown preset {0:?} (known: {known})", known = PRESETS.join(", "))]
    UnknownPreset(String),
    #[error("group {0} needs a finite degree")]
    MissingDegree(&'static str),
    #[error("{0}")]
    Invalid(String),
    #[error("F and F' act on different color sets")]
    DomainMismatch,
    #[error("{0} describes a free product; it has no certificate pipeline")]
    NotPrescribed(String),
    #[error(transparent)]
    Perm(#[from] PermError),
}

pub const PRESETS: &[&str] = &[
    "g-alt3-sym3",
    "cycle5-alt5",
    "wreath-z2-z2",
    "wreath-z3-z2",
    "wreath-z2-z3",
    "z-translations",
    "degenerate",
    "psl2z",
];

/// A permutation group in a config file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GroupDesc {
    Symmetric,
    Alternating,
    /// Generated by the cycle `(0 1 … d-1)`.
    Cyclic,
    Trivial,
    /// Generated by the given image tables.
    Generated { generators: Vec<Vec<u32>> },
    Translations,
    FinitaryAffine,
}

/// Where the groups of a run come from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum GroupSource {
    Preset {
        name: String,
    },
    /// `F ≤ F'` on `{0, …, degree-1}`, or on the integers when `degree` is
    /// absent.
    Explicit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        degree: Option<usize>,
        f: GroupDesc,
        fp: GroupDesc,
    },
    /// `F = Γ^A ≤ F' = Γ ≀ A`, from multiplication tables.
    Wreath {
        gamma: FiniteGroup,
        a: FiniteGroup,
    },
    FreeProduct {
        a: FiniteGroup,
        b: FiniteGroup,
    },
}

/// Groups ready for computation.
#[derive(Clone, Debug)]
pub enum Resolved {
    Prescribed {
        f: PermGroupSpec,
        fp: PermGroupSpec,
    },
    FreeProduct(FreeProductTree),
}

/// The source a preset name stands for.
pub fn preset(name: &str) -> Result<GroupSource, ConfigError> {
    let explicit = |degree, f, fp| GroupSource::Explicit {
        degree: Some(degree),
        f,
        fp,
    };
    let wreath = |g, a| GroupSource::Wreath {
        gamma: FiniteGroup::cyclic(g),
        a: FiniteGroup::cyclic(a),
    };
    Ok(match name {
        "g-alt3-sym3" => explicit(3, GroupDesc::Alternating, GroupDesc::Symmetric),
        "cycle5-alt5" => explicit(5, GroupDesc::Cyclic, GroupDesc::Alternating),
        "wreath-z2-z2" => wreath(2, 2),
        "wreath-z3-z2" => wreath(3, 2),
        "wreath-z2-z3" => wreath(2, 3),
        "z-translations" => GroupSource::Explicit {
            degree: None,
            f: GroupDesc::Translations,
            fp: GroupDesc::FinitaryAffine,
        },
        "degenerate" => explicit(3, GroupDesc::Alternating, GroupDesc::Alternating),
        "psl2z" => GroupSource::FreeProduct {
            a: FiniteGroup::cyclic(2),
            b: FiniteGroup::cyclic(3),
        },
        _ => return Err(ConfigError::UnknownPreset(name.into())),
    })
}

fn build_group(desc: &GroupDesc, degree: Option<usize>) -> Result<PermGroupSpec, ConfigError> {
    let need = |what| degree.ok_or(ConfigError::MissingDegree(what));
    Ok(match desc {
        GroupDesc::Symmetric => PermGroupSpec::symmetric(need("symmetric")?),
        GroupDesc::Alternating => PermGroupSpec::alternating(need("alternating")?),
        GroupDesc::Cyclic => PermGroupSpec::cyclic_shift(need("cyclic")?),
        GroupDesc::Trivial => PermGroupSpec::trivial(need("trivial")?),
        GroupDesc::Generated { generators } => {
            let d = need("generated")?;
            let gens = generators
                .iter()
                .map(|t| Permutation::from_images(t.clone()))
                .collect::<Result<Vec<_>, _>>()?;
            PermGroupSpec::generated(format!("<{} generators>", gens.len()), d, &gens)?
        }
        GroupDesc::Translations => PermGroupSpec::z_translations(),
        GroupDesc::FinitaryAffine => PermGroupSpec::z_finitary_affine(),
    })
}

impl GroupSource {
    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        match self {
            GroupSource::Preset { name } => preset(name)?.resolve(),
            GroupSource::Explicit { degree, f, fp } => {
                if degree.is_some_and(|d| d < 3) {
                    return Err(ConfigError::Invalid("degree must be at least 3".into()));
                }
                let f = build_group(f, *degree)?;
                let fp = build_group(fp, *degree)?;
                if f.omega() != fp.omega() {
                    return Err(ConfigError::DomainMismatch);
                }
                Ok(Resolved::Prescribed { f, fp })
            }
            GroupSource::Wreath { gamma, a } => {
                let w = wreath_embedding_spec(gamma, a)?;
                Ok(Resolved::Prescribed { f: w.f, fp: w.fp })
            }
            GroupSource::FreeProduct { a, b } => Ok(Resolved::FreeProduct(FreeProductTree::new(a.clone(), b.clone()))),
        }
    }

    /// A short description for reports.
    pub fn label(&self) -> String {
        match self {
            GroupSource::Preset { name } => name.clone(),
            GroupSource::Explicit { .. } => "explicit".into(),
            GroupSource::Wreath { gamma, a } => format!("wreath Z/{}, Z/{}", gamma.order(), a.order()),
            GroupSource::FreeProduct { a, b } => format!("free product of orders {}, {}", a.order(), b.order()),
        }
    }
}
