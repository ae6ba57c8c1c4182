use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use arboreal::certificate::{build_certificate, symmetrize, uf_generators, CertConfig, EndSpec};
use arboreal::dynamics::{classify_isometry, fixes_half_tree_pointwise};
use arboreal::obstruction::{disjoint_pair, orbit_truncate, thm_c_witness};
use arboreal::perm::PermGroupSpec;
use arboreal::piecewise::{free_product_witness, FreeProductTree, TreeSpace};
use arboreal::portrait::{GroupClass, TreeAutomorphism};
use arboreal::presets::{GroupSource, Resolved, PRESETS};
use arboreal::tree::{DirectedEdge, EndPoint, HalfTree, PeriodicEnd};

#[derive(Parser)]
#[command(name = "arboreal")]
#[command(about = "Certificates and witnesses for groups acting on colored trees")]
#[command(version)]
struct Cli {
    /// Named group pair
    #[arg(long, global = true)]
    preset: Option<String>,

    /// Run configuration (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Longest generator word used for the orbit
    #[arg(long, global = true)]
    word_length: Option<usize>,

    /// Truncation depth for ends
    #[arg(long, global = true)]
    depth: Option<usize>,

    /// Seed for the randomized spot checks
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Where to write the output artifact
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write an arboreal-cert/1 certificate
    Certify,
    /// Classify one element and report its memberships
    Classify {
        /// Element as a serialized portrait (TOML)
        #[arg(long, conflicts_with = "word")]
        element: Option<PathBuf>,
        /// Product of generators: s (edge inversion), t (translation),
        /// a, b (disjoint pair), w (half-tree witness); uppercase inverts,
        /// `1` is the identity
        #[arg(long)]
        word: Option<String>,
    },
    /// List the truncated orbit of the base end
    Orbit,
    /// Print the half-tree fixator witness (piecewise witness for free products)
    Witness,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    preset: Option<String>,
    groups: Option<GroupSource>,
    edge: Option<DirectedEdge>,
    xi: Option<EndSpec>,
    word_length: Option<usize>,
    depth: Option<usize>,
    search_len: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

/// Problems that end the run with exit status 2.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn load(cli: &Cli) -> Result<(CertConfig, Option<PathBuf>), Usage> {
    let file: RunConfig = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    let source = match (cli.preset.as_ref().or(file.preset.as_ref()), file.groups) {
        (Some(_), Some(_)) => return Err(Usage("give either a preset or [groups], not both".into())),
        (Some(name), None) => {
            if !PRESETS.contains(&name.as_str()) {
                return Err(Usage(format!("unknown preset {name:?} (known: {})", PRESETS.join(", "))));
            }
            GroupSource::Preset { name: name.clone() }
        }
        (None, Some(g)) => g,
        (None, None) => return Err(Usage("no group source: use --preset or a config with [groups]".into())),
    };
    let mut config = CertConfig::new(source);
    if let Some(e) = file.edge {
        config.edge = e;
    }
    config.xi = file.xi;
    config.word_length = cli.word_length.or(file.word_length).unwrap_or(config.word_length);
    config.depth = cli.depth.or(file.depth).unwrap_or(config.depth);
    config.search_len = file.search_len.unwrap_or(config.search_len);
    config.seed = cli.seed.or(file.seed).unwrap_or(config.seed);
    if config.word_length == 0 || config.depth == 0 || config.search_len == 0 {
        return Err(Usage("word_length, depth and search_len must be positive".into()));
    }
    Ok((config, cli.out.clone().or(file.out)))
}

fn prescribed(config: &CertConfig) -> Result<(PermGroupSpec, PermGroupSpec), Usage> {
    match config.groups.resolve()? {
        Resolved::Prescribed { f, fp } => Ok((f, fp)),
        Resolved::FreeProduct(_) => Err(Usage(format!("{} is a free product; only `witness` applies", config.groups.label()))),
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Usage> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn certify(config: &CertConfig, out: &Option<PathBuf>) -> Result<bool, Usage> {
    let cert = build_certificate(config)?;
    print!("{}", cert.report());
    let text = cert.to_text()?;
    if out.is_none() {
        println!();
    }
    emit(&text, out)?;
    Ok(cert.is_valid())
}

fn parse_word(
    word: &str,
    f: &PermGroupSpec,
    fp: &PermGroupSpec,
    edge: &DirectedEdge,
) -> Result<Result<TreeAutomorphism, String>, Usage> {
    let base = uf_generators(f);
    let mut g = TreeAutomorphism::identity(f.omega());
    for ch in word.chars().filter(|c| !c.is_whitespace()) {
        let h = match ch.to_ascii_lowercase() {
            '1' => continue,
            's' => base[0].clone(),
            't' => base[1].clone(),
            'a' | 'b' => match disjoint_pair(f, fp, edge) {
                Ok((a, b)) => if ch.eq_ignore_ascii_case(&'a') { a } else { b },
                Err(e) => return Ok(Err(format!("no disjoint pair: {e}"))),
            },
            'w' => match thm_c_witness(f, fp, &HalfTree::new(edge.clone())) {
                Ok(w) => w,
                Err(e) => return Ok(Err(format!("no witness: {e}"))),
            },
            other => return Err(Usage(format!("unknown generator {other:?} in word"))),
        };
        let h = if ch.is_ascii_uppercase() { h.inverse() } else { h };
        g = g.compose(&h);
    }
    Ok(Ok(g))
}

fn classify(
    config: &CertConfig,
    element: &Option<PathBuf>,
    word: &Option<String>,
    out: &Option<PathBuf>,
) -> Result<bool, Usage> {
    let (f, fp) = prescribed(config)?;
    let g = match (element, word) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
            let g: TreeAutomorphism = toml::from_str(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
            if g.omega() != f.omega() {
                return Err(Usage(format!("element acts on {}, groups on {}", g.omega(), f.omega())));
            }
            g
        }
        (None, Some(w)) => match parse_word(w, &f, &fp, &config.edge)? {
            Ok(g) => g,
            Err(msg) => {
                println!("{msg}");
                return Ok(false);
            }
        },
        (None, None) => return Err(Usage("classify needs --element or --word".into())),
    };
    let ty = classify_isometry(&g);
    let classes = [
        ("U(F)", GroupClass::UofF(f.clone())),
        ("G(F,F')", GroupClass::GofFFp(f.clone(), fp.clone())),
        ("G(F,F')*", GroupClass::GofFFpStar(f.clone(), fp.clone())),
    ];
    let mut report = String::new();
    let _ = writeln!(report, "element: {g}");
    let _ = writeln!(report, "type: {ty}");
    let _ = writeln!(report, "translation length: {}", ty.translation_length());
    let mut flags = Vec::new();
    for (name, class) in &classes {
        let m = g.membership(class)?;
        flags.push((name, m));
        let _ = writeln!(report, "{name}: {}", if m { "member" } else { "not a member" });
    }
    let summary = if flags.iter().all(|(_, m)| *m) {
        "member of all classes".to_string()
    } else {
        let (yes, no): (Vec<_>, Vec<_>) = flags.iter().partition(|(_, m)| *m);
        let join = |v: &[&(&&str, bool)]| v.iter().map(|(n, _)| **n).collect::<Vec<_>>().join(", ");
        match (yes.is_empty(), no.is_empty()) {
            (true, _) => "member of no class".to_string(),
            _ => format!("in {}, not in {}", join(&yes), join(&no)),
        }
    };
    let _ = writeln!(report, "{}; {summary}", ty.kind());
    emit(&report, out)?;
    Ok(true)
}

fn orbit(config: &CertConfig, out: &Option<PathBuf>) -> Result<bool, Usage> {
    let (f, fp) = prescribed(config)?;
    let mut gens = uf_generators(&f);
    let mut notes = String::new();
    match disjoint_pair(&f, &fp, &config.edge) {
        Ok((a, b)) => gens.extend([a, b]),
        Err(e) => {
            let _ = writeln!(notes, "note: no disjoint pair ({e}); using the U(F) generators only");
        }
    }
    let gens = symmetrize(&gens);
    let xi = match &config.xi {
        Some(x) => PeriodicEnd::new(x.prefix.clone(), x.period.clone())?,
        None => PeriodicEnd::new(vec![], vec![0, 1])?,
    };
    let orbit = orbit_truncate(&gens, &EndPoint::Periodic(xi.clone()), config.word_length, config.depth)?;
    let mut report = notes;
    let _ = writeln!(
        report,
        "orbit of {xi}: {} points, word length {}, depth {} ({} generators)",
        orbit.points.len(),
        orbit.word_length,
        orbit.depth,
        gens.len()
    );
    if let Some(w) = &orbit.warning {
        let _ = writeln!(report, "warning: {w}");
    }
    for p in &orbit.points {
        let word: Vec<String> = p.word.iter().map(|i| i.to_string()).collect();
        let prefix: String = p.prefix.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        let _ = writeln!(report, "[{}] {} | {}", word.join(" "), p.end, prefix);
    }
    emit(&report, out)?;
    Ok(true)
}

fn witness(config: &CertConfig, out: &Option<PathBuf>) -> Result<bool, Usage> {
    let mut report = String::new();
    let ok = match config.groups.resolve()? {
        Resolved::FreeProduct(t) => free_product_report(&t, &mut report),
        Resolved::Prescribed { f, fp } => {
            let h = HalfTree::new(config.edge.clone());
            match thm_c_witness(&f, &fp, &h) {
                Ok(g) => {
                    let fixes = fixes_half_tree_pointwise(&g, &h);
                    let in_g = g.membership(&GroupClass::GofFFp(f.clone(), fp.clone()))?;
                    let in_u = g.membership(&GroupClass::UofF(f.clone()))?;
                    // the summary is commented so the whole output parses as a portrait
                    let _ = writeln!(report, "# half-tree: {h}");
                    let _ = writeln!(report, "# witness: {g}");
                    let _ = writeln!(report, "# non-identity: {}", !g.is_identity());
                    let _ = writeln!(report, "# fixes half-tree: {fixes}");
                    let _ = writeln!(report, "# in G(F,F'): {in_g}");
                    let _ = writeln!(report, "# in U(F): {in_u}");
                    report.push_str(&toml::to_string(&g)?);
                    !g.is_identity() && fixes && in_g && !in_u
                }
                Err(e) => {
                    let _ = writeln!(report, "no witness: {e}");
                    false
                }
            }
        }
    };
    emit(&report, out)?;
    Ok(ok)
}

fn free_product_report(t: &FreeProductTree, report: &mut String) -> bool {
    match free_product_witness(t) {
        Ok(w) => {
            let valid = w.validate(t);
            let _ = writeln!(report, "piecewise witness on the tree of Z/{} * Z/{}", t.a.order(), t.b.order());
            for v in &w.subtree {
                let _ = writeln!(report, "subtree vertex {v} -> {}", w.map[v]);
            }
            for ((v, u), g) in &w.pieces {
                let _ = writeln!(report, "piece ({v}, {u}): {g}");
            }
            let identity = w.is_identity(t);
            let fixed = w
                .pieces
                .iter()
                .filter(|(_, g)| g.is_empty())
                .map(|((v, u), _)| format!("({v}, {u})"))
                .collect::<Vec<_>>();
            let _ = writeln!(report, "valid: {}", valid.is_ok());
            if let Err(e) = &valid {
                let _ = writeln!(report, "  {e}");
            }
            let _ = writeln!(report, "non-identity: {}", !identity);
            let _ = writeln!(report, "fixes the half-trees beyond {}", fixed.join(", "));
            let moved = t.ball(&t.root(), 4).iter().filter(|x| w.evaluate(t, x) != **x).count();
            let _ = writeln!(report, "vertices moved in ball(4): {moved}");
            valid.is_ok() && !identity && !fixed.is_empty()
        }
        Err(e) => {
            let _ = writeln!(report, "no witness: {e}");
            false
        }
    }
}

/// Runs one subcommand. `Ok(false)` means the run completed but its
/// certificate or witness is invalid.
fn run(cli: &Cli) -> Result<bool, Usage> {
    let (config, out) = load(cli)?;
    match &cli.command {
        Command::Certify => certify(&config, &out),
        Command::Classify { element, word } => classify(&config, element, word, &out),
        Command::Orbit => orbit(&config, &out),
        Command::Witness => witness(&config, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
