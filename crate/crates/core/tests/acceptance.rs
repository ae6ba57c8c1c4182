//! Acceptance suite: ten criteria, each timed against its limit. Prints one
//! PASS/FAIL line per criterion and exits non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use arboreal::dynamics::{apply_to_periodic, classify_isometry, IsometryType};
use arboreal::obstruction::{
    disjoint_pair, disjoint_support_report, half_tree_fixator_element, k_filtration_check,
    operator_annihilation_check, orbit_truncate, thm_c_witness, FiltrationReport,
};
use arboreal::perm::{
    check_freeness, stabilizers_are_conjugates_of_top, wreath_embedding_spec, FiniteGroup, PermGroupSpec, Permutation,
};
use arboreal::piecewise::{free_product_witness, pw_identification_check, FreeProductTree, RegularTree, TreeSpace};
use arboreal::portrait::{enumerate_elements, random_element, GroupClass, TreeAutomorphism};
use arboreal::presets::{preset, Resolved};
use arboreal::tree::{Color, DirectedEdge, EndPoint, HalfTree, PeriodicEnd, Vertex};

use common::{ball, beyond, displacement, sigma_oracle};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn alt3() -> PermGroupSpec {
    PermGroupSpec::alternating(3)
}

fn sym3() -> PermGroupSpec {
    PermGroupSpec::symmetric(3)
}

fn prescribed(name: &str) -> (PermGroupSpec, PermGroupSpec) {
    match preset(name).unwrap().resolve().unwrap() {
        Resolved::Prescribed { f, fp } => (f, fp),
        Resolved::FreeProduct(_) => unreachable!(),
    }
}

const C3: [Color; 3] = [0, 1, 2];

fn group_axioms() -> Outcome {
    let class = GroupClass::GofFFp(alt3(), sym3());
    let els: Vec<TreeAutomorphism> = (0..500u64)
        .map(|s| random_element(&class, (s % 4) as usize, s).unwrap())
        .collect();
    let e = TreeAutomorphism::identity(class.omega());
    let b3 = ball(&Vertex::root(), 3, &C3);
    for i in 0..els.len() {
        let (g, h, k) = (&els[i], &els[(i + 1) % 500], &els[(i + 2) % 500]);
        check(g.compose(h).compose(k) == g.compose(&h.compose(k)), || format!("associativity at {i}"))?;
        check(e.compose(g) == *g && g.compose(&e) == *g, || format!("identity at {i}"))?;
        let gi = g.inverse();
        check(g.compose(&gi).is_identity() && gi.compose(g).is_identity(), || format!("inverse at {i}"))?;
        let gh = g.compose(h);
        for v in &b3 {
            let hv = h.evaluate(v);
            check(gh.evaluate(v) == g.evaluate(&hv), || format!("composition at {i}, {v}"))?;
            let lhs = gh.local_action(v);
            let rhs = g.local_action(&hv).compose(h.local_action(v));
            check(*lhs == rhs, || format!("cocycle at {i}, {v}"))?;
            let oracle = sigma_oracle(&gh, v, &C3);
            check(C3.iter().all(|&c| lhs.apply(c) == oracle[c as usize]), || format!("local action oracle at {i}, {v}"))?;
        }
    }
    Ok("500 elements, cocycle on radius-3 balls".into())
}

fn edge_fixators() -> Outcome {
    let f = alt3();
    let (v0, x0) = (Vertex::root(), Vertex::walk(&[0]));
    let mut total = 0;
    for r in 0..=2 {
        let all = enumerate_elements(&GroupClass::UofF(f.clone()), r, 2, 1_000_000).map_err(|e| e.to_string())?;
        total += all.len();
        for g in all.iter().filter(|g| g.evaluate(&v0) == v0 && g.evaluate(&x0) == x0) {
            check(g.is_identity(), || format!("non-trivial edge fixer {g}"))?;
            check(ball(&v0, 4, &C3).iter().all(|x| g.evaluate(x) == *x), || "survivor moves a vertex".into())?;
        }
    }
    // independent count: consistent assignments of Alt(3) to ball(2) with
    // σ(v0) fixing the color 0
    let alt: Vec<Vec<Color>> = f
        .elements()
        .unwrap()
        .iter()
        .map(|p| C3.iter().map(|&c| p.apply(c)).collect())
        .collect();
    let b2: Vec<Vertex> = {
        let mut b = ball(&v0, 2, &C3);
        b.sort_by_key(|v| v.depth());
        b
    };
    let mut count = 0usize;
    let mut nontrivial = 0usize;
    let mut stack: Vec<usize> = Vec::new();
    fn consistent(b2: &[Vertex], alt: &[Vec<Color>], stack: &[usize]) -> bool {
        let i = stack.len() - 1;
        let v = &b2[i];
        match v.parent() {
            None => alt[stack[0]][0] == 0,
            Some(p) => {
                let j = b2.iter().position(|u| *u == p).unwrap();
                let c = v.last().unwrap() as usize;
                alt[stack[i]][c] == alt[stack[j]][c]
            }
        }
    }
    fn walk(
        b2: &[Vertex],
        alt: &[Vec<Color>],
        stack: &mut Vec<usize>,
        count: &mut usize,
        nontrivial: &mut usize,
    ) {
        if stack.len() == b2.len() {
            *count += 1;
            if stack.iter().any(|&k| alt[k] != C3) {
                *nontrivial += 1;
            }
            return;
        }
        for k in 0..alt.len() {
            stack.push(k);
            if consistent(b2, alt, stack) {
                walk(b2, alt, stack, count, nontrivial);
            }
            stack.pop();
        }
    }
    walk(&b2, &alt, &mut stack, &mut count, &mut nontrivial);
    check(count == 1 && nontrivial == 0, || format!("oracle found {count} local patterns"))?;
    Ok(format!("{total} enumerated elements"))
}

fn torsion_free() -> Outcome {
    let f = PermGroupSpec::z_translations();
    let class = GroupClass::GofFFpStar(f.clone(), f);
    let window: Vec<Color> = (-5..=5).collect();
    let probe = ball(&Vertex::root(), 2, &window);
    let mut nontrivial = 0;
    for s in 0..200u64 {
        let g = random_element(&class, (s % 3) as usize, s).map_err(|e| e.to_string())?;
        if g.is_identity() {
            continue;
        }
        nontrivial += 1;
        let mut p = g.clone();
        for k in 1..=20u32 {
            check(!p.is_identity(), || format!("g^{k} = 1 for {g}"))?;
            check(probe.iter().any(|x| p.evaluate(x) != *x), || format!("g^{k} fixes the probe ball for {g}"))?;
            p = p.compose(&g);
        }
    }
    check(nontrivial >= 150, || format!("only {nontrivial} non-trivial samples"))?;
    Ok(format!("{nontrivial} non-trivial elements"))
}

fn witness_holds(name: &str) -> Result<(), String> {
    let (f, fp) = prescribed(name);
    let colors = f.omega().colors().unwrap();
    let h = HalfTree::at(Vertex::root(), 0);
    let g = thm_c_witness(&f, &fp, &h).map_err(|e| e.to_string())?;
    check(ball(&Vertex::root(), 2, &colors).iter().any(|x| g.evaluate(x) != *x), || "identity".into())?;
    check(beyond(&Vertex::root(), 0, 4, &colors).iter().all(|x| g.evaluate(x) == *x), || "moves H".into())?;
    let tail = sigma_oracle(&g, &Vertex::root(), &colors);
    let tail = Permutation::from_images(tail.iter().map(|&c| c as u32).collect()).unwrap();
    check(!f.contains(&tail) && fp.contains(&tail), || format!("local action {tail} at v0"))?;
    check(g.membership(&GroupClass::GofFFp(f.clone(), fp.clone())) == Ok(true), || "not in G(F,F')".into())?;
    check(g.membership(&GroupClass::UofF(f.clone())) == Ok(false), || "in U(F)".into())?;
    Ok(())
}

fn thm_c(name: &'static str) -> impl Fn() -> Outcome {
    move || witness_holds(name).map(|_| name.to_string())
}

fn convolution() -> Outcome {
    let (f, fp) = (alt3(), sym3());
    let edge = DirectedEdge::new(Vertex::root(), 0);
    let (a, b) = disjoint_pair(&f, &fp, &edge).map_err(|e| e.to_string())?;
    check(a.commutes_with(&b), || "ab ≠ ba".into())?;
    check(
        ball(&Vertex::root(), 5, &C3).iter().all(|x| a.evaluate(&b.evaluate(x)) == b.evaluate(&a.evaluate(x))),
        || "ab ≠ ba on ball(5)".into(),
    )?;
    let mut gens = vec![
        TreeAutomorphism::from_constant(Permutation::identity(f.omega()), Vertex::walk(&[0])),
        TreeAutomorphism::from_constant(Permutation::from_cycles(3, &[&[0, 2, 1]]).unwrap(), Vertex::walk(&[0, 1])),
        a.clone(),
        b.clone(),
    ];
    gens.extend(gens.clone().iter().map(TreeAutomorphism::inverse));
    let xi = PeriodicEnd::new(vec![], vec![0, 1]).unwrap();
    let orbit = orbit_truncate(&gens, &EndPoint::Periodic(xi), 3, 16).map_err(|e| e.to_string())?;
    let support = disjoint_support_report(&a, &b, &orbit);
    check(support.holds(), || "support overlap".into())?;
    let ann = operator_annihilation_check(&a, &b, &orbit);
    check(ann.holds() && ann.failed == 0, || format!("{} failures", ann.failed))?;
    // oracle: images of deep vertices on each end, truncated to depth 16
    let image = |g: &TreeAutomorphism, e: &PeriodicEnd| -> Vec<Color> {
        let w = g.evaluate(&Vertex::walk(&e.ray(40)));
        w.word()[..16].to_vec()
    };
    for p in &orbit.points {
        let eta = p.end.ray(16);
        let (ae, be, abe) = (image(&a, &p.end), image(&b, &p.end), image(&a.compose(&b), &p.end));
        let mut lhs = vec![eta.clone(), abe];
        let mut rhs = vec![ae.clone(), be.clone()];
        lhs.sort();
        rhs.sort();
        check(lhs == rhs, || format!("identity fails at {}", p.end))?;
        check(ae == eta || be == eta, || format!("{} moved by both", p.end))?;
        check(apply_to_periodic(&a, &p.end).ray(16) == ae, || "end image disagrees".into())?;
    }
    Ok(format!("{} orbit points, all pass", orbit.points.len()))
}

fn classification() -> Outcome {
    let classes = [
        GroupClass::GofFFp(alt3(), sym3()),
        GroupClass::UofF(alt3()),
        GroupClass::GofFFpStar(alt3(), sym3()),
        GroupClass::GofFFp(PermGroupSpec::cyclic_shift(5), PermGroupSpec::alternating(5)),
    ];
    let mut tally = [0usize; 3];
    for s in 0..200u64 {
        let class = &classes[(s % 4) as usize];
        let colors = class.omega().colors().unwrap();
        let g = random_element(class, (s % 3) as usize, 1000 + s).map_err(|e| e.to_string())?;
        let r = g.base_image().depth() + 2;
        let (m, flip) = displacement(&g, r, &colors);
        let ty = classify_isometry(&g);
        let ok = match &ty {
            IsometryType::Elliptic { fixed_vertex } => {
                tally[0] += 1;
                m == 0 && g.evaluate(fixed_vertex) == *fixed_vertex
            }
            IsometryType::Inversion { edge } => {
                tally[1] += 1;
                m == 1 && flip && g.evaluate(&edge.tail) == edge.head() && g.evaluate(&edge.head()) == edge.tail
            }
            IsometryType::Hyperbolic { length, .. } => {
                tally[2] += 1;
                *length == m && m > 0 && !flip
            }
        };
        check(ok, || format!("{ty} but brute force gives displacement {m}, flip {flip}, for {g}"))?;
    }
    check(tally.iter().all(|&t| t > 0), || format!("types seen {tally:?}"))?;
    Ok(format!("elliptic {}, inversion {}, hyperbolic {}", tally[0], tally[1], tally[2]))
}

fn pw_identification() -> Outcome {
    let class = GroupClass::GofFFp(alt3(), sym3());
    let space = RegularTree { omega: class.omega() };
    let b5 = ball(&Vertex::root(), 5, &C3);
    for s in 0..100u64 {
        let g = random_element(&class, (s % 4) as usize, 5000 + s).map_err(|e| e.to_string())?;
        let pw = pw_identification_check(&g, &alt3()).map_err(|e| format!("{g}: {e}"))?;
        pw.validate(&space).map_err(|e| format!("{g}: {e}"))?;
        for piece in pw.pieces.values() {
            check(piece.membership(&GroupClass::UofF(alt3())) == Ok(true), || "piece outside U(F)".into())?;
        }
        for x in &b5 {
            check(pw.evaluate(&space, x) == g.evaluate(x), || format!("disagree at {x} for {g}"))?;
        }
    }
    Ok("100 elements agree on radius-5 balls".into())
}

fn pw_witness() -> Outcome {
    let t = FreeProductTree::psl2z();
    let w = free_product_witness(&t).map_err(|e| e.to_string())?;
    w.validate(&t).map_err(|e| e.to_string())?;
    let moved = t.ball(&t.root(), 4).iter().filter(|x| w.evaluate(&t, x) != **x).count();
    check(moved > 0 && !w.is_identity(&t), || "witness is the identity".into())?;
    let fixed_edge = w
        .pieces
        .iter()
        .find(|(_, g)| g.is_empty())
        .map(|(e, _)| e.clone())
        .ok_or("no identity piece")?;
    let (v, u) = fixed_edge;
    let half: Vec<_> = t
        .ball(&u, 6)
        .into_iter()
        .filter(|x| t.distance(&v, x) == t.distance(&u, x) + 1)
        .collect();
    check(half.iter().all(|x| w.evaluate(&t, x) == *x), || "half-tree moved".into())?;
    Ok(format!("moves {moved} vertices of ball(4), fixes {} vertices beyond {u}", half.len()))
}

fn k_filtration() -> Outcome {
    let (f, fp) = (alt3(), sym3());
    let h = HalfTree::at(Vertex::root(), 0);
    let k0 = k_filtration_check(&f, &fp, &h, 0).map_err(|e| e.to_string())?;
    match &k0 {
        FiltrationReport::Level0 { edge_fixers, only_identity, .. } => {
            check(*only_identity && *edge_fixers == 1, || format!("{k0:?}"))?
        }
        _ => return Err("wrong level".into()),
    }
    let k1 = k_filtration_check(&f, &fp, &h, 1).map_err(|e| e.to_string())?;
    check(k1.holds(), || format!("{k1:?}"))?;
    let stab: Vec<&Permutation> = fp.elements().unwrap().iter().filter(|p| p.fixes(0)).collect();
    check(stab.len() == 2, || "F'_0 has order 2".into())?;
    for tau in stab {
        let g = half_tree_fixator_element(&f, tau, &h).map_err(|e| e.to_string())?;
        let s = sigma_oracle(&g, &Vertex::root(), &C3);
        check(C3.iter().all(|&c| tau.apply(c) == s[c as usize]), || format!("{tau} not hit"))?;
        check(beyond(&Vertex::root(), 0, 4, &C3).iter().all(|x| g.evaluate(x) == *x), || "moves H".into())?;
        check(g.membership(&GroupClass::GofFFp(f.clone(), fp.clone())) == Ok(true), || "outside G".into())?;
    }
    Ok("K0 trivial, K1 onto F'_0 = {id, (1 2)}".into())
}

fn wreath() -> Outcome {
    for (ng, na) in [(2, 2), (3, 2), (2, 3)] {
        let w = wreath_embedding_spec(&FiniteGroup::cyclic(ng), &FiniteGroup::cyclic(na)).map_err(|e| e.to_string())?;
        let n = ng.pow(na as u32);
        let f = w.f.elements().unwrap();
        let fp = w.fp.elements().unwrap();
        check(w.f.omega().degree() == Some(n) && f.len() == n, || format!("|F| for ({ng},{na})"))?;
        let omega: Vec<Color> = (0..n as Color).collect();
        check(
            f.iter().filter(|p| !p.is_identity()).all(|p| omega.iter().all(|&x| p.apply(x) != x)),
            || "F not free".into(),
        )?;
        let orbit: std::collections::BTreeSet<Color> = f.iter().map(|p| p.apply(0)).collect();
        check(orbit.len() == n, || "F not transitive".into())?;
        let distinct: std::collections::BTreeSet<&Permutation> = fp.iter().collect();
        check(distinct.len() == n * na && fp.len() == n * na, || "F' not faithful".into())?;
        check(w.f.is_subgroup_of(&w.fp), || "F ⊄ F'".into())?;
        let stab = |x: Color| -> std::collections::BTreeSet<Permutation> {
            fp.iter().filter(|p| p.fixes(x)).cloned().collect()
        };
        let s0 = stab(0);
        check(s0.len() == na, || "stabilizer order".into())?;
        for &x in &omega {
            let pi = f.iter().find(|p| p.apply(0) == x).unwrap();
            let conj: std::collections::BTreeSet<Permutation> =
                s0.iter().map(|s| pi.compose(s).compose(&pi.inverse())).collect();
            check(conj == stab(x), || format!("stabilizer of {x}"))?;
        }
        check(check_freeness(&w.f) && stabilizers_are_conjugates_of_top(&w), || "library checks".into())?;
    }
    Ok("(Z2,Z2), (Z3,Z2), (Z2,Z3)".into())
}

struct Criterion {
    id: &'static str,
    name: &'static str,
    limit: Duration,
    run: Box<dyn Fn() -> Outcome>,
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = vec![
        Criterion { id: "1", name: "group axioms and cocycle identity", limit: secs(10), run: Box::new(group_axioms) },
        Criterion { id: "2", name: "edge fixators in U(F) are trivial", limit: secs(30), run: Box::new(edge_fixators) },
        Criterion { id: "3", name: "U(F)* over the integers is torsion free", limit: secs(30), run: Box::new(torsion_free) },
        Criterion { id: "4a", name: "half-tree witness, (Alt(3), Sym(3))", limit: secs(5), run: Box::new(thm_c("g-alt3-sym3")) },
        Criterion { id: "4b", name: "half-tree witness, (C5, Alt(5))", limit: secs(5), run: Box::new(thm_c("cycle5-alt5")) },
        Criterion { id: "4c", name: "half-tree witness, wreath (Z2, Z2)", limit: secs(5), run: Box::new(thm_c("wreath-z2-z2")) },
        Criterion { id: "5", name: "convolution identity on the orbit of (01)^∞", limit: secs(60), run: Box::new(convolution) },
        Criterion { id: "6", name: "isometry classification vs brute force", limit: secs(60), run: Box::new(classification) },
        Criterion { id: "7", name: "piecewise identification round trip", limit: secs(60), run: Box::new(pw_identification) },
        Criterion { id: "8", name: "piecewise witness over Z/2 * Z/3", limit: secs(5), run: Box::new(pw_witness) },
        Criterion { id: "9", name: "K-filtration levels 0 and 1", limit: secs(30), run: Box::new(k_filtration) },
        Criterion { id: "10", name: "wreath embeddings", limit: secs(10), run: Box::new(wreath) },
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(|| (c.run)())).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > c.limit => Err(format!("{detail}; over the {:?} limit", c.limit)),
            other => other,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d.clone()),
            Err(e) => {
                failed += 1;
                ("FAIL", e.clone())
            }
        };
        println!(
            "{tag} criterion {}: {} ({:.2}s, limit {}s) {detail}",
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
    }
    println!("acceptance: {} of {} passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
