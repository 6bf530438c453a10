//! Acceptance criteria 1–9, one PASS/FAIL line each.
//!
//! Run with `cargo test -p cyclic-qgr --test acceptance -- --nocapture` to
//! see the report. Reference data for the three-vertex example is written
//! in the notation `t_0, t_1, t_2, t_3` and translated here: `t_0` is the
//! loop-rotation variable, and `t_k` is first read as `t[k-1][1]` before the
//! label convention search picks the actual cyclic renaming.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use cyclic_qgr::cohomology::DualBasis;
use cyclic_qgr::exactalg::{Character, Polynomial, VarId};
use cyclic_qgr::fixpoints::{
    decode_ending_set, enumerate_fixed_points, reduce_n, transport_single_block, MovablePart,
};
use cyclic_qgr::gkm::{part_mutations, GkmGraph, LabelConvention};
use cyclic_qgr::model::{Instance, VertexId};
use cyclic_qgr::verify::{
    check_abbv_classes, check_basis_properties, check_edges, check_fixed_points, check_graph_invariants,
    sample_pairs, AbbvMethod, DEFAULT_BUDGET, RATFUN_LIMIT,
};

/// Structure constants are checked on at most this many pairs per instance.
const MAX_PAIRS: usize = 100;

type Outcome = Result<String, String>;

fn inst(n: u32, blocks: &[u32]) -> Instance {
    Instance::new(n, blocks.to_vec()).unwrap()
}

fn partitions(total: u32, max: u32) -> Vec<Vec<u32>> {
    if total == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=total.min(max)).rev() {
        for mut rest in partitions(total - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every instance with `n ≤ 4` and total dimension `N ≤ 5`.
fn small_instances() -> Vec<Instance> {
    let mut out = Vec::new();
    for n in 1..=4 {
        for total in 1..=5 {
            for blocks in partitions(total, total) {
                out.push(Instance::new(n, blocks).unwrap());
            }
        }
    }
    out
}

fn point(g: &GkmGraph, ends: &[u32]) -> usize {
    let p = decode_ending_set(g.instance(), ends).unwrap();
    g.points().index_of(&p).unwrap()
}

/// `t_0` and `t_1..t_3` of the reference example.
fn reference_var(k: u32) -> VarId {
    if k == 0 {
        VarId::T0
    } else {
        VarId::rot(i64::from(k) - 1, 1, 3)
    }
}

/// A linear form such as `t_2+2t_0-t_1`.
fn linear(s: &str) -> Character {
    let mut terms = Vec::new();
    let s = s.replace(' ', "");
    let mut rest = s.as_str();
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'-' => (-1, &rest[1..]),
            b'+' => (1, &rest[1..]),
            _ => (1, rest),
        };
        let end = body[1..].find(['+', '-']).map_or(body.len(), |i| i + 1);
        let (term, tail) = body.split_at(end);
        let (coeff, var) = term.split_once("t_").unwrap();
        let coeff: i64 = if coeff.is_empty() {
            1
        } else {
            coeff.parse().unwrap()
        };
        terms.push((reference_var(var.parse().unwrap()), sign * coeff));
        rest = tail;
    }
    Character::from_terms(terms)
}

/// A product of parenthesised linear forms, a single linear form, or `0`.
fn reference_poly(s: &str) -> Polynomial {
    match s.trim() {
        "0" => Polynomial::zero(),
        "1" => Polynomial::one(),
        s if s.starts_with('(') => s
            .trim_start_matches('(')
            .trim_end_matches(')')
            .split(")(")
            .map(|f| linear(f).to_polynomial())
            .fold(Polynomial::one(), |acc, f| acc.mul(&f)),
        s => linear(s).to_polynomial(),
    }
}

/// The nine labelled edges of the three-vertex example, by ending sets.
const REFERENCE_EDGES: [(&[u32], &[u32], &str); 9] = [
    (&[2], &[0, 2], "t_2+2t_0-t_1"),
    (&[0], &[0, 2], "t_1+t_0-t_2"),
    (&[0], &[0, 1], "t_3+2t_0-t_2"),
    (&[2], &[1, 2], "t_3+t_0-t_1"),
    (&[1], &[1, 2], "t_1+2t_0-t_3"),
    (&[1], &[0, 1], "t_2+t_0-t_3"),
    (&[0, 1], &[0, 1, 2], "t_1+t_0-t_2"),
    (&[0, 2], &[0, 1, 2], "t_3+t_0-t_1"),
    (&[1, 2], &[0, 1, 2], "t_2+t_0-t_3"),
];

/// The reference dual basis, restrictions in the order
/// {0}, {1}, {2}, {0,1}, {1,2}, {0,2}, {0,1,2}. The diagonal entry of
/// p^{1,2} is `t_2+t_0-t_3`, the rotation of the other two medium classes.
const REFERENCE_BASIS: [(&[u32], [&str; 7]); 7] = [
    (&[0, 1, 2], ["1", "1", "1", "1", "1", "1", "1"]),
    (
        &[0, 1],
        ["t_1+t_0-t_2", "t_1+2t_0-t_3", "0", "t_1+t_0-t_2", "0", "0", "0"],
    ),
    (
        &[1, 2],
        ["0", "t_2+t_0-t_3", "t_2+2t_0-t_1", "0", "t_2+t_0-t_3", "0", "0"],
    ),
    (
        &[0, 2],
        ["t_3+2t_0-t_2", "0", "t_3+t_0-t_1", "0", "0", "t_3+t_0-t_1", "0"],
    ),
    (
        &[0],
        ["(t_2-2t_0-t_3)(t_2-t_0-t_1)", "0", "0", "0", "0", "0", "0"],
    ),
    (
        &[1],
        ["0", "(t_3-2t_0-t_1)(t_3-t_0-t_2)", "0", "0", "0", "0", "0"],
    ),
    (
        &[2],
        ["0", "0", "(t_1-2t_0-t_2)(t_1-t_0-t_3)", "0", "0", "0", "0"],
    ),
];

const REFERENCE_ORDER: [&[u32]; 7] = [&[0], &[1], &[2], &[0, 1], &[1, 2], &[0, 2], &[0, 1, 2]];

fn within(limit: Duration, elapsed: Duration) -> Result<(), String> {
    if elapsed < limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:.2?}, limit {limit:?}"))
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let points = enumerate_fixed_points(&inst(3, &[3]));
    let elapsed = start.elapsed();
    within(Duration::from_secs(1), elapsed)?;
    if points.len() == 7 {
        Ok(format!("7 fixed points in {elapsed:.2?}"))
    } else {
        Err(format!("{} fixed points", points.len()))
    }
}

fn criterion_2() -> Outcome {
    let g = GkmGraph::new(&inst(3, &[3]));
    let mut wrong = Vec::new();
    for k in 0..g.points().len() {
        let ends = g.points().point(k).ending_set(g.instance());
        let expected = 3 - ends.len() as u32;
        if g.poset().dim(k) != expected {
            wrong.push(format!("{} has dim {}", g.points().label(k), g.poset().dim(k)));
        }
    }
    let poincare = g.poset().poincare_polynomial();
    if poincare != [1, 3, 3] {
        wrong.push(format!("Poincaré coefficients {poincare:?}"));
    }
    if wrong.is_empty() {
        Ok("dim = 3 − |I|; Poincaré polynomial 1 + 3q + 3q^2".into())
    } else {
        Err(wrong.join("; "))
    }
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let g = GkmGraph::new(&inst(3, &[3]));
    let ours: Vec<_> = g
        .edges()
        .iter()
        .map(|e| (e.src, e.dst, e.label.clone()))
        .collect();
    let reference: Vec<_> = REFERENCE_EDGES
        .iter()
        .map(|(a, b, w)| (point(&g, a), point(&g, b), linear(w)))
        .collect();
    let incidence = |v: &[(usize, usize, Character)]| v.iter().map(|e| (e.0, e.1)).collect::<BTreeSet<_>>();
    let conventions = LabelConvention::search(3, &ours, &reference);
    let elapsed = start.elapsed();
    within(Duration::from_secs(1), elapsed)?;
    if ours.len() != 9 || incidence(&ours) != incidence(&reference) {
        return Err(format!("{} edges, incidence differs", ours.len()));
    }
    match conventions.as_slice() {
        [] => Err("no sign/renaming convention maps the labels".into()),
        found => Ok(format!(
            "9 edges, exact incidence; labels agree under {} ({elapsed:.2?})",
            found.iter().map(describe).collect::<Vec<_>>().join(" or ")
        )),
    }
}

fn describe(c: &LabelConvention) -> String {
    format!("sign {:?}, t[r][s] -> t[r+{}][s]", c.sign, c.shift)
}

fn criterion_4() -> Outcome {
    let i = inst(6, &[4, 3, 3, 2, 1]);
    let part = MovablePart {
        start: VertexId(0),
        len: 1,
        block: 2,
    };
    let all = part_mutations(&i, part);
    let type1 = all.iter().filter(|m| m.kind() == 1).count();
    let type2 = all.iter().filter(|m| m.kind() == 2).count();
    if (type1, type2) == (2, 5) {
        Ok("2 Type-1 and 5 Type-2 mutations".into())
    } else {
        Err(format!("{type1} Type-1 and {type2} Type-2 mutations"))
    }
}

fn criterion_5() -> Outcome {
    let g = GkmGraph::new(&inst(3, &[3]));
    let basis = DualBasis::compute(&g).map_err(|e| e.to_string())?;
    // the renaming comes from the edge labels; restrictions of classes are
    // tangent weights and carry no orientation sign
    let ours: Vec<_> = g
        .edges()
        .iter()
        .map(|e| (e.src, e.dst, e.label.clone()))
        .collect();
    let reference: Vec<_> = REFERENCE_EDGES
        .iter()
        .map(|(a, b, w)| (point(&g, a), point(&g, b), linear(w)))
        .collect();
    let shifts: BTreeSet<u32> = LabelConvention::search(3, &ours, &reference)
        .iter()
        .map(|c| c.shift)
        .collect();
    let mut report = String::new();
    for &shift in &shifts {
        let mut mismatches = 0;
        for (x, row) in REFERENCE_BASIS {
            let x = point(&g, x);
            for (y, expected) in REFERENCE_ORDER.iter().zip(row) {
                let actual = basis
                    .class(x)
                    .polynomial(point(&g, y))
                    .rho_shift(i64::from(shift), 3);
                if actual != reference_poly(expected) {
                    mismatches += 1;
                }
            }
        }
        if mismatches == 0 {
            return Ok(format!(
                "all 49 restrictions equal under t[r][s] -> t[r+{shift}][s]"
            ));
        }
        let _ = write!(report, "shift {shift}: {mismatches} of 49 differ; ");
    }
    Err(if report.is_empty() {
        "no renaming from criterion 3".into()
    } else {
        report
    })
}

fn criterion_6(bases: &mut Vec<(GkmGraph, DualBasis)>) -> Outcome {
    let start = Instant::now();
    let (mut pairs, mut failures) = (0, Vec::new());
    for i in small_instances() {
        let g = GkmGraph::new(&i);
        let basis = DualBasis::compute(&g).map_err(|e| format!("{i}: {e}"))?;
        let method = if g.points().len() <= RATFUN_LIMIT {
            AbbvMethod::RationalFunction
        } else {
            AbbvMethod::Factored
        };
        let report = check_abbv_classes(&g, basis.classes(), method).map_err(|e| format!("{i}: {e}"))?;
        pairs += report.checked;
        if !report.passed() {
            failures.push(format!("{i}: {}", report.mismatches[0].item));
        }
        bases.push((g, basis));
    }
    let elapsed = start.elapsed();
    within(Duration::from_secs(60), elapsed)?;
    if failures.is_empty() {
        Ok(format!(
            "{pairs} pairs over {} instances exact in {elapsed:.2?}",
            bases.len()
        ))
    } else {
        Err(failures.join("; "))
    }
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let (mut checked, mut failures, mut count) = (0, Vec::new(), 0);
    for i in small_instances() {
        let g = GkmGraph::new(&i);
        for report in [
            check_fixed_points(&g, DEFAULT_BUDGET),
            check_edges(&g, DEFAULT_BUDGET),
        ] {
            let report = report.map_err(|e| format!("{i}: {e}"))?;
            checked += report.checked;
            if !report.passed() {
                failures.push(format!("{i}: {}", report.mismatches[0].item));
            }
        }
        count += 1;
    }
    let elapsed = start.elapsed();
    within(Duration::from_secs(120), elapsed)?;
    if failures.is_empty() {
        Ok(format!(
            "{checked} items agree over {count} instances in {elapsed:.2?}"
        ))
    } else {
        Err(failures.join("; "))
    }
}

fn criterion_8(bases: &[(GkmGraph, DualBasis)]) -> Outcome {
    let start = Instant::now();
    let (mut checked, mut failures) = (0, Vec::new());
    for (g, basis) in bases {
        let mut report = check_graph_invariants(g);
        let pairs = sample_pairs(g.points().len(), MAX_PAIRS);
        report.merge(check_basis_properties(g, basis, &pairs));
        checked += report.checked;
        if !report.passed() {
            let m = &report.mismatches[0];
            failures.push(format!(
                "{}: {} (expected {}, got {})",
                g.instance(),
                m.item,
                m.expected,
                m.actual
            ));
        }
    }
    let g = GkmGraph::new(&inst(3, &[3]));
    let basis = DualBasis::compute(&g).map_err(|e| e.to_string())?;
    let (x, y, z) = (point(&g, &[0, 1]), point(&g, &[0, 2]), point(&g, &[0]));
    let c = basis.structure_constants(&g, x, y).map_err(|e| e.to_string())?;
    let flagship = c.iter().find(|(k, _)| *k == z).map(|(_, v)| v.clone());
    if flagship != Some(Polynomial::one()) {
        failures.push(format!("c_{{0,1}},{{0,2}}^{{0}} = {flagship:?}"));
    }
    if failures.is_empty() {
        Ok(format!(
            "{checked} checks over {} instances (structure constants on ≤ {MAX_PAIRS} pairs each); \
             c_{{0,1}},{{0,2}}^{{0}} = 1 ({:.2?})",
            bases.len(),
            start.elapsed()
        ))
    } else {
        Err(failures.join("; "))
    }
}

fn criterion_9() -> Outcome {
    let base = GkmGraph::new(&inst(3, &[3]));
    let edges = |g: &GkmGraph| g.edges().iter().map(|e| (e.src, e.dst)).collect::<BTreeSet<_>>();
    for big in 3..=6 {
        let i = inst(3, &[big]);
        let reduced = reduce_n(&i).map_err(|e| e.to_string())?;
        if reduced != *base.instance() {
            return Err(format!("[{big}] reduces to {reduced}"));
        }
        let g = GkmGraph::new(&i);
        if g.points().len() != base.points().len() {
            return Err(format!("[{big}] has {} fixed points", g.points().len()));
        }
        let map: Vec<usize> = g
            .points()
            .points()
            .iter()
            .map(|p| {
                let q = transport_single_block(&i, &reduced, p).map_err(|e| e.to_string())?;
                base.points()
                    .index_of(&q)
                    .ok_or_else(|| format!("[{big}]: {q:?} not in [3]"))
            })
            .collect::<Result<_, String>>()?;
        if map.iter().collect::<BTreeSet<_>>().len() != map.len() {
            return Err(format!("[{big}]: transport is not injective"));
        }
        let n = map.len();
        for a in 0..n {
            if g.poset().dim(a) != base.poset().dim(map[a]) {
                return Err(format!("[{big}]: dimension differs at {}", g.points().label(a)));
            }
            for b in 0..n {
                if g.poset().contains(a, b) != base.poset().contains(map[a], map[b])
                    || g.poset().precedes(a, b) != base.poset().precedes(map[a], map[b])
                {
                    return Err(format!(
                        "[{big}]: order differs at {} {}",
                        g.points().label(a),
                        g.points().label(b)
                    ));
                }
            }
        }
        let moved: BTreeSet<_> = edges(&g).into_iter().map(|(a, b)| (map[a], map[b])).collect();
        if moved != edges(&base) {
            return Err(format!("[{big}]: GKM edges differ"));
        }
    }
    Ok("[N] ≅ [3] for N = 3..6: fixed points, closure order, dimensions and GKM edges".into())
}

#[test]
fn acceptance() {
    let mut bases = Vec::new();
    let results: Vec<(u32, Outcome)> = vec![
        (1, criterion_1()),
        (2, criterion_2()),
        (3, criterion_3()),
        (4, criterion_4()),
        (5, criterion_5()),
        (6, criterion_6(&mut bases)),
        (7, criterion_7()),
        (8, criterion_8(&bases)),
        (9, criterion_9()),
    ];
    let mut failed = Vec::new();
    for (k, outcome) in &results {
        match outcome {
            Ok(detail) => println!("criterion {k}: PASS — {detail}"),
            Err(detail) => {
                println!("criterion {k}: FAIL — {detail}");
                failed.push(*k);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
