// SPDX-License-Identifier: Apache-2.0

//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line, then exits non-zero if any
//! failed.

use std::process::ExitCode;
use std::time::Instant;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use relaxsched::cli::{bench_rows, Generator};
use relaxsched::engine::{adversarial_weights, detect_negative_cycle_residue, exact_distances, run_schedule, Distance, EngineError, WeightAssignment};
use relaxsched::factorization::{audit_lower_bound, build_family, contains_all_permutations, shortest_universal_length, PermutationCoverage, SymbolSequence};
use relaxsched::graph::{enumerate_k_paths, Digraph, Edge, SimplePath};
use relaxsched::reduction::{aps_to_validity, decode_witness, ApsInstance};
use relaxsched::schedule::{randomized_yen, round_robin, yen, Schedule, VertexOrder};
use relaxsched::validity::{contains_path, find_violating_path, is_valid, Budget};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn budget() -> Budget {
    Budget::new(100_000_000)
}

fn all_paths(g: &Digraph) -> Vec<SimplePath> {
    (0..g.vertex_count()).flat_map(|k| enumerate_k_paths(g, k).collect::<Vec<_>>()).collect()
}

fn random_schedule(n: usize, rng: &mut ChaCha8Rng, max_len: usize) -> Schedule {
    let g = Digraph::complete(n).unwrap();
    let len = rng.gen_range(0..=max_len);
    let steps = if g.edges().is_empty() { Vec::new() } else { (0..len).map(|_| *g.edges().choose(rng).unwrap()).collect() };
    Schedule::new(n, steps)
}

/// Plain subsequence test, independent of the library's cursor machinery.
fn naive_is_subsequence<T: PartialEq>(needle: &[T], hay: &[T]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|x| it.any(|y| y == x))
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k);
            out.push(q);
        }
    }
    out
}

fn naive_universal(t: &[usize], k: usize) -> bool {
    permutations(k).iter().all(|p| naive_is_subsequence(p, t))
}

fn criterion_1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut accepted, mut discarded) = (0, 0);
    while accepted < 1000 {
        let n = rng.gen_range(1..=8);
        let g = Digraph::complete(n).unwrap();
        let w = WeightAssignment::from_fn(&g, |_| rng.gen_range(-5i64..=20));
        let exact = match exact_distances(&g, &w) {
            Ok(d) => d,
            Err(EngineError::NegativeCycle(_)) => {
                discarded += 1;
                continue;
            }
            Err(e) => return Err(e.to_string()),
        };
        let s = round_robin(&g, (n - 1).max(1)).unwrap();
        let got = run_schedule(&g, &w, &s).map_err(|e| e.to_string())?;
        ensure(got == exact, || format!("n = {n}: {:?} != {:?}", got.as_slice(), exact.as_slice()))?;
        accepted += 1;
    }
    Ok(format!("1000 graphs agree exactly ({discarded} negative-cycle draws discarded)"))
}

fn criterion_2() -> Check {
    let mut checked = 0;
    for n in 2..=7 {
        let g = Digraph::complete(n).unwrap();
        for (name, s) in [("round-robin", round_robin(&g, n - 1).unwrap()), ("yen", yen(&g, &VertexOrder::identity(n), n).unwrap())] {
            let report = is_valid(&s, &g, budget()).map_err(|e| e.to_string())?;
            ensure(report.valid, || format!("{name} n = {n} invalid, witness {:?}", report.witness))?;
            checked += report.paths_checked;
            if n <= 6 {
                let missing = all_paths(&g).into_iter().find(|p| !naive_is_subsequence(&p.edges().collect::<Vec<_>>(), s.steps()));
                ensure(missing.is_none(), || format!("{name} n = {n}: naive check misses {missing:?}"))?;
            }
        }
    }
    Ok(format!("round-robin and yen valid for n = 2..7 ({checked} paths checked)"))
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut comparisons = 0u64;
    for n in 1..=5 {
        let g = Digraph::complete(n).unwrap();
        let paths = all_paths(&g);
        let weights: Vec<_> = paths.iter().map(|p| adversarial_weights(&g, p).unwrap()).collect();
        for _ in 0..200 {
            let s = random_schedule(n, &mut rng, 2 * n * n * n);
            for (p, w) in paths.iter().zip(&weights) {
                let d = run_schedule(&g, w, &s).map_err(|e| e.to_string())?;
                let reached = d.get(p.last()) == Distance::Finite(0);
                ensure(reached == contains_path(&s, p), || format!("n = {n}, path {p}: containment and execution disagree"))?;
                comparisons += 1;
            }
        }
    }
    Ok(format!("{comparisons} path/schedule pairs, zero disagreements"))
}

fn criterion_4() -> Check {
    let rows = bench_rows(4..=12, &[Generator::RoundRobin, Generator::Yen], false, 0, budget(), false).map_err(|e| e.to_string())?;
    for pair in rows.chunks(2) {
        let (rr, y) = (&pair[0], &pair[1]);
        let n = rr.n;
        ensure(rr.generator == "round-robin" && y.generator == "yen" && y.n == n, || "unexpected row order".into())?;
        let ratio = Ratio::new(y.length, rr.length);
        ensure(ratio == Ratio::new(n, 2 * (n - 1)), || format!("n = {n}: ratio {ratio}"))?;
        if n >= 8 {
            ensure((0.40..=0.55).contains(&y.length_per_n3), || format!("n = {n}: |yen|/n^3 = {}", y.length_per_n3))?;
        }
    }
    let last = &rows[rows.len() - 1];
    Ok(format!("ratio n/(2(n-1)) exact for n = 4..12; |yen|/n^3 = {:.4} at n = 12", last.length_per_n3))
}

fn criterion_5() -> Check {
    let n = 8;
    let g = Digraph::complete(n).unwrap();
    let family = build_family(&g).map_err(|e| e.to_string())?;
    ensure(family.len() == 10 && family.member_size() == 3, || format!("family {} x {}", family.len(), family.member_size()))?;
    let mut seen: Vec<Edge> = Vec::new();
    for m in family.members() {
        ensure(m.len() == 3, || "member size".into())?;
        for (i, &e) in m.edges().iter().enumerate() {
            ensure(g.has_edge(e) && e.tail() != g.source() && e.head() != g.source(), || format!("{e} touches the source"))?;
            ensure(m.edges()[..i].iter().all(|&f| !f.touches(e)), || format!("{e} shares a vertex within its member"))?;
            ensure(!seen.contains(&e), || format!("{e} appears in two members"))?;
            seen.push(e);
        }
    }
    let c3 = shortest_universal_length(3).map_err(|e| e.to_string())?;
    ensure(c3 == 7, || format!("c_3 = {c3}"))?;
    let bound = family.len() * c3;
    let schedules = [
        ("round-robin", round_robin(&g, n - 1).unwrap()),
        ("yen", yen(&g, &VertexOrder::identity(n), n).unwrap()),
        ("randomized-yen", randomized_yen(&g, 5).unwrap()),
    ];
    for (name, s) in &schedules {
        let valid = is_valid(s, &g, budget()).map_err(|e| e.to_string())?.valid;
        let audit = audit_lower_bound(s, &g).map_err(|e| e.to_string())?;
        ensure(valid, || format!("{name} invalid at n = 8"))?;
        ensure(audit.all_universal, || format!("{name} valid but has a non-universal member"))?;
        ensure(audit.certified_lower_bound == Some(bound), || format!("{name} certified {:?}", audit.certified_lower_bound))?;
        ensure(s.len() >= bound, || format!("{name} length {} below {bound}", s.len()))?;
    }
    Ok(format!("10 x 3 family, c_3 = 7, bound {bound}; round-robin {} and yen {} steps, all members universal", schedules[0].1.len(), schedules[1].1.len()))
}

fn criterion_6() -> Check {
    for k in 1..=3 {
        let c = shortest_universal_length(k).map_err(|e| e.to_string())?;
        // Brute force: the shortest length at which some word is universal.
        let oracle = (0..)
            .find(|&len| {
                (0..k.pow(len as u32)).any(|code| {
                    let word: Vec<usize> = (0..len).map(|i| code / k.pow(i as u32) % k + 1).collect();
                    naive_universal(&word, k)
                })
            })
            .unwrap();
        ensure(c == oracle, || format!("c_{k} = {c}, brute force {oracle}"))?;
    }
    let known = [1, 2, 3, 1, 2, 1, 3];
    ensure(naive_universal(&known, 3), || "reference word is not universal".into())?;
    let t = SymbolSequence::over_range(3, &known).unwrap();
    ensure(contains_all_permutations(&t).map_err(|e| e.to_string())?.is_universal(), || "length-7 word rejected".into())?;
    let mut rejected = 0;
    for code in 0..729usize {
        let word: Vec<usize> = (0..6).map(|i| code / 3usize.pow(i) % 3 + 1).collect();
        let t = SymbolSequence::over_range(3, &word).unwrap();
        ensure(!contains_all_permutations(&t).map_err(|e| e.to_string())?.is_universal(), || format!("{word:?} accepted"))?;
        rejected += 1;
    }
    Ok(format!("c_1..c_3 = 1, 3, 7; 1231213 accepted; {rejected} length-6 words rejected"))
}

fn criterion_7() -> Check {
    let mut instances = 0;
    let mut universal = 0;
    for len in 1..=6u32 {
        for code in 0..2usize.pow(len) {
            let t: Vec<usize> = (0..len).map(|i| (code >> i) & 1).map(|b| b + 1).rev().collect();
            let inst = ApsInstance::new(2, t.clone()).unwrap();
            let aps = contains_all_permutations(&SymbolSequence::over_range(2, &t).unwrap()).map_err(|e| e.to_string())?;
            ensure(aps.is_universal() == naive_universal(&t, 2), || format!("{t:?}: APS check disagrees with brute force"))?;
            let out = aps_to_validity(&inst).map_err(|e| e.to_string())?;
            let report = is_valid(&out.schedule, &out.graph, budget()).map_err(|e| e.to_string())?;
            ensure(report.valid == aps.is_universal(), || format!("{t:?}: universal {} but valid {}", aps.is_universal(), report.valid))?;
            if let PermutationCoverage::Missing(_) = aps {
                let witness = find_violating_path(&out.schedule, &out.graph, budget()).map_err(|e| e.to_string())?.ok_or_else(|| format!("{t:?}: no witness"))?;
                let perm = decode_witness(&witness, &out).ok_or_else(|| format!("{t:?}: witness {witness} not decodable"))?;
                ensure(!naive_is_subsequence(&perm, &t), || format!("{t:?}: decoded {perm:?} is present"))?;
            } else {
                universal += 1;
            }
            instances += 1;
        }
    }
    ensure(instances == 126, || format!("{instances} instances"))?;
    Ok(format!("{instances} instances ({universal} universal), biconditional holds, all witnesses decode to missing permutations"))
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut valid, mut invalid) = (0, 0);
    for i in 0..100 {
        let n = rng.gen_range(1..=5);
        let g = Digraph::complete(n).unwrap();
        // Every other draw pads a valid schedule with noise so both outcomes occur.
        let s = if i % 2 == 0 && n > 1 {
            let order = VertexOrder::random(n, &mut rng);
            let mut steps = yen(&g, &order, n).unwrap().steps().to_vec();
            for _ in 0..rng.gen_range(0..=n * n) {
                let at = rng.gen_range(0..=steps.len());
                steps.insert(at, *g.edges().choose(&mut rng).unwrap());
            }
            if rng.gen_bool(0.5) {
                steps.remove(rng.gen_range(0..steps.len()));
            }
            Schedule::new(n, steps)
        } else {
            random_schedule(n, &mut rng, 2 * n * n * n)
        };
        let report = is_valid(&s, &g, budget()).map_err(|e| e.to_string())?;
        let witness = find_violating_path(&s, &g, budget()).map_err(|e| e.to_string())?;
        ensure(witness.is_none() == report.valid, || format!("draw {i}: valid {} but witness {witness:?}", report.valid))?;
        if let Some(p) = &witness {
            ensure(!contains_path(&s, p), || format!("draw {i}: witness {p} is contained"))?;
            ensure(!naive_is_subsequence(&p.edges().collect::<Vec<_>>(), s.steps()), || format!("draw {i}: witness {p} is a subsequence"))?;
            invalid += 1;
        } else {
            valid += 1;
        }
    }
    Ok(format!("100 schedules: {valid} valid, {invalid} with sound witnesses"))
}

fn criterion_9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..50 {
        let n = rng.gen_range(2..=8);
        let g = Digraph::complete(n).unwrap();
        let mut cycle: Vec<usize> = (0..n).collect();
        cycle.shuffle(&mut rng);
        cycle.truncate(rng.gen_range(2..=n));
        let cycle_edges: Vec<Edge> = (0..cycle.len()).map(|j| Edge::new(cycle[j], cycle[(j + 1) % cycle.len()])).collect();
        let w = WeightAssignment::from_fn(&g, |e| if cycle_edges.contains(&e) { -rng.gen_range(1i64..=5) } else { rng.gen_range(0i64..=20) });
        ensure(matches!(exact_distances(&g, &w), Err(EngineError::NegativeCycle(_))), || format!("instance {i}: oracle finds no negative cycle"))?;
        let d = run_schedule(&g, &w, &round_robin(&g, n - 1).unwrap()).map_err(|e| e.to_string())?;
        ensure(detect_negative_cycle_residue(&g, &w, &d), || format!("instance {i}: negative cycle missed"))?;
    }
    let mut clean = 0;
    while clean < 50 {
        let n = rng.gen_range(2..=8);
        let g = Digraph::complete(n).unwrap();
        let w = WeightAssignment::from_fn(&g, |_| rng.gen_range(-5i64..=20));
        if exact_distances(&g, &w).is_err() {
            continue;
        }
        let d = run_schedule(&g, &w, &round_robin(&g, n - 1).unwrap()).map_err(|e| e.to_string())?;
        ensure(!detect_negative_cycle_residue(&g, &w, &d), || format!("cycle-free instance {clean} flagged"))?;
        clean += 1;
    }
    Ok("50 negative-cycle instances flagged, 50 cycle-free instances clear".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("engine soundness", criterion_1),
        ("validity of classical schedules", criterion_2),
        ("containment matches adversarial execution", criterion_3),
        ("length ratio", criterion_4),
        ("certified lower bound at n = 8", criterion_5),
        ("exact small universal lengths", criterion_6),
        ("reduction biconditional", criterion_7),
        ("witness search soundness", criterion_8),
        ("negative-cycle detection", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let result = check();
        let secs = started.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
