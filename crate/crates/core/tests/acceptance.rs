//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints its own PASS/FAIL line; exits non-zero if any fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use rand::Rng as _;

use hpl_core::absorption::{
    absorb, assemble, insert_vertex, Absorbed, AbsorbingPath, Assembly, PipelineParams,
};
use hpl_core::augment::{sample_gnp, union, AugmentedGraph};
use hpl_core::bounds::{janson_generic_bound, janson_inputs_for_family};
use hpl_core::constructions::{dense_host, extremal_graph, ExtremalSpec};
use hpl_core::degrees::check_joint_neighbourhoods;
use hpl_core::experiments::{estimate_success, run_batch, run_point, ExperimentConfig, Host, Mode};
use hpl_core::search::{
    brute_force_oracle, find_power_ham_cycle, max_disjoint_cliques, verify_certificate, SearchBudget, SearchOutcome,
};
use hpl_core::seq::is_power_seq;
use hpl_core::{rng, Graph, SeqKind};

type Outcome = Result<String, String>;

fn random_graph(n: usize, p: f64, rng: &mut rng::Rng) -> Graph {
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                g.insert_edge(u, v);
            }
        }
    }
    g
}

fn oracle_equivalence() -> Outcome {
    let mut rng = rng::stream(1);
    let start = Instant::now();
    let (mut present, mut absent) = (0, 0);
    for i in 0..500 {
        let r = 1 + i % 2;
        let n = rng.gen_range(r + 2..=8);
        let g = random_graph(n, rng.gen_range(0.3..1.0), &mut rng);
        let fast = find_power_ham_cycle(&g, r, SearchBudget::generous()).map_err(|e| e.to_string())?;
        let slow = brute_force_oracle(&g, r).map_err(|e| e.to_string())?;
        let found = match fast {
            SearchOutcome::Found(c) => {
                if !verify_certificate(&g, &c) {
                    return Err(format!("graph {i}: certificate fails"));
                }
                true
            }
            SearchOutcome::Absent => false,
            SearchOutcome::BudgetExhausted => return Err(format!("graph {i}: budget exhausted")),
        };
        if found != slow {
            return Err(format!("graph {i} (n={n}, r={r}): search {found}, oracle {slow}"));
        }
        if found {
            present += 1;
        } else {
            absent += 1;
        }
    }
    let t = start.elapsed();
    if t > Duration::from_secs(120) {
        return Err(format!("took {t:?}"));
    }
    Ok(format!("500 graphs agree ({present} present, {absent} absent) in {t:.2?}"))
}

fn distances(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let inf = usize::MAX / 2;
    let mut d = vec![vec![inf; n]; n];
    for u in 0..n {
        d[u][u] = 0;
    }
    for (u, v) in g.edges() {
        d[u][v] = 1;
        d[v][u] = 1;
    }
    for w in 0..n {
        for u in 0..n {
            for v in 0..n {
                d[u][v] = d[u][v].min(d[u][w] + d[w][v]);
            }
        }
    }
    d
}

fn power_operator() -> Outcome {
    let mut rng = rng::stream(2);
    for i in 0..200 {
        let n = rng.gen_range(1..=10);
        let g = random_graph(n, rng.gen_range(0.05..0.6), &mut rng);
        let d = distances(&g);
        for k in 0..=4 {
            let expect = Graph::from_edges(
                n,
                (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|&(u, v)| d[u][v] <= k),
            )
            .unwrap();
            if g.power(k) != expect {
                return Err(format!("graph {i} (n={n}), k={k}"));
            }
        }
    }
    for n in 3..=12 {
        for k in 1..=5 {
            let complete = Graph::cycle(n).power(k) == Graph::complete(n);
            if complete != (n <= 2 * k + 1) {
                return Err(format!("C_{n}^{k}: complete = {complete}"));
            }
        }
    }
    Ok("200 graphs x k in 0..=4 match distances; C_n^k = K_n iff n <= 2k+1 for n <= 12, k <= 5".into())
}

fn joint_neighbourhoods() -> Outcome {
    let mut sets = 0;
    for i in 0..50u64 {
        let k = (i % 3) as usize;
        let n = 9 + (i as usize / 3) % 6;
        let eps = 0.04 + 0.01 * (i % 5) as f64;
        let alpha = k as f64 / (k as f64 + 1.0) + eps;
        let g = dense_host(n, alpha, rng::sub_seed(3, i)).map_err(|e| e.to_string())?;
        let report = check_joint_neighbourhoods(&g, k, eps).map_err(|e| format!("graph {i}: {e}"))?;
        if !report.exhaustive {
            return Err(format!("graph {i}: not exhaustive"));
        }
        if !report.is_clean() {
            return Err(format!("graph {i} (n={n}, k={k}): {:?}", report.violations[0]));
        }
        sets += report.sets_checked;
    }
    Ok(format!("50 graphs, {sets} vertex sets, no violations"))
}

fn extremal() -> Outcome {
    let start = Instant::now();
    let spec = ExtremalSpec::new(1, 12, 1.0 / 12.0).map_err(|e| e.to_string())?;
    let g = extremal_graph(&spec).map_err(|e| e.to_string())?;
    if g.min_degree() != 7 {
        return Err(format!("min degree {}", g.min_degree()));
    }
    let packing = max_disjoint_cliques(&g, 3);
    if !packing.exact || packing.size != 2 {
        return Err(format!("triangle packing {} (exact {})", packing.size, packing.exact));
    }
    match find_power_ham_cycle(&g, 2, SearchBudget::generous()).map_err(|e| e.to_string())? {
        SearchOutcome::Absent => {}
        other => return Err(format!("search returned {:?}", other.is_found())),
    }
    let t = start.elapsed();
    if t > Duration::from_secs(60) {
        return Err(format!("took {t:?}"));
    }
    Ok(format!("min degree 7, 2 disjoint triangles, no square cycle ({t:.2?})"))
}

fn path_ok(h: &Graph, seq: &[usize], r: usize) -> bool {
    is_power_seq(h, seq, r, SeqKind::Path)
}

/// Checks every structure an assembly accepted. Returns the number of
/// power sequences checked.
fn audit(h: &AugmentedGraph, p: &PipelineParams, asm: &Assembly) -> Result<usize, String> {
    let n = h.n();
    let r = p.k + 1;
    let mut seqs = 0;
    let mut check = |what: &str, seq: &[usize]| {
        seqs += 1;
        if path_ok(&h.union, seq, r) {
            Ok(())
        } else {
            Err(format!("{what} is not a power path"))
        }
    };
    let empty = FixedBitSet::with_capacity(n);
    let reserved = asm.reservoir.as_ref().map_or(empty, |res| res.set.clone());
    if let Some(res) = &asm.reservoir {
        if res.size() != p.reservoir_size(n) {
            return Err(format!("reservoir size {}", res.size()));
        }
        if !res.satisfies_degree(&h.det, p.reservoir_degree_floor(res.size())) {
            return Err("reservoir degree floor".into());
        }
        if !res.used.is_subset(&res.set) {
            return Err("used vertices outside the reservoir".into());
        }
    }
    if let Some(fam) = &asm.family {
        let mut seen = FixedBitSet::with_capacity(n);
        for a in &fam.absorbers {
            if a.tuple.len() != 2 * p.k + 2 || !a.is_valid(h, &reserved) {
                return Err(format!("invalid absorber {:?}", a.tuple));
            }
            for &v in &a.tuple {
                if seen.put(v) {
                    return Err("absorbers overlap".into());
                }
            }
        }
        if fam.min_count < fam.floor {
            return Err("absorber floor".into());
        }
    }
    if let Some(a) = &asm.absorbing {
        check("absorbing path", &a.path.vertices)?;
        if a.path.len() > p.absorbing_path_cap(n) {
            return Err("absorbing path too long".into());
        }
        if a.path.vertices.iter().any(|&v| reserved.contains(v)) {
            return Err("absorbing path meets the reservoir".into());
        }
        for (abs, &at) in a.family.iter().zip(&a.placements) {
            if a.path.vertices[at..at + abs.tuple.len()] != abs.tuple[..] {
                return Err("absorber not at its placement".into());
            }
        }
    }
    if let Some(c) = &asm.cover {
        let mut seen = asm.absorbing.as_ref().map_or(FixedBitSet::with_capacity(n), |a| a.vertex_set(n));
        for path in &c.paths {
            check("cover path", &path.vertices)?;
            for &v in &path.vertices {
                if reserved.contains(v) || seen.put(v) {
                    return Err("cover path overlaps".into());
                }
            }
        }
    }
    if let (Some(s), Some(res)) = (&asm.stitching, &asm.reservoir) {
        let t = p.connector_internal();
        let cap = p.reservoir_use_cap(res.size());
        let mut used = FixedBitSet::with_capacity(n);
        for piece in &s.pieces {
            check("stitched piece", &piece.vertices)?;
        }
        for (conn, &before) in s.connections.iter().zip(&s.used_before) {
            check("connection", &conn.vertices)?;
            if conn.internal().len() != t || before > cap {
                return Err("connection size or reservoir cap".into());
            }
            for &v in conn.internal() {
                if !res.set.contains(v) || used.put(v) {
                    return Err("connection leaves the reservoir or reuses it".into());
                }
            }
        }
        if s.consumed != used.count_ones(..) {
            return Err("consumed count".into());
        }
    }
    if let Some(ab) = &asm.absorbed {
        check("absorbed path", &ab.path.vertices)?;
    }
    Ok(seqs)
}

fn instance(k: usize, n: usize, alpha: f64, c: f64, seed: u64) -> (AugmentedGraph, PipelineParams) {
    let g = dense_host(n, alpha, rng::labelled_seed(seed, "host", 0)).unwrap();
    let h = union(&g, &sample_gnp(n, c / n as f64, rng::labelled_seed(seed, "gnp", 0)).unwrap()).unwrap();
    (h, PipelineParams::desk_preset(k, n, alpha, c, rng::labelled_seed(seed, "pipeline", 0)))
}

fn pipeline_soundness() -> Outcome {
    let (mut ok, mut seqs) = (0, 0);
    for i in 0..200 {
        let (h, p) = instance(1, 80, 0.58, 40.0, rng::sub_seed(5, i));
        let asm = assemble(&h, &p);
        seqs += audit(&h, &p, &asm).map_err(|e| format!("run {i}: {e}"))?;
        if let Some(c) = asm.certificate() {
            if !verify_certificate(&h.union, c) || c.order.iter().collect::<BTreeSet<_>>().len() != h.n() {
                return Err(format!("run {i}: certificate does not verify"));
            }
            ok += 1;
        }
    }
    Ok(format!("{ok}/200 runs succeed, every certificate verifies, {seqs} intermediate sequences valid"))
}

fn criterion6_config() -> ExperimentConfig {
    ExperimentConfig {
        k: 0,
        n: 60,
        alpha: 0.55,
        c_grid: vec![40.0],
        trials: 100,
        mode: Mode::PipelineThenExact,
        seed: 6,
        host: Host::Dense,
        ..Default::default()
    }
}

fn k0_regime(dir: &std::path::Path) -> Outcome {
    let start = Instant::now();
    let batch = run_batch(&criterion6_config(), dir).map_err(|e| e.to_string())?;
    let e = &batch.estimates[0];
    let t = start.elapsed();
    if e.rate < 0.9 || t > Duration::from_secs(300) {
        return Err(format!("rate {:.3} in {t:.2?}", e.rate));
    }
    Ok(format!("rate {:.2} [{:.2}, {:.2}] in {t:.2?}", e.rate, e.ci_lo, e.ci_hi))
}

fn monotone_in_c() -> Outcome {
    let cfg = ExperimentConfig {
        k: 1,
        n: 60,
        alpha: 0.58,
        trials: 100,
        seed: 7,
        host: Host::Extremal,
        ..Default::default()
    };
    let grid = [1.0, 4.0, 8.0, 16.0, 32.0, 64.0];
    let mut est = Vec::new();
    for c in grid {
        let recs = run_point(&cfg, c, None).map_err(|e| e.to_string())?;
        est.push(estimate_success(&recs, c, cfg.confidence));
    }
    let curve: Vec<String> = est.iter().map(|e| format!("{}:{:.2}", e.c, e.rate)).collect();
    for w in est.windows(2) {
        if w[1].rate < w[0].rate - (w[0].half_width() + w[1].half_width()) {
            return Err(format!("drop between C={} and C={}: {}", w[0].c, w[1].c, curve.join(" ")));
        }
    }
    Ok(format!("rates {}", curve.join(" ")))
}

fn replay(h: &AugmentedGraph, r: usize, a: &AbsorbingPath, ab: &Absorbed) -> Result<usize, String> {
    let mut seq = a.path.clone();
    for step in &ab.steps {
        seq = insert_vertex(&seq, step.position - 1, step.x);
        if seq.vertices[step.position] != step.x
            || !path_ok(&h.union, &seq.vertices, r)
            || seq.first_end() != a.path.first_end()
            || seq.last_end() != a.path.last_end()
        {
            return Err(format!("insertion of {} breaks the path", step.x));
        }
    }
    if seq != ab.path {
        return Err("replay differs from the absorbed path".into());
    }
    Ok(ab.steps.len())
}

fn absorbing_property() -> Outcome {
    let (mut trials, mut insertions) = (0, 0);
    for i in 0..50 {
        let (h, p) = instance(1, 60, 0.58, 40.0, rng::sub_seed(8, i));
        let asm = assemble(&h, &p);
        let Some(a) = &asm.absorbing else {
            continue;
        };
        trials += 1;
        if let Some(ab) = &asm.absorbed {
            insertions += replay(&h, p.k + 1, a, ab).map_err(|e| format!("run {i}: {e}"))?;
        }
        // one outside vertex per absorber that can take it
        let on_path = a.vertex_set(h.n());
        let mut free: Vec<bool> = vec![true; a.family.len()];
        let mut u = Vec::new();
        for x in (0..h.n()).filter(|&x| !on_path.contains(x)) {
            if let Some(j) = (0..a.family.len()).find(|&j| free[j] && a.family[j].absorbs(&h.det, x)) {
                free[j] = false;
                u.push(x);
            }
        }
        let ab = absorb(&h, a, &u).map_err(|e| format!("run {i}: {e}"))?;
        insertions += replay(&h, p.k + 1, a, &ab).map_err(|e| format!("run {i}: {e}"))?;
    }
    if insertions == 0 {
        return Err("no insertions performed".into());
    }
    Ok(format!("{insertions} insertions over {trials} runs, all valid"))
}

fn janson_dominance() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for n in 2..=4usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let edges: Vec<Vec<(usize, usize)>> = pairs.iter().map(|&e| vec![e]).collect();
        let mut triangles = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    triangles.push(vec![(a, b), (a, c), (b, c)]);
                }
            }
        }
        for family in [edges, triangles] {
            if family.is_empty() {
                continue;
            }
            for p in [0.1f64, 0.3, 0.5] {
                let mut none = 0.0;
                for mask in 0u32..1 << pairs.len() {
                    let present = |e: &(usize, usize)| mask >> pairs.iter().position(|x| x == e).unwrap() & 1 == 1;
                    if family.iter().any(|f| f.iter().all(present)) {
                        continue;
                    }
                    let k = mask.count_ones() as i32;
                    none += p.powi(k) * (1.0 - p).powi(pairs.len() as i32 - k);
                }
                let b = janson_generic_bound(&janson_inputs_for_family(&family, p));
                if b.bound < none {
                    return Err(format!("n={n}, copies of size {}, p={p}: {} < {none}", family[0].len(), b.bound));
                }
                checked += 1;
            }
        }
    }
    let t = start.elapsed();
    if t > Duration::from_secs(60) {
        return Err(format!("took {t:?}"));
    }
    Ok(format!("{checked} instances dominated"))
}

fn strip_timing(text: &str) -> Vec<serde_json::Value> {
    text.lines()
        .map(|l| {
            let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
            v.as_object_mut().unwrap().remove("timing");
            v
        })
        .collect()
}

fn determinism(first: &std::path::Path, second: &std::path::Path) -> Outcome {
    run_batch(&criterion6_config(), second).map_err(|e| e.to_string())?;
    let read = |d: &std::path::Path| std::fs::read_to_string(d.join("records.jsonl")).map_err(|e| e.to_string());
    let (a, b) = (strip_timing(&read(first)?), strip_timing(&read(second)?));
    if a.is_empty() || a != b {
        return Err("records differ".into());
    }
    let bytes = |v: &[serde_json::Value]| v.iter().map(|x| x.to_string() + "\n").collect::<String>();
    if bytes(&a) != bytes(&b) {
        return Err("serialized records differ".into());
    }
    Ok(format!("{} records identical without timing", a.len()))
}

fn main() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + Sync>)> = vec![
        ("oracle equivalence", Box::new(oracle_equivalence)),
        ("power operator", Box::new(power_operator)),
        ("joint neighbourhoods", Box::new(joint_neighbourhoods)),
        ("extremal construction", Box::new(extremal)),
        ("pipeline soundness", Box::new(pipeline_soundness)),
        ("k = 0 regime", Box::new(|| k0_regime(dirs[0].path()))),
        ("monotonicity in C", Box::new(monotone_in_c)),
        ("absorbing property", Box::new(absorbing_property)),
        ("Janson dominance", Box::new(janson_dominance)),
    ];
    let mut results: Vec<(&str, Outcome)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria.iter().map(|(name, f)| (*name, s.spawn(|| f()))).collect();
        handles
            .into_iter()
            .map(|(name, h)| (name, h.join().unwrap_or_else(|_| Err("panicked".into()))))
            .collect()
    });
    // replays the k = 0 batch, so it runs after it
    let replay = if results[5].1.is_ok() {
        determinism(dirs[0].path(), dirs[1].path())
    } else {
        Err("k = 0 batch did not complete".into())
    };
    results.push(("determinism", replay));
    let mut failed = 0;
    for (i, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(msg) => println!("criterion {:>2} PASS {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {msg}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
