//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion, and exits non-zero if any failed.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use psomotif::featurize::{
    build_bicluster_matrix, build_cluster_dataset, FrequencyWindow, Normalization,
    StructureWindowSet, WindowMode,
};
use psomotif::kmeans::{kmeans_run, matched_agreement, KMeansParams};
use psomotif::metrics::{
    build_profile, cityblock, homology_class, msr, structure_similarity, HomologyClass,
};
use psomotif::motif::{
    build_motif_report, logo_columns, max_bits, MotifOptions, MotifSpec, PositionFrequencies,
    Relation, ResidueSet,
};
use psomotif::pso::PsoConfig;
use psomotif::psobiclust::{jaccard, pso_bicluster, seed_biclusters, BiclusterConfig};
use psomotif::psokmeans::{pso_kmeans, PsoKMeansConfig};
use psomotif::report::compare_pipelines;
use psomotif::seqio::Corpus;
use psomotif::synth::{
    blobs, planted_additive_bicluster, planted_structural_corpus, uniform_points, CorpusSpec,
};
use psomotif::{Matrix, Ss3};
use psomotif_cli::{cmd_compare, commands::load_corpus, RunConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn sample_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/sample_corpus")
}

fn sample_corpus() -> Corpus {
    let d = sample_dir();
    load_corpus(
        &d.join("sequences.fasta"),
        Some(&d.join("structures.ss")),
        &RunConfig::default(),
    )
    .unwrap()
}

fn within(start: Instant, limit: Duration, detail: String) -> Outcome {
    let took = start.elapsed();
    if took <= limit {
        Ok(format!("{detail}; {took:.2?}"))
    } else {
        Err(format!("{detail}; took {took:.2?}, limit {limit:?}"))
    }
}

/// Four-mean residue computed independently of the library.
fn msr_oracle(m: &Matrix, rows: &[usize], cols: &[usize]) -> f64 {
    let (ni, nj) = (rows.len() as f64, cols.len() as f64);
    let row_mean: Vec<f64> = rows
        .iter()
        .map(|&i| cols.iter().map(|&j| m.get(i, j)).sum::<f64>() / nj)
        .collect();
    let col_mean: Vec<f64> = cols
        .iter()
        .map(|&j| rows.iter().map(|&i| m.get(i, j)).sum::<f64>() / ni)
        .collect();
    let all: f64 = rows
        .iter()
        .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
        .map(|(i, j)| m.get(i, j))
        .sum::<f64>()
        / (ni * nj);
    let mut acc = 0.0;
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            let r = m.get(i, j) - row_mean[a] - col_mean[b] + all;
            acc += r * r;
        }
    }
    acc / (ni * nj)
}

fn subset(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let size = rng.random_range(1..=n);
    let mut v = rand::seq::index::sample(rng, n, size).into_vec();
    v.sort_unstable();
    v
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Matrix {
    Matrix::from_fn(n, m, |_, _| rng.random_range(-10.0..10.0))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn msr_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let (n, m) = (rng.random_range(1..=30), rng.random_range(1..=20));
        let mat = random_matrix(&mut rng, n, m);
        let rows = subset(&mut rng, n);
        let cols = subset(&mut rng, m);
        let (got, want) = (msr(&mat, &rows, &cols), msr_oracle(&mat, &rows, &cols));
        let rel = (got - want).abs() / want.abs().max(1e-12);
        worst = worst.max(rel);
        if rel > 1e-9 {
            return Err(format!("relative error {rel:e} on {n}x{m}"));
        }
    }
    within(
        start,
        Duration::from_secs(5),
        format!("200 matrices, worst relative error {worst:.1e}"),
    )
}

fn msr_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..50 {
        let (n, m) = (rng.random_range(2..=30), rng.random_range(2..=20));
        let mat = random_matrix(&mut rng, n, m);
        let rows = subset(&mut rng, n);
        let cols = subset(&mut rng, m);
        let base = msr(&mat, &rows, &cols);
        let c = rng.random_range(-50.0..50.0);
        let r: Vec<f64> = (0..n).map(|_| rng.random_range(-50.0..50.0)).collect();
        let q: Vec<f64> = (0..m).map(|_| rng.random_range(-50.0..50.0)).collect();
        let shifted = [
            ("constant", Matrix::from_fn(n, m, |i, j| mat.get(i, j) + c)),
            ("row", Matrix::from_fn(n, m, |i, j| mat.get(i, j) + r[i])),
            ("column", Matrix::from_fn(n, m, |i, j| mat.get(i, j) + q[j])),
        ];
        for (name, s) in &shifted {
            let v = msr(s, &rows, &cols);
            if !close(v, base, 1e-9) {
                return Err(format!("case {case}: {name} shift moved MSR {base} -> {v}"));
            }
        }
        let additive = Matrix::from_fn(n, m, |i, j| r[i] + q[j]);
        let z = msr(&additive, &rows, &cols);
        if z.abs() > 1e-9 {
            return Err(format!("case {case}: additive model MSR {z:e}"));
        }
    }
    Ok("50 instances: constant/row/column shifts invariant, additive models zero".into())
}

fn cityblock_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for t in 0..500 {
        let (n, m) = (rng.random_range(1..=9), rng.random_range(1..=20));
        let [a, b, c] = [0, 1, 2].map(|_| random_matrix(&mut rng, n, m));
        let (a, b, c) = (a.as_slice(), b.as_slice(), c.as_slice());
        let (ab, ba, bc, ac) = (
            cityblock(a, b),
            cityblock(b, a),
            cityblock(b, c),
            cityblock(a, c),
        );
        if ab < 0.0 || cityblock(a, a) != 0.0 {
            return Err(format!("triple {t}: non-negativity"));
        }
        if ab != ba {
            return Err(format!("triple {t}: symmetry {ab} vs {ba}"));
        }
        if ac > ab + bc + 1e-12 {
            return Err(format!("triple {t}: triangle {ac} > {ab} + {bc}"));
        }
    }
    Ok("500 triples: non-negative, symmetric, triangle inequality".into())
}

fn segments_of(labels: &[Ss3]) -> StructureWindowSet {
    StructureWindowSet {
        sequence_id: "s".into(),
        segments: vec![labels.to_vec()],
    }
}

fn similarity_thresholds() -> Outcome {
    let helix = build_profile([&segments_of(&[Ss3::H; 9])]).unwrap();
    let h = structure_similarity(&helix);
    if h != 1.0 {
        return Err(format!("all-helix similarity {h}"));
    }
    let sets = [Ss3::H, Ss3::E, Ss3::C].map(|l| segments_of(&[l; 9]));
    let uniform = build_profile(sets.iter()).unwrap();
    let u = structure_similarity(&uniform);
    if (u - 1.0 / 3.0).abs() > 1e-12 {
        return Err(format!("uniform similarity {u}"));
    }
    let cases = [
        (0.71, HomologyClass::Identical),
        (0.70, HomologyClass::Weak),
        (0.65, HomologyClass::Weak),
        (0.60, HomologyClass::None),
        (0.59, HomologyClass::None),
        (1.0, HomologyClass::Identical),
    ];
    for (s, want) in cases {
        if homology_class(s) != want {
            return Err(format!(
                "homology_class({s}) = {:?}, want {want:?}",
                homology_class(s)
            ));
        }
    }
    Ok("helix = 1, uniform = 1/3, class boundaries strict at 0.70 and 0.60".into())
}

fn kmeans_blobs() -> Outcome {
    let start = Instant::now();
    let centers = vec![vec![0.0, 0.0], vec![10.0, 0.0], vec![0.0, 10.0]];
    let hits = (0..10)
        .filter(|&seed| {
            let (pts, labels) = blobs(&centers, 20, 1.0, 100 + seed);
            let cs = kmeans_run(&pts, 3, &KMeansParams::default(), seed).unwrap();
            matched_agreement(&cs.assignment, &labels, 3) == pts.len()
        })
        .count();
    if hits < 9 {
        return Err(format!("planted partition recovered in {hits}/10 seeds"));
    }
    within(
        start,
        Duration::from_secs(2),
        format!("recovered in {hits}/10 seeds"),
    )
}

fn non_increasing(trace: &[f64]) -> bool {
    trace.windows(2).all(|w| w[1] <= w[0])
}

fn pso_monotone() -> Outcome {
    let corpus = sample_corpus();
    let windows = build_cluster_dataset(&corpus.sequences, 9, WindowMode::Reshape).unwrap();
    let items: Vec<Vec<f64>> = windows.iter().map(FrequencyWindow::to_vector).collect();
    let matrix = build_bicluster_matrix(
        &corpus.sequences,
        9,
        WindowMode::Reshape,
        Normalization::Mean,
    )
    .unwrap();
    for seed in 0..20 {
        let pso = PsoConfig {
            seed,
            ..Default::default()
        };
        let km = PsoKMeansConfig {
            pso: pso.clone(),
            ..Default::default()
        };
        let r = pso_kmeans(&items, 3, &km).unwrap();
        if !non_increasing(&r.trace) {
            return Err(format!("pso_kmeans seed {seed}: gbest increased"));
        }
        let seeds = seed_biclusters(&matrix, 3, 3, &km).unwrap();
        let b = pso_bicluster(
            &matrix,
            &BiclusterConfig {
                pso,
                ..Default::default()
            },
            &seeds,
        )
        .unwrap();
        if !non_increasing(&b.trace) {
            return Err(format!("pso_bicluster seed {seed}: gbest increased"));
        }
    }
    Ok("20 seeds each of pso_kmeans and pso_bicluster on the sample corpus".into())
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn pso_beats_kmeans() -> Outcome {
    let start = Instant::now();
    let centers = vec![
        vec![0.0, 0.0, 0.0],
        vec![10.0, 0.0, 5.0],
        vec![0.0, 10.0, -5.0],
    ];
    let (mut km, mut ps) = (Vec::new(), Vec::new());
    for seed in 0..20 {
        let (mut pts, _) = blobs(&centers, 20, 1.0, seed);
        pts.extend(uniform_points(10, 3, -5.0, 15.0, seed + 1000));
        km.push(
            kmeans_run(&pts, 3, &KMeansParams::default(), seed)
                .unwrap()
                .final_fitness,
        );
        let cfg = PsoKMeansConfig {
            pso: PsoConfig {
                seed,
                ..Default::default()
            },
            ..Default::default()
        };
        ps.push(pso_kmeans(&pts, 3, &cfg).unwrap().clusters.final_fitness);
    }
    let (mk, mp) = (median(km), median(ps));
    if mp > mk {
        return Err(format!("median pso_kmeans {mp:.3} > median kmeans {mk:.3}"));
    }
    within(
        start,
        Duration::from_secs(30),
        format!("median fitness pso_kmeans {mp:.3} <= kmeans {mk:.3}"),
    )
}

fn planted_bicluster() -> Outcome {
    let start = Instant::now();
    let mut hits = 0;
    for seed in 0..10 {
        let p = planted_additive_bicluster(40, 20, 8, 6, 10.0, 10.0, 5.0, seed);
        let planted = msr(&p.matrix, &p.rows, &p.cols);
        if planted > 1e-12 {
            return Err(format!("seed {seed}: planted block MSR {planted:e}"));
        }
        let pso = PsoConfig {
            seed,
            max_iter: 300,
            ..Default::default()
        };
        let seeds = seed_biclusters(
            &p.matrix,
            2,
            2,
            &PsoKMeansConfig {
                pso: pso.clone(),
                ..Default::default()
            },
        )
        .unwrap();
        let cfg = BiclusterConfig {
            pso,
            n_particles: Some(30),
            ..Default::default()
        };
        let out = pso_bicluster(&p.matrix, &cfg, &seeds).unwrap();
        let g = out.gbest();
        if jaccard(&g.rows, &p.rows) >= 0.8 && jaccard(&g.cols, &p.cols) >= 0.8 {
            hits += 1;
        }
    }
    if hits < 7 {
        return Err(format!("recovered in {hits}/10 seeds"));
    }
    within(
        start,
        Duration::from_secs(60),
        format!("gbest Jaccard >= 0.8 in {hits}/10 seeds"),
    )
}

fn tally_direction() -> Outcome {
    let start = Instant::now();
    let mut wins = 0;
    let mut counts = Vec::new();
    for seed in 0..10 {
        let (corpus, _) = planted_structural_corpus(CorpusSpec::default(), seed);
        let run = RunConfig {
            seed,
            k: 3,
            k_rows: 3,
            k_cols: 3,
            ..Default::default()
        };
        let report = compare_pipelines(&corpus, &run.pipeline()).unwrap();
        let (c, b) = (
            report.tally.counts_clusters[0],
            report.tally.counts_biclusters[0],
        );
        counts.push(format!("{b}/{c}"));
        if b >= c {
            wins += 1;
        }
    }
    if wins < 6 {
        return Err(format!(
            "biclusters >= clusters at 70% in {wins}/10 seeds ({})",
            counts.join(" ")
        ));
    }
    within(
        start,
        Duration::from_secs(120),
        format!(
            "biclusters >= clusters at 70% in {wins}/10 seeds (bic/clu {})",
            counts.join(" ")
        ),
    )
}

fn set(s: &str) -> ResidueSet {
    s.parse().unwrap()
}

/// Frequencies with equal mass on each letter of the given SAA strings.
fn equal_mass(saa: &[&str]) -> PositionFrequencies {
    let rows = saa
        .iter()
        .map(|s| {
            let mut row = [0.0; 20];
            let letters = set(s);
            for aa in letters.iter() {
                row[aa.index()] = 1.0 / letters.len() as f64;
            }
            row
        })
        .collect();
    PositionFrequencies {
        rows,
        zero_rows: vec![],
    }
}

fn check_table(name: &str, saa: &[&str], motifs: &[&str], want: &[Relation]) -> Result<(), String> {
    let freqs = equal_mass(saa);
    let spec = MotifSpec::PerPosition(motifs.iter().map(|m| set(m)).collect());
    let report = build_motif_report(name, &freqs, &spec, 100, MotifOptions::default());
    for (p, s) in report.positions.iter().zip(saa) {
        if p.saa != set(s) {
            return Err(format!(
                "{name} position {}: SAA {} != {s}",
                p.position, p.saa
            ));
        }
    }
    let got: Vec<Relation> = report.relations().into_iter().map(Option::unwrap).collect();
    if got != want {
        return Err(format!("{name}: {got:?} != {want:?}"));
    }
    Ok(())
}

fn table_relations() -> Outcome {
    use Relation::{Full, Partial};
    let m = "ADEGILKTV";
    let t2_saa = [
        "AGV", "AEFPTV", "EGLTV", "AEKQS", "EQSV", "ADLRV", "LRT", "ATV", "EGIKL",
    ];
    let t2_motif = [m, m, m, m, "RNQFPSY", m, m, m, m];
    let second = check_table(
        "second",
        &t2_saa,
        &t2_motif,
        &[
            Full, Partial, Full, Partial, Partial, Partial, Full, Full, Full,
        ],
    );
    let t3_saa = ["AGL", "DL", "LV", "EILV", "AV", "AL", "GLV", "GL", "ALV"];
    let third = check_table("third", &t3_saa, &[m; 9], &[Full; 9]);
    match (second, third) {
        (Ok(()), Ok(())) => Ok("both tables reproduce their Full/Partial columns".into()),
        (a, b) => Err([a.err(), b.err().or(Some("third table matches".into()))]
            .into_iter()
            .flatten()
            .collect::<Vec<_>>()
            .join("; ")),
    }
}

fn logo_math() -> Outcome {
    let mut single = [0.0; 20];
    single[0] = 1.0;
    let uniform = [0.05; 20];
    let mut half = [0.0; 20];
    half[3] = 0.5;
    half[7] = 0.5;
    let freqs = PositionFrequencies {
        rows: vec![single, uniform, half],
        zero_rows: vec![],
    };
    let cols = logo_columns(&freqs, 10, false);
    let want = [max_bits(), 0.0, 20f64.log2() - 1.0];
    for (c, w) in cols.iter().zip(want) {
        if (c.total_bits - w).abs() > 1e-9 {
            return Err(format!(
                "position {}: {} bits, want {w}",
                c.position, c.total_bits
            ));
        }
    }
    Ok(format!(
        "single = {:.6}, uniform = 0, two-letter = {:.6} bits",
        want[0], want[2]
    ))
}

fn compare_deterministic() -> Outcome {
    let d = sample_dir();
    let cfg = RunConfig {
        seed: 11,
        k: 3,
        k_rows: 3,
        k_cols: 3,
        ..Default::default()
    };
    let tmp = tempfile::tempdir().unwrap();
    let outs = [tmp.path().join("a"), tmp.path().join("b")];
    for o in &outs {
        cmd_compare(
            &cfg,
            &d.join("sequences.fasta"),
            &d.join("structures.ss"),
            o,
        )
        .map_err(|e| e.to_string())?;
    }
    for name in ["compare.json", "tally.csv"] {
        let a = std::fs::read(outs[0].join(name)).unwrap();
        let b = std::fs::read(outs[1].join(name)).unwrap();
        if a != b {
            return Err(format!("{name} differs between runs"));
        }
    }
    Ok("compare.json and tally.csv byte-identical across two runs".into())
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("MSR matches brute-force oracle", msr_oracle_equivalence),
        ("MSR shift invariants", msr_invariants),
        ("city-block metric laws", cityblock_laws),
        (
            "structure similarity and homology thresholds",
            similarity_thresholds,
        ),
        ("k-means planted blobs", kmeans_blobs),
        ("PSO gbest monotone", pso_monotone),
        ("PSO k-means vs k-means", pso_beats_kmeans),
        ("planted bicluster recovery", planted_bicluster),
        ("homology tally direction", tally_direction),
        ("SAA/motif relation tables", table_relations),
        ("logo information content", logo_math),
        ("end-to-end determinism", compare_deterministic),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
