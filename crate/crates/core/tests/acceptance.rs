//! Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Criteria 9-11 need the AMS dataset. They look for `HDC_AMS_DATASET`, then
//! `data/ams_dataset.csv` at the workspace root, and report SKIP when neither
//! exists.

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use hdc_core::classifier::Model;
use hdc_core::data::{
    fit_stats, mutual_information_column, split, Dataset, Feature, Measurement, MiTarget,
};
use hdc_core::encoder::{thermometer_encode, EncoderConfig, EncoderVariant};
use hdc_core::experiment::{
    dataset_mi, plan_sweep, run_sweep, ExperimentConfig, SweepRow, TABLE_DIMS,
};
use hdc_core::randomness::{
    generate_position_hvs, orthogonality_histogram, sobol_point, sylvester_matrix, LfsrState,
};
use hdc_core::{BipolarHV, LabelScheme, SourceKind, SplitSpec};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn c1_orthogonality() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for kind in SourceKind::ALL {
        let lo = orthogonality_histogram(&generate_position_hvs(kind, 1000, 100, 42).unwrap(), 50)
            .unwrap();
        let hi =
            orthogonality_histogram(&generate_position_hvs(kind, 10_000, 100, 42).unwrap(), 50)
                .unwrap();
        let good = (0.47..=0.53).contains(&lo.mean) && hi.std < lo.std;
        ok &= good;
        notes.push(format!(
            "{kind}: mean {:.4}, std D=1000 {:.4} > D=10000 {:.4}",
            lo.mean, lo.std, hi.std
        ));
    }
    check(ok, notes.join("; "))
}

fn c2_hadamard() -> Outcome {
    for k in 1..=10 {
        let n = 1usize << k;
        let h = sylvester_matrix(n).unwrap();
        for i in 0..n {
            for j in i..n {
                let dot: i32 = h[i]
                    .iter()
                    .zip(&h[j])
                    .map(|(&a, &b)| a as i32 * b as i32)
                    .sum();
                let want = if i == j { n as i32 } else { 0 };
                if dot != want {
                    return Outcome::Fail(format!("n={n}: (h h^T)[{i}][{j}] = {dot}, want {want}"));
                }
            }
        }
    }
    Outcome::Pass("h h^T = n I exactly for n = 2..1024".into())
}

fn c3_thermometer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for dim in [8usize, 1000] {
        for _ in 0..1000 {
            let (a, b): (f64, f64) = (rng.gen(), rng.gen());
            let (ta, tb) = (
                thermometer_encode(a, dim).unwrap(),
                thermometer_encode(b, dim).unwrap(),
            );
            let diff = ta.count_ones().abs_diff(tb.count_ones());
            let h = ta.hamming(&tb).unwrap();
            if h != diff as f64 / dim as f64 {
                return Outcome::Fail(format!(
                    "D={dim} a={a} b={b}: hamming {h}, ones diff {diff}"
                ));
            }
        }
    }
    Outcome::Pass("1000 pairs at D=8 and D=1000 exact".into())
}

fn c4_duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let dim = 1000;
    for _ in 0..1000 {
        let a: Vec<i8> = (0..dim).map(|_| if rng.gen() { 1 } else { -1 }).collect();
        let b: Vec<i8> = (0..dim).map(|_| if rng.gen() { 1 } else { -1 }).collect();
        let (pa, pb) = (
            BipolarHV::from_signs(&a).unwrap(),
            BipolarHV::from_signs(&b).unwrap(),
        );
        let (ba, bb) = (pa.to_binary(), pb.to_binary());
        // integer identity against a plain element-wise dot product
        let dot: i64 = a.iter().zip(&b).map(|(&x, &y)| x as i64 * y as i64).sum();
        let count = ba.hamming_count(&bb).unwrap() as i64;
        if dot != dim as i64 - 2 * count {
            return Outcome::Fail(format!("dot {dot} vs D - 2h {}", dim as i64 - 2 * count));
        }
        let cos = pa.cosine(&pb).unwrap();
        if cos != 1.0 - 2.0 * ba.hamming(&bb).unwrap() {
            return Outcome::Fail(format!("cosine {cos} differs from 1 - 2h"));
        }
    }
    Outcome::Pass("1000 pairs at D=1000 exact".into())
}

/// Plug-in MI of two discrete variables from their joint counts.
fn plugin_mi(x: &[u16], y: &[u16]) -> f64 {
    let n = x.len() as f64;
    let mut joint: HashMap<(u16, u16), f64> = HashMap::new();
    let mut px: HashMap<u16, f64> = HashMap::new();
    let mut py: HashMap<u16, f64> = HashMap::new();
    for (&a, &b) in x.iter().zip(y) {
        *joint.entry((a, b)).or_default() += 1.0;
        *px.entry(a).or_default() += 1.0;
        *py.entry(b).or_default() += 1.0;
    }
    joint
        .iter()
        .map(|(&(a, b), &c)| (c / n) * ((c * n) / (px[&a] * py[&b])).ln())
        .sum()
}

fn c5_mi_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m = 5000;
    let p_sick = [0.1, 0.3, 0.5, 0.7, 0.9];
    let xs: Vec<u16> = (0..m).map(|_| rng.gen_range(0..5)).collect();
    let mut ys: Vec<u16> = xs
        .iter()
        .map(|&x| u16::from(rng.gen_bool(p_sick[x as usize])))
        .collect();
    let xf: Vec<f64> = xs.iter().map(|&x| x as f64).collect();
    let oracle = plugin_mi(&xs, &ys);
    let est = mutual_information_column(&xf, &ys, 3, 1).unwrap();

    let perfect_y: Vec<u16> = (0..m).map(|i| (i % 2) as u16).collect();
    let perfect_x: Vec<f64> = perfect_y.iter().map(|&y| y as f64).collect();
    let perfect = mutual_information_column(&perfect_x, &perfect_y, 3, 1).unwrap();

    ys.shuffle(&mut rng);
    let shuffled = mutual_information_column(&xf, &ys, 3, 1).unwrap();

    let ln2 = std::f64::consts::LN_2;
    check(
        (est - oracle).abs() <= 0.05 && (perfect - ln2).abs() <= 0.05 && shuffled < 0.05,
        format!(
            "kNN {est:.4} vs plug-in {oracle:.4}; perfect {perfect:.4} vs ln2 {ln2:.4}; shuffled {shuffled:.4}"
        ),
    )
}

/// Two Gaussian clouds in 2-D, 400 samples, seeded.
fn gaussian_blobs(seed: u64) -> (Vec<Vec<f64>>, Vec<u16>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = move || {
        let (u1, u2): (f64, f64) = (rng.gen_range(f64::EPSILON..1.0), rng.gen());
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..400 {
        let c = (i % 2) as u16;
        let centre = if c == 0 { -1.5 } else { 1.5 };
        rows.push(vec![centre + 0.75 * normal(), centre + 0.75 * normal()]);
        labels.push(c);
    }
    (rows, labels)
}

fn blob_model(variant: EncoderVariant) -> (Model, Vec<Vec<f64>>, Vec<u16>) {
    let (rows, labels) = gaussian_blobs(6);
    let s = split(&labels, &vec![0; labels.len()], &SplitSpec::default()).unwrap();
    let pick = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<u16>) {
        (
            idx.iter().map(|&i| rows[i].clone()).collect(),
            idx.iter().map(|&i| labels[i]).collect(),
        )
    };
    let (xtr, ytr) = pick(&s.train);
    let (xte, yte) = pick(&s.test);
    let cfg = EncoderConfig {
        dim: 1000,
        source: SourceKind::Sobol,
        variant,
        seed: 42,
        alpha: 0.5,
        selected: vec![0, 1],
        stats: fit_stats(&rows, &s.train, &[0, 1]).unwrap(),
    };
    let model = Model::train(cfg, LabelScheme::Binary, &xtr, &ytr, 0).unwrap();
    (model, xte, yte)
}

fn c6_classifier() -> Outcome {
    let (model, xte, yte) = blob_model(EncoderVariant::Projection);
    let clean = model.evaluate(&xte, &yte).unwrap().accuracy;
    let noisy = model.noise_robustness(&xte, &yte, 0.1, 7).unwrap().accuracy;
    check(
        clean >= 0.95 && clean - noisy <= 0.05,
        format!("test accuracy {clean:.4}; with 10% bit flips {noisy:.4}"),
    )
}

fn c7_serialization() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut notes = Vec::new();
    let mut ok = true;
    for variant in EncoderVariant::ALL {
        let (model, xte, _) = blob_model(variant);
        let (p1, p2) = (dir.path().join("a.amshd"), dir.path().join("b.amshd"));
        model.save(&p1).unwrap();
        model.save(&p2).unwrap();
        let (b1, b2) = (std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
        let loaded = Model::load(&p1).unwrap();
        let same_preds = xte
            .iter()
            .all(|r| loaded.predict(r).unwrap() == model.predict(r).unwrap());
        ok &= same_preds && b1 == b2;
        if variant == EncoderVariant::Symbolic {
            let m = model.config().selected.len();
            let classes = model.classes().len();
            let header = 5 + 2 + 1 + 1 + 4 + 8 + 8 + 2 + 2 * m + 32 * m + 1 + 2;
            let payload = b1.len() - header - 2 * classes;
            let want = classes * 1000usize.div_ceil(8);
            ok &= payload == want;
            notes.push(format!("binary payload {payload} bytes (want {want})"));
        }
        notes.push(format!(
            "{variant}: predictions identical {same_preds}, saves identical {}",
            b1 == b2
        ));
    }
    check(ok, notes.join("; "))
}

fn c8_sequences() -> Outcome {
    for k in 0..=10u32 {
        let n = 1u64 << k;
        let mut hits = vec![0u32; n as usize];
        // point 0 is the origin, which sits in bin 0
        hits[0] += 1;
        for i in 1..n {
            hits[(sobol_point(1, i).unwrap() * n as f64) as usize] += 1;
        }
        if hits.iter().any(|&h| h != 1) {
            return Outcome::Fail(format!("Sobol dyadic bins uneven at k={k}"));
        }
    }
    for width in 2..=16u32 {
        let mut l = LfsrState::new(width, 1).unwrap();
        let start = l.state();
        let mut period = 0u64;
        loop {
            l.next_bit();
            period += 1;
            if l.state() == start {
                break;
            }
        }
        if period != (1 << width) - 1 {
            return Outcome::Fail(format!("LFSR width {width}: period {period}"));
        }
    }
    Outcome::Pass("Sobol bins exact for k <= 10; LFSR widths 2..16 full period".into())
}

fn dataset_path() -> Option<PathBuf> {
    if let Some(p) = std::env::var_os("HDC_AMS_DATASET") {
        return Some(PathBuf::from(p));
    }
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/ams_dataset.csv");
    p.exists().then_some(p)
}

fn c9_mi_ranking(ds: &Dataset) -> Outcome {
    let mi = dataset_mi(ds, MiTarget::Binary, 3, 42).unwrap();
    let spo2 = Feature::Measured(Measurement::SpO2).index();
    let small = [Measurement::Pdia, Measurement::CoPpm, Measurement::Hct]
        .map(|m| mi.scores[Feature::Measured(m).index()]);
    let top = mi.ranking()[0];
    check(
        top == spo2 && (mi.scores[spo2] - 0.371).abs() <= 0.05 && small.iter().all(|&s| s <= 0.02),
        format!(
            "top {}; SpO2 {:.4}; Pdia/CO_ppm/Hct {:.4}/{:.4}/{:.4}",
            Feature::ALL[top].column(),
            mi.scores[spo2],
            small[0],
            small[1],
            small[2]
        ),
    )
}

fn accuracy(rows: &[SweepRow], scheme: LabelScheme, source: SourceKind, dim: usize) -> Option<f64> {
    rows.iter()
        .find(|r| r.cell.scheme == scheme && r.cell.source == source && r.cell.dim == dim)
        .and_then(|r| r.result.as_ref().ok())
        .map(|m| m.accuracy)
}

fn c10_accuracy(rows: &[SweepRow]) -> Outcome {
    use LabelScheme::*;
    use SourceKind::*;
    let get = |s, k, d| accuracy(rows, s, k, d).unwrap_or(f64::NAN);
    let sobol = get(Binary, Sobol, 1000);
    let hada = get(Binary, Hadamard, 2000);
    let trend = get(Binary, Pseudo, 10_000) - get(Binary, Pseudo, 128);
    let multi = get(Multiclass, Hadamard, 2000);
    check(
        (sobol - 0.84).abs() <= 0.05 && (hada - 0.84).abs() <= 0.05 && trend >= 0.10 && (multi - 0.69).abs() <= 0.07,
        format!(
            "binary Sobol@1000 {sobol:.4}, Hadamard@2000 {hada:.4}, pseudo 10000-128 {trend:+.4}; multiclass Hadamard@2000 {multi:.4}"
        ),
    )
}

fn c11_grid(rows: &[SweepRow]) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for scheme in LabelScheme::ALL {
        let n = rows.iter().filter(|r| r.cell.scheme == scheme).count();
        let errors: Vec<String> = rows
            .iter()
            .filter(|r| r.cell.scheme == scheme)
            .filter_map(|r| r.result.as_ref().err().cloned())
            .collect();
        ok &= n == 18 && errors.is_empty();
        notes.push(format!(
            "{scheme}: {n} rows, {} errors {:?}",
            errors.len(),
            errors.first()
        ));
    }
    check(ok, notes.join("; "))
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, &str, Outcome, f64)> = Vec::new();
    let mut run = |id, name, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        results.push((id, name, o, t.elapsed().as_secs_f64()));
    };
    run(1, "orthogonality", &c1_orthogonality);
    run(2, "hadamard exactness", &c2_hadamard);
    run(3, "thermometer metric", &c3_thermometer);
    run(4, "cosine/hamming duality", &c4_duality);
    run(5, "MI estimator oracle", &c5_mi_oracle);
    run(6, "classifier sanity", &c6_classifier);
    run(7, "serialization", &c7_serialization);
    run(8, "sobol stratification and LFSR period", &c8_sequences);

    match dataset_path().map(|p| (Dataset::load(&p), p)) {
        Some((Ok(ds), _)) => {
            run(9, "MI ranking", &|| c9_mi_ranking(&ds));
            let (cells, _) = plan_sweep(&LabelScheme::ALL, &SourceKind::ALL, &TABLE_DIMS);
            let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
            let t = Instant::now();
            let rows = run_sweep(&ds, &ExperimentConfig::default(), &cells, jobs).unwrap();
            let secs = t.elapsed().as_secs_f64();
            results.push((10, "accuracy reproduction", c10_accuracy(&rows), secs));
            results.push((11, "bench grid", c11_grid(&rows), 0.0));
        }
        Some((Err(e), p)) => {
            for (id, name) in [
                (9, "MI ranking"),
                (10, "accuracy reproduction"),
                (11, "bench grid"),
            ] {
                results.push((
                    id,
                    name,
                    Outcome::Fail(format!("{}: {e}", p.display())),
                    0.0,
                ));
            }
        }
        None => {
            for (id, name) in [
                (9, "MI ranking"),
                (10, "accuracy reproduction"),
                (11, "bench grid"),
            ] {
                let why = "dataset not found (set HDC_AMS_DATASET or add data/ams_dataset.csv)";
                results.push((id, name, Outcome::Skip(why.into()), 0.0));
            }
        }
    }

    let mut failed = 0;
    for (id, name, outcome, secs) in &results {
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("{tag} [{id:>2}] {name} ({secs:.2}s): {detail}");
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
