use std::time::Instant;

use anyhow::{Context, Result};
use hdc_core::data::{split, Feature};
use hdc_core::encoder::thermometer_encode;
use hdc_core::experiment::{dataset_mi, encoder_config, plan_sweep, prepare, run_sweep};
use hdc_core::randomness::{orthogonality_histogram, OrthogonalityHistogram};
use hdc_core::{generate_position_hvs, Dataset, EvalReport, Model};

use crate::config::{usage, RunConfig};
use crate::report::{bar, markdown_table, num, OutDir};

fn load_dataset(cfg: &RunConfig) -> Result<Dataset> {
    let path = cfg.dataset()?;
    let ds = Dataset::load(path).with_context(|| format!("loading dataset {}", path.display()))?;
    if !ds.imputations.is_empty() {
        eprintln!(
            "note: imputed {} missing cells with column means",
            ds.imputations.len()
        );
    }
    Ok(ds)
}

fn feature_name(i: usize) -> &'static str {
    Feature::from_index(i).map_or("?", Feature::column)
}

fn timing(out: &OutDir, name: &str, rows: &[(&str, f64)]) -> Result<()> {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|(k, v)| vec![k.to_string(), num(*v)])
        .collect();
    out.write_csv(name, &["stage", "seconds"], &rows)?;
    Ok(())
}

pub fn mi(cfg: &RunConfig, out: &OutDir) -> Result<()> {
    let ds = load_dataset(cfg)?;
    let e = &cfg.exp;
    let scores = dataset_mi(&ds, e.mi_target, e.mi_k, e.seed)?;
    let ranking = scores.ranking();
    let rows: Vec<Vec<String>> = ranking
        .iter()
        .map(|&i| vec![feature_name(i).to_string(), num(scores.scores[i])])
        .collect();
    out.write_csv("mi.csv", &["feature", "score"], &rows)?;

    let max = scores.scores.iter().copied().fold(0.0, f64::max);
    let md_rows: Vec<Vec<String>> = ranking
        .iter()
        .enumerate()
        .map(|(rank, &i)| {
            let b = bar(scores.scores[i], max, 40);
            vec![
                (rank + 1).to_string(),
                Feature::from_index(i)
                    .map_or("?", Feature::label)
                    .to_string(),
                format!("{:.4}", scores.scores[i]),
                if b.is_empty() { b } else { format!("`{b}`") },
            ]
        })
        .collect();
    let md = format!(
        "# Feature MI scores\n\n{} rows, k = {}\n\n{}",
        ds.len(),
        scores.k,
        markdown_table(&["rank", "feature", "MI", ""], &md_rows)
    );
    out.write("mi.md", md)?;
    let top = ranking[0];
    println!(
        "ranked {} features; top {} ({:.4})",
        ranking.len(),
        feature_name(top),
        scores.scores[top]
    );
    Ok(())
}

pub fn train(cfg: &RunConfig, out: &OutDir) -> Result<()> {
    let ds = load_dataset(cfg)?;
    let e = &cfg.exp;
    let prep = prepare(&ds, e)?;
    let rows = prep.rows(&ds, &prep.split.train);
    let labels = prep.labels_of(&prep.split.train);
    let start = Instant::now();
    let model = Model::train(encoder_config(e, &prep), e.scheme, &rows, &labels, e.epochs)?;
    let secs = start.elapsed().as_secs_f64();

    let path = cfg.model_path();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    model.save(&path)?;

    let feats: Vec<Vec<String>> = prep
        .mi
        .ranking()
        .iter()
        .map(|&i| {
            vec![
                feature_name(i).to_string(),
                num(prep.mi.scores[i]),
                u8::from(prep.selected.contains(&i)).to_string(),
            ]
        })
        .collect();
    out.write_csv("features.csv", &["feature", "train_mi", "selected"], &feats)?;
    timing(out, "train_timing.csv", &[("train", secs)])?;
    let names: Vec<&str> = prep.selected.iter().map(|&i| feature_name(i)).collect();
    println!(
        "trained {} {} model on {} rows with features [{}]; saved {}",
        e.scheme,
        e.variant,
        rows.len(),
        names.join(", "),
        path.display()
    );
    Ok(())
}

fn metrics_rows(report: &EvalReport, class_names: &[&str]) -> Vec<Vec<String>> {
    let mut rows = vec![
        vec!["accuracy".to_string(), num(report.accuracy)],
        vec!["macro_f1".to_string(), num(report.macro_f1)],
    ];
    for (c, name) in class_names.iter().enumerate() {
        rows.push(vec![format!("precision_{name}"), num(report.precision[c])]);
        rows.push(vec![format!("recall_{name}"), num(report.recall[c])]);
        rows.push(vec![format!("f1_{name}"), num(report.f1[c])]);
    }
    rows
}

pub fn eval(cfg: &RunConfig, out: &OutDir) -> Result<()> {
    let path = cfg.model_path();
    let model = Model::load(&path).with_context(|| format!("loading model {}", path.display()))?;
    let e = &cfg.exp;
    if model.scheme() != e.scheme {
        return Err(usage(format!(
            "model {} was trained for the {} scheme but the run asks for {}",
            path.display(),
            model.scheme(),
            e.scheme
        )));
    }
    let mc = model.config();
    if (mc.dim, mc.source, mc.variant) != (e.dim, e.source, e.variant) {
        eprintln!(
            "warning: evaluating with the model's own encoder (D={}, {}, {}), not the configured one",
            mc.dim, mc.source, mc.variant
        );
    }
    let ds = load_dataset(cfg)?;
    let labels = ds.labels(e.scheme)?;
    let parts = split(&labels, &ds.subject_ids(), &e.split)?;
    let rows: Vec<Vec<f64>> = parts.test.iter().map(|&i| ds.features[i].clone()).collect();
    let truth: Vec<u16> = parts.test.iter().map(|&i| labels[i]).collect();
    let report = model.evaluate(&rows, &truth)?;
    let names = e.scheme.class_names();

    let mut metrics = metrics_rows(&report, names);
    if cfg.flip_rate > 0.0 {
        let noisy = model.noise_robustness(&rows, &truth, cfg.flip_rate, e.seed)?;
        metrics.push(vec!["flip_rate".into(), num(cfg.flip_rate)]);
        metrics.push(vec!["noisy_accuracy".into(), num(noisy.accuracy)]);
        metrics.push(vec!["noisy_macro_f1".into(), num(noisy.macro_f1)]);
    }
    out.write_csv("metrics.csv", &["metric", "value"], &metrics)?;

    let mut header = vec!["truth"];
    header.extend_from_slice(names);
    let confusion: Vec<Vec<String>> = report
        .confusion
        .iter()
        .enumerate()
        .map(|(t, row)| {
            std::iter::once(names[t].to_string())
                .chain(row.iter().map(u64::to_string))
                .collect()
        })
        .collect();
    out.write_csv("confusion.csv", &header, &confusion)?;

    // one line per test record, grouped by subject then in file order
    let mut order: Vec<usize> = (0..parts.test.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (&ds.records[parts.test[a]], &ds.records[parts.test[b]]);
        ra.subject
            .cmp(&rb.subject)
            .then(parts.test[a].cmp(&parts.test[b]))
    });
    let mut header = vec![
        "row",
        "subject",
        "event",
        "time",
        "truth",
        "predicted",
        "correct",
    ];
    let score_cols: Vec<String> = names.iter().map(|n| format!("score_{n}")).collect();
    header.extend(score_cols.iter().map(String::as_str));
    let mut listing = Vec::with_capacity(order.len());
    let mut per_subject: Vec<(String, usize, usize)> = Vec::new();
    for &t in &order {
        let idx = parts.test[t];
        let rec = &ds.records[idx];
        let pred = model.predict(&rows[t])?;
        let ok = pred.label == truth[t];
        let mut line = vec![
            (idx + 1).to_string(),
            rec.subject.clone(),
            rec.event.clone(),
            rec.time.clone(),
            names[truth[t] as usize].to_string(),
            names[pred.label as usize].to_string(),
            u8::from(ok).to_string(),
        ];
        line.extend(pred.scores.iter().map(|&s| num(s)));
        listing.push(line);
        match per_subject.last_mut() {
            Some((s, n, c)) if *s == rec.subject => {
                *n += 1;
                *c += usize::from(ok);
            }
            _ => per_subject.push((rec.subject.clone(), 1, usize::from(ok))),
        }
    }
    out.write_csv("predictions.csv", &header, &listing)?;
    let subjects: Vec<Vec<String>> = per_subject
        .iter()
        .map(|(s, n, c)| {
            vec![
                s.clone(),
                n.to_string(),
                c.to_string(),
                num(*c as f64 / *n as f64),
            ]
        })
        .collect();
    out.write_csv(
        "subjects.csv",
        &["subject", "samples", "correct", "accuracy"],
        &subjects,
    )?;
    timing(
        out,
        "eval_timing.csv",
        &[("inference", report.inference_time.as_secs_f64())],
    )?;
    println!(
        "accuracy {:.4}, macro F1 {:.4} on {} test rows",
        report.accuracy,
        report.macro_f1,
        truth.len()
    );
    Ok(())
}

pub fn bench(cfg: &RunConfig, out: &OutDir) -> Result<()> {
    if cfg.schemes.is_empty() || cfg.sources.is_empty() || cfg.dims.is_empty() {
        return Err(usage("bench needs non-empty schemes, sources and dims"));
    }
    let ds = load_dataset(cfg)?;
    let (cells, warnings) = plan_sweep(&cfg.schemes, &cfg.sources, &cfg.dims);
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let rows = run_sweep(&ds, &cfg.exp, &cells, cfg.jobs)?;

    let mut table = Vec::with_capacity(rows.len());
    let mut times = Vec::with_capacity(rows.len());
    let mut failed = 0;
    for row in &rows {
        let c = row.cell;
        let key = [
            c.scheme.to_string(),
            c.source.to_string(),
            c.dim.to_string(),
        ];
        match &row.result {
            Ok(m) => {
                table.push(
                    [
                        &key[..],
                        &["ok".into(), num(m.accuracy), num(m.macro_f1), String::new()],
                    ]
                    .concat(),
                );
                times.push(
                    [
                        &key[..],
                        &[
                            num(m.train_time.as_secs_f64()),
                            num(m.inference_time.as_secs_f64()),
                        ],
                    ]
                    .concat(),
                );
            }
            Err(msg) => {
                failed += 1;
                eprintln!(
                    "warning: {} {} D={} failed: {msg}",
                    c.scheme, c.source, c.dim
                );
                table.push(
                    [
                        &key[..],
                        &["error".into(), String::new(), String::new(), msg.clone()],
                    ]
                    .concat(),
                );
            }
        }
    }
    let header = [
        "scheme", "source", "dim", "status", "accuracy", "macro_f1", "error",
    ];
    out.write_csv("bench.csv", &header, &table)?;
    out.write_csv(
        "bench_timing.csv",
        &[
            "scheme",
            "source",
            "dim",
            "train_seconds",
            "inference_seconds",
        ],
        &times,
    )?;

    let mut md = String::from("# Accuracy by source and dimensionality\n");
    for scheme in cfg
        .schemes
        .iter()
        .filter(|s| rows.iter().any(|r| r.cell.scheme == **s))
    {
        let dims: Vec<usize> = cells
            .iter()
            .filter(|c| c.scheme == *scheme)
            .map(|c| c.dim)
            .fold(Vec::new(), |mut v, d| {
                if !v.contains(&d) {
                    v.push(d);
                }
                v
            });
        let dim_names: Vec<String> = dims.iter().map(|d| format!("D={d}")).collect();
        let mut header = vec!["source"];
        header.extend(dim_names.iter().map(String::as_str));
        let mut md_rows = Vec::new();
        for source in cfg
            .sources
            .iter()
            .filter(|s| rows.iter().any(|r| r.cell.source == **s))
        {
            let mut line = vec![source.to_string()];
            for &d in &dims {
                let cell = rows.iter().find(|r| {
                    r.cell.scheme == *scheme && r.cell.source == *source && r.cell.dim == d
                });
                line.push(match cell.map(|r| &r.result) {
                    Some(Ok(m)) => format!("{:.4}", m.accuracy),
                    Some(Err(_)) => "error".into(),
                    None => String::new(),
                });
            }
            md_rows.push(line);
        }
        md.push_str(&format!(
            "\n## {scheme}\n\n{}",
            markdown_table(&header, &md_rows)
        ));
    }
    out.write("bench.md", md)?;
    println!("{} cells, {} failed", rows.len(), failed);
    Ok(())
}

fn histogram_rows(h: &OrthogonalityHistogram) -> Vec<Vec<String>> {
    (0..h.bins.len())
        .map(|b| {
            let (lo, hi) = h.bin_edges(b);
            vec![num(lo), num(hi), num(h.bins[b])]
        })
        .collect()
}

pub fn orthohist(cfg: &RunConfig, out: &OutDir) -> Result<()> {
    let m = cfg.count;
    if m < 2 {
        return Err(usage(format!("count must be at least 2, got {m}")));
    }
    if cfg.dims.is_empty() || cfg.bins == 0 {
        return Err(usage("orthohist needs at least one dimension and one bin"));
    }
    let e = &cfg.exp;
    let mut summary = Vec::new();
    for &dim in &cfg.dims {
        let positions = generate_position_hvs(e.source, dim, m, e.seed)?;
        let values: Vec<_> = (0..m)
            .map(|i| thermometer_encode(i as f64 / (m - 1) as f64, dim))
            .collect::<hdc_core::Result<_>>()?;
        for (kind, hvs) in [("position", &positions), ("feature", &values)] {
            let h = orthogonality_histogram(hvs, cfg.bins)?;
            out.write_csv(
                &format!("orthohist_{kind}_d{dim}.csv"),
                &["bin_lo", "bin_hi", "fraction"],
                &histogram_rows(&h),
            )?;
            println!("{kind:>8} D={dim:<6} mean {:.4} std {:.4}", h.mean, h.std);
            summary.push(vec![
                kind.to_string(),
                dim.to_string(),
                h.pairs.to_string(),
                num(h.mean),
                num(h.std),
            ]);
        }
    }
    out.write_csv(
        "orthohist_summary.csv",
        &["kind", "dim", "pairs", "mean", "std"],
        &summary,
    )?;
    Ok(())
}
