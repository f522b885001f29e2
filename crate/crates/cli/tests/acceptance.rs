//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the verdict lines are always shown.
//! Exits non-zero if any criterion fails.

mod common;

use std::fs;
use std::time::{Duration, Instant};

use common::{fixture, run};
use markerdrift::index::{build_index_partitioned, to_bytes};
use markerdrift::report::signed_pct;
use markerdrift::synth::{generate, SynthConfig, YearPlan};
use markerdrift::{
    build_index, builtin_lexicon, count_increase, implied_total_ratio, yoy_change, Document,
    Lexicon, Operand, Query,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(
        elapsed < limit,
        format!("took {:.2?}, limit {:.0?}", elapsed, limit),
    )
}

/// Count increase as printed by `drift` for `series`.
fn printed_count_increase(report: &str, series: &str) -> Option<String> {
    let block = report
        .split("\n\n")
        .find(|b| b.starts_with(&format!("series: {series}\n")))?;
    let line = block.lines().find(|l| l.starts_with("increase "))?;
    let rest = line.split("count ").nth(1)?;
    Some(rest.split_whitespace().next()?.to_string())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let out = run(&["drift", "--counts", &fixture("paper_groups.csv")]);
    let elapsed = start.elapsed();
    check(
        out.code == 0,
        format!("drift exited {}: {}", out.code, out.stderr),
    )?;
    let expected = [
        ("group1", "+83.5%"),
        ("group2", "+16.3%"),
        ("group3", "+9.3%"),
        ("group4", "+18.5%"),
        ("group5", "+11.6%"),
    ];
    for (series, want) in expected {
        let got = printed_count_increase(&out.stdout, series);
        check(
            got.as_deref() == Some(want),
            format!("{series}: got {got:?}, want {want}"),
        )?;
    }
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "groups 1-5 report 83.5/16.3/9.3/18.5/11.6% in {elapsed:.2?}"
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let counts = fixture("paper_groups.csv");
    let mut pairs = Vec::new();
    for (growth, series) in [
        ("0.05", ["group4", "group5"]),
        ("0.11", ["group9", "group10"]),
    ] {
        let out = run(&[
            "excess", "--counts", &counts, "--series", series[0], "--series", series[1],
            "--growth", growth, "--format", "csv",
        ]);
        check(
            out.code == 0,
            format!("excess exited {}: {}", out.code, out.stderr),
        )?;
        for line in out.stdout.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            pairs.push((
                f[0].to_string(),
                f[5].parse::<u64>().unwrap(),
                f[7].parse::<i64>().unwrap(),
            ));
        }
    }
    let elapsed = start.elapsed();
    let want = [
        ("group4", 666573, 85761),
        ("group5", 1050914, 65772),
        ("group9", 103232, 60514),
        ("group10", 230338, 65735),
    ];
    for ((s, e, x), (ws, we, wx)) in pairs.iter().zip(want) {
        check(
            s == ws && *e == we && *x == wx,
            format!("{s}: expected/excess {e}/{x}, want {ws} {we}/{wx}"),
        )?;
    }
    check(pairs.len() == 4, format!("{} rows", pairs.len()))?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "(666573, 85761) (1050914, 65772) (103232, 60514) (230338, 65735) in {elapsed:.2?}"
    ))
}

fn criterion_3() -> Outcome {
    // (count 2022, count 2023, printed share-based increase, count increase to one decimal)
    let rows = [
        (3045u64, 16950u64, 4.684, "+456.7%"),
        (70375, 115560, 0.677, "+64.2%"),
        (24807, 32819, 0.351, "+32.3%"),
        (93002, 163746, 0.798, "+76.1%"),
        (207512, 296073, 0.457, "+42.7%"),
    ];
    let mut ratios = Vec::new();
    for (n0, n1, printed, want) in rows {
        let c = count_increase(n0, n1).map_err(|e| e.to_string())?;
        let oracle = n1 as f64 / n0 as f64 - 1.0;
        check(
            (c - oracle).abs() < 1e-12,
            format!("{n0}->{n1}: {c} vs {oracle}"),
        )?;
        check(
            signed_pct(c) == want,
            format!("{n0}->{n1}: {} want {want}", signed_pct(c)),
        )?;
        let r = implied_total_ratio(c, printed);
        check(
            (1.019..=1.023).contains(&r),
            format!("{n0}->{n1}: implied ratio {r:.5}"),
        )?;
        ratios.push(format!("{r:.4}"));
    }
    Ok(format!(
        "456.7/64.2/32.3/76.1/42.7%, implied total ratios {}",
        ratios.join(" ")
    ))
}

fn criterion_4() -> Outcome {
    let c = yoy_change(0.0210, 0.0200).map_err(|e| e.to_string())?;
    check((c - 0.05).abs() < 1e-12, format!("raw change {c}"))?;
    check(signed_pct(c) == "+5.0%", signed_pct(c))?;
    let out = run(&["drift", "--counts", &fixture("normalization.csv")]);
    let row = out
        .stdout
        .lines()
        .find(|l| l.trim_start().starts_with("2023"))
        .unwrap_or("");
    check(
        row.contains("2.10%") && row.trim_end().ends_with("+5.0%"),
        format!("drift row {row:?}"),
    )?;
    Ok("2.00% -> 2.10% reports +5.0%".into())
}

// ---- criterion 5: oracle equivalence ----------------------------------

const FILLER: [&str; 10] = [
    "data",
    "model",
    "results",
    "large",
    "language",
    "study",
    "intelligence",
    "artificially",
    "notably",
    "gpts",
];

fn random_corpus(rng: &mut ChaCha8Rng, lex: &Lexicon) -> Vec<Document> {
    let terms: Vec<&str> = lex.entries().iter().map(|e| e.term.as_str()).collect();
    let base = rng.random_range(2000..=2003);
    let n = rng.random_range(1..=200);
    (0..n)
        .map(|i| {
            let len = rng.random_range(0..60);
            let mut text = String::new();
            for _ in 0..len {
                let w = if rng.random_bool(0.35) {
                    *terms.choose(rng).unwrap()
                } else {
                    *FILLER.choose(rng).unwrap()
                };
                if rng.random_bool(0.15) {
                    text.push_str(&w.to_uppercase());
                } else {
                    text.push_str(w);
                }
                text.push_str([" ", ", ", ". ", " (", ") ", " 7"].choose(rng).unwrap());
            }
            Document::new(format!("doc{i}"), base + rng.random_range(0..3), text)
        })
        .collect()
}

fn brute_tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_ascii_alphabetic())
        .filter(|w| !w.is_empty())
        .map(str::to_ascii_lowercase)
        .collect()
}

fn brute_has(tokens: &[String], op: &Operand) -> bool {
    let words: Vec<&str> = op.key().split(' ').collect();
    tokens
        .windows(words.len())
        .any(|w| w.iter().zip(&words).all(|(a, b)| a == b))
}

fn brute_eval(q: &Query, tokens: &[String]) -> bool {
    match q {
        Query::Term(t) => brute_has(tokens, &Operand::Term(t.clone())),
        Query::Phrase(p) => brute_has(tokens, &Operand::Phrase(p.clone())),
        Query::AnyOf(ops) => ops.iter().any(|o| brute_has(tokens, o)),
        Query::AtLeast { k, operands } => {
            operands.iter().filter(|o| brute_has(tokens, o)).count() >= *k
        }
        Query::And(qs) => qs.iter().all(|q| brute_eval(q, tokens)),
        Query::Or(qs) => qs.iter().any(|q| brute_eval(q, tokens)),
    }
}

fn random_operand(rng: &mut ChaCha8Rng, lex: &Lexicon) -> Operand {
    let e = lex.entries().choose(rng).unwrap();
    if e.is_phrase() {
        Operand::Phrase(e.key())
    } else {
        Operand::Term(e.key())
    }
}

fn random_query(rng: &mut ChaCha8Rng, lex: &Lexicon, depth: usize) -> Query {
    if depth == 1 || rng.random_bool(0.3) {
        return match rng.random_range(0..4) {
            0 => Query::Term(
                lex.entries()
                    .iter()
                    .filter(|e| !e.is_phrase())
                    .choose(rng)
                    .unwrap()
                    .key(),
            ),
            1 => Query::Phrase(
                lex.entries()
                    .iter()
                    .filter(|e| e.is_phrase())
                    .choose(rng)
                    .unwrap()
                    .key(),
            ),
            2 => Query::any_of(
                (0..rng.random_range(1..=6))
                    .map(|_| random_operand(rng, lex))
                    .collect(),
            ),
            _ => {
                let ops: Vec<Operand> = (0..rng.random_range(1..=8))
                    .map(|_| random_operand(rng, lex))
                    .collect();
                let n = Query::any_of(ops.clone()).operands().len();
                Query::at_least(rng.random_range(1..=n), ops).expect("k within range")
            }
        };
    }
    let parts = (0..rng.random_range(2..=3))
        .map(|_| random_query(rng, lex, depth - 1))
        .collect();
    if rng.random_bool(0.5) {
        Query::And(parts)
    } else {
        Query::Or(parts)
    }
}

fn criterion_5() -> Outcome {
    let lex = builtin_lexicon();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let start = Instant::now();
    let (mut checks, mut mismatches, mut queries) = (0u64, 0u64, 0usize);
    let mut first_mismatch = None;
    for _ in 0..50 {
        let docs = random_corpus(&mut rng, &lex);
        let tokens: Vec<Vec<String>> = docs.iter().map(|d| brute_tokens(&d.text)).collect();
        let idx = build_index(&docs, &lex).map_err(|e| e.to_string())?;
        for _ in 0..120 {
            let q = random_query(&mut rng, &lex, 3);
            if q.depth() > 3 {
                return Err(format!("generated query deeper than 3: {q}"));
            }
            queries += 1;
            for &year in idx.years() {
                let want = docs
                    .iter()
                    .zip(&tokens)
                    .filter(|(d, t)| d.year == year && brute_eval(&q, t))
                    .count() as u64;
                let got = idx.eval_count(&q, year).map_err(|e| e.to_string())?;
                checks += 1;
                if got != want {
                    mismatches += 1;
                    first_mismatch
                        .get_or_insert(format!("{q} in {year}: index {got}, brute force {want}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    if let Some(m) = first_mismatch {
        return Err(format!("{mismatches} mismatches, first: {m}"));
    }
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!(
        "50 corpora, {queries} queries, {checks} year counts, 0 mismatches in {elapsed:.2?}"
    ))
}

// ---- criterion 6: synthetic injection ---------------------------------

fn criterion_6() -> Outcome {
    let lex = builtin_lexicon();
    let y = 2023;
    // Flat 10% prevalence on a corpus growing 10% a year, then a jump.
    let totals = [1000usize, 1100, 1210, 1331, 1464];
    let marked = [100usize, 110, 121, 133, 186];
    let plan = totals
        .iter()
        .zip(marked)
        .enumerate()
        .map(|(i, (&docs, marked))| YearPlan {
            year: y - 4 + i as i32,
            docs,
            marked,
        })
        .collect();
    let mut cfg =
        SynthConfig::new(2024, plan, lex.group("strong").unwrap().to_vec()).excluding_lexicon(&lex);
    cfg.words_per_doc = 60;
    let docs = generate(&cfg);

    // The organic growth the corpus was built with, and the excess it implies.
    let g = 0.10;
    let organic = (marked[3] as f64 * (1.0 + g)).round() as i64;
    let injected = marked[4] as i64 - organic;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = dir.path().join("synthetic.jsonl");
    let mut buf = Vec::new();
    markerdrift::corpus::write_corpus(&docs, &mut buf).map_err(|e| e.to_string())?;
    fs::write(&corpus, buf).map_err(|e| e.to_string())?;
    let index = dir.path().join("synthetic.idx");
    let (corpus, index) = (
        corpus.to_string_lossy().into_owned(),
        index.to_string_lossy().into_owned(),
    );
    let out = run(&["index", "--corpus", &corpus, "--out", &index]);
    check(out.code == 0, out.stderr)?;
    let out = run(&[
        "excess",
        "--index",
        &index,
        "--series",
        "any(strong)",
        "--growth",
        "0.1",
        "--format",
        "json",
    ]);
    check(out.code == 0, out.stderr.clone())?;
    let v: serde_json::Value = serde_json::from_str(&out.stdout).map_err(|e| e.to_string())?;
    let estimate = v[0]["excess"].as_i64().ok_or("no excess in output")?;
    check(
        v[0]["target_year"] == y,
        format!("target year {}", v[0]["target_year"]),
    )?;
    check(
        (estimate - injected).abs() <= 1,
        format!("estimated excess {estimate}, injected {injected}"),
    )?;
    Ok(format!(
        "injected {injected}, estimated {estimate} at g = 0.10"
    ))
}

// ---- criterion 7: determinism and persistence -------------------------

fn criterion_7() -> Outcome {
    let lex = builtin_lexicon();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let docs: Vec<Document> = (0..5)
        .flat_map(|_| random_corpus(&mut rng, &lex))
        .enumerate()
        .map(|(i, mut d)| {
            d.id = format!("d{i}");
            d
        })
        .collect();
    let queries: Vec<Query> = (0..200).map(|_| random_query(&mut rng, &lex, 3)).collect();
    let answers = |idx: &markerdrift::YearTermIndex| -> Result<Vec<u64>, String> {
        let mut v = Vec::new();
        for q in &queries {
            for &y in idx.years() {
                v.push(idx.eval_count(q, y).map_err(|e| e.to_string())?);
            }
        }
        Ok(v)
    };
    let reference = build_index(&docs, &lex).map_err(|e| e.to_string())?;
    let want = answers(&reference)?;
    for (trial, parts) in [1usize, 2, 5, 16].into_iter().enumerate() {
        let mut shuffled = docs.clone();
        shuffled.shuffle(&mut rng);
        let idx = build_index_partitioned(&shuffled, &lex, parts).map_err(|e| e.to_string())?;
        check(
            answers(&idx)? == want,
            format!("answers differ (trial {trial}, {parts} partitions)"),
        )?;
        check(to_bytes(&idx) == to_bytes(&reference), "index bytes differ")?;
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("r.idx");
    markerdrift::save_index(&reference, &path).map_err(|e| e.to_string())?;
    let loaded = markerdrift::load_index(&path).map_err(|e| e.to_string())?;
    check(
        loaded.totals() == reference.totals(),
        "totals changed on reload",
    )?;
    check(answers(&loaded)? == want, "answers changed on reload")?;
    for e in lex.entries() {
        for &y in reference.years() {
            check(
                loaded.df(&e.key(), y) == reference.df(&e.key(), y),
                format!("df of {} in {y}", e.term),
            )?;
        }
    }

    let idx = path.to_string_lossy().into_owned();
    let svg = |name: &str| -> Result<Vec<u8>, String> {
        let out = dir.path().join(name).to_string_lossy().into_owned();
        let r = run(&[
            "plot",
            "--index",
            &idx,
            "--series",
            "any(strong)",
            "--series",
            "atleast(2, adjective)",
            "--out",
            &out,
        ]);
        check(r.code == 0, r.stderr)?;
        fs::read(&out).map_err(|e| e.to_string())
    };
    check(
        svg("a.svg")? == svg("b.svg")?,
        "plot output differs between runs",
    )?;
    Ok(format!(
        "{} docs, {} queries: order/partition invariant, reload identical, plot byte-identical",
        docs.len(),
        queries.len()
    ))
}

// ---- criterion 8: indexing throughput ---------------------------------

fn criterion_8() -> Outcome {
    let lex = builtin_lexicon();
    let years = 2019..=2023;
    let plan = years
        .map(|year| YearPlan {
            year,
            docs: 20_000,
            marked: 2_000,
        })
        .collect();
    let mut markers = lex.group("strong").unwrap().to_vec();
    markers.extend(lex.group("control").unwrap().iter().cloned());
    let cfg = SynthConfig::new(8, plan, markers).excluding_lexicon(&lex);
    let docs = generate(&cfg);
    let words: usize = docs
        .iter()
        .take(100)
        .map(|d| d.text.split_whitespace().count())
        .sum::<usize>()
        / 100;

    // build_index runs on the calling thread.
    let start = Instant::now();
    let idx = build_index(&docs, &lex).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(
        idx.doc_count() == 100_000,
        format!("{} documents indexed", idx.doc_count()),
    )?;
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!(
        "100000 docs (~{words} words, {} lexicon entries) indexed in {elapsed:.2?} on one thread",
        lex.entries().len()
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("table reproduction", criterion_1),
        ("excess reproduction", criterion_2),
        ("multi-term rows", criterion_3),
        ("normalization example", criterion_4),
        ("oracle equivalence", criterion_5),
        ("synthetic injection", criterion_6),
        ("determinism and persistence", criterion_7),
        ("indexing throughput", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {} ({name}): PASS - {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL - {why}", i + 1);
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
