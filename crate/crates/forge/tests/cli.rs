use std::fs;
use std::path::{Path, PathBuf};

use pseudo_forge::execute;
use tempfile::TempDir;

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["pseudo-forge"];
    argv.extend_from_slice(args);
    execute(argv)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap()
}

const SEED: &str = "the cat sat on the mat\nhe goes home\nshe likes apples very much\nwe are here\n";

#[test]
fn version_and_usage_exit_codes() {
    assert_eq!(run(&["version"]), 0);
    assert_eq!(run(&["--help"]), 0);
    assert_eq!(run(&["no-such-command"]), 1);
    assert_eq!(run(&[]), 1);
}

#[test]
fn noise_direct_is_reproducible() {
    let d = Dir::new();
    let seed = d.file("seed.txt", SEED);
    let (a, b) = (d.path("a.tsv"), d.path("b.tsv"));
    for out in [&a, &b] {
        assert_eq!(run(&["noise-direct", "--in", s(&seed), "--out", s(out), "--mu-mask", "0.5", "--seed", "42"]), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let text = read(&a);
    assert_eq!(text.lines().count(), 4);
    for (line, target) in text.lines().zip(SEED.lines()) {
        assert_eq!(line.split('\t').nth(1), Some(target));
    }
}

#[test]
fn seed_is_required_for_random_subcommands() {
    let d = Dir::new();
    let seed = d.file("seed.txt", SEED);
    assert_eq!(run(&["noise-direct", "--in", s(&seed)]), 1);
    let cfg = d.file("run.cfg", "seed = 9\nmu_mask = 0.3\n");
    let out = d.path("o.tsv");
    assert_eq!(run(&["noise-direct", "--config", s(&cfg), "--in", s(&seed), "--out", s(&out)]), 0);
}

#[test]
fn conflicting_and_invalid_flags() {
    let d = Dir::new();
    let seed = d.file("seed.txt", SEED);
    assert_eq!(run(&["noise-direct", "--in", s(&seed), "--seed", "1", "--mu-mask", "0.3", "--mu", "0.3,0.25,0.25,0.2"]), 1);
    assert_eq!(run(&["noise-direct", "--in", s(&seed), "--seed", "1", "--mu", "0.5,0.5,0.5,0.5"]), 2);
    assert_eq!(run(&["noise-direct", "--in", s(&seed), "--seed", "1", "--mu-mask", "0.9"]), 2);
}

#[test]
fn data_errors_exit_two() {
    let d = Dir::new();
    let missing = d.path("missing.txt");
    assert_eq!(run(&["noise-direct", "--in", s(&missing), "--seed", "1"]), 2);
    let masked = d.file("masked.txt", "a \u{27E8}mask\u{27E9} b\n");
    assert_eq!(run(&["noise-direct", "--in", s(&masked), "--seed", "1"]), 2);
    let bad = d.file("bad.tsv", "a\tb\nno tab\n");
    assert_eq!(run(&["dedup", "--in", s(&bad)]), 2);
}

#[test]
fn score_perfect_correction() {
    let d = Dir::new();
    let src = d.file("src", "He go home\nI am fine\n");
    let fixed = d.file("fixed", "He goes home\nI am fine\n");
    assert_eq!(run(&["score", "--src", s(&src), "--hyp", s(&fixed), "--ref", s(&fixed)]), 0);
    let short = d.file("short", "He goes home\n");
    assert_eq!(run(&["score", "--src", s(&src), "--hyp", s(&short), "--ref", s(&fixed)]), 2);
}

#[test]
fn bpe_cli_roundtrip() {
    let d = Dir::new();
    let text = "low lower lowest newer wider\nlow low new newest\n";
    let corpus = d.file("c.txt", text);
    let codes = d.path("codes");
    let seg = d.path("seg");
    let back = d.path("back");
    assert_eq!(run(&["bpe-learn", "--in", s(&corpus), "--merges", "20", "--out", s(&codes)]), 0);
    assert!(read(&codes).starts_with("#version: pseudo-forge-bpe-1\n"));
    assert_eq!(run(&["bpe-apply", "--codes", s(&codes), "--in", s(&corpus), "--out", s(&seg)]), 0);
    assert!(read(&seg).contains("@@"));
    assert_eq!(run(&["bpe-decode", "--in", s(&seg), "--out", s(&back)]), 0);
    assert_eq!(read(&back), text);
}

#[test]
fn dedup_subsample_compose() {
    let d = Dir::new();
    let g = d.file("g.tsv", "a b\ta c\nx\tx\n");
    let dp = d.file("dp.tsv", "p q\tp r\ns\tt\nu\tv\n");
    let dd = d.path("dd.tsv");
    assert_eq!(run(&["dedup", "--in", s(&g), "--out", s(&dd)]), 0);
    assert_eq!(read(&dd), "a b\ta c\n");

    let sub = d.path("sub.tsv");
    assert_eq!(run(&["subsample", "--in", s(&dp), "--n", "2", "--seed", "4", "--out", s(&sub)]), 0);
    assert_eq!(read(&sub).lines().count(), 2);

    let joint = d.path("joint.tsv");
    let manifest = d.path("m.txt");
    assert_eq!(
        run(&["compose", "--genuine", s(&dd), "--pseudo", s(&dp), "--seed", "1", "--out", s(&joint), "--manifest", s(&manifest)]),
        0
    );
    let joint_text = read(&joint);
    assert_eq!(joint_text.lines().count(), 4);
    assert_eq!(joint_text.matches("\tgenuine").count(), 1);
    assert!(read(&manifest).contains("regime = joint"));

    let pre = d.path("pre.txt");
    assert_eq!(run(&["compose", "--regime", "pretrain", "--genuine", s(&dd), "--pseudo", s(&dp), "--seed", "1", "--manifest", s(&pre)]), 0);
    let text = read(&pre);
    assert!(text.contains("[stage pretrain]") && text.contains("[stage finetune]"));
    assert_eq!(
        run(&["compose", "--regime", "pretrain", "--genuine", s(&dd), "--pseudo", s(&dp), "--seed", "1", "--out", s(&joint)]),
        1
    );
}

#[test]
fn backtranslate_with_toy_scorer() {
    let d = Dir::new();
    let seed = d.file("seed.txt", "he goes\n");
    let scorer = d.file(
        "toy.txt",
        "#vocab: he go goes\n* ||| ||| he 0.9\n* ||| ||| eos 0.1\n* ||| he ||| go 0.8\n* ||| he ||| eos 0.2\n* ||| he go ||| eos 1\n",
    );
    let out = d.path("bt.tsv");
    assert_eq!(
        run(&["backtranslate", "--in", s(&seed), "--scorer", s(&scorer), "--beta", "0", "--max-len", "4", "--seed", "3", "--out", s(&out)]),
        0
    );
    assert_eq!(read(&out), "he go\the goes\n");
    let sample = d.path("sample.tsv");
    assert_eq!(
        run(&["backtranslate", "--in", s(&seed), "--scorer", s(&scorer), "--method", "sample", "--max-len", "4", "--seed", "3", "--out", s(&sample)]),
        0
    );
    let bad = d.file("bad.txt", "#vocab: a\n* ||| ||| a 0.5\n* ||| ||| eos 0.3\n");
    assert_eq!(run(&["backtranslate", "--in", s(&seed), "--scorer", s(&bad), "--seed", "3"]), 2);
}

#[test]
fn sse_and_workers_do_not_change_output() {
    let d = Dir::new();
    let seed = d.file("seed.txt", &SEED.repeat(50));
    let dp = d.path("dp.tsv");
    assert_eq!(run(&["noise-direct", "--in", s(&seed), "--seed", "5", "--out", s(&dp)]), 0);
    let (a, b) = (d.path("a.tsv"), d.path("b.tsv"));
    assert_eq!(run(&["sse", "--in", s(&dp), "--sse-rate", "0.1", "--seed", "6", "--workers", "1", "--out", s(&a)]), 0);
    assert_eq!(run(&["sse", "--in", s(&dp), "--sse-rate", "0.1", "--seed", "6", "--workers", "4", "--out", s(&b)]), 0);
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&dp));
    let zero = d.path("zero.tsv");
    assert_eq!(run(&["sse", "--in", s(&dp), "--sse-rate", "0", "--seed", "6", "--out", s(&zero)]), 0);
    assert_eq!(read(&zero), read(&dp));
}

#[test]
fn rerank_and_gate() {
    let d = Dir::new();
    let nbest = d.file("nb", "0 ||| one ||| -1\n0 ||| two ||| -2\n1 ||| three ||| -1\n");
    let scores = d.file("r2l", "-3\n-0.5\n-1 -3\n");
    let best = d.path("best");
    let full = d.path("full");
    assert_eq!(
        run(&["rerank", "--nbest", s(&nbest), "--r2l-scores", s(&scores), "--out", s(&best), "--nbest-out", s(&full)]),
        0
    );
    assert_eq!(read(&best), "two\nthree\n");
    assert_eq!(read(&full).lines().next(), Some("0 ||| two ||| -2.5"));
    let short = d.file("short", "-1\n");
    assert_eq!(run(&["rerank", "--nbest", s(&nbest), "--r2l-scores", s(&short)]), 2);
    assert_eq!(run(&["rerank", "--nbest", s(&nbest)]), 1);

    let src = d.file("src", "He go\nfine here\n");
    let hyp = d.file("hyp", "He goes\nfine there\n");
    let verdicts = d.file("v", "1\n0\n");
    let gated = d.path("gated");
    assert_eq!(run(&["gate", "--src", s(&src), "--hyp", s(&hyp), "--verdicts", s(&verdicts), "--out", s(&gated)]), 0);
    assert_eq!(read(&gated), "He goes\nfine here\n");
    assert_eq!(run(&["gate", "--src", s(&src), "--hyp", s(&hyp), "--out", s(&gated)]), 0);
    assert_eq!(read(&gated), read(&hyp));
}

#[test]
fn sweep_table_is_byte_stable() {
    let d = Dir::new();
    let dev_text: String = (0..30).map(|i| format!("the cat {i} sat mat\tthe cat {i} sat on the mat\n")).collect();
    let dev = d.file("dev.tsv", &dev_text);
    let (a, b) = (d.path("a"), d.path("b"));
    for (out, workers) in [(&a, "1"), (&b, "3")] {
        assert_eq!(
            run(&["sweep", "--param", "mu-mask", "--values", "0.1,0.5", "--trials", "2", "--dev", s(&dev), "--seed", "7", "--no-timing", "--workers", workers, "--out", s(out)]),
            0
        );
    }
    let table = read(&a);
    assert_eq!(table, read(&b));
    assert!(table.starts_with("param\tvalue\ttrial\tseed\tP\tR\tF0.5\tseconds\n"));
    assert_eq!(table.lines().count(), 1 + 2 * 3);
    assert_eq!(run(&["sweep", "--param", "beta", "--values", "2,1", "--dev", s(&dev), "--seed", "7"]), 1);
}

#[test]
fn sweep_with_external_command() {
    let d = Dir::new();
    let seed = d.file("seed.txt", SEED);
    let out = d.path("table");
    let work = d.path("work");
    assert_eq!(
        run(&[
            "sweep", "--param", "dp-size", "--values", "1,3", "--trials", "1", "--in", s(&seed),
            "--eval-cmd", "wc -l < {pseudo} | awk '{print $1, $1, $1}'",
            "--work-dir", s(&work), "--seed", "2", "--no-timing", "--out", s(&out),
        ]),
        0
    );
    let table = read(&out);
    let rows: Vec<&str> = table.lines().collect();
    assert!(rows[1].contains("\t1.0000\t1.0000\t1.0000\t"), "{table}");
    assert!(rows[3].contains("\t3.0000\t3.0000\t3.0000\t"), "{table}");
    assert_eq!(
        run(&["sweep", "--param", "dp-size", "--values", "1", "--trials", "1", "--in", s(&seed), "--eval-cmd", "false", "--work-dir", s(&work), "--seed", "2"]),
        2
    );
}
