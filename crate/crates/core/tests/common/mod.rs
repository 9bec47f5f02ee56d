#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use patchsim_core::embedding::objective::PvdmExample;
use patchsim_core::similarity::cosine;
use patchsim_core::{EmbeddingModel, TokenSequence};

pub fn fixture_corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus")
}

pub fn copy_dir(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let dest = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_dir(&entry.path(), &dest);
        } else {
            fs::copy(entry.path(), dest).unwrap();
        }
    }
}

/// Write one bug directory in the documented layout.
pub fn write_bug(
    root: &Path,
    bug_id: &str,
    original: &str,
    faulty_line: usize,
    developer: &str,
    candidates: &[(&str, &str)],
) {
    let dir = root.join(bug_id);
    fs::create_dir_all(dir.join("candidates")).unwrap();
    fs::write(
        dir.join("meta.json"),
        format!("{{\"project\": \"eslint\", \"faulty_line\": {faulty_line}}}"),
    )
    .unwrap();
    fs::write(dir.join("original.js"), original).unwrap();
    fs::write(dir.join("developer.js"), developer).unwrap();
    for (id, src) in candidates {
        fs::write(dir.join("candidates").join(format!("{id}.js")), src).unwrap();
    }
}

/// Every file under `root` as (relative path, bytes), sorted.
pub fn tree(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    fn walk(base: &Path, dir: &Path, out: &mut Vec<(String, Vec<u8>)>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(base, &path, out);
            } else {
                let rel = path
                    .strip_prefix(base)
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                out.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    walk(root, root, &mut out);
    out.sort();
    out
}

/// Bug ids and candidate counts of the ten Eslint bugs studied in the
/// original experiment.
pub const ESLINT_BUGS: [(&str, usize); 10] = [
    ("Eslint 1", 4),
    ("Eslint 41", 3),
    ("Eslint 47", 3),
    ("Eslint 72", 7),
    ("Eslint 94", 14),
    ("Eslint 100", 12),
    ("Eslint 217", 4),
    ("Eslint 221", 221),
    ("Eslint 321", 5),
    ("Eslint 323", 192),
];

/// A corpus with the same shape as the published one: ten bugs with the
/// published candidate counts. Sources are synthetic.
pub fn write_eslint_replica(root: &Path) {
    for (bug_id, n) in ESLINT_BUGS {
        let original = "function f(a) {\n  const b = a;\n  if (b === 1) {\n    return true;\n  }\n  return false;\n}\n";
        let developer = original.replace("b === 1", "b === 0");
        let cands: Vec<(String, String)> = (0..n)
            .map(|i| {
                (
                    format!("p{i:03}"),
                    original.replace("b === 1", &format!("b === {}", i + 2)),
                )
            })
            .collect();
        let refs: Vec<(&str, &str)> = cands
            .iter()
            .map(|(a, b)| (a.as_str(), b.as_str()))
            .collect();
        write_bug(root, bug_id, original, 3, &developer, &refs);
    }
}

fn random_vec(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-0.6..0.6)).collect()
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt();
    let scale = a
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(b.iter().map(|x| x * x).sum::<f64>().sqrt());
    if scale < 1e-12 {
        diff
    } else {
        diff / scale
    }
}

/// Central differences of the loss with respect to one parameter block,
/// perturbing a private copy of every block.
fn numeric_grad(blocks: &[Vec<f64>], n_ctx: usize, which: usize) -> Vec<f64> {
    const H: f64 = 1e-6;
    let loss = |blocks: &[Vec<f64>]| {
        PvdmExample {
            doc: &blocks[0],
            contexts: blocks[1..1 + n_ctx].iter().map(Vec::as_slice).collect(),
            target: &blocks[1 + n_ctx],
            noise: blocks[2 + n_ctx..].iter().map(Vec::as_slice).collect(),
        }
        .loss()
    };
    (0..blocks[which].len())
        .map(|k| {
            let mut plus = blocks.to_vec();
            plus[which][k] += H;
            let mut minus = blocks.to_vec();
            minus[which][k] -= H;
            (loss(&plus) - loss(&minus)) / (2.0 * H)
        })
        .collect()
}

/// Largest relative error between the analytic and numeric gradients over
/// every parameter block of one random example.
pub fn gradient_check_error(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = rng.gen_range(1..=8);
    let n_ctx = rng.gen_range(0..=4);
    let n_noise = rng.gen_range(0..=5);
    let blocks: Vec<Vec<f64>> = (0..2 + n_ctx + n_noise)
        .map(|_| random_vec(&mut rng, dim))
        .collect();

    let ex = PvdmExample {
        doc: &blocks[0],
        contexts: blocks[1..1 + n_ctx].iter().map(Vec::as_slice).collect(),
        target: &blocks[1 + n_ctx],
        noise: blocks[2 + n_ctx..].iter().map(Vec::as_slice).collect(),
    };
    let g = ex.gradient();

    let mut worst: f64 = rel_err(&g.doc, &numeric_grad(&blocks, n_ctx, 0));
    for c in 0..n_ctx {
        worst = worst.max(rel_err(&g.context, &numeric_grad(&blocks, n_ctx, 1 + c)));
    }
    worst = worst.max(rel_err(&g.target, &numeric_grad(&blocks, n_ctx, 1 + n_ctx)));
    for k in 0..n_noise {
        worst = worst.max(rel_err(
            &g.noise[k],
            &numeric_grad(&blocks, n_ctx, 2 + n_ctx + k),
        ));
    }
    worst
}

/// Twenty documents over {x1..x5} and twenty over {y1..y5}.
pub fn two_cluster_corpus() -> Vec<TokenSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut docs = Vec::new();
    for (prefix, n) in [("x", 20), ("y", 20)] {
        for i in 0..n {
            let tokens = (0..12)
                .map(|_| format!("{prefix}{}", rng.gen_range(1..=5)))
                .collect();
            docs.push(TokenSequence {
                doc_id: format!("{prefix}/{i}"),
                tokens,
            });
        }
    }
    docs
}

pub fn cluster_separation(model: &EmbeddingModel) -> (f64, f64) {
    let ids = model.doc_ids().to_vec();
    let (mut intra, mut n_intra, mut inter, mut n_inter) = (0.0, 0, 0.0, 0);
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            let c = cosine(
                &model.doc_vector_f64(&ids[i]).unwrap(),
                &model.doc_vector_f64(&ids[j]).unwrap(),
            )
            .unwrap();
            if ids[i][..1] == ids[j][..1] {
                intra += c;
                n_intra += 1;
            } else {
                inter += c;
                n_inter += 1;
            }
        }
    }
    (intra / n_intra as f64, inter / n_inter as f64)
}
