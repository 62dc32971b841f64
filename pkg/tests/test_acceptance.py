"""Release gate: one test per headline guarantee, one printed line each.

The heavier checks share a module-scoped synthetic setup: n-grams from
the bundled corpus, a 5000/500 train/test split generated from them, and
one fully trained model.  Everything here goes through the public API.
"""

import hashlib
import itertools
import math
import time
from pathlib import Path

import numpy as np
import pytest

from hashseg.active import ALConfig, al_run
from hashseg.cli import main as cli_main
from hashseg.evalviz import baseline_label_predictor, evaluate, svd_top2
from hashseg.lmbaseline import score_segmentation, segment_dp
from hashseg.rng import Rng
from hashseg.segmodel import (
    TrainConfig,
    Vocab,
    _forward,
    init_model,
    load_checkpoint,
    loss_and_grads,
    mean_max_log_prob,
    predict,
    save_checkpoint,
    sequence_loss,
    train,
)
from hashseg.synthgen import apply_labels, generate_dataset, labels_from_segmentation
from hashseg.textcorpus import NGramTable, extract_ngrams_lines, tokenize

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
CORPUS = DATA_DIR / "corpus_en.txt"
STOPWORDS = DATA_DIR / "stopwords_en.txt"


@pytest.fixture(scope="module")
def corpus_grams():
    stop = frozenset(STOPWORDS.read_text(encoding="utf-8").split())
    with open(CORPUS, encoding="utf-8") as fh:
        return extract_ngrams_lines((tokenize(line) for line in fh),
                                    stopwords=stop, min_freq=2)


@pytest.fixture(scope="module")
def synth_split(corpus_grams):
    items = generate_dataset(corpus_grams, 5500, seed=20160415)
    return items[:5000], items[5000:]


@pytest.fixture(scope="module")
def full_model(synth_split):
    train_set, _ = synth_split
    return train(train_set, TrainConfig(seed=7))


# ---------------------------------------------------------------------------
# 1. segmenter DP against brute-force enumeration
# ---------------------------------------------------------------------------

LEXICON = ("the", "cat", "sat", "on", "mat", "a", "dog", "ran", "in", "park",
           "sun", "set", "fun", "run", "at", "rat", "ton", "tar", "art", "nap")


def enumerate_best(table, text, max_word_len=20, unigram_only=False):
    """Argmax over all cut subsets, honoring forced underscore cuts."""
    body = []
    forced = set()
    for ch in text.lower():
        if ch == "_":
            if body:
                forced.add(len(body))
        else:
            body.append(ch)
    body = "".join(body)
    if not body:
        return ()
    forced.discard(len(body))
    best = None
    for mask in itertools.product((0, 1), repeat=len(body) - 1):
        cuts = {i + 1 for i, bit in enumerate(mask) if bit}
        if not forced <= cuts:
            continue
        bounds = sorted(cuts | {0, len(body)})
        words = tuple(body[a:b] for a, b in zip(bounds, bounds[1:]))
        if any(len(w) > max_word_len for w in words):
            continue
        score = score_segmentation(table, words, unigram_only=unigram_only)
        key = (-score, len(words), words)
        if best is None or key < best[0]:
            best = (key, words)
    return best[1] if best else ()


def test_criterion_1_dp_matches_enumeration(gate):
    started = time.perf_counter()
    lines = ["the cat sat on the mat", "a dog ran in the park at sun set",
             "fun run at the park", "a rat sat on tar", "art of the nap",
             "the dog ran a fun run", "cat nap at sun set on the mat"]
    table = NGramTable.from_token_lines(tokenize(line) for line in lines)
    alphabet = sorted(set("".join(LEXICON)))
    rng = Rng(101)
    agree = 0
    for trial in range(500):
        n = 1 + rng.randint(12)
        chars = [alphabet[rng.randint(len(alphabet))] for _ in range(n)]
        if trial % 5 == 0 and n >= 3:
            chars[1 + rng.randint(n - 2)] = "_"
        text = "".join(chars)
        if not text.strip("_"):
            text = "cat"
        unigram_only = trial % 7 == 0
        expected = enumerate_best(table, text, unigram_only=unigram_only)
        got = segment_dp(table, text, unigram_only=unigram_only).words
        if tuple(got) == expected:
            agree += 1
    elapsed = time.perf_counter() - started
    ok = agree == 500 and elapsed < 10
    gate(1, "dp-vs-enumeration", ok, f"{agree}/500 agree in {elapsed:.1f}s")
    assert ok


# ---------------------------------------------------------------------------
# 2. analytic gradients against central finite differences
# ---------------------------------------------------------------------------


def test_criterion_2_gradient_check(gate):
    started = time.perf_counter()
    vocab = Vocab("abcdef")
    assert vocab.size == 7
    model = init_model(vocab, TrainConfig(embed_dim=3, hidden_dim=4), Rng(3))
    ids = vocab.encode(list("abfca"))
    labels = (1, 0, 0, 1, 1)
    _, grads = loss_and_grads(model, ids, labels)

    h = 1e-5
    worst = 0.0
    probed = 0
    rng = Rng(44)
    for param, grad in zip(model.param_arrays(), grads.arrays()):
        count = min(20, param.size)
        coords = (range(param.size) if count == param.size
                  else rng.sample_indices(param.size, count))
        for k in coords:
            keep = param.flat[k]
            param.flat[k] = keep + h
            up = sequence_loss(model, ids, labels)
            param.flat[k] = keep - h
            down = sequence_loss(model, ids, labels)
            param.flat[k] = keep
            fd = (up - down) / (2 * h)
            analytic = grad.flat[k]
            rel = abs(analytic - fd) / max(abs(analytic), abs(fd), 1e-6)
            worst = max(worst, rel)
            probed += 1
    elapsed = time.perf_counter() - started
    ok = worst < 1e-4 and elapsed < 5
    gate(2, "gradient-check", ok,
         f"max rel err {worst:.2e} over {probed} coords in {elapsed:.1f}s")
    assert ok


# ---------------------------------------------------------------------------
# 3. overfit guarantee on a small training set
# ---------------------------------------------------------------------------


def test_criterion_3_overfit_small_set(gate, corpus_grams):
    started = time.perf_counter()
    data = generate_dataset(corpus_grams, 100, seed=11)
    model = None
    epochs_used = 0
    accuracy = 0.0
    chunk = 40
    while epochs_used < 200:
        config = TrainConfig(epochs=chunk, seed=13 + epochs_used)
        model = train(data, config, start=model)
        epochs_used += chunk
        accuracy = evaluate(model, data).accuracy
        if accuracy >= 0.99:
            break
    elapsed = time.perf_counter() - started
    ok = accuracy >= 0.99 and elapsed < 120
    gate(3, "overfit-small-set", ok,
         f"train acc {accuracy:.3f} after {epochs_used} epochs in {elapsed:.0f}s")
    assert ok


# ---------------------------------------------------------------------------
# 4. trained model beats the n-gram baseline by a wide margin
# ---------------------------------------------------------------------------


def test_criterion_4_model_vs_baseline(gate, synth_split, full_model):
    started = time.perf_counter()
    _, test_set = synth_split
    model_acc = evaluate(full_model, test_set).accuracy
    table = NGramTable.from_corpus_file(CORPUS)
    baseline_acc = evaluate(baseline_label_predictor(table), test_set).accuracy
    elapsed = time.perf_counter() - started
    gap = model_acc - baseline_acc
    ok = gap >= 0.15 and model_acc >= 0.85 and elapsed < 900
    gate(4, "model-vs-baseline", ok,
         f"model {model_acc:.3f} vs baseline {baseline_acc:.3f} "
         f"(gap {gap * 100:.1f}pt) in {elapsed:.0f}s")
    assert ok


# ---------------------------------------------------------------------------
# 5. half the pool, chosen by uncertainty, matches the full pool
# ---------------------------------------------------------------------------


def test_criterion_5_al_half_budget(gate, synth_split, full_model):
    started = time.perf_counter()
    pool, test_set = synth_split
    config = ALConfig(round_size=1000, retrain_mode="continue",
                      epochs_per_round=2, seed=7, train=TrainConfig(seed=7))
    log = al_run(pool, test_set, config)
    half_ids = log.selection_order[: len(pool) // 2]
    half_model = train([pool[i] for i in half_ids], TrainConfig(seed=7))
    half_acc = evaluate(half_model, test_set).accuracy
    full_acc = evaluate(full_model, test_set).accuracy
    elapsed = time.perf_counter() - started
    ok = half_acc >= full_acc - 0.02 and elapsed < 1800
    gate(5, "al-half-budget", ok,
         f"half {half_acc:.3f} vs full {full_acc:.3f} in {elapsed:.0f}s")
    assert ok


# ---------------------------------------------------------------------------
# 6. confidence score equals brute force over all label sequences
# ---------------------------------------------------------------------------


def label_table(model, text):
    """The (T, 2) log-probability table exactly as `predict` computes it."""
    ids = model.vocab.encode(list(text))
    logits, _, _, _ = _forward(model, ids)
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1))
    return shifted - log_z[:, None]


def brute_force_mnlp(log_probs):
    n = log_probs.shape[0]
    bits = np.array(list(itertools.product((0, 1), repeat=n)))
    return log_probs[np.arange(n), bits].mean(axis=1).max()


def test_criterion_6_mnlp_brute_force(gate):
    started = time.perf_counter()
    chars = "abcdefgh"
    models = [init_model(Vocab(chars), TrainConfig(embed_dim=3, hidden_dim=3),
                         Rng(seed)) for seed in range(8)]
    rng = Rng(606)
    exact = 0
    for case in range(1000):
        n = 1 + rng.randint(10)
        # the factorization identity on a random probability table
        p1 = np.array([rng.random() for _ in range(n)])
        table = np.log(np.column_stack([1.0 - p1, p1]))
        table_ok = float(table.max(axis=1).mean()) == brute_force_mnlp(table)
        # and on a real model's own table
        model_ok = True
        if case % 2 == 0:
            model = models[rng.randint(len(models))]
            text = "".join(chars[rng.randint(len(chars))] for _ in range(n))
            pred = predict(model, text)
            brute = brute_force_mnlp(label_table(model, text))
            model_ok = (pred.mnlp == brute
                        and mean_max_log_prob(model, text) == brute)
        if table_ok and model_ok:
            exact += 1
    elapsed = time.perf_counter() - started
    ok = exact == 1000
    gate(6, "mnlp-brute-force", ok, f"{exact}/1000 exact in {elapsed:.1f}s")
    assert ok


# ---------------------------------------------------------------------------
# 7. truncated SVD against a full Jacobi oracle
# ---------------------------------------------------------------------------


def jacobi_singular_values(X, sweeps=100):
    A = np.array(X, dtype=np.float64, copy=True)
    n = A.shape[1]
    for _ in range(sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                a = float(A[:, p] @ A[:, p])
                b = float(A[:, q] @ A[:, q])
                c = float(A[:, p] @ A[:, q])
                if c == 0.0 or abs(c) <= 1e-15 * math.sqrt(a * b):
                    continue
                rotated = True
                tau = (b - a) / (2.0 * c)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                cs = 1.0 / math.sqrt(1.0 + t * t)
                sn = cs * t
                A[:, [p, q]] = A[:, [p, q]] @ np.array([[cs, sn], [-sn, cs]])
        if not rotated:
            break
    return np.sort(np.linalg.norm(A, axis=0))[::-1]


def test_criterion_7_svd_vs_jacobi(gate):
    started = time.perf_counter()
    rng = Rng(707)
    worst_sigma = 0.0
    worst_resid = 0.0
    for trial in range(100):
        if trial == 0:
            m, n = 60, 50
        else:
            m, n = 3 + rng.randint(58), 2 + rng.randint(49)
        X = np.array([rng.uniform(-2, 2) for _ in range(m * n)]).reshape(m, n)
        Xc = X - X.mean(axis=0)
        oracle = jacobi_singular_values(Xc)
        sigmas, components, _ = svd_top2(X)
        scale = max(1.0, oracle[0])
        worst_sigma = max(worst_sigma,
                          abs(sigmas[0] - oracle[0]) / scale,
                          abs(sigmas[1] - oracle[1]) / scale)
        resid_impl = np.linalg.norm(Xc - (Xc @ components.T) @ components)
        resid_oracle = math.sqrt(max(0.0, float((oracle[2:] ** 2).sum())))
        worst_resid = max(worst_resid, abs(resid_impl - resid_oracle) / scale)
    elapsed = time.perf_counter() - started
    ok = worst_sigma < 1e-8 and worst_resid < 1e-6
    gate(7, "svd-vs-jacobi", ok,
         f"max sigma err {worst_sigma:.1e}, max residual err {worst_resid:.1e} "
         f"over 100 matrices in {elapsed:.1f}s")
    assert ok


# ---------------------------------------------------------------------------
# 8. byte-identical artifacts from identical configuration
# ---------------------------------------------------------------------------

ARTIFACTS = ("grams.tsv", "data.tsv", "model.ckpt", "report.json",
             "report.tsv", "al.json", "al.csv", "proj.csv")


def run_pipeline(root):
    root.mkdir(parents=True, exist_ok=True)
    corpus = root / "corpus.txt"
    lines = ["summer party at the beach", "we love music and summer",
             "the beach party was great fun", "music at the summer party",
             "great fun time with friends", "photos from the summer party"]
    corpus.write_text("\n".join(lines * 5) + "\n", encoding="utf-8")
    steps = [
        ["ngrams", str(corpus), str(root / "grams.tsv"), "--max-n", "2"],
        ["generate", str(root / "grams.tsv"), str(root / "data.tsv"),
         "--count", "200", "--seed", "5"],
        ["train", str(root / "data.tsv"), str(root / "model.ckpt"),
         "--epochs", "1", "--embed-dim", "8", "--hidden-dim", "8", "--seed", "3"],
        ["eval", str(root / "data.tsv"), str(root / "report.json"),
         "--checkpoint", str(root / "model.ckpt")],
        ["al-run", str(root / "data.tsv"), str(root / "data.tsv"),
         str(root / "al.json"), "--round-size", "100", "--epochs", "1",
         "--embed-dim", "4", "--hidden-dim", "4"],
        ["viz-embeddings", str(root / "model.ckpt"), str(root / "proj.csv")],
    ]
    for argv in steps:
        assert cli_main(argv) == 0
    return {name: hashlib.sha256((root / name).read_bytes()).hexdigest()
            for name in ARTIFACTS}


def test_criterion_8_determinism(gate, tmp_path):
    started = time.perf_counter()
    first = run_pipeline(tmp_path / "one")
    second = run_pipeline(tmp_path / "two")
    stable = [name for name in ARTIFACTS if first[name] == second[name]]
    elapsed = time.perf_counter() - started
    ok = len(stable) == len(ARTIFACTS)
    gate(8, "determinism", ok,
         f"{len(stable)}/{len(ARTIFACTS)} artifacts byte-identical in {elapsed:.0f}s")
    assert ok, [name for name in ARTIFACTS if first[name] != second[name]]


# ---------------------------------------------------------------------------
# 9. round trips: labels <-> words, checkpoint save/load
# ---------------------------------------------------------------------------


def test_criterion_9_round_trips(gate, corpus_grams, tmp_path):
    started = time.perf_counter()
    items = generate_dataset(corpus_grams, 10000, seed=21)
    for item in items:
        words = apply_labels(item.chars, item.labels)
        assert tuple(words) == item.gold_segmentation
        joiners = []
        pos = 0
        for word in words[:-1]:
            pos += len(word)
            if pos < len(item.chars) and item.chars[pos] == "_":
                joiners.append("_")
                pos += 1
            else:
                joiners.append("")
        rebuilt = labels_from_segmentation(words, joiners, type_id=item.type_id)
        assert rebuilt.chars == item.chars
        assert rebuilt.labels == item.labels
        assert rebuilt.gold_segmentation == item.gold_segmentation

    model = train(items[:30],
                  TrainConfig(embed_dim=5, hidden_dim=6, epochs=2, seed=9))
    path = tmp_path / "roundtrip.ckpt"
    save_checkpoint(model, path)
    loaded = load_checkpoint(path)
    fields_exact = (
        loaded.vocab == model.vocab and loaded.merge == model.merge
        and all(np.array_equal(a, b) for a, b in
                zip(loaded.param_arrays(), model.param_arrays()))
    )
    elapsed = time.perf_counter() - started
    ok = fields_exact
    gate(9, "round-trips", ok,
         f"{len(items)} label round trips, checkpoint fields exact, "
         f"{elapsed:.0f}s")
    assert ok
