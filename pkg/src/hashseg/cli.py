"""Command line front end.

Subcommands cover the whole pipeline: n-gram extraction, synthetic
dataset generation, training, segmentation, the n-gram baseline,
evaluation, the active learning loop, and embedding projection.

Option values resolve with a fixed precedence: command line flags beat
the optional ``--config`` JSON file, which beats built-in defaults.
Every command that writes a primary output also writes a sidecar
``<output>.config.json`` recording the fully resolved options, so a run
can be reproduced from its artifacts alone.  Sidecars carry no
timestamps; rerunning the same command yields byte-identical files.

Errors print one line to stderr, ``hashseg: error [<category>]:
<message>``, and map to stable exit codes:

====  ============  =============================================
code  category      meaning
====  ============  =============================================
0     -             success
1     internal      unexpected failure (a bug, please report)
2     usage         bad flags, bad config keys, bad combinations
3     io            missing or unreadable/unwritable files
4     data-format   input file that does not parse
5     checkpoint    unreadable, wrong-version, or malformed model
====  ============  =============================================
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass

from .active import AL_SCHEMA_VERSION  # noqa: F401  (re-exported for tooling)
from .active import RETRAIN_MODES, ALConfig, al_run, write_al_csv, write_al_json
from .evalviz import (
    baseline_label_predictor,
    evaluate,
    project_embeddings,
    write_eval_json,
    write_eval_tsv,
    write_projection_csv,
)
from .lmbaseline import segment_dp
from .segmodel import (
    MERGE_MODES,
    CheckpointError,
    TrainConfig,
    load_checkpoint,
    predict,
    save_checkpoint,
    train,
)
from .synthgen import (
    DatasetFormatError,
    apply_labels,
    generate_dataset,
    read_dataset,
    write_dataset,
)
from .textcorpus import (
    NGramTable,
    extract_ngrams_lines,
    load_stopwords,
    read_corpus_tokens,
    read_ngrams_tsv,
    write_ngrams_tsv,
)

logger = logging.getLogger(__name__)

CATEGORY_EXIT = {
    "internal": 1,
    "usage": 2,
    "io": 3,
    "data-format": 4,
    "checkpoint": 5,
}


class CliError(Exception):
    def __init__(self, category: str, message: str):
        super().__init__(message)
        self.category = category


FLAG = "flag"  # marker type for store_true options


@dataclass(frozen=True)
class Opt:
    """One configurable option: a CLI flag that a config file can preset."""

    name: str  # dest and config-file key
    flag: str
    type: object  # int, float, str, or FLAG
    default: object
    help: str
    choices: tuple = None


_SEED = Opt("seed", "--seed", int, 0, "random seed")
_EPOCHS = Opt("epochs", "--epochs", int, 5, "training epochs")
_LR = Opt("learning_rate", "--lr", float, 0.1, "SGD learning rate")
_EMBED = Opt("embed_dim", "--embed-dim", int, 50, "character embedding width")
_HIDDEN = Opt("hidden_dim", "--hidden-dim", int, 64, "LSTM width per direction")
_CLIP = Opt("clip_norm", "--clip-norm", float, 5.0, "global gradient norm cap")
_MERGE = Opt("merge", "--merge", str, "concat",
             "how to fuse the two LSTM directions", MERGE_MODES)
_MAXWORD = Opt("max_word_len", "--max-word-len", int, 20,
               "longest word the segmenter may propose")
_UNIGRAM = Opt("unigram_only", "--unigram-only", FLAG, False,
               "score words independently, no bigram context")

COMMANDS = {
    "ngrams": {
        "help": "extract frequent word n-grams from a corpus",
        "positionals": [
            ("corpus", "corpus text file, one post per line"),
            ("out", "output TSV of ngram<TAB>frequency"),
        ],
        "options": [
            Opt("min_n", "--min-n", int, 1, "shortest n-gram"),
            Opt("max_n", "--max-n", int, 3, "longest n-gram"),
            Opt("min_freq", "--min-freq", int, 1, "drop n-grams rarer than this"),
            Opt("stopwords", "--stopwords", str, None,
                "stopword file, one word per line"),
        ],
    },
    "generate": {
        "help": "synthesize a labeled hashtag dataset from n-grams",
        "positionals": [
            ("ngrams", "n-gram TSV from the ngrams command"),
            ("out", "output dataset TSV"),
        ],
        "options": [
            Opt("count", "--count", int, 1000, "hashtags to generate"),
            _SEED,
        ],
    },
    "train": {
        "help": "train the character BiLSTM labeler",
        "positionals": [
            ("data", "labeled dataset TSV"),
            ("out", "checkpoint file to write"),
        ],
        "options": [
            _EPOCHS, _LR, _SEED, _MERGE, _EMBED, _HIDDEN, _CLIP,
            Opt("start", "--start", str, None,
                "checkpoint to continue training from"),
            Opt("format_version", "--format-version", int, 1,
                "checkpoint format version to write"),
        ],
    },
    "segment": {
        "help": "segment hashtags with a trained model",
        "positionals": [
            ("checkpoint", "trained model checkpoint"),
            ("hashtags", "input file, one hashtag per line"),
            ("out", "output TSV of hashtag<TAB>segmentation<TAB>confidence"),
        ],
        "options": [],
    },
    "baseline": {
        "help": "segment hashtags with the n-gram language model",
        "positionals": [
            ("corpus", "corpus text file the LM counts come from"),
            ("hashtags", "input file, one hashtag per line"),
            ("out", "output TSV of hashtag<TAB>segmentation"),
        ],
        "options": [_MAXWORD, _UNIGRAM,
                    Opt("alpha", "--alpha", float, 1.0,
                        "additive smoothing for unigram probabilities")],
    },
    "eval": {
        "help": "score a segmenter against gold labels",
        "positionals": [
            ("data", "labeled dataset TSV"),
            ("out", "report JSON to write (a .tsv summary lands next to it)"),
        ],
        "options": [
            Opt("checkpoint", "--checkpoint", str, None,
                "evaluate this trained model"),
            Opt("baseline_corpus", "--baseline-corpus", str, None,
                "evaluate the n-gram baseline built from this corpus"),
            Opt("tsv", "--tsv", str, None,
                "where to put the one-line summary (default: out with .tsv)"),
            _MAXWORD, _UNIGRAM,
        ],
    },
    "al-run": {
        "help": "run the active learning loop over a pool",
        "positionals": [
            ("pool", "pool dataset TSV (labels revealed as items are picked)"),
            ("test", "held-out labeled dataset TSV"),
            ("out", "run log JSON to write"),
        ],
        "options": [
            Opt("round_size", "--round-size", int, 1000,
                "items to move per round"),
            Opt("retrain_mode", "--retrain-mode", str, "continue",
                "continue from previous weights or retrain from scratch",
                RETRAIN_MODES),
            Opt("epochs_per_round", "--epochs-per-round", int, 2,
                "epochs per round in continue mode"),
            _SEED, _EPOCHS, _LR, _MERGE, _EMBED, _HIDDEN, _CLIP,
            Opt("csv", "--csv", str, None,
                "where to put the learning curve CSV (default: out with .csv)"),
        ],
    },
    "viz-embeddings": {
        "help": "project character embeddings to 2-d for plotting",
        "positionals": [
            ("checkpoint", "trained model checkpoint"),
            ("out", "output CSV of char,category,x,y"),
        ],
        "options": [],
    },
}


def build_parser(suppress: bool = False) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hashseg",
        description="hashtag segmentation toolkit",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="log progress (-vv for debug)")
    subparsers = parser.add_subparsers(dest="command", required=True,
                                       metavar="command")
    for name, entry in COMMANDS.items():
        sub = subparsers.add_parser(
            name, help=entry["help"], description=entry["help"],
            formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        )
        for pos_name, pos_help in entry["positionals"]:
            sub.add_argument(pos_name, help=pos_help)
        for opt in entry["options"]:
            default = argparse.SUPPRESS if suppress else opt.default
            if opt.type is FLAG:
                sub.add_argument(opt.flag, dest=opt.name, action="store_true",
                                 default=default, help=opt.help)
            else:
                sub.add_argument(opt.flag, dest=opt.name, type=opt.type,
                                 default=default, choices=opt.choices,
                                 help=opt.help)
        sub.add_argument("--config", default=None,
                         help="JSON file of option defaults (flags still win)")
    return parser


def _load_config_file(path, opts) -> dict:
    by_name = {o.name: o for o in opts}
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CliError("data-format", f"config file {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise CliError("data-format", f"config file {path}: expected a JSON object")
    values = {}
    for key, value in raw.items():
        opt = by_name.get(key)
        if opt is None:
            raise CliError("usage", f"config file {path}: unknown option {key!r}")
        values[key] = _coerce_config_value(opt, value, path)
    return values


def _coerce_config_value(opt: Opt, value, path):
    if value is None and opt.default is None:
        return None
    if opt.type is FLAG:
        if not isinstance(value, bool):
            raise CliError("usage", f"config file {path}: {opt.name} must be a boolean")
        return value
    if opt.type is int:
        if not isinstance(value, int) or isinstance(value, bool):
            raise CliError("usage", f"config file {path}: {opt.name} must be an integer")
        return value
    if opt.type is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise CliError("usage", f"config file {path}: {opt.name} must be a number")
        return float(value)
    if not isinstance(value, str):
        raise CliError("usage", f"config file {path}: {opt.name} must be a string")
    if opt.choices and value not in opt.choices:
        raise CliError(
            "usage",
            f"config file {path}: {opt.name} must be one of {', '.join(opt.choices)}",
        )
    return value


def resolve_options(command: str, args, explicit: dict) -> dict:
    """defaults < config file < explicit command line flags."""
    opts = COMMANDS[command]["options"]
    resolved = {o.name: o.default for o in opts}
    config_path = getattr(args, "config", None)
    if config_path:
        resolved.update(_load_config_file(config_path, opts))
    for opt in opts:
        if opt.name in explicit:
            resolved[opt.name] = explicit[opt.name]
    return resolved


def write_sidecar(out_path: str, command: str, arguments: dict, options: dict) -> None:
    record = {
        "command": command,
        "arguments": arguments,
        "options": options,
    }
    with open(f"{out_path}.config.json", "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _read_hashtag_lines(path):
    """Input hashtags, one per line; a leading '#' is tolerated and dropped."""
    bodies = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            bodies.append(line[1:] if line.startswith("#") else line)
    return bodies


def _derived_path(out: str, new_suffix: str) -> str:
    if out.endswith(".json"):
        return out[: -len(".json")] + new_suffix
    return out + new_suffix


def _train_config(o: dict) -> TrainConfig:
    try:
        return TrainConfig(
            embed_dim=o["embed_dim"], hidden_dim=o["hidden_dim"], merge=o["merge"],
            epochs=o["epochs"], learning_rate=o["learning_rate"],
            clip_norm=o["clip_norm"], seed=o["seed"],
        )
    except ValueError as exc:
        raise CliError("usage", str(exc)) from exc


# ---------------------------------------------------------------------------
# command handlers; each takes (args, options) and returns the primary output
# ---------------------------------------------------------------------------


def cmd_ngrams(args, o):
    token_lines = read_corpus_tokens(args.corpus)
    stop = load_stopwords(o["stopwords"]) if o["stopwords"] else frozenset()
    try:
        grams = extract_ngrams_lines(token_lines, (o["min_n"], o["max_n"]),
                                     stopwords=stop, min_freq=o["min_freq"])
    except ValueError as exc:
        raise CliError("usage", str(exc)) from exc
    write_ngrams_tsv(grams, args.out)
    logger.info("wrote %d n-grams to %s", len(grams), args.out)
    return args.out


def cmd_generate(args, o):
    ngrams = read_ngrams_tsv(args.ngrams)
    items = generate_dataset(ngrams, o["count"], o["seed"])
    write_dataset(items, args.out)
    logger.info("wrote %d hashtags to %s", len(items), args.out)
    return args.out


def cmd_train(args, o):
    dataset = read_dataset(args.data)
    config = _train_config(o)
    start = load_checkpoint(o["start"]) if o["start"] else None
    model = train(dataset, config, start=start)
    save_checkpoint(model, args.out, version=o["format_version"])
    logger.info("saved checkpoint to %s", args.out)
    return args.out


def cmd_segment(args, o):
    model = load_checkpoint(args.checkpoint)
    bodies = _read_hashtag_lines(args.hashtags)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        for body in bodies:
            pred = predict(model, body)
            words = apply_labels(body, pred.labels)
            fh.write(f"{body}\t{' '.join(words)}\t{pred.mnlp:.6f}\n")
    logger.info("segmented %d hashtags into %s", len(bodies), args.out)
    return args.out


def cmd_baseline(args, o):
    table = NGramTable.from_corpus_file(args.corpus, alpha=o["alpha"])
    bodies = _read_hashtag_lines(args.hashtags)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        for body in bodies:
            hyp = segment_dp(table, body, max_word_len=o["max_word_len"],
                             unigram_only=o["unigram_only"])
            fh.write(f"{body}\t{' '.join(hyp.words)}\n")
    logger.info("segmented %d hashtags into %s", len(bodies), args.out)
    return args.out


def cmd_eval(args, o):
    if bool(o["checkpoint"]) == bool(o["baseline_corpus"]):
        raise CliError("usage",
                       "pass exactly one of --checkpoint or --baseline-corpus")
    dataset = read_dataset(args.data)
    if o["checkpoint"]:
        predictor = load_checkpoint(o["checkpoint"])
    else:
        table = NGramTable.from_corpus_file(o["baseline_corpus"])
        predictor = baseline_label_predictor(table, max_word_len=o["max_word_len"],
                                             unigram_only=o["unigram_only"])
    report = evaluate(predictor, dataset)
    write_eval_json(report, args.out)
    tsv_path = o["tsv"] or _derived_path(args.out, ".tsv")
    write_eval_tsv(report, tsv_path)
    logger.info("accuracy %.4f over %d items", report.accuracy, report.total)
    return args.out


def cmd_al_run(args, o):
    pool = read_dataset(args.pool)
    test_set = read_dataset(args.test)
    try:
        config = ALConfig(
            round_size=o["round_size"], retrain_mode=o["retrain_mode"],
            epochs_per_round=o["epochs_per_round"], seed=o["seed"],
            train=_train_config(o),
        )
    except ValueError as exc:
        raise CliError("usage", str(exc)) from exc
    log = al_run(pool, test_set, config)
    write_al_json(log, args.out)
    csv_path = o["csv"] or _derived_path(args.out, ".csv")
    write_al_csv(log, csv_path)
    logger.info("finished %d rounds", len(log.rounds))
    return args.out


def cmd_viz_embeddings(args, o):
    model = load_checkpoint(args.checkpoint)
    projection = project_embeddings(model)
    write_projection_csv(projection, args.out)
    logger.info("projected %d characters (explained ratio %.3f)",
                len(projection.chars), projection.explained_ratio)
    return args.out


HANDLERS = {
    "ngrams": cmd_ngrams,
    "generate": cmd_generate,
    "train": cmd_train,
    "segment": cmd_segment,
    "baseline": cmd_baseline,
    "eval": cmd_eval,
    "al-run": cmd_al_run,
    "viz-embeddings": cmd_viz_embeddings,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    levels = (logging.WARNING, logging.INFO, logging.DEBUG)
    logging.basicConfig(level=levels[min(args.verbose, 2)],
                        format="%(levelname)s %(name)s: %(message)s")
    detector = build_parser(suppress=True)
    explicit = vars(detector.parse_args(argv))
    try:
        options = resolve_options(args.command, args, explicit)
        out = HANDLERS[args.command](args, options)
        arguments = {name: getattr(args, name)
                     for name, _ in COMMANDS[args.command]["positionals"]}
        write_sidecar(out, args.command, arguments, options)
    except CliError as exc:
        return _fail(exc.category, str(exc))
    except DatasetFormatError as exc:
        return _fail("data-format", str(exc))
    except CheckpointError as exc:
        return _fail("checkpoint", str(exc))
    except (FileNotFoundError, IsADirectoryError, NotADirectoryError,
            PermissionError) as exc:
        return _fail("io", f"{exc.strerror}: {exc.filename}")
    except OSError as exc:
        return _fail("io", str(exc))
    except ValueError as exc:
        return _fail("data-format", str(exc))
    return 0


def _fail(category: str, message: str) -> int:
    print(f"hashseg: error [{category}]: {message}", file=sys.stderr)
    return CATEGORY_EXIT[category]


if __name__ == "__main__":
    sys.exit(main())
