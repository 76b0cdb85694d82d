"""``lzkit`` command line.

Every subcommand prints one JSON object (or writes it to ``--report``).  All
reports carry ``"schema_version"`` and ``"command"``; keys are sorted and no
timestamps are written, so equal inputs and seeds give byte-identical output.

Exit status: 0 on success, 2 on bad input, 3 when a guardrail would be exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from . import codec, divergence, ensemble, inference, parsing, sequential
from .channel import FsChannel, run_experiment
from .errors import GuardrailError, InputError, LZKitError
from .sequence import Alphabet, Sequence

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INPUT, EXIT_GUARDRAIL = 0, 2, 3
SEED_MAX = 2**64 - 1

Plotter = Callable[[str], None]


@dataclass
class RunConfig:
    command: str
    inputs: list[str] = field(default_factory=list)
    alphabet_mode: str = "raw-bytes"  # raw-bytes | symbols | binary-ascii
    symbols: str | None = None
    seed: int | None = None
    params: dict = field(default_factory=dict)
    report: str | None = None
    plot: str | None = None


# ---------------------------------------------------------------- input


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _strip_newline(data: bytes) -> bytes:
    if data.endswith(b"\r\n"):
        return data[:-2]
    if data.endswith(b"\n"):
        return data[:-1]
    return data


def _fixed_alphabet(cfg: RunConfig) -> Alphabet | None:
    if cfg.alphabet_mode == "binary-ascii":
        return Alphabet.binary()
    if cfg.alphabet_mode == "symbols":
        return Alphabet.from_symbols(cfg.symbols)
    return None


def _prepare(cfg: RunConfig, data: bytes) -> bytes:
    alphabet = _fixed_alphabet(cfg)
    if alphabet is not None and b"\n" not in alphabet.byte_map:
        return _strip_newline(data)
    return data


def _load(cfg: RunConfig, paths: list[str], alphabet: Alphabet | None = None) -> list[Sequence]:
    """Read files as sequences over one shared alphabet.

    Raw-bytes mode uses the bytes present across all files, ascending.
    """
    blobs = [_prepare(cfg, _read(p)) for p in paths]
    if alphabet is None:
        alphabet = _fixed_alphabet(cfg) or Alphabet.infer(*blobs)
    return [Sequence.from_bytes(b, alphabet) for b in blobs]


# ---------------------------------------------------------------- commands


def _compress(cfg: RunConfig):
    src = cfg.inputs[0]
    # raw files keep all 256 byte values so decompression needs no side information
    alphabet = _fixed_alphabet(cfg) or Alphabet.raw_bytes()
    (x,) = _load(cfg, [src], alphabet)
    stream = codec.lz78_encode(x)
    out = cfg.params.get("output") or src + ".lz78"
    Path(out).write_bytes(stream.to_bytes())
    n = len(x)
    return {
        "input": src,
        "output": out,
        "n": n,
        "alphabet_size": alphabet.size,
        "payload_bits": stream.nbits,
        "bits_per_symbol": stream.nbits / n if n else 0.0,
    }, None


def _output_name(src: str, suffix: str, fallback: str) -> str:
    return src[: -len(suffix)] if src.endswith(suffix) and len(src) > len(suffix) else src + fallback


def _decompress(cfg: RunConfig):
    src = cfg.inputs[0]
    stream = codec.BitStream.from_bytes(_read(src))
    alphabet = _fixed_alphabet(cfg)
    if alphabet is None:
        if stream.alphabet_size != 256:
            raise InputError(
                f"stream has alphabet size {stream.alphabet_size}; "
                "pass --symbols or --binary-ascii to map symbols back to bytes"
            )
        alphabet = Alphabet.raw_bytes()
    x = codec.lz78_decode(stream, alphabet)
    out = cfg.params.get("output") or _output_name(src, ".lz78", ".out")
    Path(out).write_bytes(x.to_bytes())
    return {"input": src, "output": out, "n": len(x), "alphabet_size": alphabet.size}, None


def _key(cfg: RunConfig) -> codec.KeyStream:
    if cfg.params.get("key_file"):
        return codec.KeyStream(_read(cfg.params["key_file"]))
    if cfg.seed is None:
        raise InputError("give --key-seed or --key-file")
    return codec.KeyStream.from_seed(cfg.seed)


def _encrypt(cfg: RunConfig):
    src = cfg.inputs[0]
    data = _read(src)
    decrypt = cfg.params.get("decrypt", False)
    if data.startswith(codec.MAGIC):
        stream = codec.BitStream.from_bytes(data)
    elif decrypt:
        raise InputError(f"{src} is not an LZ78 stream")
    else:
        alphabet = _fixed_alphabet(cfg) or Alphabet.raw_bytes()
        (x,) = _load(cfg, [src], alphabet)
        stream = codec.lz78_encode(x)
    key = _key(cfg)
    if decrypt:
        result = codec.otp_decrypt(stream, key)
        out = cfg.params.get("output") or _output_name(src, ".enc", ".dec")
    else:
        result = codec.otp_apply(stream, key)
        out = cfg.params.get("output") or src + ".enc"
    Path(out).write_bytes(result.to_bytes())
    n = result.n
    return {
        "input": src,
        "output": out,
        "mode": "decrypt" if decrypt else "encrypt",
        "n": n,
        "payload_bits": result.nbits,
        "key_bits_consumed": key.consumed,
        "key_rate": key.consumed / n if n else 0.0,
    }, None


def _complexity(cfg: RunConfig):
    (x,) = _load(cfg, cfg.inputs)
    if len(x) == 0:
        raise InputError("complexity of an empty sequence is undefined")
    parse = parsing.incremental_parse(x)
    report = {
        "n": len(x),
        "c": parse.c,
        "rho_lz": parsing.complexity_from_count(parse.c, len(x)),
        "alphabet_size": x.alphabet.size,
        "last_phrase_incomplete": parse.last_incomplete,
    }

    def plot(path):
        from . import plotting

        plotting.phrase_growth(parse.node_ends[1 : parse.complete_count + 1], len(x), path)

    return report, plot


def _divergence(cfg: RunConfig):
    x, y = _load(cfg, cfg.inputs)
    if len(y) == 0:
        raise InputError("reference sequence is empty")
    return {
        "n": len(x),
        "reference_length": len(y),
        "c": parsing.incremental_parse(x).c if len(x) else 0,
        "cross_phrases": parsing.cross_parse(x, y).count,
        "divergence": divergence.lz_divergence(x, y),
    }, None


def _corpus_files(directory: str) -> list[Path]:
    root = Path(directory)
    if not root.is_dir():
        raise InputError(f"{directory} is not a directory")
    files = sorted(p for p in root.iterdir() if p.is_file() and not p.name.startswith("."))
    if not files:
        raise InputError(f"{directory} has no training files")
    return files


def _classify(cfg: RunConfig):
    files = _corpus_files(cfg.params["corpus"])
    seqs = _load(cfg, [str(p) for p in files] + cfg.inputs)
    corpus = divergence.LabeledCorpus([(p.stem, s) for p, s in zip(files, seqs)])
    label, scores = divergence.classify(seqs[-1], corpus)
    return {"label": label, "labels": corpus.labels, "scores": scores, "n": len(seqs[-1])}, None


def _test_random(cfg: RunConfig):
    (x,) = _load(cfg, cfg.inputs)
    verdict = inference.test_fair_coin(x, cfg.params["lambda"])
    return {"n": len(x), **verdict.to_dict()}, None


def _test_memoryless(cfg: RunConfig):
    (x,) = _load(cfg, cfg.inputs)
    verdict = inference.test_memoryless(x, cfg.params["lambda"])
    return {"n": len(x), **verdict.to_dict()}, None


def _order_estimate(cfg: RunConfig):
    (x,) = _load(cfg, cfg.inputs)
    if len(x) < 2:
        raise InputError("order estimation needs n >= 2")
    k_max = min(cfg.params["k_max"], len(x) - 1)
    lam = cfg.params["lambda"]
    gaps = inference.order_gaps(x, k_max)
    return {
        "n": len(x),
        "lambda": lam,
        "k_max": k_max,
        "order": inference.estimate_markov_order(x, lam, k_max),
        "rho_lz": parsing.lz_complexity(x),
        "gaps": gaps,
    }, None


def _channel_sim(cfg: RunConfig):
    ch = FsChannel.from_toml(cfg.params["channel"])
    p = cfg.params
    result = run_experiment(ch, p["n"], p["M"], p["trials"], cfg.seed, workers=p["workers"])
    report = result.to_dict()

    def plot(path):
        from . import plotting

        plotting.decoder_errors(report, path)

    return report, plot


def _predict(cfg: RunConfig):
    (x,) = _load(cfg, cfg.inputs)
    alpha, mode = cfg.params["alpha"], cfg.params["mode"]
    result = sequential.predict_sequence(x, alpha, mode, cfg.seed)
    report = {**result.to_dict(), "alpha": alpha, "mode": mode}
    if mode == "randomized":
        report["seed"] = cfg.seed

    def plot(path):
        from . import plotting

        plotting.running_error(result.predictions, x.array, path)

    return report, plot


def _gamble(cfg: RunConfig):
    (x,) = _load(cfg, cfg.inputs)
    alpha = cfg.params["alpha"]
    growth = sequential.gamble_sequence(x, alpha)
    report = {
        "n": len(x),
        "alpha": alpha,
        "growth": growth,
        "code_length_bits": sequential.sequential_code_length(x, alpha),
        "rho_lz": parsing.lz_complexity(x),
    }

    def plot(path):
        from . import plotting

        plotting.capital(sequential.capital_trajectory(x, alpha), path)

    return report, plot


def _rd(cfg: RunConfig):
    n, d, measure = cfg.params["n"], cfg.params["D"], cfg.params["distortion"]
    if measure not in ensemble.DISTORTIONS:
        raise InputError(f"unknown distortion {measure!r}")
    (full,) = _load(cfg, cfg.inputs)
    if len(full) < n:
        raise InputError(f"{cfg.inputs[0]} has {len(full)} symbols, --n asks for {n}")
    x = full[:n]
    dist = ensemble.build_universal(n, x.alphabet)
    report = {
        "n": n,
        "D": d,
        "distortion": measure,
        "alphabet_size": x.alphabet.size,
        "c": parsing.incremental_parse(x).c,
        "log2_z": dist.log2_z,
        "rate": ensemble.rd_point(x, d, dist, measure),
        "single_best_rate": ensemble.single_best_rate(x, d, dist, measure),
    }

    def plot(path):
        from . import plotting

        grid = [k / n for k in range(n + 1)]
        plotting.rd_curve(grid, [ensemble.rd_point(x, g, dist, measure) for g in grid], path, d)

    return report, plot


COMMANDS: dict[str, Callable[[RunConfig], tuple[dict, Plotter | None]]] = {
    "compress": _compress,
    "decompress": _decompress,
    "encrypt": _encrypt,
    "complexity": _complexity,
    "divergence": _divergence,
    "classify": _classify,
    "test-random": _test_random,
    "test-memoryless": _test_memoryless,
    "order-estimate": _order_estimate,
    "channel-sim": _channel_sim,
    "predict": _predict,
    "gamble": _gamble,
    "rd": _rd,
}


def run(cfg: RunConfig) -> tuple[int, dict]:
    """Execute one command; returns the exit status and the report (or error) object."""
    try:
        handler = COMMANDS[cfg.command]
    except KeyError:
        return EXIT_INPUT, _error(cfg, "input", f"unknown subcommand {cfg.command!r}")
    try:
        body, plotter = handler(cfg)
        if cfg.plot and plotter is not None:
            plotter(cfg.plot)
    except GuardrailError as exc:
        err = _error(cfg, "guardrail", str(exc))
        err["limit"], err["requested"] = exc.limit, exc.requested
        return EXIT_GUARDRAIL, err
    except (LZKitError, OSError) as exc:
        return EXIT_INPUT, _error(cfg, "input", str(exc))
    return EXIT_OK, {"schema_version": SCHEMA_VERSION, "command": cfg.command, **body}


def _error(cfg: RunConfig, kind: str, message: str) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": cfg.command,
        "error": {"kind": kind, "message": message},
    }


def render(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------- argparse


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value <= SEED_MAX:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lzkit", description="LZ78 parsing and universal individual-sequence tools."
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", metavar="PATH", help="write the JSON report here, not stdout")

    alpha = argparse.ArgumentParser(add_help=False)
    mode = alpha.add_mutually_exclusive_group()
    mode.add_argument(
        "--binary-ascii",
        action="store_true",
        help="read characters '0'/'1' as binary symbols; a trailing newline is ignored",
    )
    mode.add_argument(
        "--symbols",
        metavar="CHARS",
        help="explicit alphabet: the i-th character is symbol i",
    )

    plot = argparse.ArgumentParser(add_help=False)
    plot.add_argument("--plot", metavar="PATH", help="also render a figure (png, pdf or svg)")

    def add(name, help, *parents):
        return sub.add_parser(name, help=help, parents=[common, *parents])

    p = add("compress", "LZ78-compress a file to FILE.lz78", alpha)
    p.add_argument("file")
    p.add_argument("-o", "--output")

    p = add("decompress", "restore a file from its .lz78 stream", alpha)
    p.add_argument("file")
    p.add_argument("-o", "--output")

    p = add("encrypt", "one-time-pad the LZ78 payload of a file or stream", alpha)
    p.add_argument("file")
    p.add_argument("-o", "--output")
    key = p.add_mutually_exclusive_group(required=True)
    key.add_argument("--key-seed", type=_seed, help="seed of a pseudo-random key stream")
    key.add_argument("--key-file", help="key bits, read MSB first")
    p.add_argument("--decrypt", action="store_true")

    p = add("complexity", "phrase count and LZ complexity", alpha, plot)
    p.add_argument("file")

    p = add("divergence", "LZ divergence of FILE_X from FILE_Y", alpha)
    p.add_argument("file_x")
    p.add_argument("file_y")

    p = add("classify", "nearest-divergence label from a corpus directory", alpha)
    p.add_argument("--corpus", required=True, metavar="DIR", help="one training file per label")
    p.add_argument("file")

    for name, text in (
        ("test-random", "LZ test for fair coin tosses"),
        ("test-memoryless", "LZ test for a memoryless source"),
    ):
        p = add(name, text, alpha)
        p.add_argument("file")
        p.add_argument("--lambda", dest="lam", type=float, default=inference.DEFAULT_LAMBDA)

    p = add("order-estimate", "smallest Markov order explaining the LZ complexity", alpha)
    p.add_argument("file")
    p.add_argument("--lambda", dest="lam", type=float, default=inference.DEFAULT_LAMBDA)
    p.add_argument("--k-max", type=int, default=8)

    p = add("channel-sim", "ML versus universal decoding over a finite-state channel", plot)
    p.add_argument("--channel", required=True, metavar="FILE", help="channel description (TOML)")
    p.add_argument("--n", type=_positive_int, required=True, help="block length")
    p.add_argument("--M", type=_positive_int, required=True, help="codebook size")
    p.add_argument("--trials", type=_positive_int, required=True)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--workers", type=_positive_int, default=1)

    p = add("predict", "sequential prediction from the LZ phrase trie", alpha, plot)
    p.add_argument("file")
    p.add_argument("--alpha", type=float, default=1.0, help="count smoothing")
    p.add_argument("--mode", choices=["deterministic", "randomized"], default="deterministic")
    p.add_argument("--seed", type=_seed, default=0, help="used by randomized mode")

    p = add("gamble", "even-odds proportional betting from the LZ phrase trie", alpha, plot)
    p.add_argument("file")
    p.add_argument("--alpha", type=float, default=1.0)

    p = add("rd", "exact universal-ensemble rate at distortion D", alpha, plot)
    p.add_argument("--n", type=_positive_int, required=True, help="use the first N symbols")
    p.add_argument("--file", required=True)
    p.add_argument("--distortion", default="hamming", choices=sorted(ensemble.DISTORTIONS))
    p.add_argument("--D", type=float, required=True, help="per-symbol distortion level")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cmd = ns.command
    if getattr(ns, "binary_ascii", False):
        mode = "binary-ascii"
    elif getattr(ns, "symbols", None) is not None:
        mode = "symbols"
    else:
        mode = "raw-bytes"
    inputs = {
        "divergence": lambda: [ns.file_x, ns.file_y],
        "channel-sim": lambda: [],
        "rd": lambda: [ns.file],
    }.get(cmd, lambda: [ns.file])()
    params: dict = {}
    for name in ("output", "key_file", "decrypt", "corpus", "k_max", "alpha", "mode", "n",
                 "M", "trials", "workers", "channel", "distortion", "D"):
        if hasattr(ns, name):
            params[name] = getattr(ns, name)
    if hasattr(ns, "lam"):
        params["lambda"] = ns.lam
    seed = getattr(ns, "key_seed", None) if cmd == "encrypt" else getattr(ns, "seed", None)
    return RunConfig(
        command=cmd,
        inputs=inputs,
        alphabet_mode=mode,
        symbols=getattr(ns, "symbols", None),
        seed=seed,
        params=params,
        report=ns.report,
        plot=getattr(ns, "plot", None),
    )


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = config_from_args(ns)
    status, report = run(cfg)
    text = render(report)
    if status != EXIT_OK:
        print(f"lzkit {cfg.command}: {report['error']['message']}", file=sys.stderr)
    if cfg.report:
        Path(cfg.report).write_text(text)
    elif status == EXIT_OK:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
