"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

The lines are printed in the pytest terminal summary, or directly when the
file is run as a script (``python tests/test_acceptance.py``).
"""

from __future__ import annotations

import json
import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lzkit import (  # noqa: E402
    Alphabet,
    BitStream,
    LabeledCorpus,
    Sequence,
    build_universal,
    classify,
    code_length,
    cross_parse,
    estimate_markov_order,
    gamble_sequence,
    incremental_parse,
    joint_parse,
    lz78_decode,
    lz78_encode,
    lz_complexity,
    predict_sequence,
    rd_point,
    sequential_code_length,
    single_best_rate,
    test_fair_coin as fair_coin_rule,
    test_memoryless as memoryless_rule,
)
from lzkit.channel import FsChannel, run_experiment, trial_instance  # noqa: E402
from lzkit.inference import order_gaps  # noqa: E402
from lzkit.parsing import conditional_metric  # noqa: E402
from oracles import binary_entropy, markov_chain, order2_chain  # noqa: E402

RESULTS: list[str] = []
B = Alphabet.binary()


def record(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] AC{number:02d} {title}: {detail}"
    RESULTS.append(line)
    assert ok, line


def binary(arr) -> Sequence:
    return Sequence(B, tuple(np.asarray(arr).tolist()))


def best_time(fn, repeats=5) -> float:
    fn()  # loads compiled kernels
    times = []
    for _ in range(repeats):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


# ---------------------------------------------------------------- 1-4 golden parses

REPEAT = "repeatandrepeatandrepeatandrepeatandrepeat"
REPEAT_PHRASES = "r,e,p,ea,t,a,n,d,re,pe,at,an,dr,ep,eat,and,rep,eata,nd,repe,at".split(",")


def test_ac01_golden_parse():
    x = Sequence.from_text(REPEAT, "abcdefghijklmnopqrstuvwxyz")
    parse = incremental_parse(x)
    got = ["".join(chr(97 + s) for s in ph) for ph in parse.phrases(x)]
    elapsed = best_time(lambda: incremental_parse(x))
    ok = got == REPEAT_PHRASES and (len(x), parse.c) == (42, 21) and elapsed < 1e-3
    record(1, "golden parse", ok, f"n={len(x)} c={parse.c} phrases match, {elapsed * 1e3:.3f} ms")


def test_ac02_counting_sequence():
    bits = "".join(format(v, f"0{w}b") for w in (1, 2, 3) for v in range(2**w))
    x = Sequence.binary(bits)
    got = ["".join(map(str, ph)) for ph in incremental_parse(x).phrases(x)]
    expected = ["0", "1", "00", "01", "10", "11", "000", "001", "010", "011", "100", "101",
                "110", "111"]
    elapsed = best_time(lambda: incremental_parse(x))
    ok = len(bits) == 34 and got == expected and elapsed < 1e-3
    record(2, "counting-sequence parse", ok, f"{','.join(got[:7])},... {elapsed * 1e3:.3f} ms")


def test_ac03_cross_parse():
    x, y = Sequence.binary("01111000110"), Sequence.binary("10010100110")
    result = cross_parse(x, y)
    phrases = ["".join(map(str, p)) for p in result.phrases(x)]
    ok = phrases == ["011", "110", "00110"] and result.count == 3
    record(3, "golden cross-parse", ok, f"phrases {phrases}, count {result.count}")


def test_ac04_joint_parse():
    x, y = Sequence.binary("010001"), Sequence.binary("010101")
    result = joint_parse(x, y)
    u = conditional_metric(x, y)
    ok = result.c_y == 3 and result.c_l == (1, 1, 2) and u == 2.0
    record(4, "golden joint parse", ok, f"c(y)={result.c_y} c_l={result.c_l} u={u}")


# ---------------------------------------------------------------- 5 codec


def test_ac05_codec_roundtrip():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    failures = 0
    for _ in range(10**4):
        n = int(rng.integers(0, 10**4 + 1))
        a = int(rng.integers(1, 257))
        x = Sequence(Alphabet(a), tuple(rng.integers(0, a, n).tolist()))
        b = lz78_encode(x)
        back = lz78_decode(BitStream.from_bytes(b.to_bytes()), x.alphabet)
        if back != x or b.nbits != code_length(x):
            failures += 1
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 30
    record(5, "codec roundtrip", ok, f"10000 cases, {failures} failures, {elapsed:.1f} s")


# ---------------------------------------------------------------- 6-8 inference


def test_ac06_convergence_to_entropy():
    t0 = time.perf_counter()
    n = 2**16
    coin = [lz_complexity(binary(np.random.default_rng([6, 0, s]).integers(0, 2, n)))
            for s in range(20)]
    chain = [lz_complexity(binary(markov_chain(n, 0.1, np.random.default_rng([6, 1, s]))))
             for s in range(20)]
    coin_dev = float(np.mean(np.abs(np.array(coin) - 1.0)))
    chain_dev = abs(float(np.mean(chain)) - binary_entropy(0.1))
    elapsed = time.perf_counter() - t0
    ok = coin_dev <= 0.2 and chain_dev <= 0.2 and elapsed < 60
    record(6, "convergence to entropy", ok,
           f"coin mean|rho-1|={coin_dev:.3f}, markov |mean rho-H|={chain_dev:.3f}, {elapsed:.1f} s")


def test_ac07_hypothesis_tests():
    n, lam = 2**16, 0.1
    alt_h1 = fair_coin_rule(Sequence.binary("01" * (n // 2)), lam).decision == "H1"
    coin_h0 = sum(
        fair_coin_rule(binary(np.random.default_rng([7, 0, s]).integers(0, 2, n)), lam).decision
        == "H0"
        for s in range(20)
    )
    sticky_h1 = sum(
        memoryless_rule(binary(markov_chain(n, 0.05, np.random.default_rng([7, 1, s]))), lam)
        .decision == "H1"
        for s in range(20)
    )
    iid_h0 = sum(
        memoryless_rule(binary(np.random.default_rng([7, 2, s]).random(n) < 0.3), lam).decision
        == "H0"
        for s in range(20)
    )
    ok = alt_h1 and coin_h0 == 20 and sticky_h1 >= 19 and iid_h0 >= 19
    record(7, "hypothesis tests", ok,
           f"alternating H1={alt_h1}, coin H0 {coin_h0}/20, "
           f"markov(0.05) H1 {sticky_h1}/20, bernoulli(0.3) H0 {iid_h0}/20")


ORDER2 = {(0, 0): 0.9, (0, 1): 0.1, (1, 0): 0.1, (1, 1): 0.9}


def test_ac08_order_estimation():
    t0 = time.perf_counter()
    lam, k_max, hits, consistent = 0.08, 6, 0, True
    for s in range(20):
        x = binary(order2_chain(2**17, ORDER2, np.random.default_rng([8, s])))
        k = estimate_markov_order(x, lam, k_max)
        gaps = order_gaps(x, k_max)
        hits += k == 2
        if k is None:
            consistent &= all(g > lam for g in gaps)
        else:
            consistent &= gaps[k] <= lam and all(g > lam for g in gaps[:k])
    elapsed = time.perf_counter() - t0
    ok = hits >= 18 and consistent and elapsed < 120
    record(8, "order estimation", ok,
           f"k=2 in {hits}/20, rule+minimality {'hold' if consistent else 'violated'}, "
           f"{elapsed:.1f} s")


# ---------------------------------------------------------------- 9 classification


def test_ac09_classification():
    t0 = time.perf_counter()
    rng = np.random.default_rng([9, 0])
    classes = [("flip0.05", 0.05), ("flip0.45", 0.45)]
    corpus = LabeledCorpus([(lab, binary(markov_chain(2**15, p, rng))) for lab, p in classes])
    correct = 0
    for i in range(200):
        lab, p = classes[i % 2]
        x = binary(markov_chain(1000, p, np.random.default_rng([9, 1, i])))
        correct += classify(x, corpus)[0] == lab
    elapsed = time.perf_counter() - t0
    acc = correct / 200
    ok = acc >= 0.9 and elapsed < 120
    record(9, "classification", ok, f"accuracy {acc:.3f} over 200 sequences, {elapsed:.1f} s")


# ---------------------------------------------------------------- 10 channel decoding


def test_ac10_channel_decoding():
    t0 = time.perf_counter()
    ch = FsChannel.bsc(0.05)
    n, m, trials, seed = 512, 64, 400, 10
    report = run_experiment(ch, n, m, trials, seed)
    mismatches = 0
    for t, (_, ml, _) in enumerate(report.records):
        book, _, y = trial_instance(ch, n, m, seed, t)
        mismatches += ml != int(np.argmin((book.words != y.array).sum(axis=1)))
    elapsed = time.perf_counter() - t0
    ml_rate, ziv_rate = report.ml_error_rate, report.ziv_error_rate
    ok = (ml_rate <= 0.05 and ziv_rate <= 0.05 and abs(ziv_rate - ml_rate) <= 0.03
          and mismatches == 0 and elapsed < 600)
    record(10, "channel decoding", ok,
           f"ml {ml_rate:.4f}, ziv {ziv_rate:.4f}, ml vs min-Hamming mismatches {mismatches}, "
           f"{elapsed:.1f} s")


# ---------------------------------------------------------------- 11 prediction/gambling


def test_ac11_prediction_gambling():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 5000))
        x = binary(rng.random(n) < rng.random())
        gap = abs(gamble_sequence(x) - (1 - sequential_code_length(x) / n))
        worst = max(worst, gap)
    coin = binary(np.random.default_rng([11, 1]).integers(0, 2, 2**16))
    err = predict_sequence(coin).error_rate
    ok = worst <= 1e-9 and abs(err - 0.5) <= 0.03
    record(11, "prediction/gambling duality", ok,
           f"max |growth-(1-L/n)|={worst:.2e}, fair-coin error {err:.4f}")


# ---------------------------------------------------------------- 12 ensemble


def test_ac12_ensemble():
    t0 = time.perf_counter()
    d2 = build_universal(2, B)
    uniform = d2.z == 1.0 and bool(np.all(d2.probabilities == 0.25))
    d8 = build_universal(8, B)
    total = math.fsum(d8.probabilities.tolist())
    grid = [k / 8 for k in range(9)]
    monotone = dominance = True
    for row in d8.candidates:
        x = Sequence(B, tuple(row.tolist()))
        rates = [rd_point(x, d, d8) for d in grid]
        monotone &= all(b <= a + 1e-12 for a, b in zip(rates, rates[1:]))
        dominance &= all(r <= single_best_rate(x, d, d8) + 1e-12 for d, r in zip(grid, rates))
    elapsed = time.perf_counter() - t0
    ok = uniform and abs(total - 1) <= 1e-9 and monotone and dominance and elapsed < 60
    record(12, "ensemble exactness", ok,
           f"n=2 uniform={uniform}, n=8 sum-1={total - 1:.1e}, monotone={monotone}, "
           f"dominance={dominance}, {elapsed:.1f} s")


# ---------------------------------------------------------------- 13 determinism


def _lzkit(args, cwd) -> tuple[int, bytes]:
    proc = subprocess.run(
        [sys.executable, "-m", "lzkit.cli", *map(str, args)],
        cwd=cwd,
        capture_output=True,
    )
    return proc.returncode, proc.stdout


def test_ac13_cli_determinism(tmp_path):
    rng = np.random.default_rng(13)
    (tmp_path / "x.txt").write_text("".join(map(str, markov_chain(6000, 0.1, rng))) + "\n")
    (tmp_path / "y.txt").write_text("".join(map(str, rng.integers(0, 2, 6000))) + "\n")
    (tmp_path / "data.bin").write_bytes(rng.integers(0, 256, 20000).astype(np.uint8).tobytes())
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    (corpus / "sticky.txt").write_text("".join(map(str, markov_chain(8000, 0.05, rng))))
    (corpus / "noisy.txt").write_text("".join(map(str, markov_chain(8000, 0.45, rng))))
    (tmp_path / "bsc01.toml").write_text(
        "states = 1\ninitial_state = 0\ninput_alphabet = 2\noutput_alphabet = 2\n\n"
        "[[state]]\nemission = [[0.9, 0.1], [0.1, 0.9]]\nnext_state = [[0, 0], [0, 0]]\n"
    )
    ba = "--binary-ascii"
    commands = {
        "compress": ["compress", "data.bin"],
        "decompress": ["decompress", "data.bin.lz78", "-o", "restored.bin"],
        "encrypt": ["encrypt", "data.bin.lz78", "--key-seed", 12345],
        "complexity": ["complexity", ba, "x.txt"],
        "divergence": ["divergence", ba, "x.txt", "y.txt"],
        "classify": ["classify", ba, "--corpus", "corpus", "x.txt"],
        "test-random": ["test-random", ba, "y.txt"],
        "test-memoryless": ["test-memoryless", ba, "x.txt"],
        "order-estimate": ["order-estimate", ba, "x.txt", "--lambda", 0.1],
        "channel-sim": ["channel-sim", "--channel", "bsc01.toml", "--n", 512, "--M", 64,
                        "--trials", 400, "--seed", 7],
        "predict": ["predict", ba, "x.txt", "--mode", "randomized", "--seed", 99],
        "gamble": ["gamble", ba, "x.txt"],
        "rd": ["rd", "--n", 10, "--file", "x.txt", ba, "--distortion", "hamming", "--D", 0.2],
    }
    artefacts = {"compress": "data.bin.lz78", "decompress": "restored.bin",
                 "encrypt": "data.bin.lz78.enc"}
    differing = []
    for name, args in commands.items():
        first = _lzkit(args, tmp_path)
        art1 = (tmp_path / artefacts[name]).read_bytes() if name in artefacts else None
        second = _lzkit(args, tmp_path)
        art2 = (tmp_path / artefacts[name]).read_bytes() if name in artefacts else None
        valid = first[0] == 0 and json.loads(first[1])["command"] == name
        if not valid or first != second or art1 != art2:
            differing.append(name)
    restored_ok = (tmp_path / "restored.bin").read_bytes() == (tmp_path / "data.bin").read_bytes()
    ok = not differing and restored_ok
    record(13, "CLI determinism", ok,
           f"{len(commands) - len(differing)}/{len(commands)} subcommands byte-identical"
           + (f", differing: {differing}" if differing else ""))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
