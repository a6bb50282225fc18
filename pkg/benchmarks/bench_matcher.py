"""Benchmark the compiled scan kernel against the pure-Python fallback.

Both kernels get the same automaton tables and the same folded inputs, so
the numbers isolate the kernel itself. Run directly:

    python3 benchmarks/bench_matcher.py [--chars 200000] [--repeats 5]
"""

from __future__ import annotations

import argparse
import random
import statistics
import time

from fdcloud.annotate import compile_matcher
from fdcloud.annotate.lexicon import Lexicon, fold_text
from fdcloud.annotate import _scan_py

try:
    from fdcloud.annotate import _scan_cy
except ImportError:
    _scan_cy = None


def build_corpus(chars: int, seed: int = 1) -> tuple[Lexicon, str]:
    terms = {
        "wheat": "c:wheat",
        "wheat rust": "c:wheat-rust",
        "rust": "c:rust",
        "leaf blight": "c:blight",
        "irrigation": "c:irrigation",
        "soil moisture": "c:soil",
        "nitrogen": "c:nitrogen",
        "harvest": "c:harvest",
    }
    fillers = (
        "the report from the northern plots describes conditions after rain "
        "with scattered markers of stress and growth across every field"
    ).split()
    rng = random.Random(seed)
    vocabulary = list(terms) + fillers
    words = []
    size = 0
    while size < chars:
        word = rng.choice(vocabulary)
        words.append(word)
        size += len(word) + 1
    return Lexicon(entries=terms), " ".join(words)


def time_kernel(kernel, matcher, folded: str, repeats: int) -> tuple[float, int]:
    # one warm-up pass, then the timed runs
    matches = kernel.raw_matches(
        folded, matcher.trans, matcher.fail,
        matcher.out_len, matcher.out_pat, matcher.out_link,
    )
    laps = []
    for _ in range(repeats):
        started = time.perf_counter()
        result = kernel.raw_matches(
            folded, matcher.trans, matcher.fail,
            matcher.out_len, matcher.out_pat, matcher.out_link,
        )
        laps.append(time.perf_counter() - started)
        assert result == matches
    return statistics.median(laps), len(matches)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--chars", type=int, default=200_000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    lexicon, text = build_corpus(args.chars)
    matcher = compile_matcher(lexicon)
    folded = fold_text(text)

    print(f"text: {len(text):,} chars, lexicon: {len(lexicon.entries)} surfaces")
    py_s, py_matches = time_kernel(_scan_py, matcher, folded, args.repeats)
    rate = len(text) / py_s / 1e6
    print(f"python   kernel: {py_s * 1e3:9.2f} ms   {rate:7.1f} Mchar/s   {py_matches} matches")

    if _scan_cy is None:
        print("compiled kernel: not built in this environment")
        return
    cy_s, cy_matches = time_kernel(_scan_cy, matcher, folded, args.repeats)
    rate = len(text) / cy_s / 1e6
    print(f"compiled kernel: {cy_s * 1e3:9.2f} ms   {rate:7.1f} Mchar/s   {cy_matches} matches")
    assert py_matches == cy_matches
    print(f"speedup: {py_s / cy_s:.1f}x")


if __name__ == "__main__":
    main()
