"""Acceptance criteria, one test each, with their time limits.

Every test prints a single PASS/FAIL line. Run the file directly to get the
nine lines without pytest.
"""

import os
import subprocess
import sys
import tempfile
import time
from functools import lru_cache

import pytest

from liftkit import verify

LIMITS = {1: 5, 2: 60, 3: 60, 4: 120, 5: 30, 6: 30, 7: 30, 8: 60, 9: 120}
NAMES = {
    1: "stifling table",
    2: "lifting correctness",
    3: "witness completion",
    4: "oracle theorem checks",
    5: "size and sdt-cost modes",
    6: "tree conversions",
    7: "non-adaptive lifting and theorem",
    8: "proof complexity pipeline",
    9: "reproducibility",
}


class Outcome:
    def __init__(self, num, passed, seconds, detail=""):
        self.num, self.passed, self.seconds, self.detail = num, passed, seconds, detail
        if seconds > LIMITS[num]:
            self.passed = False
            self.detail = f"took {seconds:.1f}s, limit {LIMITS[num]}s" + (f"; {detail}" if detail else "")

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        extra = f" - {self.detail}" if self.detail else ""
        return f"{status} criterion {self.num} ({NAMES[self.num]}) {self.seconds:.2f}s/{LIMITS[self.num]}s{extra}"


def _from_checks(num, checks, seconds):
    bad = [c for c in checks if not c.passed]
    detail = "; ".join(f"{c.name}: {c.detail}" for c in bad) or ", ".join(f"{c.name} {c.count}" for c in checks)
    return Outcome(num, not bad, seconds, detail)


@lru_cache(maxsize=None)
def corpus():
    t0 = time.perf_counter()
    cases = verify.lifting_corpus()
    return cases, time.perf_counter() - t0


@lru_cache(maxsize=None)
def lifting_run():
    cases, build = corpus()
    w = verify.Check("witness completion")
    t0 = time.perf_counter()
    main = verify.lifting_correctness(cases, witnesses=w)
    return main, w, build + time.perf_counter() - t0


def criterion_1():
    c = verify.stifling_table()
    return _from_checks(1, [c], c.seconds)


def criterion_2():
    main, _, secs = lifting_run()
    return _from_checks(2, [main], secs)


def criterion_3():
    # measured inside criterion 2's run
    main, w, secs = lifting_run()
    out = _from_checks(3, [w], secs)
    if w.count == 0:
        out.passed, out.detail = False, "no witness checks ran"
    return out


def criterion_4():
    c = verify.oracle_theorems()
    return _from_checks(4, [c], c.seconds)


def criterion_5():
    cases, build = corpus()
    c = verify.size_and_cost_modes(cases)
    return _from_checks(5, [c], c.seconds)


def criterion_6():
    c = verify.conversions(samples=100)
    return _from_checks(6, [c], c.seconds)


def criterion_7():
    a = verify.nonadaptive_lifting()
    b = verify.nonadaptive_theorem()
    return _from_checks(7, [a, b], a.seconds + b.seconds)


def criterion_8():
    c = verify.proof_pipeline()
    out = _from_checks(8, [c], c.seconds)
    capped = [f"{k}: {v['capped']}" for k, v in c.info.items() if "capped" in v]
    if capped:
        out.detail += " [oracle capped, witness used: " + "; ".join(capped) + "]"
    return out


SEEDED = [
    ["experiment", "random-stifling", "--m", "6", "--k", "2", "--samples", "20", "--seed", "7"],
    ["experiment", "random-stifling", "--m", "4", "--k", "1", "--samples", "20", "--seed", "11"],
    ["source", "--relation", "xor:2", "--gadget", "ip:2", "--kind", "random", "--seed", "3", "--out", "src.json"],
    ["source", "--relation", "xor:2", "--gadget", "ind:1", "--kind", "random", "--protocol", "--seed", "4", "--out", "pc.json"],
    ["lift", "--pdt", "src.json", "--gadget", "ip:2", "--mode", "size", "--seed", "3", "--out", "lifted.json"],
    ["lift", "--pc", "pc.json", "--gadget", "ind:1", "--mode", "sdt-cost", "--seed", "4", "--out", "lifted_pc.json"],
    ["brute", "--measure", "pdt-size", "--compose", "xor:2", "ind:1", "--seed", "1"],
    ["compose-cnf", "--formula", "triangle", "--gadget", "ind:1", "--seed", "2", "--out", "tri.cnf"],
    ["verify", "--suite", "stifling", "--seed", "5"],
]
FILES = ["src.json", "pc.json", "lifted.json", "lifted_pc.json", "tri.cnf"]


def _session(workdir):
    env = dict(os.environ)
    env.pop("LIFTKIT_CAP", None)
    outputs = []
    for argv in SEEDED:
        p = subprocess.run([sys.executable, "-m", "liftkit", "--format", "json", *argv],
                           cwd=workdir, env=env, capture_output=True, timeout=120)
        outputs.append((" ".join(argv[:2]), p.returncode, p.stdout))
    for name in FILES:
        with open(os.path.join(workdir, name), "rb") as fh:
            outputs.append((name, 0, fh.read()))
    return outputs


def criterion_9():
    t0 = time.perf_counter()
    with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
        first, second = _session(a), _session(b)
    problems = []
    for (name, rc1, o1), (_, rc2, o2) in zip(first, second):
        if rc1 != 0 or rc2 != 0:
            problems.append(f"{name} exited {rc1}/{rc2}")
        elif o1 != o2:
            problems.append(f"{name} differs between runs")
        elif not o1.strip():
            problems.append(f"{name} produced no output")
    detail = "; ".join(problems) or f"{len(first)} outputs byte-identical"
    return Outcome(9, not problems, time.perf_counter() - t0, detail)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("num", range(1, 10))
def test_criterion(num, capsys):
    out = CRITERIA[num - 1]()
    with capsys.disabled():
        print("\n" + out.line())
    assert out.passed, out.line()


if __name__ == "__main__":
    results = [fn() for fn in CRITERIA]
    for r in results:
        print(r.line())
    sys.exit(0 if all(r.passed for r in results) else 1)
