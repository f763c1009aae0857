"""Checking tests and suites against their recorded expectations."""

from __future__ import annotations

import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .config import ConfigError, ModelConfig
from .enumerate import CandidateExecution, check_final, enumerate_candidates
from .isa import BoundExceeded, ElaborationError
from .litmus import LitmusTest, ParseError, atoms, load_test
from .model import consistent

SCHEMA = 1
DEFAULT_MATRIX = ("default", "sea_r", "sea_w", "sea_rw", "exs")
ALLOWED, FORBIDDEN = "Allowed", "Forbidden"
_SHORT = {ALLOWED: "allow", FORBIDDEN: "forbid"}


@dataclass
class Verdict:
    test: str
    config: ModelConfig
    outcome: str
    witness: CandidateExecution | None = None
    violations: Counter = field(default_factory=Counter)
    candidates_total: int = 0
    candidates_consistent: int = 0
    time_ms: float = 0.0

    @property
    def allowed(self) -> bool:
        return self.outcome == ALLOWED

    @property
    def short(self) -> str:
        return _SHORT[self.outcome]

    def to_json(self, variant: str = "", expected: str | None = None) -> dict:
        return {
            "schema": SCHEMA,
            "test": self.test,
            "variant": variant,
            "config": self.config.describe(),
            "outcome": self.outcome,
            "expected": expected,
            "match": matches(self.short, expected),
            "candidates_total": self.candidates_total,
            "candidates_consistent": self.candidates_consistent,
            "time_ms": round(self.time_ms, 3),
            "violations": dict(self.violations),
        }


def matches(outcome: str, expected: str | None) -> bool:
    return expected in (None, "unknown") or expected == outcome


def check(test: LitmusTest, config: ModelConfig | None = None) -> Verdict:
    """Allowed iff some feasible, consistent candidate satisfies the final condition."""
    config = config or ModelConfig()
    t0 = time.perf_counter()
    total = ok = 0
    witness = None
    violations: Counter = Counter()
    for cand in enumerate_candidates(test, config):
        total += 1
        report = consistent(cand, config)
        hit = check_final(cand, test.final)
        if report.ok:
            ok += 1
            if hit and witness is None:
                witness = cand
        elif hit:
            violations.update(report.failed())
    outcome = ALLOWED if witness is not None else FORBIDDEN
    return Verdict(test.name, config, outcome, witness, violations, total, ok,
                   (time.perf_counter() - t0) * 1000)


def allowed_outcomes(test: LitmusTest, config: ModelConfig | None = None) -> set[tuple]:
    """Final states of consistent candidates, projected on the registers and
    locations the final condition mentions."""
    config = config or ModelConfig()
    addrs = test.addresses()
    regs = sorted({(a.tid, int(a.name[1:])) for a in atoms(test.final) if a.tid is not None})
    out = set()
    for cand in enumerate_candidates(test, config):
        if consistent(cand, config).ok:
            r = cand.final_registers()
            m = cand.final_memory()
            out.add(tuple(r[t][k] for t, k in regs) + tuple(m[addrs[loc]] for loc in test.locations()))
    return out


# suites --------------------------------------------------------------------


@dataclass
class SuiteReport:
    rows: list[dict] = field(default_factory=list)
    errors: list[dict] = field(default_factory=list)

    @property
    def mismatches(self) -> list[dict]:
        return [r for r in self.rows if not r["match"]]

    @property
    def resource_errors(self) -> list[dict]:
        return [e for e in self.errors if e["kind"] == "bound"]

    @property
    def exit_code(self) -> int:
        if self.mismatches:
            return 1
        if any(e["kind"] != "bound" for e in self.errors):
            return 2
        if self.errors:
            return 3
        return 0

    def totals(self) -> dict:
        return {"checks": len(self.rows), "mismatches": len(self.mismatches), "errors": len(self.errors)}

    def table(self) -> str:
        lines = [f"{'test':40} {'variant':16} {'outcome':10} {'expected':9} ok"]
        for r in self.rows:
            lines.append(f"{r['test']:40} {r['variant']:16} {r['outcome']:10} {str(r['expected']):9} "
                         f"{'yes' if r['match'] else 'NO'}")
        for e in self.errors:
            lines.append(f"{e['file']}: {e['kind']} error: {e['message']}")
        t = self.totals()
        lines.append(f"{t['checks']} checks, {t['mismatches']} mismatches, {t['errors']} errors")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "results": self.rows, "errors": self.errors, "totals": self.totals()}


def _check_file(path: str, variants: tuple[str, ...]) -> tuple[list[dict], list[dict]]:
    try:
        test = load_test(path)
    except ParseError as e:
        return [], [{"file": path, "kind": "parse", "message": str(e)}]
    rows, errors = [], []
    wanted = list(variants) + [v for v in test.expect if v not in variants]
    for variant in wanted:
        try:
            config = ModelConfig.variant(variant)
            v = check(test, config)
        except BoundExceeded as e:
            errors.append({"file": path, "kind": "bound", "message": f"{variant}: {e}"})
            continue
        except (ConfigError, ElaborationError) as e:
            errors.append({"file": path, "kind": "usage", "message": f"{variant}: {e}"})
            continue
        rows.append(v.to_json(variant, test.expectation(variant)) | {"file": path})
    return rows, errors


def corpus_files(paths) -> list[str]:
    out = []
    for p in paths:
        p = Path(p)
        out.extend(sorted(str(f) for f in p.glob("*.elitmus")) if p.is_dir() else [str(p)])
    return out


def run_suite(paths, variants=DEFAULT_MATRIX, jobs: int = 1) -> SuiteReport:
    files = corpus_files([paths] if isinstance(paths, (str, os.PathLike)) else paths)
    variants = tuple(variants)
    report = SuiteReport()
    if jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_check_file, files, [variants] * len(files)))
    else:
        results = [_check_file(f, variants) for f in files]
    for rows, errors in results:
        report.rows.extend(rows)
        report.errors.extend(errors)
    return report
