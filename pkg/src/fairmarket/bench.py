"""Corpus sweep: solve every instance, check it, and tabulate event counts."""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from .errors import BudgetExceeded, FairMarketError
from .generate import generate
from .io import parse_instance_file, serialize_instance, serialize_result
from .model import Instance
from .pipeline import solve
from .structured import achievable_utilities


@dataclass
class SummaryRow:
    name: str
    n: int
    m: int
    vmax: int
    U: int
    transfers: int | None
    price_rises: int | None
    wall_time: float | None
    status: str  # ok | refuted | budget | error


def _one(job: tuple) -> tuple[SummaryRow, str | None]:
    name, text, fairness, method, check = job
    f = parse_instance_file(text)
    inst = f.instance
    try:
        U = achievable_utilities(inst).U
    except FairMarketError:
        U = -1
    base = dict(name=name, n=inst.n, m=inst.m, vmax=inst.vmax, U=U)
    try:
        rf, refuted = solve(inst, fairness, method, check, name=name)
    except BudgetExceeded:
        return SummaryRow(**base, transfers=None, price_rises=None, wall_time=None, status="budget"), None
    except FairMarketError:
        return SummaryRow(**base, transfers=None, price_rises=None, wall_time=None, status="error"), None
    row = SummaryRow(**base, transfers=rf.stats.get("transfers"), price_rises=rf.stats.get("priceRises"),
                     wall_time=rf.stats.get("wallTime"), status="refuted" if refuted else "ok")
    return row, serialize_result(rf)


def load_corpus(directory: Path) -> list[tuple[str, str]]:
    return [(p.stem, p.read_text()) for p in sorted(Path(directory).glob("*.json"))]


def generated_corpus(count: int, seed: int = 0, families=("random", "binary", "kary", "positive"),
                     n_range=(2, 4), m_range=(2, 7), vmax: int = 10) -> list[tuple[str, str]]:
    """A deterministic mixed-family corpus, as (name, canonical text) pairs."""
    import random

    rng = random.Random(seed)
    out = []
    for idx in range(count):
        fam = families[idx % len(families)]
        n, m = rng.randint(*n_range), rng.randint(*m_range)
        s = rng.randrange(2 ** 31)
        inst: Instance = generate(fam, n, m, vmax, s, k=2)
        name = f"{idx:04d}-{fam}"
        out.append((name, serialize_instance(inst, {"name": name, "seed": s, "family": fam})))
    return out


def run_bench(corpus: list[tuple[str, str]], fairness: str = "ef1", method: str = "market",
              check: str = "auto", out_dir: Path | None = None, jobs: int = 1) -> list[SummaryRow]:
    jobs_in = [(name, text, fairness, method, check) for name, text in corpus]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_one, jobs_in, chunksize=8))
    else:
        results = [_one(j) for j in jobs_in]
    results.sort(key=lambda r: r[0].name)
    rows = [r for r, _ in results]
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for row, text in results:
            if text is not None:
                (out_dir / f"{row.name}.result.json").write_text(text)
        (out_dir / "summary.json").write_text(json.dumps([asdict(r) for r in rows], indent=2) + "\n")
    return rows


def format_table(rows: list[SummaryRow]) -> str:
    head = f"{'name':<20} {'n':>3} {'m':>3} {'vmax':>5} {'U':>6} {'transfers':>9} {'rises':>6} {'status':>8}"
    lines = [head, "-" * len(head)]
    for r in rows:
        t = "-" if r.transfers is None else r.transfers
        p = "-" if r.price_rises is None else r.price_rises
        lines.append(f"{r.name:<20} {r.n:>3} {r.m:>3} {r.vmax:>5} {r.U:>6} {t:>9} {p:>6} {r.status:>8}")
    return "\n".join(lines)
