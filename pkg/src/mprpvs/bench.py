"""Instance generation, guarantee factors and pipeline-vs-oracle reports."""

from __future__ import annotations

import csv
import io
import json
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Callable, Sequence

from .instance import Instance, Site, parse_instance
from .oracle import OracleCapError, OracleConfig, solve_exact
from .pipeline import PipelineConfig, solve
from .solution import Solution, check_feasibility, profit
from .wspd import spanner_length_factor


class GenerationError(ValueError):
    pass


def theoretical_factor(T: int, m: int, epsilon: float) -> float:
    """Approximation factor ``8 ln2 log2(T) (1 + eps) (1 + 1/(1 + sqrt m))^2``."""
    _check_factor_args(T, m, epsilon)
    return 8 * math.log(2) * math.log2(T) * (1 + epsilon) * spanner_length_factor(m) ** 2


def theoretical_factor_delta(T: int, m: int, epsilon: float) -> float:
    """Same factor with ``(1 + eps)`` replaced by ``(1 + delta) = (1 + eps)^2``."""
    _check_factor_args(T, m, epsilon)
    return 8 * math.log(2) * math.log2(T) * (1 + epsilon) ** 2 * spanner_length_factor(m) ** 2


def _check_factor_args(T: int, m: int, epsilon: float) -> None:
    if T < 2:
        raise ValueError(f"T must be at least 2, got {T}")
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    if epsilon < 0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")


def generate(
    seed: int,
    n: int,
    m: int,
    T: int,
    Q: int | None = None,
    alpha: float = 2.0,
    spread: float | None = None,
    q_min: int = 10,
    constant_supply: bool = False,
) -> Instance:
    """Seeded random instance.

    Sites are uniform in ``[0, spread]^2`` with the depot at the centre;
    ``spread`` defaults to ``T / 2`` so that most windows are reachable.
    Windows are random integer subintervals of ``[0, T]``. Each ``q_max``
    is an integer in ``[q_min, floor(q_min * alpha)]``, so the discrepancy
    bound holds by construction. ``Q`` defaults to 40% of total supply.
    """
    if n < 0 or m < 1 or T < 1:
        raise GenerationError(f"need n >= 0, m >= 1, T >= 1 (got n={n}, m={m}, T={T})")
    if not alpha > 1:
        raise GenerationError(f"alpha must exceed 1, got {alpha}")
    if spread is None:
        spread = T / 2
    if spread <= 0 or q_min < 1:
        raise GenerationError("spread and q_min must be positive")
    rng = random.Random(seed)
    q_hi = math.floor(q_min * alpha)
    sites = []
    for i in range(1, n + 1):
        x = round(rng.uniform(0, spread), 4)
        y = round(rng.uniform(0, spread), 4)
        e = rng.randint(0, T - 1)
        l = rng.randint(e + 1, T)
        q = rng.randint(q_min, q_hi)
        sites.append(Site(i, x, y, q / (l - e), e, l))
    total = sum(s.q_max for s in sites)
    if Q is None:
        Q = max(1, int(0.4 * total))
    if Q < 1:
        raise GenerationError(f"Q must be positive, got {Q}")
    return Instance(tuple(sites), (spread / 2, spread / 2), m, Q, T, alpha, constant_supply)


@dataclass
class RatioReport:
    instance: str
    seed: int | None
    n: int
    m: int
    T: int
    epsilon: float
    delta: float
    pipeline_profit: float
    reference: float
    reference_kind: str
    factor: float
    factor_delta: float
    ratio: float | None
    feasible: bool
    violations: int
    pipeline_seconds: float | None = None
    oracle_seconds: float | None = None

    @property
    def meets_bound(self) -> bool:
        if self.reference <= 0:
            return True
        return self.pipeline_profit * self.factor >= self.reference * (1 - 1e-9)


CSV_FIELDS = [f.name for f in fields(RatioReport)]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def reports_to_csv(rows: Sequence[RatioReport], timings: bool = False) -> str:
    cols = CSV_FIELDS if timings else [c for c in CSV_FIELDS if not c.endswith("_seconds")]
    buf = io.StringIO()
    buf.write("# log base 2 in factor; factor uses (1+eps), factor_delta uses (1+eps)^2\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        data = asdict(row)
        writer.writerow([_fmt(data[c]) for c in cols])
    return buf.getvalue()


def reports_from_csv(text: str) -> list[RatioReport]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    types = {f.name: f.type for f in fields(RatioReport)}
    out = []
    for rec in reader:
        kwargs = {}
        for name, raw in rec.items():
            kind = types[name]
            if raw == "":
                kwargs[name] = None
            elif name == "feasible":
                kwargs[name] = raw == "1"
            elif kind.startswith("int"):
                kwargs[name] = int(raw)
            elif kind.startswith("float"):
                kwargs[name] = float(raw)
            else:
                kwargs[name] = raw
        out.append(RatioReport(**kwargs))
    return out


Solver = Callable[[Instance, PipelineConfig], "tuple[Solution, object]"]


def evaluate_instance(
    name: str,
    instance: Instance,
    config: PipelineConfig,
    oracle_config: OracleConfig | None = OracleConfig(),
    seed: int | None = None,
    solver: Solver = solve,
) -> RatioReport:
    t0 = time.perf_counter()
    solution, _ = solver(instance, config)
    t1 = time.perf_counter()
    violations = check_feasibility(solution, instance)
    p = profit(solution, instance)

    reference, kind, t_oracle = None, "upper_bound", None
    if oracle_config is not None:
        try:
            t2 = time.perf_counter()
            reference = profit(solve_exact(instance, oracle_config), instance)
            t_oracle = time.perf_counter() - t2
            kind = "oracle"
        except OracleCapError:
            pass
    if reference is None:
        reference = float(sum(s.q_max for s in instance.sites))
    T = max(instance.T, 2)
    eps = config.epsilon
    return RatioReport(
        instance=name,
        seed=seed,
        n=instance.n,
        m=instance.m,
        T=instance.T,
        epsilon=eps,
        delta=2 * eps + eps * eps,
        pipeline_profit=p,
        reference=reference,
        reference_kind=kind,
        factor=theoretical_factor(T, instance.m, eps),
        factor_delta=theoretical_factor_delta(T, instance.m, eps),
        ratio=p / reference if reference > 0 else None,
        feasible=not violations,
        violations=len(violations),
        pipeline_seconds=t1 - t0,
        oracle_seconds=t_oracle,
    )


def _evaluate_file(args) -> RatioReport:
    path, config, oracle_config, solver = args
    text = Path(path).read_text(encoding="utf-8")
    instance = parse_instance(text, str(path))
    seed = json.loads(text).get("seed")
    return evaluate_instance(Path(path).stem, instance, config, oracle_config, seed, solver)


def run_experiment(
    corpus: Sequence[str | Path],
    config: PipelineConfig = PipelineConfig(),
    oracle_config: OracleConfig | None = OracleConfig(),
    solver: Solver = solve,
    workers: int = 1,
) -> list[RatioReport]:
    """One report row per instance file, in input order."""
    jobs = [(p, config, oracle_config, solver) for p in corpus]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_evaluate_file, jobs))
    return [_evaluate_file(j) for j in jobs]


def exit_status(rows: Sequence[RatioReport]) -> int:
    return 0 if all(r.feasible for r in rows) else 1
