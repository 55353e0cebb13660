"""Experiment orchestration: configs, parallel runs, statistics, emission.

A config names one algorithm, one function, a problem size, a list of
structure parameters k, and a trial count.  Every run's seed is a stable
hash of (base_seed, function, algorithm, n, k, trial), so results never
depend on worker count or on other entries sharing the config file.
"""
from __future__ import annotations

import ast
import hashlib
import json
import math
import operator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .algorithms import (RunRecord, SelfAdaptiveConfig, TraceRecord,
                         run_mu_lambda_static, run_one_plus_one,
                         run_one_plus_one_alpha, run_self_adaptive)
from .fitness import K_PARAMETERIZED, KIND_TOKENS, make_instance
from .theory import error_threshold

ALGORITHM_TOKENS = ("sa_mu_lambda", "one_plus_one", "one_plus_one_alpha",
                    "mu_lambda_static")
TRACEABLE_ALGORITHMS = ("sa_mu_lambda", "one_plus_one_alpha")
NORMALIZATION_TOKENS = ("none", "k_squared", "n_k", "k_log_k")

DEFAULT_BUDGET = 10 ** 9


class ConfigError(ValueError):
    """Invalid or unresolvable experiment configuration."""


_BIN_OPS = {ast.Add: operator.add, ast.Sub: operator.sub,
            ast.Mult: operator.mul, ast.Div: operator.truediv,
            ast.Pow: operator.pow}
_FUNCS = {"ln": math.log, "log": math.log, "sqrt": math.sqrt, "exp": math.exp}


def eval_expr(expr: str, **variables: float) -> float:
    """Evaluate a small arithmetic expression in the given variables.

    Supports numbers, + - * / ** and parentheses, the functions ln/log/sqrt/
    exp, and the supplied variable names.  Anything else is a config error.
    """
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression {expr!r}: {exc}") from None

    def walk(node: ast.AST) -> float:
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name):
            if node.id in variables:
                return float(variables[node.id])
            raise ConfigError(f"unknown name {node.id!r} in expression {expr!r}")
        if isinstance(node, ast.BinOp) and type(node.op) in _BIN_OPS:
            return _BIN_OPS[type(node.op)](walk(node.left), walk(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            value = walk(node.operand)
            return -value if isinstance(node.op, ast.USub) else value
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1
                and not node.keywords):
            return _FUNCS[node.func.id](walk(node.args[0]))
        raise ConfigError(f"unsupported syntax in expression {expr!r}")

    return walk(tree)


def round_to_int(value: float) -> int:
    """Nearest integer, halves rounding up."""
    return int(math.floor(value + 0.5))


@dataclass(frozen=True)
class AlgorithmParams:
    """Raw algorithm parameters; lam/mu/rate may be expressions in n.

    The mu expression may also reference lam, the already rounded population
    size.  Fields irrelevant to the configured algorithm stay None.
    """

    lam: str | int | None = None
    mu: str | int | None = None
    A: float | None = None
    b: float | None = None
    p_inc: float | None = None
    rate: str | float | None = None
    chi_init: float = 1.0
    epsilon: float | None = None

    def resolve_lam_mu(self, n: int) -> tuple[int, int]:
        if self.lam is None or self.mu is None:
            raise ConfigError("algorithm requires lambda and mu")
        lam = self.lam if isinstance(self.lam, int) else round_to_int(
            eval_expr(str(self.lam), n=n))
        mu = self.mu if isinstance(self.mu, int) else round_to_int(
            eval_expr(str(self.mu), n=n, lam=lam))
        lam, mu = max(1, lam), max(1, mu)
        if mu > lam:
            raise ConfigError(f"resolved mu={mu} exceeds lambda={lam}")
        return lam, mu

    def resolve_rate(self, n: int) -> float:
        if self.rate is None:
            raise ConfigError("algorithm requires a mutation rate")
        rate = self.rate if isinstance(self.rate, (int, float)) else eval_expr(
            str(self.rate), n=n)
        if not 0.0 < rate <= 0.5:
            raise ConfigError(f"rate must lie in (0, 1/2], got {rate}")
        return float(rate)


@dataclass(frozen=True)
class KRange:
    """k grid described by its endpoints; geometric spacing by default."""

    min: int
    max: int
    count: int
    spacing: str = "geometric"

    def values(self) -> list[int]:
        if self.count < 1 or self.min < 1 or self.max < self.min:
            raise ConfigError(f"bad k range {self}")
        if self.spacing == "geometric":
            grid = np.geomspace(self.min, self.max, self.count)
        elif self.spacing == "linear":
            grid = np.linspace(self.min, self.max, self.count)
        else:
            raise ConfigError(f"unknown k spacing {self.spacing!r}; "
                              f"expected geometric or linear")
        values = sorted({round_to_int(float(v)) for v in grid})
        return values


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: algorithm x function x n x k-grid x trials."""

    algorithm: str
    function: str
    n: int
    k: tuple[int, ...] | str | KRange
    trials: int
    base_seed: int
    budget: int = DEFAULT_BUDGET
    params: AlgorithmParams = field(default_factory=AlgorithmParams)
    trace: bool = False
    normalization: str = "none"

    def k_values(self) -> list[int]:
        if isinstance(self.k, KRange):
            values = self.k.values()
        elif isinstance(self.k, str):
            value = eval_expr(self.k, n=self.n, sqrt_n=math.sqrt(self.n))
            values = [round_to_int(value)]
        else:
            values = [int(v) for v in self.k]
        if not values:
            raise ConfigError("k list must not be empty")
        return values

    def validate(self) -> None:
        """Resolve every token and expression; raise ConfigError on any problem."""
        if self.algorithm not in ALGORITHM_TOKENS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; "
                              f"expected one of {ALGORITHM_TOKENS}")
        if self.function not in KIND_TOKENS:
            raise ConfigError(f"unknown function {self.function!r}; "
                              f"expected one of {KIND_TOKENS}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.budget < 1:
            raise ConfigError("budget must be >= 1")
        if self.normalization not in NORMALIZATION_TOKENS:
            raise ConfigError(f"unknown normalization {self.normalization!r}; "
                              f"expected one of {NORMALIZATION_TOKENS}")
        if self.normalization != "none" and self.function not in K_PARAMETERIZED:
            raise ConfigError(f"normalization {self.normalization!r} needs a "
                              f"k-parameterized function, not {self.function!r}")
        if self.trace and self.algorithm not in TRACEABLE_ALGORITHMS:
            raise ConfigError(f"algorithm {self.algorithm!r} does not support "
                              f"tracing (traceable: {TRACEABLE_ALGORITHMS})")
        for k in self.k_values():
            try:
                make_instance(self.function, self.n, _instance_k(self.function, k))
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            if self.normalization == "k_log_k" and k < 2:
                raise ConfigError("k_log_k normalization requires k >= 2")
        if self.algorithm in ("sa_mu_lambda", "mu_lambda_static"):
            self.params.resolve_lam_mu(self.n)
        if self.algorithm in ("one_plus_one", "mu_lambda_static"):
            self.params.resolve_rate(self.n)
        if self.algorithm in ("sa_mu_lambda", "one_plus_one_alpha"):
            for name in ("A", "b"):
                if getattr(self.params, name) is None:
                    raise ConfigError(f"{self.algorithm} requires parameter {name}")
            if not self.params.A > 1.0:
                raise ConfigError(f"A must exceed 1, got {self.params.A}")
            if not 0.0 < self.params.b < 1.0:
                raise ConfigError(f"b must lie in (0, 1), got {self.params.b}")
        if self.algorithm == "sa_mu_lambda":
            if self.params.p_inc is None:
                raise ConfigError("sa_mu_lambda requires parameter p_inc")
            lam, mu = self.params.resolve_lam_mu(self.n)
            try:
                SelfAdaptiveConfig(lam=lam, mu=mu, A=self.params.A,
                                   b=self.params.b, p_inc=self.params.p_inc,
                                   epsilon=self.params.epsilon,
                                   chi_init=self.params.chi_init).resolved(self.n)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        data = asdict(self)
        if isinstance(self.k, KRange):
            data["k"] = asdict(self.k)
        elif not isinstance(self.k, str):
            data["k"] = list(self.k)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        raw_params = dict(data.pop("params", {}) or {})
        if "lambda" in raw_params:
            raw_params["lam"] = raw_params.pop("lambda")
        known = set(AlgorithmParams.__dataclass_fields__)
        unknown = set(raw_params) - known
        if unknown:
            raise ConfigError(f"unknown algorithm parameters: {sorted(unknown)}")
        k = data.get("k")
        if isinstance(k, (list, tuple)):
            data["k"] = tuple(int(v) for v in k)
        elif isinstance(k, dict):
            try:
                data["k"] = KRange(**k)
            except TypeError as exc:
                raise ConfigError(f"bad k range: {exc}") from None
        try:
            return cls(params=AlgorithmParams(**raw_params), **data)
        except TypeError as exc:
            raise ConfigError(f"bad config fields: {exc}") from None


def _instance_k(function: str, k: int) -> int | None:
    return k if function in K_PARAMETERIZED else None


def load_config(path: str | Path) -> ExperimentConfig:
    """Read one experiment config from a YAML file."""
    try:
        data = yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must contain a mapping")
    config = ExperimentConfig.from_dict(data)
    config.validate()
    return config


def save_config(config: ExperimentConfig, path: str | Path) -> None:
    data = config.to_dict()
    data["params"] = {k: v for k, v in data["params"].items() if v is not None}
    Path(path).write_text(yaml.safe_dump(data, sort_keys=False))


def run_seed(base_seed: int, function: str, algorithm: str, n: int, k: int,
             trial: int) -> int:
    """Stable per-run seed; independent of any other runs in the config."""
    key = f"{base_seed}|{function}|{algorithm}|{n}|{k}|{trial}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")


@dataclass(frozen=True)
class RunRow:
    """One run plus the metadata identifying it in the output files."""

    algorithm: str
    function: str
    n: int
    k: int
    trial: int
    seed: int
    evaluations: int
    success: bool
    budget: int


@dataclass(frozen=True)
class SummaryRow:
    """Aggregated statistics for one (algorithm, function, n, k) cell."""

    algorithm: str
    function: str
    n: int
    k: int
    trials: int
    success_count: int
    median_evals: float
    q1: float
    q3: float
    p95_evals: float
    normalized_median: float


def quantile_lower(values: list[float], p: float) -> float:
    """Quantile with the lower-interpolation convention.

    The element at position ceil(p*N) - 1 of the sorted list (clamped to the
    first element), so quartiles of [1,2,3,4] are 1, 2, 3.
    """
    if not values:
        raise ValueError("values must not be empty")
    ordered = sorted(values)
    idx = max(0, math.ceil(p * len(ordered)) - 1)
    return ordered[idx]


def summarize(rows: list[RunRow], normalization: str = "none") -> SummaryRow:
    """Collapse the runs of one cell into a SummaryRow.

    Budget-censored runs contribute their budget value to every statistic and
    are visible through success_count; they are never dropped.
    """
    if not rows:
        raise ValueError("cannot summarize zero runs")
    first = rows[0]
    values = [float(r.evaluations if r.success else r.budget) for r in rows]
    median = quantile_lower(values, 0.5)
    summary = SummaryRow(
        algorithm=first.algorithm, function=first.function, n=first.n,
        k=first.k, trials=len(rows),
        success_count=sum(1 for r in rows if r.success),
        median_evals=median,
        q1=quantile_lower(values, 0.25),
        q3=quantile_lower(values, 0.75),
        p95_evals=quantile_lower(values, 0.95),
        normalized_median=normalize(median, first.function, first.n, first.k,
                                    normalization),
    )
    return summary


def normalize(median_evals: float, function: str, n: int, k: float,
              mode: str) -> float:
    """Rescale a median runtime by the chosen reference growth rate."""
    if mode == "none":
        return median_evals
    if function not in K_PARAMETERIZED:
        raise ConfigError(f"normalization {mode!r} needs a k-parameterized "
                          f"function, not {function!r}")
    if mode == "k_squared":
        return median_evals / k ** 2
    if mode == "n_k":
        return median_evals / (n * k)
    if mode == "k_log_k":
        if k <= 1:
            raise ConfigError("k_log_k normalization requires k > 1")
        return median_evals / (k * math.log(k))
    raise ConfigError(f"unknown normalization mode {mode!r}")


def _execute_run(task: tuple) -> RunRow:
    config, k, trial = task
    seed = run_seed(config.base_seed, config.function, config.algorithm,
                    config.n, k, trial)
    fn = make_instance(config.function, config.n, _instance_k(config.function, k),
                       seed=seed)
    record = _dispatch(config, fn, seed)
    return RunRow(algorithm=config.algorithm, function=config.function,
                  n=config.n, k=k, trial=trial, seed=seed,
                  evaluations=record.evaluations, success=record.success,
                  budget=record.budget)


def _dispatch(config: ExperimentConfig, fn, seed: int) -> RunRecord:
    p = config.params
    if config.algorithm == "sa_mu_lambda":
        lam, mu = p.resolve_lam_mu(config.n)
        sa = SelfAdaptiveConfig(lam=lam, mu=mu, A=p.A, b=p.b, p_inc=p.p_inc,
                                epsilon=p.epsilon, chi_init=p.chi_init)
        record, _ = run_self_adaptive(fn, sa, seed, config.budget)
        return record
    if config.algorithm == "one_plus_one":
        return run_one_plus_one(fn, p.resolve_rate(config.n), seed, config.budget)
    if config.algorithm == "one_plus_one_alpha":
        record, _ = run_one_plus_one_alpha(fn, p.A, p.b, seed, config.budget,
                                           epsilon=p.epsilon, chi_init=p.chi_init)
        return record
    if config.algorithm == "mu_lambda_static":
        lam, mu = p.resolve_lam_mu(config.n)
        return run_mu_lambda_static(fn, lam, mu, p.resolve_rate(config.n),
                                    seed, config.budget)
    raise ConfigError(f"unknown algorithm {config.algorithm!r}")


def _execute_trace_run(task: tuple) -> tuple[int, int, list[TraceRecord]]:
    config, k, trial = task
    seed = run_seed(config.base_seed, config.function, config.algorithm,
                    config.n, k, trial)
    fn = make_instance(config.function, config.n, _instance_k(config.function, k),
                       seed=seed)
    p = config.params
    if config.algorithm == "sa_mu_lambda":
        lam, mu = p.resolve_lam_mu(config.n)
        sa = SelfAdaptiveConfig(lam=lam, mu=mu, A=p.A, b=p.b, p_inc=p.p_inc,
                                epsilon=p.epsilon, chi_init=p.chi_init)
        _, trace = run_self_adaptive(fn, sa, seed, config.budget, trace=True)
    elif config.algorithm == "one_plus_one_alpha":
        _, trace = run_one_plus_one_alpha(fn, p.A, p.b, seed, config.budget,
                                          epsilon=p.epsilon,
                                          chi_init=p.chi_init, trace=True)
    else:
        raise ConfigError(f"algorithm {config.algorithm!r} does not support tracing")
    return k, trial, trace


def _map_tasks(fn, tasks: list, workers: int) -> list:
    if workers <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=1))


def run_experiment(config: ExperimentConfig, workers: int = 1
                   ) -> tuple[list[RunRow], list[SummaryRow]]:
    """Execute trials x k runs; identical output for any worker count."""
    config.validate()
    tasks = [(config, k, trial) for k in config.k_values()
             for trial in range(config.trials)]
    rows = _map_tasks(_execute_run, tasks, workers)
    rows.sort(key=lambda r: (r.function, r.algorithm, r.n, r.k, r.trial))
    summaries = []
    by_cell: dict[tuple, list[RunRow]] = {}
    for row in rows:
        by_cell.setdefault((row.function, row.algorithm, row.n, row.k), []).append(row)
    for cell in sorted(by_cell):
        summaries.append(summarize(by_cell[cell], config.normalization))
    return rows, summaries


@dataclass(frozen=True)
class TraceSummaryRow:
    """Pooled rate statistics for one observed fitness value."""

    fitness: int
    median_rate: float
    p95_rate: float
    overlay_rate: float | None


def overlay_for(config: ExperimentConfig, fitness: int, k: int) -> float | None:
    """Reference rate drawn on trajectory plots for this fitness value.

    The population algorithms get the error threshold 1 - alpha0**(-1/j) on
    prefix-structured functions; OneMax-style functions get the constant 1/n
    and jump_k the constant k/n.  None means no overlay applies.
    """
    if config.function in ("onemax", "onemax_k"):
        return 1.0 / config.n
    if config.function == "jump_k":
        return k / config.n
    if config.algorithm == "sa_mu_lambda":
        lam, mu = config.params.resolve_lam_mu(config.n)
        return float(error_threshold(lam / mu, fitness))
    return None


def run_trace_experiment(config: ExperimentConfig, workers: int = 1
                         ) -> dict[int, tuple[list[tuple], list[TraceSummaryRow]]]:
    """Trace runs and per-fitness rate summaries, keyed by k.

    For each k the first element lists (trial, generation, best_fitness,
    best_rate) rows, the second the per-fitness pooled median and 95th
    percentile of the traced rate plus the overlay value.
    """
    config.validate()
    if config.algorithm not in TRACEABLE_ALGORITHMS:
        raise ConfigError(f"algorithm {config.algorithm!r} does not support tracing")
    tasks = [(config, k, trial) for k in config.k_values()
             for trial in range(config.trials)]
    results = _map_tasks(_execute_trace_run, tasks, workers)
    out: dict[int, tuple[list[tuple], list[TraceSummaryRow]]] = {}
    for k in config.k_values():
        rows = []
        pooled: dict[int, list[float]] = {}
        for rk, trial, trace in results:
            if rk != k:
                continue
            for rec in trace:
                rows.append((trial, rec.generation, rec.best_fitness, rec.best_rate))
                pooled.setdefault(rec.best_fitness, []).append(rec.best_rate)
        rows.sort(key=lambda r: (r[0], r[1]))
        summary = [TraceSummaryRow(fitness=f,
                                   median_rate=quantile_lower(pooled[f], 0.5),
                                   p95_rate=quantile_lower(pooled[f], 0.95),
                                   overlay_rate=overlay_for(config, f, k))
                   for f in sorted(pooled)]
        out[k] = (rows, summary)
    return out


# ---------------------------------------------------------------------------
# Emission

RUNS_COLUMNS = "algorithm,function,n,k,trial,seed,evaluations,success,budget"
SUMMARY_COLUMNS = ("algorithm,function,n,k,trials,success_count,median,q1,q3,"
                   "p95,normalized_median")
TRACE_COLUMNS = "trial,generation,best_fitness,best_rate"
TRACE_SUMMARY_COLUMNS = "fitness,median_rate,p95_rate,overlay_rate"


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def _write_lines(path: Path, header: str, rows: list[tuple]) -> None:
    lines = [header] + [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def write_outputs(rows: list[RunRow], summaries: list[SummaryRow],
                  out_dir: str | Path, fmt: str = "csv") -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "csv":
        runs_path = out / "runs.csv"
        _write_lines(runs_path, RUNS_COLUMNS,
                     [(r.algorithm, r.function, r.n, r.k, r.trial, r.seed,
                       r.evaluations, r.success, r.budget) for r in rows])
        summary_path = out / "summary.csv"
        _write_lines(summary_path, SUMMARY_COLUMNS,
                     [(s.algorithm, s.function, s.n, s.k, s.trials,
                       s.success_count, s.median_evals, s.q1, s.q3,
                       s.p95_evals, s.normalized_median) for s in summaries])
    elif fmt == "json":
        runs_path = out / "runs.json"
        runs_path.write_text(json.dumps([asdict(r) for r in rows], indent=2) + "\n")
        summary_path = out / "summary.json"
        summary_path.write_text(json.dumps([asdict(s) for s in summaries],
                                           indent=2) + "\n")
    else:
        raise ConfigError(f"unknown output format {fmt!r}")
    written += [runs_path, summary_path]
    return written


def write_trace_outputs(traces: dict[int, tuple[list[tuple], list[TraceSummaryRow]]],
                        out_dir: str | Path, fmt: str = "csv") -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for k, (rows, summary) in sorted(traces.items()):
        if fmt == "csv":
            trace_path = out / f"trace_k{k}.csv"
            _write_lines(trace_path, TRACE_COLUMNS, rows)
            summary_path = out / f"trace_summary_k{k}.csv"
            _write_lines(summary_path, TRACE_SUMMARY_COLUMNS,
                         [(s.fitness, s.median_rate, s.p95_rate, s.overlay_rate)
                          for s in summary])
        elif fmt == "json":
            trace_path = out / f"trace_k{k}.json"
            trace_path.write_text(json.dumps(
                [dict(zip(("trial", "generation", "best_fitness", "best_rate"), r))
                 for r in rows], indent=2) + "\n")
            summary_path = out / f"trace_summary_k{k}.json"
            summary_path.write_text(json.dumps([asdict(s) for s in summary],
                                               indent=2) + "\n")
        else:
            raise ConfigError(f"unknown output format {fmt!r}")
        written += [trace_path, summary_path]
    return written
