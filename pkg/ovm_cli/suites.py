"""Property suites behind ``ovm verify``.

Each suite draws a seeded corpus, checks one family of invariants and
returns a ``SuiteResult`` with the worst residual seen and a list of
failure messages (with a JSON dump of the offending instance where one
exists).  Trial ``i`` of a suite always uses
``default_rng([seed, salt, i])``, so results do not depend on the worker
count or scheduling.

Usage::

    ovm verify --suite theorem --trials 500 --seed 42
    ovm verify --suite all --workers 4 --json
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, TypeVar

import numpy as np
from rich.console import Console
from rich.table import Table

from .characterization import (
    holder_check,
    in_omega,
    search_positive_violation,
    search_violation,
)
from .config import (
    CERTIFY_TOL,
    DEFAULT_DIM_MAX,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    EPS_GRID,
    ZERO_VARIANCE,
)
from .counterexample import (
    build_dilation_matrix,
    build_povm,
    dilation_power,
    determinant,
    fibonacci_example,
    fibonacci_numbers,
    hoelder_grid_search,
    solve_params,
    tensor_example,
    tensor_example_povm,
)
from .dilation import (
    compress,
    dilate_minimal,
    effect_rank,
    invariant_defects,
    kadison_identity_defect,
    moment_via_dilation,
    p_commutes,
)
from .errors import OVMError
from .hermitian import (
    HermitianMatrix,
    approx_eq,
    commutator_norm,
    random_contraction,
    random_hermitian,
    random_projection,
    random_psd,
)
from .inequalities import (
    CompressionMap,
    hansen_equality_case,
    hansen_gap,
    kadison_gap,
    kadison_gap_algebraic,
    lieb_ruskai_monotone,
    lieb_ruskai_pinv,
    lieb_ruskai_series,
)
from .povm import (
    FiniteOVM,
    hankel,
    is_spectral,
    moment,
    random_ovm,
    random_spectral_ovm,
    standardize,
    variance,
)

logger = logging.getLogger(__name__)

PSD_SLACK = 1e-8
Q_RESIDUAL_FLOOR = 1e-6
EXPONENT_BOUND = 8
TAUS: tuple[float, ...] = (1.0, -1.0, 2.0, 0.5)
HANSEN_EXPONENTS: tuple[float, ...] = (0.25, 0.5, 0.75)
MAX_DUMPS = 3


@dataclass(frozen=True)
class SuiteConfig:
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    dim_max: int = DEFAULT_DIM_MAX
    workers: int = 1
    tol: float = CERTIFY_TOL


@dataclass
class SuiteResult:
    key: str
    label: str
    instances: int = 0
    max_residual: float = 0.0
    failures: list[str] = field(default_factory=list)
    dumps: list[dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def residual(self, value: float) -> None:
        self.max_residual = max(self.max_residual, float(value))

    def fail(self, message: str, dump: dict[str, Any] | None = None) -> None:
        self.failures.append(message)
        if dump is not None and len(self.dumps) < MAX_DUMPS:
            self.dumps.append(dump)

    def to_dict(self) -> dict[str, Any]:
        return {
            "suite": self.key,
            "instances": self.instances,
            "max_residual": self.max_residual,
            "passed": self.passed,
            "failures": list(self.failures),
            "dumps": list(self.dumps),
        }


T = TypeVar("T")


def _map_trials(fn: Callable[[int], T], trials: int, workers: int) -> list[T]:
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, range(trials)))
    return [fn(i) for i in range(trials)]


def _rng(cfg: SuiteConfig, salt: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, salt, trial])


def _psd_slack(a: HermitianMatrix) -> float:
    """How far below ``-PSD_SLACK * scale`` the spectrum reaches (0 when PSD)."""
    values = a.eigenvalues()
    scale = 1.0 + float(np.max(np.abs(values)))
    return max(0.0, -float(values[0]) / scale)


def _omega_pairs() -> list[tuple[int, int]]:
    return [
        (p, q)
        for q in range(1, EXPONENT_BOUND + 1)
        for p in range(1, q + 1)
        if in_omega(p, q)
    ]


def _outside_pairs() -> list[tuple[int, int]]:
    return [
        (p, q)
        for q in range(1, EXPONENT_BOUND + 1)
        for p in range(1, q + 1)
        if not in_omega(p, q)
    ]


def _random_matrix(rng: np.random.Generator, dim: int) -> np.ndarray:
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def _commuting_part(a: HermitianMatrix, p: HermitianMatrix) -> HermitianMatrix:
    """``P A P + (I - P) A (I - P)``, which commutes with ``P``."""
    q = np.eye(p.dim) - p.data
    return HermitianMatrix(p.data @ a.data @ p.data + q @ a.data @ q)


# ---------------------------------------------------------------------------
# Inequality suites
# ---------------------------------------------------------------------------


def run_kadison(cfg: SuiteConfig) -> SuiteResult:
    """Compression gap PSD, zero iff ``PA = AP``, and the algebraic identity."""
    result = SuiteResult("kadison", "Kadison gap")

    def trial(i: int) -> tuple[float, float, bool, bool]:
        rng = _rng(cfg, 1, i)
        big = int(rng.integers(2, 7))
        p = random_projection(rng, big, int(rng.integers(1, big)))
        a = random_hermitian(rng, big)
        if i % 2:
            a = _commuting_part(a, p)
        c = CompressionMap.from_projection(p)
        gap = kadison_gap(c, a)
        scale = 1.0 + a.norm_fro() ** 2
        identity = (gap - kadison_gap_algebraic(c, a)).norm_fro() / scale
        gap_zero = gap.norm_fro() <= 1e-8 * scale
        commutes = commutator_norm(p, a) <= 1e-8 * (1.0 + a.norm_fro())
        return _psd_slack(gap), identity, gap_zero, commutes

    for i, (slack, identity, gap_zero, commutes) in enumerate(
        _map_trials(trial, cfg.trials, cfg.workers)
    ):
        result.instances += 1
        result.residual(max(slack, identity))
        if slack > PSD_SLACK:
            result.fail(f"trial {i}: gap not PSD (slack {slack:.3g})")
        if identity > 1e-9:
            result.fail(f"trial {i}: algebraic form differs by {identity:.3g}")
        if gap_zero != commutes:
            result.fail(f"trial {i}: gap_zero={gap_zero} but commutes={commutes}")
    return result


def run_hansen(cfg: SuiteConfig) -> SuiteResult:
    """Hansen gap PSD for contractions and the projection equality case."""
    result = SuiteResult("hansen", "Hansen gap / equality case")

    def trial(i: int) -> tuple[float, bool, bool]:
        rng = _rng(cfg, 2, i)
        dim = int(rng.integers(2, max(cfg.dim_max, 2) + 1))
        s = HANSEN_EXPONENTS[i % len(HANSEN_EXPONENTS)]
        a = random_psd(rng, dim)
        slack = _psd_slack(hansen_gap(a, random_contraction(rng, dim), s))
        p = random_projection(rng, dim, int(rng.integers(1, dim)))
        b = _commuting_part(random_psd(rng, dim), p) if i % 2 else random_psd(rng, dim)
        gap_zero, commutes = hansen_equality_case(b, p, s)
        return slack, gap_zero, commutes

    for i, (slack, gap_zero, commutes) in enumerate(_map_trials(trial, cfg.trials, cfg.workers)):
        result.instances += 1
        result.residual(slack)
        if slack > PSD_SLACK:
            result.fail(f"trial {i}: Hansen gap not PSD (slack {slack:.3g})")
        if gap_zero != commutes:
            result.fail(f"trial {i}: equality case gap_zero={gap_zero}, commutes={commutes}")
    return result


def run_lieb_ruskai(cfg: SuiteConfig) -> SuiteResult:
    """``G(eps)`` PSD along the net, monotone, convergent and matching the pseudoinverse."""
    result = SuiteResult("lieb-ruskai", "Lieb-Ruskai net")

    def trial(i: int) -> tuple[float, float, float, bool]:
        rng = _rng(cfg, 3, i)
        big = int(rng.integers(2, 6))
        c = CompressionMap.from_projection(random_projection(rng, big, int(rng.integers(1, big))))
        a, b = _random_matrix(rng, big), _random_matrix(rng, big)
        series = lieb_ruskai_series(c, a, b, EPS_GRID)
        slack = max(_psd_slack(g) for g in series)
        scale = 1.0 + series[0].norm_fro()
        step = (series[-1] - series[-2]).norm_fro() / scale
        oracle = (series[-1] - lieb_ruskai_pinv(c, a, b)).norm_fro() / scale
        monotone = lieb_ruskai_monotone(series, np.eye(c.rank))
        return slack, step, oracle, monotone

    for i, (slack, step, oracle, monotone) in enumerate(
        _map_trials(trial, cfg.trials, cfg.workers)
    ):
        result.instances += 1
        result.residual(max(slack, step))
        if slack > PSD_SLACK:
            result.fail(f"trial {i}: G(eps) not PSD (slack {slack:.3g})")
        if step >= 1e-6:
            result.fail(f"trial {i}: net not converged (last step {step:.3g})")
        if oracle >= 1e-6:
            result.fail(f"trial {i}: pseudoinverse limit differs by {oracle:.3g}")
        if not monotone:
            result.fail(f"trial {i}: <G(eps)h, h> increased as eps decreased")
    return result


# ---------------------------------------------------------------------------
# Measure suites
# ---------------------------------------------------------------------------


def _mixed_corpus_member(cfg: SuiteConfig, salt: int, i: int) -> FiniteOVM:
    rng = _rng(cfg, salt, i)
    dim = int(rng.integers(1, cfg.dim_max + 1))
    if i % 4 == 0:
        return random_spectral_ovm(rng, dim)
    return random_ovm(rng, dim, int(rng.integers(1, 6)))


def run_hankel(cfg: SuiteConfig) -> SuiteResult:
    """Hankel matrices and variance PSD; ``Var(F) = 0`` iff ``F`` spectral."""
    result = SuiteResult("hankel", "Hankel / variance")

    def trial(i: int) -> tuple[FiniteOVM, float, float, float]:
        f = _mixed_corpus_member(cfg, 4, i)
        slack = max(_psd_slack(hankel(f, n)) for n in range(5))
        var = variance(f)
        return f, slack, _psd_slack(var), variance(standardize(f)).norm_fro()

    for i, (f, slack, var_slack, var_norm) in enumerate(
        _map_trials(trial, cfg.trials, cfg.workers)
    ):
        result.instances += 1
        result.residual(max(slack, var_slack))
        if slack > PSD_SLACK:
            result.fail(f"trial {i}: Hankel matrix not PSD (slack {slack:.3g})", f.to_dict())
        if var_slack > 1e-9:
            result.fail(f"trial {i}: variance not PSD (slack {var_slack:.3g})", f.to_dict())
        if is_spectral(f, 1e-8) != (var_norm <= ZERO_VARIANCE):
            result.fail(
                f"trial {i}: spectral={is_spectral(f, 1e-8)} but ||Var||={var_norm:.3g}",
                f.to_dict(),
            )
    return result


def run_dilation(cfg: SuiteConfig) -> SuiteResult:
    """Minimal dilations: invariants, commutation iff spectral, compressed moments."""
    result = SuiteResult("dilation", "Naimark dilation")

    def trial(i: int) -> tuple[FiniteOVM, list[str], float]:
        f = _mixed_corpus_member(cfg, 5, i)
        d = dilate_minimal(f)
        problems: list[str] = []
        worst = max(invariant_defects(d).values())
        if worst > 1e-9 * (1.0 + d.big_dim):
            problems.append(f"structural defect {worst:.3g}")
        if d.big_dim != sum(effect_rank(e) for e in f.effects):
            problems.append(f"big_dim {d.big_dim} is not the rank sum")
        if is_spectral(f, 1e-8) != p_commutes(d, 1e-8):
            problems.append("spectrality and P-commutation disagree")
        for k in range(7):
            direct = moment(f, k)
            via = moment_via_dilation(d, k)
            worst = max(worst, (direct - via).norm_fro() / (1.0 + direct.norm_fro()))
            if not approx_eq(direct, via, 1e-9):
                problems.append(f"moment {k} differs through the dilation")
        back = compress(d)
        if len(back) != len(f) or not all(
            approx_eq(x, y, 1e-9) for x, y in zip(back.effects, f.effects)
        ):
            problems.append("compression does not reproduce the measure")
        x = random_hermitian(_rng(cfg, 6, i), d.big_dim)
        identity = kadison_identity_defect(d, x) / (1.0 + x.norm_fro() ** 2)
        if identity > 1e-9:
            problems.append(f"P X^2 P identity defect {identity:.3g}")
        return f, problems, max(worst, identity)

    for i, (f, problems, worst) in enumerate(_map_trials(trial, cfg.trials, cfg.workers)):
        result.instances += 1
        result.residual(worst)
        for message in problems:
            result.fail(f"trial {i}: {message}", f.to_dict())
    return result


# ---------------------------------------------------------------------------
# Two-moment suites
# ---------------------------------------------------------------------------


def run_theorem(cfg: SuiteConfig) -> SuiteResult:
    """No contradicting verdicts on Omega and a q-residual bounded away from zero."""
    result = SuiteResult("theorem", "Two-moment stress (Omega)")
    for p, q in _omega_pairs():
        outcome = search_violation(
            p, q, cfg.trials, cfg.seed, cfg.dim_max, workers=cfg.workers, tol=cfg.tol
        )
        result.instances += outcome.evaluated
        if outcome.witness is not None:
            w = outcome.witness
            result.fail(
                f"({p}, {q}) trial {w.trial}: moments match for a non-spectral measure",
                {"T": w.t.to_dict(), "F": w.f.to_dict(), "verdict": w.verdict.to_dict()},
            )
        small = [r for r in outcome.residuals if r <= Q_RESIDUAL_FLOOR]
        if small:
            result.fail(
                f"({p}, {q}): {len(small)} trial(s) with q-residual <= {Q_RESIDUAL_FLOOR:g}"
            )
        logger.info("theorem suite (%d, %d): min q-residual %.3g", p, q, outcome.min_residual)
    return result


def run_positive(cfg: SuiteConfig) -> SuiteResult:
    """Positive-support stress at exponent pairs (1/2, 2) and (1, 3)."""
    result = SuiteResult("positive", "Two-moment stress (positive)")
    for alpha, beta in ((0.5, 2.0), (1.0, 3.0)):
        outcome = search_positive_violation(
            alpha, beta, cfg.trials, cfg.seed, cfg.dim_max, workers=cfg.workers, tol=cfg.tol
        )
        result.instances += outcome.evaluated
        if outcome.witness is not None:
            w = outcome.witness
            result.fail(
                f"({alpha:g}, {beta:g}) trial {w.trial}: moments match for a non-spectral measure",
                {"T": w.t.to_dict(), "F": w.f.to_dict(), "verdict": w.verdict.to_dict()},
            )
        small = [r for r in outcome.residuals if r <= Q_RESIDUAL_FLOOR]
        if small:
            result.fail(f"({alpha:g}, {beta:g}): {len(small)} trial(s) matched within 1e-6")
    return result


def _check_counterexample(p: int, q: int, tau: float) -> tuple[list[str], float]:
    params = solve_params(p, q, tau)
    problems: list[str] = []
    worst = max(params.residuals())
    if worst > 1e-10:
        problems.append(f"system residual {worst:.3g}")
    s = build_dilation_matrix(params)
    for k in (p, q):
        corner = float(np.real(s.power(k).entry(0, 0)))
        err = abs(corner - tau**k) / max(1.0, abs(tau**k))
        worst = max(worst, err)
        if err > 1e-9:
            problems.append(f"(S^{k})_11 = {corner:.12g}, expected {tau**k:.12g}")
    for n in range(2 * q + 1):
        closed = dilation_power(params, n)
        err = float(np.linalg.norm(s.power(n).data - closed))
        err /= 1.0 + float(np.linalg.norm(closed))
        worst = max(worst, err)
        if err > 1e-9:
            problems.append(f"S^{n} disagrees with its closed form ({err:.3g})")
    t, f = build_povm(params, 1)
    if is_spectral(f):
        problems.append("measure is spectral")
    if commutator_norm(s, np.diag([1.0, 0.0])) <= 1e-6:
        problems.append("P commutes with S")
    l1, l2 = params.lambda1 / tau, params.lambda2 / tau
    d_val = determinant(l1, l2, p, q)
    d_scale = 1.0 + abs((l1**p - 1) * (l2**q - 1)) + abs((l2**p - 1) * (l1**q - 1))
    if abs(d_val) > 1e-9 * d_scale:
        problems.append(f"determinant {d_val:.3g} does not vanish")
    dil = dilate_minimal(f)
    if not np.allclose(dil.S.eigenvalues(), s.eigenvalues(), atol=1e-9 * (1 + abs(tau))):
        problems.append("minimal dilation is not unitarily equivalent to S")
    if not approx_eq(moment_via_dilation(dil, q), t.power(q), 1e-9):
        problems.append("compressed q-moment differs")
    return problems, worst


_EXACT_FIXTURES: dict[tuple[int, int], dict[str, float]] = {
    (2, 3): {"alpha": 5 / 32, "beta": 27 / 32, "lambda1": 2.0, "lambda2": -2 / 3},
    (1, 3): {"alpha": 4 / 5, "beta": 1 / 5, "lambda1": 2.0, "lambda2": -3.0},
}


def run_counterexample_grid(cfg: SuiteConfig) -> SuiteResult:
    """Every pair outside Omega up to 8, at each scaling in ``TAUS``."""
    result = SuiteResult("counterexample-grid", "Counterexample grid")
    for p, q in _outside_pairs():
        for tau in TAUS:
            result.instances += 1
            try:
                problems, worst = _check_counterexample(p, q, tau)
            except OVMError as exc:
                result.fail(f"({p}, {q}, tau={tau:g}): {exc}")
                continue
            result.residual(worst)
            for message in problems:
                result.fail(f"({p}, {q}, tau={tau:g}): {message}")
    for (p, q), expected in _EXACT_FIXTURES.items():
        got = solve_params(p, q).to_dict()
        for name, value in expected.items():
            if abs(got[name] - value) > 1e-12:
                result.fail(f"({p}, {q}) fixture: {name}={got[name]!r}, expected {value!r}")
    return result


def run_holder(cfg: SuiteConfig) -> SuiteResult:
    """Grid search finds no scalar solution on Omega; Hoelder bound on random instances."""
    result = SuiteResult("holder", "Hoelder obstruction")
    for p, q in _omega_pairs():
        search = hoelder_grid_search(p, q)
        result.instances += search.candidates
        if search.min_residual <= 1e-6:
            result.fail(
                f"({p}, {q}): grid point {search.argmin} solves the system "
                f"to {search.min_residual:.3g}"
            )
    pairs = _omega_pairs()
    for i in range(cfg.trials):
        rng = _rng(cfg, 7, i)
        p, q = pairs[i % len(pairs)]
        alpha = float(rng.uniform(0.01, 0.99))
        l1, l2 = (float(x) for x in rng.uniform(-3.0, 3.0, 2))
        lhs, rhs = holder_check(alpha, l1, l2, p, q)
        result.instances += 1
        excess = (lhs - rhs) / (1.0 + rhs)
        result.residual(max(0.0, excess))
        if excess > 1e-12:
            result.fail(f"({p}, {q}) alpha={alpha:.6g}, l=({l1:.6g}, {l2:.6g}): {lhs} > {rhs}")
    return result


def run_fibonacci(cfg: SuiteConfig) -> SuiteResult:
    """Golden-ratio example and its tensor version."""
    result = SuiteResult("fibonacci", "Fibonacci / tensor examples")
    example = fibonacci_example()
    fib = fibonacci_numbers(21)
    for k in range(1, 21):
        result.instances += 1
        value = float(np.real(moment_via_dilation(example.dilation, k).entry(0, 0)))
        err = abs(value - fib[k - 1]) / max(1.0, fib[k - 1])
        result.residual(err)
        if err > 1e-9:
            result.fail(f"k={k}: (P S^k)_11 = {value:.12g}, expected f_{k - 1} = {fib[k - 1]}")
        matches = approx_eq(moment(example.F, k), example.T.power(k), 1e-9)
        if matches != (k in (2, 3)):
            result.fail(f"k={k}: moment match flag {matches}")
    if is_spectral(example.F):
        result.fail("golden-ratio measure reported spectral")
    var_err = abs(float(np.real(variance(example.F).entry(0, 0))) - 1.0)
    result.residual(var_err)
    if var_err > 1e-10:
        result.fail(f"Var(F) differs from 1 by {var_err:.3g}")

    for i in range(min(cfg.trials, 50)):
        rng = _rng(cfg, 8, i)
        t = random_hermitian(rng, int(rng.integers(1, 4)))
        result.instances += 1
        for n in range(1, 7):
            tn = t.power(n).data
            expected = np.block([[fib[n - 1] * tn, fib[n] * tn], [fib[n] * tn, fib[n + 1] * tn]])
            err = float(np.linalg.norm(tensor_example(t, n).data - expected)) / (
                1.0 + float(np.linalg.norm(expected))
            )
            result.residual(err)
            if err > 1e-9:
                result.fail(f"tensor trial {i}: S^{n} block formula off by {err:.3g}")
        _, f = tensor_example_povm(t)
        for k in (2, 3):
            if not approx_eq(moment(f, k), t.power(k), 1e-9):
                result.fail(f"tensor trial {i}: compressed moment {k} differs from T^{k}")
    return result


# ---------------------------------------------------------------------------
# Registry and rendering
# ---------------------------------------------------------------------------

# Ordered (key, runner) registry; ``all`` runs them in this order.
SUITE_RUNNERS: list[tuple[str, Callable[[SuiteConfig], SuiteResult]]] = [
    ("kadison", run_kadison),
    ("hansen", run_hansen),
    ("lieb-ruskai", run_lieb_ruskai),
    ("hankel", run_hankel),
    ("dilation", run_dilation),
    ("theorem", run_theorem),
    ("positive", run_positive),
    ("counterexample-grid", run_counterexample_grid),
    ("holder", run_holder),
    ("fibonacci", run_fibonacci),
]
SUITE_NAMES: list[str] = [key for key, _ in SUITE_RUNNERS]


def run_suites(name: str, cfg: SuiteConfig) -> list[SuiteResult]:
    """Run one suite by key, or all of them for ``"all"``."""
    runners = dict(SUITE_RUNNERS)
    selected = SUITE_NAMES if name == "all" else [name]
    results = []
    for key in selected:
        logger.info("running suite %s (trials=%d, seed=%d)", key, cfg.trials, cfg.seed)
        results.append(runners[key](cfg))
    return results


def render_results_table(console: Console, results: list[SuiteResult]) -> None:
    table = Table(title="Verification suites", show_lines=False)
    table.add_column("Suite", style="cyan", min_width=20)
    table.add_column("Instances", justify="right")
    table.add_column("Max residual", justify="right")
    table.add_column("Failures", justify="right")
    table.add_column("Status", justify="center")
    for r in results:
        status = "[green]pass[/green]" if r.passed else "[red]fail[/red]"
        table.add_row(
            r.label, f"{r.instances:,}", f"{r.max_residual:.2e}", str(len(r.failures)), status
        )
    console.print(table)
    console.print()


def render_report_card(console: Console, results: list[SuiteResult]) -> None:
    failed = [r for r in results if not r.passed]
    if failed:
        tag = f"[bold red]FAIL[/bold red] ({len(failed)}/{len(results)} suites)"
    else:
        tag = f"[bold green]PASS[/bold green] ({len(results)}/{len(results)} suites)"
    console.print(f"Result: {tag}")
    for r in failed:
        for message in r.failures[:MAX_DUMPS]:
            console.print(f"  [red]✗[/red] {r.key}: {message}")
        if len(r.failures) > MAX_DUMPS:
            console.print(f"  [dim]... {len(r.failures) - MAX_DUMPS} more in {r.key}[/dim]")
