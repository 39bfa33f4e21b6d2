"""Objective functions: counted evaluation, benchmark suite, external processes.

Every optimizer in this package talks to an :class:`Objective`, which owns
the evaluation counter so that all methods are compared on identical budgets.
"""

from __future__ import annotations

import math
import shlex
import subprocess
from typing import Callable, Optional, Sequence, Union

import numpy as np

Array = np.ndarray


class EvaluationError(RuntimeError):
    """An objective evaluation failed (bad input, broken child process, ...)."""


def _as_point(x, d: int) -> Array:
    x = np.asarray(x, dtype=float)
    if x.shape != (d,):
        raise EvaluationError(f"expected a vector of length {d}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise EvaluationError("input vector contains non-finite components")
    return x


class Objective:
    """A scalar function of a d-vector with a per-call evaluation counter.

    Values must be finite, with one exception: +inf is accepted as a
    zero-weight sentinel so that constrained domains can be expressed via an
    infinite penalty.  NaN and -inf are always rejected.

    Parameters
    ----------
    dimension:
        Length of the input vectors.
    batch_evaluator:
        Maps an (m, d) array to an (m,) array of values.
    known_minimizer:
        Location of the global minimum when known; enables error reporting.
    """

    def __init__(
        self,
        dimension: int,
        batch_evaluator: Callable[[Array], Array],
        known_minimizer: Optional[Array] = None,
        name: str = "objective",
    ):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.dimension = int(dimension)
        self._batch = batch_evaluator
        self.known_minimizer = (
            None if known_minimizer is None
            else np.asarray(known_minimizer, dtype=float)
        )
        self.name = name
        self.eval_count = 0

    def __call__(self, x) -> float:
        return float(self.evaluate_batch(np.asarray(x, dtype=float)[None, :])[0])

    def evaluate_batch(self, points: Array) -> Array:
        """Evaluate m points at once; the counter advances by m."""
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != self.dimension:
            raise EvaluationError(
                f"expected an (m, {self.dimension}) array, got shape {points.shape}"
            )
        if not np.all(np.isfinite(points)):
            raise EvaluationError("input points contain non-finite components")
        values = np.asarray(self._batch(points), dtype=float)
        if values.shape != (points.shape[0],):
            raise EvaluationError("evaluator returned a wrongly shaped result")
        # NaN and -inf can never be absorbed by the log-weight core; +inf maps
        # to a zero weight downstream and is allowed through.
        if np.any(np.isnan(values)) or np.any(values == -np.inf):
            raise EvaluationError("evaluator returned NaN or -inf")
        self.eval_count += points.shape[0]
        return values


# ----------------------------------------------------------------------
# Benchmark suite
# ----------------------------------------------------------------------

def sphere(x) -> float:
    """Sum of squares; global minimum 0 at the origin."""
    x = _as_point(x, len(np.atleast_1d(x)))
    return float(np.sum(x * x))


def rastrigin(x) -> float:
    """Multimodal benchmark, 10 d + sum(4 x_i^2 - 10 cos(pi x_i)).

    Note the coefficients 4 and 10 and the cos(pi x) argument: this is a
    deliberately rescaled variant of the textbook function (which uses
    x^2 - 10 cos(2 pi x)).  The experiments in this package depend on this
    curvature, so do not "fix" it to the textbook form.
    """
    x = _as_point(x, len(np.atleast_1d(x)))
    d = x.size
    return float(10.0 * d + np.sum(4.0 * x * x - 10.0 * np.cos(np.pi * x)))


def ackley(x) -> float:
    """Ackley benchmark with a narrow valley around the origin."""
    x = _as_point(x, len(np.atleast_1d(x)))
    d = x.size
    rms = math.sqrt(float(np.sum(x * x)) / d)
    cos_mean = float(np.sum(np.cos(2.0 * np.pi * x))) / d
    return float(-20.0 * math.exp(-0.2 * rms) - math.exp(cos_mean) + 20.0 + math.e)


def _sphere_batch(points: Array) -> Array:
    return np.sum(points * points, axis=1)


def _rastrigin_batch(points: Array) -> Array:
    d = points.shape[1]
    return 10.0 * d + np.sum(4.0 * points**2 - 10.0 * np.cos(np.pi * points), axis=1)


def _ackley_batch(points: Array) -> Array:
    d = points.shape[1]
    rms = np.sqrt(np.sum(points * points, axis=1) / d)
    cos_mean = np.sum(np.cos(2.0 * np.pi * points), axis=1) / d
    return -20.0 * np.exp(-0.2 * rms) - np.exp(cos_mean) + 20.0 + math.e


_BENCHMARKS = {
    "sphere": _sphere_batch,
    "rastrigin": _rastrigin_batch,
    "ackley": _ackley_batch,
}


def benchmark(name: str, dimension: int) -> Objective:
    """Construct a counted benchmark objective by name.

    All benchmarks have their unique global minimum (value 0) at the origin.
    """
    try:
        fn = _BENCHMARKS[name]
    except KeyError:
        raise ValueError(
            f"unknown benchmark {name!r}; choose from {sorted(_BENCHMARKS)}"
        ) from None
    return Objective(
        dimension,
        fn,
        known_minimizer=np.zeros(dimension),
        name=name,
    )


def benchmark_names() -> Sequence[str]:
    return tuple(sorted(_BENCHMARKS))


# ----------------------------------------------------------------------
# External-process objectives
# ----------------------------------------------------------------------

def format_float(v: float) -> str:
    """Round-trip-exact decimal formatting (shortest repr)."""
    return repr(float(v))


class ExternalObjective(Objective):
    """Objective evaluated by a child process speaking a line protocol.

    Request: the d coordinates as round-trip-exact decimals separated by
    single spaces, one line per evaluation, on the child's stdin.
    Response: one decimal number on one line from the child's stdout.
    One request is always followed by exactly one response.

    The child is single-threaded: concurrent use requires one child per
    worker.  Call :meth:`close` (or use as a context manager) to terminate
    the child.
    """

    def __init__(self, command: Union[str, Sequence[str]], dimension: int):
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        try:
            self._proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise EvaluationError(f"failed to spawn {argv!r}: {exc}") from exc
        super().__init__(dimension, self._batch_roundtrip, name="external")

    def _eval_one(self, x: Array) -> float:
        line = " ".join(format_float(v) for v in x)
        proc = self._proc
        if proc.poll() is not None:
            raise EvaluationError("child process has exited")
        try:
            proc.stdin.write(line + "\n")
            proc.stdin.flush()
            response = proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise EvaluationError(f"child pipe failure: {exc}") from exc
        if response == "":
            raise EvaluationError("child closed its output stream")
        try:
            value = float(response.strip())
        except ValueError:
            raise EvaluationError(
                f"malformed response line: {response!r}"
            ) from None
        if math.isnan(value) or value == -math.inf:
            raise EvaluationError(f"child returned a non-finite value: {response!r}")
        return value

    def _batch_roundtrip(self, points: Array) -> Array:
        return np.array([self._eval_one(p) for p in points])

    def close(self) -> None:
        proc = self._proc
        if proc.poll() is None:
            proc.stdin.close()
            try:
                proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait()

    def __enter__(self) -> "ExternalObjective":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def external_objective(command: Union[str, Sequence[str]], dimension: int) -> ExternalObjective:
    """Spawn a child process and wrap it as a counted objective."""
    return ExternalObjective(command, dimension)
