"""Reference quadrature and series engines.

Composite Gauss-Legendre rules whose panel count doubles until two
successive estimates agree. Nothing here imports the fast evaluation paths,
so the results can be used to check them.

Integrands are vectorised: they receive an array of nodes and return an
array whose leading axis runs over the nodes. Trailing axes are allowed, in
which case the result is an array and convergence is judged on its max-norm.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DivergenceError, InvalidInputError, QuadratureError

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureResult:
    value: complex | np.ndarray
    error: float
    evaluations: int


@lru_cache(maxsize=None)
def _legendre(order):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_rule(a, b, panels, order=16):
    """Nodes and weights of a composite Gauss-Legendre rule on [a, b]."""
    x, w = _legendre(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    if a == -b:
        # exact mirror symmetry lets callers exploit even/odd integrands
        nodes = 0.5 * (nodes - nodes[::-1])
        weights = 0.5 * (weights + weights[::-1])
    return nodes, weights


def converge(estimate, tol, start_panels=2, max_doublings=20):
    """Drive ``estimate(panels)`` through panel doublings until it settles.

    ``estimate`` returns ``(value, evaluations)``. The returned error is the
    max-norm difference of the last two estimates plus a rounding floor.
    """
    if not tol > 0:
        raise InvalidInputError(f"tolerance must be positive, got {tol}")
    panels = start_panels
    previous, evaluations = estimate(panels)
    history = []
    for _ in range(max_doublings):
        panels *= 2
        current, n = estimate(panels)
        evaluations += n
        diff = float(np.max(np.abs(np.asarray(current) - np.asarray(previous))))
        history.append(diff)
        if not np.isfinite(diff):
            raise QuadratureError("non-finite quadrature estimate")
        if diff < tol:
            scale = float(np.max(np.abs(current))) if np.size(current) else 0.0
            return QuadratureResult(current, diff + 64 * EPS * scale, evaluations)
        previous = current
    raise QuadratureError(
        f"no convergence after {max_doublings} doublings "
        f"(last differences {history[-3:]}, tol {tol})"
    )


def integrate_1d(f, a, b, tol=1e-10, order=16, start_panels=2, max_doublings=20):
    """Integrate ``f`` over [a, b] by panel-doubling Gauss-Legendre."""
    if not (np.isfinite(a) and np.isfinite(b)):
        raise InvalidInputError("integration limits must be finite")
    if tol < 1e-13:
        raise InvalidInputError("tolerance below 1e-13 is not supported")

    def estimate(panels):
        nodes, weights = panel_rule(a, b, panels, order)
        values = np.asarray(f(nodes))
        if values.shape[:1] != nodes.shape:
            raise InvalidInputError("integrand must return one value per node")
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("integrand is not finite on the interval")
        return np.tensordot(weights, values, axes=(0, 0)), nodes.size

    result = converge(estimate, tol, start_panels, max_doublings)
    value = result.value
    if np.ndim(value) == 0:
        value = complex(value)
    return QuadratureResult(value, result.error, result.evaluations)


def integrate_2d(f, domain, tol=1e-10, order=16, start_panels=2, max_doublings=12):
    """Tensor-product version of :func:`integrate_1d`.

    ``domain`` is ``(xmin, xmax, ymin, ymax)``; ``f(x, y)`` receives two
    broadcastable arrays (x along axis 0, y along axis 1).
    """
    xmin, xmax, ymin, ymax = domain
    if tol < 1e-13:
        raise InvalidInputError("tolerance below 1e-13 is not supported")

    def estimate(panels):
        x, wx = panel_rule(xmin, xmax, panels, order)
        y, wy = panel_rule(ymin, ymax, panels, order)
        values = np.asarray(f(x[:, None], y[None, :]))
        values = np.broadcast_to(values, (x.size, y.size) + values.shape[2:])
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("integrand is not finite on the domain")
        inner = np.tensordot(wy, values, axes=(0, 1))
        return np.tensordot(wx, inner, axes=(0, 0)), x.size * y.size

    result = converge(estimate, tol, start_panels, max_doublings)
    value = result.value
    if np.ndim(value) == 0:
        value = complex(value)
    return QuadratureResult(value, result.error, result.evaluations)


def series_sum(term, tol=1e-15, max_terms=10_000):
    """Sum ``term(0) + term(1) + ...`` until five consecutive terms are below tol."""
    total = 0j
    small = 0
    for k in range(max_terms):
        t = complex(term(k))
        total += t
        small = small + 1 if abs(t) < tol else 0
        if small == 5:
            return total
    raise DivergenceError(
        f"series tail condition not met after {max_terms} terms (last term {t!r})"
    )
