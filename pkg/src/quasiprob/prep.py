"""Analytic Glauber-Sudarshan P representations and the K-from-P integral.

P is only ever evaluated forward from an analytic variant:

* ``delta``     P = delta^2(alpha - alpha0), a coherent state;
* ``gaussian``  P = exp(-|alpha - mean|^2 / nbar) / (pi nbar), a displaced thermal state;
* ``delta-sum`` a weighted sum of deltas, a coherent-state mixture.

The Kirkwood-Rihaczek function follows from

    K(X, Y) = c_P exp(i X Y - (X^2 + Y^2)/2) / sqrt2
              * int d^2 alpha P(alpha) exp((alpha^2 - alpha*^2)/2 - |alpha|^2)
                                   exp(sqrt2 (X alpha* - i Y alpha)),

with c_P fitted once on delta(0) against ``kr_direct`` of the vacuum.
"""

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc

from . import distributions, fockspace, oracle
from .errors import DomainError, InvalidInputError, TruncationError
from .fockspace import DensityOperator, TAIL_TOL
from .grid import DistributionGrid

SQRT2 = math.sqrt(2.0)
QUAD_TOL = 1e-10
GAUSS_REACH = 8.0


@dataclass(frozen=True)
class PRepresentation:
    """One of the analytic P variants; see the module docstring."""

    variant: str
    alpha0: complex = 0j
    mean: complex = 0j
    nbar: float = 0.0
    atoms: tuple = ()

    def __post_init__(self):
        if self.variant == "delta":
            object.__setattr__(self, "alpha0", complex(self.alpha0))
        elif self.variant == "gaussian":
            if not (math.isfinite(self.nbar) and self.nbar > 0):
                raise InvalidInputError(f"gaussian P needs nbar > 0, got {self.nbar}")
            object.__setattr__(self, "mean", complex(self.mean))
            object.__setattr__(self, "nbar", float(self.nbar))
        elif self.variant == "delta-sum":
            atoms = tuple((complex(w), complex(a)) for w, a in self.atoms)
            if not atoms:
                raise InvalidInputError("delta-sum needs at least one atom")
            total = sum(w for w, _ in atoms)
            if abs(total - 1) > 1e-12:
                raise InvalidInputError(f"delta-sum weights sum to {total}, not 1")
            object.__setattr__(self, "atoms", atoms)
        else:
            raise InvalidInputError(f"unknown P variant {self.variant!r}")

    @classmethod
    def delta(cls, alpha0):
        return cls("delta", alpha0=alpha0)

    @classmethod
    def gaussian(cls, mean, nbar):
        return cls("gaussian", mean=mean, nbar=nbar)

    @classmethod
    def delta_sum(cls, atoms):
        return cls("delta-sum", atoms=tuple(atoms))

    def deltas(self):
        """(weight, alpha) atoms for the delta variants."""
        if self.variant == "delta":
            return ((1 + 0j, self.alpha0),)
        return self.atoms

    def __str__(self):
        if self.variant == "delta":
            return f"delta({self.alpha0})"
        if self.variant == "gaussian":
            return f"gaussian({self.mean},{self.nbar})"
        return "delta-sum(" + ";".join(f"{w}@{a}" for w, a in self.atoms) + ")"

    def to_json(self):
        pair = lambda z: [z.real, z.imag]
        if self.variant == "delta":
            data = {"variant": "delta", "alpha0": pair(self.alpha0)}
        elif self.variant == "gaussian":
            data = {"variant": "gaussian", "mean": pair(self.mean), "nbar": self.nbar}
        else:
            data = {
                "variant": "delta-sum",
                "atoms": [{"weight": pair(w), "alpha": pair(a)} for w, a in self.atoms],
            }
        return json.dumps(data, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        z = lambda v: complex(v[0], v[1])
        variant = data.get("variant")
        if variant == "delta":
            return cls.delta(z(data["alpha0"]))
        if variant == "gaussian":
            return cls.gaussian(z(data["mean"]), float(data["nbar"]))
        if variant == "delta-sum":
            return cls.delta_sum((z(a["weight"]), z(a["alpha"])) for a in data["atoms"])
        raise InvalidInputError(f"unknown P variant {variant!r}")


# -- density reconstruction -------------------------------------------------------

def _coherent_tail(alpha, dim):
    # Poisson(|alpha|^2) mass at n >= dim
    return float(gammainc(dim, abs(alpha) ** 2)) if alpha != 0 else 0.0


def _thermal_weights(nbar, tol=1e-17):
    ratio = nbar / (1 + nbar)
    count = max(1, int(math.ceil(math.log(tol) / math.log(ratio))) + 1)
    return ratio ** np.arange(count) / (1 + nbar)


def _displaced_thermal_diag(mean, nbar, rows):
    p = _thermal_weights(nbar)
    d = fockspace.displacement_elements(mean, rows, p.size)
    return (np.abs(d) ** 2) @ p


def _minimal(tails, tol):
    ok = np.nonzero(np.asarray(tails) <= tol)[0]
    return int(ok[0]) if ok.size else len(tails)


def density_from_p(P, dim, tail_tol=TAIL_TOL):
    """rho = int d^2 alpha P(alpha) |alpha><alpha| in the truncation |0>..|dim-1>."""
    if not isinstance(P, PRepresentation):
        raise InvalidInputError(f"expected a PRepresentation, got {type(P).__name__}")
    if int(dim) != dim or dim < 1:
        raise InvalidInputError(f"dimension must be a positive integer, got {dim}")
    if P.variant == "gaussian":
        p = _thermal_weights(P.nbar)
        d = fockspace.displacement_elements(P.mean, dim, p.size)
        matrix = (d * p) @ d.conj().T
        tail = 1.0 - float(np.trace(matrix).real)
        if tail > tail_tol:
            rows = 4 * dim + 64
            diag = _displaced_thermal_diag(P.mean, P.nbar, rows)
            need = _minimal(1.0 - np.concatenate([[0.0], np.cumsum(diag)]), tail_tol)
            raise TruncationError(
                f"{P} leaves tail mass {tail:.3e} at dim={dim}; minimal adequate dim is {need}",
                minimal_dim=need,
            )
        return DensityOperator(matrix, tail_tol, check_psd=True)
    matrix = np.zeros((dim, dim), dtype=complex)
    tail = 0.0
    for w, a in P.deltas():
        c = fockspace.coherent_amplitudes(a, dim)
        matrix += w * np.outer(c, c.conj())
        tail += abs(w) * _coherent_tail(a, dim)
    if tail > tail_tol:
        reach = int(max(abs(a) for _, a in P.deltas()) ** 2 * 4 + 64)
        tails = [sum(abs(w) * _coherent_tail(a, d) for w, a in P.deltas()) for d in range(reach)]
        raise TruncationError(
            f"{P} leaves tail mass {tail:.3e} at dim={dim}; minimal adequate dim is "
            f"{_minimal(tails, tail_tol)}",
            minimal_dim=_minimal(tails, tail_tol),
        )
    return DensityOperator(matrix, tail_tol)


# -- K from P -------------------------------------------------------------------------

def _gaussian_box(P, X, Y):
    """Square covering mean +- 8 sqrt(nbar) and the combined Gaussian peak of every point."""
    inv = 1.0 / P.nbar
    width = 1.0 / math.sqrt(inv + 1.0)
    lo_x, hi_x = P.mean.real - GAUSS_REACH * math.sqrt(P.nbar), P.mean.real + GAUSS_REACH * math.sqrt(P.nbar)
    lo_y, hi_y = P.mean.imag - GAUSS_REACH * math.sqrt(P.nbar), P.mean.imag + GAUSS_REACH * math.sqrt(P.nbar)
    for x in (X.min(), X.max()):
        for y in (Y.min(), Y.max()):
            cx = (P.mean.real * inv + x / SQRT2) / (inv + 1.0)
            cy = (P.mean.imag * inv + y / SQRT2) / (inv + 1.0)
            lo_x, hi_x = min(lo_x, cx - GAUSS_REACH * width), max(hi_x, cx + GAUSS_REACH * width)
            lo_y, hi_y = min(lo_y, cy - GAUSS_REACH * width), max(hi_y, cy + GAUSS_REACH * width)
    return lo_x, hi_x, lo_y, hi_y


def _gaussian_integral(P, X, Y, tol=QUAD_TOL, domain=None):
    need = _gaussian_box(P, X, Y)
    if domain is None:
        domain = need
    elif (domain[0] > need[0] or domain[1] < need[1] or domain[2] > need[2]
          or domain[3] < need[3]):
        raise DomainError(
            f"quadrature box {tuple(domain)} does not cover the required {tuple(need)}",
            required_extent=max(abs(v) for v in need),
        )
    x0, x1, y0, y1 = domain
    start = max(2, int(math.ceil(max(x1 - x0, y1 - y0) / 1.5)))

    def estimate(panels):
        xs, wx = oracle.panel_rule(x0, x1, panels)
        ys, wy = oracle.panel_rule(y0, y1, panels)
        a = (xs[:, None] + 1j * ys[None, :]).ravel()
        w = (wx[:, None] * wy[None, :]).ravel()
        p = w * np.exp(-np.abs(a - P.mean) ** 2 / P.nbar) / (math.pi * P.nbar)
        # exp(sqrt2 X a*) and exp(-i sqrt2 Y a) split, so the lattice is one product
        base = np.exp(0.5 * (a**2 - a.conj() ** 2) - np.abs(a) ** 2)
        u = np.exp(SQRT2 * np.outer(X, a.conj()))
        v = np.exp(-1j * SQRT2 * np.outer(Y, a))
        return (u * (p * base)) @ v.T, a.size

    return oracle.converge(estimate, tol, start_panels=start, max_doublings=4).value


def kr_from_p_grid(P, q, p, calibration=None, raw=False, printed_prefactor=False, domain=None):
    """K from P on the lattice q x p.

    ``printed_prefactor`` drops the factor exp(-(X^2 + Y^2)/2) from the
    prefactor; the ratio of the two forms is then a real Gaussian, not a
    pure phase.
    """
    if not isinstance(P, PRepresentation):
        raise InvalidInputError(f"expected a PRepresentation, got {type(P).__name__}")
    X = np.atleast_1d(np.asarray(q, dtype=float))
    Y = np.atleast_1d(np.asarray(p, dtype=float))
    if P.variant == "gaussian":
        integral = _gaussian_integral(P, X, Y, domain=domain)
    else:
        integral = np.zeros((X.size, Y.size), dtype=complex)
        for w, a in P.deltas():
            base = np.exp(0.5 * (a**2 - np.conj(a) ** 2) - abs(a) ** 2)
            kx = np.exp(SQRT2 * X * np.conj(a))
            ky = np.exp(-1j * SQRT2 * Y * a)
            integral += w * base * np.outer(kx, ky)
    expo = 1j * np.outer(X, Y)
    if not printed_prefactor:
        expo = expo - 0.5 * (X[:, None] ** 2 + Y[None, :] ** 2)
    values = np.exp(expo) / SQRT2 * integral
    if raw:
        return values
    return distributions._constant("kr_from_p", calibration) * values


def kr_from_p(P, point, calibration=None, raw=False):
    return complex(kr_from_p_grid(P, point.q, point.p, calibration, raw)[0, 0])


def kr_from_p_distribution(P, q_axis, p_axis, calibration=None):
    c = distributions._constant("kr_from_p", calibration)
    values = kr_from_p_grid(P, q_axis.points, p_axis.points, calibration)
    return DistributionGrid(
        q_axis, p_axis, values,
        {"state": str(P), "route": "kr_from_p", "dim": None, "calibration": [c.real, c.imag]},
    )


def _build(reference, dim):
    if isinstance(reference, str):
        reference = PRepresentation.from_json(reference)
    return reference


distributions.register_calibrated_route(
    "kr_from_p",
    lambda P, q, p: kr_from_p_grid(P, q, p, raw=True),
    lambda P, q, p: distributions.kr_direct_grid(density_from_p(P, fockspace.DEFAULT_DIM), q, p),
    _build,
)


def p_from_state(spec):
    """Analytic P of a test state, or None when P is not a regular function or delta."""
    if spec.kind == "vacuum":
        return PRepresentation.delta(0)
    if spec.kind == "coherent":
        return PRepresentation.delta(spec.params[0])
    if spec.kind == "thermal" and spec.params[0] > 0:
        return PRepresentation.gaussian(0, spec.params[0])
    if spec.kind == "thermal":
        return PRepresentation.delta(0)
    return None
