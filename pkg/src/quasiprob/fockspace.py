"""Truncated Fock-space linear algebra.

States and operators live on span{|0>, ..., |N-1>}. Conventions: hbar = 1,
a = (q + i p)/sqrt(2), <q|p> = exp(i p q)/sqrt(2 pi).
"""

import json
import math
import warnings
from dataclasses import dataclass, field

import mpmath
import numpy as np
import scipy.linalg
from scipy.special import gammaln

from . import specialfn
from .errors import (
    InvalidDimensionError,
    InvalidInputError,
    InvalidSpecError,
    RangeError,
    TruncationError,
)
from .statespec import StateSpec

DEFAULT_DIM = 64
TAIL_TOL = 1e-10
POSITION_RANGE = 8.0
POSITION_TAIL_FRACTION = 0.25


def _frozen(array, dtype=complex):
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def _check_dim(dim, minimum):
    if int(dim) != dim or dim < minimum:
        raise InvalidDimensionError(f"dimension must be an integer >= {minimum}, got {dim}")
    return int(dim)


@dataclass(frozen=True)
class PhasePoint:
    """Phase-space point; ``beta = (q + i p)/sqrt(2)`` is derived, never stored."""

    q: float
    p: float

    @property
    def beta(self):
        return complex(self.q, self.p) / math.sqrt(2.0)

    @classmethod
    def from_beta(cls, beta):
        beta = complex(beta)
        return cls(math.sqrt(2.0) * beta.real, math.sqrt(2.0) * beta.imag)


@dataclass(frozen=True)
class TruncatedVector:
    amps: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amps)
        if amps.ndim != 1 or amps.size < 1:
            raise InvalidInputError("amplitudes must be a non-empty 1-D array")
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self):
        return self.amps.size

    def norm2(self):
        return float(np.vdot(self.amps, self.amps).real)


@dataclass(frozen=True)
class FockOperator:
    matrix: np.ndarray
    warnings: tuple = ()

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidInputError(f"operator matrix must be square, got shape {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            return FockOperator(self.matrix @ other.matrix)
        if isinstance(other, TruncatedVector):
            return TruncatedVector(self.matrix @ other.amps)
        return NotImplemented

    def dag(self):
        return FockOperator(self.matrix.conj().T)


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, unit-trace (up to truncation tail) matrix rho."""

    matrix: np.ndarray
    tail_tol: float = TAIL_TOL
    check_psd: bool = field(default=False, compare=False)

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise InvalidInputError(f"density matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidInputError("density matrix has non-finite entries")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise InvalidInputError("density matrix is not Hermitian within 1e-12")
        tr = np.trace(m)
        if abs(tr.imag) > 1e-12 or not (1 - self.tail_tol <= tr.real <= 1 + 1e-12):
            raise InvalidInputError(
                f"trace {tr.real:.15g} outside [1 - {self.tail_tol:g}, 1 + 1e-12]"
            )
        if self.check_psd and np.linalg.eigvalsh(m).min() < -1e-10:
            raise InvalidInputError("density matrix is not positive semidefinite")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def support(self, rel=1e-18):
        """Smallest n such that rows and columns >= n are negligible."""
        weight = np.max(np.abs(self.matrix), axis=1)
        big = np.nonzero(weight > rel * weight.max())[0]
        return int(big[-1]) + 1 if big.size else 1

    def padded(self, dim):
        """The same operator embedded in a larger truncation."""
        if dim < self.dim:
            raise InvalidDimensionError("cannot pad to a smaller dimension")
        out = np.zeros((dim, dim), dtype=complex)
        out[: self.dim, : self.dim] = self.matrix
        return DensityOperator(out, self.tail_tol)

    def to_json(self):
        return density_to_json(self)

    @classmethod
    def from_json(cls, text):
        return density_from_json(text)


def _num(x):
    return format(float(x), ".17g")


def density_to_json(rho):
    rows = []
    for row in rho.matrix:
        rows.append("[" + ",".join(f"[{_num(z.real)},{_num(z.imag)}]" for z in row) + "]")
    return '{"dim": %d, "matrix": [%s]}' % (rho.dim, ",".join(rows))


def density_from_json(text, tail_tol=TAIL_TOL):
    data = json.loads(text)
    dim = int(data["dim"])
    m = np.array(data["matrix"], dtype=float)
    if m.shape != (dim, dim, 2):
        raise InvalidInputError(f"matrix shape {m.shape} does not match dim {dim}")
    return DensityOperator(m[..., 0] + 1j * m[..., 1], tail_tol)


def ladder(dim):
    """Annihilation and creation operators (a, a_dagger)."""
    dim = _check_dim(dim, 2)
    lower = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)
    return FockOperator(lower), FockOperator(lower.T)


def parity(dim):
    dim = _check_dim(dim, 1)
    return FockOperator(np.diag((-1.0) ** np.arange(dim)))


def number(dim):
    dim = _check_dim(dim, 1)
    return FockOperator(np.diag(np.arange(dim, dtype=float)))


def displacement_elements(beta, rows, cols):
    """Matrix <m|D(beta)|n> for m < rows, n < cols, from the Laguerre closed form.

    <m|D|n> = sqrt(n!/m!) beta^(m-n) exp(-|beta|^2/2) L_n^(m-n)(|beta|^2), m >= n,
    and the (-beta*) counterpart for m < n. Exact entries, independent of
    any truncation.
    """
    beta = complex(beta)
    if not (math.isfinite(beta.real) and math.isfinite(beta.imag)):
        raise InvalidInputError("displacement amplitude must be finite")
    out = np.zeros((rows, cols), dtype=complex)
    r = abs(beta)
    if r == 0.0:
        k = min(rows, cols)
        out[np.arange(k), np.arange(k)] = 1.0
        return out
    x = r * r
    unit_lo = beta / r
    unit_up = -beta.conjugate() / r
    size = max(rows, cols)
    for k in range(size):
        n_lo = min(cols, rows - k)  # m = n + k below the diagonal
        n_up = min(rows, cols - k)  # n = m + k above it
        jmax = max(n_lo, n_up)
        if jmax <= 0:
            continue
        j = np.arange(jmax)
        lag = specialfn.laguerre_table(jmax - 1, k, x)
        logpref = 0.5 * (gammaln(j + 1) - gammaln(j + k + 1)) + k * math.log(r) - 0.5 * x
        mag = np.exp(logpref) * lag
        if n_lo > 0:
            out[j[:n_lo] + k, j[:n_lo]] = mag[:n_lo] * unit_lo**k
        if k > 0 and n_up > 0:
            out[j[:n_up], j[:n_up] + k] = mag[:n_up] * unit_up**k
    return out


def displacement(beta, dim):
    """Glauber displacement operator D(beta) = exp(beta a^dag - beta^* a)."""
    dim = _check_dim(dim, 2)
    notes = ()
    if math.exp(-0.5 * abs(complex(beta)) ** 2) == 0.0:
        notes = ("underflow: exp(-|beta|^2/2) underflows in binary64",)
        warnings.warn(notes[0], RuntimeWarning, stacklevel=2)
    return FockOperator(displacement_elements(beta, dim, dim), notes)


def displacement_trace(matrix, betas, support_rel=1e-15):
    """Tr[rho D(beta)] for an array of ``betas``.

    Written as sum_k r^k [u^k a_k(r^2) + (-u*)^k b_k(r^2)] with u = beta/|beta|;
    the radial sums a_k, b_k are evaluated once per distinct |beta|^2, which on
    symmetric lattices saves most of the Laguerre work. Rows and columns of
    ``matrix`` below ``support_rel`` of its largest entry are ignored.
    """
    rho = np.asarray(matrix, dtype=complex)
    betas = np.asarray(betas, dtype=complex)
    shape = betas.shape
    betas = betas.ravel()
    weight = np.max(np.abs(rho), axis=1) + np.max(np.abs(rho), axis=0)
    nz = np.nonzero(weight > support_rel * weight.max())[0]
    size = int(nz[-1]) + 1 if nz.size else 1
    x_all = np.abs(betas) ** 2
    x, inverse = np.unique(x_all, return_inverse=True)
    safe_r = np.where(x > 0, np.sqrt(x), 1.0)
    log_r = np.log(safe_r)
    zero = x == 0
    unit = np.where(x_all > 0, betas / np.where(x_all > 0, np.sqrt(x_all), 1.0), 1.0)
    total = np.zeros(betas.shape, dtype=complex)
    lo_phase = np.ones(betas.shape, dtype=complex)
    up_phase = np.ones(betas.shape, dtype=complex)
    for k in range(size):
        jmax = size - k
        j = np.arange(jmax)
        lag = specialfn.laguerre_table(jmax - 1, k, x)
        logpref = (0.5 * (gammaln(j + 1) - gammaln(j + k + 1)))[:, None] + k * log_r - 0.5 * x
        if k > 0:
            logpref = np.where(zero, -np.inf, logpref)
        mag = np.exp(logpref) * lag
        # rho_{n,n+k} pairs with <n+k|D|n>, rho_{n+k,n} with <n|D|n+k>
        a_k = rho[j, j + k] @ mag
        total += a_k[inverse] * lo_phase
        if k > 0:
            b_k = rho[j + k, j] @ mag
            total += b_k[inverse] * up_phase
        lo_phase = lo_phase * unit
        up_phase = up_phase * -unit.conj()
    return total.reshape(shape)


def expm(op):
    """Matrix exponential (scaling and squaring with Pade approximants)."""
    m = op.matrix if isinstance(op, FockOperator) else np.asarray(op, dtype=complex)
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix exponential of non-finite entries")
    return FockOperator(scipy.linalg.expm(m))


def apply_exp_lower(gen, vec):
    """exp(gen) @ vec for a strictly lower-triangular (nilpotent) ``gen``.

    The Taylor series terminates after dim terms and every output component
    depends only on components with equal or lower index, so the leading
    components are exact in any truncation.
    """
    g = np.asarray(gen, dtype=complex)
    if np.any(np.triu(g) != 0):
        raise InvalidInputError("generator must be strictly lower triangular")
    term = np.asarray(vec, dtype=complex).copy()
    out = term.copy()
    for k in range(1, g.shape[0] + 1):
        term = g @ term / k
        if not np.any(term):
            break
        out += term
    return out


def apply_exp_upper(gen, vec):
    """exp(gen) @ vec for a strictly upper-triangular ``gen`` (series terminates)."""
    g = np.asarray(gen, dtype=complex)
    if np.any(np.tril(g) != 0):
        raise InvalidInputError("generator must be strictly upper triangular")
    term = np.asarray(vec, dtype=complex).copy()
    out = term.copy()
    for k in range(1, g.shape[0] + 1):
        term = g @ term / k
        if not np.any(term):
            break
        out += term
    return out


def vacuum_exponential(c2, c1, length, dps=60):
    """Components <n|exp(c2 a^dag^2 + c1 a^dag)|0> for n < length.

    The exponential series is summed term by term in ``dps``-digit arithmetic:
    it terminates (every term raises the occupation) but cancels heavily in
    binary64 once c2 < 0.
    """
    with mpmath.workdps(dps):
        a2 = mpmath.mpc(c2)
        a1 = mpmath.mpc(c1)
        root = [mpmath.sqrt(m) for m in range(length)]
        term = [mpmath.mpc(0)] * length
        term[0] = mpmath.mpc(1)
        total = list(term)
        for k in range(1, length):
            nxt = [mpmath.mpc(0)] * length
            for m in range(k, length):
                v = a1 * root[m] * term[m - 1]
                if m >= 2:
                    v += a2 * root[m] * root[m - 1] * term[m - 2]
                nxt[m] = v / k
            term = nxt
            total = [x + y for x, y in zip(total, term)]
        return np.array([complex(z) for z in total])


def basis(n, dim):
    dim = _check_dim(dim, 1)
    if not 0 <= n < dim:
        raise InvalidInputError(f"basis index {n} outside 0..{dim - 1}")
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return TruncatedVector(v)


def coherent_amplitudes(alpha, length):
    """exp(-|alpha|^2/2) alpha^n / sqrt(n!) for n < length."""
    alpha = complex(alpha)
    c = np.empty(length, dtype=complex)
    c[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, length):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    return c


def coherent(alpha, dim):
    """Coherent state |alpha> truncated to ``dim`` components (not renormalised)."""
    dim = _check_dim(dim, 1)
    return TruncatedVector(coherent_amplitudes(alpha, dim))


def position_eigenstate(X, dim, route="hermite", x_range=POSITION_RANGE,
                        tail_fraction=POSITION_TAIL_FRACTION):
    """Components <n|X> of the (unnormalisable) position eigenstate.

    ``hermite``: psi_n(X) directly.  ``displaced-vacuum``: the vacuum acted on
    by exp(-a^dag^2/2 + sqrt(2) X a^dag), times exp(-X^2/2)/pi^(1/4).
    """
    dim = _check_dim(dim, 2)
    if not abs(X) <= x_range:
        raise RangeError(f"|X| = {abs(X)} outside the configured range {x_range}")
    if route == "hermite":
        amps = specialfn.hermite_functions(dim - 1, np.asarray(float(X))).astype(complex)
    elif route == "displaced-vacuum":
        gen = vacuum_exponential(-0.5, math.sqrt(2.0) * X, dim)
        amps = math.exp(-0.5 * X * X) * math.pi**-0.25 * gen
    else:
        raise InvalidInputError(f"unknown position-eigenstate route {route!r}")
    mass = np.abs(amps) ** 2
    last = mass[dim - max(1, dim // 10):].sum()
    if last > tail_fraction * mass.sum():
        need = int(math.ceil(X * X / 2 * 1.5)) + 10
        raise TruncationError(
            f"position eigenstate at X={X} is truncated at dim={dim}: "
            f"{last / mass.sum():.2f} of the weight sits in the last 10% of components",
            minimal_dim=max(need, dim + 1),
        )
    return TruncatedVector(amps)


def momentum_eigenstate(P, dim):
    """Components <n|p> = i^n psi_n(p), matching <q|p> = exp(i p q)/sqrt(2 pi)."""
    dim = _check_dim(dim, 1)
    psi = specialfn.hermite_functions(dim - 1, np.asarray(float(P)))
    return TruncatedVector((1j) ** np.arange(dim) * psi)


# -- state factory -----------------------------------------------------------

def _pure_amplitudes(spec, length):
    kind, params = spec.kind, spec.params
    if kind == "coherent":
        return coherent_amplitudes(params[0], length)
    if kind == "squeezed":
        r, phi = params
        c = np.zeros(length, dtype=complex)
        c[0] = 1.0 / math.sqrt(math.cosh(r))
        ratio = -np.exp(1j * phi) * math.tanh(r)
        for n in range(0, (length - 1) // 2):
            c[2 * n + 2] = c[2 * n] * ratio * math.sqrt((2 * n + 1) * (2 * n + 2)) / (2 * (n + 1))
        return c
    if kind == "cat":
        alpha, phase = params
        base = coherent_amplitudes(alpha, length)
        rel = np.exp(1j * phase)
        norm2 = 2.0 * (1.0 + (rel * math.exp(-2.0 * abs(alpha) ** 2)).real)
        if norm2 <= 1e-14:
            raise InvalidSpecError("cat state with vanishing norm")
        signs = (-1.0) ** np.arange(length)
        return base * (1.0 + rel * signs) / math.sqrt(norm2)
    raise AssertionError(kind)


def _weights(spec, length):
    """Diagonal-basis probabilities (mixed) or |amplitude|^2 (pure) up to ``length``."""
    if spec.kind == "thermal":
        nbar = spec.params[0]
        q = nbar / (1.0 + nbar)
        return (1.0 / (1.0 + nbar)) * q ** np.arange(length)
    return np.abs(_pure_amplitudes(spec, length)) ** 2


def _minimal_dim(spec, eps):
    length = 256
    while length <= 1 << 16:
        w = _weights(spec, length)
        tails = np.cumsum(w[::-1])[::-1]  # tails[d] = sum_{n >= d} w_n
        if w[-32:].sum() < eps * 1e-3:
            ok = np.nonzero(tails <= eps)[0]
            return int(ok[0]) if ok.size else length
        length *= 4
    return length


def tail_mass(spec, dim):
    """Probability weight outside |0>..|dim-1> for the exact (infinite) state."""
    if spec.kind in ("fock", "vacuum"):
        return 0.0
    if spec.kind == "thermal":
        nbar = spec.params[0]
        return (nbar / (1.0 + nbar)) ** dim
    length = max(2 * dim + 256, 512)
    while True:
        w = _weights(spec, length)
        if w[-32:].sum() < 1e-30 or length > 1 << 16:
            return float(w[dim:].sum())
        length *= 4


def make_state(spec, dim=DEFAULT_DIM, tail_tol=TAIL_TOL):
    """Density operator of a test state, truncated to ``dim``.

    The truncated matrix is not renormalised; its trace falls short of one by
    the tail mass, which must stay below ``tail_tol``.
    """
    dim = _check_dim(dim, 1)
    if not isinstance(spec, StateSpec):
        raise InvalidSpecError(f"expected a StateSpec, got {type(spec).__name__}")
    kind = spec.kind
    if kind in ("fock", "vacuum"):
        n = spec.params[0] if kind == "fock" else 0
        if n >= dim:
            raise InvalidSpecError(f"fock({n}) does not fit in dimension {dim}")
        m = np.zeros((dim, dim), dtype=complex)
        m[n, n] = 1.0
        return DensityOperator(m, tail_tol, check_psd=True)
    if kind == "thermal" and spec.params[0] < 0:
        raise InvalidSpecError("thermal state needs n̄ >= 0")
    tail = tail_mass(spec, dim)
    if tail > tail_tol:
        need = _minimal_dim(spec, tail_tol)
        raise TruncationError(
            f"{spec} leaves tail mass {tail:.3e} > {tail_tol:g} at dim={dim}; "
            f"minimal adequate dim is {need}",
            minimal_dim=need,
        )
    if kind == "thermal":
        m = np.diag(_weights(spec, dim)).astype(complex)
    else:
        c = _pure_amplitudes(spec, dim)
        m = np.outer(c, c.conj())
    return DensityOperator(m, tail_tol, check_psd=True)


def pure_amplitudes(spec, dim):
    """Amplitude vector of a pure test state (raises for mixed kinds)."""
    if spec.kind == "thermal":
        raise InvalidSpecError("thermal states are mixed")
    if spec.kind in ("fock", "vacuum"):
        return basis(spec.params[0] if spec.kind == "fock" else 0, dim)
    return TruncatedVector(_pure_amplitudes(spec, dim))
