"""Quasiprobability distributions evaluated through several independent routes.

Conventions: hbar = 1, a = (q + i p)/sqrt(2), beta = (q + i p)/sqrt(2),
<q|p> = exp(i p q)/sqrt(2 pi) and <n|p> = i^n psi_n(p). Densities are
normalised against dq dp; note dq dp = 2 d^2(beta) with d^2(beta) = dRe dIm.

Routes
------
Wigner
    ``wigner_integral``    position-space integral (reference values)
    ``wigner_parity``      Tr[(-1)^N rho D(2 beta)] / pi
    ``wigner_from_charfn`` double Fourier transform of Tr[rho D(xi)]
Kirkwood-Rihaczek
    ``kr_direct``          <p|rho|q><q|p> (reference values)
    ``kr_from_charfn``     transform of the characteristic function times exp((xi^2 - xi*^2)/4)
    ``kr_vacuum_form``     coherent-state sandwich exp(a^2/2) rho exp(-a^dag^2/2)
    ``kr_from_p``          see :mod:`quasiprob.prep`
Routes whose overall constant is not fixed analytically carry a fitted
:class:`Calibration`; state independence of that constant is tested.
"""

import math
import threading
from dataclasses import dataclass

import numpy as np

from . import fockspace, oracle, specialfn
from .errors import (
    CalibrationError,
    DomainError,
    InvalidInputError,
    PositivityError,
    QuadratureError,
    RangeError,
    TruncationError,
    UncalibratedRouteError,
)
from .fockspace import DensityOperator, PhasePoint
from .grid import Axis, DistributionGrid

SQRT2 = math.sqrt(2.0)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
WIGNER_PARITY_CONSTANT = 1.0 / math.pi
POSITION_ENVELOPE = 10.0
QUAD_TOL = 1e-9
CALIBRATION_RESIDUAL = 1e-8


def _axes(q, p):
    return np.atleast_1d(np.asarray(q, dtype=float)), np.atleast_1d(np.asarray(p, dtype=float))


def _require_density(rho):
    if not isinstance(rho, DensityOperator):
        raise InvalidInputError(f"expected a DensityOperator, got {type(rho).__name__}")


# -- position-space helpers ----------------------------------------------------

def _support(rho):
    return rho.support(1e-16)


def position_elements(rho, x1, x2):
    """<x1|rho|x2> for equally shaped arrays of positions."""
    s = _support(rho)
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    a = specialfn.hermite_functions(s - 1, x1.ravel())
    b = specialfn.hermite_functions(s - 1, x2.ravel())
    m = rho.matrix[:s, :s]
    return np.einsum("in,ij,jn->n", a, m, b).reshape(np.broadcast(x1, x2).shape)


def position_density(rho, x):
    return position_elements(rho, x, x).real


def momentum_density(rho, p):
    """<p|rho|p> with <n|p> = i^n psi_n(p)."""
    s = _support(rho)
    p = np.asarray(p, dtype=float)
    phi = (1j) ** np.arange(s)[:, None] * specialfn.hermite_functions(s - 1, p.ravel())
    m = rho.matrix[:s, :s]
    return np.einsum("in,ij,jn->n", phi.conj(), m, phi).real.reshape(p.shape)


def spatial_extent(rho, threshold=1e-15):
    """Half-width outside which every wavefunction component of rho is below threshold."""
    s = _support(rho)
    weight = np.max(np.abs(rho.matrix[:s, :s]), axis=1)
    reach = math.sqrt(2 * s + 1) + 12.0
    x = np.linspace(0.0, reach, 2048)
    psi = specialfn.hermite_functions(s - 1, np.concatenate([x, -x]))
    env = np.sqrt(weight @ psi**2)
    env = np.maximum(env[: x.size], env[x.size:])
    above = np.nonzero(env > threshold)[0]
    return float(x[above[-1]] + 0.25) if above.size else 1.0


# -- characteristic function -----------------------------------------------------

def char_fn(rho, beta):
    """Characteristic (ambiguity) function Tr[rho D(beta)]."""
    _require_density(rho)
    return complex(fockspace.displacement_trace(rho.matrix, np.array([complex(beta)]))[0])


def char_fn_grid(rho, q, p):
    """Tr[rho D(beta)] at beta = (q + i p)/sqrt(2) on the lattice q x p."""
    _require_density(rho)
    q, p = _axes(q, p)
    betas = (q[:, None] + 1j * p[None, :]) / SQRT2
    return fockspace.displacement_trace(rho.matrix, betas)


def char_extent(rho, threshold=1e-13):
    """Radius beyond which |Tr[rho D(xi)]| stays below ``threshold``."""
    angles = np.linspace(0.0, 2 * math.pi, 96, endpoint=False)
    ring = np.exp(1j * angles)
    quiet = 0
    radius = 2.0
    while radius < 60.0:
        c = np.abs(fockspace.displacement_trace(rho.matrix, radius * ring)).max()
        quiet = quiet + 1 if c < threshold else 0
        if quiet == 3:
            return radius
        radius += 0.5
    raise DomainError("characteristic function does not decay within |xi| < 60")


# -- Wigner ----------------------------------------------------------------------

def wigner_integral_grid(rho, q, p, tol=1e-10):
    """W(q, p) = (1/2 pi) int du exp(-i u p) <q + u/2|rho|q - u/2> by quadrature."""
    _require_density(rho)
    q, p = _axes(q, p)
    if max(np.abs(q).max(), np.abs(p).max()) > POSITION_ENVELOPE:
        raise RangeError(f"points must satisfy |q|, |p| <= {POSITION_ENVELOPE}")
    reach = spatial_extent(rho)
    out = np.zeros((q.size, p.size))
    for i, qi in enumerate(q):
        half = reach - abs(qi)
        if half <= 0:
            continue

        def integrand(u, qi=qi):
            vals = position_elements(rho, qi + 0.5 * u, qi - 0.5 * u)
            return vals[:, None] * np.exp(-1j * np.outer(u, p)) / (2 * math.pi)

        res = oracle.integrate_1d(integrand, -2 * half, 2 * half, tol=tol)
        value = np.asarray(res.value)
        if np.max(np.abs(value.imag)) > 1e-9:
            raise QuadratureError(
                f"Wigner integral left imaginary residue {np.max(np.abs(value.imag)):.2e} at q={qi}"
            )
        out[i] = value.real
    return out


def wigner_integral(rho, point):
    return float(wigner_integral_grid(rho, point.q, point.p)[0, 0])


def wigner_parity_grid(rho, q, p, normalized=True):
    """Tr[(-1)^N rho D(2 beta)], times 1/pi when ``normalized``."""
    _require_density(rho)
    q, p = _axes(q, p)
    signs = (-1.0) ** np.arange(rho.dim)
    parity_rho = signs[:, None] * rho.matrix
    betas = SQRT2 * (q[:, None] + 1j * p[None, :])  # 2 beta
    raw = fockspace.displacement_trace(parity_rho, betas)
    if np.max(np.abs(raw.imag)) > 1e-9:
        raise QuadratureError(f"parity trace has imaginary residue {np.max(np.abs(raw.imag)):.2e}")
    return raw.real * (WIGNER_PARITY_CONSTANT if normalized else 1.0)


def wigner_parity(rho, point, normalized=True):
    return float(wigner_parity_grid(rho, point.q, point.p, normalized)[0, 0])


def _transform(rho, q, p, kr, tol=QUAD_TOL, extent=None):
    """int d^2 xi exp(beta xi* - beta* xi) [exp(i Re xi Im xi)] Tr[rho D(xi)].

    The exponent splits as exp(i sqrt2 (p Re xi - q Im xi)), so the lattice of
    outputs is two matrix products per quadrature rule.
    """
    q, p = _axes(q, p)
    need = char_extent(rho)
    if extent is None:
        extent = need
    elif extent < need:
        raise DomainError(
            f"xi-domain half-width {extent} is too small; the characteristic "
            f"function needs {need}",
            required_extent=need,
        )
    start = max(2, int(math.ceil(2 * extent / 1.5)))

    def estimate(panels):
        xi, w = oracle.panel_rule(-extent, extent, panels, order=16)
        re, im = np.meshgrid(xi, xi, indexing="ij")
        c = fockspace.displacement_trace(rho.matrix, re + 1j * im)
        if kr:
            c = c * np.exp(1j * re * im)
        eq = np.exp(-1j * SQRT2 * np.outer(q, xi)) * w
        ep = np.exp(1j * SQRT2 * np.outer(p, xi)) * w
        return eq @ c.T @ ep.T, xi.size**2

    return oracle.converge(estimate, tol, start_panels=start, max_doublings=4).value


def wigner_from_charfn_grid(rho, q, p, calibration=None, raw=False, extent=None):
    _require_density(rho)
    values = _transform(rho, q, p, kr=False, extent=extent)
    if raw:
        return values
    c = _constant("wigner_from_charfn", calibration)
    values = c * values
    if np.max(np.abs(values.imag)) > 1e-9:
        raise QuadratureError("Wigner transform left an imaginary residue above 1e-9")
    return values.real


def wigner_from_charfn(rho, q_axis, p_axis, calibration=None, state=""):
    """Wigner grid from the double Fourier transform of the characteristic function."""
    values = wigner_from_charfn_grid(rho, q_axis.points, p_axis.points, calibration)
    c = _constant("wigner_from_charfn", calibration)
    return _grid(q_axis, p_axis, values, "wigner_from_charfn", rho, state, c)


# -- Kirkwood-Rihaczek -----------------------------------------------------------

def kr_direct_grid(rho, q, p):
    """K(q, p) = <p|rho|q><q|p> on a lattice."""
    _require_density(rho)
    q, p = _axes(q, p)
    if max(np.abs(q).max(), np.abs(p).max()) > POSITION_ENVELOPE:
        raise RangeError(f"points must satisfy |q|, |p| <= {POSITION_ENVELOPE}")
    s = _support(rho)
    psi_q = specialfn.hermite_functions(s - 1, q)
    ket_p = (1j) ** np.arange(s)[:, None] * specialfn.hermite_functions(s - 1, p)
    bra_p_rho_q = ket_p.conj().T @ rho.matrix[:s, :s] @ psi_q  # (np, nq)
    return bra_p_rho_q.T * np.exp(1j * np.outer(q, p)) * INV_SQRT_2PI


def kr_direct(rho, point):
    return complex(kr_direct_grid(rho, point.q, point.p)[0, 0])


def kr_conjugate_grid(rho, q, p):
    """<q|rho|p><p|q>, assembled independently of :func:`kr_direct_grid`."""
    q, p = _axes(q, p)
    s = _support(rho)
    psi_q = specialfn.hermite_functions(s - 1, q)
    ket_p = (1j) ** np.arange(s)[:, None] * specialfn.hermite_functions(s - 1, p)
    return (psi_q.T @ rho.matrix[:s, :s] @ ket_p) * np.exp(-1j * np.outer(q, p)) * INV_SQRT_2PI


def kr_from_charfn_grid(rho, q, p, calibration=None, raw=False, extent=None):
    """K(beta) = c * int d^2 xi exp(beta xi* - beta* xi) exp((xi^2 - xi*^2)/4) C(xi)."""
    _require_density(rho)
    values = _transform(rho, q, p, kr=True, extent=extent)
    if raw:
        return values
    return _constant("kr_from_charfn", calibration) * values


def kr_from_charfn(rho, point, calibration=None, raw=False):
    return complex(kr_from_charfn_grid(rho, point.q, point.p, calibration, raw)[0, 0])


def _sandwich_vectors(dim, X, Y, mirror_momentum):
    _, ad = fockspace.ladder(dim)
    ad2 = ad.matrix @ ad.matrix
    right = np.stack([fockspace.coherent_amplitudes(SQRT2 * x, dim) for x in X], axis=1)
    right = fockspace.apply_exp_lower(-0.5 * ad2, right)
    sign = -1.0 if mirror_momentum else 1.0
    left = np.stack([fockspace.coherent_amplitudes(sign * 1j * SQRT2 * y, dim) for y in Y], axis=1)
    left = fockspace.apply_exp_lower(0.5 * ad2, left)
    return left, right


def kr_vacuum_form_grid(rho, q, p, calibration=None, raw=False, mirror_momentum=False,
                        check=True):
    """Coherent-state sandwich form of K.

    raw(X, Y) = exp(beta^2 + Y^2)/sqrt2 * <g_L| exp(a^2/2) rho exp(-a^dag^2/2) |sqrt2 X>
    with beta = (X + iY)/sqrt2 and g_L = i sqrt2 Y. ``mirror_momentum`` uses
    g_L = -i sqrt2 Y instead, which evaluates the distribution of
    (-1)^N rho rather than rho.

    The exponentials are applied as truncated matrices; with ``check`` the
    sandwich is recomputed at twice the dimension and must agree to 1e-6.
    """
    _require_density(rho)
    X, Y = _axes(q, p)

    def sandwich(dim):
        r = rho if dim == rho.dim else rho.padded(dim)
        left, right = _sandwich_vectors(dim, X, Y, mirror_momentum)
        return (left.conj().T @ r.matrix @ right).T  # (nX, nY)

    s = sandwich(rho.dim)
    if check:
        s2 = sandwich(2 * rho.dim)
        scale = max(np.max(np.abs(s2)), 1e-300)
        change = np.max(np.abs(s2 - s)) / scale
        if change > 1e-6:
            raise TruncationError(
                f"vacuum-form sandwich changed by {change:.2e} under dimension doubling",
                minimal_dim=2 * rho.dim,
            )
    beta = (X[:, None] + 1j * Y[None, :]) / SQRT2
    values = np.exp(beta**2 + Y[None, :] ** 2) / SQRT2 * s
    if raw:
        return values
    return _constant("kr_vacuum_form", calibration) * values


def kr_vacuum_form(rho, point, calibration=None, raw=False, mirror_momentum=False):
    return complex(
        kr_vacuum_form_grid(rho, point.q, point.p, calibration, raw, mirror_momentum)[0, 0]
    )


# -- Husimi Q ----------------------------------------------------------------------

def q_function_values(rho, alphas):
    """<alpha|rho|alpha> for an array of coherent amplitudes."""
    _require_density(rho)
    alphas = np.asarray(alphas, dtype=complex)
    flat = alphas.ravel()
    vecs = np.stack([fockspace.coherent_amplitudes(a, rho.dim) for a in flat], axis=1)
    vals = np.einsum("in,ij,jn->n", vecs.conj(), rho.matrix, vecs)
    if np.max(np.abs(vals.imag), initial=0.0) > 1e-10:
        raise QuadratureError("Q function has an imaginary residue above 1e-10")
    vals = vals.real
    if vals.min(initial=0.0) < -1e-10:
        raise PositivityError(f"Q function negative ({vals.min():.3e}); rho is not positive")
    return vals.reshape(alphas.shape)


def q_function(rho, alpha):
    """Husimi function <alpha|rho|alpha> (not divided by pi)."""
    return float(q_function_values(rho, np.array([complex(alpha)]))[0])


def q_function_grid(rho, q, p):
    q, p = _axes(q, p)
    return q_function_values(rho, (q[:, None] + 1j * p[None, :]) / SQRT2)


# -- Cohen class ---------------------------------------------------------------------

@dataclass(frozen=True)
class Signal:
    """Complex samples of a wavefunction on a uniform position grid."""

    x: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if x.ndim != 1 or x.shape != v.shape or x.size < 3:
            raise InvalidInputError("signal needs matching 1-D sample and value arrays")
        d = np.diff(x)
        if not np.allclose(d, d[0], rtol=1e-9, atol=0) or d[0] <= 0:
            raise InvalidInputError("signal samples must lie on a uniform increasing grid")
        scale = np.abs(v).max(initial=0.0)
        if scale > 0 and max(abs(v[0]), abs(v[-1])) > 1e-10 * scale:
            raise DomainError("signal does not decay to 1e-10 at the sampling edges")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)

    @property
    def step(self):
        return float(self.x[1] - self.x[0])

    def index_of(self, points, half_shift=False):
        """Integer sample indices of ``points``; raises if a point is off-grid."""
        pos = (np.asarray(points, dtype=float) - self.x[0]) / self.step
        if half_shift:
            pos = pos - 0.5
        idx = np.rint(pos)
        if np.max(np.abs(pos - idx), initial=0.0) > 1e-6:
            raise InvalidInputError("requested points are not aligned with the signal grid")
        return idx.astype(int)


@dataclass(frozen=True)
class CohenKernel:
    """Kernel phi(theta, tau) of a Cohen-class distribution.

    ``unity`` gives the Wigner function and ``dirac-pair`` the ambiguity
    function. ``custom`` carries samples on a uniform (theta, tau) lattice.
    """

    tag: str
    theta: np.ndarray | None = None
    tau: np.ndarray | None = None
    samples: np.ndarray | None = None

    def __post_init__(self):
        if self.tag not in ("unity", "dirac-pair", "custom"):
            raise InvalidInputError(f"unknown Cohen kernel {self.tag!r}")
        if self.tag == "custom":
            th = np.asarray(self.theta, dtype=float)
            ta = np.asarray(self.tau, dtype=float)
            s = np.asarray(self.samples, dtype=complex)
            if s.shape != (th.size, ta.size) or not np.all(np.isfinite(s)):
                raise InvalidInputError("custom kernel samples must be finite and match its axes")
            for axis in (th, ta):
                d = np.diff(axis)
                if axis.size < 3 or not np.allclose(d, d[0], rtol=1e-9, atol=0) or d[0] <= 0:
                    raise InvalidInputError("custom kernel axes must be uniform and increasing")
            object.__setattr__(self, "theta", th)
            object.__setattr__(self, "tau", ta)
            object.__setattr__(self, "samples", s)

    @classmethod
    def from_function(cls, fn, theta, tau):
        th = np.asarray(theta, dtype=float)
        ta = np.asarray(tau, dtype=float)
        return cls("custom", th, ta, fn(th[:, None], ta[None, :]))


COHEN_STEP = 0.05


def _ambiguity_density(rho, theta, tau):
    """A(theta, tau) = int du exp(i theta u) <u + tau/2|rho|u - tau/2> (trapezoid rule)."""
    reach = spatial_extent(rho)
    u = np.arange(-reach, reach + COHEN_STEP / 2, COHEN_STEP)
    phase = np.exp(1j * np.outer(theta, u)) * COHEN_STEP
    out = np.empty((theta.size, tau.size), dtype=complex)
    for j, t in enumerate(tau):
        out[:, j] = phase @ position_elements(rho, u + 0.5 * t, u - 0.5 * t)
    return out


def _ambiguity_signal(sig, theta, tau):
    h = sig.step
    k_all = np.rint(np.asarray(tau) / h).astype(int)
    if np.max(np.abs(np.asarray(tau) / h - k_all), initial=0.0) > 1e-6:
        raise InvalidInputError("lag values must be integer multiples of the signal step")
    phi = sig.values
    n = phi.size
    out = np.empty((theta.size, k_all.size), dtype=complex)
    for j, k in enumerate(k_all):
        # u + kh/2 and u - kh/2 land on samples; u sits on or halfway between them
        shift_hi = (k + 1) // 2 if k % 2 else k // 2
        shift_lo = shift_hi - k
        lo = max(0, -shift_lo, -shift_hi)
        hi = min(n, n - shift_hi, n - shift_lo)
        i = np.arange(lo, hi)
        u = sig.x[i] + (0.5 * h if k % 2 else 0.0)
        prod = phi[i + shift_hi] * phi[i + shift_lo].conj()
        out[:, j] = np.exp(1j * np.outer(theta, u)) @ prod * h
    return out


def _cohen_unity(source, q, p):
    if isinstance(source, Signal):
        h = source.step
        idx = source.index_of(q)
        phi = source.values
        n = phi.size
        out = np.zeros((q.size, p.size), dtype=complex)
        for i, c in enumerate(idx):
            kmax = min(c, n - 1 - c)
            k = np.arange(-kmax, kmax + 1)
            prod = phi[c + k] * phi[c - k].conj()
            out[i] = np.exp(-1j * np.outer(p, 2 * h * k)) @ prod * (2 * h) / (2 * math.pi)
        return out
    reach = spatial_extent(source)
    tau = np.arange(-2 * reach, 2 * reach + COHEN_STEP / 2, COHEN_STEP)
    out = np.empty((q.size, p.size), dtype=complex)
    phase = np.exp(-1j * np.outer(p, tau)) * COHEN_STEP / (2 * math.pi)
    for i, qi in enumerate(q):
        out[i] = phase @ position_elements(source, qi + 0.5 * tau, qi - 0.5 * tau)
    return out


def _ambiguity(source, theta, tau):
    if isinstance(source, Signal):
        return _ambiguity_signal(source, theta, tau)
    return _ambiguity_density(source, theta, tau)


def cohen_grid(source, kernel, q, p):
    """Cohen-class distribution on a lattice.

    C(q, p) = (1/4 pi^2) int dtheta dtau exp(-i theta q - i tau p) phi(theta, tau) A(theta, tau)
    with A the ambiguity function of the source. For ``dirac-pair`` the
    lattice axes are (theta, tau) and the value is A itself.
    """
    q, p = _axes(q, p)
    if not isinstance(source, (Signal, DensityOperator)):
        raise InvalidInputError("Cohen source must be a Signal or a DensityOperator")
    if kernel.tag == "unity":
        return _cohen_unity(source, q, p)
    if kernel.tag == "dirac-pair":
        return _ambiguity(source, q, p)
    theta, tau = kernel.theta, kernel.tau
    amb = _ambiguity(source, theta, tau)
    prod = kernel.samples * amb
    scale = np.abs(prod).max(initial=0.0)
    edge = max(np.abs(prod[[0, -1], :]).max(), np.abs(prod[:, [0, -1]]).max())
    if scale > 0 and edge > 1e-10 * scale:
        raise DomainError("custom kernel grid does not cover the support of kernel x ambiguity")
    dth = theta[1] - theta[0]
    dta = tau[1] - tau[0]
    eq = np.exp(-1j * np.outer(q, theta)) * dth
    ep = np.exp(-1j * np.outer(tau, p)) * dta
    return eq @ prod @ ep / (4 * math.pi**2)


def cohen(source, kernel, q_axis, p_axis, state=""):
    values = cohen_grid(source, kernel, q_axis.points, p_axis.points)
    route = {"unity": "cohen_unity", "dirac-pair": "cohen_dirac_pair", "custom": "cohen_custom"}
    dim = source.dim if isinstance(source, DensityOperator) else None
    return DistributionGrid(
        q_axis, p_axis, values,
        {"state": state, "route": route[kernel.tag], "dim": dim, "calibration": None},
    )


# -- calibration ---------------------------------------------------------------------

@dataclass(frozen=True)
class Calibration:
    route: str
    constant: complex
    reference: str
    residual: float

    def __post_init__(self):
        if self.constant == 0:
            raise CalibrationError(f"zero calibration constant for {self.route}")
        if not abs(self.residual) < CALIBRATION_RESIDUAL:
            raise CalibrationError(
                f"calibration of {self.route} on {self.reference} left residual "
                f"{self.residual:.3e} >= {CALIBRATION_RESIDUAL:g}"
            )


# route -> (raw lattice evaluator, reference lattice evaluator, source builder)
_CALIBRATED = {}
_CACHE = {}
_CACHE_LOCK = threading.Lock()
CALIBRATION_POINTS = np.linspace(-1.5, 1.5, 5)


def register_calibrated_route(name, raw, reference, build):
    _CALIBRATED[name] = (raw, reference, build)


def calibrated_routes():
    return sorted(_CALIBRATED)


def fit_constant(raw, reference):
    """Least-squares complex constant c minimising |c raw - reference|; returns (c, max residual)."""
    raw = np.asarray(raw, dtype=complex).ravel()
    ref = np.asarray(reference, dtype=complex).ravel()
    denom = np.vdot(raw, raw).real
    if denom == 0:
        raise CalibrationError("route returned identically zero values")
    c = np.vdot(raw, ref) / denom
    return complex(c), float(np.max(np.abs(c * raw - ref)))


def measure_constant(route, reference, dim=fockspace.DEFAULT_DIM, points=None):
    """Fit a route's constant without enforcing the residual bound or caching."""
    if route not in _CALIBRATED:
        raise CalibrationError(
            f"route {route!r} is not calibrated; registered: {', '.join(calibrated_routes())}"
        )
    raw_fn, ref_fn, build = _CALIBRATED[route]
    pts = CALIBRATION_POINTS if points is None else np.asarray(points, dtype=float)
    if pts.size**2 < 9:
        raise CalibrationError("calibration needs at least 9 reference points")
    source = build(reference, dim)
    return fit_constant(raw_fn(source, pts, pts), ref_fn(source, pts, pts))


def calibrate(route, reference, dim=fockspace.DEFAULT_DIM, points=None, cache=True):
    """Fit and cache the single complex constant of ``route`` on a reference state."""
    c, residual = measure_constant(route, reference, dim, points)
    cal = Calibration(route, c, str(reference), residual)
    if cache:
        with _CACHE_LOCK:
            _CACHE[route] = cal
    return cal


def get_calibration(route):
    with _CACHE_LOCK:
        cal = _CACHE.get(route)
    if cal is None:
        raise UncalibratedRouteError(f"route {route!r} has not been calibrated; call calibrate()")
    return cal


def clear_calibrations():
    with _CACHE_LOCK:
        _CACHE.clear()


def _constant(route, calibration):
    if calibration is None:
        calibration = get_calibration(route)
    if calibration.route != route:
        raise CalibrationError(f"calibration for {calibration.route!r} used on {route!r}")
    return calibration.constant


def _build_state(reference, dim):
    from .statespec import StateSpec, parse_state_spec

    if isinstance(reference, DensityOperator):
        return reference
    if not isinstance(reference, StateSpec):
        reference = parse_state_spec(str(reference))
    return fockspace.make_state(reference, dim)


register_calibrated_route(
    "wigner_parity",
    lambda rho, q, p: wigner_parity_grid(rho, q, p, normalized=False),
    wigner_integral_grid,
    _build_state,
)
register_calibrated_route(
    "wigner_from_charfn",
    lambda rho, q, p: wigner_from_charfn_grid(rho, q, p, raw=True),
    wigner_integral_grid,
    _build_state,
)
register_calibrated_route(
    "kr_from_charfn",
    lambda rho, q, p: kr_from_charfn_grid(rho, q, p, raw=True),
    kr_direct_grid,
    _build_state,
)
register_calibrated_route(
    "kr_vacuum_form",
    lambda rho, q, p: kr_vacuum_form_grid(rho, q, p, raw=True),
    kr_direct_grid,
    _build_state,
)


# -- grid producers ----------------------------------------------------------------------

def _grid(q_axis, p_axis, values, route, rho, state, constant=None):
    meta = {
        "state": str(state),
        "route": route,
        "dim": rho.dim if rho is not None else None,
        "calibration": None if constant is None else [constant.real, constant.imag],
    }
    return DistributionGrid(q_axis, p_axis, values, meta)


def evaluate_grid(route, rho, q_axis, p_axis, state="", calibration=None):
    """Evaluate a registered route on a lattice and wrap it with metadata."""
    q, p = q_axis.points, p_axis.points
    constant = None
    if route == "wigner_integral":
        values = wigner_integral_grid(rho, q, p)
    elif route == "wigner_parity":
        values = wigner_parity_grid(rho, q, p)
        constant = complex(WIGNER_PARITY_CONSTANT)
    elif route == "wigner_from_charfn":
        constant = _constant(route, calibration)
        values = wigner_from_charfn_grid(rho, q, p, calibration)
    elif route == "kr_direct":
        values = kr_direct_grid(rho, q, p)
    elif route == "kr_from_charfn":
        constant = _constant(route, calibration)
        values = kr_from_charfn_grid(rho, q, p, calibration)
    elif route == "kr_vacuum_form":
        constant = _constant(route, calibration)
        values = kr_vacuum_form_grid(rho, q, p, calibration)
    elif route == "q_function":
        values = q_function_grid(rho, q, p)
    elif route == "char_fn":
        values = char_fn_grid(rho, q, p)
    else:
        raise InvalidInputError(f"route {route!r} cannot be evaluated here")
    return _grid(q_axis, p_axis, values, route, rho, state, constant)


__all__ = [
    "Axis",
    "Calibration",
    "CohenKernel",
    "DistributionGrid",
    "PhasePoint",
    "Signal",
    "calibrate",
    "char_fn",
    "cohen",
    "kr_direct",
    "kr_from_charfn",
    "kr_vacuum_form",
    "q_function",
    "wigner_from_charfn",
    "wigner_integral",
    "wigner_parity",
]
