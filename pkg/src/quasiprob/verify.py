"""Cross-route verification suite.

Every row compares two independent evaluations of the same quantity and
records the largest absolute deviation. Rows flagged ``candidate`` test
intermediate forms whose algebra is not shown in the source derivation;
they are reported with measured constants and do not affect the overall
verdict. Rows that cannot apply to a state (no regular P function) are
``skipped``.
"""

import json
import math
import platform
from dataclasses import dataclass, field

import numpy as np

from . import distributions as dist
from . import fockspace, prep, specialfn
from .grid import Axis
from .statespec import StateSpec, parse_state_list

DEFAULT_STATES = "vacuum,fock:1,fock:2,coherent:1,thermal:0.5,squeezed:0.4,0"
DEFAULT_GRID = Axis(-4.0, 4.0, 33)
MARGINAL_GRID = Axis(-10.0, 10.0, 201)
C_W_TOL = 1e-9
HERMITE_REL_TOL = 1e-8
GENERATING_TOL = 1e-10
SHIFT_TOL = 1e-5
POSITION_TOL = 1e-10
SQRT2 = math.sqrt(2.0)


@dataclass
class VerifyRow:
    check: str
    routes: str
    deviation: float
    tol: float
    candidate: bool = False
    skipped: bool = False
    detail: dict = field(default_factory=dict)

    @property
    def passed(self):
        return (not self.skipped) and bool(self.deviation <= self.tol)

    def to_dict(self):
        out = {
            "check": self.check,
            "routes": self.routes,
            "deviation": None if self.skipped else float(self.deviation),
            "tol": self.tol,
            "pass": self.passed,
            "candidate": self.candidate,
            "skipped": self.skipped,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class VerifyReport:
    rows: list
    environment: dict

    @property
    def passed(self):
        return all(r.passed for r in self.rows if not (r.candidate or r.skipped))

    def failed(self):
        return [r for r in self.rows if not (r.candidate or r.skipped or r.passed)]

    def to_json(self):
        data = {
            "environment": self.environment,
            "rows": [r.to_dict() for r in self.rows],
            "pass": self.passed,
        }
        return json.dumps(data, indent=1, sort_keys=True)

    def to_text(self):
        lines = [f"quasiprob verify  dim={self.environment['dim']}  tol={self.environment['tol']:g}"]
        for r in self.rows:
            if r.skipped:
                status, dev = "SKIP", "-"
            else:
                status = ("pass" if r.passed else "fail") if r.candidate else (
                    "PASS" if r.passed else "FAIL")
                dev = f"{r.deviation:.3e}"
            tag = "  [candidate]" if r.candidate else ""
            lines.append(f"{status:4}  {r.check:48} {dev:>10}  tol {r.tol:.0e}{tag}")
            for key, value in r.detail.items():
                if key in ("constant", "constants", "note"):
                    lines.append(f"      {key}: {value}")
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines) + "\n"


def _dev(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def _cnum(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


# -- candidate forms of the Kirkwood-Rihaczek function ----------------------------

def kr_grouped_form(rho, X, Y):
    """sqrt(pi/2) exp(beta^2 - beta*^2) <X| exp((a - beta*)^2) (-1)^N rho |X>.

    exp((a - beta*)^2) = exp(beta*^2) exp(a^2 - 2 beta* a); the bra is built
    from the adjoint series acting on |X>, which terminates row by row.
    """
    n = rho.dim
    _, ad = fockspace.ladder(n)
    ad = ad.matrix
    psi = specialfn.hermite_functions(n - 1, np.asarray(X, dtype=float))
    parity_rho = ((-1.0) ** np.arange(n))[:, None] * rho.matrix
    out = np.empty((len(X), len(Y)), dtype=complex)
    for i, x in enumerate(X):
        ket = parity_rho @ psi[:, i]
        for j, y in enumerate(Y):
            b = (x + 1j * y) / SQRT2
            bra = fockspace.apply_exp_lower(ad @ ad - 2 * b * ad, psi[:, i].astype(complex))
            out[i, j] = math.sqrt(math.pi / 2) * np.exp(b * b) * (bra.conj() @ ket)
    return out


def _exp_vacuum(c2, c1, dim):
    """exp(c2 a^dag^2 + c1 a^dag)|0> = exp(|c1|^2/2) exp(c2 a^dag^2)|c1>."""
    _, ad = fockspace.ladder(dim)
    coh = fockspace.coherent_amplitudes(c1, dim) * np.exp(0.5 * abs(c1) ** 2)
    return fockspace.apply_exp_lower(c2 * ad.matrix @ ad.matrix, coh)


def kr_vacuum_parity_form(rho, X, Y, with_parity):
    """exp(beta^2 - X^2)/sqrt2 <0| exp(a^2/2 -+ sqrt2 i Y a) [(-1)^N] rho exp(-a^dag^2/2 + sqrt2 X a^dag) |0>.

    With parity the bra exponent carries -sqrt2 i Y; without it, +sqrt2 i Y.
    """
    n = rho.dim
    m = rho.matrix
    if with_parity:
        m = ((-1.0) ** np.arange(n))[:, None] * m
    sign = -1.0 if with_parity else 1.0
    # <0| exp(c a^2/2 + d a) is the adjoint of exp(a^dag^2/2 + d* a^dag)|0>
    bras = np.stack([_exp_vacuum(0.5, np.conj(sign * 1j * SQRT2 * y), n) for y in Y], axis=1)
    kets = np.stack([_exp_vacuum(-0.5, SQRT2 * x, n) for x in X], axis=1)
    sandwich = (bras.conj().T @ m @ kets).T
    beta = (np.asarray(X)[:, None] + 1j * np.asarray(Y)[None, :]) / SQRT2
    return np.exp(beta**2 - np.asarray(X)[:, None] ** 2) / SQRT2 * sandwich


# -- suite ---------------------------------------------------------------------------------

def _hermite_rows():
    rows = []
    xs = np.linspace(-3.0, 3.0, 13)
    worst = 0.0
    for n in range(21):
        rec = specialfn.hermite_table(n, xs)[n]
        integ = np.array([specialfn.hermite_integral(n, x) for x in xs])
        scale = np.maximum(np.abs(rec), 1.0)
        worst = max(worst, float(np.max(np.abs(rec - integ) / scale)))
    rows.append(VerifyRow("hermite recurrence vs integral form (n<=20, |x|<=3)",
                          "hermite/hermite_integral", worst, HERMITE_REL_TOL))
    worst = 0.0
    for t in np.linspace(-1.0, 1.0, 9):
        for x in np.linspace(-5.0, 5.0, 11):
            exact = math.exp(-t * t + 2 * t * x)
            worst = max(worst, abs(specialfn.generating_partial(t, x, 120) - exact))
    rows.append(VerifyRow("generating partial sum K=120 vs exp(-t^2+2tx)",
                          "generating_partial/exp", worst, GENERATING_TOL))
    worst = 0.0
    for x in (0.0, 0.5, 1.7):
        for n in (1, 2):
            fd = specialfn.generating_derivative(0.2, x, 80, 2 * n)
            shifted = specialfn.shifted_generating_partial(0.2, x, 80 - 2 * n, 2 * n)
            worst = max(worst, abs(fd - shifted))
    rows.append(VerifyRow("derivative-shift identity by finite differences",
                          "generating_derivative/shifted_partial", worst, SHIFT_TOL))
    return rows


def _position_row():
    worst = 0.0
    for X in np.linspace(-3.0, 3.0, 7):
        a = fockspace.position_eigenstate(X, 128, route="hermite").amps[:41]
        b = fockspace.position_eigenstate(X, 128, route="displaced-vacuum").amps[:41]
        worst = max(worst, _dev(a, b))
    return VerifyRow("position eigenstate as displaced vacuum (n<=40, |X|<=3)",
                     "hermite/displaced-vacuum", worst, POSITION_TOL)


def run_verify(states=DEFAULT_STATES, dim=fockspace.DEFAULT_DIM, tol=1e-6, grid=DEFAULT_GRID,
               marginal_grid=MARGINAL_GRID):
    """Run every check and return a :class:`VerifyReport`."""
    specs = parse_state_list(states) if isinstance(states, str) else list(states)
    q = p = grid.points
    mq = marginal_grid.points
    rows = []
    env = {
        "dim": dim,
        "tol": tol,
        "grid": [grid.min, grid.max, grid.count],
        "marginal_grid": [marginal_grid.min, marginal_grid.max, marginal_grid.count],
        "states": [str(s) for s in specs],
        "python": platform.python_version(),
        "numpy": np.__version__,
    }

    dist.clear_calibrations()
    cals = {r: dist.calibrate(r, StateSpec.vacuum(), dim) for r in
            ("wigner_parity", "wigner_from_charfn", "kr_from_charfn", "kr_vacuum_form")}
    cals["kr_from_p"] = dist.calibrate("kr_from_p", prep.PRepresentation.delta(0), dim)
    c_w = cals["wigner_parity"].constant
    rows.append(VerifyRow("c_W of displaced parity equals 1/pi", "wigner_parity/wigner_integral",
                          abs(c_w - 1 / math.pi), C_W_TOL, detail={"constant": _cnum(c_w)}))
    for route, cal in cals.items():
        if route != "wigner_parity":
            rows.append(VerifyRow(f"calibration fit {route} on {cal.reference}", route,
                                  cal.residual, tol, detail={"constant": _cnum(cal.constant)}))

    for spec in specs:
        rho = fockspace.make_state(spec, dim)
        name = str(spec)
        w_ref = dist.wigner_integral_grid(rho, q, p)
        rows.append(VerifyRow(f"{name}: wigner parity vs integral", "wigner_parity/wigner_integral",
                              _dev(dist.wigner_parity_grid(rho, q, p), w_ref), tol))
        rows.append(VerifyRow(f"{name}: wigner charfn vs integral", "wigner_from_charfn/wigner_integral",
                              _dev(dist.wigner_from_charfn_grid(rho, q, p), w_ref), tol))
        k_ref = dist.kr_direct_grid(rho, q, p)
        rows.append(VerifyRow(f"{name}: kr charfn vs direct", "kr_from_charfn/kr_direct",
                              _dev(dist.kr_from_charfn_grid(rho, q, p), k_ref), tol))
        rows.append(VerifyRow(f"{name}: kr vacuum form vs direct", "kr_vacuum_form/kr_direct",
                              _dev(dist.kr_vacuum_form_grid(rho, q, p), k_ref), tol))
        rows.append(VerifyRow(f"{name}: kr conjugate ordering", "kr_direct/kr_conjugate",
                              _dev(k_ref.conj(), dist.kr_conjugate_grid(rho, q, p)), tol))

        k_wide = dist.kr_direct_grid(rho, mq, mq)
        h = marginal_grid.step
        rows.append(VerifyRow(f"{name}: kr q-marginal", "kr_direct/position_density",
                              _dev(k_wide.sum(axis=1) * h, dist.position_density(rho, mq)), tol))
        rows.append(VerifyRow(f"{name}: kr p-marginal", "kr_direct/momentum_density",
                              _dev(k_wide.sum(axis=0) * h, dist.momentum_density(rho, mq)), tol))
        total = k_wide.sum() * h * h
        trace = np.trace(rho.matrix).real
        rows.append(VerifyRow(f"{name}: kr total mass", "kr_direct/trace",
                              abs(total - trace), tol, detail={"imag": float(abs(total.imag))}))
        w_wide = dist.wigner_parity_grid(rho, mq, mq)
        rows.append(VerifyRow(f"{name}: wigner q-marginal", "wigner_parity/position_density",
                              _dev(w_wide.sum(axis=1) * h, dist.position_density(rho, mq)), tol))
        rows.append(VerifyRow(f"{name}: wigner p-marginal", "wigner_parity/momentum_density",
                              _dev(w_wide.sum(axis=0) * h, dist.momentum_density(rho, mq)), tol))

        for route in ("wigner_from_charfn", "kr_from_charfn", "kr_vacuum_form"):
            c, _ = dist.measure_constant(route, rho, dim)
            ref_c = cals[route].constant
            rows.append(VerifyRow(f"{name}: {route} constant stability", route,
                                  abs(c - ref_c) / abs(ref_c), tol,
                                  detail={"constant": _cnum(c)}))

        rows.append(VerifyRow(f"{name}: cohen unity vs wigner", "cohen_unity/wigner_integral",
                              _dev(dist.cohen_grid(rho, dist.CohenKernel("unity"), q, p), w_ref), tol))
        theta = tau = np.linspace(-3.0, 3.0, 13)
        amb = dist.cohen_grid(rho, dist.CohenKernel("dirac-pair"), theta, tau)
        cf = fockspace.displacement_trace(
            rho.matrix, (-tau[None, :] + 1j * theta[:, None]) / SQRT2)
        rows.append(VerifyRow(f"{name}: cohen dirac-pair vs char_fn", "cohen_dirac_pair/char_fn",
                              _dev(amb, cf), tol))

        P = prep.p_from_state(spec)
        if P is None:
            rows.append(VerifyRow(f"{name}: kr from P vs direct", "kr_from_p/kr_direct",
                                  float("nan"), tol, skipped=True,
                                  detail={"note": "no regular P function"}))
        else:
            rho_p = prep.density_from_p(P, dim)
            rows.append(VerifyRow(f"{name}: kr from P vs direct", "kr_from_p/kr_direct",
                                  _dev(prep.kr_from_p_grid(P, q, p),
                                       dist.kr_direct_grid(rho_p, q, p)), tol))
            c, _ = dist.fit_constant(prep.kr_from_p_grid(P, dist.CALIBRATION_POINTS,
                                                         dist.CALIBRATION_POINTS, raw=True),
                                     dist.kr_direct_grid(rho_p, dist.CALIBRATION_POINTS,
                                                         dist.CALIBRATION_POINTS))
            ref_c = cals["kr_from_p"].constant
            rows.append(VerifyRow(f"{name}: kr_from_p constant stability", "kr_from_p",
                                  abs(c - ref_c) / abs(ref_c), tol,
                                  detail={"constant": _cnum(c)}))

        cq = cp = dist.CALIBRATION_POINTS
        kc = dist.kr_direct_grid(rho, cq, cp)
        c22, r22 = dist.fit_constant(kr_grouped_form(rho, cq, cp), kc)
        rows.append(VerifyRow(f"{name}: grouped exponential form (candidate)",
                              "kr_grouped_form/kr_direct", r22, tol, candidate=True,
                              detail={"constant": _cnum(c22)}))
        with_par = kr_vacuum_parity_form(rho, cq, cp, True)
        without = kr_vacuum_parity_form(rho, cq, cp, False)
        scale = max(float(np.max(np.abs(without))), 1e-300)
        c25, r25 = dist.fit_constant(with_par, kc)
        rows.append(VerifyRow(f"{name}: parity removal between vacuum forms (candidate)",
                              "kr_vacuum_parity/kr_vacuum_plain", _dev(with_par, without) / scale,
                              tol, candidate=True,
                              detail={"constant": _cnum(c25), "residual": r25}))
        printed = dist.kr_vacuum_form_grid(rho, cq, cp, raw=True, mirror_momentum=True)
        c26, r26 = dist.fit_constant(printed, kc)
        rows.append(VerifyRow(f"{name}: printed coherent-label form (candidate)",
                              "kr_vacuum_form[mirror]/kr_direct", r26, tol, candidate=True,
                              detail={"constant": _cnum(c26)}))

    # prefactor of the P form: printed exp(iXY) against exp(iXY - (X^2+Y^2)/2)
    P0 = prep.PRepresentation.delta(0)
    full = prep.kr_from_p_grid(P0, q, p, raw=True)
    printed = prep.kr_from_p_grid(P0, q, p, raw=True, printed_prefactor=True)
    ratio = printed / full
    rows.append(VerifyRow("P-form printed prefactor is a pure phase (candidate)",
                          "kr_from_p[printed]/kr_from_p", float(np.max(np.abs(np.abs(ratio) - 1))),
                          tol, candidate=True,
                          detail={"note": "ratio is exp((X^2+Y^2)/2), not a phase"}))

    rows.extend(_hermite_rows())
    rows.append(_position_row())
    return VerifyReport(rows, env)
