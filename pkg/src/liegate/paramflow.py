"""Transformation-parameter ODE solvers for the factorized evolution operator.

Two factorization routes exist for the general 1D quadratic Hamiltonian:

* route 1 fixes the dilation by exp(2*gamma) = a*Delta with Delta = 1/a(0),
  which turns the quadratic-phase Riccati equation into the linear second
  order problem  u'' + (2b - a'/a) u' + c a u = 0,  u(0)=1, u'(0)=0,  with
  alpha = -u'/u.  The remaining parameters follow from
  phi = int(b) - gamma + ln u  and  beta = Delta * v/u,  where v solves the
  same linear problem with v(0)=0, v'(0)=a(0).  The (u, v) pair is carried
  in the integration state, so the map data stays finite and accurate
  through focal points even though alpha, phi, beta themselves blow up.

* route 2 fixes exp(2*gamma) = Delta*sqrt(a/c) with Delta = sqrt(c0/a0) and
  rotates phase space at the rate phi' = sqrt(a c).  The leftover Riccati
  equation for alpha is integrated in linear projective form
  (alpha = Q/P with a smooth 2x2 linear system), which passes through
  isolated zeros of the quadratic coefficient with no special-casing.
  When b - gamma' vanishes identically the route short-circuits:
  alpha = vphi = beta = 0 exactly.

The linear/translation parameters (lam, Pi, S) solve the classical
equations of motion from the origin in both routes; this is checked against
the independent flow oracle in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .coeffs import CoefficientSet1D, FieldProfile2D, reduce_2d
from .errors import DomainError, IntegrationError

__all__ = [
    "ParamSample",
    "ParamTrajectory",
    "LinearTranslation",
    "ParamTrajectory2D",
    "solve_linear_translation",
    "solve_path1",
    "solve_path2",
    "solve_2d",
    "caustic_window",
    "trajectory_to_csv",
    "trajectory2d_to_csv",
]

_PROBE_POINTS = 257
_SHORTCUT_RTOL = 1e-12


@dataclass(frozen=True)
class ParamSample:
    """All transformation parameters at one instant."""

    t: float
    S: float
    lam: float
    Pi: float
    gamma: float
    alpha: float
    phi: float
    vphi: float
    beta: float
    u: float
    udot: float
    v: float = float("nan")
    vdot: float = float("nan")


@dataclass(frozen=True)
class LinearTranslation:
    """Solution of the translation-parameter equations only."""

    t_grid: np.ndarray
    S: np.ndarray
    lam: np.ndarray
    Pi: np.ndarray
    _dense: object

    def at(self, t: float) -> tuple[float, float, float]:
        lam, pi, s = self._dense(t)
        return float(s), float(lam), float(pi)


class ParamTrajectory:
    """Time-sampled transformation parameters for one factorization route.

    All parameters vanish at t = 0 (the factorized operator is the identity
    there).  ``valid_to`` is the first focal time: the first zero of u for
    route 1, the first zero of sin(phi) with phi > 0 for route 2 (also
    bounded by divergence of route 2's alpha, which can occur earlier for
    strongly driven cross terms).  alpha, phi and beta are reported as NaN
    beyond ``valid_to``; u and its derivative are reported everywhere.
    """

    def __init__(
        self,
        path: Literal["path1", "path2"],
        coeffs: CoefficientSet1D,
        t_end: float,
        tol: float,
        Delta: float,
        t_grid: np.ndarray,
        base_dense,
        valid_to: float,
        shortcut: bool = False,
        riccati_dense=None,
        riccati_t_end: float | None = None,
    ):
        self.path = path
        self.coeffs = coeffs
        self.hbar = coeffs.hbar
        self.t_end = float(t_end)
        self.tol = float(tol)
        self.Delta = float(Delta)
        self.t_grid = np.asarray(t_grid, dtype=float)
        self._base = base_dense
        self.valid_to = float(valid_to)
        self.shortcut = shortcut
        self._riccati = riccati_dense
        self._riccati_t_end = riccati_t_end if riccati_t_end is not None else t_end

    def _gamma(self, t: float) -> float:
        a = float(self.coeffs.a(t))
        if self.path == "path1":
            return 0.5 * math.log(a * self.Delta)
        c = float(self.coeffs.c(t))
        return 0.5 * math.log(self.Delta * math.sqrt(a / c))

    def sample(self, t: float) -> ParamSample:
        if not 0.0 <= t <= self.t_end:
            raise DomainError(f"t={t} outside the solved interval [0, {self.t_end}]")
        gamma = self._gamma(t)
        inside = t < self.valid_to
        nan = float("nan")
        if self.path == "path1":
            lam, pi, s, bint, u, udot, v, vdot = (float(x) for x in self._base(t))
            alpha = -udot / u if inside else nan
            phi = bint - gamma + math.log(u) if inside else nan
            beta = self.Delta * v / u if inside else nan
            return ParamSample(
                t=t, S=s, lam=lam, Pi=pi, gamma=gamma, alpha=alpha, phi=phi,
                vphi=0.0, beta=beta, u=u, udot=udot, v=v, vdot=vdot,
            )
        lam, pi, s, phi = (float(x) for x in self._base(t))
        if self.shortcut:
            return ParamSample(
                t=t, S=s, lam=lam, Pi=pi, gamma=gamma, alpha=0.0, phi=phi,
                vphi=0.0, beta=0.0, u=1.0, udot=0.0,
            )
        if t <= self._riccati_t_end:
            qq, pp, aint, vphi, beta = (float(x) for x in self._riccati(t))
            alpha = qq / pp
            u = math.exp(-aint)
            return ParamSample(
                t=t, S=s, lam=lam, Pi=pi, gamma=gamma, alpha=alpha, phi=phi,
                vphi=vphi, beta=beta, u=u, udot=-alpha * u,
            )
        return ParamSample(
            t=t, S=s, lam=lam, Pi=pi, gamma=gamma, alpha=nan, phi=phi,
            vphi=nan, beta=nan, u=nan, udot=nan,
        )


@dataclass(frozen=True)
class ParamTrajectory2D:
    """Planar trajectory: rotation angle, per-axis translations, shared radial."""

    radial: ParamTrajectory
    field: FieldProfile2D
    t_end: float
    tol: float
    t_grid: np.ndarray
    _dense: object

    @property
    def valid_to(self) -> float:
        return self.radial.valid_to

    @property
    def hbar(self) -> float:
        return self.field.hbar

    def sample(self, t: float):
        if not 0.0 <= t <= self.t_end:
            raise DomainError(f"t={t} outside the solved interval [0, {self.t_end}]")
        lam_x, lam_y, pi_x, pi_y, s, theta = (float(x) for x in self._dense(t))
        return {
            "t": t,
            "S": s,
            "theta": theta,
            "lam_x": lam_x,
            "lam_y": lam_y,
            "Pi_x": pi_x,
            "Pi_y": pi_y,
            "radial": self.radial.sample(t),
        }


def _check_positive(profile, t_end: float, name: str, requirement: str):
    probe = np.linspace(0.0, t_end, _PROBE_POINTS)
    values = np.asarray(profile(probe), dtype=float)
    if np.any(values <= 0.0):
        bad = float(probe[np.argmin(values)])
        raise DomainError(
            f"{name}(t) must stay positive on [0, {t_end}] ({requirement}); "
            f"violated near t={bad:.6g}"
        )


def _run_ivp(rhs, y0, t_end, tol, what, events=None):
    sol = solve_ivp(
        rhs,
        (0.0, t_end),
        y0,
        method="RK45",
        rtol=tol,
        atol=tol * 1e-2,
        dense_output=True,
        events=events,
    )
    if sol.status == -1:
        raise IntegrationError(
            f"{what} integration failed: {sol.message}", last_time=float(sol.t[-1])
        )
    return sol


def _linear_rhs(coeffs: CoefficientSet1D):
    def rhs(t, y):
        a = float(coeffs.a(t))
        b = float(coeffs.b(t))
        c = float(coeffs.c(t))
        d = float(coeffs.d(t))
        e = float(coeffs.e(t))
        g = float(coeffs.g(t))
        lam, pi = y[0], y[1]
        lam_dot = b * lam - a * pi + d
        pi_dot = c * lam - b * pi + e
        s_dot = (
            g + 0.5 * a * pi * pi + 0.5 * c * lam * lam
            - b * lam * pi - d * pi + e * lam + lam_dot * pi
        )
        return lam_dot, pi_dot, s_dot

    return rhs


def solve_linear_translation(
    coeffs: CoefficientSet1D, t_end: float, tol: float = 1e-10
) -> LinearTranslation:
    """Solve Pi' = c lam - b Pi + e, lam' = b lam - a Pi + d, S' = L from zero.

    (lam, -Pi) traces the classical Hamiltonian flow launched from the
    phase-space origin; S accumulates the associated action integral.
    """
    if t_end <= 0:
        raise DomainError("t_end must be positive")
    inner = _linear_rhs(coeffs)
    sol = _run_ivp(lambda t, y: inner(t, y), [0.0, 0.0, 0.0], t_end, tol,
                   "translation parameters")
    lam, pi, s = sol.y
    return LinearTranslation(t_grid=sol.t, S=s, lam=lam, Pi=pi, _dense=sol.sol)


def _first_root(fn, t_grid: np.ndarray, t_end: float) -> float:
    """First sign change of fn on (0, t_end], refined to 1e-10 relative."""
    ts = np.unique(np.concatenate([t_grid, np.linspace(0.0, t_end, 2049)]))
    vals = np.array([fn(t) for t in ts])
    sign = np.sign(vals)
    for k in range(1, len(ts)):
        if sign[k] == 0.0 and ts[k] > 0.0:
            return float(ts[k])
        if sign[k - 1] * sign[k] < 0.0:
            lo, hi = ts[k - 1], ts[k]
            return float(brentq(fn, lo, hi, xtol=1e-300, rtol=1e-10))
    return math.inf


def solve_path1(coeffs: CoefficientSet1D, t_end: float, tol: float = 1e-10) -> ParamTrajectory:
    """Route 1 parameters: Delta = 1/a(0), gamma = ln(a*Delta)/2, linearized
    Riccati via u'' + (2b - a'/a) u' + a c u = 0."""
    if t_end <= 0:
        raise DomainError("t_end must be positive")
    _check_positive(coeffs.a, t_end, "a", "required by exp(2*gamma) = a*Delta")
    a0 = float(coeffs.a(0.0))
    delta = 1.0 / a0
    inner = _linear_rhs(coeffs)

    def rhs(t, y):
        lam_dot, pi_dot, s_dot = inner(t, y[:3])
        a = float(coeffs.a(t))
        b = float(coeffs.b(t))
        c = float(coeffs.c(t))
        adot = float(coeffs.a.derivative(t))
        damping = 2.0 * b - adot / a
        u, udot, v, vdot = y[4], y[5], y[6], y[7]
        return (
            lam_dot, pi_dot, s_dot,
            b,
            udot, -damping * udot - a * c * u,
            vdot, -damping * vdot - a * c * v,
        )

    y0 = [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, a0]
    sol = _run_ivp(rhs, y0, t_end, tol, "route-1 parameters")
    valid_to = _first_root(lambda t: float(sol.sol(t)[4]), sol.t, t_end)
    return ParamTrajectory(
        path="path1", coeffs=coeffs, t_end=t_end, tol=tol, Delta=delta,
        t_grid=sol.t, base_dense=sol.sol, valid_to=valid_to,
    )


def _path2_gamma_dot(coeffs: CoefficientSet1D, t: float) -> float:
    a = float(coeffs.a(t))
    c = float(coeffs.c(t))
    adot = float(coeffs.a.derivative(t))
    cdot = float(coeffs.c.derivative(t))
    return 0.25 * (adot / a - cdot / c)


def _is_shortcut(coeffs: CoefficientSet1D, t_end: float) -> bool:
    probe = np.linspace(0.0, t_end, _PROBE_POINTS)
    for t in probe:
        b = float(coeffs.b(t))
        gdot = _path2_gamma_dot(coeffs, t)
        if abs(b - gdot) >= _SHORTCUT_RTOL * (1.0 + abs(b) + abs(gdot)):
            return False
    return True


def solve_path2(coeffs: CoefficientSet1D, t_end: float, tol: float = 1e-10) -> ParamTrajectory:
    """Route 2 parameters: Delta = sqrt(c0/a0), phi' = sqrt(a c).

    Requires a(t) > 0 and c(t) > 0 (sqrt(a c) and sqrt(a/c) must be real).
    If b - gamma' vanishes identically the factorization terminates early
    and alpha = vphi = beta = 0.
    """
    if t_end <= 0:
        raise DomainError("t_end must be positive")
    _check_positive(coeffs.a, t_end, "a", "sqrt(a*c) must be real")
    try:
        _check_positive(coeffs.c, t_end, "c", "sqrt(a/c) must be real")
    except DomainError as err:
        raise DomainError(f"{err}; route 2 needs c > 0, use route 1 instead") from None
    a0 = float(coeffs.a(0.0))
    c0 = float(coeffs.c(0.0))
    delta = math.sqrt(c0 / a0)
    shortcut = _is_shortcut(coeffs, t_end)
    inner = _linear_rhs(coeffs)

    def base_rhs(t, y):
        lam_dot, pi_dot, s_dot = inner(t, y[:3])
        a = float(coeffs.a(t))
        c = float(coeffs.c(t))
        return lam_dot, pi_dot, s_dot, math.sqrt(a * c)

    base = _run_ivp(base_rhs, [0.0, 0.0, 0.0, 0.0], t_end, tol, "route-2 parameters")

    riccati_dense = None
    riccati_t_end = t_end
    if not shortcut:
        phi_of = base.sol

        def ric_rhs(t, y):
            # alpha' = w sin(2phi) alpha^2 - 2w cos(2phi) alpha - w sin(2phi)
            # integrated projectively as alpha = Q/P with the linear pair
            # Q' = -w(cos(2phi) Q + sin(2phi) P), P' = w(cos(2phi) P - sin(2phi) Q),
            # which passes smoothly through zeros of the quadratic coefficient.
            w = float(coeffs.b(t)) - _path2_gamma_dot(coeffs, t)
            phi = float(phi_of(t)[3])
            c2, s2 = math.cos(2.0 * phi), math.sin(2.0 * phi)
            qq, pp, _, vphi, _ = y
            alpha = qq / pp
            return (
                -w * (c2 * qq + s2 * pp),
                w * (c2 * pp - s2 * qq),
                alpha,
                w * (c2 - alpha * s2),
                w * math.exp(-2.0 * y[3]) * s2,
            )

        # alpha = Q/P diverges where P vanishes; stop just before that point
        # (|alpha| crossing the cap) so the quadrature components stay finite
        cap = 1e8
        blow_up = lambda t, y: y[0] * y[0] - (cap * y[1]) ** 2
        blow_up.terminal = True
        ric = _run_ivp(ric_rhs, [0.0, 1.0, 0.0, 0.0, 0.0], t_end, tol,
                       "route-2 quadratic-phase parameters", events=[blow_up])
        riccati_dense = ric.sol
        if ric.status == 1:
            riccati_t_end = float(ric.t_events[0][0]) * (1.0 - 1e-12)

    phi_end = float(base.sol(t_end)[3])
    if phi_end >= math.pi:
        sin_root = _first_root(lambda t: float(base.sol(t)[3]) - math.pi, base.t, t_end)
    else:
        sin_root = math.inf
    valid_to = min(sin_root, riccati_t_end if riccati_t_end < t_end else math.inf)
    return ParamTrajectory(
        path="path2", coeffs=coeffs, t_end=t_end, tol=tol, Delta=delta,
        t_grid=base.t, base_dense=base.sol, valid_to=valid_to,
        shortcut=shortcut, riccati_dense=riccati_dense, riccati_t_end=riccati_t_end,
    )


def solve_2d(
    profile: FieldProfile2D,
    t_end: float,
    tol: float = 1e-10,
    path: Literal["path1", "path2"] = "path1",
) -> ParamTrajectory2D:
    """Planar charged particle: coupled (lam, Pi) system, theta' = qB/2m,
    radial parameters delegated to the chosen 1D route."""
    if t_end <= 0:
        raise DomainError("t_end must be positive")
    if path not in ("path1", "path2"):
        raise DomainError(f"path must be 'path1' or 'path2', got {path!r}")
    reduced, theta_rate = reduce_2d(profile)
    q = profile.charge

    def rhs(t, y):
        m = float(profile.m(t))
        bb = float(profile.B(t))
        kk = float(profile.K(t))
        ex = float(profile.Ex(t))
        ey = float(profile.Ey(t))
        wb = q * bb / (2.0 * m)
        kappa = kk + q * q * bb * bb / (4.0 * m)
        lam_x, lam_y, pi_x, pi_y = y[0], y[1], y[2], y[3]
        lamx_dot = -pi_x / m - wb * lam_y
        lamy_dot = -pi_y / m + wb * lam_x
        pix_dot = kappa * lam_x - wb * pi_y + q * ex
        piy_dot = kappa * lam_y + wb * pi_x + q * ey
        lagrangian = (
            (pi_x**2 + pi_y**2) / (2.0 * m)
            + 0.5 * kappa * (lam_x**2 + lam_y**2)
            + wb * (lam_y * pi_x - lam_x * pi_y)
            + lamx_dot * pi_x + lamy_dot * pi_y
            + q * ex * lam_x + q * ey * lam_y
        )
        return lamx_dot, lamy_dot, pix_dot, piy_dot, lagrangian, wb

    sol = _run_ivp(rhs, [0.0] * 6, t_end, tol, "planar translation parameters")
    solver = solve_path1 if path == "path1" else solve_path2
    radial = solver(reduced, t_end, tol)
    return ParamTrajectory2D(
        radial=radial, field=profile, t_end=t_end, tol=tol,
        t_grid=sol.t, _dense=sol.sol,
    )


def caustic_window(traj: ParamTrajectory | ParamTrajectory2D) -> float:
    """First focal time of the trajectory; +inf if none within [0, t_end]."""
    return traj.valid_to


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def trajectory_to_csv(traj: ParamTrajectory, path: str, n_samples: int = 201):
    """Uniform-time CSV dump: t,S,lam,Pi,gamma,alpha,phi,vphi,beta,u,udot
    (route 1 appends the companion solution columns v,vdot)."""
    ts = np.linspace(0.0, traj.t_end, n_samples)
    with_companion = traj.path == "path1"
    header = "t,S,lam,Pi,gamma,alpha,phi,vphi,beta,u,udot"
    if with_companion:
        header += ",v,vdot"
    lines = [header]
    for t in ts:
        s = traj.sample(float(t))
        row = [s.t, s.S, s.lam, s.Pi, s.gamma, s.alpha, s.phi, s.vphi, s.beta, s.u, s.udot]
        if with_companion:
            row += [s.v, s.vdot]
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def trajectory2d_to_csv(traj: ParamTrajectory2D, path: str, n_samples: int = 201):
    """Planar CSV dump: shared radial parameters plus rotation and per-axis
    translation columns."""
    ts = np.linspace(0.0, traj.t_end, n_samples)
    header = (
        "t,S,gamma,alpha,phi,vphi,beta,u,udot,theta,lam_x,lam_y,Pi_x,Pi_y"
    )
    lines = [header]
    for t in ts:
        rec = traj.sample(float(t))
        r = rec["radial"]
        row = [
            rec["t"], rec["S"], r.gamma, r.alpha, r.phi, r.vphi, r.beta,
            r.u, r.udot, rec["theta"], rec["lam_x"], rec["lam_y"],
            rec["Pi_x"], rec["Pi_y"],
        ]
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
