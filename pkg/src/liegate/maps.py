"""Symplectic Heisenberg maps assembled from parameter trajectories.

The Heisenberg-picture canonical operators are an affine map
(x_H, p_H) = M (x, p) + (lam, -Pi) with M built from the transformation
parameters.  M preserves the symplectic form and has unit determinant;
``check_symplectic`` measures both residuals so callers can assert their
own thresholds.

Ordering is (x, p) in 1D and (x, y, p_x, p_y) in 2D, with the symplectic
form J = [[0, I], [-I, 0]] in that ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CausticError, DomainError
from .paramflow import ParamTrajectory, ParamTrajectory2D

__all__ = [
    "SymplecticMap",
    "symplectic_form",
    "assemble_path1",
    "assemble_path2",
    "assemble_2d",
    "check_symplectic",
    "evolve_gaussian_moments",
    "maps_to_csv",
]


def symplectic_form(dof: int) -> np.ndarray:
    j = np.zeros((2 * dof, 2 * dof))
    j[:dof, dof:] = np.eye(dof)
    j[dof:, :dof] = -np.eye(dof)
    return j


@dataclass(frozen=True)
class SymplecticMap:
    """Linear Heisenberg transport: matrix M plus translation (lam, -Pi)."""

    t: float
    M: np.ndarray
    shift: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.M, dtype=float)
        s = np.asarray(self.shift, dtype=float)
        if m.shape not in ((2, 2), (4, 4)) or s.shape != (m.shape[0],):
            raise DomainError("map must be 2x2 or 4x4 with a matching shift")
        object.__setattr__(self, "M", m)
        object.__setattr__(self, "shift", s)

    @property
    def dof(self) -> int:
        return self.M.shape[0] // 2


def _window_check(traj, t: float):
    if t > traj.valid_to:
        raise CausticError(
            f"t={t} is beyond the first focal time valid_to={traj.valid_to}",
            valid_to=traj.valid_to,
        )


def _entries_path1(traj: ParamTrajectory, t: float) -> tuple[float, float, float, float]:
    # G_qq = e^(phi+gamma), G_qp = (beta/Delta) e^(phi+gamma),
    # G_pq = -alpha Delta e^(phi-gamma), G_pp = e^(-phi-gamma) - alpha beta e^(phi-gamma),
    # evaluated through the globally smooth pair (u, v):
    # e^(phi+gamma) = e^B u, beta/Delta = v/u, alpha = -u'/u, giving
    # M = e^B [[u, v], [u'/a, v'/a]].
    s = traj.sample(t)
    a = float(traj.coeffs.a(t))
    eb = math.exp(_bint_path1(traj, t))
    g_qq = eb * s.u
    g_qp = eb * s.v
    g_pq = eb * s.udot / a
    g_pp = eb * s.vdot / a
    return g_qq, g_qp, g_pq, g_pp


def _bint_path1(traj: ParamTrajectory, t: float) -> float:
    return float(traj._base(t)[3])


def assemble_path1(traj: ParamTrajectory, t: float) -> SymplecticMap:
    """Route-1 map M = [[G_qq, G_qp], [G_pq, G_pp]], shift (lam, -Pi)."""
    if traj.path != "path1":
        raise DomainError("trajectory was solved with route 2; use assemble_path2")
    _window_check(traj, t)
    s = traj.sample(t)
    g_qq, g_qp, g_pq, g_pp = _entries_path1(traj, t)
    return SymplecticMap(
        t=t,
        M=np.array([[g_qq, g_qp], [g_pq, g_pp]]),
        shift=np.array([s.lam, -s.Pi]),
    )


def _entries_path2(traj: ParamTrajectory, t: float) -> tuple[float, float, float, float]:
    s = traj.sample(t)
    cph, sph = math.cos(s.phi), math.sin(s.phi)
    ev, evm = math.exp(s.vphi), math.exp(-s.vphi)
    eg, egm = math.exp(s.gamma), math.exp(-s.gamma)
    delta = traj.Delta
    g_qq = (cph - s.alpha * sph) * eg * ev
    g_qp = ((s.beta * cph - s.alpha * s.beta * sph) * ev + sph * evm) * eg / delta
    g_pq = -(s.alpha * cph + sph) * delta * ev * egm
    g_pp = -((s.beta * sph + s.alpha * s.beta * cph) * ev - cph * evm) * egm
    return g_qq, g_qp, g_pq, g_pp


def assemble_path2(traj: ParamTrajectory, t: float) -> SymplecticMap:
    """Route-2 map: G_qq = (cos phi - alpha sin phi) e^(gamma+vphi), etc."""
    if traj.path != "path2":
        raise DomainError("trajectory was solved with route 1; use assemble_path1")
    _window_check(traj, t)
    s = traj.sample(t)
    g_qq, g_qp, g_pq, g_pp = _entries_path2(traj, t)
    return SymplecticMap(
        t=t,
        M=np.array([[g_qq, g_qp], [g_pq, g_pp]]),
        shift=np.array([s.lam, -s.Pi]),
    )


def assemble_2d(traj2d: ParamTrajectory2D, t: float) -> SymplecticMap:
    """Planar map: 2x2 blocks G_ab * R(theta) in (x, y, p_x, p_y) ordering."""
    _window_check(traj2d, t)
    rec = traj2d.sample(t)
    radial = traj2d.radial
    if radial.path == "path1":
        g_qq, g_qp, g_pq, g_pp = _entries_path1(radial, t)
    else:
        g_qq, g_qp, g_pq, g_pp = _entries_path2(radial, t)
    theta = rec["theta"]
    rot = np.array(
        [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]]
    )
    m = np.zeros((4, 4))
    m[:2, :2] = g_qq * rot
    m[:2, 2:] = g_qp * rot
    m[2:, :2] = g_pq * rot
    m[2:, 2:] = g_pp * rot
    shift = np.array([rec["lam_x"], rec["lam_y"], -rec["Pi_x"], -rec["Pi_y"]])
    return SymplecticMap(t=t, M=m, shift=shift)


def check_symplectic(smap: SymplecticMap) -> tuple[float, float]:
    """Residuals (|det M - 1|, max-norm of M^T J M - J)."""
    j = symplectic_form(smap.dof)
    det_residual = abs(float(np.linalg.det(smap.M)) - 1.0)
    form_residual = float(np.max(np.abs(smap.M.T @ j @ smap.M - j)))
    return det_residual, form_residual


def evolve_gaussian_moments(
    smap: SymplecticMap, mean: np.ndarray, cov: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Transport state moments: mean -> M mean + shift, cov -> M cov M^T."""
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    n = smap.M.shape[0]
    if mean.shape != (n,) or cov.shape != (n, n):
        raise DomainError(f"moments must have dimension {n}")
    if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-12):
        raise DomainError("covariance must be symmetric")
    eigvals = np.linalg.eigvalsh(cov)
    if np.any(eigvals <= 0.0):
        raise DomainError("covariance must be positive definite")
    return smap.M @ mean + smap.shift, smap.M @ cov @ smap.M.T


def maps_to_csv(maps: list[SymplecticMap], path: str):
    """CSV dump: t, M entries row-major, shift entries, both residuals."""
    if not maps:
        raise DomainError("no maps to write")
    n = maps[0].M.shape[0]
    m_cols = ",".join(f"m{i + 1}{j + 1}" for i in range(n) for j in range(n))
    s_cols = ",".join(f"shift{i + 1}" for i in range(n))
    lines = [f"t,{m_cols},{s_cols},det_residual,form_residual"]
    for smap in maps:
        det_r, form_r = check_symplectic(smap)
        row = [smap.t, *smap.M.ravel(), *smap.shift, det_r, form_r]
        lines.append(",".join(f"{v:.17g}" for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
