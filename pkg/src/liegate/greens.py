"""Gaussian propagator kernels and their application to grid wavefunctions.

A kernel is stored as a complex quadratic form over final coordinates x and
initial coordinates x',

    G(x, x') = prefactor * exp(i * [ x.Qxx.x + x'.Qx'x'.x' + x.Qxx'.x'
                                     + Lx.x + Lx'.x' + scal ]),

together with its validity window (0, t_caustic).  The coefficient formulas
come from the factorized evolution operator for each route; the prefactor
modulus is the square-root-of-beta type expression and its phase is the
principal branch continued from t -> 0+, which is what makes the kernel a
delta sequence and application norm-preserving (the corresponding real
prefactor convention differs by a constant phase only).

Application is plain trapezoid quadrature; grid adequacy is the caller's
job and is diagnosed by the unitarity residual.
"""

from __future__ import annotations

import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CausticError, DomainError
from .oracle import WaveGrid, _trapezoid_weights
from .paramflow import ParamTrajectory, ParamTrajectory2D

__all__ = [
    "GaussianKernel",
    "kernel_build",
    "kernel_apply",
    "kernel_unitarity_residual",
    "WaveGrid",
    "wavegrid_to_csv",
    "wavegrid_from_csv",
    "wavegrid_to_binary",
    "wavegrid_from_binary",
]

_VARIANTS = ("lp", "path1", "path2", "twod_path1", "twod_path2")


@dataclass(frozen=True)
class GaussianKernel:
    """Complex quadratic-form propagator G(x, t; x', 0)."""

    dof: int
    t: float
    prefactor: complex
    qxx: np.ndarray
    qx1x1: np.ndarray
    qxx1: np.ndarray
    lx: np.ndarray
    lx1: np.ndarray
    scal: complex
    valid_to: float
    hbar: float

    def __post_init__(self):
        n = self.dof
        for name in ("qxx", "qx1x1", "qxx1"):
            arr = np.asarray(getattr(self, name), dtype=complex).reshape(n, n)
            object.__setattr__(self, name, arr)
        for name in ("lx", "lx1"):
            arr = np.asarray(getattr(self, name), dtype=complex).reshape(n)
            object.__setattr__(self, name, arr)
        self._validate()

    def _validate(self):
        values = [self.prefactor, self.scal, *self.qxx.ravel(),
                  *self.qx1x1.ravel(), *self.qxx1.ravel(), *self.lx, *self.lx1]
        if not all(np.isfinite(v) for v in values):
            raise DomainError("kernel coefficients are not finite")
        quad = np.block([[self.qxx, self.qxx1 / 2.0],
                         [self.qxx1.T / 2.0, self.qx1x1]])
        imag = np.imag(quad)
        if np.max(np.abs(imag)) <= 1e-12 * max(1.0, np.max(np.abs(quad))):
            if abs(np.linalg.det(self.qxx1)) == 0.0:
                raise DomainError(
                    "kernel is not delta-convergent: real exponent with a "
                    "singular cross block"
                )
        else:
            if np.any(np.linalg.eigvalsh(imag) < 0.0):
                raise DomainError(
                    "kernel is not delta-convergent: imaginary part of the "
                    "exponent is not positive semidefinite"
                )

    def evaluate(self, x, xp) -> np.ndarray:
        """Pointwise values; x and xp broadcast against each other.

        For dof=1, x and xp are arrays of coordinates.  For dof=2 they must
        carry the coordinate pair in the last axis.
        """
        if self.dof == 1:
            x = np.asarray(x, dtype=float)
            xp = np.asarray(xp, dtype=float)
            exponent = (
                self.qxx[0, 0] * x * x
                + self.qx1x1[0, 0] * xp * xp
                + self.qxx1[0, 0] * x * xp
                + self.lx[0] * x + self.lx1[0] * xp + self.scal
            )
            return self.prefactor * np.exp(1j * exponent)
        x = np.asarray(x, dtype=float)
        xp = np.asarray(xp, dtype=float)
        exponent = (
            np.einsum("...i,ij,...j->...", x, self.qxx, x)
            + np.einsum("...i,ij,...j->...", xp, self.qx1x1, xp)
            + np.einsum("...i,ij,...j->...", x, self.qxx1, xp)
            + x @ self.lx + xp @ self.lx1 + self.scal
        )
        return self.prefactor * np.exp(1j * exponent)

    def as_dict(self) -> dict:
        def c(z):
            z = complex(z)
            return [z.real, z.imag]

        def carr(a):
            return [[c(v) for v in row] for row in np.atleast_2d(a)]

        return {
            "dof": self.dof,
            "t": self.t,
            "hbar": self.hbar,
            "valid_to": self.valid_to if math.isfinite(self.valid_to) else None,
            "prefactor": c(self.prefactor),
            "qxx": carr(self.qxx),
            "qx1x1": carr(self.qx1x1),
            "qxx1": carr(self.qxx1),
            "lx": [c(v) for v in self.lx],
            "lx1": [c(v) for v in self.lx1],
            "scal": c(self.scal),
        }


def _sqrt_principal(z: complex) -> complex:
    return complex(np.sqrt(complex(z)))


def _coeffs_path1(s, delta: float, hbar: float) -> tuple[float, float, float, complex]:
    # Exponent blocks of the route-1 propagator:
    #   A = Delta e^(-2 gamma) (e^(-2 phi)/beta - alpha) / (2 hbar)   on (x-lam)^2
    #   B = Delta / (2 hbar beta)                                     on x'^2
    #   C = -Delta e^(-phi-gamma) / (hbar beta)                       on (x-lam) x'
    # prefactor sqrt(Delta/(2 pi i hbar beta)) e^(-(phi+gamma)/2).
    egam = math.exp(s.gamma)
    ephi = math.exp(s.phi)
    a_coef = delta * (math.exp(-2.0 * s.phi) / s.beta - s.alpha) / (
        2.0 * hbar * egam * egam
    )
    b_coef = delta / (2.0 * hbar * s.beta)
    c_coef = -delta / (hbar * s.beta * ephi * egam)
    pref = _sqrt_principal(delta / (2.0j * math.pi * hbar * s.beta)) / math.sqrt(
        ephi * egam
    )
    return a_coef, b_coef, c_coef, pref


def _coeffs_path2(s, delta: float, hbar: float) -> tuple[float, float, float, complex]:
    # Exponent functions of the route-2 propagator, written through
    #   D = beta cos(phi) - alpha beta sin(phi) + e^(-2 vphi) sin(phi)
    # which keeps them finite at beta = 0 (the short-circuit case):
    #   w = Delta e^(-2 gamma) (D cos(phi) - beta) / (2 hbar D sin(phi))
    #   u = Delta (cos(phi) - alpha sin(phi)) / (2 hbar D)
    #   q = -Delta e^(-(gamma+vphi)) / (hbar D)
    # prefactor e^(-(gamma+vphi)/2) sqrt(Delta/(2 pi i hbar D)).
    cph, sph = math.cos(s.phi), math.sin(s.phi)
    e2v = math.exp(-2.0 * s.vphi)
    dd = s.beta * cph - s.alpha * s.beta * sph + e2v * sph
    if dd == 0.0 or sph == 0.0:
        raise CausticError("route-2 kernel is singular at this time")
    w_fn = math.exp(-2.0 * s.gamma) * delta * (dd * cph - s.beta) / (
        2.0 * hbar * dd * sph
    )
    u_fn = delta * (cph - s.alpha * sph) / (2.0 * hbar * dd)
    q_fn = -delta * math.exp(-(s.gamma + s.vphi)) / (hbar * dd)
    pref = math.exp(-0.5 * (s.gamma + s.vphi)) * _sqrt_principal(
        delta / (2.0j * math.pi * hbar * dd)
    )
    return w_fn, u_fn, q_fn, pref


def _coeffs_lp(s, hbar: float) -> tuple[float, float, float, complex]:
    # Linear-potential propagator: exponent (x - x' - lam)^2 / (2 hbar beta)
    # with beta = int(a); the companion solution v carries exactly that
    # integral when b = c = 0.
    beta = s.v
    a_coef = 1.0 / (2.0 * hbar * beta)
    return a_coef, a_coef, -2.0 * a_coef, _sqrt_principal(
        1.0 / (2.0j * math.pi * hbar * beta)
    )


def _assemble_1d(a, b, c, pref, lam, pi, s_action, hbar, t, valid_to) -> GaussianKernel:
    lx = -2.0 * a * lam - pi / hbar
    lx1 = -c * lam
    scal = a * lam * lam + pi * lam / hbar - s_action / hbar
    return GaussianKernel(
        dof=1, t=t, prefactor=pref,
        qxx=np.array([[a]]), qx1x1=np.array([[b]]), qxx1=np.array([[c]]),
        lx=np.array([lx]), lx1=np.array([lx1]), scal=scal,
        valid_to=valid_to, hbar=hbar,
    )


def _assemble_2d(a, b, c, pref, rec, hbar, t, valid_to) -> GaussianKernel:
    theta = rec["theta"]
    rot = np.array(
        [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]]
    )
    lam = np.array([rec["lam_x"], rec["lam_y"]])
    pi = np.array([rec["Pi_x"], rec["Pi_y"]])
    eye = np.eye(2)
    qxx = a * eye
    qx1x1 = b * eye
    qxx1 = c * rot
    lx = -2.0 * a * lam - pi / hbar
    lx1 = -c * rot.T @ lam
    scal = a * lam @ lam + pi @ lam / hbar - rec["S"] / hbar
    return GaussianKernel(
        dof=2, t=t, prefactor=pref * pref,
        qxx=qxx, qx1x1=qx1x1, qxx1=qxx1, lx=lx, lx1=lx1, scal=scal,
        valid_to=valid_to, hbar=hbar,
    )


def _check_lp_shape(traj: ParamTrajectory):
    probe = np.linspace(0.0, traj.t_end, 65)
    b = np.asarray(traj.coeffs.b(probe), dtype=float)
    c = np.asarray(traj.coeffs.c(probe), dtype=float)
    if np.max(np.abs(b)) > 1e-14 or np.max(np.abs(c)) > 1e-14:
        raise DomainError(
            "variant 'lp' requires b(t) == 0 and c(t) == 0; "
            "use variant 'path1' for the general quadratic Hamiltonian"
        )


def kernel_build(
    traj: ParamTrajectory | ParamTrajectory2D, t: float, variant: str
) -> GaussianKernel:
    """Build the propagator kernel at time t from a solved trajectory.

    variant is one of 'lp', 'path1', 'path2', 'twod_path1', 'twod_path2'
    and must be consistent with the trajectory.  t must lie strictly inside
    (0, caustic time): at t = 0 the propagator is a delta, not a Gaussian,
    and at the focal time its prefactor diverges.
    """
    key = variant.lower()
    if key not in _VARIANTS:
        raise DomainError(f"unknown kernel variant {variant!r}; choose from {_VARIANTS}")
    if t <= 0.0:
        raise DomainError("t must be positive: the t=0 kernel is a delta")
    if t >= traj.valid_to:
        raise CausticError(
            f"t={t} is at or beyond the focal time valid_to={traj.valid_to}; "
            "the kernel prefactor is singular there",
            valid_to=traj.valid_to,
        )

    if key in ("lp", "path1", "path2"):
        if not isinstance(traj, ParamTrajectory):
            raise DomainError(f"variant {variant!r} needs a 1D trajectory")
        expected = "path2" if key == "path2" else "path1"
        if traj.path != expected:
            raise DomainError(
                f"variant {variant!r} needs a route '{expected}' trajectory, "
                f"got {traj.path!r}"
            )
        s = traj.sample(t)
        hbar = traj.hbar
        if key == "lp":
            _check_lp_shape(traj)
            a, b, c, pref = _coeffs_lp(s, hbar)
        elif key == "path1":
            a, b, c, pref = _coeffs_path1(s, traj.Delta, hbar)
        else:
            a, b, c, pref = _coeffs_path2(s, traj.Delta, hbar)
        return _assemble_1d(a, b, c, pref, s.lam, s.Pi, s.S, hbar, t, traj.valid_to)

    if not isinstance(traj, ParamTrajectory2D):
        raise DomainError(f"variant {variant!r} needs a planar trajectory")
    expected = "path1" if key == "twod_path1" else "path2"
    if traj.radial.path != expected:
        raise DomainError(
            f"variant {variant!r} needs a radial route '{expected}' trajectory, "
            f"got {traj.radial.path!r}"
        )
    rec = traj.sample(t)
    radial_sample = rec["radial"]
    hbar = traj.hbar
    if expected == "path1":
        a, b, c, pref = _coeffs_path1(radial_sample, traj.radial.Delta, hbar)
    else:
        a, b, c, pref = _coeffs_path2(radial_sample, traj.radial.Delta, hbar)
    return _assemble_2d(a, b, c, pref, rec, hbar, t, traj.valid_to)


def _thread_count() -> int:
    raw = os.environ.get("LIEGATE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def kernel_apply(kernel: GaussianKernel, psi0: WaveGrid) -> WaveGrid:
    """psi(x) = integral G(x, x') psi0(x') dx' by trapezoid quadrature.

    The output lives on the same grid as the input; each output point is a
    fixed-order sum, so results do not depend on chunking or thread count.
    """
    if kernel.dof != psi0.dof:
        raise DomainError(
            f"kernel dof={kernel.dof} does not match grid dof={psi0.dof}"
        )
    x = psi0.x
    w = _trapezoid_weights(psi0.n)
    if kernel.dof == 1:
        weighted = (w * psi0.amps) * psi0.dx
        out = np.empty(psi0.n, dtype=complex)
        chunk = max(1, (1 << 21) // psi0.n)
        for start in range(0, psi0.n, chunk):
            stop = min(start + chunk, psi0.n)
            block = kernel.evaluate(x[start:stop, None], x[None, :])
            out[start:stop] = block @ weighted
        return WaveGrid(psi0.n, psi0.x_min, psi0.dx, out, psi0.hbar)

    n = psi0.n
    ww = np.outer(w, w)
    weighted = (ww * psi0.amps).ravel() * psi0.dx**2
    xv, yv = np.meshgrid(x, x, indexing="ij")
    pts_in = np.column_stack([xv.ravel(), yv.ravel()])
    out = np.empty(n * n, dtype=complex)

    def fill(rows: range):
        for i in rows:
            pts_out = np.column_stack([np.full(n, x[i]), x])
            block = kernel.evaluate(pts_out[:, None, :], pts_in[None, :, :])
            out[i * n:(i + 1) * n] = block @ weighted

    threads = _thread_count()
    if threads == 1:
        fill(range(n))
    else:
        ranges = [range(k, n, threads) for k in range(threads)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, ranges))
    return WaveGrid(n, psi0.x_min, psi0.dx, out.reshape(n, n), psi0.hbar)


def kernel_unitarity_residual(kernel: GaussianKernel, grid: WaveGrid) -> float:
    """| ||G psi|| - ||psi|| | / ||psi|| for the provided test state."""
    norm_in = grid.norm()
    if norm_in == 0.0:
        raise DomainError("unitarity residual undefined for the zero state")
    norm_out = kernel_apply(kernel, grid).norm()
    return abs(norm_out - norm_in) / norm_in


def wavegrid_to_csv(grid: WaveGrid, path: str):
    """Write a 1D grid as CSV rows x, Re psi, Im psi."""
    if grid.dof != 1:
        raise DomainError("CSV grid format is one-dimensional")
    lines = ["x,re,im"]
    for xv, amp in zip(grid.x, grid.amps):
        lines.append(f"{xv:.17g},{amp.real:.17g},{amp.imag:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def wavegrid_from_csv(path: str, hbar: float = 1.0) -> WaveGrid:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    if data.ndim != 2 or data.shape[1] != 3 or data.shape[0] < 2:
        raise DomainError("grid CSV must have columns x,re,im and at least two rows")
    x = data[:, 0]
    steps = np.diff(x)
    if not np.allclose(steps, steps[0], rtol=1e-12, atol=1e-12):
        raise DomainError("grid CSV must be uniformly spaced")
    amps = data[:, 1] + 1j * data[:, 2]
    return WaveGrid(len(x), float(x[0]), float(steps[0]), amps, hbar)


def wavegrid_to_binary(grid: WaveGrid, path: str):
    """Raw little-endian layout: n, x_min, dx as float64, then Re/Im pairs."""
    if grid.dof != 1:
        raise DomainError("binary grid format is one-dimensional")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<3d", float(grid.n), grid.x_min, grid.dx))
        interleaved = np.empty(2 * grid.n)
        interleaved[0::2] = grid.amps.real
        interleaved[1::2] = grid.amps.imag
        fh.write(interleaved.astype("<f8").tobytes())


def wavegrid_from_binary(path: str, hbar: float = 1.0) -> WaveGrid:
    with open(path, "rb") as fh:
        header = fh.read(24)
        if len(header) != 24:
            raise DomainError("binary grid file truncated")
        n_f, x_min, dx = struct.unpack("<3d", header)
        n = int(n_f)
        raw = fh.read()
    if n < 1 or len(raw) != 16 * n:
        raise DomainError("binary grid payload does not match its header")
    body = np.frombuffer(raw, dtype="<f8")
    amps = body[0::2] + 1j * body[1::2]
    return WaveGrid(n, x_min, dx, amps, hbar)
