"""Time-dependent Hamiltonian coefficient model.

A 1D Hamiltonian is H = a/2 p^2 + b/2 (xp+px) + c/2 x^2 + d p + e x + g with
every coefficient an arbitrary function of time; the 2D charged particle is
described by mass, magnetic field, trap stiffness and in-plane electric
field profiles.  ``reduce_2d`` maps the latter onto the shared radial 1D
oscillator of the rotating frame.

Profiles never extrapolate: evaluating a tabulated profile outside its knot
range is an error, not a guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError

__all__ = [
    "TimeProfile",
    "Constant",
    "Sinusoid",
    "Exponential",
    "Tabulated",
    "Derived",
    "evaluate",
    "profile_from_dict",
    "as_profile",
    "CoefficientSet1D",
    "FieldProfile2D",
    "reduce_2d",
]


class TimeProfile:
    """A deterministic, side-effect-free scalar function of time.

    Subclasses implement ``__call__`` and ``derivative``; both accept floats
    or numpy arrays.  ``shifted(t0)`` returns the profile re-based so that
    its new time origin sits at ``t0`` of the old clock.
    """

    def __call__(self, t):
        raise NotImplementedError

    def derivative(self, t):
        raise NotImplementedError

    def shifted(self, t0: float) -> "TimeProfile":
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(TimeProfile):
    value: float

    def __call__(self, t):
        return self.value * np.ones_like(np.asarray(t, dtype=float))

    def derivative(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def shifted(self, t0: float) -> "Constant":
        return self

    def to_dict(self) -> dict:
        return {"kind": "constant", "value": self.value}


@dataclass(frozen=True)
class Sinusoid(TimeProfile):
    """amplitude * sin(omega*t + phase) + offset."""

    amplitude: float
    omega: float
    phase: float = 0.0
    offset: float = 0.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.amplitude * np.sin(self.omega * t + self.phase) + self.offset

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        return self.amplitude * self.omega * np.cos(self.omega * t + self.phase)

    def shifted(self, t0: float) -> "Sinusoid":
        return replace(self, phase=self.phase + self.omega * t0)

    def to_dict(self) -> dict:
        return {
            "kind": "sinusoid",
            "amplitude": self.amplitude,
            "omega": self.omega,
            "phase": self.phase,
            "offset": self.offset,
        }


@dataclass(frozen=True)
class Exponential(TimeProfile):
    """prefactor * exp(rate*t)."""

    prefactor: float
    rate: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.prefactor * np.exp(self.rate * t)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        return self.prefactor * self.rate * np.exp(self.rate * t)

    def shifted(self, t0: float) -> "Exponential":
        return replace(self, prefactor=self.prefactor * math.exp(self.rate * t0))

    def to_dict(self) -> dict:
        return {"kind": "exponential", "prefactor": self.prefactor, "rate": self.rate}


@dataclass(frozen=True)
class Tabulated(TimeProfile):
    """Natural cubic spline through strictly increasing (t, value) knots."""

    knots_t: tuple[float, ...]
    knots_v: tuple[float, ...]
    _spline: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        t = np.asarray(self.knots_t, dtype=float)
        v = np.asarray(self.knots_v, dtype=float)
        if t.ndim != 1 or t.size < 2 or t.size != v.size:
            raise DomainError("tabulated profile needs at least two (t, value) knots")
        if not np.all(np.diff(t) > 0):
            raise DomainError("tabulated knots must be strictly increasing in t")
        object.__setattr__(self, "_spline", CubicSpline(t, v, bc_type="natural"))

    def _check_range(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.knots_t[0], self.knots_t[-1]
        if np.any(t < lo) or np.any(t > hi):
            raise DomainError(
                f"time outside tabulated range [{lo}, {hi}]; extrapolation is refused"
            )
        return t

    def __call__(self, t):
        return self._spline(self._check_range(t))

    def derivative(self, t):
        return self._spline(self._check_range(t), 1)

    def shifted(self, t0: float) -> "Tabulated":
        return Tabulated(
            knots_t=tuple(tk - t0 for tk in self.knots_t), knots_v=self.knots_v
        )

    def to_dict(self) -> dict:
        return {
            "kind": "tabulated",
            "knots": [[tk, vk] for tk, vk in zip(self.knots_t, self.knots_v)],
        }


@dataclass(frozen=True)
class Derived(TimeProfile):
    """Profile defined by callables; produced by reductions, not JSON configs."""

    fn: Callable
    dfn: Callable
    label: str = "derived"

    def __call__(self, t):
        return self.fn(np.asarray(t, dtype=float))

    def derivative(self, t):
        return self.dfn(np.asarray(t, dtype=float))

    def shifted(self, t0: float) -> "Derived":
        fn, dfn = self.fn, self.dfn
        return Derived(
            fn=lambda t: fn(np.asarray(t, dtype=float) + t0),
            dfn=lambda t: dfn(np.asarray(t, dtype=float) + t0),
            label=self.label,
        )

    def to_dict(self) -> dict:
        raise DomainError("derived profiles are not serializable")


def evaluate(profile: TimeProfile, t: float) -> float:
    """Value of a profile at time t (module-level form of profile(t))."""
    return float(profile(t))


def as_profile(value) -> TimeProfile:
    """Coerce a plain number to a Constant; pass profiles through."""
    if isinstance(value, TimeProfile):
        return value
    return Constant(float(value))


def profile_from_dict(spec: dict) -> TimeProfile:
    """Build a profile from its JSON form; rejects unknown kinds and keys."""
    if not isinstance(spec, dict):
        raise DomainError(f"profile spec must be an object, got {type(spec).__name__}")
    kind = spec.get("kind")
    allowed = {
        "constant": {"kind", "value"},
        "sinusoid": {"kind", "amplitude", "omega", "phase", "offset"},
        "exponential": {"kind", "prefactor", "rate"},
        "tabulated": {"kind", "knots"},
    }
    if kind not in allowed:
        raise DomainError(f"unknown profile kind {kind!r}")
    extra = set(spec) - allowed[kind]
    if extra:
        raise DomainError(f"unknown profile keys {sorted(extra)} for kind {kind!r}")
    if kind == "constant":
        return Constant(float(spec["value"]))
    if kind == "sinusoid":
        return Sinusoid(
            amplitude=float(spec["amplitude"]),
            omega=float(spec["omega"]),
            phase=float(spec.get("phase", 0.0)),
            offset=float(spec.get("offset", 0.0)),
        )
    if kind == "exponential":
        return Exponential(prefactor=float(spec["prefactor"]), rate=float(spec["rate"]))
    knots = spec["knots"]
    return Tabulated(
        knots_t=tuple(float(k[0]) for k in knots),
        knots_v=tuple(float(k[1]) for k in knots),
    )


@dataclass(frozen=True)
class CoefficientSet1D:
    """Coefficients of H = a/2 p^2 + b/2 (xp+px) + c/2 x^2 + d p + e x + g.

    Units: a in 1/mass, b in 1/time, c in mass/time^2, d in velocity,
    e in force, g in energy.  a(t) must stay positive on the working
    interval; solvers check this on their probe grid.
    """

    a: TimeProfile
    b: TimeProfile
    c: TimeProfile
    d: TimeProfile
    e: TimeProfile
    g: TimeProfile
    hbar: float = 1.0

    def __post_init__(self):
        if self.hbar <= 0:
            raise DomainError("hbar must be positive")

    @staticmethod
    def build(a=1.0, b=0.0, c=0.0, d=0.0, e=0.0, g=0.0, hbar=1.0) -> "CoefficientSet1D":
        return CoefficientSet1D(
            a=as_profile(a), b=as_profile(b), c=as_profile(c),
            d=as_profile(d), e=as_profile(e), g=as_profile(g), hbar=hbar,
        )

    def shifted(self, t0: float) -> "CoefficientSet1D":
        return CoefficientSet1D(
            a=self.a.shifted(t0), b=self.b.shifted(t0), c=self.c.shifted(t0),
            d=self.d.shifted(t0), e=self.e.shifted(t0), g=self.g.shifted(t0),
            hbar=self.hbar,
        )


@dataclass(frozen=True)
class FieldProfile2D:
    """Planar charged particle: mass, magnetic field, stiffness, electric field.

    The Hamiltonian in the symmetric gauge expands to
    H = (p_x^2+p_y^2)/2m + (K + q^2 B^2/4m)(x^2+y^2)/2 + (qB/2m) L_z
        + q E_x x + q E_y y
    with q the particle charge.
    """

    m: TimeProfile
    B: TimeProfile
    K: TimeProfile
    Ex: TimeProfile
    Ey: TimeProfile
    charge: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.hbar <= 0:
            raise DomainError("hbar must be positive")

    @staticmethod
    def build(m=1.0, B=0.0, K=0.0, Ex=0.0, Ey=0.0, charge=1.0, hbar=1.0) -> "FieldProfile2D":
        return FieldProfile2D(
            m=as_profile(m), B=as_profile(B), K=as_profile(K),
            Ex=as_profile(Ex), Ey=as_profile(Ey), charge=charge, hbar=hbar,
        )

    def shifted(self, t0: float) -> "FieldProfile2D":
        return FieldProfile2D(
            m=self.m.shifted(t0), B=self.B.shifted(t0), K=self.K.shifted(t0),
            Ex=self.Ex.shifted(t0), Ey=self.Ey.shifted(t0),
            charge=self.charge, hbar=self.hbar,
        )


def reduce_2d(profile: FieldProfile2D) -> tuple[CoefficientSet1D, Derived]:
    """Rotating-frame reduction of the planar particle.

    Returns the shared radial oscillator a = 1/m, b = 0,
    c = K + q^2 B^2 / 4m, d = e = g = 0 together with the rotation rate
    theta_dot = q B / 2m.  The rotation removes the angular-momentum cross
    term, so the reduced b is identically zero.
    """
    q = profile.charge
    m, B, K = profile.m, profile.B, profile.K

    def a_fn(t):
        return 1.0 / m(t)

    def a_dfn(t):
        mt = m(t)
        return -m.derivative(t) / (mt * mt)

    def c_fn(t):
        return K(t) + q * q * B(t) ** 2 / (4.0 * m(t))

    def c_dfn(t):
        mt = m(t)
        bt = B(t)
        return (
            K.derivative(t)
            + q * q * (2.0 * bt * B.derivative(t) * mt - bt * bt * m.derivative(t))
            / (4.0 * mt * mt)
        )

    def theta_rate_fn(t):
        return q * B(t) / (2.0 * m(t))

    def theta_rate_dfn(t):
        mt = m(t)
        return q * (B.derivative(t) * mt - B(t) * m.derivative(t)) / (2.0 * mt * mt)

    coeffs = CoefficientSet1D(
        a=Derived(a_fn, a_dfn, label="1/m"),
        b=Constant(0.0),
        c=Derived(c_fn, c_dfn, label="K + q^2 B^2/4m"),
        d=Constant(0.0),
        e=Constant(0.0),
        g=Constant(0.0),
        hbar=profile.hbar,
    )
    theta_rate = Derived(theta_rate_fn, theta_rate_dfn, label="q B/2m")
    return coeffs, theta_rate
