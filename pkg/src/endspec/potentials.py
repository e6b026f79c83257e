"""Compactly supported radial potentials modelling the compact core.

A RadialPotential is a function on [0, ∞) vanishing beyond its support
radius.  Piecewise-constant potentials carry their breakpoint data so that
discretizations can use exact cell averages (this is what makes Richardson
extrapolation clean across a potential jump) and so that the transfer-matrix
oracles can consume them exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import EndspecError

__all__ = [
    "RadialPotential",
    "zero_potential",
    "square_well",
    "barrier",
    "smooth_bump",
    "tabulated",
]


@dataclass(frozen=True)
class RadialPotential:
    """Real potential on the half-line, zero beyond support_radius.

    pieces, when present, lists (a, b, value) intervals that tile the
    support of a piecewise-constant potential.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    support_radius: float
    smoothness_class: str = "continuous"  # or "piecewise-constant"
    label: str = ""
    pieces: tuple[tuple[float, float, float], ...] | None = None

    def __post_init__(self):
        if self.support_radius < 0:
            raise EndspecError("support radius must be >= 0")
        if self.smoothness_class not in ("continuous", "piecewise-constant"):
            raise EndspecError(f"unknown smoothness class {self.smoothness_class!r}")
        if self.support_radius > 0 and np.isfinite(self.support_radius):
            probe = np.linspace(self.support_radius * 1.0001, self.support_radius * 3 + 1, 97)
            if np.max(np.abs(self.evaluator(probe))) > 0:
                raise EndspecError("evaluator does not vanish beyond the declared support radius")

    def __call__(self, u):
        return self.evaluator(np.asarray(u, dtype=float))

    @property
    def is_zero(self) -> bool:
        return self.support_radius == 0.0

    def cell_average(self, u: np.ndarray, h: float) -> np.ndarray:
        """Average of V over cells [u-h/2, u+h/2].

        Exact for piecewise-constant potentials; midpoint value otherwise
        (second-order accurate for smooth V).
        """
        u = np.asarray(u, dtype=float)
        if self.pieces is None:
            return self.evaluator(u)
        out = np.zeros_like(u)
        lo, hi = u - h / 2, u + h / 2
        for a, b, v in self.pieces:
            overlap = np.maximum(0.0, np.minimum(hi, b) - np.maximum(lo, a))
            out += v * overlap / h
        return out

    @property
    def breakpoints(self) -> tuple[float, ...]:
        if self.pieces is None:
            return ()
        pts = set()
        for a, b, _ in self.pieces:
            pts.add(a)
            pts.add(b)
        return tuple(sorted(pts))


def _zero(u):
    return np.zeros_like(np.asarray(u, dtype=float))


zero_potential = RadialPotential(_zero, 0.0, "continuous", label="zero")


def square_well(depth: float, width: float) -> RadialPotential:
    """-depth on [0, width), zero beyond."""
    if width <= 0:
        raise EndspecError("well width must be positive")
    d, w = float(depth), float(width)

    def ev(u):
        u = np.asarray(u, dtype=float)
        return np.where((u >= 0) & (u < w), -d, 0.0)

    return RadialPotential(ev, w, "piecewise-constant",
                           label=f"well depth {d} width {w}", pieces=((0.0, w, -d),))


def barrier(height: float, left: float, right: float) -> RadialPotential:
    """+height on [left, right), zero elsewhere."""
    if not (0 <= left < right):
        raise EndspecError("need 0 <= left < right")
    hgt, a, b = float(height), float(left), float(right)

    def ev(u):
        u = np.asarray(u, dtype=float)
        return np.where((u >= a) & (u < b), hgt, 0.0)

    return RadialPotential(ev, b, "piecewise-constant",
                           label=f"barrier height {hgt} on [{a},{b})", pieces=((a, b, hgt),))


def _bump(t):
    """C^∞ bump exp(-1/(t(1-t))) on (0,1), zero outside."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    m = (t > 0) & (t < 1)
    tm = t[m]
    out[m] = np.exp(-1.0 / (tm * (1.0 - tm)))
    return out


def smooth_bump(amplitude: float, left: float, right: float) -> RadialPotential:
    """Smooth compactly supported bump: amplitude * e^4 * exp(-1/(t(1-t))) rescaled to [left,right].

    The e^4 factor normalizes the peak value to `amplitude`.
    """
    if not (0 <= left < right):
        raise EndspecError("need 0 <= left < right")
    amp, a, b = float(amplitude), float(left), float(right)
    peak = np.exp(4.0)

    def ev(u):
        u = np.asarray(u, dtype=float)
        return amp * peak * _bump((u - a) / (b - a))

    return RadialPotential(ev, b, "continuous", label=f"bump {amp} on [{a},{b}]")


def tabulated(u_samples, v_samples=None, support_radius: float | None = None) -> RadialPotential:
    """Potential from samples with cubic interpolation, clamped to 0 beyond the last node.

    Accepts either two arrays or a path to a two-column text file
    (u and value per line, strictly increasing u).
    """
    if v_samples is None:
        data = np.loadtxt(u_samples)
        if data.ndim != 2 or data.shape[1] != 2:
            raise EndspecError("tabulated potential file must have two columns: u value")
        u_samples, v_samples = data[:, 0], data[:, 1]
    u_arr = np.asarray(u_samples, dtype=float)
    v_arr = np.asarray(v_samples, dtype=float)
    if u_arr.ndim != 1 or u_arr.shape != v_arr.shape or len(u_arr) < 4:
        raise EndspecError("need matching 1D sample arrays with at least 4 points")
    if np.any(np.diff(u_arr) <= 0):
        raise EndspecError("sample grid must be strictly increasing")
    if u_arr[0] < 0:
        raise EndspecError("sample grid must start at u >= 0")
    spline = CubicSpline(u_arr, v_arr)
    R = float(support_radius if support_radius is not None else u_arr[-1])

    def ev(u):
        u = np.asarray(u, dtype=float)
        out = np.where((u >= u_arr[0]) & (u <= min(u_arr[-1], R)), spline(u), 0.0)
        return np.where(u > R, 0.0, out)

    return RadialPotential(ev, R, "continuous", label="tabulated")
