"""Exterior complex scaling of mode operators and essential-spectrum rays.

The dilation acts only outside a radius R₀ that contains the potential:
u ↦ u on [0, R₀] and u ↦ R₀ + (θ+1)(u - R₀) beyond, with amplitude factor
(θ+1)^{1/2}.  Along the deformed contour the operator reads

    -d²/du² + μ + V(u)        on [0, R₀],
    -θ' d²/du² + μ            on (R₀, ∞),          θ' = 1/(θ+1)²,

joined by: function continuous at R₀, one-sided derivative scaled by (1+θ)
on the exterior side (equivalently, continuity of the flux (1/z')ψ').  The
essential spectrum of the scaled operator is a union of rays
threshold + θ'[0, ∞); everything off those rays that is θ-stable is a
resonance or a bound state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import EndspecError
from .modes import ModeOperator
from .spectral_core import ScalingParameter, in_gamma

__all__ = [
    "ScaledModeOperator",
    "RaySet",
    "dilate_mode",
    "essential_rays",
    "distance_to_rays",
    "apply_dilation",
    "THETA_DEFAULT",
    "THETA_SWEEP_DEFAULT",
]

THETA_DEFAULT = 0.4 + 0.3j
THETA_SWEEP_DEFAULT = (0.35 + 0.25j, 0.4 + 0.3j, 0.45 + 0.35j, 0.5 + 0.3j, 0.4 + 0.35j)


@dataclass(frozen=True)
class ScaledModeOperator:
    """A mode operator scaled outside scaling_radius.

    For real θ the operator is unitarily equivalent to the base; for θ in the
    admissible region its essential spectrum rotates to μ + θ'[0, ∞).
    """

    base: ModeOperator
    theta: ScalingParameter
    scaling_radius: float

    def __post_init__(self):
        if self.base.kind != "cylindrical":
            raise EndspecError(
                "only cylindrical mode operators are scaled directly; "
                "pass cusp operators through cusp_to_schrodinger first"
            )
        if self.scaling_radius < 0:
            raise EndspecError("scaling radius must be >= 0")
        if self.base.potential.support_radius > self.scaling_radius:
            raise EndspecError(
                f"potential support {self.base.potential.support_radius} exceeds "
                f"scaling radius {self.scaling_radius}; the potential would need "
                "analytic continuation"
            )

    def contour(self, u):
        """z(u): identity inside, R₀ + (1+θ)(u-R₀) outside."""
        u = np.asarray(u, dtype=float)
        R0, t = self.scaling_radius, self.theta.theta
        return np.where(u <= R0, u.astype(complex), R0 + (1 + t) * (u - R0))

    def contour_derivative(self, u):
        u = np.asarray(u, dtype=float)
        return np.where(u <= self.scaling_radius, 1.0 + 0j, 1.0 + self.theta.theta)

    def second_order_coefficient(self, u):
        """Coefficient of -d²/du²: 1 inside, θ' outside."""
        u = np.asarray(u, dtype=float)
        return np.where(u <= self.scaling_radius, 1.0 + 0j, self.theta.theta_prime)


def dilate_mode(op: ModeOperator, theta, R0: float) -> ScaledModeOperator:
    """Exterior scaling of a cylindrical mode operator beyond R0.

    theta may be a ScalingParameter, a point of the admissible region, or a
    real number >= 0 (unitary regime).
    """
    if not isinstance(theta, ScalingParameter):
        theta = ScalingParameter.relaxed(theta)
    return ScaledModeOperator(op, theta, float(R0))


@dataclass(frozen=True)
class RaySet:
    """Half-lines origin + direction·[0, ∞), one per generating threshold."""

    origins: tuple[complex, ...]
    direction: complex
    sources: tuple[str, ...]

    def __post_init__(self):
        if len(self.origins) == 0:
            raise EndspecError("a ray set needs at least one origin")
        if len(self.sources) != len(self.origins):
            raise EndspecError("one source label per ray origin required")
        if abs(abs(self.direction) - 1.0) > 1e-12:
            raise EndspecError("ray direction must be a unit complex number")


def essential_rays(thresholds, theta) -> RaySet:
    """Predicted essential spectrum: one ray per threshold in direction θ'.

    thresholds: iterable of values or (value, label) pairs — cross-section
    eigenvalues and/or channel point-spectrum entries.
    """
    if not isinstance(theta, ScalingParameter):
        theta = ScalingParameter.relaxed(theta)
    origins, labels = [], []
    for item in thresholds:
        if isinstance(item, tuple):
            v, lab = item
        else:
            v, lab = item, f"threshold {item}"
        origins.append(complex(v))
        labels.append(str(lab))
    if not origins:
        raise EndspecError("empty threshold list")
    d = theta.theta_prime / abs(theta.theta_prime)
    return RaySet(tuple(origins), d, tuple(labels))


def distance_to_rays(z, rays: RaySet):
    """Euclidean distance from z (scalar or array) to the union of half-lines."""
    zs = np.asarray(z, dtype=complex)
    scalar = zs.ndim == 0
    w = np.atleast_1d(zs)[..., None] - np.asarray(rays.origins)
    t = np.maximum(0.0, (w * np.conj(rays.direction)).real)
    dist = np.abs(w - t * rays.direction).min(axis=-1)
    return float(dist[0]) if scalar else dist


def apply_dilation(u_grid, f_samples, theta: float, R0: float, L_target: float | None = None):
    """Numerically dilate a sampled function (real θ >= 0, unitary regime).

    Returns (u_out, samples) on the portion of the grid with
    u <= L_target; the input grid must extend beyond R0 + (1+θ)(L_target-R0)
    so that the stretched argument stays interpolable.  Smooth (cubic)
    interpolation keeps the L² norm to quadrature accuracy.
    """
    theta = float(theta)
    if theta < 0:
        raise EndspecError("apply_dilation is for the unitary regime theta >= 0")
    u = np.asarray(u_grid, dtype=float)
    f = np.asarray(f_samples)
    if u.ndim != 1 or u.shape != f.shape:
        raise EndspecError("need matching 1D grid and sample arrays")
    if L_target is None:
        L_target = u[-1] / (1 + theta) + R0 * theta / (1 + theta)
    needed = R0 + (1 + theta) * (L_target - R0)
    if u[-1] < needed - 1e-12:
        raise EndspecError(
            f"grid too short: need samples up to {needed:.6g}, have {u[-1]:.6g}"
        )
    spline = CubicSpline(u, f)
    mask = u <= L_target
    uo = u[mask]
    stretched = R0 + (1 + theta) * (uo - R0)
    out = np.where(uo <= R0, f[mask], np.sqrt(1 + theta) * spline(np.minimum(stretched, u[-1])))
    return uo, out
