"""Limiting-absorption estimates certifying absolutely continuous spectrum.

For a self-adjoint H with resolvent R, boundedness of

    sup_{0<ε<1} ∫_a^b |Im⟨φ, R(x+iε)φ⟩|^p dx          (p > 1)

puts the spectral projection of φ onto (a, b) in the a.c. subspace; an
embedded eigenvalue makes the integral blow up like ε^{1-p}.  The verdicts
here are heuristic certificates at a finite ε-grid, not proofs.

Matrix elements are evaluated through the resolvent of the exterior-scaled
operator, solved directly per (x, ε).  For test vectors supported inside
the scaling radius the dilation acts as the identity on them, so the value
equals the unscaled matrix element while the essential-spectrum rays rotate
out of the way: the limit ε ↓ 0 stays well conditioned where a fixed-box
unscaled resolvent would resolve its own discrete spectrum and fake a
divergence.  Setting theta = 0 recovers the plain box resolvent (used by
the spectral-projection consistency check).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import solve_banded

from .errors import EndspecError, NumericalError
from .discretize import Grid1D
from .modes import ModeOperator
from .scaling import THETA_DEFAULT, dilate_mode
from .spectral_core import ScalingParameter

__all__ = ["LapReport", "lap_estimate"]

EPS_GRID_DEFAULT = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)


@dataclass(frozen=True)
class LapReport:
    interval: tuple[float, float]
    p: float
    epsilon_grid: tuple[float, ...]
    values: tuple[float, ...]
    sup_estimate: float
    verdict: str  # bounded | growing | inconclusive

    def __post_init__(self):
        eps = self.epsilon_grid
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise EndspecError("epsilon grid must be strictly decreasing")
        if not all(np.isfinite(self.values)):
            raise EndspecError("non-finite integral estimates")


def _mode_bands(op: ModeOperator, theta, R0: float, grid: Grid1D):
    scaled = dilate_mode(op, theta, R0)
    h = grid.h
    u = grid.points
    zp_p = scaled.contour_derivative(u + h / 2)
    zp_m = scaled.contour_derivative(u - h / 2)
    a, am = 1.0 / zp_p, 1.0 / zp_m
    w = 0.5 * (zp_p + zp_m)
    diag = (am + a) / h**2 / w + op.mode_mu + op.potential.cell_average(u, h)
    up = np.zeros(grid.n_points, dtype=complex)
    up[1:] = -a[:-1] / h**2 / w[:-1]
    lo = np.zeros(grid.n_points, dtype=complex)
    lo[:-1] = -am[1:] / h**2 / w[1:]
    return diag, up, lo, u, h, w


def lap_estimate(
    model,
    phi,
    a: float,
    b: float,
    p: float = 2.0,
    epsilon_grid=EPS_GRID_DEFAULT,
    grid: Grid1D | None = None,
    theta=THETA_DEFAULT,
    scaling_radius: float = 6.0,
    n_quad: int = 201,
    flat_tol: float = 0.02,
    growth_ratio: float = 10.0,
) -> LapReport:
    """Estimate sup_ε ∫_a^b |Im⟨φ, R(x+iε)φ⟩|^p dx over a decreasing ε-grid.

    model: list of ModeOperator (direct sum); phi: one callable per mode (or
    None for modes φ does not touch), each supported inside the scaling
    radius.  Verdict: "bounded" when the last three values agree to
    flat_tol, "growing" when last/first >= growth_ratio, else inconclusive.
    """
    if p <= 1:
        raise EndspecError("the exponent must satisfy p > 1")
    if not (np.isfinite(a) and np.isfinite(b) and a < b):
        raise EndspecError("need a bounded interval a < b")
    eps = tuple(float(e) for e in epsilon_grid)
    if any(e2 >= e1 for e1, e2 in zip(eps, eps[1:])) or not eps:
        raise EndspecError("epsilon grid must be strictly decreasing")
    if any(not (0 < e < 1) for e in eps):
        raise EndspecError("epsilon grid must lie in (0, 1)")
    if grid is None:
        grid = Grid1D(30.0, 1999)
    if not isinstance(theta, ScalingParameter):
        theta = ScalingParameter.relaxed(theta)

    phis = list(phi) if isinstance(phi, (list, tuple)) else [phi]
    if len(phis) != len(model):
        raise EndspecError("need one test-vector component (or None) per mode")

    pre = []
    for op, ph in zip(model, phis):
        if ph is None:
            continue
        diag, up, lo, u, h, w = _mode_bands(op, theta, scaling_radius, grid)
        vec = np.asarray(ph(u), dtype=complex)
        support = np.where(np.abs(vec) > 1e-14 * max(1.0, float(np.max(np.abs(vec)))))[0]
        if support.size and u[support[-1]] > scaling_radius:
            raise EndspecError(
                "test vector must be supported inside the scaling radius "
                f"(support reaches {u[support[-1]]:.3g} > {scaling_radius})"
            )
        pre.append((diag, up, lo, h, w, vec))
    if not pre:
        raise EndspecError("test vector vanishes on every mode")

    xs = np.linspace(a, b, n_quad)
    values = []
    for e in eps:
        imvals = np.zeros(n_quad)
        for diag, up, lo, h, w, vec in pre:
            ab = np.empty((3, len(diag)), dtype=complex)
            for i, x in enumerate(xs):
                z = complex(x, e)
                ab[0] = up
                ab[1] = diag - z
                ab[2] = lo
                try:
                    sol = solve_banded((1, 1), ab, vec)
                except np.linalg.LinAlgError as exc:
                    raise NumericalError(f"resolvent solve failed at {z}: {exc}") from exc
                if not np.all(np.isfinite(sol)):
                    raise NumericalError(f"resolvent solve overflowed at {z}")
                imvals[i] += (h * np.sum(w * sol * vec)).imag
        values.append(float(simpson(np.abs(imvals) ** p, x=xs)))

    sup_est = max(values)
    floor = 1e-12
    last3 = values[-3:] if len(values) >= 3 else values
    flat = (max(last3) - min(last3)) <= flat_tol * max(max(last3), floor)
    if values[0] > floor and values[-1] / values[0] >= growth_ratio:
        verdict = "growing"
    elif flat:
        verdict = "bounded"
    else:
        verdict = "inconclusive"
    return LapReport((a, b), p, eps, tuple(values), sup_est, verdict)
