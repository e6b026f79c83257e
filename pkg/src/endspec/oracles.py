"""Independent oracles: transfer-matrix roots and weighted Sturm-Liouville spectra.

For a piecewise-constant potential on the half-line with a Dirichlet wall at
0, the solution (ψ, ψ') with ψ(0)=0, ψ'(0)=1 propagates through each
constant region by an entire transfer matrix (cos, sin(kd)/k entries are
even in k, hence branch-free).  Matching to a purely outgoing wave at the
support edge,

    F(λ) = ψ'(R) - i sqrt(λ) ψ(R),

with the principal square root, vanishes exactly at bound states (λ < 0, the
root i√|λ| gives decay) and at second-sheet resonances (Im λ < 0).  These
roots certify the eigenvalue machinery but share none of its code.

The weighted Sturm-Liouville helpers discretize radial operators against
their natural volume weights (cusp u^{-n} du on an exponential grid, warped
f du) and serve as the independent side for the unitary normal forms.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .errors import EndspecError, NumericalError
from .potentials import RadialPotential

__all__ = [
    "PiecewiseModel",
    "outgoing_mismatch",
    "oracle_bound_states",
    "oracle_resonances",
    "cusp_radial_bottom",
    "cusp_radial_eigs",
    "warped_radial_eigs",
]


@dataclass(frozen=True)
class PiecewiseModel:
    """Constant-potential regions (a, b, V) tiling [0, R]; V = 0 beyond R."""

    regions: tuple[tuple[float, float, float], ...]
    mu: float = 0.0

    @classmethod
    def from_potential(cls, pot: RadialPotential, mu: float = 0.0) -> "PiecewiseModel":
        if pot.pieces is None:
            raise EndspecError("oracle needs a piecewise-constant potential")
        pts = sorted({0.0, *[p for piece in pot.pieces for p in piece[:2]]})
        regions = []
        for a, b in zip(pts, pts[1:]):
            mid = 0.5 * (a + b)
            v = sum(val for (x, y, val) in pot.pieces if x <= mid < y)
            regions.append((a, b, v))
        return cls(tuple(regions), mu)

    @property
    def edge(self) -> float:
        return self.regions[-1][1] if self.regions else 0.0


def _propagate(lam: complex, model: PiecewiseModel):
    psi, dpsi = 0.0 + 0j, 1.0 + 0j
    for a, b, V in model.regions:
        d = b - a
        k2 = lam - V - model.mu
        k = cmath.sqrt(k2)
        if abs(k) * d < 1e-8:
            c, s, ks = 1.0 + 0j, complex(d), k2 * d  # k·sin(kd) = k²·d + O((kd)³)
        else:
            c = cmath.cos(k * d)
            s = cmath.sin(k * d) / k
            ks = -k * cmath.sin(k * d)
        psi, dpsi = c * psi + s * dpsi, ks * psi + c * dpsi
    return psi, dpsi


def outgoing_mismatch(lam: complex, model: PiecewiseModel) -> complex:
    """F(λ): zero iff λ is a bound state or a resonance of the model."""
    psi, dpsi = _propagate(lam, model)
    k = cmath.sqrt(complex(lam) - model.mu)
    return dpsi - 1j * k * psi


def oracle_bound_states(model: PiecewiseModel, xtol: float = 1e-14) -> list[float]:
    """All bound states below the threshold, by bisection on the real mismatch."""
    vmin = min((v for _, _, v in model.regions), default=0.0)
    if vmin >= 0:
        return []
    lo, hi = model.mu + vmin + 1e-12, model.mu - 1e-12

    def f(E):
        val = outgoing_mismatch(E, model)
        return val.real

    grid = np.linspace(lo, hi, 4001)
    vals = np.array([f(E) for E in grid])
    roots = []
    for i in range(len(grid) - 1):
        if np.sign(vals[i]) != np.sign(vals[i + 1]):
            roots.append(brentq(f, grid[i], grid[i + 1], xtol=xtol))
    return roots


def _newton_root(lam0: complex, model: PiecewiseModel, tol: float, maxit: int = 80):
    lam = complex(lam0)
    for _ in range(maxit):
        f = outgoing_mismatch(lam, model)
        dh = 1e-7 * (1.0 + abs(lam))
        df = (outgoing_mismatch(lam + dh, model) - outgoing_mismatch(lam - dh, model)) / (2 * dh)
        if df == 0:
            return None
        step = f / df
        lam -= step
        if abs(step) <= tol * (1.0 + abs(lam)):
            return lam
    return None


def oracle_resonances(
    model: PiecewiseModel,
    re_range: tuple[float, float],
    im_range: tuple[float, float] = (-1.5, -1e-3),
    nx: int = 120,
    ny: int = 60,
    tol: float = 1e-13,
) -> list[complex]:
    """Second-sheet roots of the outgoing mismatch inside a rectangle.

    Grid scan for local minima of |F| followed by Newton polish; duplicates
    and escapes outside the (slightly enlarged) rectangle are dropped.
    """
    if im_range[0] >= 0 or im_range[1] > 0:
        raise EndspecError("resonance rectangle must lie in the open lower half-plane")
    xs = np.linspace(re_range[0], re_range[1], nx)
    ys = np.linspace(im_range[0], im_range[1], ny)
    absF = np.empty((ny, nx))
    for i, y in enumerate(ys):
        for j, x in enumerate(xs):
            absF[i, j] = abs(outgoing_mismatch(complex(x, y), model))
    roots: list[complex] = []
    med = float(np.median(absF))
    for i in range(ny):
        for j in range(nx):
            w = absF[max(0, i - 1): i + 2, max(0, j - 1): j + 2]
            if absF[i, j] != w.min() or absF[i, j] >= med:
                continue
            r = _newton_root(complex(xs[j], ys[i]), model, tol)
            if r is None:
                continue
            if not (re_range[0] - 0.5 <= r.real <= re_range[1] + 0.5 and
                    im_range[0] - 0.5 <= r.imag < 0):
                continue
            if abs(outgoing_mismatch(r, model)) > 1e-8:
                continue
            if all(abs(r - q) > 1e-8 * (1 + abs(q)) for q in roots):
                roots.append(r)
    return sorted(roots, key=lambda z: z.real)


def cusp_radial_eigs(n_dim: int, mu: float, t_window: tuple[float, float], n_points: int,
                     n_eigs: int = 6) -> np.ndarray:
    """Lowest eigenvalues of the radial cusp operator against u^{-n} du.

    Discretized in Sturm-Liouville flux form on the exponential grid u = e^t
    (Dirichlet at the window ends): with p = u^{2-n} and exact cell volumes
    of the weight u^{-n} du, the operator (1/w)(-(p f')') + u²μ is the radial
    part of the cusp Laplacian, symmetric against w du.  Assembled as the
    similarity-transformed symmetric tridiagonal matrix.
    """
    if n_dim < 2:
        raise EndspecError("cusp dimension must be >= 2")
    t0, t1 = t_window
    if t1 <= t0:
        raise EndspecError("empty t-window")
    ht = (t1 - t0) / (n_points + 1)
    t = t0 + ht * np.arange(1, n_points + 1)
    u = np.exp(t)
    uf_p = np.exp(t + ht / 2)   # cell faces
    uf_m = np.exp(t - ht / 2)
    p_p = uf_p ** (2 - n_dim)
    p_m = uf_m ** (2 - n_dim)
    du_p = np.exp(t + ht) - u   # spacing to the next node (ghost at the end)
    du_m = u - np.exp(t - ht)
    if n_dim == 1:  # pragma: no cover - guarded by the n>=2 check
        dV = np.log(uf_p / uf_m)
    else:
        dV = (uf_m ** (1 - n_dim) - uf_p ** (1 - n_dim)) / (n_dim - 1)
    diag = (p_p / du_p + p_m / du_m) / dV + mu * u**2
    off = -(p_p[:-1] / du_p[:-1]) / np.sqrt(dV[:-1] * dV[1:])
    vals = eigh_tridiagonal(diag, off, select="i", select_range=(0, n_eigs - 1))[0]
    return vals


def cusp_radial_bottom(n_dim: int, mu: float, t_window=(-15.0, 15.0), n_points: int = 2000) -> float:
    return float(cusp_radial_eigs(n_dim, mu, t_window, n_points, n_eigs=1)[0])


def warped_radial_eigs(profile, k: int, L: float, n_points: int, n_eigs: int = 4) -> np.ndarray:
    """Lowest eigenvalues of the unconjugated warped mode operator.

    -(1/f)(f ψ')' + k²/f² against the weight f du on [0, L], Dirichlet ends;
    the independent side for the Liouville normal form -d²/du² + k²/r² + V_k.
    """
    u = np.linspace(0.0, L, n_points + 2)[1:-1]
    h = u[1] - u[0]
    f_mid_p = profile.f(u + h / 2)
    f_mid_m = profile.f(u - h / 2)
    fv = profile.f(u)
    dV = fv * h
    diag = (f_mid_p + f_mid_m) / h / dV + k**2 / fv**2
    off = -(f_mid_p[:-1] / h) / np.sqrt(dV[:-1] * dV[1:])
    vals = eigh_tridiagonal(diag, off, select="i", select_range=(0, n_eigs - 1))[0]
    return vals
