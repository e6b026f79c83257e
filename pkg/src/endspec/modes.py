"""Transverse-mode reduction of the model Laplacians to 1D operators.

Cylindrical end: the Laplacian on Y × R₊ splits over an eigenbasis of the
cross-section into half-line operators -d²/du² + μ_i (+ a compactly
supported perturbation modelling the core), Dirichlet at u = 0.

Cusp end (metric (du² + g_Y)/u², volume weight u^{-n} du): the radial part
that is symmetric with respect to that weight is

    -u² d²/du² + (n-2) u d/du + u² μ_j   on (0, ∞),

and the substitution u = e^t combined with the unitary
L²(u^{-n}du) → L²(dt) brings it to the normal form

    -d²/dt² + (n-1)²/4 + μ_j e^{2t}      on the line.

The first-order coefficient and weight must be paired this way for the
operator to be symmetric; n-2 is what the metric produces, and it gives the
familiar bottom (n-1)²/4 (1/4 for a surface cusp).  All spectral routines
use the normal form; the u-variable form with its u^{-n} weight is hostile
to naive finite differences.

A warped-product generator supplies genuinely geometric mode potentials:
for a surface of revolution du² + f(u)² dφ² with f ≡ r beyond R_V, the
mode-k operator is unitarily -d²/du² + k²/r² + V_k with

    V_k = k²/f² - k²/r² + f''/(2f) - f'²/(4f²).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import EndspecError
from .potentials import RadialPotential, zero_potential
from .spectral_core import CrossSectionSpectrum, E_MAX_DEFAULT

__all__ = [
    "ModeOperator",
    "LineOperator",
    "reduce_cylindrical",
    "reduce_cusp",
    "cusp_to_schrodinger",
    "warped_product_potential",
    "WarpedProfile",
    "bump_profile",
]


@dataclass(frozen=True)
class ModeOperator:
    """One transverse mode of a model Laplacian.

    kind "cylindrical": -d²/du² + mode_mu + V(u) on [0, ∞), Dirichlet at 0.
    kind "cusp": the radial cusp operator for transverse eigenvalue mode_mu
    in dimension dimension_n, acting on (0, ∞) against the weight u^{-n}du.
    """

    kind: str
    mode_mu: float
    potential: RadialPotential = zero_potential
    dimension_n: int | None = None
    boundary: str = "dirichlet"

    def __post_init__(self):
        if self.kind not in ("cylindrical", "cusp"):
            raise EndspecError(f"unknown mode-operator kind {self.kind!r}")
        if self.mode_mu < 0:
            raise EndspecError("transverse eigenvalue must be >= 0")
        if self.kind == "cusp":
            if self.dimension_n is None or self.dimension_n < 2:
                raise EndspecError("cusp operators need dimension n >= 2")
            if not self.potential.is_zero:
                raise EndspecError("cusp mode operators carry no radial potential")
        if self.boundary != "dirichlet":
            raise EndspecError("only Dirichlet boundary conditions are supported")
        if not np.isfinite(self.potential.support_radius):
            raise EndspecError("potential must have compact support")


@dataclass(frozen=True)
class LineOperator:
    """-d²/dt² + constant + mu e^{2t} on the whole line (cusp normal form)."""

    constant: float
    mu: float
    dimension_n: int

    def potential(self, t):
        t = np.asarray(t, dtype=float)
        return self.constant + self.mu * np.exp(2.0 * t)

    @property
    def threshold(self) -> float:
        """Bottom of the essential spectrum contributed by the free (t -> -∞) side."""
        return self.constant


def reduce_cylindrical(
    cross_section: CrossSectionSpectrum,
    potentials: Mapping[int, RadialPotential] | None = None,
    e_max: float = E_MAX_DEFAULT,
) -> list[ModeOperator]:
    """One ModeOperator per (μ_i, multiplicity copy) with μ_i <= e_max.

    `potentials` maps the index of the distinct threshold (0 for the lowest)
    to its radial perturbation; unmapped modes are free.
    """
    potentials = dict(potentials or {})
    for idx, pot in potentials.items():
        if not np.isfinite(pot.support_radius):
            raise EndspecError(f"potential for mode {idx} must have compact support")
    ops = []
    for idx, mu in enumerate(cross_section.thresholds(e_max)):
        pot = potentials.get(idx, zero_potential)
        for _ in range(cross_section.multiplicity(mu)):
            ops.append(ModeOperator("cylindrical", mu, pot))
    unknown = set(potentials) - set(range(len(cross_section.thresholds(e_max))))
    if unknown:
        raise EndspecError(f"potential map refers to untracked modes {sorted(unknown)}")
    return ops


def reduce_cusp(cross_section: CrossSectionSpectrum, n: int, e_max: float = E_MAX_DEFAULT) -> list[ModeOperator]:
    """Cusp mode operators, one per (μ_j, multiplicity copy) with μ_j <= e_max."""
    if n < 2:
        raise EndspecError(f"cusp dimension must be >= 2, got {n}")
    return [ModeOperator("cusp", mu, dimension_n=n) for mu in cross_section.modes(e_max)]


def cusp_to_schrodinger(op: ModeOperator) -> LineOperator:
    """Unitary normal form of a cusp mode operator.

    u = e^t together with the weight u^{-n}du of the cusp volume turns the
    radial operator into -d²/dt² + (n-1)²/4 + μ e^{2t} on L²(R, dt); the
    spectra agree.  For μ > 0 the e^{2t} term confines toward the cusp
    (t → +∞); the free side (t → -∞) contributes essential spectrum from
    (n-1)²/4 up.
    """
    if op.kind != "cusp":
        raise EndspecError("cusp_to_schrodinger needs a cusp mode operator")
    n = op.dimension_n
    return LineOperator(constant=(n - 1) ** 2 / 4.0, mu=op.mode_mu, dimension_n=n)


@dataclass(frozen=True)
class WarpedProfile:
    """Profile f > 0 of a surface of revolution, constant (= radius) beyond R_V."""

    f: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray]
    ddf: Callable[[np.ndarray], np.ndarray]
    radius: float
    support_radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise EndspecError("asymptotic radius must be positive")
        probe = np.linspace(0, self.support_radius + 2, 512)
        vals = self.f(probe)
        if np.any(vals <= 0):
            raise EndspecError("profile must be strictly positive")
        beyond = probe[probe > self.support_radius]
        if beyond.size and (
            np.max(np.abs(self.f(beyond) - self.radius)) > 1e-13
            or np.max(np.abs(self.df(beyond))) > 1e-13
        ):
            raise EndspecError("profile must be constant beyond its support radius")


def bump_profile(radius: float, amplitude: float, left: float, right: float) -> WarpedProfile:
    """f = radius + amplitude * bump on [left, right]; exact derivatives supplied."""
    if not (0 <= left < right):
        raise EndspecError("need 0 <= left < right")
    a, b, amp, r = float(left), float(right), float(amplitude), float(radius)
    w = b - a

    def _pieces(u):
        t = (np.asarray(u, dtype=float) - a) / w
        m = (t > 0) & (t < 1)
        return t, m

    def f(u):
        t, m = _pieces(u)
        out = np.full_like(t, r)
        tm = t[m]
        out[m] = r + amp * np.exp(-1.0 / (tm * (1 - tm)))
        return out

    def df(u):
        t, m = _pieces(u)
        out = np.zeros_like(t)
        tm = t[m]
        g = tm * (1 - tm)
        out[m] = amp * np.exp(-1.0 / g) * (1 - 2 * tm) / g**2 / w
        return out

    def ddf(u):
        t, m = _pieces(u)
        out = np.zeros_like(t)
        tm = t[m]
        g = tm * (1 - tm)
        gp = 1 - 2 * tm
        # d/dt [e^{-1/g} gp/g^2] = e^{-1/g} (gp^2/g^4 - 2/g - 2 gp^2/g^3) ... done termwise
        out[m] = amp * np.exp(-1.0 / g) * (gp**2 / g**4 - 2.0 / g**2 - 2.0 * gp**2 / g**3) / w**2
        return out

    return WarpedProfile(f, df, ddf, radius=r, support_radius=b)


def warped_product_potential(profile: WarpedProfile, k: int) -> RadialPotential:
    """Mode-k potential of the warped product du² + f(u)²dφ².

    V_k(u) = k²/f² - k²/r² + f''/(2f) - f'²/(4f²), compactly supported in
    [0, R_V]; the full mode operator is -d²/du² + k²/r² + V_k.
    """
    k = int(k)
    r = profile.radius

    def ev(u):
        u = np.asarray(u, dtype=float)
        fv, dv, ddv = profile.f(u), profile.df(u), profile.ddf(u)
        return k**2 / fv**2 - k**2 / r**2 + ddv / (2 * fv) - dv**2 / (4 * fv**2)

    return RadialPotential(ev, profile.support_radius, "continuous",
                           label=f"warped mode {k}")
