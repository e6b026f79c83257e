"""Threshold data, the admissible dilation-parameter region, and branch bookkeeping.

The transverse Laplacian of a product end contributes a threshold μ_i per
eigenvalue; every analysis downstream is organized around the branch values
Λ_i = sqrt(λ - μ_i), tied together by Λ_i² + μ_i = Λ_j² + μ_j on the covering
surface of the λ-plane.  Complex dilation parameters θ live in the region

    Γ = {θ₀ + iθ₁ : θ₀ > 0, θ₀ > |θ₁|, θ₁² < 1/2},

and the derived quantity θ' = 1/(θ+1)² sets the direction of the rotated
essential-spectrum rays.

Everything here is immutable and pure; safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EndspecError

__all__ = [
    "CrossSectionSpectrum",
    "ScalingParameter",
    "SpectralSurfacePoint",
    "make_cross_section",
    "in_gamma",
    "theta_prime",
    "surface_point",
    "branch_sqrt",
]

E_MAX_DEFAULT = 10.0


@dataclass(frozen=True)
class CrossSectionSpectrum:
    """Eigenvalues of the cross-section Laplacian with multiplicities.

    entries are (mu, multiplicity) pairs, sorted strictly increasing in mu,
    all mu >= 0, multiplicities >= 1.  The point cross-section is exactly
    [(0, 1)].
    """

    entries: tuple[tuple[float, int], ...]
    label: str = "explicit list"

    def __post_init__(self):
        if not self.entries:
            raise EndspecError("cross-section spectrum must be non-empty")
        mus = [m for m, _ in self.entries]
        if any(m < 0 for m in mus):
            raise EndspecError(f"negative cross-section eigenvalue in {mus}")
        if any(b <= a for a, b in zip(mus, mus[1:])):
            raise EndspecError(f"cross-section eigenvalues not strictly increasing: {mus}")
        if any((not isinstance(k, int)) or k < 1 for _, k in self.entries):
            raise EndspecError("multiplicities must be positive integers")

    def thresholds(self, e_max: float | None = None) -> list[float]:
        """Distinct eigenvalues, optionally cut at e_max."""
        out = [m for m, _ in self.entries]
        if e_max is not None:
            out = [m for m in out if m <= e_max]
        return out

    def modes(self, e_max: float | None = None) -> list[float]:
        """Eigenvalues repeated by multiplicity, optionally cut at e_max."""
        out = []
        for m, k in self.entries:
            if e_max is None or m <= e_max:
                out.extend([m] * k)
        return out

    def multiplicity(self, mu: float) -> int:
        for m, k in self.entries:
            if m == mu:
                return k
        return 0


def make_cross_section(kind: str, parameter=None, e_max: float = E_MAX_DEFAULT) -> CrossSectionSpectrum:
    """Spectrum of the cross-section Laplacian for stock geometries.

    kind:
        "circle"             -- radius r: mu_k = k²/r², multiplicity 1 (k=0) or 2
        "point"              -- [(0, 1)]
        "dirichlet-interval" -- length l: mu_k = (kπ/l)², k >= 1, multiplicity 1
        "list"               -- explicit [(mu, mult), ...] or [mu, ...]

    Entries are generated up to e_max (at least one entry always).
    """
    if kind == "point":
        return CrossSectionSpectrum(((0.0, 1),), label="point")
    if kind == "circle":
        r = float(parameter)
        if r <= 0:
            raise EndspecError(f"circle radius must be positive, got {r}")
        entries = [(0.0, 1)]
        k = 1
        while (k / r) ** 2 <= e_max:
            entries.append(((k / r) ** 2, 2))
            k += 1
        return CrossSectionSpectrum(tuple(entries), label=f"circle radius {r}")
    if kind == "dirichlet-interval":
        l = float(parameter)
        if l <= 0:
            raise EndspecError(f"interval length must be positive, got {l}")
        entries = []
        k = 1
        while (k * math.pi / l) ** 2 <= e_max or not entries:
            entries.append(((k * math.pi / l) ** 2, 1))
            k += 1
        return CrossSectionSpectrum(tuple(entries), label=f"interval length {l} Dirichlet")
    if kind == "list":
        entries = []
        for item in parameter:
            if isinstance(item, (tuple, list)):
                mu, mult = item
                entries.append((float(mu), int(mult)))
            else:
                entries.append((float(item), 1))
        return CrossSectionSpectrum(tuple(entries), label="explicit list")
    raise EndspecError(f"unknown cross-section kind {kind!r}")


def in_gamma(theta: complex) -> bool:
    """Membership in the admissible dilation region Γ."""
    t = complex(theta)
    return t.real > 0 and t.real > abs(t.imag) and t.imag ** 2 < 0.5


def theta_prime(theta: complex) -> complex:
    """The ray-direction factor 1/(θ+1)²."""
    t = complex(theta)
    if t == -1:
        raise EndspecError("theta = -1 is a pole of 1/(theta+1)^2")
    return 1.0 / (t + 1.0) ** 2


@dataclass(frozen=True)
class ScalingParameter:
    """Dilation parameter θ with cached θ' = 1/(θ+1)².

    The default constructor enforces θ ∈ Γ; `relaxed` admits real θ >= 0
    (the unitary regime).
    """

    theta: complex
    theta_prime: complex = field(init=False)

    def __post_init__(self):
        t = complex(self.theta)
        if not in_gamma(t):
            raise EndspecError(f"theta {t} outside the admissible region")
        object.__setattr__(self, "theta", t)
        object.__setattr__(self, "theta_prime", theta_prime(t))

    @classmethod
    def relaxed(cls, theta: complex) -> "ScalingParameter":
        t = complex(theta)
        if not (in_gamma(t) or (t.imag == 0 and t.real >= 0)):
            raise EndspecError(f"theta {t} neither in the admissible region nor real >= 0")
        obj = object.__new__(cls)
        object.__setattr__(obj, "theta", t)
        object.__setattr__(obj, "theta_prime", theta_prime(t))
        return obj


def branch_sqrt(w: complex, flag: int, approach: int | None = None) -> complex:
    """Square root of w with the branch fixed by a sheet flag.

    flag +1 picks Im > 0 (decaying exponential, physical), -1 picks Im < 0
    (second sheet).  For w on the cut [0, ∞) the imaginary part vanishes and
    `approach` (+1 from above, -1 from below in the λ-plane) must disambiguate
    the limit; flag +1 with approach +1 yields the positive real root.
    """
    w = complex(w)
    if flag not in (+1, -1):
        raise EndspecError(f"sheet flag must be +1 or -1, got {flag}")
    s = np.sqrt(complex(w))
    if s.imag == 0.0:
        if s == 0.0:
            raise EndspecError("branch point: sqrt argument is 0")
        if approach is None:
            raise EndspecError(
                "argument on the branch cut; pass approach=+1 (from above) or -1 (from below)"
            )
        # limit of sqrt(w ± i0): from above the root with Im -> 0+ is +|s|
        s = abs(s) if approach == +1 else -abs(s)
        return s if flag == +1 else -s
    if (s.imag > 0) != (flag == +1):
        s = -s
    return s


@dataclass(frozen=True)
class SpectralSurfacePoint:
    """A point λ of the spectral surface with one branch value per threshold.

    Invariant: Λ_i² + μ_i = λ for every tracked threshold, to
    1e-12·(1+|λ|).  sheet_flags records which root each Λ_i is
    (+1: Im Λ_i > 0, physical; -1: second sheet).
    """

    lam: complex
    thresholds: tuple[float, ...]
    branches: tuple[complex, ...]
    sheet_flags: tuple[int, ...]

    def __post_init__(self):
        tol = 1e-12 * (1.0 + abs(self.lam))
        for mu, L in zip(self.thresholds, self.branches):
            if abs(L * L + mu - self.lam) > tol:
                raise EndspecError(
                    f"branch consistency violated: Lambda^2 + mu - lambda = {L*L + mu - self.lam}"
                )

    @property
    def physical(self) -> bool:
        return all(f == +1 for f in self.sheet_flags)


def surface_point(
    lam: complex,
    cross_section: CrossSectionSpectrum | list[float],
    sheet_flags,
    e_max: float | None = None,
    approach: int | None = None,
) -> SpectralSurfacePoint:
    """Lift λ to the spectral surface over the tracked thresholds.

    Each Λ_i = ±sqrt(λ - μ_i), the sign fixed by sheet_flags (+1 physical,
    -1 second sheet).  λ equal to a threshold is a branch point and rejected;
    λ on a cut needs an explicit approach side.
    """
    lam = complex(lam)
    if isinstance(cross_section, CrossSectionSpectrum):
        mus = cross_section.thresholds(e_max)
    else:
        mus = [float(m) for m in cross_section]
    flags = tuple(int(f) for f in sheet_flags)
    if len(flags) != len(mus):
        raise EndspecError(f"got {len(flags)} sheet flags for {len(mus)} tracked thresholds")
    for mu in mus:
        if lam == mu:
            raise EndspecError(f"lambda = {lam} is the branch point at threshold {mu}")
    branches = tuple(branch_sqrt(lam - mu, f, approach) for mu, f in zip(mus, flags))
    return SpectralSurfacePoint(lam, tuple(mus), branches, flags)
