"""Glued-kernel approximate resolvent, its residual, pole search, and
matrix-element continuation.

The model manifold splits into a core (the region carrying the potential,
[0, R_core] in the per-mode picture) and a product end.  The approximate
resolvent glues two exactly known resolvents with smooth cutoffs in the end
coordinate e = u - R_core:

    S(λ) = Ψ₁ R₁(λ) Φ₁ + Ψ₂ R₂(λ) Φ₂,
    Φ₁ = 1 - ρ(4/5, 1),  Ψ₁ = 1 - ρ(2/5, 3/5),  Φ₂ = ρ(0, 1/5),  Ψ₂ = 1 - Ψ₁,

ρ(a, b) the normalized-bump smooth step (0 on the core and for e <= a, 1 for
e >= b), so that Ψ₁+Ψ₂ = 1, Φ_j = 1 on supp Ψ_j, and the cutoff-gradient
zones stay 1/5 away from the Ψ supports.  R₁ is the resolvent of the core
doubled across its end boundary (an interval with Dirichlet ends and the
potential evenly reflected — a compact model, hence an entire-in-λ
eigendecomposition); R₂ is the explicit half-line kernel

    R₂(Λ; e, e') = (i/2Λ)(e^{iΛ|e-e'|} - e^{iΛ(e+e')}),

entire in Λ ≠ 0 across both sheets, which is what carries the continuation.

The residual G(Λ) = S(Λ)(Δ - λ) - Id is compact (here: rapidly decaying
singular values over the resolved range); poles of the continued resolvent
sit where Id + G(Λ) is singular.  The pole-search objective uses the
commutator form G = Σ_j Ψ_j R_j (Φ_j'' + 2 Φ_j' ∂), whose columns vanish
outside the cutoff-transition zone, so det(Id+G) reduces to the determinant
of the zone-restricted block (Weinstein-Aronszajn) — a small matrix.

Matrix elements ⟨R(λ)f, g⟩ for dilation-analytic f, g continue through
⟨R(λ, θ) U_θ f, U_θ g⟩ in the contour pairing; inside the left half-plane
the two sides agree, beyond it the right side defines the continuation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.linalg import eigh_tridiagonal, solve_banded, svdvals
from scipy.optimize import minimize

from .errors import EndspecError, NumericalError
from .discretize import DiscretizedOperator, Grid1D, discretize
from .modes import ModeOperator
from .potentials import RadialPotential, zero_potential
from .scaling import ScaledModeOperator, dilate_mode
from .spectral_core import ScalingParameter, SpectralSurfacePoint, branch_sqrt, surface_point

__all__ = [
    "CutoffFamily",
    "WeightedSpaceParam",
    "CoreModel",
    "free_mode_kernel",
    "weighted_norm",
    "cutoff_eval",
    "assemble_parametrix",
    "residual_G",
    "residual_norm_report",
    "parametrix_grid",
    "pole_search",
    "AnalyticVector",
    "continue_matrix_element",
]

# ---------------------------------------------------------------------------
# smooth step from the normalized bump integral

_NT = 2**17 + 1
_ts = np.linspace(0.0, 1.0, _NT)


def _bump_raw(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    m = (t > 0) & (t < 1)
    tm = t[m]
    out[m] = np.exp(-1.0 / (tm * (1.0 - tm)))
    return out


_bv = _bump_raw(_ts)
_BUMP_MASS = float(np.trapezoid(_bv, _ts))
_STEP_TABLE = cumulative_trapezoid(_bv, _ts, initial=0.0) / _BUMP_MASS


def _step(t):
    """C^∞ step: 0 for t<=0, 1 for t>=1, strictly increasing between."""
    t = np.asarray(t, dtype=float)
    return np.interp(np.clip(t, 0.0, 1.0), _ts, _STEP_TABLE)


def _step_d(t):
    return _bump_raw(t) / _BUMP_MASS


def _step_dd(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    m = (t > 0) & (t < 1)
    tm = t[m]
    g = tm * (1.0 - tm)
    out[m] = np.exp(-1.0 / g) * (1.0 - 2.0 * tm) / g**2 / _BUMP_MASS
    return out


@dataclass(frozen=True)
class WeightedSpaceParam:
    """Exponential weight e^{2δu}; δ > 0 gives the scale L²_δ ⊂ L² ⊂ L²_{-δ}."""

    delta: float

    def __post_init__(self):
        if self.delta <= 0:
            raise EndspecError("weight exponent must be positive")


@dataclass(frozen=True)
class CutoffFamily:
    """The four cutoffs in end coordinates, offset by the core radius.

    Points with u < core_radius belong to the core: every ρ(a, b) vanishes
    there, so Φ₁ = Ψ₁ = 1 and Φ₂ = Ψ₂ = 0 on the core.
    """

    core_radius: float = 0.0

    def _e(self, u):
        return np.asarray(u, dtype=float) - self.core_radius

    def rho(self, a: float, b: float, u):
        if not 0 <= a < b:
            raise EndspecError("need 0 <= a < b for the step bounds")
        return _step((self._e(u) - a) / (b - a))

    def phi1(self, u):
        return 1.0 - self.rho(0.8, 1.0, u)

    def psi1(self, u):
        return 1.0 - self.rho(0.4, 0.6, u)

    def phi2(self, u):
        return self.rho(0.0, 0.2, u)

    def psi2(self, u):
        return 1.0 - self.psi1(u)

    # exact derivatives of the Φ's (used by the commutator form)
    def phi1_d(self, u):
        return -_step_d((self._e(u) - 0.8) / 0.2) / 0.2

    def phi1_dd(self, u):
        return -_step_dd((self._e(u) - 0.8) / 0.2) / 0.04

    def phi2_d(self, u):
        return _step_d(self._e(u) / 0.2) / 0.2

    def phi2_dd(self, u):
        return _step_dd(self._e(u) / 0.2) / 0.04

    @property
    def zone(self) -> tuple[float, float]:
        """Global interval containing supp Φ₁' ∪ supp Φ₂'."""
        return self.core_radius, self.core_radius + 1.0


def cutoff_eval(family: CutoffFamily, which: str, point) -> np.ndarray | float:
    """Evaluate one of the four cutoffs at a point (or array) of the model.

    `point` is either the string "core" or a radial coordinate u >= 0.
    """
    if isinstance(point, str):
        if point != "core":
            raise EndspecError(f"unknown symbolic point {point!r}")
        # any point of the core works: the steps vanish for u <= core_radius
        u = np.array(max(0.0, family.core_radius / 2))
    else:
        u = np.asarray(point, dtype=float)
        if np.any(u < 0):
            raise EndspecError("radial coordinate must be >= 0")
    table = {
        "phi1": family.phi1, "Phi1": family.phi1, "Φ1": family.phi1, "Φ₁": family.phi1,
        "psi1": family.psi1, "Psi1": family.psi1, "Ψ1": family.psi1, "Ψ₁": family.psi1,
        "phi2": family.phi2, "Phi2": family.phi2, "Φ2": family.phi2, "Φ₂": family.phi2,
        "psi2": family.psi2, "Psi2": family.psi2, "Ψ2": family.psi2, "Ψ₂": family.psi2,
    }
    try:
        fn = table[which]
    except KeyError:
        raise EndspecError(f"unknown cutoff {which!r}") from None
    out = fn(u)
    return float(out) if np.isscalar(point) or (hasattr(point, "ndim") and getattr(point, "ndim", 1) == 0) else out


def free_mode_kernel(Lambda: complex, u, v) -> np.ndarray | complex:
    """Dirichlet half-line Green kernel of (-d²/du² - Λ²).

    (i/2Λ)(e^{iΛ|u-v|} - e^{iΛ(u+v)}); entire in Λ ≠ 0 across sheets, which
    is what continues the resolvent.  Accepts scalars or arrays (outer
    combination when both are 1D arrays).
    """
    Lam = complex(Lambda)
    if Lam == 0:
        raise EndspecError("Λ = 0 is the threshold branch point")
    u_arr = np.asarray(u, dtype=float)
    v_arr = np.asarray(v, dtype=float)
    scalar = u_arr.ndim == 0 and v_arr.ndim == 0
    if u_arr.ndim == 1 and v_arr.ndim == 1:
        u_arr = u_arr[:, None]
        v_arr = v_arr[None, :]
    out = (1j / (2 * Lam)) * (np.exp(1j * Lam * np.abs(u_arr - v_arr))
                              - np.exp(1j * Lam * (u_arr + v_arr)))
    return complex(out) if scalar else out


def weighted_norm(u_grid, f_samples, delta: float, cross_section_factor: float = 1.0) -> float:
    """Quadrature of ∫ e^{2δu} |f|² du (times a cross-section factor).

    Monotone increasing in δ.  Divergent tails are detected: if the last 10%
    of the grid contributes more than 1e-6 of the total, the quadrature has
    not converged and a NumericalError is raised.
    """
    u = np.asarray(u_grid, dtype=float)
    f = np.asarray(f_samples)
    if u.ndim != 1 or u.shape != f.shape:
        raise EndspecError("need matching 1D arrays")
    integrand = np.exp(2.0 * delta * u) * np.abs(f) ** 2
    total = float(np.trapezoid(integrand, u))
    k = max(2, int(0.1 * len(u)))
    tail = float(np.trapezoid(integrand[-k:], u[-k:]))
    if total > 0 and tail > 1e-6 * total:
        raise NumericalError(
            f"weighted-norm quadrature not converged: tail fraction {tail/total:.2e}"
        )
    return total * cross_section_factor


# ---------------------------------------------------------------------------
# core model: the doubled compact piece and its discrete eigendecomposition


@dataclass
class CoreModel:
    """Compact double of the core region with an evenly reflected potential.

    The interval [0, 2·core_radius] with Dirichlet ends agrees with the
    half-line model operator near u = 0 (including the boundary condition)
    and is compact, so its resolvent is globally defined through the
    eigendecomposition computed here.  Requires the potential to vanish on
    [core_radius - 1, core_radius] so that the reflection stays consistent
    with the free end across the cutoff zone.
    """

    potential: RadialPotential = zero_potential
    mode_mu: float = 0.0
    core_radius: float = 1.5
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.core_radius <= 1.0:
            raise EndspecError("core radius must exceed the unit cutoff zone")
        if self.potential.support_radius > self.core_radius - 1.0:
            raise EndspecError(
                "potential must vanish on the outer unit collar of the core "
                f"(support {self.potential.support_radius} > {self.core_radius - 1})"
            )

    @property
    def cutoffs(self) -> CutoffFamily:
        return CutoffFamily(self.core_radius)

    def double_eig(self, h: float):
        """Eigendecomposition of the doubled operator at step h (cached)."""
        key = round(h, 15)
        if key not in self._cache:
            m = int(round(2 * self.core_radius / h)) - 1
            if abs(m + 1 - 2 * self.core_radius / h) > 1e-9:
                raise EndspecError("grid step must divide the doubled core length")
            ud = h * np.arange(1, m + 1)
            ur = np.where(ud <= self.core_radius, ud, 2 * self.core_radius - ud)
            V = self.potential.cell_average(ur, h) + self.mode_mu
            vals, vecs = eigh_tridiagonal(2.0 / h**2 + V, -np.ones(m - 1) / h**2)
            self._cache[key] = (ud, vals, vecs)
        return self._cache[key]

    def resolvent_block(self, lam: complex, h: float, rows: np.ndarray, cols: np.ndarray):
        """Entries of (A_double - λ)^{-1} on given node-index blocks."""
        ud, vals, vecs = self.double_eig(h)
        if np.min(np.abs(vals - lam)) < 1e-8:
            raise NumericalError(
                f"λ = {lam} within 1e-8 of a doubled-core eigenvalue; R₁ singular"
            )
        w = 1.0 / (vals - lam)
        return (vecs[rows, :] * w) @ vecs[cols, :].T


def parametrix_grid(core_model: CoreModel, n_points: int, L_target: float = 8.0) -> Grid1D:
    """Grid with the requested point count whose step divides the doubled core.

    The kernels decay away from the core, so the exact truncation length is
    immaterial; it is nudged so that the half-line nodes contain the doubled
    core's nodes verbatim.
    """
    h_raw = L_target / (n_points + 1)
    m = max(1, round(2 * core_model.core_radius / h_raw))
    h = 2 * core_model.core_radius / m
    return Grid1D(h * (n_points + 1), n_points)


def _surface_branch(point: SpectralSurfacePoint, mu: float) -> complex:
    for m, L in zip(point.thresholds, point.branches):
        if m == mu:
            return L
    raise EndspecError(f"surface point does not track threshold {mu}")


def assemble_parametrix(point: SpectralSurfacePoint, core_model: CoreModel,
                        grid: Grid1D) -> DiscretizedOperator:
    """Matrix of the glued approximate resolvent S on the truncated grid.

    S = Ψ₁ R₁ Φ₁ + Ψ₂ R₂ Φ₂ with R₁ the discrete doubled-core resolvent and
    R₂ the explicit end kernel at the branch value of the model's threshold.
    """
    lam = point.lam
    mu = core_model.mode_mu
    Lam = _surface_branch(point, mu)
    h = grid.h
    u = grid.points
    n = grid.n_points
    fam = core_model.cutoffs
    Rc = core_model.core_radius

    ud, _, _ = core_model.double_eig(h)
    k = min(n, len(ud))
    # double nodes coincide with the first k half-line nodes (same step)
    if k < 2 or abs(ud[0] - u[0]) > 1e-12:
        raise EndspecError("parametrix grid must share its step with the doubled core")
    idx = np.arange(k)
    R1 = np.zeros((n, n), dtype=complex)
    R1[np.ix_(idx, idx)] = core_model.resolvent_block(lam, h, idx, idx)

    e = u - Rc
    mask = e > 0
    K2 = np.zeros((n, n), dtype=complex)
    K2[np.ix_(mask, mask)] = free_mode_kernel(Lam, e[mask], e[mask]) * h

    S = (fam.psi1(u)[:, None] * R1) * fam.phi1(u)[None, :] \
        + (fam.psi2(u)[:, None] * K2) * fam.phi2(u)[None, :]
    tag = f"parametrix lam={lam} Lam={Lam} Rc={Rc}"
    return DiscretizedOperator(S, grid, tag, weights=np.ones(n), points=u)


def residual_G(point: SpectralSurfacePoint, core_model: CoreModel,
               grid: Grid1D) -> DiscretizedOperator:
    """G = S(Δ - λ) - Id, literally as matrices.

    The final row/column of the product carries an O(1/h) artifact of the
    Dirichlet truncation (the kernel's diagonal does not decay), so norm and
    singular-value reporting should trim it; see `residual_norm_report`.
    """
    S = assemble_parametrix(point, core_model, grid)
    op = ModeOperator("cylindrical", core_model.mode_mu, core_model.potential)
    A = discretize(op, grid).matrix
    G = S.matrix @ (A - point.lam * np.eye(grid.n_points)) - np.eye(grid.n_points)
    return DiscretizedOperator(G, grid, f"residual {S.operator_tag}",
                               weights=S.weights, points=S.points)


def residual_norm_report(point: SpectralSurfacePoint, core_model: CoreModel, grid: Grid1D):
    """(‖G‖₂, singular values) with the truncation row/column trimmed."""
    G = residual_G(point, core_model, grid).matrix[:-1, :-1]
    sv = svdvals(G)
    return float(sv[0]), sv


def _zone_residual(lam: complex, Lam: complex, core_model: CoreModel, h: float,
                   pad: int = 3):
    """Commutator-form residual on the cutoff zone: columns vanish elsewhere.

    G = Σ_j Ψ_j R_j (Φ_j'' + 2 Φ_j' ∂) restricted to the zone block; its
    determinant against the identity equals det(Id + G) on the whole grid.
    """
    fam = core_model.cutoffs
    Rc = core_model.core_radius
    n_zone = int(round(1.0 / h))
    i0 = int(round(Rc / h)) - pad
    idx = np.arange(i0, i0 + n_zone + 2 * pad)  # node indices (1-based grid: u = h*(idx+1))
    u = h * (idx + 1)
    m = len(idx)

    D = np.zeros((m, m))
    for i in range(1, m - 1):
        D[i, i - 1] = -1.0 / (2 * h)
        D[i, i + 1] = 1.0 / (2 * h)
    comm1 = np.diag(fam.phi1_dd(u)) + 2.0 * np.diag(fam.phi1_d(u)) @ D
    comm2 = np.diag(fam.phi2_dd(u)) + 2.0 * np.diag(fam.phi2_d(u)) @ D

    R1 = core_model.resolvent_block(lam, h, idx, idx)
    e = u - Rc
    epos = np.maximum(e, 1e-300)  # kernel is only used where Ψ₂/Φ₂ ≠ 0 (e > 0)
    K2 = free_mode_kernel(Lam, epos, epos) * h
    G = (fam.psi1(u)[:, None] * (R1 @ comm1)) + (fam.psi2(u)[:, None] * (K2 @ comm2))
    return G


def _zone_objective(lam: complex, sheet_flags, core_model: CoreModel, h: float,
                    approach: int | None = None) -> float:
    point = surface_point(lam, [core_model.mode_mu], sheet_flags, approach=approach)
    Lam = point.branches[0]
    G = _zone_residual(lam, Lam, core_model, h)
    s = np.linalg.svd(np.eye(G.shape[0]) + G, compute_uv=False)
    return float(s[-1])


def _refine_zero(seed: complex, bounds, sheet_flags, core_model: CoreModel, h: float,
                 approach, refine_tol: float):
    """Nelder-Mead on the zone objective, penalized outside the rectangle."""
    (x0, x1), (y0, y1) = bounds

    def fun(p):
        xc = min(max(p[0], x0), x1)
        yc = min(max(p[1], y0), y1)
        pen = abs(p[0] - xc) + abs(p[1] - yc)
        return _zone_objective(complex(xc, yc), sheet_flags, core_model, h, approach) + 10.0 * pen

    res = minimize(fun, [seed.real, seed.imag], method="Nelder-Mead",
                   options=dict(xatol=refine_tol * 1e-2, fatol=1e-16, maxiter=400))
    z = complex(min(max(res.x[0], x0), x1), min(max(res.x[1], y0), y1))
    return z, float(res.fun)


def pole_search(
    sheet_flags,
    rectangle: tuple[complex, complex],
    core_model: CoreModel,
    grid: Grid1D,
    nx: int = 25,
    ny: int = 13,
    refine_tol: float = 1e-6,
    objective_tol: float = 1e-7,
    threshold_margin: float = 1e-3,
    gluing_stability_tol: float = 1e-4,
) -> list[complex]:
    """Zeros of λ ↦ σ_min(Id + G(Λ(λ))) inside a rectangle of one sheet.

    Grid scan for local minima, Nelder-Mead refinement to `refine_tol`,
    acceptance only when the refined objective drops below `objective_tol`
    (poles reach ~1e-12; the background sits orders of magnitude higher).

    det(Id+G) also vanishes at points tied to the spectrum of the doubled
    core — artifacts of the gluing, at which the continued resolvent itself
    is regular (the pole of the glued kernel cancels).  True poles do not
    move when the core radius does, so every candidate is re-located with
    the core doubled at a shifted radius and kept only if it reproduces
    within `gluing_stability_tol`.

    A zero landing on the rectangle boundary is inconclusive and raises.
    """
    z0, z1 = complex(rectangle[0]), complex(rectangle[1])
    xs = np.linspace(min(z0.real, z1.real), max(z0.real, z1.real), nx)
    ys = np.linspace(min(z0.imag, z1.imag), max(z0.imag, z1.imag), ny)
    mu = core_model.mode_mu
    if any(abs(x - mu) < threshold_margin for x in xs) and abs(ys[0]) < threshold_margin:
        raise EndspecError("search rectangle must avoid thresholds by the stated margin")
    h = grid.h

    on_axis = max(abs(ys[0]), abs(ys[-1])) < 1e-12
    approach = +1 if on_axis else None
    shift = max(1, round(0.5 / h)) * h
    alt_model = CoreModel(core_model.potential, core_model.mode_mu,
                          core_model.core_radius + shift)
    bounds = ((xs[0], xs[-1]), (ys[0], ys[-1]))

    F = np.empty((len(ys), len(xs)))
    for i, y in enumerate(ys):
        for j, x in enumerate(xs):
            F[i, j] = _zone_objective(complex(x, y), sheet_flags, core_model, h, approach)

    roots: list[complex] = []
    for i in range(len(ys)):
        for j in range(len(xs)):
            w = F[max(0, i - 1): i + 2, max(0, j - 1): j + 2]
            if F[i, j] != w.min() or F[i, j] > 0.5 * np.median(F):
                continue
            z, val = _refine_zero(complex(xs[j], ys[i]), bounds, sheet_flags,
                                  core_model, h, approach, refine_tol)
            if val > objective_tol:
                continue
            edge = min(abs(z.real - xs[0]), abs(z.real - xs[-1])) < (xs[1] - xs[0]) * 1e-3 \
                or (not on_axis and len(ys) > 1
                    and min(abs(z.imag - ys[0]), abs(z.imag - ys[-1])) < (ys[1] - ys[0]) * 1e-3)
            if edge:
                raise NumericalError(f"pole candidate {z:.6g} on the rectangle boundary; inconclusive")
            z_alt, val_alt = _refine_zero(z, bounds, sheet_flags, alt_model, h, approach, refine_tol)
            if val_alt > objective_tol or abs(z_alt - z) > gluing_stability_tol * (1 + abs(z)):
                continue  # moved with the gluing: artifact, not a pole
            if all(abs(z - q) > 10 * refine_tol * (1 + abs(q)) for q in roots):
                roots.append(z)
    return sorted(roots, key=lambda z: (z.real, z.imag))


# ---------------------------------------------------------------------------
# analytic vectors and matrix-element continuation


@dataclass(frozen=True)
class AnalyticVector:
    """Entire function Σ c_m u^m e^{-u²/2}: transforms explicitly under dilation."""

    coefficients: tuple[float, ...]

    def __call__(self, z):
        z = np.asarray(z)
        out = np.zeros_like(z, dtype=complex)
        for m, c in enumerate(self.coefficients):
            if c:
                out = out + c * z**m
        return out * np.exp(-(z**2) / 2.0)


def continue_matrix_element(
    f: AnalyticVector,
    g: AnalyticVector,
    lambda_path,
    theta,
    op: ModeOperator | None = None,
    grid: Grid1D | None = None,
    scaling_radius: float = 4.0,
    richardson: bool = True,
) -> list[complex]:
    """Values of λ ↦ ⟨R(λ)f, g⟩ continued along a path via the scaled resolvent.

    Each value is the contour pairing h Σ w_i (R_θ f_θ)_i g_θ,i with
    f_θ = f∘z the dilated vector; inside the left half-plane this equals the
    direct matrix element, beyond it it defines the continuation.  Path
    points hitting the scaled spectrum make the solve singular and raise.
    """
    if op is None:
        op = ModeOperator("cylindrical", 0.0)
    if grid is None:
        grid = Grid1D(16.0, 3199)
    if not isinstance(theta, ScalingParameter):
        theta = ScalingParameter.relaxed(theta)
    scaled = dilate_mode(op, theta, scaling_radius)

    def value_on(grid1: Grid1D, lam: complex) -> complex:
        h = grid1.h
        u = grid1.points
        z = scaled.contour(u)
        zp_p = scaled.contour_derivative(u + h / 2)
        zp_m = scaled.contour_derivative(u - h / 2)
        a, am = 1.0 / zp_p, 1.0 / zp_m
        w = 0.5 * (zp_p + zp_m)
        V = op.potential.cell_average(u, h)
        diag = (am + a) / h**2 / w + op.mode_mu + V - lam
        ab = np.zeros((3, grid1.n_points), dtype=complex)
        ab[0, 1:] = -a[:-1] / h**2 / w[:-1]
        ab[1] = diag
        ab[2, :-1] = -am[1:] / h**2 / w[1:]
        F = f(z)
        Gv = g(z)
        try:
            sol = solve_banded((1, 1), ab, F)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"resolvent solve failed at λ = {lam}: {exc}") from exc
        if not np.all(np.isfinite(sol)):
            raise NumericalError(f"λ = {lam} hits the discretized scaled spectrum")
        return complex(h * np.sum(w * sol * Gv))

    coarse = grid.coarsened() if richardson else None
    out = []
    for lam in lambda_path:
        lam = complex(lam)
        v = value_on(grid, lam)
        if richardson:
            v2 = value_on(coarse, lam)
            r = (coarse.h / grid.h) ** 2
            v = (r * v - v2) / (r - 1)
        out.append(v)
    return out
