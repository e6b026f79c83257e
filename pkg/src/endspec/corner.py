"""Codimension-2 corner models: channels, rays, 2D resonances, accumulation.

The model is a quarter-plane-with-cross-section operator per transverse
mode μ of the corner cross-section Y:

    -∂²/∂u₁² - ∂²/∂u₂² + μ + V₁(u₁) + V₂(u₂) + W(u₁, u₂)

on [0, ∞)², Dirichlet walls, with V_i and W compactly supported inside the
common scaling radius.  Scaling acts independently in each variable beyond
R₀.  The three channel operators are the 1D half-line factors (with V₁ or
V₂) and the transverse Laplacian; the essential spectrum of the scaled
operator is the union of rays θ'[0, ∞) anchored at the cross-section
eigenvalues and at the point spectrum (bound states and uncovered
resonances) of the scaled 1D channels.  The two-dimensional free channel
fills its rays densely; the 1D channels contribute rays through their
bound/resonant anchors.

With W = 0 the discretization is an exact Kronecker sum, so 2D spectra are
sums of 1D spectra, which the dense path must reproduce to near machine
precision; this identity doubles as the separable oracle for 2D resonances.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EndspecError, GridError
from .discretize import (
    DiscretizedOperator,
    Grid1D,
    Grid2D,
    Resonance,
    ResonanceSet,
    aligned_grid,
    bound_states,
    discretize,
    eig,
    find_resonances,
)
from .modes import ModeOperator
from .potentials import RadialPotential, zero_potential
from .scaling import RaySet, THETA_SWEEP_DEFAULT, dilate_mode, distance_to_rays, essential_rays
from .spectral_core import CrossSectionSpectrum, ScalingParameter, make_cross_section

__all__ = [
    "CornerModel",
    "ChannelSpectrum",
    "channel_spectra",
    "corner_essential_spectrum",
    "corner_discretize",
    "corner_resonances",
    "accumulation_check",
    "AccumulationReport",
]

DENSE_AXIS_LIMIT = 100  # n per axis beyond which dense 2D solves are refused


@dataclass(frozen=True)
class CornerModel:
    """Two cylinder ends with compactly supported potentials, a corner
    cross-section, and an optional corner-localized coupling."""

    v1: RadialPotential = zero_potential
    v2: RadialPotential = zero_potential
    cross_section: CrossSectionSpectrum = None
    coupling: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    coupling_support: float = 0.0
    scaling_radius: float = 3.0
    e_max: float = 10.0

    def __post_init__(self):
        if self.cross_section is None:
            object.__setattr__(self, "cross_section", make_cross_section("point"))
        R0 = self.scaling_radius
        if self.v1.support_radius > R0 or self.v2.support_radius > R0:
            raise EndspecError("end potentials must be supported inside the scaling radius")
        if self.coupling is not None:
            if not (0 < self.coupling_support <= R0):
                raise EndspecError("coupling support must lie inside [0, R0]^2")
            s = np.linspace(0, self.coupling_support, 40)
            U1, U2 = np.meshgrid(s, s, indexing="ij")
            vals = np.asarray(self.coupling(U1, U2))
            if not np.all(np.isfinite(vals)):
                raise EndspecError("coupling must be bounded on its support")

    def swapped(self) -> "CornerModel":
        return CornerModel(self.v2, self.v1, self.cross_section,
                           None if self.coupling is None else (lambda a, b: self.coupling(b, a)),
                           self.coupling_support, self.scaling_radius, self.e_max)

    def end_modes(self, which: int) -> list[ModeOperator]:
        pot = self.v1 if which == 1 else self.v2
        return [ModeOperator("cylindrical", mu, pot)
                for mu in self.cross_section.modes(self.e_max)]


@dataclass(frozen=True)
class ChannelSpectrum:
    """Generators of the essential-spectrum rays, with provenance per entry.

    h3: cross-section eigenvalues (real, >= 0); h1_pp/h2_pp: point spectrum
    of the scaled 1D channels (bound states real, resonances Im <= 0).
    """

    h3: tuple[float, ...]
    h1_pp: tuple[complex, ...]
    h2_pp: tuple[complex, ...]
    provenance: tuple[tuple[complex, str], ...] = ()

    def __post_init__(self):
        if any(m < 0 for m in self.h3):
            raise EndspecError("cross-section eigenvalues must be >= 0")
        for z in (*self.h1_pp, *self.h2_pp):
            if z.imag > 1e-10 * (1 + abs(z)):
                raise EndspecError(f"channel point spectrum in the upper half-plane: {z}")

    def ray_origins(self):
        out = [(complex(m), f"corner mode {m:.6g}") for m in self.h3]
        out += [(z, f"end-1 state {z:.6g}") for z in self.h1_pp]
        out += [(z, f"end-2 state {z:.6g}") for z in self.h2_pp]
        return out


def _end_pp(model: CornerModel, which: int, thetas, grid: Grid1D, include_resonances: bool):
    """Point spectrum of one 1D end channel: bound states + θ-stable resonances."""
    pot = model.v1 if which == 1 else model.v2
    pp: list[tuple[complex, str]] = []
    for mu in model.cross_section.thresholds(model.e_max):
        op = ModeOperator("cylindrical", mu, pot)
        g = aligned_grid(grid.L, grid.n_points, (*pot.breakpoints, model.scaling_radius))
        for e, _ in bound_states(op, g):
            pp.append((complex(e), f"bound mu={mu:.6g}"))
    if include_resonances and not pot.is_zero:
        rs = find_resonances(model.end_modes(which), thetas, grid,
                             scaling_radius=model.scaling_radius)
        for r in rs.resonances():
            pp.append((r.z, f"resonance mu={r.mode_mu:.6g}"))
    return pp


def channel_spectra(
    model: CornerModel,
    thetas=THETA_SWEEP_DEFAULT,
    grid: Grid1D | None = None,
    include_resonances: bool = True,
) -> ChannelSpectrum:
    """Spectra of the three channel operators.

    h3 is the cross-section eigenvalue list; h1_pp/h2_pp collect the bound
    states (θ-independent real points) and, when requested, the θ-stable
    resonances of the scaled 1D end operators.
    """
    if grid is None:
        grid = Grid1D(16.0, 1067)
    h3 = tuple(model.cross_section.thresholds(model.e_max))
    prov: list[tuple[complex, str]] = [(complex(m), "corner cross-section") for m in h3]
    pp1 = _end_pp(model, 1, thetas, grid, include_resonances)
    pp2 = _end_pp(model, 2, thetas, grid, include_resonances)
    prov += [(z, f"end 1: {s}") for z, s in pp1]
    prov += [(z, f"end 2: {s}") for z, s in pp2]
    return ChannelSpectrum(h3, tuple(z for z, _ in pp1), tuple(z for z, _ in pp2), tuple(prov))


def corner_essential_spectrum(model: CornerModel, theta,
                              channels: ChannelSpectrum | None = None,
                              **kwargs) -> RaySet:
    """Rays origin + θ'[0, ∞) over every channel generator."""
    if channels is None:
        channels = channel_spectra(model, **kwargs)
    return essential_rays(channels.ray_origins(), theta)


def _axis_matrix(pot: RadialPotential, theta, R0: float, grid: Grid1D) -> np.ndarray:
    # bypass the 1D coarseness guard: 2D problems accept coarser axes
    from .discretize import _fd2_scaled

    op = ModeOperator("cylindrical", 0.0, pot)
    scaled = dilate_mode(op, theta, R0)
    if grid.L <= scaled.scaling_radius:
        raise GridError("2D truncation must exceed the scaling radius")
    A, _ = _fd2_scaled(scaled, grid)
    if complex(scaled.theta.theta) == 0:
        A = A.real
    return A


def corner_discretize(model: CornerModel, theta, grid2d: Grid2D, mu: float = 0.0) -> DiscretizedOperator:
    """Dense 2D matrix for one transverse mode: A₁⊗I + I⊗A₂ + μI (+ diag W).

    Kronecker-sum structure is exact when the coupling vanishes.  Dense
    assembly refuses axes beyond the dense limit; use the separable path
    (sums of 1D spectra) for larger W = 0 problems.
    """
    if grid2d.n > DENSE_AXIS_LIMIT:
        raise GridError(
            f"dense 2D solve refused for n = {grid2d.n} per axis (> {DENSE_AXIS_LIMIT}); "
            "use the Kronecker path for separable models"
        )
    if not isinstance(theta, ScalingParameter):
        theta = ScalingParameter.relaxed(theta)
    g1 = grid2d.axis
    A1 = _axis_matrix(model.v1, theta, model.scaling_radius, g1)
    A2 = _axis_matrix(model.v2, theta, model.scaling_radius, g1)
    n = grid2d.n
    I = np.eye(n, dtype=A1.dtype)
    A = np.kron(A1, I) + np.kron(I, A2) + mu * np.eye(n * n, dtype=A1.dtype)
    if model.coupling is not None:
        u = g1.points
        U1, U2 = np.meshgrid(u, u, indexing="ij")
        W = np.asarray(model.coupling(U1, U2), dtype=float)
        W[(U1 > model.coupling_support) | (U2 > model.coupling_support)] = 0.0
        A = A + np.diag(W.ravel())
    tag = f"corner mode mu={mu} theta={theta.theta} n={n} L={grid2d.L}"
    return DiscretizedOperator(A, grid2d, tag)


def _axis_eigs(model: CornerModel, theta, grid: Grid1D, scaling_radius: float | None = None):
    R0 = model.scaling_radius if scaling_radius is None else scaling_radius
    A1 = _axis_matrix(model.v1, theta, R0, grid)
    A2 = _axis_matrix(model.v2, theta, R0, grid)
    e1 = eig(DiscretizedOperator(A1, grid, "axis-1"))
    e2 = eig(DiscretizedOperator(A2, grid, "axis-2"))
    return e1, e2


def kronecker_eigenvalues(model: CornerModel, theta, grid2d: Grid2D, mu: float = 0.0):
    """Spectrum of the separable 2D operator as exact pairwise sums.

    Valid identity for any Kronecker sum A⊗I + I⊗B (diagonalizable or not):
    its spectrum is {a_i + b_j}.  Residuals combine the factor residuals.
    """
    if model.coupling is not None:
        raise EndspecError("Kronecker path needs a separable model (no coupling)")
    if not isinstance(theta, ScalingParameter):
        theta = ScalingParameter.relaxed(theta)
    e1, e2 = _axis_eigs(model, theta, grid2d.axis)
    return _pairwise_sums(e1, e2, mu)


def _pairwise_sums(e1, e2, mu):
    out = []
    for z1, r1 in e1:
        for z2, r2 in e2:
            out.append((z1 + z2 + mu, max(r1, r2)))
    out.sort(key=lambda p: (p[0].real, p[0].imag))
    return out


def _separable_candidates(model, theta, axis_grid, mu, origins, rays_tol, min_origin,
                          window, richardson):
    """Off-ray sums of 1D factor spectra, Richardson-extrapolated."""
    from .discretize import effective_ray_direction

    # the scaling radius is a numerical device: push it out when the axis
    # grid allows, so junction tails do not limit the θ-stability of bound
    # states (the 2D assembly keeps the model's own radius)
    axis_R0 = max(model.scaling_radius, 6.0) if axis_grid.L >= 9.0 else model.scaling_radius

    def sums_on(g):
        e1, e2 = _axis_eigs(model, theta, g, axis_R0)
        a = np.array([z for z, _ in e1])
        b = np.array([z for z, _ in e2])
        ra = np.array([r for _, r in e1])
        rb = np.array([r for _, r in e2])
        s = (a[:, None] + b[None, :] + mu).ravel()
        res = np.maximum(ra[:, None], rb[None, :]).ravel()
        return s, res

    s_f, res_f = sums_on(axis_grid)
    rays = RaySet(tuple(z for z, _ in origins),
                  effective_ray_direction(theta, axis_grid.L, axis_R0),
                  tuple(lab for _, lab in origins))
    keep = np.abs(s_f) <= window
    dist = distance_to_rays(s_f[keep], rays)
    zk = s_f[keep]
    rk = res_f[keep]
    offray = dist > rays_tol * (1 + np.abs(zk))
    is_bound = (np.abs(zk.imag) <= 1e-8 * (1 + np.abs(zk))) & (zk.real < min_origin - 1e-12)
    sel = offray | is_bound
    cands = list(zip(zk[sel], rk[sel]))
    if richardson and cands:
        gc = axis_grid.coarsened()
        s_c, _ = sums_on(gc)
        ratio = (gc.h / axis_grid.h) ** 2
        out = []
        for z, r in cands:
            j = int(np.argmin(np.abs(s_c - z)))
            if abs(s_c[j] - z) < 0.1 * (1 + abs(z)):
                z = (ratio * z - s_c[j]) / (ratio - 1)
            out.append((z, r))
        cands = out
    return cands


def corner_resonances(
    model: CornerModel,
    thetas=THETA_SWEEP_DEFAULT,
    grid2d: Grid2D | None = None,
    rays_tolerance: float = 0.02,
    stability_tolerance: float = 1e-4,
    channel_grid: Grid1D | None = None,
    axis_grid: Grid1D | None = None,
    energy_window: float = 50.0,
    richardson: bool = True,
    channels: ChannelSpectrum | None = None,
) -> ResonanceSet:
    """θ-stable off-ray eigenvalues of the scaled 2D operator, per Y-mode.

    Separable models go through the exact Kronecker path on a fine axis grid
    with Richardson extrapolation; coupled models are assembled densely on
    grid2d.  The ray filter uses the corner essential spectrum generators
    (cross-section thresholds and 1D channel point spectrum); surviving
    eigenvalues are chained across the θ-sweep exactly as in 1D.
    """
    thetas = tuple(complex(t) for t in thetas)
    if not thetas:
        raise EndspecError("empty theta sweep")
    sgn = {np.sign(t.imag) for t in thetas}
    if len(sgn) > 1:
        raise EndspecError("theta sweep must keep a fixed sign of Im theta")
    sweep_sign = 1.0 if sgn == {0.0} else sgn.pop()
    if grid2d is None:
        grid2d = Grid2D(8.0, 48)
    if channels is None:
        channels = channel_spectra(model, thetas, channel_grid,
                                   include_resonances=not (model.v1.is_zero and model.v2.is_zero))
    origins = channels.ray_origins()
    items: list[Resonance] = []
    warnings: list[str] = []
    min_real_origin = min(z.real for z, _ in origins)
    if axis_grid is None:
        bps = (*model.v1.breakpoints, *model.v2.breakpoints, model.scaling_radius)
        axis_grid = aligned_grid(16.0, 1067, bps)

    for mu in model.cross_section.thresholds(model.e_max):
        mult = model.cross_section.multiplicity(mu)
        pools = []
        for t in thetas:
            if model.coupling is None:
                cands = _separable_candidates(model, t, axis_grid, mu, origins,
                                              rays_tolerance, min_real_origin,
                                              energy_window, richardson)
            else:
                from .discretize import effective_ray_direction

                pairs = eig(corner_discretize(model, t, grid2d, mu))
                rays = RaySet(tuple(z for z, _ in origins),
                              effective_ray_direction(t, grid2d.L, model.scaling_radius),
                              tuple(lab for _, lab in origins))
                zs = np.array([z for z, _ in pairs])
                dists = distance_to_rays(zs, rays)
                cands = []
                for (z, r), dist in zip(pairs, dists):
                    if abs(z) > energy_window:
                        continue
                    offray = dist > rays_tolerance * (1 + abs(z))
                    is_bound = abs(z.imag) <= 1e-8 * (1 + abs(z)) and z.real < min_real_origin - 1e-12
                    if offray or is_bound:
                        cands.append((z, r))
            pools.append(cands)

        order0 = sorted(range(len(pools[0])), key=lambda j: -abs(pools[0][j][0].imag))
        used = [set() for _ in thetas]
        for j0 in order0:
            if j0 in used[0]:
                continue
            z0, r0 = pools[0][j0]
            used[0].add(j0)
            chain = [(z0, r0)]
            ok = True
            capture = max(1e-2, 100 * stability_tolerance) * (1 + abs(z0))
            for ti in range(1, len(thetas)):
                best_j, best_d = None, capture
                for j, (z, _) in enumerate(pools[ti]):
                    if j in used[ti]:
                        continue
                    d = abs(z - chain[-1][0])
                    if d < best_d:
                        best_j, best_d = j, d
                if best_j is None:
                    ok = False
                    break
                used[ti].add(best_j)
                chain.append(pools[ti][best_j])
            if not ok:
                continue
            zs = np.array([z for z, _ in chain])
            spread = float(max(abs(p - q) for p in zs for q in zs)) if len(zs) > 1 else 0.0
            if spread > stability_tolerance:
                continue
            zc = complex(zs.mean())
            if zc.imag * sweep_sign > 1e-8 * (1 + abs(zc)):
                warnings.append(f"wrong-side cluster at {zc:.6g} discarded")
                continue
            kind = "bound" if abs(zc.imag) <= 1e-8 * (1 + abs(zc)) and zc.real < min_real_origin else "resonance"
            if kind == "bound":
                zc = complex(zc.real, 0.0)
            items.append(Resonance(zc, max(r for _, r in chain), spread, mult, kind, mu))
    prov = f"corner grid2d L={grid2d.L} n={grid2d.n} sweep={list(thetas)}"
    items.sort(key=lambda r: (r.z.real, r.z.imag))
    return ResonanceSet(tuple(items), prov, tuple(warnings))


# ---------------------------------------------------------------------------
# accumulation diagnostics


@dataclass(frozen=True)
class AccumulationReport:
    """Per-parameter point spectra and their accumulation diagnostics.

    candidates: trajectory limits whose increments shrink (Cauchy proxy);
    flagged: candidates farther than the tolerance from every allowed
    target — any entry here indicates a bug in the spectral pipeline.
    """

    parameters: tuple[float, ...]
    pp_sets: tuple[tuple[float, ...], ...]
    allowed_targets: tuple[float, ...]
    candidates: tuple[float, ...]
    flagged: tuple[float, ...]
    min_distances: tuple[tuple[float, ...], ...]

    @property
    def clean(self) -> bool:
        return not self.flagged


def _trajectories(sets):
    """Nearest-neighbour continuation of eigenvalue lists across a sweep."""
    trajs: list[list[float]] = [[e] for e in sets[0]]
    open_idx = list(range(len(trajs)))
    for values in sets[1:]:
        pool = list(values)
        used: set[int] = set()
        still = []
        for ti in open_idx:
            last = trajs[ti][-1]
            best_j, best_d = None, np.inf
            for j, e in enumerate(pool):
                if j in used:
                    continue
                d = abs(e - last)
                if d < best_d:
                    best_j, best_d = j, d
            if best_j is not None:
                used.add(best_j)
                trajs[ti].append(pool[best_j])
                still.append(ti)
        for j, e in enumerate(pool):
            if j not in used:
                trajs.append([e])
                still.append(len(trajs) - 1)
        open_idx = still
    return trajs


def accumulation_check(
    family,
    allowed_targets,
    target_tolerance: float = 5e-3,
    cauchy_tolerance: float = 5e-3,
) -> AccumulationReport:
    """Diagnose where point spectra of a model family accumulate.

    family: list of (parameter, pp_list) pairs, or (parameter, callable)
    producing the pp list on demand.  A trajectory (nearest-neighbour
    continuation across the sweep) becomes an accumulation candidate when
    its increments shrink monotonically to below cauchy_tolerance; each
    candidate must land within target_tolerance of an allowed target, else
    it is flagged.  Diverging trajectories (growing increments) head to the
    allowed point at infinity and are ignored.
    """
    params, sets = [], []
    for s, item in family:
        params.append(float(s))
        pp = item() if callable(item) else item
        sets.append(tuple(sorted(float(e) for e in pp)))
    allowed = tuple(float(t) for t in allowed_targets)

    candidates, flagged = [], []
    for tr in _trajectories(sets):
        if len(tr) < 3:
            continue
        steps = [abs(b - a) for a, b in zip(tr, tr[1:])]
        shrinking = all(s2 <= s1 * 1.05 for s1, s2 in zip(steps, steps[1:]))
        if shrinking and steps[-1] <= cauchy_tolerance:
            limit = tr[-1]
            candidates.append(limit)
            if not any(abs(limit - t) <= target_tolerance + steps[-1] for t in allowed):
                flagged.append(limit)

    dists = tuple(
        tuple(min(abs(e - t) for e in es) if es else np.inf for t in allowed)
        for es in sets
    )
    return AccumulationReport(tuple(params), tuple(sets), allowed,
                              tuple(candidates), tuple(flagged), dists)
