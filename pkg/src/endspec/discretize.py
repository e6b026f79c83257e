"""Finite-difference discretization and resonance extraction.

Operators are assembled in flux form on uniform Dirichlet grids: with
contour derivative z'(u) (piecewise constant for exterior scaling) the
stencil uses a_{i±1/2} = 1/z' at cell faces and the cell-averaged weight
w_i, so the junction matching (flux continuity) is built in and the θ = 0
case reduces to the plain symmetric second-difference matrix.

Resonances are the θ-stable eigenvalues of the scaled operators away from
the essential-spectrum rays.  The extraction pipeline uses exact cell
averages for piecewise-constant potentials, snaps grids so potential
breakpoints and the scaling radius sit on nodes, and Richardson-extrapolates
over an (h, 2h) grid pair; all three are needed to push a second-order
scheme to ~1e-7 resonance positions.

Truncation at u = L plays the role of an exhaustion parameter: in the
rotated exterior the error it induces on off-ray eigenvalues is
exponentially small.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import EndspecError, GridError, NumericalError
from .modes import LineOperator, ModeOperator
from .scaling import (
    RaySet,
    ScaledModeOperator,
    THETA_SWEEP_DEFAULT,
    dilate_mode,
    distance_to_rays,
)
from .spectral_core import ScalingParameter, in_gamma

__all__ = [
    "Grid1D",
    "Grid2D",
    "DiscretizedOperator",
    "Resonance",
    "ResonanceSet",
    "discretize",
    "discretize_line",
    "eig",
    "bound_states",
    "find_resonances",
    "aligned_grid",
]


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on [0, L] with n_points interior nodes, Dirichlet ends."""

    L: float
    n_points: int
    scheme: str = "fd2"

    def __post_init__(self):
        if self.L <= 0:
            raise GridError("truncation length must be positive")
        if self.n_points < 50:
            raise GridError(f"need at least 50 interior points, got {self.n_points}")
        if self.scheme not in ("fd2", "fd4"):
            raise GridError(f"unknown scheme {self.scheme!r}")

    @property
    def h(self) -> float:
        return self.L / (self.n_points + 1)

    @property
    def points(self) -> np.ndarray:
        return self.h * np.arange(1, self.n_points + 1)

    def coarsened(self) -> "Grid1D":
        """Grid with doubled step (Richardson partner); requires n_points odd."""
        if (self.n_points + 1) % 2:
            raise GridError("Richardson partner needs n_points+1 even")
        return Grid1D(self.L, (self.n_points + 1) // 2 - 1, self.scheme)


@dataclass(frozen=True)
class Grid2D:
    """Product grid [0, L]² with n interior nodes per axis."""

    L: float
    n: int
    scheme: str = "fd2"

    def __post_init__(self):
        if self.L <= 0 or self.n < 8:
            raise GridError("need L > 0 and at least 8 points per axis")
        if self.scheme != "fd2":
            raise GridError("2D assembly supports fd2 only")

    @property
    def axis(self) -> Grid1D:
        # relax the 1D minimum for the per-axis factor grids
        g = object.__new__(Grid1D)
        object.__setattr__(g, "L", self.L)
        object.__setattr__(g, "n_points", self.n)
        object.__setattr__(g, "scheme", self.scheme)
        return g


def aligned_grid(L: float, n_target: int, breakpoints=(), scheme: str = "fd2") -> Grid1D:
    """Grid near n_target whose step divides every breakpoint.

    Alignment keeps the eigenvalue error of discontinuous coefficients a
    clean C·h² so that Richardson extrapolation is reliable.  Breakpoints
    outside (0, L) are ignored; irrational breakpoints fall back to the
    unaligned grid.  n_points+1 is kept even so a coarsened partner exists.
    """
    fr = []
    for b in breakpoints:
        if 0 < b < L:
            f = Fraction(b).limit_denominator(10**6)
            if abs(float(f) - b) > 1e-12:
                fr = None
                break
            fr.append(f)
    fL = Fraction(L).limit_denominator(10**6)
    if fr:
        M = 1
        for f in fr:
            # need (n+1)*b/L integer: n+1 multiple of the denominator of b/L
            M = M * (f / fL).denominator // math.gcd(M, (f / fL).denominator)
        k = max(2, round((n_target + 1) / M))
        if k % 2:  # keep the coarsened partner grid aligned too
            k += 1
        n = M * k - 1
    else:
        n = n_target if (n_target + 1) % 2 == 0 else n_target + 1
    return Grid1D(L, n, scheme)


@dataclass(frozen=True)
class DiscretizedOperator:
    """Dense matrix of a discretized operator plus its grid bookkeeping.

    weights holds the contour measure per node (all ones at θ = 0); the
    bilinear pairing h·Σ w_i f_i g_i is the discrete contour integral.
    """

    matrix: np.ndarray
    grid: Grid1D | Grid2D
    operator_tag: str
    weights: np.ndarray = field(repr=False, default=None)
    points: np.ndarray = field(repr=False, default=None)


def _fd2_scaled(scaled: ScaledModeOperator, grid: Grid1D):
    h = grid.h
    u = grid.points
    zp_plus = scaled.contour_derivative(u + h / 2)
    zp_minus = scaled.contour_derivative(u - h / 2)
    a, am = 1.0 / zp_plus, 1.0 / zp_minus
    w = 0.5 * (zp_plus + zp_minus)
    V = scaled.base.potential.cell_average(u, h)
    diag = (am + a) / h**2 / w + scaled.base.mode_mu + V
    upper = -a[:-1] / h**2 / w[:-1]
    lower = -am[1:] / h**2 / w[1:]
    A = np.diag(diag) + np.diag(upper, 1) + np.diag(lower, -1)
    return A, w


def _fd4_uniform(coef: complex, mu: float, V: np.ndarray, grid: Grid1D):
    """Fourth-order stencil for -coef·d²/du² + mu + V with Dirichlet ends.

    Odd (antisymmetric) ghost extension at both walls preserves the order.
    """
    n, h = grid.n_points, grid.h
    c = coef / (12 * h**2)
    A = np.zeros((n, n), dtype=complex)
    idx = np.arange(n)
    A[idx, idx] = 30 * c
    A[idx[:-1], idx[:-1] + 1] = -16 * c
    A[idx[1:], idx[1:] - 1] = -16 * c
    A[idx[:-2], idx[:-2] + 2] = c
    A[idx[2:], idx[2:] - 2] = c
    # odd ghosts: f(-h) = -f(h), f(L+h) = -f(L-h)
    A[0, 1] += c
    A[-1, -2] += c
    A[idx, idx] += mu + V
    return A


def discretize(op, grid: Grid1D) -> DiscretizedOperator:
    """Dense matrix of a (scaled) mode operator on the truncated half-line.

    Assembly is deterministic for fixed inputs.  Grids coarser than h = 0.1
    are rejected; so are grids shorter than the scaling radius or potential
    support.
    """
    if isinstance(op, ModeOperator):
        if op.kind == "cusp":
            raise EndspecError("discretize cusp operators via cusp_to_schrodinger + discretize_line")
        op = dilate_mode(op, 0.0, max(op.potential.support_radius, 0.0))
    if not isinstance(op, ScaledModeOperator):
        raise EndspecError(f"cannot discretize {type(op).__name__}")
    if grid.h > 0.1:
        raise GridError(f"grid too coarse: h = {grid.h:.4g} > 0.1")
    if grid.L <= op.scaling_radius:
        raise GridError(f"truncation L = {grid.L} must exceed the scaling radius {op.scaling_radius}")
    if grid.L <= op.base.potential.support_radius:
        raise GridError("truncation must exceed the potential support")

    theta = op.theta.theta
    if grid.scheme == "fd4":
        uniform = theta == 0 or op.scaling_radius == 0.0
        if not uniform:
            raise GridError("fd4 needs a uniform contour (theta = 0 or scaling radius 0)")
        coef = op.theta.theta_prime if op.scaling_radius == 0.0 else 1.0 + 0j
        V = op.base.potential.cell_average(grid.points, grid.h)
        A = _fd4_uniform(coef, op.base.mode_mu, V, grid)
        w = np.ones(grid.n_points, dtype=complex) if theta == 0 else np.full(
            grid.n_points, 1.0 + theta, dtype=complex)
        tag = f"fd4 scaled(theta={theta}) {op.base.kind} mu={op.base.mode_mu}"
        return DiscretizedOperator(A, grid, tag, weights=w, points=grid.points)

    A, w = _fd2_scaled(op, grid)
    if theta == 0:
        A = A.real  # exact: all coefficients real, symmetry verbatim
        w = w.real
    tag = f"fd2 scaled(theta={theta}, R0={op.scaling_radius}) {op.base.kind} mu={op.base.mode_mu}"
    return DiscretizedOperator(A, grid, tag, weights=w, points=grid.points)


def discretize_line(op: LineOperator, t_min: float, t_max: float, n_points: int,
                    bc: str = "neumann") -> DiscretizedOperator:
    """Line operator on [t_min, t_max], Neumann ends by default.

    Neumann truncation reproduces the essential-spectrum bottom of the free
    side exactly (the constant mode), where Dirichlet walls would add a
    (π/T)² box term.  Dirichlet is available for comparisons against the
    weighted radial discretization, which maps Dirichlet to Dirichlet.
    """
    if t_max <= t_min:
        raise GridError("empty t-window")
    n = int(n_points)
    if n < 50:
        raise GridError("need at least 50 points")
    if bc == "neumann":
        t = np.linspace(t_min, t_max, n)
        h = t[1] - t[0]
        # reflecting ghosts give corner rows (2f0 - 2f1)/h²; conjugating by
        # diag(sqrt(1/2),1,..,1,sqrt(1/2)) symmetrizes without moving eigenvalues
        off = -np.ones(n - 1) / h**2
        off[0] = off[-1] = -np.sqrt(2.0) / h**2
    elif bc == "dirichlet":
        h = (t_max - t_min) / (n + 1)
        t = t_min + h * np.arange(1, n + 1)
        off = -np.ones(n - 1) / h**2
    else:
        raise GridError(f"unknown boundary condition {bc!r}")
    A = np.diag(np.full(n, 2.0 / h**2)) + np.diag(off, 1) + np.diag(off, -1)
    A += np.diag(op.potential(t))
    tag = f"fd2 line {bc} const={op.constant} mu={op.mu}"
    g = object.__new__(Grid1D)
    object.__setattr__(g, "L", t_max - t_min)
    object.__setattr__(g, "n_points", n)
    object.__setattr__(g, "scheme", "fd2")
    return DiscretizedOperator(A, g, tag, weights=np.ones(n), points=t)


def eig(dop: DiscretizedOperator):
    """All eigenvalues with a posteriori residual certificates.

    Returns a list of (eigenvalue, residual) sorted by real then imaginary
    part, residual = ‖Av - zv‖ / ‖A‖_F per eigenpair.
    """
    A = dop.matrix
    if not np.all(np.isfinite(A)):
        raise NumericalError("matrix has non-finite entries")
    symmetric_real = np.isrealobj(A) and np.allclose(A, A.T, rtol=0, atol=0)
    try:
        if symmetric_real:
            vals, vecs = np.linalg.eigh(A)
        else:
            vals, vecs = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    normA = np.linalg.norm(A)
    R = A @ vecs - vecs * vals[None, :]
    res = np.linalg.norm(R, axis=0) / (np.linalg.norm(vecs, axis=0) * normA)
    order = np.lexsort((vals.imag, vals.real))
    return [(complex(vals[i]), float(res[i])) for i in order]


def _decay_certified(vec: np.ndarray, tail_frac: float = 0.1, tol: float = 1e-3) -> bool:
    m = len(vec)
    k = max(1, int(m * tail_frac))
    return np.max(np.abs(vec[-k:])) <= tol * np.max(np.abs(vec))


def _tridiag_below(op: ModeOperator, grid: Grid1D, cutoff: float):
    """Eigenpairs below `cutoff` of the fd2 unscaled operator (banded solver)."""
    from scipy.linalg import eigh_tridiagonal

    h = grid.h
    u = grid.points
    d = 2.0 / h**2 + op.mode_mu + op.potential.cell_average(u, h)
    e = -np.ones(grid.n_points - 1) / h**2
    lo = float(np.min(d)) - 2.0 / h**2 - 1.0
    try:
        vals, vecs = eigh_tridiagonal(d, e, select="v", select_range=(lo, cutoff))
    except Exception as exc:  # pragma: no cover
        raise NumericalError(f"tridiagonal eigensolver failed: {exc}") from exc
    return d, e, vals, vecs


def bound_states(op: ModeOperator, grid: Grid1D, richardson: bool = True):
    """Discrete spectrum below the mode threshold, with decay certificates.

    Returns a list of (energy, residual).  Truncation-continuum artifacts
    above the threshold are excluded by energy; states whose eigenvector
    does not decay in the last 10% of the box are dropped.
    """
    if grid.scheme != "fd2":
        pairs = eig(discretize(op, grid))
        raise_cut = op.mode_mu - 1e-9
        return [(z.real, r) for z, r in pairs if z.real < raise_cut and abs(z.imag) < 1e-12]
    cutoff = op.mode_mu - 1e-9
    d, e, vals, vecs = _tridiag_below(op, grid, cutoff)
    norm_est = float(np.max(np.abs(d)) + 2.0 / grid.h**2)
    out = []
    coarse_vals = None
    for i in range(len(vals)):
        v = vecs[:, i]
        if not _decay_certified(v):
            continue
        Av = d * v
        Av[:-1] += e * v[1:]
        Av[1:] += e * v[:-1]
        resid = float(np.linalg.norm(Av - vals[i] * v) / norm_est)
        en = vals[i]
        if richardson:
            if coarse_vals is None:
                gc = grid.coarsened()
                _, _, coarse_vals, _ = _tridiag_below(op, gc, cutoff)
                rr = (gc.h / grid.h) ** 2
            if len(coarse_vals):
                j = np.argmin(np.abs(coarse_vals - en))
                en = (rr * en - coarse_vals[j]) / (rr - 1)
        out.append((float(en), resid))
    return out


@dataclass(frozen=True)
class Resonance:
    z: complex
    residual: float
    theta_spread: float
    multiplicity: int
    kind: str  # "resonance" | "bound"
    mode_mu: float
    ambiguous: bool = False


@dataclass(frozen=True)
class ResonanceSet:
    """θ-stable off-ray eigenvalues with certificates.

    For the standard sweeps (Im θ > 0) every item lies in the closed lower
    half-plane (bound states on R); mirrored sweeps produce the conjugate
    set.  residual <= the configured bound and theta_spread <= the stability
    tolerance for every item.
    """

    items: tuple[Resonance, ...]
    provenance: str
    warnings: tuple[str, ...] = ()

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def resonances(self):
        return [r for r in self.items if r.kind == "resonance"]

    def bound(self):
        return [r for r in self.items if r.kind == "bound"]


def _mode_groups(model):
    groups = []
    for op in model:
        if op.kind != "cylindrical":
            raise EndspecError("find_resonances expects cylindrical mode operators")
        for g in groups:
            if g["mu"] == op.mode_mu and g["potential"] is op.potential:
                g["mult"] += 1
                break
        else:
            groups.append({"mu": op.mode_mu, "potential": op.potential, "op": op, "mult": 1})
    return groups


def effective_ray_direction(theta: complex, L: float, R0: float) -> complex:
    """Direction the truncated scaled free spectrum actually follows.

    The continuum eigenvalues on the bent contour are m²π²/z(L)² with
    z(L) = R₀ + (1+θ)(L-R₀); for R₀ = 0 this reduces to the ideal θ'
    direction.  Filtering against this direction keeps the essential cloud
    out of the candidate pools at finite truncation.
    """
    zL = R0 + (1 + complex(theta)) * (L - R0)
    d = 1.0 / zL**2
    return d / abs(d)


def _candidates_one(op, theta, grid, R0, origins, rays_tol, min_origin, richardson, window):
    scaled = dilate_mode(op, theta, R0)
    pairs = eig(discretize(scaled, grid))
    coarse = None
    if richardson:
        gc = grid.coarsened()
        coarse = np.array([z for z, _ in eig(discretize(scaled, gc))])
        ratio = (gc.h / grid.h) ** 2
    rays = RaySet(tuple(origins), effective_ray_direction(theta, grid.L, R0),
                  tuple(str(o) for o in origins))
    zs = np.array([z for z, _ in pairs])
    dists = distance_to_rays(zs, rays)
    out = []
    for (z, res), dist in zip(pairs, dists):
        if abs(z) > window:
            continue
        offray = dist > rays_tol * (1.0 + abs(z))
        is_bound = abs(z.imag) <= 1e-8 * (1 + abs(z)) and z.real < min_origin - 1e-12
        if not (offray or is_bound):
            continue
        if richardson:
            j = int(np.argmin(np.abs(coarse - z)))
            if abs(coarse[j] - z) < 0.1 * (1 + abs(z)):
                z = (ratio * z - coarse[j]) / (ratio - 1)
        out.append((z, res))
    return out


def find_resonances(
    model,
    thetas=THETA_SWEEP_DEFAULT,
    grid: Grid1D = None,
    scaling_radius: float | None = None,
    rays_tolerance: float = 0.02,
    stability_tolerance: float = 1e-6,
    residual_bound: float = 1e-10,
    richardson: bool = True,
    align: bool = True,
    threads: int | None = None,
    energy_window: float = 50.0,
) -> ResonanceSet:
    """Extract bound states and resonances from a θ-sweep of scaled spectra.

    For each mode and each θ the scaled operator is discretized and
    eigensolved; eigenvalues within the energy window and further than
    rays_tolerance·(1+|z|) from the predicted rays (or real below the lowest
    threshold) survive, are chained across the sweep by nearest-neighbour
    continuation ordered by |Im z| descending, and chains with spread <=
    stability_tolerance are emitted at their mean.  Chains whose means sit
    within 2·stability_tolerance of each other are flagged ambiguous rather
    than merged.
    """
    thetas = tuple(complex(t) for t in thetas)
    if not thetas:
        raise EndspecError("empty theta sweep")
    for t in thetas:
        if not in_gamma(t):
            raise EndspecError(f"sweep value {t} outside the admissible region")
    signs = {np.sign(t.imag) for t in thetas}
    if len(signs) > 1:
        raise EndspecError("theta sweep must keep a fixed sign of Im theta")
    sweep_sign = 1.0 if signs == {0.0} else signs.pop()
    if grid is None:
        grid = Grid1D(16.0, 1067)
    groups = _mode_groups(model)
    if not groups:
        raise EndspecError("empty model")
    sup_v = max(g["potential"].support_radius for g in groups)
    R0 = float(scaling_radius) if scaling_radius is not None else max(sup_v, min(3.0, grid.L / 4))
    if R0 < sup_v:
        raise EndspecError("scaling radius smaller than the potential support")
    thresholds = sorted({g["mu"] for g in groups})
    min_origin = min(thresholds)

    if align:
        bps = set()
        for g in groups:
            bps.update(g["potential"].breakpoints)
        bps.add(R0)
        grid = aligned_grid(grid.L, grid.n_points, sorted(bps), grid.scheme)
    elif richardson and (grid.n_points + 1) % 2:
        grid = Grid1D(grid.L, grid.n_points + 1, grid.scheme)

    warnings: list[str] = []
    items: list[Resonance] = []
    for g in groups:
        tasks = []

        def work(t, _g=g):
            return _candidates_one(
                _g["op"], t, grid, R0, thresholds, rays_tolerance, min_origin,
                richardson, energy_window
            )

        if threads and threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                tasks = list(ex.map(work, thetas))
        else:
            tasks = [work(t) for t in thetas]

        pools = [list(cands) for cands in tasks]
        order0 = sorted(range(len(pools[0])), key=lambda j: -abs(pools[0][j][0].imag))
        used = [set() for _ in thetas]
        clusters = []
        for j0 in order0:
            if j0 in used[0]:
                continue
            z0, r0 = pools[0][j0]
            chain = [(z0, r0)]
            used[0].add(j0)
            ok = True
            capture = max(1e-3, 100 * stability_tolerance) * (1 + abs(z0))
            for ti in range(1, len(thetas)):
                best_j, best_d = None, capture
                for j, (z, r) in enumerate(pools[ti]):
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
            spread = float(max(abs(a - b) for a in zs for b in zs)) if len(zs) > 1 else 0.0
            if spread > stability_tolerance:
                continue
            resid = max(r for _, r in chain)
            if resid > residual_bound:
                warnings.append(f"cluster at {zs.mean():.6g} dropped: residual {resid:.2e}")
                continue
            zc = complex(zs.mean())
            kind = "bound" if (abs(zc.imag) <= 1e-8 * (1 + abs(zc)) and zc.real < min_origin) else "resonance"
            if kind == "bound":
                zc = complex(zc.real, 0.0)
            # resonances are uncovered on the side the rays rotate towards;
            # points on the wrong side of the axis are discretization junk
            if zc.imag * sweep_sign > 1e-8 * (1 + abs(zc)):
                warnings.append(f"wrong-side cluster at {zc:.6g} discarded")
                continue
            clusters.append(Resonance(zc, resid, spread, g["mult"], kind, g["mu"]))
        for i, a in enumerate(clusters):
            amb = any(
                j != i and abs(a.z - b.z) < 2 * stability_tolerance for j, b in enumerate(clusters)
            )
            if amb:
                warnings.append(f"ambiguous cluster pair near {a.z:.6g}")
                a = Resonance(a.z, a.residual, a.theta_spread, a.multiplicity, a.kind, a.mode_mu, True)
            items.append(a)

    prov = (
        f"grid L={grid.L} n={grid.n_points} scheme={grid.scheme} R0={R0} "
        f"sweep={list(thetas)} rays_tol={rays_tolerance} stab_tol={stability_tolerance} "
        f"richardson={richardson}"
    )
    items.sort(key=lambda r: (r.z.real, r.z.imag))
    return ResonanceSet(tuple(items), prov, tuple(warnings))
