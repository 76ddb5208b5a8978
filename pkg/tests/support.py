"""Shared builders and independent oracles for the test suite.

Oracles deliberately take a different computational route than the library:
singular values instead of eigendecompositions, dense least squares instead
of conjugate gradients, sliding-window scans instead of event enumeration.
"""

import numpy as np

from framelab.domain import Domain, Grid, SampledFunction, make_grid
from framelab.framecore import SynthesisSystem, exponential_system
from framelab.pointset import PointSet


def dft_base(grid: Grid) -> SynthesisSystem:
    """Integer-type frequency lattice matched to the grid dimension; on a
    single-interval grid this is an orthonormal basis of the node space."""
    n = grid.size
    m = grid.domain.measure
    lam = (np.arange(n) - n // 2) / m
    return exponential_system(grid, PointSet.from_1d(lam, box=(lam[0] - 0.5 / m, lam[-1] + 0.5 / m)))


def jittered_lattice(n: int, seed: int, amp: float = 0.2) -> PointSet:
    rng = np.random.default_rng(seed)
    k = np.arange(n) - n // 2
    lam = k + rng.uniform(-amp, amp, size=n)
    return PointSet.from_1d(lam, box=(k[0] - 0.5, k[-1] + 0.5))


def random_system(rng, n_nodes: int, n_members: int, length: float = 1.0) -> SynthesisSystem:
    dom = Domain([(0.0, length)])
    grid = make_grid(dom, max(1, int(round(n_nodes / length))))
    mat = rng.standard_normal((grid.size, n_members)) + 1j * rng.standard_normal(
        (grid.size, n_members)
    )
    return SynthesisSystem(grid, mat)


def random_sampled(rng, grid: Grid) -> SampledFunction:
    vals = rng.standard_normal(grid.size) + 1j * rng.standard_normal(grid.size)
    return SampledFunction(grid, vals)


# --- oracles ---------------------------------------------------------------


def oracle_bounds_svd(sys: SynthesisSystem, rank_tol: float = 1e-8):
    """Retained frame bounds from singular values of the weighted matrix."""
    s = np.linalg.svd(sys.weighted, compute_uv=False)
    spec = np.sort(s**2)[::-1]
    if spec.size == 0 or spec[0] <= 0.0:
        return 0.0, 0.0, 0
    keep = spec > rank_tol * spec[0]
    retained = spec[keep]
    return float(retained[-1]), float(retained[0]), int(retained.size)


def oracle_min_norm_coeffs(sys: SynthesisSystem, f: SampledFunction) -> np.ndarray:
    """Min-norm solution of U c = sqrt(w) f by dense least squares."""
    b = np.sqrt(sys.grid.weights) * f.values
    coeffs, *_ = np.linalg.lstsq(sys.weighted, b, rcond=None)
    return coeffs


def oracle_gap_1d(ps: PointSet, n_samples: int = 200001) -> float:
    """Covering radius by dense sampling of the distance-to-set function."""
    (lo, hi) = ps.box[0]
    xs = np.linspace(lo, hi, n_samples)
    pts = ps.xs
    idx = np.searchsorted(pts, xs)
    left = np.clip(idx - 1, 0, pts.size - 1)
    right = np.clip(idx, 0, pts.size - 1)
    dist = np.minimum(np.abs(xs - pts[left]), np.abs(xs - pts[right]))
    return float(dist.max())


def oracle_window_counts_1d(ps: PointSet, r: float, n_centers: int = 20001):
    """min/max closed-window counts by scanning many window centers."""
    (lo, hi) = ps.box[0]
    centers = np.linspace(lo + r, hi - r, n_centers)
    pts = ps.xs
    left = np.searchsorted(pts, centers - r, side="left")
    right = np.searchsorted(pts, centers + r, side="right")
    counts = right - left
    return int(counts.min()), int(counts.max())


def oracle_frame_sums(sys: SynthesisSystem, f: SampledFunction) -> float:
    """sum_k |<f, psi_k>|^2 accumulated member by member."""
    total = 0.0
    w = sys.grid.weights
    for k in range(sys.size):
        ip = np.sum(w * f.values * np.conj(sys.matrix[:, k]))
        total += abs(ip) ** 2
    return float(total)
