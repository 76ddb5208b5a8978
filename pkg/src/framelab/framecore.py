"""Finite synthesis systems and their frame-theoretic measurements.

Quadrature weights are absorbed into the member matrix as a sqrt(w) row
scaling, so singular values of the weighted matrix are exactly the square
roots of the operator bounds: the weighted frame operator is U @ U^H and the
Gram matrix is U^H @ U, and the two share their nonzero spectrum.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .domain import Grid, SampledFunction
from .errors import FrameLabError, GridMismatchError, NotInSpanError, ReconstructionError
from .pointset import PointSet

__all__ = [
    "SynthesisSystem",
    "FrameFlags",
    "FrameReport",
    "ReconstructionResult",
    "exponential_system",
    "gram",
    "analyze",
    "synthesize",
    "frame_operator_apply",
    "measure_bounds",
    "reconstruct",
    "write_spectrum_csv",
]

# dense Hermitian eigensolves stay reliable and fast up to this order;
# beyond it only the smaller of S and G is diagonalized
_FULL_SPECTRUM_LIMIT = 1024


class SynthesisSystem:
    """Ordered finite family of sampled functions sharing one grid.

    ``members`` may be a list of SampledFunctions or an (n_nodes, n_members)
    complex matrix of member values.  Value semantics: never mutated.
    """

    def __init__(self, grid: Grid, members, labels=None):
        if isinstance(members, np.ndarray):
            mat = np.ascontiguousarray(members, dtype=complex)
            if mat.ndim != 2 or mat.shape[0] != grid.size:
                raise ValueError(f"member matrix must be ({grid.size}, K)")
        else:
            members = list(members)
            if not members:
                raise ValueError("system needs at least one member")
            for m in members:
                if not m.grid.matches(grid):
                    raise GridMismatchError("all members must share the system grid")
            mat = np.stack([m.values for m in members], axis=1)
        if mat.shape[1] == 0:
            raise ValueError("system needs at least one member")
        self.grid = grid
        self.matrix = mat
        if labels is None:
            labels = tuple(range(mat.shape[1]))
        else:
            labels = tuple(labels)
            if len(labels) != mat.shape[1]:
                raise ValueError("one label per member required")
        self.labels = labels

    @property
    def size(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return self.size

    def member(self, k: int) -> SampledFunction:
        return SampledFunction(self.grid, self.matrix[:, k])

    @property
    def members(self) -> list:
        return [self.member(k) for k in range(self.size)]

    @cached_property
    def weighted(self) -> np.ndarray:
        """sqrt(w)-scaled member matrix; its singular values squared are the bounds."""
        return np.sqrt(self.grid.weights)[:, None] * self.matrix

    def permuted(self, order) -> "SynthesisSystem":
        order = list(order)
        return SynthesisSystem(self.grid, self.matrix[:, order], [self.labels[i] for i in order])

    def scaled(self, s: complex) -> "SynthesisSystem":
        return SynthesisSystem(self.grid, s * self.matrix, self.labels)


def exponential_system(g: Grid, ps: PointSet) -> SynthesisSystem:
    """Members exp(-2 pi i lambda_k t) on g's nodes, labeled by lambda_k."""
    if ps.dim != 1:
        raise ValueError("exponential systems take 1-D frequency sets")
    lam = ps.xs
    mat = np.exp(-2j * np.pi * np.outer(g.nodes, lam))
    return SynthesisSystem(g, mat, labels=lam)


def gram(sys: SynthesisSystem) -> np.ndarray:
    """Gram matrix G[j, k] = <psi_k, psi_j> in the grid inner product."""
    U = sys.weighted
    G = U.conj().T @ U
    return 0.5 * (G + G.conj().T)


def analyze(sys: SynthesisSystem, f: SampledFunction) -> np.ndarray:
    """Analysis coefficients <f, psi_k> for every member."""
    if not f.grid.matches(sys.grid):
        raise GridMismatchError("function and system live on different grids")
    return sys.weighted.conj().T @ (np.sqrt(sys.grid.weights) * f.values)


def synthesize(sys: SynthesisSystem, coeffs) -> SampledFunction:
    """Linear combination sum_k c_k psi_k."""
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape != (sys.size,):
        raise ValueError(f"expected {sys.size} coefficients")
    return SampledFunction(sys.grid, sys.matrix @ coeffs)


def frame_operator_apply(sys: SynthesisSystem, f: SampledFunction) -> SampledFunction:
    """S f = sum_k <f, psi_k> psi_k."""
    return synthesize(sys, analyze(sys, f))


@dataclass(frozen=True)
class FrameFlags:
    bessel: bool
    frame_for_whole_space: bool
    frame_sequence: bool
    riesz_sequence: bool
    tight: bool

    def to_dict(self) -> dict:
        return {
            "bessel": self.bessel,
            "frame_for_whole_space": self.frame_for_whole_space,
            "frame_sequence": self.frame_sequence,
            "riesz_sequence": self.riesz_sequence,
            "tight": self.tight,
        }


@dataclass(frozen=True)
class FrameReport:
    """Measured spectral bounds of a synthesis system on its grid.

    ``lower`` is the smallest eigenvalue retained above rank_tol * upper, so
    for rank-deficient systems it is the bound on the span only;
    ``frame_for_whole_space`` records whether the span is everything.
    """

    lower: float
    upper: float
    rank: int
    dim_space: int
    n_members: int
    rank_tol: float
    flags: FrameFlags
    resolution: dict
    spectrum: np.ndarray = field(repr=False)
    gram_extremes: tuple | None = None
    spectra_cross_checked: bool = False

    def to_dict(self) -> dict:
        out = {
            "lower": self.lower,
            "upper": self.upper,
            "rank": self.rank,
            "dim_space": self.dim_space,
            "n_members": self.n_members,
            "rank_tol": self.rank_tol,
            "flags": self.flags.to_dict(),
            "resolution": self.resolution,
            "spectra_cross_checked": self.spectra_cross_checked,
        }
        if self.gram_extremes is not None:
            out["gram_extremes"] = list(self.gram_extremes)
        return out


def _grid_resolution(grid: Grid) -> dict:
    return {
        "nodes": int(grid.size),
        "measure": grid.domain.measure,
        "n_per_unit": grid.n_per_unit,
        "intervals": [[a, b] for a, b in grid.domain.intervals],
    }


def measure_bounds(sys: SynthesisSystem, rank_tol: float = 1e-8, bessel_bound=None) -> FrameReport:
    """Frame bounds and status flags from the weighted spectra.

    Computes the spectrum of S = U U^H and of the Gram G = U^H U (whichever
    fit the dense-eigensolve budget), cross-checks that their nonzero parts
    agree, and reads the bounds off the retained spectrum:

      upper = largest eigenvalue, rank = count above rank_tol * upper,
      lower = smallest retained eigenvalue.

    Flags: bessel is immediate for finite systems unless a caller bound is
    supplied; frame_for_whole_space needs rank == dim; riesz_sequence needs a
    fully retained Gram spectrum; tight means relative spread <= 1e-8.
    """
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    U = sys.weighted
    n, k = U.shape
    if min(n, k) > _FULL_SPECTRUM_LIMIT:
        raise FrameLabError(
            f"system of size {n} x {k} exceeds the dense spectral budget"
        )
    eigs_s = np.linalg.eigvalsh(U @ U.conj().T) if n <= _FULL_SPECTRUM_LIMIT else None
    eigs_g = np.linalg.eigvalsh(U.conj().T @ U) if k <= _FULL_SPECTRUM_LIMIT else None

    if eigs_s is not None:
        spectrum = np.clip(eigs_s[::-1], 0.0, None)
    else:
        nz = np.clip(eigs_g[::-1], 0.0, None)[: min(n, k)]
        spectrum = np.concatenate([nz, np.zeros(n - nz.size)])

    lam_max = float(spectrum[0]) if spectrum.size else 0.0
    if lam_max <= 0.0:
        retained = np.empty(0)
    else:
        retained = spectrum[spectrum > rank_tol * lam_max]
    rank = int(retained.size)
    upper = lam_max
    lower = float(retained[-1]) if rank else 0.0

    cross_checked = False
    if eigs_s is not None and eigs_g is not None:
        s_desc = np.clip(eigs_s[::-1], 0.0, None)[: min(n, k)]
        g_desc = np.clip(eigs_g[::-1], 0.0, None)[: min(n, k)]
        keep = np.maximum(s_desc, g_desc) > rank_tol * max(lam_max, 1e-300)
        if not np.allclose(s_desc[keep], g_desc[keep], rtol=1e-9, atol=1e-12 * max(lam_max, 1.0)):
            raise FrameLabError("spectral cross-check failed: S and Gram spectra disagree")
        cross_checked = True

    gram_extremes = None
    riesz = False
    if k <= n and eigs_g is not None:
        g_min = float(max(eigs_g[0], 0.0))
        g_max = float(max(eigs_g[-1], 0.0))
        gram_extremes = (g_min, g_max)
        riesz = g_max > 0.0 and g_min > rank_tol * g_max

    tight = rank >= 1 and (upper - lower) <= 1e-8 * upper
    bessel = True if bessel_bound is None else upper <= float(bessel_bound) * (1 + 1e-12)
    flags = FrameFlags(
        bessel=bool(bessel),
        frame_for_whole_space=bool(rank == n and rank >= 1),
        frame_sequence=bool(rank >= 1),
        riesz_sequence=bool(riesz),
        tight=bool(tight),
    )
    return FrameReport(
        lower=lower,
        upper=upper,
        rank=rank,
        dim_space=n,
        n_members=k,
        rank_tol=rank_tol,
        flags=flags,
        resolution=_grid_resolution(sys.grid),
        spectrum=spectrum,
        gram_extremes=gram_extremes,
        spectra_cross_checked=cross_checked,
    )


def write_spectrum_csv(report: FrameReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "eigenvalue"])
        for i, v in enumerate(report.spectrum):
            writer.writerow([i, repr(float(v))])


@dataclass(frozen=True)
class ReconstructionResult:
    coeffs: np.ndarray
    residual: float
    iterations: int


def reconstruct(sys: SynthesisSystem, f: SampledFunction, tol: float = 1e-10,
                max_iter: int = 500) -> ReconstructionResult:
    """Expansion coefficients c with sum_k c_k psi_k = f, via conjugate
    gradients on the frame operator.

    Solves S g = f from a zero start (iterates stay inside the span), then
    returns the analysis coefficients of g.  The error decreases monotonically
    in the S-norm; the reported residual is ||S g - f|| / ||f|| in the grid
    norm.  A target with a component off the span stalls with a residual that
    the members cannot see, which is reported as "not in span".
    """
    if not f.grid.matches(sys.grid):
        raise GridMismatchError("function and system live on different grids")
    if max_iter < 1:
        raise ValueError("max_iter must be positive")
    U = sys.weighted
    b = np.sqrt(sys.grid.weights) * f.values
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return ReconstructionResult(np.zeros(sys.size, dtype=complex), 0.0, 0)

    u_scale = float(np.linalg.norm(U))
    if u_scale == 0.0 or float(np.linalg.norm(U.conj().T @ b)) <= 1e-12 * u_scale * b_norm:
        raise NotInSpanError(
            "target is not in span: residual 1.000e+00 is invisible to the system",
            residual=1.0,
            iterations=0,
        )

    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rs = float(np.vdot(r, r).real)
    best_rel = math.inf
    best_x = x
    iterations = 0
    for iterations in range(1, max_iter + 1):
        q = U @ (U.conj().T @ p)
        den = float(np.vdot(p, q).real)
        pp = float(np.vdot(p, p).real)
        # relative guard: a step with Rayleigh quotient this far below the
        # operator scale is numerically in the null space; stepping along it
        # would only amplify roundoff
        if den <= 1e-28 * u_scale**2 * pp:
            break
        alpha = rs / den
        x = x + alpha * p
        r = r - alpha * q
        rel = float(np.linalg.norm(r)) / b_norm
        if rel < best_rel:
            best_rel = rel
            best_x = x
        if rel <= tol:
            break
        rs_new = float(np.vdot(r, r).real)
        p = r + (rs_new / rs) * p
        rs = rs_new

    residual_vec = b - U @ (U.conj().T @ best_x)
    residual = float(np.linalg.norm(residual_vec)) / b_norm
    coeffs = U.conj().T @ best_x
    if residual > tol:
        r_norm = float(np.linalg.norm(residual_vec))
        seen = float(np.linalg.norm(U.conj().T @ residual_vec))
        scale = float(np.linalg.norm(U)) * r_norm
        if scale == 0.0 or seen <= 1e-9 * scale:
            raise NotInSpanError(
                f"target is not in span: residual {residual:.3e} is invisible to the system",
                residual=residual,
                iterations=iterations,
            )
        raise ReconstructionError(
            f"no convergence within {max_iter} iterations (best residual {residual:.3e})",
            residual=residual,
            iterations=iterations,
        )
    return ReconstructionResult(coeffs, residual, iterations)
