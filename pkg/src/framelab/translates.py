"""Translate systems of a bandlimited generator, measured in frequency.

For h with spectrum supported on a bounded set, the shifted copies h(. - l)
pair with a bandlimited f through <f, h(. - l)> = <fhat, e_l hhat>, so every
translate measurement here is a multiplier measurement on the frequency grid:
the translate system of h along a point set is the exponential system times
hhat.  Time-side evaluations exist only to confirm that dictionary is unitary
at the discrete level.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .domain import Domain, Grid, SampledFunction, dilate
from .domain import make_grid
from .errors import FrameLabError, HypothesisError
from .framecore import (
    FrameReport,
    SynthesisSystem,
    analyze,
    exponential_system,
    measure_bounds,
    reconstruct,
)
from .multiplication import (
    MultCheckReport,
    RefinementTrace,
    _bounded_below,
    _within,
    multiply_system,
    profile_multiplier,
    profile_refinement,
    trend_is_stable,
)
from .pointset import PointSet

__all__ = [
    "Generator",
    "BumpSpec",
    "UnionPart",
    "UnionSpec",
    "ExpansionResult",
    "OuterFrameReport",
    "ConvolutionReport",
    "UnionReport",
    "ObstructionReport",
    "smoothstep",
    "build_bump_generator",
    "translate_system",
    "classify_translates",
    "obstruction_trend",
    "oversampled_expansion",
    "outer_frame_check",
    "convolution_closure_check",
    "union_check",
    "union_sweep",
    "time_frame_sum",
    "frequency_frame_sum",
    "expansion_tail_profile",
    "save_generator_csv",
    "load_generator_csv",
]


@dataclass(frozen=True, eq=False)
class Generator:
    """A generator given by its spectrum sampled on a frequency grid."""

    hat: SampledFunction
    label: str = "h"

    @property
    def grid(self) -> Grid:
        return self.hat.grid

    def time_values(self, x) -> np.ndarray:
        """h(x) = integral of hhat(w) e^{2 pi i w x} dw by grid quadrature."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        kernel = np.exp(2j * np.pi * np.outer(x, self.grid.nodes))
        return kernel @ (self.grid.weights * self.hat.values)

    @property
    def norm_sq(self) -> float:
        return self.hat.norm_sq


def save_generator_csv(gen: Generator, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["omega", "re", "im"])
        for w, v in zip(gen.grid.nodes, gen.hat.values):
            writer.writerow([repr(float(w)), repr(float(v.real)), repr(float(v.imag))])


def load_generator_csv(path, grid: Grid, label: str = "h") -> Generator:
    """Read (omega, re, im) rows; the omegas must match the grid nodes."""
    omegas, vals = [], []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().lower() == "omega":
                continue
            omegas.append(float(row[0]))
            vals.append(complex(float(row[1]), float(row[2])))
    omegas = np.asarray(omegas)
    if omegas.size != grid.size or not np.allclose(omegas, grid.nodes, rtol=0, atol=1e-9):
        raise FrameLabError("generator nodes do not match the analysis grid")
    return Generator(SampledFunction(grid, np.asarray(vals)), label=label)


def smoothstep(t):
    """C-infinity ramp: 0 for t <= 0, 1 for t >= 1, exp(-1/t) blend between."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    out[t >= 1.0] = 1.0
    mid = (t > 0.0) & (t < 1.0)
    if mid.any():
        tm = t[mid]
        a = np.exp(-1.0 / tm)
        b = np.exp(-1.0 / (1.0 - tm))
        out[mid] = a / (a + b)
    return out


@dataclass(frozen=True)
class BumpSpec:
    """Smooth plateau spec: identically one on base_domain, supported on its
    delta-dilation, with exp(-1/t) smoothstep transition bands."""

    base_domain: Domain
    delta: float

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be positive")

    @property
    def dilated(self) -> Domain:
        return dilate(self.base_domain, self.delta)

    def to_dict(self) -> dict:
        return {"intervals": [[a, b] for a, b in self.base_domain.intervals], "delta": self.delta}

    @classmethod
    def from_dict(cls, d) -> "BumpSpec":
        return cls(Domain(d["intervals"]), float(d["delta"]))

    def profile(self, omega) -> np.ndarray:
        """Unclamped plateau values at arbitrary frequencies."""
        omega = np.asarray(omega, dtype=float)
        out = np.zeros(omega.shape)
        d = self.delta
        for a, b in self.base_domain.intervals:
            rise = smoothstep((omega - (a - d)) / d)
            fall = smoothstep(((b + d) - omega) / d)
            out = out + rise * fall
        return np.clip(out, 0.0, 1.0)


_MIN_BAND_NODES = 16


def build_bump_generator(spec: BumpSpec, grid: Grid, label: str = "bump") -> Generator:
    """Sample the plateau on a grid covering the dilated domain.

    The values are clamped to exactly 1 on nodes of the base domain so that
    downstream identity checks are exact, and the grid must resolve the
    transition bands (at least 16 nodes per band).
    """
    E = spec.base_domain
    d = spec.delta
    for (_, b0), (a1, _) in zip(E.intervals, E.intervals[1:]):
        if a1 - b0 <= 2 * d:
            raise FrameLabError(
                "transition bands overlap: merge the touching intervals or shrink delta"
            )
    if grid.domain != spec.dilated:
        raise FrameLabError("grid does not cover the dilated domain of the bump")
    for a, b in E.intervals:
        for lo, hi in ((a - d, a), (b, b + d)):
            n_band = int(np.count_nonzero((grid.nodes > lo) & (grid.nodes < hi)))
            if n_band < _MIN_BAND_NODES:
                raise FrameLabError(
                    f"grid resolves a transition band with only {n_band} nodes; "
                    f"need at least {_MIN_BAND_NODES}"
                )
    values = spec.profile(grid.nodes).astype(complex)
    values[E.contains(grid.nodes)] = 1.0
    values[~spec.dilated.contains(grid.nodes)] = 0.0
    return Generator(SampledFunction(grid, values), label=label)


def translate_system(gen: Generator, ps: PointSet, freq_grid: Grid) -> SynthesisSystem:
    """Frequency-side translate system {e_lambda * hhat} along the point set."""
    if not gen.grid.matches(freq_grid):
        raise FrameLabError("generator is not sampled on the requested grid")
    return multiply_system(exponential_system(freq_grid, ps), gen.hat)


def classify_translates(gen: Generator, ps: PointSet, rank_tol: float = 1e-8,
                        zero_tol: float = 1e-12,
                        trace: RefinementTrace | None = None,
                        slack: float = 1e-9) -> MultCheckReport:
    """Frame status of the translate system, via the multiplier dictionary.

    The exponential system on the frequency grid must itself be a frame of
    the sampled space; the generator's spectrum then acts as the multiplier.
    Predictions: always Bessel; frame iff |hhat| bounded below on the band;
    frame sequence for the subspace carried by the support of hhat.
    """
    grid = gen.grid
    base = exponential_system(grid, ps)
    base_report = measure_bounds(base, rank_tol)
    if not base_report.flags.frame_for_whole_space:
        raise HypothesisError(
            "hypothesis violated: the exponential system is not a frame of the sampled band"
        )
    profile = profile_multiplier(grid, gen.hat, zero_tol)
    mult = multiply_system(base, gen.hat)
    mult_report = measure_bounds(mult, rank_tol)
    n_support = int(profile.support_mask.sum())

    if trace is not None:
        fs_predicted = trace.bounded_below_on_support
    else:
        fs_predicted = math.isfinite(profile.ess_inf_support) and profile.ess_inf_support > 0.0
    predicted = {
        "bessel": True,
        "frame": _bounded_below(profile, trace),
        "frame_sequence": fs_predicted,
    }
    measured = {
        "bessel": mult_report.flags.bessel,
        "frame": mult_report.flags.frame_for_whole_space,
        "frame_sequence": mult_report.flags.frame_sequence,
    }
    envelope = (
        base_report.lower * profile.ess_inf**2,
        base_report.upper * profile.ess_sup**2,
    )
    env_ok = (not predicted["frame"]) or _within(
        envelope[0], envelope[1], (mult_report.lower, mult_report.upper), slack
    )
    rank_ok = mult_report.rank == n_support
    consistent = predicted == measured and env_ok and rank_ok
    return MultCheckReport(
        check="translates",
        profile=profile,
        base_report=base_report,
        mult_report=mult_report,
        predicted=predicted,
        measured=measured,
        envelope=envelope,
        envelope_holds=env_ok,
        consistent=bool(consistent),
        details={
            "generator": gen.label,
            "support_nodes": n_support,
            "rank_matches_support": bool(rank_ok),
            "trace": None if trace is None else trace.to_dict(),
        },
    )


@dataclass(frozen=True)
class ObstructionReport:
    """Lower-bound trend of a translate system across grid refinements.

    The node lattice is re-matched to the grid dimension at every level, so a
    sinking trend is the generator's fault, not a rank deficit.  A spectrum
    that is continuous and vanishes somewhere on the closed band forces the
    trend to zero: no translate system of such a generator keeps a lower
    frame bound.
    """

    levels: tuple
    lower_bounds: tuple
    ratios: tuple
    hat_trace: RefinementTrace
    predicted_obstruction: bool
    measured_obstruction: bool
    consistent: bool

    def to_dict(self) -> dict:
        return {
            "levels": list(self.levels),
            "lower_bounds": list(self.lower_bounds),
            "ratios": list(self.ratios),
            "hat_trace": self.hat_trace.to_dict(),
            "predicted_obstruction": self.predicted_obstruction,
            "measured_obstruction": self.measured_obstruction,
            "consistent": self.consistent,
        }


def matched_lattice(grid: Grid) -> PointSet:
    """Frequency lattice of spacing 1/measure sized to the grid dimension.

    On a single-interval grid these exponentials are exactly orthogonal in
    the discrete inner product, so the bare exponential system is tight.
    """
    m = grid.domain.measure
    n = grid.size
    k = np.arange(n) - n // 2
    lam = k / m
    return PointSet.from_1d(lam, box=(lam[0] - 0.5 / m, lam[-1] + 0.5 / m))


def obstruction_trend(dom: Domain, hat_fn, levels=(64, 128, 256),
                      rank_tol: float = 1e-8, stability: float = 0.05,
                      lattice_for=None) -> ObstructionReport:
    """Measure the translate-system lower bound across refinements.

    ``hat_fn(nodes)`` samples the generator spectrum at each level;
    ``lattice_for(grid)`` overrides the default matched lattice.
    """
    if len(dom.intervals) != 1:
        raise FrameLabError("the obstruction sweep uses a single-interval band")
    levels = tuple(int(l) for l in levels)
    if len(levels) < 2:
        raise ValueError("need at least two refinement levels")
    make_ps = lattice_for if lattice_for is not None else matched_lattice
    lowers = []
    for lv in levels:
        g = make_grid(dom, lv)
        ps = make_ps(g)
        base = exponential_system(g, ps)
        hat = SampledFunction.from_callable(g, hat_fn)
        rep = measure_bounds(multiply_system(base, hat), rank_tol)
        lowers.append(rep.lower)
    ratios = tuple(
        lowers[i + 1] / lowers[i] if lowers[i] > 0 else math.inf for i in range(len(lowers) - 1)
    )
    hat_trace = profile_refinement(dom, hat_fn, levels, stability)
    predicted = not hat_trace.bounded_below
    measured = not trend_is_stable(lowers, stability)
    return ObstructionReport(
        levels=levels,
        lower_bounds=tuple(lowers),
        ratios=ratios,
        hat_trace=hat_trace,
        predicted_obstruction=bool(predicted),
        measured_obstruction=bool(measured),
        consistent=bool(predicted == measured),
    )


@dataclass(frozen=True, eq=False)
class ExpansionResult:
    """Oversampled expansion f(x) = sum_k alpha_k g(x - lambda_k).

    ``cg_residual`` is the solver residual on the exponential system;
    ``product_residual`` is the defect of the assembled identity
    fhat = (sum_k alpha_k e_k) * ghat; ``vanish_outside`` is the mass the
    exponential sum leaves outside the inner band, where the coefficients
    must conspire to cancel.
    """

    labels: np.ndarray
    alphas: np.ndarray
    cg_residual: float
    product_residual: float
    vanish_outside: float
    coeff_norm_sq: float
    coeff_bound: float
    coeff_bound_ok: bool
    exp_report: FrameReport
    band: Domain

    def to_records(self) -> list:
        return [
            {"lambda": float(l), "re": float(a.real), "im": float(a.imag)}
            for l, a in zip(self.labels, self.alphas)
        ]


def oversampled_expansion(f_hat: SampledFunction, gen: Generator, ps: PointSet,
                          band: Domain, tol: float = 1e-10, max_iter: int = 2000,
                          rank_tol: float = 1e-8) -> ExpansionResult:
    """Expand a function bandlimited to ``band`` over translates of a plateau
    generator along an oversampled point set.

    The grid covers the dilated band.  The exponential system along the point
    set must be a frame of the whole sampled space; its expansion of fhat
    automatically cancels outside the inner band (fhat vanishes there), and
    multiplying by the plateau, which is one on the band, reproduces fhat.
    """
    grid = f_hat.grid
    if not gen.grid.matches(grid):
        raise FrameLabError("generator and target live on different grids")
    inside = band.contains(grid.nodes)
    f_scale = float(np.abs(f_hat.values).max())
    if f_scale == 0.0:
        raise FrameLabError("target spectrum is identically zero")
    if np.abs(f_hat.values[~inside]).max(initial=0.0) > 1e-12 * f_scale:
        raise FrameLabError("target spectrum leaks outside the inner band")

    exp = exponential_system(grid, ps)
    exp_report = measure_bounds(exp, rank_tol)
    if not exp_report.flags.frame_for_whole_space:
        raise HypothesisError(
            "hypothesis violated: the oversampled exponential system is not a frame"
        )
    rec = reconstruct(exp, f_hat, tol=tol, max_iter=max_iter)
    alphas = rec.coeffs

    f_norm = f_hat.norm()
    s_vals = exp.matrix @ alphas
    vanish = math.sqrt(
        float(np.sum(grid.weights[~inside] * np.abs(s_vals[~inside]) ** 2))
    ) / f_norm
    recon = s_vals * gen.hat.values
    prod_residual = math.sqrt(
        float(np.sum(grid.weights * np.abs(recon - f_hat.values) ** 2))
    ) / f_norm

    coeff_norm_sq = float(np.vdot(alphas, alphas).real)
    coeff_bound = f_hat.norm_sq / exp_report.lower
    bound_ok = coeff_norm_sq <= coeff_bound * (1 + 1e-9)
    if not bound_ok:
        warnings.warn("expansion coefficients exceed the frame-bound budget", stacklevel=2)
    return ExpansionResult(
        labels=np.asarray(ps.xs),
        alphas=alphas,
        cg_residual=rec.residual,
        product_residual=prod_residual,
        vanish_outside=vanish,
        coeff_norm_sq=coeff_norm_sq,
        coeff_bound=coeff_bound,
        coeff_bound_ok=bool(bound_ok),
        exp_report=exp_report,
        band=band,
    )


@dataclass(frozen=True)
class OuterFrameReport:
    """Bounds of the translate system projected onto the inner band.

    For a plateau generator (identically one on the band) the projected
    system coincides with the band-restricted exponential system, so the
    bounds agree to machine precision.
    """

    projected_report: FrameReport
    reference_report: FrameReport
    full_report: FrameReport
    max_bound_dev: float
    bounds_equal: bool

    def to_dict(self) -> dict:
        return {
            "projected": self.projected_report.to_dict(),
            "reference": self.reference_report.to_dict(),
            "unprojected": self.full_report.to_dict(),
            "max_bound_dev": self.max_bound_dev,
            "bounds_equal": self.bounds_equal,
        }


def outer_frame_check(gen: Generator, ps: PointSet, band: Domain,
                      rank_tol: float = 1e-8, tol: float = 1e-10,
                      require_unit: bool = True) -> OuterFrameReport:
    """Project the translate system onto the inner band and compare with the
    band-restricted exponentials."""
    grid = gen.grid
    inside = band.contains(grid.nodes)
    if not inside.any():
        raise FrameLabError("band contains no grid nodes")
    if require_unit and np.abs(gen.hat.values[inside] - 1.0).max() > 1e-12:
        raise FrameLabError(
            "generator is not identically one on the inner band; "
            "projection would not reproduce the exponentials"
        )
    exp = exponential_system(grid, ps)
    chi = inside.astype(complex)
    projected = SynthesisSystem(grid, (chi * gen.hat.values)[:, None] * exp.matrix, exp.labels)
    reference = SynthesisSystem(grid, chi[:, None] * exp.matrix, exp.labels)
    proj_report = measure_bounds(projected, rank_tol)
    ref_report = measure_bounds(reference, rank_tol)
    full_report = measure_bounds(multiply_system(exp, gen.hat), rank_tol)
    scale = max(ref_report.upper, 1e-300)
    dev = max(
        abs(proj_report.lower - ref_report.lower),
        abs(proj_report.upper - ref_report.upper),
    )
    return OuterFrameReport(
        projected_report=proj_report,
        reference_report=ref_report,
        full_report=full_report,
        max_bound_dev=dev,
        bounds_equal=bool(dev <= tol * scale),
    )


@dataclass(frozen=True)
class ConvolutionReport:
    """Envelope checks for the translate system of a convolution.

    The convolution's spectrum is the pointwise product of the factor
    spectra, so interval arithmetic on the factor magnitudes brackets every
    measured quantity.
    """

    mode: str
    exp_report: FrameReport
    product_report: FrameReport | None
    envelope: tuple | None
    measured: tuple | None
    quotient_range: tuple | None
    within: bool
    consistent: bool
    details: dict

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "exponential": self.exp_report.to_dict(),
            "product": None if self.product_report is None else self.product_report.to_dict(),
            "envelope": None if self.envelope is None else list(self.envelope),
            "measured": None if self.measured is None else list(self.measured),
            "quotient_range": None if self.quotient_range is None else list(self.quotient_range),
            "within": self.within,
            "consistent": self.consistent,
            "details": {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.details.items()},
        }


_CONV_MODES = ("bessel", "frame", "frame_sequence", "quotient", "bessel_quotient")


def convolution_closure_check(gen_f: Generator, gen_g: Generator, ps: PointSet,
                              mode: str, rank_tol: float = 1e-8,
                              zero_tol: float = 1e-12, slack: float = 1e-9,
                              floor: float | None = None) -> ConvolutionReport:
    """Check one closure direction for the convolution of two generators.

    Modes: ``bessel`` and ``frame`` bracket the product system's bounds by
    products of the factor envelopes; ``frame_sequence`` does the same on the
    support intersection; ``quotient`` recovers the second factor's magnitude
    range from the product and the first factor; ``bessel_quotient`` bounds
    the second factor's system when the first is bounded below by ``floor``.
    """
    if mode not in _CONV_MODES:
        raise ValueError(f"unknown convolution mode {mode!r}")
    grid = gen_f.grid
    if not gen_g.grid.matches(grid):
        raise FrameLabError("generators live on different grids")
    prof_f = profile_multiplier(grid, gen_f.hat, zero_tol)
    prof_g = profile_multiplier(grid, gen_g.hat, zero_tol)
    product_hat = SampledFunction(grid, gen_f.hat.values * gen_g.hat.values)
    prof_p = profile_multiplier(grid, product_hat, zero_tol)
    exp = exponential_system(grid, ps)
    exp_report = measure_bounds(exp, rank_tol)
    m, M = exp_report.lower, exp_report.upper
    details: dict = {
        "factor_sup": (prof_f.ess_sup, prof_g.ess_sup),
        "factor_inf": (prof_f.ess_inf, prof_g.ess_inf),
    }

    def bounded_below(prof) -> bool:
        return prof.ess_inf > prof.zero_tol * prof.ess_sup and prof.ess_inf > 0.0

    if mode == "bessel":
        product_report = measure_bounds(multiply_system(exp, product_hat), rank_tol)
        hi = M * (prof_f.ess_sup * prof_g.ess_sup) ** 2
        within = product_report.upper <= hi * (1 + slack) + 1e-300
        return ConvolutionReport(
            mode=mode,
            exp_report=exp_report,
            product_report=product_report,
            envelope=(0.0, hi),
            measured=(product_report.lower, product_report.upper),
            quotient_range=None,
            within=bool(within),
            consistent=bool(within),
            details=details,
        )

    if mode == "frame":
        if not exp_report.flags.frame_for_whole_space:
            raise HypothesisError("hypothesis violated: exponentials are not a frame of the band")
        if not (bounded_below(prof_f) and bounded_below(prof_g)):
            raise HypothesisError("hypothesis violated: a factor is not bounded below on the band")
        product_report = measure_bounds(multiply_system(exp, product_hat), rank_tol)
        env = (
            m * (prof_f.ess_inf * prof_g.ess_inf) ** 2,
            M * (prof_f.ess_sup * prof_g.ess_sup) ** 2,
        )
        within = _within(env[0], env[1], (product_report.lower, product_report.upper), slack)
        ok = within and product_report.flags.frame_for_whole_space
        return ConvolutionReport(
            mode=mode,
            exp_report=exp_report,
            product_report=product_report,
            envelope=env,
            measured=(product_report.lower, product_report.upper),
            quotient_range=None,
            within=bool(within),
            consistent=bool(ok),
            details=details,
        )

    if mode == "frame_sequence":
        mask = prof_p.support_mask
        if not mask.any():
            raise FrameLabError("zero product: supports do not intersect")
        inf_f = float(np.abs(gen_f.hat.values[mask]).min())
        inf_g = float(np.abs(gen_g.hat.values[mask]).min())
        product_report = measure_bounds(multiply_system(exp, product_hat), rank_tol)
        env = (m * (inf_f * inf_g) ** 2, M * (prof_f.ess_sup * prof_g.ess_sup) ** 2)
        within = _within(env[0], env[1], (product_report.lower, product_report.upper), slack)
        rank_ok = product_report.rank == int(mask.sum())
        details["support_nodes"] = int(mask.sum())
        details["rank_matches_support"] = bool(rank_ok)
        return ConvolutionReport(
            mode=mode,
            exp_report=exp_report,
            product_report=product_report,
            envelope=env,
            measured=(product_report.lower, product_report.upper),
            quotient_range=None,
            within=bool(within),
            consistent=bool(within and rank_ok),
            details=details,
        )

    if mode == "quotient":
        if not bounded_below(prof_f):
            raise FrameLabError("first factor is not bounded below; quotient is unbounded")
        lo = prof_p.ess_inf / prof_f.ess_sup
        hi = prof_p.ess_sup / prof_f.ess_inf
        g_mag = np.abs(gen_g.hat.values)
        within = (
            float(g_mag.min()) >= lo * (1 - slack) - 1e-300
            and float(g_mag.max()) <= hi * (1 + slack) + 1e-300
        )
        details["g_range"] = (float(g_mag.min()), float(g_mag.max()))
        return ConvolutionReport(
            mode=mode,
            exp_report=exp_report,
            product_report=None,
            envelope=None,
            measured=None,
            quotient_range=(lo, hi),
            within=bool(within),
            consistent=bool(within),
            details=details,
        )

    # bessel_quotient
    if floor is None:
        floor = prof_f.ess_inf
    if floor <= prof_f.zero_tol * prof_f.ess_sup or floor <= 0.0:
        raise FrameLabError("first factor is not bounded below by a positive floor")
    if prof_f.ess_inf < floor * (1 - 1e-12):
        raise FrameLabError("declared floor exceeds the first factor's actual infimum")
    sup_bound = prof_p.ess_sup / floor
    g_report = measure_bounds(multiply_system(exp, gen_g.hat), rank_tol)
    upper_bound = M * sup_bound**2
    ok = (
        prof_g.ess_sup <= sup_bound * (1 + slack)
        and g_report.upper <= upper_bound * (1 + slack) + 1e-300
    )
    details["sup_bound"] = float(sup_bound)
    details["g_upper_bound"] = float(upper_bound)
    return ConvolutionReport(
        mode=mode,
        exp_report=exp_report,
        product_report=g_report,
        envelope=(0.0, upper_bound),
        measured=(g_report.lower, g_report.upper),
        quotient_range=(0.0, sup_bound),
        within=bool(ok),
        consistent=bool(ok),
        details=details,
    )


@dataclass(frozen=True, eq=False)
class UnionPart:
    """One band with its generator spectrum (a vectorized callable)."""

    domain: Domain
    hat_fn: object
    label: str = ""


@dataclass(frozen=True, eq=False)
class UnionSpec:
    """Bands E_j with generators h_j sharing one translation point set."""

    parts: tuple
    pointset: PointSet

    def __post_init__(self):
        if not self.parts:
            raise ValueError("union needs at least one part")
        object.__setattr__(self, "parts", tuple(self.parts))


@dataclass(frozen=True)
class UnionReport:
    """Stacked translate system over a union of bands.

    p_hat/P_hat are the grid extrema of sum_j |hhat_j|^2 over the union;
    the stacked bounds must land in [min_j m_j * p_hat, max_j M_j * P_hat]
    where (m_j, M_j) are the band-restricted exponential bounds.
    """

    total_report: FrameReport
    part_bounds: tuple
    part_ranks: tuple
    p_hat: float
    P_hat: float
    m: float
    M: float
    envelope: tuple
    within: bool
    consistent: bool

    def to_dict(self) -> dict:
        return {
            "total": self.total_report.to_dict(),
            "part_bounds": [list(b) for b in self.part_bounds],
            "part_ranks": list(self.part_ranks),
            "p_hat": self.p_hat,
            "P_hat": self.P_hat,
            "m": self.m,
            "M": self.M,
            "envelope": list(self.envelope),
            "within": self.within,
            "consistent": self.consistent,
        }


def union_check(spec: UnionSpec, n_per_unit: int, rank_tol: float = 1e-8,
                slack: float = 1e-9) -> UnionReport:
    """Measure the stacked system {e_lambda chi_j hhat_j} on the union grid."""
    union_dom = Domain.merged(
        iv for part in spec.parts for iv in part.domain.intervals
    )
    grid = make_grid(union_dom, n_per_unit)
    exp = exponential_system(grid, spec.pointset)
    blocks, part_bounds, part_ranks = [], [], []
    sum_sq = np.zeros(grid.size)
    for part in spec.parts:
        mask = part.domain.contains(grid.nodes)
        hat = np.asarray(part.hat_fn(grid.nodes), dtype=complex) * mask
        sum_sq += np.abs(hat) ** 2
        blocks.append(hat[:, None] * exp.matrix)
        masked = SynthesisSystem(grid, mask.astype(complex)[:, None] * exp.matrix, exp.labels)
        rep = measure_bounds(masked, rank_tol)
        part_bounds.append((rep.lower, rep.upper))
        part_ranks.append(rep.rank)
    stacked = SynthesisSystem(
        grid,
        np.concatenate(blocks, axis=1),
        labels=[
            (float(l), part.label or str(j))
            for j, part in enumerate(spec.parts)
            for l in exp.labels
        ],
    )
    total_report = measure_bounds(stacked, rank_tol)
    p_hat = float(sum_sq.min())
    P_hat = float(sum_sq.max())
    m = min(b[0] for b in part_bounds)
    M = max(b[1] for b in part_bounds)
    envelope = (m * p_hat, M * P_hat)
    frame_measured = total_report.flags.frame_for_whole_space
    p_positive = p_hat > rank_tol * max(P_hat, 1e-300)
    within = (not frame_measured) or _within(
        envelope[0], envelope[1], (total_report.lower, total_report.upper), slack
    )
    consistent = (frame_measured == p_positive) and within
    return UnionReport(
        total_report=total_report,
        part_bounds=tuple(part_bounds),
        part_ranks=tuple(part_ranks),
        p_hat=p_hat,
        P_hat=P_hat,
        m=m,
        M=M,
        envelope=envelope,
        within=bool(within),
        consistent=bool(consistent),
    )


@dataclass(frozen=True)
class UnionSweepReport:
    levels: tuple
    reports: tuple
    p_hats: tuple
    lowers: tuple
    predicted_frame: bool
    measured_frame: bool
    consistent: bool

    def to_dict(self) -> dict:
        return {
            "levels": list(self.levels),
            "p_hats": list(self.p_hats),
            "lowers": list(self.lowers),
            "predicted_frame": self.predicted_frame,
            "measured_frame": self.measured_frame,
            "consistent": self.consistent,
            "reports": [r.to_dict() for r in self.reports],
        }


def union_sweep(spec: UnionSpec, levels=(64, 128, 256), rank_tol: float = 1e-8,
                stability: float = 0.05) -> UnionSweepReport:
    """Union check across refinements: a common zero of every generator drives
    p_hat, and with it the stacked lower bound, to zero."""
    levels = tuple(int(l) for l in levels)
    reports = [union_check(spec, lv, rank_tol) for lv in levels]
    p_hats = [r.p_hat for r in reports]
    lowers = [r.total_report.lower for r in reports]
    predicted = trend_is_stable(p_hats, stability)
    measured = trend_is_stable(lowers, stability)
    consistent = predicted == measured and all(r.within for r in reports)
    return UnionSweepReport(
        levels=levels,
        reports=tuple(reports),
        p_hats=tuple(p_hats),
        lowers=tuple(lowers),
        predicted_frame=bool(predicted),
        measured_frame=bool(measured),
        consistent=bool(consistent),
    )


def frequency_frame_sum(gen: Generator, ps: PointSet, f_hat: SampledFunction) -> float:
    """sum_k |<fhat, e_k hhat>|^2 on the frequency grid."""
    sys = translate_system(gen, ps, gen.grid)
    coeffs = analyze(sys, f_hat)
    return float(np.vdot(coeffs, coeffs).real)


def time_frame_sum(gen: Generator, ps: PointSet, f_hat: SampledFunction,
                   half_width: float | None = None, dt: float | None = None) -> float:
    """sum_k |<f, h(. - lambda_k)>|^2 by time-domain quadrature.

    Both f and h are evaluated in time from their grid spectra.  With the
    default window (half width 1/(2 * node spacing) on a uniform grid) the
    discrete time sum reproduces the frequency-side sum exactly: the node
    frequency differences are multiples of the spacing, and those exponentials
    integrate to zero over the matched window.
    """
    grid = gen.grid
    if not f_hat.grid.matches(grid):
        raise FrameLabError("target and generator live on different grids")
    w = grid.weights
    omega = grid.nodes
    if half_width is None:
        step = float(w[0])
        if not np.allclose(w, step, rtol=1e-12, atol=0):
            raise FrameLabError("matched window needs a uniform grid; pass half_width")
        half_width = 1.0 / (2.0 * step)
    span = float(omega[-1] - omega[0])
    if dt is None:
        m_steps = int(math.ceil(2.0 * half_width * (span + 1.0)))
    else:
        m_steps = max(1, int(math.ceil(2.0 * half_width / dt)))
    dt = 2.0 * half_width / m_steps
    x = -half_width + (np.arange(m_steps) + 0.5) * dt
    kernel = np.exp(2j * np.pi * np.outer(x, omega))
    f_time = kernel @ (w * f_hat.values)
    shifts = np.exp(-2j * np.pi * np.outer(omega, ps.xs))
    h_shifted = kernel @ (w[:, None] * gen.hat.values[:, None] * shifts)
    inner_products = dt * (h_shifted.conj().T @ f_time)
    return float(np.vdot(inner_products, inner_products).real)


def expansion_tail_profile(gen: Generator, ps: PointSet, alphas, xs, radii) -> dict:
    """Sup-norm tails of sum_{|lambda| > R} alpha_k g(x - lambda_k) on a window,
    with the Cauchy-Schwarz budget ||alpha_tail|| * sqrt(sum |g(x - lambda)|^2)."""
    xs = np.asarray(xs, dtype=float)
    alphas = np.asarray(alphas, dtype=complex)
    lam = ps.xs
    if alphas.shape != lam.shape:
        raise ValueError("one coefficient per point required")
    grid = gen.grid
    kernel = np.exp(2j * np.pi * np.outer(xs, grid.nodes))
    shifts = np.exp(-2j * np.pi * np.outer(grid.nodes, lam))
    g_shifted = kernel @ (grid.weights[:, None] * gen.hat.values[:, None] * shifts)
    tail_max, cs_bound = [], []
    for r in radii:
        mask = np.abs(lam) > r
        if mask.any():
            tail = g_shifted[:, mask] @ alphas[mask]
            tail_max.append(float(np.abs(tail).max()))
            budget = float(np.linalg.norm(alphas[mask])) * float(
                np.sqrt((np.abs(g_shifted[:, mask]) ** 2).sum(axis=1)).max()
            )
            cs_bound.append(budget)
        else:
            tail_max.append(0.0)
            cs_bound.append(0.0)
    return {"radii": list(radii), "tail_max": tail_max, "cs_bound": cs_bound}
