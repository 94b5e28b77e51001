"""Numerical derivative checks via Taylor-remainder slope tests.

If the gradient is correct, the remainder f(R_x(t u)) - f(x) - t <g, u>
shrinks like t^2; if the Hessian is also correct (and the retraction is
second order), subtracting the t^2/2 <u, H u> term leaves a t^3 remainder.
The checks sample the remainder over log-spaced t, fit a log-log slope over
the cleanest window, and compare it to the expected order.  Exactly linear
or quadratic costs produce remainders at machine precision; those pass
through a dedicated branch instead of the slope fit.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .problem import ProblemDef, get_cost, get_gradient, get_hessian
from .exceptions import MissingDerivativeError

NUM_SAMPLES = 51
T_MIN, T_MAX = 1e-8, 1.0
WINDOW = 13
GRADIENT_SLOPE_RANGE = (1.8, 2.2)
HESSIAN_SLOPE_RANGE = (2.7, 3.3)
EXACT_REMAINDER_SCALE = 1e-12
TANGENCY_TOL = 1e-8


@dataclass
class SlopeReport:
    samples: list  # (t, remainder) pairs, sorted by t
    fitted_slope: float
    window: tuple  # (t_low, t_high) of the selected fitting span
    tangency_residual: float
    verdict: bool
    expected_slope_range: tuple
    exact_branch: bool = False
    symmetry_residual: Optional[float] = None
    linearity_residual: Optional[float] = None
    flags: list = field(default_factory=list)

    def summary(self) -> str:
        status = "PASS" if self.verdict else "FAIL"
        lo, hi = self.expected_slope_range
        lines = [
            f"{status}: fitted slope {self.fitted_slope:.4f} "
            f"(expected in [{lo}, {hi}])"
            + (" [exact-remainder branch]" if self.exact_branch else ""),
            f"window: t in [{self.window[0]:.3e}, {self.window[1]:.3e}]",
            f"tangency residual: {self.tangency_residual:.3e}",
        ]
        for flag in self.flags:
            lines.append(f"flag: {flag}")
        return "\n".join(lines)


def fit_loglog_slope(ts, remainders, window: int = WINDOW):
    """Least-squares log-log slope over the contiguous window (of the given
    length) with the smallest line-fit residual.

    Returns (slope, (t_low, t_high)).  Zero remainders are clamped to a tiny
    floor so the logs stay finite; such windows fit badly and lose.
    """
    ts = np.asarray(ts, dtype=float)
    rem = np.maximum(np.asarray(remainders, dtype=float), 1e-300)
    lt = np.log10(ts)
    lr = np.log10(rem)
    n = len(ts)
    if n < 2:
        raise ValueError("need at least two samples to fit a slope")
    window = min(window, n)
    best = None
    for start in range(0, n - window + 1):
        sl = slice(start, start + window)
        coeffs, residuals, *_ = np.polyfit(lt[sl], lr[sl], 1, full=True)
        resid = float(residuals[0]) if len(residuals) else 0.0
        if best is None or resid < best[0]:
            best = (resid, float(coeffs[0]), (float(ts[sl][0]), float(ts[sl][-1])))
    _, slope, span = best
    return slope, span


def _resolve_point_direction(p: ProblemDef, x, u, rng):
    M = p.manifold
    rng = rng if rng is not None else np.random.default_rng(0)
    if x is None:
        x = M.rand_point(rng)
    if u is None:
        u = M.rand_tangent(x, rng)
    return x, u


def check_gradient(p: ProblemDef, x=None, u=None, rng=None) -> SlopeReport:
    """First-order Taylor test of the gradient along a tangent direction."""
    if not p.has_gradient():
        raise MissingDerivativeError("check_gradient needs 'egrad' or 'rgrad'")
    M = p.manifold
    x, u = _resolve_point_direction(p, x, u, rng)
    f0 = get_cost(p, x)
    g = get_gradient(p, x)
    df = M.inner(x, g, u)

    ts = np.logspace(np.log10(T_MIN), np.log10(T_MAX), NUM_SAMPLES)
    rem = np.array([abs(get_cost(p, M.retract(x, u, t)) - f0 - t * df) for t in ts])

    g_proj = M.proj(x, M.tangent_to_ambient(x, g))
    tangency = M.norm(x, M.lincomb(x, 1.0, g, -1.0, g_proj)) / max(1.0, M.norm(x, g))

    slope, span = fit_loglog_slope(ts, rem)
    exact = bool(np.all(rem <= EXACT_REMAINDER_SCALE * max(1.0, abs(f0))))
    lo, hi = GRADIENT_SLOPE_RANGE
    verdict = (exact or lo <= slope <= hi) and tangency <= TANGENCY_TOL

    report = SlopeReport(
        samples=list(zip(ts.tolist(), rem.tolist())),
        fitted_slope=slope,
        window=span,
        tangency_residual=float(tangency),
        verdict=verdict,
        expected_slope_range=GRADIENT_SLOPE_RANGE,
        exact_branch=exact,
    )
    if tangency > TANGENCY_TOL:
        report.flags.append(f"gradient not tangent (residual {tangency:.3e})")
    return report


def check_hessian(p: ProblemDef, x=None, u=None, rng=None) -> SlopeReport:
    """Second-order Taylor test of the Hessian, plus symmetry and linearity
    audits over random tangent pairs.

    Expects slope 3 for second-order retractions; otherwise the slope-2
    remainder of the retraction itself dominates and only slope 2 plus the
    audits can be verified.
    """
    if not p.has_gradient():
        raise MissingDerivativeError("check_hessian needs a gradient")
    if not p.has_exact_hessian():
        warnings.warn(
            "check_hessian running against the FD Hessian approximation; "
            "expect looser symmetry",
            stacklevel=2,
        )
    M = p.manifold
    rng = rng if rng is not None else np.random.default_rng(0)
    x, u = _resolve_point_direction(p, x, u, rng)
    f0 = get_cost(p, x)
    g = get_gradient(p, x)
    hu = get_hessian(p, x, u)
    df = M.inner(x, g, u)
    d2f = M.inner(x, u, hu)

    ts = np.logspace(np.log10(T_MIN), np.log10(T_MAX), NUM_SAMPLES)
    rem = np.array(
        [
            abs(get_cost(p, M.retract(x, u, t)) - f0 - t * df - 0.5 * t * t * d2f)
            for t in ts
        ]
    )

    expected = HESSIAN_SLOPE_RANGE if M.second_order_retraction else GRADIENT_SLOPE_RANGE
    slope, span = fit_loglog_slope(ts, rem)
    exact = bool(np.all(rem <= EXACT_REMAINDER_SCALE * max(1.0, abs(f0))))
    verdict = exact or expected[0] <= slope <= expected[1]

    hu_proj = M.proj(x, M.tangent_to_ambient(x, hu))
    tangency = M.norm(x, M.lincomb(x, 1.0, hu, -1.0, hu_proj)) / max(1.0, M.norm(x, hu))

    report = SlopeReport(
        samples=list(zip(ts.tolist(), rem.tolist())),
        fitted_slope=slope,
        window=span,
        tangency_residual=float(tangency),
        verdict=verdict,
        expected_slope_range=expected,
        exact_branch=exact,
    )

    # Symmetry audit: <H v, w> vs <v, H w> over random pairs.
    sym = 0.0
    for _ in range(10):
        v = M.rand_tangent(x, rng)
        w = M.rand_tangent(x, rng)
        hv = get_hessian(p, x, v)
        hw = get_hessian(p, x, w)
        a = M.inner(x, hv, w)
        b = M.inner(x, v, hw)
        sym = max(sym, abs(a - b) / max(1.0, abs(a)))
    report.symmetry_residual = sym
    if sym > 1e-8:
        report.flags.append(f"Hessian asymmetry {sym:.3e}")

    # Linearity audit: H(a v + b w) vs a Hv + b Hw.
    v = M.rand_tangent(x, rng)
    w = M.rand_tangent(x, rng)
    a, b = 0.7, -1.3
    combo = get_hessian(p, x, M.lincomb(x, a, v, b, w))
    ref = M.lincomb(x, a, get_hessian(p, x, v), b, get_hessian(p, x, w))
    lin = M.norm(x, M.lincomb(x, 1.0, combo, -1.0, ref)) / max(1.0, M.norm(x, ref))
    report.linearity_residual = lin
    if lin > 1e-10:
        report.flags.append(f"Hessian nonlinearity {lin:.3e}")
    if p.has_exact_hessian():
        # The slope test only sees <u, Hu>; an exact Hessian must also be
        # symmetric and linear (the FD approximation is exempt).
        report.verdict = report.verdict and sym <= 1e-8 and lin <= 1e-10
    return report


def export_slope_csv(report: SlopeReport, path) -> None:
    """Write the (t, remainder) samples with 17 significant digits."""
    try:
        with open(path, "w") as fh:
            fh.write("t,remainder\n")
            for t, r in report.samples:
                fh.write(f"{t:.17g},{r:.17g}\n")
    except OSError as exc:
        raise OSError(f"failed writing slope CSV to {path}: {exc}") from exc
