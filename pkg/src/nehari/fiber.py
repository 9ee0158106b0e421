"""Restriction of an energy functional to rays, and the Nehari projection.

For a fixed nonzero direction ``u`` the ray energy ``gamma(t) = Phi(t u)`` has
slope ``g(t) = Phi'(t u) u``.  Under the mountain-pass geometry the slope is
positive for small ``t``, negative for large ``t``, and ``g(t) / t^(p_hom-1)``
is strictly decreasing, so ``g`` vanishes exactly once; that root ``t_u``
projects the ray onto the constraint set ``{u != 0 : Phi'(u) u = 0}``.

:class:`FiberLine` precomputes the direction-dependent quantities (moments of
``|u|`` and of the cell gradients), after which every ``gamma``/``g``
evaluation is a scalar formula for the closed-form operator kinds.  This keeps
scans and repeated projections cheap inside the solver loop.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDirectionError, HypothesisViolationError, ParameterError
from .functionals import GRAD_EPS, Functional
from .grid import Field, axis_square_cells

#: default projection tolerance, relative to the slope scale at the bracket
DEFAULT_TOL = 1e-10
#: default number of log-spaced scan points for diagnostics and certificates
DEFAULT_SCAN_POINTS = 200
_BRACKET_CAP = 1e9
_BRACKET_FLOOR = 1e-18
_MAX_BISECTIONS = 80


@dataclass
class FiberDiagnostics:
    """Record of one projection: root, residual slope, bracket and scan data."""

    t_root: float
    slope_at_root: float
    bracket: tuple[float, float]
    iterations: int
    sign_changes_observed: int | None = None
    monotone_certificate: bool | None = None


@dataclass
class DirectionCertificate:
    """Sampled evidence for the ray geometry along one direction.

    The three booleans certify, on the scan grid only (finite samples cannot
    prove limits): (i) ``g(t)/t^(p_hom-1)`` strictly decreasing, (ii)
    ``gamma(t) - t g(t)/p_hom`` strictly increasing, (iii) exactly one sign
    change of ``g``.
    """

    slope_ratio_decreasing: bool
    energy_gap_increasing: bool
    single_sign_change: bool
    sign_changes: int
    scan: np.ndarray
    witness: dict | None = None
    label: str = "sampled"

    def all_hold(self) -> bool:
        return (self.slope_ratio_decreasing and self.energy_gap_increasing
                and self.single_sign_change)


class FiberLine:
    """Ray restriction ``t -> Phi(t u)`` with cached direction data.

    ``value`` and ``slope`` accept scalars or arrays of positive ``t``.  For
    the closed-form operator kinds both reduce to power sums in ``t``; only a
    tabulated quasilinear coefficient still needs a per-``t`` pass over the
    cell data.
    """

    def __init__(self, functional: Functional, direction: Field):
        functional._check_field(direction, "direction")
        vals = direction.values
        if not np.any(vals):
            raise DegenerateDirectionError("fiber direction must be nonzero")
        self.functional = functional
        self.direction = direction
        grid = functional.grid
        vol = grid.cell_volume
        nl = functional.nonlinearity
        self._alphas = np.asarray(nl.exponents)
        absvals = np.abs(vals)
        self._fmoments = np.asarray(
            [c * vol * float(np.sum(absvals ** a))
             for a, c in zip(nl.exponents, nl.coefficients)])

        squares = [axis_square_cells(grid, vals, i) for i in range(grid.dim)]
        op = functional.operator
        kind = functional.kind
        if kind == "kirchhoff":
            self._S2 = vol * float(np.sum(sum(squares)))
        elif kind == "anisotropic":
            self._Sax = np.asarray(
                [vol * float(np.sum(s ** (p / 2.0)))
                 for p, s in zip(op.pvec, squares)])
            self._pvec = np.asarray(op.pvec)
        else:
            g2 = sum(squares)
            self._Sp = vol * float(np.sum(g2 ** (op.p / 2.0)))
            if op.kind == "p_plus_q":
                self._Sq = vol * float(np.sum(g2 ** (op.q / 2.0)))
            elif op.kind == "user_table":
                self._s0 = (g2 ** (op.p / 2.0)).ravel()
                self._vol = vol

    # -- nonlinearity parts --------------------------------------------------

    def _nl_value(self, t: np.ndarray) -> np.ndarray:
        powers = t[..., None] ** self._alphas
        return powers @ (self._fmoments / self._alphas)

    def _nl_slope(self, t: np.ndarray) -> np.ndarray:
        powers = t[..., None] ** (self._alphas - 1.0)
        return powers @ self._fmoments

    # -- operator parts --------------------------------------------------------

    def _grad_value(self, t: np.ndarray) -> np.ndarray:
        F = self.functional
        op = F.operator
        if F.kind == "kirchhoff":
            return 0.5 * op.M_hat(t * t * self._S2)
        if F.kind == "anisotropic":
            return (t[..., None] ** self._pvec) @ (self._Sax / self._pvec)
        p, q = op.p, op.q
        if op.kind == "constant_one":
            return (t ** p) * self._Sp / p
        if op.kind == "p_plus_q":
            return ((t ** p) * self._Sp + (p / q) * (t ** q) * self._Sq) / p
        flat = np.asarray(t, dtype=float).ravel()
        out = np.asarray([self._vol * float(np.sum(op.A((tk ** p) * self._s0)))
                          for tk in flat]) / p
        return out.reshape(np.shape(t))

    def _grad_slope(self, t: np.ndarray) -> np.ndarray:
        F = self.functional
        op = F.operator
        if F.kind == "kirchhoff":
            return op.M(t * t * self._S2) * t * self._S2
        if F.kind == "anisotropic":
            return (t[..., None] ** (self._pvec - 1.0)) @ self._Sax
        p, q = op.p, op.q
        if op.kind == "constant_one":
            return (t ** (p - 1.0)) * self._Sp
        if op.kind == "p_plus_q":
            return (t ** (p - 1.0)) * self._Sp + (t ** (q - 1.0)) * self._Sq
        flat = np.asarray(t, dtype=float).ravel()
        out = np.asarray(
            [(tk ** (p - 1.0)) * self._vol
             * float(np.sum(op.a((tk ** p) * self._s0 + GRAD_EPS) * self._s0))
             for tk in flat])
        return out.reshape(np.shape(t))

    # -- public evaluations ----------------------------------------------------

    def _as_t(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0.0):
            raise ParameterError("fiber parameter t must be positive")
        return t

    def value(self, t):
        """gamma(t) = Phi(t u)."""
        t = self._as_t(t)
        out = self._grad_value(t) - self._nl_value(t)
        return float(out) if out.ndim == 0 else out

    def slope(self, t):
        """g(t) = Phi'(t u) u, the t-derivative of :meth:`value`."""
        t = self._as_t(t)
        out = self._grad_slope(t) - self._nl_slope(t)
        return float(out) if out.ndim == 0 else out

    def slope_parts(self, t) -> tuple[float, float]:
        """The positive and negative parts (J0, J) of ``Phi'(tu)(tu)``."""
        t = self._as_t(t)
        return (float(self._grad_slope(t) * t), float(self._nl_slope(t) * t))


def fiber_value(F: Functional, u: Field, t: float) -> float:
    """Ray energy Phi(t u) for a nonzero direction and t > 0."""
    return FiberLine(F, u).value(t)


def fiber_slope(F: Functional, u: Field, t: float) -> float:
    """Ray slope Phi'(t u) u; matches central differences of the ray energy."""
    return FiberLine(F, u).slope(t)


def _solve_slope_root(line: FiberLine, tol: float,
                      t_init: float | None = None) -> tuple[float, float, tuple, int]:
    """Bracketed (geometric) bisection on the ray slope.

    Returns ``(root, slope_at_root, bracket, iterations)``.  The bracket is
    grown geometrically from [1e-6, 1] (or around ``t_init``) until the slope
    changes sign; failure to find a sign change by t = 1e9 means the
    configured functional does not have the required ray geometry.
    """
    if t_init is not None and t_init > 0.0:
        lo, hi = 0.5 * t_init, 2.0 * t_init
    else:
        lo, hi = 1e-6, 1.0
    trace = []

    def g(t):
        val = line.slope(t)
        trace.append((t, val))
        return val

    g_lo = g(lo)
    while g_lo <= 0.0:
        if g_lo == 0.0:
            return lo, 0.0, (lo, lo), 0
        hi, g_hi = lo, g_lo
        lo *= 0.5
        if lo < _BRACKET_FLOOR:
            raise HypothesisViolationError(
                "ray slope has no positive values down to t = 1e-18; "
                "small-t coercivity looks violated", trace)
        g_lo = g(lo)
    g_hi = g(hi)
    while g_hi >= 0.0:
        if g_hi == 0.0:
            return hi, 0.0, (hi, hi), 0
        lo, g_lo = hi, g_hi
        hi *= 2.0
        if hi > _BRACKET_CAP:
            raise HypothesisViolationError(
                "ray slope never changes sign up to t = 1e9; the functional "
                "fails the mountain-pass geometry", trace)
        g_hi = g(hi)

    bracket = (lo, hi)
    scale = max(abs(g_lo), abs(g_hi))
    root, g_root = lo, g_lo
    iterations = 0
    for _ in range(_MAX_BISECTIONS):
        mid = np.sqrt(lo * hi)
        if not lo < mid < hi:
            break
        g_mid = g(mid)
        iterations += 1
        if abs(g_mid) <= tol * scale:
            root, g_root = mid, g_mid
            break
        if g_mid > 0.0:
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
        # keep the endpoint with the smaller slope as the provisional root
        root, g_root = (lo, g_lo) if abs(g_lo) <= abs(g_hi) else (hi, g_hi)
    # single Newton polish with a central-difference derivative
    delta = 1e-6 * root
    if delta > 0.0:
        deriv = (line.slope(root + delta) - line.slope(root - delta)) / (2.0 * delta)
        if deriv != 0.0 and np.isfinite(deriv):
            cand = root - g_root / deriv
            if bracket[0] < cand < bracket[1]:
                g_cand = line.slope(cand)
                if abs(g_cand) < abs(g_root):
                    root, g_root = cand, g_cand
    return float(root), float(g_root), bracket, iterations


def project_to_nehari(F: Functional, u: Field, tol: float = DEFAULT_TOL, *,
                      scan_points: int = DEFAULT_SCAN_POINTS,
                      t_init: float | None = None) -> tuple[float, FiberDiagnostics]:
    """Locate the unique t_u > 0 with Phi'(t_u u) u = 0 along direction u.

    ``t_u * u`` then satisfies the constraint Phi'(v) v = 0 and maximizes the
    ray energy.  With ``scan_points > 0`` the diagnostics record the number of
    slope sign changes and the monotonicity certificate on a log grid spanning
    [1e-3, 1e3] * t_u; pass ``scan_points=0`` to skip the scan (the solver's
    inner loop does).  Raises :class:`HypothesisViolationError` with the
    evaluation trace when no sign change exists.
    """
    if not tol > 0.0:
        raise ParameterError("projection tolerance must be positive")
    line = FiberLine(F, u)
    root, g_root, bracket, iters = _solve_slope_root(line, tol, t_init)
    sign_changes = None
    monotone = None
    if scan_points > 0:
        ts = np.logspace(np.log10(root) - 3.0, np.log10(root) + 3.0, scan_points)
        g = line.slope(ts)
        sign_changes = _count_sign_changes(g)
        ratio = g / ts ** (F.p_hom - 1.0)
        monotone = bool(_first_monotone_violation(ratio, decreasing=True) is None)
    diag = FiberDiagnostics(root, g_root, bracket, iters, sign_changes, monotone)
    return root, diag


def _count_sign_changes(values: np.ndarray) -> int:
    signs = np.sign(values)
    nz = signs[signs != 0.0]
    return int(np.count_nonzero(np.diff(nz) != 0.0))


def _first_monotone_violation(values: np.ndarray, decreasing: bool,
                              slack_rel: float = 1e-12):
    """Index of the first adjacent pair violating strict monotonicity.

    Ties within ``slack_rel`` of the local magnitude count as roundoff noise,
    not violations.  Returns None when the sampled sequence is monotone.
    """
    a, b = values[:-1], values[1:]
    step = b - a if decreasing else a - b
    slack = slack_rel * np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-300)
    bad = np.nonzero(step >= slack)[0]
    return int(bad[0]) if bad.size else None


def certify_direction(F: Functional, u: Field,
                      scan: tuple[float, float, int] = (1e-3, 1e3, DEFAULT_SCAN_POINTS)
                      ) -> DirectionCertificate:
    """Sample the ray-geometry certificates along one direction.

    Violations are reported as data (first offending pair), never raised."""
    line = FiberLine(F, u)
    lo, hi, n = scan
    ts = np.logspace(np.log10(lo), np.log10(hi), int(n))
    g = line.slope(ts)
    gamma = line.value(ts)
    ratio = g / ts ** (F.p_hom - 1.0)
    gap = gamma - ts * g / F.p_hom

    witness = None
    k = _first_monotone_violation(ratio, decreasing=True)
    ratio_ok = k is None
    if k is not None:
        witness = {"certificate": "slope_ratio_decreasing",
                   "t_pair": (float(ts[k]), float(ts[k + 1])),
                   "values": (float(ratio[k]), float(ratio[k + 1]))}
    k = _first_monotone_violation(gap, decreasing=False)
    gap_ok = k is None
    if gap_ok is False and witness is None:
        witness = {"certificate": "energy_gap_increasing",
                   "t_pair": (float(ts[k]), float(ts[k + 1])),
                   "values": (float(gap[k]), float(gap[k + 1]))}
    changes = _count_sign_changes(g)
    single = changes == 1
    if not single and witness is None:
        witness = {"certificate": "single_sign_change", "sign_changes": changes}
    return DirectionCertificate(ratio_ok, gap_ok, single, changes, ts, witness)
