"""Ground-state search: minimize Psi(w) = Phi(t_w w) over the unit sphere.

Every iterate is re-projected onto the constraint set through the ray root
``t_w``, so the minimization effectively runs over rays.  A step consists of
the preconditioned nodal residual, projected tangent to the current sphere
point, followed by Armijo backtracking on the ray energy of the renormalized
trial point.  The smallest value found is the ground-state estimate ``c``;
best-of-n restarts only tighten it, they cannot certify global optimality.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDirectionError, MultiStartError, ParameterError
from .fiber import FiberLine, _solve_slope_root
from .functionals import Functional
from .grid import Field, Grid
from .verify import CheckEntry, CheckReport

_PROJECT_TOL = 1e-10


@dataclass(frozen=True)
class ArmijoOptions:
    initial_step: float = 1.0
    shrink: float = 0.5
    slope_fraction: float = 1e-4
    max_backtracks: int = 40

    def __post_init__(self):
        if not 0.0 < self.shrink < 1.0:
            raise ParameterError(f"shrink must lie in (0, 1), got {self.shrink}")
        if self.initial_step <= 0.0 or self.slope_fraction <= 0.0:
            raise ParameterError("Armijo step and slope fraction must be positive")


@dataclass(frozen=True)
class SolveOptions:
    max_iterations: int = 2000
    residual_tolerance: float = 1e-7
    armijo: ArmijoOptions = field(default_factory=ArmijoOptions)
    #: "auto" resolves to inverse_laplacian for p=2-dominated families
    preconditioner: str = "auto"
    seed: int = 0
    nonnegative_start: bool = True
    modes: int = 3

    def __post_init__(self):
        if self.residual_tolerance <= 0.0:
            raise ParameterError("residual tolerance must be positive")
        if self.preconditioner not in ("auto", "none", "inverse_laplacian"):
            raise ParameterError(
                f"unknown preconditioner {self.preconditioner!r}")


@dataclass
class SolveReport:
    """Outcome of one minimization run.

    ``c_value`` is the ray energy at the final iterate (best found, not a
    certified global infimum); ``t_history`` doubles as the ambient-norm
    history because the sphere iterates are unit vectors.
    """

    ground_state: Field
    c_value: float
    t_history: list[float]
    energy_history: list[float]
    final_residual: float
    iterations: int
    converged: bool
    status: str
    min_negative_part: float
    hypothesis_summary: CheckReport
    spread: float | None = None

    def to_json_dict(self) -> dict:
        out = {
            "c": self.c_value,
            "residual": self.final_residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "status": self.status,
            "t_history": list(self.t_history),
            "energy_history": list(self.energy_history),
            "min_negative_part": self.min_negative_part,
            "hypothesis_summary": self.hypothesis_summary.to_json_list(),
        }
        if self.spread is not None:
            out["spread"] = self.spread
        return out


def random_init(grid: Grid, seed: int, modes: int = 3,
                nonnegative: bool = True) -> Field:
    """Seeded superposition of the lowest ``modes`` sine modes per axis.

    Coefficients are uniform in [-1, 1] (resampled on an all-zero draw, so the
    result is never the zero field); with ``nonnegative`` the pointwise
    absolute value is taken.  The field is not normalized here.
    """
    if modes < 1:
        raise ParameterError(f"modes must be >= 1, got {modes}")
    rng = np.random.default_rng(seed)
    shape = (modes,) * grid.dim
    coeffs = rng.uniform(-1.0, 1.0, size=shape)
    while not np.any(np.abs(coeffs) > 1e-12):
        coeffs = rng.uniform(-1.0, 1.0, size=shape)
    tables = []
    for i in range(grid.dim):
        x = grid.axis_nodes(i)
        L = grid.extents[i]
        tables.append(np.asarray(
            [np.sin((k + 1) * np.pi * x / L) for k in range(modes)]))
    vals = np.zeros(grid.resolution)
    for idx in np.ndindex(shape):
        mode = tables[0][idx[0]]
        for i in range(1, grid.dim):
            mode = np.multiply.outer(mode, tables[i][idx[i]])
        vals = vals + coeffs[idx] * mode
    if nonnegative:
        vals = np.abs(vals)
    return Field(grid, vals)


def _dirichlet_laplacian(grid: Grid):
    import scipy.sparse as sp

    mats = []
    for n, h in zip(grid.resolution, grid.spacing):
        mats.append(sp.diags([-1.0, 2.0, -1.0], [-1, 0, 1],
                             shape=(n, n)) / (h * h))
    L = None
    for i, T in enumerate(mats):
        term = None
        for j in range(grid.dim):
            blk = T if j == i else sp.identity(grid.resolution[j])
            term = blk if term is None else sp.kron(term, blk)
        L = term if L is None else L + term
    return L.tocsc()


def _resolve_preconditioner(F: Functional, choice: str):
    """None, or a solve callable for the second-difference Dirichlet operator."""
    if choice == "none":
        return None
    if choice == "auto":
        op = F.operator
        if F.kind == "kirchhoff":
            dominated = True
        elif F.kind == "quasilinear":
            dominated = op.p == 2.0
        else:
            dominated = all(p == 2.0 for p in op.pvec)
        if not dominated:
            return None
    from scipy.sparse.linalg import splu

    lu = splu(_dirichlet_laplacian(F.grid))
    shape = F.grid.resolution
    return lambda r: lu.solve(r.ravel()).reshape(shape)


def minimize(F: Functional, init: Field, opts: SolveOptions | None = None) -> SolveReport:
    """Projected descent on the sphere with ray re-projection each iteration.

    Terminates when the residual dual-norm estimate relative to the iterate
    norm drops below ``opts.residual_tolerance``, or when backtracking can no
    longer decrease the ray energy (status "stalled"), or at the iteration
    cap.  Deterministic for fixed inputs.
    """
    opts = opts or SolveOptions()
    F._check_field(init, "init")
    if not np.any(init.values):
        raise DegenerateDirectionError("initial field must be nonzero")
    grid = F.grid
    vol = grid.cell_volume
    precond = _resolve_preconditioner(F, opts.preconditioner)
    arm = opts.armijo

    w = init.values / F.ambient_norm(init)
    t_guess = None
    t_hist: list[float] = []
    e_hist: list[float] = []
    feas_worst = 0.0
    m_lower = np.inf
    status = "max_iterations"
    converged = False
    t = psi = res_rel = None
    iterations = 0

    for _ in range(opts.max_iterations):
        iterations += 1
        line = FiberLine(F, Field._wrap(grid, w.copy()))
        t, g_root, _, _ = _solve_slope_root(line, _PROJECT_TOL, t_guess)
        t_guess = t
        psi = line.value(t)
        j0, j = line.slope_parts(t)
        denom = j0 + j
        if denom > 0.0:
            feas_worst = max(feas_worst, abs(t * g_root) / denom)
        if F.kind == "kirchhoff":
            m_lower = min(m_lower, float(F.operator.M(t * t)))
        t_hist.append(t)
        e_hist.append(psi)

        u = Field._wrap(grid, t * w)
        r = F.residual(u).values
        z = precond(r) if precond is not None else r
        dual_sq = vol * float(np.sum(r * z))
        res_rel = np.sqrt(max(dual_sq, 0.0)) / t
        if res_rel <= opts.residual_tolerance:
            status = "converged"
            converged = True
            break

        # tangent, Newton-scaled descent direction on the sphere
        d = -z / t
        d = d - (float(np.sum(d * w)) / float(np.sum(w * w))) * w
        slope = t * vol * float(np.sum(r * d))
        if slope >= 0.0 and precond is not None:
            d = -r / t
            d = d - (float(np.sum(d * w)) / float(np.sum(w * w))) * w
            slope = t * vol * float(np.sum(r * d))
        if slope >= 0.0:
            status = "stalled"
            break

        step = arm.initial_step
        accepted = False
        for _bt in range(arm.max_backtracks + 1):
            trial = w + step * d
            nrm = F.ambient_norm(Field._wrap(grid, trial.copy()))
            if nrm > 0.0:
                w_try = trial / nrm
                line_try = FiberLine(F, Field._wrap(grid, w_try.copy()))
                try:
                    t_try, _, _, _ = _solve_slope_root(line_try, _PROJECT_TOL, t)
                except Exception:
                    t_try = None
                if t_try is not None:
                    psi_try = line_try.value(t_try)
                    if psi_try <= psi + arm.slope_fraction * step * slope:
                        w, t_guess = w_try, t_try
                        accepted = True
                        break
            step *= arm.shrink
        if not accepted:
            status = "stalled"
            break

    ground = Field._wrap(grid, t * w)
    entries = [
        CheckEntry("solve.bounded",
                   "pass" if _bounded_trace(t_hist) else "fail",
                   notes="max iterate norm within 10x of the median"),
        CheckEntry("solve.nehari",
                   "pass" if feas_worst <= 1e-8 else "fail",
                   witness=None if feas_worst <= 1e-8 else feas_worst,
                   notes=f"worst |Phi'(u)u| / (J0+J) = {feas_worst:.3e}"),
    ]
    if F.kind == "kirchhoff":
        ok = m_lower >= F.operator.m0 * (1.0 - 1e-12)
        entries.append(CheckEntry(
            "solve.m_lower", "pass" if ok else "fail",
            notes=f"min M(|u|^2) along the trace = {m_lower:.6g}"))
    if grid.dim == 1 and opts.nonnegative_start:
        gap = F.energy(Field._wrap(grid, np.abs(ground.values))) - psi
        entries.append(CheckEntry(
            "solve.abs_1d", "pass" if gap <= 1e-10 else "fail",
            witness=None if gap <= 1e-10 else gap,
            notes="Phi(|u|) <= Phi(u) + 1e-10 (exact discretely in 1d)"))
    summary = CheckReport(entries)

    return SolveReport(
        ground_state=ground,
        c_value=float(psi),
        t_history=t_hist,
        energy_history=e_hist,
        final_residual=float(res_rel),
        iterations=iterations,
        converged=converged,
        status=status,
        min_negative_part=float(ground.values.min()),
        hypothesis_summary=summary,
    )


def _bounded_trace(norms) -> bool:
    arr = np.asarray(norms, dtype=float)
    if arr.size == 0:
        return True
    return bool(arr.max() <= 10.0 * np.median(arr))


def boundedness_monitor(report: SolveReport) -> bool:
    """True iff the iterate norms stay within 10x their median.

    Constraint-feasible iterates with bounded energy must remain bounded;
    a diverging norm trace flags a violated growth hypothesis.
    """
    if not report.t_history:
        raise ParameterError("report carries no iterations to monitor")
    return _bounded_trace(report.t_history)


def multi_start(F: Functional, n_starts: int, base_seed: int,
                opts: SolveOptions | None = None) -> SolveReport:
    """Best-of-n minimization from seeded random starts.

    Returns the converged report with the smallest energy (ties resolved by
    the smaller seed) annotated with the spread max - min of converged
    energies.  Raises :class:`MultiStartError` when every run fails.
    """
    if n_starts < 1:
        raise ParameterError(f"n_starts must be >= 1, got {n_starts}")
    opts = opts or SolveOptions()
    runs: list[tuple[int, SolveReport]] = []
    for i in range(n_starts):
        seed = base_seed + i
        run_opts = dataclasses.replace(opts, seed=seed)
        init = random_init(F.grid, seed, opts.modes, opts.nonnegative_start)
        runs.append((seed, minimize(F, init, run_opts)))
    converged = [(seed, rep) for seed, rep in runs if rep.converged]
    if not converged:
        raise MultiStartError(
            "no restart converged",
            [(seed, rep.status, rep.final_residual) for seed, rep in runs])
    values = [rep.c_value for _, rep in converged]
    best_seed, best = min(converged, key=lambda it: (it[1].c_value, it[0]))
    best.spread = float(max(values) - min(values))
    return best
