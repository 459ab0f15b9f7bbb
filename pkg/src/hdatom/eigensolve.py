"""Bound states of the reduced radial problem on a finite grid.

The radial operator -(1/2) f'' + V_eff f is discretised with Dirichlet walls at
``r_min`` and ``r_max`` and the three-point stencil. Two grids are supported:

``uniform``
    equal steps in r; the matrix is the plain symmetric tridiagonal H.
``log``
    equal steps in t = ln r with f = r^{1/2} u, which turns the problem into
    -(1/2) u_tt + [1/8 + r^2 V_eff] u = E r^2 u, a tridiagonal pencil
    (A, W) with W = diag(r^2). For an inverse-square potential the bracket is
    constant, so scale invariance survives discretisation; collapse studies use
    this grid.

Eigenvalues come from Sturm-sequence counts (the inertia of A - lambda W) and
bisection. The same count is the node-count oracle.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import linalg, optimize

from .core import AtomConfig
from .errors import (
    ConfigError,
    ConvergenceError,
    CutoffTooSmall,
    GridTooCoarse,
    InvariantViolation,
)
from .reduction import RadialProblem, reduce


class Spacing(str, enum.Enum):
    UNIFORM = "uniform"
    LOG = "log"


@dataclass(frozen=True)
class Grid:
    r_min: float
    r_max: float
    n: int
    spacing: Spacing = Spacing.UNIFORM

    def __post_init__(self):
        object.__setattr__(self, "spacing", Spacing(self.spacing))
        if not 0 < self.r_min < self.r_max:
            raise ConfigError(f"need 0 < r_min < r_max, got [{self.r_min}, {self.r_max}]")
        if self.n < 16:
            raise GridTooCoarse(f"need at least 16 points, got {self.n}")

    @classmethod
    def log(cls, r_min: float, r_max: float, n: int) -> Grid:
        return cls(r_min, r_max, n, Spacing.LOG)

    @property
    def h(self) -> float:
        """Step in r (uniform) or in ln r (log)."""
        if self.spacing is Spacing.UNIFORM:
            return (self.r_max - self.r_min) / (self.n - 1)
        return math.log(self.r_max / self.r_min) / (self.n - 1)

    @property
    def r(self) -> np.ndarray:
        if self.spacing is Spacing.UNIFORM:
            return np.linspace(self.r_min, self.r_max, self.n)
        return np.exp(np.linspace(math.log(self.r_min), math.log(self.r_max), self.n))

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weights for int . dr (rectangle rule, matching Dirichlet ends)."""
        if self.spacing is Spacing.UNIFORM:
            return np.full(self.n, self.h)
        return self.r * self.h

    def refined(self) -> Grid:
        return replace(self, n=2 * self.n - 1)


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Symmetric tridiagonal pencil A - lambda W; ``weights`` None means W = I."""

    diagonal: np.ndarray
    offdiagonal: np.ndarray
    weights: np.ndarray | None = None

    @property
    def size(self) -> int:
        return len(self.diagonal)

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diagonal) + np.diag(self.offdiagonal, 1) + np.diag(self.offdiagonal, -1)

    def gershgorin(self) -> tuple[float, float]:
        """Interval containing every generalized eigenvalue."""
        e = np.abs(self.offdiagonal)
        radius = np.zeros(self.size)
        radius[:-1] += e
        radius[1:] += e
        w = np.ones(self.size) if self.weights is None else self.weights
        lo = np.min((self.diagonal - radius) / w)
        hi = np.max((self.diagonal + radius) / w)
        return float(lo), float(hi)


def assemble_hamiltonian(problem: RadialProblem, grid: Grid) -> TridiagonalMatrix:
    """Discretise the radial operator on the interior points of ``grid``."""
    if grid.n < 16:
        raise GridTooCoarse(f"need at least 16 points, got {grid.n}")
    r = grid.r[1:-1]
    h = grid.h
    with np.errstate(over="ignore", divide="ignore"):
        v_eff = problem.effective_potential(r)
    if not np.all(np.isfinite(v_eff)):
        raise CutoffTooSmall(f"potential overflows at r_min = {grid.r_min:g}")
    off = np.full(len(r) - 1, -0.5 / (h * h))
    if grid.spacing is Spacing.UNIFORM:
        return TridiagonalMatrix(1.0 / (h * h) + v_eff, off)
    diag = 1.0 / (h * h) + 0.125 + r * r * v_eff
    return TridiagonalMatrix(diag, off, r * r)


def sturm_count(matrix: TridiagonalMatrix, lam: float) -> int:
    """Number of eigenvalues strictly below ``lam`` (negative pivots of A - lam W)."""
    d = matrix.diagonal
    w = matrix.weights
    shifted = (d - lam) if w is None else (d - lam * w)
    e2 = (matrix.offdiagonal * matrix.offdiagonal).tolist()
    diag = shifted.tolist()
    q = diag[0] or -1e-300
    count = 1 if q < 0.0 else 0
    for a, b in zip(diag[1:], e2):
        q = a - b / q
        if q < 0.0:
            count += 1
        elif q == 0.0:
            q = -1e-300
            count += 1
    return count


def lowest_eigenvalues(
    matrix: TridiagonalMatrix, k: int, tol: float | None = None, rel_tol: float | None = None
) -> np.ndarray:
    """The ``k`` smallest eigenvalues by Sturm bisection.

    Default stopping rule: bracket width <= 1e-12 * max(1, |E|). ``tol`` replaces
    the 1e-12 factor; ``rel_tol`` switches to a purely relative rule, needed when
    eigenvalues are many orders of magnitude below one.
    """
    if not 1 <= k <= matrix.size:
        raise ConfigError(f"k must lie in [1, {matrix.size}], got {k}")
    tol = 1e-12 if tol is None else tol
    g_lo, g_hi = matrix.gershgorin()
    span = max(abs(g_lo), abs(g_hi), 1.0)
    g_lo -= 1e-12 * span
    g_hi += 1e-12 * span
    out = np.empty(k)
    lo_j = g_lo
    for j in range(k):
        lo, hi = lo_j, g_hi
        # seed the upper end with zero when that already separates the eigenvalue
        if lo < 0.0 < hi and sturm_count(matrix, 0.0) > j:
            hi = 0.0
        for _ in range(3000):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if rel_tol is not None:
                if hi - lo <= rel_tol * min(abs(lo), abs(hi)):
                    break
            elif hi - lo <= tol * max(1.0, abs(mid)):
                break
            if sturm_count(matrix, mid) > j:
                hi = mid
            else:
                lo = mid
        out[j] = 0.5 * (lo + hi)
        lo_j = lo
    return out


def eigenvector(matrix: TridiagonalMatrix, eigenvalue: float, iterations: int = 3) -> np.ndarray:
    """Inverse iteration on (A - E W) x = W x_prev."""
    n = matrix.size
    w = np.ones(n) if matrix.weights is None else matrix.weights
    shift = eigenvalue + 1e-10 * max(1.0, abs(eigenvalue))
    ab = np.zeros((3, n))
    ab[0, 1:] = matrix.offdiagonal
    ab[1] = matrix.diagonal - shift * w
    ab[2, :-1] = matrix.offdiagonal
    x = np.ones(n) / math.sqrt(n)
    for _ in range(iterations):
        x = linalg.solve_banded((1, 1), ab, w * x)
        x /= np.max(np.abs(x))
    return x


def count_nodes(samples: np.ndarray, floor: float = 1e-10) -> int:
    """Sign changes, ignoring samples below ``floor`` times the peak."""
    x = np.asarray(samples, dtype=float)
    big = x[np.abs(x) > floor * np.max(np.abs(x))]
    if big.size < 2:
        return 0
    return int(np.count_nonzero(np.signbit(big[1:]) != np.signbit(big[:-1])))


# --- Numerov shooting -------------------------------------------------------


@dataclass(frozen=True)
class NumerovResult:
    energy: float
    node_count: int
    log_derivative_mismatch: float
    match_index: int
    rescaled: bool


def _numerov_q(problem: RadialProblem, grid: Grid, energy: float) -> np.ndarray:
    """Coefficient q in y'' = q y for the grid's independent variable."""
    r = grid.r
    with np.errstate(over="ignore", divide="ignore"):
        v = problem.effective_potential(r)
    if grid.spacing is Spacing.UNIFORM:
        return 2.0 * (v - energy)
    return 0.25 + 2.0 * r * r * (v - energy)


def _numerov_march(q: np.ndarray, h: float, stop: int, reverse: bool) -> tuple[np.ndarray, bool]:
    n = len(q)
    idx = list(range(n - 1, -1, -1)) if reverse else list(range(n))
    c = 1.0 - h * h * q / 12.0
    y = np.zeros(n)
    y[idx[0]] = 0.0
    y[idx[1]] = 1e-12
    rescaled = False
    for a in range(2, n):
        i, i1, i2 = idx[a], idx[a - 1], idx[a - 2]
        y[i] = ((12.0 - 10.0 * c[i1]) * y[i1] - c[i2] * y[i2]) / c[i]
        if abs(y[i]) > 1e100:
            y *= 1e-100
            rescaled = True
        if i == stop:
            break
    return y, rescaled


def numerov_shoot(problem: RadialProblem, energy: float, grid: Grid) -> NumerovResult:
    """Shoot outward and inward, match log-derivatives at the outer turning point.

    The mismatch is y_out'/y_out - y_in'/y_in (derivatives with respect to the
    grid variable) and crosses zero at eigenvalues.
    """
    r = grid.r
    n = grid.n
    h = grid.h
    q = _numerov_q(problem, grid, energy)
    if not np.all(np.isfinite(q)):
        raise CutoffTooSmall(f"potential overflows at r_min = {grid.r_min:g}")
    with np.errstate(over="ignore", divide="ignore"):
        allowed = np.nonzero(problem.effective_potential(r) <= energy)[0]
    m = int(allowed[-1]) if allowed.size else n // 2
    m = min(max(m, 2), n - 3)

    out, r1 = _numerov_march(q, h, m + 1, reverse=False)
    inn, r2 = _numerov_march(q, h, m - 1, reverse=True)
    l_out = (out[m + 1] - out[m - 1]) / (2 * h * out[m])
    l_in = (inn[m + 1] - inn[m - 1]) / (2 * h * inn[m])
    nodes = count_nodes(out[1 : m + 1], floor=0.0) + count_nodes(inn[m:-1], floor=0.0)
    return NumerovResult(energy, nodes, float(l_out - l_in), m, r1 or r2)


def numerov_eigenvalue(problem: RadialProblem, grid: Grid, guess: float, width: float | None = None) -> float:
    """Root of the Numerov mismatch near ``guess``."""

    def mismatch(e):
        return numerov_shoot(problem, e, grid).log_derivative_mismatch

    w = 1e-4 * max(abs(guess), 1e-8) if width is None else width
    f0 = mismatch(guess)
    for _ in range(40):
        lo, hi = guess - w, guess + w
        flo, fhi = mismatch(lo), mismatch(hi)
        for a, fa, b, fb in ((lo, flo, guess, f0), (guess, f0, hi, fhi)):
            if fa == 0.0:
                return a
            if np.sign(fa) != np.sign(fb):
                root = optimize.brentq(mismatch, a, b, xtol=1e-15, rtol=1e-14, maxiter=200)
                # a pole (y_out = 0 at the match point) also flips sign; reject it
                if abs(mismatch(root)) < 1e-3 * (abs(fa) + abs(fb)):
                    return root
        w *= 2.0
    raise ConvergenceError(f"no Numerov eigenvalue bracketed near {guess}")


# --- spectra ----------------------------------------------------------------


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    wavefunctions: np.ndarray
    node_counts: list[int]
    grid: Grid
    converged: bool | None
    richardson_estimate: np.ndarray | None = None
    refined_eigenvalues: np.ndarray | None = None
    numerov_ground: float | None = None
    numerov_agrees: bool | None = None

    def __post_init__(self):
        if np.any(np.diff(self.eigenvalues) <= 0):
            raise InvariantViolation(f"eigenvalues not strictly ascending: {self.eigenvalues}")
        if any(b <= a for a, b in zip(self.node_counts, self.node_counts[1:])):
            raise InvariantViolation(f"node counts not strictly increasing: {self.node_counts}")


def _solve(problem: RadialProblem, grid: Grid, k: int):
    mat = assemble_hamiltonian(problem, grid)
    vals = lowest_eigenvalues(mat, k)
    r = grid.r
    wts = grid.weights
    waves = np.zeros((k, grid.n))
    nodes = []
    for j, e in enumerate(vals):
        x = eigenvector(mat, e)
        f = np.zeros(grid.n)
        f[1:-1] = x if grid.spacing is Spacing.UNIFORM else np.sqrt(r[1:-1]) * x
        f /= math.sqrt(np.sum(f * f * wts))
        # fix the overall sign: positive just off the inner wall
        first = f[np.argmax(np.abs(f) > 1e-8 * np.max(np.abs(f)))]
        if first < 0:
            f = -f
        waves[j] = f
        nodes.append(count_nodes(f[1:-1]))
    return vals, waves, nodes


def spectrum(config: AtomConfig, grid: Grid, k: int, refine: bool = True, cross_check: bool = True) -> SpectrumResult:
    """Lowest ``k`` levels, with optional grid-doubling and a Numerov cross-check.

    ``converged`` is True when the doubled grid moves every eigenvalue by less
    than 1e-6 relative; ``richardson_estimate`` is (4 E_{h/2} - E_h) / 3.
    """
    problem = reduce(config)
    vals, waves, nodes = _solve(problem, grid, k)
    result = SpectrumResult(vals, waves, nodes, grid, converged=None)
    if refine:
        fine = lowest_eigenvalues(assemble_hamiltonian(problem, grid.refined()), k)
        result.refined_eigenvalues = fine
        result.richardson_estimate = (4.0 * fine - vals) / 3.0
        result.converged = bool(np.all(np.abs(fine - vals) < 1e-6 * np.abs(fine)))
    if cross_check and vals[0] < 0:
        try:
            e_num = numerov_eigenvalue(problem, grid, vals[0])
        except ConvergenceError:
            result.numerov_agrees = False
        else:
            result.numerov_ground = e_num
            result.numerov_agrees = abs(e_num - vals[0]) <= 1e-3 * abs(vals[0])
    return result


# --- cutoff collapse --------------------------------------------------------


class Stability(str, enum.Enum):
    BOUNDED = "BoundedBelow"
    COLLAPSING = "Collapsing"


@dataclass
class CollapseStudy:
    """Ground energy against the inner cutoff.

    ``lowest_eigenvalues`` are the raw lowest eigenvalues on each grid;
    ``ground_energies`` are the bound-state ground energies, i.e. the raw value
    when negative and 0 otherwise (a non-negative lowest eigenvalue is a
    box-quantised continuum state, and the continuum starts at 0).
    """

    cutoffs: list[float]
    ground_energies: list[float]
    lowest_eigenvalues: list[float]
    classification: Stability
    spacing: Spacing
    grid_n: int
    r_max: float
    growth_factors: list[float] = field(default_factory=list)


def classify_collapse(cutoffs, energies, window: int = 3) -> tuple[Stability, list[float]]:
    """Collapsing iff, over the last ``window`` steps, every ground energy is
    negative and grows in magnitude by at least the cutoff ratio (2 per halving)."""
    factors = []
    for a0, a1, e0, e1 in zip(cutoffs[:-1], cutoffs[1:], energies[:-1], energies[1:]):
        factors.append(e1 / e0 if e0 < 0 else (math.inf if e1 < 0 else 0.0))
    tail = list(zip(cutoffs[:-1], cutoffs[1:], energies[:-1], energies[1:], factors))[-window:]
    ok = bool(tail) and all(e0 < 0 and e1 < 0 and f >= a0 / a1 for a0, a1, e0, e1, f in tail)
    return (Stability.COLLAPSING if ok else Stability.BOUNDED), factors


def ground_energy(problem: RadialProblem, grid: Grid, rel_tol: float = 1e-10) -> float:
    """Raw lowest eigenvalue, resolved to ``rel_tol`` relative."""
    return float(lowest_eigenvalues(assemble_hamiltonian(problem, grid), 1, rel_tol=rel_tol)[0])


def collapse_study(
    config: AtomConfig,
    cutoffs,
    grid_n: int,
    r_max: float,
    spacing: Spacing | str = Spacing.LOG,
) -> CollapseStudy:
    cutoffs = [float(a) for a in cutoffs]
    if any(b >= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise ConfigError("cutoffs must be strictly descending")
    if not cutoffs or cutoffs[0] >= r_max:
        raise ConfigError("cutoffs must be non-empty and below r_max")
    spacing = Spacing(spacing)
    problem = reduce(config)
    raw = [ground_energy(problem, Grid(a, r_max, grid_n, spacing)) for a in cutoffs]
    ground = [min(e, 0.0) for e in raw]
    cls, factors = classify_collapse(cutoffs, ground)
    return CollapseStudy(cutoffs, ground, raw, cls, spacing, grid_n, r_max, factors)


@dataclass(frozen=True)
class ThresholdBracket:
    Z_bounded: float
    Z_collapsing: float

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.Z_bounded + self.Z_collapsing)


def collapse_threshold(
    make_config,
    Z_bounded: float,
    Z_collapsing: float,
    cutoffs,
    grid_n: int,
    r_max: float,
    width: float = 0.05,
    spacing: Spacing | str = Spacing.LOG,
) -> ThresholdBracket:
    """Bisect in Z on the collapse classification.

    ``make_config(Z)`` builds the configuration; the endpoints must classify as
    BoundedBelow and Collapsing respectively.
    """

    def cls(Z):
        return collapse_study(make_config(Z), cutoffs, grid_n, r_max, spacing).classification

    if cls(Z_bounded) is not Stability.BOUNDED or cls(Z_collapsing) is not Stability.COLLAPSING:
        raise ConvergenceError("threshold endpoints do not bracket the flip")
    lo, hi = Z_bounded, Z_collapsing
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if cls(mid) is Stability.COLLAPSING:
            hi = mid
        else:
            lo = mid
    return ThresholdBracket(lo, hi)
