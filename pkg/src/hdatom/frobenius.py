"""Exact power-series analysis of the transformed radial equations.

Two families are handled:

* d >= 5, after peeling off the exponential decay::

      y'' - D y' + (eta / rho^p - L / rho^2) y = 0,   p = d - 2 by default

* d = 4 with negative zeta = -nu^2::

      g'' + g'/rho - (1 - nu^2 / rho^2) g = 0

The ansatz ``sum c_n rho^(n+s)`` is substituted term by term; every power of
rho yields one linear constraint and the constraints are solved in order with
:class:`fractions.Fraction` arithmetic, so "all coefficients vanish" is an exact
statement. The printed recursion is only used as a comparison target.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConfigError, UnsupportedDimension

Rational = Fraction | int


class Verdict(str, enum.Enum):
    TRIVIAL = "Trivial"
    NONTRIVIAL = "NontrivialFound"


@dataclass(frozen=True)
class Term:
    """coef * rho**power * (d/drho)**order y"""

    coef: Fraction
    power: int
    order: int

    @property
    def shift(self) -> int:
        return self.power - self.order


@dataclass(frozen=True)
class SeriesODE:
    """Exact-rational description of one of the two ODE families.

    For d = 4, ``eta_coupling`` carries nu^2 and the other fields are unused.
    ``potential_power`` replaces the default d - 2 (used for the Coulomb control).
    """

    d: int
    centrifugal: Fraction = Fraction(0)
    eta_coupling: Fraction = Fraction(1)
    decay: Fraction = Fraction(0)
    potential_power: int | None = None

    def __post_init__(self):
        if self.d < 4:
            raise UnsupportedDimension(f"series analysis covers d >= 4, got d={self.d}")
        for name in ("centrifugal", "eta_coupling", "decay"):
            value = getattr(self, name)
            if isinstance(value, float):
                raise ConfigError(f"{name} must be an exact rational, got float {value!r}")
            object.__setattr__(self, name, Fraction(value))
        if self.d == 4 and not self.eta_coupling > 0:
            raise ConfigError("the d = 4 family needs nu^2 > 0")

    @classmethod
    def for_atom(cls, d: int, l: int, eta: Rational, lam: Rational, **kw) -> SeriesODE:
        """Transformed equation for dimension d and orbital number l.

        ``lam`` stands in for the decay constant; the drift coefficient is 2*lam.
        """
        ld = Fraction(2 * l + d - 3, 2)
        return cls(d=d, centrifugal=ld * (ld + 1), eta_coupling=Fraction(eta), decay=2 * Fraction(lam), **kw)

    @classmethod
    def d4_negative_zeta(cls, nu_sq: Rational) -> SeriesODE:
        return cls(d=4, eta_coupling=Fraction(nu_sq))

    @classmethod
    def centrifugal_only(cls, l_d: Rational, d: int = 5) -> SeriesODE:
        """y'' - l_d(l_d+1)/rho^2 y = 0: the bare centrifugal balance at the origin."""
        ld = Fraction(l_d)
        return cls(d=d, centrifugal=ld * (ld + 1), eta_coupling=Fraction(0), decay=Fraction(0))

    @property
    def power(self) -> int:
        return self.d - 2 if self.potential_power is None else self.potential_power

    def terms(self) -> list[Term]:
        """ODE multiplied through so every power of rho is non-negative."""
        if self.d == 4:
            return [
                Term(Fraction(1), 2, 2),
                Term(Fraction(1), 1, 1),
                Term(Fraction(-1), 2, 0),
                Term(self.eta_coupling, 0, 0),
            ]
        m = max(self.power, 2)
        raw = [
            Term(Fraction(1), m, 2),
            Term(-self.decay, m, 1),
            Term(self.eta_coupling, m - self.power, 0),
            Term(-self.centrifugal, m - 2, 0),
        ]
        return [t for t in raw if t.coef != 0]


def _falling(x: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for j in range(k):
        out *= x - j
    return out


def indicial_polynomial(ode: SeriesODE) -> tuple[Fraction, Fraction, Fraction]:
    """Coefficients (a, b, c) of a s^2 + b s + c from the lowest-shift terms."""
    terms = ode.terms()
    low = min(t.shift for t in terms)
    a = b = c = Fraction(0)
    for t in terms:
        if t.shift != low:
            continue
        # coef * s(s-1)...(s-order+1)
        if t.order == 0:
            c += t.coef
        elif t.order == 1:
            b += t.coef
        else:
            a += t.coef
            b -= t.coef
    return a, b, c


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def indicial_roots(ode: SeriesODE) -> list[Fraction]:
    """Rational roots of the indicial equation, largest first.

    An empty list means no rational root exists (e.g. s^2 + nu^2 = 0, or a
    constant indicial "polynomial" when the potential dominates the origin).
    """
    a, b, c = indicial_polynomial(ode)
    if a == 0:
        if b == 0:
            return []
        return [-c / b]
    root = _rational_sqrt(b * b - 4 * a * c)
    if root is None:
        return []
    roots = {(-b + root) / (2 * a), (-b - root) / (2 * a)}
    return sorted(roots, reverse=True)


@dataclass
class FrobeniusReport:
    ode: SeriesODE
    s: Fraction
    forced_zero_prefix: int
    constraints: list[tuple[int, dict[int, Fraction]]]
    coefficients: list[Fraction]
    verdict: Verdict
    printed_prefix_match: bool | None
    free_parameters: int = 0

    @property
    def all_zero(self) -> bool:
        return all(c == 0 for c in self.coefficients)


def printed_forced_prefix(d: int) -> int:
    """Length of the forced-zero prefix as printed: c_0 .. c_{d-4} (d > 4), c_0, c_1 (d = 4)."""
    return 2 if d == 4 else d - 3


def derive_constraints(ode: SeriesODE, s: Rational, N: int) -> FrobeniusReport:
    """Substitute sum c_n rho^(n+s) and solve the first N coefficient constraints.

    Each coefficient is tracked as a linear form over free parameters (a new one
    is introduced whenever the leading multiplier of a constraint vanishes), so a
    surviving nontrivial series is detected rather than assumed away.
    """
    if N < ode.d:
        raise ConfigError(f"N must be at least d = {ode.d}")
    s = Fraction(s)
    terms = ode.terms()
    low = min(t.shift for t in terms)

    forms: list[dict[int, Fraction]] = []
    constraints: list[tuple[int, dict[int, Fraction]]] = []
    n_params = 0
    prefix = 0
    prefix_open = True

    for m in range(N):
        relation: dict[int, Fraction] = {}
        for t in terms:
            j = m + low - t.shift
            if j < 0:
                continue
            relation[j] = relation.get(j, Fraction(0)) + t.coef * _falling(j + s, t.order)
        relation = {j: v for j, v in relation.items() if v != 0}
        constraints.append((m, dict(relation)))

        lead = relation.pop(m, Fraction(0))
        # residual = sum of lower coefficients' contributions, as a linear form
        residual: dict[int, Fraction] = {}
        for j, mult in relation.items():
            for p, v in forms[j].items():
                residual[p] = residual.get(p, Fraction(0)) + mult * v
        residual = {p: v for p, v in residual.items() if v != 0}

        if prefix_open:
            if lead != 0 and not relation:
                prefix += 1
            else:
                prefix_open = False

        if lead != 0:
            forms.append({p: -v / lead for p, v in residual.items()})
            continue
        # c_m is unconstrained by this equation; the rest must vanish identically
        if residual:
            pivot = next(iter(residual))
            pv = residual.pop(pivot)
            sub = {p: -v / pv for p, v in residual.items()}
            for form in forms:
                if pivot in form:
                    coef = form.pop(pivot)
                    for p, v in sub.items():
                        form[p] = form.get(p, Fraction(0)) + coef * v
                    for p in [p for p, v in form.items() if v == 0]:
                        del form[p]
        forms.append({n_params: Fraction(1)})
        n_params += 1

    coefficients = [sum(f.values(), Fraction(0)) for f in forms]
    nontrivial = any(forms)
    surviving = len({p for f in forms for p in f})
    return FrobeniusReport(
        ode=ode,
        s=s,
        forced_zero_prefix=prefix,
        constraints=constraints,
        coefficients=coefficients,
        verdict=Verdict.NONTRIVIAL if nontrivial else Verdict.TRIVIAL,
        printed_prefix_match=prefix == printed_forced_prefix(ode.d),
        free_parameters=surviving,
    )


DEFAULT_S = tuple(Fraction(k, 2) for k in range(-4, 5))


def exponent_candidates(ode: SeriesODE, extra=DEFAULT_S) -> list[Fraction]:
    seen = []
    for s in list(indicial_roots(ode)) + [Fraction(x) for x in extra]:
        if s not in seen:
            seen.append(s)
    return seen


def sweep(ode: SeriesODE, N: int, s_values=None) -> list[FrobeniusReport]:
    """Run :func:`derive_constraints` over indicial roots plus small rationals."""
    if s_values is None:
        s_values = exponent_candidates(ode)
    return [derive_constraints(ode, s, N) for s in s_values]


def sweep_verdict(reports: list[FrobeniusReport]) -> Verdict:
    if any(r.verdict is Verdict.NONTRIVIAL for r in reports):
        return Verdict.NONTRIVIAL
    return Verdict.TRIVIAL


@dataclass
class RecursionComparison:
    d: int
    printed_prefix: list[int]
    derived_prefix: list[int]
    prefix_match: bool
    # (n, which multiplier, derived value, printed value)
    recursion_mismatches: list[tuple[int, str, Fraction, Fraction]] = field(default_factory=list)
    index_offset: int | None = None
    verdict: Verdict = Verdict.TRIVIAL

    @property
    def recursion_match(self) -> bool:
        return not self.recursion_mismatches


def _printed_recursion(ode: SeriesODE, s: Fraction, n: int) -> tuple[Fraction, Fraction]:
    """Multipliers of c_{n+1} and c_n in the printed expression for c_{n+d-3}."""
    eta = ode.eta_coupling
    L = ode.centrifugal
    return (L - (n + s) * (n + s - 1)) / eta, ode.decay * (n + s) / eta


def compare_with_printed_recursion(report: FrobeniusReport, d: int, n_terms: int = 20) -> RecursionComparison:
    """Diff the mechanically derived prefix and recursion against the printed ones.

    The verdict is carried over untouched.
    """
    if d <= 4 or report.ode.d != d:
        raise UnsupportedDimension("recursion comparison is defined for the d > 4 family")
    if report.ode.potential_power not in (None, d - 2):
        raise ConfigError("comparison needs the Gauss-law power d - 2")
    ode, s = report.ode, report.s
    printed_n = printed_forced_prefix(d)
    out = RecursionComparison(
        d=d,
        printed_prefix=list(range(printed_n)),
        derived_prefix=list(range(report.forced_zero_prefix)),
        prefix_match=report.forced_zero_prefix == printed_n,
        verdict=report.verdict,
    )
    by_index = dict(report.constraints)
    offsets = set()
    for n in range(n_terms):
        m = n + d - 3
        if m not in by_index:
            break
        rel = dict(by_index[m])
        lead = rel.pop(m)
        derived = (-rel.get(n + 1, Fraction(0)) / lead, -rel.get(n, Fraction(0)) / lead)
        printed = _printed_recursion(ode, s, n)
        for label, dv, pv in zip(("c_{n+1}", "c_n"), derived, printed):
            if dv != pv:
                out.recursion_mismatches.append((n, label, dv, pv))
                if label == "c_{n+1}":
                    # does the printed multiplier appear at a shifted n?
                    for k in (1, -1, 2, -2):
                        if n + k >= 0 and _printed_recursion(ode, s, n + k)[0] == dv:
                            offsets.add(k)
                            break
    if len(offsets) == 1:
        out.index_offset = offsets.pop()
    return out
