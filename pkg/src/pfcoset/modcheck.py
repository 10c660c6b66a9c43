"""Numerical and exact verification of the modular and character identities."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import mpmath

from . import affine as af
from . import coset as cs
from . import extension as ex
from . import minmod
from .level import Level
from .qseries import NonconvergentEvaluation, QSeries, to_fraction

NUMERIC = ("theta_s", "std_s", "gamma_s", "t_phase")
SYMBOLIC = ("lemma_A", "resolutions", "twistrules", "two_route")
KINDS = NUMERIC + SYMBOLIC
DEFAULT_TAUS = (complex(0, 1), complex(-0.4, 0.9))


class InsufficientTruncation(ValueError):
    pass


@dataclass
class CheckReport:
    name: str
    u: int
    v: int
    taus: list
    order: str
    digits: int
    residual: float
    tail: float
    tol: float
    passed: bool
    identities: int = 0
    failures: list = field(default_factory=list)

    def to_json(self) -> str:
        d = asdict(self)
        d["taus"] = [[t.real, t.imag] for t in self.taus]
        return json.dumps(d)

    def summary(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (
            f"{flag} {self.name} (u,v)=({self.u},{self.v}) N={self.order} identities={self.identities} "
            f"residual={self.residual:.3e} tail={self.tail:.3e}"
        )


class _Evaluator:
    """Caches ``(value, tail)`` of series at a point."""

    def __init__(self, tau, digits):
        self.tau = tau
        self.digits = digits
        self._cache = {}

    def __call__(self, key, series_fn):
        if key not in self._cache:
            self._cache[key] = series_fn().eval(self.tau, self.digits)
        return self._cache[key]


def _numeric_report(name, level, taus, order, digits, tol, rows):
    """``rows`` yields ``(lhs, lhs_tail, rhs, rhs_tail)`` per identity."""
    residual = mpmath.mpf(0)
    tail = mpmath.mpf(0)
    n = 0
    failures = []
    for lhs, lt, rhs, rt in rows:
        n += 1
        res = abs(lhs - rhs)
        residual = max(residual, res)
        tail = max(tail, lt + rt)
        if res > tol + lt + rt:
            failures.append(f"identity {n}: residual {mpmath.nstr(res, 5)}")
    if tail > tol:
        raise InsufficientTruncation(f"{name}: tail budget {mpmath.nstr(tail, 5)} exceeds tol {tol}")
    return CheckReport(
        name, level.u, level.v, list(taus), str(order), digits,
        float(residual), float(tail), float(tol), not failures, n, failures[:20],
    )


def _s_points(tau, digits):
    with mpmath.workdps(digits):
        tau = mpmath.mpc(tau)
        return tau, -1 / tau


def _theta_rows(level, taus, order, digits):
    p, v = level.p, level.v
    for tau0 in taus:
        with mpmath.workdps(digits):
            tau, stau = _s_points(tau0, digits)
            at, ats = _Evaluator(tau, digits), _Evaluator(stau, digits)
            root = mpmath.sqrt(-1j * tau)
            for m in range(p + 1):
                lhs, lt = ats(("t", m), lambda m=m: ex.theta(level, Fraction(m, v), order))
                rhs = mpmath.mpc(0)
                rt = mpmath.mpf(0)
                for l in range(p + 1):
                    val, t = at(("t", l), lambda l=l: ex.theta(level, Fraction(l, v), order))
                    c = ex.s_typ(level, m, l)
                    rhs += c * val
                    rt += abs(c) * t
                yield lhs, lt, root * rhs, abs(root) * rt
            for m in range(1, p):
                lhs, lt = ats(("d", m), lambda m=m: ex.theta(level, Fraction(m, v), order, True))
                rhs = mpmath.mpc(0)
                rt = mpmath.mpf(0)
                for l in range(1, p):
                    val, t = at(("d", l), lambda l=l: ex.theta(level, Fraction(l, v), order, True))
                    c = ex.s_theta(level, m, l)
                    rhs += c * val
                    rt += abs(c) * t
                yield lhs, lt, root**3 * rhs, abs(root) ** 3 * rt


def _std_rows(level, taus, order, digits):
    p, v, u = level.p, level.v, level.u
    kac = minmod.kac_table(u, v)
    for tau0 in taus:
        with mpmath.workdps(digits):
            tau, stau = _s_points(tau0, digits)
            at, ats = _Evaluator(tau, digits), _Evaluator(stau, digits)
            for a in kac:
                for m in range(p + 1):
                    lhs, lt = ats((a, m), lambda m=m, a=a: ex.std_char(level, Fraction(m, v), a.r, a.s, order))
                    rhs = mpmath.mpc(0)
                    rt = mpmath.mpf(0)
                    for b in kac:
                        sv = minmod.s_vir(u, v, (a.r, a.s), (b.r, b.s), digits)
                        for l in range(p + 1):
                            val, t = at((b, l), lambda l=l, b=b: ex.std_char(level, Fraction(l, v), b.r, b.s, order))
                            c = sv * ex.s_typ(level, m, l)
                            rhs += c * val
                            rt += abs(c) * t
                    yield lhs, lt, rhs, rt


def _gamma_rows(level, taus, order, digits):
    basis = ex.basis_Bk(level)
    for tau0 in taus:
        with mpmath.workdps(digits):
            tau, stau = _s_points(tau0, digits)
            at, ats = _Evaluator(tau, digits), _Evaluator(stau, digits)
            pref = -1j * tau
            for a in basis:
                lhs, lt = ats(a, lambda a=a: ex.gamma(level, a[0], a[1], order))
                rhs = mpmath.mpc(0)
                rt = mpmath.mpf(0)
                for b in basis:
                    val, t = at(b, lambda b=b: ex.gamma(level, b[0], b[1], order))
                    c = ex.s_gamma(level, a, b)
                    rhs += c * val
                    rt += abs(c) * t
                yield lhs, lt, pref * rhs, abs(pref) * rt


def _exponents_congruent(series: QSeries, cls: Fraction) -> bool:
    return all((e - cls).denominator == 1 for e in series.exponents())


def _t_rows(level, taus, order, digits):
    items = [("gamma", idx) for idx in ex.basis_Bk(level)]
    items += [
        ("std", (Fraction(l, level.v), a.r, a.s))
        for a in minmod.kac_table(level.u, level.v)
        for l in range(level.p + 1)
    ]
    series = {}
    for kind, idx in items:
        s = ex.gamma(level, *idx, order) if kind == "gamma" else ex.std_char(level, *idx, order)
        cls = ex.gamma_exponent_class(level, *idx) if kind == "gamma" else ex.std_exponent_class(level, *idx)
        if not _exponents_congruent(s, cls):
            raise AssertionError(f"exponents of {kind} {idx} are not congruent to {cls} mod 1")
        series[(kind, idx)] = s
    for tau0 in taus:
        with mpmath.workdps(digits):
            tau = mpmath.mpc(tau0)
            for (_, idx), s in series.items():
                lhs, lt = s.eval(tau + 1, digits)
                val, t = s.eval(tau, digits)
                phase = ex.t_phase(level, idx, digits)
                yield lhs, lt, phase * val, t


def _symbolic_report(name, level, order, failures, n):
    return CheckReport(
        name, level.u, level.v, [], str(order), 0,
        0.0 if not failures else 1.0, 0.0, 0.0, not failures, n, failures[:20],
    )


def _lemma(level, order, radius=None):
    w, v = level.w, level.v
    radius = 4 * w if radius is None else radius
    failures, n = [], 0
    for j in range(-radius * v, radius * v + 1):
        lam = Fraction(j, v)
        a = ex.A_series(level, lam, order)
        b = ex.A_series(level, lam, order, "resummation")
        n += 1
        if a != b:
            failures.append(f"A_{lam}: first difference at q^{a.first_difference(b)}")
    return failures, n


def _raw_D_character(level, mu, r, s, order):
    """D character from its resolution formula, without label rewriting."""
    k, v, u = level.k, level.v, level.u
    total = QSeries.zero(order)
    for s1 in range(s + 1, v):
        lat = {cs.heis_exponent(level, mu - (s1 - s) * k): 1}
        total = total + cs._times(level, r, s1, lat, order).scale((-1) ** (s1 - s - 1))
    tail = _try_char(level, cs.C(mu - (v - s) * k, u - r), order, "crosscheck")
    return total + tail.scale((-1) ** (v - 1 - s))


def _weights_in_class(base: Fraction, bound) -> list[Fraction]:
    start = base - 2 * ((base + bound) // 2)
    out = []
    x = start
    while x <= bound:
        if abs(x) <= bound:
            out.append(x)
        x += 2
    return out


def _try_char(level, label, order, route="primary"):
    try:
        return cs.character(level, label, order, route)
    except cs.TruncationBelowGroundState:
        return QSeries.zero(order)


def _resolutions(level, order, mu_bound=6):
    u, v, k = level.u, level.v, level.k
    failures, n = [], 0

    def check(tag, a, b):
        nonlocal n
        n += 1
        if a != b:
            failures.append(f"{tag}: first difference at q^{a.first_difference(b)}")

    for r in range(1, u):
        for mu in _weights_in_class(Fraction(r - 1), mu_bound):
            check(f"C[{mu};{r}] routes", _try_char(level, cs.C(mu, r), order), _try_char(level, cs.C(mu, r), order, "crosscheck"))
            check(f"C[{mu};{r}] = C[{-mu};{r}]", _try_char(level, cs.C(mu, r), order), _try_char(level, cs.C(-mu, r), order))
        for s in range(1, v):
            for mu in _weights_in_class(cs._mod2(level.lam(r, s)), mu_bound):
                ep = _try_char(level, cs.Estd("+", mu, r, s), order)
                sub = cs.C(mu + k, r) if s == 1 else cs.D(mu + k, r, s - 1)
                check(f"Estd+[{mu};{r},{s}]", ep, _try_char(level, cs.D(mu, r, s), order) + _try_char(level, sub, order))
                if s == v - 1:
                    check(
                        f"D[{mu};{r},{s}] = C[{mu - k};{u - r}]",
                        _raw_D_character(level, mu, r, s, order),
                        _try_char(level, cs.C(mu - k, u - r), order),
                    )
            for mu in _weights_in_class(cs._mod2(level.lam(u - r, v - s)), mu_bound):
                em = _try_char(level, cs.Estd("-", mu, r, s), order)
                head = cs.C(mu + k, u - r) if s == v - 1 else cs.D(mu + k, u - r, v - 1 - s)
                check(f"Estd-[{mu};{r},{s}]", em, _try_char(level, head, order) + _try_char(level, cs.D(mu, u - r, v - s), order))
    return failures, n


def _twistrules(level, order, window=9, center=0):
    u, v = level.u, level.v
    failures, n = [], 0

    def check(tag, a, b):
        nonlocal n
        n += 1
        diff = a.first_difference(b)
        shared = set(a.components) & set(b.components)
        if diff is not None or len(shared) < window:
            failures.append(f"{tag}: {diff if diff else 'window too small'}")

    def win(label):
        return af.support_window(level, label, center - window + 1, window)

    for r in range(1, u):
        lab = af.L(r)
        ch = af.irr_weighted_char(level, lab, win(lab), order)
        check(f"L[{r}] decomposition = resolution", ch, af.irr_weighted_char(level, lab, win(lab), order, "resolution"))
        up = af.spectral_flow(ch, 1)
        check(f"sf(L[{r}]) = D+[{u - r},{v - 1}]", up, af.irr_weighted_char(level, af.Dplus(u - r, v - 1), up.window, order))
        dn = af.spectral_flow(ch, -1)
        check(f"sf^-1(L[{r}]) = D-[{u - r},{v - 1}]", dn, af.irr_weighted_char(level, af.Dminus(u - r, v - 1), dn.window, order))
        for s in range(1, v - 1):
            lab = af.Dplus(r, s)
            ch = af.irr_weighted_char(level, lab, win(lab), order)
            check(f"D+[{r},{s}] decomposition = resolution", ch, af.irr_weighted_char(level, lab, win(lab), order, "resolution"))
            dn = af.spectral_flow(ch, -1)
            check(
                f"sf^-1(D+[{r},{s}]) = D-[{u - r},{v - 1 - s}]",
                dn,
                af.irr_weighted_char(level, af.Dminus(u - r, v - 1 - s), dn.window, order),
            )
    return failures, n


def _two_route(level, order):
    failures, n = [], 0
    for lab in ex.enumerate_modules(level):
        a = ex.character(level, lab, order)
        b = ex.character(level, lab, order, "coset-sum")
        c = ex.decompose_character(level, lab).assemble(level, order)
        n += 2
        if a != b:
            failures.append(f"{lab} theta vs coset-sum: first difference at q^{a.first_difference(b)}")
        if a != c:
            failures.append(f"{lab} Gamma+standard decomposition: first difference at q^{a.first_difference(c)}")
    return failures, n


def verify(kind: str, level: Level, taus=DEFAULT_TAUS, order=60, digits=80, tol=1e-20) -> CheckReport:
    """Run one check; numeric kinds compare both sides at every ``tau``."""
    order = to_fraction(order)
    taus = [complex(t) for t in taus]
    if kind in NUMERIC:
        for t in taus:
            if t.imag <= 0:
                raise NonconvergentEvaluation(f"Im(tau) must be positive, got {t}")
        rows = {"theta_s": _theta_rows, "std_s": _std_rows, "gamma_s": _gamma_rows, "t_phase": _t_rows}[kind]
        return _numeric_report(kind, level, taus, order, digits, tol, rows(level, taus, order, digits))
    if kind == "lemma_A":
        return _symbolic_report(kind, level, order, *_lemma(level, order))
    if kind == "resolutions":
        return _symbolic_report(kind, level, order, *_resolutions(level, order))
    if kind == "twistrules":
        return _symbolic_report(kind, level, order, *_twistrules(level, order))
    if kind == "two_route":
        return _symbolic_report(kind, level, order, *_two_route(level, order))
    raise ValueError(f"unknown check {kind!r}; choose from {', '.join(KINDS)}")


def rep_dimension_report(level: Level) -> tuple[int, int, int]:
    """``(standard count, |B_k|, standard count + 2|B_k|)``."""
    std = level.p * (level.u - 1) * (level.v - 1)
    b = len(ex.basis_Bk(level))
    return std, b, std + 2 * b
