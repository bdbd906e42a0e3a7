"""Closed-form expectations in log space and their Monte Carlo counterparts.

All ``log_n_*`` quantities are logarithms in base ``params.n``.  The
headline quantity is the formula

    E_formula[CH] = C(n, 4g+2) (4g+2)! prod_i p_i^{C(4g+1, i)}
                    * p0^(2g+4) p1^(2g^2+3g+1) (1 - p1)^(2g+2)

which is reported as a formula, not as the exact expectation of any one
counter.  The clique exponent ``C(4g+1, i)`` is used as written; the face
count of a ``(4g+1)``-simplex, ``C(4g+2, i+1)``, is reported alongside.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import comb, lgamma

import numpy as np

from chainlab import _backend
from chainlab.complex import SimplicialComplex
from chainlab.model import ConditionReport, ModelParams, check_conditions, sample_levels, sandwich_probability
from chainlab.pattern import PatternPair, build_pattern

__all__ = [
    "ExpectationReport",
    "TaylorTail",
    "MCEstimate",
    "EVENTS",
    "clique_exponents",
    "log_expected_clique_embeddings",
    "log_pattern_probability",
    "log_expected_CH",
    "taylor_tail",
    "mc_estimate",
    "closed_form_mean",
    "sweep_params",
    "sweep",
    "SWEEP_COLUMNS",
    "report_row",
]

EVENTS = ("sandwich", "pattern_count", "clique_count")


def _mul(count: float, logv: float) -> float:
    # 0 * -inf counts as 0: an absent factor contributes nothing
    return 0.0 if count == 0 else count * logv


def clique_exponents(m: int, r: int, mode: str = "printed") -> list[int]:
    """Exponent of ``p_i`` (``i = 0..r``) in the clique-embedding product.

    ``"printed"``: ``C(m-1, i)``.  ``"faces"``: ``C(m, i+1)``, the number of
    ``i``-faces of a simplex on ``m`` vertices.
    """
    if mode == "printed":
        return [comb(m - 1, i) for i in range(r + 1)]
    if mode == "faces":
        return [comb(m, i + 1) for i in range(r + 1)]
    raise ValueError(f"unknown exponent mode {mode!r}")


def _log_clique(params: ModelParams, m: int, mode: str) -> float:
    n = params.n
    if m > n:
        return -math.inf
    total = lgamma(n + 1) - lgamma(n - m + 1)
    for i, e in enumerate(clique_exponents(m, params.r, mode)):
        total += _mul(e, params.log_p(i))
    return total / params.log_n


def log_expected_clique_embeddings(params: ModelParams, m: int, mode: str = "printed") -> float:
    """``log_n [C(n, m) m! prod_i p_i^e_i]`` with exponents from :func:`clique_exponents`."""
    if m < 1:
        raise ValueError(f"clique size must be positive, got {m}")
    if m > params.N:
        raise ValueError(f"clique size {m} exceeds the ambient vertex count N={params.N}")
    return _log_clique(params, m, mode)


def _pattern_counts(g: int) -> tuple[int, int, int]:
    return 2 * g + 4, 2 * g * g + 3 * g + 1, 2 * g + 2


def log_pattern_probability(params: ModelParams, g: int | None = None) -> float:
    """``log_n`` of ``p0^(2g+4) p1^(2g^2+3g+1) (1-p1)^(2g+2)``.

    ``-inf`` when ``p1 = 1`` (or when the model has no edges, ``r = 0``).
    """
    g = params.g if g is None else g
    if params.r < 1:
        return -math.inf
    nv, f1, e1 = _pattern_counts(g)
    total = _mul(nv, params.log_p(0)) + _mul(f1, params.log_p(1)) + _mul(e1, params.log_q(1))
    return total / params.log_n


@dataclass(frozen=True)
class TaylorTail:
    """``(2g+2) log_n(1 - n^-alpha1)`` evaluated two ways.

    ``closed`` uses ``log(-expm1(.))``; ``series`` sums ``-z^i / i`` for
    ``z = n^-alpha1`` until terms drop below machine precision.
    ``geometric`` is ``(2g+2) sum_{i>=0} z^i``, the positive divergent
    expression the series is sometimes replaced by, kept for comparison.
    """

    closed: float
    series: float
    difference: float
    terms: int
    converged: bool
    geometric: float


def taylor_tail(alpha1: float, g: int, n: float, max_terms: int = 10**8) -> TaylorTail:
    ln_n = math.log(n)
    x = alpha1 * ln_n
    if not x > 0:
        raise ValueError(f"need 0 < n^-alpha1 < 1, got alpha1={alpha1}, n={n}")
    c = 2 * g + 2
    z = math.exp(-x)
    closed = c * math.log(-math.expm1(-x)) / ln_n
    # chunked so the loop count stays small when z is close to 1
    s = 0.0
    done = 0
    converged = False
    chunk = 4096
    while done < max_terms:
        i = np.arange(done + 1, done + chunk + 1, dtype=np.float64)
        t = np.exp(-x * i) / i
        s += float(t.sum())
        done += chunk
        if t[-1] <= np.finfo(float).eps * 0.25 * abs(s):
            converged = True
            break
        chunk = min(chunk * 2, 1 << 20)
    series = -c * s / ln_n
    geometric = c / -math.expm1(-x) if x > 0 else math.inf
    return TaylorTail(closed=closed, series=series, difference=series - closed,
                      terms=done, converged=converged, geometric=geometric)


@dataclass(frozen=True)
class ExpectationReport:
    """Log-space terms of ``E_formula[CH]`` for one parameter set.

    ``log_n_E_CH = log_n_clique_term + log_n_pattern_term``; the tail
    ``(2g+2) log_n(1 - p1)`` is already inside the pattern term and is
    repeated for diagnosis.

    ``lower_bound`` is ``m log_n(n/m) - 1 - a0 m - a1 (2g^2+3g+1) + tail``
    with ``m = 4g + 2``; ``lower_bound_terms`` lists the five summands.
    ``simplified_bound_printed`` evaluates the constant chain
    ``7 - 5 - 2/g - 2 + 3/g + 1/g^2`` plus the tail as written, and
    ``simplified_bound_consistent`` the bound that the technical condition
    actually implies from the five summands.
    """

    g: int
    n: float
    N: int
    r: int
    alpha: tuple[float, ...]
    clique_mode: str
    log_n_clique_term: float
    log_n_clique_term_alt: float
    log_n_pattern_term: float
    log_n_tail_term: float
    log_n_E_CH: float
    lower_bound: float
    lower_bound_terms: tuple[float, float, float, float, float]
    lower_bound_holds: bool
    first_summand_at_least_7: bool
    simplified_bound_printed: float
    simplified_bound_consistent: float
    feasible: bool
    conditions: ConditionReport

    @property
    def flags(self) -> list[str]:
        out = []
        c = self.conditions
        if not self.feasible:
            out.append("infeasible:4g+2>n")
        if c.technical:
            out.append("technical")
        if c.hyperbolic_connected_gt:
            out.append("curve_gt")
        if c.hyperbolic_connected_lt:
            out.append("curve_lt")
        if c.chain_domain:
            out.append("domain_4g+2")
        if c.critical_dimension_k is not None:
            out.append(f"critical_k={c.critical_dimension_k}")
        if not self.lower_bound_holds:
            out.append("lower_bound_exceeds")
        if not all(math.isfinite(v) for v in (self.log_n_E_CH, self.lower_bound)):
            out.append("nonfinite")
        return out

    def as_dict(self) -> dict:
        return {
            "g": self.g,
            "n": self.n,
            "N": self.N,
            "r": self.r,
            "alpha": list(self.alpha),
            "clique_mode": self.clique_mode,
            "log_n_clique_term": self.log_n_clique_term,
            "log_n_clique_term_alt": self.log_n_clique_term_alt,
            "log_n_pattern_term": self.log_n_pattern_term,
            "log_n_tail_term": self.log_n_tail_term,
            "log_n_E_CH": self.log_n_E_CH,
            "lower_bound": self.lower_bound,
            "lower_bound_terms": list(self.lower_bound_terms),
            "lower_bound_holds": self.lower_bound_holds,
            "first_summand_at_least_7": self.first_summand_at_least_7,
            "simplified_bound_printed": self.simplified_bound_printed,
            "simplified_bound_consistent": self.simplified_bound_consistent,
            "feasible": self.feasible,
            "flags": self.flags,
        }


def log_expected_CH(params: ModelParams, clique_mode: str = "printed") -> ExpectationReport:
    """Evaluate the ``E_formula[CH]`` terms and the lower-bound chain.

    Never raises for infeasible sizes: when ``4g + 2 > n`` the clique term is
    ``-inf`` and the report is flagged.
    """
    g = params.g
    m = 4 * g + 2
    alt_mode = "faces" if clique_mode == "printed" else "printed"
    feasible = m <= params.n and m <= params.N
    clique = _log_clique(params, m, clique_mode)
    clique_alt = _log_clique(params, m, alt_mode)
    pattern = log_pattern_probability(params)
    _, f1, e1 = _pattern_counts(g)
    ln_n = params.log_n
    tail = _mul(e1, params.log_q(1)) / ln_n if params.r >= 1 else -math.inf
    a = params.exponents()
    a0, a1 = a[0], (a[1] if len(a) > 1 else 0.0)
    first = m * (1.0 - math.log(m) / ln_n)
    terms = (first, -1.0, -a0 * m, -a1 * f1, tail)
    lower = sum(terms)
    total = clique + pattern
    printed_chain = 7 - 5 - 2 / g - 2 + 3 / g + 1 / g**2 + tail
    g2 = g * g
    consistent_chain = first - 1 - m * (g2 - 1) / g2 - f1 / g2 + tail
    return ExpectationReport(
        g=g,
        n=params.n,
        N=params.N,
        r=params.r,
        alpha=tuple(a),
        clique_mode=clique_mode,
        log_n_clique_term=clique,
        log_n_clique_term_alt=clique_alt,
        log_n_pattern_term=pattern,
        log_n_tail_term=tail,
        log_n_E_CH=total,
        lower_bound=lower,
        lower_bound_terms=terms,
        lower_bound_holds=bool(lower <= total),
        first_summand_at_least_7=first >= 7,
        simplified_bound_printed=printed_chain,
        simplified_bound_consistent=consistent_chain,
        feasible=feasible,
        conditions=check_conditions(params),
    )


# -- Monte Carlo ---------------------------------------------------------------


@dataclass(frozen=True)
class MCEstimate:
    event: str
    trials: int
    mean: float
    variance: float
    stderr: float
    seed: int

    def within(self, target: float, k: float = 4.0) -> bool:
        """``|mean - target| <= k * stderr``."""
        return abs(self.mean - target) <= k * self.stderr


def _adjacency(edges, N):
    a = [0] * N
    for e in edges:
        lo = e & -e
        hi = e ^ lo
        a[lo.bit_length() - 1] |= hi
        a[hi.bit_length() - 1] |= lo
    return a


def _vmask(level0):
    m = 0
    for f in level0:
        m |= f
    return m


def _trial_values(event, params, seed, start, stop, ctx):
    N = params.N
    ker = _backend.kernels(N)
    out = np.empty(stop - start, dtype=np.float64)
    if event == "sandwich":
        A_lv = [ctx["A"].masks(d) for d in range(params.r + 1)]
        B_lv = [ctx["B"].masks(d) for d in range(params.r + 1)]
        for t in range(start, stop):
            levels = sample_levels(params, seed, t)
            hit = True
            for d in range(params.r + 1):
                y = levels[d]
                if len(y) < len(A_lv[d]):
                    hit = False
                    break
                ys = set(y)
                if not (A_lv[d] <= ys and B_lv[d].issuperset(ys)):
                    hit = False
                    break
            out[t - start] = hit
    elif event == "clique_count":
        m = ctx["m"]
        for t in range(start, stop):
            levels = sample_levels(params, seed, t)
            top = min(m - 1, params.r)
            level = levels[top]
            if m - 1 > params.r and level:
                adjm = _adjacency(levels[1], N)
                vm = _vmask(levels[0])
                for d in range(params.r + 1, m):
                    level = ker.boundary_closed(level, set(level) if d >= 3 else None, adjm, vm, d)
                    if not level:
                        break
            out[t - start] = len(level)
    elif event == "pattern_count":
        g, extra, which = ctx["g"], ctx["extra"], ctx["which"]
        for t in range(start, stop):
            levels = sample_levels(params, seed, t)
            edges = levels[1] if params.r >= 1 else []
            counts = ker.count_patterns(_adjacency(edges, N), _vmask(levels[0]), g, extra)
            out[t - start] = counts[which]
    else:
        raise ValueError(f"unknown event {event!r}; expected one of {EVENTS}")
    return out


def _context(event, params, *, pattern=None, A=None, B=None, m=None, g=None, clique_size=None,
             count="labeled"):
    if event == "sandwich":
        if pattern is not None:
            A, B = pattern.A, pattern.B
        elif A is None or B is None:
            pat = build_pattern(g or params.g)
            A, B = pat.A, pat.B
        if B.N != params.N:
            raise ValueError(f"the sandwich event needs params.N == {B.N} (the labelled vertex set)")
        return {"A": A, "B": B.with_cap(params.r)}
    if event == "clique_count":
        m = params.N if m is None else m
        if not 1 <= m <= params.N:
            raise ValueError(f"clique size {m} outside 1..{params.N}")
        return {"m": m}
    if event == "pattern_count":
        g = params.g if g is None else g
        k = 2 * g + 4
        clique_size = k if clique_size is None else clique_size
        if clique_size < k:
            raise ValueError(f"clique_size must be >= 2g+4 = {k}")
        which = {"raw": 0, "labeled": 1, "inside_clique": 2}[count]
        return {"g": g, "extra": clique_size - k, "which": which}
    raise ValueError(f"unknown event {event!r}; expected one of {EVENTS}")


def mc_estimate(event: str, params: ModelParams, trials: int, seed: int, *, workers: int = 1,
                **event_args) -> MCEstimate:
    """Monte Carlo mean of an event indicator or count.

    Trial ``t`` draws from its own stream ``(seed, t)``, so the per-trial
    values, and hence the estimate, do not depend on ``workers``.

    Events
    ------
    sandwich
        Indicator of ``A <= Y <= B`` (``pattern=`` or ``A=``/``B=``; default
        is the genus-``g`` chain pattern).  Needs ``params.N == B.N``.
    clique_count
        Number of ``m``-vertex sets all of whose faces up to dimension ``r``
        are present (``m=``, default ``N``).
    pattern_count
        ``count="labeled"`` (default), ``"raw"`` or ``"inside_clique"`` from
        the pattern counter (``g=``, ``clique_size=``).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ctx = _context(event, params, **event_args)
    if workers <= 1 or trials < 2 * workers:
        values = _trial_values(event, params, seed, 0, trials, ctx)
    else:
        bounds = np.linspace(0, trials, workers + 1).astype(int)
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = ex.map(_trial_values, [event] * workers, [params] * workers, [seed] * workers,
                           bounds[:-1].tolist(), bounds[1:].tolist(), [ctx] * workers)
            values = np.concatenate(list(parts))
    mean = float(values.mean())
    var = float(values.var(ddof=1)) if trials > 1 else 0.0
    return MCEstimate(event=event, trials=trials, mean=mean, variance=var,
                      stderr=math.sqrt(var / trials), seed=seed)


def closed_form_mean(event: str, params: ModelParams, **event_args) -> float | None:
    """Exact expectation of the Monte Carlo event, where one is known.

    ``pattern_count`` has a closed form only for the labeled count:
    ``C(N, 2g+4) (2g+4)!`` times the probability of one labelled sandwich.
    """
    ctx = _context(event, params, **event_args)
    if event == "sandwich":
        return math.exp(sandwich_probability(ctx["A"], ctx["B"], params))
    if event == "clique_count":
        m = ctx["m"]
        logv = math.log(comb(params.N, m))
        for i, e in enumerate(clique_exponents(m, params.r, "faces")):
            logv += _mul(e, params.log_p(i))
        return math.exp(logv)
    if ctx["which"] != 1:
        return None
    g = ctx["g"]
    k = 2 * g + 4
    if k > params.N:
        return 0.0
    logv = math.log(comb(params.N, k)) + lgamma(k + 1) + log_pattern_probability(params, g) * params.log_n
    return math.exp(logv)


# -- sweeps ----------------------------------------------------------------------

N_RULES = ("feasible", "power")
SWEEP_COLUMNS = (
    "g", "n", "N", "r", "alpha0", "alpha1", "alpha2",
    "clique_term", "clique_term_alt", "pattern_term", "tail",
    "log_n_E_CH", "lower_bound", "flags",
)


def sweep_params(g: int, *, n_rule: str = "feasible", margin: float = 0.01, alpha=None) -> ModelParams:
    """Parameters for one sweep row.

    The default alpha sits inside the technical condition:
    ``alpha1 = 1/(2g^2)``, ``alpha0 = (g^2-1)/g^2 - margin``, the rest 0.
    ``n_rule="power"`` takes ``n = 2^g`` (too small for a ``4g+2`` clique
    when ``g <= 4``); ``"feasible"`` takes ``n = max(2^g, 4g+2)``.
    """
    if n_rule == "power":
        n = 2.0**g
    elif n_rule == "feasible":
        n = float(max(2**g, 4 * g + 2))
    else:
        raise ValueError(f"unknown n rule {n_rule!r}; expected one of {N_RULES}")
    if alpha is None:
        g2 = g * g
        alpha = [(g2 - 1) / g2 - margin, 1 / (2 * g2), 0.0]
    return ModelParams.from_alpha(g, alpha, n=n, N=int(n))


def sweep(gs, *, n_rule: str = "feasible", margin: float = 0.01, alpha=None,
          clique_mode: str = "printed") -> list[ExpectationReport]:
    return [log_expected_CH(sweep_params(g, n_rule=n_rule, margin=margin, alpha=alpha), clique_mode)
            for g in gs]


def report_row(rep: ExpectationReport) -> list:
    a = list(rep.alpha) + [0.0, 0.0, 0.0]
    return [
        rep.g, rep.n, rep.N, rep.r, a[0], a[1], a[2],
        rep.log_n_clique_term, rep.log_n_clique_term_alt, rep.log_n_pattern_term, rep.log_n_tail_term,
        rep.log_n_E_CH, rep.lower_bound, ";".join(rep.flags),
    ]
