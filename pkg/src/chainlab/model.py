"""The Costa-Farber multiparametric random simplicial complex.

Each vertex of the ambient simplex is kept with probability ``p[0]``; then,
dimension by dimension, each simplex whose whole boundary survived is kept
with probability ``p[d]``.  Parameters are usually given as exponents,
``p[d] = n ** -alpha[d]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb

import numpy as np

from chainlab import _backend
from chainlab.complex import SimplicialComplex, exterior_masks, simplex_of
from chainlab.errors import StructureError

__all__ = [
    "ModelParams",
    "ConditionReport",
    "psi",
    "critical_dimensions",
    "check_conditions",
    "trial_bitgen",
    "sample_complex",
    "sample_levels",
    "sandwich_probability",
    "parse_param_text",
    "read_param_file",
    "params_from_config",
]

MAX_SEED = 1 << 128


def _log_or_neginf(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


@dataclass(frozen=True)
class ModelParams:
    """Model parameters.

    ``n`` is the scale in ``p = n**-alpha``; ``N`` the number of vertex
    labels actually sampled.  They are independent so that small ambient
    sets can be simulated while formulas keep the scale ``n = 2**g``.
    """

    g: int
    n: float
    N: int
    r: int
    p: tuple[float, ...]
    alpha: tuple[float, ...] | None = field(default=None)

    def __post_init__(self):
        if self.g < 1:
            raise ValueError(f"genus must be >= 1, got {self.g}")
        if not self.n > 1:
            raise ValueError(f"scale n must exceed 1, got {self.n}")
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if self.r < 0 or self.r > self.N - 1:
            raise ValueError(f"dimension cap r={self.r} must lie in 0..N-1={self.N - 1}")
        if len(self.p) != self.r + 1:
            raise ValueError(f"expected {self.r + 1} probabilities, got {len(self.p)}")
        for i, pi in enumerate(self.p):
            if not 0.0 <= pi <= 1.0:
                raise ValueError(f"p[{i}]={pi} is not a probability")
        if self.alpha is not None:
            if len(self.alpha) != self.r + 1:
                raise ValueError(f"expected {self.r + 1} exponents, got {len(self.alpha)}")
            for i, a in enumerate(self.alpha):
                if not (a >= 0 and math.isfinite(a)):
                    raise ValueError(f"alpha[{i}]={a} must be finite and non-negative")

    @classmethod
    def from_alpha(cls, g: int, alpha, *, n: float | None = None, N: int | None = None,
                   r: int | None = None) -> ModelParams:
        """Parameters with ``p[i] = n**-alpha[i]``.

        Defaults: ``n = 2**g``, ``N = n``, ``r = 3g - 3``.  A short ``alpha``
        is padded with zeros (probability one) up to length ``r + 1``.
        """
        n = float(2**g) if n is None else float(n)
        if N is None:
            if n != int(n):
                raise ValueError("N must be given when n is not an integer")
            N = int(n)
        r = 3 * g - 3 if r is None else r
        alpha = tuple(float(a) for a in alpha)
        if len(alpha) > r + 1:
            raise ValueError(f"{len(alpha)} exponents given for dimension cap r={r}")
        alpha = alpha + (0.0,) * (r + 1 - len(alpha))
        p = tuple(n ** (-a) for a in alpha)
        return cls(g=g, n=n, N=N, r=r, p=p, alpha=alpha)

    @classmethod
    def from_p(cls, p, *, N: int, g: int = 1, n: float | None = None, r: int | None = None) -> ModelParams:
        p = tuple(float(x) for x in p)
        r = len(p) - 1 if r is None else r
        n = float(N) if n is None else float(n)
        return cls(g=g, n=n, N=N, r=r, p=p)

    @property
    def q(self) -> tuple[float, ...]:
        return tuple(1.0 - x for x in self.p)

    @property
    def log_n(self) -> float:
        return math.log(self.n)

    def exponents(self) -> tuple[float, ...]:
        """``alpha`` as given, or recovered from ``p`` (``inf`` where ``p = 0``)."""
        if self.alpha is not None:
            return self.alpha
        return tuple(-_log_or_neginf(x) / self.log_n for x in self.p)

    def log_p(self, i: int) -> float:
        if self.alpha is not None:
            return -self.alpha[i] * self.log_n
        return _log_or_neginf(self.p[i])

    def log_q(self, i: int) -> float:
        """Natural log of ``1 - p[i]``, accurate when ``p[i]`` is close to 1."""
        if self.alpha is not None:
            return _log_or_neginf(-math.expm1(-self.alpha[i] * self.log_n))
        if self.p[i] >= 1.0:
            return -math.inf
        return math.log1p(-self.p[i])


def psi(k: int, alpha) -> float:
    """Sum of ``C(k, i) * alpha[i]``; terms with ``i > k`` vanish."""
    return float(sum(comb(k, i) * a for i, a in enumerate(alpha)))


def critical_dimensions(alpha, k_max: int) -> list[int]:
    """All ``k`` in ``0..k_max`` with ``psi_k(alpha) < 1 < psi_{k+1}(alpha)``."""
    vals = [psi(k, alpha) for k in range(k_max + 2)]
    return [k for k in range(k_max + 1) if vals[k] < 1 < vals[k + 1]]


@dataclass(frozen=True)
class ConditionReport:
    """Parameter checks.  Never raises; every flag is informational.

    The curve condition is printed twice in the source with opposite
    inequalities, so both readings are evaluated:

    * ``hyperbolic_connected_gt``: ``a0 + 3 a1 + 2 a2 > 1``, ``a2 > 0`` and
      ``0 < a0 + a1 < 1``;
    * ``hyperbolic_connected_lt``: ``a0 + 3 a1 + 2 a2 < 1`` and ``a0 + a1 < 1``.

    ``critical_dimension_k`` is the unique ``k`` in ``0..r`` with
    ``psi_k < 1 < psi_{k+1}``; ``None`` when there is none, or when several
    qualify (possible only with negative exponents; see
    ``critical_candidates``).  ``chain_domain`` tests the same inequalities
    at ``k = 4g + 2``.
    """

    hyperbolic_connected_gt: bool
    hyperbolic_connected_lt: bool
    technical: bool
    critical_dimension_k: int | None
    critical_candidates: tuple[int, ...]
    chain_domain: bool
    psi_values: tuple[float, ...]

    def lines(self) -> list[str]:
        k = self.critical_dimension_k
        return [
            f"hyperbolic_connected_gt = {self.hyperbolic_connected_gt}",
            f"hyperbolic_connected_lt = {self.hyperbolic_connected_lt}",
            f"technical = {self.technical}",
            "critical_dimension = " + ("none" if k is None else str(k)),
            f"chain_domain_4g+2 = {self.chain_domain}",
            "psi = " + " ".join(repr(v) for v in self.psi_values),
        ]


def check_conditions(params: ModelParams) -> ConditionReport:
    a = params.exponents()
    a0 = a[0]
    a1 = a[1] if len(a) > 1 else 0.0
    a2 = a[2] if len(a) > 2 else 0.0
    g2 = params.g**2
    lin = a0 + 3 * a1 + 2 * a2
    gt = lin > 1 and a2 > 0 and 0 < a0 + a1 < 1
    lt = lin < 1 and a0 + a1 < 1
    technical = a1 < 1 / g2 and a0 < (g2 - 1) / g2 and a2 > (1 - 2 * g2) / g2
    cands = critical_dimensions(a, params.r)
    kc = 4 * params.g + 2
    return ConditionReport(
        hyperbolic_connected_gt=gt,
        hyperbolic_connected_lt=lt,
        technical=technical,
        critical_dimension_k=cands[0] if len(cands) == 1 else None,
        critical_candidates=tuple(cands),
        chain_domain=psi(kc, a) < 1 < psi(kc + 1, a),
        psi_values=tuple(psi(k, a) for k in range(params.r + 2)),
    )


# -- sampling ------------------------------------------------------------


def trial_bitgen(seed: int, trial: int = 0) -> np.random.Philox:
    """Independent counter-based stream for one trial.

    The seed is the Philox key and the trial index occupies the top counter
    word, so streams never overlap and any trial can be regenerated alone.
    """
    if not 0 <= seed < MAX_SEED:
        raise ValueError(f"seed must lie in [0, 2**128), got {seed}")
    if not 0 <= trial < 1 << 64:
        raise ValueError(f"trial index out of range: {trial}")
    return np.random.Philox(key=seed, counter=[0, 0, 0, trial])


def sample_levels(params: ModelParams, seed: int, trial: int = 0) -> list[list[int]]:
    """Face masks per dimension of one sample (lexicographic order)."""
    ker = _backend.kernels(params.N)
    return ker.sample_levels(params.N, params.r, params.p, trial_bitgen(seed, trial))


def sample_complex(params: ModelParams, rng_seed: int, trial: int = 0) -> SimplicialComplex:
    """Draw a complex; identical ``(params, rng_seed, trial)`` give identical output."""
    levels = sample_levels(params, rng_seed, trial)
    return SimplicialComplex._from_levels(params.N, params.r, levels, check=False)


# -- exact event probability -------------------------------------------------


def _term(count: int, logv: float) -> float:
    return 0.0 if count == 0 else count * logv


def sandwich_probability(A: SimplicialComplex, B: SimplicialComplex, params: ModelParams) -> float:
    """Natural log of ``P(A <= Y <= B)``.

    ``A`` and ``B`` share the ambient vertex set ``range(B.N)``, which may
    differ from ``params.N``; only the probabilities are taken from
    ``params``.  Requires ``A <= B`` and that every exterior face of ``B`` of
    dimension ``<= r`` has its boundary in ``A``; otherwise the product
    formula does not apply and :class:`StructureError` is raised.
    """
    if A.N != B.N:
        raise ValueError(f"A and B live on different vertex sets ({A.N} vs {B.N})")
    r = params.r
    for d in range(A.r + 1):
        extra = A.masks(d) - B.masks(d)
        if extra:
            face = simplex_of(min(extra))
            raise StructureError(f"A is not contained in B: face {face}", face)
    if A.dim > r:
        return -math.inf
    Br = B.with_cap(r)
    total = 0.0
    for d in range(r + 1):
        ext = exterior_masks(Br, d)
        if d >= 1:
            below = A.masks(d - 1)
            for m in ext:
                rest = m
                while rest:
                    b = rest & -rest
                    rest ^= b
                    if m ^ b not in below:
                        face = simplex_of(m)
                        raise StructureError(f"exterior face {face} of B has boundary outside A", face)
        total += _term(len(A.masks(d)), params.log_p(d)) + _term(len(ext), params.log_q(d))
    return total


# -- parameter files -----------------------------------------------------------
# "key = value" lines; '#' starts a comment; lists are comma or space separated


def parse_param_text(text: str) -> dict[str, str]:
    cfg = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        cfg[key] = value
    return cfg


def read_param_file(path) -> dict[str, str]:
    with open(path, encoding="utf-8") as fh:
        return parse_param_text(fh.read())


def parse_floats(value) -> list[float]:
    if isinstance(value, str):
        return [float(t) for t in value.replace(",", " ").split()]
    return [float(x) for x in value]


def params_from_config(cfg: dict) -> ModelParams:
    """Build :class:`ModelParams` from config keys ``g, N, n, r, alpha, p``.

    Exactly one of ``alpha`` and ``p`` must be present.
    """
    has_alpha, has_p = cfg.get("alpha") is not None, cfg.get("p") is not None
    if has_alpha == has_p:
        raise ValueError("give exactly one of 'alpha' and 'p'")
    g = int(cfg.get("g") or 1)
    n = float(cfg["n"]) if cfg.get("n") is not None else None
    N = int(cfg["N"]) if cfg.get("N") is not None else None
    r = int(cfg["r"]) if cfg.get("r") is not None else None
    if has_alpha:
        return ModelParams.from_alpha(g, parse_floats(cfg["alpha"]), n=n, N=N, r=r)
    p = parse_floats(cfg["p"])
    if N is None:
        if n is None:
            raise ValueError("N (or n) is required with an explicit p list")
        N = int(n)
    return ModelParams.from_p(p, N=N, g=g, n=n, r=r)
