"""Dimension gauge (weight) functions and the analytic conditions on them.

A gauge phi is a continuous increasing function with phi(0) = 0; u denotes
its inverse.  The module provides the built-in families, their inverses and
derivatives, the regularity conditions (monotone ratio tests and the
squared-argument bound on log 1/u), the divergence integral of (u/u')^{n-1}
dt/t^n, the univalent-case integral of |log phi / log t|^2 dt/t, synthesis
of a derived gauge psi(r) = C1 r^n exp(C2 I(r, r0)), and the dyadic
corridor-width rule alpha(2^-k) used by the fractal construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DerivativeError,
    GaugeDomainError,
    QuadratureError,
    UnderflowError,
)

LOG2 = math.log(2.0)


def _as_array(t):
    a = np.asarray(t, dtype=float)
    return a, (a.ndim == 0)


class GaugeFunction:
    """Base class: a gauge phi with inverse u, valid on (0, t_max]."""

    kind = "abstract"

    def __init__(self, t_max=1.0, beta=None):
        if not 0.0 < t_max <= 1.0:
            raise GaugeDomainError(f"t_max must be in (0, 1], got {t_max}")
        self.t_max = float(t_max)
        self._beta = beta

    # -- evaluation hooks (array in, array out, domain already checked) --
    def _phi(self, t):
        raise NotImplementedError

    def _phi_prime(self, t):
        raise NotImplementedError

    def _u(self, t):
        raise NotImplementedError

    def _u_prime(self, t):
        raise NotImplementedError

    @property
    def u_max(self):
        """Upper end of the validity range of u."""
        return max(self.t_max, float(self._phi(np.asarray(self.t_max))))

    @property
    def t_min(self):
        """Lower end of the validity range (0 for closed forms)."""
        return 0.0

    def _check(self, t, hi, what):
        if np.any(t <= self.t_min) or np.any(t > hi * (1 + 1e-12)):
            raise GaugeDomainError(
                f"{what} argument outside ({self.t_min}, {hi}] for {self.kind}"
            )

    def phi(self, t):
        a, scalar = _as_array(t)
        self._check(a, self.t_max, "phi")
        out = self._phi(a)
        return float(out) if scalar else out

    def phi_prime(self, t):
        a, scalar = _as_array(t)
        self._check(a, self.t_max, "phi'")
        out = self._phi_prime(a)
        return float(out) if scalar else out

    def u(self, t):
        a, scalar = _as_array(t)
        self._check(a, self.u_max, "u")
        out = self._u(a)
        return float(out) if scalar else out

    def u_prime(self, t):
        a, scalar = _as_array(t)
        self._check(a, self.u_max, "u'")
        out = self._u_prime(a)
        return float(out) if scalar else out

    def u_over_u_prime(self, t):
        """The ratio u(t)/u'(t); overridden where the quotient is unstable."""
        a, scalar = _as_array(t)
        self._check(a, self.u_max, "u/u'")
        out = self._u(a) / self._u_prime(a)
        return float(out) if scalar else out

    @property
    def beta(self):
        """Doubling constant: declared, or estimated as sup phi(2t)/phi(t)."""
        if self._beta is None:
            t = np.exp(np.linspace(math.log(1e-12), math.log(self.t_max / 2), 256))
            self._beta = float(np.max(self._phi(2 * t) / self._phi(t)))
        return self._beta

    def params(self):
        raise NotImplementedError

    def to_json(self):
        return {"kind": self.kind, "params": self.params(), "t_max": self.t_max}

    def __repr__(self):
        ps = ", ".join(f"{k}={v}" for k, v in self.params().items()
                       if k != "breakpoints")
        return f"{type(self).__name__}({ps}, t_max={self.t_max})"


class PowerGauge(GaugeFunction):
    """phi(t) = t^a."""

    kind = "power"

    def __init__(self, a, t_max=1.0, beta=None):
        if a <= 0:
            raise GaugeDomainError("power exponent must be positive")
        super().__init__(t_max, beta)
        self.a = float(a)

    def _phi(self, t):
        return t ** self.a

    def _phi_prime(self, t):
        return self.a * t ** (self.a - 1.0)

    def _u(self, t):
        return t ** (1.0 / self.a)

    def _u_prime(self, t):
        return (1.0 / self.a) * t ** (1.0 / self.a - 1.0)

    def u_over_u_prime(self, t):
        a, scalar = _as_array(t)
        self._check(a, self.u_max, "u/u'")
        out = self.a * a
        return float(out) if scalar else out

    def params(self):
        return {"a": self.a}


class JonesMakarovGauge(GaugeFunction):
    """phi(t) = exp(-(c log(1/t))^(1/s)), the critical family for s near n/(n-1)."""

    kind = "jones_makarov"

    def __init__(self, c, s, t_max=0.5, beta=None):
        if c <= 0 or s < 1:
            raise GaugeDomainError("need c > 0 and s >= 1")
        if t_max >= 1.0:
            raise GaugeDomainError("t_max must be < 1 for this family")
        super().__init__(t_max, beta)
        self.c = float(c)
        self.s = float(s)

    def _phi(self, t):
        return np.exp(-((self.c * np.log(1.0 / t)) ** (1.0 / self.s)))

    def _phi_prime(self, t):
        # d/dt exp(-(cL)^{1/s}) with L = log 1/t
        L = np.log(1.0 / t)
        return self._phi(t) * (self.c * L) ** (1.0 / self.s) / (self.s * t * L)

    def _u(self, t):
        # invert: log(1/u) = (log 1/t)^s / c
        L = np.log(1.0 / t)
        return np.exp(-(L ** self.s) / self.c)

    def _u_prime(self, t):
        L = np.log(1.0 / t)
        return self._u(t) * self.s * L ** (self.s - 1.0) / (self.c * t)

    def u_over_u_prime(self, t):
        # c t / (s (log 1/t)^(s-1)); avoids the underflowing quotient u/u'
        a, scalar = _as_array(t)
        self._check(a, self.u_max, "u/u'")
        out = self.c * a / (self.s * np.log(1.0 / a) ** (self.s - 1.0))
        return float(out) if scalar else out

    def params(self):
        return {"c": self.c, "s": self.s}


class LogPowerGauge(GaugeFunction):
    """phi(t) = t^n (log 1/t)^C, the shape of the derived gauge at the threshold."""

    kind = "log_power"

    def __init__(self, n, C, t_max=0.25, beta=None):
        if n <= 0 or C <= 0:
            raise GaugeDomainError("need n > 0 and C > 0")
        # increasing only below exp(-C/n)
        if t_max >= math.exp(-C / n):
            raise GaugeDomainError(
                f"t_max must be < exp(-C/n) = {math.exp(-C / n):.4g}")
        super().__init__(t_max, beta)
        self.n = float(n)
        self.C = float(C)

    def _phi(self, t):
        return t ** self.n * np.log(1.0 / t) ** self.C

    def _phi_prime(self, t):
        L = np.log(1.0 / t)
        return t ** (self.n - 1.0) * L ** (self.C - 1.0) * (self.n * L - self.C)

    def _u(self, t):
        # monotone bisection in log t; phi is increasing on (0, t_max]
        t = np.atleast_1d(t)
        lo = np.full(t.shape, -800.0)
        hi = np.full(t.shape, math.log(self.t_max))
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            too_big = self._phi(np.exp(mid)) > t
            hi = np.where(too_big, mid, hi)
            lo = np.where(too_big, lo, mid)
        out = np.exp(0.5 * (lo + hi))
        return out if out.size > 1 else out.reshape(())

    def _u_prime(self, t):
        return 1.0 / self._phi_prime(self._u(t))

    def params(self):
        return {"n": self.n, "C": self.C}


class TabulatedGauge(GaugeFunction):
    """Gauge given by breakpoints in log-log coordinates, interpolated linearly.

    Breakpoints are pairs (log2 t, log2 phi(t)) with log2 t strictly
    increasing.  Non-monotone values are accepted (a synthesized gauge can
    lose monotonicity when the source integral diverges fast); inversion
    then raises.
    """

    kind = "tabulated"

    def __init__(self, log2_t, log2_phi, beta=None):
        log2_t = np.asarray(log2_t, dtype=float)
        log2_phi = np.asarray(log2_phi, dtype=float)
        if log2_t.ndim != 1 or log2_t.shape != log2_phi.shape or log2_t.size < 2:
            raise GaugeDomainError("need two equal-length 1-d breakpoint arrays")
        if not np.all(np.diff(log2_t) > 0):
            raise GaugeDomainError("log2 t breakpoints must be strictly increasing")
        super().__init__(t_max=float(2.0 ** log2_t[-1]), beta=beta)
        self.log2_t = log2_t
        self.log2_phi = log2_phi
        self.monotone = bool(np.all(np.diff(log2_phi) > 0))

    @property
    def t_min(self):
        return float(2.0 ** self.log2_t[0]) * (1 - 1e-12)

    @property
    def u_max(self):
        if not self.monotone:
            raise GaugeDomainError("tabulated gauge is not invertible (non-monotone)")
        return float(2.0 ** self.log2_phi[-1])

    def _interp(self, x, xs, ys):
        if np.any(x < xs[0] - 1e-9) or np.any(x > xs[-1] + 1e-9):
            raise GaugeDomainError("argument outside tabulated range")
        return np.interp(x, xs, ys)

    def _phi(self, t):
        return 2.0 ** self._interp(np.log2(t), self.log2_t, self.log2_phi)

    def _segment_slopes(self):
        return np.diff(self.log2_phi) / np.diff(self.log2_t)

    def _local_slope(self, x, xs, ys):
        """Slope at x from centered differences at the bracketing nodes."""
        h = np.diff(xs)
        if h.size >= 2:
            ratio = np.maximum(h[1:], h[:-1]) / np.minimum(h[1:], h[:-1])
            seg = np.clip(np.searchsorted(xs, np.atleast_1d(x)) - 1, 0, h.size - 1)
            bad = np.zeros(h.size, dtype=bool)
            bad[1:] |= ratio > 4.0
            bad[:-1] |= ratio > 4.0
            if np.any(bad[seg]):
                raise DerivativeError(
                    "breakpoint spacing ratio exceeds 4 in log-log; "
                    "derivative unreliable")
        slopes = np.diff(ys) / h
        # centered node slopes, linearly interpolated between nodes
        node = np.empty(xs.size)
        node[0], node[-1] = slopes[0], slopes[-1]
        if xs.size > 2:
            w = h[1:] / (h[:-1] + h[1:])
            node[1:-1] = w * slopes[:-1] + (1 - w) * slopes[1:]
        return np.interp(x, xs, node)

    def _phi_prime(self, t):
        x = np.log2(t)
        m = self._local_slope(x, self.log2_t, self.log2_phi)
        return m * self._phi(t) / t

    def _u(self, t):
        if not self.monotone:
            raise GaugeDomainError("tabulated gauge is not invertible (non-monotone)")
        return 2.0 ** self._interp(np.log2(t), self.log2_phi, self.log2_t)

    def _u_prime(self, t):
        x = np.log2(t)
        m = self._local_slope(x, self.log2_phi, self.log2_t)
        return m * self._u(t) / t

    def u_over_u_prime(self, t):
        a, scalar = _as_array(t)
        self._check(a, self.u_max, "u/u'")
        m = self._local_slope(np.log2(a), self.log2_phi, self.log2_t)
        out = a / m
        return float(out) if scalar else out

    def params(self):
        return {"breakpoints": [[float(a), float(b)]
                                for a, b in zip(self.log2_t, self.log2_phi)]}


_KINDS = {
    "power": lambda p, t_max: PowerGauge(p["a"], t_max=t_max),
    "jones_makarov": lambda p, t_max: JonesMakarovGauge(p["c"], p["s"], t_max=t_max),
    "log_power": lambda p, t_max: LogPowerGauge(p["n"], p["C"], t_max=t_max),
}


def gauge_from_json(obj) -> GaugeFunction:
    """Build a gauge from {kind, params, t_max}."""
    kind = obj["kind"]
    if kind == "tabulated":
        bp = np.asarray(obj["params"]["breakpoints"], dtype=float)
        return TabulatedGauge(bp[:, 0], bp[:, 1])
    try:
        maker = _KINDS[kind]
    except KeyError:
        raise GaugeDomainError(f"unknown gauge kind {kind!r}") from None
    return maker(obj["params"], obj.get("t_max", 1.0))


# ---------------------------------------------------------------------------
# condition checks
# ---------------------------------------------------------------------------

@dataclass
class ConditionReport:
    n: int
    sample_count: int
    prop1_holds: bool
    prop1_direction: str        # "non-increasing" | "non-decreasing" | "none"
    prop2_holds: bool
    prop3_holds: bool
    prop3_beta: float           # smallest beta with log 1/u(t^2) <= beta log 1/u(t)
    doubling_beta: float        # sup phi(2t)/phi(t) over samples
    warnings: list = field(default_factory=list)

    @property
    def all_hold(self):
        return self.prop1_holds and self.prop2_holds and self.prop3_holds


def _monotone_direction(values, tol):
    d = np.diff(values)
    if np.all(d >= -tol):
        return "non-decreasing"
    if np.all(d <= tol):
        return "non-increasing"
    return "none"


def _phi_small_range(g: GaugeFunction, t_lo):
    """Largest t with phi(t) safely below 1/e (keeps log phi away from 0)."""
    hi = g.t_max
    target = 0.98 / math.e
    if g.phi(hi) < target:
        return hi
    lo = t_lo
    for _ in range(80):
        mid = math.sqrt(lo * hi)
        if g.phi(mid) < target:
            lo = mid
        else:
            hi = mid
    return lo


def check_conditions(g: GaugeFunction, n: int, sample_count: int = 256) -> ConditionReport:
    """Evaluate the three weight-function conditions on log-spaced samples.

    Checks (a) monotonicity of phi'(t) t log t / (phi(t) log phi(t)),
    (b) monotonicity of u(t)/(t u'(t)), (c) the smallest beta with
    log 1/u(t^2) <= beta log 1/u(t), plus the doubling estimate
    sup phi(2t)/phi(t).  All samples are restricted to t with phi(t) < 1/e.
    """
    if sample_count < 16:
        raise ValueError("sample_count must be >= 16")
    warnings = []
    t_lo = max(2.0 ** -40, g.t_min * (1 + 1e-9) if g.t_min else 2.0 ** -40)
    t_hi = _phi_small_range(g, t_lo)
    if t_hi < g.t_max:
        warnings.append(
            f"phi log phi crosses -1 in range; restricted samples to t <= {t_hi:.3g}")
    t = np.exp(np.linspace(math.log(t_lo), math.log(t_hi), sample_count))

    # (a) on the phi side
    r1 = g.phi_prime(t) * t * np.log(t) / (g.phi(t) * np.log(g.phi(t)))
    tol1 = 1e-9 * float(np.max(np.abs(r1)))
    dir1 = _monotone_direction(r1, tol1)

    # (b) on the u side, sampled over the range of phi
    s_lo, s_hi = g.phi(t_lo), g.phi(t_hi)
    s = np.exp(np.linspace(math.log(s_lo), math.log(s_hi), sample_count))
    r2 = g.u(s) / (s * g.u_prime(s))
    tol2 = 1e-9 * float(np.max(np.abs(r2)))
    prop2 = _monotone_direction(r2, tol2) == "non-decreasing" or np.allclose(
        r2, r2[0], rtol=1e-9)

    # (c) ratio log(1/u(t^2)) / log(1/u(t)); needs t^2 in range
    q_lo, q_hi = math.sqrt(s_lo), s_hi
    q = np.exp(np.linspace(math.log(q_lo), math.log(q_hi), sample_count))
    ratio = np.log(1.0 / g.u(q ** 2)) / np.log(1.0 / g.u(q))
    beta3 = float(np.max(ratio))
    third = sample_count // 3
    # the bound must not degrade as t -> 0: the small-t ratios may not
    # exceed the large-t ones beyond numerical slack
    prop3 = float(np.max(ratio[:third])) <= float(np.max(ratio[-third:])) * 1.05 + 1e-9

    td = t[2 * t <= g.t_max]
    doubling = float(np.max(g.phi(2 * td) / g.phi(td))) if td.size else float("nan")

    return ConditionReport(
        n=n,
        sample_count=sample_count,
        prop1_holds=dir1 != "none",
        prop1_direction=dir1,
        prop2_holds=bool(prop2),
        prop3_holds=bool(prop3),
        prop3_beta=beta3,
        doubling_beta=doubling,
        warnings=warnings,
    )


# ---------------------------------------------------------------------------
# integrals
# ---------------------------------------------------------------------------

def _log_trapezoid(f, r, r0, nodes_per_decade):
    """Trapezoid rule for int f(t) dt/t over [r, r0], uniform in log t."""
    if not 0 < r < r0:
        raise GaugeDomainError(f"need 0 < r < r0, got r={r}, r0={r0}")
    decades = math.log10(r0 / r)
    m = max(64, int(math.ceil(nodes_per_decade * decades)) + 1)
    x = np.linspace(math.log(r), math.log(r0), m)
    y = f(np.exp(x))
    if not np.all(np.isfinite(y)):
        raise QuadratureError("integrand non-finite at a quadrature node")
    return float(np.trapezoid(y, x))


def divergence_integral(g: GaugeFunction, n: int, r: float, r0: float,
                        nodes_per_decade: int = 64) -> float:
    """I(r, r0) = int_[r, r0] (u(t)/u'(t))^(n-1) dt/t^n."""
    if r0 > g.u_max * (1 + 1e-12):
        raise GaugeDomainError(f"r0={r0} beyond validity range of u")
    if n < 2:
        raise ValueError("ambient dimension n must be >= 2")

    def f(t):
        return g.u_over_u_prime(t) ** (n - 1) * t ** (1 - n)

    return _log_trapezoid(f, r, r0, nodes_per_decade)


def jones_integral(g: GaugeFunction, r: float, r0: float,
                   nodes_per_decade: int = 64) -> float:
    """int_[r, r0] |log phi(t) / log t|^2 dt/t (the planar univalent test)."""
    if r0 > min(g.t_max, 1.0 / math.e) * (1 + 1e-12):
        raise GaugeDomainError("r0 must be <= min(t_max, 1/e)")

    def f(t):
        return np.abs(np.log(g.phi(t)) / np.log(t)) ** 2

    return _log_trapezoid(f, r, r0, nodes_per_decade)


def dyadic_blocks(g: GaugeFunction, n: int, j_list, integral="divergence"):
    """Block integrals I(2^-2j, 2^-j) for each j, for either integral."""
    out = []
    for j in j_list:
        r, r0 = 2.0 ** (-2 * j), 2.0 ** (-j)
        if integral == "divergence":
            out.append(divergence_integral(g, n, r, r0))
        else:
            out.append(jones_integral(g, r, r0))
    return out


def classify_blocks(blocks, floor=1e-3, conv_ratio=0.9, div_ratio=0.95) -> str:
    """Classify a sequence of dyadic-block integrals at doubling scales.

    Convergent when blocks decay geometrically (every successive ratio
    <= conv_ratio) or vanish below the floor; Divergent when they stay
    above the floor without decaying (every ratio >= div_ratio); else
    Inconclusive.
    """
    b = [float(v) for v in blocks]
    if b[-1] < floor:
        return "Convergent"
    ratios = [b[i + 1] / b[i] for i in range(len(b) - 1)] if len(b) > 1 else [1.0]
    if max(ratios) <= conv_ratio:
        return "Convergent"
    if min(b) >= floor and min(ratios) >= div_ratio:
        return "Divergent"
    return "Inconclusive"


def classify_divergence(g: GaugeFunction, n: int, j_max: int = 20,
                        floor=1e-3, conv_ratio=0.9, div_ratio=0.95) -> str:
    """Decide whether the divergence integral diverges, at finite precision.

    Uses block integrals I(2^-2j, 2^-j) at j = j_max/4, j_max/2, j_max.
    A diverging integral has non-decaying blocks; a converging one has
    geometrically decaying blocks (successive ratio bounded below 1).
    """
    if j_max < 20:
        raise ValueError("j_max must be >= 20")
    js = [max(1, j_max // 4), j_max // 2, j_max]
    blocks = dyadic_blocks(g, n, js, "divergence")
    return classify_blocks(blocks, floor, conv_ratio, div_ratio)


# ---------------------------------------------------------------------------
# derived gauge and technical lemma
# ---------------------------------------------------------------------------

def psi_from_phi(g: GaugeFunction, n: int, C1: float, C2: float, r0: float,
                 j_max: int = 40, nodes_per_decade: int = 64) -> TabulatedGauge:
    """Synthesize psi(r) = C1 r^n exp(C2 I(r, r0)) on a dyadic log grid.

    Returns a tabulated gauge sampled at r0 and r = 2^-j down to 2^-j_max.
    For strongly diverging integrals the raw psi can fail to be increasing;
    the result is still evaluable but flagged non-monotone.
    """
    if r0 > g.u_max * (1 + 1e-12):
        raise GaugeDomainError("r0 beyond validity range of u")
    j_start = int(math.floor(-math.log2(r0)))
    if 2.0 ** (-j_start) >= r0 * (1 - 1e-12):
        j_start += 1
    js = np.arange(j_start, j_max + 1)
    grid = np.concatenate((2.0 ** (-js[::-1]), [r0]))

    def f(t):
        return (g.u(t) / g.u_prime(t)) ** (n - 1) * t ** (1 - n)

    # cumulative I(grid[i], r0) via per-segment quadrature
    cum = np.zeros(grid.size)
    for i in range(grid.size - 2, -1, -1):
        cum[i] = cum[i + 1] + _log_trapezoid(f, grid[i], grid[i + 1],
                                             nodes_per_decade)
    log2_psi = (math.log(C1) + n * np.log(grid) + C2 * cum) / LOG2
    return TabulatedGauge(np.log2(grid), log2_psi)


@dataclass
class TechLemmaReport:
    r_list: list
    integrals: list
    ratios: list            # log(J(r)) / log(phi(r)) per r
    c_hat: float            # largest admissible exponent across r_list
    stable: bool            # variation of ratios <= 10%


def tech_lemma_check(g: GaugeFunction, n: int, r_list,
                     cutoff: float = 2.0 ** -60) -> TechLemmaReport:
    """Verify int_[0,r] phi(t)^(1/n) dt/t <= phi(r)^C and estimate C.

    J(r) <= phi(r)^C holds (both sides below 1) iff
    log J(r) / log phi(r) >= C, so the reported c_hat is the infimum of
    that ratio over r_list.
    """
    integrals, ratios = [], []
    for r in r_list:
        if r <= cutoff:
            raise GaugeDomainError("r must exceed the quadrature cutoff")
        J = _log_trapezoid(lambda t: g.phi(t) ** (1.0 / n), cutoff, r, 64)
        integrals.append(J)
        ratios.append(math.log(J) / math.log(g.phi(r)))
    c_hat = min(ratios)
    spread = (max(ratios) - min(ratios)) / abs(min(ratios)) if ratios else 0.0
    return TechLemmaReport(list(r_list), integrals, ratios, c_hat, spread <= 0.10)


def alpha_from_gauge(g: GaugeFunction, c: float, k: int,
                     depth_cap: int = 60) -> float:
    """Corridor half-width alpha(2^-k): c u/u' clamped to t/16, rounded down
    to a power of two.

    Rounding down preserves the alpha(t) <= t/16 bound the construction
    needs.  Raises UnderflowError below 2^-depth_cap.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    t = 2.0 ** (-k)
    val = min(c * g.u(t) / g.u_prime(t), t / 16.0)
    if val <= 0 or not math.isfinite(val):
        raise UnderflowError(f"alpha value degenerate at k={k}")
    mant, exp = math.frexp(val)   # val = mant * 2^exp, mant in [0.5, 1)
    out = math.ldexp(1.0, exp - 1)
    if out < 2.0 ** (-depth_cap):
        raise UnderflowError(
            f"alpha(2^-{k}) = {out:.3g} below 2^-{depth_cap}; "
            "gauge decays too fast for this resolution")
    return out
