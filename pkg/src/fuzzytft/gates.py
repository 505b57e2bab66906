"""Closed-form quantification of AND, OR, PAND and POR gates.

Crisp gates take plain failure probabilities (AND/OR) or exponential failure
rates (PAND/POR); the fuzzy variants take triangular fuzzy numbers and apply
the same formulas componentwise, pairing optimistic coefficients with
pessimistic decay rates (and vice versa) so the output stays an ordered
triple.

Conventions
-----------
* Rate lists for PAND/POR are ordered by occurrence: ``rates[0]`` is the
  event that must fail first; for POR, ``rates[0]`` is the priority event.
* Probabilities of temporal gates are evaluated over a mission time ``t``
  in the same time unit as the rates (conventionally hours).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.integrate import quad, solve_ivp

from .errors import DegeneratePoleError, DomainError, NumericError, SaturationError
from .tfn import TFN

#: Probabilities above 1 - SATURATION_EPS cannot be converted to a finite
#: rate; with clamping enabled they are saturated to exactly this value.
SATURATION_EPS = 1e-12

#: Relative pole gap below which a partial-fraction expansion is treated as
#: degenerate.
_POLE_GAP_RTOL = 1e-12

#: Relative jitter applied to clashing poles before re-evaluation.
_POLE_JITTER = 1e-9

#: Largest |pole|*t for which the divided-difference series is used instead
#: of the explicit partial-fraction sum (which cancels catastrophically for
#: small arguments).
_SERIES_THRESHOLD = 0.5

#: Subset expansions of the n-ary POR integrand beyond this size fall back
#: to adaptive quadrature.
_MAX_EXPANSION_TERMS = 1 << 16


@dataclass(frozen=True)
class PerturbationNote:
    """Record of a degenerate-pole perturbation applied during evaluation.

    ``check_rel_err`` is the relative disagreement between the perturbed
    partial-fraction value and an independent integration of the defining
    nested integral.
    """

    context: str
    poles: tuple[float, ...]
    jitter: float
    check_rel_err: float

    def __str__(self):
        return (
            f"{self.context}: degenerate poles {self.poles} perturbed by "
            f"relative {self.jitter:g} (cross-check rel. err {self.check_rel_err:.2e})"
        )


def _check_time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise DomainError(f"mission time must be finite and >= 0, got {t}")
    return t


def pole_sequence(rates: Sequence[float]) -> tuple[float, ...]:
    """Poles of the ordered-occurrence transform for first-to-last rates.

    The sequence starts at 0 and subtracts cumulative rate sums taken from
    the *last* event backwards, matching the nested integral in which the
    outermost integration variable is the last event's failure time.
    """
    if not rates:
        raise DomainError("pole_sequence requires at least one rate")
    poles = [0.0]
    acc = 0.0
    for lam in reversed(list(rates)):
        acc += float(lam)
        poles.append(-acc)
    return tuple(poles)


def heaviside_sum(poles: Sequence[float], t: float) -> float:
    """Evaluate ``sum_k exp(x_k t) / prod_{j != k} (x_k - x_j)``.

    This is the divided difference of ``exp(x*t)`` over the pole nodes.  The
    explicit partial-fraction sum is used when the exponents are large
    enough for it to be well conditioned; for small ``|pole| * t`` the value
    is computed from the divided-difference power series instead, which is
    free of cancellation.

    Raises :class:`DegeneratePoleError` when two poles (nearly) coincide;
    callers are expected to perturb and re-check (see ``crisp_pand``).
    """
    t = _check_time(t)
    xs = [float(x) for x in poles]
    if len(xs) < 2:
        raise DomainError("heaviside_sum requires at least two poles")
    scale = max(abs(x) for x in xs)
    gap_tol = _POLE_GAP_RTOL * scale
    ordered = sorted(xs)
    for a, b in zip(ordered, ordered[1:]):
        if b - a <= gap_tol:
            raise DegeneratePoleError(f"poles {a} and {b} closer than {gap_tol:g}")
    if scale * t <= _SERIES_THRESHOLD:
        return _heaviside_series(xs, t)
    return _heaviside_partial_fractions(xs, t)


def _heaviside_partial_fractions(xs: list[float], t: float) -> float:
    total = 0.0
    for k, xk in enumerate(xs):
        denom = 1.0
        for j, xj in enumerate(xs):
            if j != k:
                denom *= xk - xj
        total += math.exp(xk * t) / denom
    return total


def _heaviside_series(xs: Sequence[float], t: float, max_terms: int = 60) -> float:
    # Divided difference of exp(x*t) as sum_m t^(n+m)/(n+m)! * h_m(xs), with
    # h_m the complete homogeneous symmetric polynomials built one node at a
    # time.  Converges superlinearly for |x|*t <= _SERIES_THRESHOLD and
    # tolerates coincident nodes.
    n = len(xs) - 1
    hm = np.zeros(max_terms)
    hm[0] = 1.0
    for idx, xj in enumerate(xs):
        if idx == 0:
            for m in range(1, max_terms):
                hm[m] = xj * hm[m - 1]
        else:
            for m in range(1, max_terms):
                hm[m] += xj * hm[m - 1]
    total = 0.0
    log_t = math.log(t) if t > 0 else None
    for m in range(max_terms):
        p = n + m
        if log_t is None:
            term = 1.0 if p == 0 else 0.0
        else:
            term = math.exp(p * log_t - math.lgamma(p + 1)) * hm[m]
        total += term
        if m >= 3 and abs(term) <= 1e-17 * max(abs(total), 1e-300):
            break
    return total


def _heaviside_reference(xs: Sequence[float], t: float) -> float:
    """Independent evaluation used to cross-check perturbed expansions.

    Integrates the chain of nested convolutions directly: writing ``D_k``
    for the value over the first ``k + 1`` poles, ``D_k' = x_k D_k +
    D_{k-1}``, started from ``D(0) = (1, 0, ..., 0)``.  Solved adaptively,
    so it tolerates coincident poles.
    """
    xs = [float(x) for x in xs]
    if max(abs(x) for x in xs) * t <= _SERIES_THRESHOLD:
        return _heaviside_series(xs, t)

    def rhs(_s, d):
        out = np.empty_like(d)
        out[0] = xs[0] * d[0]
        for k in range(1, len(xs)):
            out[k] = xs[k] * d[k] + d[k - 1]
        return out

    d0 = np.zeros(len(xs))
    d0[0] = 1.0
    sol = solve_ivp(
        rhs, (0.0, t), d0, rtol=1e-11, atol=1e-300, first_step=t * 1e-6
    )
    if not sol.success:
        raise NumericError(f"reference integration failed: {sol.message}")
    return float(sol.y[-1, -1])


def _perturbed_poles(xs: Sequence[float]) -> tuple[float, ...]:
    # Deterministic index-scaled jitter keeps results reproducible.
    scale = max(abs(x) for x in xs)
    return tuple(x + _POLE_JITTER * scale * (k + 1) for k, x in enumerate(xs))


def _ordered_occurrence_value(
    coeff_rates: Sequence[float],
    pole_rates: Sequence[float],
    t: float,
    notes: list | None,
    context: str,
) -> float:
    """``prod(coeff_rates) * heaviside_sum(poles(pole_rates), t)`` with
    degenerate-pole handling."""
    if t == 0.0:
        return 0.0
    if any(r == 0.0 for r in coeff_rates):
        # An input that never occurs makes the ordered conjunction impossible.
        return 0.0
    poles = pole_sequence(pole_rates)
    try:
        h = heaviside_sum(poles, t)
    except DegeneratePoleError:
        perturbed = _perturbed_poles(poles)
        h = heaviside_sum(perturbed, t)
        ref = _heaviside_reference(poles, t)
        rel = abs(h - ref) / max(abs(ref), 1e-300)
        if rel > 1e-6:
            raise NumericError(
                f"{context}: perturbed pole expansion disagrees with direct "
                f"integration (rel. err {rel:.2e})"
            )
        if notes is not None:
            notes.append(PerturbationNote(context, poles, _POLE_JITTER, rel))
    coeff = 1.0
    for r in coeff_rates:
        coeff *= r
    return coeff * h


def _as_unit_probability(p: float, context: str) -> float:
    # Guard against floating drift; anything further out signals a real bug.
    if -1e-9 <= p <= 1.0 + 1e-9:
        return min(max(p, 0.0), 1.0)
    raise NumericError(f"{context} produced {p}, outside [0, 1]")


def _check_probability(p: float, context: str) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"{context} requires probabilities in [0, 1], got {p}")
    return p


def _check_rates(rates: Sequence[float], context: str) -> list[float]:
    out = []
    for lam in rates:
        lam = float(lam)
        if not math.isfinite(lam) or lam < 0:
            raise DomainError(f"{context} requires finite rates >= 0, got {lam}")
        out.append(lam)
    if not out:
        raise DomainError(f"{context} requires at least one rate")
    return out


# ---------------------------------------------------------------------------
# Crisp gates
# ---------------------------------------------------------------------------

def crisp_and(probs: Iterable[float]) -> float:
    result = 1.0
    for p in probs:
        result *= _check_probability(p, "crisp_and")
    return result


def crisp_or(probs: Iterable[float]) -> float:
    survive = 1.0
    for p in probs:
        survive *= 1.0 - _check_probability(p, "crisp_or")
    return 1.0 - survive


def crisp_pand(rates: Sequence[float], t: float, notes: list | None = None) -> float:
    """Probability that independent exponential events fail in the given
    order, all within mission time ``t``."""
    rates = _check_rates(rates, "crisp_pand")
    t = _check_time(t)
    value = _ordered_occurrence_value(rates, rates, t, notes, "crisp_pand")
    return _as_unit_probability(value, "crisp_pand")


def crisp_por(rates: Sequence[float], t: float) -> float:
    """Probability that the priority event (``rates[0]``) fails first, by
    ``t``, before any competitor has failed."""
    rates = _check_rates(rates, "crisp_por")
    t = _check_time(t)
    total = sum(rates)
    if total == 0.0:
        return 0.0
    value = rates[0] * (-math.expm1(-total * t)) / total
    return _as_unit_probability(value, "crisp_por")


# ---------------------------------------------------------------------------
# Fuzzy gates
# ---------------------------------------------------------------------------

def _ordered_tfn(lo: float, pk: float, up: float, context: str) -> TFN:
    # Snap floating noise; a genuine inversion means the componentwise
    # formulas were applied outside their regime.
    tol = 1e-9 * max(1.0, abs(lo), abs(pk), abs(up))
    if lo > pk:
        if lo - pk > tol:
            raise NumericError(f"{context} produced unordered components ({lo}, {pk}, {up})")
        lo = pk
    if up < pk:
        if pk - up > tol:
            raise NumericError(f"{context} produced unordered components ({lo}, {pk}, {up})")
        up = pk
    return TFN(lo, pk, up)


def _check_fuzzy_probs(probs: Sequence[TFN], context: str) -> list[TFN]:
    probs = list(probs)
    if not probs:
        raise DomainError(f"{context} requires at least one operand")
    for p in probs:
        # The peak carries the crisp backbone and must be a probability.
        # Lower/upper components of temporal-gate outputs may legitimately
        # drift outside [0, 1] under componentwise arithmetic, so only
        # gross violations are rejected.
        _check_probability(p.peak, context)
        if p.upper < 0 or p.lower > 1:
            raise DomainError(f"{context} operand {p} lies entirely outside [0, 1]")
    return probs


def fuzzy_and(probs: Sequence[TFN]) -> TFN:
    probs = _check_fuzzy_probs(probs, "fuzzy_and")
    lo = pk = up = 1.0
    for p in probs:
        lo *= p.lower
        pk *= p.peak
        up *= p.upper
    return _ordered_tfn(lo, pk, up, "fuzzy_and")


def fuzzy_or(probs: Sequence[TFN]) -> TFN:
    probs = _check_fuzzy_probs(probs, "fuzzy_or")
    lo = pk = up = 1.0
    for p in probs:
        lo *= 1.0 - p.lower
        pk *= 1.0 - p.peak
        up *= 1.0 - p.upper
    return _ordered_tfn(1.0 - lo, 1.0 - pk, 1.0 - up, "fuzzy_or")


def _check_fuzzy_rates(rates: Sequence[TFN], context: str) -> list[TFN]:
    rates = list(rates)
    if not rates:
        raise DomainError(f"{context} requires at least one rate")
    for r in rates:
        if r.lower < 0:
            raise DomainError(f"{context} requires non-negative rate components, got {r}")
    return rates


def _clamp_unit(lo: float, pk: float, up: float, clamp: bool) -> tuple[float, float, float]:
    if clamp:
        lo = min(max(lo, 0.0), 1.0)
        up = min(max(up, 0.0), 1.0)
    return lo, pk, up


def fuzzy_pand(
    rates: Sequence[TFN], t: float, notes: list | None = None, clamp: bool = False
) -> TFN:
    """Fuzzy PAND over occurrence-ordered fuzzy rates.

    The lower component pairs the optimistic rate product with the
    pessimistic decay rates (and the upper component the reverse); the peak
    component is exactly the crisp formula at the peak rates.
    """
    rates = _check_fuzzy_rates(rates, "fuzzy_pand")
    t = _check_time(t)
    a = [r.lower for r in rates]
    b = [r.peak for r in rates]
    c = [r.upper for r in rates]
    lo = _ordered_occurrence_value(a, c, t, notes, "fuzzy_pand.lower")
    pk = _ordered_occurrence_value(b, b, t, notes, "fuzzy_pand.peak")
    up = _ordered_occurrence_value(c, a, t, notes, "fuzzy_pand.upper")
    pk = _as_unit_probability(pk, "fuzzy_pand.peak")
    lo, pk, up = _clamp_unit(lo, pk, up, clamp)
    return _ordered_tfn(lo, pk, up, "fuzzy_pand")


def _por_side(
    lead_coeff: float,
    lead_decay: float,
    comp_ratios: Sequence[float],
    comp_exponents: Sequence[float],
    t: float,
) -> float:
    """One outer component of the fuzzy POR integral.

    Integrates ``lead_coeff * exp(-lead_decay*x) * prod_i (1 - r_i +
    r_i*exp(-e_i*x))`` over ``[0, t]`` by expanding the product into a
    signed sum of exponentials (exact); falls back to adaptive quadrature
    when the expansion would be too large.
    """
    k = len(comp_ratios)
    if lead_coeff == 0.0:
        return 0.0
    if k <= 16 and (1 << k) <= _MAX_EXPANSION_TERMS:
        total = 0.0
        for mask in range(1 << k):
            coef = lead_coeff
            expo = lead_decay
            m = mask
            for i in range(k):
                if m & 1:
                    coef *= comp_ratios[i]
                    expo += comp_exponents[i]
                else:
                    coef *= 1.0 - comp_ratios[i]
                m >>= 1
            if coef != 0.0:
                total += coef * (-math.expm1(-expo * t)) / expo
        return total

    def integrand(x):
        val = lead_coeff * math.exp(-lead_decay * x)
        for r, e in zip(comp_ratios, comp_exponents):
            val *= 1.0 - r + r * math.exp(-e * x)
        return val

    value, _err = quad(integrand, 0.0, t, limit=500, epsabs=1e-15, epsrel=1e-11)
    return value


def fuzzy_por(
    rates: Sequence[TFN], t: float, notes: list | None = None, clamp: bool = False
) -> TFN:
    """Fuzzy POR with ``rates[0]`` as the priority event.

    The peak component is the crisp POR at peak rates.  The lower (upper)
    component integrates the optimistic (pessimistic) priority density
    against the competitors' complementary fuzzy failure distributions,
    whose survival factor is ``1 - r + r*exp(-e*x)`` with ratio ``r`` and
    decay ``e`` taken from opposite ends of each competitor's support.
    """
    rates = _check_fuzzy_rates(rates, "fuzzy_por")
    t = _check_time(t)
    del notes  # POR needs no pole expansion; accepted for interface symmetry
    if t == 0.0:
        return TFN(0.0, 0.0, 0.0)
    b = [r.peak for r in rates]
    pk = crisp_por(b, t)
    others = rates[1:]
    lo = 0.0
    if rates[0].lower > 0.0 and all(o.lower > 0 for o in others):
        lo = _por_side(
            rates[0].lower,
            rates[0].upper,
            [o.upper / o.lower for o in others],
            [o.lower for o in others],
            t,
        )
    up = 0.0
    if rates[0].upper > 0.0:
        up = _por_side(
            rates[0].upper,
            rates[0].lower,
            [o.lower / o.upper if o.upper > 0 else 0.0 for o in others],
            [o.upper for o in others],
            t,
        )
    lo, pk, up = _clamp_unit(lo, pk, up, clamp)
    return _ordered_tfn(lo, pk, up, "fuzzy_por")


# ---------------------------------------------------------------------------
# Rate <-> probability conversion
# ---------------------------------------------------------------------------

def rate_to_prob(rate: TFN, t: float) -> TFN:
    """Failure probability ``1 - exp(-rate*t)`` of an exponential event,
    componentwise (a monotone map, so ordering is preserved)."""
    t = _check_time(t)
    if rate.lower < 0:
        raise DomainError(f"rate_to_prob requires non-negative rate components, got {rate}")
    return TFN(
        -math.expm1(-rate.lower * t),
        -math.expm1(-rate.peak * t),
        -math.expm1(-rate.upper * t),
    )


def prob_to_rate(prob: TFN, t: float, clamp: bool = False) -> TFN:
    """Equivalent exponential rate ``-ln(1 - P)/t`` for each component.

    Components at or above ``1 - SATURATION_EPS`` have no finite rate; with
    ``clamp=True`` they saturate to the rate of ``1 - SATURATION_EPS``
    (an "already failed" event to numerical precision), otherwise a
    :class:`SaturationError` is raised.
    """
    t = _check_time(t)
    if t == 0.0:
        raise DomainError("prob_to_rate requires t > 0")

    def convert(p: float) -> float:
        if p < 0.0:
            if clamp and p > -1e-9:
                p = 0.0
            else:
                raise DomainError(f"prob_to_rate requires components >= 0, got {p}")
        if p > 1.0 - SATURATION_EPS:
            if not clamp:
                raise SaturationError(
                    f"probability {p} has no finite equivalent rate at t={t}; "
                    f"enable clamping to saturate"
                )
            p = 1.0 - SATURATION_EPS
        return -math.log1p(-p) / t

    return TFN(convert(prob.lower), convert(prob.peak), convert(prob.upper))
