"""Heat multipliers on convolution symbols and the compactness toolkit.

The heat multiplier at time t damps a symbol coefficientwise by
exp(-t * length); truncating at radius n additionally cuts the support to
the ball B_n.  These multipliers form a contraction semigroup whose
generator is minus length multiplication, which this module validates by
finite differences.  On top of them sits the compactness machinery for
the unit set

    K = { symbols f : ||op(f)|| <= 1 and ||op(length * f)|| <= 1 }:

certified membership verdicts, the (t, n) parameters whose truncated heat
images approximate every member of K within eps, and the decomposition
writing an arbitrary finitely supported symbol as an integer multiple of
a K member plus a multiple of the identity.

Rapid-decay constants (C, k) enter the truncation estimates as an
assumption: the tail factor C * sup over lengths l > n of
exp(-t l)(1 + l)^k controls what truncation loses.  No concrete (C, k) is
certified here; defaults are C = 1, k = 2 and every report labels them as
assumed.  The companion estimator returns certified lower bounds on the
best C for a given k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .coxeter import DEFAULT_BALL_CAP, CoxeterGroup
from .errors import InvariantViolation
from .functions import GroupFunction, exp_length, times_length
from .operators import NormInterval, compressed_norm, compression, norm_interval

CERTIFIED_IN = "CERTIFIED_IN"
CERTIFIED_OUT = "CERTIFIED_OUT"
UNDETERMINED = "UNDETERMINED"

_MAX_TRUNCATION_SEARCH = 10_000_000


@dataclass(frozen=True)
class HeatParams:
    """Heat multiplier time t > 0, with optional truncation radius n."""

    t: float
    n: int | None = None

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError("t must be positive")
        if self.n is not None and self.n < 0:
            raise ValueError("truncation radius must be >= 0")


@dataclass(frozen=True)
class RdConstants:
    """Assumed rapid-decay constants: norm <= C * length-weighted l2 norm
    with weight exponent k."""

    C: float = 1.0
    k: int = 2

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError("C must be positive")
        if self.k < 0 or not isinstance(self.k, int):
            raise ValueError("k must be a nonnegative integer")


@dataclass(frozen=True)
class KVerdict:
    """Membership certificate for the unit set K."""

    status: str
    fn_interval: NormInterval
    lfn_interval: NormInterval


def heat_apply(params: HeatParams, f: GroupFunction) -> GroupFunction:
    """Damp coefficients by exp(-t * length); cut beyond B_n if truncated."""
    factor = exp_length(params.t)
    if params.n is None:
        return f.pointwise(factor)
    n = params.n
    return f.pointwise(lambda g: factor(g) if g.length <= n else 0.0)


def generator_check(f: GroupFunction, t: float, radius: int, cap: int = DEFAULT_BALL_CAP) -> float:
    """Compressed norm of the finite-difference defect of the generator.

    The symbol checked is (exp(-t l) - 1)/t + l applied coefficientwise;
    the scalar Taylor bound |(e^-x - 1)/t + l| <= t l^2 / 2 caps the
    result by generator_bound.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    defect = f.pointwise(lambda g: (math.exp(-t * g.length) - 1.0) / t + g.length)
    return compressed_norm(compression(defect, radius, cap))


def generator_bound(f: GroupFunction, t: float) -> float:
    """Second-order Taylor cap (t/2) * max length^2 * l1 for the defect."""
    return 0.5 * t * f.max_length() ** 2 * f.l1()


def tail_sup(t: float, k: int, n: int) -> float:
    """sup over integer lengths l > n of exp(-t l) (1 + l)^k.

    The map is unimodal with peak at k/t - 1, so the supremum sits either
    at l = n + 1 or at the integers flanking the peak.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if k < 0:
        raise ValueError("k must be >= 0")
    lo = n + 1

    def value(l: int) -> float:
        return math.exp(-t * l) * (1.0 + l) ** k

    if k == 0:
        return value(lo)
    peak = k / t - 1.0
    if peak <= lo:
        return value(lo)
    return max(value(max(lo, int(math.floor(peak)))), value(max(lo, int(math.ceil(peak)))))


def _minimal_truncation(rd: RdConstants, t: float, threshold: float) -> int:
    """Smallest n with C * tail_sup(t, k, n) <= threshold."""
    n = 0
    while rd.C * tail_sup(t, rd.k, n) > threshold:
        n += 1
        if n > _MAX_TRUNCATION_SEARCH:
            raise ValueError(
                f"no truncation radius below {_MAX_TRUNCATION_SEARCH} meets "
                f"threshold {threshold} at t={t} with C={rd.C}, k={rd.k}"
            )
    return n


def psi_params(m: int, rd: RdConstants) -> HeatParams:
    """Truncated heat parameters of the m-th approximate identity.

    Takes t = 1/m and the minimal truncation radius whose assumed tail
    factor is at most min(2, 1/m): the 2 keeps every approximant within
    three times the norm it approximates, the 1/m makes the tails vanish
    as m grows.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    t = 1.0 / m
    n = _minimal_truncation(rd, t, min(2.0, 1.0 / m))
    return HeatParams(t, n)


def k_membership(f: GroupFunction, radius: int, cap: int = DEFAULT_BALL_CAP) -> KVerdict:
    """Certified membership of the symbol in the unit set K.

    CERTIFIED_IN needs both upper bounds at most 1, CERTIFIED_OUT some
    lower bound above 1; intervals straddling 1 stay UNDETERMINED.
    """
    fn = norm_interval(f, radius, cap)
    lfn = norm_interval(times_length(f), radius, cap)
    if fn.upper <= 1.0 and lfn.upper <= 1.0:
        status = CERTIFIED_IN
    elif fn.lower > 1.0 or lfn.lower > 1.0:
        status = CERTIFIED_OUT
    else:
        status = UNDETERMINED
    return KVerdict(status, fn, lfn)


@dataclass(frozen=True)
class EpsNetParams:
    """Parameters of the finite-dimensional eps-approximation of K.

    Every member of K sits within eps of a truncated heat image
    supported in B_n; the net itself is reported through (t, n), the
    dimension |B_n| and the norm bound of the approximants, because
    enumerating a delta-grid of a |B_n|-dimensional ball is exponential
    while the approximation content is carried by the parameters.
    """

    eps: float
    t: float
    n: int
    dimension: int
    radius_bound: float


def epsnet_params(
    group: CoxeterGroup,
    eps: float,
    rd: RdConstants,
    cap: int = DEFAULT_BALL_CAP,
) -> EpsNetParams:
    """Choose t = eps/2, then the smallest truncation radius whose assumed
    tail factor is at most eps/2; the two halves add up to eps for every
    member of K."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    t = eps / 2.0
    n = _minimal_truncation(rd, t, eps / 2.0)
    dimension = len(group.ball(n, cap))
    radius_bound = rd.C * (tail_sup(t, rd.k, n) + 1.0)
    return EpsNetParams(eps, t, n, dimension, radius_bound)


@dataclass(frozen=True)
class EpsNetReport:
    """Certified approximation of one symbol by its truncated heat image."""

    params: EpsNetParams
    membership: KVerdict
    analytic_bound: float
    empirical_distance: float


def epsnet_verify(
    f: GroupFunction,
    eps: float,
    rd: RdConstants,
    radius: int,
    cap: int = DEFAULT_BALL_CAP,
) -> EpsNetReport:
    """Approximate f by its truncated heat image and certify the distance.

    The analytic bound is t * upper(length part) plus the assumed tail
    factor times upper(f); the empirical distance is the compressed norm
    of the difference.  The empirical value can never exceed the analytic
    bound, and for a certified member of K the bound stays within eps;
    either failing is reported as an invariant violation (or a failure of
    the assumed rapid-decay constants).
    """
    membership = k_membership(f, radius, cap)
    if membership.status == CERTIFIED_OUT:
        raise ValueError("symbol is certified outside K; nothing to approximate")
    params = epsnet_params(f.group, eps, rd, cap)
    truncated = heat_apply(HeatParams(params.t, params.n), f)
    tail = tail_sup(params.t, rd.k, params.n)
    analytic = params.t * membership.lfn_interval.upper + rd.C * tail * membership.fn_interval.upper
    empirical = compressed_norm(compression(f - truncated, radius, cap))
    if empirical > analytic + 1e-9:
        raise InvariantViolation(
            f"empirical distance {empirical} exceeds analytic bound {analytic}; "
            f"the assumed rapid-decay constants C={rd.C}, k={rd.k} look invalid"
        )
    if membership.status == CERTIFIED_IN and analytic > eps + 1e-12:
        raise InvariantViolation(
            f"analytic bound {analytic} exceeds eps {eps} for a certified member of K"
        )
    return EpsNetReport(params, membership, analytic, empirical)


@dataclass(frozen=True)
class Decomposition:
    """h = multiple * k_part + unit_coeff * delta_e, exactly."""

    multiple: int
    unit_coeff: complex
    k_part: GroupFunction
    certificate: KVerdict | None


def decompose(h: GroupFunction, radius: int, cap: int = DEFAULT_BALL_CAP) -> Decomposition:
    """Write h as m * k + c * delta_e with k certified inside K.

    c is the coefficient at the identity; m is the smallest power of two
    at least both l1 upper bounds of the remainder, so the coefficient
    division is an exponent shift and the reconstruction is bit-exact.
    """
    group = h.group
    c = h[group.identity]
    remainder = h - GroupFunction.delta(group, group.identity, c)
    if not remainder:
        return Decomposition(0, c, GroupFunction.zero(group), None)
    bound = max(remainder.l1(), times_length(remainder).l1())
    mantissa, exponent = math.frexp(bound)
    if mantissa == 0.5:
        exponent -= 1
    multiple = 1 << max(exponent, 0)
    k_part = remainder / multiple
    certificate = k_membership(k_part, radius, cap)
    if certificate.status != CERTIFIED_IN:
        raise InvariantViolation(
            f"decomposition part failed certification: {certificate.status}"
        )
    return Decomposition(multiple, c, k_part, certificate)


def rd_estimate(
    samples: list[GroupFunction],
    k: int,
    radius: int,
    cap: int = DEFAULT_BALL_CAP,
) -> float:
    """Certified lower bound on the best rapid-decay constant C at weight k.

    Maximizes (certified lower norm) / (length-weighted l2 norm) over the
    samples; zero symbols contribute nothing.
    """
    if not samples:
        raise ValueError("need at least one sample symbol")
    best = 0.0
    for f in samples:
        weighted = f.sobolev(k)
        if weighted == 0.0:
            continue
        lower = norm_interval(f, radius, cap).lower
        best = max(best, lower / weighted)
    return best
