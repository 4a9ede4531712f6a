"""Closed-form rates, covertness budgets, and channel constants.

Unit conventions: all rates and entropies here are base-2 (bits / ebits);
the covertness budget delta_c is a natural-log relative-entropy bound and
the chi-square budget chain stays in nats.  The covertness constant c_cov
contains no logarithm, so the two conventions never mix inside a formula.

Boundary parameter values (eta in {0, 1}, nbar_b = 0) raise typed
``BoundaryError`` signals instead of returning infinities, so sweep code can
render gaps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import (
    ChannelParams,
    PauliVector,
    depolarizing_vector,
    pauli_convolve,
)

IDENTITY_TOL = 1e-12


class BoundaryError(ValueError):
    """A channel or budget parameter sits on a boundary with no finite answer."""


class UnboundedCovertness(BoundaryError):
    """eta = 1: the covertness constant diverges (noiseless port for the warden)."""


class DivergentReliability(BoundaryError):
    """nbar_b = 0 or eta = 0: c_cov = 0 while c_rel or c_key diverges."""


class NonCovertRegime(BoundaryError):
    """The transmit-probability bound reaches 1; sparse signaling cannot hide."""


@dataclass(frozen=True)
class CovertBudget:
    """Relative-entropy covertness budget (nats) and blocklength."""

    delta_c: float
    n: float

    def __post_init__(self):
        if self.delta_c <= 0:
            raise ValueError(f"delta_c must be > 0, got {self.delta_c}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")


@dataclass(frozen=True)
class RateConstants:
    """Covertness, reliability, and key-length constants (rates in bits)."""

    c_cov: float
    c_rel: float
    c_key: float

    @property
    def l_eg(self) -> float:
        """Covert entanglement-generation capacity c_cov * c_rel."""
        return self.c_cov * self.c_rel

    @property
    def key1_coefficient(self) -> float:
        """Leading-order covertness-key coefficient [c_key - c_rel]^+."""
        return max(self.c_key - self.c_rel, 0.0)

    @property
    def key2_coefficient(self) -> float:
        """Leading-order one-time-pad key coefficient (equals c_rel)."""
        return self.c_rel


@dataclass(frozen=True)
class PracticalRates:
    """Projection, twirl, and hashing-bound summary for a parameter point."""

    p_success: float
    q_twirl: PauliVector
    p_combined: PauliVector
    r_sr: float
    r_dr: float


def covertness_constant(params: ChannelParams) -> float:
    """c_cov = sqrt(2 eta nbar_b (1 + eta nbar_b)) / (1 - eta).

    Returns 0 when eta = 0 or nbar_b = 0; raises UnboundedCovertness at
    eta = 1 (the constant has no finite value there).
    """
    if params.eta >= 1.0:
        raise UnboundedCovertness("c_cov diverges at eta = 1")
    prod = params.eta * params.nbar_b
    return math.sqrt(2.0 * prod * (1.0 + prod)) / (1.0 - params.eta)


def rate_constants(params: ChannelParams) -> RateConstants:
    """All three capacity constants; boundary parameter values raise."""
    if params.eta >= 1.0:
        raise UnboundedCovertness("c_cov diverges at eta = 1")
    if params.nbar_b == 0.0:
        raise DivergentReliability("nbar_b = 0: c_cov = 0 and c_rel diverges")
    if params.eta == 0.0:
        raise DivergentReliability("eta = 0: c_cov = 0 and c_key diverges")
    c_cov = covertness_constant(params)
    c_rel = params.eta * math.log2(1.0 + 1.0 / ((1.0 - params.eta) * params.nbar_b))
    c_key = (1.0 - params.eta) * math.log2(1.0 + 1.0 / (params.eta * params.nbar_b))
    return RateConstants(c_cov=c_cov, c_rel=c_rel, c_key=c_key)


def capacity_asymptote(eta: float) -> float:
    """Large-noise limit of c_cov * c_rel: sqrt(2) eta^2 / ((1 - eta)^2 ln 2)."""
    if not 0.0 < eta < 1.0:
        raise BoundaryError(f"capacity asymptote needs 0 < eta < 1, got {eta}")
    return math.sqrt(2.0) * eta**2 / ((1.0 - eta) ** 2 * math.log(2.0))


def projection_success(params: ChannelParams) -> float:
    """Probability that a twirled single-rail qubit survives qubit projection.

    Closed form [1 + (1-eta) nbar_b (3 + 2 nbar_b - 2 eta (nbar_b + 1/2))] /
    (1 + (1-eta) nbar_b)^3, which equals tr(Pi rho Pi) for the maximally mixed
    single-rail input through the receiver port (it evaluates to 1 at eta = 1
    and at nbar_b = 0).  The projection failure probability is 1 minus this.
    """
    e, nb = params.eta, params.nbar_b
    g1 = (1.0 - e) * nb  # = G - 1
    num = 1.0 + g1 * (3.0 + 2.0 * nb - 2.0 * e * (nb + 0.5))
    return num / (1.0 + g1) ** 3


def twirl_vector_unnormalized(params: ChannelParams) -> tuple[float, float, float, float]:
    """The raw twirl closed forms (q_I, q_X, q_Y, q_Z); they sum to 4, not 1."""
    g, tau = params.gain, params.tau
    denom = g * (2.0 - tau) + tau - 1.0  # = 2 N(G, tau) G^2
    base = g * (2.0 - tau) - 1.0
    root = 2.0 * math.sqrt(g * tau)
    q_i = (base + 2.0 * tau + root) / denom
    q_x = base / denom
    q_y = base / denom
    q_z = (base + 2.0 * tau - root) / denom
    return q_i, q_x, q_y, q_z


def twirl_vector(params: ChannelParams) -> PauliVector:
    """Pauli-twirl probabilities of the projected receiver-port channel.

    The raw closed forms sum to 4; dividing by 4 gives the Bell-overlap
    probabilities of the (trace-normalized) projected Choi state, with
    (1, 0, 0, 0) at eta = 1 as required for an identity channel.
    """
    q = twirl_vector_unnormalized(params)
    return PauliVector(*(v / 4.0 for v in q))


def combined_pauli(params: ChannelParams) -> PauliVector:
    """Pauli vector of the full project-and-twirl qubit channel.

    Group convolution of the depolarizing vector at the projection failure
    probability with the twirl vector: p_a = s q_a + (1 - s) / 4 for every a,
    where s is the projection success probability.  This is what the exact
    four-Pauli twirl of the physical channel (with failure replaced by the
    maximally mixed state) produces.
    """
    failure = 1.0 - projection_success(params)
    return pauli_convolve(depolarizing_vector(failure), twirl_vector(params))


def shannon_entropy_bits(probs) -> float:
    """Shannon entropy of a probability vector, in bits."""
    p = np.asarray(probs, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def single_rail_rate(params: ChannelParams) -> float:
    """Hashing-bound ebit rate [1 - H(p_combined)]^+ per channel use."""
    return max(0.0, 1.0 - shannon_entropy_bits(combined_pauli(params).as_array()))


def dual_rail_vector(params: ChannelParams) -> PauliVector:
    """Depolarizing Pauli vector of the dual-rail scheme, p = 1 - eta / G^4."""
    p = 1.0 - params.eta / params.gain**4
    return depolarizing_vector(p)


def dual_rail_rate(params: ChannelParams) -> float:
    """Hashing-bound ebit rate [1 - H(p_dr)]^+ per dual-rail round."""
    return max(0.0, 1.0 - shannon_entropy_bits(dual_rail_vector(params).as_array()))


def practical_rates(params: ChannelParams) -> PracticalRates:
    """Assemble the projection/twirl/hashing summary for one parameter point."""
    return PracticalRates(
        p_success=projection_success(params),
        q_twirl=twirl_vector(params),
        p_combined=combined_pauli(params),
        r_sr=single_rail_rate(params),
        r_dr=dual_rail_rate(params),
    )


def total_ebits_optimal(params: ChannelParams, budget: CovertBudget) -> float:
    """sqrt(n delta_c) * c_cov * c_rel."""
    consts = rate_constants(params)
    return math.sqrt(budget.n) * math.sqrt(budget.delta_c) * consts.l_eg


def total_ebits_single_rail(
    params: ChannelParams, budget: CovertBudget, vartheta: float
) -> float:
    """(1 - vartheta) sqrt(n) sqrt(2) c_cov R_sr sqrt(delta_c)."""
    _check_vartheta(vartheta)
    c_cov = covertness_constant(params)
    return (
        (1.0 - vartheta)
        * math.sqrt(budget.n)
        * math.sqrt(2.0)
        * c_cov
        * single_rail_rate(params)
        * math.sqrt(budget.delta_c)
    )


def total_ebits_dual_rail(params: ChannelParams, budget: CovertBudget, vartheta: float) -> float:
    """(1 - vartheta) sqrt(n) (c_cov / sqrt(2)) R_dr sqrt(delta_c)."""
    _check_vartheta(vartheta)
    c_cov = covertness_constant(params)
    return (
        (1.0 - vartheta)
        * math.sqrt(budget.n)
        * (c_cov / math.sqrt(2.0))
        * dual_rail_rate(params)
        * math.sqrt(budget.delta_c)
    )


def _check_vartheta(vartheta: float) -> None:
    if not 0.0 < vartheta < 1.0:
        raise ValueError(f"vartheta must be in (0, 1), got {vartheta}")


def chi2_closed(params: ChannelParams) -> float:
    """chi^2 divergence between the warden's on/off states: (1-eta)^2 / (4 eta nbar_b (1 + eta nbar_b)).

    Satisfies chi2_closed = 1 / (2 c_cov^2) identically.
    """
    if params.eta >= 1.0:
        raise UnboundedCovertness("chi2 closed form needs eta < 1")
    if params.eta == 0.0 or params.nbar_b == 0.0:
        raise DivergentReliability("chi2 closed form needs eta > 0 and nbar_b > 0")
    prod = params.eta * params.nbar_b
    return (1.0 - params.eta) ** 2 / (4.0 * prod * (1.0 + prod))


def q_max(params: ChannelParams, budget: CovertBudget) -> float:
    """Largest covert per-use transmit probability sqrt(2) c_cov sqrt(delta_c / n).

    Satisfies q_max^2 * n * chi2_closed = delta_c exactly.  Raises
    NonCovertRegime when the bound reaches 1.
    """
    c_cov = covertness_constant(params)
    value = math.sqrt(2.0) * c_cov * math.sqrt(budget.delta_c) / math.sqrt(budget.n)
    if value >= 1.0:
        raise NonCovertRegime(
            f"transmit-probability bound {value:.3e} >= 1 at n={budget.n}, "
            f"delta_c={budget.delta_c}"
        )
    return value
