"""Sparse-signaling machinery: weight windows, secret sampling, plan assembly.

A transmission schedule is a length-n binary sequence x drawn i.i.d.
Bernoulli(q) conditioned on its weight w(x) lying in the window
[n (q - vartheta), n (q + vartheta)].  Conditioning is realized by rejection
sampling; the acceptance probability is at least 1 - 2 exp(-q n vartheta^2 / 3)
(Chernoff), which is near 1 in the covert regime.

Randomness comes from a named counter-based generator (numpy Philox) so every
artifact can record its seed and be reproduced exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import ChannelParams
from .formulas import (
    CovertBudget,
    dual_rail_rate,
    q_max,
    single_rail_rate,
    total_ebits_dual_rail,
    total_ebits_optimal,
    total_ebits_single_rail,
)

RNG_NAME = "philox"
MAX_REJECTION_ATTEMPTS = 10**6
SYMBOLS = "IXYZ"


class RejectionExhausted(RuntimeError):
    """The rejection sampler ran out of attempts."""


def generator(seed: int) -> np.random.Generator:
    """The package-wide counter-based generator (Philox) for a given seed."""
    return np.random.Generator(np.random.Philox(seed))


@dataclass(frozen=True)
class SparseConfig:
    """Blocklength n, per-use transmit probability q, window half-width vartheta."""

    n: int
    q: float
    vartheta: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"q must be in (0, 1), got {self.q}")
        if self.vartheta <= 0.0:
            raise ValueError(f"vartheta must be > 0, got {self.vartheta}")
        lo, hi = self.weight_window
        if lo > hi:
            raise ValueError(
                f"weight window [{self.n * (self.q - self.vartheta)}, "
                f"{self.n * (self.q + self.vartheta)}] contains no integer in [0, {self.n}]"
            )

    @property
    def weight_window(self) -> tuple[int, int]:
        """Integer weight bounds [lo, hi] of the window intersected with [0, n]."""
        lo = max(0, math.ceil(self.n * (self.q - self.vartheta) - 1e-12))
        hi = min(self.n, math.floor(self.n * (self.q + self.vartheta) + 1e-12))
        return lo, hi

    def admits(self, weight: int) -> bool:
        lo, hi = self.weight_window
        return lo <= weight <= hi


@dataclass(frozen=True)
class SecretPair:
    """Transmission schedule x and Pauli-symbol sequence y of length w(x)."""

    x: tuple[int, ...]
    y: str

    def __post_init__(self):
        if len(self.y) != sum(self.x):
            raise ValueError(f"len(y)={len(self.y)} does not equal w(x)={sum(self.x)}")
        if any(c not in SYMBOLS for c in self.y):
            raise ValueError(f"y contains symbols outside {SYMBOLS!r}")

    @property
    def weight(self) -> int:
        return sum(self.x)

    def to_text(self) -> str:
        """Two lines: the bitstring, then the symbol sequence."""
        return "".join(str(b) for b in self.x) + "\n" + self.y + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SecretPair":
        lines = text.splitlines()
        if len(lines) < 2:
            raise ValueError("expected two lines: bitstring and symbol sequence")
        x = tuple(int(c) for c in lines[0].strip())
        return cls(x=x, y=lines[1].strip())


def q_from_budget(params: ChannelParams, budget: CovertBudget) -> float:
    """The covertness-limited transmit probability (delegates to the q bound)."""
    return q_max(params, budget)


def chernoff_bound(config: SparseConfig) -> float:
    """Rejection-probability bound 2 exp(-q n vartheta^2 / 3); can exceed 1 (vacuous)."""
    return 2.0 * math.exp(-config.q * config.n * config.vartheta**2 / 3.0)


def sample_secret(
    config: SparseConfig, seed: int, max_attempts: int = MAX_REJECTION_ATTEMPTS
) -> SecretPair:
    """Draw (x, y): x ~ Bernoulli(q)^n conditioned on the window, y uniform Paulis.

    Deterministic given (config, seed).  Raises RejectionExhausted with the
    Chernoff acceptance estimate if no draw lands in the window.
    """
    gen = generator(seed)
    for _ in range(max_attempts):
        x = (gen.random(config.n) < config.q).astype(int)
        if config.admits(int(x.sum())):
            w = int(x.sum())
            y = "".join(SYMBOLS[i] for i in gen.integers(0, 4, size=w))
            return SecretPair(x=tuple(int(b) for b in x), y=y)
    raise RejectionExhausted(
        f"no admissible x in {max_attempts} attempts; Chernoff-estimated "
        f"acceptance probability is >= {max(0.0, 1.0 - chernoff_bound(config)):.3e}"
    )


def rejection_frequency(config: SparseConfig, trials: int, seed: int) -> float:
    """Monte Carlo frequency of |q - w/n| > vartheta for raw Bernoulli draws.

    Weights of i.i.d. Bernoulli(q) draws are Binomial(n, q), so the weights
    are sampled directly; this measures the sampler's per-attempt rejection
    probability without materializing the bit vectors.
    """
    gen = generator(seed)
    lo, hi = config.weight_window
    rejected = 0
    done = 0
    while done < trials:
        m = min(100_000, trials - done)
        w = gen.binomial(config.n, config.q, size=m)
        rejected += int(np.sum((w < lo) | (w > hi)))
        done += m
    return rejected / trials


@dataclass(frozen=True)
class CovertEbitPlan:
    """Auditable record of one covert entanglement-generation operating point."""

    eta: float
    nbar_b: float
    n: float
    delta_c: float
    vartheta: float
    q: float
    expected_nonzero_uses: float
    r_sr: float
    r_dr: float
    total_optimal: float
    total_single_rail: float
    total_dual_rail: float
    reasons: tuple[str, ...]


def covert_ebit_plan(
    params: ChannelParams, budget: CovertBudget, vartheta: float
) -> CovertEbitPlan:
    """Assemble rates and totals into one plan; totals match the rate formulas exactly.

    Boundary and non-covert-regime signals from the underlying formulas
    propagate unchanged.
    """
    q = q_from_budget(params, budget)
    r_sr = single_rail_rate(params)
    r_dr = dual_rail_rate(params)
    reasons = []
    if r_sr == 0.0:
        reasons.append("single-rail hashing rate is zero (entropy of the Pauli vector >= 1)")
    if r_dr == 0.0:
        reasons.append("dual-rail hashing rate is zero (entropy of the Pauli vector >= 1)")
    return CovertEbitPlan(
        eta=params.eta,
        nbar_b=params.nbar_b,
        n=budget.n,
        delta_c=budget.delta_c,
        vartheta=vartheta,
        q=q,
        expected_nonzero_uses=q * budget.n,
        r_sr=r_sr,
        r_dr=r_dr,
        total_optimal=total_ebits_optimal(params, budget),
        total_single_rail=total_ebits_single_rail(params, budget, vartheta),
        total_dual_rail=total_ebits_dual_rail(params, budget, vartheta),
        reasons=tuple(reasons),
    )
