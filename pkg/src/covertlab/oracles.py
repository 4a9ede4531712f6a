"""Independent numeric verification of every closed form in the package.

Each ``verify_*`` function compares a closed-form quantity against a
truncated-Fock-space computation that never calls the closed form it checks
(both sides share only the fock primitives) and returns an ``OracleReport``
with the error and the named tolerance it was judged against.

Tolerances sit two decades above worst-case truncation leakage; every report
carries its truncation dimension so a failure is attributable.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import fock
from .channels import (
    PAULIS,
    ChannelParams,
    KrausChannel,
    apply,
    choi_state,
    lossy_thermal_kraus,
    qubit_project,
    single_rail_state,
    twirl_from_choi,
    willie_port_kraus,
)
from .fock import DensityMatrix, TruncationError, thermal_dim, thermal_state
from .formulas import chi2_closed, combined_pauli, projection_success, twirl_vector
from .sparse import SparseConfig, chernoff_bound, rejection_frequency

TOLERANCES = {
    "chi2_relative": 1e-7,
    "willie_entrywise": 1e-8,
    "twirl_component": 1e-8,
    "combined_entrywise": 1e-7,
    "projection_abs": 1e-9,
    # clamping sigma's sub-floor product eigenvalues wobbles the n-fold
    # relative entropies by up to ~1e-8; the chain margins are >= 1e-4
    "sparse_chain": 1e-7,
    "chernoff_3sigma": 0.0,
    "pinsker_margin": 1e-12,
    "additivity_abs": 1e-9,
    "kl_chi2_margin": 1e-12,
}

CHI2_POINTS = ((0.6, 0.2), (0.95, 1e-2), (0.8, 1.0))
WILLIE_ETAS = (0.3, 0.6, 0.9)
WILLIE_NBARS = (0.02, 0.2, 1.0)
TWIRL_POINTS = ((0.95, 1e-3), (0.8, 1e-1), (0.65, 1.0))
COMBINED_POINTS = ((1.0, 0.3), (0.95, 1e-3), (0.8, 1e-2), (0.65, 1e-1))
SPARSE_BLOCKLENGTHS = (2, 4, 6)


@dataclass(frozen=True)
class OracleReport:
    """One analytic-vs-numeric comparison judged against a named tolerance."""

    name: str
    analytic: tuple[float, ...]
    numeric: tuple[float, ...]
    abs_error: float
    rel_error: float
    truncation_dim: int
    tolerance_name: str
    passed: bool

    @property
    def tolerance(self) -> float:
        return TOLERANCES[self.tolerance_name]

    def to_line(self) -> str:
        def fmt(values):
            return "(" + ",".join(f"{v:.12g}" for v in values) + ")"

        status = "PASS" if self.passed else "FAIL"
        return (
            f"{self.name}: analytic={fmt(self.analytic)} numeric={fmt(self.numeric)} "
            f"abs_err={self.abs_error:.3e} rel_err={self.rel_error:.3e} "
            f"dim={self.truncation_dim} tol={self.tolerance_name}<={self.tolerance:.1e} {status}"
        )


def render_reports(reports) -> str:
    return "\n".join(r.to_line() for r in reports) + "\n"


def _report(name, analytic, numeric, abs_error, rel_error, dim, tol_name):
    tol = TOLERANCES[tol_name]
    return OracleReport(
        name=name,
        analytic=tuple(float(v) for v in np.atleast_1d(analytic)),
        numeric=tuple(float(v) for v in np.atleast_1d(numeric)),
        abs_error=float(abs_error),
        rel_error=float(rel_error),
        truncation_dim=int(dim),
        tolerance_name=tol_name,
        passed=bool(abs_error <= tol),
    )


def _gen(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream])))


def oracle_dim(mean_photons: float, headroom: int = 8, floor: int = 24) -> int:
    """Truncation dimension for a thermal-like state of the given mean.

    Sized for a 1e-14 geometric tail plus headroom for the single added
    photon and the polynomial factors of the analytic forms.
    """
    base = thermal_dim(mean_photons, tail_budget=1e-14, floor=1)
    return min(fock.MAX_SINGLE_MODE_DIM, max(floor, base + headroom))


def willie_state_analytic(
    beta_sq: float, gamma: complex, params: ChannelParams, dim: int
) -> DensityMatrix:
    """Warden output state for a single-rail input, built term by term.

    Input is the qubit [[1 - beta_sq, gamma], [gamma*, beta_sq]]; with
    nu = eta * nbar_b the output has diagonal entries

        nu^m / (1+nu)^(m+1) + beta_sq (1-eta) nu^(m-1) (m - nu) / (1+nu)^(m+2)

    and coherence bands

        <m|rho|m+1> = -gamma  sqrt((1-eta)(m+1)) nu^m     / (1+nu)^(m+2)
        <m|rho|m-1> = -gamma* sqrt((1-eta) m)    nu^(m-1) / (1+nu)^(m+1).
    """
    if not 0.0 <= beta_sq <= 1.0:
        raise ValueError(f"beta_sq must be in [0, 1], got {beta_sq}")
    if abs(gamma) ** 2 > beta_sq * (1.0 - beta_sq) + 1e-12:
        raise ValueError(f"|gamma|={abs(gamma):.3e} is not a valid coherence for beta_sq={beta_sq}")
    eta, nu = params.eta, params.eta * params.nbar_b
    one = 1.0 + nu
    data = np.zeros((dim, dim), dtype=complex)
    for m in range(dim):
        nu_m = nu**m
        term1 = nu_m / one ** (m + 1)
        if m == 0:
            term2 = -beta_sq * (1.0 - eta) / one**2
        else:
            term2 = beta_sq * (1.0 - eta) * nu ** (m - 1) * (m - nu) / one ** (m + 2)
        data[m, m] = term1 + term2
        if m + 1 < dim:
            data[m, m + 1] = -gamma * math.sqrt((1.0 - eta) * (m + 1)) * nu_m / one ** (m + 2)
        if m >= 1:
            data[m, m - 1] = (
                -np.conj(gamma) * math.sqrt((1.0 - eta) * m) * nu ** (m - 1) / one ** (m + 1)
            )
    tail = max(0.0, 1.0 - float(np.trace(data).real))
    if tail > 1e-10:
        raise TruncationError(f"dim={dim} leaves tail {tail:.3e} > 1e-10; increase dim")
    return DensityMatrix(dim, data, tail=tail)


def verify_willie_state(
    beta_sq: float, gamma: complex, params: ChannelParams, dim: int | None = None
) -> OracleReport:
    """Analytic warden state vs the reflected-port Kraus simulation, entrywise."""
    if dim is None:
        dim = oracle_dim(params.eta * params.nbar_b)
    analytic = willie_state_analytic(beta_sq, gamma, params, dim)
    channel = willie_port_kraus(params, dim)
    numeric = apply(channel, single_rail_state(beta_sq, gamma, dim))
    diff = float(np.max(np.abs(analytic.data - numeric.data)))
    scale = float(np.max(np.abs(analytic.data)))
    return _report(
        name=f"willie_state[eta={params.eta:g},nbar={params.nbar_b:g},b2={beta_sq:.4g},"
        f"g={gamma:.4g}]",
        analytic=np.linalg.norm(analytic.data),
        numeric=np.linalg.norm(numeric.data),
        abs_error=diff,
        rel_error=diff / scale,
        dim=dim,
        tol_name="willie_entrywise",
    )


def verify_chi2(params: ChannelParams, dim: int | None = None) -> OracleReport:
    """Truncated-Fock chi-square of the warden's on/off states vs the closed form."""
    if dim is None:
        dim = oracle_dim(params.eta * params.nbar_b)
    channel = willie_port_kraus(params, dim)
    rho_on = apply(channel, single_rail_state(0.5, 0.0, dim))
    rho_off = thermal_state(params.eta * params.nbar_b, dim)
    numeric = fock.chi2_divergence(rho_on, rho_off)
    analytic = chi2_closed(params)
    rel = abs(numeric - analytic) / analytic
    return _report(
        name=f"chi2[eta={params.eta:g},nbar={params.nbar_b:g}]",
        analytic=analytic,
        numeric=numeric,
        abs_error=rel,
        rel_error=rel,
        dim=dim,
        tol_name="chi2_relative",
    )


def verify_twirl(params: ChannelParams, dim: int | None = None) -> OracleReport:
    """Bell-overlap twirl probabilities from the Choi state vs the closed forms."""
    if dim is None:
        dim = oracle_dim((1.0 - params.eta) * params.nbar_b)
    channel = lossy_thermal_kraus(params, dim)
    choi, _ = choi_state(channel)
    numeric = twirl_from_choi(choi).as_array()
    analytic = twirl_vector(params).as_array()
    diff = float(np.max(np.abs(numeric - analytic)))
    return _report(
        name=f"twirl[eta={params.eta:g},nbar={params.nbar_b:g}]",
        analytic=analytic,
        numeric=numeric,
        abs_error=diff,
        rel_error=diff / float(np.max(analytic)),
        dim=dim,
        tol_name="twirl_component",
    )


def verify_projection_success(params: ChannelParams, dim: int | None = None) -> OracleReport:
    """Numeric tr(Pi rho Pi) on the maximally mixed single-rail input vs the closed form.

    The numeric side establishes that the closed form is the projection
    SUCCESS probability (it equals 1 at eta = 1 and at nbar_b = 0).
    """
    if dim is None:
        dim = oracle_dim((1.0 - params.eta) * params.nbar_b)
    channel = lossy_thermal_kraus(params, dim)
    out = apply(channel, single_rail_state(0.5, 0.0, dim))
    numeric, _ = qubit_project(out)
    analytic = projection_success(params)
    diff = abs(numeric - analytic)
    return _report(
        name=f"projection_success[eta={params.eta:g},nbar={params.nbar_b:g}]",
        analytic=analytic,
        numeric=numeric,
        abs_error=diff,
        rel_error=diff / analytic,
        dim=dim,
        tol_name="projection_abs",
    )


def _physical_twirled_choi(channel: KrausChannel, dim: int) -> np.ndarray:
    """Choi matrix of: embed qubit -> channel -> project (fail -> max mixed) -> twirl.

    Assembled from the images of the four qubit matrix units, i.e. the process
    matrix of the physical map, with the exact four-term twirl average.
    """
    stack = channel._stack
    max_mixed = np.eye(2, dtype=complex) / 2.0

    def physical_map(m2: np.ndarray) -> np.ndarray:
        m = np.zeros((dim, dim), dtype=complex)
        m[:2, :2] = m2
        out = np.einsum("aij,jk,alk->il", stack, m, stack.conj(), optimize=True)
        block = out[:2, :2]
        fail_weight = np.trace(m2) - np.trace(block)
        return block + fail_weight * max_mixed

    def twirled_map(m2: np.ndarray) -> np.ndarray:
        acc = np.zeros((2, 2), dtype=complex)
        for p in PAULIS:
            acc += p.conj().T @ physical_map(p @ m2 @ p.conj().T) @ p
        return acc / 4.0

    choi = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            unit = np.zeros((2, 2), dtype=complex)
            unit[i, j] = 1.0
            choi[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = twirled_map(unit)
    return choi / 2.0  # Choi state normalization for the |Phi+> input


def _pauli_channel_choi(vec) -> np.ndarray:
    phi = np.zeros(4, dtype=complex)
    phi[0] = phi[3] = 1.0 / math.sqrt(2.0)
    rho = np.outer(phi, phi.conj())
    acc = np.zeros((4, 4), dtype=complex)
    for w, p in zip(vec.as_array(), PAULIS):
        big = np.kron(np.eye(2, dtype=complex), p)
        acc += w * big @ rho @ big.conj().T
    return acc


def verify_combined_channel(params: ChannelParams, dim: int | None = None) -> OracleReport:
    """Full simulate-project-twirl process matrix vs the combined Pauli vector."""
    if dim is None:
        dim = oracle_dim((1.0 - params.eta) * params.nbar_b)
    channel = lossy_thermal_kraus(params, dim)
    numeric_choi = _physical_twirled_choi(channel, dim)
    analytic_choi = _pauli_channel_choi(combined_pauli(params))
    diff = float(np.max(np.abs(numeric_choi - analytic_choi)))
    return _report(
        name=f"combined_channel[eta={params.eta:g},nbar={params.nbar_b:g}]",
        analytic=np.linalg.norm(analytic_choi),
        numeric=np.linalg.norm(numeric_choi),
        abs_error=diff,
        rel_error=diff / float(np.max(np.abs(analytic_choi))),
        dim=dim,
        tol_name="combined_entrywise",
    )


def _diagonal_of(state: DensityMatrix) -> np.ndarray:
    off = np.max(np.abs(state.data - np.diag(np.diagonal(state.data))))
    if off > 1e-12:
        raise ValueError(f"state is not diagonal (max off-diagonal {off:.3e})")
    return np.diagonal(state.data).real


def _diag_state(diag: np.ndarray) -> DensityMatrix:
    return DensityMatrix(len(diag), np.diag(diag.astype(complex)), tail=max(0.0, 1.0 - diag.sum()))


def _windowed_mixture(n: int, q: float, config: SparseConfig, d0, d1) -> np.ndarray:
    """Diagonal of sum_{x in A} p_X(x) prod_i rho^{x_i}, normalized over the window."""
    total = np.zeros(len(d0) ** n)
    prob_in = 0.0
    for bits in itertools.product((0, 1), repeat=n):
        w = sum(bits)
        if not config.admits(w):
            continue
        prob = q**w * (1.0 - q) ** (n - w)
        term = np.ones(1)
        for b in bits:
            term = np.kron(term, d1 if b else d0)
        total += prob * term
        prob_in += prob
    return total / prob_in


def verify_sparse_qre(
    n: int,
    q: float,
    vartheta: float,
    params: ChannelParams,
    dim_per_mode: int = 4,
) -> OracleReport:
    """Exact n-fold relative-entropy chain for windowed sparse signaling.

    Checks, on the exact n-mode truncated space, that (i) the gap between the
    windowed mixture's relative entropy and the i.i.d. mixture's relative
    entropy (both to the all-quiet product state) does not grow as the window
    parameter increases through vartheta, 1.5 vartheta, 2 vartheta, and
    (ii) the single-mode mixture obeys D(rho_bar || rho0) <= q^2 * chi2_closed.
    """
    if dim_per_mode**n > fock.MAX_COMPOSITE_DIM:
        raise fock.DimensionError(
            f"composite dimension {dim_per_mode**n} exceeds {fock.MAX_COMPOSITE_DIM}"
        )
    # Simulate the per-mode states at full accuracy, then keep the leading
    # dim_per_mode levels; the dropped mass is declared truncation tail.
    sim_dim = oracle_dim(params.eta * params.nbar_b)
    channel = willie_port_kraus(params, sim_dim)
    rho_on = apply(channel, single_rail_state(0.5, 0.0, sim_dim))
    rho_off = thermal_state(params.eta * params.nbar_b, sim_dim)
    d1 = _diagonal_of(rho_on)[:dim_per_mode]
    d0 = _diagonal_of(rho_off)[:dim_per_mode]
    d_bar = (1.0 - q) * d0 + q * d1

    sigma_n = np.ones(1)
    bar_n = np.ones(1)
    for _ in range(n):
        sigma_n = np.kron(sigma_n, d0)
        bar_n = np.kron(bar_n, d_bar)
    sigma_state = _diag_state(sigma_n)
    d_prod = fock.relative_entropy(_diag_state(bar_n), sigma_state)

    gaps = []
    for theta in (vartheta, 1.5 * vartheta, 2.0 * vartheta):
        config = SparseConfig(n=n, q=q, vartheta=theta)
        mix = _windowed_mixture(n, q, config, d0, d1)
        d_n = fock.relative_entropy(_diag_state(mix), sigma_state)
        gaps.append(abs(d_n - d_prod))

    d_single = fock.relative_entropy(_diag_state(d_bar), _diag_state(d0))
    bound = q**2 * chi2_closed(params)

    growth = max(later - earlier for earlier, later in zip(gaps, gaps[1:]))
    violation = max(0.0, growth, d_single - bound)
    return _report(
        name=f"sparse_qre[n={n},q={q:g},theta={vartheta:g},eta={params.eta:g},"
        f"nbar={params.nbar_b:g}]",
        analytic=(bound, 0.0),
        numeric=(d_single, *gaps),
        abs_error=violation,
        rel_error=violation,
        dim=dim_per_mode**n,
        tol_name="sparse_chain",
    )


def verify_chernoff(config: SparseConfig, trials: int, seed: int) -> OracleReport:
    """Monte Carlo window-rejection frequency vs 2 exp(-q n vartheta^2 / 3) at 3 sigma."""
    bound = min(1.0, chernoff_bound(config))
    freq = rejection_frequency(config, trials, seed)
    three_sigma = 3.0 * math.sqrt(bound * (1.0 - bound) / trials)
    excess = max(0.0, freq - (bound + three_sigma))
    return _report(
        name=f"chernoff[n={config.n},q={config.q:g},theta={config.vartheta:g},trials={trials}]",
        analytic=bound,
        numeric=freq,
        abs_error=excess,
        rel_error=excess,
        dim=0,
        tol_name="chernoff_3sigma",
    )


def random_density(gen: np.random.Generator, dim: int, rank: int | None = None) -> DensityMatrix:
    """Full-rank (by default) random density matrix from the Ginibre ensemble."""
    r = rank or dim
    g = gen.normal(size=(dim, r)) + 1j * gen.normal(size=(dim, r))
    m = g @ g.conj().T
    return DensityMatrix(dim, m / np.trace(m).real)


def verify_pinsker_batch(seed: int, count: int = 1000, max_dim: int = 8) -> OracleReport:
    """(1/4)||rho - sigma||_1 <= sqrt(D(rho||sigma)/8) on random pairs and warden states."""
    gen = _gen(seed, 1)
    worst = -math.inf
    for _ in range(count):
        dim = int(gen.integers(2, max_dim + 1))
        rho = random_density(gen, dim)
        sigma = random_density(gen, dim)
        lhs = 0.5 * fock.trace_distance(rho, sigma)
        rhs = math.sqrt(fock.relative_entropy(rho, sigma) / 8.0)
        worst = max(worst, lhs - rhs)
    # the chain must also hold on the states the channel oracles produce
    for eta, nbar in itertools.product(WILLIE_ETAS, WILLIE_NBARS):
        params = ChannelParams(eta, nbar)
        dim = oracle_dim(eta * nbar)
        rho = apply(willie_port_kraus(params, dim), single_rail_state(0.5, 0.0, dim))
        sigma = thermal_state(eta * nbar, dim)
        lhs = 0.5 * fock.trace_distance(rho, sigma)
        rhs = math.sqrt(fock.relative_entropy(rho, sigma) / 8.0)
        worst = max(worst, lhs - rhs)
    return _report(
        name=f"pinsker_chain[count={count},seed={seed}]",
        analytic=0.0,
        numeric=worst,
        abs_error=max(0.0, worst),
        rel_error=max(0.0, worst),
        dim=max_dim,
        tol_name="pinsker_margin",
    )


def verify_additivity_batch(seed: int, count: int = 1000, max_dim: int = 4) -> OracleReport:
    """D(rho x rho' || sigma x sigma') = D(rho||sigma) + D(rho'||sigma')."""
    gen = _gen(seed, 2)
    worst = 0.0
    for _ in range(count):
        da = int(gen.integers(2, max_dim + 1))
        db = int(gen.integers(2, max_dim + 1))
        rho_a, sigma_a = random_density(gen, da), random_density(gen, da)
        rho_b, sigma_b = random_density(gen, db), random_density(gen, db)
        joint = fock.relative_entropy(fock.tensor(rho_a, rho_b), fock.tensor(sigma_a, sigma_b))
        split = fock.relative_entropy(rho_a, sigma_a) + fock.relative_entropy(rho_b, sigma_b)
        worst = max(worst, abs(joint - split))
    return _report(
        name=f"qre_additivity[count={count},seed={seed}]",
        analytic=0.0,
        numeric=worst,
        abs_error=worst,
        rel_error=worst,
        dim=max_dim * max_dim,
        tol_name="additivity_abs",
    )


def verify_kl_chi2_batch(seed: int, count: int = 1000, dim: int = 12) -> OracleReport:
    """D(rho||sigma) <= chi2(rho||sigma) on random commuting (diagonal) pairs."""
    gen = _gen(seed, 3)
    worst = -math.inf
    for _ in range(count):
        p = gen.random(dim) + 0.05
        q = gen.random(dim) + 0.05
        rho = _diag_state(p / p.sum())
        sigma = _diag_state(q / q.sum())
        worst = max(worst, fock.relative_entropy(rho, sigma) - fock.chi2_divergence(rho, sigma))
    return _report(
        name=f"kl_le_chi2[count={count},seed={seed}]",
        analytic=0.0,
        numeric=worst,
        abs_error=max(0.0, worst),
        rel_error=max(0.0, worst),
        dim=dim,
        tol_name="kl_chi2_margin",
    )


def _chi2_monotone_report() -> OracleReport:
    """Closed-form chi-square decreases in nbar_b at fixed eta over a grid."""
    worst = 0.0
    for eta in (0.3, 0.6, 0.9):
        values = [chi2_closed(ChannelParams(eta, nb)) for nb in np.logspace(-3, 1, 25)]
        worst = max(worst, max(b - a for a, b in zip(values, values[1:])))
    return _report(
        name="chi2_monotone[eta in {0.3,0.6,0.9}]",
        analytic=0.0,
        numeric=worst,
        abs_error=max(0.0, worst),
        rel_error=max(0.0, worst),
        dim=0,
        tol_name="sparse_chain",
    )


def suite_fock(seed: int) -> list[OracleReport]:
    return [
        verify_pinsker_batch(seed),
        verify_additivity_batch(seed),
        verify_kl_chi2_batch(seed),
    ]


def suite_chi2(seed: int) -> list[OracleReport]:
    reports = [verify_chi2(ChannelParams(e, nb)) for e, nb in CHI2_POINTS]
    reports.append(_chi2_monotone_report())
    return reports


def suite_willie(seed: int) -> list[OracleReport]:
    gen = _gen(seed, 4)
    reports = []
    for eta, nbar in itertools.product(WILLIE_ETAS, WILLIE_NBARS):
        params = ChannelParams(eta, nbar)
        for _ in range(5):
            beta_sq = float(gen.random())
            r_max = math.sqrt(beta_sq * (1.0 - beta_sq))
            radius = float(gen.random()) * r_max
            phase = 2.0 * math.pi * float(gen.random())
            gamma = radius * complex(math.cos(phase), math.sin(phase))
            reports.append(verify_willie_state(beta_sq, gamma, params))
    return reports


def suite_twirl(seed: int) -> list[OracleReport]:
    return [verify_twirl(ChannelParams(e, nb)) for e, nb in TWIRL_POINTS]


def suite_combined(seed: int) -> list[OracleReport]:
    gen = _gen(seed, 5)
    reports = [verify_combined_channel(ChannelParams(e, nb)) for e, nb in COMBINED_POINTS]
    for _ in range(10):
        eta = 0.05 + 0.9 * float(gen.random())
        nbar = 10.0 ** float(gen.uniform(-3, 0.3))
        reports.append(verify_projection_success(ChannelParams(eta, nbar)))
    reports.append(verify_projection_success(ChannelParams(1.0, 0.4)))
    reports.append(verify_projection_success(ChannelParams(0.7, 0.0)))
    return reports


def suite_sparse(seed: int) -> list[OracleReport]:
    params = ChannelParams(0.6, 0.2)
    reports = [
        verify_sparse_qre(n, q=0.5, vartheta=0.25, params=params, dim_per_mode=4)
        for n in SPARSE_BLOCKLENGTHS
    ]
    reports.append(verify_chernoff(SparseConfig(10_000, 0.01, 0.5), trials=100_000, seed=seed))
    reports.append(verify_chernoff(SparseConfig(2_000, 0.25, 0.1), trials=100_000, seed=seed + 1))
    return reports


SUITES = {
    "fock": suite_fock,
    "chi2": suite_chi2,
    "willie": suite_willie,
    "twirl": suite_twirl,
    "combined": suite_combined,
    "sparse": suite_sparse,
}


def run_suite(name: str, seed: int) -> list[OracleReport]:
    """Run one named suite, or all of them in a fixed order."""
    if name == "all":
        reports = []
        for key in ("fock", "chi2", "willie", "twirl", "combined", "sparse"):
            reports.extend(SUITES[key](seed))
        return reports
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from all, {', '.join(SUITES)}")
    return SUITES[name](seed)
