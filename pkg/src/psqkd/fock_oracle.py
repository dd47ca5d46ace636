"""Truncated Fock-space brute force for the subtraction pipeline.

Everything in this module recomputes the closed forms of `moments` from
first principles: prepare the displaced two-mode squeezed state as an
amplitude tensor, mix one mode with a vacuum ancilla on a beam splitter,
project the ancilla on a photon-number outcome, and read moments off the
surviving amplitudes with quadrature operators x = a + a', p = i(a' - a).

Test-time only; the production key-rate path never calls into here.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
from scipy.sparse.linalg import expm_multiply

from .errors import TruncationError, ZeroProbabilityError
from .moments import TwoModeCM

__all__ = [
    "FockTwoModeState",
    "build_tmsc_fock",
    "apply_bs_and_project",
    "bs_pair_unitary",
    "fock_moment",
    "oracle_covariance",
    "suggested_truncation",
    "OracleComparison",
    "compare_random_grid",
]

_PAD = 10  # extra levels carried through the squeeze exponential, then cropped
_LEAK_LEVELS = 5
_LEAK_TOL = 1e-8


@dataclass
class FockTwoModeState:
    """Normalized two-mode state as an (N+1) x (N+1) complex amplitude tensor."""

    amps: np.ndarray

    @property
    def n_max(self) -> int:
        return self.amps.shape[0] - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def leakage(self, levels: int = _LEAK_LEVELS) -> float:
        """Probability mass at Fock levels above n_max - levels in either mode."""
        probs = np.abs(self.amps) ** 2
        cut = self.n_max - levels
        return float(probs[cut + 1 :, :].sum() + probs[:, cut + 1 :].sum())


def _destroy(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1.0, dim)), 1)


def _coherent(alpha: float, dim: int) -> np.ndarray:
    """Fock amplitudes of |alpha> for real alpha."""
    c = np.empty(dim)
    c[0] = 1.0
    for n in range(1, dim):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    return c * math.exp(-0.5 * alpha * alpha)


def build_tmsc_fock(r: float, d: float, n_max: int) -> FockTwoModeState:
    """Displaced two-mode squeezed state, truncated at n_max per mode.

    The displacement d is the x-quadrature mean of each mode before
    squeezing, i.e. coherent amplitude d/2 in x = a + a' units. Squeezing is
    the numerically exponentiated truncated generator r (a1' a2' - a1 a2),
    computed with 10 extra levels of headroom and cropped back.

    Raises TruncationError when more than 1e-8 of probability sits in the
    top 5 retained levels (or was lost to the crop).
    """
    if n_max < _LEAK_LEVELS:
        raise ValueError(f"n_max={n_max} is too small to be meaningful")
    dim = n_max + 1 + _PAD
    vec = np.kron(_coherent(d / 2.0, dim), _coherent(d / 2.0, dim)).astype(complex)
    if r != 0.0:
        a = scipy.sparse.csc_matrix(_destroy(dim))
        adag = a.conj().T
        gen = r * (scipy.sparse.kron(adag, adag) - scipy.sparse.kron(a, a)).tocsc()
        vec = expm_multiply(gen, vec)
    amps = vec.reshape(dim, dim)[: n_max + 1, : n_max + 1].copy()
    kept = float(np.linalg.norm(amps))
    cropped = abs(1.0 - kept * kept)
    state = FockTwoModeState(amps / kept)
    if cropped + state.leakage() > _LEAK_TOL:
        raise TruncationError(
            f"truncation insufficient at n_max={n_max} for r={r}, d={d}: "
            f"cropped mass {cropped:.3e}, top-level mass {state.leakage():.3e}"
        )
    return state


def _bs_block(total_n: int, tau: float, lo: int, hi: int) -> np.ndarray:
    """Beam-splitter unitary restricted to total photon number total_n.

    Basis is |j photons kept, total_n - j tapped> for j in [lo, hi]. The
    generator theta (b' c - c' b) with cos(theta) = sqrt(tau) is exponentiated
    directly; the result is real orthogonal with the minus sign on the
    reflected port.
    """
    theta = math.acos(math.sqrt(tau))
    size = hi - lo + 1
    gen = np.zeros((size, size))
    for idx, j in enumerate(range(lo, hi)):
        step = theta * math.sqrt((j + 1) * (total_n - j))
        gen[idx + 1, idx] = step
        gen[idx, idx + 1] = -step
    return scipy.linalg.expm(gen)


def bs_pair_unitary(tau: float, n_max: int) -> np.ndarray:
    """Full beam-splitter unitary on a truncated two-mode space.

    Returns the (n_max+1)^2 square matrix over basis |n2, n3>, exactly
    orthogonal by construction (block exponentials of antisymmetric
    generators); physically exact for total photon number <= n_max.
    """
    dim = n_max + 1
    u = np.zeros((dim * dim, dim * dim))
    for total_n in range(2 * n_max + 1):
        lo, hi = max(0, total_n - n_max), min(total_n, n_max)
        block = _bs_block(total_n, tau, lo, hi)
        idx = [j * dim + (total_n - j) for j in range(lo, hi + 1)]
        u[np.ix_(idx, idx)] = block
    return u


def apply_bs_and_project(
    state: FockTwoModeState, tau: float, k: int, n_max: int | None = None
) -> tuple[FockTwoModeState, float]:
    """Tap mode 2 with a vacuum ancilla and detect exactly k tap photons.

    Returns the normalized post-detection two-mode state and the detection
    probability. Because the ancilla starts in vacuum, only the |n, 0>
    input column of each fixed-photon-number beam-splitter block is needed.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    if k < 0:
        raise ValueError("k must be >= 0")
    n_in = state.n_max
    n_out = n_in if n_max is None else min(n_max, n_in)
    out = np.zeros((n_out + 1, n_out + 1), dtype=complex)
    for n2 in range(k, n_in + 1):
        j = n2 - k
        if j > n_out:
            continue
        column = _bs_block(n2, tau, 0, n2)[:, n2]
        out[:, j] += state.amps[: n_out + 1, n2] * column[j]
    prob = float(np.linalg.norm(out) ** 2)
    if prob < 1e-300:
        raise ZeroProbabilityError(
            f"{k}-photon detection has probability {prob:.1e} (treated as zero)"
        )
    return FockTwoModeState(out / math.sqrt(prob)), prob


def _weyl_product(ops: list[np.ndarray]) -> np.ndarray:
    """Symmetric (Weyl) ordering: average the product over all orderings."""
    if not ops:
        return np.eye(1)
    dim = ops[0].shape[0]
    orderings = set(itertools.permutations(range(len(ops))))
    acc = np.zeros((dim, dim), dtype=complex)
    for order in orderings:
        prod = np.eye(dim, dtype=complex)
        for pos in order:
            prod = prod @ ops[pos]
        acc += prod
    return acc / len(orderings)


def fock_moment(state: FockTwoModeState, i: int, j: int, m: int, n: int) -> float:
    """Phase-space moment <x1^i p1^j x2^m p2^n> of a two-mode Fock state.

    Uses symmetric operator ordering, which is what moments of a Wigner
    density mean. Total order is capped at 4 so matrix powers stay inside
    the truncation margin.
    """
    orders = (i, j, m, n)
    if any(o < 0 for o in orders):
        raise ValueError("moment orders must be non-negative")
    if sum(orders) > 4:
        raise ValueError(f"order {orders} too high for the truncation margin")
    dim = state.n_max + 1
    a = _destroy(dim)
    x = a + a.conj().T
    p = 1j * (a.conj().T - a)
    w1 = _weyl_product([x] * i + [p] * j)
    w2 = _weyl_product([x] * m + [p] * n)
    if w1.shape[0] == 1:
        w1 = np.eye(dim, dtype=complex)
    if w2.shape[0] == 1:
        w2 = np.eye(dim, dtype=complex)
    val = np.vdot(state.amps, w1 @ state.amps @ w2.T)
    assert abs(val.imag) < 1e-10, f"non-real moment {val}"
    return float(val.real)


def oracle_covariance(r: float, d: float, tau: float, k: int, n_max: int) -> TwoModeCM:
    """Means and covariance of the k-subtracted state, straight from Fock space."""
    state, _ = apply_bs_and_project(build_tmsc_fock(r, d, n_max), tau, k)
    m_x1 = fock_moment(state, 1, 0, 0, 0)
    m_p1 = fock_moment(state, 0, 1, 0, 0)
    m_x2 = fock_moment(state, 0, 0, 1, 0)
    m_p2 = fock_moment(state, 0, 0, 0, 1)
    return TwoModeCM(
        vax=fock_moment(state, 2, 0, 0, 0) - m_x1**2,
        vap=fock_moment(state, 0, 2, 0, 0) - m_p1**2,
        vbx=fock_moment(state, 0, 0, 2, 0) - m_x2**2,
        vbp=fock_moment(state, 0, 0, 0, 2) - m_p2**2,
        vcx=fock_moment(state, 1, 0, 1, 0) - m_x1 * m_x2,
        vcp=fock_moment(state, 0, 1, 0, 1) - m_p1 * m_p2,
        mean_x1=m_x1,
        mean_x2=m_x2,
    )


def suggested_truncation(r: float, d: float) -> int:
    """Photon-number cutoff that keeps state leakage under the check limit.

    Linear in r + d with a flat safety offset, calibrated so the leakage
    guard in build_tmsc_fock stays silent over r <= 1, d <= 2; capped to
    keep the dense beam-splitter blocks affordable.
    """
    return min(96, 20 + math.ceil(24.0 * (r + d)))


@dataclass(frozen=True)
class OracleComparison:
    """Worst relative deviations of the closed forms from the Fock oracle."""

    points: int
    seed: int
    rel_tol: float
    max_dev_probability: float
    max_dev_covariance: float
    max_dev_means: float
    worst_params: tuple[float, float, float, int]

    @property
    def passed(self) -> bool:
        return (
            max(
                self.max_dev_probability,
                self.max_dev_covariance,
                self.max_dev_means,
            )
            <= self.rel_tol
        )


def _rel_dev(closed: float, oracle: float) -> float:
    # unit floor: CM entries are O(1) or larger, so this stays a relative
    # measure except for exact zeros (d=0 means), where it avoids 0/0
    return abs(closed - oracle) / max(abs(oracle), 1.0)


def compare_random_grid(
    points: int = 50, seed: int = 20240817, rel_tol: float = 1e-5
) -> OracleComparison:
    """Closed-form probability, covariance and means vs the Fock oracle.

    Draws (r, d, tau, k) uniformly from r in [0.05, 1], d in [0, 2],
    tau in [0.3, 0.95], k in {0, 1, 2} and compares every entry the
    closed forms produce. Probabilities compare fully relatively; CM and
    means use a unit-floored denominator.
    """
    from .moments import pstmsc_covariance, subtraction_probability
    from .phase_space import SqueezedSourceParams

    rng = np.random.default_rng(seed)
    worst_p = worst_cm = worst_mean = 0.0
    worst_params = (0.0, 0.0, 0.0, 0)
    for _ in range(points):
        r = rng.uniform(0.05, 1.0)
        d = rng.uniform(0.0, 2.0)
        tau = rng.uniform(0.3, 0.95)
        k = int(rng.integers(0, 3))
        params = SqueezedSourceParams(r=r, d=d, tau=tau, k=k)
        n_max = suggested_truncation(r, d)

        state, prob = apply_bs_and_project(build_tmsc_fock(r, d, n_max), tau, k)
        closed_p = subtraction_probability(params)
        dev_p = abs(closed_p - prob) / abs(prob)

        oracle = oracle_covariance(r, d, tau, k, n_max)
        closed = pstmsc_covariance(params)
        dev_cm = max(
            _rel_dev(closed.vax, oracle.vax),
            _rel_dev(closed.vap, oracle.vap),
            _rel_dev(closed.vbx, oracle.vbx),
            _rel_dev(closed.vbp, oracle.vbp),
            _rel_dev(closed.vcx, oracle.vcx),
            _rel_dev(closed.vcp, oracle.vcp),
        )
        dev_mean = max(
            _rel_dev(closed.mean_x1, oracle.mean_x1),
            _rel_dev(closed.mean_x2, oracle.mean_x2),
        )
        if max(dev_p, dev_cm, dev_mean) > max(worst_p, worst_cm, worst_mean):
            worst_params = (r, d, tau, k)
        worst_p = max(worst_p, dev_p)
        worst_cm = max(worst_cm, dev_cm)
        worst_mean = max(worst_mean, dev_mean)
    return OracleComparison(
        points=points,
        seed=seed,
        rel_tol=rel_tol,
        max_dev_probability=worst_p,
        max_dev_covariance=worst_cm,
        max_dev_means=worst_mean,
        worst_params=worst_params,
    )
