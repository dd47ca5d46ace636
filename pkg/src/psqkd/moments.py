"""Closed-form statistics of the k-photon-subtracted squeezed coherent state.

Everything here follows from the state's moment generating function: the
subtraction probability, the two nonzero quadrature means, and the six
covariance entries. The formulas involve ratios of generalized Laguerre
polynomials at the non-positive argument

    w = -y,   y = d^2 (mu+nu)^2 / (4 nu^2 D),   D = mu^2 - tau nu^2,

where every polynomial is an all-positive sum, so the evaluations below are
cancellation-free. Stable algebraic rewrites used throughout:

    D = 1 + (1-tau) nu^2            E = mu^2 + tau nu^2 = cosh 2r - (1-tau) nu^2
    mu + nu = e^r                   A = nu^2 (1-tau) / D
    A*y = (1-tau) d^2 (mu+nu)^2 / (4 D^2)   (finite as nu -> 0)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ZeroProbabilityError
from .phase_space import SqueezedSourceParams, scaled_laguerre

__all__ = [
    "DEFAULT_SUBTRACTION_CAP",
    "TwoModeCM",
    "subtraction_probability",
    "pstmsc_covariance",
    "low_order_moment",
]

# subtraction orders above this are rejected unless the caller raises the cap;
# probabilities beyond it are negligible for the parameter ranges of interest
DEFAULT_SUBTRACTION_CAP = 16

# beyond this Laguerre argument the first-order asymptotic ratios are already
# accurate to ~1e-24 relative, and term sums would need extended range
_ASYMPTOTIC_Y = 1e16

# above this argument (or degree) the positive term sums are evaluated in log
# space to dodge float overflow; below it plain sums are exact enough
_LOG_DOMAIN_Y = 1e8
_LOG_DOMAIN_K = 24


@dataclass(frozen=True)
class TwoModeCM:
    """Two-mode covariance data: diagonal-block variances plus x means.

    The 4x4 matrix over (x1, p1, x2, p2) has zeros on every x-p cross term:

        [[vax, 0,   vcx, 0  ],
         [0,   vap, 0,   vcp],
         [vcx, 0,   vbx, 0  ],
         [0,   vcp, 0,   vbp]]

    Means along p vanish identically; the x means are carried separately
    because the security analysis consumes centered moments only.
    """

    vax: float
    vap: float
    vbx: float
    vbp: float
    vcx: float
    vcp: float
    mean_x1: float = 0.0
    mean_x2: float = 0.0

    def as_matrix(self) -> np.ndarray:
        """The full 4x4 covariance matrix over (x1, p1, x2, p2)."""
        return np.array(
            [
                [self.vax, 0.0, self.vcx, 0.0],
                [0.0, self.vap, 0.0, self.vcp],
                [self.vcx, 0.0, self.vbx, 0.0],
                [0.0, self.vcp, 0.0, self.vbp],
            ]
        )

    def mean_vector(self) -> np.ndarray:
        return np.array([self.mean_x1, 0.0, self.mean_x2, 0.0])


def _check_cap(k: int, max_k: int) -> None:
    if k > max_k:
        raise ValueError(
            f"subtraction order k={k} exceeds the stability cap {max_k}; "
            "raise max_k explicitly if you really need it"
        )


def _log_laguerre_neg(n: int, alpha: int, y: float) -> float:
    """log of L_n^alpha(-y) for y > 0 (all terms positive)."""
    logs = [
        math.log(math.comb(n + alpha, n - j)) + j * math.log(y) - math.lgamma(j + 1)
        for j in range(n + 1)
    ]
    top = max(logs)
    return top + math.log(sum(math.exp(lg - top) for lg in logs))


def _laguerre_neg(n: int, alpha: int, y: float) -> float:
    """L_n^alpha(-y) for y >= 0 by its positive term sum."""
    if n < 0:
        return 0.0
    total = 0.0
    for j in range(n + 1):
        total += math.comb(n + alpha, n - j) * y**j / math.factorial(j)
    return total


def _laguerre_ratios(k: int, y: float) -> tuple[float, float]:
    """(R1, R2) = (L^1_{k-1} / L_k, L^2_{k-2} / L_k), all at argument -y.

    R1 drives the first-derivative terms of the moment formulas and R2 the
    second-derivative ones; R2 - R1^2 <= 0 always.
    """
    if k == 0:
        return 0.0, 0.0
    if y == 0.0:
        # L_n^alpha(0) = C(n+alpha, n)
        return float(k), k * (k - 1) / 2.0
    if y > _ASYMPTOTIC_Y:
        r1 = (k / y) * (1.0 - k / y)
        r2 = (k * (k - 1) / (y * y)) * (1.0 - 2.0 * k / y)
        return r1, r2
    if y > _LOG_DOMAIN_Y or k > _LOG_DOMAIN_K:
        l0 = _log_laguerre_neg(k, 0, y)
        r1 = math.exp(_log_laguerre_neg(k - 1, 1, y) - l0)
        r2 = math.exp(_log_laguerre_neg(k - 2, 2, y) - l0) if k >= 2 else 0.0
        return r1, r2
    l0 = _laguerre_neg(k, 0, y)
    return _laguerre_neg(k - 1, 1, y) / l0, _laguerre_neg(k - 2, 2, y) / l0


def subtraction_probability(
    params: SqueezedSourceParams, max_k: int = DEFAULT_SUBTRACTION_CAP
) -> float:
    """Probability of detecting exactly k photons on the subtraction tap.

    Evaluates A^k L_k(-y) as a joint positive sum in A and A*y so the
    r -> 0 limits come out exactly: a coherent-only source gives Poisson
    weights with mean (1-tau) d^2 / 4, and the empty source gives 1 for
    k = 0 and 0 otherwise.
    """
    _check_cap(params.k, max_k)
    nu = params.nu
    tau, d, k = params.tau, params.d, params.k
    big_d = 1.0 + (1.0 - tau) * nu * nu
    a_coef = nu * nu * (1.0 - tau) / big_d
    er2 = math.exp(2.0 * params.r)  # (mu + nu)^2
    ay = (1.0 - tau) * d * d * er2 / (4.0 * big_d * big_d)
    expo = -d * d * (1.0 - tau) * er2 / (4.0 * big_d)
    p = math.exp(expo) / big_d * scaled_laguerre(k, a_coef, -ay)
    return min(max(p, 0.0), 1.0)


def pstmsc_covariance(
    params: SqueezedSourceParams, max_k: int = DEFAULT_SUBTRACTION_CAP
) -> TwoModeCM:
    """Means and covariance matrix of the k-photon-subtracted state.

    Raises ZeroProbabilityError when the conditioning event has probability
    zero (tau = 1 with k >= 1, or r = 0 and d = 0 with k >= 1).
    """
    _check_cap(params.k, max_k)
    if subtraction_probability(params, max_k) <= 0.0:
        raise ZeroProbabilityError(
            f"{params.k}-photon subtraction has probability 0 at "
            f"r={params.r}, d={params.d}, tau={params.tau}"
        )
    tau, d, k = params.tau, params.d, params.k
    st = math.sqrt(tau)
    if params.r == 0.0:
        # coherent product state: the tap sees a coherent beam, of which
        # photon subtraction is an eigen-operation, so the state is unchanged
        return TwoModeCM(1.0, 1.0, 1.0, 1.0, 0.0, 0.0, d, st * d)

    mu, nu = params.mu, params.nu
    big_d = 1.0 + (1.0 - tau) * nu * nu
    big_e = math.cosh(2.0 * params.r) - (1.0 - tau) * nu * nu
    er = math.exp(params.r)  # mu + nu
    y = d * d * er * er / (4.0 * nu * nu * big_d)
    r1, r2 = _laguerre_ratios(k, y)
    cur = r2 - r1 * r1

    vap = (big_e + 2.0 * mu * mu * r1) / big_d
    vax = vap + d * d * mu * mu * er * er / (nu * nu * big_d * big_d) * cur
    vbp = (big_e + 2.0 * tau * nu * nu * r1) / big_d
    vbx = vbp + d * d * tau * er * er / (big_d * big_d) * cur
    vcp = -2.0 * mu * nu * st * (1.0 + r1) / big_d
    vcx = -vcp + d * d * mu * er * er * st / (nu * big_d * big_d) * cur
    mean_x1 = d * (mu + tau * nu) / big_d + d * mu * er / (nu * big_d) * r1
    mean_x2 = d * st * er * (1.0 + r1) / big_d
    return TwoModeCM(vax, vap, vbx, vbp, vcx, vcp, mean_x1, mean_x2)


def low_order_moment(
    params: SqueezedSourceParams, i: int, j: int, m: int, n: int
) -> float:
    """Raw moment <x1^i p1^j x2^m p2^n> for total order i+j+m+n <= 2.

    Higher orders are not expressible through the covariance data; they are
    available only via the Fock-space oracle.
    """
    orders = (i, j, m, n)
    if any(o < 0 for o in orders):
        raise ValueError("moment orders must be non-negative")
    total = sum(orders)
    if total > 2:
        raise ValueError(f"unsupported order {orders}: total must be <= 2")
    if total == 0:
        return 1.0
    cm = pstmsc_covariance(params)
    mean = cm.mean_vector()
    active = [axis for axis, o in enumerate(orders) for _ in range(o)]
    if total == 1:
        return float(mean[active[0]])
    a, b = active
    return float(cm.as_matrix()[a, b] + mean[a] * mean[b])
