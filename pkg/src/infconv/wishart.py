"""Monte Carlo checks of the Wishart limit against the dual-law predictions.

X = (1/N) G*G with complex Gaussian G of shape M x N, M = round(c N + c').
The limit law has all free cumulants equal to c with first infinitesimal
cumulant c'; sample means of normalized traces are compared to its moments,
and the 1/N corrections are extracted by Richardson extrapolation over the
matrix sizes.  Product runs draw two independent matrices per trial and
compare against the free multiplicative convolution of the limit law with
itself.

Sampling is organized in fixed lanes of trials; each lane owns an RNG stream
keyed by (seed, size, lane, run tag), so results are bit-identical for a
given seed regardless of how lanes would be scheduled.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .convolve import ProductKind, convolve_by_transform
from .cumulants import constant_cumulant_law
from .errors import ConfigError
from .laws import InfLaw

LANE_TRIALS = 250
MAX_K = 6
_SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class WishartConfig:
    c: float
    c_prime: float = 0.0
    N_list: tuple = (100, 200, 400)
    trials: int = 1000
    k_max: int = 4
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "N_list", tuple(int(n) for n in self.N_list))
        if not self.c > 0:
            raise ConfigError("c must be positive")
        if not self.N_list:
            raise ConfigError("N_list must be nonempty")
        if any(n < 1 for n in self.N_list):
            raise ConfigError("matrix sizes must be >= 1")
        if list(self.N_list) != sorted(set(self.N_list)):
            raise ConfigError("N_list must be strictly increasing")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not 1 <= self.k_max <= MAX_K:
            raise ConfigError(f"k_max must be in 1..{MAX_K}")
        if not 0 <= int(self.seed) < 2**63:
            raise ConfigError("seed must be a non-negative 64-bit integer")
        for n in self.N_list:
            if self.M(n) < 1:
                raise ConfigError(f"round(c*{n} + c') must be >= 1")

    def M(self, N: int) -> int:
        return int(round(self.c * N + self.c_prime))


@dataclass(frozen=True)
class McRow:
    N: int
    k: int
    mean: float
    stderr: float
    phi_pred: float
    phi_prime_est: float
    phi_prime_pred: float


@dataclass(frozen=True)
class McExtrapolation:
    k: int
    phi_est: float
    phi_stderr: float
    phi_prime_est: float
    phi_prime_stderr: float
    phi_pred: float
    phi_prime_pred: float


CSV_COLUMNS = ("N", "k", "mean", "stderr", "phi_pred", "phi_prime_est",
               "phi_prime_pred")


@dataclass(frozen=True)
class McEstimate:
    config: WishartConfig
    product: bool
    rows: tuple
    extrapolation: tuple

    def to_csv(self) -> str:
        lines = [",".join(CSV_COLUMNS)]
        for r in self.rows:
            lines.append(
                f"{r.N},{r.k},{r.mean:.12g},{r.stderr:.12g},{r.phi_pred:.12g},"
                f"{r.phi_prime_est:.12g},{r.phi_prime_pred:.12g}"
            )
        return "\n".join(lines) + "\n"

    def to_json_obj(self) -> dict:
        return {
            "config": {
                "c": self.config.c,
                "c_prime": self.config.c_prime,
                "N_list": list(self.config.N_list),
                "trials": self.config.trials,
                "k_max": self.config.k_max,
                "seed": self.config.seed,
                "product": self.product,
            },
            "rows": [
                {
                    "N": r.N,
                    "k": r.k,
                    "mean": r.mean,
                    "stderr": r.stderr,
                    "phi_pred": r.phi_pred,
                    "phi_prime_est": r.phi_prime_est,
                    "phi_prime_pred": r.phi_prime_pred,
                }
                for r in self.rows
            ],
            "extrapolation": [
                {
                    "k": e.k,
                    "phi_est": e.phi_est,
                    "phi_stderr": e.phi_stderr,
                    "phi_prime_est": e.phi_prime_est,
                    "phi_prime_stderr": e.phi_prime_stderr,
                    "phi_pred": e.phi_pred,
                    "phi_prime_pred": e.phi_prime_pred,
                }
                for e in self.extrapolation
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    def checks_pass(self, rel: float = 0.15, sigmas: float = 3.0) -> bool:
        """Extrapolated values against predictions.

        phi within `sigmas` stderr; phi' within max(sigmas stderr,
        rel * |prediction|).
        """
        for e in self.extrapolation:
            if abs(e.phi_est - e.phi_pred) > sigmas * e.phi_stderr:
                return False
            allow = max(sigmas * e.phi_prime_stderr, rel * abs(e.phi_prime_pred))
            if abs(e.phi_prime_est - e.phi_prime_pred) > allow:
                return False
        return True


def sample_wishart(M: int, N: int, rng: np.random.Generator) -> np.ndarray:
    """X = (1/N) G*G with i.i.d. entries (u+iv)/sqrt(2), so E|g|^2 = 1."""
    if M < 1 or N < 1:
        raise ConfigError("matrix dimensions must be >= 1")
    g = rng.standard_normal((M, N)) + 1j * rng.standard_normal((M, N))
    g *= _SQRT_HALF
    return (g.conj().T @ g) / N


def trace_powers(X: np.ndarray, k_max: int) -> list:
    """Normalized traces of X^1..X^k_max.

    tr(AB) = sum(A * B^T) elementwise, so only X^2 and X^3 are ever formed
    by matrix multiplication (k_max <= 6).
    """
    N = X.shape[0]
    out = [np.trace(X).real / N]
    if k_max >= 2:
        out.append(np.sum(X * X.T).real / N)
    if k_max >= 3:
        X2 = X @ X
        out.append(np.sum(X2 * X.T).real / N)
    if k_max >= 4:
        out.append(np.sum(X2 * X2.T).real / N)
    if k_max >= 5:
        X3 = X2 @ X
        out.append(np.sum(X3 * X2.T).real / N)
    if k_max >= 6:
        out.append(np.sum(X3 * X3.T).real / N)
    return out[:k_max]


def _product_trace_powers(X1: np.ndarray, X2: np.ndarray, k_max: int) -> list:
    N = X1.shape[0]
    out = [np.sum(X1 * X2.T).real / N]
    if k_max >= 2:
        P = X1 @ X2
        out.append(np.sum(P * P.T).real / N)
    if k_max >= 3:
        P2 = P @ P
        out.append(np.sum(P2 * P.T).real / N)
    if k_max >= 4:
        out.append(np.sum(P2 * P2.T).real / N)
    if k_max >= 5:
        P3 = P2 @ P
        out.append(np.sum(P3 * P2.T).real / N)
    if k_max >= 6:
        out.append(np.sum(P3 * P3.T).real / N)
    return out[:k_max]


def _lane_sizes(trials: int) -> list:
    full, rest = divmod(trials, LANE_TRIALS)
    return [LANE_TRIALS] * full + ([rest] if rest else [])


def _accumulate(cfg: WishartConfig, N: int, tag: int, product: bool):
    """Per-size sums and sums of squares of the k trace observables."""
    k_max = cfg.k_max
    M = cfg.M(N)
    s1 = np.zeros(k_max)
    s2 = np.zeros(k_max)
    for lane, lane_n in enumerate(_lane_sizes(cfg.trials)):
        rng = np.random.default_rng(
            np.random.SeedSequence([int(cfg.seed), int(N), lane, tag])
        )
        for _ in range(lane_n):
            if product:
                x1 = sample_wishart(M, N, rng)
                x2 = sample_wishart(M, N, rng)
                vals = _product_trace_powers(x1, x2, k_max)
            else:
                vals = trace_powers(sample_wishart(M, N, rng), k_max)
            v = np.asarray(vals)
            s1 += v
            s2 += v * v
    return s1, s2


def _limit_predictions(cfg: WishartConfig, product: bool) -> InfLaw:
    K = max(cfg.k_max, 2)
    limit = constant_cumulant_law(cfg.c, cfg.c_prime, K=K)
    if product:
        return convolve_by_transform(ProductKind.FREE, limit, limit, K=K)
    return limit


def _lagrange_at_zero(us: Iterable[float]) -> list:
    us = list(us)
    ws = []
    for i, ui in enumerate(us):
        w = 1.0
        for j, uj in enumerate(us):
            if j != i:
                w *= uj / (uj - ui)
        ws.append(w)
    return ws


def _extrapolate(cfg: WishartConfig, rows: list, pred: InfLaw) -> list:
    by_k: dict[int, list] = {}
    for r in rows:
        by_k.setdefault(r.k, []).append(r)
    out = []
    for k in sorted(by_k):
        rs = sorted(by_k[k], key=lambda r: r.N)
        # phi: polynomial-in-1/N intercept over the (up to three) largest sizes
        tail = rs[-3:] if len(rs) >= 3 else rs[-2:]
        ws = _lagrange_at_zero([1.0 / r.N for r in tail])
        phi_est = sum(w * r.mean for w, r in zip(ws, tail))
        phi_var = sum((w * r.stderr) ** 2 for w, r in zip(ws, tail))
        # phi': two-point form on the two largest sizes cancels the 1/N^2 term
        r1, r2 = rs[-2], rs[-1]
        n1, n2 = float(r1.N), float(r2.N)
        d1 = r1.mean - r1.phi_pred
        d2 = r2.mean - r2.phi_pred
        pp_est = (n2 * n2 * d2 - n1 * n1 * d1) / (n2 - n1)
        pp_var = (
            (n2 * n2 * r2.stderr) ** 2 + (n1 * n1 * r1.stderr) ** 2
        ) / (n2 - n1) ** 2
        out.append(
            McExtrapolation(
                k,
                float(phi_est),
                math.sqrt(phi_var),
                float(pp_est),
                math.sqrt(pp_var),
                r1.phi_pred,
                r1.phi_prime_pred,
            )
        )
    return out


def _run(cfg: WishartConfig, product: bool, tag: int) -> McEstimate:
    if len(cfg.N_list) < 2:
        raise ConfigError("extrapolation needs at least two matrix sizes")
    pred = _limit_predictions(cfg, product)
    rows = []
    n_tr = cfg.trials
    for N in cfg.N_list:
        s1, s2 = _accumulate(cfg, N, tag, product)
        for k in range(1, cfg.k_max + 1):
            mean = s1[k - 1] / n_tr
            if n_tr > 1:
                var = max(s2[k - 1] - n_tr * mean * mean, 0.0) / (n_tr - 1)
                stderr = math.sqrt(var / n_tr)
            else:
                stderr = 0.0
            phi = pred.m[k - 1].real
            phip = pred.m_prime[k - 1].real
            rows.append(
                McRow(N, k, float(mean), float(stderr), phi,
                      float(N * (mean - phi)), phip)
            )
    ext = _extrapolate(cfg, rows, pred)
    return McEstimate(cfg, product, tuple(rows), tuple(ext))


def estimate_moments(cfg: WishartConfig) -> McEstimate:
    """Single-matrix run: tr(X^k) means vs the limit law and its 1/N slope."""
    return _run(cfg, product=False, tag=0)


def product_experiment(cfg: WishartConfig) -> McEstimate:
    """Two independent matrices per trial; tr((X1 X2)^k) vs the free product."""
    return _run(cfg, product=True, tag=1)
