"""Free cumulants, infinitesimal cumulants, and t-coefficients.

Moment/cumulant conversion runs over dual scalars, so the eps component
implements the infinitesimal (primed) recursion automatically.  The literal
partition sums (one-primed-block cumulant recursion, linked-partition
t-sums, product rule for t) are separate code paths and serve as
cross-checks in the test suite.

t-coefficients: phi(a_1..a_n) = sum over non-crossing linked partitions of
t_pi, where t_pi multiplies t_{|V|-1}(subword of V) over blocks V and one
t_0(a_k) for every element k that is minimal in no block.  For a single
variable the data is the vector t_0..t_{K-1}; its generating function is
the T-transform: T(z) = sum t_n z^n.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Callable, Sequence

import numpy as np

from .dual import DualScalar
from .errors import InvalidInputError, MathDomainError, SizeLimitError
from .laws import InfLaw
from .partitions import (
    LinkedPartition,
    SetPartition,
    connected_classes,
    enumerate_nc,
    enumerate_ncl,
    non_minimal_elements,
)

Word = tuple
MomentFn = Callable[[Word], DualScalar]
TFn = Callable[[Word], DualScalar]


@lru_cache(maxsize=32)
def _nc(n: int) -> tuple[SetPartition, ...]:
    return tuple(enumerate_nc(n))


@lru_cache(maxsize=16)
def _ncl(n: int) -> tuple[LinkedPartition, ...]:
    return tuple(enumerate_ncl(n))


@dataclass(frozen=True)
class CumulantVector:
    """Dual free cumulants kappa~_1..kappa~_K."""

    K: int
    kappa: np.ndarray
    kappa_prime: np.ndarray

    def __post_init__(self) -> None:
        k = np.asarray(self.kappa, dtype=complex)
        kp = np.asarray(self.kappa_prime, dtype=complex)
        if k.shape != (self.K,) or kp.shape != (self.K,):
            raise InvalidInputError("cumulant arrays must have length K")
        object.__setattr__(self, "kappa", k)
        object.__setattr__(self, "kappa_prime", kp)

    def dual(self, n: int) -> DualScalar:
        return DualScalar(self.kappa[n - 1], self.kappa_prime[n - 1])

    def to_json_obj(self) -> dict:
        def enc(x: complex):
            return x.real if x.imag == 0 else [x.real, x.imag]

        return {
            "K": self.K,
            "kappa": [enc(x) for x in self.kappa],
            "kappa_prime": [enc(x) for x in self.kappa_prime],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())


@dataclass(frozen=True)
class TCoeffVector:
    """Dual t-coefficients t~_0..t~_{K-1} of a single variable."""

    K: int
    t: np.ndarray
    t_prime: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.t, dtype=complex)
        tp = np.asarray(self.t_prime, dtype=complex)
        if t.shape != (self.K,) or tp.shape != (self.K,):
            raise InvalidInputError("t arrays must have length K")
        if t[0] == 0:
            raise MathDomainError("t_0 (the mean) must have invertible body")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "t_prime", tp)

    def dual(self, n: int) -> DualScalar:
        """t~_n for n = 0..K-1."""
        return DualScalar(self.t[n], self.t_prime[n])

    def to_json_obj(self) -> dict:
        def enc(x: complex):
            return x.real if x.imag == 0 else [x.real, x.imag]

        return {
            "K": self.K,
            "t": [enc(x) for x in self.t],
            "t_prime": [enc(x) for x in self.t_prime],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())


# -- moments <-> free cumulants ---------------------------------------------


def cumulants_from_moments(law: InfLaw) -> CumulantVector:
    """Dual free cumulants via the first-block interval recursion."""
    K = law.K
    m = [DualScalar(1.0)] + [law.dual_moment(n) for n in range(1, K + 1)]
    kap: list[DualScalar] = []
    for n in range(1, K + 1):
        # C[s][r]: sum over s gaps with total size r of products of moments
        acc = m[n]
        for s in range(1, n):
            acc = acc - kap[s - 1] * _gap_sum(m, s, n - s)
        kap.append(acc)
    return CumulantVector(K, [k.body for k in kap], [k.eps for k in kap])


def _gap_sum(m: Sequence[DualScalar], s: int, r: int) -> DualScalar:
    """Sum over s-tuples of gaps (g_1..g_s >= 0, sum r) of prod m_{g_j}."""
    row = [DualScalar(1.0 if r_ == 0 else 0.0) for r_ in range(r + 1)]
    for _ in range(s):
        new = []
        for rr in range(r + 1):
            acc = DualScalar(0.0)
            for g in range(rr + 1):
                acc = acc + m[g] * row[rr - g]
            new.append(acc)
        row = new
    return row[r]


def moments_from_cumulants(cum: CumulantVector) -> InfLaw:
    """Invert the interval recursion; exact inverse of cumulants_from_moments."""
    K = cum.K
    m: list[DualScalar] = [DualScalar(1.0)]
    for n in range(1, K + 1):
        acc = DualScalar(0.0)
        for s in range(1, n + 1):
            acc = acc + cum.dual(s) * _gap_sum(m, s, n - s)
        m.append(acc)
    return InfLaw.from_moments(m[1:])


def constant_cumulant_law(c, c_prime=0.0, K: int = 8) -> InfLaw:
    """Law with kappa~_n = c + eps c' for every n (free-Poisson type)."""
    cv = DualScalar.of(c) + DualScalar(0.0, 1.0) * DualScalar.of(c_prime)
    cum = CumulantVector(K, [cv.body] * K, [cv.eps] * K)
    return moments_from_cumulants(cum)


def inf_cumulants_direct(law: InfLaw) -> np.ndarray:
    """Literal one-primed-block recursion for the infinitesimal cumulants.

    Solves m'_n = sum over pi in NC(n) of sum over blocks V of
    kappa'_{|V|} prod_{W != V} kappa_{|W|}, using body cumulants from the
    dual recursion.  Independent of the eps bookkeeping; must agree with
    cumulants_from_moments(law).kappa_prime.
    """
    K = law.K
    if K > 12:
        raise SizeLimitError("literal route enumerates NC(n); K <= 12")
    kb = cumulants_from_moments(law).kappa
    kp = np.zeros(K, dtype=complex)
    for n in range(1, K + 1):
        total = 0.0 + 0.0j
        for pi in _nc(n):
            if pi.num_blocks == 1:
                continue
            sizes = [len(b) for b in pi.blocks]
            vals = [kb[s - 1] for s in sizes]
            # prefix/suffix products give every leave-one-out product safely
            nblk = len(vals)
            pre = [1.0 + 0.0j] * (nblk + 1)
            suf = [1.0 + 0.0j] * (nblk + 1)
            for i in range(nblk):
                pre[i + 1] = pre[i] * vals[i]
                suf[nblk - 1 - i] = suf[nblk - i] * vals[nblk - 1 - i]
            for v, sv in enumerate(sizes):
                total += kp[sv - 1] * pre[v] * suf[v + 1]
        kp[n - 1] = law.m_prime[n - 1] - total
    return kp


# -- t-coefficients ----------------------------------------------------------


def _t_pi_single(pi: LinkedPartition, tvals: Sequence[DualScalar]) -> DualScalar:
    acc = DualScalar(1.0)
    for block in pi.blocks:
        acc = acc * tvals[len(block) - 1]
    for _ in non_minimal_elements(pi):
        acc = acc * tvals[0]
    return acc


def t_coeffs_from_moments(law: InfLaw) -> TCoeffVector:
    """Solve the linked-partition moment expansion for t~_0..t~_{K-1}."""
    K = law.K
    if K > 10:
        raise SizeLimitError("t-coefficient extraction enumerates NCL(n); K <= 10")
    if law.m[0] == 0:
        raise MathDomainError("t-coefficients need an invertible first moment")
    tvals: list[DualScalar] = [law.dual_moment(1)]
    for n in range(2, K + 1):
        rest = DualScalar(0.0)
        for pi in _ncl(n):
            if pi.num_blocks == 1:
                continue  # the full block carries the unknown t_{n-1}
            rest = rest + _t_pi_single(pi, tvals + [DualScalar(0.0)])
        lead = tvals[0] ** (n - 1)
        tvals.append((law.dual_moment(n) - rest) / lead)
    return TCoeffVector(K, [t.body for t in tvals], [t.eps for t in tvals])


def moments_from_t(tvec: TCoeffVector) -> InfLaw:
    """Forward linked-partition sum; inverse of t_coeffs_from_moments."""
    K = tvec.K
    if K > 10:
        raise SizeLimitError("NCL enumeration supports n <= 10")
    tvals = [tvec.dual(n) for n in range(K)]
    out = []
    for n in range(1, K + 1):
        acc = DualScalar(0.0)
        for pi in _ncl(n):
            acc = acc + _t_pi_single(pi, tvals)
        out.append(acc)
    return InfLaw.from_moments(out)


def t_pi_value(pi: LinkedPartition, word: Word, t_fn: TFn) -> DualScalar:
    """Evaluate one linked-partition summand for a word of letters.

    t_fn maps a subword tuple to the dual coefficient t_{len-1}(subword);
    single letters give t_0.
    """
    if len(word) != pi.n:
        raise InvalidInputError("word length must match the partition size")
    acc = DualScalar(1.0)
    for block in pi.blocks:
        acc = acc * t_fn(tuple(word[i - 1] for i in block))
    for k in non_minimal_elements(pi):
        acc = acc * t_fn((word[k - 1],))
    return acc


def d_t_pi_value(pi: LinkedPartition, word: Word, t_fn: TFn) -> complex:
    """Literal product-rule value for the infinitesimal t_pi.

    Two groups of summands: prime one block coefficient, or prime one of the
    t_0 factors attached to non-minimal elements.  When s(pi) is empty the
    second group is an empty sum.  Must equal the eps part of t_pi_value.
    """
    if len(word) != pi.n:
        raise InvalidInputError("word length must match the partition size")
    blocks = [tuple(word[i - 1] for i in b) for b in pi.blocks]
    extras = [(word[k - 1],) for k in non_minimal_elements(pi)]
    bvals = [t_fn(w).body for w in blocks]
    evals = [t_fn(w).body for w in extras]
    total = 0.0 + 0.0j
    for i, w in enumerate(blocks):
        term = t_fn(w).eps
        for j, bv in enumerate(bvals):
            if j != i:
                term *= bv
        for ev in evals:
            term *= ev
        total += term
    for i, w in enumerate(extras):
        term = t_fn(w).eps
        for bv in bvals:
            term *= bv
        for j, ev in enumerate(evals):
            if j != i:
                term *= ev
        total += term
    return total


def make_mixed_t(moment_fn: MomentFn) -> TFn:
    """Memoized multi-letter t solver on top of a mixed moment model.

    Needs every single-letter mean to have invertible body.
    """
    cache: dict[Word, DualScalar] = {}

    def t(word: Word) -> DualScalar:
        word = tuple(word)
        if word in cache:
            return cache[word]
        n = len(word)
        if n == 0:
            raise InvalidInputError("empty word")
        if n == 1:
            val = moment_fn(word)
            if val.body == 0:
                raise MathDomainError(f"mean of letter {word[0]!r} must be invertible")
            cache[word] = val
            return val
        rest = DualScalar(0.0)
        for pi in _ncl(n):
            if pi.num_blocks == 1:
                continue
            rest = rest + t_pi_value(pi, word, t)
        lead = DualScalar(1.0)
        for letter in word[1:]:
            lead = lead * t((letter,))
        val = (moment_fn(word) - rest) / lead
        cache[word] = val
        return val

    return t


@dataclass(frozen=True)
class MixedVanishingReport:
    max_body: float
    max_eps: float
    worst_body_word: Word
    worst_eps_word: Word
    words_checked: int


def mixed_vanishing_check(
    moment_fn: MomentFn, max_len: int, letters: tuple = ("x", "y")
) -> MixedVanishingReport:
    """Largest |t| and |t'| over genuinely mixed words up to max_len.

    For infinitesimally free letters both maxima vanish; a Boolean pair is
    the standard negative control.
    """
    if max_len > 10:
        raise SizeLimitError("mixed words enumerate NCL(n); max_len <= 10")
    t = make_mixed_t(moment_fn)
    max_body = 0.0
    max_eps = 0.0
    wb: Word = ()
    we: Word = ()
    count = 0
    for n in range(2, max_len + 1):
        for word in product(letters, repeat=n):
            if len(set(word)) < 2:
                continue
            val = t(word)
            count += 1
            if abs(val.body) > max_body:
                max_body, wb = abs(val.body), word
            if abs(val.eps) > max_eps:
                max_eps, we = abs(val.eps), word
    return MixedVanishingReport(max_body, max_eps, wb, we, count)


# -- cumulants from t-data ---------------------------------------------------


def kappa_from_t(tvec: TCoeffVector, route: str = "linked") -> CumulantVector:
    """Cumulants from single-variable t-data.

    route="linked": sum t_pi over the linked class of the full block, with
    the literal product rule supplying the infinitesimal part.
    route="interval": the closed forms summing over NC(n-1), where each
    block V contributes t_{|V|} and the minimum carries a power of t_0.
    """
    if route == "linked":
        return _kappa_from_t_linked(tvec)
    if route == "interval":
        return _kappa_from_t_interval(tvec)
    raise InvalidInputError(f"unknown route: {route!r}")


def _kappa_from_t_linked(tvec: TCoeffVector) -> CumulantVector:
    K = tvec.K
    if K > 10:
        raise SizeLimitError("linked route enumerates NCL(n); K <= 10")

    def t_fn(word: Word) -> DualScalar:
        return tvec.dual(len(word) - 1)

    kb = np.zeros(K, dtype=complex)
    kp = np.zeros(K, dtype=complex)
    for n in range(1, K + 1):
        word = ("a",) * n
        full = SetPartition.of(n, [list(range(1, n + 1))], validate=False)
        body = 0.0 + 0.0j
        eps = 0.0 + 0.0j
        for pi in _ncl(n):
            if connected_classes(pi).blocks != full.blocks:
                continue
            body += _t_pi_body(pi, tvec)
            eps += d_t_pi_value(pi, word, t_fn)
        kb[n - 1] = body
        kp[n - 1] = eps
    return CumulantVector(K, kb, kp)


def _t_pi_body(pi: LinkedPartition, tvec: TCoeffVector) -> complex:
    acc = 1.0 + 0.0j
    for block in pi.blocks:
        acc *= tvec.t[len(block) - 1]
    acc *= tvec.t[0] ** len(non_minimal_elements(pi))
    return acc


def _kappa_from_t_interval(tvec: TCoeffVector) -> CumulantVector:
    K = tvec.K
    if K - 1 > 12:
        raise SizeLimitError("interval route enumerates NC(n-1); K <= 13")
    t, tp = tvec.t, tvec.t_prime
    kb = np.zeros(K, dtype=complex)
    kp = np.zeros(K, dtype=complex)
    kb[0], kp[0] = t[0], tp[0]
    for n in range(2, K + 1):
        body = 0.0 + 0.0j
        eps = 0.0 + 0.0j
        for pi in _nc(n - 1):
            sizes = [len(b) for b in pi.blocks]
            if max(sizes) >= K:
                raise SizeLimitError("t-vector too short for this order")
            prod = 1.0 + 0.0j
            for s in sizes:
                prod *= t[s]
            pw = n - len(sizes)
            body += prod * t[0] ** pw
            for v, sv in enumerate(sizes):
                term = tp[sv]
                for w, sw in enumerate(sizes):
                    if w != v:
                        term *= t[sw]
                eps += term * t[0] ** pw
            if pw >= 1:
                eps += prod * pw * tp[0] * t[0] ** (pw - 1)
        kb[n - 1] = body
        kp[n - 1] = eps
    return CumulantVector(K, kb, kp)
