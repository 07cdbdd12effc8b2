"""Reference nonadaptive algorithms that meet the query lower bound.

Three constructions: a ceil(n/2)-query exact evaluator of the n-bit parity
function built from disjoint pair parities, a k-query learner measuring in
the Fourier basis over index subsets of size at most k, and a one-query
exact learner for the class of subset-parity concepts on n = 2^b - 1 bits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Hashable

import numpy as np

from .errors import ContractViolation, ValidationError
from .learning import ConceptClass
from .qstate import (
    Measurement,
    OracleString,
    PovmMeasurement,
    ProjectiveMeasurement,
    QueryState,
    apply_oracle,
    measure,
)

MAX_POVM_CELLS = 1 << 24


def _identity(label: Hashable) -> Hashable:
    return label


@dataclass(frozen=True)
class NonadaptiveAlgorithm:
    """A fixed query state, one oracle application, a measurement, postprocessing."""

    name: str
    psi: QueryState
    meas: Measurement
    postprocess: Callable[[Hashable], Hashable] = field(default=_identity, compare=False)

    def __post_init__(self):
        if not self.psi.is_normalized():
            raise ContractViolation(f"{self.name}: query state is not normalized")

    @property
    def n(self) -> int:
        return self.psi.n

    @property
    def k(self) -> int:
        return self.psi.k


def run_algorithm(alg: NonadaptiveAlgorithm, x: OracleString) -> dict:
    """Outcome distribution of the algorithm on hidden string x, after postprocessing."""
    if x.n != alg.n:
        raise ContractViolation(f"oracle string has n={x.n}, algorithm expects {alg.n}")
    raw = measure(apply_oracle(alg.psi, x), alg.meas)
    out: dict = {}
    for label, p in raw.items():
        key = alg.postprocess(label)
        out[key] = out.get(key, 0.0) + p
    return out


def decision_measurement(alg: NonadaptiveAlgorithm) -> Measurement:
    """Fold the postprocessing into the measurement labels."""
    return alg.meas.relabel(alg.postprocess)


# --- pairwise-parity evaluator ----------------------------------------------


def parity_registers(n: int) -> tuple[tuple[int, int], ...]:
    """Disjoint index pairs covering [1, n]; odd n pads the last with index 0."""
    regs = [(2 * i - 1, 2 * i) for i in range(1, n // 2 + 1)]
    if n % 2 == 1:
        regs.append((n, 0))
    return tuple(regs)


def build_parity_algorithm(n: int) -> NonadaptiveAlgorithm:
    """Exact evaluator of x_1 XOR ... XOR x_n with ceil(n/2) queries.

    Register r holds (|a_r> + |b_r>)/sqrt(2) for the pair (a_r, b_r) =
    (2r-1, 2r); odd n pairs the last index with the fixed zero index.  One
    oracle application turns register r into a +/- state for the pair parity
    x_{a_r} XOR x_{b_r}, the product +/- measurement reads all pair parities
    simultaneously and deterministically, and their XOR is the total parity.
    Raw outcome labels are tuples of pair-parity bits.
    """
    if n < 1:
        raise ContractViolation(f"n must be >= 1, got {n}")
    regs = parity_registers(n)
    k = len(regs)
    amp = complex(2.0 ** (-k / 2.0))
    amplitudes = {(t, 0): amp for t in product(*regs)}
    psi = QueryState(n=n, k=k, amplitudes=amplitudes)

    effects = []
    for signs in product((0, 1), repeat=k):
        vec = {}
        for choices in product((0, 1), repeat=k):
            t = tuple(regs[r][choices[r]] for r in range(k))
            phase = (-1) ** sum(s & c for s, c in zip(signs, choices))
            vec[(t, 0)] = phase * amp
        effects.append((signs, QueryState(n=n, k=k, amplitudes=vec)))
    meas = ProjectiveMeasurement(tuple(effects))

    def total_parity(signs) -> int:
        return sum(signs) & 1

    return NonadaptiveAlgorithm("pairwise-parity", psi, meas, total_parity)


# --- uniform-subset Fourier learner -----------------------------------------


def subset_count(n: int, k: int) -> int:
    """Number of subsets of [n] with size at most k."""
    return sum(math.comb(n, j) for j in range(min(k, n) + 1))


def recovery_success_probability(n: int, k: int) -> float:
    """Closed-form success probability of the subset learner: 2^-n * sum_{j<=k} C(n, j)."""
    if not 0 <= k <= n:
        raise ContractViolation(f"require 0 <= k <= n, got n={n}, k={k}")
    return subset_count(n, k) / float(1 << n)


def _subset_tuple(mask: int, length: int) -> tuple[int, ...]:
    t = [i for i in range(1, mask.bit_length() + 1) if mask >> (i - 1) & 1]
    return tuple(t) + (0,) * (length - len(t))


def _low_weight_masks(n: int, k: int) -> list[int]:
    return [m for m in range(1 << n) if m.bit_count() <= k]


def build_subset_state(n: int, k: int) -> QueryState:
    """Uniform superposition over index subsets of size at most k.

    A subset is encoded as its indices in increasing order padded with
    zeros; the oracle then applies the phase (-1)^(sum of x over the
    subset).  k = 0 is allowed and yields the single empty subset, carried
    in a length-1 register.
    """
    if n < 1 or not 0 <= k <= n:
        raise ContractViolation(f"require n >= 1 and 0 <= k <= n, got n={n}, k={k}")
    if n > 16:
        raise ValidationError(f"subset state enumerates 2^{n} masks; n <= 16 required")
    length = max(k, 1)
    masks = _low_weight_masks(n, k)
    amp = complex(1.0 / math.sqrt(len(masks)))
    amplitudes = {(_subset_tuple(m, length), 0): amp for m in masks}
    return QueryState(n=n, k=length, amplitudes=amplitudes)


def _fwht(v: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform, natural ordering."""
    v = np.array(v, dtype=complex)
    size = v.size
    h = 1
    while h < size:
        v = v.reshape(size // (2 * h), 2, h)
        top = v[:, 0, :].copy()
        bot = v[:, 1, :].copy()
        v[:, 0, :] = top + bot
        v[:, 1, :] = top - bot
        v = v.reshape(size)
        h *= 2
    return v


def subset_outcome_distribution(
    n: int, k: int, x: OracleString, method: str = "fast"
) -> dict:
    """Distribution of the subset learner's Fourier measurement on input x.

    Outcomes are candidate strings (as n-character text) plus "fail" for the
    mass outside the measured family.  The "fast" method uses a
    Walsh-Hadamard butterfly; "direct" evaluates every overlap by explicit
    summation as an independent cross-check.
    """
    if x.n != n:
        raise ContractViolation(f"oracle string has n={x.n}, expected {n}")
    psi = apply_oracle(build_subset_state(n, k), x)
    coeff = np.zeros(1 << n, dtype=complex)
    for (t, _a), amplitude in psi.amplitudes.items():
        mask = 0
        for i in t:
            if i:
                mask |= 1 << (i - 1)
        coeff[mask] = amplitude
    scale = 2.0 ** (-n / 2.0)
    if method == "fast":
        overlaps = _fwht(coeff) * scale
    elif method == "direct":
        masks = np.arange(1 << n, dtype=np.int64)
        overlaps = np.zeros(1 << n, dtype=complex)
        support = np.flatnonzero(coeff)
        amps = coeff[support]
        chunk = 1 << 9
        for start in range(0, 1 << n, chunk):
            ys = masks[start : start + chunk, None]
            par = np.bitwise_count(np.bitwise_and(ys, support[None, :]))
            signs = 1.0 - 2.0 * (par & 1)
            overlaps[start : start + chunk] = signs @ amps * scale
    else:
        raise ContractViolation(f"method must be 'fast' or 'direct', got {method!r}")
    probs = np.abs(overlaps) ** 2
    dist = {str(OracleString.from_int(n, y)): float(probs[y]) for y in range(1 << n)}
    dist["fail"] = max(0.0, 1.0 - float(probs.sum()))
    return dist


def build_subset_algorithm(n: int, k: int) -> NonadaptiveAlgorithm:
    """The subset learner with its Fourier measurement materialized as a POVM.

    Effects are rank-one projectors onto the Fourier family restricted to
    the low-weight support, plus a remainder effect labeled "fail".  Only
    intended at small n; the distribution helper covers the rest.
    """
    if k < 1:
        raise ContractViolation(f"POVM form requires k >= 1, got {k}")
    psi = build_subset_state(n, k)
    basis = tuple(sorted(psi.support()))
    d = len(basis)
    if (1 << n) * d * d > MAX_POVM_CELLS:
        raise ValidationError(
            f"POVM would need {(1 << n) * d * d} cells; use subset_outcome_distribution"
        )
    index_of = {key: i for i, key in enumerate(basis)}
    scale = 2.0 ** (-n / 2.0)
    elements = []
    total = np.zeros((d, d), dtype=complex)
    for y in range(1 << n):
        vec = np.zeros(d, dtype=complex)
        for (t, a), i in index_of.items():
            par = 0
            for idx in t:
                if idx:
                    par ^= y >> (idx - 1) & 1
            vec[i] = scale * (1.0 - 2.0 * par)
        eff = np.outer(vec, vec.conj())
        total += eff
        elements.append((str(OracleString.from_int(n, y)), eff))
    elements.append(("fail", np.eye(d, dtype=complex) - total))
    meas = PovmMeasurement(n=n, k=psi.k, basis=basis, elements=tuple(elements))
    return NonadaptiveAlgorithm(f"subset-fourier-{k}", psi, meas)


# --- one-query subset-parity learner ----------------------------------------


def _masked_parity(s: int, i: int) -> int:
    return (s & i).bit_count() & 1


def hadamard_concept_class(b: int) -> ConceptClass:
    """The 2^b concepts on n = 2^b - 1 bits whose bit i is the parity of s AND i."""
    if not 1 <= b <= 4:
        raise ContractViolation(f"require 1 <= b <= 4, got {b}")
    n = (1 << b) - 1
    concepts = tuple(
        OracleString(tuple(_masked_parity(s, i) for i in range(1, n + 1)))
        for s in range(1 << b)
    )
    return ConceptClass(n, concepts)


def build_hadamard_algorithm(b: int) -> NonadaptiveAlgorithm:
    """One-query exact learner of the subset-parity class.

    The query state is uniform over all indices 0..n with n = 2^b - 1; the
    oracle imprints the pattern (-1)^(parity of s AND i), and these 2^b
    patterns are exactly the rows of a Hadamard matrix, hence orthogonal.
    Measuring in that basis recovers the concept index s with certainty.
    """
    if not 1 <= b <= 4:
        raise ContractViolation(f"require 1 <= b <= 4, got {b}")
    n = (1 << b) - 1
    amp = complex(2.0 ** (-b / 2.0))
    psi = QueryState(n=n, k=1, amplitudes={((i,), 0): amp for i in range(n + 1)})
    effects = []
    for s in range(1 << b):
        vec = {
            ((i,), 0): amp * (1.0 - 2.0 * _masked_parity(s, i)) for i in range(n + 1)
        }
        effects.append((s, QueryState(n=n, k=1, amplitudes=vec)))
    meas = ProjectiveMeasurement(tuple(effects))
    return NonadaptiveAlgorithm(f"subset-parity-{b}", psi, meas)


def build_hadamard_instance(b: int) -> tuple[ConceptClass, NonadaptiveAlgorithm]:
    """Concept class and matching one-query exact learner, index-aligned by s."""
    return hadamard_concept_class(b), build_hadamard_algorithm(b)
