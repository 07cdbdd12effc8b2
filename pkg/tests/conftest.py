"""Shared builders for states and measurements used across the suite."""
from __future__ import annotations

import numpy as np

from nonadapt import PovmMeasurement, ProjectiveMeasurement, QueryState


def k1_state(n: int, amps: dict[int, complex], ancilla_dim: int = 1) -> QueryState:
    """One-register state from {index: amplitude}."""
    return QueryState(n, 1, {((i,), 0): a for i, a in amps.items()}, ancilla_dim)


def uniform_k1(n: int, indices) -> QueryState:
    indices = list(indices)
    amp = 1.0 / np.sqrt(len(indices))
    return k1_state(n, {i: amp for i in indices})


def random_projective(rng: np.random.Generator, psi: QueryState, binary_labels: bool = True):
    """Random orthonormal measurement over the state's support, via QR."""
    basis = sorted(psi.support())
    d = len(basis)
    raw = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, _ = np.linalg.qr(raw)
    effects = []
    for col in range(d):
        vec = {basis[r]: complex(q[r, col]) for r in range(d)}
        label = int(rng.integers(0, 2)) if binary_labels else col
        effects.append((label, QueryState(psi.n, psi.k, vec, psi.ancilla_dim)))
    return ProjectiveMeasurement(tuple(effects))


def random_two_outcome_povm(rng: np.random.Generator, psi: QueryState) -> PovmMeasurement:
    """Random POVM {E, I - E} over the state's support."""
    basis = tuple(sorted(psi.support()))
    d = len(basis)
    raw = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, _ = np.linalg.qr(raw)
    eig = rng.uniform(0.0, 1.0, size=d)
    e0 = (q * eig) @ q.conj().T
    e1 = np.eye(d) - e0
    return PovmMeasurement(
        n=psi.n, k=psi.k, basis=basis,
        elements=((0, e0), (1, e1)),
        ancilla_dim=psi.ancilla_dim,
    )
