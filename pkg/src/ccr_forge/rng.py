"""Seeded random number generator for reproducible randomized checks."""

from typing import List, Sequence, TypeVar

import numpy as np

from ccr_forge.cstar_algebra import AlgebraElement, AlgebraShape

T = TypeVar("T")


class SeededRNG:
    """
    Deterministic random source with seed control.

    Wraps a numpy Generator. Same seed always produces the same sequence of
    matrices, unitaries and fields, so every randomized report can be
    reproduced from the seed it prints.
    """

    def __init__(self, seed: int) -> None:
        """
        Initialize RNG with specific seed.

        Args:
            seed: Non-negative integer seed
        """
        self.seed = seed
        self._rng = np.random.default_rng(seed)

    def reset(self) -> None:
        """Reset RNG to initial seed state."""
        self._rng = np.random.default_rng(self.seed)

    def uniform(self, a: float, b: float) -> float:
        return float(self._rng.uniform(a, b))

    def normal(self, mu: float, sigma: float) -> float:
        return float(self._rng.normal(mu, sigma))

    def integers(self, low: int, high: int) -> int:
        """Random integer in [low, high)."""
        return int(self._rng.integers(low, high))

    def choice(self, seq: Sequence[T]) -> T:
        return seq[int(self._rng.integers(0, len(seq)))]

    def shuffled(self, seq: Sequence[T]) -> List[T]:
        order = self._rng.permutation(len(seq))
        return [seq[i] for i in order]

    def complex_normal(self, size: int) -> np.ndarray:
        """Vector of standard complex Gaussians."""
        return self._rng.normal(size=size) + 1j * self._rng.normal(size=size)

    def random_matrix(self, n: int) -> np.ndarray:
        """n×n matrix with independent standard complex Gaussian entries."""
        return self._rng.normal(size=(n, n)) + 1j * self._rng.normal(size=(n, n))

    def random_unitary(self, n: int) -> np.ndarray:
        """
        Haar-distributed n×n unitary.

        QR of a complex Gaussian matrix with the phases of R's diagonal
        folded back into Q.
        """
        q, r = np.linalg.qr(self.random_matrix(n))
        d = np.diag(r)
        return q * (d / np.abs(d))

    def random_phase(self) -> complex:
        return complex(np.exp(1j * self._rng.uniform(0.0, 2.0 * np.pi)))

    def random_element(self, shape: AlgebraShape) -> AlgebraElement:
        return AlgebraElement(shape, tuple(self.random_matrix(n) for n in shape.blocks))

    def random_unitary_element(self, shape: AlgebraShape) -> AlgebraElement:
        return AlgebraElement(shape, tuple(self.random_unitary(n) for n in shape.blocks))
