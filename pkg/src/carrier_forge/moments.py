"""Constellation moments and the useful/interfering split of the kernel powers.

For i.i.d. proper symbols every sixth-order moment of the received sample
factors into joint cumulants over blocks of coinciding symbol indices:
pairs (weight 1), 2+2 blocks (weight c4 = m4 - 2) and the 3+3 block
(weight c6 = m6 - 9 m4 + 12). Summing the handful of block patterns as
tensor contractions gives V[z3] exactly in O(L^3) operations instead of the
naive O(L^6) double loop over index triples.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import KernelTable


@dataclass(frozen=True)
class ConstellationMoments:
    m4: float = 1.0
    m6: float = 1.0
    proper: bool = True
    m2: float = 1.0

    def __post_init__(self):
        if abs(self.m2 - 1.0) > 1e-9:
            raise ValueError("moments must be normalized to unit power")
        if self.m4 < 1 - 1e-12 or self.m6 < self.m4 - 1e-12:
            raise ValueError("moment inequalities m6 >= m4 >= 1 violated")

    @property
    def c4(self) -> float:
        return self.m4 - 2.0

    @property
    def c6(self) -> float:
        return self.m6 - 9.0 * self.m4 + 12.0

    @classmethod
    def from_points(cls, points) -> "ConstellationMoments":
        s = np.asarray(points, dtype=complex)
        s = s / np.sqrt(np.mean(np.abs(s) ** 2))
        m4 = float(np.mean(np.abs(s) ** 4))
        m6 = float(np.mean(np.abs(s) ** 6))
        proper = all(
            abs(np.mean(s**m * np.conj(s) ** n)) < 1e-9
            for m in range(4)
            for n in range(4)
            if m != n and m + n <= 4
        )
        return cls(m4=m4, m6=m6, proper=proper)


QPSK = ConstellationMoments()


def qpsk_points() -> np.ndarray:
    return np.exp(1j * (np.pi / 4 + np.pi / 2 * np.arange(4)))


def apsk16_points(ring_ratio: float = 2.7) -> np.ndarray:
    inner = np.exp(1j * (np.pi / 4 + np.pi / 2 * np.arange(4)))
    outer = ring_ratio * np.exp(1j * (np.pi / 12 + np.pi / 6 * np.arange(12)))
    pts = np.concatenate([inner, outer])
    return pts / np.sqrt(np.mean(np.abs(pts) ** 2))


@dataclass(frozen=True)
class KappaSet:
    ku11: float
    ki11: float
    ku33: float
    ki33: float
    ku13: complex
    ki13: complex
    ku31: complex
    ki31: complex


@dataclass(frozen=True)
class SecondOrderStats:
    """Power-normalized second-order statistics of z1 and z3 (P = 1)."""

    var1: float
    var3: float
    cov13: complex  # E[z1 z3*]
    u1: complex
    u3: complex


def useful_coefficients(table: KernelTable, moments: ConstellationMoments = QPSK) -> tuple[complex, complex]:
    """Coefficients of the victim symbol in z1 and z3 (z3 per unit P)."""
    A = table.third_order
    L = table.L
    y = np.einsum("kee->k", A)
    return complex(table.first_order[L]), complex(2 * y[L] + moments.c4 * A[L, L, L])


def second_order_stats(table: KernelTable, moments: ConstellationMoments = QPSK) -> SecondOrderStats:
    if not moments.proper:
        raise ValueError("the useful/interfering split assumes a proper constellation")
    A = table.third_order
    A1 = table.first_order
    c4, c6 = moments.c4, moments.c6
    y = np.einsum("kee->k", A)  # sum_e A[k, e, e] (= sum_a A[a, k, a] by symmetry)
    diag = np.einsum("iii->i", A)
    aa = np.abs(A) ** 2
    var3 = (
        2 * aa.sum()
        + 4 * np.sum(np.abs(y) ** 2)
        + c4 * (np.einsum("iij->", aa) + 4 * np.einsum("iji->", aa) + 4 * np.real(np.vdot(y, diag)))
        + c6 * np.sum(np.abs(diag) ** 2)
    )
    cov13 = 2 * np.vdot(y, A1) + c4 * np.vdot(diag, A1)
    var1 = float(np.sum(np.abs(A1) ** 2))
    u1, u3 = useful_coefficients(table, moments)
    return SecondOrderStats(var1, float(np.real(var3)), complex(cov13), u1, u3)


def kappa_set(table: KernelTable, moments: ConstellationMoments = QPSK) -> KappaSet:
    st = second_order_stats(table, moments)
    ku11 = abs(st.u1) ** 2
    ku33 = abs(st.u3) ** 2
    ku13 = st.u1 * np.conj(st.u3)
    ki13 = st.cov13 - ku13
    return KappaSet(
        ku11=ku11,
        ki11=float(np.sum(np.abs(np.delete(table.first_order, table.L)) ** 2)),
        ku33=ku33,
        ki33=st.var3 - ku33,
        ku13=complex(ku13),
        ki13=complex(ki13),
        ku31=complex(np.conj(ku13)),
        ki31=complex(np.conj(ki13)),
    )
