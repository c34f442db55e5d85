"""Saleh TWTA model and its third-order Taylor truncation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SalehParams:
    alpha_i: float = 1.90947
    beta_i: float = 1.07469
    alpha_q: float = 4.35023
    beta_q: float = 2.33525

    def __post_init__(self):
        if min(self.alpha_i, self.beta_i, self.alpha_q, self.beta_q) <= 0:
            raise ValueError("Saleh parameters must be strictly positive")


@dataclass(frozen=True)
class TaylorCoeffs:
    gamma1: complex
    gamma3: complex
    expansion_point: float = 0.0


def taylor_coeffs(params: SalehParams = SalehParams(), a: float = 0.0, order: int = 1) -> TaylorCoeffs:
    """gamma1(a), gamma3(a) of the truncated polynomial around input power a.

    gamma1 is kept purely real, exactly as in the published coefficients; only
    the third-order (N = 1) truncation is supported.
    """
    if order != 1:
        raise NotImplementedError("only the N = 1 (third-order) truncation is implemented")
    if a < 0:
        raise ValueError("expansion point must be non-negative")
    ai, bi, aq, bq = params.alpha_i, params.beta_i, params.alpha_q, params.beta_q
    g1 = ai * (1 + 2 * bi * a) / (1 + bi * a) ** 2
    g3 = -ai * bi / (1 + bi * a) ** 2 + 1j * aq / (1 + bq * a) ** 2
    return TaylorCoeffs(complex(g1), complex(g3), float(a))


def saleh_gain(params: SalehParams, p):
    """Complex gain G(p) at instantaneous input power p, y = x G(|x|^2)."""
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise ValueError("instantaneous power must be non-negative")
    g = params.alpha_i / (1 + params.beta_i * p) + 1j * params.alpha_q * p / (1 + params.beta_q * p)
    return g if g.ndim else complex(g)


def apply_polynomial(x, coeffs: TaylorCoeffs):
    x = np.asarray(x)
    return x * (coeffs.gamma1 + coeffs.gamma3 * (x.real**2 + x.imag**2))


def apply_saleh(x, params: SalehParams):
    x = np.asarray(x)
    return x * saleh_gain(params, x.real**2 + x.imag**2)
