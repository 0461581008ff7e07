"""Presentation-level flooring: whole bits, whole bps (kbps to 3 decimals), whole ms.

Internal values are never floored; these helpers are for output only.
"""
import math

# guards against 110.99999999 style representation error before flooring
_EPS = 1e-9


def floor_bits(bits: float) -> int:
    return math.floor(bits + _EPS)


def floor_bps(bps: float) -> int:
    return math.floor(bps + _EPS)


def floor_kbps(bps: float) -> float:
    """kbps floored to three decimals, e.g. 18163.27 bps -> 18.163."""
    return floor_bps(bps) / 1000


def floor_ms(seconds: float) -> int:
    return math.floor(seconds * 1000 + _EPS)


def display_phase_ms(delay_bound_s: float, phase2_s: float) -> tuple[int, int]:
    """(T1, T2) in whole ms, with T1 shown as the bound minus the floored T2."""
    t2 = floor_ms(phase2_s)
    return floor_ms(delay_bound_s) - t2, t2
