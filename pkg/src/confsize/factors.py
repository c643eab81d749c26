"""Multiplicative-factor algebra.

A factor maps score-space measure back to label-space measure.  The
analytic families carry closed-form antiderivatives so that integrals of
step functions against them are exact; score functions whose factor
depends on the data distribution (probability-based classification
scores, quantile-interval losses) are represented as `unknown` and served
by the score-matrix estimators instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

__all__ = [
    "FactorSpec",
    "FactorSupport",
    "UnknownFactorError",
    "factor_value",
    "factor_antiderivative",
    "factor_support",
    "parse_factor",
    "format_factor",
]


class UnknownFactorError(ValueError):
    """Raised when an analytic-factor operation receives an unknown factor."""


@dataclass(frozen=True)
class FactorSpec:
    """Symbolic description of a multiplicative factor.

    kind is one of "l1", "lp", "lp_high_dim", "zero_one", "unknown".
    """

    kind: str
    p: Optional[float] = None
    m: Optional[int] = None
    num_labels: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind not in {"l1", "lp", "lp_high_dim", "zero_one", "unknown"}:
            raise ValueError(f"unrecognized factor kind: {self.kind!r}")
        if self.kind in {"lp", "lp_high_dim"}:
            if self.p is None or self.p < 1.0:
                raise ValueError(f"lp factor requires p >= 1, got {self.p}")
        if self.kind == "lp_high_dim":
            if self.m is None or self.m < 1:
                raise ValueError(f"high-dim lp factor requires m >= 1, got {self.m}")
        if self.kind == "zero_one":
            if self.num_labels is None or self.num_labels < 2:
                raise ValueError(
                    f"zero-one factor requires num_labels >= 2, got {self.num_labels}"
                )

    @classmethod
    def l1(cls) -> "FactorSpec":
        return cls("l1")

    @classmethod
    def lp(cls, p: float) -> "FactorSpec":
        return cls("lp", p=float(p))

    @classmethod
    def lp_high_dim(cls, p: float, m: int) -> "FactorSpec":
        return cls("lp_high_dim", p=float(p), m=int(m))

    @classmethod
    def zero_one(cls, num_labels: int) -> "FactorSpec":
        return cls("zero_one", num_labels=int(num_labels))

    @classmethod
    def unknown(cls) -> "FactorSpec":
        return cls("unknown")

    @property
    def is_analytic(self) -> bool:
        return self.kind != "unknown"

    @property
    def is_discrete(self) -> bool:
        return self.kind == "zero_one"


@dataclass(frozen=True)
class FactorSupport:
    """Score-space support of a factor, with atoms for discrete measures."""

    lower: float
    upper: float
    measure_kind: str  # "continuous" | "discrete"
    atoms: Optional[Tuple[float, ...]] = None

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError("support lower bound exceeds upper bound")


def _high_dim_constant(p: float, m: int) -> float:
    # (2 * Gamma(1/p + 1))^m / Gamma(m/p + 1): unit-radius ball volume
    # constant of the p-norm in m dimensions.  Direct evaluation where it
    # cannot overflow, log-space otherwise.
    if m / p + 1.0 < 170.0:
        try:
            return (2.0 * math.gamma(1.0 / p + 1.0)) ** m / math.gamma(m / p + 1.0)
        except OverflowError:
            pass
    log_c = m * (math.log(2.0) + math.lgamma(1.0 / p + 1.0)) - math.lgamma(m / p + 1.0)
    return math.exp(log_c)


def factor_value(spec: FactorSpec, r: float) -> float:
    """Density of the factor at score r (weights at atoms for zero-one)."""
    if spec.kind == "unknown":
        raise UnknownFactorError("factor value is not available for unknown factors")
    if spec.kind == "zero_one":
        if r == 0.0:
            return 1.0
        if r == 1.0:
            return float(spec.num_labels - 1)
        raise ValueError(f"zero-one factor is supported on {{0, 1}}, got r={r}")
    if r < 0.0:
        raise ValueError(f"factor support starts at 0, got r={r}")
    if spec.kind == "l1":
        return 2.0
    if spec.kind == "lp":
        return 2.0 * r ** (1.0 / spec.p - 1.0) / spec.p
    # lp_high_dim
    exponent = spec.m / spec.p
    return _high_dim_constant(spec.p, spec.m) * exponent * r ** (exponent - 1.0)


def factor_antiderivative(spec: FactorSpec, r: float) -> float:
    """F with F(0) = 0 and F' = factor_value, for the continuous families.

    Integration always goes through this antiderivative: the lp density is
    unbounded as r -> 0+ for p > 1, but F stays finite.
    """
    if spec.kind == "unknown":
        raise UnknownFactorError("no antiderivative for unknown factors")
    if spec.kind == "zero_one":
        raise UnknownFactorError("zero-one factor is discrete; integrate by atoms")
    if r < 0.0:
        raise ValueError(f"antiderivative domain starts at 0, got r={r}")
    if spec.kind == "l1":
        return 2.0 * r
    if spec.kind == "lp":
        return 2.0 * r ** (1.0 / spec.p)
    if math.isinf(r):
        return math.inf
    return _high_dim_constant(spec.p, spec.m) * r ** (spec.m / spec.p)


def factor_support(spec: FactorSpec) -> FactorSupport:
    """Score-space support of the factor."""
    if spec.kind == "zero_one":
        return FactorSupport(0.0, 1.0, "discrete", atoms=(0.0, 1.0))
    if spec.kind == "unknown":
        return FactorSupport(-math.inf, math.inf, "continuous")
    return FactorSupport(0.0, math.inf, "continuous")


def parse_factor(text: str) -> FactorSpec:
    """Parse the CLI factor syntax: l1 | lp:<p> | lp:<p>:<m> | zero-one:<L> | unknown."""
    parts = text.strip().lower().split(":")
    name = parts[0]
    try:
        if name == "l1" and len(parts) == 1:
            return FactorSpec.l1()
        if name == "lp" and len(parts) == 2:
            return FactorSpec.lp(float(parts[1]))
        if name == "lp" and len(parts) == 3:
            return FactorSpec.lp_high_dim(float(parts[1]), int(parts[2]))
        if name == "zero-one" and len(parts) == 2:
            return FactorSpec.zero_one(int(parts[1]))
        if name == "unknown" and len(parts) == 1:
            return FactorSpec.unknown()
    except ValueError as exc:
        raise ValueError(f"bad factor spec {text!r}: {exc}") from exc
    raise ValueError(f"bad factor spec {text!r}")


def format_factor(spec: FactorSpec) -> str:
    """Inverse of `parse_factor`."""
    if spec.kind == "l1":
        return "l1"
    if spec.kind == "lp":
        return f"lp:{spec.p:g}"
    if spec.kind == "lp_high_dim":
        return f"lp:{spec.p:g}:{spec.m}"
    if spec.kind == "zero_one":
        return f"zero-one:{spec.num_labels}"
    return "unknown"
