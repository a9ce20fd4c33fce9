"""Scalar and matrix fields evaluable with exact derivatives of any order.

A field caches its derivative lists per (point, order); fields are immutable
after construction, so caching is safe under concurrent reads.
"""

from __future__ import annotations

import numpy as np

from . import jets as J


class ScalarField:
    """Base class: a smooth real function on a chart domain.

    Subclasses implement ``_jets(p, order)``; consumers call :meth:`jets`,
    which validates and caches.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self._cache: dict = {}

    def jets(self, p, order: int) -> list[np.ndarray]:
        p = np.asarray(p, dtype=float)
        key = (p.tobytes(), order)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._jets(p, order)
            self._cache[key] = hit
        return hit

    def _jets(self, p, order):  # pragma: no cover - abstract
        raise NotImplementedError

    def __call__(self, p) -> float:
        return float(self.jets(p, 0)[0])

    def gradient(self, p) -> np.ndarray:
        return np.array(self.jets(p, 1)[1])

    # Linear-space structure; products are intentionally absent (pointwise
    # products of fields are not closed under the solution calculus).
    def __add__(self, other):
        if isinstance(other, ScalarField):
            return LinearComboField([self, other], [1.0, 1.0], 0.0)
        return LinearComboField([self], [1.0], float(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, ScalarField):
            return LinearComboField([self, other], [1.0, -1.0], 0.0)
        return LinearComboField([self], [1.0], -float(other))

    def __mul__(self, c):
        return LinearComboField([self], [float(c)], 0.0)

    __rmul__ = __mul__

    def __neg__(self):
        return LinearComboField([self], [-1.0], 0.0)


class ExprField(ScalarField):
    """Field defined by a jet-arithmetic expression fn(list[Jet]) -> Jet."""

    def __init__(self, dim: int, fn, name: str = "expr"):
        super().__init__(dim)
        self.fn = fn
        self.name = name

    def _jets(self, p, order):
        return J.eval_scalar_expr(self.fn, p, order)

    def __repr__(self):
        return f"ExprField({self.name}, dim={self.dim})"


class ConstField(ScalarField):
    def __init__(self, dim: int, value: float):
        super().__init__(dim)
        self.const = float(value)

    def _jets(self, p, order):
        return J.Jet.constant(self.const, self.dim, order).terms

    def __repr__(self):
        return f"ConstField({self.const})"


class LinearComboField(ScalarField):
    """c_1 f_1 + ... + c_k f_k + const, flattened on construction."""

    def __init__(self, fields, coeffs, const: float = 0.0):
        super().__init__(fields[0].dim)
        flat_fields, flat_coeffs = [], []
        for f, c in zip(fields, coeffs):
            if isinstance(f, LinearComboField):
                flat_fields.extend(f.fields)
                flat_coeffs.extend(c * ci for ci in f.coeffs)
                const += c * f.const
            else:
                flat_fields.append(f)
                flat_coeffs.append(c)
        self.fields = flat_fields
        self.coeffs = flat_coeffs
        self.const = float(const)

    def _jets(self, p, order):
        out = J.Jet.constant(self.const, self.dim, order).terms
        for f, c in zip(self.fields, self.coeffs):
            out = [o + c * t for o, t in zip(out, f.jets(p, order))]
        return out


class MatrixField:
    """A smooth symmetric-matrix-valued map with exact derivatives."""

    def __init__(self, dim: int):
        self.dim = dim
        self._cache: dict = {}

    def jets(self, p, order: int) -> list[np.ndarray]:
        p = np.asarray(p, dtype=float)
        key = (p.tobytes(), order)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._jets(p, order)
            self._cache[key] = hit
        return hit

    def _jets(self, p, order):  # pragma: no cover - abstract
        raise NotImplementedError

    def __call__(self, p) -> np.ndarray:
        return np.array(self.jets(p, 0)[0])


class ExprMatrixField(MatrixField):
    """Matrix field from fn(list[Jet]) -> nested list of Jet entries."""

    def __init__(self, dim: int, fn, name: str = "matrix expr"):
        super().__init__(dim)
        self.fn = fn
        self.name = name

    def _jets(self, p, order):
        return J.eval_matrix_expr(self.fn, p, order)


class ChartMetricField(MatrixField):
    """The chart metric g_ij viewed as a matrix field (for nabla_cotensor2)."""

    def __init__(self, chart):
        super().__init__(chart.dim)
        self.chart = chart

    def _jets(self, p, order):
        return self.chart.metric_jets(p, order)
