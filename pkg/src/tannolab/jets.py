"""Truncated multivariate Taylor (jet) arithmetic.

A jet of order r at a point of R^d is stored as a list ``[T0, T1, ..., Tr]``
where ``Tm`` is the raw m-th partial-derivative tensor, shape
``lead_shape + (d,)*m``, symmetric in its trailing m axes.  All derivative
propagation reduces to the generalized Leibniz rule

    (A.B)_{i1..im} = sum over subsets S of {i1..im} of A_{iS} B_{iS^c}

realized as einsum outer products followed by axis scatters.  Scalar-valued
jets get an operator-overloaded wrapper (:class:`Jet`) so chart metrics and
scalar fields can be written as ordinary arithmetic expressions; tensor-valued
jets are combined directly with :func:`tconv` using an einsum-style spec for
the leading (non-derivative) axes.

Nothing here is chart-aware; higher layers consume these raw partials.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

_DERIV_LETTERS = "ABCDEFGHMN"

#: Largest supported jet order.  Star-power chains on solutions are the only
#: consumers above order 3 (f^{*4} needs order-5 jets of f).
MAX_ORDER = len(_DERIV_LETTERS)


@lru_cache(maxsize=None)
def _script(spec: str, m: int, j: int) -> str:
    """einsum script for an order-(j, m-j) Leibniz term with lead spec."""
    if m > MAX_ORDER:
        raise ValueError(f"jet order {m} exceeds supported maximum {MAX_ORDER}")
    lhs, rhs = spec.split("->")
    a_spec, b_spec = lhs.split(",")
    return (
        a_spec + _DERIV_LETTERS[:j] + "," + b_spec + _DERIV_LETTERS[j:m]
        + "->" + rhs + _DERIV_LETTERS[:m]
    )


@lru_cache(maxsize=None)
def _scatters(m: int, j: int) -> tuple[tuple[int, ...], ...]:
    """Trailing-axis permutations placing j "A" axes on every size-j subset.

    The einsum in :func:`_script` produces trailing axes ordered (A-axes,
    B-axes).  For a subset S of target positions, entry p of the returned
    permutation is the source axis that lands at target position p.
    """
    perms = []
    for subset in itertools.combinations(range(m), j):
        comp = [p for p in range(m) if p not in subset]
        src = [0] * m
        for a_idx, pos in enumerate(subset):
            src[pos] = a_idx
        for b_idx, pos in enumerate(comp):
            src[pos] = j + b_idx
        perms.append(tuple(src))
    return tuple(perms)


def tconv_single(A, B, spec: str, m: int, j_min: int = 0,
                 j_max: int | None = None, dim: int | None = None):
    """Order-m term of the Leibniz product of derivative lists A and B.

    ``spec`` is an einsum signature for the leading axes, e.g. ``'ab,bc->ac'``
    for a matrix product or ``',->'`` for scalars.  ``j_min``/``j_max``
    restrict how many derivatives fall on A (used by order-by-order
    recurrences that solve for the top coefficient).
    """
    hi = m if j_max is None else min(j_max, m)
    out = None
    for j in range(j_min, hi + 1):
        k = m - j
        if j >= len(A) or k >= len(B):
            continue
        a, b = A[j], B[k]
        if not a.any() or not b.any():
            continue
        base = np.einsum(_script(spec, m, j), a, b)
        lead = base.ndim - m
        for perm in _scatters(m, j):
            axes = tuple(range(lead)) + tuple(lead + q for q in perm)
            term = base.transpose(axes)
            out = term.copy() if out is None else out + term
    if out is None:
        # Shape bookkeeping for an all-zero result.
        lead_shape = np.einsum(_script(spec, 0, 0), np.asarray(A[0]), np.asarray(B[0])).shape
        d = _dim_of(A, B) if dim is None else dim
        return np.zeros(lead_shape + (d,) * m)
    return out


def _dim_of(A, B) -> int:
    for lst in (A, B):
        for m, t in enumerate(lst):
            if m >= 1:
                return t.shape[-1]
    return 0


def tconv(A, B, spec: str, order: int | None = None):
    """Full Leibniz product of two derivative lists up to ``order``."""
    if order is None:
        order = min(len(A), len(B)) - 1
    return [tconv_single(A, B, spec, m) for m in range(order + 1)]


def tscale(A, c: float):
    return [c * t for t in A]


def tadd(A, B):
    return [a + b for a, b in zip(A, B)]


def tgrad(A):
    """Derivative list of the coordinate gradient: lead shape grows by (d,).

    ``tgrad(A)[m]`` is ``A[m+1]`` with its first trailing axis read as the
    gradient component; valid because the trailing axes are symmetric.
    """
    return [A[m + 1] for m in range(len(A) - 1)]


def tinv(G, order: int):
    """Derivative list of the matrix inverse of a matrix-valued jet.

    Solves (G.H)_m = 0 order by order:  H_m = -H_0 (sum_{j>=1} G_j H_{m-j}).
    """
    H0 = np.linalg.inv(G[0])
    H = [H0]
    for m in range(1, order + 1):
        S = tconv_single(G, H, "ab,bc->ac", m, j_min=1)
        H.append(-np.einsum("ab,bc...->ac...", H0, S))
    return H


# ---------------------------------------------------------------------------
# Scalar jets with operator overloading (for writing fields and potentials).
# ---------------------------------------------------------------------------

class Jet:
    """Scalar-valued truncated Taylor expansion at a point of R^d."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = [np.asarray(t, dtype=float) for t in terms]

    @property
    def order(self) -> int:
        return len(self.terms) - 1

    @property
    def value(self) -> float:
        return float(self.terms[0])

    def _dim(self) -> int:
        return self.terms[1].shape[-1] if self.order >= 1 else 0

    @classmethod
    def constant(cls, c: float, dim: int, order: int) -> "Jet":
        terms = [np.asarray(float(c))]
        terms += [np.zeros((dim,) * m) for m in range(1, order + 1)]
        return cls(terms)

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet.constant(float(other), self._dim(), self.order)

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        return Jet([a + b for a, b in zip(self.terms, o.terms)])

    __radd__ = __add__

    def __neg__(self):
        return Jet([-t for t in self.terms])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet([float(other) * t for t in self.terms])
        return Jet(tconv(self.terms, other.terms, ",->"))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self * (1.0 / float(other))
        return self * reciprocal(other)

    def __rtruediv__(self, other):
        return reciprocal(self) * float(other)

    def __pow__(self, n):
        if isinstance(n, int):
            if n < 0:
                return reciprocal(self) ** (-n)
            out = Jet.constant(1.0, self._dim(), self.order)
            base = self
            while n:
                if n & 1:
                    out = out * base
                base = base * base
                n >>= 1
            return out
        return powf(self, float(n))

    def __repr__(self):
        return f"Jet(order={self.order}, value={self.value})"


def seed_coordinates(p, order: int) -> list[Jet]:
    """Coordinate jets at p: value p[i], unit gradient, zero curvature."""
    p = np.asarray(p, dtype=float)
    d = p.size
    jets = []
    for i in range(d):
        terms = [np.asarray(p[i])]
        if order >= 1:
            e = np.zeros(d)
            e[i] = 1.0
            terms.append(e)
        terms += [np.zeros((d,) * m) for m in range(2, order + 1)]
        jets.append(Jet(terms))
    return jets


def reciprocal(u: Jet) -> Jet:
    h = [np.asarray(1.0 / float(u.terms[0]))]
    for m in range(1, u.order + 1):
        s = tconv_single(u.terms, h, ",->", m, j_min=1)
        h.append(-float(h[0]) * s)
    return Jet(h)


def _from_gradient_recurrence(u: Jet, h0: float, factor_terms_fn) -> Jet:
    """Build phi(u) from  d(phi(u)) = factor * du  solved order by order.

    ``factor_terms_fn(h_terms)`` returns the derivative list of the factor;
    it may consult the partially built ``h_terms`` (self-referential rules
    like exp).  Entry m of the result is the order-(m-1) term of factor*du
    with the new derivative axis leading, which is symmetric with the rest.
    """
    gu = tgrad(u.terms)
    h = [np.asarray(float(h0))]
    for m in range(1, u.order + 1):
        fac = factor_terms_fn(h)
        h.append(tconv_single(fac, gu, ",a->a", m - 1))
    return Jet(h)


def log(u: Jet) -> Jet:
    v = reciprocal(u)
    return _from_gradient_recurrence(u, math.log(float(u.terms[0])), lambda h: v.terms)


def exp(u: Jet) -> Jet:
    return _from_gradient_recurrence(u, math.exp(float(u.terms[0])), lambda h: h)


def powf(u: Jet, alpha: float) -> Jet:
    v = reciprocal(u)
    h0 = float(u.terms[0]) ** alpha

    def factor(h):
        return tconv(h, tscale(v.terms, alpha), ",->", order=len(h) - 1)

    return _from_gradient_recurrence(u, h0, factor)


def sqrt(u: Jet) -> Jet:
    h = [np.asarray(math.sqrt(float(u.terms[0])))]
    inv2h0 = 0.5 / float(h[0])
    d = u._dim()
    for m in range(1, u.order + 1):
        s = tconv_single(h, h, ",->", m, j_min=1, j_max=m - 1, dim=d)
        h.append((u.terms[m] - s) * inv2h0)
    return Jet(h)


def sin(u: Jet) -> Jet:
    return _sincos(u)[0]


def cos(u: Jet) -> Jet:
    return _sincos(u)[1]


def _sincos(u: Jet) -> tuple[Jet, Jet]:
    gu = tgrad(u.terms)
    s = [np.asarray(math.sin(float(u.terms[0])))]
    c = [np.asarray(math.cos(float(u.terms[0])))]
    for m in range(1, u.order + 1):
        s.append(tconv_single(c, gu, ",a->a", m - 1))
        c.append(-tconv_single(s, gu, ",a->a", m - 1))
    return Jet(s), Jet(c)


def stack_jets(entries) -> list[np.ndarray]:
    """Stack a nested sequence of equal-order Jets into derivative arrays.

    A 2D list of shape (R, C) yields arrays of shape (R, C) + (d,)*m.
    """
    entries = np.asarray(entries, dtype=object)
    flat = entries.ravel()
    order = flat[0].order
    out = []
    for m in range(order + 1):
        arrs = [j.terms[m] for j in flat]
        stacked = np.stack(arrs).reshape(entries.shape + arrs[0].shape)
        out.append(stacked)
    return out


def eval_scalar_expr(fn, p, order: int) -> list[np.ndarray]:
    """Evaluate a Jet-arithmetic callable fn(list[Jet]) -> Jet at p."""
    x = seed_coordinates(p, order)
    result = fn(x)
    if isinstance(result, Jet):
        return result.terms
    # Allow plain floats for constant expressions.
    return Jet.constant(float(result), np.asarray(p).size, order).terms


def eval_matrix_expr(fn, p, order: int) -> list[np.ndarray]:
    """Evaluate a Jet-arithmetic callable returning a nested list of Jets."""
    x = seed_coordinates(p, order)
    rows = fn(x)
    d = np.asarray(p).size
    coerced = [
        [e if isinstance(e, Jet) else Jet.constant(float(e), d, order) for e in row]
        for row in rows
    ]
    return stack_jets(coerced)
