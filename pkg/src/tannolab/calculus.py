"""Chart-local tensor calculus: covariant derivatives, index moves, residuals.

Index conventions used throughout the package:

* the complex structure is stored as the matrix ``Jm[i, j] = J^i_j``, so
  ``(J v)^i = Jm @ v`` and the bar of a covector is ``Jm.T @ w``;
* Christoffel arrays are ``G[k, i, j] = Gamma^k_ij``;
* the covariant Hessian array is ``H[i, j] = f_{,ij}`` and the third
  derivative array is ``T[i, j, k] = (f_{,ij})_{;k}``, symmetric in (i, j).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charts import KahlerChart
from .errors import SingularMetric
from .fields import MatrixField, ScalarField


@dataclass(frozen=True)
class TensorValue:
    """Component array of a tensor at a point plus its index valence.

    valence entries are 'u' (upper) or 'l' (lower), one per array axis.
    """

    components: np.ndarray
    valence: tuple[str, ...]

    def __post_init__(self):
        comp = np.asarray(self.components, dtype=float)
        object.__setattr__(self, "components", comp)
        if comp.ndim != len(self.valence):
            raise ValueError("valence length must equal tensor rank")

    @property
    def rank(self) -> int:
        return len(self.valence)

    def norm(self) -> float:
        return float(np.linalg.norm(self.components.ravel()))


def frob(a) -> float:
    return float(np.linalg.norm(np.asarray(a).ravel()))


# ---------------------------------------------------------------------------
# Christoffel symbols and covariant derivatives of scalars
# ---------------------------------------------------------------------------

def christoffel(chart: KahlerChart, p) -> TensorValue:
    """Levi-Civita connection coefficients Gamma^k_ij at p."""
    p = chart.require_inside(p)
    G = chart.christoffel_jets(p, 0)[0]
    return TensorValue(G, ("u", "l", "l"))


def scalar_covariant_jets(chart: KahlerChart, f: ScalarField, p, order: int):
    """(f, f_{,i}, f_{,ij}, f_{,ijk}) up to the requested order (1..3)."""
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    p = chart.require_inside(p)
    fj = f.jets(p, order)
    out = [float(fj[0]), np.array(fj[1])]
    if order >= 2:
        Gj = chart.christoffel_jets(p, 1 if order == 3 else 0)
        G0 = Gj[0]
        H = fj[2] - np.einsum("kij,k->ij", G0, fj[1])
        out.append(H)
    if order == 3:
        dG = Gj[1]
        dH = (fj[3]
              - np.einsum("lijk,l->ijk", dG, fj[1])
              - np.einsum("lij,lk->ijk", G0, fj[2]))
        T = (dH
             - np.einsum("mki,mj->ijk", G0, H)
             - np.einsum("mkj,im->ijk", G0, H))
        out.append(T)
    return out


def nabla_scalar(chart: KahlerChart, f: ScalarField, p, order: int) -> TensorValue:
    """Covariant derivative of a scalar: f_{,i}, f_{,ij} or f_{,ijk}."""
    jets = scalar_covariant_jets(chart, f, p, order)
    return TensorValue(jets[order], ("l",) * order)


def laplacian(chart: KahlerChart, f: ScalarField, p) -> float:
    """g^{ij} f_{,ij} (trace of the raised covariant Hessian)."""
    p = chart.require_inside(p)
    H = scalar_covariant_jets(chart, f, p, 2)[2]
    ginv = chart.metric_inv_jets(p, 0)[0]
    return float(np.einsum("ij,ij->", ginv, H))


def nabla_cotensor2(chart: KahlerChart, a: MatrixField, p) -> TensorValue:
    """First covariant derivative a_{ij,k} of a symmetric (0,2)-tensor field."""
    p = chart.require_inside(p)
    aj = a.jets(p, 1)
    G0 = chart.christoffel_jets(p, 0)[0]
    C = (aj[1]
         - np.einsum("lki,lj->ijk", G0, aj[0])
         - np.einsum("lkj,il->ijk", G0, aj[0]))
    return TensorValue(C, ("l", "l", "l"))


# ---------------------------------------------------------------------------
# Index gymnastics and the Kahler structure
# ---------------------------------------------------------------------------

def raise_lower(chart: KahlerChart, t: TensorValue, p, slot: int,
                direction: str) -> TensorValue:
    """Move one index with the metric: direction 'up' or 'down'."""
    p = chart.require_inside(p)
    if not 0 <= slot < t.rank:
        raise ValueError(f"slot {slot} out of range for rank-{t.rank} tensor")
    want_from = "l" if direction == "up" else "u"
    if direction not in ("up", "down"):
        raise ValueError("direction must be 'up' or 'down'")
    if t.valence[slot] != want_from:
        raise ValueError(
            f"slot {slot} has valence '{t.valence[slot]}', cannot move {direction}")
    g0 = chart.metric_jets(p, 0)[0]
    moved = np.moveaxis(t.components, slot, 0)
    if direction == "up":
        if abs(np.linalg.det(g0)) < 1e-12:
            raise SingularMetric("metric numerically singular")
        flat = moved.reshape(moved.shape[0], -1)
        new = np.linalg.solve(g0, flat).reshape(moved.shape)
    else:
        new = np.einsum("ia,a...->i...", g0, moved)
    new = np.moveaxis(new, 0, slot)
    valence = list(t.valence)
    valence[slot] = "u" if direction == "up" else "l"
    return TensorValue(new, tuple(valence))


def bar_form(chart: KahlerChart, omega, p) -> TensorValue:
    """bar(w)_i = J^a_i w_a for a covector w."""
    p = chart.require_inside(p)
    if isinstance(omega, TensorValue):
        if omega.valence != ("l",):
            raise ValueError("bar_form expects a rank-1 lower-index tensor")
        w = omega.components
    else:
        w = np.asarray(omega, dtype=float)
    Jm = chart.jstruct_jets(p, 0)[0]
    return TensorValue(Jm.T @ w, ("l",))


def kahler_form(chart: KahlerChart, p) -> TensorValue:
    """J_ij = g_ia J^a_j, the Kahlerian 2-form."""
    p = chart.require_inside(p)
    g0 = chart.metric_jets(p, 0)[0]
    Jm = chart.jstruct_jets(p, 0)[0]
    return TensorValue(g0 @ Jm, ("l", "l"))


def nabla_jstruct(chart: KahlerChart, p) -> np.ndarray:
    """Covariant derivative (nabla_k J)^i_j, array axes [i, j, k]."""
    p = chart.require_inside(p)
    Jj = chart.jstruct_jets(p, 1)
    G0 = chart.christoffel_jets(p, 0)[0]
    return (Jj[1]
            + np.einsum("ikl,lj->ijk", G0, Jj[0])
            - np.einsum("lkj,il->ijk", G0, Jj[0]))


def kahler_residuals(chart: KahlerChart, p) -> tuple[float, float, float]:
    """(|J^2 + Id|, |J^T g J - g|, |nabla J|) in Frobenius norm."""
    p = chart.require_inside(p)
    g0 = chart.metric_jets(p, 0)[0]
    Jm = chart.jstruct_jets(p, 0)[0]
    r_sq = frob(Jm @ Jm + np.eye(chart.dim))
    r_compat = frob(Jm.T @ g0 @ Jm - g0)
    r_par = frob(nabla_jstruct(chart, p))
    return r_sq, r_compat, r_par
