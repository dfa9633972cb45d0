"""Quadrature rules for triangles, tetrahedra and singular Galerkin panel pairs.

Reference triangle: ``{(u, v) : u, v >= 0, u + v <= 1}`` (area 1/2), mapped to a
panel ``(a, b, c)`` by ``a + u (b - a) + v (c - a)``.  Barycentric coordinates
are ``(1 - u - v, u, v)``.

Singular pairs use the Sauter-Schwab transformations of the 4D integral over
two reference triangles.  They are written for the reference element
``{0 <= x2 <= x1 <= 1}`` with map ``P0 + x1 (P1 - P0) + x2 (P2 - P1)`` and
converted here by ``u = x1 - x2, v = x2``.  Conventions for the local vertex
order of the two panels:

* coincident: the same order on both panels;
* shared edge: ``P0, P1`` are the shared vertices, in the same order on both;
* shared vertex: ``P0`` is the shared vertex on both.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

COINCIDENT, EDGE, VERTEX, DISJOINT = "coincident", "shared-edge", "shared-vertex", "disjoint"
PAIR_CLASSES = (COINCIDENT, EDGE, VERTEX, DISJOINT)


class QuadratureError(ValueError):
    """Unsupported rule request."""


@dataclass(frozen=True)
class TriangleRule:
    """Symmetric triangle rule: barycentric points and weights summing to 1/2."""

    points: np.ndarray
    weights: np.ndarray
    order: int

    @property
    def uv(self) -> np.ndarray:
        return self.points[:, 1:]

    def __len__(self):
        return self.weights.size


def _orbit(kind, *params):
    if kind == "S3":
        return [(1 / 3, 1 / 3, 1 / 3)]
    if kind == "S21":
        a = params[0]
        b = 1.0 - 2.0 * a
        return [(a, a, b), (a, b, a), (b, a, a)]
    a, b = params
    c = 1.0 - a - b
    return [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]


# (degree, [(weight, orbit kind, params...)]) with weights normalized to sum 1
_DUNAVANT = {
    1: [(1.0, "S3")],
    2: [(1 / 3, "S21", 1 / 6)],
    4: [(0.223381589678011, "S21", 0.445948490915965),
        (0.109951743655322, "S21", 0.091576213509771)],
    5: [(0.225, "S3"),
        (0.132394152788506, "S21", 0.470142064105115),
        (0.125939180544827, "S21", 0.101286507323456)],
    6: [(0.116786275726379, "S21", 0.249286745170910),
        (0.050844906370207, "S21", 0.063089014491502),
        (0.082851075618374, "S111", 0.053145049844817, 0.310352451033784)],
    8: [(0.144315607677787, "S3"),
        (0.095091634267285, "S21", 0.459292588292723),
        (0.103217370534718, "S21", 0.170569307751760),
        (0.032458497623198, "S21", 0.050547228317031),
        (0.027230314174435, "S111", 0.008394777409958, 0.263112829634638)],
}
_UPGRADE = {1: 1, 2: 2, 3: 4, 4: 4, 5: 5, 6: 6, 7: 8, 8: 8}


@lru_cache(maxsize=None)
def gauss_triangle(order: int) -> TriangleRule:
    """Symmetric rule with positive weights, exact for polynomials of degree ``order``."""
    if order < 1 or order not in _UPGRADE:
        raise QuadratureError(f"unsupported triangle rule order {order}")
    degree = _UPGRADE[order]
    pts, wts = [], []
    for w, kind, *params in _DUNAVANT[degree]:
        orb = _orbit(kind, *params)
        pts += orb
        wts += [w] * len(orb)
    pts = np.array(pts)
    wts = np.array(wts)
    wts = 0.5 * wts / wts.sum()
    return TriangleRule(pts, wts, degree)


def _gauss_jacobi01(n, alpha):
    """Gauss rule on [0, 1] for the weight ``(1 - t)**alpha``."""
    if alpha == 0:
        x, w = roots_legendre(n)
    else:
        x, w = roots_jacobi(n, alpha, 0.0)
    return 0.5 * (x + 1.0), w / 2.0 ** (alpha + 1)


def gauss_legendre01(n: int):
    x, w = roots_legendre(n)
    return 0.5 * (x + 1.0), 0.5 * w


@dataclass(frozen=True)
class TetRule:
    """Tetrahedron rule on ``{x, y, z >= 0, x + y + z <= 1}`` (volume 1/6)."""

    points: np.ndarray   # barycentric, shape (n, 4)
    weights: np.ndarray
    order: int


@lru_cache(maxsize=None)
def gauss_tet(order: int) -> TetRule:
    """Tetrahedron rule exact to degree ``order`` with positive weights."""
    if order < 1:
        raise QuadratureError(f"unsupported tetrahedron rule order {order}")
    if order == 1:
        xyz = np.full((1, 3), 0.25)
        w = np.array([1.0 / 6.0])
    elif order == 2:
        a, b = 0.1381966011250105, 0.5854101966249685
        bary = np.array([[b, a, a, a], [a, b, a, a], [a, a, b, a], [a, a, a, b]])
        return TetRule(bary, np.full(4, 1.0 / 24.0), 2)
    else:
        n = (order + 2) // 2
        u, wu = _gauss_jacobi01(n, 2)
        v, wv = _gauss_jacobi01(n, 1)
        t, wt = _gauss_jacobi01(n, 0)
        U, V, T = np.meshgrid(u, v, t, indexing="ij")
        W = (wu[:, None, None] * wv[None, :, None] * wt[None, None, :]).ravel()
        x = U.ravel()
        y = (V * (1 - U)).ravel()
        z = (T * (1 - U) * (1 - V)).ravel()
        xyz = np.stack([x, y, z], axis=1)
        w = W
    bary = np.column_stack([1.0 - xyz.sum(axis=1), xyz])
    return TetRule(bary, w, order)


@dataclass(frozen=True)
class SingularPairRule:
    """4D rule on the product of two reference triangles.

    ``x_uv`` and ``y_uv`` are reference coordinates on the test and trial
    panels; the weights integrate over ``T_ref x T_ref`` (total 1/4).
    """

    pair_class: str
    x_uv: np.ndarray
    y_uv: np.ndarray
    weights: np.ndarray
    order: int

    def __len__(self):
        return self.weights.size


def _to_uv(x1, x2):
    return np.stack([x1 - x2, x2], axis=-1)


@lru_cache(maxsize=None)
def singular_pair_rule(pair_class: str, order: int = 4) -> SingularPairRule:
    """Regularizing tensor rule for a pair of panels of the given adjacency class.

    ``order`` Gauss-Legendre points are used per coordinate of ``[0, 1]^4``;
    disjoint pairs get the tensor product of two triangle rules of degree
    ``order``.
    """
    if pair_class == DISJOINT:
        r = gauss_triangle(order)
        n = len(r)
        xi = np.repeat(np.arange(n), n)
        yi = np.tile(np.arange(n), n)
        return SingularPairRule(DISJOINT, r.uv[xi], r.uv[yi], r.weights[xi] * r.weights[yi], order)
    if pair_class not in PAIR_CLASSES:
        raise QuadratureError(f"unsupported pair class {pair_class!r}")
    if order < 1:
        raise QuadratureError(f"unsupported singular rule order {order}")
    t, w = gauss_legendre01(order)
    g = np.meshgrid(t, t, t, t, indexing="ij")
    xi, e1, e2, e3 = (a.ravel() for a in g)
    W = np.einsum("a,b,c,d->abcd", w, w, w, w).ravel()
    xs, ys, ws = [], [], []
    if pair_class == COINCIDENT:
        jac = xi ** 3 * e1 ** 2 * e2
        maps = [
            ((xi, xi * (1 - e1 + e1 * e2)), (xi * (1 - e1 * e2 * e3), xi * (1 - e1))),
            ((xi * (1 - e1 * e2 * e3), xi * (1 - e1)), (xi, xi * (1 - e1 + e1 * e2))),
            ((xi, xi * e1 * (1 - e2 + e2 * e3)), (xi * (1 - e1 * e2), xi * e1 * (1 - e2))),
            ((xi * (1 - e1 * e2), xi * e1 * (1 - e2)), (xi, xi * e1 * (1 - e2 + e2 * e3))),
            ((xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3)), (xi, xi * e1 * (1 - e2))),
            ((xi, xi * e1 * (1 - e2)), (xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3))),
        ]
        jacs = [jac] * 6
    elif pair_class == EDGE:
        maps = [
            ((xi, xi * e1 * e3), (xi * (1 - e1 * e2), xi * e1 * (1 - e2))),
            ((xi, xi * e1), (xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3))),
            ((xi * (1 - e1 * e2), xi * e1 * (1 - e2)), (xi, xi * e1 * e2 * e3)),
            ((xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3)), (xi, xi * e1)),
            ((xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3)), (xi, xi * e1 * e2)),
        ]
        jacs = [xi ** 3 * e1 ** 2] + [xi ** 3 * e1 ** 2 * e2] * 4
    else:
        maps = [
            ((xi, xi * e1), (xi * e2, xi * e2 * e3)),
            ((xi * e2, xi * e2 * e3), (xi, xi * e1)),
        ]
        jacs = [xi ** 3 * e2] * 2
    for (xa, xb), (ya, yb) in maps:
        xs.append(_to_uv(xa, xb))
        ys.append(_to_uv(ya, yb))
    for j in jacs:
        ws.append(W * j)
    return SingularPairRule(pair_class, np.concatenate(xs), np.concatenate(ys),
                            np.concatenate(ws), order)


def classify_pairs(triangles: np.ndarray) -> np.ndarray:
    """Number of shared vertices for every panel pair, from indices only.

    Returns an integer matrix ``c`` with ``c[i, j]`` in {0, 1, 2, 3}.
    """
    triangles = np.asarray(triangles)
    nt = triangles.shape[0]
    nv = int(triangles.max()) + 1
    inc = np.zeros((nt, nv), dtype=np.int32)
    np.put_along_axis(inc, triangles, 1, axis=1)
    return inc @ inc.T


def class_name(shared: int) -> str:
    return {3: COINCIDENT, 2: EDGE, 1: VERTEX, 0: DISJOINT}[int(shared)]


def local_orders(tri_x: np.ndarray, tri_y: np.ndarray):
    """Local vertex permutations putting shared vertices first.

    Returns ``(perm_x, perm_y)``: ``perm[k]`` is the position in the panel's
    own vertex list of local reference vertex ``P_k``.
    """
    tx = [int(v) for v in tri_x]
    ty = [int(v) for v in tri_y]
    shared = [v for v in tx if v in ty]
    if len(shared) == 3:
        return (0, 1, 2), tuple(ty.index(v) for v in tx)
    if len(shared) == 2:
        a, b = shared
        cx = next(v for v in tx if v not in shared)
        cy = next(v for v in ty if v not in shared)
        return (tx.index(a), tx.index(b), tx.index(cx)), (ty.index(a), ty.index(b), ty.index(cy))
    if len(shared) == 1:
        a = shared[0]
        ox = [v for v in tx if v != a]
        oy = [v for v in ty if v != a]
        return ((tx.index(a), tx.index(ox[0]), tx.index(ox[1])),
                (ty.index(a), ty.index(oy[0]), ty.index(oy[1])))
    return (0, 1, 2), (0, 1, 2)


def barycentric_in_panel(uv: np.ndarray, perm) -> np.ndarray:
    """Barycentric coordinates in the panel's own vertex order.

    ``uv`` are reference coordinates for the local order ``perm``.
    """
    lam_local = np.column_stack([1.0 - uv[:, 0] - uv[:, 1], uv[:, 0], uv[:, 1]])
    out = np.empty_like(lam_local)
    out[:, list(perm)] = lam_local
    return out
