"""Surface and volume meshes, built-in sphere/ball geometry, and mesh file IO.

File formats
------------
Surface meshes use ASCII OFF restricted to triangles.  Volume meshes use a
sectioned ASCII format, documented in ``docs/volume_mesh_format.md``::

    nodes <N>
    <x> <y> <z>                 (N lines)
    tets <M>
    <i> <j> <k> <l>             (M lines, positive orientation)
    boundary-faces <F>
    <i> <j> <k> <t>             (F lines, node ids and surface triangle id)

All indices are 0-based.  Lines starting with ``#`` are comments.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class MeshValidationError(ValueError):
    """Mesh invariant violation naming the offending element."""

    def __init__(self, kind: str, element: int | None, message: str):
        self.kind = kind
        self.element = element
        where = "" if element is None else f" (element {element})"
        super().__init__(f"{kind}{where}: {message}")


def _edge_key(a, b):
    return (a, b) if a < b else (b, a)


@dataclass
class SurfaceMesh:
    """Closed, consistently oriented triangulation with normals pointing outward.

    Parameters
    ----------
    vertices : ndarray, shape (nv, 3)
    triangles : ndarray, shape (nt, 3)
        Counter-clockwise when seen from the exterior.
    validate : bool
        Check watertightness, orientation and outwardness.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=float)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int64)
        v = self.vertices
        t = self.triangles
        a, b, c = v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]
        cr = np.cross(b - a, c - a)
        dbl = np.linalg.norm(cr, axis=1)
        self.areas = 0.5 * dbl
        with np.errstate(invalid="ignore", divide="ignore"):
            self.normals = cr / dbl[:, None]
        self.centroids = (a + b + c) / 3.0
        self.diameters = np.max(
            np.stack([np.linalg.norm(b - a, axis=1), np.linalg.norm(c - b, axis=1),
                      np.linalg.norm(a - c, axis=1)]), axis=0)
        if self.validate:
            self.check()

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    @property
    def h(self) -> float:
        """Largest panel diameter."""
        return float(self.diameters.max())

    def check(self) -> None:
        t = self.triangles
        nv = self.n_vertices
        if t.ndim != 2 or t.shape[1] != 3:
            raise MeshValidationError("shape", None, "triangles must be an (n, 3) array")
        bad = np.flatnonzero((t < 0).any(axis=1) | (t >= nv).any(axis=1))
        if bad.size:
            raise MeshValidationError("index", int(bad[0]), "vertex index out of range")
        bad = np.flatnonzero(~(self.areas > 1e-14 * max(1.0, self.diameters.max() ** 2)))
        if bad.size:
            raise MeshValidationError("degenerate", int(bad[0]), "triangle has zero area")
        directed = {}
        undirected = {}
        for k, (i, j, l) in enumerate(t):
            for a, b in ((i, j), (j, l), (l, i)):
                if (a, b) in directed:
                    raise MeshValidationError(
                        "orientation", k, f"directed edge ({a},{b}) also used by "
                        f"triangle {directed[(a, b)]}")
                directed[(a, b)] = k
                undirected.setdefault(_edge_key(a, b), []).append(k)
        for e, owners in undirected.items():
            if len(owners) != 2:
                raise MeshValidationError(
                    "watertight", owners[0], f"edge {e} shared by {len(owners)} triangles")
        vol = self.enclosed_volume()
        if not vol > 0:
            raise MeshValidationError("normals", None, f"normals point inward (volume {vol:.3e})")

    def enclosed_volume(self) -> float:
        """Volume from the divergence theorem, sum of (x̄·n) area / 3."""
        return float(np.sum(np.einsum("ij,ij->i", self.centroids, self.normals) * self.areas) / 3.0)

    def edges(self) -> np.ndarray:
        t = self.triangles
        e = np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
        return np.unique(e, axis=0)

    def content_hash(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.vertices, dtype="<f8").tobytes())
        h.update(np.ascontiguousarray(self.triangles, dtype="<i8").tobytes())
        return h.hexdigest()[:16]


@dataclass
class VolumeMesh:
    """Tetrahedral mesh of the interior with its boundary linked to a surface mesh.

    Parameters
    ----------
    vertices : ndarray, shape (n, 3)
    tets : ndarray, shape (m, 4)
        Positively oriented tetrahedra.
    boundary_faces : ndarray, shape (f, 3)
        Node triples of the faces on the boundary.
    boundary_map : ndarray, shape (f,)
        Surface triangle matched by each boundary face.
    surface : SurfaceMesh, optional
        Surface whose triangles the boundary faces must reproduce.  Built from
        the boundary faces when omitted.
    """

    vertices: np.ndarray
    tets: np.ndarray
    boundary_faces: np.ndarray
    boundary_map: np.ndarray
    surface: SurfaceMesh | None = None

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=float)
        self.tets = np.ascontiguousarray(self.tets, dtype=np.int64)
        self.boundary_faces = np.ascontiguousarray(self.boundary_faces, dtype=np.int64)
        self.boundary_map = np.ascontiguousarray(self.boundary_map, dtype=np.int64)
        self._check_tets()
        if self.surface is None:
            self.surface = self._surface_from_faces()
        self.node_of_vertex = self._match_surface()

    @property
    def n_nodes(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_tets(self) -> int:
        return self.tets.shape[0]

    def signed_volumes(self) -> np.ndarray:
        p = self.vertices[self.tets]
        d = p[:, 1:] - p[:, :1]
        return np.linalg.det(d) / 6.0

    def _check_tets(self):
        t = self.tets
        n = self.n_nodes
        if t.ndim != 2 or t.shape[1] != 4:
            raise MeshValidationError("shape", None, "tets must be an (m, 4) array")
        bad = np.flatnonzero((t < 0).any(axis=1) | (t >= n).any(axis=1))
        if bad.size:
            raise MeshValidationError("index", int(bad[0]), "node index out of range")
        vol = self.signed_volumes()
        scale = np.abs(vol).max() if vol.size else 1.0
        bad = np.flatnonzero(~(vol > 1e-12 * scale))
        if bad.size:
            raise MeshValidationError("inverted", int(bad[0]),
                                      f"tetrahedron has nonpositive volume {vol[bad[0]]:.3e}")
        faces = np.concatenate([t[:, [1, 2, 3]], t[:, [0, 3, 2]], t[:, [0, 1, 3]], t[:, [0, 2, 1]]])
        key = np.sort(faces, axis=1)
        uniq, inv, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
        if np.any(counts > 2):
            k = int(np.flatnonzero(counts[inv.ravel()] > 2)[0] % t.shape[0])
            raise MeshValidationError("nonmanifold", k, "face shared by more than two tetrahedra")
        free = {tuple(r) for r in uniq[counts == 1]}
        listed = {tuple(r) for r in np.sort(self.boundary_faces, axis=1)}
        if free != listed:
            missing = sorted(free - listed)
            extra = sorted(listed - free)
            msg = f"{len(missing)} uncovered boundary faces, {len(extra)} listed faces not on the boundary"
            elem = None
            if extra:
                elem = int(np.flatnonzero(
                    (np.sort(self.boundary_faces, axis=1) == np.array(extra[0])).all(axis=1))[0])
            raise MeshValidationError("boundary", elem, msg)
        # boundary faces must be oriented outward, i.e. opposite to the interior tet face
        oriented = {tuple(np.roll(f, -int(np.argmin(f)))) for f in faces[counts[inv.ravel()] == 1]}
        for k, f in enumerate(self.boundary_faces):
            if tuple(np.roll(f, -int(np.argmin(f)))) not in oriented:
                raise MeshValidationError("boundary", k, "boundary face orientation is not outward")

    def _surface_from_faces(self) -> SurfaceMesh:
        nodes = np.unique(self.boundary_faces)
        local = -np.ones(self.n_nodes, dtype=np.int64)
        local[nodes] = np.arange(nodes.size)
        tris = np.empty((self.boundary_faces.shape[0], 3), dtype=np.int64)
        if np.sort(self.boundary_map).tolist() != list(range(self.boundary_faces.shape[0])):
            raise MeshValidationError("boundary", None, "boundary map is not a permutation")
        tris[self.boundary_map] = local[self.boundary_faces]
        return SurfaceMesh(self.vertices[nodes], tris)

    def _match_surface(self) -> np.ndarray:
        surf = self.surface
        nb = self.boundary_faces.shape[0]
        if nb != surf.n_triangles:
            raise MeshValidationError("trace", None,
                                      f"{nb} boundary faces but {surf.n_triangles} surface triangles")
        if np.sort(self.boundary_map).tolist() != list(range(nb)):
            raise MeshValidationError("trace", None, "boundary map is not a permutation")
        node_of_vertex = -np.ones(surf.n_vertices, dtype=np.int64)
        for k, (face, tri) in enumerate(zip(self.boundary_faces, self.boundary_map)):
            for nd, vx in zip(face, surf.triangles[tri]):
                if node_of_vertex[vx] == -1:
                    node_of_vertex[vx] = nd
                elif node_of_vertex[vx] != nd:
                    raise MeshValidationError("trace", k, "face does not match its surface triangle")
        if np.any(node_of_vertex < 0):
            raise MeshValidationError("trace", None, "surface vertex without a volume node")
        gap = np.abs(self.vertices[node_of_vertex] - surf.vertices).max()
        if gap > 1e-12 * max(1.0, np.abs(surf.vertices).max()):
            raise MeshValidationError("trace", None, f"node coordinates differ by {gap:.3e}")
        return node_of_vertex

    def volume(self) -> float:
        return float(self.signed_volumes().sum())


_ICO_FACES = np.array([
    [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
    [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
    [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
    [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
])


def _icosahedron():
    p = (1.0 + np.sqrt(5.0)) / 2.0
    v = np.array([
        [-1, p, 0], [1, p, 0], [-1, -p, 0], [1, -p, 0],
        [0, -1, p], [0, 1, p], [0, -1, -p], [0, 1, -p],
        [p, 0, -1], [p, 0, 1], [-p, 0, -1], [-p, 0, 1],
    ], dtype=float)
    return v / np.linalg.norm(v, axis=1, keepdims=True), _ICO_FACES.copy()


def _subdivide(v, t):
    verts = list(v)
    mid = {}

    def midpoint(a, b):
        key = _edge_key(a, b)
        if key not in mid:
            m = 0.5 * (verts[a] + verts[b])
            verts.append(m / np.linalg.norm(m))
            mid[key] = len(verts) - 1
        return mid[key]

    out = []
    for a, b, c in t:
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        out += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
    return np.array(verts), np.array(out)


def icosphere(level: int = 1, radius: float = 1.0, center=(0.0, 0.0, 0.0)) -> SurfaceMesh:
    """Subdivided icosahedron projected to a sphere.

    Level ``l`` has ``20 * 4**l`` triangles and ``10 * 4**l + 2`` vertices.
    """
    if level < 0:
        raise ValueError("level must be nonnegative")
    v, t = _icosahedron()
    for _ in range(level):
        v, t = _subdivide(v, t)
    return SurfaceMesh(radius * v + np.asarray(center, dtype=float), t)


def ball_mesh(level: int = 1, radius: float = 1.0, n_shells: int | None = None) -> VolumeMesh:
    """Tetrahedral mesh of the ball whose boundary is ``icosphere(level, radius)``.

    The ball is layered into concentric copies of the surface triangulation.
    Each prism between two shells is split into three tetrahedra with a
    diagonal rule that depends only on vertex ids, so neighbouring prisms
    agree on their shared quadrilateral faces.  The innermost shell is joined
    to the centre by a cone of tetrahedra.  Surface vertices come first in the
    node numbering, so the trace map is the identity on the leading nodes.
    """
    surf = icosphere(level, radius)
    nv = surf.n_vertices
    if n_shells is None:
        n_shells = level + 1
    radii = radius * (n_shells - np.arange(n_shells)) / n_shells
    unit = surf.vertices / radius
    nodes = [r * unit for r in radii] + [np.zeros((1, 3))]
    vertices = np.concatenate(nodes)
    center = n_shells * nv
    tets = []
    for k in range(n_shells - 1):
        for tri in surf.triangles:
            v0, v1, v2 = sorted(int(i) for i in tri)
            o = [v0 + k * nv, v1 + k * nv, v2 + k * nv]
            i = [v0 + (k + 1) * nv, v1 + (k + 1) * nv, v2 + (k + 1) * nv]
            tets += [[o[0], o[1], o[2], i[0]], [o[1], o[2], i[0], i[1]], [o[2], i[0], i[1], i[2]]]
    base = (n_shells - 1) * nv
    for a, b, c in surf.triangles:
        tets.append([center, a + base, b + base, c + base])
    tets = np.array(tets, dtype=np.int64)
    p = vertices[tets]
    neg = np.linalg.det(p[:, 1:] - p[:, :1]) < 0
    tets[neg, 2], tets[neg, 3] = tets[neg, 3].copy(), tets[neg, 2].copy()
    return VolumeMesh(vertices, tets, surf.triangles.copy(), np.arange(surf.n_triangles), surf)


def _data_lines(path):
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                yield line


def load_surface_mesh(path) -> SurfaceMesh:
    lines = _data_lines(path)
    head = next(lines)
    if head.upper() != "OFF":
        raise MeshValidationError("format", None, f"expected OFF header, got {head!r}")
    nv, nf = (int(x) for x in next(lines).split()[:2])
    verts = np.array([[float(x) for x in next(lines).split()[:3]] for _ in range(nv)])
    tris = []
    for k in range(nf):
        parts = next(lines).split()
        if int(parts[0]) != 3:
            raise MeshValidationError("format", k, "only triangular faces are supported")
        tris.append([int(x) for x in parts[1:4]])
    return SurfaceMesh(verts.reshape(nv, 3), np.array(tris, dtype=np.int64).reshape(nf, 3))


def save_surface_mesh(mesh: SurfaceMesh, path) -> None:
    with open(path, "w") as fh:
        fh.write("OFF\n")
        fh.write(f"{mesh.n_vertices} {mesh.n_triangles} 0\n")
        for x in mesh.vertices:
            fh.write(f"{x[0]:.17g} {x[1]:.17g} {x[2]:.17g}\n")
        for t in mesh.triangles:
            fh.write(f"3 {t[0]} {t[1]} {t[2]}\n")


def load_volume_mesh(path, surface: SurfaceMesh | None = None) -> VolumeMesh:
    lines = list(_data_lines(path))
    sections = {}
    pos = 0
    while pos < len(lines):
        parts = lines[pos].split()
        name = parts[0].lower()
        if name not in ("nodes", "tets", "boundary-faces") or len(parts) != 2:
            raise MeshValidationError("format", None, f"unexpected line {lines[pos]!r}")
        count = int(parts[1])
        rows = lines[pos + 1: pos + 1 + count]
        if len(rows) != count:
            raise MeshValidationError("format", None, f"section {name} is truncated")
        sections[name] = rows
        pos += 1 + count
    for name in ("nodes", "tets", "boundary-faces"):
        if name not in sections:
            raise MeshValidationError("format", None, f"missing section {name!r}")
    nodes = np.array([[float(x) for x in r.split()] for r in sections["nodes"]]).reshape(-1, 3)
    tets = np.array([[int(x) for x in r.split()] for r in sections["tets"]], dtype=np.int64).reshape(-1, 4)
    bf = np.array([[int(x) for x in r.split()] for r in sections["boundary-faces"]],
                  dtype=np.int64).reshape(-1, 4)
    return VolumeMesh(nodes, tets, bf[:, :3], bf[:, 3], surface)


def save_volume_mesh(mesh: VolumeMesh, path) -> None:
    with open(path, "w") as fh:
        fh.write("# elastocq volume mesh, 0-based indices\n")
        fh.write(f"nodes {mesh.n_nodes}\n")
        for x in mesh.vertices:
            fh.write(f"{x[0]:.17g} {x[1]:.17g} {x[2]:.17g}\n")
        fh.write(f"tets {mesh.n_tets}\n")
        for t in mesh.tets:
            fh.write(f"{t[0]} {t[1]} {t[2]} {t[3]}\n")
        fh.write(f"boundary-faces {mesh.boundary_faces.shape[0]}\n")
        for f, k in zip(mesh.boundary_faces, mesh.boundary_map):
            fh.write(f"{f[0]} {f[1]} {f[2]} {k}\n")
