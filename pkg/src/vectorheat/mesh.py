"""Manifold triangle meshes with halfedge adjacency and derived geometry.

`SurfaceMesh` validates its input (manifoldness, orientation, degeneracy)
at construction and precomputes everything downstream operators need:
corner angles, areas, barycentric vertex areas, angle-weighted normals and
ordered vertex one-rings. Geometry that must survive isometric deformation
bit-for-bit (angles, areas) is computed from edge lengths only.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .errors import DegenerateFaceError, MeshParseError, NonManifoldError, ValidationError
from .tolerances import DEFAULT_TOL, Tolerances


def _cross(a, b):
    x = a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1]
    y = a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2]
    z = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    return np.stack((x, y, z), axis=-1)


def _heron_area(a, b, c):
    """Numerically stable triangle area from edge lengths (Kahan)."""
    lens = np.sort(np.stack((a, b, c), axis=-1), axis=-1)
    x, y, z = lens[..., 2], lens[..., 1], lens[..., 0]
    term = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z))
    return 0.25 * np.sqrt(np.maximum(term, 0.0))


class SurfaceMesh:
    """An oriented, manifold triangle mesh.

    Parameters
    ----------
    positions : (n, 3) float array of vertex locations.
    faces : (f, 3) int array of counterclockwise vertex triples.
    tol : Tolerances, optional threshold record.

    Raises ValidationError subclasses on out-of-range indices, repeated
    vertices within a face, non-manifold edges/vertices, inconsistent
    orientation, isolated vertices, or degenerate faces.
    """

    def __init__(self, positions, faces, tol: Tolerances = DEFAULT_TOL):
        self.positions = np.ascontiguousarray(positions, dtype=np.float64)
        self.faces = np.ascontiguousarray(faces, dtype=np.int64)
        self.tol = tol
        if self.positions.ndim != 2 or self.positions.shape[1] != 3:
            raise ValidationError(f"positions must be (n, 3), got {self.positions.shape}")
        if self.faces.ndim != 2 or self.faces.shape[1] != 3:
            raise ValidationError(f"faces must be (f, 3), got {self.faces.shape}")
        if not np.isfinite(self.positions).all():
            raise ValidationError("positions contain non-finite values")
        self._validate_indices()
        self._build_geometry()
        self._build_halfedges()
        self._build_fans()

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    def _validate_indices(self):
        n = len(self.positions)
        if self.faces.size and (self.faces.min() < 0 or self.faces.max() >= n):
            bad = np.argwhere((self.faces < 0) | (self.faces >= n))[0]
            raise ValidationError(
                f"face {bad[0]} references vertex {self.faces[bad[0], bad[1]]} "
                f"outside [0, {n})"
            )
        same = (
            (self.faces[:, 0] == self.faces[:, 1])
            | (self.faces[:, 1] == self.faces[:, 2])
            | (self.faces[:, 2] == self.faces[:, 0])
        )
        if same.any():
            raise ValidationError(f"face {np.flatnonzero(same)[0]} repeats a vertex")

    def _build_geometry(self):
        V, F = self.positions, self.faces
        lo, hi = V.min(axis=0), V.max(axis=0)
        self.bbox_diag = float(np.linalg.norm(hi - lo))

        # Edge lengths per corner: edge_lengths[f, c] is the length of the
        # edge opposite corner c. Angles come from the law of cosines so two
        # meshes with equal edge lengths get equal intrinsic data.
        p0, p1, p2 = V[F[:, 0]], V[F[:, 1]], V[F[:, 2]]
        l0 = np.linalg.norm(p2 - p1, axis=1)
        l1 = np.linalg.norm(p0 - p2, axis=1)
        l2 = np.linalg.norm(p1 - p0, axis=1)
        self.edge_lengths = np.stack((l0, l1, l2), axis=1)

        self.face_areas = _heron_area(l0, l1, l2)
        area_eps = self.tol.area_rel_eps * max(self.bbox_diag, 1.0) ** 2
        if len(F) and self.face_areas.min() <= area_eps:
            bad = int(np.argmin(self.face_areas))
            raise DegenerateFaceError(
                f"face {bad} has area {self.face_areas[bad]:.3e} <= {area_eps:.3e}"
            )

        cos0 = (l1**2 + l2**2 - l0**2) / (2.0 * l1 * l2)
        cos1 = (l2**2 + l0**2 - l1**2) / (2.0 * l2 * l0)
        cos2 = (l0**2 + l1**2 - l2**2) / (2.0 * l0 * l1)
        self.corner_angles = np.arccos(np.clip(np.stack((cos0, cos1, cos2), axis=1), -1.0, 1.0))

        raw = _cross(p1 - p0, p2 - p0)
        nrm = np.linalg.norm(raw, axis=1, keepdims=True)
        self.face_normals = raw / np.maximum(nrm, 1e-300)

        n = len(V)
        self.vertex_areas = np.zeros(n)
        np.add.at(self.vertex_areas, F.ravel(), np.repeat(self.face_areas / 3.0, 3))

        weighted = np.zeros((n, 3))
        np.add.at(
            weighted,
            F.ravel(),
            self.corner_angles.ravel()[:, None] * np.repeat(self.face_normals, 3, axis=0),
        )
        vn = np.linalg.norm(weighted, axis=1, keepdims=True)
        self.vertex_normals = weighted / np.maximum(vn, 1e-300)

    def _build_halfedges(self):
        """Directed halfedge h = 3*f + c goes faces[f, c] -> faces[f, (c+1)%3]."""
        F = self.faces
        nh = 3 * len(F)
        self.he_src = F[:, [0, 1, 2]].ravel()
        self.he_dst = F[:, [1, 2, 0]].ravel()
        self.he_face = np.repeat(np.arange(len(F)), 3)

        he_of = {}
        for h in range(nh):
            key = (int(self.he_src[h]), int(self.he_dst[h]))
            if key in he_of:
                raise NonManifoldError(
                    f"directed edge {key[0]}->{key[1]} appears twice "
                    "(non-manifold edge or inconsistent winding)"
                )
            he_of[key] = h
        self.halfedge_index = he_of

        self.he_twin = np.full(nh, -1, dtype=np.int64)
        for (i, j), h in he_of.items():
            t = he_of.get((j, i))
            if t is not None:
                self.he_twin[h] = t

        seen = set()
        edges = []
        for h in range(nh):
            key = (int(self.he_src[h]), int(self.he_dst[h]))
            ek = (min(key), max(key))
            if ek not in seen:
                seen.add(ek)
                edges.append(ek)
        self.edges = np.array(sorted(edges), dtype=np.int64).reshape(-1, 2)

    def _build_fans(self):
        """Ordered one-ring of every vertex.

        fan_neighbors[v] lists neighbor vertices counterclockwise (per face
        orientation). Interior fans are cyclic and start at the lowest-index
        neighbor; boundary fans start at the clockwise-most boundary ray and
        include the trailing boundary neighbor, so a boundary vertex with d
        incident faces has d+1 rays. fan_corner_angles[v][i] is the corner
        angle between ray i and ray i+1.
        """
        n = len(self.positions)
        # Outgoing halfedges per vertex, and within-face "next ray" lookup:
        # from outgoing edge (v -> a) inside face (v, a, b), the next ray
        # counterclockwise is (v -> b) with the corner angle at v between.
        out_map = [dict() for _ in range(n)]  # v -> {a: (b, angle)}
        for f, (a, b, c) in enumerate(self.faces):
            ang = self.corner_angles[f]
            tri = (int(a), int(b), int(c))
            for local, v in enumerate(tri):
                nxt = tri[(local + 1) % 3]
                prv = tri[(local + 2) % 3]
                if nxt in out_map[v]:
                    raise NonManifoldError(
                        f"vertex {v} has duplicate outgoing corner toward {nxt}"
                    )
                out_map[v][nxt] = (prv, float(ang[local]))

        incoming = [set() for _ in range(n)]
        for f, (a, b, c) in enumerate(self.faces):
            incoming[int(b)].add(int(a))
            incoming[int(c)].add(int(b))
            incoming[int(a)].add(int(c))

        fan_neighbors = []
        fan_angles = []
        boundary = np.zeros(n, dtype=bool)
        for v in range(n):
            corners = out_map[v]
            if not corners:
                raise NonManifoldError(f"vertex {v} has no incident faces")
            # Boundary start: an outgoing ray with no face on its clockwise
            # side, i.e. v is never reached *from* that neighbor.
            starts = [a for a in corners if a not in incoming[v]]
            if len(starts) > 1:
                raise NonManifoldError(f"vertex {v} touches more than one boundary fan")
            if starts:
                boundary[v] = True
                cur = starts[0]
            else:
                cur = min(corners)
            rays = [cur]
            angles = []
            for _ in range(len(corners)):
                if cur not in corners:
                    raise NonManifoldError(f"vertex {v} has a broken one-ring fan")
                nxt, ang = corners[cur]
                angles.append(ang)
                cur = nxt
                if not boundary[v] and cur == rays[0]:
                    break
                rays.append(cur)
            if boundary[v]:
                if len(rays) != len(corners) + 1:
                    raise NonManifoldError(f"vertex {v} one-ring is not a single fan")
            else:
                if cur != rays[0] or len(rays) != len(corners):
                    raise NonManifoldError(f"vertex {v} one-ring is not a single fan")
            fan_neighbors.append(np.array(rays, dtype=np.int64))
            fan_angles.append(np.array(angles))

        self.fan_neighbors = fan_neighbors
        self.fan_corner_angles = fan_angles
        self.is_boundary_vertex = boundary

    # ------------------------------------------------------------------
    # derived quantities
    # ------------------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.positions)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    @property
    def total_area(self) -> float:
        return float(self.face_areas.sum())

    def mean_edge_length(self) -> float:
        V, E = self.positions, self.edges
        return float(np.linalg.norm(V[E[:, 1]] - V[E[:, 0]], axis=1).mean())

    def content_hash(self) -> str:
        """Hash of the geometry itself, stable across file round-trips."""
        h = hashlib.sha256()
        h.update(self.positions.astype("<f8").tobytes())
        h.update(self.faces.astype("<i8").tobytes())
        return h.hexdigest()


# ----------------------------------------------------------------------
# OBJ I/O
# ----------------------------------------------------------------------

def load_obj(path, tol: Tolerances = DEFAULT_TOL) -> SurfaceMesh:
    """Parse an ASCII OBJ file into a validated SurfaceMesh.

    Only `v` and `f` records are interpreted; normals, texture coordinates,
    groups and materials are ignored. Face indices are 1-based and must be
    triangles; `f a/b/c` style corners are accepted (the vertex index is
    taken from before the first slash).
    """
    positions = []
    faces = []
    with open(path, "r", encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            tag = parts[0]
            if tag == "v":
                if len(parts) not in (4, 5):
                    raise MeshParseError(f"vertex record needs 3 coordinates: {line!r}", ln)
                try:
                    positions.append([float(x) for x in parts[1:4]])
                except ValueError:
                    raise MeshParseError(f"bad vertex coordinate in {line!r}", ln) from None
            elif tag == "f":
                corners = parts[1:]
                if len(corners) != 3:
                    raise MeshParseError(
                        f"non-triangular face with {len(corners)} corners", ln
                    )
                idx = []
                for c in corners:
                    head = c.split("/")[0]
                    try:
                        k = int(head)
                    except ValueError:
                        raise MeshParseError(f"bad face corner {c!r}", ln) from None
                    if k <= 0:
                        raise MeshParseError(f"face index {k} is not 1-based positive", ln)
                    idx.append(k - 1)
                faces.append(idx)
            # all other record types are ignored
    if not positions:
        raise MeshParseError(f"no vertex records found in {path}")
    if not faces:
        raise MeshParseError(f"no face records found in {path}")
    return SurfaceMesh(np.array(positions), np.array(faces), tol=tol)


def save_obj(mesh: SurfaceMesh, path):
    """Write positions/faces as an ASCII OBJ (17 significant digits)."""
    with open(path, "w", encoding="utf-8") as fh:
        for p in mesh.positions:
            fh.write(f"v {p[0]:.17g} {p[1]:.17g} {p[2]:.17g}\n")
        for f in mesh.faces:
            fh.write(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}\n")
