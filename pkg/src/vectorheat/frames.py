"""Per-vertex tangent frames and parallel transport along edges.

A tangent vector at vertex i is stored as a complex coefficient z in the
frame (e0_i, e1_i): the embedded vector is Re(z) e0 + Im(z) e1. Angular
coordinates of the outgoing edges are intrinsic: cumulative corner angles
around the one-ring rescaled so the full ring spans 2*pi (pi for boundary
half-disks). Transport r_ij is the unit complex rotation that re-expresses
a coefficient from the frame at i in the frame at j so the shared edge is
seen consistently from both sides.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .mesh import SurfaceMesh, _cross
from .tolerances import DEFAULT_TOL


class IntrinsicFrame:
    """Tangent bases, normalized edge angles and transport for one mesh.

    Attributes
    ----------
    e0, e1 : (n, 3) orthonormal tangent bases, e1 = normal x e0.
    total_angle : (n,) sum of incident corner angles.
    ray_angles : list of per-vertex arrays aligned with mesh.fan_neighbors,
        giving the normalized angular coordinate of each outgoing ray.
    transport : list of per-vertex arrays, transport[i][s] carries a
        coefficient from the frame at i into the frame at fan_neighbors[i][s].
    he_angle, he_transport : the same data flattened per directed halfedge
        (h = 3*face + corner) for vectorized assembly.
    """

    def __init__(self, mesh: SurfaceMesh, e0, e1, total_angle, ray_angles):
        self.mesh = mesh
        self.e0 = e0
        self.e1 = e1
        self.total_angle = total_angle
        self.ray_angles = ray_angles
        self._slot = {}
        for v, ring in enumerate(mesh.fan_neighbors):
            for s, j in enumerate(ring):
                self._slot[(v, int(j))] = s
        self._build_transport()

    def _build_transport(self):
        mesh = self.mesh
        self.transport = []
        for v, ring in enumerate(mesh.fan_neighbors):
            ang_here = self.ray_angles[v]
            ang_back = np.array(
                [self.ray_angles[int(j)][self._slot[(int(j), v)]] for j in ring]
            )
            self.transport.append(np.exp(1j * (ang_back + np.pi - ang_here)))

        nh = len(mesh.he_src)
        self.he_angle = np.empty(nh)
        self.he_transport = np.empty(nh, dtype=np.complex128)
        for h in range(nh):
            i, j = int(mesh.he_src[h]), int(mesh.he_dst[h])
            s = self._slot[(i, j)]
            self.he_angle[h] = self.ray_angles[i][s]
            self.he_transport[h] = self.transport[i][s]

    def angle_of(self, i: int, j: int) -> float:
        """Normalized angular coordinate of the ray i -> j in frame i."""
        s = self._slot.get((int(i), int(j)))
        if s is None:
            raise ValidationError(f"vertices {i} and {j} are not adjacent")
        return float(self.ray_angles[int(i)][s])

    def transport_to(self, i: int, j: int) -> complex:
        """Rotation carrying a coefficient from frame i into frame j."""
        s = self._slot.get((int(i), int(j)))
        if s is None:
            raise ValidationError(f"vertices {i} and {j} are not adjacent")
        return complex(self.transport[int(i)][s])

    def embed(self, coeffs) -> np.ndarray:
        """Map per-vertex complex coefficients to embedded 3D vectors."""
        z = np.asarray(coeffs)
        return z.real[..., None] * self.e0 + z.imag[..., None] * self.e1

    def project(self, vectors) -> np.ndarray:
        """Complex coefficients of embedded 3D vectors (tangential part)."""
        v = np.asarray(vectors, dtype=np.float64)
        return np.einsum("...k,...k->...", v, self.e0) + 1j * np.einsum(
            "...k,...k->...", v, self.e1
        )


def build_frames(mesh: SurfaceMesh, basis_offsets=None) -> IntrinsicFrame:
    """Deterministic intrinsic frames for every vertex.

    The angular coordinate of the first fan ray is 0 and e0 is that ray's
    tangent-plane projection, so frames are reproducible bit-for-bit.
    `basis_offsets` (radians, per vertex) rotates each frame in its tangent
    plane: e0 turns by +phi while all angular coordinates shift by -phi,
    which re-expresses the same geometry in rotated bases.
    """
    tol = mesh.tol if mesh.tol is not None else DEFAULT_TOL
    n = mesh.n_vertices
    if basis_offsets is None:
        offsets = np.zeros(n)
    else:
        offsets = np.asarray(basis_offsets, dtype=np.float64)
        if offsets.shape != (n,):
            raise ValidationError(f"basis_offsets must be ({n},), got {offsets.shape}")

    total_angle = np.array([a.sum() for a in mesh.fan_corner_angles])
    ray_angles = []
    for v in range(n):
        angles = mesh.fan_corner_angles[v]
        rays = mesh.fan_neighbors[v]
        cum = np.concatenate(([0.0], np.cumsum(angles)))
        if mesh.is_boundary_vertex[v]:
            scale = np.pi / total_angle[v]
            theta = cum * scale
        else:
            scale = 2.0 * np.pi / total_angle[v]
            theta = cum[: len(rays)] * scale
        theta = np.mod(theta - offsets[v], 2.0 * np.pi)
        ray_angles.append(theta)

    e0 = np.empty((n, 3))
    e1 = np.empty((n, 3))
    pos, nrm = mesh.positions, mesh.vertex_normals
    for v in range(n):
        anchor = None
        for s, j in enumerate(mesh.fan_neighbors[v]):
            d = pos[int(j)] - pos[v]
            proj = d - np.dot(d, nrm[v]) * nrm[v]
            pn = np.linalg.norm(proj)
            if pn > tol.tangent_proj_eps * max(np.linalg.norm(d), 1e-300):
                anchor = (s, proj / pn)
                break
        if anchor is None:
            raise ValidationError(f"all one-ring edges at vertex {v} project to zero")
        s, u = anchor
        # u sits at normalized angle ray_angles[v][s]; rotate back so the
        # embedded e0 matches angular coordinate zero.
        w = _cross(nrm[v], u)
        phi = ray_angles[v][s]
        e0[v] = np.cos(phi) * u + np.sin(phi) * w
        e0[v] /= np.linalg.norm(e0[v])
        e1[v] = _cross(nrm[v], e0[v])

    return IntrinsicFrame(mesh, e0, e1, total_angle, ray_angles)


def frames_from_bases(mesh: SurfaceMesh, e0) -> IntrinsicFrame:
    """Frames induced by explicitly given basis directions.

    Angular coordinates are measured extrinsically (projection onto the
    given basis) with no one-ring rescaling. On a planar mesh with a single
    global basis every transport rotation becomes exactly 1; this is the
    shared-basis construction used by the flat-reduction checks.
    """
    n = mesh.n_vertices
    e0 = np.asarray(e0, dtype=np.float64)
    if e0.shape != (n, 3):
        raise ValidationError(f"e0 must be ({n}, 3), got {e0.shape}")
    nrm = mesh.vertex_normals
    tang = e0 - np.einsum("ij,ij->i", e0, nrm)[:, None] * nrm
    norms = np.linalg.norm(tang, axis=1, keepdims=True)
    if norms.min() <= 0:
        raise ValidationError("a supplied basis direction is parallel to the normal")
    b0 = tang / norms
    b1 = _cross(nrm, b0)

    total_angle = np.array([a.sum() for a in mesh.fan_corner_angles])
    pos = mesh.positions
    ray_angles = []
    for v in range(n):
        d = pos[mesh.fan_neighbors[v]] - pos[v]
        theta = np.arctan2(d @ b1[v], d @ b0[v])
        ray_angles.append(np.mod(theta, 2.0 * np.pi))
    return IntrinsicFrame(mesh, b0, b1, total_angle, ray_angles)


def transport_loop_holonomy(frame: IntrinsicFrame, vertex_loop) -> complex:
    """Product of transport rotations along a closed vertex cycle.

    The loop closes implicitly (last vertex connects back to the first).
    Raises ValidationError if consecutive vertices are not adjacent.
    """
    loop = [int(v) for v in vertex_loop]
    if len(loop) < 2:
        raise ValidationError("holonomy loop needs at least two vertices")
    if loop[0] == loop[-1]:
        loop = loop[:-1]
    r = 1.0 + 0.0j
    for a, b in zip(loop, loop[1:] + loop[:1]):
        r *= frame.transport_to(a, b)
    return r
