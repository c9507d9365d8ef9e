"""Conforming triangular meshes: generation, I/O, connectivity, geometry.

Local edge f of a triangle runs from its vertex f to vertex (f+1) % 3,
matching the reference-triangle edge numbering. All triangles are stored
counterclockwise; outward normals follow from that orientation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, MeshError, NonManifoldError

MESH_HEADER = "dgtd-mesh v1"

# local edge f joins vertices (f, f+1 mod 3)
_EDGE_VERTS = ((0, 1), (1, 2), (2, 0))


@dataclass(frozen=True)
class Mesh2D:
    """A conforming triangulation with precomputed connectivity and geometry.

    Immutable after construction; concurrent reads are safe.
    """

    vertices: np.ndarray       # (Nv, 2)
    triangles: np.ndarray      # (K, 3) int, counterclockwise
    neighbor: np.ndarray       # (K, 3) int, adjacent element or -1 on boundary
    neighbor_face: np.ndarray  # (K, 3) int, adjacent local edge or -1
    boundary_marker: np.ndarray  # (K, 3) int, -1 interior, label 0 on boundary
    normals: np.ndarray        # (K, 3, 2) outward unit normals
    edge_length: np.ndarray    # (K, 3)
    area: np.ndarray           # (K,)
    jac: np.ndarray            # (K,) determinant of the affine map (= area/2)
    rx: np.ndarray             # (K,) dr/dx
    ry: np.ndarray             # (K,) dr/dy
    sx: np.ndarray             # (K,) ds/dx
    sy: np.ndarray             # (K,) ds/dy
    h_k: np.ndarray            # (K,) element diameter (longest edge)
    tau_k: np.ndarray          # (K,) inscribed-circle diameter

    @property
    def n_elements(self) -> int:
        return len(self.triangles)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def h_min(self) -> float:
        return float(self.h_k.min())

    @property
    def h_max(self) -> float:
        return float(self.h_k.max())

    @property
    def shape_regularity(self) -> float:
        """max over elements of h_k / tau_k."""
        return float((self.h_k / self.tau_k).max())

    @property
    def is_boundary(self) -> np.ndarray:
        """(K, 3) boolean mask of boundary edges."""
        return self.neighbor < 0

    @property
    def boundary_edge_count(self) -> int:
        return int(np.count_nonzero(self.neighbor < 0))

    @property
    def interior_edge_count(self) -> int:
        return int(np.count_nonzero(self.neighbor >= 0)) // 2

    @property
    def perimeter_k(self) -> np.ndarray:
        return self.edge_length.sum(axis=1)

    def element_vertices(self, k: int) -> np.ndarray:
        """(3, 2) vertex coordinates of element k."""
        return self.vertices[self.triangles[k]]

    def map_reference_nodes(self, r, s) -> tuple[np.ndarray, np.ndarray]:
        """Map reference coordinates to physical ones for every element.

        Returns x, y arrays of shape (K, len(r)).
        """
        r = np.asarray(r, dtype=float)
        s = np.asarray(s, dtype=float)
        v = self.vertices[self.triangles]  # (K, 3, 2)
        lam0 = -0.5 * (r + s)
        lam1 = 0.5 * (1.0 + r)
        lam2 = 0.5 * (1.0 + s)
        x = np.outer(v[:, 0, 0], lam0) + np.outer(v[:, 1, 0], lam1) + np.outer(v[:, 2, 0], lam2)
        y = np.outer(v[:, 0, 1], lam0) + np.outer(v[:, 1, 1], lam1) + np.outer(v[:, 2, 1], lam2)
        return x, y


def build_connectivity(triangles: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Edge-adjacency tables (neighbor element, neighbor local edge).

    Boundary edges get -1 in both tables. Raises NonManifoldError if any
    edge is shared by more than two triangles.
    """
    k_elems = len(triangles)
    edge_map: dict[frozenset, list[tuple[int, int]]] = {}
    for k in range(k_elems):
        for f, (a, b) in enumerate(_EDGE_VERTS):
            key = frozenset((int(triangles[k, a]), int(triangles[k, b])))
            edge_map.setdefault(key, []).append((k, f))

    neighbor = np.full((k_elems, 3), -1, dtype=np.int64)
    neighbor_face = np.full((k_elems, 3), -1, dtype=np.int64)
    for key, sides in edge_map.items():
        if len(sides) > 2:
            verts = tuple(sorted(key))
            raise NonManifoldError(
                f"edge {verts} shared by {len(sides)} triangles"
            )
        if len(sides) == 2:
            (k1, f1), (k2, f2) = sides
            neighbor[k1, f1] = k2
            neighbor_face[k1, f1] = f2
            neighbor[k2, f2] = k1
            neighbor_face[k2, f2] = f1
    return neighbor, neighbor_face


def _validate_triangles(vertices: np.ndarray, triangles: np.ndarray,
                        reorient: bool) -> np.ndarray:
    n_v = len(vertices)
    seen: dict[tuple, int] = {}
    triangles = triangles.copy()
    for k, tri in enumerate(triangles):
        if tri.min() < 0 or tri.max() >= n_v:
            raise MeshError(f"triangle {k} refers to a vertex out of range")
        if len(set(int(i) for i in tri)) != 3:
            raise MeshError(f"triangle {k} has a repeated vertex")
        key = tuple(sorted(int(i) for i in tri))
        if key in seen:
            raise MeshError(f"triangle {k} duplicates triangle {seen[key]}")
        seen[key] = k

        v = vertices[tri]
        e1 = v[1] - v[0]
        e2 = v[2] - v[0]
        signed = 0.5 * (e1[0] * e2[1] - e1[1] * e2[0])
        if abs(signed) < 1e-14 * max(1.0, np.abs(v).max()) ** 2:
            raise MeshError(f"triangle {k} is degenerate (zero area)")
        if signed < 0.0:
            if not reorient:
                raise MeshError(
                    f"triangle {k} has clockwise orientation "
                    "(pass reorient=True to flip it)"
                )
            triangles[k] = tri[[0, 2, 1]]
    return triangles


def mesh_from_arrays(vertices, triangles, reorient: bool = False) -> Mesh2D:
    """Validate raw vertex/triangle arrays and build the full mesh."""
    vertices = np.asarray(vertices, dtype=float).reshape(-1, 2)
    triangles = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
    triangles = _validate_triangles(vertices, triangles, reorient)
    neighbor, neighbor_face = build_connectivity(triangles)

    v = vertices[triangles]  # (K, 3, 2)
    # edge vectors following the local traversal direction
    tangents = np.stack([v[:, b] - v[:, a] for a, b in _EDGE_VERTS], axis=1)
    edge_length = np.linalg.norm(tangents, axis=2)
    normals = np.stack(
        [tangents[..., 1], -tangents[..., 0]], axis=2
    ) / edge_length[..., None]

    xr = 0.5 * (v[:, 1, 0] - v[:, 0, 0])
    yr = 0.5 * (v[:, 1, 1] - v[:, 0, 1])
    xs = 0.5 * (v[:, 2, 0] - v[:, 0, 0])
    ys = 0.5 * (v[:, 2, 1] - v[:, 0, 1])
    jac = xr * ys - xs * yr
    area = 2.0 * jac

    h_k = edge_length.max(axis=1)
    tau_k = 4.0 * area / edge_length.sum(axis=1)

    # single boundary label for now; the field leaves room for several
    boundary_marker = np.where(neighbor < 0, 0, -1)

    return Mesh2D(
        vertices=vertices,
        triangles=triangles,
        neighbor=neighbor,
        neighbor_face=neighbor_face,
        boundary_marker=boundary_marker,
        normals=normals,
        edge_length=edge_length,
        area=area,
        jac=jac,
        rx=ys / jac,
        ry=-xs / jac,
        sx=-yr / jac,
        sy=xr / jac,
        h_k=h_k,
        tau_k=tau_k,
    )


def structured_square_mesh(n_cells_per_side: int,
                           xmin: float = -1.0, xmax: float = 1.0,
                           ymin: float = -1.0, ymax: float = 1.0,
                           diagonal: str = "slash") -> Mesh2D:
    """Uniform grid of squares, each split into two triangles.

    Every cell is cut along the same diagonal: "slash" joins the
    bottom-right corner to the top-left one, "backslash" the bottom-left
    to the top-right. For a square domain the element diameter is the
    cell diagonal, so h_min = sqrt(2) * (xmax - xmin) / n.
    """
    n = int(n_cells_per_side)
    if n < 1:
        raise DomainError("n_cells_per_side must be >= 1")
    if not (xmax > xmin and ymax > ymin):
        raise DomainError("degenerate domain extents")
    if diagonal not in ("slash", "backslash"):
        raise DomainError(f"unknown diagonal {diagonal!r}")

    xs = np.linspace(xmin, xmax, n + 1)
    ys = np.linspace(ymin, ymax, n + 1)
    gx, gy = np.meshgrid(xs, ys, indexing="xy")
    vertices = np.stack([gx.ravel(), gy.ravel()], axis=1)

    def vid(i: int, j: int) -> int:
        return j * (n + 1) + i

    triangles = []
    for j in range(n):
        for i in range(n):
            a = vid(i, j)
            b = vid(i + 1, j)
            c = vid(i + 1, j + 1)
            d = vid(i, j + 1)
            if diagonal == "slash":
                triangles.append((a, b, d))
                triangles.append((b, c, d))
            else:
                triangles.append((a, b, c))
                triangles.append((a, c, d))
    return mesh_from_arrays(vertices, np.array(triangles, dtype=np.int64))


def save_mesh(mesh: Mesh2D, path) -> None:
    """Write the mesh in the plain-text v1 format."""
    with open(path, "w", encoding="utf-8") as out:
        out.write(MESH_HEADER + "\n")
        out.write(f"V {mesh.n_vertices}\n")
        for x, y in mesh.vertices:
            out.write(f"{float(x)!r} {float(y)!r}\n")
        out.write(f"T {mesh.n_elements}\n")
        for i, j, k in mesh.triangles:
            out.write(f"{i} {j} {k}\n")


def load_mesh(path, reorient: bool = False) -> Mesh2D:
    """Read a mesh from the plain-text v1 format and validate it."""
    with open(path, "r", encoding="utf-8") as inp:
        tokens_by_line = [line.split() for line in inp]

    lines = [t for t in tokens_by_line if t]
    if not lines or " ".join(lines[0]) != MESH_HEADER:
        raise MeshError(f"{path}: missing '{MESH_HEADER}' header")

    pos = 1

    def expect_count(tag: str) -> int:
        nonlocal pos
        if pos >= len(lines) or lines[pos][0] != tag or len(lines[pos]) != 2:
            raise MeshError(f"{path}: expected '{tag} <count>' line")
        try:
            count = int(lines[pos][1])
        except ValueError as exc:
            raise MeshError(f"{path}: bad count on '{tag}' line") from exc
        pos += 1
        return count

    n_v = expect_count("V")
    vertices = np.empty((n_v, 2))
    for i in range(n_v):
        if pos >= len(lines) or len(lines[pos]) != 2:
            raise MeshError(f"{path}: vertex {i}: expected 'x y'")
        try:
            vertices[i] = [float(lines[pos][0]), float(lines[pos][1])]
        except ValueError as exc:
            raise MeshError(f"{path}: vertex {i}: bad coordinate") from exc
        pos += 1

    n_t = expect_count("T")
    triangles = np.empty((n_t, 3), dtype=np.int64)
    for k in range(n_t):
        if pos >= len(lines) or len(lines[pos]) != 3:
            raise MeshError(f"{path}: triangle {k}: expected 'i j k'")
        try:
            triangles[k] = [int(t) for t in lines[pos]]
        except ValueError as exc:
            raise MeshError(f"{path}: triangle {k}: bad vertex index") from exc
        pos += 1

    if pos != len(lines):
        raise MeshError(f"{path}: trailing content after triangle list")
    return mesh_from_arrays(vertices, triangles, reorient=reorient)
