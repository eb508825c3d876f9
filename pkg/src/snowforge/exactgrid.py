"""Exact rational 3D grid geometry.

Grid squares, double pyramids, normalizing similarities, and certified
max-norm distance computations between polyhedral complexes.  Everything in
this module is exact: coordinates are Fractions, distances are Fractions or
rational intervals.  Floating point belongs to the conformal side of the
package, not here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import EmptyInput
from .exactlp import solve_lp

Frac = Fraction
Point3 = tuple[Fraction, Fraction, Fraction]

# axis codes 0..5 = +x -x +y -y +z -z
AXIS_VEC = (
    (1, 0, 0), (-1, 0, 0),
    (0, 1, 0), (0, -1, 0),
    (0, 0, 1), (0, 0, -1),
)
AXIS_NAME = ("+x", "-x", "+y", "-y", "+z", "-z")


def axis_of(vec) -> int:
    for i, v in enumerate(AXIS_VEC):
        if tuple(vec) == v:
            return i
    raise ValueError(f"not a unit axis vector: {vec}")


def opposite(axis: int) -> int:
    return axis ^ 1


def point(x, y, z) -> Point3:
    return (Fraction(x), Fraction(y), Fraction(z))


def padd(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def psub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def pscale(a, s):
    s = Fraction(s)
    return (a[0] * s, a[1] * s, a[2] * s)


def norm_inf(a) -> Fraction:
    return max(abs(a[0]), abs(a[1]), abs(a[2]))


def dist_inf_points(a, b) -> Fraction:
    return norm_inf(psub(a, b))


def dist2_euclid(a, b) -> Fraction:
    d = psub(a, b)
    return d[0] * d[0] + d[1] * d[1] + d[2] * d[2]


# canonical in-plane right-handed frame (u, v) for each normal w: u x v = w
_INPLANE = {
    0: (2, 4),  # +x: (y, z)
    1: (4, 2),  # -x: (z, y)
    2: (4, 0),  # +y: (z, x)
    3: (0, 4),  # -y: (x, z)
    4: (0, 2),  # +z: (x, y)
    5: (2, 0),  # -z: (y, x)
}


def inplane_axes(normal: int) -> tuple[int, int]:
    """Canonical right-handed in-plane axis pair (u, v) with u x v = normal."""
    return _INPLANE[normal]


@dataclass(frozen=True)
class GridSquare:
    """Oriented axis-aligned square with side delta_j, vertices in delta_j Z^3.

    `anchor` is the corner with minimal coordinates; `axis` encodes the
    oriented normal pointing to the inner side (into the enclosed solid), so
    that the normalizing similarity of a +z square is the identity.
    """

    level: int
    anchor: Point3
    axis: int
    side: Fraction

    def __post_init__(self):
        if not (0 <= self.axis < 6):
            raise ValueError("axis code out of range")
        for c in self.anchor:
            if (c / self.side).denominator != 1:
                raise ValueError("square does not live in its grid")

    def normal(self):
        return AXIS_VEC[self.axis]

    def vertices(self) -> list[Point3]:
        u, v = inplane_axes(self.axis)
        eu = pscale(AXIS_VEC[u], self.side)
        ev = pscale(AXIS_VEC[v], self.side)
        a = self.anchor
        return [a, padd(a, eu), padd(a, padd(eu, ev)), padd(a, ev)]

    def center(self) -> Point3:
        u, v = inplane_axes(self.axis)
        h = self.side / 2
        return padd(self.anchor, padd(pscale(AXIS_VEC[u], h), pscale(AXIS_VEC[v], h)))

    def plane(self) -> tuple[int, Fraction]:
        """(coordinate index, value) of the supporting plane."""
        k = self.axis // 2
        return k, self.anchor[k]


@dataclass(frozen=True)
class DoublePyramid:
    base: GridSquare
    inner_tip: Point3
    outer_tip: Point3

    def contains(self, p: Point3, closed: bool = True) -> bool:
        """Exact max-norm membership test for the double pyramid."""
        q = self.base
        k, val = q.plane()
        u, v = inplane_axes(q.axis)
        ku, kv = u // 2, v // 2
        h = q.side / 2
        cu, cv = q.anchor[ku] + h, q.anchor[kv] + h
        du = abs(p[ku] - cu)
        dv = abs(p[kv] - cv)
        dw = abs(p[k] - val)
        lhs = max(du, dv) + dw
        return lhs <= h if closed else lhs < h

    def boundary_dist_inf(self, p: Point3) -> Fraction:
        """dist_inf from p to the pyramid boundary, for p inside (else 0 clamp)."""
        q = self.base
        k, val = q.plane()
        u, v = inplane_axes(q.axis)
        ku, kv = u // 2, v // 2
        h = q.side / 2
        cu, cv = q.anchor[ku] + h, q.anchor[kv] + h
        du = abs(p[ku] - cu)
        dv = abs(p[kv] - cv)
        dw = abs(p[k] - val)
        s = h - (max(du, dv) + dw)
        if s <= 0:
            return Fraction(0)
        # max-norm distance to a 45-degree face plane is half the slack
        return s / 2


def make_double_pyramid(q: GridSquare) -> DoublePyramid:
    """Tips sit at distance side/2 from the square plane along +-normal."""
    c = q.center()
    off = pscale(q.normal(), q.side / 2)
    return DoublePyramid(q, padd(c, off), psub(c, off))


# the 24 orientation-preserving cube rotations as integer matrices (rows)
def _cube_rotations():
    mats = []
    for perm in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
        for signs in product((1, -1), repeat=3):
            m = [[0, 0, 0], [0, 0, 0], [0, 0, 0]]
            for r in range(3):
                m[r][perm[r]] = signs[r]
            det = (
                m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
            )
            if det == 1:
                mats.append(tuple(tuple(r) for r in m))
    return tuple(mats)


CUBE_ROTATIONS = _cube_rotations()


@dataclass(frozen=True)
class Similarity:
    """x -> scale * R x + t with R one of the 24 cube rotations."""

    scale: Fraction
    rotation: tuple[tuple[int, int, int], ...]
    translation: Point3

    def apply(self, p) -> Point3:
        r = self.rotation
        q = tuple(
            sum(Fraction(r[i][j]) * p[j] for j in range(3)) for i in range(3)
        )
        return (
            self.scale * q[0] + self.translation[0],
            self.scale * q[1] + self.translation[1],
            self.scale * q[2] + self.translation[2],
        )

    def apply_vector(self, v):
        r = self.rotation
        return tuple(
            self.scale * sum(Fraction(r[i][j]) * v[j] for j in range(3))
            for i in range(3)
        )

    def inverse(self) -> "Similarity":
        r = self.rotation
        rt = tuple(tuple(r[j][i] for j in range(3)) for i in range(3))
        s = 1 / self.scale
        t = tuple(
            -s * sum(Fraction(rt[i][j]) * self.translation[j] for j in range(3))
            for i in range(3)
        )
        return Similarity(s, rt, t)

    def compose(self, other: "Similarity") -> "Similarity":
        """self o other."""
        r1, r2 = self.rotation, other.rotation
        r = tuple(
            tuple(sum(r1[i][k] * r2[k][j] for k in range(3)) for j in range(3))
            for i in range(3)
        )
        t = self.apply(other.translation)
        return Similarity(self.scale * other.scale, r, t)


IDENTITY_ROT = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def normalize(q: GridSquare) -> Similarity:
    """Similarity taking q to the unit square [0,1]^2 x {0} with the inner
    pyramid mapped onto the pyramid above (tip (1/2,1/2,1/2)).

    The map is defined on all of R^3 and carries grid squares to grid squares.
    """
    # +z in normalized coords corresponds to the stored (inner-side) normal
    w = q.axis
    u, v = inplane_axes(w)
    # rows of R are the normalized coordinates' world directions
    rot = (AXIS_VEC[u], AXIS_VEC[v], AXIS_VEC[w])
    s = 1 / q.side
    # anchor must map to a corner of the unit square; pick the one sending
    # the square onto [0,1]^2 exactly
    rp = tuple(
        s * sum(Fraction(rot[i][j]) * q.anchor[j] for j in range(3)) for i in range(3)
    )
    # after rotation+scale the square spans a unit square somewhere; translate
    # its minimal corner to the origin
    verts = [
        tuple(
            s * sum(Fraction(rot[i][j]) * p[j] for j in range(3)) for i in range(3)
        )
        for p in q.vertices()
    ]
    mins = tuple(min(v[i] for v in verts) for i in range(3))
    t = tuple(-m for m in mins)
    return Similarity(s, rot, t)


# ---------------------------------------------------------------------------
# faces and certified distances


@dataclass(frozen=True)
class Face:
    """Convex planar polygon parallel to a coordinate plane.

    `axis_k` is the coordinate index of the supporting plane, `value` its
    coordinate, `verts` the 3D vertices (in order).
    """

    axis_k: int
    value: Fraction
    verts: tuple[Point3, ...]

    @staticmethod
    def from_points(pts) -> "Face":
        pts = tuple(tuple(Fraction(c) for c in p) for p in pts)
        for k in range(3):
            if all(p[k] == pts[0][k] for p in pts):
                return Face(k, pts[0][k], pts)
        raise ValueError("face is not parallel to a coordinate plane")

    @staticmethod
    def of_square(q: GridSquare) -> "Face":
        k, val = q.plane()
        return Face(k, val, tuple(q.vertices()))

    def uv(self) -> tuple[int, int]:
        return tuple(i for i in range(3) if i != self.axis_k)

    def verts2(self):
        i, j = self.uv()
        return [(p[i], p[j]) for p in self.verts]

    def bbox(self):
        xs = [p[0] for p in self.verts]
        ys = [p[1] for p in self.verts]
        zs = [p[2] for p in self.verts]
        return (
            (min(xs), min(ys), min(zs)),
            (max(xs), max(ys), max(zs)),
        )


def as_faces(obj) -> list[Face]:
    if isinstance(obj, Face):
        return [obj]
    if isinstance(obj, GridSquare):
        return [Face.of_square(obj)]
    if hasattr(obj, "faces"):
        return list(obj.faces())
    faces = []
    for el in obj:
        faces.extend(as_faces(el))
    return faces


def _seg_point_dist2d(p, a, b) -> Fraction:
    """Exact max-norm distance from 2D point p to segment [a, b]."""
    dx0, dy0 = a[0] - p[0], a[1] - p[1]
    ex, ey = b[0] - a[0], b[1] - a[1]

    def val(t):
        return max(abs(dx0 + t * ex), abs(dy0 + t * ey))

    cands = [Fraction(0), Fraction(1)]
    # breakpoints of |dx0+t ex| = |dy0+t ey| and of sign changes
    for num, den in ((-dx0, ex), (-dy0, ey)):
        if den != 0:
            cands.append(num / den)
    for sx in (1, -1):
        den = ex - sx * ey
        if den != 0:
            cands.append((sx * dy0 - dx0) / den)
    best = None
    for t in cands:
        if 0 <= t <= 1:
            v = val(t)
            if best is None or v < best:
                best = v
    return best


def _point_in_convex2d(p, poly) -> bool:
    n = len(poly)
    sign = 0
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        cr = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        if cr != 0:
            if sign == 0:
                sign = 1 if cr > 0 else -1
            elif (cr > 0) != (sign > 0):
                return False
    return True


def point_face_dist_inf(p, f: Face) -> Fraction:
    """Exact max-norm distance from a point to a convex axis-parallel face."""
    gap = abs(p[f.axis_k] - f.value)
    i, j = f.uv()
    p2 = (p[i], p[j])
    poly = f.verts2()
    if _point_in_convex2d(p2, poly):
        d2 = Fraction(0)
    else:
        d2 = min(
            _seg_point_dist2d(p2, poly[k], poly[(k + 1) % len(poly)])
            for k in range(len(poly))
        )
    return max(gap, d2)


def point_complex_dist_inf(p, faces) -> Fraction:
    faces = as_faces(faces)
    if not faces:
        raise EmptyInput("empty complex")
    best = None
    for f in faces:
        lo, hi = f.bbox()
        gap = max(
            max(lo[i] - p[i], p[i] - hi[i], Fraction(0)) for i in range(3)
        )
        if best is not None and gap >= best:
            continue
        d = point_face_dist_inf(p, f)
        if best is None or d < best:
            best = d
    return best


def _bbox_gap(b1, b2) -> Fraction:
    (lo1, hi1), (lo2, hi2) = b1, b2
    g = Fraction(0)
    for i in range(3):
        gi = max(lo2[i] - hi1[i], lo1[i] - hi2[i], Fraction(0))
        if gi > g:
            g = gi
    return g


def face_pair_dist_inf(f: Face, g: Face) -> Fraction:
    """Exact min over (a in f, b in g) of ||a-b||_inf via a small LP."""
    m, n = len(f.verts), len(g.verts)
    nv = m + n + 1  # lambdas, mus, t
    c = [0] * (m + n) + [1]
    A_ub, b_ub = [], []
    for k in range(3):
        row_pos = [Fraction(v[k]) for v in f.verts] + [
            -Fraction(w[k]) for w in g.verts
        ] + [-1]
        A_ub.append(row_pos)
        b_ub.append(0)
        A_ub.append([-x if i < m + n else -1 for i, x in enumerate(row_pos)])
        b_ub.append(0)
    A_eq = [
        [1] * m + [0] * n + [0],
        [0] * m + [1] * n + [0],
    ]
    b_eq = [1, 1]
    status, x, obj = solve_lp(c, A_ub, b_ub, A_eq, b_eq)
    if status != "optimal":
        raise RuntimeError(f"face distance LP failed: {status}")
    return obj


def dist_inf(A, B) -> Fraction:
    """Exact max-norm distance between two polyhedral complexes.

    inf over all point pairs; exact because faces are convex polygons in
    coordinate planes (each pair solved by a rational LP, with bounding-box
    pruning).
    """
    fa, fb = as_faces(A), as_faces(B)
    if not fa or not fb:
        raise EmptyInput("empty complex")
    boxes_a = [f.bbox() for f in fa]
    boxes_b = [g.bbox() for g in fb]
    # initial upper bound from a vertex pair
    best = dist_inf_points(fa[0].verts[0], fb[0].verts[0])
    pairs = []
    for i, f in enumerate(fa):
        for j, g in enumerate(fb):
            gap = _bbox_gap(boxes_a[i], boxes_b[j])
            if gap < best:
                pairs.append((gap, i, j))
    pairs.sort(key=lambda t: t[0])
    for gap, i, j in pairs:
        if gap >= best:
            break
        d = face_pair_dist_inf(fa[i], fb[j])
        if d < best:
            best = d
    return best


def face_sup_dist_to_face(f: Face, g: Face) -> Fraction:
    """sup over f of dist(., g); exact by convexity (max at a vertex)."""
    return max(point_face_dist_inf(v, g) for v in f.verts)


def _split_face(f: Face) -> list[Face]:
    """Split a convex face into four smaller ones through edge midpoints."""
    n = len(f.verts)
    cen = tuple(sum(p[i] for p in f.verts) / n for i in range(3))
    out = []
    for k in range(n):
        a = f.verts[k]
        b = f.verts[(k + 1) % n]
        prev = f.verts[(k - 1) % n]
        mab = tuple((a[i] + b[i]) / 2 for i in range(3))
        mpa = tuple((prev[i] + a[i]) / 2 for i in range(3))
        out.append(Face(f.axis_k, f.value, (a, mab, cen, mpa)))
    return out


def directed_hdist_inf(A, B, resolution=None):
    """Certified interval for sup_{x in A} dist_inf(x, B).

    Returns (lower, upper) Fractions.  Refines faces of A until exact
    (lower == upper) or the interval is narrower than `resolution`.
    """
    fa, fb = as_faces(A), as_faces(B)
    if not fa or not fb:
        raise EmptyInput("empty complex")
    if resolution is not None:
        resolution = Fraction(resolution)

    def face_upper(f):
        return min(face_sup_dist_to_face(f, g) for g in fb)

    lower = Fraction(0)
    for f in fa:
        for v in f.verts:
            d = point_complex_dist_inf(v, fb)
            if d > lower:
                lower = d
    work = [(face_upper(f), f) for f in fa]
    for _ in range(40):
        upper = max(u for u, _ in work)
        if upper == lower or (resolution is not None and upper - lower <= resolution):
            return lower, upper
        new_work = []
        for u, f in work:
            if u > lower:
                for sf in _split_face(f):
                    for v in sf.verts:
                        d = point_complex_dist_inf(v, fb)
                        if d > lower:
                            lower = d
                    new_work.append((face_upper(sf), sf))
            else:
                new_work.append((u, f))
        work = new_work
    upper = max(u for u, _ in work)
    return lower, upper


def hdist_inf(A, B, resolution=Fraction(1, 10**9)):
    """Certified interval [L, U] containing Hdist_inf(A, B), U - L <= resolution.

    Exact (L == U) whenever the refinement stabilizes, which it does for
    grid-aligned complexes at a common refinement.
    """
    l1, u1 = directed_hdist_inf(A, B, resolution)
    l2, u2 = directed_hdist_inf(B, A, resolution)
    return max(l1, l2), max(u1, u2)
