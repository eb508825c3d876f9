"""N-generators: square-grid replacement surfaces and their validity conditions.

A generator is a polyhedral surface built from squares of side 1/N over the
unit square.  Internally squares live on the integer lattice at scale N
(anchor coordinates in Z^3, side 1).  Two input forms are supported: a
columnar height grid (stacked cubes, always grid-angle consistent) and an
explicit square list.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .errors import DegreeOutOfRange, InvalidGenerator, NonManifoldEdge, ParseError

# axis codes as in exactgrid: 0..5 = +x -x +y -y +z -z
AXIS_VEC = (
    (1, 0, 0), (-1, 0, 0),
    (0, 1, 0), (0, -1, 0),
    (0, 0, 1), (0, 0, -1),
)
AXIS_BY_NAME = {"+x": 0, "-x": 1, "+y": 2, "-y": 3, "+z": 4, "-z": 5}
AXIS_NAME = {v: k for k, v in AXIS_BY_NAME.items()}

FORBIDDEN_SEQ = (2, 3, 1, 2, 3, 1)  # angles in units of pi/2: (pi, 3pi/2, pi/2) twice


@dataclass(frozen=True)
class GenSquare:
    """Lattice square of side 1 at scale N; axis = inner-side normal code."""

    anchor: tuple[int, int, int]
    axis: int

    def vertices(self):
        ax, ay, az = self.anchor
        u, v = _inplane(self.axis)
        pts = [(ax, ay, az)]
        for d in (u, v, (u[0] + v[0], u[1] + v[1], u[2] + v[2])):
            pts.append((ax + d[0], ay + d[1], az + d[2]))
        pts[2], pts[3] = pts[3], pts[2]
        return pts  # counterclockwise seen from the axis side

    def edges(self):
        vs = self.vertices()
        return [frozenset((vs[i], vs[(i + 1) % 4])) for i in range(4)]


# in-plane frame (u, v) with u x v = axis vector, so the vertex traversal of a
# square is counterclockwise seen from its stored normal side
_INPLANE_VECS = (
    ((0, 1, 0), (0, 0, 1)),  # +x
    ((0, 0, 1), (0, 1, 0)),  # -x
    ((0, 0, 1), (1, 0, 0)),  # +y
    ((1, 0, 0), (0, 0, 1)),  # -y
    ((1, 0, 0), (0, 1, 0)),  # +z
    ((0, 1, 0), (1, 0, 0)),  # -z
)


def _inplane(axis):
    return _INPLANE_VECS[axis]


@dataclass
class ValidationReport:
    n: int
    conditions: dict = field(default_factory=dict)  # name -> bool
    witnesses: dict = field(default_factory=dict)  # name -> offending vertex/square
    degree_histogram: dict = field(default_factory=dict)
    height: Fraction = Fraction(0)

    @property
    def all_pass(self) -> bool:
        return all(self.conditions.values())


@dataclass(frozen=True)
class Generator:
    """An N-generator, stored in the bump-up ('dent') representation."""

    n: int
    squares: frozenset[GenSquare]
    columnar: bool
    heights: tuple | None = None

    @property
    def delta(self) -> Fraction:
        return Fraction(1, self.n)

    def square_count(self) -> int:
        return len(self.squares)

    def sorted_squares(self) -> list[GenSquare]:
        """Canonical child ordering used for substitution addresses."""
        return sorted(self.squares, key=lambda s: (s.anchor, s.axis))

    def oriented_squares(self, outward: bool) -> list[GenSquare]:
        """Square set as substituted into a normalized parent square.

        The parent's inner side is +z.  Inward orientation keeps the bump-up
        picture; outward flips the surface to bump down and reverses the
        solid side of every wall (the flats stay inner-normal +z: the solid
        is above the surface either way).
        """
        if not outward:
            return self.sorted_squares()
        out = []
        for s in self.sorted_squares():
            ax, ay, az = s.anchor
            zmax = max(p[2] for p in s.vertices())
            new_anchor = (ax, ay, -zmax)
            if s.axis in (4, 5):  # horizontal square: solid stays above
                new_axis = 4
            else:
                # walls: solid side flips relative to the surface flip
                new_axis = s.axis ^ 1
            out.append(GenSquare(new_anchor, new_axis))
        return sorted(out, key=lambda s: (s.anchor, s.axis))


def from_heights(n: int, heights) -> Generator:
    """Build the (bump-up) surface of a columnar height field."""
    if len(heights) != n or any(len(r) != n for r in heights):
        raise ParseError(f"height grid must be {n}x{n}")
    h = [[int(x) for x in row] for row in heights]
    if any(x < 0 for row in h for x in row):
        raise ParseError("heights must be non-negative")
    squares = []
    for j, i in product(range(n), range(n)):
        squares.append(GenSquare((i, j, h[j][i]), 4))
    # walls along x-direction boundaries between columns
    for j in range(n):
        for i in range(n - 1):
            h1, h2 = h[j][i], h[j][i + 1]
            lo, hi = min(h1, h2), max(h1, h2)
            axis = 1 if h1 < h2 else 0  # inner normal points to the lower column
            for k in range(lo, hi):
                squares.append(GenSquare((i + 1, j, k), axis))
    for i in range(n):
        for j in range(n - 1):
            h1, h2 = h[j][i], h[j + 1][i]
            lo, hi = min(h1, h2), max(h1, h2)
            axis = 3 if h1 < h2 else 2
            for k in range(lo, hi):
                squares.append(GenSquare((i, j + 1, k), axis))
    _check_edges(squares)
    return Generator(n, frozenset(squares), True, tuple(tuple(r) for r in h))


def _check_edges(squares):
    count = {}
    for s in squares:
        for e in s.edges():
            count[e] = count.get(e, 0) + 1
    for e, c in count.items():
        if c > 2:
            raise NonManifoldEdge(f"edge {sorted(e)} bounded by {c} squares")
    return count


def parse_generator(text: str) -> Generator:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise ParseError("empty generator file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "N":
        raise ParseError("first line must be 'N <int>'")
    try:
        n = int(head[1])
    except ValueError as exc:
        raise ParseError("N must be an integer") from exc
    if n < 2:
        raise ParseError("N must be >= 2")
    if len(lines) < 2:
        raise ParseError("missing 'heights' or 'squares' section")
    mode = lines[1]
    if mode == "heights":
        rows = [line.split() for line in lines[2:]]
        try:
            grid = [[int(x) for x in row] for row in rows]
        except ValueError as exc:
            raise ParseError("heights must be integers") from exc
        return from_heights(n, grid)
    if mode == "squares":
        squares = []
        for line in lines[2:]:
            squares.append(_parse_square_line(line, n))
        _check_edges(squares)
        return Generator(n, frozenset(squares), False, None)
    raise ParseError(f"unknown section {mode!r}")


def _parse_square_line(line: str, n: int) -> GenSquare:
    import re

    m = re.match(
        r"j=1\s+anchor\(\s*(\S+)\s+(\S+)\s+(\S+)\s*\)\s+axis\(\s*([+-][xyz])\s*\)",
        line,
    )
    if not m:
        raise ParseError(f"cannot parse square line: {line!r}")
    coords = []
    for tok in m.group(1, 2, 3):
        try:
            val = Fraction(tok) * n
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad coordinate {tok!r}") from exc
        if val.denominator != 1:
            raise ParseError(f"coordinate {tok} not on the 1/{n} grid")
        coords.append(int(val))
    return GenSquare(tuple(coords), AXIS_BY_NAME[m.group(4)])


def serialize(g: Generator) -> str:
    lines = [f"N {g.n}"]
    if g.columnar and g.heights is not None:
        lines.append("heights")
        for row in g.heights:
            lines.append(" ".join(str(x) for x in row))
    else:
        lines.append("squares")
        for s in g.sorted_squares():
            a = " ".join(f"{c}/{g.n}" for c in s.anchor)
            lines.append(f"j=1 anchor({a}) axis({AXIS_NAME[s.axis]})")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# validation


def _vertex_edge_maps(squares):
    edge_count = {}
    vert_squares = {}
    for s in squares:
        for e in s.edges():
            edge_count[e] = edge_count.get(e, 0) + 1
        for v in s.vertices():
            vert_squares.setdefault(v, []).append(s)
    return edge_count, vert_squares


def _boundary_target(n):
    """Edges of the boundary of [0,1]^2 on the scale-n lattice."""
    edges = set()
    for i in range(n):
        edges.add(frozenset(((i, 0, 0), (i + 1, 0, 0))))
        edges.add(frozenset(((i, n, 0), (i + 1, n, 0))))
        edges.add(frozenset(((0, i, 0), (0, i + 1, 0))))
        edges.add(frozenset(((n, i, 0), (n, i + 1, 0))))
    return edges


def _orient(squares):
    """Consistent transverse orientation via BFS over shared edges.

    Returns {square: +1/-1} relative to each square's stored axis; raises
    InvalidGenerator if non-orientable.
    """
    edge_map = {}
    for s in squares:
        vs = s.vertices()
        for i in range(4):
            a, b = vs[i], vs[(i + 1) % 4]
            edge_map.setdefault(frozenset((a, b)), []).append((s, (a, b)))
    sign = {}
    for start in squares:
        if start in sign:
            continue
        sign[start] = 1
        stack = [start]
        while stack:
            s = stack.pop()
            vs = s.vertices()
            for i in range(4):
                a, b = vs[i], vs[(i + 1) % 4]
                if sign[s] == -1:
                    a, b = b, a
                for t, (ta, tb) in edge_map[frozenset((a, b))]:
                    if t is s:
                        continue
                    want = -1 if (ta, tb) == (a, b) else 1
                    # neighbor must traverse the shared edge oppositely
                    if t in sign:
                        if sign[t] != want:
                            raise InvalidGenerator("surface is not orientable")
                    else:
                        sign[t] = want
                        stack.append(t)
    return sign


def _dihedral_angle(s1, s2, edge, sign1, sign2):
    """Angle (units of pi/2, in {1,2,3}) between squares at a shared edge,
    measured through the side the oriented normal of s1 points to."""
    a, b = tuple(edge)
    e = tuple(bi - ai for ai, bi in zip(a, b))

    def into(s):
        vs = s.vertices()
        other = next(v for v in vs if v not in (a, b))
        # in-plane direction from the edge into the square
        k = s.axis // 2
        d = [other[i] - a[i] for i in range(3)]
        d = [0 if i == k else d[i] for i in range(3)]
        # remove component along e
        le = sum(x * x for x in e)
        ce = sum(d[i] * e[i] for i in range(3))
        d = [d[i] - Fraction(ce, le) * e[i] for i in range(3)]
        m = max(abs(x) for x in d)
        return tuple(int(x / m) for x in d)

    t1, t2 = into(s1), into(s2)
    n1 = tuple(sign1 * c for c in AXIS_VEC[s1.axis])

    def cross(p, q):
        return (
            p[1] * q[2] - p[2] * q[1],
            p[2] * q[0] - p[0] * q[2],
            p[0] * q[1] - p[1] * q[0],
        )

    dot12 = sum(x * y for x, y in zip(t1, t2))
    if dot12 == -1:
        return 2  # coplanar: angle pi
    # t2 is perpendicular to t1: bend direction relative to n1 decides
    dotn = sum(x * y for x, y in zip(t2, n1))
    return 1 if dotn == 1 else 3


def _star_cycle(v, squares):
    """Squares around an interior vertex in cyclic order, with shared edges."""
    edges_at_v = {}
    for s in squares:
        for e in s.edges():
            if v in e:
                edges_at_v.setdefault(e, []).append(s)
    for e, ss in edges_at_v.items():
        if len(ss) != 2:
            return None
    start = squares[0]
    cycle = [start]
    shared = []
    prev_edge = None
    cur = start
    while True:
        nxt = None
        for e in cur.edges():
            if v in e and e != prev_edge:
                pair = edges_at_v[e]
                other = pair[0] if pair[1] is cur else pair[1]
                nxt = (other, e)
                break
        if nxt is None:
            return None
        cur, prev_edge = nxt
        shared.append(prev_edge)
        if cur is start:
            break
        cycle.append(cur)
        if len(cycle) > len(squares):
            return None
    if len(cycle) != len(squares):
        return None
    return cycle, shared


DIHEDRAL_2D = (
    ((1, 0), (0, 1)),
    ((0, -1), (1, 0)),
    ((-1, 0), (0, -1)),
    ((0, 1), (-1, 0)),
    ((-1, 0), (0, 1)),
    ((1, 0), (0, -1)),
    ((0, 1), (1, 0)),
    ((0, -1), (-1, 0)),
)


def _apply_symmetry(mat, n, sq: GenSquare) -> GenSquare:
    """Apply a dihedral symmetry of [0,n]^2 (fixing z) to a square, set-wise."""
    vs = sq.vertices()

    def tx(p):
        x, y, z = p
        cx = mat[0][0] * x + mat[0][1] * y
        cy = mat[1][0] * x + mat[1][1] * y
        # recenter: map [0,n] onto [0,n]
        if mat[0][0] + mat[0][1] < 0:
            cx += n
        if mat[1][0] + mat[1][1] < 0:
            cy += n
        return (cx, cy, z)

    tvs = [tx(p) for p in vs]
    anchor = tuple(min(c[i] for c in tvs) for i in range(3))
    k = sq.axis // 2
    if k == 2:
        axis = sq.axis  # z-normal squares keep their normal under xy-symmetries
    else:
        nvec = AXIS_VEC[sq.axis]
        nx = mat[0][0] * nvec[0] + mat[0][1] * nvec[1]
        ny = mat[1][0] * nvec[0] + mat[1][1] * nvec[1]
        axis = {(1, 0): 0, (-1, 0): 1, (0, 1): 2, (0, -1): 3}[(nx, ny)]
    return GenSquare(anchor, axis)


def validate(g: Generator) -> ValidationReport:
    """Check conditions (i)-(vi); failures are report entries, not errors."""
    rep = ValidationReport(n=g.n)
    squares = list(g.squares)
    n = g.n
    edge_count, vert_squares = _vertex_edge_maps(squares)

    # (i) disk: connected, Euler characteristic 1, single boundary cycle
    verts = set(vert_squares)
    V, E, F = len(verts), len(edge_count), len(squares)
    boundary_edges = [e for e, c in edge_count.items() if c == 1]
    adj = {}
    for e in boundary_edges:
        a, b = tuple(e)
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    single_cycle = bool(boundary_edges) and all(len(v) == 2 for v in adj.values())
    if single_cycle:
        seen = set()
        stack = [next(iter(adj))]
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            stack.extend(adj[x])
        single_cycle = len(seen) == len(adj)
    connected = _connected(squares)
    rep.conditions["i"] = connected and (V - E + F == 1) and single_cycle
    if not rep.conditions["i"]:
        rep.witnesses["i"] = f"V-E+F={V - E + F}, connected={connected}"

    # (ii) boundary equals the boundary of the unit square
    target = _boundary_target(n)
    rep.conditions["ii"] = set(boundary_edges) == target
    if not rep.conditions["ii"]:
        extra = set(boundary_edges) - target
        rep.witnesses["ii"] = sorted(tuple(sorted(e)) for e in extra)[:3]

    # (iii) contained in the double pyramid, touching it only at the boundary
    ok3 = True
    witness3 = None
    half = Fraction(n, 2)

    def pyr_slack(p):
        du = abs(Fraction(p[0]) - half)
        dv = abs(Fraction(p[1]) - half)
        dw = abs(Fraction(p[2]))
        return half - (max(du, dv) + dw)

    def on_unit_boundary(p):
        return p[2] == 0 and (p[0] in (0, n) or p[1] in (0, n))

    for s in squares:
        vs = s.vertices()
        probes = [tuple(Fraction(c) for c in v) for v in vs]
        for i in range(4):
            a, b = vs[i], vs[(i + 1) % 4]
            probes.append(tuple(Fraction(a[k] + b[k], 2) for k in range(3)))
        for p in probes:
            sl = pyr_slack(p)
            boundary_pt = (
                p[2] == 0 and (p[0] in (0, n) or p[1] in (0, n))
            )
            if sl < 0 or (sl == 0 and not boundary_pt):
                ok3 = False
                witness3 = (s.anchor, tuple(p))
                break
        if not ok3:
            break
    rep.conditions["iii"] = ok3
    if witness3:
        rep.witnesses["iii"] = witness3

    # (iv) grid angles: implicit in the lattice representation; verified as
    # edge-pairing consistency
    rep.conditions["iv"] = all(c <= 2 for c in edge_count.values())

    # (v) invariance under the dihedral symmetries of the unit square
    sqset = {(s.anchor, s.axis // 2) for s in squares}  # set-wise, unsigned normal
    ok5 = True
    witness5 = None
    for mat in DIHEDRAL_2D:
        timg = set()
        for s in squares:
            ts = _apply_symmetry(mat, n, s)
            timg.add((ts.anchor, ts.axis // 2))
        if timg != sqset:
            ok5 = False
            witness5 = mat
            break
    rep.conditions["v"] = ok5
    if witness5:
        rep.witnesses["v"] = witness5

    # degree data and (vi) forbidden configuration
    hist = {}
    ok6 = True
    witness6 = None
    try:
        sign = _orient(squares)
    except InvalidGenerator:
        sign = {s: 1 for s in squares}
    for v, ss in vert_squares.items():
        if on_unit_boundary(v):
            continue
        d = len(ss)
        hist[d] = hist.get(d, 0) + 1
        if d == 6 and ok6:
            res = _star_cycle(v, ss)
            if res is None:
                continue
            cycle, shared = res
            seq = []
            for i, e in enumerate(shared):
                s1 = cycle[i]
                s2 = cycle[(i + 1) % len(cycle)]
                seq.append(_dihedral_angle(s1, s2, e, sign[s1], sign[s2]))
            if _matches_forbidden(tuple(seq)):
                ok6 = False
                witness6 = v
    rep.conditions["vi"] = ok6
    if witness6:
        rep.witnesses["vi"] = witness6
    rep.degree_histogram = hist

    rep.height = height(g, check_bound=False)
    return rep


def _matches_forbidden(seq) -> bool:
    if len(seq) != 6:
        return False
    variants = []
    for shift in range(6):
        rot = tuple(seq[(i + shift) % 6] for i in range(6))
        variants.append(rot)
        variants.append(tuple(reversed(rot)))
        variants.append(tuple(4 - a if a != 2 else 2 for a in rot))
        variants.append(tuple(reversed(tuple(4 - a if a != 2 else 2 for a in rot))))
    return FORBIDDEN_SEQ in variants


def _connected(squares) -> bool:
    if not squares:
        return False
    edge_map = {}
    for s in squares:
        for e in s.edges():
            edge_map.setdefault(e, []).append(s)
    seen = {squares[0]}
    stack = [squares[0]]
    while stack:
        s = stack.pop()
        for e in s.edges():
            for t in edge_map[e]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
    return len(seen) == len(squares)


def vertex_degrees(g: Generator) -> dict[int, int]:
    """Histogram of interior delta-vertex degrees; must lie in {3,4,5,6}."""
    _, vert_squares = _vertex_edge_maps(list(g.squares))
    hist = {}
    n = g.n
    for v, ss in vert_squares.items():
        if v[2] == 0 and (v[0] in (0, n) or v[1] in (0, n)):
            continue
        d = len(ss)
        if d not in (3, 4, 5, 6):
            raise DegreeOutOfRange(f"vertex {v} has degree {d}")
        hist[d] = hist.get(d, 0) + 1
    return hist


def height(g: Generator, check_bound: bool = True) -> Fraction:
    """Max distance of a point of G from the base plane, as a fraction of 1."""
    h = Fraction(0)
    for s in g.squares:
        for v in s.vertices():
            h = max(h, Fraction(abs(v[2]), g.n))
    if check_bound:
        bound = Fraction(1, 2) - Fraction(3, 2 * g.n)
        if g.n % 2 == 0:
            bound = min(bound, Fraction(1, 2) - Fraction(2, g.n))
        if h > bound:
            raise InvalidGenerator(f"height {h} exceeds bound {bound}")
    return h
