"""Approximations S_j of the snowsphere by iterated generator substitution.

Surfaces are stored on an integer lattice: at depth j every square has side 1
in units of 1/scale_j, scale_j = N_1 * ... * N_j.  Lattice vertices of S_j lie
on every deeper approximation (substitution fixes square boundaries), hence
are exact points of the limit surface; the metric checks exploit this.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction

from . import exactgrid as eg
from .errors import InvalidGenerator, Unresolved
from .generator import Generator, validate

AXIS_VEC = eg.AXIS_VEC


@dataclass(frozen=True)
class LevelSpec:
    """Per-level generator list (cycled) and substitution orientation policy."""

    generators: tuple[Generator, ...]
    orientation: str = "out"  # "out" | "in" | "hash"
    seed: int = 0

    def __post_init__(self):
        if self.orientation not in ("out", "in", "hash"):
            raise InvalidGenerator(f"unknown orientation policy {self.orientation}")

    def generator_at(self, level: int) -> Generator:
        return self.generators[(level - 1) % len(self.generators)]

    @property
    def n_max(self) -> int:
        return max(g.n for g in self.generators)

    def outward(self, address) -> bool:
        if self.orientation == "out":
            return True
        if self.orientation == "in":
            return False
        h = hashlib.sha256(repr((self.seed, address)).encode()).digest()
        return h[0] % 2 == 0


def fig3_spec(orientation: str = "out") -> LevelSpec:
    """The paper's running example: N=5, one cube on the middle square."""
    from .generator import from_heights

    heights = [[0] * 5 for _ in range(5)]
    heights[2][2] = 1
    return LevelSpec((from_heights(5, heights),), orientation)


def flat_spec(n: int = 5) -> LevelSpec:
    from .generator import from_heights

    return LevelSpec((from_heights(n, [[0] * n for _ in range(n)]),), "out")


@dataclass(frozen=True)
class AddrSquare:
    """Lattice square of side 1 at the surface scale; axis = inner normal."""

    address: tuple
    anchor: tuple[int, int, int]
    axis: int

    def vertices(self):
        from .generator import GenSquare

        return GenSquare(self.anchor, self.axis).vertices()


class ApproxSurface:
    """The approximation S_j as an addressed square complex."""

    def __init__(self, spec: LevelSpec, depth: int, scale: int, squares):
        self.spec = spec
        self.depth = depth
        self.scale = scale
        self.squares = squares
        self._by_address = {s.address: s for s in squares}
        self._vertex_map = None
        self._edge_count = None

    @property
    def delta(self) -> Fraction:
        return Fraction(1, self.scale)

    def __len__(self):
        return len(self.squares)

    def by_address(self, address) -> AddrSquare:
        return self._by_address[address]

    def _cells(self):
        if self._vertex_map is None:
            vm = {}
            ec = {}
            for s in self.squares:
                vs = s.vertices()
                for v in vs:
                    vm.setdefault(v, []).append(s)
                for i in range(4):
                    e = frozenset((vs[i], vs[(i + 1) % 4]))
                    ec[e] = ec.get(e, 0) + 1
            self._vertex_map = vm
            self._edge_count = ec
        return self._vertex_map, self._edge_count

    def euler_characteristic(self) -> int:
        vm, ec = self._cells()
        return len(vm) - len(ec) + len(self.squares)

    def vertex_degree_histogram(self) -> dict[int, int]:
        vm, _ = self._cells()
        hist = {}
        for v, ss in vm.items():
            hist[len(ss)] = hist.get(len(ss), 0) + 1
        return hist

    def max_vertex_degree(self) -> int:
        return max(self.vertex_degree_histogram())

    def vertex_star(self, v):
        vm, _ = self._cells()
        return vm[v]

    def to_grid_square(self, sq: AddrSquare) -> eg.GridSquare:
        d = self.delta
        anchor = tuple(Fraction(c, self.scale) for c in sq.anchor)
        return eg.GridSquare(self.depth, anchor, sq.axis, d)

    def faces(self):
        return [eg.Face.of_square(self.to_grid_square(s)) for s in self.squares]

    def world_point(self, lattice_pt):
        return tuple(Fraction(c, self.scale) for c in lattice_pt)

    def pyramid_contains(self, sq: AddrSquare, p, closed=True) -> bool:
        """Exact membership of a world point in the double pyramid over sq."""
        k = sq.axis // 2
        dims = [d for d in range(3) if d != k]
        h = Fraction(1, 2 * self.scale)
        cen = [Fraction(2 * a + 1, 2 * self.scale) for a in sq.anchor]
        cen[k] = Fraction(sq.anchor[k], self.scale)
        du = abs(p[dims[0]] - cen[dims[0]])
        dv = abs(p[dims[1]] - cen[dims[1]])
        dw = abs(p[k] - cen[k])
        lhs = max(du, dv) + dw
        return lhs <= h if closed else lhs < h


def cube_surface(spec: LevelSpec) -> ApproxSurface:
    """S_0: the surface of the unit cube with inward normals."""
    squares = [
        AddrSquare((0,), (0, 0, 0), 4),  # z=0, inner +z
        AddrSquare((1,), (0, 0, 1), 5),  # z=1, inner -z
        AddrSquare((2,), (0, 0, 0), 0),  # x=0, inner +x
        AddrSquare((3,), (1, 0, 0), 1),  # x=1, inner -x
        AddrSquare((4,), (0, 0, 0), 2),  # y=0, inner +y
        AddrSquare((5,), (0, 1, 0), 3),  # y=1, inner -y
    ]
    return ApproxSurface(spec, 0, 1, squares)


_FRAME_CACHE = {}


def _frame(axis: int):
    """Columns (U, V, W) with W the inner normal and U x V = W."""
    if axis not in _FRAME_CACHE:
        u, v = eg.inplane_axes(axis)
        _FRAME_CACHE[axis] = (AXIS_VEC[u], AXIS_VEC[v], AXIS_VEC[axis])
    return _FRAME_CACHE[axis]


def _axis_code(vec):
    return {v: i for i, v in enumerate(AXIS_VEC)}[tuple(vec)]


def substitute(surface: ApproxSurface, level: int) -> ApproxSurface:
    """One substitution step S_{level-1} -> S_{level}."""
    spec = surface.spec
    g = spec.generator_at(level)
    n = g.n
    new_scale = surface.scale * n
    child_cache = {}
    out_squares = []
    for sq in surface.squares:
        outward = spec.outward(sq.address)
        key = (g.n, id(g), outward)
        if key not in child_cache:
            child_cache[key] = g.oriented_squares(outward)
        children = child_cache[key]
        U, V, W = _frame(sq.axis)
        base = tuple(c * n for c in sq.anchor)
        for idx, ch in enumerate(children):
            vs = ch.vertices()
            world = []
            for (gx, gy, gz) in vs:
                world.append(tuple(
                    base[i] + U[i] * gx + V[i] * gy + W[i] * gz for i in range(3)
                ))
            anchor = tuple(min(p[i] for p in world) for i in range(3))
            nv = AXIS_VEC[ch.axis]
            world_n = tuple(U[i] * nv[0] + V[i] * nv[1] + W[i] * nv[2] for i in range(3))
            out_squares.append(
                AddrSquare(sq.address + (idx,), anchor, _axis_code(world_n))
            )
    return ApproxSurface(spec, level, new_scale, out_squares)


def build(spec: LevelSpec, depth: int) -> list[ApproxSurface]:
    """S_0 .. S_depth.  Validates every generator first."""
    for g in spec.generators:
        rep = validate(g)
        if not rep.all_pass:
            failed = [k for k, v in rep.conditions.items() if not v]
            raise InvalidGenerator(f"generator fails conditions {failed}")
    surfaces = [cube_surface(spec)]
    for j in range(1, depth + 1):
        surfaces.append(substitute(surfaces[-1], j))
    return surfaces


# ---------------------------------------------------------------------------
# cylinders and the combinatorial metric


@dataclass(frozen=True)
class CylinderAddress:
    level: int
    address: tuple


def locate_point(surfaces, p, depth=None):
    """Addresses of all cylinders containing a world point, per level.

    Returns a list `sets` with sets[j] = set of level-j addresses whose
    closed double pyramid contains p.  Descends level by level (cylinder
    pyramids are nested).
    """
    depth = len(surfaces) - 1 if depth is None else depth
    s0 = surfaces[0]
    current = {
        sq.address for sq in s0.squares if s0.pyramid_contains(sq, p)
    }
    sets = [current]
    for j in range(1, depth + 1):
        surf = surfaces[j]
        nxt = set()
        for addr in current:
            for idx in range(len(surf.spec.generator_at(j).squares)):
                cand = addr + (idx,)
                sq = surf._by_address.get(cand)
                if sq is not None and surf.pyramid_contains(sq, p):
                    nxt.add(cand)
        sets.append(nxt)
        current = nxt
    return sets


def _squares_cell_disjoint(sq_a: AddrSquare, sq_b: AddrSquare) -> bool:
    va = set(sq_a.vertices())
    return not any(v in va for v in sq_b.vertices())


def combinatorial_j(surfaces, x, y, depth=None) -> int:
    """j(x, y): least level with disjoint cylinders containing x and y.

    x, y may be world points (tuples of Fractions) or address tuples; points
    on shared cells resolve to every containing cylinder and the minimum is
    taken over all choices.
    """
    depth = len(surfaces) - 1 if depth is None else depth

    def addr_sets(obj):
        if isinstance(obj, tuple) and obj and isinstance(obj[0], int):
            return [
                {obj[: j + 1]} if j + 1 <= len(obj) else None
                for j in range(depth + 1)
            ]
        return locate_point(surfaces, obj, depth)

    ax, ay = addr_sets(x), addr_sets(y)
    for j in range(depth + 1):
        if ax[j] is None or ay[j] is None or not ax[j] or not ay[j]:
            break
        surf = surfaces[j]
        for a in ax[j]:
            for b in ay[j]:
                if _squares_cell_disjoint(surf.by_address(a), surf.by_address(b)):
                    return j
    raise Unresolved(depth)


def check_pseudometric(surfaces, pairs, depth=None):
    """Verify 2 delta_j / N_max <= |x-y| <= 2 sqrt2 N_max delta_j exactly.

    `pairs` are pairs of lattice vertices of the deepest surface (exact points
    of the snowsphere).  Comparisons are exact on squared quantities.
    """
    depth = len(surfaces) - 1 if depth is None else depth
    nmax = surfaces[0].spec.n_max
    deep = surfaces[depth]
    results = []
    worst_lo = None
    worst_hi = None
    for (va, vb) in pairs:
        pa = deep.world_point(va)
        pb = deep.world_point(vb)
        try:
            j = combinatorial_j(surfaces, pa, pb, depth)
        except Unresolved:
            results.append({"pair": (va, vb), "resolved": False})
            continue
        d2 = eg.dist2_euclid(pa, pb)
        dj = Fraction(1)
        for lvl in range(1, j + 1):
            dj /= surfaces[0].spec.generator_at(lvl).n
        lo2 = 4 * dj * dj / (nmax * nmax)
        hi2 = 8 * nmax * nmax * dj * dj
        ok = lo2 <= d2 <= hi2
        ratio_lo = float(d2 / lo2)
        ratio_hi = float(hi2 / d2)
        if worst_lo is None or ratio_lo < worst_lo:
            worst_lo = ratio_lo
        if worst_hi is None or ratio_hi < worst_hi:
            worst_hi = ratio_hi
        results.append({"pair": (va, vb), "resolved": True, "j": j, "ok": ok})
    return {
        "pairs": results,
        "all_ok": all(r["ok"] for r in results if r.get("resolved")),
        "worst_lower_slack": worst_lo,
        "worst_upper_slack": worst_hi,
    }


# ---------------------------------------------------------------------------
# localized exact Hausdorff machinery (integer arithmetic)


def _sq_bounds(sq: AddrSquare):
    vs = sq.vertices()
    return (
        tuple(min(v[i] for v in vs) for i in range(3)),
        tuple(max(v[i] for v in vs) for i in range(3)),
    )


def _point_sq_dist_int(p, lo, hi) -> int:
    """Max-norm distance from integer point to axis-aligned box [lo, hi]."""
    d = 0
    for i in range(3):
        gi = max(lo[i] - p[i], p[i] - hi[i], 0)
        if gi > d:
            d = gi
    return d


class _NeighborIndex:
    """Cell-adjacency of addressed squares via shared lattice vertices."""

    def __init__(self, surface: ApproxSurface):
        self.surface = surface
        self.vmap, _ = surface._cells()

    def neighbors(self, sq: AddrSquare):
        seen = {sq.address}
        out = [sq]
        for v in sq.vertices():
            for t in self.vmap[v]:
                if t.address not in seen:
                    seen.add(t.address)
                    out.append(t)
        return out


def _descendants(surface_from, surface_to, address):
    """Addresses in surface_to below `address` of surface_from."""
    pref = len(address)
    return [s for s in surface_to.squares if s.address[:pref] == address]


def directed_hdist_squares(from_faces, to_faces, refine: int):
    """sup over the first square set of max-norm distance to the second.

    Squares are (lo, hi) integer boxes at a COMMON scale; `refine` subdivides
    each source square edge.  Returns (lower, upper) ints scaled by `refine`:
    the caller divides by (scale * refine).  Exact when lower == upper.
    """
    lower = 0
    upper = 0
    tos = [
        (tuple(c * refine for c in lo), tuple(c * refine for c in hi))
        for lo, hi in to_faces
    ]
    for lo, hi in from_faces:
        lo = tuple(c * refine for c in lo)
        hi = tuple(c * refine for c in hi)
        dims = [i for i in range(3) if hi[i] > lo[i]]
        flat = [i for i in range(3) if hi[i] == lo[i]]
        steps0 = range(lo[dims[0]], hi[dims[0]] + 1) if dims else [lo[0]]
        # iterate subsquare corners; evaluate exact point distances
        pts = []
        if len(dims) == 2:
            for a in range(lo[dims[0]], hi[dims[0]] + 1):
                for b in range(lo[dims[1]], hi[dims[1]] + 1):
                    p = [0, 0, 0]
                    p[dims[0]] = a
                    p[dims[1]] = b
                    p[flat[0]] = lo[flat[0]]
                    pts.append(tuple(p))
        else:
            pts.append(lo)
        dist_at = {}
        for p in pts:
            d = min(_point_sq_dist_int(p, tlo, thi) for tlo, thi in tos)
            dist_at[p] = d
            if d > lower:
                lower = d
        # per-subsquare certified upper bound: min over targets of max over
        # the 4 corners of the point distance to that single target
        if len(dims) == 2:
            for a in range(lo[dims[0]], hi[dims[0]]):
                for b in range(lo[dims[1]], hi[dims[1]]):
                    corners = []
                    for da in (0, 1):
                        for db in (0, 1):
                            p = [0, 0, 0]
                            p[dims[0]] = a + da
                            p[dims[1]] = b + db
                            p[flat[0]] = lo[flat[0]]
                            corners.append(tuple(p))
                    u = min(
                        max(_point_sq_dist_int(p, tlo, thi) for p in corners)
                        for tlo, thi in tos
                    )
                    if u > upper:
                        upper = u
        else:
            u = dist_at[pts[0]]
            if u > upper:
                upper = u
    return lower, max(lower, upper)


def hausdorff_step(surfaces, j: int, refine: int = 2):
    """Certified interval for Hdist_inf(S_j, S_{j+1}), localized per square."""
    sj, sk = surfaces[j], surfaces[j + 1]
    ratio = sk.scale // sj.scale
    idx = _NeighborIndex(sj)
    lo_all, up_all = 0, 0
    for q in sj.squares:
        local = idx.neighbors(q)
        cand = []
        for nb in local:
            for ch in _descendants(sj, sk, nb.address):
                cand.append(_sq_bounds(ch))
        # d_{S_{j+1}}(Q): Q at the fine scale
        qlo, qhi = _sq_bounds(q)
        qfine = (tuple(c * ratio for c in qlo), tuple(c * ratio for c in qhi))
        l1, u1 = directed_hdist_squares([qfine], cand, refine)
        # d_{S_j}(children of Q): targets are the local S_j squares at fine scale
        tgt = []
        for nb in local:
            nlo, nhi = _sq_bounds(nb)
            tgt.append((tuple(c * ratio for c in nlo), tuple(c * ratio for c in nhi)))
        own = [_sq_bounds(ch) for ch in _descendants(sj, sk, q.address)]
        l2, u2 = directed_hdist_squares(own, tgt, refine)
        lo_all = max(lo_all, l1, l2)
        up_all = max(up_all, u1, u2)
    scale = sk.scale * refine
    return Fraction(lo_all, scale), Fraction(up_all, scale)


def hausdorff_chain(surfaces, resolution=Fraction(1, 10**9)):
    """Check Eq-level Hausdorff bounds between consecutive and all built levels.

    Asserts Hdist_inf(S_j, S_{j+1}) <= (1/2 - 3/(2 N_{j+1})) delta_j and the
    finite-depth surrogate bound Hdist(S_j, S_k) <= delta_j (1/2 - 1/N_max).
    """
    spec = surfaces[0].spec
    nmax = spec.n_max
    steps = []
    report = {"steps": [], "pairs": [], "all_ok": True}
    for j in range(len(surfaces) - 1):
        refine = 2
        while True:
            lo, up = hausdorff_step(surfaces, j, refine)
            if lo == up or up - lo <= resolution:
                break
            refine *= 2
        dj = surfaces[j].delta
        n_next = spec.generator_at(j + 1).n
        bound = (Fraction(1, 2) - Fraction(3, 2 * n_next)) * dj
        ok = up <= bound
        steps.append((lo, up))
        report["steps"].append(
            {"j": j, "lower": lo, "upper": up, "bound": bound, "ok": ok}
        )
        report["all_ok"] &= ok
    # chained bounds for non-consecutive levels (triangle inequality)
    for j in range(len(surfaces) - 1):
        acc = Fraction(0)
        for k in range(j + 1, len(surfaces)):
            acc += steps[k - 1][1]
            bound = surfaces[j].delta * (Fraction(1, 2) - Fraction(1, nmax))
            ok = acc <= bound
            report["pairs"].append(
                {"j": j, "k": k, "upper": acc, "bound": bound, "ok": ok}
            )
            report["all_ok"] &= ok
    return report


def face_limit_bounds(surfaces):
    """Containment of generated sub-surfaces in their base double pyramids.

    For every built level j and delta_j-square Q: all deeper squares below Q
    stay in the closed pyramid P(Q); interior sub-pyramids of the next level
    keep Euclidean distance sqrt2 * delta_{j+1} / 2 from the boundary of P(Q).
    """
    from .errors import ContainmentViolation

    report = {"levels": [], "ok": True, "min_clearance2": None}
    depth = len(surfaces) - 1
    for j in range(depth):
        surf = surfaces[j]
        deep = surfaces[depth]
        ratio = deep.scale // surf.scale
        nxt = surfaces[j + 1]
        r_next = nxt.scale // surf.scale
        level_ok = True
        for q in surf.squares:
            half = Fraction(ratio, 2)
            k = q.axis // 2
            dims = [d for d in range(3) if d != k]
            cen = [Fraction(2 * a + 1, 2) * ratio for a in q.anchor]
            cen[k] = Fraction(q.anchor[k] * ratio)

            def functional(p):
                du = abs(p[dims[0]] - cen[dims[0]])
                dv = abs(p[dims[1]] - cen[dims[1]])
                dw = abs(p[k] - cen[k])
                return max(du, dv) + dw

            for ch in _descendants(surf, deep, q.address):
                for v in ch.vertices():
                    if functional(v) > half:
                        raise ContainmentViolation(
                            f"square {ch.address} escapes pyramid of {q.address}"
                        )
            # interior children of the next level: pyramid clearance
            for ch in _descendants(surf, nxt, q.address):
                vs = ch.vertices()
                # interior = not touching the boundary of Q's base square
                ratio2 = r_next
                qlo = tuple(a * ratio2 for a in q.anchor)
                qhi = tuple(
                    (q.anchor[i] + (0 if i == k else 1)) * ratio2 for i in range(3)
                )
                on_boundary = False
                for v in vs:
                    for i in (dims[0], dims[1]):
                        if v[i] in (qlo[i], qhi[i]):
                            on_boundary = True
                if on_boundary:
                    continue
                # clearance of P(ch) from boundary of P(Q), squared Euclidean
                half_q = Fraction(r_next, 2)
                cenq = [Fraction(2 * a + 1, 2) * (r_next // ratio2) for a in q.anchor]
                # recompute in the next-level lattice
                cen2 = [Fraction(2 * a + 1, 2) * r_next for a in q.anchor]
                cen2[k] = Fraction(q.anchor[k] * r_next)
                kc = ch.axis // 2
                cdims = [d for d in range(3) if d != kc]
                cenc = [Fraction(2 * a + 1, 2) for a in ch.anchor]
                cenc[kc] = Fraction(ch.anchor[kc])
                tips = []
                for sgn in (1, -1):
                    t = list(cenc)
                    t[kc] += Fraction(sgn, 2)
                    tips.append(tuple(t))
                pts = [tuple(Fraction(c) for c in v) for v in vs] + tips
                # distance to each of the 8 faces of P(Q): Euclidean
                # point-plane distance = |half - (s1 (p_u - c_u) + s3 (p_k - c_k))| / sqrt2
                min_d2 = None
                for p in pts:
                    for i in dims:
                        for s1 in (1, -1):
                            for s3 in (1, -1):
                                num = abs(
                                    Fraction(r_next, 2)
                                    - (s1 * (p[i] - cen2[i]) + s3 * (p[k] - cen2[k]))
                                )
                                d2 = num * num / 2
                                if min_d2 is None or d2 < min_d2:
                                    min_d2 = d2
                need = Fraction(1, 2)  # (sqrt2 * 1 / 2)^2 in next-level units
                if min_d2 < need:
                    level_ok = False
                if (
                    report["min_clearance2"] is None
                    or min_d2 / (nxt.scale * nxt.scale) < report["min_clearance2"]
                ):
                    report["min_clearance2"] = min_d2 / (nxt.scale * nxt.scale)
        report["levels"].append({"j": j, "ok": level_ok})
        report["ok"] &= level_ok
    return report
