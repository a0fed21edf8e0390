"""Exact polyhedral computation over the rationals.

Polyhedra are kept in generator form (vertices + rays + lines); the
half-space form is derived on demand for subspace intersections.  One
exact primitive, a two-phase simplex with Bland's anti-cycling rule,
backs every predicate: point membership, vertex redundancy, relative
interior tests, and optimization.

Facet enumeration is brute force over vertex subsets inside the affine
hull, guarded by a dimension ceiling; instances here are small by
construction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .linalg import RatMatrix, Vec, vec_add, vec_dot, vec_is_zero, vec_scale, vec_sub, zero_vec

FACET_DIMENSION_CEILING = 5


class DimensionCeilingError(Exception):
    """Facet enumeration requested above the supported ambient dimension."""


# ---------------------------------------------------------------------------
# linear programming
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearConstraint:
    coeffs: tuple[Fraction, ...]
    rel: str  # "<=", ">=", "=="
    rhs: Fraction

    def __post_init__(self):
        if self.rel not in ("<=", ">=", "=="):
            raise ValueError(f"bad relation {self.rel!r}")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        object.__setattr__(self, "rhs", Fraction(self.rhs))


def constraint(coeffs, rel, rhs) -> LinearConstraint:
    return LinearConstraint(tuple(Fraction(c) for c in coeffs), rel, Fraction(rhs))


@dataclass(frozen=True)
class LpResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    point: tuple[Fraction, ...] | None = None

    @property
    def is_feasible(self) -> bool:
        return self.status == "optimal"


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction], basis: list[int], ncols: int):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.ncols = ncols

    def pivot(self, r: int, c: int) -> None:
        piv = self.rows[r][c]
        inv = 1 / piv
        self.rows[r] = [x * inv for x in self.rows[r]]
        self.rhs[r] *= inv
        for i in range(len(self.rows)):
            if i != r and self.rows[i][c] != 0:
                f = self.rows[i][c]
                self.rows[i] = [x - f * y for x, y in zip(self.rows[i], self.rows[r])]
                self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = c

    def reduced_costs(self, cost: list[Fraction]) -> list[Fraction]:
        red = list(cost)
        for r, b in enumerate(self.basis):
            cb = cost[b]
            if cb != 0:
                row = self.rows[r]
                for j in range(self.ncols):
                    if row[j] != 0:
                        red[j] -= cb * row[j]
        return red

    def maximize(self, cost: list[Fraction]) -> str:
        """Bland's rule simplex on the current basis; returns 'optimal' or
        'unbounded'."""
        while True:
            red = self.reduced_costs(cost)
            enter = None
            for j in range(self.ncols):
                if red[j] > 0:
                    enter = j
                    break
            if enter is None:
                return "optimal"
            leave = None
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = self.rhs[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best:
                        best = key
                        leave = i
            if leave is None:
                return "unbounded"
            self.pivot(leave, enter)

    def objective_value(self, cost: list[Fraction]) -> Fraction:
        return sum(cost[b] * self.rhs[r] for r, b in enumerate(self.basis))


def lp_solve(objective, constraints, num_vars: int, nonneg=None, maximize: bool = True) -> LpResult:
    """Exact simplex over free or sign-restricted variables.

    objective: coefficient sequence or None for pure feasibility.
    nonneg: per-variable bools (default all False, i.e. free variables).
    Every returned point satisfies the constraints exactly; optimality is
    certified by nonpositive reduced costs at termination.
    """
    if nonneg is None:
        nonneg = [False] * num_vars
    obj = [Fraction(c) for c in objective] if objective is not None else None
    if obj is not None and not maximize:
        obj = [-c for c in obj]

    # column layout: each free variable splits into (+, -); nonneg keeps one
    col_of: list[tuple[int, int | None]] = []
    ncols = 0
    for j in range(num_vars):
        if nonneg[j]:
            col_of.append((ncols, None))
            ncols += 1
        else:
            col_of.append((ncols, ncols + 1))
            ncols += 2
    nstruct = ncols

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    rels: list[str] = []
    for con in constraints:
        coeffs = [Fraction(0)] * nstruct
        for j in range(num_vars):
            c = Fraction(con.coeffs[j]) if j < len(con.coeffs) else Fraction(0)
            if c == 0:
                continue
            p, m = col_of[j]
            coeffs[p] += c
            if m is not None:
                coeffs[m] -= c
        b = Fraction(con.rhs)
        rel = con.rel
        if b < 0:
            coeffs = [-x for x in coeffs]
            b = -b
            rel = {"<=": ">=", ">=": "<=", "==": "=="}[rel]
        rows.append(coeffs)
        rhs.append(b)
        rels.append(rel)

    # slacks / surplus / artificials
    total = nstruct
    slack_col: list[int | None] = []
    for rel in rels:
        if rel == "<=":
            slack_col.append(total)
            total += 1
        elif rel == ">=":
            slack_col.append(total)
            total += 1
        else:
            slack_col.append(None)
    art_col: list[int | None] = []
    for rel in rels:
        if rel == "<=":
            art_col.append(None)
        else:
            art_col.append(total)
            total += 1

    full_rows = []
    basis = []
    for i, row in enumerate(rows):
        ext = row + [Fraction(0)] * (total - nstruct)
        if rels[i] == "<=":
            ext[slack_col[i]] = Fraction(1)
            basis.append(slack_col[i])
        elif rels[i] == ">=":
            ext[slack_col[i]] = Fraction(-1)
            ext[art_col[i]] = Fraction(1)
            basis.append(art_col[i])
        else:
            ext[art_col[i]] = Fraction(1)
            basis.append(art_col[i])
        full_rows.append(ext)

    tab = _Tableau(full_rows, list(rhs), basis, total)
    artificials = {c for c in art_col if c is not None}

    if artificials:
        phase1 = [Fraction(-1) if j in artificials else Fraction(0) for j in range(total)]
        status = tab.maximize(phase1)
        assert status == "optimal", "phase 1 is bounded"
        if tab.objective_value(phase1) != 0:
            return LpResult("infeasible")
        # drive remaining artificials out of the basis
        for r in range(len(tab.rows)):
            if tab.basis[r] in artificials:
                pivot_col = None
                for j in range(total):
                    if j not in artificials and tab.rows[r][j] != 0:
                        pivot_col = j
                        break
                if pivot_col is not None:
                    tab.pivot(r, pivot_col)
        # drop rows still basic in an artificial (redundant constraints)
        keep = [r for r in range(len(tab.rows)) if tab.basis[r] not in artificials]
        tab.rows = [tab.rows[r] for r in keep]
        tab.rhs = [tab.rhs[r] for r in keep]
        tab.basis = [tab.basis[r] for r in keep]
        # freeze artificial columns at zero
        for row in tab.rows:
            for c in artificials:
                row[c] = Fraction(0)

    cost = [Fraction(0)] * total
    if obj is not None:
        for j in range(num_vars):
            p, m = col_of[j]
            cost[p] += obj[j]
            if m is not None:
                cost[m] -= obj[j]
        status = tab.maximize(cost)
        if status == "unbounded":
            return LpResult("unbounded")

    values = [Fraction(0)] * total
    for r, b in enumerate(tab.basis):
        values[b] = tab.rhs[r]
    point = []
    for j in range(num_vars):
        p, m = col_of[j]
        point.append(values[p] - (values[m] if m is not None else Fraction(0)))
    value = None
    if obj is not None:
        value = sum(o * x for o, x in zip(obj, point))
        if not maximize:
            value = -value
    return LpResult("optimal", value, tuple(point))


# ---------------------------------------------------------------------------
# generator-form polyhedra
# ---------------------------------------------------------------------------


def _primitive_direction(v: Vec) -> Vec:
    """Scale to a primitive integer vector, keeping orientation."""
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g == 0:
        return tuple(Fraction(0) for _ in v)
    return tuple(Fraction(x, g) for x in ints)


@dataclass(frozen=True)
class GenPolyhedron:
    """conv(vertices) + cone(rays) + span(lines); empty vertex list means
    the empty set."""

    dim: int
    vertices: tuple[Vec, ...] = ()
    rays: tuple[Vec, ...] = ()
    lines: tuple[Vec, ...] = ()

    def __post_init__(self):
        for group in (self.vertices, self.rays, self.lines):
            for v in group:
                if len(v) != self.dim:
                    raise ValueError("generator dimension mismatch")

    @staticmethod
    def polytope(vertices, dim=None) -> "GenPolyhedron":
        vertices = [tuple(Fraction(x) for x in v) for v in vertices]
        if dim is None:
            if not vertices:
                raise ValueError("dimension required for empty polytope")
            dim = len(vertices[0])
        return canonical(GenPolyhedron(dim, tuple(vertices)))

    @staticmethod
    def point(v) -> "GenPolyhedron":
        v = tuple(Fraction(x) for x in v)
        return GenPolyhedron(len(v), (v,))

    @staticmethod
    def empty(dim: int) -> "GenPolyhedron":
        return GenPolyhedron(dim, ())

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @property
    def is_polytope(self) -> bool:
        return bool(self.vertices) and not self.rays and not self.lines


@dataclass(frozen=True)
class ControlSet:
    """Finite union of generator-form polyhedra in one ambient dimension."""

    components: tuple[GenPolyhedron, ...]

    def __post_init__(self):
        if not self.components:
            raise ValueError("control set needs at least one component")
        d = self.components[0].dim
        if any(c.dim != d for c in self.components):
            raise ValueError("components must share the ambient dimension")

    @property
    def dim(self) -> int:
        return self.components[0].dim

    @property
    def is_single_polytope(self) -> bool:
        return len(self.components) == 1 and self.components[0].is_polytope

    @staticmethod
    def single(p: GenPolyhedron) -> "ControlSet":
        return ControlSet((p,))


def contains_point(p: GenPolyhedron, x: Vec) -> bool:
    return membership_coefficients(p, x) is not None


def membership_coefficients(p: GenPolyhedron, x: Vec):
    """Convex/conic/free coefficients expressing x in the generators, or
    None when x is outside."""
    if p.is_empty:
        return None
    nv, nr, nl = len(p.vertices), len(p.rays), len(p.lines)
    n = nv + nr + nl
    cons = []
    for i in range(p.dim):
        coeffs = [g[i] for g in p.vertices] + [g[i] for g in p.rays] + [g[i] for g in p.lines]
        cons.append(constraint(coeffs, "==", x[i]))
    cons.append(constraint([1] * nv + [0] * (nr + nl), "==", 1))
    nonneg = [True] * (nv + nr) + [False] * nl
    res = lp_solve(None, cons, n, nonneg=nonneg)
    if not res.is_feasible:
        return None
    pt = res.point
    return pt[:nv], pt[nv:nv + nr], pt[nv + nr:]


def _hull_2d(points: list[Vec]) -> list[Vec]:
    """Exact monotone-chain convex hull (strict turns only)."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[Vec] = []
    for pt in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], pt) <= 0:
            lower.pop()
        lower.append(pt)
    upper: list[Vec] = []
    for pt in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], pt) <= 0:
            upper.pop()
        upper.append(pt)
    return lower[:-1] + upper[:-1]


def _extreme_vertices_lp(vertices: list[Vec], rays, lines) -> list[Vec]:
    kept = []
    for i, v in enumerate(vertices):
        others = vertices[:i] + vertices[i + 1:]
        if not others:
            kept.append(v)
            continue
        q = GenPolyhedron(len(v), tuple(others), tuple(rays), tuple(lines))
        if not contains_point(q, v):
            kept.append(v)
    return kept


def canonical(p: GenPolyhedron) -> GenPolyhedron:
    """Deduplicate generators and drop redundant ones."""
    vertices = list(dict.fromkeys(p.vertices))
    lines = []
    if p.lines:
        m = RatMatrix.from_rows([list(l) for l in p.lines])
        red, pivots = m.rref()
        lines = [_primitive_direction(tuple(red[i])) for i in range(len(pivots))]
    rays = []
    seen = set()
    for r in p.rays:
        d = _primitive_direction(r)
        if vec_is_zero(d) or d in seen:
            continue
        seen.add(d)
        rays.append(d)
    if lines:
        # rays inside the lineality space are redundant
        lm = RatMatrix.from_rows([list(l) for l in lines]).transpose()
        rays = [r for r in rays if lm.solve(r) is None]
    if len(rays) > 1:
        kept_rays = []
        for i, r in enumerate(rays):
            others = rays[:i] + rays[i + 1:]
            cons = []
            n = len(others) + len(lines)
            for k in range(p.dim):
                coeffs = [o[k] for o in others] + [l[k] for l in lines]
                cons.append(constraint(coeffs, "==", r[k]))
            nonneg = [True] * len(others) + [False] * len(lines)
            res = lp_solve(None, cons, n, nonneg=nonneg)
            if not res.is_feasible:
                kept_rays.append(r)
        rays = kept_rays
    if len(vertices) > 1:
        if p.dim == 2 and not rays and not lines:
            vertices = _hull_2d(vertices)
        else:
            vertices = _extreme_vertices_lp(vertices, rays, lines)
    return GenPolyhedron(p.dim, tuple(vertices), tuple(rays), tuple(lines))


def minkowski_sum(p: GenPolyhedron, q: GenPolyhedron) -> GenPolyhedron:
    if p.dim != q.dim:
        raise ValueError("ambient dimension mismatch")
    if p.is_empty or q.is_empty:
        return GenPolyhedron.empty(p.dim)
    vertices = tuple(vec_add(a, b) for a in p.vertices for b in q.vertices)
    return canonical(GenPolyhedron(p.dim, vertices, p.rays + q.rays, p.lines + q.lines))


def negate(p: GenPolyhedron) -> GenPolyhedron:
    return GenPolyhedron(
        p.dim,
        tuple(vec_scale(v, Fraction(-1)) for v in p.vertices),
        tuple(vec_scale(r, Fraction(-1)) for r in p.rays),
        p.lines,
    )


def linear_image(a: RatMatrix, p: GenPolyhedron) -> GenPolyhedron:
    if a.cols != p.dim:
        raise ValueError("matrix columns must match polyhedron dimension")
    if p.is_empty:
        return GenPolyhedron.empty(a.rows)
    return canonical(GenPolyhedron(
        a.rows,
        tuple(a.matvec(v) for v in p.vertices),
        tuple(a.matvec(r) for r in p.rays),
        tuple(a.matvec(l) for l in p.lines),
    ))


def polytope_is_bounded_check(p: GenPolyhedron) -> bool:
    return p.is_polytope


# ---------------------------------------------------------------------------
# facets and half-space form
# ---------------------------------------------------------------------------


def _affine_basis(vertices: tuple[Vec, ...]) -> tuple[Vec, list[Vec]]:
    """(base point, independent difference directions)."""
    v0 = vertices[0]
    diffs = [vec_sub(v, v0) for v in vertices[1:]]
    if not diffs:
        return v0, []
    m = RatMatrix.from_rows([list(d) for d in diffs])
    red, pivots = m.rref()
    return v0, [tuple(red[i]) for i in range(len(pivots))]


def facet_normals(p: GenPolyhedron, ceiling: int = FACET_DIMENSION_CEILING) -> list[Vec]:
    """Outward normals of the facets of conv(vertices), primitive rational,
    deduplicated up to positive scaling.

    Facets are taken relative to the affine hull; a polytope of affine
    dimension zero has none.  Normals of lower-dimensional polytopes are
    lifted back to the ambient space orthogonally to the hull.
    """
    if not p.is_polytope:
        raise ValueError("facet enumeration requires a polytope")
    if p.dim > ceiling:
        raise DimensionCeilingError(
            f"ambient dimension {p.dim} exceeds the facet-enumeration ceiling {ceiling}")
    v0, basis = _affine_basis(p.vertices)
    adim = len(basis)
    if adim == 0:
        return []
    bmat = RatMatrix.from_rows([list(b) for b in basis])  # adim x dim
    gram_inv = (bmat @ bmat.transpose()).inverse()
    assert gram_inv is not None

    def coords(v: Vec) -> Vec:
        return gram_inv.matvec(bmat.matvec(vec_sub(v, v0)))

    pts = [coords(v) for v in p.vertices]
    normals: list[Vec] = []
    seen: set[Vec] = set()
    for subset in itertools.combinations(range(len(pts)), adim):
        chosen = [pts[i] for i in subset]
        if adim == 1:
            n_local: Vec | None = (Fraction(1),)
        else:
            diffs = [vec_sub(c, chosen[0]) for c in chosen[1:]]
            m = RatMatrix.from_rows([list(d) for d in diffs])
            kb = m.kernel_basis()
            n_local = kb[0] if len(kb) == 1 else None
        if n_local is None:
            continue
        c_local = vec_dot(n_local, chosen[0])
        sides = [vec_dot(n_local, q) - c_local for q in pts]
        if all(s <= 0 for s in sides):
            pass
        elif all(s >= 0 for s in sides):
            n_local = vec_scale(n_local, Fraction(-1))
            c_local = -c_local
            sides = [-s for s in sides]
        else:
            continue
        support = [i for i, s in enumerate(sides) if s == 0]
        if len(support) < adim:
            continue
        sdiffs = [vec_sub(pts[i], pts[support[0]]) for i in support[1:]]
        if sdiffs and RatMatrix.from_rows([list(d) for d in sdiffs]).rank() != adim - 1:
            continue
        if adim == 1 and len(support) != 1:
            continue
        # lift: N = B^T gram_inv^T n_local is orthogonal to nothing extra
        lifted = bmat.transpose().matvec(gram_inv.transpose().matvec(n_local))
        lifted = _primitive_direction(lifted)
        if lifted not in seen and not vec_is_zero(lifted):
            seen.add(lifted)
            normals.append(lifted)
    return normals


def h_representation(p: GenPolyhedron, ceiling: int = FACET_DIMENSION_CEILING):
    """(inequalities, equalities) with rows (normal, offset): n.x <= c and
    n.x == c; together they carve out the polytope exactly."""
    if not p.is_polytope:
        raise ValueError("half-space form requires a polytope")
    v0, basis = _affine_basis(p.vertices)
    eqs = []
    bm = RatMatrix.from_rows([list(b) for b in basis]) if basis else None
    if bm is None:
        complement = RatMatrix.identity(p.dim).to_rows()
        comp_rows = [tuple(r) for r in complement]
    else:
        comp_rows = bm.kernel_basis()
    for n in comp_rows:
        eqs.append((tuple(n), vec_dot(n, v0)))
    ineqs = []
    for n in facet_normals(p, ceiling):
        c = max(vec_dot(n, v) for v in p.vertices)
        ineqs.append((n, c))
    return ineqs, eqs


def vertices_from_h_rep(ineqs, eqs, dim: int) -> list[Vec]:
    """Brute-force vertex enumeration of a bounded H-polytope."""
    eq_rows = [list(n) for n, _ in eqs]
    eq_rhs = [c for _, c in eqs]
    base_rank = RatMatrix.from_rows(eq_rows).rank() if eq_rows else 0
    need = dim - base_rank
    out: list[Vec] = []
    seen = set()
    idx = range(len(ineqs))
    for subset in itertools.combinations(idx, need):
        rows = eq_rows + [list(ineqs[i][0]) for i in subset]
        rhs = eq_rhs + [ineqs[i][1] for i in subset]
        m = RatMatrix.from_rows(rows) if rows else RatMatrix.zeros(0, dim)
        if rows and m.rank() != dim:
            continue
        if not rows and dim > 0:
            continue
        sol = m.solve(tuple(rhs)) if rows else zero_vec(dim)
        if sol is None:
            continue
        ok = all(vec_dot(n, sol) <= c for n, c in ineqs) and \
            all(vec_dot(n, sol) == c for n, c in eqs)
        if ok and sol not in seen:
            seen.add(sol)
            out.append(sol)
    return out


def relative_interior_contains_origin(p: GenPolyhedron) -> bool:
    """True iff 0 is a strictly positive convex combination of the vertices."""
    if not p.is_polytope:
        raise ValueError("relative interior test requires a polytope")
    m = len(p.vertices)
    # variables: lambda_1..lambda_m, t; maximize t subject to
    # sum lambda v = 0, sum lambda = 1, lambda_i >= t
    cons = []
    for i in range(p.dim):
        cons.append(constraint([v[i] for v in p.vertices] + [0], "==", 0))
    cons.append(constraint([1] * m + [0], "==", 1))
    for i in range(m):
        coeffs = [0] * (m + 1)
        coeffs[i] = 1
        coeffs[m] = -1
        cons.append(constraint(coeffs, ">=", 0))
    obj = [0] * m + [1]
    res = lp_solve(obj, cons, m + 1)
    return res.is_feasible and res.value is not None and res.value > 0


def intersect_with_subspace(p: GenPolyhedron, basis: list[Vec],
                            ceiling: int = FACET_DIMENSION_CEILING) -> GenPolyhedron:
    """Intersect a polytope with span(basis), returned in basis coordinates."""
    if not p.is_polytope and not p.is_empty:
        raise ValueError("subspace intersection requires a polytope")
    k = len(basis)
    if p.is_empty:
        return GenPolyhedron.empty(k)
    ineqs, eqs = h_representation(p, ceiling)
    sub_ineqs = []
    for n, c in ineqs:
        coeffs = tuple(vec_dot(n, b) for b in basis)
        sub_ineqs.append((coeffs, c))
    sub_eqs = []
    for n, c in eqs:
        coeffs = tuple(vec_dot(n, b) for b in basis)
        sub_eqs.append((coeffs, c))
    if k == 0:
        ok = all(c >= 0 for _, c in sub_ineqs) and all(c == 0 for _, c in sub_eqs)
        return GenPolyhedron(0, ((),)) if ok else GenPolyhedron.empty(0)
    verts = vertices_from_h_rep(sub_ineqs, sub_eqs, k)
    if not verts:
        return GenPolyhedron.empty(k)
    return canonical(GenPolyhedron(k, tuple(verts)))


def maximize_over(p: GenPolyhedron, direction: Vec) -> LpResult:
    """Maximize <direction, x> over the polyhedron via its generators."""
    if p.is_empty:
        return LpResult("infeasible")
    nv, nr, nl = len(p.vertices), len(p.rays), len(p.lines)
    n = nv + nr + nl
    cons = [constraint([1] * nv + [0] * (nr + nl), "==", 1)]
    obj = [vec_dot(direction, g) for g in p.vertices + p.rays + p.lines]
    nonneg = [True] * (nv + nr) + [False] * nl
    res = lp_solve(obj, cons, n, nonneg=nonneg)
    if res.status != "optimal":
        return res
    coeffs = res.point
    x = zero_vec(p.dim)
    for c, g in zip(coeffs, p.vertices + p.rays + p.lines):
        x = vec_add(x, vec_scale(g, c))
    return LpResult("optimal", res.value, x)
