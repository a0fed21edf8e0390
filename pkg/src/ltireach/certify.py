"""Non-reachability certificates for normalized systems.

Directions tau are tested as separators of the closure of the reachable
set from the target: the supremum of <x, tau> over the closure has the
closed form

    sum_{i<N} max_{v in Ext(U)} <A^i v, tau>  +  <A^N (I-A)^{-1} u, tau>

where u is a vertex that eventually maximizes <A^n ., tau> and N a
threshold past which it dominates every other vertex.  Both are computed
exactly: the sequence <A^n (v-w), tau> expands over the eigenvalue basis
as sum C(n,j) lam_i^n c_ij, its eventual sign is the sign of the
dominant coefficient, and the threshold is certified by an explicit
tail-domination inequality checked with exact algebraic comparisons.

Candidate directions come from geometry (target facets, partial-sum
facets, left eigenvectors, small vanishing-condition patterns) and, as a
completeness fallback, from a fair enumeration of all vectors with real
algebraic entries.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb

from .exactnum import ALG_ONE, ALG_ZERO, IntPoly, RealAlg, as_alg, sturm_isolate_real_roots
from .geometry import (
    DimensionCeilingError,
    GenPolyhedron,
    _affine_basis,
    _primitive_direction,
    facet_normals,
)
from .linalg import (
    AlgMatrix,
    RatMatrix,
    SpectralData,
    Vec,
    alg_kernel_basis,
    expand_inner_product,
    vec_sub,
)

AlgVec = tuple[RealAlg, ...]


class SeqKind(Enum):
    IDENTICALLY_ZERO = "identically_zero"
    ULTIMATELY_POSITIVE = "ultimately_positive"
    ULTIMATELY_NEGATIVE = "ultimately_negative"


@dataclass(frozen=True)
class SeqClass:
    kind: SeqKind
    threshold: int | None = None
    dominant: tuple[int, int] | None = None


@dataclass(frozen=True)
class SeparatorCertificate:
    """Everything an auditor needs to recheck sup <= min from scratch.

    min_over_q is None when the target is empty (minimum over the empty
    set, +infinity); the certificate is then vacuously valid.
    """

    tau: AlgVec
    bound: RealAlg
    maximizer: Vec
    threshold: int
    sup_value: RealAlg
    min_over_q: RealAlg | None


@dataclass(frozen=True)
class DomSpace:
    basis: tuple[AlgVec, ...]


def _alg_vec(v) -> AlgVec:
    return tuple(as_alg(x) for x in v)


def _first_true_at_least(start: int, pred) -> int:
    """Least n >= start with pred(n) true, for a predicate that stays true
    once true; doubling then bisection."""
    lo = start
    hi = start
    while not pred(hi):
        lo = hi + 1
        hi = 2 * hi + 1
    while lo < hi:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


class _PowerCache:
    def __init__(self, base: RealAlg):
        self.base = base
        self.cache: dict[int, RealAlg] = {0: ALG_ONE, 1: base}

    def get(self, n: int) -> RealAlg:
        if n in self.cache:
            return self.cache[n]
        half = self.get(n // 2)
        val = half * half
        if n % 2:
            val = val * self.base
        self.cache[n] = val
        return val


def classify_sequence(s: SpectralData, v: Vec, w: Vec, tau) -> SeqClass:
    """Eventual sign of <A^n (v-w), tau>, with a certified threshold.

    The returned threshold N satisfies the tail-domination inequality
    |c0| C(n,j0) lam0^n > sum of the other |c| C(n,j) lam^n for every
    n >= N, so the sign is the dominant coefficient's sign from N on.
    """
    tau = _alg_vec(tau)
    diff = vec_sub(v, w)
    coeffs = expand_inner_product(s, diff, tau)
    nonzero = []
    for i in range(len(s.eigenvalues)):
        for j in range(s.dim):
            c = coeffs[i][j]
            if c.sign() != 0:
                nonzero.append((i, j, c))
    if not nonzero:
        return SeqClass(SeqKind.IDENTICALLY_ZERO)
    i0, j0, c0 = max(nonzero, key=lambda t: (t[0], t[1]))
    kind = SeqKind.ULTIMATELY_POSITIVE if c0.sign() > 0 else SeqKind.ULTIMATELY_NEGATIVE
    others = [(i, j, c) for (i, j, c) in nonzero if (i, j) != (i0, j0)]

    lam0 = s.eigenvalues[i0]
    pow0 = _PowerCache(lam0)
    abs_c0 = abs(c0)
    t_count = len(others)
    crossovers = []
    term_caches = []
    for (i, j, c) in others:
        lam = s.eigenvalues[i]
        powi = _PowerCache(lam)
        term_caches.append((i, j, abs(c), powi))
        start = max(j, j0)

        def ratio_decreasing(n, lam=lam, j=j):
            lhs = lam * (n + 1 - j0)
            rhs = lam0 * (n + 1 - j)
            return lhs.compare(rhs) < 0

        onset = _first_true_at_least(start, ratio_decreasing)

        def share_small(n, j=j, absc=abs(c), powi=powi):
            lhs = absc * (t_count * comb(n, j)) * powi.get(n)
            rhs = abs_c0 * comb(n, j0) * pow0.get(n)
            return lhs.compare(rhs) < 0

        crossovers.append(_first_true_at_least(onset, share_small))
    n_star = max(crossovers, default=j0)
    n_star = max(n_star, j0)

    def domination_holds(n: int) -> bool:
        lhs = abs_c0 * comb(n, j0) * pow0.get(n)
        rhs = ALG_ZERO
        for (i, j, absc, powi) in term_caches:
            rhs = rhs + absc * comb(n, j) * powi.get(n)
        return lhs.compare(rhs) > 0

    threshold = n_star
    while threshold > 0 and domination_holds(threshold - 1):
        threshold -= 1
    return SeqClass(kind, threshold, (i0, j0))


def eventual_maximizer(s: SpectralData, u: GenPolyhedron, tau) -> tuple[Vec, int]:
    """A vertex maximizing <A^n ., tau> for all large n (lexicographically
    smallest among ties) and a threshold N from which it beats every
    vertex at every step."""
    tau = _alg_vec(tau)
    verts = sorted(u.vertices)
    cache: dict[tuple[int, int], SeqClass] = {}

    def cls(ia: int, ib: int) -> SeqClass:
        key = (ia, ib)
        if key not in cache:
            cache[key] = classify_sequence(s, verts[ia], verts[ib], tau)
        return cache[key]

    best = 0
    for i in range(1, len(verts)):
        if cls(best, i).kind is SeqKind.ULTIMATELY_NEGATIVE:
            best = i
    # lexicographically first among vertices tied with the maximal one
    for i in range(len(verts)):
        if i == best:
            break
        if cls(i, best).kind is SeqKind.IDENTICALLY_ZERO:
            best = i
            break
    n = 0
    for i in range(len(verts)):
        if i == best:
            continue
        c = cls(best, i)
        if c.kind is SeqKind.ULTIMATELY_NEGATIVE:
            raise AssertionError("maximizer scan failed; preorder not respected")
        if c.kind is SeqKind.ULTIMATELY_POSITIVE:
            n = max(n, c.threshold or 0)
    return verts[best], n


def sup_in_direction(s: SpectralData, u: GenPolyhedron, tau) -> RealAlg:
    """Exact supremum of <x, tau> over the closure of the reachable set."""
    tau = _alg_vec(tau)
    if s.dim == 0:
        return ALG_ZERO
    maximizer, n = eventual_maximizer(s, u, tau)
    total = ALG_ZERO
    power = RatMatrix.identity(s.dim)
    for _ in range(n):
        best = None
        for v in u.vertices:
            val = _alg_dot(tau, power.matvec(v))
            if best is None or val.compare(best) > 0:
                best = val
        total = total + best
        power = power @ s.matrix
    tail = power @ s.geometric_sum_matrix()
    total = total + _alg_dot(tau, tail.matvec(maximizer))
    return total


def _alg_dot(tau: AlgVec, v) -> RealAlg:
    acc = ALG_ZERO
    for t, x in zip(tau, v):
        acc = acc + t * as_alg(x)
    return acc


def min_over_vertices(q: GenPolyhedron, tau) -> RealAlg | None:
    tau = _alg_vec(tau)
    best = None
    for v in q.vertices:
        val = _alg_dot(tau, v)
        if best is None or val.compare(best) < 0:
            best = val
    return best


def verify_separator(s: SpectralData, u: GenPolyhedron, q: GenPolyhedron, tau) -> SeparatorCertificate | None:
    """Certificate iff sup over the reachable closure <= min over the
    target (nonstrict: the reachable set itself is open)."""
    tau = _alg_vec(tau)
    if q.is_empty:
        zero_tau = tuple(ALG_ZERO for _ in range(s.dim))
        maximizer = u.vertices[0] if u.vertices else ()
        return SeparatorCertificate(zero_tau, ALG_ZERO, maximizer, 0, ALG_ZERO, None)
    maximizer, n = eventual_maximizer(s, u, tau)
    sup = sup_in_direction(s, u, tau)
    low = min_over_vertices(q, tau)
    assert low is not None
    if sup.compare(low) <= 0:
        return SeparatorCertificate(tau, sup, maximizer, n, sup, low)
    return None


def recompute_sup_from_certificate(s: SpectralData, u: GenPolyhedron, cert: SeparatorCertificate) -> RealAlg:
    """Audit path: rebuild the supremum from (tau, maximizer, threshold)
    alone, without rerunning the maximizer search."""
    total = ALG_ZERO
    power = RatMatrix.identity(s.dim)
    for _ in range(cert.threshold):
        best = None
        for v in u.vertices:
            val = _alg_dot(cert.tau, power.matvec(v))
            if best is None or val.compare(best) > 0:
                best = val
        total = total + best
        power = power @ s.matrix
    tail = power @ s.geometric_sum_matrix()
    return total + _alg_dot(cert.tau, tail.matvec(cert.maximizer))


# ---------------------------------------------------------------------------
# dominance-preserving perturbation space
# ---------------------------------------------------------------------------


def dom_space(s: SpectralData, u: GenPolyhedron, tau) -> DomSpace:
    """Directions tau' whose bilinear coefficients vanish wherever tau's
    do, over all vertex differences; computed as an exact kernel."""
    tau = _alg_vec(tau)
    conditions: list[list[RealAlg]] = []
    verts = list(u.vertices)
    for a_idx in range(len(verts)):
        for b_idx in range(a_idx + 1, len(verts)):
            diff = vec_sub(verts[a_idx], verts[b_idx])
            for i in range(len(s.eigenvalues)):
                for j in range(s.dim):
                    normal = s.bilinear_mats[i][j].matvec(list(diff))
                    if all(x.sign() == 0 for x in normal):
                        continue
                    val = ALG_ZERO
                    for t, x in zip(tau, normal):
                        val = val + t * x
                    if val.sign() == 0:
                        conditions.append(normal)
    if not conditions:
        basis = tuple(tuple(ALG_ONE if i == j else ALG_ZERO for j in range(s.dim))
                      for i in range(s.dim))
        return DomSpace(basis)
    m = AlgMatrix(len(conditions), s.dim, [x for row in conditions for x in row])
    kernel = alg_kernel_basis(m)
    return DomSpace(tuple(tuple(v) for v in kernel))


def alg_in_span(vectors: tuple[AlgVec, ...], target: AlgVec) -> bool:
    """Exact membership of target in the span of the given vectors."""
    if not vectors:
        return all(x.sign() == 0 for x in target)
    n = len(target)
    rows = [list(v) for v in vectors] + [list(target)]
    m = AlgMatrix(len(rows), n, [x for row in rows for x in row])
    rank_with = len(rows) - len(alg_kernel_basis_rows(m))
    m2 = AlgMatrix(len(vectors), n, [x for v in vectors for x in v])
    rank_without = len(vectors) - len(alg_kernel_basis_rows(m2))
    return rank_with == rank_without


def alg_kernel_basis_rows(m: AlgMatrix) -> list[list[RealAlg]]:
    """Kernel of the transpose (row dependencies)."""
    t = AlgMatrix(m.cols, m.rows, [m.get(i, j) for j in range(m.cols) for i in range(m.rows)])
    return alg_kernel_basis(t)


# ---------------------------------------------------------------------------
# candidate streams
# ---------------------------------------------------------------------------


class _SeenDirections:
    """Deduplication of directions up to positive scaling.

    Algebraic directions are bucketed by the tuple of entry minimal
    polynomials; only same-bucket entries need the (cheap) exact equality
    check, since equal values share their canonical minpoly.
    """

    def __init__(self):
        self.rational: set[tuple[Fraction, ...]] = set()
        self.algebraic: dict[tuple, list[AlgVec]] = {}

    def add(self, v: AlgVec) -> bool:
        """True if v is new (and records it)."""
        signs = [x.sign() for x in v]
        if all(s == 0 for s in signs):
            return False
        first = next(i for i, s in enumerate(signs) if s != 0)
        lead = abs(v[first])
        if lead.equals(ALG_ONE):
            canon = v
        else:
            scale = lead.inverse()
            canon = tuple(scale * x for x in v)
        rats = [x.to_rational() for x in canon]
        if all(r is not None for r in rats):
            key = tuple(rats)
            if key in self.rational:
                return False
            self.rational.add(key)
            return True
        bucket_key = tuple(x.minpoly.coeffs for x in canon)
        bucket = self.algebraic.setdefault(bucket_key, [])
        for prev in bucket:
            if all(a.equals(b) for a, b in zip(prev, canon)):
                return False
        bucket.append(canon)
        return True


def left_eigenvectors(s: SpectralData) -> list[AlgVec]:
    """Kernel bases of (A^T - lam I) for each eigenvalue."""
    out = []
    at = s.matrix.transpose()
    for lam in s.eigenvalues:
        entries = []
        for i in range(s.dim):
            for j in range(s.dim):
                e = as_alg(at.get(i, j))
                if i == j:
                    e = e - lam
                entries.append(e)
        for v in alg_kernel_basis(AlgMatrix(s.dim, s.dim, entries)):
            out.append(tuple(v))
    return out


def _target_direction_seeds(q: GenPolyhedron) -> list[Vec]:
    """Negated facet normals of the target; for lower-dimensional targets,
    also the +/- orthogonal complement directions of its affine hull."""
    try:
        seeds = [tuple(-x for x in n) for n in facet_normals(q)]
    except DimensionCeilingError:
        seeds = []
    v0, basis = _affine_basis(q.vertices)
    if len(basis) < q.dim:
        if basis:
            comp = RatMatrix.from_rows([list(b) for b in basis]).kernel_basis()
        else:
            comp = [tuple(Fraction(1 if i == j else 0) for j in range(q.dim))
                    for i in range(q.dim)]
        for n in comp:
            n = _primitive_direction(n)
            seeds.append(n)
            seeds.append(tuple(-x for x in n))
    return seeds


def extremal_candidates(s: SpectralData, u: GenPolyhedron, q: GenPolyhedron, budget: int):
    """Stream of separator candidates, geometry-derived first.

    Stages: (1) target-derived directions; (2) facet normals of the
    partial input sums up to `budget`; (3) left eigenvectors, both signs;
    (4) generators of one-dimensional solution spaces of small vanishing-
    condition patterns.  budget 0 stops after stage 1.  All outputs are
    deduplicated up to positive scaling.
    """
    from .geometry import linear_image, minkowski_sum

    seen = _SeenDirections()

    if not q.is_empty:
        for n in _target_direction_seeds(q):
            cand = _alg_vec(n)
            if seen.add(cand):
                yield cand
    if budget <= 0:
        return

    partial = u
    power = RatMatrix.identity(s.dim)
    for step in range(budget + 1):
        if step > 0:
            power = power @ s.matrix
            partial = minkowski_sum(partial, linear_image(power, u))
        try:
            normals = facet_normals(partial)
        except DimensionCeilingError:
            break
        for n in normals:
            cand = _alg_vec(n)
            if seen.add(cand):
                yield cand

    for ev in left_eigenvectors(s):
        for signed in (ev, tuple(-x for x in ev)):
            if seen.add(signed):
                yield signed

    pool: list[AlgVec] = []
    pool_seen = _SeenDirections()
    verts = list(u.vertices)
    for a_idx in range(len(verts)):
        for b_idx in range(a_idx + 1, len(verts)):
            diff = vec_sub(verts[a_idx], verts[b_idx])
            for i in range(len(s.eigenvalues)):
                for j in range(s.dim):
                    normal = tuple(s.bilinear_mats[i][j].matvec(list(diff)))
                    if any(x.sign() != 0 for x in normal) and pool_seen.add(normal):
                        pool.append(normal)
    power = RatMatrix.identity(s.dim)
    for i in range(min(budget, 3)):
        for a_idx in range(len(verts)):
            for b_idx in range(a_idx + 1, len(verts)):
                normal = _alg_vec(power.matvec(vec_sub(verts[a_idx], verts[b_idx])))
                if any(x.sign() != 0 for x in normal) and pool_seen.add(normal):
                    pool.append(normal)
        power = power @ s.matrix
    qverts = list(q.vertices)
    for a_idx in range(len(qverts)):
        for b_idx in range(a_idx + 1, len(qverts)):
            normal = _alg_vec(vec_sub(qverts[a_idx], qverts[b_idx]))
            if any(x.sign() != 0 for x in normal) and pool_seen.add(normal):
                pool.append(normal)

    max_patterns = 32 * budget
    tried = 0
    for size in range(max(1, s.dim - 1), s.dim + 2):
        if tried >= max_patterns:
            break
        for subset in itertools.combinations(range(len(pool)), size):
            tried += 1
            if tried > max_patterns:
                break
            rows = [pool[i] for i in subset]
            m = AlgMatrix(len(rows), s.dim, [x for r in rows for x in r])
            kernel = alg_kernel_basis(m)
            if len(kernel) != 1:
                continue
            gen = tuple(kernel[0])
            for signed in (gen, tuple(-x for x in gen)):
                if seen.add(signed):
                    yield signed


def enumerate_algebraic_vectors(dim: int, budget: tuple[int, int]):
    """Fair dovetailed enumeration of nonzero vectors with real algebraic
    entries.

    Batches walk (degree, height) pairs along increasing degree + height;
    batch (D, H) isolates the real roots of every integer polynomial with
    degree exactly D and height exactly H, and emits every dim-tuple over
    the cumulative root pool that uses at least one new root,
    deduplicated up to positive scaling within the batch.  Every vector
    with algebraic entries appears once the budget covers the degrees and
    heights of its entries' minimal polynomials.
    """
    max_deg, max_height = budget
    known: list[RealAlg] = []
    buckets: dict[tuple, list[RealAlg]] = {}

    def is_new(root: RealAlg) -> bool:
        bucket = buckets.setdefault(root.minpoly.coeffs, [])
        if any(root.equals(r) for r in bucket):
            return False
        bucket.append(root)
        return True

    for total in range(2, max_deg + max_height + 1):
        for deg in range(1, total):
            height = total - deg
            if deg > max_deg or height > max_height:
                continue
            new_roots: list[RealAlg] = []
            for coeffs in _int_polys(deg, height):
                for root in sturm_isolate_real_roots(IntPoly(coeffs)):
                    if is_new(root):
                        new_roots.append(root)
            if not new_roots:
                continue
            pool = known + new_roots
            first_new = len(known)
            seen = _SeenDirections()
            for idxs in itertools.product(range(len(pool)), repeat=dim):
                if all(i < first_new for i in idxs):
                    continue
                v = tuple(pool[i] for i in idxs)
                if any(x.sign() != 0 for x in v) and seen.add(v):
                    yield v
            known = pool


def _int_polys(deg: int, height: int):
    """Coefficient tuples with degree exactly deg, max |coeff| exactly
    height, positive leading coefficient."""
    ranges = [range(-height, height + 1)] * deg + [range(1, height + 1)]
    for coeffs in itertools.product(*ranges):
        if max(abs(c) for c in coeffs) == height:
            yield coeffs
