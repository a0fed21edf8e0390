"""Exact linear algebra over Q and over real algebraic numbers.

RatMatrix is the rational workhorse (Fraction entries).  AlgMatrix holds
matrices whose entries are real algebraic numbers; it only appears in
spectral data (projectors, bilinear form matrices) and in the
certificate search.

spectral_decompose splits a matrix with real, strictly positive
eigenvalues into its commuting diagonalizable + nilpotent parts and
computes the spectral projector onto each generalized eigenspace as a
polynomial in the matrix, so no eigenvector basis over an extension
field is ever constructed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd

from .exactnum import (
    ALG_ONE,
    ALG_ZERO,
    IntPoly,
    RealAlg,
    as_alg,
    count_real_roots,
    count_roots_halfopen,
    factor_int_poly,
    sturm_chain,
    sturm_isolate_real_roots,
)

Vec = tuple[Fraction, ...]


class SpectralError(Exception):
    """Raised when a decomposition precondition fails (non-real or
    non-positive eigenvalue detected)."""


def vec(*entries) -> Vec:
    return tuple(Fraction(e) for e in entries)


def vec_add(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(a: Vec, s: Fraction) -> Vec:
    return tuple(x * s for x in a)


def vec_dot(a: Vec, b: Vec) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def vec_is_zero(a: Vec) -> bool:
    return all(x == 0 for x in a)


def zero_vec(n: int) -> Vec:
    return tuple(Fraction(0) for _ in range(n))


def unit_vec(n: int, i: int) -> Vec:
    return tuple(Fraction(1 if j == i else 0) for j in range(n))


@dataclass(frozen=True)
class RatMatrix:
    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match dimensions")
        object.__setattr__(self, "entries", tuple(Fraction(e) for e in self.entries))

    @staticmethod
    def from_rows(rows) -> "RatMatrix":
        rows = [list(r) for r in rows]
        nr = len(rows)
        nc = len(rows[0]) if rows else 0
        if any(len(r) != nc for r in rows):
            raise ValueError("ragged rows")
        return RatMatrix(nr, nc, tuple(Fraction(x) for r in rows for x in r))

    @staticmethod
    def identity(n: int) -> "RatMatrix":
        return RatMatrix(n, n, tuple(Fraction(1 if i == j else 0) for i in range(n) for j in range(n)))

    @staticmethod
    def zeros(r: int, c: int) -> "RatMatrix":
        return RatMatrix(r, c, tuple(Fraction(0) for _ in range(r * c)))

    @staticmethod
    def diag(*values) -> "RatMatrix":
        n = len(values)
        return RatMatrix(n, n, tuple(Fraction(values[i]) if i == j else Fraction(0)
                                     for i in range(n) for j in range(n)))

    @staticmethod
    def block_diag(blocks) -> "RatMatrix":
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        out = [[Fraction(0)] * m for _ in range(n)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    out[r0 + i][c0 + j] = b.get(i, j)
            r0 += b.rows
            c0 += b.cols
        return RatMatrix.from_rows(out)

    def get(self, i: int, j: int) -> Fraction:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vec:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> Vec:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def scale(self, s) -> "RatMatrix":
        s = Fraction(s)
        return RatMatrix(self.rows, self.cols, tuple(a * s for a in self.entries))

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        out = []
        ocols = [other.col(j) for j in range(other.cols)]
        for i in range(self.rows):
            r = self.row(i)
            out.extend(vec_dot(r, c) for c in ocols)
        return RatMatrix(self.rows, other.cols, tuple(out))

    def matvec(self, v: Vec) -> Vec:
        if self.cols != len(v):
            raise ValueError("dimension mismatch")
        return tuple(vec_dot(self.row(i), v) for i in range(self.rows))

    def transpose(self) -> "RatMatrix":
        return RatMatrix(self.cols, self.rows, tuple(self.get(i, j) for j in range(self.cols) for i in range(self.rows)))

    def power(self, n: int) -> "RatMatrix":
        if not self.is_square:
            raise ValueError("power of non-square matrix")
        if n < 0:
            inv = self.inverse()
            if inv is None:
                raise ValueError("negative power of singular matrix")
            return inv.power(-n)
        result = RatMatrix.identity(self.rows)
        base = self
        while n:
            if n & 1:
                result = result @ base
            n >>= 1
            if n:
                base = base @ base
        return result

    def det(self) -> Fraction:
        """Fraction-free Bareiss on the denominator-cleared matrix."""
        if not self.is_square:
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        if n == 0:
            return Fraction(1)
        den = 1
        for e in self.entries:
            den = den * e.denominator // gcd(den, e.denominator)
        m = [[int(self.get(i, j) * den) for j in range(n)] for i in range(n)]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return Fraction(0)
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = m[k][k]
        return Fraction(sign * m[n - 1][n - 1], den ** n)

    def rref(self) -> tuple[list[list[Fraction]], list[int]]:
        """Reduced row echelon form and pivot column indices."""
        m = self.to_rows()
        pivots = []
        r = 0
        for c in range(self.cols):
            piv = None
            for i in range(r, self.rows):
                if m[i][c] != 0:
                    piv = i
                    break
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            f = m[r][c]
            m[r] = [x / f for x in m[r]]
            for i in range(self.rows):
                if i != r and m[i][c] != 0:
                    g = m[i][c]
                    m[i] = [x - g * y for x, y in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return m, pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel_basis(self) -> list[Vec]:
        m, pivots = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        basis = []
        for fc in free:
            v = [Fraction(0)] * self.cols
            v[fc] = Fraction(1)
            for r, pc in enumerate(pivots):
                v[pc] = -m[r][fc]
            basis.append(tuple(v))
        return basis

    def column_space_basis(self) -> list[Vec]:
        _, pivots = self.rref()
        return [self.col(c) for c in pivots]

    def solve(self, b: Vec) -> Vec | None:
        """One solution of Ax = b, or None if inconsistent."""
        aug = RatMatrix(self.rows, self.cols + 1,
                        tuple(x for i in range(self.rows) for x in (*self.row(i), b[i])))
        m, pivots = aug.rref()
        if self.cols in pivots:
            return None
        x = [Fraction(0)] * self.cols
        for r, pc in enumerate(pivots):
            x[pc] = m[r][self.cols]
        return tuple(x)

    def inverse(self) -> "RatMatrix | None":
        if not self.is_square:
            raise ValueError("inverse of non-square matrix")
        n = self.rows
        aug = RatMatrix(n, 2 * n, tuple(x for i in range(n)
                                        for x in (*self.row(i), *RatMatrix.identity(n).row(i))))
        m, pivots = aug.rref()
        if pivots[:n] != list(range(n)):
            return None
        return RatMatrix.from_rows([r[n:] for r in m[:n]])

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in self.row(i)) for i in range(self.rows))
        return f"RatMatrix[{body}]"


# ---------------------------------------------------------------------------
# characteristic polynomial and spectral tests
# ---------------------------------------------------------------------------


def charpoly(a: RatMatrix) -> tuple[Fraction, ...]:
    """Monic coefficients of det(xI - A), lowest degree first.

    Samuelson-Berkowitz recursion: division-free, exact over Q.
    """
    if not a.is_square:
        raise ValueError("characteristic polynomial of non-square matrix")
    n = a.rows
    if n == 0:
        return (Fraction(1),)
    # coefficients highest degree first, built up one leading block at a time
    c = [Fraction(1)]
    for r in range(1, n + 1):
        d = a.get(r - 1, r - 1)
        row = [a.get(r - 1, j) for j in range(r - 1)]
        col = [a.get(i, r - 1) for i in range(r - 1)]
        block = [[a.get(i, j) for j in range(r - 1)] for i in range(r - 1)]
        # s_i = row . block^i . col for i = 0..r-2
        s = []
        cur = col
        for _ in range(r - 1):
            s.append(sum(x * y for x, y in zip(row, cur)))
            cur = [sum(block[i][j] * cur[j] for j in range(r - 1)) for i in range(r - 1)]
        first_col = [Fraction(1), -d] + [-x for x in s]
        new = [Fraction(0)] * (r + 1)
        for i in range(r + 1):
            for j in range(len(c)):
                k = i - j
                if 0 <= k < len(first_col):
                    new[i] += first_col[k] * c[j]
        c = new
    return tuple(reversed(c))


def charpoly_primitive(a: RatMatrix) -> IntPoly:
    """det(xI - A) cleared of denominators, primitive, positive lead."""
    coeffs = charpoly(a)
    den = 1
    for x in coeffs:
        den = den * x.denominator // gcd(den, x.denominator)
    return IntPoly(tuple(int(x * den) for x in coeffs)).primitive()


def _cayley_transform(coeffs: tuple[Fraction, ...]) -> list[Fraction]:
    """(1-w)^n p((1+w)/(1-w)) for p given lowest-first; maps the open unit
    disk to the open left half-plane."""
    n = len(coeffs) - 1
    acc = [Fraction(0)] * (n + 1)
    for k, a in enumerate(coeffs):
        if a == 0:
            continue
        # (1+w)^k (1-w)^(n-k)
        term = [Fraction(0)] * (n + 1)
        for i in range(k + 1):
            for j in range(n - k + 1):
                term[i + j] += comb(k, i) * comb(n - k, j) * (-1) ** j
        for i in range(n + 1):
            acc[i] += a * term[i]
    return acc


def _hurwitz_stable(b: list[Fraction]) -> bool:
    """All roots in the open left half-plane, by positivity of the leading
    principal minors of the Hurwitz matrix (with positive leading coeff)."""
    while b and b[-1] == 0:
        b = b[:-1]
    n = len(b) - 1
    if n < 0:
        return False
    if n == 0:
        return True
    if b[-1] < 0:
        b = [-x for x in b]
    if any(x <= 0 for x in b):
        return False
    def coeff(k: int) -> Fraction:
        return b[k] if 0 <= k <= n else Fraction(0)
    h = [[coeff(n - 2 * (j + 1) + (i + 1)) for j in range(n)] for i in range(n)]
    # leading principal minors via LU without pivoting: a nonpositive pivot
    # at any stage means some minor is <= 0, hence not Hurwitz
    m = [row[:] for row in h]
    for k in range(n):
        if m[k][k] <= 0:
            return False
        for i in range(k + 1, n):
            if m[i][k] != 0:
                f = m[i][k] / m[k][k]
                for j in range(k, n):
                    m[i][j] -= f * m[k][j]
    return True


def schur_stable(a: RatMatrix) -> bool:
    """True iff every eigenvalue has modulus strictly below one."""
    coeffs = list(charpoly(a))
    # roots at zero have modulus zero; strip them
    while coeffs and coeffs[0] == 0:
        coeffs = coeffs[1:]
    n = len(coeffs) - 1
    if n <= 0:
        return True
    q = _cayley_transform(tuple(coeffs))
    if q[n] == 0:
        # -1 is an eigenvalue
        return False
    return _hurwitz_stable(q)


def _real_nonneg_spectrum(a: RatMatrix) -> bool:
    p = charpoly_primitive(a)
    coeffs = list(p.coeffs)
    while coeffs and coeffs[0] == 0:
        coeffs = coeffs[1:]
    p = IntPoly(tuple(coeffs))
    if p.degree <= 0:
        return True
    sf = p.squarefree_part()
    if count_real_roots(sf) != sf.degree:
        return False
    chain = sturm_chain(sf)
    # no roots in (-inf, 0]; zero roots were stripped so sf(0) != 0
    return count_roots_halfopen(chain, "-inf", Fraction(0)) == 0


def _euler_phi(r: int) -> int:
    result = r
    n = r
    p = 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            result -= result // p
        p += 1
    if n > 1:
        result -= result // n
    return result


def real_spectrum_power_bound(d: int) -> int:
    """lcm of all r with phi(r) <= d (phi(r) >= sqrt(r/2) bounds the scan)."""
    m = 1
    r = 1
    while r <= 2 * d * d + 1:
        if _euler_phi(r) <= d:
            m = m * r // gcd(m, r)
        r += 1
    return m


def real_spectrum_power(a: RatMatrix) -> int | None:
    """Least M >= 1 with A^M having exclusively real nonnegative spectrum,
    or None when no M up to the degree-derived bound works."""
    if not a.is_square:
        raise ValueError("non-square matrix")
    bound = real_spectrum_power_bound(a.rows) if a.rows > 0 else 1
    power = RatMatrix.identity(a.rows)
    for m in range(1, bound + 1):
        power = power @ a
        if _real_nonneg_spectrum(power):
            return m
    return None


def fitting_split(a: RatMatrix) -> tuple[list[Vec], list[Vec]]:
    """Bases of ker(A^d) and im(A^d); A is nilpotent on the first,
    invertible on the second, and both are A-invariant."""
    if not a.is_square:
        raise ValueError("non-square matrix")
    ad = a.power(a.rows)
    return ad.kernel_basis(), ad.column_space_basis()


def krylov_invariant_span(a: RatMatrix, generators) -> list[Vec]:
    """Basis of span{A^i g : 0 <= i < d, g in generators}."""
    d = a.rows
    rows: list[Vec] = []
    for g in generators:
        cur = tuple(Fraction(x) for x in g)
        for _ in range(d):
            rows.append(cur)
            cur = a.matvec(cur)
    if not rows:
        return []
    m = RatMatrix.from_rows(rows)
    red, pivots = m.rref()
    return [tuple(red[i]) for i in range(len(pivots))]


# ---------------------------------------------------------------------------
# matrices over real algebraic numbers
# ---------------------------------------------------------------------------


class AlgMatrix:
    """Dense matrix with RealAlg entries; ints/Fractions coerce on build."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries):
        self.rows = rows
        self.cols = cols
        self.entries: list[RealAlg] = [as_alg(e) for e in entries]
        if len(self.entries) != rows * cols:
            raise ValueError("entry count mismatch")

    @staticmethod
    def from_rat(m: RatMatrix) -> "AlgMatrix":
        return AlgMatrix(m.rows, m.cols, list(m.entries))

    @staticmethod
    def identity(n: int) -> "AlgMatrix":
        return AlgMatrix(n, n, [ALG_ONE if i == j else ALG_ZERO for i in range(n) for j in range(n)])

    @staticmethod
    def zeros(r: int, c: int) -> "AlgMatrix":
        return AlgMatrix(r, c, [ALG_ZERO] * (r * c))

    def get(self, i: int, j: int) -> RealAlg:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list[RealAlg]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def __add__(self, other: "AlgMatrix") -> "AlgMatrix":
        return AlgMatrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "AlgMatrix") -> "AlgMatrix":
        return AlgMatrix(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def scale(self, s) -> "AlgMatrix":
        s = as_alg(s)
        return AlgMatrix(self.rows, self.cols, [s * a for a in self.entries])

    def __matmul__(self, other) -> "AlgMatrix":
        if isinstance(other, RatMatrix):
            other = AlgMatrix.from_rat(other)
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        out = []
        for i in range(self.rows):
            r = self.row(i)
            for j in range(other.cols):
                acc = ALG_ZERO
                for k in range(self.cols):
                    acc = acc + r[k] * other.get(k, j)
                out.append(acc)
        return AlgMatrix(self.rows, other.cols, out)

    def matvec(self, v) -> list[RealAlg]:
        out = []
        for i in range(self.rows):
            acc = ALG_ZERO
            r = self.row(i)
            for k in range(self.cols):
                acc = acc + r[k] * as_alg(v[k])
            out.append(acc)
        return out

    def is_zero(self) -> bool:
        return all(e.sign() == 0 for e in self.entries)

    def to_rat(self) -> RatMatrix | None:
        vals = [e.to_rational() for e in self.entries]
        if any(v is None for v in vals):
            return None
        return RatMatrix(self.rows, self.cols, tuple(vals))

    def __repr__(self) -> str:
        return f"AlgMatrix({self.rows}x{self.cols})"


def alg_kernel_basis(m: AlgMatrix) -> list[list[RealAlg]]:
    """Kernel basis by Gauss elimination over RealAlg (exact sign pivoting)."""
    rows = [list(m.row(i)) for i in range(m.rows)]
    ncols = m.cols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][c].sign() != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        f = rows[r][c]
        rows[r] = [x / f for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c].sign() != 0:
                g = rows[i][c]
                rows[i] = [x - g * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v: list[RealAlg] = [ALG_ZERO] * ncols
        v[fc] = ALG_ONE
        for rr, pc in enumerate(pivots):
            v[pc] = -rows[rr][fc]
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# spectral decomposition
# ---------------------------------------------------------------------------


@dataclass
class SpectralData:
    """Eigenvalues ascending, spectral projectors, nilpotent part, and the
    bilinear form matrices B[i][j] with <A^n u, tau> =
    sum_{i,j} C(n,j) lam_i^n (tau^T B[i][j] u)."""

    matrix: RatMatrix
    eigenvalues: list[RealAlg]
    multiplicities: list[int]
    projectors: list[AlgMatrix]
    nilpotent: RatMatrix
    bilinear_mats: list[list[AlgMatrix]]
    _resolvent: RatMatrix | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.rows

    def geometric_sum_matrix(self) -> RatMatrix:
        """(I - A)^{-1}; requires spectral radius < 1 so 1 is no eigenvalue."""
        if self._resolvent is None:
            inv = (RatMatrix.identity(self.dim) - self.matrix).inverse()
            if inv is None:
                raise SpectralError("I - A singular; spectral radius not below one")
            self._resolvent = inv
        return self._resolvent


def _eval_poly_at_matrix(coeffs: list[RealAlg], a: RatMatrix) -> AlgMatrix:
    """Horner evaluation of a RealAlg-coefficient polynomial at a rational
    matrix; cheap because each step multiplies by the rational matrix."""
    n = a.rows
    acc = AlgMatrix.zeros(n, n)
    ident = AlgMatrix.identity(n)
    for c in reversed(coeffs):
        acc = (acc @ a) + ident.scale(c)
    return acc


def _semisimple_part(a: RatMatrix) -> RatMatrix:
    """Rational semisimple part S of A (Newton iteration on the squarefree
    part of the characteristic polynomial); A - S is nilpotent."""
    p = charpoly_primitive(a).squarefree_part()
    pf = [Fraction(c) for c in p.coeffs]
    dpf = [Fraction(i * c) for i, c in enumerate(p.coeffs)][1:]

    def eval_at(coeffs, m: RatMatrix) -> RatMatrix:
        acc = RatMatrix.zeros(m.rows, m.rows)
        ident = RatMatrix.identity(m.rows)
        for c in reversed(coeffs):
            acc = acc @ m + ident.scale(c)
        return acc

    x = a
    for _ in range(a.rows + 2):
        px = eval_at(pf, x)
        if all(e == 0 for e in px.entries):
            return x
        dpx_inv = eval_at(dpf, x).inverse()
        if dpx_inv is None:
            raise SpectralError("derivative evaluation singular during splitting")
        x = x - dpx_inv @ px
    raise SpectralError("semisimple splitting did not converge")


def spectral_decompose(a: RatMatrix) -> SpectralData:
    """Requires every eigenvalue real and strictly positive; fails loudly
    otherwise."""
    if not a.is_square:
        raise ValueError("non-square matrix")
    d = a.rows
    if d == 0:
        return SpectralData(a, [], [], [], a, [])
    p = charpoly_primitive(a)
    factors = factor_int_poly(p.coeffs)
    eig: list[tuple[RealAlg, int]] = []
    for fcoeffs, mult in factors:
        f = IntPoly(fcoeffs)
        roots = sturm_isolate_real_roots(f)
        if len(roots) != f.degree:
            raise SpectralError("non-real eigenvalue detected")
        for r in roots:
            if r.sign() <= 0:
                raise SpectralError("non-positive eigenvalue detected")
            eig.append((r, mult))
    order = sorted(range(len(eig)), key=_EigKey(eig))
    eigenvalues = [eig[i][0] for i in range(len(eig))]
    eigenvalues = [eigenvalues[i] for i in order]
    mults = [eig[i][1] for i in order]

    nilpotent = a - _semisimple_part(a)

    projectors = []
    for lam, mu in zip(eigenvalues, mults):
        projectors.append(_projector_for(p, a, lam, mu))

    bilinear: list[list[AlgMatrix]] = []
    npow = RatMatrix.identity(d)
    npows = []
    for _ in range(d):
        npows.append(npow)
        npow = npow @ nilpotent
    for lam, proj in zip(eigenvalues, projectors):
        lam_inv = lam.inverse()
        row = []
        scale = ALG_ONE
        for j in range(d):
            row.append((proj @ npows[j]).scale(scale))
            scale = scale * lam_inv
        bilinear.append(row)

    return SpectralData(a, eigenvalues, mults, projectors, nilpotent, bilinear)


class _EigKey:
    __slots__ = ("eig",)

    def __init__(self, eig):
        self.eig = eig

    def __call__(self, i):
        return _AlgOrd(self.eig[i][0])


class _AlgOrd:
    __slots__ = ("v",)

    def __init__(self, v: RealAlg):
        self.v = v

    def __lt__(self, other: "_AlgOrd") -> bool:
        return self.v.compare(other.v) < 0


def _projector_for(charp: IntPoly, a: RatMatrix, lam: RealAlg, mu: int) -> AlgMatrix:
    """Spectral projector onto the generalized eigenspace of lam, as a
    polynomial in A: h(A) with h == 1 mod (x-lam)^mu and h == 0 modulo the
    rest of the characteristic polynomial."""
    # deflate charpoly by (x - lam)^mu via synthetic division over Q(lam)
    coeffs: list[RealAlg] = [as_alg(Fraction(c)) for c in charp.coeffs]
    for _ in range(mu):
        coeffs = _synthetic_divide(coeffs, lam)
    cofactor = coeffs  # charp / (x-lam)^mu, degree d - mu (up to constant)
    # Taylor coefficients of the cofactor around lam: repeated division
    taylor: list[RealAlg] = []
    work = list(cofactor)
    for _ in range(mu):
        rem_val, work_next = _synthetic_divide_with_rem(work, lam)
        taylor.append(rem_val)
        work = work_next
    # invert the truncated series: w with (sum taylor_s t^s) * w == 1 + O(t^mu)
    inv: list[RealAlg] = [taylor[0].inverse()]
    for s in range(1, mu):
        acc = ALG_ZERO
        for t in range(1, s + 1):
            acc = acc + taylor[t] * inv[s - t]
        inv.append(-(acc * inv[0]))
    # expand sum_s inv_s (x - lam)^s into standard-basis coefficients
    series: list[RealAlg] = [ALG_ZERO] * mu
    basis: list[RealAlg] = [ALG_ONE]
    for s in range(mu):
        for k, b in enumerate(basis):
            series[k] = series[k] + inv[s] * b
        nb: list[RealAlg] = [ALG_ZERO] * (len(basis) + 1)
        for k, b in enumerate(basis):
            nb[k + 1] = nb[k + 1] + b
            nb[k] = nb[k] - lam * b
        basis = nb
    # h == 1 modulo (x-lam)^mu and vanishes to full order at the other
    # eigenvalues, so h(A) is the spectral projector
    h = _poly_mul_alg(cofactor, series)
    return _eval_poly_at_matrix(h, a)


def _synthetic_divide(coeffs: list[RealAlg], lam: RealAlg) -> list[RealAlg]:
    """coeffs / (x - lam), remainder discarded (vanishes when lam is a root)."""
    return _synthetic_divide_with_rem(coeffs, lam)[1]


def _synthetic_divide_with_rem(coeffs: list[RealAlg], lam: RealAlg) -> tuple[RealAlg, list[RealAlg]]:
    """Return (p(lam), p(x)/(x-lam) quotient)."""
    if not coeffs:
        return ALG_ZERO, []
    carry = coeffs[-1]
    out: list[RealAlg] = [ALG_ZERO] * (len(coeffs) - 1)
    for k in range(len(coeffs) - 2, -1, -1):
        out[k] = carry
        carry = coeffs[k] + carry * lam
    return carry, out


def _poly_mul_alg(a: list[RealAlg], b: list[RealAlg]) -> list[RealAlg]:
    out: list[RealAlg] = [ALG_ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.sign() == 0:
            continue
        for j, y in enumerate(b):
            if y.sign() == 0:
                continue
            out[i + j] = out[i + j] + x * y
    return out


def expand_inner_product(s: SpectralData, u, tau) -> list[list[RealAlg]]:
    """Coefficients c[i][j] = tau^T B[i][j] u of the closed form
    <A^n u, tau> = sum_{i,j} C(n,j) lam_i^n c[i][j]."""
    k = len(s.eigenvalues)
    d = s.dim
    out: list[list[RealAlg]] = []
    for i in range(k):
        row = []
        for j in range(d):
            bu = s.bilinear_mats[i][j].matvec(list(u))
            acc = ALG_ZERO
            for t in range(d):
                acc = acc + as_alg(tau[t]) * bu[t]
            row.append(acc)
        out.append(row)
    return out


def inner_product_at(s: SpectralData, coeffs: list[list[RealAlg]], n: int) -> RealAlg:
    """Evaluate the expanded form at integer n >= 0."""
    acc = ALG_ZERO
    for i, lam in enumerate(s.eigenvalues):
        lam_n = lam ** n
        for j in range(s.dim):
            c = coeffs[i][j]
            if c.sign() != 0 and comb(n, j) != 0:
                acc = acc + c * comb(n, j) * lam_n
    return acc
