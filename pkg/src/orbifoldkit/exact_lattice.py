"""Exact integer and rational lattice algebra.

Matrices are tuples of row tuples.  Rationals are :class:`fractions.Fraction`
values, serialized as ``"p/q"`` strings (``"p"`` when ``q == 1``).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import floor, gcd, lcm
from typing import Sequence

from .errors import EmptySolution, InvalidInstance

Rat = Fraction
Matrix = tuple  # tuple of row tuples


# -- rationals ---------------------------------------------------------------

def parse_rat(value) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an int into a Fraction.

    Floats are rejected: every quantity in this package is exact.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise InvalidInstance(f"expected exact rational, got {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInstance(f"bad rational {value!r}") from exc
    raise InvalidInstance(f"expected rational string, got {value!r}")


def format_rat(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def frac_mod1(q) -> Fraction:
    q = Fraction(q)
    return q - floor(q)


# -- small matrix helpers ----------------------------------------------------

def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols)
                 for row in a)


def mat_vec(a: Matrix, v: Sequence) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(a, b))


def mat_pow(a: Matrix, k: int) -> Matrix:
    out = identity(len(a))
    for _ in range(k):
        out = mat_mul(out, a)
    return out


def det2(m: Matrix):
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def inverse2(m: Matrix) -> Matrix:
    """Exact inverse of a nonsingular 2x2 matrix (Fraction entries)."""
    d = Fraction(det2(m))
    if d == 0:
        raise ZeroDivisionError("singular matrix")
    return ((m[1][1] / d, -m[0][1] / d), (-m[1][0] / d, m[0][0] / d))


def is_integral(m) -> bool:
    return all(Fraction(x).denominator == 1 for row in m for x in row)


def as_int_matrix(m) -> Matrix:
    if not is_integral(m):
        raise InvalidInstance(f"matrix {m!r} is not integral")
    return tuple(tuple(int(Fraction(x)) for x in row) for row in m)


def determinant(m: Matrix):
    """Exact determinant by fraction-free Bareiss elimination."""
    n = len(m)
    a = [list(map(Fraction, row)) for row in m]
    sign = 1
    for k in range(n):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            for j in range(k, n):
                a[i][j] -= f * a[k][j]
    out = Fraction(sign)
    for k in range(n):
        out *= a[k][k]
    return out.numerator if out.denominator == 1 else out


# -- Smith normal form -------------------------------------------------------

class _SmithWork:
    """Elimination state keeping D = S M T and the inverses of S and T."""

    def __init__(self, m):
        self.rows = len(m)
        self.cols = len(m[0]) if m else 0
        self.D = [list(r) for r in m]
        self.S = [list(r) for r in identity(self.rows)]
        self.Si = [list(r) for r in identity(self.rows)]
        self.T = [list(r) for r in identity(self.cols)]
        self.Ti = [list(r) for r in identity(self.cols)]

    def swap_rows(self, i, j):
        if i == j:
            return
        for mat in (self.D, self.S):
            mat[i], mat[j] = mat[j], mat[i]
        for row in self.Si:
            row[i], row[j] = row[j], row[i]

    def add_row(self, i, j, k):
        # row_i += k * row_j
        for mat in (self.D, self.S):
            ri, rj = mat[i], mat[j]
            for c in range(len(ri)):
                ri[c] += k * rj[c]
        for row in self.Si:
            row[j] -= k * row[i]

    def negate_row(self, i):
        for mat in (self.D, self.S):
            mat[i] = [-x for x in mat[i]]
        for row in self.Si:
            row[i] = -row[i]

    def swap_cols(self, i, j):
        if i == j:
            return
        for mat in (self.D, self.T):
            for row in mat:
                row[i], row[j] = row[j], row[i]
        self.Ti[i], self.Ti[j] = self.Ti[j], self.Ti[i]

    def add_col(self, i, j, k):
        # col_i += k * col_j
        for mat in (self.D, self.T):
            for row in mat:
                row[i] += k * row[j]
        ri, rj = self.Ti[i], self.Ti[j]
        for c in range(len(rj)):
            rj[c] -= k * ri[c]

    def run(self):
        D = self.D
        for t in range(min(self.rows, self.cols)):
            while True:
                best = None
                for i in range(t, self.rows):
                    for j in range(t, self.cols):
                        if D[i][j] and (best is None or abs(D[i][j]) < best[0]):
                            best = (abs(D[i][j]), i, j)
                if best is None:
                    return
                self.swap_rows(t, best[1])
                self.swap_cols(t, best[2])
                p = D[t][t]
                clean = True
                for i in range(t + 1, self.rows):
                    q = D[i][t] // p
                    if q:
                        self.add_row(i, t, -q)
                    clean = clean and D[i][t] == 0
                for j in range(t + 1, self.cols):
                    q = D[t][j] // p
                    if q:
                        self.add_col(j, t, -q)
                    clean = clean and D[t][j] == 0
                if not clean:
                    continue
                bad = next((i for i in range(t + 1, self.rows)
                            for j in range(t + 1, self.cols) if D[i][j] % p), None)
                if bad is None:
                    break
                self.add_row(t, bad, 1)
            if D[t][t] < 0:
                self.negate_row(t)


def _freeze(m):
    return tuple(tuple(r) for r in m)


def smith_decomposition(m: Matrix):
    """Return ``(S, S_inv, D, T, T_inv)`` with ``D = S M T`` in Smith form."""
    w = _SmithWork(as_int_matrix(m))
    w.run()
    return _freeze(w.S), _freeze(w.Si), _freeze(w.D), _freeze(w.T), _freeze(w.Ti)


def smith_normal_form(m: Matrix):
    """Smith normal form ``M = U D V`` with U, V unimodular.

    >>> smith_normal_form(((2, 1), (0, 2)))[1]
    ((1, 0), (0, 4))
    """
    _, u, d, _, v = smith_decomposition(m)
    return u, d, v


# -- Hermite bases of lattices ----------------------------------------------

def hermite_basis(vectors, dim: int):
    """Lower-triangular column Hermite basis of the lattice spanned by
    integer ``vectors``; the lattice must have full rank ``dim``.

    Returns the list of basis columns; column ``r`` has zeros above row ``r``,
    a positive pivot at row ``r``, and earlier columns are reduced into
    ``[0, pivot)`` on that row.
    """
    cols = [list(v) for v in vectors if any(v)]
    basis = []
    for r in range(dim):
        active = [c for c in cols if c[r] != 0]
        rest = [c for c in cols if c[r] == 0]
        if not active:
            raise InvalidInstance("lattice is not of full rank")
        while len(active) > 1:
            active.sort(key=lambda c: abs(c[r]))
            piv = active[0]
            nxt = [piv]
            for c in active[1:]:
                q = c[r] // piv[r]
                c = [x - q * y for x, y in zip(c, piv)]
                if c[r]:
                    nxt.append(c)
                elif any(c):
                    rest.append(c)
            active = nxt
        piv = active[0]
        if piv[r] < 0:
            piv = [-x for x in piv]
        for b in basis:
            q = b[r] // piv[r]
            if q:
                for i in range(dim):
                    b[i] -= q * piv[i]
        basis.append(piv)
        cols = rest
    return basis


def reduce_mod_hermite(vec, basis):
    """Canonical representative of ``vec`` modulo a Hermite lattice basis."""
    v = list(vec)
    for r, col in enumerate(basis):
        t = floor(Fraction(v[r]) / col[r])
        if t:
            v = [x - t * y for x, y in zip(v, col)]
    return v


def _common_den(values) -> int:
    out = 1
    for q in values:
        out = lcm(out, Fraction(q).denominator)
    return out


def superlattice_basis(generators, dim: int = 2) -> Matrix:
    """Hermite basis (as matrix columns) of ``Z^dim + span_Z(generators)``.

    The result B is lower triangular with ``1/|det B|`` equal to the index
    of ``Z^dim`` in the lattice.

    >>> superlattice_basis([(Fraction(1, 2), Fraction(1, 2))])
    ((Fraction(1, 2), Fraction(0, 1)), (Fraction(1, 2), Fraction(1, 1)))
    """
    gens = [tuple(Fraction(x) for x in g) for g in generators]
    for g in gens:
        if len(g) != dim:
            raise InvalidInstance(f"generator {g!r} is not {dim}-dimensional")
    n = _common_den(x for g in gens for x in g)
    ints = [tuple(n if i == j else 0 for i in range(dim)) for j in range(dim)]
    ints += [tuple(int(x * n) for x in g) for g in gens]
    cols = hermite_basis(ints, dim)
    return tuple(tuple(Fraction(cols[j][i], n) for j in range(dim))
                 for i in range(dim))


def lattice_index(basis: Matrix) -> int:
    idx = 1 / abs(Fraction(determinant(basis)))
    if idx.denominator != 1:
        raise InvalidInstance("basis does not contain the integer lattice")
    return int(idx)


# -- congruences on tori -----------------------------------------------------

@dataclass(frozen=True)
class Component:
    """One connected piece ``offset + span(generators)`` of a torus subset.

    ``offset`` is stored as integer numerators over the shared denominator.
    """
    numerators: tuple
    denominator: int
    generators: tuple = ()

    @property
    def offset(self) -> tuple:
        return tuple(Fraction(x, self.denominator) for x in self.numerators)

    @property
    def dimension(self) -> int:
        return len(self.generators)


@dataclass(frozen=True)
class CosetFamily:
    dim: int
    components: tuple

    @property
    def is_finite(self) -> bool:
        return all(c.dimension == 0 for c in self.components)

    def points(self) -> list:
        if not self.is_finite:
            raise ValueError("family has positive-dimensional components")
        return [c.offset for c in self.components]

    def __len__(self):
        return len(self.components)

    def contains(self, x) -> bool:
        """Exact membership test of a rational point."""
        x = [Fraction(v) for v in x]
        for comp in self.components:
            diff = [a - b for a, b in zip(x, comp.offset)]
            if _in_subtorus(diff, comp.generators):
                return True
        return False


def _rref(vectors):
    """Reduced row echelon basis (rows) of the rational span; pivots are 1."""
    rows = [list(map(Fraction, v)) for v in vectors]
    out = []
    pivots = []
    width = len(rows[0]) if rows else 0
    col = 0
    while rows and col < width:
        piv = next((r for r in rows if r[col] != 0), None)
        if piv is None:
            col += 1
            continue
        rows.remove(piv)
        piv = [x / piv[col] for x in piv]
        rows = [[x - r[col] * y for x, y in zip(r, piv)] for r in rows]
        out = [[x - o[col] * y for x, y in zip(o, piv)] for o in out]
        out.append(piv)
        pivots.append(col)
        rows = [r for r in rows if any(r)]
        col += 1
    return [tuple(r) for r in out], pivots


def _canonical_offset(offset, gens, pivots):
    """Unique representative of ``offset + span(gens) + Z^d``."""
    d = len(offset)
    o = list(map(Fraction, offset))
    for g, p in zip(gens, pivots):
        c = o[p]
        o = [x - c * y for x, y in zip(o, g)]
    free = [i for i in range(d) if i not in pivots]
    if not free:
        return tuple(Fraction(0) for _ in range(d))
    # image of Z^d in the quotient by span(gens), in free coordinates
    gens_img = [tuple(-g[i] for i in free) for g in gens]
    n = _common_den([x for g in gens_img for x in g] + [o[i] for i in free])
    k = len(free)
    ints = [tuple(n if i == j else 0 for i in range(k)) for j in range(k)]
    ints += [tuple(int(x * n) for x in g) for g in gens_img]
    basis = hermite_basis(ints, k)
    red = reduce_mod_hermite([int(o[i] * n) for i in free], basis)
    out = [Fraction(0)] * d
    for i, v in zip(free, red):
        out[i] = Fraction(v, n)
    return tuple(out)


def _in_subtorus(diff, gens) -> bool:
    """Is ``diff`` in span_R(gens) + Z^d (all data rational)?"""
    if not gens:
        return all(Fraction(x).denominator == 1 for x in diff)
    basis, pivots = _rref(gens)
    return all(x == 0 for x in _canonical_offset(diff, basis, pivots))


def solve_congruence(m: Matrix, c: Sequence) -> CosetFamily:
    """All torus points ``x`` with ``M x = c (mod Z^d)``.

    M must be an integer square matrix (integral Fractions accepted).
    Raises :class:`EmptySolution` when ``c`` misses the image of M.
    """
    m = as_int_matrix(m)
    dim = len(m)
    if any(len(row) != dim for row in m) or len(c) != dim:
        raise InvalidInstance("solve_congruence expects a square system")
    c = [parse_rat(x) if isinstance(x, str) else Fraction(x) for x in c]
    s, _, dmat, t, _ = smith_decomposition(m)
    cp = mat_vec(s, c)
    diag = [dmat[i][i] for i in range(dim)]
    free = [i for i in range(dim) if diag[i] == 0]
    for i in free:
        if cp[i].denominator != 1:
            raise EmptySolution(f"no solution of M x = {c!r} on the torus")
    if not free:
        return _finite_family(dim, t, cp, diag)
    # positive-dimensional: generators are the columns of T at free slots
    gens = [tuple(t[r][i] for r in range(dim)) for i in free]
    basis, pivots = _rref(gens)
    offsets = set()
    fixed = [i for i in range(dim) if diag[i] != 0]
    for ks in product(*(range(diag[i]) for i in fixed)):
        y = [Fraction(0)] * dim
        for i, k in zip(fixed, ks):
            y[i] = (cp[i] + k) / diag[i]
        x = mat_vec(t, y)
        offsets.add(_canonical_offset(x, basis, pivots))
    return _pack(dim, offsets, tuple(basis))


def _finite_family(dim, t, cp, diag):
    base = _common_den(cp)
    scale = 1
    for q in diag:
        scale = lcm(scale, q)
    den = base * scale
    cnum = [int(x * base) for x in cp]
    axes = [[(cnum[i] + k * base) * (scale // diag[i]) for k in range(diag[i])]
            for i in range(dim)]
    pts = set()
    for y in product(*axes):
        pts.add(tuple(v % den for v in mat_vec(t, y)))
    g = den
    for p in pts:
        for v in p:
            g = gcd(g, v)
    if g > 1:
        den //= g
        pts = {tuple(v // g for v in p) for p in pts}
    return CosetFamily(dim, tuple(Component(p, den) for p in sorted(pts)))


def _pack(dim, offsets, gens):
    den = _common_den(x for o in offsets for x in o)
    comps = sorted(tuple(int(x * den) for x in o) for o in offsets)
    return CosetFamily(dim, tuple(Component(p, den, gens) for p in comps))
