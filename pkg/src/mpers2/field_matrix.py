"""Exact scalars, dense matrices and polynomials over GF(p) or the rationals.

All arithmetic in this module is exact: GF(p) entries are plain ints kept
in canonical form in ``[0, p)``, rational entries are ``fractions.Fraction``
(always in lowest terms with positive denominator).  The single
floating-point escape hatch is :func:`svd_real`, which embeds a rational
matrix into float64 to read off its singular values (documented relative
tolerance 1e-10).

Elimination uses deterministic pivoting (first nonzero entry in column
order), so ranks, kernels and solutions are reproducible byte for byte.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class Field:
    """Coefficient field tag: GF(p) for a prime p < 2**16, or exact rationals.

    ``Field()`` is the rationals, ``Field(p)`` is the prime field GF(p).
    """

    __slots__ = ("p",)

    def __init__(self, p: int | None = None):
        if p is not None:
            if not (2 <= p < (1 << 16)) or not _is_prime(p):
                raise ValueError(f"GF(p) needs a prime p < 2**16, got {p}")
        self.p = p

    @property
    def is_rational(self) -> bool:
        return self.p is None

    def zero(self):
        return Fraction(0) if self.p is None else 0

    def one(self):
        return Fraction(1) if self.p is None else 1

    def coerce(self, x):
        if self.p is None:
            return Fraction(x)
        return int(x) % self.p

    def add(self, a, b):
        return (a + b) % self.p if self.p is not None else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p is not None else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.p is not None else a * b

    def neg(self, a):
        return (-a) % self.p if self.p is not None else -a

    def inv(self, a):
        if self.p is not None:
            if a % self.p == 0:
                raise ZeroDivisionError("inverse of 0 in GF(p)")
            return pow(a, self.p - 2, self.p)
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return Fraction(1) / a

    def __eq__(self, other):
        return isinstance(other, Field) and self.p == other.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "QQ" if self.p is None else f"GF({self.p})"


GF2 = Field(2)
QQ = Field()


class Matrix:
    """Dense matrix with entries in one exact field.

    Rows are stored as lists; instances are treated as immutable after
    construction (operations return fresh matrices), which makes them safe
    to share between threads.
    """

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field: Field, rows: int, cols: int, data):
        if rows < 0 or cols < 0:
            raise ValueError("negative matrix dimensions")
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError("matrix data does not match its shape")
        self.field = field
        self.rows = rows
        self.cols = cols
        self.data = data

    @classmethod
    def from_rows(cls, field: Field, rows_data) -> "Matrix":
        data = [[field.coerce(x) for x in row] for row in rows_data]
        r = len(data)
        c = len(data[0]) if data else 0
        return cls(field, r, c, data)

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "Matrix":
        z = field.zero()
        return cls(field, rows, cols, [[z] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        z, o = field.zero(), field.one()
        data = [[o if i == j else z for j in range(n)] for i in range(n)]
        return cls(field, n, n, data)

    @classmethod
    def column(cls, field: Field, entries) -> "Matrix":
        return cls.from_rows(field, [[x] for x in entries])

    def entry(self, i: int, j: int):
        return self.data[i][j]

    def row_list(self, i: int):
        return list(self.data[i])

    def col_list(self, j: int):
        return [self.data[i][j] for i in range(self.rows)]

    def copy(self) -> "Matrix":
        return Matrix(self.field, self.rows, self.cols, [list(r) for r in self.data])

    def is_zero(self) -> bool:
        z = self.field.zero()
        return all(x == z for row in self.data for x in row)

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.field == other.field
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __hash__(self):
        return hash((self.field, self.rows, self.cols, tuple(tuple(r) for r in self.data)))

    def __repr__(self):
        return f"Matrix({self.field}, {self.rows}x{self.cols})"


def _check_same_field(a: Matrix, b: Matrix):
    if a.field != b.field:
        raise ValueError(f"field mismatch: {a.field} vs {b.field}")


def multiply(a: Matrix, b: Matrix) -> Matrix:
    _check_same_field(a, b)
    if a.cols != b.rows:
        raise ValueError(f"shape mismatch for product: {a.rows}x{a.cols} * {b.rows}x{b.cols}")
    p = a.field.p
    z = a.field.zero()
    out = []
    bd = b.data
    for arow in a.data:
        row = [z] * b.cols
        for k, av in enumerate(arow):
            if av == z:
                continue
            brow = bd[k]
            if p is not None:
                for j in range(b.cols):
                    row[j] = (row[j] + av * brow[j]) % p
            else:
                for j in range(b.cols):
                    row[j] = row[j] + av * brow[j]
        out.append(row)
    return Matrix(a.field, a.rows, b.cols, out)


def add(a: Matrix, b: Matrix) -> Matrix:
    _check_same_field(a, b)
    if a.rows != b.rows or a.cols != b.cols:
        raise ValueError("shape mismatch for sum")
    f = a.field
    data = [[f.add(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a.data, b.data)]
    return Matrix(f, a.rows, a.cols, data)


def sub(a: Matrix, b: Matrix) -> Matrix:
    _check_same_field(a, b)
    if a.rows != b.rows or a.cols != b.cols:
        raise ValueError("shape mismatch for difference")
    f = a.field
    data = [[f.sub(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a.data, b.data)]
    return Matrix(f, a.rows, a.cols, data)


def scale(a: Matrix, c) -> Matrix:
    f = a.field
    c = f.coerce(c)
    data = [[f.mul(c, x) for x in row] for row in a.data]
    return Matrix(f, a.rows, a.cols, data)


def transpose(a: Matrix) -> Matrix:
    data = [[a.data[i][j] for i in range(a.rows)] for j in range(a.cols)]
    return Matrix(a.field, a.cols, a.rows, data)


def direct_sum(a: Matrix, b: Matrix) -> Matrix:
    _check_same_field(a, b)
    f = a.field
    z = f.zero()
    rows = a.rows + b.rows
    cols = a.cols + b.cols
    data = [[z] * cols for _ in range(rows)]
    for i in range(a.rows):
        data[i][: a.cols] = list(a.data[i])
    for i in range(b.rows):
        data[a.rows + i][a.cols :] = list(b.data[i])
    return Matrix(f, rows, cols, data)


def kronecker(a: Matrix, b: Matrix) -> Matrix:
    _check_same_field(a, b)
    f = a.field
    rows = a.rows * b.rows
    cols = a.cols * b.cols
    data = [[f.zero()] * cols for _ in range(rows)]
    for i in range(a.rows):
        for j in range(a.cols):
            av = a.data[i][j]
            if av == f.zero():
                continue
            for k in range(b.rows):
                for l in range(b.cols):
                    data[i * b.rows + k][j * b.cols + l] = f.mul(av, b.data[k][l])
    return Matrix(f, rows, cols, data)


def _forward_eliminate(data, ncols, field):
    """In-place forward elimination; returns list of (pivot_row, pivot_col).

    Deterministic: scans columns left to right and takes the first row with a
    nonzero entry.  ``data`` may have more columns than ``ncols`` (augmented
    systems); elimination pivots only inside the first ``ncols`` columns but
    row operations act on full rows.
    """
    p = field.p
    pivots = []
    r = 0
    nrows = len(data)
    width = len(data[0]) if data else 0
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if data[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            data[r], data[piv] = data[piv], data[r]
        inv = field.inv(data[r][c])
        if inv != field.one():
            row = data[r]
            if p is not None:
                data[r] = [(x * inv) % p for x in row]
            else:
                data[r] = [x * inv for x in row]
        prow = data[r]
        for i in range(r + 1, nrows):
            fval = data[i][c]
            if fval == 0:
                continue
            row = data[i]
            if p is not None:
                data[i] = [(x - fval * y) % p for x, y in zip(row, prow)]
            else:
                data[i] = [x - fval * y for x, y in zip(row, prow)]
        pivots.append((r, c))
        r += 1
        if r == nrows:
            break
    return pivots


def _back_substitute(data, pivots, field):
    """Clear entries above pivots, turning an echelon form into RREF."""
    p = field.p
    for r, c in reversed(pivots):
        prow = data[r]
        for i in range(r):
            fval = data[i][c]
            if fval == 0:
                continue
            row = data[i]
            if p is not None:
                data[i] = [(x - fval * y) % p for x, y in zip(row, prow)]
            else:
                data[i] = [x - fval * y for x, y in zip(row, prow)]


def rank(m: Matrix) -> int:
    """Row rank by exact Gaussian elimination; 0 for empty matrices."""
    if m.rows == 0 or m.cols == 0:
        return 0
    data = [list(r) for r in m.data]
    return len(_forward_eliminate(data, m.cols, m.field))


def kernel_basis(m: Matrix) -> list[Matrix]:
    """Basis of the right kernel {x : m x = 0}, one column vector per free column.

    Vectors are emitted in increasing free-column order of the reduced
    echelon form, so the result is deterministic.
    """
    f = m.field
    n = m.cols
    if n == 0:
        return []
    if m.rows == 0:
        return [Matrix.column(f, [f.one() if i == j else f.zero() for i in range(n)]) for j in range(n)]
    data = [list(r) for r in m.data]
    pivots = _forward_eliminate(data, n, f)
    _back_substitute(data, pivots, f)
    pivot_cols = [c for _, c in pivots]
    pivot_set = set(pivot_cols)
    free_cols = [c for c in range(n) if c not in pivot_set]
    basis = []
    for fc in free_cols:
        vec = [f.zero()] * n
        vec[fc] = f.one()
        for r, c in pivots:
            vec[c] = f.neg(data[r][fc])
        basis.append(Matrix.column(f, vec))
    return basis


def solve(m: Matrix, rhs: Matrix) -> Matrix | None:
    """A particular solution X of m X = rhs, or None when inconsistent.

    Free variables are set to zero, making the choice deterministic.
    """
    _check_same_field(m, rhs)
    if m.rows != rhs.rows:
        raise ValueError("shape mismatch: solve needs matching row counts")
    f = m.field
    n, k = m.cols, rhs.cols
    if m.rows == 0:
        return Matrix.zeros(f, n, k)
    data = [list(mr) + list(rr) for mr, rr in zip(m.data, rhs.data)]
    pivots = _forward_eliminate(data, n, f)
    _back_substitute(data, pivots, f)
    rnk = len(pivots)
    z = f.zero()
    for i in range(rnk, m.rows):
        if any(data[i][n + j] != z for j in range(k)):
            return None
    out = [[z] * k for _ in range(n)]
    for r, c in pivots:
        out[c] = [data[r][n + j] for j in range(k)]
    return Matrix(f, n, k, out)


def column_space_basis(m: Matrix) -> list[int]:
    """Indices of the pivot columns of m (a basis of its column space)."""
    if m.rows == 0 or m.cols == 0:
        return []
    data = [list(r) for r in m.data]
    pivots = _forward_eliminate(data, m.cols, m.field)
    return [c for _, c in pivots]


def is_invertible(m: Matrix) -> bool:
    return m.rows == m.cols and rank(m) == m.rows


def inverse(m: Matrix) -> Matrix:
    if m.rows != m.cols:
        raise ValueError("only square matrices can be inverted")
    inv = solve(m, Matrix.identity(m.field, m.rows))
    if inv is None or not multiply(m, inv).__eq__(Matrix.identity(m.field, m.rows)):
        raise ValueError("matrix is singular")
    return inv


# ---------------------------------------------------------------------------
# sparse row elimination (constraint systems assemble rows as {col: value})


def sparse_reduce_row(row: dict, pivots: dict, field: Field) -> dict:
    """Reduce one sparse row against current pivots; returns the residue.

    ``pivots`` maps a pivot column to a normalized sparse row (pivot value 1).
    The residue is either empty (dependent row) or has its leading column
    not yet among the pivots.
    """
    p = field.p
    while row:
        c = min(row)
        piv = pivots.get(c)
        if piv is None:
            lead = row[c]
            if lead != field.one():
                inv = field.inv(lead)
                if p is not None:
                    row = {k: (v * inv) % p for k, v in row.items()}
                else:
                    row = {k: v * inv for k, v in row.items()}
            return row
        fval = row[c]
        if p is not None:
            for k, v in piv.items():
                nv = (row.get(k, 0) - fval * v) % p
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        else:
            for k, v in piv.items():
                nv = row.get(k, Fraction(0)) - fval * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
    return row


def sparse_rank(rows, field: Field, pivots: dict | None = None) -> int:
    """Rank of a system of sparse rows; ``pivots`` may carry incremental state."""
    if pivots is None:
        pivots = {}
    cnt = 0
    for row in rows:
        res = sparse_reduce_row(dict(row), pivots, field)
        if res:
            pivots[min(res)] = res
            cnt += 1
    return cnt


def sparse_kernel_basis(rows, n_vars: int, field: Field) -> list[list]:
    """Kernel basis of a sparse system, as dense coefficient lists.

    Same vector convention as :func:`kernel_basis`: one basis vector per free
    column, free columns in increasing order, free value 1.
    """
    pivots: dict[int, dict] = {}
    for row in rows:
        res = sparse_reduce_row(dict(row), pivots, field)
        if res:
            pivots[min(res)] = res
    # full reduction: make each pivot row zero outside its own pivot column
    for c in sorted(pivots, reverse=True):
        row = pivots[c]
        for other_c in list(row):
            if other_c != c and other_c in pivots:
                fval = row[other_c]
                piv = pivots[other_c]
                for k, v in piv.items():
                    nv = field.sub(row.get(k, field.zero()), field.mul(fval, v))
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
    pivot_cols = set(pivots)
    free_cols = [c for c in range(n_vars) if c not in pivot_cols]
    basis = []
    for fc in free_cols:
        vec = [field.zero()] * n_vars
        vec[fc] = field.one()
        for c, row in pivots.items():
            coeff = row.get(fc)
            if coeff is not None:
                vec[c] = field.neg(coeff)
        basis.append(vec)
    return basis


# ---------------------------------------------------------------------------
# polynomials


class Polynomial:
    """Dense polynomial, coefficients lowest degree first, over one field."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: Field, coeffs):
        cs = [field.coerce(c) for c in coeffs]
        while cs and cs[-1] == field.zero():
            cs.pop()
        self.field = field
        self.coeffs = cs

    @classmethod
    def x(cls, field: Field) -> "Polynomial":
        return cls(field, [field.zero(), field.one()])

    @classmethod
    def constant(cls, field: Field, c) -> "Polynomial":
        return cls(field, [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == [self.field.one()]

    def leading(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        inv = self.field.inv(self.leading())
        return Polynomial(self.field, [self.field.mul(c, inv) for c in self.coeffs])

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field, tuple(self.coeffs)))

    def __add__(self, other):
        f = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + [f.zero()] * (n - len(self.coeffs))
        b = other.coeffs + [f.zero()] * (n - len(other.coeffs))
        return Polynomial(f, [f.add(x, y) for x, y in zip(a, b)])

    def __sub__(self, other):
        f = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + [f.zero()] * (n - len(self.coeffs))
        b = other.coeffs + [f.zero()] * (n - len(other.coeffs))
        return Polynomial(f, [f.sub(x, y) for x, y in zip(a, b)])

    def __mul__(self, other):
        f = self.field
        if self.is_zero() or other.is_zero():
            return Polynomial(f, [])
        out = [f.zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == f.zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = f.add(out[i + j], f.mul(a, b))
        return Polynomial(f, out)

    def divmod(self, other):
        f = self.field
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [f.zero()] * max(0, len(rem) - len(other.coeffs) + 1)
        inv_lead = f.inv(other.leading())
        d = other.degree
        for i in range(len(rem) - 1, d - 1, -1):
            c = rem[i]
            if c == f.zero():
                continue
            factor = f.mul(c, inv_lead)
            q[i - d] = factor
            for j, oc in enumerate(other.coeffs):
                rem[i - d + j] = f.sub(rem[i - d + j], f.mul(factor, oc))
        return Polynomial(f, q), Polynomial(f, rem)

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def gcd(self, other) -> "Polynomial":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def derivative(self) -> "Polynomial":
        f = self.field
        return Polynomial(f, [f.mul(f.coerce(i), c) for i, c in enumerate(self.coeffs)][1:])

    def evaluate_matrix(self, m: Matrix) -> Matrix:
        """Horner evaluation of the polynomial at a square matrix."""
        if m.rows != m.cols:
            raise ValueError("polynomial evaluation needs a square matrix")
        f = self.field
        acc = Matrix.zeros(f, m.rows, m.rows)
        for c in reversed(self.coeffs):
            acc = multiply(acc, m)
            if c != f.zero():
                acc = add(acc, scale(Matrix.identity(f, m.rows), c))
        return acc

    def __repr__(self):
        return f"Polynomial({self.field}, {self.coeffs})"


def poly_extended_gcd(a: Polynomial, b: Polynomial):
    """Monic gcd g with Bezout cofactors (g, s, t) such that s a + t b = g."""
    f = a.field
    zero = Polynomial(f, [])
    one = Polynomial(f, [f.one()])
    r0, r1 = a, b
    s0, s1 = one, zero
    t0, t1 = zero, one
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    lead_inv = f.inv(r0.leading())
    unit = Polynomial(f, [lead_inv])
    return r0.monic(), s0 * unit, t0 * unit


def minimal_polynomial(m: Matrix) -> Polynomial:
    """Monic polynomial of least degree annihilating ``m``.

    Found as the first linear dependence in the Krylov sequence of powers
    I, m, m^2, ... viewed as flattened vectors.
    """
    if m.rows != m.cols:
        raise ValueError("minimal polynomial needs a square matrix")
    f = m.field
    n = m.rows
    if n == 0:
        return Polynomial(f, [f.one()])
    # echelon basis of flattened powers, each with tracked combination coeffs
    basis: list[tuple[list, list]] = []
    power = Matrix.identity(f, n)
    k = 0
    while True:
        vec = [x for row in power.data for x in row]
        coeffs = [f.zero()] * (k + 1)
        coeffs[k] = f.one()
        # reduce against basis
        for bvec, bco in basis:
            piv = next(i for i, x in enumerate(bvec) if x != f.zero())
            fac = vec[piv]
            if fac == f.zero():
                continue
            vec = [f.sub(x, f.mul(fac, y)) for x, y in zip(vec, bvec)]
            co = list(coeffs)
            for i, c in enumerate(bco):
                co[i] = f.sub(co[i], f.mul(fac, c))
            coeffs = co
        if all(x == f.zero() for x in vec):
            # dependence: coeffs give the annihilating combination; monic in x^k
            lead = coeffs[k]
            inv = f.inv(lead)
            return Polynomial(f, [f.mul(c, inv) for c in coeffs])
        piv = next(i for i, x in enumerate(vec) if x != f.zero())
        inv = f.inv(vec[piv])
        vec = [f.mul(x, inv) for x in vec]
        coeffs = [f.mul(c, inv) for c in coeffs]
        basis.append((vec, coeffs))
        basis.sort(key=lambda bc: next(i for i, x in enumerate(bc[0]) if x != f.zero()))
        power = multiply(power, m)
        k += 1
        if k > n:  # Cayley-Hamilton bound; unreachable for consistent input
            raise RuntimeError("Krylov search exceeded the degree bound")


def _pth_root_poly(g: Polynomial) -> Polynomial:
    """For g(x) = h(x^p) over GF(p), return h (Frobenius fixes GF(p))."""
    p = g.field.p
    return Polynomial(g.field, [g.coeffs[i] for i in range(0, len(g.coeffs), p)])


def _squarefree_decomposition(f: Polynomial) -> list[tuple[Polynomial, int]]:
    """Squarefree decomposition of a monic polynomial over GF(p)."""
    field = f.field
    p = field.p
    one = Polynomial(field, [field.one()])
    out: list[tuple[Polynomial, int]] = []
    df = f.derivative()
    if df.is_zero():
        for g, m in _squarefree_decomposition(_pth_root_poly(f)):
            out.append((g, m * p))
        return out
    c = f.gcd(df)
    w = (f // c).monic()
    i = 1
    while not w.is_one():
        y = w.gcd(c)
        z = (w // y).monic()
        if not z.is_one():
            out.append((z, i))
        w = y
        c = (c // y).monic()
        i += 1
    if not c.is_one():
        for g, m in _squarefree_decomposition(_pth_root_poly(c)):
            out.append((g, m * p))
    return out


def _berlekamp_split(f: Polynomial) -> list[Polynomial]:
    """Irreducible factors of a monic squarefree polynomial over GF(p)."""
    field = f.field
    p = field.p
    n = f.degree
    if n <= 1:
        return [f]
    # Frobenius matrix: column i holds x^(i*p) mod f
    x_p = Polynomial(field, [field.zero()] * p + [field.one()]) % f
    cols = []
    cur = Polynomial(field, [field.one()])
    for _ in range(n):
        cs = cur.coeffs + [field.zero()] * (n - len(cur.coeffs))
        cols.append(cs[:n])
        cur = (cur * x_p) % f
    frob = Matrix(field, n, n, [[cols[j][i] for j in range(n)] for i in range(n)])
    fm = sub(frob, Matrix.identity(field, n))
    kernel = kernel_basis(fm)
    if len(kernel) == 1:
        return [f]
    # pick a non-constant kernel element and split with gcds
    for kv in kernel:
        coeffs = [kv.data[i][0] for i in range(n)]
        if any(c != field.zero() for c in coeffs[1:]):
            v = Polynomial(field, coeffs)
            break
    factors = []
    for c in range(p):
        g = f.gcd(v - Polynomial.constant(field, c))
        if not g.is_one() and g.degree < f.degree:
            factors.append(g)
    if not factors:  # defensive; cannot happen for a genuine splitting element
        return [f]
    rest = f
    out = []
    for g in factors:
        rest = (rest // g).monic()
        out.extend(_berlekamp_split(g))
    if not rest.is_one():
        out.extend(_berlekamp_split(rest))
    out.sort(key=lambda q: (q.degree, q.coeffs))
    return out


def factor_squarefree_gfp(f: Polynomial) -> list[tuple[Polynomial, int]]:
    """Full factorization over GF(p): monic irreducible factors with multiplicity.

    The product of ``factor**multiplicity`` equals the input up to its leading
    unit.  Raises on rational-field input.
    """
    if f.field.is_rational:
        raise ValueError("factorization is implemented over GF(p) only")
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    g = f.monic()
    if g.degree == 0:
        return []
    out = []
    for sq, mult in _squarefree_decomposition(g):
        for irr in _berlekamp_split(sq):
            out.append((irr, mult))
    out.sort(key=lambda fm: (fm[0].degree, fm[0].coeffs, fm[1]))
    return out


def svd_real(m: Matrix) -> list[float]:
    """Singular values of the real embedding of a rational matrix, descending.

    Length is min(rows, cols).  Values are floating point with a documented
    relative tolerance of about 1e-10; GF(p) input is rejected because no
    canonical real embedding exists there.
    """
    if not m.field.is_rational:
        raise ValueError("singular values are defined for rational matrices only")
    k = min(m.rows, m.cols)
    if k == 0:
        return []
    arr = np.array([[float(x) for x in row] for row in m.data], dtype=np.float64)
    vals = np.linalg.svd(arr, compute_uv=False)
    return [float(v) for v in vals]
