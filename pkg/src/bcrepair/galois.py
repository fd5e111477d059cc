"""Finite fields GF(p) and GF(p^m) with dense matrices over them.

Elements are stored as integers in ``[0, q)``.  For ``m > 1`` the integer
``sum(c_i * p**i)`` encodes the polynomial ``sum(c_i * x**i)`` reduced modulo
the field's monic irreducible polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence


class SingularMatrixError(ArithmeticError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


# --- polynomials over GF(p), coefficient lists lowest degree first ----------

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(a: Sequence[int], mod: Sequence[int], p: int) -> list[int]:
    """Remainder of ``a`` divided by ``mod`` over GF(p) (long division)."""
    a = _trim(x % p for x in a)
    mod = _trim(mod)
    if not mod:
        raise ZeroDivisionError("polynomial modulus is zero")
    inv_lead = pow(mod[-1], p - 2, p)
    while len(a) >= len(mod):
        coef = a[-1] * inv_lead % p
        shift = len(a) - len(mod)
        for i, c in enumerate(mod):
            a[shift + i] = (a[shift + i] - coef * c) % p
        a = _trim(a)
    return a


def poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    poly = _trim(poly)
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for low in product(range(p), repeat=d):
            if not poly_mod(poly, list(low) + [1], p):
                return False
    return True


def find_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically first monic irreducible polynomial of degree ``m``."""
    for low in product(range(p), repeat=m):
        cand = tuple(reversed(low)) + (1,)
        if cand[0] != 0 and is_irreducible(cand, p):
            return cand
    raise ValueError(f"no irreducible polynomial of degree {m} over GF({p})")


# --- fields -------------------------------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    """GF(p^m).  ``reduction_polynomial`` is monic, lowest degree first."""

    characteristic: int
    extension_degree: int = 1
    reduction_polynomial: tuple[int, ...] | None = field(default=None)

    def __post_init__(self):
        p, m = self.characteristic, self.extension_degree
        if not is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if m < 1:
            raise ValueError("extension degree must be positive")
        if m == 1:
            return
        poly = self.reduction_polynomial
        if poly is None:
            object.__setattr__(self, "reduction_polynomial", find_irreducible(p, m))
            return
        poly = tuple(int(c) % p for c in poly)
        if len(poly) != m + 1 or poly[-1] != 1:
            raise ValueError("reduction polynomial must be monic of degree m")
        if not is_irreducible(poly, p):
            raise ValueError(f"{poly} is reducible over GF({p})")
        object.__setattr__(self, "reduction_polynomial", poly)

    @property
    def order(self) -> int:
        return self.characteristic ** self.extension_degree

    @property
    def is_prime_field(self) -> bool:
        return self.extension_degree == 1

    def __str__(self):
        if self.is_prime_field:
            return f"GF({self.characteristic})"
        return f"GF({self.characteristic}^{self.extension_degree})"

    # integer-level arithmetic -------------------------------------------------

    def check(self, a: int) -> int:
        if not 0 <= a < self.order:
            raise ValueError(f"{a} is not a canonical element of {self}")
        return a

    def add(self, a: int, b: int) -> int:
        p = self.characteristic
        if self.is_prime_field:
            return (a + b) % p
        if p == 2:
            return a ^ b
        return self._from_digits([(x + y) % p for x, y in zip(self._digits(a), self._digits(b))])

    def neg(self, a: int) -> int:
        p = self.characteristic
        if self.is_prime_field:
            return -a % p
        if p == 2:
            return a
        return self._from_digits([-x % p for x in self._digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.is_prime_field:
            return a * b % self.characteristic
        if a == 0 or b == 0:
            return 0
        log, exp = self._tables
        return exp[(log[a] + log[b]) % (self.order - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"zero has no inverse in {self}")
        if self.is_prime_field:
            return pow(a, self.characteristic - 2, self.characteristic)
        log, exp = self._tables
        return exp[(-log[a]) % (self.order - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def power(self, a: int, e: int) -> int:
        if e < 0:
            return self.power(self.inv(a), -e)
        if self.is_prime_field:
            return pow(a, e, self.characteristic)
        out = 1
        for _ in range(e):
            out = self.mul(out, a)
        return out

    def _digits(self, a: int) -> list[int]:
        p, out = self.characteristic, []
        for _ in range(self.extension_degree):
            out.append(a % p)
            a //= p
        return out

    def _from_digits(self, digits: Iterable[int]) -> int:
        out, scale = 0, 1
        for d in digits:
            out += d * scale
            scale *= self.characteristic
        return out

    def poly_mul_reduce(self, a: int, b: int) -> int:
        """Schoolbook product modulo the reduction polynomial (no tables)."""
        p = self.characteristic
        prod = poly_mul(_trim(self._digits(a)), _trim(self._digits(b)), p)
        return self._from_digits(poly_mod(prod, self.reduction_polynomial, p))

    @cached_property
    def _tables(self):
        q = self.order
        for g in range(2, q) if q > 2 else [1]:
            exp = [1]
            x = 1
            for _ in range(q - 2):
                x = self.poly_mul_reduce(x, g)
                if x == 1:
                    break
                exp.append(x)
            if len(exp) == q - 1:
                log = [0] * q
                for i, v in enumerate(exp):
                    log[v] = i
                return log, exp
        raise AssertionError("no primitive element found")

    def element(self, value) -> "FieldElement":
        return FieldElement(self, value)


def GF(p: int, m: int = 1, poly=None) -> FieldSpec:
    return FieldSpec(p, m, tuple(poly) if poly is not None else None)


class FieldElement:
    """An immutable field element in canonical form."""

    __slots__ = ("spec", "_v")

    def __init__(self, spec: FieldSpec, value):
        if isinstance(value, FieldElement):
            value = value._v
        elif isinstance(value, (tuple, list)):
            if len(value) != spec.extension_degree:
                raise ValueError("coefficient vector length must equal m")
            value = spec._from_digits(int(c) % spec.characteristic for c in value)
        elif spec.is_prime_field:
            value = int(value) % spec.order
        else:
            value = spec.check(int(value))
        self.spec = spec
        self._v = value

    @property
    def value(self):
        """Integer for prime fields, coefficient tuple (lowest degree first) otherwise."""
        if self.spec.is_prime_field:
            return self._v
        return tuple(self.spec._digits(self._v))

    def __int__(self):
        return self._v

    def _other(self, other):
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise ValueError("elements belong to different fields")
            return other._v
        if isinstance(other, int):
            return FieldElement(self.spec, other)._v
        return NotImplemented

    def _wrap(self, v):
        return FieldElement(self.spec, v)

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.spec.add(self._v, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.spec.sub(self._v, o))

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.spec.sub(o, self._v))

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.spec.mul(self._v, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.spec.div(self._v, o))

    def __neg__(self):
        return self._wrap(self.spec.neg(self._v))

    def inverse(self) -> "FieldElement":
        return self._wrap(self.spec.inv(self._v))

    def __pow__(self, e: int):
        return self._wrap(self.spec.power(self._v, e))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.spec == other.spec and self._v == other._v
        if isinstance(other, int):
            return self._v == FieldElement(self.spec, other)._v
        return NotImplemented

    def __hash__(self):
        return hash((self.spec, self._v))

    def __bool__(self):
        return self._v != 0

    def __repr__(self):
        return f"FieldElement({self.spec}, {self.value})"


# --- matrices ---------------------------------------------------------------------

class FieldMatrix:
    """Dense row-major matrix of canonical integers over one field."""

    __slots__ = ("field", "rows", "cols", "_a")

    def __init__(self, field: FieldSpec, data: Sequence[Sequence]):
        rows = [[FieldElement(field, v)._v if not isinstance(v, int) or not field.is_prime_field
                 else v % field.order for v in row] for row in data]
        if not rows or not rows[0]:
            raise ValueError("matrices need at least one row and one column")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged rows")
        self.field = field
        self.rows = len(rows)
        self.cols = width
        self._a = rows

    @classmethod
    def _raw(cls, field, rows):
        m = cls.__new__(cls)
        m.field, m.rows, m.cols, m._a = field, len(rows), len(rows[0]), rows
        return m

    @classmethod
    def zeros(cls, field, rows, cols):
        return cls._raw(field, [[0] * cols for _ in range(rows)])

    @classmethod
    def column(cls, field, values):
        return cls(field, [[v] for v in values])

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self._a]

    def entry(self, i: int, j: int) -> FieldElement:
        return FieldElement(self.field, self._a[i][j])

    def __getitem__(self, ij):
        i, j = ij
        return self._a[i][j]

    def row(self, i: int) -> list[int]:
        return list(self._a[i])

    def col(self, j: int) -> list[int]:
        return [r[j] for r in self._a]

    def select_columns(self, cols: Sequence[int]) -> "FieldMatrix":
        return FieldMatrix._raw(self.field, [[r[j] for j in cols] for r in self._a])

    def select_rows(self, rows: Sequence[int]) -> "FieldMatrix":
        return FieldMatrix._raw(self.field, [list(self._a[i]) for i in rows])

    def transpose(self) -> "FieldMatrix":
        return FieldMatrix._raw(self.field, [list(c) for c in zip(*self._a)])

    def hstack(self, other: "FieldMatrix") -> "FieldMatrix":
        _same_field(self, other)
        if self.rows != other.rows:
            raise ValueError("row counts differ")
        return FieldMatrix._raw(self.field, [a + b for a, b in zip(self._a, other._a)])

    def vstack(self, other: "FieldMatrix") -> "FieldMatrix":
        _same_field(self, other)
        if self.cols != other.cols:
            raise ValueError("column counts differ")
        return FieldMatrix._raw(self.field, [list(r) for r in self._a + other._a])

    def scale(self, c: int) -> "FieldMatrix":
        F = self.field
        return FieldMatrix._raw(F, [[F.mul(c, x) for x in r] for r in self._a])

    def __add__(self, other: "FieldMatrix") -> "FieldMatrix":
        _same_field(self, other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        F = self.field
        return FieldMatrix._raw(F, [[F.add(x, y) for x, y in zip(a, b)] for a, b in zip(self._a, other._a)])

    def __sub__(self, other: "FieldMatrix") -> "FieldMatrix":
        _same_field(self, other)
        F = self.field
        return FieldMatrix._raw(F, [[F.sub(x, y) for x, y in zip(a, b)] for a, b in zip(self._a, other._a)])

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        return mat_mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return self.field == other.field and self._a == other._a

    def __repr__(self):
        return f"FieldMatrix({self.field}, {self._a})"


def _same_field(a: FieldMatrix, b: FieldMatrix):
    if a.field != b.field:
        raise ValueError("matrices belong to different fields")


def identity(field: FieldSpec, n: int) -> FieldMatrix:
    return FieldMatrix._raw(field, [[1 if i == j else 0 for j in range(n)] for i in range(n)])


def mat_mul(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    _same_field(a, b)
    if a.cols != b.rows:
        raise ValueError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    F = a.field
    bt = list(zip(*b._a))
    if F.is_prime_field:
        p = F.order
        rows = [[sum(x * y for x, y in zip(r, c)) % p for c in bt] for r in a._a]
    else:
        rows = []
        for r in a._a:
            out = []
            for c in bt:
                acc = 0
                for x, y in zip(r, c):
                    if x and y:
                        acc = F.add(acc, F.mul(x, y))
                out.append(acc)
            rows.append(out)
    return FieldMatrix._raw(F, rows)


def _eliminate(F: FieldSpec, rows: list[list[int]], ncols: int):
    """Reduced row echelon form in place (first-nonzero pivoting); returns pivot columns."""
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = F.inv(rows[r][c])
        rows[r] = [F.mul(inv, x) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def _rank_prime(p: int, rows: list[list[int]]) -> int:
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        top = rows[rank]
        inv = pow(top[c], p - 2, p)
        for i in range(rank + 1, len(rows)):
            f = rows[i][c]
            if f:
                f = f * inv % p
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], top)]
        rank += 1
        if rank == len(rows):
            break
    return rank


def rank_of_rows(field: FieldSpec, rows: Sequence[Sequence[int]]) -> int:
    """Rank of a list of integer row vectors (may be empty)."""
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    if field.is_prime_field:
        return _rank_prime(field.order, rows)
    return len(_eliminate(field, rows, len(rows[0])))


def mat_rank(a: FieldMatrix) -> int:
    return rank_of_rows(a.field, a._a)


def solve_linear(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    """The unique ``y`` with ``a @ y == b``; ``a`` must be square and nonsingular."""
    _same_field(a, b)
    if a.rows != a.cols:
        raise ValueError("coefficient matrix must be square")
    if b.rows != a.rows:
        raise ValueError("right-hand side has the wrong number of rows")
    F = a.field
    aug = [ra + rb for ra, rb in zip(a._a, b._a)]
    pivots = _eliminate(F, aug, a.cols)
    if len(pivots) < a.cols:
        raise SingularMatrixError("matrix is singular")
    return FieldMatrix._raw(F, [row[a.cols:] for row in aug])


def inverse(a: FieldMatrix) -> FieldMatrix:
    return solve_linear(a, identity(a.field, a.rows))


def random_matrix(field: FieldSpec, rows: int, cols: int, rng) -> FieldMatrix:
    """Uniform entries drawn from ``rng`` (a :class:`random.Random`)."""
    q = field.order
    return FieldMatrix._raw(field, [[rng.randrange(q) for _ in range(cols)] for _ in range(rows)])
