"""Local systems: invertible matrices over the two-element field.

Rows are stored as int bitmasks, polynomials over the field as coefficient
bitmasks (bit k = coefficient of x^k).  The pairing dimension evaluates the
characteristic polynomial of one system on the other and doubles the
kernel dimension.
"""
from __future__ import annotations

from dataclasses import dataclass


def poly_mul(a: int, b: int) -> int:
    out = 0
    while a:
        if a & 1:
            out ^= b
        a >>= 1
        b <<= 1
    return out


def poly_degree(a: int) -> int:
    return a.bit_length() - 1


@dataclass(frozen=True)
class LocalSystem:
    rows: tuple
    dim: int

    def __post_init__(self):
        if self.dim < 1 or len(self.rows) != self.dim:
            raise ValueError("bad matrix shape")
        if matrix_rank(self.rows, self.dim) != self.dim:
            raise ValueError("local system matrix must be invertible")


def local_system(rows) -> LocalSystem:
    rows = tuple(int(r) for r in rows)
    return LocalSystem(rows, len(rows))


def identity_rows(n: int):
    return tuple(1 << i for i in range(n))


def matrix_rank(rows, n: int) -> int:
    work = list(rows)
    rank = 0
    for col in range(n):
        bit = 1 << col
        pivot = next((i for i in range(rank, n) if work[i] & bit), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for i in range(n):
            if i != rank and work[i] & bit:
                work[i] ^= work[rank]
        rank += 1
    return rank


def mat_mul(a, b, n: int):
    # rows are bitmasks over columns; compute a @ b
    bt = transpose(b, n)
    return tuple(
        sum(((a[i] & bt[j]).bit_count() & 1) << j for j in range(n))
        for i in range(n)
    )


def transpose(rows, n: int):
    return tuple(
        sum(((rows[i] >> j) & 1) << i for i in range(n))
        for j in range(n)
    )


def mat_add(a, b):
    return tuple(x ^ y for x, y in zip(a, b))


def mat_inv(rows, n: int):
    work = [rows[i] | (1 << (n + i)) for i in range(n)]
    for col in range(n):
        bit = 1 << col
        pivot = next(i for i in range(col, n) if work[i] & bit)
        work[col], work[pivot] = work[pivot], work[col]
        for i in range(n):
            if i != col and work[i] & bit:
                work[i] ^= work[col]
    return tuple(work[i] >> n for i in range(n))


def char_poly(X: LocalSystem) -> int:
    """Characteristic polynomial of X as a coefficient bitmask.

    Subset dynamic program over column sets for det(xI + A); signs vanish
    over the field.
    """
    n = X.dim
    entries = [
        [(X.rows[i] >> j) & 1 for j in range(n)] for i in range(n)
    ]
    dets = {0: 1}
    for size in range(1, n + 1):
        new = {}
        for subset in subsets_of_size(n, size):
            row = size - 1
            acc = 0
            rest = subset
            while rest:
                bit = rest & -rest
                j = bit.bit_length() - 1
                rest ^= bit
                entry = entries[row][j]
                if row == j:
                    entry ^= 2  # add x on the diagonal
                if entry:
                    acc ^= poly_mul(entry, dets[subset ^ bit])
            new[subset] = acc
        dets = new
    return dets[(1 << n) - 1]


def subsets_of_size(n: int, k: int):
    subset = (1 << k) - 1
    top = 1 << n
    while subset < top:
        yield subset
        lo = subset & -subset
        high = subset + lo
        subset = high | (((subset ^ high) // lo) >> 2)


def poly_eval_matrix(poly: int, Y: LocalSystem):
    n = Y.dim
    acc = tuple(0 for _ in range(n))
    power = identity_rows(n)
    k = 0
    while poly >> k:
        if (poly >> k) & 1:
            acc = mat_add(acc, power)
        power = mat_mul(power, Y.rows, n)
        k += 1
    return acc


def pairing_dim(X: LocalSystem, Y: LocalSystem) -> int:
    """2 * dim ker(f_X(Y)) with f_X the characteristic polynomial of X."""
    evaluated = poly_eval_matrix(char_poly(X), Y)
    return 2 * (Y.dim - matrix_rank(evaluated, Y.dim))


def is_complementary(X: LocalSystem, Y: LocalSystem) -> bool:
    return pairing_dim(X, Y) == 0


def is_inhibited(X: LocalSystem) -> bool:
    return is_complementary(X, trivial_system())


def trivial_system() -> LocalSystem:
    return local_system([1])


def poly_deriv(poly: int) -> int:
    out = 0
    k = 1
    while poly >> k:
        if (poly >> k) & 1 and k & 1:
            out |= 1 << (k - 1)
        k += 1
    return out


def poly_mod(a: int, b: int) -> int:
    db = poly_degree(b)
    while a and poly_degree(a) >= db:
        a ^= b << (poly_degree(a) - db)
    return a


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def is_squarefree(poly: int) -> bool:
    d = poly_deriv(poly)
    return d != 0 and poly_gcd(poly, d) == 1


def symmetry_failures(systems):
    """Pairs where the characteristic-polynomial formula is asymmetric.

    The formula evaluates the first argument's characteristic polynomial,
    which absorbs repeated factors; such pairs are reported rather than
    silently symmetrized.
    """
    out = []
    systems = list(systems)
    for X in systems:
        for Y in systems:
            a, b = pairing_dim(X, Y), pairing_dim(Y, X)
            if a != b:
                out.append((X, Y, a, b))
    return out


def jordan_system(m: int) -> LocalSystem:
    """Unipotent single-block system of size m."""
    rows = []
    for i in range(m):
        row = 1 << i
        if i + 1 < m:
            row |= 1 << (i + 1)
        rows.append(row)
    return local_system(rows)


def companion_system(poly: int) -> LocalSystem:
    n = poly_degree(poly)
    if n < 1 or not poly & 1:
        raise ValueError("companion polynomial needs degree >= 1 and nonzero constant term")
    rows = []
    for i in range(n):
        row = (1 << (i - 1)) if i else 0
        if (poly >> i) & 1:
            row |= 1 << (n - 1)
        rows.append(row)
    return local_system(rows)


def permutation_system(n: int) -> LocalSystem:
    """Cyclic permutation matrix of order n."""
    return local_system([1 << ((i + 1) % n) for i in range(n)])


def enumerate_invertible(n: int):
    for mask in range(1 << (n * n)):
        rows = tuple((mask >> (n * i)) & ((1 << n) - 1) for i in range(n))
        if matrix_rank(rows, n) == n:
            yield LocalSystem(rows, n)


def parse_poly(text: str) -> int:
    out = 0
    for term in text.replace("-", "+").split("+"):
        term = term.strip()
        if not term:
            continue
        if term == "1":
            out ^= 1
        elif term == "x":
            out ^= 2
        elif term.startswith("x^"):
            out ^= 1 << int(term[2:])
        else:
            raise ValueError(f"cannot parse polynomial term {term!r}")
    return out


def parse_local_system(text: str) -> LocalSystem:
    text = text.strip()
    if text == "trivial":
        return trivial_system()
    if text.startswith("companion(") and text.endswith(")"):
        return companion_system(parse_poly(text[10:-1]))
    if text.startswith("[") and text.endswith("]"):
        rows = []
        for row_txt in text[1:-1].split(";"):
            bits = [b.strip() for b in row_txt.split(",")]
            row = 0
            for j, b in enumerate(bits):
                if b == "1":
                    row |= 1 << j
                elif b != "0":
                    raise ValueError(f"matrix entries must be bits, got {b!r}")
            rows.append(row)
        return local_system(rows)
    raise ValueError(f"cannot parse local system {text!r}")


def format_local_system(X: LocalSystem) -> str:
    rows = []
    for r in X.rows:
        rows.append(",".join(str((r >> j) & 1) for j in range(X.dim)))
    return "[" + ";".join(rows) + "]"
