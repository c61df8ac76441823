"""Small exact linear algebra toolkit over Q.

Dense Gaussian elimination with deterministic pivoting (first nonzero entry
in column order), affine solves returning particular solution plus nullspace,
matrix inverse, and the Faddeev-LeVerrier characteristic polynomial.  All
matrices are lists of lists of rationals; sizes here are tiny (<= ~10).
"""

from __future__ import annotations

from dataclasses import dataclass

from .rational import Q, ZERO


def identity(m: int):
    return [[Q(1) if i == j else ZERO for j in range(m)] for i in range(m)]


def mat_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    out = []
    for i in range(rows):
        row = []
        ai = a[i]
        for j in range(cols):
            s = ZERO
            for k in range(inner):
                aik = ai[k]
                if aik != 0:
                    s = s + aik * b[k][j]
            row.append(s)
        out.append(row)
    return out


def mat_vec(a, v):
    out = []
    for row in a:
        s = ZERO
        for x, y in zip(row, v):
            if x != 0:
                s = s + x * y
        out.append(s)
    return out


def transpose(a):
    return [list(col) for col in zip(*a)]


@dataclass
class AffineSolution:
    consistent: bool
    particular: list | None  # free variables set to zero
    nullspace: list  # basis vectors of the homogeneous solution space

    @property
    def unique(self) -> bool:
        return self.consistent and not self.nullspace


def solve_affine(a, b) -> AffineSolution:
    """Solve a x = b exactly; a is rows x cols, b length rows."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    m = [list(map(Q, row)) + [Q(bi)] for row, bi in zip(a, b)]
    pivots = []
    r = 0
    for c in range(cols):
        pivot_row = None
        for i in range(r, rows):
            if m[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if m[i][cols] != 0:
            return AffineSolution(False, None, [])
    particular = [ZERO] * cols
    for row_idx, c in enumerate(pivots):
        particular[c] = m[row_idx][cols]
    free = [c for c in range(cols) if c not in pivots]
    nullspace = []
    for fc in free:
        v = [ZERO] * cols
        v[fc] = Q(1)
        for row_idx, c in enumerate(pivots):
            v[c] = -m[row_idx][fc]
        nullspace.append(v)
    return AffineSolution(True, particular, nullspace)


def mat_inverse(a):
    m = len(a)
    aug = [list(map(Q, row)) + list(identity(m)[i]) for i, row in enumerate(a)]
    for c in range(m):
        pivot_row = None
        for i in range(c, m):
            if aug[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            raise ValueError("matrix is singular")
        aug[c], aug[pivot_row] = aug[pivot_row], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for i in range(m):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [row[m:] for row in aug]


def rank(a) -> int:
    if not a:
        return 0
    sol = solve_affine(a, [ZERO] * len(a))
    return len(a[0]) - len(sol.nullspace)


def char_poly(a):
    """Coefficients [1, c1, ..., cm] of det(tI - A) = t^m + c1 t^(m-1) + ... + cm."""
    m = len(a)
    coeffs = [Q(1)]
    mk = identity(m)
    for k in range(1, m + 1):
        if k > 1:
            shifted = [[mk[i][j] + (coeffs[k - 1] if i == j else ZERO)
                        for j in range(m)] for i in range(m)]
            mk = mat_mul(a, shifted)
        else:
            mk = [list(map(Q, row)) for row in a]
        trace = sum((mk[i][i] for i in range(m)), ZERO)
        coeffs.append(-trace / k)
    return coeffs


def _sign_changes(coeffs) -> int:
    signs = [1 if c > 0 else -1 for c in coeffs if c != 0]
    return sum(1 for x, y in zip(signs, signs[1:]) if x != y)


def real_symmetric_signature(a):
    """(positive, negative, zero) eigenvalue counts of a symmetric rational matrix.

    Uses Descartes' rule on the characteristic polynomial, which is exact for
    polynomials with all real roots.
    """
    m = len(a)
    for i in range(m):
        for j in range(i):
            if a[i][j] != a[j][i]:
                raise ValueError("matrix is not symmetric")
    p = char_poly(a)  # [1, c1, ..., cm] for t^m + c1 t^(m-1) + ...
    zero = 0
    while zero < m and p[m - zero] == 0:
        zero += 1
    pos = _sign_changes(p)
    # p(-t) up to sign: flip coefficients of odd powers of t
    neg_poly = [c if (m - i) % 2 == 0 else -c for i, c in enumerate(p)]
    neg = _sign_changes(neg_poly)
    if pos + neg + zero != m:
        raise ArithmeticError("signature bookkeeping failed; matrix not real-rooted?")
    return pos, neg, zero
