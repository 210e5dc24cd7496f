"""Matrix realizations sl(n, K) and so(5, K) with exact invariants.

so(5) elements use the 5x5 block shape

    ( 0    b    c  )
    ( -c^t m    n  )
    ( -b^t p   -m^t)

with b, c row 2-vectors, m any 2x2, and n, p skew-symmetric 2x2.

The invariant pair (f1, f2) collects characteristic-polynomial coefficients:
for sl(3), chi(t) = t^3 + f1 t + f2; for so(5), chi(t) = t^5 + f1 t^3 + f2 t.
The separator theta is kept projectively as (f1^m1 : f2^m2) with
m1 = deg f2, m2 = deg f1, and compared only by cross-multiplication.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .chevalley import AlgElement, ChevalleyAlgebra


class MatrixRepError(ValueError):
    pass


def _neg(c):
    return tuple(-x for x in c)


class MatrixElement:
    """n x n matrix over an exact field, tagged with its realization."""

    __slots__ = ("realization", "rows", "field")

    def __init__(self, realization, rows, field, validate=True):
        self.realization = realization
        self.rows = tuple(tuple(r) for r in rows)
        self.field = field
        if validate:
            self.validate()

    # -- shape validation -------------------------------------------------

    def validate(self):
        n = len(self.rows)
        if any(len(r) != n for r in self.rows):
            raise MatrixRepError("matrix is not square")
        if self.realization.startswith("sl"):
            if int(self.realization[2:]) != n:
                raise MatrixRepError("size mismatch for %s" % self.realization)
            tr = self.rows[0][0]
            for i in range(1, n):
                tr = tr + self.rows[i][i]
            if tr:
                raise MatrixRepError("sl(%d) element must be traceless" % n)
        elif self.realization == "so5":
            if n != 5:
                raise MatrixRepError("so5 elements are 5x5")
            R = self.rows
            if R[0][0]:
                raise MatrixRepError("so5 shape: (0,0) entry must vanish")
            # first column vs first row blocks
            for k in (1, 2):
                if R[k][0] != -R[0][k + 2]:
                    raise MatrixRepError("so5 shape: -c^t block mismatch")
            for k in (3, 4):
                if R[k][0] != -R[0][k - 2]:
                    raise MatrixRepError("so5 shape: -b^t block mismatch")
            # n, p skew
            if R[1][3] or R[2][4] or R[1][4] != -R[2][3]:
                raise MatrixRepError("so5 shape: n block must be skew")
            if R[3][1] or R[4][2] or R[3][2] != -R[4][1]:
                raise MatrixRepError("so5 shape: p block must be skew")
            # lower-right = -m^t
            for i in (1, 2):
                for j in (1, 2):
                    if R[i + 2][j + 2] != -R[j][i]:
                        raise MatrixRepError("so5 shape: -m^t block mismatch")
        else:
            raise MatrixRepError("unknown realization %r" % self.realization)

    # -- arithmetic --------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, MatrixElement) or other.realization != self.realization \
                or other.field != self.field:
            raise MatrixRepError("realization/shape mismatch")

    def __add__(self, other):
        self._check(other)
        return MatrixElement(self.realization,
                             [[a + b for a, b in zip(ra, rb)]
                              for ra, rb in zip(self.rows, other.rows)],
                             self.field, validate=False)

    def __sub__(self, other):
        self._check(other)
        return MatrixElement(self.realization,
                             [[a - b for a, b in zip(ra, rb)]
                              for ra, rb in zip(self.rows, other.rows)],
                             self.field, validate=False)

    def __neg__(self):
        return MatrixElement(self.realization, [[-a for a in r] for r in self.rows],
                             self.field, validate=False)

    def scale(self, c):
        return MatrixElement(self.realization, [[c * a for a in r] for r in self.rows],
                             self.field, validate=False)

    def scale_rational(self, q):
        return self.scale(self.field.from_rational(Fraction(q)))

    def bracket(self, other):
        return commutator(self, other)

    def is_zero(self):
        return not any(any(r) for r in self.rows)

    def __eq__(self, other):
        return isinstance(other, MatrixElement) and other.realization == self.realization \
            and other.rows == self.rows

    def __hash__(self):
        return hash((self.realization, self.rows))

    def to_json(self):
        f = self.field
        return {"basis": "matrix", "realization": self.realization,
                "rows": [[f.format_scalar(x) for x in r] for r in self.rows]}

    def __repr__(self):
        return "MatrixElement(%s, %s)" % (self.realization, [list(map(str, r)) for r in self.rows])


def matrix_from_json(obj, field, validate=True):
    if obj.get("basis") != "matrix":
        raise MatrixRepError("expected matrix encoding")
    rows = [[field.parse_scalar(x) for x in r] for r in obj["rows"]]
    return MatrixElement(obj["realization"], rows, field, validate=validate)


def matrix_from_ints(realization, rows, field, validate=True):
    return MatrixElement(realization, [[field.from_int(x) for x in r] for r in rows],
                         field, validate=validate)


def commutator(X: MatrixElement, Y: MatrixElement) -> MatrixElement:
    X._check(Y)
    A = [list(r) for r in X.rows]
    B = [list(r) for r in Y.rows]
    AB = linalg.mat_mul(A, B)
    BA = linalg.mat_mul(B, A)
    return MatrixElement(X.realization,
                         [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(AB, BA)],
                         X.field, validate=False)


# -- characteristic invariants ----------------------------------------------


def _poly_mul(p, q, zero):
    out = [zero] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                if b:
                    out[i + j] = out[i + j] + a * b
    return out


def char_poly(X: MatrixElement):
    """Exact coefficients of det(tI - X), low degree first."""
    field = X.field
    zero, one = field.zero(), field.one()
    n = len(X.rows)
    P = [[([-X.rows[i][j], one] if i == j else [-X.rows[i][j]])
          for j in range(n)] for i in range(n)]
    memo = {}

    def det(cols):
        if not cols:
            return [one]
        key = cols
        if key in memo:
            return memo[key]
        r = n - len(cols)
        acc = [zero]
        for pos, j in enumerate(cols):
            entry = P[r][j]
            if len(entry) == 1 and not entry[0]:
                continue
            sub = det(tuple(c for c in cols if c != j))
            term = _poly_mul(entry, sub, zero)
            if pos % 2:
                term = [-t for t in term]
            if len(acc) < len(term):
                acc = acc + [zero] * (len(term) - len(acc))
            for k, t in enumerate(term):
                acc[k] = acc[k] + t
        memo[key] = acc
        return acc

    out = det(tuple(range(n)))
    out = out + [zero] * (n + 1 - len(out))
    return out


@dataclass
class InvariantPair:
    """Characteristic-polynomial invariants with the projective theta pair."""

    f1: object
    f2: object
    deg_f1: int
    deg_f2: int

    @property
    def m1(self):
        return self.deg_f2

    @property
    def m2(self):
        return self.deg_f1

    @property
    def theta_pair(self):
        return (self.f1 ** self.m1, self.f2 ** self.m2)

    def to_json(self, field):
        x, y = self.theta_pair
        return {"f1": field.format_scalar(self.f1), "f2": field.format_scalar(self.f2),
                "deg_f1": self.deg_f1, "deg_f2": self.deg_f2,
                "theta_pair": [field.format_scalar(x), field.format_scalar(y)]}


def char_invariants(X: MatrixElement) -> InvariantPair:
    f = X.field
    if X.realization == "sl3":
        c = char_poly(X)
        if c[2]:
            raise MatrixRepError("sl(3) characteristic polynomial has nonzero t^2 term")
        return InvariantPair(f1=c[1], f2=c[0], deg_f1=2, deg_f2=3)
    if X.realization == "so5":
        X.validate()
        c = char_poly(X)
        if c[0] or c[2] or c[4]:
            raise MatrixRepError("so(5) characteristic polynomial must be odd")
        return InvariantPair(f1=c[3], f2=c[1], deg_f1=2, deg_f2=4)
    raise MatrixRepError("char_invariants supports sl3 and so5 only")


def theta_separates(D1: MatrixElement, D2: MatrixElement) -> str:
    """Compare theta values projectively; 'undefined' iff a pair is (0:0)."""
    if D1.is_zero() or D2.is_zero():
        raise MatrixRepError("theta is undefined on the zero matrix")
    x1, y1 = char_invariants(D1).theta_pair
    x2, y2 = char_invariants(D2).theta_pair
    if (not x1 and not y1) or (not x2 and not y2):
        return "undefined"
    return "separated" if x1 * y2 != x2 * y1 else "equal"


# -- Chevalley-basis realizations --------------------------------------------


class Realization:
    """Verified linear isomorphism between a Chevalley algebra and a matrix
    algebra, with phi([x,y]) = [phi(x), phi(y)] checked on every basis pair."""

    def __init__(self, alg: ChevalleyAlgebra, tag, images):
        self.alg = alg
        self.tag = tag
        self.n = len(images[0])
        self.images = images
        flat = []
        for i in range(self.n):
            for j in range(self.n):
                flat.append([images[k][i][j] for k in range(alg.dim)])
        self._A = flat
        self._verify()

    def image_matrix(self, k):
        return self.images[k]

    def to_matrix(self, x: AlgElement) -> MatrixElement:
        f = self.alg.field
        rows = [[f.zero()] * self.n for _ in range(self.n)]
        for k, c in enumerate(x.coeffs):
            if c:
                B = self.images[k]
                for i in range(self.n):
                    for j in range(self.n):
                        if B[i][j]:
                            rows[i][j] = rows[i][j] + c * B[i][j]
        return MatrixElement(self.tag, rows, f, validate=False)

    def matrix_coords(self, rows):
        b = [rows[i][j] for i in range(self.n) for j in range(self.n)]
        sol = linalg.solve(self._A, b, self.alg.field)
        if sol is None:
            raise MatrixRepError("matrix is outside the realized subalgebra")
        return sol

    def from_matrix(self, M: MatrixElement) -> AlgElement:
        return AlgElement(self.alg, self.matrix_coords(M.rows))

    def _verify(self):
        alg = self.alg
        for i in range(alg.dim):
            for j in range(i + 1, alg.dim):
                lhs = commutator(
                    MatrixElement(self.tag, self.images[i], alg.field, validate=False),
                    MatrixElement(self.tag, self.images[j], alg.field, validate=False))
                rhs = self.to_matrix(alg.bracket(alg.basis_element(i), alg.basis_element(j)))
                if lhs.rows != rhs.rows:
                    raise MatrixRepError(
                        "realization fails on basis pair (%d, %d)" % (i, j))


def _unit_matrix(field, n, i, j, c=1):
    rows = [[field.zero()] * n for _ in range(n)]
    rows[i][j] = field.from_int(c)
    return rows


def _mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _fill_composite_images(alg, images, n):
    """Extend generator images to all root vectors by bracketing upward in
    height, dividing by the known structure constants."""
    f = alg.field
    by_height = sorted(alg.pos_order, key=lambda b: (b.height, b.coords))
    simple_coords = [s.coords for s in alg.rs.simple_roots]
    for b in by_height:
        if b.height == 1:
            continue
        for sign in (1, -1):
            coords = b.coords if sign == 1 else _neg(b.coords)
            k = alg._eidx[coords]
            if images[k] is not None:
                continue
            done = False
            for sc in simple_coords:
                s = sc if sign == 1 else _neg(sc)
                g = tuple(x - y for x, y in zip(coords, s))
                if not alg.rs.contains(g) or images.get(alg._eidx[g]) is None:
                    continue
                N = alg.n_table[(s, g)]
                A = images[alg._eidx[s]]
                B = images[alg._eidx[g]]
                AB = linalg.mat_mul(A, B)
                BA = linalg.mat_mul(B, A)
                inv = 1 / f.from_int(N)
                images[k] = [[inv * (x - y) for x, y in zip(ra, rb)]
                             for ra, rb in zip(AB, BA)]
                done = True
                break
            if not done:
                raise MatrixRepError("no simple-root decomposition for %r" % (coords,))
    return images


def _realize_type_A(alg: ChevalleyAlgebra) -> Realization:
    n = alg.rank + 1
    f = alg.field
    images = {}
    for i in range(alg.rank):
        h = [[f.zero()] * n for _ in range(n)]
        h[i][i] = f.one()
        h[i + 1][i + 1] = -f.one()
        images[i] = h
        a = alg.rs.simple_roots[i].coords
        images[alg._eidx[a]] = _unit_matrix(f, n, i, i + 1)
        images[alg._eidx[_neg(a)]] = _unit_matrix(f, n, i + 1, i)
    for k in range(alg.dim):
        images.setdefault(k, None)
    images = _fill_composite_images(alg, images, n)
    return Realization(alg, "sl%d" % n, [images[k] for k in range(alg.dim)])


def _realize_B2(alg: ChevalleyAlgebra) -> Realization:
    f = alg.field
    n = 5

    def diag(*vals):
        rows = [[f.zero()] * n for _ in range(n)]
        for i, v in enumerate(vals):
            rows[i][i] = f.from_int(v)
        return rows

    a1 = alg.rs.simple_roots[0].coords
    a2 = alg.rs.simple_roots[1].coords
    candidates = []
    for c, cp in ((1, -2), (-1, 2), (2, -1), (-2, 1)):
        for s1 in (1, -1):
            candidates.append((c, cp, s1))
    last_err = None
    for c, cp, s1 in candidates:
        images = {0: diag(0, 1, -1, -1, 1), 1: diag(0, 0, 2, 0, -2)}
        images[alg._eidx[a1]] = _mat_add(_unit_matrix(f, n, 1, 2, s1),
                                         _unit_matrix(f, n, 4, 3, -s1))
        images[alg._eidx[_neg(a1)]] = _mat_add(_unit_matrix(f, n, 2, 1, s1),
                                               _unit_matrix(f, n, 3, 4, -s1))
        images[alg._eidx[a2]] = _mat_add(_unit_matrix(f, n, 0, 4, c),
                                         _unit_matrix(f, n, 2, 0, -c))
        images[alg._eidx[_neg(a2)]] = _mat_add(_unit_matrix(f, n, 0, 2, cp),
                                               _unit_matrix(f, n, 4, 0, -cp))
        full = dict(images)
        for k in range(alg.dim):
            full.setdefault(k, None)
        try:
            full = _fill_composite_images(alg, full, n)
            return Realization(alg, "so5", [full[k] for k in range(alg.dim)])
        except MatrixRepError as e:
            last_err = e
    raise MatrixRepError("no so5 generator assignment verified: %s" % last_err)


def realize_chevalley(alg: ChevalleyAlgebra) -> Realization:
    """Verified isomorphism onto sl(rank+1) for type A, so(5) for B2."""
    if alg.field.characteristic == 2:
        raise MatrixRepError("matrix realizations need characteristic != 2")
    if alg.rs.type_label == "A":
        return _realize_type_A(alg)
    if alg.rs.key == ("B", 2):
        return _realize_B2(alg)
    raise MatrixRepError("no matrix realization for %s_%d"
                         % (alg.rs.type_label, alg.rs.rank))
