"""Free Lie polynomials: parsing, Lyndon normal forms, evaluation.

Grammar (whitespace insignificant; a leading sign is also accepted):

    poly  := term (('+'|'-') term)*
    term  := [coef '*'] atom
    atom  := var | '[' poly ',' poly ']' | '(' poly ')'
    var   := 'X' digits | 'X' | 'Y' | 'Z' | 'T'      (X,Y,Z,T = X1..X4)

Coefficients are integers or rationals "a/b" and always live over Q; they are
mapped into the target field at evaluation time, so one AST serves every
field.  Normal forms use the Lyndon-word basis for the variable order
X1 < X2 < ..., computed by straightening in the tensor algebra: the lex-least
word of a homogeneous Lie element is a Lyndon word, and subtracting its
bracketed Lyndon monomial strictly raises that least word.
"""

from __future__ import annotations

import re
from fractions import Fraction


class ParseError(ValueError):
    def __init__(self, message, position):
        super().__init__("%s (at offset %d)" % (message, position))
        self.position = position


class Var:
    __slots__ = ("index",)

    def __init__(self, index):
        if index < 1:
            raise ValueError("variable indices start at 1")
        self.index = index

    def __eq__(self, o):
        return isinstance(o, Var) and o.index == self.index

    def __hash__(self):
        return hash(("v", self.index))

    def __repr__(self):
        return "X%d" % self.index


class Br:
    __slots__ = ("left", "right")

    def __init__(self, left, right):
        self.left = left
        self.right = right

    def __eq__(self, o):
        return isinstance(o, Br) and o.left == self.left and o.right == self.right

    def __hash__(self):
        return hash(("b", self.left, self.right))

    def __repr__(self):
        return "[%r,%r]" % (self.left, self.right)


class Sum:
    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = tuple(terms)

    def __eq__(self, o):
        return isinstance(o, Sum) and o.terms == self.terms

    def __hash__(self):
        return hash(("s", self.terms))

    def __repr__(self):
        return "Sum(%r)" % (self.terms,)


class LiePoly:
    """AST plus declared arity.  Immutable; evaluation is pure."""

    def __init__(self, node, nvars=None):
        self.node = node
        self.nvars = nvars if nvars is not None else max_var(node)

    @property
    def arity(self):
        return self.nvars

    def pretty(self):
        return _print_node(self.node)

    def evaluate(self, assignment):
        return evaluate(self, assignment)

    def normal_form(self):
        return normal_form(self)

    def __eq__(self, o):
        return isinstance(o, LiePoly) and o.node == self.node and o.nvars == self.nvars

    def __repr__(self):
        return "LiePoly(%s)" % self.pretty()


def max_var(node) -> int:
    if isinstance(node, Var):
        return node.index
    if isinstance(node, Br):
        return max(max_var(node.left), max_var(node.right))
    if isinstance(node, Sum):
        return max((max_var(n) for _, n in node.terms), default=0)
    raise TypeError(node)


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([XYZT])(\d*)|(.))")
_ALIASES = {"X": 1, "Y": 2, "Z": 3, "T": 4}


def _tokenize(text):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == m.start():
            break
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("int", int(m.group(1)), start))
        elif m.group(2):
            letter, digits = m.group(2), m.group(3)
            if digits:
                if letter != "X":
                    raise ParseError("alias variables Y,Z,T take no index", start)
                idx = int(digits)
                if idx == 0:
                    raise ParseError("variable index 0 is invalid", start)
            else:
                idx = _ALIASES[letter]
            toks.append(("var", idx, start))
        else:
            ch = m.group(4)
            if ch not in "[],()+-*/":
                raise ParseError("unexpected character %r" % ch, start)
            toks.append((ch, ch, start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind):
        t = self.next()
        if t[0] != kind:
            raise ParseError("expected %r" % kind, t[2])
        return t

    def parse_poly(self):
        terms = []
        sign = 1
        if self.peek()[0] in "+-":
            if self.next()[0] == "-":
                sign = -1
        c, node = self.parse_term()
        terms.append((sign * c, node))
        while self.peek()[0] in "+-":
            op = self.next()[0]
            c, node = self.parse_term()
            terms.append((c if op == "+" else -c, node))
        if len(terms) == 1 and terms[0][0] == 1:
            return terms[0][1]
        return Sum(terms)

    def parse_term(self):
        coef = Fraction(1)
        if self.peek()[0] == "int":
            num = self.next()[1]
            if self.peek()[0] == "/":
                self.next()
                den = self.expect("int")[1]
                if den == 0:
                    raise ParseError("zero denominator", self.toks[self.i - 1][2])
                coef = Fraction(num, den)
            else:
                coef = Fraction(num)
            self.expect("*")
        return coef, self.parse_atom()

    def parse_atom(self):
        t = self.next()
        if t[0] == "var":
            return Var(t[1])
        if t[0] == "[":
            left = self.parse_poly()
            self.expect(",")
            right = self.parse_poly()
            self.expect("]")
            return Br(left, right)
        if t[0] == "(":
            inner = self.parse_poly()
            self.expect(")")
            return inner
        raise ParseError("expected a variable, '[' or '('", t[2])


def parse(text: str, nvars=None) -> LiePoly:
    p = _Parser(text)
    node = p.parse_poly()
    t = p.peek()
    if t[0] != "end":
        raise ParseError("trailing input", t[2])
    return LiePoly(node, nvars)


def _print_node(node) -> str:
    if isinstance(node, Var):
        return "X%d" % node.index
    if isinstance(node, Br):
        return "[%s,%s]" % (_print_node(node.left), _print_node(node.right))
    if isinstance(node, Sum):
        parts = []
        for i, (c, n) in enumerate(node.terms):
            body = _print_node(n)
            mag = abs(c)
            piece = body if mag == 1 else "%s*%s" % (_frac_str(mag), body)
            if i == 0:
                parts.append(piece if c >= 0 else "-" + piece)
            else:
                parts.append(("+ " if c >= 0 else "- ") + piece)
        return " ".join(parts) if parts else "0*X1"
    raise TypeError(node)


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else "%d/%d" % (q.numerator, q.denominator)


# -- evaluation ---------------------------------------------------------------


def evaluate(P: LiePoly, assignment):
    """Evaluate in any algebra whose elements provide __add__, .bracket, and
    .scale_rational(Fraction)."""
    xs = list(assignment)
    if len(xs) != P.nvars:
        raise ValueError("expected %d arguments, got %d" % (P.nvars, len(xs)))

    def ev(node):
        if isinstance(node, Var):
            return xs[node.index - 1]
        if isinstance(node, Br):
            return ev(node.left).bracket(ev(node.right))
        if isinstance(node, Sum):
            acc = xs[0].scale_rational(Fraction(0))
            for c, n in node.terms:
                acc = acc + ev(n).scale_rational(c)
            return acc
        raise TypeError(node)

    return ev(P.node)


# -- Lyndon normal form -------------------------------------------------------


def _tensor_expand(node):
    """Expansion in the tensor algebra: word tuple -> Fraction."""
    if isinstance(node, Var):
        return {(node.index,): Fraction(1)}
    if isinstance(node, Br):
        L = _tensor_expand(node.left)
        R = _tensor_expand(node.right)
        out = {}
        for wa, ca in L.items():
            for wb, cb in R.items():
                c = ca * cb
                for w, s in ((wa + wb, c), (wb + wa, -c)):
                    v = out.get(w, Fraction(0)) + s
                    if v:
                        out[w] = v
                    elif w in out:
                        del out[w]
        return out
    if isinstance(node, Sum):
        out = {}
        for c, n in node.terms:
            for w, cw in _tensor_expand(n).items():
                v = out.get(w, Fraction(0)) + c * cw
                if v:
                    out[w] = v
                elif w in out:
                    del out[w]
        return out
    raise TypeError(node)


def is_lyndon(w) -> bool:
    return all(w < w[i:] for i in range(1, len(w)))


def standard_factorization(w):
    """Chen-Fox-Lyndon: w = uv with v the lex-least proper suffix."""
    v = min(w[i:] for i in range(1, len(w)))
    return w[: len(w) - len(v)], v


def lyndon_bracketing(w):
    """The bracketed monomial sigma(w) of a Lyndon word, as an AST node."""
    if len(w) == 1:
        return Var(w[0])
    u, v = standard_factorization(w)
    return Br(lyndon_bracketing(u), lyndon_bracketing(v))


class LyndonForm:
    """Unique expansion over the Lyndon-word basis; empty map iff zero."""

    def __init__(self, coeffs):
        self.coeffs = {w: c for w, c in coeffs.items() if c}

    def is_zero(self) -> bool:
        return not self.coeffs

    def min_degree(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no minimal degree")
        return min(len(w) for w in self.coeffs)

    def linear_coefficients(self, nvars) -> tuple:
        return tuple(self.coeffs.get((i,), Fraction(0)) for i in range(1, nvars + 1))

    def to_lie_poly(self, nvars=None) -> LiePoly:
        if not self.coeffs:
            return LiePoly(Sum(()), nvars or 1)
        terms = tuple((c, lyndon_bracketing(w)) for w, c in sorted(self.coeffs.items()))
        return LiePoly(Sum(terms), nvars)

    def __eq__(self, o):
        return isinstance(o, LyndonForm) and o.coeffs == self.coeffs

    def __repr__(self):
        return "LyndonForm(%r)" % (self.coeffs,)


def normal_form(P: LiePoly) -> LyndonForm:
    tensor = _tensor_expand(P.node)
    by_len = {}
    for w, c in tensor.items():
        by_len.setdefault(len(w), {})[w] = c
    out = {}
    sigma_cache = {}
    for n, comp in sorted(by_len.items()):
        while comp:
            w = min(comp)
            assert is_lyndon(w), "least word of a Lie element must be Lyndon"
            c = comp.pop(w)
            out[w] = out.get(w, Fraction(0)) + c
            if w not in sigma_cache:
                sigma_cache[w] = _tensor_expand(lyndon_bracketing(w))
            for ww, cw in sigma_cache[w].items():
                if ww == w:
                    continue
                v = comp.get(ww, Fraction(0)) - c * cw
                if v:
                    comp[ww] = v
                elif ww in comp:
                    del comp[ww]
    return LyndonForm(out)


def linear_part(P: LiePoly) -> tuple:
    """Coefficients (a_1..a_d) of the degree-1 monomials in normal form."""
    return normal_form(P).linear_coefficients(P.nvars)


def min_monomial_degree(P: LiePoly) -> int:
    nf = normal_form(P)
    if nf.is_zero():
        raise ValueError("zero polynomial has no minimal monomial degree")
    return nf.min_degree()


def max_monomial_degree(P: LiePoly) -> int:
    nf = normal_form(P)
    if nf.is_zero():
        raise ValueError("zero polynomial has no maximal monomial degree")
    return max(len(w) for w in nf.coeffs)


# -- Engel polynomials --------------------------------------------------------


class EngelSpec:
    """Coefficients a_1..a_m of sum a_i E_i(X, Y), with the induced univariate
    f(t) = sum (-1)^i a_i t^i whose roots steer the constructive solver."""

    def __init__(self, coeffs):
        cs = tuple(Fraction(c) for c in coeffs)
        if not cs or not cs[-1]:
            raise ValueError("Engel coefficients must be nonempty with a_m != 0")
        self.coeffs = cs
        self.m = len(cs)
        self.degree = self.m + 1

    def f_coefficients(self):
        """Coefficients of f, low degree first (constant term is 0)."""
        return tuple([Fraction(0)] + [(-1) ** i * a for i, a in
                                      enumerate(self.coeffs, start=1)])

    def f_value(self, t, field):
        acc = field.zero()
        power = field.one()
        for c in self.f_coefficients():
            if c:
                acc = acc + field.from_rational(c) * power
            power = power * t
        return acc

    def roots_in(self, field):
        """All roots of f in the field: exhaustive over F_p, rational-root
        enumeration over Q.  Always contains 0."""
        if field.characteristic:
            return [x for x in field.elements() if not self.f_value(x, field)]
        fc = self.f_coefficients()
        # f = t * g; rational roots of g have p | const(g), q | lead(g)
        from math import lcm
        den = lcm(*(c.denominator for c in fc))
        g = [int(c * den) for c in fc[1:]]
        while g and g[0] == 0:
            g = g[1:]
        roots = {Fraction(0)}
        if g:
            c0, lead = abs(g[0]), abs(g[-1])
            for p in _divisors(c0):
                for q in _divisors(lead):
                    for cand in (Fraction(p, q), Fraction(-p, q)):
                        if not sum(c * cand ** i for i, c in enumerate(g)):
                            roots.add(cand)
        return sorted(roots)

    def is_plain_engel(self) -> bool:
        return all(c == 0 for c in self.coeffs[:-1]) and self.coeffs[-1] == 1

    def __repr__(self):
        return "EngelSpec(%s)" % (tuple(map(_frac_str, self.coeffs)),)


def _divisors(n):
    out = [d for d in range(1, abs(n) + 1) if n % d == 0]
    return out or [1]


def engel_monomial(m: int) -> LiePoly:
    """E_m(X, Y) = [[..[X,Y],Y]..,Y] with m brackets."""
    node = Br(Var(1), Var(2))
    for _ in range(m - 1):
        node = Br(node, Var(2))
    return LiePoly(node, 2)


def make_engel(coeffs) -> tuple:
    """(P, spec) with P = sum a_i E_i(X, Y)."""
    spec = EngelSpec(coeffs)
    terms = tuple((a, engel_monomial(i).node)
                  for i, a in enumerate(spec.coeffs, start=1) if a)
    node = terms[0][1] if len(terms) == 1 and terms[0][0] == 1 else Sum(terms)
    return LiePoly(node, 2), spec
