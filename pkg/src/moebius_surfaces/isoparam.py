"""Exact trigonometric-polynomial algebra for isoparametric identities.

Everything symbolic lives in Q[K][c, s] / (c^2 + s^2 - 1) with c = cos(psi),
s = sin(psi).  Elements are kept in the canonical form A(c) + B(c)*s, so two
elements are equal iff their (A, B) coincide.  Tangents and cotangents enter
only through TrigRational quotients; the obstruction polynomial is obtained by
clearing the (pure cosine) denominator.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

Number = Union[int, Fraction]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"exact arithmetic needs int or Fraction, got {type(x).__name__}")


# -- univariate polynomials in K ---------------------------------------------

class RatPoly:
    """Polynomial in K with Fraction coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [_frac(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def const(cls, x) -> "RatPoly":
        return cls([x])

    @classmethod
    def K(cls) -> "RatPoly":
        return cls([0, 1])

    @classmethod
    def coerce(cls, x) -> "RatPoly":
        return x if isinstance(x, RatPoly) else cls.const(x)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # zero polynomial: -1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_const(self) -> bool:
        return self.degree <= 0

    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __eq__(self, other):
        try:
            return self.coeffs == RatPoly.coerce(other).coeffs
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        o = RatPoly.coerce(other).coeffs
        n = max(len(self.coeffs), len(o))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = o + (Fraction(0),) * (n - len(o))
        return RatPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return RatPoly(-x for x in self.coeffs)

    def __sub__(self, other):
        return self + (-RatPoly.coerce(other))

    def __rsub__(self, other):
        return RatPoly.coerce(other) - self

    def __mul__(self, other):
        o = RatPoly.coerce(other).coeffs
        if not self.coeffs or not o:
            return RatPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(o) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(o):
                    out[i + j] += x * y
        return RatPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = RatPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def divmod(self, d: "RatPoly") -> tuple["RatPoly", "RatPoly"]:
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        q = [Fraction(0)] * max(len(r) - d.degree, 1)
        while len(r) - 1 >= d.degree and any(r):
            k = len(r) - 1 - d.degree
            f = r[-1] / d.lead()
            q[k] = f
            for i, y in enumerate(d.coeffs):
                r[i + k] -= f * y
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        return RatPoly(q), RatPoly(r)

    def __call__(self, k):
        out = 0
        for x in reversed(self.coeffs):
            out = out * k + (x if isinstance(k, Fraction) or isinstance(k, int) else float(x))
        return out

    def content(self) -> Fraction:
        """Positive rational c with self/c primitive integral (0 for the zero poly)."""
        if not self.coeffs:
            return Fraction(0)
        den = math.lcm(*(x.denominator for x in self.coeffs))
        num = math.gcd(*(int(x * den) for x in self.coeffs))
        return Fraction(num, den)

    def monic(self) -> "RatPoly":
        return self * (1 / self.lead()) if self.coeffs else self

    def roots(self) -> list["AlgebraicRoot"]:
        """Exact real roots (degree <= 4): rational roots, then a quadratic remainder."""
        if self.is_zero():
            raise ValueError("the zero polynomial vanishes identically")
        p = self
        found: list[AlgebraicRoot] = []
        for r in _rational_roots(p):
            while True:
                q, rem = p.divmod(RatPoly([-r, 1]))
                if not rem.is_zero():
                    break
                found.append(AlgebraicRoot(r))
                p = q
        if p.degree == 2:
            c, b, a = p.coeffs
            disc = b * b - 4 * a * c
            if disc > 0:  # rational discriminant squares were caught above
                found += [AlgebraicRoot(-b / (2 * a), 1 / (2 * a), disc),
                          AlgebraicRoot(-b / (2 * a), -1 / (2 * a), disc)]
            elif disc == 0:
                found.append(AlgebraicRoot(-b / (2 * a)))
        elif p.degree > 2:
            raise NotImplementedError("irreducible factors above degree 2 are not supported")
        uniq = []
        for r in found:
            if r not in uniq:
                uniq.append(r)
        return sorted(uniq, key=float)

    def __repr__(self):
        return f"RatPoly({self})"

    def __str__(self):
        return _poly_str(self.coeffs, "K")

    def factored(self) -> str:
        """Human form lead*(aK-b)... when all roots are rational, else expanded."""
        if self.degree <= 0:
            return _num_str(self.lead()) if self.coeffs else "0"
        factors, p = [], self
        for r in _rational_roots(self):
            while True:
                q, rem = p.divmod(RatPoly([-r, 1]))
                if not rem.is_zero():
                    break
                factors.append(r)
                p = q
        if p.degree > 0:
            return str(self)
        scale = p.lead()
        parts = []
        for r in dict.fromkeys(factors):
            m = factors.count(r)
            scale *= Fraction(1, r.denominator ** m)
            n, d = r.numerator, r.denominator
            base = f"({'' if d == 1 else d}K{'-' if n >= 0 else '+'}{abs(n)})" if n else "K"
            parts.append(base + (f"^{m}" if m > 1 else ""))
        head = "" if scale == 1 else "-" if scale == -1 else _num_str(scale)
        return head + "".join(parts)


def _num_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _poly_str(coeffs, sym) -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        x = coeffs[i]
        if x == 0:
            continue
        mono = "" if i == 0 else sym if i == 1 else f"{sym}^{i}"
        mag = abs(x)
        body = _num_str(mag) if (mag != 1 or not mono) else ""
        if body and mono:
            body += "*"
        terms.append(("-" if x < 0 else "+", body + mono))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, t in terms[1:]:
        out += f" {sign} {t}"
    return out


def _divisors(n: int) -> list[int]:
    n = abs(n)
    return [d for d in range(1, n + 1) if n % d == 0] if n else [1]


def _rational_roots(p: RatPoly) -> list[Fraction]:
    """Distinct rational roots via the rational root theorem."""
    if p.degree <= 0:
        return []
    ints = [int(x / p.content()) for x in p.coeffs]
    shift = next(i for i, x in enumerate(ints) if x)
    out = [Fraction(0)] if shift else []
    ints = ints[shift:]
    if len(ints) == 1:
        return out
    cands = {Fraction(sg * a, b) for a in _divisors(ints[0]) for b in _divisors(ints[-1])
             for sg in (1, -1)}
    q = RatPoly(ints)
    return sorted(out + [r for r in cands if q(r) == 0])


@dataclass(frozen=True)
class AlgebraicRoot:
    """Real root a + b*sqrt(d); b = 0 for rational roots."""

    a: Fraction
    b: Fraction = Fraction(0)
    d: Fraction = Fraction(0)

    @property
    def rational(self) -> bool:
        return self.b == 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __str__(self):
        if self.rational:
            return _num_str(self.a)
        # b*sqrt(p/q) = (b/q)*sqrt(p*q), then pull square factors out of p*q
        n = self.d.numerator * self.d.denominator
        b = abs(self.b) / self.d.denominator
        f = 2
        while f * f <= n:
            while n % (f * f) == 0:
                n //= f * f
                b *= f
            f += 1
        sign = "+" if self.b > 0 else "-"
        coef = "" if b == 1 else _num_str(b) + "*"
        head = f"{_num_str(self.a)} {sign} " if self.a else ("-" if sign == "-" else "")
        return f"{head}{coef}sqrt({n})"


def poly_gcd(a: RatPoly, b: RatPoly) -> RatPoly:
    """Monic gcd over Q (zero if both are zero)."""
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic()


# -- trigonometric polynomials -------------------------------------------------

def _cpoly_trim(d: dict) -> dict:
    return {j: p for j, p in d.items() if not p.is_zero()}


def _cpoly_add(x: dict, y: dict, sign=1) -> dict:
    out = dict(x)
    for j, p in y.items():
        out[j] = out.get(j, RatPoly()) + (p if sign > 0 else -p)
    return _cpoly_trim(out)


def _cpoly_mul(x: dict, y: dict) -> dict:
    out: dict = {}
    for i, p in x.items():
        for j, q in y.items():
            out[i + j] = out.get(i + j, RatPoly()) + p * q
    return _cpoly_trim(out)


_ONE_MINUS_C2 = {0: RatPoly.const(1), 2: RatPoly.const(-1)}


class TrigPoly:
    """A(c) + B(c)*s with A, B polynomials in c = cos(psi) over Q[K]."""

    __slots__ = ("A", "B")

    def __init__(self, A: Optional[dict] = None, B: Optional[dict] = None):
        self.A = _cpoly_trim({int(j): RatPoly.coerce(p) for j, p in (A or {}).items()})
        self.B = _cpoly_trim({int(j): RatPoly.coerce(p) for j, p in (B or {}).items()})

    @classmethod
    def const(cls, x) -> "TrigPoly":
        return cls({0: RatPoly.coerce(x)})

    @classmethod
    def cos(cls) -> "TrigPoly":
        return cls({1: 1})

    @classmethod
    def sin(cls) -> "TrigPoly":
        return cls(B={0: 1})

    @classmethod
    def coerce(cls, x) -> "TrigPoly":
        return x if isinstance(x, TrigPoly) else cls.const(x)

    @classmethod
    def from_terms(cls, terms: dict) -> "TrigPoly":
        """Build from {(j, k): coeff} meaning coeff*c^j*s^k, reducing s^2 = 1 - c^2."""
        out = cls()
        c, s = cls.cos(), cls.sin()
        for (j, k), p in terms.items():
            out = out + TrigPoly.const(p) * (c ** j) * (s ** k)
        return out

    def is_zero(self) -> bool:
        return not self.A and not self.B

    def __eq__(self, other):
        if isinstance(other, TrigRational):
            return other == self
        try:
            o = TrigPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self.A == o.A and self.B == o.B

    def __hash__(self):
        return hash((tuple(sorted(self.A.items())), tuple(sorted(self.B.items()))))

    def __add__(self, other):
        if isinstance(other, TrigRational):
            return NotImplemented
        o = TrigPoly.coerce(other)
        return TrigPoly(_cpoly_add(self.A, o.A), _cpoly_add(self.B, o.B))

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly({j: -p for j, p in self.A.items()}, {j: -p for j, p in self.B.items()})

    def __sub__(self, other):
        if isinstance(other, TrigRational):
            return NotImplemented
        return self + (-TrigPoly.coerce(other))

    def __rsub__(self, other):
        return TrigPoly.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, TrigRational):
            return NotImplemented
        o = TrigPoly.coerce(other)
        # (A1 + B1 s)(A2 + B2 s) = A1 A2 + B1 B2 (1 - c^2) + (A1 B2 + B1 A2) s
        A = _cpoly_add(_cpoly_mul(self.A, o.A), _cpoly_mul(_cpoly_mul(self.B, o.B), _ONE_MINUS_C2))
        B = _cpoly_add(_cpoly_mul(self.A, o.B), _cpoly_mul(self.B, o.A))
        return TrigPoly(A, B)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return TrigRational(self, other)

    def __rtruediv__(self, other):
        return TrigRational(other, self)

    def __pow__(self, k: int):
        out = TrigPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def diff(self) -> "TrigPoly":
        """d/dpsi with c' = -s, s' = c."""
        # d(c^j) = -j c^(j-1) s;  d(c^j s) = -j c^(j-1) (1 - c^2) + c^(j+1)
        A: dict = {}
        B = {j - 1: -j * p for j, p in self.A.items() if j}
        for j, p in self.B.items():
            if j:
                A = _cpoly_add(A, _cpoly_mul({j - 1: -j * p}, _ONE_MINUS_C2))
            A = _cpoly_add(A, {j + 1: p})
        return TrigPoly(A, B)

    def subs_K(self, k) -> "TrigPoly":
        k = _frac(k)
        return TrigPoly({j: p(k) for j, p in self.A.items()}, {j: p(k) for j, p in self.B.items()})

    def cos_valuation(self) -> int:
        """Largest m with c^m dividing self (inf-like large number for zero)."""
        if self.is_zero():
            return 10 ** 9
        return min(list(self.A) + list(self.B))

    def shift_cos(self, m: int) -> "TrigPoly":
        """Multiply by c^m (m may be negative when divisible)."""
        if m < 0 and self.cos_valuation() < -m:
            raise ValueError("not divisible by the requested power of cos")
        return TrigPoly({j + m: p for j, p in self.A.items()}, {j + m: p for j, p in self.B.items()})

    def evaluate(self, k, psi):
        c, s = np.cos(psi), np.sin(psi)
        kf = float(k) if not isinstance(k, np.ndarray) else k
        a = sum(p(kf) * c ** j for j, p in self.A.items()) if self.A else 0.0 * c
        b = sum(p(kf) * c ** j for j, p in self.B.items()) if self.B else 0.0 * c
        return a + b * s

    def __repr__(self):
        return f"TrigPoly({self})"

    def __str__(self):
        terms = []
        for tag, part in (("", self.A), ("*sin", self.B)):
            for j in sorted(part, reverse=True):
                mono = "" if j == 0 else "cos" if j == 1 else f"cos^{j}"
                mono = (mono + tag) if mono else tag.lstrip("*")
                coef = part[j]
                cs = str(coef)
                if len([x for x in coef.coeffs if x]) > 1:
                    cs = f"({cs})"
                if mono:
                    cs = "" if coef == 1 else "-" if coef == -1 else cs + "*"
                terms.append(cs + mono)
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


class TrigRational:
    """Quotient num/den of TrigPolys; equality by cross-multiplication."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        self.num = TrigPoly.coerce(num)
        self.den = TrigPoly.coerce(den)
        if self.den.is_zero():
            raise ZeroDivisionError("TrigRational denominator is identically zero")

    @classmethod
    def coerce(cls, x) -> "TrigRational":
        return x if isinstance(x, TrigRational) else cls(x)

    @classmethod
    def tan(cls) -> "TrigRational":
        return cls(TrigPoly.sin(), TrigPoly.cos())

    @classmethod
    def cot(cls) -> "TrigRational":
        return cls(TrigPoly.cos(), TrigPoly.sin())

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other):
        try:
            o = TrigRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.num * o.den == o.num * self.den

    __hash__ = None

    def __add__(self, other):
        o = TrigRational.coerce(other)
        if self.den == o.den:
            return TrigRational(self.num + o.num, self.den)
        return TrigRational(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return TrigRational(-self.num, self.den)

    def __sub__(self, other):
        return self + (-TrigRational.coerce(other))

    def __rsub__(self, other):
        return TrigRational.coerce(other) - self

    def __mul__(self, other):
        o = TrigRational.coerce(other)
        return TrigRational(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = TrigRational.coerce(other)
        return TrigRational(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return TrigRational.coerce(other) / self

    def diff(self) -> "TrigRational":
        return TrigRational(self.num.diff() * self.den - self.num * self.den.diff(), self.den * self.den)

    def subs_K(self, k) -> "TrigRational":
        return TrigRational(self.num.subs_K(k), self.den.subs_K(k))

    def evaluate(self, k, psi):
        return self.num.evaluate(k, psi) / self.den.evaluate(k, psi)

    def __repr__(self):
        return f"TrigRational(({self.num}) / ({self.den}))"


def _diff(x):
    return x.diff() if isinstance(x, (TrigPoly, TrigRational)) else TrigPoly()


# -- the identity and the obstruction ----------------------------------------

SPACES = {"s3": 1, "s4": 2}


def build_FG(space: str) -> tuple[TrigPoly, TrigRational]:
    """F = |grad psi|^2 and G = Laplacian(psi) for constant K and P.

    The curvature offset m is 1 on S^3 and 2 on S^4:
      F = 4 (K cos^2 - (K - m)/2 sin^2),  G = 2 (K - m) tan.
    """
    key = space.lower().replace("^", "")
    if key not in SPACES:
        raise ValueError(f"unknown space {space!r} (expected s3 or s4)")
    m = SPACES[key]
    K = RatPoly.K()
    F = TrigPoly.from_terms({(2, 0): 4 * K, (0, 2): -2 * (K - m)})
    G = TrigRational(TrigPoly.from_terms({(0, 1): 2 * (K - m)}), TrigPoly.cos())
    return F, G


def eisenhart_identity(F, G, K=None) -> TrigRational:
    """2 K F + (2G - F')(G - F') + F (2G' - F'') with exact derivatives.

    K defaults to the symbol K; pass an int/Fraction to substitute.
    """
    F = TrigRational.coerce(F)
    G = TrigRational.coerce(G)
    Kt = TrigPoly.const(RatPoly.K() if K is None else RatPoly.coerce(K))
    F1 = F.diff()
    F2 = F1.diff()
    G1 = G.diff()
    return Kt * 2 * F + (G * 2 - F1) * (G - F1) + F * (G1 * 2 - F2)


@dataclass(frozen=True)
class Obstruction:
    """Reduced identity sum_i coeffs[i] * cos^(2i) = 0.

    ``raw`` is the Eisenhart expression E multiplied by the minimal power
    cos^cos_power that makes it a polynomial; ``coeffs`` is ``raw`` divided by
    its rational content (sign chosen so the first nonzero coefficient leads
    positively).
    """

    space: str
    raw: tuple
    coeffs: tuple
    cos_power: int
    den_scale: Fraction
    content: Fraction
    odd_terms: bool

    def polynomial_str(self, raw: bool = True) -> str:
        cs = self.raw if raw else self.coeffs
        parts = []
        for i, p in enumerate(cs):
            if p.is_zero():
                continue
            mono = "" if i == 0 else "cos^2(psi)" if i == 1 else f"cos^{2 * i}(psi)"
            parts.append(p.factored() + (f"*{mono}" if mono else ""))
        out = " + ".join(parts) if parts else "0"
        return out.replace("+ -", "- ")

    def evaluate(self, k, psi, raw: bool = True):
        cs = self.raw if raw else self.coeffs
        c2 = np.cos(psi) ** 2
        return sum(p(float(k)) * c2 ** i for i, p in enumerate(cs))

    def to_dict(self) -> dict:
        ser = lambda p: [str(x) for x in p.coeffs]  # noqa: E731
        return {"space": self.space, "cos_power": self.cos_power,
                "den_scale": str(self.den_scale), "content": str(self.content),
                "raw": [ser(p) for p in self.raw], "normalized": [ser(p) for p in self.coeffs]}


def reduce_obstruction(space: str, F=None, G=None, extra_cos_power: int = 0) -> Obstruction:
    """Clear cos denominators of the Eisenhart expression and read off cos^2 coefficients.

    ``extra_cos_power`` multiplies the expression by an additional cos power
    before reduction; the normalized output must not depend on it.
    """
    if F is None or G is None:
        F, G = build_FG(space)
    E = eisenhart_identity(F, G)
    num, den = E.num.shift_cos(extra_cos_power), E.den
    # the denominator must be (rational constant) * cos^k
    if den.B or len(den.A) != 1:
        raise ValueError("denominator is not a pure cosine power")
    (k, scale), = den.A.items()
    if not scale.is_const():
        raise ValueError("denominator depends on K")
    den_scale = scale.lead()
    # E * cos^(extra + k) = num / den_scale; strip every cos power num carries
    v = 0 if num.is_zero() else num.cos_valuation()
    num = num.shift_cos(-v)
    cleared = TrigPoly({j: p * (1 / den_scale) for j, p in num.A.items()},
                       {j: p * (1 / den_scale) for j, p in num.B.items()})
    cos_power = extra_cos_power + k - v
    odd = bool(cleared.B) or any(j % 2 for j in cleared.A)
    top = max(cleared.A, default=0)
    raw = tuple(cleared.A.get(2 * i, RatPoly()) for i in range(top // 2 + 1))
    contents = [p.content() for p in raw if not p.is_zero()]
    if contents:
        den_l = math.lcm(*(c.denominator for c in contents))
        content = Fraction(math.gcd(*(int(c * den_l) for c in contents)), den_l)
        lead = next(p.lead() for p in raw if not p.is_zero())
        if lead < 0:
            content = -content
    else:
        content = Fraction(1)
    coeffs = tuple(p * (1 / content) for p in raw)
    return Obstruction(space=space, raw=raw, coeffs=coeffs, cos_power=cos_power,
                       den_scale=den_scale, content=content, odd_terms=odd)


@dataclass(frozen=True)
class ObstructionVerdict:
    root_sets: tuple
    identically_zero: tuple
    intersection: tuple
    gcd: RatPoly
    holds: bool

    @property
    def message(self) -> str:
        if self.holds:
            return "no admissible constant K"
        common = ", ".join(str(r) for r in self.intersection) or "every K"
        return f"admissible K exist: {common}"

    def to_dict(self) -> dict:
        return {"root_sets": [[str(r) for r in rs] for rs in self.root_sets],
                "identically_zero": list(self.identically_zero),
                "intersection": [str(r) for r in self.intersection],
                "verdict": self.message, "holds": self.holds}


def obstruction_verdict(coeffs: Sequence[RatPoly]) -> ObstructionVerdict:
    """Common real roots of all coefficient polynomials, decided exactly via their gcd."""
    coeffs = [RatPoly.coerce(p) for p in coeffs]
    zero = tuple(p.is_zero() for p in coeffs)
    root_sets = tuple(() if z else tuple(p.roots()) for p, z in zip(coeffs, zero))
    live = [p for p in coeffs if not p.is_zero()]
    if not live:
        return ObstructionVerdict(root_sets, zero, (), RatPoly(), False)
    g = live[0].monic()
    for p in live[1:]:
        g = poly_gcd(g, p)
    inter = tuple(g.roots()) if g.degree > 0 else ()
    return ObstructionVerdict(root_sets, zero, inter, g, holds=not inter)


# -- numeric checker ---------------------------------------------------------

def _central(f, x, h, order):
    if order == 1:
        return (f(x + h) - f(x - h)) / (2 * h)
    return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h)


def identity_numeric_check(F, G, K: float, samples: Iterable[float], dF=None, d2F=None,
                           dG=None, step: float = 1e-5) -> float:
    """Max |2KF + (2G - F')(G - F') + F(2G' - F'')| over samples with F > 0.

    F, G are callables (or TrigPoly/TrigRational, differentiated exactly).
    Missing derivatives are taken by central differences with ``step``.
    """
    def as_fn(x):
        if isinstance(x, (TrigPoly, TrigRational)):
            return lambda t, x=x: float(x.evaluate(K, t))
        if callable(x):
            return x
        return lambda t, x=x: float(x)

    if isinstance(F, (TrigPoly, TrigRational)):
        dF = dF or as_fn(_diff(F))
        d2F = d2F or as_fn(_diff(_diff(F)))
    if isinstance(G, (TrigPoly, TrigRational)):
        dG = dG or as_fn(_diff(G))
    f, g = as_fn(F), as_fn(G)
    f1 = dF or (lambda t: _central(f, t, step, 1))
    f2 = d2F or (lambda t: _central(f, t, step, 2))
    g1 = dG or (lambda t: _central(g, t, step, 1))
    worst, used = 0.0, 0
    for t in samples:
        Ft = f(t)
        if not Ft > 0:
            warnings.warn(f"F(psi={t}) = {Ft} <= 0: sample skipped (grad psi vanishes)")
            continue
        Gt, F1, F2, G1 = g(t), f1(t), f2(t), g1(t)
        r = 2 * K * Ft + (2 * Gt - F1) * (Gt - F1) + Ft * (2 * G1 - F2)
        worst = max(worst, abs(r))
        used += 1
    if not used:
        raise ValueError("no admissible samples (F <= 0 everywhere)")
    return worst
