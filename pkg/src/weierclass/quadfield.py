"""Exact arithmetic in Q and imaginary quadratic fields Q(sqrt(d)), d < 0.

Field elements are pairs a + b*w over Fraction coordinates, where w is the
standard integral generator ((1+sqrt(d))/2 when d = 1 mod 4, sqrt(d)
otherwise).  Fractional ideals are kept in a canonical Hermite normal form,
so equal ideals compare equal structurally.  The ideal class group is
realised through reduced binary quadratic forms of the fundamental
discriminant, with the group law given by composition of forms.

No floating point is used anywhere.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from sympy import factorint, isprime
from sympy.ntheory import sqrt_mod


class UnsupportedField(ValueError):
    pass


class ZeroIdeal(ValueError):
    pass


class DuplicatePrime(ValueError):
    pass


def vp_int(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_fraction(x: Fraction, p: int) -> int:
    if x == 0:
        raise ValueError("valuation of zero")
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _rat_from_json(s) -> Fraction:
    if isinstance(s, str):
        return Fraction(s)
    if isinstance(s, int):
        return Fraction(s)
    raise ValueError(f"bad rational literal {s!r}")


def _rat_to_json(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class FieldSpec:
    """Q, or an imaginary quadratic field Q(sqrt(d)) with d < 0 squarefree."""

    __slots__ = ("d",)

    def __init__(self, d: int | None = None):
        if d is not None:
            if d >= 0:
                raise UnsupportedField(f"d = {d} is not negative")
            if any(e > 1 for e in factorint(-d).values()):
                raise UnsupportedField(f"d = {d} is not squarefree")
        object.__setattr__(self, "d", d)

    def __setattr__(self, *a):
        raise AttributeError("FieldSpec is immutable")

    @property
    def is_rational(self) -> bool:
        return self.d is None

    @property
    def discriminant(self) -> int:
        """Fundamental discriminant (1 for Q)."""
        if self.d is None:
            return 1
        return self.d if self.d % 4 == 1 else 4 * self.d

    # w^2 = w_norm' ... we store w^2 = m0 + m1*w
    @property
    def w_sq_const(self) -> int:
        d = self.d
        return (d - 1) // 4 if d % 4 == 1 else d

    @property
    def w_trace(self) -> int:
        return 1 if self.d % 4 == 1 else 0

    @property
    def w_norm(self) -> int:
        # N(w) = -m0 for trace m1: N = w * conj(w)
        d = self.d
        return (1 - d) // 4 if d % 4 == 1 else -d

    def elem(self, a, b=0) -> "KElement":
        if isinstance(a, KElement):
            if a.field != self:
                raise ValueError("element of a different field")
            return a
        if self.is_rational and b != 0:
            raise ValueError("Q has no w component")
        return KElement(self, Fraction(a), Fraction(b))

    @property
    def zero(self) -> "KElement":
        return self.elem(0)

    @property
    def one(self) -> "KElement":
        return self.elem(1)

    def roots_of_unity(self) -> tuple["KElement", ...]:
        one = self.one
        if self.d == -1:
            i = self.elem(0, 1)
            return (one, -one, i, -i)
        if self.d == -3:
            w = self.elem(0, 1)  # primitive 6th root: w^2 = w - 1
            return (one, -one, w, -w, w - one, one - w)
        return (one, -one)

    def minimal_poly_of_w(self) -> tuple[int, int]:
        """(t, n) with w^2 - t*w + n = 0."""
        return self.w_trace, self.w_norm

    def to_json(self):
        if self.is_rational:
            return {"type": "Q"}
        return {"type": "imquad", "d": self.d}

    @staticmethod
    def from_json(obj) -> "FieldSpec":
        if isinstance(obj, str):
            if obj == "Q":
                return FieldSpec()
            return FieldSpec(int(obj))
        if obj.get("type") == "Q":
            return FieldSpec()
        if obj.get("type") == "imquad":
            return FieldSpec(int(obj["d"]))
        raise ValueError(f"bad field spec {obj!r}")

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self.d == other.d

    def __hash__(self):
        return hash(("FieldSpec", self.d))

    def __repr__(self):
        return "Q" if self.is_rational else f"Q(sqrt({self.d}))"


QQ = FieldSpec()


class KElement:
    """a + b*w with exact rational coordinates."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field: FieldSpec, a: Fraction, b: Fraction):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, *a):
        raise AttributeError("KElement is immutable")

    def _coerce(self, other):
        if isinstance(other, KElement):
            if other.field != self.field:
                raise ValueError("mixed fields")
            return other
        if isinstance(other, (int, Fraction)):
            return KElement(self.field, Fraction(other), Fraction(0))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return KElement(self.field, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return KElement(self.field, -self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return KElement(self.field, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.b == 0 and o.b == 0:
            return KElement(self.field, self.a * o.a, Fraction(0))
        K = self.field
        m0, m1 = K.w_sq_const, K.w_trace
        bb = self.b * o.b
        return KElement(
            K,
            self.a * o.a + bb * m0,
            self.a * o.b + self.b * o.a + bb * m1,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "KElement":
        if self.field.is_rational:
            return self
        t = self.field.w_trace
        return KElement(self.field, self.a + self.b * t, -self.b)

    def norm(self) -> Fraction:
        """N(x) = x * conj(x), a rational number."""
        if self.field.is_rational:
            return self.a * self.a
        K = self.field
        return self.a * self.a + self.a * self.b * K.w_trace - self.b * self.b * K.w_sq_const

    def trace(self) -> Fraction:
        if self.field.is_rational:
            return 2 * self.a
        return 2 * self.a + self.b * self.field.w_trace

    def inverse(self) -> "KElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        n = self.norm()
        c = self.conjugate()
        return KElement(self.field, c.a / n, c.b / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = KElement(self.field, Fraction(1), Fraction(0))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_one(self) -> bool:
        return self.a == 1 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    def as_fraction(self) -> Fraction:
        if self.b != 0:
            raise ValueError("not a rational element")
        return self.a

    def denominator(self) -> int:
        return math.lcm(self.a.denominator, self.b.denominator)

    def integer_coords(self) -> tuple[int, int, int]:
        """(u, v, m) with self = (u + v*w)/m in lowest common terms."""
        m = self.denominator()
        return int(self.a * m), int(self.b * m), m

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.field, self.a, self.b))

    def to_json(self):
        if self.field.is_rational:
            return _rat_to_json(self.a)
        return [_rat_to_json(self.a), _rat_to_json(self.b)]

    @staticmethod
    def from_json(field: FieldSpec, obj) -> "KElement":
        if isinstance(obj, (str, int)):
            return field.elem(_rat_from_json(obj))
        if isinstance(obj, (list, tuple)) and len(obj) == 2:
            return field.elem(_rat_from_json(obj[0]), _rat_from_json(obj[1]))
        raise ValueError(f"bad element literal {obj!r}")

    def __repr__(self):
        if self.field.is_rational or self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}*w"
        return f"{self.a}{'+' if self.b > 0 else ''}{self.b}*w"


class PrimeIdeal:
    """A maximal ideal of the ring of integers (or a rational prime for Q)."""

    __slots__ = ("field", "p", "kind", "r", "_unif")

    def __init__(self, field: FieldSpec, p: int, kind: str, r: int | None = None):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "_unif", None)

    def __setattr__(self, *a):
        raise AttributeError("PrimeIdeal is immutable")

    @property
    def e(self) -> int:
        return 2 if self.kind == "ramified" else 1

    @property
    def f(self) -> int:
        return 2 if self.kind == "inert" else 1

    @property
    def norm(self) -> int:
        return self.p ** self.f

    @property
    def residue_char(self) -> int:
        return self.p

    def __eq__(self, other):
        return (
            isinstance(other, PrimeIdeal)
            and self.field == other.field
            and self.p == other.p
            and self.kind == other.kind
            and (self.r is None or other.r is None or self.r % self.p == other.r % self.p)
        )

    def __hash__(self):
        return hash((self.field, self.p, self.kind, None if self.r is None else self.r % self.p))

    def sort_key(self):
        return (self.norm, self.p, -1 if self.r is None else self.r % self.p)

    def __repr__(self):
        if self.kind == "rational":
            return f"({self.p})"
        if self.kind == "inert":
            return f"({self.p}) inert"
        return f"({self.p}, w-{self.r % self.p})[{self.kind}]"

    def ideal(self) -> "FractionalIdeal":
        if self.field.is_rational:
            return FractionalIdeal.principal(self.field.elem(self.p))
        if self.kind == "inert":
            return FractionalIdeal(self.field, 1, self.p, 0, self.p)
        b = (-self.r) % self.p
        return FractionalIdeal(self.field, 1, self.p, b, 1)

    def conjugate(self) -> "PrimeIdeal":
        if self.kind != "split":
            return self
        t = self.field.w_trace
        return PrimeIdeal(self.field, self.p, "split", (t - self.r) % self.p)

    def uniformizer(self) -> KElement:
        """An element of valuation exactly 1 at this prime."""
        if self._unif is not None:
            return self._unif
        K, p = self.field, self.p
        if self.kind == "rational" or self.kind == "inert":
            u = K.elem(p)
        elif self.kind == "split":
            t, n = K.minimal_poly_of_w()
            r = self.r
            # Hensel adjust so that r^2 - t*r + n has valuation exactly 1
            if (r * r - t * r + n) % (p * p) == 0:
                r = r + p
            u = K.elem(-r, 1)  # w - r
        else:  # ramified
            d = K.d
            if p == 2:
                u = K.elem(0, 1) if d % 4 == 2 else K.elem(-1, 1)
            elif d % 4 == 1:
                # odd p | d; pick r with 2r = 1 mod p^2
                r = (xgcd(2, p * p)[1]) % (p * p)
                u = K.elem(-r, 1)
            else:
                u = K.elem(0, 1)  # w = sqrt(d), N = -d, v_p = 1
        assert self.valuation(u) == 1
        object.__setattr__(self, "_unif", u)
        return u

    def valuation(self, x) -> int:
        """v_P(x) for a nonzero element of the field."""
        if isinstance(x, (int, Fraction)):
            x = self.field.elem(x)
        if x.is_zero():
            raise ValueError("valuation of zero")
        p = self.p
        if self.field.is_rational:
            return vp_fraction(x.a, p)
        u, v, m = x.integer_coords()
        shift = -self.e * vp_int(m, p) if m % p == 0 else 0
        g = math.gcd(u, v)
        t = vp_int(g, p) if g % p == 0 else 0
        if t:
            q = p ** t
            u //= q
            v //= q
        base = t * self.e
        K = self.field
        tw, m0 = K.w_trace, K.w_sq_const
        # N(u + v*w) over the integers
        nrm = u * u + u * v * tw - v * v * m0
        if self.kind == "inert":
            extra = 0
        elif self.kind == "ramified":
            extra = 1 if nrm % p == 0 else 0
        else:  # split
            if nrm % p != 0:
                extra = 0
            elif (u + v * self.r) % p == 0:
                extra = vp_int(nrm, p)
            else:
                extra = 0
        return base + extra + shift

    def residues(self) -> tuple[KElement, ...]:
        """Canonical lifts of the residue field."""
        K, p = self.field, self.p
        if self.f == 1:
            return tuple(K.elem(i) for i in range(p))
        return tuple(K.elem(i, j) for j in range(p) for i in range(p))

    def _reduce_pair(self, u: int, v: int):
        """Image of the integral element u + v*w in the residue field.

        Returns an int mod p when f = 1, else a pair (mod p, mod p)."""
        p = self.p
        if self.field.is_rational or self.f == 1:
            if self.field.is_rational:
                return u % p
            return (u + v * self.r) % p
        return (u % p, v % p)

    def _res_mul(self, x, y):
        p = self.p
        if self.f == 1:
            return (x * y) % p
        m0, m1 = self.field.w_sq_const, self.field.w_trace
        a, b = x
        c, d = y
        bb = b * d
        return ((a * c + bb * m0) % p, (a * d + b * c + bb * m1) % p)

    def _res_inv(self, x):
        p = self.p
        if self.f == 1:
            return pow(x, -1, p)
        a, b = x
        tw, nw = self.field.w_trace, self.field.w_sq_const
        nrm = (a * a + a * b * tw - b * b * nw) % p
        ninv = pow(nrm, -1, p)
        # conj(a + b*w) = a + b*tw - b*w
        return (((a + b * tw) * ninv) % p, (-b * ninv) % p)

    def reduce(self, x) -> KElement:
        """Canonical lift of x mod P; requires v_P(x) >= 0."""
        if isinstance(x, (int, Fraction)):
            x = self.field.elem(x)
        K, p = self.field, self.p
        if x.is_zero():
            return K.zero
        if K.is_rational:
            num, den = x.a.numerator, x.a.denominator
            return K.elem((num * pow(den, -1, p)) % p)
        u, v, m = x.integer_coords()
        k = vp_int(m, p) if m % p == 0 else 0
        lam_red = 1
        if k:
            q = p ** k
            m //= q
            if self.kind == "split":
                # multiply by (w - rbar)^k to clear p^k from the coordinates
                tw = K.w_trace
                rbar = (tw - self.r) % p
                # lift rbar so that w - rbar is a true uniformizer of the conjugate
                t, n = K.minimal_poly_of_w()
                if (rbar * rbar - t * rbar + n) % (p * p) == 0:
                    rbar += p
                for _ in range(k):
                    m0, m1 = K.w_sq_const, K.w_trace
                    u, v = u * (-rbar) + v * m0, u + v * (m1 - rbar)
                lam_red = pow((self.r - rbar) % p, k, p)
            assert u % q == 0 and v % q == 0, "element not integral at prime"
            u //= q
            v //= q
        val = self._reduce_pair(u, v)
        unit = (m % p) * (lam_red if lam_red else 1) % p if self.f == 1 else None
        if self.f == 1:
            unit = (m * lam_red) % p
            res = (val * pow(unit, -1, p)) % p
            return K.elem(res)
        res = self._res_mul(val, self._res_inv((m % p, 0)))
        return K.elem(res[0], res[1])

    def to_json(self):
        if self.kind == "rational":
            return {"p": self.p}
        I = self.ideal()
        return {"p": self.p, "kind": self.kind, "f": self.f, "e": self.e,
                "hnf": [I.a, I.b, I.c]}


@lru_cache(maxsize=None)
def factor_rational_prime(field: FieldSpec, p: int) -> tuple[tuple[PrimeIdeal, int], ...]:
    """Splitting of the rational prime p: (p) = prod P_i^{e_i}."""
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if field.is_rational:
        return ((PrimeIdeal(field, p, "rational"), 1),)
    D = field.discriminant
    t, n = field.minimal_poly_of_w()
    if p == 2:
        d = field.d
        if d % 4 == 1:
            if d % 8 == 1:
                # x^2 - x + n = x(x-1) mod 2
                return (
                    (PrimeIdeal(field, 2, "split", 0), 1),
                    (PrimeIdeal(field, 2, "split", 1), 1),
                )
            return ((PrimeIdeal(field, 2, "inert"), 1),)
        r = 0 if d % 4 == 2 else 1
        return ((PrimeIdeal(field, 2, "ramified", r), 2),)
    if D % p == 0:
        # double root of x^2 - t x + n mod p
        r = (t * pow(2, -1, p)) % p
        return ((PrimeIdeal(field, p, "ramified", r), 2),)
    ls = pow(D % p, (p - 1) // 2, p)
    if ls == p - 1:
        return ((PrimeIdeal(field, p, "inert"), 1),)
    s = sqrt_mod(D, p)
    r1 = ((t + s) * pow(2, -1, p)) % p
    r2 = ((t - s) * pow(2, -1, p)) % p
    prs = sorted([r1, r2])
    return (
        (PrimeIdeal(field, p, "split", prs[0]), 1),
        (PrimeIdeal(field, p, "split", prs[1]), 1),
    )


def primes_above(field: FieldSpec, p: int) -> list[PrimeIdeal]:
    return [P for P, _ in factor_rational_prime(field, p)]


class FractionalIdeal:
    """Nonzero fractional ideal, canonically represented.

    Over Q: a positive rational num/den.  Over an imaginary quadratic field:
    (1/den) * (Z*a + Z*(b + c*w)) with c | a, c | b, 0 <= b < a and
    gcd(den, a, b, c) = 1.  Equal ideals have identical representations.
    """

    __slots__ = ("field", "den", "a", "b", "c")

    def __init__(self, field: FieldSpec, den: int, a: int, b: int = 0, c: int = 1):
        if a <= 0 or den <= 0:
            raise ZeroIdeal("ideal data must be positive")
        object.__setattr__(self, "field", field)
        if field.is_rational:
            g = math.gcd(a, den)
            object.__setattr__(self, "den", den // g)
            object.__setattr__(self, "a", a // g)
            object.__setattr__(self, "b", 0)
            object.__setattr__(self, "c", 1)
        else:
            g = math.gcd(math.gcd(a, b), math.gcd(c, den))
            a, b, c, den = a // g, b // g, c // g, den // g
            if a % c or b % c or not (0 <= b < a):
                raise ValueError("not a valid HNF triple")
            object.__setattr__(self, "den", den)
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)
            object.__setattr__(self, "c", c)

    def __setattr__(self, *a):
        raise AttributeError("FractionalIdeal is immutable")

    # -- construction -----------------------------------------------------

    @staticmethod
    def ring(field: FieldSpec) -> "FractionalIdeal":
        return FractionalIdeal(field, 1, 1, 0, 1)

    @staticmethod
    def _hnf_from_pairs(field: FieldSpec, pairs) -> tuple[int, int, int]:
        """HNF basis [a, b + c*w] of the lattice spanned by (x, y) pairs.

        The span must already be closed under multiplication by w."""
        pairs = [(x, y) for x, y in pairs if x or y]
        if not pairs:
            raise ZeroIdeal("zero ideal")
        # combine to a single vector carrying gcd of the w-coordinates
        wx, wy = 0, 0
        for x, y in pairs:
            if y == 0:
                continue
            if wy == 0:
                wx, wy = x, y
            else:
                g, s, t = xgcd(wy, y)
                wx, wy = s * wx + t * x, g
        rest = []
        for x, y in pairs:
            if wy:
                k = y // wy
                rest.append(x - k * wx)
            else:
                rest.append(x)
        a = 0
        for x in rest:
            a = math.gcd(a, x)
        if a == 0:
            raise ZeroIdeal("rank-deficient lattice is not an ideal")
        c = wy if wy else 0
        if c == 0:
            raise ZeroIdeal("rank-deficient lattice is not an ideal")
        if c < 0:
            wx, c = -wx, -c
        b = wx % a
        assert a % c == 0 and b % c == 0, "lattice not closed under w"
        return a, b, c

    @staticmethod
    def from_generators(field: FieldSpec, gens) -> "FractionalIdeal":
        """Ideal generated by the given field elements."""
        gens = [g if isinstance(g, KElement) else field.elem(g) for g in gens]
        gens = [g for g in gens if not g.is_zero()]
        if not gens:
            raise ZeroIdeal("zero ideal")
        if field.is_rational:
            den = math.lcm(*[g.a.denominator for g in gens])
            num = math.gcd(*[int(g.a * den) for g in gens])
            return FractionalIdeal(field, den, abs(num))
        den = math.lcm(*[g.denominator() for g in gens])
        pairs = []
        m0, m1 = field.w_sq_const, field.w_trace
        for g in gens:
            u, v = int(g.a * den), int(g.b * den)
            pairs.append((u, v))
            pairs.append((v * m0, u + v * m1))  # w * (u + v*w)
        a, b, c = FractionalIdeal._hnf_from_pairs(field, pairs)
        return FractionalIdeal(field, den, a, b, c)

    @staticmethod
    def principal(x: KElement) -> "FractionalIdeal":
        if x.is_zero():
            raise ZeroIdeal("zero ideal")
        return FractionalIdeal.from_generators(x.field, [x])

    # -- basic data --------------------------------------------------------

    def basis_elements(self) -> tuple[KElement, KElement]:
        K = self.field
        if K.is_rational:
            g = K.elem(Fraction(self.a, self.den))
            return g, g
        return (
            K.elem(Fraction(self.a, self.den)),
            K.elem(Fraction(self.b, self.den), Fraction(self.c, self.den)),
        )

    def norm(self) -> Fraction:
        if self.field.is_rational:
            return Fraction(self.a, self.den)
        return Fraction(self.a * self.c, self.den * self.den)

    @property
    def is_integral(self) -> bool:
        return self.den == 1

    def is_ring(self) -> bool:
        return self.den == 1 and self.a == 1 and self.c == 1

    # -- arithmetic ---------------------------------------------------------

    def __mul__(self, other: "FractionalIdeal") -> "FractionalIdeal":
        if self.field != other.field:
            raise ValueError("mixed fields")
        K = self.field
        if K.is_rational:
            return FractionalIdeal(K, self.den * other.den, self.a * other.a)
        m0, m1 = K.w_sq_const, K.w_trace
        a1, b1, c1 = self.a, self.b, self.c
        a2, b2, c2 = other.a, other.b, other.c
        pairs = [
            (a1 * a2, 0),
            (a1 * b2, a1 * c2),
            (a2 * b1, a2 * c1),
            (b1 * b2 + c1 * c2 * m0, b1 * c2 + c1 * b2 + c1 * c2 * m1),
        ]
        a, b, c = FractionalIdeal._hnf_from_pairs(K, pairs)
        return FractionalIdeal(K, self.den * other.den, a, b, c)

    def conjugate(self) -> "FractionalIdeal":
        K = self.field
        if K.is_rational:
            return self
        m1 = K.w_trace
        pairs = []
        for x, y in [(self.a, 0), (self.b + self.c * m1, -self.c)]:
            pairs.append((x, y))
            m0 = K.w_sq_const
            pairs.append((y * m0, x + y * m1))
        a, b, c = FractionalIdeal._hnf_from_pairs(K, pairs)
        return FractionalIdeal(K, self.den, a, b, c)

    def inverse(self) -> "FractionalIdeal":
        K = self.field
        if K.is_rational:
            return FractionalIdeal(K, self.a, self.den)
        # (1/den * I0)^{-1} = den * conj(I0) / N(I0)
        m0, m1 = K.w_sq_const, K.w_trace
        pairs = []
        for x, y in [(self.a, 0), (self.b + self.c * m1, -self.c)]:
            pairs.append((x, y))
            pairs.append((y * m0, x + y * m1))
        ca, cb, cc = FractionalIdeal._hnf_from_pairs(K, pairs)
        return FractionalIdeal(K, self.a * self.c, ca * self.den, cb * self.den, cc * self.den)

    def __pow__(self, n: int) -> "FractionalIdeal":
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = FractionalIdeal.ring(self.field)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def valuation(self, P: PrimeIdeal) -> int:
        b1, b2 = self.basis_elements()
        if self.field.is_rational:
            return P.valuation(b1)
        return min(P.valuation(b1), P.valuation(b2))

    def contains(self, x) -> bool:
        if isinstance(x, (int, Fraction)):
            x = self.field.elem(x)
        if x.is_zero():
            return True
        if self.field.is_rational:
            q = x.a / Fraction(self.a, self.den)
            return q.denominator == 1
        ax, bx = Fraction(x.a * self.den), Fraction(x.b * self.den)
        if bx % self.c != 0:
            return False
        k = bx / self.c
        rem = ax - k * self.b
        return (rem / self.a).denominator == 1

    def __eq__(self, other):
        return (
            isinstance(other, FractionalIdeal)
            and self.field == other.field
            and (self.den, self.a, self.b, self.c) == (other.den, other.a, other.b, other.c)
        )

    def __hash__(self):
        return hash((self.field, self.den, self.a, self.b, self.c))

    def __repr__(self):
        if self.field.is_rational:
            return f"({self.a}/{self.den})" if self.den != 1 else f"({self.a})"
        s = f"[{self.a}, {self.b}+{self.c}w]"
        return s if self.den == 1 else f"(1/{self.den})" + s

    def to_json(self):
        if self.field.is_rational:
            return {"den": self.den, "hnf": [self.a]}
        return {"den": self.den, "hnf": [self.a, self.b, self.c]}

    @staticmethod
    def from_json(field: FieldSpec, obj) -> "FractionalIdeal":
        h = obj["hnf"]
        if field.is_rational:
            return FractionalIdeal(field, obj["den"], h[0])
        return FractionalIdeal(field, obj["den"], h[0], h[1], h[2])


def ideal_from_factorization(field: FieldSpec, factors) -> "FractionalIdeal":
    """prod P^e over (PrimeIdeal, int) pairs."""
    result = FractionalIdeal.ring(field)
    for P, e in factors:
        if e:
            result = result * (P.ideal() ** e)
    return result


# -- binary quadratic forms and the class group ----------------------------


def reduce_form(form: tuple[int, int, int]) -> tuple[int, int, int]:
    """Reduce a positive definite form (A, B, C) of negative discriminant."""
    A, B, C = form
    while True:
        # normalize B into (-A, A] by x -> x + t*y
        t = (A - B) // (2 * A)
        if t:
            C = A * t * t + B * t + C
            B = B + 2 * A * t
        if C < A:
            A, B, C = C, -B, A
            continue
        break
    if A == C and B < 0:
        B = -B
    return (A, B, C)


def principal_form(D: int) -> tuple[int, int, int]:
    k = D % 2
    return (1, k, (k * k - D) // 4)


def _form_eval(f, x, y):
    A, B, C = f
    return A * x * x + B * x * y + C * y * y


def compose_forms(f1, f2, D) -> tuple[int, int, int]:
    """Gauss composition of primitive forms of discriminant D, reduced."""
    A1 = f1[0]
    # replace f2 by an equivalent form whose leading coefficient is
    # coprime to A1 (a primitive form represents such integers)
    g2 = f2
    if math.gcd(A1, f2[0]) != 1:
        found = False
        bound = 0
        while not found:
            bound += 1
            for u in range(-bound, bound + 1):
                for v in range(-bound, bound + 1):
                    if max(abs(u), abs(v)) != bound:
                        continue
                    if math.gcd(u, v) != 1:
                        continue
                    val = _form_eval(f2, u, v)
                    if val != 0 and math.gcd(A1, val) == 1:
                        g, s, t = xgcd(u, v)
                        # unimodular matrix with columns (u, v), (-t, s)
                        a2, b2, c2 = f2
                        A2 = val
                        B2 = 2 * (a2 * u * (-t) + c2 * v * s) + b2 * (u * s + v * (-t))
                        C2 = _form_eval(f2, -t, s)
                        g2 = (A2, B2, C2)
                        found = True
                        break
                if found:
                    break
    A2 = g2[0]
    b1, b2 = f1[1], g2[1]
    # CRT: B = b1 mod 2*A1, B = b2 mod 2*A2 with gcd(2A1, 2A2) = 2
    m1, m2 = 2 * A1, 2 * A2
    g, s, t = xgcd(m1, m2)
    assert (b2 - b1) % g == 0
    lcm = m1 // g * m2
    B = (b1 + m1 * ((b2 - b1) // g) * s) % lcm
    C_num = B * B - D
    assert C_num % (4 * A1 * A2) == 0
    return reduce_form((A1 * A2, B, C_num // (4 * A1 * A2)))


class IdealClass:
    """An ideal class, as a reduced form (trivial over Q)."""

    __slots__ = ("field", "form")

    def __init__(self, field: FieldSpec, form: tuple[int, int, int] | None):
        object.__setattr__(self, "field", field)
        if form is not None:
            form = reduce_form(form)
        object.__setattr__(self, "form", form)

    def __setattr__(self, *a):
        raise AttributeError("IdealClass is immutable")

    @property
    def is_principal(self) -> bool:
        if self.form is None:
            return True
        return self.form == principal_form(self.field.discriminant)

    def __mul__(self, other: "IdealClass") -> "IdealClass":
        if self.field != other.field:
            raise ValueError("mixed fields")
        if self.form is None:
            return self
        D = self.field.discriminant
        return IdealClass(self.field, compose_forms(self.form, other.form, D))

    def inverse(self) -> "IdealClass":
        if self.form is None:
            return self
        A, B, C = self.form
        return IdealClass(self.field, (A, -B, C))

    def __pow__(self, n: int) -> "IdealClass":
        if self.form is None:
            return self
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = IdealClass(self.field, principal_form(self.field.discriminant))
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def order(self) -> int:
        n, acc = 1, self
        while not acc.is_principal:
            acc = acc * self
            n += 1
        return n

    def __eq__(self, other):
        return isinstance(other, IdealClass) and self.field == other.field and self.form == other.form

    def __hash__(self):
        return hash((self.field, self.form))

    def __repr__(self):
        return f"cls{self.form}" if self.form is not None else "cls(1)"

    def to_json(self):
        return None if self.form is None else list(self.form)


class ClassGroup:
    """The ideal class group, as the set of reduced forms of discriminant D."""

    def __init__(self, field: FieldSpec):
        self.field = field
        if field.is_rational:
            self.forms = [None]
            self.h = 1
            self.structure: list[int] = []
            self.exponent = 1
            self._squares = {IdealClass(field, None)}
            return
        D = field.discriminant
        self.forms = enumerate_reduced_forms(D)
        self.h = len(self.forms)
        elements = [IdealClass(field, f) for f in self.forms]
        self.structure = abelian_structure(elements)
        self.exponent = self.structure[-1] if self.structure else 1
        self._squares = {c * c for c in elements}

    @property
    def identity(self) -> IdealClass:
        if self.field.is_rational:
            return IdealClass(self.field, None)
        return IdealClass(self.field, principal_form(self.field.discriminant))

    def elements(self) -> list[IdealClass]:
        return [IdealClass(self.field, f) for f in self.forms]

    def is_square(self, cls: IdealClass) -> bool:
        return cls in self._squares

    def has_element_of_order(self, n: int) -> bool:
        return self.exponent % n == 0

    def to_json(self):
        return {
            "D": self.field.discriminant if not self.field.is_rational else 1,
            "h": self.h,
            "structure": self.structure,
            "forms": [list(f) for f in self.forms] if not self.field.is_rational else [],
        }


def enumerate_reduced_forms(D: int) -> list[tuple[int, int, int]]:
    """All reduced primitive positive definite forms of discriminant D < 0."""
    assert D < 0 and D % 4 in (0, 1)
    forms = []
    amax = math.isqrt(-D // 3)
    for A in range(1, amax + 1):
        for B in range(-A + 1, A + 1):
            if (B - D) % 2 != 0:
                continue
            num = B * B - D
            if num % (4 * A) != 0:
                continue
            C = num // (4 * A)
            if C < A:
                continue
            if (abs(B) == A or A == C) and B < 0:
                continue
            if math.gcd(math.gcd(A, abs(B)), C) != 1:
                continue
            forms.append((A, B, C))
    forms.sort()
    return forms


def abelian_structure(elements) -> list[int]:
    """Invariant factors [d1, d2, ...] with d1 | d2 | ... of a small abelian
    group given by a list of elements supporting * and is_principal."""
    if len(elements) == 1:
        return []
    # work with an abstract coset structure
    def structure(elems, mul, ident):
        n = len(elems)
        if n == 1:
            return []
        orders = {}
        for g in elems:
            k, acc = 1, g
            while acc != ident:
                acc = mul(acc, g)
                k += 1
            orders[g] = k
        m = max(orders.values())
        gen = next(g for g, k in orders.items() if k == m)
        # subgroup generated by gen
        sub = [ident]
        acc = gen
        while acc != ident:
            sub.append(acc)
            acc = mul(acc, gen)
        subset = frozenset(sub)
        # quotient cosets
        cosets = {}
        for g in elems:
            key = frozenset(mul(g, s) for s in sub)
            cosets.setdefault(key, g)
        coset_keys = list(cosets.keys())
        index = {k: i for i, k in enumerate(coset_keys)}
        def find_coset(x):
            return index[frozenset(mul(x, s) for s in sub)]
        qmul = lambda i, j: find_coset(mul(cosets[coset_keys[i]], cosets[coset_keys[j]]))
        qident = find_coset(ident)
        rest = structure(list(range(len(coset_keys))), qmul, qident)
        return rest + [m]
    ident = next(g for g in elements if g.is_principal)
    inv = structure(elements, lambda x, y: x * y, ident)
    # normalize to divisibility chain d1 | d2 | ...
    inv.sort()
    return inv


@lru_cache(maxsize=None)
def class_group(field: FieldSpec) -> ClassGroup:
    if not field.is_rational and field.d >= 0:
        raise UnsupportedField("only imaginary quadratic fields are supported")
    return ClassGroup(field)


def class_of(I: FractionalIdeal) -> IdealClass:
    """The ideal class of I under the form correspondence."""
    K = I.field
    if K.is_rational:
        return IdealClass(K, None)
    a, b, c = I.a, I.b, I.c
    m0, m1 = K.w_sq_const, K.w_trace
    nrm_beta = b * b + b * c * m1 - c * c * m0
    A = a // c
    B = 2 * (b // c) + m1
    assert nrm_beta % (a * c) == 0
    C = nrm_beta // (a * c)
    return IdealClass(K, (A, B, C))


def principal_generator(I: FractionalIdeal) -> KElement | None:
    """A generator of I if principal (via lattice reduction), else None."""
    K = I.field
    if K.is_rational:
        return K.elem(Fraction(I.a, I.den))
    m0, m1 = K.w_sq_const, K.w_trace
    a, b, c = I.a, I.b, I.c
    # Gram form of the basis (a, b + c*w) under the norm
    A = a * a
    B = a * (2 * b + c * m1)
    C = b * b + b * c * m1 - c * c * m0
    v1 = (a, 0)
    v2 = (b, c)
    # Lagrange reduction tracking the basis
    while True:
        # normalize B into (-A, A] by v2 <- v2 + t*v1
        t = (A - B) // (2 * A)
        if t:
            C = A * t * t + B * t + C
            B = B + 2 * A * t
            v2 = (v2[0] + t * v1[0], v2[1] + t * v1[1])
        if C < A:
            A, B, C = C, -B, A
            v1, v2 = v2, (-v1[0], -v1[1])
            continue
        break
    min_norm = A
    if min_norm != a * c:
        return None
    g = K.elem(Fraction(v1[0], I.den), Fraction(v1[1], I.den))
    assert FractionalIdeal.principal(g) == I
    return g


def _coprime_split_one(field: FieldSpec, A: FractionalIdeal, B: FractionalIdeal):
    """alpha in A with 1 - alpha in B, for coprime integral ideals A, B."""
    if field.is_rational:
        a1, a2 = A.a, B.a
        g, s, t = xgcd(a1, a2)
        if g != 1:
            raise ValueError("ideals not coprime")
        return field.elem(s * a1)
    a1, b1, c1 = A.a, A.b, A.c
    a2, b2, c2 = B.a, B.b, B.c
    g = math.gcd(c1, c2)
    k = (b1 * c2 - b2 * c1) // g
    g1, s, t1 = xgcd(a1, a2)
    g2, s2, t2 = xgcd(g1, k)
    if g2 != 1:
        raise ValueError("ideals not coprime")
    x1 = s * s2
    tt = t2
    # alpha = x1*a1 + (c2/g)*tt * (b1 + c1*w)
    coef = (c2 // g) * tt
    alpha = field.elem(x1 * a1 + coef * b1, coef * c1)
    assert A.contains(alpha)
    assert B.contains(field.one - alpha)
    return alpha


def crt_approximate(constraints) -> KElement:
    """Element r with v_P(r - target_P) >= k_P for each (P, target, k).

    r is integral away from the constraint primes.  Raises DuplicatePrime if
    two constraints name the same prime."""
    if not constraints:
        raise ValueError("no constraints")
    field = constraints[0][0].field
    primes = [P for P, _, _ in constraints]
    if len(set(primes)) != len(primes):
        raise DuplicatePrime("repeated prime in constraints")
    targets = [t if isinstance(t, KElement) else field.elem(t) for _, t, _ in constraints]
    ks = [k for _, _, k in constraints]
    # scale all targets integral
    M = 1
    for t in targets:
        M = math.lcm(M, t.denominator())
    exps = [max(k + P.e * (vp_int(M, P.p) if M % P.p == 0 else 0), 1) for (P, _, k), t in zip(constraints, targets)]
    moduli = [P.ideal() ** e for P, e in zip(primes, exps)]
    scaled = [t * M for t in targets]
    R = field.zero
    for i in range(len(constraints)):
        A = moduli[i]
        Bprod = FractionalIdeal.ring(field)
        for j in range(len(constraints)):
            if j != i:
                Bprod = Bprod * moduli[j]
        if Bprod.is_ring():
            e_i = field.one
        else:
            alpha = _coprime_split_one(field, A, Bprod)
            e_i = field.one - alpha  # 1 mod A, 0 mod the others
        R = R + scaled[i] * e_i
    r0 = R * Fraction(1, M)
    # strip denominators at primes away from the constraint set
    den = r0.denominator()
    n = den
    for P in primes:
        while n % P.p == 0:
            n //= P.p
    if n > 1:
        big = 1
        for P, k in zip(primes, ks):
            vpm = vp_int(M, P.p) if M % P.p == 0 else 0
            margin = max(k, 0) + vpm + 1
            big = big * P.p ** margin
        nstar = pow(n, -1, big)
        r = r0 * (n * nstar)
    else:
        r = r0
    for (P, t, k) in zip(primes, targets, ks):
        diff = r - t
        if not diff.is_zero():
            assert P.valuation(diff) >= k, "approximation failed"
    return r


def find_field_with_class_element_of_order(n: int, bound: int) -> FieldSpec | None:
    """First imaginary quadratic field (by |d|) whose class group has an
    element of exact order n; None if |d| exceeds the bound."""
    if n < 1:
        raise ValueError("order must be positive")
    for dd in range(1, bound + 1):
        if any(e > 1 for e in factorint(dd).values()):
            continue
        K = FieldSpec(-dd)
        if class_group(K).has_element_of_order(n):
            return K
    return None
