"""Exact univariate polynomials and binary forms over Q or a quadratic field.

Polynomials are dense coefficient lists (constant term first).  Binary forms
carry a nominal degree separately from their support, so a form may have
vanishing leading coefficients (a root at infinity).
"""

from __future__ import annotations

from fractions import Fraction

from .quadfield import FieldSpec, KElement


class ZeroPolynomial(ValueError):
    pass


class ZeroForm(ValueError):
    pass


class SingularMatrix(ValueError):
    pass


class Poly:
    """Polynomial with exact field coefficients, constant term first."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldSpec, coeffs):
        cs = [c if isinstance(c, KElement) else field.elem(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *a):
        raise AttributeError("Poly is immutable")

    @staticmethod
    def zero(field: FieldSpec) -> "Poly":
        return Poly(field, [])

    @staticmethod
    def const(field: FieldSpec, c) -> "Poly":
        return Poly(field, [c])

    @staticmethod
    def x(field: FieldSpec) -> "Poly":
        return Poly(field, [0, 1])

    @property
    def degree(self) -> int:
        """Exact degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self) -> KElement:
        if self.is_zero():
            raise ZeroPolynomial("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, i: int) -> KElement:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.field.zero

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.field, [self.coeff(i) + other.coeff(i) for i in range(n)])

    def __sub__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.field, [self.coeff(i) - other.coeff(i) for i in range(n)])

    def __neg__(self) -> "Poly":
        return Poly(self.field, [-c for c in self.coeffs])

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction, KElement)):
            return self.scale(other)
        if self.is_zero() or other.is_zero():
            return Poly.zero(self.field)
        out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(self.field, out)

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        c = self.field.elem(c) if not isinstance(c, KElement) else c
        return Poly(self.field, [a * c for a in self.coeffs])

    def __pow__(self, n: int) -> "Poly":
        result = Poly.const(self.field, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __call__(self, x):
        """Evaluate (Horner); x may be an element or a Poly (composition)."""
        if isinstance(x, Poly):
            acc = Poly.zero(self.field)
            for c in reversed(self.coeffs):
                acc = acc * x + Poly.const(self.field, c)
            return acc
        x = self.field.elem(x) if not isinstance(x, KElement) else x
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Poly":
        return Poly(self.field, [c * i for i, c in enumerate(self.coeffs)][1:])

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroPolynomial("division by the zero polynomial")
        q = [self.field.zero] * max(0, self.degree - other.degree + 1)
        r = list(self.coeffs)
        d, lc = other.degree, other.lc()
        while len(r) - 1 >= d and r:
            k = len(r) - 1 - d
            f = r[-1] / lc
            q[k] = f
            for i, c in enumerate(other.coeffs):
                r[k + i] = r[k + i] - f * c
            while r and r[-1].is_zero():
                r.pop()
        return Poly(self.field, q), Poly(self.field, r)

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def reverse(self, m: int) -> "Poly":
        """t^m * f(1/t): the coefficient list reversed at nominal degree m."""
        assert m >= self.degree
        return Poly(self.field, [self.coeff(m - i) for i in range(m + 1)])

    def homogeneous_eval(self, num: "Poly", den: "Poly", m: int) -> "Poly":
        """sum f_i * num^i * den^(m-i) for the nominal degree m >= deg f."""
        assert m >= self.degree
        dpow = [Poly.const(self.field, 1)]
        for _ in range(m):
            dpow.append(dpow[-1] * den)
        acc = Poly.zero(self.field)
        npow = Poly.const(self.field, 1)
        for i in range(m + 1):
            c = self.coeff(i)
            if not c.is_zero():
                acc = acc + (npow * dpow[m - i]).scale(c)
            if i < m:
                npow = npow * num
        return acc

    def __eq__(self, other):
        return isinstance(other, Poly) and self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __repr__(self):
        if self.is_zero():
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            if i == 0:
                parts.append(f"{c}")
            elif i == 1:
                parts.append(f"({c})*x")
            else:
                parts.append(f"({c})*x^{i}")
        return " + ".join(parts)

    def to_json(self):
        return [c.to_json() for c in self.coeffs]

    @staticmethod
    def from_json(field: FieldSpec, obj) -> "Poly":
        return Poly(field, [KElement.from_json(field, c) for c in obj])


def resultant(f: Poly, g: Poly) -> KElement:
    """Resultant of f and g taken at their exact degrees.

    Computed by a Euclidean remainder sequence; equals the determinant of
    the Sylvester matrix."""
    if f.is_zero() or g.is_zero():
        raise ZeroPolynomial("resultant of the zero polynomial")
    field = f.field
    m, n = f.degree, g.degree
    if m == 0 and n == 0:
        return field.one
    if n == 0:
        return g.lc() ** m
    if m == 0:
        return f.lc() ** n
    r = f % g
    if r.is_zero():
        return field.zero
    sign = field.one if (m * n) % 2 == 0 else -field.one
    # res(f, g) = (-1)^(mn) lc(g)^(m - deg r) res(g, r)
    return sign * g.lc() ** (m - r.degree) * resultant(g, r)


class BinaryForm:
    """Binary form of nominal degree n; coeffs[i] multiplies X^i Z^(n-i)."""

    __slots__ = ("field", "n", "coeffs")

    def __init__(self, field: FieldSpec, n: int, coeffs):
        cs = [c if isinstance(c, KElement) else field.elem(c) for c in coeffs]
        if len(cs) != n + 1:
            raise ValueError(f"degree-{n} form needs {n + 1} coefficients")
        if n < 1:
            raise ValueError("form degree must be at least 1")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *a):
        raise AttributeError("BinaryForm is immutable")

    @staticmethod
    def from_poly(p: Poly, n: int) -> "BinaryForm":
        if p.degree > n:
            raise ValueError("polynomial degree exceeds form degree")
        return BinaryForm(p.field, n, [p.coeff(i) for i in range(n + 1)])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def dehomogenize(self) -> Poly:
        return Poly(self.field, self.coeffs)

    def eval(self, x, z):
        x = self.field.elem(x) if not isinstance(x, KElement) else x
        z = self.field.elem(z) if not isinstance(z, KElement) else z
        acc = self.field.zero
        xp = self.field.one
        zp = [self.field.one]
        for _ in range(self.n):
            zp.append(zp[-1] * z)
        for i, c in enumerate(self.coeffs):
            acc = acc + c * xp * zp[self.n - i]
            if i < self.n:
                xp = xp * x
        return acc

    def __eq__(self, other):
        return (
            isinstance(other, BinaryForm)
            and self.field == other.field
            and self.n == other.n
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field, self.n, self.coeffs))

    def __repr__(self):
        return f"BinaryForm({self.n}; {[str(c) for c in self.coeffs]})"


def act_on_form(B: BinaryForm, M) -> BinaryForm:
    """B composed with the substitution (X, Z) -> (aX+bZ, cX+dZ).

    M is ((a, b), (c, d)); satisfies disc(B.M) = det(M)^(n(n-1)) disc(B)."""
    field = B.field
    (a, b), (c, d) = M
    a, b, c, d = (field.elem(t) if not isinstance(t, KElement) else t for t in (a, b, c, d))
    if (a * d - b * c).is_zero():
        raise SingularMatrix("substitution matrix is singular")
    n = B.n
    u = Poly(field, [b, a])  # aX + bZ as a poly in X with Z = 1... kept homogeneous below
    v = Poly(field, [d, c])
    # work with polynomials in X at Z = 1; the result is the full coefficient
    # list since we track all n+1 coefficients explicitly
    upow = [Poly.const(field, 1)]
    vpow = [Poly.const(field, 1)]
    for _ in range(n):
        upow.append(upow[-1] * u)
        vpow.append(vpow[-1] * v)
    acc = Poly.zero(field)
    for i, cf in enumerate(B.coeffs):
        if not cf.is_zero():
            acc = acc + (upow[i] * vpow[n - i]).scale(cf)
    return BinaryForm(field, n, [acc.coeff(i) for i in range(n + 1)])


def disc_form(B: BinaryForm) -> KElement:
    """SL2-invariant discriminant of a binary form.

    Normalised so that a degree-n polynomial f with lc a_n embedded at form
    degree n has disc = (-1)^(n(n-1)/2) res(f, f') / a_n.  A vanishing top
    coefficient is handled by an invariance-preserving unimodular shear."""
    if B.is_zero():
        raise ZeroForm("discriminant of the zero form")
    field = B.field
    n = B.n
    if n == 1:
        return field.one
    # smallest t >= 0 with nonzero top coefficient after (X, Z) -> (X, tX+Z)
    if B.coeffs[-1].is_zero():
        t = 0
        while True:
            t += 1
            if not B.eval(1, t).is_zero():
                break
        B = act_on_form(B, ((1, 0), (t, 1)))
    f = B.dehomogenize()
    fp = f.derivative()
    if fp.is_zero():
        return field.zero
    r = resultant(f, fp)
    sign = field.one if (n * (n - 1) // 2) % 2 == 0 else -field.one
    return sign * r / f.lc()
