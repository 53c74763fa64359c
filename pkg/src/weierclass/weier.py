"""Hyperelliptic Weierstrass equations y^2 + Q(x)y = P(x) and their
coordinate changes.

An equation of genus g has deg Q <= g+1 and deg P <= 2g+2; the attached
binary form 4P + Q^2 of degree 2g+2 must be squarefree (smooth generic
fiber).  A change of coordinates is u = (ax+b)/(cx+d),
z = (e*y + H(x))/(cx+d)^(g+1); its effect on the discriminant is
Delta' = e^(4(2g+1)) * (ad-bc)^(-2(g+1)(2g+1)) * Delta.
"""

from __future__ import annotations

from fractions import Fraction

from .exactpoly import BinaryForm, Poly, SingularMatrix, disc_form
from .quadfield import FieldSpec, KElement


class SingularGenericFiber(ValueError):
    pass


class DegreeViolation(ValueError):
    pass


class ZeroTwist(ValueError):
    pass


class RamifiedAtZeroOrInfinity(ValueError):
    pass


def _is_pointed_shape(genus: int, P: Poly, Q: Poly) -> bool:
    return (
        P.degree == 2 * genus + 1
        and P.lc().is_one()
        and Q.degree <= genus
    )


class WeierstrassEq:
    """y^2 + Q(x) y = P(x) presenting a genus-g curve."""

    __slots__ = ("field", "genus", "P", "Q", "pointed", "_disc")

    def __init__(self, field: FieldSpec, genus: int, P: Poly, Q: Poly, pointed: bool = False):
        if genus < 1:
            raise DegreeViolation("genus must be at least 1")
        if P.degree > 2 * genus + 2:
            raise DegreeViolation(f"deg P = {P.degree} exceeds 2g+2 = {2 * genus + 2}")
        if Q.degree > genus + 1:
            raise DegreeViolation(f"deg Q = {Q.degree} exceeds g+1 = {genus + 1}")
        if pointed and not _is_pointed_shape(genus, P, Q):
            raise DegreeViolation("pointed equation needs monic P of degree 2g+1 and deg Q <= g")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "genus", genus)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "pointed", pointed)
        object.__setattr__(self, "_disc", None)

    def __setattr__(self, *a):
        raise AttributeError("WeierstrassEq is immutable")

    @staticmethod
    def make(field, genus, p_coeffs, q_coeffs=(), pointed=False) -> "WeierstrassEq":
        return WeierstrassEq(field, genus, Poly(field, p_coeffs), Poly(field, q_coeffs), pointed)

    def form(self) -> BinaryForm:
        """4P + Q^2 as a binary form of degree 2g+2."""
        f = self.P.scale(4) + self.Q * self.Q
        return BinaryForm.from_poly(f, 2 * self.genus + 2)

    def validate(self) -> "ValidationReport":
        g = self.genus
        B = self.form()
        f = B.dehomogenize()
        if f.is_zero() or f.degree < 2 * g + 1:
            raise DegreeViolation("4P + Q^2 must have degree 2g+1 or 2g+2")
        if disc_form(B).is_zero():
            raise SingularGenericFiber("4P + Q^2 has a repeated root")
        return ValidationReport(
            genus=g,
            f_degree=f.degree,
            ramified_at_infinity=B.coeffs[2 * g + 2].is_zero(),
            infinity_P=self.P.reverse(2 * g + 2),
            infinity_Q=self.Q.reverse(g + 1),
        )

    def discriminant(self) -> KElement:
        """2^(-4(g+1)) * disc of the degree-(2g+2) form 4P + Q^2."""
        if self._disc is None:
            d = disc_form(self.form())
            if d.is_zero():
                raise SingularGenericFiber("singular equation has no discriminant")
            scale = Fraction(1, 2 ** (4 * (self.genus + 1)))
            object.__setattr__(self, "_disc", d * scale)
        return self._disc

    def is_integral(self) -> bool:
        return all(c.is_integral() for c in self.P.coeffs) and all(
            c.is_integral() for c in self.Q.coeffs
        )

    def __eq__(self, other):
        return (
            isinstance(other, WeierstrassEq)
            and self.field == other.field
            and self.genus == other.genus
            and self.P == other.P
            and self.Q == other.Q
        )

    def __hash__(self):
        return hash((self.field, self.genus, self.P, self.Q))

    def __repr__(self):
        q = f" + ({self.Q})*y" if not self.Q.is_zero() else ""
        return f"y^2{q} = {self.P}  (g={self.genus})"

    def to_json(self):
        return {
            "schema": "weierclass/curve/1",
            "field": self.field.to_json(),
            "genus": self.genus,
            "P": self.P.to_json(),
            "Q": self.Q.to_json(),
            "pointed": self.pointed,
        }

    @staticmethod
    def from_json(obj) -> "WeierstrassEq":
        field = FieldSpec.from_json(obj["field"])
        return WeierstrassEq(
            field,
            int(obj["genus"]),
            Poly.from_json(field, obj.get("P", [])),
            Poly.from_json(field, obj.get("Q", [])),
            bool(obj.get("pointed", False)),
        )


class ValidationReport:
    __slots__ = ("genus", "f_degree", "ramified_at_infinity", "infinity_P", "infinity_Q")

    def __init__(self, genus, f_degree, ramified_at_infinity, infinity_P, infinity_Q):
        self.genus = genus
        self.f_degree = f_degree
        self.ramified_at_infinity = ramified_at_infinity
        self.infinity_P = infinity_P
        self.infinity_Q = infinity_Q

    def to_json(self):
        return {
            "genus": self.genus,
            "f_degree": self.f_degree,
            "ramified_at_infinity": self.ramified_at_infinity,
            "infinity_chart_P": self.infinity_P.to_json(),
            "infinity_chart_Q": self.infinity_Q.to_json(),
        }


class EqTransform:
    """u = (a x + b)/(c x + d), z = (e y + H(x))/(c x + d)^(g+1).

    Scaling the matrix by s and (e, H) by s^(g+1) gives the same map."""

    __slots__ = ("field", "genus", "a", "b", "c", "d", "e", "H")

    def __init__(self, field: FieldSpec, genus: int, m, e, H: Poly):
        a, b, c, d = (x if isinstance(x, KElement) else field.elem(x) for x in m)
        e = e if isinstance(e, KElement) else field.elem(e)
        if (a * d - b * c).is_zero():
            raise SingularMatrix("transform matrix is singular")
        if e.is_zero():
            raise SingularMatrix("unit factor must be nonzero")
        if H.degree > genus + 1:
            raise DegreeViolation("deg H exceeds g+1")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "genus", genus)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "H", H)

    def __setattr__(self, *a):
        raise AttributeError("EqTransform is immutable")

    @staticmethod
    def identity(field: FieldSpec, genus: int) -> "EqTransform":
        return EqTransform(field, genus, (1, 0, 0, 1), 1, Poly.zero(field))

    @staticmethod
    def diagonal(field: FieldSpec, genus: int, a, r, b, h: Poly | None = None) -> "EqTransform":
        """The change x = a x' + r, y = b y' + h(x)."""
        a = field.elem(a) if not isinstance(a, KElement) else a
        r = field.elem(r) if not isinstance(r, KElement) else r
        b = field.elem(b) if not isinstance(b, KElement) else b
        if h is None:
            h = Poly.zero(field)
        if h.degree > genus + 1:
            raise DegreeViolation("deg h exceeds g+1")
        e = a ** (genus + 1) / b
        return EqTransform(field, genus, (1, -r, 0, a), e, h.scale(-e))

    @property
    def det(self) -> KElement:
        return self.a * self.d - self.b * self.c

    @property
    def is_diagonal(self) -> bool:
        return self.c.is_zero()

    def diagonal_parts(self) -> tuple[KElement, KElement, KElement, Poly]:
        """(a, r, b, h) with x = a x' + r, y = b y' + h(x); requires c = 0."""
        if not self.is_diagonal:
            raise ValueError("transform is not diagonal")
        a = self.d / self.a
        r = -self.b / self.a
        b = self.d ** (self.genus + 1) / self.e
        h = self.H.scale(-(self.e.inverse()))
        return a, r, b, h

    def compose(self, inner: "EqTransform") -> "EqTransform":
        """self o inner: apply inner first, then self."""
        f, g = self.field, self.genus
        a1, b1, c1, d1, e1, H1 = self.a, self.b, self.c, self.d, self.e, self.H
        a2, b2, c2, d2, e2, H2 = inner.a, inner.b, inner.c, inner.d, inner.e, inner.H
        m = (
            a1 * a2 + b1 * c2,
            a1 * b2 + b1 * d2,
            c1 * a2 + d1 * c2,
            c1 * b2 + d1 * d2,
        )
        num = Poly(f, [b2, a2])
        den = Poly(f, [d2, c2])
        H = H2.scale(e1) + H1.homogeneous_eval(num, den, g + 1)
        return EqTransform(f, g, m, e1 * e2, H)

    def inverse(self) -> "EqTransform":
        f, g = self.field, self.genus
        a, b, c, d, e, H = self.a, self.b, self.c, self.d, self.e, self.H
        det = self.det
        num = Poly(f, [-b, d])
        den = Poly(f, [a, -c])
        Hstar = H.homogeneous_eval(num, den, g + 1).scale(-(e.inverse()))
        return EqTransform(f, g, (d, -b, -c, a), det ** (g + 1) / e, Hstar)

    def apply(self, E: WeierstrassEq) -> WeierstrassEq:
        return transform(E, self)

    def __eq__(self, other):
        if not isinstance(other, EqTransform):
            return NotImplemented
        return (
            self.field == other.field
            and self.genus == other.genus
            and (self.a, self.b, self.c, self.d, self.e, self.H)
            == (other.a, other.b, other.c, other.d, other.e, other.H)
        )

    def __repr__(self):
        return (
            f"EqTransform([{self.a}, {self.b}; {self.c}, {self.d}], e={self.e}, H={self.H})"
        )

    def to_json(self):
        if self.is_diagonal:
            a, r, b, h = self.diagonal_parts()
            return {
                "diagonal": True,
                "a": a.to_json(),
                "r": r.to_json(),
                "b": b.to_json(),
                "h": h.to_json(),
            }
        return {
            "diagonal": False,
            "matrix": [self.a.to_json(), self.b.to_json(), self.c.to_json(), self.d.to_json()],
            "e": self.e.to_json(),
            "H": self.H.to_json(),
        }


def transform(E: WeierstrassEq, T: EqTransform) -> WeierstrassEq:
    """The equation satisfied by the new coordinates (u, z)."""
    if E.field != T.field or E.genus != T.genus:
        raise ValueError("transform does not match the equation")
    f, g = E.field, E.genus
    det = T.det
    # x = (d u - b)/(a - c u)
    num = Poly(f, [-T.b, T.d])
    den = Poly(f, [T.a, -T.c])
    Qh = E.Q.homogeneous_eval(num, den, g + 1)
    Ph = E.P.homogeneous_eval(num, den, 2 * g + 2)
    Hh = T.H.homogeneous_eval(num, den, g + 1)
    e = T.e
    det_g1 = det ** (g + 1)
    det_2g2 = det_g1 * det_g1
    Qp = (Qh.scale(e) - Hh.scale(2)).scale(det_g1.inverse())
    Pp = (Ph.scale(e * e) + Qh * Hh.scale(e) - Hh * Hh).scale(det_2g2.inverse())
    pointed = E.pointed and _is_pointed_shape(g, Pp, Qp)
    return WeierstrassEq(f, g, Pp, Qp, pointed)


def quadratic_twist(E: WeierstrassEq, delta) -> WeierstrassEq:
    """Twist of a pointed equation y^2 = P(x) by delta: coefficient p_i is
    scaled by delta^(2g+1-i), keeping the result monic and pointed."""
    delta = E.field.elem(delta) if not isinstance(delta, KElement) else delta
    if delta.is_zero():
        raise ZeroTwist("twist by zero")
    if not E.pointed or not E.Q.is_zero():
        raise ValueError("twisting requires a pointed equation with Q = 0")
    g = E.genus
    n = 2 * g + 1
    coeffs = [E.P.coeff(i) * delta ** (n - i) for i in range(n + 1)]
    return WeierstrassEq(E.field, g, Poly(E.field, coeffs), Poly.zero(E.field), True)


def power_cover(E0: WeierstrassEq, d: int, alpha) -> WeierstrassEq:
    """The covering equation y^2 + Q(alpha x^d) y = P(alpha x^d) of genus
    d(g0+1) - 1; requires 4P+Q^2 to have nonzero top and constant
    coefficients (covering unramified over 0 and infinity)."""
    alpha = E0.field.elem(alpha) if not isinstance(alpha, KElement) else alpha
    if d < 1:
        raise ValueError("cover degree must be positive")
    if alpha.is_zero():
        raise ValueError("alpha must be nonzero")
    B = E0.form()
    if B.coeffs[-1].is_zero() or B.coeffs[0].is_zero():
        raise RamifiedAtZeroOrInfinity("4P+Q^2 must have nonzero top and constant coefficients")
    f, g0 = E0.field, E0.genus
    g = d * (g0 + 1) - 1

    def spread(p: Poly) -> Poly:
        out = [f.zero] * (d * p.degree + 1 if not p.is_zero() else 1)
        for i, c in enumerate(p.coeffs):
            out[d * i] = c * alpha ** i
        return Poly(f, out)

    return WeierstrassEq(f, g, spread(E0.P), spread(E0.Q), False)
