"""Minimization of Weierstrass equations over the localization at a prime.

Pointed equations are minimized by a weighted-valuation loop: search for a
translation x -> x + r, y -> y + h(x) after which v(q_j) >= (2g+1) - 2j and
v(p_i) >= (4g+2) - 2i, then rescale x = pi^2 x', y = pi^(2g+1) y' and
repeat.  Translations are searched digit by digit through a full residue
system at every pi-adic level, so the loop is exhaustive.

General equations are minimized by a bounded breadth-first search over
parameters of the quotient line: moves x -> (x - r)/pi over residue lifts
plus x -> 1/x, with the y-coordinate renormalized after every move.
States are homothety classes of the row lattice of the accumulated Mobius
matrix, canonically labelled, and the discriminant valuation of a state is
tracked exactly through the transformation law.
"""

from __future__ import annotations

import heapq
import itertools
import os
from dataclasses import dataclass

from .exactpoly import Poly
from .quadfield import FieldSpec, KElement, PrimeIdeal
from .weier import EqTransform, SingularGenericFiber, WeierstrassEq, transform


class NonIntegralInput(ValueError):
    pass


class SearchBudgetExceeded(RuntimeError):
    pass


DEFAULT_NODE_CAP = 20000


def _node_cap(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("WEIER_NODE_CAP")
    return int(env) if env else DEFAULT_NODE_CAP


def _poly_is_zero_mod(prime: PrimeIdeal, p: Poly, k: int = 1) -> bool:
    for c in p.coeffs:
        if not c.is_zero() and prime.valuation(c) < k:
            return False
    return True


def is_normal_at(E: WeierstrassEq, prime: PrimeIdeal) -> bool:
    """True iff the fiber of the equation over the prime is reduced.

    For residue characteristic != 2 this asks 4P + Q^2 != 0 mod the prime;
    in residue characteristic 2 it asks Q != 0 mod the prime or that P mod
    the prime is not a square in the residue polynomial ring.  The chart at
    infinity imposes the same condition, by coefficient reversal."""
    for c in list(E.P.coeffs) + list(E.Q.coeffs):
        if not c.is_zero() and prime.valuation(c) < 0:
            raise NonIntegralInput("equation is not integral at the prime")
    if prime.residue_char != 2:
        F = E.P.scale(4) + E.Q * E.Q
        return not _poly_is_zero_mod(prime, F)
    if not _poly_is_zero_mod(prime, E.Q):
        return True
    # P mod prime is a square iff every odd-degree coefficient vanishes
    for i, c in enumerate(E.P.coeffs):
        if i % 2 == 1 and not c.is_zero() and prime.valuation(c) == 0:
            return False
        if i % 2 == 1 and not c.is_zero() and prime.valuation(c) < 1:
            return False
    return False


@dataclass(frozen=True)
class LocalModelData:
    """A local integral model with the diagonal change reaching it.

    The transform satisfies x = a*x_s + r, y = b*y_s + h(x) from the input
    equation's coordinates to the local equation's."""

    prime: PrimeIdeal
    equation: WeierstrassEq
    transform: EqTransform
    v_disc: int
    v_x_scale: int
    v_y_scale: int

    def __post_init__(self):
        g = self.equation.genus
        a, r, b, h = self.transform.diagonal_parts()
        assert self.v_x_scale == self.prime.valuation(a)
        assert self.v_y_scale == self.prime.valuation(b)

    def check_disc_law(self, input_v_disc: int) -> bool:
        g = self.equation.genus
        return input_v_disc == (
            4 * (2 * g + 1) * self.v_y_scale
            - 2 * (g + 1) * (2 * g + 1) * self.v_x_scale
            + self.v_disc
        )

    def to_json(self):
        a, r, b, h = self.transform.diagonal_parts()
        return {
            "prime": self.prime.to_json(),
            "equation": self.equation.to_json(),
            "transform": {
                "a": a.to_json(),
                "r": r.to_json(),
                "b": b.to_json(),
                "h": h.to_json(),
            },
            "v_disc": self.v_disc,
            "v_x_scale": self.v_x_scale,
            "v_y_scale": self.v_y_scale,
        }


def _digits(x: KElement, prime: PrimeIdeal, pi: KElement, k: int) -> tuple:
    """First k canonical pi-adic digits of a prime-integral element."""
    out = []
    cur = x
    for _ in range(k):
        d = prime.reduce(cur)
        out.append((d.a, d.b))
        cur = (cur - d) / pi
    return tuple(out)


def _clear_exponent(E: WeierstrassEq, prime: PrimeIdeal) -> int:
    """Largest m (may be negative) with x = pi^(2m) x', y = pi^((2g+1)m) y'
    keeping the equation integral; 0 if the equation is already integral
    and min(...) would only rescale upward."""
    g = E.genus
    m = 0
    for j in range(E.Q.degree + 1):
        c = E.Q.coeff(j)
        if c.is_zero():
            continue
        v = prime.valuation(c)
        den = 2 * g + 1 - 2 * j
        if den > 0 and v < 0:
            m = min(m, v // den)
    for i in range(E.P.degree + 1):
        c = E.P.coeff(i)
        if c.is_zero():
            continue
        v = prime.valuation(c)
        den = 4 * g + 2 - 2 * i
        if den > 0 and v < 0:
            m = min(m, v // den)
    return m


def _pointed_search(E: WeierstrassEq, prime: PrimeIdeal, pi: KElement):
    """Find a translation x -> x + r, y -> y + h(x) after which the weighted
    valuation conditions hold; returns (r, h, translated Q, translated P)
    with h a polynomial in the translated variable, or None."""
    g = E.genus
    f = E.field
    q_thr = [max(0, 2 * g + 1 - 2 * j) for j in range(g + 1)]
    p_thr = [max(0, 4 * g + 2 - 2 * i) for i in range(2 * g + 2)]
    depth = 4 * g + 2
    residues = prime.residues()
    char2 = prime.residue_char == 2
    if char2:
        h_digit_sets = [
            hd for hd in itertools.product(residues, repeat=g + 1)
        ]
    else:
        h_digit_sets = [None]

    def conditions_hold(Qc: Poly, Pc: Poly, lvl: int) -> bool:
        for j, w in enumerate(q_thr):
            need = min(w, lvl)
            if need > 0:
                c = Qc.coeff(j)
                if not c.is_zero() and prime.valuation(c) < need:
                    return False
        for i, w in enumerate(p_thr):
            need = min(w, lvl)
            if need > 0:
                c = Pc.coeff(i)
                if not c.is_zero() and prime.valuation(c) < need:
                    return False
        return True

    def state_key(Qc: Poly, Pc: Poly, lvl: int):
        parts = [lvl]
        for j, w in enumerate(q_thr):
            if w:
                parts.append(_digits(Qc.coeff(j), prime, pi, w))
        for i, w in enumerate(p_thr):
            if w:
                parts.append(_digits(Pc.coeff(i), prime, pi, w))
        return tuple(parts)

    seen: set = set()
    zero_poly = Poly.zero(f)

    def rec(Qc: Poly, Pc: Poly, lvl: int, r_acc: KElement, h_acc: Poly):
        if lvl == depth:
            return r_acc, h_acc, Qc, Pc
        key = state_key(Qc, Pc, lvl)
        if key in seen:
            return None
        seen.add(key)
        scale = pi ** lvl
        for delta in residues:
            r_step = delta * scale
            if r_step.is_zero():
                Qs, Ps, shift = Qc, Pc, None
            else:
                shift = Poly(f, [r_step, 1])
                Qs, Ps = Qc(shift), Pc(shift)
            for hd in h_digit_sets:
                hs = None
                if hd is not None:
                    hp = Poly(f, list(hd))
                    if not hp.is_zero():
                        hs = hp.scale(scale)
                if hs is None:
                    Qn, Pn = Qs, Ps
                else:
                    Qn = Qs + hs.scale(2)
                    Pn = Ps - hs * hs - Qs * hs
                if conditions_hold(Qn, Pn, lvl + 1):
                    r2 = r_acc + r_step
                    h2 = h_acc if shift is None else h_acc(shift)
                    if hs is not None:
                        h2 = h2 + hs
                    hit = rec(Qn, Pn, lvl + 1, r2, h2)
                    if hit is not None:
                        return hit
        return None

    if not conditions_hold(E.Q, E.P, 0):
        return None
    return rec(E.Q, E.P, 0, f.zero, zero_poly)


def minimize_pointed_at(E: WeierstrassEq, prime: PrimeIdeal) -> LocalModelData:
    """Minimal pointed equation at the prime, with the composite change."""
    if not E.pointed:
        raise ValueError("minimize_pointed_at needs a pointed equation")
    disc = E.discriminant()  # raises SingularGenericFiber when singular
    f, g = E.field, E.genus
    input_v = prime.valuation(disc)
    pi = prime.uniformizer()
    T = EqTransform.identity(f, g)
    cur = E

    if prime.residue_char != 2 and not cur.Q.is_zero():
        # complete the square: y = y' - Q/2 keeps the equation pointed
        h_cs = cur.Q.scale(-(f.elem(2).inverse()))
        step = EqTransform.diagonal(f, g, f.one, f.zero, f.one, h_cs)
        cur = transform(cur, step)
        T = step.compose(T)

    m = _clear_exponent(cur, prime)
    if m:
        step = EqTransform.diagonal(f, g, pi ** (2 * m), f.zero, pi ** ((2 * g + 1) * m))
        cur = transform(cur, step)
        T = step.compose(T)
    assert all(
        prime.valuation(c) >= 0
        for c in list(cur.P.coeffs) + list(cur.Q.coeffs)
        if not c.is_zero()
    )

    scale_step = EqTransform.diagonal(f, g, pi ** 2, f.zero, pi ** (2 * g + 1))
    while True:
        hit = _pointed_search(cur, prime, pi)
        if hit is None:
            break
        r_tot, h_new, Qt, Pt = hit
        h_old = h_new(Poly(f, [-r_tot, 1]))
        step = EqTransform.diagonal(f, g, f.one, r_tot, f.one, h_old)
        Pn = Poly(f, [Pt.coeff(i) * pi ** (2 * i - (4 * g + 2)) for i in range(2 * g + 2)])
        Qn = Poly(f, [Qt.coeff(j) * pi ** (2 * j - (2 * g + 1)) for j in range(g + 1)])
        cur = WeierstrassEq(f, g, Pn, Qn, True)
        T = scale_step.compose(step).compose(T)

    a, r, b, h = T.diagonal_parts()
    va = prime.valuation(a)
    vb = prime.valuation(b)
    v_disc = prime.valuation(cur.discriminant())
    data = LocalModelData(prime, cur, T, v_disc, va, vb)
    assert data.check_disc_law(input_v), "discriminant law violated"
    return data


# -- non-pointed minimization: search over quotient-line parameters --------


def _normalize_y(E: WeierstrassEq, prime: PrimeIdeal, pi: KElement):
    """(E', T_y) with E' integral at the prime and not further y-divisible.

    T_y is a diagonal transform with trivial x-part."""
    f, g = E.field, E.genus
    if prime.residue_char != 2:
        # complete the square, then divide 4P + Q^2 by the largest pi^(2k)
        F = E.P.scale(4) + E.Q * E.Q
        vmin = min(prime.valuation(c) for c in F.coeffs if not c.is_zero())
        k = vmin // 2
        h_cs = E.Q.scale(-(f.elem(2).inverse()))
        T = EqTransform.diagonal(f, g, f.one, f.zero, pi ** k, h_cs)
        return transform(E, T), T
    T = EqTransform.identity(f, g)
    cur = E
    m = 0
    for c in list(cur.Q.coeffs):
        if not c.is_zero():
            m = max(m, -prime.valuation(c))
    for c in list(cur.P.coeffs):
        if not c.is_zero():
            v = prime.valuation(c)
            if v < 0:
                m = max(m, (-v + 1) // 2)
    if m:
        step = EqTransform.diagonal(f, g, f.one, f.zero, pi ** (-m))
        cur = transform(cur, step)
        T = step.compose(T)
    residues = prime.residues()
    while True:
        if not _poly_is_zero_mod(prime, cur.Q):
            break
        found = None
        for hd in itertools.product(residues, repeat=g + 2):
            h0 = Poly(f, list(hd))
            test = cur.P - h0 * h0 - cur.Q * h0
            if _poly_is_zero_mod(prime, test, 2):
                found = h0
                break
        if found is None:
            break
        step = EqTransform.diagonal(f, g, f.one, f.zero, pi, found)
        cur = transform(cur, step)
        T = step.compose(T)
    return cur, T


def _lattice_key(T: EqTransform, prime: PrimeIdeal, pi: KElement):
    """Canonical label of the homothety class of the row lattice of T's
    matrix over the localization at the prime."""
    rows = [(T.a, T.b), (T.c, T.d)]

    def val(x: KElement):
        return None if x.is_zero() else prime.valuation(x)

    v1 = val(rows[0][1])
    v2 = val(rows[1][1])
    if v1 is None and v2 is None:
        raise ValueError("singular matrix")
    if v2 is None or (v1 is not None and v1 <= v2):
        w, z = rows[0], rows[1]
        vw = v1
    else:
        w, z = rows[1], rows[0]
        vw = v2
    z0 = z[0]
    if not z[1].is_zero():
        fac = z[1] / w[1]
        z0 = z[0] - fac * w[0]
    # unit-normalize: w = (t, pi^beta), z = (pi^alpha, 0)
    unit_w = w[1] / pi ** vw
    t = w[0] / unit_w
    beta = vw
    alpha = prime.valuation(z0)
    vt = None if t.is_zero() else prime.valuation(t)
    s = min(alpha, beta) if vt is None else min(alpha, beta, vt)
    alpha -= s
    beta -= s
    tshift = t / pi ** s if not t.is_zero() else t
    return (alpha, beta, _digits(tshift, prime, pi, alpha))


def minimize_at(E: WeierstrassEq, prime: PrimeIdeal, node_cap: int | None = None) -> LocalModelData:
    """Local model of least discriminant valuation, by exhaustive search
    over parameter states within the starting valuation bound."""
    disc = E.discriminant()
    f, g = E.field, E.genus
    input_v = prime.valuation(disc)
    pi = prime.uniformizer()
    cap = _node_cap(node_cap)
    w1, w2 = 4 * (2 * g + 1), 2 * (g + 1) * (2 * g + 1)

    def v_of_state(T: EqTransform) -> int:
        return input_v + w1 * prime.valuation(T.e) - w2 * prime.valuation(T.det)

    E0, T0 = _normalize_y(E, prime, pi)
    v0 = v_of_state(T0)
    key0 = _lattice_key(T0, prime, pi)
    states = {key0: (T0, E0, v0)}
    heap = [(v0, 0, key0)]
    counter = 1
    best_key, best_v = key0, v0
    bound = v0
    expanded: set = set()
    nodes = 0

    moves = [EqTransform(f, g, (1, -r, 0, pi), 1, Poly.zero(f)) for r in prime.residues()]
    moves.append(EqTransform(f, g, (0, 1, 1, 0), 1, Poly.zero(f)))

    while heap and best_v > 0:
        v, _, key = heapq.heappop(heap)
        if key in expanded or v > bound:
            continue
        expanded.add(key)
        nodes += 1
        if nodes > cap:
            raise SearchBudgetExceeded(f"minimize_at exceeded node cap {cap}")
        T, Ecur, vcur = states[key]
        if vcur < best_v:
            best_key, best_v = key, vcur
        for S in moves:
            Mn = S.compose(T)
            nkey = _lattice_key(Mn, prime, pi)
            if nkey in states:
                continue
            En_raw = transform(Ecur, S)
            En, Tyn = _normalize_y(En_raw, prime, pi)
            Tn = Tyn.compose(S).compose(T)
            vn = v_of_state(Tn)
            states[nkey] = (Tn, En, vn)
            if vn < best_v:
                best_key, best_v = nkey, vn
            if vn <= bound:
                heapq.heappush(heap, (vn, counter, nkey))
                counter += 1

    T, Ewin, vwin = states[best_key]
    # rotate by a local unit matrix so the composite x-change is affine
    if not T.c.is_zero():
        va = None if T.a.is_zero() else prime.valuation(T.a)
        vc = prime.valuation(T.c)
        m = vc if va is None else min(va, vc)
        v21 = T.c / pi ** m
        v22 = -T.a / pi ** m
        if not v22.is_zero() and prime.valuation(v22) == 0:
            V = (f.one, f.zero, v21, v22)
        else:
            V = (f.zero, f.one, v21, v22)
        S = EqTransform(f, g, V, 1, Poly.zero(f))
        Ewin = transform(Ewin, S)
        T = S.compose(T)
    assert T.c.is_zero()
    a, r, b, h = T.diagonal_parts()
    va = prime.valuation(a)
    vb = prime.valuation(b)
    v_disc = prime.valuation(Ewin.discriminant())
    data = LocalModelData(prime, Ewin, T, v_disc, va, vb)
    assert data.check_disc_law(input_v), "discriminant law violated"
    return data
