"""Imaginary-quadratic bookkeeping: class numbers, orbit counts, singular-point witnesses."""

import re
from fractions import Fraction
from math import floor, gcd, isqrt
from tokenize import TokenError

from loguru import logger
from sympy import Poly, Rational, Symbol, factorint
from sympy.core.sympify import SympifyError
from sympy.parsing.sympy_parser import parse_expr

from ..core.exceptions import BianchiKError
from ..models.algebra import IntMatrix
from ..models.arith import ImagQuadField, QuadInt, QuadPoint, SingularWitness
from .linalg import elementary_divisors

_POINT_CHARS = re.compile(r"[0-9s+\-*/() ]+")


class NotSquarefree(BianchiKError):
    """Raised when m is not a squarefree positive integer."""

    pass


class QuadPointParseError(BianchiKError):
    """Raised when a boundary point cannot be read as an element of Q(√−m)."""

    pass


def is_squarefree(m: int) -> bool:
    """True for squarefree m ≥ 1.

    Example:
        >>> is_squarefree(5), is_squarefree(12), is_squarefree(1)
        (True, False, True)
    """
    if m < 1:
        return False
    return all(e == 1 for e in factorint(m).values())


def imag_quad_field(m: int) -> ImagQuadField:
    """The field Q(√−m).

    Raises:
        NotSquarefree: If m is not squarefree
    """
    if not is_squarefree(m):
        raise NotSquarefree(f"m = {m} is not a squarefree positive integer")
    return ImagQuadField(m=m)


def reduced_forms(disc: int) -> list[tuple[int, int, int]]:
    """Reduced primitive positive definite forms (a, b, c) of discriminant disc.

    Reduced means |b| ≤ a ≤ c, with b ≥ 0 whenever |b| = a or a = c.

    Example:
        >>> reduced_forms(-24)
        [(1, 0, 6), (2, 0, 3)]
    """
    if disc >= 0 or disc % 4 not in (0, 1):
        raise ValueError(f"{disc} is not a negative discriminant")
    forms = []
    a = 1
    # reduced forms satisfy 3a² ≤ |disc|
    while 3 * a * a <= -disc:
        for b in range(-a + 1, a + 1):
            if (b - disc) % 2:
                continue
            numerator = b * b - disc
            if numerator % (4 * a):
                continue
            c = numerator // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            if gcd(gcd(a, b), c) == 1:
                forms.append((a, b, c))
        a += 1
    return forms


def class_number(m: int) -> int:
    """Class number of Q(√−m) by counting reduced forms of the field discriminant.

    Raises:
        NotSquarefree: If m is not squarefree

    Example:
        >>> class_number(5)
        2
        >>> class_number(163)
        1
    """
    field = imag_quad_field(m)
    h = len(reduced_forms(field.disc))
    logger.debug("Class number computed", m=m, disc=field.disc, h=h)
    return h


def orbit_counts(m: int) -> tuple[int, int]:
    """(cusp orbits, singular-point orbits) = (k, k − 1).

    Cusps biject with the class group; singular orbits with its nontrivial elements.
    """
    k = class_number(m)
    return k, k - 1


def normalize_point(field: ImagQuadField, numerator: QuadInt, denominator: QuadInt) -> QuadPoint:
    """Reduce λ/μ by the common integer content and pick a canonical unit multiple."""
    content = gcd(gcd(numerator[0], numerator[1]), gcd(denominator[0], denominator[1]))
    if content > 1:
        numerator = (numerator[0] // content, numerator[1] // content)
        denominator = (denominator[0] // content, denominator[1] // content)
    best = max(
        (field.mul(u, denominator), field.mul(u, numerator)) for u in field.units()
    )
    return QuadPoint(field=field, numerator=best[1], denominator=best[0])


def parse_quad_point(m: int, text: str) -> QuadPoint:
    """Read a point of Q(√−m) written as a rational expression in s = √−m.

    Raises:
        NotSquarefree: If m is not squarefree
        QuadPointParseError: If text is not of the form x + y·s with rational x, y

    Example:
        >>> p = parse_quad_point(5, "(1+s)/2")
        >>> p.numerator, p.denominator
        ((1, 1), (2, 0))
    """
    field = imag_quad_field(m)
    if not _POINT_CHARS.fullmatch(text):
        raise QuadPointParseError(f"{text!r} may only contain digits, s, spaces and + - * / ( )")
    s = Symbol("s")
    try:
        expr = parse_expr(text, local_dict={"s": s})
    except (SympifyError, SyntaxError, TokenError, TypeError, ValueError) as e:
        raise QuadPointParseError(f"cannot parse {text!r}") from e
    if not expr.is_polynomial(s):
        raise QuadPointParseError(f"{text!r} must be polynomial in s")
    poly = Poly(expr, s).rem(Poly(s**2 + m, s))
    coeffs = list(reversed(poly.all_coeffs())) + [0, 0]
    try:
        x, y = (Rational(coeffs[k]) for k in (0, 1))
    except TypeError as e:
        raise QuadPointParseError(f"{text!r} has non-rational coefficients") from e
    n = int(x.q) * int(y.q) // gcd(int(x.q), int(y.q))
    nx, ny = int(x * n), int(y * n)
    if field.half_integral:
        # s = 2ω − 1
        numerator = (nx - ny, 2 * ny)
    else:
        numerator = (nx, ny)
    return normalize_point(field, numerator, (n, 0))


def are_coprime(field: ImagQuadField, c: QuadInt, d: QuadInt) -> bool:
    """Whether the ideal (c, d) is the whole ring.

    The ideal is the Z-lattice spanned by c, d, ωc, ωd; it is the ring exactly
    when its Smith diagonal is (1, 1).
    """
    omega = (0, 1)
    generators = [c, d, field.mul(omega, c), field.mul(omega, d)]
    lattice = IntMatrix.from_rows([[g[0] for g in generators], [g[1] for g in generators]])
    return elementary_divisors(lattice) == [1, 1]


def _element_key(field: ImagQuadField, x: QuadInt) -> tuple[int, int, int, int]:
    return (field.norm(x), abs(x[0]) + abs(x[1]), -x[0], -x[1])


def elements_up_to_norm(field: ImagQuadField, bound: Fraction | int) -> list[QuadInt]:
    """All ring elements of norm ≤ bound, in the deterministic search order."""
    limit = Fraction(bound)
    b_max = isqrt(int(4 * limit / field.m) + 1) + 1
    a_max = isqrt(int(limit) + 1) + b_max + 1
    found = [
        (a, b)
        for b in range(-b_max, b_max + 1)
        for a in range(-a_max, a_max + 1)
        if field.norm((a, b)) <= limit
    ]
    return sorted(found, key=lambda x: _element_key(field, x))


def _s_coordinates(field: ImagQuadField, x: QuadInt) -> tuple[Fraction, Fraction]:
    """(p, q) with x = p + q·s, s = √−m."""
    a, b = x
    if field.half_integral:
        return Fraction(2 * a + b, 2), Fraction(b, 2)
    return Fraction(a), Fraction(b)


def _near(field: ImagQuadField, target: tuple[Fraction, Fraction]) -> list[QuadInt]:
    """A window of ring elements holding every one within distance 1 of target."""
    p, q = target
    if field.half_integral:
        # d = (a + b/2) + (b/2)·s
        return [
            (a, b)
            for b in range(floor(2 * q) - 2, floor(2 * q) + 4)
            for a in range(floor(p - Fraction(b, 2)) - 1, floor(p - Fraction(b, 2)) + 3)
        ]
    return [(a, b) for b in range(floor(q) - 1, floor(q) + 3) for a in range(floor(p) - 1, floor(p) + 3)]


def singular_violation_search(point: QuadPoint, bound: int) -> SingularWitness | None:
    """Search for coprime (c, d), c ≠ 0, with |c·D − d| < 1.

    Scans |c|² ≤ bound in a fixed order; for each c only the d within distance 1
    of c·D are tried, smallest first. Comparisons are exact: |cD − d|² < 1 is
    tested as N(cλ − dμ) < N(μ). A None result certifies only that no witness
    exists within the bound; it never asserts that D is singular.

    Raises:
        ValueError: If bound < 1

    Example:
        >>> origin = parse_quad_point(5, "0")
        >>> singular_violation_search(origin, 10).c
        (1, 0)
    """
    if bound < 1:
        raise ValueError("bound must be at least 1")
    field = point.field
    lam, mu = point.numerator, point.denominator
    mu_norm = field.norm(mu)
    mu_p, mu_q = _s_coordinates(field, mu)
    cs = [c for c in elements_up_to_norm(field, bound) if c != (0, 0)]
    logger.debug("Singular-point search", m=field.m, bound=bound, c_candidates=len(cs))
    for c in cs:
        c_lam = field.mul(c, lam)
        lam_p, lam_q = _s_coordinates(field, c_lam)
        # c·D = c·λ·conj(μ) / N(μ)
        target = (
            (lam_p * mu_p + field.m * lam_q * mu_q) / mu_norm,
            (lam_q * mu_p - lam_p * mu_q) / mu_norm,
        )
        gaps = {d: field.norm(field.sub(c_lam, field.mul(d, mu))) for d in _near(field, target)}
        for d in sorted((d for d, gap in gaps.items() if gap < mu_norm), key=lambda x: _element_key(field, x)):
            if are_coprime(field, c, d):
                gap = gaps[d]
                return SingularWitness(
                    c=c,
                    d=d,
                    distance_squared_num=Fraction(gap, mu_norm).numerator,
                    distance_squared_den=Fraction(gap, mu_norm).denominator,
                )
    return None
