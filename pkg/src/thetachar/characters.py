"""N=4 superconformal denominators, characters, and parameter tables.

Characters ch^{(+/-)} in the NS and Ramond sectors are assembled as
exact SeriesRatio objects: a prefactor sgn(j) q^{j^2/M} x^{2j/M}, three
rescaled thetas at (M tau, z + j tau) over the fourth, and one plain
theta at (tau, z) over the other three.  The sign convention sets
sgn(j) = 1 for j > 0 and -1 for j <= 0, which matters exactly once, at
Ramond j = 0.

The denominators R^{(eps)}_{eps'} live in the same four-way grid: sign
+/- corresponds to eps = 1/2 resp. 0 and sector NS/R to eps' = 1/2
resp. 0, and

    R = (-1)^{2 eps} i eta^3 theta_11(tau, 2z) / theta_d(tau, z)^2,
    d = (1 - 2 eps', 1 - 2 eps).

The quadruple product turns that into the equivalent three-thetas-over-
one form; denominator() can return either and asserts their agreement
once per (sign, sector, order).

The reduction bookkeeping (hearts I-IV, levels (k1, k2), weights m,
m2) carries the conformal weight and spin tables, the equivalences
between hearts, the vanishing predicate, and the translation from nice
parameters (2k1 + k2 = M - 1) to the character label j.  The numerator
builders return the signed Psi blocks whose quotients by R reproduce
the characters; that consistency is enforced by the test suite through
cross-multiplied identities.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

from .mockpsi import HALF, PsiParams, psi_diag_ratio, psi_pair_ratio
from .qseries import (GaussianRational, SeriesRatio, UntrustedOrderError,
                      mul, product, restrict_window, scale_monomial)
from .theta import THETA_LABELS, eta_pow3_scaled, theta_product, theta_shifted

SECTORS = ("NS", "R")
SIGNS = ("+", "-")
HEARTS = ("I", "II", "III", "IV")


def _check_sector(sector):
    if sector not in SECTORS:
        raise ValueError("sector must be one of %s" % (SECTORS,))


def _check_sign(sign):
    if sign not in SIGNS:
        raise ValueError("sign must be one of %s" % (SIGNS,))


def sector_eps_prime(sector):
    """NS pairs with eps' = 1/2, Ramond with eps' = 0."""
    _check_sector(sector)
    return HALF if sector == "NS" else Fraction(0)


def sign_eps(sign):
    """Sign + pairs with eps = 1/2, sign - with eps = 0."""
    _check_sign(sign)
    return HALF if sign == "+" else Fraction(0)


def index_set(M, sector):
    """Admissible labels j for level M: the half-odd integers (NS) or
    integers (Ramond) with -(M-1)/2 <= j <= M/2.  Always M of them."""
    if M < 1 or int(M) != M:
        raise ValueError("M must be a positive integer")
    base = sector_eps_prime(sector)
    lo = Fraction(1 - M, 2)
    hi = Fraction(M, 2)
    n = math.ceil(lo - base)
    out = []
    while base + n <= hi:
        out.append(base + n)
        n += 1
    return tuple(out)


def central_charge(M):
    if M < 1 or int(M) != M:
        raise ValueError("M must be a positive integer")
    return Fraction(6 * (1 - M), M)


@dataclass(frozen=True)
class CharacterSpec:
    """One character label: level M, weight label j, sector, sign."""
    M: int
    j: Fraction
    sector: str
    sign: str

    def __post_init__(self):
        object.__setattr__(self, "j", Fraction(self.j))
        _check_sector(self.sector)
        _check_sign(self.sign)
        if self.M < 1:
            raise ValueError("M must be a positive integer")
        if self.j not in index_set(self.M, self.sector):
            raise ValueError("j = %s outside the level-%d %s index set"
                             % (self.j, self.M, self.sector))


def h_s_values(spec):
    """Conformal weight h and spin s of the labelled representation."""
    j, M = spec.j, spec.M
    if spec.sector == "NS":
        return (j * j / M + Fraction(1, 4 * M) - HALF, 2 * j / M - 1)
    return (j * j / M + Fraction(1, 4 * M) - Fraction(1, 4), 2 * j / M)


def denominator_label(sign, sector):
    """The distinguished theta label d = (1-2eps', 1-2eps)."""
    a = 0 if sector == "NS" else 1
    b = 0 if sign == "+" else 1
    return "%d%d" % (a, b)


def _denominator_eta_form(sign, sector, q_order):
    c = GaussianRational(0, -1 if sign == "+" else 1)
    num = mul(eta_pow3_scaled(1, q_order),
              theta_shifted("11", q_order, 1, 2, Fraction(0), Fraction(0)))
    num = scale_monomial(num, 0, 0, c)
    d = theta_product(denominator_label(sign, sector), q_order)
    return SeriesRatio(num, mul(d, d))


def _denominator_theta_form(sign, sector, q_order):
    c = GaussianRational(0, -1 if sign == "+" else 1)
    d = denominator_label(sign, sector)
    num = product([theta_product(lab, q_order)
                   for lab in THETA_LABELS if lab != d])
    num = scale_monomial(num, 0, 0, c)
    return SeriesRatio(num, theta_product(d, q_order))


@functools.lru_cache(maxsize=None)
def _denominator_forms_agree(sign, sector, q_order):
    lhs = _denominator_eta_form(sign, sector, q_order)
    rhs = _denominator_theta_form(sign, sector, q_order)
    return lhs.equals(rhs, q_order)


def denominator(sign, sector, q_order, form="eta"):
    """Exact SeriesRatio for R^{(eps)}_{eps'}.

    form "eta" returns (+/- i eta^3 theta_11(2z), theta_d^2); form
    "theta" multiplies out to the three-thetas-over-one shape and
    asserts (once per argument triple) that the two agree.
    """
    _check_sign(sign)
    _check_sector(sector)
    q_order = Fraction(q_order)
    if q_order <= 0:
        raise ValueError("q_order must be positive")
    if form == "eta":
        return _denominator_eta_form(sign, sector, q_order)
    if form == "theta":
        if not _denominator_forms_agree(sign, sector, q_order):
            raise AssertionError(
                "denominator forms disagree for %s %s" % (sign, sector))
        return _denominator_theta_form(sign, sector, q_order)
    raise ValueError("form must be 'eta' or 'theta'")


# (sector, sign) -> (overall factor on sgn(j), rescaled numerator
# labels, rescaled denominator label, plain numerator label, plain
# denominator labels)
_CHARACTER_TABLE = {
    ("NS", "+"): (-1, ("00", "01", "11"), "10", "00", ("01", "10", "11")),
    ("NS", "-"): (+1, ("00", "01", "10"), "11", "01", ("00", "10", "11")),
    ("R", "+"): (-1, ("00", "01", "11"), "10", "10", ("00", "01", "11")),
    ("R", "-"): (-1, ("00", "01", "10"), "11", "11", ("00", "01", "10")),
}


def sgn(j):
    """1 for j > 0, -1 for j <= 0."""
    return 1 if j > 0 else -1


def character_ratio(spec, q_order):
    """Exact SeriesRatio for the character of the labelled module."""
    q_order = Fraction(q_order)
    if q_order <= 0:
        raise ValueError("q_order must be positive")
    M, j = spec.M, spec.j
    face, kept, moved, plain_num, plain_den = \
        _CHARACTER_TABLE[(spec.sector, spec.sign)]
    build = q_order + j * j / M
    num_factors = [theta_shifted(lab, build, M, 1, j, Fraction(0))
                   for lab in kept]
    num_factors.append(theta_product(plain_num, build))
    num = product(num_factors)
    num = scale_monomial(num, j * j / M, 2 * j / M, face * sgn(j))
    den_factors = [theta_shifted(moved, build, M, 1, j, Fraction(0))]
    den_factors.extend(theta_product(lab, build) for lab in plain_den)
    return SeriesRatio(num, product(den_factors))


def character_series(spec, q_order, x_window=None):
    """q-expansion of the character in the descending-x convention.

    The window defaults to (s - 4, s + 2) around the leading x-exponent
    s.  The lowest trusted q-exponent is asserted to equal
    -c/24 + h before the window is restricted to the request.
    """
    q_order = Fraction(q_order)
    h, s = h_s_values(spec)
    lead_q = -central_charge(spec.M) / 24 + h
    if x_window is None:
        x_window = (s - 4, s + 2)
    lo, hi = Fraction(x_window[0]), Fraction(x_window[1])
    if lo > hi:
        raise ValueError("empty x window")
    hull = (min(lo, s), max(hi, s))
    extra = Fraction(0)
    last = None
    for _ in range(8):
        try:
            ratio = character_ratio(spec, q_order + extra)
            ser = ratio.as_series(q_order, hull)
            break
        except UntrustedOrderError as exc:
            last = exc
            extra = extra * 2 if extra else Fraction(1)
    else:
        raise last
    stored = ser.terms()
    if stored:
        low = min(qe for qe, _xe, _c in stored)
        if low != lead_q:
            raise AssertionError(
                "character expansion starts at q^%s, expected -c/24+h = %s"
                % (low, lead_q))
    return restrict_window(ser, (lo, hi))


@dataclass(frozen=True)
class ReductionParams:
    """Level/weight bookkeeping of one reduced module: heart I-IV,
    shifts (k1, k2), weights (m, m2), level M, twisted or not."""
    M: int
    m: int
    m2: int
    k1: int
    k2: int
    heart: str
    twisted: bool

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M must be a positive integer")
        if self.m < 1:
            raise ValueError("m must be a positive integer")
        if not 0 <= self.m2 <= self.m:
            raise ValueError("m2 must satisfy 0 <= m2 <= m")
        if self.heart not in HEARTS:
            raise ValueError("heart must be one of %s" % (HEARTS,))
        k1, k2, M = self.k1, self.k2, self.M
        tot = 2 * k1 + k2
        ok = {
            "I": k1 >= 0 and k2 >= 0 and tot <= M - 1,
            "II": k1 >= 1 and k2 >= 1 and tot <= M,
            "III": k1 >= 0 and k2 >= 1 and tot <= M - 1,
            "IV": k1 >= 1 and k2 >= 0 and tot <= M,
        }[self.heart]
        if not ok:
            raise ValueError("(k1, k2) = (%d, %d) out of range for heart %s "
                             "at M = %d" % (k1, k2, self.heart, M))


def reduction_hs(params):
    """Exact (h, s) of the reduced module, by heart and twist."""
    p = params
    mM = Fraction(p.m, p.M)
    k1, k2, m2 = p.k1, p.k2, p.m2
    if not p.twisted:
        if p.heart in ("I", "IV"):
            s = -mM * k2 + m2
        else:
            s = mM * k2 - m2 - 2
        if p.heart in ("I", "III"):
            a, b = k1 + HALF, k1 + k2 + HALF
        else:
            a, b = k1 - HALF, k1 + k2 - HALF
        h = -mM * a * b + (m2 + 1) * a - (-mM + 2) / 4
        return (h, s)
    if p.heart in ("I", "IV"):
        s = mM * (k2 + 1) - m2 - 1
    else:
        s = -mM * (k2 - 1) + m2 + 1
    a = {"I": k1, "II": k1, "III": k1 + 1, "IV": k1 - 1}[p.heart]
    b = {"I": k1 + k2 + 1, "II": k1 + k2 - 1,
         "III": k1 + k2, "IV": k1 + k2}[p.heart]
    h = -mM * a * b + (m2 + 1) * a - (-mM + 1) / 4
    return (h, s)


def vanishes(params):
    """True iff the reduced module is zero: heart I or III with
    2k1 + k2 + 1 = M and m2 = m."""
    p = params
    return (p.heart in ("I", "III") and 2 * p.k1 + p.k2 + 1 == p.M
            and p.m2 == p.m)


def _check_nice_range(M, k1, heart):
    if heart not in ("I", "III"):
        raise ValueError("nice parameters exist only for hearts I and III")
    top = M - 1 if heart == "I" else M - 2
    if not 0 <= 2 * k1 <= top:
        raise ValueError("k1 = %d out of the nice range for heart %s at "
                         "M = %d" % (k1, heart, M))


def nice_param_to_j(M, k1, heart, twisted):
    """Character label j of the nice reduced module (2k1 + k2 = M - 1).

    Cross-checks that (h, s) from the reduction tables at m = 1,
    m2 = 0 match the direct character values at the returned j.
    """
    _check_nice_range(M, k1, heart)
    if not twisted:
        j = k1 + HALF if heart == "I" else -(k1 + HALF)
        sector = "NS"
    else:
        j = Fraction(-k1) if heart == "I" else Fraction(k1 + 1)
        sector = "R"
    spec = CharacterSpec(M, j, sector, "+")
    got = reduction_hs(ReductionParams(M, 1, 0, k1, M - 1 - 2 * k1,
                                       heart, twisted))
    want = h_s_values(spec)
    if got != want:
        raise AssertionError("reduction (h, s) = %s disagrees with the "
                             "character table %s at j = %s" % (got, want, j))
    return j


# (heart, sign, twisted) -> overall sign of the Psi block; the indices
# and half-characteristics follow from the row
_NICE_SIGNS = {
    ("I", "+", False): 1, ("III", "+", False): -1,
    ("I", "-", False): -1, ("III", "-", False): 1,
    ("I", "+", True): -1, ("III", "+", True): 1,
    ("I", "-", True): -1, ("III", "-", True): 1,
}


def nice_numerator(M, k1, heart, sign, twisted, q_order):
    """Signed diagonal Psi block equal to (denominator x character) for
    the nice reduced module."""
    _check_sign(sign)
    j = nice_param_to_j(M, k1, heart, twisted)
    eps = sign_eps(sign)
    eps_prime = HALF if not twisted else Fraction(0)
    ratio = psi_diag_ratio(PsiParams(M, j, j, eps, eps_prime), q_order)
    face = _NICE_SIGNS[(heart, sign, twisted)]
    if face == 1:
        return ratio
    return ratio.scale(GaussianRational(-1, 0))


def dd_indices(M, k1, k2, heart, twisted):
    """Psi indices (j, k) of the general (k1, k2) numerator row."""
    if heart not in ("I", "III"):
        raise ValueError("numerator rows exist only for hearts I and III")
    if not twisted:
        if heart == "I":
            return (k1 + HALF, M - (k1 + k2 + HALF))
        return (M - (k1 + HALF), k1 + k2 + HALF)
    if heart == "I":
        return (Fraction(M - k1), Fraction(k1 + k2 + 1))
    return (Fraction(k1 + 1), Fraction(M - (k1 + k2)))


_DD_SIGNS = {
    ("I", "+", False): 1, ("III", "+", False): -1,
    ("I", "-", False): -1, ("III", "-", False): 1,
    ("I", "+", True): -1, ("III", "+", True): 1,
    ("I", "-", True): -1, ("III", "-", True): 1,
}


def dd_numerator(M, k1, k2, heart, sign, twisted, q_order):
    """Signed off-diagonal Psi block (denominator x character) for a
    general in-range (k1, k2); reduces to nice_numerator when
    2k1 + k2 = M - 1 by index periodicity."""
    _check_sign(sign)
    ReductionParams(M, 1, 0, k1, k2, heart, twisted)
    j, k = dd_indices(M, k1, k2, heart, twisted)
    eps = sign_eps(sign)
    eps_prime = HALF if not twisted else Fraction(0)
    ratio = psi_pair_ratio(PsiParams(M, j, k, eps, eps_prime), q_order)
    face = _DD_SIGNS[(heart, sign, twisted)]
    if face == 1:
        return ratio
    return ratio.scale(GaussianRational(-1, 0))
