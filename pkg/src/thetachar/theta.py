"""Jacobi theta functions with half-integer characteristics, and the
Dedekind eta function.

Conventions.  For characteristics a, b in {0, 1} and q = e^{2 pi i tau},
x = e^{2 pi i z},

    theta_ab(tau, z) = sum_{n in Z} q^{(n + a/2)^2 / 2}
                                    x^{n + a/2} e^{pi i b (n + a/2)}

so theta_00 is the plain sum over integers, theta_01 alternates,
theta_10 runs over half-integers and theta_11 is i times the alternating
half-integer sum.  Fractional q-powers always mean exp(2 pi i tau e).

Normative series construction is by the convergent products

    theta_00 = prod (1 - q^n)(1 + x q^{n-1/2})(1 + x^{-1} q^{n-1/2})
    theta_01 = prod (1 - q^n)(1 - x q^{n-1/2})(1 - x^{-1} q^{n-1/2})
    theta_10 = q^{1/8} x^{1/2} prod (1 - q^n)(1 + x q^n)(1 + x^{-1} q^{n-1})
    theta_11 = i q^{1/8} x^{1/2} prod (1 - q^n)(1 - x q^n)(1 - x^{-1} q^{n-1})

with n >= 1, and eta = q^{1/24} prod (1 - q^n).  The lattice sums are
kept as an independent cross-check (theta_sum).

Numerics use mpmath at the caller's working precision: direct lattice
summation with an explicit geometric tail bound, so every returned value
is accurate to the requested absolute error.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from mpmath import mp

from .qseries import (
    CoefficientRingError, JacobiSeries, GaussianRational, I_UNIT, add, mul,
    product, scale_monomial, subst_scale_tau, truncate,
)

THETA_LABELS = ("00", "01", "10", "11")

# working decimal precision for the numeric verifier layer; intermediate
# theta values under rescaled arguments reach magnitudes around e^30, so
# double precision is not enough for 1e-9 residual targets
DEFAULT_DPS = 40


class TailBoundError(ArithmeticError):
    """A numeric lattice sum could not meet the requested tail bound."""


def _check_label(label):
    if label not in THETA_LABELS:
        raise ValueError("unknown theta label %r, want one of %s"
                         % (label, THETA_LABELS))


@lru_cache(maxsize=None)
def theta_product(label, q_order):
    """Product-form theta_label as an exact series trusted below q_order."""
    _check_label(label)
    q_order = Fraction(q_order)
    a, b = int(label[0]), int(label[1])
    sx = -1 if b else 1

    def two_term(qe2, xe2, c2):
        return add(JacobiSeries.one(q_order),
                   JacobiSeries.monomial(qe2, xe2, c2, q_order))

    s = JacobiSeries.one(q_order)
    n = 1
    while True:
        live = False
        if n < q_order:
            s = mul(s, two_term(n, 0, -1))
            live = True
        if a == 0:
            e = Fraction(2 * n - 1, 2)
            if e < q_order:
                s = mul(s, two_term(e, 1, sx))
                s = mul(s, two_term(e, -1, sx))
                live = True
        else:
            if n < q_order:
                s = mul(s, two_term(n, 1, sx))
                live = True
            if n - 1 < q_order:
                s = mul(s, two_term(n - 1, -1, sx))
                live = True
        if not live:
            break
        n += 1
    if a == 1:
        coeff = I_UNIT if b == 1 else GaussianRational(1)
        s = scale_monomial(s, Fraction(1, 8), Fraction(1, 2), coeff)
    return s


@lru_cache(maxsize=None)
def theta_sum(label, q_order):
    """Lattice-sum theta_label, the independent cross-check form."""
    _check_label(label)
    q_order = Fraction(q_order)
    a, b = int(label[0]), int(label[1])
    n_max = math.isqrt(max(0, int(2 * q_order))) + 3
    terms = {}
    for m in range(-n_max, n_max + 1):
        h = Fraction(2 * m + a, 2)
        e = h * h / 2
        if e >= q_order:
            continue
        c = GaussianRational(1)
        if b:
            c = c.times_i_power(int(2 * h))
        terms[(e * 8, h * 2)] = c
    return JacobiSeries(8, 2, int(Fraction(q_order) * 8), terms)


@lru_cache(maxsize=None)
def eta(q_order):
    """Dedekind eta = q^{1/24} prod (1 - q^n), trusted below q_order."""
    q_order = Fraction(q_order)
    s = JacobiSeries.one(q_order)
    n = 1
    while n < q_order:
        s = mul(s, add(JacobiSeries.one(q_order),
                       JacobiSeries.monomial(n, 0, -1, q_order)))
        n += 1
    return scale_monomial(s, Fraction(1, 24), 0, 1)


@lru_cache(maxsize=None)
def eta_pow3_scaled(m, q_order):
    """eta(m tau)^3 trusted below q_order, for positive integer m."""
    q_order = Fraction(q_order)
    base_order = Fraction(math.ceil(q_order / m))
    e = eta(base_order)
    e3 = mul(mul(e, e), e)
    return truncate(subst_scale_tau(e3, m), q_order)


@lru_cache(maxsize=None)
def theta_shifted(label, q_order, tau_scale=1, z_scale=1, r_tau=Fraction(0),
                  r_one=Fraction(0)):
    """theta_label(tau_scale*tau, z_scale*z + r_tau*tau + r_one) as an
    exact series trusted below q_order.

    Built straight from the product form with the shifted argument
    absorbed into every two-term factor, so the trust bound needs no
    assumption about the support: once each factor of q-exponent below W
    is multiplied in, the omitted tail is 1 + O(q^W) and only touches
    exponents at or above W plus the partial product's valuation.  W is
    raised until that sound bound covers the request, then the result is
    truncated to exactly q_order.

    With x' = e^{2 pi i (z_scale*z + r_tau*tau + r_one)} the factor
    (1 + s x' q^{tau_scale e}) becomes
    (1 + s zeta x^{z_scale} q^{tau_scale e + r_tau}) for the phase
    zeta = e^{2 pi i r_one}, which must be a power of i (and for the
    half-characteristic prefactor x'^{1/2}, a power of -1), otherwise
    CoefficientRingError is raised.
    """
    _check_label(label)
    q_order = Fraction(q_order)
    ts = int(tau_scale)
    zs = int(z_scale)
    if ts < 1 or zs < 1:
        raise ValueError("tau_scale and z_scale must be positive integers")
    r_tau = Fraction(r_tau)
    r_one = Fraction(r_one)
    if (4 * r_one).denominator != 1:
        raise CoefficientRingError(
            "z-shift constant %s is not a multiple of 1/4" % (r_one,))
    k4 = int(4 * r_one)
    a, b = int(label[0]), int(label[1])
    sx = -1 if b else 1
    c_fwd = GaussianRational(sx).times_i_power(k4)
    c_bwd = GaussianRational(sx).times_i_power(-k4)
    if a == 1:
        if k4 % 2:
            raise CoefficientRingError(
                "half-power phase exp(pi i %s) is not a power of i"
                % (r_one,))
        pre_q = Fraction(ts, 8) + r_tau / 2
        pre_x = Fraction(zs, 2)
        pre_c = GaussianRational(1).times_i_power((1 if b else 0) + k4 // 2)
    else:
        pre_q = Fraction(0)
        pre_x = Fraction(0)
        pre_c = GaussianRational(1)

    work = max(Fraction(1), q_order - pre_q)
    for _ in range(64):
        factors = []
        n = 1
        while True:
            live = False
            if ts * n < work:
                factors.append((Fraction(ts * n), 0, GaussianRational(-1)))
                live = True
            if a == 0:
                e_half = Fraction(ts * (2 * n - 1), 2)
                if e_half + r_tau < work:
                    factors.append((e_half + r_tau, zs, c_fwd))
                    live = True
                if e_half - r_tau < work:
                    factors.append((e_half - r_tau, -zs, c_bwd))
                    live = True
            else:
                if ts * n + r_tau < work:
                    factors.append((ts * n + r_tau, zs, c_fwd))
                    live = True
                if ts * (n - 1) - r_tau < work:
                    factors.append((ts * (n - 1) - r_tau, -zs, c_bwd))
                    live = True
            if not live:
                break
            n += 1
        big = work + sum(max(Fraction(0), -e) for e, _, _ in factors) + 1
        s = product([add(JacobiSeries.one(big),
                         JacobiSeries.monomial(e, xe, cf, big))
                     for e, xe, cf in factors], seed_order=big)
        achieved = min(s.q_order, work + s.q_valuation_bound()) + pre_q
        if achieved >= q_order:
            if pre_q or pre_x or pre_c != 1:
                s = scale_monomial(s, pre_q, pre_x, pre_c)
            return truncate(s, q_order)
        work += max(Fraction(1), q_order - achieved)
    raise RuntimeError("no work order reached %s for theta_%s at scale %d, "
                       "shift (%s, %s)" % (q_order, label, ts, r_tau, r_one))


# ---------------------------------------------------------------------
# validated numerics
# ---------------------------------------------------------------------

def theta_numeric(label, tau, z, abs_err=None):
    """theta_label(tau, z) by direct lattice summation.

    Terms are added symmetrically outward until a geometric majorant
    bounds both remaining tails below abs_err (default 10^-(dps-5) at
    the working precision).  Raises TailBoundError when the bound cannot
    be met within a fixed term budget.
    """
    _check_label(label)
    tau = mp.mpc(tau)
    z = mp.mpc(z)
    y = mp.im(tau)
    if y <= 0:
        raise ValueError("tau must lie in the upper half plane")
    if abs_err is None:
        abs_err = mp.mpf(10) ** (-(mp.dps - 5))
    a, b = int(label[0]), int(label[1])
    pit = mp.pi * 1j * tau
    w = 2j * mp.pi * (z + mp.mpf(b) / 2)
    u = mp.im(z)

    def term(h):
        return mp.exp(pit * h * h + w * h)

    def mag(h):
        return mp.exp(-mp.pi * y * h * h - 2 * mp.pi * u * h)

    half_a = mp.mpf(a) / 2
    total = mp.mpc(0)
    n = 0
    n_cap = 100000
    while True:
        total += term(n + half_a)
        total += term(-n - 1 + half_a)
        hp = n + 1 + half_a        # first unsummed h on each side
        hn = -n - 2 + half_a
        tp, tn = mag(hp), mag(hn)
        rp = mag(hp + 1) / tp      # ratios shrink monotonically outward
        rn = mag(hn - 1) / tn
        if rp < mp.mpf("0.9") and rn < mp.mpf("0.9"):
            if tp / (1 - rp) + tn / (1 - rn) < abs_err:
                break
        n += 1
        if n > n_cap:
            raise TailBoundError("theta tail bound %s not reached within "
                                 "%d terms" % (abs_err, n_cap))
    return total


def eta_numeric(tau):
    """Dedekind eta via the q-Pochhammer product at working precision."""
    tau = mp.mpc(tau)
    if mp.im(tau) <= 0:
        raise ValueError("tau must lie in the upper half plane")
    q = mp.exp(2j * mp.pi * tau)
    return mp.exp(2j * mp.pi * tau / 24) * mp.qp(q)
