"""Radial profile of the rotationally symmetric gradient soliton on C^n.

With t = log|z|^2 the metric potential u(t) has derivative phi(t) = u'(t),
and phi is pinned down by the transcendental relation

    sum_{k=0}^{n-1} (-1)^(n-k-1) (n!/k!) phi^k e^phi  =  e^(n t) + (-1)^(n-1) n!

whose left side is strictly increasing in phi (its phi-derivative is
n phi^(n-1) e^phi > 0), so the positive root is unique and bracketing is
safe.  Differentiating the relation gives the first-order form

    phi^(n-1) phi' e^phi = e^(n t)

from which all derivatives follow in closed form:

    phi'  = exp(n t - (n-1) log phi - phi)
    phi'' = phi' (n - phi' - (n-1) phi'/phi)

For n = 1 the root is phi = log(1 + e^t) (the cigar metric).  The soliton
potential is f(t) = n t - (n-1) log phi - log phi', with f' = phi' and
f -> 0 as t -> -infinity under this normalization.

Numerical notes.  The defining relation is evaluated three ways depending on
where the root lives:

* t < -30: phi = e^t to full precision (the next correction is e^(2t)/(n+1)).
* small roots (phi <= ~0.8): the left side minus its value at phi = 0 is the
  entire function S(phi) = sum_{m>=n} s_m phi^m with exactly computable
  coefficients and leading term phi^n.  Solving log phi + log(S/phi^n)/n = t
  by Newton avoids the catastrophic cancellation that makes the raw
  polynomial-times-exponential form unusable for small phi when n >= 2.
* otherwise: safeguarded Newton (bisection fallback) on the raw form, or on
  its logarithm once n t > 600 where e^(n t) overflows.

Residual tolerances are relative to the natural scale e^(n t) + n! of the
relation; an absolute residual is meaningless once e^(n t) dwarfs 1 ulp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad


class SolverError(RuntimeError):
    """A root solve or quadrature failed to converge; no iterate is returned."""


_T_TAIL = -30.0         # below this, phi = e^t is exact to working precision
_NT_LOGSPACE = 600.0    # above this n*t, solve phi + log P(phi) = n*t instead
_SERIES_PHI = 0.8       # series branch owns roots up to this size
_SERIES_TERMS = 70
_EXP_RANGE = 700.0


def _poly_coeffs(n: int) -> list[float]:
    """Coefficients c_k = (-1)^(n-k-1) n!/k! of the polynomial factor."""
    nfact = math.factorial(n)
    return [((-1.0) ** (n - k - 1)) * nfact / math.factorial(k) for k in range(n)]


def _poly(c: list[float], x: float) -> float:
    acc = 0.0
    for ck in reversed(c):
        acc = acc * x + ck
    return acc


def _poly_deriv(c: list[float], x: float) -> float:
    acc = 0.0
    for k in range(len(c) - 1, 0, -1):
        acc = acc * x + k * c[k]
    return acc


def _series_coeffs(n: int, terms: int = _SERIES_TERMS) -> list[float]:
    """Taylor coefficients s_m (m = n .. n+terms-1) of
    S(phi) = P(phi) e^phi + (-1)^n n!.

    The coefficients below order n vanish identically, s_n = 1, and
    s_m = sum_{k<n} c_k / (m-k)! for m >= n.  Each s_m is a short sum of
    exact rationals, so no cancellation noise survives.
    """
    c = _poly_coeffs(n)
    out = []
    for m in range(n, n + terms):
        s = 0.0
        for k in range(n):
            s += c[k] / math.factorial(m - k)
        out.append(s)
    return out


def implicit_residual(n: int, phi: float, t: float) -> float:
    """Left side minus right side of the defining relation at (phi, t).

    Zero characterizes the profile.  phi = 0 is allowed as a limit probe.
    Raises OverflowError when either side leaves the floating exponent range
    rather than returning an infinity.
    """
    if n < 1:
        raise ValueError("dimension n must be >= 1")
    if phi < 0.0:
        raise ValueError("phi must be nonnegative")
    if phi > _EXP_RANGE or n * t > _EXP_RANGE:
        raise OverflowError(
            "implicit relation out of floating range (phi=%g, n*t=%g); "
            "use the log-space solver path" % (phi, n * t)
        )
    c = _poly_coeffs(n)
    rhs = math.exp(n * t) + ((-1.0) ** (n - 1)) * math.factorial(n)
    return _poly(c, phi) * math.exp(phi) - rhs


@dataclass
class SolitonProfile:
    """The radial profile phi(t) = u'(t) for complex dimension n.

    Fields
    ------
    n : complex dimension (integer >= 1)
    t_domain : closed interval of the log-radius variable used as the default
        reporting range; evaluation is allowed anywhere representable
    solver_tolerance : residual bound relative to the scale e^(n t) + n!

    Invariants (enforced by the test suite): phi > 0 and strictly increasing;
    phi -> 0 as t -> -inf; phi/t -> n and phi' -> n as t -> +inf; and the
    log-derivative identity (n-1) phi'/phi + phi''/phi' + phi' = n.
    """

    n: int
    t_domain: tuple[float, float] = (-30.0, 30.0)
    solver_tolerance: float = 1e-12

    _poly_c: list[float] = field(init=False, repr=False)
    _series: list[float] = field(init=False, repr=False)
    _t_series: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError("dimension n must be an integer >= 1")
        lo, hi = self.t_domain
        if not lo < hi:
            raise ValueError("t_domain must be an ordered interval")
        if self.solver_tolerance <= 0.0:
            raise ValueError("solver_tolerance must be positive")
        self._poly_c = _poly_coeffs(self.n)
        self._series = _series_coeffs(self.n)
        # largest t the series branch owns: where the root reaches _SERIES_PHI
        self._t_series = (
            math.log(_SERIES_PHI) + math.log(self._series_sum(_SERIES_PHI)) / self.n
        )

    # -- series helpers ----------------------------------------------------

    def _series_sum(self, phi: float) -> float:
        """T(phi) = S(phi)/phi^n = 1 + s_(n+1) phi + ...  (entire, positive)."""
        acc = 0.0
        for s in reversed(self._series):
            acc = acc * phi + s
        return acc

    def _series_sum_deriv(self, phi: float) -> float:
        acc = 0.0
        for j in range(len(self._series) - 1, 0, -1):
            acc = acc * phi + j * self._series[j]
        return acc

    # -- root solver -------------------------------------------------------

    def solve_phi(self, t: float, x0: float | None = None) -> float:
        """The unique positive root phi(t) of the defining relation."""
        t = float(t)
        if t < _T_TAIL:
            phi = math.exp(t)
            if phi == 0.0:
                raise OverflowError("t=%g is below the representable range" % t)
            return phi
        if t <= self._t_series:
            return self._solve_series(t)
        if self.n * t > _NT_LOGSPACE:
            return self._solve_logspace(t)
        return self._solve_direct(t, x0)

    def _solve_series(self, t: float) -> float:
        # Newton on G(phi) = log phi + log T(phi)/n - t, G' = 1/phi + T'/(n T)
        phi = min(math.exp(t), _SERIES_PHI * 0.99)
        # G carries rounding noise ~ ulp(|t|), so the smallest reliable
        # Newton step is ~ eps * max(1, |t|) * phi; ask for 4x that.
        tol = 1e-15 * max(1.0, abs(t)) * 4.0
        prev = -1.0
        for _ in range(80):
            T = self._series_sum(phi)
            G = math.log(phi) + math.log(T) / self.n - t
            Gp = 1.0 / phi + self._series_sum_deriv(phi) / (self.n * T)
            step = G / Gp
            new = phi - step
            if new <= 0.0:
                new = 0.5 * phi
            # converged, or the iterates entered a rounding-noise 2-cycle
            if abs(new - phi) <= tol * phi or new == prev:
                return new
            prev = phi
            phi = new
        raise SolverError("series-branch Newton did not converge at t=%g" % t)

    def _solve_logspace(self, t: float) -> float:
        # Solve phi + log P(phi) = n t + log1p(+-n! e^(-n t)) for huge n t.
        nt = self.n * t
        corr = ((-1.0) ** (self.n - 1)) * math.factorial(self.n)
        expo = math.exp(-nt) if nt < _EXP_RANGE else 0.0
        L = nt + math.log1p(corr * expo)
        phi = L - math.log(self.n) - (self.n - 1) * math.log(max(L, 2.0))
        for _ in range(60):
            P = _poly(self._poly_c, phi)
            if P <= 0.0:
                raise SolverError("log-space polynomial factor nonpositive")
            G = phi + math.log(P) - L
            Gp = 1.0 + _poly_deriv(self._poly_c, phi) / P
            new = phi - G / Gp
            if abs(new - phi) <= 1e-15 * abs(phi):
                return new
            phi = new
        raise SolverError("log-space Newton did not converge at t=%g" % t)

    def _solve_direct(self, t: float, x0: float | None = None) -> float:
        n = self.n
        c = self._poly_c
        nfact = math.factorial(n)
        rhs = math.exp(n * t) + ((-1.0) ** (n - 1)) * nfact
        scale = math.exp(n * t) + nfact

        def F(x: float) -> float:
            return _poly(c, x) * math.exp(x) - rhs

        lo = 0.5 * _SERIES_PHI            # root > _SERIES_PHI here, so F(lo) < 0
        hi = max(3.0, n * t + 2.0)
        grow = 0
        while F(hi) < 0.0:
            hi *= 1.5
            grow += 1
            if grow > 60 or hi > _EXP_RANGE:
                raise SolverError("failed to bracket the root at t=%g" % t)

        x = x0 if (x0 is not None and lo < x0 < hi) else min(max(n * t, 1.0), hi)
        fx = F(x)
        for _ in range(120):
            if abs(fx) <= self.solver_tolerance * scale:
                return x
            if fx < 0.0:
                lo = x
            else:
                hi = x
            deriv = n * x ** (n - 1) * math.exp(x)
            step = fx / deriv
            xn = x - step
            if not (lo < xn < hi):
                xn = 0.5 * (lo + hi)       # bisection safeguard
            if xn == x:
                break
            x, fx = xn, F(xn)
        if abs(fx) <= 10.0 * self.solver_tolerance * scale:
            return x
        raise SolverError(
            "profile solve did not reach tolerance at t=%g (n=%d)" % (t, self.n)
        )

    # -- derivatives and potential ------------------------------------------

    def phi_derivatives(self, t: float, phi: float | None = None):
        """(phi, phi', phi'') at t; derivatives from the closed forms."""
        t = float(t)
        if phi is None:
            phi = self.solve_phi(t)
        n = self.n
        expo = n * t - (n - 1) * math.log(phi) - phi
        phi1 = math.exp(expo)
        phi2 = phi1 * (n - phi1 - (n - 1) * phi1 / phi)
        return phi, phi1, phi2

    def potential(self, t: float):
        """(f, f') at t, with f = n t - (n-1) log phi - log phi' and f' = phi'.

        The normalization makes f -> 0 as t -> -inf; in fact f(t) = phi(t)
        exactly (combine the definition of f with the logarithm of the
        first-order form), which the test suite verifies as a cross-check.
        """
        phi, phi1, _ = self.phi_derivatives(t)
        f = self.n * t - (self.n - 1) * math.log(phi) - math.log(phi1)
        return f, phi1

    def phi_grid(self, ts):
        """Vectorized sweep: arrays (phi, phi1, phi2) over an iterable of t.

        Consecutive points warm-start the direct-branch Newton.
        """
        ts = np.asarray(ts, dtype=float)
        phi = np.empty_like(ts)
        phi1 = np.empty_like(ts)
        phi2 = np.empty_like(ts)
        prev: float | None = None
        flat = ts.ravel()
        p = phi.ravel()
        p1 = phi1.ravel()
        p2 = phi2.ravel()
        for i, t in enumerate(flat):
            root = self.solve_phi(float(t), x0=prev)
            p[i], p1[i], p2[i] = self.phi_derivatives(float(t), phi=root)
            prev = root
        return phi, phi1, phi2

    # -- integrated potential (needed by the embedding module) --------------

    def integrated_potential(self, t: float) -> float:
        """u(t) - u_min = integral of phi from -infinity to t.

        The tail below t0 = -40 is integrated analytically (phi ~ e^s there);
        the rest by adaptive quadrature.  Raises SolverError if the
        quadrature error estimate is not small.
        """
        t = float(t)
        t0 = -40.0
        if t <= t0:
            return math.exp(t)
        val, err = quad(self.solve_phi, t0, t, limit=300,
                        epsabs=1e-13, epsrel=1e-13)
        if err > 1e-9 * (1.0 + abs(val)):
            raise SolverError("quadrature for the potential did not converge")
        return val + math.exp(t0)

    # -- asymptotics ---------------------------------------------------------

    def asymptote_report(self, T: float) -> dict:
        """Large-t behaviour at T (>= 10): phi/T and phi' against their limit n.

        Also fits the leading logarithmic correction: from
        phi ~ n t - (n-1) log(n t) - log n the quantity
        (n T - phi(T) - log n)/log(n T) should approach n - 1.
        """
        T = float(T)
        if T < 10.0:
            raise ValueError("asymptote report requires T >= 10")
        n = self.n
        rows = []
        for Tk in (T, 1.5 * T, 2.25 * T):
            phi, phi1, _ = self.phi_derivatives(Tk)
            rows.append(
                {
                    "T": Tk,
                    "phi_over_T": phi / Tk,
                    "phi1": phi1,
                    "gap_ratio": abs(phi / Tk - n),
                    "gap_phi1": abs(phi1 - n),
                }
            )
        phi_T = rows[0]["phi_over_T"] * T
        fitted = (n * T - phi_T - math.log(n)) / math.log(n * T)
        return {
            "n": n,
            "T": T,
            "phi_over_T": rows[0]["phi_over_T"],
            "phi1": rows[0]["phi1"],
            "gap_ratio": rows[0]["gap_ratio"],
            "gap_phi1": rows[0]["gap_phi1"],
            "fitted_log_coefficient": fitted,
            "monotone_approach": (
                rows[0]["gap_ratio"] >= rows[1]["gap_ratio"] >= rows[2]["gap_ratio"]
                and rows[0]["gap_phi1"] >= rows[1]["gap_phi1"] >= rows[2]["gap_phi1"]
            ),
            "samples": rows,
        }
