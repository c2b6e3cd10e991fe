"""Explicit symplectomorphisms from soliton forms to the flat form.

A radially equivariant map w = a(t) z (t = log|z|^2) pulls the flat form
omega_0 = (i/2) sum dz^i wedge dzbar^i back to i ddbar h exactly when

    a(t)^2 = 2 h'(t) e^(-t),

because 2 h'(t) e^(-t) lambda_0 is a primitive of i ddbar h and the flat
primitive lambda_0 scales by a^2 under the map.  Two source forms are
supported: the Kahler form (h' = phi, image exhausting C^n) and the Ricci
form (h' = phi', image the ball of radius sqrt(2n)).  Both maps are exact
symplectomorphisms; `pullback_residual` verifies this with finite
differences, and composing one with the inverse of the other carries the
Kahler form of a sublevel set {f < c}, c < n, into the Ricci form of a
ball -- the mechanism behind the capacity bounds at the bottom of the
file.  Capacity normalization: the flat ball of radius r has capacity
pi r^2 for the Gromov width implied by omega_0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .dynamics import level_to_t, make_plateau_hamiltonian, check_admissible
from .geometry import form_matrix, metric_hermitian, ricci_hermitian
from .profile import SolitonProfile

_TAGS = ("kahler", "ricci")


@dataclass
class SymplecticMap:
    """The radial map w = a(t) z for one of the two source forms."""

    tag: str
    profile: SolitonProfile

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise ValueError("source form must be one of %s" % (_TAGS,))

    # -- scaling -----------------------------------------------------------

    def _h_prime(self, t: float):
        """(h'(t), h''(t)) for the potential h of the source form."""
        phi, phi1, phi2 = self.profile.phi_derivatives(t)
        if self.tag == "kahler":
            return phi, phi1
        return phi1, phi2

    def scaling(self, t: float) -> float:
        """a(t) = sqrt(2 h'(t) e^(-t)); tends to sqrt(2) at the origin."""
        hp, _ = self._h_prime(t)
        val = 2.0 * hp * math.exp(-t)
        if val <= 0.0:
            raise ValueError("scaling degenerate at t = %g" % t)
        return math.sqrt(val)

    def image_radius_sq(self, t: float) -> float:
        """|w|^2 on the image of the sphere log|z|^2 = t: equals 2 h'(t)."""
        hp, _ = self._h_prime(t)
        return 2.0 * hp

    @property
    def image_radius(self) -> float:
        """Radius of the image ball: sqrt(2n) for the Ricci form, infinite
        (the map exhausts C^n) for the Kahler form."""
        if self.tag == "ricci":
            return math.sqrt(2.0 * self.profile.n)
        return math.inf

    # -- point maps ----------------------------------------------------------

    def map_point(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        s = float(np.dot(p, p))
        if s == 0.0:
            return np.zeros_like(p)
        return self.scaling(math.log(s)) * p

    def inverse_point(self, q) -> np.ndarray:
        """Invert w = a(t) z: solve 2 h'(t) = |q|^2, then divide out a(t).

        Accurate to machine precision (bracketing plus Newton polish) so
        that finite-difference Jacobians of compositions stay clean.
        """
        q = np.asarray(q, dtype=float)
        s = float(np.dot(q, q))
        if s == 0.0:
            return np.zeros_like(q)
        if self.tag == "ricci" and s >= 2.0 * self.profile.n:
            raise ValueError(
                "point lies outside the image ball (|q|^2 = %g >= 2n)" % s)
        t = self._invert_radius(s)
        return q / self.scaling(t)

    def _invert_radius(self, s: float) -> float:
        def F(t):
            return self.image_radius_sq(t) - s

        lo = min(math.log(0.5 * s) - 10.0, -40.0)
        hi = 10.0
        while F(hi) < 0.0:
            hi = 1.5 * hi + 5.0
            if hi > 1e7:
                raise ValueError("failed to bracket the inverse radius")
        t = brentq(F, lo, hi, xtol=1e-12)
        for _ in range(2):
            _, hpp = self._h_prime(t)
            step = F(t) / (2.0 * hpp)
            t_new = t - step
            if not math.isfinite(t_new):
                break
            t = t_new
        return t


def build_map(profile: SolitonProfile, source_form: str) -> SymplecticMap:
    """Factory: source_form is "kahler" (i ddbar u) or "ricci" (i ddbar f)."""
    return SymplecticMap(tag=source_form, profile=profile)


# ---------------------------------------------------------------------------
# residual checks


def source_form_real(profile: SolitonProfile, tag: str, p) -> np.ndarray:
    """Real antisymmetric matrix of the source form at p."""
    if tag == "kahler":
        return form_matrix(2.0 * metric_hermitian(profile, p))
    if tag == "ricci":
        return form_matrix(2.0 * ricci_hermitian(profile, p))
    raise ValueError("source form must be one of %s" % (_TAGS,))


def flat_form_real(n: int) -> np.ndarray:
    """Real matrix of omega_0 = (i/2) sum dz wedge dzbar."""
    return form_matrix(np.eye(n, dtype=complex))


def _fd_jacobian(mapping, p: np.ndarray, step: float) -> np.ndarray:
    dim = p.size
    J = np.empty((dim, dim))
    for j in range(dim):
        dp = np.zeros(dim)
        dp[j] = step
        J[:, j] = (mapping(p + dp) - mapping(p - dp)) / (2.0 * step)
    return J


def pullback_residual(smap: SymplecticMap, profile: SolitonProfile,
                      sample_points, fd_step: float = 1e-6) -> float:
    """max_p | J(p)^T Omega_0 J(p) - Omega_source(p) | over the samples.

    J is the central finite-difference Jacobian of the point map; an exact
    symplectomorphism leaves only O(fd_step^2) discretization residue.
    """
    omega0 = flat_form_real(profile.n)
    worst = 0.0
    for p in sample_points:
        p = np.asarray(p, dtype=float)
        J = _fd_jacobian(smap.map_point, p, fd_step)
        res = J.T @ omega0 @ J - source_form_real(profile, smap.tag, p)
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def composition_residual(profile: SolitonProfile, c: float, sample_points,
                         fd_step: float = 1e-6) -> float:
    """Residual of G = (ricci map)^(-1) o (kahler map) carrying the Kahler
    form of {f < c} to the Ricci form; requires c < n so the intermediate
    ball of radius sqrt(2c) sits inside the Ricci image ball."""
    if not 0.0 < c < profile.n:
        raise ValueError("composition needs a level 0 < c < n")
    F = build_map(profile, "kahler")
    H = build_map(profile, "ricci")
    G = lambda p: H.inverse_point(F.map_point(p))
    worst = 0.0
    for p in sample_points:
        p = np.asarray(p, dtype=float)
        if profile.potential(math.log(float(np.dot(p, p))))[0] >= c:
            raise ValueError("sample point outside the sublevel set {f < c}")
        J = _fd_jacobian(G, p, fd_step)
        target = source_form_real(profile, "ricci", G(p))
        res = J.T @ target @ J - source_form_real(profile, "kahler", p)
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def sample_sublevel(profile: SolitonProfile, count: int, t_low: float,
                    t_high: float, seed: int = 20230915) -> np.ndarray:
    """Deterministic sample of points with log|z|^2 uniform in the given
    range and uniformly random directions (fixed RNG seed)."""
    rng = np.random.default_rng(seed)
    dim = 2 * profile.n
    ts = rng.uniform(t_low, t_high, size=count)
    dirs = rng.normal(size=(count, dim))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    return np.exp(0.5 * ts)[:, None] * dirs


# ---------------------------------------------------------------------------
# capacity bounds


@dataclass
class CapacityBounds:
    """Two-sided symplectic capacity estimate for the sublevel set {f < c}.

    lower comes from an explicitly verified admissible plateau Hamiltonian
    (its plateau value), and approaches 2 pi c as the ramp margins shrink;
    upper is 2 pi (u(t_c) - min u), the ball capacity of the Kahler-map
    image, which strictly dominates the sharp value upper_sharp = 2 pi c
    recorded alongside for reference.
    """

    level: float
    t_level: float
    lower: float
    upper: float
    upper_sharp: float
    ramp_slope: float
    admissible: bool


def capacity_bounds(profile: SolitonProfile, c: float,
                    margin_fraction: float = 1e-3) -> CapacityBounds:
    if c <= 0.0:
        raise ValueError("capacity needs a level above the minimum of f (0)")
    t_c = level_to_t(profile, c)

    slope = 2.0 * math.pi * (1.0 - margin_fraction)
    ramp = make_plateau_hamiltonian(profile.n, c, slope,
                                    inner_margin=margin_fraction,
                                    width_fraction=margin_fraction)
    report = check_admissible(ramp)
    lower = report.lower_bound

    upper = 2.0 * math.pi * profile.integrated_potential(t_c)
    phi_c = profile.solve_phi(t_c)
    return CapacityBounds(
        level=c,
        t_level=t_c,
        lower=lower,
        upper=upper,
        upper_sharp=2.0 * math.pi * phi_c,
        ramp_slope=slope,
        admissible=report.admissible,
    )
