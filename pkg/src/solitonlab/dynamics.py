"""Hamiltonian dynamics for the soliton Kahler form.

The symplectic form is omega = i ddbar u, represented at a point by the real
antisymmetric matrix of `geometry.form_matrix` applied to twice the metric
matrix.  The Hamiltonian field solves omega(V_H, w) = -dH(w); for radial
Hamiltonians H = chi(f) this has the closed form

    V_H(p) = chi'(f(p)) * J p,        J(x1, y1, ...) = (-y1, x1, ...),

because the gradient of f is exactly the Euler field z in this
normalization.  Orbits of V_f are therefore simultaneous rotations with
period 2 pi at every level, metric length 2 pi sqrt(phi'(t)), and action
(integral of the radial primitive lambda = 2 u'(t) e^(-t) lambda_0 of omega)
equal to 2 pi phi(t) -- which is also the omega-area enclosed by the orbit,
the Stokes normalization used throughout.

Integration is by the implicit midpoint rule with fixed-point inner
iteration; first returns are detected on the hyperplane through the seed
normal to the initial velocity and localized with cubic Hermite
interpolation.  `shoot_periodic` runs a finite-difference Newton iteration
on the return map for Hamiltonians that are not functions of f alone
(using the omega-solve route for the field), and the plateau ("admissible")
Hamiltonians used for capacity lower bounds live at the bottom of the file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .geometry import form_matrix, metric_hermitian, metric_norm_sq
from .profile import SolitonProfile

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# fields


def apply_J(p: np.ndarray) -> np.ndarray:
    """The standard complex structure on stacked reals: (x,y) -> (-y, x)."""
    out = np.empty_like(p)
    out[0::2] = -p[1::2]
    out[1::2] = p[0::2]
    return out


def f_of_point(profile: SolitonProfile, p) -> float:
    """Potential value f at a real phase point (0 at the origin)."""
    s = float(np.dot(p, p))
    if s == 0.0:
        return 0.0
    f, _ = profile.potential(math.log(s))
    return f


def grad_f_real(profile: SolitonProfile, p) -> np.ndarray:
    """Euclidean gradient of f(p) = f(log|p|^2): equals 2 e^(-t) phi' p."""
    p = np.asarray(p, dtype=float)
    s = float(np.dot(p, p))
    if s == 0.0:
        return np.zeros_like(p)
    _, phi1, _ = profile.phi_derivatives(math.log(s))
    return (2.0 * phi1 / s) * p


def hamiltonian_field(profile: SolitonProfile, chi, p) -> np.ndarray:
    """V_H for H = chi(f) (chi = None means H = f): chi'(f) * J p."""
    p = np.asarray(p, dtype=float)
    if chi is None:
        return apply_J(p)
    c = chi.slope(f_of_point(profile, p))
    return c * apply_J(p)


def symplectic_matrix(profile: SolitonProfile, p) -> np.ndarray:
    """Real matrix of omega = i ddbar u at p (coefficient matrix 2*g)."""
    return form_matrix(2.0 * metric_hermitian(profile, p))


def field_from_form(profile: SolitonProfile, grad_H: np.ndarray, p) -> np.ndarray:
    """V_H by solving the defining linear system omega(V, .) = -dH.

    This is the direct route through the form matrix; for H = chi(f) it must
    agree with `hamiltonian_field` (the test suite compares the two).
    """
    return np.linalg.solve(symplectic_matrix(profile, p), np.asarray(grad_H, float))


def primitive_pairing(profile: SolitonProfile, p, v) -> float:
    """lambda(v) for the radial primitive lambda = 2 u' e^(-t) lambda_0,
    lambda_0 = (1/2) sum (x dy - y dx); d(lambda) = omega."""
    p = np.asarray(p, dtype=float)
    s = float(np.dot(p, p))
    if s == 0.0:
        return 0.0
    phi = profile.solve_phi(math.log(s))
    cross = float(np.dot(p[0::2], v[1::2]) - np.dot(p[1::2], v[0::2]))
    return phi / s * cross


# ---------------------------------------------------------------------------
# orbit results


@dataclass
class OrbitResult:
    """A detected (or attempted) periodic orbit."""

    seed: np.ndarray
    period: float
    closure_error: float
    g_length: float
    action: float
    level: float
    status: str = "closed"      # closed | no_closure | constant | no_convergence
    energy_drift: float = math.nan
    iterations: int = 0
    trajectory: np.ndarray | None = field(default=None, repr=False)
    param_steps: np.ndarray | None = field(default=None, repr=False)


def _midpoint_step(velocity, x: np.ndarray, h: float) -> np.ndarray:
    """One implicit midpoint step, fixed-point inner iteration."""
    m = x + (0.5 * h) * velocity(x)
    scale = 1.0 + float(np.max(np.abs(x)))
    for _ in range(50):
        m_new = x + (0.5 * h) * velocity(m)
        if float(np.max(np.abs(m_new - m))) <= 1e-14 * scale:
            m = m_new
            break
        m = m_new
    return 2.0 * m - x


def _hermite_distance(s, d0, d1, v0, v1):
    s2 = s * s
    s3 = s2 * s
    return (
        d0 * (2 * s3 - 3 * s2 + 1)
        + v0 * (s3 - 2 * s2 + s)
        + d1 * (-2 * s3 + 3 * s2)
        + v1 * (s3 - s2)
    )


def integrate_orbit(
    profile: SolitonProfile,
    chi,
    seed,
    step: float = 1e-3,
    max_param: float | None = None,
) -> OrbitResult:
    """Integrate V_H from the seed until first return to the transverse
    hyperplane through the seed (or give up at max_param).

    H = chi(f); chi = None is H = f itself.  Crossings are accepted only in
    the direction of the initial velocity; the crossing is localized by a
    cubic Hermite model of the signed distance, and the state there by
    Hermite interpolation of the trajectory.
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    seed = np.asarray(seed, dtype=float).copy()
    velocity = lambda q: hamiltonian_field(profile, chi, q)
    level = f_of_point(profile, seed) if chi is None else chi.value(f_of_point(profile, seed))

    V0 = velocity(seed)
    speed0 = float(np.linalg.norm(V0))
    if speed0 < 1e-12 * (1.0 + float(np.linalg.norm(seed))):
        return OrbitResult(seed=seed, period=0.0, closure_error=0.0,
                           g_length=0.0, action=0.0, level=level,
                           status="constant", energy_drift=0.0)
    normal = V0 / speed0
    if max_param is None:
        max_param = 3.0 * TWO_PI * float(np.linalg.norm(seed)) / speed0

    n_steps = int(math.ceil(max_param / step))
    traj = [seed.copy()]
    x = seed.copy()
    Vx = V0
    d_prev = 0.0
    v_prev = speed0
    for k in range(1, n_steps + 1):
        x_new = _midpoint_step(velocity, x, step)
        V_new = velocity(x_new)
        d_new = float(np.dot(x_new - seed, normal))
        v_new = float(np.dot(V_new, normal))
        traj.append(x_new.copy())
        if d_prev < 0.0 <= d_new:
            # localize the upward crossing inside [x, x_new]
            lo, hi = 0.0, 1.0
            hv0, hv1 = step * v_prev, step * v_new
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if _hermite_distance(mid, d_prev, d_new, hv0, hv1) < 0.0:
                    lo = mid
                else:
                    hi = mid
            s = 0.5 * (lo + hi)
            s2, s3 = s * s, s * s * s
            h00 = 2 * s3 - 3 * s2 + 1
            h10 = s3 - 2 * s2 + s
            h01 = -2 * s3 + 3 * s2
            h11 = s3 - s2
            x_cross = h00 * x + h10 * (step * Vx) + h01 * x_new + h11 * (step * V_new)
            period = (k - 1 + s) * step
            traj[-1] = x_cross          # replace the overshoot point
            steps_arr = np.full(len(traj) - 1, step)
            steps_arr[-1] = s * step
            traj_arr = np.vstack(traj)
            level_end = (f_of_point(profile, x_cross) if chi is None
                         else chi.value(f_of_point(profile, x_cross)))
            orbit = OrbitResult(
                seed=seed,
                period=period,
                closure_error=float(np.linalg.norm(x_cross - seed)),
                g_length=math.nan,
                action=math.nan,
                level=level,
                status="closed",
                energy_drift=abs(level_end - level),
                trajectory=traj_arr,
                param_steps=steps_arr,
            )
            orbit.g_length, orbit.action = orbit_metrics(profile, orbit, chi=chi)
            return orbit
        x, Vx, d_prev, v_prev = x_new, V_new, d_new, v_new

    return OrbitResult(seed=seed, period=math.nan, closure_error=math.nan,
                       g_length=math.nan, action=math.nan, level=level,
                       status="no_closure", trajectory=np.vstack(traj))


def orbit_metrics(profile: SolitonProfile, orbit: OrbitResult, chi=None,
                  velocity=None):
    """(g_length, action) of a closed orbit by composite trapezoid line
    integrals over the stored trajectory.

    g_length integrates |V|_g (for level orbits of f this reproduces
    2 pi sqrt(phi')); action integrates the primitive pairing lambda(V),
    normalized so that it equals the enclosed omega-area (2 pi phi for a
    level-t orbit of f).
    """
    if orbit.trajectory is None or orbit.param_steps is None:
        raise ValueError("orbit carries no trajectory to integrate over")
    if velocity is None:
        velocity = lambda q: hamiltonian_field(profile, chi, q)
    pts = orbit.trajectory
    speeds = np.empty(len(pts))
    lam = np.empty(len(pts))
    for i, p in enumerate(pts):
        v = velocity(p)
        speeds[i] = math.sqrt(max(metric_norm_sq(profile, p, v), 0.0))
        lam[i] = primitive_pairing(profile, p, v)
    h = orbit.param_steps
    g_length = float(np.sum(0.5 * (speeds[:-1] + speeds[1:]) * h))
    action = float(np.sum(0.5 * (lam[:-1] + lam[1:]) * h))
    return g_length, action


def level_to_t(profile: SolitonProfile, f_level: float) -> float:
    """Invert the (strictly increasing) potential: t with f(t) = f_level."""
    if f_level <= 0.0:
        raise ValueError("levels of f must be positive (f > 0 away from the origin)")
    lo, hi = -60.0, 10.0
    while profile.potential(hi)[0] < f_level:
        hi *= 1.5
        if hi > 1e6:
            raise ValueError("level out of range")
    return brentq(lambda t: profile.potential(t)[0] - f_level, lo, hi, xtol=1e-13)


def radial_seed(profile: SolitonProfile, t: float) -> np.ndarray:
    """The point (e^(t/2), 0, 0, ..., 0) on the sphere log|z|^2 = t."""
    p = np.zeros(2 * profile.n)
    p[0] = math.exp(0.5 * t)
    return p


def scan_levels_for_orbits(profile: SolitonProfile, chi, levels,
                           step: float = 1e-3) -> list[dict]:
    """Seed the integrator on each level set and report orbit or failure.

    Levels are values of H (= values of f when chi is None).  Plateau levels
    of a ramp Hamiltonian carry only constant orbits and are reported as
    such.  Out-of-range levels produce per-level error entries.
    """
    out = []
    for lev in levels:
        entry = {"level": float(lev), "orbit": None, "error": None}
        try:
            if chi is None:
                t = level_to_t(profile, float(lev))
            else:
                lev = float(lev)
                if lev < 0.0 or lev > chi.plateau:
                    raise ValueError("level outside the range of H")
                if lev <= 0.0 or lev >= chi.plateau:
                    # critical plateau: the only orbits there are constants
                    s_level = (chi.f_inner * 0.5 if lev <= 0.0
                               else chi.f_outer + 1.0)
                    seed = radial_seed(profile, level_to_t(profile, s_level))
                    entry["orbit"] = integrate_orbit(profile, chi, seed, step=step)
                    out.append(entry)
                    continue
                s_level = brentq(lambda s: chi.value(s) - lev,
                                 chi.f_inner, chi.f_outer, xtol=1e-13)
                t = level_to_t(profile, s_level)
            seed = radial_seed(profile, t)
            entry["orbit"] = integrate_orbit(profile, chi, seed, step=step)
        except ValueError as exc:
            entry["error"] = str(exc)
        out.append(entry)
    return out


# ---------------------------------------------------------------------------
# shooting for perturbed Hamiltonians


@dataclass
class PerturbedHamiltonian:
    """H = f + eps * <direction, p>: the simplest non-radial perturbation."""

    profile: SolitonProfile
    eps: float
    direction: np.ndarray

    def value(self, p) -> float:
        return f_of_point(self.profile, p) + self.eps * float(
            np.dot(self.direction, p)
        )

    def gradient(self, p) -> np.ndarray:
        return grad_f_real(self.profile, p) + self.eps * self.direction


def _flow(profile: SolitonProfile, H, p: np.ndarray, T: float, step: float,
          record: bool = False):
    velocity = lambda q: field_from_form(profile, H.gradient(q), q)
    n_steps = max(8, int(math.ceil(abs(T) / step)))
    h = T / n_steps
    x = p.copy()
    traj = [x.copy()] if record else None
    for _ in range(n_steps):
        x = _midpoint_step(velocity, x, h)
        if record:
            traj.append(x.copy())
    if record:
        return x, np.vstack(traj), np.full(n_steps, h)
    return x


def shoot_periodic(
    profile: SolitonProfile,
    H,
    guess,
    guess_period: float,
    step: float = 5e-3,
    tol: float = 1e-10,
    max_iter: int = 15,
    pin_level: bool = True,
) -> OrbitResult:
    """Newton iteration on (return map - identity, section, level).

    H must expose value(p) and gradient(p); the field is obtained by solving
    the symplectic linear system, so H need not be a function of f.  The
    energy level of the guess is kept as an extra least-squares row by
    default: without it the problem is ill-posed near the radial case, where
    every point is periodic and the return-map Jacobian loses rank, so an
    unpinned iteration may jump to a far-away (near-constant) orbit.
    Returns status "no_convergence" (not an exception) if Newton stalls.
    """
    p = np.asarray(guess, dtype=float).copy()
    T = float(guess_period)
    dim = p.size
    sect = field_from_form(profile, H.gradient(p), p)
    sect = sect / np.linalg.norm(sect)
    anchor = p.copy()
    level0 = H.value(anchor)
    rows = dim + 2 if pin_level else dim + 1

    def residual(pv, Tv):
        r = np.empty(rows)
        r[:dim] = _flow(profile, H, pv, Tv, step) - pv
        r[dim] = float(np.dot(pv - anchor, sect))
        if pin_level:
            r[dim + 1] = H.value(pv) - level0
        return r

    r = residual(p, T)
    iters = 0
    while float(np.linalg.norm(r)) > tol and iters < max_iter:
        J = np.empty((rows, dim + 1))
        delta = 1e-6
        for j in range(dim):
            dp = p.copy()
            dp[j] += delta
            J[:, j] = (residual(dp, T) - r) / delta
        J[:, dim] = (residual(p, T + delta) - r) / delta
        upd, *_ = np.linalg.lstsq(J, -r, rcond=None)
        p = p + upd[:dim]
        T = T + upd[dim]
        r = residual(p, T)
        iters += 1

    closure = float(np.linalg.norm(r[:dim]))
    status = "closed" if float(np.linalg.norm(r)) <= tol else "no_convergence"
    _, traj, hsteps = _flow(profile, H, p, T, step, record=True)
    orbit = OrbitResult(
        seed=p,
        period=T,
        closure_error=closure,
        g_length=math.nan,
        action=math.nan,
        level=H.value(p),
        status=status,
        energy_drift=abs(H.value(traj[-1]) - H.value(p)),
        iterations=iters,
        trajectory=traj,
        param_steps=hsteps,
    )
    vel = lambda q: field_from_form(profile, H.gradient(q), q)
    orbit.g_length, orbit.action = orbit_metrics(profile, orbit, velocity=vel)
    return orbit


# ---------------------------------------------------------------------------
# admissible plateau Hamiltonians


def _smoothstep(x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x))


def _smoothstep_int(x: float) -> float:
    # integral of _smoothstep from 0: x^6 - 3 x^5 + 2.5 x^4 on [0, 1]
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return x - 0.5
    x4 = x * x * x * x
    return x4 * (2.5 + x * (-3.0 + x))


@dataclass
class AdmissibleHamiltonian:
    """A plateau Hamiltonian H = chi(f) on the sublevel set {f < domain_level}.

    chi rises from 0 (for f <= f_inner) to the plateau value m (for
    f >= f_outer) with slope profile a smoothed trapezoid: rise of width
    ramp_width, constant slope max_slope, fall of width ramp_width.  Then
    m = max_slope * (f_outer - f_inner - ramp_width) exactly, and every
    nonconstant orbit of V_H is a circle of period 2 pi / chi'(f) -- so the
    "all periods > 1" condition is max_slope < 2 pi.
    """

    n: int
    plateau: float
    f_inner: float
    f_outer: float
    domain_level: float
    ramp_width: float
    max_slope: float

    def slope(self, s: float) -> float:
        a, b, w = self.f_inner, self.f_outer, self.ramp_width
        if s <= a or s >= b:
            return 0.0
        rise = _smoothstep((s - a) / w)
        fall = _smoothstep((b - s) / w)
        return self.max_slope * min(rise, fall)

    def value(self, s: float) -> float:
        a, b, w = self.f_inner, self.f_outer, self.ramp_width
        sig = self.max_slope
        if s <= a:
            return 0.0
        if s >= b:
            return self.plateau
        if s <= a + w:
            return sig * w * _smoothstep_int((s - a) / w)
        if s < b - w:
            return sig * (0.5 * w + (s - a - w))
        return self.plateau - sig * w * _smoothstep_int((b - s) / w)


def make_plateau_hamiltonian(
    n: int,
    domain_level: float,
    slope: float,
    inner_margin: float = 0.01,
    width_fraction: float = 0.01,
) -> AdmissibleHamiltonian:
    """Build the ramp family member with the given plateau slope.

    inner_margin and width_fraction are fractions of the domain level; the
    plateau value is slope * (usable length), which tends to
    slope * domain_level as the margins shrink.
    """
    if domain_level <= 0.0:
        raise ValueError("domain level must exceed the minimum of f (0)")
    a = inner_margin * domain_level
    b = (1.0 - inner_margin) * domain_level
    w = width_fraction * domain_level
    if b - a - w <= 0.0:
        raise ValueError("ramp margins leave no room for a slope plateau")
    m = slope * (b - a - w)
    return AdmissibleHamiltonian(
        n=n, plateau=m, f_inner=a, f_outer=b, domain_level=domain_level,
        ramp_width=w, max_slope=slope,
    )


@dataclass
class AdmissibilityReport:
    admissible: bool
    conditions: dict
    measured_max_slope: float
    lower_bound: float


def check_admissible(A: AdmissibleHamiltonian, samples: int = 4001) -> AdmissibilityReport:
    """Check the four defining conditions of the admissible class.

    (a) H is identically the plateau constant outside a compact part of the
        domain sublevel set; (b) H vanishes on an inner open set; (c)
        0 <= H <= plateau; (d) every nonconstant periodic orbit has period
        exceeding 1, which for ramp Hamiltonians is the measured slope bound
        sup chi' < 2 pi.  The resulting capacity lower bound is the plateau
        value when all four hold.
    """
    grid = np.linspace(0.0, max(A.domain_level, A.f_outer) * 1.05, samples)
    values = np.array([A.value(s) for s in grid])
    slopes = np.array([A.slope(s) for s in grid])
    measured = float(np.max(slopes))

    cond_a = (A.f_outer < A.domain_level) and all(
        A.value(A.f_outer + k * 0.1 * (A.domain_level - A.f_outer)) == A.plateau
        for k in range(1, 4)
    )
    cond_b = A.f_inner > 0.0 and all(
        A.value(s) == 0.0 for s in np.linspace(0.0, A.f_inner, 64)
    )
    cond_c = bool(np.all(values >= -1e-15) and np.all(values <= A.plateau * (1 + 1e-15)))
    cond_d = measured < TWO_PI
    conditions = {
        "a_plateau_outside_compact": cond_a,
        "b_zero_on_inner_open_set": cond_b,
        "c_pinched_between_0_and_plateau": cond_c,
        "d_no_fast_periodic_orbit": cond_d,
    }
    ok = all(conditions.values())
    return AdmissibilityReport(
        admissible=ok,
        conditions=conditions,
        measured_max_slope=measured,
        lower_bound=A.plateau if ok else 0.0,
    )


def admissibility_threshold(
    n: int,
    domain_level: float,
    width: float = 1e-6,
    lo: float = math.pi,
    hi: float = 3.0 * math.pi,
) -> float:
    """Bisection on the ramp slope for the admissible/inadmissible flip.

    Returns the midpoint of the final bracket (width below `width`); the
    exact threshold is the slope at which the fastest orbit period reaches 1.
    """
    rep_lo = check_admissible(make_plateau_hamiltonian(n, domain_level, lo))
    rep_hi = check_admissible(make_plateau_hamiltonian(n, domain_level, hi))
    if not rep_lo.admissible or rep_hi.admissible:
        raise ValueError("threshold not bracketed by the given slopes")
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if check_admissible(make_plateau_hamiltonian(n, domain_level, mid)).admissible:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
