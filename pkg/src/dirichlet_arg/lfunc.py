"""Dirichlet L-functions at desk scale: values, arguments, zeros and zero counts.

Every family-wide routine evaluates one Hurwitz-zeta array per point s and
turns it into all q - 1 L-values with a single FFT, so sweeping every
character costs about as much as handling one.  Entry 0 of family arrays
belongs to the principal character and is generally left as nan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize, special

from .arith import DomainError, Quadrature, hurwitz_zeta_array, integrate
from .characters import Character, CharacterFamily, PreconditionError, root_numbers
from .mollifier import smoothed_lambda_table

NEAR_ZERO = 1e-13
WRAP_LIMIT = 0.7
COLLISION_EPS = 1e-6
MAX_HEIGHT = 100.0


class NearZeroError(ArithmeticError):
    """L vanishes (numerically) at the requested point."""

    def __init__(self, message: str, magnitude: float):
        super().__init__(message)
        self.magnitude = magnitude


class ContourError(ArithmeticError):
    """Argument-principle contour could not be placed away from zeros."""


def _wrap(x):
    return (np.asarray(x) + np.pi) % (2 * np.pi) - np.pi


# ---------------------------------------------------------------------------
# L values
# ---------------------------------------------------------------------------


def _hurwitz_block(s: complex, q: int, derivative: bool):
    a = np.arange(1, q) / q
    return hurwitz_zeta_array(s, a, derivative, drop_pole=True)


def _check_point(s: complex):
    if abs(s.imag) > 10 * MAX_HEIGHT:
        raise DomainError(f"|Im s| = {abs(s.imag):g} exceeds the supported band")
    if s.real <= -2:
        raise DomainError("L evaluated only for Re(s) > -2")


def l_values(s: complex, family: CharacterFamily, derivative: bool = False):
    """L(s, chi_j) for all j (and L'(s, chi_j) when asked).

    The Hurwitz pieces are used without their common 1/(s-1) term, which
    cancels for every non-principal character; it is restored for j = 0,
    whose entry is nan at s = 1.
    """
    s = complex(s)
    _check_point(s)
    q = family.q
    scale = np.exp(-s * math.log(q))
    bins = np.zeros(q, dtype=np.complex128)
    at_pole = s == 1
    pole = 0.0 if at_pole else (q - 1) / (s - 1)
    if not derivative:
        bins[1:] = _hurwitz_block(s, q, False)
        lv = family.sums_by_residue(bins)
        lv[0] = np.nan if at_pole else lv[0] + pole
        return scale * lv
    h, dh = _hurwitz_block(s, q, True)
    bins[1:] = h
    x = family.sums_by_residue(bins)
    bins[1:] = dh
    dx = family.sums_by_residue(bins)
    if at_pole:
        x[0] = dx[0] = np.nan
    else:
        x[0] += pole
        dx[0] -= pole / (s - 1)
    lv = scale * x
    return lv, scale * dx - math.log(q) * lv


def l_value(s: complex, character: Character, derivative: bool = False):
    """L(s, chi) = q^-s sum_a chi(a) zeta(s, a/q)."""
    s = complex(s)
    _check_point(s)
    if character.is_principal and s == 1:
        raise DomainError("s = 1 is a pole of the principal L-function")
    q = character.q
    chi = character.residue_values()[1:]
    scale = np.exp(-s * math.log(q))
    pole = (q - 1) / (s - 1) if character.is_principal else 0.0
    if not derivative:
        return complex(scale * (np.dot(chi, _hurwitz_block(s, q, False)) + pole))
    h, dh = _hurwitz_block(s, q, True)
    dpole = -pole / (s - 1) if character.is_principal else 0.0
    lv = complex(scale * (np.dot(chi, h) + pole))
    dv = complex(scale * (np.dot(chi, dh) + dpole)) - math.log(q) * lv
    return lv, dv


def log_deriv(s: complex, character: Character) -> complex:
    """L'/L(s, chi)."""
    lv, dv = l_value(s, character, derivative=True)
    if abs(lv) < NEAR_ZERO:
        raise NearZeroError(f"|L| = {abs(lv):.3g} at s = {s}", abs(lv))
    return dv / lv


# ---------------------------------------------------------------------------
# Completed L-function pieces
# ---------------------------------------------------------------------------


def gamma_factor_log(s, parity: int, q: int):
    """log of (q/pi)^((s+a)/2) Gamma((s+a)/2), principal loggamma branch."""
    w = (np.asarray(s, dtype=complex) + parity) / 2.0
    return w * math.log(q / math.pi) + special.loggamma(w)


def theta(t, parity: int, q: int):
    """Phase of the gamma factor on the critical line."""
    return np.imag(gamma_factor_log(0.5 + 1j * np.asarray(t, dtype=float), parity, q))


def rotation_phases(family: CharacterFamily) -> np.ndarray:
    """arg of the root number for every character (nan for the principal one)."""
    return np.angle(root_numbers(family))


def z_values(t: float, family: CharacterFamily, phases: np.ndarray | None = None) -> np.ndarray:
    """Z_j(t) = exp(-i phi_j / 2) exp(i theta_j(t)) L(1/2 + it, chi_j) for all j.

    Z_j is real up to rounding and |Z_j| = |L|.  Entry 0 is nan.
    """
    if phases is None:
        phases = rotation_phases(family)
    lv = l_values(0.5 + 1j * t, family)
    th = np.where(family.parity == 1, theta(t, 1, family.q), theta(t, 0, family.q))
    z = np.exp(1j * (th - phases / 2)) * lv
    z[0] = np.nan
    return z


def z_function(t: float, character: Character, phase: float | None = None) -> complex:
    if character.is_principal:
        raise DomainError("Z is defined for non-principal characters")
    if phase is None:
        phase = float(rotation_phases(character.family)[character.index])
    lv = l_value(0.5 + 1j * t, character)
    return complex(np.exp(1j * (theta(t, character.parity, character.q) - phase / 2)) * lv)


# ---------------------------------------------------------------------------
# S(t, chi)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArgumentSample:
    t: float
    value: float
    tail: float
    nodes: int
    converged: bool
    averaged: bool = False
    nearest_zero: float = math.nan
    error: float = math.nan


_S_BREAKS = tuple(0.5 + 10.0 ** (-k) for k in range(1, 10))
_S_TOP = 8.0


def _nearby_zero(t: float, character: Character, radius: float = 0.1):
    """Newton from 1/2 + it to a zero of L within ``radius``, else None."""
    s = complex(0.5, t)
    lv, dv = l_value(s, character, derivative=True)
    if dv == 0 or abs(lv / dv) > radius:
        return None
    for _ in range(40):
        step = lv / dv
        s -= step
        if abs(s - complex(0.5, t)) > radius:
            return None
        if abs(step) < 1e-15 * max(1.0, abs(s)):
            return s
        lv, dv = l_value(s, character, derivative=True)
        if lv == 0:
            return s
    return None


def _s_integral(t: float, character: Character, quad: Quadrature):
    """(int_{1/2}^8 Im L'/L d sigma, Im Log L(8 + it)).

    A zero rho close to the path is removed as 1/(s - rho) and integrated in
    closed form, which keeps the quadrature smooth near zeros.
    """
    rho = _nearby_zero(t, character)
    if rho is not None and abs(rho.imag - t) == 0.0:
        rho = None

    def f(sig):
        out = np.empty(sig.size)
        for i, x in enumerate(sig):
            s = complex(x, t)
            lv, dv = l_value(s, character, derivative=True)
            w = dv / lv
            if rho is not None:
                w -= 1.0 / (s - rho)
            out[i] = w.imag
        return out

    res = integrate(f, 0.5, _S_TOP, quad, points=_S_BREAKS)
    if rho is not None:
        pole = np.log(complex(_S_TOP, t) - rho) - np.log(complex(0.5, t) - rho)
        res = replace(res, value=res.value + pole.imag)
    tail_log = np.log(l_value(complex(_S_TOP, t), character))
    return res, float(tail_log.imag)


def s_of_t(
    t: float,
    character: Character,
    quad: Quadrature = Quadrature(abs_tol=1e-11, rel_tol=1e-11),
    zeros: "ZeroList | None" = None,
) -> ArgumentSample:
    """S(t, chi) = -(1/pi) int_{1/2}^inf Im L'/L(sigma + it) d sigma.

    The integral is taken numerically on [1/2, 8]; beyond 8 it equals
    -Im Log L(8 + it), which is evaluated exactly.  If L(1/2 + it) vanishes the
    mean of S(t -+ 1e-6) is returned.
    """
    if character.is_principal:
        raise DomainError("S(t, chi) is computed for non-principal characters")
    if abs(t) > MAX_HEIGHT:
        raise DomainError(f"|t| must be <= {MAX_HEIGHT}")
    nearest = math.nan
    if zeros is not None and zeros.ordinates.size:
        nearest = float(np.min(np.abs(zeros.ordinates - t)))
    centre = abs(l_value(complex(0.5, t), character))
    collide = centre < 1e-8 or (not math.isnan(nearest) and nearest < 1e-8)
    if collide:
        lo = s_of_t(t - COLLISION_EPS, character, quad)
        hi = s_of_t(t + COLLISION_EPS, character, quad)
        return ArgumentSample(
            t, 0.5 * (lo.value + hi.value), lo.tail, lo.nodes + hi.nodes,
            lo.converged and hi.converged, True, nearest, max(lo.error, hi.error),
        )
    res, tail = _s_integral(t, character, quad)
    value = (-float(np.real(res.value)) + tail) / math.pi
    return ArgumentSample(
        t, value, tail / math.pi, res.evaluations, res.converged, False, nearest, res.error / math.pi
    )


def _sigma_nodes() -> np.ndarray:
    u = np.geomspace(_S_TOP - 0.5, 1e-9, 72)
    return np.concatenate([0.5 + u, [0.5]])


def _phase_track(t: float, family: CharacterFamily, start: complex, sig: np.ndarray):
    """Continuous arg L(sigma + it) along decreasing sigma, all characters."""
    vals = [l_values(complex(x, t), family) for x in sig]
    vals = [np.asarray(v) for v in vals]
    phase = np.angle(vals[0])
    sig = list(sig)
    i = 0
    min_mod = np.abs(vals[0])
    while i < len(sig) - 1:
        d = _wrap(np.angle(vals[i + 1]) - np.angle(vals[i]))
        d[0] = 0.0
        if np.nanmax(np.abs(d)) > WRAP_LIMIT and sig[i] - sig[i + 1] > 1e-13:
            mid = 0.5 * (sig[i] + sig[i + 1])
            sig.insert(i + 1, mid)
            vals.insert(i + 1, l_values(complex(mid, t), family))
            continue
        phase = phase + d
        min_mod = np.minimum(min_mod, np.abs(vals[i + 1]))
        i += 1
    return phase, np.abs(vals[-1]), len(sig)


def family_arguments(t: float, family: CharacterFamily) -> np.ndarray:
    """S(t, chi_j) for every character, by tracking arg L along sigma from 8 down to 1/2.

    Characters with L(1/2 + it) = 0 get the mean of S(t -+ 1e-6).  Entry 0 is nan.
    """
    if abs(t) > MAX_HEIGHT:
        raise DomainError(f"|t| must be <= {MAX_HEIGHT}")
    sig = _sigma_nodes()
    phase, centre, _ = _phase_track(t, family, complex(_S_TOP, t), sig)
    out = phase / math.pi
    hit = centre < 1e-10
    hit[0] = False
    if np.any(hit):
        lo = family_arguments(t - COLLISION_EPS, family)
        hi = family_arguments(t + COLLISION_EPS, family)
        out[hit] = 0.5 * (lo[hit] + hi[hit])
    out[0] = np.nan
    return out


def family_s_tilde(t: float, family: CharacterFamily, s_values: np.ndarray | None = None) -> np.ndarray:
    """S(t, chi) + S(t, conj chi) for all characters."""
    if s_values is None:
        s_values = family_arguments(t, family)
    conj = (-np.arange(family.q - 1)) % (family.q - 1)
    return s_values + s_values[conj]


def gamma_count_term(t: float, parity: int) -> float:
    """(1/2 pi) int_{-t}^{t} digamma(1/4 + a/2 + iu/2) du = (2/pi) Im loggamma(1/4 + a/2 + it/2)."""
    return 2.0 / math.pi * float(np.imag(special.loggamma(0.25 + parity / 2 + 0.5j * t)))


def n_formula(t: float, family: CharacterFamily, s_values: np.ndarray | None = None) -> np.ndarray:
    """Pair count N(t, chi) (zeros of chi and conj chi with ordinates in (0, t]) from the smooth formula."""
    st = family_s_tilde(t, family, s_values)
    g = np.where(family.parity == 1, gamma_count_term(t, 1), gamma_count_term(t, 0))
    out = t / math.pi * math.log(family.q / math.pi) + st + g
    out[0] = np.nan
    return out


# ---------------------------------------------------------------------------
# Argument principle
# ---------------------------------------------------------------------------


def _edge(a: complex, b: complex, step: float) -> np.ndarray:
    n = max(2, int(math.ceil(abs(b - a) / step)) + 1)
    return a + (b - a) * np.linspace(0.0, 1.0, n)


def _rectangle(s0: float, s1: float, t0: float, t1: float, h_step: float, v_step: float,
               extra_sigma=()) -> np.ndarray:
    """Closed counter-clockwise polygon; the horizontal edges contain ``extra_sigma`` nodes."""
    def horiz(a, b, t):
        pts = _edge(complex(a, t), complex(b, t), h_step).real
        pts = np.unique(np.concatenate([pts, [x for x in extra_sigma if min(a, b) < x < max(a, b)]]))
        if a > b:
            pts = pts[::-1]
        return pts + 1j * t

    bottom = horiz(s0, s1, t0)
    right = _edge(complex(s1, t0), complex(s1, t1), v_step)
    top = horiz(s1, s0, t1)
    left = _edge(complex(s0, t1), complex(s0, t0), v_step)
    return np.concatenate([bottom[:-1], right[:-1], top[:-1], left])


@dataclass(frozen=True)
class Winding:
    total: np.ndarray
    nodes: int
    min_modulus: float
    converged: bool

    @property
    def counts(self) -> np.ndarray:
        return np.rint(self.total / (2 * np.pi)).astype(int)

    @property
    def defect(self) -> float:
        c = self.total / (2 * np.pi)
        return float(np.nanmax(np.abs(c - np.rint(c))))


def winding(evaluate, path: np.ndarray, max_nodes: int = 200_000) -> Winding:
    """Argument change of a family of functions around a closed polygon.

    ``evaluate(points)`` returns (cont, ang, side, modulus): ``cont`` is a
    continuous phase contribution known exactly, ``ang`` an angle in
    (-pi, pi], ``side`` an integer label per point and ``modulus`` |f|.
    Between points of the same side the change is d(cont) + wrap(d(ang));
    across sides it is wrap(d(cont + ang)).  Segments whose wrapped change
    exceeds 0.7 for any member are bisected.
    """
    pts = np.asarray(path, dtype=complex)
    cont, ang, side, mod = evaluate(pts)
    converged = True
    while True:
        dc = np.diff(cont, axis=0)
        da = _wrap(np.diff(ang, axis=0))
        full = _wrap(np.diff(cont + ang, axis=0))
        same = (side[1:] == side[:-1])[:, None]
        jump = np.where(same, da, full)
        bad = np.nanmax(np.abs(jump), axis=1) > WRAP_LIMIT
        seg_len = np.abs(np.diff(pts))
        bad &= seg_len > 1e-12
        if not np.any(bad):
            break
        if pts.size + bad.sum() > max_nodes:
            converged = False
            break
        idx = np.nonzero(bad)[0]
        mids = 0.5 * (pts[idx] + pts[idx + 1])
        c2, a2, s2, m2 = evaluate(mids)
        pts = np.insert(pts, idx + 1, mids)
        cont = np.insert(cont, idx + 1, c2, axis=0)
        ang = np.insert(ang, idx + 1, a2, axis=0)
        side = np.insert(side, idx + 1, s2)
        mod = np.insert(mod, idx + 1, m2, axis=0)
    total = np.where(same, dc + da, full).sum(axis=0)
    return Winding(total, int(pts.size), float(np.nanmin(mod)), converged)


def _completed_evaluator(family: CharacterFamily, members: np.ndarray):
    """Phase data of the completed L-function for the given character indices."""
    q = family.q
    par = family.parity[members]
    eps_arg = rotation_phases(family)[members]
    conj = (-members) % (q - 1)

    def evaluate(pts):
        n = pts.size
        cont = np.empty((n, members.size))
        ang = np.empty((n, members.size))
        mod = np.empty((n, members.size))
        side = (pts.real < 0.5).astype(int)
        for i, s in enumerate(pts):
            if side[i] == 0:
                lv = l_values(s, family)[members]
                g = np.where(par == 1, gamma_factor_log(s, 1, q).imag, gamma_factor_log(s, 0, q).imag)
            else:
                w = 1.0 - s
                lv = l_values(w, family)[conj]
                g = eps_arg + np.where(par == 1, gamma_factor_log(w, 1, q).imag, gamma_factor_log(w, 0, q).imag)
            cont[i] = g
            ang[i] = np.angle(lv)
            mod[i] = np.abs(lv)
        return cont, ang, side, mod

    return evaluate


def _plain_evaluator(family: CharacterFamily, members: np.ndarray):
    def evaluate(pts):
        vals = np.array([l_values(s, family)[members] for s in pts])
        zeros = np.zeros(vals.shape)
        return zeros, np.angle(vals), np.zeros(pts.size, dtype=int), np.abs(vals)

    return evaluate


def completed_zero_counts(
    family: CharacterFamily,
    t_lo: float,
    t_hi: float,
    members=None,
    sigma_left: float = -1.0,
    sigma_right: float = 2.0,
) -> Winding:
    """Zeros of the completed L-function in [sigma_left, sigma_right] x [t_lo, t_hi] by winding number."""
    if members is None:
        members = np.arange(1, family.q - 1)
    members = np.atleast_1d(np.asarray(members, dtype=int))
    path = _rectangle(sigma_left, sigma_right, t_lo, t_hi, 0.05, 0.25, extra_sigma=(0.5,))
    return winding(_completed_evaluator(family, members), path)


def zero_counts_region(
    family: CharacterFamily, sigma0: float, t1: float, t2: float, members=None,
    sigma_right: float = 2.0,
) -> np.ndarray:
    """Number of zeros with beta >= sigma0 and t1 <= gamma <= t2 for each requested character."""
    if members is None:
        members = np.arange(1, family.q - 1)
    members = np.atleast_1d(np.asarray(members, dtype=int))
    if t2 <= t1:
        raise DomainError("need t1 < t2")
    if sigma0 >= sigma_right:
        return np.zeros(members.size, dtype=int)
    evaluate = _plain_evaluator(family, members)
    lo_s, lo_t, hi_t = sigma0, t1, t2
    for attempt in range(4):
        h = min(0.05, (sigma_right - lo_s) / 4)
        path = _rectangle(lo_s, sigma_right, lo_t, hi_t, h, min(0.25, (hi_t - lo_t) / 2))
        w = winding(evaluate, path)
        if w.min_modulus >= 1e-12 and w.converged:
            return w.counts
        # move the boundary off a zero: shrink outward-facing edges slightly
        lo_s -= 1e-6
        lo_t -= 1e-6
        hi_t += 1e-6
    raise ContourError("rectangle boundary passes through a zero after 3 perturbations")


def zero_count_region(character: Character, sigma0: float, t1: float, t2: float) -> int:
    """Zeros of L(s, chi) with beta >= sigma0 and t1 <= gamma <= t2."""
    if character.is_principal:
        raise DomainError("zero counts are for non-principal characters")
    return int(zero_counts_region(character.family, sigma0, t1, t2, [character.index])[0])


def subdivide_boxes(count, box, min_side: float = 1e-4, max_boxes: int = 4096):
    """Recursively bisect a box (s0, s1, t0, t1) keeping sub-boxes with count > 0.

    Returns a list of (box, count) at side <= min_side.  ``count(box)`` must
    return the number of zeros inside.
    """
    out = []
    stack = [(box, count(box))]
    while stack:
        b, c = stack.pop()
        if c <= 0:
            continue
        s0, s1, t0, t1 = b
        if max(s1 - s0, t1 - t0) <= min_side or len(out) + len(stack) > max_boxes:
            out.append((b, c))
            continue
        if s1 - s0 >= t1 - t0:
            m = 0.5 * (s0 + s1)
            halves = [(s0, m, t0, t1), (m, s1, t0, t1)]
        else:
            m = 0.5 * (t0 + t1)
            halves = [(s0, s1, t0, m), (s0, s1, m, t1)]
        first = count(halves[0])
        stack.append((halves[0], first))
        stack.append((halves[1], c - first))
    return sorted(out)


# ---------------------------------------------------------------------------
# Zero lists
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroList:
    q: int
    index: int
    t_lo: float
    t_hi: float
    ordinates: np.ndarray
    widths: np.ndarray
    validated: bool
    discrepancy: int
    argument_count: int
    max_imag_residual: float
    suspects: tuple = field(default=())

    @property
    def count(self) -> int:
        return int(self.ordinates.size)

    @property
    def first(self) -> float:
        pos = self.ordinates[self.ordinates > 0]
        return float(pos[0]) if pos.size else math.nan

    def count_upto(self, t: float) -> int:
        """Zeros with ordinate in (0, t] (t > 0) or [t, 0) (t < 0)."""
        o = self.ordinates
        if t >= 0:
            return int(np.count_nonzero((o > 0) & (o <= t)))
        return int(np.count_nonzero((o < 0) & (o >= t)))


def _scan_grid(t_lo: float, t_hi: float, step: float) -> np.ndarray:
    n = max(2, int(math.ceil((t_hi - t_lo) / step)) + 1)
    return np.linspace(t_lo, t_hi, n)


def _refine_root(family: CharacterFamily, j: int, phase: float, a: float, b: float,
                 za: float, zb: float, xtol: float = 1e-10):
    chi = family.character(j)

    def zr(t):
        return z_function(t, chi, phase).real

    root = optimize.brentq(zr, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
    return root


def _grid_scan(family: CharacterFamily, members: np.ndarray, grid: np.ndarray, phases: np.ndarray):
    z = np.array([z_values(t, family, phases)[members] for t in grid])
    return z


def family_zeros(
    family: CharacterFamily,
    T: float,
    members=None,
    t_lo: float = 0.0,
    refine_rounds: int = 3,
) -> dict[int, ZeroList]:
    """Critical-line zeros with t_lo <= gamma <= T for the requested characters.

    Zeros are sign changes of the real function Z on a grid of step
    (2 pi / log q) / 20, refined by Brent's method to 1e-10.  Each list is
    checked against the winding number of the completed L-function around
    [-1, 2] x [t_lo, T]; mismatches trigger a 4x finer grid, up to three
    times, after which any remaining excess is localized by box bisection.
    """
    if T > MAX_HEIGHT or t_lo < -MAX_HEIGHT:
        raise DomainError(f"scan window must lie within |t| <= {MAX_HEIGHT}")
    if T <= t_lo:
        raise DomainError("need T > t_lo")
    if members is None:
        members = np.arange(1, family.q - 1)
    members = np.atleast_1d(np.asarray(members, dtype=int))
    if np.any(members == 0):
        raise DomainError("zeros are computed for non-principal characters")
    phases = rotation_phases(family)
    lo_edge, hi_edge = float(t_lo), float(T)
    # keep the horizontal contour edges away from zeros
    for _ in range(4):
        za = np.abs(l_values(0.5 + 1j * lo_edge, family)[members])
        zb = np.abs(l_values(0.5 + 1j * hi_edge, family)[members])
        if za.min() > 1e-6 and zb.min() > 1e-6:
            break
        if za.min() <= 1e-6:
            lo_edge -= 1e-4
        if zb.min() <= 1e-6:
            hi_edge += 1e-4
    wind = completed_zero_counts(family, lo_edge, hi_edge, members)
    target = wind.counts
    step = 2 * math.pi / math.log(family.q) / 20
    grid = _scan_grid(lo_edge, hi_edge, step)
    z = _grid_scan(family, members, grid, phases)
    result: dict[int, ZeroList] = {}
    pending = list(range(members.size))
    for rnd in range(refine_rounds + 1):
        still = []
        for col in pending:
            j = int(members[col])
            zr = z[:, col].real
            resid = float(np.max(np.abs(z[:, col].imag)))
            flips = np.nonzero(np.sign(zr[:-1]) * np.sign(zr[1:]) < 0)[0]
            exact = grid[np.nonzero(zr == 0)[0]]
            roots = [
                _refine_root(family, j, phases[j], grid[i], grid[i + 1], zr[i], zr[i + 1])
                for i in flips
            ]
            roots = np.sort(np.concatenate([roots, exact])) if exact.size else np.array(roots)
            roots = roots[(roots >= t_lo) & (roots <= T)]
            n_in = int(np.count_nonzero((np.asarray(roots) >= lo_edge) & (np.asarray(roots) <= hi_edge)))
            disc = int(target[col]) - n_in
            result[j] = ZeroList(
                family.q, j, float(t_lo), float(T), np.asarray(roots, dtype=float),
                np.full(len(roots), 1e-10), disc == 0 and wind.converged, disc,
                int(target[col]), resid,
            )
            if disc != 0:
                still.append(col)
        pending = still
        if not pending or rnd == refine_rounds:
            break
        step /= 4
        grid = _scan_grid(lo_edge, hi_edge, step)
        z = _grid_scan(family, members, grid, phases)
    for col in pending:
        j = int(members[col])
        zl = result[j]
        suspects = _off_critical_suspects(family, j, lo_edge, hi_edge)
        result[j] = ZeroList(
            zl.q, zl.index, zl.t_lo, zl.t_hi, zl.ordinates, zl.widths, False,
            zl.discrepancy, zl.argument_count, zl.max_imag_residual, tuple(suspects),
        )
    return result


def _off_critical_suspects(family: CharacterFamily, j: int, t_lo: float, t_hi: float):
    def count(box):
        s0, s1, t0, t1 = box
        return int(zero_counts_region(family, s0, t0, t1, [j], sigma_right=s1)[0])

    return subdivide_boxes(count, (0.5 + 1e-6, 1.0, t_lo, t_hi))


def critical_zeros(character: Character, T: float, t_lo: float = 0.0) -> ZeroList:
    if character.is_principal:
        raise DomainError("zeros are computed for non-principal characters")
    return family_zeros(character.family, T, [character.index], t_lo)[character.index]


# ---------------------------------------------------------------------------
# Approximation machinery
# ---------------------------------------------------------------------------


def sigma_t_chi(t: float, zeros, x: float, eta: float) -> float:
    """1/2 + 2 max(beta - 1/2, eta/log x) over zeros with beta >= 1/2 and |t - gamma| <= x^(3(beta-1/2))/log x."""
    if eta < 1:
        raise PreconditionError("need eta >= 1")
    if x < 2:
        raise PreconditionError("need x >= 2")
    lx = math.log(x)
    best = eta / lx
    if isinstance(zeros, ZeroList):
        pairs = [(0.5, g) for g in zeros.ordinates]
        pairs += [(0.5 * (b[0] + b[1]), 0.5 * (b[2] + b[3])) for b, _ in zeros.suspects]
    else:
        pairs = list(zeros)
    for beta, gamma in pairs:
        if beta >= 0.5 and abs(t - gamma) <= x ** (3 * (beta - 0.5)) / lx:
            best = max(best, beta - 0.5)
    return 0.5 + 2 * best


def dirichlet_remainder(t: float, character: Character, x: float, eta: float, zeros=()) -> complex:
    """r(x, t) = sum_{n < x^3} Lambda_x(n) chi(n) n^-s with s = sigma_{t,chi} + it."""
    sig = sigma_t_chi(t, zeros, x, eta)
    if x**3 <= 2:
        return 0j
    table = smoothed_lambda_table(x)
    n = table.n
    s = complex(sig, t)
    return complex(np.sum(table.values * character(n) * np.exp(-s * np.log(n.astype(float)))))


@dataclass(frozen=True)
class ExplicitFormulaResult:
    residual: float
    truncation_bound: float
    lhs: complex
    rhs: complex


def explicit_formula_residual(
    s: complex, character: Character, x: float, zeros: ZeroList, conj_zeros: ZeroList,
    trivial_terms: int = 50,
) -> ExplicitFormulaResult:
    """|L'/L(s) - (smoothed prime sum + zero sum + trivial-zero sum)|.

    ``zeros`` supplies the ordinates of chi in [0, T] and ``conj_zeros`` those
    of conj chi in (0, T]; the latter reflect to the zeros of chi below the real
    axis.  Negative ordinates in either list are ignored.  The trivial-zero term uses the cube (s + 2m + a)^3.
    """
    s = complex(s)
    height = min(zeros.t_hi, conj_zeros.t_hi)
    if height < abs(s.imag) + 50:
        raise PreconditionError(f"zeros needed up to |Im s| + 50 = {abs(s.imag) + 50:g}")
    if conj_zeros.index != character.conj().index or zeros.index != character.index:
        raise PreconditionError("zero lists do not match the character and its conjugate")
    lhs = log_deriv(s, character)
    lx = math.log(x)
    table = smoothed_lambda_table(x)
    n = table.n.astype(float)
    prime_part = -np.sum(table.values * character(table.n) * np.exp(-s * np.log(n)))
    # negative ordinates come from the reflected conjugate list, so lists scanned
    # from below zero are trimmed to keep each zero once
    up = zeros.ordinates[zeros.ordinates >= 0]
    down = conj_zeros.ordinates[conj_zeros.ordinates > 0]
    rho = np.concatenate([0.5 + 1j * up, 0.5 - 1j * down])
    rho = rho[np.abs(rho.imag) <= height]
    w = np.exp((rho - s) * lx)
    zero_part = np.sum(w * (1 - w) ** 2 / (s - rho) ** 3) / lx**2
    m = np.arange(trivial_terms)
    tz = -2 * m - character.parity
    wt = np.exp((tz - s) * lx)
    trivial_part = np.sum(wt * (1 - wt) ** 2 / (s - tz) ** 3) / lx**2
    rhs = prime_part + zero_part + trivial_part
    xs = x ** (0.5 - s.real)
    gap = height - abs(s.imag)
    bound = 2 * xs * (1 + xs) ** 2 * math.log(character.q * height / (2 * math.pi) + math.e)
    bound /= 2 * math.pi * gap**2 * lx**2
    return ExplicitFormulaResult(float(abs(lhs - rhs)), bound, lhs, complex(rhs))


# ---------------------------------------------------------------------------
# Littlewood identity on 1 - a 2^-s
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LittlewoodResult:
    lhs: float
    rhs: float
    t1: float
    t2: float
    zeros: tuple

    @property
    def difference(self) -> float:
        return abs(self.lhs - self.rhs)


def _log_abs_f(a: float, s):
    return np.log(np.abs(1.0 - a * np.exp(-np.asarray(s) * math.log(2.0))))


def littlewood_identity_check(
    a: float, sigma_prime: float, t1: float, t2: float,
    quad: Quadrature = Quadrature(abs_tol=1e-13, rel_tol=1e-13),
) -> LittlewoodResult:
    """Both sides of the Littlewood-type identity for f(s) = 1 - a 2^-s.

    The growth hypothesis needs log 2 > pi / (t2 - t1), i.e. a window wider
    than pi / log 2.
    """
    if a <= 0:
        raise PreconditionError("need a > 0")
    width = t2 - t1
    if width <= math.pi / math.log(2.0):
        raise PreconditionError(
            f"growth condition needs t2 - t1 > pi/log 2 = {math.pi / math.log(2):.6f}, got {width:g}"
        )
    ln2 = math.log(2.0)
    beta = math.log2(a)
    period = 2 * math.pi / ln2
    # move the window if a zero sits on its boundary
    for _ in range(10):
        ks = np.arange(math.floor(t1 / period) - 1, math.ceil(t2 / period) + 2)
        gam = ks * period
        on_edge = np.any(np.minimum(np.abs(gam - t1), np.abs(gam - t2)) < 1e-9)
        if not on_edge and abs(beta - sigma_prime) > 1e-9:
            break
        t1 += 1e-4
        t2 += 1e-4
    c = math.pi / width
    inside = (gam >= t1) & (gam <= t2)
    zeros = tuple((beta, float(g)) for g in gam[inside]) if beta >= sigma_prime else ()
    lhs = 2 * width * math.fsum(
        math.sin(c * (g - t1)) * math.sinh(c * (b - sigma_prime)) for b, g in zeros
    )
    vertical = integrate(
        lambda t: np.sin(c * (t - t1)) * _log_abs_f(a, sigma_prime + 1j * t), t1, t2, quad,
        points=[g for g in gam if t1 < g < t2],
    ).value
    # horizontal integrals: quadrature up to sigma_c, series tail beyond it
    sigma_c = max(sigma_prime, math.log2(a) + math.log2(1e3)) + 1.0

    def horiz(sig):
        return np.sinh(c * (sig - sigma_prime)) * (
            _log_abs_f(a, sig + 1j * t1) + _log_abs_f(a, sig + 1j * t2)
        )

    brk = [beta] if sigma_prime < beta < sigma_c else []
    near = integrate(horiz, sigma_prime, sigma_c, quad, points=brk).value
    tail = 0.0
    for k in range(1, 200):
        rate = k * ln2
        if rate <= c:
            raise PreconditionError("tail series diverges")
        term = 0.0
        for t in (t1, t2):
            phase = np.exp(-1j * rate * t)
            up = math.exp(-c * sigma_prime) * math.exp((c - rate) * sigma_c) / (rate - c)
            down = math.exp(c * sigma_prime) * math.exp((-c - rate) * sigma_c) / (rate + c)
            term += (a**k / k * phase * 0.5 * (up - down)).real
        tail -= term
        if abs(term) < 1e-18:
            break
    rhs = float(vertical) + float(near) + float(tail)
    return LittlewoodResult(float(lhs), rhs, float(t1), float(t2), zeros)
