"""Pure-Python torus kernels.

Points of the torus R^2/Z^2 are integer triples ``(x, y, d)`` standing for
``(x/d, y/d)`` with ``0 <= x, y < d`` and ``gcd(x, y, d) == 1``.  Affine maps
are 7-tuples ``(a, b, c, e, tx, ty, td)`` for ``z -> [[a, b], [c, e]] z +
(tx, ty)/td``.

This module is the reference implementation; the compiled extension mirrors
every function here and defers to it whenever inputs exceed machine-word
bounds.
"""
from functools import lru_cache
from math import gcd

ROTATIONS = {
    2: (-1, 0, 0, -1),
    3: (0, -1, 1, -1),
    4: (0, -1, 1, 0),
    6: (1, -1, 1, 0),
}


def _mul(m, k):
    a, b, c, e = m
    p, q, r, s = k
    return (a * p + b * r, a * q + b * s, c * p + e * r, c * q + e * s)


def _powers(n):
    out = [(1, 0, 0, 1)]
    for _ in range(1, n):
        out.append(_mul(out[-1], ROTATIONS[n]))
    return tuple(out)


POWERS = {n: _powers(n) for n in ROTATIONS}


def normalize(x, y, d):
    if d < 0:
        x, y, d = -x, -y, -d
    x %= d
    y %= d
    g = gcd(gcd(x, y), d)
    if g != 1:
        x //= g
        y //= g
        d //= g
    return (x, y, d)


def affine_apply(m, x, y, d):
    a, b, c, e, tx, ty, td = m
    return normalize((a * x + b * y) * td + tx * d,
                     (c * x + e * y) * td + ty * d, d * td)


@lru_cache(maxsize=4096)
def coset_reps(a, b, c, e):
    """Representatives of Z^2 / A Z^2 for A = [[a, b], [c, e]] nonsingular."""
    # column-style Hermite basis (g, h), (0, det/g)
    g0, s, t = _xgcd(a, b)
    det = a * e - b * c
    if det == 0:
        raise ZeroDivisionError("singular matrix has no finite coset set")
    h2 = abs(det // g0)
    return tuple((i, j) for i in range(g0) for j in range(h2))


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        return -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def affine_preimages(m, x, y, d):
    a, b, c, e, tx, ty, td = m
    det = a * e - b * c
    big = d * td
    qx = x * td - tx * d
    qy = y * td - ty * d
    den = big * det
    out = []
    for i, j in coset_reps(a, b, c, e):
        ux = qx + i * big
        uy = qy + j * big
        out.append(normalize(e * ux - b * uy, a * uy - c * ux, den))
    return out


def orbit_points(n, x, y, d):
    """Distinct points of the rotation orbit, in power order."""
    seen = []
    for r0, r1, r2, r3 in POWERS[n]:
        p = ((r0 * x + r1 * y) % d, (r2 * x + r3 * y) % d, d)
        if p not in seen:
            seen.append(p)
    return seen


def orbit_canonical(n, x, y, d):
    pts = orbit_points(n, x, y, d)
    bx, by, _ = min(pts)
    return (bx, by, d, len(pts))


def stabilizer_order(n, x, y, d):
    count = 0
    for r0, r1, r2, r3 in POWERS[n]:
        if (r0 * x + r1 * y - x) % d == 0 and (r2 * x + r3 * y - y) % d == 0:
            count += 1
    return count


def project(n, q, x, y, d):
    """Sphere representative of pi0(Q(z))."""
    px, py, pd = affine_apply(q, x, y, d)
    cx, cy, cd, _ = orbit_canonical(n, px, py, pd)
    return (cx, cy, cd)


def pi_fiber(n, q, x, y, d):
    out = []
    for ox, oy, od in orbit_points(n, x, y, d):
        out.extend(affine_preimages(q, ox, oy, od))
    return out


def project_preimages(n, f, q, x, y, d):
    """Sorted distinct sphere representatives of pi(F^-1(z))."""
    seen = set()
    for px, py, pd in affine_preimages(f, x, y, d):
        seen.add(project(n, q, px, py, pd))
    return sorted(seen)


def transversal_failure(n, f, q, x, y, d):
    """Check every lift of the sphere point with representative (x, y, d).

    Returns None when each lift is hit by a lift of every f-preimage,
    otherwise ``(lift, missing_sphere_point)``.
    """
    fiber = pi_fiber(n, q, x, y, d)
    images = [project_preimages(n, f, q, *z) for z in fiber]
    target = set()
    for im in images:
        target.update(im)
    for z, im in zip(fiber, images):
        if len(im) != len(target):
            missing = min(target.difference(im))
            return (z, missing)
    return None
