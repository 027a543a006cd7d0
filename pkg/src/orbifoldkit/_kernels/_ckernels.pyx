# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled torus kernels; same contracts as ``_pykernels``.

Inputs outside the word-size envelope are handed to the Python module.
"""
from . import _pykernels as _py

ctypedef long long i64

cdef i64 MAT_LIMIT = 1 << 8
cdef i64 TR_LIMIT = 1 << 12
cdef i64 DEN_LIMIT = 1 << 20

cdef i64 ROT[7][4]


cdef void _init_rotations():
    cdef int n, i
    for n, gen in _py.ROTATIONS.items():
        for i in range(4):
            ROT[n][i] = gen[i]


_init_rotations()

ROTATIONS = _py.ROTATIONS
POWERS = _py.POWERS
coset_reps = _py.coset_reps


cdef inline i64 _mod(i64 a, i64 m) nogil:
    cdef i64 r = a % m
    if r < 0:
        r += m
    return r


cdef inline i64 _gcd(i64 a, i64 b) nogil:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


cdef inline i64 _abs(i64 a) nogil:
    return -a if a < 0 else a


cdef inline bint _map_ok(tuple m):
    cdef int i
    for i in range(4):
        if not -MAT_LIMIT < m[i] < MAT_LIMIT:
            return False
    return (-TR_LIMIT < m[4] < TR_LIMIT and -TR_LIMIT < m[5] < TR_LIMIT
            and 0 < m[6] < TR_LIMIT)


cdef inline bint _den_ok(object d):
    return 0 < d < DEN_LIMIT


cdef struct Pt:
    i64 x
    i64 y
    i64 d


cdef inline Pt _norm(i64 x, i64 y, i64 d) nogil:
    cdef Pt p
    cdef i64 g
    if d < 0:
        x = -x
        y = -y
        d = -d
    x = _mod(x, d)
    y = _mod(y, d)
    g = _gcd(_gcd(x, y), d)
    if g != 1:
        x //= g
        y //= g
        d //= g
    p.x = x
    p.y = y
    p.d = d
    return p


cdef inline Pt _apply(i64* m, i64 x, i64 y, i64 d) nogil:
    return _norm((m[0] * x + m[1] * y) * m[6] + m[4] * d,
                 (m[2] * x + m[3] * y) * m[6] + m[5] * d, d * m[6])


cdef inline void _load(tuple t, i64* m):
    cdef int i
    for i in range(7):
        m[i] = t[i]


cdef int _orbit(int n, i64 x, i64 y, i64 d, Pt* out) nogil:
    """Fill out with distinct orbit points; return count."""
    cdef int k, j, cnt = 0
    cdef i64 cx = x, cy = y, nx, ny
    cdef bint dup
    for k in range(n):
        dup = False
        for j in range(cnt):
            if out[j].x == cx and out[j].y == cy:
                dup = True
                break
        if not dup:
            out[cnt].x = cx
            out[cnt].y = cy
            out[cnt].d = d
            cnt += 1
        nx = _mod(ROT[n][0] * cx + ROT[n][1] * cy, d)
        ny = _mod(ROT[n][2] * cx + ROT[n][3] * cy, d)
        cx = nx
        cy = ny
    return cnt


cdef inline Pt _canon(int n, i64 x, i64 y, i64 d, int* size) nogil:
    cdef Pt buf[6]
    cdef int cnt = _orbit(n, x, y, d, buf)
    cdef int j
    cdef Pt best = buf[0]
    for j in range(1, cnt):
        if buf[j].x < best.x or (buf[j].x == best.x and buf[j].y < best.y):
            best = buf[j]
    size[0] = cnt
    return best


def normalize(x, y, d):
    if not (_den_ok(abs(d)) and abs(x) < DEN_LIMIT * DEN_LIMIT
            and abs(y) < DEN_LIMIT * DEN_LIMIT):
        return _py.normalize(x, y, d)
    cdef Pt p = _norm(x, y, d)
    return (p.x, p.y, p.d)


def affine_apply(tuple m, x, y, d):
    if not (_map_ok(m) and _den_ok(d)):
        return _py.affine_apply(m, x, y, d)
    cdef i64 mm[7]
    _load(m, mm)
    cdef Pt p = _apply(mm, x, y, d)
    return (p.x, p.y, p.d)


cdef list _preimages(i64* m, i64 x, i64 y, i64 d, tuple reps):
    cdef i64 det = m[0] * m[3] - m[1] * m[2]
    cdef i64 big = d * m[6]
    cdef i64 qx = x * m[6] - m[4] * d
    cdef i64 qy = y * m[6] - m[5] * d
    cdef i64 den = big * det
    cdef i64 ux, uy, i, j
    cdef Pt p
    cdef list out = []
    for i, j in reps:
        ux = qx + i * big
        uy = qy + j * big
        p = _norm(m[3] * ux - m[1] * uy, m[0] * uy - m[2] * ux, den)
        out.append((p.x, p.y, p.d))
    return out


def affine_preimages(tuple m, x, y, d):
    if not (_map_ok(m) and _den_ok(d)):
        return _py.affine_preimages(m, x, y, d)
    cdef i64 mm[7]
    _load(m, mm)
    return _preimages(mm, x, y, d, coset_reps(m[0], m[1], m[2], m[3]))


def orbit_points(int n, x, y, d):
    if not _den_ok(d):
        return _py.orbit_points(n, x, y, d)
    cdef Pt buf[6]
    cdef int cnt = _orbit(n, x, y, d, buf)
    return [(buf[j].x, buf[j].y, buf[j].d) for j in range(cnt)]


def orbit_canonical(int n, x, y, d):
    if not _den_ok(d):
        return _py.orbit_canonical(n, x, y, d)
    cdef int size
    cdef Pt p = _canon(n, x, y, d, &size)
    return (p.x, p.y, p.d, size)


def stabilizer_order(int n, x, y, d):
    if not _den_ok(d):
        return _py.stabilizer_order(n, x, y, d)
    cdef int size
    _canon(n, x, y, d, &size)
    return n // size


def project(int n, tuple q, x, y, d):
    if not (_map_ok(q) and _den_ok(d)):
        return _py.project(n, q, x, y, d)
    cdef i64 mq[7]
    _load(q, mq)
    cdef int size
    cdef Pt p = _apply(mq, x, y, d)
    if not p.d < DEN_LIMIT:
        return _py.project(n, q, x, y, d)
    p = _canon(n, p.x, p.y, p.d, &size)
    return (p.x, p.y, p.d)


def pi_fiber(int n, tuple q, x, y, d):
    if not (_map_ok(q) and _den_ok(d)):
        return _py.pi_fiber(n, q, x, y, d)
    cdef i64 mq[7]
    _load(q, mq)
    cdef Pt buf[6]
    cdef int cnt = _orbit(n, x, y, d, buf)
    cdef int j
    cdef list out = []
    cdef tuple reps = coset_reps(q[0], q[1], q[2], q[3])
    for j in range(cnt):
        out.extend(_preimages(mq, buf[j].x, buf[j].y, buf[j].d, reps))
    return out


cdef list _project_preimages(int n, i64* mf, i64* mq, i64 x, i64 y, i64 d,
                             tuple reps):
    cdef i64 det = mf[0] * mf[3] - mf[1] * mf[2]
    cdef i64 big = d * mf[6]
    cdef i64 qx = x * mf[6] - mf[4] * d
    cdef i64 qy = y * mf[6] - mf[5] * d
    cdef i64 den = big * det
    cdef i64 ux, uy, i, j
    cdef int size
    cdef Pt p
    cdef set seen = set()
    for i, j in reps:
        ux = qx + i * big
        uy = qy + j * big
        p = _norm(mf[3] * ux - mf[1] * uy, mf[0] * uy - mf[2] * ux, den)
        p = _apply(mq, p.x, p.y, p.d)
        p = _canon(n, p.x, p.y, p.d, &size)
        seen.add((p.x, p.y, p.d))
    return sorted(seen)


cdef bint _pair_ok(tuple f, tuple q, object d):
    if not (_map_ok(f) and _map_ok(q) and _den_ok(d)):
        return False
    det = abs(f[0] * f[3] - f[1] * f[2])
    # preimage and projection denominators must stay in range
    return d * f[6] * det * q[6] < DEN_LIMIT


def project_preimages(int n, tuple f, tuple q, x, y, d):
    if not _pair_ok(f, q, d):
        return _py.project_preimages(n, f, q, x, y, d)
    cdef i64 mf[7]
    cdef i64 mq[7]
    _load(f, mf)
    _load(q, mq)
    return _project_preimages(n, mf, mq, x, y, d,
                              coset_reps(f[0], f[1], f[2], f[3]))


def transversal_failure(int n, tuple f, tuple q, x, y, d):
    if not _pair_ok(f, q, d):
        return _py.transversal_failure(n, f, q, x, y, d)
    cdef i64 mf[7]
    cdef i64 mq[7]
    _load(f, mf)
    _load(q, mq)
    fiber = pi_fiber(n, q, x, y, d)
    cdef tuple reps = coset_reps(f[0], f[1], f[2], f[3])
    images = []
    target = set()
    for z in fiber:
        if not _pair_ok(f, q, z[2]):
            return _py.transversal_failure(n, f, q, x, y, d)
        im = _project_preimages(n, mf, mq, z[0], z[1], z[2], reps)
        images.append(im)
        target.update(im)
    for z, im in zip(fiber, images):
        if len(im) != len(target):
            return (z, min(target.difference(im)))
    return None
