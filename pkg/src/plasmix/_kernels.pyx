# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled time-stepping kernels (hot-loop backend).

Mirror of ``_kernels_py`` with identical floating-point expression trees;
compiled with -ffp-contract=off so results are bit-identical to the numpy
fallback.  Any change to an update formula here must be mirrored there.
"""

from libc.math cimport fabs
from libc.string cimport memcpy

import numpy as np

from .errors import FluxSingularityError

BACKEND_NAME = "compiled"

DEF DEN_EPS = 1e-14


cdef Py_ssize_t _flux_update(
    const double* xi1, const double* xi2, double* n1, double* n2,
    const double* mix, double inv_dx, Py_ssize_t m,
) nogil:
    """Returns -1 on success, else the index of a singular node."""
    cdef double alpha = mix[0]
    cdef double beta = mix[1]
    cdef double inv_d13 = mix[2]
    cdef double inv_d23 = mix[3]
    cdef double dd = mix[4]
    cdef double a13 = mix[5]
    cdef double b23 = mix[6]
    cdef double g1, g2, den, gam
    cdef Py_ssize_t j
    for j in range(m):
        if j < m - 1:
            g1 = (xi1[j + 1] - xi1[j]) * inv_dx
            g2 = (xi2[j + 1] - xi2[j]) * inv_dx
        else:
            g1 = (-xi1[j]) * inv_dx
            g2 = (-xi2[j]) * inv_dx
        den = (1.0 + a13 * xi2[j]) + b23 * xi1[j]
        if fabs(den) < DEN_EPS:
            return j
        gam = dd / den
        n1[j] = gam * ((inv_d23 + beta * xi1[j]) * (-g1) + (alpha * xi1[j]) * (-g2))
        n2[j] = gam * ((beta * xi2[j]) * (-g1) + (inv_d13 + alpha * xi2[j]) * (-g2))
    n1[0] = 0.0
    n1[m - 1] = 0.0
    n2[0] = 0.0
    n2[m - 1] = 0.0
    return -1


cdef void _diffusion_apply(
    double* xi1, double* xi2, const double* n1, const double* n2,
    double dt, double inv_dx, Py_ssize_t m,
) nogil:
    cdef Py_ssize_t j
    xi1[0] = xi1[0] - dt * (n1[0] * inv_dx)
    xi2[0] = xi2[0] - dt * (n2[0] * inv_dx)
    for j in range(1, m):
        xi1[j] = xi1[j] - dt * ((n1[j] - n1[j - 1]) * inv_dx)
        xi2[j] = xi2[j] - dt * ((n2[j] - n2[j - 1]) * inv_dx)


cdef void _reaction_apply(
    double* xi1, double* xi2, const double* rc, double dt, Py_ssize_t m,
) nogil:
    cdef double a11 = rc[0], a12 = rc[1], c1 = rc[2]
    cdef double a21 = rc[3], a22 = rc[4], c2 = rc[5]
    cdef double r1, r2
    cdef Py_ssize_t j
    for j in range(m):
        r1 = (a11 * xi1[j] + a12 * xi2[j]) + c1
        r2 = (a21 * xi1[j] + a22 * xi2[j]) + c2
        xi1[j] = xi1[j] + dt * r1
        xi2[j] = xi2[j] + dt * r2


cdef void _picard_sweep(
    const double* anchor1, const double* anchor2,
    const double* cur1, const double* cur2,
    const double* n1, const double* n2,
    double* new1, double* new2,
    const double* rc, double dt, double inv_dx, Py_ssize_t m,
) nogil:
    cdef double a11 = rc[0], a12 = rc[1], c1 = rc[2]
    cdef double a21 = rc[3], a22 = rc[4], c2 = rc[5]
    cdef double d1, d2
    cdef Py_ssize_t j
    for j in range(m):
        if j == 0:
            d1 = n1[0] * inv_dx
            d2 = n2[0] * inv_dx
        else:
            d1 = (n1[j] - n1[j - 1]) * inv_dx
            d2 = (n2[j] - n2[j - 1]) * inv_dx
        new1[j] = (anchor1[j] - dt * d1) + dt * ((a11 * cur1[j] + a12 * cur2[j]) + c1)
        new2[j] = (anchor2[j] - dt * d2) + dt * ((a21 * cur1[j] + a22 * cur2[j]) + c2)


cdef object _raise_singular(const double* xi1, const double* xi2,
                            const double* mix, Py_ssize_t j):
    cdef double den = (1.0 + mix[5] * xi2[j]) + mix[6] * xi1[j]
    raise FluxSingularityError(int(j), xi1[j], xi2[j], den)


def flux_update(const double[::1] xi1, const double[::1] xi2,
                double[::1] n1, double[::1] n2,
                const double[::1] mix, double inv_dx):
    cdef Py_ssize_t m = xi1.shape[0]
    cdef Py_ssize_t bad
    with nogil:
        bad = _flux_update(&xi1[0], &xi2[0], &n1[0], &n2[0], &mix[0], inv_dx, m)
    if bad >= 0:
        _raise_singular(&xi1[0], &xi2[0], &mix[0], bad)


def diffusion_apply(double[::1] xi1, double[::1] xi2,
                    const double[::1] n1, const double[::1] n2,
                    double dt, double inv_dx):
    cdef Py_ssize_t m = xi1.shape[0]
    with nogil:
        _diffusion_apply(&xi1[0], &xi2[0], &n1[0], &n2[0], dt, inv_dx, m)


def reaction_apply(double[::1] xi1, double[::1] xi2, const double[::1] rc, double dt):
    cdef Py_ssize_t m = xi1.shape[0]
    with nogil:
        _reaction_apply(&xi1[0], &xi2[0], &rc[0], dt, m)


def advance_pure_diffusion(double[::1] xi1, double[::1] xi2,
                           double[::1] n1, double[::1] n2,
                           const double[::1] mix, const double[::1] rc,
                           double inv_dx, double dt, Py_ssize_t nsteps,
                           Py_ssize_t iters=0, Py_ssize_t inner=0, Py_ssize_t outer=0):
    cdef Py_ssize_t m = xi1.shape[0]
    cdef Py_ssize_t s, bad = -1
    with nogil:
        for s in range(nsteps):
            _diffusion_apply(&xi1[0], &xi2[0], &n1[0], &n2[0], dt, inv_dx, m)
            bad = _flux_update(&xi1[0], &xi2[0], &n1[0], &n2[0], &mix[0], inv_dx, m)
            if bad >= 0:
                break
    if bad >= 0:
        _raise_singular(&xi1[0], &xi2[0], &mix[0], bad)


def advance_ab(double[::1] xi1, double[::1] xi2,
               double[::1] n1, double[::1] n2,
               const double[::1] mix, const double[::1] rc,
               double inv_dx, double dt, Py_ssize_t nsteps,
               Py_ssize_t iters=0, Py_ssize_t inner=0, Py_ssize_t outer=0):
    cdef Py_ssize_t m = xi1.shape[0]
    cdef Py_ssize_t s, bad = -1
    with nogil:
        for s in range(nsteps):
            _diffusion_apply(&xi1[0], &xi2[0], &n1[0], &n2[0], dt, inv_dx, m)
            _reaction_apply(&xi1[0], &xi2[0], &rc[0], dt, m)
            bad = _flux_update(&xi1[0], &xi2[0], &n1[0], &n2[0], &mix[0], inv_dx, m)
            if bad >= 0:
                break
    if bad >= 0:
        _raise_singular(&xi1[0], &xi2[0], &mix[0], bad)


def advance_aba_frozen(double[::1] xi1, double[::1] xi2,
                       double[::1] n1, double[::1] n2,
                       const double[::1] mix, const double[::1] rc,
                       double inv_dx, double dt, Py_ssize_t nsteps,
                       Py_ssize_t iters=0, Py_ssize_t inner=0, Py_ssize_t outer=0):
    cdef Py_ssize_t m = xi1.shape[0]
    cdef double half = 0.5 * dt
    cdef Py_ssize_t s, bad = -1
    with nogil:
        for s in range(nsteps):
            bad = _flux_update(&xi1[0], &xi2[0], &n1[0], &n2[0], &mix[0], inv_dx, m)
            if bad >= 0:
                break
            _diffusion_apply(&xi1[0], &xi2[0], &n1[0], &n2[0], half, inv_dx, m)
            _reaction_apply(&xi1[0], &xi2[0], &rc[0], dt, m)
            _diffusion_apply(&xi1[0], &xi2[0], &n1[0], &n2[0], half, inv_dx, m)
    if bad >= 0:
        _raise_singular(&xi1[0], &xi2[0], &mix[0], bad)


def advance_aba_updated(double[::1] xi1, double[::1] xi2,
                        double[::1] n1, double[::1] n2,
                        const double[::1] mix, const double[::1] rc,
                        double inv_dx, double dt, Py_ssize_t nsteps,
                        Py_ssize_t iters=0, Py_ssize_t inner=0, Py_ssize_t outer=0):
    cdef Py_ssize_t m = xi1.shape[0]
    cdef double half = 0.5 * dt
    cdef Py_ssize_t s, bad = -1
    with nogil:
        for s in range(nsteps):
            bad = _flux_update(&xi1[0], &xi2[0], &n1[0], &n2[0], &mix[0], inv_dx, m)
            if bad >= 0:
                break
            _diffusion_apply(&xi1[0], &xi2[0], &n1[0], &n2[0], half, inv_dx, m)
            _reaction_apply(&xi1[0], &xi2[0], &rc[0], half, m)
            bad = _flux_update(&xi1[0], &xi2[0], &n1[0], &n2[0], &mix[0], inv_dx, m)
            if bad >= 0:
                break
            _reaction_apply(&xi1[0], &xi2[0], &rc[0], half, m)
            _diffusion_apply(&xi1[0], &xi2[0], &n1[0], &n2[0], half, inv_dx, m)
    if bad >= 0:
        _raise_singular(&xi1[0], &xi2[0], &mix[0], bad)


def advance_picard(double[::1] xi1, double[::1] xi2,
                   double[::1] n1, double[::1] n2,
                   const double[::1] mix, const double[::1] rc,
                   double inv_dx, double dt, Py_ssize_t nsteps,
                   Py_ssize_t iters, Py_ssize_t inner=0, Py_ssize_t outer=0):
    cdef Py_ssize_t m = xi1.shape[0]
    work = np.empty((4, m))
    cdef double[:, ::1] wv = work
    cdef double* anchor1 = &wv[0, 0]
    cdef double* anchor2 = &wv[1, 0]
    cdef double* buf1 = &wv[2, 0]
    cdef double* buf2 = &wv[3, 0]
    cdef double* cur1 = &xi1[0]
    cdef double* cur2 = &xi2[0]
    cdef double* tmp
    cdef Py_ssize_t s, i, bad = -1
    with nogil:
        for s in range(nsteps):
            memcpy(anchor1, cur1, m * sizeof(double))
            memcpy(anchor2, cur2, m * sizeof(double))
            for i in range(iters):
                _picard_sweep(anchor1, anchor2, cur1, cur2, &n1[0], &n2[0],
                              buf1, buf2, &rc[0], dt, inv_dx, m)
                tmp = cur1; cur1 = buf1; buf1 = tmp
                tmp = cur2; cur2 = buf2; buf2 = tmp
                bad = _flux_update(cur1, cur2, &n1[0], &n2[0], &mix[0], inv_dx, m)
                if bad >= 0:
                    break
            if bad >= 0:
                break
        if cur1 != &xi1[0]:
            memcpy(&xi1[0], cur1, m * sizeof(double))
            memcpy(&xi2[0], cur2, m * sizeof(double))
    if bad >= 0:
        _raise_singular(&xi1[0], &xi2[0], &mix[0], bad)


def advance_nested(double[::1] xi1, double[::1] xi2,
                   double[::1] n1, double[::1] n2,
                   const double[::1] mix, const double[::1] rc,
                   double inv_dx, double dt, Py_ssize_t nsteps,
                   Py_ssize_t iters=0, Py_ssize_t inner=1, Py_ssize_t outer=1):
    cdef Py_ssize_t m = xi1.shape[0]
    work = np.empty((4, m))
    cdef double[:, ::1] wv = work
    cdef double* anchor1 = &wv[0, 0]
    cdef double* anchor2 = &wv[1, 0]
    cdef double* buf1 = &wv[2, 0]
    cdef double* buf2 = &wv[3, 0]
    cdef double* cur1 = &xi1[0]
    cdef double* cur2 = &xi2[0]
    cdef double* tmp
    cdef Py_ssize_t s, i, j, bad = -1
    with nogil:
        for s in range(nsteps):
            memcpy(anchor1, cur1, m * sizeof(double))
            memcpy(anchor2, cur2, m * sizeof(double))
            for j in range(outer):
                for i in range(inner):
                    _picard_sweep(anchor1, anchor2, cur1, cur2, &n1[0], &n2[0],
                                  buf1, buf2, &rc[0], dt, inv_dx, m)
                    tmp = cur1; cur1 = buf1; buf1 = tmp
                    tmp = cur2; cur2 = buf2; buf2 = tmp
                bad = _flux_update(cur1, cur2, &n1[0], &n2[0], &mix[0], inv_dx, m)
                if bad >= 0:
                    break
            if bad >= 0:
                break
        if cur1 != &xi1[0]:
            memcpy(&xi1[0], cur1, m * sizeof(double))
            memcpy(&xi2[0], cur2, m * sizeof(double))
    if bad >= 0:
        _raise_singular(&xi1[0], &xi2[0], &mix[0], bad)
