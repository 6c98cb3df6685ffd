# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled gate kernels; see _kernels_py for the operator encoding."""

BACKEND = "cython"

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil

cdef inline double _sgn(unsigned long long x) nogil:
    return -1.0 if (__builtin_popcountll(x) & 1) else 1.0


def apply_rotation_inplace(double complex[::1] amps, unsigned long long flip,
                           unsigned long long yz, double complex phase,
                           double c, double s, unsigned long long ctrl):
    cdef Py_ssize_t n = amps.shape[0]
    cdef Py_ssize_t npairs = n >> 1
    cdef Py_ssize_t k
    cdef unsigned long long a, b, uk, pick, low
    cdef double complex isp = 1j * s * phase
    cdef double complex va, vb
    if flip == 0:
        with nogil:
            for k in range(n):
                a = <unsigned long long> k
                if (a & ctrl) == ctrl:
                    amps[k] = amps[k] * (c + 1j * s * _sgn(a & yz))
        return
    pick = flip & (~flip + 1)
    low = pick - 1
    if ctrl == 0:
        with nogil:
            for k in range(npairs):
                uk = <unsigned long long> k
                a = ((uk & ~low) << 1) | (uk & low)
                b = a ^ flip
                va = amps[<Py_ssize_t> a]
                vb = amps[<Py_ssize_t> b]
                amps[<Py_ssize_t> a] = c * va + isp * _sgn(b & yz) * vb
                amps[<Py_ssize_t> b] = c * vb + isp * _sgn(a & yz) * va
    else:
        with nogil:
            for k in range(npairs):
                uk = <unsigned long long> k
                a = ((uk & ~low) << 1) | (uk & low)
                if (a & ctrl) != ctrl:
                    continue
                b = a ^ flip
                va = amps[<Py_ssize_t> a]
                vb = amps[<Py_ssize_t> b]
                amps[<Py_ssize_t> a] = c * va + isp * _sgn(b & yz) * vb
                amps[<Py_ssize_t> b] = c * vb + isp * _sgn(a & yz) * va


def apply_pauli_inplace(double complex[::1] amps, unsigned long long flip,
                        unsigned long long yz, double complex phase,
                        unsigned long long ctrl):
    cdef Py_ssize_t n = amps.shape[0]
    cdef Py_ssize_t npairs = n >> 1
    cdef Py_ssize_t k
    cdef unsigned long long a, b, uk, pick, low
    cdef double complex va, vb
    if flip == 0:
        with nogil:
            for k in range(n):
                a = <unsigned long long> k
                if (a & ctrl) == ctrl:
                    amps[k] = amps[k] * phase * _sgn(a & yz)
        return
    pick = flip & (~flip + 1)
    low = pick - 1
    if ctrl == 0:
        with nogil:
            for k in range(npairs):
                uk = <unsigned long long> k
                a = ((uk & ~low) << 1) | (uk & low)
                b = a ^ flip
                va = amps[<Py_ssize_t> a]
                vb = amps[<Py_ssize_t> b]
                amps[<Py_ssize_t> a] = phase * _sgn(b & yz) * vb
                amps[<Py_ssize_t> b] = phase * _sgn(a & yz) * va
    else:
        with nogil:
            for k in range(npairs):
                uk = <unsigned long long> k
                a = ((uk & ~low) << 1) | (uk & low)
                if (a & ctrl) != ctrl:
                    continue
                b = a ^ flip
                va = amps[<Py_ssize_t> a]
                vb = amps[<Py_ssize_t> b]
                amps[<Py_ssize_t> a] = phase * _sgn(b & yz) * vb
                amps[<Py_ssize_t> b] = phase * _sgn(a & yz) * va


def backward_step_inplace(double complex[::1] phi, double complex[::1] lam,
                          unsigned long long flip, unsigned long long yz,
                          double complex phase, double c, double s,
                          unsigned long long ctrl):
    """Fused reverse-sweep step: returns M = <lam| P_ctrl Sigma |phi> and
    unapplies exp(i*theta*Sigma) from both phi and lam in one pass."""
    cdef Py_ssize_t n = phi.shape[0]
    cdef Py_ssize_t npairs = n >> 1
    cdef Py_ssize_t k
    cdef unsigned long long a, b, uk, pick, low
    cdef double complex m = 0
    cdef double complex isp = -1j * s * phase
    cdef double complex va, vb, wa, wb, ta, tb, rot
    cdef double sa, sb
    if flip == 0:
        with nogil:
            for k in range(n):
                a = <unsigned long long> k
                if (a & ctrl) == ctrl:
                    sa = _sgn(a & yz)
                    m = m + phi[k] * phase * sa * lam[k].conjugate()
                    rot = c - 1j * s * sa
                    phi[k] = phi[k] * rot
                    lam[k] = lam[k] * rot
        return complex(m)
    pick = flip & (~flip + 1)
    low = pick - 1
    if ctrl == 0:
        with nogil:
            for k in range(npairs):
                uk = <unsigned long long> k
                a = ((uk & ~low) << 1) | (uk & low)
                b = a ^ flip
                sa = _sgn(a & yz)
                sb = _sgn(b & yz)
                va = phi[<Py_ssize_t> a]
                vb = phi[<Py_ssize_t> b]
                wa = lam[<Py_ssize_t> a]
                wb = lam[<Py_ssize_t> b]
                m = m + phase * (wa.conjugate() * sb * vb + wb.conjugate() * sa * va)
                phi[<Py_ssize_t> a] = c * va + isp * sb * vb
                phi[<Py_ssize_t> b] = c * vb + isp * sa * va
                lam[<Py_ssize_t> a] = c * wa + isp * sb * wb
                lam[<Py_ssize_t> b] = c * wb + isp * sa * wa
    else:
        with nogil:
            for k in range(npairs):
                uk = <unsigned long long> k
                a = ((uk & ~low) << 1) | (uk & low)
                b = a ^ flip
                sa = _sgn(a & yz)
                sb = _sgn(b & yz)
                va = phi[<Py_ssize_t> a]
                vb = phi[<Py_ssize_t> b]
                wa = lam[<Py_ssize_t> a]
                wb = lam[<Py_ssize_t> b]
                if (a & ctrl) == ctrl:
                    # projected phi: zero outside the control subspace
                    ta = va
                    tb = vb if (b & ctrl) == ctrl else 0
                    m = m + phase * (wa.conjugate() * sb * tb + wb.conjugate() * sa * ta)
                    phi[<Py_ssize_t> a] = c * va + isp * sb * vb
                    phi[<Py_ssize_t> b] = c * vb + isp * sa * va
                    lam[<Py_ssize_t> a] = c * wa + isp * sb * wb
                    lam[<Py_ssize_t> b] = c * wb + isp * sa * wa
                elif (b & ctrl) == ctrl:
                    # pair untouched by the controlled Pauli; b-survivor term
                    m = m + wb.conjugate() * vb
    return complex(m)
