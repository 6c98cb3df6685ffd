"""Pure-numpy gate kernels; drop-in fallback for the compiled extension.

A Pauli string on a 2^q amplitude array is encoded by three quantities:
``flip`` (xor mask of the X and Y qubits), ``yz`` (or-mask of the Y and Z
qubits) and ``phase`` (= i**n_Y).  The string maps |src> to
``phase * (-1)**popcount(src & yz) * |src ^ flip>``.

``ctrl`` restricts the action to basis indices with all control bits set;
the rest of the array is left untouched (callers zero it out themselves
when they need the projected operator rather than the controlled one).
"""

import numpy as np

BACKEND = "python"


def _pair_indices(n, flip):
    """Indices a with the lowest flip bit clear; pairs are (a, a ^ flip)."""
    pick = np.uint64(flip & (-flip))
    low = pick - np.uint64(1)
    k = np.arange(n >> 1, dtype=np.uint64)
    return ((k & ~low) << np.uint64(1)) | (k & low)


def _signs(idx, yz):
    par = np.bitwise_count(idx & np.uint64(yz)).astype(np.int64) & 1
    return 1.0 - 2.0 * par


def apply_rotation_inplace(amps, flip, yz, phase, c, s, ctrl):
    """In-place exp(i*theta*Sigma) with c=cos(theta), s=sin(theta)."""
    n = amps.shape[0]
    if flip == 0:
        idx = np.arange(n, dtype=np.uint64)
        if ctrl:
            cm = np.uint64(ctrl)
            idx = idx[(idx & cm) == cm]
        amps[idx] *= c + 1j * s * _signs(idx, yz)
        return
    a = _pair_indices(n, flip)
    if ctrl:
        cm = np.uint64(ctrl)
        a = a[(a & cm) == cm]
    b = a ^ np.uint64(flip)
    isp = 1j * s * phase
    va = amps[a]
    vb = amps[b]
    amps[a] = c * va + isp * _signs(b, yz) * vb
    amps[b] = c * vb + isp * _signs(a, yz) * va


def apply_pauli_inplace(amps, flip, yz, phase, ctrl):
    """In-place application of the Pauli string itself."""
    n = amps.shape[0]
    if flip == 0:
        idx = np.arange(n, dtype=np.uint64)
        if ctrl:
            cm = np.uint64(ctrl)
            idx = idx[(idx & cm) == cm]
        amps[idx] *= phase * _signs(idx, yz)
        return
    a = _pair_indices(n, flip)
    if ctrl:
        cm = np.uint64(ctrl)
        a = a[(a & cm) == cm]
    b = a ^ np.uint64(flip)
    va = amps[a]
    vb = amps[b]
    amps[a] = phase * _signs(b, yz) * vb
    amps[b] = phase * _signs(a, yz) * va


def backward_step_inplace(phi, lam, flip, yz, phase, c, s, ctrl):
    """Fused reverse-sweep step for the analytic gradient.

    Returns M = <lam| P_ctrl Sigma |phi> (the generator projected onto the
    control subspace) and unapplies exp(i*theta*Sigma) from both phi and lam,
    all in one pass.  Equivalent to: copy phi, zero it outside the control
    subspace, apply the Pauli string, take vdot with lam, then rotate both
    sweeps by -theta.
    """
    n = phi.shape[0]
    cm = np.uint64(ctrl)
    if flip == 0:
        idx = np.arange(n, dtype=np.uint64)
        sel = idx[(idx & cm) == cm] if ctrl else idx
        diag = phase * _signs(sel, yz)
        m = np.sum(np.conj(lam[sel]) * diag * phi[sel])
        rot = c - 1j * s * _signs(sel, yz)
        phi[sel] *= rot
        lam[sel] *= rot
        return complex(m)
    a = _pair_indices(n, flip)
    b = a ^ np.uint64(flip)
    sa = _signs(a, yz)
    sb = _signs(b, yz)
    if ctrl:
        pa = (a & cm) == cm
        pb = (b & cm) == cm
        ta = np.where(pa, phi[a], 0.0)
        tb = np.where(pb, phi[b], 0.0)
        tmp_a = np.where(pa, phase * sb * tb, ta)
        tmp_b = np.where(pa, phase * sa * ta, tb)
        m = np.sum(np.conj(lam[a]) * tmp_a + np.conj(lam[b]) * tmp_b)
        a = a[pa]
        b = b[pa]
        sa = sa[pa]
        sb = sb[pa]
    else:
        m = phase * np.sum(np.conj(lam[a]) * sb * phi[b] + np.conj(lam[b]) * sa * phi[a])
    isp = -1j * s * phase
    for arr in (phi, lam):
        va = arr[a]
        vb = arr[b]
        arr[a] = c * va + isp * sb * vb
        arr[b] = c * vb + isp * sa * va
    return complex(m)
