"""Backend selection: compiled extension if available, numpy fallback otherwise.

Set QNNLAB_PURE_PYTHON=1 to force the fallback (used by the benchmark).
"""

import os

if os.environ.get("QNNLAB_PURE_PYTHON"):
    from ._kernels_py import (
        BACKEND,
        apply_pauli_inplace,
        apply_rotation_inplace,
        backward_step_inplace,
    )
else:
    try:
        from ._kernels import (
            BACKEND,
            apply_pauli_inplace,
            apply_rotation_inplace,
            backward_step_inplace,
        )
    except ImportError:
        from ._kernels_py import (
            BACKEND,
            apply_pauli_inplace,
            apply_rotation_inplace,
            backward_step_inplace,
        )

__all__ = [
    "BACKEND",
    "apply_pauli_inplace",
    "apply_rotation_inplace",
    "backward_step_inplace",
]
