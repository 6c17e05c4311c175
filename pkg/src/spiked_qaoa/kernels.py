"""Backend selection for the hot loops.

The compiled Cython module is used when importable; otherwise the numpy fallback.
Set ``SPIKED_QAOA_KERNELS=python`` to force the fallback.
"""

from __future__ import annotations

import os

if os.environ.get("SPIKED_QAOA_KERNELS", "").lower() == "python":
    from . import _fallback as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:  # extension not built
        from . import _fallback as _impl

        BACKEND = "python"

cost_diagonal = _impl.cost_diagonal
apply_phase = _impl.apply_phase
apply_mixer = _impl.apply_mixer
agreement_masses = _impl.agreement_masses

__all__ = ["BACKEND", "cost_diagonal", "apply_phase", "apply_mixer", "agreement_masses"]
