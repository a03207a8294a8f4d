"""Subset-scan kernels: compiled extension when built, numpy fallback otherwise.

Set NTERM_KERNELS=python to force the fallback.
"""
import os

if os.environ.get("NTERM_KERNELS", "").lower() == "python":
    from ._pykernels import extrema_by_popcount, subset_sums

    BACKEND = "python"
else:
    try:
        from ._ckernels import extrema_by_popcount, subset_sums

        BACKEND = "cython"
    except ImportError:
        from ._pykernels import extrema_by_popcount, subset_sums

        BACKEND = "python"

__all__ = ["subset_sums", "extrema_by_popcount", "BACKEND"]
