"""Kernel backend selection.

The compiled ``_kernels`` extension is used when it imports; otherwise (or
when ``DIRACPT_PURE_PYTHON=1``) the pure-Python ``_kernels_py`` is used. Both
expose ``integrate`` and ``coefficients`` with identical signatures.
"""

from __future__ import annotations

import logging
import os

from . import _kernels_py

log = logging.getLogger(__name__)

DIRAC = _kernels_py.DIRAC
SCHRO = _kernels_py.SCHRO


def _load():
    if os.environ.get("DIRACPT_PURE_PYTHON", "").strip() not in ("", "0"):
        return _kernels_py
    try:
        from . import _kernels
    except ImportError as exc:  # extension not built
        log.debug("compiled kernels unavailable (%s); using pure Python", exc)
        return _kernels_py
    return _kernels


backend = _load()
BACKEND = backend.BACKEND
integrate = backend.integrate
coefficients = backend.coefficients
