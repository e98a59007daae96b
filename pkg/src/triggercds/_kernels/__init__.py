"""Simulation kernel backend selection.

The compiled lane is used when the extension built; setting the environment
variable ``TRIGGERCDS_PURE_PYTHON`` (to anything non-empty) forces the pure
Python lane. Both lanes are draw-for-draw identical, so the choice affects
speed only. ``BACKEND`` names the active lane.
"""
from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("TRIGGERCDS_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernels

BACKEND: str = _impl.BACKEND

philox_uniforms = _impl.philox_uniforms
occupation_batch = _impl.occupation_batch
single_name_batch = _impl.single_name_batch
claim_batch = _impl.claim_batch
two_firm_batch = _impl.two_firm_batch
basket_batch = _impl.basket_batch
