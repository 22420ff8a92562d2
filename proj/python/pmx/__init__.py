# Copyright 2026 The pmx Authors
# SPDX-License-Identifier: Apache-2.0
"""Process matrices, supermaps and their validity checks."""

import math

import numpy as np

from ._core import *  # noqa: F401,F403
from ._core import cj_of_unitary, extended_switch, instrument_reduction

__version__ = "0.1.0"


def rotation(lam):
    c, s = math.cos(lam), math.sin(lam)
    return np.array([[c, -s], [s, c]], dtype=complex)


def reduced_extended_switch(lam):
    """Extended switch with party D replaced by the rotation by ``lam``."""
    ext = extended_switch()
    return instrument_reduction(ext.layout, "D", cj_of_unitary(rotation(lam)))(ext)
