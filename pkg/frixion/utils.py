# Frixion - friction of ion chains in optical cavities
# Copyright (C) 2024 - The Frixion developers

# Frixion is free software: you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.

# Frixion is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Lesser General Public License for more details.

# You should have received a copy of the GNU Lesser General Public License
# along with this program.  If not, see <http://www.gnu.org/licenses/>.

"""
utils.py

Contains package-wide useful routines that don't fall under any specific
category: warning formatting, path handling and small fitting helpers.
"""

# Python 2-to-3 compatibility code
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function
from __future__ import unicode_literals

import os
import warnings
import numpy as np
from collections import namedtuple


def seedname(path):
    """Get the filename (with no extension) from a full path"""
    return os.path.splitext(os.path.basename(path))[0]


def sidecar_path(path, tag):
    """Path of a file living next to 'path', named <seedname>.<tag>"""
    folder = os.path.dirname(path)
    return os.path.join(folder, "{0}.{1}".format(seedname(path), tag))


def customize_warnings():
    def customwarning(msg, category, filename, lineno, line=None):
        outmsg = ("\033[93m \033[1m WARNING: \033[0m {0} " "({1}, line: {2})\n").format(
            msg, filename, lineno
        )
        return outmsg

    warnings.formatwarning = customwarning


# Apply it right away (for stuff in this module)
customize_warnings()


LinearFit = namedtuple("LinearFit", ["slope", "intercept", "r_squared"])


def linear_fit(x, y):
    """Least squares straight line through a set of points.

    | Args:
    |   x, y (np.ndarray): abscissae and ordinates of the points

    | Returns:
    |   fit (LinearFit): slope, intercept and coefficient of determination,
    |                    or None if fewer than two distinct abscissae are
    |                    given (the slope is undefined)

    """

    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)

    if x.shape != y.shape:
        raise ValueError("Invalid data passed to linear_fit: shape mismatch")

    if len(np.unique(x)) < 2:
        return None

    slope, intercept = np.polyfit(x, y, 1)
    res = y - (slope * x + intercept)
    ss_tot = np.sum((y - np.mean(y)) ** 2)
    r2 = 1.0 - np.sum(res ** 2) / ss_tot if ss_tot > 0 else 1.0

    return LinearFit(slope, intercept, r2)


def power_law_exponent(x, y):
    """Exponent of the best power law y ~ x^p (fit in log-log space)"""
    fit = linear_fit(np.log(np.abs(x)), np.log(np.abs(y)))
    return None if fit is None else fit.slope
