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
frixion.py

Command line tool: run a configuration file and write its results.

    frixion --config fig2.cfg --output fig2.csv --workers 4 -v
"""

# Python 2-to-3 compatibility code
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function
from __future__ import unicode_literals

import os
import sys
import logging
import argparse as ap

from frixion.utils import seedname
from frixion.scripts.config import ConfigError, load_config
from frixion.scripts.runner import run

logger = logging.getLogger("frixion")


def _log_level(verbosity):
    if verbosity >= 2:
        return logging.DEBUG
    elif verbosity == 1:
        return logging.INFO
    return logging.WARNING


# Entry point
def __main__(argv=None):
    parser = ap.ArgumentParser(
        description="Equilibria, friction phases and fluctuations of ion "
        "chains in a driven optical cavity"
    )
    parser.add_argument(
        "--config", type=str, required=True, help="Run configuration file"
    )
    # Optional arguments
    parser.add_argument(
        "--output",
        type=str,
        default=None,
        help="Output file (default: the path in the configuration, or "
        "<config seedname>.<format>)",
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=os.cpu_count() or 1,
        help="Worker processes for phase diagram sweeps",
    )
    parser.add_argument(
        "--si-units",
        action="store_true",
        default=False,
        help="Also write SI values of every physical column",
    )
    parser.add_argument(
        "--validate",
        action="store_true",
        default=False,
        help="Check the invariants of every output row",
    )
    parser.add_argument(
        "--xyz",
        type=str,
        default=None,
        help="Write the equilibria found to an extended XYZ file",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Log progress (-v) or solver details (-vv)",
    )

    args = parser.parse_args(argv)

    logging.basicConfig(
        level=_log_level(args.verbose), format="%(levelname)s %(name)s: %(message)s"
    )

    try:
        config = load_config(args.config)
    except (ConfigError, IOError) as e:
        logger.error("Invalid configuration %s: %s", args.config, e)
        sys.exit(1)

    path = args.output or config.output.path
    if path is None:
        path = "{0}.{1}".format(seedname(args.config), config.output.format)

    try:
        status = run(
            config,
            path,
            workers=max(1, args.workers),
            si_units=args.si_units,
            validate=args.validate,
            xyz=args.xyz,
        )
    except Exception as e:
        logger.error("Run failed: %s", e)
        logger.debug("Traceback", exc_info=True)
        sys.exit(1)

    sys.exit(status)


if __name__ == "__main__":
    __main__()
