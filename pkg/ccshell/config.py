"""Configuration for ccshell searches, documents and reports.

Values here are defaults; the CLI can override the node budget per call with
``--budget`` and the environment can override it for every call through
``CCSHELL_BUDGET``.
"""

from __future__ import annotations

import logging
import os

logger = logging.getLogger(__name__)

# Backtracking node budget shared by the shelling, regular-order and cone
# searches.  A node is one tentative placement (a Γ-element, a boundary
# element or a candidate subset).  Running out of budget is reported as
# "budget-exceeded" and never as a proof that no certificate exists.
DEFAULT_NODE_BUDGET: int = 1_000_000
BUDGET_ENV_VAR: str = "CCSHELL_BUDGET"

# Density (nonzero entries / all entries) from which Smith normal form
# factorizes the full dense copy directly.  Sparser matrices first lose
# their all-zero rows and columns, whose transforms are identity blocks.
DENSE_FILL_THRESHOLD: float = 0.5

# Document format.  Files are JSON Lines; the header line carries the
# version string below.
FORMAT_VERSION: str = "1"
DOCUMENT_SUFFIX: str = ".ccx"

# Ring tags accepted by --ring and by document headers.  "Fp:<p>" needs a
# prime p.
RING_TAGS: frozenset = frozenset({"Z", "Q", "Fp"})
DEFAULT_RING: str = "Z"

# Exit-code contract of the command-line interface.
#   0 – the property holds / the computation succeeded
#   1 – the property provably fails
#   2 – budget exhausted, malformed input or any other error
EXIT_HOLDS: int = 0
EXIT_FAILS: int = 1
EXIT_ERROR: int = 2

# Size caps for the brute-force oracles.  Exceeding them is an error, never a
# silent truncation: the factorial blow-up of exhaustive shelling enumeration
# makes anything larger unusable anyway.
BRUTE_MAX_GAMMA: int = 5
BRUTE_MAX_BASIS: int = 12
DENSE_ORACLE_MAX_BASIS: int = 64

# Random generators (oracle.generate).
GENERATOR_MAX_VERTICES: int = 6
GENERATOR_COEFFICIENT_RANGE: tuple[int, int] = (-3, 3)
# Unimodular column operations applied per degree by the RandomBoundary source.
GENERATOR_PERTURBATION_STEPS: int = 3

# Over a small prime field the generic-combination construction of an
# augmentation can miss; up to this many coefficient vectors are then tried
# exhaustively before the augmentation is declared absent.
AUGMENTATION_EXHAUSTIVE_LIMIT: int = 100_000

# Figures.
PLOT_DPI: int = 150


def resolve_budget(explicit: int | None = None) -> int:
    """Return the node budget to use for a search.

    Parameters
    ----------
    explicit:
        A budget passed on the command line or by a caller.  Takes priority.

    Returns
    -------
    int
        *explicit* if given, else a positive integer read from
        ``CCSHELL_BUDGET``, else :data:`DEFAULT_NODE_BUDGET`.
    """
    if explicit is not None:
        if explicit <= 0:
            raise ValueError(f"node budget must be positive, got {explicit}")
        return explicit
    raw = os.environ.get(BUDGET_ENV_VAR)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            logger.warning("Ignoring %s=%r: not an integer", BUDGET_ENV_VAR, raw)
        else:
            if value > 0:
                return value
            logger.warning("Ignoring %s=%r: must be positive", BUDGET_ENV_VAR, raw)
    return DEFAULT_NODE_BUDGET
