"""ccshell: shellings, regular orders, cones and exact homology of chain complexes.

Typical usage::

    from ccshell import fixtures, homology, shelling

    C = fixtures.load_fixture("regular_with_loop")
    print([str(g) for g in homology.homology(C)])
    cert = shelling.search_shelling(C)
    print(shelling.verify_shelling(C, cert))
"""

from ccshell import (
    classification,
    complex,
    cones,
    config,
    documents,
    fixtures,
    homology,
    linalg,
    regularity,
    reports,
    rings,
    shelling,
)

__all__ = [
    "classification",
    "complex",
    "cones",
    "config",
    "documents",
    "fixtures",
    "homology",
    "linalg",
    "regularity",
    "reports",
    "rings",
    "shelling",
]
