import os
import sys
import time

_here = os.path.dirname(__file__)
for p in (os.path.join(_here, "..", "src"), _here):
    p = os.path.abspath(p)
    if p not in sys.path:
        sys.path.insert(0, p)

import pytest  # noqa: E402

from voaforms.voa import EvenLattice, TruncatedVOA  # noqa: E402
import voaforms.forms as _fm  # noqa: E402


def _standard_gens(V):
    gens = []
    for i in range(V.lattice.rank):
        for s in (1, -1):
            tail = [0] * V.lattice.rank
            tail[i] = s
            gens.append(V.monomial_vector([], tail))
    return gens


@pytest.fixture(scope="session")
def a1n6():
    """Rank-1 host at cutoff 6 with its standard-generator certificate."""
    V = TruncatedVOA(EvenLattice([[2]]), 6)
    t0 = time.monotonic()
    cert = _fm.quasi_primary_integrality_check(V, _standard_gens(V))
    return {"voa": V, "cert": cert, "form": cert.form,
            "build_seconds": time.monotonic() - t0}


@pytest.fixture(scope="session")
def a2n4():
    """Rank-2 host at cutoff 4 with its standard-generator certificate."""
    V = TruncatedVOA(EvenLattice([[2, 1], [1, 2]]), 4)
    t0 = time.monotonic()
    cert = _fm.quasi_primary_integrality_check(V, _standard_gens(V))
    return {"voa": V, "cert": cert, "form": cert.form,
            "build_seconds": time.monotonic() - t0}
