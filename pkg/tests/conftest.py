import itertools
import json
from pathlib import Path

import numpy as np
import pytest

from orbitreg import GF, QQ, Matrix
from orbitreg.algmod import AlgebraPresentation, ModulePoint

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"


def mat(rows, f=QQ):
    return Matrix(f, rows)


def free_module(mats, f=QQ):
    ms = [Matrix(f, m) for m in mats]
    return ModulePoint.of(AlgebraPresentation.free(f, len(ms)), ms)


def brute_force_hom_count_f2(m_mats, n_mats):
    """Number of phi over F_2 with phi M_i = N_i phi, by full enumeration."""
    dn, dm = len(n_mats[0]), len(m_mats[0])
    Ms = [np.array(m, dtype=np.int64) for m in m_mats]
    Ns = [np.array(n, dtype=np.int64) for n in n_mats]
    count = 0
    for flat in itertools.product((0, 1), repeat=dn * dm):
        phi = np.array(flat, dtype=np.int64).reshape(dn, dm)
        if all(((phi @ a - b @ phi) % 2 == 0).all() for a, b in zip(Ms, Ns)):
            count += 1
    return count


def kronecker_algebra(f=QQ):
    return AlgebraPresentation.path_algebra(f, 2, [(0, 1), (0, 1)])


def kronecker_pair(f=QQ):
    A = kronecker_algebra(f)
    E = lambda i, j: Matrix.unit(f, 2, 2, i, j)  # noqa: E731
    Z = Matrix.zeros(f, 2, 2)
    M = ModulePoint.of(A, [E(0, 0), E(1, 1), E(1, 0), Z])
    N = ModulePoint.of(A, [E(0, 0), E(1, 1), Z, Z])
    return M, N


def dual_numbers_pair(f=QQ):
    return AlgebraPresentation(f, 2, (((1, (0, 0)),), ((1, (1, 1)),), ((1, (0, 1)), (-1, (1, 0)))), ("alpha", "beta"))


def selfext_modules(selfext, f=QQ):
    alg = dual_numbers_pair(f)
    mods = {k: ModulePoint.of(alg, [Matrix(f, m) for m in v]) for k, v in selfext["modules"].items()}
    return mods["Z"], mods["Y"]


@pytest.fixture(scope="session")
def selfext():
    return json.loads((FIXTURES / "zwara54.json").read_text())


@pytest.fixture(scope="session")
def f2():
    return GF(2)
