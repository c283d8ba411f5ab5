# Lie Workbench Testing Configuration

import pytest
import sys
from pathlib import Path

from sympy.polys.domains import GF, QQ

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from modules.findim_lie import abelian, free_nilpotent, heisenberg
from modules.free_lie import Bracket, Gen
from modules.subdirect import FibreSumSpec, SplitData, build_subdirect


@pytest.fixture
def rationals():
    """Fixture for the rational field."""
    return QQ


@pytest.fixture
def gf7():
    """Fixture for the prime field F_7."""
    return GF(7, symmetric=False)


@pytest.fixture
def heis():
    """Fixture for the Heisenberg algebra over Q."""
    return heisenberg()


@pytest.fixture
def zoo():
    """Fixture for the bundled zoo of small nilpotent algebras."""
    algebras = [abelian(n) for n in range(1, 5)]
    algebras.append(heisenberg())
    algebras.extend(free_nilpotent(2, c) for c in (2, 3, 4))
    algebras.extend(free_nilpotent(3, c) for c in (2, 3))
    return algebras


@pytest.fixture
def abelianization_kernel():
    """
    Fixture for the k = 3 sum: kernel of F + F + F -> F/[F,F] adding the
    abelianizations, F free nilpotent of rank 2 and class 4.
    """
    F = free_nilpotent(2, 4)
    x, y = F.basis_vector(F.index("x")), F.basis_vector(F.index("y"))
    neg = lambda v: F.scale(-1, v)
    generators = [
        [x, neg(x), {}],
        [y, neg(y), {}],
        [x, {}, neg(x)],
        [y, {}, neg(y)],
    ]
    return build_subdirect([F, F, F], generators, 4, name="K")


@pytest.fixture
def heisenberg_split_spec():
    """Fixture for the Heisenberg algebra over its abelian quotient, as split data."""
    x, y, z = Gen("x"), Gen("y"), Gen("z")
    data = SplitData(["x", "y"], ["z"], [(Bracket(x, y), z)])
    return FibreSumSpec.from_split_data("P", data, 3, QQ)


@pytest.fixture
def tmp_script(tmp_path):
    """Fixture writing script text to a temporary .lie file."""
    def write(text: str, name: str = "script.lie") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return write
