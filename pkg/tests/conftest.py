# ------ tests/conftest.py ------

import pytest

from config.config import SPECS_DIR
from src.dynsys.spec import DigraphSpec, FiniteMapSpec, OdeSpec
from src.transition.system import build_transitions


def make_ode(field, domain, dt, **extra):
    return OdeSpec(dim=len(field), field=field, domain=domain, integrator={'method': 'rk4', 'dt': dt}, **extra)


@pytest.fixture
def f1_spec():
    return FiniteMapSpec(
        states=['0', '1', '2', '3', '4', '5'],
        map={'0': '0', '1': '0', '2': '1', '3': '4', '4': '3', '5': '3'},
    )


@pytest.fixture
def g1_spec():
    return DigraphSpec(
        cells=['a', 'b', 'd', 'e'],
        edges=[('a', 'a'), ('b', 'a'), ('d', 'b'), ('e', 'e'), ('e', 'd')],
    )


@pytest.fixture
def f1(f1_spec):
    return build_transitions(f1_spec)


@pytest.fixture
def g1(g1_spec):
    return build_transitions(g1_spec)


@pytest.fixture
def cells_of(g1):
    """Map G1 labels to cell indices."""
    def lookup(labels):
        return frozenset(g1.index_of(label) for label in labels)
    return lookup


@pytest.fixture(scope='session')
def o1_spec():
    return make_ode(['x - x^3'], [[-2, 2]], 0.01)


@pytest.fixture(scope='session')
def o2_spec():
    return make_ode(['x^2'], [[-1e7, 1e7]], 1e-3)


O3_TAU = 2.0


@pytest.fixture(scope='session')
def o3_spec():
    return make_ode(['y', 'x - x^3 - 0.5*y'], [[-2, 2], [-2, 2]], 0.01)


@pytest.fixture(scope='session')
def o1(o1_spec):
    return build_transitions(o1_spec, depth=7, tau=0.5, bloat=1.0)


@pytest.fixture(scope='session')
def o3(o3_spec):
    """Shorter taus merge the saddle and both sinks into one recurrent component."""
    return build_transitions(o3_spec, depth=6, tau=O3_TAU, bloat=1.0)


@pytest.fixture
def specs_dir():
    return SPECS_DIR
