import math

import numpy as np
import pytest
from hypothesis import strategies as st

from islandgrid.pv_model import PvArray


@st.composite
def pv_arrays(draw):
    return PvArray(
        i_pv=draw(st.floats(0.1, 20.0)),
        i_0=10.0 ** draw(st.floats(-12.0, -5.0)),
        ideality=draw(st.floats(1.0, 2.0)),
        n_cell=draw(st.integers(1, 120)),
        temperature=draw(st.floats(250.0, 350.0)),
    )


def random_arrays(n, seed):
    rng = np.random.default_rng(seed)
    return [
        PvArray(
            i_pv=float(rng.uniform(0.1, 20.0)),
            i_0=float(10.0 ** rng.uniform(-12.0, -5.0)),
            ideality=float(rng.uniform(1.0, 2.0)),
            n_cell=int(rng.integers(1, 121)),
            temperature=float(rng.uniform(250.0, 350.0)),
        )
        for _ in range(n)
    ]


def sign_changes(values):
    s = np.sign(np.diff(np.asarray(values, dtype=float)))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


@pytest.fixture
def default_array():
    return PvArray(i_pv=8.0, i_0=1e-10, ideality=1.3, n_cell=54, temperature=298.15)


def rel_close(a, b, rel):
    return math.isclose(a, b, rel_tol=rel, abs_tol=0.0)
