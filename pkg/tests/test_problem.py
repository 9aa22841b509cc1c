from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reflectode.problem import (
    Boundary,
    ProblemFormatError,
    ProblemSpec,
    dump,
    dumps,
    load,
    loads,
    with_mode,
)

DATA = Path(__file__).parent / "data"


def test_load_scalar_problem():
    spec = load(DATA / "periodic_scalar.ini")
    assert spec.is_scalar and spec.n == 1
    assert spec.mode == "bvp"
    assert spec.boundary == Boundary((1.0,), (-1.0,), 1.0)
    sys = spec.system()
    assert sys.B.tolist() == [[1.0]]
    assert np.array_equal(spec.forcing()(0.3), [1.0])
    assert np.array_equal(spec.delta_vector(), [0.0])


def test_load_system_problem():
    spec = load(DATA / "swap_system.ini")
    assert not spec.is_scalar and spec.n == 2
    assert spec.gamma == ("sin(t)", "0")
    assert spec.output == {"t_min": -0.8, "t_max": 0.8, "points": 9}
    C, K, T = spec.boundary_matrices()
    assert np.array_equal(C, np.eye(2)) and np.array_equal(K, -np.eye(2)) and T == 0.8
    assert np.allclose(spec.forcing()(1.0), [np.sin(1.0), 0.0])
    with pytest.raises(ProblemFormatError):
        spec.reflection_operator()


def test_scalar_delta_expands_to_companion_state():
    spec = loads("[operator]\nequation = x'' + x(-t)\n[forcing]\ndelta = 2\n")
    assert spec.n == 2
    assert np.array_equal(spec.delta_vector(), [2.0, 0.0])
    assert np.array_equal(spec.forcing()(0.0), [0.0, 0.0])


@pytest.mark.parametrize(
    "text",
    [
        "",
        "[forcing]\ngamma = 1\n",
        "[system]\nn = 1\nF = 1\nG = 0\nA = 0\nB = 1 2\n",
        "[system]\nn = two\n",
        "[system]\nn = 1\nF = 1\nG = 0\nA = 0\n",
        "[system]\nn = 1\nF = 1\nG = 0\nA = x\nB = 0\n",
        "[operator]\n",
        "[operator]\nequation = x'\n[system]\nn = 1\n",
        "[operator]\nequation = x'\n[forcing]\ngamma = 1; 2\n",
        "[operator]\nequation = x'\n[boundary]\nC = 1\nK = 1\n",
        "[operator]\nequation = x'\n[boundary]\nC = 1\nK = 1\nT = -1\n",
        "[operator]\nequation = x'\n[output]\nmode = bvp\n",
        "[operator]\nequation = x'\n[output]\nmode = other\n",
        "[operator]\nequation = x'\n[output]\npoints = many\n",
        "[operator]\nequation = x'\n[extra]\nk = 1\n",
        "not a section",
    ],
)
def test_malformed(text):
    with pytest.raises(ProblemFormatError):
        loads(text)


def test_bad_expression_is_reported_on_load():
    from reflectode.expression import ExpressionError

    with pytest.raises(ExpressionError):
        loads("[operator]\nequation = x'\n[forcing]\ngamma = sin(\n")


def test_round_trip_files(tmp_path):
    for path in sorted(DATA.glob("*.ini")):
        spec = load(path)
        assert loads(dumps(spec)) == spec
        dump(spec, tmp_path / path.name)
        assert load(tmp_path / path.name) == spec


def test_with_mode():
    spec = load(DATA / "swap_system.ini")
    assert with_mode(spec, "verify").mode == "verify"
    assert spec.mode is None


floats = st.floats(-1e6, 1e6, allow_nan=False).map(float)


@settings(max_examples=50, deadline=None)
@given(
    n=st.integers(1, 3),
    data=st.data(),
)
def test_round_trip_random_specs(n, data):
    def mat():
        return tuple(data.draw(st.lists(floats, min_size=n * n, max_size=n * n)))

    boundary = None
    if data.draw(st.booleans()):
        boundary = Boundary(mat(), mat(), data.draw(st.floats(1e-3, 10)))
    gamma = tuple(data.draw(st.sampled_from(["0", "sin(t)", "t^2 - 1", "exp(-t)*cos(2*t)"])) for _ in range(n))
    output = {"points": data.draw(st.integers(1, 500)), "t_min": data.draw(floats)}
    spec = ProblemSpec(
        n=n, F=mat(), G=mat(), A=mat(), B=mat(), gamma=gamma,
        delta=tuple(data.draw(st.lists(floats, min_size=n, max_size=n))),
        boundary=boundary, mode=data.draw(st.sampled_from([None, "ivp", "verify"])), output=output,
    )
    assert loads(dumps(spec)) == spec
