import pytest

from tmlab.machine import MachineModel, parse


@pytest.fixture
def one_way():
    return MachineModel.one_way(2)


@pytest.fixture
def two_way():
    return MachineModel.two_way(2)


def program_text(n, a, entries):
    """Build program text from {(state, symbol): (target, write, move)}."""
    lines = [f"tm n={n} a={a}"]
    for (s, sym), (t, w, mv) in sorted(entries.items()):
        lines.append(f"q{s} {sym} -> {t} {w} {mv}")
    return "\n".join(lines) + "\n"


def make_program(n, a, entries):
    return parse(program_text(n, a, entries))


@pytest.fixture
def halter():
    # Halts on the very first step whatever it reads.
    return make_program(1, 2, {
        (1, 0): ("H", 0, "R"),
        (1, 1): ("H", 0, "R"),
    })


@pytest.fixture
def left_faller():
    # Immediately walks off the left edge.
    return make_program(1, 2, {
        (1, 0): ("q1", 1, "L"),
        (1, 1): ("q1", 1, "L"),
    })


@pytest.fixture
def right_runner():
    # Marches right forever; repeats q1 at step 1.
    return make_program(1, 2, {
        (1, 0): ("q1", 1, "R"),
        (1, 1): ("q1", 0, "R"),
    })
