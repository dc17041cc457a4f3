import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from qfaequiv.e1qfa import E1QFA, from_mm
from qfaequiv.mm1qfa import MM1QFA

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def make_rot(theta=np.pi / 4):
    r = rotation(theta)
    return MM1QFA(["q1", "q2"], ["a"], ["q2"], [], {"a": r, "$": r}, [1, 0])


def make_all1():
    return MM1QFA(["q"], ["a"], ["q"], [], {"a": [[1]], "$": [[1]]}, [1])


def make_none():
    return MM1QFA(["q"], ["a"], [], [], {"a": [[1]], "$": [[1]]}, [1])


def make_e_rot(theta=np.pi / 4):
    return from_mm(make_rot(theta), "q1")


def make_e_all1():
    return E1QFA(["q"], ["a"], ["q"], [], {"#": [[[1]]], "a": [[[1]]], "$": [[[1]]]}, "q")


def make_e_none():
    return E1QFA(["q"], ["a"], [], [], {"#": [[[1]]], "a": [[[1]]], "$": [[[1]]]}, "q")


@pytest.fixture
def rot():
    return make_rot()


@pytest.fixture
def all1():
    return make_all1()


@pytest.fixture
def none():
    return make_none()


@pytest.fixture
def e_rot():
    return make_e_rot()


@pytest.fixture
def fixtures_dir():
    return FIXTURES


# acceptance criteria report one line each at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
