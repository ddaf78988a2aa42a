from fractions import Fraction

import pytest

from maintflow.catalog import fractional_optimum_instance, two_arc_instance
from maintflow.core import Arc, GeneratorParams, Instance, Job, Network, Schedule

F = Fraction


@pytest.fixture
def fig1():
    return two_arc_instance()


@pytest.fixture
def fig1_storage():
    return two_arc_instance(storage=2)


@pytest.fixture
def example1():
    return fractional_optimum_instance()


def single_arc(r=0, d=4, p=2, T=4, cap=1):
    net = Network(("s", "t"), (Arc("a", "s", "t", F(cap)),), "s", "t")
    return Instance(net, (Job("a", F(r), F(d), F(p)),), F(T))


@pytest.fixture
def one_job():
    return single_arc()


def small_params(**kw):
    base = dict(nodes=4, arcs=5, jobs=2, horizon=8, window_range=(3, 5), processing_range=(1, 3))
    base.update(kw)
    return GeneratorParams(**base)


def sched(**starts):
    return Schedule({a: F(t) for a, t in starts.items()})
