"""Small reference instances used by the tests, demos and the CLI."""
from __future__ import annotations

from .core import Arc, Instance, Job, Network


def two_arc_instance(storage=None) -> Instance:
    """Path ``s -a(2)-> v -b(1)-> t`` over ``T = 3``; job a in [0, 3] for 2, job b in [0, 1] for 1.

    With ``storage`` given, node ``v`` can hold that much flow between intervals.
    """
    net = Network(("s", "v", "t"), (Arc("a", "s", "v", 2), Arc("b", "v", "t", 1)), "s", "t",
                  {} if storage is None else {"v": storage})
    return Instance(net, (Job("a", 0, 3, 2), Job("b", 0, 1, 1)), 3)


def fractional_optimum_instance() -> Instance:
    """Four jobs on ``s -a(4)-> v`` and three parallel ``v -> t`` arcs, storage 3 at ``v``, ``T = 7``.

    Only job a can move (start in [0, 2]); its best start is 3/2, worth 16.
    """
    net = Network(("s", "v", "t"),
                  (Arc("a", "s", "v", 4), Arc("b", "v", "t", 2), Arc("c", "v", "t", 1), Arc("d", "v", "t", 4)),
                  "s", "t", {"v": 3})
    jobs = (Job("a", 0, 5, 3), Job("b", 3, 5, 2), Job("c", 0, 5, 5), Job("d", 0, 6, 6))
    return Instance(net, jobs, 7)


CATALOG = {
    "two-arc": lambda: two_arc_instance(),
    "two-arc-storage": lambda: two_arc_instance(2),
    "fractional": fractional_optimum_instance,
}
