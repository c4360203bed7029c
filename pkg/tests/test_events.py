import numpy as np
import pytest

from topicsim.events import EventQueue


def test_ties_pop_in_insertion_order():
    q = EventQueue(horizon=10.0)
    q.push(5.0, "a")
    q.push(3.0, "b")
    q.push(3.0, "c")
    assert [q.pop().actor_id for _ in range(3)] == ["b", "c", "a"]


def test_pop_sequence_nondecreasing_under_random_load():
    q = EventQueue(horizon=1000.0)
    rng = np.random.default_rng(3)
    for i in range(10_000):
        q.push(float(rng.uniform(0, 1000)), f"u{i}")
    popped = [q.pop() for _ in range(len(q))]
    times = [e.time for e in popped]
    assert times == sorted(times)
    # equal times resolve by insertion sequence
    for first, second in zip(popped, popped[1:]):
        if first.time == second.time:
            assert first.seq < second.seq


def test_push_during_drain_orders_after_earlier_events():
    q = EventQueue(horizon=1000.0)
    q.push(192.0, "alice")
    q.push(193.0, "bob")
    order = []
    while q:
        e = q.pop()
        order.append((e.time, e.actor_id))
        if e.actor_id == "alice":
            q.push(194.0, "alice-return")
    assert order == [(192.0, "alice"), (193.0, "bob"), (194.0, "alice-return")]


def test_interleaved_push_pop_property():
    q = EventQueue(horizon=1.0)
    rng = np.random.default_rng(17)
    last = (-1.0, -1)
    pushed = 0
    popped = 0
    while popped < 10_000:
        if pushed < 10_000 and (not q or rng.random() < 0.6):
            t = float(rng.random())
            # events created while draining may not be scheduled in the past
            t = max(t, last[0] if last[0] >= 0 else 0.0)
            q.push(min(t, 1.0), f"x{pushed}")
            pushed += 1
        else:
            e = q.pop()
            assert (e.time, e.seq) > last
            last = (e.time, e.seq)
            popped += 1


def test_bounds_and_exhaustion():
    q = EventQueue(horizon=10.0)
    with pytest.raises(ValueError):
        q.push(-0.1, "a")
    with pytest.raises(ValueError):
        q.push(10.1, "a")
    with pytest.raises(IndexError):
        q.pop()
