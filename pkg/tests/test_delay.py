import numpy as np
import pytest

from errors import ContractViolation
from services.delay import DelaySchedule, DelayVariant, FeedbackQueue, drain, enqueue, schedule_delay


def test_fixed_schedule():
    schedule = DelaySchedule.fixed(5, 3)
    assert schedule.variant is DelayVariant.FIXED
    assert [schedule_delay(schedule, t) for t in range(1, 6)] == [3, 3, 3, 3, 3]
    np.testing.assert_array_equal(schedule.arrival_rounds(), [3, 4, 5, 6, 7])
    assert schedule.max_delay == 3


def test_uniform_schedule_is_seeded_and_bounded():
    first = DelaySchedule.uniform(1000, 7, seed=42)
    second = DelaySchedule.uniform(1000, 7, seed=42)
    np.testing.assert_array_equal(first.delays, second.delays)
    assert first.delays.min() >= 1
    assert first.delays.max() <= 7
    # con 1000 muestras aparecen ambos extremos
    assert set(np.unique(first.delays)) == set(range(1, 8))


def test_bursty_schedule():
    schedule = DelaySchedule.bursty(6, period=3, burst_delay=5)
    np.testing.assert_array_equal(schedule.delays, [1, 1, 5, 1, 1, 5])
    assert schedule.max_delay == 5


def test_delays_below_one_rejected():
    with pytest.raises(ContractViolation):
        DelaySchedule(DelayVariant.FIXED, [1, 0, 2])
    with pytest.raises(ContractViolation):
        DelaySchedule.fixed(4, 0)
    with pytest.raises(ContractViolation):
        DelaySchedule.uniform(4, 0, seed=0)


def test_delay_round_out_of_range():
    with pytest.raises(ContractViolation):
        DelaySchedule.fixed(3, 1).delay(4)


def test_queue_releases_at_arrival_round():
    queue = FeedbackQueue()
    assert queue.enqueue(1, np.array([1.0]), 3) == 3
    assert drain(queue, 1) == []
    assert drain(queue, 2) == []
    arrivals = drain(queue, 3)
    assert [k for k, _ in arrivals] == [1]
    assert queue.was_delivered(1)


def test_queue_delivers_in_ascending_k():
    queue = FeedbackQueue()
    enqueue(queue, 1, np.array([1.0]), 3)
    enqueue(queue, 2, np.array([2.0]), 2)
    enqueue(queue, 3, np.array([3.0]), 1)
    arrivals = queue.drain(3)
    assert [k for k, _ in arrivals] == [1, 2, 3]
    assert [float(g[0]) for _, g in arrivals] == [1.0, 2.0, 3.0]
    assert queue.max_batch == 3


def test_delay_one_is_immediate():
    queue = FeedbackQueue()
    queue.enqueue(4, np.zeros(2), 1)
    assert [k for k, _ in queue.drain(4)] == [4]


def test_duplicate_enqueue_rejected():
    queue = FeedbackQueue()
    queue.enqueue(1, np.zeros(1), 2)
    with pytest.raises(ContractViolation):
        queue.enqueue(1, np.zeros(1), 1)


def test_drain_must_increase():
    queue = FeedbackQueue()
    queue.drain(2)
    with pytest.raises(ContractViolation):
        queue.drain(2)
    with pytest.raises(ContractViolation):
        queue.drain(1)


def test_gradients_past_horizon_stay_pending():
    schedule = DelaySchedule.fixed(10, 4)
    queue = FeedbackQueue()
    for t in range(1, 11):
        queue.enqueue(t, np.zeros(1), schedule.delay(t))
        queue.drain(t)
    # k + 3 <= 10 solo para k <= 7
    assert queue.delivered_count == 7
    assert queue.pending_count == 3
