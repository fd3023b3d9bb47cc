import random
import sys
import threading

from support import SQUAREFREE, run_tests, sqrt_system

import verify
from construct import enumerate_certified_sets
from epsilon import compute_epsilon

NUM_THREADS = 8

results_lock = threading.Lock()


def _in_threads(worker, jobs):
    """Run worker(job) for every job across NUM_THREADS threads; return {job index: result}."""
    out, errors = {}, []

    def run(indices):
        for i in indices:
            try:
                value = worker(jobs[i])
            except Exception as e:
                with results_lock:
                    errors.append(e)
                continue
            with results_lock:
                out[i] = value

    threads = [threading.Thread(target=run, args=(range(t, len(jobs), NUM_THREADS),)) for t in range(NUM_THREADS)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    if errors:
        raise errors[0]
    return out


def test_threaded_epsilon_matches_sequential():
    rng = random.Random(4)
    jobs = [(tuple(rng.sample(SQUAREFREE, rng.randint(2, 4))), rng.choice([2, 3])) for _ in range(24)]
    sequential = [compute_epsilon(sqrt_system(*r), h) for r, h in jobs]
    threaded = _in_threads(lambda job: compute_epsilon(sqrt_system(*job[0]), job[1]), jobs)
    for i, eps in enumerate(sequential):
        assert threaded[i] == eps


def test_threaded_enumeration_keeps_order():
    system = sqrt_system(2, 3, 5, 7)
    expected = [s.choice_code for s in enumerate_certified_sets(system, 2, 1, 44, limit=100)]
    got = _in_threads(lambda _: [s.choice_code for s in enumerate_certified_sets(system, 2, 1, 44, limit=100)],
                      list(range(NUM_THREADS)))
    assert all(codes == expected for codes in got.values())


def test_process_pool_matches_sequential():
    rng = random.Random(12)
    saved = verify.PARALLEL_THRESHOLD
    verify.PARALLEL_THRESHOLD = 0
    try:
        for _ in range(5):
            pts = rng.sample(range(-200, 200), rng.randint(5, 12))
            h = rng.randint(2, 4)
            sequential = verify.representation_counts(pts, h, workers=1)
            parallel = verify.representation_counts(pts, h, workers=2)
            assert parallel == sequential
            a = verify.verify_set(pts, h, workers=1)
            b = verify.verify_set(pts, h, workers=3)
            assert (a.is_bh, a.sumset_size, a.collisions) == (b.is_bh, b.sumset_size, b.collisions)
    finally:
        verify.PARALLEL_THRESHOLD = saved


def test_partition_covers_first_coordinates():
    for h in range(1, 7):
        for workers in range(1, 9):
            chunks = verify._partition(h, workers)
            assert sorted(k for chunk in chunks for k in chunk) == list(range(h + 1))
            assert all(chunks)


def main():
    return run_tests(globals(), "concurrency tests")


if __name__ == "__main__":
    sys.exit(main())
