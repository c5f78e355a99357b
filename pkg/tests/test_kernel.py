import itertools
import os
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccsp import _pykernel, kernel
from ccsp.terms import Event

try:
    from ccsp import _ckernel
except ImportError:  # pragma: no cover - exercised when the extension is absent
    _ckernel = None

KERNELS = [pytest.param(_pykernel, id="python")]
if _ckernel is not None:
    KERNELS.append(pytest.param(_ckernel, id="cython"))

A, B, C = Event("a"), Event("b"), Event("c")
S1, S2 = Event("s", (1,)), Event("s", (2,))


def brute_force(a, b, sync):
    """Every order-preserving shuffle, then filter for sync agreement."""
    n = len(a) + len(b)
    out = set()
    for picks in itertools.combinations(range(n), len(a)):
        merged, ia, ib = [], 0, 0
        for k in range(n):
            if k in picks:
                merged.append(("a", a[ia]))
                ia += 1
            else:
                merged.append(("b", b[ib]))
                ib += 1
        out.add(tuple(merged))
    # A joint event appears in the shuffle as an a-side occurrence immediately
    # followed by an equal b-side one; any other placement of a sync event is
    # invalid.  Collapsing the pairs gives the merge.
    result = set()
    for merged in out:
        events, k, ok = [], 0, True
        while k < len(merged):
            side, e = merged[k]
            if e.channel not in sync:
                events.append(e)
                k += 1
            elif side == "a" and k + 1 < len(merged) and merged[k + 1] == ("b", e):
                events.append(e)
                k += 2
            else:
                ok = False
                break
        if ok:
            result.add(tuple(events))
    return result


@pytest.mark.parametrize("impl", KERNELS)
@pytest.mark.parametrize(
    "a, b, sync, expected",
    [
        ((), (), frozenset(), {()}),
        ((A,), (B,), frozenset(), {(A, B), (B, A)}),
        ((S1,), (S1,), frozenset({"s"}), {(S1,)}),
        ((S1,), (S2,), frozenset({"s"}), set()),
        ((A, S1), (S1, B), frozenset({"s"}), {(A, S1, B)}),
        ((A,), (A,), frozenset(), {(A, A)}),
        ((S1,), (), frozenset({"s"}), set()),
    ],
)
def test_known_merges(impl, a, b, sync, expected):
    assert impl.interleavings(a, b, sync) == expected


def test_free_interleaving_count():
    a = tuple(Event(f"a{i}") for i in range(4))
    b = tuple(Event(f"b{i}") for i in range(3))
    assert len(_pykernel.interleavings(a, b, frozenset())) == 35


events = st.sampled_from([A, B, C, S1, S2])


@settings(max_examples=300, deadline=None)
@given(st.lists(events, max_size=5), st.lists(events, max_size=5), st.sets(st.sampled_from("abcs")))
def test_python_kernel_matches_brute_force(a, b, sync):
    sync = frozenset(sync)
    assert _pykernel.interleavings(tuple(a), tuple(b), sync) == brute_force(tuple(a), tuple(b), sync)


@pytest.mark.skipif(_ckernel is None, reason="compiled kernel not built")
@settings(max_examples=500, deadline=None)
@given(st.lists(events, max_size=7), st.lists(events, max_size=7), st.sets(st.sampled_from("abcs")))
def test_kernels_agree(a, b, sync):
    sync = frozenset(sync)
    a, b = tuple(a), tuple(b)
    assert _ckernel.interleavings(a, b, sync) == _pykernel.interleavings(a, b, sync)
    assert _ckernel.sync_projection(a, sync) == _pykernel.sync_projection(a, sync)


def test_kernel_selection_honours_environment():
    code = "from ccsp import kernel; print(kernel.IMPLEMENTATION)"
    env = {**os.environ, "CCSP_PURE_PYTHON": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
    assert kernel.IMPLEMENTATION in ("python", "cython")
