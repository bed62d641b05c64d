import copy

import numpy as np

from hurwitz_pia import kernels
from hurwitz_pia.crt import find_irreducible
from hurwitz_pia.selftest import SUITES, run_selftest


def test_fresh_build_passes():
    results = run_selftest()
    assert [r.name for r in results] == list(SUITES)
    for r in results:
        assert r.passed, r.line()
        assert r.checked > 0
        assert r.line().startswith("PASS")


def test_corrupted_gamma_is_caught():
    def bad_factor(p):
        f = copy.copy(find_irreducible(p))
        object.__setattr__(f, "gamma", f.gamma + 1)  # skip constructor validation
        return f

    res = {r.name: r for r in run_selftest(find_factor=bad_factor, only=["gamma", "crt_roundtrip"])}
    assert not res["gamma"].passed and res["gamma"].witness == 3
    assert not res["crt_roundtrip"].passed
    assert "FAIL" in res["gamma"].line() and "witness=3" in res["gamma"].line()


def _lazy_tiebreak(num, den):
    """Nearest-point rule that prefers the half-integer candidate on ties."""
    num = np.asarray(num, dtype=np.int64)
    x = num / den
    k = np.floor(x + 0.5)
    m = np.floor(x) + 0.5
    dk = ((x - k) ** 2).sum(axis=-1)
    dm = ((x - m) ** 2).sum(axis=-1)
    pick = np.where((dk < dm)[..., None], k, m)
    return np.rint(2 * pick).astype(np.int64)


def test_corrupted_tiebreak_is_caught():
    res = run_selftest(quantize=_lazy_tiebreak, only=["idempotence"])
    assert len(res) == 1 and not res[0].passed
    assert res[0].witness is not None
