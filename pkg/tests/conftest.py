import numpy as np

from qengine import engine
from qengine.engine import EngineKind, EngineParams


def worked_point(kind=EngineKind.COHERENT, alpha=0.5):
    """gamma0 = 1, n_h = 1, n_c = 0, omega = (10, 5): the hand-derived chain."""
    return EngineParams.from_occupations(1.0, 1.0, 0.0, alpha, kind=kind)


def seeded_points(seed, count, kinds=tuple(EngineKind)):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        base = engine.random_params(rng, EngineKind.COHERENT)
        out.extend(base.with_(kind=k) for k in kinds)
    return out


def rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda s: int(s.split()[2])):
        terminalreporter.write_line(line)
