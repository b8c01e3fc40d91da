import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("lab", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "lab"))


@pytest.fixture
def gen():
    return np.random.default_rng(20240601)


# acceptance verdicts, echoed once more at the end of the run
VERDICTS: list[str] = []


@pytest.fixture
def verdict(capsys):
    def record(label: str, checks: dict, elapsed: float | None = None):
        ok = all(bool(v[0]) if isinstance(v, tuple) else bool(v) for v in checks.values())
        parts = []
        for name, v in checks.items():
            passed, shown = v if isinstance(v, tuple) else (v, "")
            parts.append(f"{name}{'=' + str(shown) if shown != '' else ''}{'' if passed else ' (x)'}")
        t = f" [{elapsed:.1f}s]" if elapsed is not None else ""
        line = f"{label} {'PASS' if ok else 'FAIL'}{t}: " + "; ".join(parts)
        VERDICTS.append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(VERDICTS, key=lambda s: int(s[2:s.index(" ")])):
            terminalreporter.write_line(line)
