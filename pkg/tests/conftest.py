import time


def pytest_sessionstart(session):
    session.config._suite_t0 = time.monotonic()


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.monotonic() - getattr(session.config, "_suite_t0", time.monotonic())
    verdict = "PASS" if elapsed < 300.0 else "FAIL"
    print(f"\n[criterion 10] full suite wall time {elapsed:.1f}s (limit 300s): {verdict}")
