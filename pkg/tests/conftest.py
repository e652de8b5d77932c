import inspect


def pytest_pycollect_makeitem(collector, name, obj):
    # The suite is unittest-based: every test is a TestCase method. Module-level
    # functions named test_* are helpers (e.g. test_sets, or library imports
    # like app.extensions.test_bijections), so don't collect them as tests.
    if inspect.isfunction(obj) and inspect.ismodule(getattr(collector, "obj", None)):
        return []
    return None
