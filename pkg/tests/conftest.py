import pytest

from pap1324 import _pykernel
from pap1324.enumerator import reference_table, write_series

try:
    from pap1324 import _ckernel
except ImportError:  # extension not built; fallback-only runs
    _ckernel = None

KERNELS = [_pykernel] + ([_ckernel] if _ckernel else [])

# (signature, composition, count) for every signature needed up to n = 6
COUNT_TRACE = [
    ("1", ",", 1),
    (",1", ",", 1),
    ("2", ",1 + 1", 2),
    (",2", ",1 + ,1", 2),
    ("1,1", ",1 + 1", 2),
    ("3", ",2 + 1,1 + 2", 6),
    (",3", ",2 + [1]1 + ,2", 5),
    ("1,2", ",2 + 1,1 + 1,1", 6),
    ("2,1", ",2 + 1,1 + 2", 6),
    ("4", ",3 + 1,2 + 2,1 + 3", 23),
    (",4", ",3 + [1]2 + [2]1 + ,3", 14),
    ("1[1]1", "[1]1 + 1,1", 3),
    ("1,3", ",3 + 1,2 + 1[1]1 + 1,2", 20),
    ("2,2", ",3 + 1,2 + 2,1 + 2,1", 23),
    ("3,1", ",3 + 1,2 + 2,1 + 3", 23),
    ("5", ",4 + 1,3 + 2,2 + 3,1 + 4", 103),
    (",5", ",4 + [1]3 + [2]2 + [3]1 + ,4", 42),
    ("1[1]2", "[1]2 + 1[1]1 + 1[1]1", 8),
    ("1[2]1", "[2]1 + 1,2", 8),
    ("1,4", ",4 + 1,3 + 1[1]2 + 1[2]1 + 1,3", 70),
    (",1[1]1", "[1]1 + ,2", 3),
    ("2[1]1", ",1[1]1 + 1[1]1 + 2,1", 12),
    ("2,3", ",4 + 1,3 + 2,2 + 2[1]1 + 2,2", 92),
    ("3,2", ",4 + 1,3 + 2,2 + 3,1 + 3,1", 103),
    ("4,1", ",4 + 1,3 + 2,2 + 3,1 + 4", 103),
    ("6", ",5 + 1,4 + 2,3 + 3,2 + 4,1 + 5", 513),
]

# prefix -> signature for n = 20; the last row in canonical form
PREFIX_ROWS = [
    ((), "20"),
    ((11,), "10,9"),
    ((11, 14), "10,[2]6"),
    ((11, 14, 5), "4,5[2]6"),
    ((11, 14, 5, 9), "4,[3]1[2]6"),
    ((11, 14, 5, 9, 15), "4,[3][3]5"),
]


@pytest.fixture(scope="session")
def reference():
    return reference_table()


@pytest.fixture(params=KERNELS, ids=lambda k: k.NAME)
def kern(request):
    return request.param


@pytest.fixture(scope="session")
def reference_path(tmp_path_factory, reference):
    path = tmp_path_factory.mktemp("data") / "reference.txt"
    write_series(reference, path)
    return str(path)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[k])
