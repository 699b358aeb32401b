"""Acceptance criteria, each at its stated tolerance.

The table reproductions are full sweeps and take most of the runtime
(about half an hour on one core).  A PASS/FAIL line per criterion is printed
in the terminal summary.
"""

import os
import random
import signal
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from binthue.cf_engine import Side, expand_root, validate_convergent
from binthue.numerics import PrecisionPolicy
from binthue.oracle import OracleQuery, brute_solve
from binthue.runner import SweepConfig, compare_fixture, packaged_fixture, read_checkpoint, sweep
from binthue.thue_core import (
    DIRECT_TEST_TABLE,
    EquationInstance,
    c2_of,
    direct_test_limit,
    is_irreducible,
    m_max_for_direct_test,
    solve_instance,
)

WORKERS = os.cpu_count() or 1

C1 = "Table reproduction n=3, m <= 10^4"
C2 = "Table reproduction n=4, m <= 10^5"
C3 = "Table reproduction n=5, m <= 10^6"
C4 = "Table reproduction n=13 (m <= 1.6e6), n=17 (m <= 1.4e5), n=19/23/29 (m <= 10^6)"
C5 = "Direct-test thresholds within +-1 of the published table; n=29 exceeds it"
C6 = "Oracle equivalence n=3, m <= 2000, y <= 5000"
C7 = "c2 closed form to 1e-25 for odd primes n <= 29"
C8 = "CF engine: bracketing and determinant for 2^(1/3); doubled precision reproduces"
C9 = "Determinism across worker counts and kill/resume"
C10 = "Full-scale sweeps are out of scope; criteria 1-4 are the scaled reproductions"


@pytest.fixture(scope="session")
def sweep_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("sweeps")


def run_table_sweep(sweep_dir, n, m_hi, workers=WORKERS, name=None):
    out = sweep_dir / (name or f"n{n}_{m_hi}.csv")
    cfg = SweepConfig(n=n, m_lo=2, m_hi=m_hi, output_path=out, workers=workers,
                      fixture_path=packaged_fixture(n))
    report = sweep(cfg)
    assert report.solved_count + report.skipped_reducible_count == m_hi - 1
    return out, report


def assert_reproduces(sweep_dir, n, m_hi, must_contain=()):
    out, report = run_table_sweep(sweep_dir, n, m_hi)
    missing, extra = report.fixture_diff
    print(f"n={n} m<={m_hi}: {report.solutions_found} rows, {report.wall_time:.0f}s, "
          f"escalations={report.escalations}")
    assert (missing, extra) == ([], [])
    text = out.read_text()
    for m, x, y in must_contain:
        assert f"{n},{m},{x},{y}," in text
    return out


@pytest.mark.criterion("1", C1)
def test_criterion_1_cubic_table(sweep_dir):
    out = assert_reproduces(sweep_dir, 3, 10**4, [(2, 1, 1), (9709, 64, 3)])
    rows = out.read_text().splitlines()[1:]
    assert len(rows) == 73


@pytest.mark.criterion("2", C2)
def test_criterion_2_quartic_table(sweep_dir):
    assert_reproduces(sweep_dir, 4, 10**5, [(7140, 239, 26), (83522, 17, 1)])


@pytest.mark.criterion("3", C3)
def test_criterion_3_quintic_table(sweep_dir):
    out = assert_reproduces(sweep_dir, 5, 10**6, [(894661, 31, 2)])
    y2 = [r for r in out.read_text().splitlines()[1:] if r.split(",")[3] == "2"]
    assert y2 == ["5,894661,31,2,-1"]


@pytest.mark.criterion("4", C4)
@pytest.mark.parametrize("n, m_hi", [(13, 1_600_000), (17, 140_000), (19, 10**6), (23, 10**6), (29, 10**6)])
def test_criterion_4_higher_tables(sweep_dir, n, m_hi):
    assert_reproduces(sweep_dir, n, m_hi)


@pytest.mark.criterion("5", C5)
def test_criterion_5_thresholds():
    for n, published in DIRECT_TEST_TABLE.items():
        computed = m_max_for_direct_test(n)
        print(f"n={n}: computed {computed}, published {published}")
        if n == 29:
            assert computed > published
            assert direct_test_limit(29) == max(computed, published)
        else:
            assert abs(computed - published) <= 1


@pytest.mark.criterion("6", C6)
def test_criterion_6_oracle_equivalence():
    y_max = 5000
    checked = 0
    for m in range(2, 2001):
        if not is_irreducible(3, m):
            continue
        ours = {t for t in solve_instance(EquationInstance(3, m)) if t.y <= y_max}
        assert ours == set(brute_solve(OracleQuery(3, m, y_max))), m
        checked += 1
    assert checked == 2000 - 1 - 11  # cubes 8..1728


@pytest.mark.criterion("7", C7)
@pytest.mark.parametrize("n", [3, 5, 7, 11, 13, 17, 19, 23, 29])
def test_criterion_7_c2_closed_form(n):
    ball = c2_of(n)
    exact = Fraction(n, 2 ** (n - 1))
    # every point of the certified ball is within 1e-25 of the closed form
    assert max(abs(ball.lower - exact), abs(ball.upper - exact)) <= Fraction(1, 10**25)


@pytest.mark.criterion("8", C8)
def test_criterion_8_cube_root_two():
    r = expand_root(2, 3, 10**500)
    conv = r.convergents[:20]
    assert len(conv) == 20
    h_prev, k_prev = 1, 0
    for j, c in enumerate(conv):
        side = validate_convergent(2, 3, c.numerator, c.denominator)
        assert side is (Side.BELOW if j % 2 == 0 else Side.ABOVE)
        # a_j is the true quotient: the root lies between the neighbouring convergents
        # h_j/k_j and (h_j + h_{j-1})/(k_j + k_{j-1}) on the expected sides
        mediant = validate_convergent(2, 3, c.numerator + h_prev, c.denominator + k_prev)
        assert mediant is not side and mediant is not Side.EQUAL
        assert c.numerator * k_prev - h_prev * c.denominator == (-1) ** (j - 1)
        h_prev, k_prev = c.numerator, c.denominator


@pytest.mark.criterion("8", C8)
def test_criterion_8_doubled_precision():
    rng = random.Random(20240518)
    pairs = []
    while len(pairs) < 50:
        n = rng.choice([3, 4, 5, 7, 11, 13, 17, 19, 23, 29])
        m = rng.randint(2, 10**7)
        if is_irreducible(n, m):
            pairs.append((m, n))
    for m, n in pairs:
        r = expand_root(m, n, 10**500)
        doubled = PrecisionPolicy(initial_digits=2 * r.digits, max_digits=4 * r.digits)
        assert expand_root(m, n, 10**500, doubled).quotients == r.quotients, (m, n)


@pytest.mark.criterion("9", C9)
def test_criterion_9_workers(sweep_dir):
    one, _ = run_table_sweep(sweep_dir, 3, 10**4, workers=1, name="w1.csv")
    eight, _ = run_table_sweep(sweep_dir, 3, 10**4, workers=8, name="w8.csv")
    assert one.read_bytes() == eight.read_bytes()


@pytest.mark.criterion("9", C9)
def test_criterion_9_kill_and_resume(sweep_dir):
    reference, _ = run_table_sweep(sweep_dir, 3, 10**4, workers=1, name="ref.csv")
    out, ck = sweep_dir / "killed.csv", sweep_dir / "killed.ckpt"
    argv = [sys.executable, "-m", "binthue", "sweep", "--n", "3", "--m-lo", "2", "--m-hi", "10000",
            "--out", str(out), "--checkpoint", str(ck)]
    env = dict(os.environ, BINTHUE_CHECKPOINT_SECONDS="0")
    proc = subprocess.Popen(argv, env=env, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    # kill once a checkpoint part way through the range exists
    deadline = time.monotonic() + 120
    while time.monotonic() < deadline:
        ckpt = read_checkpoint(ck) if ck.exists() else None
        if ckpt is not None and ckpt.last_complete_m >= 3000:
            break
        time.sleep(0.005)
    proc.send_signal(signal.SIGKILL)
    proc.wait()
    killed_at = read_checkpoint(ck).last_complete_m
    assert killed_at < 10000, "sweep finished before it could be killed"
    resumed = subprocess.run(argv, capture_output=True, text=True)
    assert resumed.returncode == 0, resumed.stderr
    assert out.read_bytes() == reference.read_bytes()
    print(f"killed after m={killed_at}, resumed to completion")


@pytest.mark.criterion("10", C10)
def test_criterion_10_scaled_ranges_cover_full_tables():
    # the complete m < 10^7 sweeps are not run; for n = 13 and 17 the scaled
    # ranges of criterion 4 already reach every published row
    for n, m_hi in [(13, 1_600_000), (17, 140_000)]:
        rows = compare_fixture(packaged_fixture(n), packaged_fixture(n))
        assert rows == ([], [])
        missing, _ = compare_fixture(packaged_fixture(n), packaged_fixture(n), (2, m_hi))
        assert missing == []
        assert max(int(line.split(",")[1]) for line in
                   packaged_fixture(n).read_text().splitlines()[1:]) <= m_hi
