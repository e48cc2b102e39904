"""One test per acceptance criterion, each printing a PASS/FAIL line.

Criteria 4, 9 and 10 are run in the form as stated and in a corrected form.
The as-stated forms fail on the computed data; they are kept as plain tests
so the discrepancy stays visible.
"""

import pytest

from faberlab import checks

CRITERIA = {
    "1": lambda: checks.check_closed_form(),
    "2": lambda: checks.check_contour_oracle(tol=1e-8, seed=0),
    "3": lambda: checks.check_alpha(),
    "4": lambda: checks.check_subsequence(as_printed=True),
    "4-corrected": lambda: checks.check_subsequence(as_printed=False),
    "5": lambda: checks.check_interior_convergence(),
    "6": lambda: checks.check_exterior_boundary(),
    "7": lambda: checks.check_cluster_zeros(),
    "8": lambda: checks.check_zero_free(),
    "9": lambda: checks.check_weak_star(mixed=False),
    "9-mixed": lambda: checks.check_weak_star(mixed=True),
    "10": lambda: checks.check_accumulation(paired_residue=False),
    "10-paired": lambda: checks.check_accumulation(paired_residue=True),
}


@pytest.mark.parametrize("key", list(CRITERIA))
def test_criterion(key, capsys):
    result = CRITERIA[key]()
    with capsys.disabled():
        print(f"\n{result.line()}  {result.to_json()['metrics']}")
    assert result.passed, result.to_json()["metrics"]


if __name__ == "__main__":
    for key, run in CRITERIA.items():
        print(run().line())
