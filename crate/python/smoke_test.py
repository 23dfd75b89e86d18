"""Smoke test for the Python bindings. Run after `pip install -e .`."""

import math

import cohkit


def close(a, b, tol=1e-10):
    assert abs(a - b) < tol, (a, b)


def main():
    h = 1 / math.sqrt(2)
    bell = cohkit.DensityMatrix.from_pure([h, 0, 0, h], split=(2, 2))
    pp = cohkit.ObservableBasis("prod(pauli,pauli)")
    r = cohkit.report(bell, pp)
    close(r.c, 1.0)
    close(r.c_l, 0.0)
    close(r.delta, 1.0)
    assert r.norm == "schatten1" and not r.truncated

    # Same numbers from expectation values alone.
    values = pp.expectations(bell)
    populations = [bell.matrix()[k][k].real for k in range(4)]
    r2 = cohkit.report_from_expectations(pp, values, populations)
    close(r2.c, r.c)
    close(r2.delta, r.delta)

    plus = cohkit.DensityMatrix([[0.5, 0.5], [0.5, 0.5]])
    close(cohkit.coherence(plus, cohkit.ObservableBasis("pauli")), 1.0)
    close(cohkit.report_from_expectations(cohkit.ObservableBasis("pauli"), [h, h, 0, 0], [0.5, 0.5]), 1.0)

    spin = cohkit.ObservableBasis("prod(spin:2,spin:2)")
    assert not spin.is_complete
    try:
        cohkit.coherence(cohkit.DensityMatrix.maximally_mixed(9), spin, norm="schatten1")
    except cohkit.CohkitError:
        pass
    else:
        raise AssertionError("truncated Schatten-1 without approximate should fail")

    try:
        cohkit.DensityMatrix([[1.5, 0], [0, -0.5]])
    except cohkit.CohkitError as e:
        assert "positive" in str(e)
    else:
        raise AssertionError("non-PSD state accepted")

    back = cohkit.DensityMatrix.parse(bell.to_toml())
    assert back.matrix() == bell.matrix() and back.split == (2, 2)

    row = cohkit.family_row(3, 0.0, with_truncated=True)
    close(row["C"], 16 / 9)
    assert row["C_trunc"] <= row["C"]

    ak = cohkit.aklt_row(1.0, 2)
    close(ak["C_full"], 2 * (2 + math.sqrt(2)) / 9)

    traj = cohkit.evolve_squeezing(2, t_max=0.2, sample_every=0.05)
    assert len(traj["t"]) == len(traj["C"]) == 5
    assert max(traj["C_L"]) < 1e-9

    (summary,) = cohkit.c2b_campaign([(2, 2)], 200, seed=1)
    assert summary["violations"] == 0
    scan = cohkit.truncation_scan(2, 500, seed=1)
    assert scan["violations"] == 0

    print("python smoke test passed")


if __name__ == "__main__":
    main()
