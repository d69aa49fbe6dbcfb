"""Exercise the extension module end to end.

Run after building, with the module importable, e.g.:

    cargo build -p dratkit-py --release
    cp target/release/libdratkit.so crates/python/python/dratkit.so
    python3 crates/python/python/smoke_test.py
"""

import dratkit

FULL2 = "p cnf 2 4\n1 2 0\n-1 2 0\n1 -2 0\n-1 -2 0\n"


def main():
    report = dratkit.check_drat(FULL2, "1 0\n0\n")
    assert report.verified, report
    assert report.step is None and report.reason is None
    assert "visited_clauses" in report.counters

    rejected = dratkit.check_drat(FULL2, "2 0\n1 -2 0\n")
    assert not rejected.verified
    assert rejected.step is not None and rejected.reason

    assert dratkit.check_drat(FULL2, b"\x61\x02\x00\x61\x00").verified

    unit_pair = "p cnf 1 2\n1 0\n-1 0\n"
    assert dratkit.check_drat(unit_pair, "d 1 0\n0\n", mode="operational").verified
    assert not dratkit.check_drat(unit_pair, "d 1 0\n0\n", mode="specified").verified

    lrat, trimmed, core = dratkit.trim(FULL2, "1 2 0\n1 0\n0\n")
    assert lrat == "5 1 0 1 3 0\n6 0 5 2 4 0\n", lrat
    assert trimmed == "1 0\n0\n", trimmed
    assert dratkit.check_lrat(FULL2, lrat).verified
    assert dratkit.check_drat(core, trimmed).verified

    try:
        dratkit.trim(FULL2, "2 0\n")
    except ValueError:
        pass
    else:
        raise AssertionError("trim accepted an invalid proof")

    php = dratkit.gen_php(3)
    assert php.startswith("p cnf 12 22\n")
    status, proof = dratkit.solve(php, seed=7)
    assert status == "UNSAT"
    assert dratkit.check_drat(php, proof).verified
    er = dratkit.to_er(php, proof)
    assert dratkit.check_er(php, er).verified

    status, binary = dratkit.solve(php, binary=True)
    assert status == "UNSAT" and isinstance(binary, bytes)
    assert dratkit.check_drat(php, binary).verified

    status, model = dratkit.solve("p cnf 2 1\n1 2 0\n")
    assert status == "SAT" and (1 in model or 2 in model)

    assert dratkit.gen_random(10, 30, 3, seed=1) == dratkit.gen_random(10, 30, 3, seed=1)

    print("ok")


if __name__ == "__main__":
    main()
