"""Smoke test for the gammacoh extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`,
then run `python python/smoke_test.py`.
"""

import gammacoh


def main():
    g = gammacoh.AbelianGroup.parse("Z^3 + Z/4 + Z/2 + Z/4")
    assert str(g) == "Z^3 + Z/2 + Z/4 + Z/4"
    assert g.free_rank == 3
    assert g.invariant_factors == [2, 4, 4]
    assert g == gammacoh.AbelianGroup(3, [4, 2, 4])
    assert str(g.torsion()) == "Z/2 + Z/4 + Z/4"

    h = gammacoh.gamma_cohomology(2, 2)
    assert h[1] == g
    assert str(gammacoh.gamma_cohomology(3, 0)[1]) == "Z^3"

    b = gammacoh.b_gamma_cohomology(2, 0)
    assert [str(b[k]) for k in range(3)] == ["Z", "Z^3", "Z^2"]

    c = gammacoh.gamma2_cohomology(1, 2)
    assert str(c[2]) == "Z/2 + Z/2 + Z/2 + Z/2"

    assert str(gammacoh.predict_h1_torsion(2, 2, p=2)) == "Z/2 + Z/4 + Z/4"
    assert gammacoh.predict_h1_torsion(5, 4) == gammacoh.gamma_cohomology(5, 4)[1].torsion()
    assert gammacoh.h1_rank(5, 1) == 20

    series = gammacoh.sl2_free_rank_series(20)
    assert (series[4], series[10], series[20]) == (1, 0, 3)

    assert gammacoh.uct_check(4, 3, 2, 2)
    assert gammacoh.steinberg_check(6, 3, 1, 2, 3)
    assert gammacoh.verify_delta_presentation(3, 1, 16)
    assert gammacoh.group_order(6) == gammacoh.enumerated_order(6) == 144

    try:
        gammacoh.h1_rank(2, 1)
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")

    print("smoke test passed")


if __name__ == "__main__":
    main()
