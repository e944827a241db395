"""Smoke test for the normeuclid_py extension module."""

import random
from fractions import Fraction

import normeuclid_py as ne


def random_element(rng, field, bits):
    return ne.RingElement(field, [rng.randint(-(1 << bits), 1 << bits) for _ in range(8)])


def main():
    rng = random.Random(0)
    for field in ne.FIELDS:
        bound = ne.norm_bound(field)
        info = ne.field_info(field)
        assert Fraction(info["disc_k"]) / 4096 == bound
        row = ne.verify_table(field)
        assert row["maximizer_in_voronoi"]

        one = ne.RingElement.one(field)
        assert ne.is_unit(one) and one.norm() == 1

        for _ in range(50):
            a = random_element(rng, field, 64)
            b = random_element(rng, field, 32)
            if b.is_zero():
                continue
            q, r, ratio = ne.divide(a, b)
            assert b * q + r == a
            assert ratio <= bound < 1
            assert Fraction(abs(r.norm()), abs(b.norm())) == ratio
            assert ne.exact_div(a * b, b) == a

            g, u, v = ne.xgcd(a, b)
            assert u * a + v * b == g
            ne.exact_div(a, g)
            ne.exact_div(b, g)

        try:
            ne.divide(one, ne.RingElement(field, [0] * 8))
        except ZeroDivisionError:
            pass
        else:
            raise AssertionError("division by zero was accepted")
        print(f"{field}: ok, sup-norm bound {bound}")

    try:
        ne.exact_div(ne.RingElement.one("zeta15"), ne.RingElement("zeta15", [2] + [0] * 7))
    except ne.NormEuclidError as e:
        assert "NotDivisible" in str(e)
    else:
        raise AssertionError("1 / 2e_0 was reported integral")
    print("smoke test passed")


if __name__ == "__main__":
    main()
