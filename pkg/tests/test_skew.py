import pytest

from skewlab.bases import CircleRotation, FiniteOrbitBase, OneSidedWord
from skewlab.catalog import make_coinflip, make_keller, make_noinvattr, make_product
from skewlab.errors import DomainError
from skewlab.fiber import FiberMap
from skewlab.skew import SkewSystem, classify, detect_pinching, orbit, step


def autonomous(fm: FiberMap, base=None) -> SkewSystem:
    return SkewSystem(
        base=base or CircleRotation(0.3),
        fiber_at=lambda theta: fm,
        a=fm.a,
        label="test",
    )


class TestStep:
    def test_zero_fiber_is_fixed(self):
        sys_ = make_noinvattr(8)
        for theta in (0.0, -1.0, 0.5):
            assert step(sys_, (theta, 0.0))[1] == 0.0

    def test_coinflip_writes_leading_bit(self):
        sys_ = make_coinflip("one")
        w = OneSidedWord((1, 0, 1, 1), (0,))
        new_base, val = step(sys_, (w, 0.0))
        assert val == 1.0
        assert new_base == w.shifted()

    def test_rotation_coordinate(self):
        sys_ = make_keller(omega=0.3)
        (theta1, _x1) = step(sys_, (0.1, 0.5))
        assert theta1 == pytest.approx(0.4)

    def test_fiber_domain_checked(self):
        sys_ = make_keller()
        with pytest.raises(DomainError):
            step(sys_, (0.1, 1.5))

    def test_composition_matches_manual(self):
        sys_ = make_keller(omega=0.437)
        theta, x = 0.21, 0.8
        pts = orbit(sys_, (theta, x), 12)
        cur_t, cur_x = theta, x
        for n in range(1, 13):
            cur_x = sys_.fiber_at(cur_t)(cur_x)
            cur_t = sys_.base.step(cur_t)
            assert pts[n] == (cur_t, cur_x)

    def test_two_sided_step_then_back(self):
        sys_ = make_coinflip("two")
        w = sys_.base.parse_point("01~100~1@2")
        fwd, _ = step(sys_, (w, 1.0))
        assert sys_.base.predecessor(fwd) == w


class TestClassify:
    def test_noinvattr(self):
        cls = classify(make_noinvattr(16), 10, grid_size=2048)
        assert cls.kind == "monotone-equiconcave"
        assert cls.beta == pytest.approx(1.0, abs=1e-3)

    def test_product_beta_matches_analytic(self):
        sys_ = make_product(
            {"form": "quadratic-hump", "k": 4.0},
            {"form": "constant", "c": 0.6},
            CircleRotation(0.41),
        )
        cls = classify(sys_, 8, grid_size=2048)
        assert cls.kind == "isoclinic-equiconcave"
        assert cls.beta == pytest.approx(4.0, abs=1e-3)

    def test_full_hump_unclassified(self):
        sys_ = make_product(
            {"form": "quadratic-hump", "k": 4.0},
            {"form": "constant", "c": 1.0},
            CircleRotation(0.41),
        )
        cls = classify(sys_, 8, grid_size=2048)
        assert cls.kind == "unclassified"
        assert any("range condition" in d for d in cls.diagnostics)

    def test_zero_member_keeps_family_equiconcave(self):
        base = FiniteOrbitBase([0.0, 1.0], {0.0: 1.0, 1.0: 0.0})
        strong = FiberMap(1.0, lambda x: x * (2 - x), form="strong")
        zero = FiberMap(1.0, lambda x: 0.0, form="zero")
        sys_ = SkewSystem(
            base=base,
            fiber_at=lambda t: zero if t == 0.0 else strong,
            a=1.0,
        )
        cls = classify(sys_, 2, grid_size=512)
        assert cls.kind == "monotone-equiconcave"
        assert cls.beta == pytest.approx(1.0, abs=1e-3)
        assert any("zero map" in d for d in cls.diagnostics)

    def test_coinflip_unclassified_with_diagnostics(self):
        cls = classify(make_coinflip("one"), 4, grid_size=64)
        assert cls.kind == "unclassified"
        assert cls.diagnostics

    def test_monotone_product(self):
        sys_ = make_product(
            {"form": "logistic-scaled", "k": 1.0},
            {"form": "constant", "c": 0.8},
            CircleRotation(0.39),
        )
        cls = classify(sys_, 6, grid_size=1024)
        assert cls.kind == "monotone-equiconcave"
        assert cls.beta == pytest.approx(1.0, abs=1e-3)


class TestDetectPinching:
    def test_positive_family_has_no_zero_maps(self):
        rep = detect_pinching(make_keller(), 0.1, horizon=50, grid_size=256)
        assert rep.zero_steps == []
        assert "no pinching observed" in rep.verdict

    def test_vanishing_point_never_hit_by_irrational_orbit(self):
        sys_ = make_keller(q_spec={"form": "sin-squared", "c": 1.0, "eps": 0.0})
        rep = detect_pinching(sys_, 0.1234, horizon=500, grid_size=128)
        assert rep.zero_steps == []

    def test_zero_map_at_fixed_point_reported_everywhere(self):
        base = FiniteOrbitBase([0.0], {0.0: 0.0})
        sys_ = SkewSystem(
            base=base, fiber_at=lambda t: FiberMap(1.0, lambda x: 0.0), a=1.0
        )
        rep = detect_pinching(sys_, 0.0, horizon=20, grid_size=64)
        assert rep.zero_steps == list(range(21))


class TestMapSequence:
    def test_sequence_follows_base_orbit(self):
        sys_ = make_noinvattr(8)
        seq = sys_.map_sequence(0.0)
        assert seq.declared_beta == 1.0
        # every map on the forward orbit of the collision point is the strong one
        for n in range(1, 6):
            assert seq.map_at(n)(1.0) == 1.0
