#include "doctest.h"

#include <array>
#include <cmath>

#include "txaccel/accelerators.hpp"
#include "txaccel/error.hpp"
#include "txaccel/rng.hpp"

using namespace txaccel;

namespace {

Sequence geometric(double a, double b, double r, int terms = 13) {
    std::vector<int> orders;
    std::vector<double> values;
    for (int k = 0; k < terms; ++k) {
        orders.push_back(4 + 4 * k);
        values.push_back(a + b * std::pow(r, k));
    }
    return Sequence("geo", 0.5, 1.0, orders, values);
}

// The built-in accelerator, expanded by hand in long double.
double evolved_by_hand(long double sn, long double s1, long double s2) {
    const long double num = sn * s2 - sn * sn - s1 * s1;
    const long double lin = 2 * sn - 4 * s1 + s2;
    const long double ratio = sn / s1;
    return static_cast<double>(num / (lin * ratio));
}

}  // namespace

TEST_SUITE("accelerators") {

TEST_CASE("aitken examples") {
    CHECK(aitken(0.75, 0.5, 0.0) == 1.0);
    CHECK(is_undefined(aitken(3.0, 3.0, 3.0)));
    CHECK(aitken(5.0 / 6.0, 0.5, 1.0) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(aitken(0.8333333333, 0.5, 1.0) == doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("aitken guard is relative to the newest term") {
    CHECK(is_undefined(aitken(1e6, 1e6 + 1e-5, 1e6 + 2e-5 + 1e-5)));
    CHECK_FALSE(is_undefined(aitken(1.0, 0.5, 0.25)));
}

TEST_CASE("aitken is exact on geometric sequences") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const double a = rng.uniform(-5.0, 5.0);
        const double b = rng.uniform(0.1, 3.0) * (rng.chance(0.5) ? 1.0 : -1.0);
        const double r = rng.uniform(-0.9, 0.9);
        if (std::abs(r) < 0.1) continue;
        for (int k = 2; k < 8; ++k) {
            const double s2 = a + b * std::pow(r, k - 2);
            const double s1 = a + b * std::pow(r, k - 1);
            const double s0 = a + b * std::pow(r, k);
            const double got = aitken(s0, s1, s2);
            if (is_undefined(got)) continue;
            CHECK(std::abs(got - a) <= 1e-12 * std::max(1.0, std::abs(a)) * 1e3);
        }
    }
    CHECK(aitken(1.0 + 0.5 * 0.25, 1.0 + 0.5 * 0.5, 1.0 + 0.5) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("aitken is affine covariant") {
    Rng rng(12);
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        const double s0 = rng.uniform(-1.0, 1.0), s1 = rng.uniform(-1.0, 1.0), s2 = rng.uniform(-1.0, 1.0);
        const double alpha = rng.uniform(0.5, 2.0) * (rng.chance(0.5) ? 1.0 : -1.0);
        const double beta = rng.uniform(-1.0, 1.0);
        const double base = aitken(s0, s1, s2);
        const double moved = aitken(alpha * s0 + beta, alpha * s1 + beta, alpha * s2 + beta);
        if (is_undefined(base) || is_undefined(moved)) continue;
        ++checked;
        const double want = alpha * base + beta;
        CHECK(std::abs(moved - want) <= 1e-12 * std::max(1.0, std::abs(want)) * 1e2);
    }
    CHECK(checked > 900);
}

TEST_CASE("wynn examples") {
    const std::array<double, 3> t{1.0, 0.5, 5.0 / 6.0};
    CHECK(wynn_epsilon(t, 2) == doctest::Approx(0.7).epsilon(1e-12));
    const std::array<double, 3> hand{1.0, 0.5, 0.8333333333};
    CHECK(wynn_epsilon(hand, 2) == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(wynn_epsilon(t, 0) == t.back());
    const std::array<double, 3> flat{2.0, 2.0, 2.0};
    CHECK(is_undefined(wynn_epsilon(flat, 2)));
    CHECK_THROWS_AS(wynn_epsilon(t, 1), InvalidArgument);
    CHECK_THROWS_AS(wynn_epsilon(t, 4), InvalidArgument);
}

TEST_CASE("wynn column 4 is exact on a sum of two geometric components") {
    std::vector<double> s;
    for (int k = 0; k < 5; ++k) s.push_back(3.0 + std::pow(0.5, k) + 2.0 * std::pow(-0.3, k));
    CHECK(wynn_epsilon(s, 4) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("wynn column 2 equals aitken") {
    Rng rng(13);
    int compared = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::array<double, 3> t{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        const double w = wynn_epsilon(t, 2);
        const double a = aitken(t[2], t[1], t[0]);
        if (is_undefined(w) || is_undefined(a)) continue;
        ++compared;
        CHECK(std::abs(w - a) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
    CHECK(compared > 990);
}

TEST_CASE("built-in evolved formula") {
    CHECK(evolved_formula({0.75, 0.5, 0.0, 0.0}) == doctest::Approx(-0.8125 / -0.75).epsilon(1e-15));
    CHECK(evolved_formula({0.75, 0.5, 0.0, 0.0}) == doctest::Approx(1.0833333333333333).epsilon(1e-15));
    CHECK(is_undefined(evolved_formula({1.0, 0.0, 2.0, 0.0})));
    CHECK(is_undefined(evolved_formula({1.0, 1.0, 2.0, 0.0})));
    CHECK(is_undefined(evolved_formula({1e-11, 1.0, 4.0, 0.0})));
    CHECK_FALSE(is_undefined(evolved_formula({1e-9, 1.0, 4.0, 0.0})));
    Rng rng(14);
    for (int i = 0; i < 100; ++i) {
        const Window w{rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)};
        const double got = evolved_formula(w);
        if (is_undefined(got)) continue;
        const double want = evolved_by_hand(w.s_n, w.s_nm1, w.s_nm2);
        CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("accelerators never return nan or infinity as a value") {
    Rng rng(15);
    const std::vector<Accelerator> all{identity_accelerator(), aitken_accelerator(), wynn_accelerator(),
                                       evolved_accelerator()};
    for (int i = 0; i < 20000; ++i) {
        auto draw = [&] {
            if (rng.chance(0.1)) return 0.0;
            return std::pow(10.0, rng.uniform(-300.0, 300.0)) * (rng.chance(0.5) ? 1.0 : -1.0);
        };
        Window w{draw(), draw(), draw(), draw()};
        if (rng.chance(0.2)) w.s_nm1 = w.s_n;
        for (const auto& acc : all) {
            const double v = acc.transform(w);
            CHECK((std::isfinite(v) || v == kUndefined));
        }
    }
}

TEST_CASE("apply identity reproduces raw errors") {
    const Sequence s = geometric(1.0, 0.4, 0.7);
    const auto positions = default_evaluation_orders();
    const auto r = apply_accelerator(identity_accelerator(), s, positions);
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const std::size_t k = s.index_of(positions[i]);
        CHECK(r.errors[i] == relative_error(s.values()[k], s.values()[k - 1]));
        CHECK_FALSE(r.invalid[i]);
    }
    CHECK(r.method == "raw");
    CHECK(r.invalid_count() == 0);
}

TEST_CASE("apply aitken on geometric data gives zero error") {
    const Sequence s = geometric(2.0, -1.0, 0.5);
    const auto r = apply_accelerator(aitken_accelerator(), s, default_evaluation_orders());
    for (double e : r.errors) CHECK(e == 0.0);
    for (double v : r.values) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("wynn and aitken produce identical results where both are defined") {
    const Sequence s = geometric(1.5, 0.8, 0.93);
    const auto pos = default_evaluation_orders();
    const auto a = apply_accelerator(aitken_accelerator(), s, pos);
    const auto w = apply_accelerator(wynn_accelerator(), s, pos);
    CHECK(a.invalid == w.invalid);
    for (std::size_t i = 0; i < pos.size(); ++i) {
        CHECK(a.values[i] == doctest::Approx(w.values[i]).epsilon(1e-12));
        CHECK(std::abs(a.errors[i] - w.errors[i]) <= 1e-12);
    }
}

TEST_CASE("undefined values mark the position invalid") {
    const Sequence flat("flat", 0.5, 1.0, {4, 8, 12, 16, 20}, {1.0, 1.0, 1.0, 1.0, 1.0});
    const std::vector<int> pos{20};
    const auto r = apply_accelerator(aitken_accelerator(), flat, pos);
    CHECK(r.invalid[0]);
    CHECK(is_undefined(r.errors[0]));
    CHECK(r.invalid_count() == 1);
}

TEST_CASE("apply rejects positions without history") {
    const Sequence s = geometric(1.0, 1.0, 0.5);
    const std::vector<int> early{12};
    CHECK_THROWS_AS(apply_accelerator(aitken_accelerator(), s, early), OutOfRange);
    const std::vector<int> absent{10};
    CHECK_THROWS_AS(apply_accelerator(identity_accelerator(), s, absent), OutOfRange);
    const std::vector<int> ok{16};
    CHECK_NOTHROW(apply_accelerator(aitken_accelerator(), s, ok));
}

}
