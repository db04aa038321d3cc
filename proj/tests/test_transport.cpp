#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "txaccel/error.hpp"
#include "txaccel/rng.hpp"
#include "txaccel/transport.hpp"

using namespace txaccel;

namespace {

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "txaccel_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

DatasetConfig small_grid() {
    DatasetConfig cfg;
    cfg.c_count = 3;
    cfg.widths_mfp = {1.0, 5.0};
    cfg.n_max = 24;
    cfg.required_count.reset();
    return cfg;
}

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("pure absorber matches the per-ordinate closed form") {
    for (double width : {0.5, 2.0, 10.0}) {
        for (int n = 4; n <= 64; n += 4) {
            const SlabProblem p{1.0, 0.0, width, 1.0};
            const double got = solve_sn(p, n).center_scalar_flux;
            const double want = oracle::pure_absorber_center_flux(p, n);
            CAPTURE(width);
            CAPTURE(n);
            CHECK(std::abs(got - want) <= 1e-12 * want);
        }
    }
}

TEST_CASE("finite-difference oracle agreement on random problems") {
    Rng rng(2024);
    for (int i = 0; i < 8; ++i) {
        const double c = rng.uniform(0.0, 0.95);
        const double width = rng.uniform(0.5, 10.0);
        const int n = 4 + 4 * static_cast<int>(rng.below(4));
        const SlabProblem p{1.0, c, width, 1.0};
        const double got = solve_sn(p, n).center_scalar_flux;
        const double want = oracle::refined_finite_difference_center_flux(p, n);
        CAPTURE(c);
        CAPTURE(width);
        CAPTURE(n);
        CHECK(std::abs(got - want) <= 1e-7 * std::abs(want));
    }
}

TEST_CASE("thick slabs approach the infinite-medium flux") {
    CHECK(std::abs(solve_sn({1.0, 0.0, 200.0, 1.0}, 16).center_scalar_flux - 1.0) < 1e-10);
    CHECK(std::abs(solve_sn({1.0, 0.5, 200.0, 1.0}, 16).center_scalar_flux - 2.0) < 1e-6);
    CHECK(std::abs(solve_sn({1.0, 0.9, 200.0, 1.0}, 16).center_scalar_flux - 10.0) < 1e-6);
}

TEST_CASE("flux scales with source and cross section") {
    const double base = solve_sn({1.0, 0.7, 3.0, 1.0}, 12).center_scalar_flux;
    CHECK(solve_sn({1.0, 0.7, 3.0, 2.5}, 12).center_scalar_flux == doctest::Approx(2.5 * base).epsilon(1e-12));
    CHECK(solve_sn({4.0, 0.7, 3.0, 1.0}, 12).center_scalar_flux == doctest::Approx(base / 4.0).epsilon(1e-12));
}

TEST_CASE("balance bound and width monotonicity") {
    const std::vector<double> widths{0.25, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0};
    for (double c : {0.0, 0.1, 0.5, 0.9, 0.99, 0.999}) {
        for (int n : {4, 16, 52}) {
            double last = 0.0;
            for (double w : widths) {
                const SlabProblem p{1.0, c, w, 1.0};
                const double phi = solve_sn(p, n).center_scalar_flux;
                CAPTURE(c);
                CAPTURE(w);
                CAPTURE(n);
                CHECK(phi > 0.0);
                CHECK(phi < p.infinite_medium_flux());
                CHECK(phi >= last * (1.0 - 1e-13));
                last = phi;
            }
        }
    }
}

TEST_CASE("profile is symmetric and peaks at the center") {
    const SlabProblem p{1.0, 0.8, 4.0, 1.0};
    const auto phi = scalar_flux_profile(p, 16, {0.0, 1.0, 2.0, 3.0, 4.0});
    CHECK(phi[0] == doctest::Approx(phi[4]).epsilon(1e-10));
    CHECK(phi[1] == doctest::Approx(phi[3]).epsilon(1e-10));
    CHECK(phi[2] > phi[1]);
    CHECK(phi[1] > phi[0]);
    CHECK(phi[2] == doctest::Approx(solve_sn(p, 16).center_scalar_flux).epsilon(1e-12));
}

TEST_CASE("invalid problems") {
    CHECK_THROWS_AS(solve_sn({1.0, 1.0, 1.0, 1.0}, 4), UnsupportedProblem);
    CHECK_THROWS_AS(solve_sn({1.0, 0.5, 1.0, 1.0}, 2), InvalidArgument);
    CHECK_THROWS_AS(solve_sn({1.0, 0.5, 1.0, 1.0}, 5), InvalidArgument);
    CHECK_THROWS_AS(solve_sn({1.0, 0.5, 1.0, 1.0}, 66), InvalidArgument);
    CHECK_THROWS_AS(solve_sn({0.0, 0.5, 1.0, 1.0}, 4), InvalidArgument);
    CHECK_THROWS_AS(solve_sn({1.0, -0.1, 1.0, 1.0}, 4), InvalidArgument);
    CHECK_THROWS_AS(solve_sn({1.0, 0.5, 0.0, 1.0}, 4), InvalidArgument);
    CHECK_THROWS_AS(solve_sn({1.0, 0.5, 1.0, -1.0}, 4), InvalidArgument);
}

TEST_CASE("sequences") {
    const SlabProblem p{1.0, 0.0, 2.0, 1.0};
    std::vector<int> orders;
    for (int n = 4; n <= 52; n += 4) orders.push_back(n);
    const Sequence s = generate_sequence(p, orders, "a");
    CHECK(s.size() == 13);
    CHECK(s.c() == 0.0);
    CHECK(s.width_mfp() == 2.0);
    for (std::size_t k = 0; k < s.size(); ++k) {
        CHECK(s.values()[k] == doctest::Approx(oracle::pure_absorber_center_flux(p, orders[k])).epsilon(1e-12));
    }
    // Differences oscillate in sign; their envelope shrinks steadily.
    auto envelope = [&](std::size_t from, std::size_t to) {
        double m = 0.0;
        for (std::size_t k = from; k < to; ++k) m = std::max(m, std::abs(s.values()[k] - s.values()[k - 1]));
        return m;
    };
    CHECK(envelope(9, 13) < 0.1 * envelope(5, 9));
    CHECK(envelope(5, 9) < 0.1 * envelope(1, 5));
    CHECK(generate_sequence(p, {4}).size() == 1);
    CHECK_THROWS_AS(generate_sequence(p, {8, 4}), InvalidArgument);
}

TEST_CASE("solver errors name the failing order") {
    try {
        generate_sequence({1.0, 0.5, 1.0, 1.0}, {4, 8, 70});
        FAIL("expected an error");
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()).find("quadrature order 70") != std::string::npos);
    }
}

TEST_CASE("default dataset grid") {
    const DatasetConfig cfg;
    const auto c = cfg.c_values(1);
    REQUIRE(c.size() == 40);
    CHECK(c.front() == 0.001);
    CHECK(c.back() == 0.999);
    for (std::size_t i = 1; i < c.size(); ++i) {
        CHECK(c[i] > c[i - 1]);
        if (i + 1 < c.size()) CHECK(c[i] / c[i - 1] == doctest::Approx(c[1] / c[0]).epsilon(1e-12));
    }
    CHECK(cfg.orders().size() == 13);
    CHECK(cfg.orders().front() == 4);
    CHECK(cfg.orders().back() == 52);
}

TEST_CASE("jittered c grid depends on the seed only") {
    DatasetConfig cfg;
    cfg.jitter_c = true;
    const auto a = cfg.c_values(5);
    CHECK(a == cfg.c_values(5));
    CHECK(a != cfg.c_values(6));
    CHECK(a.front() == 0.001);
    CHECK(a.back() == 0.999);
    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] > a[i - 1]);
    DatasetConfig plain;
    CHECK(plain.c_values(5) == plain.c_values(6));
}

TEST_CASE("dataset generation") {
    DatasetConfig cfg = small_grid();
    const auto data = generate_dataset(cfg, 3);
    REQUIRE(data.size() == 6);
    CHECK(data[0].c() == 0.001);
    CHECK(data[0].width_mfp() == 1.0);
    CHECK(data[1].width_mfp() == 5.0);
    CHECK(data[5].c() == 0.999);
    for (const auto& s : data) CHECK(s.size() == 6);

    cfg.threads = 1;
    const auto serial = generate_dataset(cfg, 3);
    cfg.threads = 4;
    CHECK(generate_dataset(cfg, 3) == serial);
    CHECK(serial == data);

    cfg.required_count = 240;
    CHECK_THROWS_AS(generate_dataset(cfg, 3), InvalidConfig);
    DatasetConfig bad = small_grid();
    bad.c_min = 0.5;
    bad.c_max = 0.1;
    CHECK_THROWS_AS(generate_dataset(bad, 3), InvalidConfig);
    bad = small_grid();
    bad.widths_mfp.clear();
    CHECK_THROWS_AS(generate_dataset(bad, 3), InvalidConfig);
    bad = small_grid();
    bad.n_step = 3;
    CHECK_THROWS_AS(generate_dataset(bad, 3), InvalidConfig);
}

TEST_CASE("csv round trip") {
    const auto data = generate_dataset(small_grid(), 3);
    const auto path = scratch("roundtrip.csv");
    write_dataset_csv(path, data);
    const auto back = read_dataset_csv(path);
    CHECK(back == data);

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "sequence_id,c,width_mfp,order,center_flux");
}

TEST_CASE("malformed csv") {
    const auto path = scratch("bad.csv");
    auto write = [&](const std::string& text) {
        std::ofstream(path) << text;
    };
    write("sequence_id,c,width_mfp,order,center_flux\ns0,0.5,1,4,abc\n");
    CHECK_THROWS_AS(read_dataset_csv(path), DataError);
    write("wrong,header\n");
    CHECK_THROWS_AS(read_dataset_csv(path), DataError);
    write("sequence_id,c,width_mfp,order,center_flux\ns0,0.5,1,8,1.0\ns0,0.5,1,4,1.0\n");
    CHECK_THROWS_AS(read_dataset_csv(path), DataError);
    write("sequence_id,c,width_mfp,order,center_flux\ns0,0.5,1,4\n");
    CHECK_THROWS_AS(read_dataset_csv(path), DataError);
    CHECK_THROWS_AS(read_dataset_csv(scratch("does_not_exist.csv")), DataError);
}

TEST_CASE("metadata sidecar") {
    const auto path = scratch("meta.txt");
    write_dataset_metadata(path, DatasetConfig{}, 9, 240);
    std::ifstream in(path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("seed=9") != std::string::npos);
    CHECK(text.find("sequence_count=240") != std::string::npos);
    CHECK(text.find("sigma_t=") != std::string::npos);
    CHECK(text.find("artifact_version=") != std::string::npos);
}

}
