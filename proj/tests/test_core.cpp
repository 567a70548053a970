#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "test_helpers.hpp"
#include "treise/core.hpp"
#include "treise/dataio.hpp"
#include "treise/rng.hpp"

using namespace treise;
using namespace treise::testing;

TEST_CASE("minmax_normalize rescales to [0,1] with exact endpoints") {
    auto [out, degenerate] = minmax_normalize(make_matrix({{0, 5}, {10, 5}}));
    CHECK_FALSE(degenerate);
    CHECK(out(0, 0) == 0.0);
    CHECK(out(0, 1) == 0.5);
    CHECK(out(1, 0) == 1.0);
    CHECK(out(1, 1) == 0.5);

    auto [sym, deg2] = minmax_normalize(make_matrix({{-1, 0, 1}}));
    CHECK_FALSE(deg2);
    CHECK(sym(0, 0) == 0.0);
    CHECK(sym(0, 1) == 0.5);
    CHECK(sym(0, 2) == 1.0);
}

TEST_CASE("minmax_normalize maps constant input to degenerate zeros") {
    auto [out, degenerate] = minmax_normalize(make_matrix({{3, 3}, {3, 3}}));
    CHECK(degenerate);
    for (double v : out.data()) CHECK(v == 0.0);
}

TEST_CASE("minmax_normalize rejects non-finite input") {
    Matrix m(2, 2, 1.0);
    m(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(minmax_normalize(m), InvalidInputError);
    m(0, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(minmax_normalize(m), InvalidInputError);
}

TEST_CASE("minmax_normalize is idempotent and affine invariant") {
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix m = random_matrix(3, 17, rng, 2.5);
        auto [once, d1] = minmax_normalize(m);
        REQUIRE_FALSE(d1);
        auto [twice, d2] = minmax_normalize(once);
        REQUIRE_FALSE(d2);
        CHECK(once == twice);

        const double a = 0.25 + 3.0 * rng.uniform();
        const double b = rng.gaussian();
        Matrix scaled(m.rows(), m.cols());
        for (std::size_t i = 0; i < m.size(); ++i) scaled.data()[i] = a * m.data()[i] + b;
        auto [affine, d3] = minmax_normalize(scaled);
        REQUIRE_FALSE(d3);
        for (std::size_t i = 0; i < m.size(); ++i)
            CHECK(affine.data()[i] == doctest::Approx(once.data()[i]).epsilon(1e-12));
    }
}

TEST_CASE("per_channel_means averages across samples and timesteps") {
    {
        std::vector<TimeSeriesSample> samples;
        samples.emplace_back(make_matrix({{1, 3}}), 0);
        const Dataset d(std::move(samples), 1, "one");
        CHECK(d.channel_means() == std::vector<double>{2.0});
    }
    {
        std::vector<TimeSeriesSample> samples;
        samples.emplace_back(make_matrix({{0, 0}}), 0);
        samples.emplace_back(make_matrix({{2, 2}}), 0);
        const Dataset d(std::move(samples), 1, "two");
        CHECK(d.channel_means() == std::vector<double>{1.0});
    }
}

TEST_CASE("empty dataset is rejected") {
    CHECK_THROWS_AS(Dataset({}, 2, "empty"), InvalidInputError);
}

TEST_CASE("channel means match an independent streaming oracle over the raw file") {
    AnomalyGenSpec spec;
    spec.seed = 7;
    spec.n_train = 300;
    spec.n_test = 120;
    const AnomalyData data = generate_anomaly_dataset(spec);

    const auto path = std::filesystem::temp_directory_path() / "treise_core_means.jsonl";
    write_multivariate_jsonl(path, data.train);

    // One-pass running mean straight off the file, independent of the
    // Dataset implementation.
    std::ifstream in(path);
    REQUIRE(in);
    std::vector<double> mean(3, 0.0);
    std::vector<long> count(3, 0);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto obj = nlohmann::json::parse(line);
        for (std::size_t c = 0; c < 3; ++c)
            for (const auto& v : obj.at("values").at(c)) {
                ++count[c];
                mean[c] += (v.get<double>() - mean[c]) / static_cast<double>(count[c]);
            }
    }
    CHECK(count[0] + count[1] + count[2] == 300 * 3 * 50);
    for (std::size_t c = 0; c < 3; ++c)
        CHECK(data.train.channel_means()[c] == doctest::Approx(mean[c]).epsilon(1e-10));

    std::filesystem::remove(path);
}

TEST_CASE("sample and dataset invariants") {
    CHECK_THROWS_AS(TimeSeriesSample(Matrix(0, 5)), InvalidInputError);
    Matrix bad(1, 2, 0.0);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(TimeSeriesSample(std::move(bad)), InvalidInputError);

    std::vector<TimeSeriesSample> mixed;
    mixed.emplace_back(Matrix(2, 4, 0.0), 0);
    mixed.emplace_back(Matrix(2, 5, 0.0), 0);
    CHECK_THROWS_AS(Dataset(std::move(mixed), 2, "ragged"), InvalidInputError);

    std::vector<TimeSeriesSample> high_label;
    high_label.emplace_back(Matrix(2, 4, 0.0), 3);
    CHECK_THROWS_AS(Dataset(std::move(high_label), 2, "label"), InvalidInputError);
}

TEST_CASE("attribution map invariants are enforced") {
    CHECK_THROWS_AS(AttributionMap(make_matrix({{0.0, 0.5}}), false, "m", 0),
                    InvalidInputError);  // max != 1
    CHECK_THROWS_AS(AttributionMap(make_matrix({{0.2, 1.0}}), false, "m", 0),
                    InvalidInputError);  // min != 0
    CHECK_THROWS_AS(AttributionMap(make_matrix({{0.0, 0.5}}), true, "m", 0),
                    InvalidInputError);  // degenerate but nonzero
    CHECK_NOTHROW(AttributionMap(make_matrix({{0.0, 1.0}}), false, "m", 0));
    CHECK_NOTHROW(AttributionMap(Matrix(2, 3, 0.0), true, "m", 0));
}

TEST_CASE("mask set clamps zero occurrence to the documented floor") {
    std::vector<Mask> masks;
    masks.push_back(Mask{Matrix(2, 3, 0.0), 0.5, 1});
    const MaskSet set(std::move(masks), {0.5}, {1}, 1, false, 9);
    CHECK(set.floored_occurrences() == 6);
    for (double v : set.occurrence().data()) CHECK(v == kOccurrenceFloor);
}

TEST_CASE("mask set cardinality invariant") {
    std::vector<Mask> masks;
    masks.push_back(Mask{Matrix(1, 2, 1.0), 0.5, 1});
    masks.push_back(Mask{Matrix(1, 2, 1.0), 0.9, 1});
    CHECK_THROWS_AS(MaskSet(std::move(masks), {0.5}, {1}, 1, false, 9), InvalidInputError);
}

TEST_CASE("rng streams are deterministic and order independent") {
    Rng a(12345), b(12345);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    // child derivation ignores how much the parent has already drawn
    Rng parent(77);
    const Rng child_before = parent.child(3);
    (void)parent.next_u64();
    (void)parent.uniform();
    const Rng child_after = parent.child(3);
    Rng c1 = child_before, c2 = child_after;
    for (int i = 0; i < 16; ++i) CHECK(c1.next_u64() == c2.next_u64());

    // distinct tags give distinct streams
    Rng d1 = parent.child(1), d2 = parent.child(2);
    bool any_diff = false;
    for (int i = 0; i < 8; ++i) any_diff |= d1.next_u64() != d2.next_u64();
    CHECK(any_diff);
}

TEST_CASE("rng uniform and gaussian draws are sane") {
    Rng rng(99);
    double sum = 0.0, sumsq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
        sumsq += u * u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));

    double gsum = 0.0, gsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        gsum += g;
        gsq += g * g;
    }
    CHECK(gsum / n == doctest::Approx(0.0).epsilon(1).scale(0.02));
    CHECK(gsq / n == doctest::Approx(1.0).epsilon(0.03));

    for (int i = 0; i < 1000; ++i) CHECK(rng.uniform_below(7) < 7);
}
