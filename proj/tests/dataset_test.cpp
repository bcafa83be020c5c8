#include <catch2/catch.hpp>

#include "spmld/dataset.hpp"
#include "spmld/matrix.hpp"
#include "spmld/synth.hpp"

using namespace spmld;

namespace {

MultiLabelDataset tiny_dataset(std::size_t d, std::size_t n, std::size_t l) {
    MultiLabelDataset ds;
    ds.features = Matrix(d, n);
    ds.labels = Matrix(l, n, -1.0);
    ds.mask = Matrix(l, n, 1.0);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < n; ++c)
            ds.features(r, c) = static_cast<double>(r + 1) * static_cast<double>(c + 1);
    for (std::size_t c = 0; c < n; ++c) ds.labels(c % l, c) = 1.0;
    return ds;
}

}  // namespace

TEST_CASE("dataset validation rejects bad label and mask entries", "[dataset]") {
    MultiLabelDataset ds = tiny_dataset(2, 3, 2);
    REQUIRE_NOTHROW(ds.validate());
    ds.labels(0, 0) = 0.5;
    REQUIRE_THROWS_AS(ds.validate(), InvariantError);
    ds = tiny_dataset(2, 3, 2);
    ds.mask(1, 2) = 2.0;
    REQUIRE_THROWS_AS(ds.validate(), InvariantError);
}

TEST_CASE("mask_labels keeps the exact count and is deterministic", "[dataset]") {
    MultiLabelDataset ds = tiny_dataset(3, 10, 10);

    SECTION("rho = 1 keeps everything") {
        MultiLabelDataset masked = mask_labels(ds, 1.0, 7);
        REQUIRE(masked.mask.frob2() == Approx(100.0));
    }
    SECTION("rho = 0 drops everything") {
        MultiLabelDataset masked = mask_labels(ds, 0.0, 7);
        REQUIRE(masked.mask.frob2() == 0.0);
    }
    SECTION("rho = 0.3 keeps exactly 30 cells, reproducibly") {
        MultiLabelDataset a = mask_labels(ds, 0.3, 7);
        std::size_t ones = 0;
        for (double v : a.mask.raw()) ones += v == 1.0 ? 1 : 0;
        REQUIRE(ones == 30);
        MultiLabelDataset b = mask_labels(ds, 0.3, 7);
        REQUIRE(a.mask.raw() == b.mask.raw());
        MultiLabelDataset c = mask_labels(ds, 0.3, 8);
        REQUIRE(a.mask.raw() != c.mask.raw());
        REQUIRE(a.labels.raw() == ds.labels.raw());
    }
    SECTION("a premasked dataset is rejected") {
        MultiLabelDataset masked = mask_labels(ds, 0.5, 1);
        REQUIRE_THROWS_AS(mask_labels(masked, 0.5, 1), DomainError);
    }
}

TEST_CASE("split partitions columns disjointly", "[dataset]") {
    MultiLabelDataset ds = tiny_dataset(2, 10, 3);

    auto [train, test] = split(ds, SplitSpec{0.5, 42});
    REQUIRE(train.num_instances() == 5);
    REQUIRE(test.num_instances() == 5);

    // every original column appears exactly once across the two sides
    std::vector<std::vector<double>> seen;
    auto collect = [&](const MultiLabelDataset& part) {
        for (std::size_t j = 0; j < part.num_instances(); ++j) {
            std::vector<double> col;
            for (std::size_t r = 0; r < part.dim(); ++r) col.push_back(part.features(r, j));
            seen.push_back(col);
        }
    };
    collect(train);
    collect(test);
    REQUIRE(seen.size() == 10);
    std::sort(seen.begin(), seen.end());
    REQUIRE(std::adjacent_find(seen.begin(), seen.end()) == seen.end());

    SECTION("floor rule") {
        auto [tr9, te1] = split(ds, SplitSpec{0.99, 1});
        REQUIRE(tr9.num_instances() == 9);
        REQUIRE(te1.num_instances() == 1);
    }
    SECTION("same seed gives the same partition") {
        auto [a1, a2] = split(ds, SplitSpec{0.5, 42});
        REQUIRE(a1.features.raw() == train.features.raw());
        REQUIRE(a2.features.raw() == test.features.raw());
    }
    SECTION("degenerate fractions are configuration errors") {
        MultiLabelDataset two = tiny_dataset(2, 2, 2);
        REQUIRE_THROWS_AS(split(two, SplitSpec{0.2, 1}), ConfigError);  // empty train
    }
}

TEST_CASE("normalize_features centers and scales per row", "[dataset]") {
    MultiLabelDataset ds = tiny_dataset(2, 2, 2);
    ds.features(0, 0) = 0.0;
    ds.features(0, 1) = 2.0;
    ds.features(1, 0) = 5.0;  // constant row
    ds.features(1, 1) = 5.0;

    auto [norm, stats] = normalize_features(ds);
    REQUIRE(norm.features(0, 0) == Approx(-1.0));
    REQUIRE(norm.features(0, 1) == Approx(1.0));
    REQUIRE(norm.features(1, 0) == 0.0);
    REQUIRE(norm.features(1, 1) == 0.0);

    // reapplying the stats to the same data reproduces the matrix
    MultiLabelDataset again = stats.apply(ds);
    REQUIRE(again.features.raw() == norm.features.raw());

    // held-out application only reads the stored statistics
    MultiLabelDataset other = tiny_dataset(2, 2, 2);
    other.features(0, 0) = 4.0;
    MultiLabelDataset held = stats.apply(other);
    REQUIRE(held.features(0, 0) == Approx((4.0 - stats.mean[0]) / stats.stddev[0]));
}

TEST_CASE("synthesize plants the advertised structure", "[dataset][synth]") {
    SECTION("no noise means labels equal the generating sign pattern") {
        SynthSpec spec;
        spec.d = 12;
        spec.n = 60;
        spec.l = 6;
        spec.k = 2;
        spec.g = 2;
        spec.noise_rate = 0.0;
        spec.hard_fraction = 0.5;
        spec.seed = 3;
        SynthResult out = synthesize(spec);
        Matrix clean = predict_labels(matmul(out.truth.U, out.truth.V));
        REQUIRE(out.data.labels.raw() == clean.raw());
    }
    SECTION("no hard instances means no flips at any noise rate") {
        SynthSpec spec;
        spec.noise_rate = 0.9;
        spec.hard_fraction = 0.0;
        spec.seed = 4;
        SynthResult out = synthesize(spec);
        Matrix clean = predict_labels(matmul(out.truth.U, out.truth.V));
        REQUIRE(out.data.labels.raw() == clean.raw());
        REQUIRE(out.hard_instances.empty());
    }
    SECTION("flip count concentrates around its expectation") {
        SynthSpec spec;
        spec.d = 20;
        spec.n = 200;
        spec.l = 10;
        spec.k = 3;
        spec.g = 2;
        spec.noise_rate = 0.3;
        spec.hard_fraction = 0.2;
        spec.seed = 1;
        SynthResult out = synthesize(spec);
        REQUIRE(out.hard_instances.size() == 40);

        Matrix clean = predict_labels(matmul(out.truth.U, out.truth.V));
        std::size_t flips = 0;
        for (std::size_t i = 0; i < clean.raw().size(); ++i)
            flips += clean.raw()[i] != out.data.labels.raw()[i] ? 1 : 0;
        // expectation 0.3 * 40 * 10 = 120, sd = sqrt(400*0.3*0.7) ~ 9.2
        REQUIRE(flips > 120 - 5 * 10);
        REQUIRE(flips < 120 + 5 * 10);

        // flips only on hard instances
        std::vector<bool> hard(spec.n, false);
        for (std::size_t j : out.hard_instances) hard[j] = true;
        for (std::size_t j = 0; j < spec.n; ++j) {
            if (hard[j]) continue;
            for (std::size_t i = 0; i < spec.l; ++i)
                REQUIRE(clean(i, j) == out.data.labels(i, j));
        }
    }
    SECTION("k above min(d, l) is rejected") {
        SynthSpec spec;
        spec.d = 4;
        spec.l = 3;
        spec.k = 4;
        REQUIRE_THROWS_AS(synthesize(spec), ConfigError);
    }
}
