#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "ntd/errors.hpp"
#include "ntd/rng.hpp"
#include "ntd/stream.hpp"
#include "support.hpp"

using namespace ntd;

namespace {

StreamSpec small_spec() {
    StreamSpec spec;
    spec.num_classes = 6;
    spec.feature_dim = 8;
    spec.samples_per_task = 300;
    spec.num_tasks = 3;
    spec.boundary_fuzz = 0.0;
    spec.noise_rate = 0.0;
    spec.seed = 5;
    return spec;
}

std::string stream_to_text(const Stream& stream) {
    std::ostringstream out;
    export_stream(stream, out);
    return out.str();
}

}  // namespace

TEST_CASE("spec validation rejects out-of-range fields") {
    StreamSpec spec = small_spec();
    spec.boundary_fuzz = 0.5;
    CHECK_THROWS_AS(spec.validate(), ConfigError);

    spec = small_spec();
    spec.noise_rate = 1.5;
    CHECK_THROWS_AS(spec.validate(), ConfigError);

    spec = small_spec();
    spec.num_classes = 0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);

    spec = small_spec();
    spec.sigma_data = 0.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);

    spec = small_spec();
    spec.classes_per_task = {{0, 1}, {1, 2}, {3, 4}};  // class 1 twice
    CHECK_THROWS_AS(spec.validate(), ConfigError);

    spec = small_spec();
    spec.classes_per_task = {{0}, {1}, {9}};  // class 9 out of range
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("the default partition splits classes contiguously") {
    StreamSpec spec = small_spec();
    const auto partition = spec.task_partition();
    REQUIRE(partition.size() == 3);
    CHECK(partition[0] == std::vector<int>{0, 1});
    CHECK(partition[1] == std::vector<int>{2, 3});
    CHECK(partition[2] == std::vector<int>{4, 5});
}

TEST_CASE("class means respect the separation floor") {
    const StreamSpec spec = small_spec();
    const auto gens = make_class_generators(spec);
    REQUIRE(gens.means.size() == 6);
    const double min_separation = 4.0 * spec.sigma_data;
    for (std::size_t a = 0; a < gens.means.size(); ++a) {
        for (std::size_t b = a + 1; b < gens.means.size(); ++b) {
            double dist_sq = 0.0;
            for (std::size_t j = 0; j < gens.means[a].size(); ++j) {
                const double d = gens.means[a][j] - gens.means[b][j];
                dist_sq += d * d;
            }
            CHECK(std::sqrt(dist_sq) >= min_separation);
        }
    }
}

TEST_CASE("zero fuzz gives hard task boundaries") {
    StreamSpec spec = small_spec();
    const Stream stream = generate_stream(spec);
    const auto partition = spec.task_partition();
    REQUIRE(stream.samples.size() == 900);

    for (std::size_t i = 0; i < stream.samples.size(); ++i) {
        const auto& classes = partition[static_cast<std::size_t>(stream.task_index[i])];
        CHECK(std::find(classes.begin(), classes.end(), stream.samples[i].true_label) !=
              classes.end());
    }

    // Coverage: each task's span uses exactly its own class set.
    for (int t = 0; t < spec.num_tasks; ++t) {
        std::set<int> seen;
        for (std::size_t i = 0; i < stream.samples.size(); ++i) {
            if (stream.task_index[i] == t) {
                seen.insert(stream.samples[i].true_label);
            }
        }
        CHECK(seen == std::set<int>(partition[static_cast<std::size_t>(t)].begin(),
                                    partition[static_cast<std::size_t>(t)].end()));
    }
}

TEST_CASE("a single task draws its classes uniformly") {
    StreamSpec spec;
    spec.num_classes = 5;
    spec.feature_dim = 4;
    spec.samples_per_task = 10000;
    spec.num_tasks = 1;
    spec.boundary_fuzz = 0.0;
    spec.noise_rate = 0.0;
    spec.seed = 11;

    const Stream stream = generate_stream(spec);
    std::vector<std::size_t> counts(5, 0);
    for (const auto& s : stream.samples) {
        ++counts[static_cast<std::size_t>(s.true_label)];
    }
    // Empirical frequencies within 3 percentage points of uniform.
    for (auto c : counts) {
        CHECK(std::abs(static_cast<double>(c) / 10000.0 - 0.2) <= 0.03);
    }
}

TEST_CASE("boundary windows blend monotonically toward the next task") {
    StreamSpec spec;
    spec.num_classes = 4;
    spec.feature_dim = 4;
    spec.samples_per_task = 10000;
    spec.num_tasks = 2;
    spec.boundary_fuzz = 0.2;
    spec.noise_rate = 0.0;
    spec.seed = 3;

    const Stream stream = generate_stream(spec);
    const auto partition = spec.task_partition();
    const auto& next_classes = partition[1];

    // The window spans the last fuzz-fraction of task 0 and the first
    // fuzz-fraction of task 1; split it into quintiles and count
    // next-task draws in each.
    const int window = static_cast<int>(0.2 * 10000);
    const int begin = 10000 - window;
    const int total = 2 * window;
    const int quintile = total / 5;
    std::vector<double> fractions;
    for (int q = 0; q < 5; ++q) {
        int next_count = 0;
        for (int i = 0; i < quintile; ++i) {
            const auto& s = stream.samples[static_cast<std::size_t>(begin + q * quintile + i)];
            if (std::find(next_classes.begin(), next_classes.end(), s.true_label) !=
                next_classes.end()) {
                ++next_count;
            }
        }
        fractions.push_back(static_cast<double>(next_count) / quintile);
    }
    for (std::size_t q = 1; q < fractions.size(); ++q) {
        CHECK(fractions[q] > fractions[q - 1]);
    }
    CHECK(fractions.front() < 0.25);
    CHECK(fractions.back() > 0.75);
}

TEST_CASE("zero noise rate never alters a label") {
    StreamSpec spec = small_spec();
    spec.noise_rate = 0.0;
    auto eng = rng::engine(1);
    for (int c = 0; c < spec.num_classes; ++c) {
        for (int round = 0; round < 100; ++round) {
            CHECK(inject_noise(c, spec, eng) == c);
        }
    }
}

TEST_CASE("symmetric noise at rate one with two classes always flips") {
    StreamSpec spec;
    spec.num_classes = 2;
    spec.num_tasks = 1;
    spec.noise_type = NoiseType::kSymmetric;
    spec.noise_rate = 1.0;
    auto eng = rng::engine(2);
    for (int round = 0; round < 200; ++round) {
        CHECK(inject_noise(0, spec, eng) == 1);
        CHECK(inject_noise(1, spec, eng) == 0);
    }
}

TEST_CASE("symmetric noise hits its target rate") {
    StreamSpec spec;
    spec.num_classes = 10;
    spec.num_tasks = 5;
    spec.noise_type = NoiseType::kSymmetric;
    spec.noise_rate = 0.4;
    auto eng = rng::engine(7);
    int flipped = 0;
    for (int round = 0; round < 10000; ++round) {
        if (inject_noise(3, spec, eng) != 3) {
            ++flipped;
        }
    }
    CHECK(std::abs(flipped / 10000.0 - 0.4) <= 0.02);
}

TEST_CASE("flipped symmetric labels are uniform over the other classes") {
    StreamSpec spec;
    spec.num_classes = 10;
    spec.num_tasks = 5;
    spec.noise_type = NoiseType::kSymmetric;
    spec.noise_rate = 0.4;
    auto eng = rng::engine(21);

    std::vector<std::size_t> counts(10, 0);
    for (int round = 0; round < 100000; ++round) {
        const int noisy = inject_noise(4, spec, eng);
        if (noisy != 4) {
            ++counts[static_cast<std::size_t>(noisy)];
        }
    }
    CHECK(counts[4] == 0);
    counts.erase(counts.begin() + 4);
    // chi-square over the 9 other classes, df = 8; the 0.01 upper
    // quantile is 20.09.
    CHECK(testsupport::chi_square_uniform(counts) < 20.09);
}

TEST_CASE("asymmetric noise lands exactly on the cyclic successor") {
    StreamSpec spec;
    spec.num_classes = 6;
    spec.num_tasks = 3;
    spec.noise_type = NoiseType::kAsymmetric;
    spec.noise_rate = 0.7;
    auto eng = rng::engine(5);

    const auto partition = spec.task_partition();
    for (const auto& subset : partition) {
        for (std::size_t i = 0; i < subset.size(); ++i) {
            const int label = subset[i];
            const int successor = subset[(i + 1) % subset.size()];
            for (int round = 0; round < 500; ++round) {
                const int noisy = inject_noise(label, spec, eng);
                if (noisy != label) {
                    CHECK(noisy == successor);
                }
            }
        }
    }
}

TEST_CASE("generated noisy labels follow the configured rate") {
    StreamSpec spec = small_spec();
    spec.noise_type = NoiseType::kSymmetric;
    spec.noise_rate = 0.4;
    spec.samples_per_task = 4000;
    const Stream stream = generate_stream(spec);
    int flipped = 0;
    for (const auto& s : stream.samples) {
        if (s.noisy_label != s.true_label) {
            ++flipped;
        }
    }
    const double rate = static_cast<double>(flipped) / static_cast<double>(stream.samples.size());
    CHECK(std::abs(rate - 0.4) <= 0.02);
}

TEST_CASE("test sets are clean, balanced, and reproducible") {
    StreamSpec spec = small_spec();
    spec.noise_rate = 0.4;  // training noise must not leak into the test set
    const auto test_set = make_test_set(spec, 10000);
    REQUIRE(test_set.size() == 10000);

    std::vector<std::size_t> counts(6, 0);
    for (const auto& s : test_set) {
        CHECK(s.noisy_label == s.true_label);
        ++counts[static_cast<std::size_t>(s.true_label)];
    }
    // Per-class frequency within 3 percentage points of size / C.
    for (auto c : counts) {
        CHECK(std::abs(static_cast<double>(c) / 10000.0 - 1.0 / 6.0) <= 0.03);
    }

    const auto again = make_test_set(spec, 10000);
    for (std::size_t i = 0; i < test_set.size(); ++i) {
        CHECK(again[i].id == test_set[i].id);
        CHECK(again[i].true_label == test_set[i].true_label);
        CHECK(again[i].features == test_set[i].features);
    }
}

TEST_CASE("a test set smaller than the class count is rejected") {
    const StreamSpec spec = small_spec();
    CHECK_THROWS_AS(make_test_set(spec, 3), std::invalid_argument);
}

TEST_CASE("the same spec and seed reproduce the stream byte for byte") {
    StreamSpec spec = small_spec();
    spec.noise_rate = 0.3;
    spec.boundary_fuzz = 0.1;
    const std::string first = stream_to_text(generate_stream(spec));
    const std::string second = stream_to_text(generate_stream(spec));
    CHECK(first == second);
    CHECK_FALSE(first.empty());

    spec.seed = 6;
    CHECK(stream_to_text(generate_stream(spec)) != first);
}

TEST_CASE("export and import are exact inverses") {
    StreamSpec spec = small_spec();
    spec.samples_per_task = 50;
    spec.noise_rate = 0.5;
    const Stream stream = generate_stream(spec);

    std::stringstream buffer;
    export_stream(stream, buffer);
    const Stream restored = import_stream(buffer);

    REQUIRE(restored.samples.size() == stream.samples.size());
    REQUIRE(restored.task_index == stream.task_index);
    for (std::size_t i = 0; i < stream.samples.size(); ++i) {
        CHECK(restored.samples[i].id == stream.samples[i].id);
        CHECK(restored.samples[i].noisy_label == stream.samples[i].noisy_label);
        CHECK(restored.samples[i].true_label == stream.samples[i].true_label);
        CHECK(restored.samples[i].features == stream.samples[i].features);
    }
}

TEST_CASE("import rejects corrupt records") {
    std::istringstream bad_json("not json\n");
    CHECK_THROWS_AS(import_stream(bad_json), IoError);

    std::istringstream missing_field("{\"id\": 1, \"features\": [0.5]}\n");
    CHECK_THROWS_AS(import_stream(missing_field), IoError);
}

TEST_CASE("feature std matches a direct computation") {
    std::vector<Sample> samples;
    samples.push_back(testsupport::make_sample(0, 0, 0, {1.0, -2.0}));
    samples.push_back(testsupport::make_sample(1, 0, 0, {3.0, 2.0}));
    const auto std_dev = feature_std(samples);
    REQUIRE(std_dev.size() == 2);
    CHECK(std_dev[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std_dev[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(feature_std({}), std::invalid_argument);
}
