#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lyrica/svm.hpp"

#include "lyrica/errors.hpp"
#include "lyrica/rng.hpp"
#include "helpers.hpp"

using namespace lyrica;

namespace {

FeatureVector feat(std::initializer_list<double> values) {
    FeatureVector f;
    f.values.resize(static_cast<Eigen::Index>(values.size()));
    Eigen::Index k = 0;
    for (double v : values) f.values[k++] = v;
    f.known_count = 1;
    return f;
}

// 20-point two-class set built from a known separator w=(1,1), b=0 with
// margin >= 1 on every point.
void separable_set(std::vector<FeatureVector>& features,
                   std::vector<int>& labels) {
    Rng rng(123);
    features.clear();
    labels.clear();
    while (features.size() < 20) {
        const double x = rng.next_double(-3.0, 3.0);
        const double y = rng.next_double(-3.0, 3.0);
        const double margin = x + y;
        if (std::abs(margin) < 1.0) continue;
        features.push_back(feat({x, y}));
        labels.push_back(margin > 0 ? 1 : 0);
    }
}

double training_accuracy(const LinearSvmModel& model,
                         const std::vector<FeatureVector>& features,
                         const std::vector<int>& labels) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < features.size(); ++i)
        if (predict_svm(model, features[i]) == labels[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(features.size());
}

}  // namespace

TEST_CASE("svm separates a linearly separable toy set") {
    std::vector<FeatureVector> features;
    std::vector<int> labels;
    separable_set(features, labels);

    // brute-force oracle: confirm the construction really is separable with
    // margin 1 under w=(1,1), b=0
    for (std::size_t i = 0; i < features.size(); ++i) {
        const double score = features[i].values[0] + features[i].values[1];
        CHECK(std::abs(score) >= 1.0);
        CHECK((score > 0 ? 1 : 0) == labels[i]);
    }
    CHECK(std::count(labels.begin(), labels.end(), 0) > 0);
    CHECK(std::count(labels.begin(), labels.end(), 1) > 0);

    SvmParams params;
    params.seed = 9;
    const LinearSvmModel model = train_svm(features, labels, 2, params);
    CHECK(training_accuracy(model, features, labels) == 1.0);
}

TEST_CASE("svm rejects single-class training sets") {
    std::vector<FeatureVector> features = {feat({1, 2}), feat({3, 4})};
    std::vector<int> labels = {1, 1};
    CHECK_THROWS_AS(train_svm(features, labels, 2, SvmParams{}),
                    SingleClassError);
}

TEST_CASE("svm rejects inconsistent dimensions") {
    std::vector<FeatureVector> features = {feat({1, 2}), feat({3, 4, 5})};
    std::vector<int> labels = {0, 1};
    CHECK_THROWS_AS(train_svm(features, labels, 2, SvmParams{}),
                    DimensionMismatch);
}

TEST_CASE("zero features degenerate to the bias ordering") {
    std::vector<FeatureVector> features;
    std::vector<int> labels;
    for (int k = 0; k < 30; ++k) {
        features.push_back(feat({0, 0, 0}));
        labels.push_back(k % 3);
    }
    SvmParams params;
    params.seed = 4;
    const LinearSvmModel model = train_svm(features, labels, 3, params);

    // every prediction collapses to argmax of the biases
    int expected = 0;
    for (int c = 1; c < 3; ++c)
        if (model.biases[c] > model.biases[expected]) expected = c;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        CHECK(predict_svm(model, features[i]) == expected);
        if (expected == labels[i]) ++hits;
    }
    // accuracy equals the (maximal) class prior: 1/3 on balanced labels
    CHECK(static_cast<double>(hits) / 30.0 == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("predict_svm takes the argmax with lowest-index ties") {
    LinearSvmModel model;
    model.weights.resize(2, 2);
    model.weights << 1, 0, 0, 1;
    model.biases = Eigen::VectorXd::Zero(2);

    CHECK(predict_svm(model, feat({2, 1})) == 0);
    CHECK(predict_svm(model, feat({1, 1})) == 0);  // exact tie
    SUBCASE("zero input falls to biases") {
        model.biases << 0.1, 0.9;
        CHECK(predict_svm(model, feat({0, 0})) == 1);
    }
    SUBCASE("dimension checked") {
        CHECK_THROWS_AS(predict_svm(model, feat({1, 2, 3})),
                        DimensionMismatch);
    }
}

TEST_CASE("svm objective ends no higher than it started") {
    std::vector<FeatureVector> features;
    std::vector<int> labels;
    separable_set(features, labels);
    SvmParams params;
    params.seed = 31;
    const LinearSvmModel model = train_svm(features, labels, 2, params);
    for (const auto& history : model.objective_history) {
        REQUIRE(history.size() ==
                static_cast<std::size_t>(params.epochs) + 1);
        CHECK(history.back() <= history.front());
    }
}

TEST_CASE("svm training is deterministic and thread-count independent") {
    std::vector<FeatureVector> features;
    std::vector<int> labels;
    Rng rng(55);
    for (int k = 0; k < 60; ++k) {
        features.push_back(feat({rng.next_double(-1, 1),
                                 rng.next_double(-1, 1),
                                 rng.next_double(-1, 1)}));
        labels.push_back(static_cast<int>(rng.next_below(4)));
    }
    SvmParams params;
    params.seed = 12;
    const LinearSvmModel a = train_svm(features, labels, 4, params, 1);
    const LinearSvmModel b = train_svm(features, labels, 4, params, 1);
    const LinearSvmModel c = train_svm(features, labels, 4, params, 4);
    CHECK(a.weights == b.weights);
    CHECK(a.biases == b.biases);
    CHECK(a.weights == c.weights);
    CHECK(a.biases == c.biases);
}
