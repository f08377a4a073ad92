#include "lyrica/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lyrica/errors.hpp"
#include "lyrica/parallel.hpp"
#include "lyrica/rng.hpp"

namespace lyrica {

namespace {

void check_inputs(const std::vector<FeatureVector>& features,
                  const std::vector<int>& labels, int num_classes) {
    if (features.empty()) throw EmptyTrainingSet("no training features");
    if (features.size() != labels.size())
        throw Error("feature and label counts differ");
    const Eigen::Index dim = features.front().values.size();
    for (const FeatureVector& f : features)
        if (f.values.size() != dim)
            throw DimensionMismatch("feature dimensions disagree");
    std::vector<bool> present(static_cast<std::size_t>(num_classes), false);
    for (int label : labels) {
        if (label < 0 || label >= num_classes)
            throw Error("label out of range");
        present[static_cast<std::size_t>(label)] = true;
    }
    int distinct = static_cast<int>(
        std::count(present.begin(), present.end(), true));
    if (distinct < 2)
        throw SingleClassError("training set has fewer than 2 distinct labels");
}

double objective(const Eigen::VectorXd& w, double b,
                 const std::vector<FeatureVector>& features,
                 const std::vector<double>& y, double lambda) {
    double hinge = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        const double margin = y[i] * (w.dot(features[i].values) + b);
        hinge += std::max(0.0, 1.0 - margin);
    }
    return 0.5 * lambda * w.squaredNorm() +
           hinge / static_cast<double>(features.size());
}

// Pegasos-style projected per-example subgradient descent on the binary
// problem for one class: minimize lambda/2 |w|^2 + mean hinge, step
// 1/(lambda t), iterates projected onto the |w| <= 1/sqrt(lambda) ball. The
// bias is updated by the hinge subgradient but not regularized or projected.
void train_binary(const std::vector<FeatureVector>& features,
                  const std::vector<int>& labels, int positive_class,
                  const SvmParams& params, Eigen::VectorXd& w_out,
                  double& b_out, std::vector<double>& objective_out) {
    const std::size_t n = features.size();
    const Eigen::Index dim = features.front().values.size();
    const double lambda = 1.0 / (params.c_reg * static_cast<double>(n));

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = labels[i] == positive_class ? 1.0 : -1.0;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
    double b = 0.0;
    Rng rng(derive_seed(params.seed,
                        0x53564DULL + static_cast<std::uint64_t>(positive_class)));

    objective_out.clear();
    objective_out.push_back(objective(w, b, features, y, lambda));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        shuffle(order, rng);
        for (std::size_t idx : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const FeatureVector& f = features[idx];
            const double margin = y[idx] * (w.dot(f.values) + b);
            w *= (1.0 - eta * lambda);
            if (margin < 1.0) {
                w += (eta * y[idx]) * f.values;
                b += eta * y[idx];
            }
            // Pegasos projection onto the ball of radius 1/sqrt(lambda)
            const double radius_sq = 1.0 / lambda;
            const double norm_sq = w.squaredNorm();
            if (norm_sq > radius_sq) w *= std::sqrt(radius_sq / norm_sq);
        }
        objective_out.push_back(objective(w, b, features, y, lambda));
    }
    w_out = std::move(w);
    b_out = b;
}

}  // namespace

LinearSvmModel train_svm(const std::vector<FeatureVector>& features,
                         const std::vector<int>& labels, int num_classes,
                         const SvmParams& params, int threads) {
    check_inputs(features, labels, num_classes);
    const Eigen::Index dim = features.front().values.size();

    LinearSvmModel model;
    model.params = params;
    model.weights = Eigen::MatrixXd::Zero(num_classes, dim);
    model.biases = Eigen::VectorXd::Zero(num_classes);
    model.objective_history.resize(static_cast<std::size_t>(num_classes));

    parallel_for(static_cast<std::size_t>(num_classes), threads,
                 [&](std::size_t c) {
                     Eigen::VectorXd w;
                     double bias = 0.0;
                     train_binary(features, labels, static_cast<int>(c),
                                  params, w, bias, model.objective_history[c]);
                     model.weights.row(static_cast<Eigen::Index>(c)) =
                         w.transpose();
                     model.biases[static_cast<Eigen::Index>(c)] = bias;
                 });
    return model;
}

int predict_svm(const LinearSvmModel& model, const FeatureVector& feature) {
    if (feature.values.size() != model.dimension())
        throw DimensionMismatch("feature dimension " +
                                std::to_string(feature.values.size()) +
                                " does not match model dimension " +
                                std::to_string(model.dimension()));
    const Eigen::VectorXd scores =
        model.weights * feature.values + model.biases;
    int best = 0;
    for (int c = 1; c < model.num_classes(); ++c)
        if (scores[c] > scores[best]) best = c;
    return best;
}

std::vector<int> predict_svm(const LinearSvmModel& model,
                             const std::vector<FeatureVector>& features,
                             int threads) {
    std::vector<int> out(features.size());
    parallel_for(features.size(), threads,
                 [&](std::size_t i) { out[i] = predict_svm(model, features[i]); });
    return out;
}

}  // namespace lyrica
