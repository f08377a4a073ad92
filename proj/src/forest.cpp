#include "lyrica/forest.hpp"

#include <algorithm>
#include <cmath>

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
    if (std::count(present.begin(), present.end(), true) < 2)
        throw SingleClassError("training set has fewer than 2 distinct labels");
}

double gini(const std::vector<std::uint64_t>& histogram, std::uint64_t total) {
    double sum_sq = 0.0;
    for (std::uint64_t h : histogram) {
        const double p = static_cast<double>(h) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

class TreeBuilder {
public:
    TreeBuilder(const std::vector<FeatureVector>& features,
                const std::vector<int>& labels, int num_classes, int mtry,
                Rng rng)
        : features_(features),
          labels_(labels),
          num_classes_(num_classes),
          mtry_(mtry),
          rng_(rng),
          feature_ids_(static_cast<std::size_t>(
              features.front().values.size())) {}

    DecisionTree build(std::vector<std::size_t> rows) {
        DecisionTree tree;
        grow(tree, std::move(rows));
        return tree;
    }

    Rng& rng() { return rng_; }

private:
    struct Split {
        bool found = false;
        int feature = -1;
        double threshold = 0.0;
        double weighted_gini = 0.0;
    };

    std::vector<std::uint64_t> histogram_of(
        const std::vector<std::size_t>& rows) const {
        std::vector<std::uint64_t> hist(
            static_cast<std::size_t>(num_classes_), 0);
        for (std::size_t r : rows)
            hist[static_cast<std::size_t>(labels_[r])] += 1;
        return hist;
    }

    // Candidate features are evaluated in ascending index order and
    // thresholds in ascending value order; only strictly better splits
    // replace the incumbent, which realizes the lowest-feature-then-
    // lowest-threshold tie rule.
    Split best_split(const std::vector<std::size_t>& rows) {
        const std::size_t d = feature_ids_.size();
        const std::size_t k = std::min<std::size_t>(
            static_cast<std::size_t>(mtry_), d);
        for (std::size_t i = 0; i < d; ++i) feature_ids_[i] = i;
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + static_cast<std::size_t>(
                                    rng_.next_below(d - i));
            std::swap(feature_ids_[i], feature_ids_[j]);
        }
        std::sort(feature_ids_.begin(), feature_ids_.begin() +
                      static_cast<std::ptrdiff_t>(k));

        Split best;
        const std::size_t n = rows.size();
        std::vector<std::pair<double, int>> sorted(n);
        std::vector<std::uint64_t> left_hist(
            static_cast<std::size_t>(num_classes_));
        for (std::size_t fi = 0; fi < k; ++fi) {
            const auto feature = static_cast<Eigen::Index>(feature_ids_[fi]);
            for (std::size_t i = 0; i < n; ++i)
                sorted[i] = {features_[rows[i]].values[feature],
                             labels_[rows[i]]};
            std::sort(sorted.begin(), sorted.end());
            if (sorted.front().first == sorted.back().first) continue;

            std::fill(left_hist.begin(), left_hist.end(), 0);
            std::size_t left_n = 0;
            std::vector<std::uint64_t> right_hist = histogram_of(rows);
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const auto cls = static_cast<std::size_t>(sorted[i].second);
                left_hist[cls] += 1;
                right_hist[cls] -= 1;
                ++left_n;
                if (sorted[i].first == sorted[i + 1].first) continue;

                const double lo = sorted[i].first;
                const double hi = sorted[i + 1].first;
                double mid = lo + (hi - lo) / 2.0;
                if (!(mid < hi)) mid = lo;  // keep both children non-empty

                const std::size_t right_n = n - left_n;
                const double weighted =
                    (static_cast<double>(left_n) * gini(left_hist, left_n) +
                     static_cast<double>(right_n) *
                         gini(right_hist, right_n)) /
                    static_cast<double>(n);
                if (!best.found || weighted < best.weighted_gini) {
                    best.found = true;
                    best.feature = static_cast<int>(feature_ids_[fi]);
                    best.threshold = mid;
                    best.weighted_gini = weighted;
                }
            }
        }
        return best;
    }

    void grow(DecisionTree& tree, std::vector<std::size_t> rows) {
        struct Pending {
            std::uint32_t node;
            std::vector<std::size_t> rows;
        };
        tree.nodes.emplace_back();
        std::vector<Pending> stack;
        stack.push_back({0, std::move(rows)});

        while (!stack.empty()) {
            Pending item = std::move(stack.back());
            stack.pop_back();
            std::vector<std::uint64_t> hist = histogram_of(item.rows);
            const std::uint64_t populated = static_cast<std::uint64_t>(
                std::count_if(hist.begin(), hist.end(),
                              [](std::uint64_t h) { return h > 0; }));

            Split split;
            if (item.rows.size() >= 2 && populated > 1)
                split = best_split(item.rows);

            if (!split.found) {
                tree.nodes[item.node].is_leaf = true;
                tree.nodes[item.node].histogram = std::move(hist);
                continue;
            }

            std::vector<std::size_t> left_rows, right_rows;
            const auto feature = static_cast<Eigen::Index>(split.feature);
            for (std::size_t r : item.rows) {
                if (features_[r].values[feature] <= split.threshold)
                    left_rows.push_back(r);
                else
                    right_rows.push_back(r);
            }

            TreeNode& node = tree.nodes[item.node];
            node.is_leaf = false;
            node.feature = split.feature;
            node.threshold = split.threshold;
            node.left = static_cast<std::uint32_t>(tree.nodes.size());
            node.right = node.left + 1;
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            const std::uint32_t left = tree.nodes[item.node].left;
            const std::uint32_t right = tree.nodes[item.node].right;
            // right pushed first so the left branch builds next (depth-first,
            // left-to-right: node numbering is reproducible)
            stack.push_back({right, std::move(right_rows)});
            stack.push_back({left, std::move(left_rows)});
        }
        return;
    }

    const std::vector<FeatureVector>& features_;
    const std::vector<int>& labels_;
    int num_classes_;
    int mtry_;
    Rng rng_;
    std::vector<std::size_t> feature_ids_;
};

}  // namespace

RandomForestModel train_forest(const std::vector<FeatureVector>& features,
                               const std::vector<int>& labels, int num_classes,
                               const ForestParams& params, int threads) {
    check_inputs(features, labels, num_classes);
    if (params.trees < 1) throw InvalidSpec("tree count must be at least 1");

    const Eigen::Index dim = features.front().values.size();
    int mtry = params.features_per_split;
    if (mtry <= 0)
        mtry = std::max(1, static_cast<int>(std::floor(
                               std::sqrt(static_cast<double>(dim)))));

    RandomForestModel model;
    model.params = params;
    model.params.features_per_split = mtry;
    model.num_classes = num_classes;
    model.dimension = dim;
    model.trees.resize(static_cast<std::size_t>(params.trees));

    const std::size_t n = features.size();
    parallel_for(model.trees.size(), threads, [&](std::size_t t) {
        Rng rng(derive_seed(params.seed, t));
        std::vector<std::size_t> rows(n);
        if (params.bootstrap) {
            for (std::size_t i = 0; i < n; ++i)
                rows[i] = static_cast<std::size_t>(rng.next_below(n));
        } else {
            for (std::size_t i = 0; i < n; ++i) rows[i] = i;
        }
        TreeBuilder builder(features, labels, num_classes, mtry, rng);
        model.trees[t] = builder.build(std::move(rows));
    });
    return model;
}

namespace {

const TreeNode& route_to_leaf(const DecisionTree& tree,
                              const FeatureVector& feature) {
    const TreeNode* node = &tree.nodes[0];
    while (!node->is_leaf) {
        const auto f = static_cast<Eigen::Index>(node->feature);
        node = feature.values[f] <= node->threshold
                   ? &tree.nodes[node->left]
                   : &tree.nodes[node->right];
    }
    return *node;
}

}  // namespace

int predict_forest(const RandomForestModel& model,
                   const FeatureVector& feature) {
    if (feature.values.size() != model.dimension)
        throw DimensionMismatch("feature dimension " +
                                std::to_string(feature.values.size()) +
                                " does not match model dimension " +
                                std::to_string(model.dimension));
    std::vector<double> votes(static_cast<std::size_t>(model.num_classes),
                              0.0);
    for (const DecisionTree& tree : model.trees) {
        const TreeNode& leaf = route_to_leaf(tree, feature);
        std::uint64_t total = 0;
        for (std::uint64_t h : leaf.histogram) total += h;
        for (std::size_t c = 0; c < votes.size(); ++c)
            votes[c] += static_cast<double>(leaf.histogram[c]) /
                        static_cast<double>(total);
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < votes.size(); ++c)
        if (votes[c] > votes[best]) best = c;
    return static_cast<int>(best);
}

std::vector<int> predict_forest(const RandomForestModel& model,
                                const std::vector<FeatureVector>& features,
                                int threads) {
    std::vector<int> out(features.size());
    parallel_for(features.size(), threads, [&](std::size_t i) {
        out[i] = predict_forest(model, features[i]);
    });
    return out;
}

}  // namespace lyrica
