#ifndef LYRICA_FOREST_HPP
#define LYRICA_FOREST_HPP

#include <cstdint>
#include <vector>

#include "lyrica/embeddings.hpp"

namespace lyrica {

// Flat node array; children reference positions in the same array. A leaf
// keeps the class-count histogram of the training rows routed to it.
struct TreeNode {
    bool is_leaf = true;
    int feature = -1;
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::vector<std::uint64_t> histogram;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // node 0 is the root
};

struct ForestParams {
    int trees = 100;
    int features_per_split = 0;  // 0 means floor(sqrt(d))
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

struct RandomForestModel {
    std::vector<DecisionTree> trees;
    ForestParams params;
    int num_classes = 0;
    Eigen::Index dimension = 0;
};

// CART with Gini impurity, grown until pure or fewer than 2 samples. Each
// tree trains on its own bootstrap sample with a generator derived from
// (seed, tree index); trees therefore come out identical whether built
// serially or in parallel.
RandomForestModel train_forest(const std::vector<FeatureVector>& features,
                               const std::vector<int>& labels, int num_classes,
                               const ForestParams& params, int threads = 1);

// Mean of the per-tree leaf class distributions; argmax with lowest-index
// tie-break.
int predict_forest(const RandomForestModel& model,
                   const FeatureVector& feature);

std::vector<int> predict_forest(const RandomForestModel& model,
                                const std::vector<FeatureVector>& features,
                                int threads = 1);

}  // namespace lyrica

#endif
