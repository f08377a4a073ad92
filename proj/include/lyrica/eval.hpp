#ifndef LYRICA_EVAL_HPP
#define LYRICA_EVAL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace lyrica {

// Rows are gold classes, columns predicted classes; label order follows the
// corpus label indexing.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t num_classes)
        : counts_(num_classes,
                  std::vector<std::uint64_t>(num_classes, 0)) {}

    std::size_t num_classes() const { return counts_.size(); }
    std::uint64_t at(std::size_t gold, std::size_t predicted) const {
        return counts_[gold][predicted];
    }
    void add(std::size_t gold, std::size_t predicted,
             std::uint64_t count = 1) {
        counts_[gold][predicted] += count;
    }

    std::uint64_t row_sum(std::size_t gold) const;
    std::uint64_t col_sum(std::size_t predicted) const;
    std::uint64_t total() const;

private:
    std::vector<std::vector<std::uint64_t>> counts_;
};

struct ClassMetrics {
    std::vector<double> precision;
    std::vector<double> recall;
    std::vector<double> f1;
    std::vector<std::uint64_t> support;  // gold row sums
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
};

ConfusionMatrix confusion(const std::vector<int>& gold,
                          const std::vector<int>& predicted,
                          std::size_t num_classes);

// Each nonzero row divided by its sum; zero rows stay zero.
Eigen::MatrixXd normalize_rows(const ConfusionMatrix& matrix);

// Per-class precision/recall/F1 with the zero-denominator-gives-zero
// convention; macro values are unweighted means over all classes.
ClassMetrics metrics(const ConfusionMatrix& matrix);

// Writes metrics.tsv, confusion.tsv and confusion_normalized.tsv under
// directory. Reals are printed with shortest round-trip precision.
void report(const ClassMetrics& m, const ConfusionMatrix& matrix,
            const std::vector<std::string>& labels,
            const std::string& directory);

}  // namespace lyrica

#endif
