#include "lyrica/eval.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>

#include "lyrica/errors.hpp"

namespace lyrica {

std::uint64_t ConfusionMatrix::row_sum(std::size_t gold) const {
    std::uint64_t sum = 0;
    for (std::uint64_t v : counts_[gold]) sum += v;
    return sum;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t predicted) const {
    std::uint64_t sum = 0;
    for (const auto& row : counts_) sum += row[predicted];
    return sum;
}

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t sum = 0;
    for (std::size_t g = 0; g < counts_.size(); ++g) sum += row_sum(g);
    return sum;
}

ConfusionMatrix confusion(const std::vector<int>& gold,
                          const std::vector<int>& predicted,
                          std::size_t num_classes) {
    if (gold.size() != predicted.size())
        throw Error("gold and predicted lists differ in length (" +
                    std::to_string(gold.size()) + " vs " +
                    std::to_string(predicted.size()) + ")");
    ConfusionMatrix matrix(num_classes);
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] < 0 || static_cast<std::size_t>(gold[i]) >= num_classes ||
            predicted[i] < 0 ||
            static_cast<std::size_t>(predicted[i]) >= num_classes)
            throw Error("class index out of range at position " +
                        std::to_string(i));
        matrix.add(static_cast<std::size_t>(gold[i]),
                   static_cast<std::size_t>(predicted[i]));
    }
    return matrix;
}

Eigen::MatrixXd normalize_rows(const ConfusionMatrix& matrix) {
    const auto n = static_cast<Eigen::Index>(matrix.num_classes());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index g = 0; g < n; ++g) {
        const std::uint64_t sum = matrix.row_sum(static_cast<std::size_t>(g));
        if (sum == 0) continue;
        for (Eigen::Index p = 0; p < n; ++p)
            out(g, p) = static_cast<double>(matrix.at(
                            static_cast<std::size_t>(g),
                            static_cast<std::size_t>(p))) /
                        static_cast<double>(sum);
    }
    return out;
}

ClassMetrics metrics(const ConfusionMatrix& matrix) {
    const std::size_t n = matrix.num_classes();
    ClassMetrics m;
    m.precision.resize(n);
    m.recall.resize(n);
    m.f1.resize(n);
    m.support.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        const std::uint64_t tp = matrix.at(c, c);
        const std::uint64_t col = matrix.col_sum(c);
        const std::uint64_t row = matrix.row_sum(c);
        m.support[c] = row;
        m.precision[c] = col == 0 ? 0.0
                                  : static_cast<double>(tp) /
                                        static_cast<double>(col);
        m.recall[c] = row == 0 ? 0.0
                               : static_cast<double>(tp) /
                                     static_cast<double>(row);
        const double pr = m.precision[c] + m.recall[c];
        m.f1[c] = pr > 0.0 ? 2.0 * m.precision[c] * m.recall[c] / pr : 0.0;
        m.macro_precision += m.precision[c];
        m.macro_recall += m.recall[c];
        m.macro_f1 += m.f1[c];
    }
    if (n > 0) {
        m.macro_precision /= static_cast<double>(n);
        m.macro_recall /= static_cast<double>(n);
        m.macro_f1 /= static_cast<double>(n);
    }
    return m;
}

namespace {

// Shortest representation that parses back to the same double.
std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

void report(const ClassMetrics& m, const ConfusionMatrix& matrix,
            const std::vector<std::string>& labels,
            const std::string& directory) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw IoError("cannot create report directory '" + directory +
                          "': " + ec.message());

    const std::size_t n = matrix.num_classes();
    if (labels.size() != n)
        throw Error("label list size does not match matrix size");

    {
        std::ofstream out(fs::path(directory) / "metrics.tsv",
                          std::ios::binary);
        if (!out) throw IoError("cannot write metrics.tsv");
        out << "label\tprecision\trecall\tf1\tsupport\n";
        for (std::size_t c = 0; c < n; ++c)
            out << labels[c] << '\t' << format_double(m.precision[c]) << '\t'
                << format_double(m.recall[c]) << '\t'
                << format_double(m.f1[c]) << '\t' << m.support[c] << '\n';
        out << "macro\t" << format_double(m.macro_precision) << '\t'
            << format_double(m.macro_recall) << '\t'
            << format_double(m.macro_f1) << '\t' << matrix.total() << '\n';
        if (!out) throw IoError("write error on metrics.tsv");
    }
    {
        std::ofstream out(fs::path(directory) / "confusion.tsv",
                          std::ios::binary);
        if (!out) throw IoError("cannot write confusion.tsv");
        out << "gold\\predicted";
        for (std::size_t p = 0; p < n; ++p) out << '\t' << labels[p];
        out << '\n';
        for (std::size_t g = 0; g < n; ++g) {
            out << labels[g];
            for (std::size_t p = 0; p < n; ++p) out << '\t' << matrix.at(g, p);
            out << '\n';
        }
        if (!out) throw IoError("write error on confusion.tsv");
    }
    {
        std::ofstream out(fs::path(directory) / "confusion_normalized.tsv",
                          std::ios::binary);
        if (!out) throw IoError("cannot write confusion_normalized.tsv");
        const Eigen::MatrixXd normalized = normalize_rows(matrix);
        out << "gold\\predicted";
        for (std::size_t p = 0; p < n; ++p) out << '\t' << labels[p];
        out << '\n';
        for (std::size_t g = 0; g < n; ++g) {
            out << labels[g];
            for (std::size_t p = 0; p < n; ++p)
                out << '\t'
                    << format_double(normalized(
                           static_cast<Eigen::Index>(g),
                           static_cast<Eigen::Index>(p)));
            out << '\n';
        }
        if (!out) throw IoError("write error on confusion_normalized.tsv");
    }
}

}  // namespace lyrica
