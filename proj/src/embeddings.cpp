#include "lyrica/embeddings.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "lyrica/errors.hpp"

namespace lyrica {

std::optional<std::span<const float>> EmbeddingTable::lookup(
    const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return std::span<const float>(matrix_.data() + it->second * dimension_,
                                  dimension_);
}

void EmbeddingTable::add(const std::string& token,
                         std::span<const float> vector) {
    if (vector.size() != dimension_)
        throw DimensionMismatch("vector for '" + token + "' has " +
                                std::to_string(vector.size()) +
                                " components, table dimension is " +
                                std::to_string(dimension_));
    if (index_.count(token)) return;  // first occurrence wins
    index_.emplace(token, index_.size());
    matrix_.insert(matrix_.end(), vector.begin(), vector.end());
}

namespace {

// Splits on single spaces; the format promises single-space separators.
bool next_field(const std::string& line, std::size_t& pos,
                std::string_view& field) {
    if (pos >= line.size()) return false;
    std::size_t space = line.find(' ', pos);
    if (space == std::string::npos) {
        field = std::string_view(line).substr(pos);
        pos = line.size();
    } else {
        field = std::string_view(line).substr(pos, space - pos);
        pos = space + 1;
    }
    return true;
}

float parse_component(std::string_view field, std::size_t line_no) {
    float value;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw FormatError("non-numeric vector component '" +
                              std::string(field) + "'",
                          line_no);
    if (!std::isfinite(value))
        throw FormatError("non-finite vector component '" +
                              std::string(field) + "'",
                          line_no);
    return value;
}

}  // namespace

EmbeddingTable load_embeddings(
    const std::string& path, std::size_t expected_dimension,
    const std::unordered_set<std::string>* restrict_vocab) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open embeddings file '" + path + "'");

    std::string line;
    if (!std::getline(in, line))
        throw FormatError("embeddings file is empty", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::size_t declared_count = 0, declared_dim = 0;
    {
        std::size_t pos = 0;
        std::string_view a, b;
        if (!next_field(line, pos, a) || !next_field(line, pos, b) ||
            pos != line.size())
            throw FormatError("header must be '<count> <dimension>'", 1);
        auto parse_size = [&](std::string_view f, std::size_t& out) {
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), out);
            if (ec != std::errc() || ptr != f.data() + f.size())
                throw FormatError("bad header field '" + std::string(f) + "'",
                                  1);
        };
        parse_size(a, declared_count);
        parse_size(b, declared_dim);
    }
    if (declared_dim == 0) throw FormatError("header dimension is zero", 1);
    if (declared_dim != expected_dimension)
        throw DimensionMismatch("embeddings file has dimension " +
                                std::to_string(declared_dim) + ", expected " +
                                std::to_string(expected_dimension));

    EmbeddingTable table(declared_dim);
    std::vector<float> row(declared_dim);
    std::size_t line_no = 1;
    std::size_t rows_seen = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
        ++rows_seen;

        std::size_t pos = 0;
        std::string_view token;
        if (!next_field(line, pos, token) || token.empty())
            throw FormatError("missing token", line_no);
        std::string_view field;
        for (std::size_t k = 0; k < declared_dim; ++k) {
            if (!next_field(line, pos, field))
                throw FormatError("expected " + std::to_string(declared_dim) +
                                      " components, found " +
                                      std::to_string(k),
                                  line_no);
            row[k] = parse_component(field, line_no);
        }
        if (pos != line.size())
            throw FormatError("trailing data after " +
                                  std::to_string(declared_dim) + " components",
                              line_no);
        if (restrict_vocab && !restrict_vocab->count(std::string(token)))
            continue;
        table.add(std::string(token), row);
    }
    if (in.bad()) throw IoError("read error on embeddings file '" + path + "'");
    if (rows_seen != declared_count)
        throw FormatError("header declares " + std::to_string(declared_count) +
                              " vectors, file has " +
                              std::to_string(rows_seen),
                          line_no);
    return table;
}

FeatureVector mean_pool(const EmbeddingTable& table,
                        const TokenSequence& tokens) {
    FeatureVector out;
    out.values = Eigen::VectorXd::Zero(
        static_cast<Eigen::Index>(table.dimension()));
    for (const std::string& token : tokens) {
        auto row = table.lookup(token);
        if (!row) continue;
        for (std::size_t k = 0; k < table.dimension(); ++k)
            out.values[static_cast<Eigen::Index>(k)] +=
                static_cast<double>((*row)[k]);
        ++out.known_count;
    }
    if (out.known_count == 0)
        throw AllOutOfVocabulary("no token has a vector representation");
    out.values /= static_cast<double>(out.known_count);
    return out;
}

SequenceMatrix to_sequence(const EmbeddingTable& table,
                           const TokenSequence& tokens,
                           std::size_t max_length) {
    if (max_length < 1) throw InvalidSpec("max_length must be at least 1");
    std::vector<std::span<const float>> kept;
    for (const std::string& token : tokens) {
        if (kept.size() >= max_length) break;
        auto row = table.lookup(token);
        if (row) kept.push_back(*row);
    }
    if (kept.empty())
        throw AllOutOfVocabulary("no token has a vector representation");

    SequenceMatrix seq;
    seq.length = kept.size();
    seq.padded_length = max_length;
    seq.rows.resize(static_cast<Eigen::Index>(kept.size()),
                    static_cast<Eigen::Index>(table.dimension()));
    for (std::size_t i = 0; i < kept.size(); ++i)
        for (std::size_t k = 0; k < table.dimension(); ++k)
            seq.rows(static_cast<Eigen::Index>(i),
                     static_cast<Eigen::Index>(k)) =
                static_cast<double>(kept[i][k]);
    return seq;
}

}  // namespace lyrica
