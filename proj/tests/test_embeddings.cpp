#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lyrica/embeddings.hpp"

#include <cmath>

#include "lyrica/errors.hpp"
#include "helpers.hpp"

using namespace lyrica;
using testutil::TempDir;
using testutil::embeddings_text;
using testutil::make_table;
using testutil::write_file;

TEST_CASE("load_embeddings parses the plain-text vectors format") {
    TempDir dir;
    write_file(dir.file("v.txt"), "2 3\nfoo 1 2 3\nbar 0.5 -1.5 2.25\n");
    const EmbeddingTable table = load_embeddings(dir.file("v.txt"), 3);
    CHECK(table.vocabulary_size() == 2);
    CHECK(table.dimension() == 3);
    auto bar = table.lookup("bar");
    REQUIRE(bar.has_value());
    CHECK((*bar)[0] == 0.5f);
    CHECK((*bar)[1] == -1.5f);
    CHECK((*bar)[2] == 2.25f);
}

TEST_CASE("load_embeddings validates header and rows") {
    TempDir dir;
    SUBCASE("dimension mismatch") {
        write_file(dir.file("v.txt"), "1 4\nfoo 1 2 3 4\n");
        CHECK_THROWS_AS(load_embeddings(dir.file("v.txt"), 3),
                        DimensionMismatch);
    }
    SUBCASE("short row names the line") {
        write_file(dir.file("v.txt"), "2 3\nfoo 1 2 3\nbar 1 2\n");
        CHECK_THROWS_WITH_AS(load_embeddings(dir.file("v.txt"), 3),
                             doctest::Contains("line 3"), FormatError);
    }
    SUBCASE("long row rejected") {
        write_file(dir.file("v.txt"), "1 3\nfoo 1 2 3 4\n");
        CHECK_THROWS_AS(load_embeddings(dir.file("v.txt"), 3), FormatError);
    }
    SUBCASE("non-numeric component") {
        write_file(dir.file("v.txt"), "1 3\nfoo 1 x 3\n");
        CHECK_THROWS_WITH_AS(load_embeddings(dir.file("v.txt"), 3),
                             doctest::Contains("line 2"), FormatError);
    }
    SUBCASE("bad header") {
        write_file(dir.file("v.txt"), "banana\nfoo 1 2 3\n");
        CHECK_THROWS_AS(load_embeddings(dir.file("v.txt"), 3), FormatError);
    }
    SUBCASE("count mismatch") {
        write_file(dir.file("v.txt"), "3 3\nfoo 1 2 3\nbar 1 2 3\n");
        CHECK_THROWS_AS(load_embeddings(dir.file("v.txt"), 3), FormatError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_embeddings("/nonexistent/vectors.txt", 3),
                        IoError);
    }
}

TEST_CASE("restricted loading keeps only requested tokens") {
    TempDir dir;
    write_file(dir.file("v.txt"), "3 2\nfoo 1 2\nbar 3 4\nbaz 5 6\n");
    std::unordered_set<std::string> wanted = {"foo", "baz"};
    const EmbeddingTable table = load_embeddings(dir.file("v.txt"), 2, &wanted);
    CHECK(table.vocabulary_size() == 2);
    CHECK(table.lookup("foo").has_value());
    CHECK_FALSE(table.lookup("bar").has_value());
    CHECK(table.lookup("baz").has_value());
}

TEST_CASE("lookup is exact-match") {
    const EmbeddingTable table =
        make_table(3, {{"casa", {1, 0, 0}}, {"céu", {0, 1, 0}}});
    CHECK(table.lookup("casa").has_value());
    CHECK_FALSE(table.lookup("Casa").has_value());
    CHECK_FALSE(table.lookup("zzz").has_value());
    CHECK(table.lookup("céu").has_value());
}

TEST_CASE("mean_pool averages per occurrence and skips unknown tokens") {
    const EmbeddingTable table =
        make_table(3, {{"a", {1, 0, 0}}, {"b", {0, 1, 0}}});

    SUBCASE("two distinct tokens") {
        const FeatureVector f = mean_pool(table, {"a", "b"});
        CHECK(f.known_count == 2);
        CHECK(f.values[0] == 0.5);
        CHECK(f.values[1] == 0.5);
        CHECK(f.values[2] == 0.0);
    }
    SUBCASE("duplicates count per occurrence") {
        const FeatureVector f = mean_pool(table, {"a", "a", "b"});
        CHECK(f.known_count == 3);
        CHECK(f.values[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
        CHECK(f.values[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }
    SUBCASE("unknown tokens are skipped") {
        const FeatureVector f = mean_pool(table, {"a", "zzz-unknown"});
        CHECK(f.known_count == 1);
        CHECK(f.values[0] == 1.0);
        CHECK(f.values[1] == 0.0);
    }
    SUBCASE("all out of vocabulary") {
        CHECK_THROWS_AS(mean_pool(table, {"x", "y"}), AllOutOfVocabulary);
        CHECK_THROWS_AS(mean_pool(table, {}), AllOutOfVocabulary);
    }
}

namespace {

// Brute-force oracle: plain sum of looked-up vectors divided by their count.
Eigen::VectorXd pool_oracle(const EmbeddingTable& table,
                            const TokenSequence& tokens, std::size_t& count) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(
        static_cast<Eigen::Index>(table.dimension()));
    count = 0;
    for (const auto& token : tokens) {
        auto row = table.lookup(token);
        if (!row) continue;
        for (std::size_t k = 0; k < row->size(); ++k)
            sum[static_cast<Eigen::Index>(k)] += (*row)[k];
        ++count;
    }
    return count ? Eigen::VectorXd(sum / static_cast<double>(count)) : sum;
}

EmbeddingTable random_table(std::size_t tokens, std::size_t dim,
                            std::uint64_t seed) {
    Rng rng(seed);
    EmbeddingTable table(dim);
    for (std::size_t t = 0; t < tokens; ++t) {
        std::vector<float> v(dim);
        for (auto& x : v) x = static_cast<float>(rng.next_double(-2.0, 2.0));
        table.add("tok" + std::to_string(t), v);
    }
    return table;
}

}  // namespace

TEST_CASE("mean_pool matches the brute-force oracle on random sequences") {
    const EmbeddingTable table = random_table(100, 8, 31);
    Rng rng(77);
    for (int iter = 0; iter < 1000; ++iter) {
        TokenSequence tokens;
        const std::size_t len = 1 + rng.next_below(1000);
        for (std::size_t k = 0; k < len; ++k) {
            if (rng.next_below(10) == 0)
                tokens.push_back("oov" + std::to_string(rng.next_below(50)));
            else
                tokens.push_back("tok" + std::to_string(rng.next_below(100)));
        }
        std::size_t expected_count = 0;
        const Eigen::VectorXd expected =
            pool_oracle(table, tokens, expected_count);
        if (expected_count == 0) {
            CHECK_THROWS_AS(mean_pool(table, tokens), AllOutOfVocabulary);
            continue;
        }
        const FeatureVector f = mean_pool(table, tokens);
        CHECK(f.known_count == expected_count);
        CHECK((f.values - expected).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("mean_pool output norm never exceeds the largest row norm") {
    const EmbeddingTable table = random_table(40, 6, 5);
    Rng rng(6);
    for (int iter = 0; iter < 200; ++iter) {
        TokenSequence tokens;
        const std::size_t len = 1 + rng.next_below(30);
        double max_norm = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
            tokens.push_back("tok" + std::to_string(rng.next_below(40)));
            auto row = table.lookup(tokens.back());
            double norm = 0.0;
            for (float v : *row) norm += static_cast<double>(v) * v;
            max_norm = std::max(max_norm, std::sqrt(norm));
        }
        const FeatureVector f = mean_pool(table, tokens);
        CHECK(f.values.norm() <= max_norm + 1e-12);
    }
}

TEST_CASE("mean_pool is permutation invariant") {
    const EmbeddingTable table = random_table(30, 5, 9);
    Rng rng(10);
    for (int iter = 0; iter < 100; ++iter) {
        TokenSequence tokens;
        const std::size_t len = 2 + rng.next_below(40);
        for (std::size_t k = 0; k < len; ++k)
            tokens.push_back("tok" + std::to_string(rng.next_below(30)));
        TokenSequence permuted = tokens;
        shuffle(permuted, rng);
        const FeatureVector a = mean_pool(table, tokens);
        const FeatureVector b = mean_pool(table, permuted);
        CHECK(a.known_count == b.known_count);
        CHECK((a.values - b.values).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("to_sequence keeps known tokens in order") {
    const EmbeddingTable table =
        make_table(3, {{"a", {1, 0, 0}}, {"b", {0, 1, 0}}});

    SUBCASE("unknown tokens vanish") {
        const SequenceMatrix seq = to_sequence(table, {"a", "zzz", "b"}, 10);
        CHECK(seq.length == 2);
        CHECK(seq.padded_length == 10);
        CHECK(seq.rows.rows() == 2);
        CHECK(seq.rows(0, 0) == 1.0);
        CHECK(seq.rows(1, 1) == 1.0);
    }
    SUBCASE("truncation keeps the head") {
        TokenSequence tokens;
        for (int k = 0; k < 9; ++k) tokens.push_back(k % 2 ? "a" : "b");
        const SequenceMatrix seq = to_sequence(table, tokens, 5);
        CHECK(seq.length == 5);
        CHECK(seq.rows.rows() == 5);
        CHECK(seq.rows(0, 1) == 1.0);  // first token was "b"
    }
    SUBCASE("short sequences record the padded length") {
        const SequenceMatrix seq = to_sequence(table, {"a"}, 4);
        CHECK(seq.length == 1);
        CHECK(seq.padded_length == 4);
    }
    SUBCASE("rows equal lookups exactly") {
        const EmbeddingTable rt = random_table(20, 4, 3);
        TokenSequence tokens;
        Rng rng(4);
        for (int k = 0; k < 12; ++k)
            tokens.push_back("tok" + std::to_string(rng.next_below(20)));
        const SequenceMatrix seq = to_sequence(rt, tokens, 100);
        REQUIRE(seq.length == tokens.size());
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            auto row = rt.lookup(tokens[i]);
            for (std::size_t k = 0; k < 4; ++k)
                CHECK(seq.rows(static_cast<Eigen::Index>(i),
                               static_cast<Eigen::Index>(k)) ==
                      static_cast<double>((*row)[k]));
        }
    }
    SUBCASE("all out of vocabulary") {
        CHECK_THROWS_AS(to_sequence(table, {"x"}, 10), AllOutOfVocabulary);
    }
    SUBCASE("max_length must be positive") {
        CHECK_THROWS_AS(to_sequence(table, {"a"}, 0), InvalidSpec);
    }
}
