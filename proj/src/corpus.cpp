#include "lyrica/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "lyrica/errors.hpp"
#include "lyrica/rng.hpp"

namespace lyrica {

Corpus::Corpus(std::vector<SongRecord> records) : records_(std::move(records)) {
    std::set<std::string> distinct;
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const SongRecord& r = records_[i];
        if (r.genre.empty())
            throw FormatError("record '" + r.id + "' has empty genre");
        if (r.lyrics.empty())
            throw FormatError("record '" + r.id + "' has empty lyrics");
        if (!id_index_.emplace(r.id, i).second)
            throw FormatError("duplicate record id '" + r.id + "'");
        distinct.insert(r.genre);
    }
    labels_.assign(distinct.begin(), distinct.end());
    for (std::size_t c = 0; c < labels_.size(); ++c)
        label_index_[labels_[c]] = static_cast<int>(c);
}

int Corpus::label_index(const std::string& label) const {
    auto it = label_index_.find(label);
    if (it == label_index_.end())
        throw Error("unknown label '" + label + "'");
    return it->second;
}

const SongRecord& Corpus::record_by_id(const std::string& id) const {
    auto it = id_index_.find(id);
    if (it == id_index_.end()) throw Error("unknown record id '" + id + "'");
    return records_[it->second];
}

bool Corpus::has_id(const std::string& id) const {
    return id_index_.count(id) != 0;
}

namespace {

std::string require_string_field(const nlohmann::json& obj, const char* key,
                                 std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw FormatError(std::string("missing field '") + key + "'", line);
    if (!it->is_string())
        throw FormatError(std::string("field '") + key + "' is not a string",
                          line);
    return it->get<std::string>();
}

}  // namespace

Corpus load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file '" + path + "'");

    std::vector<SongRecord> records;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(std::string("invalid record: ") + e.what(),
                              line_no);
        }
        if (!obj.is_object())
            throw FormatError("record is not an object", line_no);

        SongRecord rec;
        rec.id = require_string_field(obj, "id", line_no);
        rec.title = require_string_field(obj, "title", line_no);
        rec.artist = require_string_field(obj, "artist", line_no);
        rec.genre = require_string_field(obj, "genre", line_no);
        rec.lyrics = require_string_field(obj, "lyrics", line_no);
        if (rec.genre.empty()) throw FormatError("empty genre", line_no);
        if (rec.lyrics.empty()) throw FormatError("empty lyrics", line_no);
        if (!seen_ids.insert(rec.id).second)
            throw FormatError("duplicate record id '" + rec.id + "'", line_no);
        records.push_back(std::move(rec));
    }
    if (in.bad()) throw IoError("read error on corpus file '" + path + "'");
    return Corpus(std::move(records));
}

Corpus dedupe_corpus(const Corpus& corpus, std::size_t* removed) {
    std::set<std::pair<std::string, std::string>> seen;
    std::vector<SongRecord> kept;
    kept.reserve(corpus.size());
    std::size_t dropped = 0;
    for (const SongRecord& r : corpus.records()) {
        if (seen.emplace(r.artist, r.title).second)
            kept.push_back(r);
        else
            ++dropped;
    }
    if (removed) *removed = dropped;
    return Corpus(std::move(kept));
}

DataSplit stratified_split(const Corpus& corpus, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0) || !(spec.validation_fraction > 0.0) ||
        !(spec.test_fraction > 0.0))
        throw InvalidSpec("split fractions must be positive");
    const double sum =
        spec.train_fraction + spec.validation_fraction + spec.test_fraction;
    if (std::abs(sum - 1.0) > 1e-9)
        throw InvalidSpec("split fractions must sum to 1");

    // class index -> ids in corpus order
    std::vector<std::vector<std::string>> per_class(corpus.labels().size());
    for (const SongRecord& r : corpus.records())
        per_class[corpus.label_index(r.genre)].push_back(r.id);

    DataSplit split;
    for (std::size_t c = 0; c < per_class.size(); ++c) {
        std::vector<std::string>& ids = per_class[c];
        if (ids.size() < 3)
            throw DegenerateClassError("class '" + corpus.labels()[c] +
                                       "' has fewer than 3 records");
        Rng rng(derive_seed(spec.seed, c));
        shuffle(ids, rng);

        const std::size_t n = ids.size();
        const std::size_t n_train = static_cast<std::size_t>(
            std::floor(static_cast<double>(n) * spec.train_fraction));
        const std::size_t n_val = static_cast<std::size_t>(
            std::floor(static_cast<double>(n) * spec.validation_fraction));
        for (std::size_t i = 0; i < n; ++i) {
            if (i < n_train)
                split.train.push_back(ids[i]);
            else if (i < n_train + n_val)
                split.validation.push_back(ids[i]);
            else
                split.test.push_back(ids[i]);
        }
    }
    return split;
}

std::map<std::string, GenreStats> class_distribution(const Corpus& corpus) {
    std::map<std::string, GenreStats> stats;
    std::map<std::string, std::set<std::string>> artists;
    for (const SongRecord& r : corpus.records()) {
        stats[r.genre].songs += 1;
        artists[r.genre].insert(r.artist);
    }
    for (auto& [genre, s] : stats) s.artists = artists[genre].size();
    return stats;
}

void save_split(const DataSplit& split, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open split file '" + path + "' for write");
    const auto section = [&](const char* name,
                             const std::vector<std::string>& ids) {
        out << '[' << name << "]\n";
        for (const std::string& id : ids) out << id << '\n';
    };
    section("train", split.train);
    section("validation", split.validation);
    section("test", split.test);
    if (!out) throw IoError("write error on split file '" + path + "'");
}

DataSplit load_split(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open split file '" + path + "'");
    DataSplit split;
    std::vector<std::string>* current = nullptr;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line == "[train]") {
            current = &split.train;
        } else if (line == "[validation]") {
            current = &split.validation;
        } else if (line == "[test]") {
            current = &split.test;
        } else if (line.front() == '[') {
            throw FormatError("unknown section '" + line + "'", line_no);
        } else {
            if (!current)
                throw FormatError("record id before any section header",
                                  line_no);
            current->push_back(line);
        }
    }
    if (in.bad()) throw IoError("read error on split file '" + path + "'");
    return split;
}

}  // namespace lyrica
