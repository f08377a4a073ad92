#include "lyrica/serialize.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "lyrica/errors.hpp"

namespace lyrica {

namespace {

constexpr char kMagic[] = "LYRICA-MODEL";
constexpr std::size_t kMagicLen = 12;
constexpr std::uint32_t kFormatVersion = 1;

class Writer {
public:
    explicit Writer(const std::string& path)
        : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot open model file '" + path + "' for write");
    }

    void bytes(const void* data, std::size_t len) {
        out_.write(static_cast<const char*>(data),
                   static_cast<std::streamsize>(len));
    }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u32(std::uint32_t v) {
        std::uint8_t b[4];
        for (int k = 0; k < 4; ++k) b[k] = static_cast<std::uint8_t>(v >> (8 * k));
        bytes(b, 4);
    }
    void u64(std::uint64_t v) {
        std::uint8_t b[8];
        for (int k = 0; k < 8; ++k) b[k] = static_cast<std::uint8_t>(v >> (8 * k));
        bytes(b, 8);
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
    void doubles(const double* data, std::size_t count) {
        u64(count);
        for (std::size_t k = 0; k < count; ++k) f64(data[k]);
    }

    void finish() {
        out_.flush();
        if (!out_) throw IoError("write error on model file '" + path_ + "'");
    }

private:
    std::string path_;
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::string& path)
        : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw IoError("cannot open model file '" + path + "'");
    }

    void bytes(void* data, std::size_t len) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(len));
        if (in_.gcount() != static_cast<std::streamsize>(len))
            throw FormatError("model file '" + path_ + "' is truncated");
    }
    std::uint8_t u8() {
        std::uint8_t v;
        bytes(&v, 1);
        return v;
    }
    std::uint32_t u32() {
        std::uint8_t b[4];
        bytes(b, 4);
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(b[k]) << (8 * k);
        return v;
    }
    std::uint64_t u64() {
        std::uint8_t b[8];
        bytes(b, 8);
        std::uint64_t v = 0;
        for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const std::uint32_t len = u32();
        std::string s(len, '\0');
        if (len > 0) bytes(s.data(), len);
        return s;
    }
    void doubles(double* data, std::size_t expected) {
        const std::uint64_t count = u64();
        if (count != expected)
            throw FormatError("model file '" + path_ +
                              "': parameter block size mismatch");
        for (std::size_t k = 0; k < expected; ++k) data[k] = f64();
    }

private:
    std::string path_;
    std::ifstream in_;
};

void write_svm(Writer& w, const LinearSvmModel& model) {
    w.u32(static_cast<std::uint32_t>(model.num_classes()));
    w.u64(static_cast<std::uint64_t>(model.dimension()));
    w.f64(model.params.c_reg);
    w.i32(model.params.epochs);
    w.u64(model.params.seed);
    w.doubles(model.weights.data(),
              static_cast<std::size_t>(model.weights.size()));
    w.doubles(model.biases.data(),
              static_cast<std::size_t>(model.biases.size()));
}

LinearSvmModel read_svm(Reader& r) {
    LinearSvmModel model;
    const std::uint32_t classes = r.u32();
    const std::uint64_t dim = r.u64();
    model.params.c_reg = r.f64();
    model.params.epochs = r.i32();
    model.params.seed = r.u64();
    model.weights.resize(classes, static_cast<Eigen::Index>(dim));
    model.biases.resize(classes);
    r.doubles(model.weights.data(),
              static_cast<std::size_t>(model.weights.size()));
    r.doubles(model.biases.data(),
              static_cast<std::size_t>(model.biases.size()));
    return model;
}

void write_forest(Writer& w, const RandomForestModel& model) {
    w.i32(model.params.trees);
    w.i32(model.params.features_per_split);
    w.u8(model.params.bootstrap ? 1 : 0);
    w.u64(model.params.seed);
    w.u32(static_cast<std::uint32_t>(model.num_classes));
    w.u64(static_cast<std::uint64_t>(model.dimension));
    w.u64(model.trees.size());
    for (const DecisionTree& tree : model.trees) {
        w.u64(tree.nodes.size());
        for (const TreeNode& node : tree.nodes) {
            w.u8(node.is_leaf ? 1 : 0);
            if (node.is_leaf) {
                for (std::uint64_t h : node.histogram) w.u64(h);
            } else {
                w.i32(node.feature);
                w.f64(node.threshold);
                w.u32(node.left);
                w.u32(node.right);
            }
        }
    }
}

RandomForestModel read_forest(Reader& r) {
    RandomForestModel model;
    model.params.trees = r.i32();
    model.params.features_per_split = r.i32();
    model.params.bootstrap = r.u8() != 0;
    model.params.seed = r.u64();
    model.num_classes = static_cast<int>(r.u32());
    model.dimension = static_cast<Eigen::Index>(r.u64());
    model.trees.resize(r.u64());
    for (DecisionTree& tree : model.trees) {
        tree.nodes.resize(r.u64());
        for (TreeNode& node : tree.nodes) {
            node.is_leaf = r.u8() != 0;
            if (node.is_leaf) {
                node.histogram.resize(
                    static_cast<std::size_t>(model.num_classes));
                for (std::uint64_t& h : node.histogram) h = r.u64();
            } else {
                node.feature = r.i32();
                node.threshold = r.f64();
                node.left = r.u32();
                node.right = r.u32();
            }
        }
    }
    return model;
}

void write_blstm(Writer& w, const BlstmModel& model) {
    w.i32(model.hidden_size);
    w.i32(model.input_dim);
    w.i32(model.num_classes);
    for (const auto& view : param_views(model.params))
        w.doubles(view.data(), static_cast<std::size_t>(view.size()));
}

BlstmModel read_blstm(Reader& r) {
    const int hidden = r.i32();
    const int input_dim = r.i32();
    const int classes = r.i32();
    BlstmModel model = init_blstm(hidden, input_dim, classes, 0);
    for (auto view : param_views(model.params))
        r.doubles(view.data(), static_cast<std::size_t>(view.size()));
    return model;
}

}  // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::svm: return "svm";
        case ModelKind::forest: return "forest";
        case ModelKind::blstm: return "blstm";
    }
    throw Error("invalid model kind");
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "svm") return ModelKind::svm;
    if (name == "forest") return ModelKind::forest;
    if (name == "blstm") return ModelKind::blstm;
    throw Error("unknown model kind '" + name + "'");
}

void save_model(const ModelBundle& bundle, const std::string& path) {
    Writer w(path);
    w.bytes(kMagic, kMagicLen);
    w.u32(kFormatVersion);
    w.str(to_string(bundle.kind));
    w.u32(static_cast<std::uint32_t>(bundle.labels.size()));
    for (const std::string& label : bundle.labels) w.str(label);
    w.u64(bundle.embedding_dim);
    w.i32(bundle.majority_class);
    w.u64(bundle.max_sequence_length);

    switch (bundle.kind) {
        case ModelKind::svm:
            if (!bundle.svm) throw Error("bundle kind svm has no svm model");
            write_svm(w, *bundle.svm);
            break;
        case ModelKind::forest:
            if (!bundle.forest)
                throw Error("bundle kind forest has no forest model");
            write_forest(w, *bundle.forest);
            break;
        case ModelKind::blstm:
            if (!bundle.blstm)
                throw Error("bundle kind blstm has no blstm model");
            write_blstm(w, *bundle.blstm);
            break;
    }
    w.finish();
}

ModelBundle load_model(const std::string& path) {
    Reader r(path);
    char magic[kMagicLen];
    r.bytes(magic, kMagicLen);
    if (std::memcmp(magic, kMagic, kMagicLen) != 0)
        throw FormatError("'" + path + "' is not a LYRICA-MODEL file");
    const std::uint32_t version = r.u32();
    if (version != kFormatVersion)
        throw FormatError("unsupported model format version " +
                          std::to_string(version));

    ModelBundle bundle;
    bundle.kind = model_kind_from_string(r.str());
    bundle.labels.resize(r.u32());
    for (std::string& label : bundle.labels) label = r.str();
    bundle.embedding_dim = r.u64();
    bundle.majority_class = r.i32();
    bundle.max_sequence_length = r.u64();

    switch (bundle.kind) {
        case ModelKind::svm: bundle.svm = read_svm(r); break;
        case ModelKind::forest: bundle.forest = read_forest(r); break;
        case ModelKind::blstm: bundle.blstm = read_blstm(r); break;
    }
    return bundle;
}

}  // namespace lyrica
