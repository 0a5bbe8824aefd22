#include "l2fe/pipeline.hpp"

#include "l2fe/hash.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace l2fe {

using nlohmann::json;

// --- base64 ---------------------------------------------------------------------

namespace {
constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string b64_encode(const Bytes& data) {
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= data.size()) {
        const std::uint32_t v = (static_cast<std::uint32_t>(data[i]) << 16) |
                                (static_cast<std::uint32_t>(data[i + 1]) << 8) |
                                data[i + 2];
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.push_back(kB64Alphabet[(v >> 6) & 63]);
        out.push_back(kB64Alphabet[v & 63]);
        i += 3;
    }
    const std::size_t rest = data.size() - i;
    if (rest == 1) {
        const std::uint32_t v = static_cast<std::uint32_t>(data[i]) << 16;
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out += "==";
    } else if (rest == 2) {
        const std::uint32_t v = (static_cast<std::uint32_t>(data[i]) << 16) |
                                (static_cast<std::uint32_t>(data[i + 1]) << 8);
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.push_back(kB64Alphabet[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

Bytes b64_decode(const std::string& text) {
    auto value_of = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    if (text.size() % 4 != 0) throw ParseError("b64_decode: bad length");
    Bytes out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        int vals[4];
        int pad = 0;
        for (int k = 0; k < 4; ++k) {
            const char c = text[i + k];
            if (c == '=') {
                vals[k] = 0;
                ++pad;
            } else {
                vals[k] = value_of(c);
                if (vals[k] < 0 || pad > 0)
                    throw ParseError("b64_decode: bad character");
            }
        }
        const std::uint32_t v =
            (static_cast<std::uint32_t>(vals[0]) << 18) |
            (static_cast<std::uint32_t>(vals[1]) << 12) |
            (static_cast<std::uint32_t>(vals[2]) << 6) |
            static_cast<std::uint32_t>(vals[3]);
        out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
        if (pad < 2) out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
        if (pad < 1) out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    }
    return out;
}

// --- JSON helpers ----------------------------------------------------------------

namespace {

json bitstring_to_json(const Bitstring& b) {
    return json{{"bits", b.bits}, {"data", b64_encode(b.bytes)}};
}

Bitstring bitstring_from_json(const json& j) {
    Bitstring b;
    b.bits = j.at("bits").get<std::size_t>();
    b.bytes = b64_decode(j.at("data").get<std::string>());
    if (b.bytes.size() != (b.bits + 7) / 8)
        throw ParseError("bitstring: byte/bit length mismatch");
    return b;
}

json zq_to_json(const std::int64_t* data, Eigen::Index rows, Eigen::Index cols) {
    Bytes raw;
    raw.reserve(static_cast<std::size_t>(rows * cols) * 4);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            const std::int64_t v = data[r + c * rows]; // column-major storage
            if (v < 0 || v > 0xFFFFFFFFll)
                throw OutOfRange("store: Z_q entry outside u32");
            append_le32(raw, static_cast<std::uint32_t>(v));
        }
    return json{{"rows", rows}, {"cols", cols}, {"data", b64_encode(raw)}};
}

IntMatrix zq_matrix_from_json(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const Bytes raw = b64_decode(j.at("data").get<std::string>());
    if (raw.size() != static_cast<std::size_t>(rows * cols) * 4)
        throw ParseError("store: Z_q blob size mismatch");
    IntMatrix m(rows, cols);
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            std::uint32_t v = 0;
            for (int k = 0; k < 4; ++k)
                v |= static_cast<std::uint32_t>(raw[i++]) << (8 * k);
            m(r, c) = v;
        }
    return m;
}

json real_vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Vector real_vector_from_json(const json& arr) {
    Vector v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    return v;
}

json scheme_params_to_json(const SchemeConfig& cfg) {
    switch (cfg.kind) {
        case SchemeKind::Mrp:
            return json{{"input_dim", cfg.mrp.input_dim},
                        {"output_dim", cfg.mrp.output_dim},
                        {"threshold", cfg.mrp.threshold}};
        case SchemeKind::FacialFe:
            return json{{"lambda_bits", cfg.facialfe.lambda_bits},
                        {"out_bits", cfg.facialfe.out_bits},
                        {"scale", cfg.facialfe.scale}};
        case SchemeKind::L2fe:
            return json{{"dim", cfg.l2fe.dim},
                        {"secret_dim", cfg.l2fe.secret_dim},
                        {"modulus", cfg.l2fe.modulus},
                        {"lambda_bits", cfg.l2fe.lambda_bits},
                        {"out_bits", cfg.l2fe.out_bits},
                        {"size_reduce", cfg.l2fe.size_reduce_basis},
                        {"quantizer",
                         json{{"min", cfg.l2fe.quantizer.min},
                              {"max", cfg.l2fe.quantizer.max},
                              {"scale", cfg.l2fe.quantizer.scale}}}};
    }
    throw UnsupportedScheme("scheme_params_to_json: bad tag");
}

void scheme_params_from_json(const json& params, SchemeConfig& cfg) {
    switch (cfg.kind) {
        case SchemeKind::Mrp:
            cfg.mrp.input_dim = params.at("input_dim").get<Eigen::Index>();
            cfg.mrp.output_dim = params.at("output_dim").get<Eigen::Index>();
            cfg.mrp.threshold = params.at("threshold").get<double>();
            return;
        case SchemeKind::FacialFe:
            cfg.facialfe.lambda_bits = params.at("lambda_bits").get<std::size_t>();
            cfg.facialfe.out_bits = params.at("out_bits").get<std::size_t>();
            cfg.facialfe.scale = params.at("scale").get<double>();
            return;
        case SchemeKind::L2fe:
            cfg.l2fe.dim = params.at("dim").get<Eigen::Index>();
            cfg.l2fe.secret_dim = params.at("secret_dim").get<Eigen::Index>();
            cfg.l2fe.modulus = params.at("modulus").get<std::int64_t>();
            cfg.l2fe.lambda_bits = params.at("lambda_bits").get<std::size_t>();
            cfg.l2fe.out_bits = params.at("out_bits").get<std::size_t>();
            cfg.l2fe.size_reduce_basis = params.at("size_reduce").get<bool>();
            cfg.l2fe.quantizer.min = params.at("quantizer").at("min").get<double>();
            cfg.l2fe.quantizer.max = params.at("quantizer").at("max").get<double>();
            cfg.l2fe.quantizer.scale =
                params.at("quantizer").at("scale").get<double>();
            cfg.l2fe.quantizer.modulus = cfg.l2fe.modulus;
            return;
    }
    throw UnsupportedScheme("scheme_params_from_json: bad tag");
}

} // namespace

std::string header_to_json_line(const StoreHeader& header) {
    json j{{"version", header.version},
           {"scheme", scheme_name(header.scheme.kind)},
           {"params", scheme_params_to_json(header.scheme)},
           {"seed_policy", header.seed_policy}};
    return j.dump();
}

StoreHeader header_from_json_line(const std::string& line) {
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError("store header: invalid JSON");
    StoreHeader header;
    header.version = j.at("version").get<int>();
    if (header.version != 1)
        throw ParseError("store header: unsupported version");
    header.scheme.kind = scheme_from_name(j.at("scheme").get<std::string>());
    scheme_params_from_json(j.at("params"), header.scheme);
    header.seed_policy = j.at("seed_policy").get<std::string>();
    return header;
}

std::string record_to_json_line(const ProtectedRecord& record) {
    json j{{"user", record.user_id}};
    switch (record.kind) {
        case SchemeKind::Mrp: {
            const auto& rec = std::get<MrpRecord>(record.payload);
            json flat = json::array();
            for (Eigen::Index r = 0; r < rec.projection.rows(); ++r)
                for (Eigen::Index c = 0; c < rec.projection.cols(); ++c)
                    flat.push_back(rec.projection(r, c));
            j["mrp"] = json{{"y", real_vector_to_json(rec.projected)},
                            {"rows", rec.projection.rows()},
                            {"cols", rec.projection.cols()},
                            {"R", std::move(flat)}};
            break;
        }
        case SchemeKind::FacialFe: {
            const auto& rec = std::get<FacialFeRecord>(record.payload);
            j["facialfe"] = json{{"ss", real_vector_to_json(rec.sketch)},
                                 {"k", bitstring_to_json(rec.key)},
                                 {"r", bitstring_to_json(rec.extracted)}};
            break;
        }
        case SchemeKind::L2fe: {
            const auto& rec = std::get<L2feRecord>(record.payload);
            j["l2fe"] =
                json{{"A", zq_to_json(rec.matrix.data(), rec.matrix.rows(),
                                      rec.matrix.cols())},
                     {"c", zq_to_json(rec.masked.data(), rec.masked.size(), 1)},
                     {"k", bitstring_to_json(rec.key)},
                     {"r", bitstring_to_json(rec.extracted)}};
            break;
        }
    }
    return j.dump();
}

ProtectedRecord record_from_json_line(const std::string& line) {
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError("store record: invalid JSON");
    ProtectedRecord record;
    record.user_id = j.at("user").get<std::string>();
    if (j.contains("mrp")) {
        record.kind = SchemeKind::Mrp;
        const json& m = j.at("mrp");
        MrpRecord rec;
        rec.projected = real_vector_from_json(m.at("y"));
        const auto rows = m.at("rows").get<Eigen::Index>();
        const auto cols = m.at("cols").get<Eigen::Index>();
        const json& flat = m.at("R");
        if (static_cast<Eigen::Index>(flat.size()) != rows * cols)
            throw ParseError("store record: projection size mismatch");
        rec.projection.resize(rows, cols);
        std::size_t i = 0;
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c)
                rec.projection(r, c) = flat[i++].get<double>();
        record.payload = std::move(rec);
    } else if (j.contains("facialfe")) {
        record.kind = SchemeKind::FacialFe;
        const json& f = j.at("facialfe");
        FacialFeRecord rec;
        rec.sketch = real_vector_from_json(f.at("ss"));
        rec.key = bitstring_from_json(f.at("k"));
        rec.extracted = bitstring_from_json(f.at("r"));
        record.payload = std::move(rec);
    } else if (j.contains("l2fe")) {
        record.kind = SchemeKind::L2fe;
        const json& f = j.at("l2fe");
        L2feRecord rec;
        rec.matrix = zq_matrix_from_json(f.at("A"));
        rec.masked = zq_matrix_from_json(f.at("c")).col(0);
        rec.key = bitstring_from_json(f.at("k"));
        rec.extracted = bitstring_from_json(f.at("r"));
        record.payload = std::move(rec);
    } else {
        throw ParseError("store record: unknown scheme payload");
    }
    return record;
}

// --- store ----------------------------------------------------------------------

const ProtectedRecord* StoreFile::find(const std::string& user_id) const {
    for (const auto& r : records)
        if (r.user_id == user_id) return &r;
    return nullptr;
}

StoreFile make_store(const SchemeConfig& cfg) {
    StoreFile store;
    store.header.scheme = cfg;
    return store;
}

StoreFile load_store(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_store: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("load_store: empty file");
    StoreFile store;
    store.header = header_from_json_line(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            store.records.push_back(record_from_json_line(line));
        } catch (const ParseError& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " +
                             e.what());
        }
        if (store.records.back().kind != store.header.scheme.kind)
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": record scheme differs from header");
    }
    return store;
}

void save_store(const std::string& path, const StoreFile& store) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_store: cannot open " + path);
    out << header_to_json_line(store.header) << "\n";
    for (const auto& r : store.records) out << record_to_json_line(r) << "\n";
    if (!out) throw IoError("save_store: write failed for " + path);
}

const ProtectedRecord& enroll(const std::string& user_id, const Vector& x,
                              StoreFile& store, std::uint64_t master_seed) {
    if (user_id.empty()) throw InvalidParameter("enroll: empty user id");
    if (store.find(user_id) != nullptr)
        throw DuplicateUser("enroll: user '" + user_id + "' already enrolled");
    const std::uint64_t seed = derive_user_seed(master_seed, user_id);
    store.records.push_back(scheme_gen(user_id, x, store.header.scheme, seed));
    return store.records.back();
}

bool authenticate(const std::string& user_id, const Vector& probe,
                  const StoreFile& store) {
    const ProtectedRecord* record = store.find(user_id);
    if (record == nullptr)
        throw UnknownUser("authenticate: unknown user '" + user_id + "'");
    return scheme_verify(*record, probe, store.header.scheme);
}

void breach_dump(const std::string& store_path, const std::string& out_path) {
    std::ifstream in(store_path, std::ios::binary);
    if (!in) throw IoError("breach_dump: cannot open " + store_path);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("breach_dump: cannot open " + out_path);
    out << in.rdbuf();
    if (!out) throw IoError("breach_dump: write failed for " + out_path);
}

// --- accuracy ---------------------------------------------------------------------

ConfusionCounts eval_accuracy(const std::vector<EvalPair>& pairs,
                              const StoreFile& store) {
    ConfusionCounts counts;
    for (const auto& pair : pairs) {
        const bool accepted = authenticate(pair.user_id, pair.probe, store);
        if (pair.same_user)
            accepted ? ++counts.tp : ++counts.fn;
        else
            accepted ? ++counts.fp : ++counts.tn;
    }
    return counts;
}

std::vector<EvalPair> build_eval_pairs(
    const std::vector<LabeledEmbedding>& dataset, const StoreFile& store,
    std::uint64_t seed, Eigen::Index max_per_class) {
    std::map<std::string, std::vector<const LabeledEmbedding*>> by_user;
    for (const auto& row : dataset) by_user[row.user_id].push_back(&row);

    std::vector<EvalPair> pairs;
    SeededRng rng(mix_seed(seed, 0xE7A1));
    Eigen::Index positives = 0;
    for (const auto& [user, rows] : by_user) {
        if (store.find(user) == nullptr) continue;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (max_per_class >= 0 && positives >= max_per_class) break;
            pairs.push_back({user, rows[i]->values, true});
            ++positives;
        }
    }
    // One negative per positive: a row of some other user claims this one.
    Eigen::Index negatives = 0;
    const auto take = static_cast<std::size_t>(positives);
    for (std::size_t i = 0; i < take; ++i) {
        const std::string& claim = pairs[i].user_id;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            const auto idx =
                static_cast<std::size_t>(rng.uniform_int(dataset.size()));
            if (dataset[idx].user_id == claim) continue;
            pairs.push_back({claim, dataset[idx].values, false});
            ++negatives;
            break;
        }
    }
    if (negatives != positives)
        throw InsufficientData("build_eval_pairs: could not draw negatives");
    return pairs;
}

// --- config ---------------------------------------------------------------------

ToolkitConfig default_config() {
    ToolkitConfig cfg;
    cfg.scheme.kind = SchemeKind::L2fe;
    cfg.scheme.mrp = MrpParams{512, 128, 1.103 * std::sqrt(1.5)};
    cfg.scheme.facialfe = FacialFeParams{768, 256, 5.7};
    cfg.scheme.l2fe.dim = 180;
    cfg.scheme.l2fe.secret_dim = 60;
    cfg.scheme.l2fe.modulus = 130003;
    cfg.scheme.l2fe.lambda_bits = 256;
    cfg.scheme.l2fe.out_bits = 256;
    cfg.scheme.l2fe.quantizer = QuantizerConfig{-8.0, 8.0, 130003, 0.0014};
    cfg.analysis = SecurityParams{};
    return cfg;
}

ToolkitConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("load_config: " + std::string(e.what()));
    }
    ToolkitConfig cfg = default_config();

    if (j.contains("scheme"))
        cfg.scheme.kind = scheme_from_name(j.at("scheme").get<std::string>());
    if (j.contains("mrp")) {
        const json& m = j.at("mrp");
        cfg.scheme.mrp.input_dim =
            m.value("input_dim", cfg.scheme.mrp.input_dim);
        cfg.scheme.mrp.output_dim =
            m.value("output_dim", cfg.scheme.mrp.output_dim);
        if (m.contains("threshold")) {
            cfg.scheme.mrp.threshold = m.at("threshold").get<double>();
        } else {
            // T = t * sqrt(1 + eps), the distance-distortion headroom.
            const double t = m.value("t", 1.103);
            const double eps = m.value("eps", 0.5);
            cfg.scheme.mrp.threshold = t * std::sqrt(1.0 + eps);
        }
    }
    if (j.contains("facialfe")) {
        const json& f = j.at("facialfe");
        cfg.scheme.facialfe.lambda_bits =
            f.value("lambda_bits", cfg.scheme.facialfe.lambda_bits);
        cfg.scheme.facialfe.out_bits =
            f.value("out_bits", cfg.scheme.facialfe.out_bits);
        cfg.scheme.facialfe.scale = f.value("scale", cfg.scheme.facialfe.scale);
    }
    if (j.contains("l2fe")) {
        const json& f = j.at("l2fe");
        cfg.scheme.l2fe.dim = f.value("dim", cfg.scheme.l2fe.dim);
        cfg.scheme.l2fe.secret_dim =
            f.value("secret_dim", cfg.scheme.l2fe.secret_dim);
        cfg.scheme.l2fe.modulus = f.value("modulus", cfg.scheme.l2fe.modulus);
        cfg.scheme.l2fe.lambda_bits =
            f.value("lambda_bits", cfg.scheme.l2fe.lambda_bits);
        cfg.scheme.l2fe.out_bits = f.value("out_bits", cfg.scheme.l2fe.out_bits);
        cfg.scheme.l2fe.size_reduce_basis =
            f.value("size_reduce", cfg.scheme.l2fe.size_reduce_basis);
        if (f.contains("quantizer")) {
            const json& q = f.at("quantizer");
            cfg.scheme.l2fe.quantizer.min =
                q.value("min", cfg.scheme.l2fe.quantizer.min);
            cfg.scheme.l2fe.quantizer.max =
                q.value("max", cfg.scheme.l2fe.quantizer.max);
            cfg.scheme.l2fe.quantizer.scale =
                q.value("scale", cfg.scheme.l2fe.quantizer.scale);
        }
        cfg.scheme.l2fe.quantizer.modulus = cfg.scheme.l2fe.modulus;
    }
    if (j.contains("synth")) {
        const json& s = j.at("synth");
        cfg.synth.dim = s.value("dim", cfg.synth.dim);
        cfg.synth.bound = s.value("bound", cfg.synth.bound);
        cfg.synth.beta = s.value("beta", cfg.synth.beta);
        cfg.synth.radius = s.value("radius", cfg.synth.radius);
        cfg.synth.per_ball = s.value("per_ball", cfg.synth.per_ball);
    }
    if (j.contains("ingest")) {
        const json& s = j.at("ingest");
        cfg.ingest.project_dim = s.value("project_dim", cfg.ingest.project_dim);
        cfg.ingest.project_seed =
            s.value("project_seed", cfg.ingest.project_seed);
        cfg.ingest.normalize = s.value("normalize", cfg.ingest.normalize);
    }
    if (j.contains("attack")) {
        const json& a = j.at("attack");
        cfg.attack.ridge = a.value("ridge", cfg.attack.ridge);
        cfg.attack.threshold = a.value("threshold", cfg.attack.threshold);
        cfg.attack.baseline_trials =
            a.value("baseline_trials", cfg.attack.baseline_trials);
    }
    if (j.contains("game")) {
        const json& g = j.at("game");
        cfg.game.trials = g.value("trials", cfg.game.trials);
        cfg.game.threshold = g.value("threshold", cfg.game.threshold);
        cfg.game.dim = g.value("dim", cfg.game.dim);
        cfg.game.bound = g.value("bound", cfg.game.bound);
        cfg.game.beta = g.value("beta", cfg.game.beta);
        cfg.game.radius = g.value("radius", cfg.game.radius);
    }
    if (j.contains("analysis")) {
        const json& a = j.at("analysis");
        cfg.analysis.m = a.value("m", cfg.analysis.m);
        cfg.analysis.l = a.value("l", cfg.analysis.l);
        cfg.analysis.q = a.value("q", cfg.analysis.q);
        cfg.analysis.bound = a.value("bound", cfg.analysis.bound);
        cfg.analysis.alpha = a.value("alpha", cfg.analysis.alpha);
        if (a.contains("eps_fe_log2"))
            cfg.analysis.eps_fe =
                std::exp2(a.at("eps_fe_log2").get<double>());
        else
            cfg.analysis.eps_fe = a.value("eps_fe", cfg.analysis.eps_fe);
        cfg.analysis.beta = a.value("beta", cfg.analysis.beta);
        cfg.analysis.epsilon = a.value("epsilon", cfg.analysis.epsilon);
    }
    return cfg;
}

} // namespace l2fe
