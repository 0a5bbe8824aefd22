#pragma once

#include "l2fe/analysis.hpp"
#include "l2fe/attack.hpp"
#include "l2fe/core.hpp"
#include "l2fe/schemes.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace l2fe {

// --- persistent store -----------------------------------------------------------
//
// Line-delimited JSON: line 1 is the header object (format version, scheme
// tag, scheme parameters including the quantizer constants, seed policy),
// then one record object per line. Z_q matrices are base64 of row-major
// little-endian u32; real vectors are arrays of decimal floats.

struct StoreHeader {
    int version = 1;
    SchemeConfig scheme;
    std::string seed_policy = "per-user-hmac";
};

struct StoreFile {
    StoreHeader header;
    std::vector<ProtectedRecord> records;

    const ProtectedRecord* find(const std::string& user_id) const;
};

StoreFile make_store(const SchemeConfig& cfg);
StoreFile load_store(const std::string& path);
void save_store(const std::string& path, const StoreFile& store);

std::string header_to_json_line(const StoreHeader& header);
StoreHeader header_from_json_line(const std::string& line);
std::string record_to_json_line(const ProtectedRecord& record);
ProtectedRecord record_from_json_line(const std::string& line);

std::string b64_encode(const Bytes& data);
Bytes b64_decode(const std::string& text);

// Gen for the store's scheme under a per-user seed derived from the master
// seed; appends and returns the new record. Ephemeral values (the raw
// embedding, the L2FE secret b) are never written.
const ProtectedRecord& enroll(const std::string& user_id, const Vector& x,
                              StoreFile& store, std::uint64_t master_seed);

// Rep + Verify against the stored record; exact comparison for the FE
// schemes, threshold comparison for MRP. Never mutates the store.
bool authenticate(const std::string& user_id, const Vector& probe,
                  const StoreFile& store);

// Full-leakage dump: the store file copied verbatim, byte for byte.
void breach_dump(const std::string& store_path, const std::string& out_path);

// --- accuracy evaluation ----------------------------------------------------------

struct EvalPair {
    std::string user_id; // claimed identity
    Vector probe;
    bool same_user = false;
};

struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fn = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;

    double tpr() const {
        return tp + fn > 0 ? static_cast<double>(tp) /
                                 static_cast<double>(tp + fn)
                           : 0.0;
    }
    double fpr() const {
        return fp + tn > 0 ? static_cast<double>(fp) /
                                 static_cast<double>(fp + tn)
                           : 0.0;
    }
};

ConfusionCounts eval_accuracy(const std::vector<EvalPair>& pairs,
                              const StoreFile& store);

// Same/different pairs from a labeled dataset whose first row per user was
// enrolled: follow-up rows give positive probes, rows of other users give
// negatives, one negative drawn per positive.
std::vector<EvalPair> build_eval_pairs(
    const std::vector<LabeledEmbedding>& dataset, const StoreFile& store,
    std::uint64_t seed, Eigen::Index max_per_class = -1);

// --- toolkit configuration ----------------------------------------------------------

struct SynthConfig {
    Eigen::Index dim = 180;
    double bound = 8.0;
    Eigen::Index beta = 20;
    double radius = 0.25;
    Eigen::Index per_ball = 2;
};

struct IngestConfig {
    Eigen::Index project_dim = 0; // 0 = no projection
    std::uint64_t project_seed = 7;
    bool normalize = false;
};

struct AttackConfig {
    double ridge = 1e-3;
    double threshold = 1.103;
    Eigen::Index baseline_trials = 100;
};

struct GameConfig {
    Eigen::Index trials = 1000;
    double threshold = 0.5;
    Eigen::Index dim = 180;
    double bound = 8.0;
    Eigen::Index beta = 16;
    double radius = 0.25;
};

struct ToolkitConfig {
    SchemeConfig scheme;
    SynthConfig synth;
    IngestConfig ingest;
    AttackConfig attack;
    GameConfig game;
    SecurityParams analysis;
};

ToolkitConfig default_config();
ToolkitConfig load_config(const std::string& path);

} // namespace l2fe
