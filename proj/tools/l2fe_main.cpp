// Command-line front end: enroll/authenticate lifecycle over a persistent
// store, synthetic data generation, breach dumps, surrogate-recovery attacks
// and the evaluation commands. Exit codes: 0 success, 2 validation error,
// 1 I/O error.

#include "l2fe/analysis.hpp"
#include "l2fe/attack.hpp"
#include "l2fe/core.hpp"
#include "l2fe/hash.hpp"
#include "l2fe/pipeline.hpp"
#include "l2fe/schemes.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>

using namespace l2fe;
using nlohmann::json;

namespace {

struct GlobalArgs {
    std::uint64_t seed = 0;
    std::string scheme;
    std::string config_path;
    std::string store_path;
    std::string out_path;
};

ToolkitConfig resolve_config(const GlobalArgs& args) {
    ToolkitConfig cfg = args.config_path.empty() ? default_config()
                                                 : load_config(args.config_path);
    if (!args.scheme.empty()) cfg.scheme.kind = scheme_from_name(args.scheme);
    return cfg;
}

void write_report(const GlobalArgs& args, const json& report) {
    if (args.out_path.empty()) return;
    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) throw IoError("cannot open " + args.out_path);
    out << report.dump(2) << "\n";
    if (!out) throw IoError("write failed for " + args.out_path);
}

std::string require_store(const GlobalArgs& args) {
    if (args.store_path.empty())
        throw InvalidParameter("--store is required for this command");
    return args.store_path;
}

std::string require_out(const GlobalArgs& args) {
    if (args.out_path.empty())
        throw InvalidParameter("--out is required for this command");
    return args.out_path;
}

// First row per user id; follow-up rows are probe material, not enrollment.
std::vector<const LabeledEmbedding*> first_per_user(
    const std::vector<LabeledEmbedding>& rows) {
    std::vector<const LabeledEmbedding*> out;
    std::set<std::string> seen;
    for (const auto& row : rows)
        if (seen.insert(row.user_id).second) out.push_back(&row);
    return out;
}

std::map<std::string, Vector> index_by_user(
    const std::vector<LabeledEmbedding>& rows) {
    std::map<std::string, Vector> out;
    for (const auto& row : rows) out.emplace(row.user_id, row.values);
    return out;
}

int cmd_params(const GlobalArgs& args) {
    const ToolkitConfig cfg = resolve_config(args);
    const EntropyReport report = certify_params(cfg.analysis);
    std::printf("parameter certification\n");
    std::printf("  %-22s %12lld\n", "m", static_cast<long long>(cfg.analysis.m));
    std::printf("  %-22s %12lld\n", "l", static_cast<long long>(cfg.analysis.l));
    std::printf("  %-22s %12lld\n", "q", static_cast<long long>(cfg.analysis.q));
    std::printf("  %-22s %12.4f\n", "alpha", cfg.analysis.alpha);
    std::printf("  %-22s %12.4g\n", "eps_fe", cfg.analysis.eps_fe);
    std::printf("  %-22s %12lld\n", "beta",
                static_cast<long long>(cfg.analysis.beta));
    std::printf("  %-22s %12.4f\n", "epsilon", cfg.analysis.epsilon);
    std::printf("  %-22s %12.4f\n", "volume_log2", report.volume_log2);
    std::printf("  %-22s %12.4f\n", "min_entropy_bits", report.h_bits);
    std::printf("  %-22s %12.4f\n", "gamma_bits", report.gamma_bits);
    std::printf("  %-22s %12lld\n", "kappa_max",
                static_cast<long long>(report.kappa_max));
    std::printf("  %-22s %12.4f\n", "r_min", report.r_min);
    std::printf("  %-22s %12.4f\n", "bound", report.bound);
    std::printf("  %-22s %12s\n", "feasible", report.feasible ? "yes" : "no");
    write_report(args, json{{"m", cfg.analysis.m},
                            {"l", cfg.analysis.l},
                            {"q", cfg.analysis.q},
                            {"alpha", cfg.analysis.alpha},
                            {"eps_fe", cfg.analysis.eps_fe},
                            {"beta", cfg.analysis.beta},
                            {"epsilon", cfg.analysis.epsilon},
                            {"volume_log2", report.volume_log2},
                            {"min_entropy_bits", report.h_bits},
                            {"gamma_bits", report.gamma_bits},
                            {"kappa_max", report.kappa_max},
                            {"r_min", report.r_min},
                            {"bound", report.bound},
                            {"feasible", report.feasible}});
    return 0;
}

int cmd_synth(const GlobalArgs& args) {
    const ToolkitConfig cfg = resolve_config(args);
    const std::string out = require_out(args);
    const auto spec =
        make_ball_spec(cfg.synth.dim, cfg.synth.bound, cfg.synth.beta,
                       cfg.synth.radius, args.seed);
    const auto rows = sample_c_epsilon(spec, cfg.synth.per_ball);
    export_embeddings(out, rows);
    std::printf("synth: %zu rows (%lld balls x %lld samples, dim %lld) -> %s\n",
                rows.size(), static_cast<long long>(cfg.synth.beta),
                static_cast<long long>(cfg.synth.per_ball),
                static_cast<long long>(cfg.synth.dim), out.c_str());
    return 0;
}

int cmd_ingest(const GlobalArgs& args, const std::string& input) {
    const ToolkitConfig cfg = resolve_config(args);
    const std::string out = require_out(args);
    auto rows = load_embeddings(input);
    if (rows.empty()) throw InvalidParameter("ingest: empty dataset");
    if (cfg.ingest.project_dim > 0) {
        const Matrix g = gaussian_projection_matrix(
            cfg.ingest.project_dim, rows.front().values.size(),
            cfg.ingest.project_seed);
        for (auto& row : rows) row.values = g * row.values;
    }
    if (cfg.ingest.normalize)
        for (auto& row : rows) row.values = normalize(row.values);
    export_embeddings(out, rows);
    std::printf("ingest: %zu rows -> %s (dim %lld%s)\n", rows.size(),
                out.c_str(),
                static_cast<long long>(rows.front().values.size()),
                cfg.ingest.normalize ? ", normalized" : "");
    return 0;
}

int cmd_enroll(const GlobalArgs& args, const std::string& data_path) {
    const ToolkitConfig cfg = resolve_config(args);
    const std::string store_path = require_store(args);
    const auto rows = load_embeddings(data_path);
    StoreFile store = make_store(cfg.scheme);
    const auto users = first_per_user(rows);
    for (const auto* row : users)
        enroll(row->user_id, row->values, store, args.seed);
    if (cfg.scheme.kind == SchemeKind::L2fe) {
        const EntropyReport report = certify_params(cfg.analysis);
        if (static_cast<std::int64_t>(cfg.scheme.l2fe.out_bits) >
            report.kappa_max)
            std::fprintf(stderr,
                         "warning: extracted length %zu exceeds the "
                         "synthetic-model bound kappa_max=%lld\n",
                         cfg.scheme.l2fe.out_bits,
                         static_cast<long long>(report.kappa_max));
    }
    save_store(store_path, store);
    std::printf("enroll: %zu users (%s) -> %s\n", users.size(),
                scheme_name(cfg.scheme.kind).c_str(), store_path.c_str());
    return 0;
}

int cmd_auth(const GlobalArgs& args, const std::string& probes_path) {
    const StoreFile store = load_store(require_store(args));
    const auto rows = load_embeddings(probes_path);
    json results = json::array();
    Eigen::Index accepted = 0;
    for (const auto& row : rows) {
        const bool ok = authenticate(row.user_id, row.values, store);
        if (ok) ++accepted;
        results.push_back(json{{"id", row.user_id}, {"accept", ok}});
        std::printf("%-16s %s\n", row.user_id.c_str(), ok ? "accept" : "reject");
    }
    std::printf("auth: %lld/%zu accepted\n", static_cast<long long>(accepted),
                rows.size());
    write_report(args, json{{"results", results},
                            {"accepted", accepted},
                            {"total", rows.size()}});
    return 0;
}

int cmd_breach(const GlobalArgs& args) {
    const std::string store_path = require_store(args);
    const std::string out = require_out(args);
    breach_dump(store_path, out);
    std::printf("breach: %s -> %s\n", store_path.c_str(), out.c_str());
    return 0;
}

struct AttackOutcome {
    AttackReport report;
    std::vector<std::string> users;
    std::vector<Vector> reconstructed;
    double permuted_control = 0.0;
};

AttackOutcome run_attack(const ToolkitConfig& cfg, const std::string& dump_path,
                         const std::string& public_path,
                         const std::string& originals_path,
                         std::uint64_t seed) {
    const StoreFile dump = load_store(dump_path);
    if (dump.records.empty())
        throw InsufficientData("attack: breach dump has no records");
    const auto public_rows = load_embeddings(public_path);
    if (public_rows.size() < 2)
        throw InsufficientData("attack: need at least 2 public rows");
    const auto originals = load_embeddings(originals_path);
    const auto original_by_user = index_by_user(originals);

    // The attacker queries the protected pipeline on its own public data to
    // obtain training pairs (surrogate, embedding).
    std::vector<std::pair<Vector, Vector>> train;
    train.reserve(public_rows.size());
    for (std::size_t i = 0; i < public_rows.size(); ++i) {
        const std::uint64_t gen_seed =
            mix_seed(seed ^ 0xA77Cull, static_cast<std::uint64_t>(i));
        const ProtectedRecord rec = scheme_gen(
            "public" + std::to_string(i), public_rows[i].values,
            dump.header.scheme, gen_seed);
        train.emplace_back(pipe_surrogate(rec).values, public_rows[i].values);
    }
    const ReadoutModel readout = linear_readout_fit(train, cfg.attack.ridge);

    AttackOutcome outcome;
    std::vector<Vector> target_originals;
    std::vector<std::pair<Vector, Vector>> victim_pairs;
    for (const auto& record : dump.records) {
        const auto it = original_by_user.find(record.user_id);
        if (it == original_by_user.end())
            throw InvalidParameter("attack: no original embedding for user '" +
                                   record.user_id + "'");
        const Vector surrogate = pipe_surrogate(record).values;
        outcome.users.push_back(record.user_id);
        outcome.reconstructed.push_back(readout.predict(surrogate));
        target_originals.push_back(it->second);
        victim_pairs.emplace_back(surrogate, it->second);
    }

    outcome.report =
        attack_asr(outcome.reconstructed, target_originals, cfg.attack.threshold);
    // Leakage: the MRP surrogate is already an embedding-space estimate, so
    // its cosine is taken directly; the other surrogates go through the
    // fitted readout.
    auto leakage_of = [&](const std::vector<std::pair<Vector, Vector>>& pairs) {
        if (dump.header.scheme.kind == SchemeKind::Mrp) {
            double total = 0.0;
            for (const auto& [s, x] : pairs) total += cosine_similarity(s, x);
            return total / static_cast<double>(pairs.size());
        }
        return mean_readout_cosine(readout, pairs);
    };
    outcome.report.leakage_cosine_mean = leakage_of(victim_pairs);
    // Random guessing runs over distinct users only.
    std::vector<LabeledEmbedding> distinct;
    for (const auto* row : first_per_user(originals)) distinct.push_back(*row);
    const auto [base_mean, base_sd] =
        random_guess_asr(distinct, cfg.attack.threshold,
                         cfg.attack.baseline_trials, mix_seed(seed, 0xBA5E));
    outcome.report.baseline_asr_mean = base_mean;
    outcome.report.baseline_asr_sd = base_sd;

    // Permuted-label control for the leakage statistic.
    std::vector<std::pair<Vector, Vector>> shuffled = victim_pairs;
    SeededRng rng(mix_seed(seed, 0x5EAF));
    for (std::size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1].second,
                  shuffled[static_cast<std::size_t>(rng.uniform_int(i))].second);
    outcome.permuted_control = leakage_of(shuffled);
    return outcome;
}

json attack_report_json(const SchemeKind kind, const AttackOutcome& outcome) {
    json flags = json::array();
    for (const auto f : outcome.report.accepted)
        flags.push_back(static_cast<bool>(f));
    return json{{"scheme", scheme_name(kind)},
                {"asr", outcome.report.asr},
                {"accepted", flags},
                {"users", outcome.users},
                {"leakage_cosine_mean", outcome.report.leakage_cosine_mean},
                {"leakage_permuted_control", outcome.permuted_control},
                {"baseline_asr_mean", outcome.report.baseline_asr_mean},
                {"baseline_asr_sd", outcome.report.baseline_asr_sd}};
}

int cmd_attack(const GlobalArgs& args, const std::string& dump_path,
               const std::string& public_path,
               const std::string& originals_path,
               const std::string& reconstructed_path) {
    const ToolkitConfig cfg = resolve_config(args);
    const AttackOutcome outcome =
        run_attack(cfg, dump_path, public_path, originals_path, args.seed);
    const StoreFile dump = load_store(dump_path);
    std::printf("attack (%s): asr=%.4f leakage_cosine=%.4f baseline=%.4f"
                " +- %.4f over %zu users\n",
                scheme_name(dump.header.scheme.kind).c_str(),
                outcome.report.asr, outcome.report.leakage_cosine_mean,
                outcome.report.baseline_asr_mean,
                outcome.report.baseline_asr_sd, outcome.users.size());
    write_report(args, attack_report_json(dump.header.scheme.kind, outcome));
    if (!reconstructed_path.empty()) {
        std::vector<LabeledEmbedding> rows;
        for (std::size_t i = 0; i < outcome.users.size(); ++i)
            rows.push_back({outcome.users[i], outcome.reconstructed[i]});
        export_embeddings(reconstructed_path, rows);
    }
    return 0;
}

int cmd_eval_accuracy(const GlobalArgs& args, const std::string& data_path) {
    const StoreFile store = load_store(require_store(args));
    const auto rows = load_embeddings(data_path);
    const auto pairs = build_eval_pairs(rows, store, args.seed);
    const ConfusionCounts counts = eval_accuracy(pairs, store);
    std::printf("confusion (actual x predicted)\n");
    std::printf("  %-10s %10s %10s\n", "", "positive", "negative");
    std::printf("  %-10s %10lld %10lld\n", "positive",
                static_cast<long long>(counts.tp),
                static_cast<long long>(counts.fn));
    std::printf("  %-10s %10lld %10lld\n", "negative",
                static_cast<long long>(counts.fp),
                static_cast<long long>(counts.tn));
    std::printf("  tpr=%.4f fpr=%.4f\n", counts.tpr(), counts.fpr());
    write_report(args, json{{"tp", counts.tp},
                            {"fn", counts.fn},
                            {"fp", counts.fp},
                            {"tn", counts.tn},
                            {"tpr", counts.tpr()},
                            {"fpr", counts.fpr()}});
    return 0;
}

int cmd_eval_asr(const GlobalArgs& args, const std::string& originals_path,
                 const std::string& reconstructed_path) {
    const ToolkitConfig cfg = resolve_config(args);
    const auto originals = index_by_user(load_embeddings(originals_path));
    const auto reconstructed = load_embeddings(reconstructed_path);
    std::vector<Vector> rec, orig;
    for (const auto& row : reconstructed) {
        const auto it = originals.find(row.user_id);
        if (it == originals.end())
            throw InvalidParameter("eval asr: no original for user '" +
                                   row.user_id + "'");
        rec.push_back(row.values);
        orig.push_back(it->second);
    }
    const AttackReport report = attack_asr(rec, orig, cfg.attack.threshold);
    std::printf("asr=%.4f at t=%.4f over %zu pairs\n", report.asr,
                cfg.attack.threshold, rec.size());
    json flags = json::array();
    for (const auto f : report.accepted) flags.push_back(static_cast<bool>(f));
    write_report(args, json{{"asr", report.asr},
                            {"threshold", cfg.attack.threshold},
                            {"accepted", flags}});
    return 0;
}

int cmd_eval_baseline(const GlobalArgs& args, const std::string& data_path) {
    const ToolkitConfig cfg = resolve_config(args);
    const auto rows = load_embeddings(data_path);
    std::vector<LabeledEmbedding> distinct;
    for (const auto* row : first_per_user(rows)) distinct.push_back(*row);
    const auto [mean, sd] =
        random_guess_asr(distinct, cfg.attack.threshold,
                         cfg.attack.baseline_trials, args.seed);
    std::printf("random-guess asr = %.4f +- %.4f (t=%.4f, %lld trials)\n",
                mean, sd, cfg.attack.threshold,
                static_cast<long long>(cfg.attack.baseline_trials));
    write_report(args, json{{"baseline_asr_mean", mean},
                            {"baseline_asr_sd", sd},
                            {"threshold", cfg.attack.threshold},
                            {"trials", cfg.attack.baseline_trials}});
    return 0;
}

int cmd_eval_leakage(const GlobalArgs& args, const std::string& dump_path,
                     const std::string& public_path,
                     const std::string& originals_path) {
    const ToolkitConfig cfg = resolve_config(args);
    const AttackOutcome outcome =
        run_attack(cfg, dump_path, public_path, originals_path, args.seed);
    std::printf("leakage_cosine=%.4f permuted_control=%.4f (%zu users)\n",
                outcome.report.leakage_cosine_mean, outcome.permuted_control,
                outcome.users.size());
    write_report(args,
                 json{{"leakage_cosine_mean",
                       outcome.report.leakage_cosine_mean},
                      {"leakage_permuted_control", outcome.permuted_control},
                      {"users", outcome.users.size()}});
    return 0;
}

int cmd_eval_game(const GlobalArgs& args) {
    const ToolkitConfig cfg = resolve_config(args);
    const auto dist =
        make_ball_spec(cfg.game.dim, cfg.game.bound, cfg.game.beta,
                       cfg.game.radius, mix_seed(args.seed, 0x6A3Eull));
    const GameResult result = run_ideal_primitive_game(
        cfg.scheme, dist, pipe_game_adversary, cfg.game.threshold,
        cfg.game.trials, args.seed);
    std::printf("game (%s): wins=%lld baseline=%lld trials=%lld "
                "advantage=%.4f\n",
                scheme_name(cfg.scheme.kind).c_str(),
                static_cast<long long>(result.wins_full),
                static_cast<long long>(result.wins_baseline),
                static_cast<long long>(result.trials), result.advantage);
    write_report(args, json{{"scheme", scheme_name(cfg.scheme.kind)},
                            {"wins_full", result.wins_full},
                            {"wins_baseline", result.wins_baseline},
                            {"trials", result.trials},
                            {"advantage", result.advantage},
                            {"baseline", "most-probable-ball-center"}});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Euclidean fuzzy-extractor toolkit: protection schemes, "
                 "breach attacks and parameter analysis"};
    app.require_subcommand(1);

    GlobalArgs args;
    app.add_option("--seed", args.seed, "master seed (64-bit)");
    app.add_option("--scheme", args.scheme,
                   "protection scheme: mrp, facialfe or l2fe")
        ->check(CLI::IsMember({"mrp", "facialfe", "l2fe"}));
    app.add_option("--config", args.config_path, "JSON configuration file");
    app.add_option("--store", args.store_path, "record store path");
    app.add_option("--out", args.out_path, "output path (reports, datasets)");

    auto* params = app.add_subcommand("params", "parameter certification");
    params->fallthrough();

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->fallthrough();

    std::string ingest_input;
    auto* ingest =
        app.add_subcommand("ingest", "validate/project/normalize a dataset");
    ingest->fallthrough();
    ingest->add_option("input", ingest_input, "embedding CSV")->required();

    std::string enroll_data;
    auto* enroll_cmd = app.add_subcommand("enroll", "enroll a dataset");
    enroll_cmd->fallthrough();
    enroll_cmd->add_option("data", enroll_data, "embedding CSV")->required();

    std::string auth_probes;
    auto* auth_cmd = app.add_subcommand("auth", "authenticate probes");
    auth_cmd->fallthrough();
    auth_cmd->add_option("probes", auth_probes, "embedding CSV")->required();

    auto* breach = app.add_subcommand("breach", "dump the full store");
    breach->fallthrough();

    std::string attack_dump, attack_public, attack_originals, attack_rec_out;
    auto* attack_cmd =
        app.add_subcommand("attack", "surrogate-recovery attack on a dump");
    attack_cmd->fallthrough();
    attack_cmd->add_option("dump", attack_dump, "breach dump")->required();
    attack_cmd->add_option("public", attack_public, "public dataset CSV")
        ->required();
    attack_cmd
        ->add_option("originals", attack_originals,
                     "victims' unprotected embeddings (scoring only)")
        ->required();
    attack_cmd->add_option("--reconstructed", attack_rec_out,
                           "write reconstructed embeddings CSV");

    auto* eval = app.add_subcommand("eval", "evaluation commands");
    eval->fallthrough();
    eval->require_subcommand(1);
    std::string eval_data, eval_orig, eval_rec, eval_dump, eval_public;
    auto* eval_accuracy_cmd =
        eval->add_subcommand("accuracy", "same/different-user confusion");
    eval_accuracy_cmd->fallthrough();
    eval_accuracy_cmd->add_option("data", eval_data, "labeled dataset CSV")
        ->required();
    auto* eval_asr_cmd =
        eval->add_subcommand("asr", "attack success rate of reconstructions");
    eval_asr_cmd->fallthrough();
    eval_asr_cmd->add_option("originals", eval_orig, "originals CSV")
        ->required();
    eval_asr_cmd->add_option("reconstructed", eval_rec, "reconstructed CSV")
        ->required();
    auto* eval_baseline_cmd =
        eval->add_subcommand("baseline", "random-guessing success rate");
    eval_baseline_cmd->fallthrough();
    eval_baseline_cmd->add_option("data", eval_data, "dataset CSV")->required();
    auto* eval_leakage_cmd =
        eval->add_subcommand("leakage", "surrogate leakage statistics");
    eval_leakage_cmd->fallthrough();
    eval_leakage_cmd->add_option("dump", eval_dump, "breach dump")->required();
    eval_leakage_cmd->add_option("public", eval_public, "public dataset CSV")
        ->required();
    eval_leakage_cmd->add_option("originals", eval_orig, "originals CSV")
        ->required();
    auto* eval_game_cmd =
        eval->add_subcommand("game", "recovery game against the scheme");
    eval_game_cmd->fallthrough();

    try {
        app.parse(argc, argv);
        if (params->parsed()) return cmd_params(args);
        if (synth->parsed()) return cmd_synth(args);
        if (ingest->parsed()) return cmd_ingest(args, ingest_input);
        if (enroll_cmd->parsed()) return cmd_enroll(args, enroll_data);
        if (auth_cmd->parsed()) return cmd_auth(args, auth_probes);
        if (breach->parsed()) return cmd_breach(args);
        if (attack_cmd->parsed())
            return cmd_attack(args, attack_dump, attack_public,
                              attack_originals, attack_rec_out);
        if (eval->parsed()) {
            if (eval_accuracy_cmd->parsed())
                return cmd_eval_accuracy(args, eval_data);
            if (eval_asr_cmd->parsed())
                return cmd_eval_asr(args, eval_orig, eval_rec);
            if (eval_baseline_cmd->parsed())
                return cmd_eval_baseline(args, eval_data);
            if (eval_leakage_cmd->parsed())
                return cmd_eval_leakage(args, eval_dump, eval_public,
                                        eval_orig);
            if (eval_game_cmd->parsed()) return cmd_eval_game(args);
        }
        std::fprintf(stderr, "no subcommand selected\n");
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
