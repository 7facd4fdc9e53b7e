#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rwc/atomic_file.hpp"
#include "rwc/choice/evaluate.hpp"
#include "rwc/choice/logit.hpp"
#include "rwc/district_io.hpp"
#include "rwc/optimizer/local_search.hpp"
#include "rwc/reporting.hpp"
#include "rwc/scenario.hpp"
#include "rwc/synthgen.hpp"

namespace rwc::cli {

inline constexpr std::string_view kVersion = "0.1.0";

namespace fs = std::filesystem;

/// Options of one subcommand, kept as formatted key/value pairs so the effective
/// configuration can be echoed and hashed. Paths are echoed but not hashed: inputs are
/// identified by content fingerprints instead.
class Settings {
public:
    template <class T>
    CLI::Option* param(CLI::App* app, const std::string& key, T& var, const std::string& help) {
        getters_[key] = [&var] { return format(var); };
        return app->add_option("--" + key, var, help)->capture_default_str();
    }
    CLI::Option* flag(CLI::App* app, const std::string& key, bool& var, const std::string& help) {
        getters_[key] = [&var] { return std::string(var ? "true" : "false"); };
        return app->add_flag("--" + key, var, help);
    }
    CLI::Option* path(CLI::App* app, const std::string& key, std::string& var, const std::string& help) {
        getters_[key] = [&var] { return var; };
        paths_.insert(key);
        return app->add_option("--" + key, var, help);
    }

    void add_input(const std::string& name, std::uint64_t fingerprint) { inputs_[name] = fingerprint; }

    [[nodiscard]] nlohmann::json effective() const {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [k, g] : getters_) j[k] = g();
        return j;
    }

    [[nodiscard]] std::uint64_t hash(std::string_view subcommand) const {
        Fnv1a h;
        h.update(subcommand);
        for (const auto& [k, g] : getters_) {
            if (paths_.count(k)) continue;
            h.update(k + "=" + g() + "\n");
        }
        for (const auto& [k, fp] : inputs_) {
            h.update(k);
            h.update_u64(fp);
        }
        return h.digest();
    }

    [[nodiscard]] nlohmann::json inputs() const {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [k, fp] : inputs_) j[k] = hex64(fp);
        return j;
    }

private:
    template <class T>
    static std::string format(const T& v) {
        if constexpr (std::is_same_v<T, std::string>) return v;
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else if constexpr (std::is_floating_point_v<T>) return csv::format_double(static_cast<double>(v));
        else return std::to_string(v);
    }

    std::map<std::string, std::function<std::string()>> getters_;
    std::set<std::string> paths_;
    std::map<std::string, std::uint64_t> inputs_;
};

inline std::size_t workers_from_env() {
    if (const char* w = std::getenv("RWC_WORKERS"); w != nullptr && *w != '\0') {
        try {
            const auto v = csv::parse_number<std::size_t>(w, "RWC_WORKERS");
            if (v > 0) return v;
        } catch (const FormatError&) {
        }
        throw ConfigError("RWC_WORKERS must be a positive integer");
    }
    return 1;
}

struct Manifest {
    Manifest(std::string sub, const Settings* s) : subcommand(std::move(sub)), settings(s) {}

    std::string subcommand;
    const Settings* settings = nullptr;
    std::uint64_t config_hash = 0;
    nlohmann::json seeds = nlohmann::json::object();
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void write(const fs::path& path) const {
        nlohmann::json j = {
            {"tool", "rwc"},
            {"version", kVersion},
            {"subcommand", subcommand},
            {"config_hash", hex64(config_hash)},
            {"config", settings->effective()},
            {"inputs", settings->inputs()},
            {"seeds", seeds},
            {"outputs", outputs},
            {"wall_seconds",
             std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
        };
        write_file_atomic(path, j.dump(2) + "\n");
    }
};

inline void require(const std::string& value, const std::string& flag, const std::string& what) {
    if (value.empty()) throw ConfigError("missing input: --" + flag + " (" + what + ")");
}

inline void check_district_match(std::uint64_t expected, std::optional<std::uint64_t> got, const std::string& what) {
    if (got && *got != expected)
        throw ConfigError(what + " was produced for district " + hex64(*got) + " but the district is " +
                          hex64(expected));
}

inline LogitModel load_logit(const fs::path& path, const District& d) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    if (j.contains("district")) check_district_match(district_fingerprint(d), parse_hex64(j["district"].get<std::string>()),
                                                     "model " + path.string());
    return logit_from_json(j);
}

inline std::unique_ptr<ChoiceModel> model_for(Method m, const District& d, const std::string& model_path) {
    switch (m) {
        case Method::R: return std::make_unique<FollowModel>();
        case Method::FR: return std::make_unique<FrequencyModel>();
        default:
            if (model_path.empty())
                throw ConfigError("missing input: method RWC requires --model (a trained logit model file)");
            return std::make_unique<LogitChoiceModel>(load_logit(model_path, d), d);
    }
}

inline std::string provenance(std::uint64_t config_hash) { return "config=" + hex64(config_hash); }

/// Writes the report files for `zoning` against `baseline` into `dir`; returns their names.
inline std::vector<std::string> write_reports(const fs::path& dir, const District& d, const Zoning& baseline,
                                              const Zoning& zoning, const ScenarioTable& table,
                                              const std::string& method, std::uint64_t config_hash) {
    const bool deterministic = table.model_fingerprint() == FollowModel{}.fingerprint();
    const auto current = rezone_report(baseline, baseline, table, d);
    const auto rep = rezone_report(baseline, zoning, table, d);
    const std::string head = "# rwc report " + provenance(config_hash) + " district=" +
                             hex64(district_fingerprint(d)) + " table_model=" + hex64(table.model_fingerprint()) +
                             " table_seed=" + std::to_string(table.seed()) + "\n";
    write_file_atomic(dir / "report.csv", head + report_header() + "\n" +
                                              report_row("Current", current, deterministic, true) + "\n" +
                                              report_row(method, rep, deterministic, false) + "\n");
    write_file_atomic(dir / "enrollment.csv", head + enrollment_table(rep, d));
    write_file_atomic(dir / "blocks.csv", head + block_table(rep, d, baseline, zoning));
    write_file_atomic(dir / "attendance_labels.csv",
                      head + matrix_table(attendance_matrix(d, baseline, label_realization(d, baseline))));
    return {"report.csv", "enrollment.csv", "blocks.csv", "attendance_labels.csv"};
}

inline std::string metrics_text(const SolveResult& r, std::uint64_t config_hash) {
    std::string out = "# rwc metrics " + provenance(config_hash) + "\n";
    out += "key,value\n";
    out += "objective," + csv::format_double(r.objective.mean) + "\n";
    out += "standard_error," + csv::format_double(r.objective.standard_error) + "\n";
    out += "alpha," + csv::format_double(r.params.alpha) + "\n";
    out += "alpha_widened," + std::string(r.alpha_widened ? "1" : "0") + "\n";
    out += "tau," + csv::format_double(r.params.tau) + "\n";
    out += "rezoned_students," + std::to_string(r.rezoned_students) + "\n";
    out += "feasible," + std::string(r.certificate.passed() ? "1" : "0") + "\n";
    for (std::size_t i = 0; i < r.objective.per_scenario.size(); ++i)
        out += "d_" + std::to_string(i) + "," + csv::format_double(r.objective.per_scenario[i]) + "\n";
    return out;
}

inline std::string run_log_text(const SolveResult& r, Method m) {
    const auto& s = r.stats;
    std::string out = "method " + std::string(method_name(m)) + "\n";
    out += "restarts " + std::to_string(s.restarts) + "\n";
    out += "iterations " + std::to_string(s.iterations) + "\n";
    out += "proposals " + std::to_string(s.proposals) + "\n";
    out += "accepted " + std::to_string(s.accepted) + "\n";
    out += "improvements " + std::to_string(s.improvements) + "\n";
    out += "rejected_structure " + std::to_string(s.rejected_structure) + "\n";
    out += "rejected_population " + std::to_string(s.rejected_population) + "\n";
    out += "rejected_metropolis " + std::to_string(s.rejected_metropolis) + "\n";
    out += "hit_time_limit " + std::string(s.hit_time_limit ? "1" : "0") + "\n";
    if (r.alpha_widened) out += "alpha widened to " + csv::format_double(r.params.alpha) + "\n";
    return out;
}

/// Entry point shared by the executable and the tests. Returns the process exit status.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"School redistricting with choice modeling", "rwc"};
    app.set_version_flag("--version", std::string(kVersion));
    app.set_config("--config", "", "INI file; [subcommand] sections hold that subcommand's options");
    app.require_subcommand(1);
    std::size_t workers = 0;
    app.add_option("--workers", workers, "Parallelism cap (default: $RWC_WORKERS or 1)");

    // generate
    Settings gen_s;
    GenParams gp;
    std::string gen_out;
    auto* gen = app.add_subcommand("generate", "Create a labelled synthetic district");
    gen_s.path(gen, "out", gen_out, "Output district directory")->required();
    gen_s.param(gen, "blocks", gp.n_blocks, "Number of census blocks");
    gen_s.param(gen, "schools", gp.n_schools, "Number of schools");
    gen_s.param(gen, "magnets", gp.n_magnets, "Number of magnet schools");
    gen_s.param(gen, "students", gp.n_students, "Number of students");
    gen_s.param(gen, "choice-zones", gp.n_choice_zones, "Number of choice zones");
    gen_s.param(gen, "ses-correlation-length", gp.ses_correlation_length, "SES field correlation length (km)");
    gen_s.param(gen, "follow-target", gp.follow_rate_target, "Target share attending the zoned school");
    gen_s.param(gen, "magnet-share-target", gp.magnet_share_target, "Target magnet share among opt-outs (<=0 off)");
    gen_s.param(gen, "block-size", gp.block_size_km, "Block edge length (km)");
    gen_s.param(gen, "empty-fraction", gp.empty_block_fraction, "Share of blocks without students");
    gen_s.param(gen, "seed", gp.seed, "Random seed");

    // train
    Settings train_s;
    std::string train_district, train_out;
    LogitConfig lc;
    auto add_logit = [&](Settings& s, CLI::App* a) {
        s.param(a, "learning-rate", lc.learning_rate, "Initial gradient step");
        s.param(a, "l2", lc.l2, "L2 penalty");
        s.param(a, "max-iter", lc.max_iter, "Maximum gradient iterations");
        s.param(a, "tolerance", lc.tolerance, "Stop when the loss improves by less than this");
    };
    auto* train = app.add_subcommand("train", "Fit the multinomial logit choice model");
    train_s.path(train, "district", train_district, "District directory")->required()->check(CLI::ExistingDirectory);
    train_s.path(train, "out", train_out, "Output model file (JSON)")->required();
    add_logit(train_s, train);

    // evaluate
    Settings eval_s;
    std::string eval_district, eval_out, eval_kind = "logit";
    std::size_t folds = 10;
    std::uint64_t eval_seed = 1;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Cross-validate a choice model against the labels");
    eval_s.path(evaluate_cmd, "district", eval_district, "District directory")->required()->check(CLI::ExistingDirectory);
    eval_s.path(evaluate_cmd, "out", eval_out, "Output table (CSV)")->required();
    eval_s.param(evaluate_cmd, "model-kind", eval_kind, "follow, frequency or logit")
        ->check(CLI::IsMember({"follow", "frequency", "logit"}));
    eval_s.param(evaluate_cmd, "folds", folds, "Number of folds");
    eval_s.param(evaluate_cmd, "seed", eval_seed, "Fold assignment seed");
    add_logit(eval_s, evaluate_cmd);

    // scenarios
    Settings scn_s;
    std::string scn_district, scn_model, scn_out, scn_method = "RWC";
    std::size_t scn_count = 30, scn_cap = 0;
    std::uint64_t scn_seed = 1;
    auto* scn = app.add_subcommand("scenarios", "Sample an SAA scenario table");
    scn_s.path(scn, "district", scn_district, "District directory")->required()->check(CLI::ExistingDirectory);
    scn_s.path(scn, "model", scn_model, "Trained logit model (method RWC)");
    scn_s.path(scn, "out", scn_out, "Output table file")->required();
    scn_s.param(scn, "method", scn_method, "R (follow), FR (frequency) or RWC (logit)");
    scn_s.param(scn, "scenarios", scn_count, "Number of scenarios I");
    scn_s.param(scn, "seed", scn_seed, "Sampling seed");
    scn_s.param(scn, "candidate-cap", scn_cap, "Keep only each student's nearest r zoned schools (0 = all)");

    // optimize
    Settings opt_s;
    std::string opt_district, opt_model, opt_table, opt_out, opt_method = "RWC";
    SolverConfig sc;
    std::uint64_t opt_scn_seed = 1;
    bool no_widen = false;
    auto* opt = app.add_subcommand("optimize", "Search for a low-dissimilarity feasible zoning");
    opt_s.path(opt, "district", opt_district, "District directory")->required()->check(CLI::ExistingDirectory);
    opt_s.path(opt, "model", opt_model, "Trained logit model (method RWC)");
    opt_s.path(opt, "table", opt_table, "Precomputed scenario table (otherwise sampled)");
    opt_s.path(opt, "out", opt_out, "Output directory")->required();
    opt_s.param(opt, "method", opt_method, "R, FR or RWC");
    opt_s.param(opt, "alpha", sc.params.alpha, "Population bound slack");
    opt_s.param(opt, "tau", sc.params.tau, "Travel-time slack");
    opt_s.param(opt, "scenarios", sc.scenarios, "Scenarios I when sampling (R always uses 1)");
    opt_s.param(opt, "scenario-seed", opt_scn_seed, "Sampling seed");
    opt_s.param(opt, "seed", sc.seed, "Search seed");
    opt_s.param(opt, "time-limit", sc.time_limit, "Seconds per run");
    opt_s.param(opt, "restarts", sc.restarts, "Independent restarts");
    opt_s.param(opt, "max-iterations", sc.max_iterations, "Iterations per restart");
    opt_s.param(opt, "initial-temperature", sc.initial_temperature, "Annealing start temperature");
    opt_s.param(opt, "cooling", sc.cooling, "Cooling factor in (0,1)");
    opt_s.param(opt, "moves-per-temperature", sc.moves_per_temperature, "Iterations between coolings");
    opt_s.flag(opt, "no-widen", no_widen, "Fail instead of widening alpha when the status quo violates it");

    // report
    Settings rep_s;
    std::string rep_district, rep_table, rep_zoning, rep_baseline, rep_out, rep_method = "RWC";
    auto* rep = app.add_subcommand("report", "Summarize a zoning against a baseline");
    rep_s.path(rep, "district", rep_district, "District directory")->required()->check(CLI::ExistingDirectory);
    rep_s.path(rep, "table", rep_table, "Scenario table file")->required()->check(CLI::ExistingFile);
    rep_s.path(rep, "zoning", rep_zoning, "Zoning file to report")->required()->check(CLI::ExistingFile);
    rep_s.path(rep, "baseline", rep_baseline, "Baseline zoning (default: status quo)")->check(CLI::ExistingFile);
    rep_s.path(rep, "out", rep_out, "Output directory")->required();
    rep_s.param(rep, "method", rep_method, "Row label");

    // export-map
    Settings map_s;
    std::string map_district, map_zoning, map_table, map_out, map_overlay = "none";
    auto* map = app.add_subcommand("export-map", "Write the zoning as GeoJSON");
    map_s.path(map, "district", map_district, "District directory")->required()->check(CLI::ExistingDirectory);
    map_s.path(map, "zoning", map_zoning, "Zoning file (default: status quo)")->check(CLI::ExistingFile);
    map_s.path(map, "table", map_table, "Scenario table (for opt-out-rate)")->check(CLI::ExistingFile);
    map_s.path(map, "out", map_out, "Output GeoJSON file")->required();
    map_s.param(map, "overlay", map_overlay, "none, opt-out-rate or ses")
        ->check(CLI::IsMember({"none", "opt-out-rate", "ses"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "rwc: error: " << msg << "\n";
        return 2;
    }

    try {
        if (workers == 0) workers = workers_from_env();

        if (gen->parsed()) {
            Manifest mf("generate", &gen_s);
            mf.config_hash = gen_s.hash("generate");
            mf.seeds["seed"] = gp.seed;
            const auto d = generate_labeled_district(gp);
            const fs::path dir(gen_out);
            fs::create_directories(dir);
            write_district(dir, d, provenance(mf.config_hash));
            const auto fp = district_fingerprint(d);
            write_zoning(dir / "zoning.csv", Zoning::status_quo(d), fp, provenance(mf.config_hash));
            mf.outputs = {"blocks.csv", "schools.csv", "students.csv", "adjacency.csv", "zoning.csv"};
            mf.write(dir / "manifest.json");
            out << "district " << hex64(fp) << ": " << d.block_count() << " blocks, " << d.school_count()
                << " schools, " << d.students().size() << " students, label follow rate "
                << csv::format_fixed(label_follow_rate(d), 4) << "\n";
            return 0;
        }

        if (train->parsed()) {
            const auto d = read_district(train_district);
            train_s.add_input("district", district_fingerprint(d));
            Manifest mf("train", &train_s);
            mf.config_hash = train_s.hash("train");
            const Featurizer fz(d);
            std::vector<StudentId> all(d.students().size());
            for (std::size_t k = 0; k < all.size(); ++k) all[k] = static_cast<StudentId>(k);
            const auto [x, y] = training_set(d, fz, all);
            const auto res = logit_train(x, y, d.school_count(), lc, fz.names());
            auto j = logit_to_json(res.model);
            j["config_hash"] = hex64(mf.config_hash);
            j["district"] = hex64(district_fingerprint(d));
            write_file_atomic(train_out, j.dump(1) + "\n");
            mf.outputs = {fs::path(train_out).filename().string()};
            mf.write(train_out + ".manifest.json");
            out << "trained logit on " << all.size() << " students: " << res.iterations << " iterations, final loss "
                << csv::format_fixed(res.loss_history.back(), 6) << "\n";
            return 0;
        }

        if (evaluate_cmd->parsed()) {
            const auto d = read_district(eval_district);
            eval_s.add_input("district", district_fingerprint(d));
            Manifest mf("evaluate", &eval_s);
            mf.config_hash = eval_s.hash("evaluate");
            mf.seeds["seed"] = eval_seed;
            ModelFactory factory;
            if (eval_kind == "follow") {
                factory = [](const District&, std::span<const StudentId>) -> std::unique_ptr<ChoiceModel> {
                    return std::make_unique<FollowModel>();
                };
            } else if (eval_kind == "frequency") {
                factory = [](const District&, std::span<const StudentId>) -> std::unique_ptr<ChoiceModel> {
                    return std::make_unique<FrequencyModel>();
                };
            } else {
                factory = [&](const District& dd, std::span<const StudentId> tr) -> std::unique_ptr<ChoiceModel> {
                    const Featurizer fz(dd);
                    const auto [x, y] = training_set(dd, fz, tr);
                    return std::make_unique<LogitChoiceModel>(logit_train(x, y, dd.school_count(), lc, fz.names()).model, dd);
                };
            }
            const auto r = evaluate(factory, d, folds, eval_seed);
            write_file_atomic(eval_out, "# rwc evaluation " + provenance(mf.config_hash) + "\n" +
                                            std::string(kEvalHeader) + "\n" + eval_row(r) + "\n");
            mf.outputs = {fs::path(eval_out).filename().string()};
            mf.write(eval_out + ".manifest.json");
            out << kEvalHeader << "\n" << eval_row(r) << "\n";
            return 0;
        }

        if (scn->parsed()) {
            const auto d = read_district(scn_district);
            const auto method = parse_method(scn_method);
            const auto model = model_for(method, d, scn_model);
            scn_s.add_input("district", district_fingerprint(d));
            scn_s.add_input("model", model->fingerprint());
            Manifest mf("scenarios", &scn_s);
            mf.config_hash = scn_s.hash("scenarios");
            mf.seeds["seed"] = scn_seed;
            auto table = sample_scenarios(*model, d, scn_count, scn_seed, {scn_cap, workers});
            table.set_config_hash(mf.config_hash);
            write_table(scn_out, table);
            mf.outputs = {fs::path(scn_out).filename().string()};
            mf.write(scn_out + ".manifest.json");
            out << "sampled " << scn_count << " scenarios with the " << model->name() << " model\n";
            return 0;
        }

        if (opt->parsed()) {
            const auto d = read_district(opt_district);
            const auto dfp = district_fingerprint(d);
            sc.method = parse_method(opt_method);
            sc.workers = workers;
            sc.auto_widen_alpha = !no_widen;
            opt_s.add_input("district", dfp);
            ScenarioTable table;
            if (!opt_table.empty()) {
                if (!fs::exists(opt_table)) throw ConfigError("missing input: table file " + opt_table + " does not exist");
                table = read_table(opt_table);
                check_district_match(dfp, table.district_fingerprint(), "table " + opt_table);
                opt_s.add_input("table", table.config_hash() != 0 ? table.config_hash() : table.model_fingerprint());
            } else {
                const auto model = model_for(sc.method, d, opt_model);
                opt_s.add_input("model", model->fingerprint());
            }
            Manifest mf("optimize", &opt_s);
            mf.config_hash = opt_s.hash("optimize");
            mf.seeds = {{"seed", sc.seed}, {"scenario_seed", opt_scn_seed}};
            const fs::path dir(opt_out);
            fs::create_directories(dir);
            if (opt_table.empty()) {
                const auto model = model_for(sc.method, d, opt_model);
                const std::size_t count = sc.method == Method::R ? 1 : sc.scenarios;
                table = sample_scenarios(*model, d, count, opt_scn_seed, {0, workers});
                table.set_config_hash(mf.config_hash);
                write_table(dir / "table.bin", table);
                mf.outputs.push_back("table.bin");
            }
            const auto res = local_search_optimize(d, table, sc);
            write_zoning(dir / "zoning.csv", res.zoning, dfp, provenance(mf.config_hash));
            write_file_atomic(dir / "metrics.csv", metrics_text(res, mf.config_hash));
            write_file_atomic(dir / "run_log.txt", run_log_text(res, sc.method));
            mf.outputs.insert(mf.outputs.end(), {"zoning.csv", "metrics.csv", "run_log.txt"});
            for (auto& f : write_reports(dir, d, Zoning::status_quo(d), res.zoning, table,
                                         std::string(method_name(sc.method)), mf.config_hash))
                mf.outputs.push_back(f);
            mf.write(dir / "manifest.json");
            out << method_name(sc.method) << ": objective " << csv::format_fixed(res.objective.mean, 6)
                << " (status quo " << csv::format_fixed(saa_objective(Zoning::status_quo(d), table, d).mean, 6)
                << "), rezoned " << res.rezoned_students << " students"
                << (res.alpha_widened ? ", alpha widened to " + csv::format_double(res.params.alpha) : std::string())
                << "\n";
            return res.certificate.passed() ? 0 : 1;
        }

        if (rep->parsed()) {
            const auto d = read_district(rep_district);
            const auto dfp = district_fingerprint(d);
            const auto table = read_table(rep_table);
            check_district_match(dfp, table.district_fingerprint(), "table " + rep_table);
            const auto z = read_zoning(rep_zoning);
            check_district_match(dfp, z.district_fingerprint, "zoning " + rep_zoning);
            Zoning base = Zoning::status_quo(d);
            if (!rep_baseline.empty()) {
                const auto b = read_zoning(rep_baseline);
                check_district_match(dfp, b.district_fingerprint, "baseline " + rep_baseline);
                base = b.zoning;
            }
            for (const Zoning* zz : {&z.zoning, static_cast<const Zoning*>(&base)})
                if (zz->size() != d.block_count()) throw ConfigError("zoning does not cover the district's blocks");
            rep_s.add_input("district", dfp);
            rep_s.add_input("table", table.config_hash() != 0 ? table.config_hash() : table.model_fingerprint());
            rep_s.add_input("zoning", fnv1a(zoning_text(z.zoning, dfp)));
            rep_s.add_input("baseline", fnv1a(zoning_text(base, dfp)));
            Manifest mf("report", &rep_s);
            mf.config_hash = rep_s.hash("report");
            const fs::path dir(rep_out);
            fs::create_directories(dir);
            mf.outputs = write_reports(dir, d, base, z.zoning, table, rep_method, mf.config_hash);
            mf.write(dir / "manifest.json");
            out << "report written to " << dir.string() << "\n";
            return 0;
        }

        if (map->parsed()) {
            const auto d = read_district(map_district);
            const auto dfp = district_fingerprint(d);
            Zoning z = Zoning::status_quo(d);
            if (!map_zoning.empty()) {
                const auto lz = read_zoning(map_zoning);
                check_district_match(dfp, lz.district_fingerprint, "zoning " + map_zoning);
                z = lz.zoning;
                if (z.size() != d.block_count()) throw ConfigError("zoning does not cover the district's blocks");
            }
            const auto overlay = parse_overlay(map_overlay);
            std::optional<ScenarioTable> table;
            if (overlay == MapOverlay::opt_out_rate) {
                require(map_table, "table", "the opt-out-rate overlay needs a scenario table");
                table = read_table(map_table);
                check_district_match(dfp, table->district_fingerprint(), "table " + map_table);
            }
            map_s.add_input("district", dfp);
            map_s.add_input("zoning", fnv1a(zoning_text(z, dfp)));
            if (table) map_s.add_input("table", table->config_hash() != 0 ? table->config_hash() : table->model_fingerprint());
            Manifest mf("export-map", &map_s);
            mf.config_hash = map_s.hash("export-map");
            auto j = export_geojson(d, z, overlay, table ? &*table : nullptr);
            j["rwc"] = {{"config_hash", hex64(mf.config_hash)}, {"district", hex64(dfp)}};
            write_file_atomic(map_out, j.dump() + "\n");
            mf.outputs = {fs::path(map_out).filename().string()};
            mf.write(map_out + ".manifest.json");
            out << "map written to " << map_out << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "rwc: error: " << msg << "\n";
        return dynamic_cast<const ConfigError*>(&e) != nullptr ? 2 : 1;
    }
    return 0;
}

}  // namespace rwc::cli
