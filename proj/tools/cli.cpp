#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "steinlil/config.hpp"
#include "steinlil/error.hpp"
#include "steinlil/experiments.hpp"
#include "steinlil/sampler.hpp"

namespace steinlil::cli {

namespace {

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string out_dir;
    std::string format = "csv";
    std::vector<std::string> overrides;
};

ExperimentConfig load_config(const Options& o) {
    auto kv = o.config_path.empty() ? KeyValueConfig{} : KeyValueConfig::load(o.config_path);
    for (const auto& item : o.overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw DomainError("--set expects key=value, got '" + item + "'");
        kv.set(item.substr(0, eq), item.substr(eq + 1));
    }
    if (o.seed) kv.set("seed", std::to_string(*o.seed));
    if (o.threads) kv.set("threads", std::to_string(*o.threads));
    return ExperimentConfig::from(kv);
}

void emit(const Options& o, const std::string& name, const std::string& body, std::ostream& out) {
    if (o.out_dir.empty()) {
        out << body;
        return;
    }
    std::filesystem::create_directories(o.out_dir);
    const auto path = std::filesystem::path(o.out_dir) / (name + "." + o.format);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path.string() + "'");
    f << body;
}

std::string render(const AuditReport& report, const std::string& format) {
    if (format == "json") return to_json(report);
    std::ostringstream os;
    write_csv(os, report);
    return os.str();
}

std::string render(const LilTrajectory& t, const std::string& format) {
    if (format == "json") return to_json(t);
    std::ostringstream os;
    write_csv(os, t);
    return os.str();
}

std::string render(const PathEnsemble& e, const ExperimentConfig& c, const std::string& format) {
    if (format == "json") {
        nlohmann::ordered_json j;
        j["report"] = "simulate";
        j["model"] = c.covariance_model().id();
        j["n"] = c.n;
        j["seed"] = c.seed;
        j["paths"] = nlohmann::ordered_json::array();
        for (const auto& p : e.paths) j["paths"].push_back({{"replicate", p.replicate}, {"values", p.values}});
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    write_paths_csv(os, e);
    return os.str();
}

int report_verdict(const AuditReport& report, std::ostream& err) {
    for (const auto& c : report.checks) {
        err << report.name << ": " << c.name << ": " << (c.pass ? "pass" : "FAIL") << '\n';
    }
    return report.pass ? kExitPass : kExitAuditFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hermite variation audits: variance laws, Stein bounds, distances"};
    app.name("steinlil");
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "master seed (overrides the config)");
        sub->add_option("--out", o.out_dir, "directory for <subcommand>.<format>; stdout when omitted");
        sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--threads", o.threads, "worker threads (results do not depend on it)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--set", o.overrides, "extra key=value overrides, applied after --config");
    };

    const std::vector<std::pair<std::string, std::string>> commands{
        {"variance-table", "exact E[X_n^2]/g(n)^2 across n = 2^k"},
        {"cross-cov", "normalised block cross-covariances and the Stein W1 bound"},
        {"distance-decay", "Kolmogorov distance against the E|Gamma - 1| bound"},
        {"comparison", "d_K <= 3 log^(1/4)(d+1) sqrt(W1) on blocking increment vectors"},
        {"lil-trajectory", "running LIL records (display only)"},
        {"audit", "all assumption audits"},
        {"simulate", "dump sampled Gaussian paths"},
    };
    for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help));

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return kExitError;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        const auto config = load_config(o);
        if (name == "simulate") {
            const auto plan = build_plan(config.covariance_model(), config.n);
            emit(o, name, render(sample_ensemble(plan, config.seed, config.replicates, config.threads), config, o.format), out);
            return kExitPass;
        }
        if (name == "lil-trajectory") {
            emit(o, name, render(run_lil_trajectory(config), o.format), out);
            return kExitPass;
        }
        AuditReport report;
        if (name == "variance-table") {
            report = run_variance_table(config);
        } else if (name == "cross-cov") {
            report = run_cross_covariance_audit(config);
        } else if (name == "distance-decay") {
            report = run_distance_decay(config);
        } else if (name == "comparison") {
            report = run_comparison_check(config);
        } else {
            report = run_assumption_audit(config);
        }
        emit(o, name, render(report, o.format), out);
        return report_verdict(report, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

}  // namespace steinlil::cli
