// hscale command-line driver: runs rate studies and the verification suite,
// writes CSV/Markdown/JSON artifacts plus a run manifest that reproduces the
// run byte-for-byte when fed back through --config.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hscale/tables.hpp"
#include "hscale/toml.hpp"
#include "hscale/verify.hpp"

namespace fs = std::filesystem;
using namespace hscale;

namespace {

constexpr const char* kVersion = "1.0.0";

struct CommonFlags {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 20240801;
    bool print_config = false;
};

struct StudyFlags {
    std::string rule;
    double s = 0.0;
    double u = -1.0;
    std::string norms;
    std::string deltas;
    int reps = 5;
    std::string reference;
    int resolution = 0;  // K for smoothing, grid_n for param-id
    double horizon = 2.0;  // observation interval (param-id)
};

Rule parse_rule(const std::string& name) {
    if (name == "simple") return Rule::simple;
    if (name == "apriori") return Rule::apriori;
    if (name == "discrepancy") return Rule::discrepancy;
    throw ConfigError("unknown rule '" + name + "' (expected simple|apriori|discrepancy)");
}

std::vector<double> parse_norms(const std::string& spec) {
    std::vector<double> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        double v = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0')
            throw ConfigError("bad norms entry '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("empty norms list");
    return out;
}

std::pair<int, int> parse_deltas(const std::string& spec) {
    auto dots = spec.find("..");
    if (dots == std::string::npos)
        throw ConfigError("bad deltas range '" + spec + "' (expected j0..j1)");
    try {
        int j0 = std::stoi(spec.substr(0, dots));
        int j1 = std::stoi(spec.substr(dots + 2));
        return {j0, j1};
    } catch (const std::exception&) {
        throw ConfigError("bad deltas range '" + spec + "' (expected j0..j1)");
    }
}

std::string norms_to_string(const std::vector<double>& norms) {
    std::string out;
    for (std::size_t i = 0; i < norms.size(); ++i) {
        if (i) out += ',';
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", norms[i]);
        out += buf;
    }
    return out;
}

/// Effective study configuration rendered as the manifest's TOML section.
std::string study_section(const std::string& name, const RateStudyConfig& cfg) {
    std::ostringstream out;
    out << "[" << name << "]\n";
    out << "rule = \"" << rule_name(cfg.rule) << "\"\n";
    out << "reference = \"" << cfg.reference << "\"\n";
    out << "s = "
        << format_double(cfg.problem == ProblemKind::smoothing ? cfg.smoothing.s
                                                               : cfg.param_id.s)
        << "\n";
    out << "u = " << format_double(cfg.u) << "\n";
    out << "norms = \"" << norms_to_string(cfg.report_norms) << "\"\n";
    out << "deltas = \"" << cfg.j0 << ".." << cfg.j1 << "\"\n";
    out << "reps = " << cfg.repetitions << "\n";
    out << "seed = " << cfg.seed << "\n";
    if (cfg.problem == ProblemKind::smoothing) {
        out << "K = " << cfg.smoothing.max_wavenumber << "\n";
        out << "stability = \""
            << (cfg.smoothing.stability == SmoothingStability::lipschitz_a1 ? "lipschitz"
                                                                            : "hoelder")
            << "\"\n";
    } else {
        out << "grid_n = " << cfg.param_id.grid_n << "\n";
        out << "horizon = " << format_double(cfg.param_id.horizon) << "\n";
    }
    return out.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) throw Error("cannot write '" + path.string() + "'");
    out << content;
}

void write_manifest(const fs::path& dir, const std::string& body) {
    write_file(dir / "manifest.toml",
               std::string("# hscale ") + kVersion + ", manifest schema 1\n" + body);
}

/// Merges file values and explicitly given flags into a study configuration.
RateStudyConfig build_study_config(ProblemKind kind, const std::string& section,
                                   const FlatToml& file, const CommonFlags& common,
                                   const StudyFlags& flags, const CLI::App* cmd) {
    RateStudyConfig cfg;
    cfg.problem = kind;
    if (kind == ProblemKind::smoothing) {
        cfg.reference = "step";
        cfg.rule = Rule::apriori;
        cfg.smoothing.max_wavenumber = 2048;
        cfg.smoothing.s = 0.0;
        cfg.j0 = 3;
        cfg.j1 = 14;
        cfg.report_norms = {0.0};
    } else {
        cfg.reference = "hat";
        cfg.rule = Rule::discrepancy;
        cfg.param_id.grid_n = 200;
        cfg.param_id.horizon = 2.0;
        cfg.param_id.s = 1.0;
        cfg.j0 = 3;
        cfg.j1 = 9;
        cfg.report_norms = {0.0, 1.0};
    }

    // Layer 1: config file.
    cfg.rule = parse_rule(file.get_string(section, "rule", rule_name(cfg.rule)));
    cfg.reference = file.get_string(section, "reference", cfg.reference);
    cfg.u = file.get_double(section, "u", cfg.u);
    cfg.repetitions = static_cast<int>(file.get_int(section, "reps", cfg.repetitions));
    cfg.seed = static_cast<std::uint64_t>(file.get_int(section, "seed",
                                                       static_cast<long long>(common.seed)));
    if (file.has(section, "norms"))
        cfg.report_norms = parse_norms(file.get_string(section, "norms", ""));
    if (file.has(section, "deltas"))
        std::tie(cfg.j0, cfg.j1) = parse_deltas(file.get_string(section, "deltas", ""));
    if (kind == ProblemKind::smoothing) {
        cfg.smoothing.s = file.get_double(section, "s", cfg.smoothing.s);
        cfg.smoothing.max_wavenumber =
            static_cast<int>(file.get_int(section, "K", cfg.smoothing.max_wavenumber));
        std::string stab = file.get_string(section, "stability", "lipschitz");
        if (stab == "lipschitz")
            cfg.smoothing.stability = SmoothingStability::lipschitz_a1;
        else if (stab == "hoelder")
            cfg.smoothing.stability = SmoothingStability::hoelder_a0;
        else
            throw ConfigError("unknown stability '" + stab + "' (expected lipschitz|hoelder)");
    } else {
        cfg.param_id.s = file.get_double(section, "s", cfg.param_id.s);
        cfg.param_id.grid_n =
            static_cast<int>(file.get_int(section, "grid_n", cfg.param_id.grid_n));
        cfg.param_id.horizon = file.get_double(section, "horizon", cfg.param_id.horizon);
    }

    // Layer 2: explicitly passed flags override the file.
    if (cmd->count("--rule")) cfg.rule = parse_rule(flags.rule);
    if (cmd->count("--reference")) cfg.reference = flags.reference;
    if (cmd->count("--u")) cfg.u = flags.u;
    if (cmd->count("--reps")) cfg.repetitions = flags.reps;
    if (cmd->count("--seed")) cfg.seed = common.seed;
    if (cmd->count("--norms")) cfg.report_norms = parse_norms(flags.norms);
    if (cmd->count("--deltas")) std::tie(cfg.j0, cfg.j1) = parse_deltas(flags.deltas);
    if (kind == ProblemKind::smoothing) {
        if (cmd->count("--s")) cfg.smoothing.s = flags.s;
        if (cmd->count("--resolution")) cfg.smoothing.max_wavenumber = flags.resolution;
    } else {
        if (cmd->count("--s")) cfg.param_id.s = flags.s;
        if (cmd->count("--resolution")) cfg.param_id.grid_n = flags.resolution;
        if (cmd->count("--horizon")) cfg.param_id.horizon = flags.horizon;
    }
    cfg.validate();
    return cfg;
}

void add_study_flags(CLI::App* cmd, CommonFlags& common, StudyFlags& flags) {
    cmd->add_option("--config", common.config_path, "TOML configuration file");
    cmd->add_option("--out", common.out_dir, "output directory");
    cmd->add_option("--seed", common.seed, "base RNG seed");
    cmd->add_flag("--print-config", common.print_config,
                  "print the effective configuration and exit");
    cmd->add_option("--rule", flags.rule, "parameter choice: simple|apriori|discrepancy");
    cmd->add_option("--s", flags.s, "penalty smoothness index");
    cmd->add_option("--u", flags.u, "solution smoothness index (default: reference supremum)");
    cmd->add_option("--norms", flags.norms, "comma-separated report norm indices, e.g. 0,1");
    cmd->add_option("--deltas", flags.deltas, "noise ladder exponent range j0..j1");
    cmd->add_option("--reps", flags.reps, "noise repetitions per ladder point");
    cmd->add_option("--reference", flags.reference, "reference solution name");
    cmd->add_option("--resolution", flags.resolution,
                    "discretization resolution (K for smoothing, grid_n for param-id)");
    cmd->add_option("--horizon", flags.horizon, "observation interval length (param-id)");
}

int run_study_command(ProblemKind kind, const std::string& section, const CommonFlags& common,
                      const StudyFlags& flags, const CLI::App* cmd) {
    FlatToml file =
        common.config_path.empty() ? FlatToml::parse("") : FlatToml::parse_file(common.config_path);
    RateStudyConfig cfg = build_study_config(kind, section, file, common, flags, cmd);
    std::string manifest = study_section(section, cfg);
    if (common.print_config) {
        std::cout << manifest;
        return 0;
    }
    auto result = run_study(cfg);
    fs::create_directories(common.out_dir);
    fs::path dir(common.out_dir);
    write_file(dir / "rates.csv", emit_tables(result, TableFormat::csv));
    write_file(dir / "rates.md", emit_tables(result, TableFormat::markdown));
    write_file(dir / "rates.json", emit_tables(result, TableFormat::json));
    write_manifest(dir, manifest);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
}

int run_verify_command(const CommonFlags& common) {
    auto report = verify_suite(common.seed);
    std::string text = verify_report_text(report);
    fs::create_directories(common.out_dir);
    write_file(fs::path(common.out_dir) / "verify.txt", text);
    write_manifest(fs::path(common.out_dir),
                   "[verify]\nseed = " + std::to_string(common.seed) + "\n");
    std::cout << text;
    return report.all_passed() ? 0 : 1;
}

int run_tables_command(const CommonFlags& common, const StudyFlags& flags, int which,
                       const CLI::App* cmd) {
    FlatToml file =
        common.config_path.empty() ? FlatToml::parse("") : FlatToml::parse_file(common.config_path);
    which = static_cast<int>(file.get_int("tables", "which", which));
    if (cmd->count("--which")) which = static_cast<int>(cmd->get_option("--which")->as<int>());
    if (which != 2 && which != 3 && which != 6)
        throw ConfigError("tables: --which must be 2, 3 or 6");

    std::vector<RateStudyConfig> grid;
    auto push_smoothing = [&](Rule rule, double s, const std::string& ref,
                              std::vector<double> norms) {
        RateStudyConfig cfg;
        cfg.problem = ProblemKind::smoothing;
        cfg.rule = rule;
        cfg.smoothing.s = s;
        cfg.reference = ref;
        cfg.report_norms = std::move(norms);
        cfg.j0 = 3;
        cfg.j1 = 14;
        cfg.seed = common.seed;
        grid.push_back(cfg);
    };
    if (which == 2 || which == 3) {
        Rule rule = which == 2 ? Rule::apriori : Rule::discrepancy;
        for (double s : {0.0, 1.0})
            for (const char* ref : {"step", "sqrt_bump", "hat"})
                push_smoothing(rule, s, ref, which == 2 ? std::vector<double>{0.0}
                                                        : std::vector<double>{0.0, 1.0});
    } else {
        for (double s : {1.0, 2.0})
            for (const char* ref : {"hat", "t_sqrt_t", "parabola"}) {
                RateStudyConfig cfg;
                cfg.problem = ProblemKind::param_id;
                cfg.rule = Rule::discrepancy;
                cfg.param_id.horizon = 2.0;
                cfg.param_id.s = s;
                cfg.reference = ref;
                cfg.report_norms = {0.0, 1.0};
                cfg.j0 = 3;
                cfg.j1 = 8;
                cfg.seed = common.seed;
                grid.push_back(cfg);
            }
    }
    for (auto& cfg : grid) {
        cfg.seed = static_cast<std::uint64_t>(
            file.get_int("tables", "seed", static_cast<long long>(common.seed)));
        if (cmd->count("--seed")) cfg.seed = common.seed;
        cfg.repetitions = static_cast<int>(file.get_int("tables", "reps", cfg.repetitions));
        if (cmd->count("--reps")) cfg.repetitions = flags.reps;
        if (file.has("tables", "deltas"))
            std::tie(cfg.j0, cfg.j1) = parse_deltas(file.get_string("tables", "deltas", ""));
        if (cmd->count("--deltas")) std::tie(cfg.j0, cfg.j1) = parse_deltas(flags.deltas);
        int resolution = cfg.problem == ProblemKind::smoothing ? cfg.smoothing.max_wavenumber
                                                               : cfg.param_id.grid_n;
        resolution = static_cast<int>(file.get_int("tables", "resolution", resolution));
        if (cmd->count("--resolution")) resolution = flags.resolution;
        if (cfg.problem == ProblemKind::smoothing)
            cfg.smoothing.max_wavenumber = resolution;
        else
            cfg.param_id.grid_n = resolution;
        if (cfg.problem == ProblemKind::param_id) {
            cfg.param_id.horizon = file.get_double("tables", "horizon", cfg.param_id.horizon);
            if (cmd->count("--horizon")) cfg.param_id.horizon = flags.horizon;
        }
        cfg.validate();
    }
    const RateStudyConfig& front = grid.front();
    std::string manifest = "[tables]\nwhich = " + std::to_string(which) +
                           "\nreps = " + std::to_string(front.repetitions) +
                           "\ndeltas = \"" + std::to_string(front.j0) + ".." +
                           std::to_string(front.j1) + "\"\nseed = " +
                           std::to_string(front.seed) + "\nresolution = " +
                           std::to_string(front.problem == ProblemKind::smoothing
                                              ? front.smoothing.max_wavenumber
                                              : front.param_id.grid_n) +
                           "\n";
    if (front.problem == ProblemKind::param_id)
        manifest += "horizon = " + format_double(front.param_id.horizon) + "\n";
    if (common.print_config) {
        std::cout << manifest;
        return 0;
    }
    std::vector<RateStudyResult> results;
    for (const auto& cfg : grid) results.push_back(run_study(cfg));
    fs::create_directories(common.out_dir);
    fs::path dir(common.out_dir);
    std::string base = "table" + std::to_string(which);
    write_file(dir / (base + ".csv"), emit_tables(results, TableFormat::csv));
    write_file(dir / (base + ".md"), emit_tables(results, TableFormat::markdown));
    write_file(dir / (base + ".json"), emit_tables(results, TableFormat::json));
    write_manifest(dir, manifest);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tikhonov regularization rate studies in Hilbert scales"};
    app.require_subcommand(1);

    CommonFlags common;
    StudyFlags flags;
    int which = 2;

    CLI::App* sm = app.add_subcommand("smoothing", "periodic data smoothing rate study");
    add_study_flags(sm, common, flags);
    CLI::App* pid = app.add_subcommand("param-id", "ODE coefficient identification rate study");
    add_study_flags(pid, common, flags);
    CLI::App* ver = app.add_subcommand("verify", "run the invariant verification suite");
    ver->add_option("--out", common.out_dir, "output directory");
    ver->add_option("--seed", common.seed, "base RNG seed");
    CLI::App* tab = app.add_subcommand("tables", "reproduce a full results table");
    add_study_flags(tab, common, flags);
    tab->add_option("--which", which, "table to reproduce: 2, 3 or 6");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sm->parsed())
            return run_study_command(ProblemKind::smoothing, "smoothing", common, flags, sm);
        if (pid->parsed())
            return run_study_command(ProblemKind::param_id, "param-id", common, flags, pid);
        if (ver->parsed()) return run_verify_command(common);
        if (tab->parsed()) return run_tables_command(common, flags, which, tab);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidArgument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "study failed: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
