// Command-line front end: solve | entropy | scan | table | fha.
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cha/cli.hpp"

namespace {

struct RawOptions {
    std::map<std::string, std::string> given;  // option name -> text, from flags
    bool check = false;
    std::string table_id;
    std::string config_path;
};

void add_common(CLI::App* sub, RawOptions& raw, bool with_rc = true) {
    auto text = [&](const char* flag, const char* key, const char* help) {
        sub->add_option_function<std::string>(flag, [&raw, key](const std::string& v) { raw.given[key] = v; }, help);
    };
    text("--state", "state", "state label(s): 2p | 2p,3d | 10s..10m");
    text("--Z", "Z", "nuclear charge (default 1)");
    if (with_rc) text("--rc", "rc", "cavity radius: value | list | start:stop[:count][:lin|log]");
    text("--orders", "orders", "entropic orders alpha[,beta] with 1/alpha + 1/beta = 2 (default 3/5)");
    text("--out", "out", "output file (default stdout)");
    text("--format", "format", "csv | text");
    text("--precision", "precision", "significant digits, 6..14 (default 12)");
    text("--threads", "threads", "worker threads (default: hardware concurrency)");
    sub->add_option("--config", raw.config_path, "key=value file; flags take precedence");
}

cha::cli::RunSpec build_spec(const std::string& task, RawOptions& raw) {
    std::map<std::string, std::string> opts;
    if (!raw.config_path.empty()) opts = cha::io::load_config(raw.config_path);
    for (const auto& [k, v] : raw.given) opts[k] = v;

    static const char* known[] = {"state", "Z", "rc", "orders", "out", "format", "precision", "threads", "check",
                                  "golden-dir"};
    for (const auto& [k, v] : opts) {
        bool ok = false;
        for (auto name : known) ok = ok || k == name;
        if (!ok) throw cha::ValidationError("unknown option '" + k + "'");
    }

    cha::cli::RunSpec spec;
    spec.task = cha::cli::parse_task(task);
    spec.table_id = raw.table_id;
    if (auto it = opts.find("state"); it != opts.end()) spec.states = cha::io::parse_states(it->second);
    if (auto it = opts.find("Z"); it != opts.end()) spec.Z = cha::io::parse_double(it->second);
    if (auto it = opts.find("rc"); it != opts.end()) spec.rc_values = cha::io::parse_rc(it->second);
    if (auto it = opts.find("orders"); it != opts.end()) spec.orders = cha::io::parse_orders(it->second);
    if (auto it = opts.find("out"); it != opts.end()) spec.out_path = it->second;
    if (auto it = opts.find("format"); it != opts.end()) spec.format = cha::cli::parse_format(it->second);
    if (auto it = opts.find("precision"); it != opts.end()) spec.precision = cha::io::parse_int(it->second);
    if (auto it = opts.find("threads"); it != opts.end()) spec.threads = cha::io::parse_int(it->second);
    if (auto it = opts.find("golden-dir"); it != opts.end()) spec.golden_dir = it->second;
    if (auto it = opts.find("check"); it != opts.end()) spec.check = it->second == "true" || it->second == "1";
    if (raw.check) spec.check = true;
    return spec;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Confined hydrogen atom: eigenstates, momentum densities and information measures"};
    app.require_subcommand(1);
    RawOptions raw;

    auto* solve = app.add_subcommand("solve", "eigenvalues and radial normalization");
    auto* entropy = app.add_subcommand("entropy", "Renyi, Tsallis, Shannon and Onicescu measures");
    auto* scan = app.add_subcommand("scan", "measures against rc, with ratios to the free atom");
    auto* table = app.add_subcommand("table", "recompute a golden table, optionally checking it");
    auto* fha = app.add_subcommand("fha", "free-atom reference measures");
    for (auto* sub : {solve, entropy, scan, fha}) add_common(sub, raw, sub != fha);
    add_common(table, raw);
    table->add_option("id", raw.table_id, "table id, I..VIII")->required();
    table->add_flag("--check", raw.check, "exit 2 when any cell is outside tolerance");
    table->add_option_function<std::string>(
        "--golden-dir", [&raw](const std::string& v) { raw.given["golden-dir"] = v; }, "golden CSV directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << cha::cli::error_record(cha::ErrorKind::validation, e.what()) << '\n';
        return cha::exit_code(cha::ErrorKind::validation);
    }

    try {
        auto spec = build_spec(app.get_subcommands().front()->get_name(), raw);
        return cha::cli::run(spec, std::cout, std::cerr);
    } catch (const cha::Error& e) {
        std::cerr << cha::cli::error_record(e.kind(), e.what()) << '\n';
        return cha::exit_code(e.kind());
    }
}
