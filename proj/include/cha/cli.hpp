#pragma once

#include <cmath>
#include <limits>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cha/entropy.hpp"
#include "cha/errors.hpp"
#include "cha/golden.hpp"
#include "cha/io.hpp"
#include "cha/momentum.hpp"
#include "cha/solver.hpp"

namespace cha::cli {

enum class Task { solve, entropy, scan, table, fha };
enum class Format { csv, text };

inline Task parse_task(const std::string& s) {
    if (s == "solve") return Task::solve;
    if (s == "entropy") return Task::entropy;
    if (s == "scan") return Task::scan;
    if (s == "table") return Task::table;
    if (s == "fha") return Task::fha;
    throw ValidationError("unknown task '" + s + "'");
}

inline Format parse_format(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "text") return Format::text;
    throw ValidationError("format must be csv or text");
}

struct RunSpec {
    Task task = Task::entropy;
    std::vector<QuantumNumbers> states;
    double Z = 1.0;
    std::vector<double> rc_values;
    EntropicOrders orders;
    std::string out_path;  // empty: the output stream passed to run()
    Format format = Format::csv;
    int precision = 12;
    bool check = false;
    std::string table_id;
    std::string golden_dir = golden_default_dir();
    unsigned threads = 0;

    void validate() const {
        if (precision < 6 || precision > 14) throw ValidationError("precision must lie in [6, 14]");
        if (!(Z > 0.0) || !std::isfinite(Z)) throw ValidationError("Z must be positive and finite");
        for (std::size_t i = 0; i < rc_values.size(); ++i) {
            if (!(rc_values[i] > 0.0)) throw ValidationError("rc values must be positive");
            if (i && !(rc_values[i] > rc_values[i - 1])) throw ValidationError("rc values must be sorted");
        }
        for (const auto& qn : states) qn.validate();
        switch (task) {
            case Task::solve:
            case Task::entropy:
            case Task::scan:
                if (states.empty()) throw ValidationError("--state is required");
                if (rc_values.empty()) throw ValidationError("--rc is required");
                break;
            case Task::fha:
                if (states.empty()) throw ValidationError("--state is required");
                break;
            case Task::table:
                validate_table_id(table_id);
                break;
        }
        if (task == Task::scan)
            for (double rc : rc_values)
                if (std::isinf(rc)) throw ValidationError("scan needs finite rc values");
    }
};

/// Machine-readable error record written to stderr on failure.
inline std::string error_record(ErrorKind kind, const std::string& message, const std::string& context = {}) {
    nlohmann::ordered_json j;
    j["error"] = to_string(kind);
    j["exit_code"] = exit_code(kind);
    j["message"] = message;
    if (!context.empty()) j["context"] = context;
    return j.dump();
}

namespace detail {

inline std::string item_label(const WorkItem& w) {
    std::ostringstream os;
    os << state_label(w.qn) << " Z=" << io::format_fixed(w.conf.Z, 6) << " rc=" << io::format_rc(w.conf.rc, 6);
    return os.str();
}

inline void emit(const RunSpec& spec, const io::Table& t, std::ostream& out) {
    auto write = [&](std::ostream& os) {
        if (spec.format == Format::csv) io::write_csv(os, t);
        else io::write_text(os, t);
    };
    if (spec.out_path.empty()) {
        write(out);
        return;
    }
    std::ofstream file(spec.out_path, std::ios::binary);
    if (!file) throw ValidationError("cannot write '" + spec.out_path + "'");
    write(file);
}

inline std::vector<WorkItem> grid_items(const RunSpec& spec, const std::vector<double>& rcs) {
    std::vector<WorkItem> items;
    for (const auto& qn : spec.states)
        for (double rc : rcs) items.push_back({qn, Confinement{spec.Z, rc}});
    return items;
}

// Throws the first failure (in input order) so the error report is deterministic.
inline std::vector<InfoMeasures> measures_or_throw(const std::vector<WorkItem>& items, const RunSpec& spec) {
    auto results = compute_batch(items, spec.orders, {}, spec.threads);
    std::vector<InfoMeasures> out;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].error) throw Error(*results[i].error, item_label(items[i]) + ": " + results[i].message);
        out.push_back(*results[i].measures);
    }
    return out;
}

inline const std::vector<std::string>& measure_columns() {
    static const std::vector<std::string> cols{"R_r", "R_p", "R_t", "T_r", "T_p", "T_t",
                                               "S_r", "S_p", "S_t", "E_r", "E_p", "E_t"};
    return cols;
}

inline io::Table measures_table(const std::vector<InfoMeasures>& ms, int sig) {
    io::Table t;
    t.header = {"state", "Z", "rc", "alpha", "beta", "energy"};
    for (const auto& c : measure_columns()) t.header.push_back(c);
    for (const auto& m : ms) {
        std::vector<std::string> row{state_label(m.qn),
                                     io::format_fixed(m.Z, sig),
                                     io::format_rc(m.rc, sig),
                                     io::format_fixed(m.orders.alpha(), sig),
                                     io::format_fixed(m.orders.beta(), sig),
                                     io::format_fixed(m.diag.energy, sig)};
        for (const auto& c : measure_columns()) row.push_back(io::format_fixed(measure_value(m, c), sig));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline int run_solve(const RunSpec& spec, std::ostream& out) {
    io::Table t;
    t.header = {"state", "Z", "rc", "energy", "radial_nodes", "norm_constant", "norm_error"};
    const int sig = spec.precision;
    for (const auto& qn : spec.states) {
        for (double rc : spec.rc_values) {
            Confinement conf{spec.Z, rc};
            RadialSolution rs;
            try {
                rs = conf.is_free() ? fha_radial(qn, spec.Z) : solve_state(qn, conf);
            } catch (const Error& e) {
                throw Error(e.kind(), item_label({qn, conf}) + ": " + e.what());
            }
            double norm = 0.0;
            for (std::size_t i = 0; i < rs.grid.size(); ++i) {
                double u = rs.values[i] * rs.grid[i];
                norm += rs.weights[i] * u * u;
            }
            t.rows.push_back({state_label(qn), io::format_fixed(spec.Z, sig), io::format_rc(rc, sig),
                              io::format_fixed(rs.energy, sig), std::to_string(rs.node_count),
                              io::format_fixed(rs.norm_constant, sig), io::format_fixed(std::abs(norm - 1.0), 3)});
        }
    }
    emit(spec, t, out);
    return 0;
}

inline int run_entropy(const RunSpec& spec, std::ostream& out) {
    emit(spec, measures_table(measures_or_throw(grid_items(spec, spec.rc_values), spec), spec.precision), out);
    return 0;
}

inline int run_fha(const RunSpec& spec, std::ostream& out) {
    std::vector<double> free{std::numeric_limits<double>::infinity()};
    emit(spec, measures_table(measures_or_throw(grid_items(spec, free), spec), spec.precision), out);
    return 0;
}

// Confined values beside their free-atom references and the ratios between them.
inline int run_scan(const RunSpec& spec, std::ostream& out) {
    std::vector<double> free{std::numeric_limits<double>::infinity()};
    auto refs = measures_or_throw(grid_items(spec, free), spec);
    auto confined = measures_or_throw(grid_items(spec, spec.rc_values), spec);
    const int sig = spec.precision;
    const char* cols[] = {"R_r", "R_p", "S_r", "S_p"};
    io::Table t;
    t.header = {"state", "Z", "rc"};
    for (auto c : cols) t.header.push_back(c);
    for (auto c : cols) t.header.push_back(std::string(c) + "_fha");
    for (auto c : cols) t.header.push_back(std::string(c) + "_ratio");
    for (std::size_t i = 0; i < confined.size(); ++i) {
        const auto& m = confined[i];
        const auto& ref = refs[i / spec.rc_values.size()];
        std::vector<std::string> row{state_label(m.qn), io::format_fixed(m.Z, sig), io::format_rc(m.rc, sig)};
        for (auto c : cols) row.push_back(io::format_fixed(measure_value(m, c), sig));
        for (auto c : cols) row.push_back(io::format_fixed(measure_value(ref, c), sig));
        for (auto c : cols) row.push_back(io::format_fixed(measure_value(m, c) / measure_value(ref, c), sig));
        t.rows.push_back(std::move(row));
    }
    emit(spec, t, out);
    return 0;
}

inline int run_table(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    auto golden = load_golden(spec.golden_dir, spec.table_id);
    std::set<std::string> state_filter;
    for (const auto& qn : spec.states) state_filter.insert(state_label(qn));
    std::set<double> rc_filter(spec.rc_values.begin(), spec.rc_values.end());

    std::vector<const GoldenRow*> rows;
    for (const auto& r : golden.rows) {
        if (!state_filter.empty() && !state_filter.count(r.state)) continue;
        if (!rc_filter.empty() && !rc_filter.count(r.rc)) continue;
        rows.push_back(&r);
    }

    // one computation per (state, rc)
    std::map<std::pair<std::string, double>, std::size_t> index;
    std::vector<WorkItem> items;
    for (const auto* r : rows) {
        auto key = std::make_pair(r->state, r->rc);
        if (index.count(key)) continue;
        index[key] = items.size();
        items.push_back({r->qn(), Confinement{1.0, r->rc}});
    }
    auto results = compute_batch(items, spec.orders, {}, spec.threads);

    const int sig = spec.precision;
    io::Table t;
    t.header = {"table", "state", "rc", "column", "source", "expected", "computed", "delta", "tolerance", "tol_kind",
                "status"};
    int failed = 0, passed = 0, excluded = 0, errors = 0;
    ErrorKind first_error = ErrorKind::convergence;
    std::ostringstream failures;
    for (const auto* r : rows) {
        const auto& res = results[index.at({r->state, r->rc})];
        std::string computed = "", delta = "", status;
        if (res.error) {
            status = "error";
            if (!r->excluded && errors++ == 0) first_error = *res.error;
            if (!r->excluded)
                failures << "error table=" << r->table << " row=" << r->state << "@" << r->rc_text
                         << " column=" << r->column << ": " << res.message << '\n';
        } else {
            double v = measure_value(*res.measures, r->column);
            computed = io::format_fixed(v, sig);
            delta = io::format_fixed(v - r->expected, 3);
            if (r->excluded) {
                status = "excluded";
                ++excluded;
            } else if (r->accepts(v)) {
                status = "pass";
                ++passed;
            } else {
                status = "fail";
                ++failed;
                failures << "fail table=" << r->table << " row=" << r->state << "@" << r->rc_text
                         << " column=" << r->column << " source=" << r->source << " delta=" << delta
                         << " tolerance=" << io::format_fixed(r->tolerance, 3) << '\n';
            }
        }
        t.rows.push_back({r->table, r->state, r->rc_text, r->column, r->source, r->expected_text, computed, delta,
                          io::format_fixed(r->tolerance, 3), r->kind == Tolerance::relative ? "rel" : "abs", status});
    }
    emit(spec, t, out);
    if (!spec.check) return 0;
    err << failures.str();
    err << "table " << spec.table_id << ": " << passed << " pass, " << failed << " fail, " << errors << " error, "
        << excluded << " excluded\n";
    if (errors) {
        err << error_record(first_error, "table " + spec.table_id + ": numerical failure in " +
                                             std::to_string(errors) + " cell(s)")
            << '\n';
        return exit_code(first_error);
    }
    if (failed) {
        err << error_record(ErrorKind::validation,
                            "table " + spec.table_id + ": " + std::to_string(failed) + " cell(s) outside tolerance")
            << '\n';
        return exit_code(ErrorKind::validation);
    }
    return 0;
}

}  // namespace detail

/// Executes one task; returns the process exit status (0, 2 or 3).
inline int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    try {
        spec.validate();
        switch (spec.task) {
            case Task::solve: return detail::run_solve(spec, out);
            case Task::entropy: return detail::run_entropy(spec, out);
            case Task::fha: return detail::run_fha(spec, out);
            case Task::scan: return detail::run_scan(spec, out);
            case Task::table: return detail::run_table(spec, out, err);
        }
    } catch (const Error& e) {
        err << error_record(e.kind(), e.what()) << '\n';
        return exit_code(e.kind());
    }
    return 0;
}

}  // namespace cha::cli
