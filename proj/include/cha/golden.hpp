#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "cha/entropy.hpp"
#include "cha/errors.hpp"
#include "cha/io.hpp"

namespace cha {

inline constexpr std::string_view kGoldenTables[] = {"I", "II", "III", "IV", "V", "VI", "VII", "VIII"};

enum class Tolerance { absolute, relative };

struct GoldenRow {
    std::string table;
    std::string state;
    std::string rc_text;
    double rc = 0.0;
    std::string column;
    std::string expected_text;
    double expected = 0.0;
    double tolerance = 0.0;
    Tolerance kind = Tolerance::absolute;
    std::string source;  // table, literature or fha
    bool excluded = false;
    std::string note;

    QuantumNumbers qn() const { return io::parse_state(state); }

    bool accepts(double computed) const {
        double delta = std::abs(computed - expected);
        double bound = kind == Tolerance::relative ? tolerance * std::abs(expected) : tolerance;
        return std::isfinite(computed) && delta <= bound;
    }
};

struct GoldenTable {
    std::string id;
    std::vector<GoldenRow> rows;
};

inline std::string golden_default_dir() {
#ifdef CHA_GOLDEN_DIR
    return CHA_GOLDEN_DIR;
#else
    return "data/golden";
#endif
}

inline void validate_table_id(const std::string& id) {
    for (auto t : kGoldenTables)
        if (t == id) return;
    if (id.size() == 2 && id[0] == 'S' && id[1] >= '1' && id[1] <= '4')
        throw ValidationError("table " + id + ": supplementary tables are not distributed with the golden data");
    throw ValidationError("unknown table id '" + id + "' (expected I..VIII)");
}

inline GoldenTable parse_golden(std::istream& in, const std::string& id) {
    auto csv = io::read_csv(in);
    const auto c_table = csv.column("table"), c_state = csv.column("state"), c_rc = csv.column("rc"),
               c_col = csv.column("column"), c_exp = csv.column("expected"), c_tol = csv.column("tolerance"),
               c_kind = csv.column("tol_kind"), c_src = csv.column("source"), c_status = csv.column("status"),
               c_note = csv.column("note");
    GoldenTable out{id, {}};
    for (const auto& r : csv.rows) {
        GoldenRow g;
        g.table = r[c_table];
        g.state = r[c_state];
        g.rc_text = r[c_rc];
        g.rc = io::parse_double(r[c_rc]);
        g.column = r[c_col];
        g.expected_text = r[c_exp];
        g.expected = io::parse_double(r[c_exp]);
        g.tolerance = io::parse_double(r[c_tol]);
        if (r[c_kind] == "abs") g.kind = Tolerance::absolute;
        else if (r[c_kind] == "rel") g.kind = Tolerance::relative;
        else throw ValidationError("golden row: tol_kind must be abs or rel");
        g.source = r[c_src];
        if (r[c_status] == "excluded") g.excluded = true;
        else if (r[c_status] != "check") throw ValidationError("golden row: status must be check or excluded");
        g.note = r[c_note];
        if (!(g.tolerance > 0.0)) throw ValidationError("golden row without a positive tolerance");
        if (g.table != id) throw ValidationError("golden row for table " + g.table + " in file for table " + id);
        out.rows.push_back(std::move(g));
    }
    return out;
}

inline GoldenTable load_golden(const std::string& dir, const std::string& id) {
    validate_table_id(id);
    std::string path = dir + "/table_" + id + ".csv";
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open golden file '" + path + "'");
    return parse_golden(in, id);
}

/// Column lookup by the names used in the golden files.
inline double measure_value(const InfoMeasures& m, std::string_view column) {
    struct Entry {
        std::string_view name;
        double InfoMeasures::*field;
    };
    static constexpr Entry entries[] = {
        {"R_r", &InfoMeasures::R_r}, {"R_p", &InfoMeasures::R_p}, {"R_t", &InfoMeasures::R_t},
        {"T_r", &InfoMeasures::T_r}, {"T_p", &InfoMeasures::T_p}, {"T_t", &InfoMeasures::T_t},
        {"S_r", &InfoMeasures::S_r}, {"S_p", &InfoMeasures::S_p}, {"S_t", &InfoMeasures::S_t},
        {"E_r", &InfoMeasures::E_r}, {"E_p", &InfoMeasures::E_p}, {"E_t", &InfoMeasures::E_t},
    };
    for (const auto& e : entries)
        if (e.name == column) return m.*e.field;
    throw ValidationError("unknown measure column '" + std::string(column) + "'");
}

}  // namespace cha
