#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "cha/entropy.hpp"
#include "cha/errors.hpp"
#include "cha/solver.hpp"

namespace cha::io {

inline std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

/// Locale-independent number parsing; "inf" is accepted.
inline double parse_double(std::string_view text) {
    std::string s = trim(text);
    if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw ValidationError("not a number: '" + s + "'");
    return v;
}

inline int parse_int(std::string_view text) {
    std::string s = trim(text);
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw ValidationError("not an integer: '" + s + "'");
    return v;
}

inline int letter_to_l(char c) {
    static constexpr std::string_view letters = "spdfghiklmnoqrtuvwxyz";
    auto pos = letters.find(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (pos == std::string_view::npos) throw ValidationError(std::string("unknown orbital letter '") + c + "'");
    return static_cast<int>(pos);
}

/// "2p" -> (2, 1, 0).
inline QuantumNumbers parse_state(std::string_view text) {
    std::string s = trim(text);
    if (s.size() < 2) throw ValidationError("bad state label '" + s + "'");
    QuantumNumbers qn;
    qn.n = parse_int(std::string_view(s).substr(0, s.size() - 1));
    qn.l = letter_to_l(s.back());
    qn.validate();
    return qn;
}

/// Comma-separated labels and ranges: "2p", "2p,3d", "10s..10m", "2p..5g".
inline std::vector<QuantumNumbers> parse_states(std::string_view text) {
    std::vector<QuantumNumbers> out;
    for (const auto& item : split(text, ',')) {
        auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(parse_state(item));
            continue;
        }
        auto a = parse_state(item.substr(0, dots));
        auto b = parse_state(item.substr(dots + 2));
        if (a.n == b.n && b.l >= a.l) {
            for (int l = a.l; l <= b.l; ++l) out.push_back({a.n, l, 0});
        } else if (b.n - a.n == b.l - a.l && b.n >= a.n) {
            for (int k = 0; k <= b.n - a.n; ++k) out.push_back({a.n + k, a.l + k, 0});
        } else {
            throw ValidationError("state range '" + item + "' must fix n or step n and l together");
        }
    }
    if (out.empty()) throw ValidationError("no states given");
    return out;
}

/// "0.1", "0.1,0.5,1", "start:stop[:count][:lin|log]"; result sorted and unique.
inline std::vector<double> parse_rc(std::string_view text) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) {
        if (item.find(':') == std::string::npos) {
            out.push_back(parse_double(item));
            continue;
        }
        auto parts = split(item, ':');
        if (parts.size() < 2 || parts.size() > 4) throw ValidationError("rc range must be start:stop[:count][:lin|log]");
        double a = parse_double(parts[0]), b = parse_double(parts[1]);
        int count = 10;
        bool log_spacing = false;
        for (std::size_t k = 2; k < parts.size(); ++k) {
            if (parts[k] == "log") log_spacing = true;
            else if (parts[k] == "lin") log_spacing = false;
            else count = parse_int(parts[k]);
        }
        if (!(a > 0.0 && b > a && std::isfinite(b))) throw ValidationError("rc range needs 0 < start < stop < inf");
        if (count < 2) throw ValidationError("rc range count must be >= 2");
        for (int i = 0; i < count; ++i) {
            double t = static_cast<double>(i) / (count - 1);
            double v = log_spacing ? a * std::pow(b / a, t) : a + (b - a) * t;
            if (i == count - 1) v = b;
            out.push_back(v);
        }
    }
    for (double v : out)
        if (!(v > 0.0)) throw ValidationError("rc values must be positive");
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Exact rational from "3/5", "0.6" or "3".
inline Rational parse_rational(std::string_view text) {
    std::string s = trim(text);
    if (auto slash = s.find('/'); slash != std::string::npos)
        return Rational(parse_int(s.substr(0, slash)), parse_int(s.substr(slash + 1)));
    bool neg = !s.empty() && s[0] == '-';
    std::string body = neg ? s.substr(1) : s;
    auto dot = body.find('.');
    std::string digits = body, frac;
    if (dot != std::string::npos) {
        digits = body.substr(0, dot);
        frac = body.substr(dot + 1);
    }
    if ((digits.empty() && frac.empty()) || frac.size() > 12 ||
        !std::all_of(digits.begin(), digits.end(), ::isdigit) || !std::all_of(frac.begin(), frac.end(), ::isdigit))
        throw ValidationError("bad order '" + s + "'");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    std::int64_t num = (digits.empty() ? 0 : std::stoll(digits)) * den + (frac.empty() ? 0 : std::stoll(frac));
    return Rational(neg ? -num : num, den);
}

/// "a" or "a,b" with 1/a + 1/b = 2.
inline EntropicOrders parse_orders(std::string_view text) {
    auto parts = split(text, ',');
    if (parts.size() == 1) return EntropicOrders(parse_rational(parts[0]));
    if (parts.size() == 2) return EntropicOrders(parse_rational(parts[0]), parse_rational(parts[1]));
    throw ValidationError("orders take one or two values");
}

/// Plain key=value file; '#' starts a comment.
inline std::map<std::string, std::string> parse_config(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError("config line " + std::to_string(lineno) + ": expected key=value");
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

inline std::map<std::string, std::string> load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    return parse_config(in);
}

/// Fixed-point text with `sig` significant digits (no exponent, no locale).
inline std::string format_fixed(double v, int sig) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    auto render = [](double x, int decimals) {
        char buf[512];
        auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, decimals);
        return std::string(buf, res.ptr);
    };
    int mag = v == 0.0 ? 0 : static_cast<int>(std::floor(std::log10(std::abs(v))));
    int decimals = std::clamp(sig - 1 - mag, 0, 340);
    std::string s = render(v, decimals);
    // rounding can carry into a new leading digit (9.99 -> 10.0); keep `sig` digits
    double back = parse_double(s);
    int mag_back = back == 0.0 ? 0 : static_cast<int>(std::floor(std::log10(std::abs(back))));
    if (mag_back > mag && decimals > 0) s = render(v, decimals - 1);
    if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) {
        if (s[0] == '-') s.erase(0, 1);
    }
    return s;
}

inline std::string format_rc(double rc, int sig) { return std::isinf(rc) ? "inf" : format_fixed(rc, sig); }

// ---- CSV

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::vector<std::string> parse_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ValidationError("missing column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    }
};

inline Table read_csv(std::istream& in) {
    Table t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = parse_csv_line(line);
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != t.header.size()) throw ValidationError("csv row has " + std::to_string(cells.size()) +
                                                                       " cells, header has " +
                                                                       std::to_string(t.header.size()));
            t.rows.push_back(std::move(cells));
        }
    }
    return t;
}

inline void write_csv(std::ostream& out, const Table& t) {
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << csv_escape(cells[i]);
        }
        out << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
}

/// Space-aligned text rendering of a table (right-aligned columns).
inline void write_text(std::ostream& out, const Table& t) {
    std::vector<std::size_t> width(t.header.size(), 0);
    for (std::size_t c = 0; c < t.header.size(); ++c) width[c] = t.header[c].size();
    for (const auto& r : t.rows)
        for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c) out << "  ";
            out << std::string(width[c] - cells[c].size(), ' ') << cells[c];
        }
        out << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
}

}  // namespace cha::io
