#pragma once

// Small helpers for the `kind:key=value,...` spec syntax shared by harmonic
// functions and test functions.

#include <algorithm>
#include <charconv>
#include <complex>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace phibose::text {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

/// Splits on `sep` outside parentheses.
inline std::vector<std::string> split_top(std::string_view s, char sep)
{
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == sep && depth == 0) {
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(trim(cur));
    return parts;
}

inline double parse_double(const std::string& s)
{
    const std::string t = trim(s);
    double v = 0.0;
    const auto* end = t.data() + t.size();
    const auto res = std::from_chars(t.data(), end, v);
    if (t.empty() || res.ec != std::errc{} || res.ptr != end) {
        throw std::invalid_argument("not a number: '" + t + "'");
    }
    return v;
}

/// Parses `x` or `(x,y)` into a list of doubles.
inline std::vector<double> parse_tuple(const std::string& s)
{
    const std::string t = trim(s);
    if (!t.empty() && t.front() == '(') {
        if (t.back() != ')') throw std::invalid_argument("unbalanced parentheses in '" + t + "'");
        std::vector<double> out;
        for (const auto& p : split_top(t.substr(1, t.size() - 2), ',')) out.push_back(parse_double(p));
        return out;
    }
    return {parse_double(t)};
}

inline std::complex<double> parse_complex(const std::string& s)
{
    const auto v = parse_tuple(s);
    if (v.size() == 1) return {v[0], 0.0};
    if (v.size() == 2) return {v[0], v[1]};
    throw std::invalid_argument("expected a real number or (re,im): '" + s + "'");
}

/// Shortest text that parses back to the same double.
inline std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_complex(std::complex<double> z)
{
    return "(" + format_double(z.real()) + "," + format_double(z.imag()) + ")";
}

inline std::string format_tuple(const std::vector<double>& v)
{
    if (v.size() == 1) return format_double(v[0]);
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_double(v[i]);
    }
    return out + ")";
}

struct KindArgs {
    std::string kind;
    std::map<std::string, std::string> args;

    bool has(const std::string& key) const { return args.count(key) != 0; }
};

/// `kind` or `kind:key=value,key=value`. Rejects keys outside `allowed`.
inline KindArgs parse_kind_args(std::string_view s, const std::vector<std::string>& allowed = {})
{
    KindArgs out;
    const std::string t = trim(s);
    const auto colon = t.find(':');
    out.kind = trim(t.substr(0, colon));
    if (out.kind.empty()) throw std::invalid_argument("empty spec");
    if (colon == std::string::npos) return out;
    const std::string rest = t.substr(colon + 1);
    if (trim(rest).empty()) return out;
    for (const auto& item : split_top(rest, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("expected key=value in '" + item + "'");
        const std::string key = trim(item.substr(0, eq));
        if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw std::invalid_argument("unknown key '" + key + "' for '" + out.kind + "'");
        }
        if (out.args.count(key)) throw std::invalid_argument("duplicate key '" + key + "'");
        out.args[key] = trim(item.substr(eq + 1));
    }
    return out;
}

}  // namespace phibose::text
