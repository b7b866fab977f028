#include "mmwoz/hash.hpp"
#include "mmwoz/text.hpp"
#include "mmwoz/types.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace mmwoz {

std::string_view to_string(Domain d) {
    switch (d) {
        case Domain::restaurant: return "restaurant";
        case Domain::hotel: return "hotel";
        case Domain::attraction: return "attraction";
        case Domain::train: return "train";
        case Domain::taxi: return "taxi";
    }
    return "?";
}

std::optional<Domain> parse_domain(std::string_view name) {
    const std::string n = text::lower(name);
    for (Domain d : kAllDomains) {
        if (to_string(d) == n) return d;
    }
    return std::nullopt;
}

std::string format_bbox(const BBox& b) {
    return "(" + std::to_string(b.x1) + ", " + std::to_string(b.y1) + ", " + std::to_string(b.x2) + ", " +
           std::to_string(b.y2) + ")";
}

std::string_view to_string(OpKind k) { return k == OpKind::click ? "click" : "input"; }

std::optional<OpKind> parse_op_kind(std::string_view s) {
    if (s == "click") return OpKind::click;
    if (s == "input") return OpKind::input;
    return std::nullopt;
}

std::string_view to_string(ElementKind k) {
    return k == ElementKind::interactive ? "interactive" : "noninteractive";
}

std::string_view to_string(ElementRole r) {
    switch (r) {
        case ElementRole::header: return "header";
        case ElementRole::menu_item: return "menu_item";
        case ElementRole::title: return "title";
        case ElementRole::label: return "label";
        case ElementRole::text_field: return "text_field";
        case ElementRole::checkbox: return "checkbox";
        case ElementRole::button: return "button";
        case ElementRole::result_row: return "result_row";
        case ElementRole::count: return "count";
        case ElementRole::info: return "info";
        case ElementRole::outcome: return "outcome";
        case ElementRole::message: return "message";
    }
    return "?";
}

// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t StableHasher::digest() const { return splitmix64(state_); }

std::string to_hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t parse_hex64(std::string_view s) {
    if (s.empty() || s.size() > 16) throw std::invalid_argument("bad hex digest");
    std::uint64_t v = 0;
    for (char c : s) {
        v <<= 4;
        if (c >= '0' && c <= '9') v |= static_cast<std::uint64_t>(c - '0');
        else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint64_t>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F') v |= static_cast<std::uint64_t>(c - 'A' + 10);
        else throw std::invalid_argument("bad hex digest");
    }
    return v;
}

std::string to_base36(std::uint64_t v) {
    static constexpr char kDigits[] = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    if (v == 0) return "0";
    std::string out;
    while (v != 0) {
        out.push_back(kDigits[v % 36]);
        v /= 36;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------

namespace text {

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string trim(std::string_view s) {
    auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split_whitespace(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string normalize_value(std::string_view s) { return join(split_whitespace(lower(s)), " "); }

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

std::string normalize_time(std::string_view raw) {
    const std::string s = trim(raw);
    const auto colon = s.find(':');
    if (colon == std::string::npos || colon == 0 || colon > 2 || s.size() - colon != 3) return {};
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i != colon && !std::isdigit(static_cast<unsigned char>(s[i]))) return {};
    }
    const int hh = std::stoi(s.substr(0, colon));
    const int mm = std::stoi(s.substr(colon + 1));
    if (hh > 24 || mm > 59) return {};
    return (colon == 1 ? "0" : "") + s;
}

std::string normalize_for_match(std::string_view s) {
    std::vector<std::string> tokens;
    for (auto& tok : split_whitespace(lower(s))) {
        std::size_t b = 0;
        std::size_t e = tok.size();
        while (b < e && std::ispunct(static_cast<unsigned char>(tok[b]))) ++b;
        while (e > b && std::ispunct(static_cast<unsigned char>(tok[e - 1]))) --e;
        if (e > b) tokens.push_back(tok.substr(b, e - b));
    }
    return join(tokens, " ");
}

std::string id_component(std::string_view s) {
    std::string out = normalize_value(s);
    for (char& c : out) {
        if (c == ' ' || c == '.') c = '_';
    }
    return out;
}

}  // namespace text
}  // namespace mmwoz
