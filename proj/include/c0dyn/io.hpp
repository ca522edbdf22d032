#pragma once

#include <charconv>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "c0dyn/base_models.hpp"
#include "c0dyn/product_space.hpp"
#include "c0dyn/rational.hpp"
#include "c0dyn/schedule.hpp"

// Text literals for base sets and rectangles:
//
//   cyl 0:1 1:0 | 3:1        clauses joined by '|', coordinate:bit pairs
//   cyl full / cyl empty
//   arc 0/1 1/4; 1/2 5/8     lo hi pairs joined by ';'
//   arc empty
//   maj 3 / maj 3 @ -2       window index, optional offset
//   rect head=[maj 1; cyl 2:1] tail=schedule(2) @ 1
//   rect head=[] tail=half(cyl 0:1)
//
// Head factor literals are cyl or maj ('; ' separates factors, so arc
// literals only appear as half-tail designates or standalone sets).
// Serialization emits canonical forms, so parse(to_string(x)) == x for
// canonical x; half tails fold their shift into the designated set.

namespace c0dyn::io {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

inline std::vector<std::string_view> words(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

inline std::int64_t parse_int(std::string_view s, const char* what) {
    std::int64_t value = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc{} || ptr != end)
        throw std::invalid_argument(std::string(what) + ": bad integer '" + std::string(s) + "'");
    return value;
}

}  // namespace detail

inline std::string to_string(const Rational& r) { return r.str(); }

inline std::string to_string(const MeasureValue& v) {
    if (v.is_exact()) return v.value().str();
    return "[" + v.lower().str() + ", " + v.upper().str() + "]";
}

inline std::string to_string(const BaseSet& s) {
    if (s.is_cylinder()) {
        const auto& c = s.as_cylinder();
        if (c.is_empty()) return "cyl empty";
        if (c.is_full()) return "cyl full";
        std::string out = "cyl ";
        bool first_clause = true;
        for (auto mask : c.clauses()) {
            if (!first_clause) out += " | ";
            first_clause = false;
            for (std::size_t i = 0; i < c.support().size(); ++i) {
                if (i) out += ' ';
                out += std::to_string(c.support()[i]);
                out += (mask >> i) & 1 ? ":1" : ":0";
            }
        }
        return out;
    }
    if (s.is_arc()) {
        const auto& a = s.as_arc();
        if (a.is_empty()) return "arc empty";
        std::string out = "arc ";
        bool first = true;
        for (const auto& piece : a.arcs()) {
            if (!first) out += "; ";
            first = false;
            out += piece.lo.str() + " " + piece.hi.str();
        }
        return out;
    }
    const auto& m = s.as_majority();
    std::string out = "maj " + std::to_string(m.n);
    if (m.offset != 0) out += " @ " + std::to_string(m.offset);
    return out;
}

inline BaseSet parse_base_set(std::string_view text) {
    const auto s = detail::trim(text);
    const auto space = s.find(' ');
    const auto kind = s.substr(0, space);
    const auto rest = space == std::string_view::npos ? std::string_view{}
                                                      : detail::trim(s.substr(space + 1));
    if (kind == "cyl") {
        if (rest == "empty") return BaseSet(CylinderUnion::empty());
        if (rest == "full") return BaseSet(CylinderUnion::full());
        if (rest.empty()) throw std::invalid_argument("parse_base_set: empty cyl literal");
        BaseSet acc{CylinderUnion::empty()};
        for (auto clause : detail::split(rest, '|')) {
            BaseSet piece{CylinderUnion::full()};
            const auto pairs = detail::words(clause);
            if (pairs.empty())
                throw std::invalid_argument("parse_base_set: empty cyl clause");
            for (auto pair : pairs) {
                const auto colon = pair.find(':');
                if (colon == std::string_view::npos)
                    throw std::invalid_argument("parse_base_set: expected coord:bit, got '" +
                                                std::string(pair) + "'");
                const auto coord = detail::parse_int(pair.substr(0, colon), "parse_base_set");
                const auto bit = pair.substr(colon + 1);
                if (bit != "0" && bit != "1")
                    throw std::invalid_argument("parse_base_set: bit must be 0 or 1 in '" +
                                                std::string(pair) + "'");
                piece = boolean(BoolOp::intersect, piece,
                                BaseSet(CylinderUnion::single(coord, bit == "1")));
            }
            acc = boolean(BoolOp::unite, acc, piece);
        }
        return acc;
    }
    if (kind == "arc") {
        if (rest == "empty") return BaseSet(ArcUnion::empty());
        if (rest.empty()) throw std::invalid_argument("parse_base_set: empty arc literal");
        std::vector<Arc> arcs;
        for (auto piece : detail::split(rest, ';')) {
            const auto ends = detail::words(piece);
            if (ends.size() != 2)
                throw std::invalid_argument("parse_base_set: arc piece needs 'lo hi', got '" +
                                            std::string(piece) + "'");
            arcs.push_back({Rational::parse(ends[0]), Rational::parse(ends[1])});
        }
        return BaseSet(ArcUnion(std::move(arcs)));
    }
    if (kind == "maj") {
        const auto parts = detail::words(rest);
        if (parts.size() == 1) return BaseSet(MajoritySet(detail::parse_int(parts[0], "maj")));
        if (parts.size() == 3 && parts[1] == "@")
            return BaseSet(MajoritySet(detail::parse_int(parts[0], "maj"),
                                       detail::parse_int(parts[2], "maj")));
        throw std::invalid_argument("parse_base_set: maj literal needs 'n' or 'n @ d'");
    }
    throw std::invalid_argument("parse_base_set: unknown set kind '" + std::string(s) + "'");
}

inline std::string to_string(const Rectangle& r) {
    std::string out = "rect head=[";
    for (std::int64_t k = 1; k <= r.head_size(); ++k) {
        if (k > 1) out += "; ";
        out += to_string(r.factor(k));
    }
    out += "] tail=";
    const auto& tail = r.tail();
    if (tail.is_half()) {
        out += "half(" + to_string(act(tail.shift(), tail.designated())) + ")";
    } else {
        out += "schedule(" + std::to_string(tail.witness_index()) + ")";
        if (tail.shift().shift_amount() != 0)
            out += " @ " + std::to_string(tail.shift().shift_amount());
    }
    return out;
}

inline Rectangle parse_rectangle(std::string_view text,
                                 std::shared_ptr<const WitnessSchedule> sched = nullptr) {
    auto bad = [&](const char* why) {
        return std::invalid_argument(std::string("parse_rectangle: ") + why + " in '" +
                                     std::string(text) + "'");
    };
    auto s = detail::trim(text);
    if (!s.starts_with("rect")) throw bad("missing 'rect' prefix");
    s = detail::trim(s.substr(4));
    if (!s.starts_with("head=[")) throw bad("missing 'head=['");
    s.remove_prefix(6);
    const auto close = s.find(']');
    if (close == std::string_view::npos) throw bad("unterminated head list");
    const auto head_body = detail::trim(s.substr(0, close));
    std::vector<BaseSet> head;
    if (!head_body.empty())
        for (auto item : detail::split(head_body, ';')) head.push_back(parse_base_set(item));

    auto rest = detail::trim(s.substr(close + 1));
    if (!rest.starts_with("tail=")) throw bad("missing 'tail='");
    rest.remove_prefix(5);
    std::int64_t shift = 0;
    if (const auto at = rest.rfind('@'); at != std::string_view::npos &&
                                         rest.find(')', at) == std::string_view::npos) {
        shift = detail::parse_int(detail::trim(rest.substr(at + 1)), "parse_rectangle");
        rest = detail::trim(rest.substr(0, at));
    }
    TailContext tail = [&] {
        if (rest.starts_with("half(") && rest.ends_with(")"))
            return TailContext::half(parse_base_set(rest.substr(5, rest.size() - 6)));
        if (rest.starts_with("schedule(") && rest.ends_with(")")) {
            if (!sched) throw bad("schedule literal needs a built schedule");
            return TailContext::schedule(sched,
                                         detail::parse_int(rest.substr(9, rest.size() - 10),
                                                           "parse_rectangle"));
        }
        throw bad("tail must be half(<set>) or schedule(<m>)");
    }();
    if (shift != 0) tail = tail.shifted(GroupElement::shift(shift));
    return Rectangle(std::move(head), std::move(tail));
}

}  // namespace c0dyn::io
