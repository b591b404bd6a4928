#ifndef CRNLYAP_NETPARSE_HPP
#define CRNLYAP_NETPARSE_HPP

// Line-oriented `.crn` network format.
//
//   # header comment
//   S1 -> S2 ; k=1.0
//   2 S2 -> 2 S1 ; k=1          # trailing comment
//   S1 <-> S2 ; k=2, krev=3     # expands to two irreversible reactions
//   0 -> S1 ; k=0.5             # '0' is the empty complex
//   @init S1=3, S2=0            # optional initial state, unnamed species are 0
//
// Species are indexed in order of first appearance.

#include <cctype>
#include <cmath>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crnlyap/error.hpp"
#include "crnlyap/network.hpp"

namespace crnlyap {

struct SourcePos {
    std::size_t line = 0;
    std::size_t column = 0;
};

struct NetworkDocument {
    std::vector<std::string> header_comments;
    Network network;
    /// Where each reaction of `network` was declared.
    std::vector<SourcePos> positions;
    std::optional<StateVec> initial_state;
};

namespace detail {

struct ParsedTerm {
    std::string species;
    int coeff;
};

struct ParsedComplex {
    std::vector<ParsedTerm> terms;
    SourcePos pos;
};

class LineParser {
public:
    LineParser(std::string_view text, std::size_t line) : s_(text), line_(line) {}

    void skip_ws() {
        while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\r')) ++i_;
    }

    /// True at end of line or at a trailing comment.
    bool at_end() {
        skip_ws();
        return i_ >= s_.size() || s_[i_] == '#';
    }

    char peek() {
        skip_ws();
        return i_ < s_.size() ? s_[i_] : '\0';
    }

    /// Position of the next token.
    SourcePos pos() {
        skip_ws();
        return {line_, i_ + 1};
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, i_ + 1); }
    [[noreturn]] void fail_at(const std::string& msg, SourcePos p) const { throw ParseError(msg, p.line, p.column); }

    bool consume(std::string_view tok) {
        skip_ws();
        if (s_.substr(i_, tok.size()) == tok) {
            i_ += tok.size();
            return true;
        }
        return false;
    }

    static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
    static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    std::optional<std::string> ident() {
        skip_ws();
        if (i_ >= s_.size() || !ident_start(s_[i_])) return std::nullopt;
        const auto start = i_;
        while (i_ < s_.size() && ident_char(s_[i_])) ++i_;
        return std::string(s_.substr(start, i_ - start));
    }

    std::string expect_ident(const char* what) {
        auto id = ident();
        if (!id) fail(std::string("expected ") + what);
        return *id;
    }

    /// Decimal or scientific literal as binary64.
    double number(const char* what) {
        skip_ws();
        const auto start = i_;
        auto is_num = [&](std::size_t k) {
            const char c = s_[k];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E') return true;
            if (c == '+' || c == '-') return k == start || s_[k - 1] == 'e' || s_[k - 1] == 'E';
            return false;
        };
        while (i_ < s_.size() && is_num(i_)) ++i_;
        if (i_ == start) fail(std::string("expected number for ") + what);
        const std::string_view lit = s_.substr(start, i_ - start);
        const char* first = lit.data();
        if (*first == '+') ++first;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(first, lit.data() + lit.size(), v);
        if (ec != std::errc() || ptr != lit.data() + lit.size())
            fail_at("malformed number '" + std::string(lit) + "'", {line_, start + 1});
        return v;
    }

    ParsedComplex complex() {
        ParsedComplex c;
        skip_ws();
        c.pos = pos();
        // '0' standing alone is the empty complex.
        if (i_ < s_.size() && s_[i_] == '0') {
            auto k = i_ + 1;
            while (k < s_.size() && (s_[k] == ' ' || s_[k] == '\t')) ++k;
            if (k >= s_.size() || !(ident_start(s_[k]) || std::isdigit(static_cast<unsigned char>(s_[k])))) {
                i_ += 1;
                return c;
            }
        }
        for (;;) {
            skip_ws();
            const auto term_pos = pos();
            int coeff = 1;
            if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
                const auto start = i_;
                while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
                auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + i_, coeff);
                if (ec != std::errc()) fail_at("coefficient out of range", term_pos);
                if (coeff == 0) fail_at("stoichiometric coefficient must be positive", term_pos);
            }
            skip_ws();
            if (i_ >= s_.size() || !ident_start(s_[i_])) {
                if (i_ < s_.size() && s_[i_] != '#') fail("unexpected token '" + std::string(1, s_[i_]) + "', expected species name");
                fail("expected species name");
            }
            c.terms.push_back({*ident(), coeff});
            if (!consume("+")) break;
        }
        return c;
    }

private:
    std::string_view s_;
    std::size_t line_;
    std::size_t i_ = 0;
};

inline std::size_t species_index(std::vector<std::string>& names, const std::string& name) {
    for (std::size_t j = 0; j < names.size(); ++j)
        if (names[j] == name) return j;
    names.push_back(name);
    return names.size() - 1;
}

}  // namespace detail

/// Parses `.crn` text. Throws ParseError carrying the 1-based line and column of
/// the offending token.
inline NetworkDocument parse_network(std::string_view text) {
    struct PendingReaction {
        detail::ParsedComplex lhs, rhs;
        double k;
        SourcePos pos;
    };
    struct PendingInit {
        std::string species;
        double value;
        SourcePos pos;
    };

    NetworkDocument doc;
    std::vector<std::string> names;
    std::vector<PendingReaction> pending;
    std::vector<PendingInit> init;
    bool has_init = false;
    bool in_header = true;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(start, end - start);
        ++line_no;
        start = end + 1;

        detail::LineParser p(line, line_no);
        if (p.at_end()) {
            const auto hash = line.find('#');
            if (hash != std::string_view::npos && in_header) {
                auto body = line.substr(hash + 1);
                if (!body.empty() && body.back() == '\r') body.remove_suffix(1);
                doc.header_comments.emplace_back(body);
            }
            if (end == text.size()) break;
            continue;
        }
        in_header = false;

        if (p.peek() == '@') {
            const auto dpos = p.pos();
            p.consume("@");
            const auto name = p.ident();
            if (!name || *name != "init") p.fail_at("unknown directive", dpos);
            if (has_init) p.fail_at("duplicate @init directive", dpos);
            has_init = true;
            do {
                const auto spos = p.pos();
                auto sp = p.expect_ident("species name");
                if (!p.consume("=")) p.fail("expected '=' after species name");
                const double v = p.number("initial value");
                if (!(v >= 0.0)) p.fail_at("initial value must be nonnegative", spos);
                init.push_back({std::move(sp), v, spos});
            } while (p.consume(","));
            if (!p.at_end()) p.fail("unexpected token after @init values");
            if (end == text.size()) break;
            continue;
        }

        PendingReaction r;
        r.pos = p.pos();
        r.lhs = p.complex();
        bool reversible = false;
        if (p.consume("<->")) {
            reversible = true;
        } else if (!p.consume("->")) {
            if (p.at_end()) p.fail("expected '->' or '<->'");
            p.fail("unexpected token, expected '->' or '<->'");
        }
        r.rhs = p.complex();
        if (!p.consume(";")) {
            if (p.at_end()) p.fail("missing rate: expected '; k=<number>'");
            p.fail("unexpected token, expected ';'");
        }
        const auto kpos = p.pos();
        const auto key = p.ident();
        if (!key) p.fail("missing rate: expected 'k=<number>'");
        if (*key != "k") p.fail_at("unknown rate key '" + *key + "', expected 'k'", kpos);
        if (!p.consume("=")) p.fail("expected '=' after 'k'");
        const auto vpos = p.pos();
        r.k = p.number("rate");
        if (!(r.k > 0.0) || !std::isfinite(r.k)) p.fail_at("rate constant must be positive", vpos);

        std::optional<double> krev;
        if (p.consume(",")) {
            const auto rpos = p.pos();
            const auto key2 = p.ident();
            if (!key2) p.fail("expected 'krev=<number>'");
            if (*key2 != "krev") p.fail_at("unknown rate key '" + *key2 + "'", rpos);
            if (!reversible) p.fail_at("'krev' is only valid for reversible reactions ('<->')", rpos);
            if (!p.consume("=")) p.fail("expected '=' after 'krev'");
            const auto v2pos = p.pos();
            krev = p.number("reverse rate");
            if (!(*krev > 0.0) || !std::isfinite(*krev)) p.fail_at("rate constant must be positive", v2pos);
        }
        if (reversible && !krev) p.fail("missing rate: reversible reaction needs ', krev=<number>'");
        if (!p.at_end()) p.fail("unexpected token after rate");

        if (r.lhs.terms.empty() && r.rhs.terms.empty()) p.fail_at("both sides are the zero complex", r.pos);
        for (const auto& t : r.lhs.terms) detail::species_index(names, t.species);
        for (const auto& t : r.rhs.terms) detail::species_index(names, t.species);

        if (reversible) {
            PendingReaction back{r.rhs, r.lhs, *krev, r.pos};
            pending.push_back(std::move(r));
            pending.push_back(std::move(back));
        } else {
            pending.push_back(std::move(r));
        }
        if (end == text.size()) break;
    }

    if (pending.empty()) throw ParseError("document declares no reactions", line_no, 1);

    const auto n = names.size();
    auto to_complex = [&](const detail::ParsedComplex& pc) {
        Complex c{std::vector<int>(n, 0)};
        for (const auto& t : pc.terms) c.coeffs[detail::species_index(names, t.species)] += t.coeff;
        return c;
    };
    std::vector<Reaction> reactions;
    for (const auto& pr : pending) {
        Reaction rx{to_complex(pr.lhs), to_complex(pr.rhs), pr.k};
        if (rx.reactant == rx.product) throw ParseError("reactant and product complexes are identical", pr.pos.line, pr.pos.column);
        reactions.push_back(std::move(rx));
        doc.positions.push_back(pr.pos);
    }
    if (has_init) {
        StateVec x0(n, 0.0);
        for (const auto& in : init) {
            bool known = false;
            for (std::size_t j = 0; j < n; ++j)
                if (names[j] == in.species) {
                    x0[j] = in.value;
                    known = true;
                }
            if (!known) throw ParseError("unknown species '" + in.species + "' in @init", in.pos.line, in.pos.column);
        }
        doc.initial_state = std::move(x0);
    }
    doc.network = Network(std::move(names), std::move(reactions));
    return doc;
}

/// Reads and parses a `.crn` file. Unreadable files raise Error.
inline NetworkDocument read_network_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_network(ss.str());
}

/// Shortest decimal string that reads back to the same binary64.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

namespace detail {

inline std::string format_complex(const Complex& c, const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (c[j] == 0) continue;
        if (!out.empty()) out += " + ";
        if (c[j] != 1) out += std::to_string(c[j]) + " ";
        out += names[j];
    }
    return out.empty() ? "0" : out;
}

}  // namespace detail

/// Canonical text: header comments, one irreversible reaction per line, then @init.
inline std::string serialize_network(const NetworkDocument& doc) {
    std::string out;
    for (const auto& h : doc.header_comments) out += "#" + h + "\n";
    const auto& names = doc.network.species_names();
    for (const auto& r : doc.network.reactions()) {
        out += detail::format_complex(r.reactant, names);
        out += " -> ";
        out += detail::format_complex(r.product, names);
        out += " ; k=" + format_double(r.rate_const) + "\n";
    }
    if (doc.initial_state) {
        out += "@init ";
        for (std::size_t j = 0; j < names.size(); ++j) {
            if (j) out += ", ";
            out += names[j] + "=" + format_double((*doc.initial_state)[j]);
        }
        out += "\n";
    }
    return out;
}

inline std::string serialize_network(const Network& net) {
    NetworkDocument doc;
    doc.network = net;
    return serialize_network(doc);
}

}  // namespace crnlyap

#endif  // CRNLYAP_NETPARSE_HPP
