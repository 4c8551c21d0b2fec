#include "crnerg/netparse.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>

#include "crnerg/error.hpp"

namespace crnerg {
namespace {

constexpr std::string_view kEmptySet = "\xE2\x88\x85";  // U+2205

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

/// Bytes allowed in species names: anything but whitespace and the grammar's punctuation.
/// UTF-8 continuation/lead bytes pass through, so Unicode names work.
bool is_species_char(char c) {
    return !is_space(c) && c != ',' && c != '+' && c != '@' && c != '#' && c != '[' && c != ']' && c != '=' &&
           c != '\n';
}

/// Cursor over a single line with 1-based column tracking.
class LineCursor {
public:
    LineCursor(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

    void skip_space() {
        while (pos_ < line_.size() && is_space(line_[pos_])) ++pos_;
    }
    bool at_end() {
        skip_space();
        return pos_ >= line_.size();
    }
    bool consume(std::string_view tok) {
        skip_space();
        if (line_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }
    void expect(std::string_view tok, const char* what) {
        if (!consume(tok)) fail(std::string("expected ") + what);
    }
    char peek() {
        skip_space();
        return pos_ < line_.size() ? line_[pos_] : '\0';
    }
    bool starts_with(std::string_view tok) {
        skip_space();
        return line_.substr(pos_, tok.size()) == tok;
    }

    std::string identifier(const char* what) {
        skip_space();
        if (pos_ >= line_.size() || !is_ident_start(line_[pos_])) fail(std::string("expected ") + what);
        const auto start = pos_;
        while (pos_ < line_.size() && is_ident_char(line_[pos_])) ++pos_;
        return std::string(line_.substr(start, pos_ - start));
    }

    std::string species_name() {
        skip_space();
        const auto start = pos_;
        while (pos_ < line_.size() && is_species_char(line_[pos_])) {
            if (line_.substr(pos_, 2) == "->") break;
            ++pos_;
        }
        if (pos_ == start) fail("expected a species name");
        return std::string(line_.substr(start, pos_ - start));
    }

    double number(const char* what) {
        skip_space();
        const char* first = line_.data() + pos_;
        const char* last = line_.data() + line_.size();
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || !std::isfinite(v)) fail(std::string("expected ") + what);
        pos_ += static_cast<std::size_t>(ptr - first);
        return v;
    }

    std::optional<int> small_integer() {
        skip_space();
        const auto start = pos_;
        while (pos_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_]))) ++pos_;
        if (pos_ == start) return std::nullopt;
        int v = 0;
        std::from_chars(line_.data() + start, line_.data() + pos_, v);
        return v;
    }

    SourceLocation location() const { return {line_no_, pos_ + 1}; }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_no_, pos_ + 1); }

private:
    std::string_view line_;
    std::size_t line_no_;
    std::size_t pos_ = 0;
};

struct PendingReaction {
    std::vector<std::pair<std::string, int>> lhs;
    std::vector<std::pair<std::string, int>> rhs;
    std::string rate;
    SourceLocation where;
    std::vector<SourceLocation> species_where_lhs;
    std::vector<SourceLocation> species_where_rhs;
    SourceLocation rate_where;
};

void parse_complex(LineCursor& cur, std::vector<std::pair<std::string, int>>& terms,
                   std::vector<SourceLocation>& where, bool stop_at_arrow) {
    if (cur.consume("0") || cur.consume(kEmptySet)) {
        // The empty complex must stand alone.
        if (stop_at_arrow ? !cur.starts_with("->") : (cur.peek() != '@')) cur.fail("empty complex cannot be combined");
        return;
    }
    for (;;) {
        int mult = 1;
        if (auto n = cur.small_integer()) {
            if (*n <= 0) cur.fail("multiplicity must be positive");
            mult = *n;
        }
        where.push_back(cur.location());
        terms.emplace_back(cur.species_name(), mult);
        if (!cur.consume("+")) break;
    }
}

}  // namespace

NetworkDocument parse_document(std::string text) {
    NetworkDocument doc;
    doc.source = std::move(text);
    std::vector<PendingReaction> pending;

    std::size_t line_no = 0;
    std::size_t start = 0;
    const std::string_view src = doc.source;
    while (start <= src.size()) {
        auto end = src.find('\n', start);
        if (end == std::string_view::npos) end = src.size();
        ++line_no;
        auto line = src.substr(start, end - start);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        start = end + 1;

        LineCursor cur(line, line_no);
        if (cur.at_end()) continue;

        if (cur.consume("species:")) {
            while (!cur.at_end()) {
                if (cur.consume(",")) continue;
                const auto loc = cur.location();
                if (std::isdigit(static_cast<unsigned char>(cur.peek()))) cur.fail("species names cannot start with a digit");
                auto name = cur.species_name();
                if (name == "0" || name == kEmptySet) cur.fail("reserved name");
                if (doc.network.species_index(name)) throw ParseError("duplicate species '" + name + "'", loc.line, loc.column);
                doc.network.add_species(name);
                doc.species_locations.push_back(loc);
            }
        } else if (cur.starts_with("param ") || cur.starts_with("param\t")) {
            cur.consume("param");
            const auto loc = cur.location();
            RateParam p;
            p.name = cur.identifier("a parameter name");
            if (doc.network.has_param(p.name))
                throw ParseError("duplicate parameter '" + p.name + "'", loc.line, loc.column);
            if (cur.consume("=")) {
                if (cur.consume("free"))
                    p.kind = Free{};
                else
                    p.kind = Fixed{cur.number("a rate value")};
            } else if (cur.consume("in")) {
                cur.expect("[", "'['");
                const double lo = cur.number("a lower bound");
                cur.expect(",", "','");
                const double hi = cur.number("an upper bound");
                cur.expect("]", "']'");
                p.kind = Interval{lo, hi};
            } else if (cur.consume("free")) {
                p.kind = Free{};
            } else {
                cur.fail("expected '= value', 'in [lo, hi]' or 'free'");
            }
            if (!cur.at_end()) cur.fail("unexpected trailing text");
            if (const auto* f = std::get_if<Fixed>(&p.kind); f && !(f->value > 0.0))
                throw ParseError("rate must be positive", loc.line, loc.column);
            if (const auto* i = std::get_if<Interval>(&p.kind); i && !(i->lo >= 0.0 && i->lo <= i->hi && i->hi > 0.0))
                throw ParseError("interval needs 0 <= lo <= hi and hi > 0", loc.line, loc.column);
            doc.network.add_param(std::move(p));
            doc.param_locations.push_back(loc);
        } else if (cur.consume("reaction:")) {
            PendingReaction r;
            r.where = cur.location();
            parse_complex(cur, r.lhs, r.species_where_lhs, true);
            cur.expect("->", "'->'");
            parse_complex(cur, r.rhs, r.species_where_rhs, false);
            cur.expect("@", "'@' followed by a rate parameter");
            r.rate_where = cur.location();
            r.rate = cur.identifier("a rate parameter name");
            if (!cur.at_end()) cur.fail("unexpected trailing text");
            pending.push_back(std::move(r));
        } else {
            cur.fail("expected 'species:', 'param' or 'reaction:'");
        }
    }

    // Resolve names once all declarations are known.
    for (const auto& pr : pending) {
        Reaction r;
        auto resolve = [&](const std::vector<std::pair<std::string, int>>& terms,
                           const std::vector<SourceLocation>& where, Complex& out) {
            for (std::size_t i = 0; i < terms.size(); ++i) {
                auto idx = doc.network.species_index(terms[i].first);
                if (!idx) throw ParseError("unknown species '" + terms[i].first + "'", where[i].line, where[i].column);
                out.push_back({*idx, terms[i].second});
            }
        };
        resolve(pr.lhs, pr.species_where_lhs, r.reactants);
        resolve(pr.rhs, pr.species_where_rhs, r.products);
        if (!doc.network.has_param(pr.rate))
            throw ParseError("unknown parameter '" + pr.rate + "'", pr.rate_where.line, pr.rate_where.column);
        r.rate = pr.rate;
        if (r.order() > 2)
            throw ParseError("reaction of order " + std::to_string(r.order()) + " is not supported (at most 2)",
                             pr.where.line, pr.where.column);
        doc.network.add_reaction(std::move(r));
        doc.reaction_locations.push_back(pr.where);
    }
    return doc;
}

ReactionNetwork parse_network(std::string_view text) { return parse_document(std::string(text)).network; }

namespace {

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_complex(const ReactionNetwork& net, const Complex& c) {
    if (c.empty()) return "0";
    std::string out;
    for (const auto& t : c) {
        if (!out.empty()) out += " + ";
        if (t.multiplicity != 1) out += std::to_string(t.multiplicity) + " ";
        out += net.species()[t.species];
    }
    return out;
}

}  // namespace

std::string serialize_network(const ReactionNetwork& net) {
    std::string out = "species:";
    for (std::size_t i = 0; i < net.num_species(); ++i) out += (i ? ", " : " ") + net.species()[i];
    out += "\n";
    for (const auto& p : net.params()) {
        out += "param " + p.name;
        if (const auto* f = std::get_if<Fixed>(&p.kind))
            out += " = " + format_number(f->value);
        else if (const auto* i = std::get_if<Interval>(&p.kind))
            out += " in [" + format_number(i->lo) + ", " + format_number(i->hi) + "]";
        else
            out += " free";
        out += "\n";
    }
    for (const auto& r : net.reactions())
        out += "reaction: " + format_complex(net, r.reactants) + " -> " + format_complex(net, r.products) + " @ " +
               r.rate + "\n";
    return out;
}

std::string read_source(const std::string& path) {
    if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace crnerg
