#include "symq/netlist.hpp"

#include "symq/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace symq {

namespace {

struct Token {
    std::string_view text;
    int col = 0;
};

struct Problem {
    ErrorCode code;
    SourceLoc loc;
    std::string message;
};

bool loc_less(const SourceLoc& a, const SourceLoc& b) {
    return a.line != b.line ? a.line < b.line : a.col < b.col;
}

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i >= line.size()) break;
        const size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return out;
}

bool valid_name(std::string_view s) {
    if (s.empty()) return false;
    const auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    const auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(s[0])) return false;
    return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || digit(c); });
}

std::optional<double> parse_number(std::string_view s) {
    if (!s.empty() && s[0] == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{}) return std::nullopt;
    const std::string_view rest(ptr, static_cast<size_t>(s.data() + s.size() - ptr));
    if (!rest.empty()) {
        static const std::map<char, double> si{{'f', 1e-15}, {'p', 1e-12}, {'n', 1e-9}, {'u', 1e-6},
                                               {'m', 1e-3},  {'k', 1e3},   {'M', 1e6},  {'G', 1e9},
                                               {'T', 1e12}};
        if (rest.size() != 1 || !si.count(rest[0])) return std::nullopt;
        v *= si.at(rest[0]);
    }
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

class LineParser {
public:
    LineParser(int line, std::vector<Token> tokens, std::vector<Problem>& problems)
        : line_(line), tokens_(std::move(tokens)), problems_(problems) {}

    // Returns false after recording a syntax problem.
    bool parse(Netlist& out) {
        const Token& kind = tokens_[0];
        try {
            if (kind.text == "C") parse_capacitor(out);
            else if (kind.text == "L") parse_inductor(out);
            else if (kind.text == "GYR") parse_gyrator(out);
            else if (kind.text == "CIRC") parse_circulator(out);
            else if (kind.text == "TR") parse_transformer(out);
            else if (kind.text == "JJ") out.josephson.push_back(parse_junction());
            else if (kind.text == "PS") out.phase_slips.push_back(parse_junction());
            else fail(kind.col, "unknown element kind '" + std::string(kind.text) + "'");
        } catch (const Problem& p) {
            problems_.push_back(p);
            return false;
        }
        return true;
    }

private:
    [[noreturn]] void fail(int col, std::string message) const {
        throw Problem{ErrorCode::SyntaxError, {line_, col}, std::move(message)};
    }

    SourceLoc loc(int col) const { return {line_, col}; }

    const Token& expect(size_t index, const char* what) const {
        if (index >= tokens_.size()) {
            const Token& last = tokens_.back();
            fail(last.col + static_cast<int>(last.text.size()), std::string("expected ") + what);
        }
        return tokens_[index];
    }

    std::string name_at(size_t index) const {
        const Token& t = expect(index, "a name");
        if (!valid_name(t.text)) fail(t.col, "invalid name '" + std::string(t.text) + "'");
        return std::string(t.text);
    }

    double number(std::string_view text, int col) const {
        const auto v = parse_number(text);
        if (!v) fail(col, "expected a number, found '" + std::string(text) + "'");
        return *v;
    }

    double number_at(size_t index) const {
        const Token& t = expect(index, "a number");
        return number(t.text, t.col);
    }

    Incidence incidence(std::string_view text, int col) const {
        const size_t colon = text.find(':');
        if (colon == std::string_view::npos)
            fail(col, "expected <name>:<coefficient>, found '" + std::string(text) + "'");
        const std::string_view name = text.substr(0, colon);
        const std::string_view coef = text.substr(colon + 1);
        if (!valid_name(name)) fail(col, "invalid name '" + std::string(name) + "'");
        Incidence inc{std::string(name), 1.0, loc(col)};
        const int ccol = col + static_cast<int>(colon) + 1;
        if (coef == "+") inc.coefficient = 1.0;
        else if (coef == "-") inc.coefficient = -1.0;
        else inc.coefficient = number(coef, ccol);
        return inc;
    }

    void no_more(size_t index) const {
        if (index < tokens_.size())
            fail(tokens_[index].col, "unexpected token '" + std::string(tokens_[index].text) + "'");
    }

    void parse_capacitor(Netlist& out) {
        Capacitor c{name_at(1), number_at(2), loc(tokens_[0].col)};
        no_more(3);
        out.capacitors.push_back(std::move(c));
    }

    void parse_inductor(Netlist& out) {
        Inductor l{name_at(1), number_at(2), {}, loc(tokens_[0].col)};
        for (size_t i = 3; i < tokens_.size(); ++i)
            l.incidences.push_back(incidence(tokens_[i].text, tokens_[i].col));
        out.inductors.push_back(std::move(l));
    }

    std::vector<Incidence> port_names(size_t from, std::optional<std::vector<double>>* s) const {
        std::vector<Incidence> ports;
        for (size_t i = from; i < tokens_.size(); ++i) {
            const Token& t = tokens_[i];
            if (s && t.text.starts_with("s=")) {
                *s = number_list(t.text.substr(2), t.col + 2, ',');
                continue;
            }
            if (!valid_name(t.text)) fail(t.col, "invalid port name '" + std::string(t.text) + "'");
            ports.push_back({std::string(t.text), 1.0, loc(t.col)});
        }
        return ports;
    }

    std::vector<double> number_list(std::string_view text, int col, char sep) const {
        std::vector<double> out;
        size_t start = 0;
        while (true) {
            const size_t end = text.find(sep, start);
            const std::string_view piece = text.substr(start, end == std::string_view::npos ? end : end - start);
            out.push_back(number(piece, col + static_cast<int>(start)));
            if (end == std::string_view::npos) break;
            start = end + 1;
        }
        return out;
    }

    void parse_gyrator(Netlist& out) {
        Gyrator g{name_at(1), number_at(2), {}, loc(tokens_[0].col)};
        g.ports = port_names(3, nullptr);
        out.gyrators.push_back(std::move(g));
    }

    void parse_circulator(Netlist& out) {
        Circulator c{name_at(1), number_at(2), {}, std::nullopt, loc(tokens_[0].col)};
        c.ports = port_names(3, &c.s);
        out.circulators.push_back(std::move(c));
    }

    std::vector<std::vector<Incidence>> port_list(std::string_view text, int col) const {
        std::vector<std::vector<Incidence>> ports;
        size_t start = 0;
        while (true) {
            const size_t end = text.find(';', start);
            const std::string_view port = text.substr(start, end == std::string_view::npos ? end : end - start);
            std::vector<Incidence> terms;
            size_t p = 0;
            while (true) {
                const size_t comma = port.find(',', p);
                const std::string_view term = port.substr(p, comma == std::string_view::npos ? comma : comma - p);
                terms.push_back(incidence(term, col + static_cast<int>(start + p)));
                if (comma == std::string_view::npos) break;
                p = comma + 1;
            }
            ports.push_back(std::move(terms));
            if (end == std::string_view::npos) break;
            start = end + 1;
        }
        return ports;
    }

    void parse_transformer(Netlist& out) {
        Transformer tr{name_at(1), {}, {}, {}, loc(tokens_[0].col)};
        bool has_left = false, has_right = false, has_turns = false;
        for (size_t i = 2; i < tokens_.size(); ++i) {
            const Token& t = tokens_[i];
            if (t.text.starts_with("left=")) {
                tr.left = port_list(t.text.substr(5), t.col + 5);
                has_left = true;
            } else if (t.text.starts_with("right=")) {
                tr.right = port_list(t.text.substr(6), t.col + 6);
                has_right = true;
            } else if (t.text.starts_with("turns=")) {
                const std::string_view rows = t.text.substr(6);
                size_t start = 0;
                while (true) {
                    const size_t end = rows.find(';', start);
                    tr.turns.push_back(number_list(
                        rows.substr(start, end == std::string_view::npos ? end : end - start),
                        t.col + 6 + static_cast<int>(start), ','));
                    if (end == std::string_view::npos) break;
                    start = end + 1;
                }
                has_turns = true;
            } else {
                fail(t.col, "unexpected token '" + std::string(t.text) + "'");
            }
        }
        if (!has_left || !has_right || !has_turns)
            fail(tokens_[0].col, "transformer needs left=, right= and turns=");
        out.transformers.push_back(std::move(tr));
    }

    Junction parse_junction() {
        Junction j{name_at(1), number_at(2), std::nullopt, true, loc(tokens_[0].col)};
        for (size_t i = 3; i < tokens_.size(); ++i) {
            const Token& t = tokens_[i];
            if (t.text == "island=true") j.island = true;
            else if (t.text == "island=false") j.island = false;
            else if (!j.anchor && valid_name(t.text)) j.anchor = Incidence{std::string(t.text), 1.0, loc(t.col)};
            else fail(t.col, "unexpected token '" + std::string(t.text) + "'");
        }
        return j;
    }

    int line_;
    std::vector<Token> tokens_;
    std::vector<Problem>& problems_;
};

enum class Kind { Capacitor, Inductor, Other };

void check_references(const Netlist& n, std::vector<Problem>& problems) {
    std::map<std::string, Kind> kinds;
    std::vector<std::pair<std::string, SourceLoc>> declared;
    for (const auto& c : n.capacitors) declared.emplace_back(c.name, c.loc), kinds.emplace(c.name, Kind::Capacitor);
    for (const auto& l : n.inductors) declared.emplace_back(l.name, l.loc), kinds.emplace(l.name, Kind::Inductor);
    for (const auto& g : n.gyrators) declared.emplace_back(g.name, g.loc), kinds.emplace(g.name, Kind::Other);
    for (const auto& c : n.circulators) declared.emplace_back(c.name, c.loc), kinds.emplace(c.name, Kind::Other);
    for (const auto& t : n.transformers) declared.emplace_back(t.name, t.loc), kinds.emplace(t.name, Kind::Other);
    for (const auto& j : n.josephson) declared.emplace_back(j.name, j.loc), kinds.emplace(j.name, Kind::Other);
    for (const auto& j : n.phase_slips) declared.emplace_back(j.name, j.loc), kinds.emplace(j.name, Kind::Other);

    std::stable_sort(declared.begin(), declared.end(),
                     [](const auto& a, const auto& b) { return loc_less(a.second, b.second); });
    std::map<std::string, SourceLoc> seen;
    for (const auto& [name, loc] : declared) {
        if (!seen.emplace(name, loc).second)
            problems.push_back({ErrorCode::DuplicateName, loc, "name '" + name + "' is already declared"});
    }

    auto require = [&](const Incidence& inc, Kind want) {
        const auto it = kinds.find(inc.target);
        const char* what = want == Kind::Capacitor ? "capacitor" : "inductor";
        if (it == kinds.end())
            problems.push_back({ErrorCode::UnknownReference, inc.loc,
                                std::string("unknown ") + what + " '" + inc.target + "'"});
        else if (it->second != want)
            problems.push_back({ErrorCode::UnknownReference, inc.loc,
                                "'" + inc.target + "' is not a " + what});
    };
    for (const auto& l : n.inductors)
        for (const auto& inc : l.incidences) require(inc, Kind::Capacitor);
    for (const auto& g : n.gyrators)
        for (const auto& p : g.ports) require(p, Kind::Inductor);
    for (const auto& c : n.circulators)
        for (const auto& p : c.ports) require(p, Kind::Inductor);
    for (const auto& t : n.transformers) {
        for (const auto& port : t.left)
            for (const auto& inc : port) require(inc, Kind::Capacitor);
        for (const auto& port : t.right)
            for (const auto& inc : port) require(inc, Kind::Inductor);
    }
    for (const auto& j : n.josephson)
        if (j.anchor) require(*j.anchor, Kind::Capacitor);
    for (const auto& j : n.phase_slips)
        if (j.anchor) require(*j.anchor, Kind::Inductor);
}

std::string incidence_text(const Incidence& inc) {
    if (inc.coefficient == 1.0) return inc.target + ":+";
    if (inc.coefficient == -1.0) return inc.target + ":-";
    return inc.target + ":" + format_number(inc.coefficient);
}

std::string port_list_text(const std::vector<std::vector<Incidence>>& ports) {
    std::string out;
    for (size_t p = 0; p < ports.size(); ++p) {
        if (p > 0) out += ';';
        for (size_t k = 0; k < ports[p].size(); ++k) {
            if (k > 0) out += ',';
            out += incidence_text(ports[p][k]);
        }
    }
    return out;
}

} // namespace

bool Netlist::empty() const {
    return capacitors.empty() && inductors.empty() && gyrators.empty() && circulators.empty() &&
           transformers.empty() && josephson.empty() && phase_slips.empty();
}

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

Netlist parse_netlist(std::string_view text) {
    Netlist out;
    std::vector<Problem> problems;
    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t end = text.find('\n', pos);
        std::string_view line = text.substr(pos, end == std::string_view::npos ? end : end - pos);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (const size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto tokens = tokenize(line);
        if (!tokens.empty()) LineParser(line_no, std::move(tokens), problems).parse(out);
        if (end == std::string_view::npos) break;
        pos = end + 1;
    }
    check_references(out, problems);
    if (!problems.empty()) {
        const auto first = std::min_element(problems.begin(), problems.end(), [](const Problem& a, const Problem& b) {
            return loc_less(a.loc, b.loc);
        });
        throw SourceError(first->code, first->loc.line, first->loc.col, first->message);
    }
    return out;
}

std::vector<Diagnostic> validate(const Netlist& n) {
    std::vector<Diagnostic> out;
    auto error = [&](const SourceLoc& loc, std::string code, std::string msg) {
        out.push_back({Severity::Error, loc, std::move(code), std::move(msg)});
    };
    auto warning = [&](const SourceLoc& loc, std::string code, std::string msg) {
        out.push_back({Severity::Warning, loc, std::move(code), std::move(msg)});
    };
    auto positive = [&](double v, const SourceLoc& loc, const std::string& name) {
        if (!(v > 0.0) || !std::isfinite(v))
            error(loc, "InvalidValue", "value of '" + name + "' must be positive");
    };

    for (const auto& c : n.capacitors) positive(c.value, c.loc, c.name);
    for (const auto& l : n.inductors) positive(l.value, l.loc, l.name);
    for (const auto& g : n.gyrators) {
        positive(g.r, g.loc, g.name);
        if (g.ports.size() != 2)
            error(g.loc, "GyratorPorts", "gyrator needs two loop-charge ports");
        else if (g.ports[0].target == g.ports[1].target)
            error(g.loc, "GyratorPorts", "gyrator ports must be distinct inductors");
    }
    for (const auto& c : n.circulators) {
        positive(c.r, c.loc, c.name);
        if (c.ports.size() != 3) error(c.loc, "CirculatorPorts", "circulator needs three loop-charge ports");
        if (!c.s) {
            error(c.loc, "UnsupportedElement",
                  "ideal circulator has a singular immittance; give s= with 1-S and 1+S invertible");
        } else if (c.s->size() != 9) {
            error(c.loc, "CirculatorShape", "circulator s= needs 9 entries (row-major 3x3)");
        } else {
            const Eigen::Matrix3d s = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(c.s->data());
            const auto smin = [](const Eigen::Matrix3d& m) {
                return Eigen::JacobiSVD<Eigen::Matrix3d>(m).singularValues()(2);
            };
            if (smin(Eigen::Matrix3d::Identity() - s) < 1e-9 || smin(Eigen::Matrix3d::Identity() + s) < 1e-9)
                error(c.loc, "UnsupportedElement",
                      "scattering matrix has eigenvalue +1 or -1 (singular immittance)");
        }
    }
    for (const auto& t : n.transformers) {
        bool shape_ok = !t.left.empty() && !t.right.empty() && t.turns.size() == t.left.size();
        for (const auto& row : t.turns) shape_ok = shape_ok && row.size() == t.right.size();
        if (!shape_ok) {
            error(t.loc, "TransformerShape", "turns matrix must be (left ports) x (right ports)");
            continue;
        }
        Eigen::MatrixXd m(static_cast<Eigen::Index>(t.left.size()), static_cast<Eigen::Index>(t.right.size()));
        for (size_t r = 0; r < t.turns.size(); ++r)
            for (size_t c = 0; c < t.right.size(); ++c)
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = t.turns[r][c];
        if (!m.allFinite()) {
            error(t.loc, "InvalidValue", "turns ratios must be finite");
            continue;
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
        lu.setThreshold(1e-12);
        if (lu.rank() < std::min(m.rows(), m.cols()))
            warning(t.loc, "RankDeficientTurns",
                    "turns matrix is rank deficient; expect extra kernel directions");
    }
    for (const auto& j : n.josephson) {
        if (!(j.energy >= 0.0)) error(j.loc, "InvalidValue", "junction energy must be non-negative");
        if (!j.anchor)
            error(j.loc, "MissingShunt",
                  "Josephson junction needs a parallel capacitor so its flux has a kinetic term");
    }
    for (const auto& j : n.phase_slips) {
        if (!(j.energy >= 0.0)) error(j.loc, "InvalidValue", "junction energy must be non-negative");
        if (!j.anchor)
            error(j.loc, "MissingSeriesInductor",
                  "phase-slip junction needs a series inductor so its charge has a kinetic term");
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return loc_less(a.loc, b.loc); });
    return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string serialize(const Netlist& n) {
    std::ostringstream os;
    for (const auto& c : n.capacitors) os << "C " << c.name << ' ' << format_number(c.value) << '\n';
    for (const auto& l : n.inductors) {
        os << "L " << l.name << ' ' << format_number(l.value);
        for (const auto& inc : l.incidences) os << ' ' << incidence_text(inc);
        os << '\n';
    }
    for (const auto& g : n.gyrators) {
        os << "GYR " << g.name << ' ' << format_number(g.r);
        for (const auto& p : g.ports) os << ' ' << p.target;
        os << '\n';
    }
    for (const auto& c : n.circulators) {
        os << "CIRC " << c.name << ' ' << format_number(c.r);
        for (const auto& p : c.ports) os << ' ' << p.target;
        if (c.s) {
            os << " s=";
            for (size_t i = 0; i < c.s->size(); ++i) os << (i ? "," : "") << format_number((*c.s)[i]);
        }
        os << '\n';
    }
    for (const auto& t : n.transformers) {
        os << "TR " << t.name << " left=" << port_list_text(t.left) << " right=" << port_list_text(t.right)
           << " turns=";
        for (size_t r = 0; r < t.turns.size(); ++r) {
            if (r > 0) os << ';';
            for (size_t c = 0; c < t.turns[r].size(); ++c) os << (c ? "," : "") << format_number(t.turns[r][c]);
        }
        os << '\n';
    }
    auto junction = [&](const char* kind, const Junction& j) {
        os << kind << ' ' << j.name << ' ' << format_number(j.energy);
        if (j.anchor) os << ' ' << j.anchor->target;
        if (!j.island) os << " island=false";
        os << '\n';
    };
    for (const auto& j : n.josephson) junction("JJ", j);
    for (const auto& j : n.phase_slips) junction("PS", j);
    return os.str();
}

} // namespace symq
