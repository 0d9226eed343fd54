#include "symq/serialize.hpp"

#include "symq/error.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace symq {

namespace {

[[noreturn]] void malformed(const std::string& what) {
    throw Error(ErrorCode::InvalidArgument, "malformed matrix: " + what);
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_cell(std::string_view cell, int line) {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (cell.empty() || ec != std::errc{} || end != cell.data() + cell.size() || !std::isfinite(value))
        malformed("line " + std::to_string(line) + ": '" + std::string(cell) + "' is not a finite number");
    return value;
}

RealMatrix parse_csv(std::string_view text) {
    std::vector<std::vector<double>> rows;
    int line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        std::vector<double> row;
        std::string_view rest = line;
        while (true) {
            const auto comma = rest.find(',');
            row.push_back(parse_cell(rest.substr(0, comma), line_no));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            malformed("line " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                      " columns, expected " + std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    const Index r = static_cast<Index>(rows.size());
    const Index c = r ? static_cast<Index>(rows.front().size()) : 0;
    RealMatrix m(r, c);
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < c; ++j) m(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    return m;
}

Json complex_to_json(const ComplexMatrix& m) {
    return Json{{"re", matrix_to_json(m.real())}, {"im", matrix_to_json(m.imag())}};
}

std::string_view kind_name(CoordinateKind kind) { return kind == CoordinateKind::Charge ? "charge" : "flux"; }

std::string_view role_name(CoordinateRole role) {
    switch (role) {
    case CoordinateRole::Junction: return "junction";
    case CoordinateRole::Coupling: return "coupling";
    case CoordinateRole::Internal: break;
    }
    return "internal";
}

} // namespace

std::string_view to_string(QuantizationRoute route) noexcept {
    return route == QuantizationRoute::TwoTier ? "two-tier" : "blackbox";
}

std::string_view to_string(NonlinearKind kind) noexcept {
    return kind == NonlinearKind::Josephson ? "josephson" : "phase-slip";
}

Json matrix_to_json(const RealMatrix& m) {
    Json entries = Json::array();
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) entries.push_back(m(i, j));
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

Json vector_to_json(const RealVector& v) {
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

RealMatrix matrix_from_json(const Json& doc) {
    if (!doc.is_object()) malformed("expected an object with rows, cols and entries");
    for (const char* key : {"rows", "cols", "entries"})
        if (!doc.contains(key)) malformed(std::string("missing '") + key + "'");
    if (!doc["rows"].is_number_integer() || !doc["cols"].is_number_integer())
        malformed("rows and cols must be integers");
    const auto rows = doc["rows"].get<Index>(), cols = doc["cols"].get<Index>();
    if (rows < 0 || cols < 0) malformed("rows and cols must be non-negative");
    const Json& entries = doc["entries"];
    if (!entries.is_array() || static_cast<Index>(entries.size()) != rows * cols)
        malformed("expected " + std::to_string(rows * cols) + " entries");
    RealMatrix m(rows, cols);
    for (Index k = 0; k < rows * cols; ++k) {
        const Json& e = entries[static_cast<size_t>(k)];
        if (!e.is_number()) malformed("entry " + std::to_string(k) + " is not a number");
        m(k / cols, k % cols) = e.get<double>();
    }
    require_finite(m, "matrix");
    return m;
}

RealMatrix parse_matrix(std::string_view text) {
    const std::string_view body = trim(text);
    if (!body.empty() && body.front() == '{') {
        Json doc;
        try {
            doc = Json::parse(body);
        } catch (const Json::parse_error& e) {
            malformed(e.what());
        }
        return matrix_from_json(doc);
    }
    return parse_csv(text);
}

Json counts_to_json(const DofClassification& cls) {
    return Json{{"n_nd", cls.n_nd}, {"n_f", cls.n_f}, {"n_ho", cls.n_ho}};
}

Json to_json(const NormalForm& nf) {
    return Json{{"schema", kNormalFormSchema},
                {"s", matrix_to_json(nf.s)},
                {"h_diag", matrix_to_json(nf.h_diag)},
                {"omega", vector_to_json(nf.omega)},
                {"counts", counts_to_json(nf.classification)},
                {"w_block", matrix_to_json(nf.w_block)},
                {"residuals", Json{{"h", nf.residuals.h}, {"j", nf.residuals.j}}}};
}

Json to_json(const HamiltonianSystem& hs) {
    Json coords = Json::array();
    for (const auto& c : hs.coordinates)
        coords.push_back(Json{{"label", c.label},
                              {"element", c.element},
                              {"kind", kind_name(c.kind)},
                              {"role", role_name(c.role)},
                              {"compact", c.compact},
                              {"value", c.value}});
    Json potential = Json::array();
    for (const auto& t : hs.potential)
        potential.push_back(Json{{"kind", to_string(t.kind)},
                                 {"name", t.name},
                                 {"energy", t.energy},
                                 {"coordinate", t.coordinate},
                                 {"compact", t.compact},
                                 {"covector", vector_to_json(t.covector)}});
    Json provenance = Json::array();
    for (const auto& t : hs.provenance)
        provenance.push_back(Json{{"label", t.label}, {"matrix", matrix_to_json(t.matrix)}});
    return Json{{"schema", kHamiltonianSchema},
                {"h", matrix_to_json(hs.h)},
                {"layout", Json{{"n", hs.layout.n}, {"labels", hs.layout.labels}}},
                {"coordinates", std::move(coords)},
                {"display_order", hs.display_order()},
                {"potential", std::move(potential)},
                {"provenance", std::move(provenance)},
                {"charge_scale", hs.charge_scale},
                {"reference_inductance", hs.reference_inductance}};
}

Json to_json(const QuantizedModel& model, const std::string& provenance_ref) {
    Json terms = Json::array();
    for (const auto& t : model.junction_terms) {
        Json tail = Json::array();
        for (const auto& c : t.tail)
            tail.push_back(Json{{"order", c.order}, {"numerator", c.numerator}, {"denominator", c.denominator}});
        Json term{{"name", t.name},
                  {"kind", to_string(t.kind)},
                  {"energy", t.energy},
                  {"covector", vector_to_json(t.covector)},
                  {"potential", t.full_cosine ? "-energy*cos(phase)" : "energy*sum(c_k*phase^k)"},
                  {"tail", std::move(tail)}};
        if (!t.full_cosine) term["tail_note"] = "orders above 12 follow (-1)^(m+1)/(2m)!";
        terms.push_back(std::move(term));
    }
    Json out{{"schema", kQuantizedSchema},
             {"route", to_string(model.route)},
             {"mode_freqs", vector_to_json(model.mode_freqs)},
             {"couplings", complex_to_json(model.couplings)},
             {"coupling_g", matrix_to_json(model.coupling_g)},
             {"coupling_m", matrix_to_json(model.coupling_m)},
             {"junction_terms", std::move(terms)},
             {"mode_expressions", matrix_to_json(model.mode_expressions)},
             {"nd_dependency", model.nd_dependency},
             {"counts", counts_to_json(model.normal_form.classification)},
             {"warnings", model.warnings},
             {"provenance_ref", provenance_ref}};
    if (model.route == QuantizationRoute::TwoTier) {
        const auto& p = model.partial;
        out["partial"] = Json{{"n_nd", p.n_nd}, {"n_f", p.n_f}, {"n_ho", p.n_ho}, {"n_j", p.n_j}};
        out["nd_coupling"] = model.nd_coupling;
    }
    return out;
}

Json to_json(const CrossValidation& report) {
    return Json{{"schema", kCrossValidationSchema},
                {"two_tier_freqs", vector_to_json(report.two_tier_freqs)},
                {"blackbox_freqs", vector_to_json(report.blackbox_freqs)},
                {"deltas", vector_to_json(report.deltas)},
                {"max_delta", report.max_delta}};
}

Json to_json(const InvariantSet& set) {
    Json quadratic = Json::array();
    for (const auto& b : set.quadratic) quadratic.push_back(matrix_to_json(b));
    return Json{{"schema", kInvariantsSchema},
                {"linear", matrix_to_json(set.linear)},
                {"quadratic", std::move(quadratic)}};
}

Json to_json(const Diagnostic& d) {
    return Json{{"severity", d.severity == Severity::Error ? "error" : "warning"},
                {"line", d.loc.line},
                {"col", d.loc.col},
                {"code", d.code},
                {"message", d.message}};
}

Json error_to_json(const std::exception& e) {
    Json out{{"schema", kErrorSchema}};
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        out["code"] = to_string(err->code());
        if (const auto* src = dynamic_cast<const SourceError*>(&e)) {
            out["line"] = src->line();
            out["col"] = src->col();
            out["message"] = src->detail();
            return out;
        }
        if (const auto* vf = dynamic_cast<const VerificationFailure*>(&e)) {
            out["identity"] = vf->identity();
            out["residual"] = vf->residual();
            out["bound"] = vf->bound();
        }
    } else {
        out["code"] = "Internal";
    }
    out["message"] = e.what();
    return out;
}

} // namespace symq
