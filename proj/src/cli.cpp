#include "symq/cli.hpp"

#include "symq/error.hpp"
#include "symq/invariants.hpp"
#include "symq/quantizer.hpp"
#include "symq/serialize.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace symq::cli {

namespace {

// A loaded input: either a bare matrix or a circuit-derived system.
struct Source {
    std::string name;
    RealMatrix h;
    std::optional<HamiltonianSystem> system;
    std::vector<Diagnostic> diagnostics;
};

std::string fmt(double value) {
    std::ostringstream os;
    os << std::setprecision(6) << value;
    return os.str();
}

std::string read_input(const std::string& path, std::istream& in) {
    std::ostringstream buffer;
    if (path == "-") {
        buffer << in.rdbuf();
        return buffer.str();
    }
    std::ifstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    buffer << file.rdbuf();
    if (file.bad()) throw Error(ErrorCode::IoError, "cannot read '" + path + "'");
    return buffer.str();
}

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool looks_like_matrix(std::string_view text) {
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
        return c == '{' || c == '-' || c == '+' || c == '.' || (c >= '0' && c <= '9');
    }
    return true; // empty input is an empty matrix
}

HamiltonianSystem wrap_matrix(const RealMatrix& h) {
    HamiltonianSystem hs;
    hs.h = h;
    hs.layout.n = h.rows() / 2;
    return hs;
}

// legendre, then charge_shift when junctions are present, then rescale.
HamiltonianSystem prepare(const CircuitSystem& circuit, const Tolerance& tol, bool require_shift,
                          std::vector<std::string>& notes) {
    HamiltonianSystem hs = legendre(circuit);
    if (!hs.potential.empty()) {
        try {
            hs = charge_shift(hs, tol);
        } catch (const Error& e) {
            if (require_shift || e.code() != ErrorCode::SingularZ) throw;
            notes.push_back(std::string("charge shift skipped: ") + e.what());
        }
    }
    return rescale(hs);
}

Source load_preset(const RunConfig& config, std::vector<std::string>& notes) {
    const std::string& name = *config.model;
    const auto& p = config.preset;
    Source src;
    src.name = name;
    if (name == "landau-z") {
        src.h = landau_z(p.landau);
    } else if (name == "landau-xy") {
        src.h = p.chi ? landau_xy_rescaled(*p.chi) : landau_xy(p.landau);
    } else if (name == "lcc") {
        src.system = prepare(lcc_circuit(p.c1, p.c2, p.l), config.tol, false, notes);
    } else if (name == "blackbox") {
        src.system = blackbox_hamiltonian(p.blackbox, config.tol);
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown model '" + name + "'");
    }
    if (src.system) src.h = src.system->h;
    return src;
}

Source load_file(const RunConfig& config, const std::string& path, std::istream& in,
                 std::vector<std::string>& notes) {
    const std::string text = read_input(path, in);
    InputKind kind = config.kind;
    if (kind == InputKind::Auto) {
        if (ends_with(path, ".cq")) kind = InputKind::Netlist;
        else if (ends_with(path, ".json") || ends_with(path, ".csv")) kind = InputKind::Matrix;
        else kind = looks_like_matrix(text) ? InputKind::Matrix : InputKind::Netlist;
    }
    Source src;
    src.name = path == "-" ? "<stdin>" : path;
    if (kind == InputKind::Matrix) {
        src.h = parse_matrix(text);
        return src;
    }
    const Netlist netlist = parse_netlist(text);
    for (auto& d : validate(netlist))
        if (d.severity == Severity::Warning) src.diagnostics.push_back(std::move(d));
    src.system = prepare(build_circuit(netlist), config.tol, config.command == Command::Quantize, notes);
    src.h = src.system->h;
    return src;
}

void print_matrix(std::ostream& os, const RealMatrix& m) {
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) os << (j ? " " : "") << std::setw(12) << fmt(m(i, j));
        os << '\n';
    }
}

void print_sectors(std::ostream& os, const NormalForm& nf) {
    const auto& c = nf.classification;
    if (nf.n() == 0) {
        os << "no degrees of freedom\n";
        return;
    }
    os << std::left << std::setw(14) << "sector" << std::setw(7) << "pairs" << "frequencies\n";
    os << std::setw(14) << "nondynamical" << c.n_nd << '\n';
    os << std::setw(14) << "free" << c.n_f << '\n';
    os << std::setw(14) << "harmonic" << std::setw(7) << c.n_ho;
    for (Index i = 0; i < nf.omega.size(); ++i) os << (i ? " " : "") << fmt(nf.omega(i));
    os << std::right << '\n';
}

void print_residuals(std::ostream& os, double h, double j) {
    os << "residuals: S^T H S = H_D " << fmt(h) << ", S^T J S = K " << fmt(j) << '\n';
}

void print_model(std::ostream& os, const QuantizedModel& m) {
    const Index nj = static_cast<Index>(m.junction_terms.size());
    os << to_string(m.route) << ": " << m.mode_freqs.size() << " modes, " << nj << " junctions\n";
    for (Index k = 0; k < m.mode_freqs.size(); ++k) {
        os << "  mode " << k << "  omega " << fmt(m.mode_freqs(k));
        if (m.route == QuantizationRoute::TwoTier)
            for (Index q = 0; q < nj; ++q)
                os << "  " << m.junction_terms[static_cast<size_t>(q)].name << ": G " << fmt(m.coupling_g(k, q))
                   << " M " << fmt(m.coupling_m(k, q));
        os << '\n';
    }
    for (Index q = 0; q < nj; ++q) {
        const auto& t = m.junction_terms[static_cast<size_t>(q)];
        os << "  junction " << t.name << "  energy " << fmt(t.energy) << "  "
           << (t.full_cosine ? "full cosine" : "Taylor tail from order 4") << "  nd_dependency "
           << (m.nd_dependency[static_cast<size_t>(q)] ? "true" : "false") << '\n';
    }
    for (const auto& w : m.warnings) os << "  warning: " << w << '\n';
}

QuantizeOptions quantize_options(const RunConfig& config) {
    QuantizeOptions opts;
    opts.tol = config.tol;
    opts.transmon_override = config.transmon_override;
    opts.symplectic_w = config.symplectic_w;
    return opts;
}

// Runs the command on one source; json receives the result document.
void execute(const RunConfig& config, const Source& src, Json& json, std::ostream& text) {
    const NormalFormOptions nf_options{config.symplectic_w};
    switch (config.command) {
    case Command::Diag: {
        const auto nf = normal_form(src.h, config.tol, nf_options);
        json = to_json(nf);
        print_sectors(text, nf);
        if (nf.n() > 0) print_residuals(text, nf.residuals.h, nf.residuals.j);
        break;
    }
    case Command::Dof: {
        if (!check_psd(src.h, config.tol))
            throw Error(ErrorCode::NotPSD, "Hamiltonian matrix is not positive semidefinite");
        const auto cls = classify_dof(src.h, config.tol);
        json = Json{{"schema", kDofSchema}, {"n_nd", cls.n_nd}, {"n_f", cls.n_f}, {"n_ho", cls.n_ho}};
        if (src.h.rows() == 0) text << "no degrees of freedom\n";
        else text << "n_nd " << cls.n_nd << "\nn_f " << cls.n_f << "\nn_ho " << cls.n_ho << '\n';
        break;
    }
    case Command::Invariants: {
        const auto set = invariants(src.h, config.tol);
        json = to_json(set);
        if (src.h.rows() == 0) {
            text << "no degrees of freedom\n";
            break;
        }
        text << "linear invariants: " << set.linear.cols() << '\n';
        text << "quadratic invariants: " << set.quadratic.size() << '\n';
        for (size_t i = 0; i < set.quadratic.size(); ++i) {
            text << "B" << i << ":\n";
            print_matrix(text, set.quadratic[i]);
        }
        break;
    }
    case Command::Verify: {
        // Reference normal form; a user transform is checked against its block pattern.
        const auto nf = normal_form(src.h, config.tol, nf_options);
        double res_h = nf.residuals.h, res_j = nf.residuals.j;
        if (config.transform) {
            std::istringstream none;
            const RealMatrix s = parse_matrix(read_input(*config.transform, none));
            if (s.rows() != src.h.rows() || s.cols() != src.h.cols())
                throw Error(ErrorCode::InvalidArgument, "transform shape does not match the Hamiltonian");
            const RealMatrix j = canonical_j(nf.n());
            res_h = (s.transpose() * src.h * s - nf.expected_h_diag()).norm();
            res_j = (s.transpose() * j * s - nf.expected_j_form()).norm();
        }
        const double bound = config.tol.verify_abs * std::max(1.0, src.h.norm());
        json = Json{{"schema", "symq.verify/1"},
                    {"residuals", Json{{"h", res_h}, {"j", res_j}}},
                    {"bound", bound},
                    {"ok", res_h <= bound && res_j <= bound}};
        print_residuals(text, res_h, res_j);
        if (res_h > bound) throw VerificationFailure("S^T H S = H_D", res_h, bound);
        if (res_j > bound) throw VerificationFailure("S^T J S = K", res_j, bound);
        text << "verified\n";
        break;
    }
    case Command::Quantize: {
        const HamiltonianSystem hs = src.system ? *src.system : wrap_matrix(src.h);
        const auto opts = quantize_options(config);
        json = Json{{"schema", "symq.quantize_run/1"}};
        std::optional<QuantizedModel> tt, bb;
        if (config.mode != QuantizeMode::BlackBox) {
            tt = two_tier(hs, opts);
            json["two_tier"] = to_json(*tt, src.name);
            print_model(text, *tt);
        }
        if (config.mode != QuantizeMode::TwoTier) {
            bb = blackbox(hs, opts);
            json["blackbox"] = to_json(*bb, src.name);
            print_model(text, *bb);
        }
        if (tt && bb) {
            const auto report = cross_validate(*tt, *bb, config.cross_tolerance, config.tol);
            json["cross_validation"] = to_json(report);
            text << "cross-validation: max delta " << fmt(report.max_delta) << '\n';
        }
        break;
    }
    case Command::Model: {
        if (src.system) {
            json = to_json(*src.system);
        } else {
            json = matrix_to_json(src.h);
            json["schema"] = kMatrixSchema;
        }
        print_matrix(text, src.h);
        break;
    }
    }
}

int exit_code_for(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) return err->code() == ErrorCode::IoError ? kExitIo : kExitDomain;
    return kExitDomain;
}

} // namespace

std::optional<Command> parse_command(const std::string& name) {
    if (name == "diag") return Command::Diag;
    if (name == "dof") return Command::Dof;
    if (name == "quantize") return Command::Quantize;
    if (name == "invariants") return Command::Invariants;
    if (name == "verify") return Command::Verify;
    if (name == "model") return Command::Model;
    return std::nullopt;
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"landau-z", "landau-xy", "lcc", "blackbox"};
    return names;
}

void RunConfig::validate() const {
    tol.validate();
    if (model && std::find(preset_names().begin(), preset_names().end(), *model) == preset_names().end())
        throw Error(ErrorCode::InvalidArgument, "unknown model '" + *model + "'");
    if (model && !inputs.empty()) throw Error(ErrorCode::InvalidArgument, "give either input files or --model");
    if (!model && inputs.empty())
        throw Error(ErrorCode::InvalidArgument,
                    command == Command::Model ? "model needs a preset name" : "no input given");
    if (transform && command != Command::Verify)
        throw Error(ErrorCode::InvalidArgument, "--transform only applies to verify");
    if (!(cross_tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "cross-validation tolerance must be positive");
}

int run(const RunConfig& config, std::istream& in, std::ostream& out, std::ostream& err) {
    const bool as_json = config.format == OutputFormat::Json;
    auto report_error = [&](const std::string& name, const std::exception& e) {
        if (as_json) {
            Json doc = error_to_json(e);
            if (!name.empty()) doc["input"] = name;
            err << doc.dump() << '\n';
        } else {
            const auto* symq_error = dynamic_cast<const Error*>(&e);
            err << (name.empty() ? "" : name + ": ") << "error["
                << (symq_error ? std::string(to_string(symq_error->code())) : "Internal") << "]: " << e.what() << '\n';
        }
        return exit_code_for(e);
    };
    try {
        config.validate();
    } catch (const std::exception& e) {
        report_error("", e);
        return kExitIo; // usage error
    }

    std::vector<std::string> names = config.inputs;
    if (config.model) names = {*config.model};
    Json documents = Json::array();
    int status = kExitOk;
    for (const auto& name : names) {
        // Each input is rendered into its own buffers so outputs never interleave.
        std::ostringstream text, notes_out;
        Json doc;
        std::vector<std::string> notes;
        try {
            const Source src = config.model ? load_preset(config, notes) : load_file(config, name, in, notes);
            for (const auto& d : src.diagnostics) {
                if (as_json) notes_out << Json{{"input", src.name}, {"diagnostic", to_json(d)}}.dump() << '\n';
                else notes_out << src.name << ":" << d.loc.line << ":" << d.loc.col << ": warning[" << d.code
                               << "]: " << d.message << '\n';
            }
            for (const auto& note : notes) notes_out << src.name << ": note: " << note << '\n';
            if (names.size() > 1 && !as_json) text << "== " << src.name << '\n';
            execute(config, src, doc, text);
            doc["input"] = src.name;
            err << notes_out.str();
            if (as_json) documents.push_back(std::move(doc));
            else out << text.str();
        } catch (const std::exception& e) {
            err << notes_out.str();
            if (!as_json) out << text.str();
            status = std::max(status, report_error(name == "-" ? "<stdin>" : name, e));
        }
    }
    if (as_json && !documents.empty()) {
        if (names.size() == 1) out << documents.front().dump(2) << '\n';
        else out << documents.dump(2) << '\n';
    }
    out.flush();
    return status;
}

} // namespace symq::cli
