#include "symq/cli.hpp"
#include "symq/error.hpp"
#include "symq/invariants.hpp"
#include "symq/models.hpp"
#include "symq/quantizer.hpp"
#include "symq/serialize.hpp"
#include "symq/williamson.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace symq;

namespace {

// Structured results cross the boundary as JSON text; the Python side decodes them.
std::string dump(const Json& doc) { return doc.dump(); }

HamiltonianSystem circuit_hamiltonian(const std::string& netlist, bool shift, bool scale, const Tolerance& tol) {
    HamiltonianSystem hs = legendre(build_circuit(parse_netlist(netlist)));
    if (shift && !hs.potential.empty()) hs = charge_shift(hs, tol);
    return scale ? rescale(hs) : hs;
}

BlackBoxParams blackbox_params(double omega, double omega_c, double omega_j, double r, std::array<double, 4> turns,
                               std::optional<double> ej, double lj_ratio, bool island, bool junctions) {
    BlackBoxParams p;
    p.omega = omega;
    p.omega_c = omega_c;
    p.omega_j = omega_j;
    p.r = r;
    p.turns = turns;
    p.ej = ej;
    p.lj_ratio = lj_ratio;
    p.island = island;
    p.junctions = junctions;
    return p;
}

std::string quantize_json(const HamiltonianSystem& hs, const std::string& mode, const QuantizeOptions& opts,
                          double cross_tolerance) {
    if (mode != "two-tier" && mode != "blackbox" && mode != "both")
        throw Error(ErrorCode::InvalidArgument, "mode must be two-tier, blackbox or both");
    Json out = Json::object();
    std::optional<QuantizedModel> tt, bb;
    if (mode != "blackbox") out["two_tier"] = to_json(*(tt = two_tier(hs, opts)));
    if (mode != "two-tier") out["blackbox"] = to_json(*(bb = blackbox(hs, opts)));
    if (tt && bb) out["cross_validation"] = to_json(cross_validate(*tt, *bb, cross_tolerance, opts.tol));
    return dump(out);
}

} // namespace

PYBIND11_MODULE(_symq, m) {
    m.doc() = "Symplectic normal forms of quadratic Hamiltonians and circuit quantization";

    static py::exception<Error> error_type(m, "SymqError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object type = py::reinterpret_borrow<py::object>(error_type.ptr());
            py::object exc = type(std::string(to_string(e.code())) + ": " + e.what());
            exc.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        }
    });

    py::class_<Tolerance>(m, "Tolerance")
        .def(py::init([](double rank_rel, double verify_abs, double degeneracy_rel) {
                 Tolerance t{rank_rel, verify_abs, degeneracy_rel};
                 t.validate();
                 return t;
             }),
             py::arg("rank_rel") = 1e-10, py::arg("verify_abs") = 1e-9, py::arg("degeneracy_rel") = 1e-8)
        .def_readwrite("rank_rel", &Tolerance::rank_rel)
        .def_readwrite("verify_abs", &Tolerance::verify_abs)
        .def_readwrite("degeneracy_rel", &Tolerance::degeneracy_rel);

    m.def("canonical_j", py::overload_cast<Index>(&canonical_j), py::arg("n"));
    m.def("check_psd", &check_psd, py::arg("h"), py::arg("tol") = Tolerance{});
    m.def("expm", &expm, py::arg("m"), py::arg("t"));

    py::class_<NormalForm>(m, "NormalForm")
        .def_readonly("s", &NormalForm::s)
        .def_readonly("s_inv", &NormalForm::s_inv)
        .def_readonly("h_diag", &NormalForm::h_diag)
        .def_readonly("omega", &NormalForm::omega)
        .def_readonly("w_block", &NormalForm::w_block)
        .def_property_readonly("counts",
                               [](const NormalForm& nf) {
                                   const auto& c = nf.classification;
                                   return py::dict(py::arg("n_nd") = c.n_nd, py::arg("n_f") = c.n_f,
                                                   py::arg("n_ho") = c.n_ho);
                               })
        .def_property_readonly("residuals",
                               [](const NormalForm& nf) {
                                   return py::dict(py::arg("h") = nf.residuals.h, py::arg("j") = nf.residuals.j);
                               })
        .def("expected_h_diag", &NormalForm::expected_h_diag)
        .def("expected_j_form", &NormalForm::expected_j_form)
        .def("generator", &NormalForm::generator)
        .def("to_json", [](const NormalForm& nf) { return dump(to_json(nf)); });

    m.def(
        "normal_form",
        [](const RealMatrix& h, const Tolerance& tol, bool symplectic_w) {
            return normal_form(h, tol, NormalFormOptions{symplectic_w});
        },
        py::arg("h"), py::arg("tol") = Tolerance{}, py::arg("symplectic_w") = false);
    m.def(
        "classify_dof",
        [](const RealMatrix& h, const Tolerance& tol) {
            const auto c = classify_dof(h, tol);
            return py::dict(py::arg("n_nd") = c.n_nd, py::arg("n_f") = c.n_f, py::arg("n_ho") = c.n_ho);
        },
        py::arg("h"), py::arg("tol") = Tolerance{});
    m.def("quadratic_invariant_basis", &quadratic_invariant_basis, py::arg("h"), py::arg("tol") = Tolerance{});
    m.def("linear_invariants", &linear_invariants, py::arg("h"), py::arg("tol") = Tolerance{});

    m.def(
        "landau_z", [](double m_, double k, double b) { return landau_z(LandauParams{m_, k, b}); }, py::arg("m") = 1.0,
        py::arg("k") = 1.0, py::arg("b") = 1.0);
    m.def(
        "landau_xy", [](double m_, double k, double b) { return landau_xy(LandauParams{m_, k, b}); }, py::arg("m") = 1.0,
        py::arg("k") = 1.0, py::arg("b") = 1.0);
    m.def("landau_xy_rescaled", &landau_xy_rescaled, py::arg("chi"), py::arg("omega_c") = 1.0);
    m.def("lcc_netlist", [](double c1, double c2, double l) { return serialize(lcc_netlist(c1, c2, l)); },
          py::arg("c1"), py::arg("c2"), py::arg("l"));
    m.def(
        "blackbox_netlist",
        [](double omega, double omega_c, double omega_j, double r, std::array<double, 4> turns, std::optional<double> ej,
           double lj_ratio, bool island, bool junctions) {
            return serialize(blackbox_netlist(blackbox_params(omega, omega_c, omega_j, r, turns, ej, lj_ratio, island, junctions)));
        },
        py::arg("omega") = 1.0, py::arg("omega_c") = 1.0, py::arg("omega_j") = 1.0, py::arg("r") = 1.0,
        py::arg("turns") = std::array<double, 4>{1.0, 1.0, 0.0, 1.0}, py::arg("ej") = py::none(),
        py::arg("lj_ratio") = 1.0, py::arg("island") = true, py::arg("junctions") = true);

    m.def("format_netlist", [](const std::string& text) { return serialize(parse_netlist(text)); }, py::arg("text"));
    m.def(
        "hamiltonian_json",
        [](const std::string& netlist, bool shift, bool scale, const Tolerance& tol) {
            return dump(to_json(circuit_hamiltonian(netlist, shift, scale, tol)));
        },
        py::arg("netlist"), py::arg("charge_shift") = true, py::arg("rescale") = true, py::arg("tol") = Tolerance{});
    m.def(
        "quantize_json",
        [](const std::string& netlist, const std::string& mode, bool transmon_override, bool symplectic_w,
           double cross_tolerance, const Tolerance& tol) {
            QuantizeOptions opts;
            opts.tol = tol;
            opts.transmon_override = transmon_override;
            opts.symplectic_w = symplectic_w;
            return quantize_json(circuit_hamiltonian(netlist, true, true, tol), mode, opts, cross_tolerance);
        },
        py::arg("netlist"), py::arg("mode") = "both", py::arg("transmon_override") = false,
        py::arg("symplectic_w") = false, py::arg("cross_tolerance") = 1e-6, py::arg("tol") = Tolerance{});

    m.def(
        "run_cli",
        [](const std::string& command, std::vector<std::string> inputs, std::optional<std::string> model,
           const std::string& format, const std::string& mode, bool transmon_override, const std::string& stdin_text) {
            cli::RunConfig config;
            const auto cmd = cli::parse_command(command);
            if (!cmd) throw Error(ErrorCode::InvalidArgument, "unknown command '" + command + "'");
            config.command = *cmd;
            config.inputs = std::move(inputs);
            config.model = std::move(model);
            config.format = format == "json" ? cli::OutputFormat::Json : cli::OutputFormat::Text;
            config.mode = mode == "two-tier"   ? cli::QuantizeMode::TwoTier
                          : mode == "blackbox" ? cli::QuantizeMode::BlackBox
                                               : cli::QuantizeMode::Both;
            config.transmon_override = transmon_override;
            std::istringstream in(stdin_text);
            std::ostringstream out, err;
            const int code = cli::run(config, in, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("command"), py::arg("inputs") = std::vector<std::string>{}, py::arg("model") = py::none(),
        py::arg("format") = "json", py::arg("mode") = "both", py::arg("transmon_override") = false,
        py::arg("stdin") = "");
}
