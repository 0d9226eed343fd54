#include "symq/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

using namespace symq;
using namespace symq::cli;

namespace {

void add_common(CLI::App& sub, RunConfig& config, bool inputs) {
    if (inputs)
        sub.add_option("inputs", config.inputs, "matrix (.json/.csv) or netlist (.cq) files, '-' for stdin");
    sub.add_option("--model", config.model, "use a preset instead of input files")
        ->check(CLI::IsMember(preset_names()));
    sub.add_option("--as", config.kind, "input kind when the extension is ambiguous")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, InputKind>{{"auto", InputKind::Auto}, {"matrix", InputKind::Matrix},
                                             {"netlist", InputKind::Netlist}}));
    sub.add_option("--tol-rank", config.tol.rank_rel, "relative singular-value threshold")->envname("SYMQ_TOL_RANK");
    sub.add_option("--tol-verify", config.tol.verify_abs, "residual bound for identities")->envname("SYMQ_TOL_VERIFY");
    sub.add_option("--tol-degeneracy", config.tol.degeneracy_rel, "relative width for grouping frequencies")
        ->envname("SYMQ_TOL_DEGENERACY");
    sub.add_option("--format", config.format, "output format")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, OutputFormat>{{"text", OutputFormat::Text}, {"json", OutputFormat::Json}}))
        ->envname("SYMQ_FORMAT");
    sub.add_flag("--symplectic-w", config.symplectic_w, "symplectically orthonormalize the nondynamical block")
        ->envname("SYMQ_SYMPLECTIC_W");

    auto& p = config.preset;
    sub.add_option("--mass", p.landau.m, "Landau: particle mass");
    sub.add_option("--spring", p.landau.k, "Landau: spring constant");
    sub.add_option("--field", p.landau.b, "Landau: magnetic field");
    sub.add_option("--chi", p.chi, "Landau: coupling ratio for the in-plane sector in cyclotron units");
    sub.add_option("--c1", p.c1, "LCC: first capacitance");
    sub.add_option("--c2", p.c2, "LCC: second capacitance");
    sub.add_option("--inductance", p.l, "LCC: inductance");
    auto& bb = p.blackbox;
    sub.add_option("--omega", bb.omega, "black box: R/L rate");
    sub.add_option("--omega-c", bb.omega_c, "black box: coupling capacitor rate");
    sub.add_option("--omega-j", bb.omega_j, "black box: junction capacitor rate");
    sub.add_option("--resistance", bb.r, "black box: gyration resistance");
    sub.add_option("--turns", bb.turns, "black box: n11,n12,n21,n22")->delimiter(',');
    sub.add_option("--ej", bb.ej, "black box: junction energy");
    sub.add_option("--lj-ratio", bb.lj_ratio, "black box: L/L_J when --ej is absent");
    sub.add_flag("!--no-island", bb.island, "black box: junction phases are not compact");
    sub.add_flag("!--no-junctions", bb.junctions, "black box: drop the junctions");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Symplectic normal forms and circuit quantization"};
    app.require_subcommand(1);
    RunConfig config;

    struct Entry {
        const char* name;
        const char* help;
        Command command;
    };
    const Entry entries[] = {
        {"diag", "symplectic normal form and frequencies", Command::Diag},
        {"dof", "count nondynamical pairs, free particles and oscillators", Command::Dof},
        {"quantize", "two-tier and black-box quantization of a circuit", Command::Quantize},
        {"invariants", "linear and quadratic conserved quantities", Command::Invariants},
        {"verify", "check the normal-form identities", Command::Verify},
        {"model", "print a preset Hamiltonian", Command::Model},
    };
    std::string preset_name;
    for (const auto& e : entries) {
        auto* sub = app.add_subcommand(e.name, e.help);
        add_common(*sub, config, e.command != Command::Model);
        sub->callback([&config, command = e.command] { config.command = command; });
        if (e.command == Command::Model)
            sub->add_option("preset", preset_name, "landau-z | landau-xy | lcc | blackbox")
                ->check(CLI::IsMember(preset_names()));
        if (e.command == Command::Quantize) {
            sub->add_option("--mode", config.mode, "quantization route")
                ->transform(CLI::CheckedTransformer(std::map<std::string, QuantizeMode>{
                    {"two-tier", QuantizeMode::TwoTier}, {"blackbox", QuantizeMode::BlackBox},
                    {"both", QuantizeMode::Both}}))
                ->envname("SYMQ_MODE");
            sub->add_flag("--transmon-override", config.transmon_override,
                          "allow linearizing compact junction phases")
                ->envname("SYMQ_TRANSMON_OVERRIDE");
            sub->add_option("--cross-tolerance", config.cross_tolerance, "largest accepted frequency mismatch");
        }
        if (e.command == Command::Verify)
            sub->add_option("--transform", config.transform, "candidate symplectic matrix to check");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitIo;
    }
    if (!preset_name.empty()) {
        if (config.model && *config.model != preset_name) {
            std::cerr << "error[InvalidArgument]: conflicting presets\n";
            return kExitIo;
        }
        config.model = preset_name;
    }
    return run(config, std::cin, std::cout, std::cerr);
}
