#pragma once

#include "symq/linalg.hpp"
#include "symq/models.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace symq::cli {

enum class Command { Diag, Dof, Quantize, Invariants, Verify, Model };
enum class OutputFormat { Text, Json };
enum class QuantizeMode { TwoTier, BlackBox, Both };
enum class InputKind { Auto, Matrix, Netlist };

// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitIo = 2; // I/O and usage errors

struct PresetOptions {
    LandauParams landau;
    std::optional<double> chi; // overrides landau for landau-xy
    double c1 = 1.0, c2 = 1.0, l = 1.0;
    BlackBoxParams blackbox;
};

struct RunConfig {
    Command command = Command::Diag;
    std::vector<std::string> inputs; // "-" reads stdin
    std::optional<std::string> model; // landau-z | landau-xy | lcc | blackbox
    PresetOptions preset;
    InputKind kind = InputKind::Auto;
    Tolerance tol;
    OutputFormat format = OutputFormat::Text;
    QuantizeMode mode = QuantizeMode::Both;
    bool transmon_override = false;
    bool symplectic_w = false;
    double cross_tolerance = 1e-6;
    std::optional<std::string> transform; // verify: candidate S to check instead of computing one

    // Throws InvalidArgument when the combination is unusable.
    void validate() const;
};

std::optional<Command> parse_command(const std::string& name);
const std::vector<std::string>& preset_names();

// Runs one command; results go to out, diagnostics to err. Never throws.
int run(const RunConfig& config, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace symq::cli
