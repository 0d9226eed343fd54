#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace symq {

// Source position (1-based). Positions are metadata: they never take part in equality.
struct SourceLoc {
    int line = 0;
    int col = 0;
    friend bool operator==(const SourceLoc&, const SourceLoc&) { return true; }
};

// A weighted reference to another element (capacitor or inductor).
struct Incidence {
    std::string target;
    double coefficient = 1.0;
    SourceLoc loc;
    bool operator==(const Incidence&) const = default;
};

struct Capacitor {
    std::string name;
    double value = 0.0;
    SourceLoc loc;
    bool operator==(const Capacitor&) const = default;
};

// Loop-charge element; incidences form its row of the coupling matrix D.
struct Inductor {
    std::string name;
    double value = 0.0;
    std::vector<Incidence> incidences;
    SourceLoc loc;
    bool operator==(const Inductor&) const = default;
};

struct Gyrator {
    std::string name;
    double r = 0.0;
    std::vector<Incidence> ports; // inductor references, coefficient unused
    SourceLoc loc;
    bool operator==(const Gyrator&) const = default;
};

struct Circulator {
    std::string name;
    double r = 0.0;
    std::vector<Incidence> ports;
    std::optional<std::vector<double>> s; // row-major 3x3 scattering matrix
    SourceLoc loc;
    bool operator==(const Circulator&) const = default;
};

// Belevitch transformer: left ports couple capacitors, right ports couple inductors.
struct Transformer {
    std::string name;
    std::vector<std::vector<Incidence>> left;
    std::vector<std::vector<Incidence>> right;
    std::vector<std::vector<double>> turns; // left.size() x right.size()
    SourceLoc loc;
    bool operator==(const Transformer&) const = default;
};

struct Junction {
    std::string name;
    double energy = 0.0;
    std::optional<Incidence> anchor; // shunt capacitor (JJ) or series inductor (PS)
    bool island = true;
    SourceLoc loc;
    bool operator==(const Junction&) const = default;
};

struct Netlist {
    std::vector<Capacitor> capacitors;
    std::vector<Inductor> inductors;
    std::vector<Gyrator> gyrators;
    std::vector<Circulator> circulators;
    std::vector<Transformer> transformers;
    std::vector<Junction> josephson;
    std::vector<Junction> phase_slips;
    bool operator==(const Netlist&) const = default;

    bool empty() const;
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    SourceLoc loc;
    std::string code;
    std::string message;
};

// Throws SourceError (SyntaxError, UnknownReference, DuplicateName) at the first problem.
Netlist parse_netlist(std::string_view text);

// Structured diagnostics ordered by source location; no errors means buildable.
std::vector<Diagnostic> validate(const Netlist& netlist);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

// Canonical text form; parse(serialize(n)) == n.
std::string serialize(const Netlist& netlist);

// Shortest text that parses back to the same double.
std::string format_number(double value);

} // namespace symq
