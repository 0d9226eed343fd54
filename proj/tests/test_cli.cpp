#include "symq/cli.hpp"
#include "symq/models.hpp"
#include "symq/serialize.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace symq;
using namespace symq::cli;

namespace {

struct Outcome {
    int code = 0;
    std::string out, err;
};

Outcome run_with(RunConfig config, const std::string& stdin_text = "") {
    std::istringstream in(stdin_text);
    std::ostringstream out, err;
    const int code = run(config, in, out, err);
    return {code, out.str(), err.str()};
}

RunConfig preset(Command command, const std::string& name, OutputFormat format = OutputFormat::Json) {
    RunConfig c;
    c.command = command;
    c.model = name;
    c.format = format;
    return c;
}

RunConfig from_stdin(Command command, OutputFormat format = OutputFormat::Json) {
    RunConfig c;
    c.command = command;
    c.inputs = {"-"};
    c.format = format;
    return c;
}

} // namespace

TEST(Cli, DiagBlackBoxJson) {
    const auto r = run_with(preset(Command::Diag, "blackbox"));
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const Json doc = Json::parse(r.out);
    ASSERT_EQ(doc["omega"].size(), 2u);
    EXPECT_NEAR(doc["omega"][0].get<double>(), 2.52434, 1e-5);
    EXPECT_NEAR(doc["omega"][1].get<double>(), 0.792287, 1e-6);
}

TEST(Cli, DofOfZeroMatrix) {
    const auto r = run_with(from_stdin(Command::Dof), "{\"rows\":4,\"cols\":4,\"entries\":[0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0]}");
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const Json doc = Json::parse(r.out);
    EXPECT_EQ(doc["n_nd"], 2);
    EXPECT_EQ(doc["n_f"], 0);
    EXPECT_EQ(doc["n_ho"], 0);
}

TEST(Cli, QuantizeBothOnNetlist) {
    RunConfig c = from_stdin(Command::Quantize);
    c.kind = InputKind::Netlist;
    c.transmon_override = true;
    const auto r = run_with(c, serialize(blackbox_netlist(BlackBoxParams{})));
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const Json doc = Json::parse(r.out);
    EXPECT_LE(doc["cross_validation"]["max_delta"].get<double>(), 1e-6);
    EXPECT_EQ(doc["blackbox"]["mode_freqs"].size(), 4u);
    EXPECT_EQ(doc["two_tier"]["mode_freqs"].size(), 2u);
}

TEST(Cli, LccTextTable) {
    RunConfig c = preset(Command::Diag, "lcc", OutputFormat::Text);
    c.preset.c1 = 1.0;
    c.preset.c2 = 2.0;
    c.preset.l = 3.0;
    const auto r = run_with(c);
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("nondynamical  1"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("free          1"), std::string::npos) << r.out;
    // Series capacitance 2/3 with L = 3.
    EXPECT_NE(r.out.find("harmonic      1      0.707107"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("residuals:"), std::string::npos);
}

TEST(Cli, EmptySystem) {
    const auto r = run_with(from_stdin(Command::Diag, OutputFormat::Text), "\n");
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out, "no degrees of freedom\n");
}

TEST(Cli, VerifyFailureNamesIdentity) {
    RunConfig c = from_stdin(Command::Verify, OutputFormat::Text);
    // A scaled identity is not symplectic.
    const std::string path = ::testing::TempDir() + "symq_bad_transform.csv";
    {
        std::ofstream f(path);
        f << "2,0\n0,1\n";
    }
    c.transform = path;
    const auto r = run_with(c, "2,0\n0,1\n");
    EXPECT_EQ(r.code, kExitDomain);
    EXPECT_NE(r.out.find("residuals: S^T H S = H_D"), std::string::npos) << r.out;
    EXPECT_NE(r.err.find("S^T"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("VerificationFailure"), std::string::npos) << r.err;
}

TEST(Cli, VerifyPasses) {
    const auto r = run_with(from_stdin(Command::Verify, OutputFormat::Text), "2,0\n0,1\n");
    EXPECT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("verified"), std::string::npos);
}

TEST(Cli, ExitCodeContract) {
    // Domain errors.
    EXPECT_EQ(run_with(from_stdin(Command::Diag), "-1,0\n0,1\n").code, kExitDomain);             // NotPSD
    EXPECT_EQ(run_with(from_stdin(Command::Diag), "1,0,0\n").code, kExitDomain);                  // NotSquare
    EXPECT_EQ(run_with(preset(Command::Quantize, "blackbox")).code, kExitDomain);                // compact phase
    RunConfig netlist = from_stdin(Command::Diag);
    netlist.kind = InputKind::Netlist;
    EXPECT_EQ(run_with(netlist, "C a 1\nL l 1 b:+\n").code, kExitDomain);                       // parse error
    EXPECT_EQ(run_with(from_stdin(Command::Diag), "1,x\n").code, kExitDomain);                   // malformed matrix
    // I/O and usage errors.
    RunConfig missing;
    missing.inputs = {"/nonexistent/h.json"};
    EXPECT_EQ(run_with(missing).code, kExitIo);
    EXPECT_EQ(run_with(RunConfig{}).code, kExitIo);
    RunConfig bad_tol = preset(Command::Diag, "blackbox");
    bad_tol.tol.rank_rel = 2.0;
    EXPECT_EQ(run_with(bad_tol).code, kExitIo);
}

TEST(Cli, StructuredDiagnostics) {
    RunConfig c = from_stdin(Command::Diag);
    c.kind = InputKind::Netlist;
    const auto r = run_with(c, "C a 1\nL l 1 b:+\n");
    const Json err = Json::parse(r.err);
    EXPECT_EQ(err["code"], "UnknownReference");
    EXPECT_EQ(err["line"], 2);
    EXPECT_EQ(err["input"], "<stdin>");
}

TEST(Cli, JsonIsDeterministic) {
    RunConfig c = preset(Command::Quantize, "blackbox");
    c.transmon_override = true;
    const auto a = run_with(c), b = run_with(c);
    ASSERT_EQ(a.code, kExitOk);
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, ModelPresets) {
    for (const auto& name : preset_names()) {
        const auto r = run_with(preset(Command::Model, name));
        ASSERT_EQ(r.code, kExitOk) << name << r.err;
        const Json doc = Json::parse(r.out);
        EXPECT_TRUE(doc.contains("schema")) << name;
    }
    RunConfig xy = preset(Command::Diag, "landau-xy");
    xy.preset.chi = 1.0;
    const Json doc = Json::parse(run_with(xy).out);
    EXPECT_EQ(doc["counts"]["n_nd"], 1);
    EXPECT_EQ(doc["counts"]["n_ho"], 3);
}
