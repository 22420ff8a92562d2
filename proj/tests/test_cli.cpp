// Copyright 2026 The pmx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pmx/cli.hpp"
#include "pmx/pmx_file.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pmx {
namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "pmx");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    Result r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string temp_path(const std::string &name) {
    auto dir = std::filesystem::temp_directory_path() / "pmx_cli_tests";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

// Runs the installed binary through the shell with an environment prefix.
Result run_binary(const std::string &env, const std::string &args) {
    const std::string out_file = temp_path("stdout.txt");
    const std::string cmd = env + " '" + std::string(PMX_BINARY) + "' " + args + " > '" + out_file + "' 2>&1";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file);
    r.out.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return r;
}

bool contains(const std::string &haystack, const std::string &needle) {
    return haystack.find(needle) != std::string::npos;
}

TEST(Parse, StateVector) {
    ComplexVector v = parse_state_vector("1, 0:1,-0.5:-2");
    ASSERT_EQ(v.size(), 3);
    EXPECT_EQ(v(0), Complex(1.0, 0.0));
    EXPECT_EQ(v(1), Complex(0.0, 1.0));
    EXPECT_EQ(v(2), Complex(-0.5, -2.0));
    EXPECT_THROW(parse_state_vector("1,,0"), std::invalid_argument);
    EXPECT_THROW(parse_state_vector("1:2:3"), std::invalid_argument);
    EXPECT_THROW(parse_state_vector("abc"), std::invalid_argument);
}

TEST(Parse, Angles) {
    EXPECT_DOUBLE_EQ(parse_angle("0"), 0.0);
    EXPECT_DOUBLE_EQ(parse_angle("pi/4"), M_PI / 4);
    EXPECT_DOUBLE_EQ(parse_angle("-3pi/2"), -1.5 * M_PI);
    EXPECT_DOUBLE_EQ(parse_angle("0.5pi"), 0.5 * M_PI);
    EXPECT_DOUBLE_EQ(parse_angle("2*pi"), 2 * M_PI);
    EXPECT_DOUBLE_EQ(parse_angle(" 0.25 "), 0.25);
    EXPECT_THROW(parse_angle("pi/0"), std::invalid_argument);
    EXPECT_THROW(parse_angle("tau"), std::invalid_argument);
    auto list = parse_angle_list("0,pi/4,pi/2");
    ASSERT_EQ(list.size(), 3u);
    EXPECT_DOUBLE_EQ(list[2], M_PI / 2);
    EXPECT_THROW(parse_angle_list("0,"), std::invalid_argument);
}

TEST(Build, NamedProcessesAreValidExceptLocalLoop) {
    for (const std::string name : {"state", "channel", "wocb", "switch", "extended-switch"}) {
        const ProcessMatrix w = build_named(name, ComplexVector(), Direction::a_to_b);
        EXPECT_TRUE(validate(w).valid()) << name;
    }
    EXPECT_FALSE(validate(build_named("wll", ComplexVector(), Direction::a_to_b)).valid());
    EXPECT_EQ(build_named("switch", ComplexVector(), Direction::a_to_b).dim(), 64u);
    EXPECT_THROW(build_named("teleport", ComplexVector(), Direction::a_to_b), std::invalid_argument);
    EXPECT_THROW(build_named("wocb", ComplexVector::Ones(2), Direction::a_to_b), std::invalid_argument);
    EXPECT_THROW(build_named("switch", ComplexVector::Zero(2), Direction::a_to_b), std::invalid_argument);
    EXPECT_THROW(build_named("state", ComplexVector::Ones(2), Direction::a_to_b), std::invalid_argument);
}

TEST(Build, PsiIsNormalized) {
    ComplexVector raw(2);
    raw << 3.0, 4.0;
    ComplexVector unit(2);
    unit << 0.6, 0.8;
    EXPECT_LE(max_norm(build_named("switch", raw, Direction::a_to_b).matrix() - quantum_switch(unit).matrix()), 1e-14);
}

TEST(Cli, BuildThenValidate) {
    const std::string wocb = temp_path("wocb.pmx"), wll = temp_path("wll.pmx"), sw = temp_path("switch.pmx");
    EXPECT_EQ(run({"build", "wocb", "-o", wocb}).code, 0);
    EXPECT_EQ(run({"build", "wll", "-o", wll}).code, 0);
    EXPECT_EQ(run({"build", "switch", "--psi", "1,1", "-o", sw}).code, 0);
    auto ok = run({"validate", wocb});
    EXPECT_EQ(ok.code, 0);
    EXPECT_TRUE(contains(ok.out, "verdict=valid"));
    EXPECT_TRUE(contains(ok.out, "positivity residual="));
    EXPECT_TRUE(contains(ok.out, "trace residual="));
    EXPECT_TRUE(contains(ok.out, "subspace residual="));
    auto bad = run({"validate", wll});
    EXPECT_EQ(bad.code, 1);
    EXPECT_TRUE(contains(bad.out, "failed=subspace"));
    EXPECT_EQ(read_pmx(sw).dim(), 64u);
    EXPECT_EQ(run({"validate", sw}).code, 0);
}

TEST(Cli, BuildIsDeterministicAndRoundTrips) {
    const std::string a = temp_path("a.pmx"), b = temp_path("b.pmx");
    ASSERT_EQ(run({"build", "channel", "--direction", "b_to_a", "--psi", "0.6,0:0.8", "-o", a}).code, 0);
    ASSERT_EQ(run({"build", "channel", "--direction", "b_to_a", "--psi", "0.6,0:0.8", "-o", b}).code, 0);
    std::ifstream fa(a), fb(b);
    std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    EXPECT_EQ(sa, sb);
    ComplexVector psi(2);
    psi << 0.6, Complex(0, 0.8);
    ProcessMatrix expected = build_named("channel", psi, Direction::b_to_a);
    EXPECT_TRUE((read_pmx(a).matrix().array() == expected.matrix().array()).all());
    EXPECT_EQ(causal_order_flags(read_pmx(a)), CausalFlags::b_to_a);
}

TEST(Cli, UsageErrorsExitTwo) {
    const std::string f = temp_path("unused.pmx");
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"build", "teleport", "-o", f}).code, 2);
    EXPECT_EQ(run({"build", "wocb"}).code, 2);
    EXPECT_EQ(run({"build", "wocb", "--psi", "1,0", "-o", f}).code, 2);
    EXPECT_EQ(run({"build", "channel", "--direction", "sideways", "-o", f}).code, 2);
    EXPECT_EQ(run({"build", "switch", "--psi", "1,x", "-o", f}).code, 2);
    EXPECT_EQ(run({"verify", "everything"}).code, 2);
    EXPECT_EQ(run({"verify", "rigidity", "--seed", "minus"}).code, 2);
    EXPECT_EQ(run({"sweep"}).code, 2);
    EXPECT_EQ(run({"sweep", "--lambdas", "0,banana"}).code, 2);
    EXPECT_EQ(run({"build", "wocb", "-o", "/nonexistent/dir/x.pmx"}).code, 2);
}

TEST(Cli, HelpExitsZero) {
    auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(contains(r.out, "validate"));
}

TEST(Cli, ValidateRejectsCorruptAndMissingFiles) {
    const std::string f = temp_path("corrupt.pmx");
    {
        std::ofstream out(f);
        out << "{\"format_version\": \"1\", \"factors\": [";
    }
    auto r = run({"validate", f});
    EXPECT_EQ(r.code, 2);
    EXPECT_TRUE(contains(r.err, "invalid JSON"));
    EXPECT_EQ(run({"validate", temp_path("missing.pmx")}).code, 2);
}

TEST(Cli, VerifySuites) {
    auto rig = run({"verify", "rigidity"});
    EXPECT_EQ(rig.code, 0);
    EXPECT_TRUE(contains(rig.out, "kernel_dim=12 expected=12 PASS"));
    EXPECT_TRUE(contains(rig.out, "kernel_dim=6 expected=6 PASS"));
    auto ext = run({"verify", "extremality"});
    EXPECT_EQ(ext.code, 0);
    EXPECT_TRUE(contains(ext.out, "wocb_rank=8 intersection_dim=1 dariano_card=268 PASS"));
    auto hier = run({"verify", "hierarchy", "--seed", "7"});
    EXPECT_EQ(hier.code, 0);
    EXPECT_TRUE(contains(hier.out, "hierarchy PASS"));
}

TEST(Cli, VerifySwitch) {
    auto r = run({"verify", "switch"});
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(contains(r.out, "cswap_output_matches_switch=true"));
    EXPECT_TRUE(contains(r.out, "vlambda_pi4_fails_eq7=true"));
    EXPECT_TRUE(contains(r.out, "switch PASS"));
}

TEST(Cli, SweepReportsFlagsAndOverlap) {
    auto r = run({"sweep", "--lambdas", "0,pi/4,pi/2"});
    EXPECT_EQ(r.code, 0);
    std::istringstream lines(r.out);
    std::string l0, l1, l2;
    std::getline(lines, l0);
    std::getline(lines, l1);
    std::getline(lines, l2);
    EXPECT_TRUE(contains(l0, "valid=true flags=A_to_B"));
    EXPECT_TRUE(contains(l1, "flags=neither switch_overlap=1.000000000000"));
    EXPECT_TRUE(contains(l2, "valid=true flags=B_to_A"));
}

TEST(Cli, ToleranceOverrideFromEnvironment) {
    const std::string wocb = temp_path("tol_wocb.pmx");
    ASSERT_EQ(run({"build", "wocb", "-o", wocb}).code, 0);
    EXPECT_EQ(run_binary("PMX_TOL=1e-6", "validate '" + wocb + "'").code, 0);
    EXPECT_TRUE(contains(run_binary("PMX_TOL=1e-6", "validate '" + wocb + "'").out, "tolerance=1.000e-06"));
    EXPECT_EQ(run_binary("PMX_TOL=banana", "validate '" + wocb + "'").code, 2);
    EXPECT_EQ(run_binary("PMX_TOL=-1", "validate '" + wocb + "'").code, 2);
    // A tolerance loose enough to accept the local loop.
    const std::string wll = temp_path("tol_wll.pmx");
    ASSERT_EQ(run({"build", "wll", "-o", wll}).code, 0);
    EXPECT_EQ(run_binary("PMX_TOL=2", "validate '" + wll + "'").code, 0);
    EXPECT_EQ(run_binary("", "validate '" + wll + "'").code, 1);
}

}  // namespace
}  // namespace pmx
