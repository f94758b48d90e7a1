#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "example_data.hpp"
#include "support.hpp"

#ifndef PSDOCALC_PATH
#error "PSDOCALC_PATH must name the psdocalc binary"
#endif

using namespace psdo;
using testing_support::op;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

// args are passed through sh, so quote as on a command line
Outcome run(const std::string& args, const std::string& input = "") {
  std::string cmd = std::string("'") + PSDOCALC_PATH + "' " + args + " 2>/dev/null";
  std::string in_file;
  if (!input.empty()) {
    in_file = ::testing::TempDir() + "psdocalc_stdin.txt";
    std::ofstream(in_file) << input;
    cmd += " < '" + in_file + "'";
  } else {
    cmd += " < /dev/null";
  }
  Outcome r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// text output: header line, then the value
std::string body(const Outcome& r) {
  auto nl = r.out.find('\n');
  std::string b = nl == std::string::npos ? "" : r.out.substr(nl + 1);
  while (!b.empty() && b.back() == '\n') b.pop_back();
  return b;
}

}  // namespace

TEST(Cli, ExitCodeMatrix) {
  struct Case {
    const char* args;
    int code;
  };
  const Case cases[] = {
      {"--n 2 mul 'd2*a' d1", 0},
      {"--help", 0},
      {"--n 1 --window -2 lax-check --alpha 2 --kind pminus --depth 3", 0},
      {"--n 2 --window -2,-2 lax-check --alpha 1,1 --kind instant --depth 4", 0},
      {"--n 1 --deg 3 tau-what --tau 't[1]' --at 't[1]=3'", 0},
      {"--n 2 --deg 3 lemma42 '1 + f*z1^-1*z2^-1' --mode constrained", 0},
      // a checker with a witness
      {"--n 2 --deg 3 lemma42 '1 + f*z1^-1*z2^-1' --mode paper", 1},
      {"--n 2 --deg 4 kernel-diff", 1},
      // usage, parse, window, domain
      {"", 2},
      {"--bogus mul d1", 2},
      {"--n 2 --window 1 mul d1", 2},
      {"--n 2 mul 'd2 +'", 2},
      {"--n 2 --symbols a,b mul 'c*d1'", 2},
      {"--n 2 res-d 'd2 + O(d2^0)'", 2},
      {"--n 1 --window -3 lax-check --alpha 3 --kind pminus --depth 3", 2},
      {"--n 1 --deg 3 tau-what --tau 't[1]' --at 't[1]=0'", 2},
      {"--n 2 power d1 --k -1", 2},
      {"--n 2 lax-check --alpha 1,1", 2},
  };
  for (const auto& c : cases) EXPECT_EQ(run(c.args).code, c.code) << c.args;
}

TEST(Cli, TextRoundTrip) {
  Outcome a = run("--n 2 --window -3,-3 mul 'd2 + a*d2^-1' 'd1 + b*d2^-2'");
  ASSERT_EQ(a.code, 0);
  const std::string first = body(a);
  PsdOp lib = ps_mul(op("d2 + a*d2^-1"), op("d1 + b*d2^-2"), Window::box(2, -3));
  EXPECT_EQ(op(first).terms(), lib.terms());
  // feeding the printed result back through stdin reproduces it
  Outcome b = run("--n 2 mul", first + "\n");
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(body(b), first);
}

TEST(Cli, JsonRoundTrip) {
  Outcome a = run("--n 2 --window -2,-2 --format json inverse '1 + a*d2^-1 + b*d1^-1*d2^-1'");
  ASSERT_EQ(a.code, 0);
  Json j = Json::parse(a.out);
  EXPECT_EQ(j.at("command"), "inverse");
  EXPECT_EQ(j.at("schema_version"), kSchemaVersion);
  PsdOp got = operator_from_json(j.at("result"));
  PsdOp lib = ps_inverse(op("1 + a*d2^-1 + b*d1^-1*d2^-1"), Window::box(2, -2));
  EXPECT_EQ(got.terms(), lib.terms());
  EXPECT_EQ(got.window(), lib.window());
  // the text field parses back through the CLI
  Outcome b = run("--n 2 --format json mul", j.at("result").at("text").get<std::string>() + "\n");
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(operator_from_json(Json::parse(b.out).at("result")).terms(), lib.terms());
}

TEST(Cli, DocumentedExamplePipeline) {
  Outcome raw = run("--format json " + example::cli_command_args);
  ASSERT_EQ(raw.code, 0);
  Outcome red = run("--n 2 --alias s=t[1,1] --alias t=t[1,2] --format json reduce --set 'a_{y}=0' --set 'c_{y}=0'", raw.out);
  ASSERT_EQ(red.code, 0);
  PdeSystem sys = pde_system_from_json(Json::parse(red.out).at("result"));
  ParseContext ctx(2);
  ctx.style.aliases[MultiIndex{1, 1}] = "s";
  ctx.style.aliases[MultiIndex{1, 2}] = "t";
  ASSERT_EQ(sys.size(), example::pdes.size());
  for (const auto& g : example::pdes) {
    const PdeEquation* e = sys.find(MultiIndex(g.monomial));
    ASSERT_NE(e, nullptr);
    DiffPoly want = parse_diffpoly(g.expanded, ctx);
    EXPECT_TRUE(e->equation == want || e->equation == -want) << render(e->equation, ctx.style);
  }
  // text form of the same command lists one equation per monomial
  Outcome text = run(example::cli_command_args);
  ASSERT_EQ(text.code, 0);
  EXPECT_NE(text.out.find("(1,1): 2*a_{yy} + a_{s} - 4*d_{y} = 0"), std::string::npos) << text.out;
}
