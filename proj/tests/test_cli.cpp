#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#ifndef TYPESLAB_CLI_PATH
#error "TYPESLAB_CLI_PATH must point at the built binary"
#endif
#ifndef TYPESLAB_SCENARIO_DIR
#error "TYPESLAB_SCENARIO_DIR must point at the scenario files"
#endif

namespace {

struct CliResult {
    int code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args, const std::string& env = "") {
    std::string cmd = env + (env.empty() ? "" : " ") + TYPESLAB_CLI_PATH + " " + args +
                      " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult r;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string scenario(const char* name) {
    return std::string(TYPESLAB_SCENARIO_DIR) + "/" + name;
}

std::string write_temp(const char* name, const std::string& text) {
    std::string path = std::string("/tmp/") + name;
    std::ofstream out(path);
    out << text;
    return path;
}

int count_lines_with(const std::string& text, const std::string& needle) {
    int count = 0;
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

const char* kHeader = "scenario,command,n,kind,index_j,quantity,value,mode,seconds";

}  // namespace

TEST_CASE("project I emits the boundary point and its divergence") {
    CliResult r = run_cli("project --scenario " + scenario("s1.scn") + " --kind I");
    CHECK(r.code == 0);
    CHECK(r.out.rfind(kHeader, 0) == 0);
    CHECK(r.out.find("s1,project,0,I,0,p[1],0.75,exact,0") != std::string::npos);
    CHECK(r.out.find("s1,project,0,I,0,p[2],0.25,exact,0") != std::string::npos);
    CHECK(r.out.find(",objective,0.130812") != std::string::npos);
    CHECK(r.out.find(",proper,1,") != std::string::npos);
    CHECK(r.out.find(",k,1,") != std::string::npos);
}

TEST_CASE("every row has the nine schema fields") {
    CliResult r = run_cli("concentrate --scenario " + scenario("s2.scn"));
    CHECK(r.code == 0);
    std::size_t start = 0;
    int rows = 0;
    while (start < r.out.size()) {
        std::size_t end = r.out.find('\n', start);
        if (end == std::string::npos) break;
        std::string line = r.out.substr(start, end - start);
        start = end + 1;
        if (line.empty()) continue;
        int commas = count_lines_with(line, ",");
        CHECK(commas == 8);
        ++rows;
    }
    CHECK(rows >= 10);
}

TEST_CASE("finite-kind projections sweep the scenario lengths") {
    CliResult r = run_cli("project --scenario " + scenario("s2.scn") + " --kind mu");
    CHECK(r.code == 0);
    // two tied most probable types at n = 4
    CHECK(r.out.find("s2,project,4,mu,0,p[1],0.25,exact,0") != std::string::npos);
    CHECK(r.out.find("s2,project,4,mu,1,p[1],0.75,exact,0") != std::string::npos);
    CHECK(r.out.find("s2,project,4,mu,0,k,2,exact,0") != std::string::npos);
}

TEST_CASE("concentrate output is byte-identical across runs and workers") {
    std::string args = "concentrate --scenario " + scenario("s2.scn");
    CliResult a = run_cli(args);
    CliResult b = run_cli(args);
    CliResult c = run_cli(args, "TYPESLAB_THREADS=3");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    CHECK(count_lines_with(a.out, ",mass,") == 12);        // 2 balls x 6 lengths
    CHECK(count_lines_with(a.out, ",complement,") == 6);
}

TEST_CASE("gibbs reproduces the small-sample prefix law") {
    CliResult r = run_cli("gibbs --scenario " + scenario("s1.scn"));
    CHECK(r.code == 0);
    CHECK(r.out.find("s1,gibbs,4,,0,prefix_law,0.8,exact,0") != std::string::npos);
    CHECK(r.out.find("s1,gibbs,4,I,0,mixture,0.75,exact,0") != std::string::npos);
    CHECK(r.out.find(",mu,0,mixture,") != std::string::npos);
    // the gap at n = 2000 is small
    std::size_t pos = r.out.find("s1,gibbs,2000,I,0,gap,");
    REQUIRE(pos != std::string::npos);
    double gap = std::strtod(r.out.c_str() + pos + 22, nullptr);
    CHECK(gap <= 0.01);
}

TEST_CASE("undefined sweep points are rows, not crashes") {
    // odd lengths make the mean constraint unattainable
    std::string path = write_temp("typeslab_odd.scn",
                                  "scenario: odd\n"
                                  "alphabet:\n"
                                  "  labels: -1 0 1\n"
                                  "  values: -1 0 1\n"
                                  "source: 1/3 1/3 1/3\n"
                                  "set: half-mean\n"
                                  "  piece:\n"
                                  "    mean = 1/2\n"
                                  "sweep:\n"
                                  "  n: 5 6\n"
                                  "output:\n"
                                  "  mode: exact\n"
                                  "  format: csv\n");
    CliResult r = run_cli("concentrate --scenario " + path);
    CHECK(r.code == 0);
    CHECK(r.out.find("odd,concentrate,5,I,0,mass,undefined,exact,0") != std::string::npos);
    CHECK(r.out.find("odd,concentrate,6,I,0,mass,") != std::string::npos);
}

TEST_CASE("json output mirrors the rows and carries the projections") {
    CliResult r = run_cli("project --scenario " + scenario("s1.scn") +
                          " --kind I --out json");
    CHECK(r.code == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    REQUIRE(j.contains("records"));
    REQUIRE(j.contains("projections"));
    REQUIRE(j["projections"].size() == 1);
    auto& ps = j["projections"][0];
    CHECK(ps["kind"] == "I");
    CHECK(ps["k"] == 1);
    double p0 = ps["points"][0]["point"][0].get<double>();
    CHECK(p0 == doctest::Approx(0.75).epsilon(1e-9));
    bool found = false;
    for (const auto& rec : j["records"])
        if (rec["quantity"] == "objective") {
            found = true;
            CHECK(rec["value"].get<double>() == doctest::Approx(0.130812).epsilon(1e-4));
        }
    CHECK(found);
}

TEST_CASE("verify passes its own checks deterministically") {
    std::string args = "verify --scenario " + scenario("s1.scn") + " --samples 200000";
    CliResult a = run_cli(args);
    CHECK(a.code == 0);
    CHECK(a.out.find(",fail,") == std::string::npos);
    CHECK(a.out.find(",oracle_mass,pass,") != std::string::npos);
    CHECK(a.out.find(",mode_agreement,pass,") != std::string::npos);
    CHECK(a.out.find(",lemma_violations,0,") != std::string::npos);
    CHECK(a.out.find(",mc_mass,pass,") != std::string::npos);
    CliResult b = run_cli(args);
    CHECK(a.out == b.out);
}

TEST_CASE("exit codes distinguish the failure classes") {
    CHECK(run_cli("").code == 2);                       // no subcommand
    CHECK(run_cli("project --kind I").code == 2);       // missing --scenario
    CHECK(run_cli("project --scenario " + scenario("s1.scn") + " --kind Z").code == 2);
    CHECK(run_cli("project --scenario /no/such/file.scn --kind I").code == 7);

    std::string bad = write_temp("typeslab_bad.scn", "scenario: broken\nwhat: ever\n");
    CHECK(run_cli("project --scenario " + bad + " --kind I").code == 3);

    // strict inequality in a constraint is a parse error
    std::string strict = write_temp("typeslab_strict.scn",
                                    "scenario: strict\n"
                                    "alphabet:\n"
                                    "  labels: a b\n"
                                    "source: 1/2 1/2\n"
                                    "set: open\n"
                                    "  piece:\n"
                                    "    p[1] > 3/4\n"
                                    "output:\n"
                                    "  mode: exact\n"
                                    "  format: csv\n");
    CHECK(run_cli("project --scenario " + strict + " --kind I").code == 3);

    // double weighting needs lengths divisible by the source denominators
    std::string thirds = write_temp("typeslab_thirds.scn",
                                    "scenario: thirds\n"
                                    "alphabet:\n"
                                    "  labels: a b\n"
                                    "source: 1/3 2/3\n"
                                    "set: tail\n"
                                    "  piece:\n"
                                    "    p[1] >= 2/3\n"
                                    "sweep:\n"
                                    "  n: 4\n"
                                    "output:\n"
                                    "  mode: exact\n"
                                    "  format: csv\n");
    CHECK(run_cli("project --scenario " + thirds + " --kind gamma").code == 4);

    // empty feasible type set is a feasibility error for project
    std::string odd = write_temp("typeslab_odd5.scn",
                                 "scenario: odd5\n"
                                 "alphabet:\n"
                                 "  labels: -1 0 1\n"
                                 "  values: -1 0 1\n"
                                 "source: 1/3 1/3 1/3\n"
                                 "set: half-mean\n"
                                 "  piece:\n"
                                 "    mean = 1/2\n"
                                 "sweep:\n"
                                 "  n: 5\n"
                                 "output:\n"
                                 "  mode: exact\n"
                                 "  format: csv\n");
    CHECK(run_cli("project --scenario " + odd + " --kind mu").code == 5);

    // a ball radius that merges the two tails is a configuration error
    CHECK(run_cli("concentrate --scenario " + scenario("s2.scn") + " --epsilon 2").code ==
          4);

    // sweepless scenarios cannot drive finite-n commands
    std::string nosweep = write_temp("typeslab_nosweep.scn",
                                     "scenario: nosweep\n"
                                     "alphabet:\n"
                                     "  labels: a b\n"
                                     "source: 1/2 1/2\n"
                                     "set: tail\n"
                                     "  piece:\n"
                                     "    p[1] >= 3/4\n"
                                     "output:\n"
                                     "  mode: exact\n"
                                     "  format: csv\n");
    CHECK(run_cli("concentrate --scenario " + nosweep).code == 2);
    CHECK(run_cli("project --scenario " + nosweep + " --kind mu").code == 2);
}

TEST_CASE("jeffreys weighting keeps the two-tail symmetry") {
    CliResult r = run_cli("jeffreys --scenario " + scenario("s2.scn"));
    CHECK(r.code == 0);
    // masses of the two balls at n = 2000 appear as index 0 and 1; equal text
    std::size_t p0 = r.out.find("s2,jeffreys,2000,J,0,mass,");
    std::size_t p1 = r.out.find("s2,jeffreys,2000,J,1,mass,");
    REQUIRE(p0 != std::string::npos);
    REQUIRE(p1 != std::string::npos);
    std::string v0 = r.out.substr(p0 + 26, r.out.find(',', p0 + 26) - (p0 + 26));
    std::string v1 = r.out.substr(p1 + 26, r.out.find(',', p1 + 26) - (p1 + 26));
    CHECK(v0 == v1);
}

TEST_CASE("log mode approximates exact mode through the CLI") {
    std::string base = "concentrate --scenario " + scenario("s1.scn");
    CliResult ex = run_cli(base + " --mode exact");
    CliResult lg = run_cli(base + " --mode log");
    CHECK(ex.code == 0);
    CHECK(lg.code == 0);
    auto grab = [](const std::string& out, const std::string& key) {
        std::size_t pos = out.find(key);
        REQUIRE(pos != std::string::npos);
        return std::strtod(out.c_str() + pos + key.size(), nullptr);
    };
    double me = grab(ex.out, "s1,concentrate,2000,I,0,mass,");
    double ml = grab(lg.out, "s1,concentrate,2000,I,0,mass,");
    CHECK(me == doctest::Approx(ml).epsilon(1e-10));
    CHECK(me >= 0.999);
}
