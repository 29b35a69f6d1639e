#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coherence/cli.hpp"
#include "coherence/io.hpp"
#include "oracles.hpp"

using namespace coherence;
using io::Json;

namespace {

std::string fixture(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

struct Run {
  int code;
  std::string out;
  std::string err;
  Json json() const { return Json::parse(out); }
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "coherence_lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "coherence_lab_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Complex entry(const Json& m, int i, int j) {
  return {m[i][j][0].get<double>(), m[i][j][1].get<double>()};
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("state round trips") {
  Rng rng(60);
  for (int t = 0; t < 30; ++t) {
    const int d = rng.uniform_int(2, 5);
    const PureState psi = random_pure_state(d, rng);
    const PureState back = io::pure_state_from_json(Json::parse(io::dump(io::to_json(psi))));
    CHECK((back.amplitudes() - psi.amplitudes()).cwiseAbs().maxCoeff() <= 1e-15);

    const DensityMatrix rho = random_mixed_state(d, rng.uniform_int(1, d), rng);
    const DensityMatrix rback = io::density_from_json(Json::parse(io::dump(io::to_json(rho))));
    CHECK(max_abs(rback.matrix() - rho.matrix()) <= 1e-15);
  }
}

TEST_CASE("Kraus round trip") {
  Rng rng(61);
  const KrausSet k = fsio_to_kraus(random_fsio(3, 3, rng));
  const KrausSet back = io::kraus_from_json(Json::parse(io::dump(io::to_json(k))));
  REQUIRE(back.size() == k.size());
  for (std::size_t n = 0; n < k.size(); ++n) CHECK(max_abs(back[n] - k[n]) <= 1e-15);
}

TEST_CASE("roof ensemble round trip") {
  const DensityMatrix rho = random_mixed_state(2, 2, RngSeed{62});
  RoofOptions opts;
  opts.restarts = 6;
  const RoofResult r = convex_roof_g(rho, opts);
  const Ensemble ens = io::roof_ensemble_from_json(Json::parse(io::dump(io::to_json(r))));
  CHECK(ens.reconstruction_error(rho) <= 1e-12);
  CHECK(std::abs(average_g(ens) - r.value) <= 1e-12);
}

TEST_CASE("fifteen significant digits") {
  CHECK(io::round15(0.1) == 0.1);
  CHECK(io::round15(1.0 / 3.0) == 0.333333333333333);
  CHECK(io::dump(io::complex_to_json(Complex(0.5, -2.0))) == "[\n  0.5,\n  -2.0\n]\n");
}

TEST_CASE("parse errors name the entry") {
  try {
    io::state_from_json(io::read_file(fixture("not_hermitian.json")));
    FAIL("expected a parse failure");
  } catch (const InvariantError& e) {
    CHECK(std::string(e.what()).find("state") != std::string::npos);
  }
  CHECK_THROWS_AS(io::read_file(fixture("malformed.json")), io::ParseError);
  CHECK_THROWS_AS(io::read_file(fixture("does_not_exist.json")), io::ParseError);
  CHECK_THROWS_AS(io::state_from_json(Json::parse(R"({"dim": 2})")), io::ParseError);
  CHECK_THROWS_AS(io::complex_from_json(Json::parse("[1]"), "z"), io::ParseError);
}

TEST_CASE("incomplete Kraus sets report the residual") {
  try {
    io::kraus_from_json(io::read_file(fixture("incomplete_d2.json")));
    FAIL("expected an incompleteness failure");
  } catch (const IncompleteKrausError& e) {
    CHECK(std::abs(e.residual() - 0.19) <= 1e-12);
  }
}

}

TEST_SUITE("cli") {

TEST_CASE("measure") {
  const Run plus = run_cli({"measure", "-i", fixture("psi_plus_d4.json")});
  REQUIRE(plus.code == cli::kOk);
  CHECK(std::abs(plus.json()["g"].get<double>() - 1.0) <= 1e-12);
  CHECK(std::abs(plus.json()["g_closed_form"].get<double>() - 1.0) <= 1e-12);

  const Run half = run_cli({"measure", "-i", fixture("diag_half.json")});
  CHECK(half.json()["g"].get<double>() == 0.0);
  CHECK(half.json()["l1"].get<double>() == 0.0);
  CHECK(half.json()["kind"] == "mixed");

  const Run p08 = run_cli({"measure", "-i", fixture("psi_08.json")});
  CHECK(std::abs(p08.json()["l1"].get<double>() - 0.8) <= 1e-14);
  CHECK(std::abs(p08.json()["g"].get<double>() - 0.8) <= 1e-14);

  const Run csv = run_cli({"measure", "-i", fixture("psi_08.json"), "--which", "l1", "--format", "csv"});
  CHECK(csv.out == "quantity,value\nl1,0.8\n");
}

TEST_CASE("classify") {
  const Run swap = run_cli({"classify", "-k", fixture("fsio_swap_d3.json")});
  REQUIRE(swap.code == cli::kOk);
  const Json s = swap.json();
  CHECK(s["most_specific"] == "FSIO");
  CHECK(s["certificate"]["pi"] == Json::array({2, 1, 3}));
  CHECK(s["flags"]["fsio"] == true);

  const Json merge = run_cli({"classify", "-k", fixture("fio_merge_d3.json")}).json();
  CHECK(merge["most_specific"] == "FIO");
  CHECK(merge["flags"]["fio"] == true);
  CHECK(merge["flags"]["sio"] == false);
  CHECK(merge["certificate"]["column_map"] == Json::array({2, 1, 2}));

  const Json gad = run_cli({"classify", "-k", fixture("gad_p1_e05.json")}).json();
  CHECK(gad["flags"]["fsio"] == false);
  CHECK(gad["flags"]["fio"] == false);
  CHECK(gad["flags"]["sio"] == true);
  CHECK(gad["most_specific"] == "SIO");

  const Run bad = run_cli({"classify", "-k", fixture("incomplete_d2.json")});
  CHECK(bad.code == cli::kParse);
  CHECK(bad.err.find("0.19") != std::string::npos);
}

TEST_CASE("apply") {
  const Run id = run_cli({"apply", "-k", fixture("identity_d2.json"), "-i", fixture("psi_08.json")});
  REQUIRE(id.code == cli::kOk);
  const Json rho = id.json()["rho"];
  CHECK(std::abs(entry(rho, 0, 0) - Complex(0.8)) <= 1e-15);
  CHECK(std::abs(entry(rho, 0, 1) - Complex(0.4)) <= 1e-15);

  const Json deph =
      run_cli({"apply", "-k", fixture("dephasing_d2.json"), "-i", fixture("psi_plus_d2.json")}).json();
  CHECK(std::abs(entry(deph["rho"], 0, 1)) <= 1e-15);

  const Json ad =
      run_cli({"apply", "-k", fixture("amplitude_damping_036.json"), "-i", fixture("psi_plus_d2.json")})
          .json();
  CHECK(std::abs(entry(ad["rho"], 0, 1) - Complex(0.4)) <= 1e-15);

  const Run mismatch =
      run_cli({"apply", "-k", fixture("fsio_swap_d3.json"), "-i", fixture("psi_08.json")});
  CHECK(mismatch.code == cli::kParse);
}

TEST_CASE("roof") {
  const Json pure = run_cli({"roof", "-i", fixture("psi_08.json")}).json();
  CHECK(std::abs(pure["value"].get<double>() - 0.8) <= 1e-12);
  CHECK(pure["converged"] == true);

  const Json inc = run_cli({"roof", "-i", fixture("diag_half.json")}).json();
  CHECK(inc["value"].get<double>() <= 1e-14);

  const DensityMatrix rho = random_mixed_state(2, 2, RngSeed{63});
  const auto path = scratch_dir() / "mixed_d2.json";
  io::write_file(path.string(), io::dump(io::to_json(rho)));
  const Run r = run_cli({"roof", "-i", path.string(), "--restarts", "8", "--seed", "3"});
  REQUIRE(r.code == cli::kOk);
  CHECK(std::abs(r.json()["value"].get<double>() - oracle::l1(rho.matrix())) <= 1e-6);
  CHECK(r.json()["lower_bound"].get<double>() <= r.json()["value"].get<double>());

  const auto out = scratch_dir() / "roof_out.json";
  const Run f = run_cli({"roof", "-i", fixture("psi_08.json"), "-o", out.string()});
  CHECK(f.out.rfind("value 0.8", 0) == 0);
  CHECK(Json::parse(slurp(out))["converged"] == true);
}

TEST_CASE("random draws are reproducible") {
  const Run a = run_cli({"random", "--kind", "mixed", "-d", "3", "--rank", "2", "--seed", "11"});
  const Run b = run_cli({"random", "--kind", "mixed", "-d", "3", "--rank", "2", "--seed", "11"});
  REQUIRE(a.code == cli::kOk);
  CHECK(a.out == b.out);
  CHECK(a.out != run_cli({"random", "--kind", "mixed", "-d", "3", "--seed", "12"}).out);

  const auto path = scratch_dir() / "random_fsio.json";
  const Run ch = run_cli({"random", "--kind", "fsio", "-d", "4", "--n-kraus", "3", "--seed", "5",
                      "-o", path.string()});
  REQUIRE(ch.code == cli::kOk);
  CHECK(run_cli({"classify", "-k", path.string()}).json()["most_specific"] == "FSIO");

  const Json st = run_cli({"random", "--kind", "state", "-d", "2", "--seed", "5"}).json();
  CHECK(st["amplitudes"].size() == 2);
}

TEST_CASE("seed from the environment") {
  ::setenv("COHERENCE_LAB_SEED", "77", 1);
  const Run env = run_cli({"random", "--kind", "state", "-d", "3"});
  ::unsetenv("COHERENCE_LAB_SEED");
  const Run flag = run_cli({"random", "--kind", "state", "-d", "3", "--seed", "77"});
  CHECK(env.out == flag.out);
  CHECK(env.out != run_cli({"random", "--kind", "state", "-d", "3"}).out);

  ::setenv("COHERENCE_LAB_SEED", "banana", 1);
  const Run bad = run_cli({"random", "--kind", "state", "-d", "3"});
  ::unsetenv("COHERENCE_LAB_SEED");
  CHECK(bad.code == cli::kUsage);
}

TEST_CASE("verify") {
  const Run plain = run_cli({"verify", "--dims", "2,3", "--trials", "20"});
  REQUIRE(plain.code == cli::kOk);
  const Json s = plain.json();
  CHECK(s["all_pass"] == true);
  CHECK(s["in_hypothesis"]["fail"] == 0);
  CHECK(!s.contains("counterexample_probes"));
  CHECK(s["dims"] == Json::array({2, 3}));

  const Json probed = run_cli({"verify", "--dims", "3", "--trials", "30", "--probe-fio"}).json();
  REQUIRE(probed.contains("counterexample_probes"));
  CHECK(probed["counterexample_probes"]["total"]["fail"].get<int>() > 0);
  CHECK(probed["all_pass"] == true);

  const auto a = scratch_dir() / "run_a.csv";
  const auto b = scratch_dir() / "run_b.csv";
  REQUIRE(run_cli({"verify", "--dims", "2,4", "--trials", "15", "--seed", "9", "-o", a.string()}).code ==
          cli::kOk);
  REQUIRE(run_cli({"verify", "--dims", "2,4", "--trials", "15", "--seed", "9", "-o", b.string()}).code ==
          cli::kOk);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(scratch_dir() / "run_a.summary.json") == slurp(scratch_dir() / "run_b.summary.json"));
  CHECK(slurp(a).rfind("theorem_id,d,seed,lhs,rhs,deviation,status\n", 0) == 0);

  const Run csv = run_cli({"verify", "--dims", "2", "--trials", "3", "--format", "csv"});
  CHECK(csv.out.rfind("theorem_id,", 0) == 0);

  const auto cfg = scratch_dir() / "campaign.json";
  io::write_file(cfg.string(), R"({"dims": [2], "trials": 4, "seed": 9})");
  const Json from_cfg = run_cli({"verify", "--config", cfg.string()}).json();
  CHECK(from_cfg["master_seed"] == 9);
  CHECK(from_cfg["trials_per_dim"] == 4);
}

TEST_CASE("usage and parse exit codes") {
  CHECK(run_cli({}).code == cli::kUsage);
  CHECK(run_cli({"frobnicate"}).code == cli::kUsage);
  CHECK(run_cli({"measure"}).code == cli::kUsage);
  CHECK(run_cli({"measure", "-i", fixture("psi_08.json"), "--which", "l2"}).code == cli::kUsage);
  CHECK(run_cli({"random", "--kind", "state", "-d", "1"}).code == cli::kUsage);
  CHECK(run_cli({"verify", "--dims", "1", "--trials", "2"}).code == cli::kParse);

  const Run malformed = run_cli({"measure", "-i", fixture("malformed.json")});
  CHECK(malformed.code == cli::kParse);
  const Run amps = run_cli({"measure", "-i", fixture("bad_amplitudes.json")});
  CHECK(amps.code == cli::kParse);
  CHECK(amps.err.find("state.") != std::string::npos);
  CHECK(run_cli({"measure", "-i", fixture("not_hermitian.json")}).code == cli::kParse);
  CHECK(run_cli({"measure", "-i", fixture("missing.json")}).code == cli::kParse);
}

}
