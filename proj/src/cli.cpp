#include "coherence/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coherence/harness.hpp"
#include "coherence/io.hpp"

namespace coherence::cli {

namespace {

using io::Json;

struct Common {
  std::string input;
  std::string kraus;
  std::string output;
  std::string format = "json";
};

// Writes to the --output file when given, else to `out`.
void emit(const Common& c, std::ostream& out, const std::string& text) {
  if (c.output.empty()) {
    out << text;
  } else {
    io::write_file(c.output, text);
  }
}

RngSeed default_seed() {
  const char* env = std::getenv("COHERENCE_LAB_SEED");
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 0);
  if (end == env || *end != '\0') {
    throw CLI::ValidationError("COHERENCE_LAB_SEED", "not an unsigned integer: " + std::string(env));
  }
  return v;
}

std::string fmt15(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

int cmd_measure(const Common& c, const std::string& which, std::ostream& out) {
  const io::AnyState state = io::state_from_json(io::read_file(c.input));
  const DensityMatrix rho = io::as_density(state);
  const bool pure = std::holds_alternative<PureState>(state);
  std::vector<std::pair<std::string, double>> values;
  if (which == "l1" || which == "all") values.emplace_back("l1", l1_coherence(rho));
  if (which == "g" || which == "all") {
    values.emplace_back("g", g_coherence(rho));
    if (pure) values.emplace_back("g_closed_form", g_coherence_pure(std::get<PureState>(state)));
  }
  if (c.format == "csv") {
    std::string text = "quantity,value\n";
    for (const auto& [k, v] : values) text += k + "," + fmt15(v) + "\n";
    emit(c, out, text);
  } else {
    Json j{{"dim", rho.dim()}, {"kind", pure ? "pure" : "mixed"}};
    for (const auto& [k, v] : values) j[k] = io::round15(v);
    emit(c, out, io::dump(j));
  }
  return kOk;
}

int cmd_roof(const Common& c, const RoofOptions& opts, std::ostream& out) {
  const DensityMatrix rho = io::as_density(io::state_from_json(io::read_file(c.input)));
  const RoofResult r = convex_roof_g(rho, opts);
  emit(c, out, io::dump(io::to_json(r)));
  if (!c.output.empty()) {
    out << "value " << fmt15(r.value) << " converged " << (r.converged ? "true" : "false")
        << "\n";
  }
  return kOk;
}

int cmd_classify(const Common& c, double zero_tol, std::ostream& out) {
  const KrausSet kraus = io::kraus_from_json(io::read_file(c.kraus));
  emit(c, out, io::dump(io::to_json(classify_kraus(kraus, zero_tol))));
  return kOk;
}

int cmd_apply(const Common& c, std::ostream& out) {
  const KrausSet kraus = io::kraus_from_json(io::read_file(c.kraus));
  const DensityMatrix rho = io::as_density(io::state_from_json(io::read_file(c.input)));
  if (rho.dim() != kraus.dim()) throw InvariantError("apply: dimension mismatch");
  emit(c, out, io::dump(io::to_json(apply_channel(kraus, rho))));
  return kOk;
}

void load_campaign_config(const std::string& path, CampaignConfig& cfg) {
  const Json j = io::read_file(path);
  if (!j.is_object()) throw io::ParseError(path + ": expected an object");
  try {
    if (j.contains("dims")) cfg.dims = j.at("dims").get<std::vector<int>>();
    if (j.contains("trials")) cfg.trials_per_dim = j.at("trials").get<int>();
    if (j.contains("seed")) cfg.master_seed = j.at("seed").get<RngSeed>();
    if (j.contains("n_kraus_min")) cfg.n_kraus_min = j.at("n_kraus_min").get<int>();
    if (j.contains("n_kraus_max")) cfg.n_kraus_max = j.at("n_kraus_max").get<int>();
    if (j.contains("eq_tol")) cfg.tol.eq_tol = j.at("eq_tol").get<double>();
    if (j.contains("ineq_tol")) cfg.tol.ineq_tol = j.at("ineq_tol").get<double>();
    if (j.contains("with_roof")) cfg.with_roof = j.at("with_roof").get<bool>();
    if (j.contains("roof_trials")) cfg.roof_trials = j.at("roof_trials").get<int>();
    if (j.contains("restarts")) cfg.roof.restarts = j.at("restarts").get<int>();
    if (j.contains("tol")) cfg.roof.tol = j.at("tol").get<double>();
    if (j.contains("probe_fio")) cfg.probe_fio = j.at("probe_fio").get<bool>();
  } catch (const Json::exception& e) {
    throw io::ParseError(path + ": " + e.what());
  }
}

std::string summary_path(const std::string& csv_path) {
  const auto dot = csv_path.rfind('.');
  const auto slash = csv_path.find_last_of('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? csv_path.substr(0, dot) : csv_path) + ".summary.json";
}

int cmd_verify(const Common& c, const CampaignConfig& cfg, std::ostream& out) {
  const std::vector<VerificationRecord> records = run_campaign(cfg);
  const CampaignSummary summary = summarize(records);
  const std::string csv = records_to_csv(records);
  const std::string json = io::dump(io::to_json(summary, cfg));
  if (!c.output.empty()) {
    io::write_file(c.output, csv);
    io::write_file(summary_path(c.output), json);
  }
  out << (c.format == "csv" && c.output.empty() ? csv : json);
  return summary.all_pass() ? kOk : kVerificationFailed;
}

int cmd_random(const Common& c, const std::string& kind, int d, int rank, int n_kraus,
               RngSeed seed, std::ostream& out) {
  Rng rng(seed);
  Json j;
  if (kind == "state") {
    j = io::to_json(random_pure_state(d, rng));
  } else if (kind == "mixed") {
    j = io::to_json(random_mixed_state(d, rank < 1 ? d : rank, rng));
  } else {
    j = io::to_json(fsio_to_kraus(random_fsio(d, n_kraus, rng)));
  }
  emit(c, out, io::dump(j));
  return kOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coherence measures, channel classification and factorization checks",
               "coherence_lab"};
  app.require_subcommand(1);

  Common common;
  RngSeed seed = kDefaultSeed;
  RoofOptions roof;
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("-o,--output", common.output, "Output file (default stdout)");
    sub->add_option("--format", common.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_seed = [&](CLI::App* sub) {
    return sub->add_option("--seed", seed, "Seed (default from COHERENCE_LAB_SEED)");
  };

  auto* measure = app.add_subcommand("measure", "l1 and G coherence of a state");
  std::string which = "all";
  measure->add_option("-i,--input", common.input, "State JSON")->required();
  measure->add_option("--which", which, "l1, g or all")->check(CLI::IsMember({"l1", "g", "all"}));
  add_output(measure);

  auto* roof_cmd = app.add_subcommand("roof", "Convex roof of G");
  roof_cmd->add_option("-i,--input", common.input, "State JSON")->required();
  roof_cmd->add_option("--restarts", roof.restarts, "Isometry restarts")
      ->check(CLI::PositiveNumber);
  roof_cmd->add_option("--tol", roof.tol, "Optimizer tolerance")->check(CLI::PositiveNumber);
  add_seed(roof_cmd);
  add_output(roof_cmd);

  auto* classify = app.add_subcommand("classify", "Place a Kraus set in the incoherent hierarchy");
  double zero_tol = kPatternZeroTol;
  classify->add_option("-k,--kraus", common.kraus, "Kraus-set JSON")->required();
  classify->add_option("--zero-tol", zero_tol, "Sparsity threshold")->check(CLI::NonNegativeNumber);
  add_output(classify);

  auto* apply = app.add_subcommand("apply", "Apply a Kraus set to a state");
  apply->add_option("-k,--kraus", common.kraus, "Kraus-set JSON")->required();
  apply->add_option("-i,--input", common.input, "State JSON")->required();
  add_output(apply);

  auto* verify = app.add_subcommand("verify", "Run a verification campaign");
  CampaignConfig cfg;
  std::string config_path;
  std::vector<int> dims;
  int trials = 0;
  int roof_trials = -1;
  bool with_roof = false;
  bool probe_fio = false;
  verify->add_option("--config", config_path, "Campaign JSON")->check(CLI::ExistingFile);
  verify->add_option("--dims", dims, "Dimensions, comma separated")->delimiter(',');
  verify->add_option("--trials", trials, "Trials per dimension")->check(CLI::PositiveNumber);
  verify->add_option("--roof-trials", roof_trials, "Roof trials per dimension");
  verify->add_flag("--with-roof", with_roof, "Include convex-roof records");
  verify->add_flag("--probe-fio", probe_fio, "Add counterexample probes outside FSIO");
  CLI::Option* verify_restarts = verify->add_option("--restarts", roof.restarts, "Isometry restarts");
  CLI::Option* verify_tol = verify->add_option("--tol", roof.tol, "Optimizer tolerance");
  CLI::Option* verify_seed = add_seed(verify);
  verify->add_option("-o,--output", common.output, "Record CSV; summary goes next to it");
  verify->add_option("--format", common.format, "Stdout format")
      ->check(CLI::IsMember({"json", "csv"}));

  auto* random = app.add_subcommand("random", "Draw a random state or channel");
  std::string kind;
  int d = 0;
  int rank = 0;
  int n_kraus = 2;
  random->add_option("--kind", kind, "state, mixed or fsio")
      ->required()
      ->check(CLI::IsMember({"state", "mixed", "fsio"}));
  random->add_option("-d,--dim", d, "Dimension")->required()->check(CLI::Range(2, 64));
  random->add_option("--rank", rank, "Rank of a mixed state (default d)");
  random->add_option("--n-kraus", n_kraus, "Kraus operators of an FSIO draw")
      ->check(CLI::PositiveNumber);
  add_seed(random);
  add_output(random);

  try {
    seed = default_seed();
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (measure->parsed()) return cmd_measure(common, which, out);
    if (roof_cmd->parsed()) {
      roof.seed = seed;
      return cmd_roof(common, roof, out);
    }
    if (classify->parsed()) return cmd_classify(common, zero_tol, out);
    if (apply->parsed()) return cmd_apply(common, out);
    if (verify->parsed()) {
      cfg.master_seed = seed;
      if (!config_path.empty()) {
        load_campaign_config(config_path, cfg);
        if (verify_seed->count() > 0) cfg.master_seed = seed;
      }
      if (!dims.empty()) cfg.dims = dims;
      if (trials > 0) cfg.trials_per_dim = trials;
      if (roof_trials >= 0) cfg.roof_trials = roof_trials;
      if (with_roof) cfg.with_roof = true;
      if (probe_fio) cfg.probe_fio = true;
      if (verify_restarts->count() > 0) cfg.roof.restarts = roof.restarts;
      if (verify_tol->count() > 0) cfg.roof.tol = roof.tol;
      cfg.validate();
      return cmd_verify(common, cfg, out);
    }
    if (random->parsed()) {
      if (kind == "mixed" && (rank < 0 || rank > d)) {
        throw InvariantError("random: rank must lie in 1..d");
      }
      return cmd_random(common, kind, d, rank, n_kraus, seed, out);
    }
  } catch (const IncompleteKrausError& e) {
    err << "error: " << e.what() << "\n";
    return kParse;
  } catch (const OptimizerFailure& e) {
    err << "error: " << e.what() << "\n";
    return kOptimizerFailure;
  } catch (const InvariantError& e) {
    err << "error: " << e.what() << "\n";
    return kParse;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kParse;
  }
  return kUsage;
}

} // namespace coherence::cli
