#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coherence/channels.hpp"
#include "coherence/measures.hpp"
#include "coherence/qstate.hpp"

namespace coherence {

enum class TheoremId {
  T1,
  T2_C3,
  T2_C4,
  T3,
  T4,
  T5,
  T6,
  GAD_T3,
  GAD_T4,
  GAD_T5,
  GAD_T6,
  AMGM,
  T3_PROBE,
  T5_PROBE,
};

enum class Status { pass, fail, inconclusive };

const char* to_string(TheoremId id);
const char* to_string(Status s);
std::optional<TheoremId> theorem_from_string(const std::string& name);

/// Probe records exercise channels outside the hypothesis class; their
/// failures document scope and never count as suite failures.
bool is_probe(TheoremId id);

/// One theorem check. Equalities report |lhs - rhs|. Inequalities put the
/// bounded side in lhs and the bound in rhs, and report max(0, lhs - rhs).
struct VerificationRecord {
  TheoremId theorem_id = TheoremId::T1;
  int d = 0;
  RngSeed seed = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double deviation = 0.0;
  Status status = Status::pass;
};

struct Tolerances {
  double eq_tol = 1e-8;        ///< relative, exact equalities
  double eq_floor = 1e-12;     ///< absolute floor for tiny sides
  double ineq_tol = 1e-9;      ///< exact inequalities
  double closed_form_tol = 1e-10;
  double amgm_slack = 1e-12;
  double band_factor = 1e3;    ///< optimizer-gap band = band_factor * roof tol
};

struct CampaignConfig {
  std::vector<int> dims{2, 3, 4, 5};
  int trials_per_dim = 500;
  int n_kraus_min = 1;
  int n_kraus_max = 6;
  Tolerances tol;
  RngSeed master_seed = 0x5eed2024u;

  bool with_roof = false;
  /// Roof records run on the first `roof_trials` trials of each eligible dim.
  int roof_trials = 10;
  int roof_max_dim = 3;
  int roof_max_rank = 2;
  int roof_max_kraus = 2;
  RoofOptions roof;

  bool probe_fio = false;
  /// GAD records on every d = 2 trial.
  bool with_gad = true;

  /// Throws InvariantError on a malformed configuration.
  void validate() const;
};

/// diag(a_1 sqrt(d), ..., a_d sqrt(d)); maps psi+ onto psi.
ComplexMatrix s_matrix(const PureState& psi);

/// G[channel(psi+)] from the diagonal factors alone:
/// prod_{i != j} |sum_n a_ii^(n) conj(a_jj^(n))|^(1/(d(d-1))).
double closed_form_factor(const FsioChannel& ch);

/// G of the channel output on psi+, via state evolution.
double evolved_factor(const KrausSet& kraus);

// Exact equalities. The id selects the record label (T3, GAD_T3, T3_PROBE...).
VerificationRecord verify_t3(const PureState& psi, const KrausSet& kraus,
                             const Tolerances& tol = {},
                             TheoremId id = TheoremId::T3);
VerificationRecord verify_t3(const PureState& psi, const FsioChannel& ch,
                             const Tolerances& tol = {});
VerificationRecord verify_t5(const DensityMatrix& rho, const KrausSet& kraus,
                             const Tolerances& tol = {},
                             TheoremId id = TheoremId::T5);
/// Also fails when the closed-form factor disagrees with state evolution.
VerificationRecord verify_t5(const DensityMatrix& rho, const FsioChannel& ch,
                             const Tolerances& tol = {});

VerificationRecord verify_t1(const DensityMatrix& rho, const KrausSet& kraus,
                             const Tolerances& tol = {});
VerificationRecord verify_amgm(const FsioChannel& ch, const Tolerances& tol = {});

// Convex-roof checks. Every roof is an upper bound carrying a dual lower
// bound; a record fails only when the certified interval rules the claim out.
VerificationRecord verify_t4(const PureState& psi, const KrausSet& kraus,
                             const RoofOptions& roof, const Tolerances& tol = {},
                             TheoremId id = TheoremId::T4);
VerificationRecord verify_t4(const PureState& psi, const FsioChannel& ch,
                             const RoofOptions& roof, const Tolerances& tol = {});
VerificationRecord verify_t6(const DensityMatrix& rho, const KrausSet& kraus,
                             const RoofOptions& roof, const Tolerances& tol = {},
                             TheoremId id = TheoremId::T6);
VerificationRecord verify_t6(const DensityMatrix& rho, const FsioChannel& ch,
                             const RoofOptions& roof, const Tolerances& tol = {});

/// Strong monotonicity of the roof: roof(rho) >= sum_n q_n roof(rho_n).
VerificationRecord verify_roof_monotonicity(const DensityMatrix& rho,
                                            const KrausSet& kraus,
                                            const RoofOptions& roof,
                                            const Tolerances& tol = {});
/// Convexity: roof(w a + (1-w) b) <= w roof(a) + (1-w) roof(b) + 2 tol.
VerificationRecord verify_roof_convexity(const DensityMatrix& a,
                                         const DensityMatrix& b, double w,
                                         const RoofOptions& roof,
                                         const Tolerances& tol = {});

/// GAD_T3 and GAD_T5, plus GAD_T4 and GAD_T6 when `roof` is given.
std::vector<VerificationRecord> verify_gad(const PureState& psi,
                                           const DensityMatrix& rho, double p,
                                           double eps,
                                           const std::optional<RoofOptions>& roof,
                                           const Tolerances& tol = {});

/// Per-trial seed; independent of the order in which trials run.
RngSeed trial_seed(RngSeed master, int d, int trial);

/// Random inputs shared by the exact checks of one campaign trial.
struct TrialDraw {
  RngSeed seed;
  int rank;
  int n_kraus;
  DensityMatrix rho;
  PureState psi;
  FsioChannel channel;
};

TrialDraw draw_trial(const CampaignConfig& cfg, int d, int trial);

/// Records ordered by (dim, trial). Errors inside one trial become failed
/// records; the campaign itself does not abort.
std::vector<VerificationRecord> run_campaign(const CampaignConfig& cfg);

struct TheoremSummary {
  long pass = 0;
  long fail = 0;
  long inconclusive = 0;
  double max_deviation = 0.0;
};

struct CampaignSummary {
  std::vector<std::pair<TheoremId, TheoremSummary>> theorems; ///< enum order
  TheoremSummary in_hypothesis;
  TheoremSummary probes;
  bool has_probes = false;

  bool all_pass() const { return in_hypothesis.fail == 0; }
};

CampaignSummary summarize(const std::vector<VerificationRecord>& records);

/// theorem_id,d,seed,lhs,rhs,deviation,status with 15 significant digits.
std::string records_to_csv(const std::vector<VerificationRecord>& records);

} // namespace coherence
