#include "coherence/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

namespace coherence {

namespace {

constexpr TheoremId kAllIds[] = {
    TheoremId::T1,     TheoremId::T2_C3,  TheoremId::T2_C4,    TheoremId::T3,
    TheoremId::T4,     TheoremId::T5,     TheoremId::T6,       TheoremId::GAD_T3,
    TheoremId::GAD_T4, TheoremId::GAD_T5, TheoremId::GAD_T6,   TheoremId::AMGM,
    TheoremId::T3_PROBE, TheoremId::T5_PROBE,
};

double equality_allowance(double rhs, const Tolerances& tol) {
  return std::max(tol.eq_tol * std::abs(rhs), tol.eq_floor);
}

VerificationRecord equality_record(TheoremId id, int d, double lhs, double rhs,
                                   const Tolerances& tol) {
  VerificationRecord r;
  r.theorem_id = id;
  r.d = d;
  r.lhs = lhs;
  r.rhs = rhs;
  r.deviation = std::abs(lhs - rhs);
  r.status = r.deviation <= equality_allowance(rhs, tol) ? Status::pass : Status::fail;
  return r;
}

// Certified interval [lower, value] of a convex roof.
struct RoofBound {
  double value;
  double lower;
  bool converged;
};

RoofBound roof_bound(const DensityMatrix& rho, const RoofOptions& opts) {
  const RoofResult r = convex_roof_g(rho, opts);
  return {r.value, std::min(r.lower_bound, r.value), r.converged};
}

double band(const RoofOptions& roof, const Tolerances& tol) {
  return tol.band_factor * roof.tol;
}

// One-sided claim lhs <= rhs where lhs has certified lower evidence.
VerificationRecord roof_inequality(TheoremId id, int d, double lhs,
                                   double lhs_lower, double rhs,
                                   const RoofOptions& roof,
                                   const Tolerances& tol) {
  VerificationRecord r;
  r.theorem_id = id;
  r.d = d;
  r.lhs = lhs;
  r.rhs = rhs;
  r.deviation = std::max(0.0, lhs - rhs);
  if (r.deviation <= tol.ineq_tol) {
    r.status = Status::pass;
  } else if (lhs_lower - rhs > band(roof, tol)) {
    r.status = Status::fail;
  } else {
    r.status = Status::inconclusive;
  }
  return r;
}

DensityMatrix reference_output(const KrausSet& kraus) {
  return apply_channel(kraus, projector(maximally_coherent_state(kraus.dim())));
}

void require_dims(int a, int b, const char* what) {
  if (a != b) throw InvariantError(std::string(what) + ": dimension mismatch");
}

} // namespace

const char* to_string(TheoremId id) {
  switch (id) {
    case TheoremId::T1: return "T1";
    case TheoremId::T2_C3: return "T2_C3";
    case TheoremId::T2_C4: return "T2_C4";
    case TheoremId::T3: return "T3";
    case TheoremId::T4: return "T4";
    case TheoremId::T5: return "T5";
    case TheoremId::T6: return "T6";
    case TheoremId::GAD_T3: return "GAD_T3";
    case TheoremId::GAD_T4: return "GAD_T4";
    case TheoremId::GAD_T5: return "GAD_T5";
    case TheoremId::GAD_T6: return "GAD_T6";
    case TheoremId::AMGM: return "AMGM";
    case TheoremId::T3_PROBE: return "T3_PROBE";
    case TheoremId::T5_PROBE: return "T5_PROBE";
  }
  return "?";
}

const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::inconclusive: return "inconclusive";
  }
  return "?";
}

std::optional<TheoremId> theorem_from_string(const std::string& name) {
  for (TheoremId id : kAllIds) {
    if (name == to_string(id)) return id;
  }
  return std::nullopt;
}

bool is_probe(TheoremId id) {
  return id == TheoremId::T3_PROBE || id == TheoremId::T5_PROBE;
}

void CampaignConfig::validate() const {
  if (dims.empty()) throw InvariantError("campaign: no dimensions given");
  for (int d : dims) {
    if (d < 2) throw InvariantError("campaign: every dimension must be >= 2");
  }
  if (trials_per_dim < 1) throw InvariantError("campaign: trials must be positive");
  if (n_kraus_min < 1 || n_kraus_max < n_kraus_min) {
    throw InvariantError("campaign: invalid Kraus-count range");
  }
  if (roof_trials < 0 || roof_max_rank < 1 || roof_max_kraus < 1) {
    throw InvariantError("campaign: invalid roof settings");
  }
  if (!(tol.eq_tol > 0.0) || !(tol.ineq_tol >= 0.0)) {
    throw InvariantError("campaign: tolerances must be positive");
  }
  if (roof.restarts < 1 || !(roof.tol > 0.0)) {
    throw InvariantError("campaign: roof restarts and tol must be positive");
  }
}

ComplexMatrix s_matrix(const PureState& psi) {
  const int d = psi.dim();
  ComplexMatrix s = ComplexMatrix::Zero(d, d);
  const double root = std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) s(i, i) = root * psi[i];
  return s;
}

double closed_form_factor(const FsioChannel& ch) {
  const int d = ch.dim();
  double log_sum = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      Complex s(0.0, 0.0);
      for (const auto& a : ch.diagonals) s += a(i) * std::conj(a(j));
      const double mod = std::abs(s);
      if (mod < kModulusFloor) return 0.0;
      log_sum += std::log(mod);
    }
  }
  return std::exp(log_sum / static_cast<double>(d * (d - 1)));
}

double evolved_factor(const KrausSet& kraus) {
  return g_coherence(reference_output(kraus));
}

VerificationRecord verify_t3(const PureState& psi, const KrausSet& kraus,
                             const Tolerances& tol, TheoremId id) {
  require_dims(psi.dim(), kraus.dim(), "verify_t3");
  const double lhs = g_coherence(apply_channel(kraus, projector(psi)));
  const double rhs = g_coherence_pure(psi) * evolved_factor(kraus);
  return equality_record(id, psi.dim(), lhs, rhs, tol);
}

VerificationRecord verify_t3(const PureState& psi, const FsioChannel& ch,
                             const Tolerances& tol) {
  return verify_t3(psi, fsio_to_kraus(ch), tol, TheoremId::T3);
}

VerificationRecord verify_t5(const DensityMatrix& rho, const KrausSet& kraus,
                             const Tolerances& tol, TheoremId id) {
  require_dims(rho.dim(), kraus.dim(), "verify_t5");
  const double lhs = g_coherence(apply_channel(kraus, rho));
  const double rhs = g_coherence(rho) * evolved_factor(kraus);
  return equality_record(id, rho.dim(), lhs, rhs, tol);
}

VerificationRecord verify_t5(const DensityMatrix& rho, const FsioChannel& ch,
                             const Tolerances& tol) {
  const KrausSet kraus = fsio_to_kraus(ch);
  VerificationRecord r = verify_t5(rho, kraus, tol, TheoremId::T5);
  if (std::abs(closed_form_factor(ch) - evolved_factor(kraus)) > tol.closed_form_tol) {
    r.status = Status::fail;
  }
  return r;
}

VerificationRecord verify_t1(const DensityMatrix& rho, const KrausSet& kraus,
                             const Tolerances& tol) {
  const MonotonicityCheck m = check_strong_monotonicity_g(rho, kraus);
  VerificationRecord r;
  r.theorem_id = TheoremId::T1;
  r.d = rho.dim();
  r.lhs = m.rhs;
  r.rhs = m.lhs;
  r.deviation = std::max(0.0, r.lhs - r.rhs);
  r.status = r.deviation <= tol.ineq_tol ? Status::pass : Status::fail;
  return r;
}

VerificationRecord verify_amgm(const FsioChannel& ch, const Tolerances& tol) {
  VerificationRecord r;
  r.theorem_id = TheoremId::AMGM;
  r.d = ch.dim();
  r.lhs = amgm_kernel(ch);
  r.rhs = 1.0;
  r.deviation = std::max(0.0, r.lhs - r.rhs);
  r.status = r.deviation <= tol.amgm_slack ? Status::pass : Status::fail;
  return r;
}

VerificationRecord verify_t4(const PureState& psi, const KrausSet& kraus,
                             const RoofOptions& roof, const Tolerances& tol,
                             TheoremId id) {
  require_dims(psi.dim(), kraus.dim(), "verify_t4");
  const RoofBound out = roof_bound(apply_channel(kraus, projector(psi)), roof);
  const RoofBound ref = roof_bound(reference_output(kraus), roof);
  // The roof of a pure state is its own G.
  const double g = g_coherence_pure(psi);

  VerificationRecord r;
  r.theorem_id = id;
  r.d = psi.dim();
  r.lhs = out.value;
  r.rhs = g * ref.value;
  r.deviation = std::abs(r.lhs - r.rhs);
  const double allow = std::max(tol.eq_tol * std::max(1.0, std::abs(r.rhs)), tol.eq_floor);
  const bool disjoint = out.lower > r.rhs + allow || g * ref.lower > r.lhs + allow;
  if (r.deviation <= allow) {
    r.status = Status::pass;
  } else if (disjoint && out.converged && ref.converged) {
    r.status = Status::fail;
  } else {
    r.status = Status::inconclusive;
  }
  return r;
}

VerificationRecord verify_t4(const PureState& psi, const FsioChannel& ch,
                             const RoofOptions& roof, const Tolerances& tol) {
  return verify_t4(psi, fsio_to_kraus(ch), roof, tol, TheoremId::T4);
}

VerificationRecord verify_t6(const DensityMatrix& rho, const KrausSet& kraus,
                             const RoofOptions& roof, const Tolerances& tol,
                             TheoremId id) {
  require_dims(rho.dim(), kraus.dim(), "verify_t6");
  const RoofBound out = roof_bound(apply_channel(kraus, rho), roof);
  const RoofBound in = roof_bound(rho, roof);
  const RoofBound ref = roof_bound(reference_output(kraus), roof);
  return roof_inequality(id, rho.dim(), out.value, out.lower, in.value * ref.value,
                         roof, tol);
}

VerificationRecord verify_t6(const DensityMatrix& rho, const FsioChannel& ch,
                             const RoofOptions& roof, const Tolerances& tol) {
  return verify_t6(rho, fsio_to_kraus(ch), roof, tol, TheoremId::T6);
}

VerificationRecord verify_roof_monotonicity(const DensityMatrix& rho,
                                            const KrausSet& kraus,
                                            const RoofOptions& roof,
                                            const Tolerances& tol) {
  require_dims(rho.dim(), kraus.dim(), "verify_roof_monotonicity");
  const RoofBound whole = roof_bound(rho, roof);
  double branches = 0.0;
  double branches_lower = 0.0;
  for (const auto& k : kraus.operators()) {
    const ComplexMatrix out = k * rho.matrix() * k.adjoint();
    const double q = out.trace().real();
    if (q <= 1e-14) continue;
    ComplexMatrix normalized = out / q;
    normalized = 0.5 * (normalized + normalized.adjoint()).eval();
    const RoofBound b = roof_bound(
        DensityMatrix::from_matrix(normalized, StateTolerances{1e-12, 1e-12, 1e-10, -1e-9}),
        roof);
    branches += q * b.value;
    branches_lower += q * b.lower;
  }
  return roof_inequality(TheoremId::T2_C3, rho.dim(), branches, branches_lower,
                         whole.value, roof, tol);
}

VerificationRecord verify_roof_convexity(const DensityMatrix& a,
                                         const DensityMatrix& b, double w,
                                         const RoofOptions& roof,
                                         const Tolerances& tol) {
  require_dims(a.dim(), b.dim(), "verify_roof_convexity");
  const RoofBound ra = roof_bound(a, roof);
  const RoofBound rb = roof_bound(b, roof);
  const RoofBound mixed = roof_bound(mix(a, b, w), roof);
  const double rhs = w * ra.value + (1.0 - w) * rb.value + 2.0 * roof.tol;
  return roof_inequality(TheoremId::T2_C4, a.dim(), mixed.value, mixed.lower, rhs,
                         roof, tol);
}

std::vector<VerificationRecord> verify_gad(const PureState& psi,
                                           const DensityMatrix& rho, double p,
                                           double eps,
                                           const std::optional<RoofOptions>& roof,
                                           const Tolerances& tol) {
  const KrausSet kraus = gad_channel(p, eps);
  std::vector<VerificationRecord> out;
  out.push_back(verify_t3(psi, kraus, tol, TheoremId::GAD_T3));
  out.push_back(verify_t5(rho, kraus, tol, TheoremId::GAD_T5));
  if (roof) {
    out.push_back(verify_t4(psi, kraus, *roof, tol, TheoremId::GAD_T4));
    out.push_back(verify_t6(rho, kraus, *roof, tol, TheoremId::GAD_T6));
  }
  return out;
}

RngSeed trial_seed(RngSeed master, int d, int trial) {
  return derive_seed(derive_seed(master, static_cast<std::uint64_t>(d)),
                     static_cast<std::uint64_t>(trial));
}

TrialDraw draw_trial(const CampaignConfig& cfg, int d, int trial) {
  const RngSeed seed = trial_seed(cfg.master_seed, d, trial);
  Rng rng(seed);
  const int rank = rng.uniform_int(1, d);
  const int n_kraus = rng.uniform_int(cfg.n_kraus_min, cfg.n_kraus_max);
  DensityMatrix rho = random_mixed_state(d, rank, rng);
  PureState psi = random_pure_state(d, rng);
  FsioChannel ch = random_fsio(d, n_kraus, rng);
  return {seed, rank, n_kraus, std::move(rho), std::move(psi), std::move(ch)};
}

std::vector<VerificationRecord> run_campaign(const CampaignConfig& cfg) {
  cfg.validate();
  std::vector<VerificationRecord> records;
  for (int d : cfg.dims) {
    for (int t = 0; t < cfg.trials_per_dim; ++t) {
      const RngSeed seed = trial_seed(cfg.master_seed, d, t);
      auto attempt = [&](TheoremId id, const std::function<void()>& body) {
        try {
          body();
        } catch (const std::exception&) {
          const double nan = std::numeric_limits<double>::quiet_NaN();
          records.push_back({id, d, seed, nan, nan, nan, Status::fail});
        }
      };
      auto tagged = [&](VerificationRecord r) {
        r.d = d;
        r.seed = seed;
        records.push_back(r);
      };

      const TrialDraw draw = draw_trial(cfg, d, t);
      const int n_kraus = draw.n_kraus;
      const DensityMatrix& rho = draw.rho;
      const PureState& psi = draw.psi;
      const FsioChannel& ch = draw.channel;
      const KrausSet kraus = fsio_to_kraus(ch);

      attempt(TheoremId::T1, [&] { tagged(verify_t1(rho, kraus, cfg.tol)); });
      attempt(TheoremId::AMGM, [&] { tagged(verify_amgm(ch, cfg.tol)); });
      attempt(TheoremId::T3, [&] { tagged(verify_t3(psi, ch, cfg.tol)); });
      attempt(TheoremId::T5, [&] { tagged(verify_t5(rho, ch, cfg.tol)); });

      if (cfg.with_gad && d == 2) {
        Rng gad_rng(derive_seed(seed, 0x6adu));
        const double p = gad_rng.uniform();
        const double eps = gad_rng.uniform();
        attempt(TheoremId::GAD_T3, [&] {
          for (const auto& r : verify_gad(psi, rho, p, eps, std::nullopt, cfg.tol)) tagged(r);
        });
      }

      if (cfg.probe_fio) {
        Rng probe_rng(derive_seed(seed, 0xf10u));
        const KrausSet fio = random_fio_not_fsio(d, std::max(2, n_kraus), probe_rng);
        attempt(TheoremId::T3_PROBE, [&] {
          tagged(verify_t3(psi, fio, cfg.tol, TheoremId::T3_PROBE));
        });
        attempt(TheoremId::T5_PROBE, [&] {
          tagged(verify_t5(rho, fio, cfg.tol, TheoremId::T5_PROBE));
        });
        // A non-injective shared map empties an output row, so the FIO probe
        // reads 0 = 0; mixtures of FSIO channels with distinct permutations
        // leave the shared-form class and can break the law.
        const KrausSet sio = random_sio_mixture(d, 2, probe_rng);
        attempt(TheoremId::T3_PROBE, [&] {
          tagged(verify_t3(psi, sio, cfg.tol, TheoremId::T3_PROBE));
        });
        attempt(TheoremId::T5_PROBE, [&] {
          tagged(verify_t5(rho, sio, cfg.tol, TheoremId::T5_PROBE));
        });
      }

      if (cfg.with_roof && d <= cfg.roof_max_dim && t < cfg.roof_trials) {
        Rng roof_rng(derive_seed(seed, 0x700fu));
        const int max_rank = std::min(cfg.roof_max_rank, d);
        const DensityMatrix small = random_mixed_state(d, roof_rng.uniform_int(1, max_rank), roof_rng);
        const DensityMatrix other = random_mixed_state(d, roof_rng.uniform_int(1, max_rank), roof_rng);
        const double w = roof_rng.uniform();
        const FsioChannel roof_ch =
            random_fsio(d, roof_rng.uniform_int(1, cfg.roof_max_kraus), roof_rng);
        RoofOptions opts = cfg.roof;
        opts.seed = derive_seed(seed, 0x4f0fu);
        attempt(TheoremId::T4, [&] { tagged(verify_t4(psi, roof_ch, opts, cfg.tol)); });
        attempt(TheoremId::T6, [&] { tagged(verify_t6(small, roof_ch, opts, cfg.tol)); });
        attempt(TheoremId::T2_C3, [&] {
          tagged(verify_roof_monotonicity(small, fsio_to_kraus(roof_ch), opts, cfg.tol));
        });
        attempt(TheoremId::T2_C4, [&] {
          tagged(verify_roof_convexity(small, other, w, opts, cfg.tol));
        });
      }
    }
  }
  return records;
}

CampaignSummary summarize(const std::vector<VerificationRecord>& records) {
  CampaignSummary s;
  for (TheoremId id : kAllIds) s.theorems.emplace_back(id, TheoremSummary{});
  auto bump = [](TheoremSummary& t, const VerificationRecord& r) {
    switch (r.status) {
      case Status::pass: ++t.pass; break;
      case Status::fail: ++t.fail; break;
      case Status::inconclusive: ++t.inconclusive; break;
    }
    if (std::isnan(r.deviation)) return;
    t.max_deviation = std::max(t.max_deviation, r.deviation);
  };
  for (const auto& r : records) {
    bump(s.theorems[static_cast<std::size_t>(r.theorem_id)].second, r);
    if (is_probe(r.theorem_id)) {
      s.has_probes = true;
      bump(s.probes, r);
    } else {
      bump(s.in_hypothesis, r);
    }
  }
  return s;
}

std::string records_to_csv(const std::vector<VerificationRecord>& records) {
  std::string out = "theorem_id,d,seed,lhs,rhs,deviation,status\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%s,%d,%llu,%.15g,%.15g,%.15g,%s\n",
                  to_string(r.theorem_id), r.d,
                  static_cast<unsigned long long>(r.seed), r.lhs, r.rhs,
                  r.deviation, to_string(r.status));
    out += buf;
  }
  return out;
}

} // namespace coherence
