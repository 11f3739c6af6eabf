#include "qsi/decoy.hpp"

#include <algorithm>
#include <cmath>

#include "qsi/errors.hpp"
#include "qsi/linear_program.hpp"

namespace qsi {

std::string to_string(EstimationMethod method) {
  return method == EstimationMethod::AnalyticVacuumWeak ? "analytic_vacuum_weak"
                                                        : "linear_program";
}

void DecoyProtocolSpec::validate() const {
  if (!(signal_intensity > 0.0))
    throw DomainError("decoy protocol: signal_intensity must be > 0");
  for (double d : decoy_intensities) {
    if (!(d >= 0.0))
      throw DomainError("decoy protocol: decoy intensities must be >= 0");
    if (!(d < signal_intensity))
      throw DomainError(
          "decoy protocol: every decoy intensity must stay below the signal");
  }
  if (!(q_factor > 0.0 && q_factor <= 1.0))
    throw DomainError("decoy protocol: q_factor must lie in (0, 1]");
  if (!(f_ec >= 1.0)) throw DomainError("decoy protocol: f_ec must be >= 1");
  if (n_cut < 2) throw DomainError("decoy protocol: n_cut must be >= 2");
}

double DecoyProtocolSpec::weak_decoy() const {
  double best = 0.0;
  for (double d : decoy_intensities) best = std::max(best, d);
  return best;
}

bool DecoyProtocolSpec::has_vacuum_decoy() const {
  return std::any_of(decoy_intensities.begin(), decoy_intensities.end(),
                     [](double d) { return d == 0.0; });
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw DomainError("binary_entropy: argument must lie in [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

AnalyticBounds decoy_bounds_analytic_wcs(const GainQber& signal,
                                         const GainQber& weak, double mu,
                                         double nu, double y0) {
  if (!(mu * nu - nu * nu > 0.0))
    throw DegenerateIntensitiesError(
        "decoy_bounds_analytic_wcs: intensities must satisfy 0 < nu < mu");
  if (!(y0 >= 0.0))
    throw DomainError("decoy_bounds_analytic_wcs: vacuum gain must be >= 0");

  const double emu = std::exp(mu);
  const double enu = std::exp(nu);
  AnalyticBounds b;
  const double y1 =
      mu / (mu * nu - nu * nu) *
      (weak.gain * enu - signal.gain * emu * (nu * nu) / (mu * mu) -
       (mu * mu - nu * nu) / (mu * mu) * y0);
  b.y1_lower = std::max(0.0, y1);
  b.q1_lower = b.y1_lower * mu * std::exp(-mu);
  b.feasible = b.y1_lower > 0.0;
  if (b.feasible) {
    const double e1 =
        (weak.qber * weak.gain * enu - ChannelSpec::e0 * y0) / (b.y1_lower * nu);
    b.e1_upper = std::clamp(e1, 0.0, 0.5);
  } else {
    b.e1_upper = 0.5;
  }
  return b;
}

LpBounds decoy_bounds_lp(const std::vector<PhotonNumberDistribution>& dists,
                         const std::vector<GainQber>& gains, int n_cut) {
  if (dists.empty())
    throw DomainError("decoy_bounds_lp: need at least one intensity");
  if (dists.size() != gains.size())
    throw DomainError("decoy_bounds_lp: one gain record per distribution");
  if (n_cut < 2) throw DomainError("decoy_bounds_lp: n_cut must be >= 2");
  for (const auto& d : dists) {
    d.validate();
    if (d.n_cut < n_cut)
      throw DomainError(
          "decoy_bounds_lp: distributions must resolve photon numbers up to "
          "n_cut");
  }
  for (const auto& g : gains)
    if (!(g.gain >= 0.0 && g.gain <= 1.0))
      throw DomainError("decoy_bounds_lp: gains must lie in [0, 1]");

  const int nv = n_cut + 1;
  const std::size_t m = dists.size();

  // Yield polytope: for every intensity i,
  //   Q_i - tail_i <= sum_k P_k Y_k <= Q_i, with Y_k in [0, 1].
  lp::Problem yp;
  yp.num_vars = nv;
  yp.maximize = false;
  yp.objective.assign(static_cast<std::size_t>(nv), 0.0);
  yp.objective[1] = 1.0;
  yp.var_lower.assign(static_cast<std::size_t>(nv), 0.0);
  yp.var_upper.assign(static_cast<std::size_t>(nv), 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    lp::Constraint con;
    con.coeffs.assign(static_cast<std::size_t>(nv), 0.0);
    for (int k = 0; k < nv; ++k)
      con.coeffs[static_cast<std::size_t>(k)] =
          dists[i].probs[static_cast<std::size_t>(k)];
    con.upper = gains[i].gain;
    con.lower = gains[i].gain - dists[i].tail_mass;
    yp.constraints.push_back(std::move(con));
  }
  const lp::Solution ys = lp::solve(yp);

  LpBounds out;
  if (ys.status == lp::SolveStatus::Infeasible) {
    out.feasible = false;
    return out;
  }
  if (ys.status == lp::SolveStatus::Unbounded) {
    out.feasible = true;
    out.trivial = true;
    out.y1_lower = 0.0;
    out.e1_upper = 0.5;
    return out;
  }
  out.y1_lower = std::clamp(ys.objective_value, 0.0, 1.0);
  out.feasible = true;

  // Error polytope over z_k = e_k Y_k in [0, 0.5]:
  //   E_i Q_i - 0.5 tail_i <= sum_k P_k z_k <= E_i Q_i.
  lp::Problem ep;
  ep.num_vars = nv;
  ep.maximize = true;
  ep.objective.assign(static_cast<std::size_t>(nv), 0.0);
  ep.objective[1] = 1.0;
  ep.var_lower.assign(static_cast<std::size_t>(nv), 0.0);
  ep.var_upper.assign(static_cast<std::size_t>(nv), 0.5);
  for (std::size_t i = 0; i < m; ++i) {
    lp::Constraint con;
    con.coeffs.assign(static_cast<std::size_t>(nv), 0.0);
    for (int k = 0; k < nv; ++k)
      con.coeffs[static_cast<std::size_t>(k)] =
          dists[i].probs[static_cast<std::size_t>(k)];
    const double eq = gains[i].qber * gains[i].gain;
    con.upper = eq;
    con.lower = eq - ChannelSpec::e0 * dists[i].tail_mass;
    ep.constraints.push_back(std::move(con));
  }
  const lp::Solution es = lp::solve(ep);
  if (es.status == lp::SolveStatus::Infeasible) {
    out.feasible = false;
    return out;
  }
  if (es.status == lp::SolveStatus::Unbounded || !(out.y1_lower > 0.0)) {
    out.trivial = true;
    out.e1_upper = 0.5;
    return out;
  }
  // z1 <= z1_max and Y1 >= y1_lower > 0 bound the single-photon error ratio.
  out.e1_upper = std::clamp(es.objective_value / out.y1_lower, 0.0, 0.5);
  return out;
}

double key_rate_from_bounds(double q1_lower, double e1_upper,
                            const GainQber& signal, double q_factor,
                            double f_ec) {
  const double privacy = q1_lower * (1.0 - binary_entropy(e1_upper));
  const double correction =
      signal.gain * f_ec * binary_entropy(std::clamp(signal.qber, 0.0, 0.5));
  return std::max(0.0, q_factor * (privacy - correction));
}

namespace {

// Decoy levels are measurements, and "no clicks at all" is a legitimate
// outcome for vacuum pulses on a dark-count-free channel: the gain is zero
// and the error-weighted gain vanishes with it, so no QBER is needed.
GainQber measured_decoy_gain(const PhotonNumberDistribution& dist,
                             const ChannelSpec& ch) {
  try {
    return gain_and_qber(dist, ch);
  } catch (const NoSignalError&) {
    return GainQber{0.0, 0.0};
  }
}

}  // namespace

KeyRateResult secure_key_rate(const DecoyProtocolSpec& proto,
                              const SourceSpec& source, const ChannelSpec& ch) {
  proto.validate();
  source.validate();
  ch.validate();

  SourceSpec at_signal = source;
  at_signal.mean_intensity = proto.signal_intensity;
  const PhotonNumberDistribution signal_dist =
      source_distribution(at_signal, proto.n_cut);
  const GainQber signal_gain = gain_and_qber(signal_dist, ch);

  KeyRateResult res;
  res.q_signal = signal_gain;

  if (proto.method == EstimationMethod::AnalyticVacuumWeak) {
    if (source.kind != SourceKind::Wcs)
      throw ConfigError(
          "secure_key_rate: the analytic estimator assumes Poissonian "
          "statistics; use the linear-program estimator for heralded sources");
    const double nu = proto.weak_decoy();
    if (!(nu > 0.0) || !proto.has_vacuum_decoy())
      throw ConfigError(
          "secure_key_rate: the analytic estimator needs one weak decoy and "
          "one vacuum decoy");
    SourceSpec at_weak = source;
    at_weak.mean_intensity = nu;
    const GainQber weak_gain =
        measured_decoy_gain(source_distribution(at_weak, proto.n_cut), ch);
    const GainQber vac_gain =
        measured_decoy_gain(wcs_distribution(0.0, proto.n_cut), ch);
    const AnalyticBounds b = decoy_bounds_analytic_wcs(
        signal_gain, weak_gain, proto.signal_intensity, nu, vac_gain.gain);
    res.y1_lower = b.y1_lower;
    res.q1_lower = b.q1_lower;
    res.e1_upper = b.e1_upper;
    res.feasible = b.feasible;
  } else {
    std::vector<PhotonNumberDistribution> dists;
    std::vector<GainQber> gains;
    dists.push_back(signal_dist);
    gains.push_back(signal_gain);
    for (double d : proto.decoy_intensities) {
      SourceSpec at_decoy = source;
      at_decoy.mean_intensity = d;
      dists.push_back(source_distribution(at_decoy, proto.n_cut));
      gains.push_back(measured_decoy_gain(dists.back(), ch));
    }
    const LpBounds b = decoy_bounds_lp(dists, gains, proto.n_cut);
    res.y1_lower = b.y1_lower;
    res.q1_lower = b.y1_lower * signal_dist.probs[1];
    res.e1_upper = b.e1_upper;
    res.feasible = b.feasible;
  }

  if (res.feasible)
    res.rate = key_rate_from_bounds(res.q1_lower, res.e1_upper, signal_gain,
                                    proto.q_factor, proto.f_ec);
  return res;
}

double throughput_fom(double rate_per_pulse, double repetition_rate) {
  if (!(rate_per_pulse >= 0.0))
    throw DomainError("throughput_fom: rate_per_pulse must be >= 0");
  if (!(repetition_rate > 0.0))
    throw DomainError("throughput_fom: repetition_rate must be > 0");
  return rate_per_pulse * repetition_rate;
}

nlohmann::json KeyRateResult::to_json() const {
  return nlohmann::json{{"gain", q_signal.gain},
                        {"qber", q_signal.qber},
                        {"y1_lower", y1_lower},
                        {"q1_lower", q1_lower},
                        {"e1_upper", e1_upper},
                        {"rate", rate},
                        {"feasible", feasible}};
}

std::string KeyRateResult::csv_header() {
  return "loss_db,mu,nu,gain,qber,y1_lower,q1_lower,e1_upper,rate,feasible";
}

std::string KeyRateResult::csv_row(double loss_db, double mu, double nu) const {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d",
                loss_db, mu, nu, q_signal.gain, q_signal.qber, y1_lower,
                q1_lower, e1_upper, rate, feasible ? 1 : 0);
  return std::string(buf);
}

}  // namespace qsi
