#include "qsi/photon_source.hpp"

#include <algorithm>
#include <cmath>

#include "qsi/errors.hpp"

namespace qsi {

namespace {
constexpr double kNormTol = 1e-9;
}

void PhotonNumberDistribution::validate() const {
  if (n_cut < 2) throw DomainError("distribution: n_cut must be >= 2");
  if (static_cast<int>(probs.size()) != n_cut + 1)
    throw DomainError("distribution: probs must have n_cut + 1 entries");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0))
      throw DomainError("distribution: probabilities must lie in [0, 1]");
    sum += p;
  }
  if (!(tail_mass >= 0.0 && tail_mass <= 1.0))
    throw DomainError("distribution: tail_mass must lie in [0, 1]");
  if (std::abs(sum + tail_mass - 1.0) > kNormTol)
    throw DomainError("distribution: probs plus tail_mass must sum to 1");
}

nlohmann::json PhotonNumberDistribution::to_json() const {
  return nlohmann::json{
      {"probs", probs}, {"n_cut", n_cut}, {"tail_mass", tail_mass}};
}

std::string to_string(SourceKind kind) {
  return kind == SourceKind::Wcs ? "wcs" : "hsps";
}

void SourceSpec::validate() const {
  if (!(mean_intensity >= 0.0))
    throw DomainError("source: mean_intensity must be >= 0");
  if (!(repetition_rate > 0.0))
    throw DomainError("source: repetition_rate must be > 0");
  if (kind == SourceKind::Hsps) {
    if (!(herald_efficiency >= 0.0 && herald_efficiency <= 1.0))
      throw DomainError("source: herald_efficiency must lie in [0, 1]");
    if (!(herald_dark >= 0.0 && herald_dark < 1.0))
      throw DomainError("source: herald_dark must lie in [0, 1)");
    if (!(correlation_prob >= 0.0 && correlation_prob <= 1.0))
      throw DomainError("source: correlation_prob must lie in [0, 1]");
  }
}

PhotonNumberDistribution wcs_distribution(double x, int n_cut,
                                          double tail_cap) {
  if (!(x >= 0.0))
    throw DomainError("wcs_distribution: mean photon number must be >= 0");
  if (n_cut < 2) throw DomainError("wcs_distribution: n_cut must be >= 2");

  PhotonNumberDistribution dist;
  dist.n_cut = n_cut;
  dist.probs.resize(static_cast<std::size_t>(n_cut) + 1);
  double p = std::exp(-x);
  double sum = 0.0;
  for (int k = 0; k <= n_cut; ++k) {
    dist.probs[static_cast<std::size_t>(k)] = p;
    sum += p;
    p *= x / (k + 1);
  }
  dist.tail_mass = std::max(0.0, 1.0 - sum);
  dist.truncation_warning = dist.tail_mass > tail_cap;
  return dist;
}

PhotonNumberDistribution hsps_distribution(double x, double eta_a, double d_a,
                                           double c, int n_cut,
                                           double tail_cap) {
  if (!(x >= 0.0))
    throw DomainError("hsps_distribution: mean photon number must be >= 0");
  if (n_cut < 2) throw DomainError("hsps_distribution: n_cut must be >= 2");
  if (!(eta_a >= 0.0 && eta_a <= 1.0))
    throw DomainError("hsps_distribution: eta_a must lie in [0, 1]");
  if (!(d_a >= 0.0 && d_a < 1.0))
    throw DomainError("hsps_distribution: d_a must lie in [0, 1)");
  if (!(c >= 0.0 && c <= 1.0))
    throw DomainError("hsps_distribution: c must lie in [0, 1]");

  // Thermal weight t_k = x^k/(1+x)^(k+1); the herald click probability for a
  // k-pair pulse is c*(1-(1-eta_a)^k) + d_a. The normalization sums far past
  // n_cut so the post-selection probability is not truncation-limited.
  const int k_big = std::max(n_cut, 60);
  std::vector<double> w(static_cast<std::size_t>(k_big) + 1);
  double t = 1.0 / (1.0 + x);
  const double ratio = x / (1.0 + x);
  double miss = 1.0;  // (1 - eta_a)^k
  double post = 0.0;
  for (int k = 0; k <= k_big; ++k) {
    w[static_cast<std::size_t>(k)] = t * (c * (1.0 - miss) + d_a);
    post += w[static_cast<std::size_t>(k)];
    t *= ratio;
    miss *= 1.0 - eta_a;
  }
  if (!(post > 0.0))
    throw HeraldingImpossibleError(
        "hsps_distribution: zero post-selection probability; the source can "
        "never herald");

  PhotonNumberDistribution dist;
  dist.n_cut = n_cut;
  dist.probs.resize(static_cast<std::size_t>(n_cut) + 1);
  double sum = 0.0;
  for (int k = 0; k <= n_cut; ++k) {
    dist.probs[static_cast<std::size_t>(k)] =
        w[static_cast<std::size_t>(k)] / post;
    sum += dist.probs[static_cast<std::size_t>(k)];
  }
  dist.tail_mass = std::max(0.0, 1.0 - sum);
  dist.truncation_warning = dist.tail_mass > tail_cap;
  return dist;
}

PhotonNumberDistribution source_distribution(const SourceSpec& spec,
                                             int n_cut) {
  spec.validate();
  if (spec.kind == SourceKind::Wcs)
    return wcs_distribution(spec.mean_intensity, n_cut);
  return hsps_distribution(spec.mean_intensity, spec.herald_efficiency,
                           spec.herald_dark, spec.correlation_prob, n_cut);
}

double single_photon_probability(const SourceSpec& spec, int n_cut) {
  return source_distribution(spec, n_cut).probs[1];
}

double effective_single_photon_probability(const SourceSpec& spec,
                                           int n_cut) {
  const double p1 = single_photon_probability(spec, n_cut);
  if (spec.kind == SourceKind::Hsps) return spec.correlation_prob * p1;
  return p1;
}

SourceStatistics source_statistics(const PhotonNumberDistribution& dist) {
  dist.validate();
  double mean = 0.0;
  double m2 = 0.0;
  double fact2 = 0.0;  // sum k(k-1) p_k
  for (int k = 0; k <= dist.n_cut; ++k) {
    const double p = dist.probs[static_cast<std::size_t>(k)];
    mean += k * p;
    m2 += static_cast<double>(k) * k * p;
    fact2 += static_cast<double>(k) * (k - 1) * p;
  }
  SourceStatistics st;
  st.mean = mean;
  st.variance = std::max(0.0, m2 - mean * mean);
  // Conventions for an empty beam: g2 = 0, fano = 1.
  st.g2_zero = mean > 0.0 ? fact2 / (mean * mean) : 0.0;
  st.fano = mean > 0.0 ? st.variance / mean : 1.0;
  return st;
}

double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double tol) {
  if (!(lo < hi)) throw DomainError("bisect_root: empty interval");
  if (!(tol > 0.0)) throw DomainError("bisect_root: tolerance must be > 0");
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0 && fhi == 0.0)
    throw BracketError("bisect_root: function vanishes at both endpoints");
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw BracketError("bisect_root: no sign change over the interval");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double crossover_mean(const SourceSpec& hsps, int n_cut, double x_lo,
                      double x_hi, double tol) {
  if (hsps.kind != SourceKind::Hsps)
    throw DomainError("crossover_mean: spec must describe a heralded source");
  auto diff = [&](double x) {
    SourceSpec h = hsps;
    h.mean_intensity = x;
    SourceSpec w;
    w.kind = SourceKind::Wcs;
    w.mean_intensity = x;
    return effective_single_photon_probability(h, n_cut) -
           effective_single_photon_probability(w, n_cut);
  };
  return bisect_root(diff, x_lo, x_hi, tol);
}

}  // namespace qsi
