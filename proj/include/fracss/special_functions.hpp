#pragma once

#include <utility>
#include <vector>

namespace fracss {

/// Truncation control shared by the series evaluators.  A sum stops once two
/// consecutive terms fall below tol·max(1, |partial sum|) inside the region
/// where term magnitudes are decreasing.
struct SeriesOptions {
  double tol = 1e-14;
  int max_terms = 512;
};

struct SeriesResult {
  double value = 0.0;
  /// Geometric estimate of the discarded tail from the last two terms.
  double tail_bound = 0.0;
  double last_term = 0.0;
  int terms = 0;
};

class MittagLefflerParams {
 public:
  explicit MittagLefflerParams(double alpha, double beta = 1.0);
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

 private:
  double alpha_;
  double beta_;
};

/// Three-index function E_{α,m,l}(z) = 1 + Σ_k ∏_{i<k} Γ(α(im+l)+1)/Γ(α(im+l+1)+1) z^k.
class KilbasSaigoParams {
 public:
  KilbasSaigoParams(double alpha, double m, double l);
  double alpha() const { return alpha_; }
  double m() const { return m_; }
  double l() const { return l_; }

 private:
  double alpha_;
  double m_;
  double l_;
};

class WrightParams {
 public:
  WrightParams(double lambda, double mu);
  double lambda() const { return lambda_; }
  double mu() const { return mu_; }

 private:
  double lambda_;
  double mu_;
};

/// pPsiq with (a_i, α_i) upper and (b_j, β_j) lower pairs.
class GeneralizedWrightParams {
 public:
  using Pair = std::pair<double, double>;
  GeneralizedWrightParams(std::vector<Pair> upper, std::vector<Pair> lower);
  const std::vector<Pair>& upper() const { return upper_; }
  const std::vector<Pair>& lower() const { return lower_; }

 private:
  std::vector<Pair> upper_;
  std::vector<Pair> lower_;
};

SeriesResult mittag_leffler_series(const MittagLefflerParams& p, double z, SeriesOptions opt = {});
SeriesResult kilbas_saigo_series(const KilbasSaigoParams& p, double z, SeriesOptions opt = {});
SeriesResult wright_series(const WrightParams& p, double z, SeriesOptions opt = {});
SeriesResult generalized_wright_series(const GeneralizedWrightParams& p, double z, SeriesOptions opt = {});

inline double mittag_leffler(const MittagLefflerParams& p, double z, SeriesOptions opt = {}) {
  return mittag_leffler_series(p, z, opt).value;
}
inline double kilbas_saigo(const KilbasSaigoParams& p, double z, SeriesOptions opt = {}) {
  return kilbas_saigo_series(p, z, opt).value;
}
inline double wright(const WrightParams& p, double z, SeriesOptions opt = {}) { return wright_series(p, z, opt).value; }
inline double generalized_wright(const GeneralizedWrightParams& p, double z, SeriesOptions opt = {}) {
  return generalized_wright_series(p, z, opt).value;
}

/// k-th Kilbas-Saigo coefficient ∏_{i<k} Γ(α(im+l)+1)/Γ(α(im+l+1)+1).
double kilbas_saigo_coefficient(const KilbasSaigoParams& p, int k);

}  // namespace fracss
