#pragma once

#include <optional>

namespace apo::surrogate {

enum class Aggregation {
  MaxOverStates,
  MeanOverStates,
};

/// Knobs shared by the exact surrogate terms and the sampled estimators.
///
/// Exact-tier operations read gamma from the MDP they are given; the gamma
/// field here is for the sampled estimators, which have no model to ask.
struct SurrogateConfig {
  double k = 7.0;
  double mu_inf_norm = 1.0;
  // nullopt: compute |H|_max from the resolvent term; value: fixed constant.
  std::optional<double> h_max_hyper = 0.05;
  Aggregation aggregation = Aggregation::MeanOverStates;
  double gamma = 0.99;

  /// Settings under which the bound theorems hold verbatim.
  static SurrogateConfig exact_theory(double k_value) {
    SurrogateConfig cfg;
    cfg.k = k_value;
    cfg.mu_inf_norm = 1.0;
    cfg.h_max_hyper.reset();
    cfg.aggregation = Aggregation::MaxOverStates;
    return cfg;
  }
};

/// One full evaluation of the surrogate machinery for a policy pair.
struct SurrogateTerms {
  double j_lower = 0.0;
  double j_upper = 0.0;
  double mv = 0.0;         // upper bound on MeanVariance of the new policy
  double vm = 0.0;         // upper bound on VarianceMean of the new policy
  double mv_barred = 0.0;  // mv minus the constant and max-KL tail terms
  double vm_barred = 0.0;  // vm minus the old policy's E[V^2]
  double h_max = 0.0;
  double eta_max = 0.0;
  double epsilon = 0.0;        // max_{s,a} |A(s,a)|
  double epsilon_prime = 0.0;  // max_s |expected advantage gap|
  double kl_mean = 0.0;
  double kl_max = 0.0;
  double m_k = 0.0;  // j_lower - k (mv + vm)
};

}  // namespace apo::surrogate
