// Simulate ratios at a known coupling, fit k back, and print a histogram
// against the fitted density.
//
//   fit_demo [beta] [k] [n] [seed]

#include <cstdio>
#include <cstdlib>

#include "ratio_rmt/ratio_rmt.hpp"

int main(int argc, char** argv) {
  using namespace ratio_rmt;
  const int beta = argc > 1 ? std::atoi(argv[1]) : 2;
  const double k = argc > 2 ? std::atof(argv[2]) : 0.4;
  const std::size_t n = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 50000;
  const std::uint64_t seed = argc > 4 ? std::strtoull(argv[4], nullptr, 10) : 1;

  const auto cls = symmetry_from_beta(beta);
  const auto sample = sample_ratios(cls, Coupling{k}, n, seed);
  const auto fit = fit_k_mle(sample, cls);
  std::printf("beta=%d k*=%.3f n=%zu\n", beta, k, n);
  std::printf("k_hat=%.4f  95%% CI [%.4f, %.4f]  KS=%.4f\n", fit.k_hat, fit.ci_low, fit.ci_high, fit.ks_statistic);

  const DensityCache model(cls, fit.k_hat);
  const auto edges = uniform_edges(0.0, 5.0, 25);
  const auto hist = build_histogram(sample.ratios, edges);
  const auto dens = hist.density();
  std::printf("%8s %10s %10s %10s\n", "r", "histogram", "model", "surmise");
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    const double r = hist.center(i);
    std::printf("%8.3f %10.5f %10.5f %10.5f\n", r, dens[i], model.pdf(r), surmise_ratio_pdf(cls, r));
  }
  return 0;
}
