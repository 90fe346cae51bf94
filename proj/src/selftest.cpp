#include "rcm/selftest.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "rcm/detect.hpp"
#include "rcm/oracle.hpp"
#include "rcm/select.hpp"
#include "rcm/stats.hpp"

namespace rcm {

namespace {

double mixed_error(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

void expect(SelftestCheck& check, bool ok, const std::string& what) {
  ++check.evaluated;
  if (!ok && check.passed) {
    check.passed = false;
    check.detail = what;
  }
}

SelftestCheck named(std::string name) {
  SelftestCheck check;
  check.name = std::move(name);
  return check;
}

std::string where(int instance, HypothesisIndex idx) {
  return fmt::format("instance {} at (l={}, h={})", instance, idx.l, idx.h);
}

}  // namespace

std::vector<SelftestCheck> run_selftest(const SelftestOptions& options) {
  SelftestCheck prefix = named("lambda prefix sums vs direct summation (1e-12)");
  SelftestCheck logdet_pdf = named("logdet objective vs penalized log-PDF objective (argmin, constant 1e-8)");
  SelftestCheck selectors = named("selection surfaces vs brute force (1e-8) and argmins");
  SelftestCheck detectors = named("detector statistics vs brute force (1e-10)");
  SelftestCheck glrt = named("OSA-2 statistic vs penalized log-GLRT (1e-8)");
  SelftestCheck scaling = named("complex scaling invariance of statistics (1e-9) and argmins");

  const ScopedPenaltyFault fault(options.penalty_fault);

  for (int n = 0; n < options.instances; ++n) {
    RngStream rng(options.seed, static_cast<std::uint64_t>(n));
    const int na = 1 + static_cast<int>(rng.next_u32() % 4);
    const int np = 1 + static_cast<int>(rng.next_u32() % 5);
    const int k = na + 2 + static_cast<int>(rng.next_u32() % 4);
    const auto inst = oracle::random_instance(rng, na, np, k);
    const DataSet& data = inst.data;
    const ComplexVector& v = inst.v;
    const HypothesisGrid grid(np);

    // Prefix-sum lambda against a plain double loop over the same energies.
    const auto table = energy_table(data.z1, data.z2, factorize(sample_scatter(data.r)), v);
    grid.for_each([&](HypothesisIndex idx) {
      double direct = 0;
      for (int i = 1; i <= idx.l; ++i) direct += table.e1(i - 1);
      for (int w = idx.l + 1; w <= idx.l + idx.h; ++w) direct += table.e2(w - 1);
      expect(prefix, mixed_error(lambda(table, idx), direct) <= 1e-12, where(n, idx));
    });

    // Logdet form against the literal penalized log-PDF form.
    const auto logdet_surface = oracle::one_step_surface(data, v);
    const auto pdf_surface = oracle::one_step_pdf_surface(data, v);
    const double offset = pdf_surface.front() - logdet_surface.front();
    for (std::size_t i = 0; i < pdf_surface.size(); ++i) {
      expect(logdet_pdf, mixed_error(pdf_surface[i] - logdet_surface[i], offset) <= 1e-8,
             fmt::format("instance {} grid point {}", n, i));
    }
    const auto one_step = select_one_step(data, v);
    expect(logdet_pdf, oracle::argmin(pdf_surface, np) == one_step.chosen,
           fmt::format("instance {}: argmin differs", n));

    // Selector surfaces.
    const std::pair<SelectionResult, std::vector<double>> rules[] = {
        {select_two_step(data, v), oracle::two_step_surface(data, v)},
        {one_step, logdet_surface},
        {select_one_step_reduced(data, v), oracle::one_step_reduced_surface(data, v)}};
    for (const auto& [result, reference] : rules) {
      for (std::size_t i = 0; i < reference.size(); ++i) {
        expect(selectors, mixed_error(result.surface[i], reference[i]) <= 1e-8,
               fmt::format("instance {} grid point {}: {} vs {}", n, i, result.surface[i],
                           reference[i]));
      }
      expect(selectors, result.chosen == oracle::argmin(reference, np),
             fmt::format("instance {}: chosen (l={}, h={}) differs", n, result.chosen.l,
                         result.chosen.h));
    }

    // Every detector.
    const ClairvoyantInputs clairvoyant{inst.truth, inst.true_m};
    for (DetectorKind kind : kAllDetectors) {
      const double got = detect(kind, data, v, &clairvoyant).statistic;
      const double want = oracle::statistic(kind, data, v, &clairvoyant);
      expect(detectors, mixed_error(got, want) <= 1e-10,
             fmt::format("instance {} {}: {} vs {}", n, to_string(kind), got, want));
    }
    const double osa2 = osa2_statistic(data, v).first;
    expect(glrt, mixed_error(oracle::osa2_log_glrt(data, v), (2.0 * np + k) * osa2) <= 1e-8,
           fmt::format("instance {}", n));

    // Common complex scaling.
    const std::complex<double> c = rng.complex_normal() * 10.0 + 0.1;
    const DataSet scaled{c * data.z1, c * data.z2, c * data.r};
    // Scaled data have covariance |c|^2 M, which the clairvoyant must be told.
    const ClairvoyantInputs scaled_clairvoyant{inst.truth, std::norm(c) * inst.true_m};
    for (DetectorKind kind : kAllDetectors) {
      const auto a = detect(kind, data, v, &clairvoyant);
      const auto b = detect(kind, scaled, v, &scaled_clairvoyant);
      expect(scaling,
             std::abs(a.statistic - b.statistic) <=
                 1e-9 * std::max(1.0, std::abs(a.statistic)) && a.estimated == b.estimated,
             fmt::format("instance {} {}", n, to_string(kind)));
    }
    for (SelectionRule rule :
         {SelectionRule::TwoStep, SelectionRule::OneStep, SelectionRule::OneStepReduced}) {
      expect(scaling, select(rule, data, v).chosen == select(rule, scaled, v).chosen,
             fmt::format("instance {} {}", n, to_string(rule)));
    }
  }
  return {prefix, logdet_pdf, selectors, detectors, glrt, scaling};
}

bool print_selftest(const std::vector<SelftestCheck>& checks, std::ostream& out) {
  bool all = true;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " [" << c.evaluated << " comparisons]";
    if (!c.passed) out << ": " << c.detail;
    out << '\n';
    all = all && c.passed;
  }
  return all;
}

}  // namespace rcm
