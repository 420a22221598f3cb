// Command-line front end: spectra of the truncated operator, cross-checks of
// the three eigenvalue routes, and epsilon sweeps, written as CSV or JSON.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bos/analysis.hpp"
#include "bos/eigensolver.hpp"
#include "bos/heun.hpp"
#include "bos/operator_core.hpp"
#include "bos/recurrence.hpp"
#include "bos/report.hpp"
#include "bos/sturm_liouville.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

void error_record(const std::string& msg, int code) {
  std::cerr << "{\"error\":\"" << msg << "\",\"code\":" << code << "}\n";
}

int write_output(const std::string& path, const std::string& payload) {
  if (path == "-" || path.empty()) {
    std::cout << payload;
    return kExitOk;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    error_record("cannot open output file " + path, kExitUsage);
    return kExitUsage;
  }
  f << payload;
  return kExitOk;
}

std::vector<bos::SpectrumRow> spectrum_rows_for(double eps, std::size_t n, double tol) {
  bos::SpectrumResult s1 =
      bos::compute_spectrum(bos::build_truncated(eps, n), /*want_vectors=*/true);
  const bos::SpectrumResult s2 =
      bos::compute_spectrum(bos::build_truncated(eps, 2 * n), /*want_vectors=*/false);
  bos::mark_stable(s1, s2, tol);

  std::vector<bos::SpectrumRow> rows;
  rows.reserve(s1.pairs.size());
  const std::size_t fit_lo = 10;
  const std::size_t fit_hi = std::max<std::size_t>(fit_lo + 5, n / 4);
  for (std::size_t i = 0; i < s1.pairs.size(); ++i) {
    bos::EigenPair& p = s1.pairs[i];
    p.decay_slope = bos::decay_slope(p.vector, fit_lo, fit_hi);
    rows.push_back(bos::SpectrumRow{eps, n, i + 1, p.lambda.real(), p.lambda.imag(),
                                    p.residual, p.stable, p.decay_slope});
  }
  return rows;
}

struct CommonOpts {
  std::vector<double> epsilons;
  std::size_t n = 1000;
  std::size_t galerkin = 200;
  double tol = 1e-8;
  std::string format = "csv";
  std::string out = "-";
};

int run_spectrum(const CommonOpts& o) {
  if (o.epsilons.size() != 1) {
    error_record("spectrum requires exactly one --epsilon", kExitUsage);
    return kExitUsage;
  }
  bos::validate_epsilon(o.epsilons[0]);
  const std::vector<bos::SpectrumRow> rows =
      spectrum_rows_for(o.epsilons[0], o.n, o.tol);
  const std::string payload =
      (o.format == "json") ? bos::spectrum_json(rows) : bos::spectrum_csv(rows);
  return write_output(o.out, payload);
}

int run_crosscheck(const CommonOpts& o, std::size_t count, double gate,
                   double lambda_lo, double lambda_hi, std::size_t seeds) {
  if (o.epsilons.size() != 1) {
    error_record("crosscheck requires exactly one --epsilon", kExitUsage);
    return kExitUsage;
  }
  const double eps = o.epsilons[0];
  bos::EpsilonParam param(eps);
  try {
    param.require_nonresonant();
  } catch (const std::invalid_argument& e) {
    error_record(std::string("1/epsilon in Z: ") + e.what(), kExitUsage);
    return kExitUsage;
  }

  // matrix route with stability filtering
  bos::SpectrumResult s1 =
      bos::compute_spectrum(bos::build_truncated(eps, o.n), /*want_vectors=*/true);
  const bos::SpectrumResult s2 =
      bos::compute_spectrum(bos::build_truncated(eps, 2 * o.n), /*want_vectors=*/false);
  std::vector<bos::EigenPair> stable = bos::filter_stable(s1, s2, o.tol);
  const std::size_t fit_hi = std::max<std::size_t>(15, o.n / 4);
  for (bos::EigenPair& p : stable) {
    p.decay_slope = bos::decay_slope(p.vector, 10, fit_hi);
  }
  if (stable.size() > count) stable.resize(count);

  // Sturm-Liouville route
  const bos::SturmLiouvilleSystem sys = bos::assemble(eps, o.galerkin);
  const std::vector<double> mus =
      bos::sl_spectrum(sys, std::min(count, sys.dim));
  std::vector<double> sl_lams(mus.size());
  for (std::size_t i = 0; i < mus.size(); ++i) {
    sl_lams[i] = bos::lambda_from_mu(eps, mus[i]);
  }

  // shooting route
  if (lambda_hi <= lambda_lo) {
    lambda_hi = sl_lams.empty() ? static_cast<double>(count) * 4.0
                                : sl_lams.back() + 1.0;
  }
  const std::vector<double> roots =
      bos::find_real_roots(eps, lambda_lo, lambda_hi, seeds);

  // connection coefficients at the best available eigenvalue estimates
  std::vector<double> abs_b;
  const std::vector<bos::cplx> pts = bos::overlap_circle();
  for (const bos::EigenPair& p : stable) {
    double lam = p.lambda.real();
    double best = 1e300;
    for (double r : roots) {
      if (std::abs(r - lam) < best) {
        best = std::abs(r - lam);
        if (best <= 1e-4 * (1.0 + std::abs(lam))) lam = r;
      }
    }
    const bos::HeunParams hp = bos::heun_parameters(eps, bos::cplx(lam));
    const bos::FrobeniusSeries u0 = bos::series_at_0(hp, 400);
    const bos::FrobeniusSeries u1 = bos::series_at_1(hp, bos::BranchAt1::kRegular, 400);
    const bos::FrobeniusSeries u2 = bos::singular_solution_at_1(hp, 400);
    std::vector<bos::cplx> vu, v1, v2;
    for (const bos::cplx& z : pts) {
      vu.push_back(u0.eval(z));
      v1.push_back(u1.eval(z));
      v2.push_back(u2.eval(z));
    }
    const bos::ConnectionFit fit = bos::connection_fit(vu, v1, v2);
    abs_b.push_back(fit.b_over_a);
  }

  const bos::CrossReport rep =
      bos::build_cross_report(eps, stable, roots, sl_lams, abs_b);
  const std::string payload =
      (o.format == "json") ? bos::cross_json(rep) : bos::cross_csv(rep);
  const int write_rc = write_output(o.out, payload);
  if (write_rc != kExitOk) return write_rc;

  if (stable.size() < count) {
    error_record("only " + std::to_string(stable.size()) + " of " +
                     std::to_string(count) +
                     " requested eigenvalues are stable at the current truncation",
                 kExitNumerical);
    return kExitNumerical;
  }
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const bos::CrossRow& r = rep.rows[i];
    const double scale = 1.0 + std::abs(r.lambda_matrix);
    if (!r.lambda_shooting || !r.lambda_sl) {
      error_record("row " + std::to_string(i + 1) + " has an unmatched route",
                   kExitNumerical);
      return kExitNumerical;
    }
    if (r.max_discrepancy > gate * scale) {
      error_record("row " + std::to_string(i + 1) + " discrepancy " +
                       bos::format_double(r.max_discrepancy) + " exceeds gate",
                   kExitNumerical);
      return kExitNumerical;
    }
  }
  for (const bos::EigenPair& p : stable) {
    if (std::abs(p.lambda.imag()) > gate * (1.0 + std::abs(p.lambda))) {
      error_record("stable eigenvalue with imaginary part " +
                       bos::format_double(p.lambda.imag()),
                   kExitNumerical);
      return kExitNumerical;
    }
  }
  return kExitOk;
}

int run_sweep(const CommonOpts& o) {
  if (o.epsilons.empty()) {
    error_record("sweep requires at least one --epsilon", kExitUsage);
    return kExitUsage;
  }
  std::vector<double> eps_list = o.epsilons;
  std::sort(eps_list.begin(), eps_list.end());
  eps_list.erase(std::unique(eps_list.begin(), eps_list.end()), eps_list.end());
  for (double eps : eps_list) bos::validate_epsilon(eps);

  std::vector<bos::SweepRow> rows;
  bool any_failed = false;
  for (double eps : eps_list) {
    try {
      const std::vector<bos::SpectrumRow> block = spectrum_rows_for(eps, o.n, o.tol);
      for (const bos::SpectrumRow& r : block) {
        rows.push_back(bos::SweepRow{eps, r.index, r.re_lambda, r.im_lambda, r.stable});
      }
    } catch (const std::exception& e) {
      error_record("epsilon " + bos::format_double(eps) + " failed: " + e.what(),
                   kExitNumerical);
      any_failed = true;
    }
  }
  const std::string payload =
      (o.format == "json") ? bos::sweep_json(rows) : bos::sweep_csv(rows);
  const int rc = write_output(o.out, payload);
  if (rc != kExitOk) return rc;
  return any_failed ? kExitNumerical : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral analysis of the Benilov-O'Brien-Sazonov operator"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::size_t count = 10;
  double gate = 1e-6;
  double lambda_lo = 0.05;
  double lambda_hi = 0.0;  // <= lo means automatic
  std::size_t seeds = 400;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--epsilon", opts.epsilons, "model parameter in (0,2); repeatable");
    cmd->add_option("-N,--size", opts.n, "truncation size")->check(CLI::PositiveNumber);
    cmd->add_option("--tol", opts.tol, "stability filter tolerance (relative)");
    cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", opts.out, "output path ('-' for stdout)");
  };

  CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalues of one truncation");
  add_common(spectrum);

  CLI::App* crosscheck =
      app.add_subcommand("crosscheck", "compare matrix, shooting and SL routes");
  add_common(crosscheck);
  crosscheck->add_option("-K,--galerkin", opts.galerkin, "Galerkin dimension")
      ->check(CLI::PositiveNumber);
  crosscheck->add_option("--count", count, "number of eigenvalues to compare");
  crosscheck->add_option("--gate", gate, "agreement gate for exit status");
  crosscheck->add_option("--lambda-lo", lambda_lo, "shooting search interval start");
  crosscheck->add_option("--lambda-hi", lambda_hi,
                         "shooting search interval end (auto when <= start)");
  crosscheck->add_option("--seeds", seeds, "shooting search grid size");

  CLI::App* sweep = app.add_subcommand("sweep", "spectra across several epsilon");
  add_common(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (spectrum->parsed()) return run_spectrum(opts);
    if (crosscheck->parsed()) {
      return run_crosscheck(opts, count, gate, lambda_lo, lambda_hi, seeds);
    }
    if (sweep->parsed()) return run_sweep(opts);
  } catch (const std::invalid_argument& e) {
    error_record(e.what(), kExitUsage);
    return kExitUsage;
  } catch (const bos::numerical_error& e) {
    error_record(e.what(), kExitNumerical);
    return kExitNumerical;
  } catch (const std::exception& e) {
    error_record(e.what(), kExitNumerical);
    return kExitNumerical;
  }
  return kExitUsage;
}
