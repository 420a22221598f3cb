#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bos/analysis.hpp"

namespace bos {

// Shortest representation that round-trips (std::to_chars); '.' decimal
// separator regardless of locale.
std::string format_double(double x);

struct SpectrumRow {
  double epsilon;
  std::size_t n;
  std::size_t index;  // 1-based, ascending real part
  double re_lambda;
  double im_lambda;
  double residual;
  bool stable;
  std::optional<double> decay_slope;
};

struct SweepRow {
  double epsilon;
  std::size_t k;
  double re_lambda;
  double im_lambda;
  bool stable;
};

std::string spectrum_csv(const std::vector<SpectrumRow>& rows);
std::string spectrum_json(const std::vector<SpectrumRow>& rows);

std::string cross_csv(const CrossReport& rep);
std::string cross_json(const CrossReport& rep);

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string sweep_json(const std::vector<SweepRow>& rows);

}  // namespace bos
