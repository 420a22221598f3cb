#include "bos/report.hpp"

#include <charconv>

#include <json.hpp>

namespace bos {

namespace {

using ordered_json = nlohmann::ordered_json;

nlohmann::json opt_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

std::string opt_csv(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string spectrum_csv(const std::vector<SpectrumRow>& rows) {
  std::string out = "epsilon,N,index,re_lambda,im_lambda,residual,stable,decay_slope\n";
  for (const SpectrumRow& r : rows) {
    out += format_double(r.epsilon);
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    out += std::to_string(r.index);
    out += ',';
    out += format_double(r.re_lambda);
    out += ',';
    out += format_double(r.im_lambda);
    out += ',';
    out += format_double(r.residual);
    out += ',';
    out += r.stable ? "true" : "false";
    out += ',';
    out += opt_csv(r.decay_slope);
    out += '\n';
  }
  return out;
}

std::string spectrum_json(const std::vector<SpectrumRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const SpectrumRow& r : rows) {
    ordered_json o;
    o["epsilon"] = r.epsilon;
    o["N"] = r.n;
    o["index"] = r.index;
    o["re_lambda"] = r.re_lambda;
    o["im_lambda"] = r.im_lambda;
    o["residual"] = r.residual;
    o["stable"] = r.stable;
    o["decay_slope"] = opt_json(r.decay_slope);
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

std::string cross_csv(const CrossReport& rep) {
  std::string out =
      "epsilon,lambda_matrix,lambda_shooting,lambda_sl,abs_b_connection,decay_slope,"
      "max_discrepancy\n";
  for (const CrossRow& r : rep.rows) {
    out += format_double(rep.epsilon);
    out += ',';
    out += format_double(r.lambda_matrix);
    out += ',';
    out += opt_csv(r.lambda_shooting);
    out += ',';
    out += opt_csv(r.lambda_sl);
    out += ',';
    out += opt_csv(r.connection_b);
    out += ',';
    out += opt_csv(r.decay_slope);
    out += ',';
    out += format_double(r.max_discrepancy);
    out += '\n';
  }
  // unmatched entries, kept visible in a separate section
  for (double x : rep.unmatched_shooting) {
    out += format_double(rep.epsilon);
    out += ",,";
    out += format_double(x);
    out += ",,,,\n";
  }
  for (double x : rep.unmatched_sl) {
    out += format_double(rep.epsilon);
    out += ",,,";
    out += format_double(x);
    out += ",,,\n";
  }
  return out;
}

std::string cross_json(const CrossReport& rep) {
  ordered_json root;
  root["epsilon"] = rep.epsilon;
  ordered_json arr = ordered_json::array();
  for (const CrossRow& r : rep.rows) {
    ordered_json o;
    o["lambda_matrix"] = r.lambda_matrix;
    o["lambda_shooting"] = opt_json(r.lambda_shooting);
    o["lambda_sl"] = opt_json(r.lambda_sl);
    o["abs_b_connection"] = opt_json(r.connection_b);
    o["decay_slope"] = opt_json(r.decay_slope);
    o["max_discrepancy"] = r.max_discrepancy;
    arr.push_back(std::move(o));
  }
  root["rows"] = std::move(arr);
  root["unmatched_shooting"] = rep.unmatched_shooting;
  root["unmatched_sl"] = rep.unmatched_sl;
  return root.dump(2) + "\n";
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "epsilon,k,re_lambda,im_lambda,stable\n";
  for (const SweepRow& r : rows) {
    out += format_double(r.epsilon);
    out += ',';
    out += std::to_string(r.k);
    out += ',';
    out += format_double(r.re_lambda);
    out += ',';
    out += format_double(r.im_lambda);
    out += ',';
    out += r.stable ? "true" : "false";
    out += '\n';
  }
  return out;
}

std::string sweep_json(const std::vector<SweepRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const SweepRow& r : rows) {
    ordered_json o;
    o["epsilon"] = r.epsilon;
    o["k"] = r.k;
    o["re_lambda"] = r.re_lambda;
    o["im_lambda"] = r.im_lambda;
    o["stable"] = r.stable;
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

}  // namespace bos
