#include "sgdlab/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sgdlab {

std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void write_trace_csv(const std::string& path, const Trace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  out << "t,risk,grad_norm_sq,eta\n";
  for (const auto& cp : trace.checkpoints) {
    out << cp.t << "," << format_double(cp.risk) << "," << format_double(cp.grad_norm_sq)
        << "," << format_double(cp.eta) << "\n";
  }
}

void write_aggregate_json(const std::string& path, const AggregateTrace& agg) {
  nlohmann::ordered_json t = nlohmann::ordered_json::array();
  nlohmann::ordered_json risk = nlohmann::ordered_json::array();
  nlohmann::ordered_json grad = nlohmann::ordered_json::array();
  nlohmann::ordered_json pref = nlohmann::ordered_json::array();
  nlohmann::ordered_json esum = nlohmann::ordered_json::array();
  for (const auto& pt : agg.checkpoints) {
    t.push_back(pt.t);
    risk.push_back(pt.mean_risk);
    grad.push_back(pt.mean_grad_norm_sq);
    pref.push_back(pt.min_prefix_grad_norm_sq);
    esum.push_back(pt.eta_sum);
  }
  nlohmann::ordered_json j;
  j["t"] = std::move(t);
  j["mean_risk"] = std::move(risk);
  j["mean_grad_norm_sq"] = std::move(grad);
  j["min_prefix"] = std::move(pref);
  j["eta_sum"] = std::move(esum);
  j["n_seeds"] = agg.n_seeds;
  j["diverged_seeds"] = agg.diverged_seeds;
  write_text_file(path, j.dump(2) + "\n");
}

AggregateTrace read_aggregate_json(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  AggregateTrace agg;
  const auto& t = j.at("t");
  const auto& risk = j.at("mean_risk");
  const auto& grad = j.at("mean_grad_norm_sq");
  const auto& pref = j.at("min_prefix");
  for (std::size_t k = 0; k < t.size(); ++k) {
    AggregatePoint pt;
    pt.t = t[k].get<std::int64_t>();
    pt.mean_risk = risk[k].get<double>();
    pt.mean_grad_norm_sq = grad[k].get<double>();
    pt.min_prefix_grad_norm_sq = pref[k].get<double>();
    if (j.contains("eta_sum")) pt.eta_sum = j["eta_sum"][k].get<double>();
    agg.checkpoints.push_back(pt);
  }
  agg.n_seeds = j.at("n_seeds").get<int>();
  if (j.contains("diverged_seeds")) {
    agg.diverged_seeds = j["diverged_seeds"].get<std::vector<std::uint64_t>>();
  }
  return agg;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace sgdlab
