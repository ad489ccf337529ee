#pragma once

// CSV tables and JSON sidecars. Doubles are written in shortest round-trip
// form so files are byte-stable across reruns.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lpp/asymptotics.hpp"
#include "lpp/ensemble.hpp"
#include "lpp/growth.hpp"
#include "lpp/tracy_widom.hpp"

namespace lpp {

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using json = nlohmann::json;

inline std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw io_error("write failed for " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

inline json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw io_error(path.string() + ": " + e.what());
  }
}

inline std::string samples_csv(const SampleBatch& b) {
  std::string s = "sample_index,raw,rescaled\n";
  for (std::size_t i = 0; i < b.raw.size(); ++i) s += std::to_string(i) + "," + fmt(b.raw[i]) + "," + fmt(b.rescaled[i]) + "\n";
  return s;
}

inline json samples_meta(const SampleBatch& b) {
  return {{"M", b.params.M},
          {"N", b.params.N},
          {"q", b.params.q},
          {"gamma", b.params.gamma()},
          {"seed", b.seed},
          {"omega", b.omega},
          {"sigma", b.sigma},
          {"kind", b.kind == WeightKind::Exponential ? "exponential" : "geometric"},
          {"rescale", "(raw - omega*N)/(sigma*N^(1/3))"},
          {"samples", b.raw.size()}};
}

inline std::string cdf_csv(const std::vector<CdfValue>& rows) {
  std::string s = "t,p,err,method\n";
  for (const auto& r : rows) s += fmt(r.t) + "," + fmt(r.p) + "," + fmt(r.err) + "," + to_string(r.method) + "\n";
  return s;
}

inline std::string tw_csv(const std::vector<TwValue>& rows) {
  std::string s = "s,F,method,est_err\n";
  for (const auto& r : rows) s += fmt(r.s) + "," + fmt(r.f) + "," + to_string(r.method) + "," + fmt(r.est_err) + "\n";
  return s;
}

inline std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::string s = "N,sup_dist,grid_lo,grid_hi\n";
  for (const auto& r : rows)
    s += std::to_string(r.N) + "," + fmt(r.sup_dist) + "," + fmt(r.grid_lo) + "," + fmt(r.grid_hi) + "\n";
  return s;
}

inline json constants_json(const EdgeConstants& k) {
  const ExpConstants e = exp_constants(k.gamma);
  return {{"gamma", k.gamma},
          {"q", k.q},
          {"omega", k.omega},
          {"sigma", k.sigma},
          {"a", k.a},
          {"b", k.b},
          {"c", k.c},
          {"B", k.B},
          {"D", k.D},
          {"regime", k.saturated_regime() ? "gamma<1/q" : "gamma>=1/q"},
          {"exp_mean", e.mean},
          {"exp_scale", e.scale}};
}

}  // namespace lpp
