#include "cli_support.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "unilab/error.hpp"

namespace unilab::cli {

ConfigReader::ConfigReader(const json& config, std::string where)
    : config_(config.is_null() ? json::object() : config), where_(std::move(where)) {
  if (!config_.is_object()) fail(ErrorCode::Validation, where_ + ": expected a JSON object");
}

void ConfigReader::bad(const std::string& key, const std::string& what) const {
  fail(ErrorCode::Validation, where_ + "." + key + ": " + what);
}

const json& ConfigReader::lookup(const std::string& key) {
  seen_.insert(key);
  return config_[key];
}

double ConfigReader::number(const std::string& key, double fallback) {
  double v = fallback;
  if (config_.contains(key)) {
    const auto& j = lookup(key);
    if (!j.is_number()) bad(key, "expected a number");
    v = j.get<double>();
    if (!std::isfinite(v)) bad(key, "must be finite");
  }
  seen_.insert(key);
  resolved_[key] = v;
  return v;
}

std::int64_t ConfigReader::integer(const std::string& key, std::int64_t fallback) {
  std::int64_t v = fallback;
  if (config_.contains(key)) {
    const auto& j = lookup(key);
    if (j.is_number_integer()) {
      v = j.get<std::int64_t>();
    } else if (j.is_number_float() && std::floor(j.get<double>()) == j.get<double>() &&
               std::abs(j.get<double>()) < 9e15) {
      v = static_cast<std::int64_t>(j.get<double>());
    } else {
      bad(key, "expected an integer");
    }
  }
  seen_.insert(key);
  resolved_[key] = v;
  return v;
}

std::uint64_t ConfigReader::seed(const std::string& key, std::uint64_t fallback) {
  std::uint64_t v = fallback;
  if (config_.contains(key)) {
    const auto& j = lookup(key);
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
      bad(key, "expected a nonnegative integer");
    v = j.get<std::uint64_t>();
  }
  seen_.insert(key);
  resolved_[key] = v;
  return v;
}

std::string ConfigReader::string(const std::string& key, const std::string& fallback) {
  std::string v = fallback;
  if (config_.contains(key)) {
    const auto& j = lookup(key);
    if (!j.is_string()) bad(key, "expected a string");
    v = j.get<std::string>();
  }
  seen_.insert(key);
  resolved_[key] = v;
  return v;
}

std::vector<double> ConfigReader::numbers(const std::string& key, std::vector<double> fallback) {
  if (config_.contains(key)) {
    const auto& j = lookup(key);
    if (!j.is_array()) bad(key, "expected an array of numbers");
    fallback.clear();
    for (const auto& x : j) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) bad(key, "expected finite numbers");
      fallback.push_back(x.get<double>());
    }
  }
  seen_.insert(key);
  resolved_[key] = fallback;
  return fallback;
}

std::vector<ComplexPoint> ConfigReader::points(const std::string& key,
                                               std::vector<ComplexPoint> fallback) {
  if (config_.contains(key)) {
    const auto& j = lookup(key);
    if (!j.is_array() || j.empty()) bad(key, "expected a nonempty array of [re, im]");
    fallback.clear();
    for (const auto& p : j) {
      if (p.is_number()) {
        fallback.emplace_back(p.get<double>(), 0.0);
      } else if (p.is_array() && p.size() == 2 && p[0].is_number() && p[1].is_number()) {
        fallback.emplace_back(p[0].get<double>(), p[1].get<double>());
      } else {
        bad(key, "expected [re, im] pairs");
      }
      if (!fallback.back().finite()) bad(key, "points must be finite");
    }
  }
  json arr = json::array();
  for (const auto& p : fallback) arr.push_back(json::array({p.re, p.im}));
  seen_.insert(key);
  resolved_[key] = arr;
  return fallback;
}

const json& ConfigReader::take_all() {
  for (auto it = config_.begin(); it != config_.end(); ++it) seen_.insert(it.key());
  return config_;
}

void ConfigReader::finish() {
  for (auto it = config_.begin(); it != config_.end(); ++it) {
    if (!seen_.count(it.key())) fail(ErrorCode::Validation, where_ + ": unknown key '" + it.key() + "'");
  }
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

Artifacts::Artifacts(std::filesystem::path dir, std::string command)
    : dir_(std::move(dir)), command_(std::move(command)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) fail(ErrorCode::Io, "cannot create output directory " + dir_.string() + ": " + ec.message());
}

std::filesystem::path Artifacts::path(const std::string& suffix) const {
  return dir_ / (command_ + "." + suffix);
}

void Artifacts::write_text(const std::string& suffix, const std::string& text) const {
  const auto p = path(suffix);
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  os << text;
  if (!os) fail(ErrorCode::Io, "cannot write " + p.string());
}

void Artifacts::write_json(const std::string& suffix, const json& doc) const {
  write_text(suffix, doc.dump(2) + "\n");
}

std::string cell(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace unilab::cli
