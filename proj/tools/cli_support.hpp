#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "unilab/types.hpp"

namespace unilab::cli {

using nlohmann::json;

/// Reads keys from a config object, recording every value (given or
/// defaulted) into the resolved config; finish() rejects keys never read.
class ConfigReader {
 public:
  ConfigReader(const json& config, std::string where);

  double number(const std::string& key, double fallback);
  std::int64_t integer(const std::string& key, std::int64_t fallback);
  std::uint64_t seed(const std::string& key, std::uint64_t fallback);
  std::string string(const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback);
  /// Points as [[re, im], ...] (a bare number means im = 0).
  std::vector<ComplexPoint> points(const std::string& key, std::vector<ComplexPoint> fallback);
  bool has(const std::string& key) const { return config_.contains(key); }
  /// Hands the whole document to a typed parser that validates and resolves it.
  const json& take_all();
  void set_resolved(json resolved) { resolved_ = std::move(resolved); }

  void finish();
  const json& resolved() const { return resolved_; }

 private:
  const json& lookup(const std::string& key);
  [[noreturn]] void bad(const std::string& key, const std::string& what) const;

  json config_;
  std::string where_;
  json resolved_ = json::object();
  std::set<std::string> seen_;
};

json complex_json(cplx z);

/// Output directory plus the artifact writers; file names are <command>.<kind>.
class Artifacts {
 public:
  Artifacts(std::filesystem::path dir, std::string command);

  void write_json(const std::string& suffix, const json& doc) const;
  void write_text(const std::string& suffix, const std::string& text) const;
  std::filesystem::path path(const std::string& suffix) const;
  const std::string& command() const { return command_; }

 private:
  std::filesystem::path dir_;
  std::string command_;
};

/// Shortest round-trip decimal for CSV cells.
std::string cell(double x);

}  // namespace unilab::cli
