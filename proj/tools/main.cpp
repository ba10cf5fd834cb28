#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "unilab/error.hpp"
#include "unilab/parallel.hpp"

using namespace unilab;
using namespace unilab::cli;

namespace {

enum Exit { kOk = 0, kValidation = 1, kCompute = 2 };

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Validation:
    case ErrorCode::InvalidArgument:
      return kValidation;
    default:
      return kCompute;
  }
}

json error_json(const std::string& command, const std::string& code, const std::string& message) {
  return {{"error", {{"command", command}, {"code", code}, {"message", message}}}};
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream is(path);
  if (!is) fail(ErrorCode::Validation, "cannot open config " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Validation, std::string("config is not valid JSON: ") + e.what());
  }
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out = "unilab_out";
  std::optional<double> sigma, t;
};

int run(const std::string& command, const Options& o) {
  std::optional<Artifacts> out;
  try {
    json cfg = load_config(o.config);
    if (!cfg.is_object()) fail(ErrorCode::Validation, "config must be a JSON object");
    int threads = 1;
    if (cfg.contains("threads")) {
      if (!cfg["threads"].is_number_integer()) fail(ErrorCode::Validation, "threads must be an integer");
      threads = cfg["threads"].get<int>();
      cfg.erase("threads");
    }
    if (o.threads) threads = *o.threads;
    if (threads < 1) fail(ErrorCode::Validation, "threads must be positive");
    if (o.seed) {
      if (command == "scan") cfg["run"]["seed"] = *o.seed;
      else cfg["seed"] = *o.seed;
    }
    if (o.sigma || o.t) {
      if (command != "zeta") fail(ErrorCode::Validation, "--sigma/--t apply to the zeta subcommand only");
      cfg.erase("points");
      if (o.sigma) cfg["sigma"] = *o.sigma;
      if (o.t) cfg["t"] = *o.t;
    }
    set_worker_count(threads);
    out.emplace(o.out, command);

    const auto start = std::chrono::steady_clock::now();
    const std::string started = utc_now();
    ConfigReader reader(cfg, command);
    const auto result = run_command(command, reader, *out);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    out->write_json("config.json", reader.resolved());
    out->write_json("json", result.summary);
    out->write_json("meta.json", {{"started", started}, {"elapsed_seconds", elapsed}, {"threads", threads}});
    std::cout << result.summary.dump(2) << "\n";
    if (!result.ok) {
      std::cerr << error_json(command, "CheckFailed", "one or more checks failed").dump() << "\n";
      return kCompute;
    }
    return kOk;
  } catch (const Error& e) {
    const auto doc = error_json(command, to_string(e.code()), e.what());
    std::cerr << doc.dump() << "\n";
    if (out) {
      try {
        out->write_json("error.json", doc);
      } catch (const Error&) {
      }
    }
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << error_json(command, "Internal", e.what()).dump() << "\n";
    return kCompute;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unilab: zeta value-distribution and universality experiments"};
  app.require_subcommand(1);
  Options o;
  std::string chosen;
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", o.config, "JSON config file (defaults apply when omitted)");
    sub->add_option("--seed", o.seed, "master seed override");
    sub->add_option("--threads", o.threads, "worker threads (results do not depend on it)");
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    if (name == "zeta") {
      sub->add_option("--sigma", o.sigma, "real part");
      sub->add_option("--t", o.t, "imaginary part");
    }
    sub->callback([&chosen, name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << error_json("", "Usage", e.what()).dump() << "\n";
    return kValidation;
  }
  return run(chosen, o);
}
