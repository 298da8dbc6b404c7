#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace r2l::pipeline {

/// Machine-readable results of one run. `results` must be a pure function of
/// the configuration, seed and thread count; wall-clock values go to `timing`.
struct RunResults {
  nlohmann::json results = nlohmann::json::object();
  nlohmann::json timing = nlohmann::json::object();
};

/// {"results": ..., "timing": ...} with sorted keys and two-space indent.
void write_results(const RunResults& run, const std::filesystem::path& path);
RunResults read_results(const std::filesystem::path& path);

/// Append-only text log; every line is also echoed to `echo` when set.
class RunLog {
 public:
  RunLog() = default;
  RunLog(const std::filesystem::path& path, std::ostream* echo);

  void line(const std::string& text);
  /// Stream for per-iteration progress; goes to the file only.
  std::ostream* progress() { return file_.is_open() ? &file_ : nullptr; }

 private:
  std::ofstream file_;
  std::ostream* echo_ = nullptr;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Seconds since `start`.
double seconds_since(std::chrono::steady_clock::time_point start);

}  // namespace r2l::pipeline
