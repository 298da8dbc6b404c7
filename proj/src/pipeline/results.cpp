#include "r2l/pipeline/results.hpp"

#include <cstdio>
#include <ostream>

#include "r2l/common/error.hpp"

namespace r2l::pipeline {

void write_results(const RunResults& run, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path.string());
  out << nlohmann::json{{"results", run.results}, {"timing", run.timing}}.dump(2) << '\n';
}

RunResults read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path.string());
  try {
    nlohmann::json j;
    in >> j;
    return {j.at("results"), j.at("timing")};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

RunLog::RunLog(const std::filesystem::path& path, std::ostream* echo) : echo_(echo) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  file_.open(path, std::ios::app);
  if (!file_) throw UsageError("cannot open log " + path.string());
}

void RunLog::line(const std::string& text) {
  char stamp[32];
  std::snprintf(stamp, sizeof stamp, "[%9.1fs] ", seconds_since(start_));
  if (file_.is_open()) file_ << stamp << text << std::endl;
  if (echo_ != nullptr) *echo_ << text << std::endl;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace r2l::pipeline
