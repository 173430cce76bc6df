#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace thermodtn::cli {

enum ExitCode { Ok = 0, ValidationFailure = 1, ToleranceFailure = 2, IoFailure = 3 };

struct Options {
  std::string command;
  std::string manifest;
  std::string table;
  std::string out;
  std::optional<int> depth;
  std::vector<double> ladder;
  std::optional<std::string> mode;
  int jobs = 1;
};

/// Runs one command; the summary line goes to `out`, diagnostics to `err`.
int run(const Options& opt, std::ostream& out, std::ostream& err);

}  // namespace thermodtn::cli
