#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace koko::cli {

enum ExitCode { kOk = 0, kMismatch = 1, kFormatError = 2, kQueryError = 3 };

struct RunConfig {
  std::string corpus;
  std::string index_dir;
  std::string query;
  std::string expansions;
  std::string vectors;
  std::size_t topk = 5;
  std::vector<std::string> dicts;  ///< NAME=FILE
  std::string decomposer;
  bool near_sum = false;
  std::string format = "jsonl";
  unsigned jobs = 1;
  std::uint64_t seed = 1;
};

/// Runs one `koko` invocation. argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace koko::cli
