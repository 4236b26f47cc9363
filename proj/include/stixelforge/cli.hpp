#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stixelforge/agt.hpp"
#include "stixelforge/codec.hpp"
#include "stixelforge/keyvalue.hpp"
#include "stixelforge/loss.hpp"

namespace stixelforge::cli {

enum ExitCode : int { kOk = 0, kPartial = 1, kError = 2 };

inline constexpr std::string_view kConfigEnv = "STIXELFORGE_CONFIG";

/// Every tunable of the pipeline. Values come from defaults, then the config
/// file, then command-line flags.
struct RunConfig {
  agt::AgtConfig agt;
  codec::DecodeConfig decode;
  loss::LossWeights weights;
  double iou_min = 0.5;
  std::optional<int> image_width;
  std::optional<int> image_height;
  std::uint64_t seed = 42;
  int jobs = 1;

  /// Applies `key = value` entries; unknown keys raise Errc::ParseError.
  void apply(const kv::Document& doc);
  void validate() const;
};

/// Runs one command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stixelforge::cli
