#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vdepth::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kFormatError = 2;
inline constexpr int kSimulationError = 3;

// Runs the tool with args excluding the program name, e.g.
// {"gen", "--frames", "300", "--out", "scene.d16"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vdepth::cli
