#pragma once
// Command-line front end. run() is the whole program minus process exit, so
// tests can drive it in-process and compare outputs byte for byte.

#include <iosfwd>
#include <string>
#include <vector>

namespace morselab::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kStratum = 3, kInvariant = 4 };

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// SVG rendering of a CSV produced by `extend` (style "arrows") or `ek`
// (style "cloud"). Throws InvalidInput on missing columns or unknown style.
std::string render_svg(const std::string& csv, const std::string& style);

}  // namespace morselab::cli
