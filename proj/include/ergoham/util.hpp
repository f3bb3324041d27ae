#pragma once

#include <string>
#include <vector>

namespace ergoham {

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);
/// Whole-string floating point parse; ConfigError on junk.
double parse_double(const std::string& s);
/// Whole-string integer parse; ConfigError on junk.
long long parse_int(const std::string& s);
/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

} // namespace ergoham
