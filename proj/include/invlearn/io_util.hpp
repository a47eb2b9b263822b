#pragma once

// Small text-artifact helpers. Floats are written with 17 significant digits
// so artifacts round-trip doubles exactly.

#include <string>

namespace invlearn {

std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}
